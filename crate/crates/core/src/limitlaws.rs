//! Limit laws of the normalized upper order statistics and of the treaties.
//!
//! The reference construction of the `m`-dimensional Gumbel extremal variate
//! is `X_j = −ln Γ_j`, with `Γ_j` the arrival times of a unit-rate Poisson
//! process. Two independently coded routes sample the same law:
//!
//! * spacings: `X_m = −ln Γ_m` drawn directly, then `X_j = X_{j+1} + E_j / j`;
//! * series: `X_j = E_j / j + Σ_{l>j} (E_l − 1) / l + K_j` with
//!   `K_j = K − Σ_{l≤j} 1/l`, truncated at `L` terms.
//!
//! In the series the leading exponential carries the divisor `j`; without it
//! the `j`-th component would have mean `1 + K_j`, which is only correct for
//! `j = 1`. The mean is `−ψ(j)` and the variance `ψ′(j)`.
//!
//! Fréchet and Weibull variates follow by the monotone maps
//! `x ↦ exp(x/α)` and `x ↦ −exp(−x/α)`.

use std::f64::consts::PI;

use crate::counting::CountingModel;
use crate::dependence::BivariateClaimModel;
use crate::error::{Error, Result};
use crate::marginals::MdaClass;
use crate::rng::RandomStream;
use crate::treaties::TreatySpec;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const DEFAULT_TRUNCATION: usize = 100_000;

/// Standardized extreme value law: `Λ`, `Φ_α` or `Ψ_α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardLaw {
    Gumbel,
    Frechet { alpha: f64 },
    Weibull { alpha: f64 },
}

impl StandardLaw {
    /// Exponent `γ` of `Z` in the limit.
    pub fn gamma(&self) -> f64 {
        match *self {
            Self::Gumbel => 0.0,
            Self::Frechet { alpha } => 1.0 / alpha,
            Self::Weibull { alpha } => -1.0 / alpha,
        }
    }

    /// Whether the limit carries the `ln Z` shift.
    pub fn shifted(&self) -> bool {
        matches!(self, Self::Gumbel)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gumbel => (-(-x).exp()).exp(),
            Self::Frechet { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-alpha)).exp()
                }
            }
            Self::Weibull { alpha } => {
                if x >= 0.0 {
                    1.0
                } else {
                    (-(-x).powf(alpha)).exp()
                }
            }
        }
    }
}

impl From<MdaClass> for StandardLaw {
    fn from(c: MdaClass) -> Self {
        match c {
            MdaClass::Gumbel => Self::Gumbel,
            MdaClass::Frechet { alpha } => Self::Frechet { alpha },
            MdaClass::Weibull { alpha, .. } => Self::Weibull { alpha },
        }
    }
}

/// Jointly distributed `(X₁ > X₂ > … > X_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalVariate {
    pub values: Vec<f64>,
    pub law: StandardLaw,
}

/// Arrival times `Γ₁ < … < Γ_m` of a unit-rate Poisson process.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalTimes {
    pub gammas: Vec<f64>,
}

impl ArrivalTimes {
    pub fn sample(m: usize, rng: &mut RandomStream) -> Self {
        let mut acc = 0.0;
        let gammas = (0..m)
            .map(|_| {
                acc += rng.exp1();
                acc
            })
            .collect();
        Self { gammas }
    }
}

/// `K_i = K − Σ_{l=1}^{i} 1/l`, summed in ascending `l`.
pub fn harmonic_k(i: usize) -> f64 {
    (1..=i).fold(EULER_GAMMA, |acc, l| acc - 1.0 / l as f64)
}

/// Mean `−ψ(i)` and variance `ψ′(i)` of the `i`-th Gumbel extremal component.
pub fn extremal_moments(i: usize) -> Result<(f64, f64)> {
    if i == 0 {
        return Err(Error::domain("component index starts at 1"));
    }
    let mean = harmonic_k(i - 1);
    let variance = (1..i).fold(PI * PI / 6.0, |acc, l| acc - 1.0 / (l * l) as f64);
    Ok((mean, variance))
}

/// The uncorrected pair `(1 + K_i, π²/6 + 1 − Σ_{l≤i} 1/l²)`, kept for comparison.
/// Agrees with [`extremal_moments`] only at `i = 1`.
pub fn uncorrected_moments(i: usize) -> Result<(f64, f64)> {
    if i == 0 {
        return Err(Error::domain("component index starts at 1"));
    }
    let variance = (1..=i).fold(PI * PI / 6.0 + 1.0, |acc, l| acc - 1.0 / (l * l) as f64);
    Ok((1.0 + harmonic_k(i), variance))
}

/// Reference sampler: `X_j = −ln Γ_j`.
pub fn sample_gumbel_extremal(m: usize, rng: &mut RandomStream) -> ExtremalVariate {
    let arrivals = ArrivalTimes::sample(m, rng);
    ExtremalVariate {
        values: arrivals.gammas.iter().map(|g| -g.ln()).collect(),
        law: StandardLaw::Gumbel,
    }
}

/// Maps a Gumbel variate to the Fréchet or Weibull law, preserving order.
pub fn transform_extremal(g: &ExtremalVariate, target: StandardLaw) -> Result<ExtremalVariate> {
    if g.law != StandardLaw::Gumbel {
        return Err(Error::WrongMda(format!(
            "transform expects a Gumbel variate, got {:?}",
            g.law
        )));
    }
    let values = match target {
        StandardLaw::Gumbel => g.values.clone(),
        StandardLaw::Frechet { alpha } => g.values.iter().map(|x| (x / alpha).exp()).collect(),
        StandardLaw::Weibull { alpha } => g.values.iter().map(|x| -(-x / alpha).exp()).collect(),
    };
    Ok(ExtremalVariate {
        values,
        law: target,
    })
}

/// `ln h_m(x) = −e^{−x_m} − Σ x_i` for strictly decreasing `x`.
pub fn extremal_log_density(x: &[f64]) -> Result<f64> {
    let last = *x
        .last()
        .ok_or_else(|| Error::domain("density needs at least one component"))?;
    if x.windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::domain(
            "density support requires strictly decreasing components",
        ));
    }
    Ok(-(-last).exp() - x.iter().sum::<f64>())
}

/// Spacings route: `X_m = −ln G` with `G ~ Gamma(m, 1)`, then `X_j = X_{j+1} + E_j / j`.
pub fn sample_spacings_representation(m: usize, rng: &mut RandomStream) -> ExtremalVariate {
    let mut values = vec![0.0; m];
    if m == 0 {
        return ExtremalVariate {
            values,
            law: StandardLaw::Gumbel,
        };
    }
    values[m - 1] = -rng.gamma(m as f64, 1.0).ln();
    for j in (1..m).rev() {
        values[j - 1] = values[j] + rng.exp1() / j as f64;
    }
    ExtremalVariate {
        values,
        law: StandardLaw::Gumbel,
    }
}

fn reciprocals(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|l| if l == 0 { 0.0 } else { 1.0 / l as f64 })
        .collect()
}

/// Series route for the joint law of `(X₁, …, X_m)`, truncated after `truncation` terms.
pub fn sample_series_extremal(
    m: usize,
    truncation: usize,
    rng: &mut RandomStream,
) -> Result<ExtremalVariate> {
    SeriesExtremalSampler::new(m, truncation)?.sample(rng)
}

/// Reusable series sampler; caches `1/l` for `l ≤ L`.
#[derive(Debug, Clone)]
pub struct SeriesExtremalSampler {
    m: usize,
    inv: Vec<f64>,
    scratch_cap: usize,
}

impl SeriesExtremalSampler {
    pub fn new(m: usize, truncation: usize) -> Result<Self> {
        if m == 0 || truncation < m {
            return Err(Error::domain(format!(
                "series needs 1 ≤ m ≤ L, got m = {m}, L = {truncation}"
            )));
        }
        Ok(Self {
            m,
            inv: reciprocals(truncation),
            scratch_cap: m,
        })
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Result<ExtremalVariate> {
        let m = self.m;
        let lead: Vec<f64> = (1..=m).map(|_| rng.exp1()).collect();
        // Σ_{l=m+1}^{L} (E_l − 1)/l, drawn in ascending l.
        let mut tail = 0.0;
        for &r in &self.inv[m + 1..] {
            tail += (rng.exp1() - 1.0) * r;
        }
        let mut values = vec![0.0; self.scratch_cap];
        // Walk down from j = m, extending the tail with (E_{j+1} − 1)/(j+1).
        for j in (1..=m).rev() {
            if j < m {
                tail += (lead[j] - 1.0) * self.inv[j + 1];
            }
            values[j - 1] = lead[j - 1] * self.inv[j] + tail + harmonic_k(j);
        }
        Ok(ExtremalVariate {
            values,
            law: StandardLaw::Gumbel,
        })
    }
}

/// Everything needed to draw from the limit `(Z^{γ₁} Σ k_{j1} X_j + c₁δ₁ ln Z, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreatyLimitSpec {
    pub spec1: TreatySpec,
    pub spec2: TreatySpec,
    pub law1: StandardLaw,
    pub law2: StandardLaw,
    pub mixing: CountingModel,
    /// Whether the bivariate limit `H` factorizes.
    pub product_limit: bool,
    pub kbar1: Vec<f64>,
    pub kbar2: Vec<f64>,
    pub k_p: f64,
    pub k_q: f64,
}

impl TreatyLimitSpec {
    pub fn new(
        spec1: TreatySpec,
        spec2: TreatySpec,
        law1: StandardLaw,
        law2: StandardLaw,
        mixing: CountingModel,
        product_limit: bool,
    ) -> Self {
        Self {
            kbar1: spec1.running_means(),
            kbar2: spec2.running_means(),
            k_p: harmonic_k(spec1.depth()),
            k_q: harmonic_k(spec2.depth()),
            spec1,
            spec2,
            law1,
            law2,
            mixing,
            product_limit,
        }
    }

    pub fn for_model(
        claims: &BivariateClaimModel,
        counting: CountingModel,
        spec1: TreatySpec,
        spec2: TreatySpec,
    ) -> Self {
        Self::new(
            spec1,
            spec2,
            claims.marginal_x.classify_mda().into(),
            claims.marginal_y.classify_mda().into(),
            counting,
            claims.dependence.limit_is_product(),
        )
    }

    fn require_product(&self) -> Result<()> {
        if self.product_limit {
            Ok(())
        } else {
            Err(Error::UnsupportedDependence(
                "limit sampling needs a product extreme value limit H = H1*H2".into(),
            ))
        }
    }

    pub fn both_gumbel(&self) -> bool {
        self.law1.shifted() && self.law2.shifted()
    }
}

fn coordinate_limit(
    spec: &TreatySpec,
    law: StandardLaw,
    gumbel: &ExtremalVariate,
    z: f64,
) -> Result<f64> {
    let variate = transform_extremal(gumbel, law)?;
    let weighted: f64 = spec
        .coeffs()
        .iter()
        .zip(&variate.values)
        .map(|(k, x)| k * x)
        .sum();
    let shift = if law.shifted() {
        spec.total() * z.ln()
    } else {
        0.0
    };
    Ok(z.powf(law.gamma()) * weighted + shift)
}

/// One draw of the treaty pair limit with a shared `Z` and independent coordinates.
pub fn sample_treaty_limit(spec: &TreatyLimitSpec, rng: &mut RandomStream) -> Result<(f64, f64)> {
    spec.require_product()?;
    let z = spec.mixing.sample_mixing_z(rng);
    sample_treaty_limit_given_z(spec, z, rng)
}

/// As [`sample_treaty_limit`], with the limit variable supplied by the caller.
pub fn sample_treaty_limit_given_z(
    spec: &TreatyLimitSpec,
    z: f64,
    rng: &mut RandomStream,
) -> Result<(f64, f64)> {
    spec.require_product()?;
    let depth = spec.spec1.depth().max(spec.spec2.depth());
    let gx = sample_gumbel_extremal(depth, rng);
    let gy = sample_gumbel_extremal(depth, rng);
    Ok((
        coordinate_limit(&spec.spec1, spec.law1, &gx, z)?,
        coordinate_limit(&spec.spec2, spec.law2, &gy, z)?,
    ))
}

/// Series form of the Gumbel/Gumbel treaty limit:
/// `Σ_{l≤p} k̄_l E_l + c [Σ_{l=p+1}^{L} (E_l − 1)/l + ln Z + K_p]` per coordinate.
///
/// Dropping the terms beyond `L` removes a zero-mean part of variance
/// `c² Σ_{l>L} 1/l² < c²/L`.
#[derive(Debug, Clone)]
pub struct Prop3Sampler {
    spec: TreatyLimitSpec,
    inv: Vec<f64>,
}

impl Prop3Sampler {
    pub fn new(spec: &TreatyLimitSpec, truncation: usize) -> Result<Self> {
        if !spec.both_gumbel() {
            return Err(Error::WrongMda(format!(
                "series limit needs Gumbel-class marginals, got {:?} and {:?}",
                spec.law1, spec.law2
            )));
        }
        spec.require_product()?;
        let depth = spec.spec1.depth().max(spec.spec2.depth());
        if truncation < depth {
            return Err(Error::domain(format!(
                "truncation {truncation} below treaty depth {depth}"
            )));
        }
        Ok(Self {
            spec: spec.clone(),
            inv: reciprocals(truncation),
        })
    }

    pub fn sample(&self, rng: &mut RandomStream) -> (f64, f64) {
        let z = self.spec.mixing.sample_mixing_z(rng);
        self.sample_given_z(z, rng)
    }

    pub fn sample_given_z(&self, z: f64, rng: &mut RandomStream) -> (f64, f64) {
        let ln_z = z.ln();
        let s = &self.spec;
        let first = self.coordinate(&s.kbar1, s.spec1.total(), s.k_p, ln_z, rng);
        let second = self.coordinate(&s.kbar2, s.spec2.total(), s.k_q, ln_z, rng);
        (first, second)
    }

    fn coordinate(
        &self,
        kbar: &[f64],
        c: f64,
        k_depth: f64,
        ln_z: f64,
        rng: &mut RandomStream,
    ) -> f64 {
        let p = kbar.len();
        let head: f64 = kbar.iter().map(|k| k * rng.exp1()).sum();
        if c == 0.0 {
            return head;
        }
        let mut tail = 0.0;
        for &r in &self.inv[p + 1..] {
            tail += (rng.exp1() - 1.0) * r;
        }
        head + c * (tail + ln_z + k_depth)
    }
}

pub fn sample_prop3_series(
    spec: &TreatyLimitSpec,
    truncation: usize,
    rng: &mut RandomStream,
) -> Result<(f64, f64)> {
    Ok(Prop3Sampler::new(spec, truncation)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::DependenceModel;
    use crate::marginals::MarginalModel;
    use crate::quadrature::{integrate, Tolerance};
    use crate::stats::{
        ks_one_sample, ks_two_sample, pearson_corr, sample_moments, EmpiricalSample,
    };
    use statrs::function::gamma::{digamma, gamma_lr};

    fn component(draws: &[ExtremalVariate], j: usize) -> EmpiricalSample {
        EmpiricalSample::new(draws.iter().map(|d| d.values[j]).collect()).unwrap()
    }

    /// Trigamma by recurrence up to x ≥ 20 and the asymptotic series.
    fn trigamma(mut x: f64) -> f64 {
        let mut acc = 0.0;
        while x < 20.0 {
            acc += 1.0 / (x * x);
            x += 1.0;
        }
        let x2 = 1.0 / (x * x);
        acc + 1.0 / x
            + x2 / 2.0
            + x2 / x * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)))
    }

    fn fixed_z(lambda: f64) -> CountingModel {
        CountingModel::HomogeneousPoisson { lambda }
    }

    fn gumbel_spec(spec1: TreatySpec, spec2: TreatySpec, mixing: CountingModel) -> TreatyLimitSpec {
        TreatyLimitSpec::new(
            spec1,
            spec2,
            StandardLaw::Gumbel,
            StandardLaw::Gumbel,
            mixing,
            true,
        )
    }

    #[test]
    fn harmonic_constants() {
        assert!((harmonic_k(0) - 0.577_215_664_9).abs() < 1e-10);
        assert!((harmonic_k(1) + 0.422_784_335_1).abs() < 1e-10);
        assert!((harmonic_k(2) + 0.922_784_335_1).abs() < 1e-10);
        // Sanity against the defining limit Σ 1/l − ln n → K.
        let n = 1_000_000usize;
        let h: f64 = (1..=n).map(|l| 1.0 / l as f64).sum();
        assert!((h - (n as f64).ln() - 0.5 / n as f64 - EULER_GAMMA).abs() < 1e-10);
    }

    #[test]
    fn moments_match_polygamma_oracles() {
        for i in 1..=12 {
            let (mean, var) = extremal_moments(i).unwrap();
            assert!((mean + digamma(i as f64)).abs() < 1e-12, "i={i}");
            assert!((var - trigamma(i as f64)).abs() < 1e-10, "i={i}");
        }
        let (m1, v1) = extremal_moments(1).unwrap();
        assert!((m1 - 0.57722).abs() < 1e-5 && (v1 - 1.64493).abs() < 1e-5);
        let (m2, v2) = extremal_moments(2).unwrap();
        assert!((m2 + 0.42278).abs() < 1e-5 && (v2 - 0.64493).abs() < 1e-5);
        let (m3, v3) = extremal_moments(3).unwrap();
        assert!((m3 + 0.92278).abs() < 1e-5 && (v3 - 0.39493).abs() < 1e-5);
        assert!(extremal_moments(0).is_err());
    }

    #[test]
    fn uncorrected_moments_agree_only_at_first_component() {
        let (a, b) = (
            extremal_moments(1).unwrap(),
            uncorrected_moments(1).unwrap(),
        );
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-14);
        let u2 = uncorrected_moments(2).unwrap();
        assert!((u2.0 - (EULER_GAMMA - 0.5)).abs() < 1e-15);
        assert!((u2.1 - (PI * PI / 6.0 - 0.25)).abs() < 1e-14);
        assert!((u2.0 - extremal_moments(2).unwrap().0).abs() > 0.49);
    }

    #[test]
    fn reference_first_two_components() {
        let mut rng = RandomStream::from_seed(41);
        let draws: Vec<_> = (0..1_000_000)
            .map(|_| sample_gumbel_extremal(2, &mut rng))
            .collect();
        let x1: Vec<f64> = draws.iter().map(|d| d.values[0]).collect();
        let x2: Vec<f64> = draws.iter().map(|d| d.values[1]).collect();
        let m1 = sample_moments(&x1).unwrap();
        let m2 = sample_moments(&x2).unwrap();
        assert!((m1.mean - EULER_GAMMA).abs() < 0.005);
        assert!((m1.variance - PI * PI / 6.0).abs() < 0.01);
        assert!((m2.mean - (EULER_GAMMA - 1.0)).abs() < 0.005);
        assert!((m2.variance - (PI * PI / 6.0 - 1.0)).abs() < 0.01);
        assert!(draws.iter().all(|d| d.values[0] > d.values[1]));
    }

    #[test]
    fn samplers_produce_strictly_decreasing_output() {
        let mut rng = RandomStream::from_seed(42);
        let series = SeriesExtremalSampler::new(6, 500).unwrap();
        for _ in 0..2000 {
            for v in [
                sample_gumbel_extremal(6, &mut rng),
                sample_spacings_representation(6, &mut rng),
                series.sample(&mut rng).unwrap(),
            ] {
                assert!(v.values.windows(2).all(|w| w[0] > w[1]), "{v:?}");
            }
        }
    }

    #[test]
    fn transforms() {
        let g = ExtremalVariate {
            values: vec![0.0],
            law: StandardLaw::Gumbel,
        };
        let f = transform_extremal(&g, StandardLaw::Frechet { alpha: 1.0 }).unwrap();
        assert_eq!(f.values, vec![1.0]);
        let w = transform_extremal(&g, StandardLaw::Weibull { alpha: 2.0 }).unwrap();
        assert_eq!(w.values, vec![-1.0]);
        assert!(transform_extremal(&f, StandardLaw::Gumbel).is_err());

        let mut rng = RandomStream::from_seed(43);
        let mut fr = Vec::new();
        let mut wb = Vec::new();
        for _ in 0..1_000_000 {
            let g = sample_gumbel_extremal(3, &mut rng);
            let f = transform_extremal(&g, StandardLaw::Frechet { alpha: 1.0 }).unwrap();
            let w = transform_extremal(&g, StandardLaw::Weibull { alpha: 1.0 }).unwrap();
            assert!(f.values[0] > f.values[1] && f.values[2] > 0.0);
            assert!(w.values[0] > w.values[1] && w.values[0] < 0.0);
            fr.push(f.values[0]);
            wb.push(w.values[0]);
        }
        let kf = ks_one_sample(&EmpiricalSample::new(fr).unwrap(), |x| {
            if x > 0.0 {
                (-1.0 / x).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        let kw = ks_one_sample(&EmpiricalSample::new(wb).unwrap(), |x| {
            if x < 0.0 {
                (-x.abs()).exp()
            } else {
                1.0
            }
        })
        .unwrap();
        assert!(kf.passes(), "{kf:?}");
        assert!(kw.passes(), "{kw:?}");
    }

    #[test]
    fn log_density_examples() {
        assert!((extremal_log_density(&[0.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((extremal_log_density(&[1.0, 0.0]).unwrap() + 2.0).abs() < 1e-15);
        assert!(extremal_log_density(&[0.0, 1.0]).is_err());
        assert!(extremal_log_density(&[0.5, 0.5]).is_err());
        assert!(extremal_log_density(&[]).is_err());
    }

    #[test]
    fn one_dimensional_density_integrates_to_one() {
        let tol = Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_subdivisions: 500,
        };
        let total = integrate(
            |x| extremal_log_density(&[x]).unwrap().exp(),
            -6.0,
            40.0,
            tol,
        )
        .unwrap()
        .value;
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn histogram_matches_integrated_density() {
        let n = 1_000_000;
        let mut rng = RandomStream::from_seed(44);
        let (x1_lo, x2_lo, width, cells) = (-1.5, -2.5, 0.3, 20usize);
        let mut counts = vec![0usize; cells * cells];
        for _ in 0..n {
            let v = sample_gumbel_extremal(2, &mut rng).values;
            let i = ((v[0] - x1_lo) / width).floor();
            let j = ((v[1] - x2_lo) / width).floor();
            if (0.0..cells as f64).contains(&i) && (0.0..cells as f64).contains(&j) {
                counts[i as usize * cells + j as usize] += 1;
            }
        }
        let tol = Tolerance {
            abs: 1e-12,
            rel: 1e-9,
            max_subdivisions: 200,
        };
        let density = |a: f64, b: f64| extremal_log_density(&[a, b]).map(f64::exp).unwrap_or(0.0);
        let mut worst: f64 = 0.0;
        for i in 0..cells {
            let (a_lo, a_hi) = (x1_lo + i as f64 * width, x1_lo + (i + 1) as f64 * width);
            for j in 0..cells {
                let (b_lo, b_hi) = (x2_lo + j as f64 * width, x2_lo + (j + 1) as f64 * width);
                let prob = integrate(
                    |b| {
                        let lo = a_lo.max(b);
                        if lo >= a_hi {
                            0.0
                        } else {
                            integrate(|a| density(a, b), lo, a_hi, tol).unwrap().value
                        }
                    },
                    b_lo,
                    b_hi,
                    tol,
                )
                .unwrap()
                .value;
                let emp = counts[i * cells + j] as f64 / n as f64;
                worst = worst.max((emp - prob).abs());
            }
        }
        assert!(worst < 0.005, "max cell error {worst}");
    }

    #[test]
    fn spacings_are_scaled_exponentials() {
        let mut rng = RandomStream::from_seed(45);
        let n = 1_000_000;
        let draws: Vec<_> = (0..n)
            .map(|_| sample_spacings_representation(3, &mut rng))
            .collect();
        let s1: Vec<f64> = draws.iter().map(|d| d.values[0] - d.values[1]).collect();
        let s2: Vec<f64> = draws.iter().map(|d| d.values[1] - d.values[2]).collect();
        let fresh: Vec<f64> = (0..n).map(|_| rng.exp_inversion()).collect();
        let ks = ks_two_sample(
            &EmpiricalSample::new(s1.clone()).unwrap(),
            &EmpiricalSample::new(fresh).unwrap(),
        )
        .unwrap();
        assert!(ks.passes(), "{ks:?}");
        assert!(pearson_corr(&s1, &s2).unwrap().abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn single_component_routes_agree() {
        let mut rng = RandomStream::from_seed(46);
        let n = 100_000;
        let a: Vec<_> = (0..n)
            .map(|_| sample_gumbel_extremal(1, &mut rng))
            .collect();
        let b: Vec<_> = (0..n)
            .map(|_| sample_spacings_representation(1, &mut rng))
            .collect();
        let ks = ks_two_sample(&component(&a, 0), &component(&b, 0)).unwrap();
        assert!(ks.passes(), "{ks:?}");
    }

    #[test]
    fn series_sampler_matches_reference_at_moderate_truncation() {
        let mut rng = RandomStream::from_seed(47);
        let n = 50_000;
        let series = SeriesExtremalSampler::new(3, 5_000).unwrap();
        let a: Vec<_> = (0..n)
            .map(|_| sample_gumbel_extremal(3, &mut rng))
            .collect();
        let b: Vec<_> = (0..n).map(|_| series.sample(&mut rng).unwrap()).collect();
        for j in 0..3 {
            let ks = ks_two_sample(&component(&a, j), &component(&b, j)).unwrap();
            assert!(ks.passes(), "component {j}: {ks:?}");
        }
        assert!(SeriesExtremalSampler::new(0, 10).is_err());
        assert!(SeriesExtremalSampler::new(5, 4).is_err());
    }

    #[test]
    fn unit_coefficient_series_reproduces_joint_series_component() {
        // Prop3 with k = e_m and Z = 1 evaluates the m-th component of the
        // joint series from the same exponentials.
        for m in 1..=4 {
            let mut coeffs = vec![0.0; m];
            coeffs[m - 1] = 1.0;
            let unit = TreatySpec::new(coeffs).unwrap();
            let spec = gumbel_spec(unit.clone(), unit, fixed_z(1.0));
            let prop3 = Prop3Sampler::new(&spec, 300).unwrap();
            let joint = SeriesExtremalSampler::new(m, 300).unwrap();
            for seed in 0..20 {
                let (x, _) = prop3.sample_given_z(1.0, &mut RandomStream::from_seed(seed));
                let v = joint.sample(&mut RandomStream::from_seed(seed)).unwrap();
                assert!(
                    (x - v.values[m - 1]).abs() < 1e-12,
                    "m={m}: {x} vs {:?}",
                    v.values
                );
            }
        }
    }

    #[test]
    fn ecomor_series_is_gamma_and_ignores_z() {
        let spec = gumbel_spec(
            TreatySpec::ecomor(4).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            fixed_z(7.0),
        );
        let sampler = Prop3Sampler::new(&spec, 1000).unwrap();
        let mut rng = RandomStream::from_seed(48);
        let xs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng).0).collect();
        let ks = ks_one_sample(&EmpiricalSample::new(xs).unwrap(), |x| {
            if x > 0.0 {
                gamma_lr(3.0, x)
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(ks.passes(), "{ks:?}");
        // Exactly Σ_{l<p} E_l: k̄ = (1, 1, 1, 0).
        assert_eq!(spec.kbar1, vec![1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn lcr2_series_mean() {
        let spec = gumbel_spec(
            TreatySpec::lcr(2).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            fixed_z(1.0),
        );
        let sampler = Prop3Sampler::new(&spec, 1000).unwrap();
        let mut rng = RandomStream::from_seed(49);
        let xs: Vec<f64> = (0..400_000).map(|_| sampler.sample(&mut rng).0).collect();
        let m = sample_moments(&xs).unwrap();
        let target = 2.0 * EULER_GAMMA - 1.0;
        assert!((m.mean - target).abs() < 4.0 * m.std_error, "{m:?}");
        // Same target from the reference sampler: E X₁ + E X₂.
        let (e1, e2) = (
            extremal_moments(1).unwrap().0,
            extremal_moments(2).unwrap().0,
        );
        assert!((e1 + e2 - target).abs() < 1e-15);
    }

    #[test]
    fn series_tail_truncation_bound() {
        let spec = gumbel_spec(
            TreatySpec::lcr(2).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            fixed_z(1.0),
        );
        let c = spec.spec1.total();
        let n = 100_000;
        let var_and_se = |l: usize, seed: u64| {
            let s = Prop3Sampler::new(&spec, l).unwrap();
            let mut rng = RandomStream::from_seed(seed);
            let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng).0).collect();
            let m = sample_moments(&xs).unwrap();
            let m4 = xs.iter().map(|x| (x - m.mean).powi(4)).sum::<f64>() / n as f64;
            (
                m.variance,
                ((m4 - m.variance * m.variance) / n as f64).sqrt(),
            )
        };
        let l = 100;
        let (v_short, se_short) = var_and_se(l, 50);
        let (v_long, se_long) = var_and_se(10 * l, 51);
        let slack = c * c / l as f64 + 4.0 * (se_short * se_short + se_long * se_long).sqrt();
        assert!((v_long - v_short).abs() <= slack, "{v_short} vs {v_long}");
    }

    #[test]
    fn treaty_limit_ecomor_ignores_z() {
        let mut samples = Vec::new();
        for z in [0.1, 1.0, 10.0] {
            let spec = gumbel_spec(
                TreatySpec::ecomor(3).unwrap(),
                TreatySpec::lcr(1).unwrap(),
                fixed_z(z),
            );
            let mut rng = RandomStream::from_seed(52);
            let xs: Vec<f64> = (0..100_000)
                .map(|_| sample_treaty_limit(&spec, &mut rng).unwrap().0)
                .collect();
            samples.push(EmpiricalSample::new(xs).unwrap());
        }
        let gamma2 = |x: f64| if x > 0.0 { gamma_lr(2.0, x) } else { 0.0 };
        for s in &samples {
            assert!(ks_one_sample(s, gamma2).unwrap().passes());
        }
        // Identical streams and c = 0, γ = 0: the draws coincide exactly.
        assert_eq!(samples[0], samples[1]);
        assert_eq!(samples[1], samples[2]);
    }

    #[test]
    fn treaty_limit_frechet_scaling() {
        let spec = TreatyLimitSpec::new(
            TreatySpec::lcr(1).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            StandardLaw::Frechet { alpha: 1.0 },
            StandardLaw::Frechet { alpha: 1.0 },
            fixed_z(2.0),
            true,
        );
        let mut rng = RandomStream::from_seed(53);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_treaty_limit(&spec, &mut rng).unwrap().0)
            .collect();
        let ks = ks_one_sample(&EmpiricalSample::new(xs).unwrap(), |x| {
            if x > 0.0 {
                (-2.0 / x).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(ks.passes(), "{ks:?}");
    }

    #[test]
    fn treaty_limit_weibull_scaling() {
        // Z^{-1/α} X₁ with X₁ ~ Ψ₂ and Z = 4: P(≤ x) = exp(−(2|x|)²).
        let spec = TreatyLimitSpec::new(
            TreatySpec::lcr(1).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            StandardLaw::Weibull { alpha: 2.0 },
            StandardLaw::Gumbel,
            fixed_z(4.0),
            true,
        );
        let mut rng = RandomStream::from_seed(54);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| sample_treaty_limit(&spec, &mut rng).unwrap().0)
            .collect();
        let ks = ks_one_sample(&EmpiricalSample::new(xs).unwrap(), |x| {
            if x < 0.0 {
                (-(2.0 * x).powi(2)).exp()
            } else {
                1.0
            }
        })
        .unwrap();
        assert!(ks.passes(), "{ks:?}");
    }

    #[test]
    fn treaty_limit_gumbel_unit_z_is_standard_gumbel() {
        let spec = gumbel_spec(
            TreatySpec::lcr(1).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            fixed_z(1.0),
        );
        let mut rng = RandomStream::from_seed(55);
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..200_000)
            .map(|_| sample_treaty_limit(&spec, &mut rng).unwrap())
            .unzip();
        let gumbel = |x: f64| (-(-x).exp()).exp();
        assert!(
            ks_one_sample(&EmpiricalSample::new(xs.clone()).unwrap(), gumbel)
                .unwrap()
                .passes()
        );
        assert!(
            ks_one_sample(&EmpiricalSample::new(ys.clone()).unwrap(), gumbel)
                .unwrap()
                .passes()
        );
        assert!(pearson_corr(&xs, &ys).unwrap().abs() < 3.0 / (200_000f64).sqrt());
    }

    #[test]
    fn non_product_limits_are_rejected() {
        let claims = BivariateClaimModel::new(
            MarginalModel::Exponential,
            MarginalModel::Exponential,
            DependenceModel::gumbel_hougaard(2.0).unwrap(),
        );
        let spec = TreatyLimitSpec::for_model(
            &claims,
            fixed_z(1.0),
            TreatySpec::lcr(1).unwrap(),
            TreatySpec::lcr(1).unwrap(),
        );
        let mut rng = RandomStream::from_seed(56);
        assert!(matches!(
            sample_treaty_limit(&spec, &mut rng),
            Err(Error::UnsupportedDependence(_))
        ));
        assert!(matches!(
            sample_prop3_series(&spec, 10, &mut rng),
            Err(Error::UnsupportedDependence(_))
        ));
    }

    #[test]
    fn series_rejects_non_gumbel_marginals() {
        let claims = BivariateClaimModel::independent(
            MarginalModel::pareto(2.0).unwrap(),
            MarginalModel::Exponential,
        );
        let spec = TreatyLimitSpec::for_model(
            &claims,
            fixed_z(1.0),
            TreatySpec::lcr(1).unwrap(),
            TreatySpec::lcr(1).unwrap(),
        );
        assert!(matches!(
            Prop3Sampler::new(&spec, 10),
            Err(Error::WrongMda(_))
        ));
        let gumbel = gumbel_spec(
            TreatySpec::lcr(3).unwrap(),
            TreatySpec::lcr(1).unwrap(),
            fixed_z(1.0),
        );
        assert!(Prop3Sampler::new(&gumbel, 2).is_err());
    }

    #[test]
    fn limit_spec_constants() {
        let spec = gumbel_spec(
            TreatySpec::new(vec![2.0, 0.0, 1.0]).unwrap(),
            TreatySpec::lcr(2).unwrap(),
            fixed_z(1.0),
        );
        assert_eq!(spec.kbar1, vec![2.0, 1.0, 1.0]);
        assert_eq!(spec.kbar2, vec![1.0, 1.0]);
        assert_eq!(spec.k_p, harmonic_k(3));
        assert_eq!(spec.k_q, harmonic_k(2));
        assert_eq!(
            StandardLaw::from(MdaClass::Weibull {
                alpha: 2.0,
                omega: 5.0
            })
            .gamma(),
            -0.5
        );
    }
}

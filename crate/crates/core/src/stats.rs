//! Empirical-distribution utilities: ECDF distances, moments, correlation.

use crate::error::{Error, Result};

/// Asymptotic 99% coefficient of the Kolmogorov distribution.
pub const KS_COEFF_99: f64 = 1.628;

/// A sample sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    /// Sorts `values`; NaN entries are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("sample contains NaN"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `#{x_i ≤ x} / n`.
    pub fn ecdf(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_99: f64,
}

impl KsResult {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical_99
    }
}

/// Two-sample Kolmogorov–Smirnov distance by a merge scan over both sorted samples.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (xs, ys) = (a.values(), b.values());
    let (n, m) = (xs.len(), ys.len());
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i].min(ys[j]);
        while i < n && xs[i] <= x {
            i += 1;
        }
        while j < m && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    Ok(KsResult {
        statistic: d,
        critical_99: ks_critical_two_sample(n, m),
    })
}

pub fn ks_critical_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_COEFF_99 * ((n + m) / (n * m)).sqrt()
}

/// One-sample Kolmogorov–Smirnov distance against a continuous reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(a: &EmpiricalSample, cdf: F) -> Result<KsResult> {
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = a.len() as f64;
    let statistic = a
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        critical_99: KS_COEFF_99 / n.sqrt(),
    })
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased (n − 1) variance.
    pub variance: f64,
    pub std_error: f64,
}

/// One-pass Welford accumulator whose mean and second-moment updates are
/// carried in compensated sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    n: usize,
    mean: CompensatedSum,
    m2: CompensatedSum,
}

impl MomentAccumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let mean = self.mean.value();
        let delta = x - mean;
        self.mean.add(delta / self.n as f64);
        self.m2.add(delta * (x - self.mean.value()));
    }

    pub fn finish(&self) -> Result<Moments> {
        if self.n < 2 {
            return Err(Error::DegenerateSample(format!(
                "variance needs at least 2 observations, got {}",
                self.n
            )));
        }
        let variance = (self.m2.value() / (self.n - 1) as f64).max(0.0);
        Ok(Moments {
            n: self.n,
            mean: self.mean.value(),
            variance,
            std_error: (variance / self.n as f64).sqrt(),
        })
    }
}

pub fn sample_moments(xs: &[f64]) -> Result<Moments> {
    let mut acc = MomentAccumulator::default();
    xs.iter().for_each(|&x| acc.push(x));
    acc.finish()
}

/// Product-moment correlation, two-pass.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "correlation needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateSample(
            "correlation needs at least 2 pairs".into(),
        ));
    }
    let n = x.len() as f64;
    let mean = |v: &[f64]| {
        let mut s = CompensatedSum::default();
        v.iter().for_each(|&a| s.add(a));
        s.value() / n
    };
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = CompensatedSum::default();
    let mut sxx = CompensatedSum::default();
    let mut syy = CompensatedSum::default();
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    let (sxx, syy) = (sxx.value(), syy.value());
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateSample(
            "zero variance in correlation input".into(),
        ));
    }
    Ok((sxy.value() / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn sample(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_sample_examples() {
        let a = sample(&[0.3, 1.2, -4.0, 2.2]);
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        assert_eq!(
            ks_two_sample(&sample(&[0.0]), &sample(&[1.0]))
                .unwrap()
                .statistic,
            1.0
        );
        let d = ks_two_sample(&sample(&[1.0, 2.0]), &sample(&[1.0, 2.0, 3.0]))
            .unwrap()
            .statistic;
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_sample_critical_value() {
        let r = ks_two_sample(&sample(&[1.0, 2.0]), &sample(&[1.0, 2.0, 3.0])).unwrap();
        assert!((r.critical_99 - 1.628 * (5.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_samples_rejected() {
        let empty = EmpiricalSample::new(vec![]).unwrap();
        assert!(matches!(
            ks_two_sample(&empty, &sample(&[1.0])),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            ks_one_sample(&empty, |x| x),
            Err(Error::EmptySample)
        ));
        assert!(EmpiricalSample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn one_sample_examples() {
        let median = 2f64.ln();
        let cdf = |x: f64| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() };
        let r = ks_one_sample(&sample(&[median]), cdf).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);

        let grid: Vec<f64> = (1..=100)
            .map(|i| -(1.0 - (i as f64 - 0.5) / 100.0).ln())
            .collect();
        let r = ks_one_sample(&sample(&grid), cdf).unwrap();
        assert!((r.statistic - 0.005).abs() < 1e-12);
        assert!((r.critical_99 - 0.1628).abs() < 1e-15);
    }

    #[test]
    fn one_sample_random_draws_pass() {
        let mut rng = RandomStream::from_seed(5);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.exp_inversion()).collect();
        let r = ks_one_sample(&sample(&xs), |x| 1.0 - (-x).exp()).unwrap();
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn ecdf_steps() {
        let s = sample(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(s.ecdf(0.0), 0.0);
        assert_eq!(s.ecdf(2.0), 0.75);
        assert_eq!(s.ecdf(10.0), 1.0);
    }

    #[test]
    fn moments_examples() {
        let m = sample_moments(&[1.0, 3.0]).unwrap();
        assert_eq!((m.mean, m.variance, m.std_error), (2.0, 2.0, 1.0));
        let m = sample_moments(&[4.25; 50]).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(matches!(
            sample_moments(&[1.0]),
            Err(Error::DegenerateSample(_))
        ));

        let mut rng = RandomStream::from_seed(6);
        let xs: Vec<f64> = (0..1_000_000).map(|_| rng.exp_inversion()).collect();
        let m = sample_moments(&xs).unwrap();
        assert!((m.mean - 1.0).abs() < 4.0 * m.std_error);
    }

    #[test]
    fn moments_match_two_pass_on_mixed_magnitudes() {
        let mut rng = RandomStream::from_seed(7);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|i| {
                let scale = [1e-6, 1.0, 1e3, 1e6][i % 4];
                1e6 + scale * rng.standard_normal()
            })
            .collect();
        let m = sample_moments(&xs).unwrap();
        let n = xs.len() as f64;
        let mut s = CompensatedSum::default();
        xs.iter().for_each(|&x| s.add(x));
        let mean = s.value() / n;
        let mut ss = CompensatedSum::default();
        xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
        let var = ss.value() / (n - 1.0);
        assert!(((m.mean - mean) / mean).abs() < 1e-10);
        assert!(((m.variance - var) / var).abs() < 1e-10);
    }

    #[test]
    fn correlation_examples() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        assert!((pearson_corr(&x, &x).unwrap() - 1.0).abs() < 1e-14);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 5.0).collect();
        assert!((pearson_corr(&x, &y).unwrap() + 1.0).abs() < 1e-14);
        assert!(pearson_corr(&x, &[1.0; 100]).is_err());
        assert!(pearson_corr(&x, &x[..10]).is_err());

        let mut rng = RandomStream::from_seed(8);
        let n = 100_000;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        assert!(pearson_corr(&a, &b).unwrap().abs() < 3.0 / (n as f64).sqrt());
    }

    proptest! {
        #[test]
        fn two_sample_symmetric_and_transform_invariant(
            a in prop::collection::vec(-100.0f64..100.0, 1..60),
            b in prop::collection::vec(-100.0f64..100.0, 1..60),
        ) {
            let (sa, sb) = (sample(&a), sample(&b));
            let d1 = ks_two_sample(&sa, &sb).unwrap().statistic;
            let d2 = ks_two_sample(&sb, &sa).unwrap().statistic;
            prop_assert_eq!(d1, d2);
            prop_assert!((0.0..=1.0).contains(&d1));
            let tr = |v: &[f64]| sample(&v.iter().map(|x| (x / 10.0).exp() * 3.0 - 1.0).collect::<Vec<_>>());
            let d3 = ks_two_sample(&tr(&a), &tr(&b)).unwrap().statistic;
            prop_assert!((d1 - d3).abs() < 1e-12);
        }
    }
}

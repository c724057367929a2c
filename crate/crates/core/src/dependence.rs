//! Copula coupling of two marginals into a bivariate claim model.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::quadrature::{self, Tolerance};
use crate::rng::RandomStream;

// Largest double below one; keeps copula draws inside the open unit interval.
const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DependenceModel {
    Independence,
    /// `C(u, v) = exp(−[(−ln u)^θ + (−ln v)^θ]^{1/θ})`, `θ ≥ 1`.
    GumbelHougaard {
        theta: f64,
    },
    /// Normal copula with correlation `ρ ∈ (−1, 1)`.
    Gaussian {
        rho: f64,
    },
}

impl DependenceModel {
    pub fn gumbel_hougaard(theta: f64) -> Result<Self> {
        Self::GumbelHougaard { theta }.validated()
    }

    pub fn gaussian(rho: f64) -> Result<Self> {
        Self::Gaussian { rho }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::GumbelHougaard { theta } if !(theta >= 1.0 && theta.is_finite()) => {
                Err(Error::domain(format!(
                    "Gumbel-Hougaard theta must be finite and at least 1, got {theta}"
                )))
            }
            Self::Gaussian { rho } if !(rho > -1.0 && rho < 1.0) => Err(Error::domain(format!(
                "Gaussian copula rho must lie in (-1, 1), got {rho}"
            ))),
            ok => Ok(ok),
        }
    }

    /// Whether the bivariate extreme value limit of maxima factorizes as `H₁·H₂`.
    ///
    /// The normal copula with `|ρ| < 1` is asymptotically independent; the
    /// Gumbel–Hougaard copula is itself max-stable and stays dependent for `θ > 1`.
    pub fn limit_is_product(&self) -> bool {
        match *self {
            Self::Independence | Self::Gaussian { .. } => true,
            Self::GumbelHougaard { theta } => theta == 1.0,
        }
    }

    pub fn copula_cdf(&self, u: f64, v: f64) -> Result<f64> {
        if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
            return Err(Error::domain(format!(
                "copula arguments must lie in [0, 1]², got ({u}, {v})"
            )));
        }
        if u == 0.0 || v == 0.0 {
            return Ok(0.0);
        }
        if u == 1.0 {
            return Ok(v);
        }
        if v == 1.0 {
            return Ok(u);
        }
        Ok(match *self {
            Self::Independence => u * v,
            Self::GumbelHougaard { theta } => {
                let s = (-u.ln()).powf(theta) + (-v.ln()).powf(theta);
                (-s.powf(1.0 / theta)).exp()
            }
            Self::Gaussian { rho } => {
                bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), rho)?
            }
        })
    }

    /// Draws `(U, V)` from the copula, strictly inside the unit square.
    pub fn sample_uniforms(&self, rng: &mut RandomStream) -> (f64, f64) {
        let (a, b) = self.sample_exceedances(rng);
        (clamp_open(1.0 - a), clamp_open(1.0 - b))
    }

    /// `(1 − U, 1 − V)` for `(U, V)` drawn from the copula, computed without
    /// forming `1 − U` so that small exceedance probabilities keep full precision.
    pub fn sample_exceedances(&self, rng: &mut RandomStream) -> (f64, f64) {
        match *self {
            Self::Independence => (rng.uniform(), rng.uniform()),
            Self::GumbelHougaard { theta: 1.0 } => (rng.uniform(), rng.uniform()),
            Self::GumbelHougaard { theta } => {
                // Marshall–Olkin: U_i = exp(−(E_i / S)^{1/θ}) with S positive
                // stable of index 1/θ (Kanter's representation), whose Laplace
                // transform is exp(−s^{1/θ}).
                let alpha = 1.0 / theta;
                let s = positive_stable(alpha, rng);
                let a = -(-(rng.exp_inversion() / s).powf(alpha)).exp_m1();
                let b = -(-(rng.exp_inversion() / s).powf(alpha)).exp_m1();
                (clamp_open(a), clamp_open(b))
            }
            Self::Gaussian { rho } => {
                let z1 = rng.standard_normal();
                let z2 = rho * z1 + (1.0 - rho * rho).sqrt() * rng.standard_normal();
                (clamp_open(normal_cdf(-z1)), clamp_open(normal_cdf(-z2)))
            }
        }
    }
}

/// Draw from the positive stable law with Laplace transform `exp(−s^α)`, `0 < α < 1`.
fn positive_stable(alpha: f64, rng: &mut RandomStream) -> f64 {
    let theta = PI * rng.uniform();
    let w = rng.exp_inversion();
    let a = (alpha * theta).sin() / theta.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * theta).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

#[inline]
fn clamp_open(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, ONE_MINUS_EPS)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_quantile(u: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * u)
}

/// `P(Z₁ ≤ h, Z₂ ≤ k)` for standard normals with correlation `ρ`.
///
/// Uses `Φ(h)Φ(k) + (2π)⁻¹ ∫₀^{asin ρ} exp(−(h² + k² − 2hk sin θ) / (2 cos² θ)) dθ`,
/// whose integrand is smooth and bounded for `|ρ| < 1`.
pub fn bivariate_normal_cdf(h: f64, k: f64, rho: f64) -> Result<f64> {
    let base = normal_cdf(h) * normal_cdf(k);
    if rho == 0.0 {
        return Ok(base);
    }
    let upper = rho.asin();
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_subdivisions: 500,
    };
    let est = quadrature::integrate(
        |t| {
            let (s, c) = t.sin_cos();
            (-(h * h + k * k - 2.0 * h * k * s) / (2.0 * c * c)).exp()
        },
        0.0,
        upper,
        tol,
    )?;
    Ok((base + est.value / (2.0 * PI)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateClaimModel {
    pub marginal_x: MarginalModel,
    pub marginal_y: MarginalModel,
    pub dependence: DependenceModel,
}

impl BivariateClaimModel {
    pub fn new(
        marginal_x: MarginalModel,
        marginal_y: MarginalModel,
        dependence: DependenceModel,
    ) -> Self {
        Self {
            marginal_x,
            marginal_y,
            dependence,
        }
    }

    pub fn independent(marginal_x: MarginalModel, marginal_y: MarginalModel) -> Self {
        Self::new(marginal_x, marginal_y, DependenceModel::Independence)
    }

    #[inline]
    pub fn sample_pair(&self, rng: &mut RandomStream) -> (f64, f64) {
        let (a, b) = self.dependence.sample_exceedances(rng);
        (
            self.marginal_x.tail_quantile_unchecked(a),
            self.marginal_y.tail_quantile_unchecked(b),
        )
    }

    /// Fills `xs` and `ys` with `n` claim pairs, reusing their allocations.
    pub fn sample_into(
        &self,
        rng: &mut RandomStream,
        n: usize,
        xs: &mut Vec<f64>,
        ys: &mut Vec<f64>,
    ) {
        xs.clear();
        ys.clear();
        xs.reserve(n);
        ys.reserve(n);
        for _ in 0..n {
            let (x, y) = self.sample_pair(rng);
            xs.push(x);
            ys.push(y);
        }
    }
}

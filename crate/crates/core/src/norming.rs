//! Normalizing constants `a(t) > 0`, `b(t)` and limit exponents per marginal.
//!
//! With `F⁻(1 − 1/t)` the return level at period `t`:
//!
//! * Fréchet(α): `a = F⁻(1 − 1/t)`, `b = 0`, `γ = 1/α`;
//! * Weibull(α, ω): `a = ω − F⁻(1 − 1/t)`, `b = ω`, `γ = −1/α`;
//! * Gumbel: `b = F⁻(1 − 1/t)`, `a = e(b)` the mean excess at `b`, `γ = 0`
//!   and the shift flag `δ` set, so that the limit picks up `ln Z`.

use crate::dependence::BivariateClaimModel;
use crate::error::{Error, Result};
use crate::marginals::{MarginalModel, MdaClass};
use crate::quadrature::{self, Tolerance};

/// Constants for one marginal at one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalNorming {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    /// Set for Gumbel-class marginals; the limit then carries a `ln Z` shift.
    pub delta: bool,
}

impl MarginalNorming {
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.b) / self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstants {
    pub t: f64,
    pub x: MarginalNorming,
    pub y: MarginalNorming,
}

impl NormingConstants {
    pub fn for_model(model: &BivariateClaimModel, t: f64) -> Result<Self> {
        Ok(Self {
            t,
            x: norming_constants(&model.marginal_x, t)?,
            y: norming_constants(&model.marginal_y, t)?,
        })
    }
}

pub fn norming_constants(model: &MarginalModel, t: f64) -> Result<MarginalNorming> {
    if !(t.is_finite() && t > 1.0) {
        return Err(Error::domain(format!(
            "horizon must be finite and exceed 1, got {t}"
        )));
    }
    let level = model.return_level(t)?;
    Ok(match model.classify_mda() {
        MdaClass::Frechet { alpha } => MarginalNorming {
            a: level,
            b: 0.0,
            gamma: 1.0 / alpha,
            delta: false,
        },
        MdaClass::Weibull { alpha, omega } => {
            // ω − F⁻(1 − 1/t) = t^{−1/α}, evaluated without cancellation.
            let gap = match *model {
                MarginalModel::BoundedPower { alpha, .. } => t.powf(-1.0 / alpha),
                _ => omega - level,
            };
            MarginalNorming {
                a: gap,
                b: omega,
                gamma: -1.0 / alpha,
                delta: false,
            }
        }
        MdaClass::Gumbel => MarginalNorming {
            a: mean_excess(model, level)?,
            b: level,
            gamma: 0.0,
            delta: true,
        },
    })
}

fn check_mean_excess_domain(model: &MarginalModel, u: f64) -> Result<()> {
    if !model.classify_mda().is_gumbel() {
        return Err(Error::WrongMda(format!(
            "mean excess norming applies to Gumbel-class marginals, got {}",
            model.classify_mda()
        )));
    }
    if u.is_nan() || model.log_survival(u) == f64::NEG_INFINITY {
        return Err(Error::domain(format!(
            "mean excess needs F(u) < 1, got u = {u}"
        )));
    }
    Ok(())
}

/// `e(u) = ∫_u^ω [1 − F(s)] ds / [1 − F(u)]`, closed form.
pub fn mean_excess(model: &MarginalModel, u: f64) -> Result<f64> {
    check_mean_excess_domain(model, u)?;
    Ok(match *model {
        MarginalModel::Exponential => 1.0 + (-u).max(0.0),
        MarginalModel::ExpTailEquivalent { shift } => {
            if u >= shift {
                1.0
            } else {
                (shift - u) + (-shift).exp()
            }
        }
        _ => unreachable!("non-Gumbel families rejected above"),
    })
}

/// Quadrature route for `e(u)`, independent of the closed forms.
///
/// The integrand is the tail ratio `exp(ln S(s) − ln S(u))` on `[u, ∞)`, split
/// at the lower support endpoint when `u` lies below it, with relative tolerance
/// `1e−10` (well inside the `1e−8` budget the norming constants need).
pub fn mean_excess_quadrature(model: &MarginalModel, u: f64) -> Result<f64> {
    check_mean_excess_domain(model, u)?;
    let log_su = model.log_survival(u);
    let ratio = |s: f64| (model.log_survival(s) - log_su).exp();
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-10,
        max_subdivisions: 2000,
    };
    let (lower, upper) = model.support();
    let mut total = 0.0;
    let mut start = u;
    if u < lower {
        total += quadrature::integrate(ratio, u, lower, tol)?.value;
        start = lower;
    }
    total += if upper.is_finite() {
        quadrature::integrate(ratio, start, upper, tol)?.value
    } else {
        quadrature::integrate_to_infinity(ratio, start, tol)?.value
    };
    Ok(total)
}

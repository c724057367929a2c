//! Univariate claim-size families with closed-form CDFs and generalized inverses.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A claim-size distribution.
///
/// | family | CDF | support |
/// |---|---|---|
/// | `Pareto` | `1 − x^{−α}` | `[1, ∞)` |
/// | `BoundedPower` | `1 − (ω − x)^α` | `[ω − 1, ω]` |
/// | `Exponential` | `1 − e^{−x}` | `[0, ∞)` |
/// | `ExpTailEquivalent` | `1 − e^{−x}` for `x ≥ s`, `0` below | `[s, ∞)` |
///
/// `ExpTailEquivalent` puts an atom of mass `1 − e^{−s}` at the shift `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalModel {
    Pareto { alpha: f64 },
    BoundedPower { alpha: f64, omega: f64 },
    Exponential,
    ExpTailEquivalent { shift: f64 },
}

/// Max-domain of attraction of a marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MdaClass {
    Frechet { alpha: f64 },
    Weibull { alpha: f64, omega: f64 },
    Gumbel,
}

impl MdaClass {
    pub fn is_gumbel(&self) -> bool {
        matches!(self, MdaClass::Gumbel)
    }
}

impl fmt::Display for MdaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MdaClass::Frechet { alpha } => write!(f, "Frechet(alpha={alpha})"),
            MdaClass::Weibull { alpha, omega } => {
                write!(f, "Weibull(alpha={alpha}, omega={omega})")
            }
            MdaClass::Gumbel => write!(f, "Gumbel"),
        }
    }
}

impl MarginalModel {
    pub fn pareto(alpha: f64) -> Result<Self> {
        Self::Pareto { alpha }.validated()
    }

    pub fn bounded_power(alpha: f64, omega: f64) -> Result<Self> {
        Self::BoundedPower { alpha, omega }.validated()
    }

    pub fn exp_tail_equivalent(shift: f64) -> Result<Self> {
        Self::ExpTailEquivalent { shift }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Pareto { alpha } | Self::BoundedPower { alpha, .. }
                if !(alpha > 0.0 && alpha.is_finite()) =>
            {
                Err(Error::domain(format!(
                    "alpha must be positive and finite, got {alpha}"
                )))
            }
            Self::BoundedPower { omega, .. } if !omega.is_finite() => {
                Err(Error::domain(format!("omega must be finite, got {omega}")))
            }
            Self::ExpTailEquivalent { shift } if !(shift >= 0.0 && shift.is_finite()) => {
                Err(Error::domain(format!(
                    "shift must be non-negative and finite, got {shift}"
                )))
            }
            ok => Ok(ok),
        }
    }

    /// Lower and upper support endpoints.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Pareto { .. } => (1.0, f64::INFINITY),
            Self::BoundedPower { omega, .. } => (omega - 1.0, omega),
            Self::Exponential => (0.0, f64::INFINITY),
            Self::ExpTailEquivalent { shift } => (shift, f64::INFINITY),
        }
    }

    pub fn upper_endpoint(&self) -> f64 {
        self.support().1
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(*self, Self::ExpTailEquivalent { shift } if shift > 0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Pareto { alpha } => {
                if x <= 1.0 {
                    0.0
                } else {
                    -(-alpha * x.ln()).exp_m1()
                }
            }
            Self::BoundedPower { alpha, omega } => {
                if x <= omega - 1.0 {
                    0.0
                } else if x >= omega {
                    1.0
                } else {
                    1.0 - (omega - x).powf(alpha)
                }
            }
            Self::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            Self::ExpTailEquivalent { shift } => {
                if x < shift {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }

    /// Survival function `1 − F(x)`, evaluated without cancellation in the tail.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            Self::Pareto { alpha } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-alpha)
                }
            }
            Self::BoundedPower { .. } => 1.0 - self.cdf(x),
            Self::Exponential => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x).exp()
                }
            }
            Self::ExpTailEquivalent { shift } => {
                if x < shift {
                    1.0
                } else {
                    (-x).exp()
                }
            }
        }
    }

    /// `ln(1 − F(x))`; `−∞` at and beyond the upper endpoint.
    pub fn log_survival(&self, x: f64) -> f64 {
        match *self {
            Self::Pareto { alpha } => -alpha * x.max(1.0).ln(),
            Self::BoundedPower { alpha, omega } => {
                if x <= omega - 1.0 {
                    0.0
                } else if x >= omega {
                    f64::NEG_INFINITY
                } else {
                    alpha * (omega - x).ln()
                }
            }
            Self::Exponential => -x.max(0.0),
            Self::ExpTailEquivalent { shift } => {
                if x < shift {
                    0.0
                } else {
                    -x
                }
            }
        }
    }

    /// Generalized inverse `inf{x : F(x) > u}` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match *self {
            Self::Pareto { alpha } => (-(-u).ln_1p() / alpha).exp(),
            Self::BoundedPower { alpha, omega } => omega - (1.0 - u).powf(1.0 / alpha),
            Self::Exponential => -(-u).ln_1p(),
            Self::ExpTailEquivalent { shift } => (-(-u).ln_1p()).max(shift),
        }
    }

    /// `F⁻(1 − s)` from the exceedance probability `s`, accurate deep in the tail.
    pub fn tail_quantile(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!(
                "exceedance probability must lie in (0, 1), got {s}"
            )));
        }
        Ok(self.tail_quantile_unchecked(s))
    }

    #[inline]
    pub(crate) fn tail_quantile_unchecked(&self, s: f64) -> f64 {
        match *self {
            Self::Pareto { alpha } => (-s.ln() / alpha).exp(),
            Self::BoundedPower { alpha, omega } => omega - s.powf(1.0 / alpha),
            Self::Exponential => -s.ln(),
            Self::ExpTailEquivalent { shift } => (-s.ln()).max(shift),
        }
    }

    /// `F⁻(1 − 1/t)` written directly in terms of the return period `t > 1`,
    /// so that e.g. the exponential case returns `ln t` to the last bit.
    pub fn return_level(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t <= 1.0 {
            return Err(Error::domain(format!(
                "return period must exceed 1, got {t}"
            )));
        }
        Ok(match *self {
            Self::Pareto { alpha } => t.powf(1.0 / alpha),
            Self::BoundedPower { alpha, omega } => omega - t.powf(-1.0 / alpha),
            Self::Exponential => t.ln(),
            Self::ExpTailEquivalent { shift } => t.ln().max(shift),
        })
    }

    pub fn classify_mda(&self) -> MdaClass {
        match *self {
            Self::Pareto { alpha } => MdaClass::Frechet { alpha },
            Self::BoundedPower { alpha, omega } => MdaClass::Weibull { alpha, omega },
            Self::Exponential | Self::ExpTailEquivalent { .. } => MdaClass::Gumbel,
        }
    }

    /// Draws `n` claims by inverse transform.
    pub fn sample(&self, rng: &mut RandomStream, n: usize) -> Vec<f64> {
        // U and 1 − U share a law on the open 53-bit grid.
        (0..n)
            .map(|_| self.tail_quantile_unchecked(rng.uniform()))
            .collect()
    }

    /// Analytic mean, where finite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            Self::Pareto { alpha } => (alpha > 1.0).then(|| alpha / (alpha - 1.0)),
            Self::BoundedPower { alpha, omega } => Some(omega - alpha / (alpha + 1.0)),
            Self::Exponential => Some(1.0),
            Self::ExpTailEquivalent { shift } => {
                Some(shift * -(-shift).exp_m1() + (1.0 + shift) * (-shift).exp())
            }
        }
    }
}

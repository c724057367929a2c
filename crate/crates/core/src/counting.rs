//! Claim-count processes `N(t)` with `N(t)/t → Z`, independent of the claim sizes.

use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Means below this are sampled by sequential CDF inversion.
pub const POISSON_INVERSION_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountingModel {
    /// `N(t) = ⌊λt⌋`.
    Deterministic {
        lambda: f64,
    },
    HomogeneousPoisson {
        lambda: f64,
    },
    /// Poisson process with a Gamma(shape, rate) distributed intensity `Z`.
    MixedPoisson {
        shape: f64,
        rate: f64,
    },
}

/// One realized count together with the limit variable it was drawn under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountDraw {
    pub count: u64,
    pub z: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl CountingModel {
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Deterministic { lambda } | Self::HomogeneousPoisson { lambda } => {
                positive("lambda", lambda)?
            }
            Self::MixedPoisson { shape, rate } => {
                positive("gamma shape", shape)?;
                positive("gamma rate", rate)?;
            }
        }
        Ok(self)
    }

    /// Realizes the limit variable `Z`.
    ///
    /// Degenerate models return `λ` without touching the stream; the mixed
    /// model consumes exactly the draws that [`CountingModel::draw`] consumes
    /// first, so a cloned stream yields the same `Z` in both.
    pub fn sample_mixing_z(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            Self::Deterministic { lambda } | Self::HomogeneousPoisson { lambda } => lambda,
            Self::MixedPoisson { shape, rate } => rng.gamma(shape, rate),
        }
    }

    pub fn draw(&self, t: f64, rng: &mut RandomStream) -> Result<CountDraw> {
        check_horizon(t)?;
        let z = self.sample_mixing_z(rng);
        let count = match *self {
            Self::Deterministic { lambda } => (lambda * t).floor() as u64,
            Self::HomogeneousPoisson { .. } | Self::MixedPoisson { .. } => {
                sample_poisson(z * t, rng)
            }
        };
        Ok(CountDraw { count, z })
    }

    pub fn sample_count(&self, t: f64, rng: &mut RandomStream) -> Result<u64> {
        Ok(self.draw(t, rng)?.count)
    }

    /// Counts along one path at ascending horizons, built from independent
    /// increments under a single realized `Z`.
    pub fn sample_path(&self, horizons: &[f64], rng: &mut RandomStream) -> Result<(f64, Vec<u64>)> {
        let z = self.sample_mixing_z(rng);
        let mut counts = Vec::with_capacity(horizons.len());
        let mut prev_t = 0.0;
        let mut acc = 0u64;
        for &t in horizons {
            check_horizon(t)?;
            if t < prev_t {
                return Err(Error::domain("path horizons must be ascending"));
            }
            acc = match *self {
                Self::Deterministic { lambda } => (lambda * t).floor() as u64,
                _ => acc + sample_poisson(z * (t - prev_t), rng),
            };
            counts.push(acc);
            prev_t = t;
        }
        Ok((z, counts))
    }

    pub fn mean_z(&self) -> f64 {
        match *self {
            Self::Deterministic { lambda } | Self::HomogeneousPoisson { lambda } => lambda,
            Self::MixedPoisson { shape, rate } => shape / rate,
        }
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "horizon must be positive and finite, got {t}"
        )))
    }
}

/// Poisson draw with the given mean.
///
/// Means below [`POISSON_INVERSION_LIMIT`] use sequential inversion of one
/// uniform, which is bit-reproducible across platforms. Larger means use the
/// `rand_distr` sampler (Ahrens–Dieter normal-approximation rejection),
/// reproducible per stream.
pub fn sample_poisson(mean: f64, rng: &mut RandomStream) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < POISSON_INVERSION_LIMIT {
        let u = rng.uniform();
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        // Cap at a depth where the remaining mass is below 1e-30 for mean < 10.
        while u > cdf && k < 200 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    } else {
        Poisson::new(mean)
            .expect("finite positive mean")
            .sample(rng.inner()) as u64
    }
}

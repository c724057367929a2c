//! Upper order statistics and linear largest-claims treaties.

use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Sum of the `p` largest claims.
    Lcr(usize),
    /// Excess of the `p − 1` largest claims over the `p`-th largest.
    Ecomor(usize),
}

/// Coefficients `k₁..k_p` applied to the descending order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TreatySpec {
    coeffs: Vec<f64>,
    c: f64,
}

impl TreatySpec {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("treaty needs at least one coefficient"));
        }
        if coeffs.iter().any(|k| !k.is_finite()) {
            return Err(Error::domain("treaty coefficients must be finite"));
        }
        let mut sum = CompensatedSum::default();
        coeffs.iter().for_each(|&k| sum.add(k));
        Ok(Self {
            c: sum.value(),
            coeffs,
        })
    }

    pub fn lcr(p: usize) -> Result<Self> {
        Self::preset(Scheme::Lcr(p))
    }

    pub fn ecomor(p: usize) -> Result<Self> {
        Self::preset(Scheme::Ecomor(p))
    }

    pub fn preset(scheme: Scheme) -> Result<Self> {
        match scheme {
            Scheme::Lcr(p) if p >= 1 => Self::new(vec![1.0; p]),
            Scheme::Ecomor(p) if p >= 2 => {
                let mut coeffs = vec![1.0; p];
                coeffs[p - 1] = -((p - 1) as f64);
                Self::new(coeffs)
            }
            Scheme::Lcr(p) => Err(Error::domain(format!(
                "LCR depth must be at least 1, got {p}"
            ))),
            Scheme::Ecomor(p) => Err(Error::domain(format!(
                "ECOMOR depth must be at least 2, got {p}"
            ))),
        }
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c = Σ k_j`.
    pub fn total(&self) -> f64 {
        self.c
    }

    /// Running averages `k̄_l = (k₁ + … + k_l) / l`.
    pub fn running_means(&self) -> Vec<f64> {
        let mut sum = CompensatedSum::default();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                sum.add(k);
                sum.value() / (i + 1) as f64
            })
            .collect()
    }
}

/// The `m` largest values of a sample, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStats {
    values: Vec<f64>,
    n: usize,
}

impl OrderStats {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn shifted(&self, d: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + d).collect(),
            n: self.n,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            n: self.n,
        }
    }
}

pub fn top_order_statistics(sample: &[f64], m: usize) -> Result<OrderStats> {
    let mut scratch = sample.to_vec();
    top_order_statistics_in_place(&mut scratch, m)
}

/// Shallow depths keep a sorted window in one pass; deeper ones use selection.
const SCAN_DEPTH: usize = 16;

/// Like [`top_order_statistics`] but may reorder `sample` instead of copying it.
///
/// Depths up to 16 use one scan with a sorted window of the current leaders;
/// deeper requests run a linear-time selection for the `m`-th largest followed
/// by a sort of the `m` survivors.
pub fn top_order_statistics_in_place(sample: &mut [f64], m: usize) -> Result<OrderStats> {
    let n = sample.len();
    if m == 0 {
        return Err(Error::domain("order depth must be at least 1"));
    }
    if m > n {
        return Err(Error::InsufficientSample {
            needed: m,
            available: n,
        });
    }
    let descending = |a: &f64, b: &f64| b.total_cmp(a);
    if m <= SCAN_DEPTH {
        let mut values = sample[..m].to_vec();
        values.sort_unstable_by(descending);
        for &x in &sample[m..] {
            if x.total_cmp(&values[m - 1]).is_gt() {
                let pos = values.partition_point(|v| v.total_cmp(&x).is_ge());
                values.pop();
                values.insert(pos, x);
            }
        }
        return Ok(OrderStats { values, n });
    }
    if m < n {
        sample.select_nth_unstable_by(m - 1, descending);
    }
    let mut values = sample[..m].to_vec();
    values.sort_unstable_by(descending);
    Ok(OrderStats { values, n })
}

/// `Σ_j k_j · x₍ⱼ₎` over the descending order statistics.
pub fn treaty_value(stats: &OrderStats, spec: &TreatySpec) -> Result<f64> {
    if stats.values.len() < spec.depth() {
        return Err(Error::InsufficientSample {
            needed: spec.depth(),
            available: stats.values.len(),
        });
    }
    Ok(spec
        .coeffs
        .iter()
        .zip(&stats.values)
        .map(|(k, x)| k * x)
        .sum())
}

/// `(s − b·c) / a`.
pub fn normalize_treaty(s: f64, a: f64, b: f64, c: f64) -> f64 {
    (s - b * c) / a
}

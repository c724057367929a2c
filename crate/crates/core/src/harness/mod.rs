//! Convergence experiments: finite-horizon treaty replicates against limit draws.
//!
//! Every replicate owns its random streams. They are derived from
//! `(seed, horizon index, replicate index)` with distinct tags for the counting
//! and the claims draws, and limit draw `i` uses `(seed, 0, i)` under the limit
//! tag. Work items are independent and results are collected in index order,
//! so output never depends on the number of worker threads.

pub mod config;
pub mod report;

use rayon::prelude::*;

pub use config::{parse_config, ExperimentConfig};
pub use report::{
    format_rows, format_summary, parse_rows, read_rows, summary_path, write_csv, HorizonSummary,
    LimitSummary, ReportRow, RowHorizon, Summary,
};

use crate::error::{Error, Result};
use crate::limitlaws::{sample_treaty_limit_given_z, Prop3Sampler, TreatyLimitSpec};
use crate::norming::NormingConstants;
use crate::rng::{RandomStream, StreamTag};
use crate::stats::{ks_two_sample, pearson_corr, sample_moments, EmpiricalSample};
use crate::treaties::{normalize_treaty, top_order_statistics_in_place, treaty_value};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::validation("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn limit_spec(cfg: &ExperimentConfig) -> TreatyLimitSpec {
    TreatyLimitSpec::for_model(
        &cfg.claims,
        cfg.counting,
        cfg.treaty1.clone(),
        cfg.treaty2.clone(),
    )
}

/// One finite-horizon row per `(horizon, replicate)`, in that order.
pub fn simulate(cfg: &ExperimentConfig) -> Vec<ReportRow> {
    cfg.horizons
        .iter()
        .enumerate()
        .flat_map(|(h, &t)| {
            let norming = NormingConstants::for_model(&cfg.claims, t);
            (0..cfg.replicates as u64)
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new()),
                    |(xs, ys), r| replicate_row(cfg, h as u64, t, norming.as_ref().ok(), r, xs, ys),
                )
                .collect::<Vec<_>>()
        })
        .collect()
}

fn replicate_row(
    cfg: &ExperimentConfig,
    h: u64,
    t: f64,
    norming: Option<&NormingConstants>,
    r: u64,
    xs: &mut Vec<f64>,
    ys: &mut Vec<f64>,
) -> ReportRow {
    let mut row = ReportRow {
        t: RowHorizon::Finite(t),
        replicate: r,
        n: None,
        z: None,
        s1: None,
        s2: None,
        s1_norm: None,
        s2_norm: None,
        censored: true,
    };
    let mut counting_rng = RandomStream::derive(cfg.seed, StreamTag::Counting, h, r);
    let Ok(draw) = cfg.counting.draw(t, &mut counting_rng) else {
        return row;
    };
    row.n = Some(draw.count);
    row.z = Some(draw.z);
    let n = draw.count as usize;
    if n < cfg.depth() {
        return row;
    }
    let mut claims_rng = RandomStream::derive(cfg.seed, StreamTag::Claims, h, r);
    cfg.claims.sample_into(&mut claims_rng, n, xs, ys);
    let values = top_order_statistics_in_place(xs, cfg.treaty1.depth())
        .and_then(|top| treaty_value(&top, &cfg.treaty1))
        .and_then(|s1| {
            let s2 = top_order_statistics_in_place(ys, cfg.treaty2.depth())
                .and_then(|top| treaty_value(&top, &cfg.treaty2))?;
            Ok((s1, s2))
        });
    if let (Ok((s1, s2)), Some(nc)) = (values, norming) {
        row.s1 = Some(s1);
        row.s2 = Some(s2);
        row.s1_norm = Some(normalize_treaty(s1, nc.x.a, nc.x.b, cfg.treaty1.total()));
        row.s2_norm = Some(normalize_treaty(s2, nc.y.a, nc.y.b, cfg.treaty2.total()));
        row.censored = false;
    }
    row
}

/// `draws` samples of the limit pair.
///
/// Gumbel/Gumbel marginals use the truncated series with `cfg.truncation`
/// terms; other combinations transform the reference extremal variate.
pub fn limit_draws(cfg: &ExperimentConfig, draws: usize) -> Result<Vec<ReportRow>> {
    let spec = limit_spec(cfg);
    let series = if spec.both_gumbel() {
        Some(Prop3Sampler::new(&spec, cfg.truncation)?)
    } else {
        None
    };
    (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomStream::derive(cfg.seed, StreamTag::Limit, 0, i);
            let z = spec.mixing.sample_mixing_z(&mut rng);
            let (a, b) = match &series {
                Some(s) => s.sample_given_z(z, &mut rng),
                None => sample_treaty_limit_given_z(&spec, z, &mut rng)?,
            };
            Ok(ReportRow {
                t: RowHorizon::Limit,
                replicate: i,
                n: None,
                z: Some(z),
                s1: None,
                s2: None,
                s1_norm: Some(a),
                s2_norm: Some(b),
                censored: false,
            })
        })
        .collect()
}

fn normalized(rows: &[ReportRow]) -> (Vec<f64>, Vec<f64>) {
    rows.iter()
        .filter(|r| !r.censored)
        .filter_map(|r| Some((r.s1_norm?, r.s2_norm?)))
        .unzip()
}

fn sorted(values: &[f64]) -> Option<EmpiricalSample> {
    EmpiricalSample::new(values.to_vec())
        .ok()
        .filter(|s| !s.is_empty())
}

/// Finite-horizon rows, limit rows and the per-horizon comparison.
///
/// A limit law that cannot be sampled (non-product `H`) leaves the KS columns
/// empty and records the reason in [`LimitSummary::unavailable`].
pub fn run_convergence_experiment(cfg: &ExperimentConfig) -> ConvergenceReport {
    let mut rows = simulate(cfg);
    let (limit_rows, unavailable) = match limit_draws(cfg, cfg.limit_draws) {
        Ok(rows) => (rows, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let (l1, l2) = normalized(&limit_rows);
    let (ref1, ref2) = (sorted(&l1), sorted(&l2));

    let horizons = cfg
        .horizons
        .iter()
        .enumerate()
        .map(|(h, &t)| {
            let block = &rows[h * cfg.replicates..(h + 1) * cfg.replicates];
            let censored = block.iter().filter(|r| r.censored).count();
            let (s1, s2) = normalized(block);
            let ks = |s: &[f64], reference: &Option<EmpiricalSample>| {
                let (a, b) = (sorted(s)?, reference.as_ref()?);
                ks_two_sample(&a, b).ok()
            };
            HorizonSummary {
                t,
                replicates: cfg.replicates,
                censored,
                ks1: ks(&s1, &ref1),
                ks2: ks(&s2, &ref2),
                moments1: sample_moments(&s1).ok(),
                moments2: sample_moments(&s2).ok(),
                corr: pearson_corr(&s1, &s2).ok(),
            }
        })
        .collect();
    let limit = LimitSummary {
        draws: limit_rows.len(),
        moments1: sample_moments(&l1).ok(),
        moments2: sample_moments(&l2).ok(),
        corr: pearson_corr(&l1, &l2).ok(),
        unavailable,
    };
    rows.extend(limit_rows);
    ConvergenceReport {
        rows,
        summary: Summary { horizons, limit },
    }
}

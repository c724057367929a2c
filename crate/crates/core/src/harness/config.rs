//! Flat dotted-key experiment configuration.
//!
//! ```toml
//! seed = 7
//! horizons = [100, 1000]
//! replicates = 1000
//! claims.x.family = "exponential"
//! claims.y.family = "pareto"
//! claims.y.alpha = 2.0
//! counting.kind = "poisson"
//! counting.lambda = 1.0
//! treaty1.scheme = "ecomor"
//! treaty1.p = 3
//! treaty2.coeffs = [1.0, 0.5]
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use toml::Value;

use crate::counting::CountingModel;
use crate::dependence::{BivariateClaimModel, DependenceModel};
use crate::error::{Error, Result};
use crate::limitlaws::DEFAULT_TRUNCATION;
use crate::marginals::MarginalModel;
use crate::treaties::{Scheme, TreatySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub claims: BivariateClaimModel,
    pub counting: CountingModel,
    pub treaty1: TreatySpec,
    pub treaty2: TreatySpec,
    pub horizons: Vec<f64>,
    pub replicates: usize,
    pub limit_draws: usize,
    pub seed: u64,
    pub truncation: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Deepest order statistic either treaty needs.
    pub fn depth(&self) -> usize {
        self.treaty1.depth().max(self.treaty2.depth())
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(Error::validation(
                "horizons",
                "at least one horizon is required",
            ));
        }
        if let Some(t) = self.horizons.iter().find(|t| !(t.is_finite() && **t > 1.0)) {
            return Err(Error::validation(
                "horizons",
                format!("horizons must be finite and exceed 1, got {t}"),
            ));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                "horizons",
                "horizons must be strictly ascending",
            ));
        }
        if self.replicates == 0 {
            return Err(Error::validation("replicates", "must be at least 1"));
        }
        if self.truncation < self.depth() {
            return Err(Error::validation(
                "truncation",
                format!("must be at least the treaty depth {}", self.depth()),
            ));
        }
        Ok(())
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut keys = Keys::default();
    flatten("", &table, &mut keys.values);
    let cfg = keys.build()?;
    keys.reject_unknown()?;
    cfg.validate()?;
    Ok(cfg)
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

#[derive(Default)]
struct Keys {
    values: BTreeMap<String, Value>,
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => Err(Error::validation(
                key,
                format!("expected a number, got {}", other.type_str()),
            )),
        }
    }

    fn required_float(&mut self, key: &str) -> Result<f64> {
        self.float(key)?
            .ok_or_else(|| Error::validation(key, "missing required key"))
    }

    fn uint(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(Value::Integer(i)) => Err(Error::validation(
                key,
                format!("must be non-negative, got {i}"),
            )),
            Some(other) => Err(Error::validation(
                key,
                format!("expected an integer, got {}", other.type_str()),
            )),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(Error::validation(
                key,
                format!("expected a string, got {}", other.type_str()),
            )),
        }
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    other => Err(Error::validation(
                        key,
                        format!("expected numbers, found {}", other.type_str()),
                    )),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(other) => Err(Error::validation(
                key,
                format!("expected an array, got {}", other.type_str()),
            )),
        }
    }

    fn marginal(&mut self, prefix: &str) -> Result<MarginalModel> {
        let family_key = format!("{prefix}.family");
        let family = self
            .string(&family_key)?
            .ok_or_else(|| Error::validation(&family_key, "missing required key"))?;
        let model = match family.as_str() {
            "exponential" => MarginalModel::Exponential,
            "pareto" => MarginalModel::Pareto {
                alpha: self.required_float(&format!("{prefix}.alpha"))?,
            },
            "bounded_power" => MarginalModel::BoundedPower {
                alpha: self.required_float(&format!("{prefix}.alpha"))?,
                omega: self.required_float(&format!("{prefix}.omega"))?,
            },
            "exp_tail" => MarginalModel::ExpTailEquivalent {
                shift: self.required_float(&format!("{prefix}.shift"))?,
            },
            other => {
                return Err(Error::validation(
                    family_key,
                    format!("unknown family `{other}` (expected exponential, pareto, bounded_power or exp_tail)"),
                ))
            }
        };
        model
            .validated()
            .map_err(|e| Error::validation(prefix, e.to_string()))
    }

    fn dependence(&mut self) -> Result<DependenceModel> {
        let kind = self
            .string("dependence.kind")?
            .unwrap_or_else(|| "independence".into());
        let model = match kind.as_str() {
            "independence" => DependenceModel::Independence,
            "gumbel_hougaard" => DependenceModel::GumbelHougaard {
                theta: self.required_float("dependence.theta")?,
            },
            "gaussian" => DependenceModel::Gaussian {
                rho: self.required_float("dependence.rho")?,
            },
            other => {
                return Err(Error::validation(
                    "dependence.kind",
                    format!(
                    "unknown kind `{other}` (expected independence, gumbel_hougaard or gaussian)"
                ),
                ))
            }
        };
        model
            .validated()
            .map_err(|e| Error::validation("dependence", e.to_string()))
    }

    fn counting(&mut self) -> Result<CountingModel> {
        let kind = self
            .string("counting.kind")?
            .ok_or_else(|| Error::validation("counting.kind", "missing required key"))?;
        let model = match kind.as_str() {
            "deterministic" => CountingModel::Deterministic {
                lambda: self.required_float("counting.lambda")?,
            },
            "poisson" => CountingModel::HomogeneousPoisson {
                lambda: self.required_float("counting.lambda")?,
            },
            "mixed_poisson" => CountingModel::MixedPoisson {
                shape: self.required_float("counting.gamma_shape")?,
                rate: self.required_float("counting.gamma_rate")?,
            },
            other => {
                return Err(Error::validation(
                    "counting.kind",
                    format!(
                        "unknown kind `{other}` (expected deterministic, poisson or mixed_poisson)"
                    ),
                ))
            }
        };
        model
            .validated()
            .map_err(|e| Error::validation("counting", e.to_string()))
    }

    fn treaty(&mut self, prefix: &str) -> Result<TreatySpec> {
        let scheme_key = format!("{prefix}.scheme");
        let depth_key = format!("{prefix}.p");
        let coeffs_key = format!("{prefix}.coeffs");
        let scheme = self.string(&scheme_key)?;
        let depth = self.uint(&depth_key)?;
        let coeffs = self.floats(&coeffs_key)?;
        let spec = match (scheme, coeffs) {
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    prefix,
                    "give exactly one of `scheme` and `coeffs`, not both",
                ))
            }
            (None, None) => {
                return Err(Error::validation(
                    prefix,
                    "one of `scheme` or `coeffs` is required",
                ))
            }
            (None, Some(coeffs)) => {
                if depth.is_some() {
                    return Err(Error::validation(
                        depth_key,
                        "`p` only applies to a named scheme",
                    ));
                }
                TreatySpec::new(coeffs)
            }
            (Some(name), None) => {
                let p = depth
                    .ok_or_else(|| Error::validation(&depth_key, "missing required key"))?
                    as usize;
                let scheme = match name.as_str() {
                    "lcr" => Scheme::Lcr(p),
                    "ecomor" => Scheme::Ecomor(p),
                    other => {
                        return Err(Error::validation(
                            scheme_key,
                            format!("unknown scheme `{other}` (expected lcr or ecomor)"),
                        ))
                    }
                };
                TreatySpec::preset(scheme)
            }
        };
        spec.map_err(|e| Error::validation(prefix, e.to_string()))
    }

    fn build(&mut self) -> Result<ExperimentConfig> {
        let claims = BivariateClaimModel::new(
            self.marginal("claims.x")?,
            self.marginal("claims.y")?,
            self.dependence()?,
        );
        let counting = self.counting()?;
        let treaty1 = self.treaty("treaty1")?;
        let treaty2 = self.treaty("treaty2")?;
        let horizons = self
            .floats("horizons")?
            .ok_or_else(|| Error::validation("horizons", "missing required key"))?;
        let replicates = self
            .uint("replicates")?
            .ok_or_else(|| Error::validation("replicates", "missing required key"))?
            as usize;
        let limit_draws = self.uint("limit_draws")?.map_or(replicates, |n| n as usize);
        let seed = self.uint("seed")?.unwrap_or(0);
        let truncation = self
            .uint("truncation")?
            .map_or(DEFAULT_TRUNCATION, |n| n as usize);
        let output = self.string("output")?.map(PathBuf::from);
        Ok(ExperimentConfig {
            claims,
            counting,
            treaty1,
            treaty2,
            horizons,
            replicates,
            limit_draws,
            seed,
            truncation,
            output,
        })
    }

    fn reject_unknown(&self) -> Result<()> {
        match self.values.keys().next() {
            Some(key) => Err(Error::validation(key.clone(), "unknown key")),
            None => Ok(()),
        }
    }
}

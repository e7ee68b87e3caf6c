//! Simulation experiments: power, bias under contamination, and false
//! rejection under contamination.
//!
//! Every replication derives its seeds from the master seed and its indices
//! only, so results are identical for any number of worker threads. Clean
//! samples depend on `(setting, replication)` alone and contamination on
//! `(setting, replication)` as well, so all sweep points and methods see the
//! same underlying data (common random numbers).

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::inference::{permutation_independence_test, MethodSpec};
use crate::rng::{derive_seed, domain};
use crate::transforms::{TransformKind, TransformSpec};

use super::contamination::{contaminate, ContaminationSpec};
use super::settings::{generate_setting, SettingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Rejection rate of the permutation test on (possibly contaminated) data.
    Power,
    /// Mean consistency-corrected dCor on contaminated data.
    Bias,
    /// Rejection rate under independence with contamination.
    Rejection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Contamination fraction ε.
    Epsilon,
    /// Contamination location `x`, placed at `(x, direction · x)`.
    Location,
    /// Sample size.
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "one")]
    pub direction: f64,
}

fn one() -> f64 {
    1.0
}

fn default_methods() -> Vec<String> {
    MethodSpec::standard_four()
        .iter()
        .map(|m| m.name().to_string())
        .collect()
}

fn default_level() -> f64 {
    0.1
}

fn default_c() -> f64 {
    crate::transforms::DEFAULT_BILOOP_C
}

/// A complete experiment description, typically read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub settings: Vec<SettingSpec>,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_c")]
    pub biloop_c: f64,
    #[serde(default)]
    pub contamination: Option<ContaminationSpec>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    /// Permutation count; defaults to `⌊200 + 5000/n⌋`.
    #[serde(default)]
    pub b: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate().map_err(|e| match e {
            Error::InvalidParameter(m) | Error::Unsupported(m) => Error::Config(m),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(invalid(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        if self.settings.is_empty() {
            return Err(invalid("at least one setting is required"));
        }
        for s in &self.settings {
            s.validate()?;
        }
        if let Some(c) = &self.contamination {
            c.validate()?;
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(invalid("sweep needs at least one value"));
            }
            if sw.parameter != SweepParameter::N && self.contamination.is_none() {
                return Err(invalid(
                    "an epsilon or location sweep needs a [contamination] section",
                ));
            }
        }
        if self.b == Some(0) {
            return Err(invalid("permutation count must be at least 1"));
        }
        self.method_specs().map(|_| ())
    }

    /// Resolve method names with the configured `alpha` and biloop `c`.
    pub fn method_specs(&self) -> Result<Vec<MethodSpec>> {
        if self.methods.is_empty() {
            return Err(invalid("at least one method is required"));
        }
        self.methods
            .iter()
            .map(|name| {
                let mut m: MethodSpec = name.parse()?;
                m.alpha = self.alpha;
                if m.transform.kind == TransformKind::Biloop {
                    m.transform = TransformSpec::biloop(self.biloop_c)?;
                }
                m.validate()?;
                Ok(m)
            })
            .collect()
    }

    /// `(sweep value, setting, contamination)` for each sweep point.
    fn points(
        &self,
        setting: &SettingSpec,
    ) -> Vec<(Option<f64>, SettingSpec, Option<ContaminationSpec>)> {
        match &self.sweep {
            None => vec![(None, setting.clone(), self.contamination)],
            Some(sw) => sw
                .values
                .iter()
                .map(|&v| {
                    let mut s = setting.clone();
                    let mut c = self.contamination;
                    match sw.parameter {
                        SweepParameter::N => s.n = v as usize,
                        SweepParameter::Epsilon => {
                            if let Some(c) = c.as_mut() {
                                c.epsilon = v;
                            }
                        }
                        SweepParameter::Location => {
                            if let Some(c) = c.as_mut() {
                                c.kind = c.kind.at_location(v, sw.direction);
                            }
                        }
                    }
                    (Some(v), s, c)
                })
                .collect(),
        }
    }
}

/// One table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub setting: String,
    pub method: String,
    pub sweep: Option<f64>,
    /// Rejection rate (power, rejection) or mean corrected dCor (bias).
    pub rate_or_mean: f64,
    pub stderr: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub rows: Vec<ResultRow>,
    /// Wall-clock seconds; not part of the CSV output.
    pub elapsed_secs: f64,
}

impl ExperimentResult {
    /// Look up a row by setting label, method name and sweep value.
    pub fn get(&self, setting: &str, method: &str, sweep: Option<f64>) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.setting == setting && r.method == method && r.sweep == sweep)
    }

    /// CSV with header `setting,method,sweep,rate_or_mean,stderr,reps`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| invalid(format!("writing CSV: {e}"));
        w.write_record([
            "setting",
            "method",
            "sweep",
            "rate_or_mean",
            "stderr",
            "reps",
        ])
        .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.setting.clone(),
                r.method.clone(),
                r.sweep.map(|v| v.to_string()).unwrap_or_default(),
                r.rate_or_mean.to_string(),
                r.stderr.to_string(),
                r.reps.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| invalid(format!("writing CSV: {e}")))?;
        Ok(())
    }
}

/// Clean and contaminated samples of replication `rep` of setting `si`.
fn replication_data(
    cfg: &ExperimentConfig,
    si: usize,
    rep: usize,
    setting: &SettingSpec,
    contamination: Option<&ContaminationSpec>,
) -> Result<((DataMatrix, DataMatrix), (DataMatrix, DataMatrix))> {
    let clean_seed = derive_seed(cfg.master_seed, &[domain::SETTING, si as u64, rep as u64]);
    let clean = generate_setting(setting, clean_seed)?;
    let dirty = match contamination {
        Some(c) => {
            let seed = derive_seed(
                cfg.master_seed,
                &[domain::CONTAMINATION, si as u64, rep as u64],
            );
            contaminate(&clean.0, &clean.1, c, seed)?
        }
        None => clean.clone(),
    };
    Ok((clean, dirty))
}

fn binomial_row(
    setting: String,
    method: &MethodSpec,
    sweep: Option<f64>,
    hits: &[bool],
) -> ResultRow {
    let reps = hits.len();
    let p = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
    ResultRow {
        setting,
        method: method.name().to_string(),
        sweep,
        rate_or_mean: p,
        stderr: (p * (1.0 - p) / reps as f64).sqrt(),
        reps,
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = crate::summation::mean(v);
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

/// Rejection rates of the permutation tests (power and rejection kinds).
fn run_rates(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let methods = cfg.method_specs()?;
    let mut rows = Vec::new();
    for (si, base) in cfg.settings.iter().enumerate() {
        for (pi, (sweep, setting, contamination)) in cfg.points(base).into_iter().enumerate() {
            let per_rep: Vec<Vec<bool>> = (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    let (_, (x, y)) =
                        replication_data(cfg, si, rep, &setting, contamination.as_ref())?;
                    let seed = derive_seed(
                        cfg.master_seed,
                        &[domain::TEST, si as u64, pi as u64, rep as u64],
                    );
                    methods
                        .iter()
                        .map(|m| {
                            Ok(
                                permutation_independence_test(&x, &y, m, cfg.b, cfg.level, seed)?
                                    .reject,
                            )
                        })
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<_>>()?;
            for (mi, m) in methods.iter().enumerate() {
                let hits: Vec<bool> = per_rep.iter().map(|r| r[mi]).collect();
                rows.push(binomial_row(base.setting.label(), m, sweep, &hits));
            }
        }
    }
    Ok(rows)
}

/// Mean of `c_ψ · dCor(ψ(x), ψ(y))` on contaminated data, where
/// `c_ψ = mean dCor(x, y) / mean dCor(ψ(x), ψ(y))` over the clean samples of
/// the same replications.
fn run_bias(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let methods = cfg.method_specs()?;
    let classical = MethodSpec::classical().with_alpha(cfg.alpha);
    let mut rows = Vec::new();
    for (si, base) in cfg.settings.iter().enumerate() {
        for (sweep, setting, contamination) in cfg.points(base) {
            // per replication: (classical clean, [method clean], [method dirty])
            let per_rep: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    let ((cx, cy), (x, y)) =
                        replication_data(cfg, si, rep, &setting, contamination.as_ref())?;
                    let reference = classical.statistic(&cx, &cy)?.value;
                    let mut clean = Vec::with_capacity(methods.len());
                    let mut dirty = Vec::with_capacity(methods.len());
                    for m in &methods {
                        clean.push(m.statistic(&cx, &cy)?.value);
                        dirty.push(m.statistic(&x, &y)?.value);
                    }
                    Ok((reference, clean, dirty))
                })
                .collect::<Result<_>>()?;
            let reference: Vec<f64> = per_rep.iter().map(|r| r.0).collect();
            let (ref_mean, _) = mean_sd(&reference);
            for (mi, m) in methods.iter().enumerate() {
                let clean: Vec<f64> = per_rep.iter().map(|r| r.1[mi]).collect();
                let dirty: Vec<f64> = per_rep.iter().map(|r| r.2[mi]).collect();
                let (clean_mean, _) = mean_sd(&clean);
                let factor = if clean_mean > 0.0 {
                    ref_mean / clean_mean
                } else {
                    1.0
                };
                let (mean, sd) = mean_sd(&dirty);
                rows.push(ResultRow {
                    setting: base.setting.label(),
                    method: m.name().to_string(),
                    sweep,
                    rate_or_mean: factor * mean,
                    stderr: factor * sd / (dirty.len() as f64).sqrt(),
                    reps: dirty.len(),
                });
            }
        }
    }
    Ok(rows)
}

/// Run any experiment kind.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let rows = match cfg.kind {
        ExperimentKind::Power | ExperimentKind::Rejection => run_rates(cfg)?,
        ExperimentKind::Bias => run_bias(cfg)?,
    };
    Ok(ExperimentResult {
        kind: cfg.kind,
        master_seed: cfg.master_seed,
        rows,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Rejection rates per (setting, method, sweep point).
pub fn run_power_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut c = cfg.clone();
    c.kind = ExperimentKind::Power;
    run_experiment(&c)
}

/// Mean corrected dependence per (setting, method, sweep point).
pub fn run_bias_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut c = cfg.clone();
    c.kind = ExperimentKind::Bias;
    run_experiment(&c)
}

/// False-rejection rates per (setting, method, sweep point).
pub fn run_rejection_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut c = cfg.clone();
    c.kind = ExperimentKind::Rejection;
    run_experiment(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"
kind = "rejection"
replications = 4
level = 0.1
b = 19
master_seed = 5
methods = ["classical", "biloop"]

[[settings]]
name = "bivariate_normal"
rho = 0.0
n = 30

[contamination]
kind = "gaussian_cloud"
center = [6.0, 6.0]
sd = 0.5
epsilon = 0.05

[sweep]
parameter = "epsilon"
values = [0.0, 0.1]
"#;

    #[test]
    fn parses_config() {
        let cfg = ExperimentConfig::from_toml_str(CONFIG).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Rejection);
        assert_eq!(cfg.method_specs().unwrap().len(), 2);
        assert_eq!(cfg.sweep.as_ref().unwrap().direction, 1.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str(
            &CONFIG.replace("replications = 4", "replications = 0")
        )
        .is_err());
        assert!(
            ExperimentConfig::from_toml_str(&CONFIG.replace("\"biloop\"", "\"huber\"")).is_err()
        );
        assert!(
            ExperimentConfig::from_toml_str(&CONFIG.replace("level = 0.1", "level = 1.5")).is_err()
        );
    }

    #[test]
    fn runs_and_writes_csv() {
        let cfg = ExperimentConfig::from_toml_str(CONFIG).unwrap();
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.rows.len(), 4);
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("setting,method,sweep,rate_or_mean,stderr,reps\n"));
        assert_eq!(text.lines().count(), 5);
        assert_eq!(run_experiment(&cfg).unwrap().rows, res.rows);
    }

    #[test]
    fn bias_at_zero_contamination_agrees_across_methods() {
        let text = CONFIG.replace("kind = \"rejection\"", "kind = \"bias\"");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        let res = run_experiment(&cfg).unwrap();
        let a = res
            .get("bivariate_normal(rho=0)", "classical", Some(0.0))
            .unwrap();
        let b = res
            .get("bivariate_normal(rho=0)", "biloop", Some(0.0))
            .unwrap();
        assert!((a.rate_or_mean - b.rate_or_mean).abs() < 1e-12);
    }
}

//! Marginal transforms applied before computing distance correlation.
//!
//! Every transform acts column by column: rank and normal scores replace each
//! coordinate by a function of its within-column rank, and the biloop map
//! sends each robustly standardized coordinate to a point on one of two
//! ellipses, doubling the dimension.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};

/// Consistency constant of the MAD at the normal model.
pub const MAD_CONSTANT: f64 = 1.483;

/// Default biloop tuning constant.
pub const DEFAULT_BILOOP_C: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Identity,
    Rank,
    NormalScores,
    Biloop,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Identity,
        TransformKind::Rank,
        TransformKind::NormalScores,
        TransformKind::Biloop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Identity => "identity",
            TransformKind::Rank => "rank",
            TransformKind::NormalScores => "normal_scores",
            TransformKind::Biloop => "biloop",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "identity" | "classical" | "none" => Ok(TransformKind::Identity),
            "rank" | "ranks" => Ok(TransformKind::Rank),
            "normal_scores" | "normalscores" | "nscores" => Ok(TransformKind::NormalScores),
            "biloop" => Ok(TransformKind::Biloop),
            other => Err(invalid(format!("unknown transform '{other}'"))),
        }
    }
}

/// Which transform, and the biloop tuning constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub c: f64,
}

impl TransformSpec {
    pub fn new(kind: TransformKind) -> Self {
        Self {
            kind,
            c: DEFAULT_BILOOP_C,
        }
    }

    pub fn identity() -> Self {
        Self::new(TransformKind::Identity)
    }

    pub fn rank() -> Self {
        Self::new(TransformKind::Rank)
    }

    pub fn normal_scores() -> Self {
        Self::new(TransformKind::NormalScores)
    }

    pub fn biloop(c: f64) -> Result<Self> {
        let spec = Self {
            kind: TransformKind::Biloop,
            c,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.is_finite() && self.c > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!(
                "biloop c must be positive, got {}",
                self.c
            )))
        }
    }
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self::identity()
    }
}

/// What to do with a column whose MAD is zero under the biloop transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneratePolicy {
    #[default]
    Error,
    /// Map the column to zeros; downstream dCor is then flagged degenerate.
    PassThroughZeros,
}

/// Median of a slice (mean of the two central order statistics for even n).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let n = v.len();
    assert!(n > 0, "median of an empty slice");
    let mid = n / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// `1.483 · median |x − median(x)|`, returned with the median.
pub fn median_mad(values: &[f64]) -> (f64, f64) {
    let med = median(values);
    let dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    (med, MAD_CONSTANT * median(&dev))
}

/// Center at the median and scale by the MAD.
pub fn robust_standardize(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: x.len(),
        });
    }
    let (med, mad) = median_mad(x);
    if mad <= 0.0 || !mad.is_finite() {
        return Err(Error::DegenerateScale { median: med });
    }
    Ok(x.iter().map(|v| (v - med) / mad).collect())
}

/// A point on the biloop image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiloopPoint {
    pub u: f64,
    pub v: f64,
}

/// The biloop map `z ↦ (u(z), v(z))` with tuning constant `c`.
///
/// With `θ = 2π tanh(z/c)`, `u = c(1 + cos(θ + π))` for `z ≥ 0` and
/// `u = −c(1 + cos(θ − π))` for `z < 0`, and `v = sin θ`. Both branches of `u`
/// equal `±2c sin²(θ/2)`, which is the form evaluated here because it has no
/// cancellation near the origin.
#[inline]
pub fn biloop(z: f64, c: f64) -> BiloopPoint {
    let theta = 2.0 * PI * (z / c).tanh();
    let half = (0.5 * theta).sin();
    let mag = 2.0 * c * half * half;
    BiloopPoint {
        u: if z >= 0.0 { mag } else { -mag },
        v: theta.sin(),
    }
}

/// Within-column midranks `1..=n`.
pub fn midranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        // positions start..end share the average of ranks start+1..=end
        let avg = 0.5 * ((start + 1) + end) as f64;
        for &k in &idx[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Empirical CDF values `r_i / (n + 1)` with midranks.
pub fn rank_scores(x: &[f64]) -> Vec<f64> {
    let denom = (x.len() + 1) as f64;
    midranks(x).into_iter().map(|r| r / denom).collect()
}

/// `Φ⁻¹(r_i / (n + 1))`.
pub fn normal_scores(x: &[f64]) -> Vec<f64> {
    let std = standard_normal();
    rank_scores(x)
        .into_iter()
        .map(|p| std.inverse_cdf(p))
        .collect()
}

pub(crate) fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Apply a marginal transform, failing on a zero-MAD column under biloop.
pub fn apply_transform(x: &DataMatrix, spec: &TransformSpec) -> Result<DataMatrix> {
    apply_transform_with(x, spec, DegeneratePolicy::Error)
}

/// Apply a marginal transform column by column.
///
/// Biloop output has `2d` columns ordered `(u_1, v_1, u_2, v_2, ...)`.
pub fn apply_transform_with(
    x: &DataMatrix,
    spec: &TransformSpec,
    policy: DegeneratePolicy,
) -> Result<DataMatrix> {
    if x.n() < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: x.n(),
        });
    }
    let cols = x.columns();
    let out: Vec<Vec<f64>> = match spec.kind {
        TransformKind::Identity => return Ok(x.clone()),
        TransformKind::Rank => cols.iter().map(|c| rank_scores(c)).collect(),
        TransformKind::NormalScores => cols.iter().map(|c| normal_scores(c)).collect(),
        TransformKind::Biloop => {
            spec.validate()?;
            let mut out = Vec::with_capacity(2 * cols.len());
            for c in &cols {
                match robust_standardize(c) {
                    Ok(z) => {
                        let (u, v): (Vec<f64>, Vec<f64>) = z
                            .iter()
                            .map(|&zi| {
                                let p = biloop(zi, spec.c);
                                (p.u, p.v)
                            })
                            .unzip();
                        out.push(u);
                        out.push(v);
                    }
                    Err(Error::DegenerateScale { .. })
                        if policy == DegeneratePolicy::PassThroughZeros =>
                    {
                        out.push(vec![0.0; c.len()]);
                        out.push(vec![0.0; c.len()]);
                    }
                    Err(e) => return Err(e),
                }
            }
            out
        }
    };
    DataMatrix::from_columns(&out)
}

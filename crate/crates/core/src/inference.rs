//! Permutation tests of independence based on distance correlation.
//!
//! The marginal transform is applied once to the original data. Because every
//! supported transform acts on whole columns, transforming and then permuting
//! the rows of `y` gives the same matrix as permuting and then transforming,
//! so each replicate only relabels the centered distance matrix of `y`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::estimators::{CenteredDistanceMatrix, DependenceValue};
use crate::rng::{domain, stream};
use crate::transforms::{apply_transform, TransformKind, TransformSpec};

/// A dependence statistic: `dCor(T(x), T(y); α)` for a marginal transform `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub transform: TransformSpec,
    pub alpha: f64,
}

impl MethodSpec {
    pub fn new(transform: TransformSpec, alpha: f64) -> Result<Self> {
        let m = Self { transform, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn classical() -> Self {
        Self {
            transform: TransformSpec::identity(),
            alpha: 1.0,
        }
    }

    pub fn biloop() -> Self {
        Self {
            transform: TransformSpec::new(TransformKind::Biloop),
            alpha: 1.0,
        }
    }

    pub fn rank() -> Self {
        Self {
            transform: TransformSpec::rank(),
            alpha: 1.0,
        }
    }

    pub fn normal_scores() -> Self {
        Self {
            transform: TransformSpec::normal_scores(),
            alpha: 1.0,
        }
    }

    /// The four methods compared throughout: classical, biloop, rank, normal scores.
    pub fn standard_four() -> Vec<Self> {
        vec![
            Self::classical(),
            Self::biloop(),
            Self::rank(),
            Self::normal_scores(),
        ]
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        self.transform.validate()
    }

    /// Short label: `classical`, `biloop`, `rank` or `normal_scores`.
    pub fn name(&self) -> &'static str {
        match self.transform.kind {
            TransformKind::Identity => "classical",
            other => other.name(),
        }
    }

    /// Transform a sample and build its centered α-distance matrix.
    pub fn prepare(&self, x: &DataMatrix) -> Result<CenteredDistanceMatrix> {
        self.validate()?;
        let t = apply_transform(x, &self.transform)?;
        CenteredDistanceMatrix::from_sample(&t, self.alpha)
    }

    /// `dCor(T(x), T(y); α)`.
    pub fn statistic(&self, x: &DataMatrix, y: &DataMatrix) -> Result<DependenceValue> {
        if x.n() != y.n() {
            return Err(Error::LengthMismatch {
                left: x.n(),
                right: y.n(),
            });
        }
        self.prepare(x)?.dcor_with(&self.prepare(y)?)
    }
}

impl Default for MethodSpec {
    fn default() -> Self {
        Self::classical()
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind: TransformKind = s.parse()?;
        Ok(Self {
            transform: TransformSpec::new(kind),
            alpha: 1.0,
        })
    }
}

/// Outcome of a permutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub alpha: f64,
    pub statistic: f64,
    pub b: usize,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
    pub seed: u64,
    pub degenerate: bool,
}

/// `⌊200 + 5000/n⌋`.
pub fn default_permutation_count(n: usize) -> usize {
    200 + 5000 / n.max(1)
}

/// Add-one permutation p-value, counting ties as exceedances.
pub fn permutation_p_value(observed: f64, replicates: &[f64]) -> f64 {
    let count = replicates.iter().filter(|&&r| r >= observed).count();
    (1 + count) as f64 / (replicates.len() + 1) as f64
}

/// Replicate statistics `dCor(x, y_π)` for `b` seeded permutations.
///
/// Replicate `r` draws its permutation from the stream `(seed, [PERMUTATION, r])`,
/// so the returned vector does not depend on the number of worker threads.
pub fn permutation_replicates(
    cx: &CenteredDistanceMatrix,
    cy: &CenteredDistanceMatrix,
    b: usize,
    seed: u64,
) -> Vec<f64> {
    let n = cx.n();
    let denom = (cx.dvar() * cy.dvar()).sqrt();
    (0..b)
        .into_par_iter()
        .map(|r| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut stream(seed, &[domain::PERMUTATION, r as u64]));
            cx.inner_permuted(cy, &perm) / denom
        })
        .collect()
}

/// Test on already transformed and centered samples.
pub fn permutation_test_centered(
    cx: &CenteredDistanceMatrix,
    cy: &CenteredDistanceMatrix,
    b: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64, bool)> {
    if b == 0 {
        return Err(invalid("permutation count must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("level must lie in (0, 1), got {level}")));
    }
    let observed = cx.dcor_with(cy)?;
    if observed.degenerate {
        return Ok((0.0, 1.0, true));
    }
    let reps = permutation_replicates(cx, cy, b, seed);
    Ok((
        observed.value,
        permutation_p_value(observed.value, &reps),
        false,
    ))
}

/// Permutation test of independence of `x` and `y` using `method`.
///
/// `b` defaults to [`default_permutation_count`]. A degenerate statistic
/// (constant column) yields `p = 1` and no rejection.
pub fn permutation_independence_test(
    x: &DataMatrix,
    y: &DataMatrix,
    method: &MethodSpec,
    b: Option<usize>,
    level: f64,
    seed: u64,
) -> Result<TestResult> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    let b = b.unwrap_or_else(|| default_permutation_count(x.n()));
    let cx = method.prepare(x)?;
    let cy = method.prepare(y)?;
    let (statistic, p_value, degenerate) = permutation_test_centered(&cx, &cy, b, level, seed)?;
    Ok(TestResult {
        method: method.name().to_string(),
        alpha: method.alpha,
        statistic,
        b,
        p_value,
        level,
        reject: !degenerate && p_value <= level,
        seed,
        degenerate,
    })
}

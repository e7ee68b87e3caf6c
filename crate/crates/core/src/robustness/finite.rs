//! Finite-sample robustness diagnostics: sensitivity curves and breakdown.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::estimators::{sample_dcor, sample_dvar};
use crate::inference::MethodSpec;
use crate::transforms::standard_normal;

/// One point of a finite-sample curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub value: f64,
}

/// Deterministic standard normal sample `x_i = Φ⁻¹((i − ½)/(n + ½))`, `i = 1..n`.
pub fn base_quantile_sample(n: usize) -> Vec<f64> {
    let std = standard_normal();
    (1..=n)
        .map(|i| std.inverse_cdf((i as f64 - 0.5) / (n as f64 + 0.5)))
        .collect()
}

/// Sensitivity curve `SC(s) = n (T(s, x₁, …, x_n) − T(x₁, …, x_n))` of a
/// statistic, evaluated at each added row in `points`.
pub fn sensitivity_curve<F>(
    statistic: F,
    base: &DataMatrix,
    points: &[Vec<f64>],
) -> Result<Vec<f64>>
where
    F: Fn(&DataMatrix) -> Result<f64> + Sync,
{
    let reference = statistic(base)?;
    let n = base.n() as f64;
    points
        .par_iter()
        .map(|p| {
            let mut x = base.clone();
            x.push_row(p)?;
            Ok(n * (statistic(&x)? - reference))
        })
        .collect()
}

/// Sensitivity curve of `dVar(·; α)` at a univariate base sample.
pub fn dvar_sensitivity_curve(base: &[f64], s_grid: &[f64], alpha: f64) -> Result<Vec<CurvePoint>> {
    let x = DataMatrix::from_column(base.to_vec())?;
    let points: Vec<Vec<f64>> = s_grid.iter().map(|&s| vec![s]).collect();
    let sc = sensitivity_curve(|m| Ok(sample_dvar(m, alpha)?.value), &x, &points)?;
    Ok(s_grid
        .iter()
        .zip(sc)
        .map(|(&s, value)| CurvePoint { s, value })
        .collect())
}

/// Leading term `4 (n−1)²/n⁴ s^{2α}` of `dVar` after one observation is
/// moved to `s`.
pub fn breakdown_prediction_dvar(n: usize, s: f64, alpha: f64) -> f64 {
    let n = n as f64;
    4.0 * (n - 1.0).powi(2) / n.powi(4) * s.abs().powf(2.0 * alpha)
}

/// `dVar(·; α)` of `x` with its first observation replaced by each `s`.
pub fn breakdown_curve(x: &[f64], s_grid: &[f64], alpha: f64) -> Result<Vec<CurvePoint>> {
    if x.len() < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: x.len(),
        });
    }
    s_grid
        .par_iter()
        .map(|&s| {
            let mut v = x.to_vec();
            v[0] = s;
            Ok(CurvePoint {
                s,
                value: sample_dvar(&DataMatrix::from_column(v)?, alpha)?.value,
            })
        })
        .collect()
}

/// `dCor` of `(x, y)` with `(x₁, y₁)` replaced by `(s, s)`, for the method's
/// transform and exponent.
pub fn dcor_outlier_limit(
    x: &DataMatrix,
    y: &DataMatrix,
    s_grid: &[f64],
    method: &MethodSpec,
) -> Result<Vec<CurvePoint>> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    if x.n() < 2 {
        return Err(invalid("need at least two observations"));
    }
    s_grid
        .par_iter()
        .map(|&s| {
            let (mut xc, mut yc) = (x.clone(), y.clone());
            xc.set_row(0, &vec![s; x.dim()])?;
            yc.set_row(0, &vec![s; y.dim()])?;
            let value = if method.transform.kind == crate::transforms::TransformKind::Identity {
                sample_dcor(&xc, &yc, method.alpha)?.value
            } else {
                method.statistic(&xc, &yc)?.value
            };
            Ok(CurvePoint { s, value })
        })
        .collect()
}

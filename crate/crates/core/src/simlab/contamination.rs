//! Outlier injection.

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, stream};

/// Where contaminating observations come from. Scalar coordinates apply to
/// every dimension of the respective variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContaminationKind {
    /// All contaminating rows equal `(s, t)`.
    PointMass { s: f64, t: f64 },
    /// Rows drawn from `N(center, sd² I)`.
    GaussianCloud { center: [f64; 2], sd: f64 },
}

impl ContaminationKind {
    /// The same kind moved to location `(x, direction · x)`.
    pub fn at_location(&self, x: f64, direction: f64) -> Self {
        match *self {
            ContaminationKind::PointMass { .. } => ContaminationKind::PointMass {
                s: x,
                t: direction * x,
            },
            ContaminationKind::GaussianCloud { sd, .. } => ContaminationKind::GaussianCloud {
                center: [x, direction * x],
                sd,
            },
        }
    }
}

/// Contamination of a sample: either `⌊ε n⌋` uniformly chosen rows are
/// replaced, or (`lone`) only the first row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    #[serde(flatten)]
    pub kind: ContaminationKind,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub lone: bool,
}

impl ContaminationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!(
                "contamination fraction must lie in [0, 1), got {}",
                self.epsilon
            )));
        }
        if let ContaminationKind::GaussianCloud { sd, .. } = self.kind {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(invalid(format!("cloud sd must be non-negative, got {sd}")));
            }
        }
        Ok(())
    }

    /// Number of replaced rows for a sample of size `n`.
    pub fn count(&self, n: usize) -> usize {
        if self.lone {
            1.min(n)
        } else {
            (self.epsilon * n as f64).floor() as usize
        }
    }
}

/// Replace rows of `(x, y)` according to `spec`; the replaced rows and the
/// cloud draws come from the stream `(seed, [CONTAMINATION])`.
pub fn contaminate(
    x: &DataMatrix,
    y: &DataMatrix,
    spec: &ContaminationSpec,
    seed: u64,
) -> Result<(DataMatrix, DataMatrix)> {
    spec.validate()?;
    if x.n() != y.n() {
        return Err(Error::LengthMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    let n = x.n();
    let k = spec.count(n);
    let (mut xc, mut yc) = (x.clone(), y.clone());
    if k == 0 {
        return Ok((xc, yc));
    }
    let mut rng = stream(seed, &[domain::CONTAMINATION]);
    let rows: Vec<usize> = if spec.lone {
        vec![0]
    } else {
        let mut r = index::sample(&mut rng, n, k).into_vec();
        r.sort_unstable();
        r
    };
    for &i in &rows {
        let (rx, ry): (Vec<f64>, Vec<f64>) = match spec.kind {
            ContaminationKind::PointMass { s, t } => (vec![s; x.dim()], vec![t; y.dim()]),
            ContaminationKind::GaussianCloud { center, sd } => {
                let mut draw = |c: f64, d: usize| -> Vec<f64> {
                    (0..d)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            c + sd * z
                        })
                        .collect()
                };
                let rx = draw(center[0], x.dim());
                let ry = draw(center[1], y.dim());
                (rx, ry)
            }
        };
        xc.set_row(i, &rx)?;
        yc.set_row(i, &ry)?;
    }
    Ok((xc, yc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: usize) -> (DataMatrix, DataMatrix) {
        let x = DataMatrix::from_column((0..n).map(|i| i as f64 / n as f64).collect()).unwrap();
        let y = DataMatrix::from_column((0..n).map(|i| -(i as f64) / n as f64).collect()).unwrap();
        (x, y)
    }

    #[test]
    fn zero_fraction_is_identity() {
        let (x, y) = base(50);
        let spec = ContaminationSpec {
            kind: ContaminationKind::PointMass { s: 9.0, t: 9.0 },
            epsilon: 0.0,
            lone: false,
        };
        assert_eq!(contaminate(&x, &y, &spec, 1).unwrap(), (x, y));
    }

    #[test]
    fn lone_outlier_replaces_first_row() {
        let (x, y) = base(200);
        let spec = ContaminationSpec {
            kind: ContaminationKind::PointMass { s: 50.0, t: 50.0 },
            epsilon: 0.0,
            lone: true,
        };
        let (xc, yc) = contaminate(&x, &y, &spec, 1).unwrap();
        let hits = (0..200)
            .filter(|&i| xc.get(i, 0) == 50.0 && yc.get(i, 0) == 50.0)
            .count();
        assert_eq!(hits, 1);
        assert_eq!(xc.get(0, 0), 50.0);
    }

    #[test]
    fn cloud_replaces_floor_eps_n_rows() {
        let (x, y) = base(500);
        let spec = ContaminationSpec {
            kind: ContaminationKind::GaussianCloud {
                center: [6.0, 6.0],
                sd: 0.5,
            },
            epsilon: 0.05,
            lone: false,
        };
        let (xc, yc) = contaminate(&x, &y, &spec, 3).unwrap();
        let changed: Vec<usize> = (0..500).filter(|&i| xc.row(i) != x.row(i)).collect();
        assert_eq!(changed.len(), 25);
        let mx = changed.iter().map(|&i| xc.get(i, 0)).sum::<f64>() / 25.0;
        let my = changed.iter().map(|&i| yc.get(i, 0)).sum::<f64>() / 25.0;
        assert!((mx - 6.0).abs() < 0.5 && (my - 6.0).abs() < 0.5);
    }

    #[test]
    fn rejects_bad_fraction() {
        let (x, y) = base(10);
        let spec = ContaminationSpec {
            kind: ContaminationKind::PointMass { s: 1.0, t: 1.0 },
            epsilon: 1.0,
            lone: false,
        };
        assert!(contaminate(&x, &y, &spec, 1).is_err());
    }
}

//! Sample α-distance covariance, variance, standard deviation and correlation.
//!
//! All estimators are V-statistics: sample means run over every index pair,
//! including `i == j`, so `dCov = (1/n²) Σ_ij ΔX_ij ΔY_ij` with `Δ` the
//! doubly-centered matrix of `|x_i − x_j|^α`.

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::summation::NeumaierSum;

/// `dVar ≤ DEGENERATE_RATIO · (mean |Δ|)²` marks a variable as constant.
pub const DEGENERATE_RATIO: f64 = 1e-14;

/// Square `n × n` matrix of α-powered interpoint distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    alpha: f64,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Wrap an arbitrary row-major square matrix.
    pub fn from_rows(rows: &[Vec<f64>], alpha: f64) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n.max(1),
                col: pos % n.max(1),
            });
        }
        Ok(Self { n, alpha, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// `‖a − b‖^α` for two rows.
#[inline]
pub fn alpha_distance(a: &[f64], b: &[f64], alpha: f64) -> f64 {
    if a.len() == 1 {
        let r = (a[0] - b[0]).abs();
        return pow_abs(r, alpha);
    }
    let sq: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    if alpha == 2.0 {
        sq
    } else if alpha == 1.0 {
        sq.sqrt()
    } else {
        sq.powf(0.5 * alpha)
    }
}

/// `r^α` for `r ≥ 0`, with the common exponents special-cased.
#[inline]
pub fn pow_abs(r: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        r
    } else if alpha == 2.0 {
        r * r
    } else if alpha == 0.5 {
        r.sqrt()
    } else if alpha == 1.5 {
        r * r.sqrt()
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must be positive, got {alpha}")))
    }
}

/// Euclidean interpoint distances raised to `alpha`.
pub fn pairwise_alpha_distances(x: &DataMatrix, alpha: f64) -> Result<DistanceMatrix> {
    check_alpha(alpha)?;
    let n = x.n();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        let xi = x.row(i);
        for j in (i + 1)..n {
            let d = alpha_distance(xi, x.row(j), alpha);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / n,
            col: pos % n,
        });
    }
    Ok(DistanceMatrix { n, alpha, values })
}

/// Doubly-centered distance matrix `Δ_ij = d_ij − d̄_i. − d̄_.j + d̄..`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredDistanceMatrix {
    n: usize,
    alpha: f64,
    delta: Vec<f64>,
}

/// Double-center a symmetric distance matrix.
pub fn double_center(d: &DistanceMatrix) -> Result<CenteredDistanceMatrix> {
    let n = d.n;
    let scale = d.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (d.get(i, j) - d.get(j, i)).abs() > tol {
                return Err(invalid(format!(
                    "distance matrix not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let row_means: Vec<f64> = (0..n)
        .map(|i| {
            let mut acc = NeumaierSum::new();
            acc.extend(d.values[i * n..(i + 1) * n].iter().copied());
            acc.total() / n as f64
        })
        .collect();
    let mut grand = NeumaierSum::new();
    grand.extend(row_means.iter().copied());
    let grand = grand.total() / n as f64;

    let mut delta = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = d.get(i, j) - (row_means[i] + row_means[j]) + grand;
            delta[i * n + j] = v;
            delta[j * n + i] = v;
        }
    }
    Ok(CenteredDistanceMatrix {
        n,
        alpha: d.alpha,
        delta,
    })
}

impl CenteredDistanceMatrix {
    /// Distances and centering in one step.
    pub fn from_sample(x: &DataMatrix, alpha: f64) -> Result<Self> {
        double_center(&pairwise_alpha_distances(x, alpha)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.delta[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.delta
    }

    pub fn max_abs(&self) -> f64 {
        self.delta.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean_abs(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        acc.extend(self.delta.iter().map(|v| v.abs()));
        acc.total() / self.delta.len() as f64
    }

    /// `(1/n²) Σ Δ_ij Θ_ij` against another centered matrix of the same size.
    pub fn inner(&self, other: &CenteredDistanceMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut total = NeumaierSum::new();
        for i in 0..n {
            let mut row = NeumaierSum::new();
            let a = &self.delta[i * n..(i + 1) * n];
            let b = &other.delta[i * n..(i + 1) * n];
            for (u, v) in a.iter().zip(b) {
                row.add(u * v);
            }
            total.add(row.total());
        }
        Ok(total.total() / (n * n) as f64)
    }

    /// `(1/n²) Σ Δ_ij Θ_{π(i)π(j)}`: the inner product after relabelling the
    /// rows of the second sample by `perm`.
    pub fn inner_permuted(&self, other: &CenteredDistanceMatrix, perm: &[usize]) -> f64 {
        let n = self.n;
        debug_assert_eq!(perm.len(), n);
        let mut total = NeumaierSum::new();
        for i in 0..n {
            let a = &self.delta[i * n..(i + 1) * n];
            let b = &other.delta[perm[i] * n..(perm[i] + 1) * n];
            let mut row = NeumaierSum::new();
            for (j, u) in a.iter().enumerate() {
                row.add(u * b[perm[j]]);
            }
            total.add(row.total());
        }
        total.total() / (n * n) as f64
    }

    /// V-statistic distance variance of the underlying sample.
    pub fn dvar(&self) -> f64 {
        let mut total = NeumaierSum::new();
        for v in &self.delta {
            total.add(v * v);
        }
        total.total() / (self.n * self.n) as f64
    }

    /// True when the variable is (numerically) constant.
    pub fn is_degenerate(&self) -> bool {
        let m = self.mean_abs();
        self.dvar() <= DEGENERATE_RATIO * m * m
    }

    /// Distance correlation against another centered matrix, returning the
    /// degenerate flag alongside the value.
    pub fn dcor_with(&self, other: &CenteredDistanceMatrix) -> Result<DependenceValue> {
        let dcov = self.inner(other)?;
        Ok(dcor_from_parts(
            dcov,
            self.dvar(),
            other.dvar(),
            self.is_degenerate() || other.is_degenerate(),
            self.alpha,
        ))
    }
}

pub(crate) fn dcor_from_parts(
    dcov: f64,
    vx: f64,
    vy: f64,
    degenerate: bool,
    alpha: f64,
) -> DependenceValue {
    if degenerate {
        DependenceValue {
            value: 0.0,
            kind: DependenceKind::DCor,
            alpha,
            degenerate: true,
        }
    } else {
        DependenceValue {
            value: dcov / (vx * vy).sqrt(),
            kind: DependenceKind::DCor,
            alpha,
            degenerate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependenceKind {
    DCov,
    DVar,
    DStd,
    DCor,
}

/// A computed dependence statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceValue {
    pub value: f64,
    pub kind: DependenceKind,
    pub alpha: f64,
    /// Set for dCor when one of the variables is constant; `value` is then 0.
    pub degenerate: bool,
}

impl DependenceValue {
    fn plain(value: f64, kind: DependenceKind, alpha: f64) -> Self {
        Self {
            value,
            kind,
            alpha,
            degenerate: false,
        }
    }

    /// Units of the value (dCov is not square-rooted).
    pub fn units_note(&self) -> &'static str {
        match self.kind {
            DependenceKind::DCov => "units of X times Y, raised to alpha",
            DependenceKind::DVar => "units of X squared, raised to alpha",
            DependenceKind::DStd => "units of X, raised to alpha",
            DependenceKind::DCor => "unitless, in [0, 1]",
        }
    }
}

fn check_pair(x: &DataMatrix, y: &DataMatrix) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    if x.n() < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: x.n(),
        });
    }
    Ok(())
}

/// V-statistic α-distance covariance `(1/n²) Σ ΔX_ij ΔY_ij`.
pub fn sample_dcov(x: &DataMatrix, y: &DataMatrix, alpha: f64) -> Result<DependenceValue> {
    check_pair(x, y)?;
    let dx = CenteredDistanceMatrix::from_sample(x, alpha)?;
    let dy = CenteredDistanceMatrix::from_sample(y, alpha)?;
    Ok(DependenceValue::plain(
        dx.inner(&dy)?,
        DependenceKind::DCov,
        alpha,
    ))
}

/// `dVar(x) = dCov(x, x)`.
pub fn sample_dvar(x: &DataMatrix, alpha: f64) -> Result<DependenceValue> {
    check_pair(x, x)?;
    let dx = CenteredDistanceMatrix::from_sample(x, alpha)?;
    Ok(DependenceValue::plain(
        dx.dvar(),
        DependenceKind::DVar,
        alpha,
    ))
}

/// `dStd(x) = sqrt(dVar(x))`.
pub fn sample_dstd(x: &DataMatrix, alpha: f64) -> Result<DependenceValue> {
    let v = sample_dvar(x, alpha)?;
    Ok(DependenceValue::plain(
        v.value.max(0.0).sqrt(),
        DependenceKind::DStd,
        alpha,
    ))
}

/// `dCor = dCov / sqrt(dVar_x dVar_y)`; 0 with the degenerate flag when either
/// variable is constant.
pub fn sample_dcor(x: &DataMatrix, y: &DataMatrix, alpha: f64) -> Result<DependenceValue> {
    check_pair(x, y)?;
    let dx = CenteredDistanceMatrix::from_sample(x, alpha)?;
    let dy = CenteredDistanceMatrix::from_sample(y, alpha)?;
    dx.dcor_with(&dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col(v: &[f64]) -> DataMatrix {
        DataMatrix::from_column(v.to_vec()).unwrap()
    }

    #[test]
    fn distances_unit_pair() {
        let d = pairwise_alpha_distances(&col(&[0.0, 1.0]), 1.0).unwrap();
        assert_eq!(d.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn distances_square_root_exponent() {
        let d = pairwise_alpha_distances(&col(&[0.0, 4.0]), 0.5).unwrap();
        assert_eq!(d.get(0, 1), 2.0);
        assert_eq!(d.get(1, 0), 2.0);
    }

    #[test]
    fn distances_euclidean_in_two_dimensions() {
        let x = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = pairwise_alpha_distances(&x, 1.0).unwrap();
        assert_abs_diff_eq!(d.get(0, 1), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn distances_reject_bad_alpha() {
        assert!(pairwise_alpha_distances(&col(&[0.0, 1.0]), 0.0).is_err());
        assert!(pairwise_alpha_distances(&col(&[0.0, 1.0]), f64::NAN).is_err());
    }

    #[test]
    fn centering_two_points() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1.0).unwrap();
        let c = double_center(&d).unwrap();
        assert_eq!(c.as_slice(), &[-0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn centering_annihilates_constants() {
        let d = DistanceMatrix::from_rows(&vec![vec![2.5; 4]; 4], 1.0).unwrap();
        let c = double_center(&d).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn centering_three_points_rows_sum_to_zero() {
        let d = DistanceMatrix::from_rows(
            &[
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
            ],
            1.0,
        )
        .unwrap();
        let c = double_center(&d).unwrap();
        // d̄_0 = d̄_2 = 1, d̄_1 = 2/3, d̄.. = 8/9
        assert_abs_diff_eq!(c.get(0, 0), -1.0 - 1.0 + 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            c.get(0, 1),
            1.0 - 1.0 - 2.0 / 3.0 + 8.0 / 9.0,
            epsilon = 1e-15
        );
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| c.get(i, j)).sum();
            let colsum: f64 = (0..3).map(|j| c.get(j, i)).sum();
            assert!(row.abs() < 1e-12 && colsum.abs() < 1e-12);
        }
    }

    #[test]
    fn centering_rejects_non_square_and_asymmetric() {
        assert!(matches!(
            DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]], 1.0),
            Err(Error::NotSquare { .. })
        ));
        let d = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]], 1.0).unwrap();
        assert!(double_center(&d).is_err());
    }

    #[test]
    fn dcov_two_points() {
        let x = col(&[0.0, 1.0]);
        assert_abs_diff_eq!(
            sample_dcov(&x, &x, 1.0).unwrap().value,
            0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(sample_dvar(&x, 1.0).unwrap().value, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(sample_dstd(&x, 1.0).unwrap().value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn dcov_constant_is_zero() {
        let x = col(&[0.3, 1.0, -2.0, 5.0]);
        let y = col(&[7.0; 4]);
        assert_eq!(sample_dcov(&x, &y, 1.0).unwrap().value, 0.0);
        assert_eq!(sample_dvar(&y, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn dvar_scales_quadratically() {
        let x = col(&[0.3, 1.0, -2.0, 5.0, 0.7]);
        let y = x.map(|v| 3.0 - 2.5 * v).unwrap();
        let vx = sample_dvar(&x, 1.0).unwrap().value;
        let vy = sample_dvar(&y, 1.0).unwrap().value;
        assert_abs_diff_eq!(vy, 6.25 * vx, epsilon = 1e-12 * vy);
    }

    #[test]
    fn dcor_self_and_affine_is_one() {
        let x = col(&[0.3, 1.0, -2.0, 5.0, 0.7]);
        assert_abs_diff_eq!(
            sample_dcor(&x, &x, 1.0).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
        let y = x.map(|v| -1.0 - 4.0 * v).unwrap();
        assert_abs_diff_eq!(
            sample_dcor(&x, &y, 1.0).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn dcor_constant_is_flagged() {
        let x = col(&[0.3, 1.0, -2.0, 5.0]);
        let y = col(&[7.0; 4]);
        let r = sample_dcor(&x, &y, 1.0).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.value, 0.0);
        let r = sample_dcor(&y, &x, 1.0).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn errors_on_mismatch_and_tiny_samples() {
        let x = col(&[0.0, 1.0, 2.0]);
        let y = col(&[0.0, 1.0]);
        assert!(matches!(
            sample_dcov(&x, &y, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
        let one = col(&[1.0]);
        assert!(matches!(
            sample_dcor(&one, &one, 1.0),
            Err(Error::TooFewObservations { .. })
        ));
    }

    #[test]
    fn permuted_inner_matches_explicit_permutation() {
        let x = col(&[0.3, 1.0, -2.0, 5.0, 0.7]);
        let y = col(&[1.1, -0.4, 2.2, 0.0, 3.3]);
        let perm = [3, 0, 4, 1, 2];
        let dx = CenteredDistanceMatrix::from_sample(&x, 1.0).unwrap();
        let dy = CenteredDistanceMatrix::from_sample(&y, 1.0).unwrap();
        let dyp = CenteredDistanceMatrix::from_sample(&y.permute_rows(&perm), 1.0).unwrap();
        assert_abs_diff_eq!(
            dx.inner_permuted(&dy, &perm),
            dx.inner(&dyp).unwrap(),
            epsilon = 1e-14
        );
    }
}

//! Model distributions for the population-level computations.
//!
//! A [`DistributionSpec`] describes the joint law of `(X, Y)`. Independent
//! copies `X′, X″, ...` are realized by independent joint draws.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, stream, StreamRng};

/// A univariate law used as a margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Marginal {
    Normal { mean: f64, sd: f64 },
    StudentT { nu: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Marginal {
    pub fn standard_normal() -> Self {
        Marginal::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Marginal::StudentT { nu } => nu.is_finite() && nu > 0.0,
            Marginal::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid marginal {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Marginal::StudentT { nu } => StudentT::new(nu).expect("validated").sample(rng),
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => Normal::new(mean, sd).expect("validated").cdf(x),
            Marginal::StudentT { nu } => StudentsT::new(0.0, 1.0, nu).expect("validated").cdf(x),
            Marginal::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Whether `E|X|^p < ∞`.
    pub fn has_moment(&self, p: f64) -> bool {
        match *self {
            Marginal::StudentT { nu } => p < nu,
            _ => true,
        }
    }
}

/// User-supplied joint sampler of `(X, Y)`.
pub trait JointSampler: Send + Sync {
    fn dims(&self) -> (usize, usize);
    fn sample(&self, rng: &mut StreamRng, x: &mut [f64], y: &mut [f64]);
    /// Whether `E‖X‖^p` and `E‖Y‖^p` are finite; assumed by default.
    fn has_moment(&self, _p: f64) -> bool {
        true
    }
}

/// Joint law of `(X, Y)`.
#[derive(Clone)]
pub enum DistributionSpec {
    /// `X ~ marginal` and `Y = X`: the distance-variance case.
    Univariate(Marginal),
    /// Standard bivariate normal with correlation `rho`.
    BivariateNormal {
        rho: f64,
    },
    /// `(X, Y) ~ N(0, cov)` with `X` the first `dim_x` coordinates.
    MultivariateNormal {
        cov: Vec<Vec<f64>>,
        dim_x: usize,
    },
    /// Multivariate t with `nu` degrees of freedom and scale matrix `scale`.
    MultivariateT {
        nu: f64,
        scale: Vec<Vec<f64>>,
        dim_x: usize,
    },
    /// Rows drawn uniformly with replacement from a paired sample.
    Empirical {
        x: DataMatrix,
        y: DataMatrix,
    },
    /// Independent margins.
    Product(Marginal, Marginal),
    Custom(Arc<dyn JointSampler>),
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Univariate(m) => f.debug_tuple("Univariate").field(m).finish(),
            DistributionSpec::BivariateNormal { rho } => {
                f.debug_struct("BivariateNormal").field("rho", rho).finish()
            }
            DistributionSpec::MultivariateNormal { cov, dim_x } => f
                .debug_struct("MultivariateNormal")
                .field("cov", cov)
                .field("dim_x", dim_x)
                .finish(),
            DistributionSpec::MultivariateT { nu, scale, dim_x } => f
                .debug_struct("MultivariateT")
                .field("nu", nu)
                .field("scale", scale)
                .field("dim_x", dim_x)
                .finish(),
            DistributionSpec::Empirical { x, .. } => {
                write!(f, "Empirical {{ n: {} }}", x.n())
            }
            DistributionSpec::Product(a, b) => f.debug_tuple("Product").field(a).field(b).finish(),
            DistributionSpec::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        DistributionSpec::Univariate(Marginal::standard_normal())
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            DistributionSpec::Univariate(_)
            | DistributionSpec::BivariateNormal { .. }
            | DistributionSpec::Product(..) => (1, 1),
            DistributionSpec::MultivariateNormal { cov, dim_x } => (*dim_x, cov.len() - dim_x),
            DistributionSpec::MultivariateT { scale, dim_x, .. } => (*dim_x, scale.len() - dim_x),
            DistributionSpec::Empirical { x, y } => (x.dim(), y.dim()),
            DistributionSpec::Custom(s) => s.dims(),
        }
    }

    /// Margin of `X` when it is univariate with a known law.
    pub fn x_marginal(&self) -> Option<Marginal> {
        match self {
            DistributionSpec::Univariate(m) | DistributionSpec::Product(m, _) => Some(*m),
            DistributionSpec::BivariateNormal { .. } => Some(Marginal::standard_normal()),
            DistributionSpec::MultivariateNormal { cov, dim_x }
                if *dim_x == 1 && cov.len() == 2 =>
            {
                Some(Marginal::Normal {
                    mean: 0.0,
                    sd: cov[0][0].sqrt(),
                })
            }
            _ => None,
        }
    }

    /// Margin of `Y` when it is univariate with a known law.
    pub fn y_marginal(&self) -> Option<Marginal> {
        match self {
            DistributionSpec::Univariate(m) | DistributionSpec::Product(_, m) => Some(*m),
            DistributionSpec::BivariateNormal { .. } => Some(Marginal::standard_normal()),
            DistributionSpec::MultivariateNormal { cov, dim_x }
                if *dim_x == 1 && cov.len() == 2 =>
            {
                Some(Marginal::Normal {
                    mean: 0.0,
                    sd: cov[1][1].sqrt(),
                })
            }
            _ => None,
        }
    }

    /// Whether `E‖X‖^p` and `E‖Y‖^p` are both finite.
    pub fn has_moment(&self, p: f64) -> bool {
        match self {
            DistributionSpec::Univariate(m) => m.has_moment(p),
            DistributionSpec::Product(a, b) => a.has_moment(p) && b.has_moment(p),
            DistributionSpec::MultivariateT { nu, .. } => p < *nu,
            DistributionSpec::Custom(s) => s.has_moment(p),
            _ => true,
        }
    }

    /// Reject laws for which the influence functions at exponent `alpha`
    /// do not exist (`E‖X‖^{2α} = ∞`).
    pub fn check_moments(&self, alpha: f64) -> Result<()> {
        if self.has_moment(2.0 * alpha) {
            Ok(())
        } else {
            Err(Error::MomentCondition(format!(
                "E|X|^{} is infinite for {self:?}",
                2.0 * alpha
            )))
        }
    }

    /// Validate parameters and precompute what sampling needs.
    pub fn sampler(&self) -> Result<Sampler> {
        let kind = match self {
            DistributionSpec::Univariate(m) => {
                m.validate()?;
                SamplerKind::Univariate(*m)
            }
            DistributionSpec::Product(a, b) => {
                a.validate()?;
                b.validate()?;
                SamplerKind::Product(*a, *b)
            }
            DistributionSpec::BivariateNormal { rho } => {
                if !(rho.is_finite() && rho.abs() <= 1.0) {
                    return Err(invalid(format!(
                        "correlation must lie in [-1, 1], got {rho}"
                    )));
                }
                SamplerKind::Bivariate {
                    rho: *rho,
                    comp: (1.0 - rho * rho).max(0.0).sqrt(),
                }
            }
            DistributionSpec::MultivariateNormal { cov, dim_x } => {
                check_split(cov.len(), *dim_x)?;
                SamplerKind::Gaussian {
                    root: matrix_root(cov)?,
                    dim_x: *dim_x,
                    t: None,
                }
            }
            DistributionSpec::MultivariateT { nu, scale, dim_x } => {
                if !(nu.is_finite() && *nu > 0.0) {
                    return Err(invalid(format!(
                        "degrees of freedom must be positive, got {nu}"
                    )));
                }
                check_split(scale.len(), *dim_x)?;
                SamplerKind::Gaussian {
                    root: matrix_root(scale)?,
                    dim_x: *dim_x,
                    t: Some((
                        *nu,
                        ChiSquared::new(*nu).map_err(|e| invalid(e.to_string()))?,
                    )),
                }
            }
            DistributionSpec::Empirical { x, y } => {
                if x.n() != y.n() {
                    return Err(Error::LengthMismatch {
                        left: x.n(),
                        right: y.n(),
                    });
                }
                if x.n() == 0 {
                    return Err(Error::TooFewObservations {
                        required: 1,
                        got: 0,
                    });
                }
                SamplerKind::Empirical(x.clone(), y.clone())
            }
            DistributionSpec::Custom(s) => SamplerKind::Custom(Arc::clone(s)),
        };
        let (dx, dy) = self.dims();
        Ok(Sampler { kind, dx, dy })
    }

    /// `n` iid draws of `(X, Y)` from the stream `(seed, [SAMPLE])`.
    pub fn sample_pairs(&self, n: usize, seed: u64) -> Result<(DataMatrix, DataMatrix)> {
        let sampler = self.sampler()?;
        let mut rng = stream(seed, &[domain::SAMPLE]);
        sampler.sample_matrix(n, &mut rng)
    }
}

fn check_split(total: usize, dim_x: usize) -> Result<()> {
    if dim_x == 0 || dim_x >= total {
        Err(invalid(format!(
            "dim_x must lie in 1..{total}, got {dim_x}"
        )))
    } else {
        Ok(())
    }
}

/// A matrix `L` with `L Lᵀ = S` for symmetric positive semidefinite `S`.
fn matrix_root(s: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let k = s.len();
    if s.iter().any(|r| r.len() != k) {
        return Err(Error::NotSquare {
            rows: k,
            cols: s.first().map_or(0, Vec::len),
        });
    }
    let m = DMatrix::from_fn(k, k, |i, j| s[i][j]);
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (&m - m.transpose()).amax() > 1e-12 * scale || m.iter().any(|v| !v.is_finite()) {
        return Err(invalid("covariance matrix must be finite and symmetric"));
    }
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.l());
    }
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-10 * scale) {
        return Err(invalid("covariance matrix is not positive semidefinite"));
    }
    let roots = DVector::from_iterator(k, eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

#[derive(Clone)]
enum SamplerKind {
    Univariate(Marginal),
    Product(Marginal, Marginal),
    Bivariate {
        rho: f64,
        comp: f64,
    },
    Gaussian {
        root: DMatrix<f64>,
        dim_x: usize,
        t: Option<(f64, ChiSquared<f64>)>,
    },
    Empirical(DataMatrix, DataMatrix),
    Custom(Arc<dyn JointSampler>),
}

/// Prepared sampler for a [`DistributionSpec`].
#[derive(Clone)]
pub struct Sampler {
    kind: SamplerKind,
    dx: usize,
    dy: usize,
}

impl Sampler {
    pub fn dims(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    /// Write one draw of `(X, Y)` into `x` (length `dx`) and `y` (length `dy`).
    pub fn draw(&self, rng: &mut StreamRng, x: &mut [f64], y: &mut [f64]) {
        match &self.kind {
            SamplerKind::Univariate(m) => {
                x[0] = m.sample(rng);
                y[0] = x[0];
            }
            SamplerKind::Product(a, b) => {
                x[0] = a.sample(rng);
                y[0] = b.sample(rng);
            }
            SamplerKind::Bivariate { rho, comp } => {
                let z1: f64 = StandardNormal.sample(rng);
                let z2: f64 = StandardNormal.sample(rng);
                x[0] = z1;
                y[0] = rho * z1 + comp * z2;
            }
            SamplerKind::Gaussian { root, dim_x, t } => {
                let k = root.nrows();
                let z: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
                // X = L z for the normal; X = L z · sqrt(ν / W), W ~ χ²_ν, for the t.
                let factor = match t {
                    Some((nu, chi)) => {
                        let w: f64 = chi.sample(rng);
                        (nu / w).sqrt()
                    }
                    None => 1.0,
                };
                for i in 0..k {
                    let acc: f64 = (0..k).map(|j| root[(i, j)] * z[j]).sum();
                    if i < *dim_x {
                        x[i] = factor * acc;
                    } else {
                        y[i - dim_x] = factor * acc;
                    }
                }
            }
            SamplerKind::Empirical(xs, ys) => {
                let i = rng.random_range(0..xs.n());
                x.copy_from_slice(xs.row(i));
                y.copy_from_slice(ys.row(i));
            }
            SamplerKind::Custom(s) => s.sample(rng, x, y),
        }
    }

    /// `n` iid rows.
    pub fn sample_matrix(&self, n: usize, rng: &mut StreamRng) -> Result<(DataMatrix, DataMatrix)> {
        let mut xv = vec![0.0; n * self.dx];
        let mut yv = vec![0.0; n * self.dy];
        for i in 0..n {
            self.draw(
                rng,
                &mut xv[i * self.dx..(i + 1) * self.dx],
                &mut yv[i * self.dy..(i + 1) * self.dy],
            );
        }
        Ok((
            DataMatrix::new(xv, n, self.dx)?,
            DataMatrix::new(yv, n, self.dy)?,
        ))
    }
}

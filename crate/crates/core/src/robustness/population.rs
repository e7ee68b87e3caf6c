//! Monte-Carlo evaluation of population distance covariance and `η`.
//!
//! One [`PopulationDraws`] holds `M` independent triples of joint draws
//! `(X, Y), (X′, Y′), (X″, Y″)`. Every expectation is a mean over these
//! triples, so all quantities computed from the same draws share their Monte
//! Carlo noise (common random numbers). Standard errors come from per-draw
//! influence values and the delta method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimators::pow_abs;
use crate::rng::{domain, stream};
use crate::summation::NeumaierSum;

use super::distribution::DistributionSpec;

/// Draws are generated in chunks of this size, each from its own stream.
pub const DRAW_CHUNK: usize = 4096;

/// Smallest accepted Monte-Carlo size.
pub const MIN_MC_SIZE: usize = 1000;

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `|value − target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// A mean-type estimate together with its centered per-draw influence values.
#[derive(Debug, Clone)]
pub struct Component {
    pub value: f64,
    pub psi: Vec<f64>,
}

impl Component {
    /// Sample mean of `values`, with `psi_i = values_i − mean`.
    pub fn mean_of(mut values: Vec<f64>) -> Self {
        let value = mean(&values);
        values.iter_mut().for_each(|v| *v -= value);
        Self { value, psi: values }
    }

    pub fn estimate(&self) -> McEstimate {
        McEstimate {
            value: self.value,
            stderr: stderr_of(&self.psi),
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    let mut s = NeumaierSum::new();
    values.iter().for_each(|&v| s.add(v));
    s.total() / values.len() as f64
}

/// `sd(psi)/√M`.
pub fn stderr_of(psi: &[f64]) -> f64 {
    let m = psi.len();
    if m < 2 {
        return f64::NAN;
    }
    let mu = mean(psi);
    let mut s = NeumaierSum::new();
    psi.iter().for_each(|&v| s.add((v - mu) * (v - mu)));
    (s.total() / ((m - 1) as f64 * m as f64)).sqrt()
}

/// Delta-method estimate of `g(θ₁, ..., θ_k)` from components sharing draws.
///
/// The gradient is taken by central differences, which is exact for the
/// affine and low-order rational maps used in this crate up to rounding.
pub fn combine(parts: &[&Component], g: impl Fn(&[f64]) -> f64) -> McEstimate {
    combine_component(parts, g).estimate()
}

/// Like [`combine`], keeping the per-draw influence values so that the result
/// can itself be combined further (for example, differenced).
pub fn combine_component(parts: &[&Component], g: impl Fn(&[f64]) -> f64) -> Component {
    let theta: Vec<f64> = parts.iter().map(|c| c.value).collect();
    let value = g(&theta);
    let grad: Vec<f64> = (0..theta.len())
        .map(|k| {
            let h = 1e-6 * theta[k].abs().max(1e-3);
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[k] += h;
            down[k] -= h;
            (g(&up) - g(&down)) / (2.0 * h)
        })
        .collect();
    let m = parts.first().map_or(0, |c| c.psi.len());
    let psi: Vec<f64> = (0..m)
        .map(|i| {
            parts
                .iter()
                .zip(&grad)
                .map(|(c, w)| w * c.psi[i])
                .sum::<f64>()
        })
        .collect();
    Component { value, psi }
}

/// `E[ab] + E[a]E[b] − 2E[ac]` with its influence values, where `a`, `b`,
/// `c` are per-draw `|X−X′|^α`, `|Y−Y′|^α`, `|Y−Y″|^α`.
pub fn triple_component(a: &[f64], b: &[f64], c: &[f64]) -> Component {
    let ab: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
    let ac: Vec<f64> = a.iter().zip(c).map(|(u, v)| u * v).collect();
    let (m1, m2, m3, m4) = (mean(&ab), mean(a), mean(b), mean(&ac));
    let value = m1 + m2 * m3 - 2.0 * m4;
    let psi = (0..a.len())
        .map(|i| (ab[i] - m1) + m3 * (a[i] - m2) + m2 * (b[i] - m3) - 2.0 * (ac[i] - m4))
        .collect();
    Component { value, psi }
}

/// `Cov(A, B) = E[AB] − E[A]E[B]` with its influence values.
pub fn covariance_component(a: &[f64], b: &[f64]) -> Component {
    let (ma, mb) = (mean(a), mean(b));
    let cross: Vec<f64> = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).collect();
    let value = mean(&cross);
    let psi = cross.into_iter().map(|v| v - value).collect();
    Component { value, psi }
}

/// Which variable of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// `M` iid triples of joint draws of `(X, Y)`, stored copy-major.
#[derive(Debug, Clone)]
pub struct DrawSet {
    m: usize,
    dx: usize,
    dy: usize,
    x: [Vec<f64>; 3],
    y: [Vec<f64>; 3],
}

impl DrawSet {
    /// Chunk `c` of the draws comes from the stream `(seed, [MC_DRAWS, c])`.
    pub fn generate(dist: &DistributionSpec, m: usize, seed: u64) -> Result<Self> {
        let sampler = dist.sampler()?;
        let (dx, dy) = sampler.dims();
        let chunks = m.div_ceil(DRAW_CHUNK);
        let parts: Vec<[(Vec<f64>, Vec<f64>); 3]> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = DRAW_CHUNK.min(m - c * DRAW_CHUNK);
                let mut rng = stream(seed, &[domain::MC_DRAWS, c as u64]);
                let mut out: [(Vec<f64>, Vec<f64>); 3] = Default::default();
                for (xs, ys) in out.iter_mut() {
                    xs.resize(len * dx, 0.0);
                    ys.resize(len * dy, 0.0);
                }
                for i in 0..len {
                    for (xs, ys) in out.iter_mut() {
                        sampler.draw(
                            &mut rng,
                            &mut xs[i * dx..(i + 1) * dx],
                            &mut ys[i * dy..(i + 1) * dy],
                        );
                    }
                }
                out
            })
            .collect();
        let mut x: [Vec<f64>; 3] = Default::default();
        let mut y: [Vec<f64>; 3] = Default::default();
        for part in parts {
            for (k, (xs, ys)) in part.into_iter().enumerate() {
                x[k].extend(xs);
                y[k].extend(ys);
            }
        }
        Ok(Self { m, dx, dy, x, y })
    }

    /// Rebuild a draw set from pooled, copy-major univariate values
    /// (`[copy 0 | copy 1 | copy 2]`, each of length `m`). With `paired`, each
    /// input value became two output coordinates (biloop), stored
    /// consecutively.
    pub(crate) fn from_pooled(m: usize, x: &[f64], y: &[f64], paired: bool) -> Self {
        let d = if paired { 2 } else { 1 };
        let split = |v: &[f64]| -> [Vec<f64>; 3] {
            [
                v[..m * d].to_vec(),
                v[m * d..2 * m * d].to_vec(),
                v[2 * m * d..].to_vec(),
            ]
        };
        Self {
            m,
            dx: d,
            dy: d,
            x: split(x),
            y: split(y),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    /// Raw coordinates of copy `k ∈ {0, 1, 2}` of a variable (row-major).
    pub fn values(&self, var: Var, k: usize) -> &[f64] {
        match var {
            Var::X => &self.x[k],
            Var::Y => &self.y[k],
        }
    }

    fn dim(&self, var: Var) -> usize {
        match var {
            Var::X => self.dx,
            Var::Y => self.dy,
        }
    }

    /// Per-draw `‖V_{k1} − V_{k2}‖^α`.
    pub fn copy_distances(&self, var: Var, k1: usize, k2: usize, alpha: f64) -> Vec<f64> {
        let d = self.dim(var);
        let (p, q) = (self.values(var, k1), self.values(var, k2));
        (0..self.m)
            .into_par_iter()
            .map(|i| norm_pow(&p[i * d..(i + 1) * d], &q[i * d..(i + 1) * d], alpha))
            .collect()
    }

    /// Per-draw `‖V_k − point‖^α`.
    pub fn point_distances(&self, var: Var, k: usize, point: &[f64], alpha: f64) -> Vec<f64> {
        let d = self.dim(var);
        let p = self.values(var, k);
        (0..self.m)
            .into_par_iter()
            .map(|i| norm_pow(&p[i * d..(i + 1) * d], point, alpha))
            .collect()
    }

    /// Apply univariate maps to every stored coordinate of `X` and `Y`.
    pub fn map(&self, fx: impl Fn(f64) -> f64 + Sync, fy: impl Fn(f64) -> f64 + Sync) -> Self {
        let apply = |v: &Vec<f64>, f: &(dyn Fn(f64) -> f64 + Sync)| -> Vec<f64> {
            v.par_iter().map(|&z| f(z)).collect()
        };
        Self {
            m: self.m,
            dx: self.dx,
            dy: self.dy,
            x: [
                apply(&self.x[0], &fx),
                apply(&self.x[1], &fx),
                apply(&self.x[2], &fx),
            ],
            y: [
                apply(&self.y[0], &fy),
                apply(&self.y[1], &fy),
                apply(&self.y[2], &fy),
            ],
        }
    }
}

#[inline]
fn norm_pow(a: &[f64], b: &[f64], alpha: f64) -> f64 {
    if a.len() == 1 {
        return pow_abs((a[0] - b[0]).abs(), alpha);
    }
    let sq: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    pow_abs(sq.sqrt(), alpha)
}

/// Draws plus the cached copy distances that every population quantity uses.
#[derive(Debug, Clone)]
pub struct PopulationDraws {
    draws: DrawSet,
    alpha: f64,
    /// `‖X − X′‖^α`
    ax: Vec<f64>,
    /// `‖X − X″‖^α`
    cx: Vec<f64>,
    /// `‖Y − Y′‖^α`
    by: Vec<f64>,
    /// `‖Y − Y″‖^α`
    cy: Vec<f64>,
}

pub(crate) fn check_mc(alpha: f64, mc_size: usize) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if mc_size < MIN_MC_SIZE {
        return Err(invalid(format!(
            "Monte-Carlo size must be at least {MIN_MC_SIZE}, got {mc_size}"
        )));
    }
    Ok(())
}

impl PopulationDraws {
    pub fn new(dist: &DistributionSpec, alpha: f64, mc_size: usize, seed: u64) -> Result<Self> {
        check_mc(alpha, mc_size)?;
        Ok(Self::from_draws(
            DrawSet::generate(dist, mc_size, seed)?,
            alpha,
        ))
    }

    pub fn from_draws(draws: DrawSet, alpha: f64) -> Self {
        Self {
            ax: draws.copy_distances(Var::X, 0, 1, alpha),
            cx: draws.copy_distances(Var::X, 0, 2, alpha),
            by: draws.copy_distances(Var::Y, 0, 1, alpha),
            cy: draws.copy_distances(Var::Y, 0, 2, alpha),
            draws,
            alpha,
        }
    }

    pub fn draws(&self) -> &DrawSet {
        &self.draws
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Per-draw `‖X−X′‖^α`, `‖X−X″‖^α`, `‖Y−Y′‖^α`, `‖Y−Y″‖^α`.
    pub fn copy_terms(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        (&self.ax, &self.cx, &self.by, &self.cy)
    }

    /// `dCov(X, Y; α)`.
    pub fn dcov(&self) -> Component {
        triple_component(&self.ax, &self.by, &self.cy)
    }

    /// `dVar(X; α)`.
    pub fn dvar_x(&self) -> Component {
        triple_component(&self.ax, &self.ax, &self.cx)
    }

    /// `dVar(Y; α)`.
    pub fn dvar_y(&self) -> Component {
        triple_component(&self.by, &self.by, &self.cy)
    }

    /// Scalar contamination coordinates are broadcast over all dimensions.
    fn point(&self, var: Var, s: f64) -> Vec<f64> {
        vec![s; self.draws.dim(var)]
    }

    /// `η(s, t, X, Y, α) = Cov(‖X−s‖^α − ‖X−X′‖^α, ‖Y−t‖^α − ‖Y−Y″‖^α)`.
    pub fn eta_xy(&self, s: f64, t: f64) -> Component {
        let ds = self
            .draws
            .point_distances(Var::X, 0, &self.point(Var::X, s), self.alpha);
        let dt = self
            .draws
            .point_distances(Var::Y, 0, &self.point(Var::Y, t), self.alpha);
        let a: Vec<f64> = ds.iter().zip(&self.ax).map(|(u, v)| u - v).collect();
        let b: Vec<f64> = dt.iter().zip(&self.cy).map(|(u, v)| u - v).collect();
        covariance_component(&a, &b)
    }

    /// `η(s, s, X, X, α)`.
    pub fn eta_xx(&self, s: f64) -> Component {
        self.eta_same(Var::X, s)
    }

    /// `η(t, t, Y, Y, α)`.
    pub fn eta_yy(&self, t: f64) -> Component {
        self.eta_same(Var::Y, t)
    }

    fn eta_same(&self, var: Var, s: f64) -> Component {
        let ds = self
            .draws
            .point_distances(var, 0, &self.point(var, s), self.alpha);
        let (first, second) = match var {
            Var::X => (&self.ax, &self.cx),
            Var::Y => (&self.by, &self.cy),
        };
        let a: Vec<f64> = ds.iter().zip(first).map(|(u, v)| u - v).collect();
        let b: Vec<f64> = ds.iter().zip(second).map(|(u, v)| u - v).collect();
        covariance_component(&a, &b)
    }

    /// `η(s, s, X, X, α)` value only, without allocating influence values.
    pub fn eta_xx_value(&self, s: f64) -> f64 {
        let x = self.draws.values(Var::X, 0);
        let d = self.draws.dx;
        let point = self.point(Var::X, s);
        let (mut sab, mut sa, mut sb) =
            (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
        for i in 0..self.len() {
            let ds = norm_pow(&x[i * d..(i + 1) * d], &point, self.alpha);
            let (a, b) = (ds - self.ax[i], ds - self.cx[i]);
            sab.add(a * b);
            sa.add(a);
            sb.add(b);
        }
        let m = self.len() as f64;
        sab.total() / m - (sa.total() / m) * (sb.total() / m)
    }
}

/// Monte-Carlo `dCov(X, Y; α)` from the three-term expectation form.
pub fn mc_population_dcov(
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(PopulationDraws::new(dist, alpha, mc_size, seed)?
        .dcov()
        .estimate())
}

/// Monte-Carlo `dVar(X; α)` of the `X` component.
pub fn mc_population_dvar(
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(PopulationDraws::new(dist, alpha, mc_size, seed)?
        .dvar_x()
        .estimate())
}

/// Monte-Carlo `η(s, t, X, Y, α)`.
pub fn mc_eta(
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(PopulationDraws::new(dist, alpha, mc_size, seed)?
        .eta_xy(s, t)
        .estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::distribution::Marginal;

    #[test]
    fn combine_is_exact_for_linear_maps() {
        let a = Component::mean_of(vec![1.0, 2.0, 3.0, 4.0]);
        let b = Component::mean_of(vec![0.0, 1.0, 0.0, 1.0]);
        let est = combine(&[&a, &b], |t| 2.0 * t[0] - t[1]);
        assert!((est.value - 4.5).abs() < 1e-12);
        let direct = Component::mean_of(vec![2.0, 3.0, 6.0, 7.0]).estimate();
        assert!((est.stderr - direct.stderr).abs() < 1e-6);
    }

    #[test]
    fn draws_do_not_depend_on_worker_count() {
        let dist = DistributionSpec::BivariateNormal { rho: 0.3 };
        let one = crate::parallel::with_workers(1, || DrawSet::generate(&dist, 10_000, 5).unwrap());
        let three =
            crate::parallel::with_workers(3, || DrawSet::generate(&dist, 10_000, 5).unwrap());
        for k in 0..3 {
            assert_eq!(one.values(Var::X, k), three.values(Var::X, k));
            assert_eq!(one.values(Var::Y, k), three.values(Var::Y, k));
        }
    }

    #[test]
    fn univariate_copies_are_identical_variables() {
        let d = DrawSet::generate(&DistributionSpec::standard_normal(), 2000, 1).unwrap();
        assert_eq!(d.values(Var::X, 1), d.values(Var::Y, 1));
    }

    #[test]
    fn independent_margins_have_zero_dcov() {
        let dist =
            DistributionSpec::Product(Marginal::standard_normal(), Marginal::standard_normal());
        let est = mc_population_dcov(&dist, 1.0, 200_000, 3).unwrap();
        assert!(est.within(0.0, 3.0), "{est:?}");
    }

    #[test]
    fn rejects_small_mc() {
        assert!(mc_population_dcov(&DistributionSpec::standard_normal(), 1.0, 10, 1).is_err());
    }
}

//! Consistency and comparability factors and the Gaussian efficiency of dStd.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::data::DataMatrix;
use crate::error::{invalid, Result};
use crate::rng::{domain, stream};
use crate::summation::NeumaierSum;
use crate::transforms::{apply_transform, standard_normal, TransformKind, TransformSpec};

use super::distribution::DistributionSpec;
use super::population::{check_mc, combine, DrawSet, McEstimate, PopulationDraws, Var};

/// Default Monte-Carlo size for factors.
pub const DEFAULT_FACTOR_MC: usize = 100_000;

/// Default number of stratified outer points for [`dstd_efficiency`].
pub const DEFAULT_EFFICIENCY_OUTER: usize = 1000;

/// `c = 3π / (4(π − 3√3 + 3))`, for which `c · dVar(X; 1) = σ²` at `N(μ, σ²)`.
pub fn gaussian_consistency_factor() -> f64 {
    3.0 * PI / (4.0 * (PI - 3.0 * 3f64.sqrt() + 3.0))
}

/// `dVar(X; 1)` of the standard normal, `4(π − 3√3 + 3)/(3π)`.
pub fn gaussian_dvar() -> f64 {
    1.0 / gaussian_consistency_factor()
}

type Combiner = Box<dyn Fn(&[f64]) -> f64>;
/// Which comparability factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorKind {
    /// `c_α = dCov(X,Y;1) / dCov(X,Y;α)^{1/α}`
    CAlpha { alpha: f64 },
    /// `v_α = dVar(X;1) / dVar(X;α)^{1/α}`
    VAlpha { alpha: f64 },
    /// `r_α = dCor(X,Y;1) / dCor(X,Y;α)^{1/α}`
    RAlpha { alpha: f64 },
    /// `c_ψ = dCor(X,Y) / dCor(ψ(X),ψ(Y))`
    CPsi { transform: TransformSpec },
}

/// Comparability factor at the reference law `dist`.
///
/// For `c_ψ` the population transform is approximated by applying the sample
/// transform to all `3M` pooled draws of each variable.
pub fn comparability_factor(
    kind: FactorKind,
    dist: &DistributionSpec,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    let alpha = match kind {
        FactorKind::CAlpha { alpha }
        | FactorKind::VAlpha { alpha }
        | FactorKind::RAlpha { alpha } => alpha,
        FactorKind::CPsi { transform } => {
            transform.validate()?;
            1.0
        }
    };
    check_mc(alpha, mc_size)?;
    let draws = DrawSet::generate(dist, mc_size, seed)?;
    match kind {
        FactorKind::CPsi { transform } => {
            let raw = PopulationDraws::from_draws(draws.clone(), 1.0);
            let transformed =
                PopulationDraws::from_draws(pooled_transform(&draws, &transform)?, 1.0);
            let parts = [
                raw.dcov(),
                raw.dvar_x(),
                raw.dvar_y(),
                transformed.dcov(),
                transformed.dvar_x(),
                transformed.dvar_y(),
            ];
            let refs: Vec<_> = parts.iter().collect();
            Ok(combine(&refs, |v| {
                (v[0] / (v[1] * v[2]).sqrt()) / (v[3] / (v[4] * v[5]).sqrt())
            }))
        }
        _ => {
            let one = PopulationDraws::from_draws(draws.clone(), 1.0);
            let at = PopulationDraws::from_draws(draws, alpha);
            let inv = 1.0 / alpha;
            let (parts, g): (Vec<_>, Combiner) = match kind {
                FactorKind::CAlpha { .. } => (
                    vec![one.dcov(), at.dcov()],
                    Box::new(move |v| v[0] / v[1].powf(inv)),
                ),
                FactorKind::VAlpha { .. } => (
                    vec![one.dvar_x(), at.dvar_x()],
                    Box::new(move |v| v[0] / v[1].powf(inv)),
                ),
                _ => (
                    vec![
                        one.dcov(),
                        one.dvar_x(),
                        one.dvar_y(),
                        at.dcov(),
                        at.dvar_x(),
                        at.dvar_y(),
                    ],
                    Box::new(move |v| {
                        (v[0] / (v[1] * v[2]).sqrt()) / (v[3] / (v[4] * v[5]).sqrt()).powf(inv)
                    }),
                ),
            };
            let refs: Vec<_> = parts.iter().collect();
            Ok(combine(&refs, g))
        }
    }
}

/// Apply a sample transform to the pooled `3M` draws of each variable.
fn pooled_transform(draws: &DrawSet, spec: &TransformSpec) -> Result<DrawSet> {
    let (dx, dy) = draws.dims();
    if dx != 1 || dy != 1 {
        return Err(invalid("c_psi is implemented for univariate margins"));
    }
    let pool = |var: Var| -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(3 * draws.len());
        for k in 0..3 {
            v.extend_from_slice(draws.values(var, k));
        }
        Ok(apply_transform(&DataMatrix::from_column(v)?, spec)?
            .as_slice()
            .to_vec())
    };
    let tx = pool(Var::X)?;
    let ty = pool(Var::Y)?;
    Ok(DrawSet::from_pooled(
        draws.len(),
        &tx,
        &ty,
        spec.kind == TransformKind::Biloop,
    ))
}

/// Gaussian efficiency of the consistent scale estimator
/// `√(v_α c) dStd(X; α)^{1/α}` relative to the maximum-likelihood scale.
///
/// With `IF(s, dVar) = −2 dVar + 2 η(s)` and `E η(S) = dVar`, the asymptotic
/// variance is `Var η(S) / (α² dVar²)` and the efficiency `1/(2 ASV)`. The
/// outer expectation uses stratified points `s_k = Φ⁻¹((k − U_k)/K)`; `η(s_k)`
/// is estimated from `mc_size` inner draws shared by all `k`, and the mean of
/// the `η(s_k)` serves as the matching estimate of `dVar`. The standard error
/// is a leave-one-out jackknife over the outer points.
pub fn dstd_efficiency(alpha: f64, mc_size: usize, seed: u64) -> Result<McEstimate> {
    dstd_efficiency_with(alpha, mc_size, DEFAULT_EFFICIENCY_OUTER, seed)
}

/// [`dstd_efficiency`] with an explicit number of outer points.
pub fn dstd_efficiency_with(
    alpha: f64,
    mc_size: usize,
    outer: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_mc(alpha, mc_size)?;
    if outer < 10 {
        return Err(invalid("need at least 10 outer points"));
    }
    let pop = PopulationDraws::new(&DistributionSpec::standard_normal(), alpha, mc_size, seed)?;
    let std = standard_normal();
    let points: Vec<f64> = (0..outer)
        .map(|k| {
            let u: f64 = rand::Rng::random(&mut stream(seed, &[domain::MC_OUTER, k as u64]));
            std.inverse_cdf((k as f64 + 1.0 - u) / outer as f64)
        })
        .collect();
    let eta: Vec<f64> = points.par_iter().map(|&s| pop.eta_xx_value(s)).collect();
    let eff = |sum: f64, sum_sq: f64, k: f64| {
        let mean = sum / k;
        let var = (sum_sq - k * mean * mean) / (k - 1.0);
        alpha * alpha * mean * mean / (2.0 * var)
    };
    let (mut s1, mut s2) = (NeumaierSum::new(), NeumaierSum::new());
    for &e in &eta {
        s1.add(e);
        s2.add(e * e);
    }
    let (t1, t2, k) = (s1.total(), s2.total(), outer as f64);
    let value = eff(t1, t2, k);
    let loo: Vec<f64> = eta
        .iter()
        .map(|&e| eff(t1 - e, t2 - e * e, k - 1.0))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / k;
    let jack_var = (k - 1.0) / k * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>();
    Ok(McEstimate {
        value,
        stderr: jack_var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_factor() {
        assert!((gaussian_consistency_factor() - 2.492_167).abs() < 1e-6);
        assert!((gaussian_dvar() - 0.401_257).abs() < 1e-6);
    }

    #[test]
    fn c_alpha_at_one_is_exactly_one() {
        let est = comparability_factor(
            FactorKind::CAlpha { alpha: 1.0 },
            &DistributionSpec::BivariateNormal { rho: 0.6 },
            5000,
            3,
        )
        .unwrap();
        assert_eq!(est.value, 1.0);
    }
}

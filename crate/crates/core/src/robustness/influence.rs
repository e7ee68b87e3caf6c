//! Influence functions of the dependence functionals, evaluated by Monte Carlo.
//!
//! For contamination at `(s, t)`:
//!
//! * `IF(dCov) = −2 dCov + 2 η(s, t)`,
//! * `IF(dVar) = −2 dVar + 2 η(s, s, X, X)` and `IF(dStd) = IF(dVar) / (2 dStd)`,
//! * `IF(dCor) = 2 η(s,t) / (dStd_X dStd_Y) − dCor (η(s,s,X,X)/dVar_X + η(t,t,Y,Y)/dVar_Y)`,
//!
//! plus the versions after the rank and normal-scores transforms, whose
//! influence functions pick up extra terms because the transforms themselves
//! depend on the contaminated marginals. All grid points of a curve reuse one
//! set of draws, so curves are smooth and differences between points are
//! estimated much more precisely than the points themselves.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::error::{invalid, Error, Result};
use crate::rng::{domain, stream};
use crate::transforms::standard_normal;

use super::distribution::{DistributionSpec, Marginal};
use super::population::{
    check_mc, combine, combine_component, triple_component, Component, DrawSet, McEstimate,
    PopulationDraws, Var, DRAW_CHUNK,
};

/// Functional whose influence function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IfTarget {
    DCov,
    DVar,
    DStd,
    DCor,
    DCovRank,
    DCovNormalScores,
    DCorRank,
    DCorNormalScores,
}

impl IfTarget {
    pub fn name(self) -> &'static str {
        match self {
            IfTarget::DCov => "dcov",
            IfTarget::DVar => "dvar",
            IfTarget::DStd => "dstd",
            IfTarget::DCor => "dcor",
            IfTarget::DCovRank => "dcov_rank",
            IfTarget::DCovNormalScores => "dcov_normal_scores",
            IfTarget::DCorRank => "dcor_rank",
            IfTarget::DCorNormalScores => "dcor_normal_scores",
        }
    }

    fn is_rank(self) -> bool {
        matches!(self, IfTarget::DCovRank | IfTarget::DCorRank)
    }

    fn is_normal_scores(self) -> bool {
        matches!(
            self,
            IfTarget::DCovNormalScores | IfTarget::DCorNormalScores
        )
    }
}

impl fmt::Display for IfTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IfTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        [
            IfTarget::DCov,
            IfTarget::DVar,
            IfTarget::DStd,
            IfTarget::DCor,
            IfTarget::DCovRank,
            IfTarget::DCovNormalScores,
            IfTarget::DCorRank,
            IfTarget::DCorNormalScores,
        ]
        .into_iter()
        .find(|t| t.name() == key)
        .ok_or_else(|| invalid(format!("unknown influence-function target '{s}'")))
    }
}

/// One curve of influence-function values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IFGridResult {
    pub target: IfTarget,
    pub alpha: f64,
    pub mc_size: usize,
    pub seed: u64,
    /// Whether values are for the unit-comparable functional
    /// `k_α T(α)^{1/α}` with `k_α = T(1)/T(α)^{1/α}`.
    pub comparable: bool,
    pub grid: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub mc_stderr: Vec<f64>,
}

/// Evenly spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Evaluator sharing one set of draws across many contamination points.
pub struct InfluenceEvaluator {
    target: IfTarget,
    alpha: f64,
    pop: PopulationDraws,
    base: Vec<Component>,
    extra: Option<TransformedParts>,
}

/// Pieces needed by the rank and normal-scores targets.
struct TransformedParts {
    /// Draws after the marginal CDFs (`U = F_X(X)`, `V = F_Y(Y)`), α = 1.
    ranks: Option<PopulationDraws>,
    fx: Marginal,
    fy: Marginal,
    /// `|X′ − X″|` and `|Y′ − Y″|` (normal scores only).
    x12: Vec<f64>,
    y12: Vec<f64>,
    /// Correlation of the bivariate normal model (normal scores only).
    rho: f64,
    /// Uniform and standard normal draws for the conditional line integrals.
    line_u: Vec<f64>,
    line_z: Vec<f64>,
}

impl InfluenceEvaluator {
    pub fn new(
        target: IfTarget,
        dist: &DistributionSpec,
        alpha: f64,
        mc_size: usize,
        seed: u64,
    ) -> Result<Self> {
        check_mc(alpha, mc_size)?;
        dist.check_moments(alpha)?;
        if (target.is_rank() || target.is_normal_scores()) && alpha != 1.0 {
            return Err(Error::Unsupported(format!(
                "{target} influence function is available for alpha = 1 only"
            )));
        }
        let (fx, fy) = if target.is_rank() {
            match (dist.x_marginal(), dist.y_marginal()) {
                (Some(fx), Some(fy)) => (fx, fy),
                _ => {
                    return Err(Error::Unsupported(format!(
                        "{target} needs univariate margins with known distribution functions"
                    )))
                }
            }
        } else if target.is_normal_scores() {
            if !matches!(dist, DistributionSpec::BivariateNormal { .. }) {
                return Err(Error::Unsupported(format!(
                    "{target} influence function is derived for the standard bivariate normal only"
                )));
            }
            (Marginal::standard_normal(), Marginal::standard_normal())
        } else {
            (Marginal::standard_normal(), Marginal::standard_normal())
        };
        let draws = DrawSet::generate(dist, mc_size, seed)?;
        let extra = if target.is_rank() {
            let mapped = draws.map(|x| fx.cdf(x), |y| fy.cdf(y));
            Some(TransformedParts {
                ranks: Some(PopulationDraws::from_draws(mapped, 1.0)),
                fx,
                fy,
                x12: Vec::new(),
                y12: Vec::new(),
                rho: 0.0,
                line_u: Vec::new(),
                line_z: Vec::new(),
            })
        } else if target.is_normal_scores() {
            let rho = match dist {
                DistributionSpec::BivariateNormal { rho } => *rho,
                _ => unreachable!("checked above"),
            };
            let (line_u, line_z) = line_draws(mc_size, seed);
            Some(TransformedParts {
                ranks: None,
                fx,
                fy,
                x12: draws.copy_distances(Var::X, 1, 2, 1.0),
                y12: draws.copy_distances(Var::Y, 1, 2, 1.0),
                rho,
                line_u,
                line_z,
            })
        } else {
            None
        };
        let pop = PopulationDraws::from_draws(draws, alpha);
        let base = match target {
            IfTarget::DCov | IfTarget::DCovNormalScores => vec![pop.dcov()],
            IfTarget::DVar | IfTarget::DStd => vec![pop.dvar_x()],
            IfTarget::DCor | IfTarget::DCorNormalScores => {
                vec![pop.dcov(), pop.dvar_x(), pop.dvar_y()]
            }
            IfTarget::DCovRank => {
                let r = extra
                    .as_ref()
                    .and_then(|e| e.ranks.as_ref())
                    .expect("rank draws");
                vec![r.dcov()]
            }
            IfTarget::DCorRank => {
                let r = extra
                    .as_ref()
                    .and_then(|e| e.ranks.as_ref())
                    .expect("rank draws");
                vec![r.dcov(), r.dvar_x(), r.dvar_y()]
            }
        };
        Ok(Self {
            target,
            alpha,
            pop,
            base,
            extra,
        })
    }

    pub fn target(&self) -> IfTarget {
        self.target
    }

    /// The functional itself at the model (dCov, dVar, dStd or dCor of the
    /// possibly transformed variables).
    pub fn functional(&self) -> McEstimate {
        let b: Vec<&Component> = self.base.iter().collect();
        match self.target {
            IfTarget::DCov | IfTarget::DCovRank | IfTarget::DCovNormalScores | IfTarget::DVar => {
                self.base[0].estimate()
            }
            IfTarget::DStd => combine(&b, |t| t[0].sqrt()),
            IfTarget::DCor | IfTarget::DCorRank | IfTarget::DCorNormalScores => {
                combine(&b, |t| t[0] / (t[1] * t[2]).sqrt())
            }
        }
    }

    /// Influence function at `(s, t)`; `t` is ignored for dVar and dStd.
    pub fn at(&self, s: f64, t: f64) -> McEstimate {
        self.at_component(s, t).estimate()
    }

    /// `IF(p₁) − IF(p₂)` with the standard error of the difference. Because
    /// both points use the same draws, this is far more precise than the
    /// individual values.
    pub fn difference(&self, p1: (f64, f64), p2: (f64, f64)) -> McEstimate {
        let a = self.at_component(p1.0, p1.1);
        let b = self.at_component(p2.0, p2.1);
        combine_component(&[&a, &b], |v| v[0] - v[1]).estimate()
    }

    fn at_component(&self, s: f64, t: f64) -> Component {
        match self.target {
            IfTarget::DCov => {
                let eta = self.pop.eta_xy(s, t);
                combine_component(&[&self.base[0], &eta], |v| -2.0 * v[0] + 2.0 * v[1])
            }
            IfTarget::DVar => {
                let eta = self.pop.eta_xx(s);
                combine_component(&[&self.base[0], &eta], |v| -2.0 * v[0] + 2.0 * v[1])
            }
            IfTarget::DStd => {
                let eta = self.pop.eta_xx(s);
                combine_component(&[&self.base[0], &eta], |v| {
                    (-2.0 * v[0] + 2.0 * v[1]) / (2.0 * v[0].sqrt())
                })
            }
            IfTarget::DCor => {
                let exy = self.pop.eta_xy(s, t);
                let exx = self.pop.eta_xx(s);
                let eyy = self.pop.eta_yy(t);
                let b = &self.base;
                combine_component(&[&b[0], &b[1], &b[2], &exy, &exx, &eyy], |v| {
                    let sd = (v[1] * v[2]).sqrt();
                    2.0 * v[3] / sd - v[0] / sd * (v[4] / v[1] + v[5] / v[2])
                })
            }
            IfTarget::DCovRank => {
                let parts = self.rank_dcov_parts(s, t);
                let refs: Vec<&Component> = std::iter::once(&self.base[0]).chain(&parts).collect();
                combine_component(&refs, |v| -4.0 * v[0] + 2.0 * v[1] + v[2] + v[3])
            }
            IfTarget::DCorRank => {
                let p = self.rank_dcov_parts(s, t);
                let (vx_extra, vy_extra) = self.rank_dvar_parts(s, t);
                let b = &self.base;
                let refs = [
                    &b[0],
                    &b[1],
                    &b[2],
                    &p[0],
                    &p[1],
                    &p[2],
                    &vx_extra[0],
                    &vx_extra[1],
                    &vy_extra[0],
                    &vy_extra[1],
                ];
                combine_component(&refs, |v| {
                    let if_c = -4.0 * v[0] + 2.0 * v[3] + v[4] + v[5];
                    let if_vx = -4.0 * v[1] + 2.0 * v[6] + 2.0 * v[7];
                    let if_vy = -4.0 * v[2] + 2.0 * v[8] + 2.0 * v[9];
                    dcor_from_ifs(v[0], v[1], v[2], if_c, if_vx, if_vy)
                })
            }
            IfTarget::DCovNormalScores => {
                let exy = self.pop.eta_xy(s, t);
                let (px, py) = self.ns_cross_terms(s, t, false);
                let refs: Vec<&Component> = [&self.base[0], &exy]
                    .into_iter()
                    .chain(&px)
                    .chain(&py)
                    .collect();
                combine_component(&refs, |v| {
                    -2.0 * v[0]
                        + 2.0 * v[1]
                        + 2.0 * ns_cross(&v[2..7], s)
                        + 2.0 * ns_cross(&v[7..12], t)
                })
            }
            IfTarget::DCorNormalScores => {
                let exy = self.pop.eta_xy(s, t);
                let exx = self.pop.eta_xx(s);
                let eyy = self.pop.eta_yy(t);
                let (px, py) = self.ns_cross_terms(s, t, false);
                let (qx, qy) = self.ns_cross_terms(s, t, true);
                let b = &self.base;
                let refs: Vec<&Component> = [&b[0], &b[1], &b[2], &exy, &exx, &eyy]
                    .into_iter()
                    .chain(&px)
                    .chain(&py)
                    .chain(&qx)
                    .chain(&qy)
                    .collect();
                combine_component(&refs, |v| {
                    let if_c = -2.0 * v[0]
                        + 2.0 * v[3]
                        + 2.0 * ns_cross(&v[6..11], s)
                        + 2.0 * ns_cross(&v[11..16], t);
                    let if_vx = -2.0 * v[1] + 2.0 * v[4] + 4.0 * ns_cross(&v[16..21], s);
                    let if_vy = -2.0 * v[2] + 2.0 * v[5] + 4.0 * ns_cross(&v[21..26], t);
                    dcor_from_ifs(v[0], v[1], v[2], if_c, if_vx, if_vy)
                })
            }
        }
    }

    /// `[η(F_X(s), F_Y(t), U, V), dCov(I(X≥s), V), dCov(I(Y≥t), U)]`.
    fn rank_dcov_parts(&self, s: f64, t: f64) -> [Component; 3] {
        let e = self.extra.as_ref().expect("rank parts");
        let r = e.ranks.as_ref().expect("rank draws");
        let (ua, uc, vb, vc) = r.copy_terms();
        let eta = r.eta_xy(e.fx.cdf(s), e.fy.cdf(t));
        let ix = self.indicator_distances(Var::X, s);
        let iy = self.indicator_distances(Var::Y, t);
        [
            eta,
            triple_component(&ix, vb, vc),
            triple_component(&iy, ua, uc),
        ]
    }

    /// `([η(F(s),F(s),U,U), dCov(I(X≥s),U)], [η(F(t),F(t),V,V), dCov(I(Y≥t),V)])`.
    fn rank_dvar_parts(&self, s: f64, t: f64) -> ([Component; 2], [Component; 2]) {
        let e = self.extra.as_ref().expect("rank parts");
        let r = e.ranks.as_ref().expect("rank draws");
        let (ua, uc, vb, vc) = r.copy_terms();
        let ix = self.indicator_distances(Var::X, s);
        let iy = self.indicator_distances(Var::Y, t);
        (
            [r.eta_xx(e.fx.cdf(s)), triple_component(&ix, ua, uc)],
            [r.eta_yy(e.fy.cdf(t)), triple_component(&iy, vb, vc)],
        )
    }

    /// Per-draw `|I(V ≥ s) − I(V′ ≥ s)|`.
    fn indicator_distances(&self, var: Var, s: f64) -> Vec<f64> {
        let d = self.pop.draws();
        let (a, b) = (d.values(var, 0), d.values(var, 1));
        a.iter()
            .zip(b)
            .map(|(&u, &v)| ((u >= s) != (v >= s)) as u8 as f64)
            .collect()
    }

    /// Components for the two normal-score cross terms
    /// `E[sign(X−X′) w_s(X) (|Y−Y′| + E|Y−Y′| − |Y−Y″| − |Y′−Y″|)]`
    /// and its mirror image in `Y`. With `same = true` the partner variable
    /// is the variable itself (the dVar case). See [`ns_cross`].
    fn ns_cross_terms(&self, s: f64, t: f64, same: bool) -> ([Component; 5], [Component; 5]) {
        let (x_partner, y_partner) = if same {
            (Var::X, Var::Y)
        } else {
            (Var::Y, Var::X)
        };
        (
            self.ns_term(Var::X, x_partner, s),
            self.ns_term(Var::Y, y_partner, t),
        )
    }

    /// With `h = |W−W′| − |W−W″| − |W′−W″|` for the partner `W` and
    /// `w_s = m + [I(s≤x<0) − I(0≤x<s)]/φ`, where `m` is the bounded Mills
    /// part, the cross term equals `P + Q·B − s (L + R·B)` with
    ///
    /// * `P = E[sign(V−V′) m(V) h]`, `Q = E[sign(V−V′) m(V)]`, `B = E|W−W′|`,
    /// * `L = E[sign(x−V′) h | V = x]`, `R = E[sign(x−V′) | V = x]` averaged
    ///   over `x = s·U`, `U ~ U(0,1)`, using the conditional law of the
    ///   partner given `V = x`.
    ///
    /// The split keeps the `1/φ` factor, whose second moment grows like
    /// `e^{s²}`, out of the Monte-Carlo weights.
    fn ns_term(&self, var: Var, partner: Var, s: f64) -> [Component; 5] {
        let e = self.extra.as_ref().expect("normal-score parts");
        let d = self.pop.draws();
        let (v0, v1) = (d.values(var, 0), d.values(var, 1));
        let (w0, w1, w2) = (
            d.values(partner, 0),
            d.values(partner, 1),
            d.values(partner, 2),
        );
        let cross = match partner {
            Var::X => &e.x12,
            Var::Y => &e.y12,
        };
        let m = v0.len();
        let mut p = Vec::with_capacity(m);
        let mut q = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut l = Vec::with_capacity(m);
        let mut r = Vec::with_capacity(m);
        let comp = (1.0 - e.rho * e.rho).max(0.0).sqrt();
        for i in 0..m {
            let first = (w0[i] - w1[i]).abs();
            let h = first - (w0[i] - w2[i]).abs() - cross[i];
            let weight = sign(v0[i] - v1[i]) * mills(v0[i]);
            p.push(weight * h);
            q.push(weight);
            b.push(first);
            // a draw of (V, W) conditional on V = x
            let x = s * e.line_u[i];
            let w = if var == partner {
                x
            } else {
                e.rho * x + comp * e.line_z[i]
            };
            let sg = sign(x - v1[i]);
            l.push(sg * ((w - w1[i]).abs() - (w - w2[i]).abs() - cross[i]));
            r.push(sg);
        }
        [
            Component::mean_of(p),
            Component::mean_of(q),
            Component::mean_of(b),
            Component::mean_of(l),
            Component::mean_of(r),
        ]
    }

    /// Influence function over a grid of contamination points.
    pub fn curve(&self, grid: &[(f64, f64)], comparable: Option<f64>) -> Vec<McEstimate> {
        let k = comparable.unwrap_or(1.0);
        grid.iter()
            .map(|&(s, t)| {
                let e = self.at(s, t);
                McEstimate {
                    value: k * e.value,
                    stderr: k * e.stderr,
                }
            })
            .collect()
    }

    /// Factor turning `IF(T(α))` into `IF(k_α T(α)^{1/α})` with
    /// `k_α = T(1)/T(α)^{1/α}`; it equals `T(1) / (α T(α))`.
    pub fn comparable_factor(&self) -> Result<f64> {
        if self.alpha == 1.0 {
            return Ok(1.0);
        }
        let at_one = InfluenceEvaluator {
            target: self.target,
            alpha: 1.0,
            pop: PopulationDraws::from_draws(self.pop.draws().clone(), 1.0),
            base: Vec::new(),
            extra: None,
        };
        let t1 = at_one.functional_from_scratch();
        let ta = self.functional().value;
        if !(ta > 0.0 && t1 > 0.0) {
            return Err(Error::Unsupported(
                "comparable scaling needs a positive functional at the model".into(),
            ));
        }
        Ok(t1 / (self.alpha * ta))
    }

    fn functional_from_scratch(&self) -> f64 {
        let p = &self.pop;
        match self.target {
            IfTarget::DVar => p.dvar_x().value,
            IfTarget::DStd => p.dvar_x().value.sqrt(),
            IfTarget::DCor => p.dcov().value / (p.dvar_x().value * p.dvar_y().value).sqrt(),
            _ => p.dcov().value,
        }
    }
}

/// Uniform and standard normal draws, chunked like the main draws but from the
/// `MC_LINE` streams.
fn line_draws(m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let chunks = m.div_ceil(DRAW_CHUNK);
    let parts: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = DRAW_CHUNK.min(m - c * DRAW_CHUNK);
            let mut rng = stream(seed, &[domain::MC_LINE, c as u64]);
            (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (u, z)
                })
                .collect()
        })
        .collect();
    parts.into_iter().flatten().unzip()
}

/// `IF(dCor)` from the influence functions of its parts.
fn dcor_from_ifs(c: f64, vx: f64, vy: f64, if_c: f64, if_vx: f64, if_vy: f64) -> f64 {
    let sd = (vx * vy).sqrt();
    if_c / sd - c / sd * 0.5 * (if_vx / vx + if_vy / vy)
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bounded part of `(I(x ≥ s) − Φ(x)) / φ(x)`: `(1 − Φ(x))/φ(x)` for `x ≥ 0`
/// and `−Φ(x)/φ(x)` for `x < 0`.
fn mills(x: f64) -> f64 {
    let n = standard_normal();
    let num = if x >= 0.0 { n.sf(x) } else { -n.cdf(x) };
    num / n.pdf(x)
}

/// Assemble a normal-score cross term from `[P, Q, B, L, R]` (see
/// `InfluenceEvaluator::ns_term`).
fn ns_cross(v: &[f64], s: f64) -> f64 {
    v[0] + v[1] * v[2] - s * (v[3] + v[4] * v[2])
}

/// Influence function curve of `target` over `grid`.
///
/// With `comparable = true` the values refer to `k_α T^{1/α}`, which has the
/// units of the α = 1 functional and the same value at the model.
pub fn if_curve(
    target: IfTarget,
    grid: &[(f64, f64)],
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
    comparable: bool,
) -> Result<IFGridResult> {
    let ev = InfluenceEvaluator::new(target, dist, alpha, mc_size, seed)?;
    let factor = if comparable {
        Some(ev.comparable_factor()?)
    } else {
        None
    };
    let est = ev.curve(grid, factor);
    Ok(IFGridResult {
        target,
        alpha,
        mc_size,
        seed,
        comparable,
        grid: grid.to_vec(),
        values: est.iter().map(|e| e.value).collect(),
        mc_stderr: est.iter().map(|e| e.stderr).collect(),
    })
}

fn single(
    target: IfTarget,
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(InfluenceEvaluator::new(target, dist, alpha, mc_size, seed)?.at(s, t))
}

/// `IF((s,t), dCov(·,·;α), F)`.
pub fn if_dcov(
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DCov, s, t, dist, alpha, mc_size, seed)
}

/// `IF(s, dVar(·;α), F_X)`.
pub fn if_dvar(
    s: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DVar, s, s, dist, alpha, mc_size, seed)
}

/// `IF(s, dStd(·;α), F_X)`.
pub fn if_dstd(
    s: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DStd, s, s, dist, alpha, mc_size, seed)
}

/// `IF((s,t), dCor(·,·;α), F)`.
pub fn if_dcor(
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    alpha: f64,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DCor, s, t, dist, alpha, mc_size, seed)
}

/// `IF((s,t), dCov(F_X(X), F_Y(Y)), F)`.
pub fn if_dcov_rank(
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DCovRank, s, t, dist, 1.0, mc_size, seed)
}

/// `IF((s,t), dCov(Φ⁻¹(F_X(X)), Φ⁻¹(F_Y(Y))), F)` for bivariate normal `F`.
pub fn if_dcov_normal_scores(
    s: f64,
    t: f64,
    dist: &DistributionSpec,
    mc_size: usize,
    seed: u64,
) -> Result<McEstimate> {
    single(IfTarget::DCovNormalScores, s, t, dist, 1.0, mc_size, seed)
}

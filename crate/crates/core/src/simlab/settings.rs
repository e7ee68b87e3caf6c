//! Data-generating settings for the power and robustness simulations.
//!
//! The ten bivariate settings draw `X ~ U(−1, 1)` and set
//! `Y = f(X) + noise · σ_f · ε` with `σ_f` the sample standard deviation of
//! `f(X)`, except `square` and `circle`, which perturb points on a closed
//! curve by isotropic `noise · ε`. The six multivariate settings live in
//! `ℝ⁵ × ℝ⁵`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::rng::StreamRng;
use crate::robustness::distribution::DistributionSpec;

/// Default relative noise level of the bivariate settings.
pub const DEFAULT_NOISE: f64 = 0.25;

/// Default off-diagonal block entry of the multivariate covariance `S`.
pub const DEFAULT_CROSS: f64 = 0.1;

/// Dimension of each variable in the multivariate settings.
pub const MV_DIM: usize = 5;

/// A named data-generating mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Setting {
    Quadratic,
    Cubic,
    Logarithm,
    Exponential,
    Sine,
    FourthRoot,
    Step,
    Square,
    Cosine,
    Circle,
    MvNormal,
    MvT3,
    MvT2,
    MvT1,
    Multiplicative,
    LogSquared,
    /// Standard bivariate normal with correlation `rho`.
    BivariateNormal {
        rho: f64,
    },
    /// Bivariate t with `nu` degrees of freedom and scale `[[1, rho], [rho, 1]]`.
    BivariateT {
        nu: f64,
        rho: f64,
    },
}

impl Setting {
    /// The sixteen settings of the power study.
    pub const POWER_STUDY: [Setting; 16] = [
        Setting::Quadratic,
        Setting::Cubic,
        Setting::Logarithm,
        Setting::Exponential,
        Setting::Sine,
        Setting::FourthRoot,
        Setting::Step,
        Setting::Square,
        Setting::Cosine,
        Setting::Circle,
        Setting::MvNormal,
        Setting::MvT3,
        Setting::MvT2,
        Setting::MvT1,
        Setting::Multiplicative,
        Setting::LogSquared,
    ];

    pub fn label(&self) -> String {
        match self {
            Setting::Quadratic => "quadratic".into(),
            Setting::Cubic => "cubic".into(),
            Setting::Logarithm => "logarithm".into(),
            Setting::Exponential => "exponential".into(),
            Setting::Sine => "sine".into(),
            Setting::FourthRoot => "fourth_root".into(),
            Setting::Step => "step".into(),
            Setting::Square => "square".into(),
            Setting::Cosine => "cosine".into(),
            Setting::Circle => "circle".into(),
            Setting::MvNormal => "mv_normal".into(),
            Setting::MvT3 => "mv_t3".into(),
            Setting::MvT2 => "mv_t2".into(),
            Setting::MvT1 => "mv_t1".into(),
            Setting::Multiplicative => "multiplicative".into(),
            Setting::LogSquared => "log_squared".into(),
            Setting::BivariateNormal { rho } => format!("bivariate_normal(rho={rho})"),
            Setting::BivariateT { nu, rho } => format!("bivariate_t(nu={nu},rho={rho})"),
        }
    }

    pub fn parse_name(name: &str) -> Result<Self> {
        Setting::POWER_STUDY
            .into_iter()
            .find(|s| s.label() == name)
            .ok_or_else(|| invalid(format!("unknown setting '{name}'")))
    }

    /// Functional relation of the curve-type bivariate settings.
    fn relation(&self) -> Option<fn(f64) -> f64> {
        Some(match self {
            Setting::Quadratic => |x| x * x,
            Setting::Cubic => |x| x * x * x,
            Setting::Logarithm => |x: f64| (x.abs() + 0.1).ln(),
            Setting::Exponential => |x: f64| (2.0 * x).exp(),
            Setting::Sine => |x: f64| (4.0 * PI * x).sin(),
            Setting::FourthRoot => |x: f64| x.abs().powf(0.25),
            Setting::Step => |x| if x > 0.0 { 1.0 } else { 0.0 },
            Setting::Cosine => |x: f64| (2.0 * PI * x).cos(),
            _ => return None,
        })
    }
}

/// One setting at a sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingSpec {
    #[serde(flatten)]
    pub setting: Setting,
    pub n: usize,
    /// Relative noise level of the bivariate settings.
    #[serde(default = "default_noise")]
    pub noise: f64,
    /// Off-diagonal block entry of `S` in the multivariate normal/t settings;
    /// zero gives independence.
    #[serde(default = "default_cross")]
    pub cross: f64,
}

fn default_noise() -> f64 {
    DEFAULT_NOISE
}

fn default_cross() -> f64 {
    DEFAULT_CROSS
}

impl SettingSpec {
    pub fn new(setting: Setting, n: usize) -> Self {
        Self {
            setting,
            n,
            noise: DEFAULT_NOISE,
            cross: DEFAULT_CROSS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewObservations {
                required: 2,
                got: self.n,
            });
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(invalid(format!(
                "noise must be non-negative, got {}",
                self.noise
            )));
        }
        Ok(())
    }

    /// `S = [I₅, cross·11ᵀ; cross·11ᵀ, I₅]`.
    pub fn mv_covariance(&self) -> Vec<Vec<f64>> {
        let k = 2 * MV_DIM;
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            1.0
                        } else if (i < MV_DIM) != (j < MV_DIM) {
                            self.cross
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// The joint law for the distribution-type settings.
    pub fn distribution(&self) -> Option<DistributionSpec> {
        let mvt = |nu: f64| DistributionSpec::MultivariateT {
            nu,
            scale: self.mv_covariance(),
            dim_x: MV_DIM,
        };
        Some(match self.setting {
            Setting::MvNormal => DistributionSpec::MultivariateNormal {
                cov: self.mv_covariance(),
                dim_x: MV_DIM,
            },
            Setting::MvT3 => mvt(3.0),
            Setting::MvT2 => mvt(2.0),
            Setting::MvT1 => mvt(1.0),
            Setting::BivariateNormal { rho } => DistributionSpec::BivariateNormal { rho },
            Setting::BivariateT { nu, rho } => DistributionSpec::MultivariateT {
                nu,
                scale: vec![vec![1.0, rho], vec![rho, 1.0]],
                dim_x: 1,
            },
            _ => return None,
        })
    }
}

/// Draw one sample of the setting from `rng`.
pub fn generate_setting_with(
    spec: &SettingSpec,
    rng: &mut StreamRng,
) -> Result<(DataMatrix, DataMatrix)> {
    spec.validate()?;
    let n = spec.n;
    if let Some(dist) = spec.distribution() {
        return dist.sampler()?.sample_matrix(n, rng);
    }
    if let Some(f) = spec.setting.relation() {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fx: Vec<f64> = x.iter().map(|&v| f(v)).collect();
        let mean = fx.iter().sum::<f64>() / n as f64;
        let sd = (fx.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let y: Vec<f64> = fx
            .iter()
            .map(|&v| {
                let e: f64 = StandardNormal.sample(rng);
                v + spec.noise * sd * e
            })
            .collect();
        return Ok((DataMatrix::from_column(x)?, DataMatrix::from_column(y)?));
    }
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    match spec.setting {
        Setting::Circle | Setting::Square => {
            for _ in 0..n {
                let (px, py) = if spec.setting == Setting::Circle {
                    let theta = rng.random_range(0.0..2.0 * PI);
                    (theta.cos(), theta.sin())
                } else {
                    perimeter_point(rng.random_range(0.0..8.0))
                };
                let ex: f64 = StandardNormal.sample(rng);
                let ey: f64 = StandardNormal.sample(rng);
                x.push(px + spec.noise * ex);
                y.push(py + spec.noise * ey);
            }
            Ok((DataMatrix::from_column(x)?, DataMatrix::from_column(y)?))
        }
        Setting::Multiplicative | Setting::LogSquared => {
            for _ in 0..n * MV_DIM {
                let xv: f64 = StandardNormal.sample(rng);
                x.push(xv);
                y.push(if spec.setting == Setting::Multiplicative {
                    let e: f64 = StandardNormal.sample(rng);
                    xv * e
                } else {
                    (xv * xv).ln()
                });
            }
            Ok((
                DataMatrix::new(x, n, MV_DIM)?,
                DataMatrix::new(y, n, MV_DIM)?,
            ))
        }
        _ => unreachable!("every setting is covered above"),
    }
}

/// Point at arc length `a ∈ [0, 8)` along the boundary of `[−1, 1]²`.
fn perimeter_point(a: f64) -> (f64, f64) {
    match a {
        a if a < 2.0 => (-1.0 + a, -1.0),
        a if a < 4.0 => (1.0, -1.0 + (a - 2.0)),
        a if a < 6.0 => (1.0 - (a - 4.0), 1.0),
        a => (-1.0, 1.0 - (a - 6.0)),
    }
}

/// Draw one sample of the setting from the stream `(seed, [SETTING])`.
pub fn generate_setting(spec: &SettingSpec, seed: u64) -> Result<(DataMatrix, DataMatrix)> {
    let mut rng = crate::rng::stream(seed, &[crate::rng::domain::SETTING]);
    generate_setting_with(spec, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_setting_generates_finite_data() {
        for s in Setting::POWER_STUDY {
            let (x, y) = generate_setting(&SettingSpec::new(s, 50), 1).unwrap();
            assert_eq!(x.n(), 50);
            assert_eq!(y.n(), 50);
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Setting::POWER_STUDY {
            assert_eq!(Setting::parse_name(&s.label()).unwrap(), s);
        }
    }

    #[test]
    fn noiseless_circle_lies_on_the_circle() {
        let mut spec = SettingSpec::new(Setting::Circle, 200);
        spec.noise = 0.0;
        let (x, y) = generate_setting(&spec, 4).unwrap();
        for i in 0..200 {
            assert!((x.get(i, 0).powi(2) + y.get(i, 0).powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_square_lies_on_the_boundary() {
        let mut spec = SettingSpec::new(Setting::Square, 100);
        spec.noise = 0.0;
        let (x, y) = generate_setting(&spec, 4).unwrap();
        for i in 0..100 {
            let m = x.get(i, 0).abs().max(y.get(i, 0).abs());
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let spec = SettingSpec::new(Setting::MvT3, 30);
        assert_eq!(
            generate_setting(&spec, 9).unwrap(),
            generate_setting(&spec, 9).unwrap()
        );
        assert_ne!(
            generate_setting(&spec, 9).unwrap(),
            generate_setting(&spec, 10).unwrap()
        );
    }

    #[test]
    fn multivariate_shapes() {
        let (x, y) = generate_setting(&SettingSpec::new(Setting::LogSquared, 10), 2).unwrap();
        assert_eq!((x.dim(), y.dim()), (5, 5));
        for i in 0..10 {
            assert!((y.get(i, 2) - x.get(i, 2).powi(2).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn parses_from_toml() {
        let spec: SettingSpec =
            toml::from_str("name = \"bivariate_normal\"\nrho = 0.6\nn = 40").unwrap();
        assert_eq!(spec.setting, Setting::BivariateNormal { rho: 0.6 });
        assert_eq!(spec.noise, DEFAULT_NOISE);
        let spec: SettingSpec = toml::from_str("name = \"circle\"\nn = 40\nnoise = 0.1").unwrap();
        assert_eq!(spec.setting, Setting::Circle);
    }
}

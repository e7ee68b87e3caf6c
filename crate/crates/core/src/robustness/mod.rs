//! Population-level robustness: Monte-Carlo dependence functionals, influence
//! functions, consistency factors and efficiency, and finite-sample
//! sensitivity and breakdown diagnostics.

pub mod distribution;
pub mod factors;
pub mod finite;
pub mod influence;
pub mod population;

pub use distribution::{DistributionSpec, JointSampler, Marginal};
pub use factors::{comparability_factor, dstd_efficiency, gaussian_consistency_factor, FactorKind};
pub use finite::{
    base_quantile_sample, breakdown_curve, breakdown_prediction_dvar, dcor_outlier_limit,
    dvar_sensitivity_curve, sensitivity_curve, CurvePoint,
};
pub use influence::{
    if_curve, if_dcor, if_dcov, if_dcov_normal_scores, if_dcov_rank, if_dstd, if_dvar, linspace,
    IFGridResult, IfTarget, InfluenceEvaluator,
};
pub use population::{mc_eta, mc_population_dcov, mc_population_dvar, McEstimate};

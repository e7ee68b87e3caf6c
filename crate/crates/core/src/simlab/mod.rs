//! Simulation laboratory: data-generating settings, contamination, and the
//! power, bias and false-rejection experiments.

pub mod contamination;
pub mod experiment;
pub mod settings;

pub use contamination::{contaminate, ContaminationKind, ContaminationSpec};
pub use experiment::{
    run_bias_experiment, run_experiment, run_power_experiment, run_rejection_experiment,
    ExperimentConfig, ExperimentKind, ExperimentResult, ResultRow, Sweep, SweepParameter,
};
pub use settings::{generate_setting, Setting, SettingSpec};

//! Distance covariance and correlation with robust marginal transforms.
//!
//! The crate provides the sample estimators ([`estimators`]), the rank,
//! normal-score and biloop transforms ([`transforms`]), permutation tests of
//! independence ([`inference`]), population-level robustness diagnostics
//! ([`robustness`]), a simulation laboratory ([`simlab`]) and data input and
//! screening utilities ([`io`], [`scan`]).

pub mod data;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod parallel;
pub mod rng;
pub mod robustness;
pub mod scan;
pub mod simlab;
pub mod summation;
pub mod transforms;

pub use data::DataMatrix;
pub use error::{Error, Result};
pub use estimators::{
    sample_dcor, sample_dcov, sample_dstd, sample_dvar, CenteredDistanceMatrix, DependenceKind,
    DependenceValue, DistanceMatrix,
};
pub use inference::{permutation_independence_test, MethodSpec, TestResult};
pub use io::{read_csv, CsvOptions, Dataset, Response};
pub use scan::{dc_scatter, scan, write_dc_scatter, DcScatter, ScanResult};
pub use transforms::{apply_transform, TransformKind, TransformSpec};

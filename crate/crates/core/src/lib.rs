//! Deterministic surrogate-based global optimization for expensive black-box
//! functions.
//!
//! The crate provides inverse distance weighting (IDW) and radial basis
//! function (RBF) surrogates, the exploration-aware acquisition function built
//! on top of them, and two nonmyopic acquisition objectives: a single-branch
//! rollout and a multi-step scenario tree over fantasized observations.
//! Everything here is `no_std` + `alloc`; IO, configuration and the
//! experiment driver live in the `nmgo` companion crate.
//!
//! ```
//! use nmgo_core::{Dataset, SearchSpace, IdwModel, Surrogate};
//!
//! let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
//! let mut data = Dataset::new(space);
//! data.push(&[0.0], 0.0).unwrap();
//! data.push(&[1.0], 1.0).unwrap();
//! let model = Surrogate::Idw(IdwModel::new(data, 1e-12).unwrap());
//! assert!((model.predict(&[0.5]) - 0.5).abs() < 1e-12);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]
#![deny(missing_docs)]
// `!(a > b)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod acquisition;
pub mod benchmarks;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod lookahead;
pub mod qmc;
pub mod random;
pub mod solver;
pub mod space;
pub mod surrogate;

pub use acquisition::{
    expected_variance, myopic_acquisition, stochastic_acquisition, AcquisitionParams,
    GaussHermiteRule,
};
pub use benchmarks::{get_problem, BenchmarkProblem, PROBLEM_NAMES};
pub use dataset::{Dataset, DUP_TOL};
pub use error::{Error, Result};
pub use lookahead::{
    evaluate_multistep_objective, evaluate_rollout_objective, next_query, sample_posterior, Draws,
    HorizonPlan, LookaheadConfig, SamplingKind, SamplingScheme, Strategy,
};
pub use random::{RandomStream, StreamLabel, StreamRng};
pub use solver::{minimize_box, Minimum, SolveConfig};
pub use space::SearchSpace;
pub use surrogate::{IdwModel, Kernel, RbfConfig, RbfState, Surrogate, SurrogateKind, UpdateKind};

//! Coordinate-descent Bayesian optimisation (CDBO) of kernel-feature control
//! policies.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`]: Matérn and squared-exponential kernels with ARD scales.
//! * [`gp`]: zero-mean GP regression with jittered Cholesky, online updates
//!   and marginal-likelihood hyperparameter search.
//! * [`policy`]: inducing-point feature maps, policies and the ridge fit of a
//!   demonstration.
//! * [`search`]: acquisition functions, bounded 1-D maximisation, stochastic
//!   coordinate ascent and the CDBO loop.
//! * [`baselines`]: CMA-ES, BO with a CMA-ES acquisition optimiser, REMBO and
//!   random search.
//! * [`racesim`]: a deterministic longitudinal lap simulator producing the
//!   average-speed reward.
//! * [`harness`]: experiment configuration, seeded runs, aggregation and
//!   output files.

pub mod baselines;
pub mod error;
pub mod gp;
pub mod harness;
pub mod kernel;
pub mod policy;
pub mod racesim;
pub mod search;
pub mod trace;

pub use error::{Error, Result};
pub use gp::{GpModel, HyperBounds};
pub use kernel::{KernelFamily, KernelSpec};
pub use policy::{Demonstration, FeatureMap, Policy};
pub use racesim::{CarParams, EpisodeResult, Track};
pub use search::{AcquisitionKind, AcquisitionSpec, SearchBudget};
pub use trace::{Incumbent, LapRecord, Objective, RunOutcome};

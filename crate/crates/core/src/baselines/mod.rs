//! Comparison optimisers: CMA-ES on the objective, BO with a CMA-ES
//! acquisition optimiser, REMBO and random search.

pub mod cmaes;
pub mod plain_bo;
pub mod random;
pub mod rembo;

pub use cmaes::{cmaes_run, default_population, CmaState};
pub use plain_bo::{cmaes_propose, plain_bo_run};
pub use random::random_search_run;
pub use rembo::{rembo_run, rembo_run_with, Embedding, RemboConfig};

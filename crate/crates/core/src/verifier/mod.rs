//! Bounded exchange-graph exploration and the property harness.

mod atlas;
pub mod checks;
mod report;
mod suite;

use thiserror::Error;

use crate::seed::SeedError;

pub use atlas::{
    explore, AtlasEntry, Canary, Closure, ExplorationAtlas, ExploreOptions, DEFAULT_MAX_SEEDS,
};
pub use checks::{duality_identities, is_sign_coherent, DualityStatus};
pub use report::{
    CheckRecord, ExplorationSummary, Status, Summary, VerificationReport, EXIT_OK,
    EXIT_PROPERTY_FAILURE, EXIT_TRUNCATED,
};
pub use suite::{run_checks, run_full_suite, SuiteOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("invalid initial exchange matrix: {0}")]
    Config(SeedError),
    #[error("engine error after mutation path {path:?}: {source}")]
    Engine { path: Vec<usize>, source: SeedError },
    #[error("seed budget of {limit} exceeded")]
    Budget { limit: usize },
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::{find_skew_symmetrizer, is_acyclic, IntMatrix, SkewSymmetrizer};

use super::atlas::{explore, Canary, ExplorationAtlas, ExploreOptions};
use super::checks::*;
use super::report::{CheckRecord, ExplorationSummary, VerificationReport};
use super::VerifyError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub explore: ExploreOptions,
    /// Corrupt the atlas before checking (negative control).
    pub canary: Option<Canary>,
}

impl SuiteOptions {
    pub fn with_depth(depth: usize) -> Self {
        Self {
            explore: ExploreOptions::with_depth(depth),
            canary: None,
        }
    }
}

/// Runs every applicable check on an explored atlas. Checks that need a
/// skew-symmetrizer are skipped when `symmetrizer` is `None`; the triple
/// check always runs.
pub fn run_checks(
    atlas: &ExplorationAtlas,
    symmetrizer: Option<&SkewSymmetrizer>,
    workers: usize,
) -> Vec<CheckRecord> {
    const NO_S: &str = "no skew-symmetrizer exists for B0";
    type Check<'a> = Box<dyn Fn() -> CheckRecord + Send + Sync + 'a>;
    let mut checks: Vec<Check> = vec![
        Box::new(|| check_sign_coherence(atlas)),
        Box::new(|| check_positivity(atlas)),
        Box::new(|| check_recurrence_agreement(atlas)),
        Box::new(|| check_separation(atlas)),
        Box::new(move || check_f_polynomial_shape(atlas, symmetrizer.is_some())),
    ];
    match symmetrizer {
        Some(s) => {
            checks.push(Box::new(move || check_duality(atlas, s)));
            checks.push(Box::new(|| check_lemma_identity_seed(atlas)));
            checks.push(Box::new(|| check_c_determines_seed(atlas)));
            checks.push(Box::new(|| check_g_determines_seed(atlas)));
        }
        None => {
            checks.push(Box::new(|| CheckRecord::skipped(DUALITY, NO_S)));
            checks.push(Box::new(|| CheckRecord::skipped(LEMMA_IDENTITY_SEED, NO_S)));
            checks.push(Box::new(|| CheckRecord::skipped(C_DETERMINES_SEED, NO_S)));
            checks.push(Box::new(|| CheckRecord::skipped(G_DETERMINES_SEED, NO_S)));
        }
    }
    checks.push(Box::new(|| check_triple_determines_seed(atlas)));
    checks.push(Box::new(|| check_witness_replay(atlas)));
    checks.push(Box::new(|| check_dedup_exactness(atlas)));

    if workers == 1 {
        checks.iter().map(|c| c()).collect()
    } else {
        checks.par_iter().map(|c| c()).collect()
    }
}

/// Explores from the principal seed at `b0` and runs every applicable
/// check, aggregating one report.
pub fn run_full_suite(b0: &IntMatrix, opts: &SuiteOptions) -> Result<VerificationReport, VerifyError> {
    let symmetrizer = find_skew_symmetrizer(b0).map_err(|e| VerifyError::Config(e.into()))?;
    let acyclic = is_acyclic(b0).map_err(|e| VerifyError::Config(e.into()))?;
    let mut atlas = explore(b0, &opts.explore)?;
    if let Some(canary) = opts.canary {
        atlas.inject_canary(canary);
    }
    let checks = run_checks(&atlas, symmetrizer.as_ref(), opts.explore.workers);
    let summary = ExplorationSummary::of(
        &atlas,
        symmetrizer.as_ref().map(|s| s.diag().to_vec()),
        acyclic,
    );
    Ok(VerificationReport::new(b0.clone(), summary, checks))
}

//! The seed payload shared by the CLI and the session service.

use serde::{Deserialize, Serialize};

use seedcheck_core::verifier::checks::{duality_identities, is_sign_coherent, DualityStatus};
use seedcheck_core::{find_skew_symmetrizer, IntMatrix, MatrixLiteral, Seed, SeedError, SkewSymmetrizer};

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPayload {
    pub v: u32,
    pub n: usize,
    /// Mutation directions applied from the origin.
    pub path: Vec<usize>,
    pub fingerprint: String,
    pub variables: Vec<String>,
    #[serde(rename = "Bt")]
    pub bt: IntMatrix,
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(rename = "C")]
    pub c: IntMatrix,
    #[serde(rename = "G")]
    pub g: IntMatrix,
    pub g_vectors: Vec<Vec<i64>>,
    pub f_polynomials: Vec<String>,
    /// One flag per column of `C`.
    pub sign_coherent: Vec<bool>,
    /// Present when `B0` has a skew-symmetrizer.
    pub duality: Option<DualityStatus>,
}

impl SeedPayload {
    pub fn build(
        seed: &Seed,
        path: &[usize],
        symmetrizer: Option<&SkewSymmetrizer>,
    ) -> Result<Self, SeedError> {
        let c = seed.c_matrix();
        let g = seed.g_matrix()?;
        let bt = seed.exchange_matrix();
        let duality = symmetrizer
            .map(|s| duality_identities(seed.origin_matrix(), &bt, &c, &g, s))
            .transpose()?;
        Ok(Self {
            v: SCHEMA_VERSION,
            n: seed.rank(),
            path: path.to_vec(),
            fingerprint: seed.fingerprint().to_string(),
            variables: seed.vars().iter().map(|v| v.to_string()).collect(),
            bt: seed.ext_matrix().full().clone(),
            b: bt,
            sign_coherent: (0..c.cols()).map(|j| is_sign_coherent(&c.column(j))).collect(),
            g_vectors: (0..g.cols()).map(|j| g.column(j)).collect(),
            f_polynomials: seed
                .f_polynomials()?
                .iter()
                .map(|f| f.poly().to_string())
                .collect(),
            c,
            g,
            duality,
        })
    }
}

/// Reads a matrix literal and returns the exchange matrix of its principal
/// seed. An explicit extended matrix must have the identity below `B`.
pub fn principal_matrix(text: &str) -> anyhow::Result<IntMatrix> {
    let literal = MatrixLiteral::parse(text)?;
    Ok(literal.principal_exchange()?)
}

pub fn symmetrizer_of(b: &IntMatrix) -> Result<Option<SkewSymmetrizer>, SeedError> {
    Ok(find_skew_symmetrizer(b)?)
}

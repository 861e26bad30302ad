//! Property checks over an [`ExplorationAtlas`]. Each check inspects every
//! stored seed and never stops at the first failure; the record keeps the
//! first witness and the failure count.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::matrix::{IntMatrix, MatrixError, SkewSymmetrizer};
use crate::seed::{f_polynomial_of, reconstruct_separation, GVector};

use super::atlas::{AtlasEntry, ExplorationAtlas};
use super::report::{CheckRecord, Tally};

pub const SIGN_COHERENCE: &str = "sign_coherence";
pub const POSITIVITY: &str = "positivity";
pub const RECURRENCE_AGREEMENT: &str = "recurrence_agreement";
pub const SEPARATION_FORMULA: &str = "separation_formula";
pub const F_POLYNOMIAL_SHAPE: &str = "f_polynomial_shape";
pub const DUALITY: &str = "duality";
pub const LEMMA_IDENTITY_SEED: &str = "lemma_identity_seed";
pub const C_DETERMINES_SEED: &str = "c_determines_seed";
pub const G_DETERMINES_SEED: &str = "g_determines_seed";
pub const TRIPLE_DETERMINES_SEED: &str = "triple_determines_seed";
pub const WITNESS_REPLAY: &str = "witness_replay";
pub const DEDUP_EXACTNESS: &str = "dedup_exactness";

/// Nonzero entries all share one sign.
pub fn is_sign_coherent(v: &[i64]) -> bool {
    !(v.iter().any(|&x| x > 0) && v.iter().any(|&x| x < 0))
}

/// Every column of every C-matrix is sign-coherent.
pub fn check_sign_coherence(atlas: &ExplorationAtlas) -> CheckRecord {
    let mut tally = Tally::new(SIGN_COHERENCE);
    for e in atlas.entries() {
        tally.seed();
        let c = e.c();
        if let Some(j) = (0..c.cols()).find(|&j| !is_sign_coherent(&c.column(j))) {
            tally.fail(
                e.path(),
                json!({ "column": j + 1, "c_vector": c.column(j), "C": c }),
            );
        }
    }
    tally.finish()
}

/// Every cluster variable is nonzero with all coefficients positive.
pub fn check_positivity(atlas: &ExplorationAtlas) -> CheckRecord {
    let mut tally = Tally::new(POSITIVITY);
    for e in atlas.entries() {
        tally.seed();
        let vars = e.seed().vars();
        if let Some(i) = vars
            .iter()
            .position(|v| v.is_zero() || !v.is_nonnegative())
        {
            tally.fail(
                e.path(),
                json!({ "variable": i + 1, "value": vars[i].to_string() }),
            );
        }
    }
    tally.finish()
}

/// The (C, G) carried by the recurrences equals the (C, G) read off the
/// seed: bottom block of the extended matrix and multidegrees.
pub fn check_recurrence_agreement(atlas: &ExplorationAtlas) -> CheckRecord {
    let mut tally = Tally::new(RECURRENCE_AGREEMENT);
    for e in atlas.entries() {
        tally.seed();
        if e.c() != e.c_recurrence() || e.g() != e.g_recurrence() {
            tally.fail(
                e.path(),
                json!({
                    "C": e.c(), "C_recurrence": e.c_recurrence(),
                    "G": e.g(), "G_recurrence": e.g_recurrence(),
                }),
            );
        }
    }
    tally.finish()
}

/// Each variable equals `x^g * F(ŷ)` rebuilt from its own g-vector and
/// F-polynomial.
pub fn check_separation(atlas: &ExplorationAtlas) -> CheckRecord {
    let b0 = atlas.origin_matrix();
    let mut tally = Tally::new(SEPARATION_FORMULA);
    for e in atlas.entries() {
        tally.seed();
        for (i, v) in e.seed().vars().iter().enumerate() {
            let g = GVector(e.g().column(i));
            let rebuilt = f_polynomial_of(v)
                .and_then(|f| reconstruct_separation(&g, &f, b0))
                .map_err(|err| err.to_string());
            if rebuilt.as_ref() != Ok(v) {
                tally.fail(
                    e.path(),
                    json!({
                        "variable": i + 1,
                        "value": v.to_string(),
                        "reconstructed": match rebuilt {
                            Ok(p) => p.to_string(),
                            Err(msg) => msg,
                        },
                    }),
                );
                break;
            }
        }
    }
    tally.finish()
}

/// Constant term 1 for every F-polynomial, and with `require_max_monomial`
/// also a coefficient-1 monomial divisible by every occurring monomial.
pub fn check_f_polynomial_shape(atlas: &ExplorationAtlas, require_max_monomial: bool) -> CheckRecord {
    let mut tally = Tally::new(F_POLYNOMIAL_SHAPE);
    for e in atlas.entries() {
        tally.seed();
        for (i, v) in e.seed().vars().iter().enumerate() {
            let problem = match f_polynomial_of(v) {
                Err(err) => Some(err.to_string()),
                Ok(f) if require_max_monomial && f.max_monomial().is_none() => {
                    Some(format!("no unique maximal monomial in {f}"))
                }
                Ok(_) => None,
            };
            if let Some(reason) = problem {
                tally.fail(e.path(), json!({ "variable": i + 1, "reason": reason }));
                break;
            }
        }
    }
    let note = if require_max_monomial {
        "constant term 1 and unique maximal monomial"
    } else {
        "constant term 1 only"
    };
    tally.note(note).finish()
}

/// Which of the three duality identities hold at one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityStatus {
    /// `G B_t S^{-1} G^T = B_0 S^{-1}`
    pub exchange: bool,
    /// `S C S^{-1} G^T = I`
    pub coefficient: bool,
    pub det_g: i64,
}

impl DualityStatus {
    pub fn holds(&self) -> bool {
        self.exchange && self.coefficient && self.det_g.abs() == 1
    }
}

/// Evaluates the identities with denominators cleared: with
/// `D = lcm(S) S^{-1}`, the first is `G B_t D G^T = B_0 D` and the second
/// is equivalent to `G^T S C = S`.
pub fn duality_identities(
    b0: &IntMatrix,
    bt: &IntMatrix,
    c: &IntMatrix,
    g: &IntMatrix,
    s: &SkewSymmetrizer,
) -> Result<DualityStatus, MatrixError> {
    let d = s.scaled_inverse();
    let sm = s.matrix();
    let gt = g.transpose();
    let lhs = g.checked_mul(bt)?.checked_mul(&d)?.checked_mul(&gt)?;
    let rhs = b0.checked_mul(&d)?;
    let second = gt.checked_mul(&sm)?.checked_mul(c)?;
    Ok(DualityStatus {
        exchange: lhs == rhs,
        coefficient: second == sm,
        det_g: g.determinant()?,
    })
}

pub fn check_duality(atlas: &ExplorationAtlas, s: &SkewSymmetrizer) -> CheckRecord {
    let b0 = atlas.origin_matrix();
    let mut tally = Tally::new(DUALITY);
    for e in atlas.entries() {
        tally.seed();
        let bt = e.seed().exchange_matrix();
        match duality_identities(b0, &bt, e.c(), e.g(), s) {
            Ok(status) if status.holds() => {}
            Ok(status) => tally.fail(
                e.path(),
                json!({ "status": status, "B": bt, "C": e.c(), "G": e.g() }),
            ),
            Err(err) => tally.fail(e.path(), json!({ "error": err.to_string() })),
        }
    }
    tally
        .note(format!("S = diag{:?}", s.diag()))
        .finish()
}

/// Every seed whose G-matrix is the identity is the origin seed.
pub fn check_lemma_identity_seed(atlas: &ExplorationAtlas) -> CheckRecord {
    let n = atlas.origin_matrix().rows();
    let identity = IntMatrix::identity(n).expect("rank is positive");
    let origin = atlas.origin().seed();
    let mut tally = Tally::new(LEMMA_IDENTITY_SEED);
    for e in atlas.entries() {
        tally.seed();
        if e.g() == &identity && e.seed() != origin {
            tally.fail(e.path(), json!({ "G": e.g(), "seed": e.seed().to_record() }));
        }
    }
    tally.finish()
}

fn matrix_key(out: &mut Vec<u8>, m: &IntMatrix) {
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.entries() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Fails when two structurally different seeds share a key.
fn check_injective<F>(atlas: &ExplorationAtlas, name: &str, key: F) -> CheckRecord
where
    F: Fn(&AtlasEntry) -> Vec<u8>,
{
    let mut tally = Tally::new(name);
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    for (idx, e) in atlas.entries().iter().enumerate() {
        tally.seed();
        match seen.get(&key(e)) {
            Some(&first) => {
                let other = &atlas.entries()[first];
                if other.seed() != e.seed() {
                    tally.fail(
                        e.path(),
                        json!({
                            "first_path": other.path(),
                            "second_path": e.path(),
                            "C": e.c(),
                            "G": e.g(),
                        }),
                    );
                }
            }
            None => {
                seen.insert(key(e), idx);
            }
        }
    }
    tally.finish()
}

/// Equal C-matrices imply equal seeds.
pub fn check_c_determines_seed(atlas: &ExplorationAtlas) -> CheckRecord {
    check_injective(atlas, C_DETERMINES_SEED, |e| {
        let mut k = Vec::new();
        matrix_key(&mut k, e.c());
        k
    })
}

/// Equal G-matrices imply equal seeds.
pub fn check_g_determines_seed(atlas: &ExplorationAtlas) -> CheckRecord {
    check_injective(atlas, G_DETERMINES_SEED, |e| {
        let mut k = Vec::new();
        matrix_key(&mut k, e.g());
        k
    })
}

/// Equal (G, C, B) triples imply equal seeds.
pub fn check_triple_determines_seed(atlas: &ExplorationAtlas) -> CheckRecord {
    check_injective(atlas, TRIPLE_DETERMINES_SEED, |e| {
        let mut k = Vec::new();
        matrix_key(&mut k, e.g());
        matrix_key(&mut k, e.c());
        matrix_key(&mut k, &e.seed().exchange_matrix());
        k
    })
}

/// Replaying each witness path from the origin reproduces the stored seed.
pub fn check_witness_replay(atlas: &ExplorationAtlas) -> CheckRecord {
    let origin = atlas.origin().seed();
    let engine = atlas.options().engine;
    let mut tally = Tally::new(WITNESS_REPLAY);
    for e in atlas.entries() {
        tally.seed();
        match origin.mutate_path(e.path(), &engine) {
            Ok(s) if &s == e.seed() => {}
            Ok(s) => tally.fail(
                e.path(),
                json!({ "stored": e.seed().to_record(), "replayed": s.to_record() }),
            ),
            Err(err) => tally.fail(e.path(), json!({ "error": err.to_string() })),
        }
    }
    tally.finish()
}

/// No two stored entries are structurally equal seeds.
pub fn check_dedup_exactness(atlas: &ExplorationAtlas) -> CheckRecord {
    let mut tally = Tally::new(DEDUP_EXACTNESS);
    let mut groups: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    for (idx, e) in atlas.entries().iter().enumerate() {
        tally.seed();
        let group = groups.entry(e.seed().canonical_bytes()).or_default();
        if let Some(&first) = group.first() {
            tally.fail(
                e.path(),
                json!({ "duplicate_of": atlas.entries()[first].path() }),
            );
        }
        group.push(idx);
    }
    tally.finish()
}

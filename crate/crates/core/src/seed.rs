//! Labeled seeds with principal coefficients.
//!
//! Every cluster variable is stored expanded as a Laurent polynomial in the
//! initial cluster `x_1..x_n` with polynomial coefficients in `y_1..y_n`, so
//! seed equality is equality of canonical forms.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, Monomial};
use crate::matrix::{positive_part, ExtendedExchangeMatrix, IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("exchange relation in direction {direction} did not divide exactly: {source}")]
    ExchangeDivision {
        direction: usize,
        source: LaurentError,
    },
    #[error("mutation in direction {direction} produced a variable with a non-positive coefficient: {variable}")]
    Positivity { direction: usize, variable: String },
    #[error("cluster variable {variable} is not homogeneous under the principal grading")]
    Homogeneity { variable: String },
    #[error("F-polynomial {0} is not a polynomial in y alone")]
    NotPureY(String),
    #[error("F-polynomial {0} does not have constant term 1")]
    ConstantTerm(String),
    #[error("seed record is inconsistent: {0}")]
    Record(String),
}

pub type Result<T> = std::result::Result<T, SeedError>;

/// Switches for the invariant assertions run on every new cluster variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Check positivity and homogeneity of each new variable.
    pub assert_invariants: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            assert_invariants: true,
        }
    }
}

/// `deg x_i = e_i`, `deg y_j = -(column j of B0)`, listed in the variable
/// order `x_1..x_n, y_1..y_n`.
pub fn principal_grading(b0: &IntMatrix) -> Vec<Vec<i64>> {
    let n = b0.cols();
    let mut grading = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        grading.push(e);
    }
    for j in 0..n {
        grading.push(b0.column(j).into_iter().map(|v| -v).collect());
    }
    grading
}

/// Degree vector of a cluster variable under the principal grading.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GVector(pub Vec<i64>);

impl GVector {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

/// A cluster variable evaluated at `x_1 = .. = x_n = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FPolynomial(LaurentPoly);

impl FPolynomial {
    /// Wraps a pure y-polynomial whose constant term is 1.
    pub fn new(poly: LaurentPoly) -> Result<Self> {
        if !poly.is_x_free() {
            return Err(SeedError::NotPureY(poly.to_string()));
        }
        if !poly.constant_term().is_one() {
            return Err(SeedError::ConstantTerm(poly.to_string()));
        }
        Ok(Self(poly))
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }

    pub fn into_poly(self) -> LaurentPoly {
        self.0
    }

    /// The monomial with coefficient 1 that every occurring monomial
    /// divides, if there is one.
    pub fn max_monomial(&self) -> Option<&Monomial> {
        let (top, coeff) = self.0.leading_term()?;
        if !coeff.is_one() {
            return None;
        }
        self.0
            .terms()
            .all(|(m, _)| m.divides(top))
            .then_some(top)
    }
}

impl fmt::Display for FPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `ŷ_k = y_k * prod_i x_i^{b_ik}` for the initial exchange matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatY {
    pub values: Vec<LaurentPoly>,
}

pub fn hat_y(b0: &IntMatrix) -> HatY {
    let n = b0.cols();
    let values = (0..n)
        .map(|k| {
            let x: Vec<i32> = b0.column(k).iter().map(|&b| b as i32).collect();
            let mut y = vec![0; n];
            y[k] = 1;
            LaurentPoly::monomial(Monomial::new(&x, &y).unwrap(), BigInt::one())
        })
        .collect();
    HatY { values }
}

/// Multidegree of `v` under the principal grading induced by `b0`.
pub fn g_vector_of(v: &LaurentPoly, b0: &IntMatrix) -> Result<GVector> {
    Ok(GVector(v.multidegree(&principal_grading(b0))?))
}

pub fn f_polynomial_of(v: &LaurentPoly) -> Result<FPolynomial> {
    FPolynomial::new(v.specialize_x_to_one())
}

/// `(prod_j x_j^{g_j}) * F(ŷ_1, .., ŷ_n)`.
pub fn reconstruct_separation(g: &GVector, f: &FPolynomial, b0: &IntMatrix) -> Result<LaurentPoly> {
    let n = b0.cols();
    let x: Vec<i32> = g.0.iter().map(|&e| e as i32).collect();
    let lead = LaurentPoly::monomial(Monomial::new(&x, &vec![0; n])?, BigInt::one());
    let mut assignment: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::x(n, n, i)).collect();
    assignment.extend(hat_y(b0).values);
    let image = f.poly().substitute(&assignment)?;
    Ok(&lead * &image)
}

/// A labeled seed `(x_1;t .. x_n;t, B~_t)` of the cluster pattern with
/// principal coefficients at the origin `B0`.
#[derive(Clone)]
pub struct Seed {
    b0: Arc<IntMatrix>,
    grading: Arc<Vec<Vec<i64>>>,
    vars: Vec<LaurentPoly>,
    ext: ExtendedExchangeMatrix,
}

impl PartialEq for Seed {
    fn eq(&self, other: &Self) -> bool {
        self.ext == other.ext && self.vars == other.vars && self.b0 == other.b0
    }
}

impl Eq for Seed {}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Seed")
            .field("vars", &self.vars)
            .field("ext", self.ext.full())
            .finish()
    }
}

/// Principal-coefficient seed at `B`: variables `x_1..x_n`, `B~ = (B over I)`.
pub fn new_principal_seed(b: &IntMatrix) -> Result<Seed> {
    Seed::principal(b)
}

impl Seed {
    pub fn principal(b: &IntMatrix) -> Result<Self> {
        let ext = ExtendedExchangeMatrix::principal(b)?;
        let n = ext.rank();
        Ok(Self {
            b0: Arc::new(b.clone()),
            grading: Arc::new(principal_grading(b)),
            vars: (0..n).map(|i| LaurentPoly::x(n, n, i)).collect(),
            ext,
        })
    }

    pub fn rank(&self) -> usize {
        self.ext.rank()
    }

    pub fn vars(&self) -> &[LaurentPoly] {
        &self.vars
    }

    pub fn ext_matrix(&self) -> &ExtendedExchangeMatrix {
        &self.ext
    }

    pub fn exchange_matrix(&self) -> IntMatrix {
        self.ext.exchange()
    }

    pub fn c_matrix(&self) -> IntMatrix {
        self.ext.coefficients()
    }

    /// The initial exchange matrix `B_{t_0}`.
    pub fn origin_matrix(&self) -> &IntMatrix {
        &self.b0
    }

    pub fn g_vectors(&self) -> Result<Vec<GVector>> {
        self.vars
            .iter()
            .map(|v| {
                v.multidegree(&self.grading)
                    .map(GVector)
                    .map_err(SeedError::from)
            })
            .collect()
    }

    /// Matrix whose columns are the g-vectors.
    pub fn g_matrix(&self) -> Result<IntMatrix> {
        let n = self.rank();
        let cols = self.g_vectors()?;
        let mut g = IntMatrix::zeros(n, n)?;
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.0.iter().enumerate() {
                g.set(i, j, v);
            }
        }
        Ok(g)
    }

    pub fn f_polynomials(&self) -> Result<Vec<FPolynomial>> {
        self.vars.iter().map(f_polynomial_of).collect()
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.mutate_with(k, &EngineOptions::default())
    }

    /// Seed mutation in direction `k` (1-based) via the exchange relation
    /// `x'_k x_k = prod x_i^{[b_ik]_+} + prod x_i^{[-b_ik]_+}`, the product
    /// running over the current cluster and the frozen `y`'s.
    pub fn mutate_with(&self, k: usize, opts: &EngineOptions) -> Result<Self> {
        let ext = self.ext.mutate(k)?;
        let n = self.rank();
        let col = k - 1;
        let mut plus = LaurentPoly::one(n, n);
        let mut minus = LaurentPoly::one(n, n);
        for i in 0..self.ext.full().rows() {
            let b = self.ext.full().get(i, col);
            if b == 0 {
                continue;
            }
            let base = if i < n {
                self.vars[i].clone()
            } else {
                LaurentPoly::y(n, n, i - n)
            };
            let e = u32::try_from(b.unsigned_abs())
                .map_err(|_| MatrixError::Overflow("raising to an exchange exponent"))?;
            let factor = base.pow(e);
            if positive_part(b) > 0 {
                plus = &plus * &factor;
            } else {
                minus = &minus * &factor;
            }
        }
        let new_var = (&plus + &minus)
            .exact_div(&self.vars[col])
            .map_err(|source| SeedError::ExchangeDivision {
                direction: k,
                source,
            })?;
        if opts.assert_invariants {
            if !new_var.is_nonnegative() {
                return Err(SeedError::Positivity {
                    direction: k,
                    variable: new_var.to_string(),
                });
            }
            if new_var.multidegree(&self.grading).is_err() {
                return Err(SeedError::Homogeneity {
                    variable: new_var.to_string(),
                });
            }
        }
        let mut vars = self.vars.clone();
        vars[col] = new_var;
        Ok(Self {
            b0: Arc::clone(&self.b0),
            grading: Arc::clone(&self.grading),
            vars,
            ext,
        })
    }

    /// Replaces one variable without any checks (used for negative controls).
    pub(crate) fn with_variable(&self, i: usize, v: LaurentPoly) -> Self {
        let mut out = self.clone();
        out.vars[i] = v;
        out
    }

    /// Applies `path` left to right.
    pub fn mutate_path(&self, path: &[usize], opts: &EngineOptions) -> Result<Self> {
        path.iter()
            .try_fold(self.clone(), |s, &k| s.mutate_with(k, opts))
    }

    /// Deterministic byte encoding used for fingerprints and keys.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = b"seed/v1".to_vec();
        for m in [self.b0.as_ref(), self.ext.full()] {
            out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
            out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
            for v in m.entries() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        for v in &self.vars {
            v.write_canonical_bytes(&mut out);
        }
        out
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint(Sha256::digest(self.canonical_bytes()).into())
    }

    pub fn to_record(&self) -> SeedRecord {
        SeedRecord {
            n: self.rank(),
            b0: self.b0.as_ref().clone(),
            bt: self.ext.full().clone(),
            variables: self.vars.iter().map(ToString::to_string).collect(),
        }
    }

    /// Rebuilds a seed from its record, checking that the variables parse in
    /// the principal ring and the matrices have consistent shapes.
    pub fn from_record(record: &SeedRecord) -> Result<Self> {
        let n = record.n;
        if record.b0.rows() != n || record.b0.cols() != n {
            return Err(SeedError::Record(format!("B0 is not {n}x{n}")));
        }
        if record.bt.rows() != 2 * n {
            return Err(SeedError::Record(format!("Bt does not have {} rows", 2 * n)));
        }
        if record.variables.len() != n {
            return Err(SeedError::Record(format!("expected {n} variables")));
        }
        let origin = Self::principal(&record.b0)?;
        let vars = record
            .variables
            .iter()
            .map(|s| LaurentPoly::parse(s, n, n))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            vars,
            ext: ExtendedExchangeMatrix::new(record.bt.clone(), n)?,
            ..origin
        })
    }
}

/// SHA-256 of a seed's canonical bytes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl std::str::FromStr for Fingerprint {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Self(out))
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", &hex::encode(self.0)[..16])
    }
}

/// JSON form of a seed: extended matrix plus each variable in canonical text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub n: usize,
    #[serde(rename = "B0")]
    pub b0: IntMatrix,
    #[serde(rename = "Bt")]
    pub bt: IntMatrix,
    pub variables: Vec<String>,
}

//! Sparse multivariate Laurent polynomials over the integers.
//!
//! A polynomial lives in `Z[y_1..y_m][x_1^{±1}..x_n^{±1}]`: x-exponents may be
//! negative, y-exponents never are. Terms are kept in a `BTreeMap` under the
//! graded-lexicographic order on the concatenated exponent vector
//! `(x_1..x_n, y_1..y_m)`, which gives a deterministic text form (largest
//! monomial first) and a well-defined leading term for division.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable signature mismatch: (n={left_n}, m={left_m}) vs (n={right_n}, m={right_m})")]
    SignatureMismatch {
        left_n: usize,
        left_m: usize,
        right_n: usize,
        right_m: usize,
    },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("{dividend} is not divisible by {divisor} in the Laurent ring")]
    DivisionFailure { dividend: String, divisor: String },
    #[error("cannot invert {0}: only unit monomials without y-factors are invertible")]
    NotInvertible(String),
    #[error("polynomial is not homogeneous: {first:?} vs {second:?}")]
    NotHomogeneous { first: Vec<i64>, second: Vec<i64> },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("expected {expected} entries, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("negative exponent {exponent} on y{index}")]
    NegativeFrozenExponent { index: usize, exponent: i64 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, LaurentError>;

/// Exponent vector `(x_1..x_n, y_1..y_m)`; y-exponents are nonnegative.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    nx: u16,
    exps: Box<[i32]>,
}

impl Monomial {
    pub fn new(x: &[i32], y: &[i32]) -> Result<Self> {
        if let Some((i, &e)) = y.iter().enumerate().find(|(_, &e)| e < 0) {
            return Err(LaurentError::NegativeFrozenExponent {
                index: i + 1,
                exponent: e as i64,
            });
        }
        let mut exps = Vec::with_capacity(x.len() + y.len());
        exps.extend_from_slice(x);
        exps.extend_from_slice(y);
        Ok(Self {
            nx: x.len() as u16,
            exps: exps.into_boxed_slice(),
        })
    }

    pub fn one(nx: usize, ny: usize) -> Self {
        Self {
            nx: nx as u16,
            exps: vec![0; nx + ny].into_boxed_slice(),
        }
    }

    fn from_raw(nx: usize, exps: Vec<i32>) -> Result<Self> {
        let (x, y) = exps.split_at(nx);
        Self::new(x, y)
    }

    pub fn x_exponents(&self) -> &[i32] {
        &self.exps[..self.nx as usize]
    }

    pub fn y_exponents(&self) -> &[i32] {
        &self.exps[self.nx as usize..]
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exps
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            nx: self.nx,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn write_to(&self, out: &mut String) -> bool {
        let mut wrote = false;
        let nx = self.nx as usize;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                out.push('*');
            }
            let (name, idx) = if i < nx { ('x', i + 1) } else { ('y', i - nx + 1) };
            out.push(name);
            out.push_str(&idx.to_string());
            if e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
            wrote = true;
        }
        wrote
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nx
            .cmp(&other.nx)
            .then_with(|| self.total_degree().cmp(&other.total_degree()))
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if !self.write_to(&mut s) {
            s.push('1');
        }
        f.write_str(&s)
    }
}

/// Laurent polynomial in `n` cluster variables and `m` frozen variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nx: usize,
    ny: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nx: usize, ny: usize) -> Self {
        Self::constant(nx, ny, BigInt::one())
    }

    pub fn constant(nx: usize, ny: usize, c: BigInt) -> Self {
        Self::from_terms(nx, ny, [(Monomial::one(nx, ny), c)])
    }

    /// The variable `x_{i+1}`.
    pub fn x(nx: usize, ny: usize, i: usize) -> Self {
        assert!(i < nx, "x{} out of range", i + 1);
        let mut exps = vec![0; nx + ny];
        exps[i] = 1;
        Self::monomial(Monomial::from_raw(nx, exps).unwrap(), BigInt::one())
    }

    /// The variable `y_{j+1}`.
    pub fn y(nx: usize, ny: usize, j: usize) -> Self {
        assert!(j < ny, "y{} out of range", j + 1);
        let mut exps = vec![0; nx + ny];
        exps[nx + j] = 1;
        Self::monomial(Monomial::from_raw(nx, exps).unwrap(), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let nx = m.nx as usize;
        let ny = m.exps.len() - nx;
        Self::from_terms(nx, ny, [(m, c)])
    }

    /// Builds a polynomial, combining repeated monomials and dropping zeros.
    pub fn from_terms(
        nx: usize,
        ny: usize,
        terms: impl IntoIterator<Item = (Monomial, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(nx, ny);
        for (m, c) in terms {
            assert_eq!(m.exps.len(), nx + ny, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&Monomial::one(self.nx, self.ny))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// True iff no term involves an x-variable.
    pub fn is_x_free(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.x_exponents().iter().all(|&e| e == 0))
    }

    /// True iff every stored coefficient is positive (vacuously for zero).
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    fn check_signature(&self, other: &LaurentPoly) -> Result<()> {
        if self.nx == other.nx && self.ny == other.ny {
            Ok(())
        } else {
            Err(LaurentError::SignatureMismatch {
                left_n: self.nx,
                left_m: self.ny,
                right_n: other.nx,
                right_m: other.ny,
            })
        }
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_signature(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_signature(other)?;
        if let Some((m, c)) = other.as_monomial() {
            return Ok(self.scale_by_term(m, c));
        }
        if let Some((m, c)) = self.as_monomial() {
            return Ok(other.scale_by_term(m, c));
        }
        let width = self.nx + self.ny;
        let (alo, ahi) = self.exponent_bounds();
        let (blo, bhi) = other.exponent_bounds();
        let lo: Vec<i64> = alo.iter().zip(&blo).map(|(a, b)| a + b).collect();
        let hi: Vec<i64> = ahi.iter().zip(&bhi).map(|(a, b)| a + b).collect();
        let acc = match Packed::new(lo, &hi) {
            Some(space) => space.decode_all(mul_kernel(&space, self, other)),
            None => mul_kernel(&Plain(width), self, other),
        };
        Ok(self.collect_raw(acc))
    }

    /// Componentwise minimum and maximum exponents (zeros when empty).
    fn exponent_bounds(&self) -> (Vec<i64>, Vec<i64>) {
        let width = self.nx + self.ny;
        let mut lo = vec![i64::MAX; width];
        let mut hi = vec![i64::MIN; width];
        for m in self.terms.keys() {
            for (i, &e) in m.exps.iter().enumerate() {
                lo[i] = lo[i].min(e as i64);
                hi[i] = hi[i].max(e as i64);
            }
        }
        if self.terms.is_empty() {
            lo.fill(0);
            hi.fill(0);
        }
        (lo, hi)
    }

    fn scale_by_term(&self, m: &Monomial, c: &BigInt) -> LaurentPoly {
        Self {
            nx: self.nx,
            ny: self.ny,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    fn collect_raw(&self, acc: Vec<(Box<[i32]>, BigInt)>) -> LaurentPoly {
        let nx = self.nx as u16;
        Self {
            nx: self.nx,
            ny: self.ny,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(exps, c)| (Monomial { nx, exps }, c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        match e {
            0 => return Self::one(self.nx, self.ny),
            1 => return self.clone(),
            _ => {}
        }
        if let Some((m, c)) = self.as_monomial() {
            let exps = m.exps.iter().map(|&x| x * e as i32).collect();
            let mut p = Self::zero(self.nx, self.ny);
            p.terms.insert(Monomial { nx: m.nx, exps }, c.pow(e));
            return p;
        }
        self.pow_by_recurrence(e)
            .unwrap_or_else(|| self.pow_by_squaring(e))
    }

    fn pow_by_squaring(&self, mut e: u32) -> LaurentPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.nx, self.ny);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Miller's recurrence for `P^e`, graded by total y-degree. Needs a unique
    /// term `a_0 z^{p_0}` of lowest y-degree; writing `P = z^{p_0}(a_0 + R)`
    /// and `Q = (a_0 + R)^e`, the identity `P D(Q) = e Q D(P)` for the
    /// grading derivation `D` gives, at each monomial `m` of degree `d > 0`,
    /// `a_0 d q_m = sum_p a_p q_{m-p} ((e+1) deg p - d)`.
    fn pow_by_recurrence(&self, e: u32) -> Option<LaurentPoly> {
        let ydeg = |m: &Monomial| -> i64 { m.y_exponents().iter().map(|&v| v as i64).sum() };
        let low = self.terms.keys().map(ydeg).min()?;
        let mut base = None;
        let mut rest = Vec::new();
        for (m, c) in &self.terms {
            let d = ydeg(m);
            if d == low {
                if base.replace((m, c)).is_some() {
                    return None;
                }
            } else {
                rest.push((m, c, d - low));
            }
        }
        let (p0, a0) = base?;
        let rest: Vec<(Box<[i32]>, &BigInt, i64)> = rest
            .into_iter()
            .map(|(m, c, d)| {
                let delta = m.exps.iter().zip(p0.exps.iter()).map(|(a, b)| a - b).collect();
                (delta, c, d)
            })
            .collect();
        let e64 = i64::from(e);
        let top = e64 * rest.iter().map(|r| r.2).max()?;
        let width = self.nx + self.ny;
        let mut lo = vec![0i64; width];
        let mut hi = vec![0i64; width];
        for (delta, _, _) in &rest {
            for (i, &v) in delta.iter().enumerate() {
                lo[i] = lo[i].min(e64 * v as i64);
                hi[i] = hi[i].max(e64 * v as i64);
            }
        }
        let quotient = match Packed::new(lo, &hi) {
            Some(space) => space.decode_all(miller_kernel(&space, &rest, a0, e64, top)?),
            None => miller_kernel(&Plain(width), &rest, a0, e64, top)?,
        };
        let nx = self.nx as u16;
        let mut terms = BTreeMap::new();
        for (m, c) in quotient {
            let exps = m
                .iter()
                .zip(p0.exps.iter())
                .map(|(a, b)| a + b * e as i32)
                .collect();
            terms.insert(Monomial { nx, exps }, c);
        }
        Some(Self {
            nx: self.nx,
            ny: self.ny,
            terms,
        })
    }

    /// Exact quotient `q` with `q * divisor == self`, if one exists in the
    /// Laurent ring (x invertible, y not).
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_signature(divisor)?;
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let fail = || LaurentError::DivisionFailure {
            dividend: self.to_string(),
            divisor: divisor.to_string(),
        };
        if let Some((dm, dc)) = divisor.as_monomial() {
            return self.div_by_monomial(dm, dc).ok_or_else(fail);
        }
        self.div_general(divisor).ok_or_else(fail)
    }

    fn div_by_monomial(&self, dm: &Monomial, dc: &BigInt) -> Option<LaurentPoly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let exps: Vec<i32> = m.exps.iter().zip(dm.exps.iter()).map(|(a, b)| a - b).collect();
            terms.insert(Monomial::from_raw(self.nx, exps).ok()?, q);
        }
        Some(Self {
            nx: self.nx,
            ny: self.ny,
            terms,
        })
    }

    /// Per-variable minimum exponent over all terms.
    fn min_exponents(&self) -> Vec<i32> {
        let mut mins = vec![i32::MAX; self.nx + self.ny];
        for m in self.terms.keys() {
            for (lo, &e) in mins.iter_mut().zip(m.exps.iter()) {
                *lo = (*lo).min(e);
            }
        }
        mins
    }

    fn shifted(&self, shift: &[i32]) -> BTreeMap<Vec<i32>, BigInt> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let e: Vec<i32> = m.exps.iter().zip(shift).map(|(a, s)| a - s).collect();
                (e, c.clone())
            })
            .collect()
    }

    /// Both operands are shifted by monomials into ordinary polynomials, the
    /// divisor so that no variable divides it. Then a Laurent quotient exists
    /// iff the polynomial division below is exact, and it terminates because
    /// graded-lex is a well-order on nonnegative exponent vectors.
    fn div_general(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        let p_shift = self.min_exponents();
        let d_shift = divisor.min_exponents();
        let mut rem = PolyMap::from(self.shifted(&p_shift));
        let d = PolyMap::from(divisor.shifted(&d_shift));
        let (d_lead, d_coeff) = d.leading()?;
        let (d_lead, d_coeff) = (d_lead.clone(), d_coeff.clone());
        let mut quotient: Vec<(Vec<i32>, BigInt)> = Vec::new();
        while let Some((r_lead, r_coeff)) = rem.leading() {
            if r_lead.iter().zip(&d_lead).any(|(r, d)| r < d) {
                return None;
            }
            let (qc, rr) = r_coeff.div_rem(&d_coeff);
            if !rr.is_zero() {
                return None;
            }
            let qm: Vec<i32> = r_lead.iter().zip(&d_lead).map(|(r, d)| r - d).collect();
            for (dm, dc) in d.iter() {
                let e: Vec<i32> = dm.iter().zip(&qm).map(|(a, b)| a + b).collect();
                rem.add(e, -(dc * &qc));
            }
            quotient.push((qm, qc));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in quotient {
            let exps: Vec<i32> = e
                .iter()
                .zip(p_shift.iter().zip(&d_shift))
                .map(|(q, (ps, ds))| q + ps - ds)
                .collect();
            terms.insert(Monomial::from_raw(self.nx, exps).ok()?, c);
        }
        Some(Self {
            nx: self.nx,
            ny: self.ny,
            terms,
        })
    }

    /// Image under `variable -> value`, in the order `x_1..x_n, y_1..y_m`.
    ///
    /// A variable occurring with a negative exponent must be sent to an
    /// invertible value: a monomial with coefficient ±1 and no y-factor.
    pub fn substitute(&self, assignment: &[LaurentPoly]) -> Result<LaurentPoly> {
        let arity = self.nx + self.ny;
        if assignment.len() != arity {
            return Err(LaurentError::Arity {
                expected: arity,
                found: assignment.len(),
            });
        }
        let (tnx, tny) = match assignment.first() {
            Some(v) => (v.nx, v.ny),
            None => (0, 0),
        };
        for v in assignment {
            if v.nx != tnx || v.ny != tny {
                return Err(LaurentError::SignatureMismatch {
                    left_n: tnx,
                    left_m: tny,
                    right_n: v.nx,
                    right_m: v.ny,
                });
            }
        }
        let mut powers: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut out = Self::zero(tnx, tny);
        for (m, c) in &self.terms {
            let mut term = Self::constant(tnx, tny, c.clone());
            for (var, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Entry::Vacant(slot) = powers.entry((var, e)) {
                    let value = &assignment[var];
                    let base = if e < 0 { value.inverse()? } else { value.clone() };
                    slot.insert(base.pow(e.unsigned_abs()));
                }
                term = &term * &powers[&(var, e)];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Inverse of a unit monomial.
    pub fn inverse(&self) -> Result<LaurentPoly> {
        let not_invertible = || LaurentError::NotInvertible(self.to_string());
        let (m, c) = self.as_monomial().ok_or_else(not_invertible)?;
        if !(c.is_one() || (-c).is_one()) {
            return Err(not_invertible());
        }
        let exps: Vec<i32> = m.exps.iter().map(|e| -e).collect();
        let inv = Monomial::from_raw(self.nx, exps).map_err(|_| not_invertible())?;
        Ok(Self::monomial(inv, c.clone()))
    }

    /// Common degree of all terms under `grading` (one integer vector per
    /// variable, in the order `x_1..x_n, y_1..y_m`).
    pub fn multidegree(&self, grading: &[Vec<i64>]) -> Result<Vec<i64>> {
        let arity = self.nx + self.ny;
        if grading.len() != arity {
            return Err(LaurentError::Arity {
                expected: arity,
                found: grading.len(),
            });
        }
        let mut terms = self.terms.keys();
        let first = terms.next().ok_or(LaurentError::ZeroPolynomial)?;
        let degree_of = |m: &Monomial| -> Vec<i64> {
            let dim = grading.first().map_or(0, Vec::len);
            let mut d = vec![0i64; dim];
            for (&e, g) in m.exps.iter().zip(grading) {
                for (acc, &gi) in d.iter_mut().zip(g) {
                    *acc += e as i64 * gi;
                }
            }
            d
        };
        let deg = degree_of(first);
        for m in terms {
            let other = degree_of(m);
            if other != deg {
                return Err(LaurentError::NotHomogeneous {
                    first: deg,
                    second: other,
                });
            }
        }
        Ok(deg)
    }

    /// Sets every x-variable to 1.
    pub fn specialize_x_to_one(&self) -> LaurentPoly {
        let mut out = Self::zero(self.nx, self.ny);
        for (m, c) in &self.terms {
            let mut exps = m.exps.to_vec();
            exps[..self.nx].iter_mut().for_each(|e| *e = 0);
            out.add_term(Monomial::from_raw(self.nx, exps).unwrap(), c.clone());
        }
        out
    }

    /// Deterministic byte encoding of the canonical form.
    pub fn write_canonical_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.nx as u32).to_le_bytes());
        out.extend_from_slice(&(self.ny as u32).to_le_bytes());
        out.extend_from_slice(&(self.terms.len() as u64).to_le_bytes());
        for (m, c) in &self.terms {
            for e in m.exps.iter() {
                out.extend_from_slice(&e.to_le_bytes());
            }
            let bytes = c.to_signed_bytes_le();
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
    }

    /// Parses the canonical text form (or any sum of products of integers
    /// and `x<i>^e` / `y<j>^e` factors) in the ring with `nx`, `ny` variables.
    pub fn parse(text: &str, nx: usize, ny: usize) -> Result<LaurentPoly> {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            nx,
            ny,
        }
        .polynomial()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            let abs = c.abs();
            if m.is_one() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                m.write_to(&mut s);
            }
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Operators panic on a signature mismatch; use the `checked_*` methods when
/// operands come from different rings.
impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("signature mismatch in add")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("signature mismatch in sub")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("signature mismatch in mul")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nx: self.nx,
            ny: self.ny,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Hashable encoding of exponent vectors that is additive, so that
/// `key(a + b) = add(key(a), key(b))`.
trait KeySpace {
    type Key: Hash + Eq + Clone;
    fn key(&self, exps: &[i32]) -> Self::Key;
    fn add(&self, a: &Self::Key, b: &Self::Key) -> Self::Key;
}

/// Exponent vectors as they are.
struct Plain(usize);

impl KeySpace for Plain {
    type Key = Box<[i32]>;

    fn key(&self, exps: &[i32]) -> Box<[i32]> {
        exps.into()
    }

    fn add(&self, a: &Box<[i32]>, b: &Box<[i32]>) -> Box<[i32]> {
        debug_assert_eq!(a.len(), self.0);
        a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
    }
}

/// Exponent vectors packed into fixed-width fields of an `i128`, offset by
/// the lower corner of a bounding box. Only sums that land inside the box
/// decode correctly.
struct Packed {
    lo: Vec<i64>,
    bits: u32,
}

impl Packed {
    fn new(lo: Vec<i64>, hi: &[i64]) -> Option<Self> {
        let width = lo.len() as u32;
        if width == 0 {
            return None;
        }
        let bits = (126 / width).min(32);
        if bits < 2 {
            return None;
        }
        let fits = lo
            .iter()
            .zip(hi)
            .all(|(l, h)| h - l < (1i64 << (bits - 1)));
        fits.then_some(Self { lo, bits })
    }

    fn decode(&self, key: i128) -> Box<[i32]> {
        let mask = (1i128 << self.bits) - 1;
        self.lo
            .iter()
            .enumerate()
            .map(|(i, l)| ((key >> (self.bits * i as u32)) & mask) as i32 + *l as i32)
            .collect()
    }

    fn decode_all(&self, terms: Vec<(i128, BigInt)>) -> Vec<(Box<[i32]>, BigInt)> {
        terms.into_iter().map(|(k, c)| (self.decode(k), c)).collect()
    }
}

impl KeySpace for Packed {
    type Key = i128;

    fn key(&self, exps: &[i32]) -> i128 {
        exps.iter()
            .enumerate()
            .map(|(i, &e)| i128::from(e) << (self.bits * i as u32))
            .sum()
    }

    fn add(&self, a: &i128, b: &i128) -> i128 {
        a + b
    }
}

impl Packed {
    fn origin(&self) -> i128 {
        let lo: Vec<i32> = self.lo.iter().map(|&l| l as i32).collect();
        -self.key(&lo)
    }
}

fn accumulate<K: Hash + Eq>(acc: &mut FxHashMap<K, BigInt>, key: K, value: BigInt) {
    match acc.get_mut(&key) {
        Some(c) => *c += value,
        None => {
            acc.insert(key, value);
        }
    }
}

fn mul_kernel<S: KeySpace + Origin>(
    space: &S,
    a: &LaurentPoly,
    b: &LaurentPoly,
) -> Vec<(S::Key, BigInt)> {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let origin = space.origin_key();
    let inner: Vec<(S::Key, &BigInt)> = inner
        .terms
        .iter()
        .map(|(m, c)| (space.key(&m.exps), c))
        .collect();
    let mut acc: FxHashMap<S::Key, BigInt> = FxHashMap::default();
    acc.reserve(outer.len().max(inner.len()));
    for (ma, ca) in &outer.terms {
        let ka = space.add(&space.key(&ma.exps), &origin);
        for (kb, cb) in &inner {
            accumulate(&mut acc, space.add(&ka, kb), ca * *cb);
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn miller_kernel<S: KeySpace + Origin>(
    space: &S,
    rest: &[(Box<[i32]>, &BigInt, i64)],
    a0: &BigInt,
    e: i64,
    top: i64,
) -> Option<Vec<(S::Key, BigInt)>> {
    let width = rest.first().map_or(0, |r| r.0.len());
    let zero = vec![0i32; width];
    let deltas: Vec<(S::Key, &BigInt, i64)> = rest
        .iter()
        .map(|(d, c, w)| (space.key(d), *c, *w))
        .collect();
    let mut levels: Vec<Vec<(S::Key, BigInt)>> = Vec::with_capacity(top as usize + 1);
    levels.push(vec![(space.add(&space.key(&zero), &space.origin_key()), a0.pow(e as u32))]);
    for d in 1..=top {
        let mut acc: FxHashMap<S::Key, BigInt> = FxHashMap::default();
        for (delta, ap, wp) in &deltas {
            if *wp > d {
                continue;
            }
            let factor = *ap * BigInt::from((e + 1) * wp - d);
            if factor.is_zero() {
                continue;
            }
            for (kq, q) in &levels[(d - wp) as usize] {
                accumulate(&mut acc, space.add(kq, delta), &factor * q);
            }
        }
        let denom = a0 * BigInt::from(d);
        let mut level = Vec::with_capacity(acc.len());
        for (k, sum) in acc {
            if sum.is_zero() {
                continue;
            }
            let (q, r) = sum.div_rem(&denom);
            if !r.is_zero() {
                return None;
            }
            level.push((k, q));
        }
        levels.push(level);
    }
    Some(levels.into_iter().flatten().collect())
}

/// Key of the zero vector shifted into the packed box.
trait Origin: KeySpace {
    fn origin_key(&self) -> Self::Key;
}

impl Origin for Plain {
    fn origin_key(&self) -> Box<[i32]> {
        vec![0; self.0].into_boxed_slice()
    }
}

impl Origin for Packed {
    fn origin_key(&self) -> i128 {
        self.origin()
    }
}

/// Scratch polynomial on raw nonnegative exponent vectors, ordered
/// graded-lex, used by the division loop.
struct PolyMap(BTreeMap<GradedKey, BigInt>);

#[derive(PartialEq, Eq)]
struct GradedKey(Vec<i32>);

impl Ord for GradedKey {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: i64 = self.0.iter().map(|&e| e as i64).sum();
        let db: i64 = other.0.iter().map(|&e| e as i64).sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for GradedKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<BTreeMap<Vec<i32>, BigInt>> for PolyMap {
    fn from(m: BTreeMap<Vec<i32>, BigInt>) -> Self {
        PolyMap(m.into_iter().map(|(k, v)| (GradedKey(k), v)).collect())
    }
}

impl PolyMap {
    fn leading(&self) -> Option<(&Vec<i32>, &BigInt)> {
        self.0.iter().next_back().map(|(k, v)| (&k.0, v))
    }

    fn iter(&self) -> impl Iterator<Item = (&Vec<i32>, &BigInt)> {
        self.0.iter().map(|(k, v)| (&k.0, v))
    }

    fn add(&mut self, e: Vec<i32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.0.entry(GradedKey(e)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nx: usize,
    ny: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(LaurentError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn polynomial(&mut self) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(self.nx, self.ny);
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        loop {
            let (m, c) = self.term()?;
            out.add_term(m, if negate { -c } else { c });
            match self.peek() {
                None => break,
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, BigInt)> {
        let mut coeff = BigInt::one();
        let mut exps = vec![0i64; self.nx + self.ny];
        loop {
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let d: BigInt = self.digits()?.parse().unwrap();
                    coeff *= d;
                }
                Some(v @ (b'x' | b'y')) => {
                    self.pos += 1;
                    let idx: usize = match self.digits()?.parse() {
                        Ok(i) => i,
                        Err(_) => return self.err("variable index too large"),
                    };
                    let (limit, offset) = if v == b'x' { (self.nx, 0) } else { (self.ny, self.nx) };
                    if idx == 0 || idx > limit {
                        return self.err(format!("{}{idx} is not a variable of this ring", v as char));
                    }
                    let mut e = 1i64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = self.peek() == Some(b'-');
                        if neg {
                            self.pos += 1;
                        }
                        e = match self.digits()?.parse::<i64>() {
                            Ok(v) => v,
                            Err(_) => return self.err("exponent too large"),
                        };
                        if neg {
                            e = -e;
                        }
                    }
                    exps[offset + idx - 1] += e;
                }
                _ => return self.err("expected a coefficient or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut raw = Vec::with_capacity(exps.len());
        for e in exps {
            match i32::try_from(e) {
                Ok(v) => raw.push(v),
                Err(_) => return self.err("exponent out of range"),
            }
        }
        let m = Monomial::from_raw(self.nx, raw)?;
        Ok((m, coeff))
    }
}

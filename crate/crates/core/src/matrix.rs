//! Exact integer matrices and the mutation rule.
//!
//! Entries are `i64` with checked arithmetic throughout: an overflow is
//! reported as [`MatrixError::Overflow`], never wrapped. Row/column accessors
//! are 0-based; mutation directions `k` are 1-based (`1..=n`), matching the
//! way mutation paths are written.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("mutation direction {k} is out of range 1..={n}")]
    DirectionOutOfRange { k: usize, n: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("exchange matrix is not sign-skew-symmetric at entries ({i},{j}) and ({j},{i})")]
    NotSignSkewSymmetric { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, MatrixError>;

/// `[a]_+ = max(a, 0)`.
#[inline]
pub fn positive_part(a: i64) -> i64 {
    a.max(0)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(MatrixError::Empty)?.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * first);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(MatrixError::Ragged {
                    row: i + 1,
                    expected: first,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), first, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        Ok(m)
    }

    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n, n)?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.rows {
            return Err(MatrixError::Shape(format!(
                "row block {start}..{end} of a matrix with {} rows",
                self.rows
            )));
        }
        Self::new(
            end - start,
            self.cols,
            self.data[start * self.cols..end * self.cols].to_vec(),
        )
    }

    /// `self` stacked on top of `below`.
    pub fn vstack(&self, below: &IntMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(MatrixError::Shape(format!(
                "cannot stack {} columns over {} columns",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Self::new(self.rows + below.rows, self.cols, data)
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i64 = 0;
                for l in 0..self.cols {
                    acc = self
                        .get(i, l)
                        .checked_mul(rhs.get(l, j))
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(MatrixError::Overflow("multiplying matrices"))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        let overflow = || MatrixError::Overflow("computing a determinant");
        for k in 0..n.saturating_sub(1) {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let lhs = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .ok_or_else(overflow)?;
                    let rhs = a[i * n + k]
                        .checked_mul(a[k * n + j])
                        .ok_or_else(overflow)?;
                    a[i * n + j] = lhs.checked_sub(rhs).ok_or_else(overflow)? / prev;
                }
            }
            prev = a[k * n + k];
        }
        let det = sign * a[n * n - 1];
        i64::try_from(det).map_err(|_| overflow())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .data
            .iter()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v:>width$}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = MatrixError;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

fn check_direction(k: usize, n: usize) -> Result<usize> {
    if k == 0 || k > n {
        Err(MatrixError::DirectionOutOfRange { k, n })
    } else {
        Ok(k - 1)
    }
}

/// Matrix mutation in direction `k` (1-based) of an `(m+n) x n` matrix.
///
/// Entries in row `k` or column `k` change sign; every other entry becomes
/// `a_ij + a_ik [-a_kj]_+ + [a_ik]_+ a_kj`.
pub fn mutate_matrix(a: &IntMatrix, k: usize) -> Result<IntMatrix> {
    let n = a.cols();
    if a.rows() < n {
        return Err(MatrixError::Shape(format!(
            "mutation needs at least as many rows as columns, got {}x{n}",
            a.rows()
        )));
    }
    let k = check_direction(k, n)?;
    let overflow = || MatrixError::Overflow("mutating a matrix");
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..n {
            let aij = a.get(i, j);
            let value = if i == k || j == k {
                aij.checked_neg().ok_or_else(overflow)?
            } else {
                let aik = a.get(i, k);
                let akj = a.get(k, j);
                let first = aik
                    .checked_mul(positive_part(-akj))
                    .ok_or_else(overflow)?;
                let second = positive_part(aik)
                    .checked_mul(akj)
                    .ok_or_else(overflow)?;
                aij.checked_add(first)
                    .and_then(|v| v.checked_add(second))
                    .ok_or_else(overflow)?
            };
            out.set(i, j, value);
        }
    }
    Ok(out)
}

fn require_square(b: &IntMatrix) -> Result<usize> {
    if b.is_square() {
        Ok(b.rows())
    } else {
        Err(MatrixError::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        })
    }
}

/// First pair `(i, j)` (0-based, `i <= j`) violating sign-skew-symmetry.
fn sign_skew_violation(b: &IntMatrix) -> Option<(usize, usize)> {
    let n = b.rows();
    for i in 0..n {
        for j in i..n {
            let (bij, bji) = (b.get(i, j), b.get(j, i));
            let ok = (bij == 0 && bji == 0) || bij.signum() * bji.signum() < 0;
            if !ok {
                return Some((i, j));
            }
        }
    }
    None
}

/// `b_ij b_ji < 0` or `b_ij = b_ji = 0` for every pair, diagonal included.
pub fn is_sign_skew_symmetric(b: &IntMatrix) -> Result<bool> {
    require_square(b)?;
    Ok(sign_skew_violation(b).is_none())
}

fn require_sign_skew(b: &IntMatrix) -> Result<usize> {
    let n = require_square(b)?;
    match sign_skew_violation(b) {
        Some((i, j)) => Err(MatrixError::NotSignSkewSymmetric { i: i + 1, j: j + 1 }),
        None => Ok(n),
    }
}

/// Whether the graph with an edge `i -> j` for every `b_ij > 0` has no
/// oriented cycle.
pub fn is_acyclic(b: &IntMatrix) -> Result<bool> {
    let n = require_sign_skew(b)?;
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut marks = vec![Mark::New; n];
    for root in 0..n {
        if marks[root] != Mark::New {
            continue;
        }
        // iterative DFS: (vertex, next neighbour to try)
        let mut stack = vec![(root, 0usize)];
        marks[root] = Mark::Open;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(w) = (*next..n).find(|&w| b.get(v, w) > 0) {
                *next = w + 1;
                match marks[w] {
                    Mark::Open => return Ok(false),
                    Mark::New => {
                        marks[w] = Mark::Open;
                        stack.push((w, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                marks[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    Ok(true)
}

/// Positive integer diagonal `S` with `S B` skew-symmetric, normalized so
/// each connected component has gcd 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkewSymmetrizer {
    diag: Vec<i64>,
}

impl SkewSymmetrizer {
    /// A caller-supplied diagonal; entries must be positive.
    pub fn new(diag: Vec<i64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(MatrixError::Empty);
        }
        if let Some(&bad) = diag.iter().find(|&&s| s <= 0) {
            return Err(MatrixError::Shape(format!(
                "symmetrizer entries must be positive, found {bad}"
            )));
        }
        Ok(Self { diag })
    }

    pub fn diag(&self) -> &[i64] {
        &self.diag
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.diag).expect("symmetrizer has positive rank")
    }

    /// Least common multiple of the diagonal entries.
    pub fn lcm(&self) -> i64 {
        self.diag.iter().fold(1, |acc, &s| acc.lcm(&s))
    }

    /// `lcm(S) * S^{-1}`, an integer diagonal matrix.
    pub fn scaled_inverse(&self) -> IntMatrix {
        let l = self.lcm();
        let d: Vec<i64> = self.diag.iter().map(|&s| l / s).collect();
        IntMatrix::diagonal(&d).expect("symmetrizer has positive rank")
    }

    /// Whether `S B` is exactly skew-symmetric.
    pub fn symmetrizes(&self, b: &IntMatrix) -> bool {
        let n = self.diag.len();
        if b.rows() != n || b.cols() != n {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                let lhs = (self.diag[i] as i128) * (b.get(i, j) as i128);
                let rhs = (self.diag[j] as i128) * (b.get(j, i) as i128);
                lhs == -rhs
            })
        })
    }
}

/// Propagates the ratios `s_j / s_i = -b_ij / b_ji` over each connected
/// component of the underlying graph, clears denominators, and verifies the
/// result globally. `None` when the ratio constraints are inconsistent.
pub fn find_skew_symmetrizer(b: &IntMatrix) -> Result<Option<SkewSymmetrizer>> {
    let n = require_sign_skew(b)?;
    let mut ratio: Vec<Option<Ratio<i128>>> = vec![None; n];
    let mut diag = vec![0i64; n];
    for root in 0..n {
        if ratio[root].is_some() {
            continue;
        }
        ratio[root] = Some(Ratio::from_integer(1));
        let mut component = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let si = ratio[i].expect("visited vertex has a ratio");
            #[allow(clippy::needless_range_loop)]
            for j in 0..n {
                let (bij, bji) = (b.get(i, j), b.get(j, i));
                if i == j || bij == 0 {
                    continue;
                }
                // s_i b_ij = -s_j b_ji
                let sj = si * Ratio::new(bij as i128, -(bji as i128));
                match ratio[j] {
                    None => {
                        ratio[j] = Some(sj);
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != sj => return Ok(None),
                    Some(_) => {}
                }
            }
        }
        let denom_lcm = component
            .iter()
            .fold(1i128, |acc, &v| acc.lcm(ratio[v].unwrap().denom()));
        let scaled: Vec<i128> = component
            .iter()
            .map(|&v| (ratio[v].unwrap() * denom_lcm).to_integer())
            .collect();
        let g = scaled.iter().fold(0i128, |acc, v| acc.gcd(v));
        for (&v, s) in component.iter().zip(scaled) {
            diag[v] = i64::try_from(s / g)
                .map_err(|_| MatrixError::Overflow("normalizing a skew-symmetrizer"))?;
        }
    }
    let s = SkewSymmetrizer { diag };
    Ok(s.symmetrizes(b).then_some(s))
}

/// Coefficient-matrix mutation: the bottom block of [`mutate_matrix`]
/// applied to `B` stacked over `C`.
pub fn c_mutate(bt: &IntMatrix, ct: &IntMatrix, k: usize) -> Result<IntMatrix> {
    let n = require_square(bt)?;
    if ct.rows() != n || ct.cols() != n {
        return Err(MatrixError::Shape(format!(
            "C is {}x{}, expected {n}x{n}",
            ct.rows(),
            ct.cols()
        )));
    }
    mutate_matrix(&bt.vstack(ct)?, k)?.row_block(n, 2 * n)
}

/// G-matrix recurrence. Columns other than `k` are unchanged; column `k`
/// becomes `-g_k + sum_l g_l [b_lk]_+ - sum_l b0_l [c_lk]_+` where `g_l`,
/// `b0_l` are columns of `G_t` and `B_{t_0}`.
pub fn g_mutate(
    gt: &IntMatrix,
    bt: &IntMatrix,
    ct: &IntMatrix,
    b0: &IntMatrix,
    k: usize,
) -> Result<IntMatrix> {
    let n = require_square(gt)?;
    for (name, m) in [("B_t", bt), ("C_t", ct), ("B_0", b0)] {
        if m.rows() != n || m.cols() != n {
            return Err(MatrixError::Shape(format!(
                "{name} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let k = check_direction(k, n)?;
    let overflow = || MatrixError::Overflow("applying the G-matrix recurrence");
    let mut out = gt.clone();
    for i in 0..n {
        let mut acc = gt.get(i, k).checked_neg().ok_or_else(overflow)?;
        for l in 0..n {
            let plus = gt
                .get(i, l)
                .checked_mul(positive_part(bt.get(l, k)))
                .ok_or_else(overflow)?;
            let minus = b0
                .get(i, l)
                .checked_mul(positive_part(ct.get(l, k)))
                .ok_or_else(overflow)?;
            acc = acc
                .checked_add(plus)
                .and_then(|v| v.checked_sub(minus))
                .ok_or_else(overflow)?;
        }
        out.set(i, k, acc);
    }
    Ok(out)
}

/// Extended exchange matrix `B~ = (B over C)` of shape `(m+n) x n`.
///
/// The top block is sign-skew-symmetric at construction and after every
/// mutation; a violation is an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedExchangeMatrix {
    n: usize,
    m: usize,
    full: IntMatrix,
}

impl ExtendedExchangeMatrix {
    pub fn new(full: IntMatrix, n: usize) -> Result<Self> {
        if full.cols() != n || full.rows() < n {
            return Err(MatrixError::Shape(format!(
                "extended matrix is {}x{}, expected (m+{n})x{n}",
                full.rows(),
                full.cols()
            )));
        }
        require_sign_skew(&full.row_block(0, n)?)?;
        Ok(Self {
            n,
            m: full.rows() - n,
            full,
        })
    }

    /// `B` stacked over the identity.
    pub fn principal(b: &IntMatrix) -> Result<Self> {
        let n = require_sign_skew(b)?;
        Self::new(b.vstack(&IntMatrix::identity(n)?)?, n)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn frozen(&self) -> usize {
        self.m
    }

    pub fn full(&self) -> &IntMatrix {
        &self.full
    }

    pub fn exchange(&self) -> IntMatrix {
        self.full.row_block(0, self.n).expect("rank is positive")
    }

    /// The bottom `m x n` block. Panics when there are no frozen rows.
    pub fn coefficients(&self) -> IntMatrix {
        self.full
            .row_block(self.n, self.n + self.m)
            .expect("extended matrix has frozen rows")
    }

    /// Whether the bottom block is the identity (principal coefficients).
    pub fn is_principal(&self) -> bool {
        self.m == self.n && self.coefficients() == IntMatrix::identity(self.n).unwrap()
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        Self::new(mutate_matrix(&self.full, k)?, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(3), 3);
        assert_eq!(positive_part(-2), 0);
        assert_eq!(positive_part(0), 0);
    }

    #[test]
    fn mutate_a2_principal() {
        let a = m(&[&[0, 1], &[-1, 0], &[1, 0], &[0, 1]]);
        let expected = m(&[&[0, -1], &[1, 0], &[-1, 1], &[0, 1]]);
        assert_eq!(mutate_matrix(&a, 1).unwrap(), expected);
        assert_eq!(mutate_matrix(&expected, 1).unwrap(), a);
    }

    #[test]
    fn mutate_b2_block() {
        let b = m(&[&[0, 1], &[-2, 0]]);
        assert_eq!(mutate_matrix(&b, 2).unwrap(), m(&[&[0, -1], &[2, 0]]));
    }

    #[test]
    fn mutate_rejects_bad_direction() {
        let b = m(&[&[0, 1], &[-1, 0]]);
        assert_eq!(
            mutate_matrix(&b, 0),
            Err(MatrixError::DirectionOutOfRange { k: 0, n: 2 })
        );
        assert_eq!(
            mutate_matrix(&b, 3),
            Err(MatrixError::DirectionOutOfRange { k: 3, n: 2 })
        );
    }

    #[test]
    fn mutate_reports_overflow() {
        let b = m(&[&[0, i64::MAX], &[-1, 0], &[i64::MAX, 1]]);
        assert!(matches!(
            mutate_matrix(&b, 2),
            Err(MatrixError::Overflow(_))
        ));
        let b = m(&[&[0, 1], &[i64::MIN, 0]]);
        assert!(matches!(
            mutate_matrix(&b, 1),
            Err(MatrixError::Overflow(_))
        ));
    }

    #[test]
    fn sign_skew_symmetry() {
        assert!(is_sign_skew_symmetric(&m(&[&[0, 1], &[-1, 0]])).unwrap());
        assert!(!is_sign_skew_symmetric(&m(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(
            is_sign_skew_symmetric(&m(&[&[0, 1, 1], &[-1, 0, 1], &[-2, -3, 0]])).unwrap()
        );
        assert!(!is_sign_skew_symmetric(&m(&[&[1]])).unwrap());
        assert!(matches!(
            is_sign_skew_symmetric(&m(&[&[0, 1]])),
            Err(MatrixError::NotSquare { .. })
        ));
    }

    #[test]
    fn acyclicity() {
        assert!(is_acyclic(&m(&[&[0, 1, 1], &[-1, 0, 1], &[-2, -3, 0]])).unwrap());
        assert!(!is_acyclic(&m(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]])).unwrap());
        assert!(is_acyclic(&m(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(matches!(
            is_acyclic(&m(&[&[0, 1], &[1, 0]])),
            Err(MatrixError::NotSignSkewSymmetric { i: 1, j: 2 })
        ));
    }

    #[test]
    fn symmetrizers() {
        let s = find_skew_symmetrizer(&m(&[&[0, 1], &[-2, 0]])).unwrap().unwrap();
        assert_eq!(s.diag(), &[2, 1]);
        let s = find_skew_symmetrizer(&m(&[&[0, 1], &[-1, 0]])).unwrap().unwrap();
        assert_eq!(s.diag(), &[1, 1]);
        let s = find_skew_symmetrizer(&m(&[&[0, 1], &[-3, 0]])).unwrap().unwrap();
        assert_eq!(s.diag(), &[3, 1]);
        assert_eq!(
            find_skew_symmetrizer(&m(&[&[0, 1, 1], &[-1, 0, 1], &[-2, -3, 0]])).unwrap(),
            None
        );
    }

    #[test]
    fn symmetrizer_components_are_normalized_separately() {
        // two components: {1,2} with s1 = 2 s2, and the isolated vertex 3
        let b = m(&[&[0, 1, 0], &[-2, 0, 0], &[0, 0, 0]]);
        let s = find_skew_symmetrizer(&b).unwrap().unwrap();
        assert_eq!(s.diag(), &[2, 1, 1]);
        assert_eq!(s.lcm(), 2);
        assert_eq!(s.scaled_inverse(), IntMatrix::diagonal(&[1, 2, 2]).unwrap());
    }

    #[test]
    fn c_mutate_examples() {
        let b = m(&[&[0, 1], &[-1, 0]]);
        let c = IntMatrix::identity(2).unwrap();
        assert_eq!(c_mutate(&b, &c, 1).unwrap(), m(&[&[-1, 1], &[0, 1]]));
        // column 2 flips; c_21 + c_22 [-b_21]_+ + [c_22]_+ b_21 = 0 + 1 - 1 = 0
        assert_eq!(c_mutate(&b, &c, 2).unwrap(), m(&[&[1, 0], &[0, -1]]));
    }

    #[test]
    fn g_mutate_a2_first_step() {
        let b = m(&[&[0, 1], &[-1, 0]]);
        let i = IntMatrix::identity(2).unwrap();
        let g = g_mutate(&i, &b, &i, &b, 1).unwrap();
        assert_eq!(g, m(&[&[-1, 0], &[1, 1]]));
        assert_eq!(g.column(1), i.column(1));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(m(&[&[-1, 0], &[1, 1]]).determinant().unwrap(), -1);
        assert_eq!(
            m(&[&[0, 2, 1], &[1, 0, 0], &[3, 1, 1]]).determinant().unwrap(),
            -1
        );
        assert_eq!(m(&[&[1, 2], &[2, 4]]).determinant().unwrap(), 0);
    }

    #[test]
    fn extended_matrix_views() {
        let b = m(&[&[0, 1], &[-2, 0]]);
        let ext = ExtendedExchangeMatrix::principal(&b).unwrap();
        assert_eq!(ext.exchange(), b);
        assert_eq!(ext.coefficients(), IntMatrix::identity(2).unwrap());
        assert!(ext.is_principal());
        assert!(!ext.mutate(1).unwrap().is_principal());
        assert!(ExtendedExchangeMatrix::principal(&m(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn serde_as_nested_rows() {
        let b = m(&[&[0, 1], &[-1, 0]]);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, "[[0,1],[-1,0]]");
        assert_eq!(serde_json::from_str::<IntMatrix>(&json).unwrap(), b);
        assert!(serde_json::from_str::<IntMatrix>("[[0,1],[2]]").is_err());
        assert!(serde_json::from_str::<IntMatrix>("[]").is_err());
    }
}

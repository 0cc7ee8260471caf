//! Exact integer matrices with Smith and Hermite normal forms.
//!
//! Entries are arbitrary-precision: normal-form computations can blow up
//! intermediate coefficients far past any fixed width. Empty matrices are
//! legal and act as zero maps.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Convenience constructor from row slices; rows must have equal length.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn col_vec(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).clone());
            }
        }
        out
    }

    /// Matrix product; panics on incompatible shapes (programmer error).
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let add = a * rhs.at(k, c);
                    let cur = out.at(r, c) + add;
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn negated(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Vertical concatenation [self; bottom].
    pub fn vstack(&self, bottom: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, bottom.cols, "vstack column mismatch");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&bottom.entries);
        IntMatrix {
            rows: self.rows + bottom.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Copies `block` into self with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.at(r, c).clone());
            }
        }
    }

    /// Horizontal concatenation [self | right].
    pub fn hstack(&self, right: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, right.rows, "hstack row mismatch");
        let mut out = IntMatrix::zero(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.at(r, c).clone());
            }
            for c in 0..right.cols {
                out.set(r, self.cols + c, right.at(r, c).clone());
            }
        }
        out
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zero(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(ro + r, co + c, b.at(r, c).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = q * self.at(src, c);
            let v = self.at(dst, c) + add;
            self.set(dst, c, v);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = q * self.at(r, src);
            let v = self.at(r, dst) + add;
            self.set(r, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c);
            self.set(r, c, v);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant requires a square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.at(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.at(k, k).clone();
        }
        Ok(m.at(n - 1, n - 1) * sign)
    }

    fn smallest_nonzero_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for r in t..self.rows {
            for c in t..self.cols {
                let v = self.at(r, c);
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((br, bc)) if self.at(br, bc).abs() <= v.abs() => {}
                    _ => best = Some((r, c)),
                }
            }
        }
        best
    }

    /// Smith normal form: U * A * V = D with U, V unimodular and the
    /// diagonal of D a nonnegative divisibility chain.
    ///
    /// Pivots are chosen as the smallest-absolute-value nonzero entry of the
    /// trailing submatrix, which keeps coefficient growth tame at desk scale.
    pub fn smith_normal_form(&self) -> SnfResult {
        let mut m = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let dim = self.rows.min(self.cols);
        let mut t = 0;
        while t < dim {
            if m.smallest_nonzero_from(t).is_none() {
                break;
            }
            loop {
                let (pi, pj) = m.smallest_nonzero_from(t).expect("nonzero pivot");
                m.swap_rows(t, pi);
                u.swap_rows(t, pi);
                m.swap_cols(t, pj);
                v.swap_cols(t, pj);

                for r in t + 1..m.rows {
                    if !m.at(r, t).is_zero() {
                        let q = -(m.at(r, t) / m.at(t, t));
                        m.add_row_multiple(r, t, &q);
                        u.add_row_multiple(r, t, &q);
                    }
                }
                for c in t + 1..m.cols {
                    if !m.at(t, c).is_zero() {
                        let q = -(m.at(t, c) / m.at(t, t));
                        m.add_col_multiple(c, t, &q);
                        v.add_col_multiple(c, t, &q);
                    }
                }
                let col_clean = (t + 1..m.rows).all(|r| m.at(r, t).is_zero());
                let row_clean = (t + 1..m.cols).all(|c| m.at(t, c).is_zero());
                if !col_clean || !row_clean {
                    continue;
                }
                // The pivot must divide the rest of the submatrix for the
                // divisibility chain; drag an offending row in and repeat.
                let offender = (t + 1..m.rows)
                    .flat_map(|r| (t + 1..m.cols).map(move |c| (r, c)))
                    .find(|&(r, c)| !(m.at(r, c) % m.at(t, t)).is_zero());
                match offender {
                    Some((r, _)) => {
                        m.add_row_multiple(t, r, &BigInt::one());
                        u.add_row_multiple(t, r, &BigInt::one());
                    }
                    None => break,
                }
            }
            if m.at(t, t).is_negative() {
                m.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        SnfResult { u, d: m, v }
    }

    /// Row-style Hermite normal form: returns (H, U) with U unimodular,
    /// U * A = H, pivots positive, entries above each pivot reduced into
    /// [0, pivot).
    pub fn hermite_normal_form(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..h.cols {
            if r == h.rows {
                break;
            }
            loop {
                let nz: Vec<usize> = (r..h.rows).filter(|&i| !h.at(i, c).is_zero()).collect();
                if nz.len() <= 1 {
                    break;
                }
                let pivot = *nz
                    .iter()
                    .min_by_key(|&&i| h.at(i, c).abs())
                    .expect("nonempty");
                for &j in &nz {
                    if j == pivot {
                        continue;
                    }
                    let q = -(h.at(j, c) / h.at(pivot, c));
                    h.add_row_multiple(j, pivot, &q);
                    u.add_row_multiple(j, pivot, &q);
                }
            }
            let Some(inz) = (r..h.rows).find(|&i| !h.at(i, c).is_zero()) else {
                continue;
            };
            h.swap_rows(r, inz);
            u.swap_rows(r, inz);
            if h.at(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            for i in 0..r {
                let q = -h.at(i, c).div_floor(h.at(r, c));
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
            }
            r += 1;
        }
        (h, u)
    }

    /// Solves self * X = rhs over the integers; None when no integral
    /// solution exists.
    pub fn solve(&self, rhs: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let snf = self.smith_normal_form();
        let ub = snf.u.mul(rhs);
        let dim = self.rows.min(self.cols);
        let mut y = IntMatrix::zero(self.cols, rhs.cols);
        for j in 0..rhs.cols {
            for i in 0..self.rows {
                if i < dim && !snf.d.at(i, i).is_zero() {
                    let (q, rem) = ub.at(i, j).div_rem(snf.d.at(i, i));
                    if !rem.is_zero() {
                        return None;
                    }
                    y.set(i, j, q);
                } else if !ub.at(i, j).is_zero() {
                    return None;
                }
            }
        }
        Some(snf.v.mul(&y))
    }

    /// Basis (as column vectors) of { x : self * x = 0 }.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let snf = self.smith_normal_form();
        let dim = self.rows.min(self.cols);
        (0..self.cols)
            .filter(|&j| j >= dim || snf.d.at(j, j).is_zero())
            .map(|j| snf.v.col_vec(j))
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                self.row(r)
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation: U * A * V = D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries of D, in chain order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let dim = self.d.rows().min(self.d.cols());
        (0..dim)
            .map(|i| self.d.at(i, i).clone())
            .filter(|v| !v.is_zero())
            .collect()
    }

    /// Diagonal entries including zeros (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let dim = self.d.rows().min(self.d.cols());
        (0..dim).map(|i| self.d.at(i, i).clone()).collect()
    }
}

// JSON form: {"rows": n, "cols": m, "entries": [[..], ..]} with entries as
// decimal strings so arbitrary precision survives every consumer. Plain JSON
// integers are accepted on input.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<EntryJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Int(i64),
    Str(String),
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| EntryJson::Str(e.to_string())).collect())
            .collect();
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.entries.len() != raw.rows {
            return Err(D::Error::custom("entry rows do not match row count"));
        }
        let mut entries = Vec::with_capacity(raw.rows * raw.cols);
        for row in raw.entries {
            if row.len() != raw.cols {
                return Err(D::Error::custom("entry row length does not match column count"));
            }
            for e in row {
                entries.push(match e {
                    EntryJson::Int(v) => BigInt::from(v),
                    EntryJson::Str(s) => s
                        .trim()
                        .parse::<BigInt>()
                        .map_err(|_| D::Error::custom(format!("bad integer literal {s:?}")))?,
                });
            }
        }
        IntMatrix::new(raw.rows, raw.cols, entries).map_err(D::Error::custom)
    }
}

//! Dense linear algebra over GF(2).
//!
//! Vectors and matrices are bit-packed into 64-bit words. A matrix is a
//! sequence of row vectors, so row operations (the workhorse of Gaussian
//! elimination) are whole-word XORs. Values are immutable once built:
//! every operation that needs elimination works on a private copy, and
//! pivoting always takes the smallest available row or column index, so
//! results are deterministic.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Fixed-length vector over GF(2).
///
/// Bits beyond `len` in the final word are kept zero, so equality and
/// hashing on the raw words are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Build from explicit bits, index 0 first.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    ///
    /// Panics if `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// # Panics
    ///
    /// Panics if `i >= len`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// XOR `other` into `self`.
    ///
    /// # Panics
    ///
    /// Panics if the lengths differ.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterate over indices of set bits in increasing order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// The vector as a single word, lowest index in bit 0.
    /// Available only for lengths up to 64.
    pub fn as_word(&self) -> Option<u64> {
        if self.len > WORD_BITS {
            None
        } else {
            Some(self.words.first().copied().unwrap_or(0))
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Iterator over set-bit indices of a [`BitVector`].
pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * WORD_BITS + bit)
    }
}

/// Dense matrix over GF(2), stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        BitMatrix {
            n_rows,
            n_cols,
            rows: (0..n_rows).map(|_| BitVector::zeros(n_cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Assemble from row vectors. `n_cols` is explicit so that matrices
    /// with zero rows still carry a width.
    pub fn from_rows(n_cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    left: (i, r.len()),
                    right: (i, n_cols),
                });
            }
        }
        Ok(BitMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// # Panics
    ///
    /// Panics if `r >= n_rows`.
    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Column `c` as a vector of length `n_rows`.
    fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.n_rows);
        for r in 0..self.n_rows {
            if self.rows[r].get(c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            for c in self.rows[r].ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Rank by forward elimination on a private copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n_cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Matrix product over GF(2). Each output row is the XOR of the rows
    /// of `other` selected by the set bits of the corresponding row of
    /// `self`.
    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch {
                left: (self.n_rows, self.n_cols),
                right: (other.n_rows, other.n_cols),
            });
        }
        let mut rows = Vec::with_capacity(self.n_rows);
        for r in 0..self.n_rows {
            let mut acc = BitVector::zeros(other.n_cols);
            for j in self.rows[r].ones() {
                acc.xor_assign(&other.rows[j]);
            }
            rows.push(acc);
        }
        BitMatrix::from_rows(other.n_cols, rows)
    }

    /// Inverse by Gauss-Jordan elimination. The 0x0 matrix is its own
    /// inverse. A singular input reports the rank elimination reached.
    pub fn invert(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        let mut a = self.rows.clone();
        let mut inv: Vec<BitVector> = BitMatrix::identity(n).rows;
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| a[r].get(col)) else {
                continue;
            };
            a.swap(rank, p);
            inv.swap(rank, p);
            let pivot_a = a[rank].clone();
            let pivot_inv = inv[rank].clone();
            for r in 0..n {
                if r != rank && a[r].get(col) {
                    a[r].xor_assign(&pivot_a);
                    inv[r].xor_assign(&pivot_inv);
                }
            }
            rank += 1;
        }
        if rank < n {
            return Err(Error::Singular { rank });
        }
        // With full rank the pivot for column c landed in row c, so `a`
        // is the identity and `inv` holds the inverse.
        BitMatrix::from_rows(n, inv)
    }

    /// Basis of the right null space {x : self * x = 0}.
    ///
    /// Columns are processed left to right through one elimination pass;
    /// every dependent column contributes exactly one basis vector, so
    /// the result has n_cols - rank elements and is deterministic.
    pub fn null_space(&self) -> Vec<BitVector> {
        let mut ech = ColumnEchelon::new(self.n_rows, self.n_cols);
        let mut basis = Vec::new();
        for c in 0..self.n_cols {
            if let Some(combo) = ech.push(self.column(c)) {
                basis.push(combo);
            }
        }
        basis
    }

    /// Greedy left-to-right selection of `needed` linearly independent
    /// columns. Returns 0-based indices in increasing order; by the
    /// exchange property of linear independence this is the
    /// lexicographically smallest such set.
    pub fn select_independent_columns(&self, needed: usize) -> Result<Vec<usize>> {
        let mut ech = ColumnEchelon::new(self.n_rows, self.n_cols);
        let mut picked = Vec::with_capacity(needed);
        for c in 0..self.n_cols {
            if picked.len() == needed {
                break;
            }
            if ech.push(self.column(c)).is_none() {
                picked.push(c);
            }
        }
        if picked.len() < needed {
            return Err(Error::RankDeficient {
                rank: picked.len(),
                needed,
            });
        }
        Ok(picked)
    }

    /// Submatrix picked by 0-based row and column index lists, both
    /// strictly increasing. Empty lists give the 0x0 matrix.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<BitMatrix> {
        validate_indices(rows, self.n_rows, "row")?;
        validate_indices(cols, self.n_cols, "column")?;
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                if self.rows[r].get(c) {
                    out.rows[ri].set(ci, true);
                }
            }
        }
        Ok(out)
    }

    /// Whether a square matrix has full rank. The 0x0 matrix counts as
    /// invertible.
    pub fn is_invertible(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        Ok(self.rank() == self.n_rows)
    }

    /// Parse the plain-text format produced by `Display`: a header line
    /// `rows cols`, then one line of 0/1 characters per row.
    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        let n_rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?;
        let n_cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in header: {header:?}")));
        }
        let mut rows = Vec::with_capacity(n_rows);
        for r in 0..n_rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {r}")))?;
            if line.len() != n_cols {
                return Err(Error::Parse(format!(
                    "row {r} has {} characters, expected {n_cols}",
                    line.len()
                )));
            }
            let mut v = BitVector::zeros(n_cols);
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => v.set(c, true),
                    other => {
                        return Err(Error::Parse(format!(
                            "row {r} column {c}: unexpected character {other:?}"
                        )))
                    }
                }
            }
            rows.push(v);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing content after matrix rows".into()));
        }
        BitMatrix::from_rows(n_cols, rows)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n_rows, self.n_cols)?;
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{}", self.n_rows, self.n_cols)
    }
}

fn validate_indices(indices: &[usize], limit: usize, what: &str) -> Result<()> {
    for (i, &idx) in indices.iter().enumerate() {
        if idx >= limit {
            return Err(Error::BadIndices(format!(
                "{what} index {idx} out of range (limit {limit})"
            )));
        }
        if i > 0 && indices[i - 1] >= idx {
            return Err(Error::BadIndices(format!(
                "{what} indices must be strictly increasing"
            )));
        }
    }
    Ok(())
}

/// Incremental column elimination with dependency tracking.
///
/// Columns are pushed one at a time. A column that is independent of
/// everything seen so far becomes a pivot; a dependent column yields the
/// combination of previously pushed columns (plus itself) that sums to
/// zero. Feeding every column of a matrix through reproduces its rank
/// and null space in one pass, and callers that learn columns lazily
/// (such as the algebraic immunity search) can stop early.
pub(crate) struct ColumnEchelon {
    n_rows: usize,
    capacity: usize,
    pushed: usize,
    /// (pivot row, reduced column, combination of original columns).
    pivots: Vec<(usize, BitVector, BitVector)>,
}

impl ColumnEchelon {
    /// `capacity` is the total number of columns that will ever be
    /// pushed; combination vectors are sized to it up front.
    pub(crate) fn new(n_rows: usize, capacity: usize) -> Self {
        ColumnEchelon {
            n_rows,
            capacity,
            pushed: 0,
            pivots: Vec::new(),
        }
    }

    /// Push the next column. Returns `Some(combination)` when the column
    /// is dependent on earlier ones; the combination has a set bit for
    /// every participating column, including this one.
    pub(crate) fn push(&mut self, mut col: BitVector) -> Option<BitVector> {
        assert_eq!(col.len(), self.n_rows, "column has wrong height");
        assert!(self.pushed < self.capacity, "more columns than declared");
        let mut combo = BitVector::zeros(self.capacity);
        for (pr, pcol, pcombo) in &self.pivots {
            if col.get(*pr) {
                col.xor_assign(pcol);
                combo.xor_assign(pcombo);
            }
        }
        combo.set(self.pushed, true);
        self.pushed += 1;
        match col.first_one() {
            None => Some(combo),
            Some(r) => {
                self.pivots.push((r, col, combo));
                None
            }
        }
    }
}

//! Boolean functions as bit-packed truth tables, together with points,
//! monomials, and algebraic normal forms.
//!
//! A point X = (x1, ..., xn) is identified with the integer
//! idx(X) = sum of x_i * 2^(n-i), so x1 is the most significant bit.
//! Truth tables store f(X) at bit idx(X), and every ordering and
//! serialization in the crate is derived from this one bijection.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Largest supported arity. Tables are 2^n bits, so this caps memory at
/// one megabit per function.
pub const MAX_ARITY: usize = 20;

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::InvalidArity(format!(
            "arity must be between 1 and {MAX_ARITY}, got {n}"
        )));
    }
    Ok(())
}

/// Reverse the low `n` bits, mapping between point index space (x1 most
/// significant) and variable-set space (x1 least significant).
#[inline]
fn reverse_low_bits(bits: u32, n: usize) -> u32 {
    bits.reverse_bits() >> (32 - n)
}

/// One evaluation point in {0,1}^n.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    n: usize,
    index: u32,
}

impl Point {
    /// Point with the given index; `index < 2^n` is required.
    pub fn new(n: usize, index: u32) -> Result<Self> {
        check_arity(n)?;
        if u64::from(index) >= 1u64 << n {
            return Err(Error::OutOfRange(format!(
                "point index {index} out of range for {n} variables"
            )));
        }
        Ok(Point { n, index })
    }

    /// Point whose set coordinates are given by a variable bitmask with
    /// bit i-1 for x_i, the inverse of [`var_mask`](Self::var_mask).
    pub fn from_var_mask(n: usize, mask: u32) -> Result<Self> {
        check_arity(n)?;
        if u64::from(mask) >= 1u64 << n {
            return Err(Error::OutOfRange(format!(
                "variable mask {mask:#x} out of range for {n} variables"
            )));
        }
        Ok(Point {
            n,
            index: reverse_low_bits(mask, n),
        })
    }

    /// Build from coordinates, x1 first.
    pub fn from_coords(coords: &[bool]) -> Result<Self> {
        check_arity(coords.len())?;
        let mut index = 0u32;
        for &c in coords {
            index = (index << 1) | u32::from(c);
        }
        Ok(Point {
            n: coords.len(),
            index,
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Hamming weight of the point.
    pub fn weight(&self) -> u32 {
        self.index.count_ones()
    }

    /// Coordinate x_i, 1-based.
    pub fn coord(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "coordinate index out of range");
        (self.index >> (self.n - i)) & 1 == 1
    }

    /// Bitmask over variables with bit i-1 set when x_i = 1.
    pub fn var_mask(&self) -> u32 {
        reverse_low_bits(self.index, self.n)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            f.write_str(if self.coord(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A monomial: a product of distinct variables, stored as a bitmask with
/// bit i-1 for variable x_i. The empty product is the constant 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    vars: u32,
}

impl Monomial {
    /// The constant-1 monomial.
    pub fn constant() -> Self {
        Monomial { vars: 0 }
    }

    /// Product of the given variables, 1-based indices.
    pub fn from_vars(vars: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &v in vars {
            if v == 0 || v > MAX_ARITY {
                return Err(Error::OutOfRange(format!(
                    "variable index {v} out of range"
                )));
            }
            mask |= 1 << (v - 1);
        }
        Ok(Monomial { vars: mask })
    }

    pub(crate) fn from_mask(vars: u32) -> Self {
        Monomial { vars }
    }

    pub fn degree(&self) -> usize {
        self.vars.count_ones() as usize
    }

    /// Variable indices in increasing order, 1-based.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut m = self.vars;
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }

    pub fn var_mask(&self) -> u32 {
        self.vars
    }

    /// Largest variable index used, or 0 for the constant.
    pub fn max_var(&self) -> usize {
        if self.vars == 0 {
            0
        } else {
            32 - self.vars.leading_zeros() as usize
        }
    }

    /// Value of the monomial at a point: 1 iff every variable in the
    /// product is 1 there.
    pub fn evaluate(&self, p: &Point) -> Result<bool> {
        if self.max_var() > p.arity() {
            return Err(Error::ArityMismatch {
                expected: self.max_var(),
                actual: p.arity(),
            });
        }
        Ok(self.vars & p.var_mask() == self.vars)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Canonical monomial order: ascending degree, then ascending
/// lexicographic order of the sorted variable tuple. For masks with
/// bit i-1 for x_i the tuple order coincides with ascending mask value.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.vars).cmp(&(other.degree(), other.vars))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A Boolean function given by its truth table.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BooleanFunction {
    n: usize,
    table: BitVector,
}

impl BooleanFunction {
    /// Wrap a truth table; its length must be exactly 2^n.
    pub fn new(n: usize, table: BitVector) -> Result<Self> {
        check_arity(n)?;
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: (table.len(), 1),
                right: (1 << n, 1),
            });
        }
        Ok(BooleanFunction { n, table })
    }

    /// The constant function.
    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_arity(n)?;
        let mut table = BitVector::zeros(1 << n);
        if value {
            for i in 0..1 << n {
                table.set(i, true);
            }
        }
        BooleanFunction::new(n, table)
    }

    /// The majority-type indicator for odd n = 2t+1: value `a` on points
    /// of weight at most t and the complement of `a` elsewhere. With
    /// a = true this is the canonical base function of the construction;
    /// it is balanced and attains algebraic immunity t+1.
    pub fn majority_indicator(n: usize, a: bool) -> Result<Self> {
        check_arity(n)?;
        if n % 2 == 0 {
            return Err(Error::InvalidArity(format!(
                "majority indicator needs an odd arity, got {n}"
            )));
        }
        let t = (n - 1) / 2;
        let mut table = BitVector::zeros(1 << n);
        for idx in 0..1u32 << n {
            let low = idx.count_ones() as usize <= t;
            table.set(idx as usize, low == a);
        }
        BooleanFunction::new(n, table)
    }

    /// Uniformly random truth table.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        check_arity(n)?;
        let mut table = BitVector::zeros(1 << n);
        for i in 0..1 << n {
            if rng.gen::<bool>() {
                table.set(i, true);
            }
        }
        BooleanFunction::new(n, table)
    }

    /// Uniformly random balanced function: a random half of the points
    /// form the onset.
    pub fn random_balanced(n: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let mut order: Vec<usize> = (0..size).collect();
        for i in 0..size - 1 {
            let j = i + rng.gen_range(0..size - i);
            order.swap(i, j);
        }
        let mut table = BitVector::zeros(size);
        for &idx in order.iter().take(size / 2) {
            table.set(idx, true);
        }
        BooleanFunction::new(n, table)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &BitVector {
        &self.table
    }

    /// Value at a raw point index.
    ///
    /// # Panics
    ///
    /// Panics if `idx >= 2^n`.
    #[inline]
    pub fn value_at(&self, idx: u32) -> bool {
        self.table.get(idx as usize)
    }

    pub fn eval(&self, p: &Point) -> Result<bool> {
        if p.arity() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                actual: p.arity(),
            });
        }
        Ok(self.value_at(p.index()))
    }

    /// Number of points where the function is 1.
    pub fn weight(&self) -> u64 {
        self.table.count_ones() as u64
    }

    pub fn is_balanced(&self) -> bool {
        self.weight() == 1u64 << (self.n - 1)
    }

    /// f + 1: flip every table entry.
    pub fn complement(&self) -> BooleanFunction {
        let mut table = self.table.clone();
        for i in 0..table.len() {
            table.set(i, !table.get(i));
        }
        BooleanFunction { n: self.n, table }
    }

    /// Flip the value on a set of points. Duplicates in the input count
    /// once.
    pub fn flip_points(&self, points: &[Point]) -> Result<BooleanFunction> {
        let mut seen = BitVector::zeros(1 << self.n);
        for p in points {
            if p.arity() != self.n {
                return Err(Error::ArityMismatch {
                    expected: self.n,
                    actual: p.arity(),
                });
            }
            seen.set(p.index() as usize, true);
        }
        let mut table = self.table.clone();
        for idx in seen.ones() {
            table.set(idx, !table.get(idx));
        }
        Ok(BooleanFunction { n: self.n, table })
    }

    /// Pointwise product (logical AND) of two functions.
    pub fn product(&self, other: &BooleanFunction) -> Result<BooleanFunction> {
        if other.n != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let mut table = BitVector::zeros(1 << self.n);
        for i in 0..1 << self.n {
            table.set(i, self.table.get(i) && other.table.get(i));
        }
        Ok(BooleanFunction { n: self.n, table })
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }

    /// Algebraic normal form, computed by the binary Moebius transform
    /// over the subset lattice of point indices.
    pub fn anf(&self) -> AnfPolynomial {
        let coeffs = moebius(&self.table, self.n);
        let mut terms = Vec::new();
        for idx in coeffs.ones() {
            terms.push(Monomial::from_mask(reverse_low_bits(idx as u32, self.n)));
        }
        terms.sort();
        AnfPolynomial { n: self.n, terms }
    }

    /// Algebraic degree: the largest monomial degree in the ANF, or
    /// `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.anf().degree()
    }

    /// Truth table serialized as uppercase hex. Bits are taken in
    /// increasing index order and packed most significant first, so the
    /// leading hex digit holds indices 0..3. For n = 1 the two table
    /// bits occupy the high half of a single digit.
    pub fn to_hex(&self) -> String {
        let size = 1usize << self.n;
        let digits = size.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in 0..digits {
            let mut nibble = 0u8;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < size && self.table.get(idx) {
                    nibble |= 1 << (3 - b);
                }
            }
            out.push(char::from_digit(u32::from(nibble), 16).unwrap().to_ascii_uppercase());
        }
        out
    }

    /// Parse the hex serialization produced by [`to_hex`](Self::to_hex).
    /// The string length must be exactly 2^n / 4 (one digit for n = 1,
    /// whose unused low bits must be zero).
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let digits = size.div_ceil(4).max(1);
        if hex.len() != digits {
            return Err(Error::BadHex(format!(
                "expected {digits} hex digits for {n} variables, got {}",
                hex.len()
            )));
        }
        let mut table = BitVector::zeros(size);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::BadHex(format!("invalid hex digit {ch:?}")))?
                as u8;
            for b in 0..4 {
                let bit = nibble & (1 << (3 - b)) != 0;
                let idx = d * 4 + b;
                if idx < size {
                    table.set(idx, bit);
                } else if bit {
                    return Err(Error::BadHex(
                        "padding bits beyond the table must be zero".into(),
                    ));
                }
            }
        }
        BooleanFunction::new(n, table)
    }
}

/// In-place butterfly shared by both ANF directions; the transform is an
/// involution.
fn moebius(table: &BitVector, n: usize) -> BitVector {
    let mut t = table.clone();
    for step in 0..n {
        let bit = 1usize << step;
        for idx in 0..1usize << n {
            if idx & bit != 0 && t.get(idx ^ bit) {
                t.set(idx, !t.get(idx));
            }
        }
    }
    t
}

/// A polynomial in algebraic normal form: an XOR of distinct monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnfPolynomial {
    n: usize,
    terms: Vec<Monomial>,
}

impl AnfPolynomial {
    /// Build from a set of monomials over n variables. Terms are stored
    /// in canonical order; duplicates collapse to one occurrence.
    pub fn new(n: usize, mut terms: Vec<Monomial>) -> Result<Self> {
        check_arity(n)?;
        for t in &terms {
            if t.max_var() > n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    actual: t.max_var(),
                });
            }
        }
        terms.sort();
        terms.dedup();
        Ok(AnfPolynomial { n, terms })
    }

    pub fn zero(n: usize) -> Result<Self> {
        AnfPolynomial::new(n, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest degree among the terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().map(Monomial::degree).max()
    }

    pub fn evaluate(&self, p: &Point) -> Result<bool> {
        if p.arity() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                actual: p.arity(),
            });
        }
        let vm = p.var_mask();
        let mut acc = false;
        for t in &self.terms {
            if t.var_mask() & vm == t.var_mask() {
                acc = !acc;
            }
        }
        Ok(acc)
    }

    /// The function this polynomial computes.
    pub fn to_function(&self) -> BooleanFunction {
        let mut coeffs = BitVector::zeros(1 << self.n);
        for t in &self.terms {
            coeffs.set(reverse_low_bits(t.var_mask(), self.n) as usize, true);
        }
        let table = moebius(&coeffs, self.n);
        BooleanFunction { n: self.n, table }
    }
}

impl fmt::Display for AnfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
            first = false;
        }
        Ok(())
    }
}

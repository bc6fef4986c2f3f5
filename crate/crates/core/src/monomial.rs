//! Ordered monomial bases and their evaluation matrices.
//!
//! The evaluation vector of a point X over a basis lists the values of
//! every basis monomial at X. Stacking those vectors for the onset (or
//! offset) of a function gives the matrices whose ranks decide the
//! existence of low-degree annihilators.

use itertools::Itertools;

use crate::boolfn::{BooleanFunction, Monomial, Point};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// All monomials in n variables of degree at most dmax, in canonical
/// order: ascending degree, ties broken by ascending lexicographic order
/// of the variable tuple.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    dmax: usize,
    monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(n: usize, dmax: usize) -> Result<Self> {
        if n == 0 || n > crate::boolfn::MAX_ARITY {
            return Err(Error::InvalidArity(format!("unsupported arity {n}")));
        }
        if dmax > n {
            return Err(Error::OutOfRange(format!(
                "degree bound {dmax} exceeds arity {n}"
            )));
        }
        let mut monomials = Vec::new();
        for d in 0..=dmax {
            for combo in (1..=n).combinations(d) {
                monomials.push(Monomial::from_vars(&combo)?);
            }
        }
        Ok(MonomialBasis { n, dmax, monomials })
    }

    /// The half-degree basis for odd n: degree bound (n-1)/2. Its size
    /// is exactly 2^(n-1), which makes the onset evaluation matrix of a
    /// balanced function square.
    pub fn half_degree(n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::InvalidArity(format!(
                "half-degree basis needs an odd arity, got {n}"
            )));
        }
        MonomialBasis::new(n, (n - 1) / 2)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.dmax
    }

    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Evaluation vector of a point: one bit per basis monomial.
    pub fn evaluate(&self, p: &Point) -> Result<BitVector> {
        if p.arity() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                actual: p.arity(),
            });
        }
        let vm = p.var_mask();
        let mut v = BitVector::zeros(self.monomials.len());
        for (i, m) in self.monomials.iter().enumerate() {
            if m.var_mask() & vm == m.var_mask() {
                v.set(i, true);
            }
        }
        Ok(v)
    }

    /// Matrix with one evaluation-vector row per point, in the order
    /// given. An empty point list yields a 0 x size matrix.
    pub fn evaluation_matrix(&self, points: &[Point]) -> Result<BitMatrix> {
        let rows = points
            .iter()
            .map(|p| self.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        BitMatrix::from_rows(self.monomials.len(), rows)
    }
}

/// The onset and offset of a function, each sorted by ascending point
/// index. This fixed order is what row and column labels of the flip
/// pattern matrix refer to.
#[derive(Clone, Debug)]
pub struct PointOrder {
    onset: Vec<Point>,
    offset: Vec<Point>,
}

impl PointOrder {
    pub fn canonical(f: &BooleanFunction) -> PointOrder {
        let n = f.arity();
        let mut onset = Vec::new();
        let mut offset = Vec::new();
        for idx in 0..1u32 << n {
            let p = Point::new(n, idx).expect("index in range");
            if f.value_at(idx) {
                onset.push(p);
            } else {
                offset.push(p);
            }
        }
        PointOrder { onset, offset }
    }

    pub fn onset(&self) -> &[Point] {
        &self.onset
    }

    pub fn offset(&self) -> &[Point] {
        &self.offset
    }
}

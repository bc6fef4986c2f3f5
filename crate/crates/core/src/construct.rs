//! The flip construction for maximum-immunity functions.
//!
//! Starting from the majority indicator base, every function with
//! maximum algebraic immunity arises by flipping k offset points into
//! the onset and k onset points out of it, where the selected rows and
//! columns of the transition matrix W form an invertible submatrix.
//! W itself can be computed two independent ways: definitionally as
//! V(offset) * V(onset)^-1, or row by row from a combinatorial
//! coefficient rule specific to the majority base. The two must agree
//! bit for bit, and the tests hold them to that.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::boolfn::{BooleanFunction, Point};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::immunity::has_max_ai_odd;
use crate::monomial::{MonomialBasis, PointOrder};

/// The transition matrix of a maximum-immunity base function, with the
/// point labels that give its rows and columns meaning.
///
/// Rows correspond to the base's offset points and columns to its onset
/// points, both in ascending truth-table index order. Invertible k x k
/// submatrices are in bijection with the maximum-immunity functions at
/// flip distance 2k from the base.
#[derive(Clone, Debug)]
pub struct WMatrix {
    n: usize,
    base: BooleanFunction,
    matrix: BitMatrix,
    row_labels: Vec<Point>,
    col_labels: Vec<Point>,
}

impl WMatrix {
    pub fn arity(&self) -> usize {
        self.n
    }

    /// Number of rows (equals the number of columns), 2^(n-1).
    pub fn side(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn base(&self) -> &BooleanFunction {
        &self.base
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Offset points labelling the rows, ascending index.
    pub fn row_labels(&self) -> &[Point] {
        &self.row_labels
    }

    /// Onset points labelling the columns, ascending index.
    pub fn col_labels(&self) -> &[Point] {
        &self.col_labels
    }
}

/// A choice of k rows and k columns of a W matrix, identifying one
/// candidate function. Indices are 1-based and strictly increasing,
/// matching the CLI surface; range against a concrete matrix is checked
/// by the operations that take a selection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Selection {
    i_indices: Vec<usize>,
    j_indices: Vec<usize>,
}

impl Selection {
    pub fn new(i_indices: Vec<usize>, j_indices: Vec<usize>) -> Result<Self> {
        if i_indices.len() != j_indices.len() {
            return Err(Error::BadIndices(format!(
                "selection needs equally many row and column indices, got {} and {}",
                i_indices.len(),
                j_indices.len()
            )));
        }
        check_one_based_increasing(&i_indices, "row")?;
        check_one_based_increasing(&j_indices, "column")?;
        Ok(Selection { i_indices, j_indices })
    }

    /// The empty selection, which leaves the base function unchanged.
    pub fn empty() -> Self {
        Selection { i_indices: Vec::new(), j_indices: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.i_indices.len()
    }

    pub fn i_indices(&self) -> &[usize] {
        &self.i_indices
    }

    pub fn j_indices(&self) -> &[usize] {
        &self.j_indices
    }
}

fn check_one_based_increasing(indices: &[usize], what: &str) -> Result<()> {
    for (pos, &idx) in indices.iter().enumerate() {
        if idx == 0 {
            return Err(Error::BadIndices(format!("{what} indices are 1-based, got 0")));
        }
        if pos > 0 && indices[pos - 1] >= idx {
            return Err(Error::BadIndices(format!(
                "{what} indices must be strictly increasing, got {} then {idx}",
                indices[pos - 1]
            )));
        }
    }
    Ok(())
}

fn check_against_side(indices: &[usize], side: usize, what: &str) -> Result<()> {
    if let Some(&last) = indices.last() {
        if last > side {
            return Err(Error::BadIndices(format!(
                "{what} index {last} out of range for a {side}x{side} matrix"
            )));
        }
    }
    Ok(())
}

/// The transition matrix of any maximum-immunity function of odd arity,
/// computed from its definition: the offset evaluation matrix times the
/// inverse of the onset evaluation matrix. This is the reference
/// computation the combinatorial route is measured against.
pub fn w_matrix_inverse(f: &BooleanFunction) -> Result<WMatrix> {
    let n = f.arity();
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "the transition matrix is defined for odd arity, got {n}"
        )));
    }
    if !f.is_balanced() {
        return Err(Error::NotMaxAi(format!(
            "function has weight {} instead of {}, so it lacks maximum immunity",
            f.weight(),
            1u64 << (n - 1)
        )));
    }
    let basis = MonomialBasis::half_degree(n)?;
    let order = PointOrder::canonical(f);
    let v1 = basis.evaluation_matrix(order.onset())?;
    let v0 = basis.evaluation_matrix(order.offset())?;
    let v1_inv = v1.invert().map_err(|e| match e {
        Error::Singular { rank } => Error::NotMaxAi(format!(
            "onset evaluation matrix has rank {rank} of {}, so the function lacks \
             maximum immunity",
            basis.size()
        )),
        other => other,
    })?;
    let matrix = v0.multiply(&v1_inv)?;
    Ok(WMatrix {
        n,
        base: f.clone(),
        matrix,
        row_labels: order.offset().to_vec(),
        col_labels: order.onset().to_vec(),
    })
}

/// Parity of the binomial coefficient C(a, b): odd exactly when the
/// binary digits of b are a subset of those of a.
fn binomial_is_odd(a: usize, b: usize) -> bool {
    b <= a && a & b == b
}

/// Coefficients (c_0, ..., c_t) expressing the evaluation vector of a
/// weight-l offset point of the majority base as a combination of onset
/// evaluation vectors: c_i = 1 selects all weight-(t-i) subsets of the
/// point's support. Defined by c_0 = 1 and, for i >= 1,
///
///   c_i = 1 + sum over j < i of c_j * C(l - t + i, i - j)   (mod 2).
///
/// The defining property, verified in the tests, is that for every
/// u <= t the combination covers the degree-u monomials supported on
/// the point an odd number of times:
///
///   sum over i <= u of c_i * C(l - t + u, u - i) = 1   (mod 2).
pub fn coefficient_sequence(l: usize, t: usize) -> Result<Vec<bool>> {
    let n = 2 * t + 1;
    if l < t + 1 || l > n {
        return Err(Error::OutOfRange(format!(
            "offset weight {l} outside [{}, {n}] for t = {t}",
            t + 1
        )));
    }
    let mut c = vec![false; t + 1];
    c[0] = true;
    for i in 1..=t {
        let mut acc = true;
        for (j, &cj) in c[..i].iter().enumerate() {
            if cj && binomial_is_odd(l - t + i, i - j) {
                acc = !acc;
            }
        }
        c[i] = acc;
    }
    Ok(c)
}

/// Positions of the set bits of `mask`, lowest first.
fn mask_bit_positions(mask: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

/// Visit every subset of `size` bits chosen from the set bits of
/// `mask`, as a submask.
fn for_each_submask_of_size(mask: u32, size: usize, mut visit: impl FnMut(u32)) {
    let positions = mask_bit_positions(mask);
    if size > positions.len() {
        return;
    }
    // Iterative combination walk over the bit positions.
    let mut choice: Vec<usize> = (0..size).collect();
    loop {
        let mut sub = 0u32;
        for &c in &choice {
            sub |= 1 << positions[c];
        }
        visit(sub);
        // Advance to the next combination in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if choice[i] != i + positions.len() - size {
                break;
            }
            if i == 0 {
                return;
            }
        }
        choice[i] += 1;
        for p in i + 1..size {
            choice[p] = choice[p - 1] + 1;
        }
    }
}

/// One row of the majority base's transition matrix, built from the
/// coefficient rule alone: for the offset point Z of weight l, the set
/// columns are the onset points of weight t - i supported inside Z, for
/// every i with c_i = 1.
pub fn w_row_combinatorial(z: &Point) -> Result<BitVector> {
    let n = z.arity();
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "combinatorial rows are defined for odd arity, got {n}"
        )));
    }
    let t = (n - 1) / 2;
    let l = z.weight() as usize;
    if l < t + 1 {
        return Err(Error::OutOfRange(format!(
            "point {z} has weight {l}, but rows exist only for offset points \
             (weight at least {})",
            t + 1
        )));
    }
    let base = BooleanFunction::majority_indicator(n, true)?;
    let order = PointOrder::canonical(&base);
    let col_of = column_index_table(order.onset(), n);
    assemble_row(z, t, order.onset().len(), &col_of)
}

/// Map from truth-table index to column position for the onset labels.
fn column_index_table(onset: &[Point], n: usize) -> Vec<usize> {
    let mut table = vec![usize::MAX; 1 << n];
    for (c, p) in onset.iter().enumerate() {
        table[p.index() as usize] = c;
    }
    table
}

fn assemble_row(z: &Point, t: usize, width: usize, col_of: &[usize]) -> Result<BitVector> {
    let n = z.arity();
    let l = z.weight() as usize;
    let c = coefficient_sequence(l, t)?;
    let mut row = BitVector::zeros(width);
    for (i, &ci) in c.iter().enumerate() {
        if !ci {
            continue;
        }
        for_each_submask_of_size(z.var_mask(), t - i, |sub| {
            let y = Point::from_var_mask(n, sub).expect("submask stays in range");
            let col = col_of[y.index() as usize];
            debug_assert_ne!(col, usize::MAX, "weight <= t point must be an onset label");
            row.set(col, true);
        });
    }
    Ok(row)
}

/// The majority base's transition matrix assembled row by row from the
/// coefficient rule, with no matrix inversion involved. Agrees bit for
/// bit with [`w_matrix_inverse`] of the majority indicator; the two
/// routes check each other.
pub fn w_matrix_combinatorial(n: usize) -> Result<WMatrix> {
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "the transition matrix is defined for odd arity, got {n}"
        )));
    }
    let base = BooleanFunction::majority_indicator(n, true)?;
    let t = (n - 1) / 2;
    let order = PointOrder::canonical(&base);
    let col_of = column_index_table(order.onset(), n);
    let width = order.onset().len();
    let rows: Result<Vec<BitVector>> = order
        .offset()
        .par_iter()
        .map(|z| assemble_row(z, t, width, &col_of))
        .collect();
    let matrix = BitMatrix::from_rows(width, rows?)?;
    Ok(WMatrix {
        n,
        base,
        matrix,
        row_labels: order.offset().to_vec(),
        col_labels: order.onset().to_vec(),
    })
}

/// The lexicographically smallest strictly increasing column set (1-based)
/// whose submatrix against the given rows is invertible. Succeeds for
/// every row subset of a genuine transition matrix: invertibility of the
/// whole matrix makes any k rows linearly independent.
pub fn complete_j_indices(w: &WMatrix, i_indices: &[usize]) -> Result<Vec<usize>> {
    check_one_based_increasing(i_indices, "row")?;
    check_against_side(i_indices, w.side(), "row")?;
    let rows: Vec<BitVector> = i_indices
        .iter()
        .map(|&i| w.matrix.row(i - 1).clone())
        .collect();
    let restricted = BitMatrix::from_rows(w.side(), rows)?;
    let cols = restricted.select_independent_columns(i_indices.len())?;
    Ok(cols.into_iter().map(|c| c + 1).collect())
}

/// The function named by a selection: the base with the selected offset
/// points flipped on and the selected onset points flipped off. Balanced
/// by construction; it has maximum immunity exactly when the selection
/// passes [`is_max_ai_selection`].
pub fn assemble_function(w: &WMatrix, sel: &Selection) -> Result<BooleanFunction> {
    check_against_side(sel.i_indices(), w.side(), "row")?;
    check_against_side(sel.j_indices(), w.side(), "column")?;
    let mut flips: Vec<Point> = Vec::with_capacity(2 * sel.k());
    flips.extend(sel.i_indices().iter().map(|&i| w.row_labels[i - 1]));
    flips.extend(sel.j_indices().iter().map(|&j| w.col_labels[j - 1]));
    w.base.flip_points(&flips)
}

/// The membership test: a selection yields a maximum-immunity function
/// exactly when its submatrix of W is invertible. The empty selection is
/// accepted (the base itself).
pub fn is_max_ai_selection(w: &WMatrix, sel: &Selection) -> Result<bool> {
    check_against_side(sel.i_indices(), w.side(), "row")?;
    check_against_side(sel.j_indices(), w.side(), "column")?;
    let rows: Vec<usize> = sel.i_indices().iter().map(|&i| i - 1).collect();
    let cols: Vec<usize> = sel.j_indices().iter().map(|&j| j - 1).collect();
    w.matrix.submatrix(&rows, &cols)?.is_invertible()
}

/// Replace the entropy-reserved seed 0 by a fresh nonzero seed; any
/// other value passes through unchanged, so records can always show the
/// seed that reproduces a run.
pub fn resolve_seed(seed: u64) -> u64 {
    if seed != 0 {
        return seed;
    }
    let mut os = rand::rngs::OsRng;
    loop {
        let fresh = os.next_u64();
        if fresh != 0 {
            return fresh;
        }
    }
}

/// A sorted k-subset of {0, ..., m-1}, drawn by a partial Fisher-Yates
/// shuffle driven directly by `next_u64` reductions. Taking the raw
/// generator output modulo the remaining pool size keeps the draw
/// independent of any library distribution code, so a seed reproduces
/// the same subset across platforms and dependency updates. The modulo
/// bias is below 2^-44 for every pool size this crate can reach.
pub(crate) fn random_k_subset(m: usize, k: usize, rng: &mut impl RngCore) -> Vec<usize> {
    debug_assert!(k <= m);
    let mut pool: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let span = (m - i) as u64;
        let offset = (rng.next_u64() % span) as usize;
        pool.swap(i, i + offset);
    }
    let mut picked = pool;
    picked.truncate(k);
    picked.sort_unstable();
    picked
}

/// Draw a random selection of size k against a prebuilt transition
/// matrix and assemble its function. The row set is drawn uniformly,
/// the column set is completed deterministically, so the result always
/// has maximum immunity. Returns the seed actually used (relevant when
/// the caller passed 0 for entropy).
pub fn construct_random_with(
    w: &WMatrix,
    k: usize,
    seed: u64,
) -> Result<(Selection, BooleanFunction, u64)> {
    let side = w.side();
    if k >= side {
        return Err(Error::OutOfRange(format!(
            "k = {k} out of range: random construction draws at most {} of {side} rows",
            side - 1
        )));
    }
    let resolved = resolve_seed(seed);
    let mut rng = ChaCha12Rng::seed_from_u64(resolved);
    let i_indices: Vec<usize> = random_k_subset(side, k, &mut rng)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    let j_indices = complete_j_indices(w, &i_indices)?;
    let sel = Selection::new(i_indices, j_indices)?;
    let f = assemble_function(w, &sel)?;
    debug_assert!(has_max_ai_odd(&f)?);
    Ok((sel, f, resolved))
}

/// Seeded random construction of a maximum-immunity function of odd
/// arity n at flip distance 2k from the majority base, k at most
/// 2^(n-1) - 1. Seed 0 means "derive from entropy"; the returned seed
/// reproduces the run either way.
pub fn construct_random(n: usize, k: usize, seed: u64) -> Result<(Selection, BooleanFunction, u64)> {
    let w = w_matrix_combinatorial(n)?;
    construct_random_with(&w, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immunity::algebraic_immunity;
    use proptest::prelude::*;
    // Named import: both globs above export an RngCore trait.
    use rand::RngCore;
    use std::collections::HashSet;

    fn golden_w3() -> Vec<&'static str> {
        vec!["1110", "1101", "1011", "0111"]
    }

    fn g(n: usize) -> BooleanFunction {
        BooleanFunction::majority_indicator(n, true).unwrap()
    }

    fn point(n: usize, coords: &[u8]) -> Point {
        let bools: Vec<bool> = coords.iter().map(|&b| b == 1).collect();
        assert_eq!(bools.len(), n);
        Point::from_coords(&bools).unwrap()
    }

    fn all_k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
        use itertools::Itertools;
        (1..=m).combinations(k).collect()
    }

    #[test]
    fn inverse_route_reproduces_the_golden_matrix() {
        let w = w_matrix_inverse(&g(3)).unwrap();
        assert_eq!(w.arity(), 3);
        assert_eq!(w.side(), 4);
        for (r, expect) in golden_w3().iter().enumerate() {
            assert_eq!(w.matrix().row(r).to_string(), *expect);
        }
        let rows: Vec<String> = w.row_labels().iter().map(|p| p.to_string()).collect();
        let cols: Vec<String> = w.col_labels().iter().map(|p| p.to_string()).collect();
        assert_eq!(rows, ["011", "101", "110", "111"]);
        assert_eq!(cols, ["000", "001", "010", "100"]);
    }

    #[test]
    fn w_matrix_satisfies_its_defining_product() {
        for n in [3usize, 5] {
            let f = g(n);
            let w = w_matrix_inverse(&f).unwrap();
            let basis = MonomialBasis::half_degree(n).unwrap();
            let order = PointOrder::canonical(&f);
            let v1 = basis.evaluation_matrix(order.onset()).unwrap();
            let v0 = basis.evaluation_matrix(order.offset()).unwrap();
            assert_eq!(w.matrix().multiply(&v1).unwrap(), v0);
            assert!(w.matrix().is_invertible().unwrap());
        }
    }

    #[test]
    fn w_matrix_of_a_constructed_function_satisfies_the_product() {
        let (_, f, _) = construct_random(5, 3, 11).unwrap();
        let w = w_matrix_inverse(&f).unwrap();
        let basis = MonomialBasis::half_degree(5).unwrap();
        let order = PointOrder::canonical(&f);
        let v1 = basis.evaluation_matrix(order.onset()).unwrap();
        let v0 = basis.evaluation_matrix(order.offset()).unwrap();
        assert_eq!(w.matrix().multiply(&v1).unwrap(), v0);
    }

    #[test]
    fn inverse_route_rejects_functions_without_maximum_immunity() {
        let constant = BooleanFunction::constant(3, false).unwrap();
        assert!(matches!(w_matrix_inverse(&constant), Err(Error::NotMaxAi(_))));

        // Balanced but with an affine annihilator: onset is a half-space.
        let half = BooleanFunction::from_hex(3, "0F").unwrap();
        assert!(matches!(w_matrix_inverse(&half), Err(Error::NotMaxAi(_))));

        let even = BooleanFunction::constant(2, true).unwrap();
        assert!(matches!(w_matrix_inverse(&even), Err(Error::InvalidArity(_))));
    }

    #[test]
    fn coefficient_sequences_match_hand_derived_values() {
        let seq = |l, t| -> Vec<u8> {
            coefficient_sequence(l, t)
                .unwrap()
                .into_iter()
                .map(u8::from)
                .collect()
        };
        assert_eq!(seq(2, 1), [1, 1]);
        assert_eq!(seq(3, 1), [1, 0]);
        assert_eq!(seq(3, 2), [1, 1, 1]);
        assert_eq!(seq(4, 2), [1, 0, 1]);
        assert_eq!(seq(5, 2), [1, 1, 0]);
    }

    #[test]
    fn coefficient_sequence_rejects_out_of_range_weights() {
        assert!(coefficient_sequence(1, 1).is_err());
        assert!(coefficient_sequence(4, 1).is_err());
        assert!(coefficient_sequence(2, 2).is_err());
    }

    /// The sequence is correct iff every monomial degree u <= t is
    /// covered an odd number of times across the selected subset layers.
    fn covering_identity_holds(l: usize, t: usize) -> bool {
        let c = coefficient_sequence(l, t).unwrap();
        (0..=t).all(|u| {
            let mut parity = false;
            for (i, &ci) in c.iter().enumerate().take(u + 1) {
                if ci && binomial_is_odd(l - t + u, u - i) {
                    parity = !parity;
                }
            }
            parity
        })
    }

    #[test]
    fn coefficients_cover_every_degree_oddly() {
        for t in 1..=8usize {
            for l in t + 1..=2 * t + 1 {
                assert!(covering_identity_holds(l, t), "identity fails at l={l}, t={t}");
            }
        }
    }

    #[test]
    fn combinatorial_rows_match_hand_derived_values() {
        let z = point(3, &[0, 1, 1]);
        assert_eq!(w_row_combinatorial(&z).unwrap().to_string(), "1110");

        let z = point(3, &[1, 1, 1]);
        assert_eq!(w_row_combinatorial(&z).unwrap().to_string(), "0111");

        // All-ones point at n=5: c = (1,1,0) selects the ten weight-2
        // and five weight-1 subsets but not the empty one.
        let z = point(5, &[1, 1, 1, 1, 1]);
        let row = w_row_combinatorial(&z).unwrap();
        assert_eq!(row.count_ones(), 15);
        let base = g(5);
        let order = PointOrder::canonical(&base);
        assert!(!row.get(0), "column of the all-zero point must be clear");
        for (c, y) in order.onset().iter().enumerate() {
            assert_eq!(row.get(c), y.weight() >= 1, "column {c} ({y})");
        }
    }

    #[test]
    fn combinatorial_row_combination_reproduces_the_point_evaluation() {
        for n in [3usize, 5] {
            let base = g(n);
            let basis = MonomialBasis::half_degree(n).unwrap();
            let order = PointOrder::canonical(&base);
            for z in order.offset() {
                let row = w_row_combinatorial(z).unwrap();
                let mut acc = BitVector::zeros(basis.size());
                for c in row.ones() {
                    acc.xor_assign(&basis.evaluate(&order.onset()[c]).unwrap());
                }
                assert_eq!(acc, basis.evaluate(z).unwrap(), "n={n}, z={z}");
            }
        }
    }

    #[test]
    fn combinatorial_row_rejects_low_weight_points() {
        let y = point(3, &[0, 0, 1]);
        assert!(matches!(w_row_combinatorial(&y), Err(Error::OutOfRange(_))));
        assert!(w_row_combinatorial(&point(2, &[1, 1])).is_err());
    }

    #[test]
    fn submask_walk_agrees_with_a_generic_combination_enumerator() {
        use itertools::Itertools;
        for mask in [0u32, 0b1, 0b1010, 0b10110, 0b1111111, 0b101010101] {
            let positions = mask_bit_positions(mask);
            for size in 0..=positions.len() + 1 {
                let mut walked = Vec::new();
                for_each_submask_of_size(mask, size, |sub| walked.push(sub));
                let expected: Vec<u32> = positions
                    .iter()
                    .combinations(size)
                    .map(|combo| combo.into_iter().fold(0u32, |acc, &p| acc | 1 << p))
                    .collect();
                let walked_set: std::collections::HashSet<u32> =
                    walked.iter().copied().collect();
                assert_eq!(walked.len(), walked_set.len(), "duplicates for {mask:#b}/{size}");
                let expected_set: std::collections::HashSet<u32> =
                    expected.into_iter().collect();
                assert_eq!(walked_set, expected_set, "mask {mask:#b}, size {size}");
            }
        }
    }

    #[test]
    fn the_two_matrix_routes_agree() {
        for n in [1usize, 3, 5, 7] {
            let a = w_matrix_combinatorial(n).unwrap();
            let b = w_matrix_inverse(&g(n)).unwrap();
            assert_eq!(a.matrix(), b.matrix(), "mismatch at n={n}");
            assert_eq!(a.row_labels(), b.row_labels());
            assert_eq!(a.col_labels(), b.col_labels());
        }
    }

    #[test]
    fn completion_finds_the_smallest_column_sets() {
        let w = w_matrix_combinatorial(3).unwrap();
        assert_eq!(complete_j_indices(&w, &[1]).unwrap(), [1]);
        assert_eq!(complete_j_indices(&w, &[4]).unwrap(), [2]);
        assert_eq!(complete_j_indices(&w, &[1, 2, 3, 4]).unwrap(), [1, 2, 3, 4]);
        assert_eq!(complete_j_indices(&w, &[]).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn completion_succeeds_for_every_row_subset_at_n3() {
        let w = w_matrix_combinatorial(3).unwrap();
        for k in 0..=4usize {
            for i in all_k_subsets(4, k) {
                let j = complete_j_indices(&w, &i).unwrap();
                let sel = Selection::new(i.clone(), j).unwrap();
                assert!(is_max_ai_selection(&w, &sel).unwrap(), "i={i:?}");
            }
        }
    }

    #[test]
    fn completion_rejects_malformed_indices() {
        let w = w_matrix_combinatorial(3).unwrap();
        assert!(complete_j_indices(&w, &[0]).is_err());
        assert!(complete_j_indices(&w, &[2, 2]).is_err());
        assert!(complete_j_indices(&w, &[1, 5]).is_err());
    }

    #[test]
    fn assembled_functions_match_hand_derived_onsets() {
        let w = w_matrix_combinatorial(3).unwrap();

        let base = assemble_function(&w, &Selection::empty()).unwrap();
        assert_eq!(base.to_hex(), "E8");

        // Flip offset point 011 in, onset point 000 out.
        let sel = Selection::new(vec![1], vec![1]).unwrap();
        let f = assemble_function(&w, &sel).unwrap();
        assert_eq!(f.to_hex(), "78");
        assert!(has_max_ai_odd(&f).unwrap());

        // Flip offset point 011 in, onset point 100 out: onset becomes
        // the x1 = 0 half-space, which x1 annihilates.
        let sel = Selection::new(vec![1], vec![4]).unwrap();
        let f = assemble_function(&w, &sel).unwrap();
        assert_eq!(f.to_hex(), "F0");
        assert!(!has_max_ai_odd(&f).unwrap());
        assert_eq!(algebraic_immunity(&f).ai, 1);
    }

    #[test]
    fn membership_test_matches_hand_derived_entries() {
        let w = w_matrix_combinatorial(3).unwrap();
        assert!(is_max_ai_selection(&w, &Selection::empty()).unwrap());
        let one_one = Selection::new(vec![1], vec![1]).unwrap();
        assert!(is_max_ai_selection(&w, &one_one).unwrap());
        let one_four = Selection::new(vec![1], vec![4]).unwrap();
        assert!(!is_max_ai_selection(&w, &one_four).unwrap());
    }

    #[test]
    fn membership_test_matches_the_immunity_oracle_for_every_selection_at_n3() {
        let w = w_matrix_combinatorial(3).unwrap();
        let mut pairs = 0;
        for k in 0..=4usize {
            for i in all_k_subsets(4, k) {
                for j in all_k_subsets(4, k) {
                    let sel = Selection::new(i.clone(), j.clone()).unwrap();
                    let by_submatrix = is_max_ai_selection(&w, &sel).unwrap();
                    let f = assemble_function(&w, &sel).unwrap();
                    let by_rank = has_max_ai_odd(&f).unwrap();
                    let by_search = algebraic_immunity(&f).ai == 2;
                    assert_eq!(by_submatrix, by_rank, "i={i:?} j={j:?}");
                    assert_eq!(by_rank, by_search, "i={i:?} j={j:?}");
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, 70);
    }

    #[test]
    fn single_flip_selections_follow_the_matrix_entries() {
        let w = w_matrix_combinatorial(3).unwrap();
        for i in 1..=4usize {
            for j in 1..=4usize {
                let sel = Selection::new(vec![i], vec![j]).unwrap();
                let f = assemble_function(&w, &sel).unwrap();
                assert_eq!(
                    has_max_ai_odd(&f).unwrap(),
                    w.matrix().get(i - 1, j - 1),
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn distinct_selections_yield_distinct_functions_at_n3() {
        let w = w_matrix_combinatorial(3).unwrap();
        let mut seen = HashSet::new();
        let mut valid = 0;
        for k in 0..=4usize {
            for i in all_k_subsets(4, k) {
                for j in all_k_subsets(4, k) {
                    let sel = Selection::new(i.clone(), j.clone()).unwrap();
                    if is_max_ai_selection(&w, &sel).unwrap() {
                        valid += 1;
                        let f = assemble_function(&w, &sel).unwrap();
                        assert!(seen.insert(f.to_hex()), "duplicate from i={i:?} j={j:?}");
                    }
                }
            }
        }
        assert_eq!(valid, 56);
    }

    #[test]
    fn selection_validation_rejects_malformed_input() {
        assert!(Selection::new(vec![1], vec![]).is_err());
        assert!(Selection::new(vec![0], vec![1]).is_err());
        assert!(Selection::new(vec![2, 1], vec![1, 2]).is_err());
        assert!(Selection::new(vec![1, 1], vec![1, 2]).is_err());

        let w = w_matrix_combinatorial(3).unwrap();
        let oversized = Selection::new(vec![5], vec![1]).unwrap();
        assert!(assemble_function(&w, &oversized).is_err());
        assert!(is_max_ai_selection(&w, &oversized).is_err());
    }

    #[test]
    fn random_construction_is_deterministic_and_sound() {
        let (sel, f, used) = construct_random(5, 4, 42).unwrap();
        assert_eq!(used, 42);
        assert_eq!(sel.k(), 4);
        let (sel2, f2, _) = construct_random(5, 4, 42).unwrap();
        assert_eq!(sel, sel2);
        assert_eq!(f, f2);
        assert!(has_max_ai_odd(&f).unwrap());
        assert_eq!(algebraic_immunity(&f).ai, 3);

        let (_, g7, _) = construct_random(7, 5, 7).unwrap();
        assert!(has_max_ai_odd(&g7).unwrap());
        assert_eq!(algebraic_immunity(&g7).ai, 4);
    }

    #[test]
    fn random_construction_with_k_zero_returns_the_base() {
        let (sel, f, _) = construct_random(3, 0, 9).unwrap();
        assert_eq!(sel.k(), 0);
        assert_eq!(f, g(3));
    }

    #[test]
    fn random_construction_bounds_k() {
        assert!(construct_random(3, 3, 1).is_ok());
        assert!(matches!(construct_random(3, 4, 1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn seed_zero_draws_fresh_entropy() {
        let (_, f, used) = construct_random(5, 2, 0).unwrap();
        assert_ne!(used, 0);
        assert!(has_max_ai_odd(&f).unwrap());
        // The resolved seed reproduces the draw.
        let (_, f2, used2) = construct_random(5, 2, used).unwrap();
        assert_eq!(used, used2);
        assert_eq!(f, f2);
    }

    #[test]
    fn subset_draw_is_sorted_unique_and_in_range() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = 1 + (rng.next_u64() % 40) as usize;
            let k = (rng.next_u64() % (m as u64 + 1)) as usize;
            let s = random_k_subset(m, k, &mut rng);
            assert_eq!(s.len(), k);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&x| x < m));
        }
    }

    proptest! {
        #[test]
        fn covering_identity_is_universal(t in 1usize..10, offset in 0usize..10) {
            let l = t + 1 + offset % (t + 1);
            prop_assert!(covering_identity_holds(l, t));
        }

        #[test]
        fn membership_matches_rank_for_random_selections_at_n5(
            seed in 0u64..u64::MAX,
            k in 0usize..17,
        ) {
            let w = w_matrix_combinatorial(5).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let i: Vec<usize> = random_k_subset(16, k, &mut rng)
                .into_iter().map(|x| x + 1).collect();
            let j: Vec<usize> = random_k_subset(16, k, &mut rng)
                .into_iter().map(|x| x + 1).collect();
            let sel = Selection::new(i, j).unwrap();
            let f = assemble_function(&w, &sel).unwrap();
            prop_assert_eq!(
                is_max_ai_selection(&w, &sel).unwrap(),
                has_max_ai_odd(&f).unwrap()
            );
        }

        #[test]
        fn completion_always_yields_an_invertible_submatrix_at_n5(
            seed in 0u64..u64::MAX,
            k in 0usize..17,
        ) {
            let w = w_matrix_combinatorial(5).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let i: Vec<usize> = random_k_subset(16, k, &mut rng)
                .into_iter().map(|x| x + 1).collect();
            let j = complete_j_indices(&w, &i).unwrap();
            let sel = Selection::new(i, j).unwrap();
            prop_assert!(is_max_ai_selection(&w, &sel).unwrap());
        }
    }
}

//! Annihilator search and algebraic immunity.
//!
//! A nonzero polynomial g annihilates f when g*f is identically zero,
//! which happens exactly when g's coefficient vector lies in the null
//! space of the monomial evaluation matrix over the onset of f. The
//! algebraic immunity of f is the smallest degree at which f or its
//! complement acquires an annihilator.

use std::fmt;

use itertools::Itertools;

use crate::boolfn::{AnfPolynomial, BooleanFunction, Monomial, Point};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, ColumnEchelon};
use crate::monomial::{MonomialBasis, PointOrder};

/// Which function a witness annihilates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WitnessSide {
    Function,
    Complement,
}

impl fmt::Display for WitnessSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessSide::Function => "f",
            WitnessSide::Complement => "f+1",
        })
    }
}

/// Result of an algebraic immunity computation.
#[derive(Clone, Debug)]
pub struct ImmunityReport {
    /// Smallest degree of a nonzero annihilator of f or of f+1.
    pub ai: usize,
    /// A minimal-degree annihilator.
    pub witness: Option<AnfPolynomial>,
    /// The side the witness annihilates.
    pub witness_side: Option<WitnessSide>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Basis of all annihilators of f with degree at most d: the null space
/// of the monomial evaluation matrix over the onset of f, expressed as
/// polynomials. Empty when no annihilator of that degree exists. The
/// zero polynomial is never a member.
pub fn annihilator_basis(f: &BooleanFunction, d: usize) -> Result<Vec<AnfPolynomial>> {
    let n = f.arity();
    if d > n {
        return Err(Error::OutOfRange(format!(
            "degree bound {d} exceeds arity {n}"
        )));
    }
    let basis = MonomialBasis::new(n, d)?;
    let order = PointOrder::canonical(f);
    let v = basis.evaluation_matrix(order.onset())?;
    v.null_space()
        .iter()
        .map(|combo| {
            let terms: Vec<Monomial> = combo
                .ones()
                .map(|i| basis.monomials()[i])
                .collect();
            AnfPolynomial::new(n, terms)
        })
        .collect()
}

/// One side of the immunity search: the onset points of either f or its
/// complement, with an elimination state that absorbs monomial columns
/// degree by degree.
struct SideSearch {
    points: Vec<Point>,
    echelon: ColumnEchelon,
}

impl SideSearch {
    fn new(points: &[Point], capacity: usize) -> Self {
        SideSearch {
            points: points.to_vec(),
            echelon: ColumnEchelon::new(points.len(), capacity),
        }
    }

    /// Push the columns for the given monomials; returns the dependency
    /// combinations discovered, which are annihilator coefficient
    /// vectors over all monomials pushed so far.
    fn push_monomials(&mut self, monomials: &[Monomial]) -> Vec<BitVector> {
        let mut found = Vec::new();
        for m in monomials {
            let mut col = BitVector::zeros(self.points.len());
            for (r, p) in self.points.iter().enumerate() {
                if m.var_mask() & p.var_mask() == m.var_mask() {
                    col.set(r, true);
                }
            }
            if let Some(combo) = self.echelon.push(col) {
                found.push(combo);
            }
        }
        found
    }
}

/// True when `a` precedes `b` in lexicographic order on coefficient
/// bits, index 0 first.
fn lex_smaller(a: &BitVector, b: &BitVector) -> bool {
    for i in 0..a.len() {
        match (a.get(i), b.get(i)) {
            (false, true) => return true,
            (true, false) => return false,
            _ => {}
        }
    }
    false
}

/// Algebraic immunity with a minimal-degree witness.
///
/// The search ascends one degree at a time, extending a single
/// elimination state per side instead of rebuilding the evaluation
/// matrix. The f side is examined before the complement at each degree,
/// and among the dependencies found at the successful degree the witness
/// is the one with the lexicographically smallest coefficient vector in
/// the canonical monomial order, so the result is deterministic.
pub fn algebraic_immunity(f: &BooleanFunction) -> ImmunityReport {
    let n = f.arity();
    // A dependency must appear by degree ceil(n/2): monomials up to that
    // degree outnumber the points on the smaller side.
    let dcap = n.div_ceil(2);
    let capacity: usize = (0..=dcap).map(|d| binomial(n, d)).sum();
    let order = PointOrder::canonical(f);
    let mut side_f = SideSearch::new(order.onset(), capacity);
    let mut side_c = SideSearch::new(order.offset(), capacity);
    let mut monomials: Vec<Monomial> = Vec::with_capacity(capacity);

    for d in 0..=dcap {
        let fresh: Vec<Monomial> = (1..=n)
            .combinations(d)
            .map(|vars| Monomial::from_vars(&vars).expect("variable indices in range"))
            .collect();
        monomials.extend(fresh.iter().copied());

        for (side, search) in [
            (WitnessSide::Function, &mut side_f),
            (WitnessSide::Complement, &mut side_c),
        ] {
            let deps = search.push_monomials(&fresh);
            if let Some(best) = deps
                .into_iter()
                .reduce(|a, b| if lex_smaller(&b, &a) { b } else { a })
            {
                let terms: Vec<Monomial> = best.ones().map(|i| monomials[i]).collect();
                let witness = AnfPolynomial::new(n, terms).expect("terms fit the arity");
                debug_assert_eq!(witness.degree(), Some(d));
                return ImmunityReport {
                    ai: d,
                    witness: Some(witness),
                    witness_side: Some(side),
                };
            }
        }
    }
    unreachable!("an annihilator exists by degree ceil(n/2)")
}

/// Whether an odd-arity function attains the maximum algebraic immunity
/// (n+1)/2. Equivalent to a full immunity computation, but decided by a
/// single rank: the function must be balanced with an invertible onset
/// evaluation matrix over the half-degree basis.
pub fn has_max_ai_odd(f: &BooleanFunction) -> Result<bool> {
    let n = f.arity();
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "maximum-immunity test needs an odd arity, got {n}"
        )));
    }
    if !f.is_balanced() {
        return Ok(false);
    }
    let basis = MonomialBasis::half_degree(n)?;
    let order = PointOrder::canonical(f);
    let v1 = basis.evaluation_matrix(order.onset())?;
    v1.is_invertible()
}

/// For a balanced f of odd arity n = 2t+1, check the one-sided
/// implication: if f has no annihilator of degree at most t, then
/// neither does f+1. Returns true when the implication holds for this
/// input (vacuously so when f itself has a low-degree annihilator).
pub fn check_annihilator_implication(f: &BooleanFunction) -> Result<bool> {
    let n = f.arity();
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "implication check needs an odd arity, got {n}"
        )));
    }
    if !f.is_balanced() {
        return Err(Error::NotBalanced {
            weight: f.weight(),
            expected: 1 << (n - 1),
        });
    }
    let t = (n - 1) / 2;
    if !annihilator_basis(f, t)?.is_empty() {
        return Ok(true);
    }
    Ok(annihilator_basis(&f.complement(), t)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVector;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn g(n: usize) -> BooleanFunction {
        BooleanFunction::majority_indicator(n, true).unwrap()
    }

    fn function_from_bits(n: usize, bits: u32) -> BooleanFunction {
        let size = 1usize << n;
        let mut table = BitVector::zeros(size);
        for i in 0..size {
            if bits >> i & 1 == 1 {
                table.set(i, true);
            }
        }
        BooleanFunction::new(n, table).unwrap()
    }

    fn annihilates(g: &AnfPolynomial, f: &BooleanFunction) -> bool {
        let gf = g.to_function().product(f).unwrap();
        gf.is_zero()
    }

    #[test]
    fn constant_zero_is_annihilated_by_one() {
        let zero = BooleanFunction::constant(3, false).unwrap();
        let basis = annihilator_basis(&zero, 0).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].terms(), &[Monomial::constant()]);
    }

    #[test]
    fn single_variable_has_the_expected_degree_one_annihilator() {
        // f = x1; 1 + x1 annihilates it.
        let f = BooleanFunction::from_hex(3, "0F").unwrap();
        let basis = annihilator_basis(&f, 1).unwrap();
        let expected = AnfPolynomial::new(
            3,
            vec![Monomial::constant(), Monomial::from_vars(&[1]).unwrap()],
        )
        .unwrap();
        assert!(basis.contains(&expected));
        for b in &basis {
            assert!(annihilates(b, &f));
            assert!(!b.is_zero());
        }
    }

    #[test]
    fn majority_indicator_has_no_low_degree_annihilator() {
        assert!(annihilator_basis(&g(3), 1).unwrap().is_empty());
        assert!(annihilator_basis(&g(5), 2).unwrap().is_empty());
    }

    #[test]
    fn annihilator_basis_rejects_oversized_degree() {
        assert!(annihilator_basis(&g(3), 4).is_err());
    }

    #[test]
    fn basis_dimension_matches_rank_defect() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..30 {
            let f = BooleanFunction::random(4, &mut rng).unwrap();
            for d in 0..=2usize {
                let mb = MonomialBasis::new(4, d).unwrap();
                let order = PointOrder::canonical(&f);
                let v = mb.evaluation_matrix(order.onset()).unwrap();
                let basis = annihilator_basis(&f, d).unwrap();
                assert_eq!(basis.len(), mb.size() - v.rank());
                for b in &basis {
                    assert!(annihilates(b, &f));
                    assert!(b.degree().unwrap_or(0) <= d);
                }
            }
        }
    }

    #[test]
    fn immunity_of_majority_indicators() {
        assert_eq!(algebraic_immunity(&g(1)).ai, 1);
        assert_eq!(algebraic_immunity(&g(3)).ai, 2);
        assert_eq!(algebraic_immunity(&g(5)).ai, 3);
        assert_eq!(algebraic_immunity(&g(7)).ai, 4);
    }

    #[test]
    fn immunity_of_constants_is_zero() {
        let zero = BooleanFunction::constant(3, false).unwrap();
        let rep = algebraic_immunity(&zero);
        assert_eq!(rep.ai, 0);
        assert_eq!(rep.witness_side, Some(WitnessSide::Function));
        assert_eq!(rep.witness.unwrap().to_string(), "1");

        let one = BooleanFunction::constant(3, true).unwrap();
        let rep = algebraic_immunity(&one);
        assert_eq!(rep.ai, 0);
        assert_eq!(rep.witness_side, Some(WitnessSide::Complement));
    }

    #[test]
    fn immunity_of_single_variable_is_one() {
        let f = BooleanFunction::from_hex(3, "0F").unwrap();
        let rep = algebraic_immunity(&f);
        assert_eq!(rep.ai, 1);
        let w = rep.witness.unwrap();
        assert_eq!(w.degree(), Some(1));
        match rep.witness_side.unwrap() {
            WitnessSide::Function => assert!(annihilates(&w, &f)),
            WitnessSide::Complement => assert!(annihilates(&w, &f.complement())),
        }
    }

    #[test]
    fn witness_always_annihilates_its_side_and_has_degree_ai() {
        let mut rng = StdRng::seed_from_u64(5);
        for n in 1..=6usize {
            for _ in 0..40 {
                let f = BooleanFunction::random(n, &mut rng).unwrap();
                let rep = algebraic_immunity(&f);
                assert!(rep.ai <= n.div_ceil(2), "immunity above ceil(n/2) at n={n}");
                let w = rep.witness.expect("witness always found");
                assert!(!w.is_zero());
                assert_eq!(w.degree(), Some(rep.ai));
                let target = match rep.witness_side.unwrap() {
                    WitnessSide::Function => f.clone(),
                    WitnessSide::Complement => f.complement(),
                };
                assert!(annihilates(&w, &target));
            }
        }
    }

    #[test]
    fn incremental_search_agrees_with_direct_basis_computation() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..60 {
            let f = BooleanFunction::random(5, &mut rng).unwrap();
            let rep = algebraic_immunity(&f);
            let direct = (0..=5)
                .find(|&d| {
                    !annihilator_basis(&f, d).unwrap().is_empty()
                        || !annihilator_basis(&f.complement(), d).unwrap().is_empty()
                })
                .unwrap();
            assert_eq!(rep.ai, direct);
        }
    }

    #[test]
    fn immunity_is_complement_invariant_exhaustively_at_n3() {
        for bits in 0u32..256 {
            let f = function_from_bits(3, bits);
            assert_eq!(
                algebraic_immunity(&f).ai,
                algebraic_immunity(&f.complement()).ai,
                "complement changed immunity for {bits:#04x}"
            );
        }
    }

    #[test]
    fn max_ai_test_matches_full_search_exhaustively_at_n3() {
        for bits in 0u32..256 {
            let f = function_from_bits(3, bits);
            let fast = has_max_ai_odd(&f).unwrap();
            let full = algebraic_immunity(&f).ai == 2;
            assert_eq!(fast, full, "rank test disagrees at {bits:#04x}");
        }
    }

    #[test]
    fn max_ai_examples() {
        assert!(has_max_ai_odd(&g(3)).unwrap());
        assert!(!has_max_ai_odd(&BooleanFunction::constant(3, false).unwrap()).unwrap());

        // Flipping one offset point and one onset point that do not form
        // an invertible flip pattern destroys maximality.
        let bad = g(3)
            .flip_points(&[
                Point::from_coords(&[false, true, true]).unwrap(),
                Point::from_coords(&[true, false, false]).unwrap(),
            ])
            .unwrap();
        assert!(bad.is_balanced());
        assert!(!has_max_ai_odd(&bad).unwrap());

        assert!(has_max_ai_odd(&BooleanFunction::random(4, &mut StdRng::seed_from_u64(1)).unwrap()).is_err());
    }

    #[test]
    fn implication_holds_for_every_balanced_three_variable_function() {
        let mut checked = 0;
        for bits in 0u32..256 {
            if bits.count_ones() != 4 {
                continue;
            }
            let f = function_from_bits(3, bits);
            assert!(check_annihilator_implication(&f).unwrap(), "implication failed for {bits:#04x}");
            checked += 1;
        }
        assert_eq!(checked, 70);
    }

    #[test]
    fn implication_check_rejects_unbalanced_input() {
        let one = BooleanFunction::constant(3, true).unwrap();
        assert!(matches!(check_annihilator_implication(&one), Err(Error::NotBalanced { .. })));
        assert!(check_annihilator_implication(&function_from_bits(2, 0b0110)).is_err());
    }

    #[test]
    fn random_balanced_five_variable_functions_satisfy_the_implication() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..100 {
            let f = BooleanFunction::random_balanced(5, &mut rng).unwrap();
            assert!(check_annihilator_implication(&f).unwrap());
        }
    }
}

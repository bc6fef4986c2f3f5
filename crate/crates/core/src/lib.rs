//! Boolean functions of an odd number of variables with maximum
//! algebraic immunity: construction, verification, and counting.
//!
//! The library is organized bottom-up:
//!
//! - [`gf2`]: bit-packed vectors and matrices over GF(2) with rank,
//!   inverse, null space, and column selection.
//! - [`boolfn`]: truth tables, points, algebraic normal forms.
//! - [`monomial`]: ordered monomial bases and their evaluation matrices.
//! - [`immunity`]: annihilator search and algebraic immunity.
//! - [`construct`]: the flip-pattern matrix `W` and the selection
//!   construction that produces every maximum-immunity function from the
//!   majority-type base function.
//! - [`census`]: exhaustive and submatrix counting plus seeded sampling.
//! - [`cli`]: the `maxai` command-line front end.
//!
//! For odd `n`, a function attains the maximum algebraic immunity
//! `(n+1)/2` exactly when it is balanced and the matrix of low-degree
//! monomials evaluated on its onset is invertible. Flipping the base
//! majority-type function on `k` offset points and `k` onset points
//! preserves that property precisely when the corresponding `k x k`
//! submatrix of `W` is invertible, which turns both construction and
//! counting into GF(2) rank problems.

#![forbid(unsafe_code)]
// Parity tests and the (n + 1) / 2 immunity target are kept in the
// shape of the formulas they implement.
#![allow(clippy::manual_is_multiple_of, clippy::manual_div_ceil)]

pub mod boolfn;
pub mod census;
pub mod cli;
pub mod construct;
pub mod error;
pub mod gf2;
pub mod immunity;
pub mod monomial;

pub use boolfn::{AnfPolynomial, BooleanFunction, Monomial, Point};
pub use census::{CensusMethod, CensusOutcome, CensusResult};
pub use construct::{Selection, WMatrix};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use immunity::{ImmunityReport, WitnessSide};
pub use monomial::{MonomialBasis, PointOrder};

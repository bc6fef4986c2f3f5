//! Counting maximum-immunity functions.
//!
//! Three routes to the same number: an exhaustive sweep over balanced
//! functions deciding each by rank, an enumeration of invertible square
//! submatrices of the majority base's transition matrix, and seeded
//! sampling of selections. The first two must agree exactly; the third
//! gives fractions for sizes where enumeration is out of reach.
//!
//! The exhaustive sweep walks onsets in colexicographic order, which
//! gives every subset a stable rank. Long runs checkpoint the last
//! finished rank to a small text file and resume from it.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::boolfn::Point;
use crate::construct::{random_k_subset, resolve_seed, w_matrix_combinatorial, WMatrix};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::monomial::MonomialBasis;

/// How a census figure was obtained.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CensusMethod {
    Exhaustive,
    Submatrix,
    Sample,
}

impl fmt::Display for CensusMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusMethod::Exhaustive => "exhaustive",
            CensusMethod::Submatrix => "submatrix",
            CensusMethod::Sample => "sample",
        })
    }
}

/// Either an exact count or a sampled estimate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CensusOutcome {
    Exact {
        count: u64,
        /// Counts broken down by selection size, when the method
        /// produces them (the submatrix route does).
        per_k: Option<Vec<u64>>,
    },
    Estimate {
        k: usize,
        hits: u64,
        trials: u64,
    },
}

/// Result of one census run.
#[derive(Clone, Debug)]
pub struct CensusResult {
    pub n: usize,
    pub method: CensusMethod,
    pub outcome: CensusOutcome,
    pub elapsed: Duration,
    /// The seed that reproduces the run, for sampled results.
    pub seed: Option<u64>,
}

impl CensusResult {
    /// The exact count, when the method produced one.
    pub fn count(&self) -> Option<u64> {
        match &self.outcome {
            CensusOutcome::Exact { count, .. } => Some(*count),
            CensusOutcome::Estimate { .. } => None,
        }
    }

    /// Whether the count strictly exceeds 2^(2^(n-1)). None for
    /// estimates, which have no count to compare. The bound holds for
    /// every odd n >= 3; n = 1 genuinely misses it (count 2, bound 2)
    /// and is reported as a violation rather than special-cased.
    pub fn check_lower_bound(&self) -> Option<bool> {
        let count = self.count()?;
        let exponent = 1u32 << (self.n - 1);
        if exponent >= 128 {
            // A u64 count can never clear a bound of 2^128 or more;
            // unreachable for the sizes the exact methods accept.
            return Some(false);
        }
        Some(u128::from(count) > 1u128 << exponent)
    }

    /// The bound 2^(2^(n-1)) as text, for reporting.
    pub fn lower_bound_text(&self) -> String {
        let exponent = 1u32 << (self.n - 1);
        if exponent < 128 {
            format!("{}", 1u128 << exponent)
        } else {
            format!("2^{exponent}")
        }
    }
}

/// Pascal's triangle up to C(max_a, max_b), exact in u64 for the sizes
/// used here (at most C(32, 16)).
fn binomial_table(max_a: usize, max_b: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; max_b + 1]; max_a + 1];
    for (a, row) in t.iter_mut().enumerate() {
        row[0] = 1;
        if (1..=max_b).contains(&a) {
            row[a] = 1;
        }
    }
    for a in 1..=max_a {
        for b in 1..=max_b.min(a - 1) {
            t[a][b] = t[a - 1][b - 1] + t[a - 1][b];
        }
    }
    t
}

/// C(n, k) capped at `cap`, for overflow-free feasibility checks.
fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc >= cap {
            return cap;
        }
    }
    acc
}

/// The m-subset of {0, ..., universe-1} at the given colexicographic
/// rank, ascending.
fn colex_unrank(mut rank: u64, universe: usize, m: usize, binom: &[Vec<u64>], out: &mut Vec<u32>) {
    out.clear();
    let mut hi = universe;
    for i in (1..=m).rev() {
        let mut a = hi - 1;
        while binom[a][i] > rank {
            a -= 1;
        }
        out.push(a as u32);
        rank -= binom[a][i];
        hi = a;
    }
    out.reverse();
}

/// Colexicographic rank of an ascending subset, the inverse of
/// `colex_unrank`; exercised by the round-trip tests.
#[cfg(test)]
fn colex_rank(subset: &[u32], binom: &[Vec<u64>]) -> u64 {
    subset
        .iter()
        .enumerate()
        .map(|(i, &a)| binom[a as usize][i + 1])
        .sum()
}

/// Advance an ascending subset to its colexicographic successor in
/// place. The caller bounds the walk by the total count; past the last
/// subset the result is meaningless.
fn colex_next(subset: &mut [u32]) {
    let m = subset.len();
    let mut i = 0;
    while i + 1 < m && subset[i] + 1 == subset[i + 1] {
        i += 1;
    }
    subset[i] += 1;
    for (p, slot) in subset.iter_mut().enumerate().take(i) {
        *slot = p as u32;
    }
}

/// Evaluation vectors of all 2^n points over the half-degree monomial
/// basis, packed into words. Only usable while the basis fits one word.
fn point_rows(n: usize) -> Result<Vec<u64>> {
    let basis = MonomialBasis::half_degree(n)?;
    debug_assert!(basis.size() <= 64);
    (0..1u32 << n)
        .map(|idx| {
            let p = Point::new(n, idx)?;
            Ok(basis
                .evaluate(&p)?
                .as_word()
                .expect("half-degree basis fits a word here"))
        })
        .collect()
}

/// Whether the square word-packed row set is invertible, by incremental
/// elimination against a leading-bit basis.
fn words_invertible(rows: impl Iterator<Item = u64>) -> bool {
    let mut basis = [0u64; 64];
    for row in rows {
        let mut r = row;
        loop {
            if r == 0 {
                return false;
            }
            let lead = 63 - r.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = r;
                break;
            }
            r ^= basis[lead];
        }
    }
    true
}

/// Extract the bits of `word` selected by `mask`, compacted to the low
/// end (a portable parallel-bits-extract).
fn pext64(word: u64, mut mask: u64) -> u64 {
    let mut out = 0u64;
    let mut bit = 0u32;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if word & low != 0 {
            out |= 1u64 << bit;
        }
        bit += 1;
        mask &= mask - 1;
    }
    out
}

fn check_census_arity(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::InvalidArity(format!(
            "the census is defined for odd arity, got {n}"
        )));
    }
    if n > 5 {
        let universe = 1usize << n;
        let half = universe / 2;
        let mut log10 = 0f64;
        for i in 0..half {
            log10 += ((universe - i) as f64).log10() - ((i + 1) as f64).log10();
        }
        return Err(Error::TooLarge(format!(
            "exhaustive census at n = {n} would visit about 10^{log10:.1} balanced \
             functions; largest supported size is n = 5 (601080390 functions)"
        )));
    }
    Ok(())
}

/// Knobs for a checkpointed exhaustive run.
#[derive(Clone, Debug)]
pub struct ExhaustiveOptions {
    /// File to resume from and write progress to. None disables
    /// checkpointing.
    pub checkpoint_path: Option<PathBuf>,
    /// Onsets per wave; a checkpoint is written after each wave.
    pub checkpoint_every: u64,
    /// Stop (reporting Paused) after this many onsets in this call.
    pub stop_after: Option<u64>,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            checkpoint_path: None,
            checkpoint_every: 1 << 22,
            stop_after: None,
        }
    }
}

/// Outcome of a checkpointed exhaustive run: finished, or paused with
/// progress recorded.
#[derive(Clone, Debug)]
pub enum ExhaustiveRun {
    Complete(CensusResult),
    Paused {
        processed: u64,
        total: u64,
        count_so_far: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
struct Checkpoint {
    n: usize,
    method: String,
    last_rank: u64,
    partial_count: u64,
    elapsed_seconds: f64,
}

fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path)?;
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(Error::Checkpoint(format!(
            "expected 5 fields (n method last_rank partial_count elapsed_seconds), \
             got {} in {}",
            fields.len(),
            path.display()
        )));
    }
    let parse_err = |what: &str, v: &str| {
        Error::Checkpoint(format!("bad {what} {v:?} in {}", path.display()))
    };
    Ok(Checkpoint {
        n: fields[0].parse().map_err(|_| parse_err("arity", fields[0]))?,
        method: fields[1].to_string(),
        last_rank: fields[2].parse().map_err(|_| parse_err("rank", fields[2]))?,
        partial_count: fields[3].parse().map_err(|_| parse_err("count", fields[3]))?,
        elapsed_seconds: fields[4].parse().map_err(|_| parse_err("elapsed", fields[4]))?,
    })
}

fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let line = format!(
        "{} {} {} {} {:.3}\n",
        cp.n, cp.method, cp.last_rank, cp.partial_count, cp.elapsed_seconds
    );
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, line)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Count max-immunity onsets among colexicographic ranks [lo, hi),
/// in parallel chunks. Deterministic: the reduction is a plain sum.
fn range_count(point_rows: &[u64], universe: usize, m: usize, binom: &[Vec<u64>], lo: u64, hi: u64) -> u64 {
    const CHUNK: u64 = 1 << 14;
    let span = hi - lo;
    let n_chunks = span.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = lo + ci * CHUNK;
            let end = (start + CHUNK).min(hi);
            let mut subset = Vec::with_capacity(m);
            colex_unrank(start, universe, m, binom, &mut subset);
            let mut local = 0u64;
            let len = end - start;
            for step in 0..len {
                if words_invertible(subset.iter().map(|&ix| point_rows[ix as usize])) {
                    local += 1;
                }
                if step + 1 < len {
                    colex_next(&mut subset);
                }
            }
            local
        })
        .sum()
}

/// Exhaustive census over a subrange of onset ranks, for partitioned
/// runs and their determinism checks.
pub fn count_exhaustive_range(n: usize, lo: u64, hi: u64) -> Result<u64> {
    check_census_arity(n)?;
    let universe = 1usize << n;
    let m = universe / 2;
    let binom = binomial_table(universe, m);
    let total = binom[universe][m];
    if lo > hi || hi > total {
        return Err(Error::OutOfRange(format!(
            "rank range [{lo}, {hi}) outside [0, {total})"
        )));
    }
    let rows = point_rows(n)?;
    Ok(range_count(&rows, universe, m, &binom, lo, hi))
}

/// Exhaustive census with checkpointing. Every balanced onset is
/// visited in colexicographic rank order; each is counted when its
/// onset evaluation matrix is invertible, the rank criterion for
/// maximum immunity. Resumes from `checkpoint_path` when the file
/// exists, and removes it on completion.
pub fn count_exhaustive_with(n: usize, opts: &ExhaustiveOptions) -> Result<ExhaustiveRun> {
    check_census_arity(n)?;
    let universe = 1usize << n;
    let m = universe / 2;
    let binom = binomial_table(universe, m);
    let total = binom[universe][m];
    let started = Instant::now();

    let mut next_rank: u64 = 0;
    let mut count: u64 = 0;
    let mut prior_elapsed = 0f64;
    if let Some(path) = &opts.checkpoint_path {
        if path.exists() {
            let cp = read_checkpoint(path)?;
            if cp.n != n {
                return Err(Error::Checkpoint(format!(
                    "checkpoint {} is for n = {}, not n = {n}",
                    path.display(),
                    cp.n
                )));
            }
            if cp.method != CensusMethod::Exhaustive.to_string() {
                return Err(Error::Checkpoint(format!(
                    "checkpoint {} is for method {:?}, not the exhaustive census",
                    path.display(),
                    cp.method
                )));
            }
            if cp.last_rank >= total {
                return Err(Error::Checkpoint(format!(
                    "checkpoint rank {} out of range for {total} onsets",
                    cp.last_rank
                )));
            }
            next_rank = cp.last_rank + 1;
            count = cp.partial_count;
            prior_elapsed = cp.elapsed_seconds;
        }
    }

    let rows = point_rows(n)?;
    let budget_end = match opts.stop_after {
        Some(b) => next_rank.saturating_add(b).min(total),
        None => total,
    };
    let every = opts.checkpoint_every.max(1);

    while next_rank < budget_end {
        let wave_end = (next_rank + every).min(budget_end);
        count += range_count(&rows, universe, m, &binom, next_rank, wave_end);
        next_rank = wave_end;
        if let Some(path) = &opts.checkpoint_path {
            write_checkpoint(
                path,
                &Checkpoint {
                    n,
                    method: CensusMethod::Exhaustive.to_string(),
                    last_rank: next_rank - 1,
                    partial_count: count,
                    elapsed_seconds: prior_elapsed + started.elapsed().as_secs_f64(),
                },
            )?;
        }
    }

    if next_rank < total {
        return Ok(ExhaustiveRun::Paused {
            processed: next_rank,
            total,
            count_so_far: count,
        });
    }
    if let Some(path) = &opts.checkpoint_path {
        if path.exists() {
            fs::remove_file(path)?;
        }
    }
    Ok(ExhaustiveRun::Complete(CensusResult {
        n,
        method: CensusMethod::Exhaustive,
        outcome: CensusOutcome::Exact { count, per_k: None },
        elapsed: Duration::from_secs_f64(prior_elapsed + started.elapsed().as_secs_f64()),
        seed: None,
    }))
}

/// Exhaustive census of maximum-immunity functions of odd arity n <= 5:
/// every balanced onset, decided by the rank criterion.
pub fn count_exhaustive(n: usize) -> Result<CensusResult> {
    match count_exhaustive_with(n, &ExhaustiveOptions::default())? {
        ExhaustiveRun::Complete(result) => Ok(result),
        ExhaustiveRun::Paused { .. } => unreachable!("no stop budget was set"),
    }
}

/// Number of invertible k x k submatrices of a square bit matrix,
/// summed over all k (the empty submatrix counts once), along with the
/// per-k breakdown. Supports sides up to 16; the pair space is
/// C(2*side, side), which is already 6.0e8 at side 16.
pub fn count_invertible_submatrices(matrix: &BitMatrix) -> Result<(u64, Vec<u64>)> {
    if !matrix.is_square() {
        return Err(Error::NonSquare {
            rows: matrix.n_rows(),
            cols: matrix.n_cols(),
        });
    }
    let side = matrix.n_rows();
    if side > 16 {
        return Err(Error::TooLarge(format!(
            "submatrix enumeration supports sides up to 16, got {side}"
        )));
    }
    let row_words: Vec<u64> = (0..side)
        .map(|r| matrix.row(r).as_word().expect("side <= 16 fits a word"))
        .collect();

    let per_k = (0u32..1u32 << side)
        .into_par_iter()
        .fold(
            || vec![0u64; side + 1],
            |mut acc, row_mask| {
                let k = row_mask.count_ones() as usize;
                if k == 0 {
                    acc[0] += 1;
                    return acc;
                }
                let selected: Vec<u64> = (0..side)
                    .filter(|&r| row_mask >> r & 1 == 1)
                    .map(|r| row_words[r])
                    .collect();
                let limit = 1u32 << side;
                let mut col_mask = (1u32 << k) - 1;
                while col_mask < limit {
                    let cm = u64::from(col_mask);
                    if words_invertible(selected.iter().map(|&w| pext64(w, cm))) {
                        acc[k] += 1;
                    }
                    // Gosper's hack: next mask with the same popcount.
                    let c = col_mask & col_mask.wrapping_neg();
                    let r = col_mask + c;
                    col_mask = (((r ^ col_mask) >> 2) / c) | r;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; side + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok((per_k.iter().sum(), per_k))
}

/// Census by submatrix enumeration: the count of maximum-immunity
/// functions equals the number of invertible square submatrices of the
/// majority base's transition matrix, every selection size included.
pub fn count_submatrix(w: &WMatrix) -> Result<CensusResult> {
    let started = Instant::now();
    let (count, per_k) = count_invertible_submatrices(w.matrix())?;
    Ok(CensusResult {
        n: w.arity(),
        method: CensusMethod::Submatrix,
        outcome: CensusOutcome::Exact {
            count,
            per_k: Some(per_k),
        },
        elapsed: started.elapsed(),
        seed: None,
    })
}

/// Whether the submatrix named by 0-based row and column sets is
/// invertible, with a packed fast path for matrices up to 64 columns.
fn selection_invertible(
    w: &WMatrix,
    row_words: Option<&[u64]>,
    rows: &[usize],
    cols: &[usize],
) -> Result<bool> {
    if let Some(words) = row_words {
        let col_mask = cols.iter().fold(0u64, |acc, &c| acc | 1u64 << c);
        Ok(words_invertible(
            rows.iter().map(|&r| pext64(words[r], col_mask)),
        ))
    } else {
        w.matrix().submatrix(rows, cols)?.is_invertible()
    }
}

/// Fraction of size-k selections whose submatrix is invertible, from
/// `trials` seeded uniform draws. When the trial budget covers the
/// entire pair space (and that space is small enough to walk), every
/// pair is visited exactly once instead, making the fraction exact.
/// Zero trials yield an empty estimate.
pub fn sample_fraction(n: usize, k: usize, trials: u64, seed: u64) -> Result<CensusResult> {
    let started = Instant::now();
    let w = w_matrix_combinatorial(n)?;
    let m = w.side();
    if k > m {
        return Err(Error::OutOfRange(format!(
            "selection size {k} exceeds the matrix side {m}"
        )));
    }
    let resolved = resolve_seed(seed);
    let row_words: Option<Vec<u64>> = if m <= 64 {
        Some(
            (0..m)
                .map(|r| w.matrix().row(r).as_word().expect("side fits a word"))
                .collect(),
        )
    } else {
        None
    };
    let words = row_words.as_deref();

    let outcome = if trials == 0 {
        CensusOutcome::Estimate { k, hits: 0, trials: 0 }
    } else {
        const WALK_CAP: u128 = 1 << 22;
        let one_side = binomial_capped(m, k, WALK_CAP);
        let total_pairs = one_side.saturating_mul(one_side);
        if total_pairs <= WALK_CAP && u128::from(trials) >= total_pairs {
            let mut hits = 0u64;
            for rows in (0..m).combinations(k) {
                for cols in (0..m).combinations(k) {
                    if selection_invertible(&w, words, &rows, &cols)? {
                        hits += 1;
                    }
                }
            }
            CensusOutcome::Estimate {
                k,
                hits,
                trials: total_pairs as u64,
            }
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(resolved);
            let mut hits = 0u64;
            for _ in 0..trials {
                let rows = random_k_subset(m, k, &mut rng);
                let cols = random_k_subset(m, k, &mut rng);
                if selection_invertible(&w, words, &rows, &cols)? {
                    hits += 1;
                }
            }
            CensusOutcome::Estimate { k, hits, trials }
        }
    };
    Ok(CensusResult {
        n,
        method: CensusMethod::Sample,
        outcome,
        elapsed: started.elapsed(),
        seed: Some(resolved),
    })
}

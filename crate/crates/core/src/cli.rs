//! Command-line front end.
//!
//! Five subcommands: `gen` constructs a maximum-immunity function,
//! `ai` measures immunity, `wmatrix` exports the transition matrix,
//! `count` runs a census, and `verify` exercises the library's defining
//! properties on seeded instances. Every run emits one flat key-value
//! record on standard output; `--json` switches it to a single JSON
//! document with the same fields. Machine output never includes wall
//! times, so a rerun with the same flags and seed is byte-identical.
//!
//! Exit codes: 0 success, 1 verification or property failure, 2 usage.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::census::{
    count_exhaustive_with, count_submatrix, sample_fraction, CensusOutcome, CensusResult,
    ExhaustiveOptions, ExhaustiveRun,
};
use crate::construct::{
    assemble_function, complete_j_indices, construct_random_with, is_max_ai_selection,
    random_k_subset, resolve_seed, w_matrix_combinatorial, w_matrix_inverse, Selection, WMatrix,
};
use crate::error::Error;
use crate::immunity::{algebraic_immunity, check_annihilator_implication, has_max_ai_odd};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Construct, verify, and count Boolean functions of odd arity with
/// maximum algebraic immunity.
#[derive(Parser, Debug)]
#[command(name = "maxai", version)]
pub struct Cli {
    /// Emit one JSON record instead of the flat text record.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a maximum-immunity function by flipping selected points
    /// of the majority base.
    Gen(GenArgs),
    /// Compute the algebraic immunity of a function given as truth-table
    /// hex, with a minimal-degree witness.
    Ai(AiArgs),
    /// Print the transition matrix of the majority base with its row and
    /// column point labels.
    Wmatrix(WmatrixArgs),
    /// Count (or estimate the density of) maximum-immunity functions.
    Count(CountArgs),
    /// Run the library's defining properties on seeded instances.
    Verify(VerifyArgs),
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected 'on' or 'off', got {other:?}")),
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Arity; odd, at most 15.
    #[arg(long)]
    pub n: usize,

    /// Number of row/column pairs to flip; rows are drawn at random.
    #[arg(long, conflicts_with = "i")]
    pub k: Option<usize>,

    /// Seed for the random row draw; 0 derives one from entropy.
    #[arg(long, default_value_t = 0, conflicts_with = "i")]
    pub seed: u64,

    /// Explicit 1-based row indices, comma separated (e.g. --i 1,3).
    #[arg(long, value_delimiter = ',')]
    pub i: Option<Vec<usize>>,

    /// Explicit 1-based column indices; omitted, the smallest valid set
    /// is completed automatically.
    #[arg(long, value_delimiter = ',', requires = "i")]
    pub j: Option<Vec<usize>>,

    /// Re-check the result in-process; defaults to on for n <= 9.
    #[arg(long, value_parser = parse_on_off)]
    pub verify: Option<bool>,

    /// Accept k = 2^(n-1), which flips every point.
    #[arg(long)]
    pub allow_full_k: bool,
}

#[derive(Args, Debug)]
pub struct AiArgs {
    /// Arity, at most 15.
    #[arg(long)]
    pub n: usize,

    /// Truth table as hex (see the README for the digit convention).
    #[arg(long)]
    pub tt: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum MatrixMethod {
    /// Offset evaluation matrix times the inverted onset matrix.
    Inverse,
    /// Row-by-row assembly from the coefficient rule.
    Combinatorial,
    /// Compute both and fail on any difference.
    Both,
}

#[derive(Args, Debug)]
pub struct WmatrixArgs {
    /// Arity; odd. At most 13 for inverse/both, 15 for combinatorial.
    #[arg(long)]
    pub n: usize,

    #[arg(long, value_enum, default_value_t = MatrixMethod::Inverse)]
    pub method: MatrixMethod,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum CountMethod {
    /// Visit every balanced onset and decide each by rank (n <= 5).
    Exhaustive,
    /// Enumerate invertible submatrices of the transition matrix (n <= 5).
    Submatrix,
    /// Estimate the invertible fraction at one selection size from
    /// seeded draws.
    Sample,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Arity; odd.
    #[arg(long)]
    pub n: usize,

    #[arg(long, value_enum)]
    pub method: CountMethod,

    /// Selection size for --method sample (default 1).
    #[arg(long)]
    pub k: Option<usize>,

    /// Draws for --method sample (default 10000).
    #[arg(long)]
    pub trials: Option<u64>,

    /// Seed for --method sample; 0 derives one from entropy.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Checkpoint file for --method exhaustive: resumed when present,
    /// updated while running, removed on completion.
    #[arg(long)]
    pub resume: Option<PathBuf>,

    /// Confirm the ~6.0e8-step n = 5 census.
    #[arg(long)]
    pub yes_huge: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Arity; odd, at most 9. At n = 3 the checks run exhaustively.
    #[arg(long)]
    pub n: usize,

    /// Random instances per sampled check.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,

    /// Seed for the sampled checks; 0 derives one from entropy.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// A failure with the exit code it deserves.
#[derive(Debug)]
pub enum CliError {
    /// The request itself was malformed or out of supported range.
    Usage(String),
    /// The request was fine but a verification or property failed.
    Failure(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: Error) -> CliError {
    CliError::Failure(e.to_string())
}

/// Build the global thread pool from MAXAI_THREADS when set. Called
/// once at startup; an unset or empty variable keeps the default
/// (one thread per core).
pub fn init_thread_pool() {
    let Ok(raw) = std::env::var("MAXAI_THREADS") else {
        return;
    };
    if raw.is_empty() {
        return;
    }
    match raw.parse::<usize>() {
        Ok(t) if t > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
        _ => eprintln!("warning: ignoring MAXAI_THREADS={raw:?}: not a positive integer"),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(cli.json, args),
        Command::Ai(args) => cmd_ai(cli.json, args),
        Command::Wmatrix(args) => cmd_wmatrix(cli.json, args),
        Command::Count(args) => cmd_count(cli.json, args),
        Command::Verify(args) => cmd_verify(cli.json, args),
    }
}

fn require_odd_arity(n: usize, max: usize, what: &str) -> Result<(), CliError> {
    if n == 0 || n % 2 == 0 {
        return Err(CliError::Usage(format!("{what} needs an odd arity, got {n}")));
    }
    if n > max {
        return Err(CliError::Usage(format!(
            "{what} supports arities up to {max}, got {n}"
        )));
    }
    Ok(())
}

fn emit<T: Serialize>(json: bool, record: &T, text: String) -> Result<(), CliError> {
    if json {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::Failure(format!("serializing the record: {e}")))?;
        println!("{line}");
    } else {
        print!("{text}");
    }
    Ok(())
}

fn join_usize(xs: &[usize]) -> String {
    if xs.is_empty() {
        return "-".into();
    }
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct GenRecord {
    command: &'static str,
    n: usize,
    k: usize,
    i_indices: Vec<usize>,
    j_indices: Vec<usize>,
    truth_table_hex: String,
    anf_terms: Vec<String>,
    ai_claimed: usize,
    ai_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    version: &'static str,
}

impl GenRecord {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "k: {}", self.k);
        let _ = writeln!(out, "i_indices: {}", join_usize(&self.i_indices));
        let _ = writeln!(out, "j_indices: {}", join_usize(&self.j_indices));
        let _ = writeln!(out, "truth_table_hex: {}", self.truth_table_hex);
        let _ = writeln!(out, "anf_terms: {}", anf_text(&self.anf_terms));
        let _ = writeln!(out, "ai_claimed: {}", self.ai_claimed);
        let _ = writeln!(out, "ai_verified: {}", self.ai_verified);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        let _ = writeln!(out, "version: {}", self.version);
        out
    }
}

fn anf_text(terms: &[String]) -> String {
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn singular_selection_message(w: &WMatrix, sel: &Selection) -> String {
    let rows: Vec<usize> = sel.i_indices().iter().map(|&i| i - 1).collect();
    let cols: Vec<usize> = sel.j_indices().iter().map(|&j| j - 1).collect();
    let sub = w
        .matrix()
        .submatrix(&rows, &cols)
        .expect("selection was validated before diagnosis");
    let rendered: Vec<String> = (0..sub.n_rows()).map(|r| sub.row(r).to_string()).collect();
    format!(
        "selection (i = {}; j = {}) does not give maximum immunity: \
         the {k}x{k} submatrix [{}] is singular (rank {})",
        join_usize(sel.i_indices()),
        join_usize(sel.j_indices()),
        rendered.join("; "),
        sub.rank(),
        k = sel.k(),
    )
}

fn cmd_gen(json: bool, args: GenArgs) -> Result<(), CliError> {
    require_odd_arity(args.n, 15, "gen")?;
    let n = args.n;
    let w = w_matrix_combinatorial(n).map_err(internal)?;
    let side = w.side();

    let (sel, seed_used) = if let Some(i_indices) = args.i {
        if i_indices.len() >= side && !args.allow_full_k {
            return Err(CliError::Usage(format!(
                "selecting all {side} rows flips every point; pass --allow-full-k to accept"
            )));
        }
        match args.j {
            Some(j_indices) => {
                let sel = Selection::new(i_indices, j_indices).map_err(usage)?;
                if !is_max_ai_selection(&w, &sel).map_err(usage)? {
                    return Err(CliError::Failure(singular_selection_message(&w, &sel)));
                }
                (sel, None)
            }
            None => {
                let j = complete_j_indices(&w, &i_indices).map_err(usage)?;
                (Selection::new(i_indices, j).map_err(internal)?, None)
            }
        }
    } else {
        let k = args.k.ok_or_else(|| {
            CliError::Usage("pass --k for a random draw or --i for explicit rows".into())
        })?;
        if k > side {
            return Err(CliError::Usage(format!(
                "k = {k} out of range: the matrix for n = {n} has {side} rows"
            )));
        }
        if k == side {
            if !args.allow_full_k {
                return Err(CliError::Usage(format!(
                    "k = {side} flips every point (giving the base's complement); \
                     pass --allow-full-k to accept"
                )));
            }
            let all: Vec<usize> = (1..=side).collect();
            let sel = Selection::new(all.clone(), all).map_err(internal)?;
            if !is_max_ai_selection(&w, &sel).map_err(internal)? {
                return Err(CliError::Failure(
                    "the full transition matrix is singular; this indicates a broken build".into(),
                ));
            }
            (sel, None)
        } else {
            let (sel, _, used) = construct_random_with(&w, k, args.seed).map_err(usage)?;
            (sel, Some(used))
        }
    };

    let f = assemble_function(&w, &sel).map_err(internal)?;
    let want_verify = args.verify.unwrap_or(n <= 9);
    let mut verified = false;
    if want_verify {
        if !has_max_ai_odd(&f).map_err(internal)? {
            return Err(CliError::Failure(
                "verification failed: the assembled function does not reach maximum immunity"
                    .into(),
            ));
        }
        if n <= 7 {
            let found = algebraic_immunity(&f).ai;
            if found != (n + 1) / 2 {
                return Err(CliError::Failure(format!(
                    "verification failed: annihilator search found immunity {found} \
                     instead of {}",
                    (n + 1) / 2
                )));
            }
        }
        verified = true;
    }

    let record = GenRecord {
        command: "gen",
        n,
        k: sel.k(),
        i_indices: sel.i_indices().to_vec(),
        j_indices: sel.j_indices().to_vec(),
        truth_table_hex: f.to_hex(),
        anf_terms: f.anf().terms().iter().map(ToString::to_string).collect(),
        ai_claimed: (n + 1) / 2,
        ai_verified: verified,
        seed: seed_used,
        version: VERSION,
    };
    emit(json, &record, record.to_text())
}

#[derive(Serialize)]
struct AiRecord {
    command: &'static str,
    n: usize,
    truth_table_hex: String,
    ai: usize,
    witness: String,
    witness_side: String,
    version: &'static str,
}

impl AiRecord {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "truth_table_hex: {}", self.truth_table_hex);
        let _ = writeln!(out, "ai: {}", self.ai);
        let _ = writeln!(out, "witness: {}", self.witness);
        let _ = writeln!(out, "witness_side: {}", self.witness_side);
        let _ = writeln!(out, "version: {}", self.version);
        out
    }
}

fn cmd_ai(json: bool, args: AiArgs) -> Result<(), CliError> {
    if args.n == 0 || args.n > 15 {
        return Err(CliError::Usage(format!(
            "ai supports arities 1 through 15, got {}",
            args.n
        )));
    }
    let f = BooleanFunction::from_hex(args.n, &args.tt).map_err(usage)?;
    let report = algebraic_immunity(&f);
    let witness = report.witness.expect("the search always produces a witness");
    let side = report.witness_side.expect("a witness always has a side");
    let record = AiRecord {
        command: "ai",
        n: args.n,
        truth_table_hex: f.to_hex(),
        ai: report.ai,
        witness: witness.to_string(),
        witness_side: side.to_string(),
        version: VERSION,
    };
    emit(json, &record, record.to_text())
}

#[derive(Serialize)]
struct WmatrixRecord {
    command: &'static str,
    n: usize,
    method: &'static str,
    rows: Vec<String>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    version: &'static str,
}

fn cmd_wmatrix(json: bool, args: WmatrixArgs) -> Result<(), CliError> {
    require_odd_arity(args.n, 15, "wmatrix")?;
    let n = args.n;
    if args.method != MatrixMethod::Combinatorial && n > 13 {
        return Err(CliError::Usage(format!(
            "matrix inversion is supported up to n = 13; \
             use --method combinatorial for n = {n}"
        )));
    }

    let (w, method) = match args.method {
        MatrixMethod::Inverse => {
            let base = BooleanFunction::majority_indicator(n, true).map_err(usage)?;
            (w_matrix_inverse(&base).map_err(internal)?, "inverse")
        }
        MatrixMethod::Combinatorial => {
            (w_matrix_combinatorial(n).map_err(usage)?, "combinatorial")
        }
        MatrixMethod::Both => {
            let base = BooleanFunction::majority_indicator(n, true).map_err(usage)?;
            let by_inverse = w_matrix_inverse(&base).map_err(internal)?;
            let by_rule = w_matrix_combinatorial(n).map_err(internal)?;
            for r in 0..by_inverse.side() {
                if by_inverse.matrix().row(r) != by_rule.matrix().row(r) {
                    return Err(CliError::Failure(format!(
                        "the two computations disagree at row {} (offset point {}): \
                         inverse gives {}, the coefficient rule gives {}",
                        r + 1,
                        by_inverse.row_labels()[r],
                        by_inverse.matrix().row(r),
                        by_rule.matrix().row(r),
                    )));
                }
            }
            (by_inverse, "both")
        }
    };

    let row_labels: Vec<String> = w.row_labels().iter().map(ToString::to_string).collect();
    let col_labels: Vec<String> = w.col_labels().iter().map(ToString::to_string).collect();
    let record = WmatrixRecord {
        command: "wmatrix",
        n,
        method,
        rows: (0..w.side()).map(|r| w.matrix().row(r).to_string()).collect(),
        row_labels: row_labels.clone(),
        col_labels: col_labels.clone(),
        version: VERSION,
    };
    let text = format!(
        "{}rows: {}\ncols: {}\n",
        w.matrix(),
        row_labels.join(" "),
        col_labels.join(" ")
    );
    emit(json, &record, text)
}

#[derive(Serialize)]
struct CountRecord {
    command: &'static str,
    n: usize,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_k: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    version: &'static str,
}

fn count_error(e: Error) -> CliError {
    match e {
        Error::TooLarge(_) | Error::InvalidArity(_) | Error::OutOfRange(_) => usage(e),
        other => internal(other),
    }
}

fn cmd_count(json: bool, args: CountArgs) -> Result<(), CliError> {
    require_odd_arity(args.n, 15, "count")?;
    let n = args.n;

    if args.method != CountMethod::Sample {
        for (flag, given) in [
            ("--k", args.k.is_some()),
            ("--trials", args.trials.is_some()),
            ("--seed", args.seed.is_some()),
        ] {
            if given {
                return Err(CliError::Usage(format!(
                    "{flag} applies only to --method sample"
                )));
            }
        }
    }
    if args.method != CountMethod::Exhaustive && args.resume.is_some() {
        return Err(CliError::Usage(
            "--resume applies only to --method exhaustive".into(),
        ));
    }
    if n == 5 && args.method != CountMethod::Sample && !args.yes_huge {
        return Err(CliError::Usage(format!(
            "the n = 5 {} census performs about 6.0e8 rank checks; pass --yes-huge \
             to run it{}",
            match args.method {
                CountMethod::Exhaustive => "exhaustive",
                _ => "submatrix",
            },
            if args.method == CountMethod::Exhaustive {
                " (consider --resume <path> for checkpointing)"
            } else {
                ""
            }
        )));
    }

    let result: CensusResult = match args.method {
        CountMethod::Exhaustive => {
            let opts = ExhaustiveOptions {
                checkpoint_path: args.resume,
                ..ExhaustiveOptions::default()
            };
            match count_exhaustive_with(n, &opts).map_err(count_error)? {
                ExhaustiveRun::Complete(result) => result,
                ExhaustiveRun::Paused { .. } => unreachable!("no stop budget was set"),
            }
        }
        CountMethod::Submatrix => {
            let w = w_matrix_combinatorial(n).map_err(usage)?;
            count_submatrix(&w).map_err(count_error)?
        }
        CountMethod::Sample => sample_fraction(
            n,
            args.k.unwrap_or(1),
            args.trials.unwrap_or(10_000),
            args.seed.unwrap_or(0),
        )
        .map_err(count_error)?,
    };

    let bound_holds = result.check_lower_bound();
    let mut line = format!("n={} method={}", result.n, result.method);
    let record = match &result.outcome {
        CensusOutcome::Exact { count, per_k } => {
            let _ = write!(line, " count={count}");
            let _ = write!(line, " elapsed={:.2}s", result.elapsed.as_secs_f64());
            CountRecord {
                command: "count",
                n: result.n,
                method: result.method.to_string(),
                count: Some(*count),
                per_k: per_k.clone(),
                bound_holds,
                k: None,
                hits: None,
                trials: None,
                fraction: None,
                seed: None,
                version: VERSION,
            }
        }
        CensusOutcome::Estimate { k, hits, trials } => {
            let fraction = (*trials > 0).then(|| *hits as f64 / *trials as f64);
            let _ = write!(line, " k={k} hits={hits} trials={trials}");
            if let Some(fr) = fraction {
                let _ = write!(line, " fraction={fr:.6}");
            }
            if let Some(seed) = result.seed {
                let _ = write!(line, " seed={seed}");
            }
            let _ = write!(line, " elapsed={:.2}s", result.elapsed.as_secs_f64());
            CountRecord {
                command: "count",
                n: result.n,
                method: result.method.to_string(),
                count: None,
                per_k: None,
                bound_holds: None,
                k: Some(*k),
                hits: Some(*hits),
                trials: Some(*trials),
                fraction,
                seed: result.seed,
                version: VERSION,
            }
        }
    };
    line.push('\n');
    if let Some(per_k) = &record.per_k {
        let joined: Vec<String> = per_k.iter().map(ToString::to_string).collect();
        let _ = writeln!(line, "per_k: {}", joined.join(" "));
    }
    if let (Some(holds), Some(count)) = (bound_holds, record.count) {
        let _ = writeln!(
            line,
            "bound: {count} > {}: {}",
            result.lower_bound_text(),
            if holds { "OK" } else { "VIOLATED" }
        );
    }
    emit(json, &record, line)
}

#[derive(Serialize)]
struct CheckReport {
    name: &'static str,
    cases: u64,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct VerifyRecord {
    command: &'static str,
    n: usize,
    samples: u64,
    seed: u64,
    checks: Vec<CheckReport>,
    all_ok: bool,
    version: &'static str,
}

impl VerifyRecord {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "samples: {}", self.samples);
        let _ = writeln!(out, "seed: {}", self.seed);
        for check in &self.checks {
            let _ = writeln!(
                out,
                "{}: {} ({} cases)",
                check.name,
                if check.ok { "ok" } else { "FAILED" },
                check.cases
            );
            if let Some(detail) = &check.detail {
                let _ = writeln!(out, "reproducer: {detail}");
            }
        }
        let _ = writeln!(
            out,
            "result: {}",
            if self.all_ok {
                "all checks passed".into()
            } else {
                let failed = self.checks.iter().filter(|c| !c.ok).count();
                format!("{failed} check(s) failed")
            }
        );
        out
    }
}

/// Submatrix invertibility must coincide with the rank criterion on the
/// assembled function, exhaustively at n = 3 and on seeded draws above.
fn check_selection_equivalence(
    w: &WMatrix,
    n: usize,
    samples: u64,
    seed: u64,
    rng: &mut ChaCha12Rng,
) -> CheckReport {
    let side = w.side();
    let name = "selection_equivalence";
    let mut cases = 0u64;
    if n == 3 {
        use itertools::Itertools;
        for k in 0..=side {
            for i in (1..=side).combinations(k) {
                for j in (1..=side).combinations(k) {
                    cases += 1;
                    let sel = Selection::new(i.clone(), j.clone())
                        .expect("enumerated indices are valid");
                    if !selections_agree(w, &sel) {
                        return CheckReport {
                            name,
                            cases,
                            ok: false,
                            detail: Some(reproducer(n, seed, &sel)),
                        };
                    }
                }
            }
        }
        return CheckReport { name, cases, ok: true, detail: None };
    }
    for sample in 0..samples {
        cases += 1;
        let k = (rng.next_u64() % (side as u64 + 1)) as usize;
        let i: Vec<usize> = random_k_subset(side, k, rng).into_iter().map(|x| x + 1).collect();
        let j: Vec<usize> = random_k_subset(side, k, rng).into_iter().map(|x| x + 1).collect();
        let sel = Selection::new(i, j).expect("drawn indices are valid");
        // Bound the annihilator searches: they are the slow half.
        let deep = n <= 7 && sample < 50;
        if !selections_agree_depth(w, &sel, deep) {
            return CheckReport {
                name,
                cases,
                ok: false,
                detail: Some(reproducer(n, seed, &sel)),
            };
        }
    }
    CheckReport { name, cases, ok: true, detail: None }
}

fn selections_agree(w: &WMatrix, sel: &Selection) -> bool {
    selections_agree_depth(w, sel, true)
}

fn selections_agree_depth(w: &WMatrix, sel: &Selection, deep: bool) -> bool {
    let by_submatrix = is_max_ai_selection(w, sel).expect("validated selection");
    let f = assemble_function(w, sel).expect("validated selection");
    let by_rank = has_max_ai_odd(&f).expect("odd arity");
    if by_submatrix != by_rank {
        return false;
    }
    if deep {
        let n = w.arity();
        let by_search = algebraic_immunity(&f).ai == (n + 1) / 2;
        if by_rank != by_search {
            return false;
        }
    }
    true
}

fn reproducer(n: usize, seed: u64, sel: &Selection) -> String {
    format!(
        "n={n} seed={seed} i={} j={}",
        join_usize(sel.i_indices()),
        join_usize(sel.j_indices())
    )
}

/// A balanced function without low-degree annihilators of its own never
/// hides one for its complement; exhaustive at n = 3, sampled above.
fn check_annihilator_sides(n: usize, samples: u64, seed: u64, rng: &mut ChaCha12Rng) -> CheckReport {
    let name = "annihilator_side_implication";
    let mut cases = 0u64;
    if n == 3 {
        for bits in 0u32..256 {
            if bits.count_ones() != 4 {
                continue;
            }
            cases += 1;
            let f = function_from_bits(bits);
            if !check_annihilator_implication(&f).expect("balanced odd input") {
                return CheckReport {
                    name,
                    cases,
                    ok: false,
                    detail: Some(format!("n=3 tt={}", f.to_hex())),
                };
            }
        }
        return CheckReport { name, cases, ok: true, detail: None };
    }
    for _ in 0..samples {
        cases += 1;
        let f = BooleanFunction::random_balanced(n, rng).expect("supported arity");
        if !check_annihilator_implication(&f).expect("balanced odd input") {
            return CheckReport {
                name,
                cases,
                ok: false,
                detail: Some(format!("n={n} seed={seed} tt={}", f.to_hex())),
            };
        }
    }
    CheckReport { name, cases, ok: true, detail: None }
}

fn function_from_bits(bits: u32) -> BooleanFunction {
    let mut table = crate::gf2::BitVector::zeros(8);
    for i in 0..8 {
        if bits >> i & 1 == 1 {
            table.set(i, true);
        }
    }
    BooleanFunction::new(3, table).expect("eight table bits")
}

/// Every row subset completes to an invertible submatrix; exhaustive at
/// n = 3, sampled above.
fn check_column_completion(
    w: &WMatrix,
    n: usize,
    samples: u64,
    seed: u64,
    rng: &mut ChaCha12Rng,
) -> CheckReport {
    let side = w.side();
    let name = "column_completion";
    let mut cases = 0u64;
    let try_rows = |i: Vec<usize>, cases: u64| -> Option<String> {
        let j = match complete_j_indices(w, &i) {
            Ok(j) => j,
            Err(e) => return Some(format!("n={n} seed={seed} i={} ({e})", join_usize(&i))),
        };
        let sel = Selection::new(i, j).expect("completion output is valid");
        match is_max_ai_selection(w, &sel) {
            Ok(true) => None,
            _ => Some(reproducer(n, seed, &sel)),
        }
        .map(|d| format!("case {cases}: {d}"))
    };
    if n == 3 {
        use itertools::Itertools;
        for k in 0..=side {
            for i in (1..=side).combinations(k) {
                cases += 1;
                if let Some(detail) = try_rows(i, cases) {
                    return CheckReport { name, cases, ok: false, detail: Some(detail) };
                }
            }
        }
        return CheckReport { name, cases, ok: true, detail: None };
    }
    for _ in 0..samples {
        cases += 1;
        let k = (rng.next_u64() % (side as u64 + 1)) as usize;
        let i: Vec<usize> = random_k_subset(side, k, rng).into_iter().map(|x| x + 1).collect();
        if let Some(detail) = try_rows(i, cases) {
            return CheckReport { name, cases, ok: false, detail: Some(detail) };
        }
    }
    CheckReport { name, cases, ok: true, detail: None }
}

fn cmd_verify(json: bool, args: VerifyArgs) -> Result<(), CliError> {
    require_odd_arity(args.n, 9, "verify")?;
    let n = args.n;
    let seed = resolve_seed(args.seed);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let base = BooleanFunction::majority_indicator(n, true).map_err(internal)?;
    let by_rule = w_matrix_combinatorial(n).map_err(internal)?;
    let by_inverse = w_matrix_inverse(&base).map_err(internal)?;

    let mut checks = Vec::new();
    let matrices_equal = by_rule.matrix() == by_inverse.matrix();
    checks.push(CheckReport {
        name: "w_cross_method",
        cases: 1,
        ok: matrices_equal,
        detail: (!matrices_equal).then(|| {
            let r = (0..by_rule.side())
                .find(|&r| by_rule.matrix().row(r) != by_inverse.matrix().row(r))
                .expect("some row differs");
            format!(
                "n={n} row {} differs: inverse {} vs rule {}",
                r + 1,
                by_inverse.matrix().row(r),
                by_rule.matrix().row(r)
            )
        }),
    });

    checks.push(check_selection_equivalence(&by_rule, n, args.samples, seed, &mut rng));
    checks.push(check_annihilator_sides(n, args.samples, seed, &mut rng));
    checks.push(check_column_completion(&by_rule, n, args.samples, seed, &mut rng));

    let all_ok = checks.iter().all(|c| c.ok);
    let record = VerifyRecord {
        command: "verify",
        n,
        samples: args.samples,
        seed,
        checks,
        all_ok,
        version: VERSION,
    };
    emit(json, &record, record.to_text())?;
    if !all_ok {
        let failed: Vec<&str> = record
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.name)
            .collect();
        return Err(CliError::Failure(format!(
            "verification failed: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

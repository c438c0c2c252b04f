//! Command-line front end.
//!
//! Exit codes: 0 when everything checked out, 1 when a check or suite failed
//! (details in the report), 2 for unusable input, with a one-line diagnostic
//! on standard error.

pub mod io;
pub mod report;
mod text;

use std::fs;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::conjecture::{corpus_item, counterexample_search, run_suite, verdict, Family, SearchParams, SuiteConfig, SuiteId};
use crate::decomp::{
    asymptotic_limit, canonical_form_37, max_partial_isometric_subspace, refined_decomposition_41, theorem31_structure,
    three_block_form_23,
};
use crate::error::Error;
use crate::generators::{generate, shift_symmetry_pair, ClassKind, ClassSpec, CouplingVariant};
use crate::linalg::{ComplexMatrix, Subspace, Tolerances};
use crate::par::Execution;
use io::MatrixFile;

#[derive(Debug, Parser)]
#[command(name = "fongtsui", version, about = "Checks |T| <= |Re T| and the structure theorems around it on complex matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    #[arg(long, global = true)]
    pub tol_eq: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Report format; `gen` and `example` write matrix JSON unless `text` is asked for.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    /// Add wall-clock timings to reports.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Run trials on the calling thread even when the parallel backend is built in.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report on one matrix.
    Analyze {
        /// Matrix file (JSON or CSV), or `-` for standard input.
        input: String,
        /// Quasi-isometry orders to test.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
        m: Vec<usize>,
    },
    /// Draw a seeded operator from a class.
    Gen {
        #[arg(value_enum)]
        class: ClassName,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// For m-quasi-isometries: couple `R ≠ 0`, giving up contractivity.
        #[arg(long)]
        coupled: bool,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Variant::Pure)]
        variant: Variant,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// One decomposition of a contraction.
    Decompose {
        input: String,
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Run a theorem suite over its seeded corpus.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Inclusive range `A..B`; defaults to the suite's own range.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<RangeInclusive<usize>>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Random contractions through the verdict; fails on any soundness violation.
    Fuzz {
        #[arg(long, value_parser = parse_dims, default_value = "2..8")]
        dims: RangeInclusive<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also run the counterexample search with this many restarts per dimension.
        #[arg(long, default_value_t = 0)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Exact worked examples.
    Example {
        #[command(subcommand)]
        which: ExampleName,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExampleName {
    /// `T = [[0, I], [0, 0]]` with the symmetry `U = [[0, I], [I, 0]]`.
    Rmk41 {
        #[arg(long, default_value_t = 1)]
        half_dim: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassName {
    Unitary,
    Symmetry,
    Contraction,
    PureContraction,
    PartialIsometry,
    Nilpotent,
    MQuasiIsometry,
    SymmetryPlusZero,
    SelfAdjointContraction,
    HermitianPlusPerturbation,
    BlockTriangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Pure,
    SaturatedCoupled,
    SaturatedDecoupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    MaxPi,
    Asymptotic,
    Thm31,
    Form37,
    Rmk41,
    Blocks23,
}

/// `A..B` or `A..=B` (both inclusive), or a single size.
pub fn parse_dims(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad dimension `{x}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if a == 0 || a > b {
        return Err(format!("dims `{s}` must be a nonempty range of positive sizes"));
    }
    Ok(a..=b)
}

enum Failure {
    /// Exit 1: the command ran but a check failed.
    Check(String),
    /// Exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation(_) => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    output: Option<PathBuf>,
}

impl Io<'_> {
    fn emit(&mut self, text: &str) -> std::result::Result<(), Failure> {
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("writing {}: {e}", path.display()))),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| Failure::Input(format!("writing output: {e}"))),
        }
    }

    fn emit_report<T: Serialize>(&mut self, value: &T, format: Format) -> std::result::Result<(), Failure> {
        let v = serde_json::to_value(value).map_err(|e| Failure::Input(format!("serializing report: {e}")))?;
        let text = match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Text => text::render(&v),
        };
        self.emit(&text)
    }

    fn read_matrix(&mut self, arg: &str) -> std::result::Result<(Vec<u8>, ComplexMatrix), Failure> {
        let raw = io::read_source(arg, self.stdin)?;
        let t = io::parse_matrix(&raw)?;
        Ok((raw, t))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let _ = writeln!(stderr, "{}", msg.lines().next().unwrap_or("invalid arguments"));
            return 2;
        }
    };
    let mut io = Io { stdin, stdout, output: cli.common.output.clone() };
    match dispatch(&cli, &mut io) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {}", msg.lines().next().unwrap_or_default());
            2
        }
    }
}

fn tolerances(c: &Common) -> Result<Tolerances, Error> {
    let d = Tolerances::default();
    let tol = Tolerances {
        rank: c.tol_rank.unwrap_or(d.rank),
        psd: c.tol_psd.unwrap_or(d.psd),
        eq: c.tol_eq.unwrap_or(d.eq),
        max_iter: c.max_iter.unwrap_or(d.max_iter),
        conv: d.conv,
    };
    tol.validate()?;
    Ok(tol)
}

fn dispatch(cli: &Cli, io: &mut Io) -> Outcome {
    let tol = tolerances(&cli.common)?;
    let format = cli.common.format;
    let report_format = format.unwrap_or(Format::Text);
    let execution = if cli.common.sequential { Execution::Sequential } else { Execution::available() };
    match &cli.command {
        Command::Analyze { input, m } => {
            let (raw, t) = io.read_matrix(input)?;
            let r = report::analyze(&raw, &t, m, &tol, cli.common.timings)?;
            io.emit_report(&r, report_format)?;
            Ok(r.verdict.soundness_violation.is_none())
        }
        Command::Gen { class, dim, rank, order, m, coupled, epsilon, variant, seed } => {
            let kind = class_kind(*class, *dim, *rank, *order, *m, *coupled, *epsilon, *variant);
            let t = generate(&ClassSpec::new(kind, *dim, *seed))?;
            write_matrix(io, &t, format)?;
            Ok(true)
        }
        Command::Decompose { input, which } => {
            let (_, t) = io.read_matrix(input)?;
            let v = decompose(&t, *which, &tol)?;
            io.emit_report(&v, report_format)?;
            Ok(true)
        }
        Command::Verify { suite, trials, dims, seed } => {
            let id: SuiteId = suite.parse()?;
            let mut config = SuiteConfig::new(*trials, dims.clone().unwrap_or_else(|| id.default_dims()), *seed);
            config.execution = execution;
            let start = Instant::now();
            let r = run_suite(id, &config, &tol)?;
            let mut v = serde_json::to_value(&r).expect("suite reports serialize");
            if cli.common.timings {
                v["elapsed_seconds"] = json!(start.elapsed().as_secs_f64());
            }
            io.emit_report(&v, report_format)?;
            Ok(r.all_passed())
        }
        Command::Fuzz { dims, trials, seed, restarts, iters, delta } => {
            let start = Instant::now();
            let (mut v, passed) = fuzz(dims, *trials, *seed, *restarts, *iters, *delta, execution, &tol)?;
            if cli.common.timings {
                v["elapsed_seconds"] = json!(start.elapsed().as_secs_f64());
            }
            io.emit_report(&v, report_format)?;
            Ok(passed)
        }
        Command::Example { which: ExampleName::Rmk41 { half_dim } } => {
            let (v, exact) = example_rmk41(*half_dim)?;
            match format {
                Some(Format::Text) => io.emit(&text::render(&v))?,
                _ => io.emit(&format!("{}\n", serde_json::to_string(&v).expect("values serialize")))?,
            }
            Ok(exact)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn class_kind(
    class: ClassName,
    dim: usize,
    rank: Option<usize>,
    order: Option<usize>,
    m: Option<usize>,
    coupled: bool,
    epsilon: f64,
    variant: Variant,
) -> ClassKind {
    match class {
        ClassName::Unitary => ClassKind::Unitary,
        ClassName::Symmetry => ClassKind::Symmetry,
        ClassName::Contraction => ClassKind::Contraction,
        ClassName::PureContraction => ClassKind::PureContraction,
        ClassName::PartialIsometry => ClassKind::PartialIsometry { rank: rank.unwrap_or(dim.div_ceil(2)) },
        ClassName::Nilpotent => ClassKind::Nilpotent { order: order.unwrap_or(dim) },
        ClassName::MQuasiIsometry => ClassKind::MQuasiIsometry { m: m.unwrap_or(2), contractive: !coupled },
        ClassName::SymmetryPlusZero => ClassKind::SymmetryPlusZero,
        ClassName::SelfAdjointContraction => ClassKind::SelfAdjointContraction,
        ClassName::HermitianPlusPerturbation => ClassKind::HermitianPlusPerturbation { epsilon },
        ClassName::BlockTriangular => ClassKind::BlockTriangular {
            variant: match variant {
                Variant::Pure => CouplingVariant::Pure,
                Variant::SaturatedCoupled => CouplingVariant::SaturatedCoupled,
                Variant::SaturatedDecoupled => CouplingVariant::SaturatedDecoupled,
            },
        },
    }
}

fn write_matrix(io: &mut Io, t: &ComplexMatrix, format: Option<Format>) -> std::result::Result<(), Failure> {
    let csv = io.output.as_deref().is_some_and(io::is_csv_path);
    let text = match format {
        Some(Format::Text) => text::render(&serde_json::to_value(MatrixFile::from_matrix(t)).expect("matrices serialize")),
        _ if csv => io::to_csv(t),
        _ => io::matrix_json(t),
    };
    io.emit(&text)
}

fn mat(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("matrices serialize")
}

fn subspace(s: &Subspace) -> Value {
    json!({ "dim": s.dim(), "basis": mat(s.basis()) })
}

fn decompose(t: &ComplexMatrix, which: Which, tol: &Tolerances) -> Result<Value, Error> {
    Ok(match which {
        Which::MaxPi => {
            let r = max_partial_isometric_subspace(t, tol)?;
            json!({
                "m": subspace(&r.m),
                "h0": subspace(&r.h0),
                "h1": subspace(&r.h1),
                "k": subspace(&r.k),
                "two_block": r.two_block.summary(),
                "three_block": r.three_block.summary(),
                "w": mat(r.w()),
                "r": mat(r.r()),
                "q": mat(r.q()),
                "eq22_holds": r.eq22_holds,
                "eq22_residual": r.eq22_residual,
                "n_sum_invariant": r.n_sum_invariant,
                "n_sum_residual": r.n_sum_residual,
                "q_pure": r.q_pure,
                "q_defect_dim": r.q_defect.dim(),
                "refinement_steps": r.refinement_steps,
                "residuals": r.residuals,
                "reconstruction_residual": r.two_block.reconstruction_residual(t),
            })
        }
        Which::Asymptotic => {
            let a = asymptotic_limit(t, tol)?;
            json!({
                "s_t": mat(&a.s_t),
                "iterations": a.iterations,
                "max_isometric": subspace(&a.max_isometric),
            })
        }
        Which::Thm31 => {
            let r = theorem31_structure(t, tol)?;
            json!({
                "condition_holds": r.condition_holds,
                "defect_kernels": r.defect_kernels.iter().map(subspace).collect::<Vec<_>>(),
                "kernel_equalities": r.kernel_equalities,
                "symmetry_part": mat(&r.symmetry_part),
                "symmetry_hermitian_residual": r.symmetry_residuals.0,
                "symmetry_square_residual": r.symmetry_residuals.1,
                "reducing_residual": r.reducing_residual,
                "re_kernel_identity": r.re_kernel_identity,
                "n_tstar_split": r.n_tstar_split,
                "form_41": r.form_41.summary(),
                "form_41_residual": r.form_41_residual,
            })
        }
        Which::Form37 => {
            let f = canonical_form_37(t, tol)?;
            json!({
                "g": subspace(&f.g),
                "blocks": f.decomposition.summary(),
                "s": mat(f.s()),
                "r": mat(f.r()),
                "q": mat(f.q()),
                "flags": f.flags,
            })
        }
        Which::Rmk41 => {
            let r = refined_decomposition_41(t, tol)?;
            json!({
                "blocks": r.decomposition.summary(),
                "adjoint_blocks": r.adjoint_form.summary(),
                "w1": mat(r.w1()),
                "r00": mat(r.r00()),
                "r01": mat(r.r01()),
                "q0": mat(r.q0()),
                "q1": mat(r.q1()),
                "r_star": mat(&r.r_star),
                "q_star": mat(&r.q_star),
                "pattern_residual": r.pattern_residual,
                "adjoint_pattern_residual": r.adjoint_pattern_residual,
                "n_tstar_split": r.n_tstar_split,
            })
        }
        Which::Blocks23 => {
            let d = three_block_form_23(t, tol)?;
            json!({
                "blocks": d.summary(),
                "assembled": mat(&d.assembled()),
                "reconstruction_residual": d.reconstruction_residual(t),
            })
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn fuzz(
    dims: &RangeInclusive<usize>,
    trials: usize,
    seed: u64,
    restarts: usize,
    iters: usize,
    delta: f64,
    execution: Execution,
    tol: &Tolerances,
) -> Result<(Value, bool), Error> {
    let outcomes = execution.map(trials, |i| -> Result<Value, Error> {
        let item = corpus_item(Family::Contractions, dims, seed, i)?;
        let v = verdict(&item.t, tol)?;
        Ok(json!({
            "index": i,
            "seed": item.seed,
            "label": item.label,
            "satisfies": v.condition.fong_tsui_holds,
            "violation": v.soundness_violation,
            "recheck": v.recheck,
        }))
    });
    let mut satisfiers = 0;
    let mut violations = Vec::new();
    for o in outcomes {
        let v = o?;
        if v["satisfies"] == json!(true) {
            satisfiers += 1;
        }
        if !v["violation"].is_null() {
            violations.push(v);
        }
    }
    let mut search = Vec::new();
    let mut search_ok = true;
    if restarts > 0 {
        for dim in dims.clone().filter(|&d| d >= 2) {
            let mut p = SearchParams::new(dim, restarts, iters, delta, seed);
            p.execution = execution;
            let r = counterexample_search(&p, tol)?;
            let found = r.best_defect >= -tol.psd && r.best_asymmetry >= delta;
            search_ok &= !found;
            search.push(json!({
                "dim": dim,
                "best_defect": r.best_defect,
                "best_asymmetry": r.best_asymmetry,
                "evaluations": r.evaluations,
                "counterexample": found,
            }));
        }
    }
    let passed = violations.is_empty() && search_ok;
    let report = json!({
        "trials": trials,
        "dims": [dims.start(), dims.end()],
        "seed": seed,
        "satisfiers": satisfiers,
        "violations": violations,
        "search": search,
        "passed": passed,
    });
    Ok((report, passed))
}

fn example_rmk41(half_dim: usize) -> Result<(Value, bool), Error> {
    let (t, u) = shift_symmetry_pair(half_dim)?;
    let h = half_dim;
    let one = ComplexMatrix::identity(h);
    let zero = ComplexMatrix::zeros(h, h);
    let upper = one.direct_sum(&zero);
    let lower = zero.direct_sum(&one);
    let tu = &t * &u;
    let ut = &u * &t;
    let tu_error = (&tu - &upper).max_abs();
    let ut_error = (&ut - &lower).max_abs();
    let exact = tu_error == 0.0 && ut_error == 0.0;
    let mut v = mat(&t);
    v["u"] = mat(&u);
    v["tu"] = mat(&tu);
    v["ut"] = mat(&ut);
    v["tu_equals_i_plus_0"] = json!(tu_error == 0.0);
    v["ut_equals_0_plus_i"] = json!(ut_error == 0.0);
    v["max_entry_error"] = json!(tu_error.max(ut_error));
    Ok((v, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut input = stdin.as_bytes();
        let code = run(std::iter::once("fongtsui").chain(args.iter().copied()), &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dims_syntax() {
        assert_eq!(parse_dims("2..8").unwrap(), 2..=8);
        assert_eq!(parse_dims("2..=8").unwrap(), 2..=8);
        assert_eq!(parse_dims("5").unwrap(), 5..=5);
        assert!(parse_dims("0..3").is_err());
        assert!(parse_dims("4..3").is_err());
    }

    #[test]
    fn analyze_nilpotent_from_stdin() {
        let (code, out, _) = call(&["analyze", "-", "--format", "json"], r#"{"rows":2,"cols":2,"data":[[0,0],[1,0],[0,0],[0,0]]}"#);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["condition"]["fong_tsui_holds"], json!(false));
        assert!((v["condition"]["fong_tsui_defect"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    }

    #[test]
    fn bad_input_is_exit_two_with_one_line() {
        let (code, _, err) = call(&["analyze", "-"], "1,2\n3");
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
        let (code, _, err) = call(&["verify", "nope"], "");
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
        let (code, _, err) = call(&["analyze"], "");
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn example_pipes_into_analyze() {
        let (code, out, _) = call(&["example", "rmk41", "--half-dim", "2"], "");
        assert_eq!(code, 0);
        let (code, report, _) = call(&["analyze", "-", "--format", "json"], &out);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["dim"], json!(4));
        assert_eq!(v["condition"]["mortad_commutes"], json!(false));
    }

    #[test]
    fn gen_then_decompose() {
        let (code, out, _) = call(&["gen", "nilpotent", "--dim", "3", "--order", "3", "--seed", "1"], "");
        assert_eq!(code, 0);
        let (code, dec, _) = call(&["decompose", "-", "--which", "max-pi", "--format", "json"], &out);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&dec).unwrap();
        assert!(v["reconstruction_residual"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn decompose_needs_a_contraction() {
        let (code, _, err) = call(&["decompose", "-", "--which", "thm31"], "2,0\n0,1");
        assert_eq!(code, 2);
        assert!(err.contains("not a contraction"));
    }
}

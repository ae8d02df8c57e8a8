//! `ksmagic` command line.
//!
//! Exit codes: 0 success, 1 internal invariant violation, 2 invalid input,
//! 3 no contradiction (verify found grand product +1, or a commuting
//! contradiction array does not exist).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::array::{find_contradiction_perm, ArrayDocument, MagicArray, Permutation};
use crate::classical::{brute_max, Budget};
use crate::error::{Error, Result};
use crate::observable::XksForm;
use crate::quantum::{estimate_xks_with, exact_xks_form, make_state, StateKind};
use crate::report::{ConvergenceTable, DEFAULT_GHZ_EPSILON};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONTRADICTION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ksmagic", version, about = "Generalized Mermin-Peres magic arrays: build, verify, bound, simulate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the 3×(q+1) array.
    Array {
        #[command(flatten)]
        array: ArrayArgs,
        #[arg(long, value_enum, default_value_t = ArrayFormat::Text)]
        format: ArrayFormat,
    },
    /// Grand product, m, context products and commutation report.
    Verify {
        #[command(flatten)]
        array: ArrayArgs,
        #[arg(long, value_enum, default_value_t = ArrayFormat::Text)]
        format: ArrayFormat,
    },
    /// Exhaustive classical maximum (budget from KSMAGIC_MAX_BRUTE_QUBITS, default 8).
    Classical {
        #[command(flatten)]
        array: ArrayArgs,
        #[arg(long, value_enum, default_value_t = FormArg::General)]
        form: FormArg,
    },
    /// Exact quantum value on one state.
    Quantum {
        #[command(flatten)]
        array: ArrayArgs,
        /// basis:I, random:SEED or ghz
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = FormArg::General)]
        form: FormArg,
    },
    /// Monte-Carlo estimate with per-outcome flip noise.
    Sample {
        #[command(flatten)]
        array: ArrayArgs,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        seed: u64,
        /// basis:I, random:SEED or ghz [default: random:<seed>]
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum, default_value_t = FormArg::General)]
        form: FormArg,
        /// Write every shot as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Classical/quantum ratio table.
    Converge {
        #[arg(long = "max-q")]
        max_q: u64,
        /// Instrument imperfection for the GHZ comparator (default 0.01).
        #[arg(long, default_value_t = DEFAULT_GHZ_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
}

#[derive(Args, Debug)]
struct ArrayArgs {
    #[arg(long, required_unless_present = "array")]
    qubits: Option<usize>,
    /// Comma-separated images π(1),…,π(q) [default: 2,3,…,q,1]
    #[arg(long, conflicts_with_all = ["contradiction", "array"])]
    perm: Option<String>,
    /// Use the lexicographically first contradiction permutation.
    #[arg(long, conflicts_with = "array")]
    contradiction: bool,
    /// With --contradiction: every row and column must commute.
    #[arg(long, requires = "contradiction")]
    require_commuting: bool,
    /// Read the array from a JSON document.
    #[arg(long, conflicts_with = "qubits")]
    array: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArrayFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    General,
    TwoQubit,
}

impl From<FormArg> for XksForm {
    fn from(f: FormArg) -> XksForm {
        match f {
            FormArg::General => XksForm::General,
            FormArg::TwoQubit => XksForm::TwoQubit,
        }
    }
}

enum Failure {
    Error(Error),
    NoContradiction(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

struct Output {
    stdout: String,
    files: Vec<(PathBuf, Vec<u8>)>,
    code: i32,
}

impl Output {
    fn text(stdout: String) -> Output {
        Output { stdout, files: Vec::new(), code: EXIT_OK }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Internal(e.to_string()))
}

impl ArrayArgs {
    fn resolve(&self) -> std::result::Result<MagicArray, Failure> {
        if let Some(path) = &self.array {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            let doc: ArrayDocument =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            return Ok(MagicArray::from_document(&doc)?);
        }
        let q = self.qubits.ok_or_else(|| Error::InvalidInput("--qubits is required".into()))?;
        if q < 2 {
            return Err(Error::InvalidSize(format!("--qubits {q}: need q >= 2")).into());
        }
        let perm = if let Some(text) = &self.perm {
            Permutation::parse(text)?
        } else if self.contradiction {
            find_contradiction_perm(q, self.require_commuting)?.ok_or_else(|| {
                Failure::NoContradiction(format!(
                    "no contradiction permutation with commuting contexts exists for q = {q}"
                ))
            })?
        } else {
            Permutation::cyclic_shift(q)?
        };
        Ok(MagicArray::build(q, &perm)?)
    }
}

fn verify_text(array: &MagicArray) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("q = {}\nperm = ({})\nm = {}\n", array.q(), array.perm(), array.m()));
    for r in 1..=3 {
        out.push_str(&format!("R{r} = {}\n", array.row_product(r)?));
    }
    for c in 1..=array.num_cols() {
        out.push_str(&format!("C{c} = {}\n", array.col_product(c)?));
    }
    let gp = array.grand_product()?;
    out.push_str(&format!("grand product = {gp}\n"));
    let report = array.commutation_report();
    for ctx in report.rows.iter().chain(&report.columns) {
        if ctx.mutually_commuting {
            out.push_str(&format!("{}: commuting\n", ctx.label));
        } else {
            let pairs: Vec<String> =
                ctx.violations.iter().map(|((r1, c1), (r2, c2))| format!("({r1},{c1})-({r2},{c2})")).collect();
            out.push_str(&format!("{}: anticommuting pairs {}\n", ctx.label, pairs.join(" ")));
        }
    }
    out.push_str(if gp.as_sign() == Some(-1) { "contradiction confirmed\n" } else { "no contradiction\n" });
    Ok(out)
}

fn verify_json(array: &MagicArray) -> Result<String> {
    let gp = array.grand_product()?;
    let rows = (1..=3).map(|r| array.row_product(r).map(|p| p.to_string())).collect::<Result<Vec<_>>>()?;
    let cols =
        (1..=array.num_cols()).map(|c| array.col_product(c).map(|p| p.to_string())).collect::<Result<Vec<_>>>()?;
    to_json(&json!({
        "q": array.q(),
        "perm": array.perm().images(),
        "m": array.m(),
        "grand_product": gp.as_sign(),
        "contradiction": gp.as_sign() == Some(-1),
        "row_products": rows,
        "col_products": cols,
        "commutation": array.commutation_report(),
    }))
}

fn execute(command: &Command) -> std::result::Result<Output, Failure> {
    match command {
        Command::Array { array, format } => {
            let a = array.resolve()?;
            Ok(Output::text(match format {
                ArrayFormat::Text => a.to_text(),
                ArrayFormat::Json => to_json(&a.to_document())?,
            }))
        }
        Command::Verify { array, format } => {
            let a = array.resolve()?;
            let stdout = match format {
                ArrayFormat::Text => verify_text(&a)?,
                ArrayFormat::Json => verify_json(&a)?,
            };
            let code = if a.is_contradiction()? { EXIT_OK } else { EXIT_NO_CONTRADICTION };
            Ok(Output { stdout, files: Vec::new(), code })
        }
        Command::Classical { array, form } => {
            let budget = Budget::from_env()?;
            let a = array.resolve()?;
            Ok(Output::text(to_json(&brute_max(&a, (*form).into(), budget)?)?))
        }
        Command::Quantum { array, state, form } => {
            let kind = StateKind::parse(state)?;
            let a = array.resolve()?;
            let psi = make_state(kind, a.q())?;
            let value = exact_xks_form(&a, (*form).into(), &psi)?;
            Ok(Output::text(to_json(&json!({
                "q": a.q(),
                "perm": a.perm().images(),
                "state": kind.to_string(),
                "form": XksForm::from(*form),
                "exact_xks": value,
            }))?))
        }
        Command::Sample { array, shots, epsilon, seed, state, form, dump } => {
            let kind = match state {
                Some(s) => StateKind::parse(s)?,
                None => StateKind::Random(*seed),
            };
            let a = array.resolve()?;
            let psi = make_state(kind, a.q())?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut lines = Vec::new();
            let mut sink = |r: &crate::quantum::ShotRecord| -> Result<()> {
                if dump.is_some() {
                    serde_json::to_writer(&mut lines, r).map_err(|e| Error::Internal(e.to_string()))?;
                    lines.push(b'\n');
                }
                Ok(())
            };
            let estimate = estimate_xks_with(&a, (*form).into(), &psi, *shots, *epsilon, &mut rng, &mut sink)?;
            let mut out = Output::text(to_json(&estimate)?);
            if let Some(path) = dump {
                out.files.push((path.clone(), lines));
            }
            Ok(out)
        }
        Command::Converge { max_q, epsilon, out, format } => {
            let table = ConvergenceTable::new(*max_q, *epsilon)?;
            let body = match format {
                TableFormat::Csv => table.to_csv()?,
                TableFormat::Json => table.to_json()? + "\n",
            };
            Ok(match out {
                Some(path) => {
                    Output { stdout: String::new(), files: vec![(path.clone(), body.into_bytes())], code: EXIT_OK }
                }
                None => Output::text(body),
            })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

/// Runs the CLI. Nothing reaches `stdout` or any output file unless the
/// whole command succeeds.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(output) => {
            for (path, bytes) in &output.files {
                if let Err(e) = std::fs::write(path, bytes) {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    return EXIT_INVALID;
                }
            }
            if stdout.write_all(output.stdout.as_bytes()).is_err() {
                return EXIT_INTERNAL;
            }
            output.code
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::NoContradiction(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            EXIT_NO_CONTRADICTION
        }
    }
}

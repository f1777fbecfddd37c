//! Command dispatch and JSON reports for the `zeldist` binary.
//!
//! Every command produces a single JSON document. Exit codes: 0 on success
//! (the verdict is in the report), 2 on input errors, 3 when an internal
//! cross-check fails.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use zeldist::cosets::{build_w, check_modulus_identity, enumerate_s, CosetError};
use zeldist::distinction::{
    brute_force_classify, classify_mode, DistinctionError, Mode, PairingWitness,
    DEFAULT_ORACLE_BOUND,
};
use zeldist::dsl::{self, DslError};
use zeldist::fuzz::{run_fuzz, FuzzConfig};
use zeldist::galois::{
    bc_exists, condition_a, decompose, decompose_condition_a_witness, eta, is_conjugate_orthogonal,
    main_theorem_check, to_wd, GaloisError,
};
use zeldist::generic::is_generic;
use zeldist::jacquet::jacquet;
use zeldist::{LineTable, Multisegment, Program, WdConstituent};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "zeldist", version, about = "Distinction calculus for generic multisegments")]
pub struct Cli {
    /// Input file in the multisegment language; standard input if omitted.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Gl,
    H,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Gl => Mode::Gl,
            ModeArg::H => Mode::H,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide GL_n(F)- or GL_m(D)-distinction.
    Classify {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        pi: String,
    },
    /// Decide genericity and report a linked pair if there is one.
    Generic {
        #[arg(long)]
        pi: String,
    },
    /// Jacquet module of a single segment along a composition.
    Jacquet {
        #[arg(long)]
        pi: String,
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<u32>,
    },
    /// Enumerate the double cosets for a composition of an even integer.
    Cosets {
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<u32>,
    },
    /// Whether the parameter is an unstable base change.
    Bc {
        #[arg(long)]
        pi: String,
    },
    /// The character eta of the component group.
    Eta {
        #[arg(long)]
        pi: String,
    },
    /// Evaluate (A), (B) and the implication between them.
    CheckMain {
        #[arg(long)]
        pi: String,
    },
    /// Seeded randomized cross-checks.
    Fuzz {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_r: usize,
        #[arg(long, default_value_t = 4)]
        max_l: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Generic { .. } => "generic",
            Command::Jacquet { .. } => "jacquet",
            Command::Cosets { .. } => "cosets",
            Command::Bc { .. } => "bc",
            Command::Eta { .. } => "eta",
            Command::CheckMain { .. } => "check-main",
            Command::Fuzz { .. } => "fuzz",
        }
    }

    fn binding(&self) -> Option<&str> {
        match self {
            Command::Classify { pi, .. }
            | Command::Generic { pi }
            | Command::Jacquet { pi, .. }
            | Command::Bc { pi }
            | Command::Eta { pi }
            | Command::CheckMain { pi } => Some(pi),
            Command::Cosets { .. } | Command::Fuzz { .. } => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Distinction(#[from] DistinctionError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("{0}")]
    Input(String),
    /// A cross-check failed; the report is still emitted.
    #[error("internal check failed: {message}")]
    Invariant { message: String, report: Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant { .. } => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        }
    }

    fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::Dsl(_) => "parse",
            CliError::Distinction(_) | CliError::Galois(_) | CliError::Input(_) => "input",
            CliError::Invariant { .. } => "invariant",
        };
        let mut obj = json!({ "error": kind, "message": self.to_string() });
        match self {
            CliError::Dsl(e) => {
                if let Some(pos) = e.pos() {
                    obj["position"] = json!({ "line": pos.line, "column": pos.col });
                }
            }
            CliError::Distinction(DistinctionError::NotGeneric(w)) => {
                obj["witness"] = json!(w);
            }
            _ => {}
        }
        obj
    }
}

fn coset_error(e: CosetError) -> CliError {
    match e {
        CosetError::CaseCoverageFailure { .. } | CosetError::NotBijective { .. } => CliError::Invariant {
            message: e.to_string(),
            report: Value::Null,
        },
        other => CliError::Input(other.to_string()),
    }
}

/// Result of one invocation: the exit code and the bytes for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Runs a parsed command line. `stdin` is consulted only when `--input` is
/// absent and the command reads a multisegment.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let result = execute(cli, stdin);
    let (code, report, error) = match result {
        Ok(report) => (EXIT_OK, Some(report), None),
        Err(CliError::Invariant { message, report }) => {
            let err = json!({ "error": "invariant", "message": message });
            let report = (!report.is_null()).then_some(report);
            (EXIT_INVARIANT, report, Some(err))
        }
        Err(e) => (e.exit_code(), None, Some(e.to_json())),
    };

    let mut out = Outcome {
        code,
        stdout: Vec::new(),
        stderr: Vec::new(),
    };
    if let Some(report) = report {
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        match &cli.output {
            Some(path) => {
                if let Err(source) = fs::write(path, text.as_bytes()) {
                    let e = CliError::Write {
                        path: path.display().to_string(),
                        source,
                    };
                    out.code = e.exit_code();
                    writeln!(out.stderr, "{}", e.to_json()).ok();
                    return out;
                }
            }
            None => out.stdout = text.into_bytes(),
        }
    }
    if let Some(err) = error {
        writeln!(out.stderr, "{err}").ok();
    }
    out
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Value, CliError> {
    let program = match cli.command.binding() {
        Some(_) => Some(read_program(cli, stdin)?),
        None => None,
    };
    let pi = match (cli.command.binding(), &program) {
        (Some(name), Some(prog)) => Some(prog.get(name)?),
        _ => None,
    };

    let mut header = Map::new();
    header.insert("command".into(), json!(cli.command.name()));
    header.insert("version".into(), json!(VERSION));
    if let Some(name) = cli.command.binding() {
        header.insert("pi".into(), json!(name));
        let pi = pi.expect("binding resolved");
        header.insert("segments".into(), segments_json(pi));
    }

    let body = match &cli.command {
        Command::Classify { mode, .. } => classify(pi.unwrap(), (*mode).into()),
        Command::Generic { .. } => generic(pi.unwrap()),
        Command::Jacquet { partition, .. } => jacquet_cmd(pi.unwrap(), partition),
        Command::Cosets { partition } => cosets(partition),
        Command::Bc { .. } => bc(pi.unwrap()),
        Command::Eta { .. } => eta_cmd(pi.unwrap()),
        Command::CheckMain { .. } => check_main(pi.unwrap()),
        Command::Fuzz {
            trials,
            seed,
            max_r,
            max_l,
        } => {
            header.insert("seed".into(), json!(seed));
            fuzz(FuzzConfig {
                trials: *trials,
                seed: *seed,
                max_r: *max_r,
                max_l: *max_l,
            })
        }
    };
    let merge = |body: Value| {
        let mut obj = header.clone();
        if let Value::Object(fields) = body {
            obj.extend(fields);
        }
        Value::Object(obj)
    };
    match body {
        Ok(body) => Ok(merge(body)),
        Err(CliError::Invariant { message, report }) => Err(CliError::Invariant {
            message,
            report: merge(report),
        }),
        Err(e) => Err(e),
    }
}

fn read_program(cli: &Cli, stdin: &mut dyn Read) -> Result<Program, CliError> {
    let mut bytes = Vec::new();
    match &cli.input {
        Some(path) => {
            bytes = fs::read(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
        }
        None => {
            stdin.read_to_end(&mut bytes).map_err(|source| CliError::Read {
                path: "<stdin>".into(),
                source,
            })?;
        }
    }
    Ok(dsl::parse_bytes(&bytes)?.resolve()?)
}

fn segments_json(pi: &Multisegment) -> Value {
    let table = pi.table();
    Value::Array(pi.segments().iter().map(|s| json!(s.display(table))).collect())
}

fn seg_text(pi: &Multisegment, i: usize) -> String {
    pi.segments()[i].display(pi.table()).to_string()
}

fn witness_json(pi: &Multisegment, w: &PairingWitness) -> Value {
    let pairs: Vec<Value> = w
        .pairs
        .iter()
        .map(|&(a, b)| json!({ "indices": [a, b], "segments": [seg_text(pi, a), seg_text(pi, b)] }))
        .collect();
    let singletons: Vec<Value> = w
        .singletons
        .iter()
        .map(|s| json!({ "index": s.index, "segment": seg_text(pi, s.index), "certificate": s.certificate }))
        .collect();
    json!({ "pairs": pairs, "singletons": singletons })
}

fn classify(pi: &Multisegment, mode: Mode) -> Result<Value, CliError> {
    let c = classify_mode(pi, mode)?;
    if let Some(w) = &c.witness {
        if !w.validate(pi, mode) {
            return Err(CliError::Invariant {
                message: "pairing witness does not validate".into(),
                report: json!({ "mode": mode, "verdict": c.verdict }),
            });
        }
    }
    let oracle = brute_force_classify(pi, |s, t| mode.singleton_holds(s, t), DEFAULT_ORACLE_BOUND).ok();
    let report = json!({
        "mode": mode,
        "verdict": c.verdict,
        "witness": c.witness.as_ref().map(|w| witness_json(pi, w)),
        "generic": true,
        "diagnostics": {
            "total_degree": pi.total_degree(),
            "oracle": oracle,
        },
    });
    match oracle {
        Some(v) if v != c.verdict => Err(CliError::Invariant {
            message: format!("classifier says {} but exhaustive search says {v}", c.verdict),
            report,
        }),
        _ => Ok(report),
    }
}

fn generic(pi: &Multisegment) -> Result<Value, CliError> {
    let v = is_generic(pi);
    let linked = v
        .witness
        .map(|w| json!({ "i": w.i, "j": w.j, "d": w.d, "segments": [seg_text(pi, w.i), seg_text(pi, w.j)] }));
    Ok(json!({ "generic": v.generic, "witness": linked }))
}

fn jacquet_cmd(pi: &Multisegment, partition: &[u32]) -> Result<Value, CliError> {
    let [seg] = pi.segments() else {
        return Err(CliError::Input(format!(
            "jacquet expects a single segment, got {}",
            pi.len()
        )));
    };
    let module = jacquet(seg, pi.table(), partition).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(json!({ "partition": partition, "module": module.report(pi.table()) }))
}

fn cosets(partition: &[u32]) -> Result<Value, CliError> {
    let all = enumerate_s(partition).map_err(coset_error)?;
    let mut entries = Vec::with_capacity(all.len());
    let mut failures = Vec::new();
    for (k, s) in all.iter().enumerate() {
        let datum = build_w(s).map_err(coset_error)?;
        let modulus = check_modulus_identity(s);
        if !modulus.ok {
            failures.push(k);
        }
        entries.push(json!({
            "S": s.rows(),
            "t": datum.t,
            "d": datum.d,
            "w": datum.w,
            "cases": datum.cases,
            "levi_shape": datum.levi_shape,
            "modulus_ok": modulus.ok,
        }));
    }
    let report = json!({ "partition": partition, "count": entries.len(), "cosets": entries });
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Invariant {
            message: format!("modulus identity fails for cosets {failures:?}"),
            report,
        })
    }
}

fn constituents_json(table: &LineTable, items: &[(WdConstituent, u32)]) -> Value {
    Value::Array(
        items
            .iter()
            .map(|(c, m)| {
                json!({
                    "constituent": c.describe(table),
                    "dimension": c.dimension(table),
                    "multiplicity": m,
                })
            })
            .collect(),
    )
}

fn bc(pi: &Multisegment) -> Result<Value, CliError> {
    let m = to_wd(pi);
    let parameter: Vec<(WdConstituent, u32)> = m.constituents().iter().map(|(c, k)| (c.clone(), *k)).collect();
    let bc = bc_exists(&m)?;
    Ok(json!({
        "verdict": bc,
        "diagnostics": {
            "dimension": m.dimension(),
            "parameter": constituents_json(m.table(), &parameter),
            "conjugate_self_dual": m.is_conjugate_self_dual(),
            "conjugate_orthogonal": is_conjugate_orthogonal(&m),
        },
    }))
}

fn eta_cmd(pi: &Multisegment) -> Result<Value, CliError> {
    let m = to_wd(pi);
    let dec = decompose(&m)?;
    let report = eta(&m)?;
    let table = m.table();
    let orbits: Vec<Value> = dec
        .i_zero
        .iter()
        .map(|(a, b)| constituents_json(table, &[a.clone(), b.clone()]))
        .collect();
    Ok(json!({
        "verdict": report.trivial,
        "eta": report,
        "diagnostics": {
            "i_plus": constituents_json(table, &dec.i_plus),
            "i_minus": constituents_json(table, &dec.i_minus),
            "i_zero": orbits,
        },
    }))
}

fn check_main(pi: &Multisegment) -> Result<Value, CliError> {
    let check = main_theorem_check(pi)?;
    let grouping = if condition_a(pi)? {
        Some(decompose_condition_a_witness(pi)?)
    } else {
        None
    };
    let report = json!({
        "verdict": check,
        "diagnostics": { "grouping": grouping },
    });
    if check.consistent {
        Ok(report)
    } else {
        Err(CliError::Invariant {
            message: "condition (A) holds but pi is not distinguished".into(),
            report,
        })
    }
}

fn fuzz(config: FuzzConfig) -> Result<Value, CliError> {
    let report = run_fuzz(config);
    let ok = report.ok();
    let value = json!({ "ok": ok, "report": report });
    if ok {
        Ok(value)
    } else {
        Err(CliError::Invariant {
            message: format!("{} cross-check violations", report.violations.len()),
            report: value,
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string().into_bytes();
            let (stdout, stderr) = if e.use_stderr() {
                (Vec::new(), text)
            } else {
                (text, Vec::new())
            };
            Outcome { code, stdout, stderr }
        }
    }
}

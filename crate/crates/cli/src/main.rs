//! `sl2m`: membership in `<L_u, R_v>` from the command line.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sl2_membership::cf::{self, format_rational, parse_rational, CfError};
use sl2_membership::corpus::{self, CorpusError};
use sl2_membership::transforms::{self, TransformError};
use sl2_membership::{
    decide, decide_traced, verify_corpus, BigInt, CfWord, EnumConfig, GroupWord, Mat2, MatGroupError, OracleError,
    Params, Status,
};

const EXIT_OK: u8 = 0;
const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_NOT_MEMBER: u8 = 2;
const EXIT_NOT_IN_AMBIENT: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_UNSUPPORTED: u8 = 66;
const EXIT_INTERNAL: u8 = 70;
const EXIT_IO: u8 = 74;

const EXIT_CODES: &str = "\
Exit codes:
   0  success (with --strict: Member)
   1  oracle-check found a counterexample, or corpus verify found a mismatch
   2  --strict: NotMember
   3  --strict: NotInAmbient
  64  malformed flags or arguments
  65  invalid data: determinant not 1, transform domain error, malformed corpus
  66  unsupported parameters (u or v below 2; u = v = 2 where no word recovery exists)
  70  internal inconsistency
  74  file I/O error";

#[derive(Parser)]
#[command(name = "sl2m", version, about = "Membership and word recovery in <L_u, R_v> inside SL(2,Z)")]
#[command(after_help = EXIT_CODES, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a matrix lies in G_{u,v} and recover its word.
    Decide(DecideArgs),
    /// Apply C, E, f, f_{u,v} or g_{u,v} to a rational or a continued fraction.
    Transform(TransformArgs),
    /// Cross-validate decide against bounded brute-force enumeration.
    OracleCheck(OracleArgs),
    /// Generate or verify JSON Lines corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    u: BigInt,
    #[arg(long)]
    v: BigInt,
    /// Row-major entries "a b c d".
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
    /// Include C(b/d), the transformed word, per-index divisibility and the derivation.
    #[arg(long)]
    trace: bool,
    /// Encode the status in the exit code.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    C,
    E,
    F,
    Fuv,
    Guv,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long = "fn", value_enum)]
    function: Function,
    #[arg(long)]
    u: Option<BigInt>,
    #[arg(long)]
    v: Option<BigInt>,
    /// Print each rewrite step.
    #[arg(long)]
    trace: bool,
    /// A rational "p/q" for c, otherwise a word "[[q0,q1,...]]".
    #[arg(allow_hyphen_values = true)]
    input: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    u: BigInt,
    #[arg(long)]
    v: BigInt,
    #[arg(long)]
    max_entry: BigInt,
    #[arg(long)]
    max_exp: u32,
    #[arg(long)]
    max_word_len: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "SL2_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Random ambient matrices checked besides the enumeration.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20_000_000)]
    node_budget: usize,
}

#[derive(Subcommand)]
enum CorpusCommand {
    Gen(GenArgs),
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    u: BigInt,
    #[arg(long)]
    v: BigInt,
    #[arg(long, default_value_t = 100)]
    members: usize,
    #[arg(long, default_value_t = 100)]
    ambient: usize,
    /// Output file, or "-" for stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self { code, message: message.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let outcome = match cli.command {
        Command::Decide(args) => cmd_decide(args),
        Command::Transform(args) => cmd_transform(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::Corpus(CorpusCommand::Gen(args)) => cmd_corpus_gen(args),
        Command::Corpus(CorpusCommand::Verify(args)) => cmd_corpus_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("sl2m: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(value: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "{value}").map_err(|e| Failure::new(EXIT_IO, e))
}

fn params(u: BigInt, v: BigInt) -> Result<Params, Failure> {
    Params::new(u, v).map_err(|e| Failure::new(EXIT_UNSUPPORTED, e))
}

fn number(x: &BigInt) -> Value {
    Value::Number(x.to_string().parse().expect("integers are JSON numbers"))
}

fn word_json(w: &GroupWord) -> Value {
    Value::Array(w.alphas().iter().map(number).collect())
}

fn cmd_decide(args: DecideArgs) -> Outcome {
    let params = params(args.u, args.v)?;
    let m: Mat2 = args.matrix.parse().map_err(|e| match e {
        MatGroupError::NotUnimodular { .. } => Failure::new(EXIT_DATA, e),
        other => Failure::new(EXIT_USAGE, other),
    })?;
    let decision = if args.trace { decide_traced(&m, &params) } else { decide(&m, &params) }
        .map_err(|e| Failure::new(EXIT_INTERNAL, e))?;
    let mut out = json!({
        "status": decision.status.as_str(),
        "word": decision.word.as_ref().map(word_json),
        "sanov": decision.sanov,
    });
    if args.trace {
        out["trace"] = match &decision.trace {
            Some(t) => json!({
                "steps": t.steps.iter().map(|(step, w)| json!({"step": step, "word": w.to_string()})).collect::<Vec<_>>(),
                "divisibility": t.divisibility,
                "derivation": t.derivation,
            }),
            None => json!({"steps": [], "divisibility": [], "derivation": []}),
        };
    }
    emit(&out)?;
    Ok(match (args.strict, decision.status) {
        (false, _) | (true, Status::Member) => EXIT_OK,
        (true, Status::NotMember) => EXIT_NOT_MEMBER,
        (true, Status::NotInAmbient) => EXIT_NOT_IN_AMBIENT,
    })
}

fn cf_failure(e: CfError) -> Failure {
    match e {
        CfError::ParseWord(_) | CfError::ParseRational(_) => Failure::new(EXIT_USAGE, e),
        other => Failure::new(EXIT_DATA, other),
    }
}

fn transform_failure(e: TransformError) -> Failure {
    match e {
        TransformError::UnsupportedParams { .. } | TransformError::SanovParams => Failure::new(EXIT_UNSUPPORTED, e),
        other => Failure::new(EXIT_DATA, other),
    }
}

fn cmd_transform(args: TransformArgs) -> Outcome {
    let word = || args.input.trim().parse::<CfWord>().map_err(cf_failure);
    let needs_params = || match (&args.u, &args.v) {
        (Some(u), Some(v)) => params(u.clone(), v.clone()),
        _ => Err(Failure::new(EXIT_USAGE, "--u and --v are required for fuv and guv")),
    };
    let (result, lines) = match args.function {
        Function::C => {
            let x = parse_rational::<BigInt>(args.input.trim()).map_err(cf_failure)?;
            let w = cf::short_cf(&x);
            let line = format!("C({}) = {w}", format_rational(&x));
            (w.to_string(), vec![line])
        }
        Function::E => {
            let w = word()?;
            let x = format_rational(&cf::evaluate(&w).map_err(cf_failure)?);
            let line = format!("E({w}) = {x}");
            (x, vec![line])
        }
        Function::F => {
            let (w, d) = transforms::f_legacy_traced(&word()?).map_err(transform_failure)?;
            (w.to_string(), d.lines)
        }
        Function::Fuv => {
            let p = needs_params()?;
            let (w, d) = transforms::f_uv_traced(&p, &word()?).map_err(transform_failure)?;
            (w.to_string(), d.lines)
        }
        Function::Guv => {
            let p = needs_params()?;
            let (w, d) = transforms::g_uv_traced(&p, &word()?).map_err(transform_failure)?;
            (w.to_string(), d.lines)
        }
    };
    if args.trace {
        emit(&json!({"result": result, "trace": lines}))?;
    } else {
        emit(&Value::String(result))?;
    }
    Ok(EXIT_OK)
}

fn install_pool(jobs: usize) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::new(EXIT_INTERNAL, e))
}

fn cmd_oracle_check(args: OracleArgs) -> Outcome {
    let params = params(args.u, args.v)?;
    if params.is_sanov() {
        return Err(Failure::new(EXIT_UNSUPPORTED, TransformError::SanovParams));
    }
    install_pool(args.jobs)?;
    let mut cfg = EnumConfig::new(params, args.max_entry, args.max_exp, args.max_word_len);
    cfg.ambient_samples = args.samples;
    cfg.seed = args.seed;
    cfg.node_budget = args.node_budget;
    let report = sl2_membership::cross_validate(&cfg).map_err(|e| match e {
        OracleError::InvalidBounds => Failure::new(EXIT_USAGE, e),
        OracleError::SanovParams => Failure::new(EXIT_UNSUPPORTED, e),
        other => Failure::new(EXIT_INTERNAL, other),
    })?;
    emit(&report.to_json())?;
    Ok(if report.success() { EXIT_OK } else { EXIT_FAILED_CHECK })
}

fn corpus_failure(e: CorpusError) -> Failure {
    match e {
        CorpusError::Io { .. } => Failure::new(EXIT_IO, e),
        CorpusError::Json { .. } | CorpusError::Invalid { .. } => Failure::new(EXIT_DATA, e),
        CorpusError::Params(_) => Failure::new(EXIT_UNSUPPORTED, e),
        other => Failure::new(EXIT_INTERNAL, other),
    }
}

fn cmd_corpus_gen(args: GenArgs) -> Outcome {
    let entries =
        corpus::generate_corpus(args.seed, &args.u, &args.v, args.members, args.ambient).map_err(corpus_failure)?;
    if args.out.as_os_str() == "-" {
        corpus::write_corpus_to(io::stdout().lock(), &entries).map_err(|e| Failure::new(EXIT_IO, e))?;
    } else {
        corpus::write_corpus(&args.out, &entries).map_err(corpus_failure)?;
        eprintln!("sl2m: wrote {} entries to {}", entries.len(), args.out.display());
    }
    Ok(EXIT_OK)
}

fn cmd_corpus_verify(args: VerifyArgs) -> Outcome {
    let entries: Vec<sl2_membership::CorpusEntry> = corpus::read_corpus(&args.input).map_err(corpus_failure)?;
    let report = verify_corpus(&entries);
    emit(&report.to_json())?;
    Ok(if report.success() { EXIT_OK } else { EXIT_FAILED_CHECK })
}

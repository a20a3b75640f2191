//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, unknown model,
//! malformed divisor, invalid config), 2 when a computation fails or a corpus
//! case does not match.

pub mod corpus;
pub mod query;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{Condition, Side};
use crate::models::{builtin_catalog, parse_config, parse_model_ref, ModelError, PolarizedModel};

use query::{json_record, render_text, run_query, Op, QueryArgs, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionArg {
    Lc,
    Klt,
    Canonical,
    Terminal,
}

impl From<ConditionArg> for Condition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Lc => Condition::LogCanonical,
            ConditionArg::Klt => Condition::Klt,
            ConditionArg::Canonical => Condition::Canonical,
            ConditionArg::Terminal => Condition::Terminal,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "conesing",
    version,
    about = "Pullbacks of Weil divisors and singularity invariants of cones over polarized varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Built-in model, e.g. `p1xp1:1,2`.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    model: Option<String>,
    /// Model declaration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct DivisorArg {
    /// Comma-separated rationals, or one of K, L, K-L, L-K, -K, -L.
    #[arg(long, allow_hyphen_values = true)]
    divisor: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pullback f^*(C_D) along the vertex blow-up.
    Pullback {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
    },
    /// Natural pullback of m C_D.
    NaturalPullback {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// K_Y and the relative canonical divisors at E.
    Canonical {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Restriction of f^*(C_D) to E.
    Restriction {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
    },
    /// Q-Cartier and numerically Cartier tests for C_D.
    Cartier {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
    },
    /// Checks f^*(-C_D) = -f^*(C_D).
    Antisymmetry {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
    },
    /// Triviality of the multiplier ideal J^+(X).
    MultiplierIdeal {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Boundary certificates for lc, klt, canonical, terminal.
    Certificate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        condition: Option<ConditionArg>,
    },
    /// Full singularity report.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated m values, default 1..=12.
        #[arg(long, value_delimiter = ',')]
        m_samples: Option<Vec<u64>>,
    },
    /// t(D) and kappa_m(D) for m = 1..=max-m.
    KappaSequence {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        divisor: DivisorArg,
        #[arg(long, default_value_t = 12)]
        max_m: u64,
    },
    /// Worked-example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusCommand,
    },
    /// Built-in models and config files.
    Model {
        #[command(subcommand)]
        action: ModelCommand,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    /// Runs every case and prints PASS/FAIL rows.
    Run {
        /// Only cases whose id or model contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Corpus file to use instead of the embedded one.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ModelCommand {
    List,
    Show { reference: String },
    Validate { file: PathBuf },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match cli.command {
        Command::Corpus { action } => corpus_command(action, out, err),
        Command::Model { action } => model_command(action, out, err),
        other => compute_command(other, out, err),
    }
}

fn load_model(args: &ModelArgs) -> Result<(PolarizedModel, String), String> {
    match (&args.model, &args.config) {
        (Some(r), _) => parse_model_ref(r)
            .map(|m| (m, r.clone()))
            .map_err(|e| format!("{}: {e}", e.kind())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let m = parse_config(&text).map_err(|e| format!("{}: {}: {e}", path.display(), e.kind()))?;
            let label = format!("config:{}", m.name);
            Ok((m, label))
        }
        (None, None) => Err("one of --model or --config is required".into()),
    }
}

fn compute_command(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut q = QueryArgs::default();
    let (op, model_args) = match command {
        Command::Pullback { model, divisor } => {
            q.divisor = Some(divisor.divisor);
            (Op::Pullback, model)
        }
        Command::NaturalPullback { model, divisor, m } => {
            q.divisor = Some(divisor.divisor);
            q.m = Some(m);
            (Op::NaturalPullback, model)
        }
        Command::Canonical { model, side, m } => {
            q.side = side.map(|s| match s {
                SideArg::Minus => Side::Minus,
                SideArg::Plus => Side::Plus,
            });
            q.m = m;
            (Op::Canonical, model)
        }
        Command::Restriction { model, divisor } => {
            q.divisor = Some(divisor.divisor);
            (Op::Restriction, model)
        }
        Command::Cartier { model, divisor } => {
            q.divisor = Some(divisor.divisor);
            (Op::Cartier, model)
        }
        Command::Antisymmetry { model, divisor } => {
            q.divisor = Some(divisor.divisor);
            (Op::Antisymmetry, model)
        }
        Command::MultiplierIdeal { model } => (Op::MultiplierIdeal, model),
        Command::Certificate { model, condition } => {
            q.condition = condition.map(Condition::from);
            (Op::Certificate, model)
        }
        Command::Classify { model, m_samples } => {
            q.m_samples = m_samples;
            (Op::Classify, model)
        }
        Command::KappaSequence {
            model,
            divisor,
            max_m,
        } => {
            q.divisor = Some(divisor.divisor);
            q.max_m = Some(max_m);
            (Op::KappaSequence, model)
        }
        Command::Corpus { .. } | Command::Model { .. } => unreachable!("dispatched in run"),
    };

    let (model, label) = match load_model(&model_args) {
        Ok(m) => m,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = run_query(&model, op, &q);
    let code = match &result {
        Ok(_) => EXIT_OK,
        Err(e) if e.is_usage() => EXIT_USAGE,
        Err(_) => EXIT_FAILURE,
    };

    match model_args.format {
        Format::Json => {
            let _ = writeln!(out, "{}", json_record("query", op.as_str(), &label, &result));
        }
        Format::Text => match &result {
            Ok(res) => {
                let mut text = format!("model: {label}\nquery: {}\n", op.as_str());
                if !res.inputs.is_empty() {
                    text.push_str("inputs:\n");
                    render_text(&model, &Value::Map(res.inputs.clone()), 2, &mut text);
                }
                text.push_str("outputs:\n");
                render_text(&model, &res.outputs, 2, &mut text);
                if !res.flags.is_empty() {
                    text.push_str("flags:\n");
                    for f in &res.flags {
                        text.push_str(&format!("  - {f}\n"));
                    }
                }
                let _ = write!(out, "{text}");
            }
            Err(e) => {
                let _ = writeln!(err, "error [{}]: {e}", e.kind());
            }
        },
    }
    code
}

fn corpus_command(action: CorpusCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let CorpusCommand::Run {
        filter,
        format,
        file,
    } = action;
    let text = match &file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: cannot read corpus {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => corpus::EMBEDDED_CORPUS.to_string(),
    };
    let cases = match corpus::parse_corpus(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let results: Vec<corpus::CaseResult> = corpus::select(&cases, filter.as_deref())
        .into_iter()
        .map(corpus::run_case)
        .collect();
    let rendered = match format {
        Format::Text => corpus::format_text(&results),
        Format::Json => corpus::format_json(&results),
    };
    let _ = write!(out, "{rendered}");
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn validate_file(path: &Path) -> Result<PolarizedModel, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    parse_config(&text).map_err(|e| match e {
        ModelError::Config(c) => format!("{}:{}: {}", path.display(), c.line, c.message),
        other => format!("{}: {other}", path.display()),
    })
}

fn model_command(action: ModelCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match action {
        ModelCommand::List => {
            for info in builtin_catalog() {
                let _ = writeln!(out, "{:<20} {:<16} {}", info.name, info.params, info.summary);
            }
            EXIT_OK
        }
        ModelCommand::Show { reference } => match parse_model_ref(&reference) {
            Ok(m) => {
                let _ = writeln!(out, "{m}");
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "error [{}]: {e}", e.kind());
                EXIT_USAGE
            }
        },
        ModelCommand::Validate { file } => match validate_file(&file) {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "OK {}: rank {}, {} equivalence, {} effectivity",
                    m.name,
                    m.rank(),
                    m.equivalence.as_str(),
                    m.rule.name()
                );
                EXIT_OK
            }
            Err(msg) => {
                let _ = writeln!(err, "{msg}");
                EXIT_USAGE
            }
        },
    }
}

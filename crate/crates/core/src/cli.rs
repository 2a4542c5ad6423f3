//! `pdacache` command-line surface.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{self, SchemeRecord};
use crate::constructions::{construct, mn_pda, ConstructionParams, ParamError, Rule};
use crate::pda::{Pda, PdaError};
use crate::scheme::{run_and_verify, Library, Mode, Request, SimError};
use crate::{format_ratio, Rational};

#[derive(Debug, Parser)]
#[command(name = "pdacache", version, about = "Coded caching schemes from placement delivery arrays")]
pub struct Cli {
    /// Output format for structured results.
    #[arg(long, value_enum, default_value_t = Format::Kv, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One `key=value` per line.
    Kv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rule1,
    Rule2,
    Mn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Original,
    New1,
    New2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Uncoded,
    Coded,
}

#[derive(Debug, clap::Args)]
pub struct SubsetArgs {
    #[arg(long = "H")]
    pub h: u32,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub lambda: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a PDA and print it in text form.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long = "H", required_unless_present = "k")]
        h: Option<u32>,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the PDA conditions and report (K, F, Z, S).
    Validate {
        /// Input file; stdin when omitted or `-`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Report useful and useless stars.
    Classify {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Blank out useless stars.
    Reduce {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form scheme parameters.
    Params {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[command(flatten)]
        subset: SubsetArgs,
    },
    /// Place, deliver, decode and verify every user.
    Simulate {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Number of files; ignored with --library.
        #[arg(long = "N", default_value_t = 0)]
        n: usize,
        #[arg(long = "file-len", default_value_t = 1024)]
        file_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated file index per user; default 0,1,…,K-1.
        #[arg(long)]
        request: Option<String>,
        /// Directory of equal-length files to use instead of random ones.
        #[arg(long)]
        library: Option<PathBuf>,
    },
    /// Rate/memory records over every admissible (b, lambda).
    Sweep {
        #[arg(long = "H")]
        h: u32,
        #[arg(long)]
        r: u32,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Pda(#[from] PdaError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Pda(PdaError::Parse { .. }) => "parse",
            CliError::Pda(_) => "pda",
            CliError::Param(_) => "params",
            CliError::Sim(_) => "simulation",
            CliError::Csv(_) => "csv",
            CliError::Usage(_) => "usage",
        }
    }

    /// Machine-readable error document in the requested format.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Kv => format!("error={}\nmessage={}\n", self.kind(), self),
            Format::Json => {
                json!({"error": self.kind(), "message": self.to_string()}).to_string() + "\n"
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_input(input: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<String, CliError> {
    match input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(io_err(p)),
        _ => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(io_err(Path::new("<stdin>")))?;
            Ok(s)
        }
    }
}

fn write_file(path: &Path, data: &str) -> Result<(), CliError> {
    fs::write(path, data).map_err(io_err(path))
}

fn need(value: Option<u32>, flag: &str) -> Result<u32, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this family")))
}

/// Key/value document rendered either as `key=value` lines or JSON.
fn render(fields: &[(&str, Value)], format: Format) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            Value::Object(map).to_string() + "\n"
        }
        Format::Kv => fields
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    Value::String(s) => s.clone(),
                    Value::Array(items) => items
                        .iter()
                        .map(|i| match i {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect::<Vec<_>>()
                        .join(","),
                    other => other.to_string(),
                };
                format!("{k}={text}\n")
            })
            .collect(),
    }
}

fn ratio(r: &Rational) -> Value {
    Value::String(format_ratio(r))
}

fn record_fields(rec: &SchemeRecord) -> Vec<(&'static str, Value)> {
    vec![
        ("scheme", json!(rec.scheme.name())),
        ("H", json!(rec.h)),
        ("r", json!(rec.r)),
        ("b", json!(rec.b)),
        ("lambda", json!(rec.lambda)),
        ("K", json!(rec.k.to_string())),
        ("F", json!(rec.subpacketization.to_string())),
        ("memory_ratio", ratio(&rec.memory_ratio)),
        ("rate", ratio(&rec.rate)),
    ]
}

fn positions(list: &[(usize, usize)]) -> Value {
    Value::Array(
        list.iter()
            .map(|(j, k)| Value::String(format!("({j};{k})")))
            .collect(),
    )
}

/// Parses `argv` and runs the command, writing results to `stdout`.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), (CliError, Format)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return Ok(());
            }
            return Err((CliError::Usage(e.to_string()), Format::Kv));
        }
    };
    let format = cli.format;
    execute(cli, stdin, stdout).map_err(|e| (e, format))
}

fn execute(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = cli.format;
    let text = match cli.command {
        Command::Construct {
            family,
            h,
            r,
            b,
            lambda,
            k,
            t,
            out,
        } => {
            let pda = match family {
                Family::Mn => mn_pda(need(k, "K")?, need(t, "t")?)?,
                Family::Rule1 | Family::Rule2 => {
                    let rule = if family == Family::Rule1 { Rule::I } else { Rule::II };
                    let params = ConstructionParams::new(
                        need(h, "H")?,
                        need(r, "r")?,
                        need(b, "b")?,
                        need(lambda, "lambda")?,
                        rule,
                    )?;
                    construct(&params)?
                }
            };
            match out {
                Some(path) => {
                    write_file(&path, &pda.serialize())?;
                    render(
                        &[
                            ("rows", json!(pda.rows())),
                            ("cols", json!(pda.cols())),
                            ("out", json!(path.display().to_string())),
                        ],
                        format,
                    )
                }
                None => pda.serialize(),
            }
        }
        Command::Validate { input } => {
            let pda = Pda::parse(&read_input(&input, stdin)?)?;
            let p = pda.validate()?;
            render(
                &[
                    ("K", json!(p.k)),
                    ("F", json!(p.f)),
                    ("Z", json!(p.z)),
                    ("S", json!(p.s)),
                    ("gain_profile", json!(p.gain_profile)),
                ],
                format,
            )
        }
        Command::Classify { input } => {
            let pda = Pda::parse(&read_input(&input, stdin)?)?;
            pda.validate()?;
            let c = pda.classify_stars();
            render(
                &[
                    ("useful", json!(c.useful.len())),
                    ("useless", json!(c.useless.len())),
                    ("uniform", json!(c.uniform_useless().is_some())),
                    ("per_column_useless", json!(c.per_column_useless)),
                    ("useless_positions", positions(&c.useless)),
                ],
                format,
            )
        }
        Command::Reduce { input, out } => {
            let pda = Pda::parse(&read_input(&input, stdin)?)?;
            pda.validate()?;
            let (reduced, z_prime) = pda.reduce()?;
            let body = format!("# z_prime={z_prime}\n{}", reduced.serialize());
            match out {
                Some(path) => {
                    write_file(&path, &body)?;
                    render(
                        &[
                            ("z_prime", json!(z_prime)),
                            ("out", json!(path.display().to_string())),
                        ],
                        format,
                    )
                }
                None => body,
            }
        }
        Command::Params { scheme, subset } => {
            let SubsetArgs { h, r, b, lambda } = subset;
            let rec = match scheme {
                SchemeArg::Original => analysis::original_params(h, r, b, lambda)?,
                SchemeArg::New1 => analysis::new_params_i(h, r, b, lambda)?,
                SchemeArg::New2 => analysis::new_params_ii(h, r, b, lambda)?,
            };
            render(&record_fields(&rec), format)
        }
        Command::Simulate {
            input,
            mode,
            n,
            file_len,
            seed,
            request,
            library,
        } => {
            let pda = Pda::parse(&read_input(&input, stdin)?)?;
            let library = match library {
                Some(dir) => Library::from_dir(&dir)?,
                None => {
                    let files = if n == 0 { pda.cols() } else { n };
                    Library::random(files, file_len, seed)?
                }
            };
            let d = match request {
                Some(s) => {
                    let demands = s
                        .split(',')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| CliError::Usage(format!("bad --request {s:?}: {e}")))?;
                    Request::new(demands, library.n_files())?
                }
                None => Request::identity(pda.cols(), library.n_files())?,
            };
            let mode = match mode {
                ModeArg::Uncoded => Mode::Uncoded,
                ModeArg::Coded => Mode::Coded,
            };
            let report = run_and_verify(&pda, &library, &d, mode)?;
            match format {
                Format::Json => serde_json::to_string(&report).expect("report serializes") + "\n",
                Format::Kv => render(
                    &[
                        ("ok", json!(report.ok)),
                        ("mode", json!(report.mode.to_string())),
                        ("users", json!(report.users)),
                        ("files", json!(report.files)),
                        ("subpacketization", json!(report.subpacketization)),
                        ("z_prime", json!(report.z_prime)),
                        ("slots", json!(report.slots)),
                        ("memory_ratio", ratio(&report.memory_ratio)),
                        ("rate", ratio(&report.rate)),
                        ("file_len", json!(report.file_len)),
                        ("packet_len", json!(report.packet_len)),
                        ("bytes_sent", json!(report.bytes_sent)),
                        ("distinct_request", json!(report.distinct_request)),
                        ("failed_users", json!(report.failed_users)),
                    ],
                    format,
                ),
            }
        }
        Command::Sweep { h, r, csv, svg } => {
            if !(2..=64).contains(&h) || r == 0 || r >= h {
                return Err(CliError::Usage(format!(
                    "need 0 < r < H <= 64, got H = {h}, r = {r}"
                )));
            }
            let records = analysis::sweep(h, r);
            if let Some(path) = &svg {
                write_file(path, &analysis::render_svg(&records))?;
            }
            match csv {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(io_err(&path))?;
                    analysis::write_csv(&records, file)?;
                    render(
                        &[
                            ("records", json!(records.len())),
                            ("csv", json!(path.display().to_string())),
                        ],
                        format,
                    )
                }
                None => {
                    let mut buf = Vec::new();
                    analysis::write_csv(&records, &mut buf)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
            }
        }
    };
    stdout
        .write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

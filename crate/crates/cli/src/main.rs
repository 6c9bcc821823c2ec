//! `sqz`: command-line front end for the squeezing-function toolkit.
//!
//! Every command reads one JSON object (a file path, `-` for stdin, or the
//! JSON text itself) and prints one JSON report carrying the command, the
//! tolerance, the seed and the provenance of each number. Exit status is 0
//! on success, 2 for bad input or violated preconditions and 3 when an
//! internal consistency check fails.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use commands::{Output, Settings};
use input::Input;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(squeeze_core::Error),
}

impl From<squeeze_core::Error> for CliError {
    fn from(e: squeeze_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_consistency() => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Core(squeeze_core::Error::Structural(_)) => "structural",
            CliError::Core(squeeze_core::Error::Argument(_)) => "argument",
            CliError::Core(squeeze_core::Error::Precondition(_)) => "precondition",
            CliError::Core(squeeze_core::Error::Consistency(_)) => "consistency",
            CliError::Core(squeeze_core::Error::Unsupported(_)) => "unsupported",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "sqz", version, about = "Squeezing functions of bounded symmetric domains and convex bodies")]
struct Cli {
    /// Numerical tolerance passed to every check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count; its meaning depends on the command.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan identity residuals on random quintuples of each factor.
    JtsCheck { input: String },
    /// Spectral decomposition of an element (`x`) or of a seeded random one.
    Spectral { input: String },
    /// Rank of a factor or product, with the sampled system rank.
    Rank { input: String },
    /// Boundary stratum of a point of an irreducible domain.
    Stratum { input: String },
    /// Shilov boundary membership.
    Shilov { input: String },
    /// Normalized realization scales and sampled boundary distances.
    Normalize { input: String },
    /// Kobayashi distance to a point or sampled distance to a removed set.
    Kobayashi { input: String },
    /// Exact squeezing constant of a bounded symmetric domain.
    SqueezeExact { input: String },
    /// Product lower bound, auxiliary conversion and product exclusion.
    SqueezeProduct { input: String },
    /// Two-sided bound for a domain with a set removed.
    SqueezeRemoved { input: String },
    /// Hardy-coefficient certificate of the upper bound 1/sqrt(rank).
    SqueezeCertify { input: String },
    /// Special-coordinate frame of a convex body at a base point.
    WlcFrame { input: String },
    /// Koebe lower bound c/(16 sqrt n) at a base point.
    WlcBound { input: String },
    /// Minimum Koebe bound over a grid of interior points.
    HhrScan { input: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::JtsCheck { .. } => "jts-check",
            Command::Spectral { .. } => "spectral",
            Command::Rank { .. } => "rank",
            Command::Stratum { .. } => "stratum",
            Command::Shilov { .. } => "shilov",
            Command::Normalize { .. } => "normalize",
            Command::Kobayashi { .. } => "kobayashi",
            Command::SqueezeExact { .. } => "squeeze-exact",
            Command::SqueezeProduct { .. } => "squeeze-product",
            Command::SqueezeRemoved { .. } => "squeeze-removed",
            Command::SqueezeCertify { .. } => "squeeze-certify",
            Command::WlcFrame { .. } => "wlc-frame",
            Command::WlcBound { .. } => "wlc-bound",
            Command::HhrScan { .. } => "hhr-scan",
        }
    }

    fn input(&self) -> &str {
        match self {
            Command::JtsCheck { input }
            | Command::Spectral { input }
            | Command::Rank { input }
            | Command::Stratum { input }
            | Command::Shilov { input }
            | Command::Normalize { input }
            | Command::Kobayashi { input }
            | Command::SqueezeExact { input }
            | Command::SqueezeProduct { input }
            | Command::SqueezeRemoved { input }
            | Command::SqueezeCertify { input }
            | Command::WlcFrame { input }
            | Command::WlcBound { input }
            | Command::HhrScan { input } => input,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.samples == Some(0) {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("--threads: {e}")))?;
    }
    let settings = Settings { tol: cli.tol, seed: cli.seed, samples: cli.samples };
    let input = Input::load(cli.command.input())?;
    let run = match cli.command {
        Command::JtsCheck { .. } => commands::jts_check,
        Command::Spectral { .. } => commands::spectral,
        Command::Rank { .. } => commands::rank,
        Command::Stratum { .. } => commands::stratum,
        Command::Shilov { .. } => commands::shilov,
        Command::Normalize { .. } => commands::normalize,
        Command::Kobayashi { .. } => commands::kobayashi,
        Command::SqueezeExact { .. } => commands::squeeze_exact,
        Command::SqueezeProduct { .. } => commands::squeeze_product,
        Command::SqueezeRemoved { .. } => commands::squeeze_removed,
        Command::SqueezeCertify { .. } => commands::squeeze_certify,
        Command::WlcFrame { .. } => commands::wlc_frame,
        Command::WlcBound { .. } => commands::wlc_bound,
        Command::HhrScan { .. } => commands::scan,
    };
    let out = run(&input, &settings)?;
    if cli.format == Format::Csv && out.table.is_none() {
        return Err(CliError::Input(format!("--format csv is only available for scan tables, not `{}`", cli.command.name())));
    }
    Ok(out)
}

fn envelope(cli: &Cli) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(cli.command.name()));
    m.insert("tol".into(), json!(cli.tol));
    m.insert("seed".into(), json!(cli.seed));
    if let Some(s) = cli.samples {
        m.insert("samples".into(), json!(s));
    }
    m
}

fn render(cli: &Cli, out: Output) -> String {
    if cli.format == Format::Csv {
        let (header, rows) = out.table.expect("checked in dispatch");
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        return s;
    }
    let mut m = envelope(cli);
    let mut provenance = Vec::new();
    if let Value::Object(mut fields) = out.result {
        if let Some(Value::Array(p)) = fields.remove("provenance") {
            provenance.extend(p);
        }
        for (k, v) in fields {
            m.entry(k).or_insert(v);
        }
    } else {
        m.insert("result".into(), out.result);
    }
    provenance.extend(out.provenance);
    m.insert("provenance".into(), Value::Array(provenance));
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serialisable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            let inconsistent = out.inconsistent.clone();
            print!("{}", render(&cli, out));
            match inconsistent {
                Some(msg) => {
                    eprintln!("sqz: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            let mut m = envelope(&cli);
            m.insert("error".into(), json!({ "kind": e.kind(), "message": e.message() }));
            println!("{}", serde_json::to_string_pretty(&Value::Object(m)).expect("serialisable"));
            eprintln!("sqz: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holomink_cli::commands::{self, Settings};
use holomink_cli::exit::{class_name, exit_code, Failure};
use holomink_cli::{emit, read_document, verify};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "holomink", version, about = "Reconstruct Lorentzian tetrahedra from face holonomies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Residual and closure tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Classification tolerance (null, parabolic, zero eigenvalue)
    #[arg(long, global = true)]
    class_tolerance: Option<f64>,
    /// Exact arithmetic where the input allows it
    #[arg(long, global = true)]
    exact: bool,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct the tetrahedron from four closing holonomies
    Reconstruct {
        file: PathBuf,
        /// Build the fourth holonomy from closure
        #[arg(long)]
        derive_fourth: bool,
    },
    /// Face holonomies and spin lifts of a Gram matrix or tetrahedron
    Forward { file: PathBuf },
    /// Model and vertex sector of a Gram matrix
    Classify { file: PathBuf },
    /// Gram matrix to tetrahedron to holonomies and back
    Roundtrip { file: PathBuf },
    /// Flat-limit scaling of a curved family
    Flatcheck {
        /// Flat vertices document; a built-in configuration when omitted
        file: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Check every bundled dataset against its printed values
    VerifyPaper {
        /// Dataset directory (defaults to $HOLOMINK_DATASETS, then ./datasets)
        #[arg(long)]
        datasets: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Value, (Failure, Option<Value>)> {
    let c = &cli.common;
    let mut s = Settings { tolerance: c.tolerance, class_tolerance: c.class_tolerance, exact: c.exact, derive_fourth: false };
    let bare = |f: Failure| (f, None);
    match &cli.command {
        Command::Reconstruct { file, derive_fourth } => {
            s.derive_fourth = *derive_fourth;
            let doc = read_document(file).map_err(|e| bare(e.into()))?;
            commands::reconstruct(&doc, &s).map_err(bare)
        }
        Command::Forward { file } => commands::forward(&read_document(file).map_err(|e| bare(e.into()))?, &s).map_err(bare),
        Command::Classify { file } => commands::classify(&read_document(file).map_err(|e| bare(e.into()))?, &s).map_err(bare),
        Command::Roundtrip { file } => commands::roundtrip(&read_document(file).map_err(|e| bare(e.into()))?, &s).map_err(bare),
        Command::Flatcheck { file, radius } => {
            let doc = match file {
                Some(f) => Some(read_document(f).map_err(|e| bare(e.into()))?),
                None => None,
            };
            let v = commands::flatcheck(doc.as_ref(), *radius, &s).map_err(bare)?;
            if v["passed"] == true {
                Ok(v)
            } else {
                Err((Failure::Verification { failed: 1 }, Some(v)))
            }
        }
        Command::VerifyPaper { datasets } => {
            let dir = verify::datasets_dir(datasets.as_deref());
            let checks = verify::verify_paper(&dir, &s).map_err(bare)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if matches!(c.format, Format::Text) {
                print!("{}", verify::table(&checks));
                return if failed == 0 { Ok(Value::Null) } else { Err((Failure::Verification { failed }, None)) };
            }
            let v = verify::summary(&checks);
            if failed == 0 {
                Ok(v)
            } else {
                Err((Failure::Verification { failed }, Some(v)))
            }
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => emit::canonical_json(v),
        Format::Text => emit::text(v),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.common.format;
    match run(&cli) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            print!("{}", render(&v, format));
            ExitCode::SUCCESS
        }
        Err((f, partial)) => {
            if let Some(v) = partial {
                print!("{}", render(&v, format));
            }
            let code = exit_code(&f);
            let err = json!({"error": {"class": class_name(&f), "message": f.to_string(), "exit_code": code}});
            eprint!("{}", render(&err, format));
            ExitCode::from(code)
        }
    }
}

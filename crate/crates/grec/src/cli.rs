//! Command line entry point.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use grec_core::decoration::Correction;
use grec_core::error::{PipelineError, ReuseError, TableError};
use grec_core::grec::GrecTemplate;
use grec_core::pipeline::{apply_corrections, deconstruct_scene, detect_svg};
use grec_core::reuse::{check_compatibility, generate_sample_data, infer_schema, Choice};
use grec_core::Config;
use serde_json::json;

use crate::corpus;
use crate::io::{read_csv, read_json, to_csv, write_json};
use crate::service::apply_choices;

#[derive(Parser)]
#[command(name = "grec", version, about = "Deconstruct SVG charts into reusable layout templates and apply them to new data")]
struct Cli {
    /// JSON file with pipeline thresholds; unset fields keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect decorations, apply corrections and infer the template.
    Deconstruct {
        svg: PathBuf,
        /// JSON array of decoration corrections applied in order.
        #[arg(long)]
        corrections: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a CSV that satisfies the template's field requirements.
    SampleData {
        template: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Report whether a dataset has enough fields for the template.
    Check { template: PathBuf, data: PathBuf },
    /// Bind a dataset to the template and render the final chart.
    Apply {
        template: PathBuf,
        data: PathBuf,
        /// JSON array with one choice per step, in plan order.
        #[arg(long)]
        choices: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Synthetic charts with known ground truth.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Run the HTTP session API.
    Serve {
        #[arg(long, env = "GREC_PORT", default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Write the corpus charts and manifest.json.
    Generate {
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
    },
    /// Round-trip every chart and print an accuracy table. Without --dir
    /// the charts are generated in memory.
    Score {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let cfg: Config = match path {
        Some(p) => read_json(p)?,
        None => Config::default(),
    };
    cfg.validate().map_err(PipelineError::from)?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Deconstruct { svg, corrections, output } => {
            let text = std::fs::read_to_string(&svg).with_context(|| format!("reading {}", svg.display()))?;
            let corrections: Vec<Correction> = match corrections {
                Some(p) => read_json(&p)?,
                None => Vec::new(),
            };
            let (scene, model) = detect_svg(&text, &cfg)?;
            let detected = model.summary();
            let model = apply_corrections(&scene, model, &corrections, &cfg)?;
            let corrected = model.summary();
            let template = deconstruct_scene(&scene, model, &cfg)?;
            write_json(&output, &template)?;
            let report = json!({
                "detected": detected,
                "corrected": corrected,
                "summary": template.summary(),
                "schema": infer_schema(&template),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::SampleData { template, output, seed } => {
            let t: GrecTemplate = read_json(&template)?;
            let table = generate_sample_data(&infer_schema(&t), &t, seed);
            std::fs::write(&output, to_csv(&table)?).with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Check { template, data } => {
            let t: GrecTemplate = read_json(&template)?;
            let table = read_csv(&data)?;
            let schema = infer_schema(&t);
            let report = check_compatibility(&schema, &table);
            let out = json!({ "schema": schema, "report": report, "tableWarnings": table.warnings });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Apply { template, data, choices, output } => {
            let t: GrecTemplate = read_json(&template)?;
            let table = read_csv(&data)?;
            let choices: Vec<Choice> = read_json(&choices)?;
            let svg = apply_choices(t, table, &choices, cfg)?;
            std::fs::write(&output, svg).with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Corpus { action: CorpusAction::Generate { dir } } => {
            let entries = corpus::generate(&dir, &corpus::default_specs())?;
            println!("wrote {} charts to {}", entries.len(), dir.display());
        }
        Command::Corpus { action: CorpusAction::Score { dir, json } } => {
            let charts = match dir {
                Some(d) => corpus::load(&d)?,
                None => corpus::default_specs().iter().map(grec_core::render::generate_synthetic_chart).collect(),
            };
            let report = corpus::score(&charts, &cfg);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", corpus::format_table(&report));
            }
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::server::serve(port, cfg))?;
        }
    }
    Ok(())
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    if let Some(p) = e.downcast_ref::<PipelineError>() {
        p.kind()
    } else if e.downcast_ref::<ReuseError>().is_some() {
        "reuse"
    } else if e.downcast_ref::<TableError>().is_some() || e.downcast_ref::<csv::Error>().is_some() {
        "data"
    } else if e.downcast_ref::<serde_json::Error>().is_some() {
        "json"
    } else if e.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else {
        "error"
    }
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 success, 1 usage error, 2 pipeline error (reported as JSON on stderr).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let report = json!({ "error": error_kind(&e), "message": format!("{e:#}") });
            eprintln!("{report}");
            2
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use drsn_cli::{run, Command, Format, JobSpec, Source};

/// Normal forms of doubly-resonant saddle-nodes in three complex variables.
#[derive(Parser, Debug)]
#[command(name = "drsn", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Use the built-in Painlevé-I field.
    #[arg(long, conflicts_with_all = ["input", "field"])]
    painleve1: bool,
    /// File holding `dx:`, `dy1:`, `dy2:` lines.
    #[arg(long, conflicts_with = "field")]
    input: Option<PathBuf>,
    /// Inline field, lines separated by `;`.
    #[arg(long)]
    field: Option<String>,
    /// Truncation order N.
    #[arg(long, default_value_t = 8)]
    order: u32,
    /// v-order M of the c-jets; requires N >= 2M + 2.
    #[arg(long)]
    v_order: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    json: bool,
    /// Diagonalize a non-diagonal linear part first.
    #[arg(long)]
    diagonalize: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let source = if args.painleve1 {
        Source::Painleve1
    } else if let Some(p) = args.input {
        Source::File(p)
    } else if let Some(f) = args.field {
        Source::Inline(f)
    } else {
        eprintln!("error: one of --painleve1, --input or --field is required");
        return ExitCode::from(2);
    };
    let spec = JobSpec {
        command: args.command,
        source,
        order: args.order,
        v_order: args.v_order,
        tolerance: args.tolerance,
        format: if args.json { Format::Json } else { Format::Text },
        diagonalize: args.diagonalize,
    };
    let out = run(&spec);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.status as u8)
}

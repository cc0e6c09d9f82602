use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ontoforge::checker::DEFAULT_CAP;
use ontoforge::pipeline::{run, Mode, RunConfig};
use ontoforge::Style;

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Shallow,
    Deep,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Ascii,
    Unicode,
}

/// Translate OWL ontologies into Event-B contexts.
#[derive(Parser)]
#[command(name = "ontoforge", version)]
struct Cli {
    /// Input OWL files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Encoding to emit.
    #[arg(long, value_enum, default_value = "shallow")]
    mode: ModeArg,

    /// Operator tokens in the output.
    #[arg(long, value_enum, env = "ONTOFORGE_STYLE", default_value = "ascii")]
    style: StyleArg,

    /// Evaluate the emitted axioms and theorems over the derived finite interpretation.
    #[arg(long)]
    check: bool,

    /// Also write the check report as JSON.
    #[arg(long, requires = "check")]
    report_json: bool,

    /// Context name (default: derived from the file name).
    #[arg(long)]
    name: Option<String>,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Write the pivot model as JSON.
    #[arg(long)]
    dump_pivot: bool,

    /// Largest set the checker may materialize or enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_domain: u64,

    /// Report pipeline stages on stderr.
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        inputs: cli.inputs,
        output_dir: cli.out,
        mode: match cli.mode {
            ModeArg::Shallow => Mode::Shallow,
            ModeArg::Deep => Mode::Deep,
            ModeArg::Both => Mode::Both,
        },
        style: match cli.style {
            StyleArg::Ascii => Style::Ascii,
            StyleArg::Unicode => Style::Unicode,
        },
        check: cli.check,
        max_domain: cli.max_domain,
        dump_pivot: cli.dump_pivot,
        report_json: cli.report_json,
        name: cli.name,
        verbose: cli.verbose,
    };
    let outcome = run(&config);
    for line in &outcome.stderr {
        eprintln!("{line}");
    }
    print!("{}", outcome.stdout);
    ExitCode::from(outcome.status.code() as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use veq::corpus;
use veq::run::{run, Options, RunError};
use veq::workspace::Workspace;
use veq_core::par::Exec;

/// Finite categorical equation solving, theories, inserters and series.
#[derive(Debug, Parser)]
#[command(name = "veq", version)]
struct Cli {
    /// One of: solve, cosolve, check-solution, implies, reduce, genvar,
    /// geneq, unify, decide, quotient, cosolve-theories, kernel, hsp,
    /// identities, freealg, centralizer, abelianize, inserter,
    /// verify-forgetful, shift, recurrence, wronskian, check.
    verb: String,
    args: Vec<String>,
    /// Workspace file; may be repeated.
    #[arg(short = 'f', long = "file")]
    files: Vec<PathBuf>,
    /// Bundled corpus family to load, or `all`; may be repeated.
    #[arg(long)]
    corpus: Vec<String>,
    /// One JSON record per line instead of text.
    #[arg(long)]
    json: bool,
    /// Step budget for congruence search.
    #[arg(long, env = "VEQ_BUDGET", default_value_t = 10_000)]
    budget: usize,
    #[arg(long)]
    prec: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    vars: Option<usize>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

fn load(cli: &Cli) -> Result<Workspace, RunError> {
    let mut sources = Vec::new();
    for name in &cli.corpus {
        let files = corpus::family(name).ok_or_else(|| RunError::Unknown {
            kind: "corpus family",
            name: name.clone(),
        })?;
        sources.extend(files.iter().map(|s| s.to_string()));
    }
    for path in &cli.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
        sources.push(text);
    }
    Ok(Workspace::parse_all(sources.iter().map(String::as_str))?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        budget: cli.budget,
        prec: cli.prec,
        kmax: cli.kmax,
        depth: cli.depth,
        vars: cli.vars,
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    let result = load(&cli).and_then(|ws| run(&ws, &cli.verb, &cli.args, &opts));
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", out.record.to_json_line());
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.record.status.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                println!("{}", e.record(&cli.verb).to_json_line());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

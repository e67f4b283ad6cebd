use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use experiments::{cmd_branching, cmd_largest, cmd_limit_laws, cmd_oracle, cmd_proportions};
use experiments::{ExperimentConfig, ExperimentError, OutputFormat, Report};
use rrt_percolation::tree::export_dot;
use rrt_percolation::{grow_uniform, mark_sites, stream_rng, RecursiveTree, SiteMarks};

#[derive(Parser)]
#[command(name = "rrt-perc", version, about = "Percolation on random recursive trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster-size proportions against the Yule–Simon limit
    Proportions(Opts),
    /// Scaling of the largest clusters over an n-grid
    Largest(Opts),
    /// Scaled cluster sizes against the limit samplers
    LimitLaws(Opts),
    /// Branching-process growth, census ratios and eigenvector checks
    Branching(Opts),
    /// Exhaustive small-n checks
    Oracle(Opts),
    /// Grow one tree and print it as JSON
    Grow(Opts),
    /// Grow one tree and print it in Graphviz format
    ExportDot(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Site-percolation parameter
    #[arg(long)]
    p: Option<f64>,
    /// Tree size
    #[arg(long)]
    n: Option<u64>,
    /// Comma-separated tree sizes (largest)
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Number of replicates
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation level for eigenvector checks
    #[arg(long)]
    h: Option<usize>,
    /// l^q exponent (must exceed 1/p)
    #[arg(long)]
    q: Option<f64>,
    /// Time horizon (branching runs, Mittag–Leffler oracle)
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Per-command defaults, matching the desk-scale reproduction runs.
fn defaults(command: &Command) -> ExperimentConfig {
    let base = ExperimentConfig::default();
    match command {
        Command::Proportions(_) => ExperimentConfig { n: 1_000_000, reps: 20, ..base },
        Command::Largest(_) => ExperimentConfig { p: 0.5, n_grid: (10..=20).map(|e| 1u64 << e).collect(), reps: 200, ..base },
        Command::LimitLaws(_) => ExperimentConfig { n: 1 << 20, reps: 10_000, t: 14.0, ..base },
        Command::Branching(_) => ExperimentConfig { reps: 10_000, t: 12.0, ..base },
        Command::Oracle(_) => ExperimentConfig { n: 8, ..base },
        Command::Grow(_) | Command::ExportDot(_) => ExperimentConfig { n: 20, reps: 1, ..base },
    }
}

fn configure(command: &Command, o: &Opts) -> ExperimentConfig {
    let d = defaults(command);
    ExperimentConfig {
        p: o.p.unwrap_or(d.p),
        n: o.n.unwrap_or(d.n),
        n_grid: o.n_grid.clone().unwrap_or(d.n_grid),
        reps: o.reps.unwrap_or(d.reps),
        seed: o.seed.unwrap_or(d.seed),
        h: o.h.unwrap_or(d.h),
        q: o.q.or(d.q),
        t: o.t.unwrap_or(d.t),
        format: o.format.unwrap_or(d.format),
        workers: o.workers.unwrap_or(d.workers),
    }
}

/// One tree and, when `--p` is given, its site marks.
fn grow_one(config: &ExperimentConfig, marked: bool) -> Result<(RecursiveTree, Option<SiteMarks>), ExperimentError> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, "grow", 0);
    let tree = grow_uniform(config.n as usize, &mut rng)?;
    let marks = if marked { Some(mark_sites(&tree, config.p, &mut rng)?) } else { None };
    Ok((tree, marks))
}

enum Output {
    Report(Report),
    Text(String),
}

fn run(command: &Command, o: &Opts) -> Result<Output, ExperimentError> {
    let config = configure(command, o);
    Ok(match command {
        Command::Proportions(_) => Output::Report(cmd_proportions(&config)?),
        Command::Largest(_) => Output::Report(cmd_largest(&config)?),
        Command::LimitLaws(_) => Output::Report(cmd_limit_laws(&config)?),
        Command::Branching(_) => Output::Report(cmd_branching(&config)?),
        Command::Oracle(_) => Output::Report(cmd_oracle(&config)?),
        Command::Grow(_) => {
            let (tree, marks) = grow_one(&config, o.p.is_some())?;
            let mut json = tree.to_record(marks.as_ref()).to_json()?;
            json.push('\n');
            Output::Text(json)
        }
        Command::ExportDot(_) => {
            let (tree, marks) = grow_one(&config, o.p.is_some())?;
            Output::Text(export_dot(&tree, marks.as_ref()))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match &cli.command {
        Command::Proportions(o)
        | Command::Largest(o)
        | Command::LimitLaws(o)
        | Command::Branching(o)
        | Command::Oracle(o)
        | Command::Grow(o)
        | Command::ExportDot(o) => o.clone(),
    };
    let format = configure(&cli.command, &opts).format;
    let (text, passed) = match run(&cli.command, &opts) {
        Ok(Output::Report(r)) => (r.render(format), r.all_passed()),
        Ok(Output::Text(t)) => (t, true),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &opts.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

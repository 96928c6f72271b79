use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use capillab::cli::{parse_values, run_scenario, sweep, write_outputs, Axis, Scenario, ScenarioReport, Suite};

#[derive(Parser)]
#[command(name = "capillab", version, about = "Stability laboratory for capillary CMC surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    config: PathBuf,
    /// Output directory (default `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Exit with status 1 when a hard check fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites listed in the scenario.
    Report(Common),
    VerifyHessians(Common),
    VerifyComparison(Common),
    /// Jacobi and energy indices with spectra.
    Index(Common),
    Bounds(Common),
    /// One run per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: String,
        /// Comma-separated, e.g. `pi/6,pi/4,pi/3`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

fn load(c: &Common, suites: Option<Vec<Suite>>) -> capillab::Result<Scenario> {
    let mut sc = Scenario::load(&c.config)?;
    if let Some(seed) = c.seed {
        sc.seed = seed;
    }
    if let Some(s) = suites {
        sc.suites = s;
    }
    Ok(sc)
}

fn print(report: &ScenarioReport) {
    println!("scenario {} [{}]", report.name, &report.provenance.config_hash[..12]);
    for s in &report.suites {
        if let Some(e) = &s.error {
            println!("  {:<10} ERROR {e}", s.suite.name());
        }
        for c in &s.checks {
            println!("  {:<10} {}", s.suite.name(), c.line());
        }
    }
    println!("{} ({} hard failures)", if report.passed { "PASSED" } else { "FAILED" }, report.hard_failures());
}

fn run(cli: Cli) -> capillab::Result<bool> {
    let (common, suites) = match &cli.command {
        Command::Report(c) => (c, None),
        Command::VerifyHessians(c) => (c, Some(vec![Suite::Hessians])),
        Command::VerifyComparison(c) => (c, Some(vec![Suite::Comparison])),
        Command::Index(c) => (c, Some(vec![Suite::Spectra])),
        Command::Bounds(c) => (c, Some(vec![Suite::Bounds])),
        Command::Sweep { common, .. } => (common, None),
    };
    let sc = load(common, suites)?;
    let dir = common.out.clone().unwrap_or_else(|| sc.output_dir());
    if let Command::Sweep { axis, values, .. } = &cli.command {
        let axis: Axis = axis.parse()?;
        let values = parse_values(values)?;
        let (table, reports) = sweep(&sc, axis, &values, common.workers)?;
        std::fs::create_dir_all(&dir)?;
        table.write_csv(std::fs::File::create(dir.join("sweep.csv"))?)?;
        table.write_csv(std::io::stdout().lock())?;
        for (v, r) in values.iter().zip(&reports) {
            r.write(&dir.join(format!("{}_{}", axis.name(), v)))?;
        }
        return Ok(reports.iter().all(|r| r.passed));
    }
    rayon::ThreadPoolBuilder::new().num_threads(common.workers.max(1)).build_global().ok();
    let report = run_scenario(&sc)?;
    write_outputs(&sc, &report, &dir)?;
    print(&report);
    println!("wrote {}", dir.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = match &cli.command {
        Command::Report(c) | Command::VerifyHessians(c) | Command::VerifyComparison(c) | Command::Index(c) | Command::Bounds(c) => c.strict,
        Command::Sweep { common, .. } => common.strict,
    };
    match run(cli) {
        Ok(passed) if passed || !strict => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

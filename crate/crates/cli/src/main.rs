//! `atomtest` command-line interface.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 statistical
//! degeneracy (the message names the condition), 64 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use atomtest::io::{
    read_scenarios, read_trial_csv, region_svg, write_power_csv, write_power_long,
    write_region_csv, CsvOptions, ReportDocument,
};
use atomtest::{
    power_study, simultaneous_region, Error, Method, PowerStudy, StudyMethod, TrialData,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_INPUT: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "atomtest",
    version,
    about = "Two-part likelihood-ratio tests for outcomes with an atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint test of both outcome parts with marginal confidence intervals.
    Test(TestArgs),
    /// Simultaneous confidence region for (difference in means, log odds-ratio).
    Region(RegionArgs),
    /// Monte Carlo power study over scenarios and sample sizes.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Gaussian model for the observed values.
    Lrt,
    /// Empirical likelihood for the observed values.
    Splrt,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lrt => Method::Parametric,
            MethodArg::Splrt => Method::Semiparametric,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// CSV with columns `y` (outcome) and `r` (0 = control, 1 = treatment).
    #[arg(long)]
    input: PathBuf,
    /// Outcome value that marks an unobserved record.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    atom: f64,
    /// Values within this distance of the atom count as the atom.
    #[arg(long, default_value_t = 0.0)]
    atom_eps: f64,
    #[arg(long, value_enum, default_value = "splrt")]
    method: MethodArg,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Covariate columns to adjust for (parametric method only).
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    resolution: usize,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario configuration (TOML, one `[[scenario]]` table per scenario).
    #[arg(long)]
    scenarios: PathBuf,
    /// Per-group sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100, 150, 200, 250])]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = StudyMethod::ALL)]
    methods: Vec<StudyMethod>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Power table CSV.
    #[arg(long)]
    out: PathBuf,
    /// Long-format CSV for plotting; defaults to `<out>` with a `.long.csv` suffix.
    #[arg(long)]
    out_long: Option<PathBuf>,
    /// Worker threads (0 = all cores). Changes wall time only.
    #[arg(long, env = "ATOMTEST_WORKERS", default_value_t = 0)]
    workers: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_statistical() {
            EXIT_DEGENERATE
        } else {
            EXIT_INPUT
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())).into())
}

fn load(args: &DataArgs, covariates: &[String]) -> Result<TrialData<f64>, Failure> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(usage(format!(
            "--level must lie in (0, 1), got {}",
            args.level
        )));
    }
    let file =
        File::open(&args.input).map_err(|e| Error::Io(format!("{}: {e}", args.input.display())))?;
    let options = CsvOptions {
        covariates: covariates.to_vec(),
        atom: args.atom,
        atom_eps: args.atom_eps,
        ..CsvOptions::default()
    };
    read_trial_csv(io::BufReader::new(file), &options).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", args.input.display())).into(),
        other => other.into(),
    })
}

fn run_test(args: TestArgs) -> Result<(), Failure> {
    if !args.covariates.is_empty() && matches!(args.data.method, MethodArg::Splrt) {
        return Err(usage("--covariates requires --method lrt"));
    }
    let data = load(&args.data, &args.covariates)?;
    let report = ReportDocument::analyze(&data, args.data.method.into(), args.data.level)?;
    if report.notes.iter().any(|n| n.starts_with("no atoms found")) {
        eprintln!("warning: no atoms found; continuous-part test only is NOT substituted");
    }
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        let mut w = create(path)?;
        writeln!(w, "{}", report.to_json()).map_err(Error::from)?;
        w.flush().map_err(Error::from)?;
    }
    Ok(())
}

fn run_region(args: RegionArgs) -> Result<(), Failure> {
    let data = load(&args.data, &[])?;
    let region = simultaneous_region(
        &data,
        1.0 - args.data.level,
        args.resolution,
        args.data.method.into(),
    )?;
    write_region_csv(&region, create(&args.out_csv)?)?;
    if let Some(path) = &args.out_svg {
        let mut w = create(path)?;
        w.write_all(region_svg(&region).as_bytes())
            .map_err(Error::from)?;
        w.flush().map_err(Error::from)?;
    }
    let members: usize = region.membership.iter().flatten().filter(|&&m| m).count();
    let origin = region.m_grid.first().is_some_and(|&lo| lo <= 0.0)
        && region.m_grid.last().is_some_and(|&hi| hi >= 0.0)
        && region.b_grid.first().is_some_and(|&lo| lo <= 0.0)
        && region.b_grid.last().is_some_and(|&hi| hi >= 0.0);
    let n = region.resolution();
    println!(
        "grid: {n} x {n}, threshold W <= {:.6}, {members} member points",
        region.threshold
    );
    if origin {
        let (i, j) = region.nearest_cell(0.0, 0.0);
        let inside = if region.membership[i][j] {
            "inside"
        } else {
            "outside"
        };
        println!("no-effect point (0, 0): {inside} the region");
    } else {
        println!("no-effect point (0, 0): outside the plotted grid");
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let scenarios = read_scenarios(&args.scenarios)?;
    let mut methods = args.methods.clone();
    methods.dedup();
    let study = PowerStudy {
        scenarios,
        n_grid: args.n_grid.clone(),
        reps: args.reps,
        alpha: args.alpha,
        methods,
        seed: args.seed,
        workers: args.workers,
    };
    if let Err(e) = study.validate() {
        return Err(usage(e.to_string()));
    }
    let table = power_study(&study)?;
    write_power_csv(&table, create(&args.out)?)?;
    let long = args.out_long.clone().unwrap_or_else(|| {
        let stem = args
            .out
            .file_stem()
            .map_or("power".into(), |s| s.to_string_lossy().into_owned());
        args.out.with_file_name(format!("{stem}.long.csv"))
    });
    write_power_long(&table, create(&long)?)?;
    let degenerate: usize = table.rows.iter().map(|r| r.degenerate).sum();
    println!(
        "{} rows written to {} (long format: {})",
        table.rows.len(),
        args.out.display(),
        long.display()
    );
    if degenerate > 0 {
        println!("{degenerate} method-replicate pairs were degenerate and left out of the power estimates");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Test(a) => run_test(a),
        Command::Region(a) => run_region(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

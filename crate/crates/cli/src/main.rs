use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use breakcoint::montecarlo::{simulate_critical_values, summaries_to_csv, CriticalValueTest};
use breakcoint::pipeline::wdi::{observations_to_csv, parse_wdi_page, wdi_url};
use breakcoint::pipeline::{
    execute, parse_expectations, read_bundle, replicate, run_pipeline, tables, OutputFormat, PipelineConfig, ReportBundle,
};
use breakcoint::Error;
use clap::{Parser, Subcommand, ValueEnum};

const DEFAULT_CONFIG: &str = r#"{
  "variables": {
    "dependent": "INF",
    "regressors": ["IMP", "REN", "EXC"],
    "interaction": { "factors": ["REN", "IMP"], "name": "TERM" }
  }
}"#;

#[derive(Parser)]
#[command(name = "breakcoint", version, about = "Structural-break unit roots, cointegration and long-run estimation")]
struct Cli {
    /// Pipeline config (strict JSON). Defaults to the bundled snapshot with INF on IMP, REN, EXC and TERM = REN x IMP.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (or file, for `fetch`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for simulations; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format. `run` writes all three when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Csv,
    Svg,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Md => OutputFormat::Markdown,
            Format::Csv => OutputFormat::Csv,
            Format::Svg => OutputFormat::Svg,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics.
    Describe,
    /// Zivot-Andrews and Lee-Strazicich tests in levels and first differences.
    Unitroot,
    /// Johansen and Hatemi-J cointegration tests.
    Cointegrate,
    /// DOLS and FMOLS long-run estimates.
    Estimate,
    /// ARDL selection, bounds test, error-correction form and long-run coefficients.
    Ardl,
    /// Residual diagnostics and CUSUM/CUSUMSQ stability for every estimator.
    Diagnose,
    /// Simulate the null distribution of a test statistic.
    Simulate {
        #[arg(long, value_enum)]
        test: SimTest,
        #[arg(long, default_value_t = 500)]
        t: usize,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        /// Variables (Johansen) or regressors (bounds F).
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Bounds F with integrated regressors rather than stationary ones.
        #[arg(long)]
        integrated: bool,
    },
    /// Download a World Development Indicators series as `year,value` CSV.
    Fetch {
        #[arg(long, default_value = "FP.CPI.TOTL.ZG")]
        indicator: String,
        #[arg(long, default_value = "TUR")]
        country: String,
        #[arg(long, default_value_t = 1980)]
        from: i32,
        #[arg(long, default_value_t = 2022)]
        to: i32,
    },
    /// Run the full pipeline and write the bundle, tables and plots.
    Run,
    /// Compare a written bundle with an expectations file.
    Replicate {
        #[arg(long)]
        expectations: PathBuf,
        /// Bundle to check; defaults to `<out>/bundle.json`.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SimTest {
    Df,
    Za,
    Ls2,
    Johansen,
    Bounds,
}

enum Failure {
    Core(Error),
    Network(String),
    HttpStatus(u16),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn is_input_error(e: &Error) -> bool {
    match e {
        Error::Stage { source, .. } => is_input_error(source),
        Error::EmptyFile
        | Error::GapInYears { .. }
        | Error::NonNumericCell { .. }
        | Error::DuplicateColumn(_)
        | Error::MalformedCsv(_)
        | Error::AlignmentMismatch(_)
        | Error::UnknownColumn(_)
        | Error::TrimOutOfRange(_)
        | Error::InvalidArgument(_)
        | Error::InvalidSpec(_)
        | Error::Validation(_)
        | Error::MalformedExpectations(_)
        | Error::MalformedPayload(_)
        | Error::Io(_) => true,
        _ => false,
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch => 1,
            Failure::Core(e) if is_input_error(e) => 2,
            Failure::Core(_) => 3,
            Failure::Network(_) | Failure::HttpStatus(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Network(m) => format!("network unavailable: {m}"),
            Failure::HttpStatus(c) => format!("HTTP status {c}"),
            Failure::Mismatch => "replication mismatch".into(),
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut c = match &cli.config {
        Some(p) => PipelineConfig::from_path(p)?,
        None => PipelineConfig::from_json(DEFAULT_CONFIG)?,
    };
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    Ok(c)
}

fn out_dir(cli: &Cli, config: &PipelineConfig) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| config.output_dir.clone())
}

/// Print (or write under `--out`) the tables whose ids start with one of `prefixes`.
fn show(cli: &Cli, bundle: &ReportBundle, prefixes: &[&str]) -> Result<(), Failure> {
    let format = cli.format.map(OutputFormat::from).unwrap_or(OutputFormat::Markdown);
    let selected: Vec<_> = tables(bundle).into_iter().filter(|t| prefixes.iter().any(|p| t.id.starts_with(p))).collect();
    let mut out = String::new();
    for t in &selected {
        let text = match format {
            OutputFormat::Csv => t.to_csv()?,
            OutputFormat::Markdown => t.to_markdown(),
            OutputFormat::Svg => return Err(Error::InvalidArgument("svg output is only produced by `run`".into()).into()),
        };
        match &cli.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(Error::from)?;
                let ext = if format == OutputFormat::Csv { "csv" } else { "md" };
                std::fs::write(dir.join(format!("{}.{ext}", t.id)), &text).map_err(Error::from)?;
            }
            None => {
                out += &text;
                out.push('\n');
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn stage_view(cli: &Cli, prefixes: &[&str]) -> Result<(), Failure> {
    let mut config = load_config(cli)?;
    config.tuning.simulation.reps = 0;
    let bundle = run_pipeline(&config)?;
    show(cli, &bundle, prefixes)
}

fn http_get(agent: &ureq::Agent, url: &str) -> Result<String, Failure> {
    match agent.get(url).call() {
        Ok(mut resp) => {
            let mut body = String::new();
            resp.body_mut().as_reader().read_to_string(&mut body).map_err(|e| Failure::Network(e.to_string()))?;
            Ok(body)
        }
        Err(ureq::Error::StatusCode(c)) => Err(Failure::HttpStatus(c)),
        Err(e) => Err(Failure::Network(e.to_string())),
    }
}

fn fetch(cli: &Cli, indicator: &str, country: &str, from: i32, to: i32) -> Result<(), Failure> {
    wdi_url(indicator, country, from, to, 1)?;
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(30))).build().into();
    let mut obs = Vec::new();
    let mut page = 1;
    loop {
        let body = http_get(&agent, &wdi_url(indicator, country, from, to, page)?)?;
        let p = parse_wdi_page(&body)?;
        obs.extend(p.observations);
        if page >= p.pages {
            break;
        }
        page += 1;
    }
    let csv = observations_to_csv(obs)?;
    match &cli.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(Error::from)?;
            }
            std::fs::write(path, csv).map_err(Error::from)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn simulate(cli: &Cli, test: SimTest, t: usize, reps: usize, k: usize, integrated: bool) -> Result<(), Failure> {
    let seed = match cli.seed {
        Some(s) => s,
        None => load_config(cli)?.seed,
    };
    let test = match test {
        SimTest::Df => CriticalValueTest::DfConstant,
        SimTest::Za => CriticalValueTest::ZaModelA,
        SimTest::Ls2 => CriticalValueTest::LsTwoBreakModelA,
        SimTest::Johansen => CriticalValueTest::JohansenTrace { k },
        SimTest::Bounds => CriticalValueTest::BoundsF { k, integrated },
    };
    let s = simulate_critical_values(test, t, reps, seed)?;
    let csv = summaries_to_csv(std::slice::from_ref(&s))?;
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join(format!("{}_T{}.csv", s.test_id.to_lowercase(), s.t)), &csv).map_err(Error::from)?;
        }
        None => print!("{csv}"),
    }
    if s.rejection_rate.is_finite() {
        eprintln!("rejection rate at the tabulated 5% value: {:.4}", s.rejection_rate);
    }
    Ok(())
}

fn run_all(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let dir = out_dir(cli, &config);
    let formats: Vec<OutputFormat> = match cli.format {
        Some(f) => vec![f.into()],
        None => vec![OutputFormat::Markdown, OutputFormat::Csv, OutputFormat::Svg],
    };
    execute(&config, &dir, &formats)?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn replicate_cmd(cli: &Cli, expectations: &Path, bundle: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(expectations).map_err(|e| Error::Io(format!("{}: {e}", expectations.display())))?;
    let ex = parse_expectations(&text)?;
    let path = match bundle {
        Some(p) => p.to_path_buf(),
        None => out_dir(cli, &load_config(cli)?).join("bundle.json"),
    };
    let report = replicate(&read_bundle(&path)?, &ex);
    let failed = report.failures().count();
    print!("{}", report.diff());
    eprintln!("{} of {} checks passed", report.checks.len() - failed, report.checks.len());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Describe => stage_view(cli, &["table1"]),
        Command::Unitroot => stage_view(cli, &["table2", "table3"]),
        Command::Cointegrate => stage_view(cli, &["table4", "table5_hatemi_j"]),
        Command::Estimate => stage_view(cli, &["table5_long_run"]),
        Command::Ardl => stage_view(cli, &["table6"]),
        Command::Diagnose => stage_view(cli, &["diagnostics_summary"]),
        Command::Simulate { test, t, reps, k, integrated } => simulate(cli, *test, *t, *reps, *k, *integrated),
        Command::Fetch { indicator, country, from, to } => fetch(cli, indicator, country, *from, *to),
        Command::Run => run_all(cli),
        Command::Replicate { expectations, bundle } => replicate_cmd(cli, expectations, bundle.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::Mismatch) {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}

//! `cubfuzz`: fit CUB models to questionnaire ratings and build intuitionistic
//! fuzzy evaluations from them.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cubfuzz_core::config::{AnalysisConfig, ShelterMode, WeightsSpec};
use cubfuzz_core::pipeline::{run_aggregate, run_fit, run_fuzzy, Aggregate, RunReport};
use cubfuzz_core::report::{self, aggregate_table, fit_table, profile_table, read_ifs_csv};
use cubfuzz_core::{
    hamming_distance, ingest_csv, simulate, CubModel, CubParams, FuzzySystem, RatingSample, RatingsTable, ShelterParams,
};

#[derive(Parser)]
#[command(
    name = "cubfuzz",
    version,
    about = "CUB models and intuitionistic fuzzy evaluation of rating data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Ratings CSV (header of item names, `NA` for missing).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// TOML analysis configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fuzzy systems: cub_fuzzy, spline, empirical or all (comma separated or repeated).
    #[arg(long, global = true, value_delimiter = ',')]
    system: Vec<String>,
    /// auto, uncertainty, membership, uniform or a path to a weights file.
    #[arg(long, global = true)]
    weights: Option<String>,
    /// none, auto or a category number.
    #[arg(long, global = true)]
    shelter: Option<String>,
    /// Level of the shelter likelihood ratio test.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, env = "CUBFUZZ_SEED")]
    seed: Option<u64>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of categories.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Indifference point.
    #[arg(long, global = true)]
    ip: Option<usize>,
    /// Lower crisp bound.
    #[arg(long, global = true)]
    lb: Option<usize>,
    /// Upper crisp bound.
    #[arg(long, global = true)]
    ub: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// CUB (and shelter) parameter estimates per item.
    Fit,
    /// Per-category membership, non-membership and hesitancy profiles.
    Fuzzy,
    /// Item weights, per-item aggregates and the composite indicator.
    Aggregate,
    /// Full pipeline: fit, fuzzy and aggregate outputs plus one JSON report.
    Report,
    /// Draw seeded ratings from a CUB model.
    Simulate(SimulateArgs),
    /// Normalized Hamming distance between two IFS files (mu, nu[, u] columns).
    Distance { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0.8)]
    pi: f64,
    #[arg(long, default_value_t = 0.2)]
    xi: f64,
    /// Shelter weight; needs --c.
    #[arg(long)]
    delta: Option<f64>,
    /// Shelter category.
    #[arg(long)]
    c: Option<usize>,
    /// Ratings per item.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Number of independent items (columns).
    #[arg(long, default_value_t = 1)]
    items: usize,
    /// Write one file per cell of pi in {0.2, 0.4, 0.6, 0.8} x xi in {0.1, 0.5, 0.8}.
    #[arg(long)]
    grid: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} computation(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Config file (or defaults) with command-line overrides applied.
fn build_config(c: &Common) -> Result<AnalysisConfig> {
    let mut config = match &c.config {
        Some(path) => AnalysisConfig::load(path)?,
        None => AnalysisConfig::default(),
    };
    if !c.system.is_empty() {
        config.systems = if c.system.iter().any(|s| s == "all") {
            AnalysisConfig::default().systems
        } else {
            c.system.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
        };
    }
    if let Some(w) = &c.weights {
        config.weights = WeightsSpec::from(w.clone());
    }
    if let Some(s) = &c.shelter {
        config.shelter = s.parse::<ShelterMode>()?;
    }
    if let Some(a) = c.alpha {
        config.alpha = a;
    }
    if let Some(s) = c.seed {
        config.seed = s;
    }
    if let Some(m) = c.m {
        if m != config.scale.m {
            // anchors from the file belong to the other scale length
            config.scale.ip = None;
            config.scale.lb = None;
            config.scale.ub = None;
        }
        config.scale.m = m;
    }
    config.scale.ip = c.ip.or(config.scale.ip);
    config.scale.lb = c.lb.or(config.scale.lb);
    config.scale.ub = c.ub.or(config.scale.ub);
    config.validate()?;
    Ok(config)
}

fn load_table(c: &Common, config: &AnalysisConfig) -> Result<RatingsTable> {
    let path = c.data.as_ref().context("--data is required")?;
    Ok(ingest_csv(path, &config.validate()?)?)
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<usize> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&cli.common, &args),
        Command::Distance { a, b } => cmd_distance(&cli.common, &a, &b),
        cmd => {
            let config = build_config(&cli.common)?;
            let table = load_table(&cli.common, &config)?;
            let out = Output::new(cli.common.out.clone())?;
            let stage = match cmd {
                Command::Fit => Stage::Fit,
                Command::Fuzzy => Stage::Fuzzy,
                Command::Aggregate => Stage::Aggregate,
                _ => Stage::Report,
            };
            cmd_pipeline(stage, &config, &table, &out)
        }
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Stage {
    Fit,
    Fuzzy,
    Aggregate,
    Report,
}

fn cmd_pipeline(stage: Stage, config: &AnalysisConfig, table: &RatingsTable, out: &Output) -> Result<usize> {
    let needs_fits = stage == Stage::Fit || config.systems.contains(&FuzzySystem::CubFuzzy);
    let fits = if needs_fits {
        run_fit(table, config)?
    } else {
        Vec::new()
    };
    let profiles = if stage >= Stage::Fuzzy {
        run_fuzzy(table, config, &fits)?
    } else {
        Vec::new()
    };
    let aggregates = if stage >= Stage::Aggregate {
        run_aggregate(table, config, &profiles)
    } else {
        Vec::new()
    };
    let report = RunReport {
        config: config.clone(),
        scale: config.validate()?,
        n_rows: table.n_rows(),
        fits,
        profiles,
        aggregates,
    };

    let fits_csv = fit_table(&report.fits);
    let profiles_csv = profile_table(&report.profiles);
    let aggregate_csv = aggregate_table(&report.aggregates);
    if !report.fits.is_empty() && matches!(stage, Stage::Fit | Stage::Report) {
        out.write("fit.csv", &fits_csv)?;
    }
    if stage == Stage::Fuzzy || stage == Stage::Report {
        out.write("profiles.csv", &profiles_csv)?;
    }
    if stage >= Stage::Aggregate {
        out.write("aggregate.csv", &aggregate_csv)?;
        for a in &report.aggregates {
            let per_respondent = match &a.result {
                Some(Aggregate::Intuitionistic(c)) => report::respondent_table(c),
                Some(Aggregate::Membership(c)) => report::respondent_membership_table(c),
                None => continue,
            };
            out.write(&format!("respondents_{}.csv", a.system.name()), &per_respondent)?;
        }
    }
    let name = match stage {
        Stage::Fit => "fit.json",
        Stage::Fuzzy => "fuzzy.json",
        Stage::Aggregate => "aggregate.json",
        Stage::Report => "report.json",
    };
    out.write(name, &report::to_json(&report))?;

    emit(match stage {
        Stage::Fit => &fits_csv,
        Stage::Fuzzy => &profiles_csv,
        _ => &aggregate_csv,
    })?;
    for o in &report.fits {
        if let Some(e) = &o.error {
            eprintln!("fit {}: {e}", o.item);
        }
    }
    for p in &report.profiles {
        for o in &p.items {
            if let Some(e) = &o.error {
                eprintln!("{} profile {}: {e}", p.system.name(), o.item);
            }
        }
    }
    for a in &report.aggregates {
        if let Some(e) = &a.error {
            eprintln!("{} aggregate: {e}", a.system.name());
        }
    }
    Ok(report.failures())
}

fn model_from(args: &SimulateArgs, pi: f64, xi: f64) -> Result<CubModel> {
    Ok(match (args.delta, args.c) {
        (None, None) => CubModel::Baseline(CubParams::new(pi, xi)?),
        (Some(delta), Some(c)) => CubModel::Shelter(ShelterParams::new(pi, xi, delta, c)?),
        _ => bail!("--delta and --c go together"),
    })
}

fn simulated_table(model: &CubModel, m: usize, args: &SimulateArgs, seed: u64) -> Result<RatingsTable> {
    if args.items == 0 {
        bail!("--items must be at least 1");
    }
    let samples = (0..args.items)
        .map(|j| simulate(model, m, args.n, seed.wrapping_add(j as u64)))
        .collect::<Result<Vec<RatingSample>, _>>()?;
    let names = (1..=args.items).map(|j| format!("item{j}")).collect();
    Ok(RatingsTable::from_samples(names, &samples)?)
}

fn table_csv(table: &RatingsTable) -> Result<String> {
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn cmd_simulate(common: &Common, args: &SimulateArgs) -> Result<usize> {
    let config = build_config(common)?;
    let m = config.scale.m;
    let seed = config.seed;
    if args.grid {
        let dir = common.out.clone().context("--grid needs --out")?;
        let out = Output::new(Some(dir))?;
        let mut k = 0u64;
        for pi in [0.2, 0.4, 0.6, 0.8] {
            for xi in [0.1, 0.5, 0.8] {
                let model = model_from(args, pi, xi)?;
                let table = simulated_table(&model, m, args, seed.wrapping_add(1000 * k))?;
                let name = format!("sim_pi{pi:.1}_xi{xi:.1}.csv");
                out.write(&name, &table_csv(&table)?)?;
                emit(&format!("{name}\n"))?;
                k += 1;
            }
        }
        return Ok(0);
    }
    let model = model_from(args, args.pi, args.xi)?;
    let csv = table_csv(&simulated_table(&model, m, args, seed)?)?;
    match &common.out {
        Some(dir) => Output::new(Some(dir.clone()))?.write("simulated.csv", &csv)?,
        None => emit(&csv)?,
    }
    Ok(0)
}

fn cmd_distance(common: &Common, a: &Path, b: &Path) -> Result<usize> {
    let read = |p: &Path| -> Result<_> {
        let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
        read_ifs_csv(f).with_context(|| format!("reading {}", p.display()))
    };
    let (x, y) = (read(a)?, read(b)?);
    let d = hamming_distance(&x, &y)?;
    let formula = "d_H = (1/(2n)) * sum_i (|mu_A - mu_B| + |nu_A - nu_B| + |u_A - u_B|)";
    emit(&format!("{formula}\nn = {}\nd_H = {}\n", x.len(), report::fmt(d)))?;
    let json = serde_json::json!({
        "a": a.display().to_string(),
        "b": b.display().to_string(),
        "n": x.len(),
        "formula": formula,
        "distance": d,
    });
    Output::new(common.out.clone())?.write("distance.json", &serde_json::to_string_pretty(&json)?)?;
    Ok(0)
}

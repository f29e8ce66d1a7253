use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use epiplan::rounding::RoundingPolicy;
use epiplan::scenario::{read_export, write_export, write_summary};
use epiplan::{
    load_config, simulate, ActionSpec, Error, InputBundle, InputPaths, MeasureKind, ScenarioStore,
    SimulationResult, StateSummary,
};

use crate::api::{router, AppState};

#[derive(Debug, Parser)]
#[command(
    name = "epiplan",
    version,
    about = "County-level epidemic scenario runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration and write the frame export and summary.
    Simulate(SimulateArgs),
    /// Branch a stored scenario at a day with new actions, then run it.
    Branch(BranchArgs),
    /// Print the statewide summary of an export or a stored scenario.
    Summary(SummaryArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// County attribute CSV.
    #[arg(long)]
    pub counties: PathBuf,
    /// Land adjacency edge CSV.
    #[arg(long)]
    pub adjacency: PathBuf,
    /// Air-route edge CSV. Without it, every pair of airport counties is linked.
    #[arg(long)]
    pub air: Option<PathBuf>,
    /// County GeoJSON, passed through to map clients.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
}

impl InputArgs {
    fn paths(&self) -> Result<InputPaths, Error> {
        Ok(InputPaths {
            counties: absolute(&self.counties)?,
            adjacency: absolute(&self.adjacency)?,
            air_routes: self.air.as_deref().map(absolute).transpose()?,
            geometry: self.geometry.as_deref().map(absolute).transpose()?,
        })
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model configuration JSON. Missing keys take defaults.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Output directory for frames.csv, summary.csv and config.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Switch to seeded stochastic rounding with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also register the scenario in a persistent store.
    #[arg(long)]
    pub store: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BranchArgs {
    /// Store directory holding the parent scenario.
    #[arg(long)]
    pub store: PathBuf,
    /// Parent scenario id.
    #[arg(long)]
    pub parent: String,
    /// Branch day. Earlier history is shared with the parent.
    #[arg(long)]
    pub day: u32,
    /// New action as KIND[:START[:REDUCTION[:RAMP_DAYS]]]; START defaults to
    /// the branch day. Repeatable.
    #[arg(long = "action", value_parser = parse_action)]
    pub actions: Vec<ActionSpec>,
    /// Output directory for the child's frames.csv and summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SummarySource {
    /// A frames.csv written by `simulate` or the export endpoint.
    #[arg(long)]
    pub export: Option<PathBuf>,
    /// A stored scenario, given as STORE_DIR:SCENARIO_ID.
    #[arg(long, value_name = "STORE_DIR:ID")]
    pub scenario: Option<String>,
}

#[derive(Debug, Args)]
pub struct SummaryArgs {
    #[command(flatten)]
    pub source: SummarySource,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Persist scenarios and results here. In-memory when omitted.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Default county CSV for scenarios created without inputs.
    #[arg(long, requires = "adjacency")]
    pub counties: Option<PathBuf>,
    /// Default land adjacency edge CSV.
    #[arg(long, requires = "counties")]
    pub adjacency: Option<PathBuf>,
    /// Default air-route edge CSV.
    #[arg(long, requires = "counties")]
    pub air: Option<PathBuf>,
    /// County GeoJSON served at /v1/inputs/geometry.
    #[arg(long, requires = "counties")]
    pub geometry: Option<PathBuf>,
}

/// Parses `KIND[:START[:REDUCTION[:RAMP_DAYS]]]`. A missing start is encoded
/// as `u32::MAX` and replaced by the branch day.
pub fn parse_action(s: &str) -> Result<ActionSpec, String> {
    let mut parts = s.split(':');
    let kind: MeasureKind = parts.next().unwrap_or_default().parse()?;
    let num = |p: Option<&str>, what: &str| -> Result<Option<f64>, String> {
        p.filter(|x| !x.is_empty())
            .map(|x| {
                x.parse::<f64>()
                    .map_err(|_| format!("invalid {what} {x:?}"))
            })
            .transpose()
    };
    let start = parts.next();
    let start_day = match start.filter(|x| !x.is_empty()) {
        Some(x) => x.parse().map_err(|_| format!("invalid start day {x:?}"))?,
        None => u32::MAX,
    };
    let reduction = num(parts.next(), "reduction")?;
    let ramp_days = num(parts.next(), "ramp days")?.map(|r| r as u32);
    if parts.next().is_some() {
        return Err("expected at most KIND:START:REDUCTION:RAMP_DAYS".into());
    }
    Ok(ActionSpec {
        kind,
        start_day,
        ramp_days,
        reduction,
    })
}

fn absolute(p: &Path) -> Result<PathBuf, Error> {
    std::path::absolute(p).map_err(|source| Error::Io {
        context: format!("resolving {}", p.display()),
        source,
    })
}

fn write_outputs(dir: &Path, result: &SimulationResult) -> Result<(), Error> {
    let io = |context: String| move |source| Error::Io { context, source };
    fs::create_dir_all(dir).map_err(io(format!("creating {}", dir.display())))?;
    let frames = dir.join("frames.csv");
    let file = fs::File::create(&frames).map_err(io(format!("creating {}", frames.display())))?;
    write_export(std::io::BufWriter::new(file), result)?;
    let summary = dir.join("summary.csv");
    let file = fs::File::create(&summary).map_err(io(format!("creating {}", summary.display())))?;
    write_summary(file, &result.summary())
}

pub fn print_summary(out: &mut impl Write, s: &StateSummary) -> std::io::Result<()> {
    let opt = |d: Option<u32>| d.map_or_else(|| "none".to_string(), |d| d.to_string());
    writeln!(out, "peak_sick_day: {}", s.peak_sick_day)?;
    writeln!(out, "peak_sick_count: {}", s.peak_sick_count)?;
    writeln!(out, "outbreak_duration: {}", s.outbreak_duration)?;
    writeln!(out, "first_case_day: {}", opt(s.first_case_day))?;
    writeln!(out, "last_active_day: {}", opt(s.last_active_day))?;
    writeln!(out, "total_sick: {}", s.total_sick)?;
    writeln!(out, "total_hospitalizations: {}", s.total_hospitalizations)?;
    writeln!(out, "total_deaths: {}", s.total_deaths)
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        context: "writing to stdout".into(),
        source,
    }
}

pub fn run_simulate(args: SimulateArgs) -> Result<(), Error> {
    let mut config = load_config(&args.config)?.config;
    if let Some(seed) = args.seed {
        config.rounding = RoundingPolicy::Stochastic;
        config.rng_seed = seed;
    }
    let paths = args.inputs.paths()?;
    let bundle = InputBundle::load(&paths)?;
    let mut out = std::io::stdout().lock();

    let result = match &args.store {
        Some(dir) => {
            let store = ScenarioStore::open(dir)?;
            let scenario = store.create(config.clone(), Some(paths))?;
            writeln!(out, "scenario: {}", scenario.id).map_err(stdout_err)?;
            let outcome = store.run(&scenario.id, |s| bundle.network(s.config.spread))?;
            Arc::unwrap_or_clone(outcome.result)
        }
        None => simulate("cli", &config, &bundle.network(config.spread)?)?,
    };
    write_outputs(&args.out, &result)?;
    let json = serde_json::to_vec_pretty(&config).map_err(|source| Error::Json {
        context: "serializing config".into(),
        source,
    })?;
    let cfg_path = args.out.join("config.json");
    fs::write(&cfg_path, json).map_err(|source| Error::Io {
        context: format!("writing {}", cfg_path.display()),
        source,
    })?;
    print_summary(&mut out, &result.summary()).map_err(stdout_err)
}

pub fn run_branch(args: BranchArgs) -> Result<(), Error> {
    let store = ScenarioStore::open(&args.store)?;
    let actions: Vec<ActionSpec> = args
        .actions
        .into_iter()
        .map(|mut a| {
            if a.start_day == u32::MAX {
                a.start_day = args.day;
            }
            a
        })
        .collect();
    let child = store.branch(&args.parent, args.day, &actions)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "scenario: {}", child.id).map_err(stdout_err)?;
    let outcome = store.run(&child.id, |s| {
        let paths = s
            .inputs
            .as_ref()
            .ok_or_else(|| Error::Network(format!("{} has no inputs", s.id)))?;
        InputBundle::load(paths)?.network(s.config.spread)
    })?;
    if let Some(dir) = &args.out {
        write_outputs(dir, &outcome.result)?;
    }
    print_summary(&mut out, &outcome.result.summary()).map_err(stdout_err)
}

pub fn run_summary(args: SummaryArgs) -> Result<(), Error> {
    let summary = match (args.source.export, args.source.scenario) {
        (Some(path), _) => {
            let file = fs::File::open(&path).map_err(|source| Error::Io {
                context: format!("opening {}", path.display()),
                source,
            })?;
            read_export(std::io::BufReader::new(file), &path)?.summary()
        }
        (None, Some(target)) => {
            let (dir, id) = target
                .rsplit_once(':')
                .ok_or_else(|| Error::UnknownScenario(target.clone()))?;
            ScenarioStore::open(dir)?.result(id)?.summary()
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    print_summary(&mut std::io::stdout().lock(), &summary).map_err(stdout_err)
}

pub async fn run_serve(args: ServeArgs) -> Result<(), Error> {
    let store = match &args.store {
        Some(dir) => ScenarioStore::open(dir)?,
        None => ScenarioStore::in_memory(),
    };
    let defaults = match (&args.counties, &args.adjacency) {
        (Some(c), Some(a)) => Some(
            InputArgs {
                counties: c.clone(),
                adjacency: a.clone(),
                air: args.air.clone(),
                geometry: args.geometry.clone(),
            }
            .paths()?,
        ),
        _ => None,
    };
    let state = AppState::new(Arc::new(store), defaults.clone());
    if let Some(paths) = &defaults {
        // Fail fast on bad inputs rather than on the first request.
        state.bundle(paths)?;
    }
    let io = |context: &str| {
        let context = context.to_string();
        move |source| Error::Io { context, source }
    };
    let addr = format!("{}:{}", args.host, args.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(io(&format!("binding {addr}")))?;
    let local: SocketAddr = listener.local_addr().map_err(io("reading local address"))?;
    {
        let mut out = std::io::stdout().lock();
        writeln!(out, "listening on http://{local}").map_err(stdout_err)?;
        out.flush().map_err(stdout_err)?;
    }
    axum::serve(listener, router(state))
        .await
        .map_err(io("serving"))
}

/// Prints an error and its per-field or per-line diagnostics to stderr.
pub fn report(err: &Error) {
    let mut e = std::io::stderr().lock();
    match err {
        Error::Validation(v) => {
            let _ = writeln!(e, "error: invalid configuration");
            for f in &v.0 {
                let _ = writeln!(e, "  {}: {}", f.field, f.message);
            }
        }
        Error::Input { path, diagnostics } => {
            let _ = writeln!(
                e,
                "error: {} has {} problem(s)",
                path.display(),
                diagnostics.len()
            );
            for d in diagnostics {
                let _ = writeln!(e, "  line {}: {}", d.line, d.message);
            }
        }
        other => {
            let _ = writeln!(e, "error: {other}");
        }
    }
}

//! `drf`: command-line driver for discrete Ricci flow runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use drf_core::curvature::ricci_in;
use drf_core::embed::embed_meridian;
use drf_core::flow::{evolve, Event, FlowConfig, LobeSummary, DEFAULT_PINCH_THRESHOLD};
use drf_core::forman::{correspondence_export, forman_all, WeightedGraph};
use drf_core::geometry::DualScheme;
use drf_core::io;
use drf_core::lattice::EndTreatment;
use drf_core::profiles::{build_lattice, ProfileKind, ProfileSpec, RadiusConvention};
use drf_core::remesh::resample;
use drf_core::surgery::SurgeryMethod;
use drf_core::Error;

#[derive(Debug, Parser)]
#[command(name = "drf", version, about = "Discrete Ricci flow on axisymmetric icosahedral lattices")]
struct Cli {
    /// Worker threads for curvature assembly and lobe evolution. Outputs do
    /// not depend on this. [default: all cores]
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an initial lattice from a named profile.
    Init(InitArgs),
    /// Evolve a lattice through surgery to extinction and write a run directory.
    Evolve(EvolveArgs),
    /// Per-class curvature table of a lattice.
    Curvature(CurvatureArgs),
    /// Refit a lattice onto a different number of sections.
    Resample(ResampleArgs),
    /// Meridian polyline of the vertex rings in the (z, rho) half-plane.
    Embed(EmbedArgs),
    /// Forman-Ricci curvature of every edge of a weighted graph.
    Forman(FormanArgs),
    /// Lattice-side Forman weights and the induced Forman values.
    Correspond(CorrespondArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileName {
    /// Lopsided dumbbell with a neck near section 45 of 80.
    Paper,
    /// Round 3-sphere of radius --r0.
    Sphere,
    /// Uniform cylinder with section --s and spacing --a.
    Cylinder,
    /// Spline through the (x, s) rows of --table.
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EndsArg {
    Cap,
    Mirror,
}

impl From<EndsArg> for EndTreatment {
    fn from(e: EndsArg) -> Self {
        match e {
            EndsArg::Cap => EndTreatment::Cap,
            EndsArg::Mirror => EndTreatment::Mirror,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DualsArg {
    Barycentric,
    Circumcentric,
}

impl From<DualsArg> for DualScheme {
    fn from(d: DualsArg) -> Self {
        match d {
            DualsArg::Barycentric => DualScheme::Barycentric,
            DualsArg::Circumcentric => DualScheme::Circumcentric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Icosacap,
    Sphericalcap,
}

impl From<MethodArg> for SurgeryMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Icosacap => SurgeryMethod::IcosaCap,
            MethodArg::Sphericalcap => SurgeryMethod::SphericalCap,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RadiusArg {
    Circumradius,
    Area,
}

impl From<RadiusArg> for RadiusConvention {
    fn from(r: RadiusArg) -> Self {
        match r {
            RadiusArg::Circumradius => RadiusConvention::Circumradius,
            RadiusArg::Area => RadiusConvention::Area,
        }
    }
}

#[derive(Debug, Args)]
struct InitArgs {
    #[arg(long, value_enum, default_value = "paper")]
    profile: ProfileName,
    /// Number of sections.
    #[arg(long, default_value_t = 80)]
    n: usize,
    /// Sphere radius.
    #[arg(long, default_value_t = 30.0)]
    r0: f64,
    /// Cylinder section length.
    #[arg(long, default_value_t = 10.0)]
    s: f64,
    /// Cylinder axial spacing.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// CSV of `x,s` rows (header and `#` lines skipped) for --profile table.
    #[arg(long, required_if_eq("profile", "table"))]
    table: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cap")]
    ends: EndsArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Input lattice JSON.
    #[arg(short, long)]
    input: PathBuf,
    /// Run directory (created if missing).
    #[arg(short, long)]
    output: PathBuf,
    /// JSON file with any subset of the flow settings (same names as the
    /// flags, with underscores). Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Time step. [default: 0.25]
    #[arg(long)]
    dt: Option<f64>,
    /// Steps between spline remeshes. [default: 50]
    #[arg(long)]
    remesh_every: Option<usize>,
    /// Stop each lobe at this time. [default: 2000]
    #[arg(long)]
    t_max: Option<f64>,
    /// Stop each lobe after this many global steps. [default: 20000]
    #[arg(long)]
    step_max: Option<usize>,
    #[arg(long, help = surgery_help())]
    surgery_threshold: Option<f64>,
    /// A lobe is extinct once every section is at most this long. [default: 1.0]
    #[arg(long)]
    extinction_threshold: Option<f64>,
    /// Snapshot every this many steps; 0 keeps only lobe boundaries. [default: 100]
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Capping of cut ends after surgery. [default: icosacap]
    #[arg(long, value_enum)]
    surgery_method: Option<MethodArg>,
    /// Dual cell construction. [default: barycentric]
    #[arg(long, value_enum)]
    duals: Option<DualsArg>,
    /// Section-to-radius factor used for rho in the series. [default: circumradius]
    #[arg(long, value_enum)]
    radius: Option<RadiusArg>,
    /// Let remeshing drop sections to keep the axial spacing at least this
    /// long. [default: off]
    #[arg(long)]
    min_axial: Option<f64>,
}

fn surgery_help() -> String {
    format!(
        "Surgery when the narrowest interior section is at most this long. \
         [default: {DEFAULT_PINCH_THRESHOLD}, calibrated on the default dumbbell at n = 80, \
         dt = 0.25, remesh every 50 so that the neck is cut at t = 206.5 with the \
         pinch-rate monitor inside [0.5, 3]; see crates/core/examples/calibrate.rs]"
    )
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "barycentric")]
    duals: DualsArg,
}

#[derive(Debug, Args)]
struct ResampleArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// New section count. [default: unchanged]
    #[arg(long)]
    n: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FormanArgs {
    /// Graph JSON: {"nodes": [{"id", "w"}], "edges": [{"u", "v", "w"}]}.
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorrespondArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "barycentric")]
    duals: DualsArg,
}

#[derive(Serialize)]
struct ErrorReport {
    error: &'static str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Realizability { .. } => "realizability",
        Error::NonPositiveLength { .. } => "non_positive_length",
        Error::DegenerateCap { .. } => "degenerate_cap",
        Error::NonPositiveDual { .. } => "non_positive_dual",
        Error::NotIncident { .. } => "not_incident",
        Error::NonMonotoneKnots { .. } => "non_monotone_knots",
        Error::NoValidCircle { .. } => "no_valid_circle",
        Error::ZeroEdgeWeight { .. } => "zero_edge_weight",
        Error::InvalidInput(_) => "invalid_input",
        Error::Io { .. } => "io",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = ErrorReport {
                error: error_kind(&e),
                message: e.to_string(),
            };
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            ExitCode::from(1)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => io::write_file(path, text),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                }),
                _ => Ok(()),
            }
        }
    }
}

fn read_lattice(path: &Path) -> Result<io::LatticeFile, Error> {
    io::lattice_from_json(&io::read_file(path)?)
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let text = io::read_file(path)?;
    let bad = |line: usize, m: String| Error::InvalidInput(format!("{}:{line}: {m}", path.display()));
    let (mut x, mut s) = (Vec::new(), Vec::new());
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(bad(k + 1, format!("expected 2 columns, found {}", cols.len())));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                x.push(a);
                s.push(b);
            }
            _ if x.is_empty() => continue,
            _ => return Err(bad(k + 1, format!("not a number pair: {line}"))),
        }
    }
    Ok((x, s))
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Init(args) => {
            let spec = match args.profile {
                ProfileName::Paper => ProfileSpec::paper(args.n),
                ProfileName::Sphere => ProfileSpec::round_sphere(args.r0, args.n),
                ProfileName::Cylinder => ProfileSpec::cylinder(args.s, args.a, args.n),
                ProfileName::Table => {
                    let path = args.table.as_deref().expect("clap requires --table");
                    let (x, s) = read_table(path)?;
                    ProfileSpec {
                        kind: ProfileKind::Table { x, s },
                        n: args.n,
                        end_treatment: EndTreatment::default(),
                    }
                }
            }
            .with_ends(args.ends.into());
            let lattice = build_lattice(&spec)?;
            emit(args.output.as_deref(), &io::lattice_to_json(&lattice, 0.0))
        }
        Command::Evolve(args) => run_evolve(args, cli.threads),
        Command::Curvature(args) => {
            let file = read_lattice(&args.input)?;
            let field = ricci_in(&file.lattice, args.duals.into())?;
            emit(args.output.as_deref(), &io::curvature_csv(&field))
        }
        Command::Resample(args) => {
            let file = read_lattice(&args.input)?;
            let n = args.n.unwrap_or(file.lattice.n());
            let out = resample(&file.lattice, n)?;
            emit(args.output.as_deref(), &io::lattice_to_json(&out, file.t))
        }
        Command::Embed(args) => {
            let file = read_lattice(&args.input)?;
            emit(args.output.as_deref(), &io::meridian_csv(&embed_meridian(&file.lattice)))
        }
        Command::Forman(args) => {
            let graph = WeightedGraph::from_json(&io::read_file(&args.graph)?)?;
            let values = forman_all(&graph)?;
            emit(args.output.as_deref(), &io::forman_csv(&graph, &values))
        }
        Command::Correspond(args) => {
            let file = read_lattice(&args.input)?;
            let rows = correspondence_export(&file.lattice, args.duals.into())?;
            emit(args.output.as_deref(), &io::correspondence_csv(&rows))
        }
    }
}

fn flow_config(args: &EvolveArgs) -> Result<FlowConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&io::read_file(path)?)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?,
        None => FlowConfig::default(),
    };
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.remesh_every {
        cfg.remesh_every = v;
    }
    if let Some(v) = args.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = args.step_max {
        cfg.step_max = v;
    }
    if let Some(v) = args.surgery_threshold {
        cfg.surgery_threshold = v;
    }
    if let Some(v) = args.extinction_threshold {
        cfg.extinction_threshold = v;
    }
    if let Some(v) = args.snapshot_every {
        cfg.snapshot_every = v;
    }
    if let Some(v) = args.surgery_method {
        cfg.surgery_method = v.into();
    }
    if let Some(v) = args.duals {
        cfg.duals = v.into();
    }
    if let Some(v) = args.radius {
        cfg.radius = v.into();
    }
    if args.min_axial.is_some() {
        cfg.min_axial = args.min_axial;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct EventCounts {
    remesh: usize,
    surgery: usize,
    extinction: usize,
    stop: usize,
    warning: usize,
    abort: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: u32,
    tool: &'static str,
    version: &'static str,
    input: String,
    input_sha256: String,
    config: &'a FlowConfig,
    threads: Option<usize>,
    started_unix: f64,
    finished_unix: f64,
    events: EventCounts,
    lobes: &'a [LobeSummary],
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn count_events(events: &[Event]) -> EventCounts {
    let mut c = EventCounts {
        remesh: 0,
        surgery: 0,
        extinction: 0,
        stop: 0,
        warning: 0,
        abort: 0,
    };
    for e in events {
        match e {
            Event::Remesh { .. } => c.remesh += 1,
            Event::Surgery { .. } => c.surgery += 1,
            Event::Extinction { .. } => c.extinction += 1,
            Event::Stop { .. } => c.stop += 1,
            Event::Warning { .. } => c.warning += 1,
            Event::Abort { .. } => c.abort += 1,
        }
    }
    c
}

fn run_evolve(args: &EvolveArgs, threads: Option<usize>) -> Result<(), Error> {
    let started = unix_now();
    let cfg = flow_config(args)?;
    let raw = fs::read(&args.input).map_err(|e| Error::Io {
        path: args.input.display().to_string(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| Error::InvalidInput(format!("{} is not UTF-8", args.input.display())))?;
    let file = io::lattice_from_json(&text)?;
    let result = evolve(&file.lattice, &cfg)?;
    io::write_run(&args.output, &result)?;

    for e in &result.events {
        if let Event::Abort { lobe, t, error, .. } = e {
            eprintln!("lobe {lobe} stopped at t = {t}: {error}");
        }
    }

    let manifest = Manifest {
        format: io::FORMAT_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input: args.input.display().to_string(),
        input_sha256: hex::encode(Sha256::digest(&raw)),
        config: &cfg,
        threads,
        started_unix: started,
        finished_unix: unix_now(),
        events: count_events(&result.events),
        lobes: &result.lobes,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    let tmp = args.output.join("manifest.json.tmp");
    io::write_file(&tmp, &json)?;
    let dest = args.output.join("manifest.json");
    fs::rename(&tmp, &dest).map_err(|e| Error::Io {
        path: dest.display().to_string(),
        message: e.to_string(),
    })
}

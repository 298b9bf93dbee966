//! `optics2d`: build scenes, trace them, run sweeps, draw figures and serve
//! the HTTP API.
//!
//! Exit status is 0 on success, 1 when an input is invalid and 2 on a usage
//! error. Results go only to the files named on the command line; messages
//! go to standard error.

use std::fmt::Display;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use optics2d::export::{scatter_csv, sweep_csv, sweep_svg, to_svg, visibility_csv, StyleMap};
use optics2d::format::{paths_from_json, paths_to_json, scene_from_json, scene_to_json};
use optics2d::optics::{IndexModel, Material};
use optics2d::scenarios::registry::{describe_scenario, instantiate, InstantiateError, SCENARIO_NAMES};
use optics2d::scenarios::{
    default_eye, oceanarium, pendant, pendant_scatter, spread_sweep, visibility_cutoff, OceanariumParams,
    PendantParams, RegularPrismParams,
};
use optics2d::tracer::{Tracer, DEFAULT_MAX_EVENTS};
use optics2d::SceneDoc;
use serde_json::{Map, Value};

/// Environment variable that sets the event limit when `--max-events` is
/// not given.
const MAX_EVENTS_ENV: &str = "OPTICS_MAX_EVENTS";

#[derive(Parser)]
#[command(name = "optics2d", version, about = "Deterministic 2D ray tracing through glass, water and air")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named scenario: `scenario <name> [--param value]... --out scene.json`.
    #[command(disable_help_flag = true)]
    Scenario {
        name: String,
        /// Parameters as `--name value` pairs, and `--out FILE`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Trace every source of a scene.
    Trace {
        #[arg(long)]
        scene: PathBuf,
        /// Event limit per ray; defaults to $OPTICS_MAX_EVENTS, then 64.
        #[arg(long)]
        max_events: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also draw the scene and its paths.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sweep an angle and tabulate the result as CSV.
    #[command(subcommand)]
    Sweep(Sweep),
    /// Draw a scene and traced paths.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        paths: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of static files served for every other path.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Sweep {
    /// Colours leaving a prism against incidence on its first face.
    PrismSpread(PrismSpread),
    /// Underwater visibility limit for several wall indices.
    Visibility(Visibility),
    /// Exit faces and directions of a pendant against its rotation.
    PendantScatter(PendantScatter),
}

#[derive(Args)]
struct PrismSpread {
    /// One of air, water, window, crown, flint.
    #[arg(long, default_value = "crown")]
    material: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// First incidence, degrees.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    from: f64,
    /// Last incidence, degrees.
    #[arg(long, default_value_t = 85.0, allow_negative_numbers = true)]
    to: f64,
    /// Step, degrees.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also chart the spread against incidence.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct Visibility {
    /// Wall indices, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.4,1.5,1.6,1.7")]
    glass_n: Vec<f64>,
    #[arg(long, default_value_t = 1.33)]
    water_n: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PendantScatter {
    #[arg(long, default_value = "flint")]
    material: String,
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Height of the ray in circumradii.
    #[arg(long, default_value_t = optics2d::scenarios::DEFAULT_PENDANT_OFFSET, allow_negative_numbers = true)]
    offset: f64,
    /// First orientation, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    from: f64,
    /// Last orientation, degrees.
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    to: f64,
    /// Step, degrees.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also draw the pendant at the orientation of widest scatter.
    #[arg(long)]
    svg: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Invalid(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn usage(message: impl Display) -> Failure {
    Failure::Usage(message.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            eprintln!("run `optics2d --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Scenario { name, args } => scenario(&name, &args),
        Command::Trace {
            scene,
            max_events,
            out,
            svg,
        } => trace(&scene, max_events, &out, svg.as_deref()),
        Command::Sweep(Sweep::PrismSpread(a)) => prism_spread(a),
        Command::Sweep(Sweep::Visibility(a)) => visibility(a),
        Command::Sweep(Sweep::PendantScatter(a)) => scatter(a),
        Command::Render { scene, paths, out } => {
            let scene = read_scene(&scene)?;
            let text = read(&paths)?;
            let paths = paths_from_json(&text).with_context(|| format!("reading {}", paths.display()))?;
            write(&out, &to_svg(&scene, &paths, &StyleMap::default()))?;
            Ok(())
        }
        Command::Serve { port, host, static_dir } => serve(SocketAddr::new(host, port), static_dir),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_scene(path: &Path) -> anyhow::Result<SceneDoc> {
    let scene = scene_from_json(&read(path)?).with_context(|| format!("reading {}", path.display()))?;
    if let Err(violations) = scene.validate() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(anyhow!("{} is not a valid scene:\n{}", path.display(), lines.join("\n")));
    }
    Ok(scene)
}

/// A command-line value as JSON: numbers stay numbers, anything else is a
/// string.
fn param_value(text: &str) -> Value {
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::from(text),
    }
}

fn scenario(name: &str, args: &[String]) -> Result<(), Failure> {
    let desc = describe_scenario(name).ok_or_else(|| {
        usage(format!(
            "unknown scenario {name:?}; expected one of {}",
            SCENARIO_NAMES.join(", ")
        ))
    })?;
    if args.iter().any(|a| a == "--help" || a == "-h") {
        eprintln!("{}: {}\n\nparameters:", desc.name, desc.description);
        for p in &desc.parameters {
            eprintln!("  --{:<16} {} (default {})", p.name, p.description, p.default);
        }
        eprintln!("  --{:<16} output file (required)", "out");
        return Ok(());
    }
    let mut params = Map::new();
    let mut out = None;
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| usage(format!("expected --name value, found {flag:?}")))?;
        let value = it.next().ok_or_else(|| usage(format!("--{key} needs a value")))?;
        if key == "out" {
            out = Some(PathBuf::from(value));
        } else if params.insert(key.to_string(), param_value(value)).is_some() {
            return Err(usage(format!("--{key} given twice")));
        }
    }
    let out = out.ok_or_else(|| usage("scenario needs --out FILE"))?;
    let scene = instantiate(name, &params).map_err(|e| match e {
        InstantiateError::InvalidParameters(fields) => {
            let lines: Vec<String> = fields.iter().map(|(k, v)| format!("  --{k}: {v}")).collect();
            Failure::Invalid(anyhow!("invalid parameters:\n{}", lines.join("\n")))
        }
        other => usage(other),
    })?;
    write(&out, &scene_to_json(&scene))?;
    Ok(())
}

fn max_events(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(MAX_EVENTS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{MAX_EVENTS_ENV}={v:?} is not a count"))),
        Err(_) => Ok(DEFAULT_MAX_EVENTS),
    }
}

fn trace(scene_path: &Path, flag: Option<usize>, out: &Path, svg: Option<&Path>) -> Result<(), Failure> {
    let limit = max_events(flag)?;
    let scene = read_scene(scene_path)?;
    let tracer = Tracer::new(&scene).map_err(anyhow::Error::from)?;
    let paths = tracer.trace_all(limit).map_err(anyhow::Error::from)?;
    write(out, &paths_to_json(&paths))?;
    if let Some(svg) = svg {
        write(svg, &to_svg(&scene, &paths, &StyleMap::default()))?;
    }
    Ok(())
}

fn material(key: &str) -> Result<Material, Failure> {
    Material::from_key(key).ok_or_else(|| {
        let keys: Vec<&str> = Material::ALL.iter().map(|m| m.key()).collect();
        usage(format!("unknown material {key:?}; expected one of {}", keys.join(", ")))
    })
}

fn prism_spread(a: PrismSpread) -> Result<(), Failure> {
    let prism = RegularPrismParams {
        sides: a.k,
        material: material(&a.material)?.medium(),
        ..Default::default()
    };
    let sweep = spread_sweep(&prism, a.from.to_radians(), a.to.to_radians(), a.step.to_radians())
        .map_err(anyhow::Error::from)?;
    write(&a.out, &sweep_csv(&sweep))?;
    if let Some(svg) = a.svg {
        write(&svg, &sweep_svg(&sweep, &StyleMap::default()))?;
    }
    Ok(())
}

fn visibility(a: Visibility) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for &n in &a.glass_n {
        let scene = oceanarium(&OceanariumParams {
            glass: IndexModel::Constant { n },
            water: IndexModel::Constant { n: a.water_n },
            ..Default::default()
        })
        .map_err(anyhow::Error::from)?;
        let eye = default_eye(&scene).map_err(anyhow::Error::from)?;
        rows.push((n, visibility_cutoff(&scene, eye).map_err(anyhow::Error::from)?));
    }
    write(&a.out, &visibility_csv(&rows))?;
    Ok(())
}

fn scatter(a: PendantScatter) -> Result<(), Failure> {
    let params = PendantParams {
        sides: a.k,
        material: material(&a.material)?.medium(),
        offset: a.offset,
        ..Default::default()
    };
    let sweep = pendant_scatter(&params, a.from.to_radians(), a.to.to_radians(), a.step.to_radians())
        .map_err(anyhow::Error::from)?;
    write(&a.out, &scatter_csv(&sweep))?;
    match sweep.best_row() {
        Some(best) => eprintln!(
            "widest scatter {:.3}° at orientation {:.3}°",
            best.separation.unwrap_or_default().to_degrees(),
            best.orientation.to_degrees()
        ),
        None => eprintln!("no orientation scatters the colours by more than 30°"),
    }
    if let Some(svg) = a.svg {
        let orientation = sweep.best_row().map_or(a.from.to_radians(), |r| r.orientation);
        let scene = pendant(&PendantParams { orientation, ..params }).map_err(anyhow::Error::from)?;
        let paths = Tracer::new(&scene)
            .and_then(|t| t.trace_all(DEFAULT_MAX_EVENTS))
            .map_err(anyhow::Error::from)?;
        write(&svg, &to_svg(&scene, &paths, &StyleMap::default()))?;
    }
    Ok(())
}

fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> Result<(), Failure> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime
        .block_on(optics2d_service::serve(addr, static_dir))
        .with_context(|| format!("serving on {addr}"))?;
    Ok(())
}

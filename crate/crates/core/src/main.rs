use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scalneck::assembly::{TunnelEnd, TunnelParams};
use scalneck::certify::{
    emit_certificate, main_b_stand_in, pipeline_cor_d, pipeline_cor_t, pipeline_cor_v, pipeline_main_a, recheck_file,
    surgery_certificate, tunnel_certificate, verify_main_b_budget, IngredientMetric, PipelineOptions, PipelineRun,
};
use scalneck::metric::model::AmbientModel;
use scalneck::metric::profile::GridSpec;
use scalneck::{NeckError, Result};

/// Build scalar-curvature-controlled tunnels, surgeries and glued manifolds,
/// and emit or recheck their certificates.
#[derive(Parser, Debug)]
#[command(name = "scalneck", version)]
struct Cli {
    /// Grid nodes per unit arc-length.
    #[arg(long, global = true)]
    grid_density: Option<f64>,
    /// Seed recorded in certificate provenance.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Strict-inequality margin (never below 1e-9).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// key = value file supplying defaults; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tunnel between two round balls of scalar curvature kappa.
    BuildTunnel(TunnelArgs),
    /// Surgery on the core sphere of a model manifold.
    Surgery(SurgeryArgs),
    /// One of the end-to-end pipelines.
    Pipeline(PipelineArgs),
    /// Recheck every claim and the digest of a certificate file.
    Recheck { file: PathBuf },
}

#[derive(Args, Debug)]
struct Output {
    /// Certificate destination; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-piece profile CSVs and the assembly descriptor.
    #[arg(long)]
    profiles_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TunnelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Length d of the straight cylinder.
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    j: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Body {
    /// S^p(1) x S^q(1).
    Product,
    /// S^n(1); surgery on a point.
    Round,
    /// S^n(1) around a great S^p.
    GreatSphere,
}

impl FromStr for Body {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Body as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug)]
struct SurgeryArgs {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    body: Option<Body>,
    /// Recorded only.
    #[arg(long)]
    j: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    MainA,
    CorD,
    CorT,
    CorV,
    MainBBudget,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(value_enum)]
    which: Which,
    #[arg(long)]
    n: Option<usize>,
    /// Diameter target D.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Volume target V.
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Warp-profile JSON for M (main-a); defaults to the round S^n(1/2).
    #[arg(long)]
    ingredient: Option<PathBuf>,
    /// Warp-profile JSON for the hemisphere; trusted as supplied in main-b-budget.
    #[arg(long)]
    hemisphere: Option<PathBuf>,
    /// main-b-budget: use the round stand-in when no hemisphere file is given.
    #[arg(long)]
    stand_in: bool,
    #[command(flatten)]
    output: Output,
}

/// Values from the config file, looked up after the command line.
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)?;
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    NeckError::InvalidParameter(format!("{}:{}: expected key = value", p.display(), i + 1))
                })?;
                map.insert(k.trim().replace('_', "-"), v.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| NeckError::InvalidParameter(format!("config value {key} = {s} does not parse"))),
            None => Ok(default),
        }
    }

    fn maybe<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0
            .get(key)
            .map(|s| {
                s.parse()
                    .map_err(|_| NeckError::InvalidParameter(format!("config value {key} = {s} does not parse")))
            })
            .transpose()
    }

    fn output(&self, o: &Output) -> Result<(Option<PathBuf>, Option<PathBuf>)> {
        Ok((
            self.maybe("out", o.out.clone())?,
            self.maybe("profiles-dir", o.profiles_dir.clone())?,
        ))
    }
}

fn write_run(run: &PipelineRun, out: Option<&Path>, profiles: Option<&Path>) -> Result<()> {
    let cert = &run.certificate;
    match out {
        Some(path) => emit_certificate(cert, path)?,
        None => println!("{}", cert.to_canonical_json()),
    }
    if let Some(dir) = profiles {
        run.assembly.export_profiles(dir)?;
        let reference = out.map(|p| p.display().to_string());
        std::fs::write(dir.join("assembly.json"), run.assembly.to_json(reference.as_deref()))?;
    }
    eprintln!(
        "pipeline {}: global min R = {:.9e}, floor = {:.9e}",
        cert.pipeline, cert.global_min_r, cert.floor
    );
    for c in &cert.claims {
        eprintln!(
            "  [{:<12}] {:<28} {:.9e} {} {:.9e}",
            format!("{:?}", c.status).to_uppercase(),
            c.name,
            c.lhs,
            serde_json::to_value(c.relation).unwrap().as_str().unwrap_or("?"),
            c.rhs
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = Config::load(cli.config.as_deref())?;
    let defaults = PipelineOptions::default();
    let opts = PipelineOptions {
        grid: GridSpec {
            density: cfg.get("grid-density", cli.grid_density, defaults.grid.density)?,
            ..defaults.grid
        },
        seed: cfg.get("seed", cli.seed, defaults.seed)?,
        strict_margin: cfg.get("tolerance", cli.tolerance, defaults.strict_margin)?,
    };
    let run = match cli.command {
        Command::Recheck { file } => {
            let rep = recheck_file(&file)?;
            println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
            return Ok(rep.passed());
        }
        Command::BuildTunnel(a) => {
            let n = cfg.get("n", a.n, 3)?;
            let kappa = cfg.get("kappa", a.kappa, (n * (n - 1)) as f64)?;
            let delta = cfg.get("delta", a.delta, 0.1)?;
            let end = TunnelEnd::round(n, kappa, delta)?;
            let params = TunnelParams {
                left: end,
                right: end,
                d: cfg.get("length", a.length, 2.0)?,
                j: cfg.get("j", a.j, 100.0)?,
                grid: opts.grid,
            };
            let r = tunnel_certificate(&params, &opts)?;
            let (out, prof) = cfg.output(&a.output)?;
            write_run(&r, out.as_deref(), prof.as_deref())?;
            r
        }
        Command::Surgery(a) => {
            let p = cfg.get("p", a.p, 1)?;
            let q = cfg.get("q", a.q, 3)?;
            let model = match cfg.get("body", a.body, Body::Product)? {
                Body::Product => AmbientModel::product_of_rounds(p, q, 1.0, 1.0),
                Body::Round => AmbientModel::round_sphere(p + q, 1.0),
                Body::GreatSphere => AmbientModel::great_sphere_tube(p, q, 1.0),
            };
            let delta = cfg.get("delta", a.delta, 0.05)?;
            let r = surgery_certificate(&model, delta, cfg.get("j", a.j, 1.0)?, &opts)?;
            let (out, prof) = cfg.output(&a.output)?;
            write_run(&r, out.as_deref(), prof.as_deref())?;
            r
        }
        Command::Pipeline(a) => {
            let n = cfg.get("n", a.n, 3)?;
            let j = cfg.get("j", a.j, 100.0)?;
            let r = match a.which {
                Which::MainA => {
                    let m = match cfg.maybe("ingredient", a.ingredient.clone())? {
                        Some(path) => IngredientMetric::load_external(&path, false)?,
                        None => IngredientMetric::round_sphere(n, 0.5),
                    };
                    let h = cfg
                        .maybe("hemisphere", a.hemisphere.clone())?
                        .map(|path| IngredientMetric::load_external(&path, false))
                        .transpose()?;
                    let d = cfg.get("d", a.d, 10.0)?;
                    pipeline_main_a(&m, h.as_ref(), d, n, j, cfg.get("delta", a.delta, 0.1)?, &opts)?
                }
                Which::CorD => pipeline_cor_d(n, cfg.get("d", a.d, 10.0)?, j, cfg.get("delta", a.delta, 0.1)?, &opts)?,
                Which::CorT => {
                    let p = cfg.get("p", a.p, 1)?;
                    let q = cfg.get("q", a.q, 2)?;
                    pipeline_cor_t(p, q, j, cfg.get("delta", a.delta, 0.1)?, &opts)?
                }
                Which::CorV => {
                    let v = cfg.get("v", a.v, 6.0 * std::f64::consts::PI.powi(2))?;
                    pipeline_cor_v(v, n, j, cfg.get("delta", a.delta, 0.1)?, &opts)?
                }
                Which::MainBBudget => {
                    let eps = cfg.get("epsilon", a.epsilon, 0.05)?;
                    let stand_in = a.stand_in || cfg.get("stand-in", None, false)?;
                    let h = match cfg.maybe("hemisphere", a.hemisphere.clone())? {
                        Some(path) => Some(IngredientMetric::load_external(&path, true)?),
                        None if stand_in => Some(main_b_stand_in(n, eps)),
                        None => None,
                    };
                    let d = cfg.get("d", a.d, 10.0)?;
                    verify_main_b_budget(h.as_ref(), eps, d, n, cfg.maybe("delta", a.delta)?, j, &opts)?
                }
            };
            let (out, prof) = cfg.output(&a.output)?;
            write_run(&r, out.as_deref(), prof.as_deref())?;
            r
        }
    };
    Ok(run.certificate.all_pass())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

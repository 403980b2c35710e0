use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ra_bergman::config::{
    AnnulusBoundConfig, DiscConfig, EvalBoundConfig, ExperimentConfig, ExtendConfig, FockCompareConfig, GenConfig,
    GeneratorSpec, GramConfig, GrowthConfig, IndexSpec, KernelConfig, LiftConfig, ModelSpec, MomentsConfig, PdeConfig,
    Point, ProjectConfig, RaysConfig, SeparatedDiscConfig, SuiteConfig, SuiteName, ZeroSetSpec,
};
use ra_bergman::parse::{parse_complex, parse_complex_list, parse_list, parse_usize_list};
use ra_bergman::quadrature::GridSpec;
use ra_bergman::space::{DEFAULT_DEGREE_WEIGHT, DEFAULT_DROP_TOL};
use ra_bergman::{Error, Result};
use ra_bergman_cli::{exit_code_for, generator_for, output_path, run, EXIT_INVALID};

/// Real-analytic Bergman space experiments.
///
/// Reports are printed to stdout as JSON; `--out` receives the CSV or JSON
/// artifact. Exit status: 0 pass, 1 numerical failure, 2 invalid request.
/// RA_BERGMAN_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "ra-bergman", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a zero set.
    Gen(GenArgs),
    /// Moment-condition membership on circles around a zero set.
    Moments(MomentsArgs),
    /// Holomorphic extension from one circle.
    Extend(ExtendArgs),
    /// CR lift to a level set.
    Lift(LiftArgs),
    /// Gram matrix of a model space.
    Gram(GramArgs),
    /// Reproducing-kernel samples.
    Kernel(KernelArgs),
    /// Point-evaluation bounds sqrt K(z,z).
    EvalBound(EvalBoundArgs),
    /// Orthogonal projection onto a model space.
    Project(ProjectArgs),
    /// Kernel convergence to the Fock kernel over scaled zero sets.
    FockCompare(FockCompareArgs),
    /// Build and optionally verify an analytic disc.
    Disc(DiscArgs),
    /// Search for a disc separated from the imaginary axes.
    SeparatedDisc(SeparatedDiscArgs),
    /// Five-ray predicate at a point.
    Rays(RaysArgs),
    /// Growth profile and fitted order.
    Growth(GrowthArgs),
    /// Annulus bound ratios around a regular polygon.
    AnnulusBound(AnnulusBoundArgs),
    /// Transport PDE solution.
    Pde(PdeArgs),
    /// Run a criteria suite.
    Suite(SuiteArgs),
    /// Run a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the JSON schema of experiment configs.
    Schema {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ZeroSetKindArg {
    Triple,
    Disc,
    Polygon,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: ZeroSetKindArg,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    spacing: f64,
    #[arg(long, default_value_t = 6.0)]
    radius: f64,
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    rotation: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorKindArg {
    TripleSine,
    Product,
}

#[derive(Args)]
struct GeneratorArgs {
    /// Defaults to the generator matching --zeroset when one is given.
    #[arg(long, value_enum)]
    generator: Option<GeneratorKindArg>,
    #[arg(long)]
    gen_spacing: Option<f64>,
    #[arg(long)]
    gen_radius: Option<f64>,
    #[arg(long, default_value_t = 1)]
    genus: u32,
}

impl GeneratorArgs {
    fn spec(&self, zeroset: Option<&ZeroSetSpec>) -> Result<GeneratorSpec> {
        let radius = self.gen_radius.unwrap_or(40.0);
        match self.generator {
            Some(GeneratorKindArg::TripleSine) => Ok(GeneratorSpec::TripleSine {
                spacing: self.gen_spacing.unwrap_or(std::f64::consts::PI),
                radius,
            }),
            Some(GeneratorKindArg::Product) => Ok(GeneratorSpec::Product {
                genus: self.genus,
                radius,
            }),
            None => match zeroset {
                Some(z) => {
                    let mut spec = generator_for(&z.build()?);
                    let (GeneratorSpec::TripleSine { radius: r, .. } | GeneratorSpec::Product { radius: r, .. }) =
                        &mut spec;
                    if let Some(given) = self.gen_radius {
                        *r = given;
                    }
                    Ok(spec)
                }
                None => Ok(GeneratorSpec::TripleSine {
                    spacing: self.gen_spacing.unwrap_or(std::f64::consts::PI),
                    radius,
                }),
            },
        }
    }
}

fn zeroset_file(path: &Option<String>) -> Option<ZeroSetSpec> {
    path.as_ref().map(|p| ZeroSetSpec::File { path: p.clone() })
}

fn point(s: &str) -> Result<Point> {
    let z = parse_complex(s)?;
    Ok([z.re, z.im])
}

fn point_list(s: &str) -> Result<Vec<Point>> {
    Ok(parse_complex_list(s)?.into_iter().map(|z| [z.re, z.im]).collect())
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long = "fn")]
    function: String,
    /// Zero-set JSON file.
    #[arg(long)]
    zeroset: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value = "0.5,1,2")]
    radii: String,
    #[arg(long, default_value_t = ra_bergman::moments::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = ra_bergman::moments::DEFAULT_N_THETA)]
    n_theta: usize,
    #[arg(long, default_value_t = ra_bergman::moments::DEFAULT_N_F)]
    n_f: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ExtendArgs {
    #[arg(long = "fn")]
    function: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value = "0,0")]
    center: String,
    #[arg(long)]
    radius: f64,
    /// Points `re,im;re,im`.
    #[arg(long)]
    at: String,
    #[arg(long, default_value_t = ra_bergman::moments::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long = "fn")]
    function: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value = "0,0")]
    center: String,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    at: String,
}

#[derive(Args)]
struct ModelArgs {
    /// Zero-set JSON file for a product generator.
    #[arg(long)]
    zeroset: Option<String>,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Weighted index `m + degree_weight n <= cutoff`.
    #[arg(long, conflicts_with_all = ["max_m", "max_n"])]
    cutoff: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DEGREE_WEIGHT)]
    degree_weight: usize,
    /// Rectangular index `m <= max_m, n <= max_n`.
    #[arg(long, requires = "max_n")]
    max_m: Option<usize>,
    #[arg(long, requires = "max_m")]
    max_n: Option<usize>,
    #[arg(long, default_value = "gaussian")]
    weight: String,
    #[arg(long = "grid-R", requires_all = ["n_r", "n_theta"])]
    grid_r: Option<f64>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DROP_TOL)]
    drop_tol: f64,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        let zeroset = zeroset_file(&self.zeroset);
        let index = match (self.cutoff, self.max_m, self.max_n) {
            (_, Some(max_m), Some(max_n)) => IndexSpec::Rect { max_m, max_n },
            (cutoff, _, _) => IndexSpec::Weighted {
                cutoff: cutoff.unwrap_or(9),
                degree_weight: self.degree_weight,
            },
        };
        let grid = match (self.grid_r, self.n_r, self.n_theta) {
            (Some(radius), Some(n_r), Some(n_theta)) => Some(GridSpec { radius, n_r, n_theta }),
            _ => None,
        };
        Ok(ModelSpec {
            generator: self.generator.spec(zeroset.as_ref())?,
            zeroset,
            index,
            weight: self.weight.clone(),
            grid,
            drop_tol: self.drop_tol,
        })
    }
}

const DEFAULT_POINTS: &str = "0,0;0.5,0;0,0.5;-0.5,-0.5;1,0";

#[derive(Args)]
struct GramArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = DEFAULT_POINTS)]
    points: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct EvalBoundArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    at: String,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    at: String,
}

#[derive(Args)]
struct FockCompareArgs {
    #[arg(long, default_value = "1,2,3")]
    n: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 8)]
    max_m: usize,
    #[arg(long, default_value_t = 2)]
    max_n: usize,
    #[arg(long, default_value = DEFAULT_POINTS)]
    points: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct DiscArgs {
    /// `a,b,c,d`
    #[arg(long, allow_hyphen_values = true)]
    params: String,
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = ra_bergman::discs::DEFAULT_BOUNDARY_SAMPLES)]
    samples: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SeparatedDiscArgs {
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    r1: f64,
}

#[derive(Args)]
struct RaysArgs {
    #[arg(long)]
    zeroset: String,
    #[arg(long, allow_hyphen_values = true)]
    at: String,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long = "fn")]
    function: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long)]
    rmin: f64,
    #[arg(long)]
    rmax: f64,
    #[arg(long, default_value_t = 37)]
    count: usize,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AnnulusBoundArgs {
    #[arg(long, default_value_t = 5)]
    polygon_n: usize,
    #[arg(long, default_value_t = 1.0)]
    polygon_radius: f64,
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long, default_value_t = 9)]
    cutoff: usize,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
}

#[derive(Args)]
struct PdeArgs {
    /// Initial coefficients: reals `1,1` or complex `1,0;0,1`.
    #[arg(long = "U", allow_hyphen_values = true)]
    u: String,
    #[arg(long, default_value = "0,0.5,1")]
    t: String,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long)]
    check_membership: bool,
    /// Zero-set JSON file for the membership check.
    #[arg(long)]
    zeroset: Option<String>,
    #[arg(long, default_value = "0.5,1,2")]
    radii: String,
    #[arg(long, default_value_t = ra_bergman::moments::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = ra_bergman::pde::DEFAULT_STEP)]
    h: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(value_enum)]
    name: SuiteArg,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Acceptance,
    Invariants,
}

fn config_from(command: Command) -> Result<Option<ExperimentConfig>> {
    let cfg = match command {
        Command::Gen(a) => ExperimentConfig::Gen(GenConfig {
            zeroset: match a.kind {
                ZeroSetKindArg::Triple => ZeroSetSpec::Triple {
                    spacing: a.spacing,
                    radius: a.radius,
                },
                ZeroSetKindArg::Disc => ZeroSetSpec::Disc { n_max: a.n_max, k: a.k },
                ZeroSetKindArg::Polygon => ZeroSetSpec::Polygon {
                    n: a.n,
                    radius: a.radius,
                    rotation: a.rotation,
                },
            },
            out: a.out,
        }),
        Command::Moments(a) => {
            let zeroset = ZeroSetSpec::File { path: a.zeroset };
            ExperimentConfig::Moments(MomentsConfig {
                function: a.function,
                generator: a.generator.spec(Some(&zeroset))?,
                zeroset,
                radii: parse_list(&a.radii)?,
                tol: a.tol,
                n_theta: a.n_theta,
                n_f: a.n_f,
                out: a.out,
            })
        }
        Command::Extend(a) => ExperimentConfig::Extend(ExtendConfig {
            function: a.function,
            generator: a.generator.spec(None)?,
            center: point(&a.center)?,
            radius: a.radius,
            at: point_list(&a.at)?,
            tol: a.tol,
        }),
        Command::Lift(a) => ExperimentConfig::Lift(LiftConfig {
            function: a.function,
            generator: a.generator.spec(None)?,
            center: point(&a.center)?,
            t: a.t,
            at: point_list(&a.at)?,
        }),
        Command::Gram(a) => ExperimentConfig::Gram(GramConfig {
            model: a.model.spec()?,
            out: a.out,
        }),
        Command::Kernel(a) => ExperimentConfig::Kernel(KernelConfig {
            model: a.model.spec()?,
            points: point_list(&a.points)?,
            out: a.out,
        }),
        Command::EvalBound(a) => ExperimentConfig::EvalBound(EvalBoundConfig {
            model: a.model.spec()?,
            at: point_list(&a.at)?,
        }),
        Command::Project(a) => ExperimentConfig::Project(ProjectConfig {
            model: a.model.spec()?,
            function: a.function,
            at: point_list(&a.at)?,
        }),
        Command::FockCompare(a) => ExperimentConfig::FockCompare(FockCompareConfig {
            n: parse_usize_list(&a.n)?,
            generator: a.generator.spec(None)?,
            index: IndexSpec::Rect {
                max_m: a.max_m,
                max_n: a.max_n,
            },
            points: point_list(&a.points)?,
            out: a.out,
        }),
        Command::Disc(a) => {
            let p = parse_list(&a.params)?;
            let params: [f64; 4] = p
                .try_into()
                .map_err(|_| Error::Parse("--params needs exactly four numbers a,b,c,d".into()))?;
            ExperimentConfig::Disc(DiscConfig {
                params,
                check: a.check,
                samples: a.samples,
                out: a.out,
            })
        }
        Command::SeparatedDisc(a) => ExperimentConfig::SeparatedDisc(SeparatedDiscConfig {
            z: point(&a.z)?,
            w: point(&a.w)?,
            epsilon: a.epsilon,
            r1: a.r1,
        }),
        Command::Rays(a) => ExperimentConfig::Rays(RaysConfig {
            zeroset: ZeroSetSpec::File { path: a.zeroset },
            at: point(&a.at)?,
        }),
        Command::Growth(a) => ExperimentConfig::Growth(GrowthConfig {
            function: a.function,
            generator: a.generator.spec(None)?,
            rmin: a.rmin,
            rmax: a.rmax,
            count: a.count,
            t: a.t,
            out: a.out,
        }),
        Command::AnnulusBound(a) => ExperimentConfig::AnnulusBound(AnnulusBoundConfig {
            polygon_n: a.polygon_n,
            polygon_radius: a.polygon_radius,
            function: a.function,
            cutoff: a.cutoff,
            p: a.p,
            r1: a.r1,
            r2: a.r2,
        }),
        Command::Pde(a) => {
            let u = if a.u.contains(';') {
                point_list(&a.u)?
            } else {
                parse_list(&a.u)?.into_iter().map(|v| [v, 0.0]).collect()
            };
            let zeroset = zeroset_file(&a.zeroset);
            let generator = a.generator.spec(zeroset.as_ref())?;
            let mut cfg = PdeConfig {
                u,
                t: parse_list(&a.t)?,
                generator,
                check_membership: a.check_membership,
                zeroset: ZeroSetSpec::Triple {
                    spacing: std::f64::consts::PI,
                    radius: 4.0 * std::f64::consts::PI,
                },
                radii: parse_list(&a.radii)?,
                tol: a.tol,
                h: a.h,
                out: a.out,
            };
            if let Some(z) = zeroset {
                cfg.zeroset = z;
            }
            ExperimentConfig::Pde(cfg)
        }
        Command::Suite(a) => ExperimentConfig::Suite(SuiteConfig {
            name: match a.name {
                SuiteArg::Acceptance => SuiteName::Acceptance,
                SuiteArg::Invariants => SuiteName::Invariants,
            },
            out: a.out,
        }),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::InvalidInput(format!("config {}: {e}", config.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        Command::Schema { out } => {
            let schema = ra_bergman::config::schema_json();
            match out {
                Some(path) => std::fs::write(path, schema)?,
                None => println!("{schema}"),
            }
            return Ok(None);
        }
    };
    Ok(Some(cfg))
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var("RA_BERGMAN_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("RA_BERGMAN_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn execute(command: Command) -> Result<u8> {
    let Some(cfg) = config_from(command)? else { return Ok(0) };
    let outcome = run(&cfg)?;
    if let (Some(path), Some(artifact)) = (output_path(&cfg), &outcome.artifact) {
        std::fs::write(path, artifact)?;
    }
    println!("{}", serde_json::to_string_pretty(&outcome.report)?);
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INVALID);
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

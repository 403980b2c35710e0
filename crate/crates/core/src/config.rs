//! JSON experiment configuration. Unknown keys are rejected everywhere.

use std::f64::consts::PI;

use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{Generator, ZeroSet};
use crate::quadrature::{GridSpec, Weight};
use crate::space::{BasisIndex, DEFAULT_DEGREE_WEIGHT, DEFAULT_DROP_TOL};

pub type Point = [f64; 2];

pub fn point(p: &Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn points(ps: &[Point]) -> Vec<Complex64> {
    ps.iter().map(point).collect()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

fn check_finite(ps: &[Point], what: &str) -> Result<()> {
    check(ps.iter().flatten().all(|v| v.is_finite()), format!("{what}: coordinates must be finite"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ZeroSetSpec {
    Triple { spacing: f64, radius: f64 },
    Disc { n_max: u32, k: u32 },
    Polygon {
        n: usize,
        radius: f64,
        #[serde(default)]
        rotation: f64,
    },
    Points { points: Vec<Point> },
    /// A zero-set JSON file as written by `gen`.
    File { path: String },
}

impl ZeroSetSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ZeroSetSpec::Triple { spacing, radius } => {
                check(*spacing > 0.0 && spacing.is_finite(), "zeroset.spacing must be positive")?;
                check(*radius > 0.0 && radius.is_finite(), "zeroset.radius must be positive")
            }
            ZeroSetSpec::Disc { n_max, k } => {
                check((1..=24).contains(n_max), "zeroset.n_max must be in 1..=24")?;
                check(*k >= 1, "zeroset.k must be at least 1")
            }
            ZeroSetSpec::Polygon { n, radius, rotation } => {
                check(*n >= 3, "zeroset.n must be at least 3")?;
                check(*radius > 0.0 && radius.is_finite(), "zeroset.radius must be positive")?;
                check(rotation.is_finite(), "zeroset.rotation must be finite")
            }
            ZeroSetSpec::Points { points } => check_finite(points, "zeroset.points"),
            ZeroSetSpec::File { path } => check(!path.is_empty(), "zeroset.path must not be empty"),
        }
    }

    pub fn build(&self) -> Result<ZeroSet> {
        match self {
            ZeroSetSpec::Triple { spacing, radius } => ZeroSet::triple_lattice(*spacing, *radius),
            ZeroSetSpec::Disc { n_max, k } => ZeroSet::disc_dyadic(*n_max, *k),
            ZeroSetSpec::Polygon { n, radius, rotation } => ZeroSet::regular_polygon(*n, *radius, *rotation),
            ZeroSetSpec::Points { points: ps } => ZeroSet::explicit(points(ps)),
            ZeroSetSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("zeroset file {path}: {e}")))?;
                ZeroSet::from_json(&text)
            }
        }
    }
}

fn default_spacing() -> f64 {
    PI
}

fn default_gen_radius() -> f64 {
    40.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `g_s(z) = (s/pi) sin(w) sin(omega w) sin(omega^2 w) / w^2`, `w = pi z / s`.
    TripleSine {
        #[serde(default = "default_spacing")]
        spacing: f64,
        #[serde(default = "default_gen_radius")]
        radius: f64,
    },
    /// Weierstrass product over the experiment's zero set.
    Product {
        #[serde(default = "default_genus")]
        genus: u32,
        #[serde(default = "default_gen_radius")]
        radius: f64,
    },
}

fn default_genus() -> u32 {
    1
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec::TripleSine {
            spacing: default_spacing(),
            radius: default_gen_radius(),
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::TripleSine { spacing, radius } => {
                check(*spacing > 0.0 && spacing.is_finite(), "generator.spacing must be positive")?;
                check(*radius > 0.0 && radius.is_finite(), "generator.radius must be positive")
            }
            GeneratorSpec::Product { genus, radius } => {
                check(*genus <= 4, "generator.genus must be at most 4")?;
                check(*radius > 0.0 && radius.is_finite(), "generator.radius must be positive")
            }
        }
    }

    /// The product kind needs the zero set it vanishes on.
    pub fn build(&self, zeros: Option<&ZeroSet>) -> Result<Generator> {
        match self {
            GeneratorSpec::TripleSine { spacing, radius } => Generator::triple_sine_with_spacing(*spacing, *radius),
            GeneratorSpec::Product { genus, radius } => {
                let zeros = zeros.ok_or_else(|| Error::InvalidParameter("product generator needs a zeroset".into()))?;
                Generator::truncated_product(zeros.clone(), *genus, *radius)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IndexSpec {
    /// `m + degree_weight * n <= cutoff`
    Weighted {
        cutoff: usize,
        #[serde(default = "default_degree_weight")]
        degree_weight: usize,
    },
    Rect { max_m: usize, max_n: usize },
}

fn default_degree_weight() -> usize {
    DEFAULT_DEGREE_WEIGHT
}

impl IndexSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            IndexSpec::Weighted { cutoff, degree_weight } => {
                check(*cutoff <= 60, "index.cutoff must be at most 60")?;
                check(*degree_weight >= 1, "index.degree_weight must be at least 1")
            }
            IndexSpec::Rect { max_m, max_n } => check(*max_m <= 60 && *max_n <= 8, "index: max_m <= 60 and max_n <= 8"),
        }
    }

    pub fn build(&self) -> BasisIndex {
        match self {
            IndexSpec::Weighted { cutoff, degree_weight } => BasisIndex::weighted(*cutoff, *degree_weight),
            IndexSpec::Rect { max_m, max_n } => BasisIndex::rect(*max_m, *max_n),
        }
    }
}

fn default_weight() -> String {
    "gaussian".into()
}

fn default_drop_tol() -> f64 {
    DEFAULT_DROP_TOL
}

/// A model space `span{z^m (conj(z) g)^n}` under a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub zeroset: Option<ZeroSetSpec>,
    pub index: IndexSpec,
    #[serde(default = "default_weight")]
    pub weight: String,
    /// Defaults to a grid sized for the basis.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_drop_tol")]
    pub drop_tol: f64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if let Some(z) = &self.zeroset {
            z.validate()?;
        }
        self.index.validate()?;
        Weight::parse(&self.weight).map_err(|e| Error::InvalidParameter(format!("weight: {e}")))?;
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        check(self.drop_tol > 0.0 && self.drop_tol < 1.0, "drop_tol must be in (0, 1)")
    }
}

fn default_tol() -> f64 {
    crate::moments::DEFAULT_TOL
}

fn default_radii() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_n_theta() -> usize {
    crate::moments::DEFAULT_N_THETA
}

fn default_n_f() -> usize {
    crate::moments::DEFAULT_N_F
}

fn check_radii(radii: &[f64]) -> Result<()> {
    check(!radii.is_empty(), "radii must not be empty")?;
    check(radii.iter().all(|r| *r > 0.0 && r.is_finite()), "radii must be positive")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub zeroset: ZeroSetSpec,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub function: String,
    #[serde(default)]
    pub generator: GeneratorSpec,
    pub zeroset: ZeroSetSpec,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_f")]
    pub n_f: usize,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExtendConfig {
    pub function: String,
    #[serde(default)]
    pub generator: GeneratorSpec,
    pub center: Point,
    pub radius: f64,
    pub at: Vec<Point>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    pub function: String,
    #[serde(default)]
    pub generator: GeneratorSpec,
    pub center: Point,
    pub t: f64,
    pub at: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GramConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_kernel_points() -> Vec<Point> {
    vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [-0.5, -0.5], [1.0, 0.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub model: ModelSpec,
    #[serde(default = "default_kernel_points")]
    pub points: Vec<Point>,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EvalBoundConfig {
    pub model: ModelSpec,
    pub at: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub model: ModelSpec,
    pub function: String,
    pub at: Vec<Point>,
}

fn default_fock_index() -> IndexSpec {
    IndexSpec::Rect { max_m: 8, max_n: 2 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FockCompareConfig {
    pub n: Vec<u32>,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default = "default_fock_index")]
    pub index: IndexSpec,
    #[serde(default = "default_kernel_points")]
    pub points: Vec<Point>,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_disc_samples() -> usize {
    crate::discs::DEFAULT_BOUNDARY_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DiscConfig {
    /// `[a, b, c, d]`
    pub params: [f64; 4],
    #[serde(default)]
    pub check: bool,
    #[serde(default = "default_disc_samples")]
    pub samples: usize,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SeparatedDiscConfig {
    pub z: Point,
    pub w: Point,
    pub epsilon: f64,
    pub r1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RaysConfig {
    pub zeroset: ZeroSetSpec,
    pub at: Point,
}

fn default_growth_count() -> usize {
    37
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub function: String,
    #[serde(default)]
    pub generator: GeneratorSpec,
    pub rmin: f64,
    pub rmax: f64,
    #[serde(default = "default_growth_count")]
    pub count: usize,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_polygon_n() -> usize {
    5
}

fn default_one() -> f64 {
    1.0
}

fn default_p() -> f64 {
    3.0
}

fn default_cutoff() -> usize {
    9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AnnulusBoundConfig {
    #[serde(default = "default_polygon_n")]
    pub polygon_n: usize,
    #[serde(default = "default_one")]
    pub polygon_radius: f64,
    /// A single function; when absent the basis family `m + 3n <= cutoff`
    /// over the polygon's product generator is swept.
    #[serde(default)]
    pub function: Option<String>,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    pub r1: f64,
    pub r2: f64,
}

fn default_pde_zeroset() -> ZeroSetSpec {
    ZeroSetSpec::Triple {
        spacing: PI,
        radius: 4.0 * PI,
    }
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    /// Initial coefficients `U_0..U_m` as `[re, im]`.
    pub u: Vec<Point>,
    #[serde(default = "default_times")]
    pub t: Vec<f64>,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub check_membership: bool,
    #[serde(default = "default_pde_zeroset")]
    pub zeroset: ZeroSetSpec,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_step")]
    pub h: f64,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_step() -> f64 {
    crate::pde::DEFAULT_STEP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Acceptance,
    Invariants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: SuiteName,
    #[serde(default)]
    pub out: Option<String>,
}

/// One experiment; `command` selects the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Gen(GenConfig),
    Moments(MomentsConfig),
    Extend(ExtendConfig),
    Lift(LiftConfig),
    Gram(GramConfig),
    Kernel(KernelConfig),
    EvalBound(EvalBoundConfig),
    Project(ProjectConfig),
    FockCompare(FockCompareConfig),
    Disc(DiscConfig),
    SeparatedDisc(SeparatedDiscConfig),
    Rays(RaysConfig),
    Growth(GrowthConfig),
    AnnulusBound(AnnulusBoundConfig),
    Pde(PdeConfig),
    Suite(SuiteConfig),
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Gen(_) => "gen",
            ExperimentConfig::Moments(_) => "moments",
            ExperimentConfig::Extend(_) => "extend",
            ExperimentConfig::Lift(_) => "lift",
            ExperimentConfig::Gram(_) => "gram",
            ExperimentConfig::Kernel(_) => "kernel",
            ExperimentConfig::EvalBound(_) => "eval-bound",
            ExperimentConfig::Project(_) => "project",
            ExperimentConfig::FockCompare(_) => "fock-compare",
            ExperimentConfig::Disc(_) => "disc",
            ExperimentConfig::SeparatedDisc(_) => "separated-disc",
            ExperimentConfig::Rays(_) => "rays",
            ExperimentConfig::Growth(_) => "growth",
            ExperimentConfig::AnnulusBound(_) => "annulus-bound",
            ExperimentConfig::Pde(_) => "pde",
            ExperimentConfig::Suite(_) => "suite",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Gen(c) => c.zeroset.validate(),
            ExperimentConfig::Moments(c) => {
                c.generator.validate()?;
                c.zeroset.validate()?;
                check_radii(&c.radii)?;
                check(c.tol > 0.0, "tol must be positive")?;
                check(c.n_f >= 1 && c.n_f <= 4096, "n_f must be in 1..=4096")?;
                check(c.n_theta >= 4 * c.n_f + 16, "n_theta must be at least 4 n_f + 16")?;
                check(c.n_theta <= 1 << 16, "n_theta must be at most 65536")
            }
            ExperimentConfig::Extend(c) => {
                c.generator.validate()?;
                check(c.radius > 0.0 && c.radius.is_finite(), "radius must be positive")?;
                check_finite(&[c.center], "center")?;
                check_finite(&c.at, "at")?;
                check(c.tol > 0.0, "tol must be positive")
            }
            ExperimentConfig::Lift(c) => {
                c.generator.validate()?;
                check(c.t > 0.0 && c.t.is_finite(), "t must be positive")?;
                check_finite(&[c.center], "center")?;
                check_finite(&c.at, "at")
            }
            ExperimentConfig::Gram(c) => c.model.validate(),
            ExperimentConfig::Kernel(c) => {
                c.model.validate()?;
                check(!c.points.is_empty() && c.points.len() <= 400, "points: 1..=400 entries")?;
                check_finite(&c.points, "points")
            }
            ExperimentConfig::EvalBound(c) => {
                c.model.validate()?;
                check_finite(&c.at, "at")
            }
            ExperimentConfig::Project(c) => {
                c.model.validate()?;
                check_finite(&c.at, "at")
            }
            ExperimentConfig::FockCompare(c) => {
                c.generator.validate()?;
                c.index.validate()?;
                check(!c.n.is_empty() && c.n.iter().all(|n| (1..=64).contains(n)), "n: integers in 1..=64")?;
                check_finite(&c.points, "points")
            }
            ExperimentConfig::Disc(c) => {
                check(c.params.iter().all(|v| v.is_finite()), "params must be finite")?;
                check(c.params[1] > 0.0 && c.params[3] > 0.0, "params: b and d must be positive")?;
                check(c.samples >= 8 && c.samples <= 1 << 16, "samples must be in 8..=65536")
            }
            ExperimentConfig::SeparatedDisc(c) => {
                check_finite(&[c.z, c.w], "z, w")?;
                check(c.epsilon > 0.0 && c.r1 > 0.0, "epsilon and r1 must be positive")
            }
            ExperimentConfig::Rays(c) => {
                c.zeroset.validate()?;
                check_finite(&[c.at], "at")
            }
            ExperimentConfig::Growth(c) => {
                c.generator.validate()?;
                check(c.rmin > 0.0 && c.rmax > c.rmin && c.rmax.is_finite(), "need 0 < rmin < rmax")?;
                check(c.count >= 7 && c.count <= 10_000, "count must be in 7..=10000")?;
                check(c.t.map_or(true, |t| t.is_finite()), "t must be finite")
            }
            ExperimentConfig::AnnulusBound(c) => {
                check(c.polygon_n >= 3, "polygon_n must be at least 3")?;
                check(c.polygon_radius > 0.0 && c.polygon_radius.is_finite(), "polygon_radius must be positive")?;
                check(c.p > 2.0 && c.p.is_finite(), "p must exceed 2")?;
                check(c.r1 > 0.0 && c.r2 > c.r1 && c.r2.is_finite(), "need 0 < r1 < r2")?;
                check(c.cutoff <= 30, "cutoff must be at most 30")
            }
            ExperimentConfig::Pde(c) => {
                check(!c.u.is_empty() && c.u.len() <= 12, "u: 1..=12 coefficients")?;
                check_finite(&c.u, "u")?;
                check(c.t.iter().all(|t| t.is_finite()), "t must be finite")?;
                c.generator.validate()?;
                c.zeroset.validate()?;
                check_radii(&c.radii)?;
                check(c.tol > 0.0, "tol must be positive")?;
                check(c.h > 0.0 && c.h < 1.0, "h must be in (0, 1)")
            }
            ExperimentConfig::Suite(_) => Ok(()),
        }
    }
}

/// JSON schema for [`ExperimentConfig`].
pub fn schema_json() -> String {
    let schema = schemars::schema_for!(ExperimentConfig);
    serde_json::to_string_pretty(&schema).expect("schema serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_config_round_trip() {
        let text = r#"{"command":"moments","function":"zbar_g",
            "zeroset":{"kind":"triple","spacing":1.0,"radius":4.0},
            "generator":{"kind":"triple-sine","spacing":1.0},
            "radii":[0.5,1,2]}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.command(), "moments");
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        let top = r#"{"command":"gen","zeroset":{"kind":"disc","n_max":2,"k":1},"extra":1}"#;
        assert!(ExperimentConfig::from_json(top).is_err());
        let nested = r#"{"command":"gen","zeroset":{"kind":"disc","n_max":2,"k":1,"extra":1}}"#;
        assert!(ExperimentConfig::from_json(nested).is_err());
        let grid = r#"{"command":"gram","model":{"index":{"kind":"rect","max_m":2,"max_n":0},
            "grid":{"R":8,"n_r":10,"n_theta":16,"x":0}}}"#;
        assert!(ExperimentConfig::from_json(grid).is_err());
    }

    #[test]
    fn negative_radius_is_invalid_parameter() {
        let text = r#"{"command":"moments","function":"z","zeroset":{"kind":"triple","spacing":1,"radius":2},"radii":[-1]}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn schema_mentions_every_command() {
        let s = schema_json();
        for cmd in ["gen", "moments", "fock-compare", "annulus-bound", "suite"] {
            assert!(s.contains(&format!("\"{cmd}\"")), "{cmd}");
        }
    }
}

//! Executes one [`ExperimentConfig`] and collects its report and artifact.

use num_complex::Complex64;
use serde_json::{json, Value};

use ra_bergman::config::{self, ExperimentConfig, ModelSpec, SuiteName};
use ra_bergman::discs::{self, BoundaryRule};
use ra_bergman::estimates;
use ra_bergman::function::FunctionHandle;
use ra_bergman::generator::{Generator, ZeroSet};
use ra_bergman::moments;
use ra_bergman::parse::function_by_name;
use ra_bergman::pde;
use ra_bergman::quadrature::Weight;
use ra_bergman::space::{self, Basis, BasisIndex, ModelSpace};
use ra_bergman::suite;
use ra_bergman::{Error, Result};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

/// Result of a completed run. `report` goes to stdout, `artifact` to the
/// configured output path.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub report: Value,
    pub artifact: Option<String>,
}

impl Outcome {
    fn done(report: Value) -> Self {
        Outcome {
            pass: true,
            report,
            artifact: None,
        }
    }

    fn with_artifact(mut self, artifact: String) -> Self {
        self.artifact = Some(artifact);
        self
    }

    fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn exit_code(&self) -> u8 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Errors that mean the request itself was malformed.
pub fn is_invalid_request(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::OutOfDisc { .. }
            | Error::InvalidCurve(_)
    )
}

pub fn exit_code_for(e: &Error) -> u8 {
    if is_invalid_request(e) {
        EXIT_INVALID
    } else {
        EXIT_FAIL
    }
}

/// The output path a config declares, if any.
pub fn output_path(cfg: &ExperimentConfig) -> Option<&str> {
    match cfg {
        ExperimentConfig::Gen(c) => c.out.as_deref(),
        ExperimentConfig::Moments(c) => c.out.as_deref(),
        ExperimentConfig::Gram(c) => c.out.as_deref(),
        ExperimentConfig::Kernel(c) => c.out.as_deref(),
        ExperimentConfig::FockCompare(c) => c.out.as_deref(),
        ExperimentConfig::Disc(c) => c.out.as_deref(),
        ExperimentConfig::Growth(c) => c.out.as_deref(),
        ExperimentConfig::Pde(c) => c.out.as_deref(),
        ExperimentConfig::Suite(c) => c.out.as_deref(),
        _ => None,
    }
}

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn model(spec: &ModelSpec) -> Result<ModelSpace> {
    let zeros = spec.zeroset.as_ref().map(|z| z.build()).transpose()?;
    let gen = spec.generator.build(zeros.as_ref())?;
    let weight = Weight::parse(&spec.weight)?;
    let grid = spec.grid.map(|g| g.build()).transpose()?;
    ModelSpace::build(Basis::monomial(&gen, spec.index.build()), weight, grid, spec.drop_tol)
}

fn model_summary(space: &ModelSpace) -> Value {
    let (lo, hi) = space
        .gram
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(*e), hi.max(*e)));
    json!({
        "dimension": space.basis.len(),
        "rank": space.kernel.rank,
        "holomorphic_rank": space.kernel.holomorphic_rank,
        "dropped": space.kernel.dropped,
        "condition": space.gram.condition,
        "min_eigenvalue": lo,
        "max_eigenvalue": hi,
        "weight": space.kernel.weight,
        "grid": { "R": space.grid.radii().1, "n_r": space.grid.n_r(), "n_theta": space.grid.n_theta() },
    })
}

/// Runs one validated experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg {
        ExperimentConfig::Gen(c) => {
            let set = c.zeroset.build()?;
            let text = set.to_json();
            let report = json!({ "command": "gen", "count": set.len(), "zeroset": serde_json::from_str::<Value>(&text)? });
            Ok(Outcome::done(report).with_artifact(text))
        }
        ExperimentConfig::Moments(c) => {
            let set = c.zeroset.build()?;
            let gen = c.generator.build(Some(&set))?;
            let f = function_by_name(&c.function, &gen)?;
            let report = moments::membership_test_with(&f, &set, &c.radii, c.tol, c.n_theta, c.n_f)?;
            let csv = report.to_csv();
            Ok(Outcome::done(json!({ "command": "moments", "report": report }))
                .with_artifact(csv)
                .verdict(report.pass))
        }
        ExperimentConfig::Extend(c) => {
            let gen = c.generator.build(None)?;
            let f = function_by_name(&c.function, &gen)?;
            let center = config::point(&c.center);
            let spec = moments::circle_moments(&f, center, c.radius, moments::DEFAULT_N_THETA, moments::DEFAULT_N_F)?;
            let member = spec.is_member(c.tol);
            let mut values = Vec::new();
            if member {
                for z in config::points(&c.at) {
                    values.push(json!({ "z": cx(z), "value": cx(moments::holo_extension(&spec, z, c.tol)?) }));
                }
            }
            let report = json!({
                "command": "extend",
                "function": f.label(),
                "center": c.center,
                "radius": c.radius,
                "negative_mass": spec.negative_mass(),
                "member": member,
                "values": values,
            });
            Ok(Outcome::done(report).verdict(member))
        }
        ExperimentConfig::Lift(c) => {
            let gen = c.generator.build(None)?;
            let f = function_by_name(&c.function, &gen)?;
            let a = config::point(&c.center);
            let values = config::points(&c.at)
                .into_iter()
                .map(|z| {
                    Ok(json!({
                        "z": cx(z),
                        "leaf_point": cx(moments::leaf_fiber(a, c.t, z)),
                        "value": cx(moments::cr_lift(&f, a, c.t, z)?),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::done(json!({ "command": "lift", "function": f.label(), "t": c.t, "values": values })))
        }
        ExperimentConfig::Gram(c) => {
            let space = model(&c.model)?;
            let csv = space.gram.to_csv();
            let mut report = model_summary(&space);
            report["command"] = json!("gram");
            report["eigenvalues"] = json!(space.gram.eigenvalues);
            Ok(Outcome::done(report).with_artifact(csv))
        }
        ExperimentConfig::Kernel(c) => {
            let space = model(&c.model)?;
            let pts = config::points(&c.points);
            let csv = space.kernel.kernel_csv(&pts)?;
            let mut hermitian = 0.0f64;
            for z in &pts {
                for w in &pts {
                    let k = space.kernel.kernel_eval(*z, *w)?;
                    let scale = 1.0 + k.norm();
                    hermitian = hermitian.max((k - space.kernel.kernel_eval(*w, *z)?.conj()).norm() / scale);
                }
            }
            let min_eig = space::kernel_matrix_min_eigenvalue(&space.kernel, &pts)?;
            let defect = space.kernel.orthonormality_defect(&space.grid, &space.weight)?;
            let mut report = model_summary(&space);
            report["command"] = json!("kernel");
            report["hermitian_defect"] = json!(hermitian);
            report["min_kernel_eigenvalue"] = json!(min_eig);
            report["orthonormality_defect"] = json!(defect);
            let pass = hermitian < 1e-12 && min_eig > -1e-8 && defect < 1e-8;
            Ok(Outcome::done(report).with_artifact(csv).verdict(pass))
        }
        ExperimentConfig::EvalBound(c) => {
            let space = model(&c.model)?;
            let bounds = config::points(&c.at)
                .into_iter()
                .map(|z| Ok(json!({ "z": cx(z), "bound": space.kernel.point_eval_bound(z)? })))
                .collect::<Result<Vec<_>>>()?;
            let mut report = model_summary(&space);
            report["command"] = json!("eval-bound");
            report["bounds"] = json!(bounds);
            Ok(Outcome::done(report))
        }
        ExperimentConfig::Project(c) => {
            let space = model(&c.model)?;
            let gen = match space.basis.generator() {
                Some(g) => g.clone(),
                None => Generator::triple_sine(40.0)?,
            };
            let f = function_by_name(&c.function, &gen)?;
            let tf = space.kernel.project(&f, &space.grid, &space.weight)?;
            let residual = FunctionHandle::new("f - Tf", {
                let (f, tf) = (f.clone(), tf.clone());
                move |z| f.eval(z) - tf.eval(z)
            });
            let norm = space.norm(&f)?;
            let distance = space.norm(&residual)?;
            let values = config::points(&c.at)
                .into_iter()
                .map(|z| json!({ "z": cx(z), "f": cx(f.eval(z)), "projection": cx(tf.eval(z)) }))
                .collect::<Vec<_>>();
            let mut report = model_summary(&space);
            report["command"] = json!("project");
            report["function"] = json!(f.label());
            report["norm"] = json!(norm);
            report["distance"] = json!(distance);
            report["values"] = json!(values);
            Ok(Outcome::done(report))
        }
        ExperimentConfig::FockCompare(c) => {
            let gen = c.generator.build(None)?;
            let pts = config::points(&c.points);
            let table = space::kernel_convergence_experiment(&gen, &c.n, &c.index.build(), &pts)?;
            let csv = table.to_csv();
            let pass = table.rows.iter().any(|r| r.status == "ok");
            Ok(Outcome::done(json!({ "command": "fock-compare", "table": table }))
                .with_artifact(csv)
                .verdict(pass))
        }
        ExperimentConfig::Disc(c) => {
            let [a, b, cc, d] = c.params;
            let disc = discs::make_disc(a, b, cc, d)?;
            let mut csv = String::from("theta,phi1_re,phi1_im,phi2_re,phi2_im\n");
            for (theta, z, w) in disc.boundary(c.samples)? {
                csv.push_str(&format!("{theta:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n", z.re, z.im, w.re, w.im));
            }
            let (z0, w0) = disc.center();
            let mut report = json!({ "command": "disc", "disc": disc, "center": [cx(z0), cx(w0)] });
            let mut pass = true;
            if c.check {
                let violation = disc.boundary_violation(c.samples)?;
                let probe = |z: Complex64, w: Complex64| z * z * w;
                let cauchy = discs::cauchy_eval_with(probe, &disc, c.samples, BoundaryRule::Clustered)?;
                let error = (cauchy.value - probe(z0, w0)).norm();
                pass = violation <= discs::VIOLATION_TOL && error < 1e-8 * (1.0 + probe(z0, w0).norm());
                report["check"] = json!({
                    "boundary_violation": violation,
                    "cauchy_probe": "z^2 w",
                    "cauchy_error": error,
                    "pass": pass,
                });
            }
            Ok(Outcome::done(report).with_artifact(csv).verdict(pass))
        }
        ExperimentConfig::SeparatedDisc(c) => {
            let p = (config::point(&c.z), config::point(&c.w));
            match discs::select_separated_disc(p, c.epsilon, c.r1) {
                Ok(s) => Ok(Outcome::done(json!({ "command": "separated-disc", "found": true, "result": s }))),
                Err(Error::SearchFailure {
                    margin_z,
                    margin_w,
                    sup_abs,
                }) => Ok(Outcome::done(json!({
                    "command": "separated-disc",
                    "found": false,
                    "best_margin_z": margin_z,
                    "best_margin_w": margin_w,
                    "sup_abs": sup_abs,
                }))
                .verdict(false)),
                Err(e) => Err(e),
            }
        }
        ExperimentConfig::Rays(c) => {
            let set = c.zeroset.build()?;
            let at = config::point(&c.at);
            let verdict = discs::five_point_predicate(set.points(), at)?;
            Ok(Outcome::done(json!({ "command": "rays", "at": c.at, "points": set.len(), "result": verdict })))
        }
        ExperimentConfig::Growth(c) => {
            let gen = c.generator.build(None)?;
            let ratio = (c.rmax / c.rmin).powf(1.0 / (c.count - 1) as f64);
            let radii: Vec<f64> = (0..c.count).map(|k| c.rmin * ratio.powi(k as i32)).collect();
            let report = if c.function.trim() == "g" {
                estimates::generator_growth_profile(&gen, &radii, c.t)?
            } else {
                estimates::growth_profile(&function_by_name(&c.function, &gen)?, &radii, c.t)?
            };
            let csv = report.to_csv();
            Ok(Outcome::done(json!({
                "command": "growth",
                "function": c.function,
                "order": report.order,
                "type": report.growth_type,
                "fit_residual": report.fit_residual,
                "quadratic_type": report.quadratic_type,
                "k_empirical": report.k_empirical,
                "t": report.t,
                "log_max_decay": report.log_max_decay,
            }))
            .with_artifact(csv))
        }
        ExperimentConfig::AnnulusBound(c) => {
            let polygon = ZeroSet::regular_polygon(c.polygon_n, c.polygon_radius, 0.0)?;
            let gen = Generator::truncated_product(polygon.clone(), 1, 4.0 * c.polygon_radius)?;
            let family: Vec<FunctionHandle> = match &c.function {
                Some(name) => vec![function_by_name(name, &gen)?],
                None => {
                    let basis = Basis::monomial(&gen, BasisIndex::weighted(c.cutoff, 3));
                    (0..basis.len()).map(|j| basis.handle(j)).collect()
                }
            };
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for f in &family {
                let ratio = estimates::annulus_bound_ratio(f, &polygon, c.p, c.r1, c.r2)?;
                worst = worst.max(ratio);
                rows.push(json!({ "function": f.label(), "ratio": ratio }));
            }
            Ok(Outcome::done(json!({
                "command": "annulus-bound",
                "p": c.p,
                "r1": c.r1,
                "r2": c.r2,
                "max_ratio": worst,
                "rows": rows,
            }))
            .verdict(worst.is_finite()))
        }
        ExperimentConfig::Pde(c) => {
            let set = c.zeroset.build()?;
            let gen = c.generator.build(Some(&set))?;
            let u = config::points(&c.u);
            let state = pde::transport_solve(&u, &gen)?;
            let pts = pde::disc_samples(2.0, 8, 16);
            let residual = pde::pde_residual(&state, &pts, c.h, &c.t)?;
            let table = state
                .coefficient_table()
                .map(|t| t.into_iter().map(|row| row.into_iter().map(cx).collect::<Vec<_>>()).collect::<Vec<_>>());
            let mut report = json!({
                "command": "pde",
                "degree": state.degree(),
                "coefficient_table": table,
                "times": c.t,
                "h": c.h,
                "residual": residual,
            });
            let mut pass = true;
            if c.check_membership {
                let evo = pde::evolve_membership_check(&state, &set, &c.t, &c.radii, c.tol)?;
                pass = evo.pass;
                report["membership"] = json!(evo);
            }
            let text = serde_json::to_string_pretty(&report)?;
            Ok(Outcome::done(report).with_artifact(text).verdict(pass))
        }
        ExperimentConfig::Suite(c) => {
            let summary = match c.name {
                SuiteName::Acceptance => suite::acceptance(),
                SuiteName::Invariants => suite::invariants(),
            };
            let text = summary.to_json();
            Ok(Outcome {
                pass: summary.pass,
                report: serde_json::from_str(&text)?,
                artifact: Some(text),
            })
        }
    }
}

/// Default generator for a zero set: the triple-sine product on a matching
/// lattice, the Weierstrass product otherwise.
pub fn generator_for(set: &ZeroSet) -> config::GeneratorSpec {
    match set.kind() {
        ra_bergman::generator::ZeroSetKind::TripleLattice { spacing, .. } => config::GeneratorSpec::TripleSine {
            spacing: *spacing,
            radius: 40.0f64.max(10.0 * spacing),
        },
        _ => config::GeneratorSpec::Product {
            genus: 1,
            radius: set.points().iter().fold(1.0f64, |r, a| r.max(a.norm() + 1.0)),
        },
    }
}

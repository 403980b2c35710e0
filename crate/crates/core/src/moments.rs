//! Circle Fourier spectra and the moment conditions defining the algebra.
//!
//! A continuous `f` restricted to `|z - a| = r` extends holomorphically into
//! the disc iff every negative Fourier coefficient vanishes. Membership is
//! tested numerically relative to the sup-norm of the samples.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::generator::ZeroSet;
use crate::quadrature::{gauss_legendre, norm_p, PolarGrid, Region};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_N_F: usize = 32;
pub const DEFAULT_N_THETA: usize = 256;

/// Discrete Fourier coefficients of `theta -> f(a + r e^{i theta})`.
#[derive(Debug, Clone)]
pub struct CircleSpectrum {
    pub center: Complex64,
    pub radius: f64,
    pub n_theta: usize,
    pub n_f: usize,
    coeffs: Vec<Complex64>,
    samples: Vec<Complex64>,
    pub sup_norm: f64,
}

impl CircleSpectrum {
    /// `c_n` for `-n_f <= n <= n_f`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        assert!(n.unsigned_abs() as usize <= self.n_f, "coefficient index {n} out of range");
        self.coeffs[(n + self.n_f as i64) as usize]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `max_{n<0} |c_n|`.
    pub fn max_negative(&self) -> f64 {
        self.coeffs[..self.n_f].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_{n<0} |c_n| / max(1, sup|f|)`.
    pub fn negative_mass(&self) -> f64 {
        self.max_negative() / self.sup_norm.max(1.0)
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.negative_mass() <= tol
    }

    /// Normalized circle norm `((1/2pi) int |f|^p dtheta)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let n = self.samples.len() as f64;
        (self.samples.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n).powf(1.0 / p)
    }

    /// Sum of the non-negative part of the series at `z`; no checks.
    fn series_at(&self, z: Complex64) -> Complex64 {
        let u = (z - self.center) / self.radius;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (0..=self.n_f).rev() {
            acc = acc * u + self.coeffs[n + self.n_f];
        }
        acc
    }

    fn require_member(&self, tol: f64) -> Result<()> {
        let threshold = tol * self.sup_norm.max(1.0);
        let mass = self.max_negative();
        if mass > threshold {
            return Err(Error::NotAMember { mass, threshold });
        }
        Ok(())
    }
}

pub fn circle_moments(f: &FunctionHandle, a: Complex64, r: f64, n_theta: usize, n_f: usize) -> Result<CircleSpectrum> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param(format!("circle radius must be positive, got {r}")));
    }
    if n_theta < 4 * n_f + 16 {
        return Err(Error::param(format!(
            "need n_theta >= 4 n_f + 16 (n_theta = {n_theta}, n_f = {n_f})"
        )));
    }
    let roots: Vec<Complex64> = (0..n_theta)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n_theta as f64))
        .collect();
    let samples = roots
        .iter()
        .enumerate()
        .map(|(j, e)| f.eval_checked(a + e * r, j))
        .collect::<Result<Vec<_>>>()?;
    let sup_norm = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let nt = n_theta as i64;
    let coeffs = (-(n_f as i64)..=n_f as i64)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                // e^{-i n theta_j} from the root table, exact index arithmetic
                let idx = (-n * j as i64).rem_euclid(nt) as usize;
                acc += v * roots[idx];
            }
            acc / n_theta as f64
        })
        .collect();
    Ok(CircleSpectrum {
        center: a,
        radius: r,
        n_theta,
        n_f,
        coeffs,
        samples,
        sup_norm,
    })
}

/// `f_r(z) = sum_{n>=0} c_n ((z - a)/r)^n`, refusing non-members.
pub fn holo_extension(spec: &CircleSpectrum, z: Complex64, tol: f64) -> Result<Complex64> {
    spec.require_member(tol)?;
    if (z - spec.center).norm() >= spec.radius {
        return Err(Error::OutOfDisc {
            z,
            center: spec.center,
            radius: spec.radius,
        });
    }
    Ok(spec.series_at(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Overflow,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Overflow => "OVERFLOW",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipRow {
    pub center: [f64; 2],
    pub radius: f64,
    pub max_neg_coeff: f64,
    pub sup_norm: f64,
    /// `max_neg_coeff / max(1, sup_norm)`
    pub measure: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub label: String,
    pub tol: f64,
    pub rows: Vec<MembershipRow>,
    pub pass: bool,
}

impl MembershipReport {
    pub fn max_measure(&self) -> f64 {
        self.rows.iter().map(|r| r.measure).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("center_re,center_im,radius,max_neg_coeff,sup_norm,verdict\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                r.center[0],
                r.center[1],
                r.radius,
                r.max_neg_coeff,
                r.sup_norm,
                r.verdict.as_str()
            );
        }
        out
    }
}

/// Tests the moment condition on every circle `|z - a| = r`, `a` in `X`.
pub fn membership_test(f: &FunctionHandle, set: &ZeroSet, radii: &[f64], tol: f64) -> Result<MembershipReport> {
    membership_test_with(f, set, radii, tol, DEFAULT_N_THETA, DEFAULT_N_F)
}

pub fn membership_test_with(
    f: &FunctionHandle,
    set: &ZeroSet,
    radii: &[f64],
    tol: f64,
    n_theta: usize,
    n_f: usize,
) -> Result<MembershipReport> {
    if !(tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::param(format!("radii must be positive, got {r}")));
    }
    let circles: Vec<(Complex64, f64)> = set
        .points()
        .iter()
        .flat_map(|a| radii.iter().map(move |r| (*a, *r)))
        .collect();
    let rows = circles
        .par_iter()
        .map(|&(a, r)| match circle_moments(f, a, r, n_theta, n_f) {
            Ok(spec) => {
                let measure = spec.negative_mass();
                Ok(MembershipRow {
                    center: [a.re, a.im],
                    radius: r,
                    max_neg_coeff: spec.max_negative(),
                    sup_norm: spec.sup_norm,
                    measure,
                    verdict: if measure <= tol { Verdict::Pass } else { Verdict::Fail },
                })
            }
            Err(Error::EvaluatorFailure { .. }) => Ok(MembershipRow {
                center: [a.re, a.im],
                radius: r,
                max_neg_coeff: f64::NAN,
                sup_norm: f64::INFINITY,
                measure: f64::NAN,
                verdict: Verdict::Overflow,
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.verdict == Verdict::Pass);
    Ok(MembershipReport {
        label: f.label().to_string(),
        tol,
        rows,
        pass,
    })
}

/// Value of the CR lift of `f` to `M_a` at the leaf point over `z`:
/// the holomorphic extension from the circle of radius `sqrt(t)`.
pub fn cr_lift(f: &FunctionHandle, a: Complex64, t: f64, z: Complex64) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("leaf parameter t must be positive, got {t}")));
    }
    let r = t.sqrt();
    if (z - a).norm() > r * (1.0 + 1e-12) {
        return Err(Error::OutOfDisc { z, center: a, radius: r });
    }
    let spec = circle_moments(f, a, r, DEFAULT_N_THETA, DEFAULT_N_F)?;
    spec.require_member(DEFAULT_TOL)?;
    Ok(spec.series_at(z))
}

/// The fiber coordinate `w = t/(z - a) + conj(a)` of the leaf point.
pub fn leaf_fiber(a: Complex64, t: f64, z: Complex64) -> Complex64 {
    t / (z - a) + a.conj()
}

/// `int_{|z-a|<=rho} |f_{sqrt t}|^2 dA / int_{|z-a|<=sqrt t} |f|^2 dA`.
pub fn slice_ratio(f: &FunctionHandle, a: Complex64, t: f64, rho: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::param(format!("leaf parameter t must be positive, got {t}")));
    }
    let r = t.sqrt();
    if !(rho > 0.0 && rho <= r * (1.0 + 1e-12)) {
        return Err(Error::param(format!("slice radius must lie in (0, sqrt t], got {rho}")));
    }
    let spec = Arc::new(circle_moments(f, a, r, DEFAULT_N_THETA, DEFAULT_N_F)?);
    spec.require_member(DEFAULT_TOL)?;
    let ext = {
        let spec = spec.clone();
        FunctionHandle::new("extension", move |z| spec.series_at(z))
    };
    let leaf = norm_p(&ext, &PolarGrid::annulus(a, 0.0, rho, 64, 128)?, None, 2.0)?;
    let plane = norm_p(f, &PolarGrid::annulus(a, 0.0, r, 64, 128)?, None, 2.0)?;
    if plane == 0.0 {
        return Err(Error::Degenerate("f vanishes on the disc".into()));
    }
    Ok((leaf / plane).powi(2))
}

/// A curve `t -> (r(t), z(t))` approaching the circle `|z - a| = r(0)`
/// transversally. `z(t)` is an offset from the center.
#[derive(Clone)]
pub struct TransverseCurve {
    pub b: f64,
    pub k: f64,
    radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    point: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for TransverseCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransverseCurve").field("b", &self.b).field("k", &self.k).finish()
    }
}

const CURVE_CHECKS: usize = 256;

impl TransverseCurve {
    pub fn new<R, Z>(b: f64, k: f64, radius: R, point: Z) -> Result<Self>
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        Z: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidCurve(format!("parameter interval end b = {b}")));
        }
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::InvalidCurve(format!("transversality constant K = {k} not in (0,1)")));
        }
        let curve = TransverseCurve {
            b,
            k,
            radius: Arc::new(radius),
            point: Arc::new(point),
        };
        curve.validate()?;
        Ok(curve)
    }

    /// `r(t) = r0 + t`, `z(t) = (r0 - t) e^{i alpha}`: the gap `r - |z|` is `2t`.
    pub fn radial(r0: f64, b: f64, alpha: f64) -> Result<Self> {
        if !(b < r0) {
            return Err(Error::InvalidCurve("radial curve needs b < r0".into()));
        }
        Self::new(b, 0.4, move |t| r0 + t, move |t| Complex64::from_polar(r0 - t, alpha))
    }

    pub fn radius(&self, t: f64) -> f64 {
        (self.radius)(t)
    }

    pub fn point(&self, t: f64) -> Complex64 {
        (self.point)(t)
    }

    fn validate(&self) -> Result<()> {
        let mut sign = 0.0;
        let mut prev = self.radius(0.0);
        for i in 1..=CURVE_CHECKS {
            let t = self.b * i as f64 / CURVE_CHECKS as f64;
            let r = self.radius(t);
            let gap = r - self.point(t).norm();
            if !(r > 0.0) || !(self.k * t < gap && gap < t / self.k) {
                return Err(Error::InvalidCurve(format!(
                    "transversality fails at t = {t}: r - |z| = {gap}, K = {}",
                    self.k
                )));
            }
            let step = (r - prev).signum();
            if step != 0.0 {
                if sign != 0.0 && step != sign {
                    return Err(Error::InvalidCurve("r(t) is not monotonic".into()));
                }
                sign = step;
            }
            prev = r;
        }
        Ok(())
    }

    /// Lowest and highest radius along the curve.
    pub fn radius_range(&self) -> (f64, f64) {
        let (a, b) = (self.radius(0.0), self.radius(self.b));
        (a.min(b), a.max(b))
    }
}

/// `int_0^b |f_{r(t)}(z(t))| dt` divided by the annulus `L^p` norm of `f`
/// between the extreme radii of the curve.
pub fn transverse_curve_ratio(f: &FunctionHandle, a: Complex64, curve: &TransverseCurve, p: f64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::param(format!("exponent must satisfy p > 2, got {p}")));
    }
    let (x, w) = gauss_legendre(48);
    let half = 0.5 * curve.b;
    let terms = x
        .par_iter()
        .zip(w.par_iter())
        .map(|(x, w)| {
            let t = half * (x + 1.0);
            let spec = circle_moments(f, a, curve.radius(t), DEFAULT_N_THETA, DEFAULT_N_F)?;
            spec.require_member(DEFAULT_TOL)?;
            Ok(half * w * spec.series_at(a + curve.point(t)).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let line: f64 = terms.iter().sum();
    let (r1, r2) = curve.radius_range();
    let area = norm_p(f, &Region::Annulus { center: a, r1, r2 }.grid(96, 256)?, None, p)?;
    if area == 0.0 {
        return Err(Error::Degenerate("f vanishes on the annulus".into()));
    }
    Ok(line / area)
}

/// `int_{r1}^{r2} c_{-k}(r) r dr`, i.e. `(1/2pi) int_annulus f e^{ik theta} dA`.
pub fn annulus_moment(f: &FunctionHandle, a: Complex64, r1: f64, r2: f64, k: usize) -> Result<Complex64> {
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::param("annulus moment needs 0 < r1 < r2"));
    }
    let n_f = k.max(1);
    let n_theta = (4 * n_f + 16).max(DEFAULT_N_THETA);
    let (x, w) = gauss_legendre(64);
    let half = 0.5 * (r2 - r1);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in x.iter().zip(&w) {
        let r = r1 + half * (x + 1.0);
        let spec = circle_moments(f, a, r, n_theta, n_f)?;
        acc += spec.coeff(-(k as i64)) * (r * half * w);
    }
    Ok(acc)
}

/// Hölder constant `(1/2pi) (pi (r2^2 - r1^2))^{1/q}` bounding
/// [`annulus_moment`] by the annulus `L^p` norm.
pub fn annulus_moment_bound(r1: f64, r2: f64, p: f64) -> f64 {
    let q = p / (p - 1.0);
    (PI * (r2 * r2 - r1 * r1)).powf(1.0 / q) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::SeriesRep;
    use crate::generator::Generator;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zbar_on_circle_radius_two() {
        let s = circle_moments(&FunctionHandle::zbar(), c(0.0, 0.0), 2.0, 256, 32).unwrap();
        for n in -32..=32i64 {
            let expect = if n == -1 { 2.0 } else { 0.0 };
            assert!((s.coeff(n) - expect).norm() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn z_squared_about_one() {
        let s = circle_moments(&FunctionHandle::zpow(2), c(1.0, 0.0), 1.0, 256, 32).unwrap();
        let expect = [(0, 1.0), (1, 2.0), (2, 1.0)];
        for n in -32..=32i64 {
            let e = expect.iter().find(|(k, _)| *k == n).map_or(0.0, |(_, v)| *v);
            assert!((s.coeff(n) - e).norm() < 1e-14);
        }
        assert_relative_eq!(holo_extension(&s, c(1.3, 0.0), 1e-8).unwrap().re, 1.69, max_relative = 1e-14);
    }

    #[test]
    fn zbar_g_unit_circle_is_holomorphic_inside() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let f = FunctionHandle::zbar_g(&gen);
        let s = circle_moments(&f, c(0.0, 0.0), 1.0, 256, 32).unwrap();
        assert!(s.max_negative() < 1e-9);
        let got = holo_extension(&s, c(0.5, 0.0), 1e-8).unwrap();
        let expect = gen.value(c(0.5, 0.0)).unwrap() / 0.5;
        assert!((got - expect).norm() < 1e-13);
    }

    #[test]
    fn extension_refusals() {
        let s = circle_moments(&FunctionHandle::zbar(), c(0.0, 0.0), 1.0, 256, 32).unwrap();
        assert!(matches!(holo_extension(&s, c(0.1, 0.0), 1e-8), Err(Error::NotAMember { .. })));
        let h = circle_moments(&FunctionHandle::z(), c(0.0, 0.0), 1.0, 256, 32).unwrap();
        assert!(matches!(holo_extension(&h, c(1.0, 0.0), 1e-8), Err(Error::OutOfDisc { .. })));
    }

    #[test]
    fn sample_count_precondition() {
        assert!(circle_moments(&FunctionHandle::z(), c(0.0, 0.0), 1.0, 100, 32).is_err());
        assert!(circle_moments(&FunctionHandle::z(), c(0.0, 0.0), 0.0, 256, 32).is_err());
    }

    #[test]
    fn membership_verdicts() {
        let gen = Generator::triple_sine_with_spacing(1.0, 4.0).unwrap();
        let set = gen.zero_set().clone();
        let radii = [0.5, 1.0, 2.0];
        let good = membership_test(&FunctionHandle::zbar_g(&gen), &set, &radii, 1e-8).unwrap();
        assert!(good.pass, "max measure {}", good.max_measure());
        let bad = membership_test(&FunctionHandle::zbar(), &set, &radii, 1e-8).unwrap();
        assert!(!bad.pass);
        for row in &bad.rows {
            assert!((row.max_neg_coeff - row.radius).abs() < 1e-12);
            assert_relative_eq!(row.measure, row.radius / row.sup_norm.max(1.0), max_relative = 1e-12);
        }
        assert!(membership_test(&FunctionHandle::zpow(5), &set, &radii, 1e-8).unwrap().pass);
        let csv = good.to_csv();
        assert_eq!(csv.lines().count(), 1 + set.len() * 3);
    }

    #[test]
    fn overflow_is_per_circle() {
        let f = FunctionHandle::new("blowup", |z: Complex64| if z.re > 1.5 { c(f64::INFINITY, 0.0) } else { z });
        let set = ZeroSet::explicit(vec![c(0.0, 0.0)]).unwrap();
        let rep = membership_test(&f, &set, &[1.0, 2.0], 1e-8).unwrap();
        assert_eq!(rep.rows[0].verdict, Verdict::Pass);
        assert_eq!(rep.rows[1].verdict, Verdict::Overflow);
        assert!(!rep.pass);
    }

    #[test]
    fn cr_lift_examples() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let f = FunctionHandle::zbar_g(&gen);
        let v = cr_lift(&f, c(0.0, 0.0), 1.0, c(0.5, 0.0)).unwrap();
        assert!((v - gen.value(c(0.5, 0.0)).unwrap() * 2.0).norm() < 1e-13);
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, 0.37 + k as f64 * 0.4);
            let on = cr_lift(&f, c(0.0, 0.0), 1.0, z).unwrap();
            assert!((on - f.eval(z)).norm() < 1e-9);
        }
        // holomorphic: independent of t
        let h = FunctionHandle::zpow(3);
        let z = c(0.2, 0.1);
        for t in [0.25, 1.0, 4.0] {
            assert!((cr_lift(&h, c(0.0, 0.0), t, z).unwrap() - z.powu(3)).norm() < 1e-13);
        }
        let w = leaf_fiber(c(0.0, 0.0), 1.0, z);
        assert!((w - 1.0 / z).norm() < 1e-15);
    }

    #[test]
    fn slice_ratio_examples() {
        let one = FunctionHandle::one();
        assert_relative_eq!(slice_ratio(&one, c(0.0, 0.0), 4.0, 1.0).unwrap(), 0.25, max_relative = 1e-12);
        let h = FunctionHandle::zpow(2);
        assert_relative_eq!(slice_ratio(&h, c(0.3, 0.0), 1.0, 1.0).unwrap(), 1.0, max_relative = 1e-10);
        let gen = Generator::triple_sine(10.0).unwrap();
        let v = slice_ratio(&FunctionHandle::zbar_g(&gen), c(0.0, 0.0), 1.0, 0.5).unwrap();
        assert!(v.is_finite() && v > 0.0 && v <= 1.0);
        let zero = FunctionHandle::constant(c(0.0, 0.0));
        assert!(matches!(slice_ratio(&zero, c(0.0, 0.0), 1.0, 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn transverse_curve_examples() {
        let curve = TransverseCurve::radial(1.0, 0.5, 0.3).unwrap();
        let p = 3.0;
        let one = transverse_curve_ratio(&FunctionHandle::one(), c(0.0, 0.0), &curve, p).unwrap();
        let expect = 0.5 / (PI * (1.5f64.powi(2) - 1.0)).powf(1.0 / p);
        assert_relative_eq!(one, expect, max_relative = 1e-10);
        let ratios: Vec<f64> = (0..=8)
            .map(|k| transverse_curve_ratio(&FunctionHandle::zpow(k), c(0.0, 0.0), &curve, p).unwrap())
            .collect();
        assert!(ratios.iter().all(|r| r.is_finite() && *r < 1.0));
        let gen = Generator::triple_sine(10.0).unwrap();
        assert!(transverse_curve_ratio(&FunctionHandle::zbar_g(&gen), c(0.0, 0.0), &curve, p).unwrap().is_finite());
        // curve that touches the circle tangentially is rejected
        let bad = TransverseCurve::new(0.5, 0.5, |t| 1.0 + t, |t| Complex64::new(1.0 + t - t * t, 0.0));
        assert!(matches!(bad, Err(Error::InvalidCurve(_))));
    }

    fn random_series(seed: [f64; 6]) -> SeriesRep {
        let gen = Generator::triple_sine(10.0).unwrap();
        let coeffs = DMatrix::from_fn(3, 2, |m, n| c(seed[m * 2 + n], seed[(m * 2 + n + 1) % 6]));
        SeriesRep::new(coeffs, gen)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn series_members_pass_everywhere(seed in proptest::array::uniform6(-1.0f64..1.0), idx in 0usize..7) {
            let f = FunctionHandle::from_series(random_series(seed));
            let set = ZeroSet::triple_lattice(PI, 4.0).unwrap();
            let a = set.points()[idx % set.len()];
            let single = ZeroSet::explicit(vec![a]).unwrap();
            let rep = membership_test(&f, &single, &[0.25, 0.5, 1.0, 2.0], 1e-8).unwrap();
            prop_assert!(rep.pass, "measure {}", rep.max_measure());
        }

        #[test]
        fn extension_reproduces_samples(seed in proptest::array::uniform6(-1.0f64..1.0)) {
            let f = FunctionHandle::from_series(random_series(seed));
            let s = circle_moments(&f, c(PI, 0.0), 1.0, 256, 32).unwrap();
            for (j, v) in s.samples().iter().enumerate().step_by(17) {
                let z = c(PI, 0.0) + Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 256.0);
                let e = s.series_at(z);
                prop_assert!((e - v).norm() <= 1e-9 * v.norm().max(1.0));
            }
        }

        #[test]
        fn moment_functional_obeys_holder(seed in proptest::array::uniform6(-1.0f64..1.0), k in 1usize..4) {
            let f = FunctionHandle::from_series(random_series(seed));
            let a = c(0.4, 0.2);
            let (r1, r2, p) = (0.5, 1.5, 3.0);
            let lhs = annulus_moment(&f, a, r1, r2, k).unwrap().norm();
            let norm = norm_p(&f, &Region::Annulus { center: a, r1, r2 }.grid(96, 256).unwrap(), None, p).unwrap();
            prop_assert!(lhs <= annulus_moment_bound(r1, r2, p) * norm * (1.0 + 1e-9));
        }
    }
}

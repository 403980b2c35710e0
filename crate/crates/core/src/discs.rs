//! Half-disc conformal map, analytic discs attached to two model
//! Levi-flats, boundary Cauchy evaluation, the wedge chart and the
//! five-ray predicate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Half-disc map corner angle.
pub const HALF_DISC: f64 = FRAC_PI_2;
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 256;
pub const VERIFY_SAMPLES: usize = 512;
pub const VIOLATION_TOL: f64 = 1e-8;
const CLUSTER_POWER: i32 = 6;

fn check_closed_disc(zeta: Complex64) -> Result<()> {
    if !(zeta.norm() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("{zeta} is outside the closed unit disc")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < PI) {
        return Err(Error::param(format!("corner angle {beta} not in (0, pi)")));
    }
    Ok(())
}

/// Conformal map of the unit disc onto the lens
/// `{|w| < 1 side of the arc through -1, 1 with corner angle beta}`,
/// sending the upper semicircle to the arc and the lower one to `[-1, 1]`.
/// `beta = pi/2` is the upper half-disc.
pub fn phi_lens(beta: f64, zeta: Complex64) -> Result<Complex64> {
    check_beta(beta)?;
    check_closed_disc(zeta)?;
    if (zeta - ONE).norm() < 1e-300 {
        return Ok(ONE);
    }
    let xi = I * (ONE + zeta) / (ONE - zeta);
    let q = sector_power(xi, beta / PI);
    if q.is_infinite() {
        return Ok(ONE);
    }
    Ok((q - ONE) / (q + ONE))
}

/// Principal power with the branch cut along the negative imaginary axis,
/// so real negative `xi` from the boundary lands on the ray `arg = pi * e`.
fn sector_power(xi: Complex64, e: f64) -> Complex64 {
    let mut arg = xi.arg();
    if arg < -FRAC_PI_2 {
        arg += 2.0 * PI;
    }
    Complex64::from_polar(xi.norm().powf(e), arg * e)
}

/// `d phi_lens / d zeta`.
pub fn phi_lens_derivative(beta: f64, zeta: Complex64) -> Result<Complex64> {
    check_beta(beta)?;
    check_closed_disc(zeta)?;
    let xi = I * (ONE + zeta) / (ONE - zeta);
    let e = beta / PI;
    let q = sector_power(xi, e);
    let dxi = 2.0 * I / ((ONE - zeta) * (ONE - zeta));
    let dq = e * q / xi;
    let dw = 2.0 / ((q + ONE) * (q + ONE));
    Ok(dw * dq * dxi)
}

/// Inverse of [`phi_lens`].
pub fn psi_lens(beta: f64, w: Complex64) -> Result<Complex64> {
    check_beta(beta)?;
    if (w - ONE).norm() < 1e-300 {
        return Ok(ONE);
    }
    let q = (ONE + w) / (ONE - w);
    let mut arg = q.arg();
    if arg < -FRAC_PI_2 {
        arg += 2.0 * PI;
    }
    let xi = Complex64::from_polar(q.norm().powf(PI / beta), arg * PI / beta);
    Ok((xi - I) / (xi + I))
}

/// The half-disc map: `phi(0) = i tan(pi/8)`, `phi(-i) = 0`, `phi(+-1) = +-1`.
pub fn phi(zeta: Complex64) -> Result<Complex64> {
    phi_lens(HALF_DISC, zeta)
}

/// Inverse of [`phi`]: `m3(m2(m1(w)))`.
pub fn psi(w: Complex64) -> Result<Complex64> {
    let m1 = (ONE + w) / (ONE - w);
    let m2 = m1 * m1;
    Ok((m2 - I) / (m2 + I))
}

/// `Im phi_lens(beta, 0) = tan(beta/4)`.
pub fn lens_center(beta: f64) -> f64 {
    (beta / 4.0).tan()
}

/// `t = Im phi(0) = sqrt(2) - 1`.
pub fn half_disc_t() -> f64 {
    lens_center(HALF_DISC)
}

/// `a + (b/t) phi(zeta)`, so `phi_ab(0) = a + ib`.
pub fn phi_ab(a: f64, b: f64, zeta: Complex64) -> Result<Complex64> {
    phi_ab_lens(HALF_DISC, a, b, zeta)
}

pub fn phi_ab_lens(beta: f64, a: f64, b: f64, zeta: Complex64) -> Result<Complex64> {
    if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param(format!("need finite a and b > 0, got a = {a}, b = {b}")));
    }
    Ok(a + b / lens_center(beta) * phi_lens(beta, zeta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticDisc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Corner angles of the two component lenses.
    pub beta1: f64,
    pub beta2: f64,
    pub boundary_samples: usize,
    pub max_violation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryRule {
    /// Equispaced trapezoid in `theta`.
    Trapezoid,
    /// Trapezoid after a `sin^6` change of variables on each semicircle,
    /// clustering nodes at the corner points `zeta = +-1`.
    Clustered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyValue {
    pub value: Complex64,
    /// `|value - value with half the samples|`.
    pub self_consistency: f64,
    pub samples: usize,
}

/// `Phi = (phi_{a,b}(zeta), phi_{c,d}(-zeta))` with boundary invariants checked.
pub fn make_disc(a: f64, b: f64, c: f64, d: f64) -> Result<AnalyticDisc> {
    make_lens_disc(a, b, c, d, HALF_DISC, HALF_DISC)
}

pub fn make_lens_disc(a: f64, b: f64, c: f64, d: f64, beta1: f64, beta2: f64) -> Result<AnalyticDisc> {
    for (name, v) in [("b", b), ("d", d)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(format!("{name} must be positive, got {v}")));
        }
    }
    if !(a.is_finite() && c.is_finite()) {
        return Err(Error::param("a and c must be finite"));
    }
    check_beta(beta1)?;
    check_beta(beta2)?;
    let mut disc = AnalyticDisc {
        a,
        b,
        c,
        d,
        beta1,
        beta2,
        boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
        max_violation: 0.0,
    };
    disc.max_violation = disc.boundary_violation(VERIFY_SAMPLES)?;
    if disc.max_violation > VIOLATION_TOL {
        return Err(Error::ConstructionFailure {
            violation: disc.max_violation,
        });
    }
    Ok(disc)
}

impl AnalyticDisc {
    pub fn phi1(&self, zeta: Complex64) -> Result<Complex64> {
        phi_ab_lens(self.beta1, self.a, self.b, zeta)
    }

    pub fn phi2(&self, zeta: Complex64) -> Result<Complex64> {
        phi_ab_lens(self.beta2, self.c, self.d, -zeta)
    }

    pub fn eval(&self, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((self.phi1(zeta)?, self.phi2(zeta)?))
    }

    pub fn center(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.a, self.b), Complex64::new(self.c, self.d))
    }

    pub fn derivatives(&self, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        let s1 = self.b / lens_center(self.beta1);
        let s2 = self.d / lens_center(self.beta2);
        Ok((
            s1 * phi_lens_derivative(self.beta1, zeta)?,
            -s2 * phi_lens_derivative(self.beta2, -zeta)?,
        ))
    }

    /// `|Phi_1'(zeta)| / |Phi_2'(zeta)|`.
    pub fn derivative_ratio(&self, zeta: Complex64) -> Result<f64> {
        let (d1, d2) = self.derivatives(zeta)?;
        Ok(d1.norm() / d2.norm())
    }

    /// Largest relative departure of the boundary from `M_1` on the lower
    /// semicircle and from `M_2` on the upper one.
    pub fn boundary_violation(&self, samples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for j in 0..samples {
            let theta = 2.0 * PI * j as f64 / samples as f64;
            let (z, w) = self.eval(Complex64::from_polar(1.0, theta))?;
            let scale = 1.0 + z.norm().max(w.norm());
            let v = if theta <= PI {
                (w.im.abs()).max(-z.im)
            } else {
                (z.im.abs()).max(-w.im)
            };
            worst = worst.max(v / scale);
        }
        Ok(worst)
    }

    pub fn boundary(&self, samples: usize) -> Result<Vec<(f64, Complex64, Complex64)>> {
        (0..samples)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / samples as f64;
                let (z, w) = self.eval(Complex64::from_polar(1.0, theta))?;
                Ok((theta, z, w))
            })
            .collect()
    }
}

/// Boundary nodes `theta_j` and weights (summing to 1) for the mean value
/// `(1/2 pi) int F(Phi(e^{i theta})) d theta`.
pub fn boundary_rule(rule: BoundaryRule, samples: usize) -> Vec<(f64, f64)> {
    match rule {
        BoundaryRule::Trapezoid => (0..samples)
            .map(|j| (2.0 * PI * j as f64 / samples as f64, 1.0 / samples as f64))
            .collect(),
        BoundaryRule::Clustered => {
            let half = (samples / 2).max(1);
            let mut out = Vec::with_capacity(2 * half);
            for offset in [0.0, PI] {
                for j in 1..half {
                    let u = j as f64 / half as f64;
                    let (s, ds) = sin_power_map(u);
                    out.push((offset + PI * s, ds / (2.0 * half as f64)));
                }
            }
            out
        }
    }
}

/// `s(u) = int_0^u sin^6(pi v) dv / int_0^1 sin^6(pi v) dv` and `s'(u)`.
fn sin_power_map(u: f64) -> (f64, f64) {
    debug_assert_eq!(CLUSTER_POWER, 6);
    let x = PI * u;
    let s = (10.0 * x - 7.5 * (2.0 * x).sin() + 1.5 * (4.0 * x).sin() - (6.0 * x).sin() / 6.0) / (10.0 * PI);
    let ds = 3.2 * x.sin().powi(CLUSTER_POWER);
    (s, ds)
}

/// Recovers `F(Phi(0))` from boundary values by the Cauchy (mean value)
/// formula on the disc.
pub fn cauchy_eval<F>(f: F, disc: &AnalyticDisc) -> Result<CauchyValue>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    cauchy_eval_with(f, disc, disc.boundary_samples, BoundaryRule::Clustered)
}

pub fn cauchy_eval_with<F>(f: F, disc: &AnalyticDisc, samples: usize, rule: BoundaryRule) -> Result<CauchyValue>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    if samples < 8 {
        return Err(Error::param("at least 8 boundary samples"));
    }
    let integrate = |n: usize| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (theta, wt) in boundary_rule(rule, n) {
            let (z, w) = disc.eval(Complex64::from_polar(1.0, theta))?;
            acc += f(z, w) * wt;
        }
        Ok(acc)
    };
    let value = integrate(samples)?;
    let coarse = integrate(samples / 2)?;
    Ok(CauchyValue {
        value,
        self_consistency: (value - coarse).norm(),
        samples,
    })
}

pub const DILATION_COUNT: usize = 64;
pub const MIN_ASPECT: f64 = 0.125;
pub const MAX_ASPECT: f64 = 8.0;

/// Aspect ratio (arc height over half-width) to corner angle.
pub fn aspect_to_beta(aspect: f64) -> f64 {
    2.0 * aspect.atan()
}

pub fn dilation_family() -> Vec<f64> {
    let (lo, hi) = (MIN_ASPECT.ln(), MAX_ASPECT.ln());
    (0..DILATION_COUNT)
        .map(|k| (lo + (hi - lo) * k as f64 / (DILATION_COUNT - 1) as f64).exp())
        .map(aspect_to_beta)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatedDisc {
    pub disc: AnalyticDisc,
    /// `min sign(a) Re Phi_1` over the boundary.
    pub margin_z: f64,
    /// `min sign(c) Re Phi_2` over the boundary.
    pub margin_w: f64,
    pub c: f64,
    /// `sup |Phi|` over the boundary.
    pub r2: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    beta: f64,
    margin: f64,
    sup: f64,
}

fn best_component(center_re: f64, height: f64, flip: bool, r1: f64) -> Result<Candidate> {
    let sign = center_re.signum();
    let mut best: Option<Candidate> = None;
    for beta in dilation_family() {
        let mut margin = f64::INFINITY;
        let mut sup = 0.0f64;
        for j in 0..VERIFY_SAMPLES {
            let zeta = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / VERIFY_SAMPLES as f64);
            let v = phi_ab_lens(beta, center_re, height, if flip { -zeta } else { zeta })?;
            margin = margin.min(sign * v.re);
            sup = sup.max(v.norm());
        }
        let cand = Candidate { beta, margin, sup };
        let better = match best {
            None => true,
            Some(b) => {
                let fits = |c: &Candidate| c.sup < r1;
                match (fits(&cand), fits(&b)) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => cand.margin > b.margin,
                }
            }
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("nonempty family"))
}

/// Searches the lens dilations of the half-disc for a disc through
/// `p = (a+ib, c+id)` whose boundary stays a positive distance from
/// `Re z = 0` and `Re w = 0`.
pub fn select_separated_disc(p: (Complex64, Complex64), eps: f64, r1: f64) -> Result<SeparatedDisc> {
    let (z, w) = p;
    let (a, b, c, d) = (z.re, z.im, w.re, w.im);
    if !(eps > 0.0) {
        return Err(Error::param("epsilon must be positive"));
    }
    let norm = (z.norm_sqr() + w.norm_sqr()).sqrt();
    let checks = [
        (b > eps, "b > epsilon"),
        (d > eps, "d > epsilon"),
        (a.abs() > eps, "|a| > epsilon"),
        (c.abs() > eps, "|c| > epsilon"),
        (norm < r1, "|p| < R1"),
    ];
    if let Some((_, what)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(Error::param(format!("precondition {what} fails for p = ({z}, {w})")));
    }
    let first = best_component(a, b, false, r1)?;
    let second = best_component(c, d, true, r1)?;
    let r2 = (first.sup * first.sup + second.sup * second.sup).sqrt();
    if !(first.margin > 0.0 && second.margin > 0.0 && r2 < r1) {
        return Err(Error::SearchFailure {
            margin_z: first.margin,
            margin_w: second.margin,
            sup_abs: r2,
        });
    }
    let disc = make_lens_disc(a, b, c, d, first.beta, second.beta)?;
    let constant = (first.margin.min(second.margin) / eps).min(0.999);
    Ok(SeparatedDisc {
        disc,
        margin_z: first.margin,
        margin_w: second.margin,
        c: constant,
        r2,
    })
}

/// `(zw, zw - z - w, z - w)`.
pub fn wedge_chart(z: Complex64, w: Complex64) -> (Complex64, Complex64, Complex64) {
    let zeta = z * w;
    (zeta, zeta - z - w, z - w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayVerdict {
    pub verdict: bool,
    /// Fiber ray directions in `[0, 2 pi)`, sorted.
    pub directions: Vec<f64>,
    pub max_gap: f64,
}

/// Gaps within this distance of `pi` count as `pi`.
pub const GAP_TOL: f64 = 1e-9;

/// True iff there are at least five fiber rays at `z` and every gap
/// between consecutive directions is below `pi`.
pub fn five_point_predicate(points: &[Complex64], z: Complex64) -> Result<RayVerdict> {
    if points.len() < 5 {
        return Err(Error::InvalidInput(format!("need at least 5 points, got {}", points.len())));
    }
    let mut directions = Vec::with_capacity(points.len());
    for a in points {
        let d = z - a;
        if d.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("{z} is one of the points")));
        }
        directions.push((-d.arg()).rem_euclid(2.0 * PI));
    }
    directions.sort_by(f64::total_cmp);
    let n = directions.len();
    let max_gap = (0..n)
        .map(|i| {
            if i + 1 < n {
                directions[i + 1] - directions[i]
            } else {
                directions[0] + 2.0 * PI - directions[n - 1]
            }
        })
        .fold(0.0, f64::max);
    Ok(RayVerdict {
        verdict: max_gap < PI - GAP_TOL,
        directions,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_anchor_values() {
        let t = 2f64.sqrt() - 1.0;
        assert!((phi(c(0.0, 0.0)).unwrap() - c(0.0, t)).norm() < 1e-14);
        assert!((half_disc_t() - t).abs() < 1e-15);
        assert!(phi(c(0.0, -1.0)).unwrap().norm() < 1e-14);
        assert!((phi(c(0.0, 1.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        assert!((phi(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((phi(c(-1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(matches!(phi(c(1.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn lens_inverse_and_center() {
        for beta in [0.3, 1.0, HALF_DISC, 2.5] {
            let w0 = phi_lens(beta, c(0.0, 0.0)).unwrap();
            assert!((w0 - c(0.0, lens_center(beta))).norm() < 1e-14);
            for z in [c(0.3, 0.2), c(-0.5, -0.4), c(0.1, 0.9)] {
                let back = psi_lens(beta, phi_lens(beta, z).unwrap()).unwrap();
                assert!((back - z).norm() < 1e-12, "beta {beta} z {z}");
            }
        }
    }

    #[test]
    fn lens_derivative_matches_difference() {
        let h = 1e-6;
        for beta in [0.5, HALF_DISC, 2.0] {
            let z = c(0.2, -0.3);
            let fd = (phi_lens(beta, z + h).unwrap() - phi_lens(beta, z - h).unwrap()) / (2.0 * h);
            assert!((fd - phi_lens_derivative(beta, z).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn phi_ab_values() {
        assert!((phi_ab(1.0, 2.0, c(0.0, 0.0)).unwrap() - c(1.0, 2.0)).norm() < 1e-14);
        assert!((phi_ab(1.0, 2.0, c(0.0, -1.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(phi_ab(1.0, 0.0, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn disc_construction() {
        let d = make_disc(0.0, 1.0, 0.0, 1.0).unwrap();
        let (z, w) = d.eval(c(0.0, 0.0)).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-14 && (w - c(0.0, 1.0)).norm() < 1e-14);
        assert!(d.max_violation < 1e-9);
        let d = make_disc(1.0, 2.0, -1.0, 3.0).unwrap();
        assert_eq!(d.center(), (c(1.0, 2.0), c(-1.0, 3.0)));
        assert!(make_disc(0.0, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn derivative_ratio_stays_bounded_near_corners() {
        let d = make_disc(1.0, 2.0, -1.0, 3.0).unwrap();
        for s in [1e-2, 1e-4, 1e-6] {
            for base in [0.0, PI] {
                for dir in [1.0, -1.0] {
                    let r = d.derivative_ratio(Complex64::from_polar(1.0 - 1e-9, base + dir * s)).unwrap();
                    assert!(r > 0.1 && r < 10.0, "ratio {r}");
                }
            }
        }
    }

    #[test]
    fn cauchy_recovers_center() {
        let d = make_disc(1.0, 2.0, -1.0, 3.0).unwrap();
        let (z0, w0) = d.center();
        let v = cauchy_eval(|_, _| ONE, &d).unwrap();
        assert!((v.value - ONE).norm() < 1e-10);
        let v = cauchy_eval(|z, w| z * w, &d).unwrap();
        assert!((v.value - z0 * w0).norm() < 1e-8);
    }

    #[test]
    fn clustering_beats_plain_trapezoid() {
        let d = make_disc(1.0, 2.0, -1.0, 3.0).unwrap();
        let (z0, w0) = d.center();
        let target = z0 * z0 * w0;
        let plain = cauchy_eval_with(|z, w| z * z * w, &d, 256, BoundaryRule::Trapezoid).unwrap();
        let fine = cauchy_eval_with(|z, w| z * z * w, &d, 256, BoundaryRule::Clustered).unwrap();
        assert!((plain.value - target).norm() > 1e-6);
        assert!((fine.value - target).norm() < 1e-8);
    }

    #[test]
    fn wedge_chart_values() {
        let (zeta, tau, jac) = wedge_chart(c(0.0, 1.0), c(0.0, -1.0));
        assert_eq!((zeta, tau, jac), (c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)));
    }

    #[test]
    fn separated_disc_preconditions() {
        let eps = 0.1;
        let p = (c(eps / 2.0, 1.0), c(1.0, 1.0));
        assert!(matches!(select_separated_disc(p, eps, 10.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn separated_disc_exists_with_room() {
        // far from the imaginary axes relative to the heights
        let r = select_separated_disc((c(3.0, 0.5), c(-4.0, 0.5)), 0.1, 20.0).unwrap();
        assert!(r.margin_z > 0.0 && r.margin_w > 0.0 && r.c > 0.0 && r.c < 1.0);
        assert!(r.disc.max_violation < VIOLATION_TOL);
    }

    #[test]
    fn rays() {
        let pent: Vec<_> = (0..5).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 5.0)).collect();
        let v = five_point_predicate(&pent, c(0.0, 0.0)).unwrap();
        assert!(v.verdict);
        assert!((v.max_gap - 2.0 * PI / 5.0).abs() < 1e-12);
        let line: Vec<_> = (0..5).map(|k| c(k as f64, 0.0)).collect();
        let v = five_point_predicate(&line, c(2.5, 0.0)).unwrap();
        assert!(!v.verdict);
        assert!((v.max_gap - PI).abs() < 1e-12);
        assert!(five_point_predicate(&pent[..4], c(0.0, 0.0)).is_err());
    }
}

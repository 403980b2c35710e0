//! Empirical growth and point-bound checks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::generator::{Generator, ZeroSet};
use crate::moments::{holo_extension, membership_test, CircleSpectrum, DEFAULT_N_THETA, DEFAULT_TOL};
use crate::quadrature::{norm_p_region, Region};

/// `max_z |f_r(z)| (1 - |z-a|/r)^{1/p} / ||f||_{L^p(circle)}`.
pub fn hardy_growth_check(spec: &CircleSpectrum, samples: &[Complex64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param(format!("p must be at least 1, got {p}")));
    }
    let norm = spec.lp_norm(p);
    if norm == 0.0 {
        return Err(Error::Degenerate("zero boundary norm".into()));
    }
    let mut worst = 0.0f64;
    for z in samples {
        let v = holo_extension(spec, *z, DEFAULT_TOL)?;
        let d = 1.0 - (z - spec.center).norm() / spec.radius;
        worst = worst.max(v.norm() * d.powf(1.0 / p) / norm);
    }
    Ok(worst)
}

/// `|f(0)| / ||f||_{L^p(r1 < |z| < r2)}` for `f` satisfying the moment
/// condition at the vertices of `polygon` on circles of radius `r1` and `r2`.
pub fn annulus_bound_ratio(f: &FunctionHandle, polygon: &ZeroSet, p: f64, r1: f64, r2: f64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::param(format!("p must exceed 2, got {p}")));
    }
    if !(r1 > 0.0 && r2 > r1) {
        return Err(Error::param(format!("need 0 < r1 < r2, got {r1}, {r2}")));
    }
    let report = membership_test(f, polygon, &[r1, r2], DEFAULT_TOL)?;
    if !report.pass {
        return Err(Error::NotAMember {
            mass: report.max_measure(),
            threshold: DEFAULT_TOL,
        });
    }
    let region = Region::Annulus {
        center: Complex64::new(0.0, 0.0),
        r1,
        r2,
    };
    let norm = norm_p_region(f, &region, None, p)?;
    if norm == 0.0 {
        return Err(Error::Degenerate("zero annulus norm".into()));
    }
    Ok(f.eval_checked(Complex64::new(0.0, 0.0), 0)?.norm() / norm)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub log_m_r: Vec<f64>,
    /// Fitted order `rho` in `log M_r ~ c0 + c1 log r + tau r^rho`.
    pub order: f64,
    /// Fitted type `tau`.
    pub growth_type: f64,
    pub fit_residual: f64,
    /// `max_r log M_r / r^2`: the smallest `t` with `M_r <= e^{t r^2}` on the sampled radii.
    pub quadratic_type: f64,
    /// `sqrt(2 * quadratic_type)`.
    pub k_empirical: f64,
    pub t: Option<f64>,
    /// `max_r M_r e^{-t r^2}` in log form, when `t` is given.
    pub log_max_decay: Option<f64>,
}

impl GrowthReport {
    pub fn m_r(&self) -> Vec<f64> {
        self.log_m_r.iter().map(|l| l.exp()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,M_r,log_M_r\n");
        for (r, l) in self.radii.iter().zip(&self.log_m_r) {
            let _ = writeln!(out, "{r:.6},{:.10e},{l:.10e}", l.exp());
        }
        out
    }

    /// `M_r e^{-t r^2}` strictly decreasing across the sampled radii.
    pub fn decreasing_after(&self, t: f64) -> bool {
        self.radii
            .windows(2)
            .zip(self.log_m_r.windows(2))
            .all(|(r, l)| l[1] - t * r[1] * r[1] < l[0] - t * r[0] * r[0])
    }
}

pub const DISCARDED_RADII: usize = 3;
const ORDER_SCAN: (f64, f64, f64) = (0.25, 3.0, 0.005);

/// `log M_r` by sampling each circle at `n_theta` points.
pub fn log_sup_on_circles<F>(log_abs: F, radii: &[f64], n_theta: usize) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::param("radii must be positive and strictly increasing"));
    }
    radii
        .par_iter()
        .map(|&r| {
            let mut best = f64::NEG_INFINITY;
            for j in 0..n_theta {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / n_theta as f64);
                best = best.max(log_abs(z)?);
            }
            Ok(best)
        })
        .collect()
}

pub fn growth_profile(f: &FunctionHandle, radii: &[f64], t: Option<f64>) -> Result<GrowthReport> {
    let logs = log_sup_on_circles(
        |z| {
            let v = f.eval(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Overflow {
                    z,
                    log_abs: f64::INFINITY,
                });
            }
            Ok(v.norm().ln())
        },
        radii,
        DEFAULT_N_THETA,
    )?;
    fit_growth(radii, logs, t)
}

/// Growth of a generator from `log|g|`, safe past the float range.
pub fn generator_growth_profile(gen: &Generator, radii: &[f64], t: Option<f64>) -> Result<GrowthReport> {
    let logs = log_sup_on_circles(|z| Ok(gen.log_abs(z)), radii, DEFAULT_N_THETA)?;
    fit_growth(radii, logs, t)
}

/// Least squares for `log M_r = c0 + c1 log r + tau r^rho` over a scan of
/// `rho`; the smallest `DISCARDED_RADII` radii are left out of the fit.
pub fn fit_growth(radii: &[f64], log_m_r: Vec<f64>, t: Option<f64>) -> Result<GrowthReport> {
    if radii.len() != log_m_r.len() {
        return Err(Error::InvalidInput("radii and values differ in length".into()));
    }
    if log_m_r.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::InvalidInput("M_r is not finite".into()));
    }
    let quadratic_type = radii
        .iter()
        .zip(&log_m_r)
        .map(|(r, l)| l / (r * r))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let log_max_decay = t.map(|t| {
        radii
            .iter()
            .zip(&log_m_r)
            .map(|(r, l)| l - t * r * r)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let xs: Vec<f64> = radii.iter().copied().skip(DISCARDED_RADII).collect();
    let ys: Vec<f64> = log_m_r.iter().copied().skip(DISCARDED_RADII).collect();
    let (order, growth_type, fit_residual) = if xs.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least {} radii for the growth fit",
            DISCARDED_RADII + 4
        )));
    } else if spread(&ys) < 1e-9 || ys.iter().any(|y| y.is_infinite()) {
        (0.0, 0.0, 0.0)
    } else {
        scan_order(&xs, &ys)
    };
    Ok(GrowthReport {
        radii: radii.to_vec(),
        log_m_r,
        order,
        growth_type,
        fit_residual,
        quadratic_type,
        k_empirical: (2.0 * quadratic_type).sqrt(),
        t,
        log_max_decay,
    })
}

fn spread(ys: &[f64]) -> f64 {
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn scan_order(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let (lo, hi, step) = ORDER_SCAN;
    let steps = ((hi - lo) / step).round() as usize;
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for k in 0..=steps {
        let rho = lo + step * k as f64;
        let columns: Vec<[f64; 3]> = xs.iter().map(|x| [1.0, x.ln(), x.powf(rho)]).collect();
        let Some((coef, residual)) = least_squares3(&columns, ys) else {
            continue;
        };
        if residual < best.2 {
            best = (rho, coef[2], residual);
        }
    }
    best
}

fn least_squares3(rows: &[[f64; 3]], ys: &[f64]) -> Option<([f64; 3], f64)> {
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).ok()?;
    let r = (&a * &x - b).norm();
    Some(([x[0], x[1], x[2]], r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::circle_moments;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn hardy_constant_one() {
        let spec = circle_moments(&FunctionHandle::one(), c(0.0, 0.0), 1.0, 256, 32).unwrap();
        let r = hardy_growth_check(&spec, &[c(0.0, 0.0), c(0.5, 0.0), c(0.0, -0.9)], 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hardy_rejects_nonmember() {
        let spec = circle_moments(&FunctionHandle::zbar(), c(0.0, 0.0), 1.0, 256, 32).unwrap();
        assert!(matches!(hardy_growth_check(&spec, &[c(0.1, 0.0)], 2.0), Err(Error::NotAMember { .. })));
    }

    #[test]
    fn annulus_ratio_of_constant_and_of_zero_at_origin() {
        let pent = ZeroSet::regular_polygon(5, 1.0, 0.0).unwrap();
        let (r1, r2, p) = (0.5, 1.5, 3.0);
        let r = annulus_bound_ratio(&FunctionHandle::one(), &pent, p, r1, r2).unwrap();
        let expect = 1.0 / (PI * (r2 * r2 - r1 * r1)).powf(1.0 / p);
        assert!((r - expect).abs() < 1e-10 * expect);
        let r = annulus_bound_ratio(&FunctionHandle::zpow(2), &pent, p, r1, r2).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn constant_has_order_zero() {
        let f = FunctionHandle::constant(c(2.0, 1.0));
        let rep = growth_profile(&f, &radii(2.0, 20.0, 19), None).unwrap();
        assert_eq!(rep.order, 0.0);
        for m in rep.m_r() {
            assert!((m - 5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_has_order_one() {
        let g = Generator::triple_sine(30.0).unwrap();
        let rep = generator_growth_profile(&g, &radii(2.0, 20.0, 37), Some(1.0)).unwrap();
        assert!((rep.order - 1.0).abs() < 0.15, "order {}", rep.order);
    }

    #[test]
    fn fit_recovers_synthetic_order() {
        let rs = radii(2.0, 20.0, 37);
        let ys: Vec<f64> = rs.iter().map(|r| 0.3 + 2.0 * r.ln() + 0.7 * r.powf(1.6)).collect();
        let rep = fit_growth(&rs, ys, None).unwrap();
        assert!((rep.order - 1.6).abs() < 0.01);
        assert!((rep.growth_type - 0.7).abs() < 0.02);
    }
}

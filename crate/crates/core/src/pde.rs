//! `u_t + u_{zbar} = 0` for data polynomial in `conj(z) g(z)`.
//!
//! With `u(t, z) = sum_k u_k(t, z) (conj(z) g)^k` and holomorphic `u_k`,
//! the equation reduces to `d_t u_k + (k+1) g u_{k+1} = 0`, solved by
//! `u_k = sum_j (-t)^j / j! * (k+j)!/k! * g^j * U_{k+j}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::generator::{Generator, ZeroSet};
use crate::moments::{membership_test, MembershipReport};

#[derive(Debug, Clone)]
enum Initial {
    Constants(Vec<Complex64>),
    Functions(Vec<FunctionHandle>),
}

#[derive(Debug, Clone)]
pub struct PolyBarState {
    initial: Initial,
    g: FunctionHandle,
    /// Coefficients whose time dependence is suppressed (test corruption).
    frozen: Vec<usize>,
}

fn falling(k: usize, j: usize) -> f64 {
    // (k+j)! / k!
    (k + 1..=k + j).map(|v| v as f64).product()
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|v| v as f64).product()
}

/// Closed-form solution for constant initial coefficients `U_0..U_m`.
pub fn transport_solve(u: &[Complex64], gen: &Generator) -> Result<PolyBarState> {
    if u.is_empty() {
        return Err(Error::param("need at least one initial coefficient"));
    }
    Ok(PolyBarState {
        initial: Initial::Constants(u.to_vec()),
        g: FunctionHandle::g(gen),
        frozen: Vec::new(),
    })
}

/// Same recursion with holomorphic initial coefficients given as evaluators.
pub fn transport_solve_functions(u: Vec<FunctionHandle>, gen: &Generator) -> Result<PolyBarState> {
    if u.is_empty() {
        return Err(Error::param("need at least one initial coefficient"));
    }
    Ok(PolyBarState {
        initial: Initial::Functions(u),
        g: FunctionHandle::g(gen),
        frozen: Vec::new(),
    })
}

impl PolyBarState {
    pub fn degree(&self) -> usize {
        match &self.initial {
            Initial::Constants(u) => u.len() - 1,
            Initial::Functions(u) => u.len() - 1,
        }
    }

    fn initial_at(&self, k: usize, z: Complex64) -> Complex64 {
        match &self.initial {
            Initial::Constants(u) => u[k],
            Initial::Functions(u) => u[k].eval(z),
        }
    }

    /// Coefficients of `t^j` in `u_k(t, z)`, `j = 0..=m-k`.
    pub fn t_polynomial(&self, k: usize, z: Complex64) -> Result<Vec<Complex64>> {
        let m = self.degree();
        if k > m {
            return Err(Error::param(format!("coefficient index {k} exceeds degree {m}")));
        }
        let g = self.g.eval_checked(z, 0)?;
        let top = if self.frozen.contains(&k) { 0 } else { m - k };
        let mut gj = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(top + 1);
        for j in 0..=top {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out.push(sign / factorial(j) * falling(k, j) * gj * self.initial_at(k + j, z));
            gj *= g;
        }
        Ok(out)
    }

    /// Degree in `t` of `u_k` at `z` (highest nonzero coefficient).
    pub fn t_degree(&self, k: usize, z: Complex64) -> Result<usize> {
        let poly = self.t_polynomial(k, z)?;
        Ok(poly.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0))
    }

    pub fn coefficient(&self, k: usize, t: f64, z: Complex64) -> Result<Complex64> {
        let poly = self.t_polynomial(k, z)?;
        Ok(poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c))
    }

    pub fn eval(&self, t: f64, z: Complex64) -> Result<Complex64> {
        let w = z.conj() * self.g.eval_checked(z, 0)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=self.degree()).rev() {
            acc = acc * w + self.coefficient(k, t, z)?;
        }
        Ok(acc)
    }

    pub fn as_function(&self, t: f64) -> FunctionHandle {
        let state = self.clone();
        FunctionHandle::new(format!("u({t})"), move |z| state.eval(t, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
    }

    /// The state at time `t` taken as new initial data.
    pub fn at_time(&self, t: f64) -> PolyBarState {
        let coeffs = (0..=self.degree())
            .map(|k| {
                let state = self.clone();
                FunctionHandle::new(format!("u_{k}({t})"), move |z| {
                    state.coefficient(k, t, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                })
            })
            .collect();
        PolyBarState {
            initial: Initial::Functions(coeffs),
            g: self.g.clone(),
            frozen: Vec::new(),
        }
    }

    /// Keeps only the `t = 0` value of `u_k`.
    pub fn freeze(mut self, k: usize) -> Self {
        self.frozen.push(k);
        self
    }

    /// Replaces the generator by an arbitrary evaluator.
    pub fn with_g(mut self, g: FunctionHandle) -> Self {
        self.g = g;
        self
    }

    /// For constant data: entry `[k][j]` is the coefficient of `t^j g^j`
    /// in `u_k`.
    pub fn coefficient_table(&self) -> Option<Vec<Vec<Complex64>>> {
        let Initial::Constants(u) = &self.initial else { return None };
        let m = u.len() - 1;
        Some(
            (0..=m)
                .map(|k| {
                    (0..=m - k)
                        .map(|j| {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            sign / factorial(j) * falling(k, j) * u[k + j]
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stencil {
    /// `(f(x+h) - f(x-h)) / 2h`
    Central2,
    /// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`
    Central4,
}

impl Stencil {
    fn apply<F>(self, f: F, h: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        Ok(match self {
            Stencil::Central2 => (f(h)? - f(-h)?) / (2.0 * h),
            Stencil::Central4 => (-f(2.0 * h)? + 8.0 * f(h)? - 8.0 * f(-h)? + f(-2.0 * h)?) / (12.0 * h),
        })
    }
}

/// `max |d_t u + d_zbar u|` by second-order central differences.
pub fn pde_residual(state: &PolyBarState, points: &[Complex64], h: f64, t_samples: &[f64]) -> Result<f64> {
    pde_residual_with(state, points, h, t_samples, Stencil::Central2)
}

pub fn pde_residual_with(state: &PolyBarState, points: &[Complex64], h: f64, t_samples: &[f64], stencil: Stencil) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::param("step must be positive"));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for &t in t_samples {
        for &z in points {
            let ut = stencil.apply(|s| state.eval(t + s, z), h)?;
            let ux = stencil.apply(|s| state.eval(t, z + s), h)?;
            let uy = stencil.apply(|s| state.eval(t, z + i * s), h)?;
            worst = worst.max((ut + (ux + i * uy) * 0.5).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    pub reports: Vec<MembershipReport>,
    pub pass: bool,
}

pub fn evolve_membership_check(
    state: &PolyBarState,
    set: &ZeroSet,
    t_samples: &[f64],
    radii: &[f64],
    tol: f64,
) -> Result<EvolutionReport> {
    let reports = t_samples
        .iter()
        .map(|&t| membership_test(&state.as_function(t), set, radii, tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(EvolutionReport {
        times: t_samples.to_vec(),
        reports,
        pass,
    })
}

/// Sample points on a polar raster of the disc `|z| <= radius`.
pub fn disc_samples(radius: f64, rings: usize, per_ring: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for i in 1..=rings {
        let r = radius * i as f64 / rings as f64;
        for j in 0..per_ring {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5 * (i % 2) as f64) / per_ring as f64;
            out.push(Complex64::from_polar(r, th));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gen() -> Generator {
        Generator::triple_sine(10.0).unwrap()
    }

    #[test]
    fn closed_forms() {
        let g = gen();
        let z = Complex64::new(0.7, -0.4);
        let gz = g.value(z).unwrap();
        let s = transport_solve(&[c(2.0)], &g).unwrap();
        assert_eq!(s.coefficient(0, 3.0, z).unwrap(), c(2.0));
        let (u0, u1, u2) = (c(1.0), c(2.0), Complex64::new(0.5, 1.0));
        let s = transport_solve(&[u0, u1], &g).unwrap();
        assert!((s.coefficient(0, 0.5, z).unwrap() - (u0 - 0.5 * gz * u1)).norm() < 1e-15);
        assert_eq!(s.coefficient(1, 0.5, z).unwrap(), u1);
        let s = transport_solve(&[u0, u1, u2], &g).unwrap();
        let t = 0.8;
        let expect = u0 - t * gz * u1 + t * t * gz * gz * u2;
        assert!((s.coefficient(0, t, z).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn t_zero_recovers_data() {
        let s = transport_solve(&[c(1.0), c(-2.0), c(3.0)], &gen()).unwrap();
        for k in 0..3 {
            assert_eq!(s.coefficient(k, 0.0, Complex64::new(0.3, 0.3)).unwrap(), [c(1.0), c(-2.0), c(3.0)][k]);
        }
    }

    #[test]
    fn constant_solution_has_no_residual() {
        let s = transport_solve(&[c(1.5)], &gen()).unwrap();
        let pts = disc_samples(2.0, 4, 8);
        assert!(pde_residual(&s, &pts, DEFAULT_STEP, &[0.0, 0.5, 1.0]).unwrap() < 1e-12);
    }

    #[test]
    fn corrupted_state_residual_is_g_u1() {
        let g = gen();
        let s = transport_solve(&[c(1.0), c(1.0)], &g).unwrap().freeze(0);
        let z = Complex64::new(0.5, 0.5);
        let r = pde_residual(&s, &[z], DEFAULT_STEP, &[0.5]).unwrap();
        let expect = g.value(z).unwrap().norm();
        assert!((r - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn residual_is_second_order_in_h() {
        let s = transport_solve(&[c(1.0), c(1.0), c(1.0)], &gen()).unwrap();
        let pts = disc_samples(2.0, 4, 8);
        let a = pde_residual(&s, &pts, 1e-3, &[0.5]).unwrap();
        let b = pde_residual(&s, &pts, 5e-4, &[0.5]).unwrap();
        assert!((a / b - 4.0).abs() < 0.1, "ratio {}", a / b);
        let fine = pde_residual_with(&s, &pts, 1e-3, &[0.5], Stencil::Central4).unwrap();
        assert!(fine < 1e-8);
    }

    #[test]
    fn coefficient_table_for_m2() {
        let s = transport_solve(&[c(1.0), c(1.0), c(1.0)], &gen()).unwrap();
        let t = s.coefficient_table().unwrap();
        assert_eq!(t[0], vec![c(1.0), c(-1.0), c(1.0)]);
        assert_eq!(t[1], vec![c(1.0), c(-2.0)]);
        assert_eq!(t[2], vec![c(1.0)]);
    }
}

//! Polar Gauss-Legendre x trapezoid quadrature over discs and annuli.
//!
//! Radial nodes are Gauss-Legendre on `[r_min, r_max]`, angular nodes are
//! equispaced. Sums are formed ring by ring in ascending radial order; the
//! per-ring work may run in parallel but the reduction order is fixed, so
//! results are bit-identical for any thread count.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionHandle;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A strictly positive radial weight.
#[derive(Clone)]
pub enum Weight {
    /// `e^{-|z|^2}`
    Gaussian,
    /// `e^{-k|z|}`
    Exponential(f64),
    CustomRadial(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Gaussian => write!(f, "Gaussian"),
            Weight::Exponential(k) => write!(f, "Exponential({k})"),
            Weight::CustomRadial(_) => write!(f, "CustomRadial"),
        }
    }
}

impl Weight {
    pub fn exponential(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::param(format!("exponential weight needs k > 0, got {k}")));
        }
        Ok(Weight::Exponential(k))
    }

    #[inline]
    pub fn at_radius(&self, r: f64) -> f64 {
        match self {
            Weight::Gaussian => (-r * r).exp(),
            Weight::Exponential(k) => (-k * r).exp(),
            Weight::CustomRadial(f) => f(r),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Weight::Gaussian => "gaussian".into(),
            Weight::Exponential(k) => format!("exponential:{k}"),
            Weight::CustomRadial(_) => "custom".into(),
        }
    }

    /// Parses `gaussian` or `exponential:<k>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "gaussian" => Ok(Weight::Gaussian),
            Some(("exponential", k)) => {
                let k: f64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponential rate {k:?}")))?;
                Self::exponential(k)
            }
            _ => Err(Error::Parse(format!("unknown weight {s:?}"))),
        }
    }
}

/// Grid resolution as it appears in JSON configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "R")]
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radius: 8.0,
            n_r: 160,
            n_theta: 256,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::param(format!("grid R must be positive, got {}", self.radius)));
        }
        if self.n_r == 0 || self.n_theta < 4 {
            return Err(Error::param("grid needs n_r >= 1 and n_theta >= 4"));
        }
        if self.n_r > 4096 || self.n_theta > 1 << 16 {
            return Err(Error::param("grid resolution too large"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GridSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn build(&self) -> Result<PolarGrid> {
        PolarGrid::plane(self.radius, self.n_r, self.n_theta)
    }
}

/// Integration region for [`norm_p`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disc { center: Complex64, radius: f64 },
    Annulus { center: Complex64, r1: f64, r2: f64 },
}

impl Region {
    pub fn grid(&self, n_r: usize, n_theta: usize) -> Result<PolarGrid> {
        match *self {
            Region::Disc { center, radius } => PolarGrid::annulus(center, 0.0, radius, n_r, n_theta),
            Region::Annulus { center, r1, r2 } => PolarGrid::annulus(center, r1, r2, n_r, n_theta),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolarGrid {
    center: Complex64,
    r_min: f64,
    r_max: f64,
    radial: Vec<(f64, f64)>,
    n_theta: usize,
}

impl PolarGrid {
    pub fn plane(radius: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        Self::annulus(Complex64::new(0.0, 0.0), 0.0, radius, n_r, n_theta)
    }

    pub fn annulus(center: Complex64, r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::param(format!("invalid radial range [{r_min}, {r_max}]")));
        }
        if n_r == 0 || n_theta < 4 {
            return Err(Error::param("grid needs n_r >= 1 and n_theta >= 4"));
        }
        let (x, w) = gauss_legendre(n_r);
        let half = 0.5 * (r_max - r_min);
        let mid = 0.5 * (r_max + r_min);
        let radial = x.iter().zip(&w).map(|(x, w)| (mid + half * x, half * w)).collect();
        Ok(PolarGrid {
            center,
            r_min,
            r_max,
            radial,
            n_theta,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same region with both resolutions doubled.
    pub fn refined(&self) -> PolarGrid {
        PolarGrid::annulus(self.center, self.r_min, self.r_max, 2 * self.n_r(), 2 * self.n_theta)
            .expect("refining a valid grid")
    }

    fn angles(&self) -> Vec<Complex64> {
        (0..self.n_theta)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.n_theta as f64))
            .collect()
    }

    /// Node positions in radial-major order.
    pub fn points(&self) -> Vec<Complex64> {
        let dirs = self.angles();
        self.radial
            .iter()
            .flat_map(|&(r, _)| dirs.iter().map(move |d| self.center + d * r))
            .collect()
    }

    /// Area element times weight (relative to the grid center) per node.
    pub fn measure(&self, weight: Option<&Weight>) -> Vec<f64> {
        let dtheta = 2.0 * PI / self.n_theta as f64;
        self.radial
            .iter()
            .flat_map(|&(r, w)| {
                let m = w * r * dtheta * weight.map_or(1.0, |wt| wt.at_radius(r));
                std::iter::repeat(m).take(self.n_theta)
            })
            .collect()
    }

    /// Evaluates `f` at every node, ring-parallel, in node order.
    pub fn sample(&self, f: &FunctionHandle) -> Result<Vec<Complex64>> {
        let dirs = self.angles();
        let nt = self.n_theta;
        let rings: Vec<Result<Vec<Complex64>>> = self
            .radial
            .par_iter()
            .enumerate()
            .map(|(i, &(r, _))| {
                dirs.iter()
                    .enumerate()
                    .map(|(j, d)| f.eval_checked(self.center + d * r, i * nt + j))
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(self.len());
        for ring in rings {
            out.extend(ring?);
        }
        Ok(out)
    }

    /// Sum of `values * measure` in node order, accumulated per ring.
    pub fn reduce(&self, values: &[Complex64], measure: &[f64]) -> Complex64 {
        let nt = self.n_theta;
        values
            .chunks(nt)
            .zip(measure.chunks(nt))
            .map(|(v, m)| v.iter().zip(m).fold(Complex64::new(0.0, 0.0), |acc, (v, m)| acc + v * m))
            .fold(Complex64::new(0.0, 0.0), |acc, ring| acc + ring)
    }
}

/// `int f w dA` over the grid.
pub fn integrate(f: &FunctionHandle, grid: &PolarGrid, weight: Option<&Weight>) -> Result<Complex64> {
    let vals = grid.sample(f)?;
    Ok(grid.reduce(&vals, &grid.measure(weight)))
}

/// `<f, h> = int f conj(h) w dA`.
pub fn inner(f: &FunctionHandle, h: &FunctionHandle, grid: &PolarGrid, weight: Option<&Weight>) -> Result<Complex64> {
    let fv = grid.sample(f)?;
    let hv = grid.sample(h)?;
    let prod: Vec<Complex64> = fv.iter().zip(&hv).map(|(a, b)| a * b.conj()).collect();
    Ok(grid.reduce(&prod, &grid.measure(weight)))
}

/// `(int |f|^p w dA)^{1/p}` over the grid.
pub fn norm_p(f: &FunctionHandle, grid: &PolarGrid, weight: Option<&Weight>, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param(format!("norm exponent must satisfy p >= 1, got {p}")));
    }
    let vals = grid.sample(f)?;
    let pw: Vec<Complex64> = vals.iter().map(|v| Complex64::new(v.norm().powf(p), 0.0)).collect();
    Ok(grid.reduce(&pw, &grid.measure(weight)).re.powf(1.0 / p))
}

/// [`norm_p`] over a region at the default resolution (160 x 256).
pub fn norm_p_region(f: &FunctionHandle, region: &Region, weight: Option<&Weight>, p: f64) -> Result<f64> {
    norm_p(f, &region.grid(160, 256)?, weight, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(12);
        for k in 0..24u32 {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-14, "k = {k}");
        }
        assert!(w.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn gaussian_moments() {
        let grid = GridSpec::default().build().unwrap();
        let gw = Weight::Gaussian;
        let one = integrate(&FunctionHandle::one(), &grid, Some(&gw)).unwrap();
        assert_relative_eq!(one.re, PI, max_relative = 1e-12);
        assert!(one.im.abs() < 1e-14);
        let z = integrate(&FunctionHandle::z(), &grid, Some(&gw)).unwrap();
        assert!(z.norm() < 1e-12);
        let r2 = FunctionHandle::new("|z|^2", |z| c(z.norm_sqr(), 0.0));
        assert_relative_eq!(integrate(&r2, &grid, Some(&gw)).unwrap().re, PI, max_relative = 1e-10);
        assert_relative_eq!(inner(&FunctionHandle::z(), &FunctionHandle::z(), &grid, Some(&gw)).unwrap().re, PI, max_relative = 1e-12);
        assert!(inner(&FunctionHandle::z(), &FunctionHandle::zpow(2), &grid, Some(&gw)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn unweighted_norms() {
        let one = FunctionHandle::one();
        let ann = Region::Annulus { center: c(0.0, 0.0), r1: 1.0, r2: 2.0 };
        assert_relative_eq!(norm_p_region(&one, &ann, None, 2.0).unwrap(), (3.0 * PI).sqrt(), max_relative = 1e-13);
        let disc = Region::Disc { center: c(0.0, 0.0), radius: 1.0 };
        assert_relative_eq!(norm_p_region(&FunctionHandle::z(), &disc, None, 2.0).unwrap(), (PI / 2.0).sqrt(), max_relative = 1e-13);
        let grid = GridSpec::default().build().unwrap();
        assert_relative_eq!(norm_p(&one, &grid, Some(&Weight::Gaussian), 2.0).unwrap(), PI.sqrt(), max_relative = 1e-12);
        assert!(norm_p(&one, &grid, None, 0.5).is_err());
    }

    #[test]
    fn grid_spec_json() {
        let spec = GridSpec::from_json(r#"{"R":8,"n_r":160,"n_theta":256}"#).unwrap();
        assert_eq!(spec, GridSpec::default());
        assert!(GridSpec::from_json(r#"{"R":8,"n_r":160,"n_theta":256,"x":1}"#).is_err());
        assert!(GridSpec::from_json(r#"{"R":-1,"n_r":160,"n_theta":256}"#).is_err());
    }

    #[test]
    fn weight_parsing() {
        assert!(matches!(Weight::parse("gaussian").unwrap(), Weight::Gaussian));
        assert!(matches!(Weight::parse("exponential:2").unwrap(), Weight::Exponential(k) if k == 2.0));
        assert!(Weight::parse("exponential:-1").is_err());
        assert!(Weight::parse("uniform").is_err());
    }
}

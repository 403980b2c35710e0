//! Discrete zero sets and entire generators vanishing simply on them.
//!
//! The generator `g` together with `z` generates the algebra of functions
//! whose restrictions to circles about zeros of `g` extend holomorphically:
//! on `|z - a| = r` we have `conj(z) = conj(a) + r^2 / (z - a)`, so
//! `conj(z) g(z)` extends whenever `g(a) = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive cube root of unity `e^{2 pi i / 3}`.
pub fn omega() -> Complex64 {
    Complex64::new(-0.5, 3f64.sqrt() / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ZeroSetKind {
    TripleLattice { spacing: f64, radius: f64 },
    DiscDyadic { n_max: u32, k: u32 },
    Explicit,
}

/// A finite discrete set of points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    kind: ZeroSetKind,
    points: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroSetFile {
    kind: String,
    #[serde(default)]
    params: serde_json::Value,
    points: Vec<[f64; 2]>,
}

impl ZeroSet {
    /// `{s j, s j omega, s j omega^2 : j in Z}` truncated to `|a| <= radius`.
    pub fn triple_lattice(spacing: f64, radius: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::param(format!("lattice spacing must be positive, got {spacing}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(format!("lattice radius must be positive, got {radius}")));
        }
        let jmax = (radius / spacing).floor() as i64;
        let w = omega();
        let mut points = vec![Complex64::new(0.0, 0.0)];
        for dir in [Complex64::new(1.0, 0.0), w, w * w] {
            for j in 1..=jmax {
                for sign in [1.0, -1.0] {
                    let a = dir * (sign * j as f64 * spacing);
                    if a.norm() <= radius * (1.0 + 1e-12) {
                        points.push(a);
                    }
                }
            }
        }
        Ok(ZeroSet {
            kind: ZeroSetKind::TripleLattice { spacing, radius },
            points,
        })
    }

    /// Vertices of `k 2^n` regular pentagons per dyadic annulus
    /// `1 - 2^-n <= |z| < 1 - 2^-(n+1)`, `n = 1..=n_max`.
    ///
    /// Pentagons have side `2^-(n+2)` and centers equally spaced on
    /// `|z| = 1 - 3 * 2^-(n+2)`, one vertex pointing radially outward.
    pub fn disc_dyadic(n_max: u32, k: u32) -> Result<Self> {
        if n_max < 1 || k < 1 {
            return Err(Error::param("disc_zero_set needs n_max >= 1 and k >= 1"));
        }
        if n_max > 24 {
            return Err(Error::param(format!("n_max = {n_max} is too large (max 24)")));
        }
        let circum = 1.0 / (2.0 * (PI / 5.0).sin());
        let mut points = Vec::new();
        for n in 1..=n_max {
            let unit = 2f64.powi(-(n as i32) - 2);
            let centre_radius = 1.0 - 3.0 * unit;
            let rp = unit * circum;
            let count = k as usize * (1usize << n);
            // neighbouring pentagons must not overlap
            let spacing = 2.0 * centre_radius * (PI / count as f64).sin();
            if spacing <= 2.0 * rp {
                return Err(Error::param(format!(
                    "k = {k} packs pentagons too densely on annulus {n}"
                )));
            }
            for c in 0..count {
                let alpha = 2.0 * PI * c as f64 / count as f64;
                let centre = Complex64::from_polar(centre_radius, alpha);
                for v in 0..5 {
                    let beta = alpha + 2.0 * PI * v as f64 / 5.0;
                    points.push(centre + Complex64::from_polar(rp, beta));
                }
            }
        }
        Ok(ZeroSet {
            kind: ZeroSetKind::DiscDyadic { n_max, k },
            points,
        })
    }

    /// Vertices of a regular `n`-gon of circumradius `radius` centred at 0.
    pub fn regular_polygon(n: usize, radius: f64, rotation: f64) -> Result<Self> {
        if n < 3 || !(radius > 0.0) {
            return Err(Error::param("regular polygon needs n >= 3 and radius > 0"));
        }
        let pts = (0..n)
            .map(|j| Complex64::from_polar(radius, rotation + 2.0 * PI * j as f64 / n as f64))
            .collect();
        Self::explicit(pts)
    }

    pub fn explicit(points: Vec<Complex64>) -> Result<Self> {
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::InvalidInput("zero set contains a non-finite point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].iter().any(|q| q == p) {
                return Err(Error::InvalidInput(format!("duplicate point {p}")));
            }
        }
        Ok(ZeroSet {
            kind: ZeroSetKind::Explicit,
            points,
        })
    }

    pub fn kind(&self) -> &ZeroSetKind {
        &self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.points.iter().any(|p| (p - z).norm() <= tol)
    }

    /// The set `X / n`, kept as an explicit point list.
    pub fn scaled_down(&self, n: u32) -> ZeroSet {
        let s = n as f64;
        ZeroSet {
            kind: ZeroSetKind::Explicit,
            points: self.points.iter().map(|p| p / s).collect(),
        }
    }

    /// Points sorted by increasing modulus (ties broken by argument).
    pub fn by_modulus(&self) -> Vec<Complex64> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then(a.arg().total_cmp(&b.arg()))
        });
        pts
    }

    pub fn to_json(&self) -> String {
        let (kind, params) = match &self.kind {
            ZeroSetKind::TripleLattice { spacing, radius } => (
                "triple-lattice",
                serde_json::json!({ "spacing": spacing, "radius": radius }),
            ),
            ZeroSetKind::DiscDyadic { n_max, k } => {
                ("disc-dyadic", serde_json::json!({ "n_max": n_max, "k": k }))
            }
            ZeroSetKind::Explicit => ("explicit", serde_json::json!({})),
        };
        let file = ZeroSetFile {
            kind: kind.to_string(),
            params,
            points: self.points.iter().map(|p| [p.re, p.im]).collect(),
        };
        serde_json::to_string_pretty(&file).expect("zero set serializes")
    }

    /// Parses `{"kind":..., "params":..., "points":[[re,im],...]}`.
    ///
    /// Lattice kinds are regenerated from their parameters and must agree
    /// with the listed points.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ZeroSetFile = serde_json::from_str(text)?;
        let listed: Vec<Complex64> = file
            .points
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let rebuilt = match file.kind.as_str() {
            "explicit" => return Self::explicit(listed),
            "triple-lattice" => {
                let spacing = json_f64(&file.params, "spacing")?;
                let radius = json_f64(&file.params, "radius")?;
                Self::triple_lattice(spacing, radius)?
            }
            "disc-dyadic" => {
                let n_max = json_u32(&file.params, "n_max")?;
                let k = json_u32(&file.params, "k")?;
                Self::disc_dyadic(n_max, k)?
            }
            other => return Err(Error::Parse(format!("unknown zero-set kind {other:?}"))),
        };
        if rebuilt.points.len() != listed.len()
            || rebuilt
                .points
                .iter()
                .zip(&listed)
                .any(|(a, b)| (a - b).norm() > 1e-9 * (1.0 + a.norm()))
        {
            return Err(Error::Parse(
                "listed points disagree with the zero-set parameters".into(),
            ));
        }
        Ok(rebuilt)
    }
}

fn json_f64(v: &serde_json::Value, key: &str) -> Result<f64> {
    v.get(key)
        .and_then(|x| x.as_f64())
        .ok_or_else(|| Error::Parse(format!("missing numeric parameter {key:?}")))
}

fn json_u32(v: &serde_json::Value, key: &str) -> Result<u32> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| Error::Parse(format!("missing integer parameter {key:?}")))
}

/// Per-annulus and cumulative sums of `(1 - |a|)^t`.
#[derive(Debug, Clone, Serialize)]
pub struct BlaschkeSums {
    /// Cumulative sums over points ordered by increasing modulus.
    pub partial: Vec<f64>,
    /// `subtotals[n]` sums the points with `1 - 2^-n <= |a| < 1 - 2^-(n+1)`.
    pub subtotals: Vec<f64>,
}

impl BlaschkeSums {
    pub fn total(&self) -> f64 {
        self.partial.last().copied().unwrap_or(0.0)
    }
}

pub fn blaschke_sum(set: &ZeroSet, t: f64) -> Result<BlaschkeSums> {
    if !(t > 0.0) {
        return Err(Error::param(format!("exponent t must be positive, got {t}")));
    }
    if let Some(p) = set.points.iter().find(|p| p.norm() >= 1.0) {
        return Err(Error::InvalidInput(format!("point {p} is not in the open unit disc")));
    }
    let mut partial = Vec::with_capacity(set.len());
    let mut subtotals: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for p in set.by_modulus() {
        let gap = 1.0 - p.norm();
        let term = gap.powf(t);
        acc += term;
        partial.push(acc);
        let level = (-gap.log2()).floor().max(0.0) as usize;
        if subtotals.len() <= level {
            subtotals.resize(level + 1, 0.0);
        }
        subtotals[level] += term;
    }
    Ok(BlaschkeSums { partial, subtotals })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// `(s/pi) G(pi z / s)` with `G(z) = sin z sin(wz) sin(w^2 z) / z^2`.
    /// At `s = pi` this is `G` itself, vanishing on `pi (Z u wZ u w^2 Z)`.
    TripleSine { spacing: f64 },
    /// `z^[0 in X] * prod (1 - z/a) exp(z/a + ... + (z/a)^p / p)` over
    /// the points of the zero set with `|a| <= radius`.
    TruncatedProduct { genus: u32, radius: f64 },
    /// `g(n z) / n`.
    Scaled { base: Box<Generator>, n: u32 },
}

/// An entire function with simple zeros exactly on a discrete set.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    kind: GeneratorKind,
    zeros: Arc<ZeroSet>,
    // nonzero points of the product, cached
    factors: Arc<Vec<Complex64>>,
    has_origin: bool,
}

const TAYLOR_SWITCH: f64 = 1e-2;

impl Generator {
    /// The standard triple-sine generator on its natural lattice
    /// `pi (Z u wZ u w^2 Z)` truncated to `|a| <= radius` for bookkeeping.
    pub fn triple_sine(radius: f64) -> Result<Self> {
        Self::triple_sine_with_spacing(PI, radius)
    }

    /// Triple-sine generator rescaled to vanish on the lattice of spacing `s`,
    /// normalized so `g'(0) = 1`.
    pub fn triple_sine_with_spacing(spacing: f64, radius: f64) -> Result<Self> {
        let zeros = ZeroSet::triple_lattice(spacing, radius)?;
        Ok(Generator {
            kind: GeneratorKind::TripleSine { spacing },
            zeros: Arc::new(zeros),
            factors: Arc::new(Vec::new()),
            has_origin: true,
        })
    }

    pub fn truncated_product(zeros: ZeroSet, genus: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::param(format!("truncation radius must be positive, got {radius}")));
        }
        let has_origin = zeros.points().iter().any(|p| p.norm() == 0.0);
        let factors = zeros
            .points()
            .iter()
            .copied()
            .filter(|p| p.norm() > 0.0 && p.norm() <= radius)
            .collect();
        Ok(Generator {
            kind: GeneratorKind::TruncatedProduct { genus, radius },
            zeros: Arc::new(zeros),
            factors: Arc::new(factors),
            has_origin,
        })
    }

    /// `g_n(z) = g(n z) / n`, vanishing on `X / n` with `g_n'(0) = g'(0)`.
    pub fn scaled(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("scale n must be a positive integer"));
        }
        Ok(Generator {
            kind: GeneratorKind::Scaled {
                base: Box::new(self.clone()),
                n,
            },
            zeros: Arc::new(self.zeros.scaled_down(n)),
            factors: Arc::new(Vec::new()),
            has_origin: self.has_origin,
        })
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zeros
    }

    /// Exponential type of `g` (`log|g(z)| <~ type * |z|`), used to size grids.
    pub fn growth_type(&self) -> f64 {
        match &self.kind {
            // sum_k |Im(w^k z)| <= 2|z|
            GeneratorKind::TripleSine { spacing } => 2.0 * PI / spacing,
            // finite products grow polynomially; genus factors are bounded by
            // the reciprocal sum, which cancels on symmetric sets
            GeneratorKind::TruncatedProduct { .. } => 1.0,
            GeneratorKind::Scaled { base, n } => base.growth_type() * *n as f64,
        }
    }

    /// Returns `(g(z), g'(z))`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (g, dg) = match &self.kind {
            GeneratorKind::TripleSine { spacing } => {
                let scale = PI / spacing;
                let (g, dg) = triple_sine(z * scale);
                (g / scale, dg)
            }
            GeneratorKind::TruncatedProduct { genus, .. } => self.product(z, *genus),
            GeneratorKind::Scaled { base, n } => {
                let s = *n as f64;
                let (g, dg) = base.eval(z * s)?;
                (g / s, dg)
            }
        };
        if !(g.re.is_finite() && g.im.is_finite() && dg.re.is_finite() && dg.im.is_finite()) {
            return Err(Error::Overflow {
                z,
                log_abs: self.log_abs(z),
            });
        }
        Ok((g, dg))
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|(g, _)| g)
    }

    /// `log|g(z)|`, finite even where `g(z)` itself overflows.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        match &self.kind {
            GeneratorKind::TripleSine { spacing } => {
                let scale = PI / spacing;
                let w = z * scale;
                if w.norm() < TAYLOR_SWITCH {
                    return triple_sine(w).0.norm().ln() - scale.ln();
                }
                let om = omega();
                let lp: f64 = [Complex64::new(1.0, 0.0), om, om * om]
                    .iter()
                    .map(|r| log_abs_sin(r * w))
                    .sum();
                lp - 2.0 * w.norm().ln() - scale.ln()
            }
            GeneratorKind::TruncatedProduct { genus, .. } => {
                let mut acc = if self.has_origin { z.norm().ln() } else { 0.0 };
                for a in self.factors.iter() {
                    let u = z / a;
                    acc += (Complex64::new(1.0, 0.0) - u).norm().ln() + genus_exponent(u, *genus).re;
                }
                acc
            }
            GeneratorKind::Scaled { base, n } => {
                let s = *n as f64;
                base.log_abs(z * s) - s.ln()
            }
        }
    }

    fn product(&self, z: Complex64, genus: u32) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let mut vals = Vec::with_capacity(self.factors.len() + 1);
        let mut ders = Vec::with_capacity(self.factors.len() + 1);
        if self.has_origin {
            vals.push(z);
            ders.push(one);
        }
        for a in self.factors.iter() {
            let u = z / a;
            let e = genus_exponent(u, genus).exp();
            vals.push((one - u) * e);
            // d/du E_p(u) = -u^p exp(u + ... + u^p/p)
            ders.push(-u.powu(genus) * e / a);
        }
        let n = vals.len();
        let mut prefix = vec![one; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * vals[i];
        }
        let mut suffix = one;
        let mut deriv = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            deriv += prefix[i] * ders[i] * suffix;
            suffix *= vals[i];
        }
        (prefix[n], deriv)
    }
}

fn genus_exponent(u: Complex64, genus: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=genus {
        pow *= u;
        acc += pow / k as f64;
    }
    acc
}

/// `log|sin z|` without overflow: `|sin(x+iy)|^2 = sin^2 x + sinh^2 y`.
pub(crate) fn log_abs_sin(z: Complex64) -> f64 {
    let y = z.im.abs();
    if y < 20.0 {
        return z.sin().norm().ln();
    }
    // sinh^2 y = e^{2y}(1 - e^{-2y})^2 / 4
    let e = (-2.0 * y).exp();
    let s = z.re.sin();
    y - std::f64::consts::LN_2 + 0.5 * ((1.0 - e).powi(2) + 4.0 * e * s * s).ln()
}

/// `G(z) = sin z sin(wz) sin(w^2 z) / z^2` and its derivative.
///
/// Since `sum_k (w^k z)^{2j}` vanishes unless `3 | j`,
/// `log(G/z) = -z^6/945 + O(z^12)`, so `G = z - z^7/945 + O(z^13)`.
fn triple_sine(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < TAYLOR_SWITCH {
        let z6 = z.powu(6);
        return (z - z * z6 / 945.0, Complex64::new(1.0, 0.0) - z6 / 135.0);
    }
    let om = omega();
    let args = [z, om * z, om * om * z];
    let roots = [Complex64::new(1.0, 0.0), om, om * om];
    let s: Vec<Complex64> = args.iter().map(|w| w.sin()).collect();
    let c: Vec<Complex64> = args.iter().map(|w| w.cos()).collect();
    let p = s[0] * s[1] * s[2];
    let dp = roots[0] * c[0] * s[1] * s[2] + roots[1] * s[0] * c[1] * s[2] + roots[2] * s[0] * s[1] * c[2];
    let z2 = z * z;
    (p / z2, dp / z2 - p * 2.0 / (z2 * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(ZeroSet::triple_lattice(1.0, 2.5).unwrap().len(), 13);
        let tiny = ZeroSet::triple_lattice(1.0, 0.5).unwrap();
        assert_eq!(tiny.points(), &[c(0.0, 0.0)]);
        assert!(ZeroSet::triple_lattice(0.0, 1.0).is_err());
        assert!(ZeroSet::triple_lattice(1.0, -1.0).is_err());
    }

    #[test]
    fn lattice_half_spacing_matches_brute_force() {
        let set = ZeroSet::triple_lattice(0.5, 1.0).unwrap();
        // brute force over integer pairs (j, branch)
        let w = omega();
        let mut brute = Vec::new();
        for j in -10i32..=10 {
            for d in [c(1.0, 0.0), w, w * w] {
                let p = d * (0.5 * j as f64);
                if p.norm() <= 1.0 + 1e-12 && !brute.iter().any(|q: &Complex64| (q - p).norm() < 1e-12) {
                    brute.push(p);
                }
            }
        }
        assert_eq!(brute.len(), 13);
        assert_eq!(set.len(), brute.len());
        for p in &brute {
            assert!(set.contains(*p, 1e-12));
        }
    }

    #[test]
    fn triple_sine_at_pi_and_origin() {
        let g = Generator::triple_sine(10.0).unwrap();
        let (v, _) = g.eval(c(PI, 0.0)).unwrap();
        assert!(v.norm() < 1e-14);
        let (v0, d0) = g.eval(c(0.0, 0.0)).unwrap();
        assert_eq!(v0, c(0.0, 0.0));
        assert_relative_eq!(d0.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn triple_sine_real_positive_at_one() {
        let g = Generator::triple_sine(10.0).unwrap();
        let (v, _) = g.eval(c(1.0, 0.0)).unwrap();
        let sw = omega().sin();
        let expect = 1f64.sin() * sw.norm_sqr();
        assert!(v.im.abs() < 1e-15);
        assert_relative_eq!(v.re, expect, max_relative = 1e-14);
    }

    #[test]
    fn taylor_branch_matches_direct_evaluation() {
        // just outside the switch radius the direct formula is still accurate
        for z in [c(0.02, 0.0), c(0.0, 0.03), c(0.015, -0.02)] {
            let om = omega();
            let direct = z.sin() * (om * z).sin() * (om * om * z).sin() / (z * z);
            let series = z - z.powu(7) / 945.0;
            assert!((direct - series).norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = Generator::triple_sine(10.0).unwrap();
        let h = 1e-5;
        for z in [c(0.7, 0.3), c(-1.2, 2.1), c(3.0, -0.5), c(0.005, 0.002)] {
            let (_, d) = g.eval(z).unwrap();
            let fd = (g.value(z + h).unwrap() - g.value(z - h).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() < 1e-8 * (1.0 + d.norm()), "z = {z}");
        }
    }

    #[test]
    fn product_generator_vanishes_on_its_points() {
        let set = ZeroSet::regular_polygon(5, 0.5, 0.0).unwrap();
        let g = Generator::truncated_product(set.clone(), 1, 10.0).unwrap();
        for a in set.points() {
            let (v, d) = g.eval(*a).unwrap();
            assert!(v.norm() < 1e-15);
            assert!(d.norm() > 1e-3);
        }
        let h = 1e-6;
        let z = c(0.3, -0.8);
        let fd = (g.value(z + h).unwrap() - g.value(z - h).unwrap()) / (2.0 * h);
        assert!((g.eval(z).unwrap().1 - fd).norm() < 1e-7);
    }

    #[test]
    fn scaled_generator_zeros_and_slope() {
        let g = Generator::triple_sine(8.0).unwrap();
        let g3 = g.scaled(3).unwrap();
        for a in g.zero_set().points() {
            assert!(g3.value(a / 3.0).unwrap().norm() < 1e-12);
        }
        assert_relative_eq!(g3.eval(c(0.0, 0.0)).unwrap().1.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overflow_is_reported_with_log_magnitude() {
        let g = Generator::triple_sine(10.0).unwrap();
        match g.eval(c(0.0, 600.0)) {
            Err(Error::Overflow { log_abs, .. }) => assert!(log_abs > 700.0 && log_abs.is_finite()),
            other => panic!("expected overflow, got {other:?}"),
        }
        let z = c(1.0, 5.0);
        assert_relative_eq!(g.log_abs(z), g.value(z).unwrap().norm().ln(), max_relative = 1e-12);
    }

    #[test]
    fn disc_set_counts_and_moduli() {
        let one = ZeroSet::disc_dyadic(1, 1).unwrap();
        assert_eq!(one.len(), 10);
        let diam = 2.0 * 0.125 / (2.0 * (PI / 5.0).sin());
        for p in one.points() {
            assert!(p.norm() >= 0.5 && p.norm() < 0.75 + diam);
        }
        let three = ZeroSet::disc_dyadic(3, 1).unwrap();
        assert_eq!(three.len(), 70);
        assert!(three.points().iter().all(|p| p.norm() < 1.0));
        assert!(ZeroSet::disc_dyadic(0, 1).is_err());
    }

    #[test]
    fn blaschke_origin_and_outside_points() {
        let origin = ZeroSet::explicit(vec![c(0.0, 0.0)]).unwrap();
        for t in [0.5, 1.0, 3.0] {
            assert_eq!(blaschke_sum(&origin, t).unwrap().total(), 1.0);
        }
        let bad = ZeroSet::explicit(vec![c(1.0, 0.0)]).unwrap();
        assert!(matches!(blaschke_sum(&bad, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn blaschke_subtotals_follow_dyadic_scaling() {
        let set = ZeroSet::disc_dyadic(8, 1).unwrap();
        // brute-force oracle, independent of the annulus bucketing
        for (t, expect) in [(1.5, 2f64.powf(-0.5)), (1.0, 1.0)] {
            let sums = blaschke_sum(&set, t).unwrap();
            let mut per_level = vec![0.0; 9];
            for p in set.points() {
                let n = ((1.0 - p.norm()).log2().abs()).floor() as usize;
                per_level[n] += (1.0 - p.norm()).powf(t);
            }
            for n in 1..=8 {
                assert_relative_eq!(sums.subtotals[n], per_level[n], max_relative = 1e-12);
            }
            for n in 4..8 {
                let ratio = sums.subtotals[n + 1] / sums.subtotals[n];
                assert!((ratio / expect - 1.0).abs() < 0.2, "t={t} n={n} ratio={ratio}");
            }
        }
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let set = ZeroSet::triple_lattice(1.0, 3.0).unwrap();
        let back = ZeroSet::from_json(&set.to_json()).unwrap();
        assert_eq!(back, set);
        let tampered = set.to_json().replacen("1.0", "1.5", 1);
        assert!(ZeroSet::from_json(&tampered).is_err());
        assert!(ZeroSet::from_json(r#"{"kind":"explicit","points":[[0,0]],"extra":1}"#).is_err());
    }
}

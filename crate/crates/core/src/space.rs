//! Finite-dimensional model spaces spanned by `z^m (conj(z) g(z))^n`.
//!
//! Pipeline: [`BasisIndex`] -> [`Basis`] -> [`gram`] -> [`orthonormalize`]
//! -> [`KernelRep`]. The holomorphic block (`n = 0`) is pivoted before the
//! rest, so the leading orthonormal functions span exactly that block and
//! the kernel splits into a holomorphic part and a remainder.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::generator::Generator;
use crate::quadrature::{PolarGrid, Weight};

pub const DEFAULT_DROP_TOL: f64 = 1e-10;
pub const DEFAULT_DEGREE_WEIGHT: usize = 3;

/// Index pairs `(m, n)` in lexicographic `(n, m)` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisIndex {
    pairs: Vec<(usize, usize)>,
}

impl BasisIndex {
    /// All `(m, n)` with `m + weight * n <= cutoff`.
    pub fn weighted(cutoff: usize, degree_weight: usize) -> Self {
        let weight = degree_weight.max(1);
        let pairs = (0..=cutoff / weight)
            .flat_map(|n| (0..=cutoff - weight * n).map(move |m| (m, n)))
            .collect();
        BasisIndex { pairs }
    }

    /// All `(m, n)` with `m <= max_m`, `n <= max_n`.
    pub fn rect(max_m: usize, max_n: usize) -> Self {
        let pairs = (0..=max_n).flat_map(|n| (0..=max_m).map(move |m| (m, n))).collect();
        BasisIndex { pairs }
    }

    pub fn holomorphic(max_m: usize) -> Self {
        Self::rect(max_m, 0)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_n(&self) -> usize {
        self.pairs.iter().map(|p| p.1).max().unwrap_or(0)
    }

    pub fn max_m(&self) -> usize {
        self.pairs.iter().map(|p| p.0).max().unwrap_or(0)
    }

    pub fn holomorphic_len(&self) -> usize {
        self.pairs.iter().filter(|p| p.1 == 0).count()
    }
}

#[derive(Clone, Debug)]
enum Source {
    Monomial { gen: Generator, index: BasisIndex },
    Functions(Vec<FunctionHandle>),
}

/// Basis functions with a joint evaluator.
#[derive(Clone, Debug)]
pub struct Basis {
    source: Source,
    /// `groups[j] == 0` marks the holomorphic block.
    groups: Vec<usize>,
}

impl Basis {
    pub fn monomial(gen: &Generator, index: BasisIndex) -> Self {
        let groups = index.pairs().iter().map(|&(_, n)| usize::from(n > 0)).collect();
        Basis {
            source: Source::Monomial {
                gen: gen.clone(),
                index,
            },
            groups,
        }
    }

    /// Arbitrary functions, all in one pivot group.
    pub fn functions(funcs: Vec<FunctionHandle>) -> Self {
        let groups = vec![0; funcs.len()];
        Basis {
            source: Source::Functions(funcs),
            groups,
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn index(&self) -> Option<&BasisIndex> {
        match &self.source {
            Source::Monomial { index, .. } => Some(index),
            Source::Functions(_) => None,
        }
    }

    pub fn generator(&self) -> Option<&Generator> {
        match &self.source {
            Source::Monomial { gen, .. } => Some(gen),
            Source::Functions(_) => None,
        }
    }

    /// Writes all basis values at `z` into `out`.
    pub fn eval_into(&self, z: Complex64, out: &mut [Complex64]) -> Result<()> {
        match &self.source {
            Source::Monomial { gen, index } => {
                let w = z.conj() * gen.value(z)?;
                let (mm, nn) = (index.max_m(), index.max_n());
                let zp: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * z))
                    .take(mm + 1)
                    .collect();
                let wp: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * w))
                    .take(nn + 1)
                    .collect();
                for (o, &(m, n)) in out.iter_mut().zip(index.pairs()) {
                    *o = zp[m] * wp[n];
                }
            }
            Source::Functions(fs) => {
                for (o, f) in out.iter_mut().zip(fs) {
                    *o = f.eval(z);
                }
            }
        }
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Overflow {
                z,
                log_abs: f64::INFINITY,
            });
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.eval_into(z, &mut out)?;
        Ok(out)
    }

    /// The `j`-th basis function as a standalone handle.
    pub fn handle(&self, j: usize) -> FunctionHandle {
        match &self.source {
            Source::Functions(fs) => fs[j].clone(),
            Source::Monomial { gen, index } => {
                let (m, n) = index.pairs()[j];
                let gen = gen.clone();
                FunctionHandle::new(format!("e_{m}{n}"), move |z| match gen.value(z) {
                    Ok(g) => z.powu(m as u32) * (z.conj() * g).powu(n as u32),
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                })
            }
        }
    }

    /// Ring-parallel accumulation of `sum_nodes row(z) * measure`, where
    /// `row` maps the basis values at a node to a vector of length `len`.
    fn accumulate<F>(&self, grid: &PolarGrid, weight: Option<&Weight>, len: usize, row: F) -> Result<Vec<Complex64>>
    where
        F: Fn(Complex64, &[Complex64], f64, &mut [Complex64]) + Sync,
    {
        let points = grid.points();
        let measure = grid.measure(weight);
        let nt = grid.n_theta();
        let rings: Vec<Result<Vec<Complex64>>> = points
            .par_chunks(nt)
            .zip(measure.par_chunks(nt))
            .map(|(pts, mus)| {
                let mut acc = vec![Complex64::new(0.0, 0.0); len];
                let mut vals = vec![Complex64::new(0.0, 0.0); self.len()];
                for (z, mu) in pts.iter().zip(mus) {
                    self.eval_into(*z, &mut vals)?;
                    row(*z, &vals, *mu, &mut acc);
                }
                Ok(acc)
            })
            .collect();
        let mut total = vec![Complex64::new(0.0, 0.0); len];
        for ring in rings {
            for (t, r) in total.iter_mut().zip(ring?) {
                *t += r;
            }
        }
        Ok(total)
    }
}

/// Picks a Gaussian-weight grid wide enough for `|conj(z) g|^{2N} e^{-|z|^2}`.
///
/// The integrand peaks near `r = sigma N` (sigma the exponential type of
/// `g`); `R = 8 + sigma N` keeps the truncated tail below `e^{-64}`
/// relative to the peak. The angular count resolves `e^{2 sigma N r}`.
pub fn model_grid(basis: &Basis, weight: &Weight) -> Result<PolarGrid> {
    let n_max = basis.index().map_or(0, |i| i.max_n()) as f64;
    let m_max = basis.index().map_or(0, |i| i.max_m()) as f64;
    let sigma = basis.generator().map_or(0.0, |g| g.growth_type());
    let radius = match weight {
        Weight::Gaussian => 8.0 + sigma * n_max,
        Weight::Exponential(k) => {
            let excess = k - 2.0 * sigma * n_max;
            if excess <= 0.0 {
                return Err(crate::error::Error::param(format!(
                    "e^(-{k}|z|) does not integrate |conj(z) g|^(2N) with N = {n_max}"
                )));
            }
            // find R with excess R - 2 (m + n) log R > 40
            let mut r: f64 = 8.0;
            while excess * r - 2.0 * (m_max + n_max) * r.ln() < 40.0 {
                r *= 1.25;
            }
            r
        }
        Weight::CustomRadial(_) => 8.0 + sigma * n_max,
    };
    let wanted = (4.0 * sigma * n_max * radius).max(256.0) as usize;
    let n_theta = wanted.next_power_of_two();
    let n_r = if n_max > 0.0 { 192 } else { 160 };
    PolarGrid::plane(radius, n_r, n_theta)
}

/// Basis functions `z^m (conj(z) g)^n`, each scaled to unit weighted norm.
pub fn build_basis(gen: &Generator, index: BasisIndex, grid: &PolarGrid, weight: &Weight) -> Result<Vec<FunctionHandle>> {
    let basis = Basis::monomial(gen, index);
    let g = gram(&basis, grid, weight)?;
    Ok((0..basis.len())
        .map(|j| basis.handle(j).scaled(Complex64::new(g.scales[j], 0.0)))
        .collect())
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    /// Raw Gram matrix `<e_j, e_k>`, Hermitian.
    pub matrix: DMatrix<Complex64>,
    /// `1 / sqrt(G_jj)`.
    pub scales: Vec<f64>,
    /// Eigenvalues of the diagonally normalized matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub condition: f64,
    pub groups: Vec<usize>,
}

impl GramMatrix {
    pub fn normalized(&self) -> DMatrix<Complex64> {
        let n = self.matrix.nrows();
        DMatrix::from_fn(n, n, |i, j| self.matrix[(i, j)] * (self.scales[i] * self.scales[j]))
    }

    pub fn rank(&self, drop_tol: f64) -> usize {
        let top = self.eigenvalues.last().copied().unwrap_or(0.0);
        self.eigenvalues.iter().filter(|&&e| e > drop_tol * top).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,re,im\n");
        for j in 0..self.matrix.nrows() {
            for k in 0..self.matrix.ncols() {
                let v = self.matrix[(j, k)];
                let _ = writeln!(out, "{j},{k},{:.17e},{:.17e}", v.re, v.im);
            }
        }
        out
    }
}

fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `G_jk = <e_j, e_k>` on the grid, symmetrized.
pub fn gram(basis: &Basis, grid: &PolarGrid, weight: &Weight) -> Result<GramMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let nb = basis.len();
    let flat = basis.accumulate(grid, Some(weight), nb * nb, |_, v, mu, acc| {
        for j in 0..nb {
            let vj = v[j] * mu;
            for k in 0..nb {
                acc[j * nb + k] += vj * v[k].conj();
            }
        }
    })?;
    let raw = DMatrix::from_row_slice(nb, nb, &flat);
    let matrix = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let scales: Vec<f64> = (0..nb)
        .map(|j| {
            let d = matrix[(j, j)].re;
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    if scales.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(Error::Degenerate("a basis function has zero or non-finite norm".into()));
    }
    let mut g = GramMatrix {
        matrix,
        scales,
        eigenvalues: Vec::new(),
        condition: 0.0,
        groups: basis.groups.clone(),
    };
    let ev = eigenvalues(&g.normalized());
    let (lo, hi) = (ev[0], ev[nb - 1]);
    if lo < -1e-10 * hi {
        return Err(Error::NumericalBreakdown {
            min_eigenvalue: lo,
            scale: hi,
        });
    }
    g.condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    g.eigenvalues = ev;
    Ok(g)
}

/// Pivoted outer-product Cholesky on a Hermitian PSD matrix with unit
/// diagonal. Pivots are chosen group by group (ascending group id);
/// within a group the largest residual diagonal goes first. A group is
/// exhausted once its largest residual drops below `drop_tol`.
fn pivoted_cholesky(a: &DMatrix<Complex64>, groups: &[usize], drop_tol: f64) -> (Vec<usize>, DMatrix<Complex64>, Vec<usize>) {
    let n = a.nrows();
    let mut work = a.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    let mut dropped = Vec::new();
    let mut group_ids: Vec<usize> = groups.to_vec();
    group_ids.sort_unstable();
    group_ids.dedup();
    for gid in group_ids {
        loop {
            let best = remaining
                .iter()
                .copied()
                .filter(|&i| groups[i] == gid)
                .max_by(|&i, &j| work[(i, i)].re.total_cmp(&work[(j, j)].re).then(j.cmp(&i)));
            let Some(p) = best else { break };
            let d = work[(p, p)].re;
            if d < drop_tol {
                dropped.extend(remaining.iter().copied().filter(|&i| groups[i] == gid));
                remaining.retain(|&i| groups[i] != gid);
                break;
            }
            let root = d.sqrt();
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for &i in &remaining {
                col[i] = work[(i, p)] / root;
            }
            remaining.retain(|&i| i != p);
            for &i in &remaining {
                for &j in &remaining {
                    work[(i, j)] -= col[i] * col[j].conj();
                }
            }
            pivots.push(p);
            columns.push(col);
        }
    }
    let r = pivots.len();
    let l = DMatrix::from_fn(r, r, |s, t| if s >= t { columns[t][pivots[s]] } else { Complex64::new(0.0, 0.0) });
    dropped.sort_unstable();
    (pivots, l, dropped)
}

fn lower_inverse(l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = l.nrows();
    let mut inv = DMatrix::identity(n, n);
    if !l.solve_lower_triangular_mut(&mut inv) {
        // zero pivot cannot occur after dropping small pivots
        unreachable!("singular triangular factor");
    }
    inv
}

/// Orthonormal functions `phi_k = sum_j coef[k, j] e_j` with
/// `K(z, w) = sum_k phi_k(z) conj(phi_k(w))`.
#[derive(Debug, Clone)]
pub struct KernelRep {
    basis: Arc<Basis>,
    /// `rank x basis.len()`, coefficients on the raw (unnormalized) basis.
    pub coef: DMatrix<Complex64>,
    pub rank: usize,
    /// Number of leading `phi_k` spanning the holomorphic block.
    pub holomorphic_rank: usize,
    pub pivots: Vec<usize>,
    pub dropped: Vec<usize>,
    pub weight: String,
}

pub fn orthonormalize(basis: &Basis, g: &GramMatrix, drop_tol: f64) -> Result<KernelRep> {
    let a = g.normalized();
    let (pivots, l, dropped) = pivoted_cholesky(&a, &g.groups, drop_tol);
    if pivots.is_empty() {
        return Err(Error::Degenerate("Gram matrix has numerical rank 0".into()));
    }
    let sub = DMatrix::from_fn(pivots.len(), pivots.len(), |s, t| a[(pivots[s], pivots[t])]);
    let mut c = lower_inverse(&l);
    // one refinement pass restores orthonormality lost to rounding
    let g2 = &c * &sub * c.adjoint();
    let g2 = (&g2 + g2.adjoint()) * Complex64::new(0.5, 0.0);
    if let Some(ch) = Cholesky::new(g2) {
        c = lower_inverse(&ch.l()) * c;
    }
    let r = pivots.len();
    let nb = basis.len();
    let mut coef = DMatrix::zeros(r, nb);
    for k in 0..r {
        for (s, &p) in pivots.iter().enumerate() {
            coef[(k, p)] = c[(k, s)] * g.scales[p];
        }
    }
    let holomorphic_rank = pivots.iter().filter(|&&p| g.groups[p] == 0).count();
    Ok(KernelRep {
        basis: Arc::new(basis.clone()),
        coef,
        rank: r,
        holomorphic_rank,
        pivots,
        dropped,
        weight: String::new(),
    })
}

impl KernelRep {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// `(phi_0(z), ..., phi_{r-1}(z))`.
    pub fn phi(&self, z: Complex64) -> Result<DVector<Complex64>> {
        let v = DVector::from_vec(self.basis.eval(z)?);
        Ok(&self.coef * v)
    }

    pub fn kernel_eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let (h, rest) = self.kernel_split(z, w)?;
        Ok(h + rest)
    }

    /// Holomorphic-block part and remainder of `K(z, w)`.
    pub fn kernel_split(&self, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
        let pz = self.phi(z)?;
        let pw = self.phi(w)?;
        let mut holo = Complex64::new(0.0, 0.0);
        let mut rest = Complex64::new(0.0, 0.0);
        for k in 0..self.rank {
            let t = pz[k] * pw[k].conj();
            if k < self.holomorphic_rank {
                holo += t;
            } else {
                rest += t;
            }
        }
        Ok((holo, rest))
    }

    /// `sqrt(K(z, z))`: the best constant in `|f(z)| <= C ||f||` on the span.
    pub fn point_eval_bound(&self, z: Complex64) -> Result<f64> {
        Ok(self.phi(z)?.norm())
    }

    /// `<phi_j, phi_k>` recomputed on a grid.
    pub fn orthonormality_defect(&self, grid: &PolarGrid, weight: &Weight) -> Result<f64> {
        let g = gram(&self.basis, grid, weight)?;
        let m = &self.coef * &g.matrix * self.coef.adjoint();
        let id = DMatrix::<Complex64>::identity(self.rank, self.rank);
        Ok((m - id).iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// `<f, phi_k>` for every `k`.
    pub fn coefficients_of(&self, f: &FunctionHandle, grid: &PolarGrid, weight: &Weight) -> Result<DVector<Complex64>> {
        let nb = self.basis.len();
        let raw = self.basis.accumulate(grid, Some(weight), nb, |z, v, mu, acc| {
            let fz = f.eval(z) * mu;
            for j in 0..nb {
                acc[j] += fz * v[j].conj();
            }
        })?;
        if raw.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::EvaluatorFailure {
                index: 0,
                z: Complex64::new(f64::NAN, f64::NAN),
            });
        }
        let raw = DVector::from_vec(raw);
        Ok(self.coef.conjugate() * raw)
    }

    /// Orthogonal projection `T f = sum_k <f, phi_k> phi_k`.
    pub fn project(&self, f: &FunctionHandle, grid: &PolarGrid, weight: &Weight) -> Result<FunctionHandle> {
        let a = self.coefficients_of(f, grid, weight)?;
        let combo = self.coef.transpose() * a;
        Ok(self.combination(combo.as_slice(), format!("T({})", f.label())))
    }

    /// `sum_j c_j e_j` as a handle (coefficients on the raw basis).
    pub fn combination(&self, c: &[Complex64], label: impl Into<String>) -> FunctionHandle {
        let basis = self.basis.clone();
        let c = c.to_vec();
        FunctionHandle::new(label, move |z| match basis.eval(z) {
            Ok(v) => v.iter().zip(&c).map(|(a, b)| a * b).sum(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        })
    }

    /// Unit-norm element `sum_k a_k phi_k` for `a` on the unit sphere.
    pub fn element(&self, a: &[Complex64]) -> FunctionHandle {
        let a = DVector::from_column_slice(a);
        let combo = self.coef.transpose() * a;
        self.combination(combo.as_slice(), "span element")
    }

    pub fn kernel_csv(&self, points: &[Complex64]) -> Result<String> {
        let mut out = String::from("z_re,z_im,w_re,w_im,K_re,K_im\n");
        for z in points {
            for w in points {
                let k = self.kernel_eval(*z, *w)?;
                let _ = writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", z.re, z.im, w.re, w.im, k.re, k.im);
            }
        }
        Ok(out)
    }
}

/// A complete model space: basis, Gram matrix, kernel and grid.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    pub basis: Basis,
    pub gram: GramMatrix,
    pub kernel: KernelRep,
    pub grid: PolarGrid,
    pub weight: Weight,
}

impl ModelSpace {
    pub fn build(basis: Basis, weight: Weight, grid: Option<PolarGrid>, drop_tol: f64) -> Result<Self> {
        let grid = match grid {
            Some(g) => g,
            None => model_grid(&basis, &weight)?,
        };
        let gram = gram(&basis, &grid, &weight)?;
        let mut kernel = orthonormalize(&basis, &gram, drop_tol)?;
        kernel.weight = weight.name();
        Ok(ModelSpace {
            basis,
            gram,
            kernel,
            grid,
            weight,
        })
    }

    pub fn monomial(gen: &Generator, index: BasisIndex, weight: Weight) -> Result<Self> {
        Self::build(Basis::monomial(gen, index), weight, None, DEFAULT_DROP_TOL)
    }

    /// Weighted `L^2` norm of `f` on the model grid.
    pub fn norm(&self, f: &FunctionHandle) -> Result<f64> {
        crate::quadrature::norm_p(f, &self.grid, Some(&self.weight), 2.0)
    }
}

/// `e^{z conj(w)} / pi`, the Fock-space kernel for `<z^m, z^m> = pi m!`.
pub fn fock_kernel(z: Complex64, w: Complex64) -> Result<Complex64> {
    let v = (z * w.conj()).exp() / PI;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow {
            z: z * w.conj(),
            log_abs: (z * w.conj()).re - PI.ln(),
        });
    }
    Ok(v)
}

/// `sum_{m <= M} (z conj(w))^m / (pi m!)`.
pub fn truncated_fock_kernel(z: Complex64, w: Complex64, max_m: usize) -> Complex64 {
    let u = z * w.conj();
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = term;
    for m in 1..=max_m {
        term *= u / m as f64;
        acc += term;
    }
    acc / PI
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub dimension: usize,
    pub rank: usize,
    /// `sup |K_n - e^{z conj w}/pi|`
    pub deviation: f64,
    /// `sup |K_n^holo - e^{z conj w}/pi|`
    pub holomorphic_deviation: f64,
    /// `sup |K_n - K_n^holo|`
    pub non_holomorphic_part: f64,
    pub condition: f64,
    /// "ok" or the reason the space could not be built.
    pub status: String,
}

impl ConvergenceRow {
    fn failed(n: u32, dimension: usize, status: String) -> Self {
        ConvergenceRow {
            n,
            dimension,
            rank: 0,
            deviation: f64::NAN,
            holomorphic_deviation: f64::NAN,
            non_holomorphic_part: f64::NAN,
            condition: f64::NAN,
            status,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    /// Dimension of the common subspace of all model spaces.
    pub dimension: usize,
    pub holomorphic_dimension: usize,
    /// Largest mass of a common direction outside the holomorphic block.
    pub non_holomorphic_leak: f64,
    /// Eigenvalues of the averaged projection, descending.
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub intersection: Option<IntersectionReport>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,dimension,rank,deviation,holomorphic_deviation,non_holomorphic_part,condition,status\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{}",
                r.n,
                r.dimension,
                r.rank,
                r.deviation,
                r.holomorphic_deviation,
                r.non_holomorphic_part,
                r.condition,
                r.status.replace(',', ";")
            );
        }
        out
    }
}

const INTERSECTION_TOL: f64 = 1e-6;

/// Builds the model space over `X/n` with `g_n(z) = g(nz)/n` for each `n`
/// and compares its kernel with the Fock kernel on `eval_points`.
pub fn kernel_convergence_experiment(
    base: &Generator,
    n_list: &[u32],
    index: &BasisIndex,
    eval_points: &[Complex64],
) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput("empty scale list".into()));
    }
    let gens = n_list.iter().map(|&n| base.scaled(n)).collect::<Result<Vec<_>>>()?;
    // one grid wide enough for every scale that can be represented
    let mut built: Vec<(u32, Result<ModelSpace>)> = Vec::new();
    let mut widest: Option<PolarGrid> = None;
    for (n, g) in n_list.iter().zip(&gens) {
        let basis = Basis::monomial(g, index.clone());
        let own = model_grid(&basis, &Weight::Gaussian)?;
        let grid = match &widest {
            Some(w) if w.radii().1 >= own.radii().1 && w.n_theta() >= own.n_theta() => w.clone(),
            _ => own,
        };
        let space = ModelSpace::build(basis, Weight::Gaussian, Some(grid.clone()), DEFAULT_DROP_TOL);
        if space.is_ok() {
            widest = Some(grid);
        }
        built.push((*n, space));
    }
    // rebuild the successful spaces on the final common grid
    let mut spaces = Vec::new();
    let mut rows = Vec::new();
    for (n, space) in built {
        let space = match (space, &widest) {
            (Ok(s), Some(w)) => ModelSpace::build(s.basis, Weight::Gaussian, Some(w.clone()), DEFAULT_DROP_TOL),
            (Err(e), _) => Err(e),
            (Ok(_), None) => unreachable!("a successful build sets the grid"),
        };
        let space = match space {
            Ok(s) => s,
            Err(e) => {
                rows.push(ConvergenceRow::failed(n, index.len(), e.to_string()));
                continue;
            }
        };
        let (mut dev, mut hdev, mut rest) = (0.0f64, 0.0f64, 0.0f64);
        for z in eval_points {
            for w in eval_points {
                let (h, r) = space.kernel.kernel_split(*z, *w)?;
                let fk = fock_kernel(*z, *w)?;
                dev = dev.max((h + r - fk).norm());
                hdev = hdev.max((h - fk).norm());
                rest = rest.max(r.norm());
            }
        }
        rows.push(ConvergenceRow {
            n,
            dimension: space.basis.len(),
            rank: space.kernel.rank,
            deviation: dev,
            holomorphic_deviation: hdev,
            non_holomorphic_part: rest,
            condition: space.gram.condition,
            status: "ok".into(),
        });
        spaces.push(space);
    }
    let intersection = match (&widest, spaces.len() > 1) {
        (Some(w), true) => Some(intersection(&spaces, w)?),
        _ => None,
    };
    Ok(ConvergenceTable { rows, intersection })
}

/// Common subspace of several model spaces sharing a grid and weight.
///
/// In the orthonormal coordinates of the first space, the average of the
/// projections onto all spaces has eigenvalue 1 exactly on the
/// intersection.
pub fn intersection(spaces: &[ModelSpace], grid: &PolarGrid) -> Result<IntersectionReport> {
    let first = &spaces[0];
    let r0 = first.kernel.rank;
    let mut avg = DMatrix::<Complex64>::zeros(r0, r0);
    for other in spaces {
        let cross = cross_gram(&first.kernel, &other.kernel, grid, &first.weight)?;
        avg += &cross * cross.adjoint();
    }
    avg /= Complex64::new(spaces.len() as f64, 0.0);
    let avg = (&avg + avg.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(avg);
    let mut order: Vec<usize> = (0..r0).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let common: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| eig.eigenvalues[i] > 1.0 - INTERSECTION_TOL)
        .collect();
    let h = first.kernel.holomorphic_rank;
    let leak = common
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            v.iter().skip(h).map(|c| c.norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(IntersectionReport {
        dimension: common.len(),
        holomorphic_dimension: h,
        non_holomorphic_leak: leak,
        spectrum,
    })
}

/// `<phi^a_k, phi^b_l>` between two kernels' orthonormal systems.
fn cross_gram(a: &KernelRep, b: &KernelRep, grid: &PolarGrid, weight: &Weight) -> Result<DMatrix<Complex64>> {
    let na = a.basis.len();
    let nb = b.basis.len();
    let pts = grid.points();
    let mu = grid.measure(Some(weight));
    let nt = grid.n_theta();
    let rings: Vec<Result<Vec<Complex64>>> = pts
        .par_chunks(nt)
        .zip(mu.par_chunks(nt))
        .map(|(zs, ms)| {
            let mut acc = vec![Complex64::new(0.0, 0.0); na * nb];
            let mut va = vec![Complex64::new(0.0, 0.0); na];
            let mut vb = vec![Complex64::new(0.0, 0.0); nb];
            for (z, m) in zs.iter().zip(ms) {
                a.basis.eval_into(*z, &mut va)?;
                b.basis.eval_into(*z, &mut vb)?;
                for i in 0..na {
                    let x = va[i] * m;
                    for j in 0..nb {
                        acc[i * nb + j] += x * vb[j].conj();
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut raw = vec![Complex64::new(0.0, 0.0); na * nb];
    for ring in rings {
        for (t, r) in raw.iter_mut().zip(ring?) {
            *t += r;
        }
    }
    let raw = DMatrix::from_row_slice(na, nb, &raw);
    Ok(&a.coef * raw * b.coef.adjoint())
}

/// Smallest eigenvalue of `[K(z_i, z_j)]`.
pub fn kernel_matrix_min_eigenvalue(k: &KernelRep, points: &[Complex64]) -> Result<f64> {
    let n = points.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = k.kernel_eval(points[i], points[j])?;
        }
    }
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(eigenvalues(&m)[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GridSpec;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn factorial(m: usize) -> f64 {
        (1..=m).map(|k| k as f64).product()
    }

    #[test]
    fn index_orders() {
        let idx = BasisIndex::weighted(7, 3);
        assert_eq!(idx.pairs()[0], (0, 0));
        assert_eq!(idx.holomorphic_len(), 8);
        assert_eq!(idx.len(), 8 + 5 + 2);
        assert!(idx.pairs().windows(2).all(|w| (w[0].1, w[0].0) < (w[1].1, w[1].0)));
        assert_eq!(BasisIndex::rect(2, 0).pairs(), &[(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn basis_values_at_one() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let basis = Basis::monomial(&gen, BasisIndex::rect(1, 1));
        let v = basis.eval(c(1.0, 0.0)).unwrap();
        // order: (0,0), (1,0), (0,1), (1,1)
        assert!((v[2] - gen.value(c(1.0, 0.0)).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn holomorphic_gram_is_gamma_diagonal() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let basis = Basis::monomial(&gen, BasisIndex::holomorphic(6));
        let grid = GridSpec::default().build().unwrap();
        let g = gram(&basis, &grid, &Weight::Gaussian).unwrap();
        for j in 0..7 {
            for k in 0..7 {
                let expect = if j == k { PI * factorial(j) } else { 0.0 };
                assert!((g.matrix[(j, k)] - expect).norm() < 1e-10 * PI * factorial(j.max(k)));
            }
        }
        assert_eq!(g.matrix, g.matrix.adjoint());
        let k = orthonormalize(&basis, &g, DEFAULT_DROP_TOL).unwrap();
        for (row, &m) in k.pivots.iter().enumerate() {
            assert_relative_eq!(k.coef[(row, m)].norm(), 1.0 / (PI * factorial(m)).sqrt(), max_relative = 1e-10);
        }
    }

    #[test]
    fn identity_gram_gives_identity_transform() {
        let basis = Basis::functions(vec![FunctionHandle::one(), FunctionHandle::z()]);
        let g = GramMatrix {
            matrix: DMatrix::identity(2, 2),
            scales: vec![1.0, 1.0],
            eigenvalues: vec![1.0, 1.0],
            condition: 1.0,
            groups: vec![0, 0],
        };
        let k = orthonormalize(&basis, &g, DEFAULT_DROP_TOL).unwrap();
        assert_eq!(k.rank, 2);
        assert!((k.coef.clone() - DMatrix::identity(2, 2)).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn duplicate_function_loses_one_rank() {
        let funcs = vec![FunctionHandle::one(), FunctionHandle::z(), FunctionHandle::zpow(2), FunctionHandle::z()];
        let basis = Basis::functions(funcs);
        let grid = GridSpec::default().build().unwrap();
        let g = gram(&basis, &grid, &Weight::Gaussian).unwrap();
        let k = orthonormalize(&basis, &g, 1e-10).unwrap();
        assert_eq!(k.rank, 3);
        assert_eq!(k.dropped.len(), 1);
    }

    #[test]
    fn zero_gram_is_degenerate() {
        let basis = Basis::functions(vec![FunctionHandle::constant(c(0.0, 0.0))]);
        let grid = GridSpec::default().build().unwrap();
        assert!(matches!(gram(&basis, &grid, &Weight::Gaussian), Err(Error::Degenerate(_))));
    }

    #[test]
    fn six_fold_symmetry_decouples_low_pairs() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let basis = Basis::monomial(&gen, BasisIndex::rect(1, 1));
        let grid = model_grid(&basis, &Weight::Gaussian).unwrap();
        let g = gram(&basis, &grid, &Weight::Gaussian).unwrap();
        // g has Taylor frequencies 1 mod 6, so <z, conj(z) g> vanishes
        let scale = (g.matrix[(1, 1)].re * g.matrix[(2, 2)].re).sqrt();
        assert!(g.matrix[(1, 2)].norm() < 1e-10 * scale);
    }

    #[test]
    fn holomorphic_kernel_matches_truncated_fock() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let space = ModelSpace::monomial(&gen, BasisIndex::holomorphic(25), Weight::Gaussian).unwrap();
        let k = space.kernel.kernel_eval(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((k - std::f64::consts::E / PI).norm() < 1e-10);
        let (z, w) = (c(0.3, -0.7), c(-0.5, 0.4));
        let k = space.kernel.kernel_eval(z, w).unwrap();
        assert!((k - truncated_fock_kernel(z, w, 25)).norm() < 1e-10);
    }

    #[test]
    fn mixed_space_is_orthonormal_and_reproducing() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let space = ModelSpace::monomial(&gen, BasisIndex::weighted(7, 3), Weight::Gaussian).unwrap();
        assert_eq!(space.kernel.rank, 15);
        assert_eq!(space.kernel.holomorphic_rank, 8);
        let defect = space.kernel.orthonormality_defect(&space.grid, &space.weight).unwrap();
        assert!(defect < 1e-8, "defect {defect}");
        let f = space.basis.handle(9);
        let tf = space.kernel.project(&f, &space.grid, &space.weight).unwrap();
        for z in [c(0.2, 0.1), c(-1.0, 0.5), c(1.5, -1.2)] {
            assert!((tf.eval(z) - f.eval(z)).norm() < 1e-8 * (1.0 + f.eval(z).norm()));
        }
    }

    #[test]
    fn kernel_matrix_is_psd() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let space = ModelSpace::monomial(&gen, BasisIndex::weighted(6, 3), Weight::Gaussian).unwrap();
        let pts: Vec<_> = (0..8).map(|k| c((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin()) * 1.5).collect();
        assert!(kernel_matrix_min_eigenvalue(&space.kernel, &pts).unwrap() > -1e-8);
    }
}

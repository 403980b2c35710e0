use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generator::Generator;

type Evaluator = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A deterministic complex-valued function of one complex variable.
///
/// Evaluators signal failure by returning a non-finite value; checked
/// evaluation turns that into [`Error::EvaluatorFailure`].
#[derive(Clone)]
pub struct FunctionHandle {
    eval: Arc<Evaluator>,
    label: String,
    series: Option<Arc<SeriesRep>>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("label", &self.label)
            .field("series", &self.series.is_some())
            .finish()
    }
}

fn nan() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

impl FunctionHandle {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        FunctionHandle {
            eval: Arc::new(f),
            label: label.into(),
            series: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn series(&self) -> Option<&SeriesRep> {
        self.series.as_deref()
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// Evaluates and reports non-finite output as a failure at `index`.
    #[inline]
    pub fn eval_checked(&self, z: Complex64, index: usize) -> Result<Complex64> {
        let v = (self.eval)(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluatorFailure { index, z })
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn one() -> Self {
        Self::new("1", |_| Complex64::new(1.0, 0.0))
    }

    pub fn z() -> Self {
        Self::new("z", |z| z)
    }

    pub fn zbar() -> Self {
        Self::new("zbar", |z| z.conj())
    }

    pub fn zpow(k: u32) -> Self {
        Self::new(format!("z^{k}"), move |z| z.powu(k))
    }

    pub fn g(gen: &Generator) -> Self {
        let gen = gen.clone();
        Self::new("g", move |z| gen.value(z).unwrap_or_else(|_| nan()))
    }

    /// `conj(z) g(z)`, the non-holomorphic generator of the algebra.
    pub fn zbar_g(gen: &Generator) -> Self {
        let gen = gen.clone();
        Self::new("zbar_g", move |z| {
            gen.value(z).map(|g| z.conj() * g).unwrap_or_else(|_| nan())
        })
    }

    /// `conj(z) (g(z) + eps)`; not a member when `eps != 0`.
    pub fn zbar_g_shifted(gen: &Generator, eps: f64) -> Self {
        let gen = gen.clone();
        Self::new(format!("zbar_(g+{eps})"), move |z| {
            gen.value(z).map(|g| z.conj() * (g + eps)).unwrap_or_else(|_| nan())
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = self.eval.clone();
        FunctionHandle {
            eval: Arc::new(move |z| c * inner(z)),
            label: format!("{c}*({})", self.label),
            series: self.series.as_ref().map(|s| Arc::new(s.scaled(c))),
        }
    }

    pub fn from_series(series: SeriesRep) -> Self {
        let s = Arc::new(series);
        let inner = s.clone();
        FunctionHandle {
            eval: Arc::new(move |z| inner.eval(z).unwrap_or_else(|_| nan())),
            label: "series".into(),
            series: Some(s),
        }
    }
}

/// `f(z) = sum a_{mn} z^m (conj(z) g(z))^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRep {
    /// `(M+1) x (N+1)` matrix indexed by `(m, n)`.
    pub coeffs: DMatrix<Complex64>,
    pub generator: Generator,
}

impl SeriesRep {
    pub fn new(coeffs: DMatrix<Complex64>, generator: Generator) -> Self {
        SeriesRep { coeffs, generator }
    }

    pub fn max_m(&self) -> usize {
        self.coeffs.nrows().saturating_sub(1)
    }

    pub fn max_n(&self) -> usize {
        self.coeffs.ncols().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let w = z.conj() * self.generator.value(z)?;
        // Horner in both variables
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (0..self.coeffs.ncols()).rev() {
            let mut inner = Complex64::new(0.0, 0.0);
            for m in (0..self.coeffs.nrows()).rev() {
                inner = inner * z + self.coeffs[(m, n)];
            }
            acc = acc * w + inner;
        }
        Ok(acc)
    }

    fn scaled(&self, c: Complex64) -> Self {
        SeriesRep {
            coeffs: self.coeffs.map(|a| a * c),
            generator: self.generator.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_direct_sum() {
        let gen = Generator::triple_sine(10.0).unwrap();
        let coeffs = DMatrix::from_fn(3, 3, |m, n| Complex64::new(m as f64 + 1.0, n as f64 - 0.5));
        let s = SeriesRep::new(coeffs.clone(), gen.clone());
        let z = Complex64::new(0.4, -1.1);
        let w = z.conj() * gen.value(z).unwrap();
        let mut direct = Complex64::new(0.0, 0.0);
        for m in 0..3 {
            for n in 0..3 {
                direct += coeffs[(m, n)] * z.powu(m as u32) * w.powu(n as u32);
            }
        }
        assert!((s.eval(z).unwrap() - direct).norm() < 1e-13);
    }

    #[test]
    fn checked_eval_reports_index() {
        let f = FunctionHandle::new("bad", |_| Complex64::new(f64::INFINITY, 0.0));
        match f.eval_checked(Complex64::new(1.0, 0.0), 7) {
            Err(Error::EvaluatorFailure { index, .. }) => assert_eq!(index, 7),
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! Text parsers shared by the CLI and the config loader.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::generator::Generator;

/// `"re,im"` or `"re"`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("not finite: {t:?}")));
        }
        Ok(v)
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected re,im: {s:?}"))),
    }
}

/// Comma-separated finite reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("not finite: {t:?}")))
            }
        })
        .collect()
}

/// Semicolon-separated complex numbers, `"1,0;0.5,-2"`.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty()).map(parse_complex).collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("not a positive integer: {t:?}"))))
        .collect()
}

/// Names understood by [`function_by_name`].
pub const FUNCTION_NAMES: &[&str] = &["one", "z", "zbar", "g", "zbar_g", "zbar_g+<eps>", "z^<k>"];

/// Test functions by name: `one`, `z`, `zbar`, `g`, `zbar_g`,
/// `zbar_g+0.1` (generator shifted by a constant), `z^5`.
pub fn function_by_name(name: &str, gen: &Generator) -> Result<FunctionHandle> {
    let name = name.trim();
    match name {
        "one" | "1" => return Ok(FunctionHandle::one()),
        "z" => return Ok(FunctionHandle::z()),
        "zbar" => return Ok(FunctionHandle::zbar()),
        "g" => return Ok(FunctionHandle::g(gen)),
        "zbar_g" => return Ok(FunctionHandle::zbar_g(gen)),
        _ => {}
    }
    if let Some(k) = name.strip_prefix("z^") {
        let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad power in {name:?}")))?;
        return Ok(FunctionHandle::zpow(k));
    }
    if let Some(eps) = name.strip_prefix("zbar_g+") {
        let eps: f64 = eps.parse().map_err(|_| Error::Parse(format!("bad shift in {name:?}")))?;
        return Ok(FunctionHandle::zbar_g_shifted(gen, eps));
    }
    Err(Error::Parse(format!("unknown function {name:?}; known: {}", FUNCTION_NAMES.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex(" 3 ").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan,0").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.5,1, 2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_list("1,x").is_err());
        assert_eq!(parse_complex_list("1,0;0,1").unwrap().len(), 2);
        assert_eq!(parse_usize_list("1,2,3").unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn functions() {
        let g = Generator::triple_sine(10.0).unwrap();
        let z = Complex64::new(0.3, 0.4);
        assert_eq!(function_by_name("z^3", &g).unwrap().eval(z), z.powu(3));
        assert!(function_by_name("zbar_g+0.1", &g).is_ok());
        assert!(function_by_name("sin", &g).is_err());
    }

    proptest! {
        #[test]
        fn complex_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = parse_complex(&format!("{re},{im}")).unwrap();
            prop_assert_eq!(z, Complex64::new(re, im));
        }

        #[test]
        fn parsers_never_panic(s in ".{0,40}") {
            let _ = parse_complex(&s);
            let _ = parse_list(&s);
            let _ = parse_complex_list(&s);
        }
    }
}

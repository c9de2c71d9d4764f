//! The `a+bi` text format for complex scalars, with `inf` for the point at infinity.

use lame_core::{Complex64 as C, ExtComplex};

use crate::error::CliError;

fn real(s: &str, whole: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .parse()
        .map_err(|_| CliError::Input(format!("malformed complex number '{whole}'")))?;
    if !x.is_finite() {
        return Err(CliError::Input(format!("non-finite component in '{whole}'")));
    }
    Ok(x)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, exponents like `1e-3-2.5e2i`).
pub fn parse_complex(s: &str) -> Result<C, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(CliError::Input("empty complex number".into()));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C::new(real(&t, s)?, 0.0));
    };
    // sign that starts the imaginary part: not leading, not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (real(&body[..j], s)?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => real(x, s)?,
    };
    Ok(C::new(re, im))
}

pub fn parse_ext(s: &str) -> Result<ExtComplex, CliError> {
    match s.trim() {
        "inf" | "infinity" | "Infinity" => Ok(ExtComplex::Infinity),
        t => parse_complex(t).map(ExtComplex::Finite),
    }
}

/// Shortest text that parses back to the same bits.
pub fn format_complex(z: C) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn format_ext(z: ExtComplex) -> String {
    match z {
        ExtComplex::Infinity => "inf".into(),
        ExtComplex::Finite(z) => format_complex(z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepted_forms() {
        let cases = [
            ("1.5", C::new(1.5, 0.0)),
            ("2i", C::new(0.0, 2.0)),
            ("-0.3+1.1i", C::new(-0.3, 1.1)),
            ("0.1 - 2e-3i", C::new(0.1, -2e-3)),
            ("1e-3-2.5E2i", C::new(1e-3, -250.0)),
            ("i", C::new(0.0, 1.0)),
            ("-i", C::new(0.0, -1.0)),
            ("3+i", C::new(3.0, 1.0)),
            ("-2e+1i", C::new(0.0, -20.0)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        assert_eq!(parse_ext("inf").unwrap(), ExtComplex::Infinity);
    }

    #[test]
    fn rejected_forms() {
        for s in ["", "1+", "abc", "1+2j", "NaN", "inf+1i", "1++2i"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(re in proptest::num::f64::NORMAL | proptest::num::f64::ZERO,
                               im in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
            let z = C::new(re, im);
            let back = parse_complex(&format_complex(z)).unwrap();
            prop_assert_eq!(back.re.to_bits(), re.to_bits());
            prop_assert_eq!(back.im.to_bits(), im.to_bits());
        }
    }
}

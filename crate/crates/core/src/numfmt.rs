use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Locale-independent rendering with 17 significant digits, enough to
/// round-trip any `f64`.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" and keep zero short.
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// Parses `"p/q"` or a plain integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
    };
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (parse_int(p)?, parse_int(q)?),
        None => (parse_int(s)?, BigInt::from(1)),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

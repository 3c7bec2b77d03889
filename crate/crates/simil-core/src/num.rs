//! Exact rational arithmetic helpers.
//!
//! All probabilities and payoffs in this crate are `Q = BigRational`.
//! Serialization is the canonical string form `"num/den"` (reduced, denominator
//! omitted when 1). Floats are accepted only through [`q_from_f64`], which
//! rationalizes with denominator at most 10^9 and reports whether the
//! conversion was exact.

use crate::error::{Result, SimilError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Largest denominator accepted when rationalizing a float.
pub const FLOAT_DENOM_BOUND: u64 = 1_000_000_000;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `q(n, d)` builds n/d. Panics on d == 0; use only with literal denominators.
pub fn q(n: i64, d: i64) -> Q {
    assert!(d != 0, "zero denominator in rational literal");
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

/// Canonical display form: reduced, `"num"` when the denominator is 1,
/// otherwise `"num/den"` with the sign on the numerator.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"num/den"`, plain integers, and exact decimal strings ("0.25").
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.is_empty() {
        return Err(SimilError::Parse("empty rational".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| SimilError::Parse(format!("bad numerator in {t:?}")))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| SimilError::Parse(format!("bad denominator in {t:?}")))?;
        if denom.is_zero() {
            return Err(SimilError::Parse(format!("zero denominator in {t:?}")));
        }
        return Ok(Q::new(numer, denom));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let digits = frac_part.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SimilError::Parse(format!("bad decimal {t:?}")));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.trim() == "-" {
            BigInt::zero()
        } else {
            int_part
                .trim()
                .parse()
                .map_err(|_| SimilError::Parse(format!("bad decimal {t:?}")))?
        };
        let frac: BigInt = digits
            .parse()
            .map_err(|_| SimilError::Parse(format!("bad decimal {t:?}")))?;
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let magnitude = int.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Q::new(signed, scale));
    }
    let numer: BigInt = t
        .parse()
        .map_err(|_| SimilError::Parse(format!("bad rational {t:?}")))?;
    Ok(Q::from_integer(numer))
}

/// Rationalizes a float. Returns the rational and whether it is exactly the
/// input (no rounding beyond the denominator bound). Rejects NaN/infinity.
pub fn q_from_f64(x: f64) -> Result<(Q, bool)> {
    if !x.is_finite() {
        return Err(SimilError::Parse(format!("non-finite float {x}")));
    }
    let exact = Q::from_float(x).expect("finite float is rational");
    let bound = BigInt::from(FLOAT_DENOM_BOUND);
    if exact.denom() <= &bound {
        return Ok((exact, true));
    }
    Ok((best_approx(&exact, &bound), false))
}

/// Best continued-fraction convergent of `x` with denominator <= `bound`.
fn best_approx(x: &Q, bound: &BigInt) -> Q {
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p = x.floor().to_integer();
    let mut q = BigInt::one();
    let mut rem = x - Q::from_integer(p.clone());
    while !rem.is_zero() {
        let inv = rem.recip();
        let a = inv.floor().to_integer();
        rem = inv - Q::from_integer(a.clone());
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        if &q_next > bound {
            break;
        }
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Q::new(p, q)
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for extreme magnitudes.
        let scaled = x * Q::from_integer(BigInt::from(1u64 << 53));
        scaled.to_integer().to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/8", "-1/2", "5", "0", "-7", "22/7"] {
            let v = parse_q(s).unwrap();
            assert_eq!(fmt_q(&v), s);
        }
        assert_eq!(fmt_q(&parse_q("4/8").unwrap()), "1/2");
        assert_eq!(fmt_q(&parse_q("-4/8").unwrap()), "-1/2");
        assert_eq!(fmt_q(&parse_q("6/3").unwrap()), "2");
    }

    #[test]
    fn parse_decimals_exactly() {
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_q("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_q("1.20").unwrap(), q(6, 5));
        assert_eq!(parse_q("-.5").unwrap(), q(-1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/0", "a/b", "1.2.3", "1/ /2"] {
            assert!(parse_q(s).is_err(), "{s:?} should fail");
        }
    }

    #[test]
    fn float_ingestion_flags_exactness() {
        let (v, exact) = q_from_f64(0.25).unwrap();
        assert!(exact);
        assert_eq!(v, q(1, 4));

        let (v, exact) = q_from_f64(1.0 / 3.0).unwrap();
        assert!(!exact);
        assert!(v.denom() <= &BigInt::from(FLOAT_DENOM_BOUND));
        let err = (&v - q(1, 3)).abs();
        assert!(err < q(1, 1_000_000_000), "approximation too loose: {err}");

        assert!(q_from_f64(f64::NAN).is_err());
        assert!(q_from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn float_ingestion_handles_negatives_and_integers() {
        let (v, exact) = q_from_f64(-2.5).unwrap();
        assert!(exact);
        assert_eq!(v, q(-5, 2));
        let (v, exact) = q_from_f64(41.0).unwrap();
        assert!(exact);
        assert_eq!(v, qi(41));
    }
}

//! Exact rational helpers used by the triadic backend and system parsing.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// 3^k as a big integer.
pub fn pow3(k: u32) -> BigInt {
    BigInt::from(3u32).pow(k)
}

/// 2^k as a big integer.
pub fn pow2(k: u32) -> BigInt {
    BigInt::from(2u32).pow(k)
}

/// num / 3^k.
pub fn triadic(num: i64, k: u32) -> Rational {
    Rational::new(BigInt::from(num), pow3(k))
}

pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling for huge numerators or denominators.
    let n = q.numer().bits() as i64;
    let d = q.denom().bits() as i64;
    let shift = n - d;
    let scaled = if shift > 0 {
        q / Rational::from_integer(BigInt::one() << (shift as usize))
    } else {
        q * Rational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(0.0) * libm::pow(2.0, shift as f64)
}

/// Parses an integer, decimal (`0.28`, `-1.5e-3`) or fraction (`1/3`) literal exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(alloc::format!("not a rational literal: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = s.split_once('/') {
        let n = parse_rational(a)?;
        let d = parse_rational(b)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: alloc::string::String = ip.chars().chain(fp.chars()).collect();
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10u32);
    let mut q = Rational::from_integer(n);
    if scale >= 0 {
        q *= Rational::from_integer(ten.pow(scale as u32));
    } else {
        q /= Rational::from_integer(ten.pow((-scale) as u32));
    }
    Ok(if neg { -q } else { q })
}

/// Parses a comma-separated list of rational literals.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("1/3").unwrap(), frac(1, 3));
        assert_eq!(parse_rational("0.28").unwrap(), frac(7, 25));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), frac(-3, 2000));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("0.5/2").unwrap(), frac(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn converts_tiny_values() {
        let q = Rational::new(BigInt::one(), pow3(400));
        let v = to_f64(&q);
        assert!(v > 0.0 && (v.ln() + 400.0 * 3f64.ln()).abs() < 1e-9);
    }
}

//! Exact rational helpers.
//!
//! Every length in an [`Instance`](crate::Instance) is an IEEE double, which is
//! a dyadic rational, so converting it with [`from_f64`] loses nothing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Exact conversion of a finite double.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).expect("finite length")
}

pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn floor_usize(v: &Rational) -> usize {
    v.floor().to_integer().to_usize().unwrap_or(0)
}

pub fn ceil_usize(v: &Rational) -> usize {
    v.ceil().to_integer().to_usize().unwrap_or(0)
}

pub fn is_integral(v: &Rational) -> bool {
    v.is_integer()
}

/// Strictly between 0 and 1.
pub fn is_fractional(v: &Rational) -> bool {
    v.is_positive() && *v < one()
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> Rational {
    it.into_iter().fold(zero(), |acc, v| acc + v)
}

/// Parses `12`, `-0.25`, `3/4` or `1e-3` exactly.
pub fn parse(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = digits.split_once('.').unwrap_or((digits, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{ip}{fp}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

/// Renders as a terminating decimal when possible, `p/q` otherwise.
pub fn format(v: &Rational) -> String {
    if v.is_integer() {
        return v.to_integer().to_string();
    }
    let mut d = v.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let places = twos.max(fives) as usize;
    let scaled = (v * Rational::from_integer(num_traits::pow(BigInt::from(10), places))).to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = padded.split_at(padded.len() - places);
    format!("{}{ip}.{fp}", if neg { "-" } else { "" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_fraction_and_exponent() {
        assert_eq!(parse("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse("1e-2"), Some(ratio(1, 100)));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse(".5"), Some(ratio(1, 2)));
        assert_eq!(parse("x"), None);
        assert_eq!(parse("1/0"), None);
    }

    #[test]
    fn formats_terminating_and_repeating() {
        assert_eq!(format(&ratio(1, 4)), "0.25");
        assert_eq!(format(&ratio(-5, 2)), "-2.5");
        assert_eq!(format(&ratio(1, 3)), "1/3");
        assert_eq!(format(&int(12)), "12");
        assert_eq!(format(&ratio(3, 1000)), "0.003");
    }

    #[test]
    fn f64_conversion_is_exact() {
        let x = 0.1f64;
        assert_eq!(to_f64(&from_f64(x)), x);
        assert_ne!(from_f64(x), ratio(1, 10));
    }
}

//! Exact scalars over the rationals and the Gaussian rationals.
//!
//! A [`Scalar`] always carries a real and an imaginary part, each a reduced
//! [`BigRational`]. Rational configurations simply keep the imaginary part at
//! zero, so both fields share one arithmetic type and one elimination code
//! path. The [`Field`] tag travels with configurations and matrices to
//! decide validation and canonical forms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Rational,
    Gaussian,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("rational"),
            Field::Gaussian => f.write_str("gaussian"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Field::Rational),
            "gaussian" => Ok(Field::Gaussian),
            other => Err(Error::Format(format!("unknown field {other:?}"))),
        }
    }
}

/// An element of ℚ(i), stored as `re + im·i` with both parts in lowest terms.
///
/// The derived ordering is lexicographic on `(re, im)`. It carries no
/// algebraic meaning and exists only to give line keys and line parameters
/// a deterministic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn real(re: BigRational) -> Self {
        Scalar::new(re, BigRational::zero())
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar::real(BigRational::new(numer.into(), denom.into()))
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`, the field norm down to ℚ.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_integer(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::real(v)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re / &rhs.re);
        }
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q`, `+p/q` or `-p/q` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |reason: &str| Error::MalformedScalar {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    if body.is_empty() {
        return Err(bad("empty"));
    }
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    if !digits(num) || !digits(den) {
        return Err(bad("expected an integer or p/q"));
    }
    let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q`, `p`, and Gaussian forms `a/b+c/di` where either part
    /// may be omitted (`c/di`, `i`, `-i`).
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Scalar::real(parse_rational(t)?));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re_text, im_text) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_text.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(re_text)?
        };
        let im = match im_text {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            s => parse_rational(s).map_err(|_| Error::MalformedScalar {
                text: text.to_string(),
                reason: "bad imaginary part".into(),
            })?,
        };
        Ok(Scalar::new(re, im))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&format_rational(&self.re));
        }
        if !self.re.is_zero() {
            f.write_str(&format_rational(&self.re))?;
            if self.im.is_positive() {
                f.write_str("+")?;
            }
        }
        write!(f, "{}i", format_rational(&self.im))
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        scalar_from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Reads a scalar from a JSON string or integer.
pub fn scalar_from_json(v: &serde_json::Value) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => s.parse(),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse(),
        other => Err(Error::MalformedScalar {
            text: other.to_string(),
            reason: "expected a rational string or an integer".into(),
        }),
    }
}

/// Human-readable decimal rendering of a rational, for report fields only.
pub fn decimal(r: &BigRational) -> String {
    use num_traits::ToPrimitive;
    match r.to_f64() {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        _ => "overflow".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(s("3"), Scalar::from_integer(3));
        assert_eq!(s("-4/6"), Scalar::ratio(-2, 3));
        assert_eq!(s("+1/2"), Scalar::ratio(1, 2));
        assert_eq!(s("6/3").to_string(), "2");
    }

    #[test]
    fn parses_gaussian_forms() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(s("1/2+3/4i"), Scalar::new(half.clone(), BigRational::new(3.into(), 4.into())));
        assert_eq!(s("i"), Scalar::new(BigRational::zero(), BigRational::one()));
        assert_eq!(s("-i"), Scalar::new(BigRational::zero(), -BigRational::one()));
        assert_eq!(s("-1/2-i"), Scalar::new(-half.clone(), -BigRational::one()));
        assert_eq!(s("5/2i"), Scalar::new(BigRational::zero(), BigRational::new(5.into(), 2.into())));
        assert_eq!(s("1/2+3/4i").to_string(), "1/2+3/4i");
        assert_eq!(s("-7i").to_string(), "-7i");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "a", "1.5", "1//2", "2+", "--1", "1/2j"] {
            assert!(bad.parse::<Scalar>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn field_arithmetic() {
        let a = s("1+2i");
        let b = s("3-i");
        assert_eq!(&a * &b, s("5+5i"));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(a.inv().unwrap() * &a, Scalar::one());
        assert!(Scalar::zero().inv().is_none());
        assert_eq!(s("1/3") + s("1/6"), s("1/2"));
    }

    #[test]
    fn json_integers_and_strings() {
        let v: Vec<Scalar> = serde_json::from_str(r#"[1, "2/4", "-i"]"#).unwrap();
        assert_eq!(v[1], Scalar::ratio(1, 2));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1","1/2","-1i"]"#);
    }

    proptest::proptest! {
        #[test]
        fn display_parse_roundtrip(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
            let x = Scalar::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()));
            proptest::prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
        }
    }
}

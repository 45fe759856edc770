//! Exact scalars: arbitrary-precision rationals, the extended value `-inf`,
//! and the `q^(-v)` weight map used by every generating polynomial.
//!
//! Rationals are `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator after each operation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::BigRational;

/// Absolute comparison tolerance used by float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("exponent {0} is not an integer; exact mode needs integer-valued functions")]
    NonIntegerExponent(String),
    #[error("q = {0} is outside (0, 1]")]
    QOutOfRange(String),
    #[error("exponent {0} does not fit the supported range")]
    ExponentOverflow(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Shorthand constructor, mostly for tests and fixed constants.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Serializes as `"p"` or `"p/q"`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.25"` or `"-1e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    if let Ok(r) = Rational::from_str(t) {
        if r.denom().is_zero() {
            return Err(NumError::Parse(s.to_string()));
        }
        return Ok(r);
    }
    parse_decimal(t).ok_or_else(|| NumError::Parse(s.to_string()))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.find('.') {
        Some(p) => (&digits[..p], &digits[p + 1..]),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exp - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut r = Rational::from_integer(numer) * ten.pow(scale);
    if neg {
        r = -r;
    }
    Some(r)
}

/// A value of a set function: a finite rational or `-inf`.
///
/// The derived order puts `NegInfinity` below every finite value, so `max`
/// and `<=` follow the usual extended-real conventions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValue {
    NegInfinity,
    Finite(Rational),
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(Rational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        ExtValue::Finite(int(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(r) => Some(r),
            ExtValue::NegInfinity => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            ExtValue::Finite(r) => r.is_integer(),
            ExtValue::NegInfinity => true,
        }
    }

    pub fn neg_finite(&self) -> Option<Rational> {
        self.finite().map(|r| -r)
    }

    pub fn parse(s: &str) -> Result<Self, NumError> {
        match s.trim() {
            "-inf" | "-Inf" | "-infinity" => Ok(ExtValue::NegInfinity),
            other => parse_rational(other).map(ExtValue::Finite),
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInfinity => f.write_str("-inf"),
            ExtValue::Finite(r) => f.write_str(&fmt_rational(r)),
        }
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::NegInfinity,
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        &self + &rhs
    }
}

impl From<Rational> for ExtValue {
    fn from(r: Rational) -> Self {
        ExtValue::Finite(r)
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ExtValue::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `q^(-v)` for `q` in `(0, 1]`, with `q^(-(-inf)) = q^inf = 0`.
///
/// Exact mode requires a finite `v` to be an integer.
pub fn q_neg_pow(q: &Rational, v: &ExtValue) -> Result<Rational, NumError> {
    check_q(q)?;
    match v {
        ExtValue::NegInfinity => Ok(Rational::zero()),
        ExtValue::Finite(r) => {
            if !r.is_integer() {
                return Err(NumError::NonIntegerExponent(fmt_rational(r)));
            }
            if q.is_one() {
                return Ok(Rational::one());
            }
            let e = r
                .to_integer()
                .to_i32()
                .ok_or_else(|| NumError::ExponentOverflow(fmt_rational(r)))?;
            // q^(-e) = (1/q)^e
            Ok(q.recip().pow(e))
        }
    }
}

pub fn check_q(q: &Rational) -> Result<(), NumError> {
    if q.is_positive() && *q <= Rational::one() {
        Ok(())
    } else {
        Err(NumError::QOutOfRange(fmt_rational(q)))
    }
}

/// Arithmetic mode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    /// binary64 evaluation of `q^(-v)`; results are not certificates.
    Float,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode {other:?} (expected exact|float)")),
        }
    }
}

/// The parameter `q` together with the arithmetic mode used to turn set
/// function values into polynomial weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QWeight {
    q: Rational,
    mode: Mode,
}

impl QWeight {
    pub fn new(q: Rational, mode: Mode) -> Result<Self, NumError> {
        check_q(&q)?;
        Ok(QWeight { q, mode })
    }

    pub fn exact(q: Rational) -> Result<Self, NumError> {
        Self::new(q, Mode::Exact)
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_certifying(&self) -> bool {
        self.mode == Mode::Exact
    }

    /// `q^(-v)`. In float mode the power is evaluated in binary64 and the
    /// resulting double is converted back to its exact rational value.
    pub fn weight(&self, v: &ExtValue) -> Result<Rational, NumError> {
        match self.mode {
            Mode::Exact => q_neg_pow(&self.q, v),
            Mode::Float => match v {
                ExtValue::NegInfinity => Ok(Rational::zero()),
                ExtValue::Finite(r) if r.is_integer() => q_neg_pow(&self.q, v),
                ExtValue::Finite(r) => {
                    let qf = self.q.to_f64().unwrap_or(f64::NAN);
                    let vf = r.to_f64().unwrap_or(f64::NAN);
                    let w = qf.powf(-vf);
                    Rational::from_float(w)
                        .ok_or_else(|| NumError::ExponentOverflow(fmt_rational(r)))
                }
            },
        }
    }

    /// `q^(+v)` for a finite `v`, the weight used by normalized generating
    /// polynomials of M-convex functions.
    pub fn weight_pos(&self, v: &Rational) -> Result<Rational, NumError> {
        self.weight(&ExtValue::Finite(-v))
    }

    /// Tolerance applied to comparisons in this mode (zero when exact).
    pub fn tolerance(&self) -> Rational {
        match self.mode {
            Mode::Exact => Rational::zero(),
            Mode::Float => Rational::from_float(FLOAT_TOLERANCE).unwrap_or_else(Rational::zero),
        }
    }
}

/// Serde adapter storing a `Rational` as `"p/q"`.
pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn factorial_q(k: u32) -> Rational {
    Rational::from_integer(factorial(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    BigInt::from(acc)
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn sign_of(r: &Rational) -> Ordering {
    r.cmp(&Rational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_neg_pow_examples() {
        assert_eq!(
            q_neg_pow(&rat(1, 2), &ExtValue::from_int(2)).unwrap(),
            int(4)
        );
        assert_eq!(
            q_neg_pow(&rat(1, 2), &ExtValue::NegInfinity).unwrap(),
            int(0)
        );
        assert_eq!(q_neg_pow(&int(1), &ExtValue::from_int(-7)).unwrap(), int(1));
        assert_eq!(
            q_neg_pow(&rat(1, 3), &ExtValue::from_int(-2)).unwrap(),
            rat(1, 9)
        );
    }

    #[test]
    fn q_neg_pow_errors() {
        assert!(matches!(
            q_neg_pow(&rat(1, 2), &ExtValue::Finite(rat(1, 2))),
            Err(NumError::NonIntegerExponent(_))
        ));
        assert!(matches!(
            q_neg_pow(&int(2), &ExtValue::zero()),
            Err(NumError::QOutOfRange(_))
        ));
        assert!(matches!(
            q_neg_pow(&int(0), &ExtValue::zero()),
            Err(NumError::QOutOfRange(_))
        ));
    }

    #[test]
    fn float_mode_accepts_fractional_values() {
        let w = QWeight::new(rat(1, 4), Mode::Float).unwrap();
        let v = w.weight(&ExtValue::Finite(rat(1, 2))).unwrap();
        assert_eq!(v, int(2));
        assert!(!w.is_certifying());
    }

    #[test]
    fn ext_value_order_and_sum() {
        let ninf = ExtValue::NegInfinity;
        let one = ExtValue::from_int(1);
        assert!(ninf < one);
        assert_eq!(ninf.clone().max(one.clone()), one);
        assert_eq!(&ninf + &one, ExtValue::NegInfinity);
        assert_eq!(&one + &one, ExtValue::from_int(2));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(fmt_rational(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rational(&int(-3)), "-3");
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1e-2").unwrap(), rat(1, 100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(ExtValue::parse("-inf").unwrap(), ExtValue::NegInfinity);
        assert_eq!(ExtValue::NegInfinity.to_string(), "-inf");
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }

    proptest::proptest! {
        #[test]
        fn pow_is_multiplicative(a in -12i64..12, b in -12i64..12, qn in 1i64..9) {
            let q = rat(qn, 9);
            let lhs = q_neg_pow(&q, &ExtValue::from_int(a)).unwrap()
                * q_neg_pow(&q, &ExtValue::from_int(b)).unwrap();
            let rhs = q_neg_pow(&q, &ExtValue::from_int(a + b)).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pow_is_decreasing_in_value(a in -12i64..12, qn in 1i64..8) {
            let q = rat(qn, 8);
            let lo = q_neg_pow(&q, &ExtValue::from_int(a)).unwrap();
            let hi = q_neg_pow(&q, &ExtValue::from_int(a + 1)).unwrap();
            proptest::prop_assert!(hi > lo);
        }

        #[test]
        fn rational_add_associates(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50, e in -50i64..50, f in 1i64..50) {
            let (x, y, z) = (rat(a, b), rat(c, d), rat(e, f));
            let l = (&x + &y) + &z;
            let r = &x + (&y + &z);
            proptest::prop_assert_eq!(fmt_rational(&l), fmt_rational(&r));
        }
    }
}

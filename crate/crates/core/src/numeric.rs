//! Exact rationals and the high-precision reals used for `d^p` with real `p`.
//!
//! Construction-native distances are [`Rational`]. Powers with a real exponent
//! cannot be exact, so they are evaluated in binary floating point with a
//! configurable mantissa length (see [`Numerics`]).

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational in canonical reduced form (denominator positive).
pub type Rational = num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Precision and tolerance settings shared by every inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    /// Mantissa length, in bits, for powers and sums.
    pub precision_bits: usize,
    /// Relative tolerance applied to inequality checks.
    pub tolerance: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            precision_bits: 80,
            tolerance: 1e-12,
        }
    }
}

impl Numerics {
    pub fn with_precision(self, precision_bits: usize) -> Self {
        Self {
            precision_bits,
            ..self
        }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self { tolerance, ..self }
    }

    pub fn context(&self) -> HighPrecision {
        HighPrecision::new(self.precision_bits)
    }
}

/// Arithmetic context for [`BigFloat`] values at a fixed precision.
///
/// Holds the constant cache astro-float needs for transcendental functions,
/// so one context should be reused across many evaluations on a thread.
pub struct HighPrecision {
    bits: usize,
    consts: Consts,
}

impl std::fmt::Debug for HighPrecision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HighPrecision")
            .field("bits", &self.bits)
            .finish()
    }
}

impl HighPrecision {
    pub fn new(bits: usize) -> Self {
        // astro-float rounds precision up to whole 64-bit words.
        let bits = bits.max(64);
        Self {
            bits,
            consts: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_u64(0, self.bits)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_u64(1, self.bits)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.bits.max(64))
    }

    /// Exact conversion; the mantissa keeps every limb of `v`.
    pub fn integer(&self, v: &BigInt) -> BigFloat {
        let digits = v.magnitude().to_u64_digits();
        if digits.is_empty() {
            return self.zero();
        }
        let sign = if v.is_negative() {
            Sign::Neg
        } else {
            Sign::Pos
        };
        BigFloat::from_words(&digits, sign, (digits.len() * 64) as Exponent)
    }

    pub fn rational(&self, r: &Rational) -> BigFloat {
        if r.is_integer() {
            return self.integer(r.numer());
        }
        let n = self.integer(r.numer());
        let d = self.integer(r.denom());
        n.div(&d, self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    /// `base^exponent` for `base > 0`.
    pub fn pow(&mut self, base: &BigFloat, exponent: &BigFloat) -> BigFloat {
        base.pow(exponent, self.bits, RM, &mut self.consts)
    }

    /// `base^k` by repeated squaring; exact up to rounding at each product.
    pub fn powi(&self, base: &BigFloat, k: u64) -> BigFloat {
        let mut result = self.one();
        let mut sq = base.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        result
    }

    pub fn exp(&mut self, v: &BigFloat) -> BigFloat {
        v.exp(self.bits, RM, &mut self.consts)
    }

    pub fn ln(&mut self, v: &BigFloat) -> BigFloat {
        v.ln(self.bits, RM, &mut self.consts)
    }
}

/// Nearest `f64` to a [`BigFloat`] (the top mantissa word is rounded once).
pub fn to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf_pos() {
        return f64::INFINITY;
    }
    if v.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exponent, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    let mut value = top as f64;
    let mut shift = exponent as i64 - 64;
    while shift > 1000 {
        value *= 2f64.powi(1000);
        shift -= 1000;
    }
    while shift < -1000 {
        value *= 2f64.powi(-1000);
        shift += 1000;
    }
    value *= 2f64.powi(shift as i32);
    if sign == Sign::Neg {
        -value
    } else {
        value
    }
}

pub fn is_negative(v: &BigFloat) -> bool {
    !v.is_zero() && v.is_negative()
}

/// Strict comparison `a < b`.
pub fn less_than(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let ctx = HighPrecision::new(64);
            to_f64(&ctx.rational(r))
        }
    }
}

/// Exact conversion of a finite `f64` to a rational.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn pow2(k: i64) -> Rational {
    let magnitude = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25` (exactly).
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {t:?}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {t:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(|| format!("not a rational number: {t:?}"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact `k`-th root of a non-negative integer, if it exists.
pub fn exact_root(v: &BigUint, k: u32) -> Option<BigUint> {
    if k == 0 {
        return None;
    }
    let root = v.nth_root(k);
    (num_traits::pow(root.clone(), k as usize) == *v).then_some(root)
}

/// `base^(exponent)` as an exact rational when the result is rational and small.
///
/// Returns `None` when the value is irrational or the integer parts would
/// exceed a few thousand bits.
pub fn exact_rational_power(base: &Rational, exponent: &Rational) -> Option<Rational> {
    if exponent.is_zero() {
        return Some(Rational::one());
    }
    if base.is_zero() {
        return exponent.is_positive().then(Rational::zero);
    }
    if base.is_negative() {
        return None;
    }
    let num = exponent.numer().to_i64()?;
    let den = exponent.denom().to_u32()?;
    if num.unsigned_abs() > 256 || den > 256 {
        return None;
    }
    let bits = base.numer().bits().max(base.denom().bits());
    if bits.saturating_mul(num.unsigned_abs()) / den as u64 > 8192 {
        return None;
    }
    let n_root = exact_root(base.numer().magnitude(), den)?;
    let d_root = exact_root(base.denom().magnitude(), den)?;
    let rooted = Rational::new(BigInt::from(n_root), BigInt::from(d_root));
    let powered = num_traits::pow(rooted, num.unsigned_abs() as usize);
    Some(if num < 0 { powered.recip() } else { powered })
}

/// Smallest `k >= 1` such that `2^(1-k) <= t`, for `t > 0`.
pub fn dyadic_level(t: &Rational) -> u32 {
    let mut k = 1u32;
    let mut threshold = Rational::one();
    while threshold > *t {
        threshold /= BigInt::from(2);
        k += 1;
    }
    k
}

/// Serde adapter writing any `Display` value (big integers, mostly) as a string.
pub mod serde_display {
    use serde::Serializer;

    pub fn serialize<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

/// Serde adapter for reals that may be infinite: non-finite values are
/// written as the strings `"inf"`, `"-inf"` and `"nan"`.
pub mod serde_real {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

/// Serde adapter writing rationals as `"a/b"` strings; integers and floats are
/// also accepted on input.
pub mod serde_rational {
    use super::{format_rational, parse_rational, rational_from_f64, Rational};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(D::Error::custom)
    }

    pub fn from_value(v: &serde_json::Value) -> Result<Rational, String> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(super::integer(i))
                } else {
                    n.as_f64()
                        .and_then(rational_from_f64)
                        .ok_or_else(|| format!("not a finite number: {n}"))
                }
            }
            other => Err(format!("expected a rational, found {other}")),
        }
    }

    pub mod matrix {
        use super::super::Rational;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            let rows: Vec<Vec<String>> = m
                .iter()
                .map(|row| row.iter().map(super::super::format_rational).collect())
                .collect();
            rows.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            use serde::de::Error as _;
            let rows = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|v| super::from_value(v).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    pub mod vec {
        use super::super::Rational;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&super::super::format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            use serde::de::Error as _;
            let values = Vec::<serde_json::Value>::deserialize(d)?;
            values
                .iter()
                .map(|v| super::from_value(v).map_err(D::Error::custom))
                .collect()
        }
    }
}

//! Scalar abstraction shared by every algorithm in the crate.
//!
//! All graph algorithms are written once against [`Scalar`]. Two instances
//! ship with the crate: [`Rational`] (arbitrary precision, the default, with
//! every comparison exact) and `f64` (comparisons carry an absolute
//! tolerance of `1e-9`).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational number used for all table weights in exact mode.
pub type Rational = BigRational;

/// Absolute comparison tolerance in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Numeric mode of a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl FromStr for Mode {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(ParseScalarError(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number: {0}")]
pub struct ParseScalarError(pub String);

/// Ordered field with the comparisons the max-plus algorithms need.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    /// Absolute slack applied by the tolerant comparisons (zero when exact).
    fn tolerance() -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// Canonical text form used in reports.
    fn canonical(&self) -> String;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    fn approx_le(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tolerance()
    }

    /// Strict inequality with the tolerance as margin.
    fn definitely_lt(&self, other: &Self) -> bool {
        self.clone() + Self::tolerance() < *other
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    /// `p/q` with `q > 0` and `gcd(p, q) = 1`; integers print without `/1`.
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn canonical(&self) -> String {
        // shortest round-trip form; normalise -0 so reports stay stable
        if *self == 0.0 {
            "0".to_string()
        } else {
            format!("{self}")
        }
    }
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let t = s.trim();
    let bad = || ParseScalarError(format!("`{s}` is not an integer or p/q fraction"));
    if t.is_empty() || t != s {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let is_int = |x: &str| {
        let digits = x.strip_prefix('-').unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || !is_int(den) || den.starts_with('-') {
        return Err(bad());
    }
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = BigInt::from_str(den).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(ParseScalarError(format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(n, d))
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `base^exp` for a non-negative integer exponent.
pub fn powi<S: Scalar>(base: &S, exp: usize) -> S {
    let mut acc = S::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

pub fn max_all<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I) -> Option<S> {
    items
        .into_iter()
        .cloned()
        .reduce(|a, b| a.max_of(b))
}

pub fn min_all<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I) -> Option<S> {
    items
        .into_iter()
        .cloned()
        .reduce(|a, b| a.min_of(b))
}

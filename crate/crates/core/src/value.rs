//! Scalar coefficients that stay exact while they can.
//!
//! Model coefficients and derived constants (wave speeds, `λ` maps, `κ²`, …)
//! are carried as [`Value`]s: an exact `i128` rational whenever every input
//! was rational and no operation overflowed or needed an irrational result,
//! and an `f64` otherwise. Arithmetic silently degrades to floating point, so
//! callers never have to special-case the exact path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

/// An exact rational or a floating-point fallback.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Exact(Rational::from_integer(n as i128))
    }

    /// `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Value::Exact(Rational::new(num as i128, den as i128))
    }

    pub fn float(x: f64) -> Self {
        Value::Float(x)
    }

    pub fn zero() -> Self {
        Value::int(0)
    }

    pub fn one() -> Self {
        Value::int(1)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Value::Exact(r) => {
                // Dividing in f64 keeps the result correctly rounded for the
                // magnitudes that occur in practice.
                let n = *r.numer() as f64;
                let d = *r.denom() as f64;
                n / d
            }
            Value::Float(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_rational(self) -> Option<Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(x) => x == 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Value::Exact(_) => true,
            Value::Float(x) => x.is_finite(),
        }
    }

    /// Sign as -1, 0 or 1 (exact for rationals).
    pub fn signum(self) -> i32 {
        match self {
            Value::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Value::Float(x) => {
                if x == 0.0 {
                    0
                } else if x > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(self) -> Self {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Float(x) => Value::Float(x.abs()),
        }
    }

    /// Square root, exact when both numerator and denominator are perfect
    /// squares. Returns `None` for negative arguments.
    pub fn sqrt(self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        if let Value::Exact(r) = self {
            if let (Some(n), Some(d)) = (isqrt_exact(*r.numer()), isqrt_exact(*r.denom())) {
                return Some(Value::Exact(Rational::new(n, d)));
            }
        }
        Some(Value::Float(self.to_f64().sqrt()))
    }

    /// Recip; `None` at zero.
    pub fn recip(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Value::one() / self)
        }
    }

    /// Equality with tolerance for floats, exact for two rationals.
    pub fn approx_eq(self, other: Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
            }
        }
    }

    pub fn cmp_f64(self, other: Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(&b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }

    pub fn pow(self, n: u32) -> Self {
        let mut acc = Value::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i128;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c.checked_mul(c) == Some(n) {
            return Some(c);
        }
    }
    None
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::int(n as i64)
    }
}

impl From<f64> for Value {
    /// Floats that are exact small integers or dyadic-free decimals are kept
    /// as floats; use [`Value::ratio`] to request exact arithmetic.
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Exact(r)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl $trait for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(a), Value::Exact(b)) => match a.$checked(&b) {
                        Some(r) => Value::Exact(r),
                        None => Value::Float(self.to_f64() $op rhs.to_f64()),
                    },
                    _ => Value::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl Div for Value {
    type Output = Value;
    fn div(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) if !b.is_zero() => match a.checked_div(&b) {
                Some(r) => Value::Exact(r),
                None => Value::Float(self.to_f64() / rhs.to_f64()),
            },
            _ => Value::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Float(x) => Value::Float(-x),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Value::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(x) => write!(f, "{}", crate::io::fmt_f64(*x)),
        }
    }
}

impl ToPrimitive for Value {
    fn to_i64(&self) -> Option<i64> {
        match self {
            Value::Exact(r) if *r.denom() == 1 => r.numer().to_i64(),
            _ => None,
        }
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(Value::to_f64(*self))
    }
}

/// Parse `"3"`, `"-5/2"`, `"0.25"`, `"1e-3"`. Decimal literals without an
/// exponent are read exactly (`0.25` → 1/4).
pub fn parse_value(s: &str) -> Option<Value> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Value::Exact(Rational::new(n, d)));
    }
    if let Ok(n) = s.parse::<i128>() {
        return Some(Value::Exact(Rational::from_integer(n)));
    }
    if !s.contains(['e', 'E']) {
        if let Some((ip, fp)) = s.split_once('.') {
            if fp.len() <= 18 && fp.chars().all(|c| c.is_ascii_digit()) {
                let neg = ip.starts_with('-');
                let ip_abs = ip.trim_start_matches(['-', '+']);
                let ip_n: i128 = if ip_abs.is_empty() { 0 } else { ip_abs.parse().ok()? };
                let fp_n: i128 = if fp.is_empty() { 0 } else { fp.parse().ok()? };
                let den = 10i128.checked_pow(fp.len() as u32)?;
                let num = ip_n.checked_mul(den)?.checked_add(fp_n)?;
                let num = if neg { -num } else { num };
                return Some(Value::Exact(Rational::new(num, den)));
            }
        }
    }
    let x: f64 = s.parse().ok()?;
    x.is_finite().then_some(Value::Float(x))
}

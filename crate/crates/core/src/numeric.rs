//! Exact rational numbers and the scalar abstraction used by the LP engine.
//!
//! [`Rational`] keeps small values as a reduced `i64` pair and only promotes
//! to an arbitrary-precision representation when an operation overflows. The
//! LP data we handle (matching polytopes, integer payoffs) stays in the small
//! representation almost all of the time.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {0:?} as a rational number")]
pub struct ParseRationalError(pub String);

/// Exact rational number.
#[derive(Clone)]
pub enum Rational {
    /// Reduced fraction `num/den` with `den > 0`.
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational::Small { num: 0, den: 1 };
    pub const ONE: Rational = Rational::Small { num: 1, den: 1 };

    pub fn from_integer(n: i64) -> Self {
        Rational::Small { num: n, den: 1 }
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        if n == 0 {
            return Rational::ZERO;
        }
        if d != 1 {
            let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
            if g > 1 {
                n /= g;
                d /= g;
            }
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Rational::Small { num, den },
            _ => Rational::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Rational::Small { num, den },
            _ => Rational::Big(Box::new(r)),
        }
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(num, den))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small { num, .. } => BigInt::from(*num),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small { den, .. } => BigInt::from(*den),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    /// Exact value of a finite float. Returns `None` for NaN and infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x == x.trunc() && x.abs() < 9.0e18 {
            return Some(Rational::from_integer(x as i64));
        }
        BigRational::from_float(x).map(Self::from_big)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small { num, den } => {
                if *den == 1 {
                    *num as f64
                } else {
                    *num as f64 / *den as f64
                }
            }
            Rational::Big(b) => b.to_f64().unwrap_or_else(|| {
                // Numerator and denominator both overflow f64; scale down first.
                let shift = b.numer().bits().max(b.denom().bits()).saturating_sub(1000);
                let n = (b.numer() >> shift).to_f64().unwrap_or(f64::NAN);
                let d = (b.denom() >> shift).to_f64().unwrap_or(f64::NAN);
                n / d
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small { den, .. } => *den == 1,
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small { num, .. } => num.signum() as i32,
            Rational::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        &Rational::ONE / self
    }

    pub fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Integer pair if both parts fit in `i64`.
    pub fn as_i64_pair(&self) -> Option<(i64, i64)> {
        match self {
            Rational::Small { num, den } => Some((*num, *den)),
            Rational::Big(_) => None,
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.to_big().ceil().to_integer()
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_big(BigRational::from_integer(n))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => a == c && b == d,
            // Both sides are normalized, so a Big never equals a Small.
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rational::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Rational::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if *b == 1 && *d == 1 {
                    match a.checked_add(*c) {
                        Some(s) => Rational::Small { num: s, den: 1 },
                        None => Rational::from_i128(*a as i128 + *c as i128, 1),
                    }
                } else if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    match (a.checked_mul(d), c.checked_mul(b)) {
                        (Some(x), Some(y)) => match x.checked_add(y) {
                            Some(n) => Rational::from_i128(n, b * d),
                            None => Rational::from_big(self.to_big() + rhs.to_big()),
                        },
                        _ => Rational::from_big(self.to_big() + rhs.to_big()),
                    }
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if *a == 0 || *c == 0 {
                    return Rational::ZERO;
                }
                if *b == 1 && *d == 1 {
                    return match a.checked_mul(*c) {
                        Some(p) => Rational::Small { num: p, den: 1 },
                        None => Rational::from_i128(*a as i128 * *c as i128, 1),
                    };
                }
                // Cross-reduce first so the products stay small.
                let g1 = a.unsigned_abs().gcd(&d.unsigned_abs()) as i64;
                let g2 = c.unsigned_abs().gcd(&b.unsigned_abs()) as i64;
                let n = (a / g1) as i128 * (c / g2) as i128;
                let m = (b / g2) as i128 * (d / g1) as i128;
                match (i64::try_from(n), i64::try_from(m)) {
                    (Ok(num), Ok(den)) => Rational::Small { num, den },
                    _ => Rational::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(m)))),
                }
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        match rhs {
            Rational::Small { num, den } => {
                let inv = if *num < 0 {
                    match (den.checked_neg(), num.checked_neg()) {
                        (Some(n), Some(d)) => Rational::Small { num: n, den: d },
                        _ => Rational::from_i128(-(*den as i128), -(*num as i128)),
                    }
                } else {
                    Rational::Small { num: *den, den: *num }
                };
                self * &inv
            }
            Rational::Big(b) => Rational::from_big(self.to_big() / (**b).clone()),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small { num, den } => match num.checked_neg() {
                Some(n) => Rational::Small { num: n, den: *den },
                None => Rational::from_i128(-(*num as i128), *den as i128),
            },
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::ZERO, |acc, x| &acc + &x)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small { num, den: 1 } => write!(f, "{num}"),
            Rational::Small { num, den } => write!(f, "{num}/{den}"),
            Rational::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    if s.is_empty() {
        return None;
    }
    s.parse::<BigInt>().ok()
}

/// Parses an exact decimal literal such as `-12.5e-3`.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = parse_bigint(&digits)?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(Rational::from_big(r))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q`, and decimal literals (`0.25`, `1e-3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseRationalError(s.to_string());
        if let Some((p, q)) = t.split_once('/') {
            let p = parse_bigint(p.trim()).ok_or_else(err)?;
            let q = parse_bigint(q.trim()).ok_or_else(err)?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Rational::from_bigints(p, q));
        }
        parse_decimal(t).ok_or_else(err)
    }
}

/// Arithmetic needed by the simplex engine, implemented for `f64` and
/// [`Rational`]. Tolerances are zero for exact types.
pub trait Field: Clone + PartialOrd + fmt::Debug + Send + Sync
where
    for<'a> &'a Self: Add<&'a Self, Output = Self>
        + Sub<&'a Self, Output = Self>
        + Mul<&'a Self, Output = Self>
        + Div<&'a Self, Output = Self>
        + Neg<Output = Self>,
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_f64_tol(x: f64) -> Self;
    fn to_rational(&self) -> Rational;
    fn abs_val(&self) -> Self;
    fn is_exact_zero(&self) -> bool;
}

impl Field for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn from_f64_tol(x: f64) -> Self {
        x
    }
    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self).unwrap_or(Rational::ZERO)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Field for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Rational::ZERO
    }
    fn one() -> Self {
        Rational::ONE
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64_tol(_x: f64) -> Self {
        Rational::ZERO
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Parses a comma-separated list of rationals, e.g. `"1/3, 0.5, 2"`.
pub fn parse_vector(s: &str) -> Result<Vec<Rational>, ParseRationalError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::ZERO, |acc, (x, y)| &acc + &(x * y))
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Rational::to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        assert_eq!(r(2, -4), r(-1, 2));
        assert_eq!(r(0, -7), Rational::ZERO);
        assert_eq!(format!("{}", r(6, 3)), "2");
        assert_eq!(format!("{}", r(-3, 9)), "-1/3");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("1/3".parse::<Rational>().unwrap(), r(1, 3));
        assert_eq!("0.25".parse::<Rational>().unwrap(), r(1, 4));
        assert_eq!("-1.5e2".parse::<Rational>().unwrap(), r(-150, 1));
        assert_eq!("2e-3".parse::<Rational>().unwrap(), r(1, 500));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert_eq!(parse_vector("1/3,0.5, 2").unwrap(), vec![r(1, 3), r(1, 2), r(2, 1)]);
    }

    #[test]
    fn overflow_promotes_to_big() {
        let big = Rational::from_integer(i64::MAX);
        let s = &big + &big;
        assert!(matches!(s, Rational::Big(_)));
        let back = &s - &big;
        assert_eq!(back, big);
        assert!(matches!(back, Rational::Small { .. }));
        let p = &big * &big;
        assert_eq!(&p / &big, big);
        assert_eq!(-Rational::from_integer(i64::MIN), &Rational::from_integer(i64::MAX) + &Rational::ONE);
    }

    #[test]
    fn float_conversion_is_exact() {
        assert_eq!(Rational::from_f64(0.5).unwrap(), r(1, 2));
        assert_eq!(Rational::from_f64(-3.0).unwrap(), r(-3, 1));
        assert!(Rational::from_f64(f64::NAN).is_none());
        let x = Rational::from_f64(0.1).unwrap();
        assert_eq!(x.to_f64(), 0.1);
        assert_ne!(x, r(1, 10));
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-1_000_000i64..1_000_000, 1i64..1_000_000).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn wide() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #[test]
        fn field_ops_match_bigrational(a in wide(), b in wide()) {
            prop_assert_eq!((&a + &b).to_big(), a.to_big() + b.to_big());
            prop_assert_eq!((&a - &b).to_big(), a.to_big() - b.to_big());
            prop_assert_eq!((&a * &b).to_big(), a.to_big() * b.to_big());
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), a.to_big() / b.to_big());
            }
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
        }

        #[test]
        fn display_parse_round_trip(a in wide()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn small_values_stay_small(a in small(), b in small()) {
            let small = matches!(&a * &b, Rational::Small { .. });
            prop_assert!(small);
        }
    }
}

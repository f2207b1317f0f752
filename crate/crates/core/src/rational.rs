//! Exact rational numbers.
//!
//! Values are kept in lowest terms with a positive denominator. Small values
//! live inline as a pair of `i64`; anything that does not fit is promoted to a
//! `BigRational`. The representation is canonical (a value that fits in `i64`
//! is always stored inline), so derived equality and hashing are sound.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_i128(numer as i128, denom as i128)
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    fn from_i128(numer: i128, denom: i128) -> Self {
        debug_assert!(denom != 0);
        let g = numer.gcd(&denom);
        let (mut n, mut d) = (numer / g, denom / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new(n.into(), d.into()))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        }
    }

    pub fn ceil(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(Integer::div_ceil(n, d), 1)),
            Repr::Big(r) => Self::from_big(r.ceil()),
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(Integer::div_floor(n, d), 1)),
            Repr::Big(r) => Self::from_big(r.floor()),
        }
    }

    /// Integer value, if this is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_integer(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        match i64::try_from(n) {
            Ok(n) => Self::from_integer(n),
            Err(_) => Self::from_big(BigRational::from_integer(BigInt::from(n))),
        }
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
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

fn add_ref(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(0, _), _) => y.clone(),
        (_, Repr::Small(0, _)) => x.clone(),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            if b == d {
                Rational::from_i128(*a as i128 + *c as i128, *b as i128)
            } else {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128(a * d + c * b, b * d)
            }
        }
        _ => Rational::from_big(x.to_big() + y.to_big()),
    }
}

fn neg_ref(x: &Rational) -> Rational {
    match &x.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(n) => Rational(Repr::Small(n, *d)),
            None => Rational::from_big(-x.to_big()),
        },
        Repr::Big(r) => Rational::from_big(-r.clone()),
    }
}

fn sub_ref(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (_, Repr::Small(0, _)) => x.clone(),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            if b == d {
                Rational::from_i128(*a as i128 - *c as i128, *b as i128)
            } else {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128(a * d - c * b, b * d)
            }
        }
        _ => Rational::from_big(x.to_big() - y.to_big()),
    }
}

fn mul_ref(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rational::zero(),
        (Repr::Small(1, 1), _) => y.clone(),
        (_, Repr::Small(1, 1)) => x.clone(),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => Rational::from_big(x.to_big() * y.to_big()),
    }
}

fn div_ref(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    match (&x.0, &y.0) {
        (Repr::Small(0, _), _) => Rational::zero(),
        (_, Repr::Small(1, 1)) => x.clone(),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rational::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
        }
        _ => Rational::from_big(x.to_big() / y.to_big()),
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_ref);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_ref(self, rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_ref(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = sub_ref(self, rhs);
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = sub_ref(self, &rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"p/q"` or a plain integer, with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() || den.is_negative() {
            return Err(err());
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rational::from_integer(n)),
        }
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.denom(), BigInt::from(2));
        assert_eq!(Rational::new(0, -7), Rational::zero());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("93/20".parse::<Rational>().unwrap(), Rational::new(93, 20));
        assert_eq!("-4".parse::<Rational>().unwrap(), Rational::from_integer(-4));
        assert_eq!("10/5".parse::<Rational>().unwrap().to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_promotes_then_demotes() {
        let m = Rational::from_integer(i64::MAX);
        let sq = &m * &m;
        assert!(matches!(sq.0, Repr::Big(_)));
        let back = &sq / &m;
        assert_eq!(back, m);
        assert!(matches!(back.0, Repr::Small(..)));
        let neg = -Rational::from_integer(i64::MIN);
        assert_eq!(neg.numer(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn ceil_floor() {
        assert_eq!(Rational::new(7, 2).ceil(), Rational::from_integer(4));
        assert_eq!(Rational::new(-7, 2).ceil(), Rational::from_integer(-3));
        assert_eq!(Rational::new(-7, 2).floor(), Rational::from_integer(-4));
        assert_eq!(Rational::from_integer(3).ceil(), Rational::from_integer(3));
    }

    #[test]
    fn serde_as_strings() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/3", 5, "-2"]"#).unwrap();
        assert_eq!(v, vec![Rational::new(1, 3), 5.into(), (-2).into()]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/3","5","-2"]"#);
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in -1_000_000_000i64..1_000_000_000, b in 1i64..1_000_000,
                                   c in -1_000_000_000i64..1_000_000_000, d in 1i64..1_000_000) {
            let (x, y) = (Rational::new(a, b), Rational::new(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }
    }
}

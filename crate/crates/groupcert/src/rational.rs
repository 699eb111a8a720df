//! Exact rational scalars and dense rational vectors.
//!
//! `Rat` is `num_rational::BigRational`: arbitrary precision, always reduced
//! to lowest terms with a positive denominator. Every quantity that feeds a
//! verdict flows through this type; floating point is never consulted.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`; test and fixture helper.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as an exact rational.
pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

/// Parses the document grammar `-?digits(/digits)?`. The result is reduced;
/// non-canonical input such as `2/4` is accepted and normalized.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = |t: &str, allow_sign: bool| -> Result<BigInt, RatParseError> {
        let body = match t.strip_prefix('-') {
            Some(rest) if allow_sign => rest,
            Some(_) => return Err(RatParseError::Malformed(s.to_string())),
            None => t,
        };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RatParseError::Malformed(s.to_string()));
        }
        let mag: BigInt = body.parse().expect("ascii digits parse as BigInt");
        Ok(if t.starts_with('-') { -mag } else { mag })
    };
    let num = digits(num_str, true)?;
    let den = match den_str {
        Some(d) => digits(d, false)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(RatParseError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical string form: `p` for integers, `p/q` otherwise, lowest terms,
/// sign on the numerator.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_vec(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

/// Largest integer `<= r`.
pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// `r - floor(r)`, the representative of `r` in `[0, 1)`.
pub fn fract_mod1(r: &Rat) -> Rat {
    r - r.floor()
}

/// Componentwise reduction into the fundamental domain `[0, 1)^k`.
pub fn vec_mod1(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(fract_mod1).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot product dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[Rat], s: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * s).collect()
}

pub fn neg_vec(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = zero_vec(n);
    v[i] = Rat::one();
    v
}

/// True iff every coordinate is an integer.
pub fn is_integer_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_integer())
}

/// L1 norm `sum |a_i|`.
pub fn l1_norm(a: &[Rat]) -> Rat {
    a.iter().map(|x| x.abs()).sum()
}

/// L-infinity norm `max |a_i|`.
pub fn linf_norm(a: &[Rat]) -> Rat {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
}

/// Least common multiple of the denominators of `vals`; 1 for an empty list.
pub fn denominator_lcm<'a>(vals: impl Iterator<Item = &'a Rat>) -> BigInt {
    let mut l = BigInt::one();
    for v in vals {
        l = l.lcm(v.denom());
    }
    l
}

/// The primitive integer vector on the ray through `v` (nonzero `v`):
/// scale by the denominator lcm, divide out the gcd of the entries.
pub fn primitive_direction(v: &[Rat]) -> Vec<BigInt> {
    assert!(!is_zero_vec(v), "primitive direction of the zero vector");
    let l = denominator_lcm(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Exact sign as -1, 0, or 1.
pub fn sign(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

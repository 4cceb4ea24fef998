//! Scalar backends.
//!
//! Algorithms that only need field operations and signs are written once
//! against [`Scalar`] and run over `f64`, [`Rational`] or [`Quadratic`].
//! Anything that needs square roots or trigonometry is `f64` only.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use nalgebra::{ClosedAddAssign, ClosedDivAssign, ClosedMulAssign, ClosedSubAssign};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Tolerances for the floating backend. Exact backends ignore them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute bound on algebraic residuals.
    pub residual: f64,
    /// Bound used for classification decisions (null, parabolic, zero eigenvalue).
    pub class: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-9, class: 1e-7 }
    }
}

pub trait Scalar:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + ClosedDivAssign
    + Neg<Output = Self>
    + PartialOrd
    + fmt::Display
{
    /// True when arithmetic is free of rounding.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Sign of the value; values within `tol` count as zero on inexact backends.
    fn signum_tol(&self, tol: f64) -> i8;

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.signum_tol(tol) == 0
    }
}

/// `|r| <= bound`, or `r == 0` on exact backends.
pub fn within<S: Scalar>(r: &S, bound: f64) -> bool {
    if S::EXACT {
        r.is_zero()
    } else {
        r.to_f64().abs() <= bound
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn signum_tol(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn signum_tol(&self, _tol: f64) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Element `a + b√d` of a real quadratic field, exact.
///
/// `d = 0` marks a plain rational. Mixing two different nonzero radicands
/// is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    a: Rational,
    b: Rational,
    d: u32,
}

impl Quadratic {
    pub fn new(a: Rational, b: Rational, d: u32) -> Self {
        let mut q = Quadratic { a, b, d };
        q.normalize();
        q
    }

    pub fn rational(a: Rational) -> Self {
        Quadratic { a, b: Rational::zero(), d: 0 }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u32 {
        self.d
    }

    fn normalize(&mut self) {
        if self.b.is_zero() || self.d == 0 {
            if self.d == 0 {
                self.b = Rational::zero();
            }
            if self.b.is_zero() {
                self.d = 0;
            }
        }
    }

    fn join(d1: u32, d2: u32) -> u32 {
        match (d1, d2) {
            (0, d) | (d, 0) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("mixed radicands {x} and {y} in one computation"),
        }
    }

    fn conjugate(&self) -> Self {
        Quadratic { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² - d b²`.
    fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(self.d))
    }

    fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: the larger of a² and d b² wins
        let n = self.norm();
        match rational_sign(&n) {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Quadratic {
    type Output = Quadratic;
    fn add(self, o: Quadratic) -> Quadratic {
        let d = Quadratic::join(self.d, o.d);
        Quadratic::new(self.a + o.a, self.b + o.b, d)
    }
}

impl Sub for Quadratic {
    type Output = Quadratic;
    fn sub(self, o: Quadratic) -> Quadratic {
        let d = Quadratic::join(self.d, o.d);
        Quadratic::new(self.a - o.a, self.b - o.b, d)
    }
}

impl Mul for Quadratic {
    type Output = Quadratic;
    fn mul(self, o: Quadratic) -> Quadratic {
        let d = Quadratic::join(self.d, o.d);
        let dd = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dd;
        let b = &self.a * &o.b + &self.b * &o.a;
        Quadratic::new(a, b, d)
    }
}

impl Div for Quadratic {
    type Output = Quadratic;
    fn div(self, o: Quadratic) -> Quadratic {
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        let num = self * o.conjugate();
        Quadratic::new(num.a / &n, num.b / &n, num.d)
    }
}

impl Neg for Quadratic {
    type Output = Quadratic;
    fn neg(self) -> Quadratic {
        Quadratic { a: -self.a, b: -self.b, d: self.d }
    }
}

macro_rules! assign_via {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Quadratic {
            fn $m(&mut self, o: Quadratic) {
                let lhs = std::mem::replace(self, Quadratic::zero());
                *self = lhs $op o;
            }
        }
    };
}
assign_via!(AddAssign, add_assign, +);
assign_via!(SubAssign, sub_assign, -);
assign_via!(MulAssign, mul_assign, *);
assign_via!(DivAssign, div_assign, /);

impl Zero for Quadratic {
    fn zero() -> Self {
        Quadratic::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quadratic {
    fn one() -> Self {
        Quadratic::rational(Rational::one())
    }
}

impl PartialOrd for Quadratic {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some((self.clone() - o.clone()).sign().cmp(&0))
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        write!(f, "{}*sqrt({})", self.b, self.d)
    }
}

impl Scalar for Quadratic {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Quadratic::rational(Rational::from_i64(v))
    }
    fn ratio(p: i64, q: i64) -> Self {
        Quadratic::rational(<Rational as Scalar>::ratio(p, q))
    }
    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.a) + Scalar::to_f64(&self.b) * (self.d as f64).sqrt()
    }
    fn signum_tol(&self, _tol: f64) -> i8 {
        self.sign()
    }
}

/// Parses `p/q`, an integer, or a decimal literal (with optional exponent) exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = || Error::Parse(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| err())?);
    let shift = exp - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if neg { -value } else { value })
}

impl FromStr for Quadratic {
    type Err = Error;

    /// Accepts a rational, `c*sqrt(d)`, or `r+c*sqrt(d)` (also `sqrt(d)` and `-sqrt(d)`).
    fn from_str(s: &str) -> Result<Quadratic> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(at) = t.find("sqrt(") else {
            return Ok(Quadratic::rational(parse_rational(&t)?));
        };
        let err = || Error::Parse(s.to_string());
        let close = t[at..].find(')').ok_or_else(err)? + at;
        if close + 1 != t.len() {
            return Err(err());
        }
        let d: u32 = t[at + 5..close].parse().map_err(|_| err())?;
        let head = t[..at].strip_suffix('*').unwrap_or(&t[..at]);
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !head[..i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .last();
        let (rat, coef) = match split {
            Some(i) => (parse_rational(&head[..i])?, &head[i..]),
            None => (Rational::zero(), head),
        };
        let coef = match coef {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            c => parse_rational(c.trim_start_matches('+'))?,
        };
        Ok(Quadratic::new(rat, coef, d))
    }
}

//! Scalars: exact rationals with a machine-word fast path, Gaussian rationals,
//! the exact-or-float coefficient type carried by algebra elements, and finite
//! Laurent polynomials in a unimodular gauge variable `z`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Tolerance used whenever an inexact coefficient is compared against zero.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid number literal `{0}`")]
pub struct ParseNumberError(pub String);

/// Exact rational number.
///
/// Arithmetic runs on `i64` numerators and denominators and is promoted to
/// arbitrary precision only when a checked operation overflows; results that
/// fit are demoted again, so the representation of a value is unique.
#[derive(Clone, Debug)]
pub enum Rational {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(Ratio::from_integer(0))
    }

    pub fn one() -> Self {
        Rational::Small(Ratio::from_integer(1))
    }

    pub fn from_int(n: i64) -> Self {
        Rational::Small(Ratio::from_integer(n))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        if num == i64::MIN || den == i64::MIN {
            return Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)));
        }
        Rational::Small(Ratio::new(num, den))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                Rational::Small(Ratio::new_raw(n, d))
            }
            _ => Rational::Big(r),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(r) => {
                BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_zero(),
            Rational::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_one(),
            Rational::Big(r) => r.is_one(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_integer(),
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_negative(),
            Rational::Big(r) => r.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Rational::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        &Rational::one() / self
    }

    /// Always `p/q`, including `q = 1`.
    pub fn to_fraction_string(&self) -> String {
        let b = self.to_big();
        format!("{}/{}", b.numer(), b.denom())
    }

    fn binop(
        &self,
        rhs: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Rational::Small(a), Rational::Small(b)) = (self, rhs) {
            if let Some(r) = small(a, b) {
                if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                    return Rational::Small(r);
                }
            }
        }
        Self::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a == b,
            _ => self.to_big() == other.to_big(),
        }
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => {
                // cross-multiplication in i128 cannot overflow
                let l = *a.numer() as i128 * *b.denom() as i128;
                let r = *b.numer() as i128 * *a.denom() as i128;
                l.cmp(&r)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        self.binop(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self.binop(rhs, |a, b| a.checked_div(b), |a, b| a / b)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(r) => match r.numer().checked_neg() {
                Some(n) => Rational::Small(Ratio::new_raw(n, *r.denom())),
                None => Rational::from_big(-self.to_big()),
            },
            Rational::Big(r) => Rational::from_big(-r.clone()),
        }
    }
}

macro_rules! owned_binops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_binops!(Rational);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rational::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rational::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = ParseNumberError;

    /// Accepts `p`, `p/q` and finite decimals such as `-1.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseNumberError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Rational::from_big(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let neg = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let digits = format!(
                "{}{}",
                if int_digits.is_empty() {
                    "0"
                } else {
                    int_digits
                },
                frac
            );
            let mut n: BigInt = digits.parse().map_err(|_| err())?;
            if neg {
                n = -n;
            }
            let d = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::from_big(BigRational::new(n, d)));
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(Rational::from_big(BigRational::from_integer(n)))
    }
}

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRat {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::real(Rational::from_int(n))
    }

    pub fn zero() -> Self {
        GaussRat::default()
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }

    /// `|x|^2`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero");
        GaussRat::new(&self.re / &n, -&(&self.im / &n))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = GaussRat::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRat::real(&self.re * &rhs.re);
        }
        GaussRat::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

owned_binops!(GaussRat);

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "({}-{}i)", self.re, -&self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

/// Coefficient of an algebra element: exact when the inputs were exact,
/// complex double otherwise. Mixing the two yields a float.
#[derive(Clone, Debug)]
pub enum Coeff {
    Exact(GaussRat),
    Float(Complex64),
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Exact(GaussRat::zero())
    }

    pub fn one() -> Self {
        Coeff::Exact(GaussRat::one())
    }

    pub fn int(n: i64) -> Self {
        Coeff::Exact(GaussRat::from_int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Coeff::Exact(GaussRat::real(Rational::new(p, q)))
    }

    pub fn i() -> Self {
        Coeff::Exact(GaussRat::i())
    }

    pub fn gauss(re: Rational, im: Rational) -> Self {
        Coeff::Exact(GaussRat::new(re, im))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Coeff::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    /// Exact zero, or a float that is identically `0.0`.
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(g) => g.is_zero(),
            Coeff::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    /// Zero under the comparison convention: exact zero, or `|c| <= FLOAT_TOL`.
    pub fn is_negligible(&self) -> bool {
        match self {
            Coeff::Exact(g) => g.is_zero(),
            Coeff::Float(c) => c.norm() <= FLOAT_TOL,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Coeff::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Coeff::Exact(g) => Some(g),
            Coeff::Float(_) => None,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Coeff::Exact(g) => g.to_c64(),
            Coeff::Float(c) => *c,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Coeff::Exact(g) => Coeff::Exact(g.conj()),
            Coeff::Float(c) => Coeff::Float(c.conj()),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// `|c|^2`, exact when possible.
    pub fn norm_sqr(&self) -> Coeff {
        match self {
            Coeff::Exact(g) => Coeff::Exact(GaussRat::real(g.norm_sqr())),
            Coeff::Float(c) => Coeff::Float(Complex64::new(c.norm_sqr(), 0.0)),
        }
    }

    pub fn inv(&self) -> Self {
        match self {
            Coeff::Exact(g) => Coeff::Exact(g.inv()),
            Coeff::Float(c) => Coeff::Float(c.inv()),
        }
    }

    pub fn pow(&self, e: i32) -> Self {
        match self {
            Coeff::Exact(g) => Coeff::Exact(g.pow(e)),
            Coeff::Float(c) => Coeff::Float(c.powi(e)),
        }
    }

    /// Real part as an exact rational, if the coefficient is exact and real.
    pub fn exact_real(&self) -> Option<Rational> {
        match self {
            Coeff::Exact(g) if g.is_real() => Some(g.re.clone()),
            _ => None,
        }
    }

    fn lift(
        &self,
        rhs: &Coeff,
        exact: impl Fn(&GaussRat, &GaussRat) -> GaussRat,
        float: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(exact(a, b)),
            _ => Coeff::Float(float(self.to_c64(), rhs.to_c64())),
        }
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            _ => self.to_c64() == other.to_c64(),
        }
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        self.lift(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self.lift(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        self.lift(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl<'a> Div<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Coeff) -> Coeff {
        self * &rhs.inv()
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(g) => Coeff::Exact(-g),
            Coeff::Float(c) => Coeff::Float(-c),
        }
    }
}

owned_binops!(Coeff);

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl From<Rational> for Coeff {
    fn from(r: Rational) -> Self {
        Coeff::Exact(GaussRat::real(r))
    }
}

impl From<GaussRat> for Coeff {
    fn from(g: GaussRat) -> Self {
        Coeff::Exact(g)
    }
}

impl From<Complex64> for Coeff {
    fn from(c: Complex64) -> Self {
        Coeff::Float(c)
    }
}

fn fmt_float(x: f64) -> String {
    // exponent form keeps floats distinguishable from exact decimals when re-parsed
    format!("{:e}", x)
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(g) => write!(f, "{}", g),
            Coeff::Float(c) if c.im == 0.0 => write!(f, "{}", fmt_float(c.re)),
            Coeff::Float(c) => {
                let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", fmt_float(c.re), sign, fmt_float(c.im.abs()))
            }
        }
    }
}

/// Finite Laurent polynomial in a formal unimodular variable `z`; the adjoint
/// conjugates coefficients and sends `z^k` to `z^-k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Laurent {
    terms: BTreeMap<i32, Coeff>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Laurent::monomial(c, 0)
    }

    pub fn monomial(c: Coeff, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Laurent { terms }
    }

    pub fn z() -> Self {
        Laurent::monomial(Coeff::one(), 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Coeff)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i32) -> Coeff {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exp: i32, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.get(&exp) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if v.is_zero() {
            self.terms.remove(&exp);
        } else {
            self.terms.insert(exp, v);
        }
    }

    pub fn conj(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (-e, c.conj())).collect(),
        }
    }

    /// Substitute `z -> w z` for a fixed phase `w`.
    pub fn rescale(&self, w: &Coeff) -> Self {
        let mut out = Laurent::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &(c * &w.pow(*e)));
        }
        out
    }

    pub fn eval(&self, z: &Coeff) -> Coeff {
        self.terms
            .iter()
            .fold(Coeff::zero(), |acc, (e, c)| &acc + &(c * &z.pow(*e)))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Laurent::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, &(x * c));
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coeff::is_exact)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Coeff::abs).fold(0.0, f64::max)
    }
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a> Sub<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

owned_binops!(Laurent);

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("{}", c),
                _ => format!("{}*z^{}", c, e),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Ring operations shared by matrix entry types.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn scaled(&self, c: &Coeff) -> Self;
    fn conj(&self) -> Self;
    fn is_exact(&self) -> bool;
    /// Size used for discrepancy reporting (largest coefficient modulus).
    fn magnitude(&self) -> f64;
}

impl Scalar for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn one() -> Self {
        Coeff::one()
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, c: &Coeff) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        Coeff::conj(self)
    }
    fn is_exact(&self) -> bool {
        Coeff::is_exact(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Laurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn one() -> Self {
        Laurent::constant(Coeff::one())
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, c: &Coeff) -> Self {
        self.scale(c)
    }
    fn conj(&self) -> Self {
        Laurent::conj(self)
    }
    fn is_exact(&self) -> bool {
        Laurent::is_exact(self)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

// Serialized forms: integers that fit in i64 as JSON numbers, other exact
// rationals as "p/q" strings, complex values as {"re", "im"}, Laurent
// polynomials as {"z^k": coefficient}.

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rational::Small(x) if x.is_integer() => s.serialize_i64(*x.numer()),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}

impl serde::Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Coeff::Exact(g) if g.is_real() => g.re.serialize(s),
            Coeff::Float(z) if z.im == 0.0 => s.serialize_f64(z.re),
            Coeff::Exact(g) => {
                let mut st = s.serialize_struct("Complex", 2)?;
                st.serialize_field("re", &g.re)?;
                st.serialize_field("im", &g.im)?;
                st.end()
            }
            Coeff::Float(z) => {
                let mut st = s.serialize_struct("Complex", 2)?;
                st.serialize_field("re", &z.re)?;
                st.serialize_field("im", &z.im)?;
                st.end()
            }
        }
    }
}

impl serde::Serialize for Laurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        for (e, c) in self.terms() {
            m.serialize_entry(&format!("z^{e}"), c)?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_path_promotes_on_overflow() {
        let big = Rational::from_int(i64::MAX);
        let sum = &big + &big;
        assert!(matches!(sum, Rational::Big(_)));
        let back = &sum - &big;
        assert!(matches!(back, Rational::Small(_)));
        assert_eq!(back, big);
    }

    #[test]
    fn negating_min_does_not_overflow() {
        let m = Rational::from_int(i64::MIN + 1) - Rational::one();
        let n = -&m;
        assert_eq!(&n + &m, Rational::zero());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), Rational::new(-5, 4));
        assert_eq!(".5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1e3".parse::<Rational>().is_err());
    }

    #[test]
    fn gauss_arithmetic() {
        let i = GaussRat::i();
        assert_eq!(&i * &i, GaussRat::from_int(-1));
        let z = GaussRat::new(Rational::new(3, 5), Rational::new(4, 5));
        assert_eq!(z.norm_sqr(), Rational::one());
        assert_eq!(&z * &z.inv(), GaussRat::one());
        assert_eq!(z.pow(-2), z.conj().pow(2));
    }

    #[test]
    fn mixing_exact_and_float_gives_float() {
        let a = Coeff::ratio(1, 3);
        let b = Coeff::float(0.5, 0.0);
        assert!(!(&a + &b).is_exact());
        assert!((&a * &a).is_exact());
    }

    #[test]
    fn laurent_conjugation_inverts_powers() {
        let p = &Laurent::z() + &Laurent::monomial(Coeff::i(), -2);
        let q = p.conj();
        assert_eq!(q.coeff(-1), Coeff::one());
        assert_eq!(q.coeff(2), -Coeff::i());
        assert!((&p - &p).is_zero());
        // on the unit circle z* = 1/z
        let w = Coeff::i();
        assert_eq!(p.conj().eval(&w), p.eval(&w).conj());
    }
}

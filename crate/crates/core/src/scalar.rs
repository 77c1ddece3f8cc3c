//! Exact scalars: arbitrary-precision rationals extended by a formal central
//! unit `l` (the normalization constant of the Chern expansion), plus dual
//! numbers for exact first derivatives.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::Ring;

/// Exact rational multiplied by an integer power of the formal unit `l`.
///
/// Invariants: `gcd(num, den) = 1`, `den > 0`, and zero is stored canonically
/// as `0/1` with `lam_exp = 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    num: BigInt,
    den: BigInt,
    lam_exp: i32,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: BigInt::zero(), den: BigInt::one(), lam_exp: 0 }
    }

    pub fn one() -> Self {
        Scalar { num: BigInt::one(), den: BigInt::one(), lam_exp: 0 }
    }

    /// The formal unit `l` itself.
    pub fn lambda() -> Self {
        Scalar { num: BigInt::one(), den: BigInt::one(), lam_exp: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { num: BigInt::from(n), den: BigInt::one(), lam_exp: 0 }
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::new(BigInt::from(n), BigInt::from(d), 0)
    }

    pub fn new(num: BigInt, den: BigInt, lam_exp: i32) -> Self {
        assert!(!den.is_zero(), "scalar denominator must be nonzero");
        let mut s = Scalar { num, den, lam_exp };
        s.reduce();
        s
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = BigInt::one();
            self.lam_exp = 0;
            return;
        }
        if self.den.is_negative() {
            self.num = -std::mem::take(&mut self.num);
            self.den = -std::mem::take(&mut self.den);
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = &self.num / &g;
            self.den = &self.den / &g;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one() && self.lam_exp == 0
    }

    pub fn lam_exp(&self) -> i32 {
        self.lam_exp
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// Forgets the `l`-power, returning the bare rational part.
    pub fn rational_part(&self) -> Scalar {
        Scalar { num: self.num.clone(), den: self.den.clone(), lam_exp: 0 }
    }

    pub fn with_lam(mut self, lam_exp: i32) -> Self {
        if !self.is_zero() {
            self.lam_exp = lam_exp;
        }
        self
    }

    pub fn neg(&self) -> Self {
        Scalar { num: -&self.num, den: self.den.clone(), lam_exp: self.lam_exp }
    }

    /// Addition requires matching `l`-powers; mixed sums live at the
    /// polynomial level where `l` is carried as an exponent.
    pub fn add(&self, other: &Scalar) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.lam_exp, other.lam_exp,
            "cannot add scalars with distinct l-powers; promote to Poly"
        );
        Scalar::new(
            &self.num * &other.den + &other.num * &self.den,
            &self.den * &other.den,
            self.lam_exp,
        )
    }

    pub fn sub(&self, other: &Scalar) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Self {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        Scalar::new(&self.num * &other.num, &self.den * &other.den, self.lam_exp + other.lam_exp)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Scalar::new(self.den.clone(), self.num.clone(), -self.lam_exp))
    }

    pub fn div(&self, other: &Scalar) -> Self {
        self.mul(&other.inv().expect("division by zero scalar"))
    }

    /// 1/n for factorial-style denominators.
    pub fn inv_int(n: u64) -> Self {
        assert!(n != 0);
        Scalar::new(BigInt::one(), BigInt::from(n), 0)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar { num: self.num.abs(), den: self.den.clone(), lam_exp: self.lam_exp }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "{}/{}", self.num, self.den)?;
        }
        if self.lam_exp != 0 {
            write!(f, "*l^{}", self.lam_exp)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParseError(pub String);

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid scalar literal: {}", self.0)
    }
}

impl std::error::Error for ScalarParseError {}

impl FromStr for Scalar {
    type Err = ScalarParseError;

    /// Parses `num`, `num/den`, optionally suffixed by `*l^k`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarParseError(s.to_string());
        let (frac, lam) = match s.split_once("*l^") {
            Some((a, b)) => (a, b.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (n, d) = match frac.split_once('/') {
            Some((n, d)) => (
                BigInt::from_str(n.trim()).map_err(|_| bad())?,
                BigInt::from_str(d.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(frac.trim()).map_err(|_| bad())?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Scalar::new(n, d, lam))
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn add(&self, o: &Self) -> Self {
        Scalar::add(self, o)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Scalar::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn from_int(v: i64) -> Self {
        Scalar::from_int(v)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

/// Dual number `a + b*eps` with `eps^2 = 0`; realizes exact `d/dt` at `t = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dual<R> {
    pub re: R,
    pub im: R,
}

impl<R: Ring> Dual<R> {
    pub fn constant(re: R) -> Self {
        Dual { im: R::zero(), re }
    }

    pub fn variable(re: R) -> Self {
        Dual { re, im: R::one() }
    }
}

pub type DualScalar = Dual<Scalar>;

impl<R: Ring> Ring for Dual<R> {
    fn zero() -> Self {
        Dual { re: R::zero(), im: R::zero() }
    }
    fn one() -> Self {
        Dual { re: R::one(), im: R::zero() }
    }
    fn add(&self, o: &Self) -> Self {
        Dual { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    fn neg(&self) -> Self {
        Dual { re: self.re.neg(), im: self.im.neg() }
    }
    fn mul(&self, o: &Self) -> Self {
        // eps^2 truncates.
        Dual {
            re: self.re.mul(&o.re),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_int(v: i64) -> Self {
        Dual::constant(R::from_int(v))
    }
    fn try_inv(&self) -> Option<Self> {
        let r = self.re.try_inv()?;
        // (a + b eps)^-1 = a^-1 - a^-1 b a^-1 eps
        let im = r.mul(&self.im).mul(&r).neg();
        Some(Dual { re: r, im })
    }
}

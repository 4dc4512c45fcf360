//! Coefficient backends.
//!
//! Every object in the crate is generic over [`Scalar`]. Two backends ship:
//! [`Exact`], the field Q(√2, i) over arbitrary-precision rationals, and
//! [`Complex64`], plain double precision. The exact tower contains every
//! power of 1/√2 and every 8th root of unity, which is all the finite-level
//! identities need.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ring operations plus the few transcendental constants the
/// realizations use.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// `(√2)^k` for any integer `k`.
    fn sqrt2_pow(k: i64) -> Self;
    /// `exp(2πi·k/order)`. The exact backend accepts orders dividing 8 only.
    fn root_of_unity(k: i64, order: u32) -> Result<Self>;
    fn to_complex(&self) -> Complex64;
    fn to_json(&self) -> serde_json::Value;
    /// Exact equality on the exact backend, absolute tolerance on floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn inv(&self) -> Option<Self>;

    fn from_int(i: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(i)))
    }

    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Integer power where negative exponents invert through conjugation.
    /// Only meaningful for unit scalars.
    fn unit_pow(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.conj().pow((-e) as u32)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// `a + b√2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub rat: BigRational,
    pub sqrt2: BigRational,
}

impl QSqrt2 {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        QSqrt2 { rat, sqrt2 }
    }

    pub fn zero() -> Self {
        QSqrt2::new(BigRational::zero(), BigRational::zero())
    }

    pub fn from_rat(rat: BigRational) -> Self {
        QSqrt2::new(rat, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }

    /// Field norm `a² − 2b²`.
    fn field_norm(&self) -> BigRational {
        let two = BigRational::from_integer(2.into());
        &self.rat * &self.rat - two * &self.sqrt2 * &self.sqrt2
    }

    fn conj_sqrt2(&self) -> Self {
        QSqrt2::new(self.rat.clone(), -self.sqrt2.clone())
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.field_norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj_sqrt2();
        Some(QSqrt2::new(c.rat / &n, c.sqrt2 / n))
    }

    pub fn to_f64(&self) -> f64 {
        self.rat.to_f64().unwrap_or(f64::NAN)
            + std::f64::consts::SQRT_2 * self.sqrt2.to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rat + o.rat, self.sqrt2 + o.sqrt2)
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rat - o.rat, self.sqrt2 - o.sqrt2)
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.rat, -self.sqrt2)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(2.into());
        QSqrt2::new(
            &self.rat * &o.rat + two * &self.sqrt2 * &o.sqrt2,
            &self.rat * &o.sqrt2 + &self.sqrt2 * &o.rat,
        )
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (true, true) => f.write_str("0"),
            (false, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}√2", self.sqrt2),
            (false, false) => {
                if self.sqrt2.is_negative() {
                    write!(f, "{}-{}√2", self.rat, -self.sqrt2.clone())
                } else {
                    write!(f, "{}+{}√2", self.rat, self.sqrt2)
                }
            }
        }
    }
}

/// An element `re + i·im` of Q(√2, i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exact {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Exact {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Exact { re, im }
    }

    pub fn real(re: QSqrt2) -> Self {
        Exact::new(re, QSqrt2::zero())
    }

    pub fn rational(r: BigRational) -> Self {
        Exact::real(QSqrt2::from_rat(r))
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.im.is_zero() && self.re.sqrt2.is_zero() {
            Some(self.re.rat.clone())
        } else {
            None
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        Exact::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        Exact::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact::new(-self.re, -self.im)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        let rr = self.re.clone() * o.re.clone();
        let ii = self.im.clone() * o.im.clone();
        let ri = self.re * o.im;
        let ir = self.im * o.re;
        Exact::new(rr - ii, ri + ir)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})i", self.im)
        } else {
            write!(f, "{} + ({})i", self.re, self.im)
        }
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl Scalar for Exact {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Exact::real(QSqrt2::zero())
    }

    fn one() -> Self {
        Exact::rational(BigRational::one())
    }

    fn from_ratio(r: &BigRational) -> Self {
        Exact::rational(r.clone())
    }

    fn conj(&self) -> Self {
        Exact::new(self.re.clone(), -self.im.clone())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn sqrt2_pow(k: i64) -> Self {
        // (√2)^(2j) = 2^j, (√2)^(2j+1) = 2^j·√2
        let j = k.div_euclid(2);
        let odd = k.rem_euclid(2) == 1;
        let two_pow = if j >= 0 {
            BigRational::from_integer(BigInt::from(2).pow(j as u32))
        } else {
            BigRational::new(1.into(), BigInt::from(2).pow((-j) as u32))
        };
        if odd {
            Exact::real(QSqrt2::new(BigRational::zero(), two_pow))
        } else {
            Exact::rational(two_pow)
        }
    }

    fn root_of_unity(k: i64, order: u32) -> Result<Self> {
        if order == 0 || 8 % order != 0 {
            return Err(Error::NonExactPhase { order });
        }
        let step = k.rem_euclid(order as i64) * (8 / order as i64);
        // cos and sin of π·step/4, each in {0, ±1, ±1/√2}
        let table = |idx: i64| -> QSqrt2 {
            match idx.rem_euclid(8) {
                0 => QSqrt2::from_rat(BigRational::one()),
                1 | 7 => QSqrt2::new(BigRational::zero(), half()),
                2 | 6 => QSqrt2::zero(),
                3 | 5 => QSqrt2::new(BigRational::zero(), -half()),
                _ => QSqrt2::from_rat(-BigRational::one()),
            }
        };
        let cos = table(step);
        let sin = table(step - 2);
        Ok(Exact::new(cos, sin))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn to_json(&self) -> serde_json::Value {
        let part = |q: &QSqrt2| {
            serde_json::json!({ "rat": q.rat.to_string(), "sqrt2": q.sqrt2.to_string() })
        };
        serde_json::json!({ "re": part(&self.re), "im": part(&self.im) })
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn inv(&self) -> Option<Self> {
        // 1/z = conj(z)/|z|², and |z|² lies in Q(√2)
        let n = self.norm_sqr().re;
        let ninv = n.inv()?;
        let c = self.conj();
        Some(Exact::new(c.re * ninv.clone(), c.im * ninv))
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_ratio(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn sqrt2_pow(k: i64) -> Self {
        Complex64::new(2f64.powf(k as f64 / 2.0), 0.0)
    }

    fn root_of_unity(k: i64, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::NonExactPhase { order });
        }
        let theta = std::f64::consts::TAU * (k.rem_euclid(order as i64) as f64) / order as f64;
        Ok(Complex64::from_polar(1.0, theta))
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "re": self.re, "im": self.im })
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }

    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
}

/// Splits `√r` for a nonnegative rational `r` into `coeff · √kernel`, where
/// `coeff` is a rational multiple of a power of √2 and `kernel` is an odd
/// squarefree integer.
pub fn split_sqrt<S: Scalar>(r: &BigRational) -> Result<(S, u64)> {
    if r.is_negative() {
        return Err(Error::Radical(format!("negative radicand {r}")));
    }
    if r.is_zero() {
        return Ok((S::zero(), 1));
    }
    let num = r.numer().to_u128().ok_or_else(|| Error::Radical(format!("radicand {r} too large")))?;
    let den = r.denom().to_u128().ok_or_else(|| Error::Radical(format!("radicand {r} too large")))?;
    // √(n/d) = √(n·d)/d
    let prod = num
        .checked_mul(den)
        .ok_or_else(|| Error::Radical(format!("radicand {r} too large")))?;
    let (square_root, two_odd, kernel) = factor_square(prod)?;
    let coeff = S::from_ratio(&BigRational::new(BigInt::from(square_root), BigInt::from(den)))
        * S::sqrt2_pow(two_odd as i64);
    Ok((coeff, kernel))
}

/// Writes `n = s² · 2^t · k` with `t ∈ {0,1}` and `k` odd squarefree.
fn factor_square(mut n: u128) -> Result<(u128, u32, u64)> {
    let mut root: u128 = 1;
    let mut kernel: u128 = 1;
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    root <<= twos / 2;
    let mut p: u128 = 3;
    while p * p <= n {
        if p > 1_000_000 {
            return Err(Error::Radical("radicand has a large prime factor".into()));
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            root *= p;
        }
        if e % 2 == 1 {
            kernel *= p;
        }
        p += 2;
    }
    kernel *= n;
    let kernel = u64::try_from(kernel).map_err(|_| Error::Radical("kernel overflow".into()))?;
    Ok((root, twos % 2, kernel))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_qsqrt2() -> impl Strategy<Value = QSqrt2> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
            .prop_map(|(a, b, c, d)| QSqrt2::new(rat(a, b), rat(c, d)))
    }

    fn arb_exact() -> impl Strategy<Value = Exact> {
        (arb_qsqrt2(), arb_qsqrt2()).prop_map(|(r, i)| Exact::new(r, i))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(x in arb_exact(), y in arb_exact()) {
            let xy = x.clone() * y.clone();
            prop_assert_eq!(xy.clone() * xy.conj(), (x.clone() * x.conj()) * (y.clone() * y.conj()));
        }

        #[test]
        fn inverse_round_trips(x in arb_exact()) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(x.clone() * x.inv().unwrap(), Exact::one());
        }
    }

    #[test]
    fn eighth_roots_are_units_and_generate() {
        let zeta = Exact::root_of_unity(1, 8).unwrap();
        assert_eq!(zeta.norm_sqr(), Exact::one());
        assert_eq!(zeta.pow(8), Exact::one());
        assert_eq!(zeta.pow(2), Exact::root_of_unity(1, 4).unwrap());
        assert_eq!(zeta.pow(4), -Exact::one());
        for k in 0..8 {
            let e = Exact::root_of_unity(k, 8).unwrap().to_complex();
            let f = Complex64::root_of_unity(k, 8).unwrap();
            assert!((e - f).norm() < 1e-14);
        }
    }

    #[test]
    fn exact_rejects_non_eighth_orders() {
        assert!(matches!(Exact::root_of_unity(1, 3), Err(Error::NonExactPhase { order: 3 })));
        assert!(Complex64::root_of_unity(1, 3).is_ok());
    }

    #[test]
    fn sqrt2_powers() {
        assert_eq!(Exact::sqrt2_pow(2), Exact::from_int(2));
        assert_eq!(Exact::sqrt2_pow(-2), Exact::rational(rat(1, 2)));
        assert_eq!(Exact::sqrt2_pow(1) * Exact::sqrt2_pow(-1), Exact::one());
        assert_eq!(Exact::sqrt2_pow(3) * Exact::sqrt2_pow(3), Exact::from_int(8));
    }

    #[test]
    fn split_sqrt_factors() {
        // √(8/2) = 2
        let (c, k) = split_sqrt::<Exact>(&rat(8, 2)).unwrap();
        assert_eq!((c, k), (Exact::from_int(2), 1));
        // √(4/6) = √(2/3) = √6/3 = (√2/3)·√3
        let (c, k) = split_sqrt::<Exact>(&rat(4, 6)).unwrap();
        assert_eq!(k, 3);
        assert_eq!(c.clone() * c, Exact::rational(rat(2, 9)));
        let (c, k) = split_sqrt::<Exact>(&rat(2, 1)).unwrap();
        assert_eq!((c, k), (Exact::sqrt2_pow(1), 1));
    }
}

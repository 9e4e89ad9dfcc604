//! Exact arithmetic in the quadratic field ℚ[√5].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element `(a + b√5) / 2` of ℚ[√5] with rational `a`, `b`.
///
/// Stored internally as `x + y√5`; the half-integer view is available
/// through [`QSqrt5::halves`]. Equality is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt5 {
    rational: BigRational,
    surd: BigRational,
}

impl QSqrt5 {
    /// Builds `(a + b√5) / 2`.
    pub fn from_halves(a: BigRational, b: BigRational) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        Self {
            rational: a / &two,
            surd: b / two,
        }
    }

    pub fn from_integers(a: i64, b: i64) -> Self {
        Self::from_halves(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn integer(n: i64) -> Self {
        Self {
            rational: BigRational::from_integer(n.into()),
            surd: BigRational::zero(),
        }
    }

    /// The golden ratio `(1 + √5) / 2`.
    pub fn golden() -> Self {
        Self::from_integers(1, 1)
    }

    /// Returns `(a, b)` such that the value is `(a + b√5) / 2`.
    pub fn halves(&self) -> (BigRational, BigRational) {
        let two = BigRational::from_integer(BigInt::from(2));
        (&self.rational * &two, &self.surd * two)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// Galois conjugate `x - y√5`.
    pub fn conjugate(&self) -> Self {
        Self {
            rational: self.rational.clone(),
            surd: -self.surd.clone(),
        }
    }

    /// Field norm `x² - 5y²`.
    pub fn norm(&self) -> BigRational {
        let five = BigRational::from_integer(BigInt::from(5));
        &self.rational * &self.rational - five * &self.surd * &self.surd
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Self {
            rational: c.rational / &n,
            surd: c.surd / n,
        })
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::integer(1);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign: `-1`, `0` or `1`.
    pub fn signum(&self) -> i32 {
        // x + y√5 compared against zero without floating point
        let sx = sign(&self.rational);
        let sy = sign(&self.surd);
        if sx == 0 || sy == 0 || sx == sy {
            return if sx != 0 { sx } else { sy };
        }
        let five = BigRational::from_integer(BigInt::from(5));
        let x2 = &self.rational * &self.rational;
        let y2 = five * &self.surd * &self.surd;
        if x2 > y2 {
            sx
        } else if x2 < y2 {
            sy
        } else {
            0
        }
    }

    pub fn to_f64(&self) -> f64 {
        let x = self.rational.to_f64().unwrap_or(f64::NAN);
        let y = self.surd.to_f64().unwrap_or(f64::NAN);
        x + y * 5f64.sqrt()
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Zero for QSqrt5 {
    fn zero() -> Self {
        Self::integer(0)
    }

    fn is_zero(&self) -> bool {
        QSqrt5::is_zero(self)
    }
}

impl One for QSqrt5 {
    fn one() -> Self {
        Self::integer(1)
    }
}

impl Add for &QSqrt5 {
    type Output = QSqrt5;
    fn add(self, rhs: &QSqrt5) -> QSqrt5 {
        QSqrt5 {
            rational: &self.rational + &rhs.rational,
            surd: &self.surd + &rhs.surd,
        }
    }
}

impl Add for QSqrt5 {
    type Output = QSqrt5;
    fn add(self, rhs: QSqrt5) -> QSqrt5 {
        &self + &rhs
    }
}

impl Sub for &QSqrt5 {
    type Output = QSqrt5;
    fn sub(self, rhs: &QSqrt5) -> QSqrt5 {
        QSqrt5 {
            rational: &self.rational - &rhs.rational,
            surd: &self.surd - &rhs.surd,
        }
    }
}

impl Sub for QSqrt5 {
    type Output = QSqrt5;
    fn sub(self, rhs: QSqrt5) -> QSqrt5 {
        &self - &rhs
    }
}

impl Mul for &QSqrt5 {
    type Output = QSqrt5;
    fn mul(self, rhs: &QSqrt5) -> QSqrt5 {
        let five = BigRational::from_integer(BigInt::from(5));
        QSqrt5 {
            rational: &self.rational * &rhs.rational + five * &self.surd * &rhs.surd,
            surd: &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        }
    }
}

impl Mul for QSqrt5 {
    type Output = QSqrt5;
    fn mul(self, rhs: QSqrt5) -> QSqrt5 {
        &self * &rhs
    }
}

impl Neg for QSqrt5 {
    type Output = QSqrt5;
    fn neg(self) -> QSqrt5 {
        QSqrt5 {
            rational: -self.rational,
            surd: -self.surd,
        }
    }
}

impl fmt::Display for QSqrt5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.halves();
        write!(f, "({} + {}√5)/2", a, b)
    }
}

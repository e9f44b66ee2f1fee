//! Exact arithmetic in the quadratic field ℚ(√2).

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i128>;

/// `a + b√2` with rational `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QSqrt2 {
    a: Rational,
    b: Rational,
}

impl QSqrt2 {
    pub const fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn from_integer(n: i128) -> Self {
        QSqrt2::new(Rational::from_integer(n), Rational::zero())
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt2::new(a, Rational::zero())
    }

    /// `1/√2 = ½√2`.
    pub fn frac_1_sqrt_2() -> Self {
        QSqrt2::new(Rational::zero(), Rational::new(1, 2))
    }

    pub fn sqrt_2() -> Self {
        QSqrt2::new(Rational::zero(), Rational::one())
    }

    pub fn rational_part(&self) -> Rational {
        self.a
    }

    pub fn sqrt2_part(&self) -> Rational {
        self.b
    }

    /// Some(a) when the √2 component vanishes.
    pub fn as_rational(&self) -> Option<Rational> {
        self.b.is_zero().then_some(self.a)
    }

    /// Field norm `a² - 2b²`; zero only for zero.
    pub fn norm(&self) -> Rational {
        self.a * self.a - Rational::from_integer(2) * self.b * self.b
    }

    /// Galois conjugate `a - b√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2::new(self.a, -self.b)
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            None
        } else {
            let c = self.conjugate();
            Some(QSqrt2::new(c.a / n, c.b / n))
        }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.a) + core::f64::consts::SQRT_2 * ratio_to_f64(&self.b)
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        QSqrt2::from_integer(1)
    }
}

impl From<i128> for QSqrt2 {
    fn from(n: i128) -> Self {
        QSqrt2::from_integer(n)
    }
}

impl From<Rational> for QSqrt2 {
    fn from(a: Rational) -> Self {
        QSqrt2::from_rational(a)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl AddAssign for QSqrt2 {
    fn add_assign(&mut self, rhs: QSqrt2) {
        *self = *self + rhs;
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.a, -self.b)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    // (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
    fn mul(self, rhs: QSqrt2) -> QSqrt2 {
        let two = Rational::from_integer(2);
        QSqrt2::new(
            self.a * rhs.a + two * self.b * rhs.b,
            self.a * rhs.b + self.b * rhs.a,
        )
    }
}

impl Mul<Rational> for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: Rational) -> QSqrt2 {
        QSqrt2::new(self.a * rhs, self.b * rhs)
    }
}

impl Div for QSqrt2 {
    type Output = QSqrt2;
    /// Panics on division by zero, like the integer types.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: QSqrt2) -> QSqrt2 {
        self * rhs.recip().expect("division by zero in Q(sqrt 2)")
    }
}

fn write_ratio(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// `p/q + r/s·√2`, dropping a vanishing component.
impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write_ratio(f, &self.a),
            (true, false) => {
                write_ratio(f, &self.b)?;
                f.write_str("·√2")
            }
            (false, false) => {
                write_ratio(f, &self.a)?;
                f.write_str(if self.b.is_negative() { " - " } else { " + " })?;
                write_ratio(f, &self.b.abs())?;
                f.write_str("·√2")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn q(a: (i128, i128), b: (i128, i128)) -> QSqrt2 {
        QSqrt2::new(Rational::new(a.0, a.1), Rational::new(b.0, b.1))
    }

    #[test]
    fn inverse_root_two_squares_to_half() {
        let r = QSqrt2::frac_1_sqrt_2();
        assert_eq!(r * r, QSqrt2::from_rational(Rational::new(1, 2)));
        assert_eq!(QSqrt2::sqrt_2() * r, QSqrt2::one());
    }

    #[test]
    fn product_rule() {
        // (1 + 2√2)(3 - √2) = 3 - 4 + (6 - 1)√2
        assert_eq!(q((1, 1), (2, 1)) * q((3, 1), (-1, 1)), q((-1, 1), (5, 1)));
    }

    #[test]
    fn display_formats() {
        assert_eq!(q((1, 2), (0, 1)).to_string(), "1/2");
        assert_eq!(q((0, 1), (1, 2)).to_string(), "1/2·√2");
        assert_eq!(q((3, 4), (-1, 3)).to_string(), "3/4 - 1/3·√2");
        assert_eq!(QSqrt2::zero().to_string(), "0");
    }

    #[test]
    fn reciprocal() {
        let x = q((1, 1), (1, 1));
        assert_eq!(x * x.recip().unwrap(), QSqrt2::one());
        assert_eq!(QSqrt2::zero().recip(), None);
    }

    fn small() -> impl Strategy<Value = QSqrt2> {
        (-20i128..20, 1i128..12, -20i128..20, 1i128..12)
            .prop_map(|(a, b, c, d)| q((a, b), (c, d)))
    }

    proptest! {
        #[test]
        fn ring_laws(x in small(), y in small(), z in small()) {
            prop_assert_eq!((x + y) * z, x * z + y * z);
            prop_assert_eq!(x * y, y * x);
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x - x, QSqrt2::zero());
        }

        #[test]
        fn division_inverts_multiplication(x in small(), y in small()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((x * y) / y, x);
        }

        #[test]
        fn float_image_is_a_homomorphism(x in small(), y in small()) {
            let lhs = (x * y).to_f64();
            let rhs = x.to_f64() * y.to_f64();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}

//! Exact Gaussian rationals `re + i·im` with `re, im ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A rational kept in machine words while numerator and denominator fit,
/// promoted to a big rational otherwise. The representation is canonical:
/// `Small` whenever it fits, reduced, with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Rat {
    Small(i64, i64),
    Big(BigRational),
}

impl Rat {
    const ZERO: Rat = Rat::Small(0, 1);
    const ONE: Rat = Rat::Small(1, 1);

    fn from_i128(n: i128, d: i128) -> Rat {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(n, d),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(r) => r.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(r) => r.is_negative(),
        }
    }

    fn add(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(0, _), _) => o.clone(),
            (_, Rat::Small(0, _)) => self.clone(),
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    Rat::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat::Small(m, *d),
                None => Rat::from_big(-self.to_big()),
            },
            Rat::Big(r) => Rat::from_big(-r),
        }
    }

    fn sub(&self, o: &Rat) -> Rat {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(0, _), _) | (_, Rat::Small(0, _)) => Rat::ZERO,
            (Rat::Small(1, 1), _) => o.clone(),
            (_, Rat::Small(1, 1)) => self.clone(),
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    /// Panics on a zero divisor.
    fn div(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                assert!(*c != 0, "division by zero");
                Rat::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Rat::from_big(self.to_big() / o.to_big()),
        }
    }

    fn abs(&self) -> Rat {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rat::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// An element of ℚ(i). Arithmetic never rounds.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Rat,
    im: Rat,
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational {
            re: Rat::from_big(re),
            im: Rat::from_big(im),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: Rat::Small(n, 1),
            im: Rat::ZERO,
        }
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussianRational {
            re: Rat::from_i128(num as i128, den as i128),
            im: Rat::ZERO,
        }
    }

    pub fn complex(re: (i64, i64), im: (i64, i64)) -> Self {
        assert!(re.1 != 0 && im.1 != 0, "zero denominator");
        GaussianRational {
            re: Rat::from_i128(re.0 as i128, re.1 as i128),
            im: Rat::from_i128(im.0 as i128, im.1 as i128),
        }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: Rat::ZERO,
            im: Rat::ONE,
        }
    }

    pub fn re(&self) -> BigRational {
        self.re.to_big()
    }

    pub fn im(&self) -> BigRational {
        self.im.to_big()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero() && !self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        Some(GaussianRational {
            re: self.re.div(&norm),
            im: self.im.div(&norm).neg(),
        })
    }

    pub fn mul_i(&self) -> Self {
        GaussianRational {
            re: self.im.neg(),
            im: self.re.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianRational::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = Rat::Small(k, 1);
        GaussianRational {
            re: self.re.mul(&k),
            im: self.im.mul(&k),
        }
    }

    /// `(i/2)^m / m!`, the per-order Moyal prefactor without the ħ power.
    pub fn moyal_prefactor(m: u32) -> Self {
        let mut fact = BigInt::one();
        for j in 2..=m {
            fact *= BigInt::from(j);
        }
        let f = GaussianRational::from(BigRational::new(BigInt::one(), fact));
        &GaussianRational::complex((0, 1), (1, 2)).pow(m) * &f
    }

    /// Canonical text: `3/2`, `-i`, `1/2 i`, `(3/2 + 1/2 i)`.
    pub fn canonical(&self) -> String {
        format!("{self}")
    }
}

fn fmt_imag(r: &Rat) -> String {
    if r.is_one() {
        "i".to_string()
    } else if r.neg().is_one() {
        "-i".to_string()
    } else {
        format!("{r} i")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}", fmt_imag(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {})", self.re, sign, fmt_imag(&self.im.abs()))
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: Rat::ZERO,
            im: Rat::ZERO,
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: Rat::ONE,
            im: Rat::ZERO,
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        GaussianRational {
            re: Rat::from_big(r),
            im: Rat::ZERO,
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re = self.re.add(&rhs.re);
        if !rhs.im.is_zero() {
            self.im = self.im.add(&rhs.im);
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re = self.re.sub(&rhs.re);
        if !rhs.im.is_zero() {
            self.im = self.im.sub(&rhs.im);
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => GaussianRational {
                re: self.re.mul(&rhs.re),
                im: Rat::ZERO,
            },
            (true, false) => GaussianRational {
                re: self.re.mul(&rhs.re),
                im: self.re.mul(&rhs.im),
            },
            (false, true) => GaussianRational {
                re: self.re.mul(&rhs.re),
                im: self.im.mul(&rhs.re),
            },
            (false, false) => GaussianRational {
                re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
                im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
            },
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = GaussianRational::complex((3, 2), (-1, 5));
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(GaussianRational::ratio(3, 2).canonical(), "3/2");
        assert_eq!(GaussianRational::complex((0, 1), (-1, 1)).canonical(), "-i");
        assert_eq!(GaussianRational::complex((0, 1), (1, 2)).canonical(), "1/2 i");
        assert_eq!(GaussianRational::complex((3, 2), (1, 2)).canonical(), "(3/2 + 1/2 i)");
        assert_eq!(GaussianRational::complex((3, 2), (-1, 2)).canonical(), "(3/2 - 1/2 i)");
    }

    #[test]
    fn moyal_prefactors() {
        assert_eq!(GaussianRational::moyal_prefactor(0), GaussianRational::one());
        assert_eq!(GaussianRational::moyal_prefactor(1), GaussianRational::complex((0, 1), (1, 2)));
        // (i/2)^2 / 2 = -1/8
        assert_eq!(GaussianRational::moyal_prefactor(2), GaussianRational::ratio(-1, 8));
    }
}

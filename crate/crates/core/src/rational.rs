//! Arbitrary-precision rationals and a few conversions used throughout.

use alloc::string::{String, ToString};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 1/n! as an exact rational.
pub fn inv_factorial(n: usize) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::new(BigInt::one(), f)
}

/// `(-1)^parity` as a rational.
pub fn sign(parity: u8) -> Rational {
    if parity & 1 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Parity of an integral rational; `None` when it is not an integer.
pub fn integer_parity(q: &Rational) -> Option<u8> {
    if q.is_integer() {
        Some(if q.to_integer().is_odd() { 1 } else { 0 })
    } else {
        None
    }
}

/// Smallest integer ≥ q.
pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Nonnegative generator of the subgroup of ℚ spanned by `values`.
pub fn rational_gcd(values: &[Rational]) -> Rational {
    let mut g = Rational::zero();
    for v in values {
        g = gcd_pair(&g, &v.abs());
    }
    g
}

fn gcd_pair(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let den = a.denom().lcm(b.denom());
    let an = a.numer() * (&den / a.denom());
    let bn = b.numer() * (&den / b.denom());
    Rational::new(an.gcd(&bn), den)
}

/// `q mod m` in `[0, m)` for positive `m`.
pub fn rem_euclid(q: &Rational, m: &Rational) -> Rational {
    let k = (q / m).floor();
    q - k * m
}

/// Compact `n/d` or `n` rendering.
pub fn show(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

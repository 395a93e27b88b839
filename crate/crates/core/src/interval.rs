//! Certified real intervals with exact rational endpoints.
//!
//! Every operation returns an interval guaranteed to contain the exact result.
//! Endpoints are rounded outward to dyadic rationals with a configurable number
//! of fractional bits so that repeated arithmetic does not blow up denominators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Q::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Largest absolute value of any point.
    pub fn mag(&self) -> Q {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let (mn, mx) = if a < b { (a, b) } else { (b, a) };
        if self.contains_zero() {
            Interval::new(Q::zero(), mx)
        } else {
            Interval::new(mn, mx)
        }
    }

    /// Rounds endpoints outward to multiples of 2^-bits.
    pub fn round(&self, bits: u32) -> Interval {
        Interval {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    /// Square root of a nonnegative interval, each endpoint enclosed to 2^-bits.
    pub fn sqrt(&self, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "sqrt of negative interval");
        let lo = sqrt_bounds(&self.lo, bits).0;
        let hi = sqrt_bounds(&self.hi, bits).1;
        Interval::new(lo, hi)
    }

    pub fn scale(&self, s: &Q) -> Interval {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

pub fn round_down(x: &Q, bits: u32) -> Q {
    let s = pow2(bits);
    let scaled = x * Q::from_integer(s.clone());
    Q::new(scaled.numer().div_floor(scaled.denom()), s)
}

pub fn round_up(x: &Q, bits: u32) -> Q {
    let s = pow2(bits);
    let scaled = x * Q::from_integer(s.clone());
    Q::new(num_integer::Integer::div_ceil(scaled.numer(), scaled.denom()), s)
}

/// Returns `(l, u)` with `l <= sqrt(x) <= u` and `u - l <= 2^-bits`.
pub fn sqrt_bounds(x: &Q, bits: u32) -> (Q, Q) {
    if x.is_zero() {
        return (Q::zero(), Q::zero());
    }
    // floor(sqrt(x * 4^bits)) / 2^bits bounds sqrt(x) from below
    let s = pow2(2 * bits);
    let scaled = x * Q::from_integer(s);
    let floor = scaled.numer().div_floor(scaled.denom());
    let r = floor.sqrt();
    let lo = Q::new(r.clone(), pow2(bits));
    let hi = Q::new(r + 1u32, pow2(bits));
    (lo, hi)
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", decimal(&self.lo, 30), decimal(&self.hi, 30))
    }
}

/// Decimal rendering truncated toward zero with `digits` fractional digits.
pub fn decimal(x: &Q, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (a.numer() * &scale) / a.denom();
    let (ip, fp) = scaled.div_rem(&scale);
    let mut frac = fp.to_string();
    while frac.len() < digits {
        frac.insert(0, '0');
    }
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, frac)
}

/// Complex number with interval real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn real(re: Interval) -> Self {
        ComplexInterval {
            re,
            im: Interval::point(Q::zero()),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexInterval {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn scale_real(&self, s: &Interval) -> Self {
        ComplexInterval {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn round(&self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.round(bits),
            im: self.im.round(bits),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn mag(&self) -> Q {
        let a = self.re.mag();
        let b = self.im.mag();
        if a > b {
            a
        } else {
            b
        }
    }
}

impl Add for &ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

/// Endpoints as decimal strings, for reports.
pub fn interval_strings(x: &Interval, digits: usize) -> [String; 2] {
    [decimal(&x.lo, digits), decimal(&x.hi, digits)]
}

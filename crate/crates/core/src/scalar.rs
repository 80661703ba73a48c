//! Complex scalar abstraction shared by the double-precision and the
//! multiprecision evaluation paths.
//!
//! Expressions, automorphisms and interpolants are evaluated through
//! [`ComplexField`] so that the Galerkin norm estimate can recompute `β(n)`
//! and `g(n)` at a working precision well above `f64`. Monomial coordinates of
//! degree-`N` polynomials lose about `5.1·N` bits to cancellation, so the image
//! Gram matrix has to be formed with that much headroom.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::Complex;

pub trait ComplexField:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant carried at the same precision as `self`.
    fn lift(&self, c: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    /// Principal branch `exp(e · Log z)`. Callers handle `z = 0`.
    fn powf(&self, e: f64) -> Self;
    fn exp(&self) -> Self;
    /// Principal square root.
    fn sqrt(&self) -> Self;
    /// Real part, as a scalar of the same kind.
    fn re_part(&self) -> Self;
    /// `|z|` rounded to `f64`; used for pole detection only.
    fn abs_f64(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(Complex64::new(0.0, 0.0))
    }
    fn one_like(&self) -> Self {
        self.lift(Complex64::new(1.0, 0.0))
    }
    /// `e^{iθ}`, unimodular to working precision.
    fn cis(&self, theta: f64) -> Self {
        self.lift(Complex64::new(0.0, theta)).exp()
    }
}

impl ComplexField for Complex64 {
    fn lift(&self, c: Complex64) -> Self {
        c
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn powf(&self, e: f64) -> Self {
        (self.ln() * e).exp()
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn re_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

/// Multiprecision complex number with a fixed working precision (in bits).
#[derive(Clone, Debug)]
pub struct Mp(pub Complex);

impl Mp {
    pub fn new(prec: u32, c: Complex64) -> Self {
        Mp(Complex::with_val(prec, (c.re, c.im)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, rhs: Mp) -> Mp {
        Mp(self.0 + rhs.0)
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, rhs: Mp) -> Mp {
        Mp(self.0 - rhs.0)
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, rhs: Mp) -> Mp {
        Mp(self.0 * rhs.0)
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, rhs: Mp) -> Mp {
        Mp(self.0 / rhs.0)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl ComplexField for Mp {
    fn lift(&self, c: Complex64) -> Self {
        Mp::new(self.prec(), c)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0.real().to_f64(), self.0.imag().to_f64())
    }
    fn conj(&self) -> Self {
        Mp(self.0.clone().conj())
    }
    fn powf(&self, e: f64) -> Self {
        let prec = self.prec();
        let log = self.0.clone().ln();
        Mp((log * rug::Float::with_val(prec, e)).exp())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn re_part(&self) -> Self {
        let prec = self.prec();
        Mp(Complex::with_val(prec, (self.0.real(), 0)))
    }
    fn abs_f64(&self) -> f64 {
        self.0.clone().abs().real().to_f64()
    }
}

//! Geometry of the half-plane `ℍ = {s : Re s > -1/2}`.
//!
//! `λ(s) = s/(s+1)` carries `ℍ` onto the unit disk. The Hardy space `H²(ℍ)`
//! is the pull-back of `H²(𝔻)` along `λ`; its reproducing kernel is
//! `k(s,u) = (1+s)(1+ū)/(1+s+ū)`, with the convention `⟨k_u, k_s⟩ = k(s,u)`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ComplexField;

/// Points closer than this to the line `Re s = -1/2` are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// A point of `ℍ`, at least [`BOUNDARY_MARGIN`] inside the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct HalfPlanePoint(Complex64);

impl HalfPlanePoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Domain(format!("{value} is not finite")));
        }
        if value.re <= -0.5 + BOUNDARY_MARGIN {
            return Err(Error::Domain(format!(
                "{value} is not inside the half-plane Re s > -1/2"
            )));
        }
        Ok(HalfPlanePoint(value))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(Complex64::new(re, 0.0))
    }

    /// The natural number `n` as a point of `ℍ`.
    pub fn nat(n: usize) -> Self {
        HalfPlanePoint(Complex64::new(n as f64, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn conj(self) -> Self {
        HalfPlanePoint(self.0.conj())
    }
}

impl TryFrom<Complex64> for HalfPlanePoint {
    type Error = Error;
    fn try_from(value: Complex64) -> Result<Self> {
        HalfPlanePoint::new(value)
    }
}

impl From<HalfPlanePoint> for Complex64 {
    fn from(p: HalfPlanePoint) -> Complex64 {
        p.0
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `λ(s) = s/(s+1)`.
pub fn moebius_lambda(s: HalfPlanePoint) -> Complex64 {
    let s = s.value();
    s / (s + 1.0)
}

/// `λ⁻¹(z) = z/(1-z)` for `|z| < 1`.
pub fn moebius_lambda_inv(z: Complex64) -> Result<HalfPlanePoint> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|{z}| >= 1 is outside the unit disk")));
    }
    HalfPlanePoint::new(z / (1.0 - z))
}

/// Reproducing kernel `k(s,u) = (1+s)(1+ū)/(1+s+ū)`.
pub fn kernel_eval(s: HalfPlanePoint, u: HalfPlanePoint) -> Complex64 {
    kernel_raw(s.value(), u.value())
}

/// Kernel formula without the half-plane check on `s`; `u` must lie in `ℍ`
/// and `Re s ≥ -1/2` keeps the denominator away from zero.
pub(crate) fn kernel_raw(s: Complex64, u: Complex64) -> Complex64 {
    let ub = u.conj();
    (1.0 + s) * (1.0 + ub) / (1.0 + s + ub)
}

/// An automorphism of `ℍ`, written as `λ⁻¹ ∘ b ∘ λ` with the disk automorphism
/// `b(z) = e^{iθ}(z-a)/(1-āz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AutoParams")]
pub struct HalfPlaneAutomorphism {
    theta: f64,
    a: Complex64,
}

#[derive(Deserialize)]
struct AutoParams {
    theta: f64,
    a: Complex64,
}

impl TryFrom<AutoParams> for HalfPlaneAutomorphism {
    type Error = Error;
    fn try_from(p: AutoParams) -> Result<Self> {
        HalfPlaneAutomorphism::new(p.theta, p.a)
    }
}

impl HalfPlaneAutomorphism {
    pub fn new(theta: f64, a: Complex64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("theta = {theta} is not finite")));
        }
        if !(a.norm() < 1.0) {
            return Err(Error::Domain(format!(
                "automorphism parameter |a| = {} must be < 1",
                a.norm()
            )));
        }
        Ok(HalfPlaneAutomorphism {
            theta: theta.rem_euclid(TAU),
            a,
        })
    }

    pub fn identity() -> Self {
        HalfPlaneAutomorphism {
            theta: 0.0,
            a: Complex64::new(0.0, 0.0),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// Parameters of the inverse map: `b⁻¹(w) = e^{-iθ}(w + a e^{iθ})/(1 + ā e^{-iθ} w)`.
    pub fn inverse(&self) -> Self {
        let rot = Complex64::from_polar(1.0, self.theta);
        HalfPlaneAutomorphism {
            theta: (-self.theta).rem_euclid(TAU),
            a: -self.a * rot,
        }
    }

    /// The disk automorphism `b(z)`.
    pub fn disk_map(&self, z: Complex64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, self.theta);
        rot * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    pub fn eval(&self, s: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let w = self.eval_generic(&s.value());
        HalfPlanePoint::new(w).map_err(|_| Error::BetaRange {
            at: s.value(),
            value: w,
        })
    }

    /// `β(s) = λ⁻¹(b(λ(s)))` at the working precision of `s`.
    pub fn eval_generic<F: ComplexField>(&self, s: &F) -> F {
        let one = s.one_like();
        let a = s.lift(self.a);
        let rot = s.cis(self.theta);
        let z = s.clone() / (s.clone() + one.clone());
        let b = rot * (z.clone() - a.clone()) / (one.clone() - a.conj() * z);
        b.clone() / (one - b)
    }

    /// `β⁻¹(0) = λ⁻¹(a)`, in closed form.
    pub fn preimage_of_zero(&self) -> HalfPlanePoint {
        HalfPlanePoint(self.a / (1.0 - self.a))
    }

    /// The factor `φ` in `(1+β(s)+conj β(t))/(1+s+t̄) = φ(s) conj φ(t)`:
    /// `φ(s) = (1+β(s))/(1+s) · ψ(λ(s))` with `ψ(z) = √(1-|a|²)/(1-āz)`, so `ψ(0) > 0`.
    pub fn factor(&self, s: HalfPlanePoint) -> Complex64 {
        let sv = s.value();
        let beta = self.eval_generic(&sv);
        let z = moebius_lambda(s);
        let psi = (1.0 - self.a.norm_sqr()).sqrt() / (1.0 - self.a.conj() * z);
        (1.0 + beta) / (1.0 + sv) * psi
    }
}

/// Free-function form of [`HalfPlaneAutomorphism::eval`].
pub fn automorphism_eval(a: &HalfPlaneAutomorphism, s: HalfPlanePoint) -> Result<HalfPlanePoint> {
    a.eval(s)
}

/// Free-function form of [`HalfPlaneAutomorphism::factor`].
pub fn automorphism_factor(a: &HalfPlaneAutomorphism, s: HalfPlanePoint) -> Complex64 {
    a.factor(s)
}

/// Largest `|(1+β(s)+conj β(t))/(1+s+t̄) - φ(s) conj φ(t)|` over all pairs drawn
/// from `points`.
pub fn factorization_residual(
    beta: impl Fn(Complex64) -> Complex64,
    phi: impl Fn(Complex64) -> Complex64,
    points: &[HalfPlanePoint],
) -> f64 {
    let vals: Vec<(Complex64, Complex64, Complex64)> = points
        .iter()
        .map(|p| (p.value(), beta(p.value()), phi(p.value())))
        .collect();
    let mut worst = 0.0f64;
    for (s, bs, ps) in &vals {
        for (t, bt, pt) in &vals {
            let lhs = (1.0 + bs + bt.conj()) / (1.0 + s + t.conj());
            let rhs = ps * pt.conj();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

//! Unitary monomial operators.
//!
//! For an automorphism `β` of `ℍ` and a phase `θ`, `xˢ ↦ c(s) x^{β(s)}` with
//!
//! ```text
//! c(s) = e^{iθ}/√(1+2Re β(0)) · (1 + conj β(0) + β(s))/(1+s)
//! ```
//!
//! is unitary on `L²[0,1]`. The matching weight `g = c·(1+s)/(1+β)` agrees,
//! up to a unimodular constant, with the normalized kernel
//! `e^{iθ} k_{s₀}/‖k_{s₀}‖`, `s₀ = β⁻¹(0)`.

use crate::error::Result;
use crate::halfplane::{kernel_raw, HalfPlaneAutomorphism, HalfPlanePoint};
use crate::monop::{builtin, BetaMap, MonomialOperatorSpec, Weight};
use crate::scalar::ComplexField;
use crate::Complex64;

/// `c(s)`, the coefficient of `x^{β(s)}` in `T xˢ`.
pub fn unitary_coeff(a: &HalfPlaneAutomorphism, theta: f64, s: HalfPlanePoint) -> Complex64 {
    let sv = s.value();
    let beta = a.eval_generic(&sv);
    unitary_weight_generic(a, theta, &sv) * (1.0 + beta) / (1.0 + sv)
}

/// `g(s) = e^{iθ}(1 + conj β(0) + β(s)) / (√(1+2Re β(0)) (1 + β(s)))`.
pub fn unitary_weight_generic<F: ComplexField>(a: &HalfPlaneAutomorphism, theta: f64, s: &F) -> F {
    let one = s.one_like();
    let b0 = a.eval_generic(&s.zero_like());
    let bs = a.eval_generic(s);
    let norm = (one.clone() + b0.re_part() * s.lift(Complex64::new(2.0, 0.0))).sqrt();
    let num = one.clone() + b0.conj() + bs.clone();
    s.cis(theta) * num / (norm * (one + bs))
}

/// The operator with `β = a` and the unitary weight for phase `θ`. The
/// trivial parameters give exactly `builtin("identity")`.
pub fn build_unitary(a: &HalfPlaneAutomorphism, theta: f64) -> Result<MonomialOperatorSpec> {
    if *a == HalfPlaneAutomorphism::identity() && theta.rem_euclid(std::f64::consts::TAU) == 0.0 {
        return builtin("identity");
    }
    MonomialOperatorSpec::new(
        BetaMap::Automorphism(*a),
        Weight::Unitary { theta, auto: *a },
    )
}

/// Largest `|1/(1+s+t̄) - c(s) conj c(t)/(1+β(s)+conj β(t))|` over the pairs;
/// zero exactly when `T` preserves the Gram matrix of the sampled monomials.
pub fn isometry_check(t: &MonomialOperatorSpec, pairs: &[(HalfPlanePoint, HalfPlanePoint)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(s, u) in pairs {
        let (sv, uv) = (s.value(), u.value());
        let (bs, bu) = (t.beta_at(sv)?.value(), t.beta_at(uv)?.value());
        let (cs, cu) = (t.coefficient(sv)?, t.coefficient(uv)?);
        let lhs = 1.0 / (1.0 + sv + uv.conj());
        let rhs = cs * cu.conj() / (1.0 + bs + bu.conj());
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `s ↦ e^{iθ} k(s, s₀)/√k(s₀, s₀)` with `s₀ = β⁻¹(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedKernelWeight {
    pub theta: f64,
    pub s0: HalfPlanePoint,
}

impl NormalizedKernelWeight {
    pub fn norm_sq(&self) -> f64 {
        kernel_raw(self.s0.value(), self.s0.value()).re
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta) * kernel_raw(s, self.s0.value()) / self.norm_sq().sqrt()
    }
}

pub fn bourdon_narayan_weight(a: &HalfPlaneAutomorphism, theta: f64) -> NormalizedKernelWeight {
    NormalizedKernelWeight {
        theta,
        s0: a.preimage_of_zero(),
    }
}

/// Phase `ω = g(0)/h(0)` of the unitary weight `g` relative to the normalized
/// kernel `h`, and the largest `|g(s) - ω h(s)|` over `points`.
pub fn weight_agreement(a: &HalfPlaneAutomorphism, theta: f64, points: &[HalfPlanePoint]) -> (Complex64, f64) {
    let h = bourdon_narayan_weight(a, theta);
    let g = |s: Complex64| unitary_weight_generic(a, theta, &s);
    let zero = Complex64::new(0.0, 0.0);
    let omega = g(zero) / h.eval(zero);
    let worst = points
        .iter()
        .map(|p| (g(p.value()) - omega * h.eval(p.value())).norm())
        .fold(0.0, f64::max);
    (omega, worst)
}

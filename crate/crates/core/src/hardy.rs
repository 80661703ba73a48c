//! The Hardy space `H²(ℍ)`: finite kernel sums, the unitary `U` and the
//! boundary-integral norm
//!
//! ```text
//! ‖f‖² = (1/2π) ∫ |f(-1/2 + it)|² / (t² + 1/4) dt.
//! ```
//!
//! Convention: `⟨k_u, k_s⟩ = k(s, u)`, so `⟨F, k_s⟩ = F(s)`. Gram matrices are
//! indexed with the row on the second slot.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::halfplane::{kernel_raw, HalfPlanePoint};
use crate::l2poly::{merge_key, quadrature_inner, MonomialSum, MonomialTerm};
use crate::quad::{self, Breakpoint, QuadOptions};
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub coeff: Complex64,
    pub point: HalfPlanePoint,
}

/// `Σ aₖ k_{uₖ}` with pairwise distinct points (merged like monomial exponents).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawKernelSum")]
pub struct KernelSum {
    terms: Vec<KernelTerm>,
}

#[derive(Deserialize)]
struct RawKernelSum {
    terms: Vec<KernelTerm>,
}

impl From<RawKernelSum> for KernelSum {
    fn from(raw: RawKernelSum) -> Self {
        KernelSum::new(raw.terms)
    }
}

impl KernelSum {
    pub fn new(terms: impl IntoIterator<Item = KernelTerm>) -> Self {
        let mut out: Vec<KernelTerm> = Vec::new();
        let mut keys = Vec::new();
        for t in terms {
            let key = merge_key(t.point.value());
            match keys.iter().position(|k| *k == key) {
                Some(i) => out[i].coeff += t.coeff,
                None => {
                    keys.push(key);
                    out.push(t);
                }
            }
        }
        KernelSum { terms: out }
    }

    pub fn kernel(coeff: Complex64, point: HalfPlanePoint) -> Self {
        KernelSum {
            terms: vec![KernelTerm { coeff, point }],
        }
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise value `Σ aₖ k(s, uₖ)`; `s` may be any point with
    /// `Re(1 + s + ūₖ) ≠ 0`, including the boundary line.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * kernel_raw(s, t.point.value()))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        hardy_inner(self, self).re
    }

    /// Norm² through the boundary integral.
    pub fn boundary_norm_sq(&self) -> Result<f64> {
        let bps: Vec<f64> = self.terms.iter().map(|t| t.point.value().im).collect();
        boundary_norm_sq(|s| self.eval(s), &bps)
    }
}

/// `xˢ ↦ k_{s̄}/(1+s)`.
pub fn u_apply(f: &MonomialSum) -> KernelSum {
    KernelSum::new(f.terms().iter().map(|t| KernelTerm {
        coeff: t.coeff / (1.0 + t.exp.value()),
        point: t.exp.conj(),
    }))
}

/// `k_u ↦ (1+ū)·x^{ū}`.
pub fn u_inverse(f: &KernelSum) -> MonomialSum {
    MonomialSum::new(f.terms.iter().map(|t| MonomialTerm {
        coeff: t.coeff * (1.0 + t.point.value().conj()),
        exp: t.point.conj(),
    }))
}

/// `(Uf)(s) = (1+s)∫₀¹ f(x) xˢ dx`, by quadrature.
pub fn u_pointwise(f: &MonomialSum, s: HalfPlanePoint) -> Result<Complex64> {
    let probe = MonomialSum::monomial(Complex64::new(1.0, 0.0), s.conj());
    Ok((1.0 + s.value()) * quadrature_inner(f, &probe)?)
}

/// `⟨F, G⟩ = Σᵢⱼ aᵢ b̄ⱼ k(tⱼ, uᵢ)`.
pub fn hardy_inner(f: &KernelSum, g: &KernelSum) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in &f.terms {
        for b in &g.terms {
            acc += a.coeff * b.coeff.conj() * kernel_raw(b.point.value(), a.point.value());
        }
    }
    acc
}

/// `(1/2π)∫ |f(-1/2+it)|²/(t²+1/4) dt` for `f` evaluable on the boundary line.
///
/// `peaks` lists ordinates where `f` varies fastest (for a kernel sum, the
/// imaginary parts of its points); they become quadrature breakpoints.
pub fn boundary_norm_sq<F>(f: F, peaks: &[f64]) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let integrand = |t: f64| {
        let v = f(Complex64::new(-0.5, t));
        Complex64::new(v.norm_sqr() / (t * t + 0.25), 0.0)
    };
    let mut bps: Vec<Breakpoint> = peaks.iter().map(|&t| Breakpoint::smooth(t)).collect();
    bps.push(Breakpoint::smooth(0.0));
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_intervals: 8000,
    };
    let out = quad::integrate_line(integrand, 0.0, 1.0, &bps, opts)?;
    Ok(out.value.re / (2.0 * PI))
}

//! Finite sums of complex-power monomials `Σ aₖ x^{sₖ}` in `L²[0,1]`.
//!
//! Each exponent lies in `ℍ`, which is exactly the condition for `x^s` to be
//! square integrable. Inner products are closed form,
//! `⟨xˢ, xᵗ⟩ = 1/(1+s+t̄)`; [`quadrature_inner`] is an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane::HalfPlanePoint;
use crate::quad::{self, QuadOptions};
use crate::Complex64;

/// Exponents closer than this (componentwise, after rounding) are merged.
pub const MERGE_QUANTUM: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub coeff: Complex64,
    pub exp: HalfPlanePoint,
}

/// Canonical form: exponents pairwise distinct after rounding to
/// [`MERGE_QUANTUM`], terms in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSum")]
pub struct MonomialSum {
    terms: Vec<MonomialTerm>,
}

#[derive(Deserialize)]
struct RawSum {
    terms: Vec<MonomialTerm>,
}

impl From<RawSum> for MonomialSum {
    fn from(raw: RawSum) -> Self {
        MonomialSum::new(raw.terms)
    }
}

pub(crate) fn merge_key(z: Complex64) -> (i128, i128) {
    let q = |v: f64| (v / MERGE_QUANTUM).round() as i128;
    (q(z.re), q(z.im))
}

impl MonomialSum {
    pub fn new(terms: impl IntoIterator<Item = MonomialTerm>) -> Self {
        let mut out: Vec<MonomialTerm> = Vec::new();
        let mut keys: Vec<(i128, i128)> = Vec::new();
        for t in terms {
            let key = merge_key(t.exp.value());
            match keys.iter().position(|k| *k == key) {
                Some(i) => out[i].coeff += t.coeff,
                None => {
                    keys.push(key);
                    out.push(t);
                }
            }
        }
        MonomialSum { terms: out }
    }

    pub fn monomial(coeff: Complex64, exp: HalfPlanePoint) -> Self {
        MonomialSum {
            terms: vec![MonomialTerm { coeff, exp }],
        }
    }

    /// `xⁿ`.
    pub fn power(n: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), HalfPlanePoint::nat(n))
    }

    /// `Σₙ cₙ xⁿ`.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        MonomialSum::new(coeffs.iter().enumerate().map(|(n, &c)| MonomialTerm {
            coeff: c,
            exp: HalfPlanePoint::nat(n),
        }))
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        MonomialSum {
            terms: self
                .terms
                .iter()
                .map(|t| MonomialTerm {
                    coeff: t.coeff * c,
                    exp: t.exp,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &MonomialSum) -> Self {
        MonomialSum::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        eval_monomial_sum(self, x)
    }

    pub fn norm_sq(&self) -> f64 {
        l2_inner(self, self).re
    }
}

/// `∫₀¹ xˢ x̄ᵗ dx = 1/(1+s+t̄)`.
pub fn monomial_inner(s: Complex64, t: Complex64) -> Complex64 {
    1.0 / (1.0 + s + t.conj())
}

/// `⟨f, h⟩ = ∫₀¹ f h̄ dx`, linear in the first slot.
pub fn l2_inner(f: &MonomialSum, h: &MonomialSum) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in &f.terms {
        for b in &h.terms {
            acc += a.coeff * b.coeff.conj() * monomial_inner(a.exp.value(), b.exp.value());
        }
    }
    acc
}

/// `⟨f, h⟩` by adaptive quadrature, absolute error target `1e-10`.
///
/// With `x = u^p` the integrand `x^e`, `Re e ≥ α > -1`, becomes
/// `p·u^{p(e+1)-1}`; `p = 2/(1+min(α,0))` makes every power at least `u¹`.
pub fn quadrature_inner(f: &MonomialSum, h: &MonomialSum) -> Result<Complex64> {
    let mut pairs = Vec::with_capacity(f.len() * h.len());
    for a in &f.terms {
        for b in &h.terms {
            pairs.push((a.coeff * b.coeff.conj(), a.exp.value() + b.exp.value().conj()));
        }
    }
    if pairs.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let alpha = pairs.iter().map(|p| p.1.re).fold(f64::INFINITY, f64::min);
    let p = 2.0 / (1.0 + alpha.min(0.0));
    let integrand = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lu = u.ln();
        pairs
            .iter()
            .map(|&(c, e)| c * ((e + 1.0) * (p * lu)).exp() / u * p)
            .sum::<Complex64>()
    };
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-11,
        ..Default::default()
    };
    Ok(quad::integrate(integrand, 0.0, 1.0, opts)?.value)
}

/// `Σ aₖ x^{sₖ}` with `x^s = exp(s ln x)`.
pub fn eval_monomial_sum(f: &MonomialSum, x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("x = {x} is outside (0, 1]")));
    }
    let lx = x.ln();
    Ok(f.terms
        .iter()
        .map(|t| t.coeff * (t.exp.value() * lx).exp())
        .sum())
}

/// Coordinates in the orthonormal shifted-Legendre basis
/// `P̃ₖ(x) = √(2k+1)·Pₖ(2x-1)` of `L²[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreCoords {
    pub degree: usize,
    pub coeffs: Vec<Complex64>,
}

impl LegendreCoords {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `⟨xⁿ, P̃ₖ⟩ = √(2k+1)·n!²/((n-k)!(n+k+1)!)` for `k = 0..=n`, zero beyond.
pub fn monomial_legendre_row(n: usize, degree: usize) -> Vec<f64> {
    let mut row = vec![0.0; degree + 1];
    let mut r = 1.0 / (n as f64 + 1.0);
    for (k, slot) in row.iter_mut().enumerate().take(n.min(degree) + 1) {
        *slot = ((2 * k + 1) as f64).sqrt() * r;
        r *= (n - k) as f64 / (n + k + 2) as f64;
    }
    row
}

/// Integer exponent of a monomial, if it is one of `0..=degree`.
pub(crate) fn integer_exponent(s: Complex64, degree: usize) -> Option<usize> {
    if s.im == 0.0 && s.re >= 0.0 && s.re.fract() == 0.0 && s.re <= degree as f64 {
        Some(s.re as usize)
    } else {
        None
    }
}

pub fn to_legendre(f: &MonomialSum, degree: usize) -> Result<LegendreCoords> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    for t in &f.terms {
        let s = t.exp.value();
        let n = integer_exponent(s, degree).ok_or(Error::ExponentOutOfRange(s, degree))?;
        for (k, w) in monomial_legendre_row(n, degree).into_iter().enumerate() {
            coeffs[k] += t.coeff * w;
        }
    }
    Ok(LegendreCoords { degree, coeffs })
}

/// `P̃ₖ(x)` for `k = 0..=degree` by the three-term recurrence.
pub fn shifted_legendre_values(x: f64, degree: usize) -> Vec<f64> {
    let t = 2.0 * x - 1.0;
    let mut p = Vec::with_capacity(degree + 1);
    p.push(1.0);
    if degree >= 1 {
        p.push(t);
    }
    for k in 1..degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    for (k, v) in p.iter_mut().enumerate() {
        *v *= ((2 * k + 1) as f64).sqrt();
    }
    p
}

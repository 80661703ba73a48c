//! Pick matrices, PSD verdicts and constructive Nevanlinna–Pick interpolation.
//!
//! A sequence `pₙ ∈ ℍ` is the exponent sequence of some nonzero monomial
//! operator exactly when
//!
//! ```text
//! [(p_m + p̄_n + 1)/(m + n + 1)] ≥ 0,
//! ```
//!
//! the Pick condition for a holomorphic `β: ℍ → ℍ` with `β(n) = pₙ`. The
//! general half-plane form used for arbitrary nodes is
//! `(1 + w_m + w̄_n)/(1 + z_m + z̄_n)`, which is congruent (by a diagonal
//! matrix) to the disk matrix `(1 - λ(w_m)conj λ(w_n))/(1 - λ(z_m)conj λ(z_n))`.

mod psd;
mod schur;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use psd::{psd_check, quadratic_form, PsdStatus, PsdVerdict, MAX_SIZE};

use crate::error::{Error, Result};
use crate::halfplane::{moebius_lambda, HalfPlanePoint};
use crate::scalar::ComplexField;
use crate::{Complex64, DEFAULT_TOL};
use schur::{schur_chain, SchurChain};

/// Nodes closer than this are reported as coincident.
pub const NODE_SEPARATION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PickMatrix {
    pub n: usize,
    pub entries: DMatrix<Complex64>,
}

impl PickMatrix {
    pub fn check(&self, tol: f64) -> Result<PsdVerdict> {
        psd_check(&self.entries, tol)
    }
}

fn hermitian(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        let d = entry(i, i);
        m[(i, i)] = Complex64::new(d.re, 0.0);
        for j in i + 1..n {
            let v = entry(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    m
}

fn check_size(n: usize, available: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("Pick matrix size must be at least 1".into()));
    }
    if n > MAX_SIZE {
        return Err(Error::Domain(format!("Pick matrix size {n} exceeds the cap of {MAX_SIZE}")));
    }
    if available < n {
        return Err(Error::Domain(format!(
            "sequence has {available} entries, size {n} requested"
        )));
    }
    Ok(())
}

/// `M[m][n] = (p_m + p̄_n + 1)/(m + n + 1)` for `m, n < size`.
pub fn pick_matrix(p: &[HalfPlanePoint], size: usize) -> Result<PickMatrix> {
    check_size(size, p.len())?;
    let entries = hermitian(size, |m, n| {
        (p[m].value() + p[n].value().conj() + 1.0) / (m + n + 1) as f64
    });
    Ok(PickMatrix { n: size, entries })
}

/// `[(1 - c_m c̄_n)/(1 + m + n)]`, positive exactly when the diagonal operator
/// `xⁿ ↦ cₙ xⁿ` is a contraction.
pub fn diag_pick_matrix(c: &[Complex64], size: usize) -> Result<DMatrix<Complex64>> {
    check_size(size, c.len())?;
    Ok(hermitian(size, |m, n| {
        (1.0 - c[m] * c[n].conj()) / (1 + m + n) as f64
    }))
}

/// `[(1 + w_m + w̄_n)/(1 + z_m + z̄_n)]` for interpolation data `β(zᵢ) = wᵢ`.
pub fn halfplane_pick_matrix(
    nodes: &[HalfPlanePoint],
    targets: &[HalfPlanePoint],
) -> Result<DMatrix<Complex64>> {
    if nodes.len() != targets.len() {
        return Err(Error::Domain(format!(
            "{} nodes but {} targets",
            nodes.len(),
            targets.len()
        )));
    }
    check_size(nodes.len(), nodes.len())?;
    Ok(hermitian(nodes.len(), |m, n| {
        (1.0 + targets[m].value() + targets[n].value().conj())
            / (1.0 + nodes[m].value() + nodes[n].value().conj())
    }))
}

/// A holomorphic `β: ℍ → ℍ` with `β(zᵢ) = wᵢ`, realized as `λ⁻¹ ∘ φ ∘ λ` for
/// the Schur function `φ` of the disk-side recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NpData", into = "NpData")]
pub struct NpInterpolant {
    nodes: Vec<HalfPlanePoint>,
    targets: Vec<HalfPlanePoint>,
    chain: SchurChain,
}

/// Wire form: the interpolation data; the recursion is rerun on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NpData {
    pub nodes: Vec<HalfPlanePoint>,
    pub targets: Vec<HalfPlanePoint>,
}

impl TryFrom<NpData> for NpInterpolant {
    type Error = Error;
    fn try_from(d: NpData) -> Result<Self> {
        np_interpolate(&d.nodes, &d.targets)
    }
}

impl From<NpInterpolant> for NpData {
    fn from(i: NpInterpolant) -> Self {
        NpData {
            nodes: i.nodes,
            targets: i.targets,
        }
    }
}

impl NpInterpolant {
    pub fn nodes(&self) -> &[HalfPlanePoint] {
        &self.nodes
    }

    pub fn targets(&self) -> &[HalfPlanePoint] {
        &self.targets
    }

    /// `λ(β(s))`, the disk-side Schur function at `λ(s)`.
    pub fn disk_value(&self, s: HalfPlanePoint) -> Complex64 {
        self.chain.eval(&moebius_lambda(s))
    }

    pub fn eval(&self, s: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let w = self.eval_generic(&s.value());
        HalfPlanePoint::new(w).map_err(|_| Error::BetaRange { at: s.value(), value: w })
    }

    /// `β(s)` at the working precision of `s`.
    pub fn eval_generic<F: ComplexField>(&self, s: &F) -> F {
        let one = s.one_like();
        let z = s.clone() / (s.clone() + one.clone());
        let phi = self.chain.eval(&z);
        phi.clone() / (one - phi)
    }
}

pub fn np_interpolate(nodes: &[HalfPlanePoint], targets: &[HalfPlanePoint]) -> Result<NpInterpolant> {
    np_interpolate_with_tol(nodes, targets, DEFAULT_TOL)
}

/// Requires the half-plane Pick matrix to be strictly positive under
/// [`psd_check`] with tolerance `tol`; degenerate (boundary) data is rejected.
pub fn np_interpolate_with_tol(
    nodes: &[HalfPlanePoint],
    targets: &[HalfPlanePoint],
    tol: f64,
) -> Result<NpInterpolant> {
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if (nodes[i].value() - nodes[j].value()).norm() < NODE_SEPARATION {
                return Err(Error::DegenerateNodes(i, j));
            }
        }
    }
    let pick = halfplane_pick_matrix(nodes, targets)?;
    let verdict = psd_check(&pick, tol)?;
    if !verdict.is_strictly_positive() {
        return Err(Error::NotInterpolable(Box::new(verdict)));
    }
    let dn: Vec<Complex64> = nodes.iter().map(|&z| moebius_lambda(z)).collect();
    let dt: Vec<Complex64> = targets.iter().map(|&w| moebius_lambda(w)).collect();
    let chain = schur_chain(&dn, &dt).map_err(|_| Error::NotInterpolable(Box::new(verdict)))?;
    Ok(NpInterpolant {
        nodes: nodes.to_vec(),
        targets: targets.to_vec(),
        chain,
    })
}

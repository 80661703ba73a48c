//! Numerical toolkit for monomial operators on `L²[0,1]`.
//!
//! A monomial operator sends each `xⁿ` to a multiple of `x^{pₙ}`. Through the
//! unitary `U : L²[0,1] → H²(ℍ)`, `xˢ ↦ k_{s̄}/(1+s)`, every such operator is
//! the adjoint of a weighted composition operator `M_ǧ C_β̌` on the Hardy space
//! of the half-plane `ℍ = {Re s > -1/2}`.
//!
//! Module map:
//!
//! * [`halfplane`]: points of `ℍ`, the Möbius map `λ(s) = s/(s+1)`, the
//!   reproducing kernel and the automorphisms of `ℍ`.
//! * [`funcexpr`]: closed-form expressions in one complex variable, used for
//!   weights `g` and maps `β`.
//! * [`l2poly`]: finite sums of complex-power monomials and their inner products.
//! * [`hardy`]: finite kernel sums, the unitary `U` and the boundary-integral norm.
//! * [`monop`]: operator specifications `(β, g)`, their action and the Galerkin
//!   norm estimate.
//! * [`pick`]: Pick matrices, PSD verdicts and Nevanlinna–Pick interpolation.
//! * [`flatbound`]: Poisson integrals, Carleson sums and boundedness verdicts for
//!   flat operators.
//! * [`unitaryop`]: unitary monomial operators built from automorphisms.

pub mod error;
pub mod flatbound;
pub mod funcexpr;
pub mod halfplane;
pub mod hardy;
pub mod l2poly;
pub mod monop;
pub mod pick;
pub mod quad;
pub mod scalar;
pub mod unitaryop;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default relative tolerance used by PSD tests and verdicts.
pub const DEFAULT_TOL: f64 = 1e-10;

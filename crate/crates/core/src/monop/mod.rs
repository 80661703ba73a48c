//! Monomial operators `T xˢ = (1+β(s))/(1+s) · g(s) · x^{β(s)}`.
//!
//! Conjugated by `U`, `T` becomes `T̃ = U T U⁻¹` with adjoint
//! `T̃* = M_ǧ C_β̌`, i.e. `(T̃* f)(s) = ǧ(s) f(β̌(s))`, and on kernels
//! `T̃ kₛ = g(s̄) k_{β̌(s)}`.

mod galerkin;

use serde::{Deserialize, Serialize};

pub use galerkin::{norm_curve, norm_estimate, working_precision};

use crate::error::{Error, Result};
use crate::funcexpr::FuncExpr;
use crate::halfplane::{HalfPlaneAutomorphism, HalfPlanePoint};
use crate::hardy::{KernelSum, KernelTerm};
use crate::l2poly::{MonomialSum, MonomialTerm};
use crate::pick::{np_interpolate, NpData, NpInterpolant};
use crate::scalar::ComplexField;
use crate::unitaryop;
use crate::Complex64;

/// Largest allowed mismatch between a table and its interpolant, relative to
/// `1 + |table value|`.
pub const TABLE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum BetaMap {
    /// `β(s) = s + τ`, `Re τ ≥ 0`.
    FlatShift(Complex64),
    Automorphism(HalfPlaneAutomorphism),
    Interpolant(NpInterpolant),
    Expression(FuncExpr),
}

impl BetaMap {
    pub fn flat(tau: Complex64) -> Result<Self> {
        if !(tau.re >= 0.0) {
            return Err(Error::ReTauNegative(tau.re));
        }
        Ok(BetaMap::FlatShift(tau))
    }

    pub fn eval_generic<F: ComplexField>(&self, s: &F) -> Result<F> {
        Ok(match self {
            BetaMap::FlatShift(tau) => s.clone() + s.lift(*tau),
            BetaMap::Automorphism(a) => a.eval_generic(s),
            BetaMap::Interpolant(b) => b.eval_generic(s),
            BetaMap::Expression(e) => e.eval_generic(s)?,
        })
    }

    /// `β(s)`, required to land in `ℍ`.
    pub fn eval(&self, s: Complex64) -> Result<HalfPlanePoint> {
        let w = self.eval_generic(&s)?;
        HalfPlanePoint::new(w).map_err(|_| Error::BetaRange { at: s, value: w })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Expression(FuncExpr),
    /// Values `g(0), g(1), …` on `ℕ`. Off `ℕ` the weight is undefined until an
    /// interpolant is attached with [`MonomialOperatorSpec::with_weight_interpolant`].
    Table {
        values: Vec<Complex64>,
        interpolant: Option<FuncExpr>,
    },
    /// The weight that makes `T` unitary for an automorphism `β` and phase `θ`.
    Unitary { theta: f64, auto: HalfPlaneAutomorphism },
}

fn table_index(s: Complex64, len: usize) -> Option<usize> {
    if s.im == 0.0 && s.re >= 0.0 && s.re.fract() == 0.0 && s.re < len as f64 {
        Some(s.re as usize)
    } else {
        None
    }
}

impl Weight {
    pub fn eval_generic<F: ComplexField>(&self, s: &F) -> Result<F> {
        match self {
            Weight::Expression(e) => Ok(e.eval_generic(s)?),
            Weight::Table {
                values,
                interpolant,
            } => {
                let sv = s.to_c64();
                if let Some(n) = table_index(sv, values.len()) {
                    // only trust the f64 image if it is exact
                    if (s.clone() - s.lift(sv)).abs_f64() == 0.0 {
                        return Ok(s.lift(values[n]));
                    }
                }
                match interpolant {
                    Some(e) => Ok(e.eval_generic(s)?),
                    None => Err(Error::NotTabulated(sv)),
                }
            }
            Weight::Unitary { theta, auto } => Ok(unitaryop::unitary_weight_generic(auto, *theta, s)),
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        self.eval_generic(&s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Custom,
    Builtin(String),
    FlatShift,
    Tabulated,
    Automorphism,
    Unitary,
}

/// The pair `(β, g)` that determines `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecWire", into = "SpecWire")]
pub struct MonomialOperatorSpec {
    beta: BetaMap,
    g: Weight,
    provenance: Provenance,
}

impl MonomialOperatorSpec {
    pub fn new(beta: BetaMap, g: Weight) -> Result<Self> {
        if let BetaMap::FlatShift(tau) = beta {
            if !(tau.re >= 0.0) {
                return Err(Error::ReTauNegative(tau.re));
            }
        }
        if let Weight::Unitary { auto, .. } = &g {
            if beta != BetaMap::Automorphism(*auto) {
                return Err(Error::Domain(
                    "a unitary weight requires the same automorphism as beta".into(),
                ));
            }
        }
        if let Weight::Table {
            values,
            interpolant: Some(e),
        } = &g
        {
            check_interpolant(values, e)?;
        }
        let provenance = match (&beta, &g) {
            (_, Weight::Unitary { .. }) => Provenance::Unitary,
            (_, Weight::Table { .. }) => Provenance::Tabulated,
            (BetaMap::FlatShift(_), _) => Provenance::FlatShift,
            (BetaMap::Automorphism(_), _) => Provenance::Automorphism,
            _ => Provenance::Custom,
        };
        Ok(MonomialOperatorSpec {
            beta,
            g,
            provenance,
        })
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    /// Flat operator `β(s) = s + τ` with weight `g`.
    pub fn flat(tau: Complex64, g: FuncExpr) -> Result<Self> {
        Self::new(BetaMap::flat(tau)?, Weight::Expression(g))
    }

    /// The operator `xⁿ ↦ cₙ x^{pₙ}`, `n < len`, with `β` the Nevanlinna–Pick
    /// interpolant of `n ↦ pₙ` and `g` tabulated by [`weight_from_coeffs`].
    pub fn from_sequences(c: &[Complex64], p: &[HalfPlanePoint]) -> Result<Self> {
        let nodes: Vec<HalfPlanePoint> = (0..p.len()).map(HalfPlanePoint::nat).collect();
        let beta = np_interpolate(&nodes, p)?;
        let values = weight_from_coeffs(c, p)?;
        Self::new(
            BetaMap::Interpolant(beta),
            Weight::Table {
                values,
                interpolant: None,
            },
        )
    }

    pub fn beta(&self) -> &BetaMap {
        &self.beta
    }

    pub fn weight(&self) -> &Weight {
        &self.g
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Attach the interpolant used for a tabulated weight off `ℕ`. It must
    /// reproduce every table value to [`TABLE_TOL`].
    pub fn with_weight_interpolant(&self, e: FuncExpr) -> Result<Self> {
        let Weight::Table { values, .. } = &self.g else {
            return Err(Error::Domain("weight is not tabulated".into()));
        };
        check_interpolant(values, &e)?;
        let mut out = self.clone();
        out.g = Weight::Table {
            values: values.clone(),
            interpolant: Some(e),
        };
        Ok(out)
    }

    pub fn beta_at(&self, s: Complex64) -> Result<HalfPlanePoint> {
        self.beta.eval(s)
    }

    pub fn g_at(&self, s: Complex64) -> Result<Complex64> {
        self.g.eval(s)
    }

    /// `β̌(s) = conj β(s̄)`.
    pub fn beta_check(&self, s: Complex64) -> Result<HalfPlanePoint> {
        Ok(self.beta.eval(s.conj())?.conj())
    }

    /// `ǧ(s) = conj g(s̄)`.
    pub fn g_check(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.g.eval(s.conj())?.conj())
    }

    /// The multiplier of `x^{β(s)}` in `T xˢ`.
    pub fn coefficient(&self, s: Complex64) -> Result<Complex64> {
        let b = self.beta.eval(s)?.value();
        Ok((1.0 + b) / (1.0 + s) * self.g.eval(s)?)
    }

    pub fn apply(&self, f: &MonomialSum) -> Result<MonomialSum> {
        let terms = f
            .terms()
            .iter()
            .map(|t| {
                let s = t.exp.value();
                let b = self.beta.eval(s)?;
                let c = (1.0 + b.value()) / (1.0 + s) * self.g.eval(s)?;
                Ok(MonomialTerm {
                    coeff: t.coeff * c,
                    exp: b,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MonomialSum::new(terms))
    }

    /// `T̃ kₛ = g(s̄) k_{β̌(s)}`.
    pub fn conjugated_apply_kernel(&self, s: HalfPlanePoint) -> Result<KernelSum> {
        let sb = s.value().conj();
        Ok(KernelSum::kernel(self.g.eval(sb)?, self.beta_check(s.value())?))
    }

    /// `T̃ F` for a finite kernel sum, term by term.
    pub fn conjugated_apply(&self, f: &KernelSum) -> Result<KernelSum> {
        let terms = f
            .terms()
            .iter()
            .map(|t| {
                let k = self.conjugated_apply_kernel(t.point)?;
                let kt = k.terms()[0];
                Ok(KernelTerm {
                    coeff: t.coeff * kt.coeff,
                    point: kt.point,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelSum::new(terms))
    }

    /// `T̃* F = ǧ · (F ∘ β̌)`, as a pointwise evaluator.
    pub fn adjoint_apply<'a>(&'a self, f: &'a KernelSum) -> AdjointImage<'a> {
        AdjointImage { spec: self, f }
    }
}

/// `s ↦ ǧ(s) F(β̌(s))`; generally not a finite kernel sum.
pub struct AdjointImage<'a> {
    spec: &'a MonomialOperatorSpec,
    f: &'a KernelSum,
}

impl AdjointImage<'_> {
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let bc = self.spec.beta_check(s)?;
        Ok(self.spec.g_check(s)? * self.f.eval(bc.value()))
    }
}

fn check_interpolant(values: &[Complex64], e: &FuncExpr) -> Result<()> {
    for (n, &v) in values.iter().enumerate() {
        let w = e.eval(Complex64::new(n as f64, 0.0))?;
        if !((w - v).norm() <= TABLE_TOL * (1.0 + v.norm())) {
            return Err(Error::InterpolantMismatch {
                n,
                table: v,
                interp: w,
            });
        }
    }
    Ok(())
}

/// `g(n) = cₙ (1+n)/(1+pₙ)` for `n < min(len c, len p)`.
pub fn weight_from_coeffs(c: &[Complex64], p: &[HalfPlanePoint]) -> Result<Vec<Complex64>> {
    if c.len() != p.len() {
        return Err(Error::Domain(format!(
            "{} coefficients but {} exponents",
            c.len(),
            p.len()
        )));
    }
    Ok(c.iter()
        .zip(p)
        .enumerate()
        .map(|(n, (&cn, pn))| cn * (1.0 + n as f64) / (1.0 + pn.value()))
        .collect())
}

/// `cₙ = (1+pₙ)/(1+n)`: the coefficients with `g ≡ 1` on `ℕ`.
pub fn canonical_coeffs(p: &[HalfPlanePoint]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .map(|(n, pn)| (1.0 + pn.value()) / (1.0 + n as f64))
        .collect()
}

pub const BUILTINS: [&str; 4] = ["hardy", "volterra", "mult_x", "identity"];

/// `hardy`: `β = id`, `g = 1/(1+s)`. `volterra`: `τ = 1`, `g = 1/(s+2)`.
/// `mult_x`: `τ = 1`, `g = (1+s)/(2+s)`. `identity`: `τ = 0`, `g = 1`.
pub fn builtin(name: &str) -> Result<MonomialOperatorSpec> {
    let (tau, g) = match name {
        "hardy" => (0.0, "1/(1+s)"),
        "volterra" => (1.0, "1/(s+2)"),
        "mult_x" => (1.0, "(1+s)/(2+s)"),
        "identity" => (0.0, "1"),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    let g = FuncExpr::parse(g).expect("builtin expressions parse");
    Ok(MonomialOperatorSpec::flat(Complex64::new(tau, 0.0), g)?
        .with_provenance(Provenance::Builtin(name.to_string())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum BetaWire {
    Flat { tau: Complex64 },
    Auto { theta: f64, a: Complex64 },
    Expr { text: FuncExpr },
    Interp(NpData),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WeightWire {
    Expr {
        text: FuncExpr,
    },
    Table {
        values: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interpolant: Option<FuncExpr>,
    },
    Unitary {
        theta: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpecWire {
    beta: BetaWire,
    g: WeightWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl TryFrom<SpecWire> for MonomialOperatorSpec {
    type Error = Error;
    fn try_from(w: SpecWire) -> Result<Self> {
        let beta = match w.beta {
            BetaWire::Flat { tau } => BetaMap::flat(tau)?,
            BetaWire::Auto { theta, a } => BetaMap::Automorphism(HalfPlaneAutomorphism::new(theta, a)?),
            BetaWire::Expr { text } => BetaMap::Expression(text),
            BetaWire::Interp(d) => BetaMap::Interpolant(NpInterpolant::try_from(d)?),
        };
        let g = match w.g {
            WeightWire::Expr { text } => Weight::Expression(text),
            WeightWire::Table {
                values,
                interpolant,
            } => Weight::Table {
                values,
                interpolant,
            },
            WeightWire::Unitary { theta } => match &beta {
                BetaMap::Automorphism(auto) => Weight::Unitary {
                    theta,
                    auto: *auto,
                },
                _ => {
                    return Err(Error::Domain(
                        "weight kind \"unitary\" requires beta kind \"auto\"".into(),
                    ))
                }
            },
        };
        let spec = MonomialOperatorSpec::new(beta, g)?;
        Ok(match w.provenance {
            Some(p) => spec.with_provenance(p),
            None => spec,
        })
    }
}

impl From<MonomialOperatorSpec> for SpecWire {
    fn from(s: MonomialOperatorSpec) -> Self {
        let beta = match s.beta {
            BetaMap::FlatShift(tau) => BetaWire::Flat { tau },
            BetaMap::Automorphism(a) => BetaWire::Auto {
                theta: a.theta(),
                a: a.a(),
            },
            BetaMap::Expression(text) => BetaWire::Expr { text },
            BetaMap::Interpolant(b) => BetaWire::Interp(b.into()),
        };
        let g = match s.g {
            Weight::Expression(text) => WeightWire::Expr { text },
            Weight::Table {
                values,
                interpolant,
            } => WeightWire::Table {
                values,
                interpolant,
            },
            Weight::Unitary { theta, .. } => WeightWire::Unitary { theta },
        };
        SpecWire {
            beta,
            g,
            provenance: Some(s.provenance),
        }
    }
}

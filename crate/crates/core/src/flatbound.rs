//! Boundedness of flat operators `xⁿ ↦ (1+n+τ)/(1+n)·g(n)·x^{n+τ}`.
//!
//! For `Re τ > 0` the test is the Poisson integral of `|g|²` over the line
//! `Re s = -1/2`, scanned on `σ ≥ Re τ`. For `Re τ = 0` it is `sup |g|` on
//! layers approaching the boundary. An imaginary part of `τ` only rotates
//! the range by `x^{i Im τ}` and is dropped.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcexpr::FuncExpr;
use crate::quad::{integrate_line, integrate_pieces, power_piece, Breakpoint, QuadOptions};
use crate::Complex64;

/// `(1/π)·σ/(σ² + (y-t)²)`.
pub fn poisson_kernel(sigma: f64, t: f64, y: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("Poisson kernel needs sigma > 0, got {sigma}")));
    }
    let d = y - t;
    Ok(sigma / (sigma * sigma + d * d) / PI)
}

/// An algebraic singularity `|y - at|^{-alpha}` of a boundary profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub at: f64,
    pub alpha: f64,
}

/// `y ↦ |g(-1/2 + iy)|²` with its tail decay exponent.
#[derive(Clone)]
pub struct BoundaryProfile {
    gsq: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `gsq(y) = O(|y|^{-decay_hint})` as `|y| → ∞`.
    pub decay_hint: f64,
    pub singularities: Vec<Singularity>,
}

impl std::fmt::Debug for BoundaryProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryProfile")
            .field("decay_hint", &self.decay_hint)
            .field("singularities", &self.singularities)
            .finish_non_exhaustive()
    }
}

const SCAN_HALF_WIDTH: f64 = 64.0;
const SCAN_STEP: f64 = 1.0 / 64.0;
const MAX_PEAKS: usize = 64;

impl BoundaryProfile {
    pub fn new(gsq: impl Fn(f64) -> f64 + Send + Sync + 'static, decay_hint: f64) -> Self {
        BoundaryProfile {
            gsq: Arc::new(gsq),
            decay_hint,
            singularities: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, 0.0)
    }

    pub fn with_singularity(mut self, at: f64, alpha: f64) -> Self {
        self.singularities.push(Singularity { at, alpha });
        self
    }

    /// `|y|^{-2c}/(1/4 + y²)`, the profile of `1/((1+s)(s+1/2)^c)`.
    pub fn example(c: f64) -> Self {
        Self::new(move |y: f64| y.abs().powf(-2.0 * c) / (0.25 + y * y), 2.0 + 2.0 * c).with_singularity(0.0, 2.0 * c)
    }

    /// The boundary profile of `g`. Singular points are located by a scan of
    /// `[-64, 64]` at step `1/64` followed by golden-section refinement of
    /// local maxima; their exponents and the tail decay are read off from
    /// log-ratios of samples. Points where `g` has a pole give `+∞`.
    pub fn from_weight(g: &FuncExpr) -> Self {
        let g = g.clone();
        let gsq = move |y: f64| match g.eval(Complex64::new(-0.5, y)) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => v.norm_sqr(),
            _ => f64::INFINITY,
        };
        let decay = estimate_decay(&gsq);
        let singularities = locate_singularities(&gsq);
        BoundaryProfile {
            gsq: Arc::new(gsq),
            decay_hint: decay,
            singularities,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.gsq)(y)
    }

    /// Whether some singularity is not integrable.
    pub fn non_integrable(&self) -> Option<Singularity> {
        self.singularities.iter().copied().find(|s| s.alpha >= 1.0)
    }

    fn breakpoints(&self) -> Vec<Breakpoint> {
        self.singularities
            .iter()
            .map(|s| Breakpoint {
                at: s.at,
                singular: s.alpha.max(0.0),
            })
            .collect()
    }

    /// Compares the sampled tails with `decay_hint` over the decades
    /// `10³..10⁵` on both sides.
    pub fn check_tail(&self) -> Result<()> {
        let d = self.decay_hint;
        if !(d > -1.0) {
            return Err(Error::TailBoundViolated {
                decay_hint: d,
                detail: "the Poisson integral needs decay faster than |y|^1".into(),
            });
        }
        for sign in [-1.0, 1.0] {
            let v: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&y| self.eval(sign * y)).collect();
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::TailBoundViolated {
                    decay_hint: d,
                    detail: format!("profile is not a finite nonnegative number at y = {}", sign * 1e3),
                });
            }
            if v.iter().all(|&x| x == 0.0) {
                continue;
            }
            let observed = |a: f64, b: f64| if b == 0.0 { f64::INFINITY } else { (a / b).log10() };
            let o1 = observed(v[0], v[1]);
            let o2 = observed(v[1], v[2]);
            if o1 < d - 0.25 && o2 < d - 0.25 {
                return Err(Error::TailBoundViolated {
                    decay_hint: d,
                    detail: format!("observed decay exponents {o1:.3} and {o2:.3} on the side {sign:+}"),
                });
            }
        }
        Ok(())
    }
}

fn estimate_decay(gsq: &impl Fn(f64) -> f64) -> f64 {
    let mut worst = f64::INFINITY;
    for sign in [-1.0, 1.0] {
        let (a, b) = (gsq(sign * 1e4), gsq(sign * 1e5));
        let d = if b == 0.0 {
            f64::INFINITY
        } else if a.is_finite() && b.is_finite() && a > 0.0 {
            (a / b).log10()
        } else {
            f64::NEG_INFINITY
        };
        worst = worst.min(d);
    }
    if worst.is_finite() {
        // rounded down a little so that the tail check accepts it; a profile
        // with a nonzero limit keeps hint 0
        if worst >= -1e-6 {
            (worst - 0.1).max(0.0)
        } else {
            worst - 0.1
        }
    } else if worst > 0.0 {
        2.0
    } else {
        f64::NEG_INFINITY
    }
}

fn local_exponent(gsq: &impl Fn(f64) -> f64, y0: f64) -> f64 {
    let h = 1e-6 * y0.abs().max(1.0);
    let side = |sign: f64| {
        let (a, b) = (gsq(y0 + sign * h), gsq(y0 + sign * 2.0 * h));
        if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 {
            (a / b).log2()
        } else {
            f64::INFINITY
        }
    };
    side(-1.0).max(side(1.0))
}

fn golden_max(gsq: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (gsq(x1), gsq(x2));
    for _ in 0..120 {
        if !f1.is_finite() {
            return x1;
        }
        if !f2.is_finite() {
            return x2;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = gsq(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = gsq(x2);
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
    }
    0.5 * (a + b)
}

fn locate_singularities(gsq: &(impl Fn(f64) -> f64 + Sync)) -> Vec<Singularity> {
    let n = (2.0 * SCAN_HALF_WIDTH / SCAN_STEP) as usize;
    let ys: Vec<f64> = (0..=n).map(|k| -SCAN_HALF_WIDTH + k as f64 * SCAN_STEP).collect();
    let vals: Vec<f64> = ys.par_iter().map(|&y| gsq(y)).collect();
    let mut peaks: Vec<(f64, usize)> = Vec::new();
    for k in 0..=n {
        let v = vals[k];
        let left = if k > 0 { vals[k - 1] } else { f64::NEG_INFINITY };
        let right = if k < n { vals[k + 1] } else { f64::NEG_INFINITY };
        if !v.is_finite() || (v >= left && v >= right && (v > left || v > right)) {
            peaks.push((v, k));
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    peaks.truncate(MAX_PEAKS);
    let mut out: Vec<Singularity> = peaks
        .into_par_iter()
        .filter_map(|(v, k)| {
            let y0 = if v.is_finite() {
                let a = ys[k.saturating_sub(1)];
                let b = ys[(k + 1).min(n)];
                golden_max(gsq, a, b)
            } else {
                ys[k]
            };
            let alpha = local_exponent(gsq, y0);
            (alpha > 0.02).then_some(Singularity { at: y0, alpha })
        })
        .collect();
    out.sort_by(|a, b| a.at.total_cmp(&b.at));
    out.dedup_by(|a, b| (a.at - b.at).abs() < 1e-9);
    out
}

fn quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-9,
        rel_tol: 1e-10,
        max_intervals: 20_000,
    }
}

/// `P[|g|²](-1/2 + σ + it) = ∫ poisson_kernel(σ, t, y)·gsq(y) dy`, or `+∞`
/// when the profile has a non-integrable singularity.
pub fn poisson_integral(profile: &BoundaryProfile, sigma: f64, t: f64) -> Result<f64> {
    poisson_kernel(sigma, t, t)?;
    profile.check_tail()?;
    if profile.non_integrable().is_some() {
        return Ok(f64::INFINITY);
    }
    let f = |y: f64| {
        let d = y - t;
        Complex64::new(sigma / (sigma * sigma + d * d) / PI * profile.eval(y), 0.0)
    };
    let mut bps = profile.breakpoints();
    bps.push(Breakpoint::smooth(t));
    let out = integrate_line(f, t, sigma.max(1.0), &bps, quad_options())?;
    Ok(out.value.re)
}

/// `∫_{-R}^{R} gsq`.
fn central_mass(profile: &BoundaryProfile, r: f64) -> Result<f64> {
    if profile.non_integrable().is_some() {
        return Ok(f64::INFINITY);
    }
    let f = |y: f64| Complex64::new(profile.eval(y), 0.0);
    let mut pts: Vec<Breakpoint> = profile.breakpoints().into_iter().filter(|b| b.at.abs() < r).collect();
    pts.push(Breakpoint::smooth(-r));
    pts.push(Breakpoint::smooth(r));
    pts.sort_by(|a, b| a.at.total_cmp(&b.at));
    let mut pieces = Vec::new();
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0].at + w[1].at);
        let p = |alpha: f64| if alpha > 0.0 { (1.0 / (1.0 - alpha)).ceil() + 1.0 } else { 1.0 };
        pieces.push(power_piece(&f, w[0].at, mid, p(w[0].singular)));
        pieces.push(power_piece(&f, w[1].at, mid, p(w[1].singular)));
    }
    Ok(integrate_pieces(&pieces, quad_options())?.value.re)
}

/// `∫ σ/((τ+σ)² + (y-t)²)·gsq(y) dy = π·σ/(τ+σ)·P[gsq](τ+σ, t)`.
pub fn carleson_integral(profile: &BoundaryProfile, tau: f64, sigma: f64, t: f64) -> Result<f64> {
    if !(tau > 0.0) || !(sigma > 0.0) {
        return Err(Error::Domain(format!("need tau > 0 and sigma > 0, got {tau}, {sigma}")));
    }
    Ok(PI * sigma / (tau + sigma) * poisson_integral(profile, tau + sigma, t)?)
}

/// The scan grid shared by the verdicts and sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub n_sigma: usize,
    /// Finest boundary layer `Re s = -1/2 + 2^{-max_layer}`.
    pub max_layer: u32,
    pub threshold: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            t_min: -20.0,
            t_max: 20.0,
            n_t: 41,
            sigma_min: 1e-3,
            sigma_max: 1e3,
            n_sigma: 25,
            max_layer: 40,
            threshold: 1e8,
        }
    }
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_min.is_finite()
            && self.t_max.is_finite()
            && self.t_min <= self.t_max
            && self.n_t >= 1
            && self.sigma_min > 0.0
            && self.sigma_max >= self.sigma_min
            && self.sigma_max.is_finite()
            && self.n_sigma >= 1
            && self.max_layer >= 3
            && self.threshold > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid scan grid {self:?}")))
        }
    }

    pub fn t_grid(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.n_t)
    }

    pub fn sigma_grid(&self) -> Vec<f64> {
        logspace(self.sigma_min, self.sigma_max, self.n_sigma)
    }

    fn half_width(&self) -> f64 {
        self.t_min.abs().max(self.t_max.abs()).max(1.0)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// One `(σ, t, value)` sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sigma: f64,
    pub t: f64,
    pub value: f64,
}

/// Poisson integrals on the product grid `sigmas × ts`.
pub fn poisson_sweep(profile: &BoundaryProfile, sigmas: &[f64], ts: &[f64]) -> Result<Vec<Sample>> {
    let pts: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect();
    pts.par_iter()
        .map(|&(sigma, t)| {
            Ok(Sample {
                sigma,
                t,
                value: poisson_integral(profile, sigma, t)?,
            })
        })
        .collect()
}

/// Largest [`carleson_integral`] over the scan grid.
pub fn carleson_sup(profile: &BoundaryProfile, tau: f64, scan: &ScanSpec) -> Result<f64> {
    scan.validate()?;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("need tau > 0, got {tau}")));
    }
    let sigmas = scan.sigma_grid();
    let ts = scan.t_grid();
    let pts: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&(s, t)| carleson_integral(profile, tau, s, t))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `max_y [(1/π)ρ/(ρ²+(y-t)²) - (σ²/ρ²)(1/π)σ/(σ²+(y-t)²)]`, which is `≤ 0`
/// for `0 < ρ ≤ σ`. The difference is formed with its sign made explicit,
/// `-(σ-ρ)(ρ²σ² + u²(σ²+σρ+ρ²)) / (πρ²(σ²+u²)(ρ²+u²))`, so no cancellation
/// can flip it.
pub fn halfplane_comparison(rho: f64, sigma: f64, t: f64, ys: &[f64]) -> f64 {
    ys.iter()
        .map(|&y| {
            let u2 = (y - t) * (y - t);
            let (r2, s2) = (rho * rho, sigma * sigma);
            let num = (sigma - rho) * (r2 * s2 + u2 * (s2 + sigma * rho + r2));
            -num / (PI * r2 * (s2 + u2) * (r2 + u2))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictCase {
    /// `Re τ > 0`: Poisson integral of `|g|²`.
    Poisson,
    /// `Re τ = 0`: `sup |g|`.
    Multiplier,
}

/// Scan parameters and diagnostics behind a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub case: VerdictCase,
    pub rho: f64,
    pub scan: ScanSpec,
    /// Bound for the scanned quantity outside the grid, from tail samples.
    #[serde(with = "float_or_inf")]
    pub envelope: f64,
    /// Case (ii): `max |g|` per layer, coarsest first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub layer_maxima: Vec<f64>,
    #[serde(default)]
    pub singularities: Vec<Singularity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    pub status: VerdictStatus,
    /// Largest sample on the grid.
    #[serde(with = "float_or_inf")]
    pub sup: f64,
    pub grid: GridReport,
    /// Where the largest sample sits: `[σ, t]` in case (i), `[Re s, Im s]`
    /// in case (ii).
    pub witness: Vec<f64>,
    #[serde(skip)]
    pub samples: Vec<Sample>,
}

mod float_or_inf {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(D::Error::custom(format!("expected a number, \"inf\" or \"nan\", got {t:?}"))),
            },
        }
    }
}

/// Decides boundedness of the flat operator with shift `tau` and weight `g`
/// over the scan.
pub fn flat_verdict(g: &FuncExpr, tau: Complex64, scan: &ScanSpec) -> Result<BoundednessVerdict> {
    scan.validate()?;
    if tau.re < 0.0 {
        return Err(Error::ReTauNegative(tau.re));
    }
    if !tau.re.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} is not finite")));
    }
    if tau.re > 0.0 {
        poisson_verdict(g, tau.re, scan)
    } else {
        multiplier_verdict(g, scan)
    }
}

fn argmax(samples: &[Sample]) -> Option<Sample> {
    samples
        .iter()
        .copied()
        .max_by(|a, b| a.value.total_cmp(&b.value))
}

fn poisson_verdict(g: &FuncExpr, rho: f64, scan: &ScanSpec) -> Result<BoundednessVerdict> {
    let profile = BoundaryProfile::from_weight(g);
    poisson_verdict_for(&profile, rho, scan)
}

/// Case (i) for an explicit profile: the Poisson integral on `σ ≥ ρ`.
pub fn poisson_verdict_for(profile: &BoundaryProfile, rho: f64, scan: &ScanSpec) -> Result<BoundednessVerdict> {
    scan.validate()?;
    let sigma_hi = scan.sigma_max.max(10.0 * rho);
    let sigmas = logspace(rho, sigma_hi, scan.n_sigma);
    let mut ts = scan.t_grid();
    ts.extend(
        profile
            .singularities
            .iter()
            .map(|s| s.at)
            .filter(|&y| y >= scan.t_min && y <= scan.t_max),
    );
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut report = GridReport {
        case: VerdictCase::Poisson,
        rho,
        scan: scan.clone(),
        envelope: f64::INFINITY,
        layer_maxima: Vec::new(),
        singularities: profile.singularities.clone(),
    };
    if let Some(s) = profile.non_integrable() {
        return Ok(BoundednessVerdict {
            status: VerdictStatus::Unbounded,
            sup: f64::INFINITY,
            grid: report,
            witness: vec![rho, s.at],
            samples: Vec::new(),
        });
    }
    let samples = poisson_sweep(profile, &sigmas, &ts)?;
    let best = argmax(&samples).expect("nonempty grid");
    let witness = vec![best.sigma, best.t];
    if !(best.value < scan.threshold) {
        return Ok(BoundednessVerdict {
            status: VerdictStatus::Unbounded,
            sup: best.value,
            grid: report,
            witness,
            samples,
        });
    }
    // Off the grid (σ > σ_hi or |t| > W) the integral is at most
    // sup_{|y| ≥ W/2} gsq + ∫_{|y|<W/2} gsq / (π min(σ_hi, W)).
    let w = scan.half_width();
    let r = 0.5 * w;
    let mass = central_mass(profile, r)?;
    let far: Vec<f64> = logspace(r, 1e8, 200)
        .into_iter()
        .flat_map(|y| [y, -y])
        .collect();
    let tail_sup = far.iter().map(|&y| profile.eval(y)).fold(0.0, f64::max);
    report.envelope = tail_sup + mass / (PI * sigma_hi.min(w));
    let status = if profile.decay_hint >= 0.0 && report.envelope < scan.threshold {
        VerdictStatus::Bounded
    } else {
        VerdictStatus::Inconclusive
    };
    Ok(BoundednessVerdict {
        status,
        sup: best.value,
        grid: report,
        witness,
        samples,
    })
}

/// Relative growth per layer that counts as divergence.
const LAYER_GROWTH: f64 = 1e-3;

fn multiplier_verdict(g: &FuncExpr, scan: &ScanSpec) -> Result<BoundednessVerdict> {
    let abs_g = |s: Complex64| match g.eval(s) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => v.norm(),
        _ => f64::INFINITY,
    };
    let profile = BoundaryProfile::from_weight(g);
    let mut ys = scan.t_grid();
    ys.extend(profile.singularities.iter().map(|s| s.at));
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let layers: Vec<f64> = (-10..=scan.max_layer as i32).map(|j| 2f64.powi(-j)).collect();
    let per_layer: Vec<(f64, f64)> = layers
        .par_iter()
        .map(|&d| {
            ys.iter()
                .map(|&y| (abs_g(Complex64::new(-0.5 + d, y)), y))
                .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
        })
        .collect();
    let samples: Vec<Sample> = layers
        .iter()
        .zip(&per_layer)
        .map(|(&d, &(v, y))| Sample { sigma: d, t: y, value: v })
        .collect();
    let best = argmax(&samples).expect("nonempty grid");
    let mut report = GridReport {
        case: VerdictCase::Multiplier,
        rho: 0.0,
        scan: scan.clone(),
        envelope: f64::INFINITY,
        layer_maxima: per_layer.iter().map(|p| p.0).collect(),
        singularities: profile.singularities.clone(),
    };
    let witness = |s: &Sample| vec![-0.5 + s.sigma, s.t];
    let m = &report.layer_maxima;
    let k = m.len();
    let grows = |a: f64, b: f64| b > a * (1.0 + LAYER_GROWTH);
    let diverging = grows(m[k - 3], m[k - 2]) && grows(m[k - 2], m[k - 1]);
    if !(best.value < scan.threshold) || diverging {
        let w = if diverging { samples[k - 1] } else { best };
        return Ok(BoundednessVerdict {
            status: VerdictStatus::Unbounded,
            sup: best.value,
            witness: witness(&w),
            grid: report,
            samples,
        });
    }
    // Far field: horizontal and vertical rays out to 10⁸, one maximum per decade.
    let w = scan.half_width();
    let finest = layers[layers.len() - 1];
    let decades: Vec<(f64, Sample)> = (1..=8)
        .map(|e| {
            let r = w * 10f64.powi(e);
            let pts = [
                (finest, r),
                (finest, -r),
                (1.0, r),
                (1.0, -r),
                (r, 0.0),
                (r, r),
                (r, -r),
            ];
            let s = pts
                .iter()
                .map(|&(d, y)| Sample {
                    sigma: d,
                    t: y,
                    value: abs_g(Complex64::new(-0.5 + d, y)),
                })
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .unwrap();
            (r, s)
        })
        .collect();
    let outer = decades.iter().map(|d| d.1.value).fold(0.0, f64::max);
    report.envelope = outer;
    if !(outer < scan.threshold) {
        let s = decades.iter().map(|d| d.1).max_by(|a, b| a.value.total_cmp(&b.value)).unwrap();
        return Ok(BoundednessVerdict {
            status: VerdictStatus::Unbounded,
            sup: best.value,
            witness: witness(&s),
            grid: report,
            samples,
        });
    }
    let n = decades.len();
    let still_growing = (n - 3..n).all(|i| decades[i].1.value > decades[i - 1].1.value * (1.0 + 1e-6))
        && decades[n - 1].1.value > best.value;
    let status = if still_growing {
        VerdictStatus::Inconclusive
    } else {
        VerdictStatus::Bounded
    };
    Ok(BoundednessVerdict {
        status,
        sup: best.value,
        witness: witness(&best),
        grid: report,
        samples,
    })
}

//! Adaptive Gauss–Kronrod (10, 21) quadrature for complex-valued integrands.
//!
//! Used as an independent oracle for the closed-form inner products and for
//! the boundary and Poisson integrals over the whole real line.
//!
//! Two changes of variable do the heavy lifting:
//!
//! * `x = a + (b-a)·v^p` near an endpoint `a` with an integrable algebraic
//!   singularity `|x-a|^{-α}`, `α < 1`. With `p ≥ 1/(1-α)` the transformed
//!   integrand is bounded.
//! * `y = c ± w·tan φ`, `φ ∈ [0, π/2)`, for half-lines. An integrand decaying
//!   like `|y|^{-2}` becomes bounded on the compact `φ` interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208056207957,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], …, XGK[9]`.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of subintervals over all pieces.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOutput {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// One 21-point Kronrod evaluation on `[a, b]`: value and QUADPACK-style error.
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = Complex64::new(0.0, 0.0);
    let mut res_abs = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        err = f64::INFINITY;
    }
    (value, err)
}

struct Interval {
    piece: usize,
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// A piece of the integration domain after its change of variable: the
/// integrand in the new variable on `[a, b]`.
pub struct Piece<'a> {
    pub f: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    pub a: f64,
    pub b: f64,
}

/// Globally adaptive integration over several pieces sharing one error budget.
pub fn integrate_pieces(pieces: &[Piece<'_>], opts: QuadOptions) -> Result<QuadOutput> {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0;
    // intervals too narrow to split; their error is final
    let mut frozen_err = 0.0;
    let mut frozen_value = Complex64::new(0.0, 0.0);
    for (i, p) in pieces.iter().enumerate() {
        if p.a == p.b {
            continue;
        }
        let (v, e) = gk21(&p.f, p.a, p.b);
        evaluations += 21;
        total += v;
        total_err += e;
        heap.push(Interval {
            piece: i,
            a: p.a,
            b: p.b,
            value: v,
            error: e,
        });
    }
    let target = |total: Complex64| opts.abs_tol.max(opts.rel_tol * total.norm());
    let mut count = heap.len();
    while total_err > target(total) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if count >= opts.max_intervals {
            heap.push(worst);
            break;
        }
        if !(mid > worst.a && mid < worst.b) {
            frozen_err += worst.error;
            frozen_value += worst.value;
            continue;
        }
        let f = &pieces[worst.piece].f;
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        count += 1;
        heap.push(Interval {
            piece: worst.piece,
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            piece: worst.piece,
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        if frozen_err > target(total) {
            break;
        }
    }
    // recompute from the leaves to shed accumulated rounding in the running sums
    let mut value = frozen_value;
    let mut error = frozen_err;
    for iv in heap.iter() {
        value += iv.value;
        error += iv.error;
    }
    let goal = target(value);
    if !(error <= goal) {
        return Err(Error::QuadratureNoConvergence {
            estimate: error,
            target: goal,
        });
    }
    Ok(QuadOutput {
        value,
        error,
        evaluations,
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadOutput>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    integrate_pieces(
        &[Piece {
            f: Box::new(f),
            a,
            b,
        }],
        opts,
    )
}

/// The integral of `f` over the interval between `a` and `b` (either order),
/// where `f` may have an integrable singularity at `a`, using `x = a + (b-a)·v^p`.
pub fn power_piece<'a, F>(f: &'a F, a: f64, b: f64, p: f64) -> Piece<'a>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let len = b - a;
    Piece {
        f: Box::new(move |v: f64| {
            if v <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let vp = v.powf(p - 1.0);
            f(a + len * vp * v) * (len.abs() * p * vp)
        }),
        a: 0.0,
        b: 1.0,
    }
}

/// `∫_c^{±∞} f` through `y = c ± w·tan φ`; `p > 1` additionally flattens an
/// algebraic singularity at `c` (`φ = (π/2)·v^p`).
pub fn tail_piece<'a, F>(f: &'a F, c: f64, w: f64, sign: f64, p: f64) -> Piece<'a>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    Piece {
        f: Box::new(move |v: f64| {
            if v <= 0.0 || v >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let vp = v.powf(p - 1.0);
            let phi = FRAC_PI_2 * vp * v;
            let (sn, cs) = phi.sin_cos();
            let jac = w / (cs * cs) * FRAC_PI_2 * p * vp;
            f(c + sign * w * sn / cs) * jac
        }),
        a: 0.0,
        b: 1.0,
    }
}

/// A breakpoint on the real line for [`integrate_line`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    /// Exponent `α < 1` of an algebraic singularity `|y - at|^{-α}`, or 0.
    pub singular: f64,
}

impl Breakpoint {
    pub fn smooth(at: f64) -> Self {
        Breakpoint { at, singular: 0.0 }
    }
}

fn flattening_power(alpha: f64) -> f64 {
    if alpha <= 0.0 {
        1.0
    } else {
        // one extra unit keeps the transformed integrand smooth, not just bounded
        (1.0 / (1.0 - alpha.min(0.95))).ceil() + 1.0
    }
}

/// `∫_ℝ f(y) dy` for an integrand decaying at least like `|y|^{-2}`.
///
/// The line is split at the breakpoints (or at `center` if there are none);
/// each bounded gap is split at its midpoint, so that every piece has at
/// most one singular endpoint, and both tails use the tangent map with scale
/// `scale`.
pub fn integrate_line<F>(
    f: F,
    center: f64,
    scale: f64,
    breakpoints: &[Breakpoint],
    opts: QuadOptions,
) -> Result<QuadOutput>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let mut bps: Vec<Breakpoint> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.at.is_finite())
        .collect();
    if bps.is_empty() {
        bps.push(Breakpoint::smooth(center));
    }
    bps.sort_by(|x, y| x.at.total_cmp(&y.at));
    bps.dedup_by(|x, y| {
        if x.at == y.at {
            y.singular = y.singular.max(x.singular);
            true
        } else {
            false
        }
    });
    let first = bps[0];
    let last = bps[bps.len() - 1];
    let mut pieces = vec![
        tail_piece(&f, first.at, scale, -1.0, flattening_power(first.singular)),
        tail_piece(&f, last.at, scale, 1.0, flattening_power(last.singular)),
    ];
    for w in bps.windows(2) {
        let (l, r) = (w[0], w[1]);
        let mid = 0.5 * (l.at + r.at);
        pieces.push(power_piece(&f, l.at, mid, flattening_power(l.singular)));
        pieces.push(power_piece(&f, r.at, mid, flattening_power(r.singular)));
    }
    integrate_pieces(&pieces, opts)
}

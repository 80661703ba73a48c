//! The nine acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use monop_core::flatbound::{
    flat_verdict, halfplane_comparison, poisson_integral, BoundaryProfile, ScanSpec, VerdictStatus,
};
use monop_core::funcexpr::FuncExpr;
use monop_core::halfplane::{HalfPlaneAutomorphism, HalfPlanePoint};
use monop_core::hardy::{hardy_inner, u_apply, KernelSum};
use monop_core::l2poly::{l2_inner, MonomialSum, MonomialTerm};
use monop_core::monop::{builtin, norm_curve};
use monop_core::pick::{np_interpolate, pick_matrix, quadratic_form, PsdStatus};
use monop_core::unitaryop::{build_unitary, isometry_check, weight_agreement};
use monop_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> HalfPlanePoint {
    HalfPlanePoint::new(c(rng.gen_range(-0.45..5.0), rng.gen_range(-5.0..5.0))).unwrap()
}

fn random_auto(rng: &mut ChaCha8Rng) -> HalfPlaneAutomorphism {
    let a = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
    HalfPlaneAutomorphism::new(rng.gen_range(0.0..TAU), a).unwrap()
}

fn random_sum(rng: &mut ChaCha8Rng) -> MonomialSum {
    let k = rng.gen_range(1..=8);
    MonomialSum::new((0..k).map(|_| MonomialTerm {
        coeff: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        exp: random_point(rng),
    }))
}

fn u_unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (f, h) = (random_sum(&mut rng), random_sum(&mut rng));
        let d = (hardy_inner(&u_apply(&f), &u_apply(&h)) - l2_inner(&f, &h)).norm();
        worst = worst.max(d);
    }
    ensure(worst < 1e-11, || format!("max |<Uf,Uh> - <f,h>| = {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e} over 100 pairs"))
}

fn pick_feasibility() -> Outcome {
    for tau in [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(2.0, 3.0)] {
        let p: Vec<HalfPlanePoint> = (0..50).map(|n| HalfPlanePoint::new(tau + n as f64).unwrap()).collect();
        for size in 1..=50 {
            let v = pick_matrix(&p, size).map_err(|e| e.to_string())?.check(1e-10).map_err(|e| e.to_string())?;
            ensure(v.status == PsdStatus::Psd, || format!("tau = {tau}, size {size}: {v:?}"))?;
        }
    }
    let p: Vec<HalfPlanePoint> = (0..2).map(|n| HalfPlanePoint::real(n as f64 - 0.3).unwrap()).collect();
    let m = pick_matrix(&p, 2).map_err(|e| e.to_string())?;
    let v = m.check(1e-10).map_err(|e| e.to_string())?;
    ensure(v.status == PsdStatus::NotPsd && v.witness.is_some(), || format!("n - 0.3 accepted: {v:?}"))?;
    let q = quadratic_form(&m.entries, &[c(1.0, 0.0), c(-1.0, 0.0)]);
    ensure((q + 0.2).abs() < 1e-12, || format!("v*Mv = {q}"))?;
    Ok(format!("flat shifts PSD at sizes 1..=50; n - 0.3 rejected, v*Mv = {q:.15}"))
}

fn np_constructive() -> Outcome {
    let nodes: Vec<HalfPlanePoint> = (0..4).map(HalfPlanePoint::nat).collect();
    let targets: Vec<HalfPlanePoint> = (0..4).map(|n| HalfPlanePoint::nat(n + 1)).collect();
    let beta = np_interpolate(&nodes, &targets).map_err(|e| e.to_string())?;
    let mut resid = 0.0f64;
    for (z, w) in nodes.iter().zip(&targets) {
        let b = beta.eval(*z).map_err(|e| e.to_string())?;
        resid = resid.max((b.value() - w.value()).norm());
    }
    ensure(resid < 1e-8, || format!("node residual {resid:e}"))?;
    let mut worst = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let s = c(-0.5 + 1e-3 + 10f64.powf(-3.0 + 5.0 * i as f64 / 19.0), -50.0 + 100.0 * j as f64 / 19.0);
            let v = beta.eval_generic(&s);
            let lam = v / (v + 1.0);
            worst = worst.max(lam.norm());
        }
    }
    ensure(worst < 1.0, || format!("|lambda(beta)| reaches {worst}"))?;
    Ok(format!("node residual {resid:.2e}, max |lambda(beta)| = {worst:.6} on 400 points"))
}

fn adjoint_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for name in ["hardy", "volterra", "mult_x"] {
        let spec = builtin(name).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let (s, u) = (random_point(&mut rng), random_point(&mut rng));
            let ku = KernelSum::kernel(c(1.0, 0.0), u);
            // <T~k_s, k_u> = (T~k_s)(u) and <T~*k_u, k_s> = (T~*k_u)(s)
            let lhs = spec.conjugated_apply_kernel(s).map_err(|e| e.to_string())?.eval(u.value());
            let rhs = spec.adjoint_apply(&ku).eval(s.value()).map_err(|e| e.to_string())?;
            worst = worst.max((lhs - rhs.conj()).norm());
        }
    }
    ensure(worst < 1e-10, || format!("adjoint defect {worst:e}"))?;
    Ok(format!("max defect {worst:.2e} over 150 pairs"))
}

fn norm_estimation() -> Outcome {
    let degrees: Vec<usize> = (0..=200).collect();
    let id = norm_curve(&builtin("identity").unwrap(), &degrees[..=100]).map_err(|e| e.to_string())?;
    ensure(id.iter().all(|&v| v == 1.0), || format!("identity curve {id:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut unitary_dev = 0.0f64;
    for _ in 0..3 {
        let spec = build_unitary(&random_auto(&mut rng), rng.gen_range(0.0..TAU)).map_err(|e| e.to_string())?;
        let curve = norm_curve(&spec, &[0, 10, 25, 50, 75, 100]).map_err(|e| e.to_string())?;
        unitary_dev = curve.iter().map(|v| (v - 1.0).abs()).fold(unitary_dev, f64::max);
    }
    ensure(unitary_dev < 1e-8, || format!("unitary deviation {unitary_dev:e}"))?;

    let hardy = norm_curve(&builtin("hardy").unwrap(), &degrees).map_err(|e| e.to_string())?;
    let first_drop = hardy.windows(2).position(|w| w[1] < w[0]);
    ensure(first_drop.is_none(), || format!("Hardy curve decreases after N = {first_drop:?}"))?;
    let top = hardy[200];
    ensure(top >= 1.8, || format!("Hardy N = 200 gives {top}"))?;
    // ‖H‖ = sup |1/(1+s)| for the shift-free operator
    let scan = ScanSpec::default();
    let g = FuncExpr::parse("1/(1+s)").unwrap();
    let verdict = flat_verdict(&g, c(0.0, 0.0), &scan).map_err(|e| e.to_string())?;
    ensure(verdict.sup <= 2.0 + 1e-6, || format!("sup |g| = {}", verdict.sup))?;
    let over = hardy.iter().copied().fold(0.0, f64::max);
    ensure(over <= verdict.sup + 1e-6, || format!("Hardy estimate {over} exceeds sup |g| {}", verdict.sup))?;
    Ok(format!(
        "identity exact; unitary within {unitary_dev:.1e}; Hardy N=200 {top:.10} <= sup|g| {:.10}",
        verdict.sup
    ))
}

fn flat_boundedness() -> Outcome {
    let scan = ScanSpec::default();
    let mut lines = Vec::new();
    for cc in [0.1, 0.25, 0.4] {
        let g = FuncExpr::parse(&format!("1/((1+s)*(s+0.5)^{cc})")).unwrap();
        let v = flat_verdict(&g, c(1.0, 0.0), &scan).map_err(|e| e.to_string())?;
        ensure(v.status == VerdictStatus::Bounded, || format!("c = {cc}: {:?}", v.status))?;
        ensure(!v.samples.is_empty(), || "no samples".into())?;
        for s in &v.samples {
            let bound = (8.0 / (1.0 - 2.0 * cc) + 2.0 * PI) / (PI * s.sigma);
            ensure(s.value <= bound + 1e-6, || format!("c = {cc}: P({}, {}) = {} > {bound}", s.sigma, s.t, s.value))?;
        }
        lines.push(format!("c={cc}: sup {:.6}", v.sup));
    }
    let g = FuncExpr::parse("1/(s+0.5)^0.3").unwrap();
    let v = flat_verdict(&g, c(0.0, 0.0), &scan).map_err(|e| e.to_string())?;
    ensure(v.status == VerdictStatus::Unbounded, || format!("1/(s+1/2)^0.3: {:?}", v.status))?;
    Ok(format!("{}; unbounded witness {:?}", lines.join(", "), v.witness))
}

fn poisson_normalization() -> Outcome {
    let one = BoundaryProfile::constant(1.0);
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let sigma = 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0);
            let t = -100.0 + 200.0 * j as f64 / 9.0;
            let v = poisson_integral(&one, sigma, t).map_err(|e| e.to_string())?;
            worst = worst.max((v - 1.0).abs());
        }
    }
    ensure(worst < 1e-8, || format!("normalization defect {worst:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut resid = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let rho = rng.gen_range(1e-3..10.0);
        let sigma = rho + rng.gen_range(0.0..10.0);
        let u = rng.gen_range(-1e3..1e3);
        resid = resid.max(halfplane_comparison(rho, sigma, 0.0, &[u]));
    }
    ensure(resid <= 0.0, || format!("comparison residual {resid:e}"))?;
    Ok(format!("normalization within {worst:.1e}; max comparison residual {resid:.2e}"))
}

fn unitary_operators() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut iso, mut modulus, mut shape) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let a = random_auto(&mut rng);
        let theta = rng.gen_range(0.0..TAU);
        let spec = build_unitary(&a, theta).map_err(|e| e.to_string())?;
        let pairs: Vec<_> = (0..1000).map(|_| (random_point(&mut rng), random_point(&mut rng))).collect();
        iso = iso.max(isometry_check(&spec, &pairs).map_err(|e| e.to_string())?);
        let pts: Vec<HalfPlanePoint> = pairs.iter().map(|p| p.0).collect();
        let (omega, worst) = weight_agreement(&a, theta, &pts);
        modulus = modulus.max((omega.norm() - 1.0).abs());
        shape = shape.max(worst);
    }
    ensure(iso < 1e-10, || format!("isometry residual {iso:e}"))?;
    ensure(modulus < 1e-10 && shape < 1e-10, || format!("weight mismatch: modulus {modulus:e}, shape {shape:e}"))?;
    Ok(format!("isometry {iso:.1e}; unimodular constant off by {modulus:.1e}, weights agree to {shape:.1e}"))
}

const ALPHABET: &[&str] = &[
    "s", "i", "1", "0.5", "2", "1e3", "1e-3", ".5", "(", ")", ",", "+", "-", "*", "/", "^", " ", "involute", "(1,2)",
    "(-0.5,+3)", "e", "x", "$", "((", "))", "1.2.3", "^-", "inf", "NaN", "\u{3c0}",
];

fn fuzz_input(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.2) {
        let bytes: Vec<u8> = (0..rng.gen_range(0..40)).map(|_| rng.gen()).collect();
        return String::from_utf8_lossy(&bytes).into_owned();
    }
    (0..rng.gen_range(0..30)).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect()
}

fn parser_totality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let probes = [c(0.3, -0.7), c(2.0, 1.5)];
    let (mut parsed, mut rejected) = (0usize, 0usize);
    for _ in 0..100_000 {
        let text = fuzz_input(&mut rng);
        let outcome = catch_unwind(AssertUnwindSafe(|| FuncExpr::parse(&text)));
        match outcome {
            Err(_) => return Err(format!("parser panicked on {text:?}")),
            Ok(Err(e)) => {
                ensure(e.offset <= text.len(), || format!("offset {} beyond {text:?}", e.offset))?;
                rejected += 1;
            }
            Ok(Ok(e)) => {
                parsed += 1;
                let printed = e.to_string();
                let back = FuncExpr::parse(&printed).map_err(|err| format!("{text:?} -> {printed:?}: {err}"))?;
                ensure(back.root() == e.root(), || format!("round trip changed {text:?}"))?;
                ensure(back.to_string() == printed, || format!("printing not stable for {text:?}"))?;
                for s in probes {
                    let (x, y) = (e.eval(s), back.eval(s));
                    let same = match (x, y) {
                        (Ok(x), Ok(y)) => x == y || (x.re.is_nan() || x.im.is_nan()) && (y.re.is_nan() || y.im.is_nan()),
                        (Err(_), Err(_)) => true,
                        _ => false,
                    };
                    ensure(same, || format!("evaluation changed for {text:?}"))?;
                }
            }
        }
    }
    ensure(parsed > 1000, || format!("only {parsed} inputs parsed"))?;
    Ok(format!("{parsed} parsed and round-tripped, {rejected} rejected with positions"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 unitarity of U", u_unitarity),
        ("2 Pick feasibility", pick_feasibility),
        ("3 Nevanlinna-Pick construction", np_constructive),
        ("4 adjoint identity", adjoint_identity),
        ("5 norm estimation", norm_estimation),
        ("6 flat boundedness", flat_boundedness),
        ("7 Poisson normalization and comparison", poisson_normalization),
        ("8 unitary monomial operators", unitary_operators),
        ("9 parser totality", parser_totality),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] ({secs:.2}s) {detail}"),
            Err(why) => {
                println!("FAIL [{name}] ({secs:.2}s) {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

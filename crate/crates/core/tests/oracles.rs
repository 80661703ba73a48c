//! Independent oracles: exact rational Galerkin matrices, values frozen from
//! an arbitrary-precision run, and a brute-force midpoint rule for Poisson
//! integrals.

use std::f64::consts::PI;

use monop_core::flatbound::{poisson_integral, BoundaryProfile};
use monop_core::monop::{builtin, norm_curve, norm_estimate};
use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Galerkin norm for `xⁿ ↦ cₙ x^{n+τ}` with integer `τ` and `cₙ = 1/(n+1)`,
/// with the Gram product formed exactly over the rationals.
fn exact_galerkin(n_max: usize, tau: usize) -> f64 {
    let dim = n_max + 1;
    let q: Vec<Vec<BigRational>> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|n| {
                    if n > k {
                        return BigRational::zero();
                    }
                    let sign = if (k + n) % 2 == 0 { 1 } else { -1 };
                    BigRational::from_integer(BigInt::from(sign) * binom(k, n) * binom(k + n, n))
                })
                .collect()
        })
        .collect();
    let k: Vec<Vec<BigRational>> = (0..dim)
        .map(|m| {
            (0..dim)
                .map(|n| BigRational::new(BigInt::one(), BigInt::from((m + 1) * (n + 1) * (m + n + 1 + 2 * tau))))
                .collect()
        })
        .collect();
    let mut y = DMatrix::<f64>::zeros(dim, dim);
    for r in 0..dim {
        for l in 0..dim {
            let mut acc = BigRational::zero();
            for a in 0..=r {
                for b in 0..=l {
                    acc += &q[r][a] * &k[a][b] * &q[l][b];
                }
            }
            y[(r, l)] = acc.to_f64().unwrap() * (((2 * r + 1) * (2 * l + 1)) as f64).sqrt();
        }
    }
    let eig = SymmetricEigen::new(y);
    eig.eigenvalues.max().sqrt()
}

#[test]
fn hardy_galerkin_matches_exact_rational_products() {
    let hardy = builtin("hardy").unwrap();
    let degrees = [1, 2, 3, 5, 8, 12, 20];
    let curve = norm_curve(&hardy, &degrees).unwrap();
    for (&n, &v) in degrees.iter().zip(&curve) {
        let exact = exact_galerkin(n, 0);
        assert!((v - exact).abs() < 1e-13, "N = {n}: {v} vs {exact}");
    }
}

#[test]
fn volterra_galerkin_matches_exact_rational_products() {
    let volterra = builtin("volterra").unwrap();
    for n in [1, 4, 10, 16] {
        let v = norm_estimate(&volterra, n).unwrap();
        let exact = exact_galerkin(n, 1);
        assert!((v - exact).abs() < 1e-13, "N = {n}: {v} vs {exact}");
        // ‖V‖ = 2/π
        assert!(v <= 2.0 / PI + 1e-12);
    }
}

#[test]
fn hardy_galerkin_frozen_high_precision_values() {
    // independent arbitrary-precision evaluation of the same matrices
    let frozen = [
        (0, 1.0),
        (1, 1.3660254037844386),
        (2, 1.4854617048288585),
        (5, 1.6195066490416878),
        (10, 1.6963570823397947),
        (20, 1.7546379277505761),
        (50, 1.8104614039809852),
        (100, 1.8413436630818736),
        (150, 1.8561087505530616),
        (200, 1.8653907879449392),
    ];
    let degrees: Vec<usize> = frozen.iter().map(|f| f.0).collect();
    let curve = norm_curve(&builtin("hardy").unwrap(), &degrees).unwrap();
    for (&(n, expect), &v) in frozen.iter().zip(&curve) {
        assert!((v - expect).abs() < 1e-12, "N = {n}: {v} vs {expect}");
    }
    assert!(((1.0 + 3f64.sqrt()) / 2.0 - frozen[1].1).abs() < 1e-15);
}

/// `(1/π)∫ gsq(t + σ tan θ) dθ` over `(-π/2, π/2)` by the midpoint rule.
fn brute_force_poisson(gsq: &dyn Fn(f64) -> f64, sigma: f64, t: f64, n: usize) -> f64 {
    let h = PI / n as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let theta = -PI / 2.0 + (k as f64 + 0.5) * h;
            gsq(t + sigma * theta.tan())
        })
        .sum();
    sum * h / PI
}

#[test]
fn poisson_integral_matches_brute_force_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..6 {
        let bumps: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(0.1..2.0), rng.gen_range(0.2..3.0), rng.gen_range(-10.0..10.0)))
            .collect();
        let floor = rng.gen_range(0.0..0.5);
        let gsq = move |y: f64| {
            floor + bumps.iter().map(|&(a, b, c)| a * b / (b * b + (y - c) * (y - c))).sum::<f64>()
        };
        let profile = BoundaryProfile::new(gsq.clone(), 0.0);
        for _ in 0..4 {
            let sigma = 10f64.powf(rng.gen_range(-1.0..2.0));
            let t = rng.gen_range(-15.0..15.0);
            let brute = brute_force_poisson(&gsq, sigma, t, 1_000_000);
            let v = poisson_integral(&profile, sigma, t).unwrap();
            assert!((v - brute).abs() < 1e-6, "{sigma} {t}: {v} vs {brute}");
        }
    }
}

//! Galerkin norm of `T` restricted to polynomials of degree `≤ N`.
//!
//! With `P̃ₖ(x) = √(2k+1) Σₙ Q[k][n] xⁿ` the orthonormal shifted Legendre
//! basis, `Q[k][n] = (-1)^{k+n} C(k,n) C(k+n,n)`, and the image Gram matrix
//! `K[m][n] = c_m c̄_n / (1 + β(m) + conj β(n))`, the restricted norm is
//! `√λ_max(S Q K Qᵀ S)`, `S = diag √(2k+1)`.
//!
//! `Q` has entries of size `~ 5.8^N`, so `Q K Qᵀ` cancels about `5.1·N` bits.
//! `β(n)`, `cₙ` and the product are therefore formed in multiprecision at
//! [`working_precision`]; only the final Hermitian matrix is rounded to `f64`
//! for the eigensolver. Because `Q` is lower triangular, the leading
//! `(n+1)×(n+1)` block of the matrix for `N` is the matrix for `n`, so one
//! product serves a whole curve and the curve is nondecreasing by eigenvalue
//! interlacing.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rug::{Complex, Float};

use super::MonomialOperatorSpec;
use crate::error::{Error, Result};
use crate::scalar::{ComplexField, Mp};
use crate::Complex64;

/// Bits of working precision used for degree `n`.
pub fn working_precision(n: usize) -> u32 {
    160 + (5.1 * n as f64).ceil() as u32
}

/// `Q[k][n]` for `n ≤ k ≤ N`, exact in `prec` bits (the largest entry has
/// about `1.77·N` bits).
fn legendre_monomial_coeffs(n_max: usize, prec: u32) -> Vec<Vec<Float>> {
    (0..=n_max)
        .map(|k| {
            let mut row = Vec::with_capacity(k + 1);
            let mut q = Float::with_val(prec, if k % 2 == 0 { 1 } else { -1 });
            for n in 0..=k {
                row.push(q.clone());
                // q_{k,n+1} = -q_{k,n} (k-n)(k+n+1)/(n+1)²
                q *= -(((k - n) * (k + n + 1)) as f64);
                q /= ((n + 1) * (n + 1)) as f64;
            }
            row
        })
        .collect()
}

/// `β(n)` and `cₙ = (1+β(n))/(1+n)·g(n)` at `prec` bits.
fn image_data(spec: &MonomialOperatorSpec, n_max: usize, prec: u32) -> Result<Vec<(Mp, Mp)>> {
    (0..=n_max)
        .map(|n| {
            let s = Mp::new(prec, Complex64::new(n as f64, 0.0));
            let b = spec.beta.eval_generic(&s)?;
            let bv = b.to_c64();
            if !(bv.re > -0.5) {
                return Err(Error::BetaRange {
                    at: s.to_c64(),
                    value: bv,
                });
            }
            let g = spec.g.eval_generic(&s)?;
            let one = s.one_like();
            let c = (one.clone() + b.clone()) / (one + s) * g;
            Ok((b, c))
        })
        .collect()
}

/// The Hermitian matrix `S Q K Qᵀ S`, rounded to `f64`.
fn legendre_frame_gram(spec: &MonomialOperatorSpec, n_max: usize) -> Result<DMatrix<Complex64>> {
    let prec = working_precision(n_max);
    let data = image_data(spec, n_max, prec)?;
    let dim = n_max + 1;
    let one = Complex::with_val(prec, 1);
    let k: Vec<Vec<Complex>> = (0..dim)
        .into_par_iter()
        .map(|m| {
            let (bm, cm) = &data[m];
            (0..dim)
                .map(|n| {
                    let (bn, cn) = &data[n];
                    let den = Complex::with_val(prec, &one + &bm.0) + bn.0.clone().conj();
                    let num = Complex::with_val(prec, &cm.0 * &cn.0.clone().conj());
                    num / den
                })
                .collect()
        })
        .collect();
    let q = legendre_monomial_coeffs(n_max, prec);
    // W = Q K
    let w: Vec<Vec<Complex>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            (0..dim)
                .map(|j| {
                    let mut acc = Complex::new(prec);
                    for (n, qrn) in q[r].iter().enumerate() {
                        acc += Complex::with_val(prec, &k[n][j] * qrn);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // Y = W Qᵀ, upper triangle, scaled by S on both sides
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            (r..dim)
                .map(|l| {
                    let mut acc = Complex::new(prec);
                    for (n, qln) in q[l].iter().enumerate() {
                        acc += Complex::with_val(prec, &w[r][n] * qln);
                    }
                    let scale = Float::with_val(prec, ((2 * r + 1) * (2 * l + 1)) as f64).sqrt();
                    acc *= scale;
                    Complex64::new(acc.real().to_f64(), acc.imag().to_f64())
                })
                .collect()
        })
        .collect();
    let mut y = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (r, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let l = r + off;
            if l == r {
                y[(r, r)] = Complex64::new(v.re, 0.0);
            } else {
                y[(r, l)] = v;
                y[(l, r)] = v.conj();
            }
        }
    }
    // entries this small relative to the diagonal move eigenvalues far below
    // f64 resolution; dropping them keeps exactly diagonal cases exact
    for r in 0..dim {
        for l in 0..dim {
            if r != l && y[(r, l)].norm() <= 1e-24 * (y[(r, r)].re * y[(l, l)].re).abs().sqrt() {
                y[(r, l)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure("image Gram matrix has non-finite entries".into()));
    }
    Ok(y)
}

fn top_singular_value(y: DMatrix<Complex64>) -> Result<f64> {
    let dim = y.nrows();
    let eig = SymmetricEigen::try_new(y, f64::EPSILON, 100 * dim.max(10)).ok_or_else(|| {
        Error::EigenFailure(format!("Hermitian eigensolver did not converge at dimension {dim}"))
    })?;
    let lmax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lmax.is_finite() {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    Ok(lmax.max(0.0).sqrt())
}

/// `‖T|_{span{1,…,x^N}}‖`, a lower bound for `‖T‖`.
pub fn norm_estimate(spec: &MonomialOperatorSpec, n: usize) -> Result<f64> {
    Ok(norm_curve(spec, &[n])?[0])
}

/// [`norm_estimate`] at several degrees from one multiprecision product.
pub fn norm_curve(spec: &MonomialOperatorSpec, degrees: &[usize]) -> Result<Vec<f64>> {
    let Some(&n_max) = degrees.iter().max() else {
        return Ok(Vec::new());
    };
    let y = legendre_frame_gram(spec, n_max)?;
    degrees
        .iter()
        .map(|&n| top_singular_value(y.view((0, 0), (n + 1, n + 1)).into_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monop::builtin;

    #[test]
    fn legendre_coefficients_small_degrees() {
        let q = legendre_monomial_coeffs(3, 64);
        let as_i: Vec<Vec<i64>> = q
            .iter()
            .map(|r| r.iter().map(|f| f.to_f64() as i64).collect())
            .collect();
        // P₂(2x-1) = 6x² - 6x + 1, P₃(2x-1) = 20x³ - 30x² + 12x - 1
        assert_eq!(as_i[0], vec![1]);
        assert_eq!(as_i[1], vec![-1, 2]);
        assert_eq!(as_i[2], vec![1, -6, 6]);
        assert_eq!(as_i[3], vec![-1, 12, -30, 20]);
    }

    #[test]
    fn identity_gram_is_exactly_identity() {
        let y = legendre_frame_gram(&builtin("identity").unwrap(), 40).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((y[(i, j)] - expect).norm() < 1e-30);
            }
        }
    }

    #[test]
    fn identity_norm_is_one() {
        let curve = norm_curve(&builtin("identity").unwrap(), &[0, 1, 5, 30]).unwrap();
        assert!(curve.iter().all(|&v| v == 1.0), "{curve:?}");
    }

    #[test]
    fn hardy_small_degrees() {
        // N = 1: the 2×2 matrix has top eigenvalue (2+√3)/2, so the norm is (1+√3)/2
        let v = norm_estimate(&builtin("hardy").unwrap(), 1).unwrap();
        assert!((v - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-14, "{v}");
        assert_eq!(norm_estimate(&builtin("hardy").unwrap(), 0).unwrap(), 1.0);
    }
}

//! Positive-semidefiniteness test for Hermitian matrices.
//!
//! Pick matrices are Cauchy-like and their conditioning grows like that of
//! the Hilbert matrix, so the pivoted `LDL*` factorization and the witness
//! quadratic forms are accumulated in double-double arithmetic. The smallest
//! eigenvalue comes from a dense Hermitian eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

pub const MAX_SIZE: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdStatus {
    Psd,
    NotPsd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub status: PsdStatus,
    /// PSD but numerically singular: the smallest eigenvalue lies within the
    /// threshold of zero, or the pivoted factorization ran out of pivots.
    pub boundary: bool,
    #[serde(rename = "min_eig")]
    pub min_eigenvalue: f64,
    /// Unit vector `v` with `v* M v < -tol·(1 + trace M)`; present iff NotPsd.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Complex64>>,
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        self.status == PsdStatus::Psd
    }

    /// PSD with room to spare: what interpolation needs.
    pub fn is_strictly_positive(&self) -> bool {
        self.is_psd() && !self.boundary
    }
}

/// Double-double real: `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::renorm(s, e + self.lo + o.lo)
    }
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (s, e) = two_sum(q1, q2);
        Dd::renorm(s, e + q3)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from(z: Complex64) -> Cdd {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }
    fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: self.im.neg(),
        }
    }
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }
    fn neg_c(self) -> Cdd {
        Cdd {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
    fn div_real(self, d: Dd) -> Cdd {
        Cdd {
            re: self.re.div(d),
            im: self.im.div(d),
        }
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `v* M v` accumulated in double-double.
pub fn quadratic_form(m: &DMatrix<Complex64>, v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut acc = Cdd::default();
    for i in 0..n {
        let mut row = Cdd::default();
        for j in 0..n {
            row = row.add(Cdd::from(m[(i, j)]).mul(Cdd::from(v[j])));
        }
        acc = acc.add(Cdd::from(v[i]).conj().mul(row));
    }
    acc.re.to_f64()
}

struct Ldl {
    perm: Vec<usize>,
    /// Strictly lower part holds `L`; columns `rank..` hold the Schur complement.
    a: Vec<Vec<Cdd>>,
    rank: usize,
}

/// Pivoted `LDL*`, stopping when no remaining diagonal entry exceeds `thr`.
fn pivoted_ldl(m: &DMatrix<Complex64>, thr: f64) -> Ldl {
    let n = m.nrows();
    let mut a: Vec<Vec<Cdd>> = (0..n)
        .map(|i| (0..n).map(|j| Cdd::from(m[(i, j)])).collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = n;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x][x].re.to_f64().total_cmp(&a[y][y].re.to_f64()))
            .unwrap_or(k);
        if a[p][p].re.to_f64() <= thr {
            rank = k;
            break;
        }
        if p != k {
            a.swap(p, k);
            for row in a.iter_mut() {
                row.swap(p, k);
            }
            perm.swap(p, k);
        }
        let d = a[k][k].re;
        let col: Vec<Cdd> = (0..n).map(|i| a[i][k]).collect();
        for i in k + 1..n {
            let lik = col[i].div_real(d);
            for j in k + 1..=i {
                let upd = lik.mul(col[j].conj());
                a[i][j] = a[i][j].sub(upd);
            }
            a[i][k] = lik;
        }
        for i in k + 1..n {
            for j in i + 1..n {
                a[i][j] = a[j][i].conj();
            }
        }
    }
    Ldl { perm, a, rank }
}

/// `x = [-L₁₁^{-*} L₂₁[i]*; eᵢ]` in original coordinates; `x* M x` equals the
/// Schur-complement diagonal entry `i`.
fn ldl_witness(f: &Ldl, i: usize) -> Vec<Complex64> {
    let n = f.a.len();
    let r = f.rank;
    let mut y = vec![Cdd::default(); r];
    for k in 0..r {
        y[k] = f.a[i][k].conj().neg_c();
    }
    for k in (0..r).rev() {
        let yk = y[k];
        for j in 0..k {
            // L₁₁* is unit upper triangular with (j, k) entry conj(L[k][j])
            y[j] = y[j].sub(f.a[k][j].conj().mul(yk));
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..r {
        x[f.perm[k]] = y[k].to_c64();
    }
    x[f.perm[i]] = Complex64::new(1.0, 0.0);
    x
}

fn normalized(v: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return None;
    }
    Some(v.into_iter().map(|z| z / norm).collect())
}

/// PSD test with threshold `tol·(1 + trace M)`.
///
/// NotPsd is reported only with a unit witness whose quadratic form,
/// recomputed in double-double, lies below `-threshold`.
pub fn psd_check(m: &DMatrix<Complex64>, tol: f64) -> Result<PsdVerdict> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Domain(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if n > MAX_SIZE {
        return Err(Error::Domain(format!("matrix size {n} exceeds the cap of {MAX_SIZE}")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(PsdVerdict {
            status: PsdStatus::Psd,
            boundary: false,
            min_eigenvalue: 0.0,
            witness: None,
        });
    }
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    let thr = tol * (1.0 + trace.abs());

    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::EigenFailure(format!("Hermitian eigensolver did not converge on a {n}x{n} matrix")))?;
    let (imin, &lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("n > 0");
    if !lmin.is_finite() {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }

    let ldl = pivoted_ldl(m, thr);
    let mut candidates = Vec::new();
    if ldl.rank < n {
        let worst = (ldl.rank..n)
            .min_by(|&x, &y| ldl.a[x][x].re.to_f64().total_cmp(&ldl.a[y][y].re.to_f64()))
            .expect("rank < n");
        if ldl.a[worst][worst].re.to_f64() < -thr {
            candidates.extend(normalized(ldl_witness(&ldl, worst)));
        }
    }
    if lmin < -thr {
        let v: DVector<Complex64> = eig.eigenvectors.column(imin).into_owned();
        candidates.extend(normalized(v.iter().copied().collect()));
    }
    let best = candidates
        .into_iter()
        .map(|v| (quadratic_form(m, &v), v))
        .filter(|(q, _)| *q < -thr)
        .min_by(|a, b| a.0.total_cmp(&b.0));

    Ok(match best {
        Some((_, v)) => PsdVerdict {
            status: PsdStatus::NotPsd,
            boundary: false,
            min_eigenvalue: lmin,
            witness: Some(v),
        },
        None => PsdVerdict {
            status: PsdStatus::Psd,
            boundary: ldl.rank < n || lmin <= thr,
            min_eigenvalue: lmin,
            witness: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn double_double_keeps_low_bits() {
        let a = Dd::from(1.0).add(Dd::from(1e-20));
        assert_eq!(a.sub(Dd::from(1.0)).to_f64(), 1e-20);
        let third = Dd::from(1.0).div(Dd::from(3.0));
        let back = third.mul(Dd::from(3.0)).sub(Dd::from(1.0));
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn all_ones_is_boundary_psd() {
        let m = DMatrix::from_element(5, 5, c(1.0));
        let v = psd_check(&m, 1e-10).unwrap();
        assert!(v.is_psd());
        assert!(v.boundary);
        assert!(v.min_eigenvalue.abs() < 1e-12);
        assert!(v.witness.is_none());
    }

    #[test]
    fn two_by_two_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.4), c(0.7), c(0.7), c(0.8)]);
        let v = psd_check(&m, 1e-10).unwrap();
        assert_eq!(v.status, PsdStatus::NotPsd);
        let w = v.witness.unwrap();
        let q = quadratic_form(&m, &w);
        // smallest eigenvalue: 0.6 - √(0.04 + 0.49)
        let lmin = 0.6 - 0.53f64.sqrt();
        assert!((v.min_eigenvalue - lmin).abs() < 1e-14);
        assert!((q - lmin).abs() < 1e-12, "{q}");
    }

    #[test]
    fn ldl_witness_on_zero_pivot_block() {
        // [[1, 0, 0], [0, 0, 1], [0, 1, 0]] stops after one pivot; the
        // eigenvector path must supply the witness
        let m = DMatrix::from_row_slice(3, 3, &[c(1.0), c(0.0), c(0.0), c(0.0), c(0.0), c(1.0), c(0.0), c(1.0), c(0.0)]);
        let v = psd_check(&m, 1e-10).unwrap();
        assert_eq!(v.status, PsdStatus::NotPsd);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn ldl_schur_identity() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[c(4.0), c(2.0), c(1.0), c(2.0), c(3.0), c(0.5), c(1.0), c(0.5), c(-2.0)],
        );
        let f = pivoted_ldl(&m, 1e-10);
        assert_eq!(f.rank, 2);
        let x = ldl_witness(&f, 2);
        let q = quadratic_form(&m, &x);
        assert!((q - f.a[2][2].re.to_f64()).abs() < 1e-14);
    }

    #[test]
    fn rejects_oversized_and_non_finite() {
        let m = DMatrix::from_element(MAX_SIZE + 1, MAX_SIZE + 1, c(0.0));
        assert!(psd_check(&m, 1e-10).is_err());
        let m = DMatrix::from_element(2, 2, c(f64::NAN));
        assert!(psd_check(&m, 1e-10).is_err());
    }
}

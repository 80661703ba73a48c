//! Schur recursion for Nevanlinna–Pick interpolation on the disk.
//!
//! Data `(aᵢ, bᵢ)` in the disk is peeled one node at a time. With
//! `γⱼ = bⱼ⁽ʲ⁾` and the Blaschke factor `B_a(z) = (z-a)/(1-āz)`,
//!
//! ```text
//! bᵢ⁽ʲ⁺¹⁾ = (bᵢ⁽ʲ⁾ - γⱼ)/(1 - γ̄ⱼ bᵢ⁽ʲ⁾) / B_{aⱼ}(aᵢ),   i > j
//! φⱼ(z)  = (γⱼ + B_{aⱼ}(z) φⱼ₊₁(z)) / (1 + γ̄ⱼ B_{aⱼ}(z) φⱼ₊₁(z)),   φₖ ≡ 0
//! ```

use crate::scalar::ComplexField;
use crate::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub(super) struct SchurChain {
    pub nodes: Vec<Complex64>,
    pub gammas: Vec<Complex64>,
}

/// Runs the recursion; `Err(j)` if the `j`-th Schur parameter is not inside
/// the disk (the data is not interpolable by a Schur function).
pub(super) fn schur_chain(nodes: &[Complex64], targets: &[Complex64]) -> Result<SchurChain, usize> {
    let k = nodes.len();
    let mut b = targets.to_vec();
    let mut gammas = Vec::with_capacity(k);
    for j in 0..k {
        let g = b[j];
        if !(g.norm() < 1.0) {
            return Err(j);
        }
        gammas.push(g);
        let a = nodes[j];
        for i in j + 1..k {
            let blaschke = (nodes[i] - a) / (1.0 - a.conj() * nodes[i]);
            b[i] = (b[i] - g) / (1.0 - g.conj() * b[i]) / blaschke;
        }
    }
    Ok(SchurChain {
        nodes: nodes.to_vec(),
        gammas,
    })
}

impl SchurChain {
    pub fn eval<F: ComplexField>(&self, z: &F) -> F {
        let one = z.one_like();
        let mut phi = z.zero_like();
        for (a, g) in self.nodes.iter().zip(&self.gammas).rev() {
            let a = z.lift(*a);
            let g = z.lift(*g);
            let blaschke = (z.clone() - a.clone()) / (one.clone() - a.conj() * z.clone());
            let bp = blaschke * phi;
            phi = (g.clone() + bp.clone()) / (one.clone() + g.conj() * bp);
        }
        phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_node_is_a_constant() {
        let ch = schur_chain(&[c(0.2, 0.1)], &[c(0.5, -0.3)]).unwrap();
        for z in [c(0.0, 0.0), c(0.9, 0.0), c(-0.3, 0.6)] {
            assert_eq!(ch.eval(&z), c(0.5, -0.3));
        }
    }

    #[test]
    fn recovers_the_parameters_of_a_chain() {
        let nodes = vec![c(0.1, 0.2), c(-0.4, 0.1), c(0.3, -0.5)];
        let gammas = vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.2, 0.6)];
        let phi = SchurChain {
            nodes: nodes.clone(),
            gammas: gammas.clone(),
        };
        let targets: Vec<Complex64> = nodes.iter().map(|z| phi.eval(z)).collect();
        let ch = schur_chain(&nodes, &targets).unwrap();
        for (a, b) in ch.gammas.iter().zip(&gammas) {
            assert!((a - b).norm() < 1e-13);
        }
        for z in [c(0.7, 0.1), c(-0.2, -0.2), c(0.0, 0.9)] {
            assert!((ch.eval(&z) - phi.eval(&z)).norm() < 1e-13);
        }
    }

    #[test]
    fn inner_data_is_extremal() {
        // a degree-2 Blaschke product leaves a unimodular third parameter
        let phi = |z: Complex64| z * (z - 0.5) / (1.0 - 0.5 * z);
        let nodes = [c(0.1, 0.2), c(-0.4, 0.1), c(0.3, -0.5)];
        let targets: Vec<Complex64> = nodes.iter().map(|&z| phi(z)).collect();
        assert_eq!(schur_chain(&nodes, &targets), Err(2));
        let ch = schur_chain(&nodes[..2], &targets[..2]).unwrap();
        for (z, w) in nodes[..2].iter().zip(&targets) {
            assert!((ch.eval(z) - w).norm() < 1e-13);
        }
    }

    #[test]
    fn infeasible_data_stops() {
        // |φ(0)| = 0.9 and |φ(0.1)| = 0 contradicts Schwarz–Pick
        assert!(schur_chain(&[c(0.0, 0.0), c(0.1, 0.0)], &[c(0.9, 0.0), c(0.0, 0.0)]).is_err());
    }
}

use super::basis::ExcitationBasis;
use super::gep::EomSolution;
use crate::error::Result;
use crate::linalg::{inner, norm};
use crate::scalar::{czero, Real, C};
use crate::simulator::{apply, Level, Spectrum, StateVector};

/// States with a norm below this, before or after orthogonalization, are
/// dropped.
pub const DISCARD_NORM: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction<T: Real> {
    /// Ground state followed by the accepted excited states.
    pub spectrum: Spectrum<T>,
    /// Roots whose state was dropped.
    pub discarded: usize,
}

/// Builds `|n⟩ ∝ Σ_k (x_k E_k − y_k E_k†)|0⟩` for every root and
/// orthonormalizes against the ground state and earlier roots.
pub fn reconstruct_excited_states<T: Real>(
    sol: &EomSolution<T>,
    basis: &ExcitationBasis<T>,
    gs: &StateVector<T>,
    gs_energy: T,
) -> Result<Reconstruction<T>> {
    let mut up = Vec::with_capacity(basis.len());
    let mut down = Vec::with_capacity(basis.len());
    for e in basis.operators() {
        up.push(apply(e, gs)?);
        down.push(apply(&e.adjoint(), gs)?);
    }
    let tol = T::lit(DISCARD_NORM);
    let mut accepted: Vec<Vec<C<T>>> = vec![gs.amplitudes().to_vec()];
    let mut levels = vec![Level {
        energy: gs_energy,
        state: gs.clone(),
    }];
    let mut discarded = 0;
    for root in &sol.excitations {
        let mut v = vec![czero::<T>(); gs.dim()];
        for k in 0..basis.len() {
            let (x, y) = (root.x[k], root.y[k]);
            for (o, (&a, &b)) in v.iter_mut().zip(up[k].iter().zip(&down[k])) {
                *o += x * a - y * b;
            }
        }
        if norm(&v) < tol {
            discarded += 1;
            continue;
        }
        for _ in 0..2 {
            for a in &accepted {
                let proj = inner(a, &v);
                for (o, &x) in v.iter_mut().zip(a) {
                    *o -= x * proj;
                }
            }
        }
        if norm(&v) < tol {
            discarded += 1;
            continue;
        }
        let state = StateVector::normalized(v)?;
        accepted.push(state.amplitudes().to_vec());
        levels.push(Level {
            energy: gs_energy + root.energy,
            state,
        });
    }
    Ok(Reconstruction {
        spectrum: Spectrum::new(levels),
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eom::{generate_excitation_basis, ExcitationRoot};
    use crate::scalar::c;

    fn solution(x: Vec<C<f64>>, y: Vec<C<f64>>) -> EomSolution<f64> {
        EomSolution {
            excitations: vec![ExcitationRoot { energy: 0.5, x, y }],
            dim: 3,
            retained: 6,
            condition_number: 1.0,
            ill_conditioned: false,
            all_roots: Vec::new(),
        }
    }

    #[test]
    fn single_excitation_of_reference() {
        let basis = generate_excitation_basis::<f64>(1, 1);
        // reference: qubits 0 and 2
        let hf = StateVector::basis(4, 0b0101);
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let sol = solution(vec![one, zero, zero], vec![zero; 3]);
        let rec = reconstruct_excited_states(&sol, &basis, &hf, -1.0).unwrap();
        assert_eq!(rec.spectrum.len(), 2);
        assert_eq!(rec.discarded, 0);
        let excited = &rec.spectrum.levels()[1];
        assert!((excited.energy + 0.5).abs() < 1e-15);
        // alpha electron moved from qubit 0 to qubit 1
        assert!((excited.state.fidelity(&StateVector::basis(4, 0b0110)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coefficients_are_discarded() {
        let basis = generate_excitation_basis::<f64>(1, 1);
        let hf = StateVector::basis(4, 0b0101);
        let zero = c(0.0, 0.0);
        let sol = solution(vec![zero; 3], vec![zero; 3]);
        let rec = reconstruct_excited_states(&sol, &basis, &hf, -1.0).unwrap();
        assert_eq!(rec.spectrum.len(), 1);
        assert_eq!(rec.discarded, 1);
    }
}

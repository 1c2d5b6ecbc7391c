//! Reference ground states: Hartree–Fock determinant and a UCCSD
//! variational eigensolver with a Nelder–Mead optimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eom::ExcitationBasis;
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::operators::{spin_orbital, PauliOperator};
use crate::scalar::{c, Real};
use crate::simulator::{expectation, StateVector};

pub const DEFAULT_MAX_EVALUATIONS: usize = 5000;
pub const DEFAULT_RESTARTS: usize = 3;
/// Simplex spread in energy that counts as converged.
pub const ENERGY_TOLERANCE: f64 = 1e-10;

/// Closed-shell determinant with the lowest `n_electrons / 2` α and β
/// spin orbitals occupied.
pub fn hartree_fock_state<T: Real>(n_electrons: usize, n_qubits: usize) -> Result<StateVector<T>> {
    if n_electrons % 2 != 0 {
        return Err(Error::OddElectronCount(n_electrons));
    }
    if n_electrons > n_qubits {
        return Err(Error::IndexOutOfRange {
            index: n_electrons,
            limit: n_qubits,
            context: "electrons on register".into(),
        });
    }
    let n_spatial = n_qubits / 2;
    let mut index = 0usize;
    for p in 0..n_electrons / 2 {
        index |= 1 << spin_orbital(p, false, n_spatial);
        index |= 1 << spin_orbital(p, true, n_spatial);
    }
    Ok(StateVector::basis(n_qubits, index))
}

/// Unitary coupled-cluster ansatz `∏_k exp(θ_k (E_k − E_k†))`, applied in
/// basis order. Each generator is stored as the eigendecomposition of the
/// Hermitian `K = i(E − E†)`, so `exp(θG) = U e^{−iθΛ} U†`.
#[derive(Clone, Debug)]
pub struct UccsdAnsatz<T: Real> {
    n_qubits: usize,
    generators: Vec<(Vec<T>, CMatrix<T>)>,
}

impl<T: Real> UccsdAnsatz<T> {
    pub fn new(basis: &ExcitationBasis<T>) -> Self {
        let generators = basis
            .operators()
            .map(|e| {
                let g = e.sub(&e.adjoint()).expect("same register");
                let k = g.scale(c(T::zero(), T::one()));
                let eg = eigh(&k.to_matrix());
                (eg.values, eg.vectors)
            })
            .collect();
        Self {
            n_qubits: basis.n_qubits(),
            generators,
        }
    }

    pub fn n_parameters(&self) -> usize {
        self.generators.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn state(&self, params: &[T], reference: &StateVector<T>) -> Result<StateVector<T>> {
        if params.len() != self.generators.len() {
            return Err(Error::SizeMismatch {
                expected: self.generators.len(),
                actual: params.len(),
            });
        }
        if reference.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: reference.n_qubits(),
            });
        }
        let mut psi = reference.amplitudes().to_vec();
        for (&theta, (values, u)) in params.iter().zip(&self.generators) {
            if theta == T::zero() {
                continue;
            }
            let mut coeffs = u.adjoint().matvec(&psi);
            for (cf, &lam) in coeffs.iter_mut().zip(values) {
                let angle = -theta * lam;
                *cf *= c(angle.cos(), angle.sin());
            }
            psi = u.matvec(&coeffs);
        }
        StateVector::normalized(psi)
    }
}

/// `exp(θ_k (E_k − E_k†))` applied in basis order to `reference`.
pub fn uccsd_state<T: Real>(
    params: &[T],
    basis: &ExcitationBasis<T>,
    reference: &StateVector<T>,
) -> Result<StateVector<T>> {
    if params.len() != basis.len() {
        return Err(Error::SizeMismatch {
            expected: basis.len(),
            actual: params.len(),
        });
    }
    UccsdAnsatz::new(basis).state(params, reference)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VqeOptions {
    /// Evaluation budget of each optimizer run.
    pub max_evaluations: usize,
    /// Additional runs started from a randomly perturbed best point.
    pub restarts: usize,
    /// Side of the initial simplex.
    pub initial_step: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            restarts: DEFAULT_RESTARTS,
            initial_step: 0.1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VqeResult<T: Real> {
    pub energy: T,
    pub params: Vec<T>,
    pub state: StateVector<T>,
    pub evaluations: usize,
    /// False when some run hit the evaluation cap.
    pub converged: bool,
}

/// Minimizes `⟨ψ(θ)|h|ψ(θ)⟩` starting from `θ = 0`, followed by
/// `opts.restarts` runs from seeded perturbations of the best point.
pub fn vqe_minimize<T: Real>(
    h: &PauliOperator<T>,
    basis: &ExcitationBasis<T>,
    reference: &StateVector<T>,
    seed: u64,
    opts: &VqeOptions,
) -> Result<VqeResult<T>> {
    let herm = h.hermiticity_error();
    if herm > T::lit(1e-10) {
        return Err(Error::NonHermitianInput(herm.to_f64_lossy()));
    }
    let ansatz = UccsdAnsatz::new(basis);
    let energy = |theta: &[T]| -> Result<T> {
        let psi = ansatz.state(theta, reference)?;
        Ok(expectation(h, &psi)?.re)
    };
    let n = ansatz.n_parameters();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = T::lit(opts.initial_step);

    let mut best = vec![T::zero(); n];
    let mut best_e = energy(&best)?;
    let mut evaluations = 1;
    let mut converged = true;
    for run in 0..=opts.restarts {
        if n == 0 {
            break;
        }
        let start: Vec<T> = if run == 0 {
            best.clone()
        } else {
            best.iter()
                .map(|&b| b + T::lit(rng.gen_range(-0.5..0.5)) * step * T::lit(4.0))
                .collect()
        };
        let out = nelder_mead(&energy, start, step, opts.max_evaluations)?;
        evaluations += out.evaluations;
        converged &= out.converged;
        if out.value < best_e {
            best_e = out.value;
            best = out.point;
        }
    }
    if !converged {
        log::warn!("VQE reached the evaluation cap; returning the best point found");
    }
    let state = ansatz.state(&best, reference)?;
    Ok(VqeResult {
        energy: best_e,
        params: best,
        state,
        evaluations,
        converged,
    })
}

struct Minimum<T> {
    point: Vec<T>,
    value: T,
    evaluations: usize,
    converged: bool,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½,
/// shrink ½).
fn nelder_mead<T: Real, F>(f: &F, start: Vec<T>, step: T, max_evals: usize) -> Result<Minimum<T>>
where
    F: Fn(&[T]) -> Result<T>,
{
    let n = start.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((start.clone(), f(&start)?));
    for i in 0..n {
        let mut p = start.clone();
        p[i] += step;
        let v = f(&p)?;
        simplex.push((p, v));
    }
    let mut evals = n + 1;
    let tol = T::lit(ENERGY_TOLERANCE);
    let mut converged = false;
    let lerp = |a: &[T], b: &[T], t: T| -> Vec<T> {
        a.iter().zip(b).map(|(&x, &y)| x + (y - x) * t).collect()
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite energy"));
        if simplex[n].1 - simplex[0].1 < tol {
            converged = true;
            break;
        }
        let mut centroid = vec![T::zero(); n];
        for (p, _) in &simplex[..n] {
            for (c, &x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        let inv = T::one() / T::from_count(n);
        centroid.iter_mut().for_each(|c| *c *= inv);
        let worst = simplex[n].0.clone();
        // x_r = c + (c − w)
        let xr = lerp(&centroid, &worst, -T::one());
        let fr = f(&xr)?;
        evals += 1;
        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &worst, -two);
            let fe = f(&xe)?;
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = lerp(&centroid, &worst, -half);
                let fc = f(&xc)?;
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &worst, half);
                let fc = f(&xc)?;
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &entry.0, half);
                    let v = f(&p)?;
                    *entry = (p, v);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite energy"));
    let (point, value) = simplex.swap_remove(0);
    Ok(Minimum {
        point,
        value,
        evaluations: evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eom::generate_excitation_basis;

    #[test]
    fn hartree_fock_occupations() {
        let s = hartree_fock_state::<f64>(2, 4).unwrap();
        assert_eq!(s.amplitudes()[0b0101], c(1.0, 0.0));
        let s = hartree_fock_state::<f64>(0, 4).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        let s = hartree_fock_state::<f64>(4, 8).unwrap();
        assert_eq!(s.amplitudes()[0b0011_0011], c(1.0, 0.0));
        assert!(matches!(
            hartree_fock_state::<f64>(3, 8),
            Err(Error::OddElectronCount(3))
        ));
    }

    #[test]
    fn zero_parameters_and_inverse() {
        let basis = generate_excitation_basis::<f64>(1, 1);
        let hf = hartree_fock_state(2, 4).unwrap();
        assert_eq!(uccsd_state(&[0.0; 3], &basis, &hf).unwrap(), hf);
        let fwd = uccsd_state(&[0.0, 0.0, 0.4], &basis, &hf).unwrap();
        let back = uccsd_state(&[0.0, 0.0, -0.4], &basis, &fwd).unwrap();
        assert!((back.fidelity(&hf) - 1.0).abs() < 1e-12);
        assert!(matches!(
            uccsd_state(&[0.0; 2], &basis, &hf),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn eight_qubit_generators_diagonalize() {
        let basis = generate_excitation_basis::<f64>(2, 2);
        let ansatz = UccsdAnsatz::new(&basis);
        assert_eq!(ansatz.n_parameters(), 26);
        let hf = hartree_fock_state(4, 8).unwrap();
        let theta: Vec<f64> = (0..26).map(|k| 0.01 * k as f64).collect();
        let psi = ansatz.state(&theta, &hf).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_landscape_stays_put() {
        let basis = generate_excitation_basis::<f64>(1, 1);
        let hf = hartree_fock_state(2, 4).unwrap();
        let h = PauliOperator::identity(4);
        let r = vqe_minimize(&h, &basis, &hf, 7, &VqeOptions::default()).unwrap();
        assert!((r.energy - 1.0).abs() < 1e-12);
        assert!(r.params.iter().all(|&t| t == 0.0));
        assert!(r.converged);
    }
}

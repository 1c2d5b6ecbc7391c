use super::fermion::{jordan_wigner, FermionOperator, Ladder};
use super::pauli::PauliOperator;
use crate::error::Result;
use crate::io::MolecularIntegrals;
use crate::scalar::{cr, Real};

/// Spin-orbital index in the blocked ordering: all α orbitals
/// (`0..n`) followed by all β orbitals (`n..2n`).
#[inline]
pub fn spin_orbital(spatial: usize, beta: bool, n_spatial: usize) -> usize {
    if beta {
        spatial + n_spatial
    } else {
        spatial
    }
}

/// Second-quantized electronic Hamiltonian
/// `E_core + Σ h_pq a_p†a_q + ½ Σ ⟨pq|rs⟩ a_p†a_q†a_s a_r`
/// over spin orbitals, with `⟨pq|rs⟩ = (pr|qs)` and spin conserved on each
/// electron.
pub fn build_hamiltonian<T: Real>(ints: &MolecularIntegrals) -> FermionOperator<T> {
    let n = ints.n_spatial_orbitals();
    let mut h = FermionOperator::zero();
    let mut push = |coeff: f64, factors: Vec<Ladder>| {
        if coeff != 0.0 {
            h.push(cr(T::lit(coeff)), factors);
        }
    };
    push(ints.core_energy(), Vec::new());
    for (&(p, q), &v) in ints.one_body_entries() {
        for beta in [false, true] {
            push(
                v,
                vec![
                    Ladder::create(spin_orbital(p, beta, n)),
                    Ladder::annihilate(spin_orbital(q, beta, n)),
                ],
            );
        }
    }
    // (pr|qs) stored as [p, r, q, s]
    for (&[p, r, q, s], &v) in ints.two_body_entries() {
        for s1 in [false, true] {
            for s2 in [false, true] {
                let (pp, qq) = (spin_orbital(p, s1, n), spin_orbital(q, s2, n));
                let (rr, ss) = (spin_orbital(r, s1, n), spin_orbital(s, s2, n));
                if pp == qq || rr == ss {
                    continue;
                }
                push(
                    0.5 * v,
                    vec![
                        Ladder::create(pp),
                        Ladder::create(qq),
                        Ladder::annihilate(ss),
                        Ladder::annihilate(rr),
                    ],
                );
            }
        }
    }
    h
}

/// Qubit Hamiltonian on `2·n_spatial` qubits.
pub fn qubit_hamiltonian<T: Real>(ints: &MolecularIntegrals) -> Result<PauliOperator<T>> {
    jordan_wigner(&build_hamiltonian(ints), ints.n_spin_orbitals())
}

/// Total particle number `Σ_p a_p†a_p`.
pub fn number_operator<T: Real>(n_qubits: usize) -> PauliOperator<T> {
    let mut n = FermionOperator::zero();
    for p in 0..n_qubits {
        n = n.add(&FermionOperator::hopping(p, p));
    }
    jordan_wigner(&n, n_qubits).expect("modes within register")
}

/// Spin projection `S_z = ½(N_α − N_β)` in the blocked ordering.
pub fn sz_operator<T: Real>(n_qubits: usize) -> PauliOperator<T> {
    let n_spatial = n_qubits / 2;
    let half = cr(T::lit(0.5));
    let mut op = FermionOperator::zero();
    for p in 0..n_spatial {
        op = op.add(&FermionOperator::hopping(p, p).scale(half));
        let b = spin_orbital(p, true, n_spatial);
        op = op.add(&FermionOperator::hopping(b, b).scale(-half));
    }
    jordan_wigner(&op, n_qubits).expect("modes within register")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_fcidump;
    use crate::operators::PauliString;
    use crate::scalar::c;

    #[test]
    fn one_orbital_spin_duplication() {
        let ints = parse_fcidump("&FCI NORB=1,NELEC=2 &END\n -1.25 1 1 0 0\n 0.5 0 0 0 0\n").unwrap();
        let h = build_hamiltonian::<f64>(&ints);
        let expected = FermionOperator::identity(c(0.5, 0.0))
            .add(&FermionOperator::hopping(0, 0).scale(c(-1.25, 0.0)))
            .add(&FermionOperator::hopping(1, 1).scale(c(-1.25, 0.0)));
        assert_eq!(jordan_wigner(&h, 2).unwrap(), jordan_wigner(&expected, 2).unwrap());
    }

    #[test]
    fn zero_integrals_leave_core_energy() {
        let ints = parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 0.75 0 0 0 0\n").unwrap();
        let h = qubit_hamiltonian::<f64>(&ints).unwrap();
        assert_eq!(h, PauliOperator::identity(4).scale_real(0.75));
    }

    #[test]
    fn number_and_spin_operators() {
        let n = number_operator::<f64>(2);
        assert_eq!(n.coefficient(&PauliString::identity(2)), c(1.0, 0.0));
        let sz = sz_operator::<f64>(4);
        // S_z on |α0 occupied⟩ = 1/2
        let m = sz.to_matrix();
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((m[(4, 4)].re + 0.5).abs() < 1e-15);
    }
}

//! Fermionic and Pauli operator algebra.

mod fermion;
mod hamiltonian;
mod pauli;

pub use fermion::{jordan_wigner, ladder_to_pauli, FermionOperator, FermionTerm, Ladder};
pub use hamiltonian::{
    build_hamiltonian, number_operator, qubit_hamiltonian, spin_orbital, sz_operator,
};
pub use pauli::{Pauli, PauliOperator, PauliString, MAX_QUBITS, PRUNE_TOLERANCE};

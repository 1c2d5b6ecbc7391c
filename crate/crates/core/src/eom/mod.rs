//! Equation-of-motion excitation energies from ground-state expectation
//! values.

mod basis;
mod gep;
mod reconstruct;
mod table;

pub use basis::{basis_size, generate_excitation_basis, Excitation, ExcitationBasis};
pub use gep::{eom_pencil, solve_gep, EomSolution, ExcitationRoot, GepOptions, DEFAULT_ETA};
pub use reconstruct::{reconstruct_excited_states, Reconstruction, DISCARD_NORM};
pub use table::{
    assemble_eom_matrices, matrix_element_observables, ElementObservable, EomMatrices, MatrixKind,
    ObservableTable,
};

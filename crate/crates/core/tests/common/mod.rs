//! Dense-matrix oracles built independently of the crate's own operator
//! and linear-algebra code.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qeom_core::operators::{FermionOperator, Pauli, PauliOperator, PauliString};
use rand::Rng;

pub type Dense = DMatrix<Complex64>;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn letter(p: Pauli) -> Dense {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => Dense::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => Dense::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => Dense::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => Dense::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Kronecker product with the highest qubit as the most significant factor.
pub fn string_dense(s: &PauliString) -> Dense {
    let mut m = Dense::identity(1, 1);
    for q in (0..s.n_qubits()).rev() {
        m = m.kronecker(&letter(s.get(q)));
    }
    m
}

pub fn pauli_dense(op: &PauliOperator<f64>) -> Dense {
    let dim = 1usize << op.n_qubits();
    let mut m = Dense::zeros(dim, dim);
    for (s, c) in op.terms() {
        m += string_dense(s) * *c;
    }
    m
}

/// Ladder operator on the occupation-number basis: bit `p` of the index is
/// the occupation of mode `p`, and the sign counts occupied modes below `p`.
pub fn ladder_dense(mode: usize, dagger: bool, n_modes: usize) -> Dense {
    let dim = 1usize << n_modes;
    let mut m = Dense::zeros(dim, dim);
    for b in 0..dim {
        let occupied = b >> mode & 1 == 1;
        if occupied == dagger {
            continue;
        }
        let below = (b & ((1 << mode) - 1)).count_ones();
        let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
        m[(b ^ (1 << mode), b)] = Complex64::new(sign, 0.0);
    }
    m
}

pub fn fermion_dense(op: &FermionOperator<f64>, n_modes: usize) -> Dense {
    let dim = 1usize << n_modes;
    let mut out = Dense::zeros(dim, dim);
    for t in op.terms() {
        let mut m = Dense::identity(dim, dim);
        for l in &t.factors {
            m *= ladder_dense(l.mode, l.dagger, n_modes);
        }
        out += m * t.coeff;
    }
    out
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_string(rng: &mut impl Rng, n: usize) -> PauliString {
    PauliString::from_masks(n, rng.gen_range(0..1u64 << n), rng.gen_range(0..1u64 << n))
}

/// Random operator with up to `terms` strings and complex coefficients.
pub fn random_operator(rng: &mut impl Rng, n: usize, terms: usize) -> PauliOperator<f64> {
    let mut op = PauliOperator::zero(n);
    for _ in 0..terms {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        op = op.add(&PauliOperator::term(random_string(rng, n), c)).unwrap();
    }
    op
}

/// Random Hermitian Pauli sum: real coefficients on random strings.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, terms: usize) -> PauliOperator<f64> {
    let mut op = PauliOperator::zero(n);
    for _ in 0..terms {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        op = op.add(&PauliOperator::term(random_string(rng, n), c)).unwrap();
    }
    op
}

pub fn random_amplitudes(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// `⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩` by dense multiplication.
pub fn dense_expectation(a: &Dense, amps: &[Complex64]) -> Complex64 {
    let v = nalgebra::DVector::from_column_slice(amps);
    let num = (v.adjoint() * a * &v)[(0, 0)];
    num / v.norm_squared()
}

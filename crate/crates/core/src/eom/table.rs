use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::basis::ExcitationBasis;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operators::{PauliOperator, PauliString};
use crate::scalar::{cr, czero, Real, C};

/// Which of the four EOM matrices an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum MatrixKind {
    M,
    Q,
    V,
    W,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 4] = [MatrixKind::M, MatrixKind::Q, MatrixKind::V, MatrixKind::W];
}

/// Operator whose ground-state expectation is one matrix element.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementObservable<T: Real> {
    pub kind: MatrixKind,
    pub row: usize,
    pub col: usize,
    pub op: PauliOperator<T>,
}

/// Observables for every element of M, Q, V, W plus the distinct strings
/// that have to be measured.
#[derive(Clone, Debug)]
pub struct ObservableTable<T: Real> {
    dim: usize,
    n_qubits: usize,
    elements: Vec<ElementObservable<T>>,
    strings: Vec<PauliString>,
    // per element: identity coefficient and (string index, coefficient)
    compiled: Vec<(C<T>, Vec<(usize, C<T>)>)>,
}

impl<T: Real> ObservableTable<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn elements(&self) -> &[ElementObservable<T>] {
        &self.elements
    }

    /// Distinct non-identity strings across all elements, in canonical
    /// order.
    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    /// Elements of one matrix with a nonzero operator.
    pub fn nonzero_elements(&self, kind: MatrixKind) -> usize {
        self.elements
            .iter()
            .filter(|e| e.kind == kind && !e.op.is_empty())
            .count()
    }

    /// Distinct non-identity strings used by one matrix.
    pub fn strings_for(&self, kind: MatrixKind) -> usize {
        self.elements
            .iter()
            .filter(|e| e.kind == kind)
            .flat_map(|e| e.op.strings().filter(|s| !s.is_identity()))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Matrices from expectation values aligned with [`Self::strings`].
    pub fn assemble(&self, values: &[T]) -> Result<EomMatrices<T>> {
        if values.len() != self.strings.len() {
            return Err(Error::SizeMismatch {
                expected: self.strings.len(),
                actual: values.len(),
            });
        }
        let d = self.dim;
        let mut mats = EomMatrices::zeros(d);
        for (e, (id, terms)) in self.elements.iter().zip(&self.compiled) {
            let mut acc = *id;
            for &(k, c) in terms {
                acc += c * values[k];
            }
            mats.get_mut(e.kind)[(e.row, e.col)] = acc;
        }
        Ok(mats)
    }
}

/// The four `D × D` EOM matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct EomMatrices<T: Real> {
    pub m: CMatrix<T>,
    pub q: CMatrix<T>,
    pub v: CMatrix<T>,
    pub w: CMatrix<T>,
}

impl<T: Real> EomMatrices<T> {
    pub fn zeros(d: usize) -> Self {
        Self {
            m: CMatrix::zeros(d, d),
            q: CMatrix::zeros(d, d),
            v: CMatrix::zeros(d, d),
            w: CMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn get(&self, kind: MatrixKind) -> &CMatrix<T> {
        match kind {
            MatrixKind::M => &self.m,
            MatrixKind::Q => &self.q,
            MatrixKind::V => &self.v,
            MatrixKind::W => &self.w,
        }
    }

    pub fn get_mut(&mut self, kind: MatrixKind) -> &mut CMatrix<T> {
        match kind {
            MatrixKind::M => &mut self.m,
            MatrixKind::Q => &mut self.q,
            MatrixKind::V => &mut self.v,
            MatrixKind::W => &mut self.w,
        }
    }

    /// Largest violation of: M, V Hermitian; Q symmetric; W antisymmetric.
    pub fn symmetry_error(&self) -> T {
        let q = self.q.max_abs_diff(&self.q.transpose());
        let w = (&self.w + &self.w.transpose()).max_abs();
        self.m
            .hermiticity_error()
            .max(self.v.hermiticity_error())
            .max(q)
            .max(w)
    }

    /// Projects each matrix onto its exact symmetry class.
    pub fn symmetrized(&self) -> Self {
        let half = cr(T::lit(0.5));
        Self {
            m: self.m.hermitian_part(),
            v: self.v.hermitian_part(),
            q: (&self.q + &self.q.transpose()).scale(half),
            w: (&self.w - &self.w.transpose()).scale(half),
        }
    }

    /// Applies `E'_k = Σ_j u_jk E_j` to the excitation basis:
    /// M, V → U†·U; Q, W → U^T·U.
    pub fn transformed(&self, u: &CMatrix<T>) -> Self {
        let ud = u.adjoint();
        let ut = u.transpose();
        Self {
            m: &(&ud * &self.m) * u,
            v: &(&ud * &self.v) * u,
            q: &(&ut * &self.q) * u,
            w: &(&ut * &self.w) * u,
        }
    }
}

/// Builds `M = ⟨[E†,H,E]⟩`, `Q = −⟨[E†,H,E†]⟩`, `V = ⟨[E†,E]⟩` and
/// `W = −⟨[E†,E†]⟩` as Pauli operators for every index pair.
pub fn matrix_element_observables<T: Real>(
    h: &PauliOperator<T>,
    basis: &ExcitationBasis<T>,
) -> Result<ObservableTable<T>> {
    if h.n_qubits() != basis.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: h.n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let ops: Vec<&PauliOperator<T>> = basis.operators().collect();
    let adj: Vec<PauliOperator<T>> = ops.iter().map(|e| e.adjoint()).collect();
    let d = ops.len();
    // [E_μ†, H], [H, E_ν], [H, E_ν†]
    let adj_h: Vec<PauliOperator<T>> = adj
        .par_iter()
        .map(|a| a.commutator(h))
        .collect::<Result<_>>()?;
    let h_e: Vec<PauliOperator<T>> = ops
        .par_iter()
        .map(|e| h.commutator(e))
        .collect::<Result<_>>()?;
    let h_adj: Vec<PauliOperator<T>> = adj
        .par_iter()
        .map(|a| h.commutator(a))
        .collect::<Result<_>>()?;

    let half = T::lit(0.5);
    let jobs: Vec<(MatrixKind, usize, usize)> = MatrixKind::ALL
        .iter()
        .flat_map(|&k| (0..d).flat_map(move |r| (0..d).map(move |c| (k, r, c))))
        .collect();
    let elements: Vec<ElementObservable<T>> = jobs
        .par_iter()
        .map(|&(kind, r, c)| {
            let op = match kind {
                MatrixKind::M => adj_h[r]
                    .commutator(ops[c])?
                    .add(&adj[r].commutator(&h_e[c])?)?
                    .scale_real(half),
                MatrixKind::Q => adj_h[r]
                    .commutator(&adj[c])?
                    .add(&adj[r].commutator(&h_adj[c])?)?
                    .scale_real(-half),
                MatrixKind::V => adj[r].commutator(ops[c])?,
                MatrixKind::W => adj[r].commutator(&adj[c])?.scale_real(-T::one()),
            };
            Ok(ElementObservable {
                kind,
                row: r,
                col: c,
                op,
            })
        })
        .collect::<Result<_>>()?;

    let strings: Vec<PauliString> = elements
        .iter()
        .flat_map(|e| e.op.strings().copied())
        .filter(|s| !s.is_identity())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<PauliString, usize> =
        strings.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let compiled = elements
        .iter()
        .map(|e| {
            let mut id = czero();
            let mut terms = Vec::with_capacity(e.op.len());
            for (s, &c) in e.op.terms() {
                if s.is_identity() {
                    id += c;
                } else {
                    terms.push((index[s], c));
                }
            }
            (id, terms)
        })
        .collect();
    Ok(ObservableTable {
        dim: d,
        n_qubits: h.n_qubits(),
        elements,
        strings,
        compiled,
    })
}

/// Matrices from a map of string expectations; identity strings need no
/// entry.
pub fn assemble_eom_matrices<T: Real>(
    table: &ObservableTable<T>,
    expectations: &HashMap<PauliString, T>,
) -> Result<EomMatrices<T>> {
    let values = table
        .strings()
        .iter()
        .map(|s| {
            expectations
                .get(s)
                .copied()
                .ok_or_else(|| Error::MissingExpectation(s.label()))
        })
        .collect::<Result<Vec<T>>>()?;
    table.assemble(&values)
}

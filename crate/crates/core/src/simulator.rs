//! Dense statevector simulation and exact diagonalization.

use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, norm, CMatrix};
use crate::operators::{number_operator, sz_operator, PauliOperator, PauliString};
use crate::scalar::{cabs, cone, czero, phase, Real, C};

/// Tolerance on the norm of a [`StateVector`].
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Tolerance of the particle-number and spin filters.
pub const SECTOR_TOLERANCE: f64 = 1e-6;

/// Normalized pure state on `n_qubits` qubits; amplitude `b` belongs to the
/// computational basis state whose bit `q` is the occupation of qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![czero(); 1 << n_qubits];
        amplitudes[index] = cone();
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Normalizes `amplitudes`; fails when the length is not a power of two
    /// or the vector vanishes.
    pub fn normalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::SizeMismatch {
                expected: dim.next_power_of_two(),
                actual: dim,
            });
        }
        let nrm = norm(&amplitudes);
        if !(nrm > T::zero()) {
            return Err(Error::SizeMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / nrm).collect(),
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> C<T> {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.overlap(other).norm_sqr()
    }

    pub fn with_global_phase(&self, ph: C<T>) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|&a| a * ph).collect(),
        }
    }

    /// Probability of each computational basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_qubits(op: usize, state: usize) -> Result<()> {
    if op != state {
        return Err(Error::QubitCountMismatch {
            left: op,
            right: state,
        });
    }
    Ok(())
}

/// Accumulates `coeff · P · psi` into `out`.
fn apply_string<T: Real>(s: &PauliString, coeff: C<T>, psi: &[C<T>], out: &mut [C<T>]) {
    let x = s.x_mask();
    for (b, &amp) in psi.iter().enumerate() {
        if amp.re == T::zero() && amp.im == T::zero() {
            continue;
        }
        let (ph, _) = s.apply_to_basis::<T>(b as u64);
        out[b ^ x as usize] += ph * coeff * amp;
    }
}

/// `op · psi` without renormalization.
pub fn apply<T: Real>(op: &PauliOperator<T>, psi: &StateVector<T>) -> Result<Vec<C<T>>> {
    apply_amplitudes(op, psi.n_qubits(), psi.amplitudes())
}

/// `op · v` for a raw amplitude vector on `n_qubits` qubits.
pub fn apply_amplitudes<T: Real>(
    op: &PauliOperator<T>,
    n_qubits: usize,
    v: &[C<T>],
) -> Result<Vec<C<T>>> {
    check_qubits(op.n_qubits(), n_qubits)?;
    let mut out = vec![czero(); v.len()];
    for (s, &c) in op.terms() {
        apply_string(s, c, v, &mut out);
    }
    Ok(out)
}

/// `⟨psi|P|psi⟩` for one string; real because Pauli strings are Hermitian.
pub fn string_expectation<T: Real>(s: &PauliString, psi: &StateVector<T>) -> T {
    let x = s.x_mask() as usize;
    let a = psi.amplitudes();
    let mut acc = czero::<T>();
    for (b, &amp) in a.iter().enumerate() {
        if amp.re == T::zero() && amp.im == T::zero() {
            continue;
        }
        let (ph, _) = s.apply_to_basis::<T>(b as u64);
        acc += a[b ^ x].conj() * ph * amp;
    }
    acc.re
}

/// `⟨psi|op|psi⟩`.
pub fn expectation<T: Real>(op: &PauliOperator<T>, psi: &StateVector<T>) -> Result<C<T>> {
    check_qubits(op.n_qubits(), psi.n_qubits())?;
    Ok(op
        .terms()
        .map(|(s, &c)| c * string_expectation(s, psi))
        .sum())
}

/// Energy eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct Level<T: Real> {
    pub energy: T,
    pub state: StateVector<T>,
}

/// Energy eigenpairs ordered by ascending energy.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum<T: Real> {
    levels: Vec<Level<T>>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts the given levels by energy (stable for ties).
    pub fn new(mut levels: Vec<Level<T>>) -> Self {
        levels.sort_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self { levels }
    }

    pub fn levels(&self) -> &[Level<T>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn ground(&self) -> Option<&Level<T>> {
        self.levels.first()
    }

    /// First `k` levels.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            levels: self.levels.iter().take(k).cloned().collect(),
        }
    }

    /// Largest `|⟨i|j⟩ − δ_ij|` over all pairs.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.levels.iter().enumerate() {
            for (j, b) in self.levels.iter().enumerate().skip(i) {
                let target = if i == j { cone() } else { czero() };
                worst = worst.max(cabs(a.state.overlap(&b.state) - target));
            }
        }
        worst
    }
}

/// Symmetry sector to keep after diagonalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub n_electrons: usize,
    /// Required `⟨S_z⟩`, or `None` to accept any spin projection.
    pub sz: Option<f64>,
}

impl Sector {
    pub fn particles(n_electrons: usize) -> Self {
        Self {
            n_electrons,
            sz: None,
        }
    }

    pub fn with_sz(n_electrons: usize, sz: f64) -> Self {
        Self {
            n_electrons,
            sz: Some(sz),
        }
    }
}

/// Full dense diagonalization of `h`, keeping eigenvectors with
/// `⟨N̂⟩ = n_electrons` (and `⟨S_z⟩ = sz` when requested).
///
/// Degenerate levels are first resolved into `N̂` and `S_z` eigenvectors so
/// that states from different sectors sharing an energy are not mixed.
/// Inside a surviving degenerate level the basis is fixed by pivoted
/// Gram–Schmidt on the projected computational basis states, which makes
/// the result independent of the eigensolver's arbitrary rotation.
pub fn exact_eigenstates<T: Real>(h: &PauliOperator<T>, sector: Sector) -> Result<Spectrum<T>> {
    let herm_err = h.hermiticity_error();
    if herm_err > T::lit(NORM_TOLERANCE) {
        return Err(Error::NonHermitianInput(herm_err.to_f64_lossy()));
    }
    let n = h.n_qubits();
    if sector.n_electrons > n {
        return Err(Error::EmptySector(format!(
            "{} electrons on {n} qubits",
            sector.n_electrons
        )));
    }
    let eg = eigh(&h.to_matrix());
    let number = number_operator::<T>(n).to_matrix();
    let sz_mat = sz_operator::<T>(n).to_matrix();
    let tol = T::lit(SECTOR_TOLERANCE);
    let deg_tol = T::lit(DEGENERACY_TOLERANCE);
    let target_n = T::from_count(sector.n_electrons);

    let dim = eg.values.len();
    let mut levels = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eg.values[end] - eg.values[end - 1] < deg_tol {
            end += 1;
        }
        let cols: Vec<Vec<C<T>>> = (start..end).map(|k| eg.vectors.column(k)).collect();
        let energy_mean =
            eg.values[start..end].iter().copied().sum::<T>() / T::from_count(end - start);
        let mut block = resolve_symmetry(&cols, &number);
        if sector.sz.is_some() {
            block = block
                .into_iter()
                .flat_map(|group| resolve_symmetry(&group, &sz_mat))
                .collect();
        }
        for group in block {
            let (nval, szval) = (
                diag_expect(&number, &group[0]),
                diag_expect(&sz_mat, &group[0]),
            );
            if (nval - target_n).abs() > tol {
                continue;
            }
            if let Some(sz) = sector.sz {
                if (szval - T::lit(sz)).abs() > tol {
                    continue;
                }
            }
            for v in canonical_basis(&group) {
                let energy = if group.len() == 1 {
                    rayleigh(h, n, &v)?
                } else {
                    energy_mean
                };
                levels.push(Level {
                    energy,
                    state: StateVector {
                        n_qubits: n,
                        amplitudes: v,
                    },
                });
            }
        }
        start = end;
    }
    if levels.is_empty() {
        return Err(Error::EmptySector(format!(
            "N = {}, Sz = {:?}",
            sector.n_electrons, sector.sz
        )));
    }
    Ok(Spectrum::new(levels))
}

fn rayleigh<T: Real>(h: &PauliOperator<T>, n: usize, v: &[C<T>]) -> Result<T> {
    let hv = apply_amplitudes(h, n, v)?;
    Ok(inner(v, &hv).re)
}

fn diag_expect<T: Real>(m: &CMatrix<T>, v: &[C<T>]) -> T {
    inner(v, &m.matvec(v)).re
}

/// Splits the span of `cols` into eigenspaces of the symmetry operator `m`
/// restricted to that span. Each group lists orthonormal vectors sharing
/// one eigenvalue.
fn resolve_symmetry<T: Real>(cols: &[Vec<C<T>>], m: &CMatrix<T>) -> Vec<Vec<Vec<C<T>>>> {
    let k = cols.len();
    if k == 1 {
        return vec![cols.to_vec()];
    }
    let images: Vec<Vec<C<T>>> = cols.iter().map(|c| m.matvec(c)).collect();
    let small = CMatrix::from_fn(k, k, |i, j| inner(&cols[i], &images[j]));
    let eg = eigh(&small);
    let rotated: Vec<Vec<C<T>>> = (0..k)
        .map(|j| {
            let mut v = vec![czero::<T>(); cols[0].len()];
            for (i, col) in cols.iter().enumerate() {
                let w = eg.vectors[(i, j)];
                for (o, &x) in v.iter_mut().zip(col) {
                    *o += w * x;
                }
            }
            v
        })
        .collect();
    let tol = T::lit(SECTOR_TOLERANCE);
    let mut groups: Vec<Vec<Vec<C<T>>>> = Vec::new();
    let mut last = None::<T>;
    for (j, v) in rotated.into_iter().enumerate() {
        match last {
            Some(prev) if (eg.values[j] - prev).abs() < tol => {
                groups.last_mut().expect("group").push(v);
            }
            _ => groups.push(vec![v]),
        }
        last = Some(eg.values[j]);
    }
    groups
}

/// Deterministic orthonormal basis of `span(vectors)`: repeatedly picks the
/// computational basis state with the largest remaining projection (lowest
/// index on ties) and orthonormalizes its projection.
fn canonical_basis<T: Real>(vectors: &[Vec<C<T>>]) -> Vec<Vec<C<T>>> {
    let dim = vectors[0].len();
    let proj_diag: Vec<T> = (0..dim)
        .map(|b| vectors.iter().map(|v| v[b].norm_sqr()).sum())
        .collect();
    let mut accepted: Vec<Vec<C<T>>> = Vec::with_capacity(vectors.len());
    let tie = T::lit(1e-9);
    for _ in 0..vectors.len() {
        let residual: Vec<T> = (0..dim)
            .map(|b| proj_diag[b] - accepted.iter().map(|a| a[b].norm_sqr()).sum::<T>())
            .collect();
        let best = residual.iter().copied().fold(T::neg_infinity(), T::max);
        let pivot = residual
            .iter()
            .position(|&r| r >= best - tie)
            .expect("nonempty");
        // P e_b, then remove components along accepted vectors
        let mut w: Vec<C<T>> = (0..dim)
            .map(|i| vectors.iter().map(|v| v[i] * v[pivot].conj()).sum())
            .collect();
        for a in &accepted {
            let coef = a[pivot].conj();
            for (o, &x) in w.iter_mut().zip(a) {
                *o -= x * coef;
            }
        }
        // second pass for numerical orthogonality
        for a in &accepted {
            let coef = inner(a, &w);
            for (o, &x) in w.iter_mut().zip(a) {
                *o -= x * coef;
            }
        }
        let nw = norm(&w);
        let ph = phase(w[pivot]).conj();
        accepted.push(w.into_iter().map(|x| x * ph / nw).collect());
    }
    accepted
}

/// `⟨a|op|b⟩`.
pub fn matrix_element<T: Real>(
    op: &PauliOperator<T>,
    a: &StateVector<T>,
    b: &StateVector<T>,
) -> Result<C<T>> {
    let ob = apply(op, b)?;
    Ok(inner(a.amplitudes(), &ob))
}

/// Real-valued Hermitian expectation, failing loudly on a sizable imaginary
/// part.
pub fn real_expectation<T: Real>(op: &PauliOperator<T>, psi: &StateVector<T>) -> Result<T> {
    let e = expectation(op, psi)?;
    debug_assert!(e.im.abs() < T::lit(1e-6) * (T::one() + op.one_norm()));
    Ok(e.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type Op = PauliOperator<f64>;

    #[test]
    fn identity_and_bit_flip() {
        let psi = StateVector::<f64>::basis(3, 5);
        let out = apply(&Op::identity(3), &psi).unwrap();
        assert_eq!(out, psi.amplitudes());
        let x0 = Op::from_labels(3, &[("IIX", c(1.0, 0.0))]);
        let flipped = apply(&x0, &StateVector::basis(3, 0)).unwrap();
        assert_eq!(flipped, StateVector::<f64>::basis(3, 1).into_amplitudes());
    }

    #[test]
    fn single_qubit_expectations() {
        let zero = StateVector::<f64>::basis(1, 0);
        let z = Op::from_labels(1, &[("Z", c(1.0, 0.0))]);
        let x = Op::from_labels(1, &[("X", c(1.0, 0.0))]);
        assert_eq!(expectation(&z, &zero).unwrap(), c(1.0, 0.0));
        assert_eq!(expectation(&x, &zero).unwrap(), c(0.0, 0.0));
        assert!(expectation(&z, &StateVector::basis(2, 0)).is_err());
        assert!(apply(&z, &StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn number_operator_sector() {
        let n = number_operator::<f64>(2);
        let spec = exact_eigenstates(&n, Sector::particles(1)).unwrap();
        assert_eq!(spec.len(), 2);
        for l in spec.levels() {
            assert!((l.energy - 1.0).abs() < 1e-12);
        }
        // spans {|01>, |10>}: canonical basis returns the basis states
        assert!((spec.levels()[0].state.fidelity(&StateVector::basis(2, 1)) - 1.0).abs() < 1e-12);
        assert!((spec.levels()[1].state.fidelity(&StateVector::basis(2, 2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sector_is_vacuum() {
        let h = Op::from_labels(
            2,
            &[("II", c(0.3, 0.0)), ("ZI", c(0.2, 0.0)), ("IZ", c(-0.7, 0.0))],
        );
        let spec = exact_eigenstates(&h, Sector::particles(0)).unwrap();
        assert_eq!(spec.len(), 1);
        let vac = StateVector::basis(2, 0);
        assert!((spec.levels()[0].state.fidelity(&vac) - 1.0).abs() < 1e-12);
        let e = expectation(&h, &vac).unwrap().re;
        assert!((spec.levels()[0].energy - e).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_impossible_sectors() {
        let h = Op::from_labels(1, &[("X", c(0.0, 1.0))]);
        assert!(matches!(
            exact_eigenstates(&h, Sector::particles(0)),
            Err(Error::NonHermitianInput(_))
        ));
        let h = Op::identity(2);
        assert!(matches!(
            exact_eigenstates(&h, Sector::particles(3)),
            Err(Error::EmptySector(_))
        ));
        assert!(matches!(
            exact_eigenstates(&h, Sector::with_sz(1, 3.0)),
            Err(Error::EmptySector(_))
        ));
    }

    #[test]
    fn normalization_and_phase() {
        let s: StateVector<f64> = StateVector::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.n_qubits(), 1);
        assert!(StateVector::<f64>::normalized(vec![c(1.0, 0.0); 3]).is_err());
        let rotated = s.with_global_phase(c(0.0, 1.0));
        assert!((rotated.fidelity(&s) - 1.0).abs() < 1e-15);
    }
}

use std::collections::BTreeMap;
use std::fmt;

use super::pauli::{Pauli, PauliOperator, PauliString, PRUNE_TOLERANCE};
use crate::error::{Error, Result};
use crate::scalar::{c, cabs, cone, cr, Real, C};

/// One creation (`dagger`) or annihilation operator on a spin orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// Product of ladder operators with a coefficient. An empty product is the
/// identity.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm<T: Real> {
    pub coeff: C<T>,
    pub factors: Vec<Ladder>,
}

/// Sum of ladder-operator products, as written (no normal ordering).
/// Identical factor sequences are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator<T: Real> {
    terms: BTreeMap<Vec<Ladder>, C<T>>,
}

impl<T: Real> Default for FermionOperator<T> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<T: Real> FermionOperator<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: C<T>) -> Self {
        Self::from_term(coeff, Vec::new())
    }

    pub fn from_term(coeff: C<T>, factors: Vec<Ladder>) -> Self {
        let mut op = Self::zero();
        op.push(coeff, factors);
        op
    }

    /// `a_p† a_q`.
    pub fn hopping(p: usize, q: usize) -> Self {
        Self::from_term(cone(), vec![Ladder::create(p), Ladder::annihilate(q)])
    }

    /// `a_p†`.
    pub fn creation(p: usize) -> Self {
        Self::from_term(cone(), vec![Ladder::create(p)])
    }

    /// `a_p`.
    pub fn annihilation(p: usize) -> Self {
        Self::from_term(cone(), vec![Ladder::annihilate(p)])
    }

    /// Appends a term, merging with an identical factor sequence.
    pub fn push(&mut self, coeff: C<T>, factors: Vec<Ladder>) {
        let tol = T::lit(PRUNE_TOLERANCE);
        let entry = self.terms.entry(factors).or_insert_with(crate::scalar::czero);
        *entry += coeff;
        if cabs(*entry) < tol {
            self.terms.retain(|_, c| cabs(*c) >= tol);
        }
    }

    pub fn terms(&self) -> Vec<FermionTerm<T>> {
        self.terms
            .iter()
            .map(|(f, c)| FermionTerm {
                coeff: *c,
                factors: f.clone(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest spin-orbital index plus one (0 for a scalar operator).
    pub fn mode_count(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|f| f.iter().map(|l| l.mode + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.push(*c, f.clone());
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = Self::zero();
        for (f, c) in &self.terms {
            out.push(*c * s, f.clone());
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                out.push(*ca * *cb, f);
            }
        }
        out
    }

    /// Reverses each product, swaps creation and annihilation and conjugates
    /// the coefficient.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (factors, coeff) in &self.terms {
            let f = factors
                .iter()
                .rev()
                .map(|l| Ladder {
                    mode: l.mode,
                    dagger: !l.dagger,
                })
                .collect();
            out.push(coeff.conj(), f);
        }
        out
    }
}

impl<T: Real> fmt::Display for FermionOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (factors, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({} {:+}i)", coeff.re, coeff.im)?;
            for l in factors {
                write!(f, " a{}{}", l.mode, if l.dagger { "^" } else { "" })?;
            }
        }
        Ok(())
    }
}

/// Jordan–Wigner image of one ladder operator:
/// `a_p = Z_0 … Z_{p−1} (X_p + iY_p)/2`, `a_p† = Z_0 … Z_{p−1} (X_p − iY_p)/2`.
pub fn ladder_to_pauli<T: Real>(l: Ladder, n_qubits: usize) -> Result<PauliOperator<T>> {
    if l.mode >= n_qubits {
        return Err(Error::IndexOutOfRange {
            index: l.mode,
            limit: n_qubits,
            context: "Jordan-Wigner register".into(),
        });
    }
    let mut xs = PauliString::identity(n_qubits);
    for j in 0..l.mode {
        xs.set(j, Pauli::Z);
    }
    let mut ys = xs;
    xs.set(l.mode, Pauli::X);
    ys.set(l.mode, Pauli::Y);
    let half = T::lit(0.5);
    let y_coeff = if l.dagger { c(T::zero(), -half) } else { c(T::zero(), half) };
    let mut op = PauliOperator::term(xs, cr(half));
    op = op.add(&PauliOperator::term(ys, y_coeff))?;
    Ok(op)
}

/// Maps a fermionic operator onto `n_qubits` qubits.
pub fn jordan_wigner<T: Real>(op: &FermionOperator<T>, n_qubits: usize) -> Result<PauliOperator<T>> {
    let mut total = PauliOperator::zero(n_qubits);
    for (factors, &coeff) in &op.terms {
        let mut prod = PauliOperator::term(PauliString::identity(n_qubits), coeff);
        for &l in factors {
            prod = prod.multiply(&ladder_to_pauli(l, n_qubits)?)?;
        }
        total = total.add(&prod)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn number_operator_single_qubit() {
        let n = jordan_wigner(&FermionOperator::<f64>::hopping(0, 0), 1).unwrap();
        let expect = PauliOperator::from_labels(1, &[("I", c(0.5, 0.0)), ("Z", c(-0.5, 0.0))]);
        assert_eq!(n, expect);
    }

    #[test]
    fn lowest_mode_creation_has_no_tail() {
        let a = jordan_wigner(&FermionOperator::<f64>::creation(0), 2).unwrap();
        let expect = PauliOperator::from_labels(2, &[("IX", c(0.5, 0.0)), ("IY", c(0.0, -0.5))]);
        assert_eq!(a, expect);
    }

    #[test]
    fn z_string_on_higher_modes() {
        let a = jordan_wigner(&FermionOperator::<f64>::annihilation(2), 3).unwrap();
        let expect = PauliOperator::from_labels(3, &[("XZZ", c(0.5, 0.0)), ("YZZ", c(0.0, 0.5))]);
        assert_eq!(a, expect);
    }

    #[test]
    fn out_of_range_mode() {
        let err = jordan_wigner(&FermionOperator::<f64>::creation(4), 4).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 4, limit: 4, .. }));
    }

    #[test]
    fn adjoint_reverses_products() {
        let op = FermionOperator::<f64>::from_term(
            c(1.0, 2.0),
            vec![Ladder::create(3), Ladder::create(2), Ladder::annihilate(0)],
        );
        let adj = op.adjoint();
        assert_eq!(adj.terms()[0].coeff, c(1.0, -2.0));
        assert_eq!(
            adj.terms()[0].factors,
            vec![Ladder::create(0), Ladder::annihilate(2), Ladder::annihilate(3)]
        );
        let p = jordan_wigner(&op, 4).unwrap();
        assert_eq!(jordan_wigner(&adj, 4).unwrap(), p.adjoint());
    }

    #[test]
    fn pauli_exclusion() {
        let aa = FermionOperator::<f64>::creation(1).multiply(&FermionOperator::creation(1));
        assert!(jordan_wigner(&aa, 2).unwrap().is_empty());
    }
}

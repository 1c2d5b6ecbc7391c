use crate::operators::{jordan_wigner, spin_orbital, FermionOperator, Ladder, PauliOperator};
use crate::scalar::{cone, Real};

/// One excitation operator `a_m† a_i` or `a_m† a_n† a_j a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Excitation<T: Real> {
    /// 1 for singles, 2 for doubles.
    pub order: u8,
    /// Annihilated spin orbitals `[i]` or `[i, j]`.
    pub occupied: Vec<usize>,
    /// Created spin orbitals `[m]` or `[m, n]`.
    pub virtuals: Vec<usize>,
    pub fermion: FermionOperator<T>,
    pub pauli: PauliOperator<T>,
}

/// Spin-conserving singles followed by doubles over a closed-shell
/// reference with `n_occ` doubly occupied and `n_virt` empty spatial
/// orbitals (blocked spin ordering).
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationBasis<T: Real> {
    n_qubits: usize,
    entries: Vec<Excitation<T>>,
}

impl<T: Real> ExcitationBasis<T> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &[Excitation<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn singles(&self) -> usize {
        self.entries.iter().filter(|e| e.order == 1).count()
    }

    pub fn doubles(&self) -> usize {
        self.entries.iter().filter(|e| e.order == 2).count()
    }

    /// Mapped excitation operators in basis order.
    pub fn operators(&self) -> impl Iterator<Item = &PauliOperator<T>> {
        self.entries.iter().map(|e| &e.pauli)
    }
}

/// Expected basis size for `o` occupied and `v` virtual spatial orbitals.
pub fn basis_size(o: usize, v: usize) -> usize {
    let pairs = |k: usize| k * k.saturating_sub(1) / 2;
    2 * o * v + o * o * v * v + 2 * pairs(o) * pairs(v)
}

pub fn generate_excitation_basis<T: Real>(n_occ: usize, n_virt: usize) -> ExcitationBasis<T> {
    let n = n_occ + n_virt;
    let n_qubits = 2 * n;
    let occ = 0..n_occ;
    let virt = n_occ..n;
    let so = |p: usize, beta: bool| spin_orbital(p, beta, n);

    let mut raw: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for beta in [false, true] {
        for i in occ.clone() {
            for m in virt.clone() {
                raw.push((vec![so(i, beta)], vec![so(m, beta)]));
            }
        }
    }
    // opposite spin: i, m alpha; j, n beta
    for i in occ.clone() {
        for j in occ.clone() {
            for m in virt.clone() {
                for nn in virt.clone() {
                    raw.push((vec![so(i, false), so(j, true)], vec![so(m, false), so(nn, true)]));
                }
            }
        }
    }
    for beta in [false, true] {
        for i in occ.clone() {
            for j in (i + 1)..n_occ {
                for m in virt.clone() {
                    for nn in (m + 1)..n {
                        raw.push((vec![so(i, beta), so(j, beta)], vec![so(m, beta), so(nn, beta)]));
                    }
                }
            }
        }
    }

    let entries = raw
        .into_iter()
        .map(|(occupied, virtuals)| {
            let mut factors: Vec<Ladder> = virtuals.iter().map(|&p| Ladder::create(p)).collect();
            factors.extend(occupied.iter().rev().map(|&p| Ladder::annihilate(p)));
            let fermion = FermionOperator::from_term(cone(), factors);
            let pauli = jordan_wigner(&fermion, n_qubits).expect("modes within register");
            Excitation {
                order: occupied.len() as u8,
                occupied,
                virtuals,
                fermion,
                pauli,
            }
        })
        .collect();
    ExcitationBasis { n_qubits, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_closed_form() {
        for (o, v) in [(1, 1), (2, 2), (1, 3), (3, 2), (2, 0), (0, 2)] {
            let b = generate_excitation_basis::<f64>(o, v);
            assert_eq!(b.len(), basis_size(o, v), "o={o} v={v}");
        }
        let b = generate_excitation_basis::<f64>(1, 1);
        assert_eq!((b.singles(), b.doubles()), (2, 1));
        let b = generate_excitation_basis::<f64>(2, 2);
        assert_eq!((b.singles(), b.doubles()), (8, 18));
    }

    #[test]
    fn spin_conserving_and_unique() {
        let b = generate_excitation_basis::<f64>(2, 2);
        let n = 4;
        let mut seen = std::collections::BTreeSet::new();
        for e in b.entries() {
            let up = |v: &[usize]| v.iter().filter(|&&p| p < n).count();
            assert_eq!(up(&e.occupied), up(&e.virtuals));
            assert!(seen.insert((e.occupied.clone(), e.virtuals.clone())));
            assert!(!e.pauli.is_empty());
        }
        let orders: Vec<u8> = b.entries().iter().map(|e| e.order).collect();
        assert!(orders.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn no_virtuals_no_basis() {
        assert!(generate_excitation_basis::<f64>(2, 0).is_empty());
    }
}

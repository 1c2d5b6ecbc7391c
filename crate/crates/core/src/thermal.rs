//! Gibbs states, trace distance and thermal energies.

use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, norm, singular_values, CMatrix};
use crate::operators::PauliOperator;
use crate::scalar::{cr, czero, Real, C};
use crate::simulator::{apply_amplitudes, Spectrum, StateVector};

/// Dense density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Checks Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let tol = T::lit(1e-10);
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.rows(),
                right: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > tol {
            return Err(Error::NonHermitianInput(herm.to_f64_lossy()));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::invalid("density matrix", format!("trace {tr}")));
        }
        let lowest = eigh(&matrix).values.first().copied().unwrap_or(T::zero());
        if lowest < -tol {
            return Err(Error::invalid("density matrix", format!("eigenvalue {lowest}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(psi: &StateVector<T>) -> Self {
        let a = psi.amplitudes();
        Self {
            matrix: CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj()),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &CMatrix<T>) -> Self {
        Self {
            matrix: &(u * &self.matrix) * &u.adjoint(),
        }
    }
}

/// Normalized Boltzmann weights `e^{−β(E_n−E_min)} / Z`.
pub fn boltzmann_weights<T: Real>(energies: &[T], beta: T) -> Result<Vec<T>> {
    if energies.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if !(beta > T::zero()) {
        return Err(Error::invalid("beta", "must be positive"));
    }
    let e_min = energies.iter().copied().fold(T::infinity(), T::min);
    let w: Vec<T> = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
    let z: T = w.iter().copied().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// `Σ_n e^{−β(E_n−E_min)} |n⟩⟨n| / Z`.
pub fn gibbs_state<T: Real>(spec: &Spectrum<T>, beta: T) -> Result<DensityMatrix<T>> {
    Ok(GibbsEnsemble::new(spec, beta)?.to_density_matrix())
}

/// `½ Σ σ_k(ρ − σ)`.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let diff = &rho.matrix - &sigma.matrix;
    Ok(singular_values(&diff).into_iter().sum::<T>() * T::lit(0.5))
}

/// `Tr[ρH]`.
pub fn average_energy<T: Real>(rho: &DensityMatrix<T>, h: &PauliOperator<T>) -> Result<T> {
    let dim = 1usize << h.n_qubits();
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: dim,
        });
    }
    let mut acc = czero::<T>();
    for (s, &coeff) in h.terms() {
        for b in 0..dim {
            let (ph, out) = s.apply_to_basis::<T>(b as u64);
            // Tr[ρP] = Σ_b ⟨b|ρ P|b⟩ = Σ_b ρ[b, P(b)] · phase
            acc += coeff * ph * rho.matrix[(b, out as usize)];
        }
    }
    Ok(acc.re)
}

/// Gibbs state kept as weights over orthonormal states. Trace distances
/// between two ensembles are computed in the span of their states, which
/// holds `ρ − σ` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsEnsemble<T: Real> {
    weights: Vec<T>,
    states: Vec<Vec<C<T>>>,
}

impl<T: Real> GibbsEnsemble<T> {
    pub fn new(spec: &Spectrum<T>, beta: T) -> Result<Self> {
        let weights = boltzmann_weights(&spec.energies(), beta)?;
        Ok(Self {
            weights,
            states: spec
                .levels()
                .iter()
                .map(|l| l.state.amplitudes().to_vec())
                .collect(),
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn to_density_matrix(&self) -> DensityMatrix<T> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, v) in self.weights.iter().zip(&self.states) {
            for i in 0..d {
                let vi = v[i] * *w;
                for j in 0..d {
                    m[(i, j)] += vi * v[j].conj();
                }
            }
        }
        DensityMatrix { matrix: m }
    }

    /// `Σ_n w_n ⟨n|H|n⟩`.
    pub fn energy(&self, h: &PauliOperator<T>) -> Result<T> {
        let mut e = T::zero();
        for (w, v) in self.weights.iter().zip(&self.states) {
            let hv = apply_amplitudes(h, h.n_qubits(), v)?;
            e += *w * inner(v, &hv).re;
        }
        Ok(e)
    }

    /// Trace distance to another ensemble on the same register.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let basis = orthonormal_span(self.states.iter().chain(&other.states));
        let k = basis.len();
        // coordinates of every state in the span basis
        let coords = |states: &[Vec<C<T>>]| -> Vec<Vec<C<T>>> {
            states
                .iter()
                .map(|v| basis.iter().map(|b| inner(b, v)).collect())
                .collect()
        };
        let a = coords(&self.states);
        let b = coords(&other.states);
        let mut diff = CMatrix::<T>::zeros(k, k);
        for (sign, ws, cs) in [
            (T::one(), &self.weights, &a),
            (-T::one(), &other.weights, &b),
        ] {
            for (w, c) in ws.iter().zip(cs) {
                let f = cr(*w * sign);
                for i in 0..k {
                    let ci = c[i] * f;
                    for j in 0..k {
                        diff[(i, j)] += ci * c[j].conj();
                    }
                }
            }
        }
        let eg = eigh(&diff.hermitian_part());
        Ok(eg.values.iter().map(|v| v.abs()).sum::<T>() * T::lit(0.5))
    }
}

fn orthonormal_span<'a, T: Real + 'a>(vectors: impl Iterator<Item = &'a Vec<C<T>>>) -> Vec<Vec<C<T>>> {
    let tol = T::lit(1e-10);
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = inner(b, &w);
                for (o, &x) in w.iter_mut().zip(b) {
                    *o -= x * p;
                }
            }
        }
        let n = norm(&w);
        if n > tol {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::simulator::Level;

    fn two_level(e0: f64, e1: f64) -> Spectrum<f64> {
        Spectrum::new(vec![
            Level {
                energy: e0,
                state: StateVector::basis(1, 0),
            },
            Level {
                energy: e1,
                state: StateVector::basis(1, 1),
            },
        ])
    }

    #[test]
    fn closed_form_weights() {
        let rho = gibbs_state(&two_level(0.0, 1.0), 1.0).unwrap();
        let z = 1.0 + (-1.0f64).exp();
        assert!((rho.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - (-1.0f64).exp() / z).abs() < 1e-15);
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn zero_temperature_and_degenerate_limits() {
        let rho = gibbs_state(&two_level(-1.0, -0.99), 1e6).unwrap();
        let proj = DensityMatrix::pure(&StateVector::basis(1, 0));
        assert!(rho.matrix().max_abs_diff(proj.matrix()) < 1e-10);
        let rho = gibbs_state(&two_level(0.3, 0.3), 7.0).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            gibbs_state(&Spectrum::<f64>::new(Vec::new()), 1.0),
            Err(Error::EmptySpectrum)
        ));
        let a = DensityMatrix::pure(&StateVector::<f64>::basis(1, 0));
        let b = DensityMatrix::pure(&StateVector::<f64>::basis(2, 0));
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(average_energy(&a, &PauliOperator::identity(2)).is_err());
    }

    #[test]
    fn distances_and_energies() {
        let a = DensityMatrix::pure(&StateVector::<f64>::basis(1, 0));
        let b = DensityMatrix::pure(&StateVector::<f64>::basis(1, 1));
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-15);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let h = PauliOperator::from_labels(1, &[("I", c(0.5, 0.0)), ("Z", c(-0.5, 0.0))]);
        assert!(average_energy(&a, &h).unwrap().abs() < 1e-15);
        let mixed = gibbs_state(&two_level(0.0, 0.0), 1.0).unwrap();
        assert!((average_energy(&mixed, &h).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ensemble_route_matches_dense() {
        let plus: StateVector<f64> = StateVector::normalized(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)])
            .unwrap();
        let minus = StateVector::normalized(vec![c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let a = Spectrum::new(vec![
            Level { energy: 0.0, state: StateVector::basis(2, 0) },
            Level { energy: 0.4, state: StateVector::basis(2, 3) },
        ]);
        let b = Spectrum::new(vec![
            Level { energy: -0.1, state: plus },
            Level { energy: 0.2, state: minus },
        ]);
        let (ea, eb) = (GibbsEnsemble::new(&a, 2.0).unwrap(), GibbsEnsemble::new(&b, 2.0).unwrap());
        let dense = trace_distance(&ea.to_density_matrix(), &eb.to_density_matrix()).unwrap();
        assert!((ea.trace_distance(&eb).unwrap() - dense).abs() < 1e-12);
        let h = PauliOperator::from_labels(2, &[("XZ", c(0.3, 0.0)), ("ZI", c(-0.7, 0.0))]);
        let direct = average_energy(&eb.to_density_matrix(), &h).unwrap();
        assert!((eb.energy(&h).unwrap() - direct).abs() < 1e-12);
    }
}

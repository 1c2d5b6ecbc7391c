use super::table::EomMatrices;
use crate::error::{Error, Result};
use crate::linalg::{eig, eigh, inner, norm, CMatrix};
use crate::scalar::{cr, czero, phase, Real, C};

/// Default threshold below which metric eigendirections are dropped.
pub const DEFAULT_ETA: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GepOptions {
    /// Metric eigenvalues with modulus below `eta` are discarded.
    pub eta: f64,
    /// Largest accepted imaginary part of an excitation energy.
    pub imag_tolerance: f64,
    /// Smallest accepted excitation energy.
    pub min_energy: f64,
    /// Retained metric condition numbers above this raise the flag.
    pub max_condition: f64,
}

impl Default for GepOptions {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            imag_tolerance: 1e-6,
            min_energy: 1e-8,
            max_condition: 1e10,
        }
    }
}

impl GepOptions {
    pub fn with_eta(eta: f64) -> Self {
        Self {
            eta,
            ..Self::default()
        }
    }
}

/// One root `E_0n` with its amplitudes on `E` (`x`) and `E†` (`y`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationRoot<T: Real> {
    pub energy: T,
    pub x: Vec<C<T>>,
    pub y: Vec<C<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EomSolution<T: Real> {
    /// Accepted roots, ascending in energy.
    pub excitations: Vec<ExcitationRoot<T>>,
    /// Basis size `D`.
    pub dim: usize,
    /// Metric directions kept out of `2D`.
    pub retained: usize,
    /// Ratio of largest to smallest retained metric eigenvalue modulus.
    pub condition_number: T,
    pub ill_conditioned: bool,
    /// Eigenvalues of the reduced problem, before filtering.
    pub all_roots: Vec<C<T>>,
}

impl<T: Real> EomSolution<T> {
    pub fn energies(&self) -> Vec<T> {
        self.excitations.iter().map(|r| r.energy).collect()
    }
}

/// Full `2D × 2D` pencil `[[M, Q], [Q*, M*]] z = E [[V, W], [−W*, −V*]] z`.
pub fn eom_pencil<T: Real>(mats: &EomMatrices<T>) -> (CMatrix<T>, CMatrix<T>) {
    let d = mats.dim();
    let block = |a: &CMatrix<T>, b: &CMatrix<T>, c: &CMatrix<T>, e: &CMatrix<T>| {
        CMatrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - d)],
            (false, true) => c[(i - d, j)],
            (false, false) => e[(i - d, j - d)],
        })
    };
    let neg = cr(-T::one());
    let lhs = block(&mats.m, &mats.q, &mats.q.conj(), &mats.m.conj());
    let rhs = block(
        &mats.v,
        &mats.w,
        &mats.w.conj().scale(neg),
        &mats.v.conj().scale(neg),
    );
    (lhs, rhs)
}

/// Solves the EOM pencil by canonical orthogonalization of the Hermitian
/// part of the metric, then an ordinary eigenproblem in the retained
/// space.
///
/// Roots are kept when real within `imag_tolerance` and above
/// `min_energy`. Each `(x, y)` is scaled to unit metric norm
/// `x†Vx − y†Vy = 1` when that norm is positive, and to unit length
/// otherwise.
pub fn solve_gep<T: Real>(mats: &EomMatrices<T>, opts: &GepOptions) -> Result<EomSolution<T>> {
    let d = mats.dim();
    if d == 0 {
        return Ok(EomSolution {
            excitations: Vec::new(),
            dim: 0,
            retained: 0,
            condition_number: T::one(),
            ill_conditioned: false,
            all_roots: Vec::new(),
        });
    }
    let (a, b) = eom_pencil(mats);
    let metric = eigh(&b.hermitian_part());
    let eta = T::lit(opts.eta);
    let keep: Vec<usize> = (0..2 * d)
        .filter(|&k| metric.values[k].abs() >= eta)
        .collect();
    if keep.is_empty() {
        let largest = metric
            .values
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()));
        return Err(Error::SingularMetric(largest.to_f64_lossy()));
    }
    let moduli: Vec<T> = keep.iter().map(|&k| metric.values[k].abs()).collect();
    let hi = moduli.iter().copied().fold(T::zero(), T::max);
    let lo = moduli.iter().copied().fold(T::infinity(), T::min);
    let condition_number = hi / lo;

    let k = keep.len();
    let signs: Vec<T> = keep.iter().map(|&j| metric.values[j].signum()).collect();
    let x = CMatrix::from_fn(2 * d, k, |i, j| {
        metric.vectors[(i, keep[j])] / metric.values[keep[j]].abs().sqrt()
    });
    let xa = &(&x.adjoint() * &a) * &x;
    let reduced = CMatrix::from_fn(k, k, |i, j| xa[(i, j)] * signs[i]);
    let eg = eig(&reduced);

    let imag_tol = T::lit(opts.imag_tolerance);
    let min_e = T::lit(opts.min_energy);
    let mut excitations = Vec::new();
    for (val, col) in eg.values.iter().zip(0..k) {
        if val.im.abs() >= imag_tol || val.re <= min_e {
            continue;
        }
        let yv = eg.vectors.column(col);
        let z = x.matvec(&yv);
        let bz = b.matvec(&z);
        let metric_norm = inner(&z, &bz).re;
        let scale = if metric_norm > T::zero() {
            metric_norm.sqrt()
        } else {
            norm(&z)
        };
        let pivot = z
            .iter()
            .enumerate()
            .fold((0, T::zero()), |acc, (i, v)| {
                let m = v.norm_sqr();
                if m > acc.1 {
                    (i, m)
                } else {
                    acc
                }
            })
            .0;
        let ph = if z[pivot] == czero() {
            cr(T::one())
        } else {
            phase(z[pivot]).conj()
        };
        let z: Vec<C<T>> = z.into_iter().map(|v| v * ph / scale).collect();
        excitations.push(ExcitationRoot {
            energy: val.re,
            x: z[..d].to_vec(),
            y: z[d..].to_vec(),
        });
    }
    excitations.sort_by(|p, q| p.energy.partial_cmp(&q.energy).expect("finite energies"));
    Ok(EomSolution {
        excitations,
        dim: d,
        retained: k,
        condition_number,
        ill_conditioned: condition_number > T::lit(opts.max_condition),
        all_roots: eg.values,
    })
}

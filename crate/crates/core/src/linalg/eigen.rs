//! Dense eigensolvers.
//!
//! `eigh` handles Hermitian matrices by Householder reduction to a real
//! tridiagonal form followed by implicit QL iterations. `eig` handles
//! general complex matrices through a Hessenberg reduction and shifted QR
//! to Schur form; eigenvectors come from back substitution on the
//! triangular factor.

use super::matrix::{norm, CMatrix};
use crate::scalar::{cabs, cone, cr, czero, phase, Real, C};

/// Eigenpairs of a Hermitian matrix. Values ascend; `vectors` holds the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Eigenpairs of a general complex matrix, unordered.
#[derive(Clone, Debug)]
pub struct ComplexEigen<T: Real> {
    pub values: Vec<C<T>>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: CMatrix<T>,
}

/// Hermitian eigendecomposition. Only the Hermitian part of `a` is used.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let mut h = a.hermitian_part();
    let mut q = CMatrix::<T>::identity(n);
    let two = T::lit(2.0);

    let mut v = vec![czero::<T>(); n];
    let mut p = vec![czero::<T>(); n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n)
            .map(|i| h[(i, k)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = -phase(h[(k + 1, k)]) * xnorm;
        for i in 0..n {
            v[i] = if i > k { h[(i, k)] } else { czero() };
        }
        v[k + 1] -= alpha;
        let vn = norm(&v[k + 1..]);
        if vn <= T::min_positive_value() {
            continue;
        }
        for x in v[k + 1..].iter_mut() {
            *x = *x / vn;
        }
        // p = H v on the trailing block, then w = p - (v'p) v
        for i in k + 1..n {
            p[i] = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
        }
        let kk: C<T> = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        for i in k + 1..n {
            p[i] -= v[i] * kk;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = (v[i] * p[j].conj() + p[i] * v[j].conj()) * two;
                h[(i, j)] -= upd;
            }
        }
        h[(k + 1, k)] = alpha;
        h[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            h[(i, k)] = czero();
            h[(k, i)] = czero();
        }
        for r in 0..n {
            let s: C<T> = (k + 1..n).map(|l| q[(r, l)] * v[l]).sum();
            for j in k + 1..n {
                let upd = s * v[j].conj() * two;
                q[(r, j)] -= upd;
            }
        }
    }

    // Rotate the complex off-diagonal into a real non-negative one.
    let mut d: Vec<T> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut ph = cone::<T>();
    for k in 0..n {
        if k > 0 {
            let off = h[(k, k - 1)];
            e[k - 1] = cabs(off);
            ph = ph * phase(off);
            for r in 0..n {
                q[(r, k)] = q[(r, k)] * ph;
            }
        }
    }

    tridiagonal_ql(&mut d, &mut e, &mut q);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e[0..n-1]`. The rotations are accumulated into the columns
/// of `z`.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut CMatrix<T>) {
    let n = d.len();
    if n < 2 {
        return;
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    // absolute floor so couplings between (near-)zero diagonals deflate
    let anorm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(T::zero(), T::max);
    let floor = eps * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.rows() {
                    let zf = z[(k, i + 1)];
                    let zi = z[(k, i)];
                    z[(k, i + 1)] = zi * s + zf * c;
                    z[(k, i)] = zi * c - zf * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

/// Eigendecomposition of a general complex square matrix.
pub fn eig<T: Real>(a: &CMatrix<T>) -> ComplexEigen<T> {
    assert!(a.is_square(), "eig needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return ComplexEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let (mut h, mut z) = hessenberg(a);
    schur_in_place(&mut h, &mut z);
    let values: Vec<C<T>> = (0..n).map(|i| h[(i, i)]).collect();

    let scale = h.max_abs().max(T::min_positive_value());
    let small = T::epsilon() * scale;
    let mut vectors = CMatrix::zeros(n, n);
    let mut y = vec![czero::<T>(); n];
    for k in 0..n {
        for x in y.iter_mut() {
            *x = czero();
        }
        y[k] = cone();
        let lambda = h[(k, k)];
        for i in (0..k).rev() {
            let s: C<T> = (i + 1..=k).map(|j| h[(i, j)] * y[j]).sum();
            let mut den = h[(i, i)] - lambda;
            if cabs(den) < small {
                den = cr(small);
            }
            y[i] = -s / den;
        }
        let x = z.matvec(&y);
        let nx = norm(&x);
        let col: Vec<C<T>> = x.iter().map(|&v| v / nx).collect();
        vectors.set_column(k, &col);
    }
    ComplexEigen { values, vectors }
}

fn hessenberg<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    let two = T::lit(2.0);
    let mut v = vec![czero::<T>(); n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n)
            .map(|i| h[(i, k)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = -phase(h[(k + 1, k)]) * xnorm;
        for i in 0..n {
            v[i] = if i > k { h[(i, k)] } else { czero() };
        }
        v[k + 1] -= alpha;
        let vn = norm(&v[k + 1..]);
        if vn <= T::min_positive_value() {
            continue;
        }
        for x in v[k + 1..].iter_mut() {
            *x = *x / vn;
        }
        // H <- (I - 2vv') H
        for j in 0..n {
            let s: C<T> = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                let upd = v[i] * s * two;
                h[(i, j)] -= upd;
            }
        }
        // H <- H (I - 2vv'), Q <- Q (I - 2vv')
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let s: C<T> = (k + 1..n).map(|l| m[(r, l)] * v[l]).sum();
                for j in k + 1..n {
                    let upd = s * v[j].conj() * two;
                    m[(r, j)] -= upd;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Shifted QR iterations reducing Hessenberg `h` to upper-triangular Schur
/// form; the unitary similarity is accumulated into `z`.
fn schur_in_place<T: Real>(h: &mut CMatrix<T>, z: &mut CMatrix<T>) {
    let n = h.rows();
    let eps = T::epsilon();
    let half = T::lit(0.5);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rots: Vec<(C<T>, C<T>)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let scale = cabs(h[(lo - 1, lo - 1)]) + cabs(h[(lo, lo)]);
            let scale = if scale == T::zero() { h.max_abs() } else { scale };
            if cabs(h[(lo, lo - 1)]) <= eps * scale {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        assert!(iter < 60 * n.max(10), "complex QR failed to converge");

        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            d + cr(cabs(c) * T::lit(0.75))
        } else {
            let mid = (a + d) * half;
            let disc = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
            let l1 = mid + disc;
            let l2 = mid - disc;
            if cabs(l1 - d) <= cabs(l2 - d) {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        rots.clear();
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cc, ss) = if r == T::zero() {
                (cone(), czero())
            } else {
                (x / r, y / r)
            };
            for j in k..n {
                let u = h[(k, j)];
                let w = h[(k + 1, j)];
                h[(k, j)] = cc.conj() * u + ss.conj() * w;
                h[(k + 1, j)] = -ss * u + cc * w;
            }
            rots.push((cc, ss));
        }
        for (off, &(cc, ss)) in rots.iter().enumerate() {
            let k = lo + off;
            for i in 0..=(k + 1).min(hi) {
                let u = h[(i, k)];
                let w = h[(i, k + 1)];
                h[(i, k)] = u * cc + w * ss;
                h[(i, k + 1)] = -u * ss.conj() + w * cc.conj();
            }
            for i in 0..n {
                let u = z[(i, k)];
                let w = z[(i, k + 1)];
                z[(i, k)] = u * cc + w * ss;
                z[(i, k + 1)] = -u * ss.conj() + w * cc.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn eigh_residuals_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3, 7, 20] {
            let a = random_matrix(n, &mut rng).hermitian_part();
            let eg = eigh(&a);
            for k in 0..n {
                let v = eg.vectors.column(k);
                let av = a.matvec(&v);
                let res: f64 = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * eg.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-12, "n={n} k={k} residual {res}");
            }
            let g = &eg.vectors.adjoint() * &eg.vectors;
            assert!(g.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
            assert!(eg.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_degenerate_spectrum() {
        let a = CMatrix::<f64>::diag_real(&[1.0, 1.0, 1.0, -2.0]);
        let eg = eigh(&a);
        assert_eq!(eg.values, vec![-2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_residuals_on_general_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 5, 12, 40] {
            let a = random_matrix(n, &mut rng);
            let eg = eig(&a);
            for k in 0..n {
                let v = eg.vectors.column(k);
                let av = a.matvec(&v);
                let res: f64 = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * eg.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-10, "n={n} k={k} residual {res}");
            }
            let trace: C<f64> = eg.values.iter().sum();
            assert!((trace - a.trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn eig_real_spectrum_of_pencil_like_matrix() {
        // diag(1,-1) * Hermitian positive matrix has real +-pairs
        let m = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.0)],
            vec![c(0.3, 0.0), c(2.0, 0.0)],
        ]);
        let j = CMatrix::diag_real(&[1.0, -1.0]);
        let eg = eig(&(&j * &m));
        let mut re: Vec<f64> = eg.values.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let expected = (4.0f64 - 0.09).sqrt();
        assert!((re[1] - expected).abs() < 1e-12);
        assert!((re[0] + expected).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let a = CMatrix::<f32>::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ]);
        let eg = eigh(&a);
        assert!((eg.values[0] - 1.0).abs() < 1e-5);
        assert!((eg.values[1] - 3.0).abs() < 1e-5);
    }
}

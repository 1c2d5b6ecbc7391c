use super::matrix::CMatrix;
use crate::scalar::{cabs, Real, C};

/// Singular values of `a` (descending) by one-sided Jacobi rotations.
///
/// Small singular values keep full relative accuracy, which matters when
/// two nearly identical density matrices are compared.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    // Work on the wider orientation's transpose so columns are the short side.
    let m = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.adjoint()
    };
    let rows = m.rows();
    let ncols = m.cols();
    let mut cols: Vec<Vec<C<T>>> = (0..ncols).map(|j| m.column(j)).collect();
    let eps = T::epsilon();

    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..ncols {
            for j in i + 1..ncols {
                let alpha: T = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C<T> = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = cabs(gamma);
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                let ph = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                let phc = ph.conj();
                for r in 0..rows {
                    let u = cols[i][r];
                    let w = cols[j][r] * phc;
                    cols[i][r] = u * cs - w * sn;
                    cols[j][r] = u * sn + w * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

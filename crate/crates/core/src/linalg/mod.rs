//! Dense complex linear algebra over any [`Real`](crate::scalar::Real).

mod eigen;
mod matrix;
mod svd;

pub use eigen::{eig, eigh, ComplexEigen, HermitianEigen};
pub use matrix::{inner, norm, CMatrix};
pub use svd::singular_values;

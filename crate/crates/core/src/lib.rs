//! Classical simulation of the quantum equation-of-motion pipeline for
//! molecular thermal states, with informationally complete measurement
//! sampling.
//!
//! The numerical core is generic over the real type ([`scalar::Real`],
//! implemented for `f32` and `f64`); the aliases below fix it to `f64`,
//! the precision used by the pipeline.

pub mod eom;
pub mod error;
pub mod groundstate;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod pipeline;
pub mod povm;
pub mod scalar;
pub mod simulator;
pub mod stats;
pub mod thermal;

pub use error::{Error, Result};

pub type PauliOp64 = operators::PauliOperator<f64>;
pub type PauliOp32 = operators::PauliOperator<f32>;
pub type FermionOp64 = operators::FermionOperator<f64>;
pub type StateVec64 = simulator::StateVector<f64>;
pub type StateVec32 = simulator::StateVector<f32>;
pub type Spectrum64 = simulator::Spectrum<f64>;
pub type Basis64 = eom::ExcitationBasis<f64>;
pub type Matrices64 = eom::EomMatrices<f64>;
pub type Solution64 = eom::EomSolution<f64>;
pub type Povm64 = povm::PovmSpec<f64>;
pub type Density64 = thermal::DensityMatrix<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;

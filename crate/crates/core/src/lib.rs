//! Exact evaluation of McLachlan gradients and quantum geometric tensors for
//! Pauli-rotation circuits, by simulating only the light-cone ("bowtie")
//! subcircuits that each matrix element depends on.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod analysis;
pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod hamiltonians;
pub mod lattice;
pub mod lightcone;
pub mod linalg;
pub mod mclachlan;
pub mod overlap;
pub mod pauli;
pub mod scalar;
pub mod skqd;
pub mod statevector;

pub use circuit::{Circuit, Gate};
pub use error::{Error, Result};
pub use lattice::{EdgeColoring, Lattice};
pub use lightcone::{Bowtie, BowtieKind, BowtieSet, LightCone};
pub use mclachlan::{EvolveConfig, Mode, Solver};
pub use pauli::{Angle, CliffordGate, CliffordKind, Pauli, PauliRotation, PauliString, Phase};
pub use scalar::{Cplx, Scalar};

pub type PauliSum = pauli::WeightedPauliSum<f64>;
pub type StateVector = statevector::StateVector<f64>;
pub type GeometricData = mclachlan::GeometricData<f64>;
pub type GeneralizedQGT = mclachlan::GeneralizedQGT<f64>;
pub type Trajectory = mclachlan::Trajectory<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type ParameterVector = Vec<f64>;

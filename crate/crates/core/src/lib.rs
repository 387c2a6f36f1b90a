//! Constrained least-squares energies on regular grids and the classic
//! iterative solvers that minimize them.
//!
//! The pipeline is: [`GridSpec`] + [`ConstraintSet`] → [`LeastSquaresSystem`]
//! (`A x = b`) → [`NormalSystem`] (`A^T A x = A^T b`) → a [`SolveTrace`] from
//! one of [`solvers`]. [`spectral`] holds the dense reference solver and the
//! eigenvalue routines used to check results; [`experiment`] drives the whole
//! thing from a config file and writes CSV/SVG/gnuplot outputs.
//!
//! The numeric core is generic over [`Scalar`] (`f32`, `f64`); the `*64`
//! aliases below are what the CLI and file formats use.

pub mod assembly;
pub mod claims;
pub mod config;
pub mod error;
pub mod experiment;
pub mod export;
pub mod grid;
pub mod plot;
pub mod scalar;
pub mod solvers;
pub mod sparse;
pub mod spectral;

pub use assembly::{
    assemble_energy, assemble_gradient, assemble_laplacian, energy_value, normal_equations, Constraint,
    ConstraintSet, EnergyKind, LeastSquaresSystem, NormalSystem,
};
pub use error::{Error, Result};
pub use grid::{Dim, GridSpec, VertexId};
pub use scalar::Scalar;
pub use solvers::{
    cg_solve, gauss_seidel_solve, jacobi_solve, residual_norm, solve, ssor_solve, RunSettings, Snapshot,
    SolveTrace, SolverKind, Termination,
};
pub use sparse::SparseMatrix;
pub use spectral::{condition_number, dense_solve, densify, support_front, DenseMatrix, SpectrumSummary};

pub type SparseMatrix64 = SparseMatrix<f64>;
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type ConstraintSet64 = ConstraintSet<f64>;
pub type LeastSquaresSystem64 = LeastSquaresSystem<f64>;
pub type NormalSystem64 = NormalSystem<f64>;
pub type RunSettings64 = RunSettings<f64>;
pub type SolveTrace64 = SolveTrace<f64>;

pub type SparseMatrix32 = SparseMatrix<f32>;
pub type NormalSystem32 = NormalSystem<f32>;
pub type SolveTrace32 = SolveTrace<f32>;

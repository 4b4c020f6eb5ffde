//! Kernels of the Schrödinger propagator, the resolvent and the spectral
//! measure of the Laplacian on flat Euclidean cones, with an independent
//! angular mode-sum oracle and a harness for dispersive-bound sweeps.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod selftest;
pub mod special;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

/// Double-precision instantiations of the generic types.
pub type Complex64 = num_complex::Complex64;
pub type ConeAngle64 = geometry::ConeAngle<f64>;
pub type ConePoint64 = geometry::ConePoint<f64>;
pub type KernelValue64 = kernels::KernelValue<f64>;
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
pub type ModeSumConfig64 = oracle::ModeSumConfig<f64>;
pub type SweepGrid64 = harness::SweepGrid<f64>;
pub type AngleGrid64 = harness::AngleGrid<f64>;
pub type PointPair64 = harness::PointPair<f64>;

//! Positive generalised eigenfunctions of `Z^d`-periodic Schrodinger
//! operators on weighted directed graphs.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this file fix the scalar to `f64`/`f32` for
//! the common cases. Integer lattice algebra in [`lattice`] is exact.

pub mod catalog;
pub mod choquet;
pub mod dispersion;
pub mod eigenfunction;
pub mod error;
pub mod floquet;
pub mod graph;
pub mod lattice;
pub mod levelset;
pub mod linalg;
pub mod nnls;
pub mod perron;
pub mod quotient;
pub mod scalar;
pub mod window;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PeriodicGraphF64 = graph::PeriodicGraph<f64>;
pub type PeriodicGraphF32 = graph::PeriodicGraph<f32>;
pub type EigenfunctionF64<'g> = eigenfunction::MultiplicativeEigenfunction<'g, f64>;
pub type EigenfunctionF32<'g> = eigenfunction::MultiplicativeEigenfunction<'g, f32>;
pub type LevelSetF64 = levelset::LevelSet<f64>;
pub type LevelSetF32 = levelset::LevelSet<f32>;
pub type DiscreteMeasureF64 = choquet::DiscreteMeasure<f64>;
pub type DiscreteMeasureF32 = choquet::DiscreteMeasure<f32>;
pub type QuotientGraphF64 = quotient::QuotientGraph<f64>;
pub type QuotientGraphF32 = quotient::QuotientGraph<f32>;
pub type WindowFunctionF64 = window::WindowFunction<f64>;
pub type WindowFunctionF32 = window::WindowFunction<f32>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixF32 = linalg::Matrix<f32>;

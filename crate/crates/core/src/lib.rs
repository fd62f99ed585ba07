//! Fractional Littlewood–Paley–Stein theory on periodic grids.
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases
//! below fix `f64` or `f32`.

mod error;
mod scalar;

pub mod banach;
pub mod fracderiv;
pub mod grid;
pub mod hilbert;
pub mod quadrature;
pub mod semigroup;
pub mod special;
pub mod squarefuncs;

pub use error::{Error, Result};
pub use scalar::{cis, Real};

/// Version of this crate, recorded in CLI metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type GridSpec64 = grid::GridSpec<f64>;
pub type GridSpec32 = grid::GridSpec<f32>;
pub type Field64 = grid::Field<f64>;
pub type Field32 = grid::Field<f32>;
pub type Spectrum64 = grid::Spectrum<f64>;
pub type Spectrum32 = grid::Spectrum<f32>;
pub type LineSample64 = hilbert::LineSample<f64>;
pub type LineSample32 = hilbert::LineSample<f32>;

//! Pseudospectral solver for the 2D Oldroyd-B and ideal-induction MHD
//! systems on a periodic square, with a Littlewood-Paley toolkit for the
//! norms that appear in their blowup criteria.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod lp;
pub mod mhd;
pub mod monitor;
pub mod oldroyd;
pub mod oracle;
pub(crate) mod dynamics;
pub mod quadrature;
pub mod recipes;
pub mod runner;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ScalarField, SymTensorField, VectorField};
pub use dynamics::{Scheme, StepControls};
pub use grid::Grid;

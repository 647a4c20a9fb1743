//! Exact deformation quantization of Dirac structures at desk scale.

pub mod error;
pub mod algebroid;
pub mod cli;
pub mod dirac;
pub mod exactalg;
pub mod family;
pub mod geom;
pub mod holonomy;
pub mod star;
pub mod suites;

pub use error::{Error, Result};

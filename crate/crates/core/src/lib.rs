//! Exact Poisson cohomology of ruled surfaces over an elliptic curve.

pub mod atlas;
pub mod cech;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod exactalg;
pub mod families;
pub mod poissonco;
pub mod polyvector;

pub use error::{Error, Result};

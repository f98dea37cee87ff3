pub mod chart;
pub mod cm;
pub mod domain;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod harness;
pub mod integrate;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod metric;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod symplectic;
pub mod volume;

pub use error::{Error, Result};

pub type IntSymplectic = symplectic::SymplecticMatrix<num_bigint::BigInt>;
pub type SmallSymplectic = symplectic::SymplecticMatrix<i64>;
pub type RealSymplectic = symplectic::SymplecticMatrix<f64>;
pub type Point = geometry::SiegelPoint<f64>;

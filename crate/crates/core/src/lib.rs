pub mod bkp_reduced;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lax;
pub mod pair_manifold;

pub use elliptic::{EllipticPoint, Lattice};
pub use error::{Error, Result};
pub use num_complex::Complex64;

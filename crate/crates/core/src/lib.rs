//! Torsion forms of flat complexes and their gluing at desk scale.

pub mod analytic;
pub mod error;
pub mod flat_complex;
pub mod forms;
pub mod glue;
pub mod hodge;
pub mod linalg;
pub mod quadrature;
pub mod morse;
pub mod random;
pub mod schema;
pub mod spectral;
pub mod verify;

pub use error::{Result, TorsionError};

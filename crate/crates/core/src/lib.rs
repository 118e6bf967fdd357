pub mod error;
pub mod factory;
pub mod group;
pub mod linalg;
pub mod mps;
pub mod observables;
pub mod projrep;

pub use error::{Error, Result};

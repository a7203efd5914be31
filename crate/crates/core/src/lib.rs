//! Gap probabilities, Fredholm eigenvalues and large-radius asymptotics for the
//! complex Ginibre and chiral ensembles (Dyson indices 2 and 4).
//!
//! All large-N quantities are functions of the scaled radius `x = N r²`.

pub mod error;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub mod ensemble;
pub mod fredholm;

pub use ensemble::{EnsembleSpec, Family};
pub mod gap;
pub mod density;
pub mod asymptotics;
pub mod elliptic;

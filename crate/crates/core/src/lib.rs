//! Askey-Wilson scheme polynomials with conjugate parameters: recurrences,
//! connection coefficients, densities, kernel expansions and a Markov chain
//! built from the conditional q-Normal law.

pub mod error;
pub mod connect;
pub mod density;
pub mod families;
pub mod markov;
pub mod qkernel;
pub mod suites;
pub mod verify;

pub use error::{Error, Result};
pub use qkernel::{Branch, QBase};

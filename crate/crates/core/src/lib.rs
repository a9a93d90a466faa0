//! Work as an externally measured observable on a control device.
//!
//! A system is driven through a collision model: a stream of freshly prepared
//! control ancillas, each interacting once for a short time. In the limit of
//! rapid resetting the system evolves unitarily under the *relative
//! Hamiltonian* `⟨ψ_C|H_SC|ψ_C⟩`, and the work done on it can be read off the
//! ancillas alone. On top of that the crate provides the two-point-measurement
//! Jarzynski identity, the operational one-point-measurement variant with its
//! entropic correction, the worked qubit and oscillator systems, and a
//! variational protocol optimizer for free-energy estimation.

pub mod collision;
pub mod error;
pub mod fluctuation;
pub mod models;
pub mod optimize;
pub mod protocol;
pub mod quantum;
pub mod tolerance;
pub mod work;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

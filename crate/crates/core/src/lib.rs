//! Simulation of entanglement creation, resonance and routing in ac-driven
//! anisotropic XY spin networks.

pub mod entanglement;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod propagate;
pub mod router;
pub mod rwa;
pub mod sweep;

pub use error::{Error, Result};

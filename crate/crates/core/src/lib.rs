//! Two-qubit quantum battery: a battery spin coupled to a charger spin.
//!
//! The crate evaluates the exact evolution of the pair, the battery capacity
//! of the reduced states, six quantum-resource measures along the way, and
//! checks the closed-form relations that tie them together.
//!
//! ```
//! use quantum_battery::{capacity, model::HamiltonianParams};
//!
//! let p = HamiltonianParams::new(1.0, 1.0, 0.1, 0.1).unwrap();
//! let r = capacity::capacity_report(&p, 0.0).unwrap();
//! assert!((r.battery - 2.0).abs() < 1e-12);
//! ```

pub mod capacity;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod relations;
pub mod resources;
pub mod sampling;

pub use error::{Error, Result};

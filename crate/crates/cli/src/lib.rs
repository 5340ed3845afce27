//! Front end for the two-fluid model: verification sweeps, simulations and
//! eigenstructure inspection, all driven by one TOML config.

pub mod config;
pub mod eigen;
pub mod error;
pub mod simulate;
pub mod verify;

pub use config::Config;
pub use error::{exit_code, ConfigError, Outcome};

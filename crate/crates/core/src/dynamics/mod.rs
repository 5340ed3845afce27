//! Balance-law dynamics: flux, relaxation sources, and a 1D finite-volume solver.

mod energy;
mod flux;
mod output;
mod single_phase;
mod solver;
mod source;

pub use energy::{energy_density, phase_energy_density, phase_energy_flux, total_energy, total_energy_conservative};
pub use flux::{conservative_flux, max_wave_speed, rusanov_flux};
pub use output::{write_diagnostics, write_diagnostics_header, write_snapshot, DIAGNOSTICS_HEADER, SNAPSHOT_HEADER};
pub use single_phase::{reference_run, SinglePhaseCell};
pub use solver::{step, BoundaryCondition, Diagnostics, FieldSnapshot, InitialData, SimConfig, Simulation, SmoothProfile};
pub use source::{integrate_sources, source_vector, MAX_HALVINGS, MAX_SUBSTEPS, SUBSTEP_STIFFNESS};

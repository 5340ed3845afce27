//! Discrete bookkeeping of the total energy, the mathematical entropy of the system.

use crate::eos::MixtureEos;
use crate::error::Result;
use crate::scalar::{lit, Real};
use crate::state::ConservedState;

/// `E(W) = w3 Phi(w1/w3, w2/w3, w3, w5) + w4^2 / (2 w3)`.
pub fn energy_density<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<T> {
    let s = w.to_primitive()?;
    Ok(s.rho * mix.potential(s.alpha, s.c, s.rho, s.w)? + w.w4 * w.w4 / (lit::<T>(2.0) * w.w3))
}

/// `sum_i alpha_i rho_i (phi_i + u_i^2 / 2)`, the same density built phase by phase.
pub fn phase_energy_density<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<T> {
    let s = w.to_primitive()?;
    let f = s.phase_fields();
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let half = lit::<T>(0.5);
    Ok(s.alpha * f.rho1 * (p1.phi + half * f.u1 * f.u1) + (T::one() - s.alpha) * f.rho2 * (p2.phi + half * f.u2 * f.u2))
}

/// `sum_i alpha_i rho_i u_i (psi_i + u_i^2 / 2)`.
pub fn phase_energy_flux<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<T> {
    let s = w.to_primitive()?;
    let f = s.phase_fields();
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let half = lit::<T>(0.5);
    Ok(s.alpha * f.rho1 * f.u1 * (p1.psi + half * f.u1 * f.u1) + (T::one() - s.alpha) * f.rho2 * f.u2 * (p2.psi + half * f.u2 * f.u2))
}

/// `sum_cells dx sum_i alpha_i rho_i (phi_i + u_i^2 / 2)`.
pub fn total_energy<T: Real>(mix: &MixtureEos<T>, cells: &[ConservedState<T>], dx: T) -> Result<T> {
    cells
        .iter()
        .try_fold(T::zero(), |acc, w| Ok(acc + dx * phase_energy_density(mix, w)?))
}

/// `sum_cells dx E(W)`; agrees with [`total_energy`] up to rounding.
pub fn total_energy_conservative<T: Real>(mix: &MixtureEos<T>, cells: &[ConservedState<T>], dx: T) -> Result<T> {
    cells.iter().try_fold(T::zero(), |acc, w| Ok(acc + dx * energy_density(mix, w)?))
}

//! Equilibrium structure of the model.
//!
//! Closed forms for the flux Jacobian, its eigenpairs, the energy Hessians,
//! the entropy production of the sources and the Shizuta-Kawashima products.
//! Each comes with an independent finite-difference or eigensolver oracle,
//! and [`analyze`] gathers all of them for one state into a
//! [`StructureReport`].
//!
//! The closed forms are the objects under test; the oracles arbitrate.
//! Where a published closed form disagrees with its oracle, both values are
//! kept side by side in the report.

mod convexity;
mod dissipation;
mod eigen;
mod jacobian;
mod report;
mod sk;

use serde::{Deserialize, Serialize};

use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use nalgebra::Vector5;

use crate::state::{ConservedState, PrimitiveState};

pub use convexity::{
    hessian_phi, hessian_potential_equilibrium, hessian_total_energy_equilibrium, published_alpha_v_entry, PhiHessian, TotalEnergyHessian,
};
pub use dissipation::{dissipativity_check, energy_gradient_fd, grad_energy_conserved, published_grad_energy, DissipativityCheck};
pub use eigen::{character_measure, eigen_structure, field_speed, Character, EigenStructure, Field, FIELDS};
pub use jacobian::{analytic_jacobian, match_spectrum, numeric_flux_jacobian, spectrum, SpectrumMatch};
pub use report::{analyze, energy_gradient_floor, perturbed_state, Gate, Minors, StructureReport};
pub use sk::{claimed_sk_products, grad_xi_alpha, sk_check, SkCheck};

/// Named tolerances of the structural checks. All are relative to the
/// natural scale of the compared quantity; see the individual fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Equilibrium precondition: `|p_1 - p_2| <= tol rho a^2` and `|w| <= tol (|u| + a)`.
    pub equilibrium: f64,
    /// Eigenvalue spectrum match, relative to `|u| + max a_i`.
    pub spectrum: f64,
    /// `|A R - lambda R|_inf <= tol |A|_inf |R|_inf`.
    pub eigen_residual: f64,
    /// Character measure below this flags a field linearly degenerate.
    pub linear_degeneracy: f64,
    /// `H2` against its closed form, relative.
    pub h2_closed_form: f64,
    /// `|H3| <= tol max(1, |H|)^3`.
    pub h3: f64,
    /// Smallest Hessian eigenvalue `>= -tol max(1, |H|)`.
    pub psd: f64,
    /// Eigenvalues with `|mu| <= tol max(1, |H|)` count as null modes.
    pub null_mode: f64,
    /// Dissipativity identity (relative) and margin (relative to the production).
    pub dissipativity: f64,
    /// Shizuta-Kawashima products must exceed `tol max(a_1^2/alpha, a_2^2/(1 - alpha))`.
    pub sk: f64,
    /// Shizuta-Kawashima closed forms against the finite-difference products, relative.
    pub sk_closed_form: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equilibrium: 1e-10,
            spectrum: 1e-5,
            eigen_residual: 1e-9,
            linear_degeneracy: 1e-7,
            h2_closed_form: 1e-10,
            h3: 1e-9,
            psd: 1e-9,
            null_mode: 1e-8,
            dissipativity: 1e-12,
            sk: 1e-8,
            sk_closed_form: 1e-10,
        }
    }
}

/// Fails unless `p_1 = p_2` and `w = 0` up to `tol` (scaled as in [`Tolerances::equilibrium`]).
pub fn require_equilibrium<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, tol: T) -> Result<()> {
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let a2 = s.c * p1.a2 + (T::one() - s.c) * p2.a2;
    let dp = (p1.p - p2.p).abs();
    let pressure_scale = s.rho * a2;
    let speed_scale = s.u.abs() + a2.sqrt();
    if dp > tol * pressure_scale || s.w.abs() > tol * speed_scale {
        return Err(Error::NotEquilibrium(format!(
            "|p1 - p2| = {:e} (scale {:e}), |w| = {:e} (scale {:e})",
            to_f64(dp),
            to_f64(pressure_scale),
            to_f64(s.w),
            to_f64(speed_scale)
        )));
    }
    Ok(())
}

/// `|u| + max(a_1, a_2)`, the speed scale of a state.
pub(crate) fn speed_scale<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>) -> Result<T> {
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    Ok(s.u.abs() + p1.a2.max(p2.a2).sqrt())
}

/// Finite-difference steps in conserved coordinates for the state `w`.
///
/// Chosen so that each probe changes every fraction and its complement by at
/// most `rel` relatively:
/// `rho (min(alpha, 1 - alpha), min(c, 1 - c), min(1, (1 - alpha)/alpha, (1 - c)/c), s) rel`
/// for `w_1..w_4` and `s rel` for `w_5`, where `s = |u| + max a_i`.
/// A plain `rel |w_j|` step loses accuracy as a phase vanishes.
pub fn conserved_steps<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>, rel: T) -> Result<Vector5<T>> {
    let s = w.to_primitive()?;
    let one = T::one();
    let (b, d) = (one - s.alpha, one - s.c);
    let speed = speed_scale(mix, &s)?;
    let h3 = one.min(b / s.alpha).min(d / s.c);
    Ok(Vector5::new(s.rho * s.alpha.min(b), s.rho * s.c.min(d), s.rho * h3, s.rho * speed, speed) * rel)
}

/// Steps in the `(alpha, c, v, q)` chart, analogous to [`conserved_steps`].
pub fn chart_steps<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, rel: T) -> Result<nalgebra::Vector4<T>> {
    let one = T::one();
    let v = one / s.rho;
    let speed = speed_scale(mix, s)?;
    Ok(nalgebra::Vector4::new(s.alpha.min(one - s.alpha), s.c.min(one - s.c), v, v * speed) * rel)
}

pub(crate) fn inf_norm<T: Real, const R: usize, const C: usize>(m: &nalgebra::SMatrix<T, R, C>) -> T {
    (0..R)
        .map(|i| m.row(i).iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .fold(T::zero(), |a, b| a.max(b))
}

pub(crate) fn max_abs<T: Real, const N: usize>(v: &nalgebra::SVector<T, N>) -> T {
    v.iter().fold(T::zero(), |a, x| a.max(x.abs()))
}

pub(crate) fn floor_one<T: Real>(x: T) -> T {
    x.max(lit(1.0))
}

use nalgebra::Vector5;

use crate::dynamics::{energy_density, source_vector};
use crate::eos::MixtureEos;
use crate::error::Result;
use crate::fd;
use crate::scalar::{lit, tiny, Real};
use crate::state::{ConservedState, RelaxationParams};

fn gradient_parts<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<(Vector5<T>, T)> {
    let s = w.to_primitive()?;
    let one = T::one();
    let d = mix.first_derivs(s.alpha, s.c, s.rho, s.w)?;
    let phi = mix.potential(s.alpha, s.c, s.rho, s.w)?;
    let p = mix.pressure(s.alpha, s.c, s.rho)?;
    let v = one / s.rho;
    let q = v * s.w;
    let cd = s.c * (one - s.c);
    // derivatives in the (alpha, c, v, q) chart
    let phi_q = cd * q / (v * v);
    let phi_v = -p - cd * q * q / (v * v * v);
    let u2 = s.u * s.u;
    let third = phi + lit::<T>(0.5) * u2 - (s.alpha * d.d_alpha + s.c * d.d_c + v * phi_v + u2 + q * phi_q);
    Ok((Vector5::new(d.d_alpha, d.d_c, third, s.u, phi_q), s.u))
}

/// `grad_W E` for `E = w_3 Phi + w_4^2 / (2 w_3)`:
/// `(Phi_alpha, Phi_c, Phi + u^2/2 - (alpha Phi_alpha + c Phi_c + v Phi_v + u^2 + q Phi_q), u, Phi_q)`.
pub fn grad_energy_conserved<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<Vector5<T>> {
    Ok(gradient_parts(mix, w)?.0)
}

/// The same vector with `u^2` in the momentum slot, as it is usually quoted.
/// The finite-difference oracle selects `u`; this variant exists so the
/// discrepancy can be reported.
pub fn published_grad_energy<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<Vector5<T>> {
    let (mut g, u) = gradient_parts(mix, w)?;
    g[3] = u * u;
    Ok(g)
}

/// Fourth-order finite-difference gradient of `E(W)`.
pub fn energy_gradient_fd<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<Vector5<T>> {
    let f = |x: &Vector5<T>| energy_density(mix, &ConservedState::from_vector(x));
    fd::gradient5_with_steps(f, &w.to_vector(), &super::conserved_steps(mix, w, lit(1e-3))?)
}

/// Entropy production of the sources and the semi-dissipativity margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativityCheck<T> {
    /// `-grad E . Xi`
    pub production: T,
    /// `(tau_alpha/rho) xi_alpha^2 + (tau_c/rho) xi_c^2 + (rho^2/zeta) xi_w^2`
    pub quadratic_form: T,
    /// `min(tau_alpha/rho, tau_c/rho, rho^2/zeta)`
    pub epsilon: T,
    /// `|Xi|^2`
    pub xi_sq: T,
    /// `production - epsilon |Xi|^2`
    pub margin: T,
    /// Relative mismatch between `production` and `quadratic_form`.
    pub identity_error: T,
}

impl<T: Real> DissipativityCheck<T> {
    /// Identity within `tol` relative, margin nonnegative up to `tol` times the production.
    pub fn holds(&self, tol: T) -> bool {
        self.identity_error <= tol && self.margin >= -tol * self.production.abs()
    }
}

pub fn dissipativity_check<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    w: &ConservedState<T>,
) -> Result<DissipativityCheck<T>> {
    let rho = w.w3;
    let xi = source_vector(mix, relax, w)?;
    let grad = grad_energy_conserved(mix, w)?;
    let production = -grad.dot(&xi);
    let (ka, kc, kw) = (relax.tau_alpha / rho, relax.tau_c / rho, rho * rho / relax.zeta);
    let quadratic_form = ka * xi[0] * xi[0] + kc * xi[1] * xi[1] + kw * xi[4] * xi[4];
    let epsilon = ka.min(kc).min(kw);
    let xi_sq = xi.norm_squared();
    Ok(DissipativityCheck {
        production,
        quadratic_form,
        epsilon,
        xi_sq,
        margin: production - epsilon * xi_sq,
        identity_error: fd::rel_err(production, quadratic_form, tiny::<T>()),
    })
}

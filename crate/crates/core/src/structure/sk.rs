use nalgebra::{Matrix5, Vector5};

use super::{conserved_steps, eigen_structure, inf_norm, max_abs, require_equilibrium, Field, Tolerances};
use crate::dynamics::source_vector;
use crate::eos::MixtureEos;
use crate::error::Result;
use crate::fd;
use crate::scalar::{lit, Real};
use crate::state::{ConservedState, PrimitiveState, RelaxationParams};

/// Closed-form `grad_W xi_alpha` at a mechanical and kinetic equilibrium:
/// `-(1/tau_alpha) (a_1^2 c_1/alpha_1^2 + a_2^2 c_2/alpha_2^2, -(a_1^2/alpha_1 + a_2^2/alpha_2),
/// -a_1^2 c_1/alpha_1 + a_2^2 (c_2/alpha_2) (rho/rho_2) d rho_2/d w_3, 0, 0)`.
pub fn grad_xi_alpha<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, tau_alpha: T, tol: T) -> Result<Vector5<T>> {
    require_equilibrium(mix, s, tol)?;
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let one = T::one();
    let (al1, al2) = (s.alpha, one - s.alpha);
    let (c1, c2) = (s.c, one - s.c);
    let drho2 = (al2 - al1 * c2) / (al2 * al2);
    let g = Vector5::new(
        p1.a2 * c1 / (al1 * al1) + p2.a2 * c2 / (al2 * al2),
        -(p1.a2 / al1 + p2.a2 / al2),
        -p1.a2 * c1 / al1 + p2.a2 * c2 / al2 * s.rho / p2.rho * drho2,
        T::zero(),
        T::zero(),
    );
    Ok(g * (-one / tau_alpha))
}

/// The values usually quoted for `-tau_alpha grad xi_alpha . R`:
/// `-a_1^2/alpha_1` on the phase-1 acoustic fields, `a_2^2/alpha_2` on the
/// phase-2 acoustic fields and on the contact.
pub fn claimed_sk_products<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, field: Field) -> Result<T> {
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    Ok(match field {
        Field::OneMinus | Field::OnePlus => -p1.a2 / s.alpha,
        Field::TwoMinus | Field::TwoPlus | Field::Contact => p2.a2 / (T::one() - s.alpha),
    })
}

/// Shizuta-Kawashima products for the five eigenvectors, in wave-speed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SkCheck<T> {
    pub fields: [Field; 5],
    /// `-tau_alpha grad xi_alpha . R` from the closed-form gradient.
    pub products: [T; 5],
    /// The same product from a fourth-order finite-difference gradient of `xi_alpha`.
    pub fd_products: [T; 5],
    /// See [`claimed_sk_products`].
    pub claimed: [T; 5],
    /// `|D Xi R|_inf / (|D Xi|_inf |R|_inf)` for the full linearised source with all sources on.
    pub full_source_ratio: [T; 5],
    /// Closed-form and finite-difference `grad_W xi_alpha`.
    pub gradient: Vector5<T>,
    pub fd_gradient: Vector5<T>,
    /// `max(a_1^2/alpha, a_2^2/(1 - alpha))`
    pub scale: T,
    /// Every `|products|` exceeds `sk * scale`.
    pub pass: bool,
}

impl<T: Real> SkCheck<T> {
    /// Worst gap between the claimed closed forms and the FD products,
    /// relative to `scale` (not to the individual product, whose size may
    /// be far below the terms it is assembled from).
    pub fn claimed_error(&self) -> T {
        (0..5)
            .map(|k| fd::rel_err(self.claimed[k], self.fd_products[k], self.scale))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `|grad - fd_grad|_inf / |fd_grad|_inf`.
    pub fn gradient_error(&self) -> T {
        max_abs(&(self.gradient - self.fd_gradient)) / max_abs(&self.fd_gradient)
    }
}

pub fn sk_check<T: Real>(mix: &MixtureEos<T>, relax: &RelaxationParams<T>, s: &PrimitiveState<T>, tol: &Tolerances) -> Result<SkCheck<T>> {
    let eq_tol = lit::<T>(tol.equilibrium);
    let eig = eigen_structure(mix, s, eq_tol, lit(tol.linear_degeneracy))?;
    let tau = relax.tau_alpha;
    let grad = grad_xi_alpha(mix, s, tau, eq_tol)?;

    let w = s.to_conserved().to_vector();
    let alpha_only = RelaxationParams {
        enable_alpha: true,
        ..*relax
    };
    let xi_alpha = |x: &Vector5<T>| Ok(source_vector(mix, &alpha_only, &ConservedState::from_vector(x))?[0]);
    let fd_grad = fd::gradient5_with_steps(xi_alpha, &w, &conserved_steps(mix, &s.to_conserved(), lit(1e-3))?)?;

    let all_on = RelaxationParams::all_enabled(relax.tau_alpha, relax.tau_c, relax.zeta);
    let full = |x: &Vector5<T>| source_vector(mix, &all_on, &ConservedState::from_vector(x));
    let dxi: Matrix5<T> = fd::jacobian_with_steps(full, &w, &conserved_steps(mix, &s.to_conserved(), lit(1e-6))?)?;
    let dxi_norm = inf_norm(&dxi);

    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let scale = (p1.a2 / s.alpha).max(p2.a2 / (T::one() - s.alpha));
    let mut out = SkCheck {
        fields: eig.fields,
        products: [T::zero(); 5],
        fd_products: [T::zero(); 5],
        claimed: [T::zero(); 5],
        full_source_ratio: [T::zero(); 5],
        gradient: grad,
        fd_gradient: fd_grad,
        scale,
        pass: true,
    };
    for k in 0..5 {
        let r = &eig.rvecs[k];
        out.products[k] = -tau * grad.dot(r);
        out.fd_products[k] = -tau * fd_grad.dot(r);
        out.claimed[k] = claimed_sk_products(mix, s, eig.fields[k])?;
        out.full_source_ratio[k] = if dxi_norm > T::zero() {
            max_abs(&(dxi * r)) / (dxi_norm * max_abs(r))
        } else {
            T::zero()
        };
        out.pass &= out.products[k].abs() > lit::<T>(tol.sk) * scale;
    }
    Ok(out)
}

use nalgebra::{Matrix3, Matrix4, Matrix5};

use super::{floor_one, inf_norm};
use crate::eos::MixtureEos;
use crate::error::Result;
use crate::scalar::Real;

/// Hessian of `phi(alpha, c, v)` with its leading principal minors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiHessian<T> {
    pub matrix: Matrix3<T>,
    pub h1: T,
    pub h2: T,
    pub h3: T,
    /// `v (a_1^2 / (alpha v_1) + a_2^2 / ((1 - alpha) v_2))`
    pub h1_closed: T,
    /// `a_1^2 a_2^2 (v_1 - v_2)^2 / (v_1 v_2 alpha (1 - alpha))`
    pub h2_closed: T,
}

pub fn hessian_phi<T: Real>(mix: &MixtureEos<T>, alpha: T, c: T, v: T) -> Result<PhiHessian<T>> {
    let matrix = mix.second_derivs(alpha, c, v, T::zero())?.phi_matrix();
    let (p1, p2) = mix.phase_points(alpha, c, T::one() / v)?;
    let (v1, v2) = (T::one() / p1.rho, T::one() / p2.rho);
    let beta = T::one() - alpha;
    let h2 = matrix[(0, 0)] * matrix[(1, 1)] - matrix[(0, 1)] * matrix[(1, 0)];
    let dv = v1 - v2;
    Ok(PhiHessian {
        matrix,
        h1: matrix[(0, 0)],
        h2,
        h3: matrix.determinant(),
        h1_closed: v * (p1.a2 / (alpha * v1) + p2.a2 / (beta * v2)),
        h2_closed: p1.a2 * p2.a2 * dv * dv / (v1 * v2 * alpha * beta),
    })
}

/// Hessian of `Phi(alpha, c, v, q)` at `q = 0`.
///
/// The `(alpha, v)` entry is `a_1^2/v_1 - a_2^2/v_2`, its value at
/// `p_1 = p_2`; see [`published_alpha_v_entry`] for the form that circulates
/// with an extra `1/p_i`.
pub fn hessian_potential_equilibrium<T: Real>(mix: &MixtureEos<T>, alpha: T, c: T, v: T) -> Result<Matrix4<T>> {
    Ok(mix.second_derivs(alpha, c, v, T::zero())?.potential_matrix())
}

/// `a_1^2/(v_1 p_1) - a_2^2/(v_2 p_2)`. Disagrees with the true mixed
/// derivative by the factor `1/p`; kept for reporting only.
pub fn published_alpha_v_entry<T: Real>(mix: &MixtureEos<T>, alpha: T, c: T, v: T) -> Result<T> {
    let (p1, p2) = mix.phase_points(alpha, c, T::one() / v)?;
    Ok(p1.a2 * p1.rho / p1.p - p2.a2 * p2.rho / p2.p)
}

/// Hessian of the total energy in `(alpha, c, v, u, q)` at equilibrium and
/// its spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalEnergyHessian<T> {
    pub matrix: Matrix5<T>,
    /// Ascending.
    pub eigenvalues: [T; 5],
    /// `max(1, |H|_inf)`, the scale for the PSD and null-mode tolerances.
    pub scale: T,
}

impl<T: Real> TotalEnergyHessian<T> {
    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn null_modes(&self, tol: T) -> usize {
        self.eigenvalues.iter().filter(|m| m.abs() <= tol * self.scale).count()
    }
}

/// Block-diagonal `diag(D^2 phi, 1, c (1 - c) / v^2)`.
pub fn hessian_total_energy_equilibrium<T: Real>(mix: &MixtureEos<T>, alpha: T, c: T, v: T) -> Result<TotalEnergyHessian<T>> {
    let phi = hessian_phi(mix, alpha, c, v)?.matrix;
    let mut matrix = Matrix5::zeros();
    matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&phi);
    matrix[(3, 3)] = T::one();
    matrix[(4, 4)] = c * (T::one() - c) / (v * v);
    Ok(TotalEnergyHessian {
        matrix,
        eigenvalues: sorted_eigenvalues(&matrix),
        scale: floor_one(inf_norm(&matrix)),
    })
}

pub(crate) fn sorted_eigenvalues<T: Real, const N: usize>(m: &nalgebra::SMatrix<T, N, N>) -> [T; N]
where
    nalgebra::Const<N>: nalgebra::DimMin<nalgebra::Const<N>, Output = nalgebra::Const<N>> + nalgebra::DimSub<nalgebra::U1>,
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<<nalgebra::Const<N> as nalgebra::DimSub<nalgebra::U1>>::Output>,
{
    let ev = m.symmetric_eigenvalues();
    let mut out = [T::zero(); N];
    for (o, e) in out.iter_mut().zip(ev.iter()) {
        *o = *e;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

use nalgebra::{Complex, Matrix5, Vector5};
use serde::Serialize;

use super::{conserved_steps, require_equilibrium};
use crate::dynamics::conservative_flux;
use crate::eos::MixtureEos;
use crate::error::Result;
use crate::fd;
use crate::scalar::{lit, to_f64, Real};
use crate::state::{ConservedState, PrimitiveState};

/// Closed-form flux Jacobian `dF/dW` at a mechanical and kinetic equilibrium,
/// written in primitive quantities.
///
/// `tol` is the equilibrium precondition tolerance.
pub fn analytic_jacobian<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, tol: T) -> Result<Matrix5<T>> {
    require_equilibrium(mix, s, tol)?;
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let one = T::one();
    let (al1, al2) = (s.alpha, one - s.alpha);
    let (c1, c2) = (s.c, one - s.c);
    let (u, rho) = (s.u, s.rho);
    let (s1, s2) = (p1.a2, p2.a2);
    let (r1, r2) = (p1.rho, p2.rho);
    let drho2 = (al2 - al1 * c2) / (al2 * al2);
    let z = T::zero();
    #[rustfmt::skip]
    let a = Matrix5::new(
        u, z, -al1 * u, al1, z,
        z, u, -c1 * u, c1, c1 * c2 * rho,
        z, z, z, one, z,
        -s1 * c1 / al1 + s2 * c2 / al2, s1 - s2, -u * u + c1 * s1 + c2 * s2 * rho / r2 * drho2, u + u, z,
        -s1 / (al1 * rho) - s2 / (al2 * rho), s1 / (al1 * r1) + s2 / (al2 * r2), s1 / rho - s2 / r2 * drho2, z, u,
    );
    Ok(a)
}

/// Central-difference Jacobian of the conservative flux at `w`.
pub fn numeric_flux_jacobian<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<Matrix5<T>> {
    let f = |x: &Vector5<T>| conservative_flux(mix, &ConservedState::from_vector(x));
    fd::jacobian_with_steps(f, &w.to_vector(), &conserved_steps(mix, w, lit(1e-6))?)
}

/// Eigenvalues of a general real matrix, sorted by real part.
pub fn spectrum<T: Real>(m: &Matrix5<T>) -> Vec<Complex<T>> {
    let mut ev: Vec<Complex<T>> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Agreement between a numerical spectrum and the expected wave speeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMatch {
    /// Numerical eigenvalues (real parts), ascending.
    pub numeric: Vec<f64>,
    /// Largest `|lambda_num - lambda_expected|`, divided by `scale`.
    pub max_error: f64,
    /// Largest `|Im lambda_num|`, divided by `scale`.
    pub max_imag: f64,
}

impl SpectrumMatch {
    pub fn within(&self, tol: f64) -> bool {
        self.max_error <= tol && self.max_imag <= tol
    }
}

/// Matches the multisets by sorting both. Sorting pairs clustered values with
/// each other, so nearly coincident speeds need no special treatment.
pub fn match_spectrum<T: Real>(numeric: &[Complex<T>], expected: &[T], scale: T) -> SpectrumMatch {
    let mut want: Vec<f64> = expected.iter().map(|x| to_f64(*x)).collect();
    want.sort_by(|a, b| a.total_cmp(b));
    let mut got: Vec<(f64, f64)> = numeric.iter().map(|z| (to_f64(z.re), to_f64(z.im))).collect();
    got.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = to_f64(scale);
    let mut max_error = if got.len() == want.len() { 0.0 } else { f64::INFINITY };
    let mut max_imag: f64 = 0.0;
    for ((re, im), w) in got.iter().zip(&want) {
        max_error = max_error.max((re - w).abs() / scale);
        max_imag = max_imag.max(im.abs() / scale);
    }
    SpectrumMatch {
        numeric: got.iter().map(|g| g.0).collect(),
        max_error,
        max_imag,
    }
}

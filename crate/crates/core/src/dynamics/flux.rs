use nalgebra::Vector5;

use crate::eos::MixtureEos;
use crate::error::Result;
use crate::scalar::{lit, Real};
use crate::state::ConservedState;

/// Physical flux `F(W)` of the five balance laws:
///
/// ```text
/// ( alpha rho u,
///   alpha rho_1 u_1,
///   rho u,
///   alpha rho_1 u_1^2 + (1 - alpha) rho_2 u_2^2 + alpha p_1 + (1 - alpha) p_2,
///   u_1^2 / 2 - u_2^2 / 2 + psi_1 - psi_2 )
/// ```
pub fn conservative_flux<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<Vector5<T>> {
    let s = w.to_primitive()?;
    let f = s.phase_fields();
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let one = T::one();
    let half = lit::<T>(0.5);
    let (a1, a2) = (s.alpha, one - s.alpha);
    let m1 = a1 * f.rho1 * f.u1;
    let m2 = a2 * f.rho2 * f.u2;
    Ok(Vector5::new(
        w.w1 * s.u,
        m1,
        w.w4,
        m1 * f.u1 + m2 * f.u2 + a1 * p1.p + a2 * p2.p,
        half * (f.u1 * f.u1 - f.u2 * f.u2) + p1.psi - p2.psi,
    ))
}

/// Upper bound `max_i (|u_i| + a_i)` on the characteristic speeds of one state.
pub fn max_wave_speed<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>) -> Result<T> {
    let s = w.to_primitive()?;
    let f = s.phase_fields();
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    Ok((f.u1.abs() + p1.a2.sqrt()).max(f.u2.abs() + p2.a2.sqrt()))
}

/// Local Lax-Friedrichs flux `(F_L + F_R)/2 - s (W_R - W_L)/2`.
pub fn rusanov_flux<T: Real>(mix: &MixtureEos<T>, left: &ConservedState<T>, right: &ConservedState<T>) -> Result<Vector5<T>> {
    let fl = conservative_flux(mix, left)?;
    let fr = conservative_flux(mix, right)?;
    let s = max_wave_speed(mix, left)?.max(max_wave_speed(mix, right)?);
    let half = lit::<T>(0.5);
    Ok((fl + fr) * half - (right.to_vector() - left.to_vector()) * (half * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PhaseEosSpec;
    use crate::state::PrimitiveState;
    use approx::assert_relative_eq;

    fn mix() -> MixtureEos<f64> {
        MixtureEos::new(PhaseEosSpec::polytropic(1.0, 2.0), PhaseEosSpec::isothermal(1.0)).unwrap()
    }

    #[test]
    fn rest_state_flux() {
        let m = mix();
        let s = PrimitiveState::new(0.4, 0.3, 2.0, 0.0, 0.0);
        let f = conservative_flux(&m, &s.to_conserved()).unwrap();
        let (p1, p2) = m.phase_points(0.4, 0.3, 2.0).unwrap();
        assert_eq!((f[0], f[1], f[2]), (0.0, 0.0, 0.0));
        assert_relative_eq!(f[3], 0.4 * p1.p + 0.6 * p2.p, max_relative = 1e-14);
        assert_relative_eq!(f[4], p1.psi - p2.psi, max_relative = 1e-14);
    }

    #[test]
    fn canonical_mass_flux() {
        let s = PrimitiveState::new(0.5, 1.0 / 3.0, 3.0, 0.3, 0.0);
        let f = conservative_flux(&mix(), &s.to_conserved()).unwrap();
        assert_relative_eq!(f[0], 0.45, max_relative = 1e-14);
    }

    #[test]
    fn identical_phases_reduce_to_euler() {
        let spec = PhaseEosSpec::stiffened(2.0, 1.4, 0.3);
        let m = MixtureEos::new(spec, spec).unwrap();
        let s = PrimitiveState::<f64>::new(0.3, 0.3, 1.7, -0.4, 0.0);
        let f = conservative_flux(&m, &s.to_conserved()).unwrap();
        let p = spec.pressure(1.7).unwrap();
        assert_relative_eq!(f[2], 1.7 * -0.4, max_relative = 1e-14);
        assert_relative_eq!(f[3], 1.7 * 0.16 + p, max_relative = 1e-14);
        assert!(f[4].abs() < 1e-14);
    }

    #[test]
    fn rusanov_consistency_and_reflection() {
        let m = mix();
        let s = PrimitiveState::new(0.5, 1.0 / 3.0, 3.0, 0.3, 0.1).to_conserved();
        assert_eq!(rusanov_flux(&m, &s, &s).unwrap(), conservative_flux(&m, &s).unwrap());

        let l = PrimitiveState::new(0.45, 0.3, 2.5, 0.6, 0.2).to_conserved();
        let r = PrimitiveState::new(0.45, 0.3, 2.5, -0.6, -0.2).to_conserved();
        let f = rusanov_flux(&m, &l, &r).unwrap();
        assert!(f[2].abs() < 1e-14);
    }
}

//! Primitive and conserved coordinates for the five-component state.

use nalgebra::Vector5;
use serde::{Deserialize, Serialize};

use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Default distance kept from the endpoints of `(0, 1)` for `alpha` and `c`.
pub const FRACTION_MARGIN: f64 = 1e-12;

/// `(alpha, c, rho, u, w)` with `w = u_1 - u_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState<T> {
    pub alpha: T,
    pub c: T,
    pub rho: T,
    pub u: T,
    pub w: T,
}

/// `W = (alpha rho, c rho, rho, rho u, w)`.
///
/// The fourth entry equals the phase-momentum sum
/// `alpha rho_1 u_1 + (1 - alpha) rho_2 u_2`; the fifth stores `w` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedState<T> {
    pub w1: T,
    pub w2: T,
    pub w3: T,
    pub w4: T,
    pub w5: T,
}

/// Phase densities and velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFields<T> {
    pub rho1: T,
    pub rho2: T,
    pub u1: T,
    pub u2: T,
}

/// Relaxation times, friction coefficient, and per-source switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationParams<T> {
    pub tau_alpha: T,
    pub tau_c: T,
    pub zeta: T,
    #[serde(default = "yes")]
    pub enable_alpha: bool,
    #[serde(default)]
    pub enable_c: bool,
    #[serde(default = "yes")]
    pub enable_w: bool,
}

fn yes() -> bool {
    true
}

impl<T: Real> RelaxationParams<T> {
    /// Pressure relaxation and friction on, phase-transfer relaxation off.
    pub fn new(tau_alpha: T, tau_c: T, zeta: T) -> Self {
        Self {
            tau_alpha,
            tau_c,
            zeta,
            enable_alpha: true,
            enable_c: false,
            enable_w: true,
        }
    }

    pub fn all_enabled(tau_alpha: T, tau_c: T, zeta: T) -> Self {
        Self {
            enable_c: true,
            ..Self::new(tau_alpha, tau_c, zeta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x > T::zero() && x.is_finite();
        if self.enable_alpha && !positive(self.tau_alpha) {
            return Err(Error::Relaxation("tau_alpha must be positive".into()));
        }
        if self.enable_c && !positive(self.tau_c) {
            return Err(Error::Relaxation("tau_c must be positive".into()));
        }
        if self.enable_w && !positive(self.zeta) {
            return Err(Error::Relaxation("zeta must be positive".into()));
        }
        Ok(())
    }
}

impl<T: Real> PrimitiveState<T> {
    pub fn new(alpha: T, c: T, rho: T, u: T, w: T) -> Self {
        Self { alpha, c, rho, u, w }
    }

    /// Checks `alpha, c` in `(margin, 1 - margin)`, `rho > 0` and finiteness.
    pub fn validate(&self, margin: T) -> Result<()> {
        let inside = |x: T| x > margin && x < T::one() - margin;
        if !inside(self.alpha) {
            return Err(Error::State(format!("alpha = {} outside (0, 1)", to_f64(self.alpha))));
        }
        if !inside(self.c) {
            return Err(Error::State(format!("c = {} outside (0, 1)", to_f64(self.c))));
        }
        if !(self.rho > T::zero()) || !self.rho.is_finite() {
            return Err(Error::State(format!("rho = {} must be positive", to_f64(self.rho))));
        }
        if !self.u.is_finite() || !self.w.is_finite() {
            return Err(Error::State("velocities must be finite".into()));
        }
        Ok(())
    }

    pub fn to_conserved(&self) -> ConservedState<T> {
        ConservedState {
            w1: self.alpha * self.rho,
            w2: self.c * self.rho,
            w3: self.rho,
            w4: self.rho * self.u,
            w5: self.w,
        }
    }

    /// `rho_1 = c rho / alpha`, `rho_2 = (1 - c) rho / (1 - alpha)`,
    /// `u_1 = u + (1 - c) w`, `u_2 = u - c w`.
    pub fn phase_fields(&self) -> PhaseFields<T> {
        let one = T::one();
        PhaseFields {
            rho1: self.c * self.rho / self.alpha,
            rho2: (one - self.c) * self.rho / (one - self.alpha),
            u1: self.u + (one - self.c) * self.w,
            u2: self.u - self.c * self.w,
        }
    }

    /// As `[alpha, c, rho, u, w]`, the CSV column order.
    pub fn to_array(&self) -> [T; 5] {
        [self.alpha, self.c, self.rho, self.u, self.w]
    }
}

impl<T: Real> ConservedState<T> {
    pub fn from_vector(v: &Vector5<T>) -> Self {
        Self {
            w1: v[0],
            w2: v[1],
            w3: v[2],
            w4: v[3],
            w5: v[4],
        }
    }

    pub fn to_vector(&self) -> Vector5<T> {
        Vector5::new(self.w1, self.w2, self.w3, self.w4, self.w5)
    }

    /// Unchecked inverse of [`PrimitiveState::to_conserved`].
    pub fn to_primitive_unchecked(&self) -> PrimitiveState<T> {
        PrimitiveState {
            alpha: self.w1 / self.w3,
            c: self.w2 / self.w3,
            rho: self.w3,
            u: self.w4 / self.w3,
            w: self.w5,
        }
    }

    /// `(alpha, c, rho, u, w) = (w1/w3, w2/w3, w3, w4/w3, w5)` with admissibility checks.
    pub fn to_primitive_with_margin(&self, margin: T) -> Result<PrimitiveState<T>> {
        if !(self.w3 > T::zero()) || !self.w3.is_finite() {
            return Err(Error::State(format!("w3 = {} must be positive", to_f64(self.w3))));
        }
        let p = self.to_primitive_unchecked();
        p.validate(margin)?;
        Ok(p)
    }

    pub fn to_primitive(&self) -> Result<PrimitiveState<T>> {
        self.to_primitive_with_margin(lit(FRACTION_MARGIN))
    }
}

/// Builds the state with `w = 0` and `p_1(rho_1) = p_2(rho_2) = p_star`.
pub fn make_mechanical_equilibrium<T: Real>(mix: &MixtureEos<T>, p_star: T, alpha: T, u: T) -> Result<PrimitiveState<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::State(format!("alpha = {} outside (0, 1)", to_f64(alpha))));
    }
    let rho1 = mix.phase1.density_at_pressure(p_star)?;
    let rho2 = mix.phase2.density_at_pressure(p_star)?;
    let m1 = alpha * rho1;
    let rho = m1 + (T::one() - alpha) * rho2;
    let state = PrimitiveState {
        alpha,
        c: m1 / rho,
        rho,
        u,
        w: T::zero(),
    };
    state.validate(T::zero())?;
    Ok(state)
}

/// One equilibrium condition: its residual and whether it is within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition<T> {
    pub residual: T,
    pub holds: bool,
}

/// Mechanical (`p_1 = p_2`), chemical (`d Phi / dc = 0`), kinetic (`w = 0`) equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport<T> {
    pub mechanical: Condition<T>,
    pub chemical: Condition<T>,
    pub kinetic: Condition<T>,
}

impl<T: Real> EquilibriumReport<T> {
    pub fn mechanical_and_kinetic(&self) -> bool {
        self.mechanical.holds && self.kinetic.holds
    }

    pub fn full(&self) -> bool {
        self.mechanical.holds && self.chemical.holds && self.kinetic.holds
    }
}

/// Residuals `|p_2 - p_1| / rho`, `|psi_1 - psi_2 + (1 - 2c) w^2 / 2|`, `|c (1 - c) w|`.
pub fn is_equilibrium<T: Real>(mix: &MixtureEos<T>, state: &PrimitiveState<T>, tol: T) -> Result<EquilibriumReport<T>> {
    let d = mix.first_derivs(state.alpha, state.c, state.rho, state.w)?;
    let cond = |r: T| Condition {
        residual: r,
        holds: r <= tol,
    };
    Ok(EquilibriumReport {
        mechanical: cond(d.d_alpha.abs()),
        chemical: cond(d.d_c.abs()),
        kinetic: cond(d.d_w.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PhaseEosSpec;
    use approx::assert_relative_eq;

    fn canonical_mix() -> MixtureEos<f64> {
        MixtureEos::new(PhaseEosSpec::polytropic(1.0, 2.0), PhaseEosSpec::isothermal(1.0)).unwrap()
    }

    #[test]
    fn primitive_to_conserved_example() {
        let p = PrimitiveState::new(0.5, 1.0 / 3.0, 3.0, 0.3, 0.0);
        let w = p.to_conserved();
        assert_eq!(w.w1, 1.5);
        assert_relative_eq!(w.w2, 1.0, max_relative = 1e-15);
        assert_eq!(w.w3, 3.0);
        assert_relative_eq!(w.w4, 0.9, max_relative = 1e-15);
        assert_eq!(w.w5, 0.0);
    }

    #[test]
    fn conserved_to_primitive_example() {
        let w = ConservedState {
            w1: 1.5,
            w2: 1.0,
            w3: 3.0,
            w4: 0.9,
            w5: 0.0,
        };
        let p = w.to_primitive().unwrap();
        assert_eq!(p.alpha, 0.5);
        assert_relative_eq!(p.c, 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(p.u, 0.3, max_relative = 1e-15);
        let rest = ConservedState { w4: 0.0, ..w }.to_primitive().unwrap();
        assert_eq!((rest.u, rest.w), (0.0, 0.0));
    }

    #[test]
    fn momentum_equals_phase_sum() {
        let p = PrimitiveState::new(0.3, 0.45, 2.5, -0.7, 0.9);
        let f = p.phase_fields();
        let sum = p.alpha * f.rho1 * f.u1 + (1.0 - p.alpha) * f.rho2 * f.u2;
        assert_relative_eq!(p.to_conserved().w4, sum, max_relative = 1e-14);
    }

    #[test]
    fn inadmissible_conserved_states() {
        let ok = ConservedState {
            w1: 1.5,
            w2: 1.0,
            w3: 3.0,
            w4: 0.9,
            w5: 0.0,
        };
        assert!(ConservedState { w3: 0.0, ..ok }.to_primitive().is_err());
        assert!(ConservedState { w1: 3.0, ..ok }.to_primitive().is_err());
        assert!(ConservedState { w2: -0.1, ..ok }.to_primitive().is_err());
        assert!(ConservedState { w4: f64::NAN, ..ok }.to_primitive().is_err());
    }

    #[test]
    fn phase_field_examples() {
        let p = PrimitiveState::new(0.5, 1.0 / 3.0, 3.0, 0.3, 0.0);
        let f = p.phase_fields();
        assert_relative_eq!(f.rho1, 2.0, max_relative = 1e-15);
        assert_relative_eq!(f.rho2, 4.0, max_relative = 1e-15);
        assert_eq!((f.u1, f.u2), (0.3, 0.3));
    }

    #[test]
    fn canonical_equilibrium() {
        let mix = canonical_mix();
        let s = make_mechanical_equilibrium(&mix, 4.0, 0.5, 0.3).unwrap();
        let f = s.phase_fields();
        assert_relative_eq!(f.rho1, 2.0, max_relative = 1e-14);
        assert_relative_eq!(f.rho2, 4.0, max_relative = 1e-14);
        assert_relative_eq!(s.rho, 3.0, max_relative = 1e-14);
        assert_relative_eq!(s.c, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(mix.pressure(s.alpha, s.c, s.rho).unwrap(), 4.0, max_relative = 1e-13);

        let r = is_equilibrium(&mix, &s, 1e-10).unwrap();
        assert!(r.mechanical.holds && r.kinetic.holds);
        assert!(!r.chemical.holds);
        let cal = mix.calibrate_offsets(4.0).unwrap();
        assert!(is_equilibrium(&cal, &s, 1e-10).unwrap().full());
        assert!(is_equilibrium(&mix, &s, f64::INFINITY).unwrap().full());
    }

    #[test]
    fn identical_phases_equilibrium() {
        let spec = PhaseEosSpec::stiffened(1.5, 1.4, 0.2);
        let mix = MixtureEos::new(spec, spec).unwrap();
        let s = make_mechanical_equilibrium(&mix, 2.0, 0.35, 0.0).unwrap();
        let f = s.phase_fields();
        assert_relative_eq!(f.rho1, f.rho2, max_relative = 1e-14);
        assert_relative_eq!(s.c, 0.35, max_relative = 1e-14);
    }

    #[test]
    fn moving_w_breaks_kinetic_equilibrium() {
        let mix = canonical_mix().calibrate_offsets(4.0).unwrap();
        let s = PrimitiveState {
            w: 0.2,
            ..make_mechanical_equilibrium(&mix, 4.0, 0.5, 0.3).unwrap()
        };
        assert!(!is_equilibrium(&mix, &s, 1e-10).unwrap().kinetic.holds);
    }

    #[test]
    fn unreachable_pressure_is_an_error() {
        assert!(make_mechanical_equilibrium(&canonical_mix(), -1.0, 0.5, 0.0).is_err());
        assert!(make_mechanical_equilibrium(&canonical_mix(), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn relaxation_validation() {
        assert!(RelaxationParams::new(1.0, 1.0, 1.0).validate().is_ok());
        assert!(RelaxationParams::new(0.0, 1.0, 1.0).validate().is_err());
        // tau_c is irrelevant while its source is off
        assert!(RelaxationParams::new(1.0, -1.0, 1.0).validate().is_ok());
        assert!(RelaxationParams::all_enabled(1.0, -1.0, 1.0).validate().is_err());
    }
}

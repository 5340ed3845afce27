#![allow(dead_code)]

use proptest::prelude::*;
use shtc_core::state::make_mechanical_equilibrium;
use shtc_core::{Mixture64, PhaseEos64, PhaseEosSpec, Primitive64};

pub fn polytropic() -> impl Strategy<Value = PhaseEos64> {
    (0.5..5.0f64, 1.2..3.0f64).prop_map(|(k, g)| PhaseEosSpec::polytropic(k, g))
}

pub fn isothermal() -> impl Strategy<Value = PhaseEos64> {
    (0.5..4.0f64).prop_map(PhaseEosSpec::isothermal)
}

pub fn stiffened() -> impl Strategy<Value = PhaseEos64> {
    (0.5..5.0f64, 1.2..3.0f64, 0.0..5.0f64).prop_map(|(k, g, p)| PhaseEosSpec::stiffened(k, g, p))
}

pub fn any_phase() -> impl Strategy<Value = PhaseEos64> {
    prop_oneof![polytropic(), isothermal(), stiffened()]
}

pub fn mixture() -> impl Strategy<Value = Mixture64> {
    (any_phase(), any_phase(), -1.0..1.0f64).prop_map(|(a, b, off)| Mixture64::new(a, b.with_offset(off)).unwrap())
}

/// Chemically calibrated mixture with a mechanical and kinetic equilibrium state.
pub fn equilibrium() -> impl Strategy<Value = (Mixture64, Primitive64)> {
    (mixture(), -1.0..1.0f64, 0.05..0.95f64, -1.0..1.0f64).prop_map(|(mix, lp, alpha, u)| {
        let p = 10f64.powf(lp);
        let mix = mix.calibrate_offsets(p).unwrap();
        let s = make_mechanical_equilibrium(&mix, p, alpha, u).unwrap();
        (mix, s)
    })
}

/// An admissible state with arbitrary `alpha, c` and nonzero `w`.
pub fn admissible() -> impl Strategy<Value = (Mixture64, Primitive64)> {
    (mixture(), 0.05..0.95f64, 0.05..0.95f64, 0.3..5.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(mix, alpha, c, rho, u, w)| (mix, Primitive64::new(alpha, c, rho, u, w)))
}

pub fn canonical() -> Mixture64 {
    Mixture64::new(PhaseEosSpec::polytropic(1.0, 2.0), PhaseEosSpec::isothermal(1.0)).unwrap()
}

use nalgebra::Vector5;
use serde::Serialize;

use super::convexity::sorted_eigenvalues;
use super::*;
use crate::fd;
use crate::state::{is_equilibrium, EquilibriumReport, RelaxationParams};

fn arr<T: Real, const N: usize>(x: &[T; N]) -> [f64; N] {
    x.map(to_f64)
}

fn vec5<T: Real>(x: &Vector5<T>) -> [f64; 5] {
    [x[0], x[1], x[2], x[3], x[4]].map(to_f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minors {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h1_closed: f64,
    pub h2_closed: f64,
    /// `|h2 - h2_closed| / max(|h2|, |h2_closed|, 1e-4 |phi_aa phi_cc|)`
    pub h2_error: f64,
    /// `|h3| / max(1, |D^2 phi|_inf)^3`
    pub h3_normalized: f64,
}

/// The `(alpha, v)` entry of the equilibrium Hessian of `Phi`, three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaVolumeEntry {
    pub closed_form: f64,
    pub published: f64,
    pub finite_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyGradient {
    pub analytic: [f64; 5],
    pub published: [f64; 5],
    pub finite_difference: [f64; 5],
    /// Componentwise relative error of `analytic`, floored at `1e-6` of [`energy_gradient_floor`].
    pub max_error: f64,
    pub published_max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissipationDetails {
    /// The off-equilibrium state at which the sources are evaluated.
    pub state: PrimitiveState<f64>,
    pub production: f64,
    pub quadratic_form: f64,
    pub epsilon: f64,
    pub xi_sq: f64,
    pub identity_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkDetails {
    pub claimed: [f64; 5],
    pub fd_products: [f64; 5],
    pub full_source_ratio: [f64; 5],
    pub scale: f64,
    pub claimed_error: f64,
    pub gradient_error: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gate {
    pub name: &'static str,
    pub pass: bool,
}

/// Every structural check at one equilibrium state.
///
/// The leading fields form the summary; the rest are the oracle values
/// behind them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub state: PrimitiveState<f64>,
    pub lambdas: [f64; 5],
    pub eigen_residuals: [f64; 5],
    pub minors: Minors,
    pub psd_gap: f64,
    pub dissipativity_margin: f64,
    pub sk_products: [f64; 5],
    pub sk_pass: bool,

    pub fields: [Field; 5],
    pub equilibrium: EquilibriumReport<f64>,
    pub spectrum: SpectrumMatch,
    /// `max |A - A_fd| / max(1, |A_fd|)` over entries.
    pub jacobian_entry_error: f64,
    pub fd_eigen_residuals: [f64; 5],
    pub character: [Character; 5],
    pub character_measure: [f64; 5],
    pub alpha_volume_entry: AlphaVolumeEntry,
    pub energy_hessian_eigenvalues: [f64; 5],
    pub potential_hessian_eigenvalues: [f64; 4],
    pub null_modes: usize,
    /// `v_1 = v_2`: the phases coincide and `H2` vanishes identically.
    pub degenerate: bool,
    pub energy_gradient: EnergyGradient,
    pub dissipation: DissipationDetails,
    pub sk: SkDetails,
    pub gates: Vec<Gate>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn failed_gates(&self) -> Vec<&'static str> {
        self.gates.iter().filter(|g| !g.pass).map(|g| g.name).collect()
    }
}

/// Off-equilibrium companion of `s` for the source checks:
/// `alpha + alpha (1 - alpha) / 5` and `w = a / 10`, other fields unchanged.
pub fn perturbed_state<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>) -> Result<PrimitiveState<T>> {
    let a = mix.sound_speed_sq(s.alpha, s.c, s.rho)?.sqrt();
    let alpha = s.alpha + lit::<T>(0.2) * s.alpha * (T::one() - s.alpha);
    Ok(PrimitiveState {
        alpha,
        w: a * lit(0.1),
        ..*s
    })
}

/// Magnitude below which energy-gradient components are compared absolutely:
/// the larger of `|grad E|_inf` and `(|E| + |p|) / rho`, the size of the terms
/// that cancel in the `c` and `rho` components.
pub fn energy_gradient_floor<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, grad: &Vector5<T>) -> Result<T> {
    let e = crate::dynamics::energy_density(mix, &s.to_conserved())?;
    let p = mix.pressure(s.alpha, s.c, s.rho)?;
    Ok(max_abs(grad).max((e.abs() + p.abs()) / s.rho))
}

fn max_rel<T: Real>(a: &Vector5<T>, b: &Vector5<T>, floor: T) -> T {
    (0..5).map(|k| fd::rel_err(a[k], b[k], floor)).fold(T::zero(), |x, y| x.max(y))
}

/// Runs every structural check at the equilibrium state `s`.
pub fn analyze<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    s: &PrimitiveState<T>,
    tol: &Tolerances,
) -> Result<StructureReport> {
    let one = T::one();
    let eq_tol = lit::<T>(tol.equilibrium);
    let w = s.to_conserved();

    // eigenstructure and the flux-Jacobian oracle
    let eig = eigen_structure(mix, s, eq_tol, lit(tol.linear_degeneracy))?;
    let a_fd = numeric_flux_jacobian(mix, &w)?;
    let scale = speed_scale(mix, s)?;
    let spec = match_spectrum(&spectrum(&a_fd), &eig.lambdas, scale);
    let jacobian_entry_error = eig
        .jacobian
        .iter()
        .zip(a_fd.iter())
        .map(|(x, y)| to_f64((*x - *y).abs() / floor_one(y.abs())))
        .fold(0.0, f64::max);
    let fd_norm = inf_norm(&a_fd);
    let mut fd_eigen_residuals = [0.0; 5];
    for (k, r) in eig.rvecs.iter().enumerate() {
        fd_eigen_residuals[k] = to_f64(max_abs(&(a_fd * r - r * eig.lambdas[k])) / (fd_norm * max_abs(r)));
    }

    // convexity
    let v = one / s.rho;
    let hp = hessian_phi(mix, s.alpha, s.c, v)?;
    let m = hp.matrix;
    let natural = (m[(0, 0)] * m[(1, 1)]).abs();
    let h2_error = fd::rel_err(hp.h2, hp.h2_closed, lit::<T>(1e-4) * natural);
    let h3_normalized = hp.h3.abs() / floor_one(inf_norm(&m)).powi(3);
    let pot = hessian_potential_equilibrium(mix, s.alpha, s.c, v)?;
    let pot_eigs = sorted_eigenvalues(&pot);
    let total = hessian_total_energy_equilibrium(mix, s.alpha, s.c, v)?;
    let pot_scale = floor_one(inf_norm(&pot));
    let psd_ok = total.min_eigenvalue() >= -lit::<T>(tol.psd) * total.scale && pot_eigs[0] >= -lit::<T>(tol.psd) * pot_scale;
    let psd_gap = total.min_eigenvalue().min(pot_eigs[0]);
    let null_modes = total.null_modes(lit(tol.null_mode));
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let (v1, v2) = (one / p1.rho, one / p2.rho);
    let degenerate = (v1 - v2).abs() <= lit::<T>(1e-8) * v1.max(v2);
    let fd_av = {
        let f = |x: &nalgebra::Vector4<T>| mix.potential_specific_volume(x[0], x[1], x[2], x[3]);
        let x = nalgebra::Vector4::new(s.alpha, s.c, v, T::zero());
        fd::hessian_richardson(f, &x, &chart_steps(mix, s, lit(1e-2))?)?[(0, 2)]
    };

    // sources, evaluated away from equilibrium
    let sp = perturbed_state(mix, s)?;
    let wp = sp.to_conserved();
    let diss = dissipativity_check(mix, relax, &wp)?;
    let g = grad_energy_conserved(mix, &wp)?;
    let gp = published_grad_energy(mix, &wp)?;
    let gf = energy_gradient_fd(mix, &wp)?;
    let g_floor = lit::<T>(1e-6) * energy_gradient_floor(mix, &sp, &gf)?;

    let sk = sk_check(mix, relax, s, tol)?;
    let equilibrium = is_equilibrium(mix, s, eq_tol)?;

    let contact = eig.index_of(Field::Contact);
    let gates = vec![
        Gate {
            name: "spectrum",
            pass: spec.within(tol.spectrum),
        },
        Gate {
            name: "eigen_residuals",
            pass: eig.residuals.iter().all(|r| to_f64(*r) <= tol.eigen_residual),
        },
        Gate {
            name: "contact_linearly_degenerate",
            pass: eig.character[contact] == Character::LinearlyDegenerate,
        },
        Gate {
            name: "minors_positive",
            pass: hp.h1 > T::zero() && (hp.h2 > T::zero() || degenerate),
        },
        Gate {
            name: "h2_closed_form",
            pass: to_f64(h2_error) <= tol.h2_closed_form,
        },
        Gate {
            name: "h3_vanishes",
            pass: to_f64(h3_normalized) <= tol.h3,
        },
        Gate {
            name: "energy_hessian_psd",
            pass: psd_ok,
        },
        Gate {
            name: "single_null_mode",
            pass: null_modes == 1 || (degenerate && null_modes == 2),
        },
        Gate {
            name: "dissipativity",
            pass: diss.holds(lit(tol.dissipativity)),
        },
        Gate {
            name: "sk_condition",
            pass: sk.pass,
        },
        Gate {
            name: "sk_closed_forms",
            pass: to_f64(sk.claimed_error()) <= tol.sk_closed_form,
        },
    ];

    Ok(StructureReport {
        state: PrimitiveState::new(to_f64(s.alpha), to_f64(s.c), to_f64(s.rho), to_f64(s.u), to_f64(s.w)),
        lambdas: arr(&eig.lambdas),
        eigen_residuals: arr(&eig.residuals),
        minors: Minors {
            h1: to_f64(hp.h1),
            h2: to_f64(hp.h2),
            h3: to_f64(hp.h3),
            h1_closed: to_f64(hp.h1_closed),
            h2_closed: to_f64(hp.h2_closed),
            h2_error: to_f64(h2_error),
            h3_normalized: to_f64(h3_normalized),
        },
        psd_gap: to_f64(psd_gap),
        dissipativity_margin: to_f64(diss.margin),
        sk_products: arr(&sk.products),
        sk_pass: sk.pass,
        fields: eig.fields,
        equilibrium: EquilibriumReport {
            mechanical: cond(equilibrium.mechanical),
            chemical: cond(equilibrium.chemical),
            kinetic: cond(equilibrium.kinetic),
        },
        spectrum: spec,
        jacobian_entry_error,
        fd_eigen_residuals,
        character: eig.character,
        character_measure: arr(&eig.character_measure),
        alpha_volume_entry: AlphaVolumeEntry {
            closed_form: to_f64(pot[(0, 2)]),
            published: to_f64(published_alpha_v_entry(mix, s.alpha, s.c, v)?),
            finite_difference: to_f64(fd_av),
        },
        energy_hessian_eigenvalues: arr(&total.eigenvalues),
        potential_hessian_eigenvalues: arr(&pot_eigs),
        null_modes,
        degenerate,
        energy_gradient: EnergyGradient {
            analytic: vec5(&g),
            published: vec5(&gp),
            finite_difference: vec5(&gf),
            max_error: to_f64(max_rel(&g, &gf, g_floor)),
            published_max_error: to_f64(max_rel(&gp, &gf, g_floor)),
        },
        dissipation: DissipationDetails {
            state: PrimitiveState::new(to_f64(sp.alpha), to_f64(sp.c), to_f64(sp.rho), to_f64(sp.u), to_f64(sp.w)),
            production: to_f64(diss.production),
            quadratic_form: to_f64(diss.quadratic_form),
            epsilon: to_f64(diss.epsilon),
            xi_sq: to_f64(diss.xi_sq),
            identity_error: to_f64(diss.identity_error),
        },
        sk: SkDetails {
            claimed: arr(&sk.claimed),
            fd_products: arr(&sk.fd_products),
            full_source_ratio: arr(&sk.full_source_ratio),
            scale: to_f64(sk.scale),
            claimed_error: to_f64(sk.claimed_error()),
            gradient_error: to_f64(sk.gradient_error()),
        },
        gates,
    })
}

fn cond<T: Real>(c: crate::state::Condition<T>) -> crate::state::Condition<f64> {
    crate::state::Condition {
        residual: to_f64(c.residual),
        holds: c.holds,
    }
}

use nalgebra::{Matrix3, Vector3, Vector5};

use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::fd;
use crate::scalar::{lit, Real};
use crate::state::{ConservedState, RelaxationParams};

/// Accuracy target for one implicit-midpoint substep: `stiffness * h <= SUBSTEP_STIFFNESS`.
pub const SUBSTEP_STIFFNESS: f64 = 8e-3;
/// Hard cap on the number of substeps per call.
pub const MAX_SUBSTEPS: usize = 64;
/// Below this normalised increment the source is treated as negligible for the step.
const NEGLIGIBLE: f64 = 1e-13;
/// Maximum number of times a failing substep is halved.
pub const MAX_HALVINGS: u32 = 64;

const NEWTON_ITERATIONS: usize = 50;

/// `Xi = (xi_alpha, xi_c, 0, 0, xi_w)` with
/// `xi_alpha = -(rho / tau_alpha) dPhi/dalpha`, `xi_c = -(rho / tau_c) dPhi/dc`,
/// `xi_w = -(zeta / rho) dPhi/dw`. Disabled sources contribute zero.
pub fn source_vector<T: Real>(mix: &MixtureEos<T>, relax: &RelaxationParams<T>, w: &ConservedState<T>) -> Result<Vector5<T>> {
    let s = w.to_primitive()?;
    let d = mix.first_derivs(s.alpha, s.c, s.rho, s.w)?;
    let zero = T::zero();
    let xi_alpha = if relax.enable_alpha {
        -(s.rho / relax.tau_alpha) * d.d_alpha
    } else {
        zero
    };
    let xi_c = if relax.enable_c { -(s.rho / relax.tau_c) * d.d_c } else { zero };
    let xi_w = if relax.enable_w { -(relax.zeta / s.rho) * d.d_w } else { zero };
    Ok(Vector5::new(xi_alpha, xi_c, zero, zero, xi_w))
}

fn assemble<T: Real>(frozen: &ConservedState<T>, y: &Vector3<T>) -> ConservedState<T> {
    ConservedState {
        w1: y[0],
        w2: y[1],
        w5: y[2],
        ..*frozen
    }
}

fn reduced_source<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    frozen: &ConservedState<T>,
    y: &Vector3<T>,
) -> Result<Vector3<T>> {
    let xi = source_vector(mix, relax, &assemble(frozen, y))?;
    Ok(Vector3::new(xi[0], xi[1], xi[4]))
}

fn midpoint_step<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    frozen: &ConservedState<T>,
    y0: &Vector3<T>,
    h: T,
) -> Result<Vector3<T>> {
    let half = lit::<T>(0.5);
    let src = |y: &Vector3<T>| reduced_source(mix, relax, frozen, y);
    let mut y = y0 + src(y0)? * h;
    let tol = lit::<T>(1e-13);
    // simplified Newton: the iteration matrix is frozen at the predictor
    let js: Matrix3<T> = fd::jacobian(src, &((y0 + y) * half))?;
    let lu = (Matrix3::identity() - js * (half * h)).lu();
    for _ in 0..NEWTON_ITERATIONS {
        let mid = (y0 + y) * half;
        let g = y - y0 - src(&mid)? * h;
        let delta = lu.solve(&g).ok_or_else(|| Error::SourceStep {
            halvings: 0,
            reason: "singular Newton matrix".into(),
        })?;
        y -= delta;
        let converged = (0..3).all(|i| delta[i].abs() <= tol * (y[i].abs() + y0[i].abs()) || delta[i] == T::zero());
        if converged {
            assemble(frozen, &y).to_primitive()?;
            return Ok(y);
        }
    }
    Err(Error::SourceStep {
        halvings: 0,
        reason: "Newton iteration did not converge".into(),
    })
}

fn advance<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    frozen: &ConservedState<T>,
    y0: &Vector3<T>,
    h: T,
    depth: u32,
) -> Result<Vector3<T>> {
    match midpoint_step(mix, relax, frozen, y0, h) {
        Ok(y) => Ok(y),
        Err(e) if depth >= MAX_HALVINGS => Err(Error::SourceStep {
            halvings: depth,
            reason: e.to_string(),
        }),
        Err(_) => {
            let half = h * lit(0.5);
            let mid = advance(mix, relax, frozen, y0, half, depth + 1)?;
            advance(mix, relax, frozen, &mid, half, depth + 1)
        }
    }
}

/// Advances `dW/dt = Xi(W)` over `dt` with `w3, w4` frozen.
///
/// Implicit midpoint on `(w1, w2, w5)` solved by Newton; the number of
/// substeps follows the local stiffness (infinity norm of the source Jacobian).
pub fn integrate_sources<T: Real>(
    mix: &MixtureEos<T>,
    relax: &RelaxationParams<T>,
    w: &ConservedState<T>,
    dt: T,
) -> Result<ConservedState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::SourceStep {
            halvings: 0,
            reason: "time step must be positive".into(),
        });
    }
    if !(relax.enable_alpha || relax.enable_c || relax.enable_w) {
        return Ok(*w);
    }
    let y0 = Vector3::new(w.w1, w.w2, w.w5);
    let src = |y: &Vector3<T>| reduced_source(mix, relax, w, y);
    let xi0 = src(&y0)?;
    let s = w.to_primitive()?;
    let speed = mix.sound_speed_sq(s.alpha, s.c, s.rho)?.sqrt();
    let scale = Vector3::new(s.rho, s.rho, speed);
    let negligible = (0..3).all(|i| (xi0[i] * dt).abs() <= lit::<T>(NEGLIGIBLE) * scale[i]);
    if negligible {
        return Ok(assemble(w, &midpoint_step(mix, relax, w, &y0, dt)?));
    }

    let js: Matrix3<T> = fd::jacobian(src, &y0)?;
    let stiffness = (0..3)
        .map(|i| js.row(i).iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .fold(T::zero(), |a, b| a.max(b));
    let mut y = y0;
    for h in substeps(stiffness, dt) {
        y = advance(mix, relax, w, &y, h, 0)?;
    }
    Ok(assemble(w, &y))
}

/// Substep sizes covering `dt`.
///
/// Uniform with `stiffness * h <= SUBSTEP_STIFFNESS` while that needs at most
/// `MAX_SUBSTEPS` steps; otherwise geometrically graded, starting from
/// `stiffness * h = SUBSTEP_STIFFNESS` so the fast transient is resolved and
/// later steps are long.
fn substeps<T: Real>(stiffness: T, dt: T) -> Vec<T> {
    let eta = lit::<T>(SUBSTEP_STIFFNESS);
    let cap = T::from_usize(MAX_SUBSTEPS).unwrap();
    let kdt = stiffness * dt;
    if !(kdt > T::zero()) || !kdt.is_finite() {
        return vec![dt];
    }
    if kdt <= eta * cap {
        let n = (kdt / eta).ceil().to_usize().unwrap_or(1).max(1);
        return vec![dt / T::from_usize(n).unwrap(); n];
    }
    let h0 = eta / stiffness;
    // find r > 1 with h0 (r^N - 1) / (r - 1) = dt
    let total = |r: T| h0 * (r.powf(cap) - T::one()) / (r - T::one());
    let (mut lo, mut hi) = (T::one() + lit(1e-12), lit::<T>(2.0));
    while total(hi) < dt {
        hi *= lit(2.0);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if total(mid) < dt {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = (lo + hi) * lit(0.5);
    let mut steps: Vec<T> = (0..MAX_SUBSTEPS).map(|j| h0 * r.powi(j as i32)).collect();
    // absorb the bisection residue into the last step
    let sum = steps.iter().fold(T::zero(), |a, b| a + *b);
    let last = steps.len() - 1;
    steps[last] += dt - sum;
    steps
}

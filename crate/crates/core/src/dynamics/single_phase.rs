//! Single-phase barotropic Euler reference solver.
//!
//! Same Rusanov flux, time-step rule and output cadence as the two-phase
//! solver; with identical phases, uniform `alpha = c` and `w = 0` the
//! two-phase `(rho, rho u)` components must reproduce it.

use crate::eos::PhaseEosSpec;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

use super::solver::{BoundaryCondition, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhaseCell<T> {
    pub rho: T,
    pub momentum: T,
}

fn flux<T: Real>(spec: &PhaseEosSpec<T>, c: &SinglePhaseCell<T>) -> Result<(T, T, T)> {
    let u = c.momentum / c.rho;
    let p = spec.pressure(c.rho)?;
    let a = spec.sound_speed_sq(c.rho)?.sqrt();
    Ok((c.momentum, c.momentum * u + p, u.abs() + a))
}

fn advance<T: Real>(spec: &PhaseEosSpec<T>, config: &SimConfig<T>, cells: &mut [SinglePhaseCell<T>], t: T, dt_limit: T) -> Result<T> {
    let n = cells.len();
    let dx = config.dx();
    let mut smax = T::zero();
    let mut fluxes = Vec::with_capacity(n);
    for c in cells.iter() {
        let f = flux(spec, c)?;
        smax = smax.max(f.2);
        fluxes.push(f);
    }
    let dt = (config.cfl * dx / smax).min(dt_limit);
    let (gl, gr) = match config.bc {
        BoundaryCondition::Periodic => (n - 1, 0),
        BoundaryCondition::Transmissive => (0, n - 1),
    };
    let half = lit::<T>(0.5);
    let face = |l: usize, r: usize| {
        let (fl, fr) = (fluxes[l], fluxes[r]);
        let s = fl.2.max(fr.2);
        (
            half * (fl.0 + fr.0) - half * s * (cells[r].rho - cells[l].rho),
            half * (fl.1 + fr.1) - half * s * (cells[r].momentum - cells[l].momentum),
        )
    };
    let faces: Vec<(T, T)> = (0..=n)
        .map(|k| {
            let l = if k == 0 { gl } else { k - 1 };
            let r = if k == n { gr } else { k };
            face(l, r)
        })
        .collect();
    let ratio = dt / dx;
    for (i, c) in cells.iter_mut().enumerate() {
        c.rho -= ratio * (faces[i + 1].0 - faces[i].0);
        c.momentum -= ratio * (faces[i + 1].1 - faces[i].1);
        if !(c.rho > T::zero()) {
            return Err(Error::Cell {
                t: to_f64(t + dt),
                cell: i,
                reason: "non-positive density".into(),
            });
        }
    }
    Ok(dt)
}

/// Runs the single-phase scheme with the density and velocity of `config.initial`
/// and returns `(t, cells)` at the same output times as the two-phase solver.
pub fn reference_run<T: Real>(spec: &PhaseEosSpec<T>, config: &SimConfig<T>) -> Result<Vec<(T, Vec<SinglePhaseCell<T>>)>> {
    config.validate()?;
    let mut cells: Vec<SinglePhaseCell<T>> = (0..config.n_cells)
        .map(|i| {
            let s = config.initial.at(config.cell_center(i), config.x_left, config.x_right);
            SinglePhaseCell {
                rho: s.rho,
                momentum: s.rho * s.u,
            }
        })
        .collect();
    let mut out = vec![(T::zero(), cells.clone())];
    let t_end = config.t_end;
    let eps = t_end * lit(1e-12);
    let mut t = T::zero();
    let mut next_output = config.output_every.map(|e| e.min(t_end)).unwrap_or(t_end);
    while t < t_end - eps {
        let target = next_output.min(t_end);
        t += advance(spec, config, &mut cells, t, target - t)?;
        if t >= target - eps {
            t = target;
            out.push((t, cells.clone()));
            next_output = match config.output_every {
                Some(every) => target + every,
                None => t_end,
            };
        }
    }
    Ok(out)
}

use nalgebra::Vector5;
use serde::{Deserialize, Serialize};

use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{ConservedState, PrimitiveState, RelaxationParams};

use super::energy::total_energy;
use super::flux::{max_wave_speed, rusanov_flux};
use super::source::integrate_sources;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Periodic,
    /// Zeroth-order extrapolation of the edge cells.
    Transmissive,
}

/// `base + amplitude * sin(2 pi modes (x - x_left) / L)`, componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothProfile<T> {
    pub base: PrimitiveState<T>,
    pub amplitude: PrimitiveState<T>,
    pub modes: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData<T> {
    Riemann {
        left: PrimitiveState<T>,
        right: PrimitiveState<T>,
        x0: T,
    },
    Smooth(SmoothProfile<T>),
}

impl<T: Real> InitialData<T> {
    /// Primitive state at position `x` of a domain `[x_left, x_right]`.
    pub fn at(&self, x: T, x_left: T, x_right: T) -> PrimitiveState<T> {
        match self {
            InitialData::Riemann { left, right, x0 } => {
                if x < *x0 {
                    *left
                } else {
                    *right
                }
            }
            InitialData::Smooth(p) => {
                let phase = T::two_pi() * T::from_u32(p.modes).unwrap() * (x - x_left) / (x_right - x_left);
                let s = phase.sin();
                PrimitiveState {
                    alpha: p.base.alpha + p.amplitude.alpha * s,
                    c: p.base.c + p.amplitude.c * s,
                    rho: p.base.rho + p.amplitude.rho * s,
                    u: p.base.u + p.amplitude.u * s,
                    w: p.base.w + p.amplitude.w * s,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    pub n_cells: usize,
    pub x_left: T,
    pub x_right: T,
    pub cfl: T,
    pub t_end: T,
    pub bc: BoundaryCondition,
    pub relax: RelaxationParams<T>,
    pub initial: InitialData<T>,
    /// Output cadence; `None` writes only the initial and final snapshots.
    pub output_every: Option<T>,
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::Setup("n_cells must be at least 2".into()));
        }
        if !(self.x_right > self.x_left) {
            return Err(Error::Setup("x_right must exceed x_left".into()));
        }
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::Setup("cfl must lie in (0, 1]".into()));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(Error::Setup("t_end must be non-negative".into()));
        }
        if let Some(every) = self.output_every {
            if !(every > T::zero()) {
                return Err(Error::Setup("output_every must be positive".into()));
            }
        }
        self.relax.validate()
    }

    pub fn dx(&self) -> T {
        (self.x_right - self.x_left) / T::from_usize(self.n_cells).unwrap()
    }

    pub fn cell_center(&self, i: usize) -> T {
        self.x_left + (T::from_usize(i).unwrap() + lit(0.5)) * self.dx()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics<T> {
    pub mass: T,
    pub momentum: T,
    pub energy: T,
    pub max_dp: T,
    pub max_w: T,
}

impl<T: Real> Diagnostics<T> {
    pub fn compute(mix: &MixtureEos<T>, cells: &[ConservedState<T>], dx: T) -> Result<Self> {
        let mut d = Diagnostics {
            mass: T::zero(),
            momentum: T::zero(),
            energy: T::zero(),
            max_dp: T::zero(),
            max_w: T::zero(),
        };
        for w in cells {
            let s = w.to_primitive()?;
            let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
            d.mass += dx * w.w3;
            d.momentum += dx * w.w4;
            d.max_dp = d.max_dp.max((p1.p - p2.p).abs());
            d.max_w = d.max_w.max(s.w.abs());
        }
        d.energy = total_energy(mix, cells, dx)?;
        Ok(d)
    }
}

/// Cell averages at time `t` plus their diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot<T> {
    pub t: T,
    pub x_left: T,
    pub dx: T,
    pub cells: Vec<ConservedState<T>>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> FieldSnapshot<T> {
    pub fn new(mix: &MixtureEos<T>, t: T, x_left: T, dx: T, cells: Vec<ConservedState<T>>) -> Result<Self> {
        let diagnostics = Diagnostics::compute(mix, &cells, dx)?;
        Ok(Self {
            t,
            x_left,
            dx,
            cells,
            diagnostics,
        })
    }

    pub fn cell_center(&self, i: usize) -> T {
        self.x_left + (T::from_usize(i).unwrap() + lit(0.5)) * self.dx
    }
}

fn cell_error<T: Real>(t: T, cell: usize, e: Error) -> Error {
    match e {
        Error::Cell { .. } => e,
        other => Error::Cell {
            t: to_f64(t),
            cell,
            reason: other.to_string(),
        },
    }
}

fn half_source<T: Real>(mix: &MixtureEos<T>, config: &SimConfig<T>, cells: &mut [ConservedState<T>], dt: T, t: T) -> Result<()> {
    for (i, w) in cells.iter_mut().enumerate() {
        *w = integrate_sources(mix, &config.relax, w, dt).map_err(|e| cell_error(t, i, e))?;
    }
    Ok(())
}

/// Largest explicit step `cfl dx / max_cells s`.
pub fn stable_dt<T: Real>(mix: &MixtureEos<T>, config: &SimConfig<T>, snap: &FieldSnapshot<T>) -> Result<T> {
    let mut smax = T::zero();
    for (i, w) in snap.cells.iter().enumerate() {
        smax = smax.max(max_wave_speed(mix, w).map_err(|e| cell_error(snap.t, i, e))?);
    }
    if !(smax > T::zero()) {
        return Err(Error::Setup("maximum wave speed vanished".into()));
    }
    Ok(config.cfl * snap.dx / smax)
}

fn hyperbolic<T: Real>(mix: &MixtureEos<T>, config: &SimConfig<T>, cells: &mut [ConservedState<T>], dt: T, t: T) -> Result<()> {
    let n = cells.len();
    let (ghost_left, ghost_right) = match config.bc {
        BoundaryCondition::Periodic => (cells[n - 1], cells[0]),
        BoundaryCondition::Transmissive => (cells[0], cells[n - 1]),
    };
    // faces[k] sits between cell k-1 and cell k
    let mut faces: Vec<Vector5<T>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let left = if k == 0 { &ghost_left } else { &cells[k - 1] };
        let right = if k == n { &ghost_right } else { &cells[k] };
        faces.push(rusanov_flux(mix, left, right).map_err(|e| cell_error(t, k.min(n - 1), e))?);
    }
    let ratio = dt / config.dx();
    for (i, w) in cells.iter_mut().enumerate() {
        let next = w.to_vector() - (faces[i + 1] - faces[i]) * ratio;
        let next = ConservedState::from_vector(&next);
        next.to_primitive().map_err(|e| cell_error(t + dt, i, e))?;
        *w = next;
    }
    Ok(())
}

/// One Strang-split step of size `min(stable dt, dt_limit)`: half source, hyperbolic update, half source.
pub fn step<T: Real>(mix: &MixtureEos<T>, config: &SimConfig<T>, snap: &FieldSnapshot<T>, dt_limit: Option<T>) -> Result<FieldSnapshot<T>> {
    let mut dt = stable_dt(mix, config, snap)?;
    if let Some(limit) = dt_limit {
        dt = dt.min(limit);
    }
    let half = dt * lit(0.5);
    let mut cells = snap.cells.clone();
    half_source(mix, config, &mut cells, half, snap.t)?;
    hyperbolic(mix, config, &mut cells, dt, snap.t)?;
    half_source(mix, config, &mut cells, half, snap.t + dt)?;
    FieldSnapshot::new(mix, snap.t + dt, snap.x_left, snap.dx, cells)
}

/// A running simulation.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub mix: MixtureEos<T>,
    pub config: SimConfig<T>,
    pub snapshot: FieldSnapshot<T>,
    pub steps: usize,
}

impl<T: Real> Simulation<T> {
    pub fn new(mix: MixtureEos<T>, config: SimConfig<T>) -> Result<Self> {
        config.validate()?;
        let mut cells = Vec::with_capacity(config.n_cells);
        for i in 0..config.n_cells {
            let s = config.initial.at(config.cell_center(i), config.x_left, config.x_right);
            s.validate(lit(crate::state::FRACTION_MARGIN))
                .map_err(|e| cell_error(T::zero(), i, e))?;
            cells.push(s.to_conserved());
        }
        let snapshot = FieldSnapshot::new(&mix, T::zero(), config.x_left, config.dx(), cells)?;
        Ok(Self {
            mix,
            config,
            snapshot,
            steps: 0,
        })
    }

    pub fn step(&mut self, dt_limit: Option<T>) -> Result<()> {
        self.snapshot = step(&self.mix, &self.config, &self.snapshot, dt_limit)?;
        self.steps += 1;
        Ok(())
    }

    /// Advances until `t_end`, handing each output snapshot (initial, cadence, final) to `observer`.
    pub fn run<F>(&mut self, mut observer: F) -> Result<()>
    where
        F: FnMut(&FieldSnapshot<T>) -> Result<()>,
    {
        observer(&self.snapshot)?;
        let t_end = self.config.t_end;
        let mut next_output = self.config.output_every.map(|e| e.min(t_end)).unwrap_or(t_end);
        // tolerance for declaring an output time reached
        let eps = t_end * lit(1e-12);
        while self.snapshot.t < t_end - eps {
            let target = next_output.min(t_end);
            self.step(Some(target - self.snapshot.t))?;
            if self.snapshot.t >= target - eps {
                self.snapshot.t = target;
                observer(&self.snapshot)?;
                next_output = match self.config.output_every {
                    Some(every) => target + every,
                    None => t_end,
                };
            }
        }
        Ok(())
    }
}

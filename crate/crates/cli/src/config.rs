//! TOML configuration shared by all subcommands.
//!
//! Keys are snake_case; the camelCase spellings (`nStates`, `alphaRange`,
//! `tEnd`, ...) are accepted as aliases. Unknown keys are rejected.
//!
//! ```toml
//! [phase1]
//! family = "polytropic"      # or "isothermal", "stiffened"
//! K = 1.0
//! gamma = 2.0
//!
//! [phase2]
//! family = "isothermal"
//! cT2 = 1.0
//!
//! [relax]
//! tau_alpha = 0.01
//! tau_c = 0.01
//! zeta = 10.0
//!
//! [sampling]
//! n_states = 200
//! seed = 7
//! alpha_range = [0.05, 0.95]
//! pressure_range = [0.5, 8.0]
//! u_range = [-1.0, 1.0]
//!
//! [tolerances]
//! spectrum = 1e-5
//!
//! [sim]
//! n_cells = 200
//! t_end = 0.2
//! output_every = 0.05
//! calibrate_pressure = 4.0
//!
//! [initial]
//! kind = "riemann"
//! x0 = 0.5
//! left = { pressure = 4.0, alpha = 0.5 }
//! right = { pressure = 1.0, alpha = 0.5 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use shtc_core::dynamics::{BoundaryCondition, InitialData, SmoothProfile};
use shtc_core::state::make_mechanical_equilibrium;
use shtc_core::structure::Tolerances;
use shtc_core::{Mixture64, PhaseEos64, Primitive64, Relaxation64, SimConfig64};

use crate::error::config_error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub phase1: PhaseEos64,
    pub phase2: PhaseEos64,
    #[serde(default = "default_relax")]
    pub relax: Relaxation64,
    pub sampling: Option<Sampling>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub sim: Option<SimSection>,
    pub initial: Option<InitialSection>,
}

fn default_relax() -> Relaxation64 {
    Relaxation64::all_enabled(1e-2, 1e-2, 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(alias = "nStates")]
    pub n_states: usize,
    pub seed: u64,
    #[serde(default = "default_alpha_range", alias = "alphaRange")]
    pub alpha_range: [f64; 2],
    #[serde(default = "default_pressure_range", alias = "pressureRange")]
    pub pressure_range: [f64; 2],
    #[serde(default = "default_u_range", alias = "uRange")]
    pub u_range: [f64; 2],
}

fn default_alpha_range() -> [f64; 2] {
    [0.05, 0.95]
}
fn default_pressure_range() -> [f64; 2] {
    [0.5, 8.0]
}
fn default_u_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(alias = "nCells")]
    pub n_cells: usize,
    #[serde(default, alias = "xLeft")]
    pub x_left: f64,
    #[serde(default = "one", alias = "xRight")]
    pub x_right: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(alias = "tEnd")]
    pub t_end: f64,
    #[serde(default = "default_bc")]
    pub bc: BoundaryCondition,
    #[serde(default, alias = "outputEvery")]
    pub output_every: Option<f64>,
    /// Shift the phase energy offsets so that chemical equilibrium holds at this pressure.
    #[serde(default, alias = "calibratePressure")]
    pub calibrate_pressure: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn default_cfl() -> f64 {
    0.8
}
fn default_bc() -> BoundaryCondition {
    BoundaryCondition::Periodic
}

/// A state given directly or as a mechanical equilibrium at `pressure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Primitive(PrimitiveSpec),
    Equilibrium(EquilibriumSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveSpec {
    pub alpha: f64,
    pub c: f64,
    pub rho: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSpec {
    pub pressure: f64,
    pub alpha: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSection {
    Riemann {
        left: StateSpec,
        right: StateSpec,
        #[serde(default = "half")]
        x0: f64,
    },
    Smooth {
        base: StateSpec,
        #[serde(default)]
        amplitude: Amplitude,
        #[serde(default = "one_mode")]
        modes: u32,
    },
}

fn half() -> f64 {
    0.5
}
fn one_mode() -> u32 {
    1
}

impl StateSpec {
    pub fn resolve(&self, mix: &Mixture64) -> anyhow::Result<Primitive64> {
        match *self {
            StateSpec::Primitive(p) => Ok(Primitive64::new(p.alpha, p.c, p.rho, p.u, p.w)),
            StateSpec::Equilibrium(e) => {
                let s = make_mechanical_equilibrium(mix, e.pressure, e.alpha, e.u)
                    .map_err(|err| config_error(format!("initial state at pressure {}: {err}", e.pressure)))?;
                Ok(Primitive64 { w: e.w, ..s })
            }
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| config_error(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without knowing the subcommand.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.mixture()?;
        if let Some(s) = &self.sampling {
            s.validate()?;
        }
        Ok(())
    }

    /// The mixture with the offsets exactly as declared.
    pub fn mixture(&self) -> anyhow::Result<Mixture64> {
        Mixture64::new(self.phase1, self.phase2).map_err(|e| config_error(e.to_string()))
    }

    pub fn sampling(&self) -> anyhow::Result<&Sampling> {
        self.sampling.as_ref().ok_or_else(|| config_error("missing [sampling] section"))
    }

    /// Mixture and solver setup for `simulate`.
    pub fn simulation(&self) -> anyhow::Result<(Mixture64, SimConfig64)> {
        let sim = self.sim.as_ref().ok_or_else(|| config_error("missing [sim] section"))?;
        let init = self.initial.as_ref().ok_or_else(|| config_error("missing [initial] section"))?;
        let mut mix = self.mixture()?;
        if let Some(p) = sim.calibrate_pressure {
            mix = mix
                .calibrate_offsets(p)
                .map_err(|e| config_error(format!("calibrate_pressure: {e}")))?;
        }
        let initial = match *init {
            InitialSection::Riemann { left, right, x0 } => InitialData::Riemann {
                left: left.resolve(&mix)?,
                right: right.resolve(&mix)?,
                x0,
            },
            InitialSection::Smooth { base, amplitude: a, modes } => InitialData::Smooth(SmoothProfile {
                base: base.resolve(&mix)?,
                amplitude: Primitive64::new(a.alpha, a.c, a.rho, a.u, a.w),
                modes,
            }),
        };
        let config = SimConfig64 {
            n_cells: sim.n_cells,
            x_left: sim.x_left,
            x_right: sim.x_right,
            cfl: sim.cfl,
            t_end: sim.t_end,
            bc: sim.bc,
            relax: self.relax,
            initial,
            output_every: sim.output_every,
        };
        config.validate().map_err(|e| config_error(e.to_string()))?;
        Ok((mix, config))
    }
}

impl Sampling {
    pub fn validate(&self) -> anyhow::Result<()> {
        let [a0, a1] = self.alpha_range;
        let [p0, p1] = self.pressure_range;
        let [u0, u1] = self.u_range;
        if self.n_states == 0 {
            return Err(config_error("sampling.n_states must be at least 1"));
        }
        if !(0.0 < a0 && a0 <= a1 && a1 < 1.0) {
            return Err(config_error("sampling.alpha_range must satisfy 0 < lo <= hi < 1"));
        }
        if !(0.0 < p0 && p0 <= p1 && p1.is_finite()) {
            return Err(config_error("sampling.pressure_range must satisfy 0 < lo <= hi < inf"));
        }
        if !(u0 <= u1 && u0.is_finite() && u1.is_finite()) {
            return Err(config_error("sampling.u_range must satisfy lo <= hi"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        [phase1]
        family = "polytropic"
        K = 1
        gamma = 2
        [phase2]
        family = "ideal-isothermal"
        cT2 = 1.0
    "#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = Config::from_toml(BASE).unwrap();
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert!(cfg.relax.enable_alpha && cfg.relax.enable_c && cfg.relax.enable_w);
        assert!(cfg.sampling.is_none());
    }

    #[test]
    fn camel_case_aliases_are_accepted() {
        let text = format!("{BASE}\n[sampling]\nnStates = 3\nseed = 1\nalphaRange = [0.2, 0.8]\n");
        let cfg = Config::from_toml(&text).unwrap();
        let s = cfg.sampling.unwrap();
        assert_eq!((s.n_states, s.alpha_range), (3, [0.2, 0.8]));
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_config_errors() {
        for extra in [
            "\n[sampling]\nn_states = 1\nseed = 1\ncolour = 3\n",
            "\n[sampling]\nn_states = 0\nseed = 1\n",
            "\n[tolerances]\nspectrum = \"x\"\n",
        ] {
            let err = Config::from_toml(&format!("{BASE}{extra}")).unwrap_err();
            assert_eq!(crate::error::exit_code(&err), 2, "{err}");
        }
    }

    #[test]
    fn states_resolve_in_both_forms() {
        let text = format!(
            "{BASE}\n[sim]\nn_cells = 10\nt_end = 0.1\ncalibrate_pressure = 4\n[initial]\nkind = \"riemann\"\nleft = {{ pressure = 4, alpha = 0.5, u = 0.3 }}\nright = {{ alpha = 0.5, c = 0.25, rho = 2, w = 0.1 }}\n"
        );
        let (mix, sim) = Config::from_toml(&text).unwrap().simulation().unwrap();
        let InitialData::Riemann { left, right, x0 } = sim.initial else {
            panic!()
        };
        assert_eq!(x0, 0.5);
        assert!((left.rho - 3.0).abs() < 1e-12 && (left.c - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(right, Primitive64::new(0.5, 0.25, 2.0, 0.0, 0.1));
        assert!(mix.phase1.phi0 != 0.0 || mix.phase2.phi0 != 0.0);
    }

    #[test]
    fn missing_sections_are_reported() {
        let cfg = Config::from_toml(BASE).unwrap();
        assert_eq!(crate::error::exit_code(&cfg.simulation().unwrap_err()), 2);
        assert_eq!(crate::error::exit_code(&cfg.sampling().unwrap_err()), 2);
    }
}

//! Structural verification sweep over sampled equilibrium states.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use shtc_core::state::make_mechanical_equilibrium;
use shtc_core::structure::{analyze, Tolerances};
use shtc_core::{Mixture64, PhaseEos64, Relaxation64, StructureReport64};

use crate::config::{Config, Sampling};
use crate::error::Outcome;

/// Volume fractions always appended to a sweep to probe the vanishing-phase limits.
pub const VANISHING_ALPHAS: [f64; 2] = [1e-3, 1.0 - 1e-3];

/// Failing states echoed to stderr; the report lists all of them.
const ECHO_LIMIT: usize = 10;

/// Name of the generator recorded in the report.
pub const GENERATOR: &str = "ChaCha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Sampled,
    VanishingPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub index: usize,
    pub origin: Origin,
    pub pressure: f64,
    pub alpha: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateOutcome {
    #[serde(flatten)]
    pub sample: Sample,
    pub pass: bool,
    pub failed_gates: Vec<&'static str>,
    /// Set when the state could not be built or analyzed.
    pub error: Option<String>,
    pub report: Option<StructureReport64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub states: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    /// Failure count per gate, in name order.
    pub gate_failures: BTreeMap<&'static str, usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub generator: &'static str,
    pub seed: u64,
    pub phase1: PhaseEos64,
    pub phase2: PhaseEos64,
    pub relax: Relaxation64,
    pub sampling: Sampling,
    pub tolerances: Tolerances,
    pub summary: Summary,
    pub states: Vec<StateOutcome>,
}

/// Maps `u` in `[0, 1)` onto `[lo, hi]`; a degenerate range pins the value.
fn affine(lo: f64, hi: f64, u: f64) -> f64 {
    lo + (hi - lo) * u
}

/// `n_states` draws (uniform `alpha`, log-uniform pressure, uniform `u`, in that
/// order per state) followed by the vanishing-phase probes at the geometric-mean
/// pressure and mid-range velocity.
pub fn sample_states(s: &Sampling) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let [a0, a1] = s.alpha_range;
    let [p0, p1] = s.pressure_range;
    let [u0, u1] = s.u_range;
    let mut out: Vec<Sample> = (0..s.n_states)
        .map(|index| {
            let alpha = affine(a0, a1, rng.random::<f64>());
            let pressure = affine(p0.ln(), p1.ln(), rng.random::<f64>()).exp();
            let u = affine(u0, u1, rng.random::<f64>());
            Sample {
                index,
                origin: Origin::Sampled,
                pressure,
                alpha,
                u,
            }
        })
        .collect();
    for alpha in VANISHING_ALPHAS {
        out.push(Sample {
            index: out.len(),
            origin: Origin::VanishingPhase,
            pressure: (p0 * p1).sqrt(),
            alpha,
            u: 0.5 * (u0 + u1),
        });
    }
    out
}

/// Calibrates the offsets at the sample pressure, builds the equilibrium and analyzes it.
pub fn check_sample(mix: &Mixture64, relax: &Relaxation64, tol: &Tolerances, sample: Sample) -> StateOutcome {
    let result = mix
        .calibrate_offsets(sample.pressure)
        .and_then(|m| make_mechanical_equilibrium(&m, sample.pressure, sample.alpha, sample.u).map(|s| (m, s)))
        .and_then(|(m, s)| analyze(&m, relax, &s, tol));
    match result {
        Ok(report) => {
            let failed_gates = report.failed_gates();
            StateOutcome {
                sample,
                pass: failed_gates.is_empty(),
                failed_gates,
                error: None,
                report: Some(report),
            }
        }
        Err(e) => StateOutcome {
            sample,
            pass: false,
            failed_gates: vec![],
            error: Some(e.to_string()),
            report: None,
        },
    }
}

/// Runs the sweep. States are analyzed in parallel and collected in sample order,
/// so the report does not depend on the thread count.
pub fn run_verify(cfg: &Config) -> anyhow::Result<VerifyReport> {
    let sampling = cfg.sampling()?.clone();
    let mix = cfg.mixture()?;
    let samples = sample_states(&sampling);
    info!(
        "verifying {} states ({} sampled, seed {})",
        samples.len(),
        sampling.n_states,
        sampling.seed
    );
    let states: Vec<StateOutcome> = samples
        .into_par_iter()
        .map(|s| {
            let out = check_sample(&mix, &cfg.relax, &cfg.tolerances, s);
            debug!("state {}: pass = {}", s.index, out.pass);
            out
        })
        .collect();

    let mut gate_failures = BTreeMap::new();
    let (mut passed, mut errors) = (0, 0);
    for s in &states {
        passed += usize::from(s.pass);
        errors += usize::from(s.error.is_some());
        for g in &s.failed_gates {
            *gate_failures.entry(*g).or_insert(0) += 1;
        }
    }
    let summary = Summary {
        states: states.len(),
        passed,
        failed: states.len() - passed,
        errors,
        gate_failures,
        pass: passed == states.len(),
    };
    Ok(VerifyReport {
        generator: GENERATOR,
        seed: sampling.seed,
        phase1: cfg.phase1,
        phase2: cfg.phase2,
        relax: cfg.relax,
        sampling,
        tolerances: cfg.tolerances,
        summary,
        states,
    })
}

/// Human-readable digest of a report.
pub fn summary_text(r: &VerifyReport) -> String {
    let s = &r.summary;
    let mut out = String::new();
    let _ = writeln!(out, "states checked: {} (seed {}, {})", s.states, r.seed, r.generator);
    let _ = writeln!(out, "passed: {}  failed: {}  errors: {}", s.passed, s.failed, s.errors);
    for (gate, n) in &s.gate_failures {
        let _ = writeln!(out, "  gate {gate}: {n} failures");
    }
    if let Some(first) = r.states.iter().find_map(|x| x.report.as_ref()) {
        let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "first state lambdas: [{}]", fmt(&first.lambdas));
        let _ = writeln!(out, "first state SK products: [{}]", fmt(&first.sk_products));
    }
    let _ = writeln!(out, "overall: {}", if s.pass { "PASS" } else { "FAIL" });
    out
}

/// `verify --config --out`: writes the JSON report, prints the summary, and echoes failing states.
pub fn cmd_verify(config: &Path, out: &Path) -> anyhow::Result<Outcome> {
    let cfg = Config::load(config)?;
    let report = run_verify(&cfg)?;
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out, json + "\n").map_err(|e| anyhow::anyhow!("cannot write {}: {e}", out.display()))?;
    print!("{}", summary_text(&report));
    let failing: Vec<&StateOutcome> = report.states.iter().filter(|s| !s.pass).collect();
    for s in failing.iter().take(ECHO_LIMIT) {
        let why = match &s.error {
            Some(e) => e.clone(),
            None => s.failed_gates.join(", "),
        };
        eprintln!(
            "FAILED state {} (alpha = {:e}, p* = {:e}, u = {:e}): {}",
            s.sample.index, s.sample.alpha, s.sample.pressure, s.sample.u, why
        );
    }
    if failing.len() > ECHO_LIMIT {
        eprintln!("... and {} more failing states (see {})", failing.len() - ECHO_LIMIT, out.display());
    }
    Ok(if report.summary.pass { Outcome::Pass } else { Outcome::Fail })
}

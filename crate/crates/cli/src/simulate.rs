//! `simulate`: runs the finite-volume solver and writes CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::info;
use shtc_core::dynamics::{reference_run, write_diagnostics, write_diagnostics_header, write_snapshot, InitialData, Simulation};
use shtc_core::{Error as CoreError, Mixture64, SimConfig64, Snapshot64};

use crate::config::Config;
use crate::error::{config_error, Outcome};

/// What a completed run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub steps: usize,
    pub snapshots: Vec<PathBuf>,
    pub diagnostics: PathBuf,
    /// Largest deviation of `(rho, rho u)` from the single-phase run, relative
    /// to the peak density, when that comparison applies.
    pub reference_deviation: Option<f64>,
}

fn snapshot_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("snapshot_{k:04}.csv"))
}

/// Identical phase laws and `alpha = c`, `w = 0` everywhere: the run reduces to one phase.
fn reduces_to_single_phase(mix: &Mixture64, config: &SimConfig64) -> bool {
    if mix.phase1 != mix.phase2 {
        return false;
    }
    let states = match config.initial {
        InitialData::Riemann { left, right, .. } => vec![left, right],
        InitialData::Smooth(p) => {
            if p.amplitude.alpha != p.amplitude.c || p.amplitude.w != 0.0 {
                return false;
            }
            vec![p.base]
        }
    };
    states.iter().all(|s| s.alpha == s.c && s.w == 0.0)
}

fn io_err(e: std::io::Error) -> CoreError {
    CoreError::Io(e.to_string())
}

/// Runs to `t_end`, writing `snapshot_NNNN.csv` at each output time and `diagnostics.csv`.
pub fn run_simulation(mix: Mixture64, config: SimConfig64, outdir: &Path) -> anyhow::Result<SimSummary> {
    std::fs::create_dir_all(outdir).with_context(|| format!("cannot create {}", outdir.display()))?;
    let mut sim = Simulation::new(mix, config).map_err(|e| config_error(format!("invalid simulation setup: {e}")))?;
    let diagnostics = outdir.join("diagnostics.csv");
    let mut diag = BufWriter::new(File::create(&diagnostics).with_context(|| format!("cannot create {}", diagnostics.display()))?);
    write_diagnostics_header(&mut diag)?;

    let mut snapshots = vec![];
    let mut outputs: Vec<Snapshot64> = vec![];
    let reference = reduces_to_single_phase(&mix, &config);
    sim.run(|snap| {
        let path = snapshot_path(outdir, snapshots.len());
        let mut f = BufWriter::new(File::create(&path).map_err(io_err)?);
        write_snapshot(&mix, snap, &mut f)?;
        f.flush().map_err(io_err)?;
        write_diagnostics(snap, &mut diag).map_err(io_err)?;
        info!("t = {:.6}: wrote {}", snap.t, path.display());
        snapshots.push(path);
        if reference {
            outputs.push(snap.clone());
        }
        Ok(())
    })
    .map_err(|e| anyhow::anyhow!("solver aborted: {e}"))?;
    diag.flush()?;

    let reference_deviation = if reference {
        let runs = reference_run(&mix.phase1, &config).map_err(|e| anyhow::anyhow!("single-phase reference run failed: {e}"))?;
        let mut dev: f64 = 0.0;
        let mut rho_max: f64 = 0.0;
        for (snap, (_, cells)) in outputs.iter().zip(&runs) {
            for (w, r) in snap.cells.iter().zip(cells) {
                rho_max = rho_max.max(r.rho);
                dev = dev.max((w.w3 - r.rho).abs()).max((w.w4 - r.momentum).abs());
            }
        }
        Some(dev / rho_max)
    } else {
        None
    };
    Ok(SimSummary {
        steps: sim.steps,
        snapshots,
        diagnostics,
        reference_deviation,
    })
}

/// `simulate --config --outdir`.
pub fn cmd_simulate(config: &Path, outdir: &Path) -> anyhow::Result<Outcome> {
    let cfg = Config::load(config)?;
    let (mix, sim) = cfg.simulation()?;
    let summary = run_simulation(mix, sim, outdir)?;
    println!("steps: {}", summary.steps);
    println!("snapshots: {}", summary.snapshots.len());
    println!("diagnostics: {}", summary.diagnostics.display());
    if let Some(d) = summary.reference_deviation {
        println!("single-phase reference deviation: {d:e}");
    }
    Ok(Outcome::Pass)
}

//! CSV writers for snapshots and the diagnostics time series.

use std::io::{self, Write};

use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

use super::energy::energy_density;
use super::solver::FieldSnapshot;

pub const SNAPSHOT_HEADER: &str = "t,x,alpha,c,rho,u,w,p1,p2,E";
pub const DIAGNOSTICS_HEADER: &str = "t,mass,momentum,energy,max_dp,max_w";

/// Writes one row per cell; `E` is the energy density `rho Phi + rho u^2 / 2`.
pub fn write_snapshot<T: Real, W: Write>(mix: &MixtureEos<T>, snap: &FieldSnapshot<T>, out: &mut W) -> Result<()> {
    let mut rows = Vec::with_capacity(snap.cells.len());
    for (i, w) in snap.cells.iter().enumerate() {
        let s = w.to_primitive()?;
        let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
        let e = energy_density(mix, w)?;
        rows.push([snap.t, snap.cell_center(i), s.alpha, s.c, s.rho, s.u, s.w, p1.p, p2.p, e]);
    }
    let io = |e: io::Error| Error::Io(e.to_string());
    writeln!(out, "{SNAPSHOT_HEADER}").map_err(io)?;
    for row in rows {
        write_row(out, &row).map_err(io)?;
    }
    Ok(())
}

pub fn write_diagnostics_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "{DIAGNOSTICS_HEADER}")
}

pub fn write_diagnostics<T: Real, W: Write>(snap: &FieldSnapshot<T>, out: &mut W) -> io::Result<()> {
    let d = &snap.diagnostics;
    write_row(out, &[snap.t, d.mass, d.momentum, d.energy, d.max_dp, d.max_w])
}

fn write_row<T: Real, W: Write>(out: &mut W, row: &[T]) -> io::Result<()> {
    let line: Vec<String> = row.iter().map(|x| format!("{:e}", to_f64(*x))).collect();
    writeln!(out, "{}", line.join(","))
}

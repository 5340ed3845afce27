//! `eigen`: prints the closed-form eigenstructure at one equilibrium state.

use std::fmt::Write as _;
use std::path::Path;

use shtc_core::state::is_equilibrium;
use shtc_core::structure::{eigen_structure, require_equilibrium, EigenStructure, Tolerances};
use shtc_core::{Mixture64, Primitive64};

use crate::config::Config;
use crate::error::{config_error, Outcome};

/// Parses `alpha,c,rho,u,w`.
pub fn parse_state(text: &str) -> anyhow::Result<Primitive64> {
    let xs: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| config_error(format!("--state: {e}")))?;
    let [alpha, c, rho, u, w] = xs[..] else {
        return Err(config_error(format!("--state expects 5 comma-separated numbers, got {}", xs.len())));
    };
    let s = Primitive64::new(alpha, c, rho, u, w);
    s.validate(0.0).map_err(|e| config_error(format!("--state: {e}")))?;
    Ok(s)
}

pub fn table(e: &EigenStructure<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:>14} {:<21} {:>11} {:>11}   right eigenvector",
        "field", "lambda", "character", "measure", "residual"
    );
    for k in 0..5 {
        let r: Vec<String> = e.rvecs[k].iter().map(|x| format!("{x:.6e}")).collect();
        let character = serde_json::to_value(e.character[k])
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<5} {:>14.9} {:<21} {:>11.3e} {:>11.3e}   [{}]",
            e.fields[k].to_string(),
            e.lambdas[k],
            character,
            e.character_measure[k],
            e.residuals[k],
            r.join(", ")
        );
    }
    out
}

/// Eigenstructure table, or the equilibrium residuals on failure.
pub fn eigen_report(mix: &Mixture64, s: &Primitive64, tol: &Tolerances) -> anyhow::Result<Result<String, String>> {
    if let Err(e) = require_equilibrium(mix, s, tol.equilibrium) {
        let r = is_equilibrium(mix, s, tol.equilibrium)?;
        let msg = format!(
            "{e}\nresiduals: mechanical |p2 - p1|/rho = {:e}, kinetic |c(1-c)w| = {:e}",
            r.mechanical.residual, r.kinetic.residual
        );
        return Ok(Err(msg));
    }
    let e = eigen_structure(mix, s, tol.equilibrium, tol.linear_degeneracy)?;
    Ok(Ok(table(&e)))
}

/// `eigen --config --state`.
pub fn cmd_eigen(config: &Path, state: &str) -> anyhow::Result<Outcome> {
    let cfg = Config::load(config)?;
    let s = parse_state(state)?;
    match eigen_report(&cfg.mixture()?, &s, &cfg.tolerances)? {
        Ok(t) => {
            print!("{t}");
            Ok(Outcome::Pass)
        }
        Err(msg) => {
            eprintln!("{msg}");
            Ok(Outcome::Fail)
        }
    }
}

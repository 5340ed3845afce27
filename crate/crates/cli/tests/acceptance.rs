//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p shtc-cli --test acceptance`.

use std::path::PathBuf;
use std::process::Command;

use nalgebra::{Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shtc_cli::config::Sampling;
use shtc_cli::verify::{check_sample, sample_states, StateOutcome};
use shtc_core::dynamics::{integrate_sources, reference_run, BoundaryCondition, InitialData, Simulation, SmoothProfile};
use shtc_core::state::make_mechanical_equilibrium;
use shtc_core::structure::{chart_steps, dissipativity_check, Field, Tolerances};
use shtc_core::{fd, Mixture64, PhaseEosSpec, Primitive64, Relaxation64, SimConfig64, StructureReport64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn canonical_mix() -> Mixture64 {
    Mixture64::new(PhaseEosSpec::polytropic(1.0, 2.0), PhaseEosSpec::isothermal(1.0)).unwrap()
}

/// Mixtures covering every pairing of the three phase-law families.
fn regimes() -> Vec<(&'static str, Mixture64)> {
    let poly = PhaseEosSpec::polytropic(1.0, 1.4);
    let stiff = PhaseEosSpec::stiffened(2.0, 4.4, 3.0);
    vec![
        ("polytropic/isothermal", canonical_mix()),
        ("polytropic/stiffened", Mixture64::new(poly, stiff).unwrap()),
        (
            "stiffened/isothermal",
            Mixture64::new(PhaseEosSpec::stiffened(1.0, 3.0, 1.0), PhaseEosSpec::isothermal(2.0)).unwrap(),
        ),
        (
            "polytropic/polytropic",
            Mixture64::new(poly, PhaseEosSpec::polytropic(3.0, 3.0)).unwrap(),
        ),
    ]
}

fn relax() -> Relaxation64 {
    Relaxation64::all_enabled(0.02, 0.05, 8.0)
}

/// 252 equilibria per regime (250 sampled plus the two vanishing-phase probes).
fn sweep() -> Vec<(&'static str, StateOutcome)> {
    let tol = Tolerances::default();
    let mut out = vec![];
    for (k, (name, mix)) in regimes().into_iter().enumerate() {
        let sampling = Sampling {
            n_states: 250,
            seed: 100 + k as u64,
            alpha_range: [0.02, 0.98],
            pressure_range: [0.2, 10.0],
            u_range: [-1.0, 1.0],
        };
        for s in sample_states(&sampling) {
            out.push((name, check_sample(&mix, &relax(), &tol, s)));
        }
    }
    out
}

fn canonical_report() -> StructureReport64 {
    let mix = canonical_mix().calibrate_offsets(4.0).unwrap();
    let s = make_mechanical_equilibrium(&mix, 4.0, 0.5, 0.3).unwrap();
    shtc_core::structure::analyze(&mix, &relax(), &s, &Tolerances::default()).unwrap()
}

fn reports<'a>(sweep: &'a [(&str, StateOutcome)]) -> Result<Vec<&'a StructureReport64>, String> {
    sweep
        .iter()
        .map(|(name, o)| {
            o.report
                .as_ref()
                .ok_or_else(|| format!("{name} state {} not analyzed: {:?}", o.sample.index, o.error))
        })
        .collect()
}

fn criterion_1(sweep: &[(&str, StateOutcome)], canon: &StructureReport64) -> Verdict {
    let rs = match reports(sweep) {
        Ok(r) => r,
        Err(e) => return verdict(false, e),
    };
    let worst = max_of(rs.iter().map(|r| r.spectrum.max_error.max(r.spectrum.max_imag)));
    let exact = [-1.7, -0.7, 0.3, 1.3, 2.3];
    let canon_err = max_of(canon.spectrum.numeric.iter().zip(exact).map(|(a, b)| (a - b).abs() / b.abs()));
    let pass = rs.len() >= 1000 && worst <= 1e-5 && canon_err <= 1e-5;
    verdict(
        pass,
        format!(
            "{} states, worst FD spectrum error {worst:.2e}, canonical {canon_err:.2e} (tol 1e-5)",
            rs.len()
        ),
    )
}

fn criterion_2(sweep: &[(&str, StateOutcome)]) -> Verdict {
    let rs = match reports(sweep) {
        Ok(r) => r,
        Err(e) => return verdict(false, e),
    };
    let worst = max_of(rs.iter().flat_map(|r| r.eigen_residuals));
    let contact_ld = rs.iter().all(|r| {
        let k = r.fields.iter().position(|f| *f == Field::Contact).unwrap();
        r.character[k] == shtc_core::structure::Character::LinearlyDegenerate
    });
    let acoustic_gnl = rs.iter().filter(|r| !r.degenerate).all(|r| {
        r.fields
            .iter()
            .zip(r.character)
            .all(|(f, c)| *f == Field::Contact || c == shtc_core::structure::Character::GenuinelyNonlinear)
    });
    verdict(
        worst <= 1e-9 && contact_ld,
        format!("worst normalized residual {worst:.2e} (tol 1e-9); contact field linearly degenerate everywhere: {contact_ld}; acoustic fields genuinely nonlinear: {acoustic_gnl}"),
    )
}

fn criterion_3(sweep: &[(&str, StateOutcome)], canon: &StructureReport64) -> Verdict {
    let rs = match reports(sweep) {
        Ok(r) => r,
        Err(e) => return verdict(false, e),
    };
    let positive = rs.iter().all(|r| r.minors.h1 > 0.0 && (r.minors.h2 > 0.0 || r.degenerate));
    let h2 = max_of(rs.iter().map(|r| r.minors.h2_error));
    let h3 = max_of(rs.iter().map(|r| r.minors.h3_normalized));
    let psd = rs.iter().map(|r| r.psd_gap).fold(f64::INFINITY, f64::min);
    let psd_scaled_ok = rs.iter().all(|r| r.gates.iter().any(|g| g.name == "energy_hessian_psd" && g.pass));
    let one_null = rs.iter().all(|r| r.null_modes == 1 || (r.degenerate && r.null_modes == 2));
    let canon_ok = (canon.minors.h1 - 8.0).abs() <= 1e-10 * 8.0 && (canon.minors.h2 - 8.0).abs() <= 1e-10 * 8.0;
    verdict(
        positive && h2 <= 1e-10 && h3 <= 1e-9 && psd_scaled_ok && one_null && canon_ok,
        format!(
            "H1, H2 > 0: {positive}; H2 closed-form error {h2:.2e} (tol 1e-10); |H3| normalized {h3:.2e} (tol 1e-9); min Hessian eigenvalue {psd:.2e}; single null mode: {one_null}; canonical H1 = {:.12}, H2 = {:.12}",
            canon.minors.h1, canon.minors.h2
        ),
    )
}

/// Random admissible (off-equilibrium) state of a random regime.
fn admissible(rng: &mut ChaCha8Rng, mixes: &[(&str, Mixture64)]) -> (Mixture64, Primitive64) {
    loop {
        let (_, mix) = mixes[rng.random_range(0..mixes.len())];
        let mix = Mixture64::new(
            mix.phase1.with_offset(rng.random_range(-1.0..1.0)),
            mix.phase2.with_offset(rng.random_range(-1.0..1.0)),
        )
        .unwrap();
        let s = Primitive64::new(
            rng.random_range(0.02..0.98),
            rng.random_range(0.02..0.98),
            rng.random_range(0.3..6.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-0.5..0.5),
        );
        if mix.phase_points(s.alpha, s.c, s.rho).is_ok() {
            return (mix, s);
        }
    }
}

fn criterion_4() -> Verdict {
    let mixes = regimes();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut identity, mut margin, mut n) = (0.0f64, f64::INFINITY, 0);
    for _ in 0..1000 {
        let (mix, s) = admissible(&mut rng, &mixes);
        let relax = Relaxation64::all_enabled(
            rng.random_range(1e-3..1.0),
            rng.random_range(1e-3..1.0),
            rng.random_range(0.1..50.0),
        );
        match dissipativity_check(&mix, &relax, &s.to_conserved()) {
            Ok(d) => {
                identity = identity.max(d.identity_error);
                // margin relative to the production it is carved out of
                margin = margin.min(d.margin / d.production.abs().max(f64::MIN_POSITIVE));
                n += 1;
            }
            Err(e) => return verdict(false, format!("dissipativity check failed: {e}")),
        }
    }
    verdict(
        identity <= 1e-12 && margin >= -1e-12,
        format!("{n} states, identity error {identity:.2e} (tol 1e-12), smallest relative margin {margin:.2e} (tol -1e-12)"),
    )
}

fn criterion_5(sweep: &[(&str, StateOutcome)], canon: &StructureReport64) -> Verdict {
    let rs = match reports(sweep) {
        Ok(r) => r,
        Err(e) => return verdict(false, e),
    };
    let mut acoustic_err = 0.0f64;
    let mut contact_claim_err = 0.0f64;
    let mut contact_product = 0.0f64;
    let mut vanishing = 0;
    for r in &rs {
        let k = r.fields.iter().position(|f| *f == Field::Contact).unwrap();
        for j in 0..5 {
            let e = (r.sk.claimed[j] - r.sk.fd_products[j]).abs() / r.sk.scale;
            let analytic_vs_fd = (r.sk_products[j] - r.sk.fd_products[j]).abs() / r.sk.scale;
            if j == k {
                contact_claim_err = contact_claim_err.max(e);
                contact_product = contact_product.max(r.sk_products[j].abs() / r.sk.scale);
            } else {
                acoustic_err = acoustic_err.max(e).max(analytic_vs_fd);
            }
        }
        vanishing += usize::from(r.state.alpha == 1e-3 || r.state.alpha == 1.0 - 1e-3);
    }
    let all_nonzero = rs.iter().all(|r| r.sk_pass);
    let mut canon_sorted = canon.sk_products;
    canon_sorted.sort_by(f64::total_cmp);
    let canon_ok = canon_sorted
        .iter()
        .zip([-8.0, -8.0, 2.0, 2.0, 2.0])
        .all(|(a, b)| (a - b).abs() <= 1e-10 * 8.0);
    verdict(
        all_nonzero && acoustic_err <= 1e-10 && contact_claim_err <= 1e-10 && canon_ok,
        format!(
            "acoustic fields: closed forms match FD to {acoustic_err:.2e}; contact field: |product| / scale <= {contact_product:.2e}, claimed value off by {contact_claim_err:.2e} of scale; all five nonzero: {all_nonzero} ({vanishing} vanishing-phase states); canonical products {:?}",
            canon_sorted.map(|x| (x * 1e9).round() / 1e9)
        ),
    )
}

fn criterion_6() -> Verdict {
    let mixes = regimes();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    let n = 1000;
    for _ in 0..n {
        let (mix, s) = admissible(&mut rng, &mixes);
        let run = || -> shtc_core::Result<(f64, f64)> {
            let d = mix.first_derivs(s.alpha, s.c, s.rho, s.w)?;
            let a = mix.sound_speed_sq(s.alpha, s.c, s.rho)?.sqrt();
            let x = Vector4::new(s.alpha, s.c, s.rho, s.w);
            let steps = Vector4::new(
                fd::step_first(s.alpha),
                fd::step_first(s.c),
                fd::step_first(s.rho),
                1e-6 * (s.w.abs() + a),
            );
            let g = fd::gradient_with_steps(|x: &Vector4<f64>| mix.potential(x[0], x[1], x[2], x[3]), &x, &steps)?;
            let floor = 1e-3 * g.amax();
            let e1 = max_of(
                [d.d_alpha, d.d_c, d.d_rho, d.d_w]
                    .iter()
                    .zip(g.iter())
                    .map(|(a, b)| fd::rel_err(*a, *b, floor)),
            );

            let v = 1.0 / s.rho;
            let h_steps = chart_steps(&mix, &s, 1e-2)?;
            let x = Vector4::new(s.alpha, s.c, v, v * s.w);
            let h = fd::hessian_richardson(
                |x: &Vector4<f64>| mix.potential_specific_volume(x[0], x[1], x[2], x[3]),
                &x,
                &h_steps,
            )?;
            let an = mix.second_derivs(s.alpha, s.c, v, v * s.w)?.potential_matrix();
            let floor = 1e-2 * h.amax();
            let mut e2 = max_of(an.iter().zip(h.iter()).map(|(a, b)| fd::rel_err(*a, *b, floor)));
            let x3 = Vector3::new(s.alpha, s.c, v);
            let h0 = fd::hessian_richardson(
                |x: &Vector3<f64>| mix.potential_specific_volume(x[0], x[1], x[2], 0.0),
                &x3,
                &h_steps.fixed_rows::<3>(0).into_owned(),
            )?;
            let phi = mix.second_derivs(s.alpha, s.c, v, 0.0)?.phi_matrix();
            let floor = 1e-2 * h0.amax();
            e2 = e2.max(max_of(phi.iter().zip(h0.iter()).map(|(a, b)| fd::rel_err(*a, *b, floor))));
            Ok((e1, e2))
        };
        match run() {
            Ok((e1, e2)) => {
                first = first.max(e1);
                second = second.max(e2);
            }
            Err(e) => return verdict(false, format!("derivative evaluation failed: {e}")),
        }
    }
    verdict(
        first <= 1e-6 && second <= 1e-6,
        format!("{n} states, first derivatives {first:.2e}, second derivatives {second:.2e} (tol 1e-6)"),
    )
}

fn sim_config(initial: InitialData<f64>, relax: Relaxation64, t_end: f64) -> SimConfig64 {
    SimConfig64 {
        n_cells: 64,
        x_left: 0.0,
        x_right: 1.0,
        cfl: 0.8,
        t_end,
        bc: BoundaryCondition::Periodic,
        relax,
        initial,
        output_every: None,
    }
}

fn criterion_7() -> Verdict {
    let run = || -> shtc_core::Result<(f64, f64, f64, f64, f64)> {
        let mix = canonical_mix().calibrate_offsets(4.0)?;
        let zero = Primitive64::new(0.0, 0.0, 0.0, 0.0, 0.0);

        let mut fixed = 0.0f64;
        for (_, m) in regimes() {
            let m = m.calibrate_offsets(2.0)?;
            let s = make_mechanical_equilibrium(&m, 2.0, 0.4, 0.25)?;
            let mut c = sim_config(
                InitialData::Riemann {
                    left: s,
                    right: s,
                    x0: 0.5,
                },
                Relaxation64::all_enabled(0.01, 0.01, 50.0),
                1.0,
            );
            c.n_cells = 16;
            let mut sim = Simulation::new(m, c)?;
            let w0 = sim.snapshot.cells[0].to_vector();
            for _ in 0..20 {
                sim.step(None)?;
            }
            fixed = fixed.max(max_of(sim.snapshot.cells.iter().map(|w| (w.to_vector() - w0).amax() / w0.amax())));
        }

        let base = make_mechanical_equilibrium(&mix, 4.0, 0.5, 0.3)?;
        let smooth = InitialData::Smooth(SmoothProfile {
            base,
            amplitude: Primitive64::new(0.1, 0.05, 0.3, 0.2, 0.1),
            modes: 2,
        });
        let mut sim = Simulation::new(mix, sim_config(smooth, Relaxation64::all_enabled(0.05, 0.05, 5.0), 0.3))?;
        let d0 = sim.snapshot.diagnostics;
        sim.run(|_| Ok(()))?;
        let d = sim.snapshot.diagnostics;
        let conservation = ((d.mass - d0.mass).abs() / d0.mass).max((d.momentum - d0.momentum).abs() / d0.momentum.abs());

        let kinetic = InitialData::Smooth(SmoothProfile {
            base,
            amplitude: Primitive64 { w: 0.2, ..zero },
            modes: 1,
        });
        let c = sim_config(kinetic, Relaxation64::new(0.05, 0.05, 2.0), 0.5);
        let mut sim = Simulation::new(mix, c)?;
        let e0 = sim.snapshot.diagnostics.energy;
        let mut prev = e0;
        let mut rise = f64::NEG_INFINITY;
        while sim.snapshot.t < c.t_end {
            sim.step(Some(c.t_end - sim.snapshot.t))?;
            let e = sim.snapshot.diagnostics.energy;
            rise = rise.max((e - prev) / e0.abs());
            prev = e;
        }

        let spec = PhaseEosSpec::polytropic(1.0, 1.4);
        let same = Mixture64::new(spec, spec)?;
        let left = make_mechanical_equilibrium(&same, 2.0, 0.3, 0.2)?;
        let right = make_mechanical_equilibrium(&same, 0.5, 0.3, -0.1)?;
        let mut c = sim_config(
            InitialData::Riemann { left, right, x0: 0.5 },
            Relaxation64::all_enabled(0.01, 0.01, 10.0),
            0.2,
        );
        c.bc = BoundaryCondition::Transmissive;
        c.output_every = Some(0.05);
        let reference = reference_run(&spec, &c)?;
        let mut sim = Simulation::new(same, c)?;
        let mut snaps = vec![];
        sim.run(|s| {
            snaps.push(s.clone());
            Ok(())
        })?;
        let mut reduction = if snaps.len() == reference.len() { 0.0f64 } else { f64::INFINITY };
        for (snap, (_, cells)) in snaps.iter().zip(&reference) {
            for (w, r) in snap.cells.iter().zip(cells) {
                reduction = reduction.max((w.w3 - r.rho).abs().max((w.w4 - r.momentum).abs()) / r.rho);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut source = 0.0f64;
        for _ in 0..200 {
            let s = make_mechanical_equilibrium(&mix, 4.0, rng.random_range(0.05..0.95), 0.2)?;
            let s = Primitive64 {
                w: rng.random_range(-0.5..0.5),
                ..s
            };
            let zeta = rng.random_range(0.1..50.0);
            let relax = Relaxation64 {
                enable_alpha: false,
                enable_c: false,
                ..Relaxation64::all_enabled(1.0, 1.0, zeta)
            };
            let k = zeta * s.c * (1.0 - s.c) / s.rho;
            let dt = rng.random_range(0.01..0.1) / k;
            let out = integrate_sources(&mix, &relax, &s.to_conserved(), dt)?;
            let exact = s.w * (-k * dt).exp();
            source = source.max((out.w5 - exact).abs() / s.w.abs());
        }
        Ok((fixed, conservation, rise, reduction, source))
    };
    match run() {
        Ok((fixed, cons, rise, red, src)) => verdict(
            fixed <= 1e-13 && cons <= 1e-12 && rise <= 0.0 && red <= 1e-10 && src <= 1e-6,
            format!(
                "fixed point {fixed:.2e} (1e-13); mass/momentum drift {cons:.2e} (1e-12); largest per-step energy change {rise:.2e} (<= 0); single-phase reduction {red:.2e} (1e-10); source vs exponential {src:.2e} (1e-6)"
            ),
        ),
        Err(e) => verdict(false, format!("dynamics run failed: {e}")),
    }
}

fn criterion_8() -> Verdict {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let config = root.join("configs/sweep.toml");
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = vec![];
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("report_{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_shtc"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .output();
        match status {
            Ok(o) if o.status.code().is_some_and(|c| c <= 1) => {}
            Ok(o) => {
                return verdict(
                    false,
                    format!("verify exited with {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)),
                )
            }
            Err(e) => return verdict(false, format!("cannot run verify: {e}")),
        }
        match std::fs::read(&out) {
            Ok(b) => bytes.push(b),
            Err(e) => return verdict(false, format!("no report written: {e}")),
        }
    }
    let same = bytes.windows(2).all(|p| p[0] == p[1]);
    verdict(
        same,
        format!(
            "3 runs of `verify` (1 and 4 threads), {} byte reports identical: {same}",
            bytes[0].len()
        ),
    )
}

fn main() {
    let sweep = sweep();
    let canon = canonical_report();
    let results = [
        ("eigenvalue reproduction", criterion_1(&sweep, &canon)),
        ("eigenvector residuals", criterion_2(&sweep)),
        ("convexity", criterion_3(&sweep, &canon)),
        ("dissipativity", criterion_4()),
        ("Shizuta-Kawashima", criterion_5(&sweep, &canon)),
        ("derivative layer", criterion_6()),
        ("dynamics", criterion_7()),
        ("determinism", criterion_8()),
    ];
    let mut failed = 0;
    for (k, (name, v)) in results.iter().enumerate() {
        println!(
            "criterion {} {}: {}: {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

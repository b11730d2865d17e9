//! One function per subcommand; artifact paths and shapes live in
//! [`crate::artifacts`].

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use fsbl::field::{
    fit_external_velocity, pde_residual, pseudo_stream, GridSpec, Profile, ResidualMethod,
};
use fsbl::integrate::{IntegratorConfig, StopReason};
use fsbl::model::{FalknerSkanParams, FlowConstants, PseudoParams};
use fsbl::phase::{basin_map, classify_trajectory, energy, TrajectoryClass};
use fsbl::shoot::{
    self, admissible_interval, analytic_half_width, fs_profile, pseudo_profile,
    solve_falkner_skan, theorem31_bound, ShotClass,
};

use crate::artifacts::{
    BasinReport, EnergySample, FieldCheckReport, FitReport, IntervalReport, Sink, SolveFsReport,
    SolvePseudoReport,
};
use crate::{OutputOpts, StepOpts};

pub enum CliError {
    Usage(String),
    Solver(String),
    Verification(String),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
            CliError::Io(e) => write!(f, "io failure: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn config(step: &StepOpts) -> Result<IntegratorConfig<f64>, CliError> {
    let cfg = IntegratorConfig { h: step.h, t_max: step.t_max, ..IntegratorConfig::default() };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn stop_reason_fields(stop: &StopReason<f64>) -> (String, Option<f64>) {
    match stop {
        StopReason::Converged { t } => ("converged".into(), Some(*t)),
        StopReason::Diverged { t } => ("diverged".into(), Some(*t)),
        StopReason::Horizon => ("horizon".into(), None),
        StopReason::Event { tag } => (format!("event:{tag}"), None),
    }
}

fn class_name(class: TrajectoryClass) -> &'static str {
    match class {
        TrajectoryClass::Monotone => "monotone",
        TrajectoryClass::Oscillatory => "oscillatory",
        TrajectoryClass::Divergent => "divergent",
        TrajectoryClass::Indeterminate => "indeterminate",
    }
}

fn shot_class_name(class: ShotClass) -> &'static str {
    match class {
        ShotClass::Converged => "converged",
        ShotClass::Diverged => "diverged",
        ShotClass::Horizon => "horizon",
    }
}

pub fn solve_fs(m: f64, step: &StepOpts, out: &OutputOpts) -> Result<(), CliError> {
    let cfg = config(step)?;
    if !(0.0..=1.0).contains(&m) {
        eprintln!("warning: m = {m} outside [0, 1]; the miss function may not bracket a root");
    }
    let mut sink = Sink::new(&out.out_dir, out.golden, "solve-fs")?;
    sink.param("m", m);
    sink.param("h", step.h);
    sink.param("t_max", step.t_max);

    let params = FalknerSkanParams::new(m);
    match solve_falkner_skan(&params, &cfg) {
        Ok(fpp0) => {
            let profile = fs_profile(&params, fpp0, &cfg);
            let mut csv = Vec::new();
            profile.write_csv(&mut csv)?;
            sink.write_bytes("solve_fs_profile.csv", &csv)?;
            let report = SolveFsReport {
                m,
                h: step.h,
                t_max: step.t_max,
                fpp0: Some(fpp0),
                error: None,
            };
            sink.write_json("solve_fs.json", &report)?;
            sink.finish()?;
            println!("fpp0 = {fpp0:.9}");
            Ok(())
        }
        Err(e) => {
            let report = SolveFsReport {
                m,
                h: step.h,
                t_max: step.t_max,
                fpp0: None,
                error: Some(e.to_string()),
            };
            sink.write_json("solve_fs.json", &report)?;
            sink.finish()?;
            Err(CliError::Solver(e.to_string()))
        }
    }
}

/// Thin the per-sample energies to at most 1001 entries, always keeping the
/// final sample.
fn thinned_energy(traj: &fsbl::ThirdOrderTrajectory64) -> Vec<EnergySample> {
    let n = traj.len();
    let stride = n.div_ceil(1001).max(1);
    let mut out: Vec<EnergySample> = (0..n)
        .step_by(stride)
        .map(|i| EnergySample { t: traj.times[i], e: energy(traj.theta(i), traj.phi(i)) })
        .collect();
    if !(n - 1).is_multiple_of(stride) {
        let i = n - 1;
        out.push(EnergySample { t: traj.times[i], e: energy(traj.theta(i), traj.phi(i)) });
    }
    out
}

pub fn solve_pseudo(
    tau: f64,
    zeta: f64,
    d: f64,
    expect_converge: bool,
    step: &StepOpts,
    out: &OutputOpts,
) -> Result<(), CliError> {
    let cfg = config(step)?;
    if tau <= 0.0 {
        eprintln!("warning: tau = {tau} <= 0; only the trivial solution exists, expect divergence");
    }
    let mut sink = Sink::new(&out.out_dir, out.golden, "solve-pseudo")?;
    sink.param("tau", tau);
    sink.param("zeta", zeta);
    sink.param("d", d);
    sink.param("h", step.h);
    sink.param("t_max", step.t_max);

    // third-order form: keeps f itself so the profile can feed field checks
    let traj = pseudo_profile(&PseudoParams::new(tau, zeta), d, &cfg);
    let class = classify_trajectory(&traj);
    let (stop_reason, stop_t) = stop_reason_fields(&traj.stop);

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    sink.write_bytes("solve_pseudo_profile.csv", &csv)?;
    let report = SolvePseudoReport {
        tau,
        zeta,
        d,
        h: step.h,
        t_max: step.t_max,
        stop_reason,
        stop_t,
        crossings: traj.crossings.len(),
        classification: class_name(class).into(),
        energy: thinned_energy(&traj),
    };
    sink.write_json("solve_pseudo.json", &report)?;
    sink.finish()?;
    println!(
        "{} after {} crossings ({})",
        report.stop_reason,
        report.crossings,
        report.classification
    );
    if expect_converge && !traj.stop.is_converged() {
        return Err(CliError::Solver(format!("expected convergence, run stopped: {:?}", traj.stop)));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_d(
    tau: f64,
    zeta: f64,
    d_min: f64,
    d_max: f64,
    n: usize,
    jobs: usize,
    step: &StepOpts,
    out: &OutputOpts,
) -> Result<(), CliError> {
    let cfg = config(step)?;
    if n < 3 {
        return Err(CliError::Usage(format!("need at least 3 probes, got {n}")));
    }
    if d_min >= d_max || d_min.is_nan() || d_max.is_nan() {
        return Err(CliError::Usage(format!("empty probe range [{d_min}, {d_max}]")));
    }
    let mut sink = Sink::new(&out.out_dir, out.golden, "sweep-d")?;
    sink.param("tau", tau);
    sink.param("zeta", zeta);
    sink.param("d_min", d_min);
    sink.param("d_max", d_max);
    sink.param("n", n);
    sink.param("jobs", jobs);
    sink.param("h", step.h);
    sink.param("t_max", step.t_max);

    let params = PseudoParams::new(tau, zeta);
    let probes = shoot::sweep_d(&params, d_min, d_max, n, &cfg, jobs);
    let mut csv = String::from("d,classification,miss,crossings\n");
    for p in &probes {
        csv.push_str(&format!(
            "{:.16e},{},{:.16e},{}\n",
            p.d,
            shot_class_name(p.classification),
            p.miss,
            p.crossings
        ));
    }
    sink.write_bytes("sweep_d.csv", csv.as_bytes())?;

    let half = analytic_half_width(zeta);
    let mut report = IntervalReport {
        tau,
        zeta,
        n,
        analytic_lo: -half,
        analytic_hi: half,
        theorem_bound: theorem31_bound(zeta).ok(),
        empirical_lo: None,
        empirical_hi: None,
        empirical_note: None,
    };
    if n < 9 {
        report.empirical_note = Some("interval scan needs at least 9 probes".into());
    } else {
        match admissible_interval(&params, &cfg, n) {
            Ok(iv) => {
                report.empirical_lo = Some(iv.lo);
                report.empirical_hi = Some(iv.hi);
            }
            Err(e) => report.empirical_note = Some(e.to_string()),
        }
    }
    sink.write_json("sweep_d.json", &report)?;
    sink.finish()?;
    let converged = probes.iter().filter(|p| p.classification == ShotClass::Converged).count();
    println!("{converged}/{n} probes converged");
    Ok(())
}

pub fn basin(
    tau: f64,
    zeta_range: (f64, f64),
    d_range: (f64, f64),
    grid: (usize, usize),
    jobs: usize,
    step: &StepOpts,
    out: &OutputOpts,
) -> Result<(), CliError> {
    let cfg = config(step)?;
    let map = basin_map(zeta_range, d_range, grid, tau, &cfg, jobs)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut sink = Sink::new(&out.out_dir, out.golden, "basin")?;
    sink.param("tau", tau);
    sink.param("zeta_min", zeta_range.0);
    sink.param("zeta_max", zeta_range.1);
    sink.param("d_min", d_range.0);
    sink.param("d_max", d_range.1);
    sink.param("nz", grid.0);
    sink.param("nd", grid.1);
    sink.param("jobs", jobs);
    sink.param("h", step.h);
    sink.param("t_max", step.t_max);

    let mut csv = Vec::new();
    map.write_csv(&mut csv)?;
    sink.write_bytes("basin.csv", &csv)?;
    let mut pgm = Vec::new();
    map.write_pgm(&mut pgm)?;
    sink.write_bytes("basin.pgm", &pgm)?;
    let report = BasinReport {
        tau,
        n_zeta: map.n_zeta,
        n_d: map.n_d,
        members: map.verdicts.iter().filter(|v| v.analytic_member).count(),
        converged: map.verdicts.iter().filter(|v| v.empirical_converged).count(),
        violations: map.violations(),
    };
    sink.write_json("basin.json", &report)?;
    sink.finish()?;
    println!(
        "{} members, {} converged, {} violations",
        report.members, report.converged, report.violations
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn field_check(
    tau: f64,
    zeta: f64,
    d: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    grid: (usize, usize),
    perturb: f64,
    method: &str,
    threshold: f64,
    step: &StepOpts,
    out: &OutputOpts,
) -> Result<(), CliError> {
    let cfg = config(step)?;
    let method_enum = match method {
        "chain" => ResidualMethod::ChainRule,
        "fd" => ResidualMethod::FiniteDifference,
        other => return Err(CliError::Usage(format!("unknown method '{other}' (chain or fd)"))),
    };
    if zeta < 0.0 || zeta.is_nan() {
        return Err(CliError::Usage(format!("field reconstruction needs zeta >= 0, got {zeta}")));
    }
    if x_range.0 <= 0.0 || x_range.0 >= x_range.1 || x_range.0.is_nan() || x_range.1.is_nan() {
        return Err(CliError::Usage(format!("x range must satisfy 0 < x_min < x_max, got {x_range:?}")));
    }
    if y_range.0 < 0.0 || y_range.0 >= y_range.1 || y_range.0.is_nan() || y_range.1.is_nan() {
        return Err(CliError::Usage(format!("y range must satisfy 0 <= y_min < y_max, got {y_range:?}")));
    }
    if grid.0 < 2 || grid.1 < 2 {
        return Err(CliError::Usage(format!("grid {grid:?} below 2x2")));
    }
    if threshold <= 0.0 || threshold.is_nan() {
        return Err(CliError::Usage(format!("threshold must be positive, got {threshold}")));
    }

    let traj = pseudo_profile(&PseudoParams::new(tau, zeta), d, &cfg);
    if !traj.stop.is_converged() {
        return Err(CliError::Solver(format!(
            "profile run did not converge (stop: {:?}); no exact solution to verify",
            traj.stop
        )));
    }
    let mut profile = Profile::from_trajectory(&traj).map_err(|e| CliError::Solver(e.to_string()))?;
    if perturb != 0.0 {
        profile = profile.with_fp_offset(perturb);
    }
    // nu = U_inf = 1: tau and zeta are the dimensionless groups directly
    let constants = FlowConstants::new(1.0, 1.0, zeta, tau);
    let spec = GridSpec { x: x_range, y: y_range, nx: grid.0, ny: grid.1 };
    let residual = pde_residual(&profile, &constants, &spec, method_enum)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut sink = Sink::new(&out.out_dir, out.golden, "field-check")?;
    sink.param("tau", tau);
    sink.param("zeta", zeta);
    sink.param("d", d);
    sink.param("x_min", x_range.0);
    sink.param("x_max", x_range.1);
    sink.param("y_min", y_range.0);
    sink.param("y_max", y_range.1);
    sink.param("nx", grid.0);
    sink.param("ny", grid.1);
    sink.param("perturb", perturb);
    sink.param("method", method);
    sink.param("threshold", threshold);
    sink.param("h", step.h);
    sink.param("t_max", step.t_max);

    let mut csv = String::from("x,y,psi,u,v\n");
    for ix in 0..grid.0 {
        for iy in 0..grid.1 {
            let x = x_range.0 + (x_range.1 - x_range.0) * ix as f64 / (grid.0 - 1) as f64;
            let y = y_range.0 + (y_range.1 - y_range.0) * iy as f64 / (grid.1 - 1) as f64;
            let s = pseudo_stream(x, y, &profile, &constants)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.x, s.y, s.psi, s.u, s.v
            ));
        }
    }
    sink.write_bytes("field.csv", csv.as_bytes())?;

    let passed = residual <= threshold;
    let report = FieldCheckReport {
        tau,
        zeta,
        d,
        h: step.h,
        method: method.into(),
        perturb,
        residual,
        threshold,
        passed,
    };
    sink.write_json("field_check.json", &report)?;
    sink.finish()?;
    println!("residual = {residual:.3e} (threshold {threshold:.1e})");
    if !passed {
        return Err(CliError::Verification(format!(
            "residual {residual:.3e} exceeds threshold {threshold:.1e}"
        )));
    }
    Ok(())
}

pub fn fit_ue(input: &Path, far_field: bool, out: &OutputOpts) -> Result<(), CliError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Usage("empty input".into()))?;
    if !header.to_lowercase().replace(' ', "").starts_with("x,") {
        return Err(CliError::Usage(format!("expected header row 'x,Ue', got '{header}'")));
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |field: Option<&str>| -> Result<f64, CliError> {
            field
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage(format!("bad row {} in {}", i + 2, input.display())))
        };
        let x = parse(cols.next())?;
        let ue = parse(cols.next())?;
        samples.push((x, ue));
    }
    let fit = fit_external_velocity(&samples).map_err(|e| CliError::Usage(e.to_string()))?;
    if far_field && fit.c2 > 1e-8 * fit.c1.max(1.0) {
        eprintln!(
            "warning: fitted c2 = {:.6e} > 0; the far-field condition u -> U_e admits only c2 = 0",
            fit.c2
        );
    }
    let mut sink = Sink::new(&out.out_dir, out.golden, "fit-ue")?;
    sink.param("input", input.display().to_string());
    sink.param("far_field", far_field);
    sink.param("n_samples", samples.len());
    let report = FitReport { c1: fit.c1, c2: fit.c2, m: fit.m, rms_residual: fit.rms_residual };
    sink.write_json("fit_ue.json", &report)?;
    sink.finish()?;
    println!(
        "Ue^2 = {:.9} x^(2*{:.9}) + {:.9} (rms {:.3e})",
        fit.c1, fit.m, fit.c2, fit.rms_residual
    );
    Ok(())
}

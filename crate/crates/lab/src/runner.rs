//! Pipelines behind the command-line subcommands.

use std::path::Path;
use std::sync::Arc;

use dirac_core::analysis::{
    endpoint_ratio, hs_norm, mixed_norm, mixed_norm_report, smoothing_ratio, sup_x, EstimateRatio, MixedNorm,
};
use dirac_core::angular::{AngularOp, SphereGrid};
use dirac_core::evolution::{linear_evolve, picard_solve, strang_evolve, TimeGrid, Trajectory};
use dirac_core::oracle3d::{oracle_compare, CartesianGrid};
use dirac_core::profile::DataProfile;
use dirac_core::radial::{admissibility, reduced_hs_norm, RadialGrid, RadialPair};
use rayon::prelude::*;
use serde::Serialize;

use crate::checks;
use crate::config::{ConvergenceMode, RunConfig, Setup, Solver};
use crate::error::{LabError, LabResult};
use crate::formats::{write_json, write_state, Table};
use crate::report::ExperimentReport;

/// Charge drift allowed for a Strang run.
pub const CHARGE_TOLERANCE: f64 = 1e-10;
/// Minimum fitted order for the second-order schemes.
pub const MIN_ORDER: f64 = 1.8;
/// Allowed growth of the off-channel residual during the 3D flow.
pub const RESIDUAL_GROWTH: f64 = 10.0;
/// A sweep member counts as bounded while its X-norm stays within this
/// factor of the X-norm of the free flow of the same data.
pub const BOUND_FACTOR: f64 = 2.0;
/// Relative distance of the X-norms in the perturbative regime.
pub const PERTURBATIVE_TOLERANCE: f64 = 0.1;
/// Allowed relative deviation of the contraction factor ratio from 4 when
/// the amplitude doubles.
pub const DOUBLING_TOLERANCE: f64 = 0.2;
/// Allowed relative spread of the scale-invariant ratios over a dilation family.
pub const SPREAD_TOLERANCE: f64 = 0.05;
/// Allowed deviation from the `lambda^(-1/2)` law for `Hdot^1` norms.
pub const H1_LAW_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Command {
    Verify,
    Evolve,
    SweepAmplitude,
    SweepScaling,
    Converge,
    CompareOracle,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Evolve => "evolve",
            Command::SweepAmplitude => "sweep-amplitude",
            Command::SweepScaling => "sweep-scaling",
            Command::Converge => "converge",
            Command::CompareOracle => "compare-oracle",
        }
    }
}

/// Validates `cfg`, runs `command`, writes artifacts into `cfg.out_dir`
/// and returns the report (also written as `report.json`).
pub fn run(command: Command, cfg: &RunConfig) -> LabResult<ExperimentReport> {
    let setup = cfg.setup()?;
    let out = cfg.out_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| LabError::io(&out, e))?;
    let mut report = ExperimentReport::new(command.name(), cfg);
    let mut body = || -> LabResult<()> {
        match command {
            Command::Verify => verify(cfg, &mut report),
            Command::Evolve => evolve(&setup, &out, &mut report),
            Command::SweepAmplitude => sweep_amplitude(&setup, &cfg.amplitudes, &out, &mut report),
            Command::SweepScaling => sweep_scaling(&setup, &cfg.lambdas, &out, &mut report),
            Command::Converge => convergence_study(&setup, cfg, &out, &mut report),
            Command::CompareOracle => compare_oracle(&setup, cfg, &out, &mut report),
        }
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::Runtime(e.to_string()))?
            .install(body)?,
        None => body()?,
    }
    report.write(&out)?;
    Ok(report)
}

fn verdict(report: &mut ExperimentReport, name: &str, value: f64, limit: f64) {
    report.metric(name, value);
    report.check(name, value < limit, format!("{value:.3e} < {limit:.0e}"));
}

pub fn verify(cfg: &RunConfig, report: &mut ExperimentReport) -> LabResult<()> {
    let seed = cfg.seed;
    let c = checks::clifford();
    report.metric("clifford_max_error", c.max_error);
    report.check(
        "clifford",
        c.failures.is_empty(),
        if c.failures.is_empty() {
            format!("{} identities exact", c.checks)
        } else {
            format!("failing: {}", c.failures.join(", "))
        },
    );

    let (count, gram) = checks::gram_error(3, 64, 128)?;
    report.metric("gram_functions", count as f64);
    verdict(report, "gram_identity", gram, 1e-10);
    verdict(report, "closed_forms", checks::closed_form_error(seed, 64), 1e-14);
    verdict(report, "radial_alpha_action", checks::alpha_action_error(seed, 64), 1e-14);

    let studies = checks::eigen_studies(&[AngularOp::K, AngularOp::J2, AngularOp::J3])?;
    let worst = studies.iter().filter_map(|s| s.order).fold(f64::INFINITY, f64::min);
    report.metric("eigenrelation_min_order", worst);
    let slow: Vec<&str> =
        studies.iter().filter(|s| s.order.is_some_and(|o| o < MIN_ORDER)).map(|s| s.label.as_str()).collect();
    report.check(
        "eigenrelations",
        slow.is_empty(),
        if slow.is_empty() { format!("min order {worst:.3}") } else { format!("below order {MIN_ORDER}: {}", slow.join(", ")) },
    );

    verdict(report, "radial_hermiticity", checks::hermiticity_defect(seed)?, 1e-12);
    verdict(report, "cayley_unitarity", checks::cayley_unitarity_defect(seed)?, 1e-13);
    let (rt, leak) = checks::projection_errors(seed)?;
    verdict(report, "projection_round_trip", rt, 1e-8);
    verdict(report, "projection_leakage", leak, 1e-10);

    let rows = checks::invariance_table(seed, Arc::new(SphereGrid::standard()))?;
    let residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let reduction = rows.iter().map(|r| r.reduction_error).fold(0.0, f64::max);
    verdict(report, "nonlinear_invariance", residual, 1e-9);
    verdict(report, "nonlinear_reduction", reduction, 1e-10);
    Ok(())
}

/// Runs the configured flow; returns the trajectory and the Picard outcome
/// when that solver is selected.
fn evolve_with(setup: &Setup, data: &RadialPair, tgrid: TimeGrid, report: &mut ExperimentReport, out: &Path) -> LabResult<Trajectory> {
    let pot = setup.potential.as_ref();
    match setup.solver {
        Solver::Strang => Ok(strang_evolve(data, pot, setup.kind, tgrid)?),
        Solver::Picard => {
            let kind = setup.kind.expect("validated: picard has a nonlinearity");
            let p = picard_solve(data, pot, kind, tgrid, setup.picard)?;
            report.metric("picard_iterations", p.iterations as f64);
            report.metric("contraction_factor", p.contraction_factor());
            report.check("picard_converged", p.converged, format!("{} iterations", p.iterations));
            let mut log = Table::new(&["iteration", "increment", "x_norm", "ratio"]);
            for e in &p.log {
                log.push(vec![e.iteration as f64, e.increment, e.x_norm, e.ratio.unwrap_or(f64::NAN)]);
            }
            log.write(&out.join("picard_log.csv"))?;
            report.files.push("picard_log.csv".into());
            Ok(p.trajectory)
        }
    }
}

pub fn evolve(setup: &Setup, out: &Path, report: &mut ExperimentReport) -> LabResult<()> {
    let data = setup.data();
    if let Some(p) = &setup.potential {
        let a = admissibility(p);
        report.metric("admissibility_margin", a.margin);
        if !a.admissible {
            report.warnings.push(format!("potential is not admissible (margin {:.3e})", a.margin));
        }
    }
    let traj = evolve_with(setup, &data, setup.tgrid, report, out)?;
    report.warnings.extend(traj.warnings.iter().cloned());

    let mut series = Table::new(&["t", "charge", "sup_x", "h1"]);
    for (t, s) in traj.times().iter().zip(&traj.states) {
        series.push(vec![*t, s.norm().powi(2), sup_x(s), reduced_hs_norm(s, 1)?]);
    }
    series.write(&out.join("trajectory.csv"))?;
    report.files.push("trajectory.csv".into());
    report.files.extend(write_state(out, "initial_state", &data, 0.0)?);
    report.files.extend(write_state(out, "final_state", traj.last(), setup.tgrid.horizon())?);

    let drift = traj.charge_drift();
    report.metric("charge_drift", drift);
    report.metric("data_h1", hs_norm(&data, 1.0)?.value);
    let norms = mixed_norm_report(&traj, &setup.weight)?;
    report.metric("l2t_linfx", norms.l2t_linfx);
    report.metric("linf_t_h1", norms.linf_t_h1);
    report.metric("x_norm", norms.l2t_linfx.max(norms.linf_t_h1));
    report.metric("smoothing_norm", norms.smoothing);
    for (k, v) in &norms.ratios {
        report.metric(format!("ratio_{k}"), *v);
    }
    if setup.solver == Solver::Strang {
        report.check("charge_conservation", drift < CHARGE_TOLERANCE, format!("relative drift {drift:.3e}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeRow {
    pub amplitude: f64,
    pub h1: f64,
    pub x_free: f64,
    pub x_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub contraction: f64,
    /// Final-time distance between the Picard and Strang solutions.
    pub scheme_distance: f64,
}

impl AmplitudeRow {
    pub fn x_ratio(&self) -> f64 {
        if self.x_free == 0.0 {
            if self.x_norm == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.x_norm / self.x_free
        }
    }

    pub fn bounded(&self) -> bool {
        self.x_norm.is_finite() && self.x_norm <= BOUND_FACTOR * self.x_free
    }
}

pub fn amplitude_member(setup: &Setup, amplitude: f64) -> LabResult<AmplitudeRow> {
    let kind = setup
        .kind
        .ok_or_else(|| LabError::Config("amplitude sweeps need a nonlinearity".into()))?;
    let pot = setup.potential.as_ref();
    let data = setup.data_on(setup.grid, &setup.profile.with_amplitude(amplitude));
    let free = linear_evolve(&data, pot, setup.tgrid)?;
    let strang = strang_evolve(&data, pot, Some(kind), setup.tgrid)?;
    let picard = picard_solve(&data, pot, kind, setup.tgrid, setup.picard)?;
    Ok(AmplitudeRow {
        amplitude,
        h1: hs_norm(&data, 1.0)?.value,
        x_free: mixed_norm(&free, MixedNorm::X)?,
        x_norm: mixed_norm(&strang, MixedNorm::X)?,
        converged: picard.converged,
        iterations: picard.iterations,
        contraction: picard.contraction_factor(),
        scheme_distance: picard.trajectory.last().distance(strang.last())?,
    })
}

pub fn sweep_amplitude(setup: &Setup, amplitudes: &[f64], out: &Path, report: &mut ExperimentReport) -> LabResult<()> {
    if setup.kind.is_none() {
        return Err(LabError::Config("sweep-amplitude needs nonlinearity = F1 or F2".into()));
    }
    let results: Vec<LabResult<AmplitudeRow>> = amplitudes.par_iter().map(|&a| amplitude_member(setup, a)).collect();
    let mut table = Table::new(&[
        "amplitude",
        "h1",
        "x_free",
        "x_norm",
        "x_ratio",
        "converged",
        "iterations",
        "contraction",
        "scheme_distance",
    ]);
    let mut rows = Vec::new();
    for (a, r) in amplitudes.iter().zip(results) {
        match r {
            Ok(row) => {
                table.push(vec![
                    row.amplitude,
                    row.h1,
                    row.x_free,
                    row.x_norm,
                    row.x_ratio(),
                    row.converged as u8 as f64,
                    row.iterations as f64,
                    row.contraction,
                    row.scheme_distance,
                ]);
                rows.push(row);
            }
            Err(e) => report.stage_error(format!("amplitude {a}"), e.to_string()),
        }
    }
    table.write(&out.join("amplitude_sweep.csv"))?;
    report.files.push("amplitude_sweep.csv".into());

    let largest = rows
        .iter()
        .filter(|r| r.converged && r.bounded())
        .map(|r| r.amplitude.abs())
        .fold(f64::NAN, f64::max);
    report.metric("largest_bounded_amplitude", largest);
    for r in &rows {
        report.metric(format!("contraction_{}", r.amplitude), r.contraction);
    }

    if let Some(small) = rows.iter().filter(|r| r.amplitude != 0.0).min_by(|a, b| a.amplitude.abs().total_cmp(&b.amplitude.abs())) {
        let dev = (small.x_ratio() - 1.0).abs();
        report.metric("perturbative_deviation", dev);
        report.check(
            "perturbative_regime",
            dev < PERTURBATIVE_TOLERANCE,
            format!("amplitude {}: X-norm within {:.2}% of the free flow", small.amplitude, 100.0 * dev),
        );
    }
    for r in &rows {
        if let Some(d) = rows.iter().find(|d| d.amplitude == 2.0 * r.amplitude && r.amplitude != 0.0) {
            if !(r.converged && d.converged) {
                continue;
            }
            let q = d.contraction / r.contraction;
            report.metric(format!("contraction_doubling_{}", r.amplitude), q);
            report.check(
                &format!("contraction_doubling_{}", r.amplitude),
                (q / 4.0 - 1.0).abs() <= DOUBLING_TOLERANCE,
                format!("{} -> {}: factor {q:.3}", r.amplitude, d.amplitude),
            );
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub lambda: f64,
    pub endpoint: EstimateRatio,
    pub smoothing: EstimateRatio,
    /// `Hdot^1` norm of `lambda^(1/2) f(lambda x)`.
    pub h1_family: f64,
    /// `Hdot^1` norm of `f(lambda x)`.
    pub h1_plain: f64,
}

/// Profile of `lambda^(1/2) f(lambda x)` in reduced form `lambda^(-1/2) u(lambda r)`.
pub fn dilated_profile(profile: &DataProfile, lambda: f64) -> LabResult<DataProfile> {
    let freq = match *profile {
        DataProfile::WavePacket { frequency, .. } => frequency,
        _ => 0.0,
    };
    Ok(DataProfile::from_name(profile.name(), profile.amplitude() / lambda.sqrt(), profile.width() / lambda, freq)?)
}

/// Horizon `T / lambda` with the base time step.
pub fn dilated_time_grid(base: TimeGrid, lambda: f64) -> LabResult<TimeGrid> {
    let horizon = base.horizon() / lambda;
    let steps = ((base.steps() as f64) / lambda).round().max(1.0) as usize;
    Ok(TimeGrid::new(horizon, steps)?)
}

pub fn scaling_member(setup: &Setup, lambda: f64) -> LabResult<ScalingRow> {
    let pot = setup.potential.as_ref();
    let data = setup.data_on(setup.grid, &dilated_profile(&setup.profile, lambda)?);
    let tgrid = dilated_time_grid(setup.tgrid, lambda)?;
    let plain = setup.data_on(setup.grid, &dilated_profile(&setup.profile, lambda)?.with_amplitude(setup.profile.amplitude() / lambda));
    Ok(ScalingRow {
        lambda,
        endpoint: endpoint_ratio(&data, pot, tgrid)?,
        smoothing: smoothing_ratio(&data, pot, tgrid, &setup.weight)?,
        h1_family: hs_norm(&data, 1.0)?.value,
        h1_plain: hs_norm(&plain, 1.0)?.value,
    })
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        (max - min) / min
    } else {
        f64::INFINITY
    }
}

#[derive(Serialize)]
struct RatioSummary {
    estimate: &'static str,
    min_ratio: f64,
    max_ratio: f64,
    spread: f64,
}

pub fn sweep_scaling(setup: &Setup, lambdas: &[f64], out: &Path, report: &mut ExperimentReport) -> LabResult<()> {
    let results: Vec<LabResult<ScalingRow>> = lambdas.par_iter().map(|&l| scaling_member(setup, l)).collect();
    let mut rows = Vec::new();
    for (l, r) in lambdas.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => report.stage_error(format!("lambda {l}"), e.to_string()),
        }
    }
    let mut summaries = Vec::new();
    for (name, pick) in [
        ("endpoint", (|r: &ScalingRow| r.endpoint) as fn(&ScalingRow) -> EstimateRatio),
        ("smoothing", |r: &ScalingRow| r.smoothing),
    ] {
        let mut table = Table::new(&["lambda", "lhs", "rhs", "ratio"]);
        for r in &rows {
            let e = pick(r);
            table.push(vec![r.lambda, e.lhs, e.rhs, e.ratio]);
        }
        let file = format!("{name}_ratios.csv");
        table.write(&out.join(&file))?;
        report.files.push(file);
        let ratios: Vec<f64> = rows.iter().map(|r| pick(r).ratio).collect();
        let s = spread(&ratios);
        report.metric(format!("{name}_spread"), s);
        report.check(
            &format!("{name}_scale_invariance"),
            s < SPREAD_TOLERANCE,
            format!("ratio spread {:.2}% over {} dilates", 100.0 * s, rows.len()),
        );
        summaries.push(RatioSummary {
            estimate: name,
            min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            spread: s,
        });
    }
    write_json(&out.join("ratio_summary.json"), &summaries)?;
    report.files.push("ratio_summary.json".into());

    let mut h1 = Table::new(&["lambda", "h1_family", "h1_plain", "h1_law"]);
    let base = rows.iter().find(|r| r.lambda == 1.0).map(|r| r.h1_plain);
    let mut worst: f64 = 0.0;
    for r in &rows {
        let law = base.map_or(f64::NAN, |b| b / r.lambda.sqrt());
        worst = worst.max((r.h1_plain / law - 1.0).abs());
        h1.push(vec![r.lambda, r.h1_family, r.h1_plain, law]);
    }
    h1.write(&out.join("h1_scaling.csv"))?;
    report.files.push("h1_scaling.csv".into());
    if base.is_some() {
        report.metric("h1_law_deviation", worst);
        report.check("h1_scaling_law", worst < H1_LAW_TOLERANCE, format!("max deviation {:.3}%", 100.0 * worst));
    }
    Ok(())
}

/// Least-squares slope of `-log2(error)` against refinement level.
pub fn fitted_order(errors: &[f64]) -> f64 {
    let n = errors.len() as f64;
    let xs: Vec<f64> = (0..errors.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub struct ConvergenceLevel {
    pub cells: usize,
    pub steps: usize,
    pub error: f64,
    pub residual_initial: f64,
    pub residual_final: f64,
}

/// Errors at `refinements + 1` levels, halving `h` and `dt` each time.
pub fn convergence_levels(setup: &Setup, cfg: &RunConfig) -> LabResult<Vec<ConvergenceLevel>> {
    let level = |k: usize| -> LabResult<(RadialGrid, TimeGrid)> {
        let f = 1usize << k;
        Ok((setup.grid.refined(f), TimeGrid::new(setup.tgrid.horizon(), setup.tgrid.steps() * f)?))
    };
    let ks: Vec<usize> = (0..=cfg.refinements).collect();
    match setup.convergence {
        ConvergenceMode::Oracle => {
            let box_grid = CartesianGrid::new(cfg.box_cells, cfg.box_half_width())?;
            ks.par_iter()
                .map(|&k| {
                    let (grid, tgrid) = level(k)?;
                    let data = setup.data_on(grid, &setup.profile);
                    let c = oracle_compare(&data, tgrid.horizon(), tgrid.steps(), box_grid)?;
                    Ok(ConvergenceLevel {
                        cells: grid.len(),
                        steps: tgrid.steps(),
                        error: c.discrepancy,
                        residual_initial: c.residual_initial,
                        residual_final: c.residual_final,
                    })
                })
                .collect()
        }
        ConvergenceMode::Strang => {
            let pot_on = |grid: RadialGrid| -> LabResult<_> {
                match cfg.potential_profile()? {
                    dirac_core::radial::PotentialProfile::Zero => Ok(None),
                    p => Ok(Some(dirac_core::radial::PotentialSpec::from_profile(grid, p, cfg.sigma, cfg.delta)?)),
                }
            };
            let solve = |k: usize| -> LabResult<RadialPair> {
                let (grid, tgrid) = level(k)?;
                let data = setup.data_on(grid, &setup.profile);
                let pot = pot_on(grid)?;
                Ok(strang_evolve(&data, pot.as_ref(), setup.kind, tgrid)?.last().clone())
            };
            let reference = solve(cfg.refinements + 2)?;
            ks.par_iter()
                .map(|&k| {
                    let coarse = solve(k)?;
                    let sampled = RadialPair::from_fn(coarse.idx(), coarse.grid(), |r| reference.sample(r));
                    let (grid, tgrid) = level(k)?;
                    Ok(ConvergenceLevel {
                        cells: grid.len(),
                        steps: tgrid.steps(),
                        error: coarse.distance(&sampled)?,
                        residual_initial: 0.0,
                        residual_final: 0.0,
                    })
                })
                .collect()
        }
    }
}

pub fn convergence_study(setup: &Setup, cfg: &RunConfig, out: &Path, report: &mut ExperimentReport) -> LabResult<()> {
    let levels = convergence_levels(setup, cfg)?;
    let mut table = Table::new(&["level", "cells", "h", "dt", "error"]);
    for (k, l) in levels.iter().enumerate() {
        table.push(vec![
            k as f64,
            l.cells as f64,
            cfg.radius / l.cells as f64,
            setup.tgrid.horizon() / l.steps as f64,
            l.error,
        ]);
    }
    table.write(&out.join("convergence.csv"))?;
    report.files.push("convergence.csv".into());

    let errors: Vec<f64> = levels.iter().map(|l| l.error).collect();
    if errors.iter().all(|e| *e == 0.0) {
        report.check("convergence_order", true, "errors identically zero: exact");
    } else if levels.len() < 2 {
        report.warnings.push("a single level cannot fit an order".into());
    } else {
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        if !monotone {
            report.warnings.push(format!("non-monotone errors {errors:?}"));
        }
        report.check("errors_monotone", monotone, format!("{errors:?}"));
        let order = fitted_order(&errors);
        report.metric("fitted_order", order);
        report.check("convergence_order", order >= MIN_ORDER, format!("fitted order {order:.3}"));
    }
    if setup.convergence == ConvergenceMode::Oracle {
        let worst = levels
            .iter()
            .map(|l| if l.residual_final == 0.0 { 0.0 } else { l.residual_final / l.residual_initial })
            .fold(0.0, f64::max);
        report.metric("residual_growth", worst);
        report.check("off_channel_residual", worst <= RESIDUAL_GROWTH, format!("final/initial residual {worst:.3}"));
    }
    Ok(())
}

pub fn compare_oracle(setup: &Setup, cfg: &RunConfig, out: &Path, report: &mut ExperimentReport) -> LabResult<()> {
    let box_grid = CartesianGrid::new(cfg.box_cells, cfg.box_half_width())?;
    let c = oracle_compare(&setup.data(), setup.tgrid.horizon(), setup.tgrid.steps(), box_grid)?;
    report.warnings.extend(c.warnings.iter().cloned());
    report.metric("discrepancy", c.discrepancy);
    report.metric("relative_discrepancy", c.relative);
    report.metric("residual_initial", c.residual_initial);
    report.metric("residual_final", c.residual_final);
    let growth = if c.residual_final == 0.0 { 0.0 } else { c.residual_final / c.residual_initial };
    report.check("off_channel_residual", growth <= RESIDUAL_GROWTH, format!("final/initial residual {growth:.3}"));
    write_json(&out.join("oracle_comparison.json"), &c)?;
    report.files.push("oracle_comparison.json".into());
    Ok(())
}

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::*;
use crate::beam::{EndCondition, LoadCase, SeriesMeta, SpatialGrid, TimeSeriesResult};
use crate::dynamics::{self, IntegratorConfig, RayleighCoeffs, SweepConfig, SweepPoint};
use crate::error::BeamError;
use crate::material::{linear_vs_nonlinear_curve, nonlinear_cantilever_deflection, CurvePoint};
use crate::modal::{self, ModeSolution};
use crate::statics::{self, cantilever_point_deflection, ss_point_deflection, ss_udl_deflection};

/// Minimum time steps per forcing period in sweeps.
pub const SWEEP_STEPS_PER_PERIOD: usize = 64;

/// Execution knobs that do not change results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads for frequency sweeps.
    pub threads: usize,
    /// Number of modes computed by the modal solver.
    pub modes: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { threads: 1, modes: 3 }
    }
}

/// Finite-difference profile next to the closed form where one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticComparison {
    pub x: Vec<f64>,
    pub fd: Vec<f64>,
    pub closed_form: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub generator: String,
    pub schema: String,
    pub scenario: String,
    pub solver: String,
    pub defaults_applied: Vec<String>,
    pub notes: Vec<String>,
    pub summary: BTreeMap<String, f64>,
}

/// Everything produced by one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub scenario: Scenario,
    /// Frame history; static-type solvers store a single frame at t = 0.
    pub series: Option<TimeSeriesResult>,
    /// Probe header and frame column.
    pub probes: Vec<(String, usize)>,
    pub statics: Option<StaticComparison>,
    pub modes: Vec<ModeSolution>,
    pub sweep: Vec<SweepPoint>,
    pub nonlinear: Vec<CurvePoint>,
    pub provenance: Provenance,
}

impl ResultSet {
    pub fn is_finite(&self) -> bool {
        self.series.as_ref().is_none_or(|s| s.is_finite())
            && self.provenance.summary.values().all(|v| v.is_finite())
            && self.sweep.iter().all(|p| p.amplitude.is_finite())
            && self.nonlinear.iter().all(|c| c.w_lin.is_finite() && c.w_nl.is_finite())
    }
}

/// Runs a validated scenario. Results depend only on the scenario.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<ResultSet, ScenarioError> {
    let wrap = |source: BeamError| ScenarioError::Solver {
        scenario: s.name.clone(),
        source,
    };
    let mut out = ResultSet {
        scenario: s.clone(),
        series: None,
        probes: vec![],
        statics: None,
        modes: vec![],
        sweep: vec![],
        nonlinear: vec![],
        provenance: Provenance {
            generator: format!("beamlab {}", env!("CARGO_PKG_VERSION")),
            schema: SCHEMA.to_string(),
            scenario: s.name.clone(),
            solver: s.solver.name().to_string(),
            defaults_applied: s.defaults_applied.clone(),
            notes: s.notes.clone(),
            summary: BTreeMap::new(),
        },
    };
    match s.solver {
        SolverKind::Static => run_static(s, &mut out).map_err(wrap)?,
        SolverKind::QuasiStatic => run_quasi_static(s, &mut out).map_err(wrap)?,
        SolverKind::Modal => run_modal(s, opts, &mut out).map_err(wrap)?,
        SolverKind::Dynamic => match s.oscillator {
            Some(o) => run_oscillator(s, o, &mut out).map_err(wrap)?,
            None => run_dynamic(s, &mut out).map_err(wrap)?,
        },
        SolverKind::Sweep => run_sweep(s, opts, &mut out).map_err(wrap)?,
        SolverKind::Nonlinear => run_nonlinear(s, &mut out).map_err(wrap)?,
    }
    Ok(out)
}

fn single_frame(solver: &str, s: &Scenario, grid: SpatialGrid, w: Vec<f64>) -> TimeSeriesResult {
    let mut r = TimeSeriesResult::new(SeriesMeta {
        solver: solver.into(),
        grid: Some(grid),
        beam: Some(s.beam),
        loads: s.loads.clone(),
        columns: statics::node_columns(&grid),
    });
    r.push(0.0, w);
    r
}

fn attach_probes(s: &Scenario, out: &mut ResultSet, grid: &SpatialGrid) {
    out.probes = s
        .probes
        .iter()
        .map(|&x| {
            let node = grid.nearest_node(x);
            (format!("x={}", fmt_f64(grid.x(node))), node)
        })
        .collect();
    let series = out.series.take().expect("series present");
    out.series = Some(series.with_probes(out.probes.iter().map(|p| p.1)));
}

fn summarize_probes(out: &mut ResultSet) {
    let series = out.series.as_ref().expect("series present");
    for (label, col) in &out.probes {
        let hist = &series.probes[col];
        let (i, peak) = hist
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        out.provenance.summary.insert(format!("peak_abs_w[{label}]"), peak);
        out.provenance.summary.insert(format!("t_peak[{label}]"), series.times[i]);
    }
}

fn closed_form_static(s: &Scenario, x: f64) -> Result<Option<f64>, BeamError> {
    let mut w = 0.0;
    if s.bc == BoundarySpec::pinned_pinned() {
        for l in &s.loads {
            w += match *l {
                LoadCase::Udl { q } => ss_udl_deflection(x, q, &s.beam)?,
                LoadCase::Point { p, a } => ss_point_deflection(x, p, a, &s.beam)?,
                _ => return Ok(None),
            };
        }
        return Ok(Some(w));
    }
    if s.bc == BoundarySpec::clamped_free() {
        for l in &s.loads {
            match *l {
                LoadCase::Point { p, a } if a > 0.0 => w += cantilever_point_deflection(x, p, a, &s.beam)?,
                _ => return Ok(None),
            }
        }
        return Ok(Some(w));
    }
    Ok(None)
}

fn run_static(s: &Scenario, out: &mut ResultSet) -> Result<(), BeamError> {
    let profile = statics::static_fd_solve(&s.beam, &s.bc, &s.loads, s.nodes)?;
    let grid = profile.grid;
    let xs = grid.positions();
    let closed_form = match closed_form_static(s, 0.0)? {
        Some(_) => Some(
            xs.iter()
                .map(|&x| closed_form_static(s, x).map(|w| w.expect("closed form available")))
                .collect::<Result<Vec<f64>, BeamError>>()?,
        ),
        None => None,
    };
    let sum = &mut out.provenance.summary;
    let l = s.beam.length;
    sum.insert("max_abs_w_fd".into(), profile.max_abs());
    sum.insert("midspan_w_fd".into(), profile.at(0.5 * l));
    sum.insert("end_w_fd".into(), profile.at(l));
    if let Some(cf) = &closed_form {
        sum.insert("max_abs_w_closed_form".into(), cf.iter().fold(0.0, |m, v| m.max(v.abs())));
        sum.insert("midspan_w_closed_form".into(), closed_form_static(s, 0.5 * l)?.expect("available"));
        sum.insert("end_w_closed_form".into(), closed_form_static(s, l)?.expect("available"));
    }
    out.series = Some(single_frame("static_fd", s, grid, profile.deflection.clone()));
    out.statics = Some(StaticComparison {
        x: xs,
        fd: profile.deflection,
        closed_form,
    });
    attach_probes(s, out, &grid);
    Ok(())
}

fn subsample(mut r: TimeSeriesResult, stride: usize) -> TimeSeriesResult {
    if stride <= 1 {
        return r;
    }
    let last = r.times.len() - 1;
    let keep: Vec<usize> = (0..=last).filter(|i| i % stride == 0 || *i == last).collect();
    r.times = keep.iter().map(|&i| r.times[i]).collect();
    r.frames = keep.iter().map(|&i| r.frames[i].clone()).collect();
    for h in r.probes.values_mut() {
        *h = keep.iter().map(|&i| h[i]).collect();
    }
    r
}

fn run_quasi_static(s: &Scenario, out: &mut ResultSet) -> Result<(), BeamError> {
    let tg = s.time.expect("validated");
    let r = match s.loads[0] {
        LoadCase::MovingPoint { p, v, x0 } => statics::quasi_static_moving(&s.beam, p, v, x0, &tg, s.nodes)?,
        LoadCase::HarmonicPoint { p0, f, x } => statics::quasi_static_sinusoidal(&s.beam, p0, f, x, &tg, s.nodes)?,
        _ => unreachable!("validated"),
    };
    let grid = r.meta.grid.expect("beam series");
    out.series = Some(subsample(r, s.stride));
    attach_probes(s, out, &grid);
    summarize_probes(out);
    Ok(())
}

fn run_modal(s: &Scenario, opts: &RunOptions, out: &mut ResultSet) -> Result<(), BeamError> {
    let bc = s.modal_bc.unwrap_or(s.bc);
    let grid = SpatialGrid::new(s.beam.length, s.nodes)?;
    out.modes = modal::modes(&s.beam, &bc, opts.modes, &grid)?;
    out.provenance.summary.insert("modal_bc_spring_k".into(), match (bc.left, bc.right) {
        (EndCondition::Spring(k), _) | (_, EndCondition::Spring(k)) => k,
        _ => 0.0,
    });
    for (i, m) in out.modes.iter().enumerate() {
        out.provenance.summary.insert(format!("f{}_hz", i + 1), m.f_hz);
    }
    Ok(())
}

fn run_dynamic(s: &Scenario, out: &mut ResultSet) -> Result<(), BeamError> {
    let tg = s.time.expect("validated");
    let damping = RayleighCoeffs::for_beam(&s.beam, &s.bc, s.integrator.zeta1)?;
    let cfg = IntegratorConfig {
        gamma: s.integrator.gamma,
        beta: s.integrator.beta,
        dt: tg.dt,
    };
    let r = dynamics::simulate_beam(&s.beam, &s.bc, s.nodes, &s.loads, damping, &tg, cfg, s.stride)?;
    let grid = r.meta.grid.expect("beam series");
    out.provenance.summary.insert("rayleigh_alpha".into(), damping.alpha);
    out.provenance.summary.insert("rayleigh_beta".into(), damping.beta);
    out.series = Some(r);
    attach_probes(s, out, &grid);
    summarize_probes(out);
    Ok(())
}

fn run_oscillator(s: &Scenario, o: Oscillator, out: &mut ResultSet) -> Result<(), BeamError> {
    let tg = s.time.expect("validated");
    let cfg = IntegratorConfig {
        gamma: s.integrator.gamma,
        beta: s.integrator.beta,
        dt: tg.dt,
    };
    let force = |t: f64| -> f64 {
        s.loads
            .iter()
            .map(|l| match *l {
                LoadCase::HarmonicPoint { p0, f, .. } => p0 * (2.0 * PI * f * t).sin(),
                LoadCase::Point { p, .. } => p,
                _ => 0.0,
            })
            .sum()
    };
    let sdof = dynamics::sdof_system(o.mass, o.damping, o.stiffness)?;
    let bridge = dynamics::bridge_2d_system(o.mass, o.damping, o.stiffness)?;
    let a = dynamics::integrate(&sdof, |t| vec![force(t)], vec![0.0], vec![0.0], &tg, cfg, s.stride)?;
    let b = dynamics::integrate(&bridge, |t| vec![force(t), 0.0], vec![0.0; 2], vec![0.0; 2], &tg, cfg, s.stride)?;

    let mut r = TimeSeriesResult::new(SeriesMeta {
        solver: "newmark".into(),
        grid: None,
        beam: None,
        loads: s.loads.clone(),
        columns: vec!["sdof_u".into(), "bridge_x".into(), "bridge_y".into()],
    });
    for (i, &t) in a.times.iter().enumerate() {
        r.push(t, vec![a.frames[i][0], b.frames[i][0], b.frames[i][1]]);
    }
    out.probes = vec![("sdof_u".into(), 0), ("bridge_x".into(), 1), ("bridge_y".into(), 2)];
    out.series = Some(r.with_probes([0, 1, 2]));
    let omega = (o.stiffness / o.mass).sqrt();
    out.provenance.summary.insert("natural_frequency_hz".into(), omega / (2.0 * PI));
    out.provenance
        .summary
        .insert("damping_ratio".into(), o.damping / (2.0 * (o.mass * o.stiffness).sqrt()));
    summarize_probes(out);
    Ok(())
}

fn run_sweep(s: &Scenario, opts: &RunOptions, out: &mut ResultSet) -> Result<(), BeamError> {
    let sw = s.sweep.expect("validated");
    let LoadCase::Point { p, a } = s.loads[0] else { unreachable!("validated") };
    let damping = RayleighCoeffs::for_beam(&s.beam, &s.bc, s.integrator.zeta1)?;
    let cfg = SweepConfig {
        nodes: s.nodes,
        p0: p,
        xload: a,
        damping,
        gamma: s.integrator.gamma,
        beta: s.integrator.beta,
        max_dt: sw.max_dt,
        min_steps_per_period: SWEEP_STEPS_PER_PERIOD,
        settle_periods: sw.settle_periods,
        measure_periods: sw.measure_periods,
        threads: opts.threads.max(1),
    };
    let freqs = dynamics::linspace(sw.f_min, sw.f_max, sw.f_count);
    out.sweep = dynamics::frequency_sweep(&s.beam, &s.bc, &freqs, &cfg)?;
    let peak = out
        .sweep
        .iter()
        .fold(out.sweep[0], |best, p| if p.amplitude > best.amplitude { *p } else { best });
    let roots = modal::find_beta_roots(&s.beam, &s.bc, 1, modal::DEFAULT_SCAN_STEP / s.beam.length)?;
    let f1 = modal::natural_frequencies(&roots, &s.beam)?[0].f_hz;
    let sum = &mut out.provenance.summary;
    sum.insert("peak_f_hz".into(), peak.f_hz);
    sum.insert("peak_amplitude_m".into(), peak.amplitude);
    sum.insert("analytic_f1_hz".into(), f1);
    sum.insert("rayleigh_alpha".into(), damping.alpha);
    sum.insert("rayleigh_beta".into(), damping.beta);
    sum.insert("steps_per_period_min".into(), SWEEP_STEPS_PER_PERIOD as f64);
    if s.bc == BoundarySpec::pinned_pinned() {
        sum.insert("static_midspan_m".into(), ss_point_deflection(0.5 * s.beam.length, p, a, &s.beam)?);
    }
    Ok(())
}

fn run_nonlinear(s: &Scenario, out: &mut ResultSet) -> Result<(), BeamError> {
    let m = s.material.expect("validated");
    let LoadCase::Point { p, a } = s.loads[0] else { unreachable!("validated") };
    let nl = nonlinear_cantilever_deflection(p, a, &s.beam, &m.law, m.tol, m.max_iter, s.nodes)?;
    let ps = if s.load_sweep.is_empty() { vec![p] } else { s.load_sweep.clone() };
    out.nonlinear = linear_vs_nonlinear_curve(&ps, a, &s.beam, &m.law, m.tol, m.max_iter, s.nodes)?;
    let sum = &mut out.provenance.summary;
    sum.insert("tip_w_linear".into(), cantilever_point_deflection(s.beam.length, p, a, &s.beam)?);
    sum.insert("tip_w_nonlinear".into(), *nl.profile.deflection.last().expect("nodes"));
    sum.insert("iterations".into(), nl.iterations as f64);
    sum.insert("material_E".into(), m.law.e);
    sum.insert("material_alpha".into(), m.law.alpha);
    sum.insert("material_n".into(), m.law.n);
    let grid = nl.profile.grid;
    out.series = Some(single_frame("secant_nonlinear", s, grid, nl.profile.deflection));
    attach_probes(s, out, &grid);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp3_tip_matches_closed_form() {
        let r = run_scenario(&preset("exp3").unwrap(), &RunOptions::default()).unwrap();
        let tip = r.provenance.summary["end_w_closed_form"];
        assert!((tip - 3.90625e-2).abs() / 3.90625e-2 < 1e-12);
        let fd = r.provenance.summary["end_w_fd"];
        assert!((fd - tip).abs() / tip < 1e-3);
        assert!(r.is_finite());
    }

    #[test]
    fn exp1_midspan() {
        let r = run_scenario(&preset("exp1").unwrap(), &RunOptions::default()).unwrap();
        let cf = r.provenance.summary["midspan_w_closed_form"];
        assert!((cf - 0.0244140625).abs() < 1e-12);
        assert!((r.provenance.summary["midspan_w_fd"] - cf).abs() / cf < 1e-3);
    }

    #[test]
    fn exp2_2_is_one_hertz_periodic() {
        let r = run_scenario(&preset("exp2_2").unwrap(), &RunOptions::default()).unwrap();
        let s = r.series.unwrap();
        let mid = &s.probes[&100];
        for i in 0..s.times.len() - 100 {
            assert!((mid[i] - mid[i + 100]).abs() <= 1e-9 * 7.8125e-3);
        }
    }

    #[test]
    fn exp1_modal_uses_bearing_springs() {
        let s = SolverKind::Modal;
        let scen = Scenario {
            solver: s,
            ..preset("exp1").unwrap()
        };
        let r = run_scenario(&scen, &RunOptions::default()).unwrap();
        assert_eq!(r.modes.len(), 3);
        assert_eq!(r.provenance.summary["modal_bc_spring_k"], 1000.0);
        assert!(r.modes[0].f_hz < 1.0);
    }

    #[test]
    fn exp5_2_axes_decouple() {
        let r = run_scenario(&preset("exp5_2").unwrap(), &RunOptions::default()).unwrap();
        let s = r.series.unwrap();
        for f in &s.frames {
            assert_eq!(f[0], f[1]);
            assert_eq!(f[2], 0.0);
        }
        let amp = r.provenance.summary["peak_abs_w[sdof_u]"];
        assert!(amp > 0.5 && amp < 1.0 / (0.2 * 2.0 * PI) * 1.01);
    }

    #[test]
    fn exp4_curve_and_profile() {
        let r = run_scenario(&preset("exp4").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(r.nonlinear.len(), 13);
        assert!(r.provenance.summary["tip_w_nonlinear"] > r.provenance.summary["tip_w_linear"]);
    }

    #[test]
    fn solver_errors_name_scenario() {
        let mut s = preset("exp3").unwrap();
        s.bc = BoundarySpec::free_free();
        let err = run_scenario(&s, &RunOptions::default()).unwrap_err();
        assert!(matches!(&err, ScenarioError::Solver { scenario, .. } if scenario == "exp3"), "{err}");
    }
}

use std::f64::consts::PI;

use super::*;
use crate::beam::{BeamSpec, BoundarySpec, LoadCase, TimeGrid};
use crate::material::RambergOsgood;

pub const PRESET_NAMES: [&str; 7] = ["exp1", "exp2_1", "exp2_2", "exp3", "exp4", "exp5_1", "exp5_2"];

const SECTION_NOTE: &str =
    "beam section (b=0.2 m, h=0.4 m, E=25e9 Pa, rho=2500 kg/m^3) taken from the experiment 1 parameters; this experiment lists only L, P and x";

fn reference_beam() -> BeamSpec {
    BeamSpec {
        length: 10.0,
        width: 0.2,
        height: 0.4,
        elastic_modulus: 25e9,
        density: 2500.0,
    }
}

fn base(name: &str, solver: SolverKind, bc: BoundarySpec, loads: Vec<LoadCase>) -> Scenario {
    Scenario {
        name: name.to_string(),
        solver,
        beam: reference_beam(),
        bc,
        modal_bc: None,
        loads,
        nodes: DEFAULT_NODES,
        time: None,
        integrator: IntegratorSettings {
            gamma: 0.5,
            beta: 0.25,
            zeta1: DEFAULT_ZETA1,
        },
        material: None,
        sweep: None,
        load_sweep: vec![],
        oscillator: None,
        probes: vec![],
        stride: DEFAULT_STRIDE,
        notes: vec![],
        defaults_applied: vec![],
    }
}

/// Built-in scenarios reproducing the reference experiments.
pub fn preset(name: &str) -> Result<Scenario, ScenarioError> {
    let s = match name {
        "exp1" => {
            let mut s = base("exp1", SolverKind::Static, BoundarySpec::pinned_pinned(), vec![LoadCase::Udl { q: 5000.0 }]);
            s.modal_bc = Some(BoundarySpec::spring_spring(1000.0));
            s.notes = vec![
                "bearing stiffness k=1000 N/m applies to modal analysis only (bc.modal_only); the static deflection uses pinned supports".into(),
                "grid.nodes=201 chosen for the finite-difference solution".into(),
            ];
            s
        }
        "exp2_1" => {
            let mut s = base(
                "exp2_1",
                SolverKind::QuasiStatic,
                BoundarySpec::pinned_pinned(),
                vec![LoadCase::MovingPoint { p: 10_000.0, v: 1.0, x0: 0.0 }],
            );
            s.time = Some(TimeGrid {
                start: 0.0,
                end: 15.0,
                dt: 0.05,
            });
            s.probes = vec![2.5, 5.0, 7.5];
            s.notes = vec![
                SECTION_NOTE.into(),
                "time.dt=0.05 s and probes at L/4, L/2, 3L/4 chosen; only the 15 s duration is given".into(),
                "frames after the load leaves the span (t > 10 s) are exactly zero under the quasi-static method".into(),
            ];
            s
        }
        "exp2_2" => {
            let mut s = base(
                "exp2_2",
                SolverKind::QuasiStatic,
                BoundarySpec::pinned_pinned(),
                vec![LoadCase::HarmonicPoint { p0: 10_000.0, f: 1.0, x: 5.0 }],
            );
            s.time = Some(TimeGrid {
                start: 0.0,
                end: 10.0,
                dt: 0.01,
            });
            s.probes = vec![5.0];
            s.notes = vec![
                SECTION_NOTE.into(),
                "time.dt=0.01 s chosen; the quasi-static response has no phase lag or decay".into(),
            ];
            s
        }
        "exp3" => {
            let mut s = base(
                "exp3",
                SolverKind::Static,
                BoundarySpec::clamped_free(),
                vec![LoadCase::Point { p: 10_000.0, a: 5.0 }],
            );
            s.notes = vec![SECTION_NOTE.into(), "cantilever clamped at x=0".into()];
            s
        }
        "exp4" => {
            let mut s = base(
                "exp4",
                SolverKind::Nonlinear,
                BoundarySpec::clamped_free(),
                vec![LoadCase::Point { p: 10_000.0, a: 5.0 }],
            );
            s.material = Some(MaterialSettings {
                law: RambergOsgood::new(25e9, material::DEFAULT_ALPHA, material::DEFAULT_EXPONENT).expect("valid defaults"),
                tol: material::DEFAULT_TOL,
                max_iter: material::DEFAULT_MAX_ITER,
            });
            s.load_sweep = (0..=12).map(|i| 1e3 * 10f64.powf(i as f64 / 4.0)).collect();
            s.notes = vec![
                SECTION_NOTE.into(),
                "Ramberg-Osgood alpha=5e6 and n=3 are chosen defaults; no values are given".into(),
                "load sweep P = 1e3..1e6 N (4 points per decade) chosen".into(),
                "cantilever clamped at x=0".into(),
            ];
            s
        }
        "exp5_1" => {
            let mut s = base(
                "exp5_1",
                SolverKind::Sweep,
                BoundarySpec::pinned_pinned(),
                vec![LoadCase::Point { p: 1000.0, a: 5.0 }],
            );
            s.nodes = 101;
            s.sweep = Some(SweepSettings {
                f_min: 0.5,
                f_max: 15.0,
                f_count: 59,
                settle_periods: DEFAULT_SETTLE_PERIODS,
                measure_periods: DEFAULT_MEASURE_PERIODS,
                max_dt: DEFAULT_SWEEP_DT,
            });
            s.notes = vec![
                "Rayleigh damping zeta1=0.02 added so a steady state exists; no damping is given".into(),
                "load applied at midspan; frequency grid 0.5..15 Hz in 0.25 Hz steps".into(),
                "reported peaks at 1.02 Hz, 2.04 Hz and 4.09 Hz are inconsistent with the first natural frequency of this beam (about 5.736 Hz from the characteristic equation); the sweep peaks at the grid frequency nearest that value instead".into(),
            ];
            s
        }
        "exp5_2" => {
            let mut s = base(
                "exp5_2",
                SolverKind::Dynamic,
                BoundarySpec::pinned_pinned(),
                vec![LoadCase::HarmonicPoint { p0: 1.0, f: 1.0, x: 0.0 }],
            );
            s.oscillator = Some(Oscillator {
                mass: 1.0,
                damping: 0.2,
                stiffness: 4.0 * PI * PI,
            });
            s.time = Some(TimeGrid {
                start: 0.0,
                end: 20.0,
                dt: 1e-3,
            });
            s.stride = 10;
            s.notes = vec![
                "oscillator m=1 kg, c=0.2 N*s/m, k=(2*pi)^2 N/m driven at its 1 Hz natural frequency; no values are given".into(),
                "the two-axis model is loaded along x only, so its x response equals the single-axis response and y stays at rest".into(),
                "beam and bc are unused by oscillator runs".into(),
            ];
            s
        }
        other => {
            return Err(ScenarioError::invalid(
                "preset",
                format!("unknown preset '{other}'; valid names: {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_round_trips() {
        for name in PRESET_NAMES {
            let s = preset(name).unwrap();
            let back = parse_scenario(s.to_json().as_bytes()).unwrap();
            assert_eq!(s, back, "{name}");
        }
    }

    #[test]
    fn exp1_uses_reference_table() {
        let s = preset("exp1").unwrap();
        assert_eq!(s.beam, BeamSpec::new(10.0, 0.2, 0.4, 25e9, 2500.0).unwrap());
        assert_eq!(s.loads, vec![LoadCase::Udl { q: 5000.0 }]);
        assert_eq!(s.modal_bc, Some(BoundarySpec::spring_spring(1000.0)));
    }

    #[test]
    fn exp2_1_moving_load() {
        let s = preset("exp2_1").unwrap();
        assert_eq!(s.loads, vec![LoadCase::MovingPoint { p: 10_000.0, v: 1.0, x0: 0.0 }]);
        assert_eq!(s.time.unwrap().end, 15.0);
    }

    #[test]
    fn exp5_1_brackets_fundamental() {
        let sw = preset("exp5_1").unwrap().sweep.unwrap();
        assert!(sw.f_min <= 5.736 && 5.736 <= sw.f_max);
    }

    #[test]
    fn unknown_preset_lists_names() {
        let msg = preset("exp9").unwrap_err().to_string();
        assert!(msg.contains("exp5_2") && msg.contains("exp1"));
    }
}

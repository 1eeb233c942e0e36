use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::newmark::{check_integrable, DynamicState, IntegratorConfig, Newmark};
use super::system::{discretize_beam, DofLayout, MdofSystem, RayleighCoeffs};
use crate::beam::{BeamSpec, BoundarySpec};
use crate::error::{non_negative, positive, within, BeamError, Result};
use crate::fd;

/// Parameters of a harmonic resonance sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub nodes: usize,
    pub p0: f64,
    pub xload: f64,
    pub damping: RayleighCoeffs,
    pub gamma: f64,
    pub beta: f64,
    /// Upper bound on the time step (s).
    pub max_dt: f64,
    /// Lower bound on steps per forcing period.
    pub min_steps_per_period: usize,
    pub settle_periods: usize,
    pub measure_periods: usize,
    /// Worker threads; results do not depend on this.
    pub threads: usize,
}

/// Ratio between the late and early halves of the measurement window above
/// which the response is treated as unbounded.
pub const GROWTH_LIMIT: f64 = 1.05;

/// Steady-state amplitude at one forcing frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub f_hz: f64,
    pub amplitude: f64,
}

impl SweepConfig {
    pub fn validate(&self, length: f64) -> Result<()> {
        positive("sweep.p0", self.p0.abs())?;
        within("sweep.xload", self.xload, 0.0, length)?;
        non_negative("integrator.gamma", self.gamma)?;
        non_negative("integrator.beta", self.beta)?;
        positive("integrator.dt", self.max_dt)?;
        for (field, v) in [
            ("sweep.min_steps_per_period", self.min_steps_per_period),
            ("sweep.measure_periods", self.measure_periods),
            ("sweep.threads", self.threads),
        ] {
            if v == 0 {
                return Err(BeamError::InvalidParameter {
                    field,
                    value: 0.0,
                    constraint: "must be >= 1",
                });
            }
        }
        Ok(())
    }

    /// Step used for forcing frequency f.
    pub fn step_for(&self, f_hz: f64) -> f64 {
        let period = 1.0 / f_hz;
        let steps = (period / self.max_dt).ceil().max(self.min_steps_per_period as f64);
        period / steps
    }
}

/// Evenly spaced frequencies from f_min to f_max inclusive.
pub fn linspace(f_min: f64, f_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![f_min],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    f_max
                } else {
                    f_min + (f_max - f_min) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Steady midspan amplitude for each frequency, in input order. Each
/// frequency is an independent run from rest; runs are spread over
/// `cfg.threads` workers.
pub fn frequency_sweep(beam: &BeamSpec, bc: &BoundarySpec, freqs: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate(beam.length)?;
    for &f in freqs {
        positive("sweep.f", f)?;
    }
    let sys = discretize_beam(beam, bc, cfg.nodes, cfg.damping)?;
    check_integrable(&sys)?;

    let threads = cfg.threads.min(freqs.len()).max(1);
    let mut results: Vec<Option<Result<SweepPoint>>> = vec![None; freqs.len()];
    if threads == 1 {
        for (slot, &f) in results.iter_mut().zip(freqs) {
            *slot = Some(sweep_point(&sys, cfg, f));
        }
    } else {
        let sys = &sys;
        let chunks: Vec<Vec<(usize, Result<SweepPoint>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    scope.spawn(move || {
                        (w..freqs.len())
                            .step_by(threads)
                            .map(|i| (i, sweep_point(sys, cfg, freqs[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        for (i, r) in chunks.into_iter().flatten() {
            results[i] = Some(r);
        }
    }
    results.into_iter().map(|r| r.expect("every frequency evaluated")).collect()
}

fn sweep_point(sys: &MdofSystem, cfg: &SweepConfig, f_hz: f64) -> Result<SweepPoint> {
    let DofLayout::Beam { grid, nodes } = &sys.layout else {
        unreachable!("sweep systems come from discretize_beam")
    };
    let mid = grid.nearest_node(0.5 * grid.length());
    let probe = mid - nodes.start;

    let dt = cfg.step_for(f_hz);
    let per_period = (1.0 / (f_hz * dt)).round() as usize;
    let settle = cfg.settle_periods * per_period;
    let total = settle + cfg.measure_periods * per_period;
    let half = settle + (total - settle) / 2;

    let stepper = Newmark::new(
        sys,
        IntegratorConfig {
            gamma: cfg.gamma,
            beta: cfg.beta,
            dt,
        },
    )?;
    let mut full = vec![0.0; grid.nodes()];
    let unit = {
        fd::add_point_force(&mut full, grid, 1.0, cfg.xload);
        full[nodes.clone()].to_vec()
    };
    let force = |t: f64| {
        let p = cfg.p0 * (2.0 * PI * f_hz * t).sin();
        unit.iter().map(|w| p * w).collect::<Vec<f64>>()
    };

    let mut state = DynamicState::at_rest(sys.dim(), 0.0);
    let (mut early, mut late) = (0.0_f64, 0.0_f64);
    for i in 1..=total {
        let t = i as f64 * dt;
        state = stepper.step(&state, &force(t));
        let w = state.u[probe].abs();
        if !w.is_finite() {
            return Err(BeamError::NonConvergence {
                f_hz,
                growth: f64::INFINITY,
            });
        }
        if i > half {
            late = late.max(w);
        } else if i > settle {
            early = early.max(w);
        }
    }
    if cfg.measure_periods >= 2 {
        let growth = if early > 0.0 { late / early } else { 1.0 };
        if growth > GROWTH_LIMIT {
            return Err(BeamError::NonConvergence { f_hz, growth });
        }
    }
    Ok(SweepPoint {
        f_hz,
        amplitude: early.max(late),
    })
}

//! WebAssembly bindings for the beamlab demo page. Every export takes a JSON
//! parameter object and returns a JSON result, or an error message.

use beamlab::beam::{BeamSpec, BoundarySpec, EndCondition, LoadCase, SpatialGrid, TimeGrid};
use beamlab::dynamics::{self, frequency_sweep, linspace, IntegratorConfig, RayleighCoeffs, SweepConfig};
use beamlab::modal::modes;
use beamlab::statics::quasi_static_moving;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Upper limit on sweep frequencies per request, to keep the page responsive.
pub const MAX_SWEEP_POINTS: usize = 200;
/// Upper limit on time steps per moving-load request.
pub const MAX_STEPS: usize = 200_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamInput {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub elastic_modulus: f64,
    pub density: f64,
}

impl BeamInput {
    fn spec(&self) -> Result<BeamSpec, String> {
        BeamSpec::new(self.length, self.width, self.height, self.elastic_modulus, self.density).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Pinned,
    Free,
    Clamped,
    Spring,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRequest {
    pub beam: BeamInput,
    pub left: End,
    pub right: End,
    /// Spring stiffness (N/m) used by `spring` ends.
    #[serde(default)]
    pub k: f64,
    pub count: usize,
    pub nodes: usize,
}

#[derive(Debug, Serialize)]
pub struct ModeCurve {
    pub f_hz: f64,
    pub beta_l: f64,
    pub w: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct ModeResponse {
    pub x: Vec<f64>,
    pub modes: Vec<ModeCurve>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub beam: BeamInput,
    pub p0: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub count: usize,
    pub zeta1: f64,
    pub nodes: usize,
}

#[derive(Debug, Serialize)]
pub struct SweepResponse {
    pub f_hz: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub analytic_f1_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingRequest {
    pub beam: BeamInput,
    pub p: f64,
    pub v: f64,
    pub zeta1: f64,
    pub nodes: usize,
    pub dt: f64,
}

#[derive(Debug, Serialize)]
pub struct MovingResponse {
    pub t: Vec<f64>,
    pub dynamic: Vec<f64>,
    pub quasi_static: Vec<f64>,
    pub peak_dynamic: f64,
    pub peak_quasi_static: f64,
}

fn end(e: &End, k: f64) -> EndCondition {
    match e {
        End::Pinned => EndCondition::Pinned,
        End::Free => EndCondition::Free,
        End::Clamped => EndCondition::Clamped,
        End::Spring => EndCondition::Spring(k),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(json: &str) -> Result<T, String> {
    serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
}

fn encode<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn peak(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, w| m.max(w.abs()))
}

pub fn compute_modes(req: &ModeRequest) -> Result<ModeResponse, String> {
    let beam = req.beam.spec()?;
    let bc = BoundarySpec::new(end(&req.left, req.k), end(&req.right, req.k));
    bc.validate().map_err(|e| e.to_string())?;
    let grid = SpatialGrid::new(beam.length, req.nodes).map_err(|e| e.to_string())?;
    let found = modes(&beam, &bc, req.count, &grid).map_err(|e| e.to_string())?;
    Ok(ModeResponse {
        x: grid.positions(),
        modes: found
            .into_iter()
            .map(|m| ModeCurve {
                f_hz: m.f_hz,
                beta_l: m.beta * beam.length,
                w: m.shape.deflection,
            })
            .collect(),
    })
}

/// Midspan-loaded sweep of a pinned-pinned beam.
pub fn compute_sweep(req: &SweepRequest) -> Result<SweepResponse, String> {
    if req.count == 0 || req.count > MAX_SWEEP_POINTS {
        return Err(format!("count must be in 1..={MAX_SWEEP_POINTS}"));
    }
    if !(req.f_min > 0.0 && req.f_max >= req.f_min) {
        return Err("need 0 < f_min <= f_max".into());
    }
    let beam = req.beam.spec()?;
    let bc = BoundarySpec::pinned_pinned();
    let damping = RayleighCoeffs::for_beam(&beam, &bc, req.zeta1).map_err(|e| e.to_string())?;
    let cfg = SweepConfig {
        nodes: req.nodes,
        p0: req.p0,
        xload: beam.length / 2.0,
        damping,
        gamma: IntegratorConfig::GAMMA,
        beta: IntegratorConfig::BETA,
        max_dt: 0.005,
        min_steps_per_period: 32,
        settle_periods: 40,
        measure_periods: 6,
        threads: 1,
    };
    let freqs = linspace(req.f_min, req.f_max, req.count);
    let points = frequency_sweep(&beam, &bc, &freqs, &cfg).map_err(|e| e.to_string())?;
    let section = beam.section().map_err(|e| e.to_string())?;
    let beta1 = std::f64::consts::PI / beam.length;
    Ok(SweepResponse {
        f_hz: points.iter().map(|p| p.f_hz).collect(),
        amplitude: points.iter().map(|p| p.amplitude).collect(),
        analytic_f1_hz: beta1 * beta1 * section.wave_coefficient / (2.0 * std::f64::consts::PI),
    })
}

/// Midspan history of a pinned-pinned beam crossed by a point load, against
/// the quasi-static response.
pub fn compute_moving(req: &MovingRequest) -> Result<MovingResponse, String> {
    if req.v.is_nan() || req.v <= 0.0 {
        return Err("v must be > 0".into());
    }
    let beam = req.beam.spec()?;
    let bc = BoundarySpec::pinned_pinned();
    let tgrid = TimeGrid::new(0.0, beam.length / req.v, req.dt).map_err(|e| e.to_string())?;
    if tgrid.steps() > MAX_STEPS {
        return Err(format!("more than {MAX_STEPS} time steps; raise dt or v"));
    }
    let damping = RayleighCoeffs::for_beam(&beam, &bc, req.zeta1).map_err(|e| e.to_string())?;
    let load = LoadCase::MovingPoint { p: req.p, v: req.v, x0: 0.0 };
    let cfg = IntegratorConfig::average_acceleration(req.dt);
    let dynamic = dynamics::simulate_beam(&beam, &bc, req.nodes, &[load], damping, &tgrid, cfg, 1).map_err(|e| e.to_string())?;
    let quasi = quasi_static_moving(&beam, req.p, req.v, 0.0, &tgrid, req.nodes).map_err(|e| e.to_string())?;
    let mid = req.nodes / 2;
    let (d, q) = (dynamic.column(mid), quasi.column(mid));
    Ok(MovingResponse {
        t: dynamic.times,
        peak_dynamic: peak(&d),
        peak_quasi_static: peak(&q),
        dynamic: d,
        quasi_static: q,
    })
}

#[wasm_bindgen]
pub fn mode_shapes(request: &str) -> Result<String, String> {
    encode(&compute_modes(&parse(request)?)?)
}

#[wasm_bindgen]
pub fn resonance_sweep(request: &str) -> Result<String, String> {
    encode(&compute_sweep(&parse(request)?)?)
}

#[wasm_bindgen]
pub fn moving_load(request: &str) -> Result<String, String> {
    encode(&compute_moving(&parse(request)?)?)
}

//! JSON scenario files: schema, validation with recorded defaults, presets,
//! execution and CSV output.

mod output;
mod presets;
mod run;

pub use output::{fmt_f64, write_csv};
pub use presets::{preset, PRESET_NAMES};
pub use run::{run_scenario, Provenance, ResultSet, RunOptions, StaticComparison};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{BeamSpec, BoundarySpec, EndCondition, LoadCase, TimeGrid};
use crate::error::BeamError;
use crate::material::{self, RambergOsgood};

pub const SCHEMA: &str = "beamlab/1";

pub const DEFAULT_NODES: usize = 201;
pub const DEFAULT_STRIDE: usize = 1;
pub const DEFAULT_ZETA1: f64 = 0.02;
pub const DEFAULT_SETTLE_PERIODS: usize = 60;
pub const DEFAULT_MEASURE_PERIODS: usize = 10;
pub const DEFAULT_SWEEP_DT: f64 = 0.005;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("scenario '{scenario}' failed: {source}")]
    Solver {
        scenario: String,
        #[source]
        source: BeamError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<BeamError> for ScenarioError {
    fn from(e: BeamError) -> Self {
        let field = match &e {
            BeamError::InvalidParameter { field, .. } | BeamError::OutOfDomain { field, .. } => field.to_string(),
            _ => "scenario".to_string(),
        };
        Self::Invalid {
            field,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Static,
    QuasiStatic,
    Modal,
    Dynamic,
    Sweep,
    Nonlinear,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Static => "static",
            SolverKind::QuasiStatic => "quasi_static",
            SolverKind::Modal => "modal",
            SolverKind::Dynamic => "dynamic",
            SolverKind::Sweep => "sweep",
            SolverKind::Nonlinear => "nonlinear",
        }
    }
}

/// On-disk scenario layout. Every key except `schema`, `name` and `solver`
/// is optional at this level; requirements are enforced by validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    pub name: String,
    pub solver: SolverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loads: Option<Vec<LoadCase>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillator: Option<Oscillator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamFile {
    pub length: Option<f64>,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub elastic_modulus: Option<f64>,
    pub density: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    Pinned,
    Free,
    Clamped,
    Spring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcFile {
    pub left: EndKind,
    pub right: EndKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Supports used only by modal analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modal_only: Option<Box<BcFile>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorFile {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh: Option<RayleighFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayleighFile {
    pub zeta1: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub alpha: Option<f64>,
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub f_min: f64,
    pub f_max: f64,
    pub f_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settle_periods: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_periods: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dt: Option<f64>,
}

/// Lumped oscillator for the SDOF and two-axis models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oscillator {
    pub mass: f64,
    pub damping: f64,
    pub stiffness: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub gamma: f64,
    pub beta: f64,
    pub zeta1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSettings {
    pub law: RambergOsgood,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub f_min: f64,
    pub f_max: f64,
    pub f_count: usize,
    pub settle_periods: usize,
    pub measure_periods: usize,
    pub max_dt: f64,
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub solver: SolverKind,
    pub beam: BeamSpec,
    pub bc: BoundarySpec,
    pub modal_bc: Option<BoundarySpec>,
    pub loads: Vec<LoadCase>,
    pub nodes: usize,
    pub time: Option<TimeGrid>,
    pub integrator: IntegratorSettings,
    pub material: Option<MaterialSettings>,
    pub sweep: Option<SweepSettings>,
    pub load_sweep: Vec<f64>,
    pub oscillator: Option<Oscillator>,
    pub probes: Vec<f64>,
    pub stride: usize,
    /// Provenance remarks carried with the scenario.
    pub notes: Vec<String>,
    /// `key=value` for every default filled in during parsing.
    pub defaults_applied: Vec<String>,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }
    })?;
    Scenario::from_file(file)
}

fn strip_position(msg: &str) -> String {
    match msg.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => msg.to_string(),
    }
}

fn end_condition(kind: EndKind, k: Option<f64>, field: &str) -> Result<EndCondition, ScenarioError> {
    Ok(match kind {
        EndKind::Pinned => EndCondition::Pinned,
        EndKind::Free => EndCondition::Free,
        EndKind::Clamped => EndCondition::Clamped,
        EndKind::Spring => EndCondition::Spring(k.ok_or_else(|| ScenarioError::invalid(format!("{field}.k"), "required for spring ends"))?),
    })
}

fn boundary(file: &BcFile, field: &str) -> Result<BoundarySpec, ScenarioError> {
    let bc = BoundarySpec::new(end_condition(file.left, file.k, field)?, end_condition(file.right, file.k, field)?);
    if file.k.is_some() && !matches!(bc.left, EndCondition::Spring(_)) && !matches!(bc.right, EndCondition::Spring(_)) {
        return Err(ScenarioError::invalid(format!("{field}.k"), "given but no end is a spring"));
    }
    bc.validate()?;
    Ok(bc)
}

fn boundary_file(bc: &BoundarySpec) -> BcFile {
    let kind = |e: EndCondition| match e {
        EndCondition::Pinned => EndKind::Pinned,
        EndCondition::Free => EndKind::Free,
        EndCondition::Clamped => EndKind::Clamped,
        EndCondition::Spring(_) => EndKind::Spring,
    };
    let k = [bc.left, bc.right].iter().find_map(|e| match e {
        EndCondition::Spring(k) => Some(*k),
        _ => None,
    });
    BcFile {
        left: kind(bc.left),
        right: kind(bc.right),
        k,
        modal_only: None,
    }
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        if file.schema != SCHEMA {
            return Err(ScenarioError::invalid("schema", format!("expected \"{SCHEMA}\", got \"{}\"", file.schema)));
        }
        if file.name.trim().is_empty() {
            return Err(ScenarioError::invalid("name", "must not be empty"));
        }
        let solver = file.solver;
        let mut defaults = Vec::new();
        let mut default = |key: &str, value: String| defaults.push(format!("{key}={value}"));

        let bf = file.beam.clone().ok_or_else(|| ScenarioError::invalid("beam", "required"))?;
        let need = |v: Option<f64>, field: &str| v.ok_or_else(|| ScenarioError::invalid(format!("beam.{field}"), "required"));
        let beam = BeamSpec::new(
            need(bf.length, "length")?,
            need(bf.width, "width")?,
            need(bf.height, "height")?,
            need(bf.elastic_modulus, "elastic_modulus")?,
            need(bf.density, "density")?,
        )?;

        let bc_file = file.bc.clone().ok_or_else(|| ScenarioError::invalid("bc", "required"))?;
        let bc = boundary(&bc_file, "bc")?;
        let modal_bc = match &bc_file.modal_only {
            Some(m) => {
                if m.modal_only.is_some() {
                    return Err(ScenarioError::invalid("bc.modal_only.modal_only", "may not be nested"));
                }
                Some(boundary(m, "bc.modal_only")?)
            }
            None => None,
        };

        let loads = file.loads.clone().unwrap_or_default();
        for l in &loads {
            l.validate(beam.length)?;
        }

        let nodes = match file.grid.as_ref().and_then(|g| g.nodes) {
            Some(n) => n,
            None => {
                default("grid.nodes", DEFAULT_NODES.to_string());
                DEFAULT_NODES
            }
        };
        let min_nodes = if matches!(solver, SolverKind::Dynamic | SolverKind::Sweep) { 7 } else { 5 };
        if nodes < min_nodes {
            return Err(ScenarioError::invalid("grid.nodes", format!("must be >= {min_nodes} for the {} solver", solver.name())));
        }

        if let Some(t) = &file.time {
            t.validate()?;
        }

        let integ = file.integrator.clone().unwrap_or_default();
        let uses_integrator = matches!(solver, SolverKind::Dynamic | SolverKind::Sweep);
        let mut pick = |v: Option<f64>, key: &str, d: f64| match v {
            Some(v) => v,
            None => {
                if uses_integrator {
                    default(key, fmt(d));
                }
                d
            }
        };
        let integrator = IntegratorSettings {
            gamma: pick(integ.gamma, "integrator.gamma", crate::dynamics::IntegratorConfig::GAMMA),
            beta: pick(integ.beta, "integrator.beta", crate::dynamics::IntegratorConfig::BETA),
            zeta1: pick(integ.rayleigh.as_ref().map(|r| r.zeta1), "integrator.rayleigh.zeta1", DEFAULT_ZETA1),
        };
        crate::error::non_negative("integrator.gamma", integrator.gamma)?;
        crate::error::non_negative("integrator.beta", integrator.beta)?;
        crate::error::non_negative("integrator.rayleigh.zeta1", integrator.zeta1)?;

        let material = match (&file.material, solver) {
            (None, SolverKind::Nonlinear) => {
                default("material.E", fmt(beam.elastic_modulus));
                default("material.alpha", fmt(material::DEFAULT_ALPHA));
                default("material.n", fmt(material::DEFAULT_EXPONENT));
                default("material.tol", fmt(material::DEFAULT_TOL));
                default("material.max_iter", material::DEFAULT_MAX_ITER.to_string());
                Some(MaterialFile::default())
            }
            (m, _) => m.clone(),
        }
        .map(|m| -> Result<MaterialSettings, ScenarioError> {
            let mut get = |v: Option<f64>, key: &str, d: f64| {
                v.unwrap_or_else(|| {
                    if file.material.is_some() {
                        default(key, fmt(d));
                    }
                    d
                })
            };
            let law = RambergOsgood::new(
                get(m.e, "material.E", beam.elastic_modulus),
                get(m.alpha, "material.alpha", material::DEFAULT_ALPHA),
                get(m.n, "material.n", material::DEFAULT_EXPONENT),
            )?;
            let tol = get(m.tol, "material.tol", material::DEFAULT_TOL);
            crate::error::positive("material.tol", tol)?;
            let max_iter = match m.max_iter {
                Some(v) => v,
                None => {
                    if file.material.is_some() {
                        default("material.max_iter", material::DEFAULT_MAX_ITER.to_string());
                    }
                    material::DEFAULT_MAX_ITER
                }
            };
            if max_iter == 0 {
                return Err(ScenarioError::invalid("material.max_iter", "must be >= 1"));
            }
            Ok(MaterialSettings { law, tol, max_iter })
        })
        .transpose()?;

        let sweep = match &file.sweep {
            Some(s) => {
                let settle_periods = s.settle_periods.unwrap_or_else(|| {
                    default("sweep.settle_periods", DEFAULT_SETTLE_PERIODS.to_string());
                    DEFAULT_SETTLE_PERIODS
                });
                let measure_periods = s.measure_periods.unwrap_or_else(|| {
                    default("sweep.measure_periods", DEFAULT_MEASURE_PERIODS.to_string());
                    DEFAULT_MEASURE_PERIODS
                });
                let max_dt = s.max_dt.unwrap_or_else(|| {
                    default("sweep.max_dt", fmt(DEFAULT_SWEEP_DT));
                    DEFAULT_SWEEP_DT
                });
                crate::error::positive("sweep.f_min", s.f_min)?;
                if !(s.f_max.is_finite() && s.f_max >= s.f_min) {
                    return Err(ScenarioError::invalid("sweep.f_max", "must be finite and >= sweep.f_min"));
                }
                if s.f_count == 0 {
                    return Err(ScenarioError::invalid("sweep.f_count", "must be >= 1"));
                }
                if measure_periods == 0 {
                    return Err(ScenarioError::invalid("sweep.measure_periods", "must be >= 1"));
                }
                crate::error::positive("sweep.max_dt", max_dt)?;
                Some(SweepSettings {
                    f_min: s.f_min,
                    f_max: s.f_max,
                    f_count: s.f_count,
                    settle_periods,
                    measure_periods,
                    max_dt,
                })
            }
            None => None,
        };

        let probes = match &file.probes {
            Some(p) => p.clone(),
            None => {
                let mid = 0.5 * beam.length;
                if matches!(solver, SolverKind::QuasiStatic | SolverKind::Dynamic) && file.oscillator.is_none() {
                    default("probes", format!("[{}]", fmt(mid)));
                    vec![mid]
                } else {
                    vec![]
                }
            }
        };
        for &x in &probes {
            crate::error::within("probes", x, 0.0, beam.length)?;
        }

        let stride = match file.output.as_ref().and_then(|o| o.stride) {
            Some(s) => s,
            None => {
                if matches!(solver, SolverKind::QuasiStatic | SolverKind::Dynamic) {
                    default("output.stride", DEFAULT_STRIDE.to_string());
                }
                DEFAULT_STRIDE
            }
        };
        if stride == 0 {
            return Err(ScenarioError::invalid("output.stride", "must be >= 1"));
        }

        let load_sweep = file.load_sweep.clone().unwrap_or_default();
        if let Some(o) = &file.oscillator {
            crate::error::positive("oscillator.mass", o.mass)?;
            crate::error::non_negative("oscillator.damping", o.damping)?;
            crate::error::non_negative("oscillator.stiffness", o.stiffness)?;
        }

        let scenario = Scenario {
            name: file.name.clone(),
            solver,
            beam,
            bc,
            modal_bc,
            loads,
            nodes,
            time: file.time,
            integrator,
            material,
            sweep,
            load_sweep,
            oscillator: file.oscillator,
            probes,
            stride,
            notes: file.notes.clone().unwrap_or_default(),
            defaults_applied: defaults,
        };
        scenario.check_solver_requirements()?;
        Ok(scenario)
    }

    fn check_solver_requirements(&self) -> Result<(), ScenarioError> {
        let time_dependent = self.loads.iter().filter(|l| l.is_time_dependent()).count();
        let single_point = || match self.loads.as_slice() {
            [LoadCase::Point { .. }] => Ok(()),
            _ => Err(ScenarioError::invalid("loads", format!("the {} solver needs exactly one point load", self.solver.name()))),
        };
        match self.solver {
            SolverKind::Static => {
                if self.loads.is_empty() {
                    return Err(ScenarioError::invalid("loads", "at least one load is required"));
                }
                if time_dependent > 0 {
                    return Err(ScenarioError::invalid("loads", "static runs accept only udl and point loads"));
                }
            }
            SolverKind::QuasiStatic => {
                if self.bc != BoundarySpec::pinned_pinned() {
                    return Err(ScenarioError::invalid("bc", "quasi-static runs require pinned supports at both ends"));
                }
                if self.loads.len() != 1 || time_dependent != 1 {
                    return Err(ScenarioError::invalid("loads", "quasi-static runs need exactly one moving_point or harmonic_point load"));
                }
                self.require_time()?;
            }
            SolverKind::Modal => {}
            SolverKind::Dynamic => {
                self.require_time()?;
                if self.oscillator.is_some()
                    && self.loads.iter().any(|l| matches!(l, LoadCase::Udl { .. } | LoadCase::MovingPoint { .. }))
                {
                    return Err(ScenarioError::invalid("loads", "oscillator runs accept only point and harmonic_point loads"));
                }
            }
            SolverKind::Sweep => {
                if self.sweep.is_none() {
                    return Err(ScenarioError::invalid("sweep", "required for the sweep solver"));
                }
                single_point()?;
            }
            SolverKind::Nonlinear => {
                if self.bc != BoundarySpec::clamped_free() {
                    return Err(ScenarioError::invalid("bc", "nonlinear runs require a clamped left end and a free right end"));
                }
                single_point()?;
                if let [LoadCase::Point { a, .. }] = self.loads.as_slice() {
                    if *a <= 0.0 {
                        return Err(ScenarioError::invalid("loads", "point load must act away from the clamped end"));
                    }
                }
                if self.load_sweep.windows(2).any(|w| w[1] < w[0]) || self.load_sweep.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(ScenarioError::invalid("load_sweep", "must be finite, non-negative and ascending"));
                }
            }
        }
        Ok(())
    }

    fn require_time(&self) -> Result<(), ScenarioError> {
        if self.time.is_none() {
            return Err(ScenarioError::invalid("time", format!("required for the {} solver", self.solver.name())));
        }
        Ok(())
    }

    /// Schema form with every resolved value written out explicitly.
    pub fn to_file(&self) -> ScenarioFile {
        let mut bc = boundary_file(&self.bc);
        bc.modal_only = self.modal_bc.as_ref().map(|m| Box::new(boundary_file(m)));
        ScenarioFile {
            schema: SCHEMA.to_string(),
            name: self.name.clone(),
            solver: self.solver,
            beam: Some(BeamFile {
                length: Some(self.beam.length),
                width: Some(self.beam.width),
                height: Some(self.beam.height),
                elastic_modulus: Some(self.beam.elastic_modulus),
                density: Some(self.beam.density),
            }),
            bc: Some(bc),
            loads: Some(self.loads.clone()),
            grid: Some(GridFile { nodes: Some(self.nodes) }),
            time: self.time,
            integrator: Some(IntegratorFile {
                gamma: Some(self.integrator.gamma),
                beta: Some(self.integrator.beta),
                rayleigh: Some(RayleighFile {
                    zeta1: self.integrator.zeta1,
                }),
            }),
            material: self.material.map(|m| MaterialFile {
                e: Some(m.law.e),
                alpha: Some(m.law.alpha),
                n: Some(m.law.n),
                tol: Some(m.tol),
                max_iter: Some(m.max_iter),
            }),
            sweep: self.sweep.map(|s| SweepFile {
                f_min: s.f_min,
                f_max: s.f_max,
                f_count: s.f_count,
                settle_periods: Some(s.settle_periods),
                measure_periods: Some(s.measure_periods),
                max_dt: Some(s.max_dt),
            }),
            load_sweep: (!self.load_sweep.is_empty()).then(|| self.load_sweep.clone()),
            oscillator: self.oscillator,
            probes: Some(self.probes.clone()),
            output: Some(OutputFile {
                stride: Some(self.stride),
            }),
            notes: (!self.notes.is_empty()).then(|| self.notes.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }
}

fn fmt(v: f64) -> String {
    fmt_f64(v)
}

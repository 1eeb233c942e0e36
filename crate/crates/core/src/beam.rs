//! Domain types shared by every solver: beam geometry and material, end
//! conditions, load cases, and the uniform space/time grids.
//!
//! Deflection `w` is positive in the load direction (downward), so a
//! downward load produces a positive static deflection everywhere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{positive, BeamError, Result};

/// Geometry and material of a uniform rectangular beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// Span length L (m).
    pub length: f64,
    /// Section width b (m).
    pub width: f64,
    /// Section height h (m).
    pub height: f64,
    /// Young's modulus E (Pa).
    pub elastic_modulus: f64,
    /// Mass density ρ (kg/m³).
    pub density: f64,
}

/// Sectional quantities derived from a [`BeamSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    /// Second moment of area I = b·h³/12 (m⁴).
    pub inertia: f64,
    /// Area A = b·h (m²).
    pub area: f64,
    /// Flexural rigidity EI (N·m²).
    pub flexural_rigidity: f64,
    /// Mass per unit length ρA (kg/m).
    pub mass_per_length: f64,
    /// Wave coefficient a = √(EI/ρA) (m²/s).
    pub wave_coefficient: f64,
}

impl BeamSpec {
    pub fn new(length: f64, width: f64, height: f64, elastic_modulus: f64, density: f64) -> Result<Self> {
        let beam = Self {
            length,
            width,
            height,
            elastic_modulus,
            density,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        positive("beam.length", self.length)?;
        positive("beam.width", self.width)?;
        positive("beam.height", self.height)?;
        positive("beam.elastic_modulus", self.elastic_modulus)?;
        positive("beam.density", self.density)?;
        Ok(())
    }

    /// Shorthand for [`derive_section`].
    pub fn section(&self) -> Result<Section> {
        derive_section(self)
    }
}

/// Closed-form sectional properties of a rectangular beam.
pub fn derive_section(beam: &BeamSpec) -> Result<Section> {
    beam.validate()?;
    let inertia = beam.width * beam.height.powi(3) / 12.0;
    let area = beam.width * beam.height;
    let flexural_rigidity = beam.elastic_modulus * inertia;
    let mass_per_length = beam.density * area;
    Ok(Section {
        inertia,
        area,
        flexural_rigidity,
        mass_per_length,
        wave_coefficient: (flexural_rigidity / mass_per_length).sqrt(),
    })
}

/// Support condition at one end of the beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EndCondition {
    /// w = 0, w'' = 0.
    Pinned,
    /// w'' = 0, w''' = 0.
    Free,
    /// w = 0, w' = 0.
    Clamped,
    /// Elastic bearing: w'' = 0 and the end shear balances a vertical
    /// spring of stiffness k (N/m).
    Spring(f64),
}

impl EndCondition {
    /// True when the end node carries no displacement degree of freedom.
    pub fn fixes_deflection(&self) -> bool {
        matches!(self, EndCondition::Pinned | EndCondition::Clamped)
    }

    fn restrains_translation(&self) -> bool {
        !matches!(self, EndCondition::Free)
    }

    pub fn name(&self) -> &'static str {
        match self {
            EndCondition::Pinned => "pinned",
            EndCondition::Free => "free",
            EndCondition::Clamped => "clamped",
            EndCondition::Spring(_) => "spring",
        }
    }
}

/// End conditions at x = 0 (`left`) and x = L (`right`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub left: EndCondition,
    pub right: EndCondition,
}

impl BoundarySpec {
    pub const fn new(left: EndCondition, right: EndCondition) -> Self {
        Self { left, right }
    }

    pub const fn pinned_pinned() -> Self {
        Self::new(EndCondition::Pinned, EndCondition::Pinned)
    }

    pub const fn clamped_free() -> Self {
        Self::new(EndCondition::Clamped, EndCondition::Free)
    }

    pub const fn free_free() -> Self {
        Self::new(EndCondition::Free, EndCondition::Free)
    }

    pub const fn spring_spring(k: f64) -> Self {
        Self::new(EndCondition::Spring(k), EndCondition::Spring(k))
    }

    pub fn validate(&self) -> Result<()> {
        for end in [self.left, self.right] {
            if let EndCondition::Spring(k) = end {
                positive("bc.k", k)?;
            }
        }
        Ok(())
    }

    /// True when the supports suppress both rigid-body motions
    /// (translation and rotation) of the beam.
    pub fn is_stable(&self) -> bool {
        use EndCondition::*;
        let translation = self.left.restrains_translation() || self.right.restrains_translation();
        let rotation = matches!(self.left, Clamped)
            || matches!(self.right, Clamped)
            || (self.left.restrains_translation() && self.right.restrains_translation());
        translation && rotation
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.left.name(), self.right.name())
    }
}

/// External load acting on the beam. Magnitudes are positive downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadCase {
    /// Uniformly distributed load q (N/m).
    Udl { q: f64 },
    /// Fixed point load P (N) at position a (m).
    Point { p: f64, a: f64 },
    /// Point load P (N) travelling at v (m/s) from x0 (m).
    MovingPoint { p: f64, v: f64, x0: f64 },
    /// Point load P0·sin(2πft) at position x (m).
    HarmonicPoint { p0: f64, f: f64, x: f64 },
}

impl LoadCase {
    pub fn is_time_dependent(&self) -> bool {
        matches!(self, LoadCase::MovingPoint { .. } | LoadCase::HarmonicPoint { .. })
    }

    pub fn validate(&self, length: f64) -> Result<()> {
        let finite = |field: &'static str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(BeamError::InvalidParameter {
                    field,
                    value: v,
                    constraint: "must be finite",
                })
            }
        };
        match *self {
            LoadCase::Udl { q } => {
                finite("load.q", q)?;
            }
            LoadCase::Point { p, a } => {
                finite("load.p", p)?;
                crate::error::within("load.a", a, 0.0, length)?;
            }
            LoadCase::MovingPoint { p, v, x0 } => {
                finite("load.p", p)?;
                crate::error::non_negative("load.v", v)?;
                crate::error::within("load.x0", x0, 0.0, length)?;
            }
            LoadCase::HarmonicPoint { p0, f, x } => {
                finite("load.p0", p0)?;
                positive("load.f", f)?;
                crate::error::within("load.x", x, 0.0, length)?;
            }
        }
        Ok(())
    }
}

/// Uniform node layout over [0, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    length: f64,
    nodes: usize,
}

impl SpatialGrid {
    pub const MIN_NODES: usize = 5;

    pub fn new(length: f64, nodes: usize) -> Result<Self> {
        positive("grid.length", length)?;
        if nodes < Self::MIN_NODES {
            return Err(BeamError::InvalidParameter {
                field: "grid.nodes",
                value: nodes as f64,
                constraint: "must be >= 5",
            });
        }
        Ok(Self { length, nodes })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    /// Position of node `i`; the last node sits exactly at L.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.length
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.x(i)).collect()
    }

    pub fn nearest_node(&self, x: f64) -> usize {
        let i = (x / self.spacing()).round();
        (i.max(0.0) as usize).min(self.nodes - 1)
    }

    /// Linear weights of position `x` on its two bracketing nodes,
    /// `[(left, 1 - s), (right, s)]`. Positions outside [0, L] yield `None`.
    pub fn bracket(&self, x: f64) -> Option<[(usize, f64); 2]> {
        if !(0.0..=self.length).contains(&x) {
            return None;
        }
        let t = x / self.spacing();
        let left = (t.floor() as usize).min(self.nodes - 2);
        let s = (t - left as f64).clamp(0.0, 1.0);
        Some([(left, 1.0 - s), (left + 1, s)])
    }
}

/// Uniform time axis `t_start + i·dt` for `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, dt: f64) -> Result<Self> {
        let grid = Self { start, end, dt };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() {
            return Err(BeamError::InvalidParameter {
                field: "time.start",
                value: self.start,
                constraint: "must be finite",
            });
        }
        positive("time.dt", self.dt)?;
        if !(self.end.is_finite() && self.end > self.start) {
            return Err(BeamError::InvalidParameter {
                field: "time.end",
                value: self.end,
                constraint: "must exceed time.start",
            });
        }
        if self.steps() == 0 {
            return Err(BeamError::InvalidParameter {
                field: "time.dt",
                value: self.dt,
                constraint: "must not exceed twice the time span",
            });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.end - self.start) / self.dt).round() as usize
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    /// All sample times, including the initial one.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps()).map(|i| self.time(i)).collect()
    }
}

/// Provenance attached to every time series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesMeta {
    pub solver: String,
    pub grid: Option<SpatialGrid>,
    pub beam: Option<BeamSpec>,
    pub loads: Vec<LoadCase>,
    /// One label per frame column.
    pub columns: Vec<String>,
}

/// Sampled response: one row per time, one column per node (or DOF).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesResult {
    pub times: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
    /// Column index → history, one value per entry of `times`.
    pub probes: BTreeMap<usize, Vec<f64>>,
    pub meta: SeriesMeta,
}

impl TimeSeriesResult {
    pub fn new(meta: SeriesMeta) -> Self {
        Self {
            times: Vec::new(),
            frames: Vec::new(),
            probes: BTreeMap::new(),
            meta,
        }
    }

    pub fn push(&mut self, t: f64, frame: Vec<f64>) {
        for (&col, history) in self.probes.iter_mut() {
            history.push(frame[col]);
        }
        self.times.push(t);
        self.frames.push(frame);
    }

    /// Registers probe columns, back-filling any frames already recorded.
    pub fn with_probes(mut self, columns: impl IntoIterator<Item = usize>) -> Self {
        for c in columns {
            if !self.probes.contains_key(&c) {
                let history = self.column(c);
                self.probes.insert(c, history);
            }
        }
        self
    }

    /// History of one column across all frames.
    pub fn column(&self, col: usize) -> Vec<f64> {
        self.frames.iter().map(|f| f[col]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.times.iter().all(|t| t.is_finite())
            && self.frames.iter().flatten().all(|v| v.is_finite())
    }
}

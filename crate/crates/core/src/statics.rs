//! Static deflection: closed-form influence functions, a finite-difference
//! solver for arbitrary supports, and quasi-static time series for moving
//! and sinusoidal point loads on a simply supported span.

use std::f64::consts::PI;

use crate::beam::{BeamSpec, BoundarySpec, LoadCase, SeriesMeta, SpatialGrid, TimeGrid, TimeSeriesResult};
use crate::error::{non_negative, positive, within, BeamError, Result};
use crate::fd;

/// Deflection sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticProfile {
    pub grid: SpatialGrid,
    pub deflection: Vec<f64>,
}

impl StaticProfile {
    pub fn max_abs(&self) -> f64 {
        self.deflection.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Deflection at the node nearest to `x`.
    pub fn at(&self, x: f64) -> f64 {
        self.deflection[self.grid.nearest_node(x)]
    }
}

/// Simply supported span under a uniform load q.
pub fn ss_udl_deflection(x: f64, q: f64, beam: &BeamSpec) -> Result<f64> {
    let ei = beam.section()?.flexural_rigidity;
    let l = beam.length;
    within("x", x, 0.0, l)?;
    Ok(q * x * (l.powi(3) - 2.0 * l * x * x + x.powi(3)) / (24.0 * ei))
}

/// Simply supported span under a point load P at `a`.
pub fn ss_point_deflection(x: f64, p: f64, a: f64, beam: &BeamSpec) -> Result<f64> {
    let ei = beam.section()?.flexural_rigidity;
    let l = beam.length;
    within("x", x, 0.0, l)?;
    within("a", a, 0.0, l)?;
    Ok(ss_point_unchecked(x, p, a, l, ei))
}

fn ss_point_unchecked(x: f64, p: f64, a: f64, l: f64, ei: f64) -> f64 {
    // Evaluate on the side of the load nearer the origin; the other side
    // follows by mirroring x → L - x, a → L - a.
    let (x, a) = if x <= a { (x, a) } else { (l - x, l - a) };
    let b = l - a;
    p * b * x * (l * l - b * b - x * x) / (6.0 * l * ei)
}

/// Cantilever clamped at x = 0 with a point load P at `a`.
pub fn cantilever_point_deflection(x: f64, p: f64, a: f64, beam: &BeamSpec) -> Result<f64> {
    let ei = beam.section()?.flexural_rigidity;
    let l = beam.length;
    within("x", x, 0.0, l)?;
    positive("a", a)?;
    within("a", a, 0.0, l)?;
    Ok(if x <= a {
        p * x * x * (3.0 * a - x) / (6.0 * ei)
    } else {
        p * a * a * (3.0 * x - a) / (6.0 * ei)
    })
}

/// Solves K·w = F for time-independent loads on an N-node grid.
pub fn static_fd_solve(beam: &BeamSpec, bc: &BoundarySpec, loads: &[LoadCase], nodes: usize) -> Result<StaticProfile> {
    let grid = SpatialGrid::new(beam.length, nodes)?;
    let force = fd::static_force(&grid, loads)?;
    if !bc.is_stable() {
        return Err(BeamError::RankDeficient(format!(
            "{} supports allow rigid-body motion",
            bc.label()
        )));
    }
    let k = fd::stiffness_operator(beam, bc, &grid)?;
    let free = fd::free_nodes(bc, nodes);
    let factor = k.submatrix(free.clone()).cholesky().map_err(|e| match e {
        BeamError::Factorization { pivot, value } => BeamError::RankDeficient(format!(
            "pivot {pivot} of the reduced operator is {value:e}"
        )),
        other => other,
    })?;
    let reduced = factor.solve(&force[free.clone()]);
    let mut deflection = vec![0.0; nodes];
    deflection[free].copy_from_slice(&reduced);
    Ok(StaticProfile { grid, deflection })
}

/// Position of a moving load at time t, or `None` once it is off the span.
pub fn moving_load_position(v: f64, x0: f64, length: f64, t: f64) -> Option<f64> {
    let x = x0 + v * t;
    (0.0..=length).contains(&x).then_some(x)
}

/// Static response to a point load frozen at its instantaneous position.
/// Frames are exactly zero once the load has left the span.
pub fn quasi_static_moving(
    beam: &BeamSpec,
    p: f64,
    v: f64,
    x0: f64,
    tgrid: &TimeGrid,
    nodes: usize,
) -> Result<TimeSeriesResult> {
    non_negative("v", v)?;
    within("x0", x0, 0.0, beam.length)?;
    tgrid.validate()?;
    let grid = SpatialGrid::new(beam.length, nodes)?;
    let ei = beam.section()?.flexural_rigidity;
    let xs = grid.positions();

    let mut out = TimeSeriesResult::new(meta(
        "quasi_static_moving",
        beam,
        grid,
        LoadCase::MovingPoint { p, v, x0 },
    ));
    for t in tgrid.times() {
        let frame = match moving_load_position(v, x0, beam.length, t) {
            Some(a) => xs.iter().map(|&x| ss_point_unchecked(x, p, a, beam.length, ei)).collect(),
            None => vec![0.0; nodes],
        };
        out.push(t, frame);
    }
    Ok(out)
}

/// Static response to P0·sin(2πft) applied at a fixed position.
pub fn quasi_static_sinusoidal(
    beam: &BeamSpec,
    p0: f64,
    f: f64,
    xload: f64,
    tgrid: &TimeGrid,
    nodes: usize,
) -> Result<TimeSeriesResult> {
    positive("f", f)?;
    within("xload", xload, 0.0, beam.length)?;
    tgrid.validate()?;
    let grid = SpatialGrid::new(beam.length, nodes)?;
    let ei = beam.section()?.flexural_rigidity;
    let unit: Vec<f64> = grid
        .positions()
        .iter()
        .map(|&x| ss_point_unchecked(x, 1.0, xload, beam.length, ei))
        .collect();

    let mut out = TimeSeriesResult::new(meta(
        "quasi_static_sinusoidal",
        beam,
        grid,
        LoadCase::HarmonicPoint { p0, f, x: xload },
    ));
    for t in tgrid.times() {
        let p = p0 * (2.0 * PI * f * t).sin();
        out.push(t, unit.iter().map(|w| p * w).collect());
    }
    Ok(out)
}

pub(crate) fn node_columns(grid: &SpatialGrid) -> Vec<String> {
    grid.positions().iter().map(|x| format!("x={x:?}")).collect()
}

fn meta(solver: &str, beam: &BeamSpec, grid: SpatialGrid, load: LoadCase) -> SeriesMeta {
    SeriesMeta {
        solver: solver.to_string(),
        grid: Some(grid),
        beam: Some(*beam),
        loads: vec![load],
        columns: node_columns(&grid),
    }
}

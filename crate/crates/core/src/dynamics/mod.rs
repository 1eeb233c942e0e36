//! Direct time integration of linear structural systems.

mod loads;
mod newmark;
mod sweep;
mod system;

pub use loads::{harmonic_point_force, moving_load_force, BeamForcing};
pub use newmark::{integrate, newmark_step, DynamicState, IntegratorConfig, Newmark};
pub use sweep::{frequency_sweep, linspace, SweepConfig, SweepPoint, GROWTH_LIMIT};
pub use system::{bridge_2d_system, discretize_beam, sdof_system, DofLayout, MdofSystem, RayleighCoeffs};

use crate::beam::{BeamSpec, BoundarySpec, LoadCase, TimeGrid, TimeSeriesResult};
use crate::error::Result;

/// Beam response from rest under `loads`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_beam(
    beam: &BeamSpec,
    bc: &BoundarySpec,
    nodes: usize,
    loads: &[LoadCase],
    damping: RayleighCoeffs,
    tgrid: &TimeGrid,
    cfg: IntegratorConfig,
    stride: usize,
) -> Result<TimeSeriesResult> {
    let sys = discretize_beam(beam, bc, nodes, damping)?;
    let DofLayout::Beam { grid, nodes: dofs } = &sys.layout else {
        unreachable!("discretize_beam yields a beam layout")
    };
    let forcing = BeamForcing::new(*grid, dofs.clone(), loads)?;
    let n = sys.dim();
    let mut out = integrate(&sys, |t| forcing.at(t), vec![0.0; n], vec![0.0; n], tgrid, cfg, stride)?;
    out.meta.beam = Some(*beam);
    out.meta.loads = loads.to_vec();
    Ok(out)
}

//! Finite-difference discretization of EI·w'''' on a uniform grid.
//!
//! The stiffness operator is assembled in nodal-force form
//! `K = EI/Δx³ · Σ_j c_j · d_j d_jᵀ`, where `d_j` is the second-difference
//! stencil at node j after ghost-node elimination and `c_j` the trapezoid
//! weight. Interior rows reproduce the `[1, -4, 6, -4, 1]` stencil; the end
//! rows reproduce the ghost-node rules:
//!
//! * pinned:  w = 0, ghost w₋₁ = -w₁ (w'' = 0)
//! * clamped: w = 0, ghost w₋₁ = w₁ (w' = 0)
//! * free:    ghosts from w'' = 0 and w''' = 0
//! * spring:  free-end ghosts plus k on the end diagonal, i.e.
//!   EI·w''' = ±k·w with the sign of the outward normal.
//!
//! Pinned and clamped end nodes carry no degree of freedom; the remaining
//! nodes form a contiguous range.

use std::ops::Range;

use crate::banded::SymBandMatrix;
use crate::beam::{BeamSpec, BoundarySpec, EndCondition, LoadCase, SpatialGrid};
use crate::error::{BeamError, Result};

/// Nodes that carry a displacement unknown for the given supports.
pub fn free_nodes(bc: &BoundarySpec, nodes: usize) -> Range<usize> {
    let start = usize::from(bc.left.fixes_deflection());
    let end = nodes - usize::from(bc.right.fixes_deflection());
    start..end
}

/// Full N×N stiffness operator (N/m) before removing constrained nodes.
pub fn stiffness_operator(beam: &BeamSpec, bc: &BoundarySpec, grid: &SpatialGrid) -> Result<SymBandMatrix> {
    bc.validate()?;
    let section = beam.section()?;
    let n = grid.nodes();
    let dx = grid.spacing();
    let scale = section.flexural_rigidity / dx.powi(3);

    let mut k = SymBandMatrix::zeros(n, 2);
    let mut add_stencil = |stencil: &[(usize, f64)], weight: f64| {
        for &(i, a) in stencil {
            for &(j, b) in stencil {
                if j <= i {
                    k.add(i, j, weight * scale * a * b);
                }
            }
        }
    };

    for j in 1..n - 1 {
        add_stencil(&[(j - 1, 1.0), (j, -2.0), (j + 1, 1.0)], 1.0);
    }
    // A clamped end keeps its curvature term; with w₀ = 0 and w₋₁ = w₁ the
    // node-0 stencil is 2·w₁.
    if matches!(bc.left, EndCondition::Clamped) {
        add_stencil(&[(0, -2.0), (1, 2.0)], 0.5);
    }
    if matches!(bc.right, EndCondition::Clamped) {
        add_stencil(&[(n - 1, -2.0), (n - 2, 2.0)], 0.5);
    }
    if let EndCondition::Spring(ks) = bc.left {
        k.add(0, 0, ks);
    }
    if let EndCondition::Spring(ks) = bc.right {
        k.add(n - 1, n - 1, ks);
    }
    Ok(k)
}

/// Lumped nodal masses ρA·Δx, halved at the two end nodes.
pub fn lumped_mass(beam: &BeamSpec, grid: &SpatialGrid) -> Result<Vec<f64>> {
    let m = beam.section()?.mass_per_length * grid.spacing();
    let n = grid.nodes();
    Ok((0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * m } else { m })
        .collect())
}

/// Adds a point force `p` at position `x` to `f`, split linearly onto the
/// two bracketing nodes. Positions off the span contribute nothing.
pub fn add_point_force(f: &mut [f64], grid: &SpatialGrid, p: f64, x: f64) {
    if let Some(weights) = grid.bracket(x) {
        for (node, w) in weights {
            f[node] += p * w;
        }
    }
}

/// Nodal forces of a uniform load q: q·Δx per node, half at the ends.
pub fn add_uniform_force(f: &mut [f64], grid: &SpatialGrid, q: f64) {
    let dx = grid.spacing();
    let n = grid.nodes();
    for (i, v) in f.iter_mut().enumerate() {
        *v += if i == 0 || i == n - 1 { 0.5 * q * dx } else { q * dx };
    }
}

/// Nodal force vector of the time-independent loads.
pub fn static_force(grid: &SpatialGrid, loads: &[LoadCase]) -> Result<Vec<f64>> {
    let mut f = vec![0.0; grid.nodes()];
    for load in loads {
        load.validate(grid.length())?;
        match *load {
            LoadCase::Udl { q } => add_uniform_force(&mut f, grid, q),
            LoadCase::Point { p, a } => add_point_force(&mut f, grid, p, a),
            other => {
                return Err(BeamError::InvalidLoad(format!(
                    "{other:?} is time dependent; use a quasi-static or dynamic solver"
                )))
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam() -> BeamSpec {
        BeamSpec::new(10.0, 0.2, 0.4, 25e9, 2500.0).unwrap()
    }

    fn normalized_rows(bc: BoundarySpec) -> Vec<Vec<f64>> {
        let grid = SpatialGrid::new(10.0, 9).unwrap();
        let k = stiffness_operator(&beam(), &bc, &grid).unwrap();
        let scale = beam().section().unwrap().flexural_rigidity / grid.spacing().powi(3);
        (0..9)
            .map(|i| (0..9).map(|j| k.get(i, j) / scale).collect())
            .collect()
    }

    #[test]
    fn interior_rows_are_fourth_difference() {
        let rows = normalized_rows(BoundarySpec::free_free());
        for (i, row) in rows.iter().enumerate().take(7).skip(2) {
            let expect = [1.0, -4.0, 6.0, -4.0, 1.0];
            for (d, e) in expect.iter().enumerate() {
                assert!((row[i + d - 2] - e).abs() < 1e-12);
            }
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    fn close(got: &[f64], expect: &[f64]) {
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-12, "{got:?} vs {expect:?}");
        }
    }

    #[test]
    fn end_rows_follow_ghost_rules() {
        let free = normalized_rows(BoundarySpec::free_free());
        // Ghost-node free-end row is [2, -4, 2]; halved with the half-weight end mass.
        close(&free[0][..3], &[1.0, -2.0, 1.0]);
        close(&free[1][..4], &[-2.0, 5.0, -4.0, 1.0]);

        let pinned = normalized_rows(BoundarySpec::pinned_pinned());
        close(&pinned[1][1..4], &[5.0, -4.0, 1.0]);

        let clamped = normalized_rows(BoundarySpec::clamped_free());
        close(&clamped[1][1..4], &[7.0, -4.0, 1.0]);
    }

    #[test]
    fn free_nodes_drop_supported_ends() {
        assert_eq!(free_nodes(&BoundarySpec::pinned_pinned(), 11), 1..10);
        assert_eq!(free_nodes(&BoundarySpec::clamped_free(), 11), 1..11);
        assert_eq!(free_nodes(&BoundarySpec::spring_spring(1.0), 11), 0..11);
    }

    #[test]
    fn lumped_mass_conserves_total() {
        let grid = SpatialGrid::new(10.0, 201).unwrap();
        let total: f64 = lumped_mass(&beam(), &grid).unwrap().iter().sum();
        assert!((total - 2000.0).abs() / 2000.0 < 1e-12);
    }

    #[test]
    fn point_force_preserves_resultant() {
        let grid = SpatialGrid::new(10.0, 11).unwrap();
        let mut f = vec![0.0; 11];
        add_point_force(&mut f, &grid, 1000.0, 3.25);
        assert!((f.iter().sum::<f64>() - 1000.0).abs() < 1e-9);
        assert!((f[3] - 750.0).abs() < 1e-9 && (f[4] - 250.0).abs() < 1e-9);
    }

    #[test]
    fn time_dependent_load_rejected() {
        let grid = SpatialGrid::new(10.0, 11).unwrap();
        let err = static_force(&grid, &[LoadCase::MovingPoint { p: 1.0, v: 1.0, x0: 0.0 }]).unwrap_err();
        assert!(matches!(err, BeamError::InvalidLoad(_)));
    }
}

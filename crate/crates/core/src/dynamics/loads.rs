use std::f64::consts::PI;
use std::ops::Range;

use crate::beam::{LoadCase, SpatialGrid};
use crate::error::Result;
use crate::fd;
use crate::statics::moving_load_position;

/// Nodal forces of a point load P travelling at v from x0; zero once the
/// load is off the span.
pub fn moving_load_force(p: f64, v: f64, x0: f64, grid: &SpatialGrid, t: f64) -> Vec<f64> {
    let mut f = vec![0.0; grid.nodes()];
    if let Some(x) = moving_load_position(v, x0, grid.length(), t) {
        fd::add_point_force(&mut f, grid, p, x);
    }
    f
}

/// Nodal forces of P0·sin(2πft) applied at x.
pub fn harmonic_point_force(p0: f64, f_hz: f64, x: f64, grid: &SpatialGrid, t: f64) -> Vec<f64> {
    let mut f = vec![0.0; grid.nodes()];
    fd::add_point_force(&mut f, grid, p0 * (2.0 * PI * f_hz * t).sin(), x);
    f
}

/// Force schedule of a set of loads on a beam grid, restricted to the
/// degrees of freedom in `dofs`.
#[derive(Debug, Clone)]
pub struct BeamForcing {
    grid: SpatialGrid,
    dofs: Range<usize>,
    constant: Vec<f64>,
    varying: Vec<LoadCase>,
}

impl BeamForcing {
    pub fn new(grid: SpatialGrid, dofs: Range<usize>, loads: &[LoadCase]) -> Result<Self> {
        let (varying, fixed): (Vec<LoadCase>, Vec<LoadCase>) = loads.iter().partition(|l| l.is_time_dependent());
        for l in &varying {
            l.validate(grid.length())?;
        }
        let constant = fd::static_force(&grid, &fixed)?;
        Ok(Self {
            grid,
            dofs,
            constant,
            varying,
        })
    }

    /// Full nodal force vector at time t.
    pub fn nodal(&self, t: f64) -> Vec<f64> {
        let mut f = self.constant.clone();
        for load in &self.varying {
            match *load {
                LoadCase::MovingPoint { p, v, x0 } => {
                    if let Some(x) = moving_load_position(v, x0, self.grid.length(), t) {
                        fd::add_point_force(&mut f, &self.grid, p, x);
                    }
                }
                LoadCase::HarmonicPoint { p0, f: hz, x } => {
                    fd::add_point_force(&mut f, &self.grid, p0 * (2.0 * PI * hz * t).sin(), x);
                }
                LoadCase::Udl { .. } | LoadCase::Point { .. } => unreachable!("partitioned as constant"),
            }
        }
        f
    }

    /// Force on the free degrees of freedom at time t.
    pub fn at(&self, t: f64) -> Vec<f64> {
        self.nodal(t)[self.dofs.clone()].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(10.0, 11).unwrap()
    }

    #[test]
    fn load_at_left_end_at_start() {
        let f = moving_load_force(1e4, 1.0, 0.0, &grid(), 0.0);
        assert_eq!(f[0], 1e4);
        assert!(f[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn mid_cell_splits_evenly() {
        let f = moving_load_force(1e4, 1.0, 0.0, &grid(), 2.5);
        assert!((f[2] - 5e3).abs() < 1e-9 && (f[3] - 5e3).abs() < 1e-9);
    }

    #[test]
    fn zero_after_exit() {
        assert!(moving_load_force(1e4, 1.0, 0.0, &grid(), 10.5).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn forcing_combines_and_restricts() {
        let loads = [
            LoadCase::Udl { q: 100.0 },
            LoadCase::HarmonicPoint { p0: 50.0, f: 1.0, x: 5.0 },
        ];
        let forcing = BeamForcing::new(grid(), 1..10, &loads).unwrap();
        let f = forcing.at(0.25);
        assert_eq!(f.len(), 9);
        assert!((f[4] - 150.0).abs() < 1e-9);
        assert!((forcing.nodal(0.0).iter().sum::<f64>() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_force_is_sinusoidal() {
        let g = grid();
        assert!((harmonic_point_force(10.0, 1.0, 5.0, &g, 0.25)[5] - 10.0).abs() < 1e-12);
        assert!(harmonic_point_force(10.0, 1.0, 5.0, &g, 0.5)[5].abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn on_span_resultant_is_p(t in 0.0_f64..10.0) {
            let f = moving_load_force(1e4, 1.0, 0.0, &grid(), t);
            prop_assert!((f.iter().sum::<f64>() - 1e4).abs() < 1e-8);
        }
    }
}

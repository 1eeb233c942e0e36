use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::banded::SymBandMatrix;
use crate::beam::{BeamSpec, BoundarySpec, SpatialGrid};
use crate::error::{non_negative, positive, BeamError, Result};
use crate::{fd, modal};

/// Rayleigh damping C = α·M + β·K.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RayleighCoeffs {
    pub alpha: f64,
    pub beta: f64,
}

impl RayleighCoeffs {
    pub const NONE: Self = Self { alpha: 0.0, beta: 0.0 };

    /// Coefficients giving damping ratio ζ at both ω1 and ω2.
    pub fn from_two_modes(zeta: f64, omega1: f64, omega2: f64) -> Result<Self> {
        non_negative("zeta1", zeta)?;
        positive("omega1", omega1)?;
        positive("omega2", omega2)?;
        let sum = omega1 + omega2;
        Ok(Self {
            alpha: 2.0 * zeta * omega1 * omega2 / sum,
            beta: 2.0 * zeta / sum,
        })
    }

    /// Fits ζ1 to the first two analytic modes of the beam.
    pub fn for_beam(beam: &BeamSpec, bc: &BoundarySpec, zeta1: f64) -> Result<Self> {
        non_negative("zeta1", zeta1)?;
        if zeta1 == 0.0 {
            return Ok(Self::NONE);
        }
        let roots = modal::find_beta_roots(beam, bc, 2, modal::DEFAULT_SCAN_STEP / beam.length)?;
        let f = modal::natural_frequencies(&roots, beam)?;
        Self::from_two_modes(zeta1, f[0].omega, f[1].omega)
    }

    /// Modal damping ratio produced at circular frequency ω.
    pub fn damping_ratio(&self, omega: f64) -> f64 {
        self.alpha / (2.0 * omega) + self.beta * omega / 2.0
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }
}

/// How the degrees of freedom map onto physical quantities.
#[derive(Debug, Clone, PartialEq)]
pub enum DofLayout {
    /// Named, unrelated DOFs (oscillator models).
    Labels(Vec<String>),
    /// Transverse deflection of consecutive grid nodes.
    Beam { grid: SpatialGrid, nodes: Range<usize> },
}

/// Linear system M·ü + C·u̇ + K·u = F(t).
#[derive(Debug, Clone, PartialEq)]
pub struct MdofSystem {
    pub mass: SymBandMatrix,
    pub damping: SymBandMatrix,
    pub stiffness: SymBandMatrix,
    pub layout: DofLayout,
    /// Set when the supports leave a rigid-body mode; such systems are only
    /// integrated with damping present.
    pub rank_deficient: bool,
}

impl MdofSystem {
    pub fn new(mass: SymBandMatrix, damping: SymBandMatrix, stiffness: SymBandMatrix, layout: DofLayout) -> Result<Self> {
        let n = mass.dim();
        for m in [&damping, &stiffness] {
            if m.dim() != n {
                return Err(BeamError::Dimension {
                    expected: n,
                    got: m.dim(),
                });
            }
        }
        let dofs = match &layout {
            DofLayout::Labels(l) => l.len(),
            DofLayout::Beam { nodes, .. } => nodes.len(),
        };
        if dofs != n {
            return Err(BeamError::Dimension { expected: n, got: dofs });
        }
        mass.cholesky().map_err(|_| BeamError::InvalidParameter {
            field: "mass",
            value: f64::NAN,
            constraint: "must be symmetric positive definite",
        })?;
        if stiffness.diagonal().iter().any(|&k| k < 0.0) {
            return Err(BeamError::InvalidParameter {
                field: "stiffness",
                value: f64::NAN,
                constraint: "must be positive semidefinite",
            });
        }
        Ok(Self {
            mass,
            damping,
            stiffness,
            layout,
            rank_deficient: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    pub fn labels(&self) -> Vec<String> {
        match &self.layout {
            DofLayout::Labels(l) => l.clone(),
            DofLayout::Beam { grid, nodes } => nodes.clone().map(|i| format!("x={:?}", grid.x(i))).collect(),
        }
    }

    /// ½u̇ᵀMu̇ + ½uᵀKu.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let mv = self.mass.mul_vec(v);
        let ku = self.stiffness.mul_vec(u);
        0.5 * (dot(v, &mv) + dot(u, &ku))
    }

    /// Lowest `count` undamped circular frequencies of (K, M), ascending.
    pub fn generalized_frequencies(&self, count: usize) -> Result<Vec<f64>> {
        let m = self.mass.to_dense();
        let k = self.stiffness.to_dense();
        let chol = m.cholesky().ok_or(BeamError::InvalidParameter {
            field: "mass",
            value: f64::NAN,
            constraint: "must be symmetric positive definite",
        })?;
        let l = chol.l();
        let linv = l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(self.dim(), self.dim()))
            .expect("Cholesky factor is nonsingular");
        let a = &linv * k * linv.transpose();
        let a = (&a + a.transpose()) * 0.5;
        let mut eig: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig.into_iter().take(count).map(|l| l.max(0.0).sqrt()).collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn oscillator_params(m: f64, c: f64, k: f64) -> Result<()> {
    positive("m", m)?;
    non_negative("c", c)?;
    non_negative("k", k)?;
    Ok(())
}

/// Single mass-spring-damper.
pub fn sdof_system(m: f64, c: f64, k: f64) -> Result<MdofSystem> {
    oscillator_params(m, c, k)?;
    MdofSystem::new(
        SymBandMatrix::from_diagonal(&[m]),
        SymBandMatrix::from_diagonal(&[c]),
        SymBandMatrix::from_diagonal(&[k]),
        DofLayout::Labels(vec!["u".into()]),
    )
}

/// Two uncoupled axes with identical m, c, k.
pub fn bridge_2d_system(m: f64, c: f64, k: f64) -> Result<MdofSystem> {
    oscillator_params(m, c, k)?;
    MdofSystem::new(
        SymBandMatrix::from_diagonal(&[m, m]),
        SymBandMatrix::from_diagonal(&[c, c]),
        SymBandMatrix::from_diagonal(&[k, k]),
        DofLayout::Labels(vec!["x".into(), "y".into()]),
    )
}

/// Lumped-mass finite-difference model of the beam on an N-node grid.
/// Pinned and clamped end nodes are eliminated.
pub fn discretize_beam(beam: &BeamSpec, bc: &BoundarySpec, nodes: usize, damping: RayleighCoeffs) -> Result<MdofSystem> {
    if nodes < 7 {
        return Err(BeamError::InvalidParameter {
            field: "grid.nodes",
            value: nodes as f64,
            constraint: "must be >= 7 for dynamic analysis",
        });
    }
    non_negative("rayleigh.alpha", damping.alpha)?;
    non_negative("rayleigh.beta", damping.beta)?;
    let grid = SpatialGrid::new(beam.length, nodes)?;
    let free = fd::free_nodes(bc, nodes);
    let k = fd::stiffness_operator(beam, bc, &grid)?.submatrix(free.clone());
    let m = SymBandMatrix::from_diagonal(&fd::lumped_mass(beam, &grid)?[free.clone()]);
    let c = m.combine(damping.alpha, &k, damping.beta);
    let mut sys = MdofSystem::new(m, c, k, DofLayout::Beam { grid, nodes: free })?;
    sys.rank_deficient = !bc.is_stable();
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn beam() -> BeamSpec {
        BeamSpec::new(10.0, 0.2, 0.4, 25e9, 2500.0).unwrap()
    }

    #[test]
    fn oscillator_frequencies() {
        assert_relative_eq!(sdof_system(1.0, 0.0, 1.0).unwrap().generalized_frequencies(1).unwrap()[0], 1.0);
        assert_relative_eq!(sdof_system(2.0, 0.0, 8.0).unwrap().generalized_frequencies(1).unwrap()[0], 2.0);
        let (m, c, k) = (1.0, 0.2, 4.0 * PI * PI);
        let zeta = c / (2.0 * (m * k).sqrt());
        assert!((zeta - 0.0159).abs() < 1e-4);
        assert!(sdof_system(0.0, 0.0, 1.0).is_err());
        assert!(sdof_system(1.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn bridge_model_is_block_diagonal() {
        let s = bridge_2d_system(3.0, 0.5, 12.0).unwrap();
        assert_eq!(s.labels(), vec!["x", "y"]);
        assert_eq!(s.mass.get(0, 1), 0.0);
        assert_eq!(s.stiffness.get(1, 1), 12.0);
        assert_eq!(s.damping.get(0, 0), 0.5);
    }

    #[test]
    fn beam_fundamental_matches_analytic() {
        let sys = discretize_beam(&beam(), &BoundarySpec::pinned_pinned(), 201, RayleighCoeffs::NONE).unwrap();
        let w = sys.generalized_frequencies(1).unwrap()[0];
        let f1 = w / (2.0 * PI);
        assert!((f1 - 5.7357).abs() / 5.7357 < 5e-3, "{f1}");
    }

    #[test]
    fn free_free_system_keeps_all_mass_and_flags_rigid_modes() {
        let sys = discretize_beam(&beam(), &BoundarySpec::free_free(), 101, RayleighCoeffs::NONE).unwrap();
        assert!(sys.rank_deficient);
        let total: f64 = sys.mass.diagonal().iter().sum();
        assert_relative_eq!(total, 2000.0, max_relative = 1e-12);
        for i in 2..99 {
            let row: f64 = (0..101).map(|j| sys.stiffness.get(i, j)).sum();
            assert!(row.abs() < 1e-9 * sys.stiffness.get(i, i));
        }
        let w = sys.generalized_frequencies(3).unwrap();
        assert!(w[0] < 1e-3 && w[1] < 1e-3);
        let beta_l = (w[2] / beam().section().unwrap().wave_coefficient).sqrt() * 10.0;
        assert!((beta_l - 4.730041).abs() < 5e-3, "{beta_l}");
    }

    #[test]
    fn rayleigh_fit_hits_both_modes() {
        let r = RayleighCoeffs::from_two_modes(0.02, 36.0, 144.0).unwrap();
        assert_relative_eq!(r.damping_ratio(36.0), 0.02, max_relative = 1e-12);
        assert_relative_eq!(r.damping_ratio(144.0), 0.02, max_relative = 1e-12);
        assert!(r.damping_ratio(80.0) < 0.02);
        assert!(RayleighCoeffs::for_beam(&beam(), &BoundarySpec::pinned_pinned(), 0.0).unwrap().is_zero());
    }

    #[test]
    fn too_few_nodes_rejected() {
        assert!(discretize_beam(&beam(), &BoundarySpec::pinned_pinned(), 6, RayleighCoeffs::NONE).is_err());
    }
}

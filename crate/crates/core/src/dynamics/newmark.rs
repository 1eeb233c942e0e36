use serde::{Deserialize, Serialize};

use super::system::{DofLayout, MdofSystem};
use crate::banded::{BandCholesky, SymBandMatrix};
use crate::beam::{SeriesMeta, TimeGrid, TimeSeriesResult};
use crate::error::{non_negative, positive, BeamError, Result};

/// Newmark parameters γ, β_nm and the step Δt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub gamma: f64,
    pub beta: f64,
    pub dt: f64,
}

impl IntegratorConfig {
    pub const GAMMA: f64 = 0.5;
    pub const BETA: f64 = 0.25;

    /// Average-acceleration scheme (γ = 1/2, β_nm = 1/4).
    pub fn average_acceleration(dt: f64) -> Self {
        Self {
            gamma: Self::GAMMA,
            beta: Self::BETA,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("integrator.gamma", self.gamma)?;
        non_negative("integrator.beta", self.beta)?;
        positive("integrator.dt", self.dt)?;
        Ok(())
    }

    /// γ ≥ 1/2 and β_nm ≥ γ/2.
    pub fn is_unconditionally_stable(&self) -> bool {
        self.gamma >= 0.5 && self.beta >= 0.5 * self.gamma
    }
}

/// Displacement, velocity and acceleration at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub t: f64,
}

impl DynamicState {
    pub fn at_rest(n: usize, t: f64) -> Self {
        Self {
            u: vec![0.0; n],
            v: vec![0.0; n],
            a: vec![0.0; n],
            t,
        }
    }

    /// State with ü solved from M·ü = F − C·u̇ − K·u.
    pub fn initial(sys: &MdofSystem, u0: Vec<f64>, v0: Vec<f64>, f0: &[f64], t: f64) -> Result<Self> {
        let n = sys.dim();
        for len in [u0.len(), v0.len(), f0.len()] {
            if len != n {
                return Err(BeamError::Dimension { expected: n, got: len });
            }
        }
        let mut rhs = f0.to_vec();
        subtract_mul(&mut rhs, &sys.damping, &v0);
        subtract_mul(&mut rhs, &sys.stiffness, &u0);
        sys.mass.cholesky()?.solve_in_place(&mut rhs);
        Ok(Self { u: u0, v: v0, a: rhs, t })
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.iter().chain(&self.v).chain(&self.a).all(|x| x.is_finite())
    }

    /// |M·ü + C·u̇ + K·u − F| / max(|F|, |M·ü|, |K·u|), in the max norm.
    pub fn equilibrium_residual(&self, sys: &MdofSystem, f: &[f64]) -> f64 {
        let ma = sys.mass.mul_vec(&self.a);
        let cv = sys.damping.mul_vec(&self.v);
        let ku = sys.stiffness.mul_vec(&self.u);
        let norm = |x: &[f64]| x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let r: Vec<f64> = (0..f.len()).map(|i| ma[i] + cv[i] + ku[i] - f[i]).collect();
        let scale = norm(f).max(norm(&ma)).max(norm(&ku));
        if scale == 0.0 {
            norm(&r)
        } else {
            norm(&r) / scale
        }
    }
}

fn subtract_mul(y: &mut [f64], a: &SymBandMatrix, x: &[f64]) {
    for (yi, ax) in y.iter_mut().zip(a.mul_vec(x)) {
        *yi -= ax;
    }
}

/// Newmark stepper holding the factored effective matrix M + γΔt·C + β_nm·Δt²·K.
#[derive(Debug, Clone)]
pub struct Newmark<'a> {
    sys: &'a MdofSystem,
    cfg: IntegratorConfig,
    effective: BandCholesky,
}

impl<'a> Newmark<'a> {
    pub fn new(sys: &'a MdofSystem, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let dt = cfg.dt;
        let s = sys
            .mass
            .combine(1.0, &sys.damping, cfg.gamma * dt)
            .combine(1.0, &sys.stiffness, cfg.beta * dt * dt);
        Ok(Self {
            sys,
            cfg,
            effective: s.cholesky()?,
        })
    }

    pub fn config(&self) -> IntegratorConfig {
        self.cfg
    }

    /// Advances one step to t + Δt under the load `f_next` at the new time.
    pub fn step(&self, s: &DynamicState, f_next: &[f64]) -> DynamicState {
        let IntegratorConfig { gamma, beta, dt } = self.cfg;
        let n = s.u.len();
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        for i in 0..n {
            u[i] = s.u[i] + dt * s.v[i] + dt * dt * (0.5 - beta) * s.a[i];
            v[i] = s.v[i] + dt * (1.0 - gamma) * s.a[i];
        }
        let mut a = f_next.to_vec();
        subtract_mul(&mut a, &self.sys.damping, &v);
        subtract_mul(&mut a, &self.sys.stiffness, &u);
        self.effective.solve_in_place(&mut a);
        for i in 0..n {
            u[i] += beta * dt * dt * a[i];
            v[i] += gamma * dt * a[i];
        }
        DynamicState { u, v, a, t: s.t + dt }
    }
}

/// One Newmark step; factors the effective matrix on every call.
pub fn newmark_step(sys: &MdofSystem, state: &DynamicState, f_next: &[f64], cfg: IntegratorConfig) -> Result<DynamicState> {
    if f_next.len() != sys.dim() {
        return Err(BeamError::Dimension {
            expected: sys.dim(),
            got: f_next.len(),
        });
    }
    Ok(Newmark::new(sys, cfg)?.step(state, f_next))
}

fn checked_force(force: &mut impl FnMut(f64) -> Vec<f64>, n: usize, t: f64) -> Result<Vec<f64>> {
    let f = force(t);
    if f.len() != n {
        return Err(BeamError::Dimension { expected: n, got: f.len() });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(BeamError::NonFiniteForce { t });
    }
    Ok(f)
}

/// Rejects integration of a free-floating system that has nothing to
/// dissipate rigid-body drift.
pub(crate) fn check_integrable(sys: &MdofSystem) -> Result<()> {
    if sys.rank_deficient && sys.damping.is_zero() {
        return Err(BeamError::RankDeficient(
            "supports leave a rigid-body mode and no damping is present".into(),
        ));
    }
    Ok(())
}

/// Integrates from (u0, v0) over `tgrid`, recording every `stride`-th sample
/// plus the final one. Beam systems record the full node vector with
/// constrained nodes at zero.
pub fn integrate(
    sys: &MdofSystem,
    mut force: impl FnMut(f64) -> Vec<f64>,
    u0: Vec<f64>,
    v0: Vec<f64>,
    tgrid: &TimeGrid,
    cfg: IntegratorConfig,
    stride: usize,
) -> Result<TimeSeriesResult> {
    tgrid.validate()?;
    cfg.validate()?;
    if (cfg.dt - tgrid.dt).abs() > 1e-12 * tgrid.dt {
        return Err(BeamError::InvalidParameter {
            field: "integrator.dt",
            value: cfg.dt,
            constraint: "must equal time.dt",
        });
    }
    if stride == 0 {
        return Err(BeamError::InvalidParameter {
            field: "output.stride",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    check_integrable(sys)?;
    let n = sys.dim();
    let stepper = Newmark::new(sys, cfg)?;

    let meta = SeriesMeta {
        solver: "newmark".into(),
        grid: match &sys.layout {
            DofLayout::Beam { grid, .. } => Some(*grid),
            DofLayout::Labels(_) => None,
        },
        columns: match &sys.layout {
            DofLayout::Beam { grid, .. } => crate::statics::node_columns(grid),
            DofLayout::Labels(l) => l.clone(),
        },
        ..SeriesMeta::default()
    };
    let mut out = TimeSeriesResult::new(meta);

    let f0 = checked_force(&mut force, n, tgrid.time(0))?;
    let mut state = DynamicState::initial(sys, u0, v0, &f0, tgrid.time(0))?;
    out.push(state.t, expand(sys, &state.u));
    let steps = tgrid.steps();
    for i in 1..=steps {
        let t = tgrid.time(i);
        let f = checked_force(&mut force, n, t)?;
        state = stepper.step(&state, &f);
        state.t = t;
        if i % stride == 0 || i == steps {
            out.push(t, expand(sys, &state.u));
        }
    }
    Ok(out)
}

/// DOF vector to recorded frame.
pub(crate) fn expand(sys: &MdofSystem, u: &[f64]) -> Vec<f64> {
    match &sys.layout {
        DofLayout::Labels(_) => u.to_vec(),
        DofLayout::Beam { grid, nodes } => {
            let mut full = vec![0.0; grid.nodes()];
            full[nodes.clone()].copy_from_slice(u);
            full
        }
    }
}

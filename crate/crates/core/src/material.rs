//! Ramberg-Osgood hardening law and the secant-modulus cantilever model.

use serde::{Deserialize, Serialize};

use crate::beam::{BeamSpec, SpatialGrid};
use crate::error::{non_negative, positive, within, BeamError, Result};
use crate::statics::{cantilever_point_deflection, StaticProfile};

pub const DEFAULT_ALPHA: f64 = 5e6;
pub const DEFAULT_EXPONENT: f64 = 3.0;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50;

/// σ = E·ε + α·E·εⁿ, extended as an odd function to compression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RambergOsgood {
    #[serde(rename = "E")]
    pub e: f64,
    pub alpha: f64,
    pub n: f64,
}

impl RambergOsgood {
    pub fn new(e: f64, alpha: f64, n: f64) -> Result<Self> {
        let m = Self { e, alpha, n };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        positive("material.E", self.e)?;
        non_negative("material.alpha", self.alpha)?;
        if !(self.n.is_finite() && self.n > 1.0) {
            return Err(BeamError::InvalidParameter {
                field: "material.n",
                value: self.n,
                constraint: "must be finite and > 1",
            });
        }
        Ok(())
    }

    pub fn stress(&self, eps: f64) -> f64 {
        let s = eps.abs();
        (self.e * s + self.alpha * self.e * s.powf(self.n)).copysign(eps)
    }

    /// dσ/dε = E + α·E·n·|ε|ⁿ⁻¹.
    pub fn tangent_modulus(&self, eps: f64) -> f64 {
        self.e + self.alpha * self.e * self.n * eps.abs().powf(self.n - 1.0)
    }

    /// Strain producing stress σ, by bisection on the monotone law.
    pub fn strain_for_stress(&self, sigma: f64) -> f64 {
        let target = sigma.abs();
        if target == 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0_f64, target / self.e);
        while self.stress(hi) < target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.stress(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).copysign(sigma)
    }

    /// Total strain under stress σ in deformation form: the hardening term
    /// acts on the elastic strain σ/E, giving ε = (σ/E)·(1 + α·|σ/E|ⁿ⁻¹).
    pub fn compliance_strain(&self, sigma: f64) -> f64 {
        self.stress(sigma / self.e) / self.e
    }
}

impl Default for RambergOsgood {
    fn default() -> Self {
        Self {
            e: 25e9,
            alpha: DEFAULT_ALPHA,
            n: DEFAULT_EXPONENT,
        }
    }
}

/// Converged secant-modulus deflection.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearDeflection {
    pub profile: StaticProfile,
    pub iterations: usize,
    pub residual: f64,
    /// Secant modulus at each grid node (Pa).
    pub secant_modulus: Vec<f64>,
}

/// Tip-loaded cantilever (clamped at x = 0, point load P at `a`) with a
/// per-node secant modulus. Each sweep sets the extreme-fiber stress from
/// the statically determinate moment, takes the strain from the
/// compliance-form law and updates E_eff = σ/ε until the largest relative
/// change is below `tol`. Deflection follows from exact double integration
/// of the piecewise-linear curvature M/(E_eff·I).
pub fn nonlinear_cantilever_deflection(
    p: f64,
    a: f64,
    beam: &BeamSpec,
    mat: &RambergOsgood,
    tol: f64,
    max_iter: usize,
    nodes: usize,
) -> Result<NonlinearDeflection> {
    mat.validate()?;
    non_negative("load.p", p)?;
    positive("load.a", a)?;
    within("load.a", a, 0.0, beam.length)?;
    positive("material.tol", tol)?;
    if max_iter == 0 {
        return Err(BeamError::InvalidParameter {
            field: "material.max_iter",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    let section = beam.section()?;
    let grid = SpatialGrid::new(beam.length, nodes)?;

    // Integration stations: grid nodes plus the load point.
    let mut xs = grid.positions();
    let load_node = match xs.iter().position(|&x| x >= a) {
        Some(i) if xs[i] == a => i,
        Some(i) => {
            xs.insert(i, a);
            i
        }
        None => unreachable!("a lies within the span"),
    };
    let moment: Vec<f64> = xs.iter().map(|&x| if x < a { p * (a - x) } else { 0.0 }).collect();
    let c = 0.5 * beam.height;
    let stress: Vec<f64> = moment.iter().map(|m| m * c / section.inertia).collect();

    let mut e_eff = vec![mat.e; xs.len()];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        residual = 0.0;
        for (e, &s) in e_eff.iter_mut().zip(&stress) {
            let next = if s == 0.0 { mat.e } else { s / mat.compliance_strain(s) };
            residual = residual.max((next - *e).abs() / e.abs());
            *e = next;
        }
        if residual < tol {
            break;
        }
    }
    if residual >= tol {
        return Err(BeamError::IterationLimit { iterations, residual });
    }

    let curvature: Vec<f64> = moment.iter().zip(&e_eff).map(|(m, e)| m / (e * section.inertia)).collect();
    let mut w = vec![0.0; xs.len()];
    let mut slope = 0.0;
    for j in 0..xs.len() - 1 {
        let h = xs[j + 1] - xs[j];
        w[j + 1] = w[j] + slope * h + h * h * (2.0 * curvature[j] + curvature[j + 1]) / 6.0;
        slope += 0.5 * h * (curvature[j] + curvature[j + 1]);
    }
    let (deflection, secant_modulus) = if xs.len() != grid.nodes() {
        let keep = |v: &Vec<f64>| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != load_node)
                .map(|(_, x)| *x)
                .collect::<Vec<f64>>()
        };
        (keep(&w), keep(&e_eff))
    } else {
        (w, e_eff)
    };
    Ok(NonlinearDeflection {
        profile: StaticProfile { grid, deflection },
        iterations,
        residual,
        secant_modulus,
    })
}

/// Tip deflections of the linear and nonlinear models at one load level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub w_lin: f64,
    pub w_nl: f64,
}

pub fn linear_vs_nonlinear_curve(
    p_values: &[f64],
    a: f64,
    beam: &BeamSpec,
    mat: &RambergOsgood,
    tol: f64,
    max_iter: usize,
    nodes: usize,
) -> Result<Vec<CurvePoint>> {
    if p_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(BeamError::InvalidParameter {
            field: "load_sweep",
            value: f64::NAN,
            constraint: "must be ascending",
        });
    }
    p_values
        .iter()
        .map(|&p| {
            let nl = nonlinear_cantilever_deflection(p, a, beam, mat, tol, max_iter, nodes)?;
            Ok(CurvePoint {
                p,
                w_lin: cantilever_point_deflection(beam.length, p, a, beam)?,
                w_nl: *nl.profile.deflection.last().expect("grid has nodes"),
            })
        })
        .collect()
}

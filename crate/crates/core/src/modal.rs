//! Natural frequencies and mode shapes from the boundary-value problem
//! φ'''' = β⁴φ with general solution
//! `φ(x) = c1 sin βx + c2 cos βx + c3 sinh βx + c4 cosh βx`.
//!
//! Each end contributes two boundary rows; β is a natural wavenumber when
//! the resulting 4×4 system is singular. Frequencies follow from
//! ω = β²·√(EI/ρA).
//!
//! For large βL the hyperbolic columns grow like e^{βL} and swamp the
//! trigonometric ones. The root scan and mode-shape extraction therefore
//! work in the equivalent basis `{sin βx, cos βx, e^{-βx}, e^{-β(L-x)}}`,
//! whose determinant differs from the hyperbolic one by the non-vanishing
//! factor -2e^{-βL}: the roots are identical.

use std::f64::consts::PI;

use nalgebra::{Matrix4, RowVector4, Vector4};

use crate::beam::{BeamSpec, BoundarySpec, EndCondition, SpatialGrid};
use crate::error::{positive, BeamError, Result};
use crate::statics::StaticProfile;

/// Default root-scan step, as a multiple of 1/L.
pub const DEFAULT_SCAN_STEP: f64 = 0.05;
/// Lower scan limit β_min·L; excludes rigid-body zero roots.
pub const BETA_MIN_TIMES_L: f64 = 0.1;
/// Bisection stops once the bracket width times L drops below this.
pub const ROOT_TOLERANCE: f64 = 1e-10;
/// Largest |det| accepted at a refined root of the row-normalized system.
pub const ROOT_RESIDUAL: f64 = 1e-6;

/// Temporal factor q(t) = c5·sin ωt + c6·cos ωt of a separated solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalFactor {
    pub c5: f64,
    pub c6: f64,
}

impl TemporalFactor {
    /// Factor matching q(0) = q0 and q'(0) = qdot0.
    pub fn from_initial(q0: f64, qdot0: f64, omega: f64) -> Self {
        Self {
            c5: qdot0 / omega,
            c6: q0,
        }
    }

    pub fn eval(&self, omega: f64, t: f64) -> f64 {
        self.c5 * (omega * t).sin() + self.c6 * (omega * t).cos()
    }
}

impl Default for TemporalFactor {
    fn default() -> Self {
        Self { c5: 0.0, c6: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalFrequency {
    pub beta: f64,
    pub omega: f64,
    pub f_hz: f64,
}

/// One vibration mode: wavenumber, frequency, coefficients and sampled shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub beta: f64,
    pub omega: f64,
    pub f_hz: f64,
    /// c1..c4 of the sin/cos/sinh/cosh expansion, scaled with the shape.
    pub coefficients: [f64; 4],
    pub bc: BoundarySpec,
    /// φ on the grid, normalized to max |φ| = 1 with a positive extremum.
    pub shape: StaticProfile,
    pub temporal: TemporalFactor,
}

#[derive(Clone, Copy)]
enum Basis {
    Hyperbolic,
    Exponential,
}

/// Row of the k-th derivative of the four basis functions at x.
fn basis_row(basis: Basis, beta: f64, length: f64, x: f64, k: u8) -> RowVector4<f64> {
    let (s, c) = (beta * x).sin_cos();
    let b = beta.powi(k as i32);
    match basis {
        Basis::Hyperbolic => {
            let (sh, ch) = ((beta * x).sinh(), (beta * x).cosh());
            let r = match k {
                0 => [s, c, sh, ch],
                1 => [c, -s, ch, sh],
                2 => [-s, -c, sh, ch],
                _ => [-c, s, ch, sh],
            };
            RowVector4::from_row_slice(&r) * b
        }
        Basis::Exponential => {
            let e1 = (-beta * x).exp();
            let e2 = (-beta * (length - x)).exp();
            let r = match k {
                0 => [s, c, e1, e2],
                1 => [c, -s, -e1, e2],
                2 => [-s, -c, e1, e2],
                _ => [-c, s, -e1, e2],
            };
            RowVector4::from_row_slice(&r) * b
        }
    }
}

fn end_rows(basis: Basis, beta: f64, ei: f64, length: f64, end: EndCondition, at_right: bool) -> [RowVector4<f64>; 2] {
    let x = if at_right { length } else { 0.0 };
    let row = |k| basis_row(basis, beta, length, x, k);
    match end {
        EndCondition::Pinned => [row(0), row(2)],
        EndCondition::Clamped => [row(0), row(1)],
        EndCondition::Free => [row(2), row(3)],
        EndCondition::Spring(k) => {
            // Shear balances the bearing force with the outward-normal sign:
            // EI·φ''' + kφ = 0 at x = 0, EI·φ''' - kφ = 0 at x = L.
            let sign = if at_right { -1.0 } else { 1.0 };
            [row(2), row(3) * ei + row(0) * (sign * k)]
        }
    }
}

fn boundary_matrix(basis: Basis, beta: f64, beam: &BeamSpec, bc: &BoundarySpec) -> Result<Matrix4<f64>> {
    let ei = beam.section()?.flexural_rigidity;
    let l = beam.length;
    let [r0, r1] = end_rows(basis, beta, ei, l, bc.left, false);
    let [r2, r3] = end_rows(basis, beta, ei, l, bc.right, true);
    Ok(Matrix4::from_rows(&[r0, r1, r2, r3]))
}

fn normalize_rows(mut m: Matrix4<f64>) -> Matrix4<f64> {
    for mut row in m.row_iter_mut() {
        let s = row.amax();
        if s > 0.0 {
            row /= s;
        }
    }
    m
}

/// Boundary rows applied to the sin/cos/sinh/cosh expansion.
pub fn characteristic_matrix(beta: f64, beam: &BeamSpec, bc: &BoundarySpec) -> Result<Matrix4<f64>> {
    positive("beta", beta)?;
    bc.validate()?;
    boundary_matrix(Basis::Hyperbolic, beta, beam, bc)
}

/// Determinant of [`characteristic_matrix`] with each row scaled to unit
/// max magnitude.
pub fn characteristic_det(beta: f64, beam: &BeamSpec, bc: &BoundarySpec) -> Result<f64> {
    Ok(normalize_rows(characteristic_matrix(beta, beam, bc)?).determinant())
}

/// Row-normalized determinant in the exponential basis. Same roots as
/// [`characteristic_det`] (opposite sign), well conditioned for any βL.
pub fn conditioned_det(beta: f64, beam: &BeamSpec, bc: &BoundarySpec) -> Result<f64> {
    positive("beta", beta)?;
    bc.validate()?;
    Ok(normalize_rows(boundary_matrix(Basis::Exponential, beta, beam, bc)?).determinant())
}

/// Number of sign changes of the conditioned determinant on a uniform
/// β scan over `[lo, hi]`.
pub fn count_sign_changes(beam: &BeamSpec, bc: &BoundarySpec, lo: f64, hi: f64, step: f64) -> Result<usize> {
    positive("scan_step", step)?;
    let mut count = 0;
    let mut prev = conditioned_det(lo, beam, bc)?;
    let mut i = 1;
    loop {
        let beta = (lo + i as f64 * step).min(hi);
        let g = conditioned_det(beta, beam, bc)?;
        if prev * g < 0.0 || (g == 0.0 && prev != 0.0) {
            count += 1;
        }
        prev = g;
        if beta >= hi {
            return Ok(count);
        }
        i += 1;
    }
}

/// First `n_roots` natural wavenumbers β (1/m), ascending.
///
/// Scans upward from β_min = 0.1/L in steps of `scan_step` (1/m), brackets
/// sign changes and bisects each bracket to |Δβ|·L < 1e-10.
pub fn find_beta_roots(beam: &BeamSpec, bc: &BoundarySpec, n_roots: usize, scan_step: f64) -> Result<Vec<f64>> {
    if n_roots == 0 {
        return Err(BeamError::InvalidParameter {
            field: "n_roots",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    positive("scan_step", scan_step)?;
    bc.validate()?;
    let l = beam.length;
    let limit = 4.0 * PI * n_roots as f64 + 10.0;
    let beta_max = limit / l;
    let g = |beta: f64| conditioned_det(beta, beam, bc);

    let mut roots = Vec::with_capacity(n_roots);
    let mut lo = BETA_MIN_TIMES_L / l;
    let mut g_lo = g(lo)?;
    let mut i = 1;
    while roots.len() < n_roots {
        let hi = BETA_MIN_TIMES_L / l + i as f64 * scan_step;
        if hi > beta_max {
            break;
        }
        let g_hi = g(hi)?;
        if g_lo == 0.0 {
            roots.push(lo);
        } else if g_lo * g_hi < 0.0 {
            let root = bisect(&g, lo, hi, g_lo, ROOT_TOLERANCE / l)?;
            if g(root)?.abs() < ROOT_RESIDUAL {
                roots.push(root);
            }
        }
        lo = hi;
        g_lo = g_hi;
        i += 1;
    }
    if roots.len() < n_roots {
        return Err(BeamError::InsufficientRoots {
            found: roots.len(),
            requested: n_roots,
            limit,
        });
    }
    Ok(roots)
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut g_lo: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ω = β²·√(EI/ρA) and f = ω/2π for each wavenumber.
pub fn natural_frequencies(betas: &[f64], beam: &BeamSpec) -> Result<Vec<NaturalFrequency>> {
    let a = beam.section()?.wave_coefficient;
    betas
        .iter()
        .map(|&beta| {
            positive("beta", beta)?;
            let omega = beta * beta * a;
            Ok(NaturalFrequency {
                beta,
                omega,
                f_hz: omega / (2.0 * PI),
            })
        })
        .collect()
}

/// Mode at a verified root β, sampled on `grid`.
pub fn solve_mode(beta: f64, beam: &BeamSpec, bc: &BoundarySpec, grid: &SpatialGrid) -> Result<ModeSolution> {
    positive("beta", beta)?;
    bc.validate()?;
    let l = beam.length;
    let a = normalize_rows(boundary_matrix(Basis::Exponential, beta, beam, bc)?);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let largest = svd.singular_values[order[3]];
    let gap = svd.singular_values[order[1]] / largest;
    if gap < 1e-8 {
        return Err(BeamError::DegenerateMode { beta, gap });
    }
    let d: Vector4<f64> = v_t.row(order[0]).transpose();

    let values: Vec<f64> = grid
        .positions()
        .iter()
        .map(|&x| (basis_row(Basis::Exponential, beta, l, x, 0) * d)[0])
        .collect();
    let peak = values
        .iter()
        .fold(0.0f64, |acc, &v| if v.abs() > acc.abs() { v } else { acc });
    if peak == 0.0 || !peak.is_finite() {
        return Err(BeamError::DegenerateMode { beta, gap });
    }
    let d = d / peak;
    let decay = (-beta * l).exp();
    let coefficients = [d[0], d[1], -d[2] + d[3] * decay, d[2] + d[3] * decay];
    let nf = natural_frequencies(&[beta], beam)?[0];
    Ok(ModeSolution {
        beta,
        omega: nf.omega,
        f_hz: nf.f_hz,
        coefficients,
        bc: *bc,
        shape: StaticProfile {
            grid: *grid,
            deflection: values.iter().map(|v| v / peak).collect(),
        },
        temporal: TemporalFactor::default(),
    })
}

/// Sampled mode shape φ at a verified root β.
pub fn mode_shape(beta: f64, beam: &BeamSpec, bc: &BoundarySpec, grid: &SpatialGrid) -> Result<StaticProfile> {
    Ok(solve_mode(beta, beam, bc, grid)?.shape)
}

/// First `count` modes with the default scan step.
pub fn modes(beam: &BeamSpec, bc: &BoundarySpec, count: usize, grid: &SpatialGrid) -> Result<Vec<ModeSolution>> {
    find_beta_roots(beam, bc, count, DEFAULT_SCAN_STEP / beam.length)?
        .into_iter()
        .map(|beta| solve_mode(beta, beam, bc, grid))
        .collect()
}

/// Residual of the four boundary rows for the mode's coefficients, relative
/// to the coefficient magnitude.
pub fn boundary_residual(mode: &ModeSolution, beam: &BeamSpec) -> Result<f64> {
    let a = normalize_rows(characteristic_matrix(mode.beta, beam, &mode.bc)?);
    let c = Vector4::from_row_slice(&mode.coefficients);
    Ok((a * c).amax() / c.amax())
}

/// Evaluates φ at arbitrary x from the stored coefficients.
pub fn eval_shape(mode: &ModeSolution, x: f64) -> f64 {
    let b = mode.beta;
    let [c1, c2, c3, c4] = mode.coefficients;
    c1 * (b * x).sin() + c2 * (b * x).cos() + c3 * (b * x).sinh() + c4 * (b * x).cosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::EndCondition::*;
    use approx::assert_relative_eq;

    fn beam() -> BeamSpec {
        BeamSpec::new(10.0, 0.2, 0.4, 25e9, 2500.0).unwrap()
    }

    /// Independent oracle: bisection on a closed-form characteristic function.
    fn oracle_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        0.5 * (lo + hi)
    }

    fn roots_times_l(bc: BoundarySpec, n: usize) -> Vec<f64> {
        let b = beam();
        find_beta_roots(&b, &bc, n, DEFAULT_SCAN_STEP / b.length)
            .unwrap()
            .iter()
            .map(|r| r * b.length)
            .collect()
    }

    #[test]
    fn pinned_pinned_determinant_vanishes_at_pi() {
        let b = beam();
        let bc = BoundarySpec::pinned_pinned();
        assert!(characteristic_det(PI / 10.0, &b, &bc).unwrap().abs() < 1e-12);
        assert!(characteristic_det(PI / 20.0, &b, &bc).unwrap().abs() > 1e-3);
        let lo = characteristic_det(0.30, &b, &bc).unwrap();
        let hi = characteristic_det(0.33, &b, &bc).unwrap();
        assert!(lo * hi < 0.0);
        // Exponential basis flips the sign but keeps the root.
        let clo = conditioned_det(0.30, &b, &bc).unwrap();
        assert!(clo * lo < 0.0);
    }

    #[test]
    fn pinned_pinned_roots_are_multiples_of_pi() {
        for (n, r) in roots_times_l(BoundarySpec::pinned_pinned(), 3).iter().enumerate() {
            assert!((r - (n + 1) as f64 * PI).abs() < 1e-8, "{r}");
        }
    }

    #[test]
    fn clamped_free_roots_match_oracle() {
        let f = |z: f64| z.cos() * z.cosh() + 1.0;
        let expect = [oracle_root(f, 1.5, 2.5), oracle_root(f, 4.0, 5.0)];
        let got = roots_times_l(BoundarySpec::clamped_free(), 2);
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-8, "{g} vs {e}");
        }
        assert!((expect[0] - 1.875104).abs() < 1e-6);
        assert!((expect[1] - 4.694091).abs() < 1e-6);
    }

    #[test]
    fn free_free_roots_match_oracle() {
        let f = |z: f64| z.cos() * z.cosh() - 1.0;
        let expect = [oracle_root(f, 4.5, 5.0), oracle_root(f, 7.5, 8.0)];
        let got = roots_times_l(BoundarySpec::free_free(), 2);
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-8, "{g} vs {e}");
        }
        assert!((expect[0] - 4.730041).abs() < 1e-6);
        assert!((expect[1] - 7.853205).abs() < 1e-6);
    }

    #[test]
    fn high_modes_stay_accurate() {
        let got = roots_times_l(BoundarySpec::pinned_pinned(), 12);
        assert!((got[11] - 12.0 * PI).abs() < 1e-8, "{}", got[11]);
        let f = |z: f64| z.cos() * z.cosh() + 1.0;
        let cf = roots_times_l(BoundarySpec::clamped_free(), 10);
        let e = oracle_root(f, 9.5 * PI - 0.5, 9.5 * PI + 0.5);
        assert!((cf[9] - e).abs() < 1e-8);
    }

    #[test]
    fn stiff_springs_approach_pinned_soft_springs_approach_free() {
        let stiff = roots_times_l(BoundarySpec::spring_spring(1e12), 1)[0];
        assert!((stiff - PI).abs() / PI < 1e-4, "{stiff}");
        let soft = roots_times_l(BoundarySpec::spring_spring(1e-3), 1)[0];
        assert!((soft - 4.730040744862704).abs() / 4.73 < 1e-4, "{soft}");

        let firsts: Vec<f64> = [1e0, 1e3, 1e6, 1e9, 1e12]
            .iter()
            .map(|&k| roots_times_l(BoundarySpec::spring_spring(k), 1)[0])
            .collect();
        for w in firsts.windows(2) {
            assert!(w[1] >= w[0], "{firsts:?}");
        }
    }

    #[test]
    fn spring_translation_mode_matches_rigid_body_estimate() {
        // Soft bearings under a stiff beam: the first mode is a rigid bounce
        // with ω² = 2k/(ρAL).
        let b = beam();
        let k = 1000.0;
        let beta = find_beta_roots(&b, &BoundarySpec::spring_spring(k), 1, 0.005).unwrap()[0];
        let omega = natural_frequencies(&[beta], &b).unwrap()[0].omega;
        let rigid = (2.0 * k / (200.0 * 10.0)).sqrt();
        assert_relative_eq!(omega, rigid, max_relative = 1e-3);
    }

    #[test]
    fn sign_change_count_equals_roots() {
        let b = beam();
        let bc = BoundarySpec::clamped_free();
        let roots = find_beta_roots(&b, &bc, 4, 0.005).unwrap();
        let hi = roots[3] + 0.5 * PI / b.length;
        let n = count_sign_changes(&b, &bc, BETA_MIN_TIMES_L / b.length, hi, 0.005).unwrap();
        assert_eq!(n, 4);
        assert!(roots.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn insufficient_roots_is_reported() {
        let b = beam();
        let err = find_beta_roots(&b, &BoundarySpec::pinned_pinned(), 2, 100.0).unwrap_err();
        assert!(matches!(err, BeamError::InsufficientRoots { requested: 2, .. }));
    }

    #[test]
    fn frequency_of_reference_beam() {
        let b = beam();
        let nf = natural_frequencies(&[PI / 10.0], &b).unwrap()[0];
        assert_relative_eq!(nf.omega, 36.038_699_76, max_relative = 1e-9);
        assert!((nf.f_hz - 5.7358).abs() < 1e-3);
        let doubled = natural_frequencies(&[PI / 5.0], &b).unwrap()[0];
        assert_relative_eq!(doubled.omega, 4.0 * nf.omega, max_relative = 1e-14);
        let roots = find_beta_roots(&b, &BoundarySpec::pinned_pinned(), 3, DEFAULT_SCAN_STEP / 10.0).unwrap();
        let f = natural_frequencies(&roots, &b).unwrap();
        assert_relative_eq!(f[1].f_hz / f[0].f_hz, 4.0, max_relative = 1e-8);
        assert_relative_eq!(f[2].f_hz / f[0].f_hz, 9.0, max_relative = 1e-8);
    }

    #[test]
    fn first_pinned_mode_is_a_half_sine() {
        let b = beam();
        let grid = SpatialGrid::new(10.0, 201).unwrap();
        let m = solve_mode(PI / 10.0, &b, &BoundarySpec::pinned_pinned(), &grid).unwrap();
        for (x, phi) in grid.positions().iter().zip(&m.shape.deflection) {
            assert!((phi - (PI * x / 10.0).sin()).abs() < 1e-6);
        }
        assert!(boundary_residual(&m, &b).unwrap() < 1e-6);
        assert!((eval_shape(&m, 5.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn second_pinned_mode_has_one_node() {
        let b = beam();
        let grid = SpatialGrid::new(10.0, 201).unwrap();
        let all = modes(&b, &BoundarySpec::pinned_pinned(), 2, &grid).unwrap();
        let phi = &all[1].shape.deflection;
        let signs: Vec<f64> = phi[1..200].iter().filter(|v| v.abs() > 1e-9).map(|v| v.signum()).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn modes_satisfy_boundary_rows() {
        let b = beam();
        let grid = SpatialGrid::new(10.0, 101).unwrap();
        for bc in [
            BoundarySpec::pinned_pinned(),
            BoundarySpec::clamped_free(),
            BoundarySpec::free_free(),
            BoundarySpec::new(Clamped, Clamped),
            BoundarySpec::new(Spring(1e6), Pinned),
        ] {
            for m in modes(&b, &bc, 3, &grid).unwrap() {
                assert!(boundary_residual(&m, &b).unwrap() < 1e-6, "{bc:?}");
                if matches!(bc.left, Pinned | Clamped) {
                    assert!(m.shape.deflection[0].abs() < 1e-9);
                }
                let peak = m.shape.max_abs();
                assert!((peak - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modes_satisfy_the_field_equation() {
        // ω²·ρA·φ = EI·φ'''' in the interior, φ'''' by finite differences.
        let b = beam();
        let s = b.section().unwrap();
        let grid = SpatialGrid::new(10.0, 401).unwrap();
        let dx = grid.spacing();
        for bc in [BoundarySpec::pinned_pinned(), BoundarySpec::clamped_free(), BoundarySpec::spring_spring(1e5)] {
            for m in modes(&b, &bc, 3, &grid).unwrap() {
                let phi = &m.shape.deflection;
                let lhs_scale = m.omega.powi(2) * s.mass_per_length;
                let mut worst: f64 = 0.0;
                for i in 2..399 {
                    let d4 = (phi[i - 2] - 4.0 * phi[i - 1] + 6.0 * phi[i] - 4.0 * phi[i + 1] + phi[i + 2]) / dx.powi(4);
                    worst = worst.max((lhs_scale * phi[i] - s.flexural_rigidity * d4).abs());
                }
                assert!(worst / lhs_scale < 1e-3, "{bc:?} beta={} residual {}", m.beta, worst / lhs_scale);
            }
        }
    }

    #[test]
    fn temporal_factor_matches_initial_conditions() {
        let q = TemporalFactor::from_initial(0.3, 2.0, 4.0);
        assert_relative_eq!(q.eval(4.0, 0.0), 0.3);
        let h = 1e-7;
        assert_relative_eq!((q.eval(4.0, h) - q.eval(4.0, -h)) / (2.0 * h), 2.0, max_relative = 1e-6);
    }
}

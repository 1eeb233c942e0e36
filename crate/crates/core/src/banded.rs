//! Symmetric banded storage and Cholesky factorization.
//!
//! Beam operators from the fourth-difference stencil have half-bandwidth 2,
//! so factorization and solves are O(n) instead of O(n³).

use nalgebra::DMatrix;

use crate::error::{BeamError, Result};

/// Symmetric matrix storing the lower band `j ∈ [i - bw, i]` of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), 0);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            None
        } else {
            Some(r * (self.bw + 1) + (r - c))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] += v;
    }

    /// `a·self + b·other`, widened to the larger bandwidth.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let bw = self.bw.max(other.bw);
        let mut out = Self::zeros(self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(bw)..=i {
                out.set(i, j, a * self.get(i, j) + b * other.get(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            y[i] += row[0] * x[i];
            for d in 1..=self.bw.min(i) {
                let v = row[d];
                if v != 0.0 {
                    y[i] += v * x[i - d];
                    y[i - d] += v * x[i];
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Principal submatrix over the contiguous index range.
    pub fn submatrix(&self, range: std::ops::Range<usize>) -> Self {
        let offset = range.start;
        let mut out = Self::zeros(range.len(), self.bw);
        for i in range.clone() {
            for j in i.saturating_sub(self.bw).max(offset)..=i {
                out.set(i - offset, j - offset, self.get(i, j));
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Banded Cholesky `A = L·Lᵀ`. A pivot that is not positive relative
    /// to the matrix scale is reported as a factorization error.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let scale = self
            .diagonal()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut l = self.clone();
        for j in 0..n {
            let mut d = l.get(j, j);
            for k in j.saturating_sub(bw)..j {
                let v = l.get(j, k);
                d -= v * v;
            }
            if d.is_nan() || d <= scale * 1e-14 {
                return Err(BeamError::Factorization { pivot: j, value: d });
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in (j + 1)..(j + bw + 1).min(n) {
                let mut s = l.get(i, j);
                for k in i.saturating_sub(bw)..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(BandCholesky { l })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: SymBandMatrix,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.l.n, self.l.bw);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l.get(i, k) * x[k];
            }
            x[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..(i + bw + 1).min(n) {
                s -= self.l.get(k, i) * x[k];
            }
            x[i] = s / self.l.get(i, i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pentadiagonal(n: usize) -> SymBandMatrix {
        let mut m = SymBandMatrix::zeros(n, 2);
        for i in 0..n {
            m.set(i, i, 6.0 + i as f64 * 0.1);
            if i >= 1 {
                m.set(i, i - 1, -4.0);
            }
            if i >= 2 {
                m.set(i, i - 2, 1.0);
            }
        }
        m
    }

    #[test]
    fn symmetric_access() {
        let m = pentadiagonal(6);
        assert_eq!(m.get(1, 3), m.get(3, 1));
        assert_eq!(m.get(0, 4), 0.0);
        let d = m.to_dense();
        assert_eq!(d, d.transpose());
    }

    #[test]
    fn matvec_matches_dense() {
        let m = pentadiagonal(9);
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let y = m.mul_vec(&x);
        let yd = m.to_dense() * nalgebra::DVector::from_vec(x);
        for (a, b) in y.iter().zip(yd.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut m = SymBandMatrix::zeros(3, 1);
        for i in 0..3 {
            m.set(i, i, 1.0);
        }
        m.set(1, 0, 1.0);
        assert!(matches!(m.cholesky(), Err(BeamError::Factorization { pivot: 1, .. })));
    }

    #[test]
    fn submatrix_drops_ends() {
        let m = pentadiagonal(7);
        let s = m.submatrix(1..6);
        assert_eq!(s.dim(), 5);
        assert_eq!(s.get(0, 0), m.get(1, 1));
        assert_eq!(s.get(4, 2), m.get(5, 3));
    }

    proptest! {
        #[test]
        fn solve_recovers_rhs(n in 3usize..40, seed in 0u64..1000) {
            let m = pentadiagonal(n);
            let x: Vec<f64> = (0..n).map(|i| ((i as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
            let b = m.mul_vec(&x);
            let got = m.cholesky().unwrap().solve(&b);
            for (g, e) in got.iter().zip(&x) {
                prop_assert!((g - e).abs() < 1e-9 * (1.0 + e.abs()));
            }
        }
    }
}

//! Symmetric banded matrices with nonnegative off-diagonal entries.
//!
//! Both the nonlocal operator on a 1D grid and the finite-difference
//! Laplacian are banded in the natural point ordering, so one storage scheme
//! and one Cholesky factorization serve the spectral and stationary solvers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix: entry `(i, j)` with `i - bw <= j <= i`
/// lives at `band[i * (bw + 1) + (i - j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        BandedSym {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw).then(|| i * (self.bw + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.band[k])
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)` (once on the diagonal).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j).expect("entry inside the band");
        self.band[k] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.band[i * (self.bw + 1)]).collect()
    }

    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.n {
            self.band[i * (self.bw + 1)] += s;
        }
    }

    pub fn add_to_diagonal(&mut self, d: &[f64]) {
        for (i, v) in d.iter().enumerate() {
            self.band[i * (self.bw + 1)] += v;
        }
    }

    /// `y = (M + shift I) x`. When the shifted matrix is entrywise
    /// nonnegative and `x > 0` every summand is nonnegative, so the result
    /// is accurate componentwise.
    pub fn matvec_shifted(&self, x: &[f64], shift: f64, y: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let row = &self.band[i * w..(i + 1) * w];
            let mut acc = (row[0] + shift) * x[i];
            for k in 1..=self.bw.min(i) {
                acc += row[k] * x[i - k];
            }
            for k in 1..=self.bw.min(self.n - 1 - i) {
                acc += self.band[(i + k) * w + k] * x[i + k];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_shifted(x, 0.0, &mut y);
        y
    }

    pub fn min_offdiagonal(&self) -> f64 {
        let w = self.bw + 1;
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for k in 1..=self.bw.min(i) {
                m = m.min(self.band[i * w + k]);
            }
        }
        m
    }

    /// Whether the off-diagonal pattern connects every index.
    pub fn is_irreducible(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let w = self.bw + 1;
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            for j in lo..=hi {
                if j == i || seen[j] {
                    continue;
                }
                let v = if j < i { self.band[i * w + (i - j)] } else { self.band[j * w + (j - i)] };
                if v != 0.0 {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.n
    }

    /// Upper bound on the spectrum by Gershgorin discs.
    pub fn gershgorin_upper(&self) -> f64 {
        let mut abs_rows = vec![0.0; self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            for k in 1..=self.bw.min(i) {
                let v = self.band[i * w + k].abs();
                abs_rows[i] += v;
                abs_rows[i - k] += v;
            }
        }
        (0..self.n)
            .map(|i| self.band[i * w] + abs_rows[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut bw = 0;
        for i in 0..n {
            for j in 0..i {
                if m[(i, j)] != 0.0 || m[(j, i)] != 0.0 {
                    bw = bw.max(i - j);
                }
            }
        }
        let mut b = BandedSym::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(b.bw)..=i {
                let k = b.slot(i, j).unwrap();
                b.band[k] = m[(i, j)];
            }
        }
        b
    }

    /// Cholesky factor of `sigma I - self`; fails unless that matrix is
    /// numerically positive definite, i.e. unless `sigma` exceeds the
    /// largest eigenvalue.
    pub fn cholesky_of_shift(&self, sigma: f64) -> Result<BandCholesky> {
        let w = self.bw + 1;
        let mut l = vec![0.0; self.band.len()];
        for (dst, src) in l.iter_mut().zip(&self.band) {
            *dst = -src;
        }
        for i in 0..self.n {
            l[i * w] += sigma;
        }
        for j in 0..self.n {
            let lo = j.saturating_sub(self.bw);
            let mut d = l[j * w];
            for k in lo..j {
                let v = l[j * w + (j - k)];
                d -= v * v;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NumericalFailure(format!(
                    "shifted matrix not positive definite at pivot {j}"
                )));
            }
            let djj = d.sqrt();
            l[j * w] = djj;
            for i in j + 1..(j + w).min(self.n) {
                let mut s = l[i * w + (i - j)];
                let lo_i = i.saturating_sub(self.bw).max(lo);
                for k in lo_i..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / djj;
            }
        }
        Ok(BandCholesky {
            n: self.n,
            bw: self.bw,
            l,
        })
    }
}

/// Banded Cholesky factor `L` with `L L^T = sigma I - A`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.l[i * w + (i - k)] * x[k];
            }
            x[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + w).min(self.n) {
                s -= self.l[k * w + (k - i)] * x[k];
            }
            x[i] = s / self.l[i * w];
        }
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

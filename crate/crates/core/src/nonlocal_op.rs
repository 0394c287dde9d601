//! The discrete operator `rate * (J_eps * u - u) + a u` on a grid.
//!
//! On a ball grid the sum runs over grid points only, which is exactly the
//! truncated operator `L_R` (mass leaving the ball is lost). On a torus the
//! sum wraps around and every stencil offset is folded into the box.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, Topology};
use crate::kernel::{DiscreteKernel, ScaledKernel};
use crate::linalg::BandedSym;

pub const DEFAULT_DENSE_LIMIT: usize = 8192;
/// Default kernel tail mass allowed to be cut from unbounded-support kernels.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// Stencil sum over grid points.
    Direct,
    /// Zero-padded (ball) or circular (torus) FFT convolution.
    Fast,
}

/// Kernel stencil bound to a grid, with both application paths.
pub struct Convolver {
    grid: Grid,
    stencil: DiscreteKernel,
    /// Reach actually able to couple two grid points.
    reach: usize,
    fft: OnceLock<FftPlan>,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("points", &self.grid.len())
            .field("reach", &self.reach)
            .finish()
    }
}

impl Clone for Convolver {
    fn clone(&self) -> Self {
        Convolver {
            grid: self.grid.clone(),
            stencil: self.stencil.clone(),
            reach: self.reach,
            fft: OnceLock::new(),
        }
    }
}

struct FftPlan {
    side: usize,
    dims: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex<f64>>,
}

impl Convolver {
    pub fn new(grid: &Grid, kernel: &ScaledKernel, tail_tol: f64) -> Result<Self> {
        if kernel.dimension() != grid.dimension() {
            return Err(Error::DimensionMismatch {
                expected: grid.dimension(),
                actual: kernel.dimension(),
            });
        }
        let max_reach = match grid.topology() {
            Topology::BallTruncated => grid.box_side().saturating_sub(1),
            // Offsets past a few periods only fold onto existing cells; cap
            // storage while keeping their mass in the normalization.
            Topology::Torus => 4 * grid.box_side(),
        };
        let stencil = DiscreteKernel::sample(kernel, grid.spacing(), max_reach, tail_tol)?;
        let reach = stencil.reach();
        Ok(Convolver {
            grid: grid.clone(),
            stencil,
            reach,
            fft: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stencil(&self) -> &DiscreteKernel {
        &self.stencil
    }

    /// Calls `visit(j, weight)` for every coupling of point `i` to point `j`
    /// through the stencil (with repetitions when offsets alias on a torus).
    #[inline]
    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, i: usize, mut visit: F) {
        let g = &self.grid;
        let side = g.box_side() as i64;
        let r = self.reach as i64;
        let p = g.lattice(i);
        let torus = g.topology() == Topology::Torus;
        let two_d = g.dimension() == 2;
        let r1 = if two_d { r } else { 0 };
        for d0 in -r..=r {
            let mut q0 = p[0] - d0;
            if torus {
                q0 = q0.rem_euclid(side);
            } else if q0 < 0 || q0 >= side {
                continue;
            }
            for d1 in -r1..=r1 {
                let mut q1 = p[1] - d1;
                if two_d {
                    if torus {
                        q1 = q1.rem_euclid(side);
                    } else if q1 < 0 || q1 >= side {
                        continue;
                    }
                }
                let w = self.stencil.at([d0, d1]);
                if w == 0.0 {
                    continue;
                }
                if let Some(j) = g.point_at([q0 as usize, q1 as usize]) {
                    visit(j, w);
                }
            }
        }
    }

    /// `sum_j h^N J_eps(x_i - x_j) u_j` (discrete-mass normalized).
    pub fn convolve(&self, u: &[f64], path: Path) -> Result<Vec<f64>> {
        if u.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: u.len(),
            });
        }
        Ok(match path {
            Path::Direct => self.convolve_direct(u),
            Path::Fast => self.convolve_fast(u),
        })
    }

    fn convolve_direct(&self, u: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                self.for_each_neighbor(i, |j, w| acc += w * u[j]);
                acc
            })
            .collect()
    }

    fn plan(&self) -> &FftPlan {
        self.fft.get_or_init(|| {
            let g = &self.grid;
            let dims = g.dimension();
            let side = match g.topology() {
                Topology::Torus => g.box_side(),
                Topology::BallTruncated => fft_size(g.box_side() + self.reach),
            };
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(side);
            let inverse = planner.plan_fft_inverse(side);
            let total = side.pow(dims as u32);
            let mut kernel = vec![Complex::new(0.0, 0.0); total];
            let r = self.reach as i64;
            let r1 = if dims == 2 { r } else { 0 };
            for d0 in -r..=r {
                for d1 in -r1..=r1 {
                    let w = self.stencil.at([d0, d1]);
                    let k0 = d0.rem_euclid(side as i64) as usize;
                    let k1 = d1.rem_euclid(side as i64) as usize;
                    let idx = if dims == 2 { k0 * side + k1 } else { k0 };
                    kernel[idx].re += w;
                }
            }
            let mut plan = FftPlan {
                side,
                dims,
                forward,
                inverse,
                kernel_hat: Vec::new(),
            };
            plan.transform(&mut kernel, false);
            plan.kernel_hat = kernel;
            plan
        })
    }

    fn convolve_fast(&self, u: &[f64]) -> Vec<f64> {
        let plan = self.plan();
        let side = plan.side;
        let mut data = vec![Complex::new(0.0, 0.0); side.pow(plan.dims as u32)];
        let g = &self.grid;
        for (i, &v) in u.iter().enumerate() {
            data[plan.index(g.position(i))].re = v;
        }
        plan.transform(&mut data, false);
        for (d, k) in data.iter_mut().zip(&plan.kernel_hat) {
            *d *= k;
        }
        plan.transform(&mut data, true);
        let scale = 1.0 / data.len() as f64;
        (0..g.len()).map(|i| data[plan.index(g.position(i))].re * scale).collect()
    }

    /// `k(x_i) = sum_j h^N J_eps(x_i - x_j)`, the kernel mass retained in the domain.
    pub fn mass_profile(&self) -> Vec<f64> {
        self.convolve_direct(&vec![1.0; self.grid.len()])
    }
}

impl FftPlan {
    fn index(&self, pos: [usize; 2]) -> usize {
        if self.dims == 2 {
            pos[0] * self.side + pos[1]
        } else {
            pos[0]
        }
    }

    /// Unnormalized forward or inverse transform; 2D leaves the layout unchanged.
    fn transform(&self, data: &mut [Complex<f64>], inverse: bool) {
        let fft = if inverse { &self.inverse } else { &self.forward };
        fft.process(data);
        if self.dims == 2 {
            transpose(data, self.side);
            fft.process(data);
            transpose(data, self.side);
        }
    }
}

fn transpose(data: &mut [Complex<f64>], side: usize) {
    for i in 0..side {
        for j in i + 1..side {
            data.swap(i * side + j, j * side + i);
        }
    }
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn fft_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut k = m;
        for p in [2, 3, 5] {
            while k % p == 0 {
                k /= p;
            }
        }
        if k == 1 {
            return m;
        }
        m += 1;
    }
}

/// `convolve` entry point.
pub fn convolve(conv: &Convolver, u: &[f64], path: Path) -> Result<Vec<f64>> {
    conv.convolve(u, path)
}

/// `rate (J_eps * u - u) + a u` on a grid.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    conv: Arc<Convolver>,
    kernel: ScaledKernel,
    rate: f64,
    a: Vec<f64>,
}

impl DiscreteOperator {
    pub fn new(grid: &Grid, kernel: &ScaledKernel, a: Vec<f64>) -> Result<Self> {
        Self::with_tail_tol(grid, kernel, a, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(grid: &Grid, kernel: &ScaledKernel, a: Vec<f64>, tail_tol: f64) -> Result<Self> {
        if a.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: a.len(),
            });
        }
        let conv = Convolver::new(grid, kernel, tail_tol)?;
        Ok(DiscreteOperator {
            conv: Arc::new(conv),
            kernel: kernel.clone(),
            rate: kernel.rate(),
            a,
        })
    }

    /// Same kernel and grid, different zeroth-order coefficient.
    pub fn with_growth(&self, a: Vec<f64>) -> Result<Self> {
        if a.len() != self.a.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a.len(),
                actual: a.len(),
            });
        }
        Ok(DiscreteOperator {
            conv: Arc::clone(&self.conv),
            kernel: self.kernel.clone(),
            rate: self.rate,
            a,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.conv.grid()
    }
    pub fn convolver(&self) -> &Convolver {
        &self.conv
    }
    pub fn kernel(&self) -> &ScaledKernel {
        &self.kernel
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn growth(&self) -> &[f64] {
        &self.a
    }
    pub fn len(&self) -> usize {
        self.a.len()
    }
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Kernel mass cut from the tail, which bounds the operator perturbation
    /// by `2 rate tail` in every `L^p` norm.
    pub fn truncation_error(&self) -> f64 {
        2.0 * self.rate * self.conv.stencil().truncated_mass()
    }

    pub fn apply(&self, u: &[f64], include_growth: bool, path: Path) -> Result<Vec<f64>> {
        let ju = self.conv.convolve(u, path)?;
        Ok(ju
            .iter()
            .zip(u)
            .zip(&self.a)
            .map(|((j, v), a)| self.rate * (j - v) + if include_growth { a * v } else { 0.0 })
            .collect())
    }

    pub fn mass_profile(&self) -> Vec<f64> {
        self.conv.mass_profile()
    }

    #[cfg(test)]
    /// Coefficient of `u_i` in the diagonal (stencil self-weight plus aliases).
    fn self_weight(&self, i: usize) -> f64 {
        let mut s = 0.0;
        self.conv.for_each_neighbor(i, |j, w| {
            if j == i {
                s += w;
            }
        });
        s
    }

    /// Dense `A` with `A_ij = rate h^N J_eps(x_i - x_j)` off the diagonal and
    /// `A_ii = rate (h^N J_eps(0) - 1) + a_i`.
    pub fn assemble_matrix(&self, dense_limit: usize) -> Result<DMatrix<f64>> {
        let n = self.len();
        if n > dense_limit {
            return Err(Error::ResourceLimit(format!(
                "{n} grid points exceed the dense limit {dense_limit}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            self.conv.for_each_neighbor(i, |j, w| m[(i, j)] += self.rate * w);
            m[(i, i)] += self.a[i] - self.rate;
        }
        Ok(m)
    }

    /// The same matrix in symmetric banded storage.
    pub fn banded(&self) -> BandedSym {
        let n = self.len();
        let mut bw = 0;
        for i in 0..n {
            self.conv.for_each_neighbor(i, |j, _| bw = bw.max(i.abs_diff(j)));
        }
        let mut b = BandedSym::zeros(n, bw);
        for i in 0..n {
            self.conv.for_each_neighbor(i, |j, w| {
                if j <= i {
                    b.add(i, j, self.rate * w);
                }
            });
            b.add(i, i, self.a[i] - self.rate);
        }
        b
    }

    /// `1 + max|a| + rate`, which makes `A + c I` nonnegative with a positive diagonal.
    pub fn perron_shift(&self) -> f64 {
        1.0 + self.a.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + self.rate
    }

    pub fn sup_growth(&self) -> f64 {
        self.a.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `[-sup(a - rate + rate k), rate - sup a]`, the a-priori bracket for
    /// the principal eigenvalue of this operator.
    pub fn eigenvalue_bounds(&self) -> (f64, f64) {
        let k = self.mass_profile();
        let lower = -self
            .a
            .iter()
            .zip(&k)
            .map(|(a, k)| a - self.rate + self.rate * k)
            .fold(f64::NEG_INFINITY, f64::max);
        (lower, self.rate - self.sup_growth())
    }

    /// `(1/2) sum_i sum_j w_i w_j J(x_i - x_j) (u_i - u_j)^2` using the stencil weights.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        let w = self.grid().weight();
        // Row sums in parallel, total in index order so the result does not
        // depend on the thread schedule.
        let rows: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                self.conv.for_each_neighbor(i, |j, s| {
                    let d = u[i] - u[j];
                    acc += s * d * d;
                });
                acc
            })
            .collect();
        0.5 * w * rows.iter().sum::<f64>()
    }
}

/// `apply_operator` entry point with the direct path.
pub fn apply_operator(op: &DiscreteOperator, u: &[f64], include_growth: bool) -> Result<Vec<f64>> {
    op.apply(u, include_growth, Path::Direct)
}

/// `assemble_matrix` entry point with the default dense limit.
pub fn assemble_matrix(op: &DiscreteOperator) -> Result<DMatrix<f64>> {
    op.assemble_matrix(DEFAULT_DENSE_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::kernel::{rescale_kernel, Kernel};

    fn op(grid: &Grid, eps: f64, a: impl Fn(&[f64]) -> f64) -> DiscreteOperator {
        let k = rescale_kernel(&Kernel::tent(grid.dimension()), eps, 0.0, 1.0).unwrap();
        DiscreteOperator::new(grid, &k, grid.sample(a)).unwrap()
    }

    #[test]
    fn fft_sizes_are_smooth() {
        assert_eq!(fft_size(7), 8);
        assert_eq!(fft_size(121), 125);
        assert_eq!(fft_size(1), 1);
    }

    #[test]
    fn constants_on_torus_are_fixed() {
        let g = build_grid(1, 2.0, 0.1, Topology::Torus).unwrap();
        let o = op(&g, 0.7, |_| 0.0);
        let out = o.apply(&vec![3.0; g.len()], false, Path::Direct).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-13));
        let fast = o.apply(&vec![3.0; g.len()], false, Path::Fast).unwrap();
        assert!(fast.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn ball_mass_deficit() {
        let g = build_grid(1, 3.0, 0.1, Topology::BallTruncated).unwrap();
        let o = op(&g, 1.0, |_| 0.0);
        let k = o.mass_profile();
        assert!(k.iter().all(|&v| v <= 1.0 + 1e-14));
        assert!(k[0] < 0.6 && k[g.len() - 1] < 0.6);
        assert!((k[g.len() / 2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_dimensional_fast_path_agrees() {
        let g = build_grid(2, 1.5, 0.1, Topology::BallTruncated).unwrap();
        let o = op(&g, 0.5, |_| 0.0);
        let u: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 4.0).collect();
        let d = o.convolver().convolve(&u, Path::Direct).unwrap();
        let f = o.convolver().convolve(&u, Path::Fast).unwrap();
        let scale = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (x, y) in d.iter().zip(&f) {
            assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn banded_and_dense_agree() {
        let g = build_grid(2, 1.0, 0.2, Topology::BallTruncated).unwrap();
        let o = op(&g, 0.5, |x| 1.0 - x[0]);
        assert_eq!(o.banded().to_dense(), o.assemble_matrix(1000).unwrap());
        assert!(matches!(o.assemble_matrix(3), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn diagonal_includes_self_weight() {
        let g = build_grid(1, 1.0, 0.25, Topology::BallTruncated).unwrap();
        let o = op(&g, 1.0, |_| 0.5);
        let m = o.assemble_matrix(100).unwrap();
        for i in 0..g.len() {
            assert!((m[(i, i)] - (o.self_weight(i) - 1.0 + 0.5)).abs() < 1e-15);
        }
    }
}

//! Second-order finite differences for the local reference problem
//! `sigma Lap v + a v` with homogeneous Dirichlet data on `B_R`.

use crate::error::{ensure_param, Error, Result};
use crate::linalg::BandedSym;
use crate::spectral::{principal_eigenvalue_banded, Method, SpectralEstimate, SpectralOptions};

/// Interior nodes `x = -R + k h` of the lattice lying strictly inside `B_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdGrid {
    dimension: usize,
    radius: f64,
    spacing: f64,
    /// Nodes per axis including the two boundary nodes, minus one.
    cells: usize,
    nodes: Vec<[usize; 2]>,
    index: Vec<usize>,
}

impl FdGrid {
    /// Requires `2R/h` to be an integer so that `+-R` are nodes in 1D.
    pub fn new(dimension: usize, radius: f64, spacing: f64) -> Result<Self> {
        ensure_param(dimension == 1 || dimension == 2, "N", "FD grids support N = 1 or 2")?;
        ensure_param(radius > 0.0 && spacing > 0.0 && spacing < radius, "h", "need 0 < h < R")?;
        let ratio = 2.0 * radius / spacing;
        let cells = ratio.round();
        ensure_param(
            (cells - ratio).abs() <= 1e-9 * ratio,
            "h",
            "2R/h must be an integer for the FD reference grid",
        )?;
        let cells = cells as usize;
        if cells > crate::grid::DEFAULT_MAX_POINTS_PER_AXIS {
            return Err(Error::ResourceLimit(format!("{cells} FD cells per axis")));
        }
        let side2 = if dimension == 2 { cells + 1 } else { 1 };
        let mut grid = FdGrid {
            dimension,
            radius,
            spacing,
            cells,
            nodes: Vec::new(),
            index: vec![usize::MAX; (cells + 1) * side2],
        };
        for k0 in 1..cells {
            let range1 = if dimension == 2 { 1..cells } else { 0..1 };
            for k1 in range1 {
                let pos = [k0, k1];
                let x = grid.coords_of(pos);
                if x[0].hypot(x[1]) < radius * (1.0 - 1e-12) {
                    grid.index[k0 * side2 + k1] = grid.nodes.len();
                    grid.nodes.push(pos);
                }
            }
        }
        Ok(grid)
    }

    fn coords_of(&self, pos: [usize; 2]) -> [f64; 2] {
        let c = |k: usize| -self.radius + k as f64 * self.spacing;
        if self.dimension == 2 {
            [c(pos[0]), c(pos[1])]
        } else {
            [c(pos[0]), 0.0]
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn coords(&self, i: usize) -> [f64; 2] {
        self.coords_of(self.nodes[i])
    }

    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len())
            .map(|i| f(&self.coords(i)[..self.dimension]))
            .collect()
    }

    pub fn weight(&self) -> f64 {
        self.spacing.powi(self.dimension as i32)
    }

    fn node(&self, k0: i64, k1: i64) -> Option<usize> {
        let side2 = if self.dimension == 2 { self.cells + 1 } else { 1 };
        if k0 < 0 || k0 > self.cells as i64 || k1 < 0 || k1 >= side2 as i64 {
            return None;
        }
        match self.index[k0 as usize * side2 + k1 as usize] {
            usize::MAX => None,
            i => Some(i),
        }
    }

    /// Piecewise-linear interpolation of nodal values (zero on and beyond the
    /// boundary) at a point in 1D, bilinear in 2D.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let t0 = (x[0] + self.radius) / self.spacing;
        let k0 = t0.floor();
        let f0 = t0 - k0;
        let at = |a: i64, b: i64| self.node(a, b).map_or(0.0, |i| values[i]);
        if self.dimension == 1 {
            let k = k0 as i64;
            return (1.0 - f0) * at(k, 0) + f0 * at(k + 1, 0);
        }
        let t1 = (x[1] + self.radius) / self.spacing;
        let k1 = t1.floor();
        let f1 = t1 - k1;
        let (a, b) = (k0 as i64, k1 as i64);
        (1.0 - f0) * ((1.0 - f1) * at(a, b) + f1 * at(a, b + 1)) + f0 * ((1.0 - f1) * at(a + 1, b) + f1 * at(a + 1, b + 1))
    }
}

/// `sigma Lap_h + diag(a)` with zero Dirichlet data outside the node set.
pub fn laplacian_matrix(grid: &FdGrid, sigma: f64, a: &[f64]) -> Result<BandedSym> {
    ensure_param(sigma > 0.0 && sigma.is_finite(), "sigma", "diffusion must be positive")?;
    if a.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: a.len(),
        });
    }
    let c = sigma / (grid.spacing * grid.spacing);
    let n = grid.len();
    let mut bw = 0;
    let mut couplings = Vec::new();
    for i in 0..n {
        let p = grid.nodes[i];
        let (k0, k1) = (p[0] as i64, p[1] as i64);
        let mut neighbors = vec![(k0 - 1, k1)];
        if grid.dimension == 2 {
            neighbors.push((k0, k1 - 1));
        }
        for (a0, a1) in neighbors {
            if let Some(j) = grid.node(a0, a1) {
                bw = bw.max(i - j);
                couplings.push((i, j));
            }
        }
    }
    let mut m = BandedSym::zeros(n, bw);
    for (i, j) in couplings {
        m.add(i, j, c);
    }
    let diag = 2.0 * grid.dimension as f64 * c;
    for (i, ai) in a.iter().enumerate() {
        m.add(i, i, ai - diag);
    }
    Ok(m)
}

/// `local_lambda1_fd`: certified `lambda_1(sigma Lap + a, B_R)`, i.e. minus the
/// largest eigenvalue of the discrete operator.
pub fn local_lambda1_fd(grid: &FdGrid, sigma: f64, a: &[f64], opts: &SpectralOptions) -> Result<SpectralEstimate> {
    let m = laplacian_matrix(grid, sigma, a)?;
    let shift = 1.0 + m.diagonal().iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    principal_eigenvalue_banded(&m, shift, Method::FdLaplacian, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_growth_matches_ground_mode() {
        let (r, sigma, c) = (2.0, 0.3, 0.7);
        let exact = sigma * (std::f64::consts::PI / (2.0 * r)).powi(2) - c;
        let mut errs = Vec::new();
        for h in [0.1, 0.05, 0.025] {
            let g = FdGrid::new(1, r, h).unwrap();
            let e = local_lambda1_fd(&g, sigma, &vec![c; g.len()], &SpectralOptions::default()).unwrap();
            // discrete closed form sigma (4/h^2) sin^2(pi h / 4R) - c
            let discrete = sigma * 4.0 / (h * h) * (std::f64::consts::PI * h / (4.0 * r)).sin().powi(2) - c;
            assert!(e.contains(discrete) || (e.value - discrete).abs() < 1e-12);
            errs.push((e.value - exact).abs());
        }
        assert!(errs[1] < errs[0] / 3.5 && errs[2] < errs[1] / 3.5, "{errs:?}");
    }

    #[test]
    fn interpolation_hits_nodes() {
        let g = FdGrid::new(1, 1.0, 0.25).unwrap();
        let v = g.sample(|x| 1.0 - x[0] * x[0]);
        assert_eq!(g.len(), 7);
        assert!((g.interpolate(&v, &[0.25]) - v[4]).abs() < 1e-15);
        assert!((g.interpolate(&v, &[0.125]) - 0.5 * (v[3] + v[4])).abs() < 1e-15);
        assert_eq!(g.interpolate(&v, &[1.0]), 0.0);
    }

    #[test]
    fn two_dimensional_nodes_inside_disc() {
        let g = FdGrid::new(2, 1.0, 0.25).unwrap();
        assert!((0..g.len()).all(|i| {
            let x = g.coords(i);
            x[0].hypot(x[1]) < 1.0
        }));
        let m = laplacian_matrix(&g, 1.0, &vec![0.0; g.len()]).unwrap();
        assert_eq!(BandedSym::from_dense(&m.to_dense()), m);
    }
}

//! Uniform cell-centred grids on a ball or a periodic box.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_param, Error, Result};

pub const DEFAULT_MAX_POINTS_PER_AXIS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Cell centres of `h Z^N + h/2` inside the closed ball `|x| <= R`; the
    /// exterior is not part of the domain.
    BallTruncated,
    /// The box `[-R, R)^N` with periodic wraparound. Validation only.
    Torus,
}

/// Cell-centred grid. Every point carries the midpoint weight `h^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dimension: usize,
    radius: f64,
    spacing: f64,
    topology: Topology,
    /// Cells per axis of the enclosing box.
    box_side: usize,
    /// Box position of each point (row-major, last axis fastest).
    positions: Vec<[usize; 2]>,
    /// Point index for each box cell, `usize::MAX` outside the domain.
    box_to_point: Vec<usize>,
}

impl Grid {
    pub fn new(dimension: usize, radius: f64, spacing: f64, topology: Topology) -> Result<Self> {
        Self::with_limit(dimension, radius, spacing, topology, DEFAULT_MAX_POINTS_PER_AXIS)
    }

    pub fn with_limit(
        dimension: usize,
        radius: f64,
        spacing: f64,
        topology: Topology,
        max_per_axis: usize,
    ) -> Result<Self> {
        ensure_param(dimension == 1 || dimension == 2, "N", "grids support N = 1 or 2")?;
        ensure_param(radius.is_finite() && radius > 0.0, "R", "must be positive")?;
        ensure_param(
            spacing.is_finite() && spacing > 0.0 && spacing < radius,
            "h",
            "spacing must satisfy 0 < h < R",
        )?;
        let per_axis = 2.0 * radius / spacing;
        if per_axis > max_per_axis as f64 {
            return Err(Error::ResourceLimit(format!(
                "{per_axis:.0} cells per axis exceeds the limit {max_per_axis}"
            )));
        }
        let box_side = match topology {
            Topology::Torus => {
                let cells = per_axis.round();
                ensure_param(
                    (cells - per_axis).abs() <= 1e-9 * per_axis,
                    "h",
                    "torus needs 2R/h to be an integer",
                )?;
                cells as usize
            }
            Topology::BallTruncated => 2 * (radius / spacing - 1e-9).ceil() as usize,
        };
        let side2 = if dimension == 2 { box_side } else { 1 };
        let mut grid = Grid {
            dimension,
            radius,
            spacing,
            topology,
            box_side,
            positions: Vec::new(),
            box_to_point: vec![usize::MAX; box_side * side2],
        };
        let tol = 1e-12 * radius;
        for p0 in 0..box_side {
            for p1 in 0..side2 {
                let pos = [p0, p1];
                if topology == Topology::BallTruncated && grid.norm_of(pos) > radius + tol {
                    continue;
                }
                grid.box_to_point[p0 * side2 + p1] = grid.positions.len();
                grid.positions.push(pos);
            }
        }
        Ok(grid)
    }

    fn coordinate_of(&self, p: usize) -> f64 {
        (p as f64 + 0.5) * self.spacing - self.box_side as f64 * 0.5 * self.spacing
    }

    fn norm_of(&self, pos: [usize; 2]) -> f64 {
        let x = self.coordinate_of(pos[0]);
        if self.dimension == 1 {
            x.abs()
        } else {
            let y = self.coordinate_of(pos[1]);
            x.hypot(y)
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
    pub fn topology(&self) -> Topology {
        self.topology
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
    pub fn box_side(&self) -> usize {
        self.box_side
    }

    /// Midpoint quadrature weight `h^N`, identical for all points.
    pub fn weight(&self) -> f64 {
        self.spacing.powi(self.dimension as i32)
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.weight(); self.len()]
    }

    pub fn position(&self, i: usize) -> [usize; 2] {
        self.positions[i]
    }

    /// Point index at a box position, if that cell belongs to the domain.
    pub fn point_at(&self, pos: [usize; 2]) -> Option<usize> {
        let side2 = if self.dimension == 2 { self.box_side } else { 1 };
        match self.box_to_point[pos[0] * side2 + pos[1]] {
            usize::MAX => None,
            i => Some(i),
        }
    }

    /// Coordinates of point `i`; the second entry is 0 in 1D.
    pub fn coords(&self, i: usize) -> [f64; 2] {
        let pos = self.positions[i];
        let x = self.coordinate_of(pos[0]);
        let y = if self.dimension == 2 {
            self.coordinate_of(pos[1])
        } else {
            0.0
        };
        [x, y]
    }

    pub fn coord_slice(&self, i: usize) -> Vec<f64> {
        let c = self.coords(i);
        c[..self.dimension].to_vec()
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.norm_of(self.positions[i])
    }

    /// Integer lattice offset of point `i` relative to the box origin.
    pub fn lattice(&self, i: usize) -> [i64; 2] {
        let p = self.positions[i];
        [p[0] as i64, p[1] as i64]
    }

    /// `sum_i w_i v_i`
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weight() * values.iter().sum::<f64>()
    }

    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i)[..self.dimension])).collect()
    }

    pub fn norm_l1(&self, values: &[f64]) -> f64 {
        self.weight() * values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn norm_l2(&self, values: &[f64]) -> f64 {
        (self.weight() * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Index map from the points of `self` into `larger`, for nested ball
    /// grids with the same spacing. `None` when some point has no match.
    pub fn embedding_into(&self, larger: &Grid) -> Option<Vec<usize>> {
        if self.dimension != larger.dimension || (self.spacing - larger.spacing).abs() > 1e-12 * self.spacing {
            return None;
        }
        let shift = (larger.box_side as i64 - self.box_side as i64) / 2;
        if (larger.box_side as i64 - self.box_side as i64) % 2 != 0 || shift < 0 {
            return None;
        }
        let mut map = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let p = self.positions[i];
            let q0 = p[0] as i64 + shift;
            let q1 = if self.dimension == 2 { p[1] as i64 + shift } else { 0 };
            map.push(larger.point_at([q0 as usize, q1 as usize])?);
        }
        Some(map)
    }
}

/// `build_grid` entry point.
pub fn build_grid(dimension: usize, radius: f64, spacing: f64, topology: Topology) -> Result<Grid> {
    Grid::new(dimension, radius, spacing, topology)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_cell_centres() {
        let g = build_grid(1, 2.0, 0.5, Topology::Torus).unwrap();
        assert_eq!(g.len(), 8);
        for i in 0..8 {
            assert!((g.coords(i)[0] - (-2.0 + 0.25 + 0.5 * i as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_1d_points_inside() {
        let g = build_grid(1, 1.0, 0.25, Topology::BallTruncated).unwrap();
        assert_eq!(g.len(), 8);
        assert!((0..g.len()).all(|i| g.norm(i) <= 1.0));
    }

    #[test]
    fn ball_2d_count_matches_enumeration() {
        let g = build_grid(2, 1.0, 0.5, Topology::BallTruncated).unwrap();
        // Oracle: enumerate the 4x4 box centres and filter by norm.
        let centres: [f64; 4] = [-0.75, -0.25, 0.25, 0.75];
        let count = centres
            .iter()
            .flat_map(|x| centres.iter().map(move |y| (x, y)))
            .filter(|(x, y)| x.hypot(**y) <= 1.0)
            .count();
        assert_eq!(count, 12);
        assert_eq!(g.len(), count);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let g = build_grid(2, 1.0, 0.25, Topology::BallTruncated).unwrap();
        for i in 1..g.len() {
            let (a, b) = (g.coords(i - 1), g.coords(i));
            assert!(a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]));
        }
    }

    #[test]
    fn too_fine_grid_is_rejected() {
        assert!(matches!(
            build_grid(1, 10.0, 1e-4, Topology::BallTruncated),
            Err(Error::ResourceLimit(_))
        ));
        assert!(build_grid(1, 1.0, 2.0, Topology::BallTruncated).is_err());
        assert!(build_grid(1, 1.0, 0.3, Topology::Torus).is_err());
    }

    #[test]
    fn midpoint_rule_converges_at_least_first_order() {
        // int_{-1}^{1} cos(x) dx and int_{B_1} (1 - |x|^2)^2 dx = pi / 3
        let exact1 = 2.0 * 1.0_f64.sin();
        let exact2 = std::f64::consts::PI / 3.0;
        for (n, exact) in [(1, exact1), (2, exact2)] {
            let mut prev = f64::INFINITY;
            for h in [0.1, 0.05, 0.025] {
                let g = build_grid(n, 1.0, h, Topology::BallTruncated).unwrap();
                let vals = g.sample(|x| {
                    if n == 1 {
                        x[0].cos()
                    } else {
                        (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0).powi(2)
                    }
                });
                let err = (g.integrate(&vals) - exact).abs();
                assert!(err <= 0.5 * prev + 1e-12, "n={n} h={h} err={err} prev={prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn nested_ball_grids_embed() {
        let small = build_grid(1, 2.0, 0.1, Topology::BallTruncated).unwrap();
        let large = build_grid(1, 3.0, 0.1, Topology::BallTruncated).unwrap();
        let map = small.embedding_into(&large).unwrap();
        for (i, &j) in map.iter().enumerate() {
            assert!((small.coords(i)[0] - large.coords(j)[0]).abs() < 1e-12);
        }
    }
}

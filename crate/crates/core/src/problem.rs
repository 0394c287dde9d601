//! A complete problem instance: kernel, growth, reaction, scaling and grid.

use crate::error::Result;
use crate::grid::{Grid, Topology};
use crate::growth::{GrowthProfile, Reaction};
use crate::kernel::{Kernel, ScaledKernel};
use crate::nonlocal_op::{DiscreteOperator, DEFAULT_TAIL_TOL};
use crate::spectral::{principal_eigenvalue, SpectralEstimate, SpectralOptions};
use crate::stationary::{solve_with_estimate, StationaryOptions, StationarySolution};

#[derive(Debug, Clone)]
pub struct Problem {
    pub kernel: Kernel,
    pub growth: GrowthProfile,
    pub reaction: Reaction,
    pub topology: Topology,
    pub radius: f64,
    pub spacing: f64,
    pub epsilon: f64,
    pub m: f64,
    pub alpha0: f64,
    pub tail_tol: f64,
}

impl Problem {
    /// Ball of radius 8 with spacing 0.1 at `eps = 1`, `m = 0`, `alpha0 = 1`.
    pub fn new(kernel: Kernel, growth: GrowthProfile) -> Self {
        Problem {
            kernel,
            growth,
            reaction: Reaction::default(),
            topology: Topology::BallTruncated,
            radius: 8.0,
            spacing: 0.1,
            epsilon: 1.0,
            m: 0.0,
            alpha0: 1.0,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn with_grid(mut self, radius: f64, spacing: f64) -> Self {
        self.radius = radius;
        self.spacing = spacing;
        self
    }

    pub fn with_scaling(mut self, epsilon: f64, m: f64) -> Self {
        self.epsilon = epsilon;
        self.m = m;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_growth(mut self, growth: GrowthProfile) -> Self {
        self.growth = growth;
        self
    }

    pub fn dimension(&self) -> usize {
        self.kernel.dimension()
    }

    pub fn scaled_kernel(&self) -> Result<ScaledKernel> {
        ScaledKernel::new(self.kernel.clone(), self.epsilon, self.m, self.alpha0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dimension(), self.radius, self.spacing, self.topology)
    }

    pub fn operator(&self) -> Result<DiscreteOperator> {
        let grid = self.grid()?;
        let a = self.growth.sample(&grid);
        DiscreteOperator::with_tail_tol(&grid, &self.scaled_kernel()?, a, self.tail_tol)
    }

    pub fn lambda_p(&self, opts: &SpectralOptions) -> Result<SpectralEstimate> {
        principal_eigenvalue(&self.operator()?, opts)
    }

    pub fn stationary(&self, opts: &StationaryOptions) -> Result<StationarySolution> {
        let op = self.operator()?;
        let est = principal_eigenvalue(&op, &opts.spectral)?;
        solve_with_estimate(&op, &self.reaction, Some(&self.growth), est, opts)
    }
}

//! Numerical laboratory for the nonlocal Fisher-KPP equation
//! `u_t = rate (J_eps * u - u) + u (a(x) - kappa u)`.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod fd;
pub mod grid;
pub mod growth;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod nonlocal_op;
pub mod problem;
pub mod quadrature;
pub mod spectral;
pub mod stationary;

pub use error::{Bracket, Error, Result};
pub use grid::{build_grid, Grid, Topology};
pub use growth::{GrowthFamily, GrowthProfile, Hostility, Reaction};
pub use kernel::{
    kernel_moment, rescale_kernel, validate_kernel, DiscreteKernel, Kernel, KernelFamily, ScaledKernel,
    ValidationReport,
};
pub use nonlocal_op::{apply_operator, assemble_matrix, convolve, Convolver, DiscreteOperator, Path};
pub use evolution::{evolve, EvolutionOptions, EvolutionTrace, LongTimeVerdict, MonotoneFlag};
pub use experiments::GridCoupling;
pub use fd::{local_lambda1_fd, FdGrid};
pub use problem::Problem;
pub use spectral::{
    principal_eigenvalue, rayleigh_lambda_v, Method, Sign, SpectralEstimate, SpectralOptions,
};
pub use stationary::{Scheme, StationaryOptions, StationarySolution, Verdict};

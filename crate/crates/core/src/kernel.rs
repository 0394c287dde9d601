//! Dispersal kernels, their hypotheses, moments and budget rescaling.
//!
//! Closed-form families are radial profiles normalized to unit mass in the
//! requested dimension. Tabulated kernels are taken as given (linear
//! interpolation between samples) so that their hypotheses can be checked
//! rather than enforced.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_param, Error, Result};
use crate::quadrature::{integrate, Integral};

/// Surface measure of the unit sphere in `R^N`.
fn sphere_area(dimension: usize) -> f64 {
    match dimension {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("dimension checked at construction"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelFamily {
    /// `(1 - |z|/radius)^+`
    Tent { radius: f64 },
    /// `(1 - |z|^2/radius^2)^+`
    TruncatedQuadratic { radius: f64 },
    /// `exp(-|z|^2 / (2 sigma^2 radius^2))` cut at `radius`.
    TruncatedGaussian { radius: f64, sigma: f64 },
    /// `exp(-|z|/length)`
    ExponentialTail { length: f64 },
    /// `(1 + |z|/length)^(-exponent)`
    AlgebraicTail { length: f64, exponent: f64 },
    /// Piecewise-linear samples. In 1D `offsets` are signed positions; in
    /// higher dimension they are radii starting at 0.
    Tabulated { offsets: Vec<f64>, values: Vec<f64> },
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Tent { .. } => "tent",
            KernelFamily::TruncatedQuadratic { .. } => "truncated-quadratic",
            KernelFamily::TruncatedGaussian { .. } => "truncated-gaussian",
            KernelFamily::ExponentialTail { .. } => "exponential-tail",
            KernelFamily::AlgebraicTail { .. } => "algebraic-tail",
            KernelFamily::Tabulated { .. } => "tabulated",
        }
    }
}

/// A dispersal kernel `J` on `R^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    dimension: usize,
    /// Multiplier turning the raw profile into a unit-mass density.
    norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    /// Quadrature error estimate plus the analytic bound on any neglected tail.
    pub error: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, dimension: usize) -> Result<Self> {
        ensure_param(
            (1..=3).contains(&dimension),
            "dimension",
            format!("expected 1, 2 or 3, got {dimension}"),
        )?;
        match &family {
            KernelFamily::Tent { radius } | KernelFamily::TruncatedQuadratic { radius } => {
                ensure_param(radius.is_finite() && *radius > 0.0, "radius", "must be positive")?;
            }
            KernelFamily::TruncatedGaussian { radius, sigma } => {
                ensure_param(radius.is_finite() && *radius > 0.0, "radius", "must be positive")?;
                ensure_param(sigma.is_finite() && *sigma > 0.0, "sigma", "must be positive")?;
            }
            KernelFamily::ExponentialTail { length } => {
                ensure_param(length.is_finite() && *length > 0.0, "length", "must be positive")?;
            }
            KernelFamily::AlgebraicTail { length, exponent } => {
                ensure_param(length.is_finite() && *length > 0.0, "length", "must be positive")?;
                ensure_param(
                    exponent.is_finite() && *exponent > dimension as f64,
                    "exponent",
                    format!("must exceed the dimension {dimension} for a finite mass"),
                )?;
            }
            KernelFamily::Tabulated { offsets, values } => {
                if offsets.len() != values.len() || offsets.len() < 2 {
                    return Err(Error::InvalidKernel(
                        "tabulated kernel needs at least two (offset, value) pairs".into(),
                    ));
                }
                if offsets.iter().chain(values.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidKernel("non-finite tabulated sample".into()));
                }
                if offsets.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidKernel("tabulated offsets must be strictly increasing".into()));
                }
                if dimension > 1 && offsets[0] != 0.0 {
                    return Err(Error::InvalidKernel(
                        "radial tabulation must start at radius 0".into(),
                    ));
                }
            }
        }
        let mut kernel = Kernel {
            family,
            dimension,
            norm: 1.0,
        };
        if !matches!(kernel.family, KernelFamily::Tabulated { .. }) {
            let raw = kernel.raw_radial_integral(0.0, 1.0)?;
            kernel.norm = 1.0 / raw.value;
        }
        Ok(kernel)
    }

    pub fn tent(dimension: usize) -> Self {
        Kernel::new(KernelFamily::Tent { radius: 1.0 }, dimension).expect("valid family")
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Radius outside which the kernel vanishes; infinite for tail families.
    pub fn support_radius(&self) -> f64 {
        match &self.family {
            KernelFamily::Tent { radius }
            | KernelFamily::TruncatedQuadratic { radius }
            | KernelFamily::TruncatedGaussian { radius, .. } => *radius,
            KernelFamily::ExponentialTail { .. } | KernelFamily::AlgebraicTail { .. } => f64::INFINITY,
            KernelFamily::Tabulated { offsets, .. } => {
                offsets.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        self.support_radius().is_finite()
    }

    /// Unnormalized radial profile (or signed 1D profile for tabulated data).
    fn profile(&self, r: f64) -> f64 {
        match &self.family {
            KernelFamily::Tent { radius } => (1.0 - r.abs() / radius).max(0.0),
            KernelFamily::TruncatedQuadratic { radius } => {
                let s = r / radius;
                (1.0 - s * s).max(0.0)
            }
            KernelFamily::TruncatedGaussian { radius, sigma } => {
                if r.abs() > *radius {
                    0.0
                } else {
                    let s = r / (radius * sigma);
                    (-0.5 * s * s).exp()
                }
            }
            KernelFamily::ExponentialTail { length } => (-r.abs() / length).exp(),
            KernelFamily::AlgebraicTail { length, exponent } => (1.0 + r.abs() / length).powf(-exponent),
            KernelFamily::Tabulated { offsets, values } => interpolate(offsets, values, r),
        }
    }

    /// `J(z)` for a point `z` with `z.len() == dimension`.
    pub fn value(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dimension);
        if self.dimension == 1 {
            return self.norm * self.profile(z[0]);
        }
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.norm * self.profile(r)
    }

    /// `J` as a function of `|z|` (signed offset in 1D).
    pub fn value_radial(&self, r: f64) -> f64 {
        self.norm * self.profile(r)
    }

    /// Exponent `q` with `profile(r) ~ r^(-q)`, for algebraic tails only.
    fn algebraic_exponent(&self) -> Option<f64> {
        match &self.family {
            KernelFamily::AlgebraicTail { exponent, .. } => Some(*exponent),
            _ => None,
        }
    }

    /// Analytic bound on `int_{rc}^inf profile(r) r^k dr` for tail families.
    fn tail_bound(&self, k: f64, rc: f64) -> f64 {
        match &self.family {
            KernelFamily::ExponentialTail { length } => {
                let s = k + 1.0;
                let x = rc / length;
                let gamma_upper = if s <= 1.0 {
                    x.powf(s - 1.0) * (-x).exp()
                } else if x > 2.0 * (s - 1.0) {
                    x.powf(s - 1.0) * (-x).exp() * x / (x - (s - 1.0))
                } else {
                    f64::INFINITY
                };
                length.powf(s) * gamma_upper
            }
            KernelFamily::AlgebraicTail { length, exponent } => {
                let excess = exponent - k - 1.0;
                if excess <= 0.0 {
                    return f64::INFINITY;
                }
                // r^k (1 + r/l)^-q <= l^k (1 + r/l)^(k-q)
                length.powf(k + 1.0) * (1.0 + rc / length).powf(-excess) / excess
            }
            _ => 0.0,
        }
    }

    /// `area * int_0^inf profile(r/scale) r^(N-1+p) dr / scale^N`, i.e. the
    /// `p`-th absolute moment of the raw profile dilated by `scale`.
    fn raw_radial_integral(&self, p: f64, scale: f64) -> Result<Moment> {
        let n = self.dimension as f64;
        let k = n - 1.0 + p;
        if let KernelFamily::Tabulated { offsets, .. } = &self.family {
            // Integrate segment by segment; the interpolant has kinks at the samples.
            let mut value = 0.0;
            let mut error = 0.0;
            let mut nodes: Vec<f64> = offsets.iter().map(|o| o * scale).collect();
            if self.dimension == 1 && nodes[0] < 0.0 && *nodes.last().unwrap() > 0.0 && !nodes.contains(&0.0) {
                nodes.push(0.0);
                nodes.sort_by(f64::total_cmp);
            }
            for w in nodes.windows(2) {
                let piece = integrate(
                    |r: f64| self.profile(r / scale) * r.abs().powf(if self.dimension == 1 { p } else { k }),
                    w[0],
                    w[1],
                    1e-15,
                    1e-13,
                );
                value += piece.value;
                error += piece.error;
            }
            let area = if self.dimension == 1 { 1.0 } else { sphere_area(self.dimension) };
            let dil = scale.powf(n);
            return Ok(Moment {
                value: area * value / dil,
                error: area * error / dil,
            });
        }
        let area = sphere_area(self.dimension);
        let integrand = |r: f64| self.profile(r / scale) * r.powf(k);
        let support = self.support_radius();
        let (body, tail) = if support.is_finite() {
            (integrate(integrand, 0.0, support * scale, 1e-15, 1e-13), 0.0)
        } else {
            if let Some(q) = self.algebraic_exponent() {
                if q <= k + 1.0 {
                    return Err(Error::InfiniteMoment { order: p });
                }
            }
            let length = match &self.family {
                KernelFamily::ExponentialTail { length } | KernelFamily::AlgebraicTail { length, .. } => *length,
                _ => unreachable!(),
            };
            // Geometric panels [0, l], [l, 2l], [2l, 4l], ... until the analytic tail is negligible.
            let mut acc = Integral { value: 0.0, error: 0.0 };
            let mut lo = 0.0;
            let mut hi = length;
            let mut tail;
            loop {
                let piece = integrate(integrand, lo * scale, hi * scale, 1e-16, 1e-13);
                acc.value += piece.value;
                acc.error += piece.error;
                tail = self.tail_bound(k, hi) * scale.powf(k + 1.0);
                if tail <= 1e-14 * acc.value.abs().max(1e-300) || hi > 1e12 * length {
                    break;
                }
                lo = hi;
                hi *= 2.0;
            }
            (acc, tail)
        };
        let dil = scale.powf(n);
        Ok(Moment {
            value: area * body.value / dil,
            error: area * (body.error + tail) / dil,
        })
    }

    /// `D_p(J) = int J(z) |z|^p dz` with the Euclidean norm.
    pub fn moment(&self, p: f64) -> Result<Moment> {
        ensure_param(p >= 0.0 && p.is_finite(), "p", "moment order must be non-negative")?;
        let raw = self.raw_radial_integral(p, 1.0)?;
        Ok(Moment {
            value: self.norm * raw.value,
            error: self.norm * raw.error,
        })
    }

    pub fn mass(&self) -> Result<Moment> {
        self.moment(0.0)
    }

    /// Kernel mass outside the ball of radius `r`, bounded analytically for
    /// tail families and zero beyond the support of compact ones.
    pub fn tail_mass(&self, r: f64) -> f64 {
        if r >= self.support_radius() {
            return 0.0;
        }
        if self.is_compact() {
            let body = self.raw_radial_integral(0.0, 1.0).map(|m| m.value).unwrap_or(0.0);
            let inner = if self.dimension == 1 {
                integrate(|s: f64| self.profile(s), -r, r, 1e-15, 1e-13).value
            } else {
                let k = self.dimension as f64 - 1.0;
                sphere_area(self.dimension) * integrate(|s: f64| self.profile(s) * s.powf(k), 0.0, r, 1e-15, 1e-13).value
            };
            return (self.norm * (body - inner)).max(0.0);
        }
        self.norm * sphere_area(self.dimension) * self.tail_bound(self.dimension as f64 - 1.0, r)
    }

    /// Whether `int J |z|^(N+1)` is finite, decided from the family's decay
    /// exponent rather than numerically.
    pub fn satisfies_tail_hypothesis(&self) -> bool {
        match self.algebraic_exponent() {
            Some(q) => q > 2.0 * self.dimension as f64 + 1.0,
            None => true,
        }
    }

    /// Points used to probe nonnegativity and symmetry.
    fn sample_offsets(&self) -> Vec<f64> {
        if let KernelFamily::Tabulated { offsets, .. } = &self.family {
            let mut pts: Vec<f64> = offsets.clone();
            for w in offsets.windows(2) {
                pts.push(0.5 * (w[0] + w[1]));
            }
            return pts;
        }
        let reach = if self.is_compact() {
            self.support_radius()
        } else {
            match &self.family {
                KernelFamily::ExponentialTail { length } | KernelFamily::AlgebraicTail { length, .. } => 20.0 * length,
                _ => unreachable!(),
            }
        };
        (0..=200).map(|i| -reach + 2.0 * reach * i as f64 / 200.0).collect()
    }
}

fn interpolate(offsets: &[f64], values: &[f64], r: f64) -> f64 {
    let last = offsets.len() - 1;
    if r < offsets[0] || r > offsets[last] {
        return 0.0;
    }
    let idx = offsets.partition_point(|&o| o <= r);
    if idx == 0 {
        return values[0];
    }
    if idx > last {
        return values[last];
    }
    let (x0, x1) = (offsets[idx - 1], offsets[idx]);
    let t = (r - x0) / (x1 - x0);
    values[idx - 1] * (1.0 - t) + values[idx] * t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub family: &'static str,
    pub dimension: usize,
    pub nonnegative: bool,
    pub symmetric: bool,
    pub mass: f64,
    pub unit_mass: bool,
    /// J(0) > 0
    pub positive_at_origin: bool,
    /// Finite (N+1)-th absolute moment.
    pub tail_moment_finite: bool,
    /// Quadrature value of the (N+1)-th moment when finite.
    pub tail_moment: Option<f64>,
    pub compact_support: bool,
    pub messages: Vec<String>,
}

impl ValidationReport {
    /// Nonnegative, symmetric, unit mass.
    pub fn h1(&self) -> bool {
        self.nonnegative && self.symmetric && self.unit_mass
    }

    pub fn h2(&self) -> bool {
        self.positive_at_origin
    }

    pub fn h5(&self) -> bool {
        self.tail_moment_finite
    }
}

/// Checks the standing kernel hypotheses at tolerance `tol`.
pub fn validate_kernel(kernel: &Kernel, tol: f64) -> Result<ValidationReport> {
    let n = kernel.dimension();
    let mut messages = Vec::new();
    let mut nonnegative = true;
    let mut symmetric = true;
    let mut z = vec![0.0; n];
    let mut zm = vec![0.0; n];
    for s in kernel.sample_offsets() {
        z[0] = s;
        zm[0] = -s;
        let v = kernel.value(&z);
        let vm = kernel.value(&zm);
        if !v.is_finite() || !vm.is_finite() {
            return Err(Error::InvalidKernel(format!("non-finite value at offset {s}")));
        }
        if v < 0.0 && nonnegative {
            nonnegative = false;
            messages.push(format!("negative value {v:.3e} at offset {s}"));
        }
        if (v - vm).abs() > tol * v.abs().max(vm.abs()).max(1.0) && symmetric {
            symmetric = false;
            messages.push(format!("J({s}) = {v} differs from J({}) = {vm}", -s));
        }
    }
    let mass = kernel.mass()?.value;
    let unit_mass = (mass - 1.0).abs() <= tol;
    if !unit_mass {
        messages.push(format!("mass {mass} differs from 1"));
    }
    let origin = kernel.value(&vec![0.0; n]);
    let positive_at_origin = origin > 0.0;
    if !positive_at_origin {
        messages.push("J(0) is not positive".into());
    }
    let tail_moment_finite = kernel.satisfies_tail_hypothesis();
    let tail_moment = if tail_moment_finite {
        Some(kernel.moment(n as f64 + 1.0)?.value)
    } else {
        messages.push("(N+1)-th absolute moment diverges".into());
        None
    };
    Ok(ValidationReport {
        family: kernel.family().name(),
        dimension: n,
        nonnegative,
        symmetric,
        mass,
        unit_mass,
        positive_at_origin,
        tail_moment_finite,
        tail_moment,
        compact_support: kernel.is_compact(),
        messages,
    })
}

/// `kernel_moment` entry point: `D_p(J)`.
pub fn kernel_moment(kernel: &Kernel, p: f64) -> Result<Moment> {
    kernel.moment(p)
}

/// Budget-rescaled kernel `rate * J_eps` with `J_eps(z) = eps^-N J(z/eps)`
/// and `rate = alpha0 / eps^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledKernel {
    base: Kernel,
    epsilon: f64,
    m: f64,
    alpha0: f64,
    rate: f64,
}

impl ScaledKernel {
    pub fn new(base: Kernel, epsilon: f64, m: f64, alpha0: f64) -> Result<Self> {
        ensure_param(epsilon.is_finite() && epsilon > 0.0, "epsilon", "must be positive")?;
        ensure_param((0.0..=2.0).contains(&m), "m", "cost exponent must lie in [0, 2]")?;
        ensure_param(alpha0.is_finite() && alpha0 > 0.0, "alpha0", "must be positive")?;
        Ok(ScaledKernel {
            base,
            epsilon,
            m,
            alpha0,
            rate: alpha0 / epsilon.powf(m),
        })
    }

    /// Unscaled kernel with unit rate.
    pub fn unit(base: Kernel) -> Self {
        ScaledKernel::new(base, 1.0, 0.0, 1.0).expect("unit scaling is valid")
    }

    pub fn base(&self) -> &Kernel {
        &self.base
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    pub fn support_radius(&self) -> f64 {
        self.epsilon * self.base.support_radius()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        let scaled: Vec<f64> = z.iter().map(|v| v / self.epsilon).collect();
        self.base.value(&scaled) / self.epsilon.powi(self.dimension() as i32)
    }

    pub fn value_radial(&self, r: f64) -> f64 {
        self.base.value_radial(r / self.epsilon) / self.epsilon.powi(self.dimension() as i32)
    }

    /// `D_p(J_eps)` integrated directly on the dilated profile.
    pub fn moment(&self, p: f64) -> Result<Moment> {
        ensure_param(p >= 0.0 && p.is_finite(), "p", "moment order must be non-negative")?;
        let raw = self.base.raw_radial_integral(p, self.epsilon)?;
        Ok(Moment {
            value: self.base.norm * raw.value,
            error: self.base.norm * raw.error,
        })
    }

    /// Tail mass of `J_eps` outside radius `r`.
    pub fn tail_mass(&self, r: f64) -> f64 {
        self.base.tail_mass(r / self.epsilon)
    }

    /// `rate * D_m(J_eps)`: the per-capita dispersal cost, equal to
    /// `alpha0 * D_m(J)` for every `eps`.
    pub fn budget(&self) -> Result<f64> {
        Ok(self.rate * self.moment(self.m)?.value)
    }
}

/// `rescale_kernel` entry point.
pub fn rescale_kernel(kernel: &Kernel, epsilon: f64, m: f64, alpha0: f64) -> Result<ScaledKernel> {
    ScaledKernel::new(kernel.clone(), epsilon, m, alpha0)
}

/// Kernel samples on the lattice `h Z^N`, renormalized to unit discrete mass.
///
/// Offsets are stored for `|d_i| <= reach` on each axis (a box of side
/// `2 reach + 1`), row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    dimension: usize,
    reach: usize,
    values: Vec<f64>,
    /// Mass of the continuous kernel beyond the truncation radius (zero for
    /// compact kernels).
    truncated_mass: f64,
    /// Discrete mass before renormalization.
    raw_mass: f64,
}

impl DiscreteKernel {
    /// Samples `kernel` with spacing `h`. Offsets beyond `max_reach` cells are
    /// dropped from storage but still counted in the renormalization; for tail
    /// families the lattice is cut where the tail mass falls below `tail_tol`.
    pub fn sample(kernel: &ScaledKernel, h: f64, max_reach: usize, tail_tol: f64) -> Result<Self> {
        let n = kernel.dimension();
        ensure_param(n <= 2, "dimension", "discrete kernels support N <= 2")?;
        let support = kernel.support_radius();
        if support.is_finite() && support < h {
            return Err(Error::UnderResolvedKernel { support, spacing: h });
        }
        let (cut, truncated_mass) = if support.is_finite() {
            (support, 0.0)
        } else {
            let mut r = kernel.epsilon();
            while kernel.tail_mass(r) > tail_tol {
                r *= 1.25;
                if r > 1e9 {
                    return Err(Error::ResourceLimit("kernel tail never falls below tolerance".into()));
                }
            }
            (r, kernel.tail_mass(r))
        };
        let full_reach = (cut / h).floor() as usize;
        let reach = full_reach.min(max_reach);
        let side = 2 * reach + 1;
        let cell = h.powi(n as i32);
        let mut values = vec![0.0; side.pow(n as u32)];
        let mut stored = 0.0;
        for (idx, v) in values.iter_mut().enumerate() {
            let z = offset_coords(idx, reach, n, h);
            let r = z.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r <= cut {
                *v = cell * kernel.value(&z);
                stored += *v;
            }
        }
        // Lattice mass outside the stored box but inside the cut radius.
        let mut outside = 0.0;
        if reach < full_reach {
            if n == 1 {
                for d in reach + 1..=full_reach {
                    outside += 2.0 * cell * kernel.value_radial(d as f64 * h);
                }
            } else {
                outside = kernel.tail_mass(reach as f64 * h) - truncated_mass;
            }
        }
        let raw_mass = stored + outside.max(0.0);
        if !(raw_mass > 0.0) || !raw_mass.is_finite() {
            return Err(Error::InvalidKernel("discrete kernel has no positive mass".into()));
        }
        for v in &mut values {
            *v /= raw_mass;
        }
        Ok(DiscreteKernel {
            dimension: n,
            reach,
            values,
            truncated_mass,
            raw_mass,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn reach(&self) -> usize {
        self.reach
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }
    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    /// Weighted sample `h^N J(d h)` for a lattice offset, zero outside storage.
    pub fn at(&self, offset: [i64; 2]) -> f64 {
        let r = self.reach as i64;
        if offset[0].abs() > r || (self.dimension == 2 && offset[1].abs() > r) {
            return 0.0;
        }
        let side = 2 * r + 1;
        let idx = if self.dimension == 1 {
            offset[0] + r
        } else {
            (offset[0] + r) * side + offset[1] + r
        };
        self.values[idx as usize]
    }

    pub fn stored_mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn offset_coords(idx: usize, reach: usize, n: usize, h: f64) -> Vec<f64> {
    let side = 2 * reach + 1;
    if n == 1 {
        vec![(idx as f64 - reach as f64) * h]
    } else {
        let i = idx / side;
        let j = idx % side;
        vec![(i as f64 - reach as f64) * h, (j as f64 - reach as f64) * h]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tabulated(offsets: Vec<f64>, values: Vec<f64>) -> Kernel {
        Kernel::new(KernelFamily::Tabulated { offsets, values }, 1).unwrap()
    }

    #[test]
    fn tent_satisfies_h1_h2_with_compact_support() {
        let report = validate_kernel(&Kernel::tent(1), 1e-10).unwrap();
        assert!(report.h1() && report.h2() && report.h5());
        assert!(report.compact_support);
        assert!((report.mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_with_zero_at_origin_fails_h2() {
        let k = tabulated(vec![-1.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]);
        let report = validate_kernel(&k, 1e-8).unwrap();
        assert!(!report.h2());
        let k = tabulated(vec![-2.0, -1.0, 0.0, 1.0, 2.0], vec![0.0, 0.5, 0.0, 0.5, 0.0]);
        let report = validate_kernel(&k, 1e-8).unwrap();
        assert!(!report.h2());
        assert!(report.h1());
    }

    #[test]
    fn tabulated_with_negative_sample_fails_h1() {
        let k = tabulated(vec![-1.0, 0.0, 1.0], vec![-0.1, 1.2, -0.1]);
        let report = validate_kernel(&k, 1e-8).unwrap();
        assert!(!report.nonnegative);
        assert!(!report.h1());
    }

    #[test]
    fn asymmetric_tabulation_is_detected() {
        let k = tabulated(vec![-1.0, 0.0, 2.0], vec![0.0, 2.0 / 3.0, 0.0]);
        let report = validate_kernel(&k, 1e-8).unwrap();
        assert!(!report.symmetric);
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let err = Kernel::new(
            KernelFamily::Tabulated {
                offsets: vec![-1.0, 0.0, 1.0],
                values: vec![0.0, f64::NAN, 0.0],
            },
            1,
        );
        assert!(matches!(err, Err(Error::InvalidKernel(_))));
    }

    #[test]
    fn closed_form_moments() {
        let tent = Kernel::tent(1);
        assert!((tent.moment(2.0).unwrap().value - 1.0 / 6.0).abs() < 1e-13);
        assert!((tent.moment(0.0).unwrap().value - 1.0).abs() < 1e-13);
        let quad = Kernel::new(KernelFamily::TruncatedQuadratic { radius: 1.0 }, 1).unwrap();
        assert!((quad.moment(2.0).unwrap().value - 0.2).abs() < 1e-13);
        // 2D tent: norm 3/pi, D_2 = (3/pi) 2 pi int (1-r) r^3 = 6 (1/4 - 1/5) = 3/10
        let tent2 = Kernel::tent(2);
        assert!((tent2.moment(2.0).unwrap().value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn tail_family_moments() {
        // exp(-|z|) / 2: D_2 = 2
        let k = Kernel::new(KernelFamily::ExponentialTail { length: 1.0 }, 1).unwrap();
        let m = k.moment(2.0).unwrap();
        assert!((m.value - 2.0).abs() < 1e-9, "{m:?}");
        // (q-1)/2 (1+|z|)^-q with q = 5: D_2 = (q-1) * 2 / ((q-1)(q-2)(q-3)) = 2/6
        let k = Kernel::new(
            KernelFamily::AlgebraicTail {
                length: 1.0,
                exponent: 5.0,
            },
            1,
        )
        .unwrap();
        let m = k.moment(2.0).unwrap();
        assert!((m.value - 1.0 / 3.0).abs() < 1e-8, "{m:?}");
        assert!(matches!(k.moment(4.0), Err(Error::InfiniteMoment { .. })));
    }

    #[test]
    fn fat_tail_hypothesis_by_decay_exponent() {
        let pass = Kernel::new(
            KernelFamily::AlgebraicTail {
                length: 1.0,
                exponent: 5.0,
            },
            1,
        )
        .unwrap();
        assert!(validate_kernel(&pass, 1e-8).unwrap().h5());
        let fail = Kernel::new(
            KernelFamily::AlgebraicTail {
                length: 1.0,
                exponent: 2.5,
            },
            1,
        )
        .unwrap();
        let report = validate_kernel(&fail, 1e-8).unwrap();
        assert!(!report.h5());
        assert!(report.tail_moment.is_none());
    }

    #[test]
    fn rescale_examples() {
        let s = rescale_kernel(&Kernel::tent(1), 2.0, 2.0, 1.0).unwrap();
        assert_eq!(s.rate(), 0.25);
        assert_eq!(s.support_radius(), 2.0);
        let id = rescale_kernel(&Kernel::tent(1), 1.0, 1.3, 1.0).unwrap();
        assert_eq!(id.rate(), 1.0);
        for z in [-0.7, -0.1, 0.0, 0.4, 0.99] {
            assert_eq!(id.value(&[z]), Kernel::tent(1).value(&[z]));
        }
        assert!(rescale_kernel(&Kernel::tent(1), 0.0, 1.0, 1.0).is_err());
        assert!(rescale_kernel(&Kernel::tent(1), 1.0, 2.5, 1.0).is_err());
    }

    #[test]
    fn discrete_kernel_has_unit_mass() {
        let s = ScaledKernel::unit(Kernel::tent(1));
        let d = DiscreteKernel::sample(&s, 0.1, usize::MAX, 1e-12).unwrap();
        assert!((d.stored_mass() - 1.0).abs() < 1e-14);
        assert_eq!(d.reach(), 10);
        assert_eq!(d.at([11, 0]), 0.0);
        assert_eq!(d.at([3, 0]), d.at([-3, 0]));
    }

    #[test]
    fn under_resolved_kernel_is_rejected() {
        let s = rescale_kernel(&Kernel::tent(1), 0.05, 0.0, 1.0).unwrap();
        assert!(matches!(
            DiscreteKernel::sample(&s, 0.1, usize::MAX, 1e-12),
            Err(Error::UnderResolvedKernel { .. })
        ));
    }
}

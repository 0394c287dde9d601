//! Linearized growth rate `a(x)` and the KPP reaction `f(x, s) = s (a(x) - kappa s)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_param, Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GrowthFamily {
    /// `max(a0 - b |x|^2, a_min)`
    Bump { a0: f64, b: f64, a_min: f64 },
    /// `inside` on `|x| <= core_radius`, `outside` beyond `core_radius + ramp`,
    /// linear in between.
    Plateau {
        inside: f64,
        outside: f64,
        core_radius: f64,
        #[serde(default)]
        ramp: f64,
    },
    /// Spatially uniform rate (torus validation).
    Constant { value: f64 },
    /// Piecewise-linear radial profile, constant beyond the last sample.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

/// Decay data of `a` at infinity: `a <= -nu` outside `core_radius` and
/// `a <= -nu/2` outside `half_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hostility {
    pub nu: f64,
    pub core_radius: f64,
    pub half_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    family: GrowthFamily,
}

impl GrowthProfile {
    pub fn new(family: GrowthFamily) -> Result<Self> {
        match &family {
            GrowthFamily::Bump { a0, b, a_min } => {
                ensure_param(a0.is_finite() && a_min.is_finite(), "a0", "must be finite")?;
                ensure_param(b.is_finite() && *b > 0.0, "b", "curvature must be positive")?;
                ensure_param(a_min < a0, "a_min", "floor must lie below the peak")?;
            }
            GrowthFamily::Plateau {
                inside,
                outside,
                core_radius,
                ramp,
            } => {
                ensure_param(inside.is_finite() && outside.is_finite(), "inside", "must be finite")?;
                ensure_param(*core_radius >= 0.0, "core_radius", "must be non-negative")?;
                ensure_param(*ramp >= 0.0, "ramp", "must be non-negative")?;
            }
            GrowthFamily::Constant { value } => {
                ensure_param(value.is_finite(), "value", "must be finite")?;
            }
            GrowthFamily::Tabulated { radii, values } => {
                ensure_param(
                    radii.len() == values.len() && !radii.is_empty(),
                    "radii",
                    "needs matching non-empty radii and values",
                )?;
                ensure_param(
                    radii.windows(2).all(|w| w[1] > w[0]) && radii[0] >= 0.0,
                    "radii",
                    "must be non-negative and strictly increasing",
                )?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "values",
                        reason: "non-finite growth sample".into(),
                    });
                }
            }
        }
        Ok(GrowthProfile { family })
    }

    pub fn bump(a0: f64, b: f64, a_min: f64) -> Self {
        GrowthProfile::new(GrowthFamily::Bump { a0, b, a_min }).expect("valid bump")
    }

    pub fn plateau(inside: f64, outside: f64, core_radius: f64) -> Self {
        GrowthProfile::new(GrowthFamily::Plateau {
            inside,
            outside,
            core_radius,
            ramp: 0.0,
        })
        .expect("valid plateau")
    }

    pub fn constant(value: f64) -> Self {
        GrowthProfile::new(GrowthFamily::Constant { value }).expect("valid constant")
    }

    pub fn family(&self) -> &GrowthFamily {
        &self.family
    }

    pub fn value_radial(&self, r: f64) -> f64 {
        match &self.family {
            GrowthFamily::Bump { a0, b, a_min } => (a0 - b * r * r).max(*a_min),
            GrowthFamily::Plateau {
                inside,
                outside,
                core_radius,
                ramp,
            } => {
                if r <= *core_radius {
                    *inside
                } else if r >= core_radius + ramp {
                    *outside
                } else {
                    let t = (r - core_radius) / ramp;
                    inside + t * (outside - inside)
                }
            }
            GrowthFamily::Constant { value } => *value,
            GrowthFamily::Tabulated { radii, values } => {
                let last = radii.len() - 1;
                if r <= radii[0] {
                    values[0]
                } else if r >= radii[last] {
                    values[last]
                } else {
                    let idx = radii.partition_point(|&x| x <= r);
                    let t = (r - radii[idx - 1]) / (radii[idx] - radii[idx - 1]);
                    values[idx - 1] * (1.0 - t) + values[idx] * t
                }
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_radial(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Analytic supremum of `a` over the whole space.
    pub fn sup(&self) -> f64 {
        match &self.family {
            GrowthFamily::Bump { a0, .. } => *a0,
            GrowthFamily::Plateau { inside, outside, .. } => inside.max(*outside),
            GrowthFamily::Constant { value } => *value,
            GrowthFamily::Tabulated { values, .. } => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `a` composed with the dilation `x -> x / eps`.
    pub fn dilated(&self, eps: f64) -> DilatedGrowth<'_> {
        DilatedGrowth { base: self, eps }
    }

    /// The hostile-exterior data, or `None` when `a` does not become
    /// uniformly negative at infinity.
    pub fn hostility(&self) -> Option<Hostility> {
        match &self.family {
            GrowthFamily::Bump { a0, b, a_min } => {
                if *a_min >= 0.0 {
                    return None;
                }
                let nu = -a_min;
                Some(Hostility {
                    nu,
                    core_radius: ((a0 - a_min) / b).max(0.0).sqrt(),
                    half_radius: ((a0 + 0.5 * nu) / b).max(0.0).sqrt(),
                })
            }
            GrowthFamily::Plateau {
                inside,
                outside,
                core_radius,
                ramp,
            } => {
                if *outside >= 0.0 {
                    return None;
                }
                let nu = -outside;
                let half = if *inside <= -0.5 * nu {
                    0.0
                } else if *ramp == 0.0 {
                    *core_radius
                } else {
                    core_radius + ramp * (inside + 0.5 * nu) / (inside - outside)
                };
                Some(Hostility {
                    nu,
                    core_radius: core_radius + ramp,
                    half_radius: half,
                })
            }
            GrowthFamily::Constant { value } => (*value < 0.0).then_some(Hostility {
                nu: -value,
                core_radius: 0.0,
                half_radius: 0.0,
            }),
            GrowthFamily::Tabulated { radii, values } => {
                let nu = -values[values.len() - 1];
                if nu <= 0.0 {
                    return None;
                }
                let last_above = |level: f64| {
                    values
                        .iter()
                        .rposition(|&v| v > level)
                        .map(|k| radii[(k + 1).min(radii.len() - 1)])
                        .unwrap_or(0.0)
                };
                Some(Hostility {
                    nu,
                    core_radius: last_above(-nu),
                    half_radius: last_above(-0.5 * nu),
                })
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(|x| self.value(x))
    }
}

pub struct DilatedGrowth<'a> {
    base: &'a GrowthProfile,
    eps: f64,
}

impl DilatedGrowth<'_> {
    pub fn value(&self, x: &[f64]) -> f64 {
        let scaled: Vec<f64> = x.iter().map(|v| v / self.eps).collect();
        self.base.value(&scaled)
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(|x| self.value(x))
    }
}

/// Logistic KPP reaction `f(x, s) = s (a(x) - kappa s)` with saturation
/// level `S(x) = a(x)^+ / kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub crowding: f64,
}

impl Default for Reaction {
    fn default() -> Self {
        Reaction { crowding: 1.0 }
    }
}

impl Reaction {
    pub fn new(crowding: f64) -> Result<Self> {
        ensure_param(crowding.is_finite() && crowding > 0.0, "crowding", "must be positive")?;
        Ok(Reaction { crowding })
    }

    #[inline]
    pub fn value(&self, a: f64, s: f64) -> f64 {
        s * (a - self.crowding * s)
    }

    #[inline]
    pub fn derivative(&self, a: f64, s: f64) -> f64 {
        a - 2.0 * self.crowding * s
    }

    /// `f(x, s) / s`, strictly decreasing in `s`.
    #[inline]
    pub fn per_capita(&self, a: f64, s: f64) -> f64 {
        a - self.crowding * s
    }

    #[inline]
    pub fn saturation(&self, a: f64) -> f64 {
        a.max(0.0) / self.crowding
    }

    pub fn sup_saturation(&self, a: &[f64]) -> f64 {
        a.iter().map(|&v| self.saturation(v)).fold(0.0, f64::max)
    }

    /// `sup |d_s f|` over the grid values of `a` and `s in [0, s_max]`.
    pub fn lipschitz(&self, a: &[f64], s_max: f64) -> f64 {
        let (lo, hi) = a
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let top = 2.0 * self.crowding * s_max;
        [lo.abs(), hi.abs(), (lo - top).abs(), (hi - top).abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile_and_hostility() {
        let g = GrowthProfile::bump(1.0, 1.0, -3.0);
        assert_eq!(g.value(&[0.0]), 1.0);
        assert_eq!(g.value(&[1.5]), 1.0 - 2.25);
        assert_eq!(g.value(&[5.0]), -3.0);
        let h = g.hostility().unwrap();
        assert_eq!(h.nu, 3.0);
        assert!((h.core_radius - 2.0).abs() < 1e-15);
        assert!(g.value_radial(h.half_radius + 1e-9) <= -1.5 + 1e-8);
    }

    #[test]
    fn plateau_without_hostile_exterior() {
        let g = GrowthProfile::plateau(1.0, 0.5, 1.0);
        assert!(g.hostility().is_none());
        let g = GrowthProfile::plateau(1.0, -1.0, 2.0);
        assert_eq!(g.hostility().unwrap().half_radius, 2.0);
    }

    #[test]
    fn kpp_structure() {
        let f = Reaction::default();
        let a = 0.7;
        assert_eq!(f.value(a, 0.0), 0.0);
        let ratios: Vec<f64> = (1..10).map(|k| f.per_capita(a, 0.1 * k as f64)).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        assert!(f.value(a, f.saturation(a)) <= 0.0);
        assert_eq!(f.lipschitz(&[-3.0, 1.0], 1.0), 5.0);
    }
}

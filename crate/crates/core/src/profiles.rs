//! Compactly supported magnetic field profiles.
//!
//! A [`FieldProfile`] is a finite superposition of [`Shape`]s living either
//! on the line (`B(x)`) or as a radially symmetric field in the plane
//! (`B(r)`). Every shape vanishes identically outside its support, so the
//! asymptotic formulas for the potential hold exactly past the support.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::quadrature::{integrate, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    #[default]
    Line,
    #[serde(alias = "radial")]
    RadialPlane,
}

impl Dimension {
    pub fn as_str(&self) -> &'static str {
        match self {
            Dimension::Line => "line",
            Dimension::RadialPlane => "radial-plane",
        }
    }
}

/// One compactly supported building block. Coordinates are `x` on the line
/// and `r` in the radial plane; radial shapes are centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `B0` on the closed interval `|x - c| <= a`.
    Box {
        amplitude: f64,
        half_width: f64,
        center: f64,
    },
    /// `B0 (exp(-u²/2σ²) - exp(-cut²/2σ²))` for `|u| < cut`, `u = x - c`,
    /// shifted so it reaches zero continuously at the cutoff.
    TruncatedGaussian {
        amplitude: f64,
        sigma: f64,
        cutoff: f64,
        center: f64,
    },
    /// `B0 (1 - (u/a)²)³` for `|u| < a`; C² at the edges.
    Bump {
        amplitude: f64,
        half_width: f64,
        center: f64,
    },
    /// Linear interpolation through `(x, B)` breakpoints, zero outside.
    PiecewiseLinear { points: Vec<(f64, f64)> },
}

impl Shape {
    fn support(&self) -> (f64, f64) {
        match self {
            Shape::Box {
                half_width, center, ..
            }
            | Shape::Bump {
                half_width, center, ..
            } => (center - half_width, center + half_width),
            Shape::TruncatedGaussian { cutoff, center, .. } => (center - cutoff, center + cutoff),
            Shape::PiecewiseLinear { points } => (points[0].0, points[points.len() - 1].0),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Shape::Box {
                amplitude,
                half_width,
                center,
            } => {
                if (x - center).abs() <= *half_width {
                    *amplitude
                } else {
                    0.0
                }
            }
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                center,
            } => {
                let u = x - center;
                if u.abs() < *cutoff {
                    let s2 = 2.0 * sigma * sigma;
                    amplitude * ((-u * u / s2).exp() - (-cutoff * cutoff / s2).exp())
                } else {
                    0.0
                }
            }
            Shape::Bump {
                amplitude,
                half_width,
                center,
            } => {
                let t = (x - center) / half_width;
                if t.abs() < 1.0 {
                    let s = 1.0 - t * t;
                    amplitude * s * s * s
                } else {
                    0.0
                }
            }
            Shape::PiecewiseLinear { points } => {
                let (lo, hi) = (points[0].0, points[points.len() - 1].0);
                if x < lo || x > hi {
                    return 0.0;
                }
                let i = points
                    .partition_point(|p| p.0 <= x)
                    .clamp(1, points.len() - 1);
                let (x0, b0) = points[i - 1];
                let (x1, b1) = points[i];
                if x == x1 {
                    return b1;
                }
                b0 + (b1 - b0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn kinks(&self, out: &mut Vec<f64>) {
        match self {
            Shape::PiecewiseLinear { points } => out.extend(points.iter().map(|p| p.0)),
            _ => {
                let (lo, hi) = self.support();
                out.push(lo);
                out.push(hi);
            }
        }
    }

    fn scaled(&self, c: f64) -> Shape {
        match self.clone() {
            Shape::Box {
                amplitude,
                half_width,
                center,
            } => Shape::Box {
                amplitude: c * amplitude,
                half_width,
                center,
            },
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                center,
            } => Shape::TruncatedGaussian {
                amplitude: c * amplitude,
                sigma,
                cutoff,
                center,
            },
            Shape::Bump {
                amplitude,
                half_width,
                center,
            } => Shape::Bump {
                amplitude: c * amplitude,
                half_width,
                center,
            },
            Shape::PiecewiseLinear { points } => Shape::PiecewiseLinear {
                points: points.into_iter().map(|(x, b)| (x, c * b)).collect(),
            },
        }
    }

    fn max_abs(&self) -> f64 {
        match self {
            Shape::Box { amplitude, .. } | Shape::Bump { amplitude, .. } => amplitude.abs(),
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                ..
            } => amplitude.abs() * (1.0 - (-cutoff * cutoff / (2.0 * sigma * sigma)).exp()),
            Shape::PiecewiseLinear { points } => {
                points.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
            }
        }
    }

    /// `∫ B dx` over the line.
    fn line_flux(&self) -> f64 {
        match self {
            Shape::Box {
                amplitude,
                half_width,
                ..
            } => 2.0 * half_width * amplitude,
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                ..
            } => {
                let tail = (-cutoff * cutoff / (2.0 * sigma * sigma)).exp();
                amplitude
                    * (sigma * (2.0 * PI).sqrt() * libm::erf(cutoff / (sigma * 2f64.sqrt()))
                        - 2.0 * cutoff * tail)
            }
            Shape::Bump {
                amplitude,
                half_width,
                ..
            } => 32.0 / 35.0 * half_width * amplitude,
            Shape::PiecewiseLinear { points } => points
                .windows(2)
                .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                .sum(),
        }
    }

    /// `2π ∫ B(r) r dr` over the plane.
    fn radial_flux(&self) -> f64 {
        let radial = match self {
            Shape::Box {
                amplitude,
                half_width,
                ..
            } => 0.5 * amplitude * half_width * half_width,
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                ..
            } => {
                let s2 = sigma * sigma;
                let tail = (-cutoff * cutoff / (2.0 * s2)).exp();
                amplitude * (s2 * (1.0 - tail) - 0.5 * cutoff * cutoff * tail)
            }
            Shape::Bump {
                amplitude,
                half_width,
                ..
            } => amplitude * half_width * half_width / 8.0,
            Shape::PiecewiseLinear { points } => points
                .windows(2)
                .map(|w| {
                    let ((r1, b1), (r2, b2)) = (w[0], w[1]);
                    (r2 - r1) / 6.0 * (b1 * (2.0 * r1 + r2) + b2 * (r1 + 2.0 * r2))
                })
                .sum(),
        };
        2.0 * PI * radial
    }
}

/// A magnetic field with exact compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    dimension: Dimension,
    terms: Vec<Shape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxMethod {
    Analytic,
    Quadrature,
}

/// `Q = ∫ B dx` on the line or `Φ = ∫ B d²r` in the plane (ħ = e = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flux {
    pub value: f64,
    pub method: FluxMethod,
}

impl FieldProfile {
    pub fn new(dimension: Dimension, shape: Shape) -> Result<Self> {
        validate(dimension, &shape)?;
        Ok(FieldProfile {
            dimension,
            terms: vec![shape],
        })
    }

    pub fn line(shape: Shape) -> Result<Self> {
        FieldProfile::new(Dimension::Line, shape)
    }

    pub fn radial(shape: Shape) -> Result<Self> {
        FieldProfile::new(Dimension::RadialPlane, shape)
    }

    /// `box(B0, a)` centred at the origin on the line.
    pub fn box_profile(amplitude: f64, half_width: f64) -> Result<Self> {
        FieldProfile::line(Shape::Box {
            amplitude,
            half_width,
            center: 0.0,
        })
    }

    /// Uniform disc of radius `radius` in the plane.
    pub fn disc(amplitude: f64, radius: f64) -> Result<Self> {
        FieldProfile::radial(Shape::Box {
            amplitude,
            half_width: radius,
            center: 0.0,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn terms(&self) -> &[Shape] {
        &self.terms
    }

    /// Pointwise sum of two profiles of the same dimension.
    pub fn superpose(&self, other: &FieldProfile) -> Result<FieldProfile> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension.as_str(),
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(FieldProfile {
            dimension: self.dimension,
            terms,
        })
    }

    /// The profile multiplied pointwise by `c`.
    pub fn scaled(&self, c: f64) -> FieldProfile {
        FieldProfile {
            dimension: self.dimension,
            terms: self.terms.iter().map(|s| s.scaled(c)).collect(),
        }
    }

    /// Closed support `[s_lo, s_hi]`; radial profiles report `[0, R]`.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self
            .terms
            .iter()
            .map(Shape::support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| {
                (l.min(a), h.max(b))
            });
        match self.dimension {
            Dimension::Line => (lo, hi),
            Dimension::RadialPlane => (0.0, hi),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|s| s.eval(x)).sum()
    }

    /// Points where the field or one of its low derivatives is not smooth;
    /// used as forced quadrature nodes. Sorted, deduplicated.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for s in &self.terms {
            s.kinks(&mut out);
        }
        if self.dimension == Dimension::RadialPlane {
            out.retain(|&r| r > 0.0);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Upper bound on `max |B|` (exact for single shapes).
    pub fn max_abs(&self) -> f64 {
        if self.terms.len() == 1 {
            return self.terms[0].max_abs();
        }
        self.terms.iter().map(Shape::max_abs).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    finite(field, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be positive, got {v}")))
    }
}

fn validate(dimension: Dimension, shape: &Shape) -> Result<()> {
    let radial_center = |c: f64| -> Result<()> {
        finite("center", c)?;
        if dimension == Dimension::RadialPlane && c != 0.0 {
            return Err(Error::param(
                "center",
                "radial profiles are centred at r = 0",
            ));
        }
        Ok(())
    };
    match shape {
        Shape::Box {
            amplitude,
            half_width,
            center,
        }
        | Shape::Bump {
            amplitude,
            half_width,
            center,
        } => {
            finite("amplitude", *amplitude)?;
            positive("half_width", *half_width)?;
            radial_center(*center)
        }
        Shape::TruncatedGaussian {
            amplitude,
            sigma,
            cutoff,
            center,
        } => {
            finite("amplitude", *amplitude)?;
            positive("sigma", *sigma)?;
            positive("cutoff", *cutoff)?;
            radial_center(*center)
        }
        Shape::PiecewiseLinear { points } => {
            if points.len() < 2 {
                return Err(Error::param("points", "need at least two breakpoints"));
            }
            for (x, b) in points {
                finite("points", *x)?;
                finite("points", *b)?;
            }
            if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::param(
                    "points",
                    "breakpoints must be strictly increasing",
                ));
            }
            if dimension == Dimension::RadialPlane && points[0].0 < 0.0 {
                return Err(Error::param(
                    "points",
                    "radial breakpoints must be non-negative",
                ));
            }
            Ok(())
        }
    }
}

/// Profile description as it appears in run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Box {
        amplitude: f64,
        #[serde(alias = "radius")]
        half_width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        dimension: Dimension,
    },
    TruncatedGaussian {
        amplitude: f64,
        sigma: f64,
        cutoff: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        dimension: Dimension,
    },
    Bump {
        amplitude: f64,
        #[serde(alias = "radius")]
        half_width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        dimension: Dimension,
    },
    PiecewiseLinear {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        dimension: Dimension,
    },
}

/// Validate a profile description and build the profile.
pub fn make_profile(desc: &ProfileSpec) -> Result<FieldProfile> {
    let (dimension, shape) = match desc.clone() {
        ProfileSpec::Box {
            amplitude,
            half_width,
            center,
            dimension,
        } => (
            dimension,
            Shape::Box {
                amplitude,
                half_width,
                center,
            },
        ),
        ProfileSpec::TruncatedGaussian {
            amplitude,
            sigma,
            cutoff,
            center,
            dimension,
        } => (
            dimension,
            Shape::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
                center,
            },
        ),
        ProfileSpec::Bump {
            amplitude,
            half_width,
            center,
            dimension,
        } => (
            dimension,
            Shape::Bump {
                amplitude,
                half_width,
                center,
            },
        ),
        ProfileSpec::PiecewiseLinear { points, dimension } => (
            dimension,
            Shape::PiecewiseLinear {
                points: points.into_iter().map(|[x, b]| (x, b)).collect(),
            },
        ),
    };
    FieldProfile::new(dimension, shape)
}

/// Total flux from the closed forms of the constituent shapes.
pub fn total_flux(profile: &FieldProfile) -> Flux {
    let value = match profile.dimension {
        Dimension::Line => profile.terms.iter().map(Shape::line_flux).sum(),
        Dimension::RadialPlane => profile.terms.iter().map(Shape::radial_flux).sum(),
    };
    Flux {
        value,
        method: FluxMethod::Analytic,
    }
}

/// Total flux by adaptive quadrature with kinks as subdivision seeds.
pub fn quadrature_flux(profile: &FieldProfile, cfg: &Quadrature) -> Result<Flux> {
    let (lo, hi) = profile.support();
    let kinks = profile.kinks();
    let value = match profile.dimension {
        Dimension::Line => integrate(|x| profile.eval(x), lo, hi, &kinks, cfg)?.value,
        Dimension::RadialPlane => {
            2.0 * PI * integrate(|r| profile.eval(r) * r, 0.0, hi, &kinks, cfg)?.value
        }
    };
    Ok(Flux {
        value,
        method: FluxMethod::Quadrature,
    })
}

/// Pointwise samples on the grid; exact zeros outside the support.
pub fn sample(profile: &FieldProfile, grid: &Grid1D) -> Vec<f64> {
    grid.points().map(|x| profile.eval(x)).collect()
}

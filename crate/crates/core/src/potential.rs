//! Scalar potentials from Green-function convolution.
//!
//! On the line `λ_k(x) = ∫ ½|x - x'| B(x') dx' + k x`, whose second
//! derivative is `B`. Past the support `λ_k` is exactly affine with slopes
//! `k - Q/2` (left) and `k + Q/2` (right). In the plane only radial fields
//! are treated; the azimuthal average of the logarithmic kernel gives
//! `λ(r) = ∫ B(r') r' ln max(r, r') dr'`, which is `(Φ/2π) ln r` past the
//! support (with the length scale `r0 = 1`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profiles::{total_flux, Dimension, FieldProfile, Flux};
use crate::quadrature::{integrate, Quadrature};

/// Minimum distance between the support and either grid end.
pub const MIN_PADDING: f64 = 5.0;

/// Number of e-folds a normalizable mode must decay before truncation.
pub const TAIL_DECAY_EFOLDS: f64 = 30.0;

/// Padding required on a side where the exponent of a mode changes at rate
/// `slope`: `max(5, 30 / |slope|)`. A zero slope requires infinite padding.
pub fn required_padding(slope: f64) -> f64 {
    if slope == 0.0 {
        f64::INFINITY
    } else {
        MIN_PADDING.max(TAIL_DECAY_EFOLDS / slope.abs())
    }
}

/// Check that the grid extends `left` and `right` beyond the support.
pub fn check_padding(profile: &FieldProfile, grid: &Grid1D, left: f64, right: f64) -> Result<()> {
    // Grids built as `support ± padding` land within rounding of the bound.
    const SLACK: f64 = 1e-9;
    let (lo, hi) = profile.support();
    let have_left = lo - grid.x_lo();
    if have_left + SLACK < left {
        return Err(Error::InsufficientPadding {
            side: "left",
            have: have_left,
            required: left,
        });
    }
    let have_right = grid.x_hi() - hi;
    if have_right + SLACK < right {
        return Err(Error::InsufficientPadding {
            side: "right",
            have: have_right,
            required: right,
        });
    }
    Ok(())
}

fn require_line(profile: &FieldProfile) -> Result<()> {
    match profile.dimension() {
        Dimension::Line => Ok(()),
        Dimension::RadialPlane => Err(Error::DimensionMismatch { expected: "line" }),
    }
}

fn require_radial(profile: &FieldProfile) -> Result<()> {
    match profile.dimension() {
        Dimension::RadialPlane => Ok(()),
        Dimension::Line => Err(Error::DimensionMismatch {
            expected: "radial-plane",
        }),
    }
}

/// `λ_k` sampled on a grid, with its exact asymptotic slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPotential {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub k: f64,
    pub flux: Flux,
    /// `k - Q/2`, the slope for `x <= s_lo`.
    pub slope_left: f64,
    /// `k + Q/2`, the slope for `x >= s_hi`.
    pub slope_right: f64,
}

impl ScalarPotential {
    /// The same potential with the linear coefficient replaced by `k`.
    pub fn with_k(&self, k: f64) -> ScalarPotential {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, v)| (v - self.k * x) + k * x)
            .collect();
        ScalarPotential {
            grid: self.grid,
            values,
            k,
            flux: self.flux,
            slope_left: k - 0.5 * self.flux.value,
            slope_right: k + 0.5 * self.flux.value,
        }
    }
}

/// The convolution `∫ ½|x - x'| B(x') dx'` at a single point.
pub fn green_convolution(profile: &FieldProfile, x: f64, cfg: &Quadrature) -> Result<f64> {
    let (lo, hi) = profile.support();
    let mut nodes = profile.kinks();
    nodes.push(x);
    let r = integrate(
        |xp| 0.5 * (x - xp).abs() * profile.eval(xp),
        lo,
        hi,
        &nodes,
        cfg,
    )?;
    Ok(r.value)
}

/// `λ_k(x_i) = ∫ ½|x_i - x'| B(x') dx' + k x_i` on every grid point.
pub fn lambda_1d(profile: &FieldProfile, k: f64, grid: &Grid1D) -> Result<ScalarPotential> {
    lambda_1d_with(profile, k, grid, &Quadrature::fine())
}

pub fn lambda_1d_with(
    profile: &FieldProfile,
    k: f64,
    grid: &Grid1D,
    cfg: &Quadrature,
) -> Result<ScalarPotential> {
    require_line(profile)?;
    if !k.is_finite() {
        return Err(Error::param("k", "must be finite"));
    }
    check_padding(profile, grid, MIN_PADDING, MIN_PADDING)?;
    let flux = total_flux(profile);
    let values = grid
        .points()
        .map(|x| green_convolution(profile, x, cfg).map(|g| g + k * x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarPotential {
        grid: *grid,
        values,
        k,
        flux,
        slope_left: k - 0.5 * flux.value,
        slope_right: k + 0.5 * flux.value,
    })
}

/// `dλ/dx = shift + ∫ ½ sign(x - x') B(x') dx'` at every grid point, i.e.
/// the Landau-gauge `A_y` of the potential with linear coefficient `shift`.
pub fn vector_potential(
    profile: &FieldProfile,
    shift: f64,
    grid: &Grid1D,
    cfg: &Quadrature,
) -> Result<Vec<f64>> {
    require_line(profile)?;
    grid.points()
        .map(|x| sign_convolution(profile, x, cfg).map(|v| v + shift))
        .collect()
}

/// `∫ ½ sign(x - z) f(z) dz` for a compactly supported `f`.
fn sign_convolution(profile: &FieldProfile, x: f64, cfg: &Quadrature) -> Result<f64> {
    let (lo, hi) = profile.support();
    let kinks = profile.kinks();
    let clamped = x.clamp(lo, hi);
    let below = integrate(|z| profile.eval(z), lo, clamped, &kinks, cfg)?.value;
    let above = integrate(|z| profile.eval(z), clamped, hi, &kinks, cfg)?.value;
    Ok(0.5 * (below - above))
}

/// Max over interior points of `|δ²λ/h² - B|`, skipping points within
/// `kink_margin` of a kink of the profile.
pub fn poisson_residual(
    pot: &ScalarPotential,
    profile: &FieldProfile,
    kink_margin: f64,
) -> Result<f64> {
    require_line(profile)?;
    if pot.values.len() != pot.grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values on a {}-point grid",
            pot.values.len(),
            pot.grid.len()
        )));
    }
    let h = pot.grid.h();
    let kinks = profile.kinks();
    let mut worst: f64 = 0.0;
    for i in 1..pot.grid.len() - 1 {
        let x = pot.grid.x(i);
        if kinks.iter().any(|&c| (x - c).abs() < kink_margin) {
            continue;
        }
        let lap = (pot.values[i + 1] - 2.0 * pot.values[i] + pot.values[i - 1]) / (h * h);
        worst = worst.max((lap - profile.eval(x)).abs());
    }
    Ok(worst)
}

/// Radial `λ(r)` for a radially symmetric planar field, `k₁ = k₂ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub flux: Flux,
}

impl RadialPotential {
    /// Coefficient `Φ/2π` of `ln r` past the support.
    pub fn log_coefficient(&self) -> f64 {
        self.flux.value / (2.0 * std::f64::consts::PI)
    }
}

fn radial_lambda_at(profile: &FieldProfile, r: f64, cfg: &Quadrature) -> Result<f64> {
    let (_, hi) = profile.support();
    let kinks = profile.kinks();
    let rc = r.min(hi);
    let enclosed = if r > 0.0 {
        r.ln() * integrate(|s| profile.eval(s) * s, 0.0, rc, &kinks, cfg)?.value
    } else {
        0.0
    };
    let outer = integrate(
        |s| {
            if s > 0.0 {
                profile.eval(s) * s * s.ln()
            } else {
                0.0
            }
        },
        rc,
        hi,
        &kinks,
        cfg,
    )?
    .value;
    Ok(enclosed + outer)
}

pub fn lambda_2d_radial(profile: &FieldProfile, radii: &Grid1D) -> Result<RadialPotential> {
    lambda_2d_radial_with(profile, radii, &Quadrature::fine())
}

pub fn lambda_2d_radial_with(
    profile: &FieldProfile,
    radii: &Grid1D,
    cfg: &Quadrature,
) -> Result<RadialPotential> {
    require_radial(profile)?;
    if radii.x_lo() < 0.0 {
        return Err(Error::InvalidGrid("radial grids start at r >= 0".into()));
    }
    let values = radii
        .points()
        .map(|r| radial_lambda_at(profile, r, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialPotential {
        grid: *radii,
        values,
        flux: total_flux(profile),
    })
}

/// Max over interior points with `r > 0` of `|λ'' + λ'/r - B|`.
pub fn radial_poisson_residual(
    pot: &RadialPotential,
    profile: &FieldProfile,
    kink_margin: f64,
) -> Result<f64> {
    require_radial(profile)?;
    if pot.values.len() != pot.grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values on a {}-point grid",
            pot.values.len(),
            pot.grid.len()
        )));
    }
    let h = pot.grid.h();
    let kinks = profile.kinks();
    let mut worst: f64 = 0.0;
    for i in 1..pot.grid.len() - 1 {
        let r = pot.grid.x(i);
        if r <= 0.0 || kinks.iter().any(|&c| (r - c).abs() < kink_margin) {
            continue;
        }
        let v = &pot.values;
        let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
        worst = worst.max((d2 + d1 / r - profile.eval(r)).abs());
    }
    Ok(worst)
}

/// Phase `α(x) = ½ ∫ sign(x - z) A_x(z) dz` removing `A_x` from the line
/// equations through `ψ → e^{-iα} ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePhase {
    pub grid: Grid1D,
    pub alpha_values: Vec<f64>,
}

impl GaugePhase {
    /// Multiply real samples of a solution of the reduced equations by
    /// `e^{-iα}`, giving a solution of the equations with `A_x` restored.
    pub fn dress(&self, psi: &[f64]) -> Vec<Complex64> {
        psi.iter()
            .zip(&self.alpha_values)
            .map(|(&p, &a)| Complex64::from_polar(1.0, -a) * p)
            .collect()
    }
}

pub fn alpha_gauge(ax_profile: &FieldProfile, grid: &Grid1D) -> Result<GaugePhase> {
    require_line(ax_profile)?;
    let cfg = Quadrature::fine();
    let alpha_values = grid
        .points()
        .map(|x| sign_convolution(ax_profile, x, &cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugePhase {
        grid: *grid,
        alpha_values,
    })
}

//! Zero-energy solutions and their normalizability.
//!
//! On the line the reduced equations are solved by `ψ_b = e^{-λ_k}` and
//! `ψ_a = e^{+λ_k}` for every linear coefficient `k`. Whether a member of
//! the family is square-integrable is decided from the exact asymptotic
//! slopes of `λ_k`; the sampled norm is only a consistency check. In the
//! plane, radial fields carry the family `z^j e^{-λ}` (or `(z*)^j e^{λ}`),
//! whose normalizability is decided by the power of `r` in the tail.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::potential::{
    check_padding, lambda_1d, lambda_2d_radial, required_padding, RadialPotential, ScalarPotential,
    MIN_PADDING,
};
use crate::profiles::{FieldProfile, Flux};
use crate::quadrature::simpson_samples;

/// Largest exponent for which `exp` is finite and normal.
const EXP_RANGE: f64 = 700.0;

/// Snap tolerance when flooring flux ratios that are integers in exact
/// arithmetic but not in floating point.
pub(crate) const FLOOR_SNAP: f64 = 1e-9;

pub(crate) fn snapped_floor(x: f64) -> f64 {
    (x + FLOOR_SNAP * x.abs().max(1.0)).floor()
}

/// Upper (`a`) or lower (`b`) spinor component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinSector {
    A,
    B,
    None,
}

impl SpinSector {
    /// `+1` for `a`, `-1` for `b`: the sign of `λ` in the mode exponent.
    pub fn gamma(&self) -> Option<i8> {
        match self {
            SpinSector::A => Some(1),
            SpinSector::B => Some(-1),
            SpinSector::None => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SpinSector::A => "a",
            SpinSector::B => "b",
            SpinSector::None => "none",
        }
    }

    /// Sector selected by the sign of the flux.
    pub fn from_flux(value: f64) -> SpinSector {
        if value > 0.0 {
            SpinSector::B
        } else if value < 0.0 {
            SpinSector::A
        } else {
            SpinSector::None
        }
    }
}

impl std::str::FromStr for SpinSector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(SpinSector::A),
            "b" => Ok(SpinSector::B),
            "none" => Ok(SpinSector::None),
            other => Err(Error::param(
                "sector",
                format!("expected a, b or none, got `{other}`"),
            )),
        }
    }
}

/// Open interval `(lo, hi)`; empty when `lo >= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn empty() -> Self {
        OpenInterval { lo: 0.0, hi: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// Sector hosting zero modes and the open window of admissible `k`:
/// `(b, (-Q/2, Q/2))` for `Q > 0`, `(a, (Q/2, -Q/2))` for `Q < 0`.
pub fn admissible_k_interval(flux: &Flux) -> (SpinSector, OpenInterval) {
    let q = flux.value;
    let sector = SpinSector::from_flux(q);
    let half = 0.5 * q.abs();
    match sector {
        SpinSector::None => (sector, OpenInterval::empty()),
        _ => (
            sector,
            OpenInterval {
                lo: -half,
                hi: half,
            },
        ),
    }
}

/// Slope test on the exponent `γ λ_k` of a mode: it must fall to `-∞` in
/// both directions.
pub fn decays_both_ways(slope_left: f64, slope_right: f64, sector: SpinSector) -> bool {
    match sector {
        SpinSector::B => slope_right > 0.0 && slope_left < 0.0,
        SpinSector::A => slope_right < 0.0 && slope_left > 0.0,
        SpinSector::None => false,
    }
}

/// A member `e^{γ λ_k}` of the line family.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    pub sector: SpinSector,
    pub k: f64,
    pub grid: Grid1D,
    /// `γ λ_k(x_i)`; the authoritative representation.
    pub log_values: Vec<f64>,
    /// `exp(log_values)`, `None` where the exponent is out of range.
    pub values: Vec<Option<f64>>,
    /// `ln ‖ψ‖₂`, finite only for normalizable modes.
    pub log_l2_norm: f64,
    pub normalizable: bool,
}

impl ZeroMode {
    /// `‖ψ‖₂`, or `None` when infinite or not representable.
    pub fn l2_norm(&self) -> Option<f64> {
        if !self.normalizable {
            return None;
        }
        let n = self.log_l2_norm.exp();
        n.is_finite().then_some(n)
    }
}

fn exp_in_range(v: f64) -> Option<f64> {
    (v.abs() <= EXP_RANGE).then(|| v.exp())
}

/// `ln ∫ e^{2 log ψ}` over the grid by composite Simpson, plus the exact
/// exponential tails past both grid ends. Shifted by the maximum so the
/// sum never overflows.
fn log_l2_norm(log_values: &[f64], h: f64, decay_left: f64, decay_right: f64) -> f64 {
    let m = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_values.iter().map(|&l| (2.0 * (l - m)).exp()).collect();
    let mut sq = simpson_samples(&weights, h);
    sq += weights[0] / (2.0 * decay_left);
    sq += weights[weights.len() - 1] / (2.0 * decay_right);
    m + 0.5 * sq.ln()
}

/// Build `e^{γ λ_k}` from an already computed potential.
pub fn mode_from_potential(pot: &ScalarPotential, sector: SpinSector) -> Result<ZeroMode> {
    let gamma = f64::from(sector.gamma().ok_or(Error::NoSector)?);
    let log_values: Vec<f64> = pot.values.iter().map(|&l| gamma * l).collect();
    let values = log_values.iter().map(|&l| exp_in_range(l)).collect();
    let normalizable = decays_both_ways(pot.slope_left, pot.slope_right, sector);
    let log_l2_norm = if normalizable {
        // Decay rates of log ψ past the left and right ends.
        let (dl, dr) = (gamma * pot.slope_left, -gamma * pot.slope_right);
        log_l2_norm(&log_values, pot.grid.h(), dl, dr)
    } else {
        f64::INFINITY
    };
    Ok(ZeroMode {
        sector,
        k: pot.k,
        grid: pot.grid,
        log_values,
        values,
        log_l2_norm,
        normalizable,
    })
}

/// Padding a normalizable mode needs on each side.
fn mode_padding(pot: &ScalarPotential, sector: SpinSector) -> (f64, f64) {
    if decays_both_ways(pot.slope_left, pot.slope_right, sector) {
        (
            required_padding(pot.slope_left),
            required_padding(pot.slope_right),
        )
    } else {
        (MIN_PADDING, MIN_PADDING)
    }
}

pub fn build_mode_1d(
    profile: &FieldProfile,
    k: f64,
    sector: SpinSector,
    grid: &Grid1D,
) -> Result<ZeroMode> {
    if sector == SpinSector::None {
        return Err(Error::NoSector);
    }
    let pot = lambda_1d(profile, k, grid)?;
    let (left, right) = mode_padding(&pot, sector);
    check_padding(profile, grid, left, right)?;
    mode_from_potential(&pot, sector)
}

/// Verdict for one `k` of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KVerdict {
    pub k: f64,
    pub normalizable: bool,
    pub l2_norm: Option<f64>,
}

/// Build the mode for every `k` in order; `λ_0` is computed once and
/// shifted by `k x`.
pub fn scan_k(
    profile: &FieldProfile,
    sector: SpinSector,
    k_list: &[f64],
    grid: &Grid1D,
) -> Result<Vec<KVerdict>> {
    if sector == SpinSector::None {
        return Err(Error::NoSector);
    }
    let base = lambda_1d(profile, 0.0, grid)?;
    k_list
        .par_iter()
        .map(|&k| {
            let pot = base.with_k(k);
            let (left, right) = mode_padding(&pot, sector);
            check_padding(profile, grid, left, right)?;
            let mode = mode_from_potential(&pot, sector)?;
            Ok(KVerdict {
                k,
                normalizable: mode.normalizable,
                l2_norm: mode.l2_norm(),
            })
        })
        .collect()
}

/// Number of normalizable planar zero modes for flux `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarCount {
    pub sector: SpinSector,
    /// Integer part of `|Φ|/2π`.
    pub n: u64,
    /// `Φ/2π` is an integer (within rounding): the strict tail test then
    /// admits one mode fewer than `n`.
    pub integer_flux: bool,
    /// Count by the strict tail test, `#{j >= 0 : 2j + 1 - |Φ|/π < -1}`.
    pub strict_count: u64,
}

pub fn count_2d_zero_modes(flux: &Flux) -> PlanarCount {
    let ratio = flux.value.abs() / (2.0 * PI);
    let n = snapped_floor(ratio).max(0.0) as u64;
    let integer_flux = ratio > 0.0 && (ratio - ratio.round()).abs() <= FLOOR_SNAP * ratio.max(1.0);
    // j < ratio - 1 strictly.
    let strict_count = if integer_flux {
        n.saturating_sub(1)
    } else {
        (ratio.ceil() as u64).saturating_sub(1)
    };
    PlanarCount {
        sector: SpinSector::from_flux(flux.value),
        n,
        integer_flux,
        strict_count,
    }
}

/// `|z^j e^{-λ}|` (or `|(z*)^j e^{λ}|`) for a radial field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode2D {
    pub j: u32,
    pub sector: SpinSector,
    pub grid: Grid1D,
    /// `j ln r + γ λ(r)`; `-∞` at the origin for `j > 0`.
    pub log_values: Vec<f64>,
    pub values: Vec<f64>,
    /// Power of `r` in the radial integrand `r |ψ|²` at infinity.
    pub tail_exponent: f64,
    /// Strict integrability, `tail_exponent < -1`.
    pub normalizable: bool,
    /// The integer-part rule `j < N`, `N = ⌊|Φ|/2π⌋`.
    pub counting_rule: bool,
}

impl Mode2D {
    /// The strict tail test and the integer-part rule disagree; only
    /// happens for integer `Φ/2π`.
    pub fn rules_disagree(&self) -> bool {
        self.normalizable != self.counting_rule
    }
}

pub fn mode_2d_from_potential(pot: &RadialPotential, j: u32) -> Mode2D {
    let phi = pot.flux.value;
    let sector = SpinSector::from_flux(phi);
    // A vanishing flux has no preferred sector; its modes are r^j, taken
    // with the b-sector sign convention.
    let gamma = f64::from(sector.gamma().unwrap_or(-1));
    let log_values: Vec<f64> = pot
        .grid
        .points()
        .zip(&pot.values)
        .map(|(r, &l)| {
            let radial = if j == 0 {
                0.0
            } else if r == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::from(j) * r.ln()
            };
            radial + gamma * l
        })
        .collect();
    let values = log_values.iter().map(|&l| l.exp()).collect();
    let tail_exponent = 2.0 * f64::from(j) + 1.0 - phi.abs() / PI;
    let count = count_2d_zero_modes(&pot.flux);
    Mode2D {
        j,
        sector,
        grid: pot.grid,
        log_values,
        values,
        tail_exponent,
        normalizable: tail_exponent < -1.0,
        counting_rule: u64::from(j) < count.n,
    }
}

pub fn build_mode_2d(profile: &FieldProfile, j: i64, radii: &Grid1D) -> Result<Mode2D> {
    if j < 0 {
        return Err(Error::param("j", format!("must be non-negative, got {j}")));
    }
    let j = u32::try_from(j).map_err(|_| Error::param("j", "too large"))?;
    let pot = lambda_2d_radial(profile, radii)?;
    Ok(mode_2d_from_potential(&pot, j))
}

/// Gaussian-integer polynomial in `(x, y)`: `coeffs[p][q]` multiplies
/// `x^p y^q` and is stored as `(re, im)`.
struct Poly {
    coeffs: Vec<Vec<(i128, i128)>>,
}

fn binomial(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * i128::from(n - i) / i128::from(i + 1))
}

/// `i^m` as a Gaussian integer.
fn i_pow(m: u32) -> (i128, i128) {
    match m % 4 {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    }
}

impl Poly {
    /// `(i x + y)^j` for the b sector, `(-i x + y)^j` for the a sector.
    fn power(j: u32, conjugate: bool) -> Poly {
        let d = j as usize;
        let mut coeffs = vec![vec![(0, 0); d + 1]; d + 1];
        for m in 0..=j {
            let (re, im) = i_pow(m);
            let im = if conjugate { -im } else { im };
            let c = binomial(j, m);
            coeffs[m as usize][(j - m) as usize] = (c * re, c * im);
        }
        Poly { coeffs }
    }

    fn d_dx(&self) -> Poly {
        let mut out = vec![vec![(0, 0); self.coeffs.len()]; self.coeffs.len()];
        for p in 1..self.coeffs.len() {
            for q in 0..self.coeffs.len() {
                let (re, im) = self.coeffs[p][q];
                out[p - 1][q] = (re * p as i128, im * p as i128);
            }
        }
        Poly { coeffs: out }
    }

    fn d_dy(&self) -> Poly {
        let mut out = vec![vec![(0, 0); self.coeffs.len()]; self.coeffs.len()];
        for p in 0..self.coeffs.len() {
            for q in 1..self.coeffs.len() {
                let (re, im) = self.coeffs[p][q];
                out[p][q - 1] = (re * q as i128, im * q as i128);
            }
        }
        Poly { coeffs: out }
    }

    /// `a·self + b·other` for Gaussian-integer scalars `a`, `b`.
    fn combine(&self, a: (i128, i128), other: &Poly, b: (i128, i128)) -> Poly {
        let mul = |(x, y): (i128, i128), (u, v): (i128, i128)| (x * u - y * v, x * v + y * u);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(r1, r2)| {
                r1.iter()
                    .zip(r2)
                    .map(|(&c1, &c2)| {
                        let (p, q) = (mul(a, c1), mul(b, c2));
                        (p.0 + q.0, p.1 + q.1)
                    })
                    .collect()
            })
            .collect();
        Poly { coeffs }
    }

    fn eval(&self, x: f64, y: f64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (p, row) in self.coeffs.iter().enumerate() {
            for (q, &(re, im)) in row.iter().enumerate() {
                if re != 0 || im != 0 {
                    let mono = x.powi(p as i32) * y.powi(q as i32);
                    acc += num_complex::Complex64::new(re as f64, im as f64) * mono;
                }
            }
        }
        acc
    }
}

/// Max modulus of the holomorphy operator applied to the sector's planar
/// polynomial: `(-i∂x - ∂y)(ix + y)^j` for `b`, `(-i∂x + ∂y)(-ix + y)^j`
/// for `a`. Differentiation is carried out on exact integer coefficients.
pub fn holomorphy_residual(j: u32, sector: SpinSector, points: &[(f64, f64)]) -> Result<f64> {
    let (poly, dy_sign) = match sector {
        SpinSector::B => (Poly::power(j, false), -1),
        SpinSector::A => (Poly::power(j, true), 1),
        SpinSector::None => return Err(Error::NoSector),
    };
    let op = poly.d_dx().combine((0, -1), &poly.d_dy(), (dy_sign, 0));
    Ok(points
        .iter()
        .map(|&(x, y)| op.eval(x, y).norm())
        .fold(0.0, f64::max))
}

//! Finite-difference Dirac operator for one Landau-gauge channel.
//!
//! In the real representation `(ψ_a, iψ_b)` the channel operator is
//! `H = [[0, M], [Mᵀ, 0]]` with `M = D + diag(W)` on the interior points,
//! `D` the central difference with Dirichlet truncation and
//! `W = k_y + A_y`. The b-sector zero mode `e^{-λ}` is annihilated by the
//! continuum `M`, the a-sector mode `e^{+λ}` by `Mᵀ`.
//!
//! The two components are interleaved (`a_i ↦ 2i`, `b_i ↦ 2i + 1`), which
//! makes `H` a symmetric band matrix of bandwidth 3 and lets the banded
//! solver in [`crate::linalg`] diagonalise it in `O(n²)`.
//!
//! `M` is square, so `dim ker M = dim ker Mᵀ`: every discrete b-mode comes
//! with an a-sector partner `P v`, `P = diag((-1)^i)`, obtained from the
//! identity `Mᵀ P = P M`. The staggered partner has no continuum limit, so
//! [`count_near_zero`] reports the number of near-zero singular values of
//! `M`, which is half the number of near-zero eigenvalues of `H`.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::linalg::BandedSymmetric;
use crate::potential::{check_padding, required_padding, vector_potential, MIN_PADDING};
use crate::profiles::{total_flux, FieldProfile};
use crate::quadrature::Quadrature;
use crate::zeromodes::{admissible_k_interval, SpinSector, ZeroMode};

/// Default cap on interior points per channel.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// `A_y` of the unshifted potential on a grid, shared by all channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBasis {
    profile: FieldProfile,
    grid: Grid1D,
    interior: Grid1D,
    a_y: Vec<f64>,
    cap: usize,
}

impl ChannelBasis {
    pub fn new(profile: &FieldProfile, grid: &Grid1D, cap: usize) -> Result<Self> {
        Self::with_quadrature(profile, grid, cap, &Quadrature::fine())
    }

    pub fn with_quadrature(
        profile: &FieldProfile,
        grid: &Grid1D,
        cap: usize,
        cfg: &Quadrature,
    ) -> Result<Self> {
        let interior_n = grid.len().saturating_sub(2);
        if interior_n > cap {
            return Err(Error::SolverCapExceeded {
                interior: interior_n,
                cap,
            });
        }
        if interior_n < 2 {
            return Err(Error::InvalidGrid(
                "need at least two interior points".into(),
            ));
        }
        check_padding(profile, grid, MIN_PADDING, MIN_PADDING)?;
        let interior = Grid1D::new(grid.x(1), grid.x(grid.len() - 2), interior_n)?;
        let a_y = vector_potential(profile, 0.0, &interior, cfg)?;
        Ok(ChannelBasis {
            profile: profile.clone(),
            grid: *grid,
            interior,
            a_y,
            cap,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Operator for channel `k_y`; the grid must satisfy the padding rule
    /// for the channel's asymptotic slopes `k_y ∓ Q/2` when it is
    /// admissible.
    pub fn channel(&self, k_y: f64) -> Result<DiracOperator> {
        if !k_y.is_finite() {
            return Err(Error::param("ky", "must be finite"));
        }
        let q = total_flux(&self.profile).value;
        let (sector, window) = admissible_k_interval(&total_flux(&self.profile));
        if sector != SpinSector::None && window.contains(k_y) {
            check_padding(
                &self.profile,
                &self.grid,
                required_padding(k_y - 0.5 * q),
                required_padding(k_y + 0.5 * q),
            )?;
        }
        let w_values: Vec<f64> = self.a_y.iter().map(|a| a + k_y).collect();
        Ok(DiracOperator::assemble(
            self.grid,
            self.interior,
            w_values,
            k_y,
            (k_y - 0.5 * q, k_y + 0.5 * q),
        ))
    }

    pub fn cap(&self) -> usize {
        self.cap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracOperator {
    /// Full grid including the two Dirichlet boundary points.
    pub outer: Grid1D,
    /// Interior points carrying unknowns.
    pub grid: Grid1D,
    pub w_values: Vec<f64>,
    pub channel_ky: f64,
    /// `W` past the support on the left and right.
    pub w_asymptotes: (f64, f64),
    /// Interleaved `H`, bandwidth 3.
    pub matrix: BandedSymmetric,
}

impl DiracOperator {
    fn assemble(
        outer: Grid1D,
        grid: Grid1D,
        w_values: Vec<f64>,
        channel_ky: f64,
        w_asymptotes: (f64, f64),
    ) -> Self {
        let n = grid.len();
        let c = 0.5 / grid.h();
        let mut matrix = BandedSymmetric::zeros(2 * n, 3);
        for i in 0..n {
            // H[a_i][b_i] = W_i, H[a_i][b_{i+1}] = c, H[a_i][b_{i-1}] = -c.
            matrix.set(2 * i + 1, 2 * i, w_values[i]);
            if i + 1 < n {
                matrix.set(2 * i + 3, 2 * i, c);
            }
            if i > 0 {
                matrix.set(2 * i, 2 * i - 1, -c);
            }
        }
        DiracOperator {
            outer,
            grid,
            w_values,
            channel_ky,
            w_asymptotes,
            matrix,
        }
    }

    pub fn interior_len(&self) -> usize {
        self.grid.len()
    }

    /// Entry `M[i][j]` of the off-diagonal block.
    pub fn m_entry(&self, i: usize, j: usize) -> f64 {
        let c = 0.5 / self.grid.h();
        if i == j {
            self.w_values[i]
        } else if j == i + 1 {
            c
        } else if i == j + 1 {
            -c
        } else {
            0.0
        }
    }

    /// `M v`.
    pub fn apply_m(&self, v: &[f64]) -> Vec<f64> {
        let n = self.interior_len();
        let c = 0.5 / self.grid.h();
        (0..n)
            .map(|i| {
                let mut s = self.w_values[i] * v[i];
                if i + 1 < n {
                    s += c * v[i + 1];
                }
                if i > 0 {
                    s -= c * v[i - 1];
                }
                s
            })
            .collect()
    }

    /// `Mᵀ v`.
    pub fn apply_mt(&self, v: &[f64]) -> Vec<f64> {
        let n = self.interior_len();
        let c = 0.5 / self.grid.h();
        (0..n)
            .map(|i| {
                let mut s = self.w_values[i] * v[i];
                if i + 1 < n {
                    s -= c * v[i + 1];
                }
                if i > 0 {
                    s += c * v[i - 1];
                }
                s
            })
            .collect()
    }

    /// `H` in block order `(ψ_a, ψ_b)`, for inspection and small problems.
    pub fn to_dense_block(&self) -> Vec<Vec<f64>> {
        let n = self.interior_len();
        let mut h = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                let m = self.m_entry(i, j);
                h[i][n + j] = m;
                h[n + j][i] = m;
            }
        }
        h
    }

    /// Split an interleaved vector into `(ψ_a, ψ_b)`.
    pub fn deinterleave(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let a = v.iter().step_by(2).copied().collect();
        let b = v.iter().skip(1).step_by(2).copied().collect();
        (a, b)
    }
}

/// Build the channel operator `W = k_y + A_y` directly.
pub fn build_operator(profile: &FieldProfile, k_y: f64, grid: &Grid1D) -> Result<DiracOperator> {
    ChannelBasis::new(profile, grid, DEFAULT_DENSE_CAP)?.channel(k_y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub zero_tolerance: f64,
    /// `#{E : |E| < τ}` over the full two-component spectrum.
    pub near_zero_count: usize,
    /// `min |W|` past the support; eigenvalues below it are bound states,
    /// the rest belong to the discretized continuum of the leads.
    pub continuum_threshold: f64,
}

impl Spectrum {
    pub fn bound_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|e| e.abs() < self.continuum_threshold)
    }

    /// Near-zero singular values of `M` below the continuum threshold.
    pub fn bound_zero_count(&self) -> usize {
        self.bound_eigenvalues()
            .filter(|e| e.abs() < self.zero_tolerance)
            .count()
            / 2
    }

    /// Smallest eigenvalue at or above `τ`.
    pub fn first_positive(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .copied()
            .find(|&e| e >= self.zero_tolerance)
    }
}

pub fn eigen_spectrum(op: &DiracOperator, tau: f64) -> Result<Spectrum> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("zero_tol", "must be positive and finite"));
    }
    let eigenvalues = op.matrix.eigenvalues()?;
    let near_zero_count = eigenvalues.iter().filter(|e| e.abs() < tau).count();
    let (wl, wr) = op.w_asymptotes;
    Ok(Spectrum {
        eigenvalues,
        zero_tolerance: tau,
        near_zero_count,
        continuum_threshold: wl.abs().min(wr.abs()),
    })
}

/// Zero modes in the channel: near-zero singular values of `M` that lie
/// below the continuum threshold. Without lead states this is half of
/// [`Spectrum::near_zero_count`].
pub fn count_near_zero(spectrum: &Spectrum) -> usize {
    spectrum.bound_zero_count()
}

/// `0.1·√(2 max|B|)`, a tenth of the first Landau gap. A vanishing field
/// falls back to a quarter of the free gap `≈ π / (2 L)` of the truncated
/// interval.
pub fn default_zero_tolerance(profile: &FieldProfile, grid: &Grid1D) -> f64 {
    let b = profile.max_abs();
    if b > 0.0 {
        0.1 * (2.0 * b).sqrt()
    } else {
        0.25 * free_gap(grid)
    }
}

/// Smallest singular value of the free central-difference operator on the
/// interior of `grid` (even interior size), `sin(π / 2(n+1)) / h`.
pub fn free_gap(grid: &Grid1D) -> f64 {
    let n = grid.len().saturating_sub(2) as f64;
    (std::f64::consts::PI / (2.0 * (n + 1.0))).sin() / grid.h()
}

/// A diagnostic when `τ` is not below half the first Landau gap.
pub fn tolerance_warning(profile: &FieldProfile, tau: f64) -> Option<String> {
    let gap = (2.0 * profile.max_abs()).sqrt();
    (gap > 0.0 && tau >= 0.5 * gap).then(|| {
        format!("zero tolerance {tau:.3e} is not below half the first Landau gap {gap:.3e}")
    })
}

/// `H · (0, ψ_b)` or `H · (ψ_a, 0)` row by row, for the mode restricted to
/// the interior points. The mode is rescaled by its largest value, which
/// leaves relative residuals unchanged.
pub fn mode_residual_rows(op: &DiracOperator, mode: &ZeroMode) -> Result<Vec<f64>> {
    if mode.grid != op.outer {
        return Err(Error::GridMismatch(format!(
            "mode on {:?}, operator on {:?}",
            mode.grid, op.outer
        )));
    }
    let psi = interior_mode(mode);
    match mode.sector {
        SpinSector::B => Ok(op.apply_m(&psi)),
        SpinSector::A => Ok(op.apply_mt(&psi)),
        SpinSector::None => Err(Error::NoSector),
    }
}

fn interior_mode(mode: &ZeroMode) -> Vec<f64> {
    let n = mode.log_values.len();
    let top = mode.log_values[1..n - 1]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    mode.log_values[1..n - 1]
        .iter()
        .map(|l| (l - top).exp())
        .collect()
}

/// `‖H · embedded mode‖₂ / ‖mode‖₂` over the interior points.
pub fn mode_residual(op: &DiracOperator, mode: &ZeroMode) -> Result<f64> {
    let rows = mode_residual_rows(op, mode)?;
    let psi = interior_mode(mode);
    Ok(l2(&rows) / l2(&psi))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(H₋, H₊) = (MᵀM, MMᵀ)`, pentadiagonal.
pub fn susy_partners(op: &DiracOperator) -> (BandedSymmetric, BandedSymmetric) {
    let n = op.interior_len();
    let mut minus = BandedSymmetric::zeros(n, 2);
    let mut plus = BandedSymmetric::zeros(n, 2);
    for i in 0..n {
        for j in i.saturating_sub(2)..=i {
            let lo = i.saturating_sub(1);
            let hi = (j + 1).min(n - 1);
            let mut sm = 0.0;
            let mut sp = 0.0;
            for k in lo..=hi {
                sm += op.m_entry(k, i) * op.m_entry(k, j);
                sp += op.m_entry(i, k) * op.m_entry(j, k);
            }
            minus.set(i, j, sm);
            plus.set(i, j, sp);
        }
    }
    (minus, plus)
}

/// Eigenvector of `H` for an eigenvalue close to `energy`, as `(ψ_a, ψ_b)`
/// normalized to unit length.
pub fn eigenvector(op: &DiracOperator, energy: f64) -> (Vec<f64>, Vec<f64>) {
    let v = op.matrix.inverse_iteration(energy, 3);
    DiracOperator::deinterleave(&v)
}

/// Fraction of `|ψ_a|² + |ψ_b|²` on interior points inside `[lo, hi]`.
pub fn weight_inside(op: &DiracOperator, psi: &(Vec<f64>, Vec<f64>), lo: f64, hi: f64) -> f64 {
    let (a, b) = psi;
    let mut inside = 0.0;
    let mut total = 0.0;
    for i in 0..op.interior_len() {
        let w = a[i] * a[i] + b[i] * b[i];
        total += w;
        let x = op.grid.x(i);
        if x >= lo && x <= hi {
            inside += w;
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

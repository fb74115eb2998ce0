//! Landau-gauge channel bookkeeping.
//!
//! With periodicity `L_y` the transverse momentum is `k_y = 2πn / L_y`.
//! A single gauge choice `k_gauge` serves every channel, and channel `n`
//! carries a zero mode iff `k_gauge + k_y ∈ (-Q/2, Q/2)`: a window of
//! length `Q`, giving `⌊Q L_y / 2π⌋` states up to one lattice point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profiles::{total_flux, FieldProfile};
use crate::spectral::{
    default_zero_tolerance, eigen_spectrum, ChannelBasis, Spectrum, DEFAULT_DENSE_CAP,
};
use crate::zeromodes::{admissible_k_interval, snapped_floor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub l_y: f64,
    pub k_gauge: f64,
    /// Inclusive channel range `[n_min, n_max]`.
    pub n_range: (i64, i64),
    pub b_const: Option<f64>,
    pub l_x: Option<f64>,
}

impl ReductionConfig {
    pub fn new(l_y: f64, n_range: (i64, i64)) -> Result<Self> {
        let cfg = ReductionConfig {
            l_y,
            k_gauge: 0.0,
            n_range,
            b_const: None,
            l_x: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_k_gauge(mut self, k_gauge: f64) -> Result<Self> {
        self.k_gauge = k_gauge;
        self.validate()?;
        Ok(self)
    }

    pub fn with_constant_field(mut self, b: f64, l_x: f64) -> Result<Self> {
        self.b_const = Some(b);
        self.l_x = Some(l_x);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_y > 0.0 && self.l_y.is_finite()) {
            return Err(Error::param("Ly", "must be positive and finite"));
        }
        if !self.k_gauge.is_finite() {
            return Err(Error::param("k_gauge", "must be finite"));
        }
        if self.n_range.0 > self.n_range.1 {
            return Err(Error::param("n_range", "empty channel range"));
        }
        if let Some(b) = self.b_const {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::param("B_const", "must be positive and finite"));
            }
        }
        if let Some(l) = self.l_x {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::param("L_x", "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Magnetic length `1/√B` of the constant-field case.
    pub fn l_b(&self) -> Option<f64> {
        self.b_const.map(|b| 1.0 / b.sqrt())
    }
}

/// `k_y(n) = 2πn / L_y` for each `n` in the inclusive range, ascending.
pub fn quantize_ky(l_y: f64, n_range: (i64, i64)) -> Result<Vec<f64>> {
    if !(l_y > 0.0 && l_y.is_finite()) {
        return Err(Error::param("Ly", "must be positive and finite"));
    }
    if n_range.0 > n_range.1 {
        return Err(Error::param("n_range", "empty channel range"));
    }
    Ok((n_range.0..=n_range.1).map(|n| ky_of(l_y, n)).collect())
}

fn ky_of(l_y: f64, n: i64) -> f64 {
    2.0 * std::f64::consts::PI * n as f64 / l_y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVerdict {
    pub n: i64,
    pub ky: f64,
    pub admissible: bool,
    /// States counted in this channel by the spectral oracle.
    pub near_zero_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Ly")]
    pub l_y: f64,
    pub g_analytic_real: f64,
    pub g_analytic: i64,
    pub channels: Vec<ChannelVerdict>,
    pub g_numeric: Option<i64>,
    /// `|g_numeric - g_analytic|`, or `|#admissible - g_analytic|` when no
    /// numerical count is present.
    pub discrepancy: i64,
}

impl DegeneracyReport {
    pub fn admissible_count(&self) -> usize {
        self.channels.iter().filter(|c| c.admissible).count()
    }
}

/// `⌊|Q| L_y / 2π⌋`.
pub fn degeneracy_general(profile: &FieldProfile, l_y: f64) -> i64 {
    snapped_floor(degeneracy_real(profile, l_y)) as i64
}

fn degeneracy_real(profile: &FieldProfile, l_y: f64) -> f64 {
    total_flux(profile).value.abs() * l_y / (2.0 * std::f64::consts::PI)
}

pub fn admissible_channels(
    profile: &FieldProfile,
    cfg: &ReductionConfig,
) -> Result<DegeneracyReport> {
    cfg.validate()?;
    let flux = total_flux(profile);
    let (_, window) = admissible_k_interval(&flux);
    let channels: Vec<ChannelVerdict> = (cfg.n_range.0..=cfg.n_range.1)
        .map(|n| {
            let ky = ky_of(cfg.l_y, n);
            ChannelVerdict {
                n,
                ky,
                admissible: window.contains(cfg.k_gauge + ky),
                near_zero_count: None,
            }
        })
        .collect();
    let g_analytic = degeneracy_general(profile, cfg.l_y);
    let admissible = channels.iter().filter(|c| c.admissible).count() as i64;
    Ok(DegeneracyReport {
        q: flux.value,
        l_y: cfg.l_y,
        g_analytic_real: degeneracy_real(profile, cfg.l_y),
        g_analytic,
        channels,
        g_numeric: None,
        discrepancy: (admissible - g_analytic).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// `τ`; defaults to [`default_zero_tolerance`].
    pub zero_tol: Option<f64>,
    pub dense_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            zero_tol: None,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

/// Spectrum of every channel, ordered by `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSweep {
    pub report: DegeneracyReport,
    pub spectra: Vec<Spectrum>,
}

/// Diagonalize every channel of the configured range on `grid`.
pub fn sweep_channels(
    profile: &FieldProfile,
    cfg: &ReductionConfig,
    grid: &Grid1D,
    opts: &VerifyOptions,
) -> Result<ChannelSweep> {
    let report = admissible_channels(profile, cfg)?;
    let tau = match opts.zero_tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(_) => return Err(Error::param("zero_tol", "must be positive and finite")),
        None => default_zero_tolerance(profile, grid),
    };
    let basis = ChannelBasis::new(profile, grid, opts.dense_cap)?;
    let spectra = report
        .channels
        .par_iter()
        .map(|c| eigen_spectrum(&basis.channel(cfg.k_gauge + c.ky)?, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSweep { report, spectra })
}

/// Positive bound eigenvalues `≥ τ` grouped into clusters; a new cluster
/// starts wherever consecutive values differ by more than `τ`.
pub fn positive_clusters(spectrum: &Spectrum) -> Vec<Vec<f64>> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for e in spectrum
        .bound_eigenvalues()
        .filter(|&e| e >= spectrum.zero_tolerance)
    {
        match clusters.last_mut() {
            Some(c) if e - c[c.len() - 1] <= spectrum.zero_tolerance => c.push(e),
            _ => clusters.push(vec![e]),
        }
    }
    clusters
}

/// Energy of level `m ≥ 1`: mean of the `m`-th positive cluster of the
/// most central admissible channel. Neighbouring clusters must be more
/// than `2τ` away.
pub fn level_energy(sweep: &ChannelSweep, k_gauge: f64, level: u32) -> Result<f64> {
    if level == 0 {
        return Ok(0.0);
    }
    let central = sweep
        .report
        .channels
        .iter()
        .zip(&sweep.spectra)
        .filter(|(c, _)| c.admissible)
        .min_by(|(a, _), (b, _)| (k_gauge + a.ky).abs().total_cmp(&(k_gauge + b.ky).abs()));
    let Some((channel, spectrum)) = central else {
        return Err(Error::ClusterSeparation(
            "no admissible channel to take the level energy from".into(),
        ));
    };
    let clusters = positive_clusters(spectrum);
    let m = level as usize;
    if clusters.len() < m {
        return Err(Error::ClusterSeparation(format!(
            "channel n={} has only {} bound positive levels, level {m} requested",
            channel.n,
            clusters.len()
        )));
    }
    let tau = spectrum.zero_tolerance;
    let this = &clusters[m - 1];
    let lo = this[0];
    let hi = this[this.len() - 1];
    let below = if m >= 2 {
        Some(clusters[m - 2][clusters[m - 2].len() - 1])
    } else {
        None
    };
    let above = clusters.get(m).map(|c| c[0]);
    if hi - lo > 2.0 * tau
        || below.is_some_and(|b| lo - b <= 2.0 * tau)
        || above.is_some_and(|a| a - hi <= 2.0 * tau)
    {
        return Err(Error::ClusterSeparation(format!(
            "level {m} cluster [{lo:.6}, {hi:.6}] in channel n={} is not separated by more than 2τ = {:.6}",
            channel.n,
            2.0 * tau
        )));
    }
    Ok(this.iter().sum::<f64>() / this.len() as f64)
}

/// States of level `m` in one channel. Level 0 is [`Spectrum::bound_zero_count`];
/// for `m ≥ 1` the positive bound eigenvalues within `τ` of `energy` are
/// counted, halved for the doubler copy of every excited level.
pub fn level_count(spectrum: &Spectrum, level: u32, energy: f64) -> u64 {
    if level == 0 {
        return spectrum.bound_zero_count() as u64;
    }
    let hits = spectrum
        .bound_eigenvalues()
        .filter(|&e| e >= spectrum.zero_tolerance && (e - energy).abs() < spectrum.zero_tolerance)
        .count();
    hits.div_ceil(2) as u64
}

/// Analytic report plus the spectral count of level `m` summed over channels.
pub fn verify_degeneracy(
    profile: &FieldProfile,
    cfg: &ReductionConfig,
    level: u32,
    grid: &Grid1D,
) -> Result<DegeneracyReport> {
    verify_degeneracy_with(profile, cfg, level, grid, &VerifyOptions::default())
}

pub fn verify_degeneracy_with(
    profile: &FieldProfile,
    cfg: &ReductionConfig,
    level: u32,
    grid: &Grid1D,
    opts: &VerifyOptions,
) -> Result<DegeneracyReport> {
    let sweep = sweep_channels(profile, cfg, grid, opts)?;
    report_level(&sweep, cfg.k_gauge, level)
}

/// Fill in per-channel and total counts of level `m` from a sweep.
pub fn report_level(sweep: &ChannelSweep, k_gauge: f64, level: u32) -> Result<DegeneracyReport> {
    let energy = level_energy(sweep, k_gauge, level)?;
    let mut report = sweep.report.clone();
    let mut total = 0i64;
    for (c, spectrum) in report.channels.iter_mut().zip(&sweep.spectra) {
        let count = level_count(spectrum, level, energy);
        c.near_zero_count = Some(count);
        total += count as i64;
    }
    report.g_numeric = Some(total);
    report.discrepancy = (total - report.g_analytic).abs();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Shape;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn zero_profile() -> FieldProfile {
        FieldProfile::line(Shape::Box {
            amplitude: 0.0,
            half_width: 1.0,
            center: 0.0,
        })
        .unwrap()
    }

    #[test]
    fn ky_quantization() {
        let ky = quantize_ky(2.0 * PI, (-2, 2)).unwrap();
        for (a, b) in ky.iter().zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((quantize_ky(PI, (1, 1)).unwrap()[0] - 2.0).abs() < 1e-15);
        assert_eq!(quantize_ky(3.7, (0, 0)).unwrap(), vec![0.0]);
        assert!(quantize_ky(1.0, (1, 0)).is_err());
        assert!(quantize_ky(0.0, (0, 1)).is_err());
    }

    #[test]
    fn window_arithmetic() {
        let cfg = ReductionConfig::new(2.0 * PI, (-8, 8)).unwrap();
        let q10 = FieldProfile::box_profile(1.0, 5.0).unwrap();
        let r = admissible_channels(&q10, &cfg).unwrap();
        let adm: Vec<i64> = r
            .channels
            .iter()
            .filter(|c| c.admissible)
            .map(|c| c.n)
            .collect();
        assert_eq!(adm, (-4..=4).collect::<Vec<_>>());
        assert_eq!(r.g_analytic, 10);
        assert_eq!(r.discrepancy, 1);

        let q4 = FieldProfile::box_profile(1.0, 2.0).unwrap();
        let r = admissible_channels(&q4, &cfg).unwrap();
        assert_eq!(r.admissible_count(), 3);
        assert_eq!(r.g_analytic, 4);
        assert_eq!(r.discrepancy, 1);

        let r = admissible_channels(&zero_profile(), &cfg).unwrap();
        assert_eq!(r.admissible_count(), 0);
        assert_eq!(r.g_analytic, 0);
    }

    #[test]
    fn general_formula() {
        let q10 = FieldProfile::box_profile(1.0, 5.0).unwrap();
        assert_eq!(degeneracy_general(&q10, 2.0 * PI), 10);
        assert_eq!(degeneracy_general(&zero_profile(), 2.0 * PI), 0);
        // Negative flux is counted by magnitude.
        assert_eq!(degeneracy_general(&q10.scaled(-1.0), 2.0 * PI), 10);
    }

    #[test]
    fn constant_field_consistency() {
        for (b, a, l_y) in [(1.0, 5.0, 2.0 * PI), (0.7, 3.0, 13.0), (2.5, 1.2, 40.0)] {
            let p = FieldProfile::box_profile(b, a).unwrap();
            let cfg = ReductionConfig::new(l_y, (0, 0))
                .unwrap()
                .with_constant_field(b, 2.0 * a)
                .unwrap();
            let area = cfg.l_x.unwrap() * cfg.l_y;
            let expected = (area * b / (2.0 * PI) + 1e-9).floor() as i64;
            assert_eq!(degeneracy_general(&p, l_y), expected);
            assert!((cfg.l_b().unwrap() - 1.0 / b.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ReductionConfig::new(-1.0, (0, 1)).is_err());
        assert!(ReductionConfig::new(1.0, (2, 1)).is_err());
        assert!(ReductionConfig::new(1.0, (0, 1))
            .unwrap()
            .with_constant_field(0.0, 1.0)
            .is_err());
        assert!(ReductionConfig::new(1.0, (0, 1))
            .unwrap()
            .with_k_gauge(f64::NAN)
            .is_err());
    }

    #[test]
    fn zero_field_has_no_numeric_states() {
        let cfg = ReductionConfig::new(2.0 * PI, (-2, 2)).unwrap();
        let g = Grid1D::new(-8.0, 8.0, 162).unwrap();
        let r = verify_degeneracy(&zero_profile(), &cfg, 0, &g).unwrap();
        assert_eq!(r.g_numeric, Some(0));
        assert_eq!(r.discrepancy, 0);
    }

    #[test]
    fn small_box_sweep_matches_window() {
        // Q = 4 on L_y = 2π: channels -1, 0, 1 admissible.
        let p = FieldProfile::box_profile(1.0, 2.0).unwrap();
        let cfg = ReductionConfig::new(2.0 * PI, (-3, 3)).unwrap();
        let g = Grid1D::with_spacing(-32.0, 32.0, 0.05).unwrap();
        let r = verify_degeneracy(&p, &cfg, 0, &g).unwrap();
        let counts: Vec<u64> = r
            .channels
            .iter()
            .map(|c| c.near_zero_count.unwrap())
            .collect();
        assert_eq!(counts, vec![0, 0, 1, 1, 1, 0, 0]);
        assert_eq!(r.g_numeric, Some(3));
    }

    #[test]
    fn unresolved_level_is_reported() {
        // A narrow box binds no excited level in its central channel.
        let p = FieldProfile::box_profile(1.0, 0.5).unwrap();
        let cfg = ReductionConfig::new(2.0 * PI, (0, 0)).unwrap();
        let g = Grid1D::with_spacing(-65.0, 65.0, 0.1).unwrap();
        let err = verify_degeneracy(&p, &cfg, 1, &g).unwrap_err();
        assert!(matches!(err, Error::ClusterSeparation(_)));
        assert!(err.is_numerical());
    }

    proptest! {
        #[test]
        fn window_length_invariance(k_gauge in -20.0f64..20.0, q in 0.5f64..30.0, l_y in 1.0f64..40.0) {
            let p = FieldProfile::box_profile(1.0, 0.5 * q).unwrap();
            let base = ReductionConfig::new(l_y, (-400, 400)).unwrap();
            let a0 = admissible_channels(&p, &base).unwrap().admissible_count() as i64;
            let shifted = base.clone().with_k_gauge(k_gauge).unwrap();
            let a1 = admissible_channels(&p, &shifted).unwrap().admissible_count() as i64;
            prop_assert!((a0 - a1).abs() <= 1);
            let g = degeneracy_general(&p, l_y);
            prop_assert!((a1 - g).abs() <= 1);
        }

        #[test]
        fn doubling_ly_doubles_g(q in 0.0f64..50.0, l_y in 0.1f64..100.0) {
            let p = FieldProfile::box_profile(1.0, 0.5 * q.max(1e-6)).unwrap();
            let g1 = degeneracy_general(&p, l_y);
            let g2 = degeneracy_general(&p, 2.0 * l_y);
            prop_assert!((g2 - 2 * g1).abs() <= 1);
        }
    }
}

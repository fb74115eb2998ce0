//! Run configuration: one JSON file per invocation, unknown keys rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profiles::{make_profile, FieldProfile, ProfileSpec};
use crate::quadrature::Quadrature;
use crate::reduction::{ReductionConfig, VerifyOptions};
use crate::spectral::DEFAULT_DENSE_CAP;
use crate::zeromodes::SpinSector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub quadrature_tol: Option<f64>,
    pub zero_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub k: f64,
    pub sector: Option<String>,
    #[serde(default)]
    pub ky: f64,
    #[serde(rename = "Ly")]
    pub ly: Option<f64>,
    pub n_range: Option<[i64; 2]>,
    #[serde(default)]
    pub k_gauge: f64,
    #[serde(default)]
    pub level: u32,
    pub k_list: Option<Vec<f64>>,
    pub j_max: Option<u32>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output_dir: Option<String>,
    #[serde(default)]
    pub emit_plots: bool,
    pub dense_cap: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn profile(&self) -> Result<FieldProfile> {
        make_profile(&self.profile).map_err(|e| match e {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("profile.{field}"),
                reason,
            },
            other => other,
        })
    }

    pub fn grid(&self) -> Result<Grid1D> {
        let g = self
            .grid
            .ok_or_else(|| Error::param("grid", "required for this subcommand"))?;
        Grid1D::new(g.x_lo, g.x_hi, g.n)
    }

    pub fn sector(&self) -> Result<SpinSector> {
        let s = self
            .sector
            .as_deref()
            .ok_or_else(|| Error::param("sector", "required for this subcommand"))?;
        match s.parse::<SpinSector>() {
            Ok(SpinSector::None) => Err(Error::param("sector", "`none` admits no zero modes")),
            Ok(sector) => Ok(sector),
            Err(_) => Err(Error::param(
                "sector",
                format!("expected `a` or `b`, got `{s}`"),
            )),
        }
    }

    pub fn k_list(&self) -> Result<&[f64]> {
        match &self.k_list {
            Some(list) if !list.is_empty() => Ok(list),
            _ => Err(Error::param(
                "k_list",
                "required and non-empty for this subcommand",
            )),
        }
    }

    pub fn reduction(&self) -> Result<ReductionConfig> {
        let ly = self
            .ly
            .ok_or_else(|| Error::param("Ly", "required for this subcommand"))?;
        let [lo, hi] = self
            .n_range
            .ok_or_else(|| Error::param("n_range", "required for this subcommand"))?;
        ReductionConfig::new(ly, (lo, hi))?.with_k_gauge(self.k_gauge)
    }

    pub fn quadrature(&self) -> Result<Quadrature> {
        match self.tolerances.quadrature_tol {
            None => Ok(Quadrature::fine()),
            Some(t) if t > 0.0 && t < 1.0 => Ok(Quadrature::with_rel_tol(t)),
            Some(_) => Err(Error::param(
                "tolerances.quadrature_tol",
                "must lie in (0, 1)",
            )),
        }
    }

    pub fn zero_tol(&self) -> Result<Option<f64>> {
        match self.tolerances.zero_tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => Err(Error::param(
                "tolerances.zero_tol",
                "must be positive and finite",
            )),
            other => Ok(other),
        }
    }

    pub fn dense_cap(&self) -> Result<usize> {
        match self.dense_cap {
            Some(0) => Err(Error::param("dense_cap", "must be positive")),
            Some(c) => Ok(c),
            None => Ok(DEFAULT_DENSE_CAP),
        }
    }

    pub fn verify_options(&self) -> Result<VerifyOptions> {
        Ok(VerifyOptions {
            zero_tol: self.zero_tol()?,
            dense_cap: self.dense_cap()?,
        })
    }
}

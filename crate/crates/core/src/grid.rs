use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_lo = x_0 < x_1 < ... < x_{n-1} = x_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_lo: f64,
    x_hi: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if x_hi <= x_lo {
            return Err(Error::InvalidGrid(format!(
                "x_hi ({x_hi}) must exceed x_lo ({x_lo})"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need n >= 3 points, got {n}")));
        }
        Ok(Grid1D { x_lo, x_hi, n })
    }

    /// Grid with spacing as close as possible to `h` (never coarser).
    pub fn with_spacing(x_lo: f64, x_hi: f64, h: f64) -> Result<Self> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {h}"
            )));
        }
        let intervals = ((x_hi - x_lo) / h - 1e-9).ceil().max(2.0) as usize;
        Grid1D::new(x_lo, x_hi, intervals + 1)
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n - 1) as f64
    }

    /// Point `i`; the last point is exactly `x_hi`.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Same extent with the spacing halved.
    pub fn refined(&self) -> Self {
        Grid1D {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = Grid1D::new(-4.0, 4.0, 9).unwrap();
        assert_eq!(g.h(), 1.0);
        assert_eq!(
            g.to_vec(),
            vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]
        );
        assert_eq!(g.refined().h(), 0.5);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 5).is_err());
    }

    #[test]
    fn with_spacing_never_coarser() {
        let g = Grid1D::with_spacing(-35.0, 35.0, 0.03).unwrap();
        assert!(g.h() <= 0.03);
        assert_eq!(g.x(g.len() - 1), 35.0);
    }
}

//! Small grid helpers shared by the kernel verifier, the oracle, and the
//! verification suite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    Linear,
    Log,
}

/// A finite sampling grid on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDef {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
}

impl GridDef {
    pub fn new(n: usize, lo: f64, hi: f64, spacing: Spacing) -> Result<Self> {
        if n < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidInput(format!(
                "bad grid: n={n}, lo={lo}, hi={hi}"
            )));
        }
        if spacing == Spacing::Log && lo <= 0.0 {
            return Err(Error::InvalidInput(
                "log grid requires lo > 0".to_string(),
            ));
        }
        Ok(GridDef { n, lo, hi, spacing })
    }

    pub fn linear(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(n, lo, hi, Spacing::Linear)
    }

    pub fn log(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(n, lo, hi, Spacing::Log)
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.n;
        let mut pts = Vec::with_capacity(n);
        match self.spacing {
            Spacing::Linear => {
                let step = (self.hi - self.lo) / (n - 1) as f64;
                for i in 0..n {
                    pts.push(self.lo + step * i as f64);
                }
            }
            Spacing::Log => {
                let llo = self.lo.ln();
                let lhi = self.hi.ln();
                let step = (lhi - llo) / (n - 1) as f64;
                for i in 0..n {
                    pts.push((llo + step * i as f64).exp());
                }
            }
        }
        // endpoints exact regardless of rounding
        pts[0] = self.lo;
        pts[n - 1] = self.hi;
        pts
    }
}

/// Median of |v| over a slice; 0 for an empty slice.
pub fn median_abs(values: &[f64]) -> f64 {
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).filter(|v| v.is_finite()).collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    mags[mags.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid_hits_endpoints() {
        let g = GridDef::linear(5, 0.0, 1.0).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[4], 1.0);
        assert!((p[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_grid_is_geometric() {
        let g = GridDef::log(4, 1.0, 8.0).unwrap();
        let p = g.points();
        assert!((p[1] / p[0] - 2.0).abs() < 1e-12);
        assert!((p[3] / p[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridDef::log(8, 0.0, 1.0).is_err());
        assert!(GridDef::linear(1, 0.0, 1.0).is_err());
        assert!(GridDef::linear(8, 2.0, 1.0).is_err());
    }
}

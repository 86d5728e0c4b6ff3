//! Brute-force ground truth: detect the monotonicity pattern of a scalar
//! function on an interval by dense sampling, and compare analytic verdicts
//! against it.
//!
//! First differences below `noise_floor * (grid median magnitude)` count as
//! plateau, so float jitter cannot fabricate unimodality. The sign runs that
//! remain determine the pattern; more than one sign change reports
//! `Inconclusive` with every change point listed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{median_abs, GridDef};
use crate::verdict::{MonotonicityVerdict, Pattern};

pub const DEFAULT_NOISE_FLOOR: f64 = 1e-9;

/// Pattern seen on a concrete grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedPattern {
    pub pattern: Pattern,
    /// Grid-resolution change points; one entry per sign change.
    pub change_points: Vec<f64>,
    pub grid: GridDef,
    pub noise_floor: f64,
}

/// Scan `f` over `grid` and classify its monotonicity pattern.
pub fn detect_pattern(
    f: impl Fn(f64) -> Result<f64>,
    grid: &GridDef,
    noise_floor: f64,
) -> Result<ObservedPattern> {
    if grid.n < 64 {
        return Err(Error::InvalidInput(format!(
            "oracle grid must have at least 64 points, got {}",
            grid.n
        )));
    }
    let ts = grid.points();
    let mut vs = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = f(t)?;
        if !v.is_finite() {
            return Err(Error::Nonconvergence(format!(
                "oracle function returned {v} at {t}"
            )));
        }
        vs.push(v);
    }
    Ok(classify_samples(&ts, &vs, *grid, noise_floor))
}

/// Convenience wrapper for infallible functions.
pub fn detect_pattern_fn(
    f: impl Fn(f64) -> f64,
    grid: &GridDef,
    noise_floor: f64,
) -> Result<ObservedPattern> {
    detect_pattern(|t| Ok(f(t)), grid, noise_floor)
}

fn classify_samples(ts: &[f64], vs: &[f64], grid: GridDef, noise_floor: f64) -> ObservedPattern {
    let scale = median_abs(vs).max(1e-300);
    let band = noise_floor * scale;

    // banded signs of first differences
    let signs: Vec<i8> = vs
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d.abs() <= band {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    // compress nonzero runs
    struct Run {
        sign: i8,
        last_diff: usize,
    }
    let mut runs: Vec<Run> = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        match runs.last_mut() {
            Some(run) if run.sign == s => run.last_diff = i,
            _ => runs.push(Run { sign: s, last_diff: i }),
        }
    }

    let mut change_points = Vec::new();
    for w in runs.windows(2) {
        // a diff index i sits between grid points i and i+1; the change
        // point is the grid point between the two runs
        let idx = (w[0].last_diff + 1).min(ts.len() - 1);
        change_points.push(ts[idx]);
    }

    let pattern = match runs.len() {
        0 => Pattern::Constant,
        1 => {
            if runs[0].sign > 0 {
                Pattern::Increasing
            } else {
                Pattern::Decreasing
            }
        }
        2 => {
            if runs[0].sign > 0 {
                Pattern::IncThenDec
            } else {
                Pattern::DecThenInc
            }
        }
        _ => Pattern::Inconclusive,
    };

    ObservedPattern {
        pattern,
        change_points,
        grid,
        noise_floor,
    }
}

/// Result of comparing a verdict with an observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub agree: bool,
    /// False when the verdict was Inconclusive: such comparisons are
    /// unadjudicated, never failures.
    pub adjudicated: bool,
    pub detail: String,
}

// Local grid step around a point of a (possibly log-spaced) grid.
fn local_step(ts: &[f64], at: f64) -> f64 {
    let i = ts.partition_point(|&t| t < at).min(ts.len() - 1).max(1);
    (ts[i] - ts[i - 1]).max(if i + 1 < ts.len() { ts[i + 1] - ts[i] } else { 0.0 })
}

/// What a pattern on the full domain looks like when restricted to the
/// observation window. A unimodal verdict whose turning point lies outside
/// (or within two grid steps of) the window collapses to the monotone
/// piece that remains visible.
fn restrict(pattern: Pattern, turning: Option<f64>, ts: &[f64]) -> (Pattern, Option<f64>) {
    let (lo, hi) = (ts[0], ts[ts.len() - 1]);
    match (pattern, turning) {
        (Pattern::IncThenDec, Some(t)) => {
            if t <= lo + 2.0 * local_step(ts, lo) {
                (Pattern::Decreasing, None)
            } else if t >= hi - 2.0 * local_step(ts, hi) {
                (Pattern::Increasing, None)
            } else {
                (Pattern::IncThenDec, Some(t))
            }
        }
        (Pattern::DecThenInc, Some(t)) => {
            if t <= lo + 2.0 * local_step(ts, lo) {
                (Pattern::Increasing, None)
            } else if t >= hi - 2.0 * local_step(ts, hi) {
                (Pattern::Decreasing, None)
            } else {
                (Pattern::DecThenInc, Some(t))
            }
        }
        _ => (pattern, turning),
    }
}

/// Compare a predicted verdict against an observed pattern over the
/// observation's window. Unimodal agreement additionally requires the
/// turning point to match the observed change point within
/// `max(turning_tol, 2 local grid steps)`.
pub fn crosscheck(
    verdict: &MonotonicityVerdict,
    observed: &ObservedPattern,
    turning_tol: f64,
) -> Agreement {
    if verdict.pattern == Pattern::Inconclusive {
        return Agreement {
            agree: true,
            adjudicated: false,
            detail: "verdict inconclusive; unadjudicated".to_string(),
        };
    }
    let ts = observed.grid.points();
    let (expected, turning) = restrict(verdict.pattern, verdict.turning_point, &ts);

    if expected != observed.pattern {
        return Agreement {
            agree: false,
            adjudicated: true,
            detail: format!(
                "predicted {} (restricted from {}) but observed {}",
                expected.name(),
                verdict.pattern.name(),
                observed.pattern.name()
            ),
        };
    }
    if let (Some(t_pred), Some(&t_obs)) = (turning, observed.change_points.first()) {
        let allowed = turning_tol.max(2.0 * local_step(&ts, t_obs));
        if (t_pred - t_obs).abs() > allowed {
            return Agreement {
                agree: false,
                adjudicated: true,
                detail: format!(
                    "turning point mismatch: predicted {t_pred}, observed {t_obs}, allowed {allowed}"
                ),
            };
        }
    }
    Agreement {
        agree: true,
        adjudicated: true,
        detail: "patterns agree".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDef;

    fn lin(n: usize, lo: f64, hi: f64) -> GridDef {
        GridDef::linear(n, lo, hi).unwrap()
    }

    #[test]
    fn monotone_and_constant() {
        let g = lin(256, 0.1, 10.0);
        let obs = detect_pattern_fn(|t| t, &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::Increasing);
        assert!(obs.change_points.is_empty());

        let obs = detect_pattern_fn(|t| -2.0 * t, &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::Decreasing);

        let obs = detect_pattern_fn(|_| 3.25, &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::Constant);
    }

    #[test]
    fn unimodal_with_change_point() {
        let g = lin(512, 0.0, 4.0);
        let obs = detect_pattern_fn(|t| t * (-t).exp(), &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::IncThenDec);
        assert_eq!(obs.change_points.len(), 1);
        assert!((obs.change_points[0] - 1.0).abs() < 0.02);

        let obs = detect_pattern_fn(|t| (t - 2.0) * (t - 2.0), &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::DecThenInc);
        assert!((obs.change_points[0] - 2.0).abs() < 0.02);
    }

    #[test]
    fn multi_modal_is_inconclusive() {
        let g = lin(512, 0.0, 10.0);
        let obs = detect_pattern_fn(|t| t.sin(), &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(obs.pattern, Pattern::Inconclusive);
        assert!(obs.change_points.len() > 1);
    }

    #[test]
    fn noise_floor_suppresses_jitter() {
        let g = lin(256, 0.0, 1.0);
        // deterministic sub-noise wiggle on a flat function
        let obs = detect_pattern_fn(
            |t| 1.0 + 1e-13 * (1e4 * t).sin(),
            &g,
            DEFAULT_NOISE_FLOOR,
        )
        .unwrap();
        assert_eq!(obs.pattern, Pattern::Constant);
    }

    #[test]
    fn refinement_stability_for_monotone() {
        for n in [64, 256] {
            let g = lin(n, 0.5, 5.0);
            let obs = detect_pattern_fn(|t| t.ln(), &g, DEFAULT_NOISE_FLOOR).unwrap();
            assert_eq!(obs.pattern, Pattern::Increasing);
            let g4 = lin(n * 4, 0.5, 5.0);
            let obs4 = detect_pattern_fn(|t| t.ln(), &g4, DEFAULT_NOISE_FLOOR).unwrap();
            assert_eq!(obs.pattern, obs4.pattern);
        }
    }

    #[test]
    fn crosscheck_agreement_cases() {
        let g = lin(256, 0.0, 4.0);
        let observed = detect_pattern_fn(|t| t * (-t).exp(), &g, DEFAULT_NOISE_FLOOR).unwrap();

        let v = MonotonicityVerdict::unimodal(Pattern::IncThenDec, 1.0, "rule 2.2(ii)");
        assert!(crosscheck(&v, &observed, 1e-6).agree);

        let v = MonotonicityVerdict::monotone(Pattern::Decreasing, "rule 2.1");
        let r = crosscheck(&v, &observed, 1e-6);
        assert!(!r.agree && r.adjudicated);

        let v = MonotonicityVerdict::inconclusive("numeric-only");
        let r = crosscheck(&v, &observed, 1e-6);
        assert!(r.agree && !r.adjudicated);
    }

    #[test]
    fn crosscheck_restricts_out_of_window_turns() {
        // turning point far above the window: the window only sees the rise
        let g = lin(256, 0.0, 1.0);
        let observed =
            detect_pattern_fn(|t| t * (-t / 50.0).exp(), &g, DEFAULT_NOISE_FLOOR).unwrap();
        assert_eq!(observed.pattern, Pattern::Increasing);
        let v = MonotonicityVerdict::unimodal(Pattern::IncThenDec, 50.0, "rule 2.2(ii)");
        assert!(crosscheck(&v, &observed, 1e-6).agree);
    }

    #[test]
    fn errors_from_fn_propagate() {
        let g = lin(64, 0.5, 2.0);
        let r = detect_pattern(
            |t| {
                if t > 1.0 {
                    Err(Error::Domain(format!("bad at {t}")))
                } else {
                    Ok(t)
                }
            },
            &g,
            DEFAULT_NOISE_FLOOR,
        );
        assert!(r.is_err());
    }
}

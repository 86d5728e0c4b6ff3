//! Adaptive Gauss-Legendre quadrature with support for improper endpoints.
//!
//! Bounded intervals are refined with a worst-first interval queue using the
//! difference between the 10- and 21-point Gauss rules as the error
//! estimate. An upper endpoint at infinity is mapped to (0, 1] via
//! u = 1/(1 + t - alpha); a lower endpoint at 0 is handled by dyadic panels
//! shrinking toward 0 with a geometric tail bound (the Gauss nodes never
//! touch the endpoints, so integrable singularities are fine).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: u32,
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n; standard Golub-Welsch-free construction.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(10))
}

fn rule21() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(21))
}

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_SEGMENTS: u32 = 4000;

/// Integrate `f` over the bounded interval `[a, b]` to relative tolerance
/// `tol` (with a tiny absolute floor for integrals near zero).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    let eval_seg = |lo: f64, hi: f64| -> Result<Segment> {
        let coarse = gauss(&f, lo, hi, rule10());
        let fine = gauss(&f, lo, hi, rule21());
        if !fine.is_finite() || !coarse.is_finite() {
            return Err(Error::Nonconvergence(format!(
                "non-finite integrand over [{lo}, {hi}]"
            )));
        }
        Ok(Segment {
            err: (fine - coarse).abs(),
            a: lo,
            b: hi,
            value: fine,
        })
    };

    let mut heap = BinaryHeap::new();
    heap.push(eval_seg(a, b)?);
    let mut splits = 0u32;
    let mut evals = 31u32;
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        let budget = tol * total.abs().max(1e-280);
        if err <= budget {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evals,
            });
        }
        if splits >= MAX_SEGMENTS {
            return Err(Error::Nonconvergence(format!(
                "quadrature over [{a}, {b}] stalled at error {err:.3e} after {splits} splits"
            )));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept its estimate
            let mut total = worst.value;
            let mut err_acc = worst.err;
            for s in heap.iter() {
                total += s.value;
                err_acc += s.err;
            }
            return Ok(QuadResult {
                value: total,
                abs_error: err_acc,
                evals,
            });
        }
        heap.push(eval_seg(worst.a, mid)?);
        heap.push(eval_seg(mid, worst.b)?);
        evals += 62;
        splits += 1;
    }
}

/// Integrate `f` over `[alpha, infinity)` via the map u = 1/(1 + t - alpha).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, alpha: f64, tol: f64) -> Result<QuadResult> {
    let mapped = move |u: f64| {
        let t = alpha + (1.0 - u) / u;
        f(t) / (u * u)
    };
    integrate(mapped, 0.0, 1.0, tol)
}

const MAX_PANELS: u32 = 90;

/// Integrate `f` over `(0, beta]` with dyadic panels shrinking toward 0.
/// The leftover tail below the last panel is bounded geometrically and
/// reported inside `abs_error`.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, beta: f64, tol: f64) -> Result<QuadResult> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("bad upper endpoint {beta}")));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0u32;
    let mut hi = beta;
    let mut prev_mag = f64::INFINITY;
    let mut small_streak = 0u32;
    for panel in 0..MAX_PANELS {
        let lo = hi * 0.5;
        let piece = integrate(&f, lo, hi, tol)?;
        total += piece.value;
        err += piece.abs_error;
        evals += piece.evals;
        let mag = piece.value.abs();
        let scale = total.abs().max(1e-280);
        if mag <= 0.25 * tol * scale && mag <= prev_mag {
            small_streak += 1;
            if small_streak >= 2 {
                // panels decay at least geometrically from here on
                err += 2.0 * mag;
                return Ok(QuadResult {
                    value: total,
                    abs_error: err,
                    evals,
                });
            }
        } else {
            small_streak = 0;
        }
        prev_mag = mag;
        hi = lo;
        if panel + 1 == MAX_PANELS {
            return Err(Error::Nonconvergence(format!(
                "panel decomposition toward 0 did not settle (last panel {mag:.3e})"
            )));
        }
    }
    unreachable!()
}

/// Integrate over an interval that may be improper at either end.
/// `lo == 0.0` means the lower endpoint is the improper limit alpha -> 0;
/// `hi == f64::INFINITY` means beta -> infinity.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult> {
    match (lo == 0.0, hi.is_infinite()) {
        (false, false) => integrate(f, lo, hi, tol),
        (false, true) => integrate_to_infinity(f, lo, tol),
        (true, false) => integrate_from_zero(f, hi, tol),
        (true, true) => {
            let left = integrate_from_zero(&f, 1.0, tol)?;
            let right = integrate_to_infinity(&f, 1.0, tol)?;
            Ok(QuadResult {
                value: left.value + right.value,
                abs_error: left.abs_error + right.abs_error,
                evals: left.evals + right.evals,
            })
        }
    }
}

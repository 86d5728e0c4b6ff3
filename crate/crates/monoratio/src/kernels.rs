//! Kernel families and their structural classes.
//!
//! Discrete families w_k(t) and continuous kernels w(t,x) are the building
//! blocks of every series and transform ratio in this crate. Each family
//! ships closed-form evaluators for the value and the first two derivatives
//! (in t for discrete families, in x for continuous kernels), a table of
//! declared class memberships, and a verifier that checks the defining
//! conditions of each class numerically on a grid.
//!
//! Class cheat sheet (all conditions for every fixed point of the other
//! variable):
//!
//! - `DW11` / `DW12`: positive family, k -> w_k'/w_k increasing / decreasing.
//! - `DW2`: w_k/w_0 and w_k'/w_1' vanish at the lower endpoint, w_0' = 0,
//!   w_k' >= 0, and k -> w_k''/w_k' increasing.
//! - `DW3`: the mirror image at the upper endpoint with w_k' <= 0 and
//!   k -> w_k''/w_k' decreasing.
//! - `CW11`/`CW12`/`CW2`/`CW3`: the continuous analogues with t taking the
//!   role of k and x the role of t.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDef, Spacing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscreteKernel {
    /// w_k(t) = t^k
    Power,
    /// w_k(t) = t^{-k}
    InversePower,
    /// w_k(t) = e^{-kt}
    ExpDecay,
    /// w_k(t) = (k+1)^{-t}
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContinuousKernel {
    /// w(t,x) = x^t
    Power,
    /// w(t,x) = x^{-t}
    InversePower,
    /// w(t,x) = e^{-tx}
    ExpDecay,
    /// w(t,x) = (t+1)^{-x}
    ShiftedPower,
    /// w(t,x) = t^{x-1}; usable with the monotone-ratio rule only, it
    /// belongs to none of the endpoint-normalized classes.
    Mellin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscreteClass {
    DW11,
    DW12,
    DW2,
    DW3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContinuousClass {
    CW11,
    CW12,
    CW2,
    CW3,
}

impl DiscreteKernel {
    pub const ALL: [DiscreteKernel; 4] = [
        DiscreteKernel::Power,
        DiscreteKernel::InversePower,
        DiscreteKernel::ExpDecay,
        DiscreteKernel::Dirichlet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiscreteKernel::Power => "power",
            DiscreteKernel::InversePower => "inverse-power",
            DiscreteKernel::ExpDecay => "expdecay",
            DiscreteKernel::Dirichlet => "dirichlet",
        }
    }

    /// w_k^{(order)}(t) in closed form; `order` is 0, 1, or 2.
    pub fn eval(self, k: u32, t: f64, order: u8) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "discrete kernel {} requires t > 0, got {t}",
                self.name()
            )));
        }
        if order > 2 {
            return Err(Error::InvalidInput(format!("derivative order {order} > 2")));
        }
        let kf = f64::from(k);
        Ok(match self {
            DiscreteKernel::Power => match order {
                0 => t.powi(k as i32),
                1 => {
                    if k == 0 {
                        0.0
                    } else {
                        kf * t.powi(k as i32 - 1)
                    }
                }
                _ => {
                    if k < 2 {
                        0.0
                    } else {
                        kf * (kf - 1.0) * t.powi(k as i32 - 2)
                    }
                }
            },
            DiscreteKernel::InversePower => match order {
                0 => t.powi(-(k as i32)),
                1 => {
                    if k == 0 {
                        0.0
                    } else {
                        -kf * t.powi(-(k as i32) - 1)
                    }
                }
                _ => {
                    if k == 0 {
                        0.0
                    } else {
                        kf * (kf + 1.0) * t.powi(-(k as i32) - 2)
                    }
                }
            },
            DiscreteKernel::ExpDecay => {
                let w = (-kf * t).exp();
                match order {
                    0 => w,
                    1 => -kf * w,
                    _ => kf * kf * w,
                }
            }
            DiscreteKernel::Dirichlet => {
                let l = (kf + 1.0).ln();
                let w = (-t * l).exp();
                match order {
                    0 => w,
                    1 => -l * w,
                    _ => l * l * w,
                }
            }
        })
    }

    /// ln |w_k^{(order)}(t)|, or `None` where the derivative is identically
    /// zero. Stable for arguments where the plain value would overflow.
    pub fn ln_abs_eval(self, k: u32, t: f64, order: u8) -> Option<f64> {
        let kf = f64::from(k);
        match self {
            DiscreteKernel::Power => {
                let base = kf * t.ln();
                match order {
                    0 => Some(base),
                    1 => (k >= 1).then(|| kf.ln() + (kf - 1.0) * t.ln()),
                    _ => (k >= 2).then(|| (kf * (kf - 1.0)).ln() + (kf - 2.0) * t.ln()),
                }
            }
            DiscreteKernel::InversePower => {
                let lt = t.ln();
                match order {
                    0 => Some(-kf * lt),
                    1 => (k >= 1).then(|| kf.ln() - (kf + 1.0) * lt),
                    _ => (k >= 1).then(|| (kf * (kf + 1.0)).ln() - (kf + 2.0) * lt),
                }
            }
            DiscreteKernel::ExpDecay => match order {
                0 => Some(-kf * t),
                1 => (k >= 1).then(|| kf.ln() - kf * t),
                _ => (k >= 1).then(|| 2.0 * kf.ln() - kf * t),
            },
            DiscreteKernel::Dirichlet => {
                let l = (kf + 1.0).ln();
                match order {
                    0 => Some(-t * l),
                    1 => (k >= 1).then(|| l.ln() - t * l),
                    _ => (k >= 1).then(|| 2.0 * l.ln() - t * l),
                }
            }
        }
    }

    /// Sign of the nonzero w_k^{(order)} terms; independent of k for every
    /// family here, which is what makes log-domain summation possible.
    pub fn deriv_sign(self, order: u8) -> f64 {
        match (self, order) {
            (_, 0) | (DiscreteKernel::Power, _) => 1.0,
            (_, 1) => -1.0,
            (_, _) => 1.0,
        }
    }

    pub fn declared_classes(self) -> &'static [DiscreteClass] {
        match self {
            DiscreteKernel::Power => &[DiscreteClass::DW11, DiscreteClass::DW2],
            DiscreteKernel::InversePower
            | DiscreteKernel::ExpDecay
            | DiscreteKernel::Dirichlet => &[DiscreteClass::DW12, DiscreteClass::DW3],
        }
    }
}

impl ContinuousKernel {
    pub const ALL: [ContinuousKernel; 5] = [
        ContinuousKernel::Power,
        ContinuousKernel::InversePower,
        ContinuousKernel::ExpDecay,
        ContinuousKernel::ShiftedPower,
        ContinuousKernel::Mellin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ContinuousKernel::Power => "power",
            ContinuousKernel::InversePower => "inverse-power",
            ContinuousKernel::ExpDecay => "explace",
            ContinuousKernel::ShiftedPower => "shifted-power",
            ContinuousKernel::Mellin => "mellin",
        }
    }

    /// d^order/dx^order w(t, x) in closed form.
    pub fn eval(self, t: f64, x: f64, order: u8) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "continuous kernel {} requires x > 0, got {x}",
                self.name()
            )));
        }
        if order > 2 {
            return Err(Error::InvalidInput(format!("derivative order {order} > 2")));
        }
        let t_ok = match self {
            ContinuousKernel::Mellin => t > 0.0,
            _ => t >= 0.0,
        };
        if !t_ok || !t.is_finite() {
            return Err(Error::Domain(format!(
                "continuous kernel {} got t = {t} outside its domain",
                self.name()
            )));
        }
        Ok(self.eval_raw(t, x, order))
    }

    /// ln |d^order/dx^order w(t, x)|, or `None` where the derivative is
    /// identically zero in x. Keeps endpoint-ratio checks clear of
    /// underflow.
    pub fn ln_abs_eval(self, t: f64, x: f64, order: u8) -> Option<f64> {
        match self {
            ContinuousKernel::Power => {
                let lx = x.ln();
                match order {
                    0 => Some(t * lx),
                    1 => (t != 0.0).then(|| t.abs().ln() + (t - 1.0) * lx),
                    _ => (t != 0.0 && t != 1.0)
                        .then(|| (t * (t - 1.0)).abs().ln() + (t - 2.0) * lx),
                }
            }
            ContinuousKernel::InversePower => {
                let lx = x.ln();
                match order {
                    0 => Some(-t * lx),
                    1 => (t != 0.0).then(|| t.abs().ln() - (t + 1.0) * lx),
                    _ => (t != 0.0).then(|| (t * (t + 1.0)).abs().ln() - (t + 2.0) * lx),
                }
            }
            ContinuousKernel::ExpDecay => match order {
                0 => Some(-t * x),
                1 => (t != 0.0).then(|| t.abs().ln() - t * x),
                _ => (t != 0.0).then(|| 2.0 * t.abs().ln() - t * x),
            },
            ContinuousKernel::ShiftedPower => {
                let l = (t + 1.0).ln();
                match order {
                    0 => Some(-x * l),
                    1 => (l != 0.0).then(|| l.ln() - x * l),
                    _ => (l != 0.0).then(|| 2.0 * l.ln() - x * l),
                }
            }
            ContinuousKernel::Mellin => {
                let lt = t.ln();
                match order {
                    0 => Some((x - 1.0) * lt),
                    1 => (lt != 0.0).then(|| lt.abs().ln() + (x - 1.0) * lt),
                    _ => (lt != 0.0).then(|| 2.0 * lt.abs().ln() + (x - 1.0) * lt),
                }
            }
        }
    }

    /// Same math as [`Self::eval`] without domain validation, for use inside
    /// quadrature closures where x and order were checked up front.
    pub(crate) fn eval_raw(self, t: f64, x: f64, order: u8) -> f64 {
        match self {
            ContinuousKernel::Power => {
                let lx = x.ln();
                match order {
                    0 => (t * lx).exp(),
                    1 => t * ((t - 1.0) * lx).exp(),
                    _ => t * (t - 1.0) * ((t - 2.0) * lx).exp(),
                }
            }
            ContinuousKernel::InversePower => {
                let lx = x.ln();
                match order {
                    0 => (-t * lx).exp(),
                    1 => -t * ((-t - 1.0) * lx).exp(),
                    _ => t * (t + 1.0) * ((-t - 2.0) * lx).exp(),
                }
            }
            ContinuousKernel::ExpDecay => {
                let w = (-t * x).exp();
                match order {
                    0 => w,
                    1 => -t * w,
                    _ => t * t * w,
                }
            }
            ContinuousKernel::ShiftedPower => {
                let l = (t + 1.0).ln();
                let w = (-x * l).exp();
                match order {
                    0 => w,
                    1 => -l * w,
                    _ => l * l * w,
                }
            }
            ContinuousKernel::Mellin => {
                let lt = t.ln();
                let w = ((x - 1.0) * lt).exp();
                match order {
                    0 => w,
                    1 => lt * w,
                    _ => lt * lt * w,
                }
            }
        }
    }

    /// Default [alpha, beta] rectangle edge used by the class verifier.
    pub fn default_interval(self) -> (f64, f64) {
        match self {
            ContinuousKernel::Mellin => (0.5, 2.0),
            _ => (0.0, 2.0),
        }
    }

    pub fn declared_classes(self) -> &'static [ContinuousClass] {
        match self {
            ContinuousKernel::Power => &[ContinuousClass::CW11, ContinuousClass::CW2],
            ContinuousKernel::InversePower
            | ContinuousKernel::ExpDecay
            | ContinuousKernel::ShiftedPower => &[ContinuousClass::CW12, ContinuousClass::CW3],
            ContinuousKernel::Mellin => &[ContinuousClass::CW11],
        }
    }
}

/// Grid used by the class verifier: `points` samples of the free variable
/// (t for discrete families, x for continuous kernels), `k_max` sequence
/// indices, and a geometric endpoint ladder of `ladder_len` rungs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VerifyGrid {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    pub k_max: u32,
    pub ladder_len: u32,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            points: 32,
            lo: 0.05,
            hi: 8.0,
            spacing: Spacing::Log,
            k_max: 16,
            ladder_len: 30,
        }
    }
}

impl VerifyGrid {
    fn sample_points(&self) -> Result<Vec<f64>> {
        Ok(GridDef::new(self.points, self.lo, self.hi, self.spacing)?.points())
    }

    /// Geometric ladder approaching the lower endpoint 0.
    fn lower_ladder(&self) -> Vec<f64> {
        (0..self.ladder_len).map(|j| self.lo * 0.5f64.powi(j as i32)).collect()
    }

    /// Geometric ladder toward +infinity.
    fn upper_ladder(&self) -> Vec<f64> {
        (0..self.ladder_len).map(|j| self.hi * 2.0f64.powi(j as i32)).collect()
    }
}

/// Outcome of checking one numbered condition of a class definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    /// On failure, the sample that witnessed it: (point, k index if any, value).
    pub witness: Option<(f64, Option<u32>, f64)>,
}

/// Full verification report for one (kernel, class) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub kernel: String,
    pub class: String,
    pub conditions: Vec<ConditionReport>,
    pub passed: bool,
    /// The endpoint constant c = w_0 at the normalization endpoint, when the
    /// class definition fixes one. Recorded, but only finiteness and
    /// positivity are enforced.
    pub endpoint_constant: Option<f64>,
}

impl ClassReport {
    fn finish(kernel: String, class: String, conditions: Vec<ConditionReport>, c: Option<f64>) -> Self {
        let passed = conditions.iter().all(|c| c.passed);
        ClassReport {
            kernel,
            class,
            conditions,
            passed,
            endpoint_constant: c,
        }
    }
}

const MONOTONE_SLACK: f64 = 1e-12;
const DECAY_TARGET: f64 = 1e-6;

fn pass(condition: &str) -> ConditionReport {
    ConditionReport {
        condition: condition.to_string(),
        passed: true,
        witness: None,
    }
}

fn fail(condition: &str, point: f64, k: Option<u32>, value: f64) -> ConditionReport {
    ConditionReport {
        condition: condition.to_string(),
        passed: false,
        witness: Some((point, k, value)),
    }
}

// Requires the ladder samples to decay monotonically (with slack) and to end
// below the decay target. `values` follows the ladder order, i.e. toward the
// endpoint.
fn check_endpoint_decay(condition: &str, ladder: &[f64], values: &[f64]) -> ConditionReport {
    let tail = 6.min(values.len());
    for j in values.len() - tail..values.len() {
        if j > 0 && values[j] > values[j - 1] * (1.0 + 1e-9) + 1e-300 {
            return fail(condition, ladder[j], None, values[j]);
        }
    }
    let last = *values.last().unwrap();
    if last.abs() <= DECAY_TARGET {
        pass(condition)
    } else {
        fail(condition, *ladder.last().unwrap(), None, last)
    }
}

fn check_sequence_monotone(
    condition: &str,
    point: f64,
    seq: &[(u32, f64)],
    increasing: bool,
) -> ConditionReport {
    for w in seq.windows(2) {
        let (k0, v0) = w[0];
        let (_, v1) = w[1];
        let scale = v0.abs().max(v1.abs()).max(1.0);
        let delta = v1 - v0;
        let ok = if increasing {
            delta >= -MONOTONE_SLACK * scale
        } else {
            delta <= MONOTONE_SLACK * scale
        };
        if !ok {
            return fail(condition, point, Some(k0), delta);
        }
    }
    pass(condition)
}

/// Check every numbered condition of `class` for `kernel` on `grid`.
pub fn verify_discrete_class(
    kernel: DiscreteKernel,
    class: DiscreteClass,
    grid: &VerifyGrid,
) -> Result<ClassReport> {
    let ts = grid.sample_points()?;
    let ks: Vec<u32> = (0..=grid.k_max).collect();
    let mut conds = Vec::new();
    let mut endpoint_c = None;

    // (i) positivity of w_k on the grid, derivatives finite.
    let mut positivity = pass("(i) positivity and finite derivatives");
    'pos: for &t in &ts {
        for &k in &ks {
            let w = kernel.eval(k, t, 0)?;
            if !(w > 0.0) || !w.is_finite() {
                positivity = fail("(i) positivity and finite derivatives", t, Some(k), w);
                break 'pos;
            }
            for order in 1..=2u8 {
                let d = kernel.eval(k, t, order)?;
                if !d.is_finite() {
                    positivity = fail("(i) positivity and finite derivatives", t, Some(k), d);
                    break 'pos;
                }
            }
        }
    }
    conds.push(positivity);

    match class {
        DiscreteClass::DW11 | DiscreteClass::DW12 => {
            let increasing = class == DiscreteClass::DW11;
            let label = "(ii) k -> w_k'/w_k monotone";
            let mut cond = pass(label);
            for &t in &ts {
                let seq: Vec<(u32, f64)> = ks
                    .iter()
                    .map(|&k| Ok((k, kernel.eval(k, t, 1)? / kernel.eval(k, t, 0)?)))
                    .collect::<Result<_>>()?;
                let r = check_sequence_monotone(label, t, &seq, increasing);
                if !r.passed {
                    cond = r;
                    break;
                }
            }
            conds.push(cond);
        }
        DiscreteClass::DW2 | DiscreteClass::DW3 => {
            let at_lower = class == DiscreteClass::DW2;
            let ladder = if at_lower { grid.lower_ladder() } else { grid.upper_ladder() };

            // (ii) endpoint normalization: w_k/w_0 -> 0 (k >= 1),
            // w_0 -> c in (0, inf), w_k'/w_1' -> 0 (k >= 2). Ratios are
            // formed in log space so deep ladder rungs never hit 0/0.
            let label2 = "(ii) endpoint normalization";
            let mut cond2 = pass(label2);
            let c = kernel.eval(0, *ladder.last().unwrap(), 0)?;
            endpoint_c = Some(c);
            if !(c > 0.0) || !c.is_finite() {
                cond2 = fail(label2, *ladder.last().unwrap(), Some(0), c);
            }
            if cond2.passed {
                for &k in ks.iter().filter(|&&k| k >= 1).take(4) {
                    let vals: Vec<f64> = ladder
                        .iter()
                        .map(|&t| {
                            let num = kernel.ln_abs_eval(k, t, 0);
                            let den = kernel.ln_abs_eval(0, t, 0);
                            match (num, den) {
                                (Some(n), Some(d)) => (n - d).exp(),
                                _ => 0.0,
                            }
                        })
                        .collect();
                    let r = check_endpoint_decay(label2, &ladder, &vals);
                    if !r.passed {
                        cond2 = ConditionReport {
                            witness: r.witness.map(|(p, _, v)| (p, Some(k), v)),
                            ..r
                        };
                        break;
                    }
                }
            }
            if cond2.passed {
                for &k in ks.iter().filter(|&&k| k >= 2).take(4) {
                    let vals: Vec<f64> = ladder
                        .iter()
                        .map(|&t| {
                            let num = kernel.ln_abs_eval(k, t, 1);
                            let den = kernel.ln_abs_eval(1, t, 1);
                            match (num, den) {
                                (Some(n), Some(d)) => (n - d).exp(),
                                _ => 0.0,
                            }
                        })
                        .collect();
                    let r = check_endpoint_decay(label2, &ladder, &vals);
                    if !r.passed {
                        cond2 = ConditionReport {
                            witness: r.witness.map(|(p, _, v)| (p, Some(k), v)),
                            ..r
                        };
                        break;
                    }
                }
            }
            conds.push(cond2);

            // (iii) w_0' = 0 and the k >= 1 derivatives keep one sign.
            let want_nonneg = at_lower;
            let label3 = if want_nonneg {
                "(iii) w_0' = 0 and w_k' >= 0"
            } else {
                "(iii) w_0' = 0 and w_k' <= 0"
            };
            let mut cond3 = pass(label3);
            'sign: for &t in &ts {
                let d0 = kernel.eval(0, t, 1)?;
                if d0.abs() > 1e-14 {
                    cond3 = fail(label3, t, Some(0), d0);
                    break;
                }
                for &k in ks.iter().filter(|&&k| k >= 1) {
                    let d = kernel.eval(k, t, 1)?;
                    let ok = if want_nonneg { d >= -1e-14 } else { d <= 1e-14 };
                    if !ok {
                        cond3 = fail(label3, t, Some(k), d);
                        break 'sign;
                    }
                }
            }
            conds.push(cond3);

            // (iv) k -> w_k''/w_k' monotone over the indices with w_k' != 0.
            let increasing = at_lower;
            let label4 = if increasing {
                "(iv) k -> w_k''/w_k' increasing"
            } else {
                "(iv) k -> w_k''/w_k' decreasing"
            };
            let mut cond4 = pass(label4);
            for &t in &ts {
                let seq: Vec<(u32, f64)> = ks
                    .iter()
                    .filter(|&&k| k >= 1)
                    .map(|&k| Ok((k, kernel.eval(k, t, 2)? / kernel.eval(k, t, 1)?)))
                    .collect::<Result<_>>()?;
                let r = check_sequence_monotone(label4, t, &seq, increasing);
                if !r.passed {
                    cond4 = r;
                    break;
                }
            }
            conds.push(cond4);
        }
    }

    Ok(ClassReport::finish(
        kernel.name().to_string(),
        format!("{class:?}"),
        conds,
        endpoint_c,
    ))
}

/// Continuous analogue of [`verify_discrete_class`]; the grid's `lo..hi`
/// samples the x variable while t runs over the kernel's default interval.
pub fn verify_continuous_class(
    kernel: ContinuousKernel,
    class: ContinuousClass,
    grid: &VerifyGrid,
) -> Result<ClassReport> {
    let xs = grid.sample_points()?;
    let (alpha, beta) = kernel.default_interval();
    // t samples: alpha plus interior points up to beta.
    let mut t_pts = vec![alpha];
    let interior = GridDef::linear(grid.points, alpha + (beta - alpha) / 64.0, beta)?.points();
    t_pts.extend(interior);
    let mut conds = Vec::new();
    let mut endpoint_c = None;

    let mut positivity = pass("(i) positivity and finite derivatives");
    'pos: for &x in &xs {
        for &t in &t_pts {
            let w = kernel.eval(t, x, 0)?;
            if !(w > 0.0) || !w.is_finite() {
                positivity = fail("(i) positivity and finite derivatives", x, None, w);
                break 'pos;
            }
            for order in 1..=2u8 {
                let d = kernel.eval(t, x, order)?;
                if !d.is_finite() {
                    positivity = fail("(i) positivity and finite derivatives", x, None, d);
                    break 'pos;
                }
            }
        }
    }
    conds.push(positivity);

    match class {
        ContinuousClass::CW11 | ContinuousClass::CW12 => {
            let increasing = class == ContinuousClass::CW11;
            let label = "(ii) t -> w_x/w monotone";
            let mut cond = pass(label);
            for &x in &xs {
                let seq: Vec<(u32, f64)> = t_pts
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| Ok((i as u32, kernel.eval(t, x, 1)? / kernel.eval(t, x, 0)?)))
                    .collect::<Result<_>>()?;
                let r = check_sequence_monotone(label, x, &seq, increasing);
                if !r.passed {
                    // translate the index witness back into a t value
                    cond = ConditionReport {
                        witness: r
                            .witness
                            .map(|(_, i, v)| (t_pts[i.unwrap_or(0) as usize], None, v)),
                        ..r
                    };
                    break;
                }
            }
            conds.push(cond);
        }
        ContinuousClass::CW2 | ContinuousClass::CW3 => {
            let at_lower = class == ContinuousClass::CW2;
            let ladder = if at_lower { grid.lower_ladder() } else { grid.upper_ladder() };

            // (ii) endpoint normalization with t = alpha as the reference
            // for w and a fixed interior anchor for w_x (the derivative at
            // alpha is identically zero). The checked t values sit at least
            // half the interval away from the reference: the decay rate in
            // x scales with that separation, so this is what a finite
            // ladder can certify.
            let label2 = "(ii) endpoint normalization";
            let mut cond2 = pass(label2);
            let c = kernel.eval(alpha, *ladder.last().unwrap(), 0)?;
            endpoint_c = Some(c);
            if !(c > 0.0) || !c.is_finite() {
                cond2 = fail(label2, *ladder.last().unwrap(), None, c);
            }
            let half = (beta - alpha) / 2.0;
            let t_ref = alpha + (beta - alpha) / 16.0;
            if cond2.passed {
                for &t in t_pts.iter().filter(|&&t| t >= alpha + half).step_by(8) {
                    let vals: Vec<f64> = ladder
                        .iter()
                        .map(|&x| {
                            let num = kernel.ln_abs_eval(t, x, 0);
                            let den = kernel.ln_abs_eval(alpha, x, 0);
                            match (num, den) {
                                (Some(n), Some(d)) => (n - d).exp(),
                                _ => 0.0,
                            }
                        })
                        .collect();
                    let r = check_endpoint_decay(label2, &ladder, &vals);
                    if !r.passed {
                        cond2 = r;
                        break;
                    }
                }
            }
            if cond2.passed {
                for &t in t_pts.iter().filter(|&&t| t >= t_ref + half).step_by(8) {
                    let vals: Vec<f64> = ladder
                        .iter()
                        .map(|&x| {
                            let num = kernel.ln_abs_eval(t, x, 1);
                            let den = kernel.ln_abs_eval(t_ref, x, 1);
                            match (num, den) {
                                (Some(n), Some(d)) => (n - d).exp(),
                                _ => 0.0,
                            }
                        })
                        .collect();
                    let r = check_endpoint_decay(label2, &ladder, &vals);
                    if !r.passed {
                        cond2 = r;
                        break;
                    }
                }
            }
            conds.push(cond2);

            let want_nonneg = at_lower;
            let label3 = if want_nonneg {
                "(iii) w_x(alpha, x) = 0 and w_x >= 0"
            } else {
                "(iii) w_x(alpha, x) = 0 and w_x <= 0"
            };
            let mut cond3 = pass(label3);
            'sign: for &x in &xs {
                let d0 = kernel.eval(alpha, x, 1)?;
                if d0.abs() > 1e-14 {
                    cond3 = fail(label3, x, None, d0);
                    break;
                }
                for &t in t_pts.iter().filter(|&&t| t > alpha) {
                    let d = kernel.eval(t, x, 1)?;
                    let ok = if want_nonneg { d >= -1e-14 } else { d <= 1e-14 };
                    if !ok {
                        cond3 = fail(label3, x, None, d);
                        break 'sign;
                    }
                }
            }
            conds.push(cond3);

            let increasing = at_lower;
            let label4 = if increasing {
                "(iv) t -> w_xx/w_x increasing"
            } else {
                "(iv) t -> w_xx/w_x decreasing"
            };
            let mut cond4 = pass(label4);
            for &x in &xs {
                let seq: Vec<(u32, f64)> = t_pts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| t > alpha)
                    .map(|(i, &t)| Ok((i as u32, kernel.eval(t, x, 2)? / kernel.eval(t, x, 1)?)))
                    .collect::<Result<_>>()?;
                let r = check_sequence_monotone(label4, x, &seq, increasing);
                if !r.passed {
                    cond4 = r;
                    break;
                }
            }
            conds.push(cond4);
        }
    }

    Ok(ClassReport::finish(
        kernel.name().to_string(),
        format!("{class:?}"),
        conds,
        endpoint_c,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn discrete_eval_closed_forms() {
        // d/dt t^3 at t=2
        assert_relative_eq!(
            DiscreteKernel::Power.eval(3, 2.0, 1).unwrap(),
            12.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            DiscreteKernel::ExpDecay.eval(2, 0.5, 0).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-14
        );
        // d/dt 2^{-t} at t=1
        assert_relative_eq!(
            DiscreteKernel::Dirichlet.eval(1, 1.0, 1).unwrap(),
            -std::f64::consts::LN_2 / 2.0,
            max_relative = 1e-14
        );
        assert!(DiscreteKernel::Power.eval(3, -1.0, 0).is_err());
        assert!(DiscreteKernel::Power.eval(3, 1.0, 3).is_err());
    }

    #[test]
    fn continuous_eval_closed_forms() {
        assert_relative_eq!(
            ContinuousKernel::ExpDecay.eval(1.0, 2.0, 1).unwrap(),
            -(-2.0f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ContinuousKernel::ShiftedPower.eval(0.0, 5.0, 0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        // d^2/dx^2 x^2 = 2
        assert_relative_eq!(
            ContinuousKernel::Power.eval(2.0, 3.0, 2).unwrap(),
            2.0,
            max_relative = 1e-13
        );
        assert!(ContinuousKernel::ExpDecay.eval(1.0, 0.0, 0).is_err());
        assert!(ContinuousKernel::Mellin.eval(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn ln_abs_matches_linear_eval() {
        for kernel in DiscreteKernel::ALL {
            for order in 0..=2u8 {
                for k in 0..6u32 {
                    for &t in &[0.3, 1.7, 4.0] {
                        let v = kernel.eval(k, t, order).unwrap();
                        match kernel.ln_abs_eval(k, t, order) {
                            None => assert_eq!(v, 0.0, "{kernel:?} k={k} order={order}"),
                            Some(ln) => {
                                assert_relative_eq!(
                                    ln.exp(),
                                    v.abs(),
                                    max_relative = 1e-12
                                );
                                if v != 0.0 {
                                    assert_eq!(v.signum(), kernel.deriv_sign(order));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_consistency_with_finite_differences() {
        let h = 1e-6;
        for kernel in DiscreteKernel::ALL {
            for k in 0..8u32 {
                for &t in &[0.4, 1.0, 2.5] {
                    let fd = (kernel.eval(k, t + h, 0).unwrap() - kernel.eval(k, t - h, 0).unwrap())
                        / (2.0 * h);
                    let an = kernel.eval(k, t, 1).unwrap();
                    let scale = an.abs().max(1e-9);
                    assert!(
                        (fd - an).abs() / scale < 1e-6,
                        "{kernel:?} k={k} t={t}: {fd} vs {an}"
                    );
                }
            }
        }
        for kernel in ContinuousKernel::ALL {
            for &t in &[0.3, 1.2] {
                for &x in &[0.7, 2.0, 5.0] {
                    let fd = (kernel.eval(t, x + h, 0).unwrap() - kernel.eval(t, x - h, 0).unwrap())
                        / (2.0 * h);
                    let an = kernel.eval(t, x, 1).unwrap();
                    let scale = an.abs().max(1e-9);
                    assert!(
                        (fd - an).abs() / scale < 1e-5,
                        "{kernel:?} t={t} x={x}: {fd} vs {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn declared_discrete_classes_verify() {
        let grid = VerifyGrid::default();
        for kernel in DiscreteKernel::ALL {
            for &class in kernel.declared_classes() {
                let report = verify_discrete_class(kernel, class, &grid).unwrap();
                assert!(
                    report.passed,
                    "{kernel:?} should verify {class:?}: {:?}",
                    report.conditions
                );
            }
        }
    }

    #[test]
    fn declared_continuous_classes_verify() {
        let grid = VerifyGrid::default();
        for kernel in ContinuousKernel::ALL {
            for &class in kernel.declared_classes() {
                let report = verify_continuous_class(kernel, class, &grid).unwrap();
                assert!(
                    report.passed,
                    "{kernel:?} should verify {class:?}: {:?}",
                    report.conditions
                );
            }
        }
    }

    #[test]
    fn negative_control_power_is_not_dw12() {
        let report = verify_discrete_class(
            DiscreteKernel::Power,
            DiscreteClass::DW12,
            &VerifyGrid::default(),
        )
        .unwrap();
        assert!(!report.passed);
        // the failing condition is the monotonicity one, with a witness
        let failed: Vec<_> = report.conditions.iter().filter(|c| !c.passed).collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].condition.contains("(ii)"));
        assert!(failed[0].witness.is_some());
    }

    #[test]
    fn negative_control_mellin_is_not_cw3() {
        let report = verify_continuous_class(
            ContinuousKernel::Mellin,
            ContinuousClass::CW3,
            &VerifyGrid::default(),
        )
        .unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn endpoint_constant_recorded() {
        let report = verify_discrete_class(
            DiscreteKernel::ExpDecay,
            DiscreteClass::DW3,
            &VerifyGrid::default(),
        )
        .unwrap();
        let c = report.endpoint_constant.unwrap();
        assert!(c > 0.0 && c.is_finite());
    }
}

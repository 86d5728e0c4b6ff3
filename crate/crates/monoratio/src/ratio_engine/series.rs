//! Truncated evaluation of kernel series A(t) = sum_k a_k w_k(t), their
//! termwise derivatives, ratios, H, and endpoint limits of H.
//!
//! Two summation paths coexist. Sources with nonnegative coefficients are
//! summed in log space (the nonzero terms of w_k^(l) share one sign per
//! family and order, so the sum is a pure log-sum-exp); this stays stable
//! where t^k or 1/Gamma(ak+b) leave f64 range. Signed coefficient sources
//! fall back to direct summation. Infinite sums stop once the observed term
//! ratio certifies a geometric tail below the problem tolerance.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernels::DiscreteKernel;
use crate::specfun::{self, EvalResult};

use super::{
    estimate_from_ladder, EndpointSide, HParts, LadderSample, LimitEstimate, LimitValue,
    SignClass, DERIVATIVE_ZERO_BAND,
};

/// A coefficient sequence a_0, a_1, ... given as a finite list or a rule.
#[derive(Clone)]
pub struct CoefficientSource {
    label: String,
    eval: Arc<dyn Fn(u32) -> f64 + Send + Sync>,
    ln_eval: Arc<dyn Fn(u32) -> Option<f64> + Send + Sync>,
    nonneg: bool,
    finite_len: Option<u32>,
}

impl std::fmt::Debug for CoefficientSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientSource")
            .field("label", &self.label)
            .field("nonneg", &self.nonneg)
            .field("finite_len", &self.finite_len)
            .finish()
    }
}

impl CoefficientSource {
    pub fn from_list(values: Vec<f64>) -> Self {
        let nonneg = values.iter().all(|&v| v >= 0.0);
        let label = format!("seq:{values:?}");
        let len = values.len() as u32;
        let vals = Arc::new(values);
        let vals_ln = Arc::clone(&vals);
        CoefficientSource {
            label,
            eval: Arc::new(move |k| vals.get(k as usize).copied().unwrap_or(0.0)),
            ln_eval: Arc::new(move |k| {
                let v = vals_ln.get(k as usize).copied().unwrap_or(0.0);
                (v > 0.0).then(|| v.ln())
            }),
            nonneg,
            finite_len: Some(len),
        }
    }

    /// a_k = c for every k.
    pub fn constant(c: f64) -> Self {
        CoefficientSource {
            label: format!("const-seq:{c}"),
            eval: Arc::new(move |_| c),
            ln_eval: Arc::new(move |_| (c > 0.0).then(|| c.ln())),
            nonneg: c >= 0.0,
            finite_len: None,
        }
    }

    /// a_k = 1 / Gamma(a k + b); the log accessor uses -ln Gamma directly so
    /// large indices never underflow.
    pub fn recip_gamma(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::Domain(format!(
                "reciprocal-gamma coefficients need a, b > 0, got ({a}, {b})"
            )));
        }
        Ok(CoefficientSource {
            label: format!("recip-gamma:{a},{b}"),
            eval: Arc::new(move |k| {
                specfun::reciprocal_gamma(a * f64::from(k) + b)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            }),
            ln_eval: Arc::new(move |k| {
                specfun::ln_gamma(a * f64::from(k) + b).ok().map(|r| -r.value)
            }),
            nonneg: true,
            finite_len: None,
        })
    }

    /// Arbitrary rule. `nonneg` asserts that `f` never returns a negative
    /// value, which unlocks the log-domain summation path.
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(u32) -> f64 + Send + Sync + 'static,
        nonneg: bool,
    ) -> Self {
        let f = Arc::new(f);
        let f_ln = Arc::clone(&f);
        CoefficientSource {
            label: label.into(),
            eval: Arc::new(move |k| f(k)),
            ln_eval: Arc::new(move |k| {
                let v = f_ln(k);
                (v > 0.0).then(|| v.ln())
            }),
            nonneg,
            finite_len: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn value(&self, k: u32) -> f64 {
        (self.eval)(k)
    }

    pub fn ln_value(&self, k: u32) -> Option<f64> {
        (self.ln_eval)(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Numerator,
    Denominator,
}

/// Default hard cap on summed terms.
pub const DEFAULT_TERM_CAP: u32 = 100_000;

/// A series ratio A(t)/B(t) over one kernel family on (0, upper).
#[derive(Debug, Clone)]
pub struct SeriesRatioProblem {
    pub numerator: CoefficientSource,
    pub denominator: CoefficientSource,
    pub family: DiscreteKernel,
    /// Upper end of the domain; `f64::INFINITY` for the whole half-line.
    pub upper: f64,
    pub tol: f64,
    pub term_cap: u32,
}

impl SeriesRatioProblem {
    pub fn new(
        numerator: CoefficientSource,
        denominator: CoefficientSource,
        family: DiscreteKernel,
        upper: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
        }
        if !(upper > 0.0) {
            return Err(Error::InvalidInput(format!(
                "domain upper end must be positive, got {upper}"
            )));
        }
        if !denominator.nonneg {
            return Err(Error::InvalidInput(
                "denominator coefficients must be nonnegative".to_string(),
            ));
        }
        Ok(SeriesRatioProblem {
            numerator,
            denominator,
            family,
            upper,
            tol,
            term_cap: DEFAULT_TERM_CAP,
        })
    }

    pub fn with_term_cap(mut self, cap: u32) -> Self {
        self.term_cap = cap;
        self
    }

    fn source(&self, side: Side) -> &CoefficientSource {
        match side {
            Side::Numerator => &self.numerator,
            Side::Denominator => &self.denominator,
        }
    }

    fn check_interior(&self, t: f64) -> Result<()> {
        if !(t > 0.0) || !(t < self.upper) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "t = {t} is not interior to (0, {})",
                self.upper
            )));
        }
        Ok(())
    }

    /// Truncated sum of a_k w_k^{(order)}(t) with the tail bound below tol.
    pub fn eval_series(&self, side: Side, t: f64, order: u8) -> Result<EvalResult> {
        self.check_interior(t)?;
        let src = self.source(side);
        if src.nonneg {
            let ln = self.eval_series_ln(side, t, order)?;
            let sign = self.family.deriv_sign(order);
            let value = if ln.ln_mag == f64::NEG_INFINITY {
                0.0
            } else {
                sign * ln.ln_mag.exp()
            };
            let bound = if value == 0.0 {
                f64::MIN_POSITIVE
            } else if value.is_finite() {
                value.abs() * (ln.rel_bound + 4.0 * f64::EPSILON)
            } else {
                f64::INFINITY
            };
            Ok(EvalResult {
                value,
                abs_error_bound: bound,
                terms_used: ln.terms,
            })
        } else {
            self.eval_series_direct(side, t, order)
        }
    }

    fn eval_series_direct(&self, side: Side, t: f64, order: u8) -> Result<EvalResult> {
        let src = self.source(side);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        let mut prev_mag: Option<f64> = None;
        let mut ratios = [0.0f64; 3];
        let mut nratios = 0usize;
        let cap = src.finite_len.unwrap_or(self.term_cap);
        for k in 0..cap {
            let a = src.value(k);
            if !a.is_finite() {
                return Err(Error::Nonconvergence(format!(
                    "coefficient {} at k={k} is not finite",
                    src.label
                )));
            }
            let term = if a == 0.0 { 0.0 } else { a * self.family.eval(k, t, order)? };
            if !term.is_finite() {
                return Err(Error::Nonconvergence(format!(
                    "series term overflowed at k={k}, t={t}"
                )));
            }
            sum += term;
            abs_sum += term.abs();
            let mag = term.abs();
            if mag > 0.0 {
                if let Some(p) = prev_mag {
                    ratios[nratios % 3] = mag / p;
                    nratios += 1;
                }
                prev_mag = Some(mag);
            }
            if src.finite_len.is_none() && k >= 8 && nratios >= 3 {
                let rho = ratios.iter().copied().fold(0.0f64, f64::max);
                if rho < 0.9 {
                    let tail = mag * rho / (1.0 - rho);
                    if tail <= self.tol * abs_sum.max(1e-300) {
                        return Ok(EvalResult {
                            value: sum,
                            abs_error_bound: tail + 4.0 * f64::EPSILON * abs_sum,
                            terms_used: k + 1,
                        });
                    }
                }
            }
        }
        if src.finite_len.is_some() {
            Ok(EvalResult {
                value: sum,
                abs_error_bound: 4.0 * f64::EPSILON * abs_sum,
                terms_used: cap.max(1),
            })
        } else {
            Err(Error::Nonconvergence(format!(
                "series tail not certified after {cap} terms at t={t}"
            )))
        }
    }

    /// Log-domain sum: ln |sum_k a_k w_k^{(order)}(t)| for nonnegative
    /// coefficient sources. Returns ln = -inf for an identically zero sum.
    pub(crate) fn eval_series_ln(&self, side: Side, t: f64, order: u8) -> Result<LnSum> {
        self.check_interior(t)?;
        let src = self.source(side);
        debug_assert!(src.nonneg);
        let mut max_lt = f64::NEG_INFINITY;
        let mut sum_exp = 0.0;
        let mut prev_lt: Option<f64> = None;
        let mut diffs = [f64::NEG_INFINITY; 3];
        let mut ndiffs = 0usize;
        let mut terms = 0u32;
        let cap = src.finite_len.unwrap_or(self.term_cap);
        for k in 0..cap {
            let lt = match (src.ln_value(k), self.family.ln_abs_eval(k, t, order)) {
                (Some(la), Some(lw)) => la + lw,
                _ => {
                    continue;
                }
            };
            terms = k + 1;
            if lt > max_lt {
                sum_exp = sum_exp * (max_lt - lt).exp() + 1.0;
                max_lt = lt;
            } else {
                sum_exp += (lt - max_lt).exp();
            }
            if let Some(p) = prev_lt {
                diffs[ndiffs % 3] = lt - p;
                ndiffs += 1;
            }
            prev_lt = Some(lt);
            if src.finite_len.is_none() && k >= 8 && ndiffs >= 3 {
                let rho = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
                if rho < 0.9 {
                    let ln_sum = max_lt + sum_exp.ln();
                    let ln_tail = lt + (rho / (1.0 - rho)).ln();
                    if ln_tail - ln_sum <= self.tol.ln() {
                        return Ok(LnSum {
                            ln_mag: ln_sum,
                            rel_bound: (ln_tail - ln_sum).exp(),
                            terms: k + 1,
                        });
                    }
                }
            }
        }
        if src.finite_len.is_some() {
            let ln_mag = if sum_exp == 0.0 {
                f64::NEG_INFINITY
            } else {
                max_lt + sum_exp.ln()
            };
            Ok(LnSum {
                ln_mag,
                rel_bound: 4.0 * f64::EPSILON,
                terms: terms.max(1),
            })
        } else {
            Err(Error::Nonconvergence(format!(
                "series tail not certified after {cap} terms at t={t}"
            )))
        }
    }

    /// A(t)/B(t) with the evaluation error propagated below 10*tol relative.
    pub fn eval_series_ratio(&self, t: f64) -> Result<f64> {
        if self.numerator.nonneg && self.denominator.nonneg {
            let la = self.eval_series_ln(Side::Numerator, t, 0)?;
            let lb = self.eval_series_ln(Side::Denominator, t, 0)?;
            if lb.ln_mag == f64::NEG_INFINITY {
                return Err(Error::NonpositiveDenominator { at: t, value: 0.0 });
            }
            if la.ln_mag == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            Ok((la.ln_mag - lb.ln_mag).exp())
        } else {
            let a = self.eval_series(Side::Numerator, t, 0)?.value;
            let b = self.eval_series(Side::Denominator, t, 0)?.value;
            if !(b > 0.0) {
                return Err(Error::NonpositiveDenominator { at: t, value: b });
            }
            Ok(a / b)
        }
    }

    pub(crate) fn h_parts(&self, t: f64) -> Result<HParts> {
        if self.numerator.nonneg && self.denominator.nonneg {
            let la0 = self.eval_series_ln(Side::Numerator, t, 0)?;
            let lb0 = self.eval_series_ln(Side::Denominator, t, 0)?;
            let la1 = self.eval_series_ln(Side::Numerator, t, 1)?;
            let lb1 = self.eval_series_ln(Side::Denominator, t, 1)?;
            if lb0.ln_mag == f64::NEG_INFINITY {
                return Err(Error::NonpositiveDenominator { at: t, value: 0.0 });
            }
            // |B'| < band * |B| / t counts as a vanishing derivative
            if lb1.ln_mag - lb0.ln_mag < (DERIVATIVE_ZERO_BAND / t).ln() {
                return Err(Error::DerivativeDegeneracy { at: t });
            }
            let ratio = if la0.ln_mag == f64::NEG_INFINITY {
                0.0
            } else {
                (la0.ln_mag - lb0.ln_mag).exp()
            };
            let deriv_ratio = if la1.ln_mag == f64::NEG_INFINITY {
                0.0
            } else {
                (la1.ln_mag - lb1.ln_mag).exp()
            };
            Ok(HParts {
                ratio,
                deriv_ratio,
                h_scaled: deriv_ratio - ratio,
                ln_denom: lb0.ln_mag,
            })
        } else {
            let a0 = self.eval_series(Side::Numerator, t, 0)?.value;
            let b0 = self.eval_series(Side::Denominator, t, 0)?.value;
            let a1 = self.eval_series(Side::Numerator, t, 1)?.value;
            let b1 = self.eval_series(Side::Denominator, t, 1)?.value;
            if !(b0 > 0.0) {
                return Err(Error::NonpositiveDenominator { at: t, value: b0 });
            }
            if b1.abs() < DERIVATIVE_ZERO_BAND * b0 / t {
                return Err(Error::DerivativeDegeneracy { at: t });
            }
            let ratio = a0 / b0;
            let deriv_ratio = a1 / b1;
            Ok(HParts {
                ratio,
                deriv_ratio,
                h_scaled: deriv_ratio - ratio,
                ln_denom: b0.ln(),
            })
        }
    }

    /// H_{A,B}(t) = (A'/B') B - A.
    pub fn eval_h_series(&self, t: f64) -> Result<f64> {
        Ok(self.h_parts(t)?.h_value())
    }

    /// Sign of H at t, usable where H itself overflows.
    pub fn h_sign_at(&self, t: f64) -> Result<f64> {
        Ok(self.h_parts(t)?.h_scaled)
    }

    /// Closed form of H(0+) for the power-family lower endpoint:
    /// b_0 (a_1/b_1 - a_0/b_0).
    pub fn h_lower_closed_form(&self) -> Option<f64> {
        if self.family != DiscreteKernel::Power {
            return None;
        }
        let b0 = self.denominator.value(0);
        let b1 = self.denominator.value(1);
        if !(b0 > 0.0) || !(b1 > 0.0) {
            return None;
        }
        let a0 = self.numerator.value(0);
        let a1 = self.numerator.value(1);
        Some(b0 * (a1 / b1 - a0 / b0))
    }

    fn ladder_points(&self, endpoint: EndpointSide) -> Vec<f64> {
        match endpoint {
            EndpointSide::Lower => {
                let eps = if self.upper.is_finite() {
                    (self.upper / 2.0).min(1.0)
                } else {
                    0.5
                };
                (1..=12).map(|j| eps * 0.5f64.powi(j)).collect()
            }
            EndpointSide::Upper => {
                if self.upper.is_finite() {
                    (1..=12)
                        .map(|j| self.upper * (1.0 - 0.5f64.powi(j)))
                        .collect()
                } else {
                    (1..=12).map(|j| 2.0f64.powi(j)).collect()
                }
            }
        }
    }

    /// Extrapolated limit of H at an endpoint of the domain.
    ///
    /// Evaluation failures along the ladder (term caps, overflow) are not
    /// errors; rungs are skipped and confidence reflects what remains. For
    /// the power family at the lower end the closed form of H(0+) backs up
    /// an undecided ladder.
    pub fn endpoint_limit_h_series(&self, endpoint: EndpointSide, zero_band: f64) -> LimitEstimate {
        let pts = self.ladder_points(endpoint);
        let expanding = endpoint == EndpointSide::Upper && !self.upper.is_finite();
        let mut samples: Vec<LadderSample> = Vec::new();
        for (i, &t) in pts.iter().enumerate() {
            match self.h_parts(t) {
                Ok(parts) => samples.push(LadderSample { point: t, parts }),
                Err(_) => {
                    if expanding {
                        // larger t only gets more expensive; stop the ladder
                        break;
                    }
                }
            }
            if expanding && i >= 5 && samples.len() >= 6 {
                let est = estimate_from_ladder(&samples, zero_band);
                if est.decided() {
                    return est;
                }
            }
        }
        let est = estimate_from_ladder(&samples, zero_band);
        if est.decided() || endpoint == EndpointSide::Upper {
            return est;
        }
        match self.h_lower_closed_form() {
            Some(cf) => {
                let a0 = self.numerator.value(0) / self.denominator.value(0);
                let a1 = self.numerator.value(1) / self.denominator.value(1);
                let band = zero_band * (a0.abs() + a1.abs()).max(1e-300);
                let sign = if cf.abs() <= band {
                    SignClass::Zero
                } else if cf > 0.0 {
                    SignClass::Positive
                } else {
                    SignClass::Negative
                };
                LimitEstimate {
                    value: LimitValue::Finite(cf),
                    sign,
                    samples: est.samples,
                    confidence: super::Confidence::Converged,
                }
            }
            None => est,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LnSum {
    pub ln_mag: f64,
    pub rel_bound: f64,
    pub terms: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio_engine::{Confidence, DEFAULT_ENDPOINT_ZERO_BAND};
    use approx::assert_relative_eq;

    fn inv_factorial() -> CoefficientSource {
        CoefficientSource::recip_gamma(1.0, 1.0).unwrap()
    }

    #[test]
    fn power_series_exponential() {
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            CoefficientSource::constant(1.0),
            DiscreteKernel::Power,
            1.0 - 1e-9,
            1e-12,
        )
        .unwrap();
        let e = p.eval_series(Side::Numerator, 0.99, 0).unwrap();
        assert_relative_eq!(e.value, 0.99f64.exp(), max_relative = 1e-10);
        assert!(e.terms_used >= 2);
    }

    #[test]
    fn series_eval_spec_cases() {
        // sum t^k / k! at t = 1
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            inv_factorial(),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(
            p.eval_series(Side::Numerator, 1.0, 0).unwrap().value,
            std::f64::consts::E,
            max_relative = 1e-11
        );

        // finite polynomial derivative: coefficients 1,1,1,1 at t=2, order 1
        let p = SeriesRatioProblem::new(
            CoefficientSource::from_list(vec![1.0, 1.0, 1.0, 1.0]),
            CoefficientSource::from_list(vec![1.0]),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(
            p.eval_series(Side::Numerator, 2.0, 1).unwrap().value,
            1.0 + 2.0 * 2.0 + 3.0 * 4.0,
            max_relative = 1e-13
        );

        // sum e^{-kt}/k! = exp(e^{-t}) at t = 0.7, against a direct oracle
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            CoefficientSource::constant(1.0),
            DiscreteKernel::ExpDecay,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        let got = p.eval_series(Side::Numerator, 0.7, 0).unwrap().value;
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for k in 0..60 {
            if k > 0 {
                fact *= k as f64;
            }
            oracle += (-(k as f64) * 0.7).exp() / fact;
        }
        assert_relative_eq!(got, oracle, max_relative = 1e-11);
        assert_relative_eq!(got, (-0.7f64).exp().exp(), max_relative = 1e-11);
    }

    #[test]
    fn ratio_identity_and_leading_term() {
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            inv_factorial(),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        for &t in &[0.1, 1.0, 7.3] {
            assert_relative_eq!(p.eval_series_ratio(t).unwrap(), 1.0, max_relative = 1e-11);
        }

        // a_k = 1/Gamma(k+2), b_k = 1/Gamma(k+1): ratio -> a_0/b_0 = 1 at 0+,
        // and (e-1)/e at t = 1.
        let p = SeriesRatioProblem::new(
            CoefficientSource::recip_gamma(1.0, 2.0).unwrap(),
            CoefficientSource::recip_gamma(1.0, 1.0).unwrap(),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(p.eval_series_ratio(1e-9).unwrap(), 1.0, max_relative = 1e-6);
        let e = std::f64::consts::E;
        assert_relative_eq!(
            p.eval_series_ratio(1.0).unwrap(),
            (e - 1.0) / e,
            max_relative = 1e-10
        );
    }

    #[test]
    fn h_of_identical_sides_is_zero() {
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            inv_factorial(),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        for &t in &[0.2, 1.0, 4.0] {
            assert!(p.eval_h_series(t).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn h_degenerate_denominator_derivative() {
        // A = t, B = 1: B' is identically zero
        let p = SeriesRatioProblem::new(
            CoefficientSource::from_list(vec![0.0, 1.0]),
            CoefficientSource::from_list(vec![1.0]),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            p.eval_h_series(0.5),
            Err(Error::DerivativeDegeneracy { .. })
        ));
    }

    #[test]
    fn h_quadratic_algebra_case() {
        // a = (1,2,1), b = (1,1,1): A = (1+t)^2, B = 1+t+t^2;
        // at t = 1: H = (A'/B')B - A = (4/3)*3 - 4 = 0
        let p = SeriesRatioProblem::new(
            CoefficientSource::from_list(vec![1.0, 2.0, 1.0]),
            CoefficientSource::from_list(vec![1.0, 1.0, 1.0]),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!(p.eval_h_series(1.0).unwrap().abs() < 1e-12);
        // direct algebra at t = 2: A=9, B=7, A'=6, B'=5 -> H = 42/5 - 9
        assert_relative_eq!(
            p.eval_h_series(2.0).unwrap(),
            6.0 / 5.0 * 7.0 - 9.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn endpoint_closed_form_matches_ladder() {
        // a = (1,3,...), b = (1,1,...): H(0+) = 1*(3/1 - 1/1) = 2
        let p = SeriesRatioProblem::new(
            CoefficientSource::from_list(vec![1.0, 3.0, 0.5, 0.25]),
            CoefficientSource::from_list(vec![1.0, 1.0, 1.0, 1.0]),
            DiscreteKernel::Power,
            1.0,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(p.h_lower_closed_form().unwrap(), 2.0, max_relative = 1e-14);
        let est = p.endpoint_limit_h_series(EndpointSide::Lower, DEFAULT_ENDPOINT_ZERO_BAND);
        assert_eq!(est.sign, SignClass::Positive);
        assert_ne!(est.confidence, Confidence::Failed);
    }

    #[test]
    fn endpoint_zero_for_identical_sides() {
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            inv_factorial(),
            DiscreteKernel::Power,
            1.0,
            1e-12,
        )
        .unwrap();
        for endpoint in [EndpointSide::Lower, EndpointSide::Upper] {
            let est = p.endpoint_limit_h_series(endpoint, DEFAULT_ENDPOINT_ZERO_BAND);
            assert_eq!(est.sign, SignClass::Zero, "{endpoint:?}");
        }
    }

    #[test]
    fn log_path_survives_overflow_scale() {
        // Mittag-Leffler-type series far beyond f64 range for the raw sums
        let p = SeriesRatioProblem::new(
            CoefficientSource::recip_gamma(1.0, 1.0).unwrap(),
            CoefficientSource::recip_gamma(1.0, 2.0).unwrap(),
            DiscreteKernel::Power,
            f64::INFINITY,
            1e-12,
        )
        .unwrap()
        .with_term_cap(400_000);
        let r = p.eval_series_ratio(800.0).unwrap();
        // E_{1,1}/E_{1,2} = t e^t/(e^t - 1) -> t as t grows
        assert_relative_eq!(r, 800.0, max_relative = 1e-8);
    }

    #[test]
    fn truncation_honesty() {
        let p = SeriesRatioProblem::new(
            inv_factorial(),
            CoefficientSource::constant(1.0),
            DiscreteKernel::ExpDecay,
            f64::INFINITY,
            1e-8,
        )
        .unwrap();
        let coarse = p.eval_series(Side::Numerator, 0.9, 0).unwrap();
        let mut fine_problem = p.clone();
        fine_problem.tol = 5e-9;
        let fine = fine_problem.eval_series(Side::Numerator, 0.9, 0).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.abs_error_bound);
    }
}

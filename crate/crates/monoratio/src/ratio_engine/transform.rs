//! Quadrature-backed evaluation of transform ratios F(x)/G(x), their
//! x-derivatives, H, and endpoint limits of H — the continuous counterpart
//! of [`super::series`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernels::ContinuousKernel;
use crate::specfun::{self, EvalResult};

use super::quadrature::integrate_interval;
use super::{
    estimate_from_ladder, EndpointSide, HParts, LadderSample, LimitEstimate,
    DERIVATIVE_ZERO_BAND,
};
use super::series::Side;

/// A named integrand on (0, infinity) or a subinterval of it.
#[derive(Clone)]
pub struct Integrand {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Integrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrand").field("label", &self.label).finish()
    }
}

impl Integrand {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("const:{c}"), move |_| c)
    }

    /// c_0 + c_1 t + c_2 t^2 + ...
    pub fn poly(coeffs: Vec<f64>) -> Self {
        let label = format!("poly:{coeffs:?}");
        Self::from_fn(label, move |t| {
            coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
        })
    }

    /// e^{-lambda t}
    pub fn exp_decay(lambda: f64) -> Self {
        Self::from_fn(format!("expdec:{lambda}"), move |t| (-lambda * t).exp())
    }

    /// (c_0 + c_1 t + ...) e^{-lambda t}
    pub fn poly_exp(coeffs: Vec<f64>, lambda: f64) -> Self {
        let label = format!("polyexp:{coeffs:?},{lambda}");
        Self::from_fn(label, move |t| {
            coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c) * (-lambda * t).exp()
        })
    }

    /// 1 / Gamma(a t + b)
    pub fn recip_gamma(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::Domain(format!(
                "reciprocal-gamma integrand needs a, b > 0, got ({a}, {b})"
            )));
        }
        Ok(Self::from_fn(format!("recip-gamma:{a},{b}"), move |t| {
            specfun::reciprocal_gamma(a * t + b)
                .map(|r| r.value)
                .unwrap_or(0.0)
        }))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

/// A transform ratio F(x)/G(x) over one continuous kernel on an interval
/// [lo, hi]; `lo == 0` and/or `hi == inf` flag improper endpoints.
#[derive(Debug, Clone)]
pub struct TransformRatioProblem {
    pub numerator: Integrand,
    pub denominator: Integrand,
    pub kernel: ContinuousKernel,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    /// Upper end of the window used when scanning the integrand ratio shape
    /// on an improper interval.
    pub scan_upper: f64,
}

impl TransformRatioProblem {
    pub fn new(
        numerator: Integrand,
        denominator: Integrand,
        kernel: ContinuousKernel,
        lo: f64,
        hi: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
        }
        if !(lo >= 0.0) || !(hi > lo) {
            return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(TransformRatioProblem {
            numerator,
            denominator,
            kernel,
            lo,
            hi,
            tol,
            scan_upper: 100.0,
        })
    }

    /// The fully improper interval (0, infinity).
    pub fn improper(
        numerator: Integrand,
        denominator: Integrand,
        kernel: ContinuousKernel,
        tol: f64,
    ) -> Result<Self> {
        Self::new(numerator, denominator, kernel, 0.0, f64::INFINITY, tol)
    }

    pub fn with_scan_upper(mut self, scan_upper: f64) -> Self {
        self.scan_upper = scan_upper;
        self
    }

    pub fn is_improper(&self) -> bool {
        self.lo == 0.0 || self.hi.is_infinite()
    }

    fn side(&self, side: Side) -> &Integrand {
        match side {
            Side::Numerator => &self.numerator,
            Side::Denominator => &self.denominator,
        }
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("transform variable x = {x} must be positive")));
        }
        Ok(())
    }

    /// integral of f(t) * d^order/dx^order w(t, x) over the interval.
    pub fn eval_transform(&self, side: Side, x: f64, order: u8) -> Result<EvalResult> {
        self.check_x(x)?;
        if order > 2 {
            return Err(Error::InvalidInput(format!("derivative order {order} > 2")));
        }
        let f = self.side(side).clone();
        let kernel = self.kernel;
        let q = integrate_interval(
            move |t| f.value(t) * kernel.eval_raw(t, x, order),
            self.lo,
            self.hi,
            self.tol,
        )?;
        Ok(EvalResult {
            value: q.value,
            abs_error_bound: q.abs_error,
            terms_used: 0,
        })
    }

    /// F(x)/G(x).
    pub fn eval_transform_ratio(&self, x: f64) -> Result<f64> {
        let f = self.eval_transform(Side::Numerator, x, 0)?.value;
        let g = self.eval_transform(Side::Denominator, x, 0)?.value;
        if !(g > 0.0) {
            return Err(Error::NonpositiveDenominator { at: x, value: g });
        }
        Ok(f / g)
    }

    pub(crate) fn h_parts(&self, x: f64) -> Result<HParts> {
        let f0 = self.eval_transform(Side::Numerator, x, 0)?.value;
        let g0 = self.eval_transform(Side::Denominator, x, 0)?.value;
        let f1 = self.eval_transform(Side::Numerator, x, 1)?.value;
        let g1 = self.eval_transform(Side::Denominator, x, 1)?.value;
        if !(g0 > 0.0) {
            return Err(Error::NonpositiveDenominator { at: x, value: g0 });
        }
        if g1.abs() < DERIVATIVE_ZERO_BAND * g0 / x {
            return Err(Error::DerivativeDegeneracy { at: x });
        }
        let ratio = f0 / g0;
        let deriv_ratio = f1 / g1;
        Ok(HParts {
            ratio,
            deriv_ratio,
            h_scaled: deriv_ratio - ratio,
            ln_denom: g0.ln(),
        })
    }

    /// H_{F,G}(x) = (F'/G') G - F.
    pub fn eval_h_transform(&self, x: f64) -> Result<f64> {
        Ok(self.h_parts(x)?.h_value())
    }

    /// Sign carrier for H at x (H/G).
    pub fn h_sign_at(&self, x: f64) -> Result<f64> {
        Ok(self.h_parts(x)?.h_scaled)
    }

    /// Extrapolated limit of H as x -> 0+ or x -> infinity.
    pub fn endpoint_limit_h_transform(
        &self,
        endpoint: EndpointSide,
        zero_band: f64,
    ) -> LimitEstimate {
        let pts: Vec<f64> = match endpoint {
            EndpointSide::Lower => (1..=12).map(|j| 0.5 * 0.5f64.powi(j)).collect(),
            EndpointSide::Upper => (1..=12).map(|j| 2.0f64.powi(j)).collect(),
        };
        let expanding = endpoint == EndpointSide::Upper;
        let mut samples: Vec<LadderSample> = Vec::new();
        for (i, &x) in pts.iter().enumerate() {
            match self.h_parts(x) {
                Ok(parts) => samples.push(LadderSample { point: x, parts }),
                Err(_) => {
                    if expanding {
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
        estimate_from_ladder(&samples, zero_band)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio_engine::{SignClass, DEFAULT_ENDPOINT_ZERO_BAND};
    use approx::assert_relative_eq;

    fn laplace(numer: Integrand, denom: Integrand) -> TransformRatioProblem {
        TransformRatioProblem::improper(numer, denom, ContinuousKernel::ExpDecay, 1e-11).unwrap()
    }

    #[test]
    fn laplace_closed_forms() {
        let p = laplace(Integrand::constant(1.0), Integrand::constant(1.0));
        // int e^{-2t} dt = 1/2
        assert_relative_eq!(
            p.eval_transform(Side::Numerator, 2.0, 0).unwrap().value,
            0.5,
            max_relative = 1e-9
        );

        let p = laplace(Integrand::poly(vec![0.0, 1.0]), Integrand::constant(1.0));
        // int t e^{-t} dt = 1
        assert_relative_eq!(
            p.eval_transform(Side::Numerator, 1.0, 0).unwrap().value,
            1.0,
            max_relative = 1e-9
        );

        let p = laplace(Integrand::exp_decay(1.0), Integrand::constant(1.0));
        // order 1: -int t e^{-t} e^{-t} dt = -1/4
        assert_relative_eq!(
            p.eval_transform(Side::Numerator, 1.0, 1).unwrap().value,
            -0.25,
            max_relative = 1e-9
        );
    }

    #[test]
    fn bounded_ratio_limit_toward_zero() {
        // f = t, g = 1 on [1,2]: ratio -> (int t)/(int 1) = 3/2 as x -> 0
        let p = TransformRatioProblem::new(
            Integrand::poly(vec![0.0, 1.0]),
            Integrand::constant(1.0),
            ContinuousKernel::ExpDecay,
            1.0,
            2.0,
            1e-11,
        )
        .unwrap();
        let r = p.eval_transform_ratio(1e-6).unwrap();
        assert_relative_eq!(r, 1.5, max_relative = 1e-4);
    }

    #[test]
    fn laplace_ratio_closed_form() {
        // f = t e^{-t}, g = e^{-t}: at x = 1 ratio = (1/4)/(1/2) = 1/2
        let p = laplace(
            Integrand::poly_exp(vec![0.0, 1.0], 1.0),
            Integrand::exp_decay(1.0),
        );
        assert_relative_eq!(p.eval_transform_ratio(1.0).unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn h_zero_for_identical_sides() {
        let p = laplace(Integrand::exp_decay(1.0), Integrand::exp_decay(1.0));
        for &x in &[0.3, 1.0, 5.0] {
            assert!(p.eval_h_transform(x).unwrap().abs() < 1e-9);
        }
        for endpoint in [EndpointSide::Lower, EndpointSide::Upper] {
            let est = p.endpoint_limit_h_transform(endpoint, DEFAULT_ENDPOINT_ZERO_BAND);
            assert_eq!(est.sign, SignClass::Zero, "{endpoint:?}");
        }
    }

    #[test]
    fn h_lower_limit_sign_against_closed_form() {
        // f = (1+2t)e^{-2t}, g = e^{-t}: F = 1/(2+x) + 2/(2+x)^2, G = 1/(1+x);
        // H(0+) = (F'/G')G - F -> (3/4) - 1 = -1/4.
        let p = laplace(
            Integrand::poly_exp(vec![1.0, 2.0], 2.0),
            Integrand::exp_decay(1.0),
        );
        let est = p.endpoint_limit_h_transform(EndpointSide::Lower, DEFAULT_ENDPOINT_ZERO_BAND);
        assert_eq!(est.sign, SignClass::Negative);
        let last = est.samples.last().unwrap();
        assert!((last.value - (-0.25)).abs() < 0.05, "H near 0: {}", last.value);
    }

    #[test]
    fn mellin_kernel_transform() {
        // Mellin transform of e^{-t} is Gamma(x)
        let p = TransformRatioProblem::improper(
            Integrand::exp_decay(1.0),
            Integrand::constant(1.0),
            ContinuousKernel::Mellin,
            1e-10,
        )
        .unwrap();
        for &x in &[1.0, 2.5, 4.0] {
            let got = p.eval_transform(Side::Numerator, x, 0).unwrap().value;
            let expect = crate::specfun::ln_gamma(x).unwrap().value.exp();
            assert_relative_eq!(got, expect, max_relative = 1e-7);
        }
    }
}

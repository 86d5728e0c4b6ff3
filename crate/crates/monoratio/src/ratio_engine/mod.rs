//! Evaluation engine for series ratios A(t)/B(t) and transform ratios
//! F(x)/G(x): values, derivatives, the H function H = (F'/G')G - F, and
//! extrapolated endpoint limits of H.
//!
//! The sign of H, combined with the sign of the denominator derivative,
//! gives the sign of the ratio derivative through
//! (F/G)' = (G'/G^2) H, which is the identity every monotonicity rule in
//! [`crate::classifier`] is built on. Since G > 0, the engine works with the
//! scaled quantity H/G = F'/G' - F/G wherever overflow is a risk: it has the
//! same sign as H and stays representable even when the series themselves
//! leave f64 range.

pub mod quadrature;
pub mod series;
pub mod transform;

use serde::{Deserialize, Serialize};

pub use quadrature::{integrate, integrate_interval, QuadResult};
pub use series::{CoefficientSource, SeriesRatioProblem, Side};
pub use transform::{Integrand, TransformRatioProblem};

/// Which end of the domain an endpoint limit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    Positive,
    Negative,
    Zero,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Confidence {
    Converged,
    Extrapolated,
    Failed,
}

/// A possibly infinite limit value, kept JSON round-trippable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum LimitValue {
    Finite(f64),
    PosInf,
    NegInf,
}

impl LimitValue {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            LimitValue::PosInf
        } else if v == f64::NEG_INFINITY {
            LimitValue::NegInf
        } else {
            LimitValue::Finite(v)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            LimitValue::Finite(v) => v,
            LimitValue::PosInf => f64::INFINITY,
            LimitValue::NegInf => f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub point: f64,
    pub value: f64,
}

/// Extrapolated endpoint limit of H, carrying the ladder samples it was
/// decided from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: LimitValue,
    pub sign: SignClass,
    pub samples: Vec<LimitSample>,
    pub confidence: Confidence,
}

impl LimitEstimate {
    pub fn failed() -> Self {
        LimitEstimate {
            value: LimitValue::Finite(0.0),
            sign: SignClass::Undetermined,
            samples: Vec::new(),
            confidence: Confidence::Failed,
        }
    }

    /// True when the sign is usable by a rule (not Undetermined and not from
    /// a failed extrapolation).
    pub fn decided(&self) -> bool {
        self.confidence != Confidence::Failed && self.sign != SignClass::Undetermined
    }
}

/// Default zero band factor for endpoint sign decisions.
pub const DEFAULT_ENDPOINT_ZERO_BAND: f64 = 1e-9;

/// Relative band below which the denominator derivative counts as vanishing.
pub const DERIVATIVE_ZERO_BAND: f64 = 1e-12;

/// Pointwise evaluation bundle behind H: the ratio F/G, the derivative
/// ratio F'/G', their difference H/G, and ln G for reconstructing H.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HParts {
    pub ratio: f64,
    pub deriv_ratio: f64,
    pub h_scaled: f64,
    pub ln_denom: f64,
}

impl HParts {
    pub fn h_value(&self) -> f64 {
        if self.h_scaled == 0.0 {
            0.0
        } else {
            self.h_scaled * self.ln_denom.exp()
        }
    }

    /// Local magnitude scale for the zero band.
    pub fn scale(&self) -> f64 {
        self.ratio.abs() + self.deriv_ratio.abs()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LadderSample {
    pub point: f64,
    pub parts: HParts,
}

/// Decide sign/value/confidence from a geometric ladder of H samples.
/// The last four valid samples must agree in (banded) sign and be monotone
/// in magnitude for a sign to be declared.
pub(crate) fn estimate_from_ladder(samples: &[LadderSample], zero_band: f64) -> LimitEstimate {
    let recorded: Vec<LimitSample> = samples
        .iter()
        .filter_map(|s| {
            let h = s.parts.h_value();
            h.is_finite().then_some(LimitSample {
                point: s.point,
                value: h,
            })
        })
        .collect();

    if samples.len() < 4 {
        return LimitEstimate {
            samples: recorded,
            ..LimitEstimate::failed()
        };
    }

    let last4 = &samples[samples.len() - 4..];
    let banded_sign = |s: &LadderSample| -> i8 {
        let band = zero_band * s.parts.scale().max(1e-300);
        if s.parts.h_scaled.abs() <= band {
            0
        } else if s.parts.h_scaled > 0.0 {
            1
        } else {
            -1
        }
    };

    let signs: Vec<i8> = last4.iter().map(banded_sign).collect();
    if signs.iter().all(|&s| s == 0) {
        return LimitEstimate {
            value: LimitValue::Finite(0.0),
            sign: SignClass::Zero,
            samples: recorded,
            confidence: Confidence::Converged,
        };
    }

    let first = signs[0];
    if first != 0 && signs.iter().all(|&s| s == first) {
        let mags: Vec<f64> = last4.iter().map(|s| s.parts.h_scaled.abs()).collect();
        let nondecreasing = mags.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-3));
        let nonincreasing = mags.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-3));
        if nondecreasing || nonincreasing {
            let sign = if first > 0 {
                SignClass::Positive
            } else {
                SignClass::Negative
            };
            let last = last4.last().unwrap();
            let prev = &last4[2];
            let rel_step = (last.parts.h_scaled - prev.parts.h_scaled).abs()
                / last.parts.h_scaled.abs().max(1e-300);
            let confidence = if rel_step < 1e-3 {
                Confidence::Converged
            } else {
                Confidence::Extrapolated
            };
            let grew = mags[3] >= 2.0 * mags[0];
            let last_h = last.parts.h_value();
            let value = if last_h.is_finite() && !(grew && nondecreasing && rel_step > 0.5) {
                LimitValue::Finite(last_h)
            } else if first > 0 {
                LimitValue::PosInf
            } else {
                LimitValue::NegInf
            };
            return LimitEstimate {
                value,
                sign,
                samples: recorded,
                confidence,
            };
        }
    }

    LimitEstimate {
        samples: recorded,
        ..LimitEstimate::failed()
    }
}

//! Markovian pure-dephasing rate γ = 1/T₂ of the double-dot electron.
//!
//! Three independent routes:
//!
//! * [`rate_eq8`]: the closed form, one radial integral over thermal-moment
//!   differences after integration by parts and extension of the Debye limits
//!   to infinity;
//! * [`rate_double_integral`]: the finite-limit (x, t) double integral before
//!   integration by parts;
//! * [`rate_monte_carlo`]: direct importance sampling of the momentum-space
//!   golden-rule integral, built from [`crate::coupling`] and
//!   [`crate::model::anharmonic_strength_sq`] only.
//!
//! [`rate_validate`] runs all three and checks them against each other.

mod closed_form;
mod monte_carlo;
mod validate;

use std::fmt;

pub use closed_form::{rate_double_integral, rate_double_integral_with, rate_eq8, rate_eq8_with, ThermalKernel};
pub use monte_carlo::{monte_carlo_prefactor, rate_monte_carlo, MonteCarloConfig, MIN_SAMPLES};
pub use validate::{compare_routes, rate_validate, RouteCheck, ValidationReport, DOUBLE_INTEGRAL_TOLERANCE, MONTE_CARLO_SIGMAS, MONTE_CARLO_TOLERANCE};

use crate::lindblad::MARKOV_MIN_T2;

/// Which route produced a rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Eq8,
    DoubleIntegral,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Eq8 => "eq8",
            Method::DoubleIntegral => "double-integral",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "eq8" => Some(Method::Eq8),
            "double-integral" | "double" => Some(Method::DoubleIntegral),
            "monte-carlo" | "mc" => Some(Method::MonteCarlo),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Non-fatal caveats attached to a rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateWarning {
    /// √2·k_D·L is small, so extending the Debye-limited integrals to
    /// infinity is not justified.
    ShortDebyeRange { debye_limit: f64 },
    /// T₂ is comparable to the reservoir memory time.
    MarkovLimit { t2: f64 },
}

impl fmt::Display for RateWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateWarning::ShortDebyeRange { debye_limit } => write!(
                f,
                "sqrt(2)*k_D*L = {debye_limit:.3} < {SHORT_DEBYE_RANGE}; infinite-limit closed form is unreliable"
            ),
            RateWarning::MarkovLimit { t2 } => write!(
                f,
                "T2 = {t2:.3e} s is below {MARKOV_MIN_T2:e} s; Markov limit is questionable"
            ),
        }
    }
}

/// Threshold on √2·k_D·L below which [`RateWarning::ShortDebyeRange`] fires.
pub const SHORT_DEBYE_RANGE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// γ, 1/s.
    pub gamma: f64,
    /// 1/γ in s; +∞ when γ = 0.
    pub t2: f64,
    pub method: Method,
    /// Absolute uncertainty on γ, 1/s. For Monte Carlo this is the standard
    /// error.
    pub error_estimate: f64,
    pub mc_std_error: Option<f64>,
    pub warnings: Vec<RateWarning>,
}

impl RateResult {
    pub(crate) fn zero(method: Method) -> Self {
        RateResult {
            gamma: 0.0,
            t2: f64::INFINITY,
            method,
            error_estimate: 0.0,
            mc_std_error: if method == Method::MonteCarlo { Some(0.0) } else { None },
            warnings: Vec::new(),
        }
    }

    pub(crate) fn new(method: Method, gamma: f64, error_estimate: f64, mut warnings: Vec<RateWarning>) -> Self {
        let t2 = if gamma > 0.0 { 1.0 / gamma } else { f64::INFINITY };
        if t2 < MARKOV_MIN_T2 {
            warnings.push(RateWarning::MarkovLimit { t2 });
        }
        RateResult {
            gamma,
            t2,
            method,
            error_estimate,
            mc_std_error: None,
            warnings,
        }
    }
}

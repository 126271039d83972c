use std::fmt;

use crate::error::{Error, Result};
use crate::format::float;
use crate::model::{DotGeometry, MaterialParams, ThermalEnv};

use super::{rate_double_integral, rate_eq8, rate_monte_carlo, MonteCarloConfig, RateResult};

/// Relative tolerance between the closed form and the double integral.
pub const DOUBLE_INTEGRAL_TOLERANCE: f64 = 0.01;
/// Relative tolerance between the closed form and Monte Carlo...
pub const MONTE_CARLO_TOLERANCE: f64 = 0.05;
/// ...or this many Monte Carlo standard errors, whichever is wider.
pub const MONTE_CARLO_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RouteCheck {
    pub name: &'static str,
    pub reference: f64,
    pub candidate: f64,
    pub difference: f64,
    pub allowed: f64,
    pub passed: bool,
}

impl RouteCheck {
    fn new(name: &'static str, reference: f64, candidate: f64, allowed: f64) -> Self {
        let difference = (candidate - reference).abs();
        RouteCheck {
            name,
            reference,
            candidate,
            difference,
            allowed,
            passed: difference <= allowed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub temperature: f64,
    pub size: f64,
    pub separation: f64,
    pub eq8: RateResult,
    pub double_integral: RateResult,
    pub monte_carlo: RateResult,
    pub checks: Vec<RouteCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "T = {} K, L = {} m, D = {} m",
            float(self.temperature),
            float(self.size),
            float(self.separation)
        )?;
        for r in [&self.eq8, &self.double_integral, &self.monte_carlo] {
            writeln!(
                f,
                "  {:<16} gamma = {} 1/s  T2 = {} s  +- {}",
                r.method.as_str(),
                float(r.gamma),
                float(r.t2),
                float(r.error_estimate)
            )?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "  {:<28} |diff| = {}  allowed = {}  {}",
                c.name,
                float(c.difference),
                float(c.allowed),
                if c.passed { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Applies the route-agreement thresholds to three precomputed results.
pub fn compare_routes(
    g: &DotGeometry,
    env: &ThermalEnv,
    eq8: RateResult,
    double_integral: RateResult,
    monte_carlo: RateResult,
) -> ValidationReport {
    let reference = eq8.gamma;
    let se = monte_carlo.mc_std_error.unwrap_or(monte_carlo.error_estimate);
    let checks = vec![
        RouteCheck::new(
            "eq8 vs double-integral",
            reference,
            double_integral.gamma,
            DOUBLE_INTEGRAL_TOLERANCE * reference.abs(),
        ),
        RouteCheck::new(
            "eq8 vs monte-carlo",
            reference,
            monte_carlo.gamma,
            (MONTE_CARLO_TOLERANCE * reference.abs()).max(MONTE_CARLO_SIGMAS * se),
        ),
    ];
    ValidationReport {
        temperature: env.temperature,
        size: g.size,
        separation: g.separation,
        eq8,
        double_integral,
        monte_carlo,
        checks,
    }
}

/// Runs all three routes. Disagreement is an error carrying the full report.
pub fn rate_validate(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv, mc: MonteCarloConfig) -> Result<ValidationReport> {
    let eq8 = rate_eq8(m, g, env)?;
    let double = rate_double_integral(m, g, env)?;
    let monte = rate_monte_carlo(m, g, env, mc.samples, mc.seed)?;
    let report = compare_routes(g, env, eq8, double, monte);
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::ValidationFailed(Box::new(report)))
    }
}

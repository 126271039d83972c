use crate::error::{Error, Result};
use crate::model::{derived_scales, DotGeometry, MaterialParams, RateIntegralParams, ThermalEnv};
use crate::quadrature::{integrate, integrate_nested, QuadratureConfig};
use crate::specfun::{sinc_deficit, ThermalMoment};

use super::{Method, RateResult, RateWarning, SHORT_DEBYE_RANGE};

/// e^{−x²} < 1e-31 beyond this point.
pub(crate) const GAUSSIAN_REACH: f64 = 8.5;
/// x⁵·eˣ/(eˣ−1)² is below 1e-55 beyond this thermal argument.
const THERMAL_REACH: f64 = 150.0;

const REL_TOL: f64 = 1e-8;
const ABS_TOL: f64 = 1e-300;

/// Thermal kernel of the closed-form routes.
///
/// Reducing the momentum integral (radial delta, then the two relative
/// angles) leaves ∫dx x⁴·eˣ/(eˣ−1)² with half of the [`RateIntegralParams`]
/// prefactor. That is [`ThermalKernel::Fourth`], the default.
///
/// [`ThermalKernel::Fifth`] uses the fifth moment φ(x) = ∫u⁵eᵘ/(eᵘ−1)² with
/// the full prefactor. It has the same scaling laws but runs a factor of
/// roughly twice the thermal mean of ħck/k_BT above the momentum integral;
/// the Monte Carlo route rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalKernel {
    #[default]
    Fourth,
    Fifth,
}

impl ThermalKernel {
    pub fn moment(&self) -> ThermalMoment {
        match self {
            ThermalKernel::Fourth => ThermalMoment::FOURTH,
            ThermalKernel::Fifth => ThermalMoment::PHI,
        }
    }

    pub fn prefactor_scale(&self) -> f64 {
        match self {
            ThermalKernel::Fourth => 0.5,
            ThermalKernel::Fifth => 1.0,
        }
    }
}

fn is_degenerate(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv) -> Result<bool> {
    m.validate()?;
    DotGeometry::new(g.size, g.separation)?;
    ThermalEnv::new(env.temperature)?;
    Ok(env.temperature == 0.0 || g.separation == 0.0)
}

fn debye_warnings(p: &RateIntegralParams) -> Vec<RateWarning> {
    let limit = p.debye_limit();
    if limit < SHORT_DEBYE_RANGE {
        vec![RateWarning::ShortDebyeRange { debye_limit: limit }]
    } else {
        Vec::new()
    }
}

fn oscillation_cfg(rel_tol: f64, alpha: f64) -> QuadratureConfig {
    let cfg = QuadratureConfig::new(ABS_TOL, rel_tol).with_max_subdivisions(400_000);
    if alpha > 0.0 {
        cfg.with_panel_hint(std::f64::consts::PI / alpha)
    } else {
        cfg
    }
}

fn describe(g: &DotGeometry, env: &ThermalEnv) -> String {
    format!("T = {} K, L = {:e} m, D = {:e} m", env.temperature, g.size, g.separation)
}

pub fn rate_eq8(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv) -> Result<RateResult> {
    rate_eq8_with(m, g, env, ThermalKernel::default())
}

/// Closed form: prefactor·∫₀^∞ (dx/x)·e^{−x²}·(1 − sin αx/αx)·[M(x_D) − M(x·x_D/(√2·k_D·L))]
/// with M the kernel's thermal moment.
pub fn rate_eq8_with(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv, kernel: ThermalKernel) -> Result<RateResult> {
    if is_degenerate(m, g, env)? {
        return Ok(RateResult::zero(Method::Eq8));
    }
    let p = derived_scales(m, g, env)?;
    let moment = kernel.moment();
    let ratio = p.x_debye / p.debye_limit();
    let upper = GAUSSIAN_REACH.min(p.debye_limit());
    let integrand = |x: f64| {
        let bracket = moment.difference((x * ratio).min(p.x_debye), p.x_debye);
        (-x * x).exp() * sinc_deficit(p.alpha * x) / x * bracket
    };
    let r = integrate(integrand, 0.0, upper, &oscillation_cfg(REL_TOL, p.alpha)).map_err(|source| Error::Quadrature {
        context: format!("closed-form rate at {}", describe(g, env)),
        source,
    })?;
    let scale = p.prefactor * kernel.prefactor_scale();
    Ok(RateResult::new(
        Method::Eq8,
        scale * r.value,
        scale * r.abs_error_estimate,
        debye_warnings(&p),
    ))
}

pub fn rate_double_integral(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv) -> Result<RateResult> {
    rate_double_integral_with(m, g, env, ThermalKernel::default())
}

/// prefactor·∫₀^{x_D} dx xⁿ·eˣ/(eˣ−1)² ∫₀^{√2·k_D·L·x/x_D} (dt/t)·e^{−t²}·(1 − sin αt/αt).
pub fn rate_double_integral_with(
    m: &MaterialParams,
    g: &DotGeometry,
    env: &ThermalEnv,
    kernel: ThermalKernel,
) -> Result<RateResult> {
    if is_degenerate(m, g, env)? {
        return Ok(RateResult::zero(Method::DoubleIntegral));
    }
    let p = derived_scales(m, g, env)?;
    let moment = kernel.moment();
    let slope = p.debye_limit() / p.x_debye;
    let outer_upper = p.x_debye.min(THERMAL_REACH);
    let inner = |x: f64, t: f64| moment.kernel(x) * (-t * t).exp() * sinc_deficit(p.alpha * t) / t;
    let t_max = |x: f64| (slope * x).min(GAUSSIAN_REACH);
    let outer_cfg = QuadratureConfig::new(ABS_TOL, 0.2 * REL_TOL);
    let inner_cfg = oscillation_cfg(0.02 * REL_TOL, p.alpha);
    let r = integrate_nested(inner, (0.0, outer_upper), 0.0, t_max, &outer_cfg, &inner_cfg).map_err(|source| Error::Quadrature {
        context: format!("double-integral rate at {}", describe(g, env)),
        source,
    })?;
    let scale = p.prefactor * kernel.prefactor_scale();
    Ok(RateResult::new(
        Method::DoubleIntegral,
        scale * r.value,
        scale * r.abs_error_estimate,
        debye_warnings(&p),
    ))
}

//! Exact coherence decay of a two-level system linearly coupled to a harmonic
//! bath (independent boson model).
//!
//! |ρ₀₁(t)|/|ρ₀₁(0)| = exp[−2∫dω coth(ħω/(θ·k_BT))·J(ω)·sin²(ωt/2)/(ħω)²].
//!
//! θ = 1 by default. The more common convention puts k_BT/2 in the
//! hyperbolic cotangent, which is θ = 2 here.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::coupling::{Cutoff, SpectralDensity};
use crate::error::{require_non_negative, Error, Result};
use crate::format;
use crate::model::{ThermalEnv, CODATA};
use crate::quadrature::{integrate, integrate_semi_infinite, QuadError, QuadratureConfig, QuadratureResult, SEMI_INFINITE_CUT};

/// Coth-argument convention used unless a caller overrides it.
pub const DEFAULT_COTH_THETA: f64 = 1.0;

/// Horizon (in units of 1/ω_c) at which the plateau is probed.
pub const PLATEAU_PROBE_HORIZON: f64 = 100.0;
/// Allowed distance from the plateau at the probe horizon.
pub const PLATEAU_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicConfig {
    pub coth_theta: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        HarmonicConfig {
            coth_theta: DEFAULT_COTH_THETA,
            abs_tol: 1e-13,
            rel_tol: 1e-11,
        }
    }
}

/// Long-time limit of the coherence ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plateau {
    Finite(f64),
    /// The exponent grows without bound; coherence decays completely.
    Divergent,
}

impl Plateau {
    pub fn value(&self) -> Option<f64> {
        match self {
            Plateau::Finite(v) => Some(*v),
            Plateau::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceCurve {
    pub times: Vec<f64>,
    pub coherence_ratio: Vec<f64>,
    pub plateau: Option<f64>,
}

impl DecoherenceCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_s,coherence_ratio")?;
        for (t, r) in self.times.iter().zip(&self.coherence_ratio) {
            writeln!(out, "{},{}", format::float(*t), format::float(*r))?;
        }
        Ok(())
    }
}

/// Frequency scale used to make the ω integral dimensionless.
fn frequency_scale(sd: &SpectralDensity) -> f64 {
    match sd {
        SpectralDensity::PowerLaw { cutoff_freq, .. } => *cutoff_freq,
        SpectralDensity::Tabulated(t) => t.range().1,
    }
}

fn coth_factor(omega: f64, temperature: f64, theta: f64) -> f64 {
    if temperature == 0.0 {
        return 1.0;
    }
    let y = CODATA.hbar * omega / (theta * CODATA.k_b * temperature);
    1.0 / y.tanh()
}

/// ∫dω weight(ω)·coth·J(ω)/(ħω)², over the support of J, in scaled units.
fn frequency_integral<W>(
    sd: &SpectralDensity,
    env: &ThermalEnv,
    cfg: &HarmonicConfig,
    panel_hint_scaled: Option<f64>,
    weight: W,
) -> std::result::Result<QuadratureResult, QuadError>
where
    W: Fn(f64) -> f64,
{
    let scale = frequency_scale(sd);
    let hbar = CODATA.hbar;
    let integrand = |s: f64| {
        let w = s * scale;
        let hw = hbar * w;
        scale * coth_factor(w, env.temperature, cfg.coth_theta) * sd.eval_unchecked(w) * weight(w) / (hw * hw)
    };
    let mut qcfg = QuadratureConfig::new(cfg.abs_tol, cfg.rel_tol);
    if let Some(h) = panel_hint_scaled {
        qcfg = qcfg.with_panel_hint(h);
    }
    match sd {
        SpectralDensity::PowerLaw { cutoff, .. } => {
            let decay = match cutoff {
                Cutoff::Gaussian => 1.0,
                // exp(−s) < cut at the same point as a Gaussian of this width
                Cutoff::Exponential => (1.0 / SEMI_INFINITE_CUT).ln().sqrt(),
            };
            integrate_semi_infinite(integrand, 0.0, decay, &qcfg)
        }
        SpectralDensity::Tabulated(t) => {
            let (lo, hi) = t.range();
            // integrate node to node so kinks of the interpolant sit on panel edges
            let mut acc = QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 0,
            };
            let mut prev = lo / scale;
            for &node in t.nodes().iter().skip(1) {
                let next = node / scale;
                let r = integrate(integrand, prev, next, &qcfg)?;
                acc.value += r.value;
                acc.abs_error_estimate += r.abs_error_estimate;
                acc.evaluations += r.evaluations;
                prev = next;
            }
            debug_assert!(prev * scale == hi);
            Ok(acc)
        }
    }
}

fn check_env(env: &ThermalEnv, cfg: &HarmonicConfig) -> Result<()> {
    require_non_negative("T", env.temperature)?;
    if !(cfg.coth_theta > 0.0 && cfg.coth_theta.is_finite()) {
        return Err(Error::invalid("theta", format!("must be > 0, got {}", cfg.coth_theta)));
    }
    Ok(())
}

/// Decoherence exponent at time t (the coherence ratio is its negative
/// exponential).
pub fn decoherence_exponent(sd: &SpectralDensity, env: &ThermalEnv, t: f64, cfg: &HarmonicConfig) -> Result<f64> {
    check_env(env, cfg)?;
    require_non_negative("t", t)?;
    if t == 0.0 || sd.is_zero() {
        return Ok(0.0);
    }
    let scale = frequency_scale(sd);
    let hint = PI / (t * scale);
    let r = frequency_integral(sd, env, cfg, Some(hint), |w| {
        let s = (0.5 * w * t).sin();
        s * s
    })
    .map_err(|source| Error::Quadrature {
        context: format!("harmonic decoherence exponent at t = {t:e}"),
        source,
    })?;
    Ok(2.0 * r.value)
}

pub fn coherence_ratio(sd: &SpectralDensity, env: &ThermalEnv, t: f64) -> Result<f64> {
    coherence_ratio_with(sd, env, t, &HarmonicConfig::default())
}

pub fn coherence_ratio_with(sd: &SpectralDensity, env: &ThermalEnv, t: f64, cfg: &HarmonicConfig) -> Result<f64> {
    Ok((-decoherence_exponent(sd, env, t, cfg)?).exp())
}

/// Whether ∫coth·J/ω² converges at ω → 0.
fn plateau_exists(sd: &SpectralDensity, env: &ThermalEnv) -> bool {
    match sd.low_frequency_exponent() {
        None => true,
        // coth ~ k_BT/ħω adds one inverse power at finite temperature
        Some(n) if env.temperature > 0.0 => n > 2.0,
        Some(n) => n > 1.0,
    }
}

pub fn asymptotic_coherence(sd: &SpectralDensity, env: &ThermalEnv) -> Result<Plateau> {
    asymptotic_coherence_with(sd, env, &HarmonicConfig::default())
}

/// t → ∞ limit, obtained by replacing sin²(ωt/2) with its mean 1/2.
pub fn asymptotic_coherence_with(sd: &SpectralDensity, env: &ThermalEnv, cfg: &HarmonicConfig) -> Result<Plateau> {
    check_env(env, cfg)?;
    if sd.is_zero() {
        return Ok(Plateau::Finite(1.0));
    }
    if !plateau_exists(sd, env) {
        return Ok(Plateau::Divergent);
    }
    let r = frequency_integral(sd, env, cfg, None, |_| 1.0).map_err(|source| Error::Quadrature {
        context: "harmonic plateau".into(),
        source,
    })?;
    Ok(Plateau::Finite((-r.value).exp()))
}

/// Coherence ratio on `points` evenly spaced times in [0, t_max]. A zero
/// horizon gives the single point t = 0.
pub fn decoherence_curve(
    sd: &SpectralDensity,
    env: &ThermalEnv,
    t_max: f64,
    points: usize,
    cfg: &HarmonicConfig,
) -> Result<DecoherenceCurve> {
    require_non_negative("tmax", t_max)?;
    let times: Vec<f64> = if t_max == 0.0 {
        vec![0.0]
    } else {
        if points < 2 {
            return Err(Error::invalid("points", format!("need at least 2 points, got {points}")));
        }
        (0..points)
            .map(|i| t_max * i as f64 / (points - 1) as f64)
            .collect()
    };
    let ratios = times
        .par_iter()
        .map(|&t| coherence_ratio_with(sd, env, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let plateau = asymptotic_coherence_with(sd, env, cfg)?.value();
    Ok(DecoherenceCurve {
        times,
        coherence_ratio: ratios,
        plateau,
    })
}

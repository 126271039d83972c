//! Markovian pure dephasing of a two-level system,
//! ρ̇ = −(i/ħ)[H₀, ρ] + ½γ(σ_z ρ σ_z − ρ) with H₀ = −½Eσ_z.
//!
//! Basis order is |0⟩, |1⟩, so the coherence rotates as ρ₀₁ ∝ e^{+iEt/ħ}.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::format;
use crate::model::CODATA;

pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

/// Below this T₂ the Markov limit is not self-consistent (reservoir memory
/// is of order a picosecond).
pub const MARKOV_MIN_T2: f64 = 10e-12;

/// 2×2 density matrix with real populations and one independent coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub rho00: f64,
    pub rho11: f64,
    pub rho01: Complex64,
}

impl DensityMatrix2 {
    pub fn new(rho00: f64, rho11: f64, rho01: Complex64) -> Result<Self> {
        let rho = DensityMatrix2 { rho00, rho11, rho01 };
        rho.validate()?;
        Ok(rho)
    }

    /// Populations (p, 1 − p) with coherence ρ₀₁.
    pub fn with_population(p0: f64, rho01: Complex64) -> Result<Self> {
        Self::new(p0, 1.0 - p0, rho01)
    }

    pub fn rho10(&self) -> Complex64 {
        self.rho01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half_gap = (0.25 * (self.rho00 - self.rho11).powi(2) + self.rho01.norm_sqr()).sqrt();
        (mean - half_gap, mean + half_gap)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho00", self.rho00),
            ("rho11", self.rho11),
            ("rho01", self.rho01.re),
            ("rho01", self.rho01.im),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if (self.trace() - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::invalid("rho", format!("trace is {}, expected 1", self.trace())));
        }
        let (low, _) = self.eigenvalues();
        if low < -POSITIVITY_TOLERANCE {
            return Err(Error::invalid(
                "rho01",
                format!("state is not positive: |rho01|^2 = {} exceeds rho00*rho11 = {}", self.rho01.norm_sqr(), self.rho00 * self.rho11),
            ));
        }
        Ok(())
    }

    fn add_scaled(&self, k: &Derivative, h: f64) -> DensityMatrix2 {
        DensityMatrix2 {
            rho00: self.rho00 + h * k.d00,
            rho11: self.rho11 + h * k.d11,
            rho01: self.rho01 + k.d01 * h,
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        (self.rho00 - other.rho00)
            .abs()
            .max((self.rho11 - other.rho11).abs())
            .max((self.rho01 - other.rho01).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    /// Dephasing rate γ, 1/s.
    pub gamma: f64,
    /// Level splitting E, J.
    pub level_splitting: f64,
}

impl LindbladParams {
    pub fn new(gamma: f64, level_splitting: f64) -> Result<Self> {
        require_non_negative("gamma", gamma)?;
        if !level_splitting.is_finite() {
            return Err(Error::invalid("E", "must be finite"));
        }
        Ok(LindbladParams { gamma, level_splitting })
    }

    fn angular_frequency(&self) -> f64 {
        self.level_splitting / CODATA.hbar
    }

    /// True when T₂ = 1/γ is short enough to question the Markov limit.
    pub fn markov_warning(&self) -> bool {
        self.gamma > 0.0 && 1.0 / self.gamma < MARKOV_MIN_T2
    }
}

pub fn evolve_analytic(rho0: &DensityMatrix2, p: &LindbladParams, t: f64) -> Result<DensityMatrix2> {
    rho0.validate()?;
    require_non_negative("t", t)?;
    let phase = Complex64::from_polar((-p.gamma * t).exp(), p.angular_frequency() * t);
    Ok(DensityMatrix2 {
        rho01: rho0.rho01 * phase,
        ..*rho0
    })
}

struct Derivative {
    d00: f64,
    d11: f64,
    d01: Complex64,
}

fn generator(rho: &DensityMatrix2, omega: f64, gamma: f64) -> Derivative {
    // −(i/ħ)[H₀, ρ] has no population part; ½γ(σ_zρσ_z − ρ) = −γρ₀₁
    Derivative {
        d00: 0.0,
        d11: 0.0,
        d01: Complex64::new(-gamma, omega) * rho.rho01,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEvolution {
    pub rho: DensityMatrix2,
    /// Richardson estimate from a half-resolution run, max-abs over entries.
    pub truncation_error: f64,
}

fn rk4(rho0: &DensityMatrix2, omega: f64, gamma: f64, t: f64, steps: usize) -> DensityMatrix2 {
    let h = t / steps as f64;
    let mut rho = *rho0;
    for _ in 0..steps {
        let k1 = generator(&rho, omega, gamma);
        let k2 = generator(&rho.add_scaled(&k1, 0.5 * h), omega, gamma);
        let k3 = generator(&rho.add_scaled(&k2, 0.5 * h), omega, gamma);
        let k4 = generator(&rho.add_scaled(&k3, h), omega, gamma);
        rho = DensityMatrix2 {
            rho00: rho.rho00 + h / 6.0 * (k1.d00 + 2.0 * k2.d00 + 2.0 * k3.d00 + k4.d00),
            rho11: rho.rho11 + h / 6.0 * (k1.d11 + 2.0 * k2.d11 + 2.0 * k3.d11 + k4.d11),
            rho01: rho.rho01 + (k1.d01 + k2.d01 * 2.0 + k3.d01 * 2.0 + k4.d01) * (h / 6.0),
        };
    }
    rho
}

/// Fixed-step classical RK4 on the full generator.
pub fn evolve_numeric(rho0: &DensityMatrix2, p: &LindbladParams, t: f64, steps: usize) -> Result<NumericEvolution> {
    rho0.validate()?;
    require_non_negative("t", t)?;
    if steps < 1 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let omega = p.angular_frequency();
    let fine = rk4(rho0, omega, p.gamma, t, steps);
    let truncation_error = if steps >= 2 {
        let coarse = rk4(rho0, omega, p.gamma, t, steps / 2);
        fine.max_abs_diff(&coarse) / 15.0
    } else {
        let doubled = rk4(rho0, omega, p.gamma, t, 2);
        fine.max_abs_diff(&doubled) * 16.0 / 15.0
    };
    Ok(NumericEvolution { rho: fine, truncation_error })
}

/// Analytic trajectory sampled at `points` evenly spaced times in [0, t_max].
pub fn trajectory(rho0: &DensityMatrix2, p: &LindbladParams, t_max: f64, points: usize) -> Result<Vec<(f64, DensityMatrix2)>> {
    require_non_negative("tmax", t_max)?;
    if t_max == 0.0 {
        return Ok(vec![(0.0, *rho0)]);
    }
    if points < 2 {
        return Err(Error::invalid("points", format!("need at least 2 points, got {points}")));
    }
    require_positive("tmax", t_max)?;
    (0..points)
        .map(|i| {
            let t = t_max * i as f64 / (points - 1) as f64;
            evolve_analytic(rho0, p, t).map(|r| (t, r))
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(rows: &[(f64, DensityMatrix2)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t_s,rho00,rho11,re_rho01,im_rho01,abs_rho01")?;
    for (t, r) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format::float(*t),
            format::float(r.rho00),
            format::float(r.rho11),
            format::float(r.rho01.re),
            format::float(r.rho01.im),
            format::float(r.rho01.norm()),
        )?;
    }
    Ok(())
}

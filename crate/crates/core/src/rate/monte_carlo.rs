use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coupling::CouplingG2;
use crate::error::{Error, Result};
use crate::model::{anharmonic_strength_sq, DotGeometry, MaterialParams, ThermalEnv, CODATA};
use crate::specfun::occupation_product;

use super::{Method, RateResult};

pub const MIN_SAMPLES: u64 = 10_000;

/// Samples per independently seeded block. Block b draws from ChaCha8 with
/// the run seed and stream b, so the estimate does not depend on how blocks
/// are scheduled.
const BLOCK: u64 = 1 << 16;
const RADIAL_BINS: usize = 10_000;
/// Radial sampling stops at this many thermal wavevectors k_BT/(ħc).
const THERMAL_REACH: f64 = 150.0;

const W_UNIFORM: f64 = 0.2;
const W_FORWARD: f64 = 0.2;
const W_LOG: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            samples: 10_000_000,
            seed: 0,
        }
    }
}

/// 4π·w₀²/((2π)⁶·c): the golden-rule factor 4π, the anharmonic strength,
/// two continuum sums and the 1/c of the resolved radial delta.
pub fn monte_carlo_prefactor(m: &MaterialParams) -> f64 {
    4.0 * PI * anharmonic_strength_sq(m) / ((2.0 * PI).powi(6) * m.c_sound)
}

/// Piecewise-constant radial density ∝ k⁴·n(n+1) on [0, k_max].
struct RadialTable {
    k_max: f64,
    width: f64,
    cdf: Vec<f64>,
    density: Vec<f64>,
}

impl RadialTable {
    fn new(k_max: f64, k_thermal: f64) -> Self {
        let width = k_max / RADIAL_BINS as f64;
        let g = |i: usize| {
            let k = i as f64 * width;
            let x = k / k_thermal;
            if x == 0.0 {
                0.0
            } else {
                x.powi(4) * occupation_product(x)
            }
        };
        let mut mass = Vec::with_capacity(RADIAL_BINS);
        let mut left = g(0);
        for i in 0..RADIAL_BINS {
            let right = g(i + 1);
            mass.push(0.5 * (left + right));
            left = right;
        }
        let total: f64 = mass.iter().sum();
        let mut cdf = Vec::with_capacity(RADIAL_BINS);
        let mut acc = 0.0;
        for &mi in &mass {
            acc += mi / total;
            cdf.push(acc);
        }
        let density = mass.iter().map(|mi| mi / (total * width)).collect();
        RadialTable {
            k_max,
            width,
            cdf,
            density,
        }
    }

    /// Returns (k, pdf(k)).
    fn sample(&self, r: f64, s: f64) -> (f64, f64) {
        let bin = self.cdf.partition_point(|&c| c < r).min(RADIAL_BINS - 1);
        let k = ((bin as f64 + s) * self.width).min(self.k_max);
        (k, self.density[bin])
    }
}

/// Density over u = 1 − cos Θ of the angle between the two directions: a
/// uniform floor, a forward box below u_c and a log-uniform ramp above it.
/// u_c = 1/(kD)² is where the interference factor switches on.
#[derive(Clone, Copy)]
struct RelativeAngle {
    u_c: f64,
    w_uniform: f64,
    w_forward: f64,
    w_log: f64,
    log_span: f64,
}

impl RelativeAngle {
    fn new(k: f64, d: f64) -> Self {
        let u_c = (1.0 / (k * d).powi(2)).min(2.0);
        if u_c >= 2.0 {
            return RelativeAngle {
                u_c: 2.0,
                w_uniform: 1.0,
                w_forward: 0.0,
                w_log: 0.0,
                log_span: 0.0,
            };
        }
        RelativeAngle {
            u_c,
            w_uniform: W_UNIFORM,
            w_forward: W_FORWARD,
            w_log: W_LOG,
            log_span: (2.0 / u_c).ln(),
        }
    }

    fn sample(&self, pick: f64, s: f64) -> (f64, f64) {
        let u = if pick < self.w_uniform {
            2.0 * s
        } else if pick < self.w_uniform + self.w_forward {
            self.u_c * s
        } else {
            self.u_c * (self.log_span * s).exp()
        };
        (u, self.pdf(u))
    }

    fn pdf(&self, u: f64) -> f64 {
        let mut p = 0.5 * self.w_uniform;
        if self.w_forward > 0.0 {
            if u < self.u_c {
                p += self.w_forward / self.u_c;
            } else {
                p += self.w_log / (u * self.log_span);
            }
        }
        p
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, w: f64) {
        self.n += 1;
        let delta = w - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (w - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let frac = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * frac,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * frac,
        }
    }
}

/// Importance-sampled estimate of the momentum-space golden-rule integral.
/// The radial delta fixes |q| = |k|; k, the direction of k and the
/// direction of q relative to k are sampled. `error_estimate` and
/// `mc_std_error` both carry the standard error of the mean.
pub fn rate_monte_carlo(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv, samples: u64, seed: u64) -> Result<RateResult> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            requested: samples,
            minimum: MIN_SAMPLES,
        });
    }
    m.validate()?;
    let g = DotGeometry::new(g.size, g.separation)?;
    let env = ThermalEnv::new(env.temperature)?;
    if env.temperature == 0.0 || g.separation == 0.0 {
        return Ok(RateResult::zero(Method::MonteCarlo));
    }

    let c = CODATA;
    let k_thermal = c.k_b * env.temperature / (c.hbar * m.c_sound);
    let k_max = m.k_debye.min(THERMAL_REACH * k_thermal);
    let radial = RadialTable::new(k_max, k_thermal);
    let coupling = CouplingG2::new(m, &g);
    let pref = monte_carlo_prefactor(m);
    let d = g.separation;

    let weight = |rng: &mut ChaCha8Rng| -> f64 {
        let (k, pdf_k) = radial.sample(rng.gen::<f64>(), rng.gen::<f64>());
        let z1 = 2.0 * rng.gen::<f64>() - 1.0;
        let sin1 = (1.0 - z1 * z1).max(0.0).sqrt();
        let angle = RelativeAngle::new(k, d);
        let (u, pdf_u) = angle.sample(rng.gen::<f64>(), rng.gen::<f64>());
        let psi = 2.0 * PI * rng.gen::<f64>();
        let cos_t = 1.0 - u;
        let sin_t = (u * (2.0 - u)).max(0.0).sqrt();
        let z2 = cos_t * z1 - sin_t * psi.cos() * sin1;
        let p_sq = 2.0 * k * k * u;
        if !(p_sq > 0.0) || !(pdf_k > 0.0) {
            return 0.0;
        }
        let p_z = k * (z1 - z2);
        let x = k / k_thermal;
        let f = pref * k.powi(6) * coupling.eval_axial(p_sq, p_z) * occupation_product(x);
        // Directions of k and of q about k carry densities 1/4π and pdf_u/2π.
        f * (8.0 * PI * PI) / (pdf_k * pdf_u)
    };

    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BLOCK.min(samples - b * BLOCK);
            let mut acc = Moments::default();
            for _ in 0..n {
                acc.push(weight(&mut rng));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);

    let n = total.n as f64;
    let variance = if total.n > 1 { total.m2 / (n - 1.0) } else { 0.0 };
    let std_error = (variance / n).sqrt();
    if !total.mean.is_finite() || !std_error.is_finite() {
        return Err(Error::invalid("samples", "monte carlo estimate is not finite"));
    }
    let mut r = RateResult::new(Method::MonteCarlo, total.mean, std_error, Vec::new());
    r.mc_std_error = Some(std_error);
    Ok(r)
}

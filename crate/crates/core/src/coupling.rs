//! System–reservoir couplings: the double-dot LO displacement coupling and
//! generic parametric spectral densities for the harmonic model.
//!
//! Squared couplings are stored volume-normalized (V·|g|²), so continuum sums
//! Σ_k → V∫d³k/(2π)³ never carry the normalization volume. The amplitude
//! 2e²/(ħ³ε₀ε̃Ω) keeps two extra powers of 1/ħ relative to a dimensionless
//! |g|²; they are the 1/ħ² of the golden-rule rate and the rate routes rely
//! on finding them here.

use std::path::Path;

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::model::{DotGeometry, MaterialParams, CODATA};

/// Wavevector in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Wavevector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Wavevector { x, y, z }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// V·|g_k|² for two Gaussian dots of size L displaced by D along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingG2 {
    amplitude: f64,
    half_size_sq: f64,
    half_separation: f64,
}

impl CouplingG2 {
    pub fn new(m: &MaterialParams, geom: &DotGeometry) -> Self {
        let c = CODATA;
        CouplingG2 {
            amplitude: 2.0 * c.e_charge * c.e_charge / (c.hbar.powi(3) * c.eps0 * m.eps_lattice * m.omega_lo),
            half_size_sq: 0.5 * geom.size * geom.size,
            half_separation: 0.5 * geom.separation,
        }
    }

    /// 2e²/(ħ³ε₀ε̃Ω), the k-independent part.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn eval(&self, k: Wavevector) -> Result<f64> {
        let k2 = k.norm_sq();
        if !(k2 > 0.0) {
            return Err(Error::invalid("k", "coupling is singular at k = 0"));
        }
        require_finite("k", k2)?;
        Ok(self.eval_axial(k2, k.z))
    }

    /// Same as [`eval`](Self::eval) from |k|² and k_z alone (the coupling is
    /// symmetric about the z axis). Caller guarantees |k|² > 0.
    #[inline]
    pub fn eval_axial(&self, k_sq: f64, k_z: f64) -> f64 {
        let s = (k_z * self.half_separation).sin();
        self.amplitude / k_sq * (-self.half_size_sq * k_sq).exp() * s * s
    }
}

/// V·|g_k|², in the convention described at module level.
pub fn g_squared(k: Wavevector, m: &MaterialParams, geom: &DotGeometry) -> Result<f64> {
    CouplingG2::new(m, geom).eval(k)
}

/// Piecewise-linear J(ω) from a table; zero outside the tabulated range.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    omega: Vec<f64>,
    value: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("table", "need at least two points"));
        }
        let mut omega = Vec::with_capacity(points.len());
        let mut value = Vec::with_capacity(points.len());
        for (w, j) in points {
            require_non_negative("omega_rad_per_s", w)?;
            require_non_negative("J_value", j)?;
            if let Some(&last) = omega.last() {
                if w <= last {
                    return Err(Error::invalid("omega_rad_per_s", "table frequencies must be strictly increasing"));
                }
            }
            omega.push(w);
            value.push(j);
        }
        Ok(TabulatedDensity { omega, value })
    }

    /// Two-column CSV `omega_rad_per_s,J_value`. A non-numeric first line is
    /// taken as a header.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse {
                    line: idx + 1,
                    reason: format!("expected two columns, got `{line}`"),
                });
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(w), Ok(j)) => points.push((w, j)),
                _ if points.is_empty() && idx == first_content_line(text) => continue,
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        reason: format!("non-numeric row `{line}`"),
                    })
                }
            }
        }
        Self::new(points)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn eval(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return 0.0;
        }
        let i = match self.omega.binary_search_by(|p| p.total_cmp(&w)) {
            Ok(i) => return self.value[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let (j0, j1) = (self.value[i - 1], self.value[i]);
        j0 + (j1 - j0) * (w - w0) / (w1 - w0)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    /// Kink frequencies of the interpolant.
    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    /// Leading power of J near ω = 0, or `None` when J vanishes on a
    /// neighbourhood of zero.
    fn low_frequency_exponent(&self) -> Option<f64> {
        if self.omega[0] > 0.0 {
            return None;
        }
        if self.value[0] > 0.0 {
            return Some(0.0);
        }
        if self.value[1] > 0.0 {
            Some(1.0)
        } else {
            None
        }
    }
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .unwrap_or(0)
}

/// Shape of the high-frequency suppression of a parametric J(ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// exp(−(ω/ω_c)²)
    Gaussian,
    /// exp(−ω/ω_c)
    Exponential,
}

/// Bath spectral density J(ω) = Σ_k |F_k|² δ(ω − ω_k), in J²·s.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    PowerLaw {
        amplitude: f64,
        exponent: f64,
        cutoff_freq: f64,
        cutoff: Cutoff,
    },
    Tabulated(TabulatedDensity),
}

impl SpectralDensity {
    /// A·ωⁿ·cutoff(ω/ω_c) with n ≥ 1 and a finite cutoff (so J is integrable).
    pub fn power_law(amplitude: f64, exponent: f64, cutoff_freq: f64, cutoff: Cutoff) -> Result<Self> {
        require_non_negative("A", amplitude)?;
        require_finite("n", exponent)?;
        if exponent < 1.0 {
            return Err(Error::invalid("n", format!("exponent must be >= 1, got {exponent}")));
        }
        require_positive("omega_c", cutoff_freq)?;
        Ok(SpectralDensity::PowerLaw {
            amplitude,
            exponent,
            cutoff_freq,
            cutoff,
        })
    }

    pub fn zero() -> Self {
        SpectralDensity::PowerLaw {
            amplitude: 0.0,
            exponent: 2.0,
            cutoff_freq: 1.0,
            cutoff: Cutoff::Gaussian,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SpectralDensity::PowerLaw { amplitude, .. } => *amplitude == 0.0,
            SpectralDensity::Tabulated(t) => t.value.iter().all(|&v| v == 0.0),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, w: f64) -> f64 {
        match self {
            SpectralDensity::PowerLaw {
                amplitude,
                exponent,
                cutoff_freq,
                cutoff,
            } => {
                if *amplitude == 0.0 {
                    return 0.0;
                }
                let r = w / cutoff_freq;
                let damp = match cutoff {
                    Cutoff::Gaussian => (-r * r).exp(),
                    Cutoff::Exponential => (-r).exp(),
                };
                amplitude * w.powf(*exponent) * damp
            }
            SpectralDensity::Tabulated(t) => t.eval(w),
        }
    }

    /// Leading low-frequency power, `None` for a gapped density.
    pub fn low_frequency_exponent(&self) -> Option<f64> {
        match self {
            SpectralDensity::PowerLaw { exponent, .. } => Some(*exponent),
            SpectralDensity::Tabulated(t) => t.low_frequency_exponent(),
        }
    }
}

pub fn spectral_density(sd: &SpectralDensity, omega: f64) -> Result<f64> {
    require_non_negative("omega", omega)?;
    Ok(sd.eval_unchecked(omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn geom(d: f64) -> DotGeometry {
        DotGeometry::new(4e-9, d).unwrap()
    }

    /// |f⁽⁰⁾ − f⁽¹⁾|²/(ħΩ)² built from the single-dot couplings, V = 1.
    fn g2_from_dot_couplings(k: Wavevector, m: &MaterialParams, g: &DotGeometry) -> f64 {
        let c = CODATA;
        let kn = k.norm_sq().sqrt();
        let magnitude = c.e_charge / (c.hbar * kn)
            * (c.hbar * m.omega_lo / (2.0 * c.eps0 * m.eps_lattice)).sqrt()
            * (-(g.size * kn / 2.0).powi(2)).exp();
        let phase = k.z * g.separation / 2.0;
        let f0 = Complex64::from_polar(magnitude, phase);
        let f1 = Complex64::from_polar(magnitude, -phase);
        (f0 - f1).norm_sqr() / (c.hbar * m.omega_lo).powi(2)
    }

    #[test]
    fn vanishes_without_separation_or_along_x() {
        let m = MaterialParams::gaas();
        assert_eq!(g_squared(Wavevector::new(1e8, 2e8, 3e8), &m, &geom(0.0)).unwrap(), 0.0);
        assert_eq!(g_squared(Wavevector::new(1e9, 0.0, 0.0), &m, &geom(1e-8)).unwrap(), 0.0);
        assert!(g_squared(Wavevector::new(0.0, 0.0, 0.0), &m, &geom(1e-8)).is_err());
    }

    #[test]
    fn matches_dot_coupling_difference() {
        let m = MaterialParams::gaas();
        let g = geom(1e-8);
        let kz = PI / g.separation;
        let peak = Wavevector::new(0.0, 0.0, kz);
        let direct = g2_from_dot_couplings(peak, &m, &g);
        let ours = g_squared(peak, &m, &g).unwrap();
        assert!(((ours - direct) / direct).abs() < 1e-13);
        let expected = CouplingG2::new(&m, &g).amplitude() / (kz * kz) * (-0.5 * (g.size * kz).powi(2)).exp();
        assert!(((ours - expected) / expected).abs() < 1e-14);
        for k in [
            Wavevector::new(1e8, -3e8, 2.5e8),
            Wavevector::new(-7e7, 1e9, -4e8),
            Wavevector::new(2e9, 2e9, 2e9),
        ] {
            let a = g_squared(k, &m, &g).unwrap();
            let b = g2_from_dot_couplings(k, &m, &g);
            assert!(((a - b) / b).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_cutoff_bounds_momentum() {
        let m = MaterialParams::gaas();
        let g = geom(1e-8);
        let c = CouplingG2::new(&m, &g);
        let peak = (1..2000)
            .map(|i| {
                let k = i as f64 * 1e6;
                c.eval_axial(k * k, k)
            })
            .fold(0.0, f64::max);
        let far = 20.0 / g.size;
        assert!(c.eval_axial(far * far, far) < 1e-30 * peak);
    }

    #[test]
    fn small_separation_is_quadratic() {
        let m = MaterialParams::gaas();
        let k = Wavevector::new(1e8, 2e8, 3e8);
        let l = 4e-9;
        let d = 1e-4 * l;
        let a = g_squared(k, &m, &DotGeometry::new(l, d).unwrap()).unwrap();
        let b = g_squared(k, &m, &DotGeometry::new(l, 2.0 * d).unwrap()).unwrap();
        assert!((b / a / 4.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spectral_density_forms() {
        let sd = SpectralDensity::power_law(1.0, 2.0, 1.0, Cutoff::Gaussian).unwrap();
        assert_eq!(spectral_density(&sd, 0.0).unwrap(), 0.0);
        assert!(spectral_density(&sd, -1.0).is_err());
        let wide = SpectralDensity::power_law(1.0, 2.0, 1e300, Cutoff::Gaussian).unwrap();
        assert_eq!(spectral_density(&wide, 3.0).unwrap(), 9.0);
        let exp = SpectralDensity::power_law(2.0, 1.0, 1.0, Cutoff::Exponential).unwrap();
        assert!((spectral_density(&exp, 1.0).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-15);
        let tab = SpectralDensity::Tabulated(TabulatedDensity::new(vec![(1.0, 1.0), (3.0, 3.0)]).unwrap());
        assert_eq!(spectral_density(&tab, 2.0).unwrap(), 2.0);
        assert_eq!(spectral_density(&tab, 0.5).unwrap(), 0.0);
        assert_eq!(tab.low_frequency_exponent(), None);
        assert!(SpectralDensity::power_law(1.0, 0.5, 1.0, Cutoff::Gaussian).is_err());
        assert!(SpectralDensity::power_law(1.0, 2.0, f64::INFINITY, Cutoff::Gaussian).is_err());
    }

    #[test]
    fn table_csv() {
        let t = TabulatedDensity::parse_csv("omega_rad_per_s,J_value\n0,0\n1e12,2e-40\n2e12,1e-40\n").unwrap();
        assert_eq!(t.range(), (0.0, 2e12));
        assert!((t.eval(5e11) - 1e-40).abs() < 1e-55);
        assert_eq!(SpectralDensity::Tabulated(t).low_frequency_exponent(), Some(1.0));
        assert!(TabulatedDensity::parse_csv("0,0\nx,y\n").is_err());
        assert!(TabulatedDensity::parse_csv("0,0\n0,1\n").is_err());
        assert!(TabulatedDensity::parse_csv("0,0,0\n1,1,1\n").is_err());
    }
}

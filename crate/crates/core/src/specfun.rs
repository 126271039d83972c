//! Scalar special functions shared by the rate integrands.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadError, QuadratureConfig};

/// ζ(5) to 17 significant digits.
pub const ZETA_5: f64 = 1.036_927_755_143_369_9;
/// ζ(3) to 17 significant digits.
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// lim φ(x) for x → ∞, i.e. 120·ζ(5).
pub const PHI_INFINITY: f64 = 120.0 * ZETA_5;

/// Below this argument `sinc_deficit` uses its Taylor series.
pub const SINC_SERIES_BELOW: f64 = 1e-2;
/// Below this argument the thermal moments use their Taylor series.
pub const MOMENT_SERIES_BELOW: f64 = 1e-2;
/// Above this argument the thermal moments are clamped to their limit.
pub const MOMENT_CLAMP_ABOVE: f64 = 60.0;
/// When both arguments of a moment difference exceed this, the difference is
/// integrated directly instead of subtracting two near-equal values.
pub const TAIL_DIFFERENCE_ABOVE: f64 = 30.0;

/// Bose–Einstein occupation 1/(eˣ − 1) for x = ħω/k_BT.
pub fn bose_occupation(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid("x", format!("occupation needs x > 0, got {x}")));
    }
    Ok(1.0 / x.exp_m1())
}

/// n(x)·(n(x) + 1) = eˣ/(eˣ − 1)², written as 1/(4 sinh²(x/2)).
///
/// Underflows to zero for large x instead of producing inf/inf.
#[inline]
pub fn occupation_product(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    0.25 / (s * s)
}

/// 1 − sin(y)/y, even in y.
#[inline]
pub fn sinc_deficit(y: f64) -> f64 {
    let y = y.abs();
    if y < SINC_SERIES_BELOW {
        let y2 = y * y;
        y2 * (1.0 / 6.0 - y2 * (1.0 / 120.0 - y2 / 5040.0))
    } else {
        1.0 - y.sin() / y
    }
}

/// The thermal moment ∫₀ˣ uⁿ eᵘ/(eᵘ − 1)² du.
///
/// Order 5 is the φ function of the closed-form rate; order 4 shows up when
/// the momentum integral is reduced directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThermalMoment {
    order: u32,
}

impl ThermalMoment {
    pub const PHI: ThermalMoment = ThermalMoment { order: 5 };
    pub const FOURTH: ThermalMoment = ThermalMoment { order: 4 };

    pub fn new(order: u32) -> Result<Self> {
        if !(2..=6).contains(&order) {
            return Err(Error::invalid("order", format!("thermal moment order must be in 2..=6, got {order}")));
        }
        Ok(ThermalMoment { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Integrand uⁿ/(4 sinh²(u/2)).
    #[inline]
    pub fn kernel(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        u.powi(self.order as i32) * occupation_product(u)
    }

    /// n!·ζ(n).
    pub fn limit(&self) -> f64 {
        let zeta = match self.order {
            2 => PI * PI / 6.0,
            3 => ZETA_3,
            4 => PI.powi(4) / 90.0,
            5 => ZETA_5,
            6 => PI.powi(6) / 945.0,
            _ => unreachable!("order checked at construction"),
        };
        let factorial: f64 = (1..=self.order).map(f64::from).product();
        factorial * zeta
    }

    /// Small-x series from u^{n-2}·(1 − u²/12 + u⁴/240).
    fn series(&self, x: f64) -> f64 {
        let n = self.order as i32;
        let nf = f64::from(self.order);
        let x2 = x * x;
        x.powi(n - 1) * (1.0 / (nf - 1.0) - x2 / (12.0 * (nf + 1.0)) + x2 * x2 / (240.0 * (nf + 3.0)))
    }

    fn quadrature(&self, a: f64, b: f64) -> f64 {
        let cfg = QuadratureConfig::new(1e-16, 1e-13).with_max_subdivisions(2_000);
        match integrate(|u| self.kernel(u), a, b, &cfg) {
            Ok(r) => r.value,
            // The kernel is smooth and bounded; a miss can only be round-off
            // in the error estimate near the requested tolerance.
            Err(QuadError::NonConvergence { value, .. }) => value,
            Err(e) => unreachable!("thermal moment kernel is finite: {e}"),
        }
    }

    /// Value at x ≥ 0, accurate to about 1e-12·max(1, value).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::invalid("x", format!("thermal moment needs x >= 0, got {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else if x < MOMENT_SERIES_BELOW {
            self.series(x)
        } else if x > MOMENT_CLAMP_ABOVE {
            self.limit()
        } else {
            self.quadrature(0.0, x)
        }
    }

    /// Moment(hi) − moment(lo) for 0 ≤ lo ≤ hi, without cancellation when
    /// both ends sit deep in the saturated tail.
    pub fn difference(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo >= 0.0 && hi >= lo);
        if lo >= TAIL_DIFFERENCE_ABOVE {
            // beyond lo + 60 the kernel is below e^{-60} of its value at lo
            let end = hi.min(lo + 60.0);
            if end <= lo {
                return 0.0;
            }
            self.quadrature(lo, end)
        } else {
            self.eval_unchecked(hi) - self.eval_unchecked(lo)
        }
    }
}

/// φ(x) = ∫₀ˣ u⁵ eᵘ/(eᵘ − 1)² du.
pub fn phi(x: f64) -> Result<f64> {
    ThermalMoment::PHI.eval(x)
}

/// Tabulated thermal moment with monotone cubic Hermite interpolation, for
/// sweep workloads that evaluate the moment many times.
#[derive(Debug, Clone)]
pub struct PhiTable {
    moment: ThermalMoment,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    limit: f64,
}

impl PhiTable {
    pub const DEFAULT_STEP: f64 = 0.005;

    pub fn new(moment: ThermalMoment) -> Self {
        Self::with_step(moment, Self::DEFAULT_STEP)
    }

    pub fn with_step(moment: ThermalMoment, step: f64) -> Self {
        let cells = (MOMENT_CLAMP_ABOVE / step).ceil() as usize;
        let step = MOMENT_CLAMP_ABOVE / cells as f64;
        let mut values = Vec::with_capacity(cells + 1);
        let mut slopes = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(moment.kernel(0.0));
        for i in 0..cells {
            let lo = step * i as f64;
            let hi = step * (i + 1) as f64;
            acc += moment.quadrature(lo, hi);
            values.push(acc);
            slopes.push(moment.kernel(hi));
        }
        // Fritsch–Carlson limiter; with exact slopes it rarely engages
        for i in 0..cells {
            let delta = (values[i + 1] - values[i]) / step;
            if delta <= 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / delta;
            let b = slopes[i + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[i] = tau * a * delta;
                slopes[i + 1] = tau * b * delta;
            }
        }
        PhiTable {
            moment,
            step,
            values,
            slopes,
            limit: moment.limit(),
        }
    }

    pub fn phi_infinity(&self) -> f64 {
        self.limit
    }

    pub fn moment(&self) -> ThermalMoment {
        self.moment
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::invalid("x", format!("thermal moment needs x >= 0, got {x}")));
        }
        if x >= MOMENT_CLAMP_ABOVE {
            return Ok(self.limit);
        }
        let pos = x / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let s = pos - i as f64;
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupation_values() {
        assert!((bose_occupation(2f64.ln()).unwrap() - 1.0).abs() < 1e-15);
        // Laurent series 1/x − 1/2 + x/12
        let x = 1e-8;
        let n = bose_occupation(x).unwrap();
        assert!(((n - (1.0 / x - 0.5 + x / 12.0)) / n).abs() < 1e-9);
        assert!(((bose_occupation(50.0).unwrap() - (-50f64).exp()) / (-50f64).exp()).abs() < 1e-15);
        assert!(bose_occupation(0.0).is_err());
        assert!(bose_occupation(-1.0).is_err());
        assert_eq!(occupation_product(2000.0), 0.0);
    }

    #[test]
    fn sinc_deficit_values() {
        assert_eq!(sinc_deficit(0.0), 0.0);
        assert!((sinc_deficit(PI) - 1.0).abs() < 1e-15);
        // 30-digit reference: 1.66666658333333531746e-7
        assert!((sinc_deficit(1e-3) - 1.666_666_583_333_335_3e-7).abs() < 1e-22);
        let below = sinc_deficit(SINC_SERIES_BELOW * (1.0 - 1e-12));
        let above = sinc_deficit(SINC_SERIES_BELOW);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn phi_known_points() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        // 30-digit quadrature references
        assert!((phi(0.2).unwrap() - 3.991_124_427_532_96e-4).abs() < 1e-16);
        assert!((phi(1.0).unwrap() - 0.236_615_879_239_094_8).abs() < 1e-13);
        assert!((phi(5.0).unwrap() - 50.263_092_218_175_19).abs() < 1e-11);
        assert!((phi(30.0).unwrap() - 124.431_327_908_385_9).abs() < 1e-10);
        assert!((PHI_INFINITY - 124.431_330_617_204_39).abs() < 1e-12);
        assert!(phi(-1.0).is_err());
        let fourth = ThermalMoment::FOURTH;
        assert!((fourth.eval(1.0).unwrap() - 0.317_244_045_234_426_5).abs() < 1e-13);
        assert!((fourth.eval(5.0).unwrap() - 15.359_784_316_882_18).abs() < 1e-11);
        assert!((fourth.limit() - 25.975_757_609_067_317).abs() < 1e-12);
    }

    #[test]
    fn phi_limit_by_brute_force() {
        let cfg = QuadratureConfig::new(1e-13, 1e-13);
        for m in [ThermalMoment::PHI, ThermalMoment::FOURTH, ThermalMoment::new(3).unwrap()] {
            let brute = crate::quadrature::integrate_semi_infinite(|u| m.kernel(u), 0.0, 40.0, &cfg).unwrap();
            assert!(((brute.value - m.limit()) / m.limit()).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_clamped_tail() {
        for x in [60.0f64, 61.0, 80.0, 1e6] {
            let direct = ThermalMoment::PHI.quadrature(0.0, x.min(200.0));
            assert!((direct - PHI_INFINITY).abs() < 1e-12);
            assert!((phi(x).unwrap() - PHI_INFINITY).abs() < 1e-15);
        }
    }

    #[test]
    fn series_matches_quadrature_at_switch() {
        for m in [ThermalMoment::PHI, ThermalMoment::FOURTH] {
            let x = MOMENT_SERIES_BELOW;
            let s = m.series(x);
            let q = m.quadrature(0.0, x);
            assert!(((s - q) / q).abs() < 1e-13, "order {}: {s} vs {q}", m.order());
        }
    }

    #[test]
    fn tail_difference_avoids_cancellation() {
        let m = ThermalMoment::PHI;
        let d = m.difference(40.0, 45.0);
        let direct = m.quadrature(40.0, 45.0);
        assert!(((d - direct) / direct).abs() < 1e-12);
        assert!(d > 0.0);
        assert_eq!(m.difference(100.0, 100.0), 0.0);
        let small = m.difference(1.0, 2.0);
        assert!((small - (m.eval(2.0).unwrap() - m.eval(1.0).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn bad_moment_order() {
        assert!(ThermalMoment::new(1).is_err());
        assert!(ThermalMoment::new(7).is_err());
    }
}

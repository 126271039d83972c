//! Parameter sweeps over temperature or dot separation, and the log-log and
//! semilog fits used to extract scaling exponents from them.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{require_finite, Error, Result};
use crate::format::{float, parse_float};
use crate::model::{DotGeometry, MaterialParams, ThermalEnv};
use crate::rate::{rate_double_integral, rate_eq8, rate_monte_carlo, Method, MonteCarloConfig, RateResult};

pub const CSV_HEADER: &str = "axis,axis_value,gamma_per_s,t2_s,method,error_estimate";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Kelvin.
    Temperature,
    /// Dot separation D, metres.
    Distance,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Temperature => "temperature",
            SweepAxis::Distance => "distance",
        }
    }

    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s {
            "temperature" | "T" => Some(SweepAxis::Temperature),
            "distance" | "D" => Some(SweepAxis::Distance),
            _ => None,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub material: MaterialParams,
    /// Separation is replaced by the grid value on a distance sweep.
    pub geometry: DotGeometry,
    /// Temperature is replaced by the grid value on a temperature sweep.
    pub env: ThermalEnv,
    pub method: Method,
    /// Only read when `method` is Monte Carlo.
    pub mc: MonteCarloConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        require_finite("min", self.min)?;
        require_finite("max", self.max)?;
        if !(self.min < self.max) {
            return Err(Error::invalid("min", format!("must be below max ({} >= {})", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", "a sweep needs at least 2 points"));
        }
        if self.min < 0.0 {
            return Err(Error::invalid("min", "axis values must be non-negative"));
        }
        if self.spacing == Spacing::Logarithmic && self.min <= 0.0 {
            return Err(Error::invalid("min", "logarithmic spacing needs min > 0"));
        }
        self.material.validate()?;
        DotGeometry::new(self.geometry.size, self.geometry.separation)?;
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Logarithmic => self.min * (self.max / self.min).powf(f),
                }
            })
            .collect()
    }

    fn evaluate(&self, value: f64) -> Result<RateResult> {
        let (g, env) = match self.axis {
            SweepAxis::Temperature => (self.geometry, ThermalEnv::new(value)?),
            SweepAxis::Distance => (self.geometry.with_separation(value)?, self.env),
        };
        let m = &self.material;
        match self.method {
            Method::Eq8 => rate_eq8(m, &g, &env),
            Method::DoubleIntegral => rate_double_integral(m, &g, &env),
            Method::MonteCarlo => rate_monte_carlo(m, &g, &env, self.mc.samples, self.mc.seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub result: Result<RateResult>,
}

/// Evaluates every grid point concurrently. A failing point keeps its error
/// in its row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    Ok(spec
        .grid()
        .into_par_iter()
        .map(|axis_value| SweepPoint {
            axis_value,
            result: spec.evaluate(axis_value),
        })
        .collect())
}

/// One CSV row. Failed points carry NaN in the numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub gamma: f64,
    pub t2: f64,
    pub method: Method,
    pub error_estimate: f64,
}

pub fn sweep_records(spec: &SweepSpec, points: &[SweepPoint]) -> Vec<SweepRecord> {
    points
        .iter()
        .map(|p| match &p.result {
            Ok(r) => SweepRecord {
                axis: spec.axis,
                axis_value: p.axis_value,
                gamma: r.gamma,
                t2: r.t2,
                method: r.method,
                error_estimate: r.error_estimate,
            },
            Err(_) => SweepRecord {
                axis: spec.axis,
                axis_value: p.axis_value,
                gamma: f64::NAN,
                t2: f64::NAN,
                method: spec.method,
                error_estimate: f64::NAN,
            },
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.axis,
            float(r.axis_value),
            float(r.gamma),
            float(r.t2),
            r.method,
            float(r.error_estimate)
        )?;
    }
    Ok(())
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Parse { line: line_no, reason };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(bad(format!("expected 6 columns, got {}", cols.len())));
        }
        let num = |s: &str| parse_float(s).ok_or_else(|| bad(format!("not a number: `{s}`")));
        out.push(SweepRecord {
            axis: SweepAxis::parse(cols[0]).ok_or_else(|| bad(format!("unknown axis `{}`", cols[0])))?,
            axis_value: num(cols[1])?,
            gamma: num(cols[2])?,
            t2: num(cols[3])?,
            method: Method::parse(cols[4]).ok_or_else(|| bad(format!("unknown method `{}`", cols[4])))?,
            error_estimate: num(cols[5])?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in the fitted ordinate: ln y for power laws, y for log laws.
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub points: usize,
    pub mean_y: f64,
}

const MIN_FIT_POINTS: usize = 3;

fn select(points: &[(f64, f64)], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(Error::invalid("window", format!("lower bound {lo} exceeds upper bound {hi}")));
    }
    let sel: Vec<(f64, f64)> = points.iter().copied().filter(|&(x, _)| x >= lo && x <= hi).collect();
    if sel.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: sel.len(),
        });
    }
    Ok(sel)
}

/// Ordinary least squares; returns (slope, intercept, residual rms).
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Fits ln y = slope·ln x + intercept over points with x in `window`.
///
/// The ordinate is ln(y/y₀) with y₀ the first selected y, so rescaling every
/// y by a power of two leaves the slope bit-identical.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let sel = select(points, window)?;
    for &(x, y) in &sel {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("points", format!("power-law fit needs finite x, y > 0, got ({x}, {y})")));
        }
    }
    let y0 = sel[0].1;
    let xs: Vec<f64> = sel.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|p| (p.1 / y0).ln()).collect();
    let (slope, intercept, rms) = least_squares(&xs, &ys);
    Ok(FitResult {
        slope,
        intercept: intercept + y0.ln(),
        residual_rms: rms,
        window,
        points: sel.len(),
        mean_y: sel.iter().map(|p| p.1).sum::<f64>() / sel.len() as f64,
    })
}

/// Fits y = slope·ln x + intercept over points with x in `window`.
pub fn fit_log_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let sel = select(points, window)?;
    for &(x, y) in &sel {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("points", format!("log-law fit needs finite x, y > 0, got ({x}, {y})")));
        }
    }
    let xs: Vec<f64> = sel.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|p| p.1).collect();
    let (slope, intercept, rms) = least_squares(&xs, &ys);
    Ok(FitResult {
        slope,
        intercept,
        residual_rms: rms,
        window,
        points: sel.len(),
        mean_y: ys.iter().sum::<f64>() / ys.len() as f64,
    })
}

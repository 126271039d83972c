//! Deterministic adaptive integration.
//!
//! Globally adaptive bisection driven by a 7-point Gauss / 15-point Kronrod
//! pair on every panel. The rule is open: endpoints are never sampled, so
//! integrands with a removable singularity at a panel edge (the `1/x` of the
//! rate integrands at zero) need no special casing.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Kronrod abscissae on [-1, 1], positive half, descending. The last entry is
/// the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod abscissae (XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Relative size of the Gaussian tail at which semi-infinite ranges are cut.
pub const SEMI_INFINITE_CUT: f64 = 1e-30;

/// Width cap for the initial panels of an oscillatory integrand.
pub const MAX_INITIAL_PANEL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Outer,
    Inner,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "no convergence after {subdivisions} subdivisions: estimate {value:e} ± {error_estimate:e}, tolerance {tolerance:e}"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("integrand returned {value} at x = {x:e}")]
    NonFiniteSample { x: f64, value: f64 },
    #[error("invalid quadrature input: {0}")]
    InvalidInput(String),
    #[error("{axis:?} axis: {source}")]
    OnAxis {
        axis: Axis,
        #[source]
        source: Box<QuadError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Initial panel width for oscillatory integrands (e.g. π/α).
    pub panel_hint: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200_000,
            panel_hint: None,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_panel_hint(mut self, width: f64) -> Self {
        self.panel_hint = Some(width);
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadError::InvalidInput(format!(
                "tolerances must be > 0 (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidInput("max_subdivisions must be >= 1".into()));
        }
        if let Some(h) = self.panel_hint {
            if !(h > 0.0) {
                return Err(QuadError::InvalidInput(format!("panel hint must be > 0, got {h}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; ties broken on position so pop order never
        // depends on anything but the inputs
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn sample<F>(f: &mut F, x: f64) -> Result<f64, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    let y = f(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFiniteSample { x, value: y })
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = sample(f, centre)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = sample(f, centre - dx)?;
        let f2 = sample(f, centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn too_narrow(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid <= a || mid >= b || (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs())
}

fn sum_segments(segs: &mut [Segment]) -> (f64, f64) {
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Core adaptive driver over a fallible integrand.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadError::InvalidInput(format!("limits must be finite, got [{a}, {b}]")));
    }
    if a > b {
        return Err(QuadError::InvalidInput(format!("lower limit {a} exceeds upper limit {b}")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }

    let width = b - a;
    let panels = match cfg.panel_hint {
        Some(h) => {
            let w = h.min(MAX_INITIAL_PANEL);
            ((width / w).ceil() as usize).clamp(1, cfg.max_subdivisions)
        }
        None => 1,
    };

    let mut heap = BinaryHeap::with_capacity(panels * 2);
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for i in 0..panels {
        let lo = a + width * (i as f64) / (panels as f64);
        let hi = if i + 1 == panels {
            b
        } else {
            a + width * ((i + 1) as f64) / (panels as f64)
        };
        let seg = kronrod15(&mut f, lo, hi)?;
        evaluations += 15;
        total_value += seg.value;
        total_error += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = panels;
    let mut since_resum = 0usize;
    loop {
        let tolerance = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tolerance || since_resum >= 512 {
            let mut all: Vec<Segment> = heap.iter().copied().chain(frozen.iter().copied()).collect();
            let (v, e) = sum_segments(&mut all);
            total_value = v;
            total_error = e;
            since_resum = 0;
            if total_error <= cfg.abs_tol.max(cfg.rel_tol * total_value.abs()) {
                return Ok(QuadratureResult {
                    value: total_value,
                    abs_error_estimate: total_error,
                    evaluations,
                });
            }
        }
        let fail = |value: f64, error_estimate: f64, subdivisions: usize| QuadError::NonConvergence {
            value,
            error_estimate,
            tolerance: cfg.abs_tol.max(cfg.rel_tol * value.abs()),
            subdivisions,
        };
        if subdivisions >= cfg.max_subdivisions {
            return Err(fail(total_value, total_error, subdivisions));
        }
        let Some(worst) = heap.pop() else {
            return Err(fail(total_value, total_error, subdivisions));
        };
        if too_narrow(worst.a, worst.b) {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        since_resum += 1;
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, cfg)
}

/// Integrates over `[a, ∞)` for integrands bounded by a Gaussian envelope
/// `exp(-((x - a)/decay_scale)²)`. The range is cut where that envelope drops
/// below [`SEMI_INFINITE_CUT`] and extended while the integrand at the cut is
/// still not negligible against the running value.
pub fn integrate_semi_infinite<F>(f: F, a: f64, decay_scale: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    if !(decay_scale > 0.0 && decay_scale.is_finite()) {
        return Err(QuadError::InvalidInput(format!("decay scale must be > 0, got {decay_scale}")));
    }
    let reach = (1.0 / SEMI_INFINITE_CUT).ln().sqrt();
    let mut upper = a + decay_scale * reach;
    let mut acc = integrate(&f, a, upper, cfg)?;
    for _ in 0..32 {
        let edge = f(upper);
        if !edge.is_finite() {
            return Err(QuadError::NonFiniteSample { x: upper, value: edge });
        }
        let tail = edge.abs() * decay_scale;
        if tail <= SEMI_INFINITE_CUT * acc.value.abs() || tail <= 1e-3 * cfg.abs_tol {
            acc.abs_error_estimate += tail + SEMI_INFINITE_CUT * acc.value.abs();
            acc.evaluations += 1;
            return Ok(acc);
        }
        let next = upper + 2.0 * decay_scale;
        let piece = integrate(&f, upper, next, cfg)?;
        acc.value += piece.value;
        acc.abs_error_estimate += piece.abs_error_estimate;
        acc.evaluations += piece.evaluations + 1;
        upper = next;
    }
    Err(QuadError::NonConvergence {
        value: acc.value,
        error_estimate: f64::INFINITY,
        tolerance: cfg.abs_tol.max(cfg.rel_tol * acc.value.abs()),
        subdivisions: cfg.max_subdivisions,
    })
}

/// ∫ₐᵇ dx ∫_{inner_lower}^{t_max(x)} dt f(x, t).
///
/// Each outer sample integrates the inner axis with its absolute tolerance
/// divided by the outer width, so inner errors cannot dominate the outer
/// budget. Failures are tagged with the axis on which they happened.
pub fn integrate_nested<F, G>(
    f: F,
    outer: (f64, f64),
    inner_lower: f64,
    t_max: G,
    outer_cfg: &QuadratureConfig,
    inner_cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (a, b) = outer;
    let span = (b - a).abs().max(f64::MIN_POSITIVE);
    let inner = QuadratureConfig {
        abs_tol: inner_cfg.abs_tol.min(outer_cfg.abs_tol / span),
        ..*inner_cfg
    };
    let inner_evals = Cell::new(0usize);
    let worst_inner = Cell::new(0.0f64);
    let outer_result = try_integrate(
        |x| {
            let upper = t_max(x);
            if !upper.is_finite() {
                return Err(QuadError::OnAxis {
                    axis: Axis::Inner,
                    source: Box::new(QuadError::InvalidInput(format!("inner limit at x = {x:e} is {upper}"))),
                });
            }
            if upper <= inner_lower {
                return Ok(0.0);
            }
            let r = try_integrate(|t| Ok(f(x, t)), inner_lower, upper, &inner).map_err(|e| QuadError::OnAxis {
                axis: Axis::Inner,
                source: Box::new(e),
            })?;
            inner_evals.set(inner_evals.get() + r.evaluations);
            worst_inner.set(worst_inner.get().max(r.abs_error_estimate));
            Ok(r.value)
        },
        a,
        b,
        outer_cfg,
    )
    .map_err(|e| match e {
        e @ QuadError::OnAxis { .. } => e,
        other => QuadError::OnAxis {
            axis: Axis::Outer,
            source: Box::new(other),
        },
    })?;
    Ok(QuadratureResult {
        value: outer_result.value,
        abs_error_estimate: outer_result.abs_error_estimate + span * worst_inner.get(),
        evaluations: outer_result.evaluations + inner_evals.get(),
    })
}

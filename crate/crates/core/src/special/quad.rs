//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7-point Gauss rule embedded in a 15-point Kronrod rule gives the local
//! error estimate; intervals are split at their midpoint, worst first, until
//! the summed error estimate meets the tolerance.  The integrand may be
//! real- or complex-valued (see [`QuadOutput`]).  Subdivision order is fully
//! deterministic: ties in the error estimate are broken by interval position.
//!
//! Endpoint-integrable singularities (`log t`, `t^α` with `α > -1`) are fine —
//! the Kronrod nodes are interior, so the integrand is never evaluated at the
//! endpoints — but they cost extra subdivisions near the offending end.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// 7-point Gauss weights for the abscissae `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Scalar output type for integrands: `f64` or `Complex64`.
pub trait QuadOutput: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadOutput for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadOutput for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Absolute tolerance on the integral.
    pub abs_tol: f64,
    /// Relative tolerance (against the current value estimate).
    pub rel_tol: f64,
    /// Maximum number of interval subdivisions before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

/// Converged integral with its error estimate and work counters.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub fn_evals: usize,
}

struct Interval<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

/// One G7/K15 evaluation on [lo, hi]: returns (kronrod value, error estimate).
fn gk15<T: QuadOutput>(f: &mut impl FnMut(f64) -> T, lo: f64, hi: f64) -> (T, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut result_gauss = fc.scale(WG[3]);
    let mut result_kronrod = fc.scale(WGK[7]);
    let mut resabs = fc.norm() * WGK[7];

    let mut fv = [T::zero(); 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        fv[j] = f_lo;
        fv[14 - j] = f_hi;
        let sum = f_lo.add(f_hi);
        result_kronrod = result_kronrod.add(sum.scale(WGK[j]));
        resabs += WGK[j] * (f_lo.norm() + f_hi.norm());
        if j % 2 == 1 {
            result_gauss = result_gauss.add(sum.scale(WG[j / 2]));
        }
    }

    // QUADPACK-style rescaled error estimate: resasc measures the variation of
    // f around its mean, which keeps the estimate honest on smooth integrands
    // while not under-reporting on rough ones.
    let mean = result_kronrod.scale(0.5);
    let mut resasc = WGK[7] * fv[7].sub(mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * (fv[j].sub(mean).norm() + fv[14 - j].sub(mean).norm());
    }
    resasc *= half.abs();
    resabs *= half.abs();

    let value = result_kronrod.scale(half);
    let raw_err = value.sub(result_gauss.scale(half)).norm();
    let mut err = raw_err;
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let tiny_floor = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny_floor {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Adaptively integrate `f` over `[a, b]`.
///
/// `a > b` flips the sign; `a == b` returns zero.  Fails with
/// [`Error::QuadratureNonConvergence`] (carrying the worst subinterval) if the
/// subdivision budget runs out before the tolerance is met.
pub fn integrate<T: QuadOutput>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error_estimate: 0.0,
            subdivisions: 0,
            fn_evals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain {
            context: "integrate",
            msg: format!("endpoints must be finite, got [{a}, {b}]"),
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut fn_evals = 15usize;
    let (v0, e0) = gk15(&mut f, lo, hi);
    let mut intervals = vec![Interval {
        lo,
        hi,
        value: v0,
        error: e0,
    }];

    let mut subdivisions = 0usize;
    loop {
        let mut total = T::zero();
        let mut total_err = 0.0;
        for iv in &intervals {
            total = total.add(iv.value);
            total_err += iv.error;
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err <= target {
            return Ok(QuadResult {
                value: total.scale(sign),
                error_estimate: total_err,
                subdivisions,
                fn_evals,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            // Deterministic worst interval: largest error, leftmost on ties.
            let worst = intervals
                .iter()
                .max_by(|x, y| {
                    x.error
                        .partial_cmp(&y.error)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(y.lo.partial_cmp(&x.lo).unwrap_or(std::cmp::Ordering::Equal))
                })
                .expect("at least one interval");
            return Err(Error::QuadratureNonConvergence {
                estimate: total_err,
                target,
                worst_lo: worst.lo,
                worst_hi: worst.hi,
            });
        }

        let worst_idx = intervals
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| {
                x.error
                    .partial_cmp(&y.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(y.lo.partial_cmp(&x.lo).unwrap_or(std::cmp::Ordering::Equal))
            })
            .map(|(i, _)| i)
            .expect("at least one interval");
        let Interval { lo, hi, .. } = intervals.swap_remove(worst_idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval no longer splittable in f64; accept what we have.
            let (v, e) = gk15(&mut f, lo, hi);
            fn_evals += 15;
            intervals.push(Interval {
                lo,
                hi,
                value: v,
                error: 0.0,
            });
            let _ = (v, e);
            subdivisions += 1;
            continue;
        }
        let (v_l, e_l) = gk15(&mut f, lo, mid);
        let (v_r, e_r) = gk15(&mut f, mid, hi);
        fn_evals += 30;
        intervals.push(Interval {
            lo,
            hi: mid,
            value: v_l,
            error: e_l,
        });
        intervals.push(Interval {
            lo: mid,
            hi,
            value: v_r,
            error: e_r,
        });
        subdivisions += 1;
    }
}

/// Composite (non-adaptive) G7/K15 over the consecutive panels defined by
/// `edges`.  One Kronrod rule per panel, summed in panel order, so the result
/// is bit-deterministic for a fixed edge list.  The error estimate is the sum
/// of the per-panel estimates; nothing is enforced against it — callers that
/// want guaranteed tolerances should use [`integrate`].
pub fn fixed_panels<T: QuadOutput>(
    mut f: impl FnMut(f64) -> T,
    edges: &[f64],
) -> Result<QuadResult<T>> {
    if edges.len() < 2 {
        return Err(Error::Domain {
            context: "fixed_panels",
            msg: format!("need at least 2 edges, got {}", edges.len()),
        });
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::Domain {
            context: "fixed_panels",
            msg: "edges must be finite and strictly increasing".into(),
        });
    }
    let mut value = T::zero();
    let mut error_estimate = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        value = value.add(v);
        error_estimate += e;
    }
    Ok(QuadResult {
        value,
        error_estimate,
        subdivisions: 0,
        fn_evals: 15 * (edges.len() - 1),
    })
}

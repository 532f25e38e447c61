//! Cutoff heat traces on a cone, their divergences as the cutoff is removed,
//! and the renormalized trace.
//!
//! The heat operator on an infinite cone is not trace class, so the trace is
//! regularized over the region `r ≤ 1/δ` (sharp) or by a profile
//! `χ_{1,δ}(z) = χ₁(rδ)` (smooth), with `χ₁` nonincreasing, `≡ 1` on
//! `[0, 1/2]` and `≡ 0` on `[2, ∞)`.  Conformal scaling collapses everything
//! onto the cross-section heat trace at unit radius,
//!
//! ```text
//! G(s) = ∫_N H(s, (1,y), (1,y)) dy = (1/2s) Σ_j m_j e^{−x} I_{ν_j}(x),
//!        x = 1/(2s),
//! ```
//!
//! through which the regularized trace becomes one-dimensional:
//!
//! ```text
//! Tr_δ = ∫_{r≤1} H dz + (1/2) ∫ χ₁(δ√(t/s)) G(s) s^{−1} ds,
//! ```
//!
//! the core `∫_{r≤1}` being δ-independent (every admissible cutoff is `≡ 1`
//! there once `δ ≤ 1/8`).  As `δ → 0` the sweep `δ ↦ Tr_δ` expands over the
//! divergence basis `{δ^{k−n}}_{k<n} ∪ {log δ} ∪ {1}`; the coefficient of
//! `1` is the renormalized trace.  With `G(s) ∼ Σ_k a_k s^{(k−n)/2}`, the
//! sharp-cutoff divergent coefficients are
//!
//! ```text
//! f_k = a_k t^{(k−n)/2} / (n−k)   (k < n),       f_log = −a_n,
//! ```
//!
//! and a smooth cutoff rescales each power term by the profile moment
//! `l_{n−k} = −∫ χ₁′(r) r^{n−k} dr` (substitute `ρ = δ√(t/s)` in the tail
//! integral to see the exponent), leaves the log coefficient alone, and
//! shifts the finite part by `FP_smooth − FP_sharp = a_n l_log = −f_log l_log`
//! with `l_log = −∫ χ₁′(r) ln r dr`.
//!
//! ### Evaluating `G` at very small `s`
//!
//! A sweep down to `δ = 2^{−14}` needs `G` at `s ≈ δ²t`, where the mode sum
//! would take `~1/(2s)` modes — hopeless.  But for every built-in
//! cross-section the cone is flat (or exactly Euclidean) away from the tip,
//! so `G(s) − a₀ s^{−n/2}` is a pure tip effect bounded by `e^{−κ/s}` with
//! `κ = min(1, sin²(L/2))` the squared half-length of the shortest closed
//! geodesic loop through the unit circle of the cone.  Below the switch
//! point `s⋆ = κ/45` (defect `< e^{−45} ≈ 3·10^{−20}` relatively) `G` is
//! evaluated as `a₀ s^{−n/2}` outright; the tests verify the exponential
//! defect decay on the mode-sum side of the switch.  File-backed spectra
//! carry no such geometric bound, so they always use the mode sum and fail
//! loudly when the listed spectrum cannot reach the requested `s`.

use nalgebra::{DMatrix, DVector};

use crate::cross_section::{ConeGeometry, SpectrumSource};
use crate::error::{Error, Result};
use crate::special::bessel::scaled_bessel_i;
use crate::special::quad::{integrate, QuadConfig};
use crate::cone::ModeSumConfig;

/// Smooth cutoff profiles `χ₁` (each `≡ 1` on `[0, 1/2]`, `≡ 0` on `[2, ∞)`,
/// nonincreasing, C² at the joins).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothProfile {
    /// Symmetric in `ln r`: `χ₁(r) + χ₁(1/r) = 1`, which forces `l_log = 0`.
    LogSymmetric,
    /// A plain polynomial step in `r` on `[1/2, 2]`; `l_log ≠ 0`, useful for
    /// exercising the finite-part shift.
    PlainStep,
}

/// Trace regularization: sharp restriction to `r ≤ 1/δ` or a smooth profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    Sharp,
    Smooth(SmoothProfile),
}

/// Quintic smoothstep: 0 → 1 on [0, 1] with vanishing first and second
/// derivatives at both ends.
fn smootherstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

impl Cutoff {
    /// The profile `χ₁(r)` (the sharp case is the characteristic function of
    /// `[0, 1]`).
    pub fn chi1(&self, r: f64) -> f64 {
        match self {
            Cutoff::Sharp => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Cutoff::Smooth(SmoothProfile::LogSymmetric) => {
                if r <= 0.5 {
                    1.0
                } else if r >= 2.0 {
                    0.0
                } else {
                    // ξ runs 0 → 1 as ln r runs −ln 2 → ln 2.
                    let xi = 0.5 * (r.ln() / std::f64::consts::LN_2 + 1.0);
                    1.0 - smootherstep(xi)
                }
            }
            Cutoff::Smooth(SmoothProfile::PlainStep) => {
                1.0 - smootherstep((r - 0.5) / 1.5)
            }
        }
    }
}

/// Cross-section heat trace `G(s) = (1/2s) Σ_j m_j e^{−x} I_{ν_j}(x)`,
/// `x = 1/(2s)`, by direct mode sum.
///
/// Works for any spectrum (only multiplicities are needed).  The sum turns
/// over at `ν ≈ 1/(2s)`, so small `s` needs a large eigenvalue cutoff;
/// exhausting the spectrum first is a [`Error::NotConverged`].
pub fn cross_section_heat_trace(geom: &ConeGeometry, s: f64, cfg: &ModeSumConfig) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain {
            context: "cross_section_heat_trace",
            msg: format!("time must be positive and finite, got {s}"),
        });
    }
    let x = 0.5 / s;
    let entries = geom.spectrum().entries();
    let mut sum = 0.0f64;
    let mut prev = f64::NAN;
    let mut run = 0usize;
    let mut ratios = [f64::NAN; 3];
    let mut last = 0.0f64;
    for (j, &(lambda, mult)) in entries.iter().enumerate() {
        let nu = geom.indicial_root(lambda);
        let term = mult * scaled_bessel_i(nu, x, &cfg.bessel)?;
        sum += term;
        if j > 0 {
            let ratio = if prev > 0.0 { term / prev } else { 0.0 };
            if ratio <= 0.95 {
                ratios[run % 3] = ratio;
                run += 1;
            } else {
                run = 0;
            }
            if run >= 3 {
                let q = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
                if term * q / (1.0 - q) <= cfg.rel_tol * sum.max(f64::MIN_POSITIVE) {
                    return Ok(sum / (2.0 * s));
                }
            }
        }
        prev = term;
        last = term;
    }
    Err(Error::NotConverged {
        context: "cross-section heat trace",
        terms: entries.len(),
        last_term: last,
        target: cfg.rel_tol * sum,
    })
}

/// Leading Weyl coefficient `a₀ = (4π)^{−n/2} V`.
pub fn weyl_coefficient(geom: &ConeGeometry) -> f64 {
    let n = geom.dim() as f64;
    geom.cross_section_volume() * (4.0 * std::f64::consts::PI).powf(-0.5 * n)
}

/// Below this time the tip defect `G(s) − a₀ s^{−n/2}` is under `e^{−45}`
/// relatively, for geometries where that bound is available.
fn weyl_switch(geom: &ConeGeometry) -> Option<f64> {
    let kappa = match *geom.spectrum().source() {
        SpectrumSource::Circle { length } => {
            if length >= std::f64::consts::PI {
                1.0
            } else {
                (0.5 * length).sin().powi(2)
            }
        }
        // Built-in sphere cones are exactly Euclidean; any switch is valid.
        SpectrumSource::Sphere { .. } => 1.0,
        SpectrumSource::File { .. } => return None,
    };
    Some(kappa / 45.0)
}

/// `G(s)` with the small-`s` Weyl asymptote spliced in below the switch
/// point (see the module docs).
fn heat_trace_hybrid(geom: &ConeGeometry, s: f64, cfg: &ModeSumConfig) -> Result<f64> {
    if let Some(switch) = weyl_switch(geom) {
        if s <= switch {
            let n = geom.dim() as f64;
            return Ok(weyl_coefficient(geom) * s.powf(-0.5 * n));
        }
    }
    cross_section_heat_trace(geom, s, cfg)
}

fn integrate_fallible(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    quad: &QuadConfig,
) -> Result<f64> {
    let mut first_err: Option<Error> = None;
    let res = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                first_err.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        quad,
    );
    if let Some(e) = first_err {
        return Err(e);
    }
    Ok(res?.value)
}

/// `(1/2) ∫ w(u) G(e^u) du` over `[u_lo, u_hi]`, split at the hybrid switch
/// so the adaptive rule never straddles the (invisible but present) splice.
fn integrate_g_log(
    geom: &ConeGeometry,
    cfg: &ModeSumConfig,
    quad: &QuadConfig,
    u_lo: f64,
    u_hi: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(u_hi > u_lo) {
        return Ok(0.0);
    }
    let mut cuts = vec![u_lo];
    if let Some(sw) = weyl_switch(geom) {
        let usw = sw.ln();
        if usw > u_lo && usw < u_hi {
            cuts.push(usw);
        }
    }
    cuts.push(u_hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_fallible(
            |u| Ok(0.5 * weight(u) * heat_trace_hybrid(geom, u.exp(), cfg)?),
            w[0],
            w[1],
            quad,
        )?;
    }
    Ok(total)
}

fn trace_quad() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-12,
        ..QuadConfig::default()
    }
}

/// Core contribution `∫_{r≤1} H(t, z, z) dz = (1/2)∫_t^∞ G(s) s^{−1} ds`,
/// truncated 40 e-folds past `t` (relative truncation error `< e^{−40}`).
fn core_trace(geom: &ConeGeometry, t: f64, cfg: &ModeSumConfig) -> Result<f64> {
    integrate_g_log(geom, cfg, &trace_quad(), t.ln(), t.ln() + 40.0, |_| 1.0)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.125) {
        return Err(Error::Domain {
            context: "truncated trace",
            msg: format!("cutoff parameter must satisfy 0 < δ ≤ 1/8, got {delta}"),
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            context: "truncated trace",
            msg: format!("time must be positive and finite, got {t}"),
        });
    }
    Ok(())
}

/// Tail contribution of the regularized trace beyond `r = 1`, for one `δ`.
fn tail_trace(
    geom: &ConeGeometry,
    t: f64,
    delta: f64,
    cutoff: &Cutoff,
    cfg: &ModeSumConfig,
) -> Result<f64> {
    let quad = trace_quad();
    match cutoff {
        // r ≤ 1/δ ⇔ s ≥ δ²t.
        Cutoff::Sharp => integrate_g_log(
            geom,
            cfg,
            &quad,
            (delta * delta * t).ln(),
            t.ln(),
            |_| 1.0,
        ),
        Cutoff::Smooth(_) => {
            // χ₁(δ r) with r = √(t/s): transition for s ∈ [δ²t/4, 4δ²t],
            // plateau χ ≡ 1 above.
            let s_zero = 0.25 * delta * delta * t;
            let s_one = 4.0 * delta * delta * t;
            let ln_t = t.ln();
            let transition = integrate_g_log(
                geom,
                cfg,
                &quad,
                s_zero.ln(),
                s_one.ln().min(ln_t),
                |u| cutoff.chi1(delta * (0.5 * (ln_t - u)).exp()),
            )?;
            let plateau = integrate_g_log(geom, cfg, &quad, s_one.ln(), ln_t, |_| 1.0)?;
            Ok(transition + plateau)
        }
    }
}

/// Regularized heat trace `Tr(χ_{1,δ} e^{−tΔ})` on the cone.
pub fn truncated_trace_cone(
    geom: &ConeGeometry,
    t: f64,
    delta: f64,
    cutoff: &Cutoff,
    cfg: &ModeSumConfig,
) -> Result<f64> {
    check_time(t)?;
    check_delta(delta)?;
    Ok(core_trace(geom, t, cfg)? + tail_trace(geom, t, delta, cutoff, cfg)?)
}

/// A regularized-trace sweep over a `δ` grid at fixed `t` and cutoff.
#[derive(Debug, Clone)]
pub struct TraceSweep {
    pub t: f64,
    pub cutoff: Cutoff,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Default sweep grid `δ = 2^{−3}, …, 2^{−14}`.
///
/// The lower end is set by cost: each halving of `δ` extends the tail
/// quadrature by a fixed amount, and 2^{−14} already pins the fitted
/// coefficients to well beyond their test tolerances.  The upper end is
/// only adequate while `δ²t` stays small — see [`delta_grid_for_time`].
pub fn default_delta_grid() -> Vec<f64> {
    (3..=14).map(|e| 0.5f64.powi(e)).collect()
}

/// A 12-point dyadic `δ` grid adapted to the time.
///
/// The truncated trace deviates from the divergence basis by the tip-defect
/// piece `(1/2)∫_0^{δ²t} g(s)/s ds ~ e^{−κ/(δ²t)}`, which is invisible for
/// `δ²t ≪ κ` but contaminates fits once the cutoff radius `1/δ` approaches
/// the diffusion length `√t`.  The grid's largest `δ` keeps `δ²t ≤ κ/30`
/// (and never exceeds the contract bound `1/8`).
pub fn delta_grid_for_time(geom: &ConeGeometry, t: f64) -> Vec<f64> {
    let kappa = weyl_switch(geom).map(|s| 45.0 * s).unwrap_or(1.0);
    let emin = (0.5 * (30.0 * t / kappa).log2()).ceil().max(3.0) as i32;
    (emin..emin + 12).map(|e| 0.5f64.powi(e)).collect()
}

/// Sweep the regularized trace over a `δ` grid (the δ-independent core is
/// computed once).
pub fn trace_sweep(
    geom: &ConeGeometry,
    t: f64,
    cutoff: &Cutoff,
    deltas: &[f64],
    cfg: &ModeSumConfig,
) -> Result<TraceSweep> {
    check_time(t)?;
    if deltas.is_empty() {
        return Err(Error::Domain {
            context: "trace_sweep",
            msg: "need at least one δ".into(),
        });
    }
    for &d in deltas {
        check_delta(d)?;
    }
    let core = core_trace(geom, t, cfg)?;
    let mut values = Vec::with_capacity(deltas.len());
    for &d in deltas {
        values.push(core + tail_trace(geom, t, d, cutoff, cfg)?);
    }
    Ok(TraceSweep {
        t,
        cutoff: *cutoff,
        deltas: deltas.to_vec(),
        values,
    })
}

/// Fitted expansion of a trace sweep over `{δ^{k−n}}_{k<n} ∪ {log δ, 1}`.
#[derive(Debug, Clone)]
pub struct DivergentExpansion {
    /// `(k − n, coefficient)` for each divergent power, ascending in `k`.
    pub powers: Vec<(f64, f64)>,
    /// Coefficient of `log δ`.
    pub log_coeff: f64,
    /// Coefficient of `1`: the renormalized trace.
    pub finite_part: f64,
    /// Condition number of the (row-normalized) design matrix.
    pub condition: f64,
    /// Largest relative residual of the fit on the sweep.
    pub max_rel_residual: f64,
}

/// Least-squares fit of a sweep against the divergence basis for an
/// `n`-dimensional cone.
///
/// Rows are normalized by `1/|value|`, so the solve balances *relative*
/// residuals — without this the `δ^{−n}` rows would drown the finite part.
pub fn fit_divergent_expansion(sweep: &TraceSweep, n: usize) -> Result<DivergentExpansion> {
    let m = sweep.deltas.len();
    let ncols = n + 2;
    if m < ncols + 2 {
        return Err(Error::Domain {
            context: "fit_divergent_expansion",
            msg: format!("need at least {} sweep points for n = {n}, got {m}", ncols + 2),
        });
    }
    let mut a = DMatrix::<f64>::zeros(m, ncols);
    let mut b = DVector::<f64>::zeros(m);
    for i in 0..m {
        let d = sweep.deltas[i];
        let v = sweep.values[i];
        let w = 1.0 / v.abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            a[(i, k)] = d.powi(k as i32 - n as i32) * w;
        }
        a[(i, n)] = d.ln() * w;
        a[(i, n + 1)] = w;
        b[i] = v * w;
    }
    solve_weighted(a, b, "fit_divergent_expansion").map(|(x, condition, max_rel_residual)| {
        DivergentExpansion {
            powers: (0..n).map(|k| (k as f64 - n as f64, x[k])).collect(),
            log_coeff: x[n],
            finite_part: x[n + 1],
            condition,
            max_rel_residual,
        }
    })
}

pub(crate) fn solve_weighted(
    a: DMatrix<f64>,
    b: DVector<f64>,
    context: &'static str,
) -> Result<(DVector<f64>, f64, f64)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin.max(f64::MIN_POSITIVE);
    if condition > 1e13 {
        return Err(Error::IllConditionedFit {
            condition,
            suggestion: format!("{context}: widen the grid range or add points"),
        });
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|_| Error::IllConditionedFit {
            condition,
            suggestion: format!("{context}: singular design matrix"),
        })?;
    let resid = (&a * &x - &b).abs().max();
    Ok((x, condition, resid))
}

/// Renormalized heat trace: the finite part of a time-adapted sweep.
pub fn renormalized_trace(
    geom: &ConeGeometry,
    t: f64,
    cutoff: &Cutoff,
    cfg: &ModeSumConfig,
) -> Result<f64> {
    let sweep = trace_sweep(geom, t, cutoff, &delta_grid_for_time(geom, t), cfg)?;
    Ok(fit_divergent_expansion(&sweep, geom.dim())?.finite_part)
}

/// Fitted short-time coefficients `G(s) ≈ Σ_{k=0}^{n} a_k s^{(k−n)/2}`.
#[derive(Debug, Clone)]
pub struct HeatCoefficients {
    pub n: usize,
    /// `a_0, …, a_n`.
    pub coeffs: Vec<f64>,
    pub condition: f64,
    pub max_rel_residual: f64,
}

/// Default fitting grid for [`fit_heat_coefficients`]: 12 points, log-spaced
/// over `s ∈ [0.004, 0.04]` (small enough that the tip defect `e^{−κ/s}` is
/// far below the fit tolerances, large enough for the mode sum to be cheap).
pub fn default_heat_coefficient_grid() -> Vec<f64> {
    let (lo, hi, m) = (0.004f64, 0.04f64, 12usize);
    (0..m)
        .map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64))
        .collect()
}

/// Fit `a_0 … a_n` from mode-sum values of `G` on a small-`s` grid.
///
/// Uses the honest mode sum (never the Weyl asymptote — these coefficients
/// are what the asymptote would be made of).
pub fn fit_heat_coefficients(
    geom: &ConeGeometry,
    s_grid: &[f64],
    cfg: &ModeSumConfig,
) -> Result<HeatCoefficients> {
    let n = geom.dim();
    let ncols = n + 1;
    if s_grid.len() < ncols + 2 {
        return Err(Error::Domain {
            context: "fit_heat_coefficients",
            msg: format!(
                "need at least {} grid points for n = {n}, got {}",
                ncols + 2,
                s_grid.len()
            ),
        });
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Domain {
            context: "fit_heat_coefficients",
            msg: "grid times must be positive and finite".into(),
        });
    }
    let m = s_grid.len();
    let mut a = DMatrix::<f64>::zeros(m, ncols);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &s) in s_grid.iter().enumerate() {
        let g = cross_section_heat_trace(geom, s, cfg)?;
        let w = 1.0 / g.abs().max(f64::MIN_POSITIVE);
        for k in 0..=n {
            a[(i, k)] = s.powf(0.5 * (k as f64 - n as f64)) * w;
        }
        b[i] = g * w;
    }
    solve_weighted(a, b, "fit_heat_coefficients").map(|(x, condition, max_rel_residual)| {
        HeatCoefficients {
            n,
            coeffs: x.iter().copied().collect(),
            condition,
            max_rel_residual,
        }
    })
}

/// Divergent coefficients predicted from heat coefficients (and a cutoff's
/// moments), for comparison against a fitted sweep.
#[derive(Debug, Clone)]
pub struct DivergentPrediction {
    /// `(k − n, coefficient)`, ascending in `k`, for `k < n`.
    pub powers: Vec<(f64, f64)>,
    /// Coefficient of `log δ` (cutoff-independent).
    pub log_coeff: f64,
}

/// Map heat coefficients to the divergences of the `δ`-sweep at time `t`:
/// power terms `l_{n−k} · a_k t^{(k−n)/2}/(n−k)`, log term `−a_n`.
pub fn predicted_divergent_coefficients(
    coeffs: &HeatCoefficients,
    t: f64,
    cutoff: &Cutoff,
) -> Result<DivergentPrediction> {
    check_time(t)?;
    let n = coeffs.n;
    let mut powers = Vec::with_capacity(n);
    for k in 0..n {
        let a = k as f64 - n as f64;
        let l = cutoff_moment(cutoff, -a)?;
        powers.push((
            a,
            l * coeffs.coeffs[k] * t.powf(0.5 * a) / (n as f64 - k as f64),
        ));
    }
    Ok(DivergentPrediction {
        powers,
        log_coeff: -coeffs.coeffs[n],
    })
}

/// Profile moment `l = −∫ χ₁′(r) r^a dr`, computed through integration by
/// parts as `(1/2)^a + a ∫_{1/2}^2 χ₁ r^{a−1} dr` (no derivative of the
/// profile needed).  Sharp cutoffs give exactly 1 for every `a`.
pub fn cutoff_moment(cutoff: &Cutoff, a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::Domain {
            context: "cutoff_moment",
            msg: format!("exponent must be finite, got {a}"),
        });
    }
    match cutoff {
        Cutoff::Sharp => Ok(1.0),
        Cutoff::Smooth(_) => {
            let quad = QuadConfig {
                rel_tol: 1e-13,
                abs_tol: 1e-15,
                ..QuadConfig::default()
            };
            let integral =
                integrate(|r: f64| cutoff.chi1(r) * r.powf(a - 1.0), 0.5, 2.0, &quad)?.value;
            Ok(0.5f64.powf(a) + a * integral)
        }
    }
}

/// Log moment `l_log = −∫ χ₁′(r) ln r dr = −ln 2 + ∫_{1/2}^2 χ₁ r^{−1} dr`.
/// Sharp cutoffs (and log-symmetric profiles) give 0.
pub fn cutoff_log_moment(cutoff: &Cutoff) -> Result<f64> {
    match cutoff {
        Cutoff::Sharp => Ok(0.0),
        Cutoff::Smooth(_) => {
            let quad = QuadConfig {
                rel_tol: 1e-13,
                abs_tol: 1e-15,
                ..QuadConfig::default()
            };
            let integral = integrate(|r: f64| cutoff.chi1(r) / r, 0.5, 2.0, &quad)?.value;
            Ok(integral - std::f64::consts::LN_2)
        }
    }
}

/// Side-by-side sharp/smooth sweep fits with the moment-based relations
/// between them.
#[derive(Debug, Clone)]
pub struct CutoffComparison {
    pub sharp: DivergentExpansion,
    pub smooth: DivergentExpansion,
    /// `(k − n, l_{n−k})` — each power with the moment that scales it.
    pub power_moments: Vec<(f64, f64)>,
    pub log_moment: f64,
    /// Worst relative gap `|smooth_k − l_{n−k} · sharp_k|` across power terms.
    pub max_power_error: f64,
    /// `|smooth_log − sharp_log|` (the log coefficient is cutoff-invariant).
    pub log_gap: f64,
    /// `smooth FP − sharp FP`.
    pub fp_gap: f64,
    /// The predicted gap `−l_log · f_log` from the sharp fit.
    pub predicted_fp_gap: f64,
}

/// Run sharp and smooth sweeps on the same grid and compare their fitted
/// expansions through the profile moments.
pub fn compare_cutoffs(
    geom: &ConeGeometry,
    t: f64,
    deltas: &[f64],
    profile: SmoothProfile,
    cfg: &ModeSumConfig,
) -> Result<CutoffComparison> {
    let n = geom.dim();
    let smooth_cutoff = Cutoff::Smooth(profile);
    let sharp = fit_divergent_expansion(
        &trace_sweep(geom, t, &Cutoff::Sharp, deltas, cfg)?,
        n,
    )?;
    let smooth = fit_divergent_expansion(
        &trace_sweep(geom, t, &smooth_cutoff, deltas, cfg)?,
        n,
    )?;
    let mut power_moments = Vec::with_capacity(n);
    let mut max_power_error = 0.0f64;
    // Scale for "is this coefficient essentially zero": the largest fitted
    // power coefficient.
    let scale = sharp
        .powers
        .iter()
        .map(|&(_, c)| c.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    for (i, &(a, c_sharp)) in sharp.powers.iter().enumerate() {
        let l = cutoff_moment(&smooth_cutoff, -a)?;
        power_moments.push((a, l));
        let gap = (smooth.powers[i].1 - l * c_sharp).abs() / scale;
        max_power_error = max_power_error.max(gap);
    }
    let log_moment = cutoff_log_moment(&smooth_cutoff)?;
    Ok(CutoffComparison {
        log_gap: (smooth.log_coeff - sharp.log_coeff).abs(),
        fp_gap: smooth.finite_part - sharp.finite_part,
        predicted_fp_gap: -log_moment * sharp.log_coeff,
        sharp,
        smooth,
        power_moments,
        log_moment,
        max_power_error,
    })
}

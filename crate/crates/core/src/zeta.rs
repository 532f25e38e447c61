//! Renormalized zeta functions and determinants from trace models.
//!
//! A [`TraceModel`] describes a (renormalized) heat trace `T(t)` on `(0, ∞)`
//! through three pieces: a polyhomogeneous expansion valid as `t → 0`, one
//! valid as `t → ∞`, and (optionally) the trace itself for evaluating the
//! remainders numerically.  The zeta function is the Mellin transform
//!
//! ```text
//! ζ(s) Γ(s) = M(s) = ∫_0^∞ t^{s-1} T(t) dt,
//! ```
//!
//! continued meromorphically by splitting at `t = T₀` (the model's `split`)
//! and transforming each expansion term in closed form:
//!
//! ```text
//! ∫_0^{T₀} t^{w-1} log^p t dt = (d/dw)^p [T₀^w / w],
//! ∫_{T₀}^∞  t^{w-1} log^p t dt = −(d/dw)^p [T₀^w / w],     w = s + z.
//! ```
//!
//! Both sides are rational in `w` times `T₀^w`, meromorphic with a single
//! pole at `s = −z` of order `p + 1`; the leftover remainder integrals
//! converge in a strip of `s` determined by the expansions' remainder
//! orders.  Note the two closed forms differ only by sign: a term present
//! *in both expansions with the same coefficient* contributes nothing — the
//! renormalized zeta function of an exactly constant trace vanishes
//! identically.
//!
//! At `s = 0` the determinant data come out of exact Laurent algebra: with
//! `M(s) = Σ_k A_k s^k` and `1/Γ(s) = Σ_{m≥1} c_m s^m`
//! ([`RECIP_GAMMA_SERIES`]),
//!
//! ```text
//! Res_{s=0} ζ = Σ_m c_m A_{-1-m},    ζ(0) = Σ_m c_m A_{-m},
//! ζ'(0) = Σ_m c_m A_{1-m},           log det = −ζ'(0),
//! ```
//!
//! where only the `z = 0` expansion terms feed the singular `A_{k<0}` and
//! the numeric remainders enter `A_0` as plain integrals of `rem(t)/t`.

use num_complex::Complex64;

use crate::cone::ModeSumConfig;
use crate::cross_section::ConeGeometry;
use crate::error::{Error, Result};
use crate::renorm::{renormalized_trace, solve_weighted, Cutoff};
use crate::special::gamma::{gamma, RECIP_GAMMA_SERIES};
use crate::special::quad::{integrate, QuadConfig};

/// One polyhomogeneous term `coeff · t^power · log^{log_power} t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhgTerm {
    pub power: f64,
    pub log_power: usize,
    pub coeff: f64,
}

/// A one-sided polyhomogeneous expansion with a remainder bound.
///
/// For a short-time expansion the remainder is `O(t^{remainder_order})` as
/// `t → 0` (`remainder_order` strictly above every term power, `+∞` for
/// faster-than-any-power); for a long-time expansion it is
/// `O(t^{remainder_order})` as `t → ∞` (strictly below every term power,
/// `−∞` for exponential decay).
#[derive(Debug, Clone)]
pub struct PhgExpansion {
    pub terms: Vec<PhgTerm>,
    pub remainder_order: f64,
}

/// Highest log power the determinant algebra supports (bounded by the
/// available `1/Γ` Taylor coefficients).
pub const MAX_LOG_POWER: usize = 9;

impl PhgExpansion {
    pub fn new(mut terms: Vec<PhgTerm>, remainder_order: f64) -> Result<Self> {
        for term in &mut terms {
            if !term.power.is_finite() || !term.coeff.is_finite() {
                return Err(Error::Domain {
                    context: "PhgExpansion",
                    msg: format!("non-finite term ({}, {})", term.power, term.coeff),
                });
            }
            if term.log_power > MAX_LOG_POWER {
                return Err(Error::Domain {
                    context: "PhgExpansion",
                    msg: format!("log power {} exceeds {MAX_LOG_POWER}", term.log_power),
                });
            }
            // Snap essentially-integer powers so pole bookkeeping is exact.
            if (term.power - term.power.round()).abs() < 1e-12 {
                term.power = term.power.round();
            }
        }
        if remainder_order.is_nan() {
            return Err(Error::Domain {
                context: "PhgExpansion",
                msg: "remainder order must not be NaN".into(),
            });
        }
        Ok(PhgExpansion {
            terms,
            remainder_order,
        })
    }

    pub fn empty(remainder_order: f64) -> Self {
        PhgExpansion {
            terms: Vec::new(),
            remainder_order,
        }
    }

    /// Evaluate `Σ coeff · t^power · log^p t`.
    pub fn eval(&self, t: f64) -> f64 {
        let lt = t.ln();
        self.terms
            .iter()
            .map(|term| term.coeff * t.powf(term.power) * lt.powi(term.log_power as i32))
            .sum()
    }
}

type TraceFn = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A trace on `(0, ∞)` presented through its two asymptotic expansions and,
/// optionally, numeric evaluators for the remainders.
///
/// Without evaluators the expansions are taken as exact (remainders `≡ 0`)
/// — appropriate when they are closed forms, as for the built-in cones whose
/// renormalized trace is a verified constant.
pub struct TraceModel {
    short: PhgExpansion,
    long: PhgExpansion,
    split: f64,
    short_rem: Option<TraceFn>,
    long_rem: Option<TraceFn>,
}

impl std::fmt::Debug for TraceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TraceModel")
            .field("short", &self.short)
            .field("long", &self.long)
            .field("split", &self.split)
            .field("has_numeric_remainder", &self.short_rem.is_some())
            .finish()
    }
}

fn validate_remainder_orders(short: &PhgExpansion, long: &PhgExpansion) -> Result<()> {
    let max_short = short
        .terms
        .iter()
        .map(|t| t.power)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(short.remainder_order > max_short && short.remainder_order > 0.0) {
        return Err(Error::Domain {
            context: "TraceModel",
            msg: format!(
                "short remainder order {} must exceed every short power and 0",
                short.remainder_order
            ),
        });
    }
    let min_long = long
        .terms
        .iter()
        .map(|t| t.power)
        .fold(f64::INFINITY, f64::min);
    if !(long.remainder_order < min_long && long.remainder_order < 0.0) {
        return Err(Error::Domain {
            context: "TraceModel",
            msg: format!(
                "long remainder order {} must lie below every long power and 0",
                long.remainder_order
            ),
        });
    }
    Ok(())
}

impl TraceModel {
    /// Model whose remainders are evaluated as `trace(t) − expansion(t)`.
    ///
    /// Mind the cancellation: once the remainder falls below the trace's own
    /// rounding noise (`~1e-16` relatively) the subtraction yields noise, so
    /// this constructor suits tolerances down to `~1e-8`.  When a
    /// cancellation-free form of the remainder is available, prefer
    /// [`TraceModel::with_remainders`].
    pub fn new(
        short: PhgExpansion,
        long: PhgExpansion,
        split: f64,
        trace: Option<TraceFn>,
    ) -> Result<Self> {
        match trace {
            None => TraceModel::from_expansions(short, long, split),
            Some(f) => {
                let f = std::sync::Arc::new(f);
                let (fs, fl) = (f.clone(), f);
                let short_eval = short.clone();
                let long_eval = long.clone();
                TraceModel::with_remainders(
                    short,
                    long,
                    split,
                    Box::new(move |t| Ok(fs(t)? - short_eval.eval(t))),
                    Box::new(move |t| Ok(fl(t)? - long_eval.eval(t))),
                )
            }
        }
    }

    /// Model with explicitly supplied remainder evaluators
    /// (`rem(t) = T(t) − expansion(t)` on each side).
    pub fn with_remainders(
        short: PhgExpansion,
        long: PhgExpansion,
        split: f64,
        short_rem: TraceFn,
        long_rem: TraceFn,
    ) -> Result<Self> {
        if !(split > 0.0 && split.is_finite()) {
            return Err(Error::Domain {
                context: "TraceModel",
                msg: format!("split time must be positive and finite, got {split}"),
            });
        }
        validate_remainder_orders(&short, &long)?;
        Ok(TraceModel {
            short,
            long,
            split,
            short_rem: Some(short_rem),
            long_rem: Some(long_rem),
        })
    }

    /// Model with exact expansions and no numeric remainder.
    pub fn from_expansions(short: PhgExpansion, long: PhgExpansion, split: f64) -> Result<Self> {
        if !(split > 0.0 && split.is_finite()) {
            return Err(Error::Domain {
                context: "TraceModel",
                msg: format!("split time must be positive and finite, got {split}"),
            });
        }
        Ok(TraceModel {
            short,
            long,
            split,
            short_rem: None,
            long_rem: None,
        })
    }

    pub fn short_expansion(&self) -> &PhgExpansion {
        &self.short
    }

    pub fn long_expansion(&self) -> &PhgExpansion {
        &self.long
    }

    pub fn split(&self) -> f64 {
        self.split
    }
}

/// `e^{−x} − Σ_{k=0}^{K} (−x)^k/k!` without cancellation: the Taylor *tail*
/// is summed directly when `x` is small, where forming the difference of
/// two ~1 numbers would lose everything.
fn exp_taylor_tail(x: f64, order: usize) -> f64 {
    if x > 4.0 {
        let mut partial = 0.0f64;
        let mut term = 1.0f64;
        for k in 0..=order {
            if k > 0 {
                term *= -x / k as f64;
            }
            partial += term;
        }
        return (-x).exp() - partial;
    }
    let mut term = 1.0f64;
    for k in 1..=order + 1 {
        term *= -x / k as f64;
    }
    let mut sum = 0.0f64;
    let mut k = order + 1;
    while term.abs() > 1e-25 * sum.abs().max(f64::MIN_POSITIVE) && k < order + 200 {
        sum += term;
        k += 1;
        term *= -x / k as f64;
    }
    sum
}

/// Trace model of a finite positive spectrum: `T(t) = Σ_j e^{−λ_j t}`, with
/// the short-time Taylor polynomial to the given order as expansion and
/// exponential decay at infinity.  The short-time remainder is evaluated as
/// a sum of Taylor tails, which stays fully accurate all the way down the
/// continuation strip.
pub fn trace_model_from_eigenvalues(
    eigenvalues: &[f64],
    taylor_order: usize,
    split: f64,
) -> Result<TraceModel> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidSpectrum(
            "trace model needs at least one eigenvalue".into(),
        ));
    }
    if eigenvalues.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidSpectrum(
            "trace-model eigenvalues must be positive and finite".into(),
        ));
    }
    if !(1..=MAX_LOG_POWER).contains(&taylor_order) {
        return Err(Error::Domain {
            context: "trace_model_from_eigenvalues",
            msg: format!("taylor order must be in 1..={MAX_LOG_POWER}, got {taylor_order}"),
        });
    }
    let mut terms = Vec::with_capacity(taylor_order + 1);
    let mut factorial = 1.0f64;
    for k in 0..=taylor_order {
        if k > 0 {
            factorial *= k as f64;
        }
        let moment: f64 = eigenvalues.iter().map(|&l| l.powi(k as i32)).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(PhgTerm {
            power: k as f64,
            log_power: 0,
            coeff: sign * moment / factorial,
        });
    }
    let short = PhgExpansion::new(terms, (taylor_order + 1) as f64)?;
    let long = PhgExpansion::empty(f64::NEG_INFINITY);
    let short_lambdas = eigenvalues.to_vec();
    let long_lambdas = eigenvalues.to_vec();
    TraceModel::with_remainders(
        short,
        long,
        split,
        Box::new(move |t: f64| {
            Ok(short_lambdas
                .iter()
                .map(|&l| exp_taylor_tail(l * t, taylor_order))
                .sum())
        }),
        Box::new(move |t: f64| Ok(long_lambdas.iter().map(|&l| (-l * t).exp()).sum())),
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `∫_0^1 t^{s+z-1} log^p t dt = (−1)^p p! / (s+z)^{p+1}` — the split-at-one
/// Mellin transform of a single short-time term.
pub fn mellin_term(z: f64, p: usize, s: Complex64) -> Complex64 {
    let w = s + z;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    sign * factorial(p) / w.powu(p as u32 + 1)
}

/// `(d/dw)^p [T^w / w]` for complex `w`: the short-side transform
/// `∫_0^T t^{w-1} log^p t dt`.
fn mellin_short_c(w: Complex64, p: usize, t_split: f64) -> Complex64 {
    let lt = t_split.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=p {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += binomial(p, j) * lt.powi((p - j) as i32) * sign * factorial(j)
            / w.powu(j as u32 + 1);
    }
    (w * lt).exp() * sum
}

fn mellin_short_r(w: f64, p: usize, t_split: f64) -> f64 {
    let lt = t_split.ln();
    let mut sum = 0.0;
    for j in 0..=p {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += binomial(p, j) * lt.powi((p - j) as i32) * sign * factorial(j) / w.powi(j as i32 + 1);
    }
    t_split.powf(w) * sum
}

/// Truncation depth (in `ln t`) for a remainder integrand decaying like
/// `e^{rate·|u|}`: enough e-folds to put the skipped piece below `1e-16`
/// of the kept one.
fn remainder_efolds(rate: f64) -> f64 {
    38.0 / rate.clamp(0.05, 38.0)
}

fn remainder_quad() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-11,
        abs_tol: 5e-14,
        ..QuadConfig::default()
    }
}

fn integrate_fallible_c(
    mut f: impl FnMut(f64) -> Result<Complex64>,
    lo: f64,
    hi: f64,
    quad: &QuadConfig,
) -> Result<Complex64> {
    let mut first_err: Option<Error> = None;
    let res = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                first_err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
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

/// `∫_0^T rem_short(t) t^{s-1} dt` over `u = ln t`, truncated by the
/// integrand's decay rate `remainder_order + Re s`.
fn short_remainder_integral(model: &TraceModel, s: Complex64) -> Result<Complex64> {
    let Some(rem) = &model.short_rem else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let r = model.short.remainder_order;
    if !(s.re > -r + 0.05) {
        return Err(Error::Domain {
            context: "zeta continuation",
            msg: format!(
                "Re s = {} is outside the continuation strip Re s > {} set by the \
                 short-time remainder order",
                s.re,
                -r + 0.05
            ),
        });
    }
    let u_hi = model.split.ln();
    let u_lo = u_hi - remainder_efolds(r + s.re);
    integrate_fallible_c(
        |u| Ok(rem(u.exp())? * (s * u).exp()),
        u_lo,
        u_hi,
        &remainder_quad(),
    )
}

/// `∫_T^∞ rem_long(t) t^{s-1} dt` over `u = ln t`.  Power-law remainders get
/// a rate-based truncation like the short side; exponential remainders
/// (`remainder_order = −∞`) are integrated panel by panel until they stop
/// contributing.
fn long_remainder_integral(model: &TraceModel, s: Complex64) -> Result<Complex64> {
    let Some(rem) = &model.long_rem else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let r = model.long.remainder_order;
    let quad = remainder_quad();
    let u_lo = model.split.ln();
    if r.is_finite() {
        let rate = -r - s.re;
        if !(rate > 0.05) {
            return Err(Error::Domain {
                context: "zeta continuation",
                msg: format!(
                    "Re s = {} is outside the continuation strip Re s < {} set by the \
                     long-time remainder order",
                    s.re,
                    -r - 0.05
                ),
            });
        }
        let u_hi = u_lo + remainder_efolds(rate);
        return integrate_fallible_c(
            |u| Ok(rem(u.exp())? * (s * u).exp()),
            u_lo,
            u_hi,
            &quad,
        );
    }
    // Exponentially small remainder: widen in fixed panels until two in a
    // row are negligible.
    const PANEL: f64 = 6.0;
    const MAX_PANELS: usize = 40;
    let mut total = Complex64::new(0.0, 0.0);
    let mut quiet = 0usize;
    for i in 0..MAX_PANELS {
        let a = u_lo + PANEL * i as f64;
        let piece = integrate_fallible_c(
            |u| Ok(rem(u.exp())? * (s * u).exp()),
            a,
            a + PANEL,
            &quad,
        )?;
        total += piece;
        if piece.norm() <= 1e-17 * (1.0 + total.norm()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NotConverged {
        context: "zeta long-time remainder",
        terms: MAX_PANELS,
        last_term: total.norm(),
        target: 1e-17 * (1.0 + total.norm()),
    })
}

/// Distinct term powers with the maximal log power attached to each
/// (pole locations `s = −z` of the Mellin transform and their orders).
fn pole_inventory(model: &TraceModel) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for term in model.short.terms.iter().chain(model.long.terms.iter()) {
        match out.iter_mut().find(|(z, _)| (*z - term.power).abs() < 1e-9) {
            Some((_, p)) => *p = (*p).max(term.log_power),
            None => out.push((term.power, term.log_power)),
        }
    }
    out
}

/// Evaluate the renormalized zeta function at a complex point.
///
/// Points within `1e-8` of a genuine pole of `ζ` return [`Error::ZetaPole`];
/// points that close to a pole of `M` that the `1/Γ(s)` zero cancels (a
/// simple pole at a nonpositive integer `s = −m`) are evaluated by the exact
/// limit `ζ(−m) = (−1)^m m! (Σ_{short, z=m} a − Σ_{long, z=m} a)`.
pub fn zeta_from_trace_model(model: &TraceModel, s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain {
            context: "zeta_from_trace_model",
            msg: format!("s must be finite, got {s}"),
        });
    }
    for (z, max_p) in pole_inventory(model) {
        if (s + z).norm() >= 1e-8 {
            continue;
        }
        let mellin_order = 1 + max_p;
        let cancellable = z >= -1e-9 && (z - z.round()).abs() < 1e-9;
        let zeta_order = mellin_order - usize::from(cancellable);
        if zeta_order >= 1 {
            return Err(Error::ZetaPole {
                location: -z,
                order: zeta_order,
            });
        }
        // Simple Mellin pole against the simple zero of 1/Γ: every other
        // contribution carries the factor 1/Γ(−m) = 0.
        let m = z.round() as usize;
        let short_sum: f64 = model
            .short
            .terms
            .iter()
            .filter(|t| (t.power - z).abs() < 1e-9)
            .map(|t| t.coeff)
            .sum();
        let long_sum: f64 = model
            .long
            .terms
            .iter()
            .filter(|t| (t.power - z).abs() < 1e-9)
            .map(|t| t.coeff)
            .sum();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(Complex64::new(
            sign * factorial(m) * (short_sum - long_sum),
            0.0,
        ));
    }
    let recip_gamma = match gamma(s) {
        Ok(g) => 1.0 / g,
        // At a Γ pole with M regular, ζ vanishes.
        Err(Error::Pole { .. }) => return Ok(Complex64::new(0.0, 0.0)),
        Err(e) => return Err(e),
    };
    let mut mellin = Complex64::new(0.0, 0.0);
    for term in &model.short.terms {
        mellin += term.coeff * mellin_short_c(s + term.power, term.log_power, model.split);
    }
    for term in &model.long.terms {
        mellin -= term.coeff * mellin_short_c(s + term.power, term.log_power, model.split);
    }
    mellin += short_remainder_integral(model, s)?;
    mellin += long_remainder_integral(model, s)?;
    Ok(recip_gamma * mellin)
}

/// The determinant-bearing Laurent data of `ζ` at `s = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZetaAtZero {
    /// Residue of `ζ` at 0 (nonzero only when log terms sit at `z = 0`).
    pub residue: f64,
    /// `ζ(0)` (the finite part when the residue vanishes).
    pub value: f64,
    /// `ζ'(0)`.
    pub derivative: f64,
}

/// Exact Laurent expansion of `ζ` at `s = 0` (see the module docs).
pub fn zeta_laurent_at_zero(model: &TraceModel) -> Result<ZetaAtZero> {
    let max_p = model
        .short
        .terms
        .iter()
        .chain(model.long.terms.iter())
        .filter(|t| t.power == 0.0)
        .map(|t| t.log_power)
        .max()
        .unwrap_or(0);
    // Laurent coefficients A_k of M(s), k = -(max_p + 2) ..= 0.
    let depth = max_p + 2;
    let mut a = vec![0.0f64; depth + 1]; // a[i] = A_{i - depth}
    let lt = model.split.ln();

    // Laurent series of T^s/s: F_{-1} = 1, F_m = (ln T)^{m+1}/(m+1)!.
    let coeff_f = |m: i64| -> f64 {
        if m < -1 {
            0.0
        } else {
            lt.powi((m + 1) as i32) / factorial((m + 1) as usize)
        }
    };
    // Falling factorial m(m-1)…(m-p+1), sign-correct for negative m.
    let fall = |m: i64, p: usize| -> f64 { (0..p).fold(1.0, |acc, i| acc * (m - i as i64) as f64) };

    for (sign, expansion) in [(1.0, &model.short), (-1.0, &model.long)] {
        for term in &expansion.terms {
            if term.power == 0.0 {
                let p = term.log_power;
                for i in 0..=depth {
                    let k = i as i64 - depth as i64;
                    a[i] += sign * term.coeff * fall(k + p as i64, p) * coeff_f(k + p as i64);
                }
            } else {
                a[depth] +=
                    sign * term.coeff * mellin_short_r(term.power, term.log_power, model.split);
            }
        }
    }
    let s0 = Complex64::new(0.0, 0.0);
    a[depth] += short_remainder_integral(model, s0)?.re;
    a[depth] += long_remainder_integral(model, s0)?.re;

    // Multiply by 1/Γ(s) = Σ c_m s^m and read off s^{-1}, s^0, s^1.
    let c = &RECIP_GAMMA_SERIES; // c[j] = c_{j+1}
    let coeff_of = |order: i64| -> f64 {
        let mut sum = 0.0;
        for (j, &cm) in c.iter().enumerate() {
            let m = j as i64 + 1;
            let k = order - m;
            if (-(depth as i64)..=0).contains(&k) {
                sum += cm * a[(k + depth as i64) as usize];
            }
        }
        sum
    };
    Ok(ZetaAtZero {
        residue: coeff_of(-1),
        value: coeff_of(0),
        derivative: coeff_of(1),
    })
}

/// `−ζ'(0)`, the log of the renormalized determinant.
///
/// Fails with [`Error::UndefinedDeterminant`] when `ζ` has a pole at 0
/// (residue beyond `1e-8`), in which case `ζ'(0)` is not defined.
pub fn log_renormalized_det(model: &TraceModel) -> Result<f64> {
    let at_zero = zeta_laurent_at_zero(model)?;
    if at_zero.residue.abs() > 1e-8 {
        return Err(Error::UndefinedDeterminant {
            residue: at_zero.residue,
        });
    }
    Ok(-at_zero.derivative)
}

/// A cone trace model together with the fit diagnostics that justify it.
#[derive(Debug)]
pub struct ConeTraceModel {
    pub model: TraceModel,
    /// `|short(T₀) − long(T₀)|` — the two fitted expansions must splice.
    pub splice_gap: f64,
    /// Worst absolute fit residual on the short-time grid.
    pub short_fit_residual: f64,
    /// Worst absolute fit residual on the long-time grid.
    pub long_fit_residual: f64,
}

/// Fit a [`TraceModel`] to a cone's renormalized heat trace.
///
/// The short side is fitted against half-integer powers
/// `t^{(k−n)/2}, k = 0..=n`, the long side against integer powers of `1/t`
/// — with a `(log t)/t` slot in two dimensions, where the resolvent's
/// logarithmic low-energy behavior can feed one.  For the built-in cones
/// the renormalized trace is constant in `t`, so everything but the `t^0`
/// coefficients comes out at the noise level; the returned residuals and
/// splice gap let the caller confirm that before trusting determinants.
pub fn build_trace_model_from_cone(
    geom: &ConeGeometry,
    cutoff: &Cutoff,
    cfg: &ModeSumConfig,
) -> Result<ConeTraceModel> {
    use nalgebra::{DMatrix, DVector};

    let n = geom.dim();
    let split = 1.0f64;
    let grid = |lo: f64, hi: f64, m: usize| -> Vec<f64> {
        (0..m)
            .map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64))
            .collect()
    };

    let short_grid = grid(0.05, 0.8, 8);
    let long_grid = grid(1.25, 20.0, 8);
    let short_vals: Vec<f64> = short_grid
        .iter()
        .map(|&t| renormalized_trace(geom, t, cutoff, cfg))
        .collect::<Result<_>>()?;
    let long_vals: Vec<f64> = long_grid
        .iter()
        .map(|&t| renormalized_trace(geom, t, cutoff, cfg))
        .collect::<Result<_>>()?;

    // Short side: powers (k − n)/2.
    let short_powers: Vec<(f64, usize)> =
        (0..=n).map(|k| ((k as f64 - n as f64) / 2.0, 0)).collect();
    // Long side: 1, 1/t (+ log t/t slot in 2-d), 1/t².
    let mut long_powers: Vec<(f64, usize)> = vec![(0.0, 0), (-1.0, 0)];
    if n == 2 {
        long_powers.push((-1.0, 1));
    }
    long_powers.push((-2.0, 0));

    let fit = |grid: &[f64],
               vals: &[f64],
               powers: &[(f64, usize)],
               context: &'static str|
     -> Result<(Vec<PhgTerm>, f64)> {
        let m = grid.len();
        let mut mat = DMatrix::<f64>::zeros(m, powers.len());
        let mut rhs = DVector::<f64>::zeros(m);
        for (i, (&t, &v)) in grid.iter().zip(vals.iter()).enumerate() {
            for (j, &(z, p)) in powers.iter().enumerate() {
                mat[(i, j)] = t.powf(z) * t.ln().powi(p as i32);
            }
            rhs[i] = v;
        }
        let (x, _cond, resid) = solve_weighted(mat, rhs, context)?;
        let terms = powers
            .iter()
            .zip(x.iter())
            .map(|(&(power, log_power), &coeff)| PhgTerm {
                power,
                log_power,
                coeff,
            })
            .collect();
        Ok((terms, resid))
    };

    let (short_terms, short_fit_residual) = fit(
        &short_grid,
        &short_vals,
        &short_powers,
        "cone trace model (short)",
    )?;
    let (long_terms, long_fit_residual) = fit(
        &long_grid,
        &long_vals,
        &long_powers,
        "cone trace model (long)",
    )?;

    let short = PhgExpansion::new(short_terms, f64::INFINITY)?;
    let long = PhgExpansion::new(long_terms, f64::NEG_INFINITY)?;
    let splice_gap = (short.eval(split) - long.eval(split)).abs();
    let model = TraceModel::from_expansions(short, long, split)?;
    Ok(ConeTraceModel {
        model,
        splice_gap,
        short_fit_residual,
        long_fit_residual,
    })
}

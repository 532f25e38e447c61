//! Heat kernels and resolvents on an exact cone, evaluated pointwise.
//!
//! Separation of variables turns both kernels into Bessel mode sums over the
//! cross-section spectrum.  With `x = r r′ / 2t` and `ν_j` the indicial
//! roots,
//!
//! ```text
//! H(t, p, p′)  = (r r′)^{−(n−2)/2} (2t)^{−1} e^{−(r−r′)²/4t}
//!                · Σ_j Π_j(y, y′) e^{−x} I_{ν_j}(x),
//!
//! R(k, p, p′)  = (r r′)^{−(n−2)/2}
//!                · Σ_j Π_j(y, y′) I_{ν_j}(k r_<) K_{ν_j}(k r_>),
//! ```
//!
//! where `R(k) = (Δ + k²)^{−1}` with `Re k > 0` and `r_< ≤ r_>` orders the
//! radii.  Every Bessel factor is evaluated in scaled form, so the products
//! above never overflow: the heat sum uses `e^{−x} I_ν(x) ≤ 1` directly, and
//! the resolvent term is assembled as
//! `[e^{−kr_<} I_ν(k r_<)] · [e^{kr_>} K_ν(k r_>)] · e^{k(r_< − r_>)}`, whose
//! damping factor has nonpositive real exponent.
//!
//! The heat kernel is also reconstructed from the resolvent through the
//! Laplace inversion contour
//!
//! ```text
//! H(t) = (1/2πi) ∮_Γ e^{λt} R(√λ) dλ,
//! ```
//!
//! with `Γ` a keyhole-style contour: an arc `|λ| = a` spanning
//! `arg λ ∈ [−φ, φ]` joined to two rays `arg λ = ±φ` with `φ ∈ (π/2, π)`,
//! traversed counterclockwise (in along the lower ray, around the arc, out
//! along the upper ray).  Since `Re(λt) = tρ cos φ → −∞` along the rays, the
//! integrand decays and the truncated contour converges; the contour opens
//! rightward around the spectrum of `Δ` (which lies on `[0, ∞)`), so it
//! captures the full heat semigroup.  The result is complex only through
//! quadrature error; its imaginary part is reported as a self-check.
//!
//! Closed Euclidean forms (`C(S¹_{2π}) = R²`, `C(S²) = R³`) serve as exact
//! oracles in the tests, together with the semigroup identity, conformal
//! scaling, and a finite-difference check that the resolvent satisfies its
//! PDE.

use num_complex::Complex64;

use crate::cross_section::ConeGeometry;
use crate::error::{Error, Result};
use crate::special::bessel::{
    bessel_ik_product, ln_bessel_k, scaled_bessel_i, BesselConfig,
};
use crate::special::quad::{fixed_panels, QuadOutput};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A point `(r, y)` on the cone: radial coordinate `r > 0` and a
/// cross-section position `y` (see [`crate::cross_section`] for what a
/// position coordinate means on each cross-section).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub r: f64,
    pub y: f64,
}

impl ConePoint {
    pub fn new(r: f64, y: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) || !y.is_finite() {
            return Err(Error::Domain {
                context: "ConePoint",
                msg: format!("need finite r > 0 and finite y, got r = {r}, y = {y}"),
            });
        }
        Ok(Self { r, y })
    }
}

/// Tolerances and budget for the Bessel mode sums.
#[derive(Debug, Clone)]
pub struct ModeSumConfig {
    /// Target for the estimated tail, relative to the positive majorant
    /// `Σ_j (m_j/V) |radial_j|` of the sum accumulated so far.
    pub rel_tol: f64,
    /// Hard cap on the number of modes consumed before giving up.
    pub max_modes: usize,
    /// Bessel evaluation settings.
    pub bessel: BesselConfig,
}

impl Default for ModeSumConfig {
    fn default() -> Self {
        ModeSumConfig {
            rel_tol: 1e-13,
            max_modes: 100_000,
            bessel: BesselConfig::default(),
        }
    }
}

/// Consecutive tail ratios must sit below this before the geometric tail
/// estimate is trusted.
const TAIL_RATIO_CAP: f64 = 0.95;
/// How many consecutive below-cap ratios are required.
const TAIL_RUN: usize = 3;

/// Shared mode-sum driver: `Σ_j Π_j(y, y′) · radial(ν_j)` with a geometric
/// tail estimate.
///
/// Convergence is declared once [`TAIL_RUN`] consecutive term-bound ratios
/// stay below [`TAIL_RATIO_CAP`] and the implied geometric tail drops below
/// `rel_tol` times the accumulated majorant `Σ (m_j/V)|radial_j|` (the
/// scale of the sum before angular cancellation).  Exhausting the spectrum
/// first is an error: the caller's eigenvalue cutoff was too small for the
/// requested arguments.
fn mode_sum<T: QuadOutput>(
    geom: &ConeGeometry,
    y: f64,
    yp: f64,
    cfg: &ModeSumConfig,
    context: &'static str,
    mut radial: impl FnMut(f64) -> Result<T>,
) -> Result<T> {
    let volume = geom.cross_section_volume();
    let entries = geom.spectrum().entries();

    let mut sum = T::zero();
    let mut majorant = 0.0f64;
    let mut prev_bound = f64::NAN;
    let mut ratios = [f64::NAN; TAIL_RUN];
    let mut run = 0usize;
    let mut last_bound = 0.0f64;

    for (j, &(lambda, mult)) in entries.iter().enumerate() {
        if j >= cfg.max_modes {
            return Err(Error::NotConverged {
                context,
                terms: j,
                last_term: last_bound,
                target: cfg.rel_tol * majorant,
            });
        }
        let nu = geom.indicial_root(lambda);
        let rad = radial(nu)?;
        if !rad.norm().is_finite() {
            return Err(Error::Domain {
                context,
                msg: format!("mode term at ν = {nu} is not finite"),
            });
        }
        let pi_j = geom.mode_kernel(j, y, yp)?;
        sum = sum.add(rad.scale(pi_j));

        let bound = rad.norm() * (mult / volume);
        majorant += bound;
        if j > 0 {
            let ratio = if prev_bound > 0.0 {
                bound / prev_bound
            } else {
                0.0
            };
            if ratio <= TAIL_RATIO_CAP {
                ratios[run % TAIL_RUN] = ratio;
                run += 1;
            } else {
                run = 0;
            }
            if run >= TAIL_RUN {
                let q = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
                let tail = bound * q / (1.0 - q);
                if tail <= cfg.rel_tol * majorant.max(f64::MIN_POSITIVE) {
                    return Ok(sum);
                }
            }
        }
        prev_bound = bound;
        last_bound = bound;
    }

    Err(Error::NotConverged {
        context,
        terms: entries.len(),
        last_term: last_bound,
        target: cfg.rel_tol * majorant,
    })
}

/// Heat kernel `H(t, p, p′)` on the cone, by direct mode sum.
///
/// Needs a pointwise mode kernel, so file-backed spectra are rejected with
/// [`Error::NoModeKernel`].  A [`Error::NotConverged`] means the spectrum
/// cutoff is too small for these arguments: the sum turns over at indicial
/// root `ν ≈ x = r r′/2t`, so the cutoff must comfortably exceed
/// `x²` (plus an `O(x^{1/3})`-wide shoulder in `ν`).
pub fn heat_kernel_cone(
    geom: &ConeGeometry,
    t: f64,
    p: ConePoint,
    pp: ConePoint,
    cfg: &ModeSumConfig,
) -> Result<f64> {
    check_time(t)?;
    check_point(p)?;
    check_point(pp)?;
    let n = geom.dim() as f64;
    let x = p.r * pp.r / (2.0 * t);
    let ln_pref = -0.5 * (n - 2.0) * (p.r * pp.r).ln()
        - (2.0 * t).ln()
        - (p.r - pp.r).powi(2) / (4.0 * t);
    let sum = mode_sum(geom, p.y, pp.y, cfg, "heat kernel mode sum", |nu| {
        scaled_bessel_i(nu, x, &cfg.bessel)
    })?;
    Ok(ln_pref.exp() * sum)
}

/// Resolvent kernel `R(k; p, p′) = (Δ + k²)^{−1}(p, p′)` with `Re k > 0`,
/// by direct mode sum.
///
/// The mode sum converges geometrically in `(r_</r_>)^{ν_j}`, so it
/// degenerates on the diagonal: exact coincidence is rejected with
/// [`Error::DiagonalSingularity`], and `r = r′` with `y ≠ y′` (no radial
/// decay, only angular oscillation) ends in [`Error::NotConverged`] once the
/// spectrum is exhausted.  Keep the radii separated.
pub fn resolvent_cone(
    geom: &ConeGeometry,
    k: Complex64,
    p: ConePoint,
    pp: ConePoint,
    cfg: &ModeSumConfig,
) -> Result<Complex64> {
    check_point(p)?;
    check_point(pp)?;
    if !(k.re > 0.0 && k.is_finite()) {
        return Err(Error::Domain {
            context: "resolvent_cone",
            msg: format!("need finite k with Re k > 0, got {k}"),
        });
    }
    let sep = geom.separation(p.y, pp.y)?;
    if (p.r - pp.r).abs() <= 1e-14 * p.r.max(pp.r) && sep <= 1e-14 {
        return Err(Error::DiagonalSingularity(format!(
            "resolvent requested at coincident points r = {}, y = {}",
            p.r, p.y
        )));
    }
    let (rl, rg) = if p.r <= pp.r { (p.r, pp.r) } else { (pp.r, p.r) };
    let n = geom.dim() as f64;
    let pref = (p.r * pp.r).powf(-0.5 * (n - 2.0));
    // The joint I·K evaluation keeps each mode bounded (≤ 1/2ν at equal
    // radii) even where the separate factors leave f64 range.
    let sum = mode_sum(geom, p.y, pp.y, cfg, "resolvent mode sum", |nu| {
        bessel_ik_product(nu, k * rl, k * rg, &cfg.bessel)
    })?;
    Ok(sum * pref)
}

/// Geodesic distance on the cone between `p = (r, y)` and `p′ = (r′, y′)`.
///
/// Unrolling the cone, the connecting geodesic avoids the tip iff the
/// cross-section separation `d_N(y, y′)` is below `π`; then the flat law of
/// cosines applies.  Otherwise the geodesic passes through the tip and the
/// distance is `r + r′`.
pub fn cone_distance(geom: &ConeGeometry, p: ConePoint, pp: ConePoint) -> Result<f64> {
    check_point(p)?;
    check_point(pp)?;
    let sep = geom.separation(p.y, pp.y)?;
    if sep < std::f64::consts::PI {
        Ok((p.r * p.r + pp.r * pp.r - 2.0 * p.r * pp.r * sep.cos()).sqrt())
    } else {
        Ok(p.r + pp.r)
    }
}

/// Euclidean heat kernel `(4πt)^{−n/2} e^{−d²/4t}` on `R^n`.
pub fn euclidean_heat(n: usize, t: f64, dist: f64) -> Result<f64> {
    check_time(t)?;
    if n == 0 || !dist.is_finite() || dist < 0.0 {
        return Err(Error::Domain {
            context: "euclidean_heat",
            msg: format!("need n ≥ 1 and finite d ≥ 0, got n = {n}, d = {dist}"),
        });
    }
    let n = n as f64;
    Ok((-0.5 * n * (4.0 * std::f64::consts::PI * t).ln() - dist * dist / (4.0 * t)).exp())
}

/// Euclidean resolvent kernel `(Δ + k²)^{−1}` on `R²`:
/// `(1/2π) K₀(k d)` for `k, d > 0`.
///
/// (Equivalently `(i/4) H₀^{(1)}(i k d)` in Helmholtz conventions; the `K₀`
/// form is manifestly positive and decaying for our spectral parameter
/// `Re k > 0`, and it satisfies `(Δ + k²) R = 0` off the diagonal — the PDE
/// residual test pins this convention.)
pub fn euclidean_resolvent_2d(k: f64, dist: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) || !(dist > 0.0 && dist.is_finite()) {
        return Err(Error::Domain {
            context: "euclidean_resolvent_2d",
            msg: format!("need finite k > 0 and d > 0, got k = {k}, d = {dist}"),
        });
    }
    let cfg = BesselConfig::default();
    // exp of a large-negative log underflows gracefully to 0.
    Ok((ln_bessel_k(0.0, k * dist, &cfg)? - (2.0 * std::f64::consts::PI).ln()).exp())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain {
            context: "cone kernel",
            msg: format!("time must be positive and finite, got {t}"),
        });
    }
    Ok(())
}

fn check_point(p: ConePoint) -> Result<()> {
    ConePoint::new(p.r, p.y).map(|_| ())
}

/// The Laplace-inversion contour `Γ`: an arc `|λ| = arc_radius` spanning
/// `arg λ ∈ [−φ, φ]`, joined to two rays `arg λ = ±φ` truncated at
/// `|λ| = rho_max`, traversed counterclockwise.
///
/// `φ ∈ (π/2, π)` makes `e^{λt}` decay along the rays.  The square root maps
/// the contour into `|arg k| ≤ φ/2`, which must stay inside the Bessel
/// engine's sector (`≤ 1.35`), so in practice `φ ≤ 2.7`.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    /// Ray opening angle `φ`.
    pub phi: f64,
    /// Radius `a` of the arc around the origin.
    pub arc_radius: f64,
    /// Truncation radius of the rays.
    pub rho_max: f64,
    /// Number of G7/K15 panels on the arc.
    pub arc_panels: usize,
    /// Number of G7/K15 panels on each ray (geometrically graded toward the
    /// arc, where the integrand is largest).
    pub ray_panels: usize,
}

impl ContourSpec {
    /// A contour adapted to time `t`: `a = 1/t` (so `|e^{λt}| ≤ e` on the
    /// arc), `φ = 2π/3`, and rays truncated where the damping
    /// `e^{tρ cos φ}` is below 1e−17.
    pub fn for_time(t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(ContourSpec {
            phi: 2.0 * std::f64::consts::FRAC_PI_3,
            arc_radius: 1.0 / t,
            rho_max: 80.0 / t,
            arc_panels: 8,
            ray_panels: 24,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > std::f64::consts::FRAC_PI_2 && self.phi < std::f64::consts::PI) {
            return Err(Error::NonDecayingRay(format!(
                "opening angle φ = {} must lie in (π/2, π) for e^{{λt}} to decay along the rays",
                self.phi
            )));
        }
        if self.phi > 2.7 {
            return Err(Error::Domain {
                context: "ContourSpec",
                msg: format!(
                    "φ = {} puts √λ outside the Bessel sector (need φ/2 ≤ 1.35)",
                    self.phi
                ),
            });
        }
        if !(self.arc_radius > 0.0 && self.arc_radius.is_finite())
            || !(self.rho_max > self.arc_radius && self.rho_max.is_finite())
        {
            return Err(Error::Domain {
                context: "ContourSpec",
                msg: format!(
                    "need 0 < arc_radius < rho_max, got {} and {}",
                    self.arc_radius, self.rho_max
                ),
            });
        }
        if self.arc_panels == 0 || self.ray_panels == 0 {
            return Err(Error::Domain {
                context: "ContourSpec",
                msg: "panel counts must be positive".into(),
            });
        }
        Ok(())
    }
}

/// `(1/2πi) ∮_Γ e^{λt} f(λ) dλ` over the contour `spec`, for any integrand.
///
/// Exposed separately from the heat-kernel reconstruction so that the
/// contour's orientation and normalization can be validated on scalar
/// functions with known transforms (a simple pole at `λ = −E` inside `Γ`
/// must produce `e^{−Et}`).
pub fn contour_laplace_inverse(
    spec: &ContourSpec,
    t: f64,
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    spec.validate()?;
    check_time(t)?;

    // Propagate the first integrand failure out of the quadrature closures.
    let mut first_err: Option<Error> = None;
    let guard = |v: Result<Complex64>, err: &mut Option<Error>| match v {
        Ok(x) => x,
        Err(e) => {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };

    // Rays: λ = ρ e^{±iφ}, ρ ∈ [a, rho_max], geometric edges toward the arc.
    let mut ray_edges = Vec::with_capacity(spec.ray_panels + 1);
    let ratio = spec.rho_max / spec.arc_radius;
    for i in 0..=spec.ray_panels {
        ray_edges.push(spec.arc_radius * ratio.powf(i as f64 / spec.ray_panels as f64));
    }
    let e_up = Complex64::from_polar(1.0, spec.phi);
    let e_dn = e_up.conj();

    let upper = fixed_panels(
        |rho| {
            let lam = rho * e_up;
            guard(f(lam).map(|v| (lam * t).exp() * v), &mut first_err)
        },
        &ray_edges,
    )?
    .value;
    if let Some(e) = first_err.take() {
        return Err(e);
    }
    let lower = fixed_panels(
        |rho| {
            let lam = rho * e_dn;
            guard(f(lam).map(|v| (lam * t).exp() * v), &mut first_err)
        },
        &ray_edges,
    )?
    .value;
    if let Some(e) = first_err.take() {
        return Err(e);
    }

    // Arc: λ = a e^{iθ}, θ ∈ [−φ, φ], dλ = i a e^{iθ} dθ.
    let mut arc_edges = Vec::with_capacity(spec.arc_panels + 1);
    for i in 0..=spec.arc_panels {
        arc_edges.push(-spec.phi + 2.0 * spec.phi * i as f64 / spec.arc_panels as f64);
    }
    let a = spec.arc_radius;
    let arc = fixed_panels(
        |theta| {
            let lam = Complex64::from_polar(a, theta);
            guard(
                f(lam).map(|v| (lam * t).exp() * v * Complex64::new(0.0, 1.0) * lam),
                &mut first_err,
            )
        },
        &arc_edges,
    )?
    .value;
    if let Some(e) = first_err {
        return Err(e);
    }

    // Counterclockwise: in along the lower ray (decreasing ρ), around the
    // arc, out along the upper ray (increasing ρ).
    let total = upper * e_up - lower * e_dn + arc;
    Ok(total / Complex64::new(0.0, 2.0 * std::f64::consts::PI))
}

/// Heat kernel via Laplace inversion of the resolvent:
/// `(1/2πi) ∮_Γ e^{λt} R(√λ; p, p′) dλ` with the principal `√λ`.
///
/// Agrees with [`heat_kernel_cone`] up to quadrature error; the imaginary
/// part of the returned value is a numerical self-check (the exact integral
/// is real) and is left to the caller to inspect.
pub fn heat_from_resolvent_contour(
    geom: &ConeGeometry,
    t: f64,
    p: ConePoint,
    pp: ConePoint,
    spec: &ContourSpec,
    cfg: &ModeSumConfig,
) -> Result<Complex64> {
    contour_laplace_inverse(spec, t, |lam| resolvent_cone(geom, lam.sqrt(), p, pp, cfg))
}

/// A fitted Gaussian upper bound `H(t, p, p′) ≤ C₁ t^{−n/2} e^{−d²/C₂ t}`.
#[derive(Debug, Clone)]
pub struct GaussianBound {
    pub c1: f64,
    pub c2: f64,
    /// Indices of samples violating the fitted bound (empty when the fit
    /// certifies the bound on the given samples).
    pub violations: Vec<usize>,
}

/// Fit Gaussian bound constants on a sample set.
///
/// For each candidate `C₂`, the smallest admissible `C₁` is
/// `max_i H_i t_i^{n/2} e^{d_i²/C₂ t_i}`; the fit keeps the smallest
/// candidate attaining (within rounding slack) the smallest such `C₁`.  On
/// `R²` the heat kernel saturates `C₁ = 1/4π, C₂ = 4` exactly, which pins
/// both conventions.  `violations` rechecks every sample against the chosen
/// constants with a `1 + 1e−10` slack.
pub fn gaussian_bound_fit(
    geom: &ConeGeometry,
    samples: &[(f64, ConePoint, ConePoint)],
    c2_candidates: &[f64],
    cfg: &ModeSumConfig,
) -> Result<GaussianBound> {
    if samples.is_empty() || c2_candidates.is_empty() {
        return Err(Error::Domain {
            context: "gaussian_bound_fit",
            msg: "need at least one sample and one C₂ candidate".into(),
        });
    }
    if c2_candidates.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::Domain {
            context: "gaussian_bound_fit",
            msg: "C₂ candidates must be positive and finite".into(),
        });
    }
    let n = geom.dim() as f64;
    let mut lnh_and_shape = Vec::with_capacity(samples.len());
    for &(t, p, pp) in samples {
        let h = heat_kernel_cone(geom, t, p, pp, cfg)?;
        let d = cone_distance(geom, p, pp)?;
        // ln H + (n/2) ln t; −inf for an underflowed kernel is harmless in
        // the running max below.
        lnh_and_shape.push((h.ln() + 0.5 * n * t.ln(), d * d / t));
    }

    let ln_c1_for = |c2: f64| {
        lnh_and_shape
            .iter()
            .map(|&(ln_ht, q)| ln_ht + q / c2)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = f64::INFINITY;
    for &c2 in c2_candidates {
        best = best.min(ln_c1_for(c2));
    }
    // Smallest C₂ attaining the minimum (up to rounding slack): candidates
    // larger than the sharp constant all coast on the same d = 0 samples.
    let mut chosen = None;
    let mut order: Vec<f64> = c2_candidates.to_vec();
    order.sort_by(|a, b| a.partial_cmp(b).expect("finite candidates"));
    for c2 in order {
        if ln_c1_for(c2) <= best + 1e-9 {
            chosen = Some(c2);
            break;
        }
    }
    let c2 = chosen.expect("a minimizer exists");
    let ln_c1 = ln_c1_for(c2);

    let violations = lnh_and_shape
        .iter()
        .enumerate()
        .filter(|(_, &(ln_ht, q))| ln_ht + q / c2 > ln_c1 + 1e-10)
        .map(|(i, _)| i)
        .collect();
    Ok(GaussianBound {
        c1: ln_c1.exp(),
        c2,
        violations,
    })
}

/// Report from [`verify_bf0_zf_matching`].
#[derive(Debug, Clone)]
pub struct MatchingReport {
    /// Worst relative deviation between the resolvent and the small-k model
    /// over the `(κ, σ′)` grid.
    pub max_rel_residual: f64,
    /// Worst relative error of the fitted `ln κ` coefficient against `−1/V`.
    pub max_log_coeff_error: f64,
    /// Number of grid points compared.
    pub samples: usize,
}

/// Check the small-`k` structure of the `n = 2` resolvent against its
/// leading model.
///
/// With `r_> = 1` and `r_< = σ′ < 1` fixed, as `κ → 0`,
///
/// ```text
/// R(κ; (σ′, y), (1, y′))  →  V^{−1}(−ln κ + ln 2 − γ)
///                             + Σ_{j≥1} Π_j(y, y′) σ′^{ν_j} / (2ν_j)
///                             + O(κ² ln κ),
/// ```
///
/// the zero mode contributing the logarithm (`I₀(κσ′)K₀(κ) ∼ −ln κ + ln 2 −
/// γ`) and each higher mode its `k`-independent limit `(σ′)^ν/(2ν)`.  The
/// report carries the worst relative residual on the grid and a two-point
/// finite-difference check that `∂R/∂ln κ = −1/V`.
pub fn verify_bf0_zf_matching(
    geom: &ConeGeometry,
    kappas: &[f64],
    sigmas: &[f64],
    y: f64,
    yp: f64,
    cfg: &ModeSumConfig,
) -> Result<MatchingReport> {
    if geom.dim() != 2 {
        return Err(Error::Domain {
            context: "verify_bf0_zf_matching",
            msg: format!("small-k model implemented for n = 2 only, got n = {}", geom.dim()),
        });
    }
    if kappas.len() < 2 || kappas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain {
            context: "verify_bf0_zf_matching",
            msg: "need at least two ascending κ values".into(),
        });
    }
    if sigmas.is_empty() || sigmas.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::Domain {
            context: "verify_bf0_zf_matching",
            msg: "need σ′ values inside (0, 1)".into(),
        });
    }
    let v = geom.cross_section_volume();
    let mut max_rel_residual = 0.0f64;
    let mut max_log_coeff_error = 0.0f64;
    let mut samples = 0usize;

    for &sigma in sigmas {
        // Mode tail of the model: Σ_{j≥1} Π_j σ^{ν_j}/(2ν_j), geometric in σ^ν.
        let entries = geom.spectrum().entries();
        let mut tail = 0.0;
        let mut converged = false;
        for (j, &(lambda, mult)) in entries.iter().enumerate().skip(1) {
            let nu = geom.indicial_root(lambda);
            let term_bound = (mult / v) * sigma.powf(nu) / (2.0 * nu);
            tail += geom.mode_kernel(j, y, yp)? * sigma.powf(nu) / (2.0 * nu);
            // The model is only good to O(κ² ln κ) anyway; 1e−14 of its
            // scale is far below anything the residual check can see.
            if term_bound < 1e-14 * tail.abs().max(1.0 / v) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged {
                context: "bf0/zf matching model tail",
                terms: entries.len(),
                last_term: sigma,
                target: 1e-16,
            });
        }

        let mut q_first = 0.0;
        let mut q_last = 0.0;
        for (i, &kappa) in kappas.iter().enumerate() {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(Error::Domain {
                    context: "verify_bf0_zf_matching",
                    msg: format!("κ values must be positive and finite, got {kappa}"),
                });
            }
            let q = resolvent_cone(
                geom,
                Complex64::new(kappa, 0.0),
                ConePoint { r: sigma, y },
                ConePoint { r: 1.0, y: yp },
                cfg,
            )?
            .re;
            let model = (-kappa.ln() + std::f64::consts::LN_2 - EULER_GAMMA) / v + tail;
            max_rel_residual = max_rel_residual.max((q - model).abs() / model.abs());
            samples += 1;
            if i == 0 {
                q_first = q;
            }
            if i == kappas.len() - 1 {
                q_last = q;
            }
        }
        let slope = (q_last - q_first) / (kappas[kappas.len() - 1] / kappas[0]).ln();
        max_log_coeff_error = max_log_coeff_error.max((slope * v + 1.0).abs());
    }

    Ok(MatchingReport {
        max_rel_residual,
        max_log_coeff_error,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::{parse_spectrum, sphere_volume};
    use crate::special::quad::{integrate, QuadConfig};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn flat_plane(cutoff: f64) -> ConeGeometry {
        ConeGeometry::over_circle(2.0 * PI, cutoff).unwrap()
    }

    fn flat_cone(cutoff: f64) -> ConeGeometry {
        ConeGeometry::over_circle(1.5 * PI, cutoff).unwrap()
    }

    fn pt(r: f64, y: f64) -> ConePoint {
        ConePoint::new(r, y).unwrap()
    }

    #[test]
    fn euclidean_heat_closed_form() {
        assert_relative_eq!(
            euclidean_heat(2, 0.25, 0.0).unwrap(),
            1.0 / PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            euclidean_heat(3, 1.0, 2.0).unwrap(),
            (4.0 * PI).powf(-1.5) * (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert!(euclidean_heat(0, 1.0, 1.0).is_err());
        assert!(euclidean_heat(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn mode_sum_reproduces_plane_heat_kernel() {
        // C(S¹_{2π}) = R², so the mode sum must match the Gaussian through
        // the law of cosines.  This exercises prefactor, kernels, and the
        // stopping rule at once.
        let geom = flat_plane(4000.0);
        let cfg = ModeSumConfig::default();
        for &t in &[0.3, 0.5, 1.0, 4.0] {
            for &(r, rp) in &[(0.5, 0.5), (1.0, 1.0), (0.4, 2.0), (0.75, 1.3)] {
                for &dy in &[0.0, 0.6, 1.2, 2.0, PI] {
                    let p = pt(r, 0.2);
                    let pp = pt(rp, 0.2 + dy);
                    let h = heat_kernel_cone(&geom, t, p, pp, &cfg).unwrap();
                    let d = cone_distance(&geom, p, pp).unwrap();
                    let exact = euclidean_heat(2, t, d).unwrap();
                    assert_relative_eq!(h, exact, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn mode_sum_reproduces_space_heat_kernel() {
        // C(S²) = R³ validates the sphere zonal kernels and multiplicities:
        // Σ_k (2k+1) P_k(cos γ) I_{k+1/2} collapses to the Gaussian.
        let geom = ConeGeometry::over_sphere(2, 3000.0).unwrap();
        let cfg = ModeSumConfig::default();
        for &t in &[0.4, 1.0] {
            for &(r, rp, gap) in &[
                (1.0, 1.0, 0.0),
                (0.7, 1.2, 0.9),
                (0.5, 0.5, PI),
                (1.3, 0.8, 2.2),
            ] {
                let p = pt(r, 0.15);
                let pp = pt(rp, 0.15 + gap);
                let h = heat_kernel_cone(&geom, t, p, pp, &cfg).unwrap();
                let d = cone_distance(&geom, p, pp).unwrap();
                let exact = euclidean_heat(3, t, d).unwrap();
                assert_relative_eq!(h, exact, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn heat_kernel_scales_conformally() {
        // H(c²t, c·p, c·p′) = c^{−n} H(t, p, p′) on any cone.
        let cfg = ModeSumConfig::default();
        for length in [PI, 1.5 * PI, 2.0 * PI, 3.0 * PI] {
            let geom = ConeGeometry::over_circle(length, 4000.0).unwrap();
            for &c in &[0.5, 1.7, 3.0] {
                for &(t, r, rp, y, yp) in
                    &[(0.4, 1.0, 1.0, 0.3, 0.3), (0.8, 0.6, 1.1, 0.0, 1.2)]
                {
                    let h = heat_kernel_cone(&geom, t, pt(r, y), pt(rp, yp), &cfg).unwrap();
                    let hs = heat_kernel_cone(
                        &geom,
                        c * c * t,
                        pt(c * r, y),
                        pt(c * rp, yp),
                        &cfg,
                    )
                    .unwrap();
                    assert_relative_eq!(
                        hs,
                        c.powi(-2) * h,
                        max_relative = 1e-10
                    );
                }
            }
        }
        // And with the n = 3 exponent on the sphere cone.
        let geom = ConeGeometry::over_sphere(2, 3000.0).unwrap();
        let h = heat_kernel_cone(&geom, 0.5, pt(1.0, 0.1), pt(0.8, 0.9), &cfg).unwrap();
        let hs = heat_kernel_cone(&geom, 0.5 * 4.0, pt(2.0, 0.1), pt(1.6, 0.9), &cfg).unwrap();
        assert_relative_eq!(hs, h / 8.0, max_relative = 1e-10);
    }

    #[test]
    fn heat_kernel_is_symmetric_and_positive() {
        let geom = flat_cone(4000.0);
        let cfg = ModeSumConfig::default();
        for &(t, r, rp, y, yp) in &[
            (0.3, 0.5, 1.4, 0.0, 2.0),
            (1.0, 1.0, 1.0, 0.3, 3.9),
            (2.5, 2.0, 0.3, 1.0, 1.0),
        ] {
            let a = heat_kernel_cone(&geom, t, pt(r, y), pt(rp, yp), &cfg).unwrap();
            let b = heat_kernel_cone(&geom, t, pt(rp, yp), pt(r, y), &cfg).unwrap();
            assert!(a > 0.0);
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn long_time_diagonal_limit_sees_only_the_zero_mode() {
        // t·H(t, p, p) → 1/(2L) on a flat cone: the zero mode carries
        // Π₀ = 1/L and every ν > 0 mode dies with x = r²/2t → 0.
        let length = 1.5 * PI;
        let geom = flat_cone(100.0);
        let cfg = ModeSumConfig::default();
        let h = heat_kernel_cone(&geom, 1.0e6, pt(1.0, 0.7), pt(1.0, 0.7), &cfg).unwrap();
        assert_relative_eq!(1.0e6 * h, 1.0 / (2.0 * length), max_relative = 1e-5);
    }

    #[test]
    fn short_time_ratio_to_free_kernel_tends_to_one() {
        // H/H_free → 1 as t → 0.  Points near the tip make the defect (the
        // wave diffracted by the tip, ~e^{−((r+r′)²−d²)/4t} relatively)
        // visible at the large t and negligible at the smallest, so the test
        // sees a genuine decay rather than comparing rounding noise.
        let geom = flat_cone(6000.0);
        let cfg = ModeSumConfig::default();
        let p = pt(0.35, 0.4);
        let pp = pt(0.35, 0.8);
        let d = cone_distance(&geom, p, pp).unwrap();
        let mut gaps = Vec::new();
        for &t in &[0.04, 0.02, 0.01] {
            let h = heat_kernel_cone(&geom, t, p, pp, &cfg).unwrap();
            let free = euclidean_heat(2, t, d).unwrap();
            gaps.push((h / free - 1.0).abs());
        }
        assert!(
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            "gaps should decrease: {gaps:?}"
        );
        assert!(gaps[0] > 1e-4, "test should bite at the largest t: {gaps:?}");
        assert!(gaps[2] < 1e-3, "gap at t = 0.01: {gaps:?}");
    }

    #[test]
    fn semigroup_property_by_quadrature() {
        // ∫ H(t₁, p, q) H(t₂, q, p′) dq = H(t₁ + t₂, p, p′) over the cone,
        // dq = ρ dρ dy.  Radial truncation at ρ = 5 is ~e^{−24} relative.
        let length = 1.5 * PI;
        let geom = flat_cone(3000.0);
        let cfg = ModeSumConfig::default();
        let (t1, t2) = (0.15, 0.15);
        let p = pt(0.8, 0.2);
        let pp = pt(1.2, 1.0);

        let outer = QuadConfig {
            rel_tol: 1e-7,
            ..QuadConfig::default()
        };
        let inner = QuadConfig {
            rel_tol: 1e-8,
            ..QuadConfig::default()
        };
        let lhs = integrate(
            |rho: f64| {
                let row = integrate(
                    |y: f64| {
                        let q = pt(rho, y);
                        heat_kernel_cone(&geom, t1, p, q, &cfg).unwrap()
                            * heat_kernel_cone(&geom, t2, q, pp, &cfg).unwrap()
                    },
                    0.0,
                    length,
                    &inner,
                )
                .unwrap();
                rho * row.value
            },
            1e-3,
            5.0,
            &outer,
        )
        .unwrap()
        .value;
        let rhs = heat_kernel_cone(&geom, t1 + t2, p, pp, &cfg).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-5);
    }

    #[test]
    fn resolvent_matches_plane_bessel_kernel() {
        // On R² the resolvent is (1/2π) K₀(k d); the mode sum over circle
        // modes reproduces it through Graf's addition theorem.
        let geom = flat_plane(4000.0);
        let cfg = ModeSumConfig::default();
        for &k in &[0.8, 2.0] {
            for &(r, rp, dy) in &[
                (0.5, 1.0, 0.0),
                (0.5, 1.0, 2.0),
                (1.3, 0.4, 1.1),
                (2.0, 0.9, PI),
            ] {
                let p = pt(r, 0.1);
                let pp = pt(rp, 0.1 + dy);
                let got = resolvent_cone(&geom, Complex64::new(k, 0.0), p, pp, &cfg).unwrap();
                let d = cone_distance(&geom, p, pp).unwrap();
                let exact = euclidean_resolvent_2d(k, d).unwrap();
                assert_relative_eq!(got.re, exact, max_relative = 1e-8);
                assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-18);
            }
        }
    }

    #[test]
    fn resolvent_is_symmetric_and_conjugate_symmetric() {
        let geom = flat_cone(2000.0);
        let cfg = ModeSumConfig::default();
        let k = Complex64::new(1.1, 0.6);
        let p = pt(0.7, 0.3);
        let pp = pt(1.4, 2.1);
        let a = resolvent_cone(&geom, k, p, pp, &cfg).unwrap();
        let b = resolvent_cone(&geom, k, pp, p, &cfg).unwrap();
        let c = resolvent_cone(&geom, k.conj(), p, pp, &cfg).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        assert_relative_eq!(a.im, b.im, max_relative = 1e-12);
        assert_relative_eq!(a.re, c.re, max_relative = 1e-12);
        assert_relative_eq!(a.im, -c.im, max_relative = 1e-12);
    }

    #[test]
    fn resolvent_satisfies_its_pde_off_diagonal() {
        // (Δ + k²) R = 0 away from p′, with Δ = −∂_rr − (1/r)∂_r − r^{−2}∂_yy
        // on an n = 2 cone, checked by central differences.
        let geom = flat_cone(6000.0);
        let cfg = ModeSumConfig::default();
        let k = Complex64::new(1.3, 0.55);
        let pp = pt(1.6, 2.4);
        let (r0, y0) = (0.9, 0.5);
        let h = 1e-3;
        let eval = |r: f64, y: f64| resolvent_cone(&geom, k, pt(r, y), pp, &cfg).unwrap();

        let c = eval(r0, y0);
        let d_rr = (eval(r0 + h, y0) - 2.0 * c + eval(r0 - h, y0)) / (h * h);
        let d_r = (eval(r0 + h, y0) - eval(r0 - h, y0)) / (2.0 * h);
        let d_yy = (eval(r0, y0 + h) - 2.0 * c + eval(r0, y0 - h)) / (h * h);
        let residual = -d_rr - d_r / r0 - d_yy / (r0 * r0) + k * k * c;
        let scale = (k * k * c).norm();
        assert!(
            residual.norm() < 1e-4 * scale,
            "PDE residual {} vs scale {scale}",
            residual.norm()
        );
    }

    #[test]
    fn resolvent_rejects_diagonal_and_stalls_on_equal_radii() {
        let geom = flat_cone(500.0);
        let cfg = ModeSumConfig::default();
        let k = Complex64::new(1.0, 0.0);
        assert!(matches!(
            resolvent_cone(&geom, k, pt(1.0, 0.5), pt(1.0, 0.5), &cfg),
            Err(Error::DiagonalSingularity(_))
        ));
        // Equal radii kill the geometric decay; the sum must fail loudly
        // rather than return a truncation of an oscillating series.
        assert!(matches!(
            resolvent_cone(&geom, k, pt(1.0, 0.5), pt(1.0, 2.5), &cfg),
            Err(Error::NotConverged { .. })
        ));
        assert!(resolvent_cone(&geom, Complex64::new(-1.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0), &cfg).is_err());
    }

    #[test]
    fn contour_recovers_scalar_laplace_transforms() {
        // A pole at λ = −E inside Γ must invert to e^{−Et}: this pins the
        // orientation and the 1/2πi normalization independent of any
        // resolvent machinery.
        for &t in &[0.4, 1.0] {
            let spec = ContourSpec::for_time(t).unwrap();
            for &energy in &[0.0, 0.35, 2.0] {
                let got = contour_laplace_inverse(&spec, t, |lam| {
                    Ok(1.0 / (lam + energy))
                })
                .unwrap();
                assert_relative_eq!(got.re, (-energy * t).exp(), max_relative = 1e-9);
                assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn contour_heat_kernel_matches_mode_sum() {
        let geom = flat_cone(6000.0);
        let cfg = ModeSumConfig::default();
        for &t in &[0.3, 1.0] {
            let spec = ContourSpec::for_time(t).unwrap();
            for &(r, rp, y, yp) in &[(0.8, 1.25, 0.3, 2.0), (0.5, 1.6, 1.0, 1.0)] {
                let p = pt(r, y);
                let pp = pt(rp, yp);
                let via_contour =
                    heat_from_resolvent_contour(&geom, t, p, pp, &spec, &cfg).unwrap();
                let direct = heat_kernel_cone(&geom, t, p, pp, &cfg).unwrap();
                assert_relative_eq!(via_contour.re, direct, max_relative = 1e-7);
                assert!(via_contour.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn contour_inversion_survives_deep_spectra() {
        // Regression: at λ-cutoff 2e4 the mode ladder reaches ν ≈ 141, where
        // the scaled I and K factors separately leave f64 range even though
        // their product is tiny.  Evaluated per factor this made contour
        // nodes NaN; the joint product keeps the inversion at full accuracy.
        let geom = flat_cone(2e4);
        let cfg = ModeSumConfig::default();
        let t = 0.25;
        let p = pt(1.0, 0.0);
        let pp = pt(0.8, 0.9);
        let spec = ContourSpec::for_time(t).unwrap();
        let via_contour = heat_from_resolvent_contour(&geom, t, p, pp, &spec, &cfg).unwrap();
        let direct = heat_kernel_cone(&geom, t, p, pp, &cfg).unwrap();
        assert_relative_eq!(via_contour.re, direct, max_relative = 1e-7);
        assert!(via_contour.im.abs() < 1e-9);
    }

    #[test]
    fn contour_spec_validation() {
        let good = ContourSpec::for_time(0.5).unwrap();
        assert!(good.validate().is_ok());

        let mut bad = good;
        bad.phi = 1.2; // < π/2: no decay along the rays.
        assert!(matches!(bad.validate(), Err(Error::NonDecayingRay(_))));

        let mut bad = good;
        bad.phi = 2.9; // √λ would leave the Bessel sector.
        assert!(bad.validate().is_err());

        let mut bad = good;
        bad.rho_max = bad.arc_radius / 2.0;
        assert!(bad.validate().is_err());

        let mut bad = good;
        bad.ray_panels = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gaussian_bound_is_sharp_on_the_plane() {
        let geom = flat_plane(4000.0);
        let cfg = ModeSumConfig::default();
        let mut samples = Vec::new();
        for &t in &[0.4, 1.0, 2.5] {
            for &(r, rp, dy) in &[(1.0, 1.0, 0.0), (0.6, 1.3, 1.1), (0.9, 1.8, PI)] {
                samples.push((t, pt(r, 0.2), pt(rp, 0.2 + dy)));
            }
        }
        let candidates = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let bound = gaussian_bound_fit(&geom, &samples, &candidates, &cfg).unwrap();
        assert_eq!(bound.c2, 4.0);
        assert_relative_eq!(bound.c1, 0.25 / PI, max_relative = 1e-6);
        assert!(bound.violations.is_empty());
    }

    #[test]
    fn gaussian_bound_certifies_a_singular_cone() {
        let geom = flat_cone(4000.0);
        let cfg = ModeSumConfig::default();
        let mut samples = Vec::new();
        for &t in &[0.3, 1.0, 3.0] {
            for &(r, rp, dy) in &[(1.0, 1.0, 0.0), (0.5, 1.5, 2.0), (0.8, 1.1, 2.3)] {
                samples.push((t, pt(r, 0.1), pt(rp, 0.1 + dy)));
            }
        }
        let bound =
            gaussian_bound_fit(&geom, &samples, &[3.0, 4.0, 5.0, 6.0], &cfg).unwrap();
        assert!(bound.c1.is_finite() && bound.c1 > 0.0);
        assert!(bound.violations.is_empty());
    }

    #[test]
    fn small_k_matching_holds_on_flat_cones() {
        let cfg = ModeSumConfig::default();
        for &length in &[2.0 * PI, 1.5 * PI] {
            let geom = ConeGeometry::over_circle(length, 4000.0).unwrap();
            let report = verify_bf0_zf_matching(
                &geom,
                &[1e-4, 2e-4, 4e-4],
                &[0.3, 0.5],
                0.2,
                1.1,
                &cfg,
            )
            .unwrap();
            assert!(
                report.max_rel_residual < 1e-2,
                "residual {} on L = {length}",
                report.max_rel_residual
            );
            assert!(
                report.max_log_coeff_error < 1e-4,
                "log coefficient error {}",
                report.max_log_coeff_error
            );
            assert_eq!(report.samples, 6);
        }
    }

    #[test]
    fn matching_model_tail_has_a_closed_form_on_the_plane() {
        // On the 2π circle, Σ_{j≥1} (1/π) cos(jΔ) σ^j / (2j) =
        // −(1/4π) ln(1 − 2σ cos Δ + σ²): check the model side directly.
        let geom = flat_plane(2000.0);
        let cfg = ModeSumConfig::default();
        let (sigma, dy) = (0.5f64, 1.1f64);
        let kappa = 1e-5;
        let q = resolvent_cone(
            &geom,
            Complex64::new(kappa, 0.0),
            pt(sigma, 0.0),
            pt(1.0, dy),
            &cfg,
        )
        .unwrap()
        .re;
        let model = (-kappa.ln() + std::f64::consts::LN_2 - EULER_GAMMA) / (2.0 * PI)
            - (1.0 - 2.0 * sigma * dy.cos() + sigma * sigma).ln() / (4.0 * PI);
        assert_relative_eq!(q, model, max_relative = 1e-6);
    }

    #[test]
    fn cone_distance_folds_and_passes_through_tip() {
        // Flat plane: plain law of cosines.
        let geom = flat_plane(10.0);
        let d = cone_distance(&geom, pt(1.0, 0.0), pt(1.0, PI)).unwrap();
        assert_relative_eq!(d, 2.0, max_relative = 1e-15);

        // Long cone (L = 3π): separations beyond π go through the tip.
        let geom = ConeGeometry::over_circle(3.0 * PI, 10.0).unwrap();
        let d = cone_distance(&geom, pt(1.0, 0.0), pt(2.0, 1.2 * PI)).unwrap();
        assert_relative_eq!(d, 3.0, max_relative = 1e-15);
        // Just inside π: law of cosines, continuous with r + r′ at π.
        let d = cone_distance(&geom, pt(1.0, 0.0), pt(2.0, PI - 1e-8)).unwrap();
        assert_relative_eq!(d, 3.0, max_relative = 1e-8);

        let d = cone_distance(&geom, pt(1.5, 0.3), pt(1.5, 0.3)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn file_spectra_reject_pointwise_kernels() {
        let spectrum = parse_spectrum("0 1\n1 2\n4 2\n", "inline").unwrap();
        let geom = ConeGeometry::from_spectrum(2, spectrum, 2.0 * PI).unwrap();
        let cfg = ModeSumConfig::default();
        assert!(matches!(
            heat_kernel_cone(&geom, 1.0, pt(1.0, 0.0), pt(1.0, 1.0), &cfg),
            Err(Error::NoModeKernel(_))
        ));
    }

    #[test]
    fn undersized_cutoff_fails_loudly() {
        // x = r r′/2t ≈ 25 needs ν well past 25; a cutoff at Λ = 16 (ν ≤ 4)
        // cannot satisfy the tail criterion.
        let geom = flat_plane(16.0);
        let cfg = ModeSumConfig::default();
        assert!(matches!(
            heat_kernel_cone(&geom, 0.02, pt(1.0, 0.0), pt(1.0, 0.0), &cfg),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn euclidean_resolvent_small_argument_constant() {
        // (2π) R(k, d) + ln(kd) → ln 2 − γ as kd → 0.
        for &kd in &[1e-7, 1e-8] {
            let r = euclidean_resolvent_2d(kd, 1.0).unwrap();
            let constant = 2.0 * PI * r + kd.ln();
            assert_abs_diff_eq!(
                constant,
                std::f64::consts::LN_2 - EULER_GAMMA,
                epsilon = 1e-10
            );
        }
        assert!(euclidean_resolvent_2d(-1.0, 1.0).is_err());
        assert!(euclidean_resolvent_2d(1.0, 0.0).is_err());
    }

    #[test]
    fn sphere_cone_long_time_profile() {
        // On R³ (= C(S²)) the diagonal kernel is exactly (4πt)^{−3/2} at all
        // times; check at a long time where only a few modes survive.
        let geom = ConeGeometry::over_sphere(2, 200.0).unwrap();
        let cfg = ModeSumConfig::default();
        let h = heat_kernel_cone(&geom, 50.0, pt(1.0, 0.3), pt(1.0, 0.3), &cfg).unwrap();
        assert_relative_eq!(
            h,
            (4.0 * PI * 50.0).powf(-1.5),
            max_relative = 1e-10
        );
        let _ = sphere_volume(2);
    }
}

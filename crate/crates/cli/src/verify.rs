//! Named verification suites.
//!
//! Each suite runs a battery of cross-checks on the configured geometry and
//! prints one line per check; any failing check makes the run exit nonzero.
//! The same report is written to `verify_<suite>.txt` in the output
//! directory.
//!
//! * `orders` — fitted decay orders of the heat kernel along the diagonal,
//!   single-boundary, and corner approach paths, plus the zero-energy
//!   behavior of the resolvent (two- and three-dimensional cones).
//! * `contour` — heat kernel from the resolvent via a contour Laplace
//!   inversion against the direct mode sum.
//! * `cutoffs` — sharp vs smooth trace regularization: moment-scaled
//!   divergences, matching log coefficients, predicted finite-part shift.
//! * `bound` — Gaussian upper-bound fit with zero violations.
//! * `matching` — small-`k` resolvent matching on two-dimensional cones.
//! * `index` — leading orders of the low-energy resolvent and heat index
//!   tables against the composition calculus.

use std::fmt::Write as _;

use coneheat::asymptotics::{verify_heat_orders, verify_resolvent_orders, HeatRegime};
use coneheat::cone::{
    gaussian_bound_fit, heat_from_resolvent_contour, heat_kernel_cone, verify_bf0_zf_matching,
    ConePoint, ContourSpec,
};
use coneheat::index_set::{
    heat_family_from_resolvent, leading_order_table, low_energy_resolvent_family, Face,
    IndexFamily,
};
use coneheat::renorm::{compare_cutoffs, default_delta_grid, SmoothProfile};

use crate::commands::Ctx;
use crate::config::Failure;
use crate::output::{fmt_f64, write_text};
use crate::parallel::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Orders,
    Contour,
    Cutoffs,
    Bound,
    Matching,
    Index,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Orders => "orders",
            Suite::Contour => "contour",
            Suite::Cutoffs => "cutoffs",
            Suite::Bound => "bound",
            Suite::Matching => "matching",
            Suite::Index => "index",
        }
    }
}

/// One line of a suite report.
struct Check {
    name: String,
    detail: String,
    pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, detail: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), detail: detail.into(), pass }
    }
}

/// Run a suite, write its report, and fail the run if any check failed.
pub fn run_suite(ctx: &Ctx, suite: Suite) -> Result<(), Failure> {
    let (checks, notes) = match suite {
        Suite::Orders => orders_suite(ctx)?,
        Suite::Contour => contour_suite(ctx)?,
        Suite::Cutoffs => cutoffs_suite(ctx)?,
        Suite::Bound => bound_suite(ctx)?,
        Suite::Matching => matching_suite(ctx)?,
        Suite::Index => index_suite(ctx)?,
    };

    let mut body = String::new();
    let _ = writeln!(body, "suite: {}", suite.name());
    for check in &checks {
        let verdict = if check.pass { "pass" } else { "FAIL" };
        let _ = writeln!(body, "[{verdict}] {}: {}", check.name, check.detail);
    }
    for note in &notes {
        let _ = writeln!(body, "note: {note}");
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let _ = writeln!(body, "{} checks, {} failed", checks.len(), failed.len());

    print!("{body}");
    let path = ctx.out_dir.join(format!("verify_{}.txt", suite.name()));
    write_text(&path, &ctx.meta, &body)?;
    println!("wrote {}", path.display());

    if failed.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        Err(Failure::Run(format!(
            "verification suite `{}` failed: {}",
            suite.name(),
            names.join(", ")
        )))
    }
}

/// Heat-kernel decay orders plus the resolvent's zero-energy behavior.
fn orders_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let mut regimes = vec![HeatRegime::Zf, HeatRegime::Lb0, HeatRegime::Bf0];
    // The short-time fit probes t down to 1.6e−5 and needs the spectrum
    // resolved out to λ ≈ 40/t; skip it (with a note) on coarser spectra.
    if ctx.geom.spectrum().cutoff() >= 2.5e6 {
        regimes.push(HeatRegime::ShortTimeDiag);
    } else {
        notes.push(
            "short-time diagonal fit skipped: needs mode_cutoff ≥ 2.5e6".to_owned(),
        );
    }
    for regime in regimes {
        let report = verify_heat_orders(&ctx.geom, regime, &ctx.cfg)?;
        let fitted = if report.fit.log_power == 1 {
            format!("{:.4}·log", report.fit.exponent)
        } else {
            format!("{:.4}", report.fit.exponent)
        };
        checks.push(Check::new(
            format!("heat order [{}]", report.regime.label()),
            format!("expected {}, fitted {fitted}, r² = {:.6}", report.expected, report.fit.quality),
            report.pass && !report.exceeds,
        ));
    }

    let n = ctx.geom.dim();
    if n <= 3 {
        let p = ConePoint::new(0.8, 0.0).map_err(Failure::run)?;
        let pp = ConePoint::new(1.6, 1.0).map_err(Failure::run)?;
        let report = verify_resolvent_orders(&ctx.geom, p, pp, &ctx.cfg)?;
        let tol = if n == 2 { 1e-4 } else { 1e-6 };
        let gap = (report.log_coefficient - report.expected_log_coefficient).abs();
        checks.push(Check::new(
            "resolvent zero-energy log coefficient",
            format!(
                "expected {}, fitted {} (|gap| = {:.2e}, drift {:.2e})",
                fmt_f64(report.expected_log_coefficient),
                fmt_f64(report.log_coefficient),
                gap,
                report.drift
            ),
            gap <= tol,
        ));
        checks.push(Check::new(
            "resolvent zero-energy finite part",
            format!("{}", fmt_f64(report.finite_part)),
            report.finite_part.is_finite(),
        ));
    } else {
        notes.push(format!("resolvent zero-energy fit skipped: cone dimension {n} > 3"));
    }

    Ok((checks, notes))
}

/// Contour Laplace inversion of the resolvent against the direct heat sum.
fn contour_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let mut samples = Vec::new();
    for &t in &[0.25, 0.7, 1.9] {
        for &(r, rp) in &[(0.6, 0.85), (0.6, 1.4), (1.0, 1.35), (1.0, 0.8)] {
            for &dy in &[0.0, 0.9] {
                samples.push((t, r, rp, dy));
            }
        }
    }
    let results = par_map(&samples, ctx.threads, |&(t, r, rp, dy)| -> Result<(f64, f64), Failure> {
        let p = ConePoint::new(r, 0.0).map_err(Failure::run)?;
        let pp = ConePoint::new(rp, dy).map_err(Failure::run)?;
        let direct = heat_kernel_cone(&ctx.geom, t, p, pp, &ctx.cfg)?;
        let spec = ContourSpec::for_time(t).map_err(Failure::run)?;
        let contour = heat_from_resolvent_contour(&ctx.geom, t, p, pp, &spec, &ctx.cfg)?;
        Ok(((contour.re - direct).abs(), contour.im.abs()))
    });
    let mut max_diff = 0.0f64;
    let mut max_im = 0.0f64;
    for result in results {
        let (diff, im) = result?;
        max_diff = max_diff.max(diff);
        max_im = max_im.max(im);
    }
    let checks = vec![
        Check::new(
            "contour vs mode sum",
            format!("{} samples, max |Δ| = {:.3e} (tol 1e-6)", samples.len(), max_diff),
            max_diff < 1e-6,
        ),
        Check::new(
            "contour imaginary residue",
            format!("max |Im| = {:.3e} (tol 1e-9)", max_im),
            max_im < 1e-9,
        ),
    ];
    Ok((checks, Vec::new()))
}

/// Sharp vs smooth regularization through cutoff moments.
fn cutoffs_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let mut checks = Vec::new();
    for profile in [SmoothProfile::LogSymmetric, SmoothProfile::PlainStep] {
        let cmp = compare_cutoffs(&ctx.geom, 0.5, &default_delta_grid(), profile, &ctx.cfg)?;
        let label = match profile {
            SmoothProfile::LogSymmetric => "log-symmetric",
            SmoothProfile::PlainStep => "plain-step",
        };
        checks.push(Check::new(
            format!("divergent coefficients scale by moments [{label}]"),
            format!("max relative error {:.3e} (tol 1e-6)", cmp.max_power_error),
            cmp.max_power_error < 1e-6,
        ));
        checks.push(Check::new(
            format!("log coefficients agree [{label}]"),
            format!("gap {:.3e} (tol 1e-6)", cmp.log_gap),
            cmp.log_gap < 1e-6,
        ));
        let fp_error = (cmp.fp_gap - cmp.predicted_fp_gap).abs();
        checks.push(Check::new(
            format!("finite-part shift matches −l_log·f_log [{label}]"),
            format!(
                "measured {}, predicted {} (|Δ| = {:.3e}, tol 2e-6)",
                fmt_f64(cmp.fp_gap),
                fmt_f64(cmp.predicted_fp_gap),
                fp_error
            ),
            fp_error < 2e-6,
        ));
    }
    Ok((checks, Vec::new()))
}

/// Gaussian upper bound with fitted constants and no violations.
fn bound_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let mut samples = Vec::new();
    for &t in &[0.3, 1.0, 3.0] {
        for &(r, rp, dy) in &[(1.0, 1.0, 0.0), (0.5, 1.5, 2.0), (0.8, 1.1, 2.3)] {
            samples.push((
                t,
                ConePoint::new(r, 0.1).map_err(Failure::run)?,
                ConePoint::new(rp, 0.1 + dy).map_err(Failure::run)?,
            ));
        }
    }
    let bound = gaussian_bound_fit(&ctx.geom, &samples, &[3.0, 4.0, 5.0, 6.0], &ctx.cfg)?;
    let checks = vec![
        Check::new(
            "fitted constants are finite",
            format!("C1 = {}, C2 = {}", fmt_f64(bound.c1), fmt_f64(bound.c2)),
            bound.c1.is_finite() && bound.c1 > 0.0 && bound.c2.is_finite(),
        ),
        Check::new(
            "no sample violates the bound",
            format!("{} samples, {} violations", samples.len(), bound.violations.len()),
            bound.violations.is_empty(),
        ),
    ];
    Ok((checks, Vec::new()))
}

/// Small-`k` resolvent matching across the transition faces (n = 2 only).
fn matching_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    if ctx.geom.dim() != 2 {
        return Err(Failure::Run(format!(
            "the matching suite needs a two-dimensional cone (circle cross-section), got n = {}",
            ctx.geom.dim()
        )));
    }
    let report = verify_bf0_zf_matching(
        &ctx.geom,
        &[1e-4, 2e-4, 4e-4],
        &[0.3, 0.5],
        0.2,
        1.1,
        &ctx.cfg,
    )?;
    let checks = vec![
        Check::new(
            "resolvent matches the small-k model",
            format!(
                "max relative residual {:.3e} over {} samples (tol 1e-2)",
                report.max_rel_residual, report.samples
            ),
            report.max_rel_residual < 1e-2,
        ),
        Check::new(
            "log-k coefficient is −1/V",
            format!("relative error {:.3e} (tol 1e-4)", report.max_log_coeff_error),
            report.max_log_coeff_error < 1e-4,
        ),
    ];
    Ok((checks, Vec::new()))
}

fn leading_of(family: &IndexFamily, face: Face) -> Option<(f64, u32)> {
    leading_order_table(family)
        .into_iter()
        .find(|(f, _)| *f == face)
        .and_then(|(_, lead)| lead)
}

/// Index tables under composition against the low-energy theory.
fn index_suite(ctx: &Ctx) -> Result<(Vec<Check>, Vec<String>), Failure> {
    let n = ctx.geom.dim();
    let resolvent = low_energy_resolvent_family(n)?;
    let heat = heat_family_from_resolvent(&resolvent, n, true)?;

    let nf = n as f64;
    let zf_log = if n == 2 { 1 } else { 0 };
    let resolvent_expected = [
        (Face::Zf, Some((0.0, zf_log))),
        (Face::Bf0, Some((nf - 2.0, 0))),
        (Face::Lb0, Some((nf - 2.0, 0))),
        (Face::Rb0, Some((nf - 2.0, 0))),
        (Face::Sc, Some((0.0, 0))),
    ];
    let heat_zf_log = if n == 2 { 1 } else { 0 };
    let heat_expected = [
        (Face::Zf, Some((nf, heat_zf_log))),
        (Face::Bf0, Some((nf, 0))),
        (Face::Lb0, Some((nf, 0))),
        (Face::Rb0, Some((nf, 0))),
        (Face::Sc, Some((0.0, 0))),
    ];

    let mut checks = Vec::new();
    let table_check = |name: &str, family: &IndexFamily, expected: &[(Face, Option<(f64, u32)>)]| {
        let mut pass = true;
        let mut detail = String::new();
        for &(face, want) in expected {
            let got = leading_of(family, face);
            if got != want {
                pass = false;
            }
            let shown = match got {
                Some((z, 0)) => format!("{z}"),
                Some((z, p)) => format!("{z}·log^{p}"),
                None => "∅".to_owned(),
            };
            if !detail.is_empty() {
                detail.push_str(", ");
            }
            let _ = write!(detail, "{} = {shown}", face.label());
        }
        Check::new(format!("{name} leading orders"), detail, pass)
    };
    checks.push(table_check("low-energy resolvent", &resolvent, &resolvent_expected));
    checks.push(table_check("long-time heat kernel", &heat, &heat_expected));

    // High-energy faces of scattering-type families stay empty under
    // composition.
    let composed = coneheat::index_set::compose_families(&resolvent, &resolvent)?;
    let scattering_ok = [Face::Lb, Face::Rb, Face::Bf]
        .iter()
        .all(|&face| composed.face(face).is_empty());
    checks.push(Check::new(
        "composition keeps high-energy faces empty",
        format!("resolvent ∘ resolvent, sc leading = {:?}", leading_of(&composed, Face::Sc)),
        scattering_ok && leading_of(&composed, Face::Sc) == Some((0.0, 0)),
    ));

    let notes = vec![
        format!("resolvent family:\n{resolvent}"),
        format!("heat family:\n{heat}"),
    ];
    Ok((checks, notes))
}

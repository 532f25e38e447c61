//! The data-producing subcommands.
//!
//! Each command reads its parameters from the shared [`Ctx`], evaluates on
//! the cartesian product of any list-valued parameters (in deterministic
//! order, parallelized over grid points), writes its artifacts into the
//! output directory, and prints a short summary.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use coneheat::cone::{heat_kernel_cone, resolvent_cone, ConePoint, ModeSumConfig};
use coneheat::cross_section::ConeGeometry;
use coneheat::renorm::{delta_grid_for_time, fit_divergent_expansion, trace_sweep};
use coneheat::zeta::{
    build_trace_model_from_cone, log_renormalized_det, trace_model_from_eigenvalues,
    zeta_from_trace_model, zeta_laurent_at_zero, PhgExpansion, TraceModel,
};

use crate::config::{parse_cutoff, Config, Failure};
use crate::output::{cartesian, fmt_f64, json_f64, write_json, Meta, Table};
use crate::parallel::{par_map, thread_count};

/// Everything a command needs: the validated config, the geometry built from
/// it, numerics, provenance, and the output directory (already created).
pub struct Ctx {
    pub config: Config,
    pub geom: ConeGeometry,
    pub cfg: ModeSumConfig,
    pub meta: Meta,
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl Ctx {
    pub fn build(config_path: &Path, overrides: &[String]) -> Result<Ctx, Failure> {
        let config = Config::load(config_path, overrides)?;
        let digest = config.digest()?;
        let geom = config.geometry.build()?;
        let cfg = config.numerics.mode_sum()?;
        let threads = thread_count()?;
        let out_dir = config.output.dir.clone();
        std::fs::create_dir_all(&out_dir).map_err(|err| {
            Failure::Config(format!("cannot create output dir `{}`: {err}", out_dir.display()))
        })?;
        let meta = Meta { version: env!("CARGO_PKG_VERSION"), digest };
        Ok(Ctx { config, geom, cfg, meta, out_dir, threads })
    }

    fn format(&self) -> &str {
        &self.config.output.format
    }
}

/// Tabulate the cross-section spectrum with indicial roots.
pub fn cmd_spectrum(ctx: &Ctx) -> Result<(), Failure> {
    let rows: Vec<Vec<f64>> = ctx
        .geom
        .spectrum()
        .entries()
        .iter()
        .map(|&(lambda, mult)| vec![lambda, mult, ctx.geom.indicial_root(lambda)])
        .collect();
    let count = rows.len();
    let table = Table { columns: vec!["lambda", "multiplicity", "nu"], rows };
    let path = table.write(&ctx.out_dir, "spectrum", ctx.format(), &ctx.meta)?;
    println!(
        "geometry: n = {}, cross-section volume = {}",
        ctx.geom.dim(),
        fmt_f64(ctx.geom.cross_section_volume())
    );
    println!("wrote {count} rows to {}", path.display());
    Ok(())
}

/// Evaluate the heat kernel over the configured grid.
pub fn cmd_heat(ctx: &Ctx) -> Result<(), Failure> {
    let task = ctx
        .config
        .task
        .heat
        .as_ref()
        .ok_or_else(|| Failure::config("the `heat` command needs a [task.heat] section"))?;
    let axes = [
        task.t.values("task.heat.t")?,
        task.r.values("task.heat.r")?,
        task.y.values("task.heat.y")?,
        task.rp.values("task.heat.rp")?,
        task.yp.values("task.heat.yp")?,
    ];
    let points = cartesian(&axes);
    let values = par_map(&points, ctx.threads, |point| -> Result<f64, Failure> {
        let (t, r, y, rp, yp) = (point[0], point[1], point[2], point[3], point[4]);
        let p = ConePoint::new(r, y).map_err(Failure::run)?;
        let pp = ConePoint::new(rp, yp).map_err(Failure::run)?;
        Ok(heat_kernel_cone(&ctx.geom, t, p, pp, &ctx.cfg)?)
    });
    let mut rows = Vec::with_capacity(points.len());
    for (point, value) in points.into_iter().zip(values) {
        let mut row = point;
        row.push(value?);
        rows.push(row);
    }
    let count = rows.len();
    let table = Table { columns: vec!["t", "r", "y", "rp", "yp", "value"], rows };
    let path = table.write(&ctx.out_dir, "heat", ctx.format(), &ctx.meta)?;
    if let [row] = table.rows.as_slice() {
        println!("heat kernel = {}", fmt_f64(row[5]));
    }
    println!("wrote {count} rows to {}", path.display());
    Ok(())
}

/// Evaluate the resolvent kernel over the configured grid.
pub fn cmd_resolvent(ctx: &Ctx) -> Result<(), Failure> {
    let task = ctx.config.task.resolvent.as_ref().ok_or_else(|| {
        Failure::config("the `resolvent` command needs a [task.resolvent] section")
    })?;
    let axes = [
        task.k.values("task.resolvent.k")?,
        task.r.values("task.resolvent.r")?,
        task.y.values("task.resolvent.y")?,
        task.rp.values("task.resolvent.rp")?,
        task.yp.values("task.resolvent.yp")?,
    ];
    let k_im = task.k_im;
    let points = cartesian(&axes);
    let values = par_map(&points, ctx.threads, |point| -> Result<Complex64, Failure> {
        let (k, r, y, rp, yp) = (point[0], point[1], point[2], point[3], point[4]);
        let p = ConePoint::new(r, y).map_err(Failure::run)?;
        let pp = ConePoint::new(rp, yp).map_err(Failure::run)?;
        Ok(resolvent_cone(&ctx.geom, Complex64::new(k, k_im), p, pp, &ctx.cfg)?)
    });
    let mut rows = Vec::with_capacity(points.len());
    for (point, value) in points.into_iter().zip(values) {
        let value = value?;
        rows.push(vec![point[0], k_im, point[1], point[2], point[3], point[4], value.re, value.im]);
    }
    let count = rows.len();
    let table =
        Table { columns: vec!["k_re", "k_im", "r", "y", "rp", "yp", "re", "im"], rows };
    let path = table.write(&ctx.out_dir, "resolvent", ctx.format(), &ctx.meta)?;
    if let [row] = table.rows.as_slice() {
        println!("resolvent = {} + {}i", fmt_f64(row[6]), fmt_f64(row[7]));
    }
    println!("wrote {count} rows to {}", path.display());
    Ok(())
}

/// Renormalized heat trace: sweep, divergent expansion, finite part.
pub fn cmd_rtrace(ctx: &Ctx) -> Result<(), Failure> {
    let task = ctx
        .config
        .task
        .rtrace
        .as_ref()
        .ok_or_else(|| Failure::config("the `rtrace` command needs a [task.rtrace] section"))?;
    let cutoff = parse_cutoff(&task.cutoff)?;
    let times = task.t.values("task.rtrace.t")?;
    let n = ctx.geom.dim();

    let results = par_map(&times, ctx.threads, |&t| {
        let deltas = delta_grid_for_time(&ctx.geom, t);
        let sweep = trace_sweep(&ctx.geom, t, &cutoff, &deltas, &ctx.cfg)?;
        let fit = fit_divergent_expansion(&sweep, n)?;
        Ok::<_, Failure>((sweep, fit))
    });

    let mut sweep_rows = Vec::new();
    let mut expansions = Vec::new();
    let mut trace_rows = Vec::new();
    for (&t, result) in times.iter().zip(results) {
        let (sweep, fit) = result?;
        for (&delta, &value) in sweep.deltas.iter().zip(&sweep.values) {
            sweep_rows.push(vec![t, delta, value]);
        }
        expansions.push(json!({
            "t": t,
            "powers": fit.powers.iter().map(|&(a, c)| json!([a, c])).collect::<Vec<_>>(),
            "log_coeff": fit.log_coeff,
            "finite_part": fit.finite_part,
            "condition": json_f64(fit.condition),
            "max_rel_residual": json_f64(fit.max_rel_residual),
        }));
        println!("t = {}: renormalized trace = {}", fmt_f64(t), fmt_f64(fit.finite_part));
        trace_rows.push(vec![t, fit.finite_part, fit.log_coeff]);
    }

    let sweep_table = Table { columns: vec!["t", "delta", "value"], rows: sweep_rows };
    let sweep_path = sweep_table.write(&ctx.out_dir, "rtrace_sweep", ctx.format(), &ctx.meta)?;
    let expansion_path = ctx.out_dir.join("rtrace_expansion.json");
    write_json(&expansion_path, &ctx.meta, json!({ "expansions": expansions }))?;
    let table = Table { columns: vec!["t", "finite_part", "log_coeff"], rows: trace_rows };
    let path = table.write(&ctx.out_dir, "rtrace", ctx.format(), &ctx.meta)?;
    println!(
        "wrote {}, {}, {}",
        path.display(),
        sweep_path.display(),
        expansion_path.display()
    );
    Ok(())
}

fn expansion_json(expansion: &PhgExpansion) -> Value {
    json!({
        "terms": expansion
            .terms
            .iter()
            .map(|term| json!({
                "power": term.power,
                "log_power": term.log_power,
                "coeff": term.coeff,
            }))
            .collect::<Vec<_>>(),
        "remainder_order": json_f64(expansion.remainder_order),
    })
}

/// Build the trace model the zeta/det commands share, plus its description
/// for the model artifact.
fn build_model(
    ctx: &Ctx,
    cutoff_name: &str,
    taylor_order: usize,
    split: f64,
) -> Result<(TraceModel, Value), Failure> {
    if ctx.config.geometry.kind == "file" {
        let mut eigenvalues = Vec::new();
        for &(lambda, mult) in ctx.geom.spectrum().entries() {
            let count = mult.round();
            if !(count >= 1.0 && (mult - count).abs() < 1e-9) {
                return Err(Failure::Run(format!(
                    "eigenvalue {lambda} has non-integer multiplicity {mult}; the trace model needs a literal spectrum"
                )));
            }
            eigenvalues.extend(std::iter::repeat(lambda).take(count as usize));
        }
        let model = trace_model_from_eigenvalues(&eigenvalues, taylor_order, split)?;
        let description = json!({
            "source": "spectrum-file",
            "eigenvalues": eigenvalues,
            "taylor_order": taylor_order,
            "split": split,
            "short_expansion": expansion_json(model.short_expansion()),
            "long_expansion": expansion_json(model.long_expansion()),
        });
        Ok((model, description))
    } else {
        let cutoff = parse_cutoff(cutoff_name)?;
        let cone = build_trace_model_from_cone(&ctx.geom, &cutoff, &ctx.cfg)?;
        let description = json!({
            "source": "renormalized-trace",
            "cutoff": cutoff_name,
            "split": cone.model.split(),
            "splice_gap": cone.splice_gap,
            "short_fit_residual": cone.short_fit_residual,
            "long_fit_residual": cone.long_fit_residual,
            "short_expansion": expansion_json(cone.model.short_expansion()),
            "long_expansion": expansion_json(cone.model.long_expansion()),
        });
        Ok((cone.model, description))
    }
}

/// Renormalized zeta values on the configured `s` grid.
pub fn cmd_zeta(ctx: &Ctx) -> Result<(), Failure> {
    let task = ctx
        .config
        .task
        .zeta
        .as_ref()
        .ok_or_else(|| Failure::config("the `zeta` command needs a [task.zeta] section"))?;
    if task.s.is_empty() {
        return Err(Failure::config("task.zeta.s must list at least one point"));
    }
    let (model, description) = build_model(ctx, &task.cutoff, task.taylor_order, task.split)?;

    let mut rows = Vec::with_capacity(task.s.len());
    for &[re, im] in &task.s {
        let s = Complex64::new(re, im);
        let value = zeta_from_trace_model(&model, s)?;
        println!(
            "zeta({} + {}i) = {} + {}i",
            fmt_f64(re),
            fmt_f64(im),
            fmt_f64(value.re),
            fmt_f64(value.im)
        );
        rows.push(vec![re, im, value.re, value.im]);
    }
    let laurent = zeta_laurent_at_zero(&model)?;

    let model_path = ctx.out_dir.join("zeta_model.json");
    write_json(&model_path, &ctx.meta, json!({ "model": description }))?;
    let laurent_path = ctx.out_dir.join("zeta_laurent.json");
    write_json(
        &laurent_path,
        &ctx.meta,
        json!({
            "residue": laurent.residue,
            "value": laurent.value,
            "derivative": laurent.derivative,
        }),
    )?;
    let table = Table { columns: vec!["s_re", "s_im", "zeta_re", "zeta_im"], rows };
    let path = table.write(&ctx.out_dir, "zeta", ctx.format(), &ctx.meta)?;
    println!("wrote {}, {}, {}", path.display(), model_path.display(), laurent_path.display());
    Ok(())
}

/// Renormalized determinant with the zeta Laurent data and, for cones, a
/// t-independence certificate for the underlying trace.
pub fn cmd_det(ctx: &Ctx) -> Result<(), Failure> {
    let default_task = crate::config::DetTask {
        cutoff: "sharp".to_owned(),
        taylor_order: 8,
        split: 1.0,
    };
    let task = ctx.config.task.det.as_ref().unwrap_or(&default_task);
    let (model, description) = build_model(ctx, &task.cutoff, task.taylor_order, task.split)?;

    let laurent = zeta_laurent_at_zero(&model)?;
    let log_det = log_renormalized_det(&model)?;

    // The determinant is only meaningful if the fitted trace really is the
    // renormalized trace: for cones, all time dependence beyond the constant
    // must sit at the fit-noise level on both sides of the split.
    let nonconstant = |expansion: &PhgExpansion| {
        expansion
            .terms
            .iter()
            .filter(|term| term.power != 0.0 || term.log_power != 0)
            .map(|term| term.coeff.abs())
            .fold(0.0f64, f64::max)
    };
    let certificate = if ctx.config.geometry.kind == "file" {
        Value::Null
    } else {
        json!({
            "splice_gap": description["splice_gap"],
            "short_fit_residual": description["short_fit_residual"],
            "long_fit_residual": description["long_fit_residual"],
            "nonconstant_short_magnitude": nonconstant(model.short_expansion()),
            "nonconstant_long_magnitude": nonconstant(model.long_expansion()),
        })
    };

    let det_path = ctx.out_dir.join("det.json");
    write_json(
        &det_path,
        &ctx.meta,
        json!({
            "log_det": log_det,
            "det": json_f64(log_det.exp()),
            "zeta_at_zero": {
                "residue": laurent.residue,
                "value": laurent.value,
                "derivative": laurent.derivative,
            },
            "t_independence": certificate,
            "model": description,
        }),
    )?;
    println!("log det = {}", fmt_f64(log_det));
    println!("det = {}", fmt_f64(log_det.exp()));
    println!("wrote {}", det_path.display());
    Ok(())
}

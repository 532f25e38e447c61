//! Cross-section spectra and the cone geometries built over them.
//!
//! A cone `C(N) = (0, ∞) × N` with metric `dr² + r² h` is determined by its
//! cross-section `(N, h)`.  For everything this crate computes, the only data
//! needed from `N` are
//!
//! * the Laplacian spectrum `{(λ_j, m_j)}` up to an explicit cutoff `Λ`,
//! * the volume `V = vol(N)`,
//! * and — for pointwise (rather than trace-level) kernels — the eigenspace
//!   projector kernels `Π_j(y, y′)` with `∫_N Π_j(y, y) dy = m_j`.
//!
//! Built-in cross-sections are circles of length `L` (`λ_j = (2πj/L)²`, the
//! j = 0 mode simple and every other mode double) and unit round spheres
//! `S^d` (`λ_k = k(k + d − 1)` with the harmonic-polynomial multiplicities).
//! Arbitrary spectra can be loaded from text files; those carry enough
//! information for heat traces but have no pointwise kernel, and operations
//! that need one return [`Error::NoModeKernel`].
//!
//! The indicial roots
//!
//! ```text
//! ν_j = sqrt((n/2 − 1)² + λ_j),        n = dim C(N) = dim N + 1,
//! ```
//!
//! set the order of every Bessel function appearing in the mode sums of
//! [`crate::cone`].
//!
//! Positions on a built-in cross-section are a single coordinate `y`: arc
//! length along the circle, or (for a sphere) arc length along a fixed great
//! circle through the base point.  Zonal kernels only ever see the geodesic
//! separation, so one coordinate loses nothing.

use std::path::Path;

use crate::error::{Error, Result};
use crate::special::gamma::ln_gamma_real;

/// Where a spectrum came from; pointwise mode kernels exist only for the
/// built-in geometries.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    /// Circle of circumference `length`.
    Circle { length: f64 },
    /// Unit round sphere `S^dim`.
    Sphere { dim: usize },
    /// User-supplied eigenvalue table (file path or other label).
    File { label: String },
}

/// A cross-section Laplacian spectrum, truncated at an explicit cutoff.
///
/// Entries are `(eigenvalue, multiplicity)` with strictly increasing
/// eigenvalues, and the list is complete: every eigenvalue `≤ cutoff` is
/// present.  Multiplicities are stored as `f64` but are exact integers
/// (asserted on construction), so sums over modes stay exact for any
/// realistic spectrum size.
#[derive(Debug, Clone)]
pub struct Spectrum {
    entries: Vec<(f64, f64)>,
    cutoff: f64,
    source: SpectrumSource,
}

impl Spectrum {
    fn new(entries: Vec<(f64, f64)>, cutoff: f64, source: SpectrumSource) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSpectrum(
                "spectrum has no entries at or below the cutoff".into(),
            ));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, &(lambda, mult)) in entries.iter().enumerate() {
            if !lambda.is_finite() || lambda < 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "entry {i}: eigenvalue {lambda} is not finite and nonnegative"
                )));
            }
            if lambda <= prev {
                return Err(Error::InvalidSpectrum(format!(
                    "entry {i}: eigenvalue {lambda} does not exceed its predecessor {prev} \
                     (coincident eigenvalues must be merged into one multiplicity)"
                )));
            }
            if !mult.is_finite() || mult < 1.0 || (mult - mult.round()).abs() > 1e-9 {
                return Err(Error::InvalidSpectrum(format!(
                    "entry {i}: multiplicity {mult} is not a positive integer"
                )));
            }
            if lambda > cutoff {
                return Err(Error::InvalidSpectrum(format!(
                    "entry {i}: eigenvalue {lambda} exceeds the stated cutoff {cutoff}"
                )));
            }
            prev = lambda;
        }
        Ok(Self {
            entries,
            cutoff,
            source,
        })
    }

    /// `(eigenvalue, multiplicity)` pairs, ascending in eigenvalue.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// The truncation threshold `Λ`: the list contains every eigenvalue `≤ Λ`.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    /// Number of distinct eigenvalues listed.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total eigenvalue count (with multiplicity) at or below the cutoff.
    pub fn counting_function(&self) -> f64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }
}

/// Spectrum of the circle of circumference `length`, complete up to `cutoff`.
///
/// Eigenvalues are `λ_j = (2πj/L)²`; `j = 0` is simple and every `j ≥ 1` is
/// double (`sin` and `cos`).
pub fn circle_spectrum(length: f64, cutoff: f64) -> Result<Spectrum> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "circle length must be positive and finite, got {length}"
        )));
    }
    check_cutoff(cutoff)?;
    let mut entries = vec![(0.0, 1.0)];
    let mut j = 1.0f64;
    loop {
        let lambda = (2.0 * std::f64::consts::PI * j / length).powi(2);
        if lambda > cutoff {
            break;
        }
        entries.push((lambda, 2.0));
        j += 1.0;
    }
    Spectrum::new(entries, cutoff, SpectrumSource::Circle { length })
}

/// Spectrum of the unit round sphere `S^dim`, complete up to `cutoff`.
///
/// Eigenvalues are `λ_k = k(k + d − 1)` and the multiplicity of `λ_k` is the
/// dimension of degree-`k` spherical harmonics,
/// `m_k = binom(k + d, d) − binom(k + d − 2, d)`.  For `d = 1` this
/// reproduces the circle of length `2π`.
pub fn sphere_spectrum(dim: usize, cutoff: f64) -> Result<Spectrum> {
    if dim == 0 {
        return Err(Error::InvalidGeometry(
            "sphere dimension must be at least 1".into(),
        ));
    }
    check_cutoff(cutoff)?;
    let d = dim as f64;
    let mut entries = Vec::new();
    let mut mult = 1.0f64; // m_0
    let mut k = 0.0f64;
    loop {
        let lambda = k * (k + d - 1.0);
        if lambda > cutoff {
            break;
        }
        entries.push((lambda, mult));
        // m_{k+1}/m_k = (2k + d + 1)(k + d − 1) / ((2k + d − 1)(k + 1)),
        // except from k = 0 where m_1 = d + 1 directly (m_0 is not part of
        // the two-parameter family).
        if k == 0.0 {
            mult = d + 1.0;
        } else {
            mult = (mult * (2.0 * k + d + 1.0) * (k + d - 1.0) / ((2.0 * k + d - 1.0) * (k + 1.0)))
                .round();
        }
        k += 1.0;
    }
    Spectrum::new(entries, cutoff, SpectrumSource::Sphere { dim })
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff.is_finite() && cutoff >= 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "spectrum cutoff must be finite and nonnegative, got {cutoff}"
        )));
    }
    Ok(())
}

/// Parse a spectrum from text: one `eigenvalue multiplicity` pair per line,
/// `#` starts a comment, blank lines ignored.  Eigenvalues must be strictly
/// ascending and multiplicities positive integers; violations are reported
/// with their 1-based line number.
///
/// The cutoff of the resulting spectrum is the largest listed eigenvalue —
/// a file promises nothing beyond what it lists.
pub fn parse_spectrum(text: &str, label: &str) -> Result<Spectrum> {
    let mut entries: Vec<(f64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let lambda: f64 = fields
            .next()
            .ok_or_else(|| Error::SpectrumParse {
                line: line_no,
                msg: "missing eigenvalue".into(),
            })?
            .parse()
            .map_err(|e| Error::SpectrumParse {
                line: line_no,
                msg: format!("bad eigenvalue: {e}"),
            })?;
        let mult: f64 = fields
            .next()
            .ok_or_else(|| Error::SpectrumParse {
                line: line_no,
                msg: "missing multiplicity".into(),
            })?
            .parse()
            .map_err(|e| Error::SpectrumParse {
                line: line_no,
                msg: format!("bad multiplicity: {e}"),
            })?;
        if let Some(extra) = fields.next() {
            return Err(Error::SpectrumParse {
                line: line_no,
                msg: format!("unexpected trailing field {extra:?}"),
            });
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::SpectrumParse {
                line: line_no,
                msg: format!("eigenvalue {lambda} is not finite and nonnegative"),
            });
        }
        if let Some(&(prev, _)) = entries.last() {
            if lambda <= prev {
                return Err(Error::SpectrumParse {
                    line: line_no,
                    msg: format!("eigenvalue {lambda} does not exceed its predecessor {prev}"),
                });
            }
        }
        if !mult.is_finite() || mult < 1.0 || (mult - mult.round()).abs() > 1e-9 {
            return Err(Error::SpectrumParse {
                line: line_no,
                msg: format!("multiplicity {mult} is not a positive integer"),
            });
        }
        entries.push((lambda, mult.round()));
    }
    let cutoff = entries.last().map(|&(l, _)| l).unwrap_or(0.0);
    Spectrum::new(
        entries,
        cutoff,
        SpectrumSource::File {
            label: label.to_string(),
        },
    )
}

/// Read and parse a spectrum file (format as in [`parse_spectrum`]).
pub fn load_spectrum(path: &Path) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::SpectrumParse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_spectrum(&text, &path.display().to_string())
}

/// Volume of the unit round sphere `S^d`: `ω_d = 2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(dim: usize) -> f64 {
    let d = dim as f64;
    let half = 0.5 * (d + 1.0);
    let ln_gamma = ln_gamma_real(half).expect("gamma is finite at positive half-integers");
    (std::f64::consts::LN_2 + half * std::f64::consts::PI.ln() - ln_gamma).exp()
}

/// An exact cone `C(N)`: cone dimension `n`, cross-section spectrum, and
/// cross-section volume.
///
/// Everything downstream is phrased in terms of this struct: indicial roots
/// order the Bessel functions, the volume normalizes zero modes and
/// logarithmic coefficients, and the mode kernels (where available) turn
/// trace-level mode sums into pointwise ones.
#[derive(Debug, Clone)]
pub struct ConeGeometry {
    n: usize,
    spectrum: Spectrum,
    volume: f64,
}

impl ConeGeometry {
    /// Cone over a circle of circumference `length` (`n = 2`); the flat plane
    /// when `length = 2π`, a flat cone with angle deficit otherwise.
    pub fn over_circle(length: f64, cutoff: f64) -> Result<Self> {
        let spectrum = circle_spectrum(length, cutoff)?;
        Ok(Self {
            n: 2,
            spectrum,
            volume: length,
        })
    }

    /// Cone over the unit round sphere `S^dim` (`n = dim + 1`); Euclidean
    /// `R^n` for the full unit sphere.
    pub fn over_sphere(dim: usize, cutoff: f64) -> Result<Self> {
        let spectrum = sphere_spectrum(dim, cutoff)?;
        Ok(Self {
            n: dim + 1,
            spectrum,
            volume: sphere_volume(dim),
        })
    }

    /// Cone over an arbitrary cross-section given by its spectrum and volume.
    ///
    /// `n` is the cone dimension (cross-section dimension plus one).  For
    /// built-in spectrum sources, `n` and `volume` must match the geometry
    /// they came from; file-backed spectra accept any consistent values but
    /// support trace-level operations only.
    pub fn from_spectrum(n: usize, spectrum: Spectrum, volume: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGeometry(format!(
                "cone dimension must be at least 2, got {n}"
            )));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "cross-section volume must be positive and finite, got {volume}"
            )));
        }
        match *spectrum.source() {
            SpectrumSource::Circle { length } => {
                if n != 2 {
                    return Err(Error::InvalidGeometry(format!(
                        "a circle cross-section forces cone dimension 2, got {n}"
                    )));
                }
                if (volume - length).abs() > 1e-12 * length {
                    return Err(Error::InvalidGeometry(format!(
                        "circle of length {length} has volume {length}, got {volume}"
                    )));
                }
            }
            SpectrumSource::Sphere { dim } => {
                if n != dim + 1 {
                    return Err(Error::InvalidGeometry(format!(
                        "S^{dim} cross-section forces cone dimension {}, got {n}",
                        dim + 1
                    )));
                }
                let omega = sphere_volume(dim);
                if (volume - omega).abs() > 1e-12 * omega {
                    return Err(Error::InvalidGeometry(format!(
                        "S^{dim} has volume {omega}, got {volume}"
                    )));
                }
            }
            SpectrumSource::File { .. } => {}
        }
        Ok(Self {
            n,
            spectrum,
            volume,
        })
    }

    /// Cone dimension `n` (the cross-section has dimension `n − 1`).
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Cross-section volume `V = vol(N)`.
    pub fn cross_section_volume(&self) -> f64 {
        self.volume
    }

    /// Indicial root `ν = sqrt((n/2 − 1)² + λ)` for a cross-section
    /// eigenvalue `λ`.
    pub fn indicial_root(&self, lambda: f64) -> f64 {
        let shift = 0.5 * self.n as f64 - 1.0;
        (shift * shift + lambda).sqrt()
    }

    /// `(ν_j, m_j)` for every spectrum entry, ascending in `ν_j`.
    pub fn indicial_roots(&self) -> Vec<(f64, f64)> {
        self.spectrum
            .entries()
            .iter()
            .map(|&(lambda, mult)| (self.indicial_root(lambda), mult))
            .collect()
    }

    /// Whether pointwise mode kernels `Π_j(y, y′)` are available (built-in
    /// cross-sections only).
    pub fn has_mode_kernel(&self) -> bool {
        !matches!(self.spectrum.source(), SpectrumSource::File { .. })
    }

    /// Geodesic distance on the cross-section between positions `y` and `y′`
    /// (see the module docs for the meaning of a position coordinate).
    ///
    /// Circle of length `L`: `|y − y′|` folded into `[0, L/2]`.  Sphere:
    /// the angle `|y − y′|` folded into `[0, π]`.
    pub fn separation(&self, y: f64, yp: f64) -> Result<f64> {
        match *self.spectrum.source() {
            SpectrumSource::Circle { length } => Ok(fold_periodic(y - yp, length)),
            SpectrumSource::Sphere { .. } => {
                Ok(fold_periodic(y - yp, 2.0 * std::f64::consts::PI))
            }
            SpectrumSource::File { ref label } => Err(Error::NoModeKernel(format!(
                "spectrum {label:?} carries multiplicities only; cross-section positions are \
                 meaningless for it"
            ))),
        }
    }

    /// Eigenspace projector kernel `Π_j(y, y′)` for spectrum entry `j`
    /// (so `∫_N Π_j(y, y) dy = m_j` and `Π_0 = 1/V`).
    ///
    /// Circle: `Π_0 = 1/L`, `Π_j = (2/L) cos(√λ_j · (y − y′))`.  Sphere
    /// `S^d`, `d ≥ 2`: the zonal kernel
    /// `Π_k = (2k + d − 1)/((d − 1) ω_d) · C_k^{(d−1)/2}(cos γ)` with `γ` the
    /// geodesic separation (entry index = harmonic degree).  `S^1` delegates
    /// to the circle of length `2π`.
    pub fn mode_kernel(&self, entry: usize, y: f64, yp: f64) -> Result<f64> {
        let (lambda, _) = *self.spectrum.entries().get(entry).ok_or(Error::Domain {
            context: "mode_kernel",
            msg: format!(
                "entry {entry} out of range (spectrum lists {} eigenvalues)",
                self.spectrum.len()
            ),
        })?;
        match *self.spectrum.source() {
            SpectrumSource::Circle { length } => Ok(circle_projector(lambda, length, y - yp)),
            SpectrumSource::Sphere { dim } => {
                if dim == 1 {
                    Ok(circle_projector(lambda, 2.0 * std::f64::consts::PI, y - yp))
                } else {
                    let gamma = fold_periodic(y - yp, 2.0 * std::f64::consts::PI);
                    Ok(zonal_kernel(dim, entry, gamma.cos()))
                }
            }
            SpectrumSource::File { ref label } => Err(Error::NoModeKernel(format!(
                "spectrum {label:?} carries multiplicities only"
            ))),
        }
    }
}

/// Fold a signed offset on a period-`period` circle into `[0, period/2]`.
fn fold_periodic(delta: f64, period: f64) -> f64 {
    let r = (delta.abs()) % period;
    r.min(period - r)
}

/// `Π_j` on a circle of circumference `length`: `1/L` for the zero mode,
/// `(2/L) cos(√λ Δy)` otherwise.
fn circle_projector(lambda: f64, length: f64, delta: f64) -> f64 {
    if lambda == 0.0 {
        1.0 / length
    } else {
        2.0 / length * (lambda.sqrt() * delta).cos()
    }
}

/// Zonal projector kernel on `S^d` (`d ≥ 2`) for harmonic degree `k`:
/// `(2k + d − 1)/((d − 1) ω_d) · C_k^{(d−1)/2}(x)` with `x = cos γ`.
fn zonal_kernel(dim: usize, degree: usize, x: f64) -> f64 {
    let d = dim as f64;
    let k = degree as f64;
    let pref = (2.0 * k + d - 1.0) / ((d - 1.0) * sphere_volume(dim));
    pref * gegenbauer(degree, 0.5 * (d - 1.0), x)
}

/// Gegenbauer polynomial `C_k^α(x)` by the three-term recurrence
/// `k C_k = 2x(k + α − 1) C_{k−1} − (k + 2α − 2) C_{k−2}`,
/// `C_0 = 1`, `C_1 = 2αx`.  Stable for `|x| ≤ 1`.
fn gegenbauer(k: usize, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * alpha * x;
    for m in 2..=k {
        let mf = m as f64;
        let next = (2.0 * x * (mf + alpha - 1.0) * cur - (mf + 2.0 * alpha - 2.0) * prev) / mf;
        prev = cur;
        cur = next;
    }
    cur
}

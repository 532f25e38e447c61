//! Bookkeeping algebra for polyhomogeneous expansion orders.
//!
//! A kernel that is polyhomogeneous at a boundary face has an asymptotic
//! expansion `Σ a_{z,p}(…) ρ^z log^p ρ` in the face's defining function `ρ`.
//! The *index set* of the face is the set of `(z, p)` pairs that may appear.
//! Index sets are infinite but highly structured: differentiating along the
//! face or multiplying by smooth functions moves terms up by whole powers and
//! down in log count, so every index set in sight is closed under
//!
//! ```text
//! (z, p) ⟹ (z + 1, p)        and        (z, p) ⟹ (z, q)  for q ≤ p.
//! ```
//!
//! [`IndexSet`] therefore stores only *generators* — one `(order, log_power)`
//! pair per distinct order, the rest being implied by the closure rules —
//! together with a truncation order below which membership queries are
//! decidable.  The empty index set (no terms at any order, i.e. decay to
//! infinite order) is the special case of no generators with infinite
//! truncation.
//!
//! Three operations generate everything else:
//!
//! * **shift** `E + c`: every order moves by `c` (multiplying a kernel by
//!   `ρ^c`);
//! * **sum** `E + F`: `{(z + w, p + q)}` (multiplying two expansions);
//! * **extended union** `E ∪̄ F`: `E ∪ F` plus a term `(z, p + q + 1)` for
//!   every pair of generators with coincident order.  The extra log is the
//!   fingerprint of composition integrals: when two faces contribute the same
//!   power, the fiber integral `∫ ρ^{z}/ρ · … dρ` over the corner produces one
//!   factor of `log ρ` on top of the combined log count.
//!
//! The coincidence scan runs over *generators*, not their closures — the
//! convention this crate adopts for `∪̄`, isolated in
//! [`IndexSet::extended_union`].  (Scanning closures would also flag, e.g.,
//! `{(0,0)}` against `{(1,0)}` at order 1; generator-level coincidence keeps
//! `∪̄` associative up to closure equivalence and matches how the composition
//! formulas are used here, where only leading terms are tracked.)
//!
//! # Faces and families
//!
//! The kernels of interest live on a blown-up double space whose boundary has
//! eight faces: `zf` (zero energy / long time), `bf₀`, `lb₀`, `rb₀` (the
//! low-energy corner and its side faces), `sc` (the scattering face carrying
//! the diagonal), and `lb`, `rb`, `bf` (the high-energy side and back faces,
//! at which everything here decays to infinite order).  An [`IndexFamily`]
//! assigns an index set to each face.  Families compose like the operators
//! they describe ([`compose_families`]):
//!
//! ```text
//! G_sc  = E_sc + F_sc
//! G_zf  = (E_zf  + F_zf ) ∪̄ (E_rb₀ + F_lb₀)
//! G_bf₀ = (E_bf₀ + F_bf₀) ∪̄ (E_lb₀ + F_rb₀)
//! G_lb₀ = (E_bf₀ + F_lb₀) ∪̄ (E_lb₀ + F_zf )
//! G_rb₀ = (E_rb₀ + F_bf₀) ∪̄ (E_zf  + F_rb₀)
//! ```
//!
//! (left factor's right faces meet the right factor's left faces, and the
//! corner face `bf₀` acts like a product of the two sides).
//!
//! # The two tables this module reproduces
//!
//! The low-energy resolvent `(Δ + k²)^{−1}` on an asymptotically conic
//! `n`-manifold has leading orders `(sc, bf₀, rb₀, lb₀, zf) =
//! (0, n−2, n−2, n−2, 0)` for `n ≥ 3`, with an extra `log k` at `zf` when
//! `n = 2` ([`low_energy_resolvent_family`]).  Feeding the resolvent family
//! through the contour integral that rebuilds the heat operator shifts every
//! low-energy face by `+2` (the measure `k dk` against `k^{−2}`-normalized
//! kernels) while leaving `sc` alone; on top of that, the Gaussian upper
//! bound forces the heat kernel to decay at least to order `n` at `zf`, so
//! orders below `n` produced by the naive shift are spurious and get raised
//! ([`heat_family_from_resolvent`] with the override).  The result is the
//! long-time heat table `(0, n, n, n, n)` checked in the tests.

use std::fmt;

use crate::error::{Error, Result};

/// Orders closer than this are the same order (and an order gap this close to
/// a whole number counts as integral for the closure rule).
const ORDER_TOL: f64 = 1e-9;

/// An index set: antichain generators plus a truncation order.
///
/// The set represented is the closure of `generators` under
/// `(z, p) → (z + 1, p)` and `(z, p) → (z, q ≤ p)`; membership is only
/// decidable strictly below `truncation`.  Generators are kept sorted by
/// order with one entry per distinct order (the largest log power); dominated
/// entries at *different* orders are retained, because they carry coincidence
/// information for [`extended_union`](IndexSet::extended_union).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    generators: Vec<(f64, u32)>,
    truncation: f64,
}

impl IndexSet {
    /// Index set with the given `(order, log_power)` generators, valid below
    /// `truncation` (use `f64::INFINITY` for a fully known set).
    pub fn new(generators: &[(f64, u32)], truncation: f64) -> Result<Self> {
        if truncation.is_nan() {
            return Err(Error::Domain {
                context: "IndexSet::new",
                msg: "truncation order is NaN".into(),
            });
        }
        for &(z, p) in generators {
            if !z.is_finite() {
                return Err(Error::Domain {
                    context: "IndexSet::new",
                    msg: format!("generator order {z} is not finite"),
                });
            }
            if z >= truncation - ORDER_TOL {
                return Err(Error::Domain {
                    context: "IndexSet::new",
                    msg: format!(
                        "generator ({z}, {p}) lies at or above the truncation order {truncation}"
                    ),
                });
            }
        }
        Ok(Self {
            generators: normalize(generators.to_vec()),
            truncation,
        })
    }

    /// The empty index set: decay to infinite order, no terms anywhere.
    pub fn empty() -> Self {
        Self {
            generators: Vec::new(),
            truncation: f64::INFINITY,
        }
    }

    /// Convenience: the single-generator set `{(order, log_power)}` with no
    /// truncation.
    pub fn single(order: f64, log_power: u32) -> Result<Self> {
        Self::new(&[(order, log_power)], f64::INFINITY)
    }

    /// Sorted `(order, log_power)` generators, one per distinct order.
    pub fn generators(&self) -> &[(f64, u32)] {
        &self.generators
    }

    /// Order below which membership queries are decidable.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// True for the genuinely empty set (no terms at *any* order).  A set
    /// with no generators but finite truncation is not empty — it merely has
    /// no known terms below its truncation.
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty() && self.truncation.is_infinite()
    }

    /// Smallest-order generator (with its log power), if any.
    pub fn leading(&self) -> Option<(f64, u32)> {
        self.generators.first().copied()
    }

    /// Does the expansion contain a `ρ^order log^{log_power} ρ` term?
    ///
    /// Errors when `order` is at or above the truncation, where the
    /// representation carries no information.
    pub fn contains(&self, order: f64, log_power: u32) -> Result<bool> {
        if order >= self.truncation - ORDER_TOL {
            return Err(Error::Domain {
                context: "IndexSet::contains",
                msg: format!(
                    "membership at order {order} is undecidable above the truncation {}",
                    self.truncation
                ),
            });
        }
        Ok(self.generators.iter().any(|&(z, p)| {
            let gap = order - z;
            gap >= -ORDER_TOL && (gap - gap.round()).abs() <= ORDER_TOL && log_power <= p
        }))
    }

    /// Every order moved by `c`: the index set of `ρ^c · (expansion)`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            generators: self.generators.iter().map(|&(z, p)| (z + c, p)).collect(),
            truncation: self.truncation + c,
        }
    }

    /// Index set of a product of expansions: all pairwise
    /// `(z + w, p + q)`.  Empty factors are absorbing.
    ///
    /// The truncation records where knowledge runs out: unknown terms of one
    /// factor first contribute at its truncation plus the other factor's
    /// smallest order.
    pub fn sum(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::empty();
        }
        let gens: Vec<(f64, u32)> = self
            .generators
            .iter()
            .flat_map(|&(z, p)| other.generators.iter().map(move |&(w, q)| (z + w, p + q)))
            .collect();
        let first = |s: &Self| s.leading().map_or(s.truncation, |(z, _)| z);
        let truncation = (self.truncation + first(other)).min(other.truncation + first(self));
        Self {
            generators: normalize(gens),
            truncation,
        }
    }

    /// Extended union `E ∪̄ F`: all generators of both sets, plus `(z, p+q+1)`
    /// for every pair of generators with the same order `z`.
    ///
    /// This is the one place the `∪̄` convention is fixed: coincidences are
    /// detected between *generators* (see the module docs for why not their
    /// closures).
    pub fn extended_union(&self, other: &Self) -> Self {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(&other.generators);
        for &(z, p) in &self.generators {
            for &(w, q) in &other.generators {
                if (z - w).abs() <= ORDER_TOL {
                    gens.push((z, p + q + 1));
                }
            }
        }
        Self {
            generators: normalize(gens),
            truncation: self.truncation.min(other.truncation),
        }
    }

    /// Do two sets have the same members at every lattice point below
    /// `bound`?  (The candidate lattice is every generator order of either
    /// set advanced by whole steps, with log powers up to the larger
    /// maximum.)  Used to compare sets that may differ in representation.
    pub fn equivalent_below(&self, other: &Self, bound: f64) -> Result<bool> {
        let bound = bound.min(self.truncation).min(other.truncation) - 2.0 * ORDER_TOL;
        let max_p = self
            .generators
            .iter()
            .chain(&other.generators)
            .map(|&(_, p)| p)
            .max()
            .unwrap_or(0);
        let mut orders: Vec<f64> = Vec::new();
        for &(z, _) in self.generators.iter().chain(&other.generators) {
            let mut w = z;
            while w < bound {
                orders.push(w);
                w += 1.0;
            }
        }
        for z in orders {
            for p in 0..=max_p {
                if self.contains(z, p)? != other.contains(z, p)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Sort by order, then merge coincident orders keeping the largest log power.
fn normalize(mut gens: Vec<(f64, u32)>) -> Vec<(f64, u32)> {
    gens.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(f64, u32)> = Vec::with_capacity(gens.len());
    for (z, p) in gens {
        match out.last_mut() {
            Some(last) if (last.0 - z).abs() <= ORDER_TOL => last.1 = last.1.max(p),
            _ => out.push((z, p)),
        }
    }
    out
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∞");
        }
        if self.generators.is_empty() {
            return write!(f, "≥ {} (unresolved)", self.truncation);
        }
        let mut first = true;
        for &(z, p) in &self.generators {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{z}")?;
            match p {
                0 => {}
                1 => write!(f, "·log")?,
                p => write!(f, "·log^{p}")?,
            }
        }
        Ok(())
    }
}

/// The eight boundary faces of the blown-up double space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    /// Zero energy (resolvent) / long time (heat kernel).
    Zf,
    /// Low-energy corner face.
    Bf0,
    /// Low-energy left boundary.
    Lb0,
    /// Low-energy right boundary.
    Rb0,
    /// Scattering face (carries the diagonal singularity).
    Sc,
    /// High-energy left boundary.
    Lb,
    /// High-energy right boundary.
    Rb,
    /// High-energy back face.
    Bf,
}

impl Face {
    /// All faces, in the order used for tables.
    pub const ALL: [Face; 8] = [
        Face::Zf,
        Face::Bf0,
        Face::Lb0,
        Face::Rb0,
        Face::Sc,
        Face::Lb,
        Face::Rb,
        Face::Bf,
    ];

    /// Short name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Face::Zf => "zf",
            Face::Bf0 => "bf0",
            Face::Lb0 => "lb0",
            Face::Rb0 => "rb0",
            Face::Sc => "sc",
            Face::Lb => "lb",
            Face::Rb => "rb",
            Face::Bf => "bf",
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An index set for each boundary face.
///
/// Every kernel this crate models decays to infinite order at the
/// high-energy faces `lb`, `rb`, `bf`; the operations below require those
/// faces to be empty and keep them so.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFamily {
    pub zf: IndexSet,
    pub bf0: IndexSet,
    pub lb0: IndexSet,
    pub rb0: IndexSet,
    pub sc: IndexSet,
    pub lb: IndexSet,
    pub rb: IndexSet,
    pub bf: IndexSet,
}

impl IndexFamily {
    /// Family with the five low-energy faces given and `lb`, `rb`, `bf`
    /// empty.
    pub fn scattering(
        zf: IndexSet,
        bf0: IndexSet,
        lb0: IndexSet,
        rb0: IndexSet,
        sc: IndexSet,
    ) -> Self {
        Self {
            zf,
            bf0,
            lb0,
            rb0,
            sc,
            lb: IndexSet::empty(),
            rb: IndexSet::empty(),
            bf: IndexSet::empty(),
        }
    }

    /// Family that is empty at every face.
    pub fn all_empty() -> Self {
        Self::scattering(
            IndexSet::empty(),
            IndexSet::empty(),
            IndexSet::empty(),
            IndexSet::empty(),
            IndexSet::empty(),
        )
    }

    /// The index set at a face.
    pub fn face(&self, face: Face) -> &IndexSet {
        match face {
            Face::Zf => &self.zf,
            Face::Bf0 => &self.bf0,
            Face::Lb0 => &self.lb0,
            Face::Rb0 => &self.rb0,
            Face::Sc => &self.sc,
            Face::Lb => &self.lb,
            Face::Rb => &self.rb,
            Face::Bf => &self.bf,
        }
    }

    fn check_scattering(&self, context: &'static str) -> Result<()> {
        for face in [Face::Lb, Face::Rb, Face::Bf] {
            if !self.face(face).is_empty() {
                return Err(Error::Domain {
                    context,
                    msg: format!(
                        "face {face} must be empty (infinite-order decay), got {{{}}}",
                        self.face(face)
                    ),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndexFamily {
    /// Paper-style table: one `face: leading order[·log^p]` line per face.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for face in Face::ALL {
            let set = self.face(face);
            write!(f, "{face:>4}: ")?;
            match set.leading() {
                None => writeln!(f, "{set}")?,
                Some((z, 0)) => writeln!(f, "{z}")?,
                Some((z, 1)) => writeln!(f, "{z}·log")?,
                Some((z, p)) => writeln!(f, "{z}·log^{p}")?,
            }
        }
        Ok(())
    }
}

/// Index family of a composition of two operators.
///
/// Applies the composition formulas from the module docs: `sc` orders add,
/// and each low-energy face of the product collects the two ways the factors'
/// faces can meet it, with coincidence logs from the extended union.  The
/// high-energy faces must be empty on both factors and stay empty.
pub fn compose_families(e: &IndexFamily, f: &IndexFamily) -> Result<IndexFamily> {
    e.check_scattering("compose_families")?;
    f.check_scattering("compose_families")?;
    Ok(IndexFamily::scattering(
        e.zf.sum(&f.zf).extended_union(&e.rb0.sum(&f.lb0)),
        e.bf0.sum(&f.bf0).extended_union(&e.lb0.sum(&f.rb0)),
        e.bf0.sum(&f.lb0).extended_union(&e.lb0.sum(&f.zf)),
        e.rb0.sum(&f.bf0).extended_union(&e.zf.sum(&f.rb0)),
        e.sc.sum(&f.sc),
    ))
}

/// Leading-order index family of the low-energy resolvent `(Δ + k²)^{−1}` on
/// an asymptotically conic `n`-manifold.
///
/// Orders `(zf, bf₀, lb₀, rb₀, sc) = (0, n−2, n−2, n−2, 0)`, with the `zf`
/// entry carrying one power of `log k` when `n = 2` (the two-dimensional
/// resolvent grows like `−V^{−1} log k` at zero energy, `V` the cross-section
/// volume) and no logs otherwise.  `lb`, `rb`, `bf` are empty.
pub fn low_energy_resolvent_family(n: usize) -> Result<IndexFamily> {
    if n < 2 {
        return Err(Error::Domain {
            context: "low_energy_resolvent_family",
            msg: format!("need dimension n ≥ 2, got {n}"),
        });
    }
    let side = (n as f64) - 2.0;
    Ok(IndexFamily::scattering(
        IndexSet::single(0.0, if n == 2 { 1 } else { 0 })?,
        IndexSet::single(side, 0)?,
        IndexSet::single(side, 0)?,
        IndexSet::single(side, 0)?,
        IndexSet::single(0.0, 0)?,
    ))
}

/// Index family bounding the long-time heat kernel, from the resolvent's.
///
/// The contour integral rebuilding `e^{−tΔ}` from `(Δ + k²)^{−1}` shifts
/// every low-energy face by `+2` and leaves `sc` unchanged; the result is an
/// upper bound (the true heat index sets are subsets).  With
/// `apply_gaussian_override`, `zf` generators below order `n` are raised to
/// `(n, 0)`: the Gaussian upper bound `C₁ t^{−n/2} e^{−d²/C₂ t}` forces decay
/// of order at least `n` at `zf`, so slower terms produced by the naive shift
/// cannot actually occur.  Log powers survive the override only at or above
/// order `n` (in two dimensions the leading `zf` behavior is `w² log w`,
/// which sits exactly at `n = 2` and keeps its log).
pub fn heat_family_from_resolvent(
    resolvent: &IndexFamily,
    n: usize,
    apply_gaussian_override: bool,
) -> Result<IndexFamily> {
    resolvent.check_scattering("heat_family_from_resolvent")?;
    let mut zf = resolvent.zf.shift(2.0);
    if apply_gaussian_override {
        let raised: Vec<(f64, u32)> = zf
            .generators
            .iter()
            .map(|&(z, p)| {
                if z < n as f64 - ORDER_TOL {
                    (n as f64, 0)
                } else {
                    (z, p)
                }
            })
            .collect();
        zf = IndexSet {
            generators: normalize(raised),
            truncation: zf.truncation.max(n as f64 + 1.0),
        };
    }
    Ok(IndexFamily::scattering(
        zf,
        resolvent.bf0.shift(2.0),
        resolvent.lb0.shift(2.0),
        resolvent.rb0.shift(2.0),
        resolvent.sc.clone(),
    ))
}

/// Leading `(order, log_power)` per face; `None` for faces with no
/// generators (empty faces decay to infinite order).
pub fn leading_order_table(family: &IndexFamily) -> Vec<(Face, Option<(f64, u32)>)> {
    Face::ALL
        .iter()
        .map(|&face| (face, family.face(face).leading()))
        .collect()
}

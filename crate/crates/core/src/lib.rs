//! Numerical spectral geometry on exact cones.
//!
//! An *exact cone* over a closed (n−1)-manifold `N` is `C(N) = (0, ∞) × N` with
//! the metric `dr² + r² h`, where `h` is a fixed metric on the cross-section.
//! Everything about its Laplacian separates into cross-section eigenmodes, so
//! heat kernels and resolvents become one-dimensional Bessel mode sums.  This
//! crate evaluates those sums and the renormalized spectral invariants built
//! from them:
//!
//! * [`cross_section`] — eigenvalue/multiplicity tables for circles, round
//!   spheres, and user-supplied spectra, plus the indicial roots
//!   `ν_j = sqrt((n/2 − 1)² + λ_j)` that set every Bessel order.
//! * [`special`] — modified Bessel functions of real order and complex
//!   argument, the complex gamma function, and adaptive Gauss–Kronrod
//!   quadrature.  All mode sums and contour integrals bottom out here.
//! * [`cone`] — pointwise heat kernels and resolvents on a cone, the contour
//!   reconstruction of the heat kernel from the resolvent, Euclidean closed
//!   forms used as oracles, Gaussian upper-bound certificates, and the
//!   small-k matching between resolvent regimes.
//! * [`renorm`] — cutoff heat traces, their divergent expansion in the cutoff
//!   parameter, and the renormalized trace (the finite part at zero cutoff).
//! * [`zeta`] — Mellin transforms of trace models, renormalized zeta
//!   functions, and zeta-determinants via Laurent expansion at `s = 0`.
//! * [`index_set`] — bookkeeping algebra for polyhomogeneous index sets
//!   (orders and log powers) and their behavior under composition.
//! * [`asymptotics`] — empirical leading-order extraction: fit `log|f|`
//!   against `log ρ` on a sample path and compare with predicted orders.
//!
//! Conventions: the Laplacian is positive (`Δ = −∂² …`), the resolvent is
//! `(Δ + k²)^{-1}` with `Re k > 0`, and the heat operator is `e^{-tΔ}`.

pub mod asymptotics;
pub mod cone;
pub mod cross_section;
pub mod error;
pub mod index_set;
pub mod renorm;
pub mod special;
pub mod zeta;

pub use error::{Error, Result};

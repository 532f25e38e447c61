//! Special functions and quadrature underpinning the mode sums.
//!
//! * [`quad`] — adaptive Gauss–Kronrod (G7/K15) integration for real- and
//!   complex-valued integrands on finite intervals.
//! * [`gamma`] — complex gamma function (Lanczos), real log-gamma, and the
//!   Taylor coefficients of `1/Γ(s)` at `s = 0` used by zeta Laurent algebra.
//! * [`bessel`] — modified Bessel functions `I_ν`, `K_ν` of real order
//!   `ν ≥ 0` and complex argument, with scaled and logarithmic variants that
//!   stay finite deep in the over/underflow regime of the unscaled functions.

pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_ik, bessel_k, bessel_k_scaled, ik_real, ln_bessel_i,
    ln_bessel_k, scaled_bessel_i, BesselConfig, IkReal,
};
pub use gamma::{gamma, ln_gamma_real, recip_gamma_series};
pub use quad::{fixed_panels, integrate, QuadConfig, QuadOutput, QuadResult};

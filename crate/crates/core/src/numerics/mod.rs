//! Special functions and quadrature.

pub mod quad;
pub mod special;

pub use quad::{
    gauss_legendre, integrate_finite, integrate_finite_panels, integrate_semi_infinite, integrate_with_breakpoints,
    maximize_unimodal, Estimate, QuadratureSpec,
};
pub use special::{
    bessel_i, bessel_i0_minus_i1_scaled, bessel_i_scaled, dawson, erf_family, exponential_integral, hyp2f2_special,
    sine_integral, tricomi_u_half, BesselOrder,
};

//! Poisson → {GOE, GUE, GSE} in the 2×2 (4×4 self-dual) construction.
//!
//! All three densities share the form
//! `P(s) = C s^β′ ∫₀^∞ exp(−(Ds − x/2λ)² − x) · X̃(xDs/λ) dx`
//! where the Gaussian factors have already been merged with the growing part
//! of the Bessel-type kernel, so `X̃(z) = e^{-z}·X(z)` stays bounded.

use std::f64::consts::PI;

use crate::numerics::{
    bessel_i_scaled, erf_family, exponential_integral, hyp2f2_special, integrate_with_breakpoints, tricomi_u_half,
    BesselOrder, QuadratureSpec,
};
use crate::Result;

/// Above this coupling the Poisson→GUE `D(λ)` uses the moment integrals: the
/// closed form loses ~`e^{λ²}/λ` ulps to cancellation.
pub(crate) const GUE_CLOSED_FORM_MAX_LAMBDA: f64 = 3.0;

/// Below this `x` the Poisson→GSE `D(λ)` integrand uses its Taylor series.
const GSE_TAYLOR_SWITCH: f64 = 1e-2;

pub(crate) fn density_spec() -> QuadratureSpec {
    QuadratureSpec { relative_tolerance: 1e-10, absolute_tolerance: 1e-300, max_subdivisions: 600 }
}

pub(crate) fn constants_goe(lambda: f64) -> Result<(f64, f64)> {
    let d = PI.sqrt() / (2.0 * lambda) * tricomi_u_half(lambda * lambda)?;
    Ok((d, 2.0 * d * d))
}

pub(crate) fn constants_gue(lambda: f64) -> Result<(f64, f64)> {
    let d = if lambda <= GUE_CLOSED_FORM_MAX_LAMBDA { d_gue_closed_form(lambda)? } else { d_gue_moments(lambda)? };
    Ok((d, 4.0 * d.powi(3) / PI.sqrt()))
}

pub(crate) fn d_gue_closed_form(lambda: f64) -> Result<f64> {
    let l2 = lambda * lambda;
    let (_, erfc, _) = erf_family(lambda);
    Ok(1.0 / PI.sqrt() + l2.exp() * erfc / (2.0 * lambda) - 0.5 * lambda * exponential_integral(l2)?
        + 2.0 * l2 / PI.sqrt() * hyp2f2_special(l2))
}

/// Ratio of the first two moments of the unnormalized spacing law.
pub(crate) fn d_gue_moments(lambda: f64) -> Result<f64> {
    let spec = QuadratureSpec::with_tolerances(1e-13, 1e-300);
    let m0 = PI.sqrt() / 4.0;
    let a = integrate_with_breakpoints(
        |x| {
            let y = x / (2.0 * lambda);
            // erf(y)/x → 1/(λ√π) as x → 0
            let erf_over_x = if y < 1e-8 { 1.0 / (lambda * PI.sqrt()) } else { libm::erf(y) / x };
            (-x).exp() * PI.sqrt() * lambda / 4.0 * (1.0 + x * x / (2.0 * lambda * lambda)) * erf_over_x
        },
        &[0.0, 1.0, 10.0],
        &spec,
    )?;
    let b = integrate_with_breakpoints(|x| 0.25 * (-x * x / (4.0 * lambda * lambda) - x).exp(), &[0.0, 1.0], &spec)?;
    Ok((a.value + b.value) / m0)
}

pub(crate) fn constants_gse(lambda: f64) -> Result<(f64, f64)> {
    let spec = QuadratureSpec::with_tolerances(1e-13, 1e-300);
    let scale = 1.0 / (2.0 * lambda);
    let mut bps = vec![0.0, GSE_TAYLOR_SWITCH];
    for k in [0.1, 1.0, 4.0, 16.0] {
        let x = k * scale;
        if x > *bps.last().unwrap() {
            bps.push(x);
        }
    }
    let integral = integrate_with_breakpoints(|x| (-2.0 * lambda * x).exp() * gse_kernel(x), &bps, &spec)?;
    let d = lambda / (2.0 * PI.sqrt()) * integral.value;
    Ok((d, 8.0 * d.powi(5) / PI.sqrt()))
}

/// `[(4x³+2x)e^{-x²} + √π(4x⁴+4x²−1)erf x] / x³`, finite at `x = 0`.
pub(crate) fn gse_kernel(x: f64) -> f64 {
    if x < GSE_TAYLOR_SWITCH {
        let x2 = x * x;
        return 32.0 / 3.0 + x2 * (32.0 / 15.0 + x2 * (-16.0 / 105.0 + x2 * (16.0 / 945.0 - x2 * 4.0 / 2079.0)));
    }
    let x2 = x * x;
    ((4.0 * x2 + 2.0) * x * (-x2).exp() + PI.sqrt() * (4.0 * x2 * x2 + 4.0 * x2 - 1.0) * libm::erf(x)) / (x2 * x)
}

/// `e^{-z}·X_{β′}(z)` for the three perturbing ensembles.
fn scaled_kernel(beta_prime: u8, z: f64) -> f64 {
    match beta_prime {
        1 => bessel_i_scaled(BesselOrder::Zero, z).unwrap_or(0.0),
        2 => {
            // e^{-z} sinh z / z
            if z < 1e-8 {
                1.0 - z
            } else {
                -(-2.0 * z).exp_m1() / (2.0 * z)
            }
        }
        _ => {
            // e^{-z} (z cosh z − sinh z) / z³
            if z < 0.5 {
                let z2 = z * z;
                let series =
                    1.0 / 3.0 + z2 * (1.0 / 30.0 + z2 * (1.0 / 840.0 + z2 * (1.0 / 45360.0 + z2 / 3_991_680.0)));
                series * (-z).exp()
            } else {
                let e = (-2.0 * z).exp();
                (0.5 * z * (1.0 + e) + 0.5 * (-2.0 * z).exp_m1()) / (z * z * z)
            }
        }
    }
}

pub(crate) fn density(beta_prime: u8, s: f64, lambda: f64, d: f64, c: f64) -> Result<f64> {
    let ds = d * s;
    let integrand = |x: f64| {
        let u = ds - x / (2.0 * lambda);
        (-u * u - x).exp() * scaled_kernel(beta_prime, x * ds / lambda)
    };
    // Peak of the Gaussian part and its width; the kernel only adds a
    // power-law tilt.
    let sigma = 2f64.sqrt() * lambda;
    let peak = 2.0 * lambda * (ds - lambda);
    let mut bps = vec![0.0];
    if peak > 0.0 {
        for k in [-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let x = peak + k * sigma;
            if x > *bps.last().unwrap() {
                bps.push(x);
            }
        }
    } else {
        let kappa = 1.0 - ds / lambda;
        let w = sigma.min(1.0 / kappa);
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            bps.push(k * w);
        }
    }
    let integral = integrate_with_breakpoints(integrand, &bps, &density_spec())?;
    Ok(c * s.powi(beta_prime as i32) * integral.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gse_kernel_taylor_switch_matches_extended_precision() {
        // 40-digit reference values of the closed form.
        let cases = [(0.01, 10.666_879_998_476_207), (0.3, 10.857_444_598_788_334)];
        for (x, want) in cases {
            assert!((gse_kernel(x) - want).abs() < 1e-13 * want, "x={x}: {}", gse_kernel(x));
            assert!((gse_kernel(x * (1.0 - 1e-12)) - want).abs() < 1e-12 * want);
        }
        assert_eq!(gse_kernel(0.0), 32.0 / 3.0);
    }

    #[test]
    fn gue_closed_form_agrees_with_moment_route_at_switch() {
        let l = GUE_CLOSED_FORM_MAX_LAMBDA;
        let a = d_gue_closed_form(l).unwrap();
        let b = d_gue_moments(l).unwrap();
        assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
        // 30-digit reference values of D(λ).
        for (l, want) in
            [(0.5, 1.614_272_912_519_391_8), (1.0, 1.284_499_400_217_928_3), (3.0, 1.148_647_640_346_441_3)]
        {
            assert!((d_gue_closed_form(l).unwrap() - want).abs() < 1e-12, "λ={l}");
            assert!((d_gue_moments(l).unwrap() - want).abs() < 1e-12, "λ={l}");
        }
    }

    #[test]
    fn d_limits() {
        // λ → ∞
        assert!((constants_goe(1e3).unwrap().0 - PI.sqrt() / 2.0).abs() < 1e-6);
        assert!((constants_gue(1e3).unwrap().0 - 2.0 / PI.sqrt()).abs() < 1e-6);
        assert!((constants_gse(1e3).unwrap().0 - 8.0 / (3.0 * PI.sqrt())).abs() < 1e-6);
        // λ → 0: D ~ 1/(2λ)
        for f in [constants_goe, constants_gue, constants_gse] {
            let l = 1e-4;
            assert!((f(l).unwrap().0 * 2.0 * l - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn scaled_kernels_are_continuous() {
        for b in [2u8, 4] {
            for z in [1e-8, 0.5] {
                let lo = scaled_kernel(b, z * (1.0 - 1e-12));
                let hi = scaled_kernel(b, z * (1.0 + 1e-12));
                assert!((lo - hi).abs() < 1e-11 * lo, "β′={b} z={z}");
            }
        }
        assert_eq!(scaled_kernel(4, 0.0), 1.0 / 3.0);
    }
}

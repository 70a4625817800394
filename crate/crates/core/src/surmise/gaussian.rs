//! GOE → GUE, GOE → GSE and GUE → GSE in closed or one-dimensional form.
//!
//! The `D(λ)` expressions cancel their leading power for large `λ`; above
//! [`SERIES_SWITCH`] they are evaluated from the expansion in `1/λ²` instead.

use std::f64::consts::PI;

use crate::numerics::{bessel_i0_minus_i1_scaled, dawson, integrate_finite_panels, QuadratureSpec};
use crate::Result;

const SERIES_SWITCH: f64 = 2.0;
const SERIES_TERMS: usize = 40;

pub(crate) fn constants_goe_gue(lambda: f64) -> (f64, f64) {
    let r = (1.0 + lambda * lambda).sqrt();
    let d = r / PI.sqrt() * (lambda / (1.0 + lambda * lambda) + (1.0 / lambda).atan());
    (d, 2.0 * r * d * d)
}

pub(crate) fn density_goe_gue(s: f64, lambda: f64, d: f64, c: f64) -> f64 {
    let ds = d * s;
    c * s * (-ds * ds).exp() * libm::erf(ds / lambda)
}

/// `a_k = (−1)^k/(2k+1)`, the Taylor coefficients of `atan u / u` in `u²`.
fn atan_coefficient(k: isize) -> f64 {
    if k < 0 {
        0.0
    } else {
        (if k % 2 == 0 { 1.0 } else { -1.0 }) / (2 * k + 1) as f64
    }
}

/// `λ − λ³ + (1+λ²)² acot λ`.
pub(crate) fn goe_gse_numerator(lambda: f64) -> f64 {
    if lambda <= SERIES_SWITCH {
        let l2 = lambda * lambda;
        return lambda - lambda * l2 + (1.0 + l2) * (1.0 + l2) * (1.0 / lambda).atan();
    }
    // (1+u²)² atan u / u = Σ c_k u^{2k} with c_0 = 1 cancelling the −λ³.
    let u2 = 1.0 / (lambda * lambda);
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 1..SERIES_TERMS as isize {
        pow *= u2;
        let c = atan_coefficient(k) + 2.0 * atan_coefficient(k - 1) + atan_coefficient(k - 2);
        sum += c * pow;
    }
    lambda + lambda.powi(3) * sum
}

pub(crate) fn constants_goe_gse(lambda: f64) -> (f64, f64) {
    let r = (1.0 + lambda * lambda).sqrt();
    let d = goe_gse_numerator(lambda) / ((2.0 * PI).sqrt() * lambda * r);
    let c = 2f64.powf(4.5) / PI.sqrt() * lambda * lambda * r.powi(3) * d.powi(5);
    (d, c)
}

pub(crate) fn density_goe_gse(s: f64, lambda: f64, d: f64, c: f64) -> Result<f64> {
    let a = d * d * s * s;
    // x = sin θ turns ∫₀¹(1−x²)K((1−x²)a)dx into ∫₀^{π/2} cos³θ K(a cos²θ) dθ,
    // which stays smooth where the kernel peaks near x = 1 for large a.
    let integrand = |theta: f64| {
        let c = theta.cos();
        let z = a * c * c;
        c * c * c * bessel_i0_minus_i1_scaled(z).unwrap_or(0.0)
    };
    let half_pi = 0.5 * PI;
    let mut points = vec![0.0];
    if a > 1.0 {
        for k in [16.0, 8.0, 4.0, 2.0, 1.0, 0.5] {
            let cos_theta = k / a.sqrt();
            if cos_theta < 1.0 {
                let t = cos_theta.acos();
                if t > *points.last().unwrap() {
                    points.push(t);
                }
            }
        }
    }
    points.push(half_pi);
    let spec = QuadratureSpec { relative_tolerance: 1e-11, absolute_tolerance: 1e-300, max_subdivisions: 500 };
    let integral = integrate_finite_panels(integrand, &points, &spec)?;
    Ok(c * s.powi(4) * (-2.0 * lambda * lambda * a).exp() * integral.value)
}

/// Central binomial factor `(2j)!/(4^j (j!)²)` with sign `(−1)^j`.
fn binomial_half(j: usize) -> f64 {
    let mut v = 1.0;
    for i in 1..=j {
        v *= -((2 * i - 1) as f64) / (2 * i) as f64;
    }
    v
}

/// `λ√π·D(λ) = 2 + λ² − λ⁴ arcsch λ / √(1+λ²)`.
pub(crate) fn gue_gse_scaled_d(lambda: f64) -> f64 {
    if lambda <= SERIES_SWITCH {
        let l2 = lambda * lambda;
        return 2.0 + l2 - l2 * l2 * (1.0 / lambda).asinh() / (1.0 + l2).sqrt();
    }
    // asinh u = Σ α_j u^{2j+1}, (1+u²)^{-1/2} = Σ b_j u^{2j}; e = α ∗ b and
    // e_0 = 1 cancels the λ².
    let u2 = 1.0 / (lambda * lambda);
    let alpha: Vec<f64> = (0..SERIES_TERMS).map(|j| binomial_half(j) / (2 * j + 1) as f64).collect();
    let b: Vec<f64> = (0..SERIES_TERMS).map(binomial_half).collect();
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 1..SERIES_TERMS {
        let e: f64 = (0..=k).map(|j| alpha[j] * b[k - j]).sum();
        sum += e * pow;
        pow *= u2;
    }
    2.0 - sum
}

pub(crate) fn constants_gue_gse(lambda: f64) -> (f64, f64) {
    let d = gue_gse_scaled_d(lambda) / (lambda * PI.sqrt());
    let c = 2.0 * lambda.powi(3) / PI.sqrt() * (1.0 + lambda * lambda) * d;
    (d, c)
}

/// `x − F(x)` with `F` Dawson's integral, accurate for small `x`.
pub(crate) fn x_minus_dawson(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        return x - dawson(x);
    }
    // Σ_{n≥1} (−1)^{n+1} 2ⁿ x^{2n+1}/(2n+1)!!
    let x2 = x * x;
    let mut term = x;
    let mut sum = 0.0;
    for n in 1..40 {
        term *= -2.0 * x2 / (2 * n + 1) as f64;
        sum -= term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub(crate) fn density_gue_gse(s: f64, lambda: f64, d: f64, c: f64) -> f64 {
    let x = d * s;
    // 2x² − √π x e^{−x²} erfi x = 2x(x − F(x))
    c * (-(lambda * x) * (lambda * x)).exp() * 2.0 * x * x_minus_dawson(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_branches_match_closed_forms_at_switch() {
        for l in [SERIES_SWITCH, SERIES_SWITCH * (1.0 + 1e-12)] {
            let l2 = l * l;
            let direct = l - l * l2 + (1.0 + l2) * (1.0 + l2) * (1.0 / l).atan();
            assert!((goe_gse_numerator(l) - direct).abs() < 1e-11 * direct);
            let direct = 2.0 + l2 - l2 * l2 * (1.0 / l).asinh() / (1.0 + l2).sqrt();
            assert!((gue_gse_scaled_d(l) - direct).abs() < 1e-11 * direct);
        }
    }

    #[test]
    fn d_limits() {
        let sp = PI.sqrt();
        let small = 1e-6;
        let big = 1e6;
        assert!((constants_goe_gue(small).0 - sp / 2.0).abs() < 1e-5);
        assert!((constants_goe_gue(big).0 - 2.0 / sp).abs() < 1e-6);
        assert!((constants_goe_gse(small).0 * small - sp / 2f64.powf(1.5)).abs() < 1e-5);
        assert!((constants_goe_gse(big).0 * big - 8.0 / (3.0 * (2.0 * PI).sqrt())).abs() < 1e-6);
        assert!((constants_gue_gse(small).0 * small - 2.0 / sp).abs() < 1e-5);
        assert!((constants_gue_gse(big).0 * big - 8.0 / (3.0 * sp)).abs() < 1e-6);
    }

    #[test]
    fn x_minus_dawson_is_continuous_and_matches_leading_term() {
        let lo = x_minus_dawson(0.5 * (1.0 - 1e-14));
        let hi = x_minus_dawson(0.5);
        assert!((lo - hi).abs() < 1e-13);
        let x: f64 = 1e-3;
        assert!((x_minus_dawson(x) / (2.0 * x.powi(3) / 3.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn goe_gse_density_matches_direct_x_quadrature() {
        // Unsubstituted form, e^{(xDs)²}[I0 − I1](z) kept explicit.
        let lambda: f64 = 0.7;
        let (d, c) = constants_goe_gse(lambda);
        for s in [0.3, 1.0, 2.5] {
            let (x, w) = crate::numerics::gauss_legendre(200);
            let a: f64 = d * d * s * s;
            let inner: f64 = x
                .iter()
                .zip(&w)
                .map(|(&t, &wt)| {
                    let x = 0.5 * (t + 1.0);
                    let z = (1.0 - x * x) * a;
                    let diff = crate::numerics::bessel_i(crate::numerics::BesselOrder::Zero, z).unwrap()
                        - crate::numerics::bessel_i(crate::numerics::BesselOrder::One, z).unwrap();
                    0.5 * wt * (1.0 - x * x) * (x * x * a).exp() * diff
                })
                .sum();
            let want = c * s.powi(4) * (-(1.0 + 2.0 * lambda * lambda) * a).exp() * inner;
            let got = density_goe_gse(s, lambda, d, c).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "s={s}: {got} vs {want}");
        }
    }
}

//! `λ → 0` limits of the Poisson-base densities on the rescaled axis
//! `s̃ = s/λ`, where the jump from `e^{−s}` to a repulsive law develops an
//! overshoot.

use std::f64::consts::PI;

use super::TransitionKind;
use crate::numerics::{bessel_i_scaled, dawson, maximize_unimodal, sine_integral, BesselOrder};
use crate::{domain, Result};

/// Limit of `P(λs̃; λ)` as `λ → 0`.
pub fn gibbs_limit(kind: TransitionKind, s_tilde: f64) -> Result<f64> {
    if !(s_tilde >= 0.0) || !s_tilde.is_finite() {
        return domain(format!("s̃ must be finite and ≥ 0, got {s_tilde}"));
    }
    let s = s_tilde;
    match kind {
        TransitionKind::PoissonToGoe => Ok(0.5 * PI.sqrt() * s * bessel_i_scaled(BesselOrder::Zero, s * s / 8.0)?),
        TransitionKind::PoissonToGue => Ok(s * dawson(0.5 * s)),
        TransitionKind::PoissonToGse => Ok(gse_limit(s)),
        _ => domain(format!("gibbs_limit is defined for the Poisson transitions only, got {kind}")),
    }
}

/// `(s̃/4)[(2+s̃²)F(s̃/2) − s̃]`, by series where the bracket cancels.
fn gse_limit(s: f64) -> f64 {
    let y = 0.5 * s;
    if s >= 1.0 {
        return 0.25 * s * ((2.0 + s * s) * dawson(y) - s);
    }
    // F(y) = Σ f_n y^{2n+1}, f_n = (−2)ⁿ/(2n+1)!!; the n = 0 terms cancel.
    let y2 = y * y;
    let mut f_prev = 1.0;
    let mut pow = y;
    let mut sum = 0.0;
    for n in 1..30 {
        let f = f_prev * -2.0 / (2 * n + 1) as f64;
        pow *= y2;
        let term = (2.0 * f + 4.0 * f_prev) * pow;
        sum += term;
        f_prev = f;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    0.5 * y * sum
}

/// Location and height of the maximum of [`gibbs_limit`].
pub fn gibbs_maximum(kind: TransitionKind) -> Result<(f64, f64)> {
    if !matches!(kind, TransitionKind::PoissonToGoe | TransitionKind::PoissonToGue | TransitionKind::PoissonToGse) {
        return domain(format!("gibbs_maximum is defined for the Poisson transitions only, got {kind}"));
    }
    maximize_unimodal(|s| gibbs_limit(kind, s).unwrap_or(f64::NEG_INFINITY), 0.5, 8.0, 1e-9)
}

/// Relative overshoot of a Fourier partial sum at a unit jump.
pub fn fourier_gibbs_overshoot() -> f64 {
    0.5 + sine_integral(PI) / PI - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surmise::transition_density;

    const POISSON: [TransitionKind; 3] =
        [TransitionKind::PoissonToGoe, TransitionKind::PoissonToGue, TransitionKind::PoissonToGse];

    #[test]
    fn maxima_match_published_constants() {
        let want = [(2.51393, 1.17516), (3.00395, 1.28475), (3.76023, 1.43453)];
        for (kind, (x, v)) in POISSON.into_iter().zip(want) {
            let (gx, gv) = gibbs_maximum(kind).unwrap();
            assert!((gx - x).abs() < 6e-6 && (gv - v).abs() < 6e-6, "{kind}: ({gx}, {gv})");
        }
    }

    #[test]
    fn gse_limit_series_and_small_s() {
        let a = gse_limit(1.0 - 1e-13);
        let b = gse_limit(1.0);
        assert!((a - b).abs() < 1e-13);
        let s: f64 = 0.01;
        assert!((gse_limit(s) / (s.powi(4) / 12.0) - 1.0).abs() < 1e-4);
        for kind in POISSON {
            assert_eq!(gibbs_limit(kind, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn gue_limit_matches_extrapolated_density() {
        // Quadratic-in-λ extrapolation through three couplings.
        let st = 2.0;
        let ls = [0.05, 0.025, 0.01];
        let ps: Vec<f64> =
            ls.iter().map(|&l| transition_density(TransitionKind::PoissonToGue, l * st, l).unwrap()).collect();
        let mut intercept = 0.0;
        for i in 0..3 {
            let mut w = 1.0;
            for j in 0..3 {
                if i != j {
                    w *= ls[j] / (ls[j] - ls[i]);
                }
            }
            intercept += w * ps[i];
        }
        let want = gibbs_limit(TransitionKind::PoissonToGue, st).unwrap();
        assert!((intercept - want).abs() < 2e-3, "{intercept} vs {want}");
    }

    #[test]
    fn fourier_overshoot() {
        let v = fourier_gibbs_overshoot();
        assert!((v - 0.0894899).abs() < 5e-8);
        // Trapezoid oracle of Si(π).
        let n = 200_000;
        let h = PI / n as f64;
        let mut si = 0.5 * (1.0 + PI.sin() / PI);
        for i in 1..n {
            let t = i as f64 * h;
            si += t.sin() / t;
        }
        si *= h;
        assert!((0.5 + si / PI - 1.0 - v).abs() < 1e-9);
    }
}

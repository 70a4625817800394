//! GSE → GUE without self-duality: the Kramers pairs of a 4×4 GSE matrix are
//! split by a GUE perturbation.
//!
//! In ordered level differences `t₁ = θ₂−θ₁`, `t₂ = θ₃−θ₂`, `t₃ = θ₄−θ₃` the
//! joint density is
//! `V(t)·exp{−¼[(t₁+2t₂+t₃)² + 2t₁² + 2t₃²]}·B(t; λ)` with `V` the
//! Vandermonde product and
//! `B = h(t₁)h(t₃) − h(t₁+t₂)h(t₂+t₃) + h(t₁+t₂+t₃)h(t₂)`, `h(x) = x e^{−x²/λ²}`.
//! All integrals are tensor Gauss–Legendre sums on `[0, T]³`; the Gaussian
//! factor is below `e^{−50}` beyond `T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::gauss_legendre;
use crate::{domain, Result};

/// Which spacing of the split spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingFamily {
    /// Within a former Kramers pair (`t₁`, equivalently `t₃`).
    S1,
    /// Between the two pairs (`t₂`).
    S2,
}

/// Normalization and the two family means at fixed `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GseGueMoments {
    pub lambda: f64,
    /// `C` with `C·∫∫∫P = 1`.
    pub c: f64,
    /// `C·∫∫∫ t₁P`.
    pub d1: f64,
    /// `C·∫∫∫ t₂P`.
    pub d2: f64,
}

const CUTOFF: f64 = 10.0;
const POINTS_PER_PANEL: usize = 14;

/// `e^{−x} − 1 + x` without cancellation for small `x`.
fn expm1_plus_x(x: f64) -> f64 {
    if x < 0.1 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= -x / k;
            sum += term;
        }
        sum
    } else {
        (-x).exp() - 1.0 + x
    }
}

fn bracket(t1: f64, t2: f64, t3: f64, lambda: f64) -> f64 {
    let (a, b) = (t1 + t2, t2 + t3);
    let all = t1 + t2 + t3;
    let q1 = t1 * t1 + t3 * t3;
    let q2 = a * a + b * b;
    let q3 = all * all + t2 * t2;
    let il2 = 1.0 / (lambda * lambda);
    if lambda <= 1.0 {
        t1 * t3 * (-q1 * il2).exp() - a * b * (-q2 * il2).exp() + all * t2 * (-q3 * il2).exp()
    } else {
        // The polynomial prefactors sum to zero at orders λ⁰ and λ⁻², so
        // only e^{−x}−1+x survives; this keeps B accurate at large λ.
        t1 * t3 * expm1_plus_x(q1 * il2) - a * b * expm1_plus_x(q2 * il2) + all * t2 * expm1_plus_x(q3 * il2)
    }
}

fn vandermonde(t1: f64, t2: f64, t3: f64) -> f64 {
    t1 * t2 * t3 * (t1 + t2) * (t2 + t3) * (t1 + t2 + t3)
}

/// Unnormalized joint density of the ordered level differences.
pub fn gse_gue_joint_density(t1: f64, t2: f64, t3: f64, lambda: f64) -> Result<f64> {
    if !(t1 >= 0.0 && t2 >= 0.0 && t3 >= 0.0) || ![t1, t2, t3].iter().all(|t| t.is_finite()) {
        return domain(format!("level differences must be finite and ≥ 0, got ({t1}, {t2}, {t3})"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("λ must be finite and > 0, got {lambda}"));
    }
    Ok(joint(t1, t2, t3, lambda))
}

fn joint(t1: f64, t2: f64, t3: f64, lambda: f64) -> f64 {
    let m = t1 + 2.0 * t2 + t3;
    let gauss = (-0.25 * (m * m + 2.0 * t1 * t1 + 2.0 * t3 * t3)).exp();
    // B ≥ 0 analytically; rounding can leave a tiny negative residue.
    (vandermonde(t1, t2, t3) * gauss * bracket(t1, t2, t3, lambda)).max(0.0)
}

/// `C(λ) = (4/3) π^{−3/2} λ^{−6} (2+λ²)⁵`.
pub(crate) fn normalization(lambda: f64) -> f64 {
    4.0 / 3.0 * PI.powf(-1.5) * (2.0 + lambda * lambda).powi(5) / lambda.powi(6)
}

/// Nodes and weights on `[0, CUTOFF]` with panels at the λ scale and at the
/// Gaussian scale.
fn axis_rule(lambda: f64, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cuts: Vec<f64> = [lambda, 2.0 * lambda, 3.5 * lambda, 6.0 * lambda, 0.75, 1.5, 2.5, 4.0, 6.0]
        .into_iter()
        .filter(|&x| x > 0.0 && x < CUTOFF)
        .collect();
    cuts.push(0.0);
    cuts.push(CUTOFF);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let (gx, gw) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(per_panel * cuts.len());
    let mut weights = Vec::with_capacity(per_panel * cuts.len());
    for w in cuts.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * wt);
        }
    }
    (nodes, weights)
}

fn moments_with(lambda: f64, per_panel: usize) -> (f64, f64, f64) {
    let (x, w) = axis_rule(lambda, per_panel);
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (&t1, &w1) in x.iter().zip(&w) {
        for (&t2, &w2) in x.iter().zip(&w) {
            let mut inner = 0.0;
            for (&t3, &w3) in x.iter().zip(&w) {
                inner += w3 * joint(t1, t2, t3, lambda);
            }
            let v = w1 * w2 * inner;
            m0 += v;
            m1 += t1 * v;
            m2 += t2 * v;
        }
    }
    (m0, m1, m2)
}

/// `C`, `D₁`, `D₂` at `λ`.
pub fn gse_gue_moments(lambda: f64) -> Result<GseGueMoments> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("λ must be finite and > 0, got {lambda}"));
    }
    let c = normalization(lambda);
    let (_, m1, m2) = moments_with(lambda, POINTS_PER_PANEL);
    Ok(GseGueMoments { lambda, c, d1: c * m1, d2: c * m2 })
}

fn family_density_with(family: SpacingFamily, s: f64, lambda: f64, d: f64, c: f64, per_panel: usize) -> f64 {
    let (x, w) = axis_rule(lambda, per_panel);
    let fixed = d * s;
    let mut sum = 0.0;
    for (&u, &wu) in x.iter().zip(&w) {
        for (&v, &wv) in x.iter().zip(&w) {
            let p = match family {
                SpacingFamily::S1 => joint(fixed, u, v, lambda),
                SpacingFamily::S2 => joint(u, fixed, v, lambda),
            };
            sum += wu * wv * p;
        }
    }
    c * d * sum
}

pub(crate) fn family_density(family: SpacingFamily, s: f64, lambda: f64, d: f64, c: f64) -> Result<f64> {
    Ok(family_density_with(family, s, lambda, d, c, POINTS_PER_PANEL))
}

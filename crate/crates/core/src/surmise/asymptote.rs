//! Small-`s` power laws and large-`s` tails.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_beta, surmise_constants, wigner_density, SurmiseParams, TransitionKind};
use crate::{domain, Result};

/// Leading large-`s` behaviour `A sᵖ exp(−a s − b s²)`.
///
/// `A` is kept as its logarithm: the Poisson-base prefactor carries `e^{λ²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeSForm {
    pub ln_prefactor: f64,
    pub power: f64,
    pub linear_rate: f64,
    pub gaussian_rate: f64,
}

impl LargeSForm {
    pub fn prefactor(&self) -> f64 {
        self.ln_prefactor.exp()
    }

    pub fn eval(&self, s: f64) -> f64 {
        let log_s = if self.power == 0.0 { 0.0 } else { self.power * s.ln() };
        (self.ln_prefactor + log_s - self.linear_rate * s - self.gaussian_rate * s * s).exp()
    }

    /// Human-readable form with the numeric constants filled in.
    pub fn descriptor(&self) -> String {
        format!(
            "{:.6e} * s^{} * exp(-{:.6e}*s - {:.6e}*s^2)",
            self.prefactor(),
            self.power,
            self.linear_rate,
            self.gaussian_rate
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub kind: TransitionKind,
    /// `None` for pure kinds.
    pub lambda: Option<f64>,
    pub small_s_power: u32,
    /// `c` in `P(s) = c s^p + …`.
    pub small_s_coefficient: f64,
    /// Leading `λ → 0` form of `c(λ)`, where one is known.
    pub small_lambda_coefficient: Option<f64>,
    /// `None` where no closed tail is known (the GSE→GUE families).
    pub large_s: Option<LargeSForm>,
}

fn pure_report(beta: u8) -> Result<AsymptoteReport> {
    check_beta(beta)?;
    let (coef, form) = match beta {
        0 => (1.0, LargeSForm { ln_prefactor: 0.0, power: 0.0, linear_rate: 1.0, gaussian_rate: 0.0 }),
        1 => (
            0.5 * PI,
            LargeSForm { ln_prefactor: (0.5 * PI).ln(), power: 1.0, linear_rate: 0.0, gaussian_rate: 0.25 * PI },
        ),
        2 => {
            let a = 32.0 / (PI * PI);
            (a, LargeSForm { ln_prefactor: a.ln(), power: 2.0, linear_rate: 0.0, gaussian_rate: 4.0 / PI })
        }
        _ => {
            let b = 64.0 / (9.0 * PI);
            let a = b.powi(3);
            (a, LargeSForm { ln_prefactor: a.ln(), power: 4.0, linear_rate: 0.0, gaussian_rate: b })
        }
    };
    Ok(AsymptoteReport {
        kind: TransitionKind::Pure(beta),
        lambda: None,
        small_s_power: beta as u32,
        small_s_coefficient: coef,
        small_lambda_coefficient: None,
        large_s: Some(form),
    })
}

/// `c(λ) ≈ …` as `λ → 0`.
fn small_lambda_form(kind: TransitionKind, lambda: f64) -> Option<f64> {
    Some(match kind {
        TransitionKind::PoissonToGoe => PI.sqrt() / (2.0 * lambda),
        TransitionKind::PoissonToGue => 1.0 / (2.0 * lambda * lambda),
        TransitionKind::PoissonToGse => 1.0 / (12.0 * lambda.powi(4)),
        TransitionKind::GoeToGue => PI / (2.0 * lambda),
        TransitionKind::GoeToGse => PI * PI / (12.0 * lambda.powi(3)),
        TransitionKind::GueToGse => 256.0 / (3.0 * PI.powi(3) * lambda * lambda),
        _ => return None,
    })
}

fn large_s_form(p: &SurmiseParams) -> Option<LargeSForm> {
    let (l, d, c) = (p.lambda, p.d, p.c);
    Some(match p.kind {
        TransitionKind::PoissonToGoe | TransitionKind::PoissonToGue | TransitionKind::PoissonToGse => LargeSForm {
            ln_prefactor: (2.0 * l * d).ln() + l * l,
            power: 0.0,
            linear_rate: 2.0 * l * d,
            gaussian_rate: 0.0,
        },
        TransitionKind::GoeToGue => {
            LargeSForm { ln_prefactor: c.ln(), power: 1.0, linear_rate: 0.0, gaussian_rate: d * d }
        }
        TransitionKind::GoeToGse => LargeSForm {
            ln_prefactor: ((PI / 32.0).sqrt() * c / d.powi(3)).ln(),
            power: 1.0,
            linear_rate: 0.0,
            gaussian_rate: 2.0 * l * l * d * d,
        },
        TransitionKind::GueToGse => LargeSForm {
            ln_prefactor: (2.0 * c * d * d).ln(),
            power: 2.0,
            linear_rate: 0.0,
            gaussian_rate: l * l * d * d,
        },
        _ => return None,
    })
}

/// `lim_{s→0} P(s)/sᵖ` by Neville extrapolation in `h` from four halvings.
///
/// Poisson-base densities carry odd powers of `s` in `P/sᵖ`, so all integer
/// powers are eliminated. The expansion variable scales like `s/λ²` for
/// small `λ`.
fn richardson_coefficient(p: &SurmiseParams, power: u32) -> Result<f64> {
    let h0 = 0.01 * (p.lambda * p.lambda).min(1.0);
    let mut h = [0.0; 4];
    let mut t = [0.0; 4];
    for k in 0..4 {
        h[k] = h0 / f64::from(1u32 << k);
        t[k] = p.density(h[k])? / h[k].powi(power as i32);
    }
    for m in 1..4 {
        for k in 0..4 - m {
            t[k] = (h[k] * t[k + 1] - h[k + m] * t[k]) / (h[k] - h[k + m]);
        }
    }
    Ok(t[0])
}

pub fn small_s_asymptote(kind: TransitionKind, lambda: f64) -> Result<AsymptoteReport> {
    if let TransitionKind::Pure(b) = kind {
        return pure_report(b);
    }
    let p = surmise_constants(kind, lambda)?;
    let power = kind.small_s_power();
    Ok(AsymptoteReport {
        kind,
        lambda: Some(lambda),
        small_s_power: power,
        small_s_coefficient: richardson_coefficient(&p, power)?,
        small_lambda_coefficient: small_lambda_form(kind, lambda),
        large_s: large_s_form(&p),
    })
}

/// Leading large-`s` value of the density; the ratio to the exact density
/// tends to 1 as `s` grows.
pub fn large_s_asymptote(kind: TransitionKind, s: f64, lambda: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("spacing must be finite and > 0, got {s}"));
    }
    if let TransitionKind::Pure(b) = kind {
        return wigner_density(b, s);
    }
    let p = surmise_constants(kind, lambda)?;
    match large_s_form(&p) {
        Some(f) => Ok(f.eval(s)),
        None => domain(format!("no closed large-s form for {kind}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_approach_small_lambda_forms() {
        // The Poisson→GSE coefficient converges like 1 + O(λ): at λ = 0.05 the
        // exact value is still 8.5% above 1/(12λ⁴), so it is checked at 0.01.
        for kind in TransitionKind::TRANSITIONS {
            let lambda = 0.01;
            let r = small_s_asymptote(kind, lambda).unwrap();
            let want = r.small_lambda_coefficient.unwrap();
            let rel = (r.small_s_coefficient / want - 1.0).abs();
            assert!(rel < 0.02, "{kind} at λ={lambda}: {} vs {want}", r.small_s_coefficient);
        }
    }

    #[test]
    fn extrapolated_coefficient_matches_poisson_gse_closed_form() {
        // P/s⁴ → (C/3)∫e^{−x²/4λ²−x}dx = (8/3) D⁵ λ e^{λ²} erfc λ; the
        // 25-digit values below come from the same expression with D by
        // 60-digit quadrature.
        for (lambda, want) in [(0.05, 14_464.818_300_367_119), (0.01, 8_311_758.028_131_784)] {
            let p = surmise_constants(TransitionKind::PoissonToGse, lambda).unwrap();
            let (_, erfc, _) = crate::numerics::erf_family(lambda);
            let closed = 8.0 / 3.0 * p.d.powi(5) * lambda * (lambda * lambda).exp() * erfc;
            assert!((closed / want - 1.0).abs() < 1e-9, "closed form {closed} vs {want}");
            let got = small_s_asymptote(TransitionKind::PoissonToGse, lambda).unwrap().small_s_coefficient;
            assert!((got / want - 1.0).abs() < 1e-6, "λ={lambda}: {got} vs {want}");
        }
    }

    #[test]
    fn richardson_matches_closed_form_goe_gue() {
        // P = C s e^{−D²s²} erf(Ds/λ) ⇒ c = 2CD/(λ√π).
        for lambda in [0.3, 1.0, 4.0] {
            let p = surmise_constants(TransitionKind::GoeToGue, lambda).unwrap();
            let want = 2.0 * p.c * p.d / (lambda * PI.sqrt());
            let got = small_s_asymptote(TransitionKind::GoeToGue, lambda).unwrap().small_s_coefficient;
            assert!((got / want - 1.0).abs() < 1e-9, "λ={lambda}: {got} vs {want}");
        }
    }

    #[test]
    fn pure_reports() {
        let r = small_s_asymptote(TransitionKind::Pure(0), 0.0).unwrap();
        assert_eq!(r.small_s_power, 0);
        let r = small_s_asymptote(TransitionKind::Pure(2), 0.0).unwrap();
        assert_eq!(r.small_s_power, 2);
        let f = r.large_s.unwrap();
        assert!((f.eval(1.3) - wigner_density(2, 1.3).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn large_s_ratio_tends_to_one() {
        for kind in TransitionKind::TRANSITIONS {
            let lambda = 0.5;
            let p = surmise_constants(kind, lambda).unwrap();
            let ratio = |s: f64| p.density(s).unwrap() / large_s_asymptote(kind, s, lambda).unwrap();
            let far = if kind.base_beta() == 0 { 40.0 } else { 12.0 };
            let r = ratio(far);
            assert!((r - 1.0).abs() < 0.05, "{kind}: ratio {r} at s={far}");
        }
    }

    #[test]
    fn gse_gue_has_no_large_s_form() {
        assert!(large_s_asymptote(TransitionKind::GseToGueS1, 3.0, 0.5).is_err());
        let r = small_s_asymptote(TransitionKind::GseToGueS2, 0.5).unwrap();
        assert_eq!(r.small_s_power, 4);
        assert!(r.large_s.is_none() && r.small_s_coefficient > 0.0);
    }
}

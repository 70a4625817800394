//! Spacing densities of pure and mixed 2×2 / 4×4 random-matrix ensembles.
//!
//! Every density here is normalized so that `∫P = 1` and `∫sP = 1`. Mixed
//! densities carry a coupling `λ > 0`; the pure endpoints `λ = 0` and
//! `λ = ∞` are served by [`wigner_density`] through [`Coupling`].

mod asymptote;
mod gaussian;
mod gibbs;
mod kramers;
mod poisson;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{domain, Error, Result};

pub use asymptote::{large_s_asymptote, small_s_asymptote, AsymptoteReport, LargeSForm};
pub use gibbs::{fourier_gibbs_overshoot, gibbs_limit, gibbs_maximum};
pub use kramers::{gse_gue_joint_density, gse_gue_moments, GseGueMoments, SpacingFamily};

/// Coupling used in place of `λ = ∞` for the GSE→GUE families, which have no
/// closed-form infinite-coupling limit.
pub const GSE_GUE_INFINITE_LAMBDA: f64 = 100.0;

/// Spacing-distribution family; serialized by its display name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TransitionKind {
    /// Pure Poisson (β = 0) or Wigner surmise (β ∈ {1, 2, 4}).
    Pure(u8),
    PoissonToGoe,
    PoissonToGue,
    PoissonToGse,
    GoeToGue,
    GoeToGse,
    GueToGse,
    /// Spacings between formerly Kramers-degenerate levels.
    GseToGueS1,
    /// Spacings between neighbouring Kramers pairs.
    GseToGueS2,
}

impl TransitionKind {
    /// The eight mixed kinds, in a fixed order.
    pub const MIXED: [TransitionKind; 8] = [
        Self::PoissonToGoe,
        Self::PoissonToGue,
        Self::PoissonToGse,
        Self::GoeToGue,
        Self::GoeToGse,
        Self::GueToGse,
        Self::GseToGueS1,
        Self::GseToGueS2,
    ];

    /// The six two-ensemble transitions.
    pub const TRANSITIONS: [TransitionKind; 6] =
        [Self::PoissonToGoe, Self::PoissonToGue, Self::PoissonToGse, Self::GoeToGue, Self::GoeToGse, Self::GueToGse];

    pub fn is_mixed(self) -> bool {
        !matches!(self, Self::Pure(_))
    }

    /// Dyson index reached at `λ = 0`.
    pub fn base_beta(self) -> u8 {
        match self {
            Self::Pure(b) => b,
            Self::PoissonToGoe | Self::PoissonToGue | Self::PoissonToGse => 0,
            Self::GoeToGue | Self::GoeToGse => 1,
            Self::GueToGse => 2,
            Self::GseToGueS1 => 2,
            Self::GseToGueS2 => 4,
        }
    }

    /// Dyson index reached at `λ = ∞`; `None` for the GSE→GUE families.
    pub fn target_beta(self) -> Option<u8> {
        match self {
            Self::Pure(b) => Some(b),
            Self::PoissonToGoe => Some(1),
            Self::PoissonToGue | Self::GoeToGue => Some(2),
            Self::PoissonToGse | Self::GoeToGse | Self::GueToGse => Some(4),
            Self::GseToGueS1 | Self::GseToGueS2 => None,
        }
    }

    /// Exponent of the small-`s` power law for `λ > 0`.
    pub fn small_s_power(self) -> u32 {
        match self {
            Self::Pure(b) => b as u32,
            Self::PoissonToGoe => 1,
            Self::PoissonToGue | Self::GoeToGue | Self::GseToGueS1 => 2,
            Self::PoissonToGse | Self::GoeToGse | Self::GueToGse | Self::GseToGueS2 => 4,
        }
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Pure(b) => return write!(f, "pure-{b}"),
            Self::PoissonToGoe => "poisson-goe",
            Self::PoissonToGue => "poisson-gue",
            Self::PoissonToGse => "poisson-gse",
            Self::GoeToGue => "goe-gue",
            Self::GoeToGse => "goe-gse",
            Self::GueToGse => "gue-gse",
            Self::GseToGueS1 => "gse-gue-s1",
            Self::GseToGueS2 => "gse-gue-s2",
        };
        f.write_str(s)
    }
}

impl FromStr for TransitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('_', "-");
        if let Some(b) = lower.strip_prefix("pure-") {
            let beta: u8 = b.parse().map_err(|_| Error::Domain(format!("bad Dyson index in {s:?}")))?;
            check_beta(beta)?;
            return Ok(Self::Pure(beta));
        }
        Self::MIXED
            .into_iter()
            .find(|k| k.to_string() == lower)
            .ok_or_else(|| Error::Domain(format!("unknown transition kind {s:?}")))
    }
}

fn check_beta(beta: u8) -> Result<()> {
    if matches!(beta, 0 | 1 | 2 | 4) {
        Ok(())
    } else {
        domain(format!("Dyson index must be 0, 1, 2 or 4, got {beta}"))
    }
}

/// Mean spacing of the unnormalized pure 2×2 (4×4 for β=4) problem with unit
/// diagonal variance.
pub fn pure_mean_spacing(beta: u8) -> Result<f64> {
    check_beta(beta)?;
    Ok(match beta {
        0 => 1.0,
        1 => PI.sqrt(),
        2 => 4.0 / PI.sqrt(),
        _ => 16.0 / (3.0 * PI.sqrt()),
    })
}

/// Poisson density (`β = 0`) or Wigner surmise (`β ∈ {1, 2, 4}`).
pub fn wigner_density(beta: u8, s: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(s >= 0.0) {
        return domain(format!("spacing must be non-negative, got {s}"));
    }
    Ok(match beta {
        0 => (-s).exp(),
        1 => 0.5 * PI * s * (-0.25 * PI * s * s).exp(),
        2 => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
        _ => {
            let b = 64.0 / (9.0 * PI);
            b.powi(3) * s.powi(4) * (-b * s * s).exp()
        }
    })
}

/// A mixed density at fixed `λ > 0` with its constants.
///
/// For the GSE→GUE families `c` normalizes the joint density of the three
/// level differences and `d` is the mean of the raw spacing of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurmiseParams {
    pub kind: TransitionKind,
    pub lambda: f64,
    pub d: f64,
    pub c: f64,
}

/// Constants `C(λ)`, `D(λ)` of a mixed kind.
pub fn surmise_constants(kind: TransitionKind, lambda: f64) -> Result<SurmiseParams> {
    if !kind.is_mixed() {
        return domain("surmise_constants takes a mixed kind; use wigner_density for pure ones");
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("λ must be finite and > 0 for {kind}, got {lambda}; use the pure limit instead"));
    }
    let (d, c) = match kind {
        TransitionKind::PoissonToGoe => poisson::constants_goe(lambda)?,
        TransitionKind::PoissonToGue => poisson::constants_gue(lambda)?,
        TransitionKind::PoissonToGse => poisson::constants_gse(lambda)?,
        TransitionKind::GoeToGue => gaussian::constants_goe_gue(lambda),
        TransitionKind::GoeToGse => gaussian::constants_goe_gse(lambda),
        TransitionKind::GueToGse => gaussian::constants_gue_gse(lambda),
        TransitionKind::GseToGueS1 | TransitionKind::GseToGueS2 => {
            let m = gse_gue_moments(lambda)?;
            let d = if kind == TransitionKind::GseToGueS1 { m.d1 } else { m.d2 };
            (d, m.c)
        }
        TransitionKind::Pure(_) => unreachable!(),
    };
    if !(d > 0.0 && c > 0.0) || !d.is_finite() || !c.is_finite() {
        return Err(Error::Convergence { estimate: d, error: f64::NAN });
    }
    Ok(SurmiseParams { kind, lambda, d, c })
}

impl SurmiseParams {
    /// Normalized density at spacing `s`.
    pub fn density(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return domain(format!("spacing must be non-negative, got {s}"));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let (l, d, c) = (self.lambda, self.d, self.c);
        match self.kind {
            TransitionKind::PoissonToGoe => poisson::density(1, s, l, d, c),
            TransitionKind::PoissonToGue => poisson::density(2, s, l, d, c),
            TransitionKind::PoissonToGse => poisson::density(4, s, l, d, c),
            TransitionKind::GoeToGue => Ok(gaussian::density_goe_gue(s, l, d, c)),
            TransitionKind::GoeToGse => gaussian::density_goe_gse(s, l, d, c),
            TransitionKind::GueToGse => Ok(gaussian::density_gue_gse(s, l, d, c)),
            TransitionKind::GseToGueS1 => kramers::family_density(SpacingFamily::S1, s, l, d, c),
            TransitionKind::GseToGueS2 => kramers::family_density(SpacingFamily::S2, s, l, d, c),
            TransitionKind::Pure(_) => unreachable!(),
        }
    }
}

/// Density of a mixed kind at `(s, λ)`; constants are recomputed per call.
pub fn transition_density(kind: TransitionKind, s: f64, lambda: f64) -> Result<f64> {
    surmise_constants(kind, lambda)?.density(s)
}

/// Normalized density of the GSE→GUE families at `(s, λ)`.
pub fn gse_gue_spacing_density(family: SpacingFamily, s: f64, lambda: f64) -> Result<f64> {
    let kind = match family {
        SpacingFamily::S1 => TransitionKind::GseToGueS1,
        SpacingFamily::S2 => TransitionKind::GseToGueS2,
    };
    transition_density(kind, s, lambda)
}

impl TryFrom<String> for TransitionKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TransitionKind> for String {
    fn from(k: TransitionKind) -> String {
        k.to_string()
    }
}

/// A coupling value including the two pure endpoints; serialized as a
/// number, or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CouplingRepr", into = "CouplingRepr")]
pub enum Coupling {
    Zero,
    Finite(f64),
    Infinite,
}

impl Coupling {
    /// Numeric value, with `∞` as `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Finite(l) => l,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("0"),
            Self::Finite(l) => write!(f, "{l}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Coupling {
    type Err = Error;

    /// `0` and `inf` (or `∞`) are the pure endpoints.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Self::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| Error::Domain(format!("not a coupling: {s:?}")))?;
        if v == 0.0 {
            Ok(Self::Zero)
        } else if v > 0.0 && v.is_finite() {
            Ok(Self::Finite(v))
        } else {
            domain(format!("coupling must be 0, positive or inf, got {s:?}"))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CouplingRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<CouplingRepr> for Coupling {
    type Error = Error;

    fn try_from(r: CouplingRepr) -> Result<Self> {
        match r {
            CouplingRepr::Number(v) => v.to_string().parse(),
            CouplingRepr::Text(t) => t.parse(),
        }
    }
}

impl From<Coupling> for CouplingRepr {
    fn from(c: Coupling) -> Self {
        match c {
            Coupling::Infinite => Self::Text("inf".into()),
            c => Self::Number(c.value()),
        }
    }
}

/// A ready-to-evaluate density: a pure law or a mixed one with constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Pure(u8),
    Mixed(SurmiseParams),
}

impl Density {
    /// Resolve `(kind, coupling)`, dispatching the pure endpoints.
    pub fn new(kind: TransitionKind, coupling: Coupling) -> Result<Self> {
        match (kind, coupling) {
            (TransitionKind::Pure(b), _) => {
                check_beta(b)?;
                Ok(Self::Pure(b))
            }
            (_, Coupling::Zero) => Ok(Self::Pure(kind.base_beta())),
            (_, Coupling::Infinite) => match kind.target_beta() {
                Some(b) => Ok(Self::Pure(b)),
                None => Ok(Self::Mixed(surmise_constants(kind, GSE_GUE_INFINITE_LAMBDA)?)),
            },
            (_, Coupling::Finite(l)) => Ok(Self::Mixed(surmise_constants(kind, l)?)),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        match self {
            Self::Pure(b) => wigner_density(*b, s),
            Self::Mixed(p) => p.density(s),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::numerics::{integrate_with_breakpoints, QuadratureSpec};

    /// `(∫P, ∫sP)` by adaptive quadrature, with breakpoints at the λ scale.
    pub fn moments(p: &SurmiseParams) -> (f64, f64) {
        let spec = QuadratureSpec::with_tolerances(1e-9, 1e-12);
        let l = p.lambda;
        let mut bps = vec![0.0];
        for x in [0.5 * l, l, 2.0 * l, 4.0 * l, 1.0, 2.0, 4.0] {
            if x > *bps.last().unwrap() && x <= 4.0 {
                bps.push(x);
            } else if x > 4.0 {
                break;
            }
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let n0 = integrate_with_breakpoints(|s| p.density(s).unwrap(), &bps, &spec).unwrap().value;
        let n1 = integrate_with_breakpoints(|s| s * p.density(s).unwrap(), &bps, &spec).unwrap().value;
        (n0, n1)
    }
}

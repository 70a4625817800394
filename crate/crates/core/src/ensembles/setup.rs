//! The large-matrix realization of each transition kind.

use serde::{Deserialize, Serialize};

use super::{DensityProfile, EnsembleSpec, MatrixModel, MixedSpec, Scaling};
use crate::spectra::{Family, Window};
use crate::surmise::TransitionKind;
use crate::{domain, Result};

/// Half-width of the default centre window for Gaussian bases, as a fraction
/// of the base's semicircle radius; the density there stays within 1.2% of
/// its centre value.
pub const CENTER_WINDOW_FRACTION: f64 = 0.15;

/// Centre window for Poisson bases with the unit-variance Gaussian profile.
pub const POISSON_CENTER_HALF_WIDTH: f64 = 0.2;

/// Everything needed to sample and measure one transition experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSetup {
    pub kind: TransitionKind,
    pub model: MixedSpec,
    /// Merge Kramers pairs before measuring.
    pub collapse: bool,
    pub family: Family,
    pub window: Window,
}

impl TransitionSetup {
    pub fn matrix_model(&self) -> MatrixModel {
        MatrixModel::Mixed(self.model.clone())
    }
}

/// `H_β + α H_β′` at `N` independent levels for a mixed `kind`.
///
/// Self-dual bases are doubled so they can be added to a GSE perturbation.
/// `perturbation_beta` replaces the GUE perturbation of the GSE→GUE kinds
/// (1 gives GSE→GOE); it is rejected elsewhere.
pub fn transition_setup(
    kind: TransitionKind,
    n: usize,
    capital_lambda: f64,
    scaling: Scaling,
    perturbation_beta: Option<u8>,
) -> Result<TransitionSetup> {
    let gaussian = EnsembleSpec::gaussian;
    let poisson = || EnsembleSpec::poisson(n, DensityProfile::GaussianUnitVariance);
    let (base, perturbation, collapse, family) = match kind {
        TransitionKind::PoissonToGoe => (poisson(), gaussian(1, n), false, Family::All),
        TransitionKind::PoissonToGue => (poisson(), gaussian(2, n), false, Family::All),
        TransitionKind::PoissonToGse => (poisson().self_dual(), gaussian(4, n), true, Family::All),
        TransitionKind::GoeToGue => (gaussian(1, n), gaussian(2, n), false, Family::All),
        TransitionKind::GoeToGse => (gaussian(1, n).self_dual(), gaussian(4, n), true, Family::All),
        TransitionKind::GueToGse => (gaussian(2, n).self_dual(), gaussian(4, n), true, Family::All),
        TransitionKind::GseToGueS1 | TransitionKind::GseToGueS2 => {
            let beta = perturbation_beta.unwrap_or(2);
            if !matches!(beta, 1 | 2) {
                return domain(format!("a non-self-dual perturbation must be GOE or GUE, got β = {beta}"));
            }
            let family = if kind == TransitionKind::GseToGueS1 { Family::S1 } else { Family::S2 };
            (gaussian(4, n), gaussian(beta, 2 * n), false, family)
        }
        TransitionKind::Pure(_) => return domain("a transition experiment needs a mixed kind"),
    };
    if perturbation_beta.is_some() && !matches!(kind, TransitionKind::GseToGueS1 | TransitionKind::GseToGueS2) {
        return domain(format!("the perturbation can only be replaced for the GSE→GUE kinds, not {kind}"));
    }
    let window = if base.beta == 0 {
        Window::centered(POISSON_CENTER_HALF_WIDTH)?
    } else {
        Window::centered(CENTER_WINDOW_FRACTION * base.spectral_radius())?
    };
    let model = MixedSpec { base, perturbation, capital_lambda, scaling };
    model.validate()?;
    Ok(TransitionSetup { kind, model, collapse, family, window })
}

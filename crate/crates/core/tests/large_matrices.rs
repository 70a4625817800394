//! Large-matrix properties of the samplers, spacing extraction and fits.

use std::f64::consts::SQRT_2;

use wigmix_core::ensembles::setup::transition_setup;
use wigmix_core::ensembles::small::small_oracle_spacings;
use wigmix_core::ensembles::{map_batch, sample_batch, DensityProfile, EnsembleSpec, MatrixModel, MixedSpec, Scaling};
use wigmix_core::fit::{delta2, delta2_histograms, density_table, fit_lambda, LambdaGrid};
use wigmix_core::spectra::{
    extract_batch, histogram, histogram_of, raw_spacings, Family, Histogram, Parity, SpacingSample, Window,
};
use wigmix_core::surmise::{wigner_density, TransitionKind};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[test]
fn semicircle_radius_at_n_400() {
    for beta in [1u8, 2, 4] {
        let spec = EnsembleSpec::gaussian(beta, 400);
        let spectra = sample_batch(&MatrixModel::Pure(spec.clone()), 4, 40 + beta as u64, false).unwrap();
        for s in &spectra {
            let edge = s.eigenvalues[0].abs().max(s.eigenvalues[s.eigenvalues.len() - 1].abs());
            let r = spec.spectral_radius();
            assert!((edge / r - 1.0).abs() < 0.03, "β={beta}: max |e| = {edge}, radius {r}");
        }
    }
}

#[test]
fn poisson_diagonal_spacings_are_exponential() {
    let spec = EnsembleSpec::poisson(400, DensityProfile::GaussianUnitVariance);
    let spectra = sample_batch(&MatrixModel::Pure(spec), 2000, 9, false).unwrap();
    let sample = extract_batch(&spectra, Window::centered(0.2).unwrap(), Family::All, Parity::Even).unwrap();
    let h = histogram(&sample, 60, 3.5).unwrap();
    let d = delta2(&h, |s| (-s).exp());
    assert!(d < 0.02, "Δ₂ = {d}");
}

/// Unit-mean intra-pair spacings of `H₄ + ε H_β′` over the whole spectrum.
fn split_spacings(perturbation_beta: u8, eps: f64, n: usize, count: usize, seed: u64) -> Histogram {
    let model = MatrixModel::Mixed(MixedSpec {
        base: EnsembleSpec::gaussian(4, n),
        perturbation: EnsembleSpec::gaussian(perturbation_beta, 2 * n),
        capital_lambda: 0.0,
        scaling: Scaling::Raw(eps),
    });
    let everything = Window::centered(1e6).unwrap();
    let raw = map_batch(&model, count, seed, false, |_, s| raw_spacings(&s, everything, Family::S1, Parity::Even))
        .unwrap()
        .concat();
    histogram(&SpacingSample::from_raw(raw, everything, Family::S1).unwrap(), 60, 3.5).unwrap()
}

#[test]
fn first_order_splittings_follow_gue_surmise() {
    let h = split_spacings(2, 1e-4, 50, 2000, 11);
    assert!(h.total_count >= 100_000);
    let d = delta2(&h, |s| wigner_density(2, s).unwrap());
    assert!(d < 0.02, "Δ₂ = {d}");
}

/// Two empirical histograms differ by Δ₂ ≈ √(2/(n·w)) from noise alone, so
/// 4·10⁵ pairs per side keep that near 0.01.
#[test]
fn goe_splittings_match_gue_at_reduced_strength() {
    let goe = split_spacings(1, 1e-4, 200, 2000, 12);
    let gue = split_spacings(2, 1e-4 / SQRT_2, 200, 2000, 13);
    let d = delta2_histograms(&goe, &gue).unwrap();
    assert!(d < 0.02, "Δ₂ = {d}");
}

#[test]
fn fitted_lambda_is_stable_under_rebinning() {
    let setup = transition_setup(TransitionKind::GoeToGue, 200, 0.4, Scaling::DensityMatched, None).unwrap();
    let w = setup.window;
    let raw =
        map_batch(&setup.matrix_model(), 10_000, 21, false, |_, s| raw_spacings(&s, w, Family::All, Parity::Even))
            .unwrap()
            .concat();
    let sample = SpacingSample::from_raw(raw, w, Family::All).unwrap();
    let coarse = fit_lambda(&histogram(&sample, 30, 3.5).unwrap(), TransitionKind::GoeToGue).unwrap();
    let fine = fit_lambda(&histogram(&sample, 120, 3.5).unwrap(), TransitionKind::GoeToGue).unwrap();
    let steps = coarse.grid_index.abs_diff(fine.grid_index);
    assert!(steps <= 2, "λ* {} (30 bins) vs {} (120 bins)", coarse.lambda_star, fine.lambda_star);
}

#[test]
fn fit_is_deterministic_and_delta2_is_unimodal_in_lambda() {
    let spacings = small_oracle_spacings(TransitionKind::GoeToGue, 0.2, 1_000_000, 31).unwrap();
    let h = histogram_of(&spacings, 60, 3.5).unwrap();
    let a = fit_lambda(&h, TransitionKind::GoeToGue).unwrap();
    let b = fit_lambda(&h, TransitionKind::GoeToGue).unwrap();
    assert_eq!(a.grid_index, b.grid_index);
    assert_eq!(a.delta2, b.delta2);

    let grid = LambdaGrid::standard();
    let centers = h.centers();
    let curve: Vec<f64> = (0..grid.len())
        .map(|i| {
            let table = density_table(TransitionKind::GoeToGue, grid.coupling(i), &centers).unwrap();
            let sq: f64 = h.densities.iter().zip(&table).zip(h.widths()).map(|((d, p), w)| (d - p).powi(2) * w).sum();
            sq.sqrt()
        })
        .collect();
    let argmin = (0..curve.len()).min_by(|&i, &j| curve[i].total_cmp(&curve[j])).unwrap();
    assert_eq!(argmin, a.grid_index);
    assert!((curve[argmin] - a.delta2).abs() < 1e-12);
    assert!(curve[..=argmin].windows(2).all(|w| w[0] >= w[1]), "Δ₂ not decreasing before the minimum");
    assert!(curve[argmin..].windows(2).all(|w| w[0] <= w[1]), "Δ₂ not increasing after the minimum");
    let l = a.lambda_star.value();
    assert!((l / 0.2 - 1.0).abs() < 0.03, "λ* = {l}");
}

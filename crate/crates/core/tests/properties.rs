//! Randomized invariants across the numerics, ensembles, spectra and fit layers.

use proptest::prelude::*;
use wigmix_core::ensembles::{build_mixed, job_rng, EnsembleSpec, MixedSpec, Scaling, Spectrum};
use wigmix_core::fit::{delta2, linear_fit_through_origin, LambdaGrid};
use wigmix_core::numerics::special::{erf_family, sine_integral};
use wigmix_core::spectra::{
    extract_batch, histogram, histogram_of, local_density, raw_spacings, read_spectra, write_spectra, Family, Parity,
    Window,
};
use wigmix_core::surmise::Coupling;

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(-10.0f64..10.0, 2..80).prop_map(Spectrum::new)
}

fn batch() -> impl Strategy<Value = Vec<Spectrum>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 20..60).prop_map(Spectrum::new), 1..8)
}

proptest! {
    #[test]
    fn erf_plus_erfc_is_one(x in -30.0f64..30.0) {
        let (erf, erfc, _) = erf_family(x);
        prop_assert!((erf + erfc - 1.0).abs() < 1e-14);
        let (erf_neg, erfc_neg, _) = erf_family(-x);
        prop_assert_eq!(erf_neg, -erf);
        prop_assert!((erfc_neg - (2.0 - erfc)).abs() < 1e-15);
    }

    #[test]
    fn sine_integral_is_odd(x in 0.0f64..200.0) {
        prop_assert_eq!(sine_integral(-x), -sine_integral(x));
    }

    #[test]
    fn histogram_mass_plus_overflow_is_one(
        values in prop::collection::vec(0.0f64..6.0, 1..400),
        bins in 10usize..100,
        s_max in 1.0f64..5.0,
    ) {
        let h = histogram_of(&values, bins, s_max).unwrap();
        let mass: f64 = h.densities.iter().zip(h.widths()).map(|(d, w)| d * w).sum();
        prop_assert!((mass + h.overflow_fraction() - 1.0).abs() < 1e-12);
        prop_assert_eq!(h.total_count, values.len());
    }

    #[test]
    fn s1_and_s2_partition_all_spacings(s in spectrum(), lo in -12.0f64..0.0, width in 0.1f64..24.0) {
        let w = Window::new(lo, lo + width).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let all = raw_spacings(&s, w, Family::All, parity).len();
            let s1 = raw_spacings(&s, w, Family::S1, parity).len();
            let s2 = raw_spacings(&s, w, Family::S2, parity).len();
            prop_assert_eq!(s1 + s2, all);
        }
    }

    #[test]
    fn batch_mean_is_one_pass_mean(spectra in batch()) {
        let w = Window::new(-4.0, 4.0).unwrap();
        let sample = extract_batch(&spectra, w, Family::All, Parity::Even).unwrap();
        let raw: Vec<f64> = spectra.iter().flat_map(|s| raw_spacings(s, w, Family::All, Parity::Even)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        prop_assert!((sample.raw_mean - mean).abs() <= 1e-12 * mean);
        let unit: f64 = sample.spacings.iter().sum::<f64>() / sample.count as f64;
        prop_assert!((unit - 1.0).abs() < 1e-12);
    }

    /// Powers of two rescale exactly in binary floating point, so the
    /// normalized spacings and their bin assignment must not move at all.
    #[test]
    fn histogram_ignores_global_rescaling(spectra in batch(), k in -6i32..6) {
        let c = 2f64.powi(k);
        let w = Window::new(-4.0, 4.0).unwrap();
        let scaled: Vec<Spectrum> =
            spectra.iter().map(|s| Spectrum::new(s.eigenvalues.iter().map(|x| x * c).collect())).collect();
        let ws = Window::new(-4.0 * c, 4.0 * c).unwrap();
        let a = histogram(&extract_batch(&spectra, w, Family::All, Parity::Even).unwrap(), 60, 3.5).unwrap();
        let b = histogram(&extract_batch(&scaled, ws, Family::All, Parity::Even).unwrap(), 60, 3.5).unwrap();
        prop_assert_eq!(a.densities, b.densities);
    }

    #[test]
    fn density_windows_partition_the_range(spectra in batch(), m in 1usize..30) {
        let range = Window::new(-3.0, 3.0).unwrap();
        let scan = local_density(&spectra, range, m).unwrap();
        for pair in scan.windows.windows(2) {
            prop_assert_eq!(pair[0].hi, pair[1].lo);
        }
        prop_assert_eq!(scan.windows[0].lo, range.lo);
        prop_assert_eq!(scan.windows[m - 1].hi, range.hi);
        let total: f64 = scan.rho.iter().zip(&scan.windows).map(|(r, w)| r * w.width()).sum::<f64>() * spectra.len() as f64;
        let inside = spectra.iter().flat_map(|s| &s.eigenvalues).filter(|&&x| range.contains(x)).count();
        prop_assert!((total - inside as f64).abs() < 1e-9 * (1.0 + inside as f64));
    }

    #[test]
    fn spectrum_file_round_trip(spectra in batch()) {
        let mut buf = Vec::new();
        write_spectra(&mut buf, &spectra).unwrap();
        let back = read_spectra(buf.as_slice(), "memory").unwrap();
        prop_assert_eq!(back.spectra.len(), spectra.len());
        for (a, b) in back.spectra.iter().zip(&spectra) {
            prop_assert_eq!(&a.eigenvalues, &b.eigenvalues);
        }
    }

    #[test]
    fn relative_delta_is_scale_free(
        points in prop::collection::vec((0.1f64..10.0, 0.01f64..5.0), 3..30),
        c in 0.01f64..100.0,
    ) {
        let fit = linear_fit_through_origin(&points).unwrap();
        let lam_scaled: Vec<(f64, f64)> = points.iter().map(|&(r, l)| (r, c * l)).collect();
        let rho_scaled: Vec<(f64, f64)> = points.iter().map(|&(r, l)| (c * r, l)).collect();
        let a = linear_fit_through_origin(&lam_scaled).unwrap();
        let b = linear_fit_through_origin(&rho_scaled).unwrap();
        prop_assert!((a.delta2_rel - fit.delta2_rel).abs() < 1e-10 * (1.0 + fit.delta2_rel));
        prop_assert!((b.delta2_rel - fit.delta2_rel).abs() < 1e-10 * (1.0 + fit.delta2_rel));
        prop_assert!((a.slope - c * fit.slope).abs() < 1e-10 * a.slope.abs());
        prop_assert!((b.slope - fit.slope / c).abs() < 1e-10 * fit.slope.abs() / c);
    }

    #[test]
    fn slope_minimizes_squared_deviation(
        points in prop::collection::vec((0.1f64..10.0, 0.01f64..5.0), 3..30),
        eps in prop_oneof![-1e-3f64..-1e-6, 1e-6f64..1e-3],
    ) {
        let k = linear_fit_through_origin(&points).unwrap().slope;
        let sse = |k: f64| points.iter().map(|(r, l)| (l - k * r).powi(2)).sum::<f64>();
        prop_assert!(sse(k) <= sse(k * (1.0 + eps)));
    }

    #[test]
    fn delta2_is_non_negative(values in prop::collection::vec(0.0f64..4.0, 1..300)) {
        let h = histogram_of(&values, 60, 3.5).unwrap();
        prop_assert!(delta2(&h, |s| (-s).exp()) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn self_dual_mixtures_stay_self_dual(seed in any::<u64>(), n in 2usize..12, base_beta in 1u8..=2) {
        let base = EnsembleSpec::gaussian(base_beta, n).self_dual();
        let spec = MixedSpec {
            base,
            perturbation: EnsembleSpec::gaussian(4, n),
            capital_lambda: 0.3,
            scaling: Scaling::DensityMatched,
        };
        let m = build_mixed(&spec, &mut job_rng(seed, 0)).unwrap();
        prop_assert!(m.self_duality_defect() < 1e-12 * (1.0 + m.max_abs()));
        prop_assert!(m.hermiticity_defect() == 0.0);
    }
}

#[test]
fn lambda_grid_is_strictly_increasing_with_pure_endpoints() {
    let g = LambdaGrid::standard();
    assert_eq!(g.coupling(0), Coupling::Zero);
    assert_eq!(g.coupling(g.len() - 1), Coupling::Infinite);
    let finite: Vec<f64> = (1..g.len() - 1).map(|i| g.coupling(i).value()).collect();
    assert!(finite[0] > 0.0);
    assert!(finite.windows(2).all(|w| w[0] < w[1]));
}

use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;
use wigmix_core::ensembles::setup::{transition_setup, TransitionSetup};
use wigmix_core::ensembles::{map_batch, sample_batch, DensityProfile, MatrixModel, Scaling};
use wigmix_core::fit::{density_coupling_scan, fit_lambda, ScanSetup};
use wigmix_core::spectra::{
    extract_batch, histogram, raw_spacings, Family, Histogram, Parity, SpacingSample, Window, DEFAULT_BINS,
    DEFAULT_S_MAX,
};
use wigmix_core::surmise::{
    fourier_gibbs_overshoot, gibbs_limit, gibbs_maximum, large_s_asymptote, small_s_asymptote, Coupling, Density,
    TransitionKind,
};

use crate::config::{
    load_section, preset_sizes, Common, EvalArgs, FamilyArg, FitExternalArgs, GibbsArgs, ProfileArg, ScanArgs,
    TransitionArgs, WindowArg, DEFAULT_BUDGET_SECONDS, DEFAULT_OUT, DEFAULT_SEED,
};
use crate::output::{to_value, Output};
use crate::Failure;

fn invalid<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Validation(msg.into()))
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn file_tag(kind: TransitionKind, coupling: Coupling) -> String {
    format!("{kind}_lambda{coupling}")
}

/// Seconds per matrix for a `dim × dim` Hermitian eigenproblem on one core,
/// calibrated on the bundled eigensolver.
fn seconds_per_matrix(dim: usize, complex: bool) -> f64 {
    let c = if complex { 1.2e-9 } else { 0.7e-9 };
    c * (dim as f64).powi(3) + 1e-6
}

fn check_budget(model: &MatrixModel, count: usize, budget: f64) -> Result<f64, Failure> {
    let complex = match model {
        MatrixModel::Pure(s) => s.beta >= 2,
        MatrixModel::Mixed(m) => m.base.beta >= 2 || m.perturbation.beta >= 2,
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as f64;
    let estimate = count as f64 * seconds_per_matrix(model.dim(), complex) / threads;
    if estimate > budget {
        return Err(Failure::Budget(format!(
            "estimated {estimate:.0} s for {count} matrices of dimension {} exceeds the budget of {budget:.0} s \
             (raise --budget-seconds)",
            model.dim()
        )));
    }
    Ok(estimate)
}

fn histogram_rows(h: &Histogram) -> Vec<Vec<f64>> {
    h.centers().iter().zip(&h.densities).map(|(&s, &d)| vec![s, d]).collect()
}

#[derive(Debug, Serialize)]
struct EvalConfig {
    kind: TransitionKind,
    lambda: Vec<Coupling>,
    s_max: f64,
    points: usize,
    asymptotes: bool,
}

pub fn eval(common: &Common, args: EvalArgs) -> Result<(), Failure> {
    let a = args.or(load_section(common.config.as_deref(), "eval")?);
    let Some(kind) = a.kind.map(|k| k.0) else { return invalid("--kind is required") };
    let lambda: Vec<Coupling> = match (kind, a.lambda) {
        (TransitionKind::Pure(_), _) => vec![Coupling::Zero],
        (_, Some(l)) if !l.0.is_empty() => l.0,
        _ => return invalid(format!("--lambda is required for {kind}")),
    };
    let cfg = EvalConfig {
        kind,
        lambda,
        s_max: a.s_max.unwrap_or(4.0),
        points: a.points.unwrap_or(401),
        asymptotes: a.asymptotes.unwrap_or(false),
    };
    if !(cfg.s_max > 0.0) || !cfg.s_max.is_finite() || cfg.points < 2 {
        return invalid("--s-max must be > 0 and --points ≥ 2");
    }
    let densities: Vec<Density> = cfg.lambda.iter().map(|&c| Density::new(kind, c)).collect::<Result<_, _>>()?;
    let mut out = Output::create(&out_dir(common), "eval", &cfg)?;
    let mut summary = Vec::new();
    for (&coupling, density) in cfg.lambda.iter().zip(&densities) {
        // Asymptotes of a pure endpoint are those of the pure law.
        let (akind, alambda) = match density {
            Density::Pure(b) => (TransitionKind::Pure(*b), 0.0),
            Density::Mixed(p) => (kind, p.lambda),
        };
        let report = small_s_asymptote(akind, alambda)?;
        let mut rows = Vec::with_capacity(cfg.points);
        for i in 0..cfg.points {
            let s = cfg.s_max * i as f64 / (cfg.points - 1) as f64;
            let mut row = vec![s, density.eval(s)?];
            if cfg.asymptotes {
                row.push(report.small_s_coefficient * s.powi(report.small_s_power as i32));
                row.push(if s > 0.0 { large_s_asymptote(akind, s, alambda).unwrap_or(f64::NAN) } else { f64::NAN });
            }
            rows.push(row);
        }
        let columns: &[&str] = if cfg.asymptotes {
            &["s", "density", "small_s_asymptote", "large_s_asymptote"]
        } else {
            &["s", "density"]
        };
        out.table(&format!("eval_{}.dat", file_tag(kind, coupling)), columns, &rows)?;
        let constants = match density {
            Density::Mixed(p) => json!({ "c": p.c, "d": p.d, "lambda_used": p.lambda }),
            Density::Pure(b) => json!({ "pure_beta": b }),
        };
        summary.push(json!({ "lambda": coupling, "constants": constants, "asymptotes": to_value(&report) }));
    }
    out.document("eval.json", json!(summary))?;
    out.report();
    Ok(())
}

#[derive(Debug, Serialize)]
struct TransitionConfig {
    kind: TransitionKind,
    fit_kind: TransitionKind,
    scaling: Scaling,
    capital_lambda: f64,
    n: usize,
    count: usize,
    window: Window,
    family: Family,
    bins: usize,
    s_max: f64,
    seed: u64,
    perturbation_beta: Option<u8>,
    budget_seconds: f64,
}

pub fn transition(common: &Common, args: TransitionArgs) -> Result<(), Failure> {
    let a = args.or(load_section(common.config.as_deref(), "transition")?);
    let (n0, count0) = preset_sizes(common.preset);
    let Some(kind) = a.kind.map(|k| k.0) else { return invalid("--kind is required") };
    if !kind.is_mixed() {
        return invalid(format!("transition needs a mixed kind, got {kind}"));
    }
    let (scaling, capital_lambda) = match (a.alpha, a.capital_lambda) {
        (Some(alpha), _) => (Scaling::Raw(alpha), a.capital_lambda.unwrap_or(f64::NAN)),
        (None, Some(l)) => (Scaling::DensityMatched, l),
        (None, None) => return invalid("one of --capital-lambda or --alpha is required"),
    };
    let count = a.count.unwrap_or(count0);
    if count == 0 {
        return invalid("--count must be positive");
    }
    let n = a.n.unwrap_or(n0);
    let setup: TransitionSetup = transition_setup(kind, n, capital_lambda.max(0.0), scaling, a.perturbation_beta)?;
    let cfg = TransitionConfig {
        kind,
        fit_kind: a.fit_kind.map(|k| k.0).unwrap_or(kind),
        scaling,
        capital_lambda,
        n,
        count,
        window: a.window.map(|w| w.0).unwrap_or(setup.window),
        family: a.family.map(Family::from).unwrap_or(setup.family),
        bins: a.bins.unwrap_or(DEFAULT_BINS),
        s_max: a.s_max.unwrap_or(DEFAULT_S_MAX),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        perturbation_beta: a.perturbation_beta,
        budget_seconds: a.budget_seconds.unwrap_or(DEFAULT_BUDGET_SECONDS),
    };
    if cfg.bins < 10 || !(cfg.s_max > 0.0) {
        return invalid("--bins must be ≥ 10 and --s-max > 0");
    }
    let model = setup.matrix_model();
    let estimate = check_budget(&model, count, cfg.budget_seconds)?;
    let alpha = setup.model.alpha()?;
    eprintln!("sampling {count} matrices of dimension {} (α = {alpha:e}, about {estimate:.0} s)", model.dim());
    let parts = map_batch(&model, count, cfg.seed, setup.collapse, |_, s| {
        raw_spacings(&s, cfg.window, cfg.family, Parity::Even)
    })?;
    let sample = SpacingSample::from_raw(parts.concat(), cfg.window, cfg.family)?;
    let hist = histogram(&sample, cfg.bins, cfg.s_max)?;
    let fit = fit_lambda(&hist, cfg.fit_kind)?;
    let best = Density::new(cfg.fit_kind, fit.lambda_star)?;
    let overlay: Vec<Vec<f64>> = hist
        .centers()
        .iter()
        .zip(&hist.densities)
        .map(|(&s, &h)| Ok(vec![s, h, best.eval(s)?]))
        .collect::<Result<_, wigmix_core::Error>>()?;

    let mut out = Output::create(&out_dir(common), "transition", &cfg)?;
    out.table("histogram.dat", &["s", "density"], &histogram_rows(&hist))?;
    out.table("overlay.dat", &["s", "histogram", "fitted_density"], &overlay)?;
    out.document(
        "fit.json",
        json!({
            "fit": to_value(&fit),
            "alpha": alpha,
            "spacings": sample.count,
            "raw_mean_spacing": sample.raw_mean,
            "histogram": { "total_count": hist.total_count, "overflow_count": hist.overflow_count },
            "collapsed_kramers_pairs": setup.collapse,
        }),
    )?;
    println!("{} lambda* = {} delta2 = {:.5}", cfg.fit_kind, fit.lambda_star, fit.delta2);
    out.report();
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScanConfig {
    kind: TransitionKind,
    profile: Option<ProfileArg>,
    alpha: f64,
    n: usize,
    count: usize,
    windows: usize,
    range: Window,
    bins: usize,
    s_max: f64,
    seed: u64,
    budget_seconds: f64,
}

pub fn density_scan(common: &Common, args: ScanArgs) -> Result<(), Failure> {
    let a = args.or(load_section(common.config.as_deref(), "density-scan")?);
    let (n0, count0) = preset_sizes(common.preset);
    let Some(kind) = a.kind.map(|k| k.0) else { return invalid("--kind is required") };
    let Some(alpha) = a.alpha else { return invalid("--alpha is required") };
    let windows = a.windows.unwrap_or(35);
    if windows < 2 {
        return invalid(format!("a density scan needs at least 2 windows, got {windows}"));
    }
    let count = a.count.unwrap_or(count0);
    if count == 0 {
        return invalid("--count must be positive");
    }
    let n = a.n.unwrap_or(n0);
    let mut setup = transition_setup(kind, n, 0.0, Scaling::Raw(alpha), None)?;
    if setup.family != Family::All {
        return invalid("density scans use all spacings; the gse-gue kinds are not supported");
    }
    let profile = if setup.model.base.beta == 0 {
        let p = a.profile.unwrap_or(ProfileArg::Cubic);
        setup.model.base.profile = Some(match p {
            ProfileArg::Cubic => DensityProfile::CubicOnInterval,
            ProfileArg::Gaussian => DensityProfile::GaussianUnitVariance,
        });
        Some(p)
    } else if a.profile.is_some() {
        return invalid(format!("--profile applies to Poisson bases only, not {kind}"));
    } else {
        None
    };
    let default_range = match profile {
        Some(ProfileArg::Cubic) => Window::centered(0.5 * n as f64)?,
        Some(ProfileArg::Gaussian) => Window::centered(2.5)?,
        None => Window::centered(0.9 * setup.model.base.spectral_radius())?,
    };
    let cfg = ScanConfig {
        kind,
        profile,
        alpha,
        n,
        count,
        windows,
        range: a.range.map(|w| w.0).unwrap_or(default_range),
        bins: a.bins.unwrap_or(DEFAULT_BINS),
        s_max: a.s_max.unwrap_or(DEFAULT_S_MAX),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        budget_seconds: a.budget_seconds.unwrap_or(DEFAULT_BUDGET_SECONDS),
    };
    let model = setup.matrix_model();
    model.validate()?;
    let estimate = check_budget(&model, count, cfg.budget_seconds)?;
    eprintln!("sampling {count} matrices of dimension {} (about {estimate:.0} s)", model.dim());
    let spectra = sample_batch(&model, count, cfg.seed, setup.collapse)?;
    let scan_setup = ScanSetup {
        range: cfg.range,
        windows: cfg.windows,
        bins: cfg.bins,
        s_max: cfg.s_max,
        family: Family::All,
        parity: Parity::Even,
    };
    let result = density_coupling_scan(&spectra, kind, &scan_setup)?;
    let slope = result.linear.as_ref().map(|l| l.slope).unwrap_or(f64::NAN);
    let rows: Vec<Vec<f64>> = result
        .scan
        .windows
        .iter()
        .zip(&result.scan.rho)
        .zip(&result.scan.lambda_fit)
        .map(|((w, &rho), l)| vec![w.lo, w.hi, rho, l.unwrap_or(f64::NAN), slope * rho])
        .collect();
    let mut out = Output::create(&out_dir(common), "density-scan", &cfg)?;
    out.table("scan.dat", &["window_lo", "window_hi", "rho", "lambda_fit", "lambda_linear"], &rows)?;
    out.document(
        "scan.json",
        json!({
            "scan": to_value(&result),
            "confidence_method": "bootstrap over windows",
        }),
    )?;
    match &result.linear {
        Some(l) => println!(
            "slope = {:.5} (95% CI {:.5}..{:.5}), delta2 = {:.4}, alpha = {alpha}",
            l.slope, l.confidence.0, l.confidence.1, l.delta2_rel
        ),
        None => println!("no linear fit: {}", result.linear_error.as_deref().unwrap_or("unknown")),
    }
    out.report();
    Ok(())
}

#[derive(Debug, Serialize)]
struct GibbsConfig {
    points: usize,
    s_max: f64,
}

pub fn gibbs(common: &Common, args: GibbsArgs) -> Result<(), Failure> {
    let a = args.or(load_section(common.config.as_deref(), "gibbs")?);
    let cfg = GibbsConfig { points: a.points.unwrap_or(401), s_max: a.s_max.unwrap_or(12.0) };
    if cfg.points < 2 || !(cfg.s_max > 0.0) {
        return invalid("--points must be ≥ 2 and --s-max > 0");
    }
    let kinds = [TransitionKind::PoissonToGoe, TransitionKind::PoissonToGue, TransitionKind::PoissonToGse];
    let mut maxima = Vec::new();
    for kind in kinds {
        let (s, v) = gibbs_maximum(kind)?;
        println!("{kind}: s_max = {s:.5}, value = {v:.5}");
        maxima.push(json!({ "kind": kind, "s_tilde_max": s, "value": v }));
    }
    let overshoot = fourier_gibbs_overshoot();
    println!("fourier overshoot: {overshoot:.7}");
    let mut rows = Vec::with_capacity(cfg.points);
    for i in 0..cfg.points {
        let s = cfg.s_max * i as f64 / (cfg.points - 1) as f64;
        let mut row = vec![s];
        for kind in kinds {
            row.push(gibbs_limit(kind, s)?);
        }
        rows.push(row);
    }
    let mut out = Output::create(&out_dir(common), "gibbs", &cfg)?;
    out.table("gibbs.dat", &["s_tilde", "poisson-goe", "poisson-gue", "poisson-gse"], &rows)?;
    out.document("gibbs.json", json!({ "maxima": maxima, "fourier_overshoot": overshoot }))?;
    out.report();
    Ok(())
}

#[derive(Debug, Serialize)]
struct FitExternalConfig {
    file: PathBuf,
    kinds: Vec<TransitionKind>,
    window: Option<Window>,
    family: Family,
    parity: Option<Parity>,
    bins: usize,
    s_max: f64,
}

fn default_kinds() -> Vec<TransitionKind> {
    let mut k: Vec<TransitionKind> = [0, 1, 2, 4].into_iter().map(TransitionKind::Pure).collect();
    k.extend(TransitionKind::MIXED);
    k
}

pub fn fit_external(common: &Common, args: FitExternalArgs) -> Result<(), Failure> {
    let a = args.or(load_section(common.config.as_deref(), "fit-external")?);
    let Some(file) = a.file else { return invalid("--file is required") };
    let family: Family = a.family.unwrap_or(FamilyArg::All).into();
    let parity = a.parity.map(Parity::from);
    if family != Family::All && parity.is_none() {
        return invalid("--parity even|odd is required with --family s1 or s2; the pairing origin is not guessed");
    }
    let cfg = FitExternalConfig {
        file,
        kinds: a.kinds.map(|l| l.0).unwrap_or_else(default_kinds),
        window: a.window.map(|w: WindowArg| w.0),
        family,
        parity,
        bins: a.bins.unwrap_or(DEFAULT_BINS),
        s_max: a.s_max.unwrap_or(DEFAULT_S_MAX),
    };
    if cfg.kinds.is_empty() {
        return invalid("--kinds is empty");
    }
    let ingested = wigmix_core::spectra::ingest_spectrum_file(&cfg.file)?;
    if ingested.unsorted_groups > 0 {
        eprintln!("warning: {} spectra were not sorted in the file and have been sorted", ingested.unsorted_groups);
    }
    let window = cfg.window.unwrap_or(Window { lo: f64::MIN, hi: f64::MAX });
    let sample = extract_batch(&ingested.spectra, window, cfg.family, cfg.parity.unwrap_or(Parity::Even))?;
    let hist = histogram(&sample, cfg.bins, cfg.s_max)?;
    let mut fits = cfg.kinds.iter().map(|&k| fit_lambda(&hist, k)).collect::<Result<Vec<_>, _>>()?;
    // Stable: on equal Δ₂ the earlier kind (pure ones by default) ranks first.
    fits.sort_by(|a, b| a.delta2.total_cmp(&b.delta2));
    let mut out = Output::create(&out_dir(common), "fit-external", &cfg)?;
    out.table("histogram.dat", &["s", "density"], &histogram_rows(&hist))?;
    out.document(
        "fit_external.json",
        json!({
            "ranked": to_value(&fits),
            "best": { "kind": fits[0].kind, "lambda": fits[0].lambda_star, "delta2": fits[0].delta2 },
            "spectra": ingested.spectra.len(),
            "unsorted_groups": ingested.unsorted_groups,
            "spacings": sample.count,
        }),
    )?;
    for f in &fits {
        println!("{:<12} lambda* = {:<12} delta2 = {:.5}", f.kind.to_string(), f.lambda_star.to_string(), f.delta2);
    }
    out.report();
    Ok(())
}

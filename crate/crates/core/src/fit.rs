//! Grid fit of the coupling `λ` to a spacing histogram, and the linear
//! density–coupling model `λ = k ρ`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::Spectrum;
use crate::spectra::{extract_batch, histogram, local_density, DensityScan, Family, Histogram, Parity, Window};
use crate::surmise::{Coupling, Density, TransitionKind};
use crate::{domain, Error, Result};

/// `λᵢ = 0.01·1000^{(i−1)/999}`, `i = 1…1000`, between the pure endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub values: Vec<f64>,
}

impl LambdaGrid {
    pub fn standard() -> Self {
        Self { values: (0..1000).map(|i| 0.01 * 1000f64.powf(i as f64 / 999.0)).collect() }
    }

    /// Number of grid points including both endpoints.
    pub fn len(&self) -> usize {
        self.values.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point `index`: 0 is `λ = 0`, `len − 1` is `λ = ∞`.
    pub fn coupling(&self, index: usize) -> Coupling {
        if index == 0 {
            Coupling::Zero
        } else if index > self.values.len() {
            Coupling::Infinite
        } else {
            Coupling::Finite(self.values[index - 1])
        }
    }
}

/// Discrete L₂ distance `√(Σ (hᵢ − P(sᵢ))² wᵢ)` over bin centers.
pub fn delta2<F: Fn(f64) -> f64>(hist: &Histogram, density: F) -> f64 {
    hist.centers()
        .iter()
        .zip(hist.widths())
        .zip(&hist.densities)
        .map(|((&s, w), &h)| (h - density(s)).powi(2) * w)
        .sum::<f64>()
        .sqrt()
}

/// [`delta2`] against a tabulated density at the bin centers.
pub fn delta2_table(hist: &Histogram, table: &[f64]) -> f64 {
    hist.widths().iter().zip(&hist.densities).zip(table).map(|((w, h), p)| (h - p).powi(2) * w).sum::<f64>().sqrt()
}

/// Distance between two histograms on the same bins.
pub fn delta2_histograms(a: &Histogram, b: &Histogram) -> Result<f64> {
    if !a.same_binning(b) {
        return domain("histograms have different binning");
    }
    Ok(delta2_table(a, &b.densities))
}

/// Density of `kind` at each bin center.
pub fn density_table(kind: TransitionKind, coupling: Coupling, centers: &[f64]) -> Result<Vec<f64>> {
    let d = Density::new(kind, coupling)?;
    centers.iter().map(|&s| d.eval(s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: TransitionKind,
    pub lambda_star: Coupling,
    pub grid_index: usize,
    pub delta2: f64,
    /// `(λ, Δ₂)` at the grid points on either side of the minimum.
    pub neighbors: Vec<(Coupling, f64)>,
    /// Grid points skipped because the density could not be evaluated.
    pub invalid_points: Vec<usize>,
}

type TableKey = (TransitionKind, usize, Vec<u64>);

/// Per-`(kind, λ index, bin centers)` density tables.
///
/// Concurrent misses may compute the same table twice; both writers store
/// identical values.
#[derive(Default)]
pub struct FitCache {
    tables: RwLock<HashMap<TableKey, Option<Arc<Vec<f64>>>>>,
}

impl FitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tables.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn table(&self, kind: TransitionKind, grid: &LambdaGrid, index: usize, centers: &[f64]) -> Option<Arc<Vec<f64>>> {
        let key = (kind, index, centers.iter().map(|c| c.to_bits()).collect::<Vec<_>>());
        if let Some(t) = self.tables.read().unwrap().get(&key) {
            return t.clone();
        }
        let t = density_table(kind, grid.coupling(index), centers).ok().filter(|t| t.iter().all(|v| v.is_finite()));
        let t = t.map(Arc::new);
        self.tables.write().unwrap().insert(key, t.clone());
        t
    }
}

/// Process-wide cache used by [`fit_lambda`].
pub fn global_cache() -> &'static FitCache {
    static CACHE: OnceLock<FitCache> = OnceLock::new();
    CACHE.get_or_init(FitCache::new)
}

/// Grid minimizer of `Δ₂` for `kind` over the standard grid.
pub fn fit_lambda(hist: &Histogram, kind: TransitionKind) -> Result<FitResult> {
    fit_lambda_with(hist, kind, &LambdaGrid::standard(), global_cache())
}

pub fn fit_lambda_with(
    hist: &Histogram,
    kind: TransitionKind,
    grid: &LambdaGrid,
    cache: &FitCache,
) -> Result<FitResult> {
    let mass: f64 = hist.densities.iter().zip(hist.widths()).map(|(d, w)| d * w).sum();
    if (mass + hist.overflow_fraction() - 1.0).abs() > 1e-9 {
        return domain(format!("histogram is not normalized (mass {mass})"));
    }
    let centers = hist.centers();
    let indices: Vec<usize> = if kind.is_mixed() { (0..grid.len()).collect() } else { vec![0] };
    let scores: Vec<Option<f64>> =
        indices.par_iter().map(|&i| cache.table(kind, grid, i, &centers).map(|t| delta2_table(hist, &t))).collect();
    let invalid: Vec<usize> = indices.iter().zip(&scores).filter(|(_, s)| s.is_none()).map(|(&i, _)| i).collect();
    let (best, d2) = scores
        .iter()
        .enumerate()
        .filter_map(|(k, s)| s.map(|v| (k, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Optimizer(format!("no grid point could be evaluated for {kind}")))?;
    let mut neighbors = Vec::new();
    for k in [best.wrapping_sub(1), best + 1] {
        if let Some(Some(v)) = scores.get(k) {
            neighbors.push((grid.coupling(indices[k]), *v));
        }
    }
    let index = indices[best];
    let lambda_star = if kind.is_mixed() { grid.coupling(index) } else { Coupling::Zero };
    Ok(FitResult { kind, lambda_star, grid_index: index, delta2: d2, neighbors, invalid_points: invalid })
}

/// `λ ≈ k ρ` fitted through the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    /// `δ₂ = √(Σ(λᵢ − kρᵢ)²/N) / (Σλⱼ/N)`.
    pub delta2_rel: f64,
    /// 95% interval of the slope from resampling windows.
    pub confidence: (f64, f64),
    pub bootstrap_resamples: usize,
    pub points: usize,
}

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
const BOOTSTRAP_SEED: u64 = 0x5eed_b007;

fn slope_and_delta(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let srl: f64 = points.iter().map(|(r, l)| r * l).sum();
    let srr: f64 = points.iter().map(|(r, _)| r * r).sum();
    let sl: f64 = points.iter().map(|(_, l)| l).sum();
    if srr == 0.0 || sl == 0.0 {
        return None;
    }
    let k = srl / srr;
    let n = points.len() as f64;
    let rms = (points.iter().map(|(r, l)| (l - k * r).powi(2)).sum::<f64>() / n).sqrt();
    Some((k, rms / (sl / n)))
}

pub fn linear_fit_through_origin(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 3 {
        return domain(format!("need at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|(r, l)| !(*r > 0.0) || !r.is_finite() || !l.is_finite()) {
        return domain("densities must be finite and > 0, couplings finite");
    }
    let (slope, delta2_rel) =
        slope_and_delta(points).ok_or_else(|| Error::Domain("degenerate points: all couplings are zero".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let n = points.len();
    let mut slopes: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let (mut srl, mut srr) = (0.0, 0.0);
            for _ in 0..n {
                let (r, l) = points[rng.random_range(0..n)];
                srl += r * l;
                srr += r * r;
            }
            srl / srr
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let q = |p: f64| slopes[((p * (slopes.len() - 1) as f64).round()) as usize];
    Ok(LinearFit {
        slope,
        delta2_rel,
        confidence: (q(0.025), q(0.975)),
        bootstrap_resamples: BOOTSTRAP_RESAMPLES,
        points: n,
    })
}

/// Outcome of a density–coupling scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub scan: DensityScan,
    pub fits: Vec<Option<FitResult>>,
    /// Windows left out of the linear fit, with the reason.
    pub excluded: Vec<(usize, String)>,
    /// `None` when fewer than three windows have finite, positive `(ρ, λ)`
    /// or every coupling is zero.
    pub linear: Option<LinearFit>,
    pub linear_error: Option<String>,
}

/// Binning and window setup for [`density_coupling_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSetup {
    pub range: Window,
    pub windows: usize,
    pub bins: usize,
    pub s_max: f64,
    pub family: Family,
    pub parity: Parity,
}

/// Fit `λ` in each window, then `λᵢ = k ρᵢ` over the windows.
pub fn density_coupling_scan(spectra: &[Spectrum], kind: TransitionKind, setup: &ScanSetup) -> Result<ScanResult> {
    if setup.windows < 2 {
        return domain(format!("a density scan needs at least 2 windows, got {}", setup.windows));
    }
    let mut scan = local_density(spectra, setup.range, setup.windows)?;
    let mut fits = Vec::with_capacity(setup.windows);
    let mut excluded = Vec::new();
    let mut points = Vec::new();
    for (i, w) in scan.windows.clone().into_iter().enumerate() {
        let fit = extract_batch(spectra, w, setup.family, setup.parity)
            .and_then(|s| histogram(&s, setup.bins, setup.s_max))
            .and_then(|h| fit_lambda(&h, kind));
        match fit {
            Ok(f) => {
                let l = f.lambda_star.value();
                if l.is_finite() {
                    scan.lambda_fit[i] = Some(l);
                    if scan.rho[i] > 0.0 {
                        points.push((scan.rho[i], l));
                    } else {
                        excluded.push((i, "zero density".into()));
                    }
                } else {
                    excluded.push((i, "fit at the λ = ∞ endpoint".into()));
                }
                fits.push(Some(f));
            }
            Err(e @ Error::EmptySample(_)) => {
                excluded.push((i, e.to_string()));
                fits.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let (linear, linear_error) = match linear_fit_through_origin(&points) {
        Ok(l) => (Some(l), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ScanResult { scan, fits, excluded, linear, linear_error })
}

//! Seeded samplers for Poisson, GOE, GUE and GSE matrices and their mixtures.
//!
//! Variances: diagonal entries `N(0, 1)`, every real component of an
//! off-diagonal entry `N(0, 1/2)`. GSE matrices are stored as dense `2N×2N`
//! complex Hermitian matrices built from quaternion blocks
//! `[[q₀+iq₃, q₁+iq₂], [−q₁+iq₂, q₀−iq₃]]`; self-duality is then
//! `J Mᵀ Jᵀ = M` with `J = 𝟙_N ⊗ [[0,−1],[1,0]]`.

pub mod setup;
pub mod small;

use std::f64::consts::PI;

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::surmise::pure_mean_spacing;
use crate::{domain, Error, Result};

/// Per-eigenvalue density `𝒫(θ)` of a Poisson spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityProfile {
    /// Standard normal, `ρ₀(0) = N/√(2π)`.
    GaussianUnitVariance,
    /// `(1/N)[1/2 + 6u² + 8u³]`, `u = θ/N ∈ (−1/2, 1/2)`.
    CubicOnInterval,
    /// Piecewise-linear table of `(θ, 𝒫(θ))`, zero outside.
    Custom(TabulatedProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedProfile {
    pub theta: Vec<f64>,
    pub density: Vec<f64>,
}

impl TabulatedProfile {
    fn mass(&self) -> f64 {
        self.theta.windows(2).zip(self.density.windows(2)).map(|(t, d)| 0.5 * (t[1] - t[0]) * (d[0] + d[1])).sum()
    }

    fn pdf(&self, theta: f64) -> f64 {
        let t = &self.theta;
        if theta < t[0] || theta > t[t.len() - 1] {
            return 0.0;
        }
        let i = t.partition_point(|&x| x <= theta).clamp(1, t.len() - 1);
        let f = (theta - t[i - 1]) / (t[i] - t[i - 1]);
        self.density[i - 1] + f * (self.density[i] - self.density[i - 1])
    }
}

/// `∫_{−1/2}^{u} (1/2 + 6v² + 8v³) dv`.
fn cubic_cdf(u: f64) -> f64 {
    0.5 * u + 2.0 * u.powi(3) + 2.0 * u.powi(4) + 0.375
}

impl DensityProfile {
    pub fn validate(&self) -> Result<()> {
        if let Self::Custom(t) = self {
            if t.theta.len() < 2 || t.theta.len() != t.density.len() {
                return domain("tabulated profile needs at least two (θ, density) pairs of equal length");
            }
            if t.theta.windows(2).any(|w| !(w[0] < w[1])) || t.density.iter().any(|d| !(*d >= 0.0)) {
                return domain("tabulated profile needs increasing θ and non-negative densities");
            }
            let m = t.mass();
            if (m - 1.0).abs() > 1e-6 {
                return domain(format!("tabulated profile integrates to {m}, not 1"));
            }
        }
        Ok(())
    }

    /// `𝒫(θ)` for a spectrum of `n` eigenvalues.
    pub fn pdf(&self, theta: f64, n: usize) -> f64 {
        match self {
            Self::GaussianUnitVariance => (-0.5 * theta * theta).exp() / (2.0 * PI).sqrt(),
            Self::CubicOnInterval => {
                let nf = n as f64;
                let u = theta / nf;
                if u.abs() >= 0.5 {
                    0.0
                } else {
                    (0.5 + 6.0 * u * u + 8.0 * u.powi(3)) / nf
                }
            }
            Self::Custom(t) => t.pdf(theta),
        }
    }

    /// Interval carrying all (or, for the Gaussian, all but `e^{−32}`) mass.
    pub fn support(&self, n: usize) -> (f64, f64) {
        match self {
            Self::GaussianUnitVariance => (-8.0, 8.0),
            Self::CubicOnInterval => (-0.5 * n as f64, 0.5 * n as f64),
            Self::Custom(t) => (t.theta[0], t.theta[t.theta.len() - 1]),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        match self {
            Self::GaussianUnitVariance => StandardNormal.sample(rng),
            Self::CubicOnInterval => {
                // Inverse CDF by bisection; the CDF is strictly increasing.
                let target: f64 = rng.random();
                let (mut lo, mut hi) = (-0.5, 0.5);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if cubic_cdf(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi) * n as f64
            }
            Self::Custom(t) => {
                let (a, b) = (t.theta[0], t.theta[t.theta.len() - 1]);
                let top = t.density.iter().cloned().fold(0.0, f64::max);
                loop {
                    let x = a + (b - a) * rng.random::<f64>();
                    if rng.random::<f64>() * top <= t.pdf(x) {
                        return x;
                    }
                }
            }
        }
    }
}

/// One pure ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Dyson index: 0 (Poisson), 1, 2 or 4.
    pub beta: u8,
    /// Number of independent eigenvalues (Kramers pairs count once).
    pub n: usize,
    /// Double a β ∈ {0, 1, 2} matrix into a self-dual one of size `2N`.
    pub self_dual: bool,
    /// Eigenvalue profile, β = 0 only.
    pub profile: Option<DensityProfile>,
}

impl EnsembleSpec {
    pub fn gaussian(beta: u8, n: usize) -> Self {
        Self { beta, n, self_dual: false, profile: None }
    }

    pub fn poisson(n: usize, profile: DensityProfile) -> Self {
        Self { beta: 0, n, self_dual: false, profile: Some(profile) }
    }

    pub fn self_dual(mut self) -> Self {
        self.self_dual = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.beta {
            0 => match &self.profile {
                Some(p) => p.validate()?,
                None => return domain("a Poisson ensemble needs a density profile"),
            },
            1 | 2 | 4 => {
                if self.n < 2 {
                    return domain(format!("Gaussian ensembles need N ≥ 2, got {}", self.n));
                }
                if self.profile.is_some() {
                    return domain("density profiles apply to Poisson ensembles only");
                }
            }
            b => return domain(format!("Dyson index must be 0, 1, 2 or 4, got {b}")),
        }
        if self.n == 0 {
            return domain("N must be positive");
        }
        Ok(())
    }

    /// Matrix dimension after any self-dual doubling.
    pub fn dim(&self) -> usize {
        if self.beta == 4 || self.self_dual {
            2 * self.n
        } else {
            self.n
        }
    }

    /// Whether sampled matrices are self-dual.
    pub fn is_self_dual(&self) -> bool {
        self.beta == 4 || self.self_dual
    }

    /// `ρ_β(0)`: `N𝒫(0)` for Poisson, semicircle `√(2N)/(√β π)` otherwise.
    pub fn center_density(&self) -> f64 {
        let n = self.n as f64;
        match (&self.profile, self.beta) {
            (Some(p), 0) => n * p.pdf(0.0, self.n),
            (_, b) => (2.0 * n).sqrt() / ((b as f64).sqrt() * PI),
        }
    }

    /// Semicircle radius `√(2βN)`; for Poisson the profile support.
    pub fn spectral_radius(&self) -> f64 {
        match (&self.profile, self.beta) {
            (Some(p), 0) => {
                let (a, b) = p.support(self.n);
                a.abs().max(b.abs())
            }
            (_, b) => (2.0 * b as f64 * self.n as f64).sqrt(),
        }
    }
}

/// How the perturbation strength is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// `α = Λ/(ρ_β(0)·s̄_β)`.
    DensityMatched,
    /// `α` given directly; `Λ` is ignored.
    Raw(f64),
}

/// `H = H_β + α H_β′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSpec {
    pub base: EnsembleSpec,
    pub perturbation: EnsembleSpec,
    pub capital_lambda: f64,
    pub scaling: Scaling,
}

impl MixedSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.perturbation.validate()?;
        if self.perturbation.beta == 0 {
            return domain("the perturbation must be a Gaussian ensemble");
        }
        if self.base.dim() != self.perturbation.dim() {
            return domain(format!(
                "base (dim {}) and perturbation (dim {}) do not match; self-dual or GSE parts double the dimension",
                self.base.dim(),
                self.perturbation.dim()
            ));
        }
        match self.scaling {
            Scaling::Raw(a) if !(a >= 0.0 && a.is_finite()) => domain(format!("α must be finite and ≥ 0, got {a}")),
            Scaling::DensityMatched if !(self.capital_lambda >= 0.0 && self.capital_lambda.is_finite()) => {
                domain(format!("Λ must be finite and ≥ 0, got {}", self.capital_lambda))
            }
            _ => Ok(()),
        }
    }

    pub fn alpha(&self) -> Result<f64> {
        Ok(match self.scaling {
            Scaling::Raw(a) => a,
            Scaling::DensityMatched => {
                self.capital_lambda / (self.base.center_density() * pure_mean_spacing(self.base.beta)?)
            }
        })
    }

    /// Whether sums stay self-dual: both parts must be.
    pub fn is_self_dual(&self) -> bool {
        self.base.is_self_dual() && self.perturbation.is_self_dual()
    }
}

/// A dense Hermitian matrix, or a diagonal one.
#[derive(Debug, Clone)]
pub enum Matrix {
    Diagonal(Vec<f64>),
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl Matrix {
    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.len(),
            Self::Real(m) => m.nrows(),
            Self::Complex(m) => m.nrows(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        match self {
            Self::Diagonal(d) => c64::new(if i == j { d[i] } else { 0.0 }, 0.0),
            Self::Real(m) => c64::new(m[(i, j)], 0.0),
            Self::Complex(m) => m[(i, j)],
        }
    }

    pub fn to_complex(&self) -> Mat<c64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.entry(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut m = 0f64;
        for i in 0..n {
            for j in 0..n {
                m = m.max(self.entry(i, j).norm());
            }
        }
        m
    }

    /// `max |M − M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut m = 0f64;
        for i in 0..n {
            for j in 0..=i {
                m = m.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        m
    }

    /// `max |J Mᵀ Jᵀ − M|`; infinite for odd dimension.
    pub fn self_duality_defect(&self) -> f64 {
        let n = self.dim();
        if n % 2 == 1 {
            return f64::INFINITY;
        }
        // (J Mᵀ Jᵀ)_{ij} = σ(i)σ(j) M_{p(j) p(i)} with p swapping 2k ↔ 2k+1
        // and σ(2k) = −1, σ(2k+1) = +1.
        let p = |i: usize| i ^ 1;
        let sigma = |i: usize| if i % 2 == 0 { -1.0 } else { 1.0 };
        let mut m = 0f64;
        for i in 0..n {
            for j in 0..n {
                let v = self.entry(p(j), p(i)) * (sigma(i) * sigma(j));
                m = m.max((v - self.entry(i, j)).norm());
            }
        }
        m
    }

    /// `self + α·other`, promoting to the wider representation.
    pub fn add_scaled(&self, alpha: f64, other: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if other.dim() != n {
            return domain(format!("cannot add matrices of dimension {n} and {}", other.dim()));
        }
        Ok(match (self, other) {
            (Self::Diagonal(a), Self::Diagonal(b)) => {
                Self::Diagonal(a.iter().zip(b).map(|(x, y)| x + alpha * y).collect())
            }
            (Self::Complex(_), _) | (_, Self::Complex(_)) => {
                Self::Complex(Mat::from_fn(n, n, |i, j| self.entry(i, j) + other.entry(i, j) * alpha))
            }
            _ => Self::Real(Mat::from_fn(n, n, |i, j| self.entry(i, j).re + alpha * other.entry(i, j).re)),
        })
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

/// GOE, GUE or GSE matrix with the unit-diagonal-variance convention.
pub fn sample_gaussian<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Matrix> {
    if !matches!(spec.beta, 1 | 2 | 4) {
        return domain(format!("sample_gaussian needs β ∈ {{1, 2, 4}}, got {}", spec.beta));
    }
    if spec.n < 2 {
        return domain(format!("Gaussian ensembles need N ≥ 2, got {}", spec.n));
    }
    let n = spec.n;
    let off = 0.5f64.sqrt();
    Ok(match spec.beta {
        1 => {
            let mut m = Mat::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = normal(rng, 1.0);
                for j in 0..i {
                    let v = normal(rng, off);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            Matrix::Real(m)
        }
        2 => {
            let mut m = Mat::<c64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = c64::new(normal(rng, 1.0), 0.0);
                for j in 0..i {
                    let v = c64::new(normal(rng, off), normal(rng, off));
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
            Matrix::Complex(m)
        }
        _ => {
            let mut m = Mat::<c64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                let d = normal(rng, 1.0);
                m[(2 * i, 2 * i)] = c64::new(d, 0.0);
                m[(2 * i + 1, 2 * i + 1)] = c64::new(d, 0.0);
                for j in 0..i {
                    let q = [normal(rng, off), normal(rng, off), normal(rng, off), normal(rng, off)];
                    let block =
                        [[c64::new(q[0], q[3]), c64::new(q[1], q[2])], [c64::new(-q[1], q[2]), c64::new(q[0], -q[3])]];
                    for a in 0..2 {
                        for b in 0..2 {
                            m[(2 * i + a, 2 * j + b)] = block[a][b];
                            m[(2 * j + b, 2 * i + a)] = block[a][b].conj();
                        }
                    }
                }
            }
            Matrix::Complex(m)
        }
    })
}

/// Diagonal matrix of `N` independent draws from `spec.profile`.
pub fn sample_poisson_diag<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Matrix> {
    let profile = match (&spec.profile, spec.beta) {
        (Some(p), 0) => p,
        _ => return domain("sample_poisson_diag needs β = 0 with a density profile"),
    };
    profile.validate()?;
    Ok(Matrix::Diagonal((0..spec.n).map(|_| profile.sample(spec.n, rng)).collect()))
}

/// How a β ∈ {0, 1, 2} matrix is doubled into a self-dual one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelfDualMode {
    /// `A ⊗ 𝟙₂` for real symmetric or diagonal `A`.
    TensorIdentity,
    /// `H` on even, `H*` on odd indices: `diag(H, Hᵀ)` up to a permutation.
    GuePermutation,
}

/// Self-dual `2N×2N` matrix with the eigenvalues of the input, each twice.
///
/// `GuePermutation` interleaves `H` and `H*`, which is `diag(H, Hᵀ)` after
/// a permutation for any `N`; on a 2×2 input it gives exactly
/// `[[a,0,c,0],[0,a,0,c*],[c*,0,b,0],[0,c,0,b]]`.
pub fn make_self_dual(m: &Matrix, mode: SelfDualMode) -> Result<Matrix> {
    let scale = m.max_abs().max(1.0);
    if m.hermiticity_defect() > 1e-12 * scale {
        return domain("make_self_dual needs a Hermitian input");
    }
    let n = m.dim();
    match (mode, m) {
        (SelfDualMode::TensorIdentity, Matrix::Diagonal(d)) => {
            Ok(Matrix::Diagonal(d.iter().flat_map(|&x| [x, x]).collect()))
        }
        (SelfDualMode::TensorIdentity, Matrix::Real(a)) => {
            Ok(Matrix::Real(Mat::from_fn(2 * n, 2 * n, |i, j| if i % 2 == j % 2 { a[(i / 2, j / 2)] } else { 0.0 })))
        }
        (SelfDualMode::TensorIdentity, Matrix::Complex(_)) => {
            domain("TensorIdentity needs a real symmetric or diagonal input; use GuePermutation")
        }
        (SelfDualMode::GuePermutation, _) => Ok(Matrix::Complex(Mat::from_fn(2 * n, 2 * n, |i, j| {
            if i % 2 != j % 2 {
                c64::new(0.0, 0.0)
            } else if i % 2 == 0 {
                m.entry(i / 2, j / 2)
            } else {
                m.entry(i / 2, j / 2).conj()
            }
        }))),
    }
}

/// One matrix of a pure ensemble, doubled when `spec.self_dual` is set.
pub fn sample<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Matrix> {
    spec.validate()?;
    let m = if spec.beta == 0 { sample_poisson_diag(spec, rng)? } else { sample_gaussian(spec, rng)? };
    if spec.self_dual && spec.beta != 4 {
        let mode = if spec.beta == 2 { SelfDualMode::GuePermutation } else { SelfDualMode::TensorIdentity };
        make_self_dual(&m, mode)
    } else {
        Ok(m)
    }
}

/// `H = H_β + α H_β′` with `α` from `spec.scaling`.
pub fn build_mixed<R: Rng + ?Sized>(spec: &MixedSpec, rng: &mut R) -> Result<Matrix> {
    spec.validate()?;
    let alpha = spec.alpha()?;
    let base = sample(&spec.base, rng)?;
    let pert = sample(&spec.perturbation, rng)?;
    base.add_scaled(alpha, &pert)
}

/// Sorted eigenvalues, optionally with Kramers pairs merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub degeneracy_collapsed: bool,
    /// Largest intra-pair gap seen while collapsing.
    pub max_pair_gap: Option<f64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues, degeneracy_collapsed: false, max_pair_gap: None }
    }

    /// Merge consecutive pairs into their mean.
    ///
    /// Errors if a pair is wider than `1e-6` of the local mean spacing: the
    /// pairing is then ambiguous.
    pub fn collapse_pairs(&self) -> Result<Spectrum> {
        let e = &self.eigenvalues;
        if e.len() % 2 == 1 {
            return domain(format!("cannot pair an odd number ({}) of eigenvalues", e.len()));
        }
        let centers: Vec<f64> = e.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        let mut max_gap = 0f64;
        for (k, p) in e.chunks(2).enumerate() {
            let gap = p[1] - p[0];
            let left = if k > 0 { Some(centers[k] - centers[k - 1]) } else { None };
            let right = centers.get(k + 1).map(|c| c - centers[k]);
            let local = match (left, right) {
                (Some(a), Some(b)) => 0.5 * (a + b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => f64::INFINITY,
            };
            if gap > 1e-6 * local {
                return domain(format!(
                    "pair {k} has gap {gap:e}, above 1e-6 of the local spacing {local:e}; spectrum is not Kramers-degenerate"
                ));
            }
            max_gap = max_gap.max(gap);
        }
        Ok(Spectrum { eigenvalues: centers, degeneracy_collapsed: true, max_pair_gap: Some(max_gap) })
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &Matrix, collapse_degeneracy: bool) -> Result<Spectrum> {
    let fail = |_| Error::Eigen { dim: m.dim(), max_abs: m.max_abs() };
    let values = match m {
        Matrix::Diagonal(d) => d.clone(),
        Matrix::Real(a) => a.as_ref().self_adjoint_eigenvalues(Side::Lower).map_err(fail)?,
        Matrix::Complex(a) => a.as_ref().self_adjoint_eigenvalues(Side::Lower).map_err(fail)?,
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen { dim: m.dim(), max_abs: m.max_abs() });
    }
    let s = Spectrum::new(values);
    if collapse_degeneracy {
        s.collapse_pairs()
    } else {
        Ok(s)
    }
}

/// What a batch job samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixModel {
    Pure(EnsembleSpec),
    Mixed(MixedSpec),
}

impl MatrixModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pure(s) => s.validate(),
            Self::Mixed(m) => m.validate(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(s) => s.dim(),
            Self::Mixed(m) => m.base.dim(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matrix> {
        match self {
            Self::Pure(s) => sample(s, rng),
            Self::Mixed(m) => build_mixed(m, rng),
        }
    }
}

/// Independent stream `job` under `root_seed`.
pub fn job_rng(root_seed: u64, job: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(job);
    rng
}

/// Sample, diagonalize and map `count` matrices in parallel.
///
/// Job `i` draws from `job_rng(root_seed, i)`, so results do not depend on
/// the thread count; the output is in job order.
pub fn map_batch<T, F>(
    model: &MatrixModel,
    count: usize,
    root_seed: u64,
    collapse_degeneracy: bool,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, Spectrum) -> T + Sync,
{
    model.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = job_rng(root_seed, i as u64);
            let m = model.sample(&mut rng)?;
            Ok(f(i, eigenvalues(&m, collapse_degeneracy)?))
        })
        .collect()
}

/// [`map_batch`] keeping the spectra.
pub fn sample_batch(
    model: &MatrixModel,
    count: usize,
    root_seed: u64,
    collapse_degeneracy: bool,
) -> Result<Vec<Spectrum>> {
    map_batch(model, count, root_seed, collapse_degeneracy, |_, s| s)
}

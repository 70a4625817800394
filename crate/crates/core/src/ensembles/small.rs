//! Direct samplers for the 2×2 (and 4×4) mixed matrices whose spacing laws
//! the surmise module gives in closed form.
//!
//! Every matrix is `H_β + λ H_β′` with the standard variances. The 2×2-type
//! cases (including the `⊗𝟙₂` doublings) need only the closed spacing
//! `√(Δ² + 4|q|²)` of a quaternion-valued 2×2 Hermitian matrix; GSE→GUE
//! diagonalizes a full 4×4.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use super::{eigenvalues, job_rng, sample_gaussian, EnsembleSpec, Matrix};
use crate::surmise::TransitionKind;
use crate::{domain, Result};

/// Jobs per batch; each owns a stream so output is thread-count independent.
const CHUNK: usize = 4096;

fn normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

/// Off-diagonal quaternion components of a β′ ∈ {1, 2, 4} 2×2 matrix.
fn off_components<R: Rng + ?Sized>(beta: u8, rng: &mut R) -> [f64; 4] {
    let sd = 0.5f64.sqrt();
    let mut q = [0.0; 4];
    let k = beta as usize;
    for c in q.iter_mut().take(k) {
        *c = normal(rng, sd);
    }
    q
}

/// Spacing of `[[a, q], [q̄, b]]` with quaternion `q`.
fn spacing(a: f64, b: f64, q: [f64; 4]) -> f64 {
    let q2: f64 = q.iter().map(|x| x * x).sum();
    ((a - b).powi(2) + 4.0 * q2).sqrt()
}

/// Raw spacings of one small matrix: one value, two for S1 (`t₁`, `t₃`).
pub fn sample_small_spacings<R: Rng + ?Sized>(kind: TransitionKind, lambda: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !kind.is_mixed() {
        return domain(format!("small-matrix oracles cover mixed kinds, got {kind}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("λ must be finite and > 0, got {lambda}"));
    }
    let perturb = |beta: u8, rng: &mut R| (normal(rng, 1.0), normal(rng, 1.0), off_components(beta, rng));
    Ok(match kind {
        TransitionKind::PoissonToGoe | TransitionKind::PoissonToGue | TransitionKind::PoissonToGse => {
            let beta = kind.target_beta().unwrap();
            let p: f64 = Exp1.sample(rng);
            let (a, b, q) = perturb(beta, rng);
            let q = q.map(|x| lambda * x);
            vec![spacing(p + lambda * a, lambda * b, q)]
        }
        TransitionKind::GoeToGue | TransitionKind::GoeToGse | TransitionKind::GueToGse => {
            let base_beta = kind.base_beta();
            let (a0, b0, q0) = perturb(base_beta, rng);
            let (a1, b1, q1) = perturb(kind.target_beta().unwrap(), rng);
            // GUE doubled into H₂^sd puts Re c on q₀ and Im c on q₃.
            let q0 = if base_beta == 2 { [q0[0], 0.0, 0.0, q0[1]] } else { q0 };
            let mut q = [0.0; 4];
            for i in 0..4 {
                q[i] = q0[i] + lambda * q1[i];
            }
            vec![spacing(a0 + lambda * a1, b0 + lambda * b1, q)]
        }
        TransitionKind::GseToGueS1 | TransitionKind::GseToGueS2 => {
            let h4 = sample_gaussian(&EnsembleSpec::gaussian(4, 2), rng)?;
            let h2 = sample_gaussian(&EnsembleSpec::gaussian(2, 4), rng)?;
            let e = eigenvalues(&h4.add_scaled(lambda, &h2)?, false)?.eigenvalues;
            if kind == TransitionKind::GseToGueS1 {
                vec![e[1] - e[0], e[3] - e[2]]
            } else {
                vec![e[2] - e[1]]
            }
        }
        TransitionKind::Pure(_) => unreachable!(),
    })
}

/// `count` small matrices' spacings, rescaled to unit mean over the batch.
pub fn small_oracle_spacings(kind: TransitionKind, lambda: f64, count: usize, root_seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return domain("matrix count must be positive");
    }
    let chunks: Vec<Vec<f64>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = job_rng(root_seed, c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            let mut out = Vec::with_capacity(2 * n);
            for _ in 0..n {
                out.extend(sample_small_spacings(kind, lambda, &mut rng)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<f64> = chunks.concat();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    all.iter_mut().for_each(|s| *s /= mean);
    Ok(all)
}

/// The 4×4 `H₀ ⊗ 𝟙₂` with `H₀ = diag(0, p)`.
pub fn poisson_tensor_identity(p: f64) -> Matrix {
    Matrix::Diagonal(vec![0.0, 0.0, p, p])
}

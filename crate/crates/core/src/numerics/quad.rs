//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The error estimate of a panel is `|K15 − G7|`, which for smooth integrands
//! overestimates the true error of the Kronrod value by orders of magnitude.
//! Panels are bisected in order of decreasing estimate until the summed
//! estimate meets `max(absolute, relative·|value|)`.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { relative_tolerance: 1e-9, absolute_tolerance: 1e-12, max_subdivisions: 500 }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(relative: f64, absolute: f64) -> Self {
        Self { relative_tolerance: relative, absolute_tolerance: absolute, ..Self::default() }
    }

    fn check(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.absolute_tolerance > 0.0) {
            return crate::domain("quadrature tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return crate::domain("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel<'a> {
    f: &'a dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn adaptive(mut panels: Vec<Panel<'_>>, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.check()?;
    for p in panels.iter_mut() {
        let (v, e) = gk15(p.f, p.a, p.b);
        p.value = v;
        p.error = e;
    }
    let mut subdivisions = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Convergence { estimate: value, error });
        }
        if error <= spec.absolute_tolerance.max(spec.relative_tolerance * value.abs()) {
            return Ok(Estimate { value, error_estimate: error });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence { estimate: value, error });
        }
        let (worst, _) =
            panels.iter().enumerate().fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Interval exhausted at machine resolution.
            return Err(Error::Convergence { estimate: value, error });
        }
        let (v1, e1) = gk15(p.f, p.a, mid);
        let (v2, e2) = gk15(p.f, mid, p.b);
        panels.push(Panel { f: p.f, a: p.a, b: mid, value: v1, error: e1 });
        panels.push(Panel { f: p.f, a: mid, b: p.b, value: v2, error: e2 });
        subdivisions += 1;
    }
}

/// `∫ₐᵇ f`.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return crate::domain(format!("integrate_finite needs finite a < b, got [{a}, {b}]"));
    }
    adaptive(vec![Panel { f: &f, a, b, value: 0.0, error: 0.0 }], spec)
}

/// `∫_{p₀}^{p_last} f` with panels forced at the given increasing points.
pub fn integrate_finite_panels<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) || !points.iter().all(|p| p.is_finite()) {
        return crate::domain("panel points must be at least two finite, strictly increasing values");
    }
    let f = &f;
    let panels = points.windows(2).map(|w| Panel { f, a: w[0], b: w[1], value: 0.0, error: 0.0 }).collect();
    adaptive(panels, spec)
}

/// `∫₀^∞ f` through the map `x = t/(1−t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<Estimate> {
    integrate_with_breakpoints(f, &[0.0], spec)
}

/// `∫_{p₀}^∞ f` with panels forced at the given increasing breakpoints.
///
/// Breakpoints let the caller bracket narrow peaks that a mapped rule would
/// otherwise step over. The last breakpoint starts the mapped tail.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if breakpoints.is_empty() || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return crate::domain("breakpoints must be non-empty and strictly increasing");
    }
    let f = &f;
    let start = *breakpoints.last().unwrap();
    let tail = move |t: f64| {
        let u = 1.0 - t;
        let v = f(start + t / u) / (u * u);
        // Overflow of the map at t → 1 only happens where f has decayed.
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut panels: Vec<Panel<'_>> =
        breakpoints.windows(2).map(|w| Panel { f, a: w[0], b: w[1], value: 0.0, error: 0.0 }).collect();
    panels.push(Panel { f: &tail, a: 0.0, b: 1.0, value: 0.0, error: 0.0 });
    adaptive(panels, spec)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn maximize_unimodal<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() < tol {
            let x = 0.5 * (a + b);
            return Ok((x, f(x)));
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    Err(Error::Optimizer(format!("golden section did not reach tolerance {tol:e}")))
}

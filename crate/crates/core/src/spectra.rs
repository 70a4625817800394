//! Spacing samples, histograms and local densities from sampled or external
//! spectra.
//!
//! A spacing belongs to the window holding its left eigenvalue. S1 and S2
//! alternate along each spectrum: with even parity the first spacing is S1.
//! Samples are normalized to unit mean over the whole batch, never per
//! matrix.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::Spectrum;
use crate::{domain, Error, Result};

/// Half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return domain(format!("window needs finite lo < hi, got ({lo}, {hi})"));
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric window `[−h, h)`.
    pub fn centered(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Which spacings to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    All,
    /// Intra-pair spacings of a lifted Kramers spectrum.
    S1,
    /// Inter-pair spacings.
    S2,
}

/// Index of the first S1 spacing along a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// Spacings 0, 2, 4, … are S1 (the sampled-spectrum convention).
    Even,
    Odd,
}

impl Family {
    fn keeps(self, index: usize, parity: Parity) -> bool {
        let offset = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        match self {
            Self::All => true,
            Self::S1 => index % 2 == offset,
            Self::S2 => index % 2 != offset,
        }
    }
}

/// Unit-mean spacings from one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSample {
    pub spacings: Vec<f64>,
    pub window: Window,
    pub family: Family,
    pub count: usize,
    /// Mean of the raw spacings before normalization.
    pub raw_mean: f64,
}

impl SpacingSample {
    /// Normalize raw spacings to unit mean.
    pub fn from_raw(mut raw: Vec<f64>, window: Window, family: Family) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptySample(format!("no {family:?} spacings in [{}, {})", window.lo, window.hi)));
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        if !(mean > 0.0) || !mean.is_finite() {
            return domain(format!("raw spacings have mean {mean}; cannot normalize"));
        }
        raw.iter_mut().for_each(|s| *s /= mean);
        Ok(Self { count: raw.len(), spacings: raw, window, family, raw_mean: mean })
    }
}

/// Raw spacings of one spectrum whose left eigenvalue lies in `window`.
pub fn raw_spacings(spectrum: &Spectrum, window: Window, family: Family, parity: Parity) -> Vec<f64> {
    spectrum
        .eigenvalues
        .windows(2)
        .enumerate()
        .filter(|(i, w)| family.keeps(*i, parity) && window.contains(w[0]))
        .map(|(_, w)| w[1] - w[0])
        .collect()
}

/// Spacings of a single spectrum; errors if the window holds fewer than two
/// eigenvalues.
pub fn extract_spacings(spectrum: &Spectrum, window: Window, family: Family, parity: Parity) -> Result<SpacingSample> {
    let inside = spectrum.eigenvalues.iter().filter(|&&x| window.contains(x)).count();
    if inside < 2 {
        return Err(Error::EmptySample(format!(
            "{inside} eigenvalue(s) in [{}, {}); need at least 2",
            window.lo, window.hi
        )));
    }
    SpacingSample::from_raw(raw_spacings(spectrum, window, family, parity), window, family)
}

/// Spacings of a batch, normalized by the batch mean.
pub fn extract_batch(spectra: &[Spectrum], window: Window, family: Family, parity: Parity) -> Result<SpacingSample> {
    let parts: Vec<Vec<f64>> = spectra.par_iter().map(|s| raw_spacings(s, window, family, parity)).collect();
    SpacingSample::from_raw(parts.concat(), window, family)
}

/// Density histogram on `[0, s_max]` with uniform bins and an overflow count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub total_count: usize,
    /// Samples at or beyond the last edge; part of `total_count`.
    pub overflow_count: usize,
}

/// Default binning: 60 uniform bins on `[0, 3.5]`.
pub const DEFAULT_BINS: usize = 60;
pub const DEFAULT_S_MAX: f64 = 3.5;

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn s_max(&self) -> f64 {
        self.bin_edges[self.bin_edges.len() - 1]
    }

    pub fn overflow_fraction(&self) -> f64 {
        self.overflow_count as f64 / self.total_count as f64
    }

    /// Whether two histograms share bin edges exactly.
    pub fn same_binning(&self, other: &Histogram) -> bool {
        self.bin_edges == other.bin_edges
    }

    /// Two-column `s density` text, one bin per line.
    pub fn to_columns(&self) -> String {
        let mut out = String::new();
        for (c, d) in self.centers().iter().zip(&self.densities) {
            let _ = writeln!(out, "{c} {d}");
        }
        out
    }
}

fn uniform_edges(bins: usize, s_max: f64) -> Vec<f64> {
    (0..=bins).map(|i| s_max * i as f64 / bins as f64).collect()
}

/// Bin `values` (already normalized) into a density histogram.
pub fn histogram_of(values: &[f64], bins: usize, s_max: f64) -> Result<Histogram> {
    if bins < 10 {
        return domain(format!("need at least 10 bins, got {bins}"));
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return domain(format!("s_max must be finite and > 0, got {s_max}"));
    }
    if values.is_empty() {
        return Err(Error::EmptySample("cannot histogram an empty sample".into()));
    }
    let mut counts = vec![0usize; bins];
    let mut overflow = 0;
    for &v in values {
        if !(v >= 0.0) {
            return domain(format!("spacings must be non-negative, got {v}"));
        }
        let k = (v / s_max * bins as f64) as usize;
        if k >= bins {
            overflow += 1;
        } else {
            counts[k] += 1;
        }
    }
    let edges = uniform_edges(bins, s_max);
    let total = values.len() as f64;
    let densities = counts.iter().zip(edges.windows(2)).map(|(&c, w)| c as f64 / (total * (w[1] - w[0]))).collect();
    Ok(Histogram { bin_edges: edges, densities, total_count: values.len(), overflow_count: overflow })
}

pub fn histogram(sample: &SpacingSample, bins: usize, s_max: f64) -> Result<Histogram> {
    histogram_of(&sample.spacings, bins, s_max)
}

/// Per-window eigenvalue densities and, once fitted, couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityScan {
    pub windows: Vec<Window>,
    /// Mean eigenvalue count per matrix divided by the window width.
    pub rho: Vec<f64>,
    /// Windows in which no eigenvalue fell in any matrix.
    pub empty: Vec<bool>,
    pub lambda_fit: Vec<Option<f64>>,
}

/// Split `range` into `m` equal windows and measure the mean density in each.
pub fn local_density(spectra: &[Spectrum], range: Window, m: usize) -> Result<DensityScan> {
    if m == 0 {
        return domain("need at least one window");
    }
    if spectra.is_empty() {
        return Err(Error::EmptySample("no spectra to scan".into()));
    }
    let width = range.width() / m as f64;
    let windows: Vec<Window> = (0..m)
        .map(|i| Window {
            lo: range.lo + width * i as f64,
            hi: if i + 1 == m { range.hi } else { range.lo + width * (i + 1) as f64 },
        })
        .collect();
    let counts = spectra
        .par_iter()
        .map(|s| {
            let mut c = vec![0usize; m];
            for &x in &s.eigenvalues {
                if range.contains(x) {
                    let k = (((x - range.lo) / width) as usize).min(m - 1);
                    c[k] += 1;
                }
            }
            c
        })
        .reduce(|| vec![0; m], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let n = spectra.len() as f64;
    let rho = counts.iter().zip(&windows).map(|(&c, w)| c as f64 / (n * w.width())).collect();
    Ok(DensityScan { empty: counts.iter().map(|&c| c == 0).collect(), windows, rho, lambda_fit: vec![None; m] })
}

/// Parsed spectrum file.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub spectra: Vec<Spectrum>,
    /// Groups that were not sorted ascending in the file.
    pub unsorted_groups: usize,
}

/// Read blank-line-separated groups of eigenvalues, one or more per line.
/// Lines starting with `#` are comments.
pub fn read_spectra<R: Read>(reader: R, source: &str) -> Result<Ingested> {
    let mut spectra = Vec::new();
    let mut unsorted = 0;
    let mut group: Vec<f64> = Vec::new();
    let mut flush = |group: &mut Vec<f64>, spectra: &mut Vec<Spectrum>| {
        if !group.is_empty() {
            if group.windows(2).any(|w| w[1] < w[0]) {
                unsorted += 1;
            }
            spectra.push(Spectrum::new(std::mem::take(group)));
        }
    };
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            flush(&mut group, &mut spectra);
            continue;
        }
        for tok in t.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                msg: format!("not a number: {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: i + 1,
                    msg: format!("non-finite value {tok:?}"),
                });
            }
            group.push(v);
        }
    }
    flush(&mut group, &mut spectra);
    Ok(Ingested { spectra, unsorted_groups: unsorted })
}

pub fn ingest_spectrum_file(path: &Path) -> Result<Ingested> {
    let f = std::fs::File::open(path)?;
    read_spectra(f, &path.display().to_string())
}

/// Write spectra in the format read by [`read_spectra`]; values round-trip
/// exactly.
pub fn write_spectra<W: Write>(mut w: W, spectra: &[Spectrum]) -> Result<()> {
    for (k, s) in spectra.iter().enumerate() {
        if k > 0 {
            writeln!(w)?;
        }
        for x in &s.eigenvalues {
            writeln!(w, "{x:?}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    fn spectrum(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec())
    }

    fn everything() -> Window {
        Window::new(-1e9, 1e9).unwrap()
    }

    #[test]
    fn all_family_on_unit_lattice() {
        let s = extract_spacings(&spectrum(&[0.0, 1.0, 2.0, 3.0]), everything(), Family::All, Parity::Even).unwrap();
        assert_eq!(s.spacings, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn s1_s2_alternation() {
        let sp = spectrum(&[0.0, 0.1, 1.0, 1.1, 2.0, 2.1]);
        let raw1 = raw_spacings(&sp, everything(), Family::S1, Parity::Even);
        let raw2 = raw_spacings(&sp, everything(), Family::S2, Parity::Even);
        assert_eq!(raw1.len(), 3);
        assert!(raw1.iter().all(|x| (x - 0.1).abs() < 1e-12));
        assert_eq!(raw2.len(), 2);
        assert!(raw2.iter().all(|x| (x - 0.9).abs() < 1e-12));
        // Odd parity swaps the roles.
        assert_eq!(raw_spacings(&sp, everything(), Family::S1, Parity::Odd).len(), 2);
    }

    #[test]
    fn left_endpoint_assignment() {
        let sp = spectrum(&[0.0, 0.5, 1.5, 2.0]);
        let w = Window::new(0.4, 1.0).unwrap();
        assert_eq!(raw_spacings(&sp, w, Family::All, Parity::Even), vec![1.0]);
        assert!(extract_spacings(&sp, w, Family::All, Parity::Even).is_err());
    }

    #[test]
    fn batch_normalization_is_global() {
        let a = spectrum(&[0.0, 1.0, 2.0]);
        let b = spectrum(&[0.0, 3.0, 6.0]);
        let s = extract_batch(&[a, b], everything(), Family::All, Parity::Even).unwrap();
        assert_eq!(s.spacings, vec![0.5, 0.5, 1.5, 1.5]);
        assert_eq!(s.raw_mean, 2.0);
    }

    #[test]
    fn uniform_histogram_is_flat() {
        let v: Vec<f64> = (0..20_000).map(|i| 2.0 * (i as f64 + 0.5) / 20_000.0).collect();
        let h = histogram_of(&v, 20, 2.0).unwrap();
        assert!(h.densities.iter().all(|d| (d - 0.5).abs() < 1e-12));
        assert_eq!(h.overflow_count, 0);
    }

    #[test]
    fn exponential_histogram_within_multinomial_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let v: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        let h = histogram_of(&v, 60, 3.5).unwrap();
        let w = 3.5 / 60.0;
        for (k, (c, d)) in h.centers().iter().zip(&h.densities).enumerate() {
            // Exact bin mass, so only sampling error remains.
            let p = (-(c - 0.5 * w)).exp() - (-(c + 0.5 * w)).exp();
            let sigma = (p * (1.0 - p) / n as f64).sqrt() / w;
            assert!((d - p / w).abs() < 4.0 * sigma, "bin {k}: {d} vs {}", p / w);
        }
        let mass: f64 = h.densities.iter().zip(h.widths()).map(|(d, w)| d * w).sum();
        assert!((mass + h.overflow_fraction() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_rejects_bad_input() {
        assert!(histogram_of(&[], 20, 3.0).is_err());
        assert!(histogram_of(&[1.0], 5, 3.0).is_err());
        assert!(histogram_of(&[1.0], 20, 0.0).is_err());
    }

    #[test]
    fn single_window_density() {
        let s = spectrum(&[0.0, 1.0, 2.0, 3.0, 3.9]);
        let scan = local_density(&[s], Window::new(0.0, 4.0).unwrap(), 1).unwrap();
        assert_eq!(scan.rho, vec![5.0 / 4.0]);
        let scan = local_density(&[spectrum(&[0.5])], Window::new(0.0, 4.0).unwrap(), 4).unwrap();
        assert_eq!(scan.empty, vec![false, true, true, true]);
    }

    #[test]
    fn file_round_trip_and_errors() {
        let text = "# header\n1.0\n0.5\n2.0\n\n3\n4 5\n";
        let got = read_spectra(text.as_bytes(), "mem").unwrap();
        assert_eq!(got.spectra.len(), 2);
        assert_eq!(got.spectra[0].eigenvalues, vec![0.5, 1.0, 2.0]);
        assert_eq!(got.unsorted_groups, 1);
        assert!(read_spectra("".as_bytes(), "mem").unwrap().spectra.is_empty());
        match read_spectra("1\n2\nx\n".as_bytes(), "mem") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let spectra = vec![spectrum(&[0.1, 1.0 / 3.0, 7.25e-9]), spectrum(&[-2.0, 1e10])];
        let mut buf = Vec::new();
        write_spectra(&mut buf, &spectra).unwrap();
        assert_eq!(read_spectra(&buf[..], "mem").unwrap().spectra, spectra);
    }
}

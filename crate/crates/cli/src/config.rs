//! Option resolution: command-line flags over `--config` file over preset
//! over built-in defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use wigmix_core::spectra::{Family, Parity, Window};
use wigmix_core::surmise::{Coupling, TransitionKind};

use crate::Failure;

/// Declares an all-`Option` flag set that doubles as a config-file table,
/// with a field-wise merge where `self` wins.
macro_rules! knobs {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case", deny_unknown_fields)]
        pub struct $name {
            $($(#[$fmeta])* #[arg(long)] pub $field: Option<$ty>,)*
        }

        impl $name {
            pub fn or(self, other: Self) -> Self {
                Self { $($field: self.$field.or(other.$field),)* }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// N = 200, 10⁴ matrices.
    Desk,
    /// N = 400, 5·10⁴ matrices.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileArg {
    Gaussian,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    All,
    S1,
    S2,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::All => Family::All,
            FamilyArg::S1 => Family::S1,
            FamilyArg::S2 => Family::S2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

/// `lo:hi` on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WindowArg(pub Window);

impl FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("window must be lo:hi, got {s:?}"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad window bound {lo:?}"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad window bound {hi:?}"))?;
        Window::new(lo, hi).map(WindowArg).map_err(|e| e.to_string())
    }
}

impl TryFrom<String> for WindowArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<WindowArg> for String {
    fn from(w: WindowArg) -> String {
        format!("{}:{}", w.0.lo, w.0.hi)
    }
}

/// Transition kind by its kebab-case name (`poisson-gue`, `pure-2`, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct KindArg(pub TransitionKind);

impl FromStr for KindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(KindArg).map_err(|e: wigmix_core::Error| e.to_string())
    }
}

impl TryFrom<String> for KindArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<KindArg> for String {
    fn from(k: KindArg) -> String {
        k.0.to_string()
    }
}

/// Comma-separated list flag, e.g. `0.02,0.08,inf` or `poisson-goe,pure-1`.
macro_rules! list_arg {
    ($(#[$meta:meta])* $name:ident, $elem:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(pub Vec<$elem>);

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                s.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<$elem>().map_err(|e| format!("{t:?}: {e}")))
                    .collect::<Result<_, _>>()
                    .map($name)
            }
        }

        impl TryFrom<String> for $name {
            type Error = String;

            fn try_from(s: String) -> Result<Self, String> {
                s.parse()
            }
        }

        impl From<$name> for String {
            fn from(l: $name) -> String {
                l.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
        }
    };
}

list_arg!(
    /// Couplings; `0` and `inf` are the pure endpoints.
    Couplings,
    Coupling
);
list_arg!(Kinds, TransitionKind);

knobs!(EvalArgs {
    /// Spacing family, e.g. poisson-gse, goe-gue, gse-gue-s2, pure-2.
    kind: KindArg,
    /// Couplings, comma separated; 0 and inf select the pure limits.
    lambda: Couplings,
    /// Largest s in the table.
    s_max: f64,
    /// Number of s values (including s = 0).
    points: usize,
    /// Add small-s and large-s asymptote columns.
    #[arg(num_args = 0..=1, default_missing_value = "true")]
    asymptotes: bool,
});

knobs!(TransitionArgs {
    /// Mixed kind; selects base, perturbation and spacing family.
    kind: KindArg,
    /// Density-matched coupling Λ.
    capital_lambda: f64,
    /// Raw perturbation strength α; overrides Λ.
    alpha: f64,
    /// Independent eigenvalues per matrix.
    n: usize,
    /// Number of matrices.
    count: usize,
    /// Spectral window lo:hi (default: centre window of the base).
    #[arg(allow_hyphen_values = true)]
    window: WindowArg,
    bins: usize,
    s_max: f64,
    seed: u64,
    /// Replace the GUE perturbation of the gse-gue kinds (1 = GOE).
    perturbation_beta: u8,
    /// Family to fit against (default: kind).
    fit_kind: KindArg,
    /// Spacing family to measure (default: the kind's own).
    family: FamilyArg,
    /// Refuse runs whose estimated time exceeds this many seconds.
    budget_seconds: f64,
});

knobs!(ScanArgs {
    /// Poisson profile of the base.
    profile: ProfileArg,
    /// Mixed kind with a Poisson base, or goe-gse / goe-gue / gue-gse.
    kind: KindArg,
    /// Raw perturbation strength α.
    alpha: f64,
    n: usize,
    count: usize,
    /// Number of equal windows.
    windows: usize,
    /// Scanned range lo:hi (default: profile support or ±0.9 R).
    #[arg(allow_hyphen_values = true)]
    range: WindowArg,
    bins: usize,
    s_max: f64,
    seed: u64,
    budget_seconds: f64,
});

knobs!(GibbsArgs {
    /// Number of s̃ values in the limit-function table.
    points: usize,
    /// Largest s̃ in the table.
    s_max: f64,
});

knobs!(FitExternalArgs {
    /// Spectrum file: blank-line separated groups of eigenvalues.
    file: PathBuf,
    /// Kinds to fit, comma separated (default: all pure and mixed kinds).
    kinds: Kinds,
    #[arg(allow_hyphen_values = true)]
    window: WindowArg,
    family: FamilyArg,
    /// Which spacing of each spectrum is S1; required for s1/s2.
    parity: ParityArg,
    bins: usize,
    s_max: f64,
});

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file whose keys are flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub preset: Option<Preset>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "wigmix-out";
pub const DEFAULT_BUDGET_SECONDS: f64 = 4.0 * 3600.0;

/// Read a config file: flat `key = value` pairs named like the flags, with
/// an optional `[command]` table whose entries take precedence.
pub fn load_section<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>, section: &str) -> Result<T, Failure> {
    let Some(path) = path else { return Ok(T::default()) };
    let bad = |e: String| Failure::Validation(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| bad(e.to_string()))?;
    let mut merged = match doc.remove(section) {
        Some(toml::Value::Table(t)) => t,
        Some(_) => return Err(bad(format!("[{section}] must be a table"))),
        None => toml::Table::new(),
    };
    for (k, v) in doc {
        if !v.is_table() {
            merged.entry(k).or_insert(v);
        }
    }
    toml::Value::Table(merged).try_into().map_err(|e: toml::de::Error| bad(e.to_string()))
}

pub fn preset_sizes(preset: Option<Preset>) -> (usize, usize) {
    match preset.unwrap_or(Preset::Desk) {
        Preset::Desk => (200, 10_000),
        Preset::Paper => (400, 50_000),
    }
}

//! Optional TOML config file. Top-level keys mirror the global flags and
//! one table per subcommand holds that command's flags:
//!
//! ```toml
//! out = "results"
//! format = "csv"
//!
//! [dephase]
//! figure = "3b"
//! monte_carlo = 10000
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{DecomposeArgs, DephaseArgs, GlobalArgs, MetrologyArgs, ReproduceArgs, StateArgs};
use crate::output::Format;
use crate::{CliError, Result};

#[derive(Debug, Default, Deserialize)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub decompose: Option<DecomposeArgs>,
    pub dephase: Option<DephaseArgs>,
    pub metrology: Option<MetrologyArgs>,
    #[serde(rename = "reproduce-all")]
    pub reproduce_all: Option<ReproduceArgs>,
}

const STATE_KEYS: &[&str] = &["state", "n", "p", "phi", "k", "index", "in"];

fn allowed_keys(section: &str) -> Option<Vec<&'static str>> {
    let extra: &[&str] = match section {
        "decompose" => &[],
        "dephase" => &[
            "figure",
            "topology",
            "gamma",
            "damping",
            "omega0",
            "couplings",
            "t_max",
            "points",
            "monte_carlo",
            "seed",
            "max_step",
        ],
        "metrology" => &["figure", "tau", "points"],
        "reproduce-all" => return Some(vec!["goldens", "bless", "seed", "monte_carlo"]),
        _ => return None,
    };
    Some(STATE_KEYS.iter().chain(extra).copied().collect())
}

fn check_keys(path: &Path, table: &toml::Table) -> Result<()> {
    let bad = |msg: String| CliError::Config {
        path: path.to_path_buf(),
        msg,
    };
    for (key, value) in table {
        match key.as_str() {
            "out" | "format" | "threads" => {}
            section => {
                let allowed = allowed_keys(section).ok_or_else(|| bad(format!("unknown key `{section}`")))?;
                let inner = value
                    .as_table()
                    .ok_or_else(|| bad(format!("`{section}` must be a table")))?;
                if let Some(k) = inner.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(bad(format!("unknown key `{section}.{k}`")));
                }
            }
        }
    }
    Ok(())
}

impl ConfigFile {
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let bad = |msg: String| CliError::Config {
            path: path.to_path_buf(),
            msg,
        };
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| bad(e.to_string()))?;
        check_keys(path, &table)?;
        table.try_into().map_err(|e: toml::de::Error| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(path, &text)
    }
}

/// Field-wise fallback: keep `self` where set, else take `other`.
pub trait Merge {
    fn merge(self, other: Self) -> Self;
}

macro_rules! merge_options {
    ($ty:ty { $($field:ident),* } $(, nested $nested:ident)?) => {
        impl Merge for $ty {
            fn merge(self, other: Self) -> Self {
                Self {
                    $($field: self.$field.or(other.$field),)*
                    $($nested: self.$nested.merge(other.$nested),)?
                }
            }
        }
    };
}

merge_options!(GlobalArgs { config, out, format, threads });
merge_options!(StateArgs { state, n, p, phi, k, index, input });
merge_options!(DecomposeArgs {}, nested state);
merge_options!(
    DephaseArgs { figure, topology, gamma, damping, omega0, couplings, t_max, points, monte_carlo, seed, max_step },
    nested state
);
merge_options!(MetrologyArgs { figure, tau, points }, nested state);

impl Merge for ReproduceArgs {
    fn merge(self, other: Self) -> Self {
        Self {
            goldens: self.goldens.or(other.goldens),
            bless: self.bless || other.bless,
            seed: self.seed.or(other.seed),
            monte_carlo: self.monte_carlo.or(other.monte_carlo),
        }
    }
}

impl<T: Merge + Default> Merge for Option<T> {
    fn merge(self, other: Self) -> Self {
        match (self, other) {
            (Some(a), Some(b)) => Some(a.merge(b)),
            (a, b) => a.or(b),
        }
    }
}

impl ConfigFile {
    pub fn global(&self) -> GlobalArgs {
        GlobalArgs {
            config: None,
            out: self.out.clone(),
            format: self.format,
            threads: self.threads,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_parse() {
        let cfg = ConfigFile::parse(
            Path::new("c.toml"),
            "out = \"res\"\nthreads = 2\n[dephase]\nfigure = \"3b\"\ncouplings = [1.0, 0.5]\nstate = \"plus\"\n",
        )
        .unwrap();
        assert_eq!(cfg.out, Some(PathBuf::from("res")));
        let d = cfg.dephase.unwrap();
        assert_eq!(d.couplings, Some(vec![1.0, 0.5]));
        assert_eq!(d.state.state.as_deref(), Some("plus"));
        assert!(d.figure.is_some());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ConfigFile::parse(Path::new("c.toml"), "[dephase]\ngama = 3.0\n").unwrap_err();
        assert!(err.to_string().contains("dephase.gama"), "{err}");
        assert!(ConfigFile::parse(Path::new("c.toml"), "colour = 1\n").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let flags = DephaseArgs {
            gamma: Some(3.0),
            ..Default::default()
        };
        let file = DephaseArgs {
            gamma: Some(5.0),
            damping: Some(7.0),
            state: StateArgs {
                n: Some(2),
                ..Default::default()
            },
            ..Default::default()
        };
        let m = flags.merge(file);
        assert_eq!((m.gamma, m.damping, m.state.n), (Some(3.0), Some(7.0), Some(2)));
    }
}

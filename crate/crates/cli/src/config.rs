//! Run configuration: a TOML file, overridden field by field by command-line flags.
//!
//! ```toml
//! verbosity = 1
//!
//! [sweep]
//! signature = [1, 1]
//! primes = [2, 3]
//! convention = "multiplicative"    # required, here or via --convention
//! grid = [[100.0], [1000.0]]       # or `thresholds = [1000.0]` for a single box
//! precision_bits = 128
//! shards = 8
//! parallel = true
//! cache = "harvest-11.jsonl"       # resumable harvest cache
//! caps = { index = 1000000, conductor = 1000000, discriminant = 1000000000 }
//!
//! [output]
//! path = "sweep.csv"               # default: standard output
//! format = "csv"                   # or "json"
//!
//! [dirichlet]
//! j = 2
//! eps = [0.5, 0.4, 0.3, 0.2]       # diagonal points s = 1 + eps; or `s = [[1.5], [1.2]]`
//!
//! [lmfdb]
//! cache = "data/lmfdb_fixture.json"
//! base_url = "https://www.lmfdb.org"
//! offline = true
//! limit = 10                        # crosscheck the N smallest |disc| fields only
//! ```

use crate::CliError;
use pgeo_core::chamber::{BoxConvention, BoxSpec};
use pgeo_core::harvest::{Caps, SweepConfig};
use pgeo_core::Executor;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub verbosity: Option<u8>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub dirichlet: DirichletSection,
    #[serde(default)]
    pub lmfdb: LmfdbSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub signature: Option<[usize; 2]>,
    pub primes: Option<Vec<u64>>,
    pub convention: Option<BoxConvention>,
    pub thresholds: Option<Vec<f64>>,
    pub grid: Option<Vec<Vec<f64>>>,
    pub precision_bits: Option<u32>,
    pub shards: Option<usize>,
    pub parallel: Option<bool>,
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub caps: CapsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSection {
    pub index: Option<u64>,
    pub conductor: Option<u64>,
    pub discriminant: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletSection {
    pub j: Option<u32>,
    pub eps: Option<Vec<f64>>,
    pub s: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmfdbSection {
    pub cache: Option<PathBuf>,
    pub base_url: Option<String>,
    pub offline: Option<bool>,
    pub limit: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Env(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; each one replaces the file value.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// TOML configuration file
    #[arg(long, short = 'c', global = true)]
    pub config: Option<PathBuf>,
    /// Box convention: linear bounds alpha_k, multiplicative bounds exp(alpha_k)
    #[arg(long, global = true)]
    pub convention: Option<BoxConvention>,
    /// Signature r,s
    #[arg(long, global = true, value_parser = parse_pair)]
    pub signature: Option<[usize; 2]>,
    /// Primes of S, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Box thresholds T_1,...,T_k; repeat for a grid (ascending)
    #[arg(long = "box", global = true, value_parser = parse_floats)]
    pub boxes: Vec<Vec<f64>>,
    /// Coefficient shards for the sweep workers
    #[arg(long, global = true)]
    pub shards: Option<usize>,
    /// Run the sweep on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Starting precision for root isolation
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Harvest cache file (JSONL); reused and extended across runs
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Write the table here instead of standard output
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Table format (default csv)
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Never contact the LMFDB; answer from the fact cache only
    #[arg(long, global = true)]
    pub offline: bool,
    /// LMFDB fact cache (JSON)
    #[arg(long, global = true)]
    pub lmfdb_cache: Option<PathBuf>,
    /// LMFDB base URL
    #[arg(long, global = true)]
    pub lmfdb_url: Option<String>,
    /// Cross-check only the N smallest |disc| fields
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Smoothing order j of the Dirichlet series
    #[arg(long, global = true)]
    pub j: Option<u32>,
    /// Diagonal points s = 1 + eps, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Option<Vec<f64>>,
    /// A point s_1,...,s_k; repeatable
    #[arg(long = "s", global = true, value_parser = parse_floats, allow_negative_numbers = true)]
    pub points: Vec<Vec<f64>>,
    /// More logging; repeat for debug and trace
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn parse_pair(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|e| format!("{x}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected r,s".to_string())
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}"))).collect()
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Box of the harvest: the last grid entry.
    pub sweep: SweepConfig,
    pub grid: Vec<BoxSpec>,
    pub harvest_cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub verbosity: u8,
    pub offline: bool,
    pub lmfdb_cache: Option<PathBuf>,
    pub lmfdb_url: Option<String>,
    pub limit: Option<usize>,
    pub j: u32,
    pub points: Vec<Vec<f64>>,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, o: &Overrides) -> Result<Self, CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let sw = file.sweep;
        let Some(convention) = o.convention.or(sw.convention) else {
            return bad("box convention not set: pass --convention linear|multiplicative or set sweep.convention".into());
        };
        let Some([r, s]) = o.signature.or(sw.signature) else {
            return bad("signature not set (--signature r,s or sweep.signature)".into());
        };
        let primes = o.primes.clone().or(sw.primes).unwrap_or_else(|| vec![2, 3]);
        let raw_grid = if !o.boxes.is_empty() {
            o.boxes.clone()
        } else {
            match (sw.grid, sw.thresholds) {
                (Some(_), Some(_)) => return bad("give sweep.grid or sweep.thresholds, not both".into()),
                (Some(g), None) => g,
                (None, Some(t)) => vec![t],
                (None, None) => return bad("no box: pass --box T1,... or set sweep.grid".into()),
            }
        };
        if raw_grid.is_empty() {
            return bad("empty box grid".into());
        }
        let grid = raw_grid
            .into_iter()
            .map(|t| BoxSpec::new(t, convention).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sweep = SweepConfig::new((r, s), &primes, grid.last().unwrap().clone());
        if let Some(b) = o.precision_bits.or(sw.precision_bits) {
            sweep.precision_bits = b;
        }
        if let Some(n) = o.shards.or(sw.shards) {
            sweep.shards = n;
        }
        let defaults = Caps::default();
        sweep.caps = Caps {
            index: sw.caps.index.unwrap_or(defaults.index),
            conductor: sw.caps.conductor.unwrap_or(defaults.conductor),
            discriminant: sw.caps.discriminant.unwrap_or(defaults.discriminant),
        };
        sweep.executor = if o.sequential || sw.parallel == Some(false) { Executor::Sequential } else { Executor::Parallel };
        sweep.validate().map_err(|e| CliError::Config(e.to_string()))?;
        for b in &grid {
            if b.dim() != sweep.rank() {
                return bad(format!("box {:?} has {} thresholds, the unit rank is {}", b.thresholds, b.dim(), sweep.rank()));
            }
        }
        for w in grid.windows(2) {
            if w[0].thresholds.iter().zip(&w[1].thresholds).any(|(a, b)| a > b) {
                return bad(format!("grid must be ascending: {:?} before {:?}", w[0].thresholds, w[1].thresholds));
            }
        }

        let d = file.dirichlet;
        let j = o.j.or(d.j).unwrap_or(0);
        let points = if !o.points.is_empty() {
            o.points.clone()
        } else if let Some(eps) = o.eps.clone() {
            eps.iter().map(|e| vec![1.0 + e; sweep.rank()]).collect()
        } else {
            match (d.s, d.eps) {
                (Some(_), Some(_)) => return bad("give dirichlet.s or dirichlet.eps, not both".into()),
                (Some(s), None) => s,
                (None, Some(eps)) => eps.iter().map(|e| vec![1.0 + e; sweep.rank()]).collect(),
                (None, None) => vec![],
            }
        };
        if let Some(p) = points.iter().find(|p| p.len() != sweep.rank()) {
            return bad(format!("point {p:?} needs {} coordinates", sweep.rank()));
        }

        Ok(RunConfig {
            sweep,
            grid,
            harvest_cache: o.cache.clone().or(sw.cache),
            output: o.output.clone().or(file.output.path),
            format: o.format.or(file.output.format).unwrap_or_default(),
            verbosity: o.verbose.max(file.verbosity.unwrap_or(0)),
            offline: o.offline || file.lmfdb.offline.unwrap_or(false),
            lmfdb_cache: o.lmfdb_cache.clone().or(file.lmfdb.cache),
            lmfdb_url: o.lmfdb_url.clone().or(file.lmfdb.base_url),
            limit: o.limit.or(file.lmfdb.limit),
            j,
            points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(s: &str) -> FileConfig {
        toml::from_str(s).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let f = file("[sweep]\nsignature=[1,1]\nconvention='linear'\ngrid=[[3.0],[4.0]]\nshards=3\n");
        let o = Overrides { convention: Some(BoxConvention::Multiplicative), shards: Some(5), ..Default::default() };
        let rc = RunConfig::resolve(f, &o).unwrap();
        assert_eq!(rc.sweep.box_spec.convention, BoxConvention::Multiplicative);
        assert_eq!(rc.sweep.shards, 5);
        assert_eq!(rc.grid.len(), 2);
        assert_eq!(rc.sweep.box_spec.thresholds, vec![4.0]);
    }

    #[test]
    fn missing_convention_is_an_error() {
        let f = file("[sweep]\nsignature=[1,1]\nthresholds=[100.0]\n");
        let e = RunConfig::resolve(f, &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("convention"), "{e}");
    }

    #[test]
    fn bad_files_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[sweep]\nsignatur=[1,1]\n").is_err());
        let f = file("[sweep]\nsignature=[3,0]\nconvention='linear'\nthresholds=[4.0]\n");
        assert!(RunConfig::resolve(f, &Overrides::default()).is_err());
        let f = file("[sweep]\nsignature=[1,1]\nconvention='linear'\ngrid=[[5.0],[4.0]]\n");
        assert!(RunConfig::resolve(f, &Overrides::default()).is_err());
        let f = file("[sweep]\nsignature=[1,1]\nconvention='linear'\nthresholds=[-1.0]\n");
        assert!(RunConfig::resolve(f, &Overrides::default()).is_err());
    }

    #[test]
    fn eps_gives_diagonal_points() {
        let f = file("[sweep]\nsignature=[3,0]\nconvention='linear'\nthresholds=[4.0,4.0]\n[dirichlet]\nj=2\neps=[0.5,0.25]\n");
        let rc = RunConfig::resolve(f, &Overrides::default()).unwrap();
        assert_eq!(rc.points, vec![vec![1.5, 1.5], vec![1.25, 1.25]]);
        assert_eq!(rc.j, 2);
    }
}

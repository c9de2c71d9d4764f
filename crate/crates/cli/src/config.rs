//! Job configuration: command-line flags merged over an optional flat
//! `key = value` file whose keys are the flag names.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lame_core::{Complex64 as C, ExtComplex};

use crate::error::CliError;
use crate::text::{parse_complex, parse_ext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Lattice invariants: eta1, eta2, g2, g3, e_k and the Legendre residual
    Lattice,
    /// Numerical monodromy of the equation with accessory parameter A
    Monodromy,
    /// Accessory parameter realizing the monodromy data C, checked numerically
    RhSolve,
    /// Randomized checks of the monodromy-data identities
    VerifyThm1,
    /// Explicit Painleve VI solutions along a tau grid with residuals
    Pvi,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lattice => "lattice",
            Command::Monodromy => "monodromy",
            Command::RhSolve => "rh-solve",
            Command::VerifyThm1 => "verify-thm1",
            Command::Pvi => "pvi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Lattice parameter, e.g. "0.1+1.2i"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Singular point p
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Accessory parameter A
    #[arg(long = "A", global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Monodromy data C, or "inf"
    #[arg(long = "C", global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Case: 0 generic, 1..3 half period
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Target tolerance
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Straight tau grid "t0:t1:N"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// RNG seed
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Samples per case (verify-thm1)
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Output format
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Flat key = value file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "lame", version, about = "Monodromy of the generalized Lame equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// A straight grid of `count` points from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: C,
    pub end: C,
    pub count: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Grid, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [t0, t1, n] = parts[..] else {
            return Err(CliError::Input(format!("grid '{s}' is not of the form t0:t1:N")));
        };
        let count: usize = n
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("grid count '{n}' is not a positive integer")))?;
        if count < 3 {
            return Err(CliError::Input(format!("grid needs at least 3 points, got {count}")));
        }
        Ok(Grid {
            start: parse_complex(t0)?,
            end: parse_complex(t1)?,
            count,
        })
    }

    pub fn step(&self) -> C {
        (self.end - self.start) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<C> {
        let h = self.step();
        (0..self.count).map(|m| self.start + h * m as f64).collect()
    }

    /// Same endpoints, half the step.
    pub fn refined(&self) -> Grid {
        Grid {
            count: 2 * self.count - 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub tau: Option<C>,
    pub p: Option<C>,
    pub a: Option<C>,
    pub c: Option<ExtComplex>,
    pub k: Option<usize>,
    pub tol: f64,
    pub grid: Option<Grid>,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_SAMPLES: usize = 20;

const KEYS: [&str; 11] = ["tau", "p", "A", "C", "k", "tol", "grid", "seed", "samples", "out", "format"];

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Input(format!("config line {}: expected key = value", n + 1)));
        };
        let key = key.trim().trim_start_matches("--");
        if !KEYS.contains(&key) {
            return Err(CliError::Input(format!("config line {}: unknown key '{key}'", n + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

impl Flags {
    fn entries(&self) -> BTreeMap<String, String> {
        let fields = [
            ("tau", &self.tau),
            ("p", &self.p),
            ("A", &self.a),
            ("C", &self.c),
            ("k", &self.k),
            ("tol", &self.tol),
            ("grid", &self.grid),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("out", &self.out),
            ("format", &self.format),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect()
    }
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Input(format!("invalid value '{v}' for {key}")))
}

impl JobConfig {
    /// Merges `flags` over `file` (the contents of a config file, if any).
    pub fn resolve(command: Command, flags: &Flags, file: Option<&str>) -> Result<JobConfig, CliError> {
        let mut map = match file {
            Some(text) => parse_config_file(text)?,
            None => BTreeMap::new(),
        };
        map.extend(flags.entries());
        let get = |k: &str| map.get(k).map(String::as_str);
        let k = get("k").map(|v| number::<usize>("k", v)).transpose()?;
        if k.is_some_and(|k| k > 3) {
            return Err(CliError::Input(format!("k must be 0, 1, 2 or 3, got {}", k.unwrap_or(0))));
        }
        let format = match get("format") {
            None => Format::default(),
            Some(v) => Format::from_str(v, true)
                .map_err(|_| CliError::Input(format!("format must be json or csv, got '{v}'")))?,
        };
        Ok(JobConfig {
            command,
            tau: get("tau").map(parse_complex).transpose()?,
            p: get("p").map(parse_complex).transpose()?,
            a: get("A").map(parse_complex).transpose()?,
            c: get("C").map(parse_ext).transpose()?,
            k,
            tol: get("tol").map(|v| number("tol", v)).transpose()?.unwrap_or(DEFAULT_TOL),
            grid: get("grid").map(Grid::parse).transpose()?,
            seed: get("seed").map(|v| number("seed", v)).transpose()?.unwrap_or(0),
            samples: get("samples")
                .map(|v| number("samples", v))
                .transpose()?
                .unwrap_or(DEFAULT_SAMPLES),
            out: get("out").map(PathBuf::from),
            format,
        })
    }

    pub fn require<T: Copy>(&self, value: Option<T>, name: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::Input(format!("{} requires --{name}", self.command.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = "# job\ntau = 0.1+1.2i\nk = 2\nformat = csv  # trailing\n";
        let flags = Flags {
            k: Some("1".into()),
            ..Flags::default()
        };
        let cfg = JobConfig::resolve(Command::Pvi, &flags, Some(file)).unwrap();
        assert_eq!(cfg.tau, Some(C::new(0.1, 1.2)));
        assert_eq!(cfg.k, Some(1));
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn bad_files_and_values() {
        assert!(parse_config_file("colour = red").is_err());
        assert!(parse_config_file("tau").is_err());
        let flags = Flags {
            k: Some("7".into()),
            ..Flags::default()
        };
        assert!(JobConfig::resolve(Command::Pvi, &flags, None).is_err());
    }

    #[test]
    fn grid_spec() {
        let g = Grid::parse("0.1+1.1i:0.3+1.1i:21").unwrap();
        assert_eq!(g.count, 21);
        assert!((g.step() - C::new(0.01, 0.0)).norm() < 1e-15);
        assert_eq!(g.points().last().copied(), Some(g.start + g.step() * 20.0));
        assert_eq!(g.refined().count, 41);
        assert!(Grid::parse("1i:2i").is_err());
        assert!(Grid::parse("1i:2i:2").is_err());
    }
}

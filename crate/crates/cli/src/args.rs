use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{CharacterKind, CharacterSource, RepKind, RepSource, RunConfig, OUTPUT_DIR_ENV};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "anosov-zeta", version, about = "Zeta functions of Anosov surface-group representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Overrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the coding automaton, validate it and write automaton.json.
    Automaton,
    /// Enumerate primitive classes into orbits.jsonl.
    Orbits,
    /// Estimate the entropy into entropy.json.
    Entropy,
    /// Evaluate the zeta function by Euler product and by determinants.
    Zeta,
    /// Evaluate L-functions twisted by a unitary character.
    Lfun,
    /// Compare the orbit counting function with li(e^{hT}).
    Count,
    /// Sample log|F(s)| on a rectangle.
    Scan,
    /// Sample attracting fixed points of class representatives.
    Limitset,
    /// Run every consistency check; exits 2 if any fails.
    Verify,
}

/// Flags; each one overrides the matching config-file field.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub genus: Option<usize>,
    /// Representation JSON file (default: the regular-octagon Fuchsian one).
    #[arg(long, global = true)]
    pub rep: Option<PathBuf>,
    /// Dimension of a symmetric-power lift of the representation.
    #[arg(long, global = true)]
    pub lift: Option<usize>,
    /// Prebuilt automaton JSON file.
    #[arg(long, global = true)]
    pub automaton: Option<PathBuf>,
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// `top` or `spread`.
    #[arg(long, global = true)]
    pub weight_mode: Option<String>,
    /// Length cutoff of the orbit database.
    #[arg(long, global = true, conflicts_with = "max_weight")]
    pub length: Option<usize>,
    /// Weight cutoff of the orbit database.
    #[arg(long, global = true)]
    pub max_weight: Option<f64>,
    /// Longest trace length.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Fredholm coefficients per determinant.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Shifts in the Selberg product.
    #[arg(long, global = true)]
    pub shifts: Option<usize>,
    /// Evaluation point `re,im`; repeatable.
    #[arg(long = "s", global = true, value_parser = parse_point, allow_hyphen_values = true)]
    pub s: Vec<[f64; 2]>,
    /// Counting threshold; repeatable.
    #[arg(long = "t", global = true, allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Abelian character angles, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "character")]
    pub theta: Option<Vec<f64>>,
    /// Character JSON file.
    #[arg(long, global = true)]
    pub character: Option<PathBuf>,
    /// Orbit database to load instead of enumerating.
    #[arg(long, global = true)]
    pub db: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Longest length checked against the brute-force oracles.
    #[arg(long, global = true)]
    pub validate_n: Option<usize>,
    /// Ceiling on the number of enumerated classes.
    #[arg(long, global = true)]
    pub max_records: Option<usize>,
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number {t:?} in point {s:?}"));
    match parts[..] {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

impl Overrides {
    /// Loads the config file (or defaults) and applies the flags on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(g) = self.genus {
            c.genus = g;
        }
        if let Some(p) = &self.rep {
            c.representation = RepSource { source: RepKind::File, path: Some(p.clone()), lift: c.representation.lift };
        }
        if let Some(d) = self.lift {
            c.representation.lift = Some(d);
        }
        if let Some(p) = &self.automaton {
            c.automaton.path = Some(p.clone());
        }
        if let Some(r) = self.radius {
            c.automaton.radius = r;
        }
        if let Some(m) = &self.weight_mode {
            c.weight_mode = m.clone();
        }
        if let Some(n) = self.length {
            c.cutoff.length = Some(n);
            c.cutoff.weight = None;
        }
        if let Some(t) = self.max_weight {
            c.cutoff.length = None;
            c.cutoff.weight = Some(t);
        }
        if let Some(n) = self.n_max {
            c.truncation.n_max = Some(n);
        }
        if let Some(n) = self.terms {
            c.truncation.terms = n;
            c.grid.terms = Some(n);
        }
        if let Some(n) = self.shifts {
            c.truncation.selberg_shifts = n;
        }
        if !self.s.is_empty() {
            c.s = self.s.clone();
        }
        if !self.t.is_empty() {
            c.t_values = self.t.clone();
        }
        if let Some(theta) = &self.theta {
            c.character = CharacterSource { source: CharacterKind::Theta, theta: theta.clone(), path: None };
        }
        if let Some(p) = &self.character {
            c.character = CharacterSource { source: CharacterKind::File, theta: Vec::new(), path: Some(p.clone()) };
        }
        if let Some(p) = &self.db {
            c.database = Some(p.clone());
        }
        if let Some(p) = &self.out {
            c.output_dir = p.clone();
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.threads {
            c.threads = t;
        }
        if let Some(n) = self.validate_n {
            c.validate_n = n;
        }
        if let Some(n) = self.max_records {
            c.max_records = n;
        }
        c.validate()?;
        Ok(c)
    }
}

impl Cli {
    pub fn try_from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args)
    }
}

/// Rejects paths that do not exist before any work starts.
pub fn check_inputs(c: &RunConfig) -> Result<()> {
    let paths = [&c.representation.path, &c.automaton.path, &c.character.path, &c.database];
    for p in paths.into_iter().flatten() {
        if !p.exists() {
            return Err(CliError::Config(format!("{} does not exist", p.display())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Truncation;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_from_args(std::iter::once("anosov-zeta").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_defaults() {
        let cli = parse(&["zeta", "--length", "6", "--s", "3,0.7", "--s", "2.5", "--terms", "10"]);
        assert_eq!(cli.command, Command::Zeta);
        let c = cli.opts.resolve().unwrap();
        assert_eq!(c.cutoff.length, Some(6));
        assert_eq!(c.s, vec![[3.0, 0.7], [2.5, 0.0]]);
        assert_eq!(c.truncation, Truncation { terms: 10, ..Default::default() });
    }

    #[test]
    fn max_weight_replaces_length() {
        let c = parse(&["count", "--max-weight", "4"]).opts.resolve().unwrap();
        assert_eq!(c.cutoff.length, None);
        assert_eq!(c.cutoff.weight, Some(4.0));
    }

    #[test]
    fn theta_list() {
        let c = parse(&["lfun", "--theta", "0.1,-0.2,0.3,0"]).opts.resolve().unwrap();
        assert_eq!(c.character.theta, vec![0.1, -0.2, 0.3, 0.0]);
    }

    #[test]
    fn bad_point_rejected() {
        assert!(Cli::try_from_args(["anosov-zeta", "zeta", "--s", "1,2,3"]).is_err());
    }

    #[test]
    fn genus_one_is_config_error() {
        let err = parse(&["verify", "--genus", "1"]).opts.resolve().unwrap_err();
        assert_eq!(err.status(), crate::error::ExitStatus::Config);
    }
}

use std::path::{Path, PathBuf};

use anosov_zeta_core::orbit::{Cutoff, WeightMode};
use anosov_zeta_core::zeta::ScanTarget;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable overriding the output directory.
pub const OUTPUT_DIR_ENV: &str = "ANOSOV_ZETA_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Octagon,
    File,
}

/// Where the representation comes from, optionally lifted by a symmetric power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSource {
    pub source: RepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Target dimension of a symmetric-power lift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<usize>,
}

impl Default for RepSource {
    fn default() -> Self {
        RepSource { source: RepKind::Octagon, path: None, lift: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutomatonSource {
    /// Word-difference radius of the built automaton.
    pub radius: usize,
    /// Prebuilt automaton file used instead of building one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for AutomatonSource {
    fn default() -> Self {
        AutomatonSource { radius: 4, path: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterKind {
    None,
    Theta,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CharacterSource {
    pub source: CharacterKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for CharacterSource {
    fn default() -> Self {
        CharacterSource { source: CharacterKind::None, theta: Vec::new(), path: None }
    }
}

/// Exactly one of `length` and `weight`; a file giving only one leaves the other unset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec { length: Some(8), weight: None }
    }
}

impl CutoffSpec {
    pub fn to_cutoff(&self) -> Result<Cutoff> {
        match (self.length, self.weight) {
            (Some(n), None) => Ok(Cutoff::Length(n)),
            (None, Some(t)) if t.is_finite() && t >= 0.0 => Ok(Cutoff::Weight(t)),
            (None, Some(t)) => Err(CliError::Config(format!("weight cutoff must be finite and non-negative, got {t}"))),
            _ => Err(CliError::Config("cutoff needs exactly one of length or weight".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    /// Longest period used for traces; defaults to the database length cutoff.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Fredholm coefficients per determinant.
    pub terms: usize,
    /// Shifts `n = 0..=selberg_shifts` in the Selberg product.
    pub selberg_shifts: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { n_max: None, terms: 12, selberg_shifts: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// `zeta`, `selberg` or `detJ`.
    pub target: String,
    /// Real range; defaults to the entropy estimate ± 0.3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re: Option<[f64; 2]>,
    /// Imaginary range; defaults to ± 0.3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 2]>,
    pub nx: usize,
    pub ny: usize,
    /// Extra shifts of the determinant-based Selberg product.
    pub shifts: usize,
    /// Fredholm coefficients; defaults to the trace length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { target: "selberg".into(), re: None, im: None, nx: 41, ny: 41, shifts: 3, terms: None }
    }
}

/// Full description of a run. Every field has a default; a config file
/// overrides defaults and command-line flags override the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub genus: usize,
    pub representation: RepSource,
    pub automaton: AutomatonSource,
    pub weight_mode: String,
    pub cutoff: CutoffSpec,
    pub truncation: Truncation,
    /// Evaluation points `[re, im]`; empty means `h + 1` and `h + 1 + 0.7i`.
    pub s: Vec<[f64; 2]>,
    pub grid: GridSpec,
    /// Counting thresholds; empty means the completeness weights of the
    /// three longest lengths.
    pub t_values: Vec<f64>,
    pub character: CharacterSource,
    /// Orbit database to load instead of enumerating.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub database: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Seed of the auxiliary fingerprint representation.
    pub seed: u64,
    pub threads: usize,
    /// Longest length checked against the brute-force oracles.
    pub validate_n: usize,
    /// Longest class length sampled by `limitset`.
    pub limitset_length: usize,
    /// Ceiling on the number of enumerated classes; exceeding it exits with status 3.
    pub max_records: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            genus: 2,
            representation: RepSource::default(),
            automaton: AutomatonSource::default(),
            weight_mode: "top".into(),
            cutoff: CutoffSpec::default(),
            truncation: Truncation::default(),
            s: Vec::new(),
            grid: GridSpec::default(),
            t_values: Vec::new(),
            character: CharacterSource::default(),
            database: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
            threads: 1,
            validate_n: 5,
            limitset_length: 5,
            max_records: 20_000_000,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
    }

    /// Range checks that do not need any file.
    pub fn validate(&self) -> Result<()> {
        if self.genus < 2 {
            return Err(CliError::Config(format!("genus must be at least 2, got {}", self.genus)));
        }
        match (self.representation.source, &self.representation.path) {
            (RepKind::File, None) => return Err(CliError::Config("representation file needs a path".into())),
            (RepKind::Octagon, Some(_)) => {
                return Err(CliError::Config("octagon representation takes no path".into()))
            }
            _ => {}
        }
        if let Some(d) = self.representation.lift {
            if !(3..=12).contains(&d) {
                return Err(CliError::Config(format!("lift dimension must be in 3..=12, got {d}")));
            }
        }
        if self.automaton.radius < 2 {
            return Err(CliError::Config("automaton radius must be at least 2".into()));
        }
        self.weight_mode()?;
        self.cutoff.to_cutoff()?;
        if let Some(0) = self.truncation.n_max {
            return Err(CliError::Config("n_max must be positive".into()));
        }
        if self.s.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Config("evaluation points must be finite".into()));
        }
        self.scan_target()?;
        if self.grid.nx == 0 || self.grid.ny == 0 {
            return Err(CliError::Config("scan grid needs at least one node per axis".into()));
        }
        for r in [self.grid.re, self.grid.im].into_iter().flatten() {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(CliError::Config(format!("bad grid range {r:?}")));
            }
        }
        if self.t_values.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Config("counting thresholds must be finite".into()));
        }
        match self.character.source {
            CharacterKind::Theta if self.character.theta.len() != 2 * self.genus => {
                return Err(CliError::Config(format!("theta needs {} entries", 2 * self.genus)))
            }
            CharacterKind::File if self.character.path.is_none() => {
                return Err(CliError::Config("character file needs a path".into()))
            }
            _ => {}
        }
        if self.threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        if self.max_records == 0 {
            return Err(CliError::Config("max_records must be positive".into()));
        }
        if self.limitset_length == 0 {
            return Err(CliError::Config("limitset length must be positive".into()));
        }
        Ok(())
    }

    pub fn weight_mode(&self) -> Result<WeightMode> {
        WeightMode::parse(&self.weight_mode).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn scan_target(&self) -> Result<ScanTarget> {
        ScanTarget::parse(&self.grid.target).map_err(|e| CliError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, embedded in every output header.
    /// The output directory and thread count do not affect results and are left out.
    pub fn digest(&self) -> String {
        let canonical = RunConfig { output_dir: PathBuf::new(), threads: 1, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        anosov_zeta_core::orbit::sha256_hex(json.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn genus_one_rejected() {
        let c = RunConfig { genus: 1, ..Default::default() };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"genus": 3, "cutoff": {"length": 5}}"#).unwrap();
        assert_eq!(c.genus, 3);
        assert_eq!(c.truncation.terms, 12);
        assert_eq!(c.cutoff.to_cutoff().unwrap(), Cutoff::Length(5));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"gneus": 3}"#).is_err());
    }

    #[test]
    fn weight_only_cutoff() {
        let c: RunConfig = serde_json::from_str(r#"{"cutoff": {"weight": 3.5}}"#).unwrap();
        assert_eq!(c.cutoff.to_cutoff().unwrap(), Cutoff::Weight(3.5));
    }

    #[test]
    fn both_cutoffs_rejected() {
        let c: RunConfig = serde_json::from_str(r#"{"cutoff": {"length": 5, "weight": 3.0}}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig { seed: 1, ..Default::default() };
        assert_eq!(a.digest(), RunConfig::default().digest());
        assert_ne!(a.digest(), b.digest());
        let c = RunConfig { output_dir: "elsewhere".into(), threads: 4, ..Default::default() };
        assert_eq!(a.digest(), c.digest());
    }
}

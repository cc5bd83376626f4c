use std::collections::BTreeMap;
use std::path::Path;

use anosov_zeta_core::group::{parse_word, symbol, GroupPresentation};
use anosov_zeta_core::rep::{CMat, UnitaryCharacter};
use anosov_zeta_core::Complex64;
use serde::{Deserialize, Serialize};

use super::read_json;
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterMode {
    Abelian,
    Explicit,
}

/// `{mode, N, theta}` or `{mode, N, matrices: {symbol: row-major [re, im]}, tolerance}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    pub mode: CharacterMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-9
}

pub fn character_to_json(chi: &UnitaryCharacter) -> CharacterFile {
    match chi {
        UnitaryCharacter::Abelian { theta } => CharacterFile {
            mode: CharacterMode::Abelian,
            n: 1,
            theta: theta.clone(),
            matrices: BTreeMap::new(),
            tolerance: default_tolerance(),
        },
        UnitaryCharacter::Explicit { mats, tolerance } => CharacterFile {
            mode: CharacterMode::Explicit,
            n: mats[0].dim(),
            theta: Vec::new(),
            matrices: mats
                .iter()
                .enumerate()
                .step_by(2)
                .map(|(x, m)| (symbol(x as u8), m.as_slice().iter().map(|z| [z.re, z.im]).collect()))
                .collect(),
            tolerance: *tolerance,
        },
    }
}

pub fn character_from_json(p: &GroupPresentation, f: &CharacterFile) -> Result<UnitaryCharacter> {
    match f.mode {
        CharacterMode::Abelian => {
            if f.n != 1 || !f.matrices.is_empty() {
                return Err(CliError::Config("abelian characters have N = 1 and no matrices".into()));
            }
            Ok(UnitaryCharacter::abelian(p, f.theta.clone())?)
        }
        CharacterMode::Explicit => {
            let ngen = p.num_generators();
            let mut slots: Vec<Option<CMat>> = vec![None; ngen];
            for (sym, data) in &f.matrices {
                let x = match parse_word(sym)?.letters() {
                    [x] if (*x as usize) < ngen => *x as usize,
                    _ => return Err(CliError::Config(format!("unknown generator symbol {sym:?}"))),
                };
                let entries = data.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                slots[x] = Some(CMat::from_row_major(f.n, entries)?);
            }
            let mats: Vec<CMat> = if (1..ngen).step_by(2).all(|x| slots[x].is_none()) {
                slots.into_iter().step_by(2).collect::<Option<_>>()
            } else {
                slots.into_iter().collect::<Option<_>>()
            }
            .ok_or_else(|| CliError::Config("character matrices missing for some generators".into()))?;
            Ok(UnitaryCharacter::explicit(p, mats, f.tolerance)?)
        }
    }
}

pub fn load_character(p: &GroupPresentation, path: &Path) -> Result<UnitaryCharacter> {
    character_from_json(p, &read_json(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_round_trip() {
        let p = GroupPresentation::surface(2).unwrap();
        let chi = UnitaryCharacter::abelian(&p, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(character_from_json(&p, &character_to_json(&chi)).unwrap(), chi);
    }

    #[test]
    fn explicit_diagonal_character() {
        // commuting diagonal unitaries satisfy the relator
        let p = GroupPresentation::surface(2).unwrap();
        let diag = |a: f64, b: f64| vec![[a.cos(), a.sin()], [0.0, 0.0], [0.0, 0.0], [b.cos(), b.sin()]];
        let text = serde_json::json!({
            "mode": "explicit",
            "N": 2,
            "matrices": {"a1": diag(0.3, 1.1), "b1": diag(-0.7, 0.2), "a2": diag(0.0, 2.0), "b2": diag(1.0, 1.0)},
        });
        let f: CharacterFile = serde_json::from_value(text).unwrap();
        let chi = character_from_json(&p, &f).unwrap();
        assert_eq!(chi.dim(), 2);
        assert_eq!(character_from_json(&p, &character_to_json(&chi)).unwrap(), chi);
    }

    #[test]
    fn non_unitary_rejected() {
        let p = GroupPresentation::surface(2).unwrap();
        let m = vec![[2.0, 0.0]];
        let matrices = ["a1", "b1", "a2", "b2"].iter().map(|s| (s.to_string(), m.clone())).collect();
        let f = CharacterFile { mode: CharacterMode::Explicit, n: 1, theta: vec![], matrices, tolerance: 1e-9 };
        assert!(matches!(character_from_json(&p, &f), Err(CliError::Engine(_))));
    }
}

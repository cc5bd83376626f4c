use std::collections::BTreeMap;
use std::path::Path;

use anosov_zeta_core::group::{parse_word, symbol, GroupPresentation};
use anosov_zeta_core::linalg::Mat;
use anosov_zeta_core::orbit::sha256_hex;
use anosov_zeta_core::rep::{Representation, DEFAULT_TOLERANCE};
use serde::{Deserialize, Serialize};

use super::read_json;
use crate::error::{CliError, Result};

/// `{dimension, genus, matrices: {symbol: row-major}, tolerance}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    pub dimension: usize,
    pub genus: usize,
    pub matrices: BTreeMap<String, Vec<f64>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Positive generators only; inverses are implied.
pub fn representation_to_json(rep: &Representation) -> RepresentationFile {
    let matrices = (0..4 * rep.genus())
        .step_by(2)
        .map(|x| (symbol(x as u8), rep.generator(x as u8).as_slice().to_vec()))
        .collect();
    RepresentationFile { dimension: rep.dim(), genus: rep.genus(), matrices, tolerance: rep.tolerance() }
}

/// Accepts either the `2g` positive generators or all `4g` symbols.
pub fn representation_from_json(f: &RepresentationFile) -> Result<Representation> {
    let p = GroupPresentation::surface(f.genus)?;
    let ngen = p.num_generators();
    let mut slots: Vec<Option<Mat>> = vec![None; ngen];
    for (sym, data) in &f.matrices {
        let w = parse_word(sym)?;
        let x = match w.letters() {
            [x] if (*x as usize) < ngen => *x as usize,
            _ => return Err(CliError::Config(format!("unknown generator symbol {sym:?}"))),
        };
        if data.len() != f.dimension * f.dimension {
            return Err(CliError::Config(format!(
                "matrix {sym} has {} entries, expected {}",
                data.len(),
                f.dimension * f.dimension
            )));
        }
        slots[x] = Some(Mat::from_row_major(f.dimension, data.clone())?);
    }
    let positive = (0..ngen).step_by(2).all(|x| slots[x].is_some());
    let negative = (1..ngen).step_by(2).filter(|&x| slots[x].is_some()).count();
    let mats: Vec<Mat> = if positive && negative == 0 {
        slots.into_iter().step_by(2).flatten().collect()
    } else if slots.iter().all(Option::is_some) {
        slots.into_iter().flatten().collect()
    } else {
        return Err(CliError::Config("representation needs every a_i, b_i (and either none or all inverses)".into()));
    };
    Ok(Representation::load(&p, f.dimension, mats, f.tolerance)?)
}

pub fn load_representation(path: &Path) -> Result<Representation> {
    representation_from_json(&read_json(path)?)
}

/// Digest of the canonical JSON form of a representation's generators.
pub fn rep_digest(rep: &Representation) -> String {
    let json = serde_json::to_string(&representation_to_json(rep)).expect("representation serializes");
    sha256_hex(json.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_round_trip() {
        let r = Representation::fuchsian_octagon(2).unwrap();
        let f = representation_to_json(&r);
        assert_eq!(f.matrices.len(), 4);
        let back = representation_from_json(&f).unwrap();
        assert_eq!(back.generators(), r.generators());
        assert_eq!(rep_digest(&back), rep_digest(&r));
    }

    #[test]
    fn identity_matrices_accepted() {
        let id = vec![1.0, 0.0, 0.0, 1.0];
        let matrices = ["a1", "b1", "a2", "b2"].iter().map(|s| (s.to_string(), id.clone())).collect();
        let r = representation_from_json(&RepresentationFile { dimension: 2, genus: 2, matrices, tolerance: 1e-8 }).unwrap();
        assert_eq!(r.relator_sign(), 1);
    }

    #[test]
    fn determinant_two_rejected() {
        let mut f = representation_to_json(&Representation::fuchsian_octagon(2).unwrap());
        f.matrices.insert("a1".into(), vec![2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(representation_from_json(&f), Err(CliError::Engine(_))));
    }

    #[test]
    fn missing_generator_rejected() {
        let mut f = representation_to_json(&Representation::fuchsian_octagon(2).unwrap());
        f.matrices.remove("b2");
        assert!(matches!(representation_from_json(&f), Err(CliError::Config(_))));
    }
}

use std::path::Path;

use anosov_zeta_core::group::{parse_word, symbol, AutomatonReport, CodingAutomaton};
use anosov_zeta_core::Error;
use serde::{Deserialize, Serialize};

use super::{read_json, Meta};
use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub n_max: usize,
    pub path_counts: Vec<u64>,
    pub sphere_sizes: Vec<u64>,
    pub automaton_classes: Vec<u64>,
    pub brute_force_classes: Vec<u64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl ValidationSummary {
    pub fn from_report(r: &AutomatonReport) -> Self {
        ValidationSummary {
            n_max: r.n_max,
            path_counts: r.path_counts.iter().map(|&c| c as u64).collect(),
            sphere_sizes: r.sphere_sizes.clone(),
            automaton_classes: r.automaton_classes.clone(),
            brute_force_classes: r.brute_force_classes.clone(),
            passed: true,
            failure: None,
        }
    }

    pub fn failed(n_max: usize, msg: String) -> Self {
        ValidationSummary {
            n_max,
            path_counts: vec![],
            sphere_sizes: vec![],
            automaton_classes: vec![],
            brute_force_classes: vec![],
            passed: false,
            failure: Some(msg),
        }
    }
}

/// Vertex list, `(from, to, label)` edges and the aperiodicity index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomatonFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub genus: usize,
    pub radius: usize,
    pub start: u32,
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32, String)>,
    #[serde(rename = "aperiodicity_N")]
    pub aperiodicity_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSummary>,
}

pub fn automaton_to_json(a: &CodingAutomaton) -> AutomatonFile {
    AutomatonFile {
        meta: None,
        genus: a.genus(),
        radius: a.radius(),
        start: a.start(),
        vertices: (0..a.num_vertices() as u32).collect(),
        edges: a.edges().into_iter().map(|(f, t, x)| (f, t, symbol(x))).collect(),
        aperiodicity_n: a.aperiodicity(),
        validation: None,
    }
}

/// Rebuilds the automaton and recomputes its aperiodicity index, which
/// must agree with the stored one.
pub fn automaton_from_json(f: &AutomatonFile) -> Result<CodingAutomaton> {
    if f.start != 0 {
        return Err(CliError::Config("the start vertex must be vertex 0".into()));
    }
    if f.vertices.iter().enumerate().any(|(i, &v)| v as usize != i) {
        return Err(CliError::Config("vertices must be numbered 0..n in order".into()));
    }
    let mut edges = Vec::with_capacity(f.edges.len());
    for (from, to, label) in &f.edges {
        let x = match parse_word(label)?.letters() {
            [x] => *x,
            _ => return Err(CliError::Config(format!("bad edge label {label:?}"))),
        };
        edges.push((*from, *to, x));
    }
    let a = CodingAutomaton::from_edges(f.genus, f.vertices.len(), &edges, f.radius, None)?.with_computed_aperiodicity();
    if a.aperiodicity() != f.aperiodicity_n {
        return Err(Error::Validation {
            check: format!("stored aperiodicity {:?} but recomputed {:?}", f.aperiodicity_n, a.aperiodicity()),
            residual: 1.0,
        }
        .into());
    }
    Ok(a)
}

pub fn load_automaton(path: &Path) -> Result<CodingAutomaton> {
    automaton_from_json(&read_json(path)?)
}

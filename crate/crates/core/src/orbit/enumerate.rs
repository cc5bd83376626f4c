use alloc::vec::Vec;

use super::fingerprint::{fingerprint, ClassInvariants, Fingerprinter};
use super::{Cutoff, OrbitDatabase, PrimitiveClassRecord, WeightMode};
use crate::error::{Error, Result};
use crate::group::{CodingAutomaton, Gen, Word};
use crate::rep::{Representation, DEFAULT_PROXIMALITY_TOL};

const DEAD: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationOptions {
    /// Seed of the auxiliary fingerprint representation.
    pub seed: u64,
    pub proximality_tol: f64,
    pub weight_mode: WeightMode,
    /// Digest recorded in the database header.
    pub rep_digest: alloc::string::String,
    /// Ceiling on the number of records held at once.
    pub max_records: usize,
    /// Longest word length a weight cutoff may reach.
    pub max_length: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            seed: 0,
            proximality_tol: DEFAULT_PROXIMALITY_TOL,
            weight_mode: WeightMode::Top,
            rep_digest: alloc::string::String::new(),
            max_records: 20_000_000,
            max_length: 16,
        }
    }
}

/// Per-length bookkeeping of an enumeration (index `n - 1`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnumerationStats {
    /// Unbased primitive cycles, counted with every start vertex.
    pub cycles: Vec<u64>,
    /// Distinct aperiodic cycle labels.
    pub labels: Vec<u64>,
    /// Labels merged into another label of the same class.
    pub merged: Vec<u64>,
    /// Primitive classes kept.
    pub classes: Vec<u64>,
}

struct Candidate {
    word: Vec<Gen>,
    inv: ClassInvariants,
    ab: Vec<i32>,
}

/// Lyndon-word search over cycle labels of the recurrent part of the
/// automaton, pruned by readability of the prefix from some recurrent vertex.
struct CycleSearch<'a> {
    a: &'a CodingAutomaton,
    starts: Vec<u32>,
    in_core: Vec<bool>,
    len: usize,
    word: Vec<Gen>,
    states: Vec<Vec<u32>>,
}

impl<'a> CycleSearch<'a> {
    fn new(a: &'a CodingAutomaton) -> Self {
        let starts = a.recurrent_vertices();
        let mut in_core = alloc::vec![false; a.num_vertices()];
        for &v in &starts {
            in_core[v as usize] = true;
        }
        CycleSearch { a, starts, in_core, len: 0, word: Vec::new(), states: Vec::new() }
    }

    /// Calls `emit(word, cycles)` for every aperiodic label of length `n`
    /// read as a closed path, in lexicographic order.
    fn run(&mut self, n: usize, emit: &mut dyn FnMut(&[Gen], u64) -> Result<()>) -> Result<()> {
        self.len = n;
        self.word = alloc::vec![0; n];
        self.states = alloc::vec![self.starts.clone()];
        self.rec(0, 0, emit)
    }

    fn rec(&mut self, t: usize, p: usize, emit: &mut dyn FnMut(&[Gen], u64) -> Result<()>) -> Result<()> {
        if t == self.len {
            if p == t {
                let last = &self.states[t];
                let k = self.starts.iter().zip(last).filter(|(s, c)| s == c).count() as u64;
                if k > 0 {
                    emit(&self.word, k)?;
                }
            }
            return Ok(());
        }
        let lo = if t == 0 { 0 } else { self.word[t - p] };
        for x in lo..self.a.num_generators() as Gen {
            let next: Vec<u32> = self.states[t]
                .iter()
                .map(|&v| match v {
                    DEAD => DEAD,
                    v => match self.a.target(v, x) {
                        Some(u) if self.in_core[u as usize] => u,
                        _ => DEAD,
                    },
                })
                .collect();
            if next.iter().all(|&v| v == DEAD) {
                continue;
            }
            self.word[t] = x;
            self.states.truncate(t + 1);
            self.states.push(next);
            let np = if t > 0 && x == lo { p } else { t + 1 };
            self.rec(t + 1, np, emit)?;
        }
        Ok(())
    }
}

/// Merges candidates describing the same class (invariants equal within
/// tolerance), keeping the lexicographically least word. Equal invariants
/// with different abelianisations are reported as a consistency error.
fn merge_classes(cands: &mut Vec<Candidate>) -> Result<usize> {
    let n = cands.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cands[i].inv.d_top.total_cmp(&cands[j].inv.d_top));
    let mut keep = alloc::vec![true; n];
    let mut done = alloc::vec![false; n];
    for (k, &i) in order.iter().enumerate() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let mut best = i;
        let di = cands[i].inv.d_top;
        for &j in &order[k + 1..] {
            if cands[j].inv.d_top - di > super::fingerprint::MATCH_TOL * di.max(1.0) {
                break;
            }
            if done[j] || !cands[i].inv.matches(&cands[j].inv) {
                continue;
            }
            if cands[i].ab != cands[j].ab {
                return Err(Error::Consistency(alloc::format!(
                    "classes {:?} and {:?} share invariants but differ in abelianisation",
                    cands[i].word,
                    cands[j].word
                )));
            }
            done[j] = true;
            let (loser, winner) = if j < best { (best, j) } else { (j, best) };
            keep[loser] = false;
            best = winner;
        }
    }
    let before = cands.len();
    let mut idx = 0;
    cands.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
    Ok(before - cands.len())
}

fn to_record(c: Candidate) -> PrimitiveClassRecord {
    let fp = fingerprint(c.word.len(), &c.ab, &c.inv);
    PrimitiveClassRecord { word: c.word, d_top: c.inv.d_top, d_spread: c.inv.d_spread, mu: c.inv.mu, ab: c.ab, fp }
}

fn weight_of(r: &PrimitiveClassRecord, m: WeightMode) -> f64 {
    match m {
        WeightMode::Top => r.d_top,
        WeightMode::Spread => r.d_spread,
    }
}

/// Enumerates primitive classes length by length, handing each completed
/// length to `sink` (records in lexicographic order of their words).
/// Returns the per-length statistics and the completeness weight.
pub fn enumerate_with_sink(
    a: &CodingAutomaton,
    rep: &Representation,
    cutoff: Cutoff,
    opts: &EnumerationOptions,
    sink: &mut dyn FnMut(usize, Vec<PrimitiveClassRecord>) -> Result<()>,
) -> Result<(EnumerationStats, f64)> {
    if a.genus() != rep.genus() {
        return Err(Error::Input("automaton and representation genus differ".into()));
    }
    let fpr = Fingerprinter::new(rep, opts.seed, opts.proximality_tol)?;
    let genus = rep.genus();
    let mut search = CycleSearch::new(a);
    let mut stats = EnumerationStats::default();
    let mut total = 0usize;
    let mut prev_min = f64::NEG_INFINITY;
    let mut complete = f64::INFINITY;
    let mut n = 0;
    loop {
        n += 1;
        match cutoff {
            Cutoff::Length(m) if n > m => break,
            Cutoff::Weight(_) if n > opts.max_length => {
                return Err(Error::Resource {
                    what: alloc::format!("weight cutoff not reached by length {}", opts.max_length),
                    partial: stats.classes.clone(),
                })
            }
            _ => {}
        }
        let mut cands: Vec<Candidate> = Vec::new();
        let mut cycles = 0u64;
        search.run(n, &mut |w, k| {
            cycles += k;
            if total + cands.len() >= opts.max_records {
                return Err(Error::Resource {
                    what: alloc::format!("more than {} records", opts.max_records),
                    partial: Vec::new(),
                });
            }
            let inv = fpr.invariants(w)?;
            let ab = Word::new(w.to_vec()).exponent_sums(genus);
            cands.push(Candidate { word: w.to_vec(), inv, ab });
            Ok(())
        })
        .map_err(|e| match e {
            Error::Resource { what, .. } => Error::Resource { what, partial: stats.classes.clone() },
            e => e,
        })?;
        let labels = cands.len() as u64;
        let merged = merge_classes(&mut cands)? as u64;
        let mut recs: Vec<PrimitiveClassRecord> = cands.into_iter().map(to_record).collect();
        let min_w = recs.iter().map(|r| weight_of(r, opts.weight_mode)).fold(f64::INFINITY, f64::min);
        stats.cycles.push(cycles);
        stats.labels.push(labels);
        stats.merged.push(merged);
        match cutoff {
            Cutoff::Length(m) => {
                if n == m {
                    complete = if n > 1 { min_w.min(prev_min) } else { min_w };
                }
            }
            Cutoff::Weight(t) => {
                recs.retain(|r| weight_of(r, opts.weight_mode) <= t);
            }
        }
        stats.classes.push(recs.len() as u64);
        total += recs.len();
        sink(n, recs)?;
        if let Cutoff::Weight(t) = cutoff {
            if min_w > t && prev_min > t {
                complete = t;
                break;
            }
        }
        prev_min = min_w;
    }
    Ok((stats, complete))
}

/// Enumerates primitive conjugacy classes from cycles of the coding automaton.
pub fn enumerate_primitive_classes(
    a: &CodingAutomaton,
    rep: &Representation,
    cutoff: Cutoff,
    opts: &EnumerationOptions,
) -> Result<OrbitDatabase> {
    let mut db = OrbitDatabase::new(rep.genus(), rep.dim(), cutoff, opts.weight_mode, opts.rep_digest.clone());
    let (_, complete) = enumerate_with_sink(a, rep, cutoff, opts, &mut |_, recs| {
        for r in &recs {
            db.push(r)?;
        }
        Ok(())
    })?;
    db.set_complete_weight(complete);
    Ok(db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupPresentation;

    fn setup() -> (CodingAutomaton, Representation) {
        let p = GroupPresentation::surface(2).unwrap();
        (CodingAutomaton::build(&p, 4).unwrap(), Representation::fuchsian_octagon(2).unwrap())
    }

    #[test]
    fn length_one_gives_generators() {
        let (a, r) = setup();
        let db = enumerate_primitive_classes(&a, &r, Cutoff::Length(1), &EnumerationOptions::default()).unwrap();
        assert_eq!(db.len(), 8);
        db.verify().unwrap();
    }

    #[test]
    fn weight_cutoff_below_generators_is_empty() {
        let (a, r) = setup();
        let db = enumerate_primitive_classes(&a, &r, Cutoff::Weight(0.5), &EnumerationOptions::default()).unwrap();
        assert!(db.is_empty());
    }

    #[test]
    fn small_class_counts() {
        let (a, r) = setup();
        let db = enumerate_primitive_classes(&a, &r, Cutoff::Length(4), &EnumerationOptions::default()).unwrap();
        assert_eq!(db.counts_by_length(4), alloc::vec![8, 24, 112, 580]);
        db.verify().unwrap();
    }
}

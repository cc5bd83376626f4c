//! Independent class enumeration straight from the presentation.

use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
#[allow(unused_imports)]
use num_traits::Float;

use super::fingerprint::{fingerprint, ClassInvariants, Fingerprinter};
use super::{Cutoff, OrbitDatabase, PrimitiveClassRecord, WeightMode};
use crate::error::{Error, Result};
use crate::group::{DehnReducer, Gen, GroupPresentation, Word};
use crate::rep::{Representation, DEFAULT_PROXIMALITY_TOL};

/// Largest supported length.
pub const BRUTE_FORCE_MAX_LENGTH: usize = 7;

struct Class {
    word: Vec<Gen>,
    inv: ClassInvariants,
    ab: Vec<i32>,
    primitive: bool,
}

/// Every cyclically reduced word of length `≤ n_max` is cyclically
/// Dehn-reduced, grouped into classes by conjugation invariants, and each
/// class is given its shortest word (least rotation, then lexicographic).
/// Classes matching the invariants of a power `u^k` of another class are
/// discarded as imprimitive.
pub fn brute_force_classes(p: &GroupPresentation, rep: &Representation, n_max: usize, seed: u64) -> Result<OrbitDatabase> {
    if n_max > BRUTE_FORCE_MAX_LENGTH {
        return Err(Error::Input(alloc::format!("brute force supports lengths up to {BRUTE_FORCE_MAX_LENGTH}")));
    }
    if p.genus() != rep.genus() {
        return Err(Error::Input("presentation and representation genus differ".into()));
    }
    let fpr = Fingerprinter::new(rep, seed, DEFAULT_PROXIMALITY_TOL)?;
    let dehn = DehnReducer::new(p);
    let ngen = p.num_generators() as Gen;

    let mut seen: HashSet<Vec<Gen>> = HashSet::new();
    let mut words: Vec<Vec<Gen>> = Vec::new();
    let mut stack: Vec<Gen> = Vec::new();
    cyclic_words(ngen, n_max, &mut stack, &mut |w| {
        let r = dehn.reduce_cyclic(&Word::new(w.to_vec()));
        if !r.is_empty() {
            let c = r.least_rotation().into_letters();
            if seen.insert(c.clone()) {
                words.push(c);
            }
        }
    });
    drop(seen);
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut classes: Vec<Class> = Vec::new();
    let mut index: HashMap<i64, Vec<usize>> = HashMap::new();
    for w in words {
        let inv = fpr.invariants(&w)?;
        let ab = Word::new(w.clone()).exponent_sums(p.genus());
        match find(&classes, &index, &inv, &ab)? {
            Some(_) => {}
            None => {
                index.entry(bucket(inv.d_top)).or_default().push(classes.len());
                classes.push(Class { word: w, inv, ab, primitive: true });
            }
        }
    }

    for i in 0..classes.len() {
        let len = classes[i].word.len();
        for k in 2..=n_max / len {
            let w = Word::new(classes[i].word.clone()).pow(k);
            let inv = fpr.invariants(w.letters())?;
            let ab = w.exponent_sums(p.genus());
            if let Some(j) = find(&classes, &index, &inv, &ab)? {
                classes[j].primitive = false;
            }
        }
    }

    let mut db = OrbitDatabase::new(p.genus(), rep.dim(), Cutoff::Length(n_max), WeightMode::Top, alloc::string::String::new());
    for c in classes.into_iter().filter(|c| c.primitive) {
        let fp = fingerprint(c.word.len(), &c.ab, &c.inv);
        db.push(&PrimitiveClassRecord {
            word: c.word,
            d_top: c.inv.d_top,
            d_spread: c.inv.d_spread,
            mu: c.inv.mu,
            ab: c.ab,
            fp,
        })?;
    }
    let complete = db.length_cut_completeness(n_max);
    db.set_complete_weight(complete);
    Ok(db)
}

fn bucket(d: f64) -> i64 {
    (d * 1e7).floor() as i64
}

fn find(classes: &[Class], index: &HashMap<i64, Vec<usize>>, inv: &ClassInvariants, ab: &[i32]) -> Result<Option<usize>> {
    let k = bucket(inv.d_top);
    for b in k - 1..=k + 1 {
        for &j in index.get(&b).into_iter().flatten() {
            if classes[j].inv.matches(inv) {
                if classes[j].ab != ab {
                    return Err(Error::Consistency(alloc::format!(
                        "words {:?} and {:?} share invariants but differ in abelianisation",
                        classes[j].word,
                        ab
                    )));
                }
                return Ok(Some(j));
            }
        }
    }
    Ok(None)
}

/// Visits every cyclically reduced word of length `1..=n_max`.
fn cyclic_words(ngen: Gen, n_max: usize, stack: &mut Vec<Gen>, f: &mut dyn FnMut(&[Gen])) {
    if !stack.is_empty() {
        let first = stack[0];
        let last = *stack.last().unwrap();
        if stack.len() == 1 || last != first ^ 1 {
            f(stack);
        }
    }
    if stack.len() == n_max {
        return;
    }
    for x in 0..ngen {
        if stack.last().is_some_and(|&l| l == x ^ 1) {
            continue;
        }
        stack.push(x);
        cyclic_words(ngen, n_max, stack, f);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_the_length_one_classes() {
        let p = GroupPresentation::surface(2).unwrap();
        let r = Representation::fuchsian_octagon(2).unwrap();
        let db = brute_force_classes(&p, &r, 1, 3).unwrap();
        assert_eq!(db.len(), 8);
    }

    #[test]
    fn counts_to_length_four() {
        let p = GroupPresentation::surface(2).unwrap();
        let r = Representation::fuchsian_octagon(2).unwrap();
        let db = brute_force_classes(&p, &r, 4, 3).unwrap();
        assert_eq!(db.counts_by_length(4), alloc::vec![8, 24, 112, 580]);
    }

    #[test]
    fn counts_to_length_five() {
        let p = GroupPresentation::surface(2).unwrap();
        let r = Representation::fuchsian_octagon(2).unwrap();
        let db = brute_force_classes(&p, &r, 5, 3).unwrap();
        assert_eq!(db.counts_by_length(5), alloc::vec![8, 24, 112, 580, 3312]);
    }
}

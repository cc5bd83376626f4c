//! Strongly Markov coding of the surface group.
//!
//! The automaton accepts exactly the shortlex-least geodesic spelling of
//! each element, so paths of length `n` from the start vertex `*` are in
//! bijection with the sphere of radius `n`. It is built from word
//! differences: a subset construction tracks every possible competitor
//! spelling within distance `radius` of the word read so far, then Moore
//! minimisation collapses states to shortlex cone types.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::ball::{sphere_sizes, Ball};
use super::word::{inverse, Gen, GroupPresentation};
use crate::error::{Error, Result};

const NIL: u32 = u32::MAX;
const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// Deterministic labelled graph with a distinguished start vertex `0 = *`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingAutomaton {
    genus: usize,
    ngen: usize,
    num_vertices: usize,
    trans: Vec<u32>,
    radius: usize,
    aperiodicity: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
enum Cmp {
    Equal = 0,
    Less = 1,
    Greater = 2,
    Ended = 3,
}

impl CodingAutomaton {
    /// Builds the automaton using word differences up to length `radius`.
    /// `radius` must be at least `2·genus`, the fellow-traveller constant of
    /// this presentation.
    pub fn build(p: &GroupPresentation, radius: usize) -> Result<Self> {
        if radius < 2 * p.genus() {
            return Err(Error::Input(alloc::format!(
                "radius {radius} below the fellow-traveller bound {}",
                2 * p.genus()
            )));
        }
        let ngen = p.num_generators();
        let ball = Ball::build(p, radius + 2)?;
        let d_limit: u32 = ball.sphere_sizes()[..=radius].iter().sum::<u64>() as u32;
        let in_d = |id: u32| id < d_limit;

        let pack = |d: u32, c: Cmp| ((d as u64) << 2) | c as u64;
        let step = |s: &[u64], x: Gen| -> Option<Vec<u64>> {
            let xi = inverse(x);
            let mut out = Vec::new();
            for &e in s {
                let (d, c) = ((e >> 2) as u32, e & 3);
                let xd = match ball.left_mul(xi, d) {
                    Some(v) => v,
                    None => continue,
                };
                if in_d(xd) {
                    if xd == 0 {
                        return None;
                    }
                    out.push(pack(xd, Cmp::Ended));
                }
                if c == Cmp::Ended as u64 {
                    continue;
                }
                for y in 0..ngen as Gen {
                    let d2 = match ball.right_mul(xd, y) {
                        Some(v) if in_d(v) => v,
                        _ => continue,
                    };
                    let c2 = if c == Cmp::Equal as u64 {
                        match y.cmp(&x) {
                            core::cmp::Ordering::Less => Cmp::Less,
                            core::cmp::Ordering::Equal => Cmp::Equal,
                            core::cmp::Ordering::Greater => Cmp::Greater,
                        }
                    } else if c == Cmp::Less as u64 {
                        Cmp::Less
                    } else {
                        Cmp::Greater
                    };
                    if d2 == 0 && c2 == Cmp::Less {
                        return None;
                    }
                    out.push(pack(d2, c2));
                }
            }
            out.sort_unstable();
            out.dedup();
            Some(out)
        };

        let start = alloc::vec![pack(0, Cmp::Equal)];
        let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut states: Vec<Vec<u64>> = alloc::vec![start.clone()];
        index.insert(start, 0);
        let mut trans: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            for x in 0..ngen as Gen {
                let t = match step(&states[i], x) {
                    None => NIL,
                    Some(t) => match index.get(&t) {
                        Some(&j) => j,
                        None => {
                            if states.len() >= DEFAULT_STATE_BUDGET {
                                return Err(Error::Construction(alloc::format!(
                                    "subset construction exceeded {DEFAULT_STATE_BUDGET} states"
                                )));
                            }
                            let j = states.len() as u32;
                            index.insert(t.clone(), j);
                            states.push(t);
                            j
                        }
                    },
                };
                trans.push(t);
            }
            i += 1;
        }
        drop(index);
        drop(states);

        let (n, trans) = minimise(ngen, &trans);
        let (n, trans) = isolate_start(ngen, n, trans);
        let (n, trans) = split_parallel_edges(ngen, n, trans);
        let mut a = CodingAutomaton {
            genus: p.genus(),
            ngen,
            num_vertices: n,
            trans,
            radius,
            aperiodicity: None,
        };
        let sizes = ball.sphere_sizes();
        let paths = a.path_counts(sizes.len() - 1);
        if let Some(k) = (0..sizes.len()).find(|&k| paths[k] != sizes[k] as u128) {
            return Err(Error::Construction(alloc::format!(
                "path count {} differs from sphere size {} at length {k}; increase the radius",
                paths[k],
                sizes[k]
            )));
        }
        a.aperiodicity = a.compute_aperiodicity();
        Ok(a)
    }

    /// Assembles an automaton from explicit edges, checking the structural
    /// invariants: labels in range, determinism, no edge into `*`, and at
    /// most one edge per ordered vertex pair.
    pub fn from_edges(
        genus: usize,
        num_vertices: usize,
        edges: &[(u32, u32, Gen)],
        radius: usize,
        aperiodicity: Option<usize>,
    ) -> Result<Self> {
        let ngen = 4 * genus;
        if genus < 2 || num_vertices == 0 {
            return Err(Error::Input("automaton needs genus >= 2 and a start vertex".into()));
        }
        let mut trans = alloc::vec![NIL; num_vertices * ngen];
        for &(f, t, x) in edges {
            if f as usize >= num_vertices || t as usize >= num_vertices || x as usize >= ngen {
                return Err(Error::Input(alloc::format!("edge ({f}, {t}, {x}) out of range")));
            }
            if t == 0 {
                return Err(invariant("edge terminates at the start vertex"));
            }
            let slot = &mut trans[f as usize * ngen + x as usize];
            if *slot != NIL {
                return Err(invariant("two edges share a source and label"));
            }
            *slot = t;
        }
        let a = CodingAutomaton { genus, ngen, num_vertices, trans, radius, aperiodicity };
        a.check_structure()?;
        Ok(a)
    }

    pub fn check_structure(&self) -> Result<()> {
        for v in 0..self.num_vertices {
            let row = self.row(v as u32);
            if row.contains(&0) {
                return Err(invariant("edge terminates at the start vertex"));
            }
            let mut ts: Vec<u32> = row.iter().copied().filter(|&t| t != NIL).collect();
            let k = ts.len();
            ts.sort_unstable();
            ts.dedup();
            if ts.len() != k {
                return Err(invariant("two edges join the same ordered vertex pair"));
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_generators(&self) -> usize {
        self.ngen
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn start(&self) -> u32 {
        0
    }

    pub fn aperiodicity(&self) -> Option<usize> {
        self.aperiodicity
    }

    fn row(&self, v: u32) -> &[u32] {
        &self.trans[v as usize * self.ngen..(v as usize + 1) * self.ngen]
    }

    #[inline]
    pub fn target(&self, v: u32, x: Gen) -> Option<u32> {
        match self.trans[v as usize * self.ngen + x as usize] {
            NIL => None,
            t => Some(t),
        }
    }

    /// Edges `(from, to, label)` in vertex then label order.
    pub fn edges(&self) -> Vec<(u32, u32, Gen)> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices as u32 {
            for x in 0..self.ngen as Gen {
                if let Some(t) = self.target(v, x) {
                    out.push((v, t, x));
                }
            }
        }
        out
    }

    pub fn accepts(&self, w: &[Gen]) -> bool {
        w.iter().try_fold(0u32, |v, &x| self.target(v, x)).is_some()
    }

    /// Number of paths of each length `0..=n_max` starting at `*`.
    pub fn path_counts(&self, n_max: usize) -> Vec<u128> {
        let mut v = alloc::vec![0u128; self.num_vertices];
        v[0] = 1;
        let mut out = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            out.push(v.iter().sum());
            if k == n_max {
                break;
            }
            let mut nv = alloc::vec![0u128; self.num_vertices];
            for (s, &c) in v.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &t in self.row(s as u32) {
                    if t != NIL {
                        nv[t as usize] = nv[t as usize].saturating_add(c);
                    }
                }
            }
            v = nv;
        }
        out
    }

    /// Number of based closed paths of each length `1..=n_max` in the
    /// graph with `*` removed (the trace of the `n`-th adjacency power).
    pub fn closed_path_counts(&self, n_max: usize) -> Vec<u128> {
        let m = self.num_vertices;
        let mut out = Vec::with_capacity(n_max);
        let mut pw: Vec<Vec<u128>> = (0..m).map(|i| {
            let mut r = alloc::vec![0u128; m];
            r[i] = 1;
            r
        }).collect();
        for _ in 0..n_max {
            let mut next = alloc::vec![alloc::vec![0u128; m]; m];
            for i in 1..m {
                for (k, &c) in pw[i].iter().enumerate().skip(1) {
                    if c == 0 {
                        continue;
                    }
                    for &t in self.row(k as u32) {
                        if t != NIL && t != 0 {
                            next[i][t as usize] = next[i][t as usize].saturating_add(c);
                        }
                    }
                }
            }
            pw = next;
            out.push((1..m).map(|i| pw[i][i]).sum());
        }
        out
    }

    /// Vertices of the `*`-deleted graph lying on some cycle.
    pub fn recurrent_vertices(&self) -> Vec<u32> {
        let comps = self.components();
        let mut out = Vec::new();
        for c in comps {
            let v = c[0];
            if c.len() > 1 || self.row(v).contains(&v) {
                out.extend(c);
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices other than `*` that lie on no cycle.
    pub fn transient_vertices(&self) -> Vec<u32> {
        let rec = self.recurrent_vertices();
        (1..self.num_vertices as u32).filter(|v| rec.binary_search(v).is_err()).collect()
    }

    /// Strongly connected components of the `*`-deleted graph (iterative Tarjan).
    fn components(&self) -> Vec<Vec<u32>> {
        let n = self.num_vertices;
        let mut index = alloc::vec![u32::MAX; n];
        let mut low = alloc::vec![0u32; n];
        let mut on = alloc::vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0u32;
        for root in 1..n as u32 {
            if index[root as usize] != u32::MAX {
                continue;
            }
            let mut call: Vec<(u32, usize)> = alloc::vec![(root, 0)];
            index[root as usize] = counter;
            low[root as usize] = counter;
            counter += 1;
            stack.push(root);
            on[root as usize] = true;
            while let Some(&mut (v, ref mut k)) = call.last_mut() {
                if *k < self.ngen {
                    let t = self.trans[v as usize * self.ngen + *k];
                    *k += 1;
                    if t == NIL || t == 0 {
                        continue;
                    }
                    if index[t as usize] == u32::MAX {
                        index[t as usize] = counter;
                        low[t as usize] = counter;
                        counter += 1;
                        stack.push(t);
                        on[t as usize] = true;
                        call.push((t, 0));
                    } else if on[t as usize] {
                        low[v as usize] = low[v as usize].min(index[t as usize]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u as usize] = low[u as usize].min(low[v as usize]);
                    }
                    if low[v as usize] == index[v as usize] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on[w as usize] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// Least `N` such that any two recurrent vertices are joined by a path
    /// of length exactly `N`. `None` when the recurrent part is reducible or
    /// periodic.
    fn compute_aperiodicity(&self) -> Option<usize> {
        let comps: Vec<Vec<u32>> = self
            .components()
            .into_iter()
            .filter(|c| c.len() > 1 || self.row(c[0]).contains(&c[0]))
            .collect();
        if comps.len() != 1 {
            return None;
        }
        let mut core = comps.into_iter().next().unwrap();
        core.sort_unstable();
        let m = core.len();
        let pos = |v: u32| core.binary_search(&v).ok();
        let words = m.div_ceil(64);
        let adj: Vec<Vec<u64>> = core
            .iter()
            .map(|&v| {
                let mut r = alloc::vec![0u64; words];
                for &t in self.row(v) {
                    if let Some(j) = (t != NIL).then(|| pos(t)).flatten() {
                        r[j / 64] |= 1 << (j % 64);
                    }
                }
                r
            })
            .collect();
        let full = |r: &[u64]| (0..m).all(|j| r[j / 64] >> (j % 64) & 1 == 1);
        let mut cur = adj.clone();
        let bound = m * m - 2 * m + 2;
        for n in 1..=bound.max(1) {
            if cur.iter().all(|r| full(r)) {
                return Some(n);
            }
            cur = cur
                .iter()
                .map(|r| {
                    let mut nr = alloc::vec![0u64; words];
                    for k in 0..m {
                        if r[k / 64] >> (k % 64) & 1 == 1 {
                            for (a, b) in nr.iter_mut().zip(&adj[k]) {
                                *a |= b;
                            }
                        }
                    }
                    nr
                })
                .collect();
        }
        None
    }

    /// Recomputes the aperiodicity index (used for automata loaded from file).
    pub fn with_computed_aperiodicity(mut self) -> Self {
        self.aperiodicity = self.compute_aperiodicity();
        self
    }
}

fn invariant(msg: &str) -> Error {
    Error::Validation { check: String::from(msg), residual: 1.0 }
}

/// Moore partition refinement; state `0` stays the start state.
fn minimise(ngen: usize, trans: &[u32]) -> (usize, Vec<u32>) {
    let n = trans.len() / ngen;
    let mut part = alloc::vec![0u32; n];
    let mut classes = 1usize;
    loop {
        let mut sig: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = alloc::vec![0u32; n];
        for s in 0..n {
            let mut key = Vec::with_capacity(ngen + 1);
            key.push(part[s]);
            key.extend(trans[s * ngen..(s + 1) * ngen].iter().map(|&t| if t == NIL { NIL } else { part[t as usize] }));
            let len = sig.len() as u32;
            next[s] = *sig.entry(key).or_insert(len);
        }
        let k = sig.len();
        part = next;
        if k == classes {
            break;
        }
        classes = k;
    }
    // renumber in breadth-first order from the start state
    let mut rep = alloc::vec![NIL; classes];
    for s in (0..n).rev() {
        rep[part[s] as usize] = s as u32;
    }
    let mut order = alloc::vec![NIL; classes];
    let mut queue = VecDeque::from([part[0]]);
    order[part[0] as usize] = 0;
    let mut count = 1u32;
    let mut out_rows: Vec<u32> = Vec::new();
    let mut seq = Vec::new();
    while let Some(c) = queue.pop_front() {
        seq.push(c);
        let s = rep[c as usize] as usize;
        for &t in &trans[s * ngen..(s + 1) * ngen] {
            if t != NIL {
                let ct = part[t as usize];
                if order[ct as usize] == NIL {
                    order[ct as usize] = count;
                    count += 1;
                    queue.push_back(ct);
                }
            }
        }
    }
    for &c in &seq {
        let s = rep[c as usize] as usize;
        out_rows.extend(trans[s * ngen..(s + 1) * ngen].iter().map(|&t| if t == NIL { NIL } else { order[part[t as usize] as usize] }));
    }
    (seq.len(), out_rows)
}

/// If some edge enters the start vertex, gives `*` its own copy.
fn isolate_start(ngen: usize, n: usize, mut trans: Vec<u32>) -> (usize, Vec<u32>) {
    if !trans.contains(&0) {
        return (n, trans);
    }
    let copy: Vec<u32> = trans[..ngen].to_vec();
    for t in trans.iter_mut() {
        if *t == 0 {
            *t = n as u32;
        }
    }
    let fixed: Vec<u32> = copy.iter().map(|&t| if t == 0 { n as u32 } else { t }).collect();
    trans.extend_from_slice(&fixed);
    trans[..ngen].copy_from_slice(&fixed);
    (n + 1, trans)
}

/// If two labels lead from one vertex to the same target, refines every
/// vertex by its incoming label.
fn split_parallel_edges(ngen: usize, n: usize, trans: Vec<u32>) -> (usize, Vec<u32>) {
    let parallel = (0..n).any(|v| {
        let mut ts: Vec<u32> = trans[v * ngen..(v + 1) * ngen].iter().copied().filter(|&t| t != NIL).collect();
        let k = ts.len();
        ts.sort_unstable();
        ts.dedup();
        ts.len() != k
    });
    if !parallel {
        return (n, trans);
    }
    // new vertices: * and (target, label) pairs
    let mut id: HashMap<(u32, Gen), u32> = HashMap::new();
    let mut verts: Vec<u32> = alloc::vec![0];
    let mut queue = VecDeque::from([0u32]);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    while let Some(k) = queue.pop_front() {
        let v = verts[k as usize] as usize;
        let mut row = alloc::vec![NIL; ngen];
        for x in 0..ngen {
            let t = trans[v * ngen + x];
            if t == NIL {
                continue;
            }
            let key = (t, x as Gen);
            let j = *id.entry(key).or_insert_with(|| {
                verts.push(t);
                queue.push_back(verts.len() as u32 - 1);
                verts.len() as u32 - 1
            });
            row[x] = j;
        }
        rows.push(row);
    }
    (rows.len(), rows.concat())
}

/// Outcome of [`validate_automaton`].
#[derive(Clone, Debug, PartialEq)]
pub struct AutomatonReport {
    pub n_max: usize,
    pub path_counts: Vec<u128>,
    pub sphere_sizes: Vec<u64>,
    /// Primitive classes per minimal length `1..=n_max` from the automaton.
    pub automaton_classes: Vec<u64>,
    /// Primitive classes per minimal length from brute-force enumeration.
    pub brute_force_classes: Vec<u64>,
    /// Based closed paths per length in the `*`-deleted graph.
    pub closed_paths: Vec<u128>,
    pub aperiodicity: Option<usize>,
    pub transient_vertices: Vec<u32>,
}

/// Checks the automaton against the ball oracle and the brute-force
/// conjugacy-class oracle up to length `n_max`.
pub fn validate_automaton(
    a: &CodingAutomaton,
    p: &GroupPresentation,
    n_max: usize,
    seed: u64,
) -> Result<AutomatonReport> {
    if a.genus() != p.genus() {
        return Err(Error::Input("automaton and presentation genus differ".into()));
    }
    a.check_structure()?;
    let sizes = sphere_sizes(p, n_max)?;
    let paths = a.path_counts(n_max);
    if let Some(k) = (0..=n_max).find(|&k| paths[k] != sizes[k] as u128) {
        return Err(Error::Validation {
            check: alloc::format!("path count at n = {k}: {} paths vs {} elements", paths[k], sizes[k]),
            residual: (paths[k] as f64 - sizes[k] as f64).abs(),
        });
    }
    let (auto_cls, brute_cls) = if n_max == 0 {
        (Vec::new(), Vec::new())
    } else {
        let rep = crate::rep::Representation::fuchsian_octagon(p.genus())?;
        let db = crate::orbit::enumerate_primitive_classes(
            a,
            &rep,
            crate::orbit::Cutoff::Length(n_max),
            &crate::orbit::EnumerationOptions { seed, ..Default::default() },
        )?;
        let bf = crate::orbit::brute_force_classes(p, &rep, n_max, seed)?;
        (db.counts_by_length(n_max), bf.counts_by_length(n_max))
    };
    if let Some(k) = (0..auto_cls.len()).find(|&k| auto_cls[k] != brute_cls[k]) {
        return Err(Error::Validation {
            check: alloc::format!(
                "primitive class count at n = {}: {} from automaton vs {} brute force",
                k + 1,
                auto_cls[k],
                brute_cls[k]
            ),
            residual: (auto_cls[k] as f64 - brute_cls[k] as f64).abs(),
        });
    }
    if a.aperiodicity().is_none() && n_max > 0 {
        return Err(Error::Validation {
            check: "recurrent part of the automaton is not aperiodic".into(),
            residual: 1.0,
        });
    }
    Ok(AutomatonReport {
        n_max,
        path_counts: paths,
        sphere_sizes: sizes,
        automaton_classes: auto_cls,
        brute_force_classes: brute_cls,
        closed_paths: a.closed_path_counts(n_max),
        aperiodicity: a.aperiodicity(),
        transient_vertices: a.transient_vertices(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genus_two() -> (GroupPresentation, CodingAutomaton) {
        let p = GroupPresentation::surface(2).unwrap();
        let a = CodingAutomaton::build(&p, 4).unwrap();
        (p, a)
    }

    #[test]
    fn path_counts_follow_growth_series() {
        let (_, a) = genus_two();
        let want: [u128; 10] = [1, 8, 56, 392, 2736, 19096, 133288, 930328, 6493536, 45323816];
        assert_eq!(a.path_counts(9), want.to_vec());
        assert_eq!(a.num_vertices(), 36);
    }

    #[test]
    fn start_vertex_has_all_generators() {
        let (_, a) = genus_two();
        assert_eq!((0..8).filter(|&x| a.target(0, x).is_some()).count(), 8);
        a.check_structure().unwrap();
    }

    #[test]
    fn recurrent_part_is_aperiodic() {
        let (_, a) = genus_two();
        assert!(a.aperiodicity().is_some());
        assert_eq!(a.recurrent_vertices().len() + a.transient_vertices().len() + 1, a.num_vertices());
    }

    #[test]
    fn accepted_words_are_shortlex_normal_forms() {
        let (p, a) = genus_two();
        let b = Ball::build(&p, 4).unwrap();
        for id in 0..b.len() as u32 {
            assert!(a.accepts(b.word(id)));
        }
        // a1 b1 A1 B1 equals b2 a2 B2 A2, which is not shortlex least
        assert!(a.accepts(&[0, 2, 1, 3]));
        assert!(!a.accepts(&[6, 4, 7, 5]));
    }

    #[test]
    fn edge_into_start_rejected() {
        let e = CodingAutomaton::from_edges(2, 2, &[(0, 1, 0), (1, 0, 0)], 4, None);
        assert!(matches!(e, Err(Error::Validation { .. })));
    }

    #[test]
    fn radius_below_bound_rejected() {
        let p = GroupPresentation::surface(2).unwrap();
        assert!(CodingAutomaton::build(&p, 3).is_err());
    }

    #[test]
    fn validation_with_zero_length_passes() {
        let (p, a) = genus_two();
        let r = validate_automaton(&a, &p, 0, 1).unwrap();
        assert_eq!(r.path_counts, alloc::vec![1]);
    }
}

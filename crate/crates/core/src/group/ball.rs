//! Exact enumeration of word-metric balls.
//!
//! Elements are told apart by the faithful octagon representation: the
//! positive matrix `M Mᵀ` determines the orbit point of the polygon centre,
//! and distinct orbit points are far apart. Every numeric match is then
//! confirmed by Dehn's algorithm, so equality decisions are exact.
//!
//! Because the relator has even length, right multiplication by a
//! generator always changes word length by exactly one. A new candidate
//! therefore only needs to be looked up in the previous and next spheres.

use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)]
use num_traits::Float;

use super::dehn::DehnReducer;
use super::word::{Gen, GroupPresentation, Word};
use crate::error::{Error, Result};
use crate::hyperbolic::octagon_generators;

const NIL: u32 = u32::MAX;
const UP: u32 = 1 << 31;
const KEY_SCALE: f64 = 1e6;
const MATCH_TOL: f64 = 1e-9;

/// Default ceiling on the size of a single sphere.
pub const DEFAULT_SPHERE_BUDGET: usize = 20_000_000;

type M2 = [f64; 4];

#[inline]
fn mul2(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

#[inline]
fn gram(m: &M2) -> [f64; 3] {
    [m[0] * m[0] + m[1] * m[1], m[0] * m[2] + m[1] * m[3], m[2] * m[2] + m[3] * m[3]]
}

#[inline]
fn bucket(p: &[f64; 3]) -> i64 {
    ((p[0] + p[2]).ln() * KEY_SCALE).floor() as i64
}

struct Oracle {
    gens: Vec<M2>,
    dehn: DehnReducer,
}

impl Oracle {
    fn new(p: &GroupPresentation) -> Result<Self> {
        let gens = octagon_generators(p.genus())?
            .iter()
            .map(|m| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
            .collect();
        Ok(Oracle { gens, dehn: DehnReducer::new(p) })
    }

    fn same(&self, u: &[Gen], v: &[Gen]) -> bool {
        let mut w = u.to_vec();
        w.extend(v.iter().rev().map(|&x| x ^ 1));
        self.dehn.is_trivial(&Word::new(w))
    }
}

/// One sphere: words of a fixed length plus a bucketed index on `M Mᵀ`.
struct Sphere {
    len: usize,
    words: Vec<Gen>,
    mats: Vec<M2>,
    head: HashMap<i64, u32>,
    next: Vec<u32>,
}

impl Sphere {
    fn new(len: usize) -> Self {
        Sphere { len, words: Vec::new(), mats: Vec::new(), head: HashMap::new(), next: Vec::new() }
    }

    fn count(&self) -> usize {
        self.mats.len()
    }

    fn word(&self, i: u32) -> &[Gen] {
        let i = i as usize;
        &self.words[i * self.len..(i + 1) * self.len]
    }

    fn find(&self, o: &Oracle, m: &M2, cand: &[Gen]) -> Option<u32> {
        let p = gram(m);
        let t = p[0] + p[2];
        let k = bucket(&p);
        for b in k - 1..=k + 1 {
            let mut i = *self.head.get(&b).unwrap_or(&NIL);
            while i != NIL {
                let q = gram(&self.mats[i as usize]);
                let close = (0..3).all(|j| (p[j] - q[j]).abs() <= MATCH_TOL * t);
                if close && o.same(self.word(i), cand) {
                    return Some(i);
                }
                i = self.next[i as usize];
            }
        }
        None
    }

    fn insert(&mut self, word: &[Gen], m: M2) -> u32 {
        let id = self.count() as u32;
        let k = bucket(&gram(&m));
        let prev = self.head.insert(k, id).unwrap_or(NIL);
        self.next.push(prev);
        self.words.extend_from_slice(word);
        self.mats.push(m);
        id
    }
}

fn identity_sphere() -> Sphere {
    let mut s = Sphere::new(0);
    s.insert(&[], [1.0, 0.0, 0.0, 1.0]);
    s
}

/// Right-multiplies every element of `cur` by every generator. Returns, per
/// `(element, generator)`, the local index tagged with [`UP`] when it lies
/// in `next`, or [`NIL`] when `next` is absent and the product leaves the ball.
fn expand(
    o: &Oracle,
    prev: Option<&Sphere>,
    cur: &Sphere,
    mut next: Option<&mut Sphere>,
    budget: usize,
) -> Result<Vec<u32>> {
    let ngen = o.gens.len();
    let mut succ = Vec::with_capacity(cur.count() * ngen);
    let mut cand: Vec<Gen> = Vec::with_capacity(cur.len + 1);
    for i in 0..cur.count() as u32 {
        let w = cur.word(i);
        let m = cur.mats[i as usize];
        for x in 0..ngen as Gen {
            cand.clear();
            cand.extend_from_slice(w);
            cand.push(x);
            let mx = mul2(&m, &o.gens[x as usize]);
            if let Some(j) = prev.and_then(|p| p.find(o, &mx, &cand)) {
                succ.push(j);
                continue;
            }
            match next.as_deref_mut() {
                None => succ.push(NIL),
                Some(nx) => {
                    let j = match nx.find(o, &mx, &cand) {
                        Some(j) => j,
                        None => {
                            if nx.count() >= budget {
                                return Err(Error::Resource {
                                    what: alloc::format!("sphere of radius {} exceeds {budget} elements", nx.len),
                                    partial: Vec::new(),
                                });
                            }
                            nx.insert(&cand, mx)
                        }
                    };
                    succ.push(j | UP);
                }
            }
        }
    }
    Ok(succ)
}

/// Number of group elements of each word length `0..=n_max`.
pub fn sphere_sizes(p: &GroupPresentation, n_max: usize) -> Result<Vec<u64>> {
    sphere_sizes_with_budget(p, n_max, DEFAULT_SPHERE_BUDGET)
}

/// As [`sphere_sizes`], failing with a resource error carrying the completed
/// counts once a sphere would exceed `budget` elements.
pub fn sphere_sizes_with_budget(p: &GroupPresentation, n_max: usize, budget: usize) -> Result<Vec<u64>> {
    let o = Oracle::new(p)?;
    let mut counts = alloc::vec![1u64];
    let mut prev: Option<Sphere> = None;
    let mut cur = identity_sphere();
    for n in 0..n_max {
        let mut next = Sphere::new(n + 1);
        if let Err(e) = expand(&o, prev.as_ref(), &cur, Some(&mut next), budget) {
            return Err(match e {
                Error::Resource { what, .. } => Error::Resource { what, partial: counts },
                e => e,
            });
        }
        counts.push(next.count() as u64);
        prev = Some(cur);
        cur = next;
    }
    Ok(counts)
}

/// The ball of a given radius with shortlex normal forms and the right
/// multiplication table.
pub struct Ball {
    ngen: usize,
    radius: usize,
    offsets: Vec<u32>,
    spheres: Vec<Sphere>,
    succ: Vec<u32>,
}

impl Ball {
    pub fn build(p: &GroupPresentation, radius: usize) -> Result<Ball> {
        let o = Oracle::new(p)?;
        let ngen = p.num_generators();
        let mut spheres = alloc::vec![identity_sphere()];
        let mut local: Vec<Vec<u32>> = Vec::new();
        for n in 0..=radius {
            let mut next = if n < radius { Some(Sphere::new(n + 1)) } else { None };
            let s = {
                let prev = if n > 0 { Some(&spheres[n - 1]) } else { None };
                expand(&o, prev, &spheres[n], next.as_mut(), DEFAULT_SPHERE_BUDGET)?
            };
            if let Some(nx) = next {
                spheres.push(nx);
            }
            local.push(s);
        }
        let mut offsets = alloc::vec![0u32];
        for s in &spheres {
            offsets.push(offsets.last().unwrap() + s.count() as u32);
        }
        let mut succ = Vec::with_capacity(*offsets.last().unwrap() as usize * ngen);
        for (n, l) in local.iter().enumerate() {
            for &v in l {
                succ.push(match v {
                    NIL => NIL,
                    v if v & UP != 0 => offsets[n + 1] + (v & !UP),
                    v => offsets[n - 1] + v,
                });
            }
        }
        Ok(Ball { ngen, radius, offsets, spheres, succ })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn level(&self, id: u32) -> usize {
        self.offsets.partition_point(|&o| o <= id) - 1
    }

    /// Shortlex normal form of an element.
    pub fn word(&self, id: u32) -> &[Gen] {
        let n = self.level(id);
        self.spheres[n].word(id - self.offsets[n])
    }

    pub fn sphere_sizes(&self) -> Vec<u64> {
        self.spheres.iter().map(|s| s.count() as u64).collect()
    }

    /// `id · x`, if it lies in the ball.
    pub fn right_mul(&self, id: u32, x: Gen) -> Option<u32> {
        match self.succ[id as usize * self.ngen + x as usize] {
            NIL => None,
            v => Some(v),
        }
    }

    /// `x · id`, if every intermediate prefix product stays in the ball.
    pub fn left_mul(&self, x: Gen, id: u32) -> Option<u32> {
        let mut cur = self.right_mul(0, x)?;
        for &y in self.word(id) {
            cur = self.right_mul(cur, y)?;
        }
        Some(cur)
    }

    /// Element represented by `w`, if the path stays in the ball.
    pub fn find(&self, w: &[Gen]) -> Option<u32> {
        w.iter().try_fold(0u32, |cur, &x| self.right_mul(cur, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GROWTH: [u64; 7] = [1, 8, 56, 392, 2736, 19096, 133288];

    #[test]
    fn genus_two_sphere_sizes() {
        let p = GroupPresentation::surface(2).unwrap();
        assert_eq!(sphere_sizes(&p, 6).unwrap(), GROWTH.to_vec());
    }

    #[test]
    fn budget_returns_partial_counts() {
        let p = GroupPresentation::surface(2).unwrap();
        match sphere_sizes_with_budget(&p, 5, 100) {
            Err(Error::Resource { partial, .. }) => assert_eq!(partial, alloc::vec![1, 8, 56]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ball_tables_consistent() {
        let p = GroupPresentation::surface(2).unwrap();
        let b = Ball::build(&p, 4).unwrap();
        assert_eq!(b.sphere_sizes(), GROWTH[..5].to_vec());
        let d = DehnReducer::new(&p);
        for id in 0..b.len() as u32 {
            let w = b.word(id);
            assert_eq!(b.find(w), Some(id));
            for x in 0..8u8 {
                if let Some(j) = b.right_mul(id, x) {
                    assert_eq!(b.right_mul(j, x ^ 1), Some(id));
                    let mut c = w.to_vec();
                    c.push(x);
                    assert!(d.equal(&Word::new(c), &Word::new(b.word(j).to_vec())));
                }
            }
        }
        // distinct geodesics of one element land on the same id
        let u = b.find(&[0, 2, 1, 3]).unwrap();
        let v = b.find(&[6, 4, 7, 5]).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn spheres_are_shortlex_sorted() {
        let p = GroupPresentation::surface(2).unwrap();
        let b = Ball::build(&p, 4).unwrap();
        for n in 1..=4 {
            let s = &b.spheres[n];
            for i in 1..s.count() as u32 {
                assert!(s.word(i - 1) < s.word(i));
            }
        }
    }
}

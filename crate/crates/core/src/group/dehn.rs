use alloc::vec::Vec;

use super::word::{inverse, Gen, GroupPresentation, Word};
use crate::error::Result;

/// Dehn's algorithm for the one-relator surface presentation.
///
/// Every adjacent letter pair occurs exactly once in the cyclic words of
/// `R` and `R^-1`, so a lookup table on pairs locates any relator
/// subword in constant time.
#[derive(Clone, Debug)]
pub struct DehnReducer {
    ngen: usize,
    rel_len: usize,
    /// `cyc[0]` is the relator, `cyc[1]` its inverse.
    cyc: [Vec<Gen>; 2],
    /// For pair `(x, y)`: `(which cyclic relator, position of x)`, or none.
    pair: Vec<Option<(u8, u16)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Match {
    start: usize,
    len: usize,
    rel: u8,
    pos: usize,
}

impl DehnReducer {
    pub fn new(p: &GroupPresentation) -> Self {
        let ngen = p.num_generators();
        let r = p.relator().letters().to_vec();
        let ri = p.relator().inverse().into_letters();
        let l = r.len();
        let mut pair = alloc::vec![None; ngen * ngen];
        for (k, c) in [&r, &ri].into_iter().enumerate() {
            for i in 0..l {
                let (x, y) = (c[i] as usize, c[(i + 1) % l] as usize);
                debug_assert!(pair[x * ngen + y].is_none());
                pair[x * ngen + y] = Some((k as u8, i as u16));
            }
        }
        DehnReducer { ngen, rel_len: l, cyc: [r, ri], pair }
    }

    fn threshold(&self) -> usize {
        self.rel_len / 2
    }

    fn match_at(&self, w: &[Gen], j: usize, cyclic: bool) -> Option<Match> {
        let n = w.len();
        if n < 2 || (!cyclic && j + 1 >= n) {
            return None;
        }
        let (x, y) = (w[j] as usize, w[(j + 1) % n] as usize);
        let (rel, pos) = self.pair[x * self.ngen + y]?;
        let c = &self.cyc[rel as usize];
        let pos = pos as usize;
        let limit = if cyclic { n.min(self.rel_len) } else { (n - j).min(self.rel_len) };
        let mut len = 2;
        while len < limit && w[(j + len) % n] == c[(pos + len) % self.rel_len] {
            len += 1;
        }
        Some(Match { start: j, len, rel, pos })
    }

    /// Inverse of the complement of a relator subword.
    fn replacement(&self, m: &Match) -> impl Iterator<Item = Gen> + '_ {
        let c = &self.cyc[m.rel as usize];
        let (l, pos) = (self.rel_len, m.pos);
        let rest = l - m.len;
        (0..rest).map(move |k| inverse(c[(pos + l - 1 - k) % l]))
    }

    fn long_matches(&self, w: &[Gen], cyclic: bool) -> Vec<Match> {
        (0..w.len())
            .filter_map(|j| self.match_at(w, j, cyclic))
            .filter(|m| m.len > self.threshold())
            .collect()
    }

    fn first_long_match(&self, w: &[Gen]) -> Option<Match> {
        (0..w.len())
            .filter_map(|j| self.match_at(w, j, false))
            .find(|m| m.len > self.threshold())
    }

    fn apply(&self, w: &[Gen], m: &Match) -> Vec<Gen> {
        let mut out = Vec::with_capacity(w.len());
        out.extend_from_slice(&w[..m.start]);
        out.extend(self.replacement(m));
        out.extend_from_slice(&w[m.start + m.len..]);
        Word::new(out).freely_reduced().into_letters()
    }

    /// Leftmost-first Dehn reduction. The result is empty iff the word is trivial.
    pub fn reduce(&self, w: &Word) -> Word {
        let mut cur = w.freely_reduced().into_letters();
        while let Some(m) = self.first_long_match(&cur) {
            cur = self.apply(&cur, &m);
        }
        Word::new(cur)
    }

    /// Dehn reduction where `choose(k)` picks which of the `k` available
    /// long matches is applied next.
    pub fn reduce_by(&self, w: &Word, mut choose: impl FnMut(usize) -> usize) -> Word {
        let mut cur = w.freely_reduced().into_letters();
        loop {
            let ms = self.long_matches(&cur, false);
            if ms.is_empty() {
                return Word::new(cur);
            }
            let m = ms[choose(ms.len()) % ms.len()];
            cur = self.apply(&cur, &m);
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce(w).is_empty()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.concat(&v.inverse()))
    }

    /// Cyclic Dehn reduction: cyclic reduction alternated with relator
    /// replacements on the cyclic word.
    pub fn reduce_cyclic(&self, w: &Word) -> Word {
        let mut cur = w.cyclically_reduced();
        loop {
            let l = cur.letters();
            let found = (0..l.len())
                .filter_map(|j| self.match_at(l, j, true))
                .find(|m| m.len > self.threshold());
            match found {
                None => return cur,
                Some(m) => {
                    let rot = cur.rotate(m.start);
                    let m = Match { start: 0, ..m };
                    cur = Word::new(self.apply(rot.letters(), &m)).cyclically_reduced();
                }
            }
        }
    }
}

impl GroupPresentation {
    pub fn dehn_reduce(&self, w: &Word) -> Result<Word> {
        self.check_word(w)?;
        Ok(DehnReducer::new(self).reduce(w))
    }

    pub fn cyclic_dehn_reduce(&self, w: &Word) -> Result<Word> {
        self.check_word(w)?;
        Ok(DehnReducer::new(self).reduce_cyclic(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::parse_word;

    fn red() -> (GroupPresentation, DehnReducer) {
        let p = GroupPresentation::surface(2).unwrap();
        let d = DehnReducer::new(&p);
        (p, d)
    }

    #[test]
    fn relator_is_trivial() {
        let (p, d) = red();
        assert!(d.is_trivial(p.relator()));
        assert!(d.is_trivial(&p.relator().inverse()));
        for k in 0..8 {
            assert!(d.is_trivial(&p.relator().rotate(k)));
        }
    }

    #[test]
    fn long_subword_shortened() {
        let (_, d) = red();
        // five letters of R become the inverse of the remaining three
        let w = parse_word("a1b1A1B1a2").unwrap();
        let r = d.reduce(&w);
        assert_eq!(r, parse_word("b2a2B2").unwrap());
    }

    #[test]
    fn generators_nontrivial() {
        let (p, d) = red();
        for x in 0..p.num_generators() as u8 {
            assert!(!d.is_trivial(&Word::new(alloc::vec![x])));
        }
        assert!(!d.is_trivial(&parse_word("a1b1A1B1").unwrap()));
    }

    #[test]
    fn conjugate_of_relator_trivial() {
        let (p, d) = red();
        let g = parse_word("b2a1a1").unwrap();
        let w = g.concat(p.relator()).concat(&g.inverse());
        assert!(d.is_trivial(&w));
    }

    #[test]
    fn equal_elements_with_distinct_geodesics() {
        let (_, d) = red();
        let u = parse_word("a1b1A1B1").unwrap();
        let v = parse_word("b2a2B2A2").unwrap();
        assert!(d.equal(&u, &v));
    }

    #[test]
    fn cyclic_reduction_of_conjugated_relator_piece() {
        let (_, d) = red();
        let w = parse_word("b2A1B1a2b2A2B2a1b1B2").unwrap();
        assert!(d.reduce_cyclic(&w).is_empty());
    }

    #[test]
    fn bad_index_is_input_error() {
        let p = GroupPresentation::surface(2).unwrap();
        assert!(p.dehn_reduce(&Word::new(alloc::vec![9])).is_err());
    }
}

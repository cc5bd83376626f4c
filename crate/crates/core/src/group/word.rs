use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{input, Result};

/// Generator index. For handle `i` (0-based) the four letters are
/// `4i = a`, `4i+1 = A`, `4i+2 = b`, `4i+3 = B`; the inverse is `x ^ 1`.
pub type Gen = u8;

#[inline]
pub fn inverse(x: Gen) -> Gen {
    x ^ 1
}

/// A word over the generators. Tracks whether it is freely reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Gen>,
}

impl Word {
    pub fn new(letters: Vec<Gen>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[Gen] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Gen> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[1] != inverse(w[0]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(&f), Some(&l)) => self.letters.len() < 2 || f != inverse(l),
                _ => true,
            }
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|&x| inverse(x)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.letters.clone();
        v.extend_from_slice(&other.letters);
        Word::new(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.letters);
        }
        Word::new(v)
    }

    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.letters.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Word::new(v)
    }

    /// Free reduction with a stack.
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Gen> = Vec::with_capacity(self.len());
        for &x in &self.letters {
            if out.last() == Some(&inverse(x)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word::new(out)
    }

    /// Free and cyclic reduction.
    pub fn cyclically_reduced(&self) -> Word {
        let w = self.freely_reduced();
        let l = &w.letters;
        let (mut i, mut j) = (0usize, l.len());
        while j - i >= 2 && l[i] == inverse(l[j - 1]) {
            i += 1;
            j -= 1;
        }
        Word::new(l[i..j].to_vec())
    }

    /// Lexicographically least rotation (generator index order).
    pub fn least_rotation(&self) -> Word {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let mut best = 0usize;
        for k in 1..n {
            if rotation_less(&self.letters, k, best) {
                best = k;
            }
        }
        self.rotate(best)
    }

    /// Smallest period `q` with `q | n` and the word equal to its own rotation by `q`.
    pub fn cyclic_period(&self) -> usize {
        let n = self.len();
        for q in 1..=n {
            if n.is_multiple_of(q) && (0..n).all(|i| self.letters[i] == self.letters[(i + q) % n]) {
                return q;
            }
        }
        n
    }

    pub fn is_proper_power(&self) -> bool {
        !self.is_empty() && self.cyclic_period() < self.len()
    }

    /// Exponent sums in the abelianisation `Z^{2g}`, ordered `a1, b1, a2, b2, ...`.
    pub fn exponent_sums(&self, genus: usize) -> Vec<i32> {
        let mut ab = alloc::vec![0i32; 2 * genus];
        for &x in &self.letters {
            let k = (x / 2) as usize;
            if k < ab.len() {
                ab[k] += if x & 1 == 0 { 1 } else { -1 };
            }
        }
        ab
    }
}

fn rotation_less(l: &[Gen], a: usize, b: usize) -> bool {
    let n = l.len();
    for i in 0..n {
        let (x, y) = (l[(a + i) % n], l[(b + i) % n]);
        if x != y {
            return x < y;
        }
    }
    false
}

/// The standard one-relator presentation of the closed genus-`g` surface group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    genus: usize,
    relator: Word,
}

impl GroupPresentation {
    pub fn surface(genus: usize) -> Result<Self> {
        if genus < 2 {
            return input(alloc::format!("genus must be at least 2, got {genus}"));
        }
        if 4 * genus > 256 {
            return input("genus too large for 8-bit generator indices");
        }
        let mut r = Vec::with_capacity(4 * genus);
        for i in 0..genus as u8 {
            r.extend_from_slice(&[4 * i, 4 * i + 2, 4 * i + 1, 4 * i + 3]);
        }
        Ok(GroupPresentation { genus, relator: Word::new(r) })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_generators(&self) -> usize {
        4 * self.genus
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        let n = self.num_generators();
        match w.letters().iter().find(|&&x| x as usize >= n) {
            Some(x) => input(alloc::format!("generator index {x} out of range 0..{n}")),
            None => Ok(()),
        }
    }

    pub fn free_reduce(&self, w: &Word) -> Result<Word> {
        self.check_word(w)?;
        Ok(w.freely_reduced())
    }

    pub fn symbol(&self, x: Gen) -> String {
        symbol(x)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(w)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let w = parse_word(s)?;
        self.check_word(&w)?;
        Ok(w)
    }

    /// All symbols in index order.
    pub fn symbols(&self) -> Vec<String> {
        (0..self.num_generators() as u16).map(|x| symbol(x as Gen)).collect()
    }
}

pub fn symbol(x: Gen) -> String {
    let handle = x / 4 + 1;
    let c = match x % 4 {
        0 => 'a',
        1 => 'A',
        2 => 'b',
        _ => 'B',
    };
    let mut s = String::new();
    let _ = write!(s, "{c}{handle}");
    s
}

pub fn parse_symbol(s: &str) -> Result<Gen> {
    let mut chars = s.chars();
    let base = match chars.next() {
        Some('a') => 0u32,
        Some('A') => 1,
        Some('b') => 2,
        Some('B') => 3,
        _ => return input(alloc::format!("bad generator symbol {s:?}")),
    };
    let rest = chars.as_str();
    let handle: u32 = rest
        .parse()
        .map_err(|_| crate::Error::Input(alloc::format!("bad generator symbol {s:?}")))?;
    if handle == 0 || 4 * (handle - 1) + base > 255 {
        return input(alloc::format!("bad generator symbol {s:?}"));
    }
    Ok((4 * (handle - 1) + base) as Gen)
}

pub fn format_word(w: &Word) -> String {
    let mut s = String::new();
    for &x in w.letters() {
        s.push_str(&symbol(x));
    }
    s
}

/// Parses concatenated symbols such as `a1b1A1B1`. The empty string is the identity.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Word::empty());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        out.push(parse_symbol(&s[start..i])?);
    }
    Ok(Word::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_genus_two() {
        let p = GroupPresentation::surface(2).unwrap();
        assert_eq!(p.format_word(p.relator()), "a1b1A1B1a2b2A2B2");
        assert_eq!(p.relator().letters(), &[0, 2, 1, 3, 4, 6, 5, 7]);
    }

    #[test]
    fn genus_below_two_rejected() {
        assert!(GroupPresentation::surface(1).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        let w = parse_word("a1B2b10A3").unwrap();
        assert_eq!(format_word(&w), "a1B2b10A3");
        assert!(parse_word("c1").is_err());
        assert!(parse_word("a0").is_err());
    }

    #[test]
    fn reductions() {
        let w = parse_word("b1a1A1a2A2B1a1").unwrap();
        assert_eq!(format_word(&w.freely_reduced()), "a1");
        let c = parse_word("A1b1a2a1").unwrap().cyclically_reduced();
        assert_eq!(format_word(&c), "b1a2");
    }

    #[test]
    fn least_rotation_and_period() {
        let w = parse_word("b1a1b1a1").unwrap();
        assert_eq!(format_word(&w.least_rotation()), "a1b1a1b1");
        assert_eq!(w.cyclic_period(), 2);
        assert!(w.is_proper_power());
    }

    #[test]
    fn abelianisation() {
        let p = GroupPresentation::surface(2).unwrap();
        assert_eq!(p.relator().exponent_sums(2), alloc::vec![0, 0, 0, 0]);
        let w = parse_word("a1a1B2").unwrap();
        assert_eq!(w.exponent_sums(2), alloc::vec![2, 0, 0, -1]);
    }
}

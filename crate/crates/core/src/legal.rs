//! Legal words of the random noble means substitution.
//!
//! A word is legal if it occurs in some realisation of `zeta_m^k(a)`. With
//! every `p_i > 0` this does not depend on the probabilities.
//!
//! The closure works on `T_k`, the set of all subwords of length at most
//! `max_len` of all realisations of `zeta_m^k(a)`. Every such subword of
//! `zeta_m(x)` is covered by the image of a subword `y` of `x` with
//! `|y| <= max_len`, so `T_{k+1}` is computed from `T_k` alone. The sets
//! increase with `k` and are finite, hence reach a fixed point.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::substitution::image_of_a;
use crate::word::{Letter, Word};

/// Default bound on the number of letters held by a closure.
pub const DEFAULT_LETTER_CAP: usize = 100_000_000;

/// All legal words of length `1..=max_len` for a fixed `m`.
#[derive(Debug, Clone)]
pub struct LegalLanguage {
    m: u32,
    max_len: usize,
    by_len: BTreeMap<usize, Vec<Word>>,
    set: HashSet<Word>,
    iterations: usize,
}

impl LegalLanguage {
    pub fn compute(m: u32, max_len: usize) -> Result<Self> {
        Self::compute_with_cap(m, max_len, DEFAULT_LETTER_CAP)
    }

    pub fn compute_with_cap(m: u32, max_len: usize, letter_cap: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m must be a positive integer"));
        }
        if max_len == 0 {
            return Err(Error::param("word length must be at least 1"));
        }
        let images: Vec<Word> = (0..=m as usize).map(|i| image_of_a(m, i)).collect();
        let img_len = |l: Letter| match l {
            Letter::A => m as usize + 1,
            Letter::B => 1,
        };

        let mut current: HashSet<Word> = HashSet::from([Word::from_letters(vec![Letter::A])]);
        // Length of zeta_m^k(a); the same for every realisation.
        let mut level_len = (1usize, 0usize);
        let mut iterations = 0;
        loop {
            let mut next: HashSet<Word> = HashSet::new();
            let mut stored = 0usize;
            for y in &current {
                let letters = y.letters();
                let inner: usize = if letters.len() >= 2 {
                    letters[1..letters.len() - 1].iter().map(|&l| img_len(l)).sum()
                } else {
                    0
                };
                // A subword starting in the first image and ending in the last
                // one has length at least inner + 2 (or 1 for a single letter).
                if letters.len() >= 2 && inner + 2 > max_len {
                    continue;
                }
                for_each_realisation(letters, &images, &mut |v: &[Letter]| {
                    let first = img_len(letters[0]);
                    let last = img_len(letters[letters.len() - 1]);
                    let total = v.len();
                    for start in 0..first {
                        let end_lo = if letters.len() == 1 {
                            start
                        } else {
                            total - last
                        };
                        for end in end_lo..total {
                            let len = end - start + 1;
                            if len > max_len {
                                break;
                            }
                            if next.insert(Word::from(&v[start..=end])) {
                                stored += len;
                            }
                        }
                    }
                });
                if stored > letter_cap {
                    return Err(Error::Resource {
                        what: format!(
                            "legal-word closure for m = {m}, length {max_len} exceeds {letter_cap} letters"
                        ),
                        largest_feasible: None,
                    });
                }
            }
            iterations += 1;
            level_len = (
                m as usize * level_len.0 + level_len.1,
                level_len.0,
            );
            let long_enough = level_len.0 + level_len.1 >= 2 * max_len;
            let settled = next == current;
            current = next;
            if settled && long_enough {
                break;
            }
        }

        let mut by_len: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
        for word in &current {
            by_len.entry(word.len()).or_default().push(word.clone());
        }
        for v in by_len.values_mut() {
            v.sort();
        }
        Ok(LegalLanguage {
            m,
            max_len,
            by_len,
            set: current,
            iterations,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of closure steps until the fixed point.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Legal words of length `len` in lexicographic order.
    pub fn words(&self, len: usize) -> &[Word] {
        assert!(len <= self.max_len, "length {len} beyond closure length {}", self.max_len);
        self.by_len.get(&len).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, w: &Word) -> bool {
        assert!(w.len() <= self.max_len);
        w.is_empty() || self.set.contains(w)
    }
}

/// Calls `f` on every realisation of `zeta_m(letters)`.
fn for_each_realisation(letters: &[Letter], images: &[Word], f: &mut dyn FnMut(&[Letter])) {
    fn rec(
        rest: &[Letter],
        images: &[Word],
        buf: &mut Vec<Letter>,
        f: &mut dyn FnMut(&[Letter]),
    ) {
        match rest.split_first() {
            None => f(buf),
            Some((&Letter::B, tail)) => {
                buf.push(Letter::A);
                rec(tail, images, buf, f);
                buf.pop();
            }
            Some((&Letter::A, tail)) => {
                for img in images {
                    let n = buf.len();
                    buf.extend_from_slice(img.letters());
                    rec(tail, images, buf, f);
                    buf.truncate(n);
                }
            }
        }
    }
    let mut buf = Vec::new();
    rec(letters, images, &mut buf, f);
}

/// Whether `w` is legal for `zeta_m` (with all probabilities positive).
pub fn is_legal(m: u32, w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Ok(true);
    }
    Ok(LegalLanguage::compute(m, w.len())?.contains(w))
}

/// All legal words of length `len`, lexicographically ordered.
pub fn legal_words(m: u32, len: usize) -> Result<Vec<Word>> {
    Ok(LegalLanguage::compute(m, len)?.words(len).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn small_legality() {
        assert!(is_legal(1, &w("aa")).unwrap());
        assert!(is_legal(1, &w("bb")).unwrap());
        assert!(!is_legal(1, &w("bbb")).unwrap());
        assert!(is_legal(1, &Word::new()).unwrap());
    }

    #[test]
    fn legal_word_lists() {
        assert_eq!(legal_words(1, 1).unwrap(), vec![w("a"), w("b")]);
        assert_eq!(legal_words(1, 2).unwrap(), vec![w("aa"), w("ab"), w("ba"), w("bb")]);
        let four = legal_words(1, 4).unwrap();
        assert_eq!(four.len(), 13);
        let mut expected: Vec<Word> = Word::all_of_length(4)
            .into_iter()
            .filter(|x| ![w("abbb"), w("bbba"), w("bbbb")].contains(x))
            .collect();
        expected.sort();
        assert_eq!(four, expected);
    }

    #[test]
    fn cap_is_enforced() {
        let err = LegalLanguage::compute_with_cap(1, 10, 50).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn subwords_of_legal_words_are_legal() {
        let lang = LegalLanguage::compute(2, 7).unwrap();
        for len in 2..=7 {
            for x in lang.words(len) {
                for i in 0..len {
                    for j in i..len {
                        assert!(lang.contains(&x.subword(i, j).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_closure() {
        for m in 1..=3 {
            let lang = LegalLanguage::compute(m, 8).unwrap();
            for len in 1..=8 {
                for x in lang.words(len) {
                    assert!(lang.contains(&x.reversed()), "m={m} {x}");
                }
            }
        }
    }
}

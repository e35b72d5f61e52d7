//! Letters and finite words over the two-letter alphabet `{a, b}`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A letter of the alphabet. `A < B` gives the lexicographic order on words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub const ALL: [Letter; 2] = [Letter::A, Letter::B];

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            _ => None,
        }
    }

    /// Index in `(a, b)` order, used for vectors and matrices.
    pub fn index(self) -> usize {
        match self {
            Letter::A => 0,
            Letter::B => 1,
        }
    }
}

/// A finite word. Ordering is lexicographic with `a < b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn repeat(letter: Letter, n: usize) -> Self {
        Word(vec![letter; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Word(out)
    }

    /// The subword `w[i..=j]`, of length `j - i + 1`. `None` unless `i <= j < len`.
    pub fn subword(&self, i: usize, j: usize) -> Option<Word> {
        if i <= j && j < self.len() {
            Some(Word(self.0[i..=j].to_vec()))
        } else {
            None
        }
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// Iterator over all windows of length `len` as borrowed slices.
    pub fn windows(&self, len: usize) -> impl Iterator<Item = &[Letter]> {
        // `slice::windows` panics on zero.
        let len = len.max(1);
        self.0.windows(len)
    }

    /// All binary words of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> Vec<Word> {
        assert!(len < 32, "refusing to enumerate 2^{len} words");
        (0u32..(1u32 << len))
            .map(|bits| {
                Word(
                    (0..len)
                        .map(|pos| {
                            if bits >> (len - 1 - pos) & 1 == 1 {
                                Letter::B
                            } else {
                                Letter::A
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

impl From<&[Letter]> for Word {
    fn from(s: &[Letter]) -> Self {
        Word(s.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("letter {c:?} is not in {{a, b}}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Shorthand for tests and examples; panics on letters outside `{a, b}`.
pub fn w(s: &str) -> Word {
    s.parse().expect("word over {a, b}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subword_bounds() {
        let x = w("abba");
        assert_eq!(x.subword(1, 2), Some(w("bb")));
        assert_eq!(x.subword(0, 3), Some(x.clone()));
        assert_eq!(x.subword(2, 1), None);
        assert_eq!(x.subword(0, 4), None);
        assert_eq!(x.subword(3, 3).unwrap().len(), 1);
    }

    #[test]
    fn lexicographic_order() {
        let mut v = vec![w("bb"), w("ab"), w("ba"), w("aa")];
        v.sort();
        assert_eq!(v, vec![w("aa"), w("ab"), w("ba"), w("bb")]);
        assert_eq!(Word::all_of_length(2), v);
    }

    #[test]
    fn parse_rejects_foreign_letters() {
        assert!("abc".parse::<Word>().is_err());
        assert_eq!("".parse::<Word>().unwrap(), Word::new());
        assert_eq!(w("abab").to_string(), "abab");
    }
}

//! The noble means rules `zeta_{m,i}` and the random rule `zeta_m`.

use crate::error::{Error, Result};
use crate::family::ProbabilityVector;
use crate::rng::RandomSource;
use crate::word::{Letter, Word};

/// Longest word the iteration helpers will build.
pub const MAX_WORD_LETTERS: usize = 1 << 28;

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::param("m must be a positive integer"))
    } else {
        Ok(())
    }
}

fn check_probs(m: u32, probs: &ProbabilityVector) -> Result<()> {
    check_m(m)?;
    if probs.len() != m as usize + 1 {
        return Err(Error::param(format!(
            "m = {m} needs {} probabilities, got {}",
            m + 1,
            probs.len()
        )));
    }
    Ok(())
}

/// Appends `a^i b a^{m-i}` to `out`.
fn push_image_a(out: &mut Vec<Letter>, m: u32, i: usize) {
    let m = m as usize;
    out.extend(std::iter::repeat_n(Letter::A, i));
    out.push(Letter::B);
    out.extend(std::iter::repeat_n(Letter::A, m - i));
}

/// `zeta_{m,i}(a) = a^i b a^{m-i}`.
pub fn image_of_a(m: u32, i: usize) -> Word {
    let mut out = Vec::with_capacity(m as usize + 1);
    push_image_a(&mut out, m, i);
    Word::from_letters(out)
}

/// Applies the deterministic rule `zeta_{m,i}` to every letter of `w`.
pub fn deterministic_substitute(m: u32, i: usize, w: &Word) -> Result<Word> {
    check_m(m)?;
    if i > m as usize {
        return Err(Error::param(format!("rule index {i} outside 0..={m}")));
    }
    let mut out = Vec::with_capacity(w.len() * (m as usize + 1));
    for &l in w.letters() {
        match l {
            Letter::A => push_image_a(&mut out, m, i),
            Letter::B => out.push(Letter::A),
        }
    }
    Ok(Word::from_letters(out))
}

/// One application of the random rule `zeta_m`.
///
/// Each `a` draws its realisation independently, one draw per `a`, left to
/// right; every `b` becomes `a` without consuming randomness.
pub fn random_substitute(
    m: u32,
    probs: &ProbabilityVector,
    w: &Word,
    rng: &mut RandomSource,
) -> Result<Word> {
    check_probs(m, probs)?;
    Ok(Word::from_letters(substitute_letters(m, probs, w.letters(), rng)))
}

fn substitute_letters(
    m: u32,
    probs: &ProbabilityVector,
    letters: &[Letter],
    rng: &mut RandomSource,
) -> Vec<Letter> {
    let n_a = letters.iter().filter(|&&l| l == Letter::A).count();
    let mut out = Vec::with_capacity(n_a * (m as usize + 1) + (letters.len() - n_a));
    let weights = probs.as_slice();
    for &l in letters {
        match l {
            Letter::A => {
                let i = rng.choose_index(weights);
                push_image_a(&mut out, m, i);
            }
            Letter::B => out.push(Letter::A),
        }
    }
    out
}

/// `k`-fold application of [`random_substitute`]; `k = 0` returns the seed word.
pub fn iterate_random(
    m: u32,
    probs: &ProbabilityVector,
    seed_word: &Word,
    k: usize,
    rng: &mut RandomSource,
) -> Result<Word> {
    check_probs(m, probs)?;
    // Lengths follow the substitution matrix exactly, so check before working.
    let (a0, b0) = abelianization(seed_word);
    let (mut a, mut b) = (a0 as u128, b0 as u128);
    for step in 0..k {
        (a, b) = (u128::from(m) * a + b, a);
        if a + b > MAX_WORD_LETTERS as u128 {
            return Err(Error::Resource {
                what: format!("{k} substitution steps give more than {MAX_WORD_LETTERS} letters"),
                largest_feasible: Some(step),
            });
        }
    }
    let mut cur = seed_word.letters().to_vec();
    for _ in 0..k {
        cur = substitute_letters(m, probs, &cur, rng);
    }
    Ok(Word::from_letters(cur))
}

/// Iterates `zeta_m` on `a` until the word has at least `min_len` letters.
/// Returns the word and the number of steps taken.
pub fn grow_random(
    m: u32,
    probs: &ProbabilityVector,
    min_len: usize,
    rng: &mut RandomSource,
) -> Result<(Word, usize)> {
    check_probs(m, probs)?;
    if min_len > MAX_WORD_LETTERS {
        return Err(Error::Resource {
            what: format!("{min_len} letters requested"),
            largest_feasible: Some(MAX_WORD_LETTERS),
        });
    }
    let mut cur = vec![Letter::A];
    let mut steps = 0;
    while cur.len() < min_len {
        cur = substitute_letters(m, probs, &cur, rng);
        steps += 1;
    }
    Ok((Word::from_letters(cur), steps))
}

/// The substitution matrix `[[m, 1], [1, 0]]`, rows and columns in `(a, b)` order.
pub fn substitution_matrix(m: u32) -> [[u64; 2]; 2] {
    [[u64::from(m), 1], [1, 0]]
}

/// Letter counts `(|w|_a, |w|_b)`.
pub fn abelianization(w: &Word) -> (usize, usize) {
    let a = w.count(Letter::A);
    (a, w.len() - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn deterministic_examples() {
        assert_eq!(deterministic_substitute(1, 0, &w("a")).unwrap(), w("ba"));
        assert_eq!(deterministic_substitute(1, 1, &w("b")).unwrap(), w("a"));
        assert_eq!(deterministic_substitute(2, 1, &w("ab")).unwrap(), w("abaa"));
        assert_eq!(deterministic_substitute(3, 3, &Word::new()).unwrap(), Word::new());
        assert!(deterministic_substitute(1, 2, &w("a")).is_err());
        assert!(deterministic_substitute(0, 0, &w("a")).is_err());
    }

    #[test]
    fn degenerate_random_examples() {
        let mut rng = RandomSource::new(99);
        let p10 = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let p01 = ProbabilityVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(random_substitute(1, &p10, &w("aa"), &mut rng).unwrap(), w("baba"));
        assert_eq!(random_substitute(1, &p01, &w("ab"), &mut rng).unwrap(), w("aba"));
        assert_eq!(iterate_random(1, &p01, &w("a"), 3, &mut rng).unwrap(), w("abaab"));
        assert_eq!(iterate_random(1, &p10, &w("a"), 0, &mut rng).unwrap(), w("a"));
    }

    #[test]
    fn one_draw_per_a() {
        let mut rng = RandomSource::new(3);
        let p = ProbabilityVector::uniform(2);
        random_substitute(2, &p, &w("abbaab"), &mut rng).unwrap();
        assert_eq!(rng.position(), 3);
    }

    #[test]
    fn wrong_probability_length() {
        let mut rng = RandomSource::new(0);
        let p = ProbabilityVector::uniform(1);
        assert!(random_substitute(2, &p, &w("a"), &mut rng).is_err());
    }

    #[test]
    fn split_frequency_of_single_a() {
        // 10^5 trials of zeta_1(a) at p = (1/2, 1/2): frequency of "ba" within 3 sigma.
        let p = ProbabilityVector::uniform(1);
        let mut rng = RandomSource::new(20240501);
        let trials = 100_000;
        let mut ba = 0usize;
        for _ in 0..trials {
            let out = random_substitute(1, &p, &w("a"), &mut rng).unwrap();
            if out == w("ba") {
                ba += 1;
            } else {
                assert_eq!(out, w("ab"));
            }
        }
        let freq = ba as f64 / trials as f64;
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq = {freq}");
    }

    #[test]
    fn substitution_matrix_values() {
        assert_eq!(substitution_matrix(1), [[1, 1], [1, 0]]);
        assert_eq!(substitution_matrix(2), [[2, 1], [1, 0]]);
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianization(&w("abba")), (2, 2));
        assert_eq!(abelianization(&Word::new()), (0, 0));
    }

    #[test]
    fn oversized_words_are_refused() {
        let p = ProbabilityVector::uniform(7);
        let a = Word::from_letters(vec![Letter::A]);
        let err = iterate_random(7, &p, &a, 40, &mut RandomSource::new(0)).unwrap_err();
        match err {
            Error::Resource { largest_feasible: Some(k), .. } => {
                let (mut na, mut nb) = (1u128, 0u128);
                for _ in 0..k {
                    (na, nb) = (7 * na + nb, na);
                }
                assert!(na + nb <= MAX_WORD_LETTERS as u128);
                assert!(8 * na + nb > MAX_WORD_LETTERS as u128);
            }
            other => panic!("{other:?}"),
        }
        assert!(grow_random(1, &ProbabilityVector::uniform(1), usize::MAX, &mut RandomSource::new(0)).is_err());
    }
}

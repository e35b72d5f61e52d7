//! Induced substitutions on legal `l`-words and subword frequencies.
//!
//! The induced rule maps a legal word `w` to the `|zeta_m(w_0)|` sliding
//! windows of length `l` that start inside the image of its first letter,
//! one list per realisation of `zeta_m(w)`. Its expected window counts form
//! the matrix `M_{m,l}`, whose Perron-Frobenius eigenvector (normalised to
//! sum one) holds the frequencies of legal `l`-words.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{NobleMeans, ProbabilityVector};
use crate::legal::LegalLanguage;
use crate::rng::RandomSource;
use crate::substitution::{grow_random, image_of_a};
use crate::word::{Letter, Word};

/// Default bound on the total number of enumerated realisations.
pub const DEFAULT_REALISATION_CAP: usize = 10_000_000;

/// One realisation of `zeta_m(w)`, cut into windows.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedImage {
    pub realisation: Word,
    pub windows: Vec<Word>,
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct InducedSubstitution {
    pub m: u32,
    pub len: usize,
    pub probs: ProbabilityVector,
    /// Legal `l`-words in lexicographic order.
    pub words: Vec<Word>,
    /// `images[i]` lists every realisation of `words[i]`.
    pub images: Vec<Vec<InducedImage>>,
}

fn check_inputs(m: u32, len: usize, probs: &ProbabilityVector) -> Result<NobleMeans> {
    let fam = NobleMeans::new(m)?;
    probs.check_family(&fam)?;
    if len == 0 {
        return Err(Error::param("word length must be at least 1"));
    }
    if len >= 2 {
        probs.require_strict()?;
    }
    Ok(fam)
}

/// Builds the induced substitution on legal words of length `len`.
///
/// For `len >= 2` every probability must be positive, since legality is
/// computed for the full random rule.
pub fn induced_substitution(
    m: u32,
    len: usize,
    probs: &ProbabilityVector,
) -> Result<InducedSubstitution> {
    induced_substitution_with_cap(m, len, probs, DEFAULT_REALISATION_CAP)
}

pub fn induced_substitution_with_cap(
    m: u32,
    len: usize,
    probs: &ProbabilityVector,
    realisation_cap: usize,
) -> Result<InducedSubstitution> {
    check_inputs(m, len, probs)?;
    // A single word may have up to (m + 1)^l realisations.
    let per_word = u128::from(m + 1).checked_pow(len as u32).unwrap_or(u128::MAX);
    if per_word > realisation_cap as u128 {
        let mut largest = 0;
        while u128::from(m + 1).pow(largest as u32 + 1) <= realisation_cap as u128 {
            largest += 1;
        }
        return Err(Error::Resource {
            what: format!("words of length {len} for m = {m} can have {per_word} realisations (cap {realisation_cap})"),
            largest_feasible: Some(largest),
        });
    }
    let words = LegalLanguage::compute(m, len)?.words(len).to_vec();

    let total: u128 = words
        .iter()
        .map(|w| u128::from(m + 1).pow(w.count(Letter::A) as u32))
        .sum();
    if total > realisation_cap as u128 {
        return Err(Error::Resource {
            what: format!(
                "induced substitution for m = {m}, l = {len} has {total} realisations (cap {realisation_cap})"
            ),
            largest_feasible: None,
        });
    }

    let images_of_a: Vec<Word> = (0..=m as usize).map(|i| image_of_a(m, i)).collect();
    let p = probs.as_slice();
    let images = words
        .iter()
        .map(|w| {
            let n_windows = match w.first() {
                Some(Letter::A) => m as usize + 1,
                _ => 1,
            };
            let mut out = Vec::new();
            enumerate_realisations(w.letters(), &images_of_a, p, &mut |v, prob| {
                let windows = (0..n_windows)
                    .map(|k| Word::from(&v[k..k + len]))
                    .collect();
                out.push(InducedImage {
                    realisation: Word::from(v),
                    windows,
                    probability: prob,
                });
            });
            out
        })
        .collect();
    Ok(InducedSubstitution {
        m,
        len,
        probs: probs.clone(),
        words,
        images,
    })
}

/// Enumerates realisations of `zeta_m(letters)` with their probabilities.
/// Realisations with probability zero are skipped.
fn enumerate_realisations(
    letters: &[Letter],
    images: &[Word],
    p: &[f64],
    f: &mut dyn FnMut(&[Letter], f64),
) {
    fn rec(
        rest: &[Letter],
        images: &[Word],
        p: &[f64],
        buf: &mut Vec<Letter>,
        prob: f64,
        f: &mut dyn FnMut(&[Letter], f64),
    ) {
        match rest.split_first() {
            None => f(buf, prob),
            Some((&Letter::B, tail)) => {
                buf.push(Letter::A);
                rec(tail, images, p, buf, prob, f);
                buf.pop();
            }
            Some((&Letter::A, tail)) => {
                for (img, &pi) in images.iter().zip(p) {
                    if pi == 0.0 {
                        continue;
                    }
                    let n = buf.len();
                    buf.extend_from_slice(img.letters());
                    rec(tail, images, p, buf, prob * pi, f);
                    buf.truncate(n);
                }
            }
        }
    }
    let mut buf = Vec::new();
    rec(letters, images, p, &mut buf, 1.0, f);
}

/// The substitution matrix of an induced rule, indexed by legal words in
/// lexicographic order. Entry `(v, w)` is the expected number of windows
/// equal to `v` produced from `w`.
#[derive(Debug, Clone)]
pub struct InducedMatrix {
    pub m: u32,
    pub len: usize,
    pub words: Vec<Word>,
    pub matrix: DMatrix<f64>,
}

impl InducedMatrix {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.words.binary_search(w).ok()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }
}

impl InducedSubstitution {
    pub fn matrix(&self) -> InducedMatrix {
        let n = self.words.len();
        let index: HashMap<&Word, usize> =
            self.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut matrix = DMatrix::zeros(n, n);
        for (col, imgs) in self.images.iter().enumerate() {
            for img in imgs {
                for win in &img.windows {
                    matrix[(index[win], col)] += img.probability;
                }
            }
        }
        InducedMatrix {
            m: self.m,
            len: self.len,
            words: self.words.clone(),
            matrix,
        }
    }
}

/// `M_{m,l}`; for `l = 1` this is the substitution matrix `[[m, 1], [1, 0]]`.
pub fn induced_matrix(m: u32, len: usize, probs: &ProbabilityVector) -> Result<InducedMatrix> {
    Ok(induced_substitution(m, len, probs)?.matrix())
}

/// Eigenvalues with multiplicity, sorted by descending real part then
/// imaginary part.
pub fn matrix_spectrum(m: &InducedMatrix) -> Result<Vec<Complex64>> {
    spectrum_of(&m.matrix)
}

pub fn spectrum_of(matrix: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !matrix.is_square() {
        return Err(Error::param("spectrum needs a square matrix"));
    }
    let schur = nalgebra::linalg::Schur::try_new(matrix.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    let mut ev: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(ev)
}

/// `tr(M^j)` for `j = 1..=k_max`. Equal power sums up to the dimension mean
/// equal characteristic polynomials, which pins down eigenvalues that a
/// direct solver resolves poorly (defective zeros).
pub fn spectral_power_sums(matrix: &DMatrix<f64>, k_max: usize) -> Vec<f64> {
    let mut power = matrix.clone();
    let mut sums = Vec::with_capacity(k_max);
    for j in 1..=k_max {
        if j > 1 {
            power = &power * matrix;
        }
        sums.push(power.trace());
    }
    sums
}

/// Normalised frequencies of legal `l`-words.
#[derive(Debug, Clone)]
pub struct FrequencyVector {
    pub words: Vec<Word>,
    pub values: Vec<f64>,
    /// Perron-Frobenius eigenvalue found by the iteration.
    pub eigenvalue: f64,
    pub iterations: usize,
}

impl FrequencyVector {
    /// Frequency of `w`, zero for words outside the legal set.
    pub fn get(&self, w: &Word) -> f64 {
        self.words
            .binary_search(w)
            .map(|i| self.values[i])
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.words.iter().zip(self.values.iter().copied())
    }
}

const PF_RESIDUAL: f64 = 1e-12;
const PF_MAX_ITER: usize = 100_000;

/// Right Perron-Frobenius eigenvector by power iteration, normalised to sum
/// one. Fails if the dominant eigenvalue differs from `lambda_m` by more
/// than `tol`.
pub fn pf_frequencies(m: &InducedMatrix, tol: f64) -> Result<FrequencyVector> {
    let fam = NobleMeans::new(m.m)?;
    let n = m.dim();
    let mut x = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let mut eigenvalue = 0.0;
    for it in 1..=PF_MAX_ITER {
        let y = &m.matrix * &x;
        eigenvalue = y.sum();
        let next = y / eigenvalue;
        let residual = (&m.matrix * &next - &next * eigenvalue).abs().sum() / eigenvalue;
        x = next;
        if residual <= PF_RESIDUAL {
            if (eigenvalue - fam.lambda()).abs() > tol {
                return Err(Error::Numeric(format!(
                    "dominant eigenvalue {eigenvalue} differs from lambda_m = {}",
                    fam.lambda()
                )));
            }
            if let Some(bad) = x.iter().find(|&&v| v.is_nan() || v <= 0.0) {
                return Err(Error::Numeric(format!(
                    "Perron-Frobenius vector has non-positive entry {bad}"
                )));
            }
            return Ok(FrequencyVector {
                words: m.words.clone(),
                values: x.iter().copied().collect(),
                eigenvalue,
                iterations: it,
            });
        }
    }
    Err(Error::Numeric(format!(
        "power iteration did not reach residual {PF_RESIDUAL} in {PF_MAX_ITER} steps (eigenvalue estimate {eigenvalue})"
    )))
}

/// Frequencies of legal `l`-words for the given rule.
pub fn word_frequencies(m: u32, len: usize, probs: &ProbabilityVector) -> Result<FrequencyVector> {
    pf_frequencies(&induced_matrix(m, len, probs)?, 1e-9)
}

/// Measure of the cylinder set of `v`, which is the frequency of `v`.
/// Illegal words have measure zero.
pub fn cylinder_measure(m: u32, len: usize, probs: &ProbabilityVector, v: &Word) -> Result<f64> {
    if v.len() != len {
        return Err(Error::param(format!(
            "word {v} has length {}, expected {len}",
            v.len()
        )));
    }
    Ok(word_frequencies(m, len, probs)?.get(v))
}

/// Sliding-window frequencies of `l`-words along one realisation grown from
/// `a` to at least `n_letters` letters.
pub fn empirical_frequencies(
    m: u32,
    probs: &ProbabilityVector,
    len: usize,
    n_letters: usize,
    seed: u64,
) -> Result<BTreeMap<Word, f64>> {
    let fam = NobleMeans::new(m)?;
    probs.check_family(&fam)?;
    probs.require_strict()?;
    if len == 0 || len > 63 {
        return Err(Error::param("window length must lie in 1..=63"));
    }
    if n_letters < len {
        return Err(Error::param("realisation must be at least as long as the window"));
    }
    let mut rng = RandomSource::new(seed);
    let (word, _) = grow_random(m, probs, n_letters, &mut rng)?;
    Ok(window_frequencies(&word, len))
}

/// Relative frequencies of all windows of length `len` in `word`.
pub fn window_frequencies(word: &Word, len: usize) -> BTreeMap<Word, f64> {
    let letters = word.letters();
    if len == 0 || letters.len() < len {
        return BTreeMap::new();
    }
    let n_windows = letters.len() - len + 1;
    let mask: u64 = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    let bit = |l: Letter| u64::from(l == Letter::B);

    // Each chunk counts the windows starting inside it, so seams are
    // counted exactly once.
    const CHUNK: usize = 1 << 16;
    let counts = (0..n_windows)
        .step_by(CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let end = (start + CHUNK).min(n_windows);
            let mut local: HashMap<u64, u64> = HashMap::new();
            let mut code = letters[start..start + len - 1]
                .iter()
                .fold(0u64, |acc, &l| (acc << 1) | bit(l));
            for k in start..end {
                code = ((code << 1) | bit(letters[k + len - 1])) & mask;
                *local.entry(code).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    counts
        .into_iter()
        .map(|(code, c)| {
            let w = Word::from_letters(
                (0..len)
                    .map(|i| {
                        if code >> (len - 1 - i) & 1 == 1 {
                            Letter::B
                        } else {
                            Letter::A
                        }
                    })
                    .collect(),
            );
            (w, c as f64 / n_windows as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
        }};
    }

    fn half() -> ProbabilityVector {
        ProbabilityVector::uniform(1)
    }

    fn find<'a>(s: &'a InducedSubstitution, src: &str, real: &str) -> &'a InducedImage {
        let i = s.words.iter().position(|x| *x == w(src)).unwrap();
        s.images[i]
            .iter()
            .find(|img| img.realisation == w(real))
            .unwrap()
    }

    #[test]
    fn reference_table_rows() {
        let p = ProbabilityVector::strict(vec![0.3, 0.7]).unwrap();
        let s = induced_substitution(1, 2, &p).unwrap();
        let row = find(&s, "aa", "abab");
        assert_eq!(row.windows, vec![w("ab"), w("ba")]);
        assert_close!(row.probability, 0.49, 1e-15);
        let row = find(&s, "aa", "abba");
        assert_eq!(row.windows, vec![w("ab"), w("bb")]);
        assert_close!(row.probability, 0.21, 1e-15);
        let row = find(&s, "bb", "aa");
        assert_eq!(row.windows, vec![w("aa")]);
        assert_eq!(row.probability, 1.0);
        let row = find(&s, "ba", "aba");
        assert_eq!(row.windows, vec![w("ab")]);
        assert_close!(row.probability, 0.3, 1e-15);
        let row = find(&s, "ba", "aab");
        assert_eq!(row.windows, vec![w("aa")]);
        let row = find(&s, "ab", "baa");
        assert_eq!(row.windows, vec![w("ba"), w("aa")]);
    }

    #[test]
    fn image_probabilities_sum_to_one() {
        for m in 1..=3 {
            let p = ProbabilityVector::strict((1..=m + 1).map(|i| i as f64 / ((m + 1) * (m + 2) / 2) as f64).collect()).unwrap();
            for len in 1..=4 {
                let s = induced_substitution(m, len, &p).unwrap();
                for (word, imgs) in s.words.iter().zip(&s.images) {
                    let total: f64 = imgs.iter().map(|i| i.probability).sum();
                    assert_close!(total, 1.0, 1e-12);
                    let expect = if word.first() == Some(Letter::A) { m as usize + 1 } else { 1 };
                    assert!(imgs.iter().all(|i| i.windows.len() == expect));
                }
            }
        }
    }

    #[test]
    fn m12_at_half() {
        let mm = induced_matrix(1, 2, &half()).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.25, 0.5, 0.5, 1.0, //
                0.75, 0.5, 0.5, 0.0, //
                0.75, 1.0, 0.0, 0.0, //
                0.25, 0.0, 0.0, 0.0,
            ],
        );
        assert!((mm.matrix.clone() - expected).abs().max() < 1e-15);
        assert_eq!(mm.column_sums(), vec![2.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn level_one_is_substitution_matrix() {
        for m in 1..=5 {
            for p in [ProbabilityVector::uniform(m), ProbabilityVector::indicator(m, 0).unwrap()] {
                let mm = induced_matrix(m, 1, &p).unwrap();
                let expected = DMatrix::from_row_slice(2, 2, &[f64::from(m), 1.0, 1.0, 0.0]);
                assert!((mm.matrix - expected).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn non_strict_probs_rejected_above_length_one() {
        let p = ProbabilityVector::indicator(1, 0).unwrap();
        assert!(matches!(induced_matrix(1, 2, &p), Err(Error::Parameter(_))));
    }

    #[test]
    fn realisation_cap() {
        let err = induced_substitution_with_cap(2, 4, &ProbabilityVector::uniform(2), 10).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn spectrum_m12_half() {
        let ev = matrix_spectrum(&induced_matrix(1, 2, &half()).unwrap()).unwrap();
        let lam = NobleMeans::new(1).unwrap();
        let expected = [lam.lambda(), 0.25, -0.5, lam.lambda_conj()];
        for (z, e) in ev.iter().zip(expected) {
            assert!(z.im.abs() < 1e-12);
            assert_close!(z.re, e, 1e-12);
        }
    }

    #[test]
    fn pf_level_one() {
        for m in 1..=4 {
            let lam = NobleMeans::new(m).unwrap().lambda();
            let f = word_frequencies(m, 1, &ProbabilityVector::uniform(m)).unwrap();
            assert_close!(f.get(&w("a")), lam / (lam + 1.0), 1e-12);
            assert_close!(f.get(&w("b")), 1.0 / (lam + 1.0), 1e-12);
        }
        let f = word_frequencies(1, 1, &half()).unwrap();
        assert_close!(f.get(&w("a")), 1.0 / NobleMeans::new(1).unwrap().lambda(), 1e-12);
    }

    #[test]
    fn cylinder_examples() {
        let p = ProbabilityVector::strict(vec![0.2, 0.8]).unwrap();
        assert_eq!(cylinder_measure(1, 3, &p, &w("bbb")).unwrap(), 0.0);
        assert!(cylinder_measure(1, 2, &half(), &w("bb")).unwrap() > 0.0);
        assert!(cylinder_measure(1, 2, &half(), &w("bbb")).is_err());
        let f = word_frequencies(1, 3, &p).unwrap();
        assert_close!(f.values.iter().sum::<f64>(), 1.0, 1e-12);
    }

    #[test]
    fn palindromic_probs_give_reversal_symmetry() {
        let p = ProbabilityVector::strict(vec![0.25, 0.5, 0.25]).unwrap();
        for len in 2..=4 {
            let f = word_frequencies(2, len, &p).unwrap();
            for (word, v) in f.iter() {
                assert_close!(v, f.get(&word.reversed()), 1e-10);
            }
        }
    }

    #[test]
    fn window_frequencies_normalise() {
        let f = window_frequencies(&w("aababaab"), 2);
        assert_close!(f.values().sum::<f64>(), 1.0, 1e-15);
        assert_close!(f[&w("aa")], 2.0 / 7.0, 1e-15);
        assert!(window_frequencies(&w("ab"), 3).is_empty());
    }

    #[test]
    fn chunked_counting_matches_naive() {
        let mut rng = RandomSource::new(5);
        let (word, _) = grow_random(1, &half(), 300_000, &mut rng).unwrap();
        let fast = window_frequencies(&word, 5);
        let mut naive: BTreeMap<Word, usize> = BTreeMap::new();
        for win in word.windows(5) {
            *naive.entry(Word::from(win)).or_default() += 1;
        }
        let total = (word.len() - 4) as f64;
        assert_eq!(fast.len(), naive.len());
        for (k, c) in naive {
            assert_eq!(fast[&k], c as f64 / total);
        }
    }

    #[test]
    fn realisation_guard_fires_before_enumeration() {
        let p = ProbabilityVector::uniform(3);
        match induced_substitution(3, 40, &p) {
            Err(Error::Resource { largest_feasible: Some(l), .. }) => assert_eq!(l, 11),
            other => panic!("{other:?}"),
        }
    }
}

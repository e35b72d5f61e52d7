//! Generation sets, topological entropy and subword complexity.
//!
//! The generation sets are `G_1 = {b}`, `G_2 = {a}` and, for `n >= 3`,
//! `G_n = U_i  G_{n-1} ... G_{n-2} ... G_{n-1}` where the single `G_{n-2}`
//! factor sits at position `i` of `m + 1` factors. `G_n` is the set of all
//! realisations of `zeta_m^{n-1}(b)`.
//!
//! Two representations are provided: explicit hash sets (small `n`) and a
//! hash-consed word DAG in which every node is a fixed-length language,
//! which counts `|G_n|` exactly long after the explicit sets stop fitting in
//! memory.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::family::NobleMeans;
use crate::legal::{LegalLanguage, DEFAULT_LETTER_CAP};
use crate::word::{Letter, Word};

/// `l_0 .. l_{n_max}` with `l_0 = 0`, `l_1 = l_2 = 1`, `l_{n+1} = m l_n + l_{n-1}`.
pub fn generation_lengths(m: u32, n_max: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let v = match n {
            0 => 0,
            1 | 2 => 1,
            _ => u64::from(m)
                .checked_mul(out[n - 1])
                .and_then(|x: u64| x.checked_add(out[n - 2]))
                .expect("generation length overflows u64"),
        };
        out.push(v);
    }
    out
}

/// An explicit generation set.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSet {
    pub level: usize,
    pub word_length: usize,
    pub words: HashSet<Word>,
}

impl GenerationSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn sorted(&self) -> Vec<Word> {
        let mut v: Vec<Word> = self.words.iter().cloned().collect();
        v.sort();
        v
    }
}

/// Builds `G_n` explicitly, refusing when it would hold more than
/// `letter_cap` letters.
pub fn generation_set_with_cap(m: u32, n: usize, letter_cap: usize) -> Result<GenerationSet> {
    NobleMeans::new(m)?;
    let lengths = generation_lengths(m, n.max(2));
    // Exact sizes from the DAG decide feasibility before anything is built.
    let mut dag = GenerationDag::new(m)?;
    let mut feasible = 0;
    for (level, &len) in lengths.iter().enumerate().take(n + 1) {
        let letters = dag.count(level)? * BigUint::from(len);
        if letters > BigUint::from(letter_cap) {
            return Err(Error::Resource {
                what: format!("G_{n} for m = {m} needs {letters} letters (cap {letter_cap})"),
                largest_feasible: Some(feasible),
            });
        }
        feasible = level;
    }

    let mut levels: Vec<HashSet<Word>> = Vec::with_capacity(n + 1);
    levels.push(HashSet::new());
    levels.push(HashSet::from([Word::from_letters(vec![Letter::B])]));
    levels.push(HashSet::from([Word::from_letters(vec![Letter::A])]));
    for level in 3..=n {
        let mut next = HashSet::new();
        for i in 0..=m as usize {
            let factors: Vec<&HashSet<Word>> = (0..=m as usize)
                .map(|j| &levels[if i == j { level - 2 } else { level - 1 }])
                .collect();
            let mut partial: Vec<Word> = vec![Word::new()];
            for f in factors {
                partial = partial
                    .iter()
                    .flat_map(|p| f.iter().map(move |x| p.concat(x)))
                    .collect();
            }
            next.extend(partial);
        }
        levels.push(next);
    }
    let words = levels.swap_remove(n);
    Ok(GenerationSet {
        level: n,
        word_length: lengths[n] as usize,
        words,
    })
}

/// `G_n` with the default cap of 10^8 stored letters.
pub fn generation_set(m: u32, n: usize) -> Result<GenerationSet> {
    generation_set_with_cap(m, n, DEFAULT_LETTER_CAP)
}

/// `|G_n|`, computed exactly on the word DAG.
pub fn generation_count(m: u32, n: usize) -> Result<BigUint> {
    GenerationDag::new(m)?.count(n)
}

const EMPTY: u32 = 0;
const EPSILON: u32 = 1;
const MAX_DAG_DEPTH: u64 = 200_000;

/// Hash-consed DAG of fixed-length languages over `{a, b}`.
///
/// Node `0` is the empty language, node `1` is `{""}`, and every other node
/// is a pair `(after a, after b)`. Structurally equal languages share a node,
/// so union and concatenation are memoised node merges.
#[derive(Debug)]
pub struct GenerationDag {
    m: u32,
    nodes: Vec<(u32, u32)>,
    unique: HashMap<(u32, u32), u32>,
    union_memo: HashMap<(u32, u32), u32>,
    concat_memo: HashMap<(u32, u32), u32>,
    counts: HashMap<u32, BigUint>,
    levels: Vec<u32>,
}

impl GenerationDag {
    pub fn new(m: u32) -> Result<Self> {
        NobleMeans::new(m)?;
        let mut dag = GenerationDag {
            m,
            nodes: vec![(EMPTY, EMPTY), (EMPTY, EMPTY)],
            unique: HashMap::new(),
            union_memo: HashMap::new(),
            concat_memo: HashMap::new(),
            counts: HashMap::new(),
            levels: Vec::new(),
        };
        let b = dag.node(EMPTY, EPSILON);
        let a = dag.node(EPSILON, EMPTY);
        dag.levels = vec![EMPTY, b, a];
        Ok(dag)
    }

    fn node(&mut self, a: u32, b: u32) -> u32 {
        if a == EMPTY && b == EMPTY {
            return EMPTY;
        }
        if let Some(&id) = self.unique.get(&(a, b)) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push((a, b));
        self.unique.insert((a, b), id);
        id
    }

    fn union(&mut self, x: u32, y: u32) -> u32 {
        if x == EMPTY || x == y {
            return y;
        }
        if y == EMPTY {
            return x;
        }
        let key = (x.min(y), x.max(y));
        if let Some(&r) = self.union_memo.get(&key) {
            return r;
        }
        let (xa, xb) = self.nodes[x as usize];
        let (ya, yb) = self.nodes[y as usize];
        let ra = self.union(xa, ya);
        let rb = self.union(xb, yb);
        let r = self.node(ra, rb);
        self.union_memo.insert(key, r);
        r
    }

    fn concat(&mut self, x: u32, y: u32) -> u32 {
        if x == EMPTY {
            return EMPTY;
        }
        if x == EPSILON {
            return y;
        }
        if let Some(&r) = self.concat_memo.get(&(x, y)) {
            return r;
        }
        let (xa, xb) = self.nodes[x as usize];
        let ra = self.concat(xa, y);
        let rb = self.concat(xb, y);
        let r = self.node(ra, rb);
        self.concat_memo.insert((x, y), r);
        r
    }

    fn level(&mut self, n: usize) -> Result<u32> {
        if n >= self.levels.len() {
            let depth = *generation_lengths(self.m, n).last().unwrap();
            if depth > MAX_DAG_DEPTH {
                return Err(Error::Resource {
                    what: format!("generation words of length {depth} are too long for the DAG"),
                    largest_feasible: None,
                });
            }
        }
        while self.levels.len() <= n {
            let level = self.levels.len();
            let prev = self.levels[level - 1];
            let prev2 = self.levels[level - 2];
            let mut acc = EMPTY;
            for i in 0..=self.m as usize {
                let mut prod = EPSILON;
                for j in 0..=self.m as usize {
                    let f = if i == j { prev2 } else { prev };
                    prod = self.concat(prod, f);
                }
                acc = self.union(acc, prod);
            }
            self.levels.push(acc);
        }
        Ok(self.levels[n])
    }

    fn count_node(&mut self, x: u32) -> BigUint {
        match x {
            EMPTY => return BigUint::zero(),
            EPSILON => return BigUint::from(1u32),
            _ => {}
        }
        if let Some(c) = self.counts.get(&x) {
            return c.clone();
        }
        let (a, b) = self.nodes[x as usize];
        let c = self.count_node(a) + self.count_node(b);
        self.counts.insert(x, c.clone());
        c
    }

    /// `|G_n|`.
    pub fn count(&mut self, n: usize) -> Result<BigUint> {
        let root = self.level(n)?;
        Ok(self.count_node(root))
    }

    /// Number of distinct DAG nodes created so far.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Whether `w` belongs to `G_n`.
    pub fn contains(&mut self, n: usize, w: &Word) -> Result<bool> {
        let mut x = self.level(n)?;
        for &l in w.letters() {
            if x == EMPTY || x == EPSILON {
                return Ok(false);
            }
            let (a, b) = self.nodes[x as usize];
            x = if l == Letter::A { a } else { b };
        }
        Ok(x == EPSILON)
    }
}

/// Natural logarithm of a big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |G_n| / l_n`, the entropy estimate from the `n`-th generation set.
pub fn empirical_entropy(m: u32, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("empirical entropy needs n >= 3"));
    }
    let count = generation_count(m, n)?;
    let len = generation_lengths(m, n)[n];
    Ok(ln_biguint(&count) / len as f64)
}

/// Entropy per letter from the closed series, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// `h_m = (lambda - 1)/(1 - lambda') * sum_{i>=2} ln(m(i-1)+1) / lambda^i`.
///
/// Terms are added until a bound on the remainder drops below `tol`. The
/// bound uses `ln(m(i-1)+1) <= sqrt(m i)` and the ratio of consecutive
/// `sqrt(m i)/lambda^i` terms, which makes the remainder a geometric tail.
pub fn entropy_series(m: u32, tol: f64) -> Result<EntropyResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tolerance must be positive"));
    }
    let fam = NobleMeans::new(m)?;
    let lambda = fam.lambda();
    let prefactor = (lambda - 1.0) / (1.0 - fam.lambda_conj());
    let mf = f64::from(m);

    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut inv_pow = 1.0 / (lambda * lambda);
    let mut i = 2usize;
    loop {
        let term = (mf * (i as f64 - 1.0) + 1.0).ln() * inv_pow;
        // Kahan summation.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        let next = i + 1;
        let ratio = ((next as f64 + 1.0) / next as f64).sqrt() / lambda;
        if ratio < 1.0 {
            let first_tail = (mf * next as f64).sqrt() * inv_pow / lambda;
            let tail = prefactor * first_tail / (1.0 - ratio);
            if tail < tol {
                return Ok(EntropyResult {
                    value: prefactor * sum,
                    terms_used: i - 1,
                    tail_bound: tail,
                });
            }
        }
        inv_pow /= lambda;
        i = next;
        if i > 10_000_000 {
            return Err(Error::Numeric("entropy series failed to converge".into()));
        }
    }
}

/// `sum_{i=0}^{3} C(l, i) - m(m+1)(3l - 2m - 4)/6`, valid for
/// `m + 3 <= l <= 2m + 2`.
pub fn complexity_formula(m: u32, len: usize) -> Result<u64> {
    NobleMeans::new(m)?;
    let mi = i128::from(m);
    let l = len as i128;
    if l < mi + 3 || l > 2 * mi + 2 {
        return Err(Error::param(format!(
            "complexity formula holds only for {} <= l <= {}, got l = {len}",
            mi + 3,
            2 * mi + 2
        )));
    }
    let binomials = 1 + l + l * (l - 1) / 2 + l * (l - 1) * (l - 2) / 6;
    let numer = mi * (mi + 1) * (3 * l - 2 * mi - 4);
    if numer % 6 != 0 {
        return Err(Error::Numeric(format!("correction term {numer}/6 is not integral")));
    }
    let value = binomials - numer / 6;
    u64::try_from(value).map_err(|_| Error::Numeric(format!("formula value {value} is negative")))
}

/// `|D_{m,l}|` by exhaustive legal-word closure.
pub fn complexity_exact(m: u32, len: usize) -> Result<usize> {
    Ok(LegalLanguage::compute(m, len)?.words(len).len())
}

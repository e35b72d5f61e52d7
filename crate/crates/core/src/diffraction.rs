//! Diffraction of the random Fibonacci chain (`m = 1`) and Monte Carlo
//! structure factors for any `m`.
//!
//! With `g_n(k) = sum_j exp(-2 pi i k x_j)` over the `F_{n+1}` points of the
//! `n`-th level, the averages `A_n = E g_n` and the variances
//! `B_n = E|g_n|^2 - |E g_n|^2` obey two-term recursions. The Bragg part is
//! the limit of `|A_n|^2 / L_n^2` and the diffuse density the limit of
//! `B_n / L_n`, where `L_n = lambda F_n + F_{n-1}` is the length of the level.
//!
//! The recursions describe the concatenation model
//! `W_n = W_{n-1} W_{n-2}` (probability `p_1`) or `W_{n-2} W_{n-1}`
//! (probability `p_0`), with independent parts, `W_0 = b`, `W_1 = a`, and
//! phases taken at right interval endpoints.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{NobleMeans, ProbabilityVector};
use crate::geometry::realize;
use crate::rng::RandomSource;
use crate::substitution::iterate_random;
use crate::word::{Letter, Word};

fn golden() -> NobleMeans {
    NobleMeans::new(1).expect("m = 1 is valid")
}

fn phase(k: f64, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * k * x)
}

fn check_p0(p0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p0) {
        Ok(())
    } else {
        Err(Error::param(format!("p0 = {p0} is not a probability")))
    }
}

/// Largest level the recursions accept; `F_{n+1}` must fit in a `u64`.
pub const MAX_LEVEL: usize = 90;

fn check_level(n: usize) -> Result<()> {
    if n > MAX_LEVEL {
        Err(Error::param(format!("level {n} exceeds the maximum {MAX_LEVEL}")))
    } else {
        Ok(())
    }
}

/// Fibonacci numbers `F_0 .. F_{n_max}` with `F_0 = 0`, `F_1 = 1`.
///
/// # Panics
/// If `n_max > 93`, where `F_n` no longer fits in a `u64`.
pub fn fibonacci(n_max: usize) -> Vec<u64> {
    let mut f = vec![0u64, 1];
    while f.len() <= n_max {
        let n = f.len();
        f.push(f[n - 1].checked_add(f[n - 2]).expect("Fibonacci overflow"));
    }
    f.truncate(n_max + 1);
    f
}

/// Level lengths `L_0 .. L_{n_max}`: `L_0 = 1`, `L_1 = lambda`,
/// `L_n = L_{n-1} + L_{n-2}`, which equals `lambda F_n + F_{n-1}`.
pub fn level_lengths(n_max: usize) -> Vec<f64> {
    let lam = golden().lambda();
    let mut l = vec![1.0, lam];
    while l.len() <= n_max {
        let n = l.len();
        l.push(l[n - 1] + l[n - 2]);
    }
    l.truncate(n_max + 1);
    l
}

/// Which factor of the cross term in `Delta_n` is conjugated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conjugation {
    /// `A_{n-1} conj(A_{n-2})`, the form that makes `B_n / L_n` converge.
    #[default]
    Corrected,
    /// `conj(A_{n-1}) A_{n-2}`, kept to demonstrate that it diverges.
    Misprint,
}

/// All sequences of the recursion at one `k`.
#[derive(Debug, Clone)]
pub struct RecursionState {
    pub k: f64,
    pub p0: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<f64>,
    pub delta: Vec<f64>,
    pub l: Vec<f64>,
    pub f: Vec<u64>,
}

impl RecursionState {
    pub fn pp_estimate(&self, n: usize) -> f64 {
        self.a[n].norm_sqr() / (self.l[n] * self.l[n])
    }

    pub fn ac_density(&self, n: usize) -> f64 {
        self.b[n] / self.l[n]
    }
}

/// `A_0 .. A_{n_max}` with `A_0 = exp(-2 pi i k)`, `A_1 = exp(-2 pi i k lambda)`.
pub fn recursion_a(k: f64, n_max: usize, p0: f64) -> Result<Vec<Complex64>> {
    check_p0(p0)?;
    check_level(n_max)?;
    let p1 = 1.0 - p0;
    let l = level_lengths(n_max.max(1));
    let mut a = vec![phase(k, 1.0), phase(k, l[1])];
    for n in 2..=n_max {
        let c1 = p1 + p0 * phase(k, l[n - 2]);
        let c2 = p0 + p1 * phase(k, l[n - 1]);
        a.push(c1 * a[n - 1] + c2 * a[n - 2]);
    }
    a.truncate(n_max + 1);
    Ok(a)
}

/// `Delta_n(k)` for `n >= 2` from a precomputed `A` sequence.
pub fn delta(k: f64, n: usize, a: &[Complex64], mode: Conjugation) -> Result<f64> {
    if n < 2 || n >= a.len() {
        return Err(Error::param(format!("Delta_{n} needs 2 <= n < {}", a.len())));
    }
    let l = level_lengths(n);
    let t1 = 2.0 * PI * k * l[n - 1];
    let t2 = 2.0 * PI * k * l[n - 2];
    let (a1, a2) = (a[n - 1], a[n - 2]);
    let cross = match mode {
        Conjugation::Corrected => a1 * a2.conj(),
        Conjugation::Misprint => a1.conj() * a2,
    };
    let w = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t1))
        * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -t2));
    Ok((1.0 - t1.cos()) * a2.norm_sqr() + (1.0 - t2.cos()) * a1.norm_sqr() - (w * cross).re)
}

/// Runs the `A`, `Delta` and `B` recursions up to `n_max`.
pub fn recursion(k: f64, n_max: usize, p0: f64, mode: Conjugation) -> Result<RecursionState> {
    let a = recursion_a(k, n_max.max(1), p0)?;
    let p1 = 1.0 - p0;
    let mut b = vec![0.0, 0.0];
    let mut deltas = vec![0.0, 0.0];
    for n in 2..=n_max {
        let d = delta(k, n, &a, mode)?;
        deltas.push(d);
        b.push(b[n - 1] + b[n - 2] + 2.0 * p0 * p1 * d);
    }
    let mut a = a;
    a.truncate(n_max + 1);
    b.truncate(n_max + 1);
    deltas.truncate(n_max + 1);
    Ok(RecursionState {
        k,
        p0,
        a,
        b,
        delta: deltas,
        l: level_lengths(n_max),
        f: fibonacci(n_max + 1),
    })
}

/// `B_0 .. B_{n_max}` with `B_0 = B_1 = 0`.
pub fn recursion_b(k: f64, n_max: usize, p0: f64, mode: Conjugation) -> Result<Vec<f64>> {
    Ok(recursion(k, n_max, p0, mode)?.b)
}

/// `B_n = 2 p_0 p_1 sum_{i=2}^{n} F_{n+1-i} Delta_i`.
pub fn closed_form_b(k: f64, n: usize, p0: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("closed form needs n >= 2"));
    }
    let a = recursion_a(k, n, p0)?;
    let f = fibonacci(n);
    let mut sum = 0.0;
    for i in 2..=n {
        sum += f[n + 1 - i] as f64 * delta(k, i, &a, Conjugation::Corrected)?;
    }
    Ok(2.0 * p0 * (1.0 - p0) * sum)
}

/// `|A_n(k)|^2 / L_n^2`.
pub fn pp_estimate(k: f64, n: usize, p0: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("pp estimate needs n >= 1"));
    }
    Ok(recursion(k, n, p0, Conjugation::Corrected)?.pp_estimate(n))
}

/// `B_n(k) / L_n`.
pub fn ac_density(k: f64, n: usize, p0: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("ac density needs n >= 2"));
    }
    Ok(recursion(k, n, p0, Conjugation::Corrected)?.ac_density(n))
}

/// Largest `|B_n/L_n - B_{n-1}/L_{n-1}|` over `grid`, for each `n` in
/// `n_lo..=n_hi`.
pub fn ac_sup_differences(
    grid: &[f64],
    p0: f64,
    n_lo: usize,
    n_hi: usize,
    mode: Conjugation,
) -> Result<Vec<f64>> {
    if n_lo < 1 || n_lo > n_hi {
        return Err(Error::param("need 1 <= n_lo <= n_hi"));
    }
    let states = grid
        .iter()
        .map(|&k| recursion(k, n_hi, p0, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok((n_lo..=n_hi)
        .map(|n| {
            states
                .iter()
                .map(|s| (s.ac_density(n) - s.ac_density(n - 1)).abs())
                .fold(0.0, f64::max)
        })
        .collect())
}

const ETA_CUTOFF: f64 = 1e-8;

/// `(eta_a(0), eta_b(0)) = (1/sqrt 5, (lambda - 1)/sqrt 5)`.
pub fn eta_hat_at_zero() -> (f64, f64) {
    let s5 = 5f64.sqrt();
    (1.0 / s5, (golden().lambda() - 1.0) / s5)
}

/// `(eta_a(y), eta_b(y))` from the product of averaged level matrices,
/// taken left to right for levels `1..=n`, with `n` the smallest level at
/// which `|y| |xi|^n < 1e-8`. Only `m = 1` is supported.
pub fn eta_hat(m: u32, y: f64, p0: f64) -> Result<(Complex64, Complex64)> {
    if m != 1 {
        return Err(Error::Unsupported(format!(
            "the eta recursion exists only for m = 1, not m = {m}"
        )));
    }
    check_p0(p0)?;
    let xi = golden().lambda_conj();
    let mut n = 0;
    while y.abs() * xi.abs().powi(n) >= ETA_CUTOFF {
        n += 1;
    }
    eta_hat_levels(y, p0, n as usize)
}

/// `eta_hat` with an explicit number of levels.
pub fn eta_hat_levels(y: f64, p0: f64, levels: usize) -> Result<(Complex64, Complex64)> {
    check_p0(p0)?;
    let p1 = 1.0 - p0;
    let xi = golden().lambda_conj();
    let one = Complex64::new(1.0, 0.0);
    // Running product P = B_1 B_2 ... B_n as [[p, q], [r, s]].
    let (mut p, mut q, mut r, mut s) = (one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one);
    let mut xi_pow = 1.0; // xi^(l-1)
    for _ in 1..=levels {
        let e0 = phase(y, xi_pow);
        let e1 = phase(y, xi_pow * xi);
        // p0 [[e0, 1], [1, 0]] + p1 [[1, 1], [e1, 0]]
        let (b11, b12, b21, b22) = (p0 * e0 + p1, one, p0 + p1 * e1, Complex64::new(0.0, 0.0));
        let np = p * b11 + q * b21;
        let nq = p * b12 + q * b22;
        let nr = r * b11 + s * b21;
        let ns = r * b12 + s * b22;
        (p, q, r, s) = (np, nq, nr, ns);
        xi_pow *= xi;
    }
    let scale = xi.abs().powi(levels as i32);
    let (va, vb) = eta_hat_at_zero();
    Ok(((p * va + q * vb) * scale, (r * va + s * vb) * scale))
}

/// A point `(u + v lambda_m) / sqrt(m^2 + 4)` of the Fourier module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierModulePoint {
    pub m: u32,
    pub u: i64,
    pub v: i64,
}

impl FourierModulePoint {
    pub fn new(m: u32, u: i64, v: i64) -> Self {
        FourierModulePoint { m, u, v }
    }

    pub fn value(&self) -> f64 {
        let fam = NobleMeans::new(self.m).expect("valid m");
        (self.u as f64 + self.v as f64 * fam.lambda()) / fam.discriminant_root()
    }

    /// `k' = -(u + v lambda'_m) / sqrt(m^2 + 4)`; the root changes sign
    /// under conjugation.
    pub fn star(&self) -> f64 {
        let fam = NobleMeans::new(self.m).expect("valid m");
        -(self.u as f64 + self.v as f64 * fam.lambda_conj()) / fam.discriminant_root()
    }
}

/// All module points with `|k| <= k_max` and `|k'| <= star_cutoff`, sorted by `k`.
pub fn fourier_module_points(m: u32, k_max: f64, star_cutoff: f64) -> Result<Vec<FourierModulePoint>> {
    let fam = NobleMeans::new(m)?;
    if !(k_max > 0.0 && star_cutoff > 0.0) {
        return Err(Error::param("k_max and star_cutoff must be positive"));
    }
    let s = fam.discriminant_root();
    let (lam, lc) = (fam.lambda(), fam.lambda_conj());
    // u + v lambda in [-k s, k s] and u + v lambda' in [-c s, c s] give |v| <= k + c.
    let v_max = (k_max + star_cutoff).ceil() as i64 + 1;
    let mut out = Vec::new();
    for v in -v_max..=v_max {
        let vf = v as f64;
        let lo = (-k_max * s - vf * lam).max(-star_cutoff * s - vf * lc).floor() as i64 - 1;
        let hi = (k_max * s - vf * lam).min(star_cutoff * s - vf * lc).ceil() as i64 + 1;
        for u in lo..=hi {
            let p = FourierModulePoint::new(m, u, v);
            if p.value().abs() <= k_max && p.star().abs() <= star_cutoff {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| a.value().total_cmp(&b.value()).then(a.u.cmp(&b.u)));
    Ok(out)
}

/// `|eta_a(-k') + eta_b(-k')|^2` at a module point (`m = 1`).
pub fn pp_intensity(kp: &FourierModulePoint, p0: f64) -> Result<f64> {
    let (ea, eb) = eta_hat(kp.m, -kp.star(), p0)?;
    Ok((ea + eb).norm_sqr())
}

/// Largest level the exhaustive oracle accepts.
pub const EXHAUSTIVE_MAX_N: usize = 7;

/// Every realisation of the concatenation model at level `n`, with its
/// probability. Zero-probability branches are dropped.
pub fn concatenation_realisations(n: usize, p0: f64) -> Result<Vec<(f64, Word)>> {
    check_p0(p0)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::Resource {
            what: format!("exhaustive enumeration at level {n}"),
            largest_feasible: Some(EXHAUSTIVE_MAX_N),
        });
    }
    let p1 = 1.0 - p0;
    let mut levels: Vec<Vec<(f64, Word)>> = vec![
        vec![(1.0, Word::from_letters(vec![Letter::B]))],
        vec![(1.0, Word::from_letters(vec![Letter::A]))],
    ];
    for level in 2..=n {
        let mut next = Vec::new();
        for (px, x) in &levels[level - 1] {
            for (py, y) in &levels[level - 2] {
                if p1 > 0.0 {
                    next.push((p1 * px * py, x.concat(y)));
                }
                if p0 > 0.0 {
                    next.push((p0 * px * py, y.concat(x)));
                }
            }
        }
        levels.push(next);
    }
    Ok(levels.swap_remove(n))
}

/// `sum_j exp(-2 pi i k x_j)` over right interval endpoints of `word` (`m = 1`).
pub fn exponential_sum_right(word: &Word, k: f64) -> Complex64 {
    let lam = golden().lambda();
    let mut g = Complex64::new(0.0, 0.0);
    let (mut u, mut v) = (0i64, 0i64);
    for &l in word.letters() {
        match l {
            Letter::A => v += 1,
            Letter::B => u += 1,
        }
        g += phase(k, u as f64 + v as f64 * lam);
    }
    g
}

/// Moments of `g_n` over the concatenation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: Complex64,
    pub second_moment: f64,
    /// `E |g_n - E g_n|^2`, summed about the mean.
    pub variance: f64,
}

/// Exact moments of `g_n` by enumeration. Sums are compensated and divided
/// by the total probability, so rounding in the products of probabilities
/// does not leak into the result.
pub fn exhaustive_expectation(k: f64, n: usize, p0: f64) -> Result<Moments> {
    let terms: Vec<(f64, Complex64)> = concatenation_realisations(n, p0)?
        .into_iter()
        .map(|(p, word)| (p, exponential_sum_right(&word, k)))
        .collect();
    let total = compensated_sum(terms.iter().map(|t| t.0));
    let mean = Complex64::new(
        compensated_sum(terms.iter().map(|(p, g)| p * g.re)),
        compensated_sum(terms.iter().map(|(p, g)| p * g.im)),
    ) / total;
    let second_moment = compensated_sum(terms.iter().map(|(p, g)| p * g.norm_sqr())) / total;
    let variance = compensated_sum(terms.iter().map(|(p, g)| p * (g - mean).norm_sqr())) / total;
    Ok(Moments {
        mean,
        second_moment,
        variance,
    })
}

/// One row of a sampled spectrum. Columns that were not computed are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub k: f64,
    pub pp: Option<f64>,
    pub ac: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub module_point: Option<(i64, i64)>,
}

impl SpectrumRow {
    pub fn at(k: f64) -> Self {
        SpectrumRow {
            k,
            pp: None,
            ac: None,
            mc_mean: None,
            mc_stderr: None,
            module_point: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

/// Grid for spectrum plots: `n_uniform` points spread evenly over
/// `[0, k_max]` plus every module point with `0 <= k <= k_max` and
/// `|k'| <= star_cutoff`, sorted by `k`.
pub fn figure_grid(m: u32, k_max: f64, n_uniform: usize, star_cutoff: f64) -> Result<Vec<SpectrumRow>> {
    let mut rows: Vec<SpectrumRow> = (0..n_uniform)
        .map(|i| {
            let k = if n_uniform == 1 {
                0.0
            } else {
                k_max * i as f64 / (n_uniform - 1) as f64
            };
            SpectrumRow::at(k)
        })
        .collect();
    for p in fourier_module_points(m, k_max, star_cutoff)? {
        if p.value() >= 0.0 {
            let mut row = SpectrumRow::at(p.value());
            row.module_point = Some((p.u, p.v));
            rows.push(row);
        }
    }
    rows.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(rows)
}

/// Fills `pp` (`|A_n|^2 / L_n^2`) and `ac` (`B_n / L_n`) for `m = 1`.
/// A variance that vanishes can come out a few ulps below zero; it is
/// reported as zero.
///
/// The recursion is evaluated at `p0_recursion`; to compare with
/// [`mc_spectrum`] pass `1 - p0`, because left endpoints of a realisation
/// are right endpoints of its mirror image, and mirroring swaps the two
/// rules.
pub fn fill_analytic(rows: &mut [SpectrumRow], n: usize, p0_recursion: f64) -> Result<()> {
    let filled = rows
        .par_iter()
        .map(|row| {
            let st = recursion(row.k, n, p0_recursion, Conjugation::Corrected)?;
            Ok((st.pp_estimate(n), st.ac_density(n).max(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    for (row, (pp, ac)) in rows.iter_mut().zip(filled) {
        row.pp = Some(pp);
        row.ac = Some(ac);
    }
    Ok(())
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Monte Carlo estimate of `E |g(k)|^2 / length` over `samples`
/// realisations of `zeta_m^{n-1}(a)` (the word whose exponential sum is
/// `g_n`), using left endpoints. Sample `i` draws from substream `i` of
/// `seed`, so results do not depend on thread scheduling.
pub fn mc_spectrum(
    m: u32,
    probs: &ProbabilityVector,
    n: usize,
    k_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<SpectrumTable> {
    let fam = NobleMeans::new(m)?;
    probs.check_family(&fam)?;
    if n < 1 {
        return Err(Error::param("level n must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomSource::substream(seed, i);
            let word = iterate_random(m, probs, &Word::from_letters(vec![Letter::A]), n - 1, &mut rng)?;
            let ps = realize(&word, m, crate::geometry::QuadraticInteger::ZERO)?;
            let length = ps.length.value(&fam);
            let xs: Vec<f64> = ps.points.iter().map(|p| p.value(&fam)).collect();
            Ok(k_grid
                .iter()
                .map(|&k| {
                    let g: Complex64 = xs.iter().map(|&x| phase(k, x)).sum();
                    g.norm_sqr() / length
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let nf = samples as f64;
    let rows = k_grid
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mean = compensated_sum(per_sample.iter().map(|s| s[j])) / nf;
            let stderr = if samples > 1 {
                let var = compensated_sum(per_sample.iter().map(|s| (s[j] - mean).powi(2))) / (nf - 1.0);
                (var / nf).sqrt()
            } else {
                0.0
            };
            SpectrumRow {
                mc_mean: Some(mean),
                mc_stderr: Some(stderr),
                ..SpectrumRow::at(k)
            }
        })
        .collect();
    Ok(SpectrumTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    /// Whitespace-aligned columns with a `#` header line.
    Text,
}

pub const SPECTRUM_COLUMNS: [&str; 7] = ["k", "pp", "ac", "mc_mean", "mc_stderr", "u", "v"];

fn fmt_f(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

impl SpectrumTable {
    pub fn to_csv(&self) -> String {
        let mut out = SPECTRUM_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let (u, v) = r
                .module_point
                .map(|(u, v)| (u.to_string(), v.to_string()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.16e},{},{},{},{},{},{}",
                r.k,
                fmt_f(r.pp),
                fmt_f(r.ac),
                fmt_f(r.mc_mean),
                fmt_f(r.mc_stderr),
                u,
                v
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# {:>24} {:>24} {:>24} {:>24} {:>24} {:>8} {:>8}\n",
            "k", "pp", "ac", "mc_mean", "mc_stderr", "u", "v"
        );
        let dash = |s: String| if s.is_empty() { "-".to_string() } else { s };
        for r in &self.rows {
            let (u, v) = r
                .module_point
                .map(|(u, v)| (u.to_string(), v.to_string()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  {:>24} {:>24} {:>24} {:>24} {:>24} {:>8} {:>8}",
                format!("{:.16e}", r.k),
                dash(fmt_f(r.pp)),
                dash(fmt_f(r.ac)),
                dash(fmt_f(r.mc_mean)),
                dash(fmt_f(r.mc_stderr)),
                dash(u),
                dash(v)
            );
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty spectrum file".into()))?;
        if header.trim() != SPECTRUM_COLUMNS.join(",") {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let opt_f = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            }
        };
        let opt_i = |s: &str| -> Result<Option<i64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<i64>()
                    .map(Some)
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            }
        };
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != SPECTRUM_COLUMNS.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 2,
                    SPECTRUM_COLUMNS.len(),
                    f.len()
                )));
            }
            let k = opt_f(f[0])?.ok_or_else(|| Error::Parse(format!("line {}: missing k", lineno + 2)))?;
            let module_point = match (opt_i(f[5])?, opt_i(f[6])?) {
                (Some(u), Some(v)) => Some((u, v)),
                (None, None) => None,
                _ => return Err(Error::Parse(format!("line {}: half a module point", lineno + 2))),
            };
            rows.push(SpectrumRow {
                k,
                pp: opt_f(f[1])?,
                ac: opt_f(f[2])?,
                mc_mean: opt_f(f[3])?,
                mc_stderr: opt_f(f[4])?,
                module_point,
            });
        }
        Ok(SpectrumTable { rows })
    }
}

/// Writes the table to `path`.
pub fn spectrum_export(table: &SpectrumTable, path: &Path, format: ExportFormat) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::param("refusing to export an empty spectrum table"));
    }
    let body = match format {
        ExportFormat::Csv => table.to_csv(),
        ExportFormat::Text => table.to_text(),
    };
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(body.as_bytes()).map_err(io)?;
    Ok(())
}

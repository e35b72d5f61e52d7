use std::collections::HashMap;
use std::time::Instant;

use rnms::diffraction::{
    ac_sup_differences, closed_form_b, concatenation_realisations, exhaustive_expectation,
    exponential_sum_right, fibonacci, fourier_module_points, level_lengths, mc_spectrum,
    pp_intensity, recursion, recursion_a, Conjugation,
};
use rnms::entropy::{complexity_exact, complexity_formula, entropy_series, generation_set};
use rnms::geometry::{
    empirical_density, realize, symmetric_autocorrelation, window_check, QuadraticInteger,
};
use rnms::induced::{induced_matrix, matrix_spectrum, pf_frequencies, word_frequencies};
use rnms::legal::LegalLanguage;
use rnms::substitution::{
    abelianization, deterministic_substitute, grow_random, iterate_random, random_substitute,
};
use rnms::{Letter, NobleMeans, ProbabilityVector, RandomSource, Word};

use crate::args::ValidateArgs;

type Check = Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strict_probs(rng: &mut RandomSource, m: u32) -> ProbabilityVector {
    let raw: Vec<f64> = (0..=m).map(|_| 0.05 + rng.uniform()).collect();
    let t: f64 = raw.iter().sum();
    ProbabilityVector::strict(raw.iter().map(|x| x / t).collect()).expect("positive weights")
}

fn a_word() -> Word {
    Word::from_letters(vec![Letter::A])
}

fn family_constants() -> Check {
    for m in 1..=7u32 {
        let f = NobleMeans::new(m).map_err(err)?;
        let (l, lc) = (f.lambda(), f.lambda_conj());
        ensure((l + lc - m as f64).abs() <= 1e-12 && (l * lc + 1.0).abs() <= 1e-12, || format!("m = {m}"))?;
        ensure(l > 1.0 && 0.0 > lc && lc > -1.0, || format!("m = {m}: ordering"))?;
    }
    Ok("m = 1..7".into())
}

fn letter_counts() -> Check {
    let mut rng = RandomSource::new(1);
    for m in 1..=5u32 {
        let p = ProbabilityVector::uniform(m);
        let (w, _) = grow_random(m, &p, 300, &mut rng).map_err(err)?;
        let img = random_substitute(m, &p, &w, &mut rng).map_err(err)?;
        let (a, b) = abelianization(&w);
        ensure(abelianization(&img) == (m as usize * a + b, a), || format!("m = {m}"))?;
    }
    Ok("m = 1..5".into())
}

fn legality() -> Check {
    let mut words = 0;
    for m in 1..=3u32 {
        let lang = LegalLanguage::compute(m, 8).map_err(err)?;
        for len in 1..=8 {
            for w in lang.words(len) {
                words += 1;
                ensure(lang.contains(&w.reversed()), || format!("reversal of {w} not legal"))?;
                for i in 0..len {
                    ensure(lang.contains(&w.subword(i, len - 1).unwrap()), || format!("suffix of {w}"))?;
                    ensure(lang.contains(&w.subword(0, i).unwrap()), || format!("prefix of {w}"))?;
                }
            }
        }
    }
    Ok(format!("{words} legal words, m <= 3, length <= 8"))
}

fn deterministic_embedding() -> Check {
    for m in 1..=4u32 {
        for i in 0..=m as usize {
            let p = ProbabilityVector::indicator(m, i).map_err(err)?;
            let mut det = a_word();
            for k in 0..=10 {
                let r = iterate_random(m, &p, &a_word(), k, &mut RandomSource::new(5)).map_err(err)?;
                ensure(r == det, || format!("m = {m}, i = {i}, k = {k}"))?;
                if k < 10 {
                    det = deterministic_substitute(m, i, &det).map_err(err)?;
                }
            }
        }
    }
    Ok("m <= 4, i <= m, k <= 10".into())
}

fn reproducibility() -> Check {
    let p = ProbabilityVector::uniform(2);
    let x = iterate_random(2, &p, &a_word(), 8, &mut RandomSource::new(77)).map_err(err)?;
    let y = iterate_random(2, &p, &a_word(), 8, &mut RandomSource::new(77)).map_err(err)?;
    ensure(x == y, || "words differ".into())?;
    let ks: Vec<f64> = (0..40).map(|i| 0.07 * i as f64).collect();
    let pu = ProbabilityVector::uniform(1);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(err)?;
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(err)?;
    let a = one.install(|| mc_spectrum(1, &pu, 7, &ks, 200, 3)).map_err(err)?;
    let b = four.install(|| mc_spectrum(1, &pu, 7, &ks, 200, 3)).map_err(err)?;
    ensure(a == b, || "Monte Carlo depends on thread count".into())?;
    Ok("words and spectra identical across runs and 1 or 4 threads".into())
}

fn generation_sets() -> Check {
    for (m, n) in [(1u32, 3usize), (1, 4), (1, 5), (1, 6), (1, 7), (2, 3), (2, 4), (3, 3), (3, 4)] {
        let set = generation_set(m, n).map_err(err)?;
        let lang = LegalLanguage::compute(m, set.word_length).map_err(err)?;
        let c = lang.words(set.word_length).len();
        ensure(set.len() < c, || format!("m = {m}, n = {n}: |G_n| = {} >= {c}", set.len()))?;
        for w in &set.words {
            ensure(lang.contains(w), || format!("{w} not legal"))?;
            ensure(set.words.contains(&w.reversed()), || format!("reversal of {w} missing"))?;
        }
    }
    Ok("legal, reversal-closed and below the complexity".into())
}

fn entropy_values() -> Check {
    let h: Vec<f64> = (1..=7).map(|m| entropy_series(m, 1e-9).map(|r| r.value)).collect::<Result<_, _>>().map_err(err)?;
    ensure(h.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {h:?}"))?;
    for (m, expect) in [(1usize, 0.444399), (4, 0.338619), (7, 0.267301)] {
        ensure((h[m - 1] - expect).abs() <= 5e-7, || format!("m = {m}: {}", h[m - 1]))?;
    }
    Ok(format!("h_1 = {:.6}, decreasing through m = 7", h[0]))
}

fn complexity_window() -> Check {
    let mut n = 0;
    for m in 1..=3u32 {
        for len in (m as usize + 3)..=(2 * m as usize + 2) {
            let f = complexity_formula(m, len).map_err(err)?;
            let x = complexity_exact(m, len).map_err(err)? as u64;
            ensure(f == x, || format!("m = {m}, l = {len}: {f} vs {x}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} lengths"))
}

fn pf_eigenvalue() -> Check {
    let mut rng = RandomSource::new(11);
    let mut worst = 0.0f64;
    for m in 1..=4u32 {
        for _ in 0..10 {
            let p = strict_probs(&mut rng, m);
            for len in 1..=4 {
                let fv = pf_frequencies(&induced_matrix(m, len, &p).map_err(err)?, 1e-9).map_err(err)?;
                worst = worst.max((fv.eigenvalue - NobleMeans::new(m).unwrap().lambda()).abs());
                ensure(fv.values.iter().all(|&v| v > 0.0), || format!("m = {m}, l = {len}: non-positive entry"))?;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("off by {worst:e}"))?;
    Ok(format!("m <= 4, l <= 4, 10 rules each, within {worst:.1e}"))
}

fn level_two_spectrum() -> Check {
    let mut rng = RandomSource::new(12);
    let mut worst = 0.0f64;
    for m in 1..=4u32 {
        for _ in 0..5 {
            let p = strict_probs(&mut rng, m);
            let f = NobleMeans::new(m).unwrap();
            let mut expect = [f.lambda(), f.lambda_conj(), -p.get(0), p.get(0) * p.get(m as usize)];
            expect.sort_by(|a, b| b.total_cmp(a));
            let ev = matrix_spectrum(&induced_matrix(m, 2, &p).map_err(err)?).map_err(err)?;
            ensure(ev.len() == 4, || format!("m = {m}: dimension {}", ev.len()))?;
            for (z, e) in ev.iter().zip(expect) {
                worst = worst.max((z.re - e).abs() + z.im.abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("off by {worst:e}"))?;
    Ok(format!("within {worst:.1e}"))
}

fn kolmogorov() -> Check {
    let mut worst = 0.0f64;
    for m in 1..=3u32 {
        let p = ProbabilityVector::uniform(m);
        for len in 1..=3 {
            let s = word_frequencies(m, len, &p).map_err(err)?;
            let l = word_frequencies(m, len + 1, &p).map_err(err)?;
            for (w, v) in s.iter() {
                let mut right = 0.0;
                let mut left = 0.0;
                for c in Letter::ALL {
                    let mut r = w.clone();
                    r.push(c);
                    right += l.get(&r);
                    let mut x = Word::from_letters(vec![c]);
                    x.extend_from(w);
                    left += l.get(&x);
                }
                worst = worst.max((right - v).abs()).max((left - v).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("defect {worst:e}"))?;
    Ok(format!("defect {worst:.1e}"))
}

fn column_sums() -> Check {
    for m in 1..=3u32 {
        for len in 1..=4 {
            let mm = induced_matrix(m, len, &ProbabilityVector::uniform(m)).map_err(err)?;
            for (w, s) in mm.words.iter().zip(mm.column_sums()) {
                let expect = if w.letters()[0] == Letter::A { m as f64 + 1.0 } else { 1.0 };
                ensure((s - expect).abs() <= 1e-12, || format!("m = {m}, {w}: {s}"))?;
            }
        }
    }
    Ok("m <= 3, l <= 4".into())
}

fn geometry_checks() -> Check {
    let mut rng = RandomSource::new(13);
    for m in 1..=4u32 {
        let (w, _) = grow_random(m, &ProbabilityVector::uniform(m), 5000, &mut rng).map_err(err)?;
        let ps = realize(&w, m, QuadraticInteger::ZERO).map_err(err)?;
        ensure(window_check(&ps).is_empty(), || format!("m = {m}: window violation"))?;
        for pair in ps.points.windows(2) {
            let g = pair[1] - pair[0];
            ensure(g == QuadraticInteger::ONE || g == QuadraticInteger::LAMBDA, || format!("m = {m}: gap {g}"))?;
        }
    }
    let (w, _) = grow_random(1, &ProbabilityVector::uniform(1), 10_000, &mut rng).map_err(err)?;
    let target = NobleMeans::new(1).unwrap().lambda() / 5f64.sqrt();
    let err_at = |n: usize| -> Result<f64, String> {
        let ps = realize(&w.subword(0, n - 1).unwrap(), 1, QuadraticInteger::ZERO).map_err(err)?;
        Ok((empirical_density(&ps).map_err(err)? - target).abs())
    };
    let (e2, e4) = (err_at(100)?, err_at(10_000)?);
    ensure(e4 < e2, || format!("density error {e4} at 10^4 not below {e2} at 10^2"))?;
    let ps = realize(&w.subword(0, 999).unwrap(), 1, QuadraticInteger::ZERO).map_err(err)?;
    let coeffs = symmetric_autocorrelation(&ps, 8.0).map_err(err)?;
    let map: HashMap<QuadraticInteger, f64> = coeffs.iter().copied().collect();
    ensure(coeffs.iter().all(|(z, c)| map.get(&(-*z)) == Some(c)), || "autocorrelation not symmetric".into())?;
    Ok(format!("window, gaps, density error {e4:.1e}, symmetric autocorrelation"))
}

fn recursion_oracles() -> Check {
    let mut worst = 0.0f64;
    for p0 in [0.2, 0.5, 0.8] {
        for i in 0..25 {
            let k = 3.0 * i as f64 / 24.0;
            let st = recursion(k, 6, p0, Conjugation::Corrected).map_err(err)?;
            for n in 0..=6 {
                let mo = exhaustive_expectation(k, n, p0).map_err(err)?;
                worst = worst.max((st.a[n] - mo.mean).norm()).max((st.b[n] - mo.variance).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("off by {worst:e}"))?;
    Ok(format!("n <= 6, within {worst:.1e}"))
}

fn closed_form() -> Check {
    let mut worst = 0.0f64;
    for p0 in [0.2, 0.5, 0.8] {
        for i in 1..=25 {
            let k = 0.119 * i as f64;
            let st = recursion(k, 30, p0, Conjugation::Corrected).map_err(err)?;
            for n in 2..=30 {
                let c = closed_form_b(k, n, p0).map_err(err)?;
                worst = worst.max((c - st.b[n]).abs() / st.b[n].abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("relative error {worst:e}"))?;
    Ok(format!("n <= 30, relative {worst:.1e}"))
}

fn lengths() -> Check {
    let l = level_lengths(30);
    let f = fibonacci(30);
    let lam = NobleMeans::new(1).unwrap().lambda();
    for n in 1..=30 {
        ensure((l[n] / lam.powi(n as i32) - 1.0).abs() <= 1e-9, || format!("n = {n}"))?;
        ensure((l[n] - (lam * f[n] as f64 + f[n - 1] as f64)).abs() <= 1e-9 * l[n], || format!("n = {n}"))?;
    }
    Ok("n <= 30".into())
}

fn deterministic_limit() -> Check {
    for p0 in [0.0, 1.0] {
        for i in 0..20 {
            let k = 0.15 * i as f64;
            let st = recursion(k, 7, p0, Conjugation::Corrected).map_err(err)?;
            ensure(st.b.iter().all(|&b| b == 0.0), || format!("p0 = {p0}: B not zero"))?;
            let word = &concatenation_realisations(7, p0).map_err(err)?[0].1;
            let g = exponential_sum_right(word, k);
            ensure((g.norm_sqr() - st.a[7].norm_sqr()).abs() <= 1e-9, || format!("p0 = {p0}, k = {k}"))?;
        }
    }
    Ok("p0 in {0, 1}".into())
}

fn two_routes() -> Check {
    let l = level_lengths(20)[20];
    let mut worst = 0.0f64;
    let pts = fourier_module_points(1, 3.0, 1.0).map_err(err)?;
    for p in &pts {
        let a = recursion_a(p.value(), 20, 0.5).map_err(err)?[20].norm_sqr() / (l * l);
        worst = worst.max((a - pp_intensity(p, 0.5).map_err(err)?).abs());
    }
    ensure(worst <= 1e-3, || format!("off by {worst:e}"))?;
    Ok(format!("{} module points with |k'| <= 1, within {worst:.1e}", pts.len()))
}

fn nonnegative() -> Check {
    let ks: Vec<f64> = (0..200).map(|i| 0.015 * i as f64).collect();
    let mc = mc_spectrum(1, &ProbabilityVector::uniform(1), 6, &ks, 100, 4).map_err(err)?;
    ensure(mc.rows.iter().all(|r| r.mc_mean.unwrap() >= 0.0), || "negative Monte Carlo mean".into())?;
    for &k in &ks {
        let st = recursion(k, 20, 0.5, Conjugation::Corrected).map_err(err)?;
        ensure(st.ac_density(20) >= 0.0, || format!("negative ac at k = {k}"))?;
    }
    Ok("200 grid points".into())
}

fn ac_convergence(mode: Conjugation) -> Result<(f64, f64), String> {
    let grid: Vec<f64> = (1..=100).map(|i| 0.03 * i as f64).collect();
    let d = ac_sup_differences(&grid, 0.5, 10, 25, mode).map_err(err)?;
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    if decreasing {
        Ok((d[0], d[d.len() - 1]))
    } else {
        Err(format!("sup differences not decreasing: first {:.2e}, last {:.2e}", d[0], d[d.len() - 1]))
    }
}

enum Status {
    Pass,
    Fail,
    ExpectedDivergent,
}

type NamedCheck = (&'static str, &'static str, fn() -> Check);

pub fn run(args: &ValidateArgs) -> u8 {
    let checks: Vec<NamedCheck> = vec![
        ("family constants", "noble means eigenvalues", family_constants),
        ("letter-count determinism", "substitution matrix", letter_counts),
        ("legality closure", "legal words, reflection symmetry", legality),
        ("deterministic embedding", "random rule with one-point distribution", deterministic_embedding),
        ("reproducibility", "seeded sampling", reproducibility),
        ("generation sets", "generation-set recursion", generation_sets),
        ("entropy series", "entropy table", entropy_values),
        ("complexity formula", "closed complexity formula", complexity_window),
        ("Perron-Frobenius eigenvalue", "induced substitution matrix", pf_eigenvalue),
        ("level-two spectrum", "spectrum of the level-two induced matrix", level_two_spectrum),
        ("Kolmogorov consistency", "subword frequency vectors", kolmogorov),
        ("column sums", "induced substitution matrix", column_sums),
        ("geometry", "cut and project window", geometry_checks),
        ("recursion oracle", "A_n and B_n recursions", recursion_oracles),
        ("closed form of B_n", "B_n as a Fibonacci-weighted sum", closed_form),
        ("level lengths", "L_n = lambda^n", lengths),
        ("deterministic limit", "A_n and B_n recursions", deterministic_limit),
        ("two pathways", "level-matrix product for eta", two_routes),
        ("non-negative spectra", "structure factor", nonnegative),
    ];
    let mut failed = 0;
    let report = |status: Status, name: &str, anchor: &str, detail: &str, secs: f64| {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedDivergent => "EXPECTED-DIVERGENT",
        };
        println!("{tag:<18} {name} [{anchor}] {detail} ({secs:.2}s)");
    };
    for (name, anchor, check) in checks {
        let t = Instant::now();
        match check() {
            Ok(d) => report(Status::Pass, name, anchor, &d, t.elapsed().as_secs_f64()),
            Err(d) => {
                failed += 1;
                report(Status::Fail, name, anchor, &d, t.elapsed().as_secs_f64());
            }
        }
    }
    let t = Instant::now();
    match ac_convergence(Conjugation::Corrected) {
        Ok((a, b)) => report(Status::Pass, "ac convergence", "B_n / L_n", &format!("sup differences {a:.2e} -> {b:.2e}"), t.elapsed().as_secs_f64()),
        Err(d) => {
            failed += 1;
            report(Status::Fail, "ac convergence", "B_n / L_n", &d, t.elapsed().as_secs_f64());
        }
    }
    if args.misprint_mode {
        let t = Instant::now();
        let anchor = "B_n / L_n, conjugate on A_(n-1)";
        match ac_convergence(Conjugation::Misprint) {
            Err(d) => report(Status::ExpectedDivergent, "ac convergence (variant)", anchor, &d, t.elapsed().as_secs_f64()),
            Ok((a, b)) => {
                failed += 1;
                report(Status::Fail, "ac convergence (variant)", anchor, &format!("unexpectedly converged {a:.2e} -> {b:.2e}"), t.elapsed().as_secs_f64());
            }
        }
    }
    if failed == 0 {
        println!("all checks passed");
        0
    } else {
        println!("{failed} check(s) failed");
        crate::EXIT_VALIDATION
    }
}

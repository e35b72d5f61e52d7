//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rnms::diffraction::{
    ac_sup_differences, closed_form_b, exhaustive_expectation, figure_grid, fill_analytic,
    fourier_module_points, mc_spectrum, pp_intensity, recursion, recursion_a, Conjugation,
    FourierModulePoint,
};
use rnms::entropy::{
    complexity_exact, complexity_formula, empirical_entropy, entropy_series, generation_set,
};
use rnms::geometry::{empirical_density, realize, window_check, QuadraticInteger};
use rnms::induced::{
    empirical_frequencies, induced_matrix, matrix_spectrum, pf_frequencies, spectral_power_sums,
    word_frequencies,
};
use rnms::substitution::grow_random;
use rnms::{Letter, NobleMeans, ProbabilityVector, RandomSource, Word};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let el = start.elapsed();
    ensure(el < limit, || format!("took {el:.2?}, limit {limit:?}"))?;
    Ok(el)
}

fn lam(m: u32) -> f64 {
    NobleMeans::new(m).unwrap().lambda()
}

fn entropy_table() -> Outcome {
    let start = Instant::now();
    let table = [0.444399, 0.408549, 0.371399, 0.338619, 0.310804, 0.287298, 0.267301];
    let mut worst = 0.0f64;
    let mut misses = Vec::new();
    for (i, &expect) in table.iter().enumerate() {
        let m = i as u32 + 1;
        let h = entropy_series(m, 1e-12).map_err(|e| e.to_string())?.value;
        worst = worst.max((h - expect).abs());
        if (h - expect).abs() > 5e-7 {
            misses.push(format!("m = {m}: {h:.10} vs {expect} (off by {:.1e})", (h - expect).abs()));
        }
    }
    ensure(misses.is_empty(), || format!("{} of 7 outside 5e-7: {}", misses.len(), misses.join("; ")))?;
    let el = within_time(start, Duration::from_secs(1))?;
    Ok(format!("7 values, max deviation {worst:.2e}, {el:.2?}"))
}

fn generation_sets() -> Outcome {
    let start = Instant::now();
    for (n, expect) in [(3, 2), (4, 3), (5, 8)] {
        let got = generation_set(1, n).map_err(|e| e.to_string())?.len();
        ensure(got == expect, || format!("|G_{n}| = {got}, expected {expect}"))?;
    }
    let h1 = entropy_series(1, 1e-12).map_err(|e| e.to_string())?.value;
    let mut prev = f64::NEG_INFINITY;
    let mut last = 0.0;
    for n in 3..=10 {
        let e = empirical_entropy(1, n).map_err(|e| e.to_string())?;
        ensure(e >= prev, || format!("entropy estimate drops at n = {n}: {e} < {prev}"))?;
        ensure(e <= h1 + 0.01, || format!("n = {n}: {e} exceeds h_1 + 0.01"))?;
        prev = e;
        last = e;
    }
    let el = within_time(start, Duration::from_secs(60))?;
    Ok(format!("|G_3..5| = 2, 3, 8; estimate at n = 10 is {last:.6} <= {:.6}; {el:.2?}", h1 + 0.01))
}

fn complexity() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for m in 1..=3u32 {
        let lo = m as usize + 3;
        let hi = 2 * m as usize + 2;
        for len in lo..=hi {
            let f = complexity_formula(m, len).map_err(|e| e.to_string())?;
            let x = complexity_exact(m, len).map_err(|e| e.to_string())? as u64;
            ensure(f == x, || format!("m = {m}, l = {len}: formula {f}, exhaustive {x}"))?;
            checked += 1;
        }
    }
    let d12 = complexity_exact(1, 2).map_err(|e| e.to_string())?;
    let d14 = complexity_exact(1, 4).map_err(|e| e.to_string())?;
    ensure(d12 == 4 && d14 == 13, || format!("|D_1,2| = {d12}, |D_1,4| = {d14}"))?;
    let el = within_time(start, Duration::from_secs(30))?;
    Ok(format!("{checked} window lengths agree, |D_1,2| = 4, |D_1,4| = 13, {el:.2?}"))
}

fn random_strict(m: u32, rng: &mut RandomSource) -> ProbabilityVector {
    let raw: Vec<f64> = (0..=m).map(|_| 0.05 + rng.uniform()).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::strict(raw.iter().map(|x| x / total).collect()).unwrap()
}

fn spectra() -> Outcome {
    let mut rng = RandomSource::new(20_240_101);
    let mut worst_ev = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_pf = 0.0f64;
    let mut worst_zero = 0.0f64;
    for m in 1..=3u32 {
        let lm = lam(m);
        for _ in 0..5 {
            let p = random_strict(m, &mut rng);
            let mut expect = [lm, -1.0 / lm, -p.get(0), p.get(0) * p.get(m as usize)];
            expect.sort_by(|a, b| b.total_cmp(a));
            let m2 = induced_matrix(m, 2, &p).map_err(|e| e.to_string())?;
            let ev2 = matrix_spectrum(&m2).map_err(|e| e.to_string())?;
            ensure(ev2.len() == 4, || format!("m = {m}: M_2 has dimension {}", ev2.len()))?;
            for (z, e) in ev2.iter().zip(expect) {
                worst_ev = worst_ev.max((z - Complex64::new(e, 0.0)).norm());
            }
            ensure(worst_ev <= 1e-9, || format!("m = {m}, p = {:?}: M_2 spectrum {ev2:?} vs {expect:?}", p.as_slice()))?;

            let m3 = induced_matrix(m, 3, &p).map_err(|e| e.to_string())?;
            let ev3 = matrix_spectrum(&m3).map_err(|e| e.to_string())?;
            // The four largest eigenvalues of M_3 are those of M_2.
            let mut by_size = ev3.clone();
            by_size.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            let (big, small) = by_size.split_at(4);
            for e in expect {
                let d = big.iter().map(|z| (z - Complex64::new(e, 0.0)).norm()).fold(f64::INFINITY, f64::min);
                worst_ev = worst_ev.max(d);
            }
            ensure(worst_ev <= 1e-9, || format!("m = {m}: M_3 nonzero spectrum {big:?} vs {expect:?}"))?;
            // The rest is zero: equal power sums up to dim M_3 force
            // char M_3 = x^(d - 4) char M_2.
            let d = m3.dim();
            let s3 = spectral_power_sums(&m3.matrix, d);
            let s2 = spectral_power_sums(&m2.matrix, d);
            for (a, b) in s3.iter().zip(&s2) {
                let rel = (a - b).abs() / b.abs().max(1.0);
                worst_trace = worst_trace.max(rel);
            }
            ensure(worst_trace <= 1e-9, || format!("m = {m}: power sums {s3:?} vs {s2:?}"))?;
            worst_zero = small.iter().map(|z| z.norm()).fold(worst_zero, f64::max);

            for len in 1..=4 {
                let mm = induced_matrix(m, len, &p).map_err(|e| e.to_string())?;
                let pf = pf_frequencies(&mm, 1e-9).map_err(|e| e.to_string())?;
                worst_pf = worst_pf.max((pf.eigenvalue - lm).abs());
            }
            ensure(worst_pf <= 1e-9, || format!("m = {m}: PF eigenvalue off by {worst_pf:e}"))?;
        }
    }
    Ok(format!(
        "15 rules: nonzero eigenvalues within {worst_ev:.1e}, power sums within {worst_trace:.1e} \
         (zero block solved to {worst_zero:.1e}), PF eigenvalue within {worst_pf:.1e}"
    ))
}

fn extensions(w: &Word) -> (Vec<Word>, Vec<Word>) {
    let right = Letter::ALL
        .iter()
        .map(|&c| {
            let mut x = w.clone();
            x.push(c);
            x
        })
        .collect();
    let left = Letter::ALL
        .iter()
        .map(|&c| {
            let mut x = Word::from_letters(vec![c]);
            x.extend_from(w);
            x
        })
        .collect();
    (right, left)
}

fn frequencies() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=3u32 {
        let p = ProbabilityVector::uniform(m);
        for len in 1..=3 {
            let short = word_frequencies(m, len, &p).map_err(|e| e.to_string())?;
            let long = word_frequencies(m, len + 1, &p).map_err(|e| e.to_string())?;
            for (w, v) in short.iter() {
                let (r, l) = extensions(w);
                let rs: f64 = r.iter().map(|x| long.get(x)).sum();
                let ls: f64 = l.iter().map(|x| long.get(x)).sum();
                worst = worst.max((rs - v).abs()).max((ls - v).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("Kolmogorov defect {worst:e}"))?;
    let p = ProbabilityVector::uniform(1);
    let analytic = word_frequencies(1, 2, &p).map_err(|e| e.to_string())?;
    let empirical = empirical_frequencies(1, &p, 2, 1_000_000, 7).map_err(|e| e.to_string())?;
    let mut mc = 0.0f64;
    for (w, v) in analytic.iter() {
        let e = empirical.get(w).copied().unwrap_or(0.0);
        mc = mc.max((e - v).abs());
    }
    ensure(mc <= 5e-3, || format!("Monte Carlo deviation {mc:e}"))?;
    Ok(format!("Kolmogorov defect {worst:.1e}, Monte Carlo deviation {mc:.1e} at 10^6 letters"))
}

fn diffraction_oracles() -> Outcome {
    let ks: Vec<f64> = (0..25).map(|i| 3.0 * i as f64 / 24.0).collect();
    let mut worst_a = 0.0f64;
    let mut worst_b = 0.0f64;
    for p0 in [0.2, 0.5, 0.8] {
        for &k in &ks {
            let st = recursion(k, 6, p0, Conjugation::Corrected).map_err(|e| e.to_string())?;
            for n in 0..=6 {
                let mo = exhaustive_expectation(k, n, p0).map_err(|e| e.to_string())?;
                worst_a = worst_a.max((st.a[n] - mo.mean).norm());
                worst_b = worst_b.max((st.b[n] - mo.variance).abs());
            }
        }
    }
    ensure(worst_a <= 1e-12 && worst_b <= 1e-12, || format!("A off by {worst_a:e}, B off by {worst_b:e}"))?;
    let mut worst_rel = 0.0f64;
    for p0 in [0.2, 0.5, 0.8] {
        for &k in &ks {
            let st = recursion(k, 30, p0, Conjugation::Corrected).map_err(|e| e.to_string())?;
            for n in 2..=30 {
                let cf = closed_form_b(k, n, p0).map_err(|e| e.to_string())?;
                let rel = if st.b[n] == 0.0 {
                    cf.abs()
                } else {
                    (cf - st.b[n]).abs() / st.b[n].abs()
                };
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    ensure(worst_rel <= 1e-9, || format!("closed form off by {worst_rel:e} relative"))?;
    Ok(format!(
        "A within {worst_a:.1e}, B within {worst_b:.1e} of enumeration; closed form within {worst_rel:.1e} relative"
    ))
}

fn misprint() -> Outcome {
    let grid: Vec<f64> = (1..=100).map(|i| 0.03 * i as f64).collect();
    let diffs = ac_sup_differences(&grid, 0.5, 10, 25, Conjugation::Corrected).map_err(|e| e.to_string())?;
    for (i, w) in diffs.windows(2).enumerate() {
        ensure(w[1] < w[0], || format!("sup difference rises at n = {}: {:e} -> {:e}", 11 + i, w[0], w[1]))?;
    }
    let mut ratio = 0.0f64;
    for &k in &grid {
        let good = recursion(k, 25, 0.5, Conjugation::Corrected).map_err(|e| e.to_string())?;
        let bad = recursion(k, 25, 0.5, Conjugation::Misprint).map_err(|e| e.to_string())?;
        let (g, b) = (good.ac_density(25), bad.ac_density(25));
        if g > 0.0 {
            ratio = ratio.max(b.abs() / g);
        }
    }
    ensure(ratio > 10.0, || format!("misprinted variant reaches only {ratio:.2}x"))?;
    Ok(format!(
        "sup differences fall from {:.2e} to {:.2e}; misprinted variant reaches {ratio:.2e}x",
        diffs[0],
        diffs[diffs.len() - 1]
    ))
}

fn pure_point() -> Outcome {
    let n = 20;
    let origin = FourierModulePoint::new(1, 0, 0);
    let i0 = pp_intensity(&origin, 0.5).map_err(|e| e.to_string())?;
    let a0 = recursion_a(0.0, n, 0.5).map_err(|e| e.to_string())?[n].norm_sqr();
    let l = rnms::diffraction::level_lengths(n)[n];
    let e0 = (i0 - a0 / (l * l)).abs();
    ensure(e0 <= 1e-3, || format!("k = 0: {i0} vs {}", a0 / (l * l)))?;
    let points: Vec<FourierModulePoint> = fourier_module_points(1, 3.0, 1.0)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|p| p.value() > 0.0)
        .take(5)
        .collect();
    ensure(points.len() == 5, || "fewer than five module points".into())?;
    let mut worst = 0.0f64;
    for p in &points {
        let eta = pp_intensity(p, 0.5).map_err(|e| e.to_string())?;
        let a = recursion_a(p.value(), n, 0.5).map_err(|e| e.to_string())?[n].norm_sqr() / (l * l);
        worst = worst.max((eta - a).abs());
        ensure((eta - a).abs() <= 1e-2, || format!("({}, {}): {eta} vs {a}", p.u, p.v))?;
    }
    Ok(format!("k = 0: {i0:.5} within {e0:.1e}; 5 module points within {worst:.1e}"))
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let n = 6;
    let mut rows = figure_grid(1, 3.0, 2000, 8.0).map_err(|e| e.to_string())?;
    // Left endpoints of a realisation are right endpoints of its mirror
    // image; at p0 = 1/2 the mirrored rule is the same rule.
    fill_analytic(&mut rows, n, 0.5).map_err(|e| e.to_string())?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    let mc = mc_spectrum(1, &ProbabilityVector::uniform(1), n, &ks, 1000, 42).map_err(|e| e.to_string())?;
    let l = rnms::diffraction::level_lengths(n)[n];
    let mut ok = 0;
    for (r, s) in rows.iter().zip(&mc.rows) {
        let analytic = l * r.pp.unwrap() + r.ac.unwrap();
        if (s.mc_mean.unwrap() - analytic).abs() <= 5.0 * s.mc_stderr.unwrap() {
            ok += 1;
        }
    }
    let frac = ok as f64 / rows.len() as f64;
    ensure(frac >= 0.95, || format!("only {:.2}% of grid points within 5 stderr", 100.0 * frac))?;
    let el = within_time(start, Duration::from_secs(300))?;
    Ok(format!("{ok}/{} grid points within 5 stderr ({:.2}%), {el:.2?}", rows.len(), 100.0 * frac))
}

fn geometry() -> Outcome {
    let mut rng = RandomSource::new(10_000);
    let (word, _) = grow_random(1, &ProbabilityVector::uniform(1), 10_000, &mut rng).map_err(|e| e.to_string())?;
    let word = word.subword(0, 9_999).ok_or("realisation too short")?;
    let ps = realize(&word, 1, QuadraticInteger::ZERO).map_err(|e| e.to_string())?;
    let violations = window_check(&ps);
    ensure(violations.is_empty(), || format!("{} window violations", violations.len()))?;
    let density = empirical_density(&ps).map_err(|e| e.to_string())?;
    let expect = lam(1) / 5f64.sqrt();
    ensure((density - expect).abs() <= 1e-3, || format!("density {density} vs {expect}"))?;
    Ok(format!("{} points inside the window, density {density:.6} (target {expect:.6})", ps.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("entropy series table", entropy_table),
        ("generation sets and entropy estimates", generation_sets),
        ("complexity formula", complexity),
        ("induced matrix spectra", spectra),
        ("word frequencies", frequencies),
        ("diffraction recursion oracles", diffraction_oracles),
        ("conjugation misprint", misprint),
        ("pure point intensity, two routes", pure_point),
        ("Monte Carlo against recursion", monte_carlo),
        ("window and density", geometry),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

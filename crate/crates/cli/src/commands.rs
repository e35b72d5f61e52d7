use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rnms::diffraction::{figure_grid, fill_analytic, mc_spectrum, recursion, Conjugation, SpectrumTable};
use rnms::entropy::{
    complexity_exact, complexity_formula, empirical_entropy, entropy_series,
};
use rnms::geometry::{realize, QuadraticInteger};
use rnms::induced::{empirical_frequencies, word_frequencies};
use rnms::substitution::{grow_random, iterate_random};
use rnms::{Error, Letter, NobleMeans, ProbabilityVector, RandomSource, Result, Word};

use crate::args::{
    ComplexityArgs, ComplexityMethod, DiffractArgs, EntropyArgs, EntropyMethod, FrequenciesArgs,
    GenerateArgs, GenerateFormat, SpectrumFormat,
};

fn probabilities(m: u32, text: Option<&str>) -> Result<ProbabilityVector> {
    let p = match text {
        Some(t) => ProbabilityVector::parse_lenient(t)?,
        None => ProbabilityVector::uniform(m),
    };
    p.check_family(&NobleMeans::new(m)?)?;
    Ok(p)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn generate(a: &GenerateArgs) -> Result<u8> {
    let p = probabilities(a.m, a.probs.as_deref())?;
    let mut rng = RandomSource::new(a.seed);
    let word = if a.letters > 0 {
        grow_random(a.m, &p, a.letters, &mut rng)?.0
    } else {
        iterate_random(a.m, &p, &Word::from_letters(vec![Letter::A]), a.n, &mut rng)?
    };
    let body = match a.format {
        GenerateFormat::Word => format!("{word}\n"),
        GenerateFormat::Points => {
            let ps = realize(&word, a.m, QuadraticInteger::ZERO)?;
            let mut buf = Vec::new();
            ps.write_csv(&mut buf).map_err(|source| Error::Io {
                path: "<buffer>".into(),
                source,
            })?;
            String::from_utf8(buf).expect("ASCII output")
        }
    };
    emit(a.out.as_deref(), &body)?;
    Ok(0)
}

pub fn entropy(a: &EntropyArgs) -> Result<u8> {
    let mut body = String::from("m,n_or_ell,value,method\n");
    if matches!(a.method, EntropyMethod::Series | EntropyMethod::All) {
        let r = entropy_series(a.m, a.tol)?;
        let _ = writeln!(body, "{},,{},series", a.m, num(r.value));
    }
    if matches!(a.method, EntropyMethod::Count | EntropyMethod::All) {
        for n in 3..=a.n_max {
            let e = empirical_entropy(a.m, n)?;
            let _ = writeln!(body, "{},{n},{},generation_count", a.m, num(e));
        }
    }
    emit(a.out.as_deref(), &body)?;
    Ok(0)
}

pub fn complexity(a: &ComplexityArgs) -> Result<u8> {
    if a.ell_min == 0 || a.ell_min > a.ell_max {
        return Err(Error::Parameter("need 1 <= ell-min <= ell-max".into()));
    }
    let window = (a.m as usize + 3)..=(2 * a.m as usize + 2);
    let mut body = String::from("m,n_or_ell,value,method\n");
    for ell in a.ell_min..=a.ell_max {
        if matches!(a.method, ComplexityMethod::Exact | ComplexityMethod::Both) {
            let _ = writeln!(body, "{},{ell},{},exact", a.m, complexity_exact(a.m, ell)?);
        }
        let formula = match a.method {
            ComplexityMethod::Formula => true,
            ComplexityMethod::Both => window.contains(&ell),
            ComplexityMethod::Exact => false,
        };
        if formula {
            let _ = writeln!(body, "{},{ell},{},formula", a.m, complexity_formula(a.m, ell)?);
        }
    }
    emit(a.out.as_deref(), &body)?;
    Ok(0)
}

pub fn frequencies(a: &FrequenciesArgs) -> Result<u8> {
    let p = probabilities(a.m, a.probs.as_deref())?;
    let analytic = word_frequencies(a.m, a.ell, &p)?;
    let empirical = if a.empirical > 0 {
        Some(empirical_frequencies(a.m, &p, a.ell, a.empirical, a.seed)?)
    } else {
        None
    };
    let mut body = String::from("word,analytic_frequency,empirical_frequency,abs_error\n");
    for (w, v) in analytic.iter() {
        match &empirical {
            Some(e) => {
                let x = e.get(w).copied().unwrap_or(0.0);
                let _ = writeln!(body, "{w},{},{},{}", num(v), num(x), num((x - v).abs()));
            }
            None => {
                let _ = writeln!(body, "{w},{},,", num(v));
            }
        }
    }
    if let Some(e) = &empirical {
        // A sampled word the analytic side calls illegal is a bug; surface it.
        for (w, x) in e {
            if analytic.get(w) == 0.0 {
                return Err(Error::Numeric(format!("sampled word {w} (frequency {x}) is not legal")));
            }
        }
    }
    emit(a.out.as_deref(), &body)?;
    Ok(0)
}

pub fn diffract(a: &DiffractArgs) -> Result<u8> {
    let p = probabilities(a.m, a.probs.as_deref())?;
    if a.n == 0 {
        return Err(Error::Parameter("--n must be at least 1".into()));
    }
    if a.misprint_mode && a.m != 1 {
        return Err(Error::Parameter("--misprint-mode applies to m = 1 only".into()));
    }
    let mut rows = figure_grid(a.m, a.kmax, a.grid, a.star_cutoff)?;
    if a.m == 1 {
        let n = a.analytic_n.unwrap_or(a.n).max(2);
        // Sampled points are left endpoints; the recursion speaks about
        // right endpoints, which is the same as swapping p_0 and p_1.
        let p0_rec = p.get(1);
        fill_analytic(&mut rows, n, p0_rec)?;
        if a.misprint_mode {
            for row in &mut rows {
                row.ac = Some(recursion(row.k, n, p0_rec, Conjugation::Misprint)?.ac_density(n));
            }
        }
    }
    if a.samples > 0 {
        let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
        let mc = mc_spectrum(a.m, &p, a.n, &ks, a.samples, a.seed)?;
        for (row, s) in rows.iter_mut().zip(mc.rows) {
            row.mc_mean = s.mc_mean;
            row.mc_stderr = s.mc_stderr;
        }
    }
    let table = SpectrumTable { rows };
    let body = match a.format {
        SpectrumFormat::Csv => table.to_csv(),
        SpectrumFormat::Text => table.to_text(),
    };
    emit(a.out.as_deref(), &body)?;
    Ok(0)
}

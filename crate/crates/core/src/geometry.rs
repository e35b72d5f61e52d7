//! Exact geometry in `Z[lambda_m]`.
//!
//! Letters become intervals, `a` of length `lambda_m` and `b` of length 1,
//! and a word becomes the set of left endpoints. Coordinates are kept as
//! integer pairs `(u, v)` meaning `u + v lambda_m`, so the star map
//! `u + v lambda_m -> u + v lambda'_m` never sees accumulated rounding.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::family::NobleMeans;
use crate::word::{Letter, Word};

/// `u + v lambda_m` with integer `u`, `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QuadraticInteger {
    pub u: i64,
    pub v: i64,
}

impl QuadraticInteger {
    pub const ZERO: QuadraticInteger = QuadraticInteger { u: 0, v: 0 };
    pub const ONE: QuadraticInteger = QuadraticInteger { u: 1, v: 0 };
    pub const LAMBDA: QuadraticInteger = QuadraticInteger { u: 0, v: 1 };

    pub const fn new(u: i64, v: i64) -> Self {
        QuadraticInteger { u, v }
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        Ok(QuadraticInteger {
            u: self.u.checked_add(o.u).ok_or(Error::Overflow)?,
            v: self.v.checked_add(o.v).ok_or(Error::Overflow)?,
        })
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        Ok(QuadraticInteger {
            u: self.u.checked_sub(o.u).ok_or(Error::Overflow)?,
            v: self.v.checked_sub(o.v).ok_or(Error::Overflow)?,
        })
    }

    pub fn checked_neg(self) -> Result<Self> {
        Ok(QuadraticInteger {
            u: self.u.checked_neg().ok_or(Error::Overflow)?,
            v: self.v.checked_neg().ok_or(Error::Overflow)?,
        })
    }

    /// Product in `Z[lambda_m]`, using `lambda_m^2 = m lambda_m + 1`.
    pub fn checked_mul(self, o: Self, m: u32) -> Result<Self> {
        let m = i128::from(m);
        let (a, b, c, d) = (
            i128::from(self.u),
            i128::from(self.v),
            i128::from(o.u),
            i128::from(o.v),
        );
        let u = a * c + b * d;
        let v = a * d + b * c + m * b * d;
        Ok(QuadraticInteger {
            u: i64::try_from(u).map_err(|_| Error::Overflow)?,
            v: i64::try_from(v).map_err(|_| Error::Overflow)?,
        })
    }

    /// Real embedding `u + v lambda_m`.
    pub fn value(self, fam: &NobleMeans) -> f64 {
        self.u as f64 + self.v as f64 * fam.lambda()
    }

    /// Star map `u + v lambda'_m`.
    pub fn star(self, fam: &NobleMeans) -> f64 {
        self.u as f64 + self.v as f64 * fam.lambda_conj()
    }

    /// Exact sign of the real embedding.
    pub fn sign(self, m: u32) -> Ordering {
        sign_of(self.u, self.v, m, 1)
    }

    /// Exact sign of the star image.
    pub fn star_sign(self, m: u32) -> Ordering {
        sign_of(self.u, self.v, m, -1)
    }

    /// Exact comparison of real embeddings.
    pub fn cmp_value(self, o: Self, m: u32) -> Ordering {
        sign_of(
            i128::from(self.u) - i128::from(o.u),
            i128::from(self.v) - i128::from(o.v),
            m,
            1,
        )
    }
}

/// Sign of `a + b (m + root_sign * s) / 2` with `s = sqrt(m^2 + 4)`.
fn sign_of(a: impl Into<i128>, b: impl Into<i128>, m: u32, root_sign: i128) -> Ordering {
    let (a, b) = (a.into(), b.into());
    let m = i128::from(m);
    // 2 * value = (2a + bm) + root_sign * b * s
    let x = 2 * a + b * m;
    let y = root_sign * b;
    let disc = m * m + 4;
    match (x.cmp(&0), y.cmp(&0)) {
        (xs, Ordering::Equal) => xs,
        (Ordering::Equal, ys) => ys,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        // Opposite signs: the larger magnitude wins. s is irrational, so
        // x^2 == y^2 disc cannot happen with y != 0.
        (xs, _) => {
            let x_wins = match (x.checked_mul(x), y.checked_mul(y).and_then(|t| t.checked_mul(disc))) {
                (Some(lhs), Some(rhs)) => lhs > rhs,
                // Far beyond desk-scale coordinates; float comparison of
                // magnitudes this large is well separated.
                _ => (x as f64).abs() > (y as f64).abs() * (disc as f64).sqrt(),
            };
            if x_wins {
                xs
            } else {
                xs.reverse()
            }
        }
    }
}

impl Add for QuadraticInteger {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("overflow in QuadraticInteger addition")
    }
}

impl Sub for QuadraticInteger {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("overflow in QuadraticInteger subtraction")
    }
}

impl Neg for QuadraticInteger {
    type Output = Self;
    fn neg(self) -> Self {
        self.checked_neg().expect("overflow in QuadraticInteger negation")
    }
}

impl fmt::Display for QuadraticInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Interval length of a letter.
pub fn letter_length(l: Letter) -> QuadraticInteger {
    match l {
        Letter::A => QuadraticInteger::LAMBDA,
        Letter::B => QuadraticInteger::ONE,
    }
}

/// Left endpoints of a realised word and its total length.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub m: u32,
    pub points: Vec<QuadraticInteger>,
    pub length: QuadraticInteger,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn family(&self) -> NobleMeans {
        NobleMeans::new(self.m).expect("point set built with a valid m")
    }

    /// Real distance between the first and last point.
    pub fn span(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(&f), Some(&l)) => (l - f).value(&self.family()),
            _ => 0.0,
        }
    }

    /// Writes `u,v,real_value,star_value` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let fam = self.family();
        writeln!(out, "u,v,real_value,star_value")?;
        for p in &self.points {
            writeln!(out, "{},{},{:.16e},{:.16e}", p.u, p.v, p.value(&fam), p.star(&fam))?;
        }
        Ok(())
    }
}

/// Realises `w` as left endpoints starting at `anchor`.
pub fn realize(w: &Word, m: u32, anchor: QuadraticInteger) -> Result<PointSet> {
    NobleMeans::new(m)?;
    let mut points = Vec::with_capacity(w.len());
    let mut x = anchor;
    for &l in w.letters() {
        points.push(x);
        x = x.checked_add(letter_length(l))?;
    }
    Ok(PointSet {
        m,
        points,
        length: x.checked_sub(anchor)?,
    })
}

/// Star image of `x`.
pub fn star_map(x: QuadraticInteger, m: u32) -> Result<f64> {
    Ok(x.star(&NobleMeans::new(m)?))
}

/// The internal-space window `[lambda'_m - 1, 1 - lambda'_m]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lower: f64,
    pub upper: f64,
}

impl Window {
    pub fn for_family(fam: &NobleMeans) -> Self {
        Window {
            lower: fam.lambda_conj() - 1.0,
            upper: 1.0 - fam.lambda_conj(),
        }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Exact closed-interval membership of the star image of `x`.
    pub fn contains_exact(x: QuadraticInteger, m: u32) -> bool {
        // upper - x' = (1 - u) + (-1 - v) lambda'
        let to_upper = sign_of(1 - i128::from(x.u), -1 - i128::from(x.v), m, -1);
        // x' - lower = (u + 1) + (v - 1) lambda'
        let from_lower = sign_of(i128::from(x.u) + 1, i128::from(x.v) - 1, m, -1);
        to_upper != Ordering::Less && from_lower != Ordering::Less
    }
}

/// Boundary tolerance of the window check.
pub const WINDOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowViolation {
    pub index: usize,
    pub point: QuadraticInteger,
    pub star: f64,
    /// Distance of the star image outside the window.
    pub excess: f64,
}

/// Points whose star image lies outside the window by more than `1e-9`.
pub fn window_check(points: &PointSet) -> Vec<WindowViolation> {
    let fam = points.family();
    let win = Window::for_family(&fam);
    points
        .points
        .iter()
        .enumerate()
        .filter(|(_, &p)| !Window::contains_exact(p, points.m))
        .filter_map(|(index, &p)| {
            let star = p.star(&fam);
            let excess = (win.lower - star).max(star - win.upper);
            (excess > WINDOW_TOL).then_some(WindowViolation {
                index,
                point: p,
                star,
                excess,
            })
        })
        .collect()
}

/// `(count - 1) / span`.
pub fn empirical_density(points: &PointSet) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::param("density needs at least two points"));
    }
    Ok((points.len() - 1) as f64 / points.span())
}

/// Autocorrelation coefficients at exact differences `z` with
/// `0 <= z <= max_distance`, sorted by `z`.
///
/// Pairs are counted with the first point ranging over the half-open span
/// `[x_first, x_last)` and divided by the span, so the coefficient at
/// `z = 0` equals [`empirical_density`].
pub fn autocorrelation_coefficients(
    points: &PointSet,
    max_distance: f64,
) -> Result<Vec<(QuadraticInteger, f64)>> {
    autocorrelation_impl(points, max_distance, false)
}

/// As [`autocorrelation_coefficients`] but over `-max_distance <= z <= max_distance`.
pub fn symmetric_autocorrelation(
    points: &PointSet,
    max_distance: f64,
) -> Result<Vec<(QuadraticInteger, f64)>> {
    autocorrelation_impl(points, max_distance, true)
}

fn autocorrelation_impl(
    points: &PointSet,
    max_distance: f64,
    symmetric: bool,
) -> Result<Vec<(QuadraticInteger, f64)>> {
    if max_distance.is_nan() || max_distance <= 0.0 {
        return Err(Error::param("max_distance must be positive"));
    }
    if points.len() < 2 {
        return Err(Error::param("autocorrelation needs at least two points"));
    }
    let fam = points.family();
    let span = points.span();
    let reals: Vec<f64> = points.points.iter().map(|p| p.value(&fam)).collect();
    let mut counts: HashMap<QuadraticInteger, u64> = HashMap::new();
    counts.insert(QuadraticInteger::ZERO, (points.len() - 1) as u64);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if reals[j] - reals[i] > max_distance + 1e-9 {
                break;
            }
            let z = points.points[j].checked_sub(points.points[i])?;
            if z.value(&fam) > max_distance {
                continue;
            }
            *counts.entry(z).or_default() += 1;
            if symmetric {
                *counts.entry(z.checked_neg()?).or_default() += 1;
            }
        }
    }
    let mut out: Vec<(QuadraticInteger, f64)> = counts
        .into_iter()
        .map(|(z, c)| (z, c as f64 / span))
        .collect();
    out.sort_by(|a, b| a.0.cmp_value(b.0, points.m));
    Ok(out)
}

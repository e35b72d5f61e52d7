//! The noble means parameter `m` and the probability vector of the random rule.

use crate::error::{Error, Result};

/// Parameters of the noble means family for a fixed `m >= 1`.
///
/// `lambda` is the Pisot inflation multiplier `(m + sqrt(m^2 + 4)) / 2` and
/// `lambda_conj` its algebraic conjugate `(m - sqrt(m^2 + 4)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NobleMeans {
    m: u32,
    lambda: f64,
    lambda_conj: f64,
}

impl NobleMeans {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m must be a positive integer"));
        }
        let mf = f64::from(m);
        let root = (mf * mf + 4.0).sqrt();
        Ok(NobleMeans {
            m,
            lambda: 0.5 * (mf + root),
            // -1/lambda avoids the cancellation in (m - root) / 2 for large m.
            lambda_conj: -2.0 / (mf + root),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_conj(&self) -> f64 {
        self.lambda_conj
    }

    /// `sqrt(m^2 + 4) = lambda - lambda'`.
    pub fn discriminant_root(&self) -> f64 {
        let mf = f64::from(self.m);
        (mf * mf + 4.0).sqrt()
    }

    /// Length of `zeta_m(a)`, identical for every member of the family.
    pub fn image_len_a(&self) -> usize {
        self.m as usize + 1
    }
}

/// Weights `(p_0, ..., p_m)` of the `m + 1` local realisations of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

const SUM_TOL: f64 = 1e-12;

impl ProbabilityVector {
    /// Validates `p_i >= 0` and `sum p_i = 1` within `1e-12`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(p, SUM_TOL)
    }

    /// Like [`ProbabilityVector::new`] but additionally requires every `p_i > 0`.
    pub fn strict(p: Vec<f64>) -> Result<Self> {
        let pv = Self::new(p)?;
        pv.require_strict()?;
        Ok(pv)
    }

    fn with_tolerance(p: Vec<f64>, tol: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::param("probability vector is empty"));
        }
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::param(format!("probability {bad} is negative or not finite")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::param(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(ProbabilityVector { p })
    }

    /// Parses comma-separated decimals, accepts a sum within `1e-9` of one
    /// and renormalises.
    pub fn parse_lenient(s: &str) -> Result<Self> {
        let p = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("probability {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let pv = Self::with_tolerance(p, 1e-9)?;
        let sum: f64 = pv.p.iter().sum();
        Ok(ProbabilityVector {
            p: pv.p.into_iter().map(|x| x / sum).collect(),
        })
    }

    pub fn uniform(m: u32) -> Self {
        let n = m as usize + 1;
        ProbabilityVector {
            p: vec![1.0 / n as f64; n],
        }
    }

    /// The degenerate vector selecting `zeta_{m,i}` with certainty.
    pub fn indicator(m: u32, i: usize) -> Result<Self> {
        if i > m as usize {
            return Err(Error::param(format!("rule index {i} outside 0..={m}")));
        }
        let mut p = vec![0.0; m as usize + 1];
        p[i] = 1.0;
        Ok(ProbabilityVector { p })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// The `m` this vector belongs to.
    pub fn m(&self) -> u32 {
        (self.p.len() - 1) as u32
    }

    pub fn is_strict(&self) -> bool {
        self.p.iter().all(|&x| x > 0.0)
    }

    pub fn require_strict(&self) -> Result<()> {
        if self.is_strict() {
            Ok(())
        } else {
            Err(Error::param("all probabilities must be strictly positive"))
        }
    }

    pub fn check_family(&self, family: &NobleMeans) -> Result<()> {
        if self.p.len() != family.m() as usize + 1 {
            return Err(Error::param(format!(
                "m = {} needs {} probabilities, got {}",
                family.m(),
                family.m() + 1,
                self.p.len()
            )));
        }
        Ok(())
    }

    /// `p_i == p_{m-i}` for all `i`.
    pub fn is_palindromic(&self) -> bool {
        self.p.iter().zip(self.p.iter().rev()).all(|(x, y)| x == y)
    }

    /// The vector for the mirrored rule set, `p'_i = p_{m-i}`.
    pub fn mirrored(&self) -> Self {
        ProbabilityVector {
            p: self.p.iter().rev().copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_identities() {
        for m in 1..=50 {
            let f = NobleMeans::new(m).unwrap();
            assert!((f.lambda() + f.lambda_conj() - f64::from(m)).abs() < 1e-12);
            assert!((f.lambda() * f.lambda_conj() + 1.0).abs() < 1e-12);
            assert!(f.lambda() > 1.0 && f.lambda_conj() < 0.0 && f.lambda_conj() > -1.0);
        }
        assert!(NobleMeans::new(0).is_err());
    }

    #[test]
    fn probability_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![1.0, 0.0]).is_ok());
        assert!(ProbabilityVector::strict(vec![1.0, 0.0]).is_err());
        assert!(ProbabilityVector::new(vec![0.6, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
    }

    #[test]
    fn lenient_parse_renormalises() {
        let p = ProbabilityVector::parse_lenient("0.3333333333,0.3333333333,0.3333333334").unwrap();
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbabilityVector::parse_lenient("0.3,0.3").is_err());
        assert!(ProbabilityVector::parse_lenient("x,1").is_err());
    }
}

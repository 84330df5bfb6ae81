//! The lower-triangular middle factor
//!
//! ```text
//! Xi(z) = z^-k * [ p_ji(z) / q_j(z) ]_{i <= j},   p_jj(z) = z^{k_j}
//! ```
//!
//! with `deg p_ji < k_j` below the diagonal and `q_j | q_{j+1}`.
//! Everything the kernel machinery needs is a function of `k`, the
//! diagonal exponents `k_j`, `deg q_j` and the off-diagonal numerators;
//! the coefficients of `q_j` only matter for validity.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::algebra::{Degree, Polynomial, Scalar};
use crate::error::{Error, Result};

/// Maximum allowed distance of a denominator root's modulus from one
/// before the advisory check flags it.
pub const ROOT_MODULUS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowSpec<T> {
    /// Denominator `q_j`.
    pub q: Polynomial<T>,
    /// Diagonal exponent `k_j`; the diagonal numerator is `z^{k_j}`.
    pub kdiag: i64,
    /// Numerators `p_j1 .. p_j(j-1)`, left to right.
    pub lower: Vec<Polynomial<T>>,
}

impl<T: Scalar> RowSpec<T> {
    pub fn new(q: Polynomial<T>, kdiag: i64, lower: Vec<Polynomial<T>>) -> Self {
        RowSpec { q, kdiag, lower }
    }

    pub fn diagonal(q: Polynomial<T>, kdiag: i64) -> Self {
        RowSpec { q, kdiag, lower: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MiddleFactor<T> {
    /// Global exponent of the `z^-k` prefactor.
    pub k: i64,
    pub rows: Vec<RowSpec<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    KNonnegative,
    KdiagNonnegative,
    DenominatorNonzero,
    DenominatorNonzeroAtOrigin,
    LowerDegreeBound,
    DivisibilityChain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleCheck {
    pub rule: Rule,
    /// 1-based row (or first row of a pair for the divisibility chain).
    pub row: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

/// Numeric, warning-only check that the roots of `q_j` lie on the circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootAdvisory {
    pub row: usize,
    pub distinct_roots: usize,
    /// Largest `| |root| - 1 |` over the distinct roots.
    pub max_deviation: f64,
    pub on_circle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<RuleCheck>,
    pub advisories: Vec<RootAdvisory>,
}

impl ValidationReport {
    /// True when every hard rule passes; advisories never affect this.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RuleCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl<T: Scalar> MiddleFactor<T> {
    pub fn new(k: i64, rows: Vec<RowSpec<T>>) -> Self {
        MiddleFactor { k, rows }
    }

    /// `m x m` diagonal factor from `(q_j, k_j)` pairs.
    pub fn diagonal(k: i64, diag: Vec<(Polynomial<T>, i64)>) -> Self {
        let rows = diag
            .into_iter()
            .enumerate()
            .map(|(j, (q, kd))| RowSpec::new(q, kd, vec![Polynomial::zero(); j]))
            .collect();
        MiddleFactor { k, rows }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Degree of `q_j` (0-based `j`). A zero denominator, which validation
    /// rejects, is read as degree 0.
    pub fn deg_q(&self, j: usize) -> i64 {
        self.rows[j].q.degree().unwrap_or(0)
    }

    pub fn kdiag(&self, j: usize) -> i64 {
        self.rows[j].kdiag
    }

    /// Numerator `p_ji` (0-based), with `p_jj = z^{k_j}` and zero above the
    /// diagonal.
    pub fn numerator(&self, j: usize, i: usize) -> Polynomial<T> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.rows[j].lower[i].clone(),
            std::cmp::Ordering::Equal => Polynomial::z_pow(self.rows[j].kdiag.max(0) as usize),
            std::cmp::Ordering::Greater => Polynomial::zero(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().all(|r| r.lower.iter().all(Polynomial::is_zero))
    }

    fn check_structure(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Malformed("a middle factor needs at least one row".into()));
        }
        for (j, row) in self.rows.iter().enumerate() {
            if row.lower.len() != j {
                return Err(Error::Malformed(format!(
                    "row {} has {} lower entries, expected {}",
                    j + 1,
                    row.lower.len(),
                    j
                )));
            }
        }
        Ok(())
    }

    fn hard_checks(&self) -> Vec<RuleCheck> {
        let mut checks = Vec::new();
        checks.push(RuleCheck {
            rule: Rule::KNonnegative,
            row: None,
            passed: self.k >= 0,
            detail: format!("k = {}", self.k),
        });
        for (j, row) in self.rows.iter().enumerate() {
            let n = j + 1;
            checks.push(RuleCheck {
                rule: Rule::KdiagNonnegative,
                row: Some(n),
                passed: row.kdiag >= 0,
                detail: format!("k_{n} = {}", row.kdiag),
            });
            checks.push(RuleCheck {
                rule: Rule::DenominatorNonzero,
                row: Some(n),
                passed: !row.q.is_zero(),
                detail: format!("deg q_{n} = {}", row.q.degree()),
            });
            checks.push(RuleCheck {
                rule: Rule::DenominatorNonzeroAtOrigin,
                row: Some(n),
                passed: !row.q.constant_term().is_zero(),
                detail: format!("q_{n}(0) = {}", row.q.constant_term()),
            });
            for (i, p) in row.lower.iter().enumerate() {
                let passed = p.degree() < row.kdiag;
                checks.push(RuleCheck {
                    rule: Rule::LowerDegreeBound,
                    row: Some(n),
                    passed,
                    detail: format!("deg p_{n}{} = {} vs k_{n} = {}", i + 1, p.degree(), row.kdiag),
                });
            }
        }
        for j in 1..self.rows.len() {
            let passed = self.rows[j - 1].q.divides(&self.rows[j].q);
            checks.push(RuleCheck {
                rule: Rule::DivisibilityChain,
                row: Some(j),
                passed,
                detail: if passed {
                    format!("q_{j} divides q_{}", j + 1)
                } else {
                    format!("q_{j} does not divide q_{}", j + 1)
                },
            });
        }
        checks
    }

    /// Full validation: hard rules plus the root-modulus advisory.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        let checks = self.hard_checks();
        let advisories = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.q.is_zero())
            .map(|(j, r)| root_advisory(j + 1, &r.q))
            .collect();
        Ok(ValidationReport { checks, advisories })
    }

    /// Structural and hard-rule validation, as an error on the first failure.
    pub fn ensure_valid(&self) -> Result<()> {
        self.check_structure()?;
        match self.hard_checks().into_iter().find(|c| !c.passed) {
            None => Ok(()),
            Some(c) => Err(Error::Invalid(format!("{:?}: {}", c.rule, c.detail))),
        }
    }

    /// `(deg q_j, k_j)` per row.
    pub fn degrees(&self) -> Vec<(i64, i64)> {
        (0..self.m()).map(|j| (self.deg_q(j), self.kdiag(j))).collect()
    }

    /// Column-wise degree dominance of the diagonal:
    /// `k_n - deg q_n >= deg p_jn - deg q_j` for all `j > n`.
    pub fn is_special_form(&self) -> bool {
        self.special_form_violation().is_none()
    }

    /// First `(j, n)` pair (0-based) breaking the special-form inequality.
    pub fn special_form_violation(&self) -> Option<(usize, usize)> {
        for n in 0..self.m() {
            let diag_gap = self.kdiag(n) - self.deg_q(n);
            for j in n + 1..self.m() {
                let entry_gap = self.rows[j].lower[n].degree() - self.deg_q(j);
                if entry_gap > diag_gap {
                    return Some((j, n));
                }
            }
        }
        None
    }

    /// `m k + sum deg q_j - sum k_j`.
    pub fn fredholm_index(&self) -> i64 {
        let m = self.m() as i64;
        m * self.k + self.degrees().iter().map(|(d, kd)| d - kd).sum::<i64>()
    }

    /// `kappa_j = k_j - deg q_j - k`.
    pub fn factorization_indices(&self) -> Vec<i64> {
        self.degrees().iter().map(|(d, kd)| kd - d - self.k).collect()
    }

    /// Kernel degree bounds `l_j`: every kernel vector has `deg f_j < l_j`.
    ///
    /// `l_j = max(deg q_1 - k_1 - 1, .., deg q_{j-1} - k_{j-1} - 1, deg q_j - k_j, -k) + k`
    pub fn degree_bounds(&self) -> Vec<usize> {
        let mut prefix = -self.k;
        let mut out = Vec::with_capacity(self.m());
        for (d, kd) in self.degrees() {
            out.push((prefix.max(d - kd) + self.k) as usize);
            prefix = prefix.max(d - kd - 1);
        }
        out
    }

    pub fn as_two_by_two(&self) -> Result<TwoByTwoFactor<T>> {
        if self.m() != 2 {
            return Err(Error::NotTwoByTwo(self.m()));
        }
        self.check_structure()?;
        let (k21, d21) = self.rows[1].lower[0].split_z_power();
        Ok(TwoByTwoFactor {
            k: self.k,
            q1: self.rows[0].q.clone(),
            q2: self.rows[1].q.clone(),
            k1: self.rows[0].kdiag,
            k2: self.rows[1].kdiag,
            k21: k21 as i64,
            d21,
        })
    }
}

/// A 2x2 middle factor with `p_21 = z^{k21} d21`, `d21(0) != 0`
/// (or `d21 = 0` when `p_21` vanishes).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoByTwoFactor<T> {
    pub k: i64,
    pub q1: Polynomial<T>,
    pub q2: Polynomial<T>,
    pub k1: i64,
    pub k2: i64,
    pub k21: i64,
    pub d21: Polynomial<T>,
}

impl<T: Scalar> TwoByTwoFactor<T> {
    pub fn deg_q1(&self) -> i64 {
        self.q1.degree().unwrap_or(0)
    }

    pub fn deg_q2(&self) -> i64 {
        self.q2.degree().unwrap_or(0)
    }

    /// `deg d21`, or `NegInf` when `p_21 = 0`.
    pub fn deg_d21(&self) -> Degree {
        self.d21.degree()
    }

    pub fn p21(&self) -> Polynomial<T> {
        self.d21.shift(self.k21.max(0) as usize)
    }

    pub fn to_middle_factor(&self) -> MiddleFactor<T> {
        MiddleFactor::new(
            self.k,
            vec![
                RowSpec::diagonal(self.q1.clone(), self.k1),
                RowSpec::new(self.q2.clone(), self.k2, vec![self.p21()]),
            ],
        )
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if !self.d21.is_zero() && self.d21.constant_term().is_zero() {
            return Err(Error::Invalid("d21(0) must be nonzero".into()));
        }
        if self.k21 < 0 {
            return Err(Error::Invalid("k21 must be nonnegative".into()));
        }
        self.to_middle_factor().ensure_valid()
    }
}

fn root_advisory<T: Scalar>(row: usize, q: &Polynomial<T>) -> RootAdvisory {
    let sf = q.square_free_part();
    let coeffs: Vec<f64> = sf.coeffs().iter().map(Scalar::approx_f64).collect();
    let roots = numeric_roots(&coeffs);
    let max_deviation = roots.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    RootAdvisory {
        row,
        distinct_roots: roots.len(),
        max_deviation,
        on_circle: max_deviation <= ROOT_MODULUS_TOLERANCE,
    }
}

/// Roots of a polynomial with simple roots: companion-matrix eigenvalues,
/// then a few Newton steps on the original coefficients.
fn numeric_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eval = |z: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..8 {
                let (p, dp) = eval(z);
                if dp.norm() == 0.0 {
                    break;
                }
                z -= p / dp;
            }
            z
        })
        .collect()
}

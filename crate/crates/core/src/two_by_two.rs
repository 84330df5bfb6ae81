//! The 2x2 case: closed-form kernel dimensions, the `M`/`N` compressions,
//! and the transform that brings a monomial factor into diagonal form.
//!
//! Throughout, `p21 = z^k21 d21` with `d21(0) != 0`, `D = deg d21`,
//!
//! ```text
//! j1 = max(deg q2 + k - k21, 0)
//! j2 = k1 + k2 - deg q1 - k - k21
//! ```

use std::fmt;

use serde::Serialize;

use crate::algebra::{Matrix, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::kernel::{kernel_basis, CompressedBlock, KernelBasis};
use crate::middle_factor::{MiddleFactor, TwoByTwoFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CaseLabel {
    /// `k1 >= deg q1 + k` or `k2 <= deg q2 + k`: the kernel splits.
    #[serde(rename = "DIAG_A")]
    DiagA,
    #[serde(rename = "I_A")]
    IA,
    #[serde(rename = "I_B")]
    IB,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III_A")]
    IIIA,
    #[serde(rename = "III_B")]
    IIIB,
    #[serde(rename = "III_C")]
    IIIC,
    #[serde(rename = "IV")]
    IV,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 8] = [
        CaseLabel::DiagA,
        CaseLabel::IA,
        CaseLabel::IB,
        CaseLabel::II,
        CaseLabel::IIIA,
        CaseLabel::IIIB,
        CaseLabel::IIIC,
        CaseLabel::IV,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::DiagA => "DIAG_A",
            CaseLabel::IA => "I_A",
            CaseLabel::IB => "I_B",
            CaseLabel::II => "II",
            CaseLabel::IIIA => "III_A",
            CaseLabel::IIIB => "III_B",
            CaseLabel::IIIC => "III_C",
            CaseLabel::IV => "IV",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CaseTag {
    pub label: CaseLabel,
    pub j1: i64,
    pub j2: i64,
}

/// The integer data the classification depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseParams {
    pub k: i64,
    pub dq1: i64,
    pub dq2: i64,
    pub k1: i64,
    pub k2: i64,
    pub k21: i64,
    /// `deg d21`; must be finite.
    pub d: i64,
}

impl CaseParams {
    pub fn of<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<Self> {
        let d = t.deg_d21().finite().ok_or_else(|| {
            Error::Precondition("d21 = 0: the factor is diagonal, use the kernel engine directly".into())
        })?;
        Ok(CaseParams { k: t.k, dq1: t.deg_q1(), dq2: t.deg_q2(), k1: t.k1, k2: t.k2, k21: t.k21, d })
    }

    pub fn j1(&self) -> i64 {
        (self.dq2 + self.k - self.k21).max(0)
    }

    pub fn j2(&self) -> i64 {
        self.k1 + self.k2 - self.dq1 - self.k - self.k21
    }

    pub fn splits(&self) -> bool {
        self.k1 >= self.dq1 + self.k || self.k2 <= self.dq2 + self.k
    }

    pub fn classify(&self) -> CaseTag {
        let (j1, j2, d) = (self.j1(), self.j2(), self.d);
        let label = if self.splits() {
            CaseLabel::DiagA
        } else if j2 <= 0 {
            if self.dq2 + self.k - self.k21 >= 0 {
                CaseLabel::IA
            } else {
                CaseLabel::IB
            }
        } else if j1 == 0 {
            CaseLabel::II
        } else if d <= j1 || d <= j2 {
            if j1 >= d && d >= j2 {
                CaseLabel::IIIA
            } else if j1 >= d {
                CaseLabel::IIIB
            } else {
                CaseLabel::IIIC
            }
        } else {
            CaseLabel::IV
        };
        CaseTag { label, j1, j2 }
    }

    /// Kernel dimension, or for case IV an upper bound.
    pub fn dim(&self) -> CaseDim {
        let CaseParams { k, dq1, dq2, k1, k2, k21, d } = *self;
        let tag = self.classify();
        let (j1, j2) = (tag.j1, tag.j2);
        let exact = |v: i64| CaseDim::Exact(v.max(0) as usize);
        match tag.label {
            CaseLabel::DiagA => exact((dq1 + k - k1).max(0) + (dq2 + k - k2).max(0)),
            CaseLabel::IA | CaseLabel::IB => exact(dq1 + k - k1 + (dq2 + k - k2).max(k21 - k2)),
            CaseLabel::II => exact(0),
            CaseLabel::IIIA => exact(dq1 - k1 + dq2 - k2 + 2 * k),
            CaseLabel::IIIB => exact((dq1 + k - k1).min(dq2 + k - k21 - d)),
            CaseLabel::IIIC => exact(0),
            // The bound in j-form; the same bound written through k21 and
            // deg q2 does not match it.
            CaseLabel::IV => CaseDim::UpperBound((d - j2).min(j1 + 1) as usize),
        }
    }

    /// `max(a1, a2, 0)`, the unified case III formula.
    pub fn case_iii_unified(&self) -> i64 {
        let a1 = self.dq1 - self.k1 + self.dq2 - self.k2 + 2 * self.k;
        let a2 = (self.dq2 + self.k - self.k21 - self.d).min(self.dq1 + self.k - self.k1);
        a1.max(a2).max(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum CaseDim {
    Exact(usize),
    UpperBound(usize),
}

impl CaseDim {
    pub fn value(self) -> usize {
        match self {
            CaseDim::Exact(v) | CaseDim::UpperBound(v) => v,
        }
    }

    pub fn is_bound_only(self) -> bool {
        matches!(self, CaseDim::UpperBound(_))
    }

    /// Whether a computed dimension is consistent with this value.
    pub fn admits(self, dim: usize) -> bool {
        match self {
            CaseDim::Exact(v) => v == dim,
            CaseDim::UpperBound(v) => dim <= v,
        }
    }
}

pub fn classify<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<CaseTag> {
    t.ensure_valid()?;
    Ok(CaseParams::of(t)?.classify())
}

/// Dimension from the case formulas. A diagonal factor (`d21 = 0`) skips
/// the classifier and uses the split formula.
pub fn dim_by_case<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<CaseDim> {
    t.ensure_valid()?;
    if t.d21.is_zero() {
        let split = (t.deg_q1() + t.k - t.k1).max(0) + (t.deg_q2() + t.k - t.k2).max(0);
        return Ok(CaseDim::Exact(split as usize));
    }
    Ok(CaseParams::of(t)?.dim())
}

/// Compressions `M`, `N` of the Toeplitz matrix of `d21`, first
/// `deg q1 + k - k1` columns. `M` takes rows
/// `max(deg q2 + k - k21, 0) + 1 ..= k2 - k21` and `N` rows
/// `k2 - k21 + 1 ..= max(k2 - k21, deg q1 + k - k1 + deg d21)`.
#[derive(Clone, Debug)]
pub struct MnPair<T> {
    pub m: CompressedBlock<T>,
    pub n: CompressedBlock<T>,
}

pub fn build_mn<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<MnPair<T>> {
    t.ensure_valid()?;
    let p = CaseParams::of(t)?;
    if p.splits() {
        return Err(Error::Precondition(format!(
            "k1 >= deg q1 + k or k2 <= deg q2 + k (k1={}, deg q1={}, k2={}, deg q2={}, k={}); \
             the kernel splits, use the diagonal formula",
            p.k1, p.dq1, p.k2, p.dq2, p.k
        )));
    }
    let cols = (p.dq1 + p.k - p.k1) as usize;
    let top = p.k2 - p.k21;
    let m = CompressedBlock::new(t.d21.clone(), cols, p.j1() + 1, top);
    let n = CompressedBlock::new(t.d21.clone(), cols, top + 1, top.max(cols as i64 + p.d));
    Ok(MnPair { m, n })
}

impl<T: Scalar> MnPair<T> {
    /// Kernel vectors `(f1, f2)` with `M f1 = 0` and `f2 = -N f1`.
    pub fn kernel(&self, bounds: Vec<usize>) -> KernelBasis<T> {
        let spanning = self
            .m
            .matrix
            .nullspace()
            .into_iter()
            .map(|v| {
                let f2: Vec<T> = self.n.matrix.mul_vec(&v).into_iter().map(|x| -x).collect();
                vec![Polynomial::from_coeffs(v), Polynomial::from_coeffs(f2)]
            })
            .collect();
        KernelBasis::canonical(2, bounds, spanning)
    }
}

/// Special-form consequences for a 2x2 factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub passed: bool,
    /// `"k1_dominates"`, `"k2_small"` or `"m_vanishes"`.
    pub branch: &'static str,
    pub case: Option<CaseTag>,
    pub expected_dim: usize,
    pub computed_dim: usize,
    /// First nonzero entry of `M` (0-based) when `M` should vanish.
    pub offending_entry: Option<(usize, usize)>,
}

pub fn special_corollary_check<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<CorollaryReport> {
    t.ensure_valid()?;
    let mf = t.to_middle_factor();
    if !mf.is_special_form() {
        return Err(Error::NotSpecialForm("the 2x2 factor is not in special form".into()));
    }
    let (dq1, dq2) = (t.deg_q1(), t.deg_q2());
    let expected_dim = ((dq1 + t.k - t.k1).max(0) + (dq2 + t.k - t.k2).max(0)) as usize;
    let computed_dim = kernel_basis(&mf)?.dim();
    let mut report = CorollaryReport {
        passed: computed_dim == expected_dim,
        branch: "m_vanishes",
        case: None,
        expected_dim,
        computed_dim,
        offending_entry: None,
    };
    if t.k1 >= dq1 + t.k {
        report.branch = "k1_dominates";
        return Ok(report);
    }
    if t.k2 <= dq2 + t.k {
        report.branch = "k2_small";
        return Ok(report);
    }
    if t.d21.is_zero() {
        return Ok(report);
    }
    report.case = Some(CaseParams::of(t)?.classify());
    let mn = build_mn(t)?;
    let m = &mn.m.matrix;
    report.offending_entry =
        (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))).find(|&(r, c)| !m[(r, c)].is_zero());
    report.passed &= report.offending_entry.is_none();
    Ok(report)
}

/// A quotient of polynomials with nonzero denominator, compared by
/// cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction<T> {
    pub num: Polynomial<T>,
    pub den: Polynomial<T>,
}

impl<T: Scalar> RationalFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        RationalFunction { num, den }
    }

    pub fn poly(p: Polynomial<T>) -> Self {
        Self::new(p, Polynomial::one())
    }

    pub fn zero() -> Self {
        Self::poly(Polynomial::zero())
    }

    /// `z^n` for any integer `n`.
    pub fn z_pow(n: i64) -> Self {
        if n >= 0 {
            Self::poly(Polynomial::z_pow(n as usize))
        } else {
            Self::new(Polynomial::one(), Polynomial::z_pow((-n) as usize))
        }
    }

    pub fn constant(c: T) -> Self {
        Self::poly(Polynomial::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.num, self.den.clone())
    }

    pub fn equals(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    /// Is a constant, as a function.
    pub fn as_constant(&self) -> Option<T> {
        let (q, r) = self.num.divmod(&self.den).ok()?;
        (r.is_zero() && q.is_constant()).then(|| q.constant_term())
    }

    /// Cancel common factors and make the denominator monic.
    pub fn reduced(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let g = self.num.gcd(&self.den);
        let num = self.num.div_exact(&g).expect("gcd divides");
        let den = self.den.div_exact(&g).expect("gcd divides");
        let lead = den.leading().cloned().expect("nonzero denominator");
        let inv = T::one() / lead;
        Self::new(num.scale(&inv), den.scale(&inv))
    }
}

pub type RationalMatrix<T> = [[RationalFunction<T>; 2]; 2];

pub fn mat_mul<T: Scalar>(a: &RationalMatrix<T>, b: &RationalMatrix<T>) -> RationalMatrix<T> {
    let entry = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

pub fn det<T: Scalar>(a: &RationalMatrix<T>) -> RationalFunction<T> {
    a[0][0].mul(&a[1][1]).add(&a[0][1].mul(&a[1][0]).neg())
}

/// `Xi` itself, including the `z^-k` factor.
pub fn symbol<T: Scalar>(mf: &MiddleFactor<T>) -> Result<RationalMatrix<T>> {
    if mf.m() != 2 {
        return Err(Error::NotTwoByTwo(mf.m()));
    }
    let entry = |j: usize, i: usize| {
        if i > j {
            return RationalFunction::zero();
        }
        RationalFunction::new(mf.numerator(j, i), mf.rows[j].q.shift(mf.k as usize))
    };
    Ok([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
}

#[derive(Clone, Debug)]
pub struct TransformResult<T> {
    pub omega_minus: RationalMatrix<T>,
    pub omega_plus: RationalMatrix<T>,
    pub new_factor: MiddleFactor<T>,
}

/// Outcome of re-checking a transform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformCheck {
    pub identity: bool,
    pub det_minus_is_minus_one: bool,
    pub det_plus_is_minus_one: bool,
    pub new_factor_special: bool,
    pub dim_before: usize,
    pub dim_after: usize,
}

impl TransformCheck {
    pub fn passed(&self) -> bool {
        self.identity
            && self.det_minus_is_minus_one
            && self.det_plus_is_minus_one
            && self.new_factor_special
            && self.dim_before == self.dim_after
    }
}

/// Diagonalise a 2x2 factor whose `d21 = c` is a nonzero constant and which
/// is not already in special form.
///
/// With `p1 = q2 / q1`,
///
/// ```text
/// Omega_- = [[-c, p1 z^(k1-k21)], [0, 1/c]]
/// Omega_+ = [[-z^(k2-k21) / c, 1], [1, 0]]
/// ```
///
/// and `z^k Omega_- Xi Omega_+ = diag(z^(k1+k2-k21) / q1, z^k21 / q2)`.
/// The `(1, 2)` entry of `Omega_-` is strictly proper because
/// `deg p1 < k21 - k1`.
pub fn mono_to_special<T: Scalar>(t: &TwoByTwoFactor<T>) -> Result<TransformResult<T>> {
    t.ensure_valid()?;
    if t.d21.is_zero() || !t.d21.is_constant() {
        return Err(Error::Precondition("d21 must be a nonzero constant".into()));
    }
    if t.k1 - t.deg_q1() >= t.k21 - t.deg_q2() {
        return Err(Error::Precondition(format!(
            "already in special form: k1 - deg q1 = {} >= k21 - deg q2 = {}",
            t.k1 - t.deg_q1(),
            t.k21 - t.deg_q2()
        )));
    }
    let (p1, rem) = t.q2.divmod(&t.q1)?;
    if !rem.is_zero() {
        return Err(Error::Precondition("q1 does not divide q2".into()));
    }
    let c = t.d21.constant_term();
    let inv_c = T::one() / c.clone();

    let omega_minus = [
        [
            RationalFunction::constant(-c),
            RationalFunction::poly(p1).mul(&RationalFunction::z_pow(t.k1 - t.k21)),
        ],
        [RationalFunction::zero(), RationalFunction::constant(inv_c.clone())],
    ];
    let omega_plus = [
        [
            RationalFunction::z_pow(t.k2 - t.k21).mul(&RationalFunction::constant(-inv_c)),
            RationalFunction::constant(T::one()),
        ],
        [RationalFunction::constant(T::one()), RationalFunction::zero()],
    ];
    let new_factor = MiddleFactor::diagonal(
        t.k,
        vec![(t.q1.clone(), t.k1 + t.k2 - t.k21), (t.q2.clone(), t.k21)],
    );
    let result = TransformResult { omega_minus, omega_plus, new_factor };
    if !product_identity_holds(t, &result)? {
        return Err(Error::Inconsistent("transform product identity failed".into()));
    }
    Ok(result)
}

fn product_identity_holds<T: Scalar>(t: &TwoByTwoFactor<T>, r: &TransformResult<T>) -> Result<bool> {
    let xi = symbol(&t.to_middle_factor())?;
    let zk = RationalFunction::z_pow(t.k);
    let lhs = mat_mul(&mat_mul(&r.omega_minus, &xi), &r.omega_plus);
    let target = symbol(&r.new_factor)?;
    Ok((0..2).all(|i| (0..2).all(|j| lhs[i][j].mul(&zk).equals(&target[i][j].mul(&zk)))))
}

/// Recompute every property of a transform from scratch.
pub fn verify_transform<T: Scalar>(t: &TwoByTwoFactor<T>, r: &TransformResult<T>) -> Result<TransformCheck> {
    let minus_one = RationalFunction::constant(-T::one());
    Ok(TransformCheck {
        identity: product_identity_holds(t, r)?,
        det_minus_is_minus_one: det(&r.omega_minus).equals(&minus_one),
        det_plus_is_minus_one: det(&r.omega_plus).equals(&minus_one),
        new_factor_special: r.new_factor.is_special_form(),
        dim_before: kernel_basis(&t.to_middle_factor())?.dim(),
        dim_after: kernel_basis(&r.new_factor)?.dim(),
    })
}

/// Assemble `M` above `N` for display.
pub fn stacked<T: Scalar>(mn: &MnPair<T>) -> Matrix<T> {
    mn.m.matrix.vstack(&mn.n.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, Rational, TwoByTwoFactor};

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    fn zm1_pow(n: usize) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * &p(&[-1, 1]))
    }

    #[allow(clippy::too_many_arguments)]
    fn t(k: i64, q1: Poly, q2: Poly, k1: i64, k2: i64, k21: i64, d21: Poly) -> TwoByTwoFactor {
        TwoByTwoFactor { k, q1, q2, k1, k2, k21, d21 }
    }

    fn case_i_a() -> TwoByTwoFactor {
        t(0, zm1_pow(2), zm1_pow(3), 0, 4, 3, p(&[1]))
    }

    fn case_iii_b() -> TwoByTwoFactor {
        t(0, zm1_pow(1), p(&[-1, 0, 1]), 0, 4, 0, p(&[1]))
    }

    fn case_ii() -> TwoByTwoFactor {
        t(0, zm1_pow(1), zm1_pow(2), 0, 5, 3, p(&[2, 1]))
    }

    fn r(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&case_i_a()).unwrap(), CaseTag { label: CaseLabel::IA, j1: 0, j2: -1 });
        assert_eq!(classify(&case_iii_b()).unwrap(), CaseTag { label: CaseLabel::IIIB, j1: 2, j2: 3 });
        let other = t(0, zm1_pow(1), zm1_pow(2), 0, 4, 1, p(&[1]));
        assert_eq!(classify(&other).unwrap(), CaseTag { label: CaseLabel::IIIB, j1: 1, j2: 2 });
        assert_eq!(classify(&case_ii()).unwrap().label, CaseLabel::II);
        let diag = t(0, zm1_pow(1), zm1_pow(2), 0, 4, 0, Poly::zero());
        assert!(matches!(classify(&diag), Err(Error::Precondition(_))));
    }

    #[test]
    fn dim_examples_match_kernel() {
        for (tt, want) in [(case_i_a(), 1), (case_iii_b(), 1), (case_ii(), 0)] {
            assert_eq!(dim_by_case(&tt).unwrap(), CaseDim::Exact(want));
            assert_eq!(kernel_basis(&tt.to_middle_factor()).unwrap().dim(), want);
        }
    }

    #[test]
    fn mn_examples() {
        let mn = build_mn(&case_i_a()).unwrap();
        assert_eq!(mn.m.matrix, Matrix::from_i64s(2, &[&[1, 0]]));
        assert_eq!(mn.n.matrix, Matrix::from_i64s(2, &[&[0, 1]]));
        let kb = mn.kernel(vec![2, 1]);
        assert_eq!(kb.vectors, vec![vec![p(&[0, 1]), p(&[-1])]]);

        let mn = build_mn(&case_iii_b()).unwrap();
        assert_eq!(mn.m.matrix, Matrix::from_i64s(1, &[&[0], &[0]]));
        assert!(mn.n.is_vacuous());
        assert_eq!(mn.kernel(vec![1, 0]).vectors, vec![vec![Poly::one(), Poly::zero()]]);

        let mn = build_mn(&case_ii()).unwrap();
        assert_eq!(mn.m.matrix, Matrix::from_i64s(1, &[&[2], &[1]]));
        assert!(mn.kernel(vec![1, 0]).is_empty());

        let split = t(0, zm1_pow(1), zm1_pow(2), 1, 4, 0, p(&[1]));
        assert!(matches!(build_mn(&split), Err(Error::Precondition(_))));
    }

    #[test]
    fn mn_kernel_matches_engine() {
        for tt in [case_i_a(), case_iii_b(), case_ii(), t(1, zm1_pow(2), zm1_pow(3), 0, 7, 1, p(&[1, 1, 3]))] {
            let mf = tt.to_middle_factor();
            let engine = kernel_basis(&mf).unwrap();
            assert!(build_mn(&tt).unwrap().kernel(mf.degree_bounds()).same_subspace(&engine));
        }
    }

    /// Every parameter combination on a small lattice lands in exactly one
    /// top-level case, and the case III formulas agree with `max(a1, a2, 0)`.
    #[test]
    fn lattice_classification() {
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..3 {
            for dq1 in 0..4 {
                for dq2 in dq1..6 {
                    for k1 in 0..7 {
                        for k2 in 1..9 {
                            for k21 in 0..k2 {
                                for d in 0..(k2 - k21) {
                                    let c = CaseParams { k, dq1, dq2, k1, k2, k21, d };
                                    let (j1, j2) = (c.j1(), c.j2());
                                    let tag = c.classify();
                                    seen.insert(tag.label);
                                    if c.splits() {
                                        assert_eq!(tag.label, CaseLabel::DiagA);
                                        continue;
                                    }
                                    let preds = [
                                        j2 <= 0,
                                        j2 > 0 && j1 == 0,
                                        j2 > 0 && j1 > 0 && (d <= j1 || d <= j2),
                                        j2 > 0 && j1 > 0 && d > j1 && d > j2,
                                    ];
                                    assert_eq!(preds.iter().filter(|&&b| b).count(), 1, "{c:?}");
                                    if matches!(tag.label, CaseLabel::IIIA | CaseLabel::IIIB | CaseLabel::IIIC) {
                                        assert_eq!(c.dim(), CaseDim::Exact(c.case_iii_unified() as usize), "{c:?}");
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), CaseLabel::ALL.len());
    }

    #[test]
    fn transform_example() {
        let tt = t(0, zm1_pow(1), zm1_pow(2), 0, 3, 2, p(&[1]));
        let res = mono_to_special(&tt).unwrap();
        assert_eq!(res.new_factor, MiddleFactor::diagonal(0, vec![(zm1_pow(1), 1), (zm1_pow(2), 2)]));
        assert!(res.omega_minus[0][1].equals(&RationalFunction::new(zm1_pow(1), Poly::z_pow(2))));
        let check = verify_transform(&tt, &res).unwrap();
        assert!(check.passed());
        assert_eq!((check.dim_before, check.dim_after), (0, 0));
        assert_eq!(classify(&tt).unwrap().label, CaseLabel::IA);
        assert_eq!(dim_by_case(&tt).unwrap(), CaseDim::Exact(0));

        let shifted = TwoByTwoFactor { k: 1, ..tt.clone() };
        let res = mono_to_special(&shifted).unwrap();
        assert_eq!(res.new_factor.k, 1);
        let check = verify_transform(&shifted, &res).unwrap();
        assert!(check.passed());
        assert_eq!(check.dim_after, 2);
    }

    #[test]
    fn transform_with_nonunit_constant() {
        let tt = t(1, zm1_pow(1), &zm1_pow(1) * &p(&[1, 0, 1]), 0, 5, 4, p(&[-3]));
        let res = mono_to_special(&tt).unwrap();
        assert!(verify_transform(&tt, &res).unwrap().passed());
        assert_eq!(det(&res.omega_minus).as_constant(), Some(r(-1)));
    }

    #[test]
    fn transform_rejections() {
        let special = t(0, zm1_pow(1), zm1_pow(2), 2, 3, 1, p(&[1]));
        assert!(matches!(mono_to_special(&special), Err(Error::Precondition(_))));
        let non_mono = t(0, zm1_pow(1), zm1_pow(2), 0, 4, 2, p(&[1, 1]));
        assert!(matches!(mono_to_special(&non_mono), Err(Error::Precondition(_))));
        let no_divide = t(0, p(&[1, 1]), zm1_pow(2), 0, 3, 2, p(&[1]));
        assert!(mono_to_special(&no_divide).is_err());
    }

    #[test]
    fn corollary_examples() {
        let diag = t(0, zm1_pow(1), zm1_pow(2), 0, 4, 0, Poly::zero());
        assert!(special_corollary_check(&diag).unwrap().passed);

        let first = t(0, zm1_pow(1), zm1_pow(2), 2, 3, 1, p(&[1]));
        let rep = special_corollary_check(&first).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.branch, "k1_dominates");

        // k1 < deg q1 + k, k2 > deg q2 + k, special: k1 - 2 >= 0 + 0 - 3
        let inner = t(0, zm1_pow(2), zm1_pow(3), 0, 5, 0, p(&[1]));
        let rep = special_corollary_check(&inner).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.case.unwrap().label, CaseLabel::IIIB);
        assert_eq!(rep.expected_dim, 2);

        let not_special = t(0, zm1_pow(1), zm1_pow(2), 0, 4, 3, p(&[1]));
        assert!(matches!(special_corollary_check(&not_special), Err(Error::NotSpecialForm(_))));
    }

    #[test]
    fn rational_function_basics() {
        let a = RationalFunction::new(p(&[1, 1]), p(&[1, 0, 1]));
        let b = RationalFunction::new(p(&[2, 2]), p(&[2, 0, 2]));
        assert!(a.equals(&b));
        assert!(a.add(&a.neg()).is_zero());
        assert!(RationalFunction::<Rational>::z_pow(-2).mul(&RationalFunction::z_pow(2)).equals(&RationalFunction::poly(Poly::one())));
        let red = b.reduced();
        assert_eq!(red.den, p(&[1, 0, 1]));
        assert_eq!(red.num, p(&[1, 1]));
    }
}

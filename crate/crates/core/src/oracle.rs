//! Brute-force kernel oracle, random instance generation and the
//! cross-checking harness.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Matrix, Polynomial, Scalar};
use crate::document::InstanceDocument;
use crate::error::{Error, Result};
use crate::kernel::{
    dims_special_form, general_report, index_multiplicity_check, kernel_basis, kernel_recursive, KernelBasis,
};
use crate::two_by_two::{
    build_mn, dim_by_case, mono_to_special, special_corollary_check, verify_transform, CaseDim, CaseLabel,
    CaseParams,
};
use crate::{MiddleFactor, Poly, Rational, RowSpec};

/// Default extra headroom for [`oracle_kernel`] stabilisation checks.
pub const DEFAULT_INFLATE: usize = 5;

/// Rejection-sampling budget per generated instance.
pub const RETRY_BUDGET: usize = 1000;

/// Kernel from the raw degree condition.
///
/// Unknown `f_j` range over polynomials of degree below `l_j + inflate`.
/// Each row sum `p_j1 f_1 + .. + p_jj f_j` is expanded by multiplying the
/// numerators with monomials, and every coefficient at or above
/// `deg q_j + k` is required to vanish.
pub fn oracle_kernel<T: Scalar>(
    mf: &crate::middle_factor::MiddleFactor<T>,
    inflate: usize,
) -> Result<KernelBasis<T>> {
    mf.ensure_valid()?;
    let m = mf.m();
    let widths: Vec<usize> = mf.degree_bounds().into_iter().map(|l| l + inflate).collect();
    let total: usize = widths.iter().sum();

    let mut equations: Vec<Vec<T>> = Vec::new();
    for j in 0..m {
        // Column (i, s) of this row's system is the product p_ji z^s.
        let mut products: Vec<Polynomial<T>> = Vec::with_capacity(total);
        for (i, &w) in widths.iter().enumerate() {
            let p = if i <= j { mf.numerator(j, i) } else { Polynomial::zero() };
            for s in 0..w {
                products.push(p.mul_poly(&Polynomial::z_pow(s)));
            }
        }
        let top = products.iter().filter_map(|p| p.degree().finite()).max().unwrap_or(-1);
        let floor = mf.deg_q(j) + mf.k;
        for t in floor..=top {
            equations.push(products.iter().map(|p| p.coeff(t)).collect());
        }
    }
    let ns = Matrix::from_rows(total, equations).nullspace();
    Ok(KernelBasis::from_coordinates(m, widths.clone(), &widths, &ns))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    General,
    SpecialForm,
    TwoByTwo,
    #[serde(rename = "monomial_2x2")]
    Monomial2x2,
    Diagonal,
}

impl Profile {
    pub const ALL: [Profile; 5] =
        [Profile::General, Profile::SpecialForm, Profile::TwoByTwo, Profile::Monomial2x2, Profile::Diagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::General => "general",
            Profile::SpecialForm => "special_form",
            Profile::TwoByTwo => "two_by_two",
            Profile::Monomial2x2 => "monomial_2x2",
            Profile::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Profile::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Profile::ALL.iter().map(|p| p.as_str()).collect();
            format!("unknown profile {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub m_max: usize,
    pub deg_max: usize,
    pub k_max: i64,
    pub kdiag_max: i64,
    pub profile: Profile,
}

impl FuzzConfig {
    pub fn new(profile: Profile, seed: u64, count: usize) -> Self {
        FuzzConfig { seed, count, m_max: 4, deg_max: 6, k_max: 3, kdiag_max: 8, profile }
    }

    fn check(&self) -> Result<()> {
        if self.m_max == 0 || self.deg_max == 0 || self.kdiag_max < 1 || self.k_max < 0 {
            return Err(Error::Precondition(
                "fuzz caps must satisfy m_max, deg_max, kdiag_max >= 1 and k_max >= 0".into(),
            ));
        }
        if matches!(self.profile, Profile::TwoByTwo | Profile::Monomial2x2) && self.m_max < 2 {
            return Err(Error::Precondition(format!("profile {} needs m_max >= 2", self.profile)));
        }
        Ok(())
    }
}

/// Denominator factors; every root lies on the unit circle.
const POOL: [&[i64]; 6] = [&[-1, 1], &[1, 1], &[1, 0, 1], &[2, -1, 2], &[1, 1, 1], &[1, -1, 1]];

struct Generator {
    cfg: FuzzConfig,
    rng: ChaCha8Rng,
}

impl Generator {
    fn small_coeff(&mut self, nonzero: bool) -> Rational {
        loop {
            let num = self.rng.gen_range(-4i64..=4);
            if nonzero && num == 0 {
                continue;
            }
            let den = if self.rng.gen_ratio(1, 8) { self.rng.gen_range(2i64..=3) } else { 1 };
            return Rational::new(BigInt::from(num), BigInt::from(den));
        }
    }

    /// Polynomial of exact degree `deg`, optionally with a nonzero constant.
    fn poly_of_degree(&mut self, deg: usize, nonzero_constant: bool) -> Poly {
        let coeffs = (0..=deg)
            .map(|t| self.small_coeff((t == 0 && nonzero_constant) || t == deg))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// Zero with probability 1/4, else a polynomial of degree below `bound`,
    /// usually close to it so that special form is often broken.
    fn lower_entry(&mut self, bound: i64) -> Poly {
        if bound <= 0 || self.rng.gen_ratio(1, 4) {
            return Poly::zero();
        }
        let lo = if self.rng.gen_ratio(3, 4) { (bound - 2).max(0) } else { 0 };
        let deg = self.rng.gen_range(lo..bound) as usize;
        self.poly_of_degree(deg, false)
    }

    fn pool_factor_within(&mut self, room: usize) -> Option<Poly> {
        let fitting: Vec<&[i64]> = POOL.iter().copied().filter(|f| f.len() - 1 <= room).collect();
        fitting.choose(&mut self.rng).map(|f| Poly::from_i64s(f))
    }

    /// `q_1 | q_2 | .. | q_m`, each a product of pool factors up to a unit,
    /// total degree at most `deg_max`.
    fn denominator_chain(&mut self, m: usize) -> Vec<Poly> {
        let units = [(1, 1), (1, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-3, 2)];
        let mut q = Poly::one();
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let extra = if j == 0 { self.rng.gen_range(0..=2) } else { self.rng.gen_range(0..=1) };
            for _ in 0..extra {
                let room = self.cfg.deg_max.saturating_sub(q.degree().unwrap_or(0) as usize);
                if let Some(f) = self.pool_factor_within(room) {
                    q = &q * &f;
                }
            }
            let (a, b) = *units.choose(&mut self.rng).expect("nonempty");
            out.push(q.scale(&Rational::new(BigInt::from(a), BigInt::from(b))));
        }
        out
    }

    fn kdiag(&mut self) -> i64 {
        self.rng.gen_range(0..=self.cfg.kdiag_max)
    }

    fn k(&mut self) -> i64 {
        self.rng.gen_range(0..=self.cfg.k_max)
    }

    fn general(&mut self, diagonal: bool) -> MiddleFactor {
        let m = if diagonal || self.cfg.m_max == 1 || self.rng.gen_ratio(1, 5) {
            self.rng.gen_range(1..=self.cfg.m_max)
        } else {
            self.rng.gen_range(2..=self.cfg.m_max)
        };
        let k = self.k();
        let qs = self.denominator_chain(m);
        let rows = qs
            .into_iter()
            .enumerate()
            .map(|(j, q)| {
                let kd = self.kdiag();
                let lower = (0..j).map(|_| if diagonal { Poly::zero() } else { self.lower_entry(kd) }).collect();
                RowSpec::new(q, kd, lower)
            })
            .collect();
        MiddleFactor::new(k, rows)
    }

    /// 2x2 with `p21 = z^k21 d21` and `d21(0) != 0`. Most draws land in
    /// the coupled region `k1 < deg q1 + k`, `k2 > deg q2 + k`, where `k2`
    /// may exceed `kdiag_max` by up to `deg q2 + k`.
    fn two_by_two(&mut self, constant_d21: bool) -> MiddleFactor {
        let k = self.k();
        let qs = self.denominator_chain(2);
        let (top1, top2) = (qs[0].degree().unwrap_or(0) + k, qs[1].degree().unwrap_or(0) + k);
        let (k1, k2) = if top1 > 0 && self.rng.gen_ratio(4, 5) {
            (self.rng.gen_range(0..top1), self.rng.gen_range(top2 + 1..=top2 + self.cfg.kdiag_max))
        } else {
            (self.kdiag(), self.rng.gen_range(1..=self.cfg.kdiag_max))
        };
        let k21 = self.rng.gen_range(0..k2);
        let d = if constant_d21 { 0 } else { self.rng.gen_range(0..k2 - k21) as usize };
        let d21 = self.poly_of_degree(d, true);
        let rows = vec![
            RowSpec::diagonal(qs[0].clone(), k1),
            RowSpec::new(qs[1].clone(), k2, vec![d21.shift(k21 as usize)]),
        ];
        MiddleFactor::new(k, rows)
    }

    fn draw(&mut self) -> Result<MiddleFactor> {
        let profile = self.cfg.profile;
        for _ in 0..RETRY_BUDGET {
            let mf = match profile {
                Profile::General => self.general(false),
                Profile::Diagonal => self.general(true),
                Profile::SpecialForm => self.general(false),
                Profile::TwoByTwo => self.two_by_two(false),
                Profile::Monomial2x2 => self.two_by_two(true),
            };
            let accept = match profile {
                Profile::SpecialForm => mf.is_special_form(),
                Profile::Monomial2x2 => {
                    let t = mf.as_two_by_two()?;
                    t.k1 - t.deg_q1() < t.k21 - t.deg_q2()
                }
                _ => true,
            };
            if accept {
                mf.ensure_valid()?;
                return Ok(mf);
            }
        }
        Err(Error::Unsatisfiable {
            profile: profile.to_string(),
            attempts: RETRY_BUDGET,
            detail: format!(
                "no acceptable instance with m_max={}, deg_max={}, k_max={}, kdiag_max={}",
                self.cfg.m_max, self.cfg.deg_max, self.cfg.k_max, self.cfg.kdiag_max
            ),
        })
    }

    /// New denominators with the same degree increments: `q'_j` is
    /// `q'_{j-1}` times a random polynomial with nonzero constant term.
    fn redraw_denominators(&mut self, mf: &MiddleFactor) -> MiddleFactor {
        let mut prev_deg = 0;
        let mut q = Poly::one();
        let mut out = mf.clone();
        for (j, row) in out.rows.iter_mut().enumerate() {
            let d = mf.deg_q(j);
            let step = self.poly_of_degree((d - prev_deg) as usize, true);
            q = &q * &step;
            row.q = q.clone();
            prev_deg = d;
        }
        out
    }
}

pub fn generate(cfg: &FuzzConfig) -> Result<Vec<MiddleFactor>> {
    cfg.check()?;
    let mut g = Generator { cfg: cfg.clone(), rng: ChaCha8Rng::seed_from_u64(cfg.seed) };
    (0..cfg.count).map(|_| g.draw()).collect()
}

/// Instance pairs that differ only in the coefficients of the `q_j`.
pub fn generate_q_pairs(cfg: &FuzzConfig) -> Result<Vec<(MiddleFactor, MiddleFactor)>> {
    let base = generate(cfg)?;
    let mut g = Generator { cfg: cfg.clone(), rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15) };
    base.into_iter()
        .map(|mf| {
            let twin = g.redraw_denominators(&mf);
            twin.ensure_valid()?;
            Ok((mf, twin))
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub run: usize,
    pub passed: usize,
}

/// Case IV instances: the computed dimension against the bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseIvStats {
    pub instances: usize,
    pub bound_attained: usize,
    /// `bound - dim` histogram.
    pub gaps: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub instance_index: usize,
    pub check: String,
    pub detail: String,
    pub instance: InstanceDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub config: FuzzConfig,
    pub instances: usize,
    pub checks: BTreeMap<String, Tally>,
    pub cases: BTreeMap<String, usize>,
    pub case_iv: CaseIvStats,
    /// Special-form 2x2 instances with `k1 < deg q1 + k` and `k2 > deg q2 + k`.
    pub corollary_inner: usize,
    pub counterexamples: usize,
    pub first_counterexample: Option<Counterexample>,
    pub all_passed: bool,
    pub timing_ms: u64,
}

impl CheckSummary {
    /// Summary as JSON with timing removed, for reproducibility comparisons.
    pub fn without_timing(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing_ms");
        }
        v
    }

    pub fn passed(&self, check: &str) -> bool {
        self.checks.get(check).is_some_and(|t| t.run == t.passed)
    }
}

#[derive(Default)]
struct Outcome {
    checks: Vec<(&'static str, std::result::Result<(), String>)>,
    case: Option<CaseLabel>,
    iv_gap: Option<usize>,
    corollary_inner: bool,
}

impl Outcome {
    fn record(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks.push((name, if ok { Ok(()) } else { Err(detail()) }));
    }

    fn record_result(&mut self, name: &'static str, r: Result<std::result::Result<(), String>>) {
        self.checks.push((name, r.unwrap_or_else(|e| Err(e.to_string()))));
    }
}

fn dims(b: &KernelBasis<Rational>) -> String {
    format!("dim {}", b.dim())
}

/// Run every applicable check on one instance.
pub fn check_instance(mf: &MiddleFactor) -> Result<CheckOutcome> {
    let mut o = Outcome::default();
    mf.ensure_valid()?;
    let engine = kernel_basis(mf)?;
    let recursive = kernel_recursive(mf)?;
    let oracle0 = oracle_kernel(mf, 0)?;
    let oracle5 = oracle_kernel(mf, DEFAULT_INFLATE)?;
    let bounds = mf.degree_bounds();

    o.record("engine_vs_recursion", engine.vectors == recursive.vectors, || {
        format!("block matrix {} vs recursion {}", dims(&engine), dims(&recursive))
    });
    o.record("engine_vs_oracle", engine.vectors == oracle0.vectors, || {
        format!("block matrix {} vs oracle {}", dims(&engine), dims(&oracle0))
    });
    o.record("degree_bound", oracle5.vectors == oracle0.vectors && oracle5.respects_bounds(&bounds), || {
        format!("inflated oracle {} vs {}; bounds {bounds:?}", dims(&oracle5), dims(&oracle0))
    });

    let index = mf.fredholm_index();
    let codim = engine.dim() as i64 - index;
    let report = general_report(mf);
    o.record("index_identity", codim >= 0 && report.is_ok(), || {
        format!("dim {} - index {index} gives codim {codim}", engine.dim())
    });

    if mf.is_special_form() {
        o.record_result(
            "special_form_closed_form",
            dims_special_form(mf).map(|r| {
                if r.dim_ker == engine.dim() && r.codim_ran as i64 == codim {
                    Ok(())
                } else {
                    Err(format!("closed form dim {} codim {} vs computed dim {} codim {codim}", r.dim_ker, r.codim_ran, engine.dim()))
                }
            }),
        );
        o.record_result(
            "multiplicity",
            index_multiplicity_check(mf, None).map(|rows| match rows.values().find(|r| !r.holds()) {
                None => Ok(()),
                Some(r) => Err(format!("{r:?}")),
            }),
        );
    }

    if mf.m() == 2 {
        check_two_by_two(mf, &engine, &mut o)?;
    }
    Ok(CheckOutcome(o))
}

fn check_two_by_two(mf: &MiddleFactor, engine: &KernelBasis<Rational>, o: &mut Outcome) -> Result<()> {
    let t = mf.as_two_by_two()?;
    let dim = engine.dim();
    let by_case = dim_by_case(&t)?;
    if !t.d21.is_zero() {
        let params = CaseParams::of(&t)?;
        let tag = params.classify();
        o.case = Some(tag.label);
        match by_case {
            CaseDim::Exact(v) => o.record("case_formula", v == dim, || {
                format!("case {} ({tag:?}) formula {v}, computed {dim}", tag.label)
            }),
            CaseDim::UpperBound(b) => {
                o.record("case_iv_bound", dim <= b, || format!("case IV bound {b} below computed {dim}"));
                o.iv_gap = b.checked_sub(dim);
            }
        }
        if !params.splits() {
            let mn = build_mn(&t)?;
            let rebuilt = mn.kernel(mf.degree_bounds());
            o.record("mn_reconstruction", rebuilt.same_subspace(engine), || {
                format!("M/N kernel {} vs block matrix {}", dims(&rebuilt), dims(engine))
            });
        }
    } else {
        o.record("case_formula", by_case.admits(dim), || format!("split formula {by_case:?}, computed {dim}"));
    }

    if mf.is_special_form() {
        let rep = special_corollary_check(&t)?;
        let inner = rep.branch == "m_vanishes" && !t.d21.is_zero();
        o.corollary_inner = inner;
        let label_ok = !inner || rep.case.map(|c| c.label) == Some(CaseLabel::IIIB);
        o.record("corollary", rep.passed && label_ok, || format!("{rep:?}"));
    }

    let monomial = t.d21.is_constant() && !t.d21.is_zero();
    if monomial && t.k1 - t.deg_q1() < t.k21 - t.deg_q2() {
        o.record_result(
            "transform",
            mono_to_special(&t).and_then(|r| verify_transform(&t, &r)).map(|c| {
                if c.passed() {
                    Ok(())
                } else {
                    Err(format!("{c:?}"))
                }
            }),
        );
    }
    Ok(())
}

/// Result of [`check_instance`].
pub struct CheckOutcome(Outcome);

impl CheckOutcome {
    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &str)> {
        self.0.checks.iter().filter_map(|(n, r)| r.as_ref().err().map(|d| (*n, d.as_str())))
    }

    pub fn check_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.checks.iter().map(|(n, _)| *n)
    }

    pub fn case(&self) -> Option<CaseLabel> {
        self.0.case
    }
}

/// Generate instances from `cfg` and check them on `jobs` worker threads.
/// Results are merged in instance order, so the summary (apart from
/// timing) depends only on `cfg`.
pub fn cross_check(cfg: &FuzzConfig, jobs: usize) -> Result<CheckSummary> {
    let start = Instant::now();
    let instances = generate(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        instances
            .par_iter()
            .map(|mf| match check_instance(mf) {
                Ok(o) => o.0,
                Err(e) => {
                    let mut o = Outcome::default();
                    o.checks.push(("evaluation", Err(e.to_string())));
                    o
                }
            })
            .collect()
    });

    let mut summary = CheckSummary {
        config: cfg.clone(),
        instances: instances.len(),
        checks: BTreeMap::new(),
        cases: BTreeMap::new(),
        case_iv: CaseIvStats::default(),
        corollary_inner: 0,
        counterexamples: 0,
        first_counterexample: None,
        all_passed: true,
        timing_ms: 0,
    };
    for (index, (mf, o)) in instances.iter().zip(outcomes).enumerate() {
        let mut failed = false;
        for (name, r) in o.checks {
            let tally = summary.checks.entry(name.to_string()).or_default();
            tally.run += 1;
            match r {
                Ok(()) => tally.passed += 1,
                Err(detail) => {
                    failed = true;
                    log::debug!("instance {index}: {name} failed: {detail}");
                    if summary.first_counterexample.is_none() {
                        summary.first_counterexample = Some(Counterexample {
                            instance_index: index,
                            check: name.to_string(),
                            detail,
                            instance: InstanceDocument::from_middle_factor(mf),
                        });
                    }
                }
            }
        }
        if failed {
            summary.counterexamples += 1;
        }
        if let Some(label) = o.case {
            *summary.cases.entry(label.to_string()).or_default() += 1;
        }
        if let Some(gap) = o.iv_gap {
            summary.case_iv.instances += 1;
            if gap == 0 {
                summary.case_iv.bound_attained += 1;
            }
            *summary.case_iv.gaps.entry(gap).or_default() += 1;
        }
        summary.corollary_inner += o.corollary_inner as usize;
    }
    summary.all_passed = summary.counterexamples == 0;
    summary.timing_ms = start.elapsed().as_millis() as u64;
    if summary.case_iv.instances > 0 && summary.case_iv.bound_attained == 0 {
        log::info!(
            "case IV bound never attained over {} instances; gaps {:?}",
            summary.case_iv.instances,
            summary.case_iv.gaps
        );
    }
    Ok(summary)
}

/// Every instance of a cross-check that failed, as re-runnable documents.
pub fn counterexamples(cfg: &FuzzConfig) -> Result<Vec<(usize, InstanceDocument)>> {
    let instances = generate(cfg)?;
    let mut out = Vec::new();
    for (i, mf) in instances.iter().enumerate() {
        let failed = match check_instance(mf) {
            Ok(o) => o.failures().next().is_some(),
            Err(_) => true,
        };
        if failed {
            out.push((i, InstanceDocument::from_middle_factor(mf)));
        }
    }
    Ok(out)
}

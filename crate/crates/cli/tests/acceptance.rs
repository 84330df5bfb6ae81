//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; the process fails if any does.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;

use whk_core::kernel::{
    default_kappa_range, dims_special_form, general_report, index_multiplicity_check, kernel_basis,
    kernel_recursive, monomial_kernel,
};
use whk_core::oracle::{generate, generate_q_pairs, oracle_kernel, FuzzConfig, Profile, DEFAULT_INFLATE};
use whk_core::two_by_two::{
    build_mn, det, dim_by_case, mono_to_special, verify_transform, CaseDim, CaseLabel, CaseParams,
    RationalFunction,
};
use whk_core::{MiddleFactor, Rational};

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn fail_on<T: std::fmt::Debug>(what: &str, index: usize, detail: T) -> String {
    format!("{what} at instance {index}: {detail:?}")
}

fn closed_dim(mf: &MiddleFactor) -> i64 {
    (0..mf.m()).map(|j| (mf.k + mf.deg_q(j) - mf.kdiag(j)).max(0)).sum()
}

fn closed_codim(mf: &MiddleFactor) -> i64 {
    (0..mf.m()).map(|j| (mf.kdiag(j) - mf.deg_q(j) - mf.k).max(0)).sum()
}

fn index_formula(mf: &MiddleFactor) -> i64 {
    let m = mf.m() as i64;
    m * mf.k + (0..mf.m()).map(|j| mf.deg_q(j) - mf.kdiag(j)).sum::<i64>()
}

fn general_instances() -> Vec<MiddleFactor> {
    generate(&FuzzConfig::new(Profile::General, 1, 500)).expect("general instances")
}

fn special_instances() -> Vec<MiddleFactor> {
    generate(&FuzzConfig::new(Profile::SpecialForm, 2, 200)).expect("special-form instances")
}

fn oracle_equivalence(instances: &[MiddleFactor]) -> Verdict {
    let start = Instant::now();
    for (i, mf) in instances.iter().enumerate() {
        let caps = mf.m() <= 4
            && mf.k <= 3
            && (0..mf.m()).all(|j| mf.deg_q(j) <= 6 && mf.kdiag(j) <= 8);
        if !caps {
            return Err(fail_on("size caps exceeded", i, mf));
        }
        let engine = kernel_basis(mf).map_err(|e| fail_on("block matrix", i, e))?;
        let rec = kernel_recursive(mf).map_err(|e| fail_on("recursion", i, e))?;
        let oracle = oracle_kernel(mf, 0).map_err(|e| fail_on("oracle", i, e))?;
        if engine.vectors != rec.vectors || engine.vectors != oracle.vectors {
            return Err(fail_on("bases differ", i, (engine.dim(), rec.dim(), oracle.dim())));
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(60) {
        return Err(format!("took {took:?}, budget 60s"));
    }
    Ok(format!("{}/{} agree, {:.2}s", instances.len(), instances.len(), took.as_secs_f64()))
}

fn special_closed_form(instances: &[MiddleFactor]) -> Verdict {
    for (i, mf) in instances.iter().enumerate() {
        if !mf.is_special_form() {
            return Err(fail_on("not special form", i, mf));
        }
        let r = dims_special_form(mf).map_err(|e| fail_on("closed form", i, e))?;
        let basis = kernel_basis(mf).map_err(|e| fail_on("kernel", i, e))?;
        let dim = basis.dim() as i64;
        if dim != closed_dim(mf) || r.dim_ker as i64 != dim {
            return Err(fail_on("dim", i, (dim, closed_dim(mf), r.dim_ker)));
        }
        if basis != monomial_kernel(mf) {
            return Err(fail_on("basis is not monomial", i, basis.dim()));
        }
        let codim = closed_codim(mf);
        if r.codim_ran as i64 != codim || codim != dim - mf.fredholm_index() {
            return Err(fail_on("codim", i, (r.codim_ran, codim, dim - mf.fredholm_index())));
        }
    }
    Ok(format!("{0}/{0} match the closed forms", instances.len()))
}

fn index_identity(general: &[MiddleFactor], special: &[MiddleFactor]) -> Verdict {
    for (i, mf) in general.iter().chain(special).enumerate() {
        let r = general_report(mf).map_err(|e| fail_on("report", i, e))?;
        let dim = kernel_basis(mf).map_err(|e| fail_on("kernel", i, e))?.dim() as i64;
        let codim = dim - index_formula(mf);
        if codim < 0 || r.codim_ran as i64 != codim || r.index != index_formula(mf) {
            return Err(fail_on("index identity", i, (dim, codim, r.index)));
        }
        if mf.is_special_form() && codim != closed_codim(mf) {
            return Err(fail_on("codim against closed form", i, (codim, closed_codim(mf))));
        }
    }
    Ok(format!("{} instances, zero violations", general.len() + special.len()))
}

fn case_machine() -> Verdict {
    let instances = generate(&FuzzConfig::new(Profile::TwoByTwo, 4, 300)).map_err(|e| e.to_string())?;
    let mut counts = std::collections::BTreeMap::<CaseLabel, usize>::new();
    let mut iv_attained = 0;
    for (i, mf) in instances.iter().enumerate() {
        let t = mf.as_two_by_two().map_err(|e| fail_on("split", i, e))?;
        let oracle = oracle_kernel(mf, 0).map_err(|e| fail_on("oracle", i, e))?.dim();
        let params = CaseParams::of(&t).map_err(|e| fail_on("params", i, e))?;
        let tag = params.classify();
        *counts.entry(tag.label).or_default() += 1;
        let by_case = dim_by_case(&t).map_err(|e| fail_on("dim_by_case", i, e))?;
        match (tag.label, by_case) {
            (CaseLabel::IV, CaseDim::UpperBound(b)) => {
                let want = (params.d - tag.j2).min(tag.j1 + 1) as usize;
                if b != want || oracle > b {
                    return Err(fail_on("case IV bound", i, (b, want, oracle)));
                }
                iv_attained += (oracle == b) as usize;
            }
            (label, CaseDim::Exact(v)) if label != CaseLabel::IV => {
                if v != oracle {
                    return Err(fail_on("case formula", i, (label, v, oracle)));
                }
            }
            other => return Err(fail_on("bound kind", i, other)),
        }
    }
    let hist: Vec<String> = counts.iter().map(|(l, n)| format!("{l}={n}")).collect();
    Ok(format!(
        "300/300 consistent [{}]; IV bound attained {iv_attained}/{}",
        hist.join(" "),
        counts.get(&CaseLabel::IV).copied().unwrap_or(0)
    ))
}

fn corollary() -> Verdict {
    let pool = generate(&FuzzConfig::new(Profile::TwoByTwo, 5, 4000)).map_err(|e| e.to_string())?;
    let filtered: Vec<_> = pool
        .into_iter()
        .filter(|mf| {
            let t = mf.as_two_by_two().unwrap();
            mf.is_special_form() && t.k1 < t.deg_q1() + t.k && t.k2 > t.deg_q2() + t.k
        })
        .take(100)
        .collect();
    if filtered.len() < 100 {
        return Err(format!("only {} filtered instances", filtered.len()));
    }
    for (i, mf) in filtered.iter().enumerate() {
        let t = mf.as_two_by_two().unwrap();
        let label = CaseParams::of(&t).map_err(|e| fail_on("params", i, e))?.classify().label;
        let mn = build_mn(&t).map_err(|e| fail_on("build_mn", i, e))?;
        let dim = kernel_basis(mf).map_err(|e| fail_on("kernel", i, e))?.dim() as i64;
        let want = t.deg_q1() + t.k - t.k1;
        if label != CaseLabel::IIIB || !mn.m.matrix.is_zero() || dim != want {
            return Err(fail_on("corollary", i, (label, mn.m.matrix.is_zero(), dim, want)));
        }
    }
    Ok("100/100 are III_B with M = 0 and the predicted dimension".into())
}

fn transform() -> Verdict {
    let instances = generate(&FuzzConfig::new(Profile::Monomial2x2, 6, 100)).map_err(|e| e.to_string())?;
    let minus_one = RationalFunction::<Rational>::constant(Rational::from_integer((-1).into()));
    for (i, mf) in instances.iter().enumerate() {
        let t = mf.as_two_by_two().unwrap();
        let r = mono_to_special(&t).map_err(|e| fail_on("transform", i, e))?;
        let check = verify_transform(&t, &r).map_err(|e| fail_on("verify", i, e))?;
        let dets = det(&r.omega_minus).equals(&minus_one) && det(&r.omega_plus).equals(&minus_one);
        let dims = kernel_basis(mf).unwrap().dim() == kernel_basis(&r.new_factor).unwrap().dim();
        if !check.passed() || !dets || !dims || !r.new_factor.is_special_form() {
            return Err(fail_on("transform check", i, check));
        }
    }
    Ok("100/100 identity, determinants, special form and dim invariance hold".into())
}

fn multiplicities(instances: &[MiddleFactor]) -> Verdict {
    let mut rows = 0;
    for (i, mf) in instances.iter().enumerate() {
        let kappa = mf.factorization_indices();
        let table = index_multiplicity_check(mf, None).map_err(|e| fail_on("table", i, e))?;
        let range = default_kappa_range(&kappa);
        if table.keys().copied().collect::<Vec<_>>() != range.clone().collect::<Vec<_>>() {
            return Err(fail_on("range", i, range));
        }
        let d = |x: i64| kappa.iter().map(|&v| (v - x).max(0)).sum::<i64>();
        for (x, row) in &table {
            let count = kappa.iter().filter(|&&v| v == *x).count() as i64;
            let second = d(x - 1) - 2 * d(*x) + d(x + 1);
            if count != second || !row.holds() || row.lhs as i64 != count {
                return Err(fail_on("second difference", i, row));
            }
            rows += 1;
        }
    }
    Ok(format!("{} instances, {rows} table rows, zero violations", instances.len()))
}

fn degree_bound(instances: &[MiddleFactor]) -> Verdict {
    for (i, mf) in instances.iter().enumerate() {
        let loose = oracle_kernel(mf, DEFAULT_INFLATE).map_err(|e| fail_on("oracle", i, e))?;
        let tight = oracle_kernel(mf, 0).map_err(|e| fail_on("oracle", i, e))?;
        if !loose.respects_bounds(&mf.degree_bounds()) || !loose.same_subspace(&tight) {
            return Err(fail_on("kernel vector beyond the bound", i, mf.degree_bounds()));
        }
    }
    Ok(format!("{} instances, inflate {DEFAULT_INFLATE}, no vector beyond l_j", instances.len()))
}

fn q_independence() -> Verdict {
    let pairs = generate_q_pairs(&FuzzConfig::new(Profile::General, 9, 100)).map_err(|e| e.to_string())?;
    let mut differing = 0;
    for (i, (a, b)) in pairs.iter().enumerate() {
        if a.degrees() != b.degrees() {
            return Err(fail_on("degrees changed", i, (a.degrees(), b.degrees())));
        }
        differing += (0..a.m()).any(|j| a.rows[j].q != b.rows[j].q) as usize;
        let (ka, kb) = (kernel_basis(a).unwrap(), kernel_basis(b).unwrap());
        if ka != kb || oracle_kernel(a, 0).unwrap() != oracle_kernel(b, 0).unwrap() {
            return Err(fail_on("bases differ", i, (ka.dim(), kb.dim())));
        }
    }
    Ok(format!("100/100 identical ({differing} pairs with different q)"))
}

fn determinism() -> Verdict {
    let run = || -> Result<Value, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_whk"))
            .args(["fuzz", "--seed", "1", "--count", "50", "--profile", "general"])
            .env("WHK_LOG", "quiet")
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}", out.status.code()));
        }
        let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        v.as_object_mut().ok_or("summary is not an object")?.remove("timing_ms");
        Ok(v)
    };
    let (a, b) = (run()?, run()?);
    if a != b {
        return Err("summaries differ".into());
    }
    Ok("two runs identical apart from timing".into())
}

fn main() -> ExitCode {
    let general = general_instances();
    let special = special_instances();
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(&general))),
        ("special-form closed form", Box::new(|| special_closed_form(&special))),
        ("index identity", Box::new(|| index_identity(&general, &special))),
        ("2x2 case machine", Box::new(case_machine)),
        ("special-form 2x2 corollary", Box::new(corollary)),
        ("monomial transform", Box::new(transform)),
        ("index multiplicities", Box::new(|| multiplicities(&special))),
        ("kernel degree bound", Box::new(|| degree_bound(&general))),
        ("q-coefficient independence", Box::new(q_independence)),
        ("fuzz determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg})", n + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg})", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

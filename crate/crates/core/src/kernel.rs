//! Kernel of the Toeplitz-like operator of a middle factor.
//!
//! A polynomial vector `f` lies in the kernel iff for every row `j`
//!
//! ```text
//! deg(p_j1 f_1 + ... + p_jj f_j) < deg q_j + k,
//! ```
//!
//! and every kernel vector satisfies `deg f_j < l_j` with the bounds from
//! [`MiddleFactor::degree_bounds`]. Truncating to those degrees turns the
//! condition into a finite block lower-triangular system `M f = 0` whose
//! block `(j, i)` is rows `deg q_j + k + 1 ..= k_j + l_j` (1-based) and
//! columns `1 ..= l_i` of the Toeplitz matrix of `p_ji`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::algebra::{Matrix, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::middle_factor::{MiddleFactor, RowSpec};

/// Basis of a kernel, in canonical form.
///
/// The stacked coefficient vectors `(vec f_1, .., vec f_m)` of the basis are
/// in reduced echelon form with vectors ordered by pivot position, so two
/// bases of the same subspace are equal as values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis<T> {
    pub m: usize,
    pub vectors: Vec<Vec<Polynomial<T>>>,
    /// Degree bounds the basis was computed under.
    pub bounds: Vec<usize>,
}

impl<T: Scalar> KernelBasis<T> {
    /// Canonicalise an arbitrary spanning list of polynomial vectors.
    pub fn canonical(m: usize, bounds: Vec<usize>, spanning: Vec<Vec<Polynomial<T>>>) -> Self {
        let mut widths = vec![0usize; m];
        for v in &spanning {
            for (w, p) in widths.iter_mut().zip(v) {
                *w = (*w).max(p.coeffs().len());
            }
        }
        let coords = spanning.iter().map(|v| flatten(v, &widths)).collect();
        let total = widths.iter().sum();
        let reduced = Matrix::from_rows(total, coords).rref();
        let vectors = (0..reduced.rows())
            .map(|i| reduced.row(i))
            .filter(|row| row.iter().any(|c| !c.is_zero()))
            .map(|row| unflatten(row, &widths))
            .collect();
        KernelBasis { m, vectors, bounds }
    }

    /// Canonicalise coordinate vectors laid out as consecutive blocks of
    /// the given widths.
    pub fn from_coordinates(m: usize, bounds: Vec<usize>, widths: &[usize], coords: &[Vec<T>]) -> Self {
        let spanning = coords.iter().map(|c| unflatten(c, widths)).collect();
        Self::canonical(m, bounds, spanning)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Same subspace, regardless of the bounds each side was computed with.
    pub fn same_subspace(&self, other: &Self) -> bool {
        self.m == other.m && self.vectors == other.vectors
    }

    /// Every basis vector has `deg f_j < bounds[j]`.
    pub fn respects_bounds(&self, bounds: &[usize]) -> bool {
        self.vectors
            .iter()
            .all(|v| v.iter().zip(bounds).all(|(p, &l)| p.degree() < l as i64))
    }
}

fn flatten<T: Scalar>(v: &[Polynomial<T>], widths: &[usize]) -> Vec<T> {
    let mut out = Vec::with_capacity(widths.iter().sum());
    for (p, &w) in v.iter().zip(widths) {
        out.extend((0..w as i64).map(|t| p.coeff(t)));
    }
    out
}

fn unflatten<T: Scalar>(coords: &[T], widths: &[usize]) -> Vec<Polynomial<T>> {
    let mut at = 0;
    widths
        .iter()
        .map(|&w| {
            let p = Polynomial::from_coeffs(coords[at..at + w].to_vec());
            at += w;
            p
        })
        .collect()
}

/// Rows `first ..= last` (1-based) and columns `1 ..= col_count` of the
/// semi-infinite lower-triangular Toeplitz matrix of `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBlock<T> {
    pub source: Polynomial<T>,
    pub col_count: usize,
    pub row_range: (i64, i64),
    pub matrix: Matrix<T>,
}

impl<T: Scalar> CompressedBlock<T> {
    pub fn new(source: Polynomial<T>, col_count: usize, first: i64, last: i64) -> Self {
        let rows = (last - first + 1).max(0) as usize;
        let mut matrix = Matrix::zeros(rows, col_count);
        for r in 0..rows {
            for c in 0..col_count {
                matrix[(r, c)] = source.coeff(first + r as i64 - 1 - c as i64);
            }
        }
        CompressedBlock { source, col_count, row_range: (first, last), matrix }
    }

    pub fn is_vacuous(&self) -> bool {
        self.matrix.is_vacuous()
    }
}

/// The assembled block matrix together with its layout.
#[derive(Clone, Debug)]
pub struct BlockMatrix<T> {
    pub matrix: Matrix<T>,
    /// `l_j`; block column `j` has this many columns.
    pub bounds: Vec<usize>,
    pub col_offsets: Vec<usize>,
    /// 1-based Toeplitz row range of block row `j`.
    pub row_ranges: Vec<(i64, i64)>,
    pub row_offsets: Vec<usize>,
    /// `blocks[j][i]` for `i <= j`.
    pub blocks: Vec<Vec<CompressedBlock<T>>>,
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn block_rows(&self, j: usize) -> usize {
        let (first, last) = self.row_ranges[j];
        (last - first + 1).max(0) as usize
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .scan(0, |acc, &s| {
            let at = *acc;
            *acc += s;
            Some(at)
        })
        .collect()
}

pub fn build_block_matrix<T: Scalar>(mf: &MiddleFactor<T>) -> Result<BlockMatrix<T>> {
    mf.ensure_valid()?;
    let m = mf.m();
    let bounds = mf.degree_bounds();
    let row_ranges: Vec<(i64, i64)> = (0..m)
        .map(|j| (mf.deg_q(j) + mf.k + 1, mf.kdiag(j) + bounds[j] as i64))
        .collect();
    let blocks: Vec<Vec<CompressedBlock<T>>> = (0..m)
        .map(|j| {
            (0..=j)
                .map(|i| CompressedBlock::new(mf.numerator(j, i), bounds[i], row_ranges[j].0, row_ranges[j].1))
                .collect()
        })
        .collect();

    let row_counts: Vec<usize> = row_ranges.iter().map(|&(a, b)| (b - a + 1).max(0) as usize).collect();
    let total_cols: usize = bounds.iter().sum();
    let col_offsets = offsets(&bounds);
    let row_offsets = offsets(&row_counts);
    let mut matrix = Matrix::zeros(row_counts.iter().sum(), total_cols);
    for (j, row) in blocks.iter().enumerate() {
        for (i, block) in row.iter().enumerate() {
            for r in 0..block.matrix.rows() {
                for c in 0..block.matrix.cols() {
                    matrix[(row_offsets[j] + r, col_offsets[i] + c)] = block.matrix[(r, c)].clone();
                }
            }
        }
    }
    Ok(BlockMatrix { matrix, bounds, col_offsets, row_ranges, row_offsets, blocks })
}

/// Kernel basis from the nullspace of the block matrix.
pub fn kernel_basis<T: Scalar>(mf: &MiddleFactor<T>) -> Result<KernelBasis<T>> {
    let bm = build_block_matrix(mf)?;
    let ns = bm.matrix.nullspace();
    Ok(KernelBasis::from_coordinates(mf.m(), bm.bounds.clone(), &bm.bounds, &ns))
}

/// Kernel basis built one block row at a time.
///
/// Row `j` splits each `M_ji` into its first `max(k_j - deg q_j - k, 0)`
/// rows `N_ji` and the rest `L_ji`. Surviving prefixes must lie in
/// `ker [N_j1 .. N_j(j-1)]`; each is then extended by the unique
/// `f_j = z^s g_j` with `vec g_j = -sum L_ji vec f_i`, and
/// `s = max(deg q_j + k - k_j, 0)` free low-order coefficients of `f_j` are
/// added as new directions.
pub fn kernel_recursive<T: Scalar>(mf: &MiddleFactor<T>) -> Result<KernelBasis<T>> {
    let bm = build_block_matrix(mf)?;
    let m = mf.m();
    let mut basis: Vec<Vec<T>> = Vec::new();
    for j in 0..m {
        let lj = bm.bounds[j];
        let prefix = bm.col_offsets[j];
        let free = (mf.deg_q(j) + mf.k - mf.kdiag(j)).max(0) as usize;
        let n_rows = (mf.kdiag(j) - mf.deg_q(j) - mf.k).max(0) as usize;
        let r_rows = bm.block_rows(j);
        debug_assert!(n_rows <= r_rows);

        let row_block = bm.blocks[j][..j]
            .iter()
            .fold(Matrix::zeros(r_rows, 0), |acc, b| acc.hstack(&b.matrix));
        let n_part = row_block.row_slice(0, n_rows);
        let l_part = row_block.row_slice(n_rows, r_rows);
        debug_assert_eq!(l_part.rows() + free, lj);

        if n_rows > 0 && !basis.is_empty() {
            let b = Matrix::from_rows(basis.len(), transpose_rows(&basis, prefix));
            let combos = n_part.mul(&b).nullspace();
            basis = combos.iter().map(|c| b.mul_vec(c)).collect();
        }

        let mut next = Vec::with_capacity(basis.len() + free);
        for v in basis {
            let g = l_part.mul_vec(&v);
            let mut w = v;
            w.extend(std::iter::repeat_n(T::zero(), free));
            w.extend(g.into_iter().map(|x| -x));
            next.push(w);
        }
        for t in 0..free {
            let mut w = vec![T::zero(); prefix + lj];
            w[prefix + t] = T::one();
            next.push(w);
        }
        basis = next;
    }
    Ok(KernelBasis::from_coordinates(m, bm.bounds.clone(), &bm.bounds, &basis))
}

fn transpose_rows<T: Scalar>(vectors: &[Vec<T>], len: usize) -> Vec<Vec<T>> {
    (0..len).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    BlockMatrix,
    Recursion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub dim_ker: usize,
    pub index: i64,
    pub codim_ran: usize,
    pub special_form: bool,
    pub kappa: Vec<i64>,
    pub method: Method,
}

/// `(dim ker, codim ran)` from the closed forms valid in special form.
pub fn special_form_dims<T: Scalar>(mf: &MiddleFactor<T>) -> (usize, usize) {
    let kappa = mf.factorization_indices();
    let dim = kappa.iter().map(|&x| (-x).max(0)).sum::<i64>() as usize;
    let codim = kappa.iter().map(|&x| x.max(0)).sum::<i64>() as usize;
    (dim, codim)
}

/// Monomial basis `e_j z^t`, `0 <= t < k + deg q_j - k_j`.
pub fn monomial_kernel<T: Scalar>(mf: &MiddleFactor<T>) -> KernelBasis<T> {
    let m = mf.m();
    let mut vectors = Vec::new();
    for j in 0..m {
        let n = (mf.k + mf.deg_q(j) - mf.kdiag(j)).max(0) as usize;
        for t in 0..n {
            let mut v = vec![Polynomial::zero(); m];
            v[j] = Polynomial::z_pow(t);
            vectors.push(v);
        }
    }
    KernelBasis::canonical(m, mf.degree_bounds(), vectors)
}

/// Closed-form dimensions for special-form factors, after confirming that
/// the computed kernel is exactly the monomial direct sum.
pub fn dims_special_form<T: Scalar>(mf: &MiddleFactor<T>) -> Result<AnalysisReport> {
    mf.ensure_valid()?;
    if let Some((j, n)) = mf.special_form_violation() {
        return Err(Error::NotSpecialForm(format!(
            "column {} fails against row {}; use kernel_basis instead",
            n + 1,
            j + 1
        )));
    }
    let (dim_ker, codim_ran) = special_form_dims(mf);
    let index = mf.fredholm_index();
    if dim_ker as i64 - codim_ran as i64 != index {
        return Err(Error::Inconsistent(format!(
            "closed forms give dim {dim_ker} and codim {codim_ran} but index {index}"
        )));
    }
    let computed = kernel_basis(mf)?;
    if !computed.same_subspace(&monomial_kernel(mf)) {
        return Err(Error::Inconsistent("special-form kernel is not the monomial direct sum".into()));
    }
    Ok(AnalysisReport {
        dim_ker,
        index,
        codim_ran,
        special_form: true,
        kappa: mf.factorization_indices(),
        method: Method::ClosedForm,
    })
}

fn report_from_dim<T: Scalar>(mf: &MiddleFactor<T>, dim_ker: usize, method: Method) -> Result<AnalysisReport> {
    let index = mf.fredholm_index();
    let codim = dim_ker as i64 - index;
    if codim < 0 {
        return Err(Error::Inconsistent(format!(
            "dim ker {dim_ker} is below the index {index}"
        )));
    }
    Ok(AnalysisReport {
        dim_ker,
        index,
        codim_ran: codim as usize,
        special_form: mf.is_special_form(),
        kappa: mf.factorization_indices(),
        method,
    })
}

/// Dimensions for any valid factor: kernel from the block matrix,
/// codimension through the index.
pub fn general_report<T: Scalar>(mf: &MiddleFactor<T>) -> Result<AnalysisReport> {
    let basis = kernel_basis(mf)?;
    report_from_dim(mf, basis.dim(), Method::BlockMatrix)
}

/// As [`general_report`], with the kernel from the row recursion.
pub fn recursive_report<T: Scalar>(mf: &MiddleFactor<T>) -> Result<AnalysisReport> {
    let basis = kernel_recursive(mf)?;
    report_from_dim(mf, basis.dim(), Method::Recursion)
}

/// `z^-shift * Xi`, kept in middle-factor shape: a negative total exponent
/// is pushed into the numerators.
pub fn shifted<T: Scalar>(mf: &MiddleFactor<T>, shift: i64) -> MiddleFactor<T> {
    let k = mf.k + shift;
    if k >= 0 {
        return MiddleFactor { k, rows: mf.rows.clone() };
    }
    let lift = (-k) as usize;
    let rows = mf
        .rows
        .iter()
        .map(|r| RowSpec {
            q: r.q.clone(),
            kdiag: r.kdiag + lift as i64,
            lower: r.lower.iter().map(|p| p.shift(lift)).collect(),
        })
        .collect();
    MiddleFactor { k: 0, rows }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityRow {
    pub kappa: i64,
    /// `#{j : kappa_j = kappa}`.
    pub lhs: usize,
    /// `d(kappa - 1) - 2 d(kappa) + d(kappa + 1)` with the closed-form
    /// `d(kappa) = sum_j max(kappa_j - kappa, 0)`.
    pub rhs: i64,
    /// The same second difference with `d` taken from computed kernels of
    /// the shifted symbols.
    pub rhs_from_kernels: i64,
}

impl MultiplicityRow {
    pub fn holds(&self) -> bool {
        self.lhs as i64 == self.rhs && self.rhs == self.rhs_from_kernels
    }
}

/// Default range `[min kappa_j - 1, max kappa_j + 1]`.
pub fn default_kappa_range(kappa: &[i64]) -> RangeInclusive<i64> {
    let lo = kappa.iter().copied().min().unwrap_or(0) - 1;
    let hi = kappa.iter().copied().max().unwrap_or(0) + 1;
    lo..=hi
}

/// Recover the multiplicity of each factorization index from second
/// differences of cokernel dimensions of the shifted symbols.
pub fn index_multiplicity_check<T: Scalar>(
    mf: &MiddleFactor<T>,
    range: Option<RangeInclusive<i64>>,
) -> Result<BTreeMap<i64, MultiplicityRow>> {
    mf.ensure_valid()?;
    if let Some((j, n)) = mf.special_form_violation() {
        return Err(Error::NotSpecialForm(format!(
            "column {} fails against row {}; factorization indices are only invariants in special form",
            n + 1,
            j + 1
        )));
    }
    let kappa = mf.factorization_indices();
    let range = range.unwrap_or_else(|| default_kappa_range(&kappa));

    let closed = |s: i64| kappa.iter().map(|&x| (x - s).max(0)).sum::<i64>();
    let mut computed_cache: BTreeMap<i64, i64> = BTreeMap::new();
    let mut computed = |s: i64| -> Result<i64> {
        if let Some(&d) = computed_cache.get(&s) {
            return Ok(d);
        }
        let d = general_report(&shifted(mf, s))?.codim_ran as i64;
        computed_cache.insert(s, d);
        Ok(d)
    };

    let mut out = BTreeMap::new();
    for x in range {
        let lhs = kappa.iter().filter(|&&v| v == x).count();
        let rhs = closed(x - 1) - 2 * closed(x) + closed(x + 1);
        let rhs_from_kernels = computed(x - 1)? - 2 * computed(x)? + computed(x + 1)?;
        out.insert(x, MultiplicityRow { kappa: x, lhs, rhs, rhs_from_kernels });
    }
    Ok(out)
}

//! Row reduction.
//!
//! Rational matrices are reduced fraction-free: each row is scaled to
//! integers, then a Bareiss-style Gauss-Jordan pass keeps every
//! intermediate entry equal to a minor of the scaled input, so all
//! divisions are exact and no rational normalisation happens until the
//! final pass that divides each pivot row by its pivot.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;
use super::scalar::Scalar;

pub(crate) fn fraction_free_rref<I>(m: &mut Matrix<Ratio<I>>) -> Vec<usize>
where
    I: Integer + Signed + Clone,
    Ratio<I>: Scalar,
{
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<I>> = (0..rows).map(|i| integer_row(m.row(i))).collect();

    let mut prev = I::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (pivot_row, others) = split_row(&mut a, r);
        let piv = pivot_row[c].clone();
        for row in others {
            let f = row[c].clone();
            // Earlier pivot rows are rescaled too, which keeps every pivot
            // equal to the running determinant `prev`.
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                if x.is_zero() && (f.is_zero() || y.is_zero()) {
                    continue;
                }
                let num = piv.clone() * x.clone() - f.clone() * y.clone();
                debug_assert!(num.is_multiple_of(&prev));
                *x = num / prev.clone();
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }

    for (i, row) in a.into_iter().enumerate() {
        let out = m.row_mut(i);
        match pivots.get(i) {
            Some(&pc) => {
                let piv = row[pc].clone();
                for (dst, v) in out.iter_mut().zip(row) {
                    *dst = Ratio::new(v, piv.clone());
                }
            }
            None => {
                for dst in out.iter_mut() {
                    *dst = Ratio::zero();
                }
            }
        }
    }
    pivots
}

/// Scale a rational row by the lcm of its denominators.
fn integer_row<I: Integer + Clone>(row: &[Ratio<I>]) -> Vec<I> {
    let l = row.iter().fold(I::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|v| v.numer().clone() * (l.clone() / v.denom().clone()))
        .collect()
}

/// Borrow row `r` immutably alongside mutable access to every other row.
fn split_row<I>(a: &mut [Vec<I>], r: usize) -> (&Vec<I>, impl Iterator<Item = &mut Vec<I>>) {
    let (head, tail) = a.split_at_mut(r);
    let (pivot, rest) = tail.split_first_mut().expect("pivot row in range");
    (&*pivot, head.iter_mut().chain(rest.iter_mut()))
}

/// Textbook Gauss-Jordan over a field, kept as an independent check on
/// the fraction-free path.
#[cfg(test)]
pub(crate) fn gauss_jordan<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let mut m = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = T::one() / m[(r, c)].clone();
        for j in 0..cols {
            m[(r, j)] = m[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in 0..cols {
                m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactMatrix, Rational};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = ExactMatrix> {
        (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec((-6i64..=6, 1i64..=4), r * c).prop_map(move |v| {
                let data = v
                    .into_iter()
                    .map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
                    .collect();
                ExactMatrix::from_vec(r, c, data)
            })
        })
    }

    fn arb_invertible(n: usize) -> impl Strategy<Value = ExactMatrix> {
        prop::collection::vec(-3i64..=3, n * n).prop_filter_map("singular", move |v| {
            let m = ExactMatrix::from_vec(n, n, v.into_iter().map(Rational::from_i64).collect());
            (m.rank() == n).then_some(m)
        })
    }

    #[test]
    fn rank_deficient_with_skipped_columns() {
        let m = ExactMatrix::from_i64s(4, &[&[0, 2, 4, 1], &[0, 1, 2, 3], &[0, 3, 6, 4]]);
        let (r, p) = m.rref_with_pivots();
        assert_eq!(p, vec![1, 3]);
        let (g, gp) = gauss_jordan(&m);
        assert_eq!(r, g);
        assert_eq!(p, gp);
    }

    #[test]
    fn narrow_integer_ratio_works() {
        let m: Matrix<Ratio<i64>> = Matrix::from_i64s(2, &[&[2, 4], &[1, 2]]);
        assert_eq!(m.rref(), Matrix::from_i64s(2, &[&[1, 2], &[0, 0]]));
    }

    proptest! {
        #[test]
        fn agrees_with_gauss_jordan(m in arb_matrix()) {
            let (r, p) = m.rref_with_pivots();
            let (g, gp) = gauss_jordan(&m);
            prop_assert_eq!(&r, &g);
            prop_assert_eq!(p, gp);
        }

        #[test]
        fn rref_is_idempotent(m in arb_matrix()) {
            let r = m.rref();
            prop_assert_eq!(r.rref(), r);
        }

        #[test]
        fn rref_invariant_under_invertible_left_factor(
            (m, u) in (1usize..5).prop_flat_map(|n| {
                (prop::collection::vec(-5i64..=5, n * 4), arb_invertible(n))
                    .prop_map(move |(v, u)| {
                        (ExactMatrix::from_vec(n, 4, v.into_iter().map(Rational::from_i64).collect()), u)
                    })
            })
        ) {
            prop_assert_eq!(u.mul(&m).rref(), m.rref());
        }

        #[test]
        fn nullspace_is_kernel_and_rank_nullity(m in arb_matrix()) {
            let ns = m.nullspace();
            for x in &ns {
                prop_assert!(m.mul_vec(x).iter().all(|v| v.is_zero()));
            }
            prop_assert_eq!(m.rank() + ns.len(), m.cols());
        }
    }
}

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use super::elim;
use super::matrix::Matrix;

/// Exact field scalar used by every polynomial and matrix in the crate.
///
/// Implemented for `Ratio<I>` over any signed integer type. `BigRational`
/// is the production choice; `Ratio<i64>` and friends work for small
/// problems but overflow silently like their underlying integers.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Reduce `m` in place to reduced row-echelon form and return the
    /// pivot column of each nonzero row, in order.
    fn reduce_rows(m: &mut Matrix<Self>) -> Vec<usize>;

    /// Lossy conversion for advisory numeric checks only.
    fn approx_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self;
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Debug + Display + ToPrimitive + FromPrimitive + Send + Sync + 'static,
{
    fn reduce_rows(m: &mut Matrix<Self>) -> Vec<usize> {
        elim::fraction_free_rref(m)
    }

    fn approx_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v).expect("integer type too narrow for i64 value"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn from_i64_round_trips() {
        for v in [0i64, 1, -1, 17, -123456789012, i64::MAX, i64::MIN] {
            let r: Ratio<BigInt> = Scalar::from_i64(v);
            assert_eq!(r, Ratio::from_integer(BigInt::from(v)));
        }
        let r: Ratio<i64> = Scalar::from_i64(-42);
        assert_eq!(r, Ratio::from_integer(-42));
    }
}

//! Exact scalars, polynomials and dense matrices.

mod degree;
mod elim;
mod matrix;
mod poly;
mod scalar;

pub use degree::Degree;
pub use matrix::Matrix;
pub use poly::Polynomial;
pub use scalar::Scalar;

//! Exact kernel, Fredholm index and factorization-index computations for
//! Toeplitz-like operators whose symbol is the lower-triangular middle
//! factor of a Wiener-Hopf type factorization with poles on the unit circle.
//!
//! All arithmetic is exact. The algebra is generic over the [`Scalar`]
//! field; the aliases below fix it to arbitrary-precision rationals, which
//! is what the document layer and the CLI use.

pub mod algebra;
pub mod document;
pub mod error;
pub mod kernel;
pub mod middle_factor;
pub mod oracle;
pub mod two_by_two;

pub use algebra::{Degree, Matrix, Polynomial, Scalar};
pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type Poly = Polynomial<Rational>;
pub type ExactMatrix = Matrix<Rational>;
pub type MiddleFactor = middle_factor::MiddleFactor<Rational>;
pub type RowSpec = middle_factor::RowSpec<Rational>;
pub type TwoByTwoFactor = middle_factor::TwoByTwoFactor<Rational>;
pub type KernelBasis = kernel::KernelBasis<Rational>;

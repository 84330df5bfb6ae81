use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::degree::Degree;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense univariate polynomial in `z` with ascending coefficients.
///
/// The coefficient list never carries trailing zeros; the zero polynomial
/// is the empty list and has degree [`Degree::NegInf`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * z^n`.
    pub fn monomial(c: T, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = c;
        Polynomial { coeffs }
    }

    /// `z^n`.
    pub fn z_pow(n: usize) -> Self {
        Self::monomial(T::one(), n)
    }

    /// `z - root`.
    pub fn linear(root: T) -> Self {
        Self::from_coeffs(vec![-root, T::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^t`; zero outside the stored range.
    pub fn coeff(&self, t: i64) -> T {
        if t < 0 {
            return T::zero();
        }
        self.coeffs.get(t as usize).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n as i64 - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Value at `z = 0`.
    pub fn constant_term(&self) -> T {
        self.coeff(0)
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Multiply by `z^n`.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Multiplicity of the root `z = 0`; zero for the zero polynomial.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Split off the largest power of `z`: returns `(n, d)` with
    /// `self = z^n * d` and `d(0) != 0`. The zero polynomial maps to `(0, 0)`.
    pub fn split_z_power(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, Self::zero());
        }
        let n = self.zero_root_multiplicity();
        (n, Polynomial { coeffs: self.coeffs[n..].to_vec() })
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(out)
    }

    fn add_poly(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n as i64).map(|t| self.coeff(t) + other.coeff(t)).collect();
        Self::from_coeffs(out)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        let Some(lead) = divisor.leading() else {
            return Err(Error::DivisionByZero);
        };
        let dn = divisor.coeffs.len();
        if self.coeffs.len() < dn {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); rem.len() - dn + 1];
        for shift in (0..quot.len()).rev() {
            let c = rem[shift + dn - 1].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = rem[shift + i].clone() - c.clone() * d.clone();
            }
            quot[shift] = c;
        }
        rem.truncate(dn - 1);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Whether `self` divides `other` exactly. Zero divides only zero.
    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.divmod(self).is_ok_and(|(_, r)| r.is_zero())
    }

    /// Exact quotient `self / divisor`, failing when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divmod(divisor)?;
        if !r.is_zero() {
            return Err(Error::NotDivisible);
        }
        Ok(q)
    }

    pub fn derivative(&self) -> Self {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * T::from_i64(i as i64))
            .collect();
        Self::from_coeffs(out)
    }

    /// Leading coefficient scaled to one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn square_free_part(&self) -> Self {
        if self.is_constant() {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }
}

impl<T: Scalar> Add for Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Self {
        self.add_poly(&rhs)
    }
}

impl<T: Scalar> Add<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        self.add_poly(rhs)
    }
}

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Self {
        Polynomial { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -self.clone()
    }
}

impl<T: Scalar> Sub for Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Self {
        self.add_poly(&-rhs)
    }
}

impl<T: Scalar> Sub<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        self.add_poly(&-rhs)
    }
}

impl<T: Scalar> Mul for Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Self {
        self.mul_poly(&rhs)
    }
}

impl<T: Scalar> Mul<&Polynomial<T>> for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        self.mul_poly(rhs)
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p(&[1, 1]) * &p(&[1, -1]), p(&[1, 0, -1]));
        let prod = &Poly::zero() * &p(&[3, 0, 0, 0, 0, 1]);
        assert!(prod.is_zero());
        assert_eq!(prod.degree(), Degree::NegInf);
        let zm1 = p(&[-1, 1]);
        assert_eq!(&zm1 * &(&zm1 * &zm1), p(&[-1, 3, -3, 1]));
    }

    #[test]
    fn divmod_examples() {
        let zm1 = p(&[-1, 1]);
        let (q, r) = (&zm1 * &zm1).divmod(&zm1).unwrap();
        assert_eq!(q, zm1);
        assert!(r.is_zero());

        let (q, r) = p(&[1, 0, 1]).divmod(&zm1).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert_eq!(r, p(&[2]));

        let (q, r) = Poly::zero().divmod(&p(&[0, 0, 0, 1])).unwrap();
        assert!(q.is_zero() && r.is_zero());
    }

    #[test]
    fn divide_by_zero_is_an_error() {
        assert!(matches!(p(&[1, 2]).divmod(&Poly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn divides_and_split() {
        let zm1 = p(&[-1, 1]);
        assert!(zm1.divides(&(&zm1 * &p(&[1, 1]))));
        assert!(!zm1.divides(&p(&[1, 1])));
        assert!(Poly::zero().divides(&Poly::zero()));
        assert!(!Poly::zero().divides(&zm1));

        assert_eq!(p(&[0, 0, 1, 1]).split_z_power(), (2, p(&[1, 1])));
        assert_eq!(p(&[0, 0, 1]).split_z_power(), (2, p(&[1])));
        assert_eq!(Poly::zero().split_z_power(), (0, Poly::zero()));
    }

    #[test]
    fn square_free_part_drops_repeats() {
        let zm1 = p(&[-1, 1]);
        let cube = &zm1 * &(&zm1 * &zm1);
        assert_eq!(cube.square_free_part(), zm1);
        let mixed = &cube * &p(&[1, 0, 1]);
        assert_eq!(mixed.square_free_part(), &zm1 * &p(&[1, 0, 1]));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-9i64..=9, 0..6).prop_map(|c| Poly::from_i64s(&c))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).degree(), a.degree() + b.degree());
        }

        #[test]
        fn divmod_reconstructs(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divmod(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree() < b.degree());
        }
    }
}

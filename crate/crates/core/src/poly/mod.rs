//! Exact Laurent-polynomial and rational-function arithmetic over the Gaussian
//! rationals, plus the reciprocal-conjugate construction and rational
//! substitution used by the measure-preserving change of variables.

mod gaussian;
mod laurent;
mod rational;
mod subst;

pub use gaussian::GaussianRational;
pub(crate) use gaussian::rat_to_f64;
pub use laurent::LaurentPoly;
pub use rational::RationalFn;
pub use subst::{reciprocal_conjugate, substitute_cleared, substitute_rational, ClearedSubstitution};

use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    ZeroDenominator,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("polynomial is not univariate in `{0}`")]
    NotUnivariate(String),
    #[error("negative exponent of `{0}` where a polynomial is required")]
    NegativeExponent(String),
    #[error("k = {k} must exceed deg(g) = {degree}")]
    KNotAboveDegree { k: i64, degree: i64 },
    #[error("g(0) = 0")]
    VanishingConstantTerm,
    #[error("|lambda| != 1 for lambda = {0}")]
    NotUnit(String),
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
}

/// A Gaussian rational of modulus exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitComplex(GaussianRational);

impl UnitComplex {
    pub fn new(value: GaussianRational) -> Result<Self, PolyError> {
        if value.norm_sqr().is_one() {
            Ok(Self(value))
        } else {
            Err(PolyError::NotUnit(value.to_string()))
        }
    }

    pub fn one() -> Self {
        Self(GaussianRational::one())
    }

    /// The Pythagorean point `((p^2 - q^2) + 2pq i) / (p^2 + q^2)`.
    pub fn pythagorean(p: i64, q: i64) -> Self {
        let n = p * p + q * q;
        assert!(n != 0, "pythagorean: p = q = 0");
        Self(GaussianRational::from_parts((p * p - q * q, n), (2 * p * q, n)))
    }

    pub fn value(&self) -> &GaussianRational {
        &self.0
    }
}

impl std::fmt::Display for UnitComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_complex() {
        assert!(UnitComplex::new(GaussianRational::from_parts((3, 5), (4, 5))).is_ok());
        assert!(UnitComplex::new(GaussianRational::from_parts((1, 1), (1, 1))).is_err());
        let u = UnitComplex::pythagorean(2, 1);
        assert_eq!(u.value(), &GaussianRational::from_parts((3, 5), (4, 5)));
    }
}

use std::fmt;

use num_complex::Complex64;

use super::{GaussianRational, LaurentPoly, PolyError};

/// A quotient `num / den` of Laurent polynomials.
///
/// No gcd is ever taken. A constant denominator is folded into the numerator
/// at construction, so `den == 1` exactly when the function is a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::from_poly(num));
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero constant");
            return Ok(Self {
                num: num.scale(&inv),
                den: LaurentPoly::one(),
            });
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn into_parts(self) -> (LaurentPoly, LaurentPoly) {
        (self.num, self.den)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Union of numerator and denominator variables, numerator first.
    pub fn variables(&self) -> Vec<String> {
        let mut vars = self.num.variables().to_vec();
        for v in self.den.variables() {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    /// Variables with a nonzero exponent somewhere in `num` or `den`.
    pub fn used_variables(&self) -> Vec<String> {
        let mut vars = self.num.used_variables();
        for v in self.den.used_variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars
    }

    pub fn occurs(&self, name: &str) -> bool {
        self.num.occurs(name) || self.den.occurs(name)
    }

    /// Re-expresses numerator and denominator over a common variable list.
    pub fn embed(&self, vars: &[String]) -> Self {
        Self {
            num: self.num.embed(vars),
            den: self.den.embed(vars),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        Self::new(
            self.num.try_mul(&other.den)?.add(&other.num.try_mul(&self.den)?),
            self.den.try_mul(&other.den)?,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        Self::new(self.num.try_mul(&other.num)?, self.den.try_mul(&other.den)?)
    }

    pub fn div(&self, other: &Self) -> Result<Self, PolyError> {
        if other.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Self::new(self.num.try_mul(&other.den)?, self.den.try_mul(&other.num)?)
    }

    /// Integer power. Single-term numerators over a unit denominator stay
    /// Laurent polynomials for negative exponents.
    pub fn pow(&self, exp: i64) -> Result<Self, PolyError> {
        if self.is_polynomial() && self.num.is_monomial() {
            let (e, c) = self.num.terms().next().unwrap();
            let c = c.pow(exp).ok_or(PolyError::ZeroDenominator)?;
            let e: Vec<i64> = e
                .iter()
                .map(|&x| x.checked_mul(exp).ok_or(PolyError::ExponentOverflow))
                .collect::<Result<_, _>>()?;
            return Ok(Self::from_poly(LaurentPoly::from_terms(
                self.num.variables().to_vec(),
                [(e, c)],
            )));
        }
        if exp < 0 && self.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        let n = u32::try_from(exp.unsigned_abs()).map_err(|_| PolyError::ExponentOverflow)?;
        let (num, den) = if exp >= 0 {
            (self.num.clone(), self.den.clone())
        } else {
            (self.den.clone(), self.num.clone())
        };
        let mut a = LaurentPoly::one();
        let mut b = LaurentPoly::one();
        for _ in 0..n {
            a = a.try_mul(&num)?;
            b = b.try_mul(&den)?;
        }
        Self::new(a, b)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Binary64 evaluation; `point` is aligned with [`RationalFn::variables`].
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        let vars = self.variables();
        assert_eq!(point.len(), vars.len(), "eval_complex: point dimension");
        let pick = |p: &LaurentPoly| -> Vec<Complex64> {
            p.variables()
                .iter()
                .map(|v| point[vars.iter().position(|w| w == v).unwrap()])
                .collect()
        };
        let n = self.num.eval_complex(&pick(&self.num));
        let d = self.den.eval_complex(&pick(&self.den));
        if d.norm() < 1e-300 {
            return Err(PolyError::Pole);
        }
        Ok(n / d)
    }
}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LaurentPoly {
        LaurentPoly::var("x")
    }

    #[test]
    fn constant_denominators_fold() {
        let r = RationalFn::new(x(), LaurentPoly::constant(2.into())).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator(), &x().scale(&GaussianRational::from_ratio(1, 2)));
        assert!(matches!(RationalFn::new(x(), LaurentPoly::zero()), Err(PolyError::ZeroDenominator)));
    }

    #[test]
    fn evaluation_and_pole() {
        let one = LaurentPoly::one();
        let r = RationalFn::new(x().add(&one), x().sub(&one)).unwrap();
        let v = r.eval_complex(&[Complex64::new(0.0, 1.0)]).unwrap();
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(matches!(r.eval_complex(&[Complex64::new(1.0, 0.0)]), Err(PolyError::Pole)));
    }

    #[test]
    fn negative_powers() {
        let r = RationalFn::from_poly(x()).pow(-2).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator().min_degree_in("x"), -2);
        let s = RationalFn::from_poly(x().add(&LaurentPoly::one())).pow(-1).unwrap();
        assert!(!s.is_polynomial());
        assert!(RationalFn::from_poly(LaurentPoly::zero()).pow(-1).is_err());
    }
}

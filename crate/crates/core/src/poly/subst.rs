use super::{LaurentPoly, PolyError, RationalFn, UnitComplex};

/// `f(x) = lambda * x^k * conj(g)(1/x)`, i.e. `sum_j lambda * conj(g_j) * x^(k-j)`.
///
/// `g` must be a polynomial in `var` alone (a constant is accepted) with
/// `g(0) != 0`, and `k > deg(g)`. The result has degree `k` and lowest
/// exponent `k - deg(g) >= 1`.
pub fn reciprocal_conjugate(
    g: &LaurentPoly,
    var: &str,
    k: i64,
    lambda: &UnitComplex,
) -> Result<LaurentPoly, PolyError> {
    let coeffs = g.univariate_coeffs(var)?;
    if g.min_degree_in(var) < 0 {
        return Err(PolyError::NegativeExponent(var.to_string()));
    }
    if coeffs.first().is_none_or(|c| c.is_zero()) {
        return Err(PolyError::VanishingConstantTerm);
    }
    let degree = coeffs.len() as i64 - 1;
    if k <= degree {
        return Err(PolyError::KNotAboveDegree { k, degree });
    }
    Ok(LaurentPoly::from_terms(
        vec![var.to_string()],
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| (vec![k - j as i64], lambda.value() * &c.conj())),
    ))
}

/// Numerator and denominator of `P(v := f/g)` with the powers of `g` cleared.
///
/// With `P = num/den`, `l_n = deg_v num`, `l_d = deg_v den`:
/// `numerator = sum_j num_j f^j g^(l_n - j)`, likewise for the denominator, and
/// `P(f/g) = numerator * g^(l_d) / (denominator * g^(l_n))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearedSubstitution {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
    pub numerator_degree: i64,
    pub denominator_degree: i64,
}

fn clear_one(
    p: &LaurentPoly,
    v: &str,
    fpows: &mut Vec<LaurentPoly>,
    gpows: &mut Vec<LaurentPoly>,
    f: &LaurentPoly,
    g: &LaurentPoly,
) -> Result<(LaurentPoly, i64), PolyError> {
    let cs = p.coeffs_in_var(v)?;
    let l = cs.len() - 1;
    while fpows.len() <= l {
        let next = fpows.last().unwrap().try_mul(f)?;
        fpows.push(next);
        let next = gpows.last().unwrap().try_mul(g)?;
        gpows.push(next);
    }
    let mut out = LaurentPoly::zero();
    for (j, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out = out.add(&c.try_mul(&fpows[j])?.try_mul(&gpows[l - j])?);
    }
    // Keep the caller's variable order, with `v` where it was.
    let mut vars = p.variables().to_vec();
    for w in out.variables() {
        if !vars.contains(w) {
            vars.push(w.clone());
        }
    }
    Ok((out.embed(&vars), l as i64))
}

pub fn substitute_cleared(
    p: &RationalFn,
    v: &str,
    f: &LaurentPoly,
    g: &LaurentPoly,
) -> Result<ClearedSubstitution, PolyError> {
    for q in [f, g] {
        if q.used_variables().iter().any(|w| w != v) {
            return Err(PolyError::NotUnivariate(v.to_string()));
        }
    }
    if g.is_zero() {
        return Err(PolyError::ZeroDenominator);
    }
    let mut fpows = vec![LaurentPoly::one()];
    let mut gpows = vec![LaurentPoly::one()];
    let (numerator, numerator_degree) =
        clear_one(p.numerator(), v, &mut fpows, &mut gpows, f, g)?;
    let (denominator, denominator_degree) =
        clear_one(p.denominator(), v, &mut fpows, &mut gpows, f, g)?;
    Ok(ClearedSubstitution {
        numerator,
        denominator,
        numerator_degree,
        denominator_degree,
    })
}

/// `P(v := f/g)` as a rational function. Numerator and denominator are
/// substituted individually and the common power of `g` is cancelled.
pub fn substitute_rational(
    p: &RationalFn,
    v: &str,
    f: &LaurentPoly,
    g: &LaurentPoly,
) -> Result<RationalFn, PolyError> {
    let s = substitute_cleared(p, v, f, g)?;
    let extra = s.denominator_degree - s.numerator_degree;
    let gp = g.pow(extra.unsigned_abs() as u32);
    let (num, den) = if extra >= 0 {
        (s.numerator.try_mul(&gp)?, s.denominator)
    } else {
        (s.numerator, s.denominator.try_mul(&gp)?)
    };
    RationalFn::new(num, den)
}

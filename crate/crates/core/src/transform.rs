//! The measure-preserving substitution `v -> f(v)/g(v)` with
//! `f = lambda v^k conj(g)(1/v)`, the rational-function families built from
//! `(1 - x)/(1 + x)`, reciprocal pairs, and the catalogue of identities.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, parse_polynomial, ParseError};
use crate::measure::{measure, measure_poly, MeasureError, MeasureResult, QuadConfig};
use crate::poly::{reciprocal_conjugate, substitute_cleared, GaussianRational, LaurentPoly, PolyError, RationalFn, UnitComplex};
use crate::roots::{find_roots, jensen_measure_1d, univariate_complex_coeffs, RootError};
use crate::special::Family;

/// Roots of `g` closer than this inside the unit circle are rejected.
pub const ROOT_MARGIN: f64 = 1e-12;
/// Roots of `g` with modulus below `1 + BOUNDARY_WARNING` draw a warning.
pub const BOUNDARY_WARNING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroG,
    NotUnivariate { variables: Vec<String> },
    NegativeExponent,
    VanishingConstantTerm,
    KNotAboveDegree { k: i64, degree: i64 },
    RootInsideDisc { modulus: f64 },
    RootSolverFailed { message: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ZeroG => write!(f, "g is the zero polynomial"),
            Violation::NotUnivariate { variables } => write!(f, "g must involve one variable, found {}", variables.join(", ")),
            Violation::NegativeExponent => write!(f, "g must be a polynomial (no negative exponents)"),
            Violation::VanishingConstantTerm => write!(f, "g(0) = 0"),
            Violation::KNotAboveDegree { k, degree } => write!(f, "k = {k} must be strictly greater than deg(g) = {degree}"),
            Violation::RootInsideDisc { modulus } => write!(f, "g has a root of modulus {modulus:.6} inside the unit disc"),
            Violation::RootSolverFailed { message } => write!(f, "could not locate the roots of g: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    /// Smallest root modulus of `g` (infinite for constant `g`).
    pub min_root_modulus: f64,
    /// `min_root_modulus - 1`.
    pub margin: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("invalid transform: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
    #[error("variable `{0}` does not occur in the function")]
    VariableAbsent(String),
    #[error("family index m = {0} must be at least 1")]
    FamilyIndex(u32),
    #[error("no family variable named `{0}`")]
    UnknownFamilyVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// The data `(v, g, k, lambda)` of a substitution `v -> f(v)/g(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    pub variable: String,
    pub g: LaurentPoly,
    pub k: i64,
    pub lambda: UnitComplex,
}

impl TransformSpec {
    /// If `g` is written in a single variable other than `variable`, it is
    /// renamed, so `("x1", "x+2")` means `g = x1 + 2`.
    pub fn new(variable: &str, g: LaurentPoly, k: i64, lambda: UnitComplex) -> Self {
        let used = g.used_variables();
        let g = if used.len() == 1 && used[0] != variable {
            g.rename(&[(used[0].as_str(), variable)])
        } else {
            g
        };
        Self {
            variable: variable.to_string(),
            g: g.trim_variables(),
            k,
            lambda,
        }
    }

    /// Builds a spec from expression text for `g` and `lambda`.
    pub fn parse(variable: &str, g: &str, k: i64, lambda: &str) -> Result<Self, TransformError> {
        let g = parse_polynomial(g)?;
        let lam = parse_polynomial(lambda)?;
        let lam = lam
            .constant_value()
            .ok_or_else(|| PolyError::NotUnit(lambda.to_string()))?;
        Ok(Self::new(variable, g, k, UnitComplex::new(lam)?))
    }
}

impl std::fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> f/g with g = {}, k = {}, lambda = {}", self.variable, self.g, self.k, self.lambda)
    }
}

pub fn validate_spec(spec: &TransformSpec) -> ValidationReport {
    let mut report = ValidationReport {
        violations: Vec::new(),
        warnings: Vec::new(),
        min_root_modulus: f64::INFINITY,
        margin: f64::INFINITY,
    };
    let g = &spec.g;
    if g.is_zero() {
        report.violations.push(Violation::ZeroG);
        return report;
    }
    let used = g.used_variables();
    if used.iter().any(|v| *v != spec.variable) {
        report.violations.push(Violation::NotUnivariate { variables: used });
        return report;
    }
    if g.min_degree_in(&spec.variable) < 0 {
        report.violations.push(Violation::NegativeExponent);
        return report;
    }
    let coeffs = g.univariate_coeffs(&spec.variable).expect("checked univariate");
    if coeffs[0].is_zero() {
        report.violations.push(Violation::VanishingConstantTerm);
    }
    let degree = coeffs.len() as i64 - 1;
    if spec.k <= degree {
        report.violations.push(Violation::KNotAboveDegree { k: spec.k, degree });
    }
    if !coeffs[0].is_zero() && degree > 0 {
        let numeric: Vec<Complex64> = coeffs.iter().map(|c| c.to_complex64()).collect();
        match find_roots(&numeric) {
            Ok(rs) => {
                let min = rs.roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
                report.min_root_modulus = min;
                report.margin = min - 1.0;
                if min < 1.0 - ROOT_MARGIN {
                    report.violations.push(Violation::RootInsideDisc { modulus: min });
                } else if min < 1.0 + BOUNDARY_WARNING {
                    report
                        .warnings
                        .push(format!("g has a root on the unit circle (modulus {min:.12}); boundary case"));
                }
            }
            Err(e) => report.violations.push(Violation::RootSolverFailed { message: e.to_string() }),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    /// `P(f/g)` with the powers of `g` cancelled as far as possible.
    pub p_tilde: RationalFn,
    pub f: LaurentPoly,
    /// `sum_j num_j f^j g^(l_N - j)`.
    pub cleared_numerator: LaurentPoly,
    /// `sum_j den_j f^j g^(l_D - j)`; `1` for polynomial `P`.
    pub cleared_denominator: LaurentPoly,
    pub numerator_power: i64,
    pub denominator_power: i64,
    /// Net power `l = l_N - l_D` of `g` dividing the cleared quotient.
    pub ell: i64,
    /// `m(g) = log|g(0)|`.
    pub measure_g: f64,
    /// `ell * m(g)`, so that `m(P~) = m(cleared_numerator) - m(cleared_denominator) - correction`.
    pub correction: f64,
    pub warnings: Vec<String>,
}

/// Applies the substitution. Negative exponents of the variable are first
/// cleared by multiplying numerator and denominator by the same monomial.
pub fn apply_transform(p: &RationalFn, spec: &TransformSpec) -> Result<TransformResult, TransformError> {
    let report = validate_spec(spec);
    if !report.is_valid() {
        return Err(TransformError::Invalid(report));
    }
    let v = spec.variable.as_str();
    if !p.occurs(v) {
        return Err(TransformError::VariableAbsent(v.to_string()));
    }
    let shift = -(p.numerator().min_degree_in(v).min(p.denominator().min_degree_in(v)).min(0));
    let p = if shift > 0 {
        let mono = LaurentPoly::monomial(&[v], &[shift], GaussianRational::one());
        RationalFn::new(p.numerator().try_mul(&mono)?, p.denominator().try_mul(&mono)?)?
    } else {
        p.clone()
    };
    let f = reciprocal_conjugate(&spec.g, v, spec.k, &spec.lambda)?;
    let s = substitute_cleared(&p, v, &f, &spec.g)?;
    let ell = s.numerator_degree - s.denominator_degree;
    let gp = spec.g.pow(ell.unsigned_abs() as u32);
    let p_tilde = if ell >= 0 {
        RationalFn::new(s.numerator.clone(), s.denominator.try_mul(&gp)?)?
    } else {
        RationalFn::new(s.numerator.try_mul(&gp)?, s.denominator.clone())?
    };
    let g0 = spec.g.univariate_coeffs(v).map(|c| c[0].abs_f64()).unwrap_or_else(|_| {
        spec.g.constant_value().map_or(1.0, |c| c.abs_f64())
    });
    let measure_g = g0.ln();
    Ok(TransformResult {
        p_tilde: p_tilde.embed(&p.variables()),
        f,
        cleared_numerator: s.numerator,
        cleared_denominator: s.denominator,
        numerator_power: s.numerator_degree,
        denominator_power: s.denominator_degree,
        ell,
        measure_g,
        correction: ell as f64 * measure_g,
        warnings: report.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// `m(P)`, with the configured seed.
    pub original: MeasureResult,
    /// `m(cleared numerator)` (seed + 1).
    pub transformed_numerator: MeasureResult,
    /// `m(cleared denominator)` (seed + 1) when `P` is not a polynomial.
    pub transformed_denominator: Option<MeasureResult>,
    pub correction: f64,
    /// `m(cleared numerator) - m(cleared denominator) - correction`.
    pub transformed_value: f64,
    pub transformed_stderr: f64,
    pub difference: f64,
    /// `max(3 * (stderr_1 + stderr_2), 1e-9)`.
    pub threshold: f64,
    pub pass: bool,
}

/// Measures both sides of `m(P) = m(P~)` independently.
pub fn verify_invariance(p: &RationalFn, spec: &TransformSpec, cfg: &QuadConfig) -> Result<InvarianceReport, TransformError> {
    let t = apply_transform(p, spec)?;
    let original = measure(p, cfg)?;
    let cfg2 = QuadConfig {
        seed: cfg.seed.wrapping_add(1),
        ..cfg.clone()
    };
    let transformed_numerator = measure_poly(&t.cleared_numerator, &cfg2)?;
    let transformed_denominator = if t.cleared_denominator.is_one() {
        None
    } else {
        Some(measure_poly(&t.cleared_denominator, &cfg2)?)
    };
    let den_value = transformed_denominator.as_ref().map_or(0.0, |r| r.value);
    let den_err = transformed_denominator.as_ref().map_or(0.0, |r| r.stderr);
    let transformed_value = transformed_numerator.value - den_value - t.correction;
    let transformed_stderr = transformed_numerator.stderr + den_err;
    let difference = (original.value - transformed_value).abs();
    let threshold = (3.0 * (original.stderr + transformed_stderr)).max(1e-9);
    Ok(InvarianceReport {
        pass: difference <= threshold,
        original,
        transformed_numerator,
        transformed_denominator,
        correction: t.correction,
        transformed_value,
        transformed_stderr,
        difference,
        threshold,
    })
}

/// A member of the `R`, `S` or `T` family as an explicit quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub function: RationalFn,
    pub numerator: LaurentPoly,
    /// One univariate factor per `x_i`; the denominator is their product.
    pub denominator_factors: Vec<LaurentPoly>,
    /// Exact sum of the factor measures, so
    /// `m(function) = m(numerator) - denominator_measure`.
    pub denominator_measure: f64,
}

/// Builds `R_m`, `S_m` or `T_m` from the factors `(1 - x_i)/(1 + x_i)`,
/// applying the given substitutions factor by factor. Variables are
/// `x1..xm` followed by `z` (R), `x, y, z` (S) or `x, y` (T).
pub fn build_family(
    family: Family,
    m: u32,
    specs: &BTreeMap<String, TransformSpec>,
) -> Result<FamilyMember, TransformError> {
    if m == 0 {
        return Err(TransformError::FamilyIndex(m));
    }
    let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    if let Some(bad) = specs.keys().find(|k| !names.contains(k)) {
        return Err(TransformError::UnknownFamilyVariable(bad.clone()));
    }
    let mut nums = Vec::new();
    let mut dens = Vec::new();
    let mut denominator_measure = 0.0;
    for name in &names {
        let xi = LaurentPoly::var(name);
        let one = LaurentPoly::one();
        let factor = RationalFn::new(one.sub(&xi), one.add(&xi))?;
        let (n, d) = match specs.get(name) {
            Some(spec) => {
                let t = apply_transform(&factor, spec)?;
                // Both parts have degree one in x_i, so the powers of g cancel.
                debug_assert_eq!(t.ell, 0);
                (t.cleared_numerator, t.cleared_denominator)
            }
            None => factor.into_parts(),
        };
        denominator_measure += jensen_measure_1d(&d)?;
        nums.push(n);
        dens.push(d);
    }
    let prod = |v: &[LaurentPoly]| v.iter().fold(LaurentPoly::one(), |a, b| a.mul(b));
    let (pn, pd) = (prod(&nums), prod(&dens));
    let var = |s: &str| LaurentPoly::var(s);
    let one = LaurentPoly::one();
    let (numerator, extra): (LaurentPoly, &[&str]) = match family {
        Family::R => (var("z").mul(&pd).add(&pn), &["z"]),
        Family::S => (
            one.add(&var("x")).mul(&var("z")).mul(&pd).add(&pn.mul(&one.add(&var("y")))),
            &["x", "y", "z"],
        ),
        Family::T => (pd.add(&pn.mul(&var("x"))).add(&pd.sub(&pn).mul(&var("y"))), &["x", "y"]),
    };
    let mut order = names.clone();
    order.extend(extra.iter().map(|s| s.to_string()));
    let numerator = numerator.embed(&order);
    let function = RationalFn::new(numerator.clone(), pd.embed(&order))?;
    Ok(FamilyMember {
        function,
        numerator,
        denominator_factors: dens,
        denominator_measure,
    })
}

/// `(F, F*)` with `F* = prod y_i^(deg_i F) * conj(F)(1/y_1, ..., 1/y_n)`.
pub fn reciprocal_pair(f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    let vars = f.variables().to_vec();
    let deg: Vec<i64> = vars.iter().map(|v| f.degree_in(v)).collect();
    let star = LaurentPoly::from_terms(
        vars.clone(),
        f.terms().map(|(e, c)| (e.iter().zip(&deg).map(|(x, d)| d - x).collect(), c.conj())),
    );
    (f.clone(), star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proven,
    Conjectural,
}

/// How an entry follows from another one by a substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    /// Catalogue key, or `S_2` for the rational-function family.
    pub base: &'static str,
    pub variable: &'static str,
    pub g: &'static str,
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub key: &'static str,
    pub expression: &'static str,
    #[serde(skip)]
    pub lhs: RationalFn,
    /// Key for [`crate::special::named_constant`].
    pub rhs: &'static str,
    pub status: Status,
    /// Absolute tolerance used when checking the entry numerically.
    pub tolerance: f64,
    pub derived_from: Option<Derivation>,
}

pub const CATALOG_KEYS: [&str; 13] = [
    "smyth2", "smyth3", "condon", "l21", "eq2", "eq4", "eq5", "zeta5_93", "zeta5_93a", "zeta5_93b", "l21_2", "l21_3",
    "l21_4",
];

/// The thirteen identities, with their right-hand sides and provenance.
pub fn identity_catalog() -> Vec<IdentityRecord> {
    use Status::*;
    let d = |base, variable, g, k| Some(Derivation { base, variable, g, k });
    let rows: [(&str, &str, &str, Status, f64, Option<Derivation>); 13] = [
        ("smyth2", "x+y+1", "smyth2", Proven, 1e-7, None),
        ("smyth3", "x+y+z+1", "smyth3", Proven, 5e-5, None),
        ("condon", "x+1+(x-1)*(y+z)", "condon", Proven, 5e-4, None),
        ("l21", "1+(x-1)*y+(x+1)*z", "l21_conjecture_rhs", Conjectural, 1e-4, None),
        ("eq2", "x^2+x+1+(x^2-1)*(y+z)", "condon", Proven, 5e-4, d("condon", "x", "x+2", 2)),
        (
            "eq4",
            "x^4-x^3+x^2-x+1+(x^4-x^3+x-1)*(y+z)",
            "condon",
            Proven,
            5e-4,
            d("condon", "x", "x^2-2*x+2", 4),
        ),
        ("eq5", "x^5+x^4+x+1+(x^5-1)*(y+z)", "condon", Proven, 5e-4, d("condon", "x", "x^4+x+2", 5)),
        (
            "zeta5_93",
            "(x^2+x+1)*(1+w)*(1+u)*z+(x^2-1)*(1-w)*(1+y)",
            "zeta5_93",
            Proven,
            2e-3,
            d("S_2", "x1", "x+2", 2),
        ),
        (
            "zeta5_93a",
            "(x^4-x^3+x^2-x+1)*(1+w)*(1+u)*z+(x^4-x^3+x-1)*(1-w)*(1+y)",
            "zeta5_93",
            Proven,
            2e-3,
            d("S_2", "x1", "x^2-2*x+2", 4),
        ),
        (
            "zeta5_93b",
            "(x^5+x^4+x+1)*(1+w)*(1+u)*z+(x^5-1)*(1-w)*(1+y)",
            "zeta5_93",
            Proven,
            2e-3,
            d("S_2", "x1", "x^4+x+2", 5),
        ),
        (
            "l21_2",
            "(x+2)/2+(x^2+x+1)*y+(x^2-1)*z",
            "l21_conjecture_rhs",
            Conjectural,
            1e-4,
            d("l21", "x", "x+2", 2),
        ),
        (
            "l21_3",
            "(x^2-2*x+2)/2+(x^4-x^3+x^2-x+1)*y+(x^4-x^3+x-1)*z",
            "l21_conjecture_rhs",
            Conjectural,
            1e-4,
            d("l21", "x", "x^2-2*x+2", 4),
        ),
        (
            "l21_4",
            "(x^4+x+2)/2+(x^5+x^4+x+1)*y+(x^5-1)*z",
            "l21_conjecture_rhs",
            Conjectural,
            1e-4,
            d("l21", "x", "x^4+x+2", 5),
        ),
    ];
    rows.into_iter()
        .map(|(key, expression, rhs, status, tolerance, derived_from)| IdentityRecord {
            key,
            expression,
            lhs: parse(expression).expect("catalogue expressions parse"),
            rhs,
            status,
            tolerance,
            derived_from,
        })
        .collect()
}

pub fn catalog_entry(key: &str) -> Option<IdentityRecord> {
    identity_catalog().into_iter().find(|r| r.key == key)
}

/// Numeric coefficients of a univariate polynomial, for callers that only
/// need the values of `g`.
pub fn g_coefficients(spec: &TransformSpec) -> Result<Vec<Complex64>, TransformError> {
    Ok(univariate_complex_coeffs(&spec.g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &str, g: &str, k: i64) -> TransformSpec {
        TransformSpec::parse(v, g, k, "1").unwrap()
    }

    fn poly(s: &str) -> LaurentPoly {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn validation_examples() {
        let r = validate_spec(&spec("x", "x+2", 2));
        assert!(r.is_valid());
        assert!((r.margin - 1.0).abs() < 1e-14);
        let r = validate_spec(&spec("x", "x+2", 1));
        assert_eq!(r.violations, vec![Violation::KNotAboveDegree { k: 1, degree: 1 }]);
        let r = validate_spec(&spec("x", "2*x+1", 2));
        assert!(matches!(r.violations[..], [Violation::RootInsideDisc { .. }]));
        let r = validate_spec(&spec("x", "x", 2));
        assert!(r.violations.contains(&Violation::VanishingConstantTerm));
        let r = validate_spec(&spec("x", "x+1", 2));
        assert!(r.is_valid() && r.warnings.len() == 1);
        let r = validate_spec(&TransformSpec::new("x", poly("x+y+3"), 2, UnitComplex::one()));
        assert!(matches!(r.violations[..], [Violation::NotUnivariate { .. }]));
        assert!(TransformSpec::parse("x", "x+2", 2, "1+i").is_err());
    }

    #[test]
    fn condon_to_eq2() {
        let p = parse("x+1+(x-1)*(y+z)").unwrap();
        let t = apply_transform(&p, &spec("x", "x+2", 2)).unwrap();
        assert_eq!(t.cleared_numerator, poly("2*(x^2+x+1) + 2*(x^2-1)*(y+z)"));
        assert_eq!(t.ell, 1);
        assert!((t.correction - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.p_tilde.denominator(), &poly("x+2"));
        assert_eq!(t.p_tilde.variables(), ["x", "y", "z"]);
    }

    #[test]
    fn cleared_degree_is_k_times_ell() {
        let p = parse("x^3*y + x + 1").unwrap();
        let t = apply_transform(&p, &spec("x", "x^2-2*x+2", 4)).unwrap();
        assert_eq!(t.cleared_numerator.degree_in("x"), 12);
    }

    #[test]
    fn identity_transform() {
        let p = parse("x").unwrap();
        let t = apply_transform(&p, &spec("x", "1", 1)).unwrap();
        assert_eq!(t.p_tilde, p);
        assert_eq!(t.correction, 0.0);
    }

    #[test]
    fn l21_to_l21_2_shape() {
        let p = parse("1+(x-1)*y+(x+1)*z").unwrap();
        let t = apply_transform(&p, &spec("x", "x+2", 2)).unwrap();
        let display = poly("(x+2)/2+(x^2+x+1)*y+(x^2-1)*z");
        assert_eq!(t.cleared_numerator.rename(&[("y", "z"), ("z", "y")]), display.scale(&2.into()));
    }

    #[test]
    fn laurent_input_is_cleared_first() {
        let p = parse("x^-1 + y").unwrap();
        let t = apply_transform(&p, &spec("x", "x+2", 2)).unwrap();
        assert!(t.cleared_numerator.min_degree_in("x") >= 0);
        let q = parse("x + 1/x").unwrap();
        assert!(apply_transform(&q, &spec("x", "x+3", 3)).is_ok());
    }

    #[test]
    fn errors() {
        let p = parse("y + 1").unwrap();
        assert!(matches!(apply_transform(&p, &spec("x", "x+2", 2)), Err(TransformError::VariableAbsent(_))));
        assert!(matches!(apply_transform(&p, &spec("y", "y+2", 1)), Err(TransformError::Invalid(_))));
    }

    #[test]
    fn univariate_invariance_is_exact() {
        let p = parse("3*x^2 - x + 5").unwrap();
        let r = verify_invariance(&p, &spec("x", "x^2-2*x+2", 4), &QuadConfig::default()).unwrap();
        assert!(r.pass);
        assert!(r.difference < 1e-9);
    }

    #[test]
    fn family_examples() {
        let none = BTreeMap::new();
        let r2 = build_family(Family::R, 2, &none).unwrap();
        let expected = parse("z + (1-x1)*(1-x2)/((1+x1)*(1+x2))").unwrap();
        assert_eq!(r2.numerator, expected.numerator().clone());
        assert_eq!(r2.function.variables(), ["x1", "x2", "z"]);
        assert_eq!(r2.denominator_measure, 0.0);

        let t1 = build_family(Family::T, 1, &none).unwrap();
        assert_eq!(t1.numerator, poly("(1+x1) + (1-x1)*x + 2*x1*y"));
        assert_eq!(t1.function.variables(), ["x1", "x", "y"]);

        let mut specs = BTreeMap::new();
        specs.insert("x1".to_string(), spec("x1", "x+2", 2));
        let s2 = build_family(Family::S, 2, &specs).unwrap();
        assert!((s2.denominator_measure - 2f64.ln()).abs() < 1e-15);
        let renamed = s2.numerator.rename(&[("x1", "x"), ("x2", "w"), ("x", "u")]);
        let display = poly("(x^2+x+1)*(1+w)*(1+u)*z+(x^2-1)*(1-w)*(1+y)");
        let flipped = renamed.rotate("z", &GaussianRational::from_integer(-1));
        assert_eq!(flipped, display.scale(&(-2).into()));
        assert!(build_family(Family::R, 0, &none).is_err());
        let mut bad = BTreeMap::new();
        bad.insert("x9".to_string(), spec("x9", "x+2", 2));
        assert!(build_family(Family::R, 2, &bad).is_err());
    }

    #[test]
    fn substituted_s2_members_match_catalogue() {
        for (key, g, k) in [("zeta5_93", "x+2", 2), ("zeta5_93a", "x^2-2*x+2", 4), ("zeta5_93b", "x^4+x+2", 5)] {
            let mut specs = BTreeMap::new();
            specs.insert("x1".to_string(), spec("x1", g, k));
            let member = build_family(Family::S, 2, &specs).unwrap();
            let got = member
                .numerator
                .rename(&[("x1", "x"), ("x2", "w"), ("x", "u")])
                .rotate("z", &GaussianRational::from_integer(-1));
            let display = catalog_entry(key).unwrap().lhs.numerator().clone();
            assert_eq!(got, display.scale(&(-2).into()), "{key}");
        }
    }

    #[test]
    fn reciprocal_pairs() {
        assert_eq!(reciprocal_pair(&poly("x+1")).1, poly("x+1"));
        assert_eq!(reciprocal_pair(&poly("2*x+1")).1, poly("x+2"));
        assert_eq!(reciprocal_pair(&poly("i*x+1")).1, poly("x - i"));
        // Condon: eliminate z from F = a + b z, F* = c + d z.
        let f = poly("x+1+(x-1)*(y+z)");
        let (_, fs) = reciprocal_pair(&f);
        let split = |p: &LaurentPoly| {
            let c = p.coeffs_in_var("z").unwrap();
            (c[0].clone(), c[1].clone())
        };
        let ((a, b), (c, d)) = (split(&f), split(&fs));
        let res = a.mul(&d).sub(&b.mul(&c)).trim_variables();
        assert_eq!(res, poly("(x+1)*(x*y^2-y^2+x*y+y-x+1)").trim_variables());
        // Applying the construction twice gives back F up to a monomial.
        let (_, back) = reciprocal_pair(&fs);
        assert_eq!(back, f);
    }

    #[test]
    fn catalog_contents() {
        let cat = identity_catalog();
        assert_eq!(cat.len(), 13);
        let keys: Vec<_> = cat.iter().map(|r| r.key).collect();
        assert_eq!(keys, CATALOG_KEYS);
        let eq4 = catalog_entry("eq4").unwrap();
        let d = eq4.derived_from.unwrap();
        assert_eq!((d.g, d.k), ("x^2-2*x+2", 4));
        assert_eq!(catalog_entry("l21").unwrap().status, Status::Conjectural);
        assert_eq!(cat.iter().filter(|r| r.status == Status::Conjectural).count(), 4);
    }

    #[test]
    fn catalog_derivations_reproduce_displays() {
        for rec in identity_catalog() {
            let Some(d) = &rec.derived_from else { continue };
            if d.base == "S_2" {
                continue;
            }
            let base = catalog_entry(d.base).unwrap();
            let t = apply_transform(&base.lhs, &spec(d.variable, d.g, d.k)).unwrap();
            let mut got = t.cleared_numerator;
            if d.base == "l21" {
                got = got.rename(&[("y", "z"), ("z", "y")]);
            }
            assert_eq!(got, rec.lhs.numerator().scale(&2.into()), "{}", rec.key);
        }
    }
}

//! Univariate root finding and one-variable Mahler measures.
//!
//! Roots come from Aberth–Ehrlich simultaneous iteration followed by
//! guarded Newton polishing. Everything else here (Jensen's formula, the
//! location of the roots of `f + beta*g`, the measure of `alpha*f + beta*g`)
//! is built on top of it.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{GaussianRational, LaurentPoly, PolyError, UnitComplex};

/// Tolerance for deciding that a root lies on the unit circle.
pub const TAU_CIRCLE: f64 = 1e-9;
pub const MAX_DEGREE: usize = 500;
pub const MAX_ITER: usize = 1000;
/// Residual bound for isolated roots.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Residual bound for roots closer than [`CLUSTER_DISTANCE`] to another root.
pub const RELAXED_RESIDUAL_TOL: f64 = 1e-7;
pub const CLUSTER_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("root iteration did not converge after {MAX_ITER} iterations (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("g has a root of modulus {modulus} inside the unit disc")]
    RootInsideDisc { modulus: f64 },
    #[error("k = {k} is below deg(g) = {degree}")]
    KBelowDegree { k: i64, degree: i64 },
    #[error("alpha and beta are both zero")]
    BothZero,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// All roots of a univariate polynomial, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub leading_coeff: Complex64,
    /// `max |p(r)| / sum |a_i| |r|^i` over the roots.
    pub residual: f64,
    /// Whether the relaxed bound was needed for clustered roots.
    pub relaxed: bool,
}

impl RootSet {
    /// `log|lead| + sum log+|root|`.
    pub fn jensen(&self) -> f64 {
        self.leading_coeff.norm().ln() + self.roots.iter().map(|r| r.norm().ln().max(0.0)).sum::<f64>()
    }
}

fn horner(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn scale_at(a: &[Complex64], r: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn relative_residual(a: &[Complex64], z: Complex64) -> f64 {
    let s = scale_at(a, z.norm());
    if s == 0.0 {
        0.0
    } else {
        horner(a, z).norm() / s
    }
}

/// Positive root of `|a_n| x^n - sum_{i<n} |a_i| x^i`, an upper bound on the
/// root moduli.
fn cauchy_bound(a: &[Complex64]) -> f64 {
    let n = a.len() - 1;
    let lead = a[n].norm();
    let q = |x: f64| {
        let mut v = lead;
        for c in a[..n].iter().rev() {
            v = v * x - c.norm();
        }
        v
    };
    // q(x)/x^n is increasing; bracket then bisect.
    let mut hi = 1.0f64;
    while q(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if q(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Roots of `sum a_i x^i` (coefficients in ascending order).
pub fn find_roots(coeffs: &[Complex64]) -> Result<RootSet, RootError> {
    let top = coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .ok_or(RootError::ZeroPolynomial)?;
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap();
    if top > MAX_DEGREE {
        return Err(RootError::DegreeTooLarge(top));
    }
    let a = &coeffs[low..=top];
    let lead = a[a.len() - 1];
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let n = a.len() - 1;
    match n {
        0 => {}
        1 => roots.push(-a[0] / a[1]),
        _ => roots.extend(aberth(a)?),
    }
    let mut residual = 0.0f64;
    let mut relaxed = false;
    for (i, r) in roots.iter().enumerate().skip(low) {
        let res = relative_residual(a, *r);
        let clustered = roots
            .iter()
            .enumerate()
            .any(|(j, s)| j != i && (r - s).norm() < CLUSTER_DISTANCE);
        if res > RESIDUAL_TOL {
            if clustered && res <= RELAXED_RESIDUAL_TOL {
                relaxed = true;
            } else {
                return Err(RootError::NoConvergence { residual: res });
            }
        }
        residual = residual.max(res);
    }
    Ok(RootSet {
        roots,
        leading_coeff: lead,
        residual,
        relaxed,
    })
}

fn aberth(a: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let n = a.len() - 1;
    let radius = cauchy_bound(a);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 0.7 + std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_with_derivative(a, z[i]);
            if p.norm() <= 4.0 * eps * scale_at(a, z[i].norm()) {
                done[i] = true;
                continue;
            }
            all_done = false;
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if !step.is_finite() {
                // p'(z) vanished; nudge off the critical point.
                let nudge = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += nudge;
                continue;
            }
            z[i] -= step;
            if step.norm() <= eps * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }
    // Newton polish, accepting a step only if it lowers |p|.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(a, *zi);
            let cand = *zi - p / dp;
            if cand.is_finite() && horner(a, cand).norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    if let Some(worst) = z.iter().map(|r| relative_residual(a, *r)).find(|r| !r.is_finite()) {
        return Err(RootError::NoConvergence { residual: worst });
    }
    Ok(z)
}

/// Ascending binary64 coefficients of a polynomial in at most one variable,
/// after dividing out the lowest power of that variable.
pub fn univariate_complex_coeffs(p: &LaurentPoly) -> Result<Vec<Complex64>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let used = p.used_variables();
    match used.len() {
        0 => Ok(vec![p.constant_value().unwrap().to_complex64()]),
        1 => {
            let v = &used[0];
            let lo = p.min_degree_in(v);
            let hi = p.degree_in(v);
            let idx = p.var_index(v).unwrap();
            let mut out = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize + 1];
            for (e, c) in p.terms() {
                out[(e[idx] - lo) as usize] = c.to_complex64();
            }
            Ok(out)
        }
        _ => Err(RootError::Poly(PolyError::NotUnivariate(used.join(",")))),
    }
}

pub fn find_roots_poly(p: &LaurentPoly) -> Result<RootSet, RootError> {
    find_roots(&univariate_complex_coeffs(p)?)
}

/// `m(p) = log|lead| + sum log+|root|` for univariate `p`.
pub fn jensen_measure_1d(p: &LaurentPoly) -> Result<f64, RootError> {
    jensen_from_coeffs(&univariate_complex_coeffs(p)?)
}

/// Jensen's formula on ascending coefficients. Exact zeros at either end
/// are dropped. Degrees one and two use closed forms; this is the
/// quadrature hot path.
pub fn jensen_from_coeffs(a: &[Complex64]) -> Result<f64, RootError> {
    let zero = Complex64::new(0.0, 0.0);
    let low = a.iter().position(|c| *c != zero).ok_or(RootError::ZeroPolynomial)?;
    let top = a.iter().rposition(|c| *c != zero).unwrap();
    let a = &a[low..=top];
    match a.len() {
        1 => Ok(a[0].norm().ln()),
        2 => Ok(a[0].norm().max(a[1].norm()).ln()),
        3 => {
            let (c, b, lead) = (a[0], a[1], a[2]);
            let disc = (b * b - 4.0 * lead * c).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
            if q == zero {
                // b = c = 0 was stripped above, so this is unreachable in practice.
                return Ok(lead.norm().ln());
            }
            // Roots q/lead and c/q.
            Ok(lead.norm().max(q.norm()).ln() + (c.norm() / q.norm()).ln().max(0.0))
        }
        _ => Ok(find_roots(a)?.jensen()),
    }
}

/// Location of all roots of a polynomial relative to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleLocation {
    AllInside,
    AllOutside,
    AllOn,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleClass {
    pub location: CircleLocation,
    /// Smallest `| |root| - 1 |`.
    pub margin: f64,
    /// Largest `| |root| - 1 |`.
    pub max_deviation: f64,
    pub roots: RootSet,
}

pub fn classify_roots(roots: RootSet) -> CircleClass {
    let (mut inside, mut outside, mut on) = (0usize, 0usize, 0usize);
    let mut margin = f64::INFINITY;
    let mut max_deviation = 0.0f64;
    for r in &roots.roots {
        let d = r.norm() - 1.0;
        margin = margin.min(d.abs());
        max_deviation = max_deviation.max(d.abs());
        if d.abs() <= TAU_CIRCLE {
            on += 1;
        } else if d < 0.0 {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    let total = roots.roots.len();
    let location = if inside == total {
        CircleLocation::AllInside
    } else if outside == total {
        CircleLocation::AllOutside
    } else if on == total {
        CircleLocation::AllOn
    } else {
        CircleLocation::Mixed
    };
    CircleClass {
        location,
        margin,
        max_deviation,
        roots,
    }
}

fn g_coeffs(g: &LaurentPoly) -> Result<Vec<GaussianRational>, RootError> {
    let var = g.used_variables();
    match var.len() {
        0 => Ok(vec![g.constant_value().ok_or(RootError::ZeroPolynomial)?]),
        1 => {
            if g.min_degree_in(&var[0]) < 0 {
                return Err(PolyError::NegativeExponent(var[0].clone()).into());
            }
            Ok(g.univariate_coeffs(&var[0])?)
        }
        _ => Err(PolyError::NotUnivariate(var.join(",")).into()),
    }
}

/// Checks that `g(0) != 0` and that no root of `g` lies inside the disc by
/// more than [`TAU_CIRCLE`]. Returns the smallest root modulus (infinity for
/// constant `g`).
pub fn check_g(g: &LaurentPoly) -> Result<f64, RootError> {
    let gc = g_coeffs(g)?;
    if gc[0].is_zero() {
        return Err(PolyError::VanishingConstantTerm.into());
    }
    let numeric: Vec<Complex64> = gc.iter().map(|c| c.to_complex64()).collect();
    let roots = find_roots(&numeric)?;
    let min = roots.roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
    if min < 1.0 - TAU_CIRCLE {
        return Err(RootError::RootInsideDisc { modulus: min });
    }
    Ok(min)
}

/// Ascending coefficients of `alpha*f + beta*g` with `f = lambda x^k conj(g)(1/x)`.
fn pencil(gc: &[GaussianRational], k: usize, lambda: &UnitComplex, alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    let lam = lambda.value().to_complex64();
    let mut out = vec![Complex64::new(0.0, 0.0); k.max(gc.len() - 1) + 1];
    for (j, c) in gc.iter().enumerate() {
        let cj = c.to_complex64();
        out[k - j] += alpha * lam * cj.conj();
        out[j] += beta * cj;
    }
    out
}

/// Where the roots of `f + beta*g` lie. For admissible `g` they are all
/// inside for `|beta| < 1`, all outside for `|beta| > 1` and all on the
/// circle for `|beta| = 1`; `Mixed` means the numerics disagree with that.
/// `k = deg(g)` is accepted here.
pub fn classify_gamma(g: &LaurentPoly, k: i64, lambda: &UnitComplex, beta: Complex64) -> Result<CircleClass, RootError> {
    let gc = g_coeffs(g)?;
    let degree = gc.len() as i64 - 1;
    if k < degree {
        return Err(RootError::KBelowDegree { k, degree });
    }
    check_g(g)?;
    let coeffs = pencil(&gc, k as usize, lambda, Complex64::new(1.0, 0.0), beta);
    Ok(classify_roots(find_roots(&coeffs)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PencilMeasure {
    /// `m(g) + log max(|alpha|, |beta|)`.
    pub analytic: f64,
    /// Jensen's formula applied to the roots of `alpha*f + beta*g`.
    pub jensen: f64,
    pub discrepancy: f64,
}

/// `m(alpha*f + beta*g)` in closed form, with a numerical cross-check.
pub fn measure_alpha_f_plus_beta_g(
    g: &LaurentPoly,
    k: i64,
    lambda: &UnitComplex,
    alpha: Complex64,
    beta: Complex64,
) -> Result<PencilMeasure, RootError> {
    if alpha == Complex64::new(0.0, 0.0) && beta == Complex64::new(0.0, 0.0) {
        return Err(RootError::BothZero);
    }
    let gc = g_coeffs(g)?;
    let degree = gc.len() as i64 - 1;
    if k <= degree {
        return Err(PolyError::KNotAboveDegree { k, degree }.into());
    }
    check_g(g)?;
    // All roots of g are outside the disc, so m(g) = log|g(0)|.
    let m_g = gc[0].abs_f64().ln();
    let analytic = m_g + alpha.norm().max(beta.norm()).ln();
    let jensen = jensen_from_coeffs(&pencil(&gc, k as usize, lambda, alpha, beta))?;
    Ok(PencilMeasure {
        analytic,
        jensen,
        discrepancy: (analytic - jensen).abs(),
    })
}

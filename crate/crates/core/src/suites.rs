//! Randomised property suites and the catalogue check. Each suite is
//! reproducible from its seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::measure::{measure, verify_identity, MeasureError, QuadConfig};
use crate::poly::{GaussianRational, LaurentPoly, RationalFn, UnitComplex};
use crate::roots::{classify_gamma, measure_alpha_f_plus_beta_g, CircleLocation};
use crate::special::named_constant;
use crate::transform::{identity_catalog, verify_invariance, Status, TransformSpec};

/// Failure details kept per suite.
const MAX_DETAILS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub count: usize,
    pub failures: usize,
    /// Largest observed discrepancy, in whatever unit the suite measures.
    pub max_discrepancy: f64,
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            seed,
            count: 0,
            failures: 0,
            max_discrepancy: 0.0,
            details: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, discrepancy: f64, detail: impl FnOnce() -> String) {
        self.count += 1;
        if discrepancy.is_finite() {
            self.max_discrepancy = self.max_discrepancy.max(discrepancy);
        }
        if !ok {
            self.failures += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn gaussian(re: i64, im: i64, den: i64) -> GaussianRational {
    GaussianRational::from_parts((re, den), (im, den))
}

/// `(p^2 - q^2 + 2pq i)/(p^2 + q^2)` for random small `p, q`, so `|lambda| = 1` exactly.
fn random_unit(rng: &mut ChaCha8Rng) -> UnitComplex {
    let p = rng.random_range(-6i64..=6);
    let q = rng.random_range(-6i64..=6);
    if p == 0 && q == 0 {
        UnitComplex::one()
    } else {
        UnitComplex::pythagorean(p, q)
    }
}

/// A random `g` of the given degree in `var` with Gaussian-rational roots of
/// modulus at least `min_modulus` and a random Gaussian-integer leading
/// coefficient.
pub fn random_admissible_g(rng: &mut ChaCha8Rng, var: &str, degree: usize, min_modulus: f64) -> LaurentPoly {
    let lead = loop {
        let (a, b) = (rng.random_range(-3i64..=3), rng.random_range(-3i64..=3));
        if a != 0 || b != 0 {
            break gaussian(a, b, 1);
        }
    };
    let x = LaurentPoly::var(var);
    let mut g = LaurentPoly::constant(lead);
    for _ in 0..degree {
        let root = loop {
            let den = rng.random_range(1i64..=4);
            let (a, b) = (rng.random_range(-12i64..=12), rng.random_range(-12i64..=12));
            let modulus = ((a * a + b * b) as f64).sqrt() / den as f64;
            if modulus >= min_modulus && modulus <= 6.0 {
                break gaussian(a, b, den);
            }
        };
        g = g.mul(&x.sub(&LaurentPoly::constant(root)));
    }
    g
}

fn random_complex(rng: &mut ChaCha8Rng, modulus: f64) -> Complex64 {
    Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Root location of `f + beta*g`: `count` random admissible instances with
/// `|beta|` at least `gap` away from 1 must classify as all inside or all
/// outside (as `|beta|` is below or above 1), and `exact_unit` instances with
/// `|beta| = 1` exactly must have every root within `tol` of the circle.
pub fn root_location(count: usize, exact_unit: usize, seed: u64, gap: f64, tol: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("roots-lemma", seed);
    for i in 0..count + exact_unit {
        let degree = rng.random_range(1usize..=5);
        let g = random_admissible_g(&mut rng, "x", degree, 1.0 + 1e-2);
        let k = (degree + rng.random_range(0usize..=4)) as i64;
        let lambda = random_unit(&mut rng);
        if i < count {
            let below = rng.random_bool(0.5);
            let modulus = if below {
                rng.random_range(0.02..1.0 - gap)
            } else {
                rng.random_range(1.0 + gap..50.0)
            };
            let beta = random_complex(&mut rng, modulus);
            let expected = if below { CircleLocation::AllInside } else { CircleLocation::AllOutside };
            match classify_gamma(&g, k, &lambda, beta) {
                // Only the on-circle cases contribute a deviation.
                Ok(c) => report.record(c.location == expected, f64::NAN, || {
                    format!("g = {g}, k = {k}, lambda = {lambda}, beta = {beta}: {:?}, expected {expected:?}", c.location)
                }),
                Err(e) => report.record(false, f64::NAN, || format!("g = {g}, k = {k}: {e}")),
            }
        } else {
            let beta = UnitComplex::pythagorean(rng.random_range(1i64..=9), rng.random_range(-9i64..=9));
            let beta = beta.value().to_complex64();
            match classify_gamma(&g, k, &lambda, beta) {
                Ok(c) => report.record(c.max_deviation <= tol, c.max_deviation, || {
                    format!("g = {g}, k = {k}, beta = {beta}: root off the circle by {:.3e}", c.max_deviation)
                }),
                Err(e) => report.record(false, f64::NAN, || format!("g = {g}, k = {k}: {e}")),
            }
        }
    }
    report
}

/// `m(alpha*f + beta*g) = m(g) + log max(|alpha|, |beta|)` for `k > deg g`,
/// checked against Jensen's formula on the numerically computed roots.
pub fn pencil(count: usize, seed: u64, tol: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("pencil", seed);
    for _ in 0..count {
        let degree = rng.random_range(0usize..=5);
        let g = random_admissible_g(&mut rng, "x", degree, 1.0);
        let k = (degree + rng.random_range(1usize..=4)) as i64;
        let lambda = random_unit(&mut rng);
        let draw = |rng: &mut ChaCha8Rng| match rng.random_range(0..8) {
            0 => Complex64::new(0.0, 0.0),
            _ => {
                let modulus = rng.random_range(0.05..20.0);
                random_complex(rng, modulus)
            }
        };
        let (mut alpha, beta) = (draw(&mut rng), draw(&mut rng));
        if alpha.norm() == 0.0 && beta.norm() == 0.0 {
            alpha = Complex64::new(1.0, 0.0);
        }
        match measure_alpha_f_plus_beta_g(&g, k, &lambda, alpha, beta) {
            Ok(m) => report.record(m.discrepancy <= tol, m.discrepancy, || {
                format!(
                    "g = {g}, k = {k}, alpha = {alpha}, beta = {beta}: analytic {} vs Jensen {}",
                    m.analytic, m.jensen
                )
            }),
            Err(e) => report.record(false, f64::NAN, || format!("g = {g}, k = {k}: {e}")),
        }
    }
    report
}

/// A random polynomial in `x, y` of total degree at most `degree` with
/// integer coefficients in `-3..=3`, involving both variables.
pub fn random_bivariate(rng: &mut ChaCha8Rng, degree: i64) -> LaurentPoly {
    let vars = vec!["x".to_string(), "y".to_string()];
    loop {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                let c = rng.random_range(-3i64..=3);
                if c != 0 {
                    terms.push((vec![a, b], GaussianRational::from_integer(c)));
                }
            }
        }
        let p = LaurentPoly::from_terms(vars.clone(), terms);
        if p.occurs("x") && p.occurs("y") {
            return p;
        }
    }
}

/// `m(P) = m(P~)` for random bivariate `P` and random admissible
/// substitutions, each side measured with its own seed.
pub fn invariance(count: usize, seed: u64, cfg: &QuadConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("invariance", seed);
    for i in 0..count {
        let p = random_bivariate(&mut rng, 3);
        let var = if rng.random_bool(0.5) { "x" } else { "y" };
        let degree = rng.random_range(0usize..=2);
        let g = random_admissible_g(&mut rng, var, degree, 1.1);
        let k = rng.random_range(degree as i64 + 1..=4);
        let spec = TransformSpec::new(var, g, k, random_unit(&mut rng));
        let cfg = QuadConfig {
            seed: cfg.seed.wrapping_add(2 * i as u64),
            ..cfg.clone()
        };
        match verify_invariance(&RationalFn::from_poly(p.clone()), &spec, &cfg) {
            Ok(r) => report.record(r.pass, r.difference, || {
                format!(
                    "P = {p}, {spec}: {} vs {} (|diff| {:.3e} > {:.3e})",
                    r.original.value, r.transformed_value, r.difference, r.threshold
                )
            }),
            Err(e) => report.record(false, f64::NAN, || format!("P = {p}, {spec}: {e}")),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntryReport {
    pub key: String,
    pub expression: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub stderr: Option<f64>,
    /// `None` for conjectural entries without a supplied value.
    pub rhs: Option<f64>,
    pub difference: Option<f64>,
    pub threshold: Option<f64>,
    /// Only proven entries count towards the suite result.
    pub pass: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogReport {
    pub entries: Vec<CatalogEntryReport>,
    pub failures: usize,
    /// Largest pairwise gap between the conjectural entries, which must
    /// agree with each other whatever their common value is.
    pub conjectural_spread: Option<f64>,
    pub conjectural_threshold: Option<f64>,
    pub conjectural_consistent: Option<bool>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.conjectural_consistent != Some(false)
    }
}

/// Measures every catalogue entry. Proven entries are checked against their
/// constant; conjectural ones are compared to `conjectural_rhs` when given
/// and checked for mutual consistency.
pub fn catalog(cfg: &QuadConfig, conjectural_rhs: Option<f64>) -> CatalogReport {
    let mut entries = Vec::new();
    let mut failures = 0;
    let mut conj: Vec<(f64, f64)> = Vec::new();
    for rec in identity_catalog() {
        let rhs = match rec.status {
            Status::Proven => named_constant(rec.rhs, None).ok().map(|c| c.value),
            Status::Conjectural => conjectural_rhs,
        };
        let mut entry = CatalogEntryReport {
            key: rec.key.to_string(),
            expression: rec.expression.to_string(),
            status: rec.status,
            measured: None,
            stderr: None,
            rhs,
            difference: None,
            threshold: None,
            pass: None,
            error: None,
        };
        let outcome: Result<(), MeasureError> = (|| {
            match rhs {
                Some(v) => {
                    let c = verify_identity(&rec.lhs, v, rec.tolerance, cfg)?;
                    entry.measured = Some(c.measured.value);
                    entry.stderr = Some(c.measured.stderr);
                    entry.difference = Some(c.difference);
                    entry.threshold = Some(c.threshold);
                    if rec.status == Status::Proven {
                        entry.pass = Some(c.pass);
                    }
                }
                None => {
                    let m = measure(&rec.lhs, cfg)?;
                    entry.measured = Some(m.value);
                    entry.stderr = Some(m.stderr);
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            entry.error = Some(e.to_string());
            if rec.status == Status::Proven {
                entry.pass = Some(false);
            }
        }
        if entry.pass == Some(false) {
            failures += 1;
        }
        if rec.status == Status::Conjectural {
            if let (Some(v), Some(s)) = (entry.measured, entry.stderr) {
                conj.push((v, s));
            }
        }
        entries.push(entry);
    }
    let (mut spread, mut threshold, mut consistent) = (None, None, None);
    if conj.len() >= 2 {
        let mut worst = (0.0f64, 0.0f64, true);
        for (i, a) in conj.iter().enumerate() {
            for b in &conj[i + 1..] {
                let d = (a.0 - b.0).abs();
                // The same floor as the per-entry tolerance of the conjectural rows.
                let t = (3.0 * (a.1 + b.1)).max(1e-9);
                if d > worst.0 {
                    worst.0 = d;
                    worst.1 = t;
                }
                worst.2 &= d <= t;
            }
        }
        spread = Some(worst.0);
        threshold = Some(worst.1);
        consistent = Some(worst.2);
    }
    CatalogReport {
        entries,
        failures,
        conjectural_spread: spread,
        conjectural_threshold: threshold,
        conjectural_consistent: consistent,
    }
}

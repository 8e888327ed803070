//! Numerical Mahler measures over the torus.
//!
//! Two integrands are available. The direct one averages `log|P|` over torus
//! nodes. The Jensen-reduced one picks a reduction variable `r`, and at each
//! node of the remaining variables evaluates the one-variable measure of the
//! specialisation in `r` by Jensen's formula. That integrand is continuous
//! (only kinked), which makes it far better suited to quadrature.
//!
//! Rules: an offset tensor trapezoid rule when at most two dimensions remain,
//! a randomly shifted rank-1 lattice otherwise (or always, for
//! [`Method::LatticeQmc`]).

mod exec;
mod integrand;
mod lattice;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exec::Execution;
use exec::{sum_nodes, NodeSum};
use integrand::{Compiled, Scratch};

use crate::poly::{LaurentPoly, RationalFn};
use crate::roots::{jensen_measure_1d, RootError};

pub const DEFAULT_NODES_1D: usize = 16_384;
pub const DEFAULT_NODES_2D: usize = 1024;
pub const DEFAULT_TOTAL_NODES: usize = 1 << 17;
pub const DEFAULT_SHIFTS: usize = 10;
/// Skipped-node fraction above which a degeneracy warning is attached.
pub const SKIP_WARNING_FRACTION: f64 = 1e-3;
/// Largest tensor grid accepted.
const MAX_TENSOR_NODES: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("the zero function has no Mahler measure")]
    ZeroFunction,
    #[error("all {0} quadrature nodes were skipped")]
    AllNodesSkipped(u64),
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("reduction variable `{0}` does not occur in the function")]
    ReductionVariableAbsent(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    JensenReduced,
    Direct,
    LatticeQmc,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jensen" | "jensen_reduced" => Ok(Method::JensenReduced),
            "direct" => Ok(Method::Direct),
            "qmc" | "lattice_qmc" => Ok(Method::LatticeQmc),
            _ => Err(format!("unknown method `{s}` (expected jensen, direct or qmc)")),
        }
    }
}

/// The cubature actually used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// Closed form: a constant, or Jensen's formula in one variable.
    Exact,
    Tensor { dims: usize, nodes_per_dim: usize },
    Lattice { dims: usize, points: usize, shifts: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub method: Method,
    /// Tensor nodes per dimension; defaults to 16384 in one dimension and
    /// 1024 in two.
    pub nodes_per_dim: Option<usize>,
    /// Lattice size; rounded down to a prime.
    pub total_nodes: usize,
    pub shifts: usize,
    pub seed: u64,
    /// `None` picks the variable of least degree (first one on ties).
    pub reduction_variable: Option<String>,
    /// Pole/degeneracy threshold relative to the largest coefficient.
    pub pole_epsilon_rel: f64,
    pub execution: Execution,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            method: Method::JensenReduced,
            nodes_per_dim: None,
            total_nodes: DEFAULT_TOTAL_NODES,
            shifts: DEFAULT_SHIFTS,
            seed: 0,
            reduction_variable: None,
            pole_epsilon_rel: 1e-14,
            execution: Execution::default(),
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<(), MeasureError> {
        let bad = |m: String| Err(MeasureError::InvalidConfig(m));
        if let Some(n) = self.nodes_per_dim {
            if n < 8 || n % 4 != 0 {
                return bad(format!("nodes per dimension must be a multiple of 4 and at least 8, got {n}"));
            }
        }
        if self.shifts < 2 {
            return bad(format!("at least 2 random shifts are needed, got {}", self.shifts));
        }
        if self.total_nodes < 5 {
            return bad(format!("lattice size must be at least 5, got {}", self.total_nodes));
        }
        if !(self.pole_epsilon_rel >= 0.0 && self.pole_epsilon_rel < 1.0) {
            return bad(format!("pole epsilon must lie in [0, 1), got {}", self.pole_epsilon_rel));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Mahler measure in nats.
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
    pub rule: Rule,
    /// Rule used for the denominator when it is measured on its own.
    pub denominator_rule: Option<Rule>,
    pub nodes_used: u64,
    pub nodes_skipped: u64,
    pub seed: u64,
    pub reduction_variable: Option<String>,
    pub warnings: Vec<String>,
}

/// Standard error of the mean of `R >= 2` shift averages.
pub fn estimate_error(partials: &[f64]) -> f64 {
    let r = partials.len();
    if r < 2 {
        return 0.0;
    }
    let mean = partials.iter().sum::<f64>() / r as f64;
    let var = partials.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (var / r as f64).sqrt()
}

/// Error estimate of a tensor rule from the grids with `N`, `N/2` and
/// `N/4` points per dimension. Kinks in the integrand make the convergence
/// oscillate, so the larger of the two refinement differences is used.
pub fn refinement_error(fine: f64, coarse: f64, coarsest: f64) -> f64 {
    (fine - coarse)
        .abs()
        .max((coarse - coarsest).abs())
        .max(1e-14 * fine.abs().max(1.0))
}

struct Estimate {
    value: f64,
    stderr: f64,
    used: u64,
    skipped: u64,
    rule: Rule,
}

enum RuleChoice {
    Tensor(usize),
    Lattice(usize, usize),
}

fn choose_rule(dims: usize, cfg: &QuadConfig, force_lattice: bool) -> RuleChoice {
    if force_lattice || dims >= 3 {
        RuleChoice::Lattice(lattice::prime_at_most(cfg.total_nodes), cfg.shifts)
    } else {
        let default = if dims == 1 { DEFAULT_NODES_1D } else { DEFAULT_NODES_2D };
        RuleChoice::Tensor(cfg.nodes_per_dim.unwrap_or(default))
    }
}

struct NodeScratch {
    parts: Vec<Scratch>,
    angles: Vec<f64>,
}

/// Integrates `node(scratch, angles)` over the `dims`-torus (angles in
/// radians, measure normalised to one).
fn integrate<F>(
    dims: usize,
    compiled: &[&Compiled],
    cfg: &QuadConfig,
    force_lattice: bool,
    node: F,
) -> Result<Estimate, MeasureError>
where
    F: Fn(&mut [Scratch], &[f64]) -> Option<f64> + Sync,
{
    let init = || NodeScratch {
        parts: compiled.iter().map(|c| c.scratch()).collect(),
        angles: vec![0.0; dims],
    };
    let average = |s: NodeSum| -> Result<f64, MeasureError> {
        if s.used == 0 {
            Err(MeasureError::AllNodesSkipped(s.skipped))
        } else {
            Ok(s.sum / s.used as f64)
        }
    };
    match choose_rule(dims, cfg, force_lattice) {
        RuleChoice::Tensor(n) => {
            let count = n
                .checked_pow(dims as u32)
                .filter(|&c| c <= MAX_TENSOR_NODES)
                .ok_or_else(|| MeasureError::InvalidConfig(format!("tensor grid {n}^{dims} is too large")))?;
            let grid = |n: usize, count: usize| {
                sum_nodes(count, cfg.execution, init, |s: &mut NodeScratch, mut i: usize| {
                    for j in (0..dims).rev() {
                        s.angles[j] = TAU * ((i % n) as f64 + 0.5) / n as f64;
                        i /= n;
                    }
                    node(&mut s.parts, &s.angles)
                })
            };
            let fine = grid(n, count);
            let coarse = grid(n / 2, count >> dims);
            let coarsest = grid(n / 4, count >> (2 * dims));
            let value = average(fine)?;
            let stderr = refinement_error(value, average(coarse)?, average(coarsest)?);
            Ok(Estimate {
                value,
                stderr,
                used: fine.used + coarse.used + coarsest.used,
                skipped: fine.skipped + coarse.skipped + coarsest.skipped,
                rule: Rule::Tensor { dims, nodes_per_dim: n },
            })
        }
        RuleChoice::Lattice(n, shifts) => {
            let z = lattice::generating_vector(n, dims);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut partials = Vec::with_capacity(shifts);
            let (mut used, mut skipped) = (0, 0);
            for _ in 0..shifts {
                let delta: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
                let s = sum_nodes(n, cfg.execution, init, |s: &mut NodeScratch, i: usize| {
                    for j in 0..dims {
                        let mut x = ((i as u64 * z[j] as u64) % n as u64) as f64 / n as f64 + delta[j];
                        if x >= 1.0 {
                            x -= 1.0;
                        }
                        s.angles[j] = TAU * x;
                    }
                    node(&mut s.parts, &s.angles)
                });
                partials.push(average(s)?);
                used += s.used;
                skipped += s.skipped;
            }
            Ok(Estimate {
                value: exec::pairwise(&partials) / shifts as f64,
                stderr: estimate_error(&partials),
                used,
                skipped,
                rule: Rule::Lattice { dims, points: n, shifts },
            })
        }
    }
}

/// Variable of least degree span among `candidates`, first one on ties.
fn auto_reduction_variable(p: &LaurentPoly, candidates: &[String]) -> String {
    candidates
        .iter()
        .min_by_key(|v| p.degree_in(v) - p.min_degree_in(v))
        .cloned()
        .expect("at least one candidate")
}

struct Part {
    value: f64,
    stderr: f64,
    used: u64,
    skipped: u64,
    rule: Rule,
    reduction_variable: Option<String>,
}

fn exact(value: f64, reduction_variable: Option<String>) -> Part {
    Part {
        value,
        stderr: 0.0,
        used: 0,
        skipped: 0,
        rule: Rule::Exact,
        reduction_variable,
    }
}

/// Jensen-reduced measure of one polynomial. `preferred` is used when it
/// occurs in `p`.
fn jensen_part(p: &LaurentPoly, cfg: &QuadConfig, preferred: Option<&str>, force_lattice: bool) -> Result<Part, MeasureError> {
    if p.is_zero() {
        return Err(MeasureError::ZeroFunction);
    }
    let used = p.used_variables();
    if used.is_empty() {
        return Ok(exact(p.constant_value().unwrap().abs_f64().ln(), None));
    }
    let r = match preferred {
        Some(v) if used.iter().any(|u| u == v) => v.to_string(),
        _ => auto_reduction_variable(p, &used),
    };
    let dims: Vec<String> = used.iter().filter(|v| **v != r).cloned().collect();
    if dims.is_empty() {
        return Ok(exact(jensen_measure_1d(p)?, Some(r)));
    }
    let compiled = Compiled::new(p, &dims, Some(&r), cfg.pole_epsilon_rel);
    let est = integrate(dims.len(), &[&compiled], cfg, force_lattice, |s, a| compiled.jensen(&mut s[0], a))?;
    Ok(Part {
        value: est.value,
        stderr: est.stderr,
        used: est.used,
        skipped: est.skipped,
        rule: est.rule,
        reduction_variable: Some(r),
    })
}

fn finish(
    num: Part,
    den: Option<Part>,
    cfg: &QuadConfig,
) -> MeasureResult {
    let (mut value, mut stderr, mut used, mut skipped) = (num.value, num.stderr, num.used, num.skipped);
    let mut denominator_rule = None;
    if let Some(d) = den {
        value -= d.value;
        stderr += d.stderr;
        used += d.used;
        skipped += d.skipped;
        denominator_rule = Some(d.rule);
    }
    let mut warnings = Vec::new();
    if skipped as f64 > SKIP_WARNING_FRACTION * used.max(1) as f64 {
        warnings.push(format!(
            "degenerate integrand: {skipped} of {} nodes skipped (poles or vanishing specialisations)",
            used + skipped
        ));
    }
    MeasureResult {
        value,
        stderr,
        method: cfg.method,
        rule: num.rule,
        denominator_rule,
        nodes_used: used,
        nodes_skipped: skipped,
        seed: cfg.seed,
        reduction_variable: num.reduction_variable,
        warnings,
    }
}

fn check_reduction_variable(f: &RationalFn, cfg: &QuadConfig) -> Result<(), MeasureError> {
    match &cfg.reduction_variable {
        Some(v) if !f.used_variables().contains(v) => Err(MeasureError::ReductionVariableAbsent(v.clone())),
        _ => Ok(()),
    }
}

/// Jensen-reduced measure. Numerator and denominator are measured on their
/// own (each with its own reduction variable unless one is configured and
/// occurs in it) and the results subtracted.
pub fn measure_jensen_reduced(f: &RationalFn, cfg: &QuadConfig) -> Result<MeasureResult, MeasureError> {
    measure_reduced(f, cfg, false)
}

fn measure_reduced(f: &RationalFn, cfg: &QuadConfig, force_lattice: bool) -> Result<MeasureResult, MeasureError> {
    cfg.validate()?;
    if f.is_zero() {
        return Err(MeasureError::ZeroFunction);
    }
    check_reduction_variable(f, cfg)?;
    let pref = cfg.reduction_variable.as_deref();
    let num = jensen_part(f.numerator(), cfg, pref, force_lattice)?;
    let den = if f.is_polynomial() {
        None
    } else {
        Some(jensen_part(f.denominator(), cfg, pref, force_lattice)?)
    };
    Ok(finish(num, den, cfg))
}

/// Average of `log|num| - log|den|` over torus nodes.
pub fn measure_direct(f: &RationalFn, cfg: &QuadConfig) -> Result<MeasureResult, MeasureError> {
    cfg.validate()?;
    if f.is_zero() {
        return Err(MeasureError::ZeroFunction);
    }
    let dims = f.used_variables();
    if dims.is_empty() {
        let c = f.numerator().constant_value().unwrap();
        return Ok(finish(exact(c.abs_f64().ln(), None), None, cfg));
    }
    let num = Compiled::new(f.numerator(), &dims, None, cfg.pole_epsilon_rel);
    let den = Compiled::new(f.denominator(), &dims, None, cfg.pole_epsilon_rel);
    let est = integrate(dims.len(), &[&num, &den], cfg, false, |s, a| {
        let (sn, sd) = s.split_at_mut(1);
        Some(num.log_abs(&mut sn[0], a)? - den.log_abs(&mut sd[0], a)?)
    })?;
    let part = Part {
        value: est.value,
        stderr: est.stderr,
        used: est.used,
        skipped: est.skipped,
        rule: est.rule,
        reduction_variable: None,
    };
    Ok(finish(part, None, cfg))
}

/// Dispatches on `cfg.method`.
pub fn measure(f: &RationalFn, cfg: &QuadConfig) -> Result<MeasureResult, MeasureError> {
    match cfg.method {
        Method::JensenReduced => measure_jensen_reduced(f, cfg),
        Method::Direct => measure_direct(f, cfg),
        Method::LatticeQmc => measure_reduced(f, cfg, true),
    }
}

pub fn measure_poly(p: &LaurentPoly, cfg: &QuadConfig) -> Result<MeasureResult, MeasureError> {
    measure(&RationalFn::from_poly(p.clone()), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub measured: MeasureResult,
    pub rhs: f64,
    pub difference: f64,
    /// `max(3 * stderr, abs_tol)`.
    pub threshold: f64,
    pub pass: bool,
}

/// Compares `m(lhs)` with a known value.
pub fn verify_identity(lhs: &RationalFn, rhs: f64, abs_tol: f64, cfg: &QuadConfig) -> Result<IdentityCheck, MeasureError> {
    if !rhs.is_finite() {
        return Err(MeasureError::InvalidConfig(format!("right-hand side {rhs} is not finite")));
    }
    let measured = measure(lhs, cfg)?;
    let difference = (measured.value - rhs).abs();
    let threshold = (3.0 * measured.stderr).max(abs_tol);
    Ok(IdentityCheck {
        pass: difference <= threshold,
        measured,
        rhs,
        difference,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::special::named_constant;

    fn m(src: &str, cfg: &QuadConfig) -> MeasureResult {
        measure(&parse(src).unwrap(), cfg).unwrap()
    }

    #[test]
    fn constants_are_exact_for_every_method() {
        for method in [Method::JensenReduced, Method::Direct, Method::LatticeQmc] {
            let cfg = QuadConfig { method, ..Default::default() };
            let r = m("5", &cfg);
            assert_eq!(r.value, 5f64.ln());
            assert_eq!(r.stderr, 0.0);
            assert_eq!(r.rule, Rule::Exact);
        }
    }

    #[test]
    fn univariate_jensen_is_exact() {
        let r = m("x + 2", &QuadConfig::default());
        assert_eq!(r.rule, Rule::Exact);
        assert!((r.value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn cyclotomic_direct_is_near_zero() {
        let cfg = QuadConfig { method: Method::Direct, ..Default::default() };
        let r = m("x + 1", &cfg);
        assert!(r.value.abs() <= 3.0 * r.stderr + 1e-12, "{r:?}");
        assert!(r.value.abs() < 1e-3);
    }

    #[test]
    fn smyth_two_variables() {
        let target = named_constant("smyth2", None).unwrap().value;
        let cfg = QuadConfig {
            reduction_variable: Some("x".into()),
            ..Default::default()
        };
        let r = m("x + y + 1", &cfg);
        assert_eq!(r.rule, Rule::Tensor { dims: 1, nodes_per_dim: 16_384 });
        assert!((r.value - target).abs() < 1e-8, "{} vs {target}", r.value);
        let d = m("x + y + 1", &QuadConfig { method: Method::Direct, ..Default::default() });
        assert!((d.value - target).abs() < 3.0 * d.stderr + 1e-4, "{d:?}");
    }

    #[test]
    fn rational_function_of_cyclotomics_is_zero() {
        let r = m("(1-x)/(1+x)", &QuadConfig::default());
        assert!(r.value.abs() < 1e-15);
        assert!(r.denominator_rule.is_some());
    }

    #[test]
    fn lattice_rule_is_used_for_three_dimensions() {
        let cfg = QuadConfig {
            total_nodes: 20_000,
            ..Default::default()
        };
        let r = m("x + y + z + w + 1", &cfg);
        assert!(matches!(r.rule, Rule::Lattice { dims: 3, points: 19_997, shifts: 10 }));
        assert!(r.stderr > 0.0 && r.stderr < 1e-2);
    }

    #[test]
    fn qmc_method_forces_lattice() {
        let cfg = QuadConfig {
            method: Method::LatticeQmc,
            total_nodes: 5000,
            ..Default::default()
        };
        let r = m("x + y + 1", &cfg);
        assert!(matches!(r.rule, Rule::Lattice { dims: 1, .. }));
        let target = named_constant("smyth2", None).unwrap().value;
        assert!((r.value - target).abs() < 1e-4);
    }

    #[test]
    fn sequential_and_parallel_are_bit_identical() {
        for method in [Method::JensenReduced, Method::Direct] {
            let base = QuadConfig {
                method,
                nodes_per_dim: Some(64),
                ..Default::default()
            };
            let seq = QuadConfig {
                execution: Execution::Sequential,
                ..base.clone()
            };
            let a = m("x + 1 + (x - 1)*(y + z)", &base);
            let b = m("x + 1 + (x - 1)*(y + z)", &seq);
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        }
    }

    #[test]
    fn estimate_error_examples() {
        assert_eq!(estimate_error(&[0.3, 0.3, 0.3]), 0.0);
        assert!((estimate_error(&[0.0, 1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn configuration_errors() {
        let f = parse("x + y + 1").unwrap();
        let bad = QuadConfig { nodes_per_dim: Some(7), ..Default::default() };
        assert!(matches!(measure(&f, &bad), Err(MeasureError::InvalidConfig(_))));
        let bad = QuadConfig { shifts: 1, ..Default::default() };
        assert!(matches!(measure(&f, &bad), Err(MeasureError::InvalidConfig(_))));
        let bad = QuadConfig { reduction_variable: Some("q".into()), ..Default::default() };
        assert!(matches!(measure(&f, &bad), Err(MeasureError::ReductionVariableAbsent(_))));
        assert!(matches!(measure(&parse("0").unwrap(), &QuadConfig::default()), Err(MeasureError::ZeroFunction)));
    }

    #[test]
    fn auto_reduction_picks_least_degree() {
        let r = m("x^3 + y + z^2 + 1", &QuadConfig { nodes_per_dim: Some(16), ..Default::default() });
        assert_eq!(r.reduction_variable.as_deref(), Some("y"));
        let r = m("x + y + 1", &QuadConfig::default());
        assert_eq!(r.reduction_variable.as_deref(), Some("x"));
    }

    #[test]
    fn verify_identity_report() {
        let target = named_constant("smyth2", None).unwrap().value;
        let f = parse("x + y + 1").unwrap();
        let ok = verify_identity(&f, target, 1e-7, &QuadConfig::default()).unwrap();
        assert!(ok.pass);
        let bad = verify_identity(&f, target + 1e-3, 1e-7, &QuadConfig::default()).unwrap();
        assert!(!bad.pass);
    }
}

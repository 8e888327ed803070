use std::collections::BTreeMap;

use mahler_core::expr::{parse, print};
use mahler_core::measure::{measure, verify_identity, QuadConfig};
use mahler_core::special::{closed_form, named_constant, Family};
use mahler_core::suites;
use mahler_core::transform::{
    apply_transform, build_family, catalog_entry, identity_catalog, verify_invariance, Status, TransformSpec,
};
use serde_json::json;

use crate::report::{fmt_value, to_value, CliError, Outcome};
use crate::SpecArgs;

pub fn measure_cmd(expr: &str, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    let f = parse(expr)?;
    let r = measure(&f, cfg)?;
    let mut o = Outcome::new("measure", json!({ "expression": expr, "parsed": print(&f) }), to_value(&r));
    o.row("expression", print(&f))
        .row("m", fmt_value(r.value, r.stderr))
        .row("method", format!("{:?}", r.method))
        .row("rule", rule_text(&to_value(&r.rule)))
        .row("nodes used", r.nodes_used)
        .row("nodes skipped", r.nodes_skipped)
        .row("reduction var", r.reduction_variable.as_deref().unwrap_or("-"));
    o.warnings = r.warnings.clone();
    Ok(o)
}

fn rule_text(v: &serde_json::Value) -> String {
    v.as_object()
        .map(|m| {
            m.iter()
                .map(|(k, v)| format!("{k}={}", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
}

fn spec_from(args: &SpecArgs) -> Result<Option<TransformSpec>, CliError> {
    match (&args.var, &args.g, args.k) {
        (None, None, None) => Ok(None),
        (Some(v), Some(g), Some(k)) => Ok(Some(TransformSpec::parse(v, g, k, &args.lambda)?)),
        _ => Err(CliError::Usage("--var, --g and --k must be given together".into())),
    }
}

pub fn transform_cmd(expr: &str, spec_args: &SpecArgs, check: bool, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    let f = parse(expr)?;
    let spec = spec_from(spec_args)?.ok_or_else(|| CliError::Usage("transform needs --var, --g and --k".into()))?;
    let t = apply_transform(&f, &spec)?;
    let mut results = json!({
        "p_tilde": print(&t.p_tilde),
        "f": t.f.to_string(),
        "cleared_numerator": t.cleared_numerator.to_string(),
        "cleared_denominator": t.cleared_denominator.to_string(),
        "numerator_power": t.numerator_power,
        "denominator_power": t.denominator_power,
        "ell": t.ell,
        "measure_g": t.measure_g,
        "correction": t.correction,
    });
    let inputs = json!({
        "expression": expr,
        "variable": spec.variable,
        "g": spec.g.to_string(),
        "k": spec.k,
        "lambda": spec.lambda.to_string(),
    });
    let mut o = Outcome::new("transform", inputs, serde_json::Value::Null);
    o.row("expression", print(&f))
        .row("substitution", spec.to_string())
        .row("f", &t.f)
        .row("P~", print(&t.p_tilde))
        .row("cleared numerator", &t.cleared_numerator)
        .row("cleared denominator", &t.cleared_denominator)
        .row("ell", t.ell)
        .row("m(g)", format!("{:.12}", t.measure_g))
        .row("correction", format!("{:.12}", t.correction));
    o.warnings = t.warnings.clone();
    if check {
        let r = verify_invariance(&f, &spec, cfg)?;
        o.row("m(P)", fmt_value(r.original.value, r.original.stderr))
            .row("m(P~)", fmt_value(r.transformed_value, r.transformed_stderr))
            .row("|difference|", format!("{:.3e} (threshold {:.3e})", r.difference, r.threshold));
        o.pass = Some(r.pass);
        results["invariance"] = to_value(&r);
    }
    o.results = results;
    Ok(o)
}

pub struct VerifyArgs<'a> {
    pub key: Option<&'a str>,
    pub lhs: Option<&'a str>,
    pub rhs_value: Option<f64>,
    pub tolerance: Option<f64>,
    pub spec: &'a SpecArgs,
}

pub fn verify_cmd(a: VerifyArgs<'_>, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    match (a.key, a.lhs) {
        (Some(key), None) => verify_catalog(key, a.rhs_value, a.tolerance, cfg),
        (None, Some(lhs)) => {
            if let Some(spec) = spec_from(a.spec)? {
                let f = parse(lhs)?;
                let r = verify_invariance(&f, &spec, cfg)?;
                let mut o = Outcome::new(
                    "verify",
                    json!({ "lhs": lhs, "spec": spec.to_string() }),
                    to_value(&r),
                );
                o.row("m(P)", fmt_value(r.original.value, r.original.stderr))
                    .row("m(P~)", fmt_value(r.transformed_value, r.transformed_stderr))
                    .row("|difference|", format!("{:.3e} (threshold {:.3e})", r.difference, r.threshold));
                o.pass = Some(r.pass);
                return Ok(o);
            }
            let rhs = a
                .rhs_value
                .ok_or_else(|| CliError::Usage("--lhs needs --rhs-value or a substitution".into()))?;
            let f = parse(lhs)?;
            let tol = a.tolerance.unwrap_or(1e-6);
            let c = verify_identity(&f, rhs, tol, cfg)?;
            let mut o = Outcome::new("verify", json!({ "lhs": lhs, "rhs_value": rhs, "tolerance": tol }), to_value(&c));
            o.row("lhs", print(&f))
                .row("m(lhs)", fmt_value(c.measured.value, c.measured.stderr))
                .row("rhs", format!("{rhs:.12}"))
                .row("|difference|", format!("{:.3e} (threshold {:.3e})", c.difference, c.threshold));
            o.warnings = c.measured.warnings.clone();
            o.pass = Some(c.pass);
            Ok(o)
        }
        _ => Err(CliError::Usage("give either a catalogue key or --lhs".into())),
    }
}

fn verify_catalog(key: &str, rhs_value: Option<f64>, tolerance: Option<f64>, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    let rec = catalog_entry(key).ok_or_else(|| {
        let keys: Vec<_> = identity_catalog().iter().map(|r| r.key).collect();
        CliError::Usage(format!("unknown identity `{key}`; known: {}", keys.join(", ")))
    })?;
    let conjectural = rec.status == Status::Conjectural;
    let rhs = if conjectural {
        rhs_value.map(|v| named_constant(rec.rhs, Some(v))).transpose()?
    } else {
        Some(named_constant(rec.rhs, None)?)
    };
    let tol = tolerance.unwrap_or(rec.tolerance);
    let inputs = json!({ "key": key, "lhs": rec.expression, "status": rec.status, "rhs_value": rhs_value, "tolerance": tol });
    let mut o = Outcome::new("verify", inputs, serde_json::Value::Null);
    o.row("identity", key)
        .row("status", if conjectural { "conjectural" } else { "proven" })
        .row("lhs", rec.expression);
    match rhs {
        Some(c) => {
            let check = verify_identity(&rec.lhs, c.value, tol, cfg)?;
            o.row("m(lhs)", fmt_value(check.measured.value, check.measured.stderr))
                .row("rhs", format!("{:.12}  ({})", c.value, c.formula))
                .row("|difference|", format!("{:.3e} (threshold {:.3e})", check.difference, check.threshold));
            o.warnings = check.measured.warnings.clone();
            if conjectural {
                o.row("agreement", if check.pass { "consistent (not asserted)" } else { "inconsistent (not asserted)" });
            } else {
                o.pass = Some(check.pass);
            }
            o.results = json!({ "check": to_value(&check), "rhs_formula": c.formula, "conjectural": conjectural });
        }
        None => {
            let r = measure(&rec.lhs, cfg)?;
            o.row("m(lhs)", fmt_value(r.value, r.stderr)).row("rhs", "not supplied (use --rhs-value)");
            o.warnings = r.warnings.clone();
            o.results = json!({ "measured": to_value(&r), "conjectural": true });
        }
    }
    Ok(o)
}

pub fn closed_form_cmd(family: Family, m: u32, check: bool, tolerance: Option<f64>, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    let value = closed_form(family, m)?;
    let mut o = Outcome::new("closed-form", json!({ "family": family, "m": m }), json!({ "value": value }));
    o.row("family", format!("{family:?}_{m}")).row("closed form", format!("{value:.15}"));
    if check {
        let member = build_family(family, m, &BTreeMap::new())?;
        let r = measure(&member.function, cfg)?;
        let diff = (r.value - value).abs();
        let threshold = (3.0 * r.stderr).max(tolerance.unwrap_or(1e-3));
        o.row("function", print(&member.function))
            .row("quadrature", fmt_value(r.value, r.stderr))
            .row("|difference|", format!("{diff:.3e} (threshold {threshold:.3e})"));
        o.warnings = r.warnings.clone();
        o.pass = Some(diff <= threshold);
        o.results = json!({ "value": value, "measured": to_value(&r), "difference": diff, "threshold": threshold });
    }
    Ok(o)
}

pub fn suite_cmd(name: &str, count: Option<usize>, rhs_value: Option<f64>, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed;
    let inputs = json!({ "suite": name, "count": count, "rhs_value": rhs_value });
    let report = match name {
        "roots-lemma" => suites::root_location(count.unwrap_or(1000), 100, seed, 1e-3, 1e-9),
        "pencil" => suites::pencil(count.unwrap_or(1000), seed, 1e-9),
        "invariance" => suites::invariance(count.unwrap_or(20), seed, cfg),
        "catalog" => {
            let r = suites::catalog(cfg, rhs_value);
            let mut o = Outcome::new("suite", inputs, to_value(&r));
            for e in &r.entries {
                let status = match (e.status, e.pass) {
                    (_, Some(true)) => "pass".to_string(),
                    (_, Some(false)) => format!("FAIL{}", e.error.as_ref().map(|m| format!(": {m}")).unwrap_or_default()),
                    (Status::Conjectural, _) => "conjectural (reported only)".to_string(),
                    (Status::Proven, None) => "-".to_string(),
                };
                let m = e.measured.map_or("-".to_string(), |v| format!("{v:.10}"));
                let d = e.difference.map_or("-".to_string(), |v| format!("{v:.2e}"));
                o.row(e.key.clone(), format!("{m:<14} diff {d:<9} {status}"));
            }
            if let (Some(s), Some(t)) = (r.conjectural_spread, r.conjectural_threshold) {
                o.row("conjectural spread", format!("{s:.3e} (threshold {t:.3e})"));
            }
            o.pass = Some(r.passed());
            return Ok(o);
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite `{other}`; known: roots-lemma, pencil, invariance, catalog"
            )))
        }
    };
    let mut o = Outcome::new("suite", inputs, to_value(&report));
    o.row("suite", name)
        .row("instances", report.count)
        .row("violations", report.failures)
        .row("max discrepancy", format!("{:.3e}", report.max_discrepancy));
    for d in &report.details {
        o.row("violation", d);
    }
    o.pass = Some(report.passed());
    Ok(o)
}

pub fn catalog_cmd() -> Outcome {
    let cat = identity_catalog();
    let mut o = Outcome::new("catalog", json!({}), to_value(&cat));
    for r in &cat {
        let status = match r.status {
            Status::Proven => "proven",
            Status::Conjectural => "conjectural",
        };
        let from = r
            .derived_from
            .as_ref()
            .map(|d| format!("  [from {} with g = {}, k = {}]", d.base, d.g, d.k))
            .unwrap_or_default();
        o.row(r.key, format!("{status:<12} rhs {:<19} {}{from}", r.rhs, r.expression));
    }
    o
}

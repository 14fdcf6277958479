//! Conversions between core library types and the JSON report format, plus
//! parsers for the JSON forms so reports can be re-verified exactly by
//! machine consumers.

use serde_json::{json, Value};

use indivisible::demand::DemandSet;
use indivisible::equilibrium::{Allocation, CEOutcome, Refutation, TuOutcome};
use indivisible::linsys::{Constraint, FarkasCertificate, LinearSystem, Rel};
use indivisible::model::{Bundle, Level, PriceVector, Valuation};
use indivisible::rational::{format_rat, parse_rat};
use indivisible::Rat;

use crate::document::bundle_key;
use crate::CliError;

pub fn rat_json(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

pub fn rats_json<'a>(rs: impl IntoIterator<Item = &'a Rat>) -> Value {
    Value::Array(rs.into_iter().map(rat_json).collect())
}

pub fn bundle_json(x: &Bundle) -> Value {
    json!(x.0)
}

pub fn price_json(p: &PriceVector) -> Value {
    rats_json(&p.0)
}

pub fn demand_json(d: &DemandSet) -> Value {
    Value::Array(d.iter().map(bundle_json).collect())
}

pub fn allocation_json(a: &Allocation) -> Value {
    Value::Array(a.0.iter().map(bundle_json).collect())
}

pub fn level_json(level: &Level) -> Value {
    let (tag, key) = match level {
        Level::Utility(r) => ("utility", r),
        Level::Scale(r) => ("scale", r),
        Level::Grid(r) => ("grid", r),
    };
    json!({ "tag": tag, "key": format_rat(key) })
}

pub fn valuation_json(v: &Valuation) -> Value {
    let table: serde_json::Map<String, Value> = v
        .pairs()
        .map(|(x, val)| (bundle_key(x), rat_json(val)))
        .collect();
    Value::Object(table)
}

fn rel_str(rel: &Rel) -> &'static str {
    match rel {
        Rel::Le => "<=",
        Rel::Lt => "<",
        Rel::Eq => "=",
    }
}

pub fn constraint_json(c: &Constraint) -> Value {
    json!({
        "coeffs": rats_json(&c.coeffs),
        "rel": rel_str(&c.rel),
        "rhs": rat_json(&c.rhs),
        "label": c.label,
    })
}

pub fn system_json(s: &LinearSystem) -> Value {
    json!({
        "num_vars": s.num_vars,
        "rows": s.rows.iter().map(constraint_json).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(c: &FarkasCertificate) -> Value {
    json!({ "multipliers": rats_json(&c.multipliers) })
}

pub fn tu_outcome_json(outcome: &TuOutcome) -> Value {
    match outcome {
        TuOutcome::Found {
            price,
            allocation,
            system,
        } => json!({
            "found": true,
            "price": price_json(price),
            "allocation": allocation_json(allocation),
            "system": system_json(system),
        }),
        TuOutcome::NotFound {
            allocation,
            certificate,
            system,
        } => json!({
            "found": false,
            "allocation": allocation_json(allocation),
            "certificate": certificate_json(certificate),
            "system": system_json(system),
        }),
    }
}

pub fn ce_outcome_json(outcome: &CEOutcome) -> Value {
    match outcome {
        CEOutcome::Found {
            price,
            allocation,
            money,
        } => json!({
            "found": true,
            "price": price_json(price),
            "allocation": allocation_json(allocation),
            "money": rats_json(money),
        }),
        CEOutcome::NotFound(refutation) => {
            let r = match refutation {
                Refutation::AllAllocationsRefuted { allocations } => json!({
                    "kind": "all-allocations-refuted",
                    "allocations": allocations,
                }),
                Refutation::HicksianCertificate {
                    levels,
                    certificate,
                } => json!({
                    "kind": "hicksian-certificate",
                    "levels": levels.iter().map(level_json).collect::<Vec<_>>(),
                    "certificate": certificate_json(certificate),
                }),
                Refutation::SearchExhausted { details } => json!({
                    "kind": "search-exhausted",
                    "details": details,
                }),
            };
            json!({ "found": false, "refutation": r })
        }
    }
}

fn rat_from_json(v: &Value) -> Result<Rat, CliError> {
    match v {
        Value::String(s) => parse_rat(s).map_err(CliError::from),
        Value::Number(n) => n
            .as_i64()
            .map(indivisible::rational::int)
            .ok_or_else(|| CliError::input(format!("non-integer number {n}"))),
        other => Err(CliError::input(format!("expected rational, got {other}"))),
    }
}

fn rats_from_json(v: &Value) -> Result<Vec<Rat>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::input("expected array of rationals"))?
        .iter()
        .map(rat_from_json)
        .collect()
}

/// Rebuilds a linear system from its JSON report form, so certificates and
/// price witnesses in reports can be rechecked against the exact rows.
pub fn system_from_json(v: &Value) -> Result<LinearSystem, CliError> {
    let num_vars = v
        .get("num_vars")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::input("system is missing num_vars"))? as usize;
    let rows = v
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input("system is missing rows"))?;
    let mut system = LinearSystem::new(num_vars);
    for row in rows {
        let coeffs = rats_from_json(
            row.get("coeffs")
                .ok_or_else(|| CliError::input("row is missing coeffs"))?,
        )?;
        let rhs = rat_from_json(
            row.get("rhs")
                .ok_or_else(|| CliError::input("row is missing rhs"))?,
        )?;
        let rel = row.get("rel").and_then(Value::as_str).unwrap_or("<=");
        let constraint = match rel {
            "<=" => Constraint::le(coeffs, rhs),
            "<" => Constraint::lt(coeffs, rhs),
            "=" => Constraint::eq(coeffs, rhs),
            other => return Err(CliError::input(format!("unknown relation '{other}'"))),
        };
        let label = row.get("label").and_then(Value::as_str).unwrap_or("");
        system.push(constraint.with_label(label));
    }
    Ok(system)
}

/// Rebuilds a refutation certificate from its JSON report form.
pub fn certificate_from_json(v: &Value) -> Result<FarkasCertificate, CliError> {
    let multipliers = rats_from_json(
        v.get("multipliers")
            .ok_or_else(|| CliError::input("certificate is missing multipliers"))?,
    )?;
    Ok(FarkasCertificate { multipliers })
}

/// Joins displayable items with commas inside braces: `{a, b}`.
pub fn braces(items: impl IntoIterator<Item = String>) -> String {
    let inner: Vec<String> = items.into_iter().collect();
    format!("{{{}}}", inner.join(", "))
}

//! Report rendering: JSON passthrough and CSV with exact "num/den"
//! rationals plus float convenience columns.

use serde_json::Value;
use simil_core::apps::bankrun::BankRunSweep;
use simil_core::dist::{JointDist, SigSet, SignalSpace};
use simil_core::family::StateFamily;
use simil_core::games::{CutoffSet, EquilibriumSet};
use simil_core::io::to_json_string;
use simil_core::num::{fmt_q, parse_q, q_to_f64, Q};
use simil_core::SimilError;

fn bad_format(format: &str) -> SimilError {
    SimilError::Invalid(format!("unknown format {format:?}; expected json or csv"))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn float_of(q: &Q) -> String {
    format!("{}", q_to_f64(q))
}

fn float_of_str(s: &str) -> String {
    parse_q(s).map(|q| float_of(&q)).unwrap_or_default()
}

/// Flattens a violation's indices object into "key=value" pairs joined by
/// semicolons; list values join their items with "|".
fn indices_detail(indices: &Value) -> String {
    let Some(map) = indices.as_object() else { return String::new() };
    map.iter()
        .map(|(k, v)| {
            let rendered = match v {
                Value::Array(items) => items
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                    .collect::<Vec<_>>()
                    .join("|"),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            format!("{k}={rendered}")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn check_output(value: &Value, format: &str) -> Result<String, SimilError> {
    match format {
        "json" => Ok(to_json_string(value)),
        "csv" => {
            let order = value["order"].as_str().unwrap_or_default();
            let holds = value["holds"].as_bool().unwrap_or(false);
            let (variant, detail, lhs, rhs) = match &value["violation"] {
                Value::Null => (String::new(), String::new(), String::new(), String::new()),
                v => (
                    v["variant"].as_str().unwrap_or_default().to_string(),
                    indices_detail(&v["indices"]),
                    v["lhs"].as_str().unwrap_or_default().to_string(),
                    v["rhs"].as_str().unwrap_or_default().to_string(),
                ),
            };
            let mut out = String::from("order,holds,variant,detail,lhs,rhs,lhs_float,rhs_float\n");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_field(order),
                u8::from(holds),
                csv_field(&variant),
                csv_field(&detail),
                csv_field(&lhs),
                csv_field(&rhs),
                float_of_str(&lhs),
                float_of_str(&rhs),
            ));
            Ok(out)
        }
        other => Err(bad_format(other)),
    }
}

pub fn equilibria_output(
    value: &Value,
    set: &EquilibriumSet,
    dist: &JointDist,
    format: &str,
) -> Result<String, SimilError> {
    match format {
        "json" => Ok(to_json_string(value)),
        "csv" => {
            let mut out = format!(
                "# maxP={} ({}), minP={} ({})\n",
                fmt_q(&set.stats.max_p),
                float_of(&set.stats.max_p),
                fmt_q(&set.stats.min_p),
                float_of(&set.stats.min_p),
            );
            out.push_str("strategy,mass,mass_float\n");
            for &p in &set.strategies {
                let mass = dist.set_mass(p);
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&set_label(dist.space(), p)),
                    fmt_q(&mass),
                    float_of(&mass),
                ));
            }
            Ok(out)
        }
        other => Err(bad_format(other)),
    }
}

pub fn strategies_output(
    value: &Value,
    strategies: &[SigSet],
    space: &SignalSpace,
    format: &str,
) -> Result<String, SimilError> {
    match format {
        "json" => Ok(to_json_string(value)),
        "csv" => {
            let mut out = String::from("strategy\n");
            for &p in strategies {
                out.push_str(&format!("{}\n", csv_field(&set_label(space, p))));
            }
            Ok(out)
        }
        other => Err(bad_format(other)),
    }
}

pub fn cutoffs_output(
    value: &Value,
    set: &CutoffSet,
    family: &StateFamily,
    format: &str,
) -> Result<String, SimilError> {
    match format {
        "json" => Ok(to_json_string(value)),
        "csv" => {
            let mut out = format!(
                "# eqmaxp={} ({}), eqminp={} ({})\n",
                fmt_q(&set.stats.eqmaxp),
                float_of(&set.stats.eqmaxp),
                fmt_q(&set.stats.eqminp),
                float_of(&set.stats.eqminp),
            );
            out.push_str("c,set,mass,mass_float\n");
            let mix = family.mix();
            let n = family.space().n();
            for c in &set.cutoffs {
                let p = c.set(n);
                let mass = mix.set_mass(p);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    c.c,
                    csv_field(&set_label(family.space(), p)),
                    fmt_q(&mass),
                    float_of(&mass),
                ));
            }
            Ok(out)
        }
        other => Err(bad_format(other)),
    }
}

fn set_label(space: &SignalSpace, p: SigSet) -> String {
    space.set_labels(p).join("|")
}

pub fn sweep_csv(sweep: &BankRunSweep, epsilon: &Q, p: &Q) -> String {
    let mut out = format!(
        "# epsilon={} ({}), p={} ({}), alpha_star={} ({}), alpha_star_star={} ({}), feasibility={} ({})\n",
        fmt_q(epsilon),
        float_of(epsilon),
        fmt_q(p),
        float_of(p),
        fmt_q(&sweep.alpha_star),
        float_of(&sweep.alpha_star),
        fmt_q(&sweep.alpha_star_star),
        float_of(&sweep.alpha_star_star),
        fmt_q(&sweep.feasibility),
        float_of(&sweep.feasibility),
    );
    out.push_str("a,eG,eB,maximal_expected_run,minimal_expected_run,a_float\n");
    for row in &sweep.rows {
        let opt = |x: &Option<Q>| x.as_ref().map(fmt_q).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_q(&row.a),
            u8::from(row.eg_exists),
            u8::from(row.eb_exists),
            opt(&row.maximal_expected_run),
            opt(&row.minimal_expected_run),
            float_of(&row.a),
        ));
    }
    out
}

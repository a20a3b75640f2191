//! Operations shared by the subcommands and the corpus runner.
//!
//! Each operation produces an ordered list of named [`Value`]s. JSON output
//! writes every rational as a `"p/q"` string; text output is for people.

use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::engine::{
    self, boundary_certificate, classify, BlowupDivisor, BoundaryCertificate, Condition,
    EngineError, Side,
};
use crate::lattice::{ClassVector, Rat};
use crate::models::PolarizedModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Rat(Rat),
    Class(ClassVector),
    Bool(bool),
    Str(String),
    List(Vec<String>),
    None,
    Map(Vec<(String, Value)>),
}

impl Value {
    fn int(k: i64) -> Value {
        Value::Rat(Rat::from_int(k))
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Rat(r) => Json::String(r.to_fraction_string()),
            Value::Class(c) => Json::Array(
                c.coords()
                    .iter()
                    .map(|r| Json::String(r.to_fraction_string()))
                    .collect(),
            ),
            Value::Bool(b) => Json::Bool(*b),
            Value::Str(s) => Json::String(s.clone()),
            Value::List(items) => Json::Array(items.iter().cloned().map(Json::String).collect()),
            Value::None => Json::Null,
            Value::Map(entries) => {
                let mut map = Map::new();
                for (k, v) in entries {
                    map.insert(k.clone(), v.to_json());
                }
                Json::Object(map)
            }
        }
    }

    /// Follows a dotted path through nested maps.
    pub fn lookup(&self, path: &str) -> Option<&Value> {
        let mut cur = self;
        for key in path.split('.') {
            match cur {
                Value::Map(entries) => cur = &entries.iter().find(|(k, _)| k == key)?.1,
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Compact single-line rendering, also used by the corpus table.
    pub fn render(&self) -> String {
        match self {
            Value::Rat(r) => r.to_string(),
            Value::Class(c) => c.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
            Value::List(items) => items.join(" | "),
            Value::None => "none".to_string(),
            Value::Map(entries) => {
                let parts: Vec<String> = entries
                    .iter()
                    .map(|(k, v)| format!("{k}={}", v.render()))
                    .collect();
                format!("{{{}}}", parts.join(", "))
            }
        }
    }
}

/// Inputs accepted by the operations; each one reads what it needs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryArgs {
    pub divisor: Option<String>,
    pub m: Option<u64>,
    pub side: Option<Side>,
    pub condition: Option<Condition>,
    pub m_samples: Option<Vec<u64>>,
    pub max_m: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Pullback,
    NaturalPullback,
    Canonical,
    Restriction,
    Cartier,
    Antisymmetry,
    MultiplierIdeal,
    Certificate,
    Classify,
    KappaSequence,
}

impl Op {
    pub const ALL: [Op; 10] = [
        Op::Pullback,
        Op::NaturalPullback,
        Op::Canonical,
        Op::Restriction,
        Op::Cartier,
        Op::Antisymmetry,
        Op::MultiplierIdeal,
        Op::Certificate,
        Op::Classify,
        Op::KappaSequence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Op::Pullback => "pullback",
            Op::NaturalPullback => "natural-pullback",
            Op::Canonical => "canonical",
            Op::Restriction => "restriction",
            Op::Cartier => "cartier",
            Op::Antisymmetry => "antisymmetry",
            Op::MultiplierIdeal => "multiplier-ideal",
            Op::Certificate => "certificate",
            Op::Classify => "classify",
            Op::KappaSequence => "kappa-sequence",
        }
    }

    pub fn parse(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOutput {
    pub inputs: Vec<(String, Value)>,
    pub outputs: Value,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("missing required input `{0}`")]
    MissingInput(&'static str),
    #[error("`m` must be a positive integer")]
    ZeroM,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl From<crate::models::ModelError> for QueryError {
    fn from(e: crate::models::ModelError) -> Self {
        QueryError::Engine(e.into())
    }
}

impl QueryError {
    pub fn kind(&self) -> &'static str {
        match self {
            QueryError::MissingInput(_) => "missing-input",
            QueryError::ZeroM => "non-positive-multiple",
            QueryError::Engine(e) => e.kind(),
        }
    }

    pub fn is_usage(&self) -> bool {
        match self {
            QueryError::Engine(e) => e.is_usage(),
            _ => true,
        }
    }
}

fn blowup(b: &BlowupDivisor) -> Value {
    Value::Map(vec![
        ("strict".into(), Value::Class(b.strict.clone())),
        ("e".into(), Value::Rat(b.e_coeff.clone())),
        ("exact".into(), Value::Bool(b.exact)),
    ])
}

fn certificate_value(c: &Option<BoundaryCertificate>) -> Value {
    let Some(c) = c else {
        return Value::None;
    };
    Value::Map(vec![
        ("condition".into(), Value::Str(c.condition.as_str().into())),
        ("m_condition".into(), Value::Str(c.condition.m_condition().into())),
        ("r".into(), Value::Rat(c.r.clone())),
        ("boundary".into(), Value::Class(c.boundary.clone())),
        ("discrepancy_at_e".into(), Value::Rat(c.discrepancy_at_e.clone())),
        ("genericity_assumed".into(), Value::Bool(c.genericity_assumed)),
        (
            "caveats".into(),
            Value::List(c.caveats.iter().map(|k| k.code().to_string()).collect()),
        ),
    ])
}

fn per_m(values: impl IntoIterator<Item = (u64, Rat)>) -> Value {
    Value::Map(
        values
            .into_iter()
            .map(|(m, v)| (m.to_string(), Value::Rat(v)))
            .collect(),
    )
}

fn positive_m(m: Option<u64>) -> Result<Option<u64>, QueryError> {
    match m {
        Some(0) => Err(QueryError::ZeroM),
        other => Ok(other),
    }
}

pub fn run_query(model: &PolarizedModel, op: Op, args: &QueryArgs) -> Result<QueryOutput, QueryError> {
    let mut inputs = Vec::new();
    let mut flags = Vec::new();
    let divisor = |inputs: &mut Vec<(String, Value)>| -> Result<ClassVector, QueryError> {
        let lit = args.divisor.as_deref().ok_or(QueryError::MissingInput("divisor"))?;
        let d = model.resolve_divisor(lit)?;
        inputs.push(("divisor".into(), Value::Class(d.clone())));
        Ok(d)
    };
    let m = positive_m(args.m)?;

    let outputs = match op {
        Op::Pullback => {
            let d = divisor(&mut inputs)?;
            let b = engine::pullback(model, &d)?;
            if !b.exact {
                flags.push("limit-not-attained".to_string());
            }
            blowup(&b)
        }
        Op::NaturalPullback => {
            let d = divisor(&mut inputs)?;
            let m = m.unwrap_or(1);
            inputs.push(("m".into(), Value::int(m as i64)));
            blowup(&engine::natural_pullback(model, &d, m)?)
        }
        Op::Canonical => {
            let mut out = vec![("k_y".into(), blowup(&engine::canonical_on_blowup(model)))];
            let sides = match args.side {
                Some(s) => vec![s],
                None => vec![Side::Minus, Side::Plus],
            };
            if let Some(m) = m {
                inputs.push(("m".into(), Value::int(m as i64)));
            }
            if let Some(s) = args.side {
                inputs.push(("side".into(), Value::Str(s.as_str().into())));
            }
            for side in sides {
                let name = match side {
                    Side::Minus => "k_minus",
                    Side::Plus => "k_plus",
                };
                let limit = engine::relative_canonical(model, side, None)?;
                let attained = engine::relative_canonical_attained(model, side)?;
                if !attained {
                    flags.push(format!("{}-limit-not-attained", name.replace('_', "-")));
                }
                out.push((name.into(), Value::Rat(limit)));
                out.push((format!("{name}_attained"), Value::Bool(attained)));
                if let Some(m) = m {
                    out.push((format!("{name}_m"), Value::Rat(engine::relative_canonical(model, side, Some(m))?)));
                }
            }
            Value::Map(out)
        }
        Op::Restriction => {
            let d = divisor(&mut inputs)?;
            let b = engine::pullback(model, &d)?;
            let res = engine::restriction_to_e(model, &b);
            Value::Map(vec![
                ("e".into(), Value::Rat(b.e_coeff.clone())),
                ("numerically_trivial".into(), Value::Bool(engine::numerically_trivial(model, &res))),
                ("restriction".into(), Value::Class(res)),
            ])
        }
        Op::Cartier => {
            let d = divisor(&mut inputs)?;
            let c = engine::cartier_test(model, &d)?;
            let opt = |r: Option<Rat>| r.map_or(Value::None, Value::Rat);
            if !c.q_meaningful {
                flags.push(format!(
                    "q-cartier-not-decided: model {} uses numerical equivalence",
                    model.name
                ));
            }
            Value::Map(vec![
                ("q_cartier".into(), opt(c.q_cartier)),
                ("num_cartier".into(), opt(c.num_cartier)),
                ("q_meaningful".into(), Value::Bool(c.q_meaningful)),
            ])
        }
        Op::Antisymmetry => {
            let d = divisor(&mut inputs)?;
            let plus = engine::pullback(model, &d)?;
            let minus = engine::pullback(model, &-&d)?;
            Value::Map(vec![
                ("t".into(), Value::Rat(plus.e_coeff.clone())),
                ("t_neg".into(), Value::Rat(minus.e_coeff.clone())),
                ("antisymmetric".into(), Value::Bool((&plus.e_coeff + &minus.e_coeff).is_zero())),
            ])
        }
        Op::MultiplierIdeal => {
            let j = engine::multiplier_ideal_trivial(model)?;
            Value::Map(vec![
                ("ceil_coeff".into(), Value::int(j.ceil_coeff)),
                ("trivial".into(), Value::Bool(j.trivial)),
            ])
        }
        Op::Certificate => {
            let conds = match args.condition {
                Some(c) => {
                    inputs.push(("condition".into(), Value::Str(c.as_str().into())));
                    vec![c]
                }
                None => Condition::ALL.to_vec(),
            };
            let mut out = Vec::new();
            for c in conds {
                let cert = boundary_certificate(model, c)?;
                if let Some(cert) = &cert {
                    for caveat in &cert.caveats {
                        let flag = format!("{}: {}", caveat.code(), caveat.description());
                        if !flags.contains(&flag) {
                            flags.push(flag);
                        }
                    }
                }
                out.push((c.as_str().to_string(), certificate_value(&cert)));
            }
            if out.iter().any(|(_, v)| *v != Value::None) {
                flags.push("genericity-assumed: only the discrepancy along E is certified".to_string());
            }
            Value::Map(out)
        }
        Op::Classify => {
            let samples = args.m_samples.clone().unwrap_or_else(engine::default_m_samples);
            if samples.contains(&0) {
                return Err(QueryError::ZeroM);
            }
            inputs.push((
                "m_samples".into(),
                Value::List(samples.iter().map(u64::to_string).collect()),
            ));
            let r = classify(model, &samples)?;
            flags.extend(r.flags.iter().cloned());
            let opt_bool = |b: Option<bool>| b.map_or(Value::None, Value::Bool);
            let conditions = r
                .m_conditions
                .iter()
                .map(|(c, e)| {
                    (
                        c.as_str().to_string(),
                        Value::Map(vec![
                            ("m_condition".into(), Value::Str(c.m_condition().into())),
                            ("certificate".into(), certificate_value(&e.certificate)),
                            ("necessary_at_e".into(), Value::Bool(e.necessary_at_e)),
                        ]),
                    )
                })
                .collect();
            Value::Map(vec![
                ("k_minus".into(), Value::Rat(r.ord_k_minus)),
                ("k_plus".into(), Value::Rat(r.ord_k_plus)),
                ("k_minus_m".into(), per_m(r.ord_k_minus_m)),
                ("k_plus_m".into(), per_m(r.ord_k_plus_m)),
                ("lt_plus".into(), opt_bool(r.lt_plus)),
                ("canonical_plus_at_e".into(), Value::Bool(r.canonical_plus_at_e)),
                ("terminal_plus_at_e".into(), Value::Bool(r.terminal_plus_at_e)),
                ("m_conditions".into(), Value::Map(conditions)),
                ("j_plus_trivial".into(), opt_bool(r.j_plus_trivial)),
            ])
        }
        Op::KappaSequence => {
            let d = divisor(&mut inputs)?;
            let max_m = positive_m(args.max_m)?.unwrap_or(12);
            inputs.push(("max_m".into(), Value::int(max_m as i64)));
            let t = engine::t_invariant(model, &d)?;
            let t_value = t.finite().cloned().ok_or(EngineError::NonFinite)?;
            let mut kappas = Vec::new();
            let mut normalized = Vec::new();
            for m in 1..=max_m {
                let k = engine::kappa(model, &d, m)?;
                kappas.push((m, Rat::from_int(k)));
                normalized.push((m, Rat::new(k, m as i64)));
            }
            Value::Map(vec![
                ("t".into(), Value::Rat(t_value)),
                ("t_attained".into(), Value::Bool(t.attained)),
                ("kappa".into(), per_m(kappas)),
                ("kappa_over_m".into(), per_m(normalized)),
            ])
        }
    };
    Ok(QueryOutput {
        inputs,
        outputs,
        flags,
    })
}

/// One JSON record in the report schema.
pub fn json_record(
    label_key: &str,
    label: &str,
    model: &str,
    result: &Result<QueryOutput, QueryError>,
) -> Json {
    let mut rec = Map::new();
    rec.insert(label_key.into(), json!(label));
    rec.insert("model".into(), json!(model));
    match result {
        Ok(out) => {
            rec.insert("inputs".into(), Value::Map(out.inputs.clone()).to_json());
            rec.insert("outputs".into(), out.outputs.to_json());
            rec.insert("flags".into(), json!(out.flags));
            rec.insert("status".into(), json!("ok"));
        }
        Err(e) => {
            rec.insert("inputs".into(), json!({}));
            rec.insert("outputs".into(), json!({}));
            rec.insert("flags".into(), json!([]));
            rec.insert("status".into(), json!("error"));
            rec.insert("error".into(), json!(format!("{}: {e}", e.kind())));
        }
    }
    Json::Object(rec)
}

/// Class with its expansion in the model's basis, e.g. `-1,0 (= -f1)`.
pub fn class_with_basis(model: &PolarizedModel, c: &ClassVector) -> String {
    let mut expr = String::new();
    for (label, coeff) in model.basis.iter().zip(c.coords()) {
        if coeff.is_zero() {
            continue;
        }
        let sign = if coeff.is_negative() { "-" } else { "+" };
        if expr.is_empty() {
            if coeff.is_negative() {
                expr.push('-');
            }
        } else {
            let _ = write!(expr, " {sign} ");
        }
        let abs = coeff.abs();
        if abs != Rat::one() {
            let _ = write!(expr, "{abs}");
            expr.push('·');
        }
        expr.push_str(label);
    }
    if expr.is_empty() {
        expr.push('0');
    }
    format!("{c} (= {expr})")
}

/// Indented `key: value` lines.
pub fn render_text(model: &PolarizedModel, value: &Value, indent: usize, out: &mut String) {
    let Value::Map(entries) = value else {
        let _ = writeln!(out, "{:indent$}{}", "", value.render());
        return;
    };
    for (k, v) in entries {
        match v {
            Value::Map(_) => {
                let _ = writeln!(out, "{:indent$}{k}:", "");
                render_text(model, v, indent + 2, out);
            }
            Value::Class(c) => {
                let _ = writeln!(out, "{:indent$}{k}: {}", "", class_with_basis(model, c));
            }
            _ => {
                let _ = writeln!(out, "{:indent$}{k}: {}", "", v.render());
            }
        }
    }
}

//! Worked examples stored as data and replayed through [`run_query`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::engine::{Condition, Side};
use crate::lattice::{ClassVector, Rat};
use crate::models::{parse_config, parse_model_ref, PolarizedModel};

use super::query::{json_record, run_query, Op, QueryArgs, QueryError, QueryOutput, Value};

/// The corpus compiled into the binary.
pub const EMBEDDED_CORPUS: &str = include_str!("../../data/corpus.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Value stated in the literature.
    Published,
    /// Follows immediately from the definitions.
    Trivial,
    /// Computed independently, e.g. by the brute-force oracle.
    Derived,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Trivial => "trivial",
            Source::Derived => "derived",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseInputs {
    pub divisor: Option<String>,
    pub m: Option<u64>,
    pub side: Option<String>,
    pub condition: Option<String>,
    pub m_samples: Option<Vec<u64>>,
    pub max_m: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusCase {
    pub id: String,
    /// Built-in reference such as `p1xp1:1,2`.
    pub model: Option<String>,
    /// Inline model declaration, used instead of `model`.
    pub config: Option<String>,
    pub op: String,
    #[serde(default)]
    pub inputs: CaseInputs,
    /// Dotted output paths and their expected values.
    #[serde(default)]
    pub expect: BTreeMap<String, toml::Value>,
    /// Flags that must appear, matched by prefix.
    #[serde(default)]
    pub expect_flags: Vec<String>,
    /// Error kind the query must fail with.
    pub expect_error: Option<String>,
    pub source: Source,
    /// Formula the expected values come from.
    pub anchor: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusFile {
    #[serde(rename = "case")]
    cases: Vec<CorpusCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus is not valid TOML: {0}")]
    Syntax(String),
    #[error("case `{id}`: {message}")]
    BadCase { id: String, message: String },
    #[error("duplicate case id `{0}`")]
    DuplicateId(String),
}

/// Parses a corpus and returns its cases ordered by id.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusCase>, CorpusError> {
    let file: CorpusFile = toml::from_str(text).map_err(|e| CorpusError::Syntax(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for case in &file.cases {
        if !seen.insert(case.id.clone()) {
            return Err(CorpusError::DuplicateId(case.id.clone()));
        }
        let bad = |message: &str| CorpusError::BadCase {
            id: case.id.clone(),
            message: message.to_string(),
        };
        if case.model.is_some() == case.config.is_some() {
            return Err(bad("exactly one of `model` and `config` is required"));
        }
        if Op::parse(&case.op).is_none() {
            return Err(bad(&format!("unknown op `{}`", case.op)));
        }
        if case.source == Source::Published && case.anchor.as_deref().is_none_or(str::is_empty) {
            return Err(bad("published cases need an anchor"));
        }
        if case.expect.is_empty() && case.expect_error.is_none() && case.expect_flags.is_empty() {
            return Err(bad("no expectations"));
        }
    }
    let mut cases = file.cases;
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub id: String,
    pub model: String,
    pub op: String,
    pub passed: bool,
    /// `(path, expected, actual)` for every checked expectation.
    pub comparisons: Vec<(String, String, String)>,
    pub record: Json,
}

fn model_for(case: &CorpusCase) -> Result<PolarizedModel, String> {
    match (&case.model, &case.config) {
        (Some(r), _) => parse_model_ref(r).map_err(|e| e.to_string()),
        (None, Some(text)) => parse_config(text).map_err(|e| e.to_string()),
        (None, None) => Err("no model".into()),
    }
}

fn query_args(inputs: &CaseInputs) -> Result<QueryArgs, String> {
    let side = match inputs.side.as_deref() {
        None => None,
        Some("minus") => Some(Side::Minus),
        Some("plus") => Some(Side::Plus),
        Some(other) => return Err(format!("unknown side `{other}`")),
    };
    let condition = match inputs.condition.as_deref() {
        None => None,
        Some(c) => Some(Condition::parse(c).ok_or_else(|| format!("unknown condition `{c}`"))?),
    };
    Ok(QueryArgs {
        divisor: inputs.divisor.clone(),
        m: inputs.m,
        side,
        condition,
        m_samples: inputs.m_samples.clone(),
        max_m: inputs.max_m,
    })
}

/// Exact comparison of an expectation against a computed value.
fn matches(expected: &toml::Value, actual: &Value) -> bool {
    use toml::Value as T;
    match (expected, actual) {
        (T::String(s), Value::Rat(r)) => s.parse::<Rat>().is_ok_and(|e| e == *r),
        (T::Integer(i), Value::Rat(r)) => Rat::from_int(*i) == *r,
        (T::String(s), Value::Class(c)) => s.parse::<ClassVector>().is_ok_and(|e| e == *c),
        (T::String(s), Value::Str(a)) => s == a,
        (T::String(s), Value::None) => s == "none",
        (T::Boolean(b), Value::Bool(a)) => b == a,
        (T::Array(items), Value::List(a)) => {
            items.len() == a.len()
                && items
                    .iter()
                    .zip(a)
                    .all(|(e, a)| e.as_str() == Some(a.as_str()))
        }
        _ => false,
    }
}

fn render_expected(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn run_case(case: &CorpusCase) -> CaseResult {
    let model = model_for(case);
    let model_label = case.model.clone().unwrap_or_else(|| match &model {
        Ok(m) => format!("config:{}", m.name),
        Err(_) => "config:?".into(),
    });
    let op = Op::parse(&case.op).expect("validated by parse_corpus");

    let result: Result<Result<QueryOutput, QueryError>, String> = model.and_then(|m| {
        let args = query_args(&case.inputs)?;
        Ok(run_query(&m, op, &args))
    });

    let mut comparisons = Vec::new();
    let mut passed = true;
    let mut record = match &result {
        Ok(r) => json_record("case", &case.id, &model_label, r),
        Err(msg) => json!({
            "case": case.id, "model": model_label, "inputs": {}, "outputs": {},
            "flags": [], "status": "error", "error": msg,
        }),
    };

    match &result {
        Ok(Ok(out)) => {
            if let Some(kind) = &case.expect_error {
                passed = false;
                comparisons.push(("error".into(), kind.clone(), "none".into()));
            }
            for (path, expected) in &case.expect {
                let actual = out.outputs.lookup(path);
                let ok = actual.is_some_and(|a| matches(expected, a));
                passed &= ok;
                comparisons.push((
                    path.clone(),
                    render_expected(expected),
                    actual.map_or_else(|| "missing".into(), Value::render),
                ));
            }
            for flag in &case.expect_flags {
                let ok = out.flags.iter().any(|f| f.starts_with(flag.as_str()));
                passed &= ok;
                comparisons.push((
                    "flag".into(),
                    flag.clone(),
                    if ok { flag.clone() } else { "absent".into() },
                ));
            }
        }
        Ok(Err(e)) => {
            let ok = case.expect_error.as_deref() == Some(e.kind());
            passed = ok && case.expect.is_empty();
            comparisons.push((
                "error".into(),
                case.expect_error.clone().unwrap_or_else(|| "none".into()),
                e.kind().into(),
            ));
        }
        Err(msg) => {
            passed = false;
            comparisons.push(("setup".into(), "ok".into(), msg.clone()));
        }
    }

    let obj = record.as_object_mut().expect("records are objects");
    obj.insert("op".into(), json!(case.op));
    obj.insert("source".into(), json!(case.source.as_str()));
    obj.insert("anchor".into(), json!(case.anchor));
    let expected: serde_json::Map<String, Json> = case
        .expect
        .iter()
        .map(|(k, v)| (k.clone(), json!(render_expected(v))))
        .collect();
    obj.insert("expected".into(), Json::Object(expected));
    obj.insert("result".into(), json!(if passed { "pass" } else { "fail" }));

    CaseResult {
        id: case.id.clone(),
        model: model_label,
        op: case.op.clone(),
        passed,
        comparisons,
        record,
    }
}

/// Cases whose id or model reference contains `filter`.
pub fn select<'a>(cases: &'a [CorpusCase], filter: Option<&str>) -> Vec<&'a CorpusCase> {
    cases
        .iter()
        .filter(|c| {
            filter.is_none_or(|f| {
                c.id.contains(f) || c.model.as_deref().is_some_and(|m| m.contains(f))
            })
        })
        .collect()
}

pub fn format_text(results: &[CaseResult]) -> String {
    let width = results.iter().map(|r| r.id.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let details: Vec<String> = r
            .comparisons
            .iter()
            .map(|(p, e, a)| format!("{p}: expected {e}, got {a}"))
            .collect();
        out.push_str(&format!(
            "{status}  {:<width$}  {} {}  {}\n",
            r.id,
            r.op,
            r.model,
            details.join("; ")
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!(
        "{} cases: {passed} passed, {} failed\n",
        results.len(),
        results.len() - passed
    ));
    out
}

pub fn format_json(results: &[CaseResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.record.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_corpus_is_well_formed() {
        let cases = parse_corpus(EMBEDDED_CORPUS).unwrap();
        assert!(cases.len() >= 14);
        assert!(cases.windows(2).all(|w| w[0].id < w[1].id));
    }

    #[test]
    fn rejects_bad_cases() {
        let dup = "[[case]]\nid='a'\nmodel='p1xp1:1,2'\nop='classify'\nsource='trivial'\nexpect={k_minus='0'}\n";
        let text = format!("{dup}{dup}");
        assert_eq!(parse_corpus(&text).unwrap_err(), CorpusError::DuplicateId("a".into()));
        let no_anchor = dup.replace("trivial", "published");
        assert!(matches!(parse_corpus(&no_anchor), Err(CorpusError::BadCase { .. })));
        let bad_op = dup.replace("classify", "classification");
        assert!(matches!(parse_corpus(&bad_op), Err(CorpusError::BadCase { .. })));
        assert!(matches!(parse_corpus("[[case]]\nid=1"), Err(CorpusError::Syntax(_))));
    }

    #[test]
    fn wrong_expectation_fails() {
        let text = "[[case]]\nid='a'\nmodel='p1xp1:2,3'\nop='classify'\nsource='derived'\nexpect={k_minus='-1/2'}\n";
        let cases = parse_corpus(text).unwrap();
        let r = run_case(&cases[0]);
        assert!(!r.passed);
        assert_eq!(r.comparisons[0], ("k_minus".into(), "-1/2".into(), "-1/3".into()));
        assert_eq!(r.record["result"], json!("fail"));
    }

    #[test]
    fn expected_errors() {
        let text = "[[case]]\nid='a'\nmodel='projective_line:2'\nop='natural-pullback'\ninputs={divisor='1/2'}\nsource='trivial'\nexpect_error='non-integral'\n";
        let r = run_case(&parse_corpus(text).unwrap()[0]);
        assert!(r.passed, "{:?}", r.comparisons);
    }
}

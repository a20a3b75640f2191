//! Line-oriented model declarations.
//!
//! ```text
//! [model]
//! name = fano_n2
//! rank = 2
//! basis = H, S0
//! equivalence = numerical
//! facets = 1,0; 0,1
//! zeff = cone-integral
//! K = -3,-2
//! L = 6,3
//! gap_bound = 0
//! log_resolution = true
//! caveats = cone-boundary-not-log-resolution
//! ```
//!
//! `#` starts a comment. Unknown or repeated keys are rejected.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{ClassVector, EffConeSpec};

use super::{EffRule, EquivalenceMode, ModelCaveat, ModelError, PolarizedModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

const KEYS: &[&str] = &[
    "name",
    "rank",
    "basis",
    "equivalence",
    "facets",
    "zeff",
    "K",
    "L",
    "gap_bound",
    "log_resolution",
    "caveats",
];

struct Entries<'a> {
    values: HashMap<&'a str, (usize, &'a str)>,
    section_line: usize,
}

impl<'a> Entries<'a> {
    fn get(&self, key: &str) -> Option<(usize, &'a str)> {
        self.values.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<(usize, &'a str), ConfigError> {
        self.get(key).ok_or_else(|| ConfigError {
            line: self.section_line,
            message: format!("missing required key `{key}`"),
        })
    }

    /// Line to blame for a problem involving `key`.
    fn line_of(&self, key: &str) -> usize {
        self.get(key).map_or(self.section_line, |(l, _)| l)
    }
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

fn scan(text: &str) -> Result<Entries<'_>, ConfigError> {
    let mut values = HashMap::new();
    let mut section_line = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line != "[model]" {
                return Err(err(line_no, format!("unknown section `{line}`")));
            }
            if section_line.is_some() {
                return Err(err(line_no, "only one [model] section is allowed"));
            }
            section_line = Some(line_no);
            continue;
        }
        if section_line.is_none() {
            return Err(err(line_no, "expected `[model]` before any key"));
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, format!("expected `key = value`, found `{line}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(err(line_no, format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = values.insert(key, (line_no, value)) {
            return Err(err(line_no, format!("duplicate key `{key}` (first on line {first})")));
        }
    }
    let section_line = section_line.ok_or_else(|| err(1, "missing `[model]` section"))?;
    Ok(Entries {
        values,
        section_line,
    })
}

fn parse_class(line: usize, key: &str, value: &str) -> Result<ClassVector, ConfigError> {
    value
        .parse::<ClassVector>()
        .map_err(|e| err(line, format!("`{key}`: {e}")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(line, format!("`{key}` must be `true` or `false`"))),
    }
}

fn parse_facets(line: usize, value: &str) -> Result<Vec<Vec<BigInt>>, ConfigError> {
    value
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<BigInt>()
                        .map_err(|_| err(line, format!("facet entry `{}` is not an integer", x.trim())))
                })
                .collect()
        })
        .collect()
}

/// Parses and validates a model declaration. All invariant violations are
/// reported against the line of the offending key.
pub fn parse_config(text: &str) -> Result<PolarizedModel, ModelError> {
    let entries = scan(text)?;

    let (line, name) = entries.require("name")?;
    if name.is_empty() {
        return Err(err(line, "`name` must not be empty").into());
    }
    let (line, rank_str) = entries.require("rank")?;
    let rank: usize = rank_str
        .parse()
        .ok()
        .filter(|&r| r > 0)
        .ok_or_else(|| err(line, "`rank` must be a positive integer"))?;

    let basis = match entries.get("basis") {
        Some((line, v)) => {
            let labels: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
            if labels.len() != rank || labels.iter().any(String::is_empty) {
                return Err(err(line, format!("`basis` must list {rank} non-empty labels")).into());
            }
            if let Some(dup) = labels.iter().enumerate().find(|(i, a)| labels[..*i].contains(a)) {
                return Err(err(line, format!("duplicate basis label `{}`", dup.1)).into());
            }
            labels
        }
        None => (1..=rank).map(|i| format!("e{i}")).collect(),
    };

    let equivalence = match entries.get("equivalence") {
        None | Some((_, "linear")) => EquivalenceMode::Linear,
        Some((_, "numerical")) => EquivalenceMode::Numerical,
        Some((line, other)) => {
            return Err(err(line, format!("`equivalence` must be `linear` or `numerical`, found `{other}`")).into())
        }
    };

    let rule = match entries.get("zeff").map_or("cone-integral", |(_, v)| v) {
        "cone-integral" => {
            let (line, v) = entries.require("facets")?;
            let facets = parse_facets(line, v)?;
            let cone = EffConeSpec::new(rank, facets, None)
                .map_err(|e| err(line, format!("`facets`: {e}")))?;
            EffRule::Polyhedral(cone)
        }
        "elliptic-curve" => {
            if let Some((line, _)) = entries.get("facets") {
                return Err(err(line, "`facets` is not allowed with zeff = elliptic-curve").into());
            }
            EffRule::EllipticCurve
        }
        other => {
            return Err(err(
                entries.line_of("zeff"),
                format!("unknown zeff rule `{other}` (expected cone-integral or elliptic-curve)"),
            )
            .into())
        }
    };

    let mut classes = Vec::new();
    for key in ["K", "L"] {
        let (line, v) = entries.require(key)?;
        let c = parse_class(line, key, v)?;
        if c.rank() != rank {
            return Err(err(line, format!("`{key}` has {} coordinates, rank is {rank}", c.rank())).into());
        }
        if !c.is_integral() {
            return Err(err(line, format!("`{key}` must be integral")).into());
        }
        classes.push(c);
    }
    let l = classes.pop().expect("two classes");
    let k = classes.pop().expect("two classes");

    let gap_bound = match entries.get("gap_bound") {
        Some((line, v)) => v
            .parse::<u64>()
            .map_err(|_| err(line, "`gap_bound` must be a nonnegative integer"))?,
        None => 0,
    };
    let log_resolution = match entries.get("log_resolution") {
        Some((line, v)) => parse_bool(line, "log_resolution", v)?,
        None => false,
    };

    let caveats = match entries.get("caveats") {
        Some((line, v)) => v
            .split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(|c| ModelCaveat::from_code(c).ok_or_else(|| err(line, format!("unknown caveat `{c}`"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![],
    };

    let model = PolarizedModel {
        name: name.to_string(),
        basis,
        equivalence,
        rule,
        k,
        l,
        gap_bound,
        log_resolution,
        normality_declared: true,
        caveats,
    };
    model.validate().map_err(|e| match e {
        ModelError::Invalid(msg) => err(entries.line_of("L"), msg).into(),
        other => other,
    })?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    const FANO: &str = "\
# Fano fourfold data with n = 2
[model]
name = fano_n2
rank = 2
basis = H, S0
equivalence = numerical
facets = 1,0; 0,1
zeff = cone-integral
K = -3,-2
L = 6,3
gap_bound = 0
log_resolution = true
";

    fn line_of(e: ModelError) -> usize {
        match e {
            ModelError::Config(c) => c.line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_fano_config() {
        let m = parse_config(FANO).unwrap();
        let b = builtin("fano_fourfold_AW", &[2]).unwrap();
        assert_eq!(m.k, b.k);
        assert_eq!(m.l, b.l);
        assert_eq!(m.cone().unwrap().facets(), b.cone().unwrap().facets());
        assert_eq!(m.equivalence, EquivalenceMode::Numerical);
        assert!(m.log_resolution);
        assert!(m.caveats.is_empty());
        let with = format!("{FANO}caveats = cone-boundary-not-log-resolution\n");
        assert_eq!(parse_config(&with).unwrap().caveats, b.caveats);
    }

    #[test]
    fn elliptic_rule() {
        let text = "[model]\nname = e\nrank = 2\nzeff = elliptic-curve\nK = 0,0\nL = 3,0\n";
        let m = parse_config(text).unwrap();
        assert_eq!(m.rule, EffRule::EllipticCurve);
        let bad = "[model]\nname = e\nrank = 2\nzeff = elliptic-curve\nfacets = 1,0;0,1\nK = 0,0\nL = 3,0\n";
        assert_eq!(line_of(parse_config(bad).unwrap_err()), 5);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let t = FANO.replace("gap_bound = 0", "gap = 0");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 11);
        let t = format!("{FANO}rank = 2\n");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 13);
    }

    #[test]
    fn non_salient_cone_names_the_ray_pair() {
        let t = FANO.replace("facets = 1,0; 0,1", "facets = 1,0");
        let e = parse_config(&t).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 7"), "{msg}");
        assert!(msg.contains("0,1") && msg.contains("0,-1"), "{msg}");
    }

    #[test]
    fn rejects_bad_values() {
        let t = FANO.replace("L = 6,3", "L = 6,3/2");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 10);
        let t = FANO.replace("L = 6,3", "L = 6,-3");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 10);
        let t = FANO.replace("K = -3,-2", "K = -3");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 9);
        let t = FANO.replace("K = -3,-2", "K = -3,x");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 9);
        let t = FANO.replace("facets = 1,0; 0,1", "facets = 2,0; 0,1");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 7);
        let t = FANO.replace("[model]", "");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 3);
        let t = FANO.replace("log_resolution = true", "log_resolution = yes");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 12);
        let t = format!("{FANO}caveats = bogus\n");
        assert_eq!(line_of(parse_config(&t).unwrap_err()), 13);
    }
}

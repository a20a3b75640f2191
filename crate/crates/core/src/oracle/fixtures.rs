//! Pinned regression values, one per line: `model;D;quantity;m?;value`.
//!
//! `quantity` is `t` (attained infimum), `t_open` (infimum not attained) or
//! `kappa` (requires `m`). `#` starts a comment; comments carry provenance.

use std::fmt;
use std::str::FromStr;

use crate::lattice::{ClassVector, Rat};

use super::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureQuantity {
    T,
    TOpen,
    Kappa,
}

impl FixtureQuantity {
    pub fn as_str(self) -> &'static str {
        match self {
            FixtureQuantity::T => "t",
            FixtureQuantity::TOpen => "t_open",
            FixtureQuantity::Kappa => "kappa",
        }
    }
}

impl FromStr for FixtureQuantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" => Ok(FixtureQuantity::T),
            "t_open" => Ok(FixtureQuantity::TOpen),
            "kappa" => Ok(FixtureQuantity::Kappa),
            _ => Err(format!("unknown quantity `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureLine {
    pub line: usize,
    pub model_ref: String,
    pub d: ClassVector,
    pub quantity: FixtureQuantity,
    pub m: Option<u64>,
    pub value: Rat,
}

impl fmt::Display for FixtureLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m.map(|m| m.to_string()).unwrap_or_default();
        write!(
            f,
            "{};{};{};{};{}",
            self.model_ref,
            self.d,
            self.quantity.as_str(),
            m,
            self.value
        )
    }
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureLine>, OracleError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |msg: String| OracleError::BadConfig(format!("fixture line {line}: {msg}"));
        let fields: Vec<&str> = body.split(';').map(str::trim).collect();
        let [model_ref, d, quantity, m, value] = fields[..] else {
            return Err(bad(format!("expected 5 `;`-separated fields, found {}", fields.len())));
        };
        let d: ClassVector = d.parse().map_err(|e| bad(format!("divisor: {e}")))?;
        let quantity: FixtureQuantity = quantity.parse().map_err(bad)?;
        let m = match (quantity, m) {
            (FixtureQuantity::Kappa, "") => return Err(bad("kappa needs m".into())),
            (FixtureQuantity::Kappa, m) => Some(
                m.parse::<u64>()
                    .ok()
                    .filter(|&m| m > 0)
                    .ok_or_else(|| bad(format!("bad m `{m}`")))?,
            ),
            (_, "") => None,
            (_, m) => return Err(bad(format!("m `{m}` given for a t fixture"))),
        };
        let value: Rat = value.parse().map_err(|e| bad(format!("value: {e}")))?;
        if quantity == FixtureQuantity::Kappa && !value.is_integer() {
            return Err(bad("kappa values are integers".into()));
        }
        out.push(FixtureLine {
            line,
            model_ref: model_ref.to_string(),
            d,
            quantity,
            m,
            value,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let text = "# header\np1xp1:2,3;-4,-5;t;;-5/3\n\np1xp1:1,2;-3,-4;kappa;7;-14 # scan\n";
        let f = parse_fixtures(text).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].value, Rat::new(-5, 3));
        assert_eq!(f[1].line, 4);
        assert_eq!(f[1].m, Some(7));
        assert_eq!(f[1].to_string(), "p1xp1:1,2;-3,-4;kappa;7;-14");
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "p1xp1:1,2;0,0;t;0",
            "p1xp1:1,2;0,0;kappa;;0",
            "p1xp1:1,2;0,0;t;3;0",
            "p1xp1:1,2;0,0;kappa;2;1/2",
            "p1xp1:1,2;0,x;t;;0",
            "p1xp1:1,2;0,0;s;;0",
        ] {
            assert!(parse_fixtures(bad).is_err(), "{bad}");
        }
    }
}

use std::collections::BTreeMap;

use crate::lattice::Rat;
use crate::models::{ModelCaveat, PolarizedModel};

use super::{
    boundary_certificate, multiplier_ideal_trivial, relative_canonical,
    relative_canonical_attained, BoundaryCertificate, Condition, EngineError, Side,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MConditionEntry {
    /// Sufficient: a boundary making the pair satisfy the condition at `E`.
    pub certificate: Option<BoundaryCertificate>,
    /// Necessary at `E`: some sampled `a_m(E, X)` meets the threshold.
    pub necessary_at_e: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityReport {
    pub model: String,
    pub ord_k_minus: Rat,
    pub ord_k_plus: Rat,
    pub ord_k_minus_m: BTreeMap<u64, Rat>,
    pub ord_k_plus_m: BTreeMap<u64, Rat>,
    /// Global verdict; `None` when the blow-up is not a declared log resolution.
    pub lt_plus: Option<bool>,
    pub canonical_plus_at_e: bool,
    pub terminal_plus_at_e: bool,
    pub m_conditions: BTreeMap<Condition, MConditionEntry>,
    pub j_plus_trivial: Option<bool>,
    pub flags: Vec<String>,
}

/// Default `m` samples used by the CLI.
pub fn default_m_samples() -> Vec<u64> {
    (1..=12).collect()
}

pub fn classify(model: &PolarizedModel, m_samples: &[u64]) -> Result<SingularityReport, EngineError> {
    let ord_k_minus = relative_canonical(model, Side::Minus, None)?;
    let ord_k_plus = relative_canonical(model, Side::Plus, None)?;
    let mut ord_k_minus_m = BTreeMap::new();
    let mut ord_k_plus_m = BTreeMap::new();
    for &m in m_samples {
        ord_k_minus_m.insert(m, relative_canonical(model, Side::Minus, Some(m))?);
        ord_k_plus_m.insert(m, relative_canonical(model, Side::Plus, Some(m))?);
    }

    let minus_one = Rat::from_int(-1);
    let mut flags = Vec::new();
    if model.normality_declared {
        flags.push("normality-declared: the cone is assumed normal, not verified".to_string());
    }

    let (lt_plus, j_plus_trivial) = if model.log_resolution {
        let j = multiplier_ideal_trivial(model)?;
        (Some(ord_k_plus > minus_one), Some(j.trivial))
    } else {
        flags.push(
            "not-log-resolution: only values at E are reported, no global lt+ verdict".to_string(),
        );
        (None, None)
    };

    if !relative_canonical_attained(model, Side::Minus)? {
        flags.push("k-minus-limit-not-attained".to_string());
    }
    if !relative_canonical_attained(model, Side::Plus)? {
        flags.push("k-plus-limit-not-attained".to_string());
    }

    let mut m_conditions = BTreeMap::new();
    for cond in Condition::ALL {
        let certificate = boundary_certificate(model, cond)?;
        let necessary_at_e = ord_k_minus_m.values().any(|a| cond.admits(a));
        m_conditions.insert(
            cond,
            MConditionEntry {
                certificate,
                necessary_at_e,
            },
        );
    }
    if m_conditions.values().any(|e| e.certificate.is_some()) {
        flags.push(
            "genericity-assumed: certificates assume a general member of |B| gives a log resolution of the pair"
                .to_string(),
        );
    }

    for caveat in &model.caveats {
        let detail = match caveat {
            ModelCaveat::ClassLevelPlusLimits => {
                let values: Vec<String> = ord_k_plus_m
                    .iter()
                    .map(|(m, v)| format!("K+_{m}={v}"))
                    .collect();
                format!("{}; computed {}", caveat.description(), values.join(" "))
            }
            ModelCaveat::ConeBoundaryNotLogResolution => caveat.description().to_string(),
        };
        flags.push(format!("{}: {detail}", caveat.code()));
    }

    Ok(SingularityReport {
        model: model.name.clone(),
        canonical_plus_at_e: ord_k_plus >= Rat::zero(),
        terminal_plus_at_e: ord_k_plus > Rat::zero(),
        ord_k_minus,
        ord_k_plus,
        ord_k_minus_m,
        ord_k_plus_m,
        lt_plus,
        m_conditions,
        j_plus_trivial,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    #[test]
    fn p1xp1_one_two() {
        let m = builtin("p1xp1", &[1, 2]).unwrap();
        let r = classify(&m, &default_m_samples()).unwrap();
        assert_eq!(r.lt_plus, Some(true));
        assert!(r.canonical_plus_at_e);
        assert!(r.m_conditions[&Condition::Canonical].certificate.is_some());
        assert!(r.m_conditions[&Condition::Canonical].necessary_at_e);
        assert!(!r.m_conditions[&Condition::Terminal].necessary_at_e);
        assert_eq!(r.j_plus_trivial, Some(true));
    }

    #[test]
    fn elliptic_fibration_flags_plus_limits() {
        let m = builtin("elliptic_fibration", &[3]).unwrap();
        let r = classify(&m, &[1, 2, 3]).unwrap();
        assert_eq!(r.lt_plus, Some(false));
        assert!(r.ord_k_plus_m.values().all(|v| *v == Rat::from_int(-1)));
        assert!(r.flags.iter().any(|f| f.starts_with("class-level-plus-limits")));
    }

    #[test]
    fn p1xp1_two_three() {
        let m = builtin("p1xp1", &[2, 3]).unwrap();
        let r = classify(&m, &default_m_samples()).unwrap();
        assert_eq!(r.lt_plus, Some(true));
        assert!(r.canonical_plus_at_e);
        assert!(!r.terminal_plus_at_e);
        assert!(r.m_conditions[&Condition::Canonical].certificate.is_none());
        assert!(r.m_conditions[&Condition::Klt].certificate.is_some());
    }

    #[test]
    fn withholds_global_verdict_without_log_resolution() {
        let mut m = builtin("p1xp1", &[1, 2]).unwrap();
        m.log_resolution = false;
        let r = classify(&m, &[1]).unwrap();
        assert_eq!(r.lt_plus, None);
        assert_eq!(r.j_plus_trivial, None);
        assert!(r.flags.iter().any(|f| f.starts_with("not-log-resolution")));
    }
}

use std::fmt;

use crate::lattice::{ClassVector, Rat};
use crate::models::{ModelCaveat, PolarizedModel};

use super::{finite, t_invariant, EngineError};

/// Pair conditions a boundary can certify, with the matching `M`-condition on
/// m-limiting discrepancies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    LogCanonical,
    Klt,
    Canonical,
    Terminal,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::LogCanonical,
        Condition::Klt,
        Condition::Canonical,
        Condition::Terminal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::LogCanonical => "lc",
            Condition::Klt => "klt",
            Condition::Canonical => "canonical",
            Condition::Terminal => "terminal",
        }
    }

    pub fn m_condition(self) -> &'static str {
        match self {
            Condition::LogCanonical => "M>=-1",
            Condition::Klt => "M>-1",
            Condition::Canonical => "M>=0",
            Condition::Terminal => "M>0",
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
    }

    /// Discrepancy threshold and whether it is strict.
    pub fn discrepancy_threshold(self) -> (Rat, bool) {
        match self {
            Condition::LogCanonical => (Rat::from_int(-1), false),
            Condition::Klt => (Rat::from_int(-1), true),
            Condition::Canonical => (Rat::zero(), false),
            Condition::Terminal => (Rat::zero(), true),
        }
    }

    /// Whether a discrepancy meets the threshold.
    pub fn admits(self, discrepancy: &Rat) -> bool {
        let (bound, strict) = self.discrepancy_threshold();
        if strict {
            *discrepancy > bound
        } else {
            *discrepancy >= bound
        }
    }

    /// Bound on `r` in `B = rL - K_V`, from `discrepancy = -1 - r`.
    fn r_threshold(self) -> (Rat, bool) {
        let (bound, strict) = self.discrepancy_threshold();
        (Rat::from_int(-1) - bound, strict)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class-level witness of a boundary `Δ = C_B` with `K_X + Δ` Q-Cartier.
///
/// `K_X + C_B = C_{K_V - L + B} = C_{(r - 1)L}`, so the log discrepancy of
/// `(X, C_B)` along `E` is `-1 - r` as long as a general member of `|B|`
/// makes the vertex blow-up a log resolution of the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCertificate {
    pub condition: Condition,
    pub r: Rat,
    pub boundary: ClassVector,
    pub discrepancy_at_e: Rat,
    /// Always set: only the discrepancy at `E` is certified.
    pub genericity_assumed: bool,
    /// Model-specific reasons the genericity assumption is known to fail.
    pub caveats: Vec<ModelCaveat>,
}

/// Best class-level boundary for `condition`, if one exists.
///
/// `r_min = t(K_V)` is the infimum of `r` with `rL - K_V` Q-effective. When it
/// is attained and inside the allowed range it is returned; otherwise a
/// rational strictly between `r_min` and the threshold is used. A strict
/// condition is never certified by `r` sitting exactly on the threshold.
pub fn boundary_certificate(
    model: &PolarizedModel,
    condition: Condition,
) -> Result<Option<BoundaryCertificate>, EngineError> {
    let (r_min, attained) = finite(t_invariant(model, &model.k)?)?;
    let (bound, strict) = condition.r_threshold();
    let r = if attained && (r_min < bound || (!strict && r_min == bound)) {
        r_min
    } else if r_min < bound {
        (&r_min + &bound) / Rat::from_int(2)
    } else {
        return Ok(None);
    };
    let boundary = &model.l.scale(&r) - &model.k;
    if !model.q_effective(&boundary)? {
        return Ok(None);
    }
    let discrepancy_at_e = Rat::from_int(-1) - &r;
    debug_assert!(condition.admits(&discrepancy_at_e));
    let caveats = model
        .caveats
        .iter()
        .copied()
        .filter(|c| *c == ModelCaveat::ConeBoundaryNotLogResolution)
        .collect();
    Ok(Some(BoundaryCertificate {
        condition,
        r,
        boundary,
        discrepancy_at_e,
        genericity_assumed: true,
        caveats,
    }))
}

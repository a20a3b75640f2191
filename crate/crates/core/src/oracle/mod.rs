//! Brute-force reimplementations of the two solver kernels.
//!
//! Everything here talks to a model only through `q_effective` and
//! `z_effective`: no facet data, no closed forms. A bug in the engine's
//! infimum or search therefore cannot leak into the values used to check it.

mod fixtures;
mod suite;

pub use fixtures::{parse_fixtures, FixtureLine, FixtureQuantity};
pub use suite::{equivalence_suite, CheckOutcome, SuiteReport};

use std::cell::Cell;

use thiserror::Error;

use crate::lattice::{ClassVector, Rat};
use crate::models::{ModelError, PolarizedModel};

/// Hard limit on effectivity queries per scan.
pub const MAX_QUERIES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    /// Largest denominator of the rational grid used for `t`.
    pub denominator_bound: u64,
    /// `k` range for `κ_m` scans, per unit of `m`: `[lo·m, hi·m]`.
    pub k_range: (i64, i64),
    /// Integer bracket `[-b, b]` searched for `t` before refining.
    pub s_bracket: i64,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            denominator_bound: 60,
            k_range: (-100, 100),
            s_bracket: 200,
            sample_count: 500,
            seed: 0x5eed_c0de,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("scan bounds too small to bracket the infimum: {0}")]
    BoundTooSmall(String),
    #[error("no feasible k in [{lo}, {hi}]")]
    EmptyFeasibleSet { lo: i64, hi: i64 },
    #[error("query cap of {MAX_QUERIES} effectivity checks exceeded")]
    QueryCap,
    #[error("invalid scan configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Infimum found by the scan, with whether it is attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScannedInfimum {
    pub value: Rat,
    pub attained: bool,
}

struct Budget(Cell<u64>);

impl Budget {
    fn new() -> Self {
        Budget(Cell::new(0))
    }

    fn spend(&self) -> Result<(), OracleError> {
        let n = self.0.get() + 1;
        if n > MAX_QUERIES {
            return Err(OracleError::QueryCap);
        }
        self.0.set(n);
        Ok(())
    }
}

/// Farey sequence of order `bound`: every reduced `p/q` in `[0, 1]` with
/// `q <= bound`, ascending, as `(p, q)`.
fn farey(bound: u64) -> Vec<(i64, i64)> {
    let n = bound as i64;
    let mut out = vec![(0, 1)];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    while c <= n {
        out.push((c, d));
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    out
}

/// Least index in `lo..=hi` where the monotone predicate holds, given that it
/// fails at `lo` and holds at `hi`.
fn bisect(
    mut lo: i64,
    mut hi: i64,
    holds: &dyn Fn(i64) -> Result<bool, OracleError>,
) -> Result<i64, OracleError> {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(greatest non-effective, least effective)` among `base + p/q` over the
/// Farey sequence of order `bound`.
fn bracket_on_grid(
    base: i64,
    bound: u64,
    eff: &dyn Fn(&Rat) -> Result<bool, OracleError>,
) -> Result<(Rat, Rat), OracleError> {
    let grid = farey(bound);
    let at = |i: usize| {
        let (p, q) = grid[i];
        Rat::new(base * q + p, q)
    };
    let i = bisect(0, grid.len() as i64 - 1, &|i| eff(&at(i as usize)))? as usize;
    Ok((at(i - 1), at(i)))
}

/// `inf{s : sL - D Q-effective}` by scanning rationals.
///
/// Finds the least effective integer `n` in the bracket, then searches the
/// fractions with denominator at most `N` and `2N` inside `[n - 1, n]`. If the
/// least effective grid point is the same at both resolutions, it is the
/// infimum and is attained; if instead the greatest non-effective point is
/// stable, that point is an infimum that is not attained.
///
/// Searches rely only on effectivity being stable under adding `L`.
pub fn oracle_t(
    model: &PolarizedModel,
    d: &ClassVector,
    cfg: &ScanConfig,
) -> Result<ScannedInfimum, OracleError> {
    if cfg.denominator_bound == 0 || cfg.s_bracket <= 0 {
        return Err(OracleError::BadConfig("bounds must be positive".into()));
    }
    let budget = Budget::new();
    let eff = |s: &Rat| -> Result<bool, OracleError> {
        budget.spend()?;
        Ok(model.q_effective(&(&model.l.scale(s) - d))?)
    };
    let eff_int = |n: i64| eff(&Rat::from_int(n));

    let b = cfg.s_bracket;
    if eff_int(-b)? {
        return Err(OracleError::BoundTooSmall(format!(
            "s = {} already effective at the bracket edge",
            -b
        )));
    }
    if !eff_int(b)? {
        return Err(OracleError::BoundTooSmall(format!("no effective integer s in ±{b}")));
    }
    let n = bisect(-b, b, &eff_int)?;

    let coarse = bracket_on_grid(n - 1, cfg.denominator_bound, &eff)?;
    let fine = bracket_on_grid(n - 1, 2 * cfg.denominator_bound, &eff)?;
    if coarse.1 == fine.1 {
        Ok(ScannedInfimum {
            value: coarse.1,
            attained: true,
        })
    } else if coarse.0 == fine.0 {
        Ok(ScannedInfimum {
            value: coarse.0,
            attained: false,
        })
    } else {
        Err(OracleError::BoundTooSmall(format!(
            "infimum in ({}, {}) has denominator above {}",
            fine.0, fine.1, cfg.denominator_bound
        )))
    }
}

/// `min{k : kL - mD integrally effective}` over `[lo·m, hi·m]`.
///
/// `L` is checked to be integrally effective, which makes the predicate
/// monotone in `k`, so the minimum is found by bisection.
pub fn oracle_kappa(
    model: &PolarizedModel,
    d: &ClassVector,
    m: u64,
    cfg: &ScanConfig,
) -> Result<i64, OracleError> {
    if m == 0 {
        return Err(OracleError::BadConfig("m must be positive".into()));
    }
    if !model.z_effective(&model.l)? {
        return Err(OracleError::BadConfig("L is not integrally effective".into()));
    }
    let budget = Budget::new();
    let md = d.scale_int(m as i64);
    let feasible = |k: i64| -> Result<bool, OracleError> {
        budget.spend()?;
        Ok(model.z_effective(&(&model.l.scale_int(k) - &md))?)
    };
    let (lo, hi) = (cfg.k_range.0 * m as i64, cfg.k_range.1 * m as i64);
    if !feasible(hi)? {
        return Err(OracleError::EmptyFeasibleSet { lo, hi });
    }
    if feasible(lo)? {
        return Ok(lo);
    }
    bisect(lo, hi, &feasible)
}

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    antisymmetry_check, cartier_test, kappa, numerically_trivial, pullback, pullback_restriction,
    relative_canonical, t_invariant, Side,
};
use crate::lattice::{ClassVector, Rat};
use crate::models::{EquivalenceMode, PolarizedModel};

use super::{oracle_kappa, oracle_t, ScanConfig};

/// `m` values used for κ agreement and the divisibility checks.
const M_MAX: u64 = 12;
const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub counterexamples: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            passed: 0,
            failed: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(context());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub model: String,
    pub samples: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} samples)", self.model, self.samples)?;
        for c in &self.checks {
            let status = if c.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "  {status} {:<32} {} ok, {} failed", c.name, c.passed, c.failed)?;
            for ce in &c.counterexamples {
                writeln!(f, "       {ce}")?;
            }
        }
        Ok(())
    }
}

struct Checks {
    list: Vec<CheckOutcome>,
}

impl Checks {
    fn get(&mut self, name: &'static str) -> &mut CheckOutcome {
        if let Some(i) = self.list.iter().position(|c| c.name == name) {
            return &mut self.list[i];
        }
        self.list.push(CheckOutcome::new(name));
        self.list.last_mut().expect("just pushed")
    }

    fn record(&mut self, name: &'static str, ok: bool, context: impl FnOnce() -> String) {
        self.get(name).record(ok, context);
    }
}

fn sample_divisor(model: &PolarizedModel, rng: &mut ChaCha8Rng) -> ClassVector {
    let rank = model.rank();
    let numerical = model.numerical_coords();
    match rng.gen_range(0..4) {
        0 => model.l.scale_int(rng.gen_range(-20..=20)),
        1 => {
            // Zero in every Pic⁰-type coordinate.
            let coords = (0..rank)
                .map(|i| {
                    if numerical.contains(&i) {
                        Rat::from_int(rng.gen_range(-50..=50))
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            ClassVector::new(coords)
        }
        _ => ClassVector::new((0..rank).map(|_| Rat::from_int(rng.gen_range(-50..=50))).collect()),
    }
}

fn random_rat(rng: &mut ChaCha8Rng, max_den: i64, max_abs: i64) -> Rat {
    let q = rng.gen_range(1..=max_den);
    Rat::new(rng.gen_range(-max_abs * q..=max_abs * q), q)
}

/// Randomized agreement between engine and oracle on one model, plus the
/// structural properties of pullbacks along `E`.
pub fn equivalence_suite(model: &PolarizedModel, cfg: &ScanConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Checks { list: Vec::new() };
    model_level_checks(model, &mut checks);
    for _ in 0..cfg.sample_count {
        let d = sample_divisor(model, &mut rng);
        sample_checks(model, &d, cfg, &mut rng, &mut checks);
    }
    SuiteReport {
        model: model.name.clone(),
        samples: cfg.sample_count,
        checks: checks.list,
    }
}

fn model_level_checks(model: &PolarizedModel, checks: &mut Checks) {
    let chain = (|| -> Result<(), String> {
        let rc = |side, m| relative_canonical(model, side, m).map_err(|e| e.to_string());
        let km = rc(Side::Minus, None)?;
        let kp = rc(Side::Plus, None)?;
        if km > kp {
            return Err(format!("K- = {km} > K+ = {kp}"));
        }
        for m in 1..=M_MAX {
            let km_m = rc(Side::Minus, Some(m))?;
            let kp_m = rc(Side::Plus, Some(m))?;
            if km_m > km {
                return Err(format!("K-_{m} = {km_m} > K- = {km}"));
            }
            if kp_m < kp {
                return Err(format!("K+_{m} = {kp_m} < K+ = {kp}"));
            }
            for q in 2..=(M_MAX / m) {
                let km_qm = rc(Side::Minus, Some(q * m))?;
                let kp_qm = rc(Side::Plus, Some(q * m))?;
                if km_m > km_qm {
                    return Err(format!("K-_{m} = {km_m} > K-_{} = {km_qm}", q * m));
                }
                if kp_qm > kp_m {
                    return Err(format!("K+_{} = {kp_qm} > K+_{m} = {kp_m}", q * m));
                }
            }
        }
        Ok(())
    })();
    checks.record("discrepancy-chain", chain.is_ok(), || chain.clone().unwrap_err());

    let minus_limit = (|| -> Result<bool, crate::engine::EngineError> {
        let km = relative_canonical(model, Side::Minus, None)?;
        let t = t_invariant(model, &model.k)?;
        Ok(t.finite().is_some_and(|t| km == Rat::from_int(-1) - t))
    })();
    checks.record("minus-limit-from-t-of-canonical", minus_limit == Ok(true), || format!("{minus_limit:?}"));
}

fn sample_checks(
    model: &PolarizedModel,
    d: &ClassVector,
    cfg: &ScanConfig,
    rng: &mut ChaCha8Rng,
    checks: &mut Checks,
) {
    let engine_t = match t_invariant(model, d) {
        Ok(t) => t,
        Err(e) => {
            checks.record("engine-terminates", false, || format!("D=({d}): {e}"));
            return;
        }
    };
    checks.record("engine-terminates", true, String::new);
    let t = engine_t.finite().expect("built-in models give finite t").clone();

    let scanned = oracle_t(model, d, cfg);
    checks.record(
        "t-oracle-agreement",
        scanned
            .as_ref()
            .is_ok_and(|s| s.value == t && s.attained == engine_t.attained),
        || format!("D=({d}): engine {engine_t}, oracle {scanned:?}"),
    );
    if !engine_t.attained {
        checks.record(
            "t-oracle-agreement-not-attained",
            scanned.as_ref().is_ok_and(|s| s.value == t && !s.attained),
            || format!("D=({d}): engine {engine_t}, oracle {scanned:?}"),
        );
    }

    // κ_m for m = 1..=M_MAX, engine vs. oracle.
    let mut kappas = vec![0i64; M_MAX as usize + 1];
    for m in 1..=M_MAX {
        let engine_k = kappa(model, d, m);
        let oracle_k = oracle_kappa(model, d, m, cfg);
        let ok = matches!((&engine_k, &oracle_k), (Ok(a), Ok(b)) if a == b);
        checks.record("kappa-oracle-agreement", ok, || {
            format!("D=({d}) m={m}: engine {engine_k:?}, oracle {oracle_k:?}")
        });
        if let Ok(k) = engine_k {
            kappas[m as usize] = k;
        }
    }
    for m in 1..=M_MAX {
        let km = kappas[m as usize];
        let normalized = Rat::new(km, m as i64);
        checks.record("kappa-over-m-at-least-t", normalized >= t, || {
            format!("D=({d}) m={m}: κ/m = {normalized} < t = {t}")
        });
        for m2 in 1..=(M_MAX - m) {
            let ok = kappas[(m + m2) as usize] <= km + kappas[m2 as usize];
            checks.record("kappa-subadditive", ok, || format!("D=({d}) m={m} m'={m2}"));
        }
        for q in 2..=(M_MAX / m) {
            let ok = kappas[(q * m) as usize] <= q as i64 * km;
            checks.record("kappa-multiple-bound", ok, || format!("D=({d}) m={m} q={q}"));
        }
    }

    // Exact convergence at the denominator of t for cone-integral models.
    if model.is_polyhedral() && model.gap_bound == 0 {
        if let Some(den) = t.denom().try_into().ok().filter(|&x: &u64| x <= 1000) {
            let k = kappa(model, d, den);
            checks.record(
                "kappa-exact-at-denominator",
                k.as_ref().is_ok_and(|&k| Rat::new(k, den as i64) == t),
                || format!("D=({d}) m={den}: {k:?} vs t = {t}"),
            );
        }
    }

    // t is the infimum: effective at t iff attained, never below.
    let at_t = &model.l.scale(&t) - d;
    checks.record(
        "infimum-tight",
        model.q_effective(&at_t).ok() == Some(engine_t.attained),
        || format!("D=({d}) at t = {t}"),
    );
    for _ in 0..3 {
        let gap = Rat::new(rng.gen_range(1..=1000), rng.gen_range(1..=1000));
        let s = &t - &gap;
        let below = &model.l.scale(&s) - d;
        checks.record("infimum-tight", model.q_effective(&below).ok() == Some(false), || {
            format!("D=({d}) effective at s = {s} < t = {t}")
        });
    }

    // Any witness r with rL - D effective bounds t from above.
    for _ in 0..3 {
        let r = random_rat(rng, 12, 60);
        if model.q_effective(&(&model.l.scale(&r) - d)) == Ok(true) {
            checks.record("boundary-infimum-bound", t <= r, || format!("D=({d}) r = {r} < t = {t}"));
        }
    }

    let restriction = match pullback_restriction(model, d) {
        Ok(r) => r,
        Err(e) => {
            checks.record("restriction", false, || format!("D=({d}): {e}"));
            return;
        }
    };

    if let Some(cone) = model.cone() {
        let anti = -&restriction;
        checks.record(
            "restriction-antieffective",
            crate::lattice::cone_member(cone, &anti) == Ok(true),
            || format!("D=({d}) restriction ({restriction})"),
        );
    }

    let cartier = cartier_test(model, d).expect("rank checked");
    if model.equivalence == EquivalenceMode::Linear {
        let zero = restriction.is_zero();
        let ok = zero == cartier.q_cartier.is_some()
            && cartier
                .q_cartier
                .as_ref()
                .is_none_or(|r| pullback(model, d).is_ok_and(|b| b.e_coeff == *r));
        checks.record("restriction-zero-iff-q-cartier", ok, || {
            format!("D=({d}) restriction ({restriction}) q-cartier {:?}", cartier.q_cartier)
        });
    }

    let anti = antisymmetry_check(model, d);
    let num_trivial = numerically_trivial(model, &restriction);
    let num_cartier = cartier.num_cartier.is_some();
    checks.record(
        "antisymmetric-iff-num-trivial-iff-num-cartier",
        anti.as_ref().is_ok_and(|&a| a == num_trivial && a == num_cartier),
        || format!("D=({d}) antisymmetric {anti:?}, num-trivial {num_trivial}, num-cartier {num_cartier}"),
    );
    if let Some(r) = &cartier.num_cartier {
        checks.record("num-cartier-coefficient-is-t", *r == t, || {
            format!("D=({d}) r = {r}, t = {t}")
        });
    }

    effectivity_checks(model, rng, checks);
}

fn effectivity_checks(model: &PolarizedModel, rng: &mut ChaCha8Rng, checks: &mut Checks) {
    let rank = model.rank();
    let v = ClassVector::new((0..rank).map(|_| Rat::from_int(rng.gen_range(-20..=20))).collect());
    let z = model.z_effective(&v).expect("integral");
    let q = model.q_effective(&v).expect("rank checked");
    checks.record("z-effective-implies-q-effective", !z || q, || format!("v=({v})"));

    let w = ClassVector::new((0..rank).map(|_| random_rat(rng, 9, 20)).collect());
    let scale = Rat::new(rng.gen_range(1..=50), rng.gen_range(1..=50));
    let qw = model.q_effective(&w).expect("rank checked");
    let qsw = model.q_effective(&w.scale(&scale)).expect("rank checked");
    checks.record("q-effective-scaling", !qw || qsw, || format!("v=({w}) q={scale}"));

    if model.is_polyhedral() && !w.is_zero() {
        let both = qw && model.q_effective(&-&w).expect("rank checked");
        checks.record("salient", !both, || format!("v=({w})"));
    }
}

//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use conesing::engine::{
    antisymmetry_check, boundary_certificate, cartier_test, classify, multiplier_ideal_trivial,
    natural_pullback, numerically_trivial, pullback, pullback_restriction, relative_canonical,
    Condition, Side,
};
use conesing::lattice::{ClassVector, Rat};
use conesing::models::{builtin, parse_config, EquivalenceMode, ModelCaveat, PolarizedModel};
use conesing::oracle::{equivalence_suite, ScanConfig};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn cv(v: &[i64]) -> ClassVector {
    ClassVector::from_ints(v)
}

fn model(name: &str, params: &[i64]) -> PolarizedModel {
    builtin(name, params).expect("built-in model")
}

fn check<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Outcome {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn ensure(what: &str, ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn criterion_1() -> Outcome {
    let m = model("p1xp1", &[1, 2]);
    for k in 1..=20 {
        check(&format!("K-_{k}"), relative_canonical(&m, Side::Minus, Some(k)).unwrap(), Rat::zero())?;
    }
    check("K-", relative_canonical(&m, Side::Minus, None).unwrap(), Rat::zero())?;
    let kx = m.canonical_cone_class();
    check("f*(K_X)|_E", pullback_restriction(&m, &kx).unwrap(), cv(&[-1, 0]))?;
    let c = boundary_certificate(&m, Condition::Canonical)
        .unwrap()
        .ok_or("no canonical certificate")?;
    check("canonical r", c.r, r(-1, 1))?;
    check("canonical B", c.boundary, cv(&[1, 0]))?;
    check("discrepancy at E", c.discrepancy_at_e, Rat::zero())
}

fn criterion_2() -> Outcome {
    let m = model("p1xp1", &[2, 3]);
    check("K-", relative_canonical(&m, Side::Minus, None).unwrap(), r(-1, 3))?;
    check("K+", relative_canonical(&m, Side::Plus, None).unwrap(), Rat::zero())?;
    ensure(
        "canonical certificate should be absent",
        boundary_certificate(&m, Condition::Canonical).unwrap().is_none(),
    )?;
    let c = boundary_certificate(&m, Condition::Klt)
        .unwrap()
        .ok_or("no klt certificate")?;
    check("klt discrepancy", c.discrepancy_at_e, r(-1, 3))
}

fn criterion_3() -> Outcome {
    let m = model("projective_line", &[2]);
    let d = cv(&[1]);
    let nat = natural_pullback(&m, &d, 1).unwrap();
    check("natural pullback", (nat.strict, nat.e_coeff), (d.clone(), r(1, 1)))?;
    check("pullback e", pullback(&m, &d).unwrap().e_coeff, r(1, 2))?;
    let c = cartier_test(&m, &d).unwrap();
    check("q-cartier r", c.q_cartier, Some(r(1, 2)))?;
    check("num-cartier r", c.num_cartier, Some(r(1, 2)))
}

fn criterion_4() -> Outcome {
    let m = model("elliptic_curve", &[3, 1]);
    let t = cv(&[0, 1]);
    let b = pullback(&m, &t).unwrap();
    check("strict", b.strict, t.clone())?;
    check("e", b.e_coeff, Rat::zero())?;
    ensure("e should not be attained", !b.exact)?;
    let res = pullback_restriction(&m, &t).unwrap();
    ensure("restriction should be nonzero", !res.is_zero())?;
    ensure("restriction should be numerically trivial", numerically_trivial(&m, &res))?;
    let c = cartier_test(&m, &t).unwrap();
    check("q-cartier", c.q_cartier, None)?;
    check("num-cartier", c.num_cartier, Some(Rat::zero()))?;
    ensure("antisymmetry", antisymmetry_check(&m, &t).unwrap())
}

fn criterion_5() -> Outcome {
    let m = model("elliptic_fibration", &[3]);
    check("K+", relative_canonical(&m, Side::Plus, None).unwrap(), r(-1, 1))?;
    let report = classify(&m, &(1..=12).collect::<Vec<_>>()).unwrap();
    check("lt+", report.lt_plus, Some(false))?;
    ensure("multiplier ideal should be nontrivial", !multiplier_ideal_trivial(&m).unwrap().trivial)?;
    for (k, v) in &report.ord_k_plus_m {
        check(&format!("K+_{k}"), v.clone(), r(-1, 1))?;
    }
    let code = ModelCaveat::ClassLevelPlusLimits.code();
    ensure(
        "class-level discrepancy flag",
        report.flags.iter().any(|f| f.starts_with(code)),
    )
}

fn criterion_6() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fano_aw_n2.cfg");
    let m = parse_config(&std::fs::read_to_string(path).unwrap()).map_err(|e| e.to_string())?;
    check("K-", relative_canonical(&m, Side::Minus, None).unwrap(), r(-1, 2))?;
    let c = boundary_certificate(&m, Condition::Klt)
        .unwrap()
        .ok_or("no klt certificate")?;
    ensure("genericity assumed", c.genericity_assumed)?;
    check("caveats", c.caveats, vec![ModelCaveat::ConeBoundaryNotLogResolution])
}

fn criterion_7() -> Outcome {
    let cfg = ScanConfig::default();
    assert!(cfg.sample_count >= 500);
    let models = [
        model("projective_line", &[1]),
        model("projective_line", &[2]),
        model("p1xp1", &[1, 2]),
        model("p1xp1", &[2, 3]),
        model("elliptic_curve", &[3, 1]),
        model("elliptic_fibration", &[3]),
        model("fano_fourfold_AW", &[2]),
    ];
    for m in &models {
        let report = equivalence_suite(m, &cfg);
        if !report.all_passed() {
            return Err(format!("{report}"));
        }
        let mut required = vec![
            "t-oracle-agreement",
            "kappa-oracle-agreement",
            "discrepancy-chain",
            "kappa-subadditive",
            "kappa-over-m-at-least-t",
            "antisymmetric-iff-num-trivial-iff-num-cartier",
        ];
        if m.equivalence == EquivalenceMode::Linear {
            required.push("restriction-zero-iff-q-cartier");
        }
        if m.is_polyhedral() {
            required.push("restriction-antieffective");
        } else {
            required.push("t-oracle-agreement-not-attained");
        }
        for name in required {
            let c = report
                .check(name)
                .ok_or_else(|| format!("{}: check {name} did not run", m.name))?;
            ensure(&format!("{}: {name} ran no instances", m.name), c.passed > 0)?;
        }
        let t = report.check("t-oracle-agreement").unwrap();
        ensure(&format!("{}: fewer than 500 samples", m.name), t.passed >= 500)?;
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_conesing"))
            .args(["corpus", "run"])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    check("exit code", first.status.code(), Some(0))?;
    ensure("byte-identical output", first.stdout == second.stdout)?;
    let text = String::from_utf8(first.stdout).unwrap();
    let pass = text.lines().filter(|l| l.starts_with("PASS")).count();
    let fail = text.lines().filter(|l| l.starts_with("FAIL")).count();
    ensure(&format!("{pass} PASS rows, {fail} FAIL rows"), pass >= 14 && fail == 0)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("(1:2) cone: K-_m = K- = 0, f*(K_X)|_E = (-1,0), canonical boundary r = -1", criterion_1),
        ("(2:3) cone: K- = -1/3, K+ = 0, klt but no canonical boundary", criterion_2),
        ("conic cone: natural pullback e = 1, pullback e = 1/2, Cartier r = 1/2", criterion_3),
        ("elliptic-curve cone: non-attained pullback, numerically Cartier only", criterion_4),
        ("elliptic-fibration cone: K+ = -1, not lt+, K+_m = -1 flagged", criterion_5),
        ("Fano fourfold config n = 2: K- = -1/2, klt certificate with caveat", criterion_6),
        ("property suites: 500 samples per built-in model, zero failures", criterion_7),
        ("corpus run: exit 0, >= 14 PASS rows, byte-deterministic", criterion_8),
    ];
    let mut failed = 0;
    for (i, (desc, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {desc}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {desc}\n    {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

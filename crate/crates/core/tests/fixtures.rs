//! Pinned values in data/fixtures.txt, checked against both the oracle and
//! the engine.

use conesing::engine::{kappa, t_invariant};
use conesing::lattice::{ExtRat, Rat};
use conesing::models::parse_model_ref;
use conesing::oracle::{oracle_kappa, oracle_t, parse_fixtures, FixtureQuantity, ScanConfig};

const FIXTURES: &str = include_str!("../data/fixtures.txt");

#[test]
fn fixtures_match_oracle_and_engine() {
    let cfg = ScanConfig::default();
    let lines = parse_fixtures(FIXTURES).unwrap();
    assert!(lines.len() >= 20);
    for f in &lines {
        let model = parse_model_ref(&f.model_ref).unwrap();
        match f.quantity {
            FixtureQuantity::T | FixtureQuantity::TOpen => {
                let attained = f.quantity == FixtureQuantity::T;
                let scanned = oracle_t(&model, &f.d, &cfg).unwrap();
                assert_eq!((&scanned.value, scanned.attained), (&f.value, attained), "oracle, {f}");
                let expected = if attained {
                    ExtRat::attained(f.value.clone())
                } else {
                    ExtRat::open(f.value.clone())
                };
                assert_eq!(t_invariant(&model, &f.d).unwrap(), expected, "engine, {f}");
            }
            FixtureQuantity::Kappa => {
                let m = f.m.unwrap();
                let k = Rat::from_int(oracle_kappa(&model, &f.d, m, &cfg).unwrap());
                assert_eq!(k, f.value, "oracle, {f}");
                let k = Rat::from_int(kappa(&model, &f.d, m).unwrap());
                assert_eq!(k, f.value, "engine, {f}");
            }
        }
    }
}

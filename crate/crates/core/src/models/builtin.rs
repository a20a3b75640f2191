use crate::lattice::{ClassVector, EffConeSpec};

use super::{EffRule, EquivalenceMode, ModelCaveat, ModelError, PolarizedModel};

pub struct BuiltinInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub fn builtin_catalog() -> &'static [BuiltinInfo] {
    &[
        BuiltinInfo {
            name: "projective_line",
            params: "d >= 1",
            summary: "P^1 embedded by O(d); d = 2 is the conic, d = 1 gives the smooth cone P^2",
        },
        BuiltinInfo {
            name: "p1xp1",
            params: "a >= 1, b >= 1",
            summary: "P^1 x P^1 with L = a f_1 + b f_2, effective cone the orthant",
        },
        BuiltinInfo {
            name: "elliptic_curve",
            params: "d >= 1, g >= 0",
            summary: "elliptic curve of degree d, coordinates (degree, g free Pic^0 generators)",
        },
        BuiltinInfo {
            name: "elliptic_fibration",
            params: "e >= 1",
            summary: "elliptic surface over P^1, coordinates (fiber, section), K = f, L = f + e s",
        },
        BuiltinInfo {
            name: "fano_fourfold_AW",
            params: "n >= 2",
            summary: "Fano 4-fold double cover, coordinates (H, S_0), K = -3H - 2S_0, L = -nK - Δ",
        },
    ]
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn expect_params(name: &str, params: &[i64], n: usize) -> Result<(), ModelError> {
    if params.len() != n {
        return Err(ModelError::BadParameters {
            name: name.to_string(),
            reason: format!("expected {n} parameter(s), got {}", params.len()),
        });
    }
    Ok(())
}

fn require(name: &str, ok: bool, reason: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::BadParameters {
            name: name.to_string(),
            reason: reason.to_string(),
        })
    }
}

/// Constructs and validates one of the built-in models.
pub fn builtin(name: &str, params: &[i64]) -> Result<PolarizedModel, ModelError> {
    let model = match name {
        "projective_line" => {
            expect_params(name, params, 1)?;
            let d = params[0];
            require(name, d >= 1, "d must be >= 1")?;
            PolarizedModel {
                name: format!("projective_line:{d}"),
                basis: labels(&["pt"]),
                equivalence: EquivalenceMode::Linear,
                rule: EffRule::Polyhedral(EffConeSpec::orthant(1)),
                k: ClassVector::from_ints(&[-2]),
                l: ClassVector::from_ints(&[d]),
                gap_bound: 0,
                log_resolution: true,
                normality_declared: true,
                caveats: vec![],
            }
        }
        "p1xp1" => {
            expect_params(name, params, 2)?;
            let (a, b) = (params[0], params[1]);
            require(name, a >= 1 && b >= 1, "a and b must be >= 1")?;
            PolarizedModel {
                name: format!("p1xp1:{a},{b}"),
                basis: labels(&["f1", "f2"]),
                equivalence: EquivalenceMode::Linear,
                rule: EffRule::Polyhedral(EffConeSpec::orthant(2)),
                k: ClassVector::from_ints(&[-2, -2]),
                l: ClassVector::from_ints(&[a, b]),
                gap_bound: 0,
                log_resolution: true,
                normality_declared: true,
                caveats: vec![],
            }
        }
        "elliptic_curve" => {
            expect_params(name, params, 2)?;
            let (d, g) = (params[0], params[1]);
            require(name, d >= 1, "d must be >= 1")?;
            require(name, (0..=64).contains(&g), "g must be in 0..=64")?;
            let mut basis = vec!["deg".to_string()];
            basis.extend((1..=g).map(|i| format!("tau{i}")));
            let rank = basis.len();
            let mut l = vec![0; rank];
            l[0] = d;
            PolarizedModel {
                name: format!("elliptic_curve:{d},{g}"),
                basis,
                equivalence: EquivalenceMode::Linear,
                rule: EffRule::EllipticCurve,
                k: ClassVector::zero(rank),
                l: ClassVector::from_ints(&l),
                gap_bound: 0,
                log_resolution: true,
                normality_declared: true,
                caveats: vec![],
            }
        }
        "elliptic_fibration" => {
            expect_params(name, params, 1)?;
            let e = params[0];
            require(name, e >= 1, "e must be >= 1")?;
            PolarizedModel {
                name: format!("elliptic_fibration:{e}"),
                basis: labels(&["fiber", "section"]),
                equivalence: EquivalenceMode::Numerical,
                rule: EffRule::Polyhedral(EffConeSpec::orthant(2)),
                k: ClassVector::from_ints(&[1, 0]),
                l: ClassVector::from_ints(&[1, e]),
                gap_bound: 0,
                log_resolution: true,
                normality_declared: true,
                caveats: vec![ModelCaveat::ClassLevelPlusLimits],
            }
        }
        "fano_fourfold_AW" => {
            expect_params(name, params, 1)?;
            let n = params[0];
            require(name, n >= 2, "n must be >= 2 (L = -nK - Δ is very ample only then)")?;
            let k = ClassVector::from_ints(&[-3, -2]);
            let delta = ClassVector::from_ints(&[0, 1]);
            let l = &k.scale_int(-n) - &delta;
            PolarizedModel {
                name: format!("fano_fourfold_AW:{n}"),
                basis: labels(&["H", "S0"]),
                equivalence: EquivalenceMode::Numerical,
                rule: EffRule::Polyhedral(EffConeSpec::orthant(2)),
                k,
                l,
                gap_bound: 0,
                log_resolution: true,
                normality_declared: true,
                caveats: vec![ModelCaveat::ConeBoundaryNotLogResolution],
            }
        }
        other => return Err(ModelError::UnknownModel(other.to_string())),
    };
    model.validate()?;
    Ok(model)
}

/// Parses `name:p1,p2,...` (e.g. `p1xp1:1,2`) into a built-in model.
pub fn parse_model_ref(reference: &str) -> Result<PolarizedModel, ModelError> {
    let (name, params) = reference.split_once(':').unwrap_or((reference, ""));
    let params = if params.trim().is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ModelError::BadParameters {
                name: name.to_string(),
                reason: format!("parameters `{params}` are not integers"),
            })?
    };
    builtin(name.trim(), &params)
}

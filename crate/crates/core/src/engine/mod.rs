//! Divisors on the blow-up `f: Y -> X` of the vertex of the cone over `(V, L)`.
//!
//! The exceptional divisor `E` is isomorphic to `V` with `E|_E = -L`, and a
//! cone divisor `C_D` over a class `D` on `V` pulls back to its strict
//! transform plus a multiple of `E`. All quantities here are coefficients
//! along `E`; nothing is computed along other valuations.
//!
//! Sections of `O_X(-m C_D)` split by the cone grading into pieces of degree
//! `k` identified with sections of `kL - mD` on `V`, and a degree-`k` piece
//! vanishes to order exactly `k` along `E`. So the natural pullback of `m C_D`
//! has `E`-coefficient `min{k : kL - mD integrally effective}`, and its
//! normalized limit is `t(D) = inf{s : sL - D Q-effective}`.

mod certificate;
mod report;

pub use certificate::{boundary_certificate, BoundaryCertificate, Condition};
pub use report::{classify, default_m_samples, MConditionEntry, SingularityReport};

use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::lattice::{
    int_feasible_min, ratio_infimum, ClassVector, ExtRat, ExtValue, LatticeError, Rat,
    DEFAULT_HARD_CAP,
};
use crate::models::{EffRule, EquivalenceMode, ModelError, PolarizedModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model {0} does not declare the vertex blow-up to be a log resolution")]
    NotLogResolution(String),
    #[error("solver returned a non-finite infimum")]
    NonFinite,
}

impl EngineError {
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::Lattice(e) => e.kind(),
            EngineError::Model(e) => e.kind(),
            EngineError::NotLogResolution(_) => "not-log-resolution",
            EngineError::NonFinite => "non-finite",
        }
    }

    pub fn is_usage(&self) -> bool {
        match self {
            EngineError::Lattice(e) | EngineError::Model(ModelError::Lattice(e)) => e.is_usage(),
            EngineError::Model(_) => true,
            _ => false,
        }
    }
}

/// `f⁻¹_* C_strict + e_coeff · E` on the blow-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupDivisor {
    pub strict: ClassVector,
    pub e_coeff: Rat,
    /// `false` when `e_coeff` is a limit that no finite stage attains.
    pub exact: bool,
}

impl fmt::Display for BlowupDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strict ({}) + ({})E", self.strict, self.e_coeff)?;
        if !self.exact {
            f.write_str(" [limit not attained]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

fn finite(t: ExtRat) -> Result<(Rat, bool), EngineError> {
    match t.value {
        ExtValue::Finite(r) => Ok((r, t.attained)),
        _ => Err(EngineError::NonFinite),
    }
}

/// `t(D) = inf{s : sL - D is Q-effective}` with its attainment flag.
pub fn t_invariant(model: &PolarizedModel, d: &ClassVector) -> Result<ExtRat, EngineError> {
    model.check_rank(d)?;
    match &model.rule {
        EffRule::Polyhedral(cone) => Ok(ratio_infimum(cone, &model.l, d)?),
        EffRule::EllipticCurve => {
            // Q-effectivity only sees the degree once the class is nonzero.
            let t = &d.coords()[0] / &model.l.coords()[0];
            let at_t = &model.l.scale(&t) - d;
            Ok(ExtRat {
                attained: model.q_effective(&at_t)?,
                value: ExtValue::Finite(t),
            })
        }
    }
}

/// `κ_m(D) = min{k ∈ Z : kL - mD integrally effective}`.
pub fn kappa(model: &PolarizedModel, d: &ClassVector, m: u64) -> Result<i64, EngineError> {
    model.check_rank(d)?;
    if !d.is_integral() {
        return Err(LatticeError::NonIntegral(d.to_string()).into());
    }
    let (t, _) = finite(t_invariant(model, d)?)?;
    let hint = t * Rat::from_int(m as i64);
    Ok(int_feasible_min(
        model,
        &model.l,
        d,
        m,
        &hint,
        model.gap_bound,
        DEFAULT_HARD_CAP,
    )?)
}

/// Natural pullback `f^♮(m C_D) = f⁻¹_* C_{mD} + κ_m(D) E`.
pub fn natural_pullback(
    model: &PolarizedModel,
    d: &ClassVector,
    m: u64,
) -> Result<BlowupDivisor, EngineError> {
    let k = kappa(model, d, m)?;
    Ok(BlowupDivisor {
        strict: d.scale_int(m as i64),
        e_coeff: Rat::from_int(k),
        exact: true,
    })
}

/// Pullback `f^*(C_D) = f⁻¹_* C_D + t(D) E`.
pub fn pullback(model: &PolarizedModel, d: &ClassVector) -> Result<BlowupDivisor, EngineError> {
    let (t, attained) = finite(t_invariant(model, d)?)?;
    Ok(BlowupDivisor {
        strict: d.clone(),
        e_coeff: t,
        exact: attained,
    })
}

/// `K_Y = f⁻¹_* C_{K_V - L} - 2E`, the representative with `f_* K_Y = K_X`.
///
/// Adjunction on `E`: `(K_Y + E)|_E = (K_V - L) + L = K_V`.
pub fn canonical_on_blowup(model: &PolarizedModel) -> BlowupDivisor {
    BlowupDivisor {
        strict: model.canonical_cone_class(),
        e_coeff: Rat::from_int(-2),
        exact: true,
    }
}

/// `ord_E` of `K^-_{m,Y/X}`, `K^-_{Y/X}`, `K^+_{m,Y/X}` or `K^+_{Y/X}`.
///
/// With `D⁻ = K_V - L` (so `K_X = C_{D⁻}`) and `D⁺ = -D⁻`:
/// minus side `-2 - κ_m(D⁻)/m` or `-2 - t(D⁻)`, plus side `-2 + κ_m(D⁺)/m` or
/// `-2 + t(D⁺)`. The strict parts cancel in every case.
pub fn relative_canonical(
    model: &PolarizedModel,
    side: Side,
    m: Option<u64>,
) -> Result<Rat, EngineError> {
    let minus = model.canonical_cone_class();
    let d = match side {
        Side::Minus => minus,
        Side::Plus => -minus,
    };
    let coeff = match m {
        Some(m) => Rat::from_int(kappa(model, &d, m)?) / Rat::from_int(m as i64),
        None => finite(t_invariant(model, &d)?)?.0,
    };
    let base = Rat::from_int(-2);
    Ok(match side {
        Side::Minus => base - coeff,
        Side::Plus => base + coeff,
    })
}

/// Attainment of the limit defining `K^±_{Y/X}` at `E`.
pub fn relative_canonical_attained(model: &PolarizedModel, side: Side) -> Result<bool, EngineError> {
    let minus = model.canonical_cone_class();
    let d = match side {
        Side::Minus => minus,
        Side::Plus => -minus,
    };
    Ok(t_invariant(model, &d)?.attained)
}

/// Class of `B|_E` on `V ≅ E`, using `E|_E = -L`.
pub fn restriction_to_e(model: &PolarizedModel, b: &BlowupDivisor) -> ClassVector {
    &b.strict - &model.l.scale(&b.e_coeff)
}

/// Restriction of the pullback of `C_D` to `E`.
pub fn pullback_restriction(model: &PolarizedModel, d: &ClassVector) -> Result<ClassVector, EngineError> {
    Ok(restriction_to_e(model, &pullback(model, d)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierTest {
    /// `r` with `D ~_Q rL`; only computed for linear-equivalence models.
    pub q_cartier: Option<Rat>,
    /// `r` with `D ≡ rL`.
    pub num_cartier: Option<Rat>,
    pub q_meaningful: bool,
}

/// A cone divisor `C_D` is Q-Cartier iff `D` is proportional to `L`, and
/// numerically Cartier iff it is so in the numerical quotient.
pub fn cartier_test(model: &PolarizedModel, d: &ClassVector) -> Result<CartierTest, EngineError> {
    model.check_rank(d)?;
    let q_meaningful = model.equivalence == EquivalenceMode::Linear;
    let q_cartier = if q_meaningful { d.ratio_to(&model.l) } else { None };
    let idx = model.numerical_coords();
    let num_cartier = d.select(&idx).ratio_to(&model.l.select(&idx));
    Ok(CartierTest {
        q_cartier,
        num_cartier,
        q_meaningful,
    })
}

/// Whether the class is zero in the numerical quotient.
pub fn numerically_trivial(model: &PolarizedModel, v: &ClassVector) -> bool {
    v.select(&model.numerical_coords()).is_zero()
}

/// `f^*(-C_D) = -f^*(C_D)` at `E`, i.e. `t(D) + t(-D) = 0`.
pub fn antisymmetry_check(model: &PolarizedModel, d: &ClassVector) -> Result<bool, EngineError> {
    let (a, _) = finite(t_invariant(model, d)?)?;
    let (b, _) = finite(t_invariant(model, &-d)?)?;
    Ok((a + b).is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplierIdeal {
    /// `⌈ord_E K^+_{Y/X}⌉`.
    pub ceil_coeff: i64,
    pub trivial: bool,
}

/// Triviality of `f_* O_Y(⌈K_Y + f^*(-K_X)⌉)`.
///
/// The strict part of `K^+_{Y/X}` is zero, so the round-up is a multiple of
/// `E` and the ideal is trivial iff that multiple is nonnegative.
pub fn multiplier_ideal_trivial(model: &PolarizedModel) -> Result<MultiplierIdeal, EngineError> {
    if !model.log_resolution {
        return Err(EngineError::NotLogResolution(model.name.clone()));
    }
    let kplus = relative_canonical(model, Side::Plus, None)?;
    let ceil_coeff = kplus.ceil().to_i64().ok_or(LatticeError::Overflow)?;
    Ok(MultiplierIdeal {
        ceil_coeff,
        trivial: ceil_coeff >= 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin, parse_model_ref};

    fn cv(v: &[i64]) -> ClassVector {
        ClassVector::from_ints(v)
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn t_invariant_examples() {
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        assert_eq!(t_invariant(&p, &p.k).unwrap(), ExtRat::attained(r(-1, 1)));
        let e = builtin("elliptic_curve", &[3, 1]).unwrap();
        assert_eq!(t_invariant(&e, &cv(&[0, 1])).unwrap(), ExtRat::open(Rat::zero()));
        assert_eq!(t_invariant(&e, &cv(&[0, 0])).unwrap(), ExtRat::attained(Rat::zero()));
        assert_eq!(t_invariant(&e, &cv(&[2, 0])).unwrap(), ExtRat::attained(r(2, 3)));
    }

    #[test]
    fn natural_pullback_examples() {
        let c = builtin("projective_line", &[2]).unwrap();
        let b = natural_pullback(&c, &cv(&[1]), 1).unwrap();
        assert_eq!((b.strict, b.e_coeff), (cv(&[1]), r(1, 1)));
        assert_eq!(natural_pullback(&c, &cv(&[1]), 3).unwrap().e_coeff, r(2, 1));
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        assert_eq!(natural_pullback(&p, &cv(&[-3, -4]), 4).unwrap().e_coeff, r(-8, 1));
        assert!(matches!(
            natural_pullback(&c, &ClassVector::new(vec![r(1, 2)]), 1),
            Err(EngineError::Lattice(LatticeError::NonIntegral(_)))
        ));
    }

    #[test]
    fn pullback_examples() {
        let e = builtin("elliptic_curve", &[3, 1]).unwrap();
        let b = pullback(&e, &cv(&[0, 1])).unwrap();
        assert_eq!(b.e_coeff, Rat::zero());
        assert!(!b.exact);
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        let b = pullback(&p, &cv(&[0, -2])).unwrap();
        assert_eq!((b.e_coeff, b.exact), (Rat::zero(), true));
        let q = r(7, 3);
        assert_eq!(pullback(&p, &p.l.scale(&q)).unwrap().e_coeff, q);
    }

    #[test]
    fn canonical_examples() {
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        let k = canonical_on_blowup(&p);
        assert_eq!((k.strict.clone(), k.e_coeff.clone()), (cv(&[-3, -4]), r(-2, 1)));
        // (K_V - L) - (-2 + 1) L = K_V
        let adj = &k.strict - &p.l.scale(&(&k.e_coeff + &Rat::one()));
        assert_eq!(adj, p.k);
        let s = parse_model_ref("projective_line:1").unwrap();
        assert_eq!(canonical_on_blowup(&s).strict, cv(&[-3]));
        assert_eq!(relative_canonical(&s, Side::Minus, None).unwrap(), r(1, 1));
        let f = parse_model_ref("elliptic_fibration:3").unwrap();
        assert_eq!(canonical_on_blowup(&f).strict, cv(&[0, -3]));
    }

    #[test]
    fn relative_canonical_examples() {
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        for m in 1..=10 {
            assert_eq!(relative_canonical(&p, Side::Minus, Some(m)).unwrap(), Rat::zero());
        }
        assert_eq!(relative_canonical(&p, Side::Minus, None).unwrap(), Rat::zero());
        assert_eq!(relative_canonical(&p, Side::Plus, None).unwrap(), r(1, 1));
        let q = builtin("p1xp1", &[2, 3]).unwrap();
        assert_eq!(relative_canonical(&q, Side::Minus, None).unwrap(), r(-1, 3));
        assert_eq!(relative_canonical(&q, Side::Plus, None).unwrap(), Rat::zero());
        let f = builtin("elliptic_fibration", &[3]).unwrap();
        assert_eq!(relative_canonical(&f, Side::Plus, None).unwrap(), r(-1, 1));
    }

    #[test]
    fn restriction_examples() {
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        let kx = p.canonical_cone_class();
        assert_eq!(pullback_restriction(&p, &kx).unwrap(), cv(&[-1, 0]));
        assert!(pullback_restriction(&p, &p.l.scale(&r(5, 2))).unwrap().is_zero());
        let e = builtin("elliptic_curve", &[3, 1]).unwrap();
        let res = pullback_restriction(&e, &cv(&[0, 1])).unwrap();
        assert_eq!(res, cv(&[0, 1]));
        assert!(numerically_trivial(&e, &res));
    }

    #[test]
    fn cartier_examples() {
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        let c = cartier_test(&p, &cv(&[3, 6])).unwrap();
        assert_eq!(c.q_cartier, Some(r(3, 1)));
        let c = cartier_test(&p, &cv(&[1, 0])).unwrap();
        assert_eq!((c.q_cartier, c.num_cartier), (None, None));
        let e = builtin("elliptic_curve", &[3, 1]).unwrap();
        let c = cartier_test(&e, &cv(&[0, 1])).unwrap();
        assert_eq!((c.q_cartier, c.num_cartier), (None, Some(Rat::zero())));
    }

    #[test]
    fn antisymmetry_examples() {
        let e = builtin("elliptic_curve", &[3, 1]).unwrap();
        assert!(antisymmetry_check(&e, &cv(&[0, 1])).unwrap());
        let p = builtin("p1xp1", &[1, 2]).unwrap();
        assert!(!antisymmetry_check(&p, &cv(&[0, -2])).unwrap());
        assert_eq!(t_invariant(&p, &cv(&[0, 2])).unwrap(), ExtRat::attained(r(1, 1)));
        assert!(antisymmetry_check(&p, &p.l.scale(&r(-4, 3))).unwrap());
    }

    #[test]
    fn multiplier_ideal_examples() {
        let check = |name: &str, params: &[i64], ceil: i64, trivial: bool| {
            let m = builtin(name, params).unwrap();
            assert_eq!(
                multiplier_ideal_trivial(&m).unwrap(),
                MultiplierIdeal { ceil_coeff: ceil, trivial },
                "{name}"
            );
        };
        check("p1xp1", &[1, 2], 1, true);
        check("elliptic_fibration", &[3], -1, false);
        check("p1xp1", &[2, 3], 0, true);
        let mut m = builtin("p1xp1", &[1, 2]).unwrap();
        m.log_resolution = false;
        assert!(matches!(multiplier_ideal_trivial(&m), Err(EngineError::NotLogResolution(_))));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn t_shifts_along_l(a in -30i64..30, b in -30i64..30, p in -20i64..20, q in 1i64..9) {
            let m = builtin("p1xp1", &[2, 3]).unwrap();
            let d = cv(&[a, b]);
            let shift = r(p, q);
            let t = t_invariant(&m, &d).unwrap().finite().unwrap().clone();
            let moved = &d + &m.l.scale(&shift);
            let t2 = t_invariant(&m, &moved).unwrap().finite().unwrap().clone();
            prop_assert_eq!(t2, t + shift);
        }

        #[test]
        fn restriction_is_never_effective_unless_zero(a in -30i64..30, b in -30i64..30) {
            let m = builtin("p1xp1", &[1, 2]).unwrap();
            let res = pullback_restriction(&m, &cv(&[a, b])).unwrap();
            prop_assert!(res.is_zero() || !m.q_effective(&res).unwrap());
        }

        #[test]
        fn kappa_brackets_m_t(a in -30i64..30, b in -30i64..30, k in 1u64..15) {
            let m = builtin("fano_fourfold_AW", &[2]).unwrap();
            let d = cv(&[a, b]);
            let t = t_invariant(&m, &d).unwrap().finite().unwrap().clone();
            let kap = Rat::from_int(kappa(&m, &d, k).unwrap());
            let mt = t * Rat::from_int(k as i64);
            prop_assert!(mt <= kap && kap < mt + Rat::one());
        }
    }
}

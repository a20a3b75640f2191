use super::class::ClassVector;
use super::rational::{ceil_i64, Rat};
use super::LatticeError;

/// Default ceiling on the number of `k` values `int_feasible_min` will try.
pub const DEFAULT_HARD_CAP: u64 = 10_000;

/// Q- and Z-effectivity predicates on classes of a fixed rank.
///
/// Implementors must satisfy `z_effective(v) => q_effective(v)` for integral
/// `v`, and both predicates must be stable under adding the polarization.
pub trait Effectivity {
    fn rank(&self) -> usize;
    fn q_effective(&self, v: &ClassVector) -> bool;
    /// Only called on integral classes.
    fn z_effective(&self, v: &ClassVector) -> bool;
}

/// Smallest integer `k >= ⌈lower_hint⌉` with `k·L - m·D` integrally effective.
///
/// The scan gives up `gap_bound` steps after the first Q-effective `k`
/// (`GapBoundExceeded`), and in any case after `hard_cap` steps
/// (`SearchExhausted`).
pub fn int_feasible_min<O: Effectivity + ?Sized>(
    oracle: &O,
    l: &ClassVector,
    d: &ClassVector,
    m: u64,
    lower_hint: &Rat,
    gap_bound: u64,
    hard_cap: u64,
) -> Result<i64, LatticeError> {
    for v in [l, d] {
        if v.rank() != oracle.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: oracle.rank(),
                found: v.rank(),
            });
        }
        if !v.is_integral() {
            return Err(LatticeError::NonIntegral(v.to_string()));
        }
    }
    if m == 0 {
        return Err(LatticeError::NonPositiveMultiple);
    }
    let start = ceil_i64(lower_hint).ok_or(LatticeError::Overflow)?;
    let md = d.scale(&Rat::from_int(m as i64));
    let mut first_q: Option<i64> = None;
    for step in 0..=hard_cap {
        let k = start + step as i64;
        let v = &l.scale_int(k) - &md;
        if oracle.z_effective(&v) {
            return Ok(k);
        }
        if first_q.is_none() && oracle.q_effective(&v) {
            first_q = Some(k);
        }
        if let Some(fq) = first_q {
            if (k - fq) as u64 >= gap_bound {
                return Err(LatticeError::GapBoundExceeded {
                    first_q_effective: fq,
                    gap_bound,
                });
            }
        }
    }
    Err(LatticeError::SearchExhausted { start, hard_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cone::{cone_member, EffConeSpec};

    struct Orthant(EffConeSpec);

    impl Effectivity for Orthant {
        fn rank(&self) -> usize {
            self.0.dim()
        }
        fn q_effective(&self, v: &ClassVector) -> bool {
            cone_member(&self.0, v).unwrap()
        }
        fn z_effective(&self, v: &ClassVector) -> bool {
            v.is_integral() && self.q_effective(v)
        }
    }

    /// Z-effective only in even total degree: forces a gap of one step.
    struct EvenOnly;

    impl Effectivity for EvenOnly {
        fn rank(&self) -> usize {
            1
        }
        fn q_effective(&self, v: &ClassVector) -> bool {
            !v.coords()[0].is_negative()
        }
        fn z_effective(&self, v: &ClassVector) -> bool {
            let x = v.coords()[0].to_i64().unwrap();
            x >= 0 && x % 2 == 0
        }
    }

    #[test]
    fn conic_kappa() {
        let o = Orthant(EffConeSpec::orthant(1));
        let l = ClassVector::from_ints(&[2]);
        let d = ClassVector::from_ints(&[1]);
        assert_eq!(int_feasible_min(&o, &l, &d, 1, &Rat::new(1, 2), 0, 100).unwrap(), 1);
        assert_eq!(int_feasible_min(&o, &l, &d, 3, &Rat::new(3, 2), 0, 100).unwrap(), 2);
    }

    #[test]
    fn zero_divisor() {
        let o = Orthant(EffConeSpec::orthant(2));
        let l = ClassVector::from_ints(&[1, 2]);
        for m in 1..6 {
            assert_eq!(
                int_feasible_min(&o, &l, &ClassVector::zero(2), m, &Rat::zero(), 0, 10).unwrap(),
                0
            );
        }
    }

    #[test]
    fn p1xp1_canonical_minus_l() {
        let o = Orthant(EffConeSpec::orthant(2));
        let l = ClassVector::from_ints(&[1, 2]);
        let d = ClassVector::from_ints(&[-3, -4]);
        assert_eq!(int_feasible_min(&o, &l, &d, 5, &Rat::from_int(-10), 0, 100).unwrap(), -10);
    }

    #[test]
    fn gap_bound_is_enforced() {
        let l = ClassVector::from_ints(&[1]);
        let d = ClassVector::from_ints(&[1]);
        // k - 1 must be even and >= 0; starting at 0, k = 0 fails Q, k = 1 works.
        assert_eq!(int_feasible_min(&EvenOnly, &l, &d, 1, &Rat::zero(), 0, 10).unwrap(), 1);
        // starting at 2: k = 2 is Q-effective but odd, k = 3 works only with gap 1.
        assert!(matches!(
            int_feasible_min(&EvenOnly, &l, &d, 1, &Rat::from_int(2), 0, 10),
            Err(LatticeError::GapBoundExceeded { first_q_effective: 2, gap_bound: 0 })
        ));
        assert_eq!(int_feasible_min(&EvenOnly, &l, &d, 1, &Rat::from_int(2), 1, 10).unwrap(), 3);
    }

    #[test]
    fn hard_cap_exhaustion() {
        let o = Orthant(EffConeSpec::orthant(1));
        let l = ClassVector::from_ints(&[1]);
        let d = ClassVector::from_ints(&[50]);
        assert!(matches!(
            int_feasible_min(&o, &l, &d, 1, &Rat::zero(), 0, 10),
            Err(LatticeError::SearchExhausted { start: 0, hard_cap: 10 })
        ));
    }

    #[test]
    fn rejects_fractional_input() {
        let o = Orthant(EffConeSpec::orthant(1));
        let l = ClassVector::from_ints(&[1]);
        let d = ClassVector::new(vec![Rat::new(1, 2)]);
        assert!(matches!(
            int_feasible_min(&o, &l, &d, 1, &Rat::zero(), 0, 10),
            Err(LatticeError::NonIntegral(_))
        ));
    }
}

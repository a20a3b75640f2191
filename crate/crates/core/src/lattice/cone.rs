use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::class::ClassVector;
use super::rational::{gcd_all, ExtRat, Rat};
use super::LatticeError;

/// A closed polyhedral cone `{x : ⟨φ_j, x⟩ >= 0 for all j}` given by
/// primitive integer facet covectors, optionally with known generators.
#[derive(Clone, PartialEq, Eq)]
pub struct EffConeSpec {
    dim: usize,
    facets: Vec<Vec<BigInt>>,
    rays: Option<Vec<Vec<BigInt>>>,
}

impl EffConeSpec {
    /// Validates primitivity, ray containment, ray salience and salience of
    /// the cone itself (the facet covectors must span the dual space).
    pub fn new(
        dim: usize,
        facets: Vec<Vec<BigInt>>,
        rays: Option<Vec<Vec<BigInt>>>,
    ) -> Result<Self, LatticeError> {
        if dim == 0 {
            return Err(LatticeError::InvalidCone("rank must be positive".into()));
        }
        for (j, phi) in facets.iter().enumerate() {
            if phi.len() != dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: dim,
                    found: phi.len(),
                });
            }
            if !gcd_all(phi.iter()).is_one() {
                return Err(LatticeError::InvalidCone(format!(
                    "facet {j} ({}) is not primitive",
                    fmt_int_vec(phi)
                )));
            }
        }
        if let Some(witness) = lineality_witness(&facets, dim) {
            let neg: Vec<BigInt> = witness.iter().map(|c| -c).collect();
            return Err(LatticeError::NonSalient {
                ray: fmt_int_vec(&witness),
                opposite: fmt_int_vec(&neg),
            });
        }
        if let Some(rays) = &rays {
            for (i, r) in rays.iter().enumerate() {
                if r.len() != dim {
                    return Err(LatticeError::DimensionMismatch {
                        expected: dim,
                        found: r.len(),
                    });
                }
                let pairings: Vec<BigInt> = facets.iter().map(|phi| int_pair(phi, r)).collect();
                if let Some(j) = pairings.iter().position(|p| p.is_negative()) {
                    return Err(LatticeError::InvalidCone(format!(
                        "ray {i} ({}) violates facet {j}",
                        fmt_int_vec(r)
                    )));
                }
                if !pairings.iter().any(|p| p.is_positive()) {
                    let neg: Vec<BigInt> = r.iter().map(|c| -c).collect();
                    return Err(LatticeError::NonSalient {
                        ray: fmt_int_vec(r),
                        opposite: fmt_int_vec(&neg),
                    });
                }
            }
        }
        Ok(EffConeSpec { dim, facets, rays })
    }

    pub fn from_int_facets(facets: &[&[i64]], rays: Option<&[&[i64]]>) -> Result<Self, LatticeError> {
        let conv = |v: &[&[i64]]| -> Vec<Vec<BigInt>> {
            v.iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect()
        };
        let dim = facets.first().map_or(0, |f| f.len());
        Self::new(dim, conv(facets), rays.map(conv))
    }

    /// The nonnegative orthant with its unit rays.
    pub fn orthant(dim: usize) -> Self {
        let unit = |i: usize| -> Vec<BigInt> {
            (0..dim)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        };
        let facets: Vec<_> = (0..dim).map(unit).collect();
        let rays = facets.clone();
        Self::new(dim, facets, Some(rays)).expect("orthant is a valid salient cone")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Vec<BigInt>] {
        &self.facets
    }

    pub fn rays(&self) -> Option<&[Vec<BigInt>]> {
        self.rays.as_deref()
    }

    fn check_dim(&self, v: &ClassVector) -> Result<(), LatticeError> {
        if v.rank() != self.dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim,
                found: v.rank(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for EffConeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facets: Vec<String> = self.facets.iter().map(|p| fmt_int_vec(p)).collect();
        write!(f, "EffConeSpec[{}]", facets.join("; "))
    }
}

pub(crate) fn fmt_int_vec(v: &[BigInt]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn int_pair(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A primitive integer vector in the common kernel of the facets, if the
/// facets do not span the dual space.
fn lineality_witness(facets: &[Vec<BigInt>], dim: usize) -> Option<Vec<BigInt>> {
    let mut rows: Vec<Vec<Rat>> = facets
        .iter()
        .map(|phi| phi.iter().cloned().map(Rat::from_bigint).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &(p * &factor);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..dim).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![Rat::zero(); dim];
    v[free] = Rat::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -&rows[row][free];
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_bigint(lcm.clone())).numer().clone())
        .collect();
    let g = gcd_all(ints.iter());
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// `true` iff `⟨φ_j, v⟩ >= 0` for every facet.
pub fn cone_member(cone: &EffConeSpec, v: &ClassVector) -> Result<bool, LatticeError> {
    cone.check_dim(v)?;
    Ok(cone.facets.iter().all(|phi| !v.pair(phi).is_negative()))
}

/// `inf { s : s·L - D ∈ cone }` in closed form.
///
/// Each facet contributes the half-line `s·⟨φ,L⟩ >= ⟨φ,D⟩`. Facets with
/// `⟨φ,L⟩ > 0` give lower bounds and the infimum is their maximum; since the
/// cone is closed it is always attained.
pub fn ratio_infimum(
    cone: &EffConeSpec,
    l: &ClassVector,
    d: &ClassVector,
) -> Result<ExtRat, LatticeError> {
    cone.check_dim(l)?;
    cone.check_dim(d)?;
    let mut best: Option<Rat> = None;
    for (j, phi) in cone.facets.iter().enumerate() {
        let lp = l.pair(phi);
        let dp = d.pair(phi);
        if lp.is_positive() {
            let bound = dp / lp;
            if best.as_ref().is_none_or(|b| bound > *b) {
                best = Some(bound);
            }
        } else if lp.is_negative() {
            return Err(LatticeError::PolarizationOutsideCone { facet: j });
        } else if dp.is_positive() {
            return Err(LatticeError::InfeasibleForAllS { facet: j });
        }
    }
    best.map(ExtRat::attained).ok_or(LatticeError::UnboundedBelow)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: &[i64]) -> ClassVector {
        ClassVector::from_ints(v)
    }

    #[test]
    fn orthant_membership() {
        let c = EffConeSpec::orthant(2);
        assert!(cone_member(&c, &cv(&[0, 0])).unwrap());
        assert!(!cone_member(&c, &cv(&[1, -1])).unwrap());
        assert!(cone_member(&c, &cv(&[3, 4])).unwrap());
        assert!(matches!(
            cone_member(&c, &cv(&[1])),
            Err(LatticeError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn ratio_infimum_examples() {
        let c = EffConeSpec::orthant(2);
        assert_eq!(
            ratio_infimum(&c, &cv(&[1, 2]), &cv(&[-2, -2])).unwrap(),
            ExtRat::attained(Rat::from_int(-1))
        );
        assert_eq!(
            ratio_infimum(&c, &cv(&[1, 2]), &cv(&[0, 0])).unwrap(),
            ExtRat::attained(Rat::zero())
        );
        assert_eq!(
            ratio_infimum(&c, &cv(&[2, 3]), &cv(&[-4, -5])).unwrap(),
            ExtRat::attained(Rat::new(-5, 3))
        );
    }

    #[test]
    fn ratio_infimum_errors() {
        let c = EffConeSpec::orthant(2);
        // L on the boundary facet y = 0 while D has positive y: no s works.
        assert!(matches!(
            ratio_infimum(&c, &cv(&[1, 0]), &cv(&[0, 1])),
            Err(LatticeError::InfeasibleForAllS { facet: 1 })
        ));
        assert!(matches!(
            ratio_infimum(&c, &cv(&[0, 0]), &cv(&[-1, -1])),
            Err(LatticeError::UnboundedBelow)
        ));
        assert!(matches!(
            ratio_infimum(&c, &cv(&[1, -1]), &cv(&[0, 0])),
            Err(LatticeError::PolarizationOutsideCone { facet: 1 })
        ));
    }

    #[test]
    fn rejects_bad_cones() {
        let err = EffConeSpec::from_int_facets(&[&[1, 0]], None).unwrap_err();
        match err {
            LatticeError::NonSalient { ray, opposite } => {
                assert_eq!(ray, "0,1");
                assert_eq!(opposite, "0,-1");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            EffConeSpec::from_int_facets(&[&[2, 0], &[0, 1]], None),
            Err(LatticeError::InvalidCone(_))
        ));
        assert!(matches!(
            EffConeSpec::from_int_facets(&[&[1, 0], &[0, 1]], Some(&[&[1, -1]])),
            Err(LatticeError::InvalidCone(_))
        ));
        // A non-simplicial but salient cone is fine.
        assert!(EffConeSpec::from_int_facets(&[&[1, 0], &[0, 1], &[1, 1]], None).is_ok());
    }
}

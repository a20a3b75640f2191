use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;

use super::rational::{ParseRatError, Rat};

/// A class in the (rationalized) divisor class group of the base variety,
/// written in the basis declared by the owning model.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClassVector(Vec<Rat>);

impl ClassVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        ClassVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        ClassVector(vec![Rat::zero(); rank])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        ClassVector(coords.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rat::is_integer)
    }

    pub fn scale(&self, q: &Rat) -> ClassVector {
        ClassVector(self.0.iter().map(|c| c * q).collect())
    }

    pub fn scale_int(&self, k: i64) -> ClassVector {
        self.scale(&Rat::from_int(k))
    }

    /// `⟨φ, self⟩` for an integer covector `φ` of the same length.
    pub fn pair(&self, covector: &[BigInt]) -> Rat {
        debug_assert_eq!(covector.len(), self.0.len());
        let mut acc = Rat::zero();
        for (c, phi) in self.0.iter().zip(covector) {
            acc += &(c * Rat::from_bigint(phi.clone()));
        }
        acc
    }

    /// Exact solve of `self = r · other`. `None` when no such `r` exists or
    /// `other` is zero while `self` is not.
    pub fn ratio_to(&self, other: &ClassVector) -> Option<Rat> {
        if self.rank() != other.rank() {
            return None;
        }
        let pivot = other.0.iter().position(|c| !c.is_zero());
        let r = match pivot {
            Some(i) => &self.0[i] / &other.0[i],
            None => return self.is_zero().then(Rat::zero),
        };
        let consistent = self
            .0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| *a == b * &r);
        consistent.then_some(r)
    }

    /// Coordinates at the given indices, in order.
    pub fn select(&self, indices: &[usize]) -> ClassVector {
        ClassVector(indices.iter().map(|&i| self.0[i].clone()).collect())
    }

    /// Integer coordinates, or `None` if any coordinate is fractional.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|c| c.is_integer().then(|| c.numer().clone()))
            .collect()
    }
}

impl From<Vec<Rat>> for ClassVector {
    fn from(v: Vec<Rat>) -> Self {
        ClassVector(v)
    }
}

impl Add for &ClassVector {
    type Output = ClassVector;
    fn add(self, rhs: &ClassVector) -> ClassVector {
        assert_eq!(self.rank(), rhs.rank(), "class rank mismatch");
        ClassVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ClassVector {
    type Output = ClassVector;
    fn sub(self, rhs: &ClassVector) -> ClassVector {
        assert_eq!(self.rank(), rhs.rank(), "class rank mismatch");
        ClassVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for ClassVector {
    type Output = ClassVector;
    fn add(self, rhs: ClassVector) -> ClassVector {
        &self + &rhs
    }
}

impl Sub for ClassVector {
    type Output = ClassVector;
    fn sub(self, rhs: ClassVector) -> ClassVector {
        &self - &rhs
    }
}

impl Neg for &ClassVector {
    type Output = ClassVector;
    fn neg(self) -> ClassVector {
        ClassVector(self.0.iter().map(|c| -c).collect())
    }
}

impl Neg for ClassVector {
    type Output = ClassVector;
    fn neg(self) -> ClassVector {
        -&self
    }
}

/// Comma-separated rationals, e.g. `-3,4/5`. Whitespace around entries is
/// ignored.
impl FromStr for ClassVector {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|part| part.trim().parse::<Rat>())
            .collect::<Result<Vec<_>, _>>()
            .map(ClassVector)
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_to_polarization() {
        let l = ClassVector::from_ints(&[1, 2]);
        assert_eq!(ClassVector::from_ints(&[3, 6]).ratio_to(&l), Some(Rat::from_int(3)));
        assert_eq!(ClassVector::from_ints(&[1, 0]).ratio_to(&l), None);
        assert_eq!(ClassVector::zero(2).ratio_to(&l), Some(Rat::zero()));
        assert_eq!(l.ratio_to(&ClassVector::zero(2)), None);
    }

    #[test]
    fn parse_and_display() {
        let v: ClassVector = "-3, 4/6,0".parse().unwrap();
        assert_eq!(v.coords(), &[Rat::from_int(-3), Rat::new(2, 3), Rat::zero()]);
        assert_eq!(v.to_string(), "-3,2/3,0");
        assert!(!v.is_integral());
        assert!("1,,2".parse::<ClassVector>().is_err());
    }
}

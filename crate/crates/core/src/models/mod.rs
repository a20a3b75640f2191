//! Polarized base varieties `(V, L)` reduced to class-lattice data.
//!
//! A [`PolarizedModel`] knows its class group rank and basis, which classes
//! are Q-effective and which integral classes carry sections, its canonical
//! class `K_V` and its polarization `L`. Everything the cone engine computes
//! is a function of this data.

mod builtin;
mod config;

pub use builtin::{builtin, builtin_catalog, parse_model_ref, BuiltinInfo};
pub use config::{parse_config, ConfigError};

use std::fmt;

use thiserror::Error;

use crate::lattice::{
    cone_member, ratio_infimum, ClassVector, EffConeSpec, Effectivity, LatticeError, Rat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Coordinates are classes up to linear equivalence.
    Linear,
    /// Coordinates are only known up to numerical equivalence.
    Numerical,
}

impl EquivalenceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EquivalenceMode::Linear => "linear",
            EquivalenceMode::Numerical => "numerical",
        }
    }
}

/// How effectivity is decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffRule {
    /// Q-effective = membership in a closed polyhedral cone; Z-effective =
    /// integral and in the cone.
    Polyhedral(EffConeSpec),
    /// Coordinates `(degree, τ_1, ..., τ_g)` on an elliptic curve, with the
    /// `τ_i` spanning a free subgroup of `Pic⁰`. Q-effective iff degree > 0 or
    /// the class is zero; Z-effective iff degree >= 1 or the class is zero.
    EllipticCurve,
}

impl EffRule {
    pub fn name(&self) -> &'static str {
        match self {
            EffRule::Polyhedral(_) => "cone-integral",
            EffRule::EllipticCurve => "elliptic-curve",
        }
    }

    pub fn cone(&self) -> Option<&EffConeSpec> {
        match self {
            EffRule::Polyhedral(c) => Some(c),
            EffRule::EllipticCurve => None,
        }
    }
}

/// Known places where class-level data cannot see the actual geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelCaveat {
    /// The class-level plus-side m-limits are exact for the class data but
    /// the underlying surface is known to have strictly larger values.
    ClassLevelPlusLimits,
    /// Every cone boundary realizing the minimal discrepancy is a cone over a
    /// non-normal-crossing divisor, so the vertex blow-up is not a log
    /// resolution of the pair.
    ConeBoundaryNotLogResolution,
}

impl ModelCaveat {
    pub const ALL: [ModelCaveat; 2] = [
        ModelCaveat::ClassLevelPlusLimits,
        ModelCaveat::ConeBoundaryNotLogResolution,
    ];

    pub fn from_code(code: &str) -> Option<ModelCaveat> {
        ModelCaveat::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn code(self) -> &'static str {
        match self {
            ModelCaveat::ClassLevelPlusLimits => "class-level-plus-limits",
            ModelCaveat::ConeBoundaryNotLogResolution => "cone-boundary-not-log-resolution",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ModelCaveat::ClassLevelPlusLimits => {
                "class-level data gives K+_m = K+ at E for every m; the elliptic \
                 fibration is expected to have K+_m > -1, which requires geometry \
                 finer than effectivity of classes"
            }
            ModelCaveat::ConeBoundaryNotLogResolution => {
                "boundaries computing K-_m are cones over divisors in |mΔ|, all of \
                 which are worse than normal crossing; the vertex blow-up is not a \
                 resolution of such pairs"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("bad parameters for {name}: {reason}")]
    BadParameters { name: String, reason: String },
    #[error("model invariant violated: {0}")]
    Invalid(String),
    #[error("malformed divisor literal `{0}`")]
    BadDivisor(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl ModelError {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::UnknownModel(_) => "unknown-model",
            ModelError::BadParameters { .. } => "bad-parameters",
            ModelError::Invalid(_) => "invalid-model",
            ModelError::BadDivisor(_) => "bad-divisor",
            ModelError::Config(_) => "invalid-config",
            ModelError::Lattice(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedModel {
    pub name: String,
    pub basis: Vec<String>,
    pub equivalence: EquivalenceMode,
    pub rule: EffRule,
    /// Canonical class `K_V`.
    pub k: ClassVector,
    /// Polarization `L`.
    pub l: ClassVector,
    pub gap_bound: u64,
    pub log_resolution: bool,
    pub normality_declared: bool,
    pub caveats: Vec<ModelCaveat>,
}

impl PolarizedModel {
    /// Checks every model invariant. Constructors call this before handing a
    /// model out.
    pub fn validate(&self) -> Result<(), ModelError> {
        let rank = self.rank();
        if rank == 0 {
            return Err(ModelError::Invalid("rank must be positive".into()));
        }
        if self.basis.len() != rank {
            return Err(ModelError::Invalid(format!(
                "{} basis labels for rank {rank}",
                self.basis.len()
            )));
        }
        for (i, a) in self.basis.iter().enumerate() {
            if self.basis[..i].contains(a) {
                return Err(ModelError::Invalid(format!("duplicate basis label `{a}`")));
            }
        }
        for (label, v) in [("K", &self.k), ("L", &self.l)] {
            if v.rank() != rank {
                return Err(LatticeError::DimensionMismatch {
                    expected: rank,
                    found: v.rank(),
                }
                .into());
            }
            if !v.is_integral() {
                return Err(ModelError::Invalid(format!("{label} = ({v}) is not integral")));
            }
        }
        match &self.rule {
            EffRule::Polyhedral(cone) => {
                if cone.dim() != rank {
                    return Err(LatticeError::DimensionMismatch {
                        expected: rank,
                        found: cone.dim(),
                    }
                    .into());
                }
                ratio_infimum(cone, &self.l, &ClassVector::zero(rank)).map_err(|e| {
                    ModelError::Invalid(format!("L = ({}) is not a valid polarization: {e}", self.l))
                })?;
            }
            EffRule::EllipticCurve => {
                if !self.l.coords()[0].is_positive() {
                    return Err(ModelError::Invalid(format!(
                        "L = ({}) must have positive degree",
                        self.l
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn cone(&self) -> Option<&EffConeSpec> {
        self.rule.cone()
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self.rule, EffRule::Polyhedral(_))
    }

    /// Indices of coordinates that survive in the numerical quotient.
    pub fn numerical_coords(&self) -> Vec<usize> {
        match self.rule {
            EffRule::Polyhedral(_) => (0..self.rank()).collect(),
            EffRule::EllipticCurve => vec![0],
        }
    }

    pub fn check_rank(&self, v: &ClassVector) -> Result<(), ModelError> {
        if v.rank() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found: v.rank(),
            }
            .into());
        }
        Ok(())
    }

    pub fn q_effective(&self, v: &ClassVector) -> Result<bool, ModelError> {
        self.check_rank(v)?;
        Ok(match &self.rule {
            EffRule::Polyhedral(cone) => cone_member(cone, v)?,
            EffRule::EllipticCurve => {
                let degree = &v.coords()[0];
                degree.is_positive() || v.is_zero()
            }
        })
    }

    pub fn z_effective(&self, v: &ClassVector) -> Result<bool, ModelError> {
        self.check_rank(v)?;
        if !v.is_integral() {
            return Err(LatticeError::NonIntegral(v.to_string()).into());
        }
        Ok(match &self.rule {
            EffRule::Polyhedral(cone) => cone_member(cone, v)?,
            EffRule::EllipticCurve => v.coords()[0] >= Rat::one() || v.is_zero(),
        })
    }

    /// `K_V - L`: the base class whose cone is `K_X`.
    pub fn canonical_cone_class(&self) -> ClassVector {
        &self.k - &self.l
    }

    /// Resolves `K`, `L`, `K-L`, `L-K`, `-K`, `-L` or comma-separated
    /// rationals to a class of this model's rank.
    pub fn resolve_divisor(&self, literal: &str) -> Result<ClassVector, ModelError> {
        let lit: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        let v = match lit.as_str() {
            "K" => self.k.clone(),
            "L" => self.l.clone(),
            "-K" => -&self.k,
            "-L" => -&self.l,
            "K-L" => &self.k - &self.l,
            "L-K" => &self.l - &self.k,
            _ => lit
                .parse::<ClassVector>()
                .map_err(|_| ModelError::BadDivisor(literal.to_string()))?,
        };
        self.check_rank(&v)?;
        Ok(v)
    }

    pub fn has_caveat(&self, c: ModelCaveat) -> bool {
        self.caveats.contains(&c)
    }
}

impl Effectivity for PolarizedModel {
    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn q_effective(&self, v: &ClassVector) -> bool {
        PolarizedModel::q_effective(self, v).unwrap_or(false)
    }

    fn z_effective(&self, v: &ClassVector) -> bool {
        PolarizedModel::z_effective(self, v).unwrap_or(false)
    }
}

impl fmt::Display for PolarizedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name          {}", self.name)?;
        writeln!(f, "rank          {}", self.rank())?;
        writeln!(f, "basis         {}", self.basis.join(","))?;
        writeln!(f, "equivalence   {}", self.equivalence.as_str())?;
        match &self.rule {
            EffRule::Polyhedral(cone) => {
                let facets: Vec<String> = cone
                    .facets()
                    .iter()
                    .map(|p| crate::lattice::cone::fmt_int_vec(p))
                    .collect();
                writeln!(f, "effectivity   cone-integral, facets {}", facets.join("; "))?;
            }
            EffRule::EllipticCurve => writeln!(f, "effectivity   elliptic-curve")?,
        }
        writeln!(f, "K             {}", self.k)?;
        writeln!(f, "L             {}", self.l)?;
        writeln!(f, "gap_bound     {}", self.gap_bound)?;
        writeln!(f, "log_resolution {}", self.log_resolution)?;
        write!(f, "normal        {}", self.normality_declared)?;
        for c in &self.caveats {
            write!(f, "\ncaveat        {}", c.code())?;
        }
        Ok(())
    }
}

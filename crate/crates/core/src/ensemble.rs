//! Ensemble selection shared by every formula module.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The four ensembles at maximal non-Hermiticity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    GinibreBeta2,
    GinibreBeta4,
    ChiralBeta2,
    ChiralBeta4,
}

impl Family {
    pub fn beta(self) -> u32 {
        match self {
            Family::GinibreBeta2 | Family::ChiralBeta2 => 2,
            Family::GinibreBeta4 | Family::ChiralBeta4 => 4,
        }
    }

    pub fn is_chiral(self) -> bool {
        matches!(self, Family::ChiralBeta2 | Family::ChiralBeta4)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::GinibreBeta2 => "ginibre2",
            Family::GinibreBeta4 => "ginibre4",
            Family::ChiralBeta2 => "chiral2",
            Family::ChiralBeta4 => "chiral4",
        }
    }

    pub const ALL: [Family; 4] = [
        Family::GinibreBeta2,
        Family::GinibreBeta4,
        Family::ChiralBeta2,
        Family::ChiralBeta4,
    ];
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ginibre2" => Ok(Family::GinibreBeta2),
            "ginibre4" => Ok(Family::GinibreBeta4),
            "chiral2" => Ok(Family::ChiralBeta2),
            "chiral4" => Ok(Family::ChiralBeta4),
            other => Err(Error::InvalidParameters(format!(
                "unknown ensemble '{other}' (expected ginibre2, ginibre4, chiral2 or chiral4)"
            ))),
        }
    }
}

/// An ensemble together with its zero-mode count.
///
/// For the chiral families the radial weight carries a Bessel function
/// `K_w`; `w = ν` at β=2 and `w = 2ν` at β=4. The index `w` is stored
/// directly so that half-integer ν at β=4 (odd `w`) can be represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    family: Family,
    weight_index: u32,
}

impl EnsembleSpec {
    pub fn new(family: Family, nu: u32) -> Result<Self> {
        let weight_index = match family {
            Family::GinibreBeta2 | Family::GinibreBeta4 => {
                if nu != 0 {
                    return Err(Error::InvalidParameters(format!(
                        "{} has no zero modes; nu must be 0, got {nu}",
                        family.name()
                    )));
                }
                0
            }
            Family::ChiralBeta2 => nu,
            Family::ChiralBeta4 => 2 * nu,
        };
        Ok(Self { family, weight_index })
    }

    pub fn ginibre2() -> Self {
        Self::new(Family::GinibreBeta2, 0).expect("valid")
    }

    pub fn ginibre4() -> Self {
        Self::new(Family::GinibreBeta4, 0).expect("valid")
    }

    pub fn chiral2(nu: u32) -> Self {
        Self::new(Family::ChiralBeta2, nu).expect("valid")
    }

    pub fn chiral4(nu: u32) -> Self {
        Self::new(Family::ChiralBeta4, nu).expect("valid")
    }

    /// Chiral β=4 with Bessel weight index `w = 2ν`, allowing half-integer ν.
    pub fn chiral4_with_weight(weight_index: u32) -> Self {
        Self {
            family: Family::ChiralBeta4,
            weight_index,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> u32 {
        self.family.beta()
    }

    pub fn is_chiral(&self) -> bool {
        self.family.is_chiral()
    }

    /// Zero-mode count ν (half-integer values possible for chiral β=4).
    pub fn nu(&self) -> f64 {
        match self.family {
            Family::ChiralBeta4 => self.weight_index as f64 / 2.0,
            _ => self.weight_index as f64,
        }
    }

    /// Order of the Bessel-K factor in the radial weight (0 for Ginibre).
    pub fn weight_index(&self) -> u32 {
        self.weight_index
    }

    /// The β=2 ensemble with the same radial weight, whose odd-index
    /// eigenvalues make up this β=4 spectrum.
    pub fn beta2_partner(&self) -> Self {
        match self.family {
            Family::GinibreBeta2 | Family::GinibreBeta4 => Self::ginibre2(),
            Family::ChiralBeta2 | Family::ChiralBeta4 => Self {
                family: Family::ChiralBeta2,
                weight_index: self.weight_index,
            },
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_chiral() {
            write!(f, "{}(nu={})", self.family.name(), self.nu())
        } else {
            write!(f, "{}", self.family.name())
        }
    }
}

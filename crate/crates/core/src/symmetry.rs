//! Translation symmetries on the flat 3-torus and their admitted wavevector
//! sets {k : k·v = 0}. Direction tests are exact: integer arithmetic for
//! integer directions, and the field-extension argument for (1,√2,√6):
//! k₁ + √2k₂ + √6k₃ = 0 with integer k forces k = 0 because {1,√2,√6,√12} is
//! a ℚ-basis of ℚ(√2,√6). No floating-point dot-product thresholds.

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Nonzero integer direction (covers the coordinate axes).
    Integer([i64; 3]),
    /// The rationally independent direction (1, √2, √6).
    IrrationalSqrt26,
}

impl Direction {
    pub fn axis(i: usize) -> Direction {
        let mut v = [0i64; 3];
        v[i] = 1;
        Direction::Integer(v)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Direction::Integer([0, 0, 0]) => {
                Err(Error::UnsupportedDirection("0,0,0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Exact admission test k·v = 0 (k = 0 is never admitted).
    pub fn admits(&self, k: [i64; 3]) -> bool {
        if k == [0, 0, 0] {
            return false;
        }
        match self {
            Direction::Integer(v) => k[0] * v[0] + k[1] * v[1] + k[2] * v[2] == 0,
            // k₁ + √2 k₂ + √6 k₃ = 0 ⇔ k = 0 for integer k
            Direction::IrrationalSqrt26 => false,
        }
    }

    /// Floating-point components of the direction vector.
    pub fn as_vec(&self) -> Vec3 {
        match self {
            Direction::Integer(v) => [v[0] as f64, v[1] as f64, v[2] as f64],
            Direction::IrrationalSqrt26 => [1.0, 2f64.sqrt(), 6f64.sqrt()],
        }
    }

    /// Parse "e1"/"e2"/"e3", "irrational", or a comma-separated integer triple.
    pub fn parse(text: &str) -> Result<Direction> {
        let t = text.trim();
        let d = match t {
            "e1" => Direction::axis(0),
            "e2" => Direction::axis(1),
            "e3" => Direction::axis(2),
            "irrational" => Direction::IrrationalSqrt26,
            _ => {
                let parts: Vec<&str> = t.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::UnsupportedDirection(t.into()));
                }
                let mut v = [0i64; 3];
                for (slot, p) in v.iter_mut().zip(parts) {
                    *slot = p
                        .trim()
                        .parse::<i64>()
                        .map_err(|_| Error::UnsupportedDirection(t.into()))?;
                }
                Direction::Integer(v)
            }
        };
        d.validate()?;
        Ok(d)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Integer(v) => write!(f, "{},{},{}", v[0], v[1], v[2]),
            Direction::IrrationalSqrt26 => write!(f, "irrational"),
        }
    }
}

/// Admitted wavevectors of a translation symmetry at truncation N.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSubspace {
    pub direction: Direction,
    pub truncation: usize,
    /// Lexicographically sorted; never contains 0; closed under k ↦ −k.
    pub admitted: Vec<[i64; 3]>,
}

/// Enumerate the admitted set {k ≠ 0 : k·v = 0, |k_i| ≤ N}.
pub fn symmetric_mask(direction: &Direction, truncation: usize) -> Result<SymmetricSubspace> {
    direction.validate()?;
    let admitted: Vec<[i64; 3]> = crate::spectral::modes(truncation)
        .filter(|&k| direction.admits(k))
        .collect();
    Ok(SymmetricSubspace { direction: direction.clone(), truncation, admitted })
}

impl SymmetricSubspace {
    /// L²-orthogonal projection onto the symmetric subspace: keeps admitted
    /// modes, annihilates the rest (including the mean mode).
    pub fn project(&self, field: &crate::spectral::SpectralField) -> crate::spectral::SpectralField {
        let mut out = crate::spectral::SpectralField::zeros(field.truncation());
        for k in crate::spectral::modes(field.truncation()) {
            if self.direction.admits(k) {
                *out.get_mut(k) = *field.get(k);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.admitted.is_empty()
    }

    pub fn len(&self) -> usize {
        self.admitted.len()
    }

    /// Smallest |k|² among admitted wavevectors (exact integer).
    pub fn min_norm_sq(&self) -> Option<i64> {
        self.admitted
            .iter()
            .map(|k| k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
            .min()
    }

    /// Lexicographically smallest admitted k attaining |k|² = target.
    pub fn lex_smallest_with_norm_sq(&self, target: i64) -> Option<[i64; 3]> {
        self.admitted
            .iter()
            .copied()
            .find(|k| k[0] * k[0] + k[1] * k[1] + k[2] * k[2] == target)
    }
}

/// Dimension of nontrivial symmetric band-limited scalar modes: the count of
/// admitted nonzero wavevectors at truncation N. Zero means no band-limited
/// first integral exists at this truncation.
pub fn first_integral_existence(direction: &Direction, truncation: usize) -> Result<usize> {
    Ok(symmetric_mask(direction, truncation)?.len())
}

//! Kato norms, the outer measure `mu_alpha(A) = sup_y int_A |x-y|^-alpha`,
//! Choquet integrals and Lorentz-Choquet quasinorms of finite bump sums.
//!
//! Sets are finite unions of balls and spherical shells, functions are
//! finite sums of radial bumps with disjoint supports, so every level set is
//! again such a union and its weighted volume has a closed form.

mod functions;
mod geometry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use functions::*;
pub use geometry::{ball_primitive, kato_integral, outer_measure, Ball, BallUnion, MeasureResult, Shell, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoquetParams {
    pub alpha: f64,
    /// Candidate centers per axis of the coarse lattice over the bounding box.
    pub lattice_points: usize,
    /// Overrides the lattice spacing derived from `lattice_points`.
    pub lattice_spacing: Option<f64>,
    pub refine_rounds: usize,
    pub refine_top: usize,
    /// Levels `t_j = max|f| 2^(-j/levels_per_octave)`.
    pub levels_per_octave: usize,
    pub octaves: usize,
    /// Sphere directions for overlapping unions.
    pub directions: usize,
    /// Gauss-Legendre order per radial sweep interval.
    pub radial_order: usize,
    /// Radial samples used when a profile has to be tabulated.
    pub profile_samples: usize,
    /// Extent of tabulated Riesz potentials in units of the source support.
    pub potential_extent: f64,
}

impl Default for ChoquetParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            lattice_points: 5,
            lattice_spacing: None,
            refine_rounds: 2,
            refine_top: 4,
            levels_per_octave: 8,
            octaves: 20,
            directions: 2048,
            radial_order: 24,
            profile_samples: 2001,
            potential_extent: 32.0,
        }
    }
}

impl ChoquetParams {
    pub fn new(alpha: f64) -> Result<Self> {
        let p = Self { alpha, ..Self::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let p = Self { alpha, ..self.clone() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..3.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 3), got {}", self.alpha)));
        }
        if self.levels_per_octave == 0 || self.octaves == 0 {
            return Err(Error::InvalidParameter("need at least one level".into()));
        }
        if self.lattice_spacing.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("lattice spacing must be positive".into()));
        }
        if self.radial_order < 2 || self.directions == 0 || self.profile_samples < 3 {
            return Err(Error::InvalidParameter("quadrature sizes too small".into()));
        }
        Ok(())
    }
}

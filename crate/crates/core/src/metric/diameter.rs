//! Diameter bounds for chains of rotationally symmetric pieces.
//!
//! Along a chain glued end to end, the global axial coordinate is
//! 1-Lipschitz, so the two extreme slices are at least the total axial
//! length apart. Any two points are joined by moving axially and then inside
//! one cross-section, which bounds the diameter from above.

use serde::{Deserialize, Serialize};

use super::profile::Profile;
use crate::error::{NeckError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds for pieces glued in the given order, each end to the next start.
pub fn chain_diameter(pieces: &[&Profile]) -> Result<DiameterBounds> {
    if pieces.is_empty() {
        return Err(NeckError::InvalidParameter("empty chain".into()));
    }
    let length: f64 = pieces.iter().map(|p| p.length()).sum();
    let fiber = pieces.iter().map(|p| p.max_fiber_diameter()).fold(0.0, f64::max);
    Ok(DiameterBounds {
        lower: length,
        upper: length + fiber,
    })
}

/// Bounds for a single profile.
pub fn diameter(profile: &Profile) -> DiameterBounds {
    let length = profile.length();
    DiameterBounds {
        lower: length,
        upper: length + profile.max_fiber_diameter(),
    }
}

//! Lower and upper rough approximations of the fire region over granules.

use std::collections::BTreeSet;

use crate::frame::PixelMask;
use crate::granulation::GranulatedFrame;

pub type GranuleSet = BTreeSet<usize>;

/// Lower/upper granule sets and the boundary between them.
///
/// Invariants: `lower ⊆ upper` and `boundary = upper \ lower`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoughApproximation {
    pub lower: GranuleSet,
    pub upper: GranuleSet,
    pub boundary: GranuleSet,
}

impl RoughApproximation {
    pub fn new(lower: GranuleSet, mut upper: GranuleSet) -> Self {
        upper.extend(lower.iter().copied());
        let boundary = upper.difference(&lower).copied().collect();
        Self { lower, upper, boundary }
    }
}

fn check_shape(gf: &GranulatedFrame, mask: &PixelMask) {
    assert!(
        mask.width() == gf.width && mask.height() == gf.height,
        "mask {}x{} does not match granulated frame {}x{}",
        mask.width(),
        mask.height(),
        gf.width,
        gf.height
    );
}

/// Granules whose every pixel is set in `mask`.
pub fn lower_approximation(gf: &GranulatedFrame, mask: &PixelMask) -> GranuleSet {
    check_shape(gf, mask);
    gf.granules
        .iter()
        .filter(|g| g.pixel_indices.iter().all(|&i| mask.get_index(i)))
        .map(|g| g.id)
        .collect()
}

/// Granules with at least one pixel set in `mask`.
pub fn upper_approximation(gf: &GranulatedFrame, mask: &PixelMask) -> GranuleSet {
    check_shape(gf, mask);
    let mut hit = vec![false; gf.granules.len()];
    for i in mask.set_indices() {
        hit[gf.pixel_to_granule[i]] = true;
    }
    hit.iter().enumerate().filter(|(_, &h)| h).map(|(id, _)| id).collect()
}

/// Lower from the YCrCb mask alone, upper from the union of both masks.
pub fn approximate_fire(gf: &GranulatedFrame, mask_ycrcb: &PixelMask, mask_rgb: &PixelMask) -> RoughApproximation {
    let lower = lower_approximation(gf, mask_ycrcb);
    let upper = upper_approximation(gf, &mask_ycrcb.union(mask_rgb));
    RoughApproximation::new(lower, upper)
}

/// Pixel mask covering exactly the given granules.
pub fn granules_to_mask<'a>(gf: &GranulatedFrame, ids: impl IntoIterator<Item = &'a usize>) -> PixelMask {
    let mut mask = PixelMask::new(gf.width, gf.height);
    for &id in ids {
        for &i in &gf.granules[id].pixel_indices {
            mask.set_index(i, true);
        }
    }
    mask
}

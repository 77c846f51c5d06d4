mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use qrough_fire::granulation::granulate;
use qrough_fire::rough_core::{approximate_fire, lower_approximation, upper_approximation};
use qrough_fire::{FrameBuffer, PixelMask};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// Equivalence classes read straight off the pixel labels.
fn classes(labels: &[usize]) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (px, &l) in labels.iter().enumerate() {
        out.entry(l).or_default().insert(px);
    }
    out
}

fn mask_set(m: &PixelMask) -> BTreeSet<usize> {
    (0..m.bits().len()).filter(|&i| m.bits()[i]).collect()
}

fn oracle_lower(labels: &[usize], m: &PixelMask) -> BTreeSet<usize> {
    let x = mask_set(m);
    classes(labels).into_iter().filter(|(_, c)| c.is_subset(&x)).map(|(l, _)| l).collect()
}

fn oracle_upper(labels: &[usize], m: &PixelMask) -> BTreeSet<usize> {
    let x = mask_set(m);
    classes(labels).into_iter().filter(|(_, c)| !c.is_disjoint(&x)).map(|(l, _)| l).collect()
}

fn random_mask(rng: &mut SmallRng, w: usize, h: usize, density: f64) -> PixelMask {
    PixelMask::from_bits(w, h, (0..w * h).map(|_| rng.random_bool(density)).collect()).unwrap()
}

#[test]
fn matches_set_comprehension_oracle() {
    let mut rng = SmallRng::seed_from_u64(11);
    for _ in 0..1500 {
        let (w, h) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let f = common::random_frame(&mut rng, w, h);
        let gf = granulate(&f, rng.random_range(1..=80));
        let (dy, dr) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let ycc = random_mask(&mut rng, w, h, dy);
        let rgb = random_mask(&mut rng, w, h, dr);
        let ra = approximate_fire(&gf, &ycc, &rgb);
        assert_eq!(ra.lower, oracle_lower(&gf.pixel_to_granule, &ycc));
        assert_eq!(ra.upper, oracle_upper(&gf.pixel_to_granule, &ycc.union(&rgb)));
        assert!(ra.lower.is_subset(&ra.upper));
        assert_eq!(ra.boundary, ra.upper.difference(&ra.lower).copied().collect());
    }
}

#[test]
fn single_pixel_hit_reaches_upper() {
    let f = FrameBuffer::new(10, 5, vec![[250, 120, 30]; 50], 0).unwrap();
    let gf = granulate(&f, 30);
    let mut m = PixelMask::new(10, 5);
    m.set(7, 3, true);
    assert_eq!(upper_approximation(&gf, &m), BTreeSet::from([0]));
    assert!(lower_approximation(&gf, &m).is_empty());
}

proptest! {
    #[test]
    fn approximations_are_monotone(seed in any::<u64>(), w in 1usize..=8, h in 1usize..=8) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let f = common::random_frame(&mut rng, w, h);
        let gf = granulate(&f, 40);
        let small = random_mask(&mut rng, w, h, 0.4);
        let extra = random_mask(&mut rng, w, h, 0.4);
        let big = small.union(&extra);
        prop_assert!(lower_approximation(&gf, &small).is_subset(&lower_approximation(&gf, &big)));
        prop_assert!(upper_approximation(&gf, &small).is_subset(&upper_approximation(&gf, &big)));
    }

    #[test]
    fn boundary_granules_are_genuinely_ambiguous(seed in any::<u64>(), w in 1usize..=8, h in 1usize..=8) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let f = common::random_frame(&mut rng, w, h);
        let gf = granulate(&f, 40);
        let ycc = random_mask(&mut rng, w, h, 0.5);
        let rgb = random_mask(&mut rng, w, h, 0.5);
        let union = ycc.union(&rgb);
        let ra = approximate_fire(&gf, &ycc, &rgb);
        for &b in &ra.boundary {
            let px = &gf.granules[b].pixel_indices;
            let some_set = px.iter().any(|&i| union.get_index(i));
            let some_unset = px.iter().any(|&i| !union.get_index(i));
            let fully_union_not_ycc = !some_unset && !px.iter().all(|&i| ycc.get_index(i));
            prop_assert!(some_set && (some_unset || fully_union_not_ycc));
        }
    }
}

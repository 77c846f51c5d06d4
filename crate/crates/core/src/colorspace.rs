//! RGB to YCrCb conversion and the two color rule-bases that seed the rough
//! approximation of the fire region.
//!
//! The YCrCb rules mark a pixel as fire if ANY of them holds; the RGB rules
//! require ALL of them. Inequalities keep the exact strictness used by the
//! rule-base (`>=` vs `>`), including the fixed `Cb <= 120` / `Cr > 150` pair.

use crate::frame::{FrameBuffer, PixelMask, Rgb};

/// Full-range BT.601 luma and chroma, each in `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YCrCbPixel {
    pub y: u8,
    pub cr: u8,
    pub cb: u8,
}

/// Per-frame channel means used by the statistics-dependent rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    pub r_mean: f64,
    pub y_mean: f64,
    pub cr_mean: f64,
    pub cb_mean: f64,
}

const CB_MAX: u8 = 120;
const CR_MIN: u8 = 150;

fn to_channel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Converts with y = 0.299r + 0.587g + 0.114b, cr = 0.713(r - y) + 128,
/// cb = 0.564(b - y) + 128. Chroma uses the unrounded luma.
pub fn rgb_to_ycrcb(p: Rgb) -> YCrCbPixel {
    let [r, g, b] = p.map(f64::from);
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let cr = 0.713 * (r - y) + 128.0;
    let cb = 0.564 * (b - y) + 128.0;
    YCrCbPixel {
        y: to_channel(y),
        cr: to_channel(cr),
        cb: to_channel(cb),
    }
}

/// Converts every pixel of a frame, row-major.
pub fn convert_frame(frame: &FrameBuffer) -> Vec<YCrCbPixel> {
    frame.pixels().iter().map(|&p| rgb_to_ycrcb(p)).collect()
}

/// Exact means of R and of the converted Y, Cr, Cb over the whole frame.
pub fn frame_stats(frame: &FrameBuffer) -> FrameStats {
    stats_from(frame, &convert_frame(frame))
}

fn stats_from(frame: &FrameBuffer, ycc: &[YCrCbPixel]) -> FrameStats {
    let n = frame.len() as f64;
    let mut sums = [0u64; 4];
    for (p, q) in frame.pixels().iter().zip(ycc) {
        sums[0] += u64::from(p[0]);
        sums[1] += u64::from(q.y);
        sums[2] += u64::from(q.cr);
        sums[3] += u64::from(q.cb);
    }
    FrameStats {
        r_mean: sums[0] as f64 / n,
        y_mean: sums[1] as f64 / n,
        cr_mean: sums[2] as f64 / n,
        cb_mean: sums[3] as f64 / n,
    }
}

/// The statistics-free third YCrCb rule: `cb <= 120 && cr > 150`.
pub fn ycrcb_rule3(p: YCrCbPixel) -> bool {
    p.cb <= CB_MAX && p.cr > CR_MIN
}

/// Applies the three YCrCb rules (combined with OR) to one converted pixel.
pub fn is_ycrcb_fire(p: YCrCbPixel, stats: &FrameStats) -> bool {
    let rule1 = p.y >= p.cb && p.cr >= p.cb;
    let rule2 = f64::from(p.y) > stats.y_mean
        && f64::from(p.cr) > stats.cr_mean
        && f64::from(p.cb) > stats.cb_mean;
    rule1 || rule2 || ycrcb_rule3(p)
}

/// Applies both RGB rules (combined with AND): `r >= r_mean` and `r > g > b`.
pub fn is_rgb_fire(p: Rgb, stats: &FrameStats) -> bool {
    let [r, g, b] = p;
    f64::from(r) >= stats.r_mean && r > g && g > b
}

pub fn ycrcb_fire_mask(frame: &FrameBuffer, stats: &FrameStats) -> PixelMask {
    let bits = frame
        .pixels()
        .iter()
        .map(|&p| is_ycrcb_fire(rgb_to_ycrcb(p), stats))
        .collect();
    PixelMask::from_bits(frame.width(), frame.height(), bits).expect("mask sized from frame")
}

pub fn rgb_fire_mask(frame: &FrameBuffer, stats: &FrameStats) -> PixelMask {
    let bits = frame.pixels().iter().map(|&p| is_rgb_fire(p, stats)).collect();
    PixelMask::from_bits(frame.width(), frame.height(), bits).expect("mask sized from frame")
}

/// Both candidate masks for a frame, sharing a single conversion pass.
#[derive(Debug, Clone)]
pub struct CandidateMasks {
    pub stats: FrameStats,
    pub ycrcb: PixelMask,
    pub rgb: PixelMask,
}

pub fn candidate_masks(frame: &FrameBuffer) -> CandidateMasks {
    let ycc = convert_frame(frame);
    let stats = stats_from(frame, &ycc);
    let ycrcb_bits = ycc.iter().map(|&q| is_ycrcb_fire(q, &stats)).collect();
    let (w, h) = (frame.width(), frame.height());
    CandidateMasks {
        stats,
        ycrcb: PixelMask::from_bits(w, h, ycrcb_bits).expect("mask sized from frame"),
        rgb: rgb_fire_mask(frame, &stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ycc(y: u8, cr: u8, cb: u8) -> YCrCbPixel {
        YCrCbPixel { y, cr, cb }
    }

    fn stats(r: f64, y: f64, cr: f64, cb: f64) -> FrameStats {
        FrameStats {
            r_mean: r,
            y_mean: y,
            cr_mean: cr,
            cb_mean: cb,
        }
    }

    #[test]
    fn conversion_reference_points() {
        assert_eq!(rgb_to_ycrcb([0, 0, 0]), ycc(0, 128, 128));
        assert_eq!(rgb_to_ycrcb([255, 255, 255]), ycc(255, 128, 128));
        // cr = 0.713 * (255 - 76.245) + 128 = 255.45, clamped to 255
        assert_eq!(rgb_to_ycrcb([255, 0, 0]), ycc(76, 255, 85));
    }

    #[test]
    fn stats_of_uniform_and_two_pixel_frames() {
        let f = FrameBuffer::filled(3, 2, [255, 0, 0], 0).unwrap();
        let s = frame_stats(&f);
        assert_eq!(s.r_mean, 255.0);
        assert_eq!((s.y_mean, s.cr_mean, s.cb_mean), (76.0, 255.0, 85.0));

        let f = FrameBuffer::new(2, 1, vec![[0, 0, 0], [255, 255, 255]], 0).unwrap();
        let s = frame_stats(&f);
        assert_eq!(s.y_mean, 127.5);
        assert_eq!(s.cr_mean, 128.0);
        assert_eq!(s.cb_mean, 128.0);
    }

    #[test]
    fn ycrcb_rules() {
        let s = stats(0.0, 100.0, 128.0, 128.0);
        assert!(is_ycrcb_fire(ycc(200, 180, 100), &s));
        assert!(!is_ycrcb_fire(ycc(50, 100, 200), &s));
        // Rule 3 edge: cb <= 120 is inclusive, cr > 150 strict.
        let s = stats(0.0, 255.0, 255.0, 255.0);
        assert!(is_ycrcb_fire(ycc(0, 151, 120), &s));
        assert!(!is_ycrcb_fire(ycc(0, 150, 121), &s));
        assert!(!ycrcb_rule3(ycc(0, 150, 120)));
        assert!(!ycrcb_rule3(ycc(0, 151, 121)));
    }

    #[test]
    fn ycrcb_rule2_uses_strict_greater_than_means() {
        let s = stats(0.0, 100.0, 100.0, 100.0);
        // Rule 1 fails (y < cb), Rule 3 fails (cb > 120).
        assert!(is_ycrcb_fire(ycc(101, 101, 130), &stats(0.0, 100.0, 100.0, 129.0)));
        assert!(!is_ycrcb_fire(ycc(100, 101, 130), &s));
    }

    #[test]
    fn rgb_rules() {
        let s = stats(120.0, 0.0, 0.0, 0.0);
        assert!(is_rgb_fire([200, 150, 100], &s));
        assert!(!is_rgb_fire([100, 80, 60], &s));
        assert!(!is_rgb_fire([200, 210, 100], &s));
        assert!(!is_rgb_fire([200, 150, 150], &s));
        assert!(is_rgb_fire([120, 119, 0], &s));
    }

    #[test]
    fn candidate_masks_match_individual_masks() {
        let px: Vec<Rgb> = (0..48u8).map(|i| [i.wrapping_mul(37), i.wrapping_mul(91), i.wrapping_mul(13)]).collect();
        let f = FrameBuffer::new(8, 6, px, 0).unwrap();
        let c = candidate_masks(&f);
        let s = frame_stats(&f);
        assert_eq!(c.stats, s);
        assert_eq!(c.ycrcb, ycrcb_fire_mask(&f, &s));
        assert_eq!(c.rgb, rgb_fire_mask(&f, &s));
    }

    proptest! {
        #[test]
        fn gray_axis_is_chroma_neutral(g in any::<u8>()) {
            let q = rgb_to_ycrcb([g, g, g]);
            prop_assert_eq!((q.y, q.cr, q.cb), (g, 128, 128));
        }

        #[test]
        fn means_match_brute_force(px in prop::collection::vec(any::<[u8; 3]>(), 64)) {
            let f = FrameBuffer::new(8, 8, px.clone(), 0).unwrap();
            let s = frame_stats(&f);
            // Independent summation in floating point straight from the formula.
            let (mut r, mut y, mut cr, mut cb) = (0.0, 0.0, 0.0, 0.0);
            for p in &px {
                let (rf, gf, bf) = (p[0] as f64, p[1] as f64, p[2] as f64);
                let yy = 0.299 * rf + 0.587 * gf + 0.114 * bf;
                r += rf;
                y += yy.round().clamp(0.0, 255.0);
                cr += (0.713 * (rf - yy) + 128.0).round().clamp(0.0, 255.0);
                cb += (0.564 * (bf - yy) + 128.0).round().clamp(0.0, 255.0);
            }
            prop_assert!((s.r_mean - r / 64.0).abs() < 1e-9);
            prop_assert!((s.y_mean - y / 64.0).abs() < 1e-9);
            prop_assert!((s.cr_mean - cr / 64.0).abs() < 1e-9);
            prop_assert!((s.cb_mean - cb / 64.0).abs() < 1e-9);
        }

        #[test]
        fn rule3_classification_ignores_other_pixels(
            px in prop::collection::vec(any::<[u8; 3]>(), 16),
            other in prop::collection::vec(any::<[u8; 3]>(), 15),
        ) {
            let a = FrameBuffer::new(4, 4, px.clone(), 0).unwrap();
            let mut replaced = vec![px[0]];
            replaced.extend(other);
            let b = FrameBuffer::new(4, 4, replaced, 0).unwrap();
            if ycrcb_rule3(rgb_to_ycrcb(px[0])) {
                prop_assert!(ycrcb_fire_mask(&a, &frame_stats(&a)).get_index(0));
                prop_assert!(ycrcb_fire_mask(&b, &frame_stats(&b)).get_index(0));
            }
        }
    }
}

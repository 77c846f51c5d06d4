#![allow(dead_code)]

use qrough_fire::{FrameBuffer, Rgb};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

fn jitter(rng: &mut SmallRng, c: Rgb, amp: i16) -> Rgb {
    c.map(|v| (i16::from(v) + rng.random_range(-amp..=amp)).clamp(0, 255) as u8)
}

/// A noisy blue background, a fire blob with a hot core, and a dim orange
/// halo that passes the RGB rules but not the YCrCb ones. The halo ends up
/// in the boundary region, so the agent has real decisions to make.
pub fn textured_scene(seed: u64, width: usize, height: usize, index: usize) -> FrameBuffer {
    let mut rng = SmallRng::seed_from_u64(seed);
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let r_fire = width.min(height) as f64 * rng.random_range(0.15..0.25);
    let r_halo = r_fire * rng.random_range(1.2..1.5);
    let mut px = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let base = if d < r_fire * 0.5 {
                [255, 200, 60]
            } else if d < r_fire {
                [245, 120, 30]
            } else if d < r_halo {
                [120, 100, 90]
            } else {
                [30, 60, 200]
            };
            px.push(jitter(&mut rng, base, 6));
        }
    }
    FrameBuffer::new(width, height, px, index).unwrap()
}

/// Random frame with a few colors and random blocks, for small property runs.
pub fn random_frame(rng: &mut SmallRng, width: usize, height: usize) -> FrameBuffer {
    const PALETTE: [Rgb; 6] = [[250, 120, 30], [255, 200, 60], [120, 100, 90], [30, 60, 200], [200, 150, 100], [90, 90, 90]];
    let px = (0..width * height)
        .map(|_| {
            let c = PALETTE[rng.random_range(0..PALETTE.len())];
            jitter(rng, c, 12)
        })
        .collect();
    FrameBuffer::new(width, height, px, 0).unwrap()
}

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Images cross the boundary as RGBA byte buffers (the layout of canvas
//! `ImageData`), so the page can draw results with `putImageData`.

use qrough_fire::eval::{synth_sequence, ScenarioKind, SynthScenario};
use qrough_fire::pipeline::SequenceProcessor;
use qrough_fire::qrough_agent::{AgentConfig, QTable};
use qrough_fire::threat::{choose_p, AlarmPolicy};
use qrough_fire::{granulate, segment_frame, FrameBuffer, SegmentConfig};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use wasm_bindgen::prelude::*;

fn frame_from_rgba(rgba: &[u8], width: usize, height: usize) -> Result<FrameBuffer, String> {
    if rgba.len() != width * height * 4 {
        return Err(format!("expected {} RGBA bytes, got {}", width * height * 4, rgba.len()));
    }
    let pixels = rgba.chunks_exact(4).map(|p| [p[0], p[1], p[2]]).collect();
    FrameBuffer::new(width, height, pixels, 0).map_err(|e| e.to_string())
}

fn to_rgba(pixels: impl Iterator<Item = [u8; 3]>) -> Vec<u8> {
    pixels.flat_map(|[r, g, b]| [r, g, b, 255]).collect()
}

/// A noisy sky with a fire blob, a flame ring and a warm smoky halo that only
/// the loose color rule accepts. Deterministic for a given seed.
#[wasm_bindgen]
pub fn demo_scene(seed: u64, width: usize, height: usize) -> Vec<u8> {
    let mut rng = SmallRng::seed_from_u64(seed);
    let (cx, cy) = (width as f64 * rng.random_range(0.4..0.6), height as f64 * rng.random_range(0.45..0.65));
    let r = width.min(height) as f64 * rng.random_range(0.18..0.26);
    let mut px = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            // Flames are taller than they are wide.
            let d = ((x as f64 - cx).powi(2) + ((y as f64 - cy) * 0.7).powi(2)).sqrt();
            let base: [u8; 3] = if d < r * 0.55 {
                [255, 200, 60]
            } else if d < r {
                [245, 120, 30]
            } else if d < r * 1.35 {
                [120, 100, 90]
            } else {
                [40, 70, 150 + (y * 60 / height.max(1)) as u8]
            };
            let jitter = |c: u8, rng: &mut SmallRng| (c as i16 + rng.random_range(-6..=6)).clamp(0, 255) as u8;
            px.push(base.map(|c| jitter(c, &mut rng)));
        }
    }
    to_rgba(px.into_iter())
}

fn palette(id: usize) -> [u8; 3] {
    // Golden-ratio hue walk keeps neighbouring ids visually distinct.
    let h = (id as f64 * 0.618_033_988_75).fract() * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [r, g, b].map(|c| (60.0 + 180.0 * c) as u8)
}

/// Granules of an image at the given color threshold.
#[wasm_bindgen]
pub struct GranuleView {
    count: usize,
    edges: usize,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl GranuleView {
    pub fn count(&self) -> usize {
        self.count
    }

    /// Number of adjacent granule pairs.
    pub fn edges(&self) -> usize {
        self.edges
    }

    /// False-color rendering, one color per granule.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

#[wasm_bindgen]
pub fn granule_view(rgba: &[u8], width: usize, height: usize, thr: u8) -> Result<GranuleView, String> {
    let frame = frame_from_rgba(rgba, width, height)?;
    let gf = granulate(&frame, thr);
    Ok(GranuleView {
        count: gf.len(),
        edges: gf.edges().len(),
        rgba: to_rgba(gf.pixel_to_granule.iter().map(|&g| palette(g))),
    })
}

pub const LOWER_COLOR: [u8; 3] = [230, 40, 30];
pub const INCLUDED_COLOR: [u8; 3] = [255, 190, 0];
pub const EXCLUDED_COLOR: [u8; 3] = [0, 200, 220];

/// Segmentation of one image: certain fire, boundary granules the agent
/// accepted, and boundary granules it rejected.
#[wasm_bindgen]
pub struct SegmentView {
    lower_pixels: usize,
    included_pixels: usize,
    excluded_pixels: usize,
    boundary_granules: usize,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl SegmentView {
    pub fn lower_pixels(&self) -> usize {
        self.lower_pixels
    }

    pub fn included_pixels(&self) -> usize {
        self.included_pixels
    }

    pub fn excluded_pixels(&self) -> usize {
        self.excluded_pixels
    }

    pub fn boundary_granules(&self) -> usize {
        self.boundary_granules
    }

    /// The input darkened, with the three regions painted on top.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

#[wasm_bindgen]
pub fn segment_view(rgba: &[u8], width: usize, height: usize, thr: u8, gamma: f64) -> Result<SegmentView, String> {
    let frame = frame_from_rgba(rgba, width, height)?;
    let cfg = SegmentConfig {
        thr,
        agent: AgentConfig { gamma, ..Default::default() },
    };
    let mut qt = QTable::new(cfg.agent.quant_levels);
    let seg = segment_frame(&frame, &cfg, &mut qt).map_err(|e| e.to_string())?;
    let mut view = SegmentView {
        lower_pixels: 0,
        included_pixels: 0,
        excluded_pixels: 0,
        boundary_granules: seg.approximation.boundary.len(),
        rgba: Vec::with_capacity(rgba.len()),
    };
    for (i, p) in frame.pixels().iter().enumerate() {
        let g = seg.granulated.pixel_to_granule[i];
        let color = if seg.approximation.lower.contains(&g) {
            view.lower_pixels += 1;
            LOWER_COLOR
        } else if seg.outcome.fire.contains(&g) {
            view.included_pixels += 1;
            INCLUDED_COLOR
        } else if seg.approximation.boundary.contains(&g) {
            view.excluded_pixels += 1;
            EXCLUDED_COLOR
        } else {
            p.map(|c| c / 3)
        };
        view.rgba.extend(color.into_iter().chain([255]));
    }
    Ok(view)
}

/// Threat index and alarm flags over a synthetic scenario.
#[wasm_bindgen]
pub struct ThreatCurve {
    threat: Vec<f64>,
    area: Vec<f64>,
    alarm: Vec<u8>,
}

#[wasm_bindgen]
impl ThreatCurve {
    pub fn threat(&self) -> Vec<f64> {
        self.threat.clone()
    }

    /// Segmented fire area per frame, in pixels.
    pub fn area(&self) -> Vec<f64> {
        self.area.clone()
    }

    /// 1 where the alarm is raised.
    pub fn alarm(&self) -> Vec<u8> {
        self.alarm.clone()
    }
}

/// Runs `scenario` (flicker, grow, shrink or flashover) through segmentation
/// and threat tracking on a 160x120 frame.
#[wasm_bindgen]
pub fn threat_curve(scenario: &str, frames: usize, fps: f64, tau: f64) -> Result<ThreatCurve, String> {
    let kind: ScenarioKind = scenario.parse()?;
    let mut s = SynthScenario::new(kind, frames);
    (s.width, s.height, s.base_area) = (160, 120, 600.0);
    let p = choose_p(fps).map_err(|e| e.to_string())?;
    let policy = AlarmPolicy { tau, ..AlarmPolicy::for_fps(fps) };
    let cfg = SegmentConfig::default();
    let mut proc = SequenceProcessor::new(cfg, cfg.agent.new_table(), p, policy).map_err(|e| e.to_string())?;
    let mut curve = ThreatCurve {
        threat: Vec::with_capacity(frames),
        area: Vec::with_capacity(frames),
        alarm: Vec::with_capacity(frames),
    };
    for frame in &synth_sequence(&s).frames {
        let r = proc.process(frame).map_err(|e| e.to_string())?.report;
        curve.threat.push(r.threat);
        curve.area.push(r.fire_area as f64);
        curve.alarm.push(u8::from(r.alarm));
    }
    Ok(curve)
}

//! Segmentation quality metrics and synthetic ground-truthed sequences.

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{FrameBuffer, PixelMask, Rgb};
use crate::granulation::BBox;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("mask dimensions differ: prediction {0}x{1}, ground truth {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("no region: bounding box undefined for an empty mask")]
    NoRegion,
    #[error("prediction has {0} frames but ground truth has {1}")]
    FrameCountMismatch(usize, usize),
}

/// Pixel accuracy of a prediction. Percentages in `[0, 100]`, ratios in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub fp_pct: f64,
    pub fn_pct: f64,
    pub precision: f64,
    pub recall: f64,
    pub n_frames: usize,
}

impl EvalMetrics {
    /// Per-frame average of a set of metrics.
    pub fn mean(per_frame: &[EvalMetrics]) -> EvalMetrics {
        let n = per_frame.iter().map(|m| m.n_frames).sum::<usize>();
        if n == 0 {
            return EvalMetrics {
                fp_pct: 0.0,
                fn_pct: 0.0,
                precision: 1.0,
                recall: 1.0,
                n_frames: 0,
            };
        }
        let avg = |f: fn(&EvalMetrics) -> f64| per_frame.iter().map(|m| f(m) * m.n_frames as f64).sum::<f64>() / n as f64;
        EvalMetrics {
            fp_pct: avg(|m| m.fp_pct),
            fn_pct: avg(|m| m.fn_pct),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            n_frames: n,
        }
    }
}

/// FP% = 100 FP/(TP+FP) and FN% = 100 FN/(TP+FN), so precision and recall
/// are their complements. Empty predictions have precision 1, empty ground
/// truth has recall 1.
pub fn pixel_metrics(pred: &PixelMask, gt: &PixelMask) -> Result<EvalMetrics, EvalError> {
    if !pred.same_shape(gt) {
        return Err(EvalError::DimensionMismatch(pred.width(), pred.height(), gt.width(), gt.height()));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    Ok(metrics_from_counts(tp, fp, fneg))
}

pub fn metrics_from_counts(tp: usize, fp: usize, fneg: usize) -> EvalMetrics {
    let ratio = |num: usize, den: usize, empty: f64| if den == 0 { empty } else { num as f64 / den as f64 };
    EvalMetrics {
        fp_pct: 100.0 * ratio(fp, tp + fp, 0.0),
        fn_pct: 100.0 * ratio(fneg, tp + fneg, 0.0),
        precision: ratio(tp, tp + fp, 1.0),
        recall: ratio(tp, tp + fneg, 1.0),
        n_frames: 1,
    }
}

/// Tight box around the set pixels, or `None` for an empty mask.
pub fn bbox_of(mask: &PixelMask) -> Option<BBox> {
    let w = mask.width();
    mask.set_indices().fold(None, |acc: Option<BBox>, i| {
        let (x, y) = (i % w, i / w);
        Some(match acc {
            None => BBox {
                min_x: x,
                min_y: y,
                max_x: x,
                max_y: y,
            },
            Some(b) => BBox {
                min_x: b.min_x.min(x),
                min_y: b.min_y.min(y),
                max_x: b.max_x.max(x),
                max_y: b.max_y.max(y),
            },
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerRmse {
    pub rmse: f64,
}

fn corners(b: &BBox) -> [(f64, f64); 4] {
    let (x0, y0, x1, y1) = (b.min_x as f64, b.min_y as f64, b.max_x as f64, b.max_y as f64);
    [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]
}

/// Root mean square of the distances between corresponding box corners.
pub fn corner_rmse(pred: Option<&BBox>, gt: Option<&BBox>) -> Result<CornerRmse, EvalError> {
    let (Some(p), Some(g)) = (pred, gt) else {
        return Err(EvalError::NoRegion);
    };
    let sq: f64 = corners(p)
        .iter()
        .zip(corners(g))
        .map(|(a, b)| (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2))
        .sum();
    Ok(CornerRmse { rmse: (sq / 4.0).sqrt() })
}

/// Summary written by the `eval` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEvaluation {
    pub fp_pct: f64,
    pub fn_pct: f64,
    pub precision: f64,
    pub recall: f64,
    /// Mean corner RMSE over frames where both boxes exist.
    pub avg_corner_rmse: Option<f64>,
    /// Frames with ground-truth fire but no predicted region.
    pub undefined_frames: usize,
    /// Mean corner RMSE when each undefined frame scores the frame diagonal.
    pub avg_corner_rmse_with_misses: Option<f64>,
    pub n_frames: usize,
}

pub fn evaluate_sequence(preds: &[PixelMask], gts: &[PixelMask]) -> Result<SequenceEvaluation, EvalError> {
    if preds.len() != gts.len() {
        return Err(EvalError::FrameCountMismatch(preds.len(), gts.len()));
    }
    let mut per_frame = Vec::with_capacity(preds.len());
    let mut defined = Vec::new();
    let mut with_misses = Vec::new();
    let mut undefined = 0;
    for (p, g) in preds.iter().zip(gts) {
        per_frame.push(pixel_metrics(p, g)?);
        let gt_box = bbox_of(g);
        if gt_box.is_none() {
            continue;
        }
        match corner_rmse(bbox_of(p).as_ref(), gt_box.as_ref()) {
            Ok(c) => {
                defined.push(c.rmse);
                with_misses.push(c.rmse);
            }
            Err(_) => {
                undefined += 1;
                with_misses.push((g.width() as f64).hypot(g.height() as f64));
            }
        }
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let m = EvalMetrics::mean(&per_frame);
    Ok(SequenceEvaluation {
        fp_pct: m.fp_pct,
        fn_pct: m.fn_pct,
        precision: m.precision,
        recall: m.recall,
        avg_corner_rmse: mean(&defined),
        undefined_frames: undefined,
        avg_corner_rmse_with_misses: mean(&with_misses),
        n_frames: m.n_frames,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Area alternates between 0.9x and 1.1x the base area.
    Flicker,
    /// `base * rate^t`.
    Grow,
    /// `base * rate^-t`.
    Shrink,
    /// Base area for the first half, four times it afterwards.
    Flashover,
}

impl std::str::FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flicker" => Ok(Self::Flicker),
            "grow" => Ok(Self::Grow),
            "shrink" => Ok(Self::Shrink),
            "flashover" => Ok(Self::Flashover),
            other => Err(format!("unknown scenario {other:?}")),
        }
    }
}

/// A centered fire-colored rectangle on a uniform background whose area
/// follows the scenario trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthScenario {
    pub kind: ScenarioKind,
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub base_area: f64,
    pub rate: f64,
    pub fire_color: Rgb,
    pub bg_color: Rgb,
    /// Chooses whether flicker starts high or low.
    pub seed: u64,
}

/// Passes YCrCb rule 3 and both RGB rules.
pub const FIRE_COLOR: Rgb = [250, 120, 30];
/// Fails every YCrCb and RGB rule while fire is present.
pub const BACKGROUND_COLOR: Rgb = [30, 60, 200];

impl SynthScenario {
    pub fn new(kind: ScenarioKind, frames: usize) -> Self {
        Self {
            kind,
            frames,
            width: 320,
            height: 240,
            base_area: 2400.0,
            rate: 1.02,
            fire_color: FIRE_COLOR,
            bg_color: BACKGROUND_COLOR,
            seed: 0,
        }
    }

    fn flicker_starts_high(&self) -> bool {
        SmallRng::seed_from_u64(self.seed).random::<bool>()
    }

    /// Target fire area for frame `t`, before rasterization or clamping.
    pub fn target_area(&self, t: usize) -> f64 {
        let b = self.base_area;
        match self.kind {
            ScenarioKind::Flicker => {
                let high = t.is_multiple_of(2) == self.flicker_starts_high();
                if high {
                    b * 1.1
                } else {
                    b * 0.9
                }
            }
            ScenarioKind::Grow => b * self.rate.powi(t as i32),
            ScenarioKind::Shrink => b * self.rate.powi(-(t as i32)),
            ScenarioKind::Flashover => {
                if t < self.frames / 2 {
                    b
                } else {
                    4.0 * b
                }
            }
        }
    }

    /// Centered rectangle approximating `area` with the frame's aspect ratio.
    pub fn rectangle(&self, area: f64) -> (BBox, bool) {
        let (w, h) = (self.width, self.height);
        let full = (w * h) as f64;
        let clamped = area > full;
        let area = area.clamp(1.0, full);
        let rw = ((area * w as f64 / h as f64).sqrt().round() as usize).clamp(1, w);
        let rh = ((area / rw as f64).round() as usize).clamp(1, h);
        let (x0, y0) = ((w - rw) / 2, (h - rh) / 2);
        (
            BBox {
                min_x: x0,
                min_y: y0,
                max_x: x0 + rw - 1,
                max_y: y0 + rh - 1,
            },
            clamped,
        )
    }

    /// Frame `t` and its exact ground-truth mask.
    pub fn frame(&self, t: usize) -> (FrameBuffer, PixelMask) {
        let (rect, clamped) = self.rectangle(self.target_area(t));
        if clamped {
            log::warn!("frame {t}: fire area {:.0} exceeds the frame; clamped", self.target_area(t));
        }
        let mut frame = FrameBuffer::filled(self.width, self.height, self.bg_color, t).expect("positive frame size");
        let mut gt = PixelMask::new(self.width, self.height);
        for y in rect.min_y..=rect.max_y {
            for x in rect.min_x..=rect.max_x {
                frame.set_pixel(x, y, self.fire_color);
                gt.set(x, y, true);
            }
        }
        (frame, gt)
    }
}

pub struct SynthSequence {
    pub frames: Vec<FrameBuffer>,
    pub ground_truth: Vec<PixelMask>,
}

pub fn synth_sequence(s: &SynthScenario) -> SynthSequence {
    let (frames, ground_truth) = (0..s.frames).map(|t| s.frame(t)).unzip();
    SynthSequence { frames, ground_truth }
}

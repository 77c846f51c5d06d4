//! Q-rough refinement of the rough fire approximation.
//!
//! Boundary granules are states; each state has two actions: include the
//! granule in the lower approximation and move to a boundary granule touching
//! it, or leave the lower approximation alone and move to a boundary granule
//! touching the lower approximation. Each action leads to exactly one successor,
//! so the Q-value reduces to `Q(s, a) = R(s) + gamma * max_a' Q(s'_a, a')`.
//! Rewards measure how close a granule's mean color is to the running mean of
//! the lower approximation (the fire model).
//!
//! Decisions are keyed by a quantized granule feature and stored in a
//! [`QTable`], so similar granules in later frames reuse the learned action
//! without evaluating any reward.

mod qtable;
mod walk;

use thiserror::Error;

pub use qtable::{Action, QEntry, QTable, StateKey};
pub use walk::{q_pair, refine, BoundaryWalk, Decision, RefineOutcome};

use crate::colorspace::candidate_masks;
use crate::frame::{FrameBuffer, PixelMask};
use crate::granulation::{granulate, Feature, GranulatedFrame, Granule, DEFAULT_THR};
use crate::rough_core::{approximate_fire, granules_to_mask, RoughApproximation};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no fire model: the lower approximation is empty")]
    NoFireModel,
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported q-table file (format {format:?}, version {version})")]
    QTableVersion { format: String, version: u32 },
    #[error("q-table uses {table} quantization levels but the agent is configured for {config}")]
    QuantMismatch { table: u16, config: u16 },
    #[error("q-table serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    /// Discount factor, `0 <= gamma < 1`.
    pub gamma: f64,
    /// Bins per feature channel when forming state keys.
    pub quant_levels: u16,
    pub lookahead_depth: u32,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            quant_levels: 16,
            lookahead_depth: 1,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(AgentError::InvalidConfig(format!("gamma {} not in [0, 1)", self.gamma)));
        }
        if self.quant_levels < 2 {
            return Err(AgentError::InvalidConfig(format!(
                "quant_levels {} must be at least 2",
                self.quant_levels
            )));
        }
        if self.lookahead_depth < 1 {
            return Err(AgentError::InvalidConfig("lookahead_depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn new_table(&self) -> QTable {
        QTable::new(self.quant_levels)
    }
}

/// Pixel-weighted running mean feature of the current lower approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct FireModel {
    sum: Feature,
    pixel_count: usize,
}

impl FireModel {
    /// An undefined model with no pixels.
    pub fn empty() -> Self {
        Self {
            sum: [0.0; 6],
            pixel_count: 0,
        }
    }

    pub fn from_granules<'a>(granules: impl IntoIterator<Item = &'a Granule>) -> Self {
        let mut m = Self::empty();
        for g in granules {
            m.add_granule(g);
        }
        m
    }

    pub fn is_defined(&self) -> bool {
        self.pixel_count > 0
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_count
    }

    pub fn add_granule(&mut self, g: &Granule) {
        let n = g.len() as f64;
        for (s, v) in self.sum.iter_mut().zip(g.mean_feature) {
            *s += v * n;
        }
        self.pixel_count += g.len();
    }

    pub fn mean_feature(&self) -> Option<Feature> {
        self.is_defined().then(|| {
            let n = self.pixel_count as f64;
            self.sum.map(|s| (s / n).clamp(0.0, 1.0))
        })
    }
}

/// Distance between two features normalized to `[0, 1]`.
pub fn normalized_distance(a: &Feature, b: &Feature) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq.sqrt() / 6f64.sqrt()).min(1.0)
}

/// `1 - 2D`, where D is the normalized Euclidean distance between the model
/// mean and the granule mean. Lies in `[-1, 1]`.
pub fn reward(model: &FireModel, g: &Granule) -> Result<f64, AgentError> {
    let m = model.mean_feature().ok_or(AgentError::NoFireModel)?;
    Ok(1.0 - 2.0 * normalized_distance(&m, &g.mean_feature))
}

/// Granulation and agent settings for one sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    /// Granulation color threshold, 1..=255.
    pub thr: u8,
    pub agent: AgentConfig,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            thr: DEFAULT_THR,
            agent: AgentConfig::default(),
        }
    }
}

/// Everything produced while segmenting one frame.
#[derive(Debug, Clone)]
pub struct FrameSegmentation {
    pub mask: PixelMask,
    pub lower_mask: PixelMask,
    pub upper_mask: PixelMask,
    pub granulated: GranulatedFrame,
    pub approximation: RoughApproximation,
    pub outcome: RefineOutcome,
}

impl FrameSegmentation {
    pub fn fire_area(&self) -> usize {
        self.mask.count()
    }
}

/// Color rules, granulation, rough approximation and Q-rough refinement for
/// one frame. `qt` carries learned decisions between frames of a sequence.
pub fn segment_frame(frame: &FrameBuffer, cfg: &SegmentConfig, qt: &mut QTable) -> Result<FrameSegmentation, AgentError> {
    cfg.agent.validate()?;
    if qt.quant_levels() != cfg.agent.quant_levels {
        return Err(AgentError::QuantMismatch {
            table: qt.quant_levels(),
            config: cfg.agent.quant_levels,
        });
    }
    let masks = candidate_masks(frame);
    let granulated = granulate(frame, cfg.thr);
    let approximation = approximate_fire(&granulated, &masks.ycrcb, &masks.rgb);
    let outcome = refine(&granulated, &approximation, &cfg.agent, qt);
    Ok(FrameSegmentation {
        mask: granules_to_mask(&granulated, &outcome.fire),
        lower_mask: granules_to_mask(&granulated, &approximation.lower),
        upper_mask: granules_to_mask(&granulated, &approximation.upper),
        granulated,
        approximation,
        outcome,
    })
}

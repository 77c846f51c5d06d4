//! Unsupervised fire segmentation and fire threat scoring for frame sequences.
//!
//! Each frame goes through:
//!
//! 1. **colorspace** – YCrCb and RGB rule-bases give two candidate fire masks.
//! 2. **granulation** – the frame is split into spatio-color granules with an
//!    adjacency graph.
//! 3. **rough_core** – granules fully inside the YCrCb mask form the lower
//!    approximation; granules touching either mask form the upper one.
//! 4. **qrough_agent** – a Q-agent walks the boundary between the two and
//!    decides, granule by granule, whether it joins the fire region. Learned
//!    decisions carry over to later frames through a [`QTable`].
//! 5. **threat** – per-frame fire areas feed the signed threat index and an
//!    alarm rule.
//!
//! [`eval`] scores masks against ground truth and synthesizes test sequences;
//! [`frame_io`] reads frame directories and writes masks and reports.

pub mod colorspace;
pub mod eval;
pub mod frame;
pub mod frame_io;
pub mod granulation;
pub mod pipeline;
pub mod qrough_agent;
pub mod rough_core;
pub mod threat;

pub use frame::{FrameBuffer, FrameError, PixelMask, Rgb};
pub use granulation::{granulate, GranulatedFrame, Granule};
pub use qrough_agent::{segment_frame, AgentConfig, FrameSegmentation, QTable, SegmentConfig};
pub use rough_core::RoughApproximation;
pub use threat::{AlarmPolicy, ThreatMonitor, ThreatTracker};

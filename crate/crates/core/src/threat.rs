//! Fire threat index.
//!
//! `T_F = (F_muP - F_mu) / F_mu`, where `F_mu` is the mean fire area over all
//! frames seen so far and `F_muP` the mean over the most recent `P` frames
//! (all frames while fewer than `P` exist). The index is signed: a spreading
//! fire is positive, a steady or flickering one hovers near zero, and a
//! shrinking one is negative.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThreatError {
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFps(f64),
    #[error("window length must be at least 1")]
    ZeroWindow,
}

/// Window length `P` covering one second of video: `round(fps)`, at least 1.
pub fn choose_p(fps: f64) -> Result<usize, ThreatError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(ThreatError::InvalidFps(fps));
    }
    Ok((fps.round() as usize).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatSample {
    pub f_mu: f64,
    pub f_mu_p: f64,
    pub threat: f64,
}

/// Running fire-area history for one sequence.
#[derive(Debug, Clone)]
pub struct ThreatTracker {
    areas: Vec<u64>,
    p: usize,
    running_sum: u64,
    window_sum: u64,
}

impl ThreatTracker {
    pub fn new(p: usize) -> Result<Self, ThreatError> {
        if p == 0 {
            return Err(ThreatError::ZeroWindow);
        }
        Ok(Self {
            areas: Vec::new(),
            p,
            running_sum: 0,
            window_sum: 0,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn areas(&self) -> &[u64] {
        &self.areas
    }

    pub fn running_sum(&self) -> u64 {
        self.running_sum
    }

    pub fn window_sum(&self) -> u64 {
        self.window_sum
    }

    /// Appends one frame's fire area and returns the updated index.
    pub fn update(&mut self, area: u64) -> ThreatSample {
        self.areas.push(area);
        self.running_sum += area;
        self.window_sum += area;
        let n = self.areas.len();
        if n > self.p {
            self.window_sum -= self.areas[n - 1 - self.p];
        }
        let f_mu = self.running_sum as f64 / n as f64;
        let f_mu_p = self.window_sum as f64 / n.min(self.p) as f64;
        let threat = if f_mu > 0.0 { (f_mu_p - f_mu) / f_mu } else { 0.0 };
        ThreatSample { f_mu, f_mu_p, threat }
    }
}

/// Alarm when the last `k` threat values all exceed `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlarmPolicy {
    pub tau: f64,
    pub k: usize,
}

impl AlarmPolicy {
    pub const DEFAULT_TAU: f64 = 0.2;

    /// Default policy for a capture rate: `tau = 0.2`, `k = round(fps / 2)`.
    pub fn for_fps(fps: f64) -> Self {
        Self {
            tau: Self::DEFAULT_TAU,
            k: ((fps / 2.0).round() as usize).max(1),
        }
    }
}

pub fn alarm(policy: &AlarmPolicy, threat_history: &[f64]) -> bool {
    let k = policy.k.max(1);
    threat_history.len() >= k && threat_history[threat_history.len() - k..].iter().all(|&t| t > policy.tau)
}

/// Tracker plus alarm gating: one call per frame, in frame order.
#[derive(Debug, Clone)]
pub struct ThreatMonitor {
    tracker: ThreatTracker,
    policy: AlarmPolicy,
    recent: VecDeque<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatStep {
    pub sample: ThreatSample,
    pub alarm: bool,
}

impl ThreatMonitor {
    pub fn new(p: usize, policy: AlarmPolicy) -> Result<Self, ThreatError> {
        Ok(Self {
            tracker: ThreatTracker::new(p)?,
            policy,
            recent: VecDeque::with_capacity(policy.k.max(1)),
        })
    }

    pub fn tracker(&self) -> &ThreatTracker {
        &self.tracker
    }

    pub fn policy(&self) -> &AlarmPolicy {
        &self.policy
    }

    pub fn push(&mut self, area: u64) -> ThreatStep {
        let sample = self.tracker.update(area);
        if self.recent.len() == self.policy.k.max(1) {
            self.recent.pop_front();
        }
        self.recent.push_back(sample.threat);
        let alarm = alarm(&self.policy, self.recent.make_contiguous());
        ThreatStep { sample, alarm }
    }
}

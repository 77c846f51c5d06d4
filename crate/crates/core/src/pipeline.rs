//! Per-sequence driver: segmentation plus threat tracking, frame by frame.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::frame::FrameBuffer;
use crate::frame_io::{load_sequence, write_mask, FrameIoError, FrameReport, MaskFormat, ReportWriter};
use crate::qrough_agent::{segment_frame, AgentError, FrameSegmentation, QTable, SegmentConfig};
use crate::threat::{AlarmPolicy, ThreatError, ThreatMonitor};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Threat(#[from] ThreatError),
    #[error(transparent)]
    FrameIo(#[from] FrameIoError),
    #[error("frame {got} arrived out of order (expected {expected})")]
    OutOfOrder { expected: usize, got: usize },
}

pub struct ProcessedFrame {
    pub segmentation: FrameSegmentation,
    pub report: FrameReport,
}

/// Owns the Q-table and threat history of one sequence. Frames must be fed
/// in index order.
pub struct SequenceProcessor {
    cfg: SegmentConfig,
    qt: QTable,
    monitor: ThreatMonitor,
    next_index: usize,
}

impl SequenceProcessor {
    pub fn new(cfg: SegmentConfig, qt: QTable, p: usize, policy: AlarmPolicy) -> Result<Self, PipelineError> {
        cfg.agent.validate()?;
        if qt.quant_levels() != cfg.agent.quant_levels {
            return Err(AgentError::QuantMismatch {
                table: qt.quant_levels(),
                config: cfg.agent.quant_levels,
            }
            .into());
        }
        Ok(Self {
            cfg,
            qt,
            monitor: ThreatMonitor::new(p, policy)?,
            next_index: 0,
        })
    }

    pub fn config(&self) -> &SegmentConfig {
        &self.cfg
    }

    pub fn qtable(&self) -> &QTable {
        &self.qt
    }

    pub fn into_qtable(self) -> QTable {
        self.qt
    }

    pub fn process(&mut self, frame: &FrameBuffer) -> Result<ProcessedFrame, PipelineError> {
        if frame.index() != self.next_index {
            return Err(PipelineError::OutOfOrder {
                expected: self.next_index,
                got: frame.index(),
            });
        }
        self.next_index += 1;
        let segmentation = segment_frame(frame, &self.cfg, &mut self.qt)?;
        let area = segmentation.fire_area() as u64;
        let step = self.monitor.push(area);
        let report = FrameReport {
            frame_index: frame.index(),
            fire_area: area,
            f_mu: step.sample.f_mu,
            f_mu_p: step.sample.f_mu_p,
            threat: step.sample.threat,
            alarm: step.alarm,
        };
        Ok(ProcessedFrame { segmentation, report })
    }
}

/// Settings for processing one frame directory end to end.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub input: PathBuf,
    /// Filename glob applied inside `input`.
    pub pattern: String,
    pub segment: SegmentConfig,
    /// Where to write per-frame masks, named after the input files.
    pub mask_dir: Option<PathBuf>,
    pub mask_format: MaskFormat,
    /// JSON-lines threat report; the first line echoes the settings.
    pub report: Option<PathBuf>,
    /// `(frame_index, threat)` CSV for plotting.
    pub plot: Option<PathBuf>,
    pub fps: Option<f64>,
    pub p: usize,
    pub alarm: AlarmPolicy,
    pub load_qtable: Option<PathBuf>,
    pub save_qtable: Option<PathBuf>,
}

impl RunOptions {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            pattern: "*".into(),
            segment: SegmentConfig::default(),
            mask_dir: None,
            mask_format: MaskFormat::Pgm,
            report: None,
            plot: None,
            fps: None,
            p: 1,
            alarm: AlarmPolicy { tau: AlarmPolicy::DEFAULT_TAU, k: 1 },
            load_qtable: None,
            save_qtable: None,
        }
    }
}

#[derive(Serialize)]
struct ReportHeader<'a> {
    header: HeaderFields<'a>,
}

#[derive(Serialize)]
struct HeaderFields<'a> {
    input: &'a str,
    thr: u8,
    gamma: f64,
    quant_levels: u16,
    lookahead_depth: u32,
    fps: Option<f64>,
    p: usize,
    alarm_tau: f64,
    alarm_k: usize,
}

/// Totals over a processed directory.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub reports: Vec<FrameReport>,
    pub no_fire_model_frames: usize,
    pub reward_evaluations: usize,
    pub known_state_hits: usize,
    pub qtable_entries: usize,
}

fn create(path: &Path) -> Result<BufWriter<File>, FrameIoError> {
    File::create(path).map(BufWriter::new).map_err(|source| FrameIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Segments every frame in `opts.input`, writing whichever outputs are
/// configured. An empty directory produces no output files.
pub fn run_directory(opts: &RunOptions) -> Result<RunSummary, PipelineError> {
    let frames = load_sequence(&opts.input, &opts.pattern)?;
    if frames.is_empty() {
        log::info!("no frames in {}", opts.input.display());
        return Ok(RunSummary::default());
    }
    let names: Vec<String> = frames
        .paths()
        .iter()
        .map(|p| p.file_stem().unwrap_or_default().to_string_lossy().into_owned())
        .collect();

    let qt = match &opts.load_qtable {
        Some(path) => QTable::load(path)?,
        None => opts.segment.agent.new_table(),
    };
    let mut proc = SequenceProcessor::new(opts.segment, qt, opts.p, opts.alarm)?;

    let mut report = match &opts.report {
        Some(path) => {
            let mut w = ReportWriter::create(path)?;
            w.write_header(&ReportHeader {
                header: HeaderFields {
                    input: &opts.input.to_string_lossy(),
                    thr: opts.segment.thr,
                    gamma: opts.segment.agent.gamma,
                    quant_levels: opts.segment.agent.quant_levels,
                    lookahead_depth: opts.segment.agent.lookahead_depth,
                    fps: opts.fps,
                    p: opts.p,
                    alarm_tau: opts.alarm.tau,
                    alarm_k: opts.alarm.k,
                },
            })?;
            Some(w)
        }
        None => None,
    };
    let mut plot = match &opts.plot {
        Some(path) => {
            let mut w = create(path)?;
            writeln!(w, "frame_index,threat").map_err(|source| FrameIoError::Io { path: path.clone(), source })?;
            Some((path, w))
        }
        None => None,
    };

    let mut summary = RunSummary::default();
    for (frame, name) in frames.zip(&names) {
        let frame = frame?;
        let out = proc.process(&frame)?;
        if let Some(dir) = &opts.mask_dir {
            let path = dir.join(format!("{name}.{}", opts.mask_format.extension()));
            write_mask(&out.segmentation.mask, path, opts.mask_format)?;
        }
        if let Some(w) = report.as_mut() {
            w.write(&out.report)?;
        }
        if let Some((path, w)) = plot.as_mut() {
            writeln!(w, "{},{}", out.report.frame_index, out.report.threat).map_err(|source| FrameIoError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        let o = &out.segmentation.outcome;
        summary.no_fire_model_frames += usize::from(o.no_fire_model);
        summary.reward_evaluations += o.reward_evaluations;
        summary.known_state_hits += o.known_state_hits;
        summary.reports.push(out.report);
    }

    if let Some(w) = report {
        w.finish()?;
    }
    if let Some((path, mut w)) = plot {
        w.flush().map_err(|source| FrameIoError::Io { path: path.clone(), source })?;
    }
    summary.qtable_entries = proc.qtable().len();
    if let Some(path) = &opts.save_qtable {
        proc.qtable().save(path)?;
    }
    Ok(summary)
}

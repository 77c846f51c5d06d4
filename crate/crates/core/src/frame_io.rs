//! Frame sequences on disk, mask images, and JSON-lines reports.
//!
//! A sequence is a directory of numbered still images (PNG or any portable
//! anymap: PPM/PGM/PNM), read in lexicographic filename order.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{GrayImage, ImageFormat, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{FrameBuffer, PixelMask};

const IMAGE_EXTENSIONS: &[&str] = &["png", "ppm", "pgm", "pnm", "pbm", "pam"];

#[derive(Debug, Error)]
pub enum FrameIoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot decode {}: {source}", path.display())]
    Decode { path: PathBuf, source: image::ImageError },
    #[error("cannot encode {}: {source}", path.display())]
    Encode { path: PathBuf, source: image::ImageError },
    #[error("invalid filename pattern {pattern:?}: {source}")]
    Pattern { pattern: String, source: glob::PatternError },
    #[error("{} is {}x{} but {} is {}x{}", first.display(), first_dims.0, first_dims.1, other.display(), other_dims.0, other_dims.1)]
    DimensionMismatch {
        first: PathBuf,
        first_dims: (u32, u32),
        other: PathBuf,
        other_dims: (u32, u32),
    },
    #[error("{}: empty image", path.display())]
    EmptyImage { path: PathBuf },
    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> FrameIoError + '_ {
    move |source| FrameIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskFormat {
    #[default]
    Pgm,
    Png,
}

impl MaskFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MaskFormat::Pgm => "pgm",
            MaskFormat::Png => "png",
        }
    }

    fn image_format(self) -> ImageFormat {
        match self {
            MaskFormat::Pgm => ImageFormat::Pnm,
            MaskFormat::Png => ImageFormat::Png,
        }
    }
}

impl std::str::FromStr for MaskFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(MaskFormat::Pgm),
            "png" => Ok(MaskFormat::Png),
            other => Err(format!("unknown mask format {other:?} (expected pgm or png)")),
        }
    }
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Image files in `dir` whose names match `pattern`, sorted by filename.
pub fn list_frames(dir: &Path, pattern: &str) -> Result<Vec<PathBuf>, FrameIoError> {
    let pat = glob::Pattern::new(pattern).map_err(|source| FrameIoError::Pattern {
        pattern: pattern.to_string(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if path.is_file() && pat.matches(name) && has_image_extension(&path) {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Decodes one image as an RGB frame.
pub fn read_frame(path: &Path, index: usize) -> Result<FrameBuffer, FrameIoError> {
    let img = image::open(path)
        .map_err(|source| FrameIoError::Decode {
            path: path.to_path_buf(),
            source,
        })?
        .to_rgb8();
    rgb_image_to_frame(path, img, index)
}

fn rgb_image_to_frame(path: &Path, img: RgbImage, index: usize) -> Result<FrameBuffer, FrameIoError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img.pixels().map(|p| p.0).collect();
    FrameBuffer::new(w, h, pixels, index).map_err(|_| FrameIoError::EmptyImage { path: path.to_path_buf() })
}

/// Frames of a sequence, decoded lazily in filename order.
pub struct FrameSequence {
    paths: Vec<PathBuf>,
    next: usize,
    first: Option<(PathBuf, (u32, u32))>,
}

impl FrameSequence {
    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

impl Iterator for FrameSequence {
    type Item = Result<FrameBuffer, FrameIoError>;

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.next;
        let path = self.paths.get(index)?.clone();
        self.next += 1;
        let frame = match read_frame(&path, index) {
            Ok(f) => f,
            Err(e) => return Some(Err(e)),
        };
        let dims = (frame.width() as u32, frame.height() as u32);
        match &self.first {
            None => self.first = Some((path, dims)),
            Some((first, first_dims)) if *first_dims != dims => {
                return Some(Err(FrameIoError::DimensionMismatch {
                    first: first.clone(),
                    first_dims: *first_dims,
                    other: path,
                    other_dims: dims,
                }));
            }
            Some(_) => {}
        }
        Some(Ok(frame))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.paths.len() - self.next;
        (left, Some(left))
    }
}

/// Opens a frame directory. Frames get consecutive indices from 0.
pub fn load_sequence(dir: impl AsRef<Path>, pattern: &str) -> Result<FrameSequence, FrameIoError> {
    Ok(FrameSequence {
        paths: list_frames(dir.as_ref(), pattern)?,
        next: 0,
        first: None,
    })
}

pub fn write_frame(frame: &FrameBuffer, path: impl AsRef<Path>) -> Result<(), FrameIoError> {
    let path = path.as_ref();
    let raw: Vec<u8> = frame.pixels().iter().flatten().copied().collect();
    let img = RgbImage::from_raw(frame.width() as u32, frame.height() as u32, raw).expect("buffer sized from frame");
    let format = ImageFormat::from_path(path).unwrap_or(ImageFormat::Pnm);
    img.save_with_format(path, format).map_err(|source| FrameIoError::Encode {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a binary mask image: fire pixels 255, others 0.
pub fn write_mask(mask: &PixelMask, path: impl AsRef<Path>, format: MaskFormat) -> Result<(), FrameIoError> {
    let path = path.as_ref();
    let raw = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let img = GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw).expect("buffer sized from mask");
    img.save_with_format(path, format.image_format()).map_err(|source| FrameIoError::Encode {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a mask image; any luma of 128 or more counts as set.
pub fn read_mask(path: impl AsRef<Path>) -> Result<PixelMask, FrameIoError> {
    let path = path.as_ref();
    let img = image::open(path)
        .map_err(|source| FrameIoError::Decode {
            path: path.to_path_buf(),
            source,
        })?
        .to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let bits = img.pixels().map(|p| p.0[0] >= 128).collect();
    PixelMask::from_bits(w, h, bits).map_err(|_| FrameIoError::EmptyImage { path: path.to_path_buf() })
}

/// Masks in a directory, in filename order.
pub fn read_mask_dir(dir: impl AsRef<Path>, pattern: &str) -> Result<Vec<PixelMask>, FrameIoError> {
    list_frames(dir.as_ref(), pattern)?.iter().map(read_mask).collect()
}

/// Per-frame line of the threat report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub frame_index: usize,
    pub fire_area: u64,
    pub f_mu: f64,
    pub f_mu_p: f64,
    pub threat: f64,
    pub alarm: bool,
}

/// JSON-lines writer for frame reports.
pub struct ReportWriter<W: Write> {
    out: W,
}

impl ReportWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self, FrameIoError> {
        let path = path.as_ref();
        let f = File::create(path).map_err(io_err(path))?;
        Ok(Self::new(BufWriter::new(f)))
    }
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    /// Writes an arbitrary JSON object on its own line.
    pub fn write_header<T: Serialize>(&mut self, header: &T) -> Result<(), FrameIoError> {
        self.write_line(header)
    }

    pub fn write(&mut self, report: &FrameReport) -> Result<(), FrameIoError> {
        self.write_line(report)
    }

    fn write_line<T: Serialize>(&mut self, value: &T) -> Result<(), FrameIoError> {
        serde_json::to_writer(&mut self.out, value)?;
        self.out.write_all(b"\n").map_err(|source| FrameIoError::Io {
            path: PathBuf::from("<report>"),
            source,
        })
    }

    pub fn finish(mut self) -> Result<W, FrameIoError> {
        self.out.flush().map_err(|source| FrameIoError::Io {
            path: PathBuf::from("<report>"),
            source,
        })?;
        Ok(self.out)
    }
}

/// One JSON object per line, one line per report.
pub fn write_report<'a>(reports: impl IntoIterator<Item = &'a FrameReport>, path: impl AsRef<Path>) -> Result<(), FrameIoError> {
    let mut w = ReportWriter::create(path)?;
    for r in reports {
        w.write(r)?;
    }
    w.finish().map(drop)
}

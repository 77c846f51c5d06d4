//! In-memory frame and mask types shared by every stage of the pipeline.

use thiserror::Error;

/// An 8-bit RGB triple.
pub type Rgb = [u8; 3];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame dimensions must be positive (got {width}x{height})")]
    EmptyDimensions { width: usize, height: usize },
    #[error("expected {expected} pixels for a {width}x{height} frame, got {actual}")]
    PixelCount {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("mask is {mask_w}x{mask_h} but frame is {frame_w}x{frame_h}")]
    MaskMismatch {
        mask_w: usize,
        mask_h: usize,
        frame_w: usize,
        frame_h: usize,
    },
}

/// One decoded video frame, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameBuffer {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
    index: usize,
}

impl FrameBuffer {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>, index: usize) -> Result<Self, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(FrameError::PixelCount {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
            index,
        })
    }

    /// A frame where every pixel has the same color.
    pub fn filled(width: usize, height: usize, color: Rgb, index: usize) -> Result<Self, FrameError> {
        Self::new(width, height, vec![color; width * height], index)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Frame ordinal within its sequence (0-based).
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, color: Rgb) {
        self.pixels[y * self.width + x] = color;
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.pixels
    }
}

/// One boolean per pixel, row-major. `true` marks a fire pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, FrameError> {
        if bits.len() != width * height {
            return Err(FrameError::PixelCount {
                width,
                height,
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(Self { width, height, bits })
    }

    /// A mask sized to `frame`, with no pixel set.
    pub fn for_frame(frame: &FrameBuffer) -> Self {
        Self::new(frame.width(), frame.height())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn get_index(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set_index(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    /// Number of set pixels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn same_shape(&self, other: &PixelMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_frame(&self, frame: &FrameBuffer) -> Result<(), FrameError> {
        if self.width != frame.width() || self.height != frame.height() {
            return Err(FrameError::MaskMismatch {
                mask_w: self.width,
                mask_h: self.height,
                frame_w: frame.width(),
                frame_h: frame.height(),
            });
        }
        Ok(())
    }

    /// Pixelwise OR. Panics if the shapes differ.
    pub fn union(&self, other: &PixelMask) -> PixelMask {
        assert!(self.same_shape(other), "mask shape mismatch in union");
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect();
        PixelMask {
            width: self.width,
            height: self.height,
            bits,
        }
    }

    /// True when every pixel set here is also set in `other`.
    pub fn is_subset_of(&self, other: &PixelMask) -> bool {
        self.same_shape(other) && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Row-major indices of set pixels.
    pub fn set_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

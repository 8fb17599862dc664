//! In-memory 8-bit RGB image with row-major, channel-interleaved samples.

use crate::cipher::CipherError;

/// h x w x 3 array of 8-bit samples, channel order (R, G, B), flattened
/// row-major so sample `(row, col, ch)` sits at `3 (row w + col) + ch`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    height: usize,
    width: usize,
    samples: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(height: usize, width: usize, samples: Vec<u8>) -> Result<Self, CipherError> {
        if height == 0 || width == 0 {
            return Err(CipherError::EmptyImage { height, width });
        }
        let expected = 3 * height * width;
        if samples.len() != expected {
            return Err(CipherError::SampleCountMismatch {
                expected,
                got: samples.len(),
            });
        }
        Ok(Self {
            height,
            width,
            samples,
        })
    }

    /// Builds an image pixel by pixel from `(row, col) -> [r, g, b]`.
    pub fn from_fn<F>(height: usize, width: usize, mut f: F) -> Result<Self, CipherError>
    where
        F: FnMut(usize, usize) -> [u8; 3],
    {
        if height == 0 || width == 0 {
            return Err(CipherError::EmptyImage { height, width });
        }
        let mut samples = Vec::with_capacity(3 * height * width);
        for row in 0..height {
            for col in 0..width {
                samples.extend_from_slice(&f(row, col));
            }
        }
        Ok(Self {
            height,
            width,
            samples,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.samples[i], self.samples[i + 1], self.samples[i + 2]]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, rgb: [u8; 3]) {
        let i = 3 * (row * self.width + col);
        self.samples[i..i + 3].copy_from_slice(&rgb);
    }

    /// Extracts one channel (0 = R, 1 = G, 2 = B) as a contiguous
    /// row-major plane of `h*w` bytes.
    pub fn channel_plane(&self, channel: usize) -> Vec<u8> {
        assert!(channel < 3, "channel index out of range");
        self.samples
            .iter()
            .skip(channel)
            .step_by(3)
            .copied()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(ImageBuffer::new(0, 4, vec![]).is_err());
        assert!(ImageBuffer::new(4, 0, vec![]).is_err());
        assert!(ImageBuffer::new(1, 1, vec![0; 4]).is_err());
        assert!(ImageBuffer::new(1, 1, vec![0; 3]).is_ok());
    }

    #[test]
    fn pixel_addressing_is_row_major_interleaved() {
        let img = ImageBuffer::from_fn(2, 3, |r, c| [r as u8, c as u8, (10 * r + c) as u8]).unwrap();
        assert_eq!(img.pixel(0, 0), [0, 0, 0]);
        assert_eq!(img.pixel(1, 2), [1, 2, 12]);
        assert_eq!(img.samples()[3 * (3 + 2)], 1);
        assert_eq!(img.channel_plane(1), vec![0, 1, 2, 0, 1, 2]);
    }
}

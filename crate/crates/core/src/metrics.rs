//! Statistical evaluation of cipher output: Shannon entropy,
//! adjacent-pixel correlation, NPCR/UACI differential metrics, histograms,
//! and absolute-difference images.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cipher::{derive_keys, encrypt, ImageBuffer, KeyMaterial};

/// Nominal key-space exponent reported alongside evaluations (six 64-bit
/// real-valued parameters).
pub const KEY_SPACE_NOMINAL_BITS: u32 = 309;
/// Entropy bound of the derived keys: six 16-bit words aggregated from a
/// 256-bit hash.
pub const KEY_SPACE_DERIVED_BITS: u32 = 96;

/// Sample count used per direction and channel by the seeded correlation
/// estimator.
pub const DEFAULT_CORRELATION_SAMPLES: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("input channel is empty")]
    EmptyInput,
    #[error("image dimensions differ: {h1}x{w1} vs {h2}x{w2}")]
    DimensionMismatch {
        h1: usize,
        w1: usize,
        h2: usize,
        w2: usize,
    },
    #[error("correlation undefined: {side} marginal has zero variance")]
    ZeroVariance { side: &'static str },
    #[error("channel too small for {0:?} adjacency")]
    NoAdjacentPairs(Direction),
    #[error("pixel position ({row}, {col}) out of bounds for {height}x{width}")]
    PositionOutOfBounds {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },
}

/// Shannon entropy in bits of the 256-bin empirical byte distribution.
pub fn shannon_entropy(channel: &[u8]) -> Result<f64, MetricsError> {
    if channel.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let counts = histogram(channel);
    let n = channel.len() as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Per-value occurrence counts over the 256 byte bins.
pub fn histogram(channel: &[u8]) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &b in channel {
        counts[b as usize] += 1;
    }
    counts
}

/// Adjacency direction for correlation sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    fn offsets(&self) -> (usize, usize) {
        match self {
            Self::Horizontal => (0, 1),
            Self::Vertical => (1, 0),
            Self::Diagonal => (1, 1),
        }
    }
}

/// Adjacent (value, neighbor) byte pairs drawn from one channel plane,
/// the raw material of the correlation estimator (and of scatter plots
/// made from it).
#[derive(Debug, Clone)]
pub struct CorrelationSample {
    pub direction: Direction,
    pub pairs: Vec<(u8, u8)>,
}

impl CorrelationSample {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    /// Pearson correlation coefficient of the pairs.
    pub fn pearson(&self) -> Result<f64, MetricsError> {
        let n = self.pairs.len() as f64;
        if self.pairs.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        let mean_a = self.pairs.iter().map(|p| p.0 as f64).sum::<f64>() / n;
        let mean_b = self.pairs.iter().map(|p| p.1 as f64).sum::<f64>() / n;
        let mut cov = 0.0;
        let mut var_a = 0.0;
        let mut var_b = 0.0;
        for &(a, b) in &self.pairs {
            let (da, db) = (a as f64 - mean_a, b as f64 - mean_b);
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
        if var_a == 0.0 {
            return Err(MetricsError::ZeroVariance { side: "value" });
        }
        if var_b == 0.0 {
            return Err(MetricsError::ZeroVariance { side: "neighbor" });
        }
        Ok(cov / (var_a.sqrt() * var_b.sqrt()))
    }
}

/// Draws `n_samples` seeded-random in-bounds adjacent pairs from an
/// `height x width` channel plane.
pub fn sample_adjacent_pairs(
    channel: &[u8],
    height: usize,
    width: usize,
    direction: Direction,
    n_samples: usize,
    rng_seed: u64,
) -> Result<CorrelationSample, MetricsError> {
    let (dr, dc) = direction.offsets();
    if height <= dr || width <= dc {
        return Err(MetricsError::NoAdjacentPairs(direction));
    }
    let rows = height - dr;
    let cols = width - dc;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pairs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let r = rng.gen_range(0..rows);
        let c = rng.gen_range(0..cols);
        pairs.push((channel[r * width + c], channel[(r + dr) * width + (c + dc)]));
    }
    Ok(CorrelationSample { direction, pairs })
}

/// Every valid adjacent pair of the plane, in row-major order.
pub fn enumerate_adjacent_pairs(
    channel: &[u8],
    height: usize,
    width: usize,
    direction: Direction,
) -> Result<CorrelationSample, MetricsError> {
    let (dr, dc) = direction.offsets();
    if height <= dr || width <= dc {
        return Err(MetricsError::NoAdjacentPairs(direction));
    }
    let mut pairs = Vec::with_capacity((height - dr) * (width - dc));
    for r in 0..height - dr {
        for c in 0..width - dc {
            pairs.push((channel[r * width + c], channel[(r + dr) * width + (c + dc)]));
        }
    }
    Ok(CorrelationSample { direction, pairs })
}

/// Pearson correlation of `n_samples` seeded-random adjacent byte pairs
/// drawn from an `h x w` channel plane.
pub fn adjacent_correlation(
    channel: &[u8],
    height: usize,
    width: usize,
    direction: Direction,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64, MetricsError> {
    sample_adjacent_pairs(channel, height, width, direction, n_samples, rng_seed)?.pearson()
}

/// Exhaustive Pearson correlation over every valid adjacent pair; the
/// sampling-free limit of `adjacent_correlation`.
pub fn adjacent_correlation_full(
    channel: &[u8],
    height: usize,
    width: usize,
    direction: Direction,
) -> Result<f64, MetricsError> {
    enumerate_adjacent_pairs(channel, height, width, direction)?.pearson()
}

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<(), MetricsError> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(MetricsError::DimensionMismatch {
            h1: a.height(),
            w1: a.width(),
            h2: b.height(),
            w2: b.width(),
        });
    }
    Ok(())
}

/// Number-of-pixels change rate in percent, computed jointly over all
/// three channels: `100 * #{i : a[i] != b[i]} / (3 h w)`.
pub fn npcr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let differing = a
        .samples()
        .iter()
        .zip(b.samples())
        .filter(|(x, y)| x != y)
        .count();
    Ok(100.0 * differing as f64 / a.samples().len() as f64)
}

/// Unified average changing intensity in percent:
/// `100 * mean(|a - b| / 255)` over all samples.
pub fn uaci(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let total: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x as i16 - y as i16).abs() as f64 / 255.0)
        .sum();
    Ok(100.0 * total / a.samples().len() as f64)
}

/// Pixel-wise absolute difference image.
pub fn diff_image(a: &ImageBuffer, b: &ImageBuffer) -> Result<ImageBuffer, MetricsError> {
    check_dims(a, b)?;
    let samples = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x as i16 - y as i16).unsigned_abs() as u8)
        .collect();
    Ok(ImageBuffer::new(a.height(), a.width(), samples).expect("same dimensions"))
}

fn modify_pixel(
    plain: &ImageBuffer,
    row: usize,
    col: usize,
    new_value: [u8; 3],
) -> Result<ImageBuffer, MetricsError> {
    if row >= plain.height() || col >= plain.width() {
        return Err(MetricsError::PositionOutOfBounds {
            row,
            col,
            height: plain.height(),
            width: plain.width(),
        });
    }
    let mut modified = plain.clone();
    modified.set_pixel(row, col, new_value);
    Ok(modified)
}

/// One-pixel differential test under plaintext-keyed derivation: both the
/// original and the modified plaintext are encrypted under their own
/// derived keys, and the NPCR/UACI of the two ciphertexts is returned.
pub fn differential_test(
    plain: &ImageBuffer,
    row: usize,
    col: usize,
    new_value: [u8; 3],
) -> Result<(f64, f64), MetricsError> {
    let modified = modify_pixel(plain, row, col, new_value)?;
    let c1 = encrypt(plain, &derive_keys(plain));
    let c2 = encrypt(&modified, &derive_keys(&modified));
    Ok((npcr(&c1, &c2)?, uaci(&c1, &c2)?))
}

/// Fixed-key ablation of the differential test: both plaintexts are
/// encrypted under the same supplied keys.
pub fn differential_test_fixed_key(
    plain: &ImageBuffer,
    row: usize,
    col: usize,
    new_value: [u8; 3],
    keys: &KeyMaterial,
) -> Result<(f64, f64), MetricsError> {
    let modified = modify_pixel(plain, row, col, new_value)?;
    let c1 = encrypt(plain, keys);
    let c2 = encrypt(&modified, keys);
    Ok((npcr(&c1, &c2)?, uaci(&c1, &c2)?))
}

/// Per-channel scalar triple serialized as `{r, g, b}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelTriple {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl ChannelTriple {
    pub fn values(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }
}

/// Correlation coefficients for the three directions, serialized as
/// `{h: {r,g,b}, v: {r,g,b}, d: {r,g,b}}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationReport {
    pub h: ChannelTriple,
    pub v: ChannelTriple,
    pub d: ChannelTriple,
}

impl CorrelationReport {
    pub fn cells(&self) -> [f64; 9] {
        [
            self.h.r, self.h.g, self.h.b, self.v.r, self.v.g, self.v.b, self.d.r, self.d.g,
            self.d.b,
        ]
    }
}

/// Full statistical evaluation of one cipher image plus the differential
/// metrics of its plaintext. The histogram is exported separately as CSV.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub entropy: ChannelTriple,
    pub correlation: CorrelationReport,
    pub npcr: f64,
    pub uaci: f64,
    #[serde(skip)]
    pub histogram: [[u64; 256]; 3],
}

impl MetricsReport {
    /// Evaluates a cipher image: per-channel entropy and histogram plus
    /// seeded correlation in all nine direction/channel cells; the
    /// supplied differential pair fills `npcr`/`uaci`.
    pub fn from_cipher(
        cipher: &ImageBuffer,
        differential: (f64, f64),
        n_samples: usize,
        rng_seed: u64,
    ) -> Result<Self, MetricsError> {
        let planes: Vec<Vec<u8>> = (0..3).map(|c| cipher.channel_plane(c)).collect();
        let mut entropy = [0.0; 3];
        let mut hist = [[0u64; 256]; 3];
        for (c, plane) in planes.iter().enumerate() {
            entropy[c] = shannon_entropy(plane)?;
            hist[c] = histogram(plane);
        }
        let mut corr = [[0.0; 3]; 3];
        for (di, dir) in [Direction::Horizontal, Direction::Vertical, Direction::Diagonal]
            .iter()
            .enumerate()
        {
            for (c, plane) in planes.iter().enumerate() {
                // distinct seeds per cell keep the estimates independent
                let seed = rng_seed
                    .wrapping_mul(9)
                    .wrapping_add((3 * di + c) as u64);
                corr[di][c] = adjacent_correlation(
                    plane,
                    cipher.height(),
                    cipher.width(),
                    *dir,
                    n_samples,
                    seed,
                )?;
            }
        }
        let triple = |v: [f64; 3]| ChannelTriple {
            r: v[0],
            g: v[1],
            b: v[2],
        };
        Ok(Self {
            entropy: triple(entropy),
            correlation: CorrelationReport {
                h: triple(corr[0]),
                v: triple(corr[1]),
                d: triple(corr[2]),
            },
            npcr: differential.0,
            uaci: differential.1,
            histogram: hist,
        })
    }

    /// Writes the per-channel histogram as CSV rows `channel,bin,count`.
    pub fn write_histogram_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "channel,bin,count")?;
        for (c, name) in ["r", "g", "b"].iter().enumerate() {
            for (bin, count) in self.histogram[c].iter().enumerate() {
                writeln!(out, "{name},{bin},{count}")?;
            }
        }
        Ok(())
    }
}

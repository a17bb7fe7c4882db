//! Gray-mapped square QAM modulation and max-log soft demodulation.
//!
//! Constellations are normalized to unit average symbol energy. The bit
//! mapping is documented and fixed: each symbol consumes `log2(order)` bits,
//! the first half (MSB first) selecting the in-phase level and the second
//! half the quadrature level. Per axis, the bits are read as a Gray code
//! whose index 0 maps to the most positive level, so for 4-QAM the bit pair
//! `00` maps to `(+1 + j) / sqrt(2)`.
//!
//! The demodulator emits per-bit max-log LLRs with the convention
//! `LLR = log P(b=0) - log P(b=1)`, i.e. positive LLR means a likely 0 bit.

use num_complex::Complex64;

use crate::PhyError;

/// Supported square constellations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QamOrder {
    Qam4,
    Qam16,
    Qam64,
}

impl QamOrder {
    pub fn order(self) -> usize {
        match self {
            QamOrder::Qam4 => 4,
            QamOrder::Qam16 => 16,
            QamOrder::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            QamOrder::Qam4 => 2,
            QamOrder::Qam16 => 4,
            QamOrder::Qam64 => 6,
        }
    }

    fn bits_per_axis(self) -> usize {
        self.bits_per_symbol() / 2
    }

    fn levels_per_axis(self) -> usize {
        1 << self.bits_per_axis()
    }

    /// Scale factor giving unit average symbol energy: the unnormalized
    /// square constellation has mean energy `2 (L^2 - 1) / 3` per symbol.
    fn norm(self) -> f64 {
        let l = self.levels_per_axis() as f64;
        (2.0 * (l * l - 1.0) / 3.0).sqrt().recip()
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            4 => Some(QamOrder::Qam4),
            16 => Some(QamOrder::Qam16),
            64 => Some(QamOrder::Qam64),
            _ => None,
        }
    }
}

/// Gray-decode `g` (bits read MSB-first as an integer) to a level index.
fn gray_decode(mut g: usize) -> usize {
    let mut idx = 0;
    while g != 0 {
        idx ^= g;
        g >>= 1;
    }
    idx
}

/// Amplitude of a level index on one axis, before normalization. Index 0 is
/// the most positive level.
fn level_amplitude(idx: usize, levels: usize) -> f64 {
    (levels as f64 - 1.0) - 2.0 * idx as f64
}

fn axis_amplitude(bits: &[bool], order: QamOrder) -> f64 {
    let g = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    level_amplitude(gray_decode(g), order.levels_per_axis())
}

/// All `(amplitude, gray bits)` pairs of one axis, by level index.
fn axis_table(order: QamOrder) -> Vec<(f64, usize)> {
    let levels = order.levels_per_axis();
    // level index -> gray code (the bits that map onto this index)
    let mut gray_of_idx = vec![0usize; levels];
    for g in 0..levels {
        gray_of_idx[gray_decode(g)] = g;
    }
    (0..levels)
        .map(|idx| (level_amplitude(idx, levels), gray_of_idx[idx]))
        .collect()
}

/// Map bits to unit-energy constellation symbols.
pub fn qam_modulate(bits: &[bool], order: QamOrder) -> Result<Vec<Complex64>, PhyError> {
    let bps = order.bits_per_symbol();
    if bits.len() % bps != 0 {
        return Err(PhyError::BitCount {
            nbits: bits.len(),
            bits_per_symbol: bps,
            order: order.order(),
        });
    }
    let half = order.bits_per_axis();
    let norm = order.norm();
    Ok(bits
        .chunks(bps)
        .map(|chunk| {
            let i = axis_amplitude(&chunk[..half], order);
            let q = axis_amplitude(&chunk[half..], order);
            Complex64::new(i * norm, q * norm)
        })
        .collect())
}

/// Max-log LLRs for each transmitted bit given per-symbol noise variances
/// (total complex-noise variance sigma^2 per symbol, so the likelihood is
/// `exp(-|y - s|^2 / sigma^2)`).
///
/// Since the constellation is a product of two PAM axes, each axis is
/// demodulated independently on its own coordinate.
pub fn qam_demodulate(
    symbols: &[Complex64],
    order: QamOrder,
    sigma2: &[f64],
) -> Result<Vec<f64>, PhyError> {
    if symbols.len() != sigma2.len() {
        return Err(PhyError::LengthMismatch {
            expected: symbols.len(),
            got: sigma2.len(),
        });
    }
    let table = axis_table(order);
    let half = order.bits_per_axis();
    let norm = order.norm();
    let mut llrs = Vec::with_capacity(symbols.len() * order.bits_per_symbol());
    for (y, &s2) in symbols.iter().zip(sigma2) {
        let s2 = s2.max(1e-300);
        for axis in 0..2 {
            let coord = if axis == 0 { y.re } else { y.im };
            for bit in 0..half {
                let mask = 1 << (half - 1 - bit);
                let mut best0 = f64::INFINITY;
                let mut best1 = f64::INFINITY;
                for &(amp, gray) in &table {
                    let d = coord - amp * norm;
                    let metric = d * d;
                    if gray & mask == 0 {
                        best0 = best0.min(metric);
                    } else {
                        best1 = best1.min(metric);
                    }
                }
                llrs.push((best1 - best0) / s2);
            }
        }
    }
    Ok(llrs)
}

/// Hard-decision demodulation (sign of the max-log LLR at unit variance).
pub fn qam_demodulate_hard(
    symbols: &[Complex64],
    order: QamOrder,
) -> Result<Vec<bool>, PhyError> {
    let sigma2 = vec![1.0; symbols.len()];
    Ok(qam_demodulate(symbols, order, &sigma2)?
        .into_iter()
        .map(|llr| llr < 0.0)
        .collect())
}

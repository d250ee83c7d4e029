use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SimError;
use crate::netlist::Netlist;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Generated { seed: u64, distribution: String },
    File(PathBuf),
    Explicit,
}

/// Input vectors stored column-wise: one packed bit column per primary
/// input bit, in port order with the LSB of each bus first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StimulusSet {
    widths: Vec<usize>,
    count: usize,
    words: usize,
    columns: Vec<u64>,
    provenance: Provenance,
}

pub(crate) fn words_for(count: usize) -> usize {
    count.div_ceil(64)
}

/// Mask of valid lanes in the last word.
pub(crate) fn tail_mask(count: usize) -> u64 {
    match count % 64 {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// Bus widths of a netlist's primary inputs, in port order.
pub fn input_layout(n: &Netlist) -> Vec<usize> {
    n.inputs().iter().map(|p| p.width()).collect()
}

impl StimulusSet {
    fn zeroed(widths: Vec<usize>, count: usize, provenance: Provenance) -> Self {
        let words = words_for(count);
        let bits: usize = widths.iter().sum();
        StimulusSet {
            widths,
            count,
            words,
            columns: vec![0; bits * words],
            provenance,
        }
    }

    /// Build from explicit per-vector bus values (`values[v][bus]`).
    pub fn from_values(widths: &[usize], values: &[Vec<u128>]) -> Self {
        let mut s = Self::zeroed(widths.to_vec(), values.len(), Provenance::Explicit);
        for (v, row) in values.iter().enumerate() {
            assert_eq!(row.len(), widths.len(), "one value per bus");
            s.set_vector(v, row);
        }
        s
    }

    fn set_vector(&mut self, v: usize, row: &[u128]) {
        let (w, lane) = (v / 64, v % 64);
        let mut col = 0;
        for (bus, &width) in self.widths.clone().iter().enumerate() {
            for k in 0..width {
                if k < 128 && row[bus] >> k & 1 == 1 {
                    self.columns[(col + k) * self.words + w] |= 1 << lane;
                }
            }
            col += width;
        }
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn total_width(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Packed column of primary-input bit `bit` (flattened port order).
    pub fn column(&self, bit: usize) -> &[u64] {
        &self.columns[bit * self.words..(bit + 1) * self.words]
    }

    pub fn bit(&self, bit: usize, vector: usize) -> bool {
        self.column(bit)[vector / 64] >> (vector % 64) & 1 == 1
    }

    /// All primary-input bits of one vector, flattened port order.
    pub fn vector_bits(&self, vector: usize) -> Vec<bool> {
        (0..self.total_width()).map(|b| self.bit(b, vector)).collect()
    }

    /// Unsigned value of bus `bus` in vector `vector`.
    pub fn bus_value(&self, bus: usize, vector: usize) -> u128 {
        let start: usize = self.widths[..bus].iter().sum();
        (0..self.widths[bus].min(128))
            .filter(|&k| self.bit(start + k, vector))
            .fold(0u128, |acc, k| acc | 1 << k)
    }

    /// The first `count` vectors.
    pub fn prefix(&self, count: usize) -> StimulusSet {
        let count = count.min(self.count);
        let words = words_for(count);
        let mut columns = Vec::with_capacity(self.total_width() * words);
        for b in 0..self.total_width() {
            let col = &self.column(b)[..words];
            columns.extend_from_slice(col);
            if let Some(last) = columns.last_mut() {
                *last &= tail_mask(count);
            }
        }
        StimulusSet {
            widths: self.widths.clone(),
            count,
            words,
            columns,
            provenance: self.provenance.clone(),
        }
    }

    pub fn check_layout(&self, n: &Netlist) -> Result<(), SimError> {
        let expected = input_layout(n);
        if expected != self.widths {
            return Err(SimError::LayoutMismatch {
                expected,
                got: self.widths.clone(),
            });
        }
        Ok(())
    }

    /// One hexadecimal vector per line, the first declared bus most significant.
    pub fn to_hex(&self) -> String {
        let total = self.total_width();
        let digits = total.div_ceil(4).max(1);
        let mut out = String::with_capacity(self.count * (digits + 1));
        // bit position of flattened column `b` within the concatenated vector
        let mut pos = vec![0usize; total];
        let mut col = 0;
        let mut hi = total;
        for &w in &self.widths {
            hi -= w;
            for k in 0..w {
                pos[col + k] = hi + k;
            }
            col += w;
        }
        let mut nibbles = vec![0u8; digits];
        for v in 0..self.count {
            nibbles.iter_mut().for_each(|x| *x = 0);
            for (b, &p) in pos.iter().enumerate() {
                if self.bit(b, v) {
                    nibbles[digits - 1 - p / 4] |= 1 << (p % 4);
                }
            }
            for &x in &nibbles {
                out.push(char::from_digit(x as u32, 16).unwrap());
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`StimulusSet::to_hex`]. Blank lines and `#` comments are skipped.
    pub fn from_hex(text: &str, widths: &[usize], provenance: Provenance) -> Result<Self, SimError> {
        let total: usize = widths.iter().sum();
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut bits = vec![false; total];
            for (p, ch) in line.chars().rev().enumerate() {
                let d = ch.to_digit(16).ok_or_else(|| SimError::StimulusFormat {
                    line: i + 1,
                    message: format!("invalid hex digit `{ch}`"),
                })?;
                for k in 0..4 {
                    if d >> k & 1 == 1 {
                        let bit = p * 4 + k;
                        if bit >= total {
                            return Err(SimError::StimulusFormat {
                                line: i + 1,
                                message: format!("value wider than {total} bits"),
                            });
                        }
                        bits[bit] = true;
                    }
                }
            }
            rows.push(bits);
        }
        if rows.is_empty() {
            return Err(SimError::StimulusFormat {
                line: 0,
                message: "no vectors".into(),
            });
        }
        let mut s = Self::zeroed(widths.to_vec(), rows.len(), provenance);
        let mut hi = total;
        let mut col = 0;
        for &w in widths {
            hi -= w;
            for k in 0..w {
                for (v, row) in rows.iter().enumerate() {
                    if row[hi + k] {
                        s.columns[(col + k) * s.words + v / 64] |= 1 << (v % 64);
                    }
                }
            }
            col += w;
        }
        Ok(s)
    }
}

/// `count` vectors with every input bus drawn uniformly over its range.
pub fn generate_stimuli(widths: &[usize], count: usize, seed: u64) -> StimulusSet {
    assert!(count >= 1, "at least one vector");
    let mut s = StimulusSet::zeroed(
        widths.to_vec(),
        count,
        Provenance::Generated {
            seed,
            distribution: "uniform".into(),
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = s.words;
    for v in 0..count {
        let (w, lane) = (v / 64, v % 64);
        let mut col = 0;
        for &width in widths {
            let mut k = 0;
            while k < width {
                let chunk = (width - k).min(64);
                let mut r: u64 = rng.random();
                if chunk < 64 {
                    r &= (1u64 << chunk) - 1;
                }
                while r != 0 {
                    let b = r.trailing_zeros() as usize;
                    s.columns[(col + k + b) * words + w] |= 1 << lane;
                    r &= r - 1;
                }
                k += chunk;
            }
            col += width;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_seed_dependent() {
        let a = generate_stimuli(&[8, 8], 1, 5);
        assert_eq!(a, generate_stimuli(&[8, 8], 1, 5));
        assert_eq!(a.len(), 1);
        let x = generate_stimuli(&[8, 8], 100, 1);
        let y = generate_stimuli(&[8, 8], 100, 2);
        assert_ne!(x.columns, y.columns);
    }

    #[test]
    fn uniform_mean() {
        let s = generate_stimuli(&[8], 100_000, 11);
        let mean = (0..s.len()).map(|v| s.bus_value(0, v) as f64).sum::<f64>() / s.len() as f64;
        assert!((mean - 127.5).abs() < 0.01 * 127.5, "mean {mean}");
    }

    #[test]
    fn hex_round_trip() {
        let s = generate_stimuli(&[3, 8, 1], 130, 4);
        let text = s.to_hex();
        assert_eq!(text.lines().next().unwrap().len(), 3);
        let back = StimulusSet::from_hex(&text, &[3, 8, 1], Provenance::Explicit).unwrap();
        assert_eq!(back.columns, s.columns);
        let one = StimulusSet::from_values(&[4, 4], &[vec![0xA, 0x3]]);
        assert_eq!(one.to_hex(), "a3\n");
    }

    #[test]
    fn hex_errors() {
        assert!(StimulusSet::from_hex("zz\n", &[8], Provenance::Explicit).is_err());
        assert!(StimulusSet::from_hex("1ff\n", &[8], Provenance::Explicit).is_err());
    }

    #[test]
    fn prefix_masks_tail() {
        let s = generate_stimuli(&[8], 200, 3);
        let p = s.prefix(70);
        assert_eq!(p.len(), 70);
        assert_eq!(p.words(), 2);
        assert_eq!(p.column(0)[1] >> 6, 0);
        for v in 0..70 {
            assert_eq!(p.bus_value(0, v), s.bus_value(0, v));
        }
    }
}

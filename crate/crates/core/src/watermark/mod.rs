//! Watermark-based authentication of the network's grid view: chaotic
//! iterations driven by a PLCM keystream over the least significant
//! coefficients, plus spread-spectrum baselines and an attack suite.

mod attacks;
mod pgm;
mod ss;

pub use attacks::{attack_gaussian, attack_jpeg, attack_rotation, attack_zeroing};
pub use pgm::{load_pgm, save_pgm};
pub use ss::{ks_reject, ks_statistic, ss_carriers, ss_detect, ss_embed, SsModulation, SsParams};

use crate::numeric::{splitmix64, Fraction64};
use crate::{Error, Result};

/// The network viewed as a grayscale raster: one 8-bit sample per node.
/// Bit index `k` addresses bit `7 - (k % 8)` of byte `k / 8` (MSB first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

impl SensorGrid {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Self {
        assert_eq!(values.len(), width * height);
        SensorGrid {
            width,
            height,
            values,
        }
    }

    pub fn uniform(width: usize, height: usize, value: u8) -> Self {
        SensorGrid::new(width, height, vec![value; width * height])
    }

    pub fn bit_len(&self) -> usize {
        self.values.len() * 8
    }

    pub fn get_bit(&self, k: usize) -> bool {
        (self.values[k / 8] >> (7 - (k % 8))) & 1 == 1
    }

    pub fn set_bit(&mut self, k: usize, bit: bool) {
        let mask = 1u8 << (7 - (k % 8));
        if bit {
            self.values[k / 8] |= mask;
        } else {
            self.values[k / 8] &= !mask;
        }
    }
}

pub const DEFAULT_MSC_THRESHOLD: u8 = 5;
pub const DEFAULT_LSC_THRESHOLD: u8 = 4;

/// Bit-index partition by significance weight `u^k = 8 - (k % 8)`:
/// MSC where the weight is at least `M`, LSC where it is at most `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificanceSplit {
    pub msc: Vec<usize>,
    pub lsc: Vec<usize>,
    pub passive: Vec<usize>,
}

pub fn significance_split(grid: &SensorGrid, big_m: u8, small_m: u8) -> Result<SignificanceSplit> {
    if small_m >= big_m {
        return Err(Error::OverlappingThresholds);
    }
    let mut split = SignificanceSplit {
        msc: Vec::new(),
        lsc: Vec::new(),
        passive: Vec::new(),
    };
    for k in 0..grid.bit_len() {
        let weight = 8 - (k % 8) as u8;
        if weight >= big_m {
            split.msc.push(k);
        } else if weight <= small_m {
            split.lsc.push(k);
        } else {
            split.passive.push(k);
        }
    }
    Ok(split)
}

/// The 4-bit LSC nibble of each sample scaled by 17 onto [0, 255], the
/// usual way to visualize the embedding plane.
pub fn lsc_visualization(grid: &SensorGrid) -> SensorGrid {
    let values = grid.values.iter().map(|v| (v & 0x0F) * 17).collect();
    SensorGrid::new(grid.width, grid.height, values)
}

/// Piecewise linear chaotic map with control parameter `p` in (0, 1/2):
/// `x/p` on [0,p], `(x-p)/(1/2-p)` on (p,1/2], reflected above 1/2.
pub fn plcm_step(x: Fraction64, p: Fraction64) -> Fraction64 {
    debug_assert!(!p.is_zero() && p < Fraction64::HALF);
    if x <= p {
        x.div(p)
    } else if x <= Fraction64::HALF {
        x.sub(p).div(Fraction64::HALF.sub(p))
    } else {
        plcm_step(Fraction64::ONE.sub(x), p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WatermarkMode {
    /// Strategy seeded by the cover's most significant coefficients:
    /// any change to them reseeds the keystream (fragile).
    Authentication,
    /// Strategy derived from the key alone (robust).
    Unauthentication,
}

/// Default PLCM control parameter. Deliberately non-dyadic: with the
/// truncating Q0.62 arithmetic a dyadic `p` turns both linear branches
/// into pure bit shifts, so the keystream drains its 62 state bits and
/// collapses to the fixed point 0 within ~31 steps.
pub const DEFAULT_PLCM_P: f64 = 0.3;

#[derive(Debug, Clone, Copy)]
pub struct CiisParams {
    pub key: Fraction64,
    /// PLCM control parameter, in (0, 1/2); non-dyadic values keep the
    /// orbit mixing (see [`DEFAULT_PLCM_P`]).
    pub p: Fraction64,
    /// Number of chaotic iterations (strategy terms).
    pub iterations: usize,
    pub mode: WatermarkMode,
}

/// Strategy with independent strategy: `K^0 = M xor K`,
/// `K^{n+1} = F(K^n, p)`, `S^n = floor(N * K^n) + 1`, positions 1-based
/// in [1, N].
pub fn ciis_strategy(params: &CiisParams, m_seed: Fraction64, n: usize) -> Vec<usize> {
    assert!(n >= 1);
    let mut k = m_seed.xor(params.key);
    let mut strategy = Vec::with_capacity(params.iterations);
    for _ in 0..params.iterations {
        let s = (k.scale_floor(n as u64) + 1).min(n as u64);
        strategy.push(s as usize);
        k = plcm_step(k, params.p);
    }
    strategy
}

/// Chaotic iterations: at step `n` only component `S^n` (1-based) takes
/// the value `f(x^{n-1})` at that coordinate; all others are carried over.
pub fn ci_iterate(
    x0: &[bool],
    f: impl Fn(&[bool]) -> Vec<bool>,
    strategy: &[usize],
) -> Vec<bool> {
    let mut x = x0.to_vec();
    for &s in strategy {
        assert!((1..=x.len()).contains(&s), "strategy position out of bounds");
        let fx = f(&x);
        x[s - 1] = fx[s - 1];
    }
    x
}

/// The vectorial logical negation, the default update function.
pub fn f0(x: &[bool]) -> Vec<bool> {
    x.iter().map(|b| !b).collect()
}

/// Mode seed: Authentication folds the MSC bitstream into 62 bits by
/// XOR of consecutive blocks; Unauthentication derives a second fraction
/// from the key alone.
pub fn derive_mode_seed(
    grid: &SensorGrid,
    split: &SignificanceSplit,
    params: &CiisParams,
) -> Fraction64 {
    match params.mode {
        WatermarkMode::Authentication => {
            let mut folded = 0u64;
            let mut block = 0u64;
            let mut used = 0u32;
            for &k in &split.msc {
                block = (block << 1) | grid.get_bit(k) as u64;
                used += 1;
                if used == 62 {
                    folded ^= block;
                    block = 0;
                    used = 0;
                }
            }
            if used > 0 {
                // zero-pad the trailing partial block
                folded ^= block << (62 - used);
            }
            Fraction64::from_bits(folded & ((1 << 62) - 1))
        }
        WatermarkMode::Unauthentication => {
            Fraction64::from_bits(splitmix64(params.key.bits()) & ((1 << 62) - 1))
        }
    }
}

/// Overwrite embedding: the LSC bit at each strategy position receives the
/// corresponding watermark bit (cycled); MSCs and passive bits untouched.
pub fn embed_watermark(
    grid: &SensorGrid,
    params: &CiisParams,
    split: &SignificanceSplit,
    watermark: &[bool],
) -> SensorGrid {
    assert!(!watermark.is_empty());
    assert!(!split.lsc.is_empty());
    let seed = derive_mode_seed(grid, split, params);
    let strategy = ciis_strategy(params, seed, split.lsc.len());
    let mut out = grid.clone();
    for (n, &s) in strategy.iter().enumerate() {
        out.set_bit(split.lsc[s - 1], watermark[n % watermark.len()]);
    }
    out
}

/// Similarity: recompute the strategy (in Authentication mode from the
/// received MSCs), then compare each visited LSC bit against the
/// watermark bit of the last visit; 100 x matches / visited, in percent.
pub fn extract_similarity(
    grid: &SensorGrid,
    params: &CiisParams,
    split: &SignificanceSplit,
    watermark: &[bool],
) -> f64 {
    assert!(!watermark.is_empty());
    assert!(!split.lsc.is_empty());
    let seed = derive_mode_seed(grid, split, params);
    let strategy = ciis_strategy(params, seed, split.lsc.len());
    // expected bit per position = bit written by the final visit
    let mut expected: std::collections::HashMap<usize, bool> = std::collections::HashMap::new();
    for (n, &s) in strategy.iter().enumerate() {
        expected.insert(split.lsc[s - 1], watermark[n % watermark.len()]);
    }
    let matches = expected
        .iter()
        .filter(|(&k, &bit)| grid.get_bit(k) == bit)
        .count();
    100.0 * matches as f64 / expected.len() as f64
}

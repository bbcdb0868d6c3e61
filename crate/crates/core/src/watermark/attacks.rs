//! Attack suite: node zeroing, rotate/unrotate, Gaussian noise, and the
//! lossy DCT-quantization transform.

use super::SensorGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

/// Zeroes an `s x s` block anchored at the grid center, modeling a patch
/// of dead nodes.
pub fn attack_zeroing(grid: &SensorGrid, s: usize) -> SensorGrid {
    let mut out = grid.clone();
    let x0 = grid.width.saturating_sub(s) / 2;
    let y0 = grid.height.saturating_sub(s) / 2;
    for y in y0..(y0 + s).min(grid.height) {
        for x in x0..(x0 + s).min(grid.width) {
            out.values[y * grid.width + x] = 0;
        }
    }
    out
}

fn bilinear_sample(grid: &SensorGrid, x: f64, y: f64) -> f64 {
    let clamp_x = |v: isize| v.clamp(0, grid.width as isize - 1) as usize;
    let clamp_y = |v: isize| v.clamp(0, grid.height as isize - 1) as usize;
    let xf = x.floor();
    let yf = y.floor();
    let tx = x - xf;
    let ty = y - yf;
    let x0 = clamp_x(xf as isize);
    let x1 = clamp_x(xf as isize + 1);
    let y0 = clamp_y(yf as isize);
    let y1 = clamp_y(yf as isize + 1);
    let at = |xx: usize, yy: usize| grid.values[yy * grid.width + xx] as f64;
    at(x0, y0) * (1.0 - tx) * (1.0 - ty)
        + at(x1, y0) * tx * (1.0 - ty)
        + at(x0, y1) * (1.0 - tx) * ty
        + at(x1, y1) * tx * ty
}

fn rotate_once(grid: &SensorGrid, theta_deg: f64) -> SensorGrid {
    let theta = theta_deg * PI / 180.0;
    let (sin_t, cos_t) = theta.sin_cos();
    let cx = grid.width as f64 / 2.0;
    let cy = grid.height as f64 / 2.0;
    let mut values = vec![0u8; grid.values.len()];
    for y in 0..grid.height {
        for x in 0..grid.width {
            // inverse map: rotate the output coordinate by -theta
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = cx + dx * cos_t + dy * sin_t;
            let sy = cy - dx * sin_t + dy * cos_t;
            let sx = sx.clamp(0.0, grid.width as f64 - 1.0);
            let sy = sy.clamp(0.0, grid.height as f64 - 1.0);
            values[y * grid.width + x] = bilinear_sample(grid, sx, sy).round().clamp(0.0, 255.0) as u8;
        }
    }
    SensorGrid::new(grid.width, grid.height, values)
}

/// The lossy round trip `rotate(-theta) . rotate(theta)` around the grid
/// center, with bilinear resampling and edge clamping.
pub fn attack_rotation(grid: &SensorGrid, theta_deg: f64) -> SensorGrid {
    if theta_deg == 0.0 {
        return grid.clone();
    }
    rotate_once(&rotate_once(grid, theta_deg), -theta_deg)
}

/// Seeded additive N(0, sigma^2) noise, rounded and clamped to [0, 255].
pub fn attack_gaussian(grid: &SensorGrid, sigma: f64, seed: u64) -> SensorGrid {
    if sigma == 0.0 {
        return grid.clone();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let values = grid
        .values
        .iter()
        .map(|&v| (v as f64 + normal.sample(&mut rng)).round().clamp(0.0, 255.0) as u8)
        .collect();
    SensorGrid::new(grid.width, grid.height, values)
}

/// Standard luminance quantization table.
const LUMA_TABLE: [[f64; 8]; 8] = [
    [16.0, 11.0, 10.0, 16.0, 24.0, 40.0, 51.0, 61.0],
    [12.0, 12.0, 14.0, 19.0, 26.0, 58.0, 60.0, 55.0],
    [14.0, 13.0, 16.0, 24.0, 40.0, 57.0, 69.0, 56.0],
    [14.0, 17.0, 22.0, 29.0, 51.0, 87.0, 80.0, 62.0],
    [18.0, 22.0, 37.0, 56.0, 68.0, 109.0, 103.0, 77.0],
    [24.0, 35.0, 55.0, 64.0, 81.0, 104.0, 113.0, 92.0],
    [49.0, 64.0, 78.0, 87.0, 103.0, 121.0, 120.0, 101.0],
    [72.0, 92.0, 95.0, 98.0, 112.0, 100.0, 103.0, 99.0],
];

fn dct_coefficient(u: usize) -> f64 {
    if u == 0 {
        (1.0f64 / 8.0).sqrt()
    } else {
        (2.0f64 / 8.0).sqrt()
    }
}

fn dct_2d(block: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let mut out = [[0.0; 8]; 8];
    for (u, row) in out.iter_mut().enumerate() {
        for (v, coef) in row.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (x, brow) in block.iter().enumerate() {
                for (y, &val) in brow.iter().enumerate() {
                    sum += val
                        * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos()
                        * ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                }
            }
            *coef = dct_coefficient(u) * dct_coefficient(v) * sum;
        }
    }
    out
}

fn idct_2d(coeffs: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let mut out = [[0.0; 8]; 8];
    for (x, row) in out.iter_mut().enumerate() {
        for (y, val) in row.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (u, crow) in coeffs.iter().enumerate() {
                for (v, &c) in crow.iter().enumerate() {
                    sum += dct_coefficient(u)
                        * dct_coefficient(v)
                        * c
                        * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos()
                        * ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                }
            }
            *val = sum;
        }
    }
    out
}

/// DCT-domain degradation: per 8x8 block, quantize the coefficients by the
/// luminance table scaled by `level` (each step at least 1, so `level = 0`
/// leaves only integer rounding of the coefficients), then transform back.
pub fn attack_jpeg(grid: &SensorGrid, level: f64) -> SensorGrid {
    let mut out = grid.clone();
    let sample = |xx: usize, yy: usize| {
        // edge clamp for partial blocks
        let x = xx.min(grid.width - 1);
        let y = yy.min(grid.height - 1);
        grid.values[y * grid.width + x] as f64 - 128.0
    };
    for by in (0..grid.height).step_by(8) {
        for bx in (0..grid.width).step_by(8) {
            let mut block = [[0.0; 8]; 8];
            for (i, row) in block.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = sample(bx + j, by + i);
                }
            }
            let mut coeffs = dct_2d(&block);
            for (u, row) in coeffs.iter_mut().enumerate() {
                for (v, c) in row.iter_mut().enumerate() {
                    let q = (LUMA_TABLE[u][v] * level).max(1.0);
                    *c = (*c / q).round() * q;
                }
            }
            let restored = idct_2d(&coeffs);
            for (i, row) in restored.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let (x, y) = (bx + j, by + i);
                    if x < grid.width && y < grid.height {
                        out.values[y * grid.width + x] =
                            (v + 128.0).round().clamp(0.0, 255.0) as u8;
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};

    fn random_grid(width: usize, height: usize, seed: u64) -> SensorGrid {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut values = vec![0u8; width * height];
        rng.fill_bytes(&mut values);
        SensorGrid::new(width, height, values)
    }

    #[test]
    fn zeroing_counts_and_edges() {
        let zero = SensorGrid::uniform(16, 16, 0);
        assert_eq!(attack_zeroing(&zero, 4), zero);
        let ones = SensorGrid::uniform(16, 16, 1);
        assert!(attack_zeroing(&ones, 16).values.iter().all(|&v| v == 0));
        let grid = random_grid(256, 256, 1);
        let attacked = attack_zeroing(&grid, 10);
        // block anchored at (123, 123); everything else untouched
        let mut in_block = 0;
        for (i, (&a, &b)) in grid.values.iter().zip(&attacked.values).enumerate() {
            let (x, y) = (i % 256, i / 256);
            if (123..133).contains(&x) && (123..133).contains(&y) {
                assert_eq!(b, 0);
                in_block += 1;
            } else {
                assert_eq!(a, b);
            }
        }
        assert_eq!(in_block, 100);
    }

    #[test]
    fn rotation_identity_cases() {
        let grid = random_grid(64, 64, 2);
        assert_eq!(attack_rotation(&grid, 0.0), grid);
        let flat = SensorGrid::uniform(64, 64, 77);
        assert_eq!(attack_rotation(&flat, 33.5), flat);
        // quarter turn with the exact-center convention: interior survives
        let rotated = attack_rotation(&grid, 90.0);
        let mut interior_diffs = 0;
        for y in 2..62 {
            for x in 2..62 {
                if rotated.values[y * 64 + x] != grid.values[y * 64 + x] {
                    interior_diffs += 1;
                }
            }
        }
        assert_eq!(interior_diffs, 0);
    }

    #[test]
    fn gaussian_noise_statistics() {
        let grid = SensorGrid::uniform(256, 256, 128);
        assert_eq!(attack_gaussian(&grid, 0.0, 1), grid);
        assert_eq!(attack_gaussian(&grid, 2.0, 7), attack_gaussian(&grid, 2.0, 7));
        let noisy = attack_gaussian(&grid, 2.0, 7);
        let mean: f64 =
            noisy.values.iter().map(|&v| v as f64).sum::<f64>() / noisy.values.len() as f64;
        assert!((mean - 128.0).abs() < 0.1, "mean shift {}", mean - 128.0);
    }

    #[test]
    fn jpeg_bounds_and_uniform() {
        let grid = random_grid(64, 64, 3);
        // level 0 disables quantization beyond integer coefficient rounding
        let light = attack_jpeg(&grid, 0.0);
        let max_err = grid
            .values
            .iter()
            .zip(&light.values)
            .map(|(&a, &b)| (a as i16 - b as i16).abs())
            .max()
            .unwrap();
        assert!(max_err <= 1, "max error {max_err}");

        let flat = SensorGrid::uniform(64, 64, 100);
        let attacked = attack_jpeg(&flat, 1.0);
        let max_err = flat
            .values
            .iter()
            .zip(&attacked.values)
            .map(|(&a, &b)| (a as i16 - b as i16).abs())
            .max()
            .unwrap();
        assert!(max_err <= 1);

        // heavy quantization flips a nontrivial share of low nibble bits
        let heavy = attack_jpeg(&grid, 10.0);
        let mut flipped = 0usize;
        let mut total = 0usize;
        for (a, b) in grid.values.iter().zip(&heavy.values) {
            flipped += ((a ^ b) & 0x0F).count_ones() as usize;
            total += 4;
        }
        assert!(flipped as f64 / total as f64 >= 0.01);
    }

    #[test]
    fn jpeg_partial_blocks() {
        // non-multiple-of-8 dimensions go through the edge-clamped path
        let grid = random_grid(13, 9, 4);
        let attacked = attack_jpeg(&grid, 1.0);
        assert_eq!(attacked.values.len(), grid.values.len());
    }
}

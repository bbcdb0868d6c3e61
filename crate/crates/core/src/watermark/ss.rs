//! Spread-spectrum baselines: classical, improved (ISS), and natural
//! watermarking (NW) over seeded orthonormal carriers, plus a two-sample
//! Kolmogorov-Smirnov distinguishability check.

use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SsModulation {
    /// `s_i = gamma * (-1)^{m_i}`
    Classical { gamma: f64 },
    /// `s_i = (-1)^{m_i} * alpha - lambda * <x,u_i>`
    Iss { alpha: f64, lambda: f64 },
    /// `s_i = -(1 + eta * (-1)^{m_i} * sign<x,u_i>) * <x,u_i>`
    Nw { eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsParams {
    pub modulation: SsModulation,
    /// Number of carriers (message bits).
    pub nc: usize,
    /// Host vector length.
    pub nv: usize,
    /// Seed for the carrier generator.
    pub key: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Seeded Gaussian carriers orthonormalized by modified Gram-Schmidt.
/// Unit norm makes every `/ ||u||^2` in the modulations equal one.
pub fn ss_carriers(params: &SsParams) -> Vec<Vec<f64>> {
    assert!(params.nc >= 1 && params.nc <= params.nv, "need 1 <= Nc <= Nv");
    let mut rng = ChaCha20Rng::seed_from_u64(params.key);
    let mut carriers: Vec<Vec<f64>> = Vec::with_capacity(params.nc);
    while carriers.len() < params.nc {
        let mut v: Vec<f64> = (0..params.nv)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        for u in &carriers {
            let proj = dot(&v, u);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-9 {
            continue; // numerically dependent draw; retry
        }
        for vi in &mut v {
            *vi /= norm;
        }
        carriers.push(v);
    }
    carriers
}

fn sign_factor(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// `y = x + sum_i s_i u_i` with the per-modulation amplitude `s_i`.
pub fn ss_embed(host: &[f64], bits: &[bool], params: &SsParams) -> Result<Vec<f64>> {
    assert_eq!(host.len(), params.nv);
    assert_eq!(bits.len(), params.nc);
    let carriers = ss_carriers(params);
    let mut y = host.to_vec();
    for (u, &bit) in carriers.iter().zip(bits) {
        let corr = dot(host, u);
        let s = match params.modulation {
            SsModulation::Classical { gamma } => gamma * sign_factor(bit),
            SsModulation::Iss { alpha, lambda } => sign_factor(bit) * alpha - lambda * corr,
            SsModulation::Nw { eta } => {
                if corr == 0.0 {
                    return Err(Error::DegenerateHost);
                }
                -(1.0 + eta * sign_factor(bit) * corr.signum()) * corr
            }
        };
        for (yi, ui) in y.iter_mut().zip(u) {
            *yi += s * ui;
        }
    }
    Ok(y)
}

/// Correlation-sign detector; zero correlation decodes as bit 0.
pub fn ss_detect(y: &[f64], params: &SsParams) -> Vec<bool> {
    assert_eq!(y.len(), params.nv);
    let carriers = ss_carriers(params);
    carriers
        .iter()
        .map(|u| {
            let corr = dot(y, u);
            match params.modulation {
                // bit 0 written as +gamma / +alpha along the carrier
                SsModulation::Classical { .. } | SsModulation::Iss { .. } => corr < 0.0,
                // NW leaves <y,u> = -(-1)^m |<x,u>|
                SsModulation::Nw { .. } => corr > 0.0,
            }
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < sa.len() || j < sb.len() {
        let t = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] <= t {
            i += 1;
        }
        while j < sb.len() && sb[j] <= t {
            j += 1;
        }
        let fa = i as f64 / sa.len() as f64;
        let fb = j as f64 / sb.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Rejection at alpha = 0.01: `D > 1.628 * sqrt((n + m) / (n m))`.
pub fn ks_reject(a: &[f64], b: &[f64]) -> bool {
    let n = a.len() as f64;
    let m = b.len() as f64;
    ks_statistic(a, b) > 1.628 * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn gaussian_host(nv: usize, sigma: f64, rng: &mut ChaCha20Rng) -> Vec<f64> {
        (0..nv)
            .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect()
    }

    #[test]
    fn carriers_are_orthonormal_and_deterministic() {
        let params = SsParams {
            modulation: SsModulation::Classical { gamma: 1.0 },
            nc: 8,
            nv: 64,
            key: 42,
        };
        let c1 = ss_carriers(&params);
        let c2 = ss_carriers(&params);
        assert_eq!(c1, c2);
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&c1[i], &c1[j]) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn nw_fixed_example() {
        // eta = 1, x = (2, 0), u = (1, 0), m = 0: s = -4, y = (-2, 0)
        let corr = 2.0f64;
        let s = -(1.0 + 1.0 * sign_factor(false) * corr.signum()) * corr;
        assert_eq!(s, -4.0);
        let y = corr + s;
        assert_eq!(y, -2.0);
        // detection: <y,u> = -2 < 0 -> NW decodes bit 0
        assert!(!(y > 0.0));
    }

    #[test]
    fn iss_with_zero_lambda_matches_classical() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let host = gaussian_host(256, 1.0, &mut rng);
        let bits: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
        let classical = SsParams {
            modulation: SsModulation::Classical { gamma: 0.75 },
            nc: 16,
            nv: 256,
            key: 9,
        };
        let iss = SsParams {
            modulation: SsModulation::Iss {
                alpha: 0.75,
                lambda: 0.0,
            },
            ..classical
        };
        assert_eq!(
            ss_embed(&host, &bits, &classical).unwrap(),
            ss_embed(&host, &bits, &iss).unwrap()
        );
    }

    #[test]
    fn classical_roundtrip_with_large_gamma() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for trial in 0..20 {
            let params = SsParams {
                modulation: SsModulation::Classical { gamma: 50.0 },
                nc: 32,
                nv: 1024,
                key: trial,
            };
            let host = gaussian_host(params.nv, 1.0, &mut rng);
            let bits: Vec<bool> = (0..params.nc).map(|_| rng.gen()).collect();
            let y = ss_embed(&host, &bits, &params).unwrap();
            assert_eq!(ss_detect(&y, &params), bits);
        }
    }

    #[test]
    fn nw_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for trial in 0..20 {
            let params = SsParams {
                modulation: SsModulation::Nw { eta: 1.0 },
                nc: 32,
                nv: 1024,
                key: 1000 + trial,
            };
            let host = gaussian_host(params.nv, 1.0, &mut rng);
            let bits: Vec<bool> = (0..params.nc).map(|_| rng.gen()).collect();
            let y = ss_embed(&host, &bits, &params).unwrap();
            assert_eq!(ss_detect(&y, &params), bits);
        }
    }

    #[test]
    fn nw_rejects_orthogonal_host() {
        let params = SsParams {
            modulation: SsModulation::Nw { eta: 1.0 },
            nc: 1,
            nv: 4,
            key: 5,
        };
        let host = vec![0.0; 4];
        assert!(matches!(
            ss_embed(&host, &[false], &params),
            Err(Error::DegenerateHost)
        ));
    }

    #[test]
    fn all_zero_signal_decodes_to_zero_bits() {
        let params = SsParams {
            modulation: SsModulation::Classical { gamma: 1.0 },
            nc: 4,
            nv: 16,
            key: 11,
        };
        assert_eq!(ss_detect(&vec![0.0; 16], &params), vec![false; 4]);
    }

    #[test]
    fn ks_statistic_sanity() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(ks_statistic(&a, &a) < 1e-12);
        let b: Vec<f64> = a.iter().map(|v| v + 0.5).collect();
        assert!(ks_statistic(&a, &b) > 0.4);
        assert!(ks_reject(&a, &b));
        assert!(!ks_reject(&a, &a.clone()));
    }
}

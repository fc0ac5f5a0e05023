//! BPSK over AWGN: noise level bookkeeping, transmission, LLRs and encoding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::gf2::BinMatrix;

/// Channel operating point. BPSK maps bit 0 to +1 and bit 1 to −1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64) -> Self {
        ChannelConfig {
            ebn0_db,
            rate,
            sigma: sigma_from_ebn0(ebn0_db, rate),
        }
    }
}

/// Noise standard deviation for unit-energy symbols: `1/sqrt(2·R·Eb/N0)`.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    assert!(rate > 0.0 && rate <= 1.0, "rate must lie in (0, 1]");
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)).sqrt()
}

/// BPSK symbols plus Gaussian noise of standard deviation `sigma`.
pub fn transmit<R: Rng>(codeword: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    let mut y: Vec<f64> = codeword.iter().map(|&c| 1.0 - 2.0 * f64::from(c)).collect();
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        for yi in &mut y {
            *yi += normal.sample(rng);
        }
    }
    y
}

/// Channel LLRs `(2/σ²)·y`; positive values favour bit 0.
pub fn llr(y: &[f64], sigma: f64) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    y.iter().map(|&v| scale * v).collect()
}

/// `u · G` over GF(2).
pub fn encode(g: &BinMatrix, u: &[u8]) -> Vec<u8> {
    assert_eq!(u.len(), g.n_rows(), "information word length must equal k");
    let mut acc = vec![0u64; g.stride()];
    for (r, &b) in u.iter().enumerate() {
        if b & 1 == 1 {
            for (a, w) in acc.iter_mut().zip(g.row(r)) {
                *a ^= w;
            }
        }
    }
    (0..g.n_cols())
        .map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8)
        .collect()
}

/// Independent random stream for frame `frame` of a run seeded by `master`.
///
/// ChaCha's 64-bit stream id carries the frame index, so a frame's stream
/// does not depend on which worker processes it.
pub fn frame_rng(master: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(frame);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::eqr_code;

    #[test]
    fn sigma_examples() {
        assert!((sigma_from_ebn0(0.0, 0.5) - 1.0).abs() < 1e-12);
        assert!((sigma_from_ebn0(10.0, 0.5) - 10f64.powf(-0.5)).abs() < 1e-12);
        assert!((sigma_from_ebn0(3.0103, 0.5) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        let c = ChannelConfig::new(0.0, 0.5);
        assert!((c.sigma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn llr_examples() {
        assert_eq!(llr(&[0.5], 1.0), vec![1.0]);
        assert_eq!(llr(&[0.0], 0.3), vec![0.0]);
        assert_eq!(llr(&[1.0], 0.5), vec![8.0]);
    }

    #[test]
    fn noiseless_transmission() {
        let mut rng = frame_rng(1, 0);
        assert_eq!(transmit(&[0, 1, 1, 0], 0.0, &mut rng), vec![1.0, -1.0, -1.0, 1.0]);
        let y = transmit(&[0, 1], 1e-9, &mut rng);
        let l = llr(&y, 1e-9);
        assert!(l[0] > 0.0 && l[1] < 0.0);
    }

    #[test]
    fn transmission_is_reproducible_per_frame() {
        let c = vec![0u8; 24];
        let a = transmit(&c, 0.8, &mut frame_rng(5, 17));
        let b = transmit(&c, 0.8, &mut frame_rng(5, 17));
        let other = transmit(&c, 0.8, &mut frame_rng(5, 18));
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn noise_variance_matches_sigma() {
        let sigma = 0.7;
        let c = vec![1u8; 1_000_000];
        let y = transmit(&c, sigma, &mut frame_rng(9, 0));
        let n = y.len() as f64;
        let var = y.iter().map(|v| (v + 1.0).powi(2)).sum::<f64>() / n;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var={var}");
    }

    #[test]
    fn encode_examples() {
        let code = eqr_code(23).unwrap();
        let g = code.generator_matrix();
        assert_eq!(encode(&g, &[0; 12]), vec![0; 24]);
        for r in 0..12 {
            let mut u = vec![0u8; 12];
            u[r] = 1;
            assert_eq!(encode(&g, &u), g.row_bits(r));
        }
    }

    #[test]
    fn golay_codeword_weights() {
        // Brute-force weight enumerator of the extended Golay code.
        let code = eqr_code(23).unwrap();
        let g = code.generator_matrix();
        let mut weights = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << 12) {
            let u: Vec<u8> = (0..12).map(|i| (mask >> i & 1) as u8).collect();
            let c = encode(&g, &u);
            weights.insert(c.iter().map(|&b| b as usize).sum::<usize>());
            assert!(code.h.annihilates(&crate::gf2::pack_bits(&c)));
        }
        assert_eq!(weights.into_iter().collect::<Vec<_>>(), vec![0, 8, 12, 16, 24]);
    }
}

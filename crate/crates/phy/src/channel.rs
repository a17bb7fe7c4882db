//! Time-varying fading channel simulation.
//!
//! The link model is `y = h x + rho` with `rho ~ CN(0, sigma^2 I)`. In
//! Rayleigh mode the gain follows the block-fading product form
//! `h(t) = gamma * exp(j 2 pi f_d t)`: one circularly-symmetric complex
//! Gaussian coefficient `gamma` (unit mean power, Rayleigh envelope) is drawn
//! per transmitted block and the Doppler shift `f_d = f_c v / c` rotates the
//! phase deterministically from symbol to symbol at the configured symbol
//! rate. The receiver applies zero-forcing equalization with perfect CSI.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::PhyError;

/// Speed of light in m/s used for Doppler computations.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Which channel impairment to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// Noiseless pass-through (`h = 1`, `sigma^2 = 0`). The degenerate case
    /// used for channel-free training; runs through the same code path.
    Identity,
    /// Additive white Gaussian noise only (`h = 1`).
    Awgn,
    /// Block Rayleigh fading with deterministic Doppler phase evolution.
    RayleighDoppler,
}

/// Channel configuration.
#[derive(Debug, Clone)]
pub struct ChannelConfig {
    pub mode: ChannelMode,
    /// Small-scale SNR in dB; average transmit symbol power over noise power.
    pub snr_db: f64,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Relative velocity in m/s.
    pub velocity_mps: f64,
    /// Channel bandwidth in Hz; sets the symbol rate.
    pub bandwidth_hz: f64,
    /// Standard deviation of log-normal shadowing in dB (link-budget mode only).
    pub shadowing_std_db: f64,
    /// When set, a shadowing offset drawn per block additionally scales the
    /// noise variance. Off by default: the experiment axis is post-shadowing
    /// small-scale SNR.
    pub link_budget_mode: bool,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            mode: ChannelMode::RayleighDoppler,
            snr_db: 10.0,
            carrier_hz: 5.9e9,
            velocity_mps: 0.0,
            bandwidth_hz: 20.0e6,
            shadowing_std_db: 8.0,
            link_budget_mode: false,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn velocity_kmh(mut self, kmh: f64) -> Self {
        self.velocity_mps = kmh / 3.6;
        self
    }

    /// Maximum Doppler shift for this configuration, in Hz.
    pub fn doppler_hz(&self) -> f64 {
        doppler_shift(self.carrier_hz, self.velocity_mps)
    }
}

/// One sampled channel use: per-symbol complex gains, the noise variance in
/// effect, and the sampled shadowing offset (0 dB when disabled).
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub gains: Vec<Complex64>,
    pub sigma2: f64,
    pub shadow_db: f64,
}

/// Equalized receive vector. Symbols whose channel gain magnitude fell below
/// the erasure threshold are zeroed and counted instead of dividing by ~0.
#[derive(Debug, Clone)]
pub struct Equalized {
    pub symbols: Vec<Complex64>,
    pub erased: Vec<usize>,
}

const ERASURE_THRESHOLD: f64 = 1e-12;

/// Maximum Doppler frequency shift `f_d = f_c v / c`.
pub fn doppler_shift(carrier_hz: f64, velocity_mps: f64) -> f64 {
    carrier_hz * velocity_mps / SPEED_OF_LIGHT
}

/// Noise variance for a given SNR in dB, assuming unit-average-power symbols:
/// `sigma^2 = 10^(-snr_db / 10)`.
pub fn snr_to_noise_var(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Derive the RNG for one transmission block from a master seed. SplitMix64
/// over (seed, block index) keeps the streams independent and makes parallel
/// evaluation order-insensitive.
pub fn block_rng(master_seed: u64, block_index: u64) -> ChaCha8Rng {
    let mut z = master_seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(block_index.wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(0x94d049bb133111eb);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn standard_complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    // Box-Muller; two uniforms per complex sample.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

/// Sample the per-symbol gain sequence for a block of `k` symbols.
///
/// Rayleigh mode draws `gamma` once per block with `E|gamma|^2 = 1` and
/// applies `h_n = gamma * exp(j 2 pi f_d n / R_s)` with symbol rate
/// `R_s = bandwidth_hz`. Identity and AWGN modes return all-ones gains.
pub fn sample_fading<R: Rng>(cfg: &ChannelConfig, k: usize, rng: &mut R) -> Vec<Complex64> {
    match cfg.mode {
        ChannelMode::Identity | ChannelMode::Awgn => vec![Complex64::new(1.0, 0.0); k],
        ChannelMode::RayleighDoppler => {
            let gamma = standard_complex_gaussian(rng) / 2f64.sqrt();
            let fd = cfg.doppler_hz();
            let phase_step = 2.0 * std::f64::consts::PI * fd / cfg.bandwidth_hz;
            (0..k)
                .map(|n| {
                    let phi = phase_step * n as f64;
                    gamma * Complex64::new(phi.cos(), phi.sin())
                })
                .collect()
        }
    }
}

/// Transmit a block of unit-average-power symbols: `y_n = h_n x_n + rho_n`.
///
/// In link-budget mode the noise variance is additionally scaled by
/// `10^(shadow_db / 10)` with `shadow_db ~ N(0, shadowing_std_db^2)` drawn
/// once per block.
pub fn transmit<R: Rng>(
    x: &[Complex64],
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Result<(Vec<Complex64>, ChannelRealization), PhyError> {
    let power = if x.is_empty() {
        0.0
    } else {
        x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64
    };
    // A zero block (scale convention 1) is tolerated; anything else must be
    // normalized by the symbol mapper.
    if power != 0.0 && (power - 1.0).abs() > 1e-6 {
        return Err(PhyError::NotNormalized { power });
    }

    let gains = sample_fading(cfg, x.len(), rng);
    let shadow_db = if cfg.link_budget_mode && cfg.mode != ChannelMode::Identity {
        let g = standard_complex_gaussian(rng);
        g.re * cfg.shadowing_std_db
    } else {
        0.0
    };
    let sigma2 = match cfg.mode {
        ChannelMode::Identity => 0.0,
        _ => snr_to_noise_var(cfg.snr_db) * 10f64.powf(shadow_db / 10.0),
    };

    let noise_scale = (sigma2 / 2.0).sqrt();
    let y = x
        .iter()
        .zip(&gains)
        .map(|(&xn, &hn)| {
            let rho = standard_complex_gaussian(rng) * noise_scale;
            hn * xn + rho
        })
        .collect();

    Ok((
        y,
        ChannelRealization {
            gains,
            sigma2,
            shadow_db,
        },
    ))
}

/// Zero-forcing equalization with perfect CSI: `y_n * conj(h_n) / |h_n|^2`.
/// Gains below the erasure threshold zero the symbol instead of amplifying it.
pub fn equalize(y: &[Complex64], real: &ChannelRealization) -> Result<Equalized, PhyError> {
    if y.len() != real.gains.len() {
        return Err(PhyError::LengthMismatch {
            expected: real.gains.len(),
            got: y.len(),
        });
    }
    let mut erased = Vec::new();
    let symbols = y
        .iter()
        .zip(&real.gains)
        .enumerate()
        .map(|(n, (&yn, &hn))| {
            let mag2 = hn.norm_sqr();
            if mag2 < ERASURE_THRESHOLD {
                erased.push(n);
                Complex64::new(0.0, 0.0)
            } else {
                yn * hn.conj() / mag2
            }
        })
        .collect();
    Ok(Equalized { symbols, erased })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_symbols(k: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..k).map(|_| standard_complex_gaussian(&mut rng)).collect();
        let p = v.iter().map(|s| s.norm_sqr()).sum::<f64>() / k as f64;
        let s = p.sqrt().recip();
        v.iter_mut().for_each(|x| *x *= s);
        v
    }

    #[test]
    fn doppler_values_match_hand_computation() {
        // 5.9e9 * (120/3.6) / 3e8 and 5.9e9 * (50/3.6) / 3e8
        let fd120 = doppler_shift(5.9e9, 120.0 / 3.6);
        let fd50 = doppler_shift(5.9e9, 50.0 / 3.6);
        assert!((fd120 - 655.6).abs() < 0.1, "fd120 = {fd120}");
        assert!((fd50 - 273.1).abs() < 0.1, "fd50 = {fd50}");
        assert_eq!(doppler_shift(5.9e9, 0.0), 0.0);
    }

    #[test]
    fn snr_to_noise_var_values() {
        assert_eq!(snr_to_noise_var(0.0), 1.0);
        assert!((snr_to_noise_var(10.0) - 0.1).abs() < 1e-15);
        assert!((snr_to_noise_var(19.0) - 0.012589254117941675).abs() < 1e-12);
    }

    #[test]
    fn fading_magnitude_constant_within_block() {
        let cfg = ChannelConfig {
            mode: ChannelMode::RayleighDoppler,
            ..ChannelConfig::default()
        }
        .velocity_kmh(120.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = sample_fading(&cfg, 256, &mut rng);
        let mag = h[0].norm();
        for hn in &h {
            assert!((hn.norm() - mag).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_velocity_gain_is_constant() {
        let cfg = ChannelConfig {
            mode: ChannelMode::RayleighDoppler,
            velocity_mps: 0.0,
            ..ChannelConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample_fading(&cfg, 64, &mut rng);
        for hn in &h {
            assert!((hn - h[0]).norm() < 1e-15);
        }
    }

    #[test]
    fn phase_increment_matches_doppler_exactly() {
        let cfg = ChannelConfig::default().velocity_kmh(120.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = sample_fading(&cfg, 100, &mut rng);
        let expected = 2.0 * std::f64::consts::PI * cfg.doppler_hz() / cfg.bandwidth_hz;
        for n in 0..h.len() - 1 {
            let d = (h[n + 1] / h[n]).arg();
            assert!((d - expected).abs() < 1e-9, "step {n}: {d} vs {expected}");
        }
    }

    #[test]
    fn noiseless_identity_transmit() {
        let x = unit_symbols(128, 1);
        let cfg = ChannelConfig {
            mode: ChannelMode::Identity,
            ..ChannelConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (y, real) = transmit(&x, &cfg, &mut rng).unwrap();
        assert_eq!(real.sigma2, 0.0);
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn non_normalized_input_rejected() {
        let x = vec![Complex64::new(2.0, 0.0); 16];
        let cfg = ChannelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            transmit(&x, &cfg, &mut rng),
            Err(PhyError::NotNormalized { .. })
        ));
    }

    #[test]
    fn equalize_inverts_noiseless_fading() {
        let x = unit_symbols(200, 5);
        let cfg = ChannelConfig {
            mode: ChannelMode::RayleighDoppler,
            snr_db: 1000.0, // effectively noiseless
            ..ChannelConfig::default()
        }
        .velocity_kmh(50.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (y, real) = transmit(&x, &cfg, &mut rng).unwrap();
        let eq = equalize(&y, &real).unwrap();
        assert!(eq.erased.is_empty());
        for (a, b) in x.iter().zip(&eq.symbols) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn near_zero_gain_is_erased_not_nan() {
        let real = ChannelRealization {
            gains: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            sigma2: 0.1,
            shadow_db: 0.0,
        };
        let y = vec![Complex64::new(0.3, 0.4); 2];
        let eq = equalize(&y, &real).unwrap();
        assert_eq!(eq.erased, vec![0]);
        assert!(eq.symbols.iter().all(|s| s.re.is_finite() && s.im.is_finite()));
        assert_eq!(eq.symbols[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn determinism_same_seed_same_realization() {
        let x = unit_symbols(64, 2);
        let cfg = ChannelConfig::default().velocity_kmh(120.0);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            transmit(&x, &cfg, &mut rng).unwrap()
        };
        let (y1, r1) = run(42);
        let (y2, r2) = run(42);
        assert_eq!(y1, y2);
        assert_eq!(r1.gains, r2.gains);
    }
}

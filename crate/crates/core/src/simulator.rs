//! Monte Carlo sampling of the block activity model.
//!
//! Every randomized quantity in the analytic modules — state occupancy,
//! sensing errors, and the average secondary rate — can be re-estimated here
//! by drawing whole blocks and averaging. Draws are reproducible bit-exactly:
//! the generator is ChaCha8 and block `b` of seed `k` always uses the
//! dedicated substream `(k, b)`, so results are independent of evaluation
//! order and amenable to parallel generation.
//!
//! Slot 0 is simulated (its state exists and is what the sensor observes)
//! but carries no secondary power or rate, matching the sensing-overhead
//! accounting. Rates are per-slot capacity formulas, not simulated symbols.
//!
//! ```
//! use cograte_core::model::{SensingModel, TrafficModel};
//! use cograte_core::simulator::{block_rng, sample_block};
//!
//! let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
//! let block = sample_block(&traffic, &SensingModel::PERFECT, &mut block_rng(7, 0));
//! assert_eq!(block.states.len(), 11);
//! assert_eq!(block.sensed, block.s0);
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cap, derive_limits, ChannelParams, SensingModel, TrafficModel};
use crate::sense_opt::PowerProfile;

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    /// Number of independent blocks `B`.
    pub num_blocks: usize,
    /// RNG seed; block `b` uses ChaCha8 substream `(seed, b)`.
    pub seed: u64,
}

impl SimConfig {
    /// Checks the type invariant (`num_blocks >= 1`).
    pub fn validate(&self) -> Result<()> {
        if self.num_blocks == 0 {
            return Err(Error::InvalidParameter(
                "num_blocks must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// One sampled block of the activity model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRealization {
    /// Starting state `s0` (0 = off, 1 = on).
    pub s0: u8,
    /// Switch slot in `1..=T+1`; `T+1` means the state never changes.
    pub tau: usize,
    /// States of slots `0..=T`: `s0` before `tau`, `1 - s0` from `tau` on.
    pub states: Vec<u8>,
    /// Sensor output for slot 0 after the binary error channel.
    pub sensed: u8,
}

/// Generator for block `block` of seed `seed` (dedicated ChaCha8 substream).
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Draws one block: `s0` from the prior, `tau` from the switch pmf by
/// inverse CDF, and the sensed state by flipping `s0` with probability
/// `P_M` (miss, `s0 = 1`) or `P_F` (false alarm, `s0 = 0`).
///
/// Exactly three uniforms are consumed in a fixed order, so the state
/// trajectory for a given `(seed, block)` does not depend on the sensing
/// parameters.
pub fn sample_block<R: Rng + ?Sized>(
    traffic: &TrafficModel,
    sensing: &SensingModel,
    rng: &mut R,
) -> BlockRealization {
    let t_len = traffic.t_len();
    let u_state: f64 = rng.random();
    let u_tau: f64 = rng.random();
    let u_flip: f64 = rng.random();
    let s0: u8 = if u_state < traffic.pi0() { 0 } else { 1 };
    let mut tau = t_len + 1;
    let mut acc = 0.0;
    for cand in 1..=t_len + 1 {
        acc += traffic.f(cand);
        if u_tau < acc {
            tau = cand;
            break;
        }
    }
    let states = (0..=t_len)
        .map(|t| if t < tau { s0 } else { 1 - s0 })
        .collect();
    let flip_prob = if s0 == 1 { sensing.p_m } else { sensing.p_f };
    let sensed = if u_flip < flip_prob { 1 - s0 } else { s0 };
    BlockRealization { s0, tau, states, sensed }
}

/// Empirical occupancy probabilities, split by starting state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalStateProb {
    /// `beta_hat[s][t-1]` = fraction of blocks starting in `s` whose slot
    /// `t` (for `t = 1..=T`) is on. Rows with zero sampled blocks are NaN.
    pub beta_hat: [Vec<f64>; 2],
    /// Number of sampled blocks per starting state.
    pub counts: [u64; 2],
}

/// Estimates the occupancy matrix `beta_s(t)` by sampling `config.num_blocks`
/// blocks. A starting state that never occurs yields a NaN row rather than
/// an error.
///
/// # Errors
///
/// `InvalidParameter` for `num_blocks = 0`.
pub fn empirical_state_prob(
    traffic: &TrafficModel,
    config: &SimConfig,
) -> Result<EmpiricalStateProb> {
    config.validate()?;
    let t_len = traffic.t_len();
    let mut on_counts = [vec![0u64; t_len], vec![0u64; t_len]];
    let mut counts = [0u64; 2];
    for b in 0..config.num_blocks {
        // Sensing never affects the trajectory; a perfect sensor keeps the
        // draw count (and hence the trajectories) aligned with empirical_rate.
        let block = sample_block(traffic, &SensingModel::PERFECT, &mut block_rng(config.seed, b as u64));
        counts[block.s0 as usize] += 1;
        for t in 1..=t_len {
            on_counts[block.s0 as usize][t - 1] += u64::from(block.states[t]);
        }
    }
    let beta_hat = [0, 1].map(|s| {
        if counts[s] == 0 {
            vec![f64::NAN; t_len]
        } else {
            on_counts[s].iter().map(|&c| c as f64 / counts[s] as f64).collect()
        }
    });
    Ok(EmpiricalStateProb { beta_hat, counts })
}

/// Monte Carlo rate estimate with a 95% normal confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Sample mean of the per-block rate.
    pub mean: f64,
    /// Standard error of the mean (zero when `num_blocks < 2`).
    pub std_error: f64,
    /// `mean - 1.96 * std_error`.
    pub ci_low: f64,
    /// `mean + 1.96 * std_error`.
    pub ci_high: f64,
    /// Number of blocks averaged.
    pub num_blocks: usize,
}

/// Estimates the average secondary rate of a power profile by simulation.
///
/// Per block, slot `t = 1..=T` contributes `C(rho_n + rho_s)` when the
/// primary is actually off and `C(rho_n / (1 + INR2 + rho_s)) + C(rho_s)`
/// when on, with the powers read from the *sensed* row; the block rate is
/// the slot sum over `T + 1`. The estimator's expectation equals
/// [`crate::sense_opt::achievable_rate`] by construction.
///
/// # Errors
///
/// Validation errors for an infeasible profile or empty run.
pub fn empirical_rate(
    profile: &PowerProfile,
    params: &ChannelParams,
    traffic: &TrafficModel,
    sensing: &SensingModel,
    config: &SimConfig,
) -> Result<RateEstimate> {
    config.validate()?;
    let limits = derive_limits(params, 0.0)?;
    profile.validate(&limits, params.snr2, traffic, sensing)?;
    let t_len = traffic.t_len();
    // Welford accumulation: stable, and exactly zero variance when every
    // block produces the same rate (deterministic traffic).
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for b in 0..config.num_blocks {
        let block = sample_block(traffic, sensing, &mut block_rng(config.seed, b as u64));
        let row = block.sensed as usize;
        let mut slots = 0.0;
        for t in 1..=t_len {
            let n = profile.rho_n[row][t - 1];
            let s = profile.rho_s[row][t - 1];
            slots += if block.states[t] == 0 {
                cap(n + s)
            } else {
                cap(n / (1.0 + limits.inr2 + s)) + cap(s)
            };
        }
        let rate = slots / (t_len as f64 + 1.0);
        let delta = rate - mean;
        mean += delta / (b as f64 + 1.0);
        m2 += delta * (rate - mean);
    }
    let b = config.num_blocks as f64;
    let std_error = if config.num_blocks < 2 {
        0.0
    } else {
        (m2.max(0.0) / (b - 1.0)).sqrt() / b.sqrt()
    };
    Ok(RateEstimate {
        mean,
        std_error,
        ci_low: mean - 1.96 * std_error,
        ci_high: mean + 1.96 * std_error,
        num_blocks: config.num_blocks,
    })
}

/// Outcome of the deterministic primary-protection audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtectionReport {
    /// True when every `(sensed state, slot)` entry respects the cap.
    pub pass: bool,
    /// Human-readable description of each violating entry.
    pub violations: Vec<String>,
}

/// Verifies `h21_sq * (rho_n + rho_s) <= INR_gap + 1e-9` for every sensed
/// state and slot. The check is deterministic: the constraint is imposed
/// per sensed row, so it holds regardless of sensing errors.
pub fn primary_protection_check(
    profile: &PowerProfile,
    params: &ChannelParams,
) -> ProtectionReport {
    let mut violations = Vec::new();
    for s_hat in 0..2 {
        for (i, (n, s)) in profile.rho_n[s_hat]
            .iter()
            .zip(&profile.rho_s[s_hat])
            .enumerate()
        {
            let received = params.h21_sq * (n + s);
            if received > params.inr_gap + 1e-9 {
                violations.push(format!(
                    "sensed state {s_hat}, slot {}: received interference {received} \
                     exceeds the gap {}",
                    i + 1,
                    params.inr_gap
                ));
            }
        }
    }
    ProtectionReport { pass: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::genie_power;
    use crate::sense_opt::optimize_profile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference_params() -> ChannelParams {
        ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 }
    }

    fn random_traffic(rng: &mut ChaCha8Rng) -> TrafficModel {
        let t_len = rng.random_range(1..=12);
        let pi0: f64 = rng.random();
        let raw: Vec<f64> = (0..t_len + 1).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        TrafficModel::new(t_len, pi0, 1.0 - pi0, raw.into_iter().map(|v| v / total).collect())
            .unwrap()
    }

    #[test]
    fn sample_block_examples() {
        // Degenerate prior with a clean sensor: always off, sensed off.
        let traffic = TrafficModel::uniform(5, 1.0, 0.0).unwrap();
        let sensing = SensingModel { p_m: 0.3, p_f: 0.0 };
        for b in 0..50 {
            let block = sample_block(&traffic, &sensing, &mut block_rng(1, b));
            assert_eq!(block.s0, 0);
            assert_eq!(block.sensed, 0);
        }

        // Point mass at tau = 1: the state flips immediately after slot 0.
        let traffic = TrafficModel::point_mass(5, 0.5, 0.5, 1).unwrap();
        for b in 0..50 {
            let block = sample_block(&traffic, &SensingModel::PERFECT, &mut block_rng(2, b));
            assert_eq!(block.tau, 1);
            assert_eq!(block.states[0], block.s0);
            for t in 1..=5 {
                assert_eq!(block.states[t], 1 - block.s0);
            }
        }
    }

    #[test]
    fn sample_block_trajectory_invariant_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let traffic = random_traffic(&mut rng);
            let sensing = SensingModel { p_m: 0.25, p_f: 0.25 };
            let block = sample_block(&traffic, &sensing, &mut block_rng(9, 0));
            assert!((1..=traffic.t_len() + 1).contains(&block.tau));
            for (t, &s) in block.states.iter().enumerate() {
                let expect = if t < block.tau { block.s0 } else { 1 - block.s0 };
                assert_eq!(s, expect);
            }
        }
        // Same (seed, block) => identical realization; different stream differs.
        let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        let sensing = SensingModel { p_m: 0.2, p_f: 0.1 };
        let a = sample_block(&traffic, &sensing, &mut block_rng(77, 5));
        let b = sample_block(&traffic, &sensing, &mut block_rng(77, 5));
        assert_eq!(a, b);
        let runs: Vec<_> =
            (0..64).map(|i| sample_block(&traffic, &sensing, &mut block_rng(77, i))).collect();
        assert!(runs.iter().any(|r| r != &runs[0]), "substreams must differ");
    }

    #[test]
    fn empirical_state_prob_deterministic_traffic_is_exact() {
        // Always starts on, switches off exactly at slot 3.
        let traffic = TrafficModel::point_mass(6, 0.0, 1.0, 3).unwrap();
        let est = empirical_state_prob(&traffic, &SimConfig { num_blocks: 500, seed: 4 }).unwrap();
        assert_eq!(est.counts, [0, 500]);
        assert!(est.beta_hat[0].iter().all(|v| v.is_nan()), "unsampled row is marked");
        let expected = [1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(est.beta_hat[1], expected);
    }

    #[test]
    fn empirical_state_prob_single_block_is_binary() {
        let traffic = TrafficModel::uniform(4, 1.0, 0.0).unwrap();
        let est = empirical_state_prob(&traffic, &SimConfig { num_blocks: 1, seed: 5 }).unwrap();
        assert_eq!(est.counts[0], 1);
        assert!(est.beta_hat[0].iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn empirical_state_prob_obeys_binomial_law() {
        let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        let config = SimConfig { num_blocks: 200_000, seed: 6 };
        let est = empirical_state_prob(&traffic, &config).unwrap();
        for s in 0..2 {
            let b_s = est.counts[s] as f64;
            assert!(b_s > 0.0);
            for t in 1..=10 {
                let truth = traffic.beta_s(s as u8, t);
                let sigma = (truth * (1.0 - truth) / b_s).sqrt();
                let dev = (est.beta_hat[s][t - 1] - truth).abs();
                assert!(
                    dev < 5.0 * sigma,
                    "beta_hat[{s}][{t}] = {} vs {truth} (5 sigma = {})",
                    est.beta_hat[s][t - 1],
                    5.0 * sigma
                );
            }
        }
    }

    #[test]
    fn sensing_error_frequencies_converge() {
        let traffic = TrafficModel::uniform(3, 0.5, 0.5).unwrap();
        let sensing = SensingModel { p_m: 0.2, p_f: 0.1 };
        let b_total = 200_000u64;
        let mut flips = [0u64; 2];
        let mut starts = [0u64; 2];
        for b in 0..b_total {
            let block = sample_block(&traffic, &sensing, &mut block_rng(8, b));
            starts[block.s0 as usize] += 1;
            if block.sensed != block.s0 {
                flips[block.s0 as usize] += 1;
            }
        }
        for (s, target) in [(0usize, sensing.p_f), (1usize, sensing.p_m)] {
            let n = starts[s] as f64;
            let freq = flips[s] as f64 / n;
            let sigma = (target * (1.0 - target) / n).sqrt();
            assert!(
                (freq - target).abs() < 5.0 * sigma,
                "error frequency {freq} vs {target}"
            );
        }
    }

    #[test]
    fn empirical_rate_zero_profile_is_exactly_zero() {
        let traffic = TrafficModel::uniform(5, 0.5, 0.5).unwrap();
        let est = empirical_rate(
            &PowerProfile::zeros(5),
            &reference_params(),
            &traffic,
            &SensingModel::PERFECT,
            &SimConfig { num_blocks: 1000, seed: 10 },
        )
        .unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!((est.ci_low, est.ci_high), (0.0, 0.0));
    }

    #[test]
    fn empirical_rate_deterministic_traffic_has_zero_variance() {
        let params = reference_params();
        let traffic = TrafficModel::point_mass(4, 1.0, 0.0, 5).unwrap();
        let (profile, report) =
            optimize_profile(&params, &traffic, &SensingModel::PERFECT).unwrap();
        let est = empirical_rate(
            &profile,
            &params,
            &traffic,
            &SensingModel::PERFECT,
            &SimConfig { num_blocks: 200, seed: 11 },
        )
        .unwrap();
        assert!(est.std_error == 0.0, "every block is identical");
        assert!(
            (est.mean - report.r2).abs() < 1e-12,
            "estimate {} vs analytic {}",
            est.mean,
            report.r2
        );
    }

    #[test]
    fn empirical_rate_ci_contains_analytic_rate() {
        let params = reference_params();
        let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        let sensing = SensingModel { p_m: 0.1, p_f: 0.1 };
        let (profile, report) = optimize_profile(&params, &traffic, &sensing).unwrap();
        let est = empirical_rate(
            &profile,
            &params,
            &traffic,
            &sensing,
            &SimConfig { num_blocks: 100_000, seed: 12 },
        )
        .unwrap();
        assert!(
            est.ci_low <= report.r2 && report.r2 <= est.ci_high,
            "[{}, {}] misses {}",
            est.ci_low,
            est.ci_high,
            report.r2
        );
    }

    #[test]
    fn empirical_rate_is_unbiased_across_seeds() {
        let params = reference_params();
        let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        let sensing = SensingModel { p_m: 0.2, p_f: 0.1 };
        let (profile, report) = optimize_profile(&params, &traffic, &sensing).unwrap();
        let mut means = Vec::new();
        let mut pooled_se = 0.0;
        for seed in 0..50u64 {
            let est = empirical_rate(
                &profile,
                &params,
                &traffic,
                &sensing,
                &SimConfig { num_blocks: 10_000, seed },
            )
            .unwrap();
            means.push(est.mean);
            pooled_se = est.std_error;
        }
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        let se_of_grand = pooled_se / (means.len() as f64).sqrt();
        assert!(
            (grand - report.r2).abs() < 3.0 * se_of_grand,
            "grand mean {grand} vs analytic {} (3 SE = {})",
            report.r2,
            3.0 * se_of_grand
        );
    }

    #[test]
    fn empirical_rate_rejects_infeasible_profile() {
        let traffic = TrafficModel::uniform(3, 0.5, 0.5).unwrap();
        let mut profile = PowerProfile::zeros(3);
        profile.rho_n[0][0] = 8.0; // above INR_C = 7
        let err = empirical_rate(
            &profile,
            &reference_params(),
            &traffic,
            &SensingModel::PERFECT,
            &SimConfig { num_blocks: 10, seed: 0 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfeasibleProfile(_)));
    }

    #[test]
    fn protection_check_examples() {
        let params = reference_params();
        let mut profile = PowerProfile::zeros(4);
        for i in 0..4 {
            profile.rho_n[0][i] = 5.0;
            profile.rho_s[1][i] = 1.0;
        }
        assert!(primary_protection_check(&profile, &params).pass);

        profile.rho_n[1][2] = params.inr_gap / params.h21_sq + 1.0;
        let report = primary_protection_check(&profile, &params);
        assert!(!report.pass);
        assert_eq!(report.violations.len(), 1);
        assert!(
            report.violations[0].contains("sensed state 1, slot 3"),
            "violation names the entry: {}",
            report.violations[0]
        );
    }

    #[test]
    fn genie_allocation_lifted_to_flat_profile_passes_protection() {
        let params = reference_params();
        let limits = derive_limits(&params, 0.5).unwrap();
        let alloc = genie_power(&limits, params.snr2, 0.5).unwrap();
        let mut profile = PowerProfile::zeros(6);
        for i in 0..6 {
            profile.rho_n[0][i] = alloc.rho1n;
            profile.rho_s[0][i] = alloc.rho1s;
            profile.rho_n[1][i] = alloc.rho1n;
            profile.rho_s[1][i] = alloc.rho1s;
        }
        assert!(primary_protection_check(&profile, &params).pass);
    }
}

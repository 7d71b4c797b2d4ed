//! Closed-form schemes: the genie-aided upper bound, the two-state
//! water-filling lemma it rests on, and the no-sensing lower bound with its
//! operating-region classifier.
//!
//! The genie-aided scheme assumes the secondary knows the primary's starting
//! state and switch slot in advance, so power splits into an off-state level
//! `rho0` and an on-state superposition pair `(rho1n, rho1s)`. The no-sensing
//! scheme uses a single superposition split `alpha` regardless of the
//! primary's state. Both reduce to explicit piecewise formulas; the grid
//! oracles in [`crate::oracle`] cross-validate every branch.
//!
//! ```
//! use cograte_core::bounds::{genie_power, genie_rate};
//! use cograte_core::model::{derive_limits, ChannelParams};
//!
//! let p = ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 };
//! let lim = derive_limits(&p, 0.5).unwrap();
//! let alloc = genie_power(&lim, p.snr2, 0.5).unwrap();
//! assert!((genie_rate(&alloc, &lim, 0.5) - 1.3043).abs() < 1e-4);
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cap, DerivedLimits};

/// Which branch of the genie-aided allocation fired.
///
/// `NoSic*` are the two cases with an inactive SIC constraint (all on-state
/// power rides on Layer 2); `Sic*` are the three water-filling cases with
/// Layer 2 pinned at the SIC cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenieRegime {
    /// SIC inactive, budget fits under the INR cap: `(SNR2, 0, SNR2)`.
    NoSicA,
    /// SIC inactive, INR cap binds on-state power.
    NoSicB,
    /// SIC active, water level too low to fund Layer 1 when the primary is on.
    SicA,
    /// SIC active, interior water-filling over both states.
    SicB,
    /// SIC active, INR cap binds the on-state Layer-1 power.
    SicC,
}

/// Optimal genie-aided power split.
///
/// Invariants (all to within 1e-9): powers non-negative,
/// `rho1n + rho1s <= INR_C`, `rho1s <= max(SIC_C, 0)`, and
/// `beta_bar * rho0 + beta * (rho1n + rho1s) <= SNR2` with equality whenever
/// `beta < 1` (the objective is strictly increasing in power).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenieAllocation {
    /// Power while the primary is off.
    pub rho0: f64,
    /// Layer-1 power while the primary is on (decoded treating all else as noise).
    pub rho1n: f64,
    /// Layer-2 power while the primary is on (decoded after stripping the primary).
    pub rho1s: f64,
    /// Which closed-form branch produced this split.
    pub regime: GenieRegime,
}

/// Operating region of the no-sensing scheme (the interference-map classification).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// Region 1: primary too weak to decode — Layer 1 only, `alpha* = 0`.
    #[serde(rename = "R1_TreatAsNoise")]
    R1TreatAsNoise,
    /// Region 2: superposition of both layers, `alpha*` interior.
    #[serde(rename = "R2_Superposition")]
    R2Superposition,
    /// Region 3: primary strong enough to strip first — Layer 2 only, `alpha* = 1`.
    #[serde(rename = "R3_DecodePrimaryFirst")]
    R3DecodePrimaryFirst,
    /// `INR_gap = 0`: the secondary may not transmit at all.
    #[serde(rename = "not_allowed")]
    NotAllowed,
}

impl Region {
    /// Short label for CSV cells: `R1`, `R2`, `R3`, or `NA`.
    pub fn code(&self) -> &'static str {
        match self {
            Region::R1TreatAsNoise => "R1",
            Region::R2Superposition => "R2",
            Region::R3DecodePrimaryFirst => "R3",
            Region::NotAllowed => "NA",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Region::R1TreatAsNoise => "R1_TreatAsNoise",
            Region::R2Superposition => "R2_Superposition",
            Region::R3DecodePrimaryFirst => "R3_DecodePrimaryFirst",
            Region::NotAllowed => "not_allowed",
        };
        f.write_str(name)
    }
}

/// Result of the no-sensing scheme: the optimal superposition fraction, its
/// rate, and the operating region it falls in.
///
/// Invariants: `0 <= alpha_star <= 1`, and the region tag matches the
/// fraction (`0` in R1, `1` in R3, interior in R2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoSensingResult {
    /// Share of total power on the Layer-2 codeword.
    pub alpha_star: f64,
    /// Achieved rate in bits per channel use.
    pub rate: f64,
    /// Operating region consistent with `alpha_star`.
    pub region: Region,
}

/// Which case of the two-state water-filling lemma fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WaterfillCase {
    /// `rho1* < 0`: the on state gets nothing.
    A,
    /// Interior: both states at a common water level.
    B,
    /// `rho1* > delta`: the on-state cap binds.
    C,
}

/// Two-state water-filling with an on-state excess noise and cap:
/// maximize `beta_bar C(rho0) + beta C(rho1 / (1 + alpha))` subject to
/// `beta_bar rho0 + beta rho1 <= gamma` and `0 <= rho1 <= delta`.
///
/// The unconstrained stationary pair is `rho0* = gamma + beta alpha`,
/// `rho1* = gamma - beta_bar alpha`; the solution truncates it:
///
/// * case A, `rho1* < 0`: `(gamma / beta_bar, 0)`;
/// * case B, `0 <= rho1* <= delta`: `(rho0*, rho1*)`;
/// * case C, `rho1* > delta`: `((gamma - beta delta) / beta_bar, delta)`.
///
/// The budget holds with equality in every case.
///
/// # Errors
///
/// `InvalidParameter` when any of `alpha`, `gamma`, `delta` is negative or
/// non-finite, when `beta` is outside `[0, 1]`, or when `beta = 1` lands in
/// case C (the off-state power would divide by `beta_bar = 0`).
pub fn waterfill_two_state(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<(f64, f64)> {
    waterfill_cases(alpha, beta, gamma, delta).map(|(pair, _)| pair)
}

/// [`waterfill_two_state`] plus the case tag, for branch bookkeeping.
pub(crate) fn waterfill_cases(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<((f64, f64), WaterfillCase)> {
    for (name, v) in [("alpha", alpha), ("gamma", gamma), ("delta", delta)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "waterfill {name} must be finite and >= 0, got {v}"
            )));
        }
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "waterfill beta must lie in [0, 1], got {beta}"
        )));
    }
    let beta_bar = 1.0 - beta;
    let rho1_star = gamma - beta_bar * alpha;
    if rho1_star < 0.0 {
        // beta = 1 gives rho1* = gamma >= 0, so this division is safe.
        Ok(((gamma / beta_bar, 0.0), WaterfillCase::A))
    } else if rho1_star <= delta {
        Ok(((gamma + beta * alpha, rho1_star), WaterfillCase::B))
    } else if beta_bar == 0.0 {
        Err(Error::InvalidParameter(
            "waterfill case C with beta = 1: off-state power is undefined (division by 1 - beta)"
                .into(),
        ))
    } else {
        Ok((((gamma - beta * delta) / beta_bar, delta), WaterfillCase::C))
    }
}

/// Optimal genie-aided power allocation.
///
/// With an inactive SIC constraint (`SIC_C >= min(SNR2, INR_C)`) all on-state
/// power rides on Layer 2: `(SNR2, 0, SNR2)` when the budget fits under the
/// INR cap, else `((SNR2 - beta INR_C)/beta_bar, 0, INR_C)`. Otherwise Layer 2
/// is pinned at the cap and `(rho0, rho1n)` water-fill with excess noise
/// `alpha = SIC_C + INR2`, budget `gamma = SNR2 - beta SIC_C`, and cap
/// `delta = INR_C - SIC_C`; the water-filling case conditions select among
/// the three SIC branches. A negative `SIC_C` clamps to zero Layer-2 power
/// throughout.
///
/// `beta = 1` degenerates to a single on-state bucket
/// `(0, total - s, s)` with `total = min(SNR2, INR_C)` and
/// `s = min(max(SIC_C, 0), total)`; `beta = 0` needs no special handling (the
/// water-filling cases keep the returned on-state powers feasible).
///
/// `INR_C = 0` with `snr2 > 0` is not an error: the primary allows no
/// secondary power while on, and the off-state absorbs the whole budget
/// (regime `NoSicB`).
///
/// # Errors
///
/// `InvalidParameter` when `snr2` is negative or non-finite or `beta` is
/// outside `[0, 1]`.
pub fn genie_power(limits: &DerivedLimits, snr2: f64, beta: f64) -> Result<GenieAllocation> {
    if !snr2.is_finite() || snr2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "snr2 must be finite and >= 0, got {snr2}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    let inr_c = limits.inr_c;
    let sic = limits.sic_c.max(0.0);
    let beta_bar = 1.0 - beta;

    if beta == 1.0 {
        // Single on-state bucket: fill to the INR cap, Layer 2 first.
        let total = snr2.min(inr_c);
        let rho1s = sic.min(total);
        let rho1n = total - rho1s;
        let regime = if sic >= snr2.min(inr_c) {
            if snr2 <= inr_c { GenieRegime::NoSicA } else { GenieRegime::NoSicB }
        } else if snr2 <= inr_c {
            GenieRegime::SicB
        } else {
            GenieRegime::SicC
        };
        return Ok(GenieAllocation { rho0: 0.0, rho1n, rho1s, regime });
    }

    if sic >= snr2.min(inr_c) {
        // SIC constraint inactive: shifting Layer-1 power onto Layer 2 only
        // helps, so rho1n = 0 and (rho0, rho1s) water-fill with no excess
        // noise (alpha = 0, gamma = SNR2, delta = INR_C).
        if snr2 <= inr_c {
            Ok(GenieAllocation {
                rho0: snr2,
                rho1n: 0.0,
                rho1s: snr2,
                regime: GenieRegime::NoSicA,
            })
        } else {
            Ok(GenieAllocation {
                rho0: (snr2 - beta * inr_c) / beta_bar,
                rho1n: 0.0,
                rho1s: inr_c,
                regime: GenieRegime::NoSicB,
            })
        }
    } else {
        // SIC active: pin rho1s at the cap, then water-fill (rho0, rho1n).
        let alpha = sic + limits.inr2;
        let gamma = snr2 - beta * sic;
        let delta = inr_c - sic;
        let ((rho0, rho1n), case) = waterfill_cases(alpha, beta, gamma, delta)?;
        let regime = match case {
            WaterfillCase::A => GenieRegime::SicA,
            WaterfillCase::B => GenieRegime::SicB,
            WaterfillCase::C => GenieRegime::SicC,
        };
        Ok(GenieAllocation {
            rho0: rho0.max(0.0),
            rho1n: rho1n.max(0.0),
            rho1s: sic,
            regime,
        })
    }
}

/// Rate of a genie-aided allocation:
/// `beta_bar C(rho0) + beta [C(rho1n / (1 + INR2 + rho1s)) + C(rho1s)]`.
///
/// # Panics
///
/// Panics if any power in `alloc` is negative (via [`cap`]).
pub fn genie_rate(alloc: &GenieAllocation, limits: &DerivedLimits, beta: f64) -> f64 {
    let beta_bar = 1.0 - beta;
    beta_bar * cap(alloc.rho0)
        + beta * (cap(alloc.rho1n / (1.0 + limits.inr2 + alloc.rho1s)) + cap(alloc.rho1s))
}

/// Operating region of the no-sensing scheme.
///
/// `INR_gap = 0` is not part of any region (no secondary transmission is
/// allowed). Otherwise, with effective total power `P = min(SNR2, INR_C)`,
/// the boundaries in the `(INR_gap, INR2)` plane are
///
/// * Region 1 when `INR2 <= SNR1 / (1 + INR_gap)` (equivalently `SIC_C <= 0`):
///   the primary is undecodable, treat it as noise;
/// * Region 3 when `INR2 >= SNR1 (1 + P) / (1 + INR_gap)` (equivalently
///   `SIC_C >= P`): decode and strip the primary first;
/// * Region 2 between them: superposition with an interior split.
pub fn classify_region(limits: &DerivedLimits, snr1: f64, snr2: f64, inr_gap: f64) -> Region {
    if inr_gap <= 0.0 {
        return Region::NotAllowed;
    }
    let p = snr2.min(limits.inr_c);
    if limits.inr2 * (1.0 + inr_gap) <= snr1 {
        Region::R1TreatAsNoise
    } else if limits.inr2 * (1.0 + inr_gap) >= snr1 * (1.0 + p) {
        Region::R3DecodePrimaryFirst
    } else {
        Region::R2Superposition
    }
}

/// Optimal no-sensing superposition fraction and its rate.
///
/// The secondary spends `P = min(SNR2, INR_C)` in every data slot (the INR
/// constraint holds per-slot even though the scheme never senses) and splits
/// it as `alpha P` on Layer 2, `(1 - alpha) P` on Layer 1, achieving
/// `R2(alpha) = C((1 - alpha) P / (1 + INR2 + alpha P)) + C(alpha P)`.
/// The rate is monotone in `alpha` wherever decoding stays feasible, so the
/// optimum sits at the region's boundary value: `alpha* = 0` in Region 1,
/// `alpha* = SIC_C / P` in Region 2, `alpha* = 1` in Region 3 (and rate 0
/// with `alpha* = 0` when `INR_gap = 0`).
///
/// # Errors
///
/// `InvalidParameter` when `snr1`, `snr2`, or `inr_gap` is negative or
/// non-finite.
pub fn no_sensing_alpha_star(
    limits: &DerivedLimits,
    snr1: f64,
    snr2: f64,
    inr_gap: f64,
) -> Result<NoSensingResult> {
    for (name, v) in [("snr1", snr1), ("snr2", snr2), ("inr_gap", inr_gap)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
    }
    let region = classify_region(limits, snr1, snr2, inr_gap);
    let p = snr2.min(limits.inr_c);
    let alpha_star = match region {
        Region::NotAllowed | Region::R1TreatAsNoise => 0.0,
        Region::R3DecodePrimaryFirst => 1.0,
        Region::R2Superposition => (limits.sic_c / p).clamp(0.0, 1.0),
    };
    let rate = no_sensing_rate(alpha_star, p, limits.inr2);
    Ok(NoSensingResult { alpha_star, rate, region })
}

/// `R2(alpha) = C((1 - alpha) P / (1 + INR2 + alpha P)) + C(alpha P)` — the
/// no-sensing rate at an arbitrary split, used by the 1-D oracle as well.
pub fn no_sensing_rate(alpha: f64, p: f64, inr2: f64) -> f64 {
    cap((1.0 - alpha) * p / (1.0 + inr2 + alpha * p)) + cap(alpha * p)
}

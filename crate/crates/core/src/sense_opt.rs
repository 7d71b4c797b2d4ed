//! Power-profile optimization for the sense-and-send schemes.
//!
//! After the sensing slot the secondary knows only the *sensed* starting
//! state, so it commits to a per-slot power profile for each sensed state:
//! Layer-1 powers `rho_n[s_hat][t]` and Layer-2 powers `rho_s[s_hat][t]`
//! over data slots `t = 1..T` (stored 0-based). This module evaluates the
//! resulting average rate ([`achievable_rate`]), solves for the optimal
//! profile by water-level bisection on the KKT conditions
//! ([`optimize_profile`]), specializes to error-free sensing
//! ([`perfect_sensing_capacity`]), and verifies the paranoid-profile
//! monotonicity structure ([`check_monotone`]).
//!
//! ```
//! use cograte_core::model::{ChannelParams, SensingModel, TrafficModel};
//! use cograte_core::sense_opt::optimize_profile;
//!
//! let p = ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 };
//! let traffic = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
//! let (profile, report) = optimize_profile(&p, &traffic, &SensingModel::PERFECT).unwrap();
//! assert!(report.r2 > 1.0 && profile.rho_n[0][0] >= profile.rho_n[0][9]);
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cap, derive_limits, ChannelParams, DerivedLimits, SensingModel, TrafficModel};

/// Feasibility tolerance shared by every profile constraint check.
pub const FEAS_TOL: f64 = 1e-9;

/// Per-slot secondary powers, one row per sensed state.
///
/// `rho_n[s_hat][i]` and `rho_s[s_hat][i]` are the Layer-1 and Layer-2 powers
/// in data slot `t = i + 1` when the sensing slot reported `s_hat`.
///
/// Invariants (tolerance 1e-9): all entries >= 0; per-slot INR cap
/// `rho_n + rho_s <= INR_C`; per-slot SIC cap `rho_s <= max(SIC_C, 0)`;
/// average power `sum_s pi(s) sum_shat P(shat|s) sum_t (rho_n + rho_s)
/// <= (T+1) SNR2` (the whole block's budget spent over the T data slots).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerProfile {
    /// Layer-1 powers, rows indexed by sensed state.
    pub rho_n: [Vec<f64>; 2],
    /// Layer-2 powers, rows indexed by sensed state.
    pub rho_s: [Vec<f64>; 2],
}

impl PowerProfile {
    /// All-zero profile over `t_len` data slots.
    pub fn zeros(t_len: usize) -> Self {
        PowerProfile {
            rho_n: [vec![0.0; t_len], vec![0.0; t_len]],
            rho_s: [vec![0.0; t_len], vec![0.0; t_len]],
        }
    }

    /// Number of data slots covered by the profile.
    pub fn t_len(&self) -> usize {
        self.rho_n[0].len()
    }

    /// Total power `rho_n + rho_s` in row `s_hat` at 0-based slot index `i`.
    #[inline]
    pub fn total(&self, s_hat: usize, i: usize) -> f64 {
        self.rho_n[s_hat][i] + self.rho_s[s_hat][i]
    }

    /// Average power spent per block,
    /// `sum_s pi(s) sum_shat P(shat|s) sum_t (rho_n + rho_s)`.
    pub fn average_power(&self, traffic: &TrafficModel, sensing: &SensingModel) -> f64 {
        let mut acc = 0.0;
        for s_hat in 0..2 {
            let w = row_weight(traffic, sensing, s_hat);
            let row: f64 = (0..self.t_len()).map(|i| self.total(s_hat, i)).sum();
            acc += w * row;
        }
        acc
    }

    /// Checks every profile invariant against the given scenario.
    ///
    /// # Errors
    ///
    /// `InfeasibleProfile` naming the first violated constraint.
    pub fn validate(
        &self,
        limits: &DerivedLimits,
        snr2: f64,
        traffic: &TrafficModel,
        sensing: &SensingModel,
    ) -> Result<()> {
        let t_len = traffic.t_len();
        for row in self.rho_n.iter().chain(self.rho_s.iter()) {
            if row.len() != t_len {
                return Err(Error::InfeasibleProfile(format!(
                    "profile has {} slots but the traffic model has T = {t_len}",
                    row.len()
                )));
            }
        }
        let sic_eff = limits.sic_c.max(0.0);
        for s_hat in 0..2 {
            for i in 0..t_len {
                let (n, s) = (self.rho_n[s_hat][i], self.rho_s[s_hat][i]);
                if !n.is_finite() || !s.is_finite() || n < 0.0 || s < 0.0 {
                    return Err(Error::InfeasibleProfile(format!(
                        "negative or non-finite power at (s_hat={s_hat}, t={})",
                        i + 1
                    )));
                }
                if n + s > limits.inr_c + FEAS_TOL {
                    return Err(Error::InfeasibleProfile(format!(
                        "INR cap violated at (s_hat={s_hat}, t={}): {} > {}",
                        i + 1,
                        n + s,
                        limits.inr_c
                    )));
                }
                if s > sic_eff + FEAS_TOL {
                    return Err(Error::InfeasibleProfile(format!(
                        "SIC cap violated at (s_hat={s_hat}, t={}): {s} > {sic_eff}",
                        i + 1
                    )));
                }
            }
        }
        let budget = (t_len as f64 + 1.0) * snr2;
        let avg = self.average_power(traffic, sensing);
        if avg > budget + FEAS_TOL {
            return Err(Error::InfeasibleProfile(format!(
                "average power {avg} exceeds budget {budget}"
            )));
        }
        Ok(())
    }
}

/// Conditional block rates `R_{s s_hat}` for the four (actual start state,
/// sensed state) combinations, before probability weighting and the
/// `1/(T+1)` sensing-overhead normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentRates {
    /// Started off, sensed off.
    pub r00: f64,
    /// Started off, sensed on (false alarm).
    pub r01: f64,
    /// Started on, sensed off (missed detection).
    pub r10: f64,
    /// Started on, sensed on.
    pub r11: f64,
}

/// Slack (right-hand side minus attained value) of each constraint family;
/// non-negative up to 1e-9 for a feasible profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slacks {
    /// `(T+1) SNR2` minus the average power actually spent.
    pub avg_power: f64,
    /// Minimum over `(s_hat, t)` of `INR_C - (rho_n + rho_s)`.
    pub inr_min: f64,
    /// Minimum over `(s_hat, t)` of `max(SIC_C, 0) - rho_s`.
    pub sic_min: f64,
}

/// Rate evaluation of a power profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    /// Average achievable rate in bits per slot, including the `1/(T+1)`
    /// sensing overhead.
    pub r2: f64,
    /// The four conditional block rates; `r2` equals their
    /// `pi(s) P(s_hat|s)`-weighted sum divided by `T + 1`.
    pub components: ComponentRates,
    /// Constraint slacks of the evaluated profile.
    pub slacks: Slacks,
    /// Normalized water-level multiplier `lambda'` satisfying
    /// `G_hat/(1+x) + H_hat/(1+INR2+x) = lambda'` on interior slots.
    /// `Some` only on solver outputs; zero when the budget has slack.
    pub lambda: Option<f64>,
}

/// `P(s_hat observed) = sum_s pi(s) P(s_hat|s)` — the weight of a profile row.
pub(crate) fn row_weight(traffic: &TrafficModel, sensing: &SensingModel, s_hat: usize) -> f64 {
    (0..2u8)
        .map(|s| traffic.pi(s) * sensing.p_sensed_given_actual(s_hat as u8, s))
        .sum()
}

/// Raw stationarity weights for row `s_hat` at slot `t` (1-based):
/// `G = sum_s pi(s) P(s_hat|s) (1 - beta_s(t))` multiplies the primary-off
/// marginal `1/(1+x)`, `H = sum_s pi(s) P(s_hat|s) beta_s(t)` the primary-on
/// marginal `1/(1+INR2+x)`. `G + H` equals the row weight for every `t`.
pub(crate) fn gh_coefficients(
    traffic: &TrafficModel,
    sensing: &SensingModel,
    s_hat: usize,
    t: usize,
) -> (f64, f64) {
    let mut g = 0.0;
    let mut h = 0.0;
    for s in 0..2u8 {
        let w = traffic.pi(s) * sensing.p_sensed_given_actual(s_hat as u8, s);
        g += w * traffic.beta_bar_s(s, t);
        h += w * traffic.beta_s(s, t);
    }
    (g, h)
}

/// Closed-form Layer-2 power cap `(min(SIC_C, INR_C, SNR2))^+`, applied uniformly
/// to every `(s_hat, t)` when a single scalar is wanted.
pub fn layer2_power(limits: &DerivedLimits, snr2: f64) -> f64 {
    limits.sic_c.min(limits.inr_c).min(snr2).max(0.0)
}

/// Average achievable rate of a profile under the block activity model and
/// noisy sensing:
///
/// `R2 = 1/(T+1) sum_s pi(s) sum_shat P(shat|s) sum_t
///   [ (1 - beta_s(t)) C(rho_n + rho_s)
///     + beta_s(t) (C(rho_n / (1 + INR2 + rho_s)) + C(rho_s)) ]`
///
/// with powers indexed by the sensed state and occupancy statistics by the
/// actual one.
///
/// # Errors
///
/// `InfeasibleProfile` when the profile violates its invariants;
/// `InvalidParameter`/`InvalidScenario` from limit derivation.
pub fn achievable_rate(
    profile: &PowerProfile,
    params: &ChannelParams,
    traffic: &TrafficModel,
    sensing: &SensingModel,
) -> Result<RateReport> {
    sensing.validate()?;
    // The on-fraction argument only shapes sic_prime_c, which is unused here.
    let limits = derive_limits(params, 0.0)?;
    profile.validate(&limits, params.snr2, traffic, sensing)?;

    let t_len = traffic.t_len();
    let inr2 = limits.inr2;
    let mut rates = [[0.0f64; 2]; 2]; // [s][s_hat]
    for (s, row) in rates.iter_mut().enumerate() {
        for (s_hat, r) in row.iter_mut().enumerate() {
            for i in 0..t_len {
                let t = i + 1;
                let (n, sp) = (profile.rho_n[s_hat][i], profile.rho_s[s_hat][i]);
                let c_off = cap(n + sp);
                let c_on = cap(n / (1.0 + inr2 + sp)) + cap(sp);
                *r += traffic.beta_bar_s(s as u8, t) * c_off
                    + traffic.beta_s(s as u8, t) * c_on;
            }
        }
    }
    let mut r2 = 0.0;
    for s in 0..2 {
        for s_hat in 0..2 {
            r2 += traffic.pi(s as u8)
                * sensing.p_sensed_given_actual(s_hat as u8, s as u8)
                * rates[s][s_hat];
        }
    }
    r2 /= t_len as f64 + 1.0;

    let sic_eff = limits.sic_c.max(0.0);
    let mut inr_min = f64::INFINITY;
    let mut sic_min = f64::INFINITY;
    for s_hat in 0..2 {
        for i in 0..t_len {
            inr_min = inr_min.min(limits.inr_c - profile.total(s_hat, i));
            sic_min = sic_min.min(sic_eff - profile.rho_s[s_hat][i]);
        }
    }
    Ok(RateReport {
        r2,
        components: ComponentRates {
            r00: rates[0][0],
            r01: rates[0][1],
            r10: rates[1][0],
            r11: rates[1][1],
        },
        slacks: Slacks {
            avg_power: (t_len as f64 + 1.0) * params.snr2
                - profile.average_power(traffic, sensing),
            inr_min,
            sic_min,
        },
        lambda: None,
    })
}

/// Larger root of the per-slot stationarity quadratic
/// `lambda a^2 + (lambda I - 1) a - G_hat I = 0` with `a = 1 + x`, where
/// `G_hat` is the row-normalized off-state weight; returns the total power
/// `x` before clamping. `I = 0` degenerates to the flat level `1/lambda - 1`.
fn stationary_total(g_hat: f64, inr2: f64, lambda: f64) -> f64 {
    let b = lambda * inr2 - 1.0;
    let disc = b * b + 4.0 * lambda * g_hat * inr2;
    (-b + disc.sqrt()) / (2.0 * lambda) - 1.0
}

/// Optimal sense-and-send power profile by water-level bisection on the KKT
/// stationarity conditions.
///
/// The Layer-2 level is pinned at `sigma = min(max(SIC_C, 0), INR_C)` per
/// slot (shifting power from Layer 1 to Layer 2 never hurts below the SIC
/// cap). When even that exceeds the budget `(T+1) SNR2`, the level is scaled
/// down uniformly instead. Otherwise each slot's total power `x` solves
/// `G_hat/(1+x) + H_hat/(1+INR2+x) = lambda'` (larger quadratic root) clamped
/// to `[sigma, INR_C]`, and `lambda'` is bisected over
/// `[1e-12, 1/(1+sigma)]` until the average power constraint is tight within
/// 1e-9. Rows whose sensed state has zero probability are zeroed.
///
/// # Errors
///
/// `NonConvergence` (with the best iterate attached) if 200 bisection steps
/// fail to make the budget tight; parameter errors propagate from
/// limit derivation.
pub fn optimize_profile(
    params: &ChannelParams,
    traffic: &TrafficModel,
    sensing: &SensingModel,
) -> Result<(PowerProfile, RateReport)> {
    sensing.validate()?;
    let limits = derive_limits(params, 0.0)?;
    let t_len = traffic.t_len();
    let t_f = t_len as f64;
    let budget = (t_f + 1.0) * params.snr2;
    let inr_c = limits.inr_c;
    let sigma = limits.sic_c.max(0.0).min(inr_c);

    if inr_c <= 0.0 || budget <= 0.0 {
        let profile = PowerProfile::zeros(t_len);
        let mut report = achievable_rate(&profile, params, traffic, sensing)?;
        report.lambda = Some(0.0);
        return Ok((profile, report));
    }

    let weights = [
        row_weight(traffic, sensing, 0),
        row_weight(traffic, sensing, 1),
    ];

    // Budget too small even for the Layer-2 level alone: spend it all on
    // Layer 2, spread uniformly (every slot has the same marginal there).
    if t_f * sigma >= budget {
        let level = budget / t_f;
        let mut profile = PowerProfile::zeros(t_len);
        for s_hat in 0..2 {
            if weights[s_hat] > 0.0 {
                profile.rho_s[s_hat] = vec![level; t_len];
            }
        }
        let mut report = achievable_rate(&profile, params, traffic, sensing)?;
        report.lambda = Some(1.0 / (1.0 + level));
        return Ok((profile, report));
    }

    // Helper: profile with every active slot at its stationary level for a
    // trial multiplier, plus the average power it spends.
    let fill = |lambda: f64| -> (PowerProfile, f64) {
        let mut profile = PowerProfile::zeros(t_len);
        let mut avg = 0.0;
        for s_hat in 0..2 {
            let w = weights[s_hat];
            if w <= 0.0 {
                continue;
            }
            for i in 0..t_len {
                let (g, _h) = gh_coefficients(traffic, sensing, s_hat, i + 1);
                let x = stationary_total(g / w, limits.inr2, lambda)
                    .clamp(sigma, inr_c);
                profile.rho_n[s_hat][i] = x - sigma;
                profile.rho_s[s_hat][i] = sigma;
                avg += w * x;
            }
        }
        (profile, avg)
    };

    // Whole INR cap affordable: fill every slot, budget slack, lambda = 0.
    if t_f * inr_c <= budget {
        let mut profile = PowerProfile::zeros(t_len);
        for s_hat in 0..2 {
            if weights[s_hat] > 0.0 {
                profile.rho_n[s_hat] = vec![inr_c - sigma; t_len];
                profile.rho_s[s_hat] = vec![sigma; t_len];
            }
        }
        let mut report = achievable_rate(&profile, params, traffic, sensing)?;
        report.lambda = Some(0.0);
        return Ok((profile, report));
    }

    // Bisect the water level: average power is continuous and decreasing in
    // lambda, spanning (T sigma, T INR_C) across the bracket. The upper end
    // is G(1) + H(1), which the per-row normalization makes exactly 1.
    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut best: Option<(f64, PowerProfile, f64)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (profile, avg) = fill(mid);
        let gap = (avg - budget).abs();
        if best.as_ref().is_none_or(|(g, _, _)| gap < *g) {
            best = Some((gap, profile, mid));
        }
        if gap <= FEAS_TOL {
            break;
        }
        if avg > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gap, profile, lambda) = best.expect("bisection ran at least once");
    if gap > FEAS_TOL {
        let report = achievable_rate(&profile, params, traffic, sensing)?;
        return Err(Error::NonConvergence {
            iters: 200,
            best_rate: report.r2,
            best: Box::new(profile),
        });
    }

    if informative(traffic, sensing) {
        debug_assert!(
            check_monotone(&profile, inr_c).pass(),
            "solver output must be paranoid-monotone under informative sensing"
        );
    }
    let mut report = achievable_rate(&profile, params, traffic, sensing)?;
    report.lambda = Some(lambda);
    Ok((profile, report))
}

/// Sensing is informative when observing `s_hat` makes that start state the
/// likelier one: `pi(0)(1-P_F) >= pi(1) P_M` and `pi(1)(1-P_M) >= pi(0) P_F`.
/// The paranoid monotone structure is guaranteed only then.
fn informative(traffic: &TrafficModel, sensing: &SensingModel) -> bool {
    traffic.pi0() * (1.0 - sensing.p_f) >= traffic.pi1() * sensing.p_m
        && traffic.pi1() * (1.0 - sensing.p_m) >= traffic.pi0() * sensing.p_f
}

/// Error-free-sensing capacity: [`optimize_profile`] at `P_M = P_F = 0`.
///
/// # Errors
///
/// Propagated from [`optimize_profile`].
pub fn perfect_sensing_capacity(
    params: &ChannelParams,
    traffic: &TrafficModel,
) -> Result<RateReport> {
    optimize_profile(params, traffic, &SensingModel::PERFECT).map(|(_, report)| report)
}

/// Outcome of one monotonicity check family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    /// Layer-1 row for sensed-off is non-increasing in `t`.
    pub row0_non_increasing: bool,
    /// Layer-1 row for sensed-on is non-decreasing in `t`.
    pub row1_non_decreasing: bool,
    /// A zero Layer-1 slot zeroes everything after it (row 0) / before it (row 1).
    pub zeros_propagate: bool,
    /// A slot at the INR cap caps everything before it (row 0) / after it (row 1).
    pub caps_propagate: bool,
    /// Human-readable descriptions of every violation found.
    pub violations: Vec<String>,
}

impl MonotoneReport {
    /// True when every family passed.
    pub fn pass(&self) -> bool {
        self.row0_non_increasing
            && self.row1_non_decreasing
            && self.zeros_propagate
            && self.caps_propagate
    }
}

/// Verifies the paranoid-profile structure at tolerance 1e-9: the sensed-off
/// Layer-1 row decays, the sensed-on row grows, zeros propagate toward the
/// uncertain end of each row, and INR-cap saturation (total power at
/// `inr_c`) propagates toward the confident end.
pub fn check_monotone(profile: &PowerProfile, inr_c: f64) -> MonotoneReport {
    const TOL: f64 = 1e-9;
    let t_len = profile.t_len();
    let mut report = MonotoneReport {
        row0_non_increasing: true,
        row1_non_decreasing: true,
        zeros_propagate: true,
        caps_propagate: true,
        violations: Vec::new(),
    };
    for i in 0..t_len.saturating_sub(1) {
        let (a, b) = (profile.rho_n[0][i], profile.rho_n[0][i + 1]);
        if b > a + TOL {
            report.row0_non_increasing = false;
            report.violations.push(format!(
                "row 0 increases at t={}->{}: {a} -> {b}",
                i + 1,
                i + 2
            ));
        }
        let (a, b) = (profile.rho_n[1][i], profile.rho_n[1][i + 1]);
        if b < a - TOL {
            report.row1_non_decreasing = false;
            report.violations.push(format!(
                "row 1 decreases at t={}->{}: {a} -> {b}",
                i + 1,
                i + 2
            ));
        }
    }
    for i in 0..t_len.saturating_sub(1) {
        // Zeros propagate to later slots in row 0, earlier slots in row 1.
        if profile.rho_n[0][i] <= TOL && profile.rho_n[0][i + 1] > TOL {
            report.zeros_propagate = false;
            report.violations.push(format!(
                "row 0 zero at t={} not followed by zero at t={}",
                i + 1,
                i + 2
            ));
        }
        if profile.rho_n[1][i + 1] <= TOL && profile.rho_n[1][i] > TOL {
            report.zeros_propagate = false;
            report.violations.push(format!(
                "row 1 zero at t={} not preceded by zero at t={}",
                i + 2,
                i + 1
            ));
        }
        // INR caps propagate to earlier slots in row 0, later slots in row 1.
        if profile.total(0, i + 1) >= inr_c - TOL && profile.total(0, i) < inr_c - TOL {
            report.caps_propagate = false;
            report.violations.push(format!(
                "row 0 at INR cap at t={} but not at t={}",
                i + 2,
                i + 1
            ));
        }
        if profile.total(1, i) >= inr_c - TOL && profile.total(1, i + 1) < inr_c - TOL {
            report.caps_propagate = false;
            report.violations.push(format!(
                "row 1 at INR cap at t={} but not at t={}",
                i + 1,
                i + 2
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{genie_power, genie_rate, waterfill_two_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-9;

    fn reference_params() -> ChannelParams {
        ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 }
    }

    fn reference_traffic() -> TrafficModel {
        TrafficModel::uniform(10, 0.5, 0.5).unwrap()
    }

    #[test]
    fn layer2_power_examples() {
        let lim = DerivedLimits { inr2: 3.5, inr_c: 7.0, sic_c: 1.25, sic_prime_c: 3.0 };
        assert_eq!(layer2_power(&lim, 7.0), 1.25);

        let lim = DerivedLimits { inr2: 1.0, inr_c: 7.0, sic_c: -0.8, sic_prime_c: -0.3 };
        assert_eq!(layer2_power(&lim, 7.0), 0.0);

        let lim = DerivedLimits { inr2: 1.0, inr_c: 2.0, sic_c: 10.0, sic_prime_c: 10.5 };
        assert_eq!(layer2_power(&lim, 7.0), 2.0);
    }

    #[test]
    fn rate_of_zero_profile_is_zero() {
        let report = achievable_rate(
            &PowerProfile::zeros(10),
            &reference_params(),
            &reference_traffic(),
            &SensingModel::PERFECT,
        )
        .unwrap();
        assert_eq!(report.r2, 0.0);
        assert!(report.slacks.avg_power > 0.0);
    }

    #[test]
    fn single_slot_always_off_example() {
        // T = 1, primary always off and sensed perfectly: the one data slot
        // carries the whole block budget 2*snr2 and the channel is clean.
        let params = ChannelParams { snr1: 7.0, snr2: 3.0, h12_sq: 0.5, h21_sq: 0.05, inr_gap: 3.5 };
        let traffic = TrafficModel::point_mass(1, 1.0, 0.0, 2).unwrap();
        let mut profile = PowerProfile::zeros(1);
        profile.rho_n[0][0] = 2.0 * params.snr2;
        let report =
            achievable_rate(&profile, &params, &traffic, &SensingModel::PERFECT).unwrap();
        assert!(
            (report.r2 - cap(2.0 * params.snr2) / 2.0).abs() < 1e-12,
            "r2 = C(2 snr2) / 2, got {}",
            report.r2
        );
        assert!((report.slacks.avg_power).abs() < EPS, "budget exactly spent");
    }

    #[test]
    fn component_weighting_arithmetic() {
        // Coin-flip sensing with a fair prior weights all four components 1/4.
        let params = reference_params();
        let traffic = reference_traffic();
        let sensing = SensingModel { p_m: 0.5, p_f: 0.5 };
        let mut profile = PowerProfile::zeros(10);
        for s_hat in 0..2 {
            for i in 0..10 {
                profile.rho_n[s_hat][i] = 1.0 + 0.3 * i as f64 * s_hat as f64;
                profile.rho_s[s_hat][i] = 0.5;
            }
        }
        let report = achievable_rate(&profile, &params, &traffic, &sensing).unwrap();
        let c = report.components;
        let expected = 0.25 * (c.r00 + c.r01 + c.r10 + c.r11) / 11.0;
        assert!((report.r2 - expected).abs() < 1e-12);
    }

    #[test]
    fn report_weighting_identity_random() {
        // r2 always equals the weighted component combination / (T+1).
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let params = reference_params();
        for _ in 0..50 {
            let t_len = rng.random_range(1..=8);
            let pi0: f64 = rng.random();
            let raw: Vec<f64> = (0..t_len + 1).map(|_| rng.random::<f64>() + 1e-3).collect();
            let tot: f64 = raw.iter().sum();
            let traffic =
                TrafficModel::new(t_len, pi0, 1.0 - pi0, raw.iter().map(|v| v / tot).collect())
                    .unwrap();
            let sensing = SensingModel { p_m: rng.random(), p_f: rng.random() };
            let mut profile = PowerProfile::zeros(t_len);
            for s_hat in 0..2 {
                for i in 0..t_len {
                    profile.rho_s[s_hat][i] = rng.random::<f64>() * 1.25;
                    profile.rho_n[s_hat][i] =
                        rng.random::<f64>() * (7.0 - profile.rho_s[s_hat][i]).max(0.0) * 0.5;
                }
            }
            let report = achievable_rate(&profile, &params, &traffic, &sensing).unwrap();
            let c = report.components;
            let weighted = traffic.pi0() * (1.0 - sensing.p_f) * c.r00
                + traffic.pi0() * sensing.p_f * c.r01
                + traffic.pi1() * sensing.p_m * c.r10
                + traffic.pi1() * (1.0 - sensing.p_m) * c.r11;
            assert!((report.r2 - weighted / (t_len as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_prior_reduces_to_single_component() {
        // pi = (1, 0) with perfect sensing: only R00 contributes, and it
        // reduces term-by-term to the direct case-1 evaluation.
        let params = reference_params();
        let traffic = TrafficModel::uniform(6, 1.0, 0.0).unwrap();
        let mut profile = PowerProfile::zeros(6);
        for i in 0..6 {
            profile.rho_n[0][i] = 3.0 - 0.4 * i as f64;
            profile.rho_s[0][i] = 1.0;
        }
        let report =
            achievable_rate(&profile, &params, &traffic, &SensingModel::PERFECT).unwrap();
        let inr2 = 0.5 * 7.0;
        let mut direct = 0.0;
        for i in 0..6 {
            let (n, s) = (profile.rho_n[0][i], profile.rho_s[0][i]);
            let f = traffic.state_cdf(i + 1);
            direct += (1.0 - f) * cap(n + s) + f * (cap(n / (1.0 + inr2 + s)) + cap(s));
        }
        assert!((report.components.r00 - direct).abs() < 1e-12);
        assert!((report.r2 - direct / 7.0).abs() < 1e-12);
    }

    #[test]
    fn swap_gain_moves_power_earlier_in_row0() {
        // Moving a lone Layer-1 lump one slot earlier in the sensed-off row
        // strictly helps whenever the switch cdf strictly increases there.
        let params = reference_params();
        let traffic = reference_traffic();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let rho = rng.random_range(0.1..=6.0);
            let t = rng.random_range(1..=9usize);
            let mut early = PowerProfile::zeros(10);
            early.rho_n[0][t - 1] = rho;
            let mut late = PowerProfile::zeros(10);
            late.rho_n[0][t] = rho;
            let r_early =
                achievable_rate(&early, &params, &traffic, &SensingModel::PERFECT).unwrap();
            let r_late =
                achievable_rate(&late, &params, &traffic, &SensingModel::PERFECT).unwrap();
            let predicted = (traffic.state_cdf(t + 1) - traffic.state_cdf(t))
                * (cap(rho) - cap(rho / (1.0 + 3.5)))
                * traffic.pi0()
                / 11.0;
            assert!(r_early.r2 > r_late.r2, "earlier is strictly better");
            assert!((r_early.r2 - r_late.r2 - predicted).abs() < 1e-12);
        }
    }

    #[test]
    fn layer2_shift_never_hurts() {
        // Below the SIC cap, moving delta from Layer 1 to Layer 2 cannot
        // decrease the rate.
        let params = reference_params();
        let traffic = reference_traffic();
        let sensing = SensingModel { p_m: 0.1, p_f: 0.2 };
        let delta = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let mut profile = PowerProfile::zeros(10);
            for s_hat in 0..2 {
                for i in 0..10 {
                    profile.rho_s[s_hat][i] = rng.random::<f64>() * (1.25 - 2.0 * delta);
                    profile.rho_n[s_hat][i] = delta + rng.random::<f64>() * 2.0;
                }
            }
            let base = achievable_rate(&profile, &params, &traffic, &sensing).unwrap().r2;
            let s_hat = rng.random_range(0..2usize);
            let i = rng.random_range(0..10usize);
            let mut shifted = profile.clone();
            shifted.rho_n[s_hat][i] -= delta;
            shifted.rho_s[s_hat][i] += delta;
            let moved = achievable_rate(&shifted, &params, &traffic, &sensing).unwrap().r2;
            assert!(moved >= base - 1e-12, "Layer-2 shift hurt: {base} -> {moved}");
        }
    }

    #[test]
    fn optimize_reference_scenario_properties() {
        // With SNR2 = INR_C = 7, the block budget 77 exceeds T * INR_C = 70:
        // every slot sits at the interference cap, the power constraint is
        // slack, and the multiplier is zero.
        let params = reference_params();
        let traffic = reference_traffic();
        let (profile, report) =
            optimize_profile(&params, &traffic, &SensingModel::PERFECT).unwrap();
        let lim = derive_limits(&params, 0.5).unwrap();
        profile.validate(&lim, params.snr2, &traffic, &SensingModel::PERFECT).unwrap();
        assert_eq!(report.lambda, Some(0.0));
        assert!(report.slacks.inr_min.abs() < EPS, "every slot at the INR cap");
        assert!((report.slacks.avg_power - 7.0).abs() < 1e-9, "70 of 77 spent");
        assert!(check_monotone(&profile, lim.inr_c).pass());
        // Layer 2 pinned at the SIC cap in every slot, so each on-slot earns
        // C(1) + C(1.25) and each off-slot C(7); the fair prior makes every
        // slot half-on, giving the closed-form rate below.
        for s_hat in 0..2 {
            for i in 0..10 {
                assert!((profile.rho_s[s_hat][i] - 1.25).abs() < EPS);
                assert!((profile.rho_n[s_hat][i] - 5.75).abs() < EPS);
            }
        }
        let per_slot = 0.5 * cap(7.0) + 0.5 * (cap(1.0) + cap(1.25));
        assert!((report.r2 - per_slot * 10.0 / 11.0).abs() < 1e-12);
        assert!(report.r2 > 1.0, "reference scenario achieves a healthy rate");
    }

    #[test]
    fn optimize_tight_budget_has_positive_multiplier() {
        // Shrink SNR2 so the budget binds strictly inside the caps.
        let params = ChannelParams { snr2: 2.0, ..reference_params() };
        let traffic = reference_traffic();
        let (profile, report) =
            optimize_profile(&params, &traffic, &SensingModel::PERFECT).unwrap();
        let lim = derive_limits(&params, 0.5).unwrap();
        profile.validate(&lim, params.snr2, &traffic, &SensingModel::PERFECT).unwrap();
        assert!(report.slacks.avg_power.abs() <= FEAS_TOL, "budget tight");
        assert!(report.lambda.unwrap() > 0.0);
        assert!(check_monotone(&profile, lim.inr_c).pass());
        // Layer 2 still preferred up to the SIC cap in every slot.
        for s_hat in 0..2 {
            for i in 0..10 {
                assert!((profile.rho_s[s_hat][i] - 1.25).abs() < EPS);
            }
        }
        // Off-row level in slot 1 strictly above the on-row level: power is
        // worth more where the primary is more likely absent.
        assert!(profile.rho_n[0][0] > profile.rho_n[1][0] + 0.1);
    }

    #[test]
    fn invisible_primary_gives_flat_profile() {
        // h12 = 0: INR2 = 0 and the stationarity condition loses its
        // t-dependence, so each row is flat.
        let params = ChannelParams { snr1: 7.0, snr2: 4.0, h12_sq: 0.0, h21_sq: 0.5, inr_gap: 3.5 };
        let traffic = reference_traffic();
        let sensing = SensingModel { p_m: 0.1, p_f: 0.1 };
        let (profile, report) = optimize_profile(&params, &traffic, &sensing).unwrap();
        for s_hat in 0..2 {
            for i in 1..10 {
                assert!(
                    (profile.rho_n[s_hat][i] - profile.rho_n[s_hat][0]).abs() < 1e-7,
                    "row {s_hat} not flat"
                );
            }
        }
        assert!(report.slacks.avg_power.abs() < EPS);
    }

    #[test]
    fn no_switch_blocks_match_two_state_waterfill() {
        // Point mass at tau = T+1 and perfect sensing: each sensed state is a
        // constant channel, so the per-slot levels must solve the two-state
        // water-filling problem with per-slot budget (T+1) snr2 / T.
        let params = ChannelParams { snr1: 7.0, snr2: 2.0, h12_sq: 0.15, h21_sq: 0.5, inr_gap: 3.5 };
        let lim = derive_limits(&params, 0.5).unwrap();
        assert!(lim.sic_c < 0.0, "choose a scenario with no Layer-2 power");
        let t_len = 8;
        let traffic = TrafficModel::point_mass(t_len, 0.4, 0.6, t_len + 1).unwrap();
        let (profile, _) =
            optimize_profile(&params, &traffic, &SensingModel::PERFECT).unwrap();
        let per_slot = (t_len as f64 + 1.0) * params.snr2 / t_len as f64;
        let (rho0, rho1) =
            waterfill_two_state(lim.inr2, traffic.pi1(), per_slot, lim.inr_c).unwrap();
        for i in 0..t_len {
            assert!((profile.rho_n[0][i] - rho0).abs() < 1e-6, "off row at water level");
            assert!((profile.rho_n[1][i] - rho1).abs() < 1e-6, "on row at water level");
            assert_eq!(profile.rho_s[0][i], 0.0);
        }
    }

    #[test]
    fn solver_beats_random_feasible_profiles() {
        let params = reference_params();
        let traffic = reference_traffic();
        let sensing = SensingModel { p_m: 0.2, p_f: 0.1 };
        let (_, best) = optimize_profile(&params, &traffic, &sensing).unwrap();
        let lim = derive_limits(&params, 0.5).unwrap();
        let budget = 11.0 * params.snr2;
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..200 {
            let mut profile = PowerProfile::zeros(10);
            for s_hat in 0..2 {
                for i in 0..10 {
                    let s = rng.random::<f64>() * lim.sic_c.max(0.0);
                    let n = rng.random::<f64>() * (lim.inr_c - s);
                    profile.rho_s[s_hat][i] = s;
                    profile.rho_n[s_hat][i] = n;
                }
            }
            let avg = profile.average_power(&traffic, &sensing);
            if avg > budget {
                let scale = budget / avg;
                for s_hat in 0..2 {
                    for i in 0..10 {
                        profile.rho_n[s_hat][i] *= scale;
                        profile.rho_s[s_hat][i] *= scale;
                    }
                }
            }
            let rate = achievable_rate(&profile, &params, &traffic, &sensing).unwrap().r2;
            assert!(rate <= best.r2 + EPS, "random profile beat the solver");
        }
    }

    #[test]
    fn genie_dominates_perfect_sensing() {
        // The genie knows the switch slot; sensing only the start state
        // cannot beat it under the matched per-slot budget.
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..200 {
            let params = ChannelParams {
                snr1: rng.random_range(0.1..=20.0),
                snr2: rng.random_range(0.1..=20.0),
                h12_sq: rng.random_range(0.05..=2.0),
                h21_sq: rng.random_range(0.05..=2.0),
                inr_gap: rng.random_range(0.0..=10.0),
            };
            let t_len = rng.random_range(2..=12);
            let pi0: f64 = rng.random();
            let raw: Vec<f64> = (0..t_len + 1).map(|_| rng.random::<f64>() + 1e-3).collect();
            let tot: f64 = raw.iter().sum();
            let traffic =
                TrafficModel::new(t_len, pi0, 1.0 - pi0, raw.iter().map(|v| v / tot).collect())
                    .unwrap();
            let report = perfect_sensing_capacity(&params, &traffic).unwrap();
            let beta_match = traffic.long_run_on_fraction();
            let lim = derive_limits(&params, beta_match).unwrap();
            let per_slot = (t_len as f64 + 1.0) * params.snr2 / t_len as f64;
            let genie = genie_rate(
                &genie_power(&lim, per_slot, beta_match).unwrap(),
                &lim,
                beta_match,
            );
            let bound = t_len as f64 / (t_len as f64 + 1.0) * genie;
            assert!(
                report.r2 <= bound + 1e-9,
                "sensing beat the genie: {} > {bound} at {params:?}, T={t_len}",
                report.r2
            );
        }
    }

    #[test]
    fn perfect_sensing_closed_forms() {
        // Always-off primary: C = (T/(T+1)) C((T+1) snr2 / T).
        let params = ChannelParams { snr1: 7.0, snr2: 3.0, h12_sq: 0.5, h21_sq: 0.05, inr_gap: 3.5 };
        for t_len in [4usize, 10, 25] {
            let traffic = TrafficModel::point_mass(t_len, 1.0, 0.0, t_len + 1).unwrap();
            let report = perfect_sensing_capacity(&params, &traffic).unwrap();
            let t_f = t_len as f64;
            let expected = t_f / (t_f + 1.0) * cap((t_f + 1.0) * params.snr2 / t_f);
            assert!(
                (report.r2 - expected).abs() < 1e-9,
                "T={t_len}: {} vs {expected}",
                report.r2
            );
        }

        // Persistent primary with no interference margin: nothing at all.
        let params = ChannelParams { snr1: 7.0, snr2: 3.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 0.0 };
        let traffic = TrafficModel::point_mass(10, 0.0, 1.0, 11).unwrap();
        let report = perfect_sensing_capacity(&params, &traffic).unwrap();
        assert_eq!(report.r2, 0.0);

        // Sensing overhead shrinks with T on the reference scenario.
        let params = reference_params();
        let mut last = 0.0;
        for t_len in [5usize, 10, 50] {
            let traffic = TrafficModel::uniform(t_len, 0.5, 0.5).unwrap();
            let r = perfect_sensing_capacity(&params, &traffic).unwrap().r2;
            assert!(r > last, "not increasing in T at T={t_len}");
            last = r;
        }
    }

    #[test]
    fn check_monotone_examples() {
        let mut profile = PowerProfile::zeros(3);
        profile.rho_n[0] = vec![2.0, 2.0, 2.0];
        profile.rho_n[1] = vec![1.0, 1.0, 1.0];
        assert!(check_monotone(&profile, 10.0).pass(), "constant profile passes");

        profile.rho_n[0] = vec![3.0, 1.0, 2.0];
        let report = check_monotone(&profile, 10.0);
        assert!(!report.pass());
        assert!(!report.row0_non_increasing);
        assert!(
            report.violations.iter().any(|v| v.contains("t=2->3")),
            "violation names the offending step: {:?}",
            report.violations
        );
    }

    #[test]
    fn infeasible_profiles_rejected() {
        let params = reference_params();
        let traffic = reference_traffic();
        let mut profile = PowerProfile::zeros(10);
        profile.rho_n[0][0] = 8.0; // above INR_C = 7
        let err =
            achievable_rate(&profile, &params, &traffic, &SensingModel::PERFECT).unwrap_err();
        assert!(matches!(err, Error::InfeasibleProfile(_)));

        let mut profile = PowerProfile::zeros(10);
        profile.rho_s[0][0] = 1.5; // above SIC_C = 1.25
        let err =
            achievable_rate(&profile, &params, &traffic, &SensingModel::PERFECT).unwrap_err();
        assert!(matches!(err, Error::InfeasibleProfile(_)));
    }
}

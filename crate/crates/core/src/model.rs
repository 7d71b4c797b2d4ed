//! Scenario parameters, derived interference limits, and traffic statistics.
//!
//! Everything downstream (closed-form bounds, profile optimization, oracles,
//! simulation) consumes the four types defined here:
//!
//! * [`ChannelParams`] — the physical scenario in standard form: direct SNRs
//!   and cross gains, plus the interference margin `INR_gap` the primary's
//!   below-capacity operation leaves for the secondary.
//! * [`DerivedLimits`] — the induced constants `INR_2`, `INR_C`, `SIC_C`,
//!   `SIC'_C` that shape every power constraint.
//! * [`TrafficModel`] — the block activity model: blocks of `T + 1` slots
//!   (slot 0 reserved for sensing), a starting state drawn from `(pi0, pi1)`,
//!   and a single state switch at a random slot `tau ~ f`.
//! * [`SensingModel`] — the sensing channel's missed-detection and
//!   false-alarm probabilities.
//!
//! ```
//! use cograte_core::model::{cap, derive_limits, ChannelParams};
//!
//! let p = ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 };
//! let lim = derive_limits(&p, 0.5).unwrap();
//! assert_eq!(lim.inr_c, 7.0);
//! assert_eq!(cap(7.0), 1.5); // (1/2) log2(8)
//! ```

use serde::Deserialize;

use crate::error::{Error, Result};

/// Probability-mass entries below this are treated as exactly zero, which
/// keeps cdf monotonicity checks stable against parser dust.
const PMF_EPS: f64 = 1e-15;

/// Tolerance for "sums to one" checks on probability inputs.
const PROB_TOL: f64 = 1e-12;

/// Scalar Gaussian channel capacity `C(x) = (1/2) log2(1 + x)` in
/// bits per channel use.
///
/// Strictly increasing and concave on `x >= 0`.
///
/// # Panics
///
/// Panics if `x` is negative or not finite; valid callers never produce
/// such arguments.
#[inline]
pub fn cap(x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "cap: SNR must be finite and >= 0, got {x}");
    0.5 * (1.0 + x).log2()
}

/// The physical scenario in standard form.
///
/// `snr1 = |h11|^2 P1` (with `|h11| = 1`), `snr2` is the secondary's average
/// power budget, `h12_sq`/`h21_sq` are the squared cross gains, and `inr_gap`
/// is the interference margin allowed at the primary receiver. The secondary's
/// interference-to-noise ratio `INR_2 = h12_sq * snr1` is always derived, never
/// a free input.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Direct SNR of the primary link.
    pub snr1: f64,
    /// Average power budget (direct SNR) of the secondary link.
    pub snr2: f64,
    /// Squared cross gain from primary transmitter to secondary receiver.
    pub h12_sq: f64,
    /// Squared cross gain from secondary transmitter to primary receiver.
    pub h21_sq: f64,
    /// Interference margin the primary tolerates, in noise units.
    pub inr_gap: f64,
}

impl ChannelParams {
    /// Checks the type invariants: every field finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("snr1", self.snr1),
            ("snr2", self.snr2),
            ("h12_sq", self.h12_sq),
            ("h21_sq", self.h21_sq),
            ("inr_gap", self.inr_gap),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "channel.{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Constants derived from [`ChannelParams`] that bound every power profile.
///
/// * `inr2 = h12_sq * snr1` — interference the active primary inflicts on the
///   secondary receiver.
/// * `inr_c = inr_gap / h21_sq` — per-slot cap on total secondary power while
///   the primary is (believed) active, protecting the primary receiver.
/// * `sic_c = h12_sq * (inr_gap + 1) - 1` — cap on the Layer-2 power that
///   keeps the primary codeword decodable at the secondary receiver before
///   Layer 2 is decoded. May be negative, in which case no Layer-2 power is
///   allowed at all.
/// * `sic_prime_c = sic_c + beta * inr2` — the `SIC_C` threshold shifted by
///   the primary's on-fraction, used by the genie allocation's branch
///   conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedLimits {
    /// `INR_2 = h12_sq * snr1`, always >= 0.
    pub inr2: f64,
    /// `INR_C = inr_gap / h21_sq`, always >= 0.
    pub inr_c: f64,
    /// `SIC_C = h12_sq * (inr_gap + 1) - 1`, always >= -1.
    pub sic_c: f64,
    /// `SIC'_C = SIC_C + beta * INR_2` for the `beta` given at derivation.
    pub sic_prime_c: f64,
}

impl DerivedLimits {
    /// The Layer-2 power cap actually usable in a slot:
    /// `min(max(SIC_C, 0), INR_C)`.
    #[inline]
    pub fn layer2_cap(&self) -> f64 {
        self.sic_c.max(0.0).min(self.inr_c)
    }
}

/// Computes [`DerivedLimits`] from the channel parameters and the primary's
/// long-run on-fraction `beta`.
///
/// # Errors
///
/// `InvalidParameter` when `h21_sq = 0` (INR_C would divide by zero) or when
/// `beta` is outside `[0, 1]`; `InvalidScenario` when `p` fails validation.
pub fn derive_limits(p: &ChannelParams, beta: f64) -> Result<DerivedLimits> {
    p.validate()?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    if p.h21_sq == 0.0 {
        return Err(Error::InvalidParameter(
            "h21_sq must be > 0 to form INR_C = inr_gap / h21_sq".into(),
        ));
    }
    let inr2 = p.h12_sq * p.snr1;
    let sic_c = p.h12_sq * (p.inr_gap + 1.0) - 1.0;
    Ok(DerivedLimits {
        inr2,
        inr_c: p.inr_gap / p.h21_sq,
        sic_c,
        sic_prime_c: sic_c + beta * inr2,
    })
}

/// Block activity model of the primary.
///
/// A block has `T + 1` slots indexed `0..=T`; slot 0 is reserved for sensing
/// and carries no secondary data or power. The primary starts the block in
/// state `s0` (0 = off, 1 = on) drawn from `(pi0, pi1)` and flips its state
/// exactly once, at slot `tau` drawn from the pmf `f` over `1..=T+1`;
/// `tau = T + 1` encodes "no switch within the block".
///
/// The switch-time pmf is shared by both starting states; a per-state pair
/// would be a straightforward extension but is not modeled.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    t_len: usize,
    pi0: f64,
    pi1: f64,
    f: Vec<f64>,
    /// `cdf[i] = F_T(i + 1) = sum of f over tau <= i + 1`, cached.
    cdf: Vec<f64>,
}

impl TrafficModel {
    /// Builds a model from block length `T`, start-state prior, and a pmf of
    /// length `T + 1` over switch times `1..=T+1`.
    ///
    /// Entries of `f` below `1e-15` are snapped to exactly zero.
    ///
    /// # Errors
    ///
    /// `InvalidScenario` when `T = 0`, the prior does not sum to one within
    /// `1e-12`, `f` has the wrong length, any entry is negative, or `f` does
    /// not sum to one within `1e-12`.
    pub fn new(t_len: usize, pi0: f64, pi1: f64, f: Vec<f64>) -> Result<Self> {
        if t_len == 0 {
            return Err(Error::InvalidScenario("T must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&pi0) || !(0.0..=1.0).contains(&pi1) {
            return Err(Error::InvalidScenario(format!(
                "start-state prior must lie in [0, 1], got pi0={pi0}, pi1={pi1}"
            )));
        }
        if (pi0 + pi1 - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidScenario(format!(
                "pi0 + pi1 must equal 1 within {PROB_TOL}, got {}",
                pi0 + pi1
            )));
        }
        if f.len() != t_len + 1 {
            return Err(Error::InvalidScenario(format!(
                "f must have T + 1 = {} entries, got {}",
                t_len + 1,
                f.len()
            )));
        }
        let f: Vec<f64> = f
            .into_iter()
            .map(|v| if v.abs() < PMF_EPS { 0.0 } else { v })
            .collect();
        if f.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidScenario(
                "f entries must be finite and >= 0".into(),
            ));
        }
        let total: f64 = f.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidScenario(format!(
                "f must sum to 1 within {PROB_TOL}, got {total}"
            )));
        }
        let mut cdf = Vec::with_capacity(f.len());
        let mut acc = 0.0;
        for &v in &f {
            acc += v;
            cdf.push(acc.min(1.0));
        }
        Ok(Self { t_len, pi0, pi1, f, cdf })
    }

    /// Uniform switch-time pmf over `1..=T+1`.
    pub fn uniform(t_len: usize, pi0: f64, pi1: f64) -> Result<Self> {
        let p = 1.0 / (t_len + 1) as f64;
        Self::new(t_len, pi0, pi1, vec![p; t_len + 1])
    }

    /// Point-mass switch-time pmf at `tau` (use `tau = T + 1` for a primary
    /// that never switches within the block).
    pub fn point_mass(t_len: usize, pi0: f64, pi1: f64, tau: usize) -> Result<Self> {
        if tau < 1 || tau > t_len + 1 {
            return Err(Error::InvalidScenario(format!(
                "point-mass tau must lie in 1..={}, got {tau}",
                t_len + 1
            )));
        }
        let mut f = vec![0.0; t_len + 1];
        f[tau - 1] = 1.0;
        Self::new(t_len, pi0, pi1, f)
    }

    /// Block length `T`: the number of data slots (the block itself spans
    /// `T + 1` slots including the sensing slot).
    #[inline]
    pub fn t_len(&self) -> usize {
        self.t_len
    }

    /// Probability the block starts with the primary off.
    #[inline]
    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    /// Probability the block starts with the primary on.
    #[inline]
    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    /// Start-state prior as `pi(s)`.
    #[inline]
    pub fn pi(&self, s: u8) -> f64 {
        if s == 0 { self.pi0 } else { self.pi1 }
    }

    /// Switch-time pmf `f_T(tau)` for `tau` in `1..=T+1`.
    #[inline]
    pub fn f(&self, tau: usize) -> f64 {
        assert!(
            (1..=self.t_len + 1).contains(&tau),
            "f: tau must lie in 1..={}, got {tau}",
            self.t_len + 1
        );
        self.f[tau - 1]
    }

    /// Switch-time cdf `F_T(t) = sum of f over tau <= t` for a data slot
    /// `t` in `1..=T`. Non-decreasing in `t` and `F_T(T) <= 1`.
    ///
    /// # Panics
    ///
    /// Panics when `t` is outside `1..=T`.
    #[inline]
    pub fn state_cdf(&self, t: usize) -> f64 {
        assert!(
            (1..=self.t_len).contains(&t),
            "state_cdf: slot must lie in 1..={}, got {t}",
            self.t_len
        );
        self.cdf[t - 1]
    }

    /// `beta_s(t) = P(s_t = 1 | s_0 = s)`: the probability the primary is on
    /// in data slot `t` given the starting state.
    ///
    /// `beta_0(t) = F_T(t)` (an off-start primary has switched on by `t` iff
    /// `tau <= t`) and `beta_1(t) = 1 - F_T(t)`.
    ///
    /// # Panics
    ///
    /// Panics when `s0 > 1` or `t` is outside `1..=T`.
    #[inline]
    pub fn beta_s(&self, s0: u8, t: usize) -> f64 {
        assert!(s0 <= 1, "beta_s: state must be 0 or 1, got {s0}");
        let ft = self.state_cdf(t);
        if s0 == 0 { ft } else { 1.0 - ft }
    }

    /// `1 - beta_s(t)`: the probability the primary is off in slot `t`.
    #[inline]
    pub fn beta_bar_s(&self, s0: u8, t: usize) -> f64 {
        1.0 - self.beta_s(s0, t)
    }

    /// The block-model-implied long-run on-fraction
    /// `(1/T) sum_t [pi(0) beta_0(t) + pi(1) beta_1(t)]`, in `[0, 1]`.
    ///
    /// The closed-form schemes take their on-fraction `beta` as an explicit
    /// input; this is the consistency diagnostic tying that input back to
    /// `(pi, f)`, and the default when a scenario omits `beta`.
    pub fn long_run_on_fraction(&self) -> f64 {
        let t_len = self.t_len as f64;
        (1..=self.t_len)
            .map(|t| self.pi0 * self.beta_s(0, t) + self.pi1 * self.beta_s(1, t))
            .sum::<f64>()
            / t_len
    }
}

/// Sensing channel: probabilities of missed detection
/// `P_M = P(sensed 0 | actual 1)` and false alarm `P_F = P(sensed 1 | actual 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingModel {
    /// Missed-detection probability, in `[0, 1]`.
    pub p_m: f64,
    /// False-alarm probability, in `[0, 1]`.
    pub p_f: f64,
}

impl SensingModel {
    /// Error-free sensing (`P_M = P_F = 0`).
    pub const PERFECT: SensingModel = SensingModel { p_m: 0.0, p_f: 0.0 };

    /// Checks both probabilities lie in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_m", self.p_m), ("p_f", self.p_f)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidScenario(format!(
                    "sensing.{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `P(sensed = s_hat | actual = s)`.
    #[inline]
    pub fn p_sensed_given_actual(&self, s_hat: u8, s: u8) -> f64 {
        match (s, s_hat) {
            (0, 0) => 1.0 - self.p_f,
            (0, 1) => self.p_f,
            (1, 0) => self.p_m,
            (1, 1) => 1.0 - self.p_m,
            _ => panic!("states must be 0 or 1, got s={s}, s_hat={s_hat}"),
        }
    }
}

/// Switch-time pmf family named in a scenario file, used instead of a raw
/// array when a sweep must regenerate the pmf for different block lengths.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FFamilySpec {
    /// `"uniform"` or `"point_mass"`.
    pub name: String,
    /// Switch slot for `point_mass`; `0` (or omitted) means `T + 1`
    /// ("never switches").
    #[serde(default)]
    pub tau: Option<usize>,
}

impl FFamilySpec {
    /// Instantiates the family for block length `t_len`.
    pub fn build(&self, t_len: usize, pi0: f64, pi1: f64) -> Result<TrafficModel> {
        match self.name.as_str() {
            "uniform" => TrafficModel::uniform(t_len, pi0, pi1),
            "point_mass" => {
                let tau = match self.tau {
                    None | Some(0) => t_len + 1,
                    Some(tau) => tau,
                };
                TrafficModel::point_mass(t_len, pi0, pi1, tau)
            }
            other => Err(Error::InvalidScenario(format!(
                "unknown f_family \"{other}\" (expected \"uniform\" or \"point_mass\")"
            ))),
        }
    }
}

/// Traffic section of a scenario file: block length, start-state prior, and
/// either a raw pmf (`f`) or a named family (`f_family`), exactly one of the
/// two.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSpec {
    /// Block length `T`.
    #[serde(rename = "T")]
    pub t_len: usize,
    /// Probability the block starts with the primary off; `pi1 = 1 - pi0`.
    pub pi0: f64,
    /// Raw switch-time pmf of length `T + 1`.
    #[serde(default)]
    pub f: Option<Vec<f64>>,
    /// Named pmf family, required when sweeping `T`.
    #[serde(default)]
    pub f_family: Option<FFamilySpec>,
}

impl TrafficSpec {
    /// Builds the [`TrafficModel`] at the declared block length.
    pub fn build(&self) -> Result<TrafficModel> {
        self.build_with_t(self.t_len)
    }

    /// Builds the model at an overridden block length, as sweeps over `T`
    /// require. Raw-pmf scenarios cannot be re-lengthened.
    pub fn build_with_t(&self, t_len: usize) -> Result<TrafficModel> {
        if !(0.0..=1.0).contains(&self.pi0) {
            return Err(Error::InvalidScenario(format!(
                "traffic.pi0 must lie in [0, 1], got {}",
                self.pi0
            )));
        }
        let pi1 = 1.0 - self.pi0;
        match (&self.f, &self.f_family) {
            (Some(_), Some(_)) => Err(Error::InvalidScenario(
                "traffic must declare exactly one of \"f\" and \"f_family\", got both".into(),
            )),
            (None, None) => Err(Error::InvalidScenario(
                "traffic must declare one of \"f\" (raw pmf) or \"f_family\"".into(),
            )),
            (Some(f), None) => {
                if t_len != self.t_len {
                    return Err(Error::InvalidScenario(
                        "sweeping T requires \"f_family\" in the scenario; a raw \"f\" array \
                         cannot follow a changing block length"
                            .into(),
                    ));
                }
                TrafficModel::new(t_len, self.pi0, pi1, f.clone())
            }
            (None, Some(family)) => family.build(t_len, self.pi0, pi1),
        }
    }
}

/// A parsed scenario file.
///
/// Top-level JSON keys: `"channel"`, `"traffic"`, `"sensing"`, and an optional
/// explicit `"beta"` (long-run on-fraction). Unknown keys are rejected at
/// every level.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub channel: ChannelParams,
    pub traffic: TrafficSpec,
    pub sensing: SensingModel,
    /// Explicit long-run on-fraction; when absent, the traffic-implied
    /// [`TrafficModel::long_run_on_fraction`] is used.
    #[serde(default)]
    pub beta: Option<f64>,
}

impl Scenario {
    /// Parses a scenario from JSON text.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    /// Loads and parses a scenario file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Validates every section (including building the traffic model once).
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.sensing.validate()?;
        self.traffic.build()?;
        if let Some(beta) = self.beta {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::InvalidScenario(format!(
                    "beta must lie in [0, 1], got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// The on-fraction to use for the closed-form schemes: the explicit
    /// `beta` when present, otherwise the traffic-implied value.
    pub fn resolved_beta(&self, traffic: &TrafficModel) -> f64 {
        self.beta.unwrap_or_else(|| traffic.long_run_on_fraction())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn reference_params() -> ChannelParams {
        ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 }
    }

    #[test]
    fn cap_known_values() {
        assert_eq!(cap(0.0), 0.0);
        assert!((cap(7.0) - 1.5).abs() < EPS, "C(7) = (1/2) log2 8");
        assert!((cap(1.0) - 0.5).abs() < EPS, "C(1) = (1/2) log2 2");
    }

    #[test]
    #[should_panic(expected = "cap: SNR must be finite")]
    fn cap_rejects_negative() {
        cap(-0.5);
    }

    #[test]
    fn cap_is_concave() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: f64 = rng.random::<f64>() * 50.0;
            let y: f64 = rng.random::<f64>() * 50.0;
            assert!(
                cap(0.5 * (x + y)) + EPS >= 0.5 * (cap(x) + cap(y)),
                "midpoint concavity failed at x={x}, y={y}"
            );
        }
    }

    #[test]
    fn derive_limits_reference_scenario() {
        let lim = derive_limits(&reference_params(), 0.5).unwrap();
        assert!((lim.inr2 - 3.5).abs() < EPS);
        assert!((lim.inr_c - 7.0).abs() < EPS);
        assert!((lim.sic_c - 1.25).abs() < EPS);
        assert!((lim.sic_prime_c - 3.0).abs() < EPS);
        // Symbolic recomputation of each defining formula.
        let p = reference_params();
        assert_eq!(lim.inr2, p.h12_sq * p.snr1);
        assert_eq!(lim.inr_c, p.inr_gap / p.h21_sq);
        assert_eq!(lim.sic_c, p.h12_sq * (p.inr_gap + 1.0) - 1.0);
        assert_eq!(lim.sic_prime_c, lim.sic_c + 0.5 * lim.inr2);
    }

    #[test]
    fn derive_limits_zero_gap_and_negative_sic() {
        let p = ChannelParams { snr1: 3.0, snr2: 1.0, h12_sq: 0.7, h21_sq: 0.9, inr_gap: 0.0 };
        let lim = derive_limits(&p, 0.3).unwrap();
        assert_eq!(lim.inr_c, 0.0);
        assert!((lim.sic_c - (0.7 - 1.0)).abs() < EPS);

        let p = ChannelParams { snr1: 3.0, snr2: 1.0, h12_sq: 0.1, h21_sq: 0.9, inr_gap: 1.0 };
        let lim = derive_limits(&p, 0.3).unwrap();
        assert!((lim.sic_c - (-0.8)).abs() < EPS, "negative SIC_C is allowed");
    }

    #[test]
    fn derive_limits_rejects_zero_h21() {
        let p = ChannelParams { snr1: 1.0, snr2: 1.0, h12_sq: 0.5, h21_sq: 0.0, inr_gap: 1.0 };
        assert!(derive_limits(&p, 0.5).is_err());
    }

    #[test]
    fn state_cdf_examples() {
        let uniform = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        assert!((uniform.state_cdf(3) - 3.0 / 11.0).abs() < EPS);

        let never = TrafficModel::point_mass(10, 0.5, 0.5, 11).unwrap();
        for t in 1..=10 {
            assert_eq!(never.state_cdf(t), 0.0, "no mass below T + 1");
        }

        let immediate = TrafficModel::point_mass(3, 0.5, 0.5, 1).unwrap();
        assert_eq!(immediate.state_cdf(1), 1.0);
    }

    #[test]
    #[should_panic(expected = "state_cdf: slot must lie in")]
    fn state_cdf_rejects_out_of_range() {
        TrafficModel::uniform(5, 0.5, 0.5).unwrap().state_cdf(6);
    }

    #[test]
    fn beta_s_examples_and_complement() {
        let uniform = TrafficModel::uniform(10, 0.5, 0.5).unwrap();
        assert!((uniform.beta_s(0, 3) - 3.0 / 11.0).abs() < EPS);
        assert!((uniform.beta_s(1, 3) - 8.0 / 11.0).abs() < EPS);

        let never = TrafficModel::point_mass(10, 0.5, 0.5, 11).unwrap();
        for t in 1..=10 {
            assert_eq!(never.beta_s(1, t), 1.0, "primary never switches off");
        }

        // beta_0(t) + beta_1(t) = 1 exactly, and the cdf is monotone.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let t_len = rng.random_range(1..=20);
            let traffic = random_traffic(&mut rng, t_len);
            let mut prev = 0.0;
            for t in 1..=t_len {
                assert_eq!(traffic.beta_s(0, t) + traffic.beta_s(1, t), 1.0);
                assert!(traffic.state_cdf(t) >= prev - EPS, "cdf must be non-decreasing");
                prev = traffic.state_cdf(t);
            }
        }
    }

    #[test]
    fn long_run_on_fraction_examples() {
        let always_on = TrafficModel::point_mass(10, 0.0, 1.0, 11).unwrap();
        assert_eq!(always_on.long_run_on_fraction(), 1.0);

        let always_off = TrafficModel::point_mass(10, 1.0, 0.0, 11).unwrap();
        assert_eq!(always_off.long_run_on_fraction(), 0.0);

        // With a fair prior the per-slot mixture is exactly 1/2 for any pmf.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let t_len = rng.random_range(1..=15);
            let traffic = random_traffic_with_prior(&mut rng, t_len, 0.5);
            assert!((traffic.long_run_on_fraction() - 0.5).abs() < EPS);
        }
    }

    /// Expectation over the switch slot of split partial sums equals the
    /// cdf-weighted per-slot sum: for any positive rho_1..rho_T, a, b,
    ///
    /// sum_j f(j) [ sum_{i<j} C(rho_i/a) + sum_{i>=j} C(rho_i/b) ]
    ///   = sum_i [ (1 - F(i)) C(rho_i/a) + F(i) C(rho_i/b) ].
    #[test]
    fn summation_order_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let t_len = rng.random_range(1..=12);
            let traffic = random_traffic(&mut rng, t_len);
            let a = 0.1 + rng.random::<f64>() * 5.0;
            let b = 0.1 + rng.random::<f64>() * 5.0;
            let rho: Vec<f64> =
                (0..t_len).map(|_| rng.random::<f64>() * 10.0).collect();

            let mut lhs = 0.0;
            for j in 1..=t_len + 1 {
                let mut inner = 0.0;
                for (i, &r) in rho.iter().enumerate() {
                    let slot = i + 1;
                    inner += if slot < j { cap(r / a) } else { cap(r / b) };
                }
                lhs += traffic.f(j) * inner;
            }

            let rhs: f64 = rho
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let ft = traffic.state_cdf(i + 1);
                    (1.0 - ft) * cap(r / a) + ft * cap(r / b)
                })
                .sum();

            assert!(
                (lhs - rhs).abs() < 1e-12,
                "summation-order identity violated: lhs={lhs}, rhs={rhs}"
            );
        }
    }

    #[test]
    fn scenario_round_trip_and_defaults() {
        let text = r#"{
            "channel": {"snr1": 7.0, "snr2": 7.0, "h12_sq": 0.5, "h21_sq": 0.5, "inr_gap": 3.5},
            "traffic": {"T": 10, "pi0": 0.5, "f_family": {"name": "uniform"}},
            "sensing": {"p_m": 0.0, "p_f": 0.0}
        }"#;
        let sc = Scenario::from_json_str(text).unwrap();
        let traffic = sc.traffic.build().unwrap();
        assert_eq!(traffic.t_len(), 10);
        assert!((sc.resolved_beta(&traffic) - 0.5).abs() < EPS, "fair prior implies beta 1/2");

        let with_beta = r#"{
            "channel": {"snr1": 7.0, "snr2": 7.0, "h12_sq": 0.5, "h21_sq": 0.5, "inr_gap": 3.5},
            "traffic": {"T": 2, "pi0": 0.5, "f": [0.25, 0.25, 0.5]},
            "sensing": {"p_m": 0.1, "p_f": 0.2},
            "beta": 0.7
        }"#;
        let sc = Scenario::from_json_str(with_beta).unwrap();
        let traffic = sc.traffic.build().unwrap();
        assert_eq!(sc.resolved_beta(&traffic), 0.7);
    }

    #[test]
    fn scenario_rejects_unknown_keys_and_bad_pmf() {
        let unknown = r#"{
            "channel": {"snr1": 1, "snr2": 1, "h12_sq": 0.5, "h21_sq": 0.5, "inr_gap": 1, "bogus": 3},
            "traffic": {"T": 2, "pi0": 0.5, "f": [0.5, 0.25, 0.25]},
            "sensing": {"p_m": 0, "p_f": 0}
        }"#;
        assert!(matches!(Scenario::from_json_str(unknown), Err(Error::ScenarioParse(_))));

        let bad_pmf = r#"{
            "channel": {"snr1": 1, "snr2": 1, "h12_sq": 0.5, "h21_sq": 0.5, "inr_gap": 1},
            "traffic": {"T": 2, "pi0": 0.5, "f": [0.5, 0.25, 0.5]},
            "sensing": {"p_m": 0, "p_f": 0}
        }"#;
        assert!(matches!(Scenario::from_json_str(bad_pmf), Err(Error::InvalidScenario(_))));

        let both_f = r#"{
            "channel": {"snr1": 1, "snr2": 1, "h12_sq": 0.5, "h21_sq": 0.5, "inr_gap": 1},
            "traffic": {"T": 2, "pi0": 0.5, "f": [0.5, 0.25, 0.25], "f_family": {"name": "uniform"}},
            "sensing": {"p_m": 0, "p_f": 0}
        }"#;
        assert!(Scenario::from_json_str(both_f).is_err());
    }

    /// Random valid pmf over 1..=T+1 (dirichlet-ish via normalized uniforms).
    fn random_traffic(rng: &mut ChaCha8Rng, t_len: usize) -> TrafficModel {
        let pi0: f64 = rng.random();
        random_traffic_with_prior(rng, t_len, pi0)
    }

    fn random_traffic_with_prior(
        rng: &mut ChaCha8Rng,
        t_len: usize,
        pi0: f64,
    ) -> TrafficModel {
        let raw: Vec<f64> = (0..t_len + 1).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let f: Vec<f64> = raw.into_iter().map(|v| v / total).collect();
        TrafficModel::new(t_len, pi0, 1.0 - pi0, f).unwrap()
    }
}

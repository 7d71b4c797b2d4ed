//! Independent brute-force and first-order reference solvers.
//!
//! Nothing here reuses the closed forms under test: [`grid_genie`] and
//! [`grid_alpha`] are exhaustive grid searches with window refinement, and
//! [`projected_gradient_profile`] is an accelerated projected-gradient ascent
//! whose only shared ingredient is the rate formula itself. The module also
//! houses [`analytic_gradient`] (checked against finite differences) and the
//! random instance generators used by the validation suites.
//!
//! ```
//! use cograte_core::model::{derive_limits, ChannelParams};
//! use cograte_core::oracle::{grid_genie, GridSpec};
//!
//! let p = ChannelParams { snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5 };
//! let lim = derive_limits(&p, 0.5).unwrap();
//! let (_, rate) = grid_genie(&lim, 7.0, 0.5, &GridSpec::default()).unwrap();
//! assert!((rate - 1.3043).abs() < 1e-3);
//! ```

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    cap, derive_limits, ChannelParams, DerivedLimits, SensingModel, TrafficModel,
};
use crate::sense_opt::{gh_coefficients, row_weight, PowerProfile};

/// Tuning knobs for the reference solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Base grid resolution in the searched variable's units.
    pub step: f64,
    /// Iteration cap for gradient ascent.
    pub max_iters: usize,
    /// Initial gradient-ascent step size (adapted by backtracking).
    pub ascent_step: f64,
    /// Convergence tolerance on the rate.
    pub tol: f64,
}

impl Default for GridSpec {
    /// Power-grid defaults: 0.02 resolution, 1e5 ascent iterations, 1e-8 tolerance.
    fn default() -> Self {
        GridSpec { step: 0.02, max_iters: 100_000, ascent_step: 0.5, tol: 1e-8 }
    }
}

impl GridSpec {
    /// Defaults for 1-D searches over a fraction (step 1e-4).
    pub fn one_dim() -> Self {
        GridSpec { step: 1e-4, ..GridSpec::default() }
    }

    /// Checks the type invariants (`step > 0`, `tol > 0`).
    pub fn validate(&self) -> Result<()> {
        // Written positively so NaN fails the check too.
        let ok = self.step > 0.0 && self.tol > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "grid spec needs step > 0 and tol > 0, got step={}, tol={}",
                self.step, self.tol
            )));
        }
        Ok(())
    }
}

/// Inclusive evenly spaced grid; collapses to a single point when the range
/// is empty.
fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if hi <= lo || points < 2 {
        return vec![lo];
    }
    let n = points - 1;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Point count implied by a step over a range, clamped to `[2, cap]`.
fn grid_points(range: f64, step: f64, cap: usize) -> usize {
    if range <= 0.0 {
        return 1;
    }
    (((range / step).ceil() as usize).saturating_add(1)).clamp(2, cap)
}

/// Exhaustive grid maximization of the genie objective
/// `beta_bar C(rho0) + beta [C(rho1n/(1+INR2+rho1s)) + C(rho1s)]` over the
/// feasible set, independent of the closed form.
///
/// The search walks the budget-tight slice (the objective strictly increases
/// in `rho0`, so on-state slack is always pushed to the off state): for each
/// total on-state power `u = rho1n + rho1s` in `[0, min(INR_C, SNR2/beta)]`,
/// `rho0 = (SNR2 - beta u) / beta_bar`, and the Layer split `s` is gridded
/// over `[0, min(max(SIC_C, 0), u)]`. Six window-refinement passes shrink the
/// grid around the incumbent (the slice objective is concave in `u` and
/// unimodal in `s`), so the returned rate is far more accurate than the base
/// resolution. The feasible set is never empty — the origin always qualifies.
///
/// `beta = 1` pins `rho0 = 0` and grids `u` over `[0, min(INR_C, SNR2)]`.
///
/// # Errors
///
/// `InvalidParameter` for a malformed spec, negative `snr2`, or `beta`
/// outside `[0, 1]`.
pub fn grid_genie(
    limits: &DerivedLimits,
    snr2: f64,
    beta: f64,
    spec: &GridSpec,
) -> Result<((f64, f64, f64), f64)> {
    spec.validate()?;
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
    let sic_eff = limits.sic_c.max(0.0);
    let inr2 = limits.inr2;
    let beta_bar = 1.0 - beta;
    let u_max = if beta >= 1.0 {
        limits.inr_c.min(snr2)
    } else if beta > 0.0 {
        limits.inr_c.min(snr2 / beta)
    } else {
        limits.inr_c
    };
    let rho0_at = |u: f64| {
        if beta >= 1.0 { 0.0 } else { ((snr2 - beta * u) / beta_bar).max(0.0) }
    };
    // rho1n arrives as u - s, which can round a hair negative at the
    // endpoint s = u; clamp the dust away before the capacity call.
    let value = |rho0: f64, rho1n: f64, rho1s: f64| {
        beta_bar * cap(rho0)
            + beta * (cap(rho1n.max(0.0) / (1.0 + inr2 + rho1s)) + cap(rho1s))
    };

    // Best Layer split for one u, by gridding s with two refinement passes.
    let best_split = |u: f64| -> (f64, f64) {
        let s_max = sic_eff.min(u);
        let mut lo = 0.0;
        let mut hi = s_max;
        let mut best = (0.0, f64::NEG_INFINITY);
        for pass in 0..3 {
            let points = if pass == 0 {
                grid_points(hi - lo, spec.step, 33)
            } else {
                33
            };
            let grid = linspace(lo, hi, points);
            let mut best_idx = 0;
            for (idx, &s) in grid.iter().enumerate() {
                let v = value(rho0_at(u), u - s, s);
                if v > best.1 {
                    best = (s, v);
                    best_idx = idx;
                }
            }
            if grid.len() < 2 {
                break;
            }
            let cell = (hi - lo) / (grid.len() - 1) as f64;
            lo = (grid[best_idx] - 2.0 * cell).max(0.0);
            hi = (grid[best_idx] + 2.0 * cell).min(s_max);
        }
        best
    };

    let mut lo = 0.0;
    let mut hi = u_max;
    let mut incumbent = ((0.0, 0.0, 0.0), f64::NEG_INFINITY);
    for pass in 0..6 {
        let points = if pass == 0 {
            grid_points(hi - lo, spec.step, 193)
        } else {
            193
        };
        let grid = linspace(lo, hi, points);
        let mut best_idx = 0;
        for (idx, &u) in grid.iter().enumerate() {
            let (s, v) = best_split(u);
            if v > incumbent.1 {
                incumbent = ((rho0_at(u), (u - s).max(0.0), s), v);
                best_idx = idx;
            }
        }
        if grid.len() < 2 {
            break;
        }
        let cell = (hi - lo) / (grid.len() - 1) as f64;
        lo = (grid[best_idx] - 2.0 * cell).max(0.0);
        hi = (grid[best_idx] + 2.0 * cell).min(u_max);
    }
    Ok(incumbent)
}

/// Exhaustive 1-D maximization of the no-sensing rate
/// `R2(alpha) = C((1-alpha) P / (1 + INR2 + alpha P)) + C(alpha P)` over the
/// SIC-feasible fractions `alpha in [0, min(1, max(SIC_C, 0)/P)]`, with
/// `P = min(SNR2, INR_C)` and two refinement passes. The exact right
/// endpoint is always evaluated (the optimum sits on the boundary).
///
/// # Errors
///
/// `InvalidParameter` for a malformed spec or negative scalar inputs.
pub fn grid_alpha(
    limits: &DerivedLimits,
    snr1: f64,
    snr2: f64,
    inr_gap: f64,
    spec: &GridSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    for (name, v) in [("snr1", snr1), ("snr2", snr2), ("inr_gap", inr_gap)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
    }
    let p = snr2.min(limits.inr_c);
    if inr_gap <= 0.0 || p <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let a_max = (limits.sic_c.max(0.0) / p).min(1.0);
    let value = |alpha: f64| crate::bounds::no_sensing_rate(alpha, p, limits.inr2);
    let mut lo = 0.0;
    let mut hi = a_max;
    let mut best = (0.0, value(0.0));
    for pass in 0..3 {
        let points = if pass == 0 {
            grid_points(hi - lo, spec.step, 20_001)
        } else {
            101
        };
        let grid = linspace(lo, hi, points);
        let mut best_idx = 0;
        for (idx, &alpha) in grid.iter().enumerate() {
            let v = value(alpha);
            if v > best.1 {
                best = (alpha, v);
                best_idx = idx;
            }
        }
        if grid.len() < 2 {
            break;
        }
        let cell = (hi - lo) / (grid.len() - 1) as f64;
        lo = (grid[best_idx] - cell).max(0.0);
        hi = (grid[best_idx] + cell).min(a_max);
    }
    Ok(best)
}

/// Per-slot values laid out like a profile: two rows indexed by sensed
/// state, each of length `T`.
pub type ProfileRows = [Vec<f64>; 2];

/// Analytic partial derivatives of the average rate with respect to every
/// profile entry, in bits per power unit:
///
/// `dR2/drho_n = k [G/(1+x) + H/(1+INR2+x)]` and
/// `dR2/drho_s = k [G/(1+x) + H (1/(1+INR2+x) - 1/(1+INR2+rho_s) + 1/(1+rho_s))]`
///
/// with `x = rho_n + rho_s`, `k = 1 / (2 ln2 (T+1))`, and the raw occupancy
/// weights `G`, `H` of each `(s_hat, t)`.
///
/// # Errors
///
/// Parameter errors from limit derivation.
pub fn analytic_gradient(
    profile: &PowerProfile,
    params: &ChannelParams,
    traffic: &TrafficModel,
    sensing: &SensingModel,
) -> Result<(ProfileRows, ProfileRows)> {
    let limits = derive_limits(params, 0.0)?;
    let inr2 = limits.inr2;
    let t_len = traffic.t_len();
    let k = 1.0 / (2.0 * std::f64::consts::LN_2 * (t_len as f64 + 1.0));
    let mut grad_n = [vec![0.0; t_len], vec![0.0; t_len]];
    let mut grad_s = [vec![0.0; t_len], vec![0.0; t_len]];
    for s_hat in 0..2 {
        for i in 0..t_len {
            let (g, h) = gh_coefficients(traffic, sensing, s_hat, i + 1);
            let n = profile.rho_n[s_hat][i];
            let s = profile.rho_s[s_hat][i];
            let x = n + s;
            grad_n[s_hat][i] = k * (g / (1.0 + x) + h / (1.0 + inr2 + x));
            grad_s[s_hat][i] = k
                * (g / (1.0 + x)
                    + h * (1.0 / (1.0 + inr2 + x) - 1.0 / (1.0 + inr2 + s)
                        + 1.0 / (1.0 + s)));
        }
    }
    Ok((grad_n, grad_s))
}

/// Lean rate evaluation used inside the ascent loop: same value as
/// [`achievable_rate`] without validation or reporting.
fn profile_rate_raw(
    profile: &PowerProfile,
    inr2: f64,
    traffic: &TrafficModel,
    sensing: &SensingModel,
) -> f64 {
    let t_len = profile.t_len();
    let mut acc = 0.0;
    for s_hat in 0..2 {
        for i in 0..t_len {
            let (g, h) = gh_coefficients(traffic, sensing, s_hat, i + 1);
            let n = profile.rho_n[s_hat][i];
            let s = profile.rho_s[s_hat][i];
            acc += g * cap(n + s) + h * (cap(n / (1.0 + inr2 + s)) + cap(s));
        }
    }
    acc / (t_len as f64 + 1.0)
}

/// Exact Euclidean projection of one `(rho_n, rho_s)` pair onto
/// `{n >= 0, 0 <= s <= s_cap, n + s <= t_cap}`.
fn project_pair(a: f64, b: f64, s_cap: f64, t_cap: f64) -> (f64, f64) {
    let s_hi = s_cap.min(t_cap);
    let boxed = (a.clamp(0.0, t_cap), b.clamp(0.0, s_hi));
    if boxed.0 + boxed.1 <= t_cap {
        // The set is the box intersected with the half-plane; a box
        // projection that already satisfies the cut is the projection.
        return boxed;
    }
    let mut best = (f64::INFINITY, (0.0, 0.0));
    let mut consider = |n: f64, s: f64| {
        let d = (n - a) * (n - a) + (s - b) * (s - b);
        if d < best.0 {
            best = (d, (n, s));
        }
    };
    // Diagonal n + s = t_cap.
    let s_d = ((b - a + t_cap) * 0.5).clamp(0.0, s_hi);
    consider(t_cap - s_d, s_d);
    // Edge s = s_hi.
    consider(a.clamp(0.0, t_cap - s_hi), s_hi);
    // Edge n = 0.
    consider(0.0, b.clamp(0.0, s_hi));
    // Edge s = 0.
    consider(a.clamp(0.0, t_cap), 0.0);
    best.1
}

/// Exact Euclidean projection of a full profile onto the feasible set
/// (per-slot boxes and diagonal cut, plus the weighted budget half-space,
/// handled by bisecting its dual multiplier).
fn project_profile(
    z: &PowerProfile,
    weights: &[f64; 2],
    s_cap: f64,
    t_cap: f64,
    budget: f64,
) -> PowerProfile {
    let t_len = z.t_len();
    let eval = |nu: f64| -> (PowerProfile, f64) {
        let mut out = PowerProfile::zeros(t_len);
        let mut avg = 0.0;
        for s_hat in 0..2 {
            let w = weights[s_hat];
            if w <= 0.0 {
                continue;
            }
            for i in 0..t_len {
                let (n, s) = project_pair(
                    z.rho_n[s_hat][i] - nu * w,
                    z.rho_s[s_hat][i] - nu * w,
                    s_cap,
                    t_cap,
                );
                out.rho_n[s_hat][i] = n;
                out.rho_s[s_hat][i] = s;
                avg += w * (n + s);
            }
        }
        (out, avg)
    };
    let (proj, avg) = eval(0.0);
    if avg <= budget + 1e-12 {
        return proj;
    }
    // Total power is continuous and non-increasing in the multiplier; for a
    // large enough shift every pair collapses to the origin.
    let mut lo = 0.0;
    let mut hi = 1.0;
    while eval(hi).1 > budget {
        hi *= 2.0;
        if hi > 1e15 {
            break;
        }
    }
    let mut out = proj;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (cand, avg) = eval(mid);
        out = cand;
        if (avg - budget).abs() <= 1e-11 * budget.max(1.0) {
            break;
        }
        if avg > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out
}

fn lincomb(a: &PowerProfile, b: &PowerProfile, mom: f64) -> PowerProfile {
    let t_len = a.t_len();
    let mut out = PowerProfile::zeros(t_len);
    for s_hat in 0..2 {
        for i in 0..t_len {
            out.rho_n[s_hat][i] =
                a.rho_n[s_hat][i] + mom * (a.rho_n[s_hat][i] - b.rho_n[s_hat][i]);
            out.rho_s[s_hat][i] =
                a.rho_s[s_hat][i] + mom * (a.rho_s[s_hat][i] - b.rho_s[s_hat][i]);
        }
    }
    out
}

fn clamp_box(z: &mut PowerProfile, s_cap: f64, t_cap: f64) {
    for s_hat in 0..2 {
        for i in 0..z.rho_n[s_hat].len() {
            z.rho_n[s_hat][i] = z.rho_n[s_hat][i].clamp(0.0, t_cap);
            z.rho_s[s_hat][i] = z.rho_s[s_hat][i].clamp(0.0, s_cap.min(t_cap));
        }
    }
}

fn dot_diff(g: &([Vec<f64>; 2], [Vec<f64>; 2]), a: &PowerProfile, b: &PowerProfile) -> f64 {
    let mut acc = 0.0;
    for s_hat in 0..2 {
        for i in 0..a.rho_n[s_hat].len() {
            acc += g.0[s_hat][i] * (a.rho_n[s_hat][i] - b.rho_n[s_hat][i]);
            acc += g.1[s_hat][i] * (a.rho_s[s_hat][i] - b.rho_s[s_hat][i]);
        }
    }
    acc
}

fn dist_sq(a: &PowerProfile, b: &PowerProfile) -> f64 {
    let mut acc = 0.0;
    for s_hat in 0..2 {
        for i in 0..a.rho_n[s_hat].len() {
            acc += (a.rho_n[s_hat][i] - b.rho_n[s_hat][i]).powi(2);
            acc += (a.rho_s[s_hat][i] - b.rho_s[s_hat][i]).powi(2);
        }
    }
    acc
}

/// First-order oracle for the sense-and-send profile problem: accelerated
/// projected-gradient ascent (FISTA-style momentum with monotone restarts
/// and backtracking on the curvature estimate) over the exact feasible set.
/// Shares nothing with the KKT solver except the rate formula.
///
/// Stops when the best rate improves by less than `spec.tol` across a
/// 25-iteration window.
///
/// # Errors
///
/// `NonConvergence` with the best iterate attached when `spec.max_iters` runs
/// out first; parameter errors propagate from limit derivation.
pub fn projected_gradient_profile(
    params: &ChannelParams,
    traffic: &TrafficModel,
    sensing: &SensingModel,
    spec: &GridSpec,
) -> Result<(PowerProfile, f64)> {
    spec.validate()?;
    sensing.validate()?;
    let limits = derive_limits(params, 0.0)?;
    let t_len = traffic.t_len();
    let t_f = t_len as f64;
    let budget = (t_f + 1.0) * params.snr2;
    let s_cap = limits.sic_c.max(0.0);
    let t_cap = limits.inr_c;
    if t_cap <= 0.0 || budget <= 0.0 {
        let profile = PowerProfile::zeros(t_len);
        let rate = profile_rate_raw(&profile, limits.inr2, traffic, sensing);
        return Ok((profile, rate));
    }
    let weights = [row_weight(traffic, sensing, 0), row_weight(traffic, sensing, 1)];

    // Neutral feasible start: uniform total power, half on each layer.
    let x0 = (budget / t_f).min(t_cap);
    let s0 = (x0 * 0.5).min(s_cap);
    let mut z = PowerProfile::zeros(t_len);
    for s_hat in 0..2 {
        if weights[s_hat] > 0.0 {
            z.rho_n[s_hat] = vec![x0 - s0; t_len];
            z.rho_s[s_hat] = vec![s0; t_len];
        }
    }
    let rate = |p: &PowerProfile| profile_rate_raw(p, limits.inr2, traffic, sensing);
    let mut z_prev = z.clone();
    let mut fz = rate(&z);
    let mut best = (fz, z.clone());
    let mut t_mom = 1.0f64;
    let mut l_est = 1.0 / spec.ascent_step.max(1e-6);
    let mut window_mark = fz;
    for iter in 1..=spec.max_iters {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
        let mut y = lincomb(&z, &z_prev, (t_mom - 1.0) / t_next);
        clamp_box(&mut y, s_cap, t_cap);
        let gy = analytic_gradient(&y, params, traffic, sensing)?;
        let fy = rate(&y);
        // Backtrack until the ascent descent-lemma bound holds.
        let mut cand;
        let mut f_cand;
        loop {
            let step = 1.0 / l_est;
            let mut trial = y.clone();
            for s_hat in 0..2 {
                for i in 0..t_len {
                    trial.rho_n[s_hat][i] += step * gy.0[s_hat][i];
                    trial.rho_s[s_hat][i] += step * gy.1[s_hat][i];
                }
            }
            cand = project_profile(&trial, &weights, s_cap, t_cap, budget);
            f_cand = rate(&cand);
            let bound = fy + dot_diff(&gy, &cand, &y) - 0.5 * l_est * dist_sq(&cand, &y);
            if f_cand >= bound - 1e-14 || l_est > 1e14 {
                break;
            }
            l_est *= 2.0;
        }
        l_est = (l_est * 0.95).max(1e-10);
        if f_cand < fz {
            // Momentum overshot a monotone path: restart from the incumbent.
            let gz = analytic_gradient(&z, params, traffic, sensing)?;
            let step = 1.0 / l_est;
            let mut trial = z.clone();
            for s_hat in 0..2 {
                for i in 0..t_len {
                    trial.rho_n[s_hat][i] += step * gz.0[s_hat][i];
                    trial.rho_s[s_hat][i] += step * gz.1[s_hat][i];
                }
            }
            cand = project_profile(&trial, &weights, s_cap, t_cap, budget);
            f_cand = rate(&cand);
            t_mom = 1.0;
        } else {
            t_mom = t_next;
        }
        z_prev = std::mem::replace(&mut z, cand);
        fz = f_cand;
        if fz > best.0 {
            best = (fz, z.clone());
        }
        if iter % 25 == 0 {
            if best.0 - window_mark < spec.tol {
                return Ok((best.1, best.0));
            }
            window_mark = best.0;
        }
    }
    Err(Error::NonConvergence {
        iters: spec.max_iters,
        best_rate: best.0,
        best: Box::new(best.1),
    })
}

/// Random channel/on-fraction draw over the validation ensemble ranges:
/// SNRs in `[0.1, 20]`, squared gains in `[0.05, 2]`, `INR_gap` in
/// `[0, 10]`, `beta` in `[0.05, 0.95]`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> (ChannelParams, f64) {
    let params = ChannelParams {
        snr1: rng.random_range(0.1..=20.0),
        snr2: rng.random_range(0.1..=20.0),
        h12_sq: rng.random_range(0.05..=2.0),
        h21_sq: rng.random_range(0.05..=2.0),
        inr_gap: rng.random_range(0.0..=10.0),
    };
    (params, rng.random_range(0.05..=0.95))
}

/// Random sense-and-send instance: channel as [`random_instance`],
/// `T` drawn from `{2, 5, 10}`, an informative prior `pi0 in [0.2, 0.8]`,
/// a random switch-time pmf, and sensing errors drawn from `{0, 0.2}^2`.
pub fn random_sense_instance<R: Rng + ?Sized>(
    rng: &mut R,
) -> (ChannelParams, TrafficModel, SensingModel) {
    let (params, _) = random_instance(rng);
    let t_len = *[2usize, 5, 10].get(rng.random_range(0..3)).unwrap();
    let pi0 = rng.random_range(0.2..=0.8);
    let raw: Vec<f64> = (0..t_len + 1).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let traffic = TrafficModel::new(
        t_len,
        pi0,
        1.0 - pi0,
        raw.into_iter().map(|v| v / total).collect(),
    )
    .expect("generated pmf is valid");
    let levels = [0.0, 0.2];
    let sensing = SensingModel {
        p_m: levels[rng.random_range(0..2)],
        p_f: levels[rng.random_range(0..2)],
    };
    (params, traffic, sensing)
}

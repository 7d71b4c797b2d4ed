//! Subcommand implementations. Every command returns `Result<(), Failure>`;
//! `main` maps a `Failure` to a stderr line plus its exit code.
//!
//! Exit codes: 0 success, 1 a validation or protection check failed,
//! 2 bad input (unreadable scenario, malformed parameters, unusable
//! flag combination), 3 a solver failed to converge, 4 a statistical
//! alarm (the Monte Carlo interval missed the analytic value).

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cograte_core::bounds::{
    classify_region, genie_power, genie_rate, no_sensing_alpha_star, GenieAllocation,
    GenieRegime, Region,
};
use cograte_core::model::{
    cap, derive_limits, ChannelParams, Scenario, SensingModel, TrafficModel,
};
use cograte_core::oracle::{
    grid_alpha, grid_genie, projected_gradient_profile, random_instance,
    random_sense_instance, GridSpec,
};
use cograte_core::sense_opt::{
    achievable_rate, check_monotone, optimize_profile, ComponentRates, PowerProfile,
    RateReport, Slacks,
};
use cograte_core::simulator::{
    empirical_rate, empirical_state_prob, primary_protection_check, sample_block,
    EmpiricalStateProb, ProtectionReport, RateEstimate, SimConfig,
};
use cograte_core::Error;

use crate::emit;
use crate::{Level, Scheme, Variable};

/// A command failure: message for stderr plus the process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    pub fn statistical(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

/// Maps a core error to the exit-code taxonomy: infeasibility is a failed
/// validation (1), non-convergence is a solver failure (3), everything else
/// is bad input (2).
fn core_failure(err: &Error) -> Failure {
    match err {
        Error::NonConvergence { .. } => Failure::solver(err.to_string()),
        Error::InfeasibleProfile(_) => Failure::validation(err.to_string()),
        _ => Failure::input(err.to_string()),
    }
}

fn load_scenario(path: &Path) -> Result<(Scenario, TrafficModel), Failure> {
    let scenario = Scenario::load(path).map_err(|e| {
        Failure::input(format!("cannot load scenario `{}`: {e}", path.display()))
    })?;
    let traffic = scenario.traffic.build().map_err(|e| core_failure(&e))?;
    Ok((scenario, traffic))
}

/// `R1 = beta * C(SNR1 / (1 + INR_gap))` — the primary's guaranteed rate.
fn primary_rate(params: &ChannelParams, beta: f64) -> f64 {
    beta * cap(params.snr1 / (1.0 + params.inr_gap))
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

/// JSON report of a single solve. Fields that a scheme does not define are
/// explicit nulls.
#[derive(Serialize)]
struct SolveReport<'a> {
    scheme: &'a str,
    /// Long-run on-fraction used by the closed-form schemes.
    beta: f64,
    /// Primary rate `beta * C(SNR1 / (1 + INR_gap))`.
    r1: f64,
    /// Secondary rate of the scheme (bits per slot; the sensing schemes
    /// include the `1/(T+1)` overhead, genie and no-sensing do not).
    rate: f64,
    converged: bool,
    // Genie-only fields.
    regime: Option<GenieRegime>,
    allocation: Option<GenieAllocation>,
    // No-sensing-only fields.
    region: Option<Region>,
    alpha_star: Option<f64>,
    // Sense-and-send-only fields.
    lambda: Option<f64>,
    slacks: Option<Slacks>,
    components: Option<ComponentRates>,
    warnings: Vec<String>,
}

/// Flat per-slot profile used to export the genie and no-sensing schemes in
/// the same CSV shape as the sense-and-send solvers.
fn flat_profile(t_len: usize, rows: [(f64, f64); 2]) -> PowerProfile {
    PowerProfile {
        rho_n: [vec![rows[0].0; t_len], vec![rows[1].0; t_len]],
        rho_s: [vec![rows[0].1; t_len], vec![rows[1].1; t_len]],
    }
}

fn profile_csv_records(profile: &PowerProfile) -> Vec<Vec<String>> {
    let mut records = vec![vec![
        "sensed_state".to_string(),
        "slot".to_string(),
        "rho_n".to_string(),
        "rho_s".to_string(),
    ]];
    for s_hat in 0..2 {
        for i in 0..profile.t_len() {
            records.push(vec![
                s_hat.to_string(),
                (i + 1).to_string(),
                emit::sig(profile.rho_n[s_hat][i]),
                emit::sig(profile.rho_s[s_hat][i]),
            ]);
        }
    }
    records
}

pub fn cmd_solve(
    scenario_path: &Path,
    scheme: Scheme,
    out: Option<&Path>,
    profile_out: Option<&Path>,
) -> Result<(), Failure> {
    let (scenario, traffic) = load_scenario(scenario_path)?;
    let params = &scenario.channel;
    let beta = scenario.resolved_beta(&traffic);
    let t_len = traffic.t_len();

    let mut report = SolveReport {
        scheme: scheme.name(),
        beta,
        r1: primary_rate(params, beta),
        rate: f64::NAN,
        converged: true,
        regime: None,
        allocation: None,
        region: None,
        alpha_star: None,
        lambda: None,
        slacks: None,
        components: None,
        warnings: Vec::new(),
    };
    let profile: PowerProfile;
    let mut deferred: Option<Failure> = None;

    match scheme {
        Scheme::Genie => {
            let limits = derive_limits(params, beta).map_err(|e| core_failure(&e))?;
            let alloc =
                genie_power(&limits, params.snr2, beta).map_err(|e| core_failure(&e))?;
            report.rate = genie_rate(&alloc, &limits, beta);
            report.regime = Some(alloc.regime);
            report.allocation = Some(alloc);
            profile = flat_profile(t_len, [(alloc.rho0, 0.0), (alloc.rho1n, alloc.rho1s)]);
        }
        Scheme::Perfect | Scheme::Noisy => {
            let sensing = if scheme == Scheme::Perfect {
                SensingModel::PERFECT
            } else {
                scenario.sensing
            };
            match optimize_profile(params, &traffic, &sensing) {
                Ok((prof, rate_report)) => {
                    fill_sense_report(&mut report, &rate_report);
                    profile = prof;
                }
                Err(Error::NonConvergence { iters, best_rate, best }) => {
                    report.converged = false;
                    report.rate = best_rate;
                    report.warnings.push(format!(
                        "solver stopped after {iters} iterations without converging; \
                         reporting the best iterate found"
                    ));
                    if let Ok(rate_report) =
                        achievable_rate(&best, params, &traffic, &sensing)
                    {
                        report.slacks = Some(rate_report.slacks);
                        report.components = Some(rate_report.components);
                    }
                    profile = *best;
                    deferred = Some(Failure::solver(format!(
                        "{} solver did not converge after {iters} iterations \
                         (best rate {best_rate}); report written with converged=false",
                        scheme.name()
                    )));
                }
                Err(e) => return Err(core_failure(&e)),
            }
        }
        Scheme::Nosense => {
            let limits = derive_limits(params, 0.0).map_err(|e| core_failure(&e))?;
            let res = no_sensing_alpha_star(&limits, params.snr1, params.snr2, params.inr_gap)
                .map_err(|e| core_failure(&e))?;
            report.rate = res.rate;
            report.region = Some(res.region);
            report.alpha_star = Some(res.alpha_star);
            let p = params.snr2.min(limits.inr_c);
            let row = ((1.0 - res.alpha_star) * p, res.alpha_star * p);
            profile = flat_profile(t_len, [row, row]);
        }
    }

    emit::write_json(out, &report)?;
    if let Some(path) = profile_out {
        emit::write_csv(Some(path), &profile_csv_records(&profile))?;
    }
    match deferred {
        Some(failure) => Err(failure),
        None => Ok(()),
    }
}

fn fill_sense_report(report: &mut SolveReport, rate_report: &RateReport) {
    report.rate = rate_report.r2;
    report.lambda = rate_report.lambda;
    report.slacks = Some(rate_report.slacks);
    report.components = Some(rate_report.components);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Rate of one scheme on one (already modified) scenario point.
fn scheme_rate(
    scheme: Scheme,
    scenario: &Scenario,
    traffic: &TrafficModel,
) -> Result<f64, Error> {
    let params = &scenario.channel;
    match scheme {
        Scheme::Genie => {
            let beta = scenario.resolved_beta(traffic);
            let limits = derive_limits(params, beta)?;
            let alloc = genie_power(&limits, params.snr2, beta)?;
            Ok(genie_rate(&alloc, &limits, beta))
        }
        Scheme::Perfect => {
            optimize_profile(params, traffic, &SensingModel::PERFECT).map(|(_, r)| r.r2)
        }
        Scheme::Noisy => {
            optimize_profile(params, traffic, &scenario.sensing).map(|(_, r)| r.r2)
        }
        Scheme::Nosense => {
            let limits = derive_limits(params, 0.0)?;
            no_sensing_alpha_star(&limits, params.snr1, params.snr2, params.inr_gap)
                .map(|r| r.rate)
        }
    }
}

/// Applies one sweep value to a scenario clone; rebuilds the traffic model
/// when the block length changes.
fn apply_variable(
    scenario: &mut Scenario,
    traffic: &mut TrafficModel,
    variable: Variable,
    value: f64,
) -> Result<(), Error> {
    match variable {
        Variable::InrGap => scenario.channel.inr_gap = value,
        Variable::Inr2 => scenario.channel.h12_sq = value / scenario.channel.snr1,
        Variable::T => {
            let t_len = value.round().max(1.0) as usize;
            *traffic = scenario.traffic.build_with_t(t_len)?;
        }
        Variable::Beta => scenario.beta = Some(value),
        Variable::PM => scenario.sensing.p_m = value,
        Variable::PF => scenario.sensing.p_f = value,
    }
    Ok(())
}

pub fn cmd_sweep(
    scenario_path: &Path,
    variable: Variable,
    start: f64,
    stop: f64,
    points: usize,
    schemes: &[Scheme],
    out: Option<&Path>,
) -> Result<(), Failure> {
    if schemes.is_empty() {
        return Err(Failure::input("--schemes must name at least one scheme"));
    }
    if points < 2 {
        return Err(Failure::input(format!("--points must be >= 2, got {points}")));
    }
    if !start.is_finite() || !stop.is_finite() || start > stop {
        return Err(Failure::input(format!(
            "sweep range must be finite with start <= stop, got [{start}, {stop}]"
        )));
    }
    let (base_scenario, base_traffic) = load_scenario(scenario_path)?;
    match variable {
        Variable::InrGap | Variable::Inr2 if start < 0.0 => {
            return Err(Failure::input(format!(
                "{} must be >= 0, sweep starts at {start}",
                variable.name()
            )));
        }
        Variable::Inr2 if base_scenario.channel.snr1 <= 0.0 => {
            return Err(Failure::input(
                "sweeping inr2 re-derives h12_sq = inr2 / snr1, which needs snr1 > 0",
            ));
        }
        Variable::T if base_scenario.traffic.f_family.is_none() => {
            return Err(Failure::input(
                "sweeping T requires \"f_family\" in the scenario; a raw \"f\" array \
                 cannot follow a changing block length",
            ));
        }
        Variable::T if start < 1.0 => {
            return Err(Failure::input(format!(
                "T must be >= 1, sweep starts at {start}"
            )));
        }
        Variable::Beta | Variable::PM | Variable::PF
            if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) =>
        {
            return Err(Failure::input(format!(
                "{} must lie in [0, 1], sweep covers [{start}, {stop}]",
                variable.name()
            )));
        }
        _ => {}
    }

    // Canonical column order, deduplicated.
    let columns: Vec<Scheme> = [Scheme::Genie, Scheme::Perfect, Scheme::Noisy, Scheme::Nosense]
        .into_iter()
        .filter(|s| schemes.contains(s))
        .collect();

    let mut header = vec![variable.name().to_string(), "r1".to_string()];
    header.extend(columns.iter().map(|s| s.name().to_string()));
    let mut records = vec![header];

    for value in linspace(start, stop, points) {
        let mut scenario = base_scenario.clone();
        let mut traffic = base_traffic.clone();
        let value_cell = if variable == Variable::T {
            let t_len = value.round().max(1.0) as usize;
            t_len.to_string()
        } else {
            emit::sig(value)
        };
        let mut row = vec![value_cell];
        match apply_variable(&mut scenario, &mut traffic, variable, value) {
            Ok(()) => {
                let beta = scenario.resolved_beta(&traffic);
                row.push(emit::sig(primary_rate(&scenario.channel, beta)));
                for &scheme in &columns {
                    match scheme_rate(scheme, &scenario, &traffic) {
                        Ok(rate) => row.push(emit::sig(rate)),
                        Err(e) => {
                            eprintln!(
                                "warning: {} = {value}, scheme {}: {e}",
                                variable.name(),
                                scheme.name()
                            );
                            row.push("NaN".to_string());
                        }
                    }
                }
            }
            Err(e) => {
                eprintln!("warning: {} = {value}: {e}", variable.name());
                row.push("NaN".to_string());
                row.extend(columns.iter().map(|_| "NaN".to_string()));
            }
        }
        records.push(row);
    }
    emit::write_csv(out, &records)
}

// ---------------------------------------------------------------------------
// regions
// ---------------------------------------------------------------------------

pub fn cmd_regions(
    snr1: f64,
    snr2: f64,
    (gap_start, gap_stop, gap_points): (f64, f64, usize),
    (inr2_start, inr2_stop, inr2_points): (f64, f64, usize),
    out: Option<&Path>,
) -> Result<(), Failure> {
    if !snr1.is_finite() || snr1 <= 0.0 {
        return Err(Failure::input(format!(
            "--snr1 must be > 0 (the grid re-derives h12_sq = inr2 / snr1), got {snr1}"
        )));
    }
    if !snr2.is_finite() || snr2 < 0.0 {
        return Err(Failure::input(format!("--snr2 must be >= 0, got {snr2}")));
    }
    if !gap_start.is_finite() || gap_start <= 0.0 || gap_stop < gap_start {
        return Err(Failure::input(format!(
            "the INR_gap range must satisfy 0 < gap-start <= gap-stop, got \
             [{gap_start}, {gap_stop}]"
        )));
    }
    if !inr2_start.is_finite() || inr2_start < 0.0 || inr2_stop < inr2_start {
        return Err(Failure::input(format!(
            "the INR2 range must satisfy 0 <= inr2-start <= inr2-stop, got \
             [{inr2_start}, {inr2_stop}]"
        )));
    }
    if gap_points == 0 || inr2_points == 0 {
        return Err(Failure::input("grid point counts must be >= 1"));
    }

    let mut records =
        vec![vec!["inr_gap".to_string(), "inr2".to_string(), "region".to_string()]];
    for &gap in &linspace(gap_start, gap_stop, gap_points) {
        for &inr2 in &linspace(inr2_start, inr2_stop, inr2_points) {
            // Realize the (gap, inr2) pair through the gains: the cross gain
            // toward the secondary carries INR2, while the gain toward the
            // primary is fixed so that INR_C = 2 max(SNR2, 1) never binds
            // below SNR2 — the map then depends only on the two axes.
            let params = ChannelParams {
                snr1,
                snr2,
                h12_sq: inr2 / snr1,
                h21_sq: gap / (2.0 * snr2.max(1.0)),
                inr_gap: gap,
            };
            let limits = derive_limits(&params, 0.0).map_err(|e| core_failure(&e))?;
            let region = classify_region(&limits, snr1, snr2, gap);
            records.push(vec![
                emit::sig(gap),
                emit::sig(inr2),
                region.code().to_string(),
            ]);
        }
    }
    emit::write_csv(out, &records)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimulateReport<'a> {
    scheme: &'a str,
    seed: u64,
    num_blocks: usize,
    /// Analytic average rate of the simulated profile under block
    /// accounting (slot 0 idle) — the quantity the Monte Carlo estimates.
    analytic_rate: f64,
    /// The scheme's own headline rate. Differs from `analytic_rate` only
    /// for no-sensing, which spends no slot on sensing.
    scheme_rate: f64,
    estimate: RateEstimate,
    ci_contains_analytic: bool,
    state_prob: EmpiricalStateProb,
    protection: ProtectionReport,
    warnings: Vec<String>,
}

pub fn cmd_simulate(
    scenario_path: &Path,
    scheme: Scheme,
    blocks: usize,
    seed: u64,
    out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<(), Failure> {
    if scheme == Scheme::Genie {
        return Err(Failure::input(
            "the genie scheme cannot be simulated: it is defined by clairvoyant \
             per-slot state knowledge, while the simulator only draws a sensed \
             starting state. Use solve for the genie bound.",
        ));
    }
    let (scenario, traffic) = load_scenario(scenario_path)?;
    let params = &scenario.channel;
    let mut warnings: Vec<String> = Vec::new();

    let sensing = match scheme {
        Scheme::Perfect => SensingModel::PERFECT,
        _ => scenario.sensing,
    };
    let (profile, analytic_rate, scheme_rate) = match scheme {
        Scheme::Perfect | Scheme::Noisy => {
            let (profile, rate_report) =
                optimize_profile(params, &traffic, &sensing).map_err(|e| core_failure(&e))?;
            (profile, rate_report.r2, rate_report.r2)
        }
        Scheme::Nosense => {
            let limits = derive_limits(params, 0.0).map_err(|e| core_failure(&e))?;
            let res = no_sensing_alpha_star(&limits, params.snr1, params.snr2, params.inr_gap)
                .map_err(|e| core_failure(&e))?;
            let p = params.snr2.min(limits.inr_c);
            let row = ((1.0 - res.alpha_star) * p, res.alpha_star * p);
            let profile = flat_profile(traffic.t_len(), [row, row]);
            let analytic = achievable_rate(&profile, params, &traffic, &sensing)
                .map_err(|e| core_failure(&e))?
                .r2;
            warnings.push(
                "no-sensing's headline rate (scheme_rate) is the state-independent \
                 guaranteed rate with no sensing slot; the simulation instead \
                 averages realized per-state rates under block accounting (slot 0 \
                 idle), which is what analytic_rate reports"
                    .to_string(),
            );
            (profile, analytic, res.rate)
        }
        Scheme::Genie => unreachable!("rejected above"),
    };

    let config = SimConfig { num_blocks: blocks, seed };
    let estimate = empirical_rate(&profile, params, &traffic, &sensing, &config)
        .map_err(|e| core_failure(&e))?;
    let state_prob =
        empirical_state_prob(&traffic, &config).map_err(|e| core_failure(&e))?;
    for s in 0..2 {
        if state_prob.counts[s] == 0 {
            warnings.push(format!(
                "starting state {s} was never sampled; its beta_hat row \
                 serializes as nulls"
            ));
        }
    }
    let protection = primary_protection_check(&profile, params);
    let ci_contains_analytic =
        estimate.ci_low <= analytic_rate && analytic_rate <= estimate.ci_high;
    let protection_pass = protection.pass;

    let report = SimulateReport {
        scheme: scheme.name(),
        seed,
        num_blocks: blocks,
        analytic_rate,
        scheme_rate,
        estimate,
        ci_contains_analytic,
        state_prob,
        protection,
        warnings,
    };
    emit::write_json(out, &report)?;

    if let Some(path) = trace_out {
        let mut records = vec![vec![
            "block".to_string(),
            "s0".to_string(),
            "tau".to_string(),
            "sensed".to_string(),
        ]];
        for b in 0..blocks as u64 {
            let mut rng = cograte_core::simulator::block_rng(seed, b);
            let real = sample_block(&traffic, &sensing, &mut rng);
            records.push(vec![
                b.to_string(),
                real.s0.to_string(),
                real.tau.to_string(),
                real.sensed.to_string(),
            ]);
        }
        emit::write_csv(Some(path), &records)?;
    }

    if !protection_pass {
        return Err(Failure::validation(
            "the simulated profile violates the primary-protection cap; see the \
             protection section of the report",
        ));
    }
    if !ci_contains_analytic {
        return Err(Failure::statistical(format!(
            "statistical alarm: the 95% interval [{:.6}, {:.6}] missed the \
             analytic rate {:.6}. Roughly 5% of seeds do this by chance; rerun \
             with another --seed before suspecting a bug.",
            report.estimate.ci_low, report.estimate.ci_high, analytic_rate
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

pub fn cmd_validate(level: Level, seed: u64) -> Result<(), Failure> {
    // The grid oracles are cheap; the projected-gradient solves dominate,
    // so the full level runs fewer of them.
    let (n_genie, n_alpha, n_gradient) = match level {
        Level::Quick => (20, 20, 20),
        Level::Full => (1000, 1000, 100),
    };
    let mut failures = 0usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..n_genie {
        let (params, beta) = random_instance(&mut rng);
        let limits = derive_limits(&params, beta).map_err(|e| core_failure(&e))?;
        let alloc =
            genie_power(&limits, params.snr2, beta).map_err(|e| core_failure(&e))?;
        let closed = genie_rate(&alloc, &limits, beta);
        let (_, grid) = grid_genie(&limits, params.snr2, beta, &GridSpec::default())
            .map_err(|e| core_failure(&e))?;
        let dev = grid - closed;
        worst = worst.max(dev.abs());
        // The grid may fall short of the closed form by its resolution, but
        // must never beat it by more than numerical dust.
        ok &= dev < 1e-9 && dev > -1e-3;
    }
    report_check("genie closed form vs 3-D grid oracle", n_genie, ok, worst, &mut failures);

    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..n_alpha {
        let (params, _) = random_instance(&mut rng);
        let limits = derive_limits(&params, 0.0).map_err(|e| core_failure(&e))?;
        let res = no_sensing_alpha_star(&limits, params.snr1, params.snr2, params.inr_gap)
            .map_err(|e| core_failure(&e))?;
        let (_, grid) =
            grid_alpha(&limits, params.snr1, params.snr2, params.inr_gap, &GridSpec::one_dim())
                .map_err(|e| core_failure(&e))?;
        let dev = (grid - res.rate).abs();
        worst = worst.max(dev);
        ok &= dev < 1e-6;
    }
    report_check("no-sensing alpha* vs 1-D grid oracle", n_alpha, ok, worst, &mut failures);

    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut monotone_ok = 0usize;
    for _ in 0..n_gradient {
        let (params, traffic, sensing) = random_sense_instance(&mut rng);
        let limits = derive_limits(&params, 0.0).map_err(|e| core_failure(&e))?;
        let (profile, rate_report) =
            optimize_profile(&params, &traffic, &sensing).map_err(|e| core_failure(&e))?;
        if check_monotone(&profile, limits.inr_c).pass() {
            monotone_ok += 1;
        }
        let (_, ascent_rate) =
            projected_gradient_profile(&params, &traffic, &sensing, &GridSpec::default())
                .map_err(|e| core_failure(&e))?;
        let dev = (rate_report.r2 - ascent_rate).abs();
        worst = worst.max(dev);
        ok &= dev < 1e-4;
    }
    ok &= monotone_ok == n_gradient;
    println!(
        "[validate] sense-and-send KKT vs projected gradient ({n_gradient} instances): \
         {} (max rate gap {worst:.2e}, monotone {monotone_ok}/{n_gradient})",
        if ok { "ok" } else { "FAIL" }
    );
    if !ok {
        failures += 1;
    }

    if failures > 0 {
        Err(Failure::validation(format!("{failures} validation check(s) failed")))
    } else {
        println!("[validate] all checks passed");
        Ok(())
    }
}

fn report_check(name: &str, n: usize, ok: bool, worst: f64, failures: &mut usize) {
    println!(
        "[validate] {name} ({n} instances): {} (max deviation {worst:.2e})",
        if ok { "ok" } else { "FAIL" }
    );
    if !ok {
        *failures += 1;
    }
}

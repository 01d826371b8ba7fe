//! Monte-Carlo experiment harness: scheme selection, sweep specification,
//! paired random drops, and CSV emission for sweeps, sum-rate CDFs, the
//! two-user rate region, and solver-vs-oracle verification runs.
//!
//! All quantities are linear (watts, hertz, bit/s) internally; dBm appears
//! only in configuration keys and sweep values, converted at the boundary.

use crate::baselines::{noma_max_strong_rate, solve_broadcast, solve_noma, solve_ofdma};
use crate::channel::{dbm_to_watt, ChannelParams};
use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::model::{NetworkInstance, SolverParams};
use crate::oracle::{oracle_rate_region, oracle_solve, OracleConfig};
use crate::search::{check_solution, solve_rsma_auto};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;

/// Multiple-access schemes the harness can run side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rsma,
    Noma,
    Ofdma,
    Broadcast,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rsma => "rsma",
            Scheme::Noma => "noma",
            Scheme::Ofdma => "ofdma",
            Scheme::Broadcast => "broadcast",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s.to_ascii_lowercase().as_str() {
            "rsma" => Some(Scheme::Rsma),
            "noma" => Some(Scheme::Noma),
            "ofdma" => Some(Scheme::Ofdma),
            "broadcast" => Some(Scheme::Broadcast),
            _ => None,
        }
    }
}

/// Which instance parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    None,
    PMaxDbm,
    RMin,
    ThetaDbm,
    NumUsers,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::None => "none",
            SweepVar::PMaxDbm => "p_max_dbm",
            SweepVar::RMin => "r_min_bps",
            SweepVar::ThetaDbm => "theta_dbm",
            SweepVar::NumUsers => "num_users",
        }
    }

    pub fn parse(s: &str) -> Option<SweepVar> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(SweepVar::None),
            "p_max_dbm" => Some(SweepVar::PMaxDbm),
            "r_min" | "r_min_bps" => Some(SweepVar::RMin),
            "theta_dbm" => Some(SweepVar::ThetaDbm),
            "num_users" => Some(SweepVar::NumUsers),
            _ => None,
        }
    }
}

/// Which user's demand an `r_min` sweep moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepUser {
    All,
    One(usize),
}

/// Base instance parameters in linear units. `gains = None` means each trial
/// draws a fresh random drop; a fixed gain vector makes every trial identical.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_users: usize,
    pub p_max: f64,
    pub sigma2: f64,
    pub bandwidth: f64,
    pub theta: f64,
    pub r_min: Vec<f64>,
    pub gains: Option<Vec<f64>>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            num_users: 2,
            p_max: dbm_to_watt(30.0),
            sigma2: dbm_to_watt(-104.0),
            bandwidth: 1e6,
            theta: dbm_to_watt(-94.0),
            r_min: vec![1e6; 2],
            gains: None,
        }
    }
}

/// A full experiment: what to solve, what to vary, and how many trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub system: SystemConfig,
    pub channel: ChannelParams,
    pub schemes: Vec<Scheme>,
    pub sweep: SweepVar,
    pub sweep_values: Vec<f64>,
    pub sweep_user: SweepUser,
    pub trials: usize,
    /// Common-power grid step as a fraction of the power budget; `None`
    /// keeps the solver's default.
    pub xi_rel: Option<f64>,
    /// Targets on the weak-user axis for the rate-region boundary.
    pub region_points: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            system: SystemConfig::default(),
            channel: ChannelParams::default(),
            schemes: vec![Scheme::Rsma, Scheme::Noma, Scheme::Ofdma],
            sweep: SweepVar::None,
            sweep_values: Vec::new(),
            sweep_user: SweepUser::One(0),
            trials: 100,
            xi_rel: None,
            region_points: 25,
        }
    }
}

impl ExperimentSpec {
    /// Builds a spec from a parsed config file, rejecting unknown keys with
    /// their line numbers. Demands given as a single number apply to every
    /// user; `gains` fixes the channel and implies the user count.
    pub fn from_config(cfg: &ConfigFile) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        let mut num_users: Option<usize> = None;
        let mut r_min_raw: Option<Vec<f64>> = None;
        for e in &cfg.entries {
            match (e.section.as_str(), e.key.as_str()) {
                ("system", "num_users") => num_users = Some(e.usize()?),
                ("system", "p_max_dbm") => spec.system.p_max = dbm_to_watt(e.f64()?),
                ("system", "sigma2_dbm") => spec.system.sigma2 = dbm_to_watt(e.f64()?),
                ("system", "bandwidth_hz") => spec.system.bandwidth = e.f64()?,
                ("system", "theta_dbm") => spec.system.theta = dbm_to_watt(e.f64()?),
                ("system", "r_min_bps") => r_min_raw = Some(e.f64_list()?),
                ("system", "gains") => spec.system.gains = Some(e.f64_list()?),
                ("channel", "cell_side_m") => spec.channel.cell_side_m = e.f64()?,
                ("channel", "pathloss_a_db") => spec.channel.pathloss_a_db = e.f64()?,
                ("channel", "pathloss_b_db") => spec.channel.pathloss_b_db = e.f64()?,
                ("channel", "shadow_sigma_db") => spec.channel.shadow_sigma_db = e.f64()?,
                ("channel", "seed") => spec.channel.seed = e.u64()?,
                ("experiment", "schemes") => {
                    let mut schemes = Vec::new();
                    for name in e.str_list() {
                        let s = Scheme::parse(&name)
                            .ok_or_else(|| e.reject(&format!("unknown scheme \"{name}\"")))?;
                        if !schemes.contains(&s) {
                            schemes.push(s);
                        }
                    }
                    spec.schemes = schemes;
                }
                ("experiment", "sweep") => {
                    spec.sweep = SweepVar::parse(&e.value)
                        .ok_or_else(|| e.reject("expected one of none, p_max_dbm, r_min, theta_dbm, num_users"))?;
                }
                ("experiment", "sweep_values") => spec.sweep_values = e.f64_list()?,
                ("experiment", "sweep_user") => {
                    spec.sweep_user = if e.value.eq_ignore_ascii_case("all") {
                        SweepUser::All
                    } else {
                        SweepUser::One(e.usize()?)
                    };
                }
                ("experiment", "trials") => spec.trials = e.usize()?,
                ("experiment", "region_points") => spec.region_points = e.usize()?,
                ("solver", "xi_rel") => spec.xi_rel = Some(e.f64()?),
                _ => return Err(e.reject("unknown key")),
            }
        }

        // Resolve the user count before demand broadcasting: explicit key
        // first, then the fixed gain vector, then the default.
        if let Some(g) = &spec.system.gains {
            match num_users {
                Some(n) if n != g.len() => {
                    return Err(Error::Domain(format!(
                        "num_users = {n} but {} fixed gains were given",
                        g.len()
                    )))
                }
                _ => spec.system.num_users = g.len(),
            }
        } else if let Some(n) = num_users {
            spec.system.num_users = n;
        }
        let k = spec.system.num_users;
        spec.system.r_min = match r_min_raw {
            None => vec![1e6; k],
            Some(list) if list.len() == 1 => vec![list[0]; k],
            Some(list) if list.len() == k => list,
            Some(list) => {
                return Err(Error::Domain(format!(
                    "r_min_bps has {} entries for {k} users; give one value or one per user",
                    list.len()
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.system.num_users == 0 {
            return Err(Error::Domain("need at least one user".into()));
        }
        if self.system.r_min.len() != self.system.num_users {
            return Err(Error::Domain(format!(
                "{} demands for {} users",
                self.system.r_min.len(),
                self.system.num_users
            )));
        }
        if self.schemes.is_empty() {
            return Err(Error::Domain("scheme set is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.sweep != SweepVar::None && self.sweep_values.is_empty() {
            return Err(Error::Domain("sweep grid is empty".into()));
        }
        if let SweepUser::One(u) = self.sweep_user {
            if self.sweep == SweepVar::RMin && u >= self.system.num_users {
                return Err(Error::Domain(format!(
                    "sweep_user {u} out of range for {} users",
                    self.system.num_users
                )));
            }
        }
        if self.sweep == SweepVar::NumUsers {
            if self.system.gains.is_some() {
                return Err(Error::Domain(
                    "a num_users sweep needs random drops, not fixed gains".into(),
                ));
            }
            if self.system.r_min.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Domain(
                    "a num_users sweep needs equal demands to replicate".into(),
                ));
            }
            for &v in &self.sweep_values {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(Error::Domain(format!(
                        "num_users sweep values must be positive integers, got {v}"
                    )));
                }
            }
        }
        if self.region_points < 2 {
            return Err(Error::Domain("region_points must be at least 2".into()));
        }
        if let Some(x) = self.xi_rel {
            if !(x > 0.0) {
                return Err(Error::Domain(format!("xi_rel must be positive, got {x}")));
            }
        }
        Ok(())
    }

    /// The instance for one (sweep value, trial) cell. Gains come from the
    /// fixed vector when present, otherwise from the drop with stream id
    /// `trial`, so every scheme (and every sweep value) sees the same drop
    /// in the same trial.
    pub fn instance(&self, value: f64, trial: u64) -> Result<NetworkInstance> {
        let sys = &self.system;
        let mut k = sys.num_users;
        let mut p_max = sys.p_max;
        let mut theta = sys.theta;
        let mut r_min = sys.r_min.clone();
        match self.sweep {
            SweepVar::None => {}
            SweepVar::PMaxDbm => p_max = dbm_to_watt(value),
            SweepVar::ThetaDbm => theta = dbm_to_watt(value),
            SweepVar::RMin => match self.sweep_user {
                SweepUser::All => r_min.iter_mut().for_each(|r| *r = value),
                SweepUser::One(u) => r_min[u] = value,
            },
            SweepVar::NumUsers => {
                k = value as usize;
                r_min = vec![sys.r_min[0]; k];
            }
        }
        let gains = match &sys.gains {
            Some(g) => g.clone(),
            None => self.channel.drop_users_stream(k, trial)?,
        };
        NetworkInstance::new(gains, sys.sigma2, sys.bandwidth, p_max, theta, r_min)
    }

    pub fn solver_params(&self, inst: &NetworkInstance) -> SolverParams {
        let params = SolverParams::for_instance(inst);
        match self.xi_rel {
            Some(rel) => params.with_xi(rel * inst.p_max),
            None => params,
        }
    }
}

/// Sum rate for one scheme on one instance.
pub fn scheme_sum_rate(scheme: Scheme, inst: &NetworkInstance, params: &SolverParams) -> Result<f64> {
    match scheme {
        Scheme::Rsma => solve_rsma_auto(inst, params).map(|(s, _)| s.sum_rate),
        Scheme::Noma => solve_noma(inst).map(|b| b.sum_rate),
        Scheme::Ofdma => solve_ofdma(inst).map(|b| b.sum_rate),
        Scheme::Broadcast => solve_broadcast(inst).map(|b| b.sum_rate),
    }
}

/// One (sweep value, trial, scheme) outcome. `feasible = 0` records a trial
/// whose demands the scheme could not meet; its `sum_rate_bps` is 0 and it
/// is excluded from means.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub trial: u64,
    pub seed: u64,
    pub scheme: &'static str,
    pub sum_rate_bps: f64,
    pub feasible: u8,
    pub solve_ms: f64,
}

/// Per (sweep value, scheme) statistics. `mean/std` are over the trials
/// where this scheme was feasible; the `paired_*` columns restrict to trials
/// where every requested scheme was feasible, which is the honest basis for
/// cross-scheme comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub scheme: &'static str,
    pub trials: usize,
    pub feasible_trials: usize,
    pub mean_sum_rate_bps: f64,
    pub std_sum_rate_bps: f64,
    pub paired_trials: usize,
    pub paired_mean_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

/// Runs the sweep: trials in parallel, rows sorted by (sweep value, trial,
/// scheme) before returning so output order is deterministic. Infeasible
/// trials are recorded, not fatal; any other error aborts.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let values: Vec<f64> = if spec.sweep == SweepVar::None {
        vec![0.0]
    } else {
        spec.sweep_values.clone()
    };
    let per_trial: Vec<Vec<SweepRow>> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<SweepRow>> {
            let mut rows = Vec::with_capacity(values.len() * spec.schemes.len());
            for &value in &values {
                let inst = spec.instance(value, trial)?;
                let params = spec.solver_params(&inst);
                for &scheme in &spec.schemes {
                    let start = Instant::now();
                    let outcome = scheme_sum_rate(scheme, &inst, &params);
                    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
                    let (sum_rate_bps, feasible) = match outcome {
                        Ok(s) => (s, 1),
                        Err(Error::Infeasible(_)) | Err(Error::EmptyP0Range { .. }) => (0.0, 0),
                        Err(e) => return Err(e),
                    };
                    rows.push(SweepRow {
                        sweep_var: spec.sweep.name(),
                        sweep_value: value,
                        trial,
                        seed: spec.channel.seed,
                        scheme: scheme.name(),
                        sum_rate_bps,
                        feasible,
                        solve_ms,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_trial.into_iter().flatten().collect();
    let value_index =
        |v: f64| values.iter().position(|&x| x == v).expect("row value came from the grid");
    let scheme_index = |s: &str| {
        spec.schemes
            .iter()
            .position(|x| x.name() == s)
            .expect("row scheme came from the set")
    };
    rows.sort_by_key(|r| (value_index(r.sweep_value), r.trial, scheme_index(r.scheme)));

    let mut summary = Vec::with_capacity(values.len() * spec.schemes.len());
    for (vi, &value) in values.iter().enumerate() {
        let cell: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| value_index(r.sweep_value) == vi)
            .collect();
        // Trials where every scheme met the demands.
        let paired: Vec<u64> = (0..spec.trials as u64)
            .filter(|&t| cell.iter().filter(|r| r.trial == t).all(|r| r.feasible == 1))
            .collect();
        for &scheme in &spec.schemes {
            let mine: Vec<&&SweepRow> =
                cell.iter().filter(|r| r.scheme == scheme.name()).collect();
            let feas: Vec<f64> = mine
                .iter()
                .filter(|r| r.feasible == 1)
                .map(|r| r.sum_rate_bps)
                .collect();
            let mean = if feas.is_empty() {
                0.0
            } else {
                feas.iter().sum::<f64>() / feas.len() as f64
            };
            let std = if feas.len() < 2 {
                0.0
            } else {
                let var = feas.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                    / (feas.len() - 1) as f64;
                var.sqrt()
            };
            let paired_vals: Vec<f64> = mine
                .iter()
                .filter(|r| paired.contains(&r.trial))
                .map(|r| r.sum_rate_bps)
                .collect();
            let paired_mean = if paired_vals.is_empty() {
                0.0
            } else {
                paired_vals.iter().sum::<f64>() / paired_vals.len() as f64
            };
            summary.push(SummaryRow {
                sweep_var: spec.sweep.name(),
                sweep_value: value,
                scheme: scheme.name(),
                trials: spec.trials,
                feasible_trials: feas.len(),
                mean_sum_rate_bps: mean,
                std_sum_rate_bps: std,
                paired_trials: paired_vals.len(),
                paired_mean_bps: paired_mean,
            });
        }
    }
    Ok(SweepResult { rows, summary })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

/// All f64 columns are written with `{:e}`, the shortest scientific form
/// that round-trips exactly.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sweep_var",
        "sweep_value",
        "trial",
        "seed",
        "scheme",
        "sum_rate_bps",
        "feasible",
        "solve_ms",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.sweep_var.to_string(),
            format!("{:e}", r.sweep_value),
            r.trial.to_string(),
            r.seed.to_string(),
            r.scheme.to_string(),
            format!("{:e}", r.sum_rate_bps),
            r.feasible.to_string(),
            format!("{:e}", r.solve_ms),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sweep_var",
        "sweep_value",
        "scheme",
        "trials",
        "feasible_trials",
        "mean_sum_rate_bps",
        "std_sum_rate_bps",
        "paired_trials",
        "paired_mean_bps",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.sweep_var.to_string(),
            format!("{:e}", r.sweep_value),
            r.scheme.to_string(),
            r.trials.to_string(),
            r.feasible_trials.to_string(),
            format!("{:e}", r.mean_sum_rate_bps),
            format!("{:e}", r.std_sum_rate_bps),
            r.paired_trials.to_string(),
            format!("{:e}", r.paired_mean_bps),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One point of a per-scheme empirical CDF: `cdf = rank / feasible trials`,
/// rates ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfRow {
    pub scheme: &'static str,
    pub rank: usize,
    pub sum_rate_bps: f64,
    pub cdf: f64,
}

/// Paired-trial CDF of the sum rate per scheme at the base operating point.
/// Infeasible trials are dropped from that scheme's curve. Requires at
/// least 100 trials for a meaningful empirical distribution.
pub fn run_cdf(spec: &ExperimentSpec) -> Result<Vec<CdfRow>> {
    if spec.trials < 100 {
        return Err(Error::Domain(format!(
            "a CDF needs at least 100 trials, got {}",
            spec.trials
        )));
    }
    let mut point = spec.clone();
    point.sweep = SweepVar::None;
    point.sweep_values = Vec::new();
    let result = run_sweep(&point)?;
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let mut rates: Vec<f64> = result
            .rows
            .iter()
            .filter(|r| r.scheme == scheme.name() && r.feasible == 1)
            .map(|r| r.sum_rate_bps)
            .collect();
        rates.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
        let n = rates.len();
        for (i, &rate) in rates.iter().enumerate() {
            rows.push(CdfRow {
                scheme: scheme.name(),
                rank: i + 1,
                sum_rate_bps: rate,
                cdf: (i + 1) as f64 / n as f64,
            });
        }
    }
    Ok(rows)
}

pub fn write_cdf_csv<W: Write>(rows: &[CdfRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "rank", "sum_rate_bps", "cdf"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            r.rank.to_string(),
            format!("{:e}", r.sum_rate_bps),
            format!("{:e}", r.cdf),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One boundary point of the two-user achievable-rate region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub scheme: &'static str,
    pub r1_target_bps: f64,
    pub r2_bps: f64,
}

/// Two-user rate-region boundaries: the splitting scheme's region from the
/// exhaustive oracle, the layered scheme's from its closed form, both at the
/// same weak-user targets so the rows compare pointwise. Targets a scheme
/// cannot reach are omitted for that scheme. Uses the fixed gains when
/// given, else the drop with stream id 0.
pub fn run_region(spec: &ExperimentSpec) -> Result<Vec<RegionRow>> {
    spec.validate()?;
    if spec.system.num_users != 2 {
        return Err(Error::Domain(format!(
            "the rate region needs exactly 2 users, got {}",
            spec.system.num_users
        )));
    }
    let mut point = spec.clone();
    point.sweep = SweepVar::None;
    point.sweep_values = Vec::new();
    let inst = point.instance(0.0, 0)?;
    let boundary = oracle_rate_region(&inst, spec.region_points, &OracleConfig::default())?;
    let mut rows = Vec::new();
    for &(t, r2) in &boundary {
        rows.push(RegionRow {
            scheme: Scheme::Rsma.name(),
            r1_target_bps: t,
            r2_bps: r2,
        });
    }
    for &(t, _) in &boundary {
        if let Some(r2) = noma_max_strong_rate(&inst, t)? {
            rows.push(RegionRow {
                scheme: Scheme::Noma.name(),
                r1_target_bps: t,
                r2_bps: r2,
            });
        }
    }
    Ok(rows)
}

pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "r1_target_bps", "r2_bps"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            format!("{:e}", r.r1_target_bps),
            format!("{:e}", r.r2_bps),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Machine-readable record of one solve; serialization is deterministic, so
/// identical configs produce byte-identical records.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub instance: InstanceRecord,
    pub rsma: RsmaRecord,
    pub baselines: Vec<BaselineRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub gains: Vec<f64>,
    pub sigma2_w: f64,
    pub bandwidth_hz: f64,
    pub p_max_w: f64,
    pub theta_w: f64,
    pub r_min_bps: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RsmaRecord {
    pub common_shares_bps: Vec<f64>,
    pub common_power_w: f64,
    pub private_powers_w: Vec<f64>,
    pub user_total_rates_bps: Vec<f64>,
    pub common_rate_bps: f64,
    pub surplus_user: usize,
    pub sum_rate_bps: f64,
    pub solve_path: String,
    pub grid_points: usize,
    pub candidates_evaluated: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineRecord {
    pub scheme: String,
    pub common_power_w: f64,
    pub private_powers_w: Vec<f64>,
    pub user_total_rates_bps: Vec<f64>,
    pub sum_rate_bps: f64,
}

/// Solves the configured instance: the splitting scheme always, plus any
/// other schemes in the set for side-by-side numbers.
pub fn run_solve(spec: &ExperimentSpec) -> Result<SolveRecord> {
    spec.validate()?;
    let mut point = spec.clone();
    point.sweep = SweepVar::None;
    point.sweep_values = Vec::new();
    let inst = point.instance(0.0, 0)?;
    let params = spec.solver_params(&inst);
    let (sol, trace) = solve_rsma_auto(&inst, &params)?;
    let mut baselines = Vec::new();
    for &scheme in &spec.schemes {
        let solved = match scheme {
            Scheme::Rsma => continue,
            Scheme::Noma => solve_noma(&inst),
            Scheme::Ofdma => solve_ofdma(&inst),
            Scheme::Broadcast => solve_broadcast(&inst),
        };
        if let Ok(b) = solved {
            baselines.push(BaselineRecord {
                scheme: scheme.name().to_string(),
                common_power_w: b.powers.p0,
                private_powers_w: b.powers.p_priv.clone(),
                user_total_rates_bps: b.user_total_rates.clone(),
                sum_rate_bps: b.sum_rate,
            });
        }
    }
    Ok(SolveRecord {
        instance: InstanceRecord {
            gains: inst.h.clone(),
            sigma2_w: inst.sigma2,
            bandwidth_hz: inst.bandwidth,
            p_max_w: inst.p_max,
            theta_w: inst.theta,
            r_min_bps: inst.r_min.clone(),
        },
        rsma: RsmaRecord {
            common_shares_bps: sol.rates.a.clone(),
            common_power_w: sol.powers.p0,
            private_powers_w: sol.powers.p_priv.clone(),
            user_total_rates_bps: sol.user_total_rates.clone(),
            common_rate_bps: sol.common_rate_c1,
            surplus_user: sol.k_star,
            sum_rate_bps: sol.sum_rate,
            solve_path: format!("{:?}", trace.path),
            grid_points: trace.p0_grid.len(),
            candidates_evaluated: trace.candidates_evaluated,
        },
        baselines,
    })
}

/// Outcome of a verification run: how many instances were checked, how many
/// were infeasible for both solver and oracle (skipped), and one message per
/// disagreement or invariant violation, tagged with the trial stream.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checked: usize,
    pub skipped_infeasible: usize,
    pub failures: Vec<String>,
}

/// Runs `count` random instances through the solver and the exhaustive
/// oracle: the solver must pass its own invariant checks, reach at least the
/// oracle's objective minus the oracle's resolution slack, and agree with
/// the oracle on feasibility.
pub fn run_verify(spec: &ExperimentSpec, count: usize) -> Result<VerifyReport> {
    spec.validate()?;
    let k = spec.system.num_users;
    if k > 3 {
        return Err(Error::Domain(format!(
            "verification uses the exhaustive oracle, which is limited to 3 users (got {k})"
        )));
    }
    let cfg = OracleConfig::for_users(k);
    let outcomes: Vec<(usize, Option<String>)> = (0..count as u64)
        .into_par_iter()
        .map(|trial| -> (usize, Option<String>) {
            let inst = match spec.instance(0.0, trial) {
                Ok(i) => i,
                Err(e) => return (0, Some(format!("trial {trial}: instance: {e}"))),
            };
            let params = spec.solver_params(&inst);
            let solver = solve_rsma_auto(&inst, &params);
            let oracle = oracle_solve(&inst, &cfg);
            match (solver, oracle) {
                (Ok((sol, _)), Ok(orc)) => {
                    let issues = check_solution(&inst, &sol, &params);
                    if !issues.is_empty() {
                        return (1, Some(format!(
                            "trial {trial}: solution checks failed: {}",
                            issues.join("; ")
                        )));
                    }
                    // One extra bit/s absorbs the oracle's feasibility
                    // tolerances at its returned point.
                    if sol.sum_rate < orc.objective - orc.slack - 1.0 {
                        return (1, Some(format!(
                            "trial {trial}: solver {} below oracle {} - slack {}",
                            sol.sum_rate, orc.objective, orc.slack
                        )));
                    }
                    (1, None)
                }
                (Err(Error::Infeasible(_) | Error::EmptyP0Range { .. }),
                 Err(Error::Infeasible(_))) => (0, None),
                (Ok(_), Err(e)) => (1, Some(format!(
                    "trial {trial}: solver feasible but oracle errored: {e}"
                ))),
                (Err(e), Ok(orc)) => (1, Some(format!(
                    "trial {trial}: oracle found objective {} but solver errored: {e}",
                    orc.objective
                ))),
                (Err(se), Err(oe)) => (1, Some(format!(
                    "trial {trial}: unexpected errors: solver {se}; oracle {oe}"
                ))),
            }
        })
        .collect();
    let mut report = VerifyReport {
        checked: 0,
        skipped_infeasible: 0,
        failures: Vec::new(),
    };
    for (checked, failure) in outcomes {
        if checked == 1 {
            report.checked += 1;
        } else if failure.is_none() {
            report.skipped_infeasible += 1;
        }
        if let Some(f) = failure {
            report.failures.push(f);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Gains around 1e-10 keep the detection gap affordable even at the low
    // end of a 20..40 dBm budget sweep (at 1e-12 the gap alone outruns a
    // 0.1 W budget).
    fn fixed_two_user_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::default();
        spec.system.gains = Some(vec![1e-10, 2e-10]);
        spec.trials = 3;
        spec
    }

    #[test]
    fn config_round_trip_with_all_sections() {
        let text = "\
[system]
num_users = 3
p_max_dbm = 30
sigma2_dbm = -104
bandwidth_hz = 1e6
theta_dbm = -94
r_min_bps = 1e6

[channel]
cell_side_m = 250
seed = 9

[experiment]
schemes = rsma, noma
sweep = p_max_dbm
sweep_values = 20, 25, 30
trials = 7

[solver]
xi_rel = 1e-5
";
        let spec = ExperimentSpec::from_config(&ConfigFile::parse(text).unwrap()).unwrap();
        assert_eq!(spec.system.num_users, 3);
        assert_eq!(spec.system.r_min, vec![1e6; 3]);
        assert!((spec.system.p_max - 1.0).abs() < 1e-12);
        assert!((spec.system.theta / spec.system.sigma2 - 10.0).abs() < 1e-9);
        assert_eq!(spec.channel.cell_side_m, 250.0);
        assert_eq!(spec.channel.seed, 9);
        assert_eq!(spec.schemes, vec![Scheme::Rsma, Scheme::Noma]);
        assert_eq!(spec.sweep, SweepVar::PMaxDbm);
        assert_eq!(spec.sweep_values, vec![20.0, 25.0, 30.0]);
        assert_eq!(spec.trials, 7);
        assert_eq!(spec.xi_rel, Some(1e-5));
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_line() {
        let text = "[system]\nnum_users = 2\ntypo_key = 5\n";
        match ExperimentSpec::from_config(&ConfigFile::parse(text).unwrap()) {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("unknown key"), "{msg}");
            }
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn demand_list_must_match_user_count() {
        let text = "[system]\nnum_users = 3\nr_min_bps = 1e6, 2e6\n";
        assert!(matches!(
            ExperimentSpec::from_config(&ConfigFile::parse(text).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fixed_gains_imply_the_user_count() {
        let text = "[system]\ngains = 1e-12, 2e-12, 4e-12\nr_min_bps = 5e5\n";
        let spec = ExperimentSpec::from_config(&ConfigFile::parse(text).unwrap()).unwrap();
        assert_eq!(spec.system.num_users, 3);
        assert_eq!(spec.system.r_min, vec![5e5; 3]);
        let text = "[system]\nnum_users = 2\ngains = 1e-12, 2e-12, 4e-12\n";
        assert!(ExperimentSpec::from_config(&ConfigFile::parse(text).unwrap()).is_err());
    }

    #[test]
    fn sweep_values_land_on_the_right_parameter() {
        let mut spec = fixed_two_user_spec();
        spec.sweep = SweepVar::PMaxDbm;
        spec.sweep_values = vec![20.0];
        let inst = spec.instance(20.0, 0).unwrap();
        assert!((inst.p_max - 0.1).abs() < 1e-12);
        assert_eq!(inst.theta, spec.system.theta);

        spec.sweep = SweepVar::ThetaDbm;
        let inst = spec.instance(-90.0, 0).unwrap();
        assert!((inst.theta - dbm_to_watt(-90.0)).abs() < 1e-18);

        spec.sweep = SweepVar::RMin;
        spec.sweep_user = SweepUser::One(1);
        let inst = spec.instance(2.5e6, 0).unwrap();
        assert_eq!(inst.r_min, vec![1e6, 2.5e6]);
        spec.sweep_user = SweepUser::All;
        let inst = spec.instance(2.5e6, 0).unwrap();
        assert_eq!(inst.r_min, vec![2.5e6, 2.5e6]);
    }

    #[test]
    fn user_count_sweep_replicates_demands_and_redraws() {
        let mut spec = ExperimentSpec::default();
        spec.sweep = SweepVar::NumUsers;
        spec.sweep_values = vec![1.0, 3.0];
        spec.validate().unwrap();
        let inst = spec.instance(3.0, 5).unwrap();
        assert_eq!(inst.num_users(), 3);
        assert_eq!(inst.r_min, vec![1e6; 3]);
        // Fixed gains cannot change length with the sweep.
        spec.system.gains = Some(vec![1e-12, 2e-12]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn same_trial_same_drop() {
        let spec = ExperimentSpec::default();
        let a = spec.instance(0.0, 4).unwrap();
        let b = spec.instance(0.0, 4).unwrap();
        let c = spec.instance(0.0, 5).unwrap();
        assert_eq!(a.h, b.h);
        assert_ne!(a.h, c.h);
    }

    #[test]
    fn sweep_rows_are_complete_ordered_and_summarized() {
        let mut spec = fixed_two_user_spec();
        spec.sweep = SweepVar::PMaxDbm;
        spec.sweep_values = vec![30.0, 20.0];
        spec.schemes = vec![Scheme::Rsma, Scheme::Ofdma];
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 2 * 3 * 2);
        // Grid order is preserved as given, trials and schemes nested inside.
        let key: Vec<(f64, u64, &str)> = result
            .rows
            .iter()
            .map(|r| (r.sweep_value, r.trial, r.scheme))
            .collect();
        assert_eq!(key[0], (30.0, 0, "rsma"));
        assert_eq!(key[1], (30.0, 0, "ofdma"));
        assert_eq!(key[2], (30.0, 1, "rsma"));
        assert_eq!(key[6], (20.0, 0, "rsma"));
        assert!(result.rows.iter().all(|r| r.feasible == 1));
        // Fixed gains: all trials identical, so std = 0 and mean = the value.
        let s = &result.summary[0];
        assert_eq!(s.scheme, "rsma");
        assert_eq!(s.feasible_trials, 3);
        assert_eq!(s.paired_trials, 3);
        assert_eq!(s.std_sum_rate_bps, 0.0);
        let rsma_row = &result.rows[0];
        assert_eq!(s.mean_sum_rate_bps, rsma_row.sum_rate_bps);
        assert_eq!(s.paired_mean_bps, rsma_row.sum_rate_bps);
    }

    #[test]
    fn infeasible_trials_are_rows_not_errors() {
        let mut spec = fixed_two_user_spec();
        spec.system.r_min = vec![8e6, 8e6];
        spec.trials = 2;
        let result = run_sweep(&spec).unwrap();
        assert!(result.rows.iter().all(|r| r.feasible == 0));
        assert!(result.rows.iter().all(|r| r.sum_rate_bps == 0.0));
        assert_eq!(result.summary[0].feasible_trials, 0);
        assert_eq!(result.summary[0].mean_sum_rate_bps, 0.0);
    }

    #[test]
    fn sweep_csv_has_the_pinned_header_and_scientific_numbers() {
        let mut spec = fixed_two_user_spec();
        spec.trials = 1;
        spec.schemes = vec![Scheme::Rsma];
        let result = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&result.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sweep_var,sweep_value,trial,seed,scheme,sum_rate_bps,feasible,solve_ms"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("none,0e0,0,0,rsma,"), "{row}");
        let rate_field = row.split(',').nth(5).unwrap();
        assert!(rate_field.contains('e'), "not scientific: {rate_field}");
        assert_eq!(rate_field.parse::<f64>().unwrap(), result.rows[0].sum_rate_bps);
    }

    #[test]
    fn cdf_needs_trials_and_comes_back_sorted() {
        let mut spec = ExperimentSpec::default();
        spec.trials = 12;
        assert!(matches!(run_cdf(&spec), Err(Error::Domain(_))));
        spec.trials = 100;
        spec.schemes = vec![Scheme::Rsma, Scheme::Ofdma];
        let rows = run_cdf(&spec).unwrap();
        for scheme in ["rsma", "ofdma"] {
            let mine: Vec<&CdfRow> = rows.iter().filter(|r| r.scheme == scheme).collect();
            assert!(!mine.is_empty());
            for w in mine.windows(2) {
                assert!(w[1].sum_rate_bps >= w[0].sum_rate_bps);
                assert!(w[1].cdf > w[0].cdf);
                assert_eq!(w[1].rank, w[0].rank + 1);
            }
            assert_eq!(mine.last().unwrap().cdf, 1.0);
        }
        // Same spec, same bytes: the CDF has no timing column.
        let again = run_cdf(&spec).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_cdf_csv(&rows, &mut a).unwrap();
        write_cdf_csv(&again, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn region_rows_pair_the_two_schemes_on_one_grid() {
        let mut spec = fixed_two_user_spec();
        spec.region_points = 9;
        let rows = run_region(&spec).unwrap();
        let rsma: Vec<&RegionRow> = rows.iter().filter(|r| r.scheme == "rsma").collect();
        let noma: Vec<&RegionRow> = rows.iter().filter(|r| r.scheme == "noma").collect();
        assert!(rsma.len() >= 6);
        assert!(!noma.is_empty() && noma.len() <= rsma.len());
        for w in rsma.windows(2) {
            assert!(w[1].r2_bps <= w[0].r2_bps + 1e-9);
        }
        // Pointwise: wherever the layered scheme reaches, splitting does
        // at least as well (a little resolution headroom for the oracle).
        for n in &noma {
            let r = rsma
                .iter()
                .find(|r| r.r1_target_bps == n.r1_target_bps)
                .expect("targets are shared");
            assert!(
                r.r2_bps >= n.r2_bps - 2e4,
                "at t={}: splitting {} vs layering {}",
                n.r1_target_bps,
                r.r2_bps,
                n.r2_bps
            );
        }
    }

    #[test]
    fn region_needs_two_users() {
        let mut spec = ExperimentSpec::default();
        spec.system.num_users = 3;
        spec.system.r_min = vec![1e6; 3];
        assert!(matches!(run_region(&spec), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_record_is_byte_identical_across_runs() {
        let mut spec = ExperimentSpec::default();
        spec.schemes = vec![Scheme::Rsma, Scheme::Noma, Scheme::Ofdma];
        let a = serde_json::to_string_pretty(&run_solve(&spec).unwrap()).unwrap();
        let b = serde_json::to_string_pretty(&run_solve(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"sum_rate_bps\""));
        assert!(a.contains("\"noma\""));
    }

    #[test]
    fn solve_record_uses_the_fast_path_on_fixed_equal_demand_pairs() {
        let spec = fixed_two_user_spec();
        let rec = run_solve(&spec).unwrap();
        assert_eq!(rec.rsma.solve_path, "TwoUserFast");
        assert_eq!(rec.instance.gains, vec![1e-10, 2e-10]);
        assert!(rec.rsma.sum_rate_bps > 2e6);
    }

    #[test]
    fn verify_passes_on_clean_builds() {
        let mut spec = ExperimentSpec::default();
        spec.system.num_users = 2;
        spec.system.r_min = vec![1e6; 2];
        let report = run_verify(&spec, 5).unwrap();
        assert_eq!(report.checked + report.skipped_infeasible, 5);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    #[test]
    fn verify_rejects_too_many_users() {
        let mut spec = ExperimentSpec::default();
        spec.system.num_users = 4;
        spec.system.r_min = vec![1e6; 4];
        assert!(matches!(run_verify(&spec, 1), Err(Error::Domain(_))));
    }
}

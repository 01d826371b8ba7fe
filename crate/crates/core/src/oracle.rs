//! Brute-force verifier: an exhaustive grid search over the raw decision
//! variables (common shares, common power, private powers) with
//! shrinking-window refinement. Nothing here relies on the closed-form
//! structure used by the solvers; every candidate is scored by evaluating
//! the objective and every constraint directly, so agreement with the main
//! solver certifies the closed forms at grid resolution.

use crate::error::{Error, Infeasibility, Result};
use crate::model::{NetworkInstance, PowerAllocation, DEFAULT_EPS_POWER, DEFAULT_EPS_RATE};

/// Grid resolution for the brute-force search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Grid points per common-share dimension.
    pub grid_a: usize,
    /// Grid points per power dimension (common power and each private one).
    pub grid_p: usize,
    /// Shrinking-window passes after the initial full-box pass; each pass
    /// re-grids a window 4x smaller around the incumbent.
    pub refine_rounds: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid_a: 21,
            grid_p: 41,
            refine_rounds: 4,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_a < 2 || self.grid_p < 2 || self.refine_rounds < 2 {
            return Err(Error::Domain(format!(
                "oracle grid settings must all be at least 2, got a={} p={} rounds={}",
                self.grid_a, self.grid_p, self.refine_rounds
            )));
        }
        Ok(())
    }

    /// Presets sized so a full pass stays in the low millions of candidate
    /// evaluations for the given user count.
    pub fn for_users(k: usize) -> Self {
        match k {
            1 => OracleConfig {
                grid_a: 41,
                grid_p: 81,
                refine_rounds: 6,
            },
            2 => OracleConfig::default(),
            _ => OracleConfig {
                grid_a: 9,
                grid_p: 13,
                refine_rounds: 5,
            },
        }
    }
}

/// Best feasible grid point found, with a resolution allowance.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub a: Vec<f64>,
    pub powers: PowerAllocation,
    pub objective: f64,
    /// How far the true optimum can plausibly sit above `objective`: final
    /// grid spacings times finite-difference slopes at the returned point,
    /// doubled for safety. Useful as the tolerance when comparing against a
    /// solver believed to be exact.
    pub slack: f64,
}

/// Work cap per pass: the product of power-lattice size and share-lattice
/// size is thinned to stay under this many pair checks.
const MAX_PAIR_CHECKS: f64 = 6e7;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let n = n.max(2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Full-box power axis: a uniform grid plus a decade ladder down to 1e-12
/// of the width. Rates are logarithmic in power, so optima can sit at
/// powers far below the uniform spacing (for example a strong user's
/// private power when the common stream carries almost everything); the
/// ladder gives the refinement passes a foothold at every scale.
fn power_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut axis = linspace(lo, hi, n);
    if hi > lo {
        axis.extend((1..=12).map(|j| lo + (hi - lo) * 10f64.powi(-j)));
        axis.sort_by(|a, b| a.partial_cmp(b).expect("axis points are finite"));
        axis.dedup();
    }
    axis
}

/// Calls `f` for every point of the cartesian product of `axes`.
fn for_each_combo(axes: &[Vec<f64>], mut f: impl FnMut(&[f64])) {
    if axes.is_empty() {
        f(&[]);
        return;
    }
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&point);
        let mut d = axes.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                point[d] = axes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = axes[d][0];
            if d == 0 {
                return;
            }
        }
    }
}

/// Thins per-dimension counts so `grid_p^(K+1) * grid_a^K` stays under the
/// work cap, preserving the counts when they already fit.
fn thinned_counts(cfg: &OracleConfig, kk: usize) -> (usize, usize) {
    let dims_p = (kk + 1) as f64;
    let dims_a = kk as f64;
    let product = (cfg.grid_p as f64).powf(dims_p) * (cfg.grid_a as f64).powf(dims_a);
    if product <= MAX_PAIR_CHECKS {
        return (cfg.grid_a, cfg.grid_p);
    }
    let f = (MAX_PAIR_CHECKS / product).powf(1.0 / (dims_p + dims_a));
    let na = ((cfg.grid_a as f64 * f).floor() as usize).max(2);
    let np = ((cfg.grid_p as f64 * f).floor() as usize).max(2);
    (na, np)
}

#[derive(Debug, Clone)]
struct BestPoint {
    a: Vec<f64>,
    p0: f64,
    p: Vec<f64>,
    objective: f64,
}

/// One gridded pass over the given windows. Returns the best feasible point
/// (raw constraints only: budget, detection gap, share cap, demands).
fn search_box(
    inst: &NetworkInstance,
    a_win: &[(f64, f64)],
    p0_win: (f64, f64),
    p_win: &[(f64, f64)],
    na: usize,
    np: usize,
    ladder: bool,
) -> Option<BestPoint> {
    let kk = inst.num_users();
    let p_axis = |lo: f64, hi: f64| {
        if ladder {
            power_axis(lo, hi, np)
        } else {
            linspace(lo, hi, np)
        }
    };
    let a_axes: Vec<Vec<f64>> = a_win.iter().map(|&(lo, hi)| linspace(lo, hi, na)).collect();
    let p0_axis = p_axis(p0_win.0, p0_win.1);
    let p_axes: Vec<Vec<f64>> = p_win.iter().map(|&(lo, hi)| p_axis(lo, hi)).collect();

    // Share combinations, largest total first: for a fixed power point the
    // objective is the share total plus a constant, so the first combination
    // that clears the floors and the common-rate cap is the best one there.
    let mut combos: Vec<(f64, Vec<f64>)> = Vec::new();
    for_each_combo(&a_axes, |a| combos.push((a.iter().sum(), a.to_vec())));
    combos.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("share sums are finite"));
    let sums: Vec<f64> = combos.iter().map(|c| c.0).collect();

    let gap = (inst.theta + inst.sigma2) / inst.h[0];
    let b = inst.bandwidth;
    let mut best: Option<BestPoint> = None;
    let mut rates = vec![0.0f64; kk];
    let mut floors = vec![0.0f64; kk];
    for &p0 in &p0_axis {
        for_each_combo(&p_axes, |p| {
            let s: f64 = p.iter().sum();
            if p0 + s > inst.p_max + DEFAULT_EPS_POWER || p0 - s < gap - DEFAULT_EPS_POWER {
                return;
            }
            let c1 = b * (1.0 + inst.h[0] * p0 / (inst.h[0] * s + inst.sigma2)).log2();
            let mut rate_sum = 0.0;
            for k in 0..kk {
                let hk = inst.h[k];
                rates[k] = b * (1.0 + hk * p[k] / (hk * (s - p[k]) + inst.sigma2)).log2();
                rate_sum += rates[k];
                floors[k] = inst.r_min[k] - rates[k];
            }
            // Skip share combinations whose total exceeds the common rate,
            // then stop at the first one whose coordinates clear the floors.
            let start = sums.partition_point(|&v| v > c1 + DEFAULT_EPS_RATE);
            if start == sums.len() && floors.iter().any(|&f| f > DEFAULT_EPS_RATE) {
                return;
            }
            if let Some(&ub) = sums.get(start) {
                if best.as_ref().is_some_and(|b| ub + rate_sum <= b.objective) {
                    return;
                }
            }
            for (sum, a) in &combos[start..] {
                if a.iter()
                    .zip(&floors)
                    .all(|(&ak, &fl)| ak >= fl - DEFAULT_EPS_RATE)
                {
                    let objective = sum + rate_sum;
                    if best.as_ref().is_none_or(|b| objective > b.objective) {
                        best = Some(BestPoint {
                            a: a.clone(),
                            p0,
                            p: p.to_vec(),
                            objective,
                        });
                    }
                    return;
                }
            }
        });
    }
    best
}

fn shrunk_window(full: (f64, f64), center: f64, factor: f64) -> (f64, f64) {
    let width = (full.1 - full.0) * factor;
    let lo = (center - width / 2.0).max(full.0);
    let hi = (center + width / 2.0).min(full.1);
    (lo, hi)
}

/// Resolution allowance at the returned point: the objective moves one-for-
/// one with each share, and by finite-difference slopes with each power.
fn resolution_slack(
    inst: &NetworkInstance,
    best: &BestPoint,
    a_spacing: &[f64],
    p0_spacing: f64,
    p_spacing: &[f64],
) -> f64 {
    let kk = inst.num_users();
    let b = inst.bandwidth;
    let rate_total = |p: &[f64]| -> f64 {
        let s: f64 = p.iter().sum();
        (0..kk)
            .map(|k| b * (1.0 + inst.h[k] * p[k] / (inst.h[k] * (s - p[k]) + inst.sigma2)).log2())
            .sum()
    };
    let mut slack: f64 = a_spacing.iter().sum();
    let mut work = best.p.clone();
    for k in 0..kk {
        let step = p_spacing[k].max(1e-15);
        let base = best.p[k];
        work[k] = base + step;
        let up = rate_total(&work);
        work[k] = (base - step).max(0.0);
        let down = rate_total(&work);
        work[k] = base;
        let slope = (up - down).abs() / (base + step - (base - step).max(0.0));
        slack += slope * p_spacing[k];
    }
    // The common power enters the objective through the share cap c1.
    let s: f64 = best.p.iter().sum();
    let c1_at = |p0: f64| b * (1.0 + inst.h[0] * p0 / (inst.h[0] * s + inst.sigma2)).log2();
    let step = p0_spacing.max(1e-15);
    let slope0 = (c1_at(best.p0 + step) - c1_at((best.p0 - step).max(0.0))).abs()
        / (best.p0 + step - (best.p0 - step).max(0.0));
    slack += slope0 * p0_spacing;
    2.0 * slack
}

/// Exhaustive search of the raw problem for up to three users: grid over
/// shares in `[0, R_k]`, common power in `[0, P]`, private powers in
/// `[0, P]` filtered by the budget, followed by shrinking-window refinement
/// around the incumbent. An empty first pass is retried once at doubled
/// resolution before declaring the instance infeasible.
pub fn oracle_solve(inst: &NetworkInstance, cfg: &OracleConfig) -> Result<OracleSolution> {
    cfg.validate()?;
    let kk = inst.num_users();
    if kk > 3 {
        return Err(Error::Domain(format!(
            "oracle is limited to 3 users (got {kk}); cost grows exponentially"
        )));
    }
    let (na, np) = thinned_counts(cfg, kk);
    // Shares are bounded only through their total, which can never exceed
    // the common rate at full power with no private interference. A share
    // above the user's demand is still objective: surplus counts.
    let c1_cap = inst.bandwidth * (1.0 + inst.h[0] * inst.p_max / inst.sigma2).log2();
    let a_full: Vec<(f64, f64)> = vec![(0.0, c1_cap); kk];
    let p0_full = (0.0, inst.p_max);
    let p_full: Vec<(f64, f64)> = vec![(0.0, inst.p_max); kk];

    let mut best = match search_box(inst, &a_full, p0_full, &p_full, na, np, true) {
        Some(b) => b,
        None => {
            // A thin feasible sliver can slip between grid points; look once
            // more at doubled resolution before giving up.
            let (na2, np2) = (na * 2 - 1, np * 2 - 1);
            match search_box(inst, &a_full, p0_full, &p_full, na2, np2, true) {
                Some(b) => b,
                None => {
                    return Err(Error::Infeasible(Infeasibility::NoFeasibleP0 {
                        p0_lower: 0.0,
                        detail: "exhaustive grid search found no feasible point".into(),
                    }))
                }
            }
        }
    };

    let mut factor = 1.0;
    for _ in 0..cfg.refine_rounds {
        factor *= 0.25;
        let a_win: Vec<(f64, f64)> = a_full
            .iter()
            .zip(&best.a)
            .map(|(&full, &c)| shrunk_window(full, c, factor))
            .collect();
        let p0_win = shrunk_window(p0_full, best.p0, factor);
        let p_win: Vec<(f64, f64)> = p_full
            .iter()
            .zip(&best.p)
            .map(|(&full, &c)| shrunk_window(full, c, factor))
            .collect();
        if let Some(b) = search_box(inst, &a_win, p0_win, &p_win, na, np, false) {
            if b.objective > best.objective {
                best = b;
            }
        }
    }

    let spacing = |win: (f64, f64), n: usize| (win.1 - win.0) * factor / (n - 1) as f64;
    let a_spacing: Vec<f64> = a_full.iter().map(|&w| spacing(w, na)).collect();
    let p_spacing: Vec<f64> = p_full.iter().map(|&w| spacing(w, np)).collect();
    let slack = resolution_slack(inst, &best, &a_spacing, spacing(p0_full, np), &p_spacing);
    Ok(OracleSolution {
        a: best.a.clone(),
        powers: PowerAllocation {
            p0: best.p0,
            p_priv: best.p.clone(),
        },
        objective: best.objective,
        slack,
    })
}

/// Grid-plus-refinement maximization of `score(p0, c1, rates)` over the
/// private powers, used by the two-user rate-region sweep where the best
/// share split at fixed powers is a one-constraint linear program solved in
/// closed form inside `score`.
///
/// The common power is not a grid dimension: private rates depend only on
/// the private powers, every score here is nondecreasing in the common
/// rate, and the common rate and the detection gap both grow with the
/// common power, so `p0 = P - sum(p)` dominates any smaller choice. Gridding
/// `p0` too would put the optimum on a thin diagonal ridge that
/// equal-rate window shrinking cannot track.
fn power_grid_max(
    inst: &NetworkInstance,
    np: usize,
    rounds: usize,
    score: &dyn Fn(f64, f64, &[f64]) -> Option<f64>,
) -> Option<(f64, f64, Vec<f64>)> {
    let kk = inst.num_users();
    let gap = (inst.theta + inst.sigma2) / inst.h[0];
    let b = inst.bandwidth;
    let p_full: Vec<(f64, f64)> = vec![(0.0, inst.p_max); kk];
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut factor = 1.0;
    for round in 0..=rounds {
        let refined = matches!((&best, round), (Some(_), r) if r > 0);
        let p_win = match (&best, round) {
            (Some((_, _, p)), r) if r > 0 => {
                factor *= 0.25;
                p_full
                    .iter()
                    .zip(p)
                    .map(|(&full, &c)| shrunk_window(full, c, factor))
                    .collect::<Vec<_>>()
            }
            _ => p_full.clone(),
        };
        let axis = |lo: f64, hi: f64| {
            if refined {
                linspace(lo, hi, np)
            } else {
                power_axis(lo, hi, np)
            }
        };
        let p_axes: Vec<Vec<f64>> = p_win.iter().map(|&(lo, hi)| axis(lo, hi)).collect();
        let mut rates = vec![0.0f64; kk];
        for_each_combo(&p_axes, |p| {
            let s: f64 = p.iter().sum();
            let p0 = inst.p_max - s;
            if p0 < 0.0 || p0 - s < gap - DEFAULT_EPS_POWER {
                return;
            }
            let c1 = b * (1.0 + inst.h[0] * p0 / (inst.h[0] * s + inst.sigma2)).log2();
            for k in 0..kk {
                let hk = inst.h[k];
                rates[k] = b * (1.0 + hk * p[k] / (hk * (s - p[k]) + inst.sigma2)).log2();
            }
            if let Some(v) = score(p0, c1, &rates) {
                if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                    best = Some((v, p0, p.to_vec()));
                }
            }
        });
    }
    best
}

/// Two-user rate-region boundary: for each target `t` on a grid of user-1
/// total rates, the largest achievable user-2 total rate. Targets beyond
/// user 1's maximum are omitted; the output is forced nonincreasing (the
/// feasible sets nest, so any increase is grid noise).
pub fn oracle_rate_region(
    inst: &NetworkInstance,
    sweep_points: usize,
    cfg: &OracleConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    if inst.num_users() != 2 {
        return Err(Error::Domain(format!(
            "rate region is defined for exactly 2 users, got {}",
            inst.num_users()
        )));
    }
    if sweep_points < 2 {
        return Err(Error::Domain("need at least 2 sweep points".into()));
    }
    let np = cfg.grid_p;
    // Boundary optima sit on a thin ridge (the common power must track the
    // strong user's private power about a thousandfold faster), so each
    // shrinking pass recovers only a constant factor. Passes are cheap
    // powers-only grids; buy enough to land within a few bit/s.
    let rounds = cfg.refine_rounds + 10;
    // User 1's own maximum: every common share handed to user 1.
    let r1_max = power_grid_max(inst, np, rounds, &|_, c1, r| Some(c1 + r[0]))
        .map(|(v, _, _)| v)
        .unwrap_or(0.0);
    let mut region = Vec::with_capacity(sweep_points);
    let mut floor = f64::INFINITY;
    for i in 0..sweep_points {
        let t = r1_max * i as f64 / (sweep_points - 1) as f64;
        // User 1 takes the smallest share that reaches the target; user 2
        // keeps the rest of the common rate.
        let best = power_grid_max(inst, np, rounds, &|_, c1, r| {
            let need1 = (t - r[0]).max(0.0);
            if need1 > c1 + DEFAULT_EPS_RATE {
                return None;
            }
            Some(r[1] + (c1 - need1).max(0.0))
        });
        if let Some((r2, _, _)) = best {
            floor = floor.min(r2);
            region.push((t, floor));
        }
    }
    Ok(region)
}

//! Top-level solver: a one-dimensional scan over the common-stream power.
//!
//! Every grid point reduces to the corner enumeration (or the equal-demand
//! fill) from [`crate::rate_alloc`]; the best point is reassembled into a
//! full solution with the common rate handed out completely.

use crate::error::{Error, Infeasibility, Result};
use crate::model::{
    common_rate, common_rate_tight, private_rate, sic_feasible, NetworkInstance, PowerAllocation,
    RateVector, RsmaSolution, SolverParams,
};
use crate::private_power::{optimal_private_power, p_min};
use crate::rate_alloc::{best_split, equal_demand_split, optimal_rate_equal_demand, P0Context};

/// Hard cap on scan length so a misconfigured step cannot exhaust memory.
const MAX_GRID_POINTS: f64 = 1e7;

/// Which per-point strategy produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    /// Corner enumeration at every grid point.
    General,
    /// Greedy fill at every grid point (all demands equal).
    EqualDemand,
    /// Closed-form common power for two users with equal demands.
    TwoUserFast,
}

/// Record of one scan: the grid, the achieved sum rate at each point
/// (`-inf` where no rate split fits), and where the maximum sits.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub p0_grid: Vec<f64>,
    pub objective_at_p0: Vec<f64>,
    pub best_index: usize,
    pub path: SolvePath,
    /// Rate splits whose objective was actually evaluated, summed over the
    /// whole scan; the complexity counter.
    pub candidates_evaluated: u64,
}

/// Feasible interval for the common power: the detection-gap bound below,
/// the full budget above. `lower > upper` means the instance cannot satisfy
/// the detection gap at all.
pub fn p0_bounds(inst: &NetworkInstance) -> (f64, f64) {
    let lower = inst.p_max / 2.0 + (inst.theta + inst.sigma2) / (2.0 * inst.h[0]);
    (lower, inst.p_max)
}

/// Closed-form optimal common power for two users with equal demand `r`:
/// the larger of the power that makes the common rate exactly `r` and the
/// detection-gap lower bound.
pub fn fast_p0_star(
    p_max: f64,
    bandwidth: f64,
    r: f64,
    noise_over_gain_1: f64,
    sic_over_gain_1: f64,
) -> f64 {
    let rate_term = (1.0 - (-r / bandwidth).exp2()) * (p_max + noise_over_gain_1);
    let sic_term = 0.5 * p_max + 0.5 * sic_over_gain_1;
    rate_term.max(sic_term)
}

/// Completes a scan winner `(a, p0)` into a full solution: minimum private
/// powers with the distinguished user lifted to the budget, then the unused
/// common rate `c1 - Σ a` credited to that same user so the common stream
/// is fully allocated.
pub fn assemble_solution(inst: &NetworkInstance, a: &[f64], p0: f64) -> Result<RsmaSolution> {
    let opt = optimal_private_power(inst, a, p0)?;
    let c1 = common_rate_tight(inst, p0);
    let mut shares = a.to_vec();
    let residual = c1 - shares.iter().sum::<f64>();
    if residual > 0.0 {
        shares[opt.k_star] += residual;
    }
    let powers = PowerAllocation {
        p0,
        p_priv: opt.p_priv,
    };
    let user_total_rates: Vec<f64> = (0..inst.num_users())
        .map(|j| shares[j] + private_rate(inst, &powers, j))
        .collect();
    let sum_rate = user_total_rates.iter().sum();
    Ok(RsmaSolution {
        rates: RateVector { a: shares },
        powers,
        k_star: opt.k_star,
        common_rate_c1: c1,
        user_total_rates,
        sum_rate,
    })
}

/// Scans the common-power grid, applying `split` at each point. `split`
/// returns the best shares, the private-side objective, and the lifted user
/// for one grid point, or `None` when nothing fits there.
fn scan_p0<F>(
    inst: &NetworkInstance,
    params: &SolverParams,
    path: SolvePath,
    mut split: F,
) -> Result<(RsmaSolution, SearchTrace)>
where
    F: FnMut(&P0Context, &mut u64) -> Option<(Vec<f64>, f64, usize)>,
{
    let (lower, upper) = p0_bounds(inst);
    if lower > upper {
        return Err(Error::EmptyP0Range {
            lower,
            p_max: upper,
        });
    }
    let xi = params.xi;
    if !xi.is_finite() || xi <= 0.0 {
        return Err(Error::Domain(format!("scan step must be positive, got {xi}")));
    }
    if (upper - lower) / xi > MAX_GRID_POINTS {
        return Err(Error::Domain(format!(
            "scan step {xi} spans {} points, over the {MAX_GRID_POINTS} cap",
            (upper - lower) / xi
        )));
    }
    // lower + i*xi keeps halved steps on a bitwise superset grid, which makes
    // refinement monotone; accumulating p0 += xi would not.
    let mut p0_grid = Vec::new();
    let mut i = 0u64;
    loop {
        let p0 = lower + i as f64 * xi;
        if p0 >= upper {
            break;
        }
        p0_grid.push(p0);
        i += 1;
    }
    p0_grid.push(upper);

    let mut objective_at_p0 = Vec::with_capacity(p0_grid.len());
    let mut counter = 0u64;
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (idx, &p0) in p0_grid.iter().enumerate() {
        let c1 = common_rate_tight(inst, p0);
        let ctx = P0Context::new(inst, p0, c1);
        match split(&ctx, &mut counter) {
            Some((a, obj, _k)) => {
                // The split's objective covers the private side only; the
                // common stream contributes c1 once Σa is topped up to it.
                let full = c1 + obj;
                // Strict improvement keeps the smallest p0 on ties.
                if best.as_ref().is_none_or(|(_, b, _)| full > *b) {
                    best = Some((idx, full, a));
                }
                objective_at_p0.push(full);
            }
            None => objective_at_p0.push(f64::NEG_INFINITY),
        }
    }

    match best {
        None => Err(Error::Infeasible(Infeasibility::NoFeasibleP0 {
            p0_lower: lower,
            detail: infeasibility_detail(inst, lower, p0_grid.len()),
        })),
        Some((best_index, full, a)) => {
            let solution = assemble_solution(inst, &a, p0_grid[best_index])?;
            debug_assert!(
                (solution.sum_rate - full).abs() <= 1e-6 * full.abs().max(1.0),
                "assembled sum rate {} drifted from scan objective {full}",
                solution.sum_rate
            );
            Ok((
                solution,
                SearchTrace {
                    p0_grid,
                    objective_at_p0,
                    best_index,
                    path,
                    candidates_evaluated: counter,
                },
            ))
        }
    }
}

/// Diagnostics for an all-infeasible grid, taken at the lower bound: how
/// much private power the greedy common-rate fill would still need there.
fn infeasibility_detail(inst: &NetworkInstance, p0: f64, grid_len: usize) -> String {
    let c1 = common_rate_tight(inst, p0);
    let ctx = P0Context::new(inst, p0, c1);
    let mut remaining = c1;
    let mut need = 0.0;
    for j in 0..inst.num_users() {
        let a_j = remaining.min(inst.r_min[j]);
        remaining -= a_j;
        need += ctx.pmin(inst, j, a_j);
    }
    format!(
        "no rate split fits at any of {grid_len} grid points; at p0 = {:.6e} W the greedy \
         common-rate fill still needs {:.6e} W of private power with {:.6e} W available",
        p0, need, ctx.budget
    )
}

/// Globally optimal solution by corner enumeration at every grid point.
pub fn solve_rsma(
    inst: &NetworkInstance,
    params: &SolverParams,
) -> Result<(RsmaSolution, SearchTrace)> {
    scan_p0(inst, params, SolvePath::General, |ctx, counter| {
        best_split(inst, ctx, params, counter)
    })
}

/// Scan specialized to equal demands: one greedy fill per grid point.
pub fn solve_rsma_equal(
    inst: &NetworkInstance,
    params: &SolverParams,
) -> Result<(RsmaSolution, SearchTrace)> {
    let r = inst
        .equal_demand(params.eps_rate)
        .ok_or_else(|| Error::Domain("equal-demand scan requires equal demands".into()))?;
    scan_p0(inst, params, SolvePath::EqualDemand, |ctx, counter| {
        equal_demand_split(inst, ctx, r, params, counter)
    })
}

/// Two users, equal demands: the optimal common power is available in closed
/// form, so no scan is needed. Falls back to the equal-demand scan in the
/// rare case where the private budget cannot cover the demands at that point.
pub fn solve_two_user_fast(
    inst: &NetworkInstance,
    params: &SolverParams,
) -> Result<(RsmaSolution, SearchTrace)> {
    if inst.num_users() != 2 {
        return Err(Error::Domain(format!(
            "closed-form path needs exactly two users, got {}",
            inst.num_users()
        )));
    }
    let r = inst
        .equal_demand(params.eps_rate)
        .ok_or_else(|| Error::Domain("closed-form path requires equal demands".into()))?;
    let (lower, upper) = p0_bounds(inst);
    if lower > upper {
        return Err(Error::EmptyP0Range {
            lower,
            p_max: upper,
        });
    }
    // Same expression as the scan's grid start, so the gap-dominated case
    // lands bitwise on the same p0 the scan would try first.
    let rate_term = (1.0 - (-r / inst.bandwidth).exp2()) * (inst.p_max + inst.noise_over_gain(0));
    let p0 = rate_term.max(lower).min(upper);
    // At this point the common rate covers at least one full demand, so the
    // fill is (r, c1 - r) with the second share capped at r.
    let c1 = common_rate_tight(inst, p0);
    let fill = optimal_rate_equal_demand(inst, c1, r)?;
    match assemble_solution(inst, &fill.a, p0) {
        Ok(solution) => {
            let full = solution.sum_rate;
            Ok((
                solution,
                SearchTrace {
                    p0_grid: vec![p0],
                    objective_at_p0: vec![full],
                    best_index: 0,
                    path: SolvePath::TwoUserFast,
                    candidates_evaluated: 1,
                },
            ))
        }
        Err(Error::Infeasible(_)) => solve_rsma_equal(inst, params),
        Err(e) => Err(e),
    }
}

/// Dispatch: the two-user closed form when it applies, the greedy-fill scan
/// for equal demands, full enumeration otherwise.
pub fn solve_rsma_auto(
    inst: &NetworkInstance,
    params: &SolverParams,
) -> Result<(RsmaSolution, SearchTrace)> {
    if inst.equal_demand(params.eps_rate).is_some() {
        if inst.num_users() == 2 {
            solve_two_user_fast(inst, params)
        } else {
            solve_rsma_equal(inst, params)
        }
    } else {
        solve_rsma(inst, params)
    }
}

/// Validates a reported solution against the instance from scratch; returns
/// one message per violated condition, empty when everything holds.
pub fn check_solution(
    inst: &NetworkInstance,
    sol: &RsmaSolution,
    params: &SolverParams,
) -> Vec<String> {
    let mut issues = Vec::new();
    let kk = inst.num_users();
    if sol.rates.a.len() != kk || sol.powers.p_priv.len() != kk || sol.user_total_rates.len() != kk
    {
        issues.push(format!(
            "shape mismatch: {} shares / {} powers / {} totals for {kk} users",
            sol.rates.a.len(),
            sol.powers.p_priv.len(),
            sol.user_total_rates.len()
        ));
        return issues;
    }
    if sol.k_star >= kk {
        issues.push(format!("k_star {} out of range for {kk} users", sol.k_star));
        return issues;
    }
    if sol.powers.p0 < -params.eps_power {
        issues.push(format!("negative common power {}", sol.powers.p0));
    }
    for (j, &p) in sol.powers.p_priv.iter().enumerate() {
        if p < -params.eps_power {
            issues.push(format!("negative private power p[{j}] = {p}"));
        }
    }
    let total = sol.powers.total();
    if total > inst.p_max + params.eps_power {
        issues.push(format!(
            "total power {total} exceeds the budget {}",
            inst.p_max
        ));
    }
    if (total - inst.p_max).abs() > params.eps_power {
        issues.push(format!(
            "budget not tight: total power {total} vs {}",
            inst.p_max
        ));
    }
    if !sic_feasible(inst, &sol.powers, params.eps_power) {
        issues.push(format!(
            "detection gap violated: p0 - Σp = {:.6e} W under (θ+σ²)/h_1 = {:.6e} W",
            sol.powers.p0 - sol.powers.p_priv.iter().sum::<f64>(),
            (inst.theta + inst.sigma2) / inst.h[0]
        ));
    }
    let c1_actual = common_rate(inst, &sol.powers);
    let rate_tol = |x: f64| params.eps_rate.max(1e-9 * x.abs());
    if (c1_actual - sol.common_rate_c1).abs() > rate_tol(c1_actual) {
        issues.push(format!(
            "reported common rate {} vs recomputed {c1_actual}",
            sol.common_rate_c1
        ));
    }
    let sum_a = sol.rates.total();
    if (sum_a - sol.common_rate_c1).abs() > rate_tol(sum_a) {
        issues.push(format!(
            "common rate not fully allocated: Σa = {sum_a} vs c1 = {}",
            sol.common_rate_c1
        ));
    }
    let mut total_rate = 0.0;
    for j in 0..kk {
        let a_j = sol.rates.a[j];
        if a_j < -params.eps_rate {
            issues.push(format!("negative share a[{j}] = {a_j}"));
        }
        if j != sol.k_star && a_j > inst.r_min[j] + params.eps_rate {
            issues.push(format!(
                "share a[{j}] = {a_j} exceeds the demand {} on a non-lifted user",
                inst.r_min[j]
            ));
        }
        let recomputed = a_j + private_rate(inst, &sol.powers, j);
        if (recomputed - sol.user_total_rates[j]).abs() > rate_tol(recomputed) {
            issues.push(format!(
                "user {j} total rate {} vs recomputed {recomputed}",
                sol.user_total_rates[j]
            ));
        }
        if sol.user_total_rates[j] < inst.r_min[j] - params.eps_rate {
            issues.push(format!(
                "demand unmet for user {j}: {} < {}",
                sol.user_total_rates[j], inst.r_min[j]
            ));
        }
        // All users except k_star sit exactly at their minimum private power.
        if j != sol.k_star {
            if let Ok(pm) = p_min(inst, a_j.min(inst.r_min[j]), sol.powers.p0, j) {
                if (sol.powers.p_priv[j] - pm).abs()
                    > params.eps_power.max(1e-9 * pm.abs())
                {
                    issues.push(format!(
                        "private power p[{j}] = {} off its minimum {pm}",
                        sol.powers.p_priv[j]
                    ));
                }
            }
        }
        total_rate += sol.user_total_rates[j];
    }
    if (total_rate - sol.sum_rate).abs() > rate_tol(total_rate) {
        issues.push(format!(
            "sum rate {} vs per-user total {total_rate}",
            sol.sum_rate
        ));
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dbm_to_watt, ChannelParams};
    use proptest::prelude::*;

    fn table_instance(h: Vec<f64>, r: Vec<f64>) -> NetworkInstance {
        NetworkInstance::new(h, 3.9811e-14, 1e6, 1.0, 3.9811e-13, r).unwrap()
    }

    #[test]
    fn p0_bounds_direct_example() {
        // (θ+σ²)/h_1 = 0.04 with a positive threshold: h_1 = 100, σ² = 1, θ = 3.
        let inst =
            NetworkInstance::new(vec![100.0, 400.0], 1.0, 1.0, 1.0, 3.0, vec![0.5, 0.5]).unwrap();
        let (lower, upper) = p0_bounds(&inst);
        assert!((lower - 0.52).abs() < 1e-15);
        assert_eq!(upper, 1.0);
    }

    #[test]
    fn p0_bounds_from_table_pathloss() {
        // A 100 m drop under the default pathloss curve, no shadowing.
        let h1 = ChannelParams::default().pathloss_gain(0.1, 0.0).unwrap();
        let sigma2 = dbm_to_watt(-104.0);
        let theta = dbm_to_watt(-94.0);
        let inst = NetworkInstance::new(vec![h1], sigma2, 1e6, 1.0, theta, vec![1e6]).unwrap();
        let (lower, upper) = p0_bounds(&inst);
        let expected = 0.5
            + (10f64.powf(-12.4) + 10f64.powf(-13.4)) / (2.0 * 10f64.powf(-9.05));
        assert!((lower - expected).abs() <= 1e-12 * expected);
        assert!(lower <= upper);
    }

    #[test]
    fn empty_range_is_reported() {
        // Weak direct gain: the detection gap alone needs 4.4 W of headroom.
        let inst = table_instance(vec![1e-13, 4e-13], vec![1e6, 1e6]);
        let params = SolverParams::for_instance(&inst);
        match solve_rsma(&inst, &params) {
            Err(Error::EmptyP0Range { lower, p_max }) => {
                assert!(lower > 1.0);
                assert_eq!(p_max, 1.0);
            }
            other => panic!("expected an empty range, got {other:?}"),
        }
    }

    #[test]
    fn fast_p0_star_examples() {
        // Unit bandwidth and budget: max{0.55, 0.52} and the zero-demand case.
        assert!((fast_p0_star(1.0, 1.0, 1.0, 0.1, 0.04) - 0.55).abs() < 1e-15);
        assert!((fast_p0_star(1.0, 1.0, 0.0, 0.1, 0.04) - 0.52).abs() < 1e-15);
    }

    #[test]
    fn single_user_objective_is_flat_in_p0() {
        // With one user the split does not matter: every feasible p0 yields
        // the full single-user capacity at the total budget.
        let inst = table_instance(vec![1e-12], vec![1e6]);
        let capacity = 1e6 * (1.0f64 + 1e-12 / 3.9811e-14).log2();
        let params = SolverParams::for_instance(&inst);
        let (sol, trace) = solve_rsma(&inst, &params).unwrap();
        assert!((sol.sum_rate - capacity).abs() <= 1e-9 * capacity);
        for (&p0, &obj) in trace.p0_grid.iter().zip(&trace.objective_at_p0) {
            assert!(
                (obj - capacity).abs() <= 1e-9 * capacity,
                "objective {obj} at p0 {p0} off the flat capacity {capacity}"
            );
        }
        // A 50x finer grid cannot do better than a flat landscape.
        let fine = SolverParams::for_instance(&inst).with_xi(params.xi / 50.0);
        let (sol_fine, _) = solve_rsma(&inst, &fine).unwrap();
        assert!((sol_fine.sum_rate - sol.sum_rate).abs() <= 1e-9 * capacity);
        assert!(check_solution(&inst, &sol, &params).is_empty());
    }

    #[test]
    fn fast_path_matches_scan_when_rate_bound_dominates() {
        // Zero threshold keeps the gap bound at ~0.52 W while the demand
        // pushes the rate bound to ~0.67 W.
        let inst = NetworkInstance::new(
            vec![1e-12, 4e-12],
            3.9811e-14,
            1e6,
            1.0,
            0.0,
            vec![1.5e6, 1.5e6],
        )
        .unwrap();
        let params = SolverParams::for_instance(&inst).with_xi(1e-5);
        let (fast, trace) = solve_two_user_fast(&inst, &params).unwrap();
        assert_eq!(trace.path, SolvePath::TwoUserFast);
        let expected_p0 = (1.0 - (-1.5f64).exp2()) * (1.0 + 3.9811e-14 / 1e-12);
        assert!((fast.powers.p0 - expected_p0).abs() <= 1e-12);
        let (scan, scan_trace) = solve_rsma(&inst, &params).unwrap();
        let p0_scan = scan_trace.p0_grid[scan_trace.best_index];
        assert!(
            (fast.powers.p0 - p0_scan).abs() <= params.xi + 1e-12,
            "fast p0 {} vs scan p0 {p0_scan}",
            fast.powers.p0
        );
        assert!((fast.sum_rate - scan.sum_rate).abs() <= 1e-5 * scan.sum_rate);
        assert!(check_solution(&inst, &fast, &params).is_empty());
    }

    #[test]
    fn fast_path_matches_scan_when_gap_bound_dominates() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![1e6, 1e6]);
        let params = SolverParams::for_instance(&inst).with_xi(1e-5);
        let (fast, _) = solve_two_user_fast(&inst, &params).unwrap();
        let (lower, _) = p0_bounds(&inst);
        assert_eq!(fast.powers.p0, lower);
        let (scan, scan_trace) = solve_rsma(&inst, &params).unwrap();
        let p0_scan = scan_trace.p0_grid[scan_trace.best_index];
        assert!((fast.powers.p0 - p0_scan).abs() <= params.xi + 1e-12);
        assert!((fast.sum_rate - scan.sum_rate).abs() <= 1e-5 * scan.sum_rate);
    }

    #[test]
    fn zero_demand_fast_path_sits_at_the_gap_bound() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![0.0, 0.0]);
        let params = SolverParams::for_instance(&inst);
        let (sol, trace) = solve_two_user_fast(&inst, &params).unwrap();
        assert_eq!(trace.path, SolvePath::TwoUserFast);
        let (lower, _) = p0_bounds(&inst);
        assert_eq!(sol.powers.p0, lower);
        assert!(check_solution(&inst, &sol, &params).is_empty());
    }

    #[test]
    fn auto_dispatch_routes_by_shape() {
        let params_for = SolverParams::for_instance;
        let two_equal = table_instance(vec![1e-12, 4e-12], vec![1e6, 1e6]);
        let (_, t) = solve_rsma_auto(&two_equal, &params_for(&two_equal)).unwrap();
        assert_eq!(t.path, SolvePath::TwoUserFast);

        let three_equal = table_instance(vec![1e-12, 2e-12, 4e-12], vec![1e6, 1e6, 1e6]);
        let (_, t) = solve_rsma_auto(&three_equal, &params_for(&three_equal)).unwrap();
        assert_eq!(t.path, SolvePath::EqualDemand);
        // One fill per grid point: the equal-demand scan is linear in the grid.
        assert_eq!(t.candidates_evaluated, t.p0_grid.len() as u64);

        let mixed = table_instance(vec![1e-12, 2e-12, 4e-12], vec![5e5, 1e6, 2e6]);
        let (_, t) = solve_rsma_auto(&mixed, &params_for(&mixed)).unwrap();
        assert_eq!(t.path, SolvePath::General);
    }

    #[test]
    fn equal_demand_scan_agrees_with_enumeration_scan() {
        let inst = table_instance(vec![8e-13, 2e-12, 5e-12], vec![8e5, 8e5, 8e5]);
        let params = SolverParams::for_instance(&inst);
        let (general, _) = solve_rsma(&inst, &params).unwrap();
        let (equal, _) = solve_rsma_equal(&inst, &params).unwrap();
        assert!(
            (general.sum_rate - equal.sum_rate).abs() <= 1e-9 * general.sum_rate,
            "general {} vs equal {}",
            general.sum_rate,
            equal.sum_rate
        );
    }

    #[test]
    fn halving_the_step_never_loses_objective() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![5e5, 1.8e6]);
        let coarse = SolverParams::for_instance(&inst);
        let half = coarse.clone().with_xi(coarse.xi / 2.0);
        let quarter = coarse.clone().with_xi(coarse.xi / 4.0);
        let (s0, t0) = solve_rsma(&inst, &coarse).unwrap();
        let (s1, t1) = solve_rsma(&inst, &half).unwrap();
        let (s2, t2) = solve_rsma(&inst, &quarter).unwrap();
        assert!(s1.sum_rate >= s0.sum_rate - 1e-12);
        assert!(s2.sum_rate >= s1.sum_rate - 1e-12);
        // The halved grid contains every coarse point bitwise.
        for (i, &p0) in t0.p0_grid.iter().enumerate().take(t0.p0_grid.len() - 1) {
            assert_eq!(p0, t1.p0_grid[2 * i], "halved grid lost point {i}");
        }
        assert_eq!(t0.p0_grid.last(), t1.p0_grid.last());
        // Work scales with the grid.
        let ratio = t1.candidates_evaluated as f64 / t0.candidates_evaluated as f64;
        assert!((1.8..=2.2).contains(&ratio), "work ratio {ratio}");
        let ratio = t2.candidates_evaluated as f64 / t1.candidates_evaluated as f64;
        assert!((1.8..=2.2).contains(&ratio), "work ratio {ratio}");
    }

    #[test]
    fn oversubscribed_demands_report_the_power_deficit() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![6e6, 6e6]);
        let params = SolverParams::for_instance(&inst);
        match solve_rsma(&inst, &params) {
            Err(Error::Infeasible(Infeasibility::NoFeasibleP0 { p0_lower, detail })) => {
                assert!(p0_lower > 0.5);
                assert!(detail.contains("private power"), "detail: {detail}");
            }
            other => panic!("expected no feasible p0, got {other:?}"),
        }
    }

    #[test]
    fn residual_credit_restores_the_common_rate() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![1e6, 1e6]);
        let params = SolverParams::for_instance(&inst);
        let (sol, _) = solve_rsma_auto(&inst, &params).unwrap();
        assert!((sol.rates.total() - sol.common_rate_c1).abs() <= params.eps_rate);
        // Only the lifted user may exceed its demand.
        for j in 0..2 {
            if j != sol.k_star {
                assert!(sol.rates.a[j] <= inst.r_min[j] + params.eps_rate);
            }
            assert!(sol.user_total_rates[j] >= inst.r_min[j] - params.eps_rate);
        }
        assert!(check_solution(&inst, &sol, &params).is_empty());
    }

    #[test]
    fn check_solution_flags_tampering() {
        let inst = table_instance(vec![1e-12, 4e-12], vec![1e6, 1e6]);
        let params = SolverParams::for_instance(&inst);
        let (sol, _) = solve_rsma_auto(&inst, &params).unwrap();
        assert!(check_solution(&inst, &sol, &params).is_empty());

        let mut over = sol.clone();
        over.powers.p0 += 0.2;
        assert!(check_solution(&inst, &over, &params)
            .iter()
            .any(|m| m.contains("exceeds the budget")));

        // Starve the private streams and keep the record self-consistent so
        // the demand check itself is what fires.
        let mut starved = sol.clone();
        starved.powers.p_priv = vec![0.0, 0.0];
        for j in 0..2 {
            starved.user_total_rates[j] =
                starved.rates.a[j] + private_rate(&inst, &starved.powers, j);
        }
        starved.sum_rate = starved.user_total_rates.iter().sum();
        let issues = check_solution(&inst, &starved, &params);
        assert!(issues.iter().any(|m| m.contains("demand unmet")), "{issues:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Any dropped topology either solves cleanly or reports a structured
        // infeasibility; a returned solution survives full revalidation.
        #[test]
        fn auto_solves_or_reports(seed in 0u64..5000, k in 1usize..4) {
            let ch = crate::channel::ChannelParams::default();
            let gains = ch.drop_users_stream(k, seed).unwrap();
            let inst = NetworkInstance::new(
                gains,
                dbm_to_watt(-104.0),
                1e6,
                dbm_to_watt(30.0),
                dbm_to_watt(-94.0),
                vec![1e6; k],
            ).unwrap();
            let params = SolverParams::for_instance(&inst);
            match solve_rsma_auto(&inst, &params) {
                Ok((sol, trace)) => {
                    let issues = check_solution(&inst, &sol, &params);
                    prop_assert!(issues.is_empty(), "{issues:?}");
                    prop_assert_eq!(trace.p0_grid.len(), trace.objective_at_p0.len());
                    prop_assert!(trace.objective_at_p0[trace.best_index].is_finite());
                }
                Err(Error::Infeasible(_)) | Err(Error::EmptyP0Range { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e:?}"))),
            }
        }
    }
}

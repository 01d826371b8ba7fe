//! Closed-form private power allocation for fixed common power and shares.
//!
//! With the budget spent in full, user k's private rate is
//! `B log2((h_k (P - p0) + σ²) / (h_k (P - p0 - p_k) + σ²))`, so meeting the
//! residual demand `R_k - a_k` pins a minimum private power
//!
//! ```text
//! p_k_min = (1 - 2^((a_k - R_k)/B)) · (P - p0 + σ²/h_k)
//! ```
//!
//! The allocation is feasible iff these minimums fit into `P - p0`, and at
//! the optimum exactly one user is lifted above its minimum: the one with the
//! smallest `2^((a_k - R_k)/B) · (P - p0 + σ²/h_k)`, which absorbs the whole
//! remaining budget. Everyone else transmits at the minimum, so their private
//! rates sit exactly at `R_k - a_k` and the private sum rate collapses to a
//! closed form evaluated here.

use crate::error::{Error, Infeasibility, Result};
use crate::model::{NetworkInstance, DEFAULT_EPS_POWER, DEFAULT_EPS_RATE};

/// Output of [`optimal_private_power`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrivatePowerResult {
    pub p_priv: Vec<f64>,
    /// The single user lifted above its minimum power.
    pub k_star: usize,
    /// Optimal value of the private sum rate, bit/s.
    pub private_sum_rate: f64,
}

/// Minimum private power for user `k` given its share `a_k` of the common
/// rate and the common power `p0`. Zero when the share already covers the
/// demand; approaches the full `P - p0 + σ²/h_k` as the residual demand grows.
pub fn p_min(inst: &NetworkInstance, a_k: f64, p0: f64, k: usize) -> Result<f64> {
    if k >= inst.num_users() {
        return Err(Error::Domain(format!("user index {k} out of range")));
    }
    if !(0.0..=inst.p_max + DEFAULT_EPS_POWER).contains(&p0) {
        return Err(Error::Domain(format!(
            "p0 = {p0} W outside [0, {}]",
            inst.p_max
        )));
    }
    if a_k < -DEFAULT_EPS_RATE {
        return Err(Error::Domain(format!("negative share a_k = {a_k}")));
    }
    if a_k > inst.r_min[k] + DEFAULT_EPS_RATE {
        return Err(Error::Infeasible(Infeasibility::RateCap {
            user: k,
            share: a_k,
            demand: inst.r_min[k],
        }));
    }
    let budget = (inst.p_max - p0).max(0.0);
    Ok(pmin_raw(inst, a_k, budget, k))
}

/// `p_min` without the argument screening; callers guarantee `a_k <= R_k`.
/// `budget` is `P - p0`.
#[inline]
pub(crate) fn pmin_raw(inst: &NetworkInstance, a_k: f64, budget: f64, k: usize) -> f64 {
    let coeff = budget + inst.noise_over_gain(k);
    let frac = 1.0 - ((a_k - inst.r_min[k]) / inst.bandwidth).exp2();
    (frac * coeff).max(0.0)
}

/// True iff the minimum private powers fit the remaining budget:
/// `Σ_k p_k_min <= P - p0 + eps_power`.
pub fn feasible_rate_power(inst: &NetworkInstance, a: &[f64], p0: f64) -> Result<bool> {
    check_shares(inst, a, p0)?;
    let budget = (inst.p_max - p0).max(0.0);
    let need: f64 = (0..inst.num_users()).map(|k| pmin_raw(inst, a[k], budget, k)).sum();
    Ok(need <= budget + DEFAULT_EPS_POWER)
}

/// The user that absorbs the leftover private power at the optimum:
/// `argmin_k 2^((a_k - R_k)/B) (P - p0 + σ²/h_k)`, evaluated in the log
/// domain so huge demands cannot underflow, ties broken toward the largest
/// index (the strongest user).
pub fn select_k_star(inst: &NetworkInstance, a: &[f64], p0: f64) -> usize {
    let budget = (inst.p_max - p0).max(0.0);
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for k in 0..inst.num_users() {
        let v = (a[k] - inst.r_min[k]) / inst.bandwidth
            + (budget + inst.noise_over_gain(k)).log2();
        if v <= best_val {
            best_val = v;
            best = k;
        }
    }
    best
}

/// Optimal private powers for fixed shares `a` and common power `p0`.
///
/// Errors with [`Infeasibility::RateCap`] when some share exceeds its demand
/// and with [`Infeasibility::PowerBudget`] when the minimums do not fit.
/// The SIC gap is *not* screened here; that is the outer search's constraint
/// on `p0`, and skipping it lets the broadcast baseline reuse this routine
/// with `p0 = 0`.
pub fn optimal_private_power(
    inst: &NetworkInstance,
    a: &[f64],
    p0: f64,
) -> Result<PrivatePowerResult> {
    check_shares(inst, a, p0)?;
    for k in 0..inst.num_users() {
        if a[k] > inst.r_min[k] + DEFAULT_EPS_RATE {
            return Err(Error::Infeasible(Infeasibility::RateCap {
                user: k,
                share: a[k],
                demand: inst.r_min[k],
            }));
        }
    }
    let budget = (inst.p_max - p0).max(0.0);
    let mins: Vec<f64> = (0..inst.num_users()).map(|k| pmin_raw(inst, a[k], budget, k)).collect();
    let need: f64 = mins.iter().sum();
    if need > budget + DEFAULT_EPS_POWER {
        return Err(Error::Infeasible(Infeasibility::PowerBudget {
            required: need,
            available: budget,
        }));
    }
    let k_star = select_k_star(inst, a, p0);
    let others: f64 = need - mins[k_star];
    let mut p_priv = mins;
    p_priv[k_star] = (budget - others).max(0.0);

    // Closed form: the lifted user rides the whole leftover, everyone else
    // delivers exactly the residual demand.
    let coeff_k = budget + inst.noise_over_gain(k_star);
    let mut rate = inst.bandwidth * (coeff_k / (others + inst.noise_over_gain(k_star))).log2();
    for j in 0..inst.num_users() {
        if j != k_star {
            rate += inst.r_min[j] - a[j];
        }
    }
    Ok(PrivatePowerResult { p_priv, k_star, private_sum_rate: rate })
}

fn check_shares(inst: &NetworkInstance, a: &[f64], p0: f64) -> Result<()> {
    if a.len() != inst.num_users() {
        return Err(Error::Domain(format!(
            "{} shares for {} users",
            a.len(),
            inst.num_users()
        )));
    }
    if a.iter().any(|x| !x.is_finite() || *x < -DEFAULT_EPS_RATE) {
        return Err(Error::Domain("shares must be nonnegative and finite".into()));
    }
    if !(0.0..=inst.p_max + DEFAULT_EPS_POWER).contains(&p0) {
        return Err(Error::Domain(format!("p0 = {p0} W outside [0, {}]", inst.p_max)));
    }
    Ok(())
}

//! Problem data and the raw rate expressions.
//!
//! An instance is a single-cell downlink: one transmitter, `K` receivers with
//! channel power gains sorted ascending (`h[0]` is the weakest user), additive
//! noise power `sigma2` over bandwidth `bandwidth`, total transmit budget
//! `p_max`, SIC detection threshold `theta`, and per-user rate demands
//! `r_min`. The transmit signal superposes one common stream at power `p0`
//! (decoded by everyone, then cancelled) and `K` private streams at powers
//! `p_priv[k]` (each user decodes only its own, treating the rest as noise).
//!
//! Rates follow Shannon capacity with interference treated as noise:
//!
//! * common stream at user k: `B log2(1 + h_k p0 / (h_k Σ_j p_j + σ²))`;
//!   the minimum over users is attained at the weakest user, and only that
//!   minimum is a usable common rate.
//! * private stream of user k: `B log2(1 + h_k p_k / (h_k Σ_{j≠k} p_j + σ²))`.
//!
//! Successful decode-and-cancel of the common stream additionally needs a
//! power gap at every receiver; the weakest user is binding there too:
//! `p0 - Σ_j p_j >= (θ + σ²) / h_1`.

use crate::error::{Error, Result};

/// One downlink instance. Construct through [`NetworkInstance::new`], which
/// enforces the ascending-gain convention the closed forms rely on.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    /// Channel power gains, ascending. `h[0]` is the weakest user.
    pub h: Vec<f64>,
    /// Noise power over the full band, in watts.
    pub sigma2: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// Total transmit power budget, in watts.
    pub p_max: f64,
    /// SIC detection threshold, in watts.
    pub theta: f64,
    /// Per-user rate demands in bit/s, aligned with `h`.
    pub r_min: Vec<f64>,
}

impl NetworkInstance {
    pub fn new(
        h: Vec<f64>,
        sigma2: f64,
        bandwidth: f64,
        p_max: f64,
        theta: f64,
        r_min: Vec<f64>,
    ) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Domain("need at least one user".into()));
        }
        if h.len() != r_min.len() {
            return Err(Error::Domain(format!(
                "{} gains but {} rate demands",
                h.len(),
                r_min.len()
            )));
        }
        if !h.iter().all(|g| g.is_finite() && *g > 0.0) {
            return Err(Error::Domain("channel gains must be positive and finite".into()));
        }
        if h.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain(
                "channel gains must be sorted ascending (weakest user first)".into(),
            ));
        }
        if !(sigma2 > 0.0) || !(bandwidth > 0.0) || !(p_max > 0.0) {
            return Err(Error::Domain(format!(
                "sigma2, bandwidth, p_max must be positive (got {sigma2}, {bandwidth}, {p_max})"
            )));
        }
        if !(theta >= 0.0) {
            return Err(Error::Domain(format!("theta must be nonnegative, got {theta}")));
        }
        if !r_min.iter().all(|r| r.is_finite() && *r >= 0.0) {
            return Err(Error::Domain("rate demands must be nonnegative and finite".into()));
        }
        Ok(NetworkInstance { h, sigma2, bandwidth, p_max, theta, r_min })
    }

    pub fn num_users(&self) -> usize {
        self.h.len()
    }

    /// Noise-to-gain ratio `σ²/h_k`, the per-user equivalent noise power.
    pub fn noise_over_gain(&self, k: usize) -> f64 {
        self.sigma2 / self.h[k]
    }

    /// If all demands agree within `eps_rate`, returns the common demand.
    pub fn equal_demand(&self, eps_rate: f64) -> Option<f64> {
        let r0 = self.r_min[0];
        if self.r_min.iter().all(|r| (r - r0).abs() <= eps_rate) {
            Some(r0)
        } else {
            None
        }
    }
}

/// Common-rate shares `a_k`, in bit/s, aligned with the instance's users.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    pub a: Vec<f64>,
}

impl RateVector {
    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }
}

/// Transmit powers: the common stream plus one private power per user.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub p0: f64,
    pub p_priv: Vec<f64>,
}

impl PowerAllocation {
    /// Total radiated power `p0 + Σ_k p_k`.
    pub fn total(&self) -> f64 {
        self.p0 + self.p_priv.iter().sum::<f64>()
    }
}

/// A complete solver output.
///
/// `rates.a` holds the reported common-rate shares after the full common rate
/// has been handed out: every share except `k_star`'s equals its capped
/// value, and user `k_star` absorbs the residual `c1 - Σ a_k`, which can push
/// that single share above its demand. `user_total_rates[k]` is
/// `a_k + private rate of k`, so it meets `r_min[k]` for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct RsmaSolution {
    pub rates: RateVector,
    pub powers: PowerAllocation,
    /// The one user whose private power exceeds its minimum (all others sit
    /// exactly at theirs).
    pub k_star: usize,
    /// Common rate `c_1` at the chosen `p0` with a tight power budget.
    pub common_rate_c1: f64,
    pub user_total_rates: Vec<f64>,
    pub sum_rate: f64,
}

/// Solver tolerances and the common-power step size.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Common-power scan step, in watts.
    pub xi: f64,
    /// Tolerance for rate comparisons, bit/s.
    pub eps_rate: f64,
    /// Tolerance for power comparisons, watts.
    pub eps_power: f64,
    /// Root residual tolerance for the two-share boundary equation, relative
    /// to the private power budget.
    pub root_tol: f64,
}

pub const DEFAULT_EPS_RATE: f64 = 1e-6;
pub const DEFAULT_EPS_POWER: f64 = 1e-12;
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
/// Default number of scan steps across the common-power interval.
pub const DEFAULT_GRID_STEPS: f64 = 2000.0;

impl SolverParams {
    /// Defaults for an instance: the scan step spans the feasible
    /// common-power interval in [`DEFAULT_GRID_STEPS`] steps.
    pub fn for_instance(inst: &NetworkInstance) -> Self {
        let lower = inst.p_max / 2.0 + (inst.theta + inst.sigma2) / (2.0 * inst.h[0]);
        let width = (inst.p_max - lower).max(0.0);
        let xi = if width > 0.0 { width / DEFAULT_GRID_STEPS } else { inst.p_max / DEFAULT_GRID_STEPS };
        SolverParams {
            xi,
            eps_rate: DEFAULT_EPS_RATE,
            eps_power: DEFAULT_EPS_POWER,
            root_tol: DEFAULT_ROOT_TOL,
        }
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }
}

/// Rate of the common stream as seen by the *weakest* user, which is the
/// usable common rate: `B log2(1 + h_1 p0 / (h_1 Σ_j p_j + σ²))`.
pub fn common_rate(inst: &NetworkInstance, p: &PowerAllocation) -> f64 {
    let h1 = inst.h[0];
    let interf: f64 = p.p_priv.iter().sum();
    inst.bandwidth * (1.0 + h1 * p.p0 / (h1 * interf + inst.sigma2)).log2()
}

/// Common rate when the power budget is spent in full (`Σ_j p_j = P - p0`),
/// which holds at every optimum: `B log2((h_1 P + σ²) / (h_1 (P - p0) + σ²))`.
pub fn common_rate_tight(inst: &NetworkInstance, p0: f64) -> f64 {
    let h1 = inst.h[0];
    inst.bandwidth
        * ((h1 * inst.p_max + inst.sigma2) / (h1 * (inst.p_max - p0) + inst.sigma2)).log2()
}

/// Private rate of user `k` with everyone else's private streams as noise:
/// `B log2(1 + h_k p_k / (h_k Σ_{j≠k} p_j + σ²))`.
pub fn private_rate(inst: &NetworkInstance, p: &PowerAllocation, k: usize) -> f64 {
    let hk = inst.h[k];
    let others: f64 = p.p_priv.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| *v).sum();
    inst.bandwidth * (1.0 + hk * p.p_priv[k] / (hk * others + inst.sigma2)).log2()
}

/// True iff the SIC power gap holds at the weakest user (hence at everyone):
/// `p0 - Σ_j p_j >= (θ + σ²)/h_1 - eps_power`.
pub fn sic_feasible(inst: &NetworkInstance, p: &PowerAllocation, eps_power: f64) -> bool {
    let interf: f64 = p.p_priv.iter().sum();
    p.p0 - interf >= (inst.theta + inst.sigma2) / inst.h[0] - eps_power
}

//! Optimal common-rate shares for a fixed common power.
//!
//! For fixed `p0` the remaining problem picks shares `a` of the common rate
//! to maximize the private sum rate plus the handed-out shares, subject to
//! `Σ a_j <= c1`, the demand caps `0 <= a_j <= R_j`, and the private power
//! budget `Σ p_j_min(a_j) <= P - p0`. The reduced objective (with the lifted
//! user `k` chosen as in [`crate::private_power::select_k_star`]) is convex
//! in `a`, so the maximum sits at a corner of the feasible set. Corners come
//! in three families, enumerated exhaustively here:
//!
//! 1. every share at a box face: `a_j ∈ {0, R_j}`;
//! 2. one share interior, pinned by a single tight constraint: either the
//!    share sum (`Σ a_j = c1`) or the power budget;
//! 3. two shares interior with both constraints tight: one share eliminated
//!    through the sum constraint, the other solved from the budget equation,
//!    which is strictly concave in that share and therefore crosses the
//!    budget level at most twice.
//!
//! For equal demands the enumeration collapses: filling the weakest users
//! first is provably optimal, giving an O(K) path.

use crate::error::{Error, Infeasibility, Result};
use crate::model::{NetworkInstance, RateVector, SolverParams};
use crate::private_power::pmin_raw;

/// Which corner family produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// All shares on box faces.
    Case1,
    /// One share pinned by a single tight constraint.
    Case2,
    /// Two shares pinned by both constraints tight.
    Case3,
}

/// Which of the coupling constraints is tight at a candidate by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    /// Only box faces are active.
    Neither,
    /// The share sum equals the common rate `c1`.
    CommonRate,
    /// The minimum private powers exhaust the budget.
    PowerBudget,
    /// Both coupling constraints are tight.
    Both,
}

/// One feasibility-screened corner candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerCandidate {
    pub a: RateVector,
    pub case_tag: CaseTag,
    pub binding: Binding,
    /// Reduced objective value at this corner, bit/s.
    pub objective: f64,
    /// The lifted user at this corner.
    pub k_star: usize,
}

/// Per-`p0` constants shared by every candidate evaluation.
pub(crate) struct P0Context {
    pub c1: f64,
    /// Private power budget `P - p0`.
    pub budget: f64,
    /// `P - p0 + σ²/h_j` per user.
    pub coeff: Vec<f64>,
    /// `σ²/h_j` per user.
    pub w: Vec<f64>,
    pub log2_coeff: Vec<f64>,
    /// Minimum private power at zero share, per user.
    pub pmin_zero: Vec<f64>,
}

impl P0Context {
    pub fn new(inst: &NetworkInstance, p0: f64, c1: f64) -> Self {
        let k = inst.num_users();
        let budget = (inst.p_max - p0).max(0.0);
        let w: Vec<f64> = (0..k).map(|j| inst.noise_over_gain(j)).collect();
        let coeff: Vec<f64> = w.iter().map(|wj| budget + wj).collect();
        let log2_coeff: Vec<f64> = coeff.iter().map(|c| c.log2()).collect();
        let pmin_zero: Vec<f64> = (0..k).map(|j| pmin_raw(inst, 0.0, budget, j)).collect();
        P0Context { c1, budget, coeff, w, log2_coeff, pmin_zero }
    }

    #[inline]
    pub(crate) fn pmin(&self, inst: &NetworkInstance, j: usize, a_j: f64) -> f64 {
        if a_j == 0.0 {
            self.pmin_zero[j]
        } else if a_j == inst.r_min[j] {
            0.0
        } else {
            let frac = 1.0 - ((a_j - inst.r_min[j]) / inst.bandwidth).exp2();
            (frac * self.coeff[j]).max(0.0)
        }
    }

    /// Screens the coupling constraints and evaluates the reduced objective.
    /// Box membership is the caller's job (candidates are clamped on build).
    fn eval(&self, inst: &NetworkInstance, a: &[f64], params: &SolverParams) -> Option<(f64, usize)> {
        let kk = inst.num_users();
        let sum_a: f64 = a.iter().sum();
        if sum_a > self.c1 + params.eps_rate {
            return None;
        }
        let mut total_min = 0.0;
        for j in 0..kk {
            total_min += self.pmin(inst, j, a[j]);
        }
        if total_min > self.budget + params.eps_power {
            return None;
        }
        let k = self.argmin_lifted(inst, a);
        Some((self.objective_at(inst, a, total_min, k), k))
    }

    #[inline]
    fn argmin_lifted(&self, inst: &NetworkInstance, a: &[f64]) -> usize {
        let mut best = 0usize;
        let mut best_val = f64::INFINITY;
        for j in 0..inst.num_users() {
            let v = (a[j] - inst.r_min[j]) / inst.bandwidth + self.log2_coeff[j];
            if v <= best_val {
                best_val = v;
                best = j;
            }
        }
        best
    }

    #[inline]
    fn objective_at(&self, inst: &NetworkInstance, a: &[f64], total_min: f64, k: usize) -> f64 {
        let others = (total_min - self.pmin(inst, k, a[k])).max(0.0);
        let mut obj = inst.bandwidth * (self.log2_coeff[k] - (others + self.w[k]).log2());
        for j in 0..inst.num_users() {
            if j != k {
                obj += inst.r_min[j] - a[j];
            }
        }
        obj
    }
}

fn validate_p0_c1(inst: &NetworkInstance, p0: f64, c1: f64) -> Result<()> {
    if !(0.0..=inst.p_max + 1e-12).contains(&p0) {
        return Err(Error::Domain(format!("p0 = {p0} W outside [0, {}]", inst.p_max)));
    }
    if !c1.is_finite() || c1 < 0.0 {
        return Err(Error::Domain(format!("c1 must be nonnegative and finite, got {c1}")));
    }
    Ok(())
}

/// Evaluates the reduced objective at `(a, p0)`, screening only the
/// constraints expressible without `c1` (demand caps and power budget).
pub fn rate_objective(inst: &NetworkInstance, a: &[f64], p0: f64) -> Result<f64> {
    if a.len() != inst.num_users() {
        return Err(Error::Domain(format!("{} shares for {} users", a.len(), inst.num_users())));
    }
    validate_p0_c1(inst, p0, 0.0)?;
    let ctx = P0Context::new(inst, p0, f64::INFINITY);
    let mut total_min = 0.0;
    for j in 0..inst.num_users() {
        if a[j] < -crate::model::DEFAULT_EPS_RATE {
            return Err(Error::Domain(format!("negative share a[{j}] = {}", a[j])));
        }
        if a[j] > inst.r_min[j] + crate::model::DEFAULT_EPS_RATE {
            return Err(Error::Infeasible(Infeasibility::RateCap {
                user: j,
                share: a[j],
                demand: inst.r_min[j],
            }));
        }
        total_min += ctx.pmin(inst, j, a[j].clamp(0.0, inst.r_min[j]));
    }
    if total_min > ctx.budget + crate::model::DEFAULT_EPS_POWER {
        return Err(Error::Infeasible(Infeasibility::PowerBudget {
            required: total_min,
            available: ctx.budget,
        }));
    }
    let k = ctx.argmin_lifted(inst, a);
    Ok(ctx.objective_at(inst, a, total_min, k))
}

/// The reduced objective with the lifted user forced to `k`, with no
/// feasibility screening. This is the function whose convexity and
/// monotonicity the property suites check.
pub fn objective_fixed_k(inst: &NetworkInstance, a: &[f64], p0: f64, k: usize) -> Result<f64> {
    if a.len() != inst.num_users() || k >= inst.num_users() {
        return Err(Error::Domain("share/user index mismatch".into()));
    }
    validate_p0_c1(inst, p0, 0.0)?;
    let ctx = P0Context::new(inst, p0, f64::INFINITY);
    let mut total_min = 0.0;
    for j in 0..inst.num_users() {
        total_min += ctx.pmin(inst, j, a[j]);
    }
    Ok(ctx.objective_at(inst, a, total_min, k))
}

/// Roots (at most two) of the tight-budget equation for the share `a_n`,
/// with `a_m` eliminated through the tight share sum and every other share
/// held at `fixed`. The left side is strictly concave in `a_n`, so the
/// routine brackets its maximum by bisecting the derivative's sign change
/// and then bisects each monotone flank for a crossing of the budget level.
pub fn solve_case3_root(
    inst: &NetworkInstance,
    p0: f64,
    fixed: &[f64],
    m: usize,
    n: usize,
    c1: f64,
    params: &SolverParams,
) -> Result<Vec<f64>> {
    if m == n || m >= inst.num_users() || n >= inst.num_users() || fixed.len() != inst.num_users() {
        return Err(Error::Domain("case-3 indices out of range".into()));
    }
    validate_p0_c1(inst, p0, c1)?;
    let ctx = P0Context::new(inst, p0, c1);
    Ok(case3_roots(inst, &ctx, fixed, m, n, params))
}

fn case3_roots(
    inst: &NetworkInstance,
    ctx: &P0Context,
    fixed: &[f64],
    m: usize,
    n: usize,
    params: &SolverParams,
) -> Vec<f64> {
    let kk = inst.num_users();
    let b = inst.bandwidth;
    let mut others_pmin = 0.0;
    let mut others_a = 0.0;
    for j in 0..kk {
        if j != m && j != n {
            others_pmin += ctx.pmin(inst, j, fixed[j]);
            others_a += fixed[j];
        }
    }
    // a_m(a_n) = cm - a_n keeps the share sum at c1.
    let cm = ctx.c1 - others_a;
    let target = ctx.budget - others_pmin;
    let (coeff_m, coeff_n) = (ctx.coeff[m], ctx.coeff[n]);
    let (r_m, r_n) = (inst.r_min[m], inst.r_min[n]);

    // phi(a_n) = p_m_min(cm - a_n) + p_n_min(a_n); strictly concave.
    let phi = |a_n: f64| -> f64 {
        let u_m = ((cm - a_n - r_m) / b).exp2();
        let u_n = ((a_n - r_n) / b).exp2();
        (1.0 - u_m) * coeff_m + (1.0 - u_n) * coeff_n
    };
    // Sign of phi': positive where the m-term still dominates.
    let dphi = |a_n: f64| -> f64 {
        coeff_m * ((cm - a_n - r_m) / b).exp2() - coeff_n * ((a_n - r_n) / b).exp2()
    };

    let (lo, hi) = (0.0, r_n);
    if hi <= lo {
        return Vec::new();
    }
    let atol = (hi - lo) * 2f64.powi(-52);

    // Locate the interior maximum (if any): phi' is strictly decreasing.
    let d_lo = dphi(lo);
    let d_hi = dphi(hi);
    let crest = if d_lo <= 0.0 {
        lo
    } else if d_hi >= 0.0 {
        hi
    } else {
        let (mut a, mut bnd) = (lo, hi);
        for _ in 0..params_iter_cap(params) {
            let mid = 0.5 * (a + bnd);
            if dphi(mid) > 0.0 {
                a = mid;
            } else {
                bnd = mid;
            }
            if bnd - a <= atol {
                break;
            }
        }
        0.5 * (a + bnd)
    };

    let mut roots = Vec::with_capacity(2);
    // Rising flank [lo, crest]: phi increasing.
    if crest > lo {
        push_flank_root(phi, lo, crest, target, true, atol, params, &mut roots);
    }
    // Falling flank [crest, hi]: phi decreasing.
    if hi > crest {
        push_flank_root(phi, crest, hi, target, false, atol, params, &mut roots);
    }
    // Tangency produces the same root from both flanks.
    if roots.len() == 2 && (roots[0] - roots[1]).abs() <= 16.0 * atol.max(f64::EPSILON * hi) {
        roots.pop();
    }
    // Residual screening: only keep roots that actually meet the budget.
    let resid_tol = params.root_tol * ctx.budget + 1e3 * f64::EPSILON * (coeff_m + coeff_n);
    roots.retain(|r| (phi(*r) - target).abs() <= resid_tol);
    roots
}

fn params_iter_cap(_params: &SolverParams) -> usize {
    200
}

#[allow(clippy::too_many_arguments)]
fn push_flank_root(
    phi: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    rising: bool,
    atol: f64,
    params: &SolverParams,
    roots: &mut Vec<f64>,
) {
    let f_lo = phi(lo) - target;
    let f_hi = phi(hi) - target;
    let (mut neg, mut pos) = if rising {
        if f_lo > 0.0 || f_hi < 0.0 {
            return;
        }
        (lo, hi)
    } else {
        if f_hi > 0.0 || f_lo < 0.0 {
            return;
        }
        (hi, lo)
    };
    for _ in 0..params_iter_cap(params) {
        let mid = 0.5 * (neg + pos);
        if phi(mid) - target < 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
        if (pos - neg).abs() <= atol {
            break;
        }
    }
    roots.push(0.5 * (neg + pos));
}

/// Walks every corner candidate (clamped into the demand box) and hands it to
/// `f` together with its case tag and tight-constraint label. Candidates are
/// raw: screening happens in the consumer.
fn for_each_candidate(
    inst: &NetworkInstance,
    ctx: &P0Context,
    params: &SolverParams,
    mut f: impl FnMut(&[f64], CaseTag, Binding),
) {
    let kk = inst.num_users();
    let r = &inst.r_min;
    let mut a = vec![0.0; kk];

    // Case 1: all shares on box faces.
    for mask in 0u64..(1u64 << kk) {
        for j in 0..kk {
            a[j] = if mask >> j & 1 == 1 { r[j] } else { 0.0 };
        }
        f(&a, CaseTag::Case1, Binding::Neither);
    }

    // Case 2: one pinned share, the rest on faces.
    let mut others: Vec<usize> = Vec::with_capacity(kk - 1);
    for l in 0..kk {
        others.clear();
        others.extend((0..kk).filter(|j| *j != l));
        for mask in 0u64..(1u64 << others.len()) {
            let mut sum_others = 0.0;
            let mut pmin_others = 0.0;
            for (bit, &j) in others.iter().enumerate() {
                a[j] = if mask >> bit & 1 == 1 { r[j] } else { 0.0 };
                sum_others += a[j];
                pmin_others += ctx.pmin(inst, j, a[j]);
            }
            // Tight share sum.
            a[l] = (ctx.c1 - sum_others).clamp(0.0, r[l]);
            f(&a, CaseTag::Case2, Binding::CommonRate);
            // Tight power budget: p_l_min must equal the leftover budget.
            let t = ctx.budget - pmin_others;
            if ctx.coeff[l] - t > 0.0 {
                let cand = r[l] + inst.bandwidth * ((ctx.coeff[l] - t) / ctx.coeff[l]).log2();
                if cand.is_finite() {
                    a[l] = cand.clamp(0.0, r[l]);
                    f(&a, CaseTag::Case2, Binding::PowerBudget);
                }
            }
        }
    }

    // Case 3: both constraints tight, two interior shares.
    if kk >= 2 {
        let mut rest: Vec<usize> = Vec::with_capacity(kk - 2);
        for m in 0..kk {
            for n in 0..kk {
                if m == n {
                    continue;
                }
                rest.clear();
                rest.extend((0..kk).filter(|j| *j != m && *j != n));
                for mask in 0u64..(1u64 << rest.len()) {
                    let mut sum_rest = 0.0;
                    for (bit, &j) in rest.iter().enumerate() {
                        a[j] = if mask >> bit & 1 == 1 { r[j] } else { 0.0 };
                        sum_rest += a[j];
                    }
                    let cm = ctx.c1 - sum_rest;
                    for root in case3_roots(inst, ctx, &a, m, n, params) {
                        let a_m = cm - root;
                        if !(-params.eps_rate..=r[m] + params.eps_rate).contains(&a_m) {
                            continue;
                        }
                        a[n] = root.clamp(0.0, r[n]);
                        a[m] = a_m.clamp(0.0, r[m]);
                        f(&a, CaseTag::Case3, Binding::Both);
                    }
                }
            }
        }
    }
}

/// Every screened corner candidate for fixed `(p0, c1)`, deduplicated.
pub fn enumerate_candidates(
    inst: &NetworkInstance,
    p0: f64,
    c1: f64,
    params: &SolverParams,
) -> Result<Vec<CornerCandidate>> {
    validate_p0_c1(inst, p0, c1)?;
    let ctx = P0Context::new(inst, p0, c1);
    let mut out: Vec<CornerCandidate> = Vec::new();
    for_each_candidate(inst, &ctx, params, |a, tag, binding| {
        if let Some((objective, k_star)) = ctx.eval(inst, a, params) {
            out.push(CornerCandidate {
                a: RateVector { a: a.to_vec() },
                case_tag: tag,
                binding,
                objective,
                k_star,
            });
        }
    });
    // Deduplicate nearly identical share vectors, keeping the first (the
    // lowest case number) so provenance stays simple.
    let tol = params.eps_rate;
    let mut dedup: Vec<CornerCandidate> = Vec::with_capacity(out.len());
    for cand in out {
        if !dedup.iter().any(|kept| {
            kept.a.a.iter().zip(&cand.a.a).all(|(x, y)| (x - y).abs() <= tol)
        }) {
            dedup.push(cand);
        }
    }
    Ok(dedup)
}

/// Best corner for fixed `(p0, c1)` without materializing the candidate list.
/// Ties resolve to the lexicographically smallest share vector. `counter`
/// accumulates the number of screened candidates whose objective was
/// evaluated.
pub(crate) fn best_split(
    inst: &NetworkInstance,
    ctx: &P0Context,
    params: &SolverParams,
    counter: &mut u64,
) -> Option<(Vec<f64>, f64, usize)> {
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for_each_candidate(inst, ctx, params, |a, _tag, _binding| {
        if let Some((obj, k)) = ctx.eval(inst, a, params) {
            *counter += 1;
            let replace = match &best {
                None => true,
                Some((best_a, best_obj, _)) => {
                    obj > *best_obj || (obj == *best_obj && lex_less(a, best_a))
                }
            };
            if replace {
                best = Some((a.to_vec(), obj, k));
            }
        }
    });
    best
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Optimal shares for equal demands `r`: fill the weakest users first, one
/// partial share after the full ones, zeros beyond; the handed-out total is
/// `min(c1, K r)`.
pub fn optimal_rate_equal_demand(inst: &NetworkInstance, c1: f64, r: f64) -> Result<RateVector> {
    validate_p0_c1(inst, 0.0, c1)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative demand {r}")));
    }
    if inst.r_min.iter().any(|ri| (ri - r).abs() > crate::model::DEFAULT_EPS_RATE) {
        return Err(Error::Domain(
            "equal-demand path called with mixed per-user demands".into(),
        ));
    }
    let kk = inst.num_users();
    let mut a = vec![0.0; kk];
    if r <= 0.0 {
        return Ok(RateVector { a });
    }
    let total = c1.min(kk as f64 * r);
    let full = ((total / r).floor() as usize).min(kk);
    for slot in a.iter_mut().take(full) {
        *slot = r;
    }
    if full < kk {
        a[full] = (total - full as f64 * r).clamp(0.0, r);
    }
    Ok(RateVector { a })
}

/// Equal-demand fast path for one `p0`: the greedy fill plus its objective,
/// or `None` when the fill's minimum powers exceed the budget.
pub(crate) fn equal_demand_split(
    inst: &NetworkInstance,
    ctx: &P0Context,
    r: f64,
    params: &SolverParams,
    counter: &mut u64,
) -> Option<(Vec<f64>, f64, usize)> {
    let fill = optimal_rate_equal_demand(inst, ctx.c1, r).ok()?;
    let (obj, k) = ctx.eval(inst, &fill.a, params)?;
    *counter += 1;
    Some((fill.a, obj, k))
}

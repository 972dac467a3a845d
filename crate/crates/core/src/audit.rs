//! Certificates for a solved allocation.
//!
//! Pass/fail fields come from exact integer comparisons only; the floating
//! point ratios are informational.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{product_ge, sw_within_3_plus_2sqrt2};
use crate::instance::{is_non_wasteful, Allocation, Instance, ValueProfile};
use crate::nsw_alg::{termination_holds, SolveTrace};
use crate::oracles::{allocation_steps, brute_force_nsw_opt, brute_force_sw_opt, gmms_steps, is_alpha_gmms, Budget};

pub const NSW_FACTOR: u64 = 288;
pub const LEMMA1_ALPHAS: [u64; 4] = [1, 2, 4, 8];

/// `|{i : 18α·v_i(A_i) < v_i(N_i)}|` for the given profiles.
pub fn lemma1_count(alg: &ValueProfile, opt: &ValueProfile, alpha: u64) -> usize {
    alg.values
        .iter()
        .zip(&opt.values)
        .filter(|(&a, &o)| 18 * alpha * u64::from(a) < u64::from(o))
        .count()
}

/// The counting bound `|X_α| <= n/α` for every `α` in [`LEMMA1_ALPHAS`].
pub fn lemma1_holds(alg: &ValueProfile, opt: &ValueProfile) -> bool {
    let n = alg.values.len() as u64;
    LEMMA1_ALPHAS
        .iter()
        .all(|&alpha| lemma1_count(alg, opt, alpha) as u64 * alpha <= n)
}

/// `288^n · ∏ alg >= ∏ opt`.
pub fn nsw_within_288(alg: &ValueProfile, opt: &ValueProfile) -> bool {
    let mut lhs: Vec<u64> = alg.values.iter().map(|&v| u64::from(v)).collect();
    lhs.extend(std::iter::repeat_n(NSW_FACTOR, alg.values.len()));
    let rhs: Vec<u64> = opt.values.iter().map(|&v| u64::from(v)).collect();
    product_ge(&lhs, &rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub values: Vec<u32>,
    pub termination_ok: Vec<bool>,
    pub non_wasteful_ok: bool,
    pub nsw: f64,
    pub sw: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsw_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsw_opt_values: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sw_opt: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsw_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sw_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsw_factor_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sw_factor_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gmms_alpha_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma1_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration_bound_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_count: Option<u64>,
}

impl AuditReport {
    /// Every check that was computed passed.
    pub fn all_ok(&self) -> bool {
        self.termination_ok.iter().all(|&b| b)
            && self.non_wasteful_ok
            && [
                self.nsw_factor_ok,
                self.sw_factor_ok,
                self.gmms_alpha_ok,
                self.lemma1_ok,
                self.growth_ok,
                self.iteration_bound_ok,
            ]
            .iter()
            .all(|c| c.unwrap_or(true))
    }
}

/// Audits `alloc` (the partial allocation) against `inst`. Oracle-backed
/// fields are filled only when their enumeration fits `budget`.
pub fn audit(inst: &Instance, alloc: &Allocation, budget: Budget, trace: Option<&SolveTrace>) -> Result<AuditReport> {
    let profile = ValueProfile::of(inst, alloc)?;
    let mut report = AuditReport {
        termination_ok: termination_holds(inst, alloc)?,
        non_wasteful_ok: is_non_wasteful(inst, alloc)?,
        nsw: profile.nash_welfare(),
        sw: profile.sum(),
        values: profile.values.clone(),
        nsw_opt: None,
        nsw_opt_values: None,
        sw_opt: None,
        nsw_ratio: None,
        sw_ratio: None,
        nsw_factor_ok: None,
        sw_factor_ok: None,
        gmms_alpha_ok: None,
        lemma1_ok: None,
        iterations: None,
        growth_ok: None,
        iteration_bound_ok: None,
        query_count: None,
    };

    if allocation_steps(inst) <= u128::from(budget.0) {
        let nsw_opt = brute_force_nsw_opt(inst, budget)?;
        let sw_opt = brute_force_sw_opt(inst, budget)?.profile.sum();
        let opt_nsw = nsw_opt.profile.nash_welfare();
        report.nsw_opt = Some(opt_nsw);
        report.sw_opt = Some(sw_opt);
        report.nsw_ratio = (opt_nsw > 0.0).then(|| report.nsw / opt_nsw);
        report.sw_ratio = (sw_opt > 0).then(|| report.sw as f64 / sw_opt as f64);
        report.nsw_factor_ok = Some(nsw_within_288(&profile, &nsw_opt.profile));
        report.sw_factor_ok = Some(sw_within_3_plus_2sqrt2(report.sw, sw_opt));
        report.lemma1_ok = (opt_nsw > 0.0).then(|| lemma1_holds(&profile, &nsw_opt.profile));
        report.nsw_opt_values = Some(nsw_opt.profile.values);
    }

    let gmms_total = (0..inst.num_agents())
        .map(|i| gmms_steps(inst, alloc, i))
        .fold(0u128, u128::saturating_add);
    if gmms_total <= u128::from(budget.0) {
        report.gmms_alpha_ok = Some(is_alpha_gmms(inst, alloc, Ratio::new(1, 6), budget)?);
    }

    if let Some(trace) = trace {
        if trace.initial_matching.len() != inst.num_agents() {
            return Err(Error::DimensionMismatch {
                expected: inst.num_agents(),
                got: trace.initial_matching.len(),
            });
        }
        report.iterations = Some(trace.iterations.len());
        report.growth_ok = Some(trace.doubling_ok() && trace.growth_ok(inst.num_goods()));
        report.iteration_bound_ok = Some(trace.within_iteration_bound(inst.num_agents(), inst.num_goods()));
        report.query_count = Some(trace.total_value_queries);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_envy_gap, gen_random_xos};
    use crate::nsw_alg::solve;

    #[test]
    fn solver_output_passes() {
        let inst = gen_random_xos(3, 6, 2, 3, 5).unwrap();
        let res = solve(&inst).unwrap();
        let report = audit(&inst, &res.allocation, Budget::default(), Some(&res.trace)).unwrap();
        assert!(report.all_ok(), "{report:?}");
        assert!(report.nsw_opt.is_some() && report.gmms_alpha_ok.is_some());
    }

    #[test]
    fn zero_budget_skips_oracles() {
        let gap = gen_envy_gap(1);
        let res = solve(&gap.instance).unwrap();
        let report = audit(&gap.instance, &res.allocation, Budget(0), None).unwrap();
        assert!(report.nsw_opt.is_none() && report.gmms_alpha_ok.is_none() && report.lemma1_ok.is_none());
        assert!(report.all_ok());
    }

    #[test]
    fn lemma1_counting() {
        let alg = ValueProfile {
            values: vec![1, 1, 1, 1],
        };
        let opt = ValueProfile {
            values: vec![19, 1, 1, 1],
        };
        assert_eq!(lemma1_count(&alg, &opt, 1), 1);
        assert!(lemma1_holds(&alg, &opt));
        let opt = ValueProfile {
            values: vec![37, 37, 37, 1],
        };
        assert!(!lemma1_holds(&alg, &opt));
    }

    #[test]
    fn factor_288_boundary() {
        let alg = ValueProfile { values: vec![1] };
        assert!(nsw_within_288(&alg, &ValueProfile { values: vec![288] }));
        assert!(!nsw_within_288(&alg, &ValueProfile { values: vec![289] }));
    }
}

//! Exhaustive ground-truth oracles: optimal NSW and social welfare,
//! restricted maximin shares and groupwise maximin share thresholds.
//!
//! Every oracle enumerates explicitly and refuses to start when the number
//! of enumeration steps exceeds its [`Budget`].

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{scaled_ge, Product};
use crate::goods::GoodSet;
use crate::instance::{Allocation, Instance, ValueProfile};
use crate::valuations::ValuationClass;

/// Maximum number of enumeration steps an oracle may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(100_000_000)
    }
}

impl Budget {
    fn admit(self, required: u128) -> Result<()> {
        if required > u128::from(self.0) {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

fn pow_saturating(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Steps needed by the allocation oracles: `(n + 1)^m`.
pub fn allocation_steps(inst: &Instance) -> u128 {
    pow_saturating(inst.num_agents() + 1, inst.num_goods())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalAllocation {
    pub allocation: Allocation,
    pub profile: ValueProfile,
    /// Owner of each good; `n` stands for unassigned.
    pub assignment: Vec<usize>,
}

/// Visits every assignment of goods to `0..=n` (`n` = unassigned) in
/// lexicographic order, good 0 most significant, and keeps the first
/// strict improvement under `better`.
fn enumerate_best(
    inst: &Instance,
    budget: Budget,
    better: impl Fn(&ValueProfile, &ValueProfile) -> bool,
) -> Result<OptimalAllocation> {
    budget.admit(allocation_steps(inst))?;
    let n = inst.num_agents();
    let m = inst.num_goods();
    let mut assignment = vec![0usize; m];
    let mut best: Option<(ValueProfile, Vec<usize>)> = None;
    loop {
        let mut bundles = vec![GoodSet::new(); n];
        for (g, &a) in assignment.iter().enumerate() {
            if a < n {
                bundles[a].insert(g);
            }
        }
        let values = bundles
            .iter()
            .enumerate()
            .map(|(i, b)| inst.value(i, b))
            .collect::<Result<Vec<_>>>()?;
        let profile = ValueProfile { values };
        if best.as_ref().is_none_or(|(b, _)| better(&profile, b)) {
            best = Some((profile, assignment.clone()));
        }

        // Odometer step, least significant digit = last good.
        let mut pos = m;
        loop {
            if pos == 0 {
                let (profile, assignment) = best.expect("at least one assignment");
                let mut bundles = vec![GoodSet::new(); n];
                for (g, &a) in assignment.iter().enumerate() {
                    if a < n {
                        bundles[a].insert(g);
                    }
                }
                return Ok(OptimalAllocation {
                    allocation: Allocation::new(bundles),
                    profile,
                    assignment,
                });
            }
            pos -= 1;
            if assignment[pos] < n {
                assignment[pos] += 1;
                break;
            }
            assignment[pos] = 0;
        }
    }
}

/// A Nash-optimal allocation; ties go to the lexicographically smallest
/// assignment vector.
pub fn brute_force_nsw_opt(inst: &Instance, budget: Budget) -> Result<OptimalAllocation> {
    enumerate_best(inst, budget, |cand, best| {
        cand.product().compare(best.product()).is_gt()
    })
}

/// A social-welfare-optimal allocation, same tie rule.
pub fn brute_force_sw_opt(inst: &Instance, budget: Budget) -> Result<OptimalAllocation> {
    enumerate_best(inst, budget, |cand, best| cand.sum() > best.sum())
}

/// Agent, number of parts and ground set of a restricted maximin share.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximinQuery {
    pub agent: usize,
    pub parts: usize,
    pub goods: GoodSet,
}

/// `μ_i^r(S)`: the best worst part over all labelings of `S` with `r`
/// labels. Empty parts are allowed.
pub fn maximin_share(inst: &Instance, query: &MaximinQuery, budget: Budget) -> Result<u32> {
    if query.agent >= inst.num_agents() {
        return Err(Error::AgentOutOfRange {
            agent: query.agent,
            num_agents: inst.num_agents(),
        });
    }
    if query.parts == 0 {
        return Err(Error::InvalidInstance("maximin share needs at least one part".into()));
    }
    budget.admit(pow_saturating(query.parts, query.goods.len()))?;
    Ok(maximin_unbudgeted(inst, query))
}

fn maximin_unbudgeted(inst: &Instance, query: &MaximinQuery) -> u32 {
    let goods: Vec<usize> = query.goods.iter().collect();
    let r = query.parts;
    let spec = inst.valuation(query.agent);
    let whole = spec.evaluate_unchecked(&query.goods);
    if r == 1 {
        return whole;
    }
    if goods.len() < r {
        return 0;
    }
    // With binary marginals every part is worth at most its size.
    let ceiling = if spec.class() == ValuationClass::Unclassified {
        whole
    } else {
        whole.min((goods.len() / r) as u32)
    };
    // Parts are interchangeable, so the first good always takes label 0.
    let mut labels = vec![0usize; goods.len()];
    let mut best = 0;
    let mut parts = vec![GoodSet::new(); r];
    loop {
        parts.iter_mut().for_each(|p| *p = GoodSet::new());
        for (g, &l) in goods.iter().zip(&labels) {
            parts[l].insert(*g);
        }
        let worst = parts.iter().map(|p| spec.evaluate_unchecked(p)).min().unwrap_or(0);
        best = best.max(worst);
        if best >= ceiling {
            return best;
        }
        let mut pos = labels.len();
        loop {
            if pos <= 1 {
                return best;
            }
            pos -= 1;
            if labels[pos] + 1 < r {
                labels[pos] += 1;
                break;
            }
            labels[pos] = 0;
        }
    }
}

/// Enumeration steps for `GMMS_i(alloc)`.
pub fn gmms_steps(inst: &Instance, alloc: &Allocation, agent: usize) -> u128 {
    let n = inst.num_agents();
    if n >= 64 {
        return u128::MAX;
    }
    let a0 = alloc.unassigned(inst.num_goods());
    (0u64..1 << n)
        .filter(|r| r >> agent & 1 == 1)
        .map(|r| {
            let size = a0.len()
                + (0..n)
                    .filter(|j| r >> j & 1 == 1)
                    .map(|j| alloc.bundle(j).len())
                    .sum::<usize>();
            pow_saturating(r.count_ones() as usize, size)
        })
        .fold(0u128, u128::saturating_add)
}

/// `GMMS_i(A) = max over groups R ∋ i of μ_i^{|R|}(∪_{j∈R} A_j ∪ A_0)`.
pub fn gmms_threshold(inst: &Instance, alloc: &Allocation, agent: usize, budget: Budget) -> Result<u32> {
    alloc.validate(inst)?;
    let n = inst.num_agents();
    if agent >= n {
        return Err(Error::AgentOutOfRange { agent, num_agents: n });
    }
    budget.admit(gmms_steps(inst, alloc, agent))?;
    let a0 = alloc.unassigned(inst.num_goods());
    let mut best = 0;
    for r in (0u64..1 << n).filter(|r| r >> agent & 1 == 1) {
        let mut goods = a0.clone();
        for j in (0..n).filter(|j| r >> j & 1 == 1) {
            goods.union_with(alloc.bundle(j));
        }
        let query = MaximinQuery {
            agent,
            parts: r.count_ones() as usize,
            goods,
        };
        best = best.max(maximin_unbudgeted(inst, &query));
    }
    Ok(best)
}

/// `v_i(A_i) >= alpha · GMMS_i(A)` for every agent, in exact arithmetic.
pub fn is_alpha_gmms(inst: &Instance, alloc: &Allocation, alpha: Ratio<u64>, budget: Budget) -> Result<bool> {
    let total: u128 = (0..inst.num_agents())
        .map(|i| gmms_steps(inst, alloc, i))
        .fold(0, u128::saturating_add);
    budget.admit(total)?;
    let profile = ValueProfile::of(inst, alloc)?;
    for (i, &v) in profile.values.iter().enumerate() {
        let threshold = gmms_threshold(inst, alloc, i, budget)?;
        if !scaled_ge(u64::from(v), *alpha.numer(), *alpha.denom(), u64::from(threshold)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares two NSW profiles exactly.
pub fn nsw_at_least(a: &ValueProfile, b: &ValueProfile) -> bool {
    Product::of(&a.values).ge(Product::of(&b.values))
}

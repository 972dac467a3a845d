//! Constant-factor Nash social welfare approximation for binary XOS
//! valuations.
//!
//! The solver starts from a matching that gives every agent one good it
//! values, then repeatedly lets an agent `i` whose value is at most half of
//! `v_i(G_i)` take a non-wasteful set of twice its current size out of
//! `G_i`, where `G_i` is its own bundle, the unassigned goods and the
//! bundles of agents holding more than four times as many goods as `i`.
//! Every bundle stays non-wasteful throughout, so `v_i(A_i) = |A_i|`.

mod matching;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::product_ge;
use crate::goods::GoodSet;
use crate::instance::{Allocation, Instance};
use crate::valuations::{extract_nonwasteful, shrink_to_size, CountingOracle, ValuationSpec};

pub use matching::max_matching;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    ZeroNsw,
}

/// One pass of the improvement loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub agent: usize,
    pub old_size: usize,
    pub new_size: usize,
    pub nsw_before: f64,
    pub nsw_after: f64,
    /// `|A_j|` for every agent after the update.
    pub sizes_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    /// Good matched to each agent by the initial matching.
    pub initial_matching: Vec<Option<usize>>,
    pub iterations: Vec<IterationRecord>,
    pub total_value_queries: u64,
}

impl SolveTrace {
    /// Bundle sizes before each iteration, starting from the all-ones
    /// matching profile.
    fn sizes_before(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.initial_matching.len();
        std::iter::once(vec![1; n]).chain(self.iterations.iter().map(|r| r.sizes_after.clone()))
    }

    /// Every iteration doubles the acting agent's bundle.
    pub fn doubling_ok(&self) -> bool {
        self.iterations.iter().all(|r| r.new_size == 2 * r.old_size)
    }

    /// `∏ after · (4m + 1) >= ∏ before · (4m + 2)` for every iteration,
    /// i.e. the geometric mean grows by at least `(1 + 1/(4m+1))^{1/n}`.
    pub fn growth_ok(&self, num_goods: usize) -> bool {
        let lo = 4 * num_goods as u64 + 1;
        self.sizes_before().zip(&self.iterations).all(|(before, rec)| {
            let mut lhs: Vec<u64> = rec.sizes_after.iter().map(|&s| s as u64).collect();
            lhs.push(lo);
            let mut rhs: Vec<u64> = before.iter().map(|&s| s as u64).collect();
            rhs.push(lo + 1);
            product_ge(&lhs, &rhs)
        })
    }

    pub fn within_iteration_bound(&self, num_agents: usize, num_goods: usize) -> bool {
        self.iterations.len() as f64 <= iteration_bound(num_agents, num_goods)
    }
}

/// `(4m + 1) · n · (log2(m/n) + 1) + 1`, never below 1.
pub fn iteration_bound(num_agents: usize, num_goods: usize) -> f64 {
    let (n, m) = (num_agents as f64, num_goods as f64);
    ((4.0 * m + 1.0) * n * ((m / n).log2() + 1.0) + 1.0).max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Possibly partial allocation the guarantees are stated for.
    pub allocation: Allocation,
    /// `allocation` with the unassigned goods handed out.
    pub completed_allocation: Allocation,
    pub trace: SolveTrace,
    pub status: SolveStatus,
}

/// Sets `H_i` and `G_i` for agent `i` under `alloc`.
pub fn compute_h_and_g(alloc: &Allocation, agent: usize, num_goods: usize) -> (Vec<usize>, GoodSet) {
    let own = alloc.bundle(agent).len();
    let heavy: Vec<usize> = (0..alloc.num_agents())
        .filter(|&j| alloc.bundle(j).len() > 4 * own)
        .collect();
    let mut g = alloc.unassigned(num_goods);
    g.union_with(alloc.bundle(agent));
    for &j in &heavy {
        g.union_with(alloc.bundle(j));
    }
    (heavy, g)
}

fn require_xos(inst: &Instance, op: &'static str) -> Result<()> {
    match inst.valuations().iter().find(|v| !v.is_xos()) {
        Some(v) => Err(Error::UnsupportedClass {
            op,
            class: v.class().name(),
        }),
        None => Ok(()),
    }
}

/// Outcome of the matching step.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialMatching {
    Perfect(Allocation),
    /// No matching covers every agent, so every allocation has NSW 0. Holds
    /// the maximum matching found.
    ZeroNsw(Allocation),
}

fn matching_with_oracles(
    inst: &Instance,
    oracles: &[CountingOracle<'_>],
) -> Result<(InitialMatching, Vec<Option<usize>>)> {
    let m = inst.num_goods();
    let mut adj = Vec::with_capacity(inst.num_agents());
    for oracle in oracles {
        let mut row = Vec::new();
        for g in 0..m {
            if oracle.value(&GoodSet::from([g]))? == 1 {
                row.push(g);
            }
        }
        adj.push(row);
    }
    let matched = max_matching(&adj, m);
    let alloc = Allocation::new(
        matched
            .iter()
            .map(|g| g.map(|g| GoodSet::from([g])).unwrap_or_default())
            .collect(),
    );
    let out = if matched.iter().all(Option::is_some) {
        InitialMatching::Perfect(alloc)
    } else {
        InitialMatching::ZeroNsw(alloc)
    };
    Ok((out, matched))
}

/// Matches agents to goods they value at 1.
pub fn initial_matching(inst: &Instance) -> Result<InitialMatching> {
    require_xos(inst, "initial_matching")?;
    let oracles = inst.oracles();
    Ok(matching_with_oracles(inst, &oracles)?.0)
}

/// Appends `n - n'` dummy goods, each a singleton set in every agent's
/// family, where `n'` is the maximum matching size.
pub fn pad_with_dummies(inst: &Instance) -> Result<Instance> {
    require_xos(inst, "pad_with_dummies")?;
    let matched = match initial_matching(inst)? {
        InitialMatching::Perfect(_) => return Err(Error::PerfectMatchingExists),
        InitialMatching::ZeroNsw(a) => a.bundles.iter().filter(|b| !b.is_empty()).count(),
    };
    let m = inst.num_goods();
    let extra = inst.num_agents() - matched;
    let valuations = inst
        .valuations()
        .iter()
        .map(|v| match v.expand_spectrum(m) {
            ValuationSpec::XosFamily { mut sets } => {
                sets.extend((m..m + extra).map(|d| GoodSet::from([d])));
                Ok(ValuationSpec::XosFamily { sets })
            }
            other => Err(Error::UnsupportedClass {
                op: "pad_with_dummies",
                class: if other.is_xos() {
                    "tabulated"
                } else {
                    other.class().name()
                },
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(m + extra, valuations)
}

fn nsw_of_sizes(sizes: &[usize]) -> f64 {
    if sizes.contains(&0) {
        return 0.0;
    }
    let n = sizes.len() as f64;
    (sizes.iter().map(|&s| (s as f64).ln()).sum::<f64>() / n).exp()
}

fn check_invariants(inst: &Instance, alloc: &Allocation) -> Result<()> {
    alloc.validate(inst)?;
    for (i, b) in alloc.bundles.iter().enumerate() {
        let v = inst.valuation(i).evaluate_unchecked(b);
        if v as usize != b.len() || v == 0 {
            return Err(Error::InvariantViolation(format!(
                "agent {i} holds {} goods worth {v}",
                b.len()
            )));
        }
    }
    Ok(())
}

/// Runs the doubling algorithm.
pub fn solve(inst: &Instance) -> Result<SolveResult> {
    require_xos(inst, "solve")?;
    let n = inst.num_agents();
    let m = inst.num_goods();
    let oracles = inst.oracles();
    let total_queries = |oracles: &[CountingOracle<'_>]| oracles.iter().map(CountingOracle::query_count).sum();

    let (start, matched) = matching_with_oracles(inst, &oracles)?;
    let mut alloc = match start {
        InitialMatching::Perfect(a) => a,
        InitialMatching::ZeroNsw(a) => {
            let completed = a.completed_to(0, m);
            return Ok(SolveResult {
                allocation: a,
                completed_allocation: completed,
                trace: SolveTrace {
                    initial_matching: matched,
                    iterations: Vec::new(),
                    total_value_queries: total_queries(&oracles),
                },
                status: SolveStatus::ZeroNsw,
            });
        }
    };

    let cap = iteration_bound(n, m).floor() as usize;
    let mut iterations = Vec::new();
    loop {
        let mut violator = None;
        for (i, oracle) in oracles.iter().enumerate() {
            let (heavy, g) = compute_h_and_g(&alloc, i, m);
            let own = alloc.bundle(i).len() as u32;
            if 2 * own <= oracle.value(&g)? {
                violator = Some((i, heavy, g));
                break;
            }
        }
        let Some((i, heavy, g)) = violator else { break };
        if iterations.len() >= cap {
            return Err(Error::InvariantViolation(format!(
                "exceeded the iteration bound of {cap}"
            )));
        }

        let old_size = alloc.bundle(i).len();
        let nsw_before = nsw_of_sizes(&alloc.sizes());
        let witness = extract_nonwasteful(&oracles[i], &g)?;
        let x = shrink_to_size(&oracles[i], &witness, 2 * old_size)?;
        for &j in &heavy {
            alloc.bundles[j].difference_with(&x);
            if alloc.bundles[j].is_empty() {
                return Err(Error::InvariantViolation(format!(
                    "agent {j} lost every good to agent {i}"
                )));
            }
        }
        alloc.bundles[i] = x;
        check_invariants(inst, &alloc)?;

        let sizes_after = alloc.sizes();
        iterations.push(IterationRecord {
            agent: i,
            old_size,
            new_size: sizes_after[i],
            nsw_before,
            nsw_after: nsw_of_sizes(&sizes_after),
            sizes_after,
        });
    }

    let completed = alloc.completed_to(alloc.largest_bundle_agent(), m);
    Ok(SolveResult {
        allocation: alloc,
        completed_allocation: completed,
        trace: SolveTrace {
            initial_matching: matched,
            iterations,
            total_value_queries: total_queries(&oracles),
        },
        status: SolveStatus::Solved,
    })
}

/// `2 · v_i(A_i) > v_i(G_i)` for every agent.
pub fn termination_holds(inst: &Instance, alloc: &Allocation) -> Result<Vec<bool>> {
    alloc.validate(inst)?;
    (0..inst.num_agents())
        .map(|i| {
            let (_, g) = compute_h_and_g(alloc, i, inst.num_goods());
            Ok(2 * inst.value(i, alloc.bundle(i))? > inst.value(i, &g)?)
        })
        .collect()
}

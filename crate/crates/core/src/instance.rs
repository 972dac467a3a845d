//! Instances, allocations and the welfare measures over them.
//!
//! Agents and goods are 0-based: good `g` here is good `g + 1` in the
//! usual 1-based `[m] = {1, ..., m}` notation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Product;
use crate::goods::GoodSet;
use crate::valuations::{CountingOracle, ValuationSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    num_agents: usize,
    num_goods: usize,
    valuations: Vec<ValuationSpec>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    m: usize,
    valuations: Vec<ValuationSpec>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        if r.valuations.len() != r.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} valuations given",
                r.n,
                r.valuations.len()
            )));
        }
        Instance::new(r.m, r.valuations)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(i: Instance) -> Self {
        InstanceRepr {
            n: i.num_agents,
            m: i.num_goods,
            valuations: i.valuations,
        }
    }
}

impl Instance {
    pub fn new(num_goods: usize, valuations: Vec<ValuationSpec>) -> Result<Self> {
        if valuations.is_empty() {
            return Err(Error::InvalidInstance("need at least one agent".into()));
        }
        if num_goods == 0 {
            return Err(Error::InvalidInstance("need at least one good".into()));
        }
        for v in &valuations {
            v.validate(num_goods)?;
        }
        Ok(Self {
            num_agents: valuations.len(),
            num_goods,
            valuations,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_goods(&self) -> usize {
        self.num_goods
    }

    pub fn valuations(&self) -> &[ValuationSpec] {
        &self.valuations
    }

    pub fn valuation(&self, agent: usize) -> &ValuationSpec {
        &self.valuations[agent]
    }

    /// `v_agent(set)`, uncounted.
    pub fn value(&self, agent: usize, set: &GoodSet) -> Result<u32> {
        if agent >= self.num_agents {
            return Err(Error::AgentOutOfRange {
                agent,
                num_agents: self.num_agents,
            });
        }
        self.valuations[agent].evaluate(set, self.num_goods)
    }

    pub fn all_goods(&self) -> GoodSet {
        GoodSet::full(self.num_goods)
    }

    /// One counting oracle per agent.
    pub fn oracles(&self) -> Vec<CountingOracle<'_>> {
        self.valuations
            .iter()
            .map(|v| CountingOracle::new(v, self.num_goods))
            .collect()
    }

    pub fn all_xos(&self) -> bool {
        self.valuations.iter().all(ValuationSpec::is_xos)
    }
}

/// `n` pairwise-disjoint bundles; goods outside every bundle are unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub bundles: Vec<GoodSet>,
}

impl Allocation {
    pub fn new(bundles: Vec<GoodSet>) -> Self {
        Self { bundles }
    }

    pub fn empty(num_agents: usize) -> Self {
        Self {
            bundles: vec![GoodSet::new(); num_agents],
        }
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> &GoodSet {
        &self.bundles[agent]
    }

    /// Checks bundle count, good range and disjointness against `inst`.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        if self.bundles.len() != inst.num_agents() {
            return Err(Error::DimensionMismatch {
                expected: inst.num_agents(),
                got: self.bundles.len(),
            });
        }
        let mut owner = vec![None; inst.num_goods()];
        for (i, b) in self.bundles.iter().enumerate() {
            for g in b {
                if g >= inst.num_goods() {
                    return Err(Error::GoodOutOfRange {
                        good: g,
                        num_goods: inst.num_goods(),
                    });
                }
                if let Some(first) = owner[g] {
                    return Err(Error::OverlappingBundles {
                        good: g,
                        first,
                        second: i,
                    });
                }
                owner[g] = Some(i);
            }
        }
        Ok(())
    }

    /// `A_0`: goods of `[m]` held by no agent.
    pub fn unassigned(&self, num_goods: usize) -> GoodSet {
        let mut rest = GoodSet::full(num_goods);
        for b in &self.bundles {
            rest.difference_with(b);
        }
        rest
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bundles.iter().map(GoodSet::len).collect()
    }

    /// Hands every unassigned good to `agent`.
    pub fn completed_to(&self, agent: usize, num_goods: usize) -> Allocation {
        let mut out = self.clone();
        let rest = self.unassigned(num_goods);
        out.bundles[agent].union_with(&rest);
        out
    }

    /// Agent with the largest bundle, lowest index on ties.
    pub fn largest_bundle_agent(&self) -> usize {
        let mut best = 0;
        for (i, b) in self.bundles.iter().enumerate() {
            if b.len() > self.bundles[best].len() {
                best = i;
            }
        }
        best
    }
}

/// Exact per-agent values `v_i(A_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueProfile {
    pub values: Vec<u32>,
}

impl ValueProfile {
    pub fn of(inst: &Instance, alloc: &Allocation) -> Result<Self> {
        alloc.validate(inst)?;
        let values = alloc
            .bundles
            .iter()
            .enumerate()
            .map(|(i, b)| inst.value(i, b))
            .collect::<Result<_>>()?;
        Ok(Self { values })
    }

    pub fn sum(&self) -> u64 {
        self.values.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn product(&self) -> Product {
        Product::of(&self.values)
    }

    /// Geometric mean; exactly zero when any value is zero.
    pub fn nash_welfare(&self) -> f64 {
        if self.values.is_empty() || self.values.contains(&0) {
            return 0.0;
        }
        let n = self.values.len() as f64;
        let log_sum: f64 = self.values.iter().map(|&v| f64::from(v).ln()).sum();
        (log_sum / n).exp()
    }
}

pub fn nash_welfare(inst: &Instance, alloc: &Allocation) -> Result<f64> {
    Ok(ValueProfile::of(inst, alloc)?.nash_welfare())
}

pub fn social_welfare(inst: &Instance, alloc: &Allocation) -> Result<u64> {
    Ok(ValueProfile::of(inst, alloc)?.sum())
}

/// `v_i(A_i) >= v_i(A_j)` for every ordered pair.
pub fn is_envy_free(inst: &Instance, alloc: &Allocation) -> Result<bool> {
    let own = ValueProfile::of(inst, alloc)?;
    for i in 0..inst.num_agents() {
        for (j, other) in alloc.bundles.iter().enumerate() {
            if i != j && inst.value(i, other)? > own.values[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `v_i(A_i) = |A_i|` for every agent.
pub fn is_non_wasteful(inst: &Instance, alloc: &Allocation) -> Result<bool> {
    let profile = ValueProfile::of(inst, alloc)?;
    Ok(profile
        .values
        .iter()
        .zip(&alloc.bundles)
        .all(|(&v, b)| v as usize == b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_envy_gap;

    fn set(goods: &[usize]) -> GoodSet {
        goods.iter().copied().collect()
    }

    fn two_singletons() -> (Instance, Allocation) {
        let inst = Instance::new(
            2,
            vec![ValuationSpec::xos([set(&[0])]), ValuationSpec::xos([set(&[1])])],
        )
        .unwrap();
        (inst, Allocation::new(vec![set(&[0]), set(&[1])]))
    }

    #[test]
    fn identity_nsw() {
        let (inst, alloc) = two_singletons();
        assert_eq!(nash_welfare(&inst, &alloc).unwrap(), 1.0);
        assert!(is_envy_free(&inst, &alloc).unwrap());
    }

    #[test]
    fn zero_agent_zeroes_nsw() {
        let (inst, _) = two_singletons();
        let alloc = Allocation::new(vec![set(&[0, 1]), set(&[])]);
        assert_eq!(nash_welfare(&inst, &alloc).unwrap(), 0.0);
    }

    #[test]
    fn envy_gap_welfare() {
        let gap = gen_envy_gap(3);
        let nsw = nash_welfare(&gap.instance, &gap.envy_free).unwrap();
        assert!((nsw - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(social_welfare(&gap.instance, &gap.envy_free).unwrap(), 42);
        assert!(is_envy_free(&gap.instance, &gap.envy_free).unwrap());
        assert!(is_non_wasteful(&gap.instance, &gap.nash).unwrap());
    }

    #[test]
    fn empty_allocation() {
        let (inst, _) = two_singletons();
        let alloc = Allocation::empty(2);
        assert_eq!(social_welfare(&inst, &alloc).unwrap(), 0);
        assert!(is_non_wasteful(&inst, &alloc).unwrap());
    }

    #[test]
    fn envy_when_one_agent_takes_all() {
        let spec = ValuationSpec::xos([set(&[0, 1])]);
        let inst = Instance::new(2, vec![spec.clone(), spec]).unwrap();
        let alloc = Allocation::new(vec![set(&[0, 1]), set(&[])]);
        assert!(!is_envy_free(&inst, &alloc).unwrap());
    }

    #[test]
    fn wasteful_bundle() {
        let inst = Instance::new(3, vec![ValuationSpec::xos([set(&[0, 1])])]).unwrap();
        let alloc = Allocation::new(vec![set(&[0, 1, 2])]);
        assert!(!is_non_wasteful(&inst, &alloc).unwrap());
    }

    #[test]
    fn validation_errors() {
        let (inst, _) = two_singletons();
        assert_eq!(
            Allocation::empty(3).validate(&inst),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        );
        assert!(matches!(
            Allocation::new(vec![set(&[0]), set(&[0])]).validate(&inst),
            Err(Error::OverlappingBundles { good: 0, .. })
        ));
        assert!(matches!(
            Allocation::new(vec![set(&[2]), set(&[])]).validate(&inst),
            Err(Error::GoodOutOfRange { good: 2, .. })
        ));
        assert!(Instance::new(0, vec![ValuationSpec::Spectrum { delta: 0 }]).is_err());
        assert!(Instance::new(2, vec![]).is_err());
    }

    #[test]
    fn instance_json_shape() {
        let (inst, _) = two_singletons();
        let json = serde_json::to_string(&inst).unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"m":2,"valuations":[{"type":"xos_family","sets":[[0]]},{"type":"xos_family","sets":[[1]]}]}"#
        );
        let bad = r#"{"n":3,"m":2,"valuations":[{"type":"spectrum","delta":0}]}"#;
        assert!(serde_json::from_str::<Instance>(bad).is_err());
    }

    #[test]
    fn log_space_matches_direct_product() {
        for a in 1..=10u32 {
            for b in 1..=10u32 {
                for c in [1u32, 3, 7, 10] {
                    let p = ValueProfile {
                        values: vec![a, b, c, a, b, c],
                    };
                    let direct = (f64::from(a * b * c).powi(2)).powf(1.0 / 6.0);
                    assert!((p.nash_welfare() - direct).abs() <= 1e-12 * direct);
                }
            }
        }
    }
}

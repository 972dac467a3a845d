//! Value oracles for binary-marginal valuation families.
//!
//! Every family here is integer valued, monotone, normalized (`v(∅) = 0`)
//! and has marginals in `{0, 1}`. The XOS families (explicit set families
//! and index-window spectra) additionally admit a non-wasteful witness
//! `X ⊆ S` with `v(X) = |X| = v(S)` for every `S`, which is what the
//! solver's doubling step relies on.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goods::GoodSet;

/// Ground-set size above which [`ValuationSpec::value_table`] refuses to
/// materialize all subsets.
pub const TABLE_LIMIT: usize = 24;

/// Description of one agent's valuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ValuationSpec {
    /// `v(S) = max_{F ∈ sets} |S ∩ F|`.
    XosFamily { sets: Vec<GoodSet> },
    /// `v(S) = max_t |S ∩ [t, t + delta]|` over windows inside `[0, m)`.
    Spectrum { delta: usize },
    /// `|S|` up to `p`, flat at `p` up to `q`, then `⌈p|S|/q⌉`.
    SubadditivePq { p: usize, q: usize },
    /// `max(f_pq(S), |S ∩ t|)`.
    PlantedSubadditive { p: usize, q: usize, t: GoodSet },
    /// Explicit value per subset mask. Fixture-only: never (de)serialized.
    #[doc(hidden)]
    #[serde(skip)]
    RawTable {
        num_goods: usize,
        values: Vec<u32>,
        declared_xos: bool,
    },
}

/// Coarse class a spec declares membership in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationClass {
    BinaryXos,
    BinarySubadditive,
    Unclassified,
}

impl ValuationClass {
    pub fn name(self) -> &'static str {
        match self {
            ValuationClass::BinaryXos => "binary XOS",
            ValuationClass::BinarySubadditive => "binary subadditive",
            ValuationClass::Unclassified => "unclassified",
        }
    }
}

/// The piecewise `f` with parameters `p < q`.
pub fn f_pq(size: usize, p: usize, q: usize) -> u32 {
    let v = if size <= p {
        size
    } else if size <= q {
        p
    } else {
        (p * size).div_ceil(q)
    };
    v as u32
}

impl ValuationSpec {
    pub fn xos<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<GoodSet>,
    {
        ValuationSpec::XosFamily {
            sets: sets.into_iter().map(Into::into).collect(),
        }
    }

    /// Builds a fixture spec by tabulating `f` over every subset of `[m]`.
    #[doc(hidden)]
    pub fn raw_table(m: usize, declared_xos: bool, f: impl Fn(&GoodSet) -> u32) -> Self {
        assert!(m <= TABLE_LIMIT);
        let values = (0..1u64 << m).map(|mask| f(&GoodSet::from_mask(mask))).collect();
        ValuationSpec::RawTable {
            num_goods: m,
            values,
            declared_xos,
        }
    }

    pub fn class(&self) -> ValuationClass {
        match self {
            ValuationSpec::XosFamily { .. } | ValuationSpec::Spectrum { .. } => ValuationClass::BinaryXos,
            ValuationSpec::SubadditivePq { .. } | ValuationSpec::PlantedSubadditive { .. } => {
                ValuationClass::BinarySubadditive
            }
            ValuationSpec::RawTable { declared_xos, .. } => {
                if *declared_xos {
                    ValuationClass::BinaryXos
                } else {
                    ValuationClass::Unclassified
                }
            }
        }
    }

    pub fn is_xos(&self) -> bool {
        self.class() == ValuationClass::BinaryXos
    }

    /// Checks that the spec is well formed for a ground set of `m` goods.
    pub fn validate(&self, m: usize) -> Result<()> {
        let check_set = |s: &GoodSet| match s.max() {
            Some(g) if g >= m => Err(Error::GoodOutOfRange { good: g, num_goods: m }),
            _ => Ok(()),
        };
        match self {
            ValuationSpec::XosFamily { sets } => {
                if sets.is_empty() {
                    return Err(Error::InvalidInstance(
                        "xos_family must contain at least one set".into(),
                    ));
                }
                sets.iter().try_for_each(check_set)
            }
            ValuationSpec::Spectrum { .. } => Ok(()),
            ValuationSpec::SubadditivePq { p, q } => check_pq(*p, *q),
            ValuationSpec::PlantedSubadditive { p, q, t } => {
                check_pq(*p, *q)?;
                check_set(t)
            }
            ValuationSpec::RawTable { num_goods, values, .. } => {
                if *num_goods != m || values.len() != 1 << m {
                    return Err(Error::InvalidInstance("raw table size mismatch".into()));
                }
                Ok(())
            }
        }
    }

    /// `v(S)` for a ground set of `m` goods.
    pub fn evaluate(&self, set: &GoodSet, m: usize) -> Result<u32> {
        if let Some(g) = set.max() {
            if g >= m {
                return Err(Error::GoodOutOfRange { good: g, num_goods: m });
            }
        }
        Ok(self.evaluate_unchecked(set))
    }

    pub(crate) fn evaluate_unchecked(&self, set: &GoodSet) -> u32 {
        match self {
            ValuationSpec::XosFamily { sets } => sets.iter().map(|f| set.intersection_len(f) as u32).max().unwrap_or(0),
            ValuationSpec::Spectrum { delta } => spectrum_value(set, *delta),
            ValuationSpec::SubadditivePq { p, q } => f_pq(set.len(), *p, *q),
            ValuationSpec::PlantedSubadditive { p, q, t } => {
                f_pq(set.len(), *p, *q).max(set.intersection_len(t) as u32)
            }
            ValuationSpec::RawTable { values, .. } => {
                values[set.as_mask().expect("raw table sets fit one word") as usize]
            }
        }
    }

    /// The spectrum as the explicit family of its windows; other specs are
    /// returned unchanged.
    pub fn expand_spectrum(&self, m: usize) -> ValuationSpec {
        match self {
            ValuationSpec::Spectrum { delta } => ValuationSpec::XosFamily {
                sets: spectrum_windows(*delta, m),
            },
            other => other.clone(),
        }
    }

    /// Values of every subset of `[m]`, indexed by bit mask.
    pub fn value_table(&self, m: usize) -> Result<Vec<u32>> {
        if m > TABLE_LIMIT {
            return Err(Error::OverLimit { m, limit: TABLE_LIMIT });
        }
        self.validate(m)?;
        Ok((0..1u64 << m)
            .map(|mask| self.evaluate_unchecked(&GoodSet::from_mask(mask)))
            .collect())
    }
}

fn check_pq(p: usize, q: usize) -> Result<()> {
    if p == 0 || p >= q {
        return Err(Error::InvalidPq { p, q });
    }
    Ok(())
}

fn window_starts(delta: usize, m: usize) -> std::ops::Range<usize> {
    // With delta >= m - 1 the single window [0, m) covers everything.
    0..m.saturating_sub(delta).max(1)
}

// Any span of width delta + 1 holding members below m can be slid inside
// [0, m), so the best span over the members is the best window.
fn spectrum_value(set: &GoodSet, delta: usize) -> u32 {
    let members: Vec<usize> = set.iter().collect();
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..members.len() {
        while members[hi] - members[lo] > delta {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best as u32
}

/// Window sets `[t, t + delta] ∩ [0, m)` for every admissible start `t`.
pub fn spectrum_windows(delta: usize, m: usize) -> Vec<GoodSet> {
    window_starts(delta, m)
        .map(|t| (t..(t + delta + 1).min(m)).collect())
        .collect()
}

/// A value oracle that counts the queries it answers.
#[derive(Debug)]
pub struct CountingOracle<'a> {
    spec: &'a ValuationSpec,
    num_goods: usize,
    queries: AtomicU64,
}

impl<'a> CountingOracle<'a> {
    pub fn new(spec: &'a ValuationSpec, num_goods: usize) -> Self {
        Self {
            spec,
            num_goods,
            queries: AtomicU64::new(0),
        }
    }

    pub fn spec(&self) -> &'a ValuationSpec {
        self.spec
    }

    pub fn num_goods(&self) -> usize {
        self.num_goods
    }

    pub fn value(&self, set: &GoodSet) -> Result<u32> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.spec.evaluate(set, self.num_goods)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Finds `X ⊆ S` with `v(X) = |X| = v(S)`.
///
/// One pass from the highest index down drops every good whose removal
/// keeps the value, so ties favour low indices. A retained good stays
/// critical as `X` shrinks (monotonicity), and a set in which every good is
/// critical is non-wasteful whenever a non-wasteful witness exists. Issues
/// `|S| + 1` queries.
pub fn extract_nonwasteful(oracle: &CountingOracle<'_>, set: &GoodSet) -> Result<GoodSet> {
    let class = oracle.spec().class();
    if class != ValuationClass::BinaryXos {
        return Err(Error::UnsupportedClass {
            op: "extract_nonwasteful",
            class: class.name(),
        });
    }
    let target = oracle.value(set)?;
    let mut x = set.clone();
    let members: Vec<usize> = set.iter().collect();
    for &g in members.iter().rev() {
        x.remove(g);
        if oracle.value(&x)? != target {
            x.insert(g);
        }
    }
    let reached = oracle.spec().evaluate_unchecked(&x);
    if reached != target || x.len() != target as usize {
        return Err(Error::InvariantViolation(format!(
            "non-wasteful extraction produced |X| = {} with v(X) = {reached}, expected {target}",
            x.len()
        )));
    }
    Ok(x)
}

/// Shrinks a non-wasteful set to `target` goods by dropping the highest
/// indices. Every subset of a non-wasteful set is non-wasteful.
pub fn shrink_to_size(oracle: &CountingOracle<'_>, set: &GoodSet, target: usize) -> Result<GoodSet> {
    let value = oracle.value(set)?;
    if value as usize != set.len() {
        return Err(Error::NotNonWasteful { size: set.len(), value });
    }
    if target > set.len() {
        return Err(Error::TargetOutOfRange { target, max: set.len() });
    }
    Ok(set.iter().take(target).collect())
}

/// Limits on the ground-set size for the exhaustive class checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveLimits {
    pub marginals: usize,
    pub subadditive: usize,
    pub p2: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        Self {
            marginals: 14,
            subadditive: 10,
            p2: 14,
        }
    }
}

impl ExhaustiveLimits {
    /// Every marginal `v(S + g) - v(S)` is 0 or 1.
    pub fn check_binary_marginals(&self, spec: &ValuationSpec, m: usize) -> Result<bool> {
        if m > self.marginals {
            return Err(Error::OverLimit {
                m,
                limit: self.marginals,
            });
        }
        Ok(table_has_binary_marginals(&spec.value_table(m)?, m))
    }

    /// `v(S ∪ T) <= v(S) + v(T)` for all pairs.
    pub fn check_subadditive(&self, spec: &ValuationSpec, m: usize) -> Result<bool> {
        if m > self.subadditive {
            return Err(Error::OverLimit {
                m,
                limit: self.subadditive,
            });
        }
        let t = spec.value_table(m)?;
        let n = t.len();
        for s in 0..n {
            for u in s..n {
                if t[s | u] > t[s] + t[u] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Binary marginals and a non-wasteful witness of full value inside
    /// every set.
    pub fn check_xos_p2(&self, spec: &ValuationSpec, m: usize) -> Result<bool> {
        if m > self.p2 {
            return Err(Error::OverLimit { m, limit: self.p2 });
        }
        let t = spec.value_table(m)?;
        if !table_has_binary_marginals(&t, m) {
            return Ok(false);
        }
        // best[S] = size of the largest non-wasteful subset of S.
        let mut best = vec![0u32; t.len()];
        for s in 1..t.len() {
            let size = (s as u64).count_ones();
            let mut b = if t[s] == size { size } else { 0 };
            let mut rest = s;
            while rest != 0 {
                let g = rest & rest.wrapping_neg();
                b = b.max(best[s ^ g]);
                rest ^= g;
            }
            best[s] = b;
            if b != t[s] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn table_has_binary_marginals(t: &[u32], m: usize) -> bool {
    if t[0] != 0 {
        return false;
    }
    (0..t.len()).all(|s| {
        (0..m)
            .filter(|g| s >> g & 1 == 0)
            .all(|g| matches!(t[s | 1 << g].checked_sub(t[s]), Some(0 | 1)))
    })
}

pub fn check_binary_marginals(spec: &ValuationSpec, m: usize) -> Result<bool> {
    ExhaustiveLimits::default().check_binary_marginals(spec, m)
}

pub fn check_subadditive(spec: &ValuationSpec, m: usize) -> Result<bool> {
    ExhaustiveLimits::default().check_subadditive(spec, m)
}

pub fn check_xos_p2(spec: &ValuationSpec, m: usize) -> Result<bool> {
    ExhaustiveLimits::default().check_xos_p2(spec, m)
}

//! Instance families: the independent-set reduction, the envy-free gap
//! family, the planted subadditive lower-bound pair, and seeded random
//! binary XOS instances.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goods::GoodSet;
use crate::instance::{Allocation, Instance};
use crate::valuations::{f_pq, ValuationSpec};

/// A simple 3-regular graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct CubicGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for CubicGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        CubicGraph::new(r.vertices, r.edges)
    }
}

impl From<CubicGraph> for GraphRepr {
    fn from(g: CubicGraph) -> Self {
        GraphRepr {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

impl CubicGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut degree = vec![0usize; vertices];
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::NotCubic(format!("edge ({u}, {v}) leaves 0..{vertices}")));
            }
            if u == v {
                return Err(Error::NotCubic(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::NotCubic(format!("parallel edge ({u}, {v})")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d != 3) {
            return Err(Error::NotCubic(format!("vertex {v} has degree {}", degree[v])));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of the edges incident to `v`.
    pub fn incident(&self, v: usize) -> GoodSet {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(e, _)| e)
            .collect()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// A maximum independent set by exhaustive search; the lexicographically
    /// smallest one among those of maximum size.
    pub fn max_independent_set(&self) -> Vec<usize> {
        let mut best = Vec::new();
        let mut current = Vec::new();
        self.grow_independent(0, &mut current, &mut best);
        best
    }

    fn grow_independent(&self, next: usize, current: &mut Vec<usize>, best: &mut Vec<usize>) {
        if current.len() + (self.vertices - next) <= best.len() {
            return;
        }
        if next == self.vertices {
            *best = current.clone();
            return;
        }
        if current.iter().all(|&u| !self.adjacent(u, next)) {
            current.push(next);
            self.grow_independent(next + 1, current, best);
            current.pop();
        }
        self.grow_independent(next + 1, current, best);
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.adjacent(u, v)))
    }
}

/// The complete graph on four vertices.
pub fn k4() -> CubicGraph {
    CubicGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).expect("K4 is cubic")
}

/// Outer 5-cycle `0..5`, spokes `i — i+5`, inner pentagram on `5..10`.
pub fn petersen() -> CubicGraph {
    let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    edges.extend((0..5).map(|i| (i, i + 5)));
    edges.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    CubicGraph::new(10, edges).expect("Petersen graph is cubic")
}

/// `tau` agents sharing `v(S) = max_v |S ∩ δ(v)|` over the edge goods.
pub fn gen_apx_reduction(graph: &CubicGraph, tau: usize) -> Result<Instance> {
    if tau == 0 || tau > graph.vertices() {
        return Err(Error::InvalidInstance(format!(
            "tau must lie in 1..={}, got {tau}",
            graph.vertices()
        )));
    }
    let family = ValuationSpec::XosFamily {
        sets: (0..graph.vertices()).map(|v| graph.incident(v)).collect(),
    };
    Instance::new(graph.edges().len(), vec![family; tau])
}

/// Gives agent `k` the edges at the `k`-th vertex of `independent`.
pub fn apx_witness(graph: &CubicGraph, independent: &[usize], tau: usize) -> Result<Allocation> {
    if independent.len() < tau || !graph.is_independent(independent) {
        return Err(Error::InvalidInstance(format!(
            "need an independent set of at least {tau} vertices"
        )));
    }
    Ok(Allocation::new(
        independent[..tau].iter().map(|&v| graph.incident(v)).collect(),
    ))
}

/// Envy-free allocation with low NSW next to a non-wasteful high-NSW one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvyGap {
    pub instance: Instance,
    pub envy_free: Allocation,
    pub nash: Allocation,
}

/// `4k` agents, `2k + 1` blocks of `2k` goods each. Block `x` holds goods
/// `2k·x .. 2k·(x+1)`. The first `2k` agents are additive; the rest value a
/// set by its largest overlap with a single block.
pub fn gen_envy_gap(k: usize) -> EnvyGap {
    assert!(k >= 1, "k must be positive");
    let w = 2 * k;
    let m = w * (w + 1);
    let good = |block: usize, pos: usize| block * w + pos;
    let blocks: Vec<GoodSet> = (0..=w).map(|x| (0..w).map(|p| good(x, p)).collect()).collect();

    let mut valuations = vec![
        ValuationSpec::XosFamily {
            sets: vec![GoodSet::full(m)]
        };
        w
    ];
    valuations.extend(std::iter::repeat_n(ValuationSpec::XosFamily { sets: blocks }, w));
    let instance = Instance::new(m, valuations).expect("valid envy-gap instance");

    let mut envy_free: Vec<GoodSet> = (0..w).map(|i| (0..w).map(|x| good(x, i)).collect()).collect();
    envy_free.extend((0..w).map(|j| GoodSet::from([good(w, j)])));

    // Agent i < 2k takes the first half of block i, agent 2k + j the second
    // half of block j.
    let mut nash: Vec<GoodSet> = (0..w).map(|i| (0..k).map(|p| good(i, p)).collect()).collect();
    nash.extend((0..w).map(|j| (k..w).map(|p| good(j, p)).collect::<GoodSet>()));

    EnvyGap {
        instance,
        envy_free: Allocation::new(envy_free),
        nash: Allocation::new(nash),
    }
}

/// Two instances with `n` agents and `n²` goods that value queries can
/// barely tell apart.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundPair {
    /// Every agent has the same `f_pq`.
    pub identical: Instance,
    /// Agent `i` has `max(f_pq(S), |S ∩ T_i|)`.
    pub planted: Instance,
    /// The planted blocks `T_i`, a partition of the goods into size-`n` parts.
    pub blocks: Vec<GoodSet>,
}

pub fn gen_lower_bound_pair(n: usize, p: usize, q: usize, seed: u64) -> Result<LowerBoundPair> {
    if p == 0 || p >= q {
        return Err(Error::InvalidPq { p, q });
    }
    if n == 0 {
        return Err(Error::InvalidInstance("need at least one agent".into()));
    }
    let m = n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut goods: Vec<usize> = (0..m).collect();
    goods.shuffle(&mut rng);
    let blocks: Vec<GoodSet> = goods.chunks(n).map(|c| c.iter().copied().collect()).collect();
    let identical = Instance::new(m, vec![ValuationSpec::SubadditivePq { p, q }; n])?;
    let planted = Instance::new(
        m,
        blocks
            .iter()
            .map(|t| ValuationSpec::PlantedSubadditive { p, q, t: t.clone() })
            .collect(),
    )?;
    Ok(LowerBoundPair {
        identical,
        planted,
        blocks,
    })
}

/// `p = ⌊(1 + δ) n^{4δ}⌋`, `q = ⌊n^{1 + 2δ}⌋`.
pub fn pq_for_delta(n: usize, delta: f64) -> (usize, usize) {
    let n = n as f64;
    let p = ((1.0 + delta) * n.powf(4.0 * delta)).floor() as usize;
    let q = n.powf(1.0 + 2.0 * delta).floor() as usize;
    (p, q)
}

/// Cardinality bands of the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// `|S| <= p`
    UpToP,
    /// `p < |S| <= q`
    PToQ,
    /// `|S| > q`
    AboveQ,
}

impl Band {
    pub fn of(size: usize, p: usize, q: usize) -> Band {
        if size <= p {
            Band::UpToP
        } else if size <= q {
            Band::PToQ
        } else {
            Band::AboveQ
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub band: Band,
    pub samples: u64,
    pub mismatches: u64,
}

impl BandStats {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.mismatches as f64 / self.samples as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub bands: Vec<BandStats>,
}

/// Samples random sets and counts how often a planted valuation differs
/// from the identical one. Cardinalities cycle through `1..=m` and each set
/// is uniform among sets of its cardinality; the agent is uniform.
pub fn distinguish_probe(n: usize, p: usize, q: usize, seed: u64, num_queries: u64) -> Result<ProbeReport> {
    let pair = gen_lower_bound_pair(n, p, q, seed)?;
    let m = n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut bands: Vec<BandStats> = Vec::new();
    for k in 0..num_queries {
        let size = (k as usize % m) + 1;
        let set: GoodSet = index::sample(&mut rng, m, size).into_iter().collect();
        let agent = rng.gen_range(0..n);
        let planted = pair.planted.valuation(agent).evaluate(&set, m)?;
        let differs = planted != f_pq(size, p, q);
        let band = Band::of(size, p, q);
        let stats = match bands.iter_mut().find(|b| b.band == band) {
            Some(s) => s,
            None => {
                bands.push(BandStats {
                    band,
                    samples: 0,
                    mismatches: 0,
                });
                bands.last_mut().unwrap()
            }
        };
        stats.samples += 1;
        stats.mismatches += u64::from(differs);
    }
    bands.sort_by_key(|b| b.band as u8);
    Ok(ProbeReport { n, p, q, bands })
}

/// Each agent gets `family_size` uniformly drawn sets of exactly
/// `max_set_size` goods.
pub fn gen_random_xos(n: usize, m: usize, family_size: usize, max_set_size: usize, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 || family_size == 0 || max_set_size == 0 || max_set_size > m {
        return Err(Error::InvalidInstance(format!(
            "bad random parameters n={n} m={m} family_size={family_size} max_set_size={max_set_size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let valuations = (0..n)
        .map(|_| ValuationSpec::XosFamily {
            sets: (0..family_size)
                .map(|_| index::sample(&mut rng, m, max_set_size).into_iter().collect())
                .collect(),
        })
        .collect();
    Instance::new(m, valuations)
}

/// `n` agents sharing the window valuation of width `delta + 1`.
pub fn gen_spectrum(n: usize, m: usize, delta: usize) -> Result<Instance> {
    Instance::new(m, vec![ValuationSpec::Spectrum { delta }; n])
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use binfair::generators::{self, CubicGraph};
use binfair::nsw_alg::{initial_matching, pad_with_dummies, InitialMatching, SolveTrace};
use binfair::oracles::{self, MaximinQuery};
use binfair::{Allocation, Budget, GoodSet, Instance, SolveStatus, ValueProfile};

use crate::exit;
use crate::{Family, Objective};

/// Maps a failure to its exit code by the first recognised cause.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<binfair::Error>() {
            use binfair::Error::*;
            return match e {
                UnsupportedClass { .. } => exit::UNSUPPORTED,
                DimensionMismatch { .. }
                | GoodOutOfRange { .. }
                | OverlappingBundles { .. }
                | AgentOutOfRange { .. } => exit::INVALID_ALLOCATION,
                BudgetExceeded { .. } => exit::BUDGET,
                _ => exit::PARSE,
            };
        }
    }
    exit::PARSE
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = to_json(value);
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Allocation files only need `bundles`; other fields are ignored.
#[derive(Deserialize)]
struct AllocationFile {
    bundles: Vec<GoodSet>,
}

#[derive(Serialize)]
struct SolveOutput {
    status: SolveStatus,
    bundles: Vec<GoodSet>,
    unassigned: GoodSet,
    unassigned_policy: &'static str,
    completed_bundles: Vec<GoodSet>,
    values: Vec<u32>,
    nsw: f64,
    sw: u64,
    query_count: u64,
    /// Goods appended by `--pad-dummies`; indices refer to the padded instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    dummy_goods: Option<GoodSet>,
}

pub fn solve(path: &Path, pad_dummies: bool, trace: Option<&Path>, out: Option<&Path>) -> Result<u8> {
    let original: Instance = read_json(path)?;
    let mut inst = original.clone();
    let mut dummy_goods = None;
    if pad_dummies {
        if let InitialMatching::ZeroNsw(_) = initial_matching(&original)? {
            inst = pad_with_dummies(&original)?;
            dummy_goods = Some((original.num_goods()..inst.num_goods()).collect());
        }
    }

    let res = binfair::solve(&inst)?;
    let profile = ValueProfile::of(&inst, &res.allocation)?;
    let output = SolveOutput {
        status: res.status,
        unassigned: res.allocation.unassigned(inst.num_goods()),
        bundles: res.allocation.bundles,
        unassigned_policy: "max_bundle",
        completed_bundles: res.completed_allocation.bundles,
        nsw: profile.nash_welfare(),
        sw: profile.sum(),
        values: profile.values,
        query_count: res.trace.total_value_queries,
        dummy_goods,
    };
    if let Some(path) = trace {
        emit(&res.trace, Some(path))?;
    }
    emit(&output, out)?;
    Ok(match res.status {
        SolveStatus::Solved => exit::OK,
        SolveStatus::ZeroNsw => exit::ZERO_NSW,
    })
}

pub fn verify(instance: &Path, allocation: &Path, trace: Option<&Path>, budget: Budget) -> Result<u8> {
    let inst: Instance = read_json(instance)?;
    let alloc = Allocation::new(read_json::<AllocationFile>(allocation)?.bundles);
    alloc.validate(&inst)?;
    let trace: Option<SolveTrace> = trace.map(read_json).transpose()?;
    let report = binfair::audit(&inst, &alloc, budget, trace.as_ref())?;
    emit(&report, None)?;
    Ok(if report.all_ok() { exit::OK } else { exit::AUDIT_FAILED })
}

fn load_graph(spec: &str) -> Result<CubicGraph> {
    Ok(match spec {
        "k4" => generators::k4(),
        "petersen" => generators::petersen(),
        file => read_json(Path::new(file))?,
    })
}

fn write_companions(dir: Option<&Path>, files: &[(&str, String)]) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Prints the instance; with `out_dir`, also writes it and its companion
/// allocations there.
pub fn generate(family: Family, out_dir: Option<&Path>) -> Result<u8> {
    let instance;
    let mut files = Vec::new();
    match family {
        Family::Apx { graph, tau } => {
            let graph = load_graph(&graph)?;
            instance = generators::gen_apx_reduction(&graph, tau)?;
            let witness = generators::apx_witness(&graph, &graph.max_independent_set(), tau)?;
            files.push(("witness.json", to_json(&witness)));
        }
        Family::EnvyGap { k } => {
            if k == 0 {
                bail!(binfair::Error::InvalidInstance("k must be positive".into()));
            }
            let gap = generators::gen_envy_gap(k);
            instance = gap.instance;
            files.push(("envy_free.json", to_json(&gap.envy_free)));
            files.push(("nash.json", to_json(&gap.nash)));
        }
        Family::LowerBound { n, p, q, delta, seed } => {
            let (p, q) = match (p, q) {
                (Some(p), Some(q)) => (p, q),
                _ => generators::pq_for_delta(n, delta),
            };
            let pair = generators::gen_lower_bound_pair(n, p, q, seed)?;
            instance = pair.planted;
            files.push(("identical.json", to_json(&pair.identical)));
            files.push(("planted.json", to_json(&Allocation::new(pair.blocks))));
        }
        Family::Random {
            n,
            m,
            family_size,
            set_size,
            seed,
        } => {
            let size = set_size.unwrap_or(m.div_ceil(2));
            instance = generators::gen_random_xos(n, m, family_size, size, seed)?;
        }
        Family::Spectrum { n, m, delta } => {
            instance = generators::gen_spectrum(n, m, delta)?;
        }
    }
    let text = to_json(&instance);
    files.insert(0, ("instance.json", text.clone()));
    write_companions(out_dir, &files)?;
    print!("{text}");
    Ok(exit::OK)
}

pub struct OracleParams {
    pub agent: Option<usize>,
    pub parts: Option<usize>,
    pub goods: Option<Vec<usize>>,
    pub allocation: Option<PathBuf>,
}

#[derive(Serialize)]
struct OptimumOutput {
    objective: &'static str,
    bundles: Vec<GoodSet>,
    values: Vec<u32>,
    nsw: f64,
    sw: u64,
}

#[derive(Serialize)]
struct ShareOutput {
    objective: &'static str,
    agent: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    parts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    goods: Option<GoodSet>,
    value: u32,
}

pub fn oracle(instance: &Path, objective: Objective, params: OracleParams, budget: Budget) -> Result<u8> {
    let inst: Instance = read_json(instance)?;
    match objective {
        Objective::Nsw | Objective::Sw => {
            let (name, opt) = match objective {
                Objective::Nsw => ("nsw", oracles::brute_force_nsw_opt(&inst, budget)?),
                _ => ("sw", oracles::brute_force_sw_opt(&inst, budget)?),
            };
            emit(
                &OptimumOutput {
                    objective: name,
                    nsw: opt.profile.nash_welfare(),
                    sw: opt.profile.sum(),
                    values: opt.profile.values,
                    bundles: opt.allocation.bundles,
                },
                None,
            )?;
        }
        Objective::Mms => {
            let agent = params.agent.context("--agent is required for mms")?;
            let goods = match params.goods {
                Some(g) => g.into_iter().collect(),
                None => inst.all_goods(),
            };
            let query = MaximinQuery {
                agent,
                parts: params.parts.unwrap_or(inst.num_agents()),
                goods,
            };
            let value = oracles::maximin_share(&inst, &query, budget)?;
            emit(
                &ShareOutput {
                    objective: "mms",
                    agent,
                    parts: Some(query.parts),
                    goods: Some(query.goods),
                    value,
                },
                None,
            )?;
        }
        Objective::Gmms => {
            let path = params.allocation.context("--allocation is required for gmms")?;
            let alloc = Allocation::new(read_json::<AllocationFile>(&path)?.bundles);
            alloc.validate(&inst)?;
            let agents: Vec<usize> = match params.agent {
                Some(a) => vec![a],
                None => (0..inst.num_agents()).collect(),
            };
            let shares = agents
                .into_iter()
                .map(|agent| {
                    Ok(ShareOutput {
                        objective: "gmms",
                        agent,
                        parts: None,
                        goods: None,
                        value: oracles::gmms_threshold(&inst, &alloc, agent, budget)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&shares, None)?;
        }
    }
    Ok(exit::OK)
}

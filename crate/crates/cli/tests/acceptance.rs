//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p binfair-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use binfair::audit::{lemma1_holds, nsw_within_288};
use binfair::exact::sw_within_3_plus_2sqrt2;
use binfair::generators::{
    apx_witness, distinguish_probe, gen_apx_reduction, gen_envy_gap, gen_lower_bound_pair, gen_random_xos,
    gen_spectrum, k4, petersen, pq_for_delta, Band,
};
use binfair::oracles::{brute_force_nsw_opt, brute_force_sw_opt, is_alpha_gmms, Budget};
use binfair::valuations::{check_binary_marginals, check_subadditive, check_xos_p2};
use binfair::{is_envy_free, solve, Allocation, Instance, SolveResult, SolveStatus, ValuationSpec, ValueProfile};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:.0?}"))
}

fn exact_product(values: &[u32]) -> u128 {
    values.iter().map(|&v| u128::from(v)).product()
}

fn envy_gap() -> Outcome {
    let start = Instant::now();
    for k in [1usize, 2, 3, 5] {
        let gap = gen_envy_gap(k);
        let inst = &gap.instance;
        ensure(is_envy_free(inst, &gap.envy_free).map_err(|e| e.to_string())?, || {
            format!("k={k}: not envy-free")
        })?;
        let ef = ValueProfile::of(inst, &gap.envy_free).map_err(|e| e.to_string())?;
        let w = 2 * k as u128;
        // NSW² = 2k over 4k agents is ∏ = (2k)^{2k}.
        ensure(exact_product(&ef.values) == w.pow(w as u32), || {
            format!("k={k}: envy-free profile {:?}", ef.values)
        })?;
        let nash = ValueProfile::of(inst, &gap.nash).map_err(|e| e.to_string())?;
        ensure(nash.values.iter().all(|&v| v as usize == k), || {
            format!("k={k}: nash profile {:?}", nash.values)
        })?;
        let ratio = nash.nash_welfare() / ef.nash_welfare();
        let expected = (k as f64 / 2.0).sqrt();
        ensure((ratio - expected).abs() < 1e-12, || {
            format!("k={k}: gap {ratio} vs {expected}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("k in {{1,2,3,5}}, {:.2?}", start.elapsed()))
}

fn apx_reduction() -> Outcome {
    let start = Instant::now();
    let g = petersen();
    let independent = g.max_independent_set();
    let inst = gen_apx_reduction(&g, 4).map_err(|e| e.to_string())?;
    let witness = apx_witness(&g, &independent, 4).map_err(|e| e.to_string())?;
    let profile = ValueProfile::of(&inst, &witness).map_err(|e| e.to_string())?;
    ensure(profile.values.iter().all(|&v| v == 3), || {
        format!("witness profile {:?}", profile.values)
    })?;
    let hardness = 1.5f64.powf(1.0 / 95.0);
    ensure(hardness > 1.0042, || format!("(3/2)^(1/95) = {hardness}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "independent set {}, witness NSW 3, (3/2)^(1/95) = {hardness:.6}",
        independent.len()
    ))
}

struct Case {
    inst: Instance,
    res: SolveResult,
    alg: ValueProfile,
    nsw_opt: ValueProfile,
    sw_opt: u64,
}

/// Seeded random XOS instances with `n ∈ {2,3}` and `m <= 7`.
fn corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..240)
        .map(|seed| {
            let n = 2 + seed % 2;
            let m = rng.gen_range(n..=7);
            let family = rng.gen_range(1..=3);
            let size = rng.gen_range(1..=m);
            let inst = gen_random_xos(n, m, family, size, seed as u64).unwrap();
            let res = solve(&inst).unwrap();
            let alg = ValueProfile::of(&inst, &res.allocation).unwrap();
            let nsw_opt = brute_force_nsw_opt(&inst, Budget::default()).unwrap().profile;
            let sw_opt = brute_force_sw_opt(&inst, Budget::default()).unwrap().profile.sum();
            Case {
                inst,
                res,
                alg,
                nsw_opt,
                sw_opt,
            }
        })
        .collect()
}

fn nsw_factor(corpus: &[Case], built: Duration) -> Outcome {
    let start = Instant::now();
    let mut min_ratio = f64::INFINITY;
    for (i, c) in corpus.iter().enumerate() {
        ensure(nsw_within_288(&c.alg, &c.nsw_opt), || {
            format!("instance {i}: {:?} vs {:?}", c.alg.values, c.nsw_opt.values)
        })?;
        let opt = c.nsw_opt.nash_welfare();
        if opt > 0.0 {
            min_ratio = min_ratio.min(c.alg.nash_welfare() / opt);
        }
    }
    within(built + start.elapsed(), Duration::from_secs(120))?;
    let solved = corpus.iter().filter(|c| c.res.status == SolveStatus::Solved).count();
    Ok(format!(
        "{} instances ({solved} with positive NSW), min NSW ratio {min_ratio:.4}",
        corpus.len()
    ))
}

fn sw_factor(corpus: &[Case]) -> Outcome {
    let mut min_ratio = f64::INFINITY;
    for (i, c) in corpus.iter().enumerate() {
        ensure(sw_within_3_plus_2sqrt2(c.alg.sum(), c.sw_opt), || {
            format!("instance {i}: sw {} vs opt {}", c.alg.sum(), c.sw_opt)
        })?;
        if c.sw_opt > 0 {
            min_ratio = min_ratio.min(c.alg.sum() as f64 / c.sw_opt as f64);
        }
    }
    Ok(format!("{} instances, min SW ratio {min_ratio:.4}", corpus.len()))
}

fn gmms_factor(corpus: &[Case]) -> Outcome {
    let mut checked = 0;
    for (i, c) in corpus.iter().enumerate().filter(|(_, c)| c.inst.num_goods() <= 6) {
        let ok = is_alpha_gmms(&c.inst, &c.res.allocation, Ratio::new(1, 6), Budget::default())
            .map_err(|e| e.to_string())?;
        ensure(ok, || format!("instance {i} is not 1/6-GMMS"))?;
        checked += 1;
    }
    ensure(checked > 0, || "no instance with m <= 6".into())?;
    Ok(format!("{checked} instances with m <= 6"))
}

fn lemma_counting(corpus: &[Case]) -> Outcome {
    let mut checked = 0;
    for (i, c) in corpus
        .iter()
        .enumerate()
        .filter(|(_, c)| c.nsw_opt.nash_welfare() > 0.0)
    {
        ensure(lemma1_holds(&c.alg, &c.nsw_opt), || {
            format!("instance {i}: {:?} vs {:?}", c.alg.values, c.nsw_opt.values)
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances, alpha in {{1,2,4,8}}"))
}

fn growth(corpus: &[Case]) -> Outcome {
    let mut iterations = 0;
    let mut max_iterations = 0;
    for (i, c) in corpus.iter().enumerate() {
        let (n, m) = (c.inst.num_agents(), c.inst.num_goods());
        let t = &c.res.trace;
        ensure(t.doubling_ok() && t.growth_ok(m), || {
            format!("instance {i}: growth violated")
        })?;
        ensure(t.within_iteration_bound(n, m), || {
            format!("instance {i}: {} iterations", t.iterations.len())
        })?;
        iterations += t.iterations.len();
        max_iterations = max_iterations.max(t.iterations.len());
    }
    Ok(format!(
        "{iterations} iterations checked, at most {max_iterations} per run"
    ))
}

fn valuation_classes() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for q in 2..=5usize {
        for p in 1..q {
            for m in 1..=9usize {
                let pq = ValuationSpec::SubadditivePq { p, q };
                let ok = check_binary_marginals(&pq, m).map_err(|e| e.to_string())?
                    && check_subadditive(&pq, m).map_err(|e| e.to_string())?;
                ensure(ok, || format!("subadditive_pq p={p} q={q} m={m}"))?;
                checks += 1;
                for seed in 0..20u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let t = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
                    let planted = ValuationSpec::PlantedSubadditive { p, q, t };
                    let ok = check_binary_marginals(&planted, m).map_err(|e| e.to_string())?
                        && check_subadditive(&planted, m).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("planted p={p} q={q} m={m} seed={seed}"))?;
                    checks += 1;
                }
            }
        }
    }

    let mut xos_fixtures: Vec<(String, ValuationSpec, usize)> = Vec::new();
    let gap = gen_envy_gap(1);
    for (i, v) in gap.instance.valuations().iter().enumerate() {
        xos_fixtures.push((format!("envy_gap agent {i}"), v.clone(), gap.instance.num_goods()));
    }
    let k4_inst = gen_apx_reduction(&k4(), 1).map_err(|e| e.to_string())?;
    for (i, v) in k4_inst.valuations().iter().enumerate() {
        xos_fixtures.push((format!("apx k4 agent {i}"), v.clone(), k4_inst.num_goods()));
    }
    for m in 1..=10usize {
        for delta in 0..m {
            let inst = gen_spectrum(1, m, delta).map_err(|e| e.to_string())?;
            xos_fixtures.push((format!("spectrum m={m} delta={delta}"), inst.valuation(0).clone(), m));
        }
        for seed in 0..5u64 {
            let inst = gen_random_xos(1, m, 3, m.div_ceil(2), seed).map_err(|e| e.to_string())?;
            xos_fixtures.push((format!("random m={m} seed={seed}"), inst.valuation(0).clone(), m));
        }
    }
    for (name, spec, m) in &xos_fixtures {
        ensure(m <= &10, || format!("{name}: m={m}"))?;
        let ok = check_xos_p2(spec, *m).map_err(|e| format!("{name}: {e}"))?;
        ensure(ok, || format!("{name}: P2 fails"))?;
    }
    let witness = ValuationSpec::SubadditivePq { p: 1, q: 3 };
    ensure(!check_xos_p2(&witness, 5).map_err(|e| e.to_string())?, || {
        "p=1 q=3 m=5 passes P2".into()
    })?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{checks} subadditive checks, {} XOS fixtures, separation at p=1 q=3 m=5, {:.2?}",
        xos_fixtures.len(),
        start.elapsed()
    ))
}

fn lower_bound_gap() -> Outcome {
    for (n, p, q) in [(2usize, 1usize, 2usize), (3, 1, 2), (3, 2, 3), (3, 1, 5)] {
        for seed in 0..5 {
            let pair = gen_lower_bound_pair(n, p, q, seed).map_err(|e| e.to_string())?;
            let planted =
                ValueProfile::of(&pair.planted, &Allocation::new(pair.blocks.clone())).map_err(|e| e.to_string())?;
            ensure(planted.values.iter().all(|&v| v as usize == n), || {
                format!("n={n} seed={seed}: {:?}", planted.values)
            })?;
        }
    }
    let pair = gen_lower_bound_pair(2, 1, 2, 0).map_err(|e| e.to_string())?;
    let identical = brute_force_nsw_opt(&pair.identical, Budget::default())
        .map_err(|e| e.to_string())?
        .profile;
    ensure(identical.values == [2, 1], || {
        format!("identical-f optimum {:?}", identical.values)
    })?;
    ensure(identical.nash_welfare() < 2.0, || {
        "identical-f optimum reaches 2".into()
    })?;

    let (p, q) = pq_for_delta(16, 0.05);
    let probe = distinguish_probe(16, p, q, 7, 4096).map_err(|e| e.to_string())?;
    let mut fractions = Vec::new();
    for band in &probe.bands {
        if band.band == Band::UpToP {
            ensure(band.mismatches == 0, || {
                format!("{} mismatches with |S| <= p", band.mismatches)
            })?;
        }
        fractions.push(format!("{:?} {}/{}", band.band, band.mismatches, band.samples));
    }
    Ok(format!(
        "planted NSW = n, identical-f optimum NSW {:.6}, probe n=16 p={p} q={q}: {}",
        identical.nash_welfare(),
        fractions.join(", ")
    ))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_binfair"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited with {:?}", out.status.code())
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst = dir.path().join("instance.json");
    let inst_s = inst.to_str().unwrap();
    let trace = dir.path().join("trace.json");
    let trace_s = trace.to_str().unwrap();
    let generate = ["generate", "random", "--n", "3", "--m", "7", "--seed", "1"];
    let reference = run_cli(&generate)?;
    std::fs::write(&inst, &reference).map_err(|e| e.to_string())?;
    let solved = run_cli(&["solve", inst_s, "--trace", trace_s])?;
    let solved_trace = std::fs::read(&trace).map_err(|e| e.to_string())?;
    for rep in 1..10 {
        ensure(run_cli(&generate)? == reference, || {
            format!("generate differs on run {rep}")
        })?;
        ensure(run_cli(&["solve", inst_s, "--trace", trace_s])? == solved, || {
            format!("solve differs on run {rep}")
        })?;
        let t = std::fs::read(&trace).map_err(|e| e.to_string())?;
        ensure(t == solved_trace, || format!("trace differs on run {rep}"))?;
    }
    Ok("10 runs each of generate and solve (with trace) are byte-identical".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS  {id:>2}  {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL  {id:>2}  {name}: {detail}");
        }
    };

    report(1, "envy-free vs Nash gap", envy_gap());
    report(2, "cubic-graph reduction", apx_reduction());
    let start = Instant::now();
    let corpus = corpus();
    let built = start.elapsed();
    report(3, "NSW within 288", nsw_factor(&corpus, built));
    report(4, "SW within 3+2√2", sw_factor(&corpus));
    report(5, "1/6-GMMS", gmms_factor(&corpus));
    report(6, "counting bound", lemma_counting(&corpus));
    report(7, "potential growth and iteration bound", growth(&corpus));
    report(8, "valuation classes", valuation_classes());
    report(9, "planted gap and probe", lower_bound_gap());
    report(10, "determinism", determinism());

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

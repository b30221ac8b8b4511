//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use fairsplit_core::fairness::{self, Property};
use fairsplit_core::generate::{self, CapacityPolicy, GenParams};
use fairsplit_core::instance::{Agent, AllocationViolation, Instance, Item};
use fairsplit_core::matching::{self, WeightVector};
use fairsplit_core::oracle::{self, Requirement, DEFAULT_BUDGET};
use fairsplit_core::rational::{int, Rational};
use fairsplit_core::solver::{self, DifferenceRatio};
use fairsplit_core::{fixtures, solve};
use rand::Rng;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn item(inst: &Instance, name: &str) -> Item {
    inst.item_by_name(name).unwrap_or_else(|| panic!("no item {name}"))
}

fn table2_end_to_end() -> Outcome {
    let f = fixtures::table2();
    let inst = &f.instance;
    let start = Instant::now();
    let out = solve(inst).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(fairness::holds(inst, &out.allocation, Property::Ef1), "final allocation is not EF1");
    ensure!(
        oracle::is_pareto_optimal(inst, &out.allocation, DEFAULT_BUDGET).map_err(|e| e.to_string())?,
        "final allocation is not PO"
    );
    let steps = &out.trace.steps;
    ensure!(steps.len() == 1, "expected one exchange, got {}", steps.len());
    let pair = &steps[0].pair;
    ensure!(
        (pair.item_of_first, pair.item_of_second) == (item(inst, "o1"), item(inst, "o3")),
        "tie-break picked ({}, {})",
        inst.item_name(pair.item_of_first),
        inst.item_name(pair.item_of_second)
    );
    let stated = f.snapshot("initial").expect("snapshot");
    let w = WeightVector::uniform(2);
    let initial = &out.trace.initial;
    ensure!(
        initial == stated
            || matching::weighted_sum(&out.padded, initial, &w) == matching::weighted_sum(inst, stated, &w),
        "initial allocation differs from the stated one"
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("one exchange (o1, o3), ratio {}, {elapsed:?}", pair.ratio))
}

fn intro_example() -> Outcome {
    let inst = fixtures::intro().instance;
    let out = solve(&inst).map_err(|e| e.to_string())?;
    ensure!(fairness::holds(&inst, &out.allocation, Property::Ef11), "solver output is not EF[1,1]");
    let search = oracle::find_allocation(&inst, &[Requirement::Fair(Property::Ef1)], DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure!(search.found.is_none(), "oracle found an EF1 allocation");
    ensure!(search.enumerated == 2, "enumerated {} allocations", search.enumerated);
    Ok("EF[1,1] output; no EF1 allocation among 2".into())
}

fn table6_reproduction() -> Outcome {
    let f = fixtures::table6();
    let inst = &f.instance;
    let a = f.snapshot("A").expect("snapshot");
    let after = f.snapshot("after_swap").expect("snapshot");
    let u = |agent: usize, bundle: usize| inst.bundle_utility(Agent(agent), a.bundle(Agent(bundle)));
    ensure!(
        [u(0, 0), u(0, 1), u(1, 0), u(1, 1)] == [int(-10), int(-7), int(-2), int(-4)],
        "bundle utilities differ"
    );
    let v = fairness::check(inst, a, Property::Ef1);
    ensure!(v.holds, "A is not EF1");
    let w12 = v.witness(Agent(0), Agent(1)).expect("witness");
    let w21 = v.witness(Agent(1), Agent(0)).expect("witness");
    ensure!(w12.removed_own == Some(item(inst, "o1")), "agent 1 witness is not o1");
    ensure!(w21.removed_own == Some(item(inst, "o3")), "agent 2 witness is not o3");
    ensure!(fairness::is_pareto_improvement(inst, a, after), "A' is not a Pareto improvement");
    let v = fairness::check(inst, after, Property::Ef1);
    ensure!(!v.holds, "A' is EF1");
    ensure!(v.violations().any(|w| w.envier == Agent(0) && w.envied == Agent(1)), "pair (1,2) not violated");
    Ok("utilities -10/-7/-2/-4, witnesses o1/o3, A' fails EF1".into())
}

fn table5_reproduction() -> Outcome {
    let f = fixtures::table5();
    let a = f.snapshot("diagonal").expect("snapshot");
    let envy = fairness::envy_graph(&f.instance, a);
    let top = fairness::top_trading_graph(&f.instance, a);
    ensure!(
        envy.named_edges(&f.instance) == vec![("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")],
        "envy graph {:?}",
        envy.named_edges(&f.instance)
    );
    ensure!(
        top.named_edges(&f.instance) == vec![("1", "2"), ("2", "3"), ("3", "4")],
        "top-trading graph {:?}",
        top.named_edges(&f.instance)
    );
    ensure!(envy.has_cycle() && !top.has_cycle(), "cycle structure differs");
    Ok("envy {1>2,2>3,3>1,3>4}; top-trading {1>2,2>3,3>4} acyclic".into())
}

fn table3_reproduction() -> Outcome {
    let f = fixtures::table3();
    let inst = &f.instance;
    let r1 = f.snapshot("round1").expect("snapshot");
    let r2 = f.snapshot("round2").expect("snapshot");
    ensure!(fairness::holds(inst, r1, Property::Ef1), "round 1 is not EF1");
    let v = fairness::check(inst, r2, Property::Ef1);
    ensure!(!v.holds_for(Agent(0)), "round 2 is EF1 for agent 1");
    let own = inst.bundle_utility(Agent(0), r2.bundle(Agent(0)));
    let other = inst.bundle_utility(Agent(0), r2.bundle(Agent(1)));
    let worst = r2.bundle(Agent(0)).iter().map(|&t| inst.utility(Agent(0), t)).min().expect("non-empty");
    let best = &own - worst;
    ensure!((own.clone(), other.clone(), best.clone()) == (int(-4), int(-1), int(-2)), "values {own} {other} {best}");
    Ok("round 1 EF1; round 2: -4 vs -1, best removal -2".into())
}

fn table4_reproduction() -> Outcome {
    let f = fixtures::table4();
    let inst = &f.instance;
    let state = f.snapshot("state").expect("snapshot");
    let sinks = fairness::envy_graph(inst, state).sinks();
    ensure!(sinks == vec![Agent(1)], "sinks {sinks:?}");
    let grown = f.snapshot("sink_gets_o1_4").expect("snapshot");
    ensure!(!grown.is_feasible(inst), "still feasible");
    let over = grown.capacity_violations(inst);
    ensure!(
        over.iter().any(|v| matches!(v, AllocationViolation::CapacityExceeded { agent: Agent(1), count: 3, capacity: 2, .. })),
        "no capacity violation for agent 2: {over:?}"
    );
    Ok("only sink is agent 2; adding o1_4 exceeds capacity 2".into())
}

fn check_solver_run(inst: &Instance) -> Result<(), String> {
    let out = solve(inst).map_err(|e| e.to_string())?;
    let a = &out.allocation;
    ensure!(a.is_feasible(inst), "infeasible output");
    ensure!(fairness::holds(inst, a, Property::Ef11), "output not EF[1,1]");
    ensure!(
        oracle::is_pareto_optimal(inst, a, DEFAULT_BUDGET).map_err(|e| e.to_string())?,
        "output not PO"
    );
    if inst.is_same_sign() {
        ensure!(fairness::holds(inst, a, Property::Ef1), "same-sign output not EF1");
    }
    let ratios = out.trace.ratios();
    ensure!(ratios.windows(2).all(|w| w[0] >= w[1]), "ratios increase: {ratios:?}");
    ensure!(out.trace.initial_verdict.envious.len() <= 1, "initial allocation has two envious agents");
    let padded = &out.padded;
    ensure!(
        matching::is_w_maximal(padded, &out.trace.initial, &WeightVector::uniform(2)).map_err(|e| e.to_string())?,
        "initial allocation not w-maximal"
    );
    for (k, step) in out.trace.steps.iter().enumerate() {
        ensure!(step.verdict.envious.len() <= 1, "step {k} has two envious agents");
        let w = out.trace.certifying_weights(k).map_err(|e| format!("step {k}: {e}"))?;
        ensure!(
            matching::is_w_maximal(padded, &step.allocation, &w).map_err(|e| e.to_string())?,
            "step {k} not w'-maximal"
        );
    }
    Ok(())
}

fn randomized_solver_suite() -> Outcome {
    let start = Instant::now();
    let count = 1000u64;
    let mut exchanges = 0usize;
    for seed in 0..count {
        let mut rng = generate::rng(seed);
        let params = GenParams {
            seed,
            agents: 2,
            category_sizes: generate::random_shape(&mut rng, 3, 8),
            capacity: CapacityPolicy::Random,
            utility_min: -9,
            utility_max: 9,
            same_sign: seed % 2 == 1,
        };
        let inst = generate::generate_with(&params, &mut rng).map_err(|e| e.to_string())?;
        check_solver_run(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        exchanges += solve(&inst).map(|o| o.trace.steps.len()).unwrap_or(0);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{count} instances, {exchanges} exchanges, {elapsed:?}"))
}

fn w_maximality_equivalence() -> Outcome {
    let mut positives = 0;
    let count = 600u64;
    for seed in 0..count {
        let mut rng = generate::rng(10_000 + seed);
        let wide = seed % 3 != 0;
        let params = GenParams {
            seed,
            agents: 2,
            category_sizes: generate::random_shape(&mut rng, 3, 8),
            capacity: CapacityPolicy::Random,
            utility_min: if wide { -9 } else { -2 },
            utility_max: if wide { 9 } else { 2 },
            same_sign: false,
        };
        let inst = generate::generate_with(&params, &mut rng).map_err(|e| e.to_string())?;
        let padded = inst.padded().map_err(|e| e.to_string())?;
        let w = if seed % 4 == 0 { WeightVector::uniform(2) } else { generate::random_pair_weights(&mut rng, 7) };
        let (_, argmax) = oracle::brute_force_w_maximal(&padded, &w, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let alloc = if rng.gen_bool(0.5) {
            argmax[rng.gen_range(0..argmax.len())].clone()
        } else {
            generate::random_allocation(&padded, &mut rng)
        };
        let fast = matching::is_w_maximal(&padded, &alloc, &w).map_err(|e| e.to_string())?;
        let truth = argmax.contains(&alloc);
        ensure!(fast == truth, "seed {seed}: is_w_maximal {fast}, brute force {truth}");
        positives += usize::from(truth);
    }
    Ok(format!("{count} triples, {positives} maximal, 0 disagreements"))
}

fn ratio_of(inst: &Instance, a: Item, b: Item) -> DifferenceRatio {
    solver::difference_ratio(inst, Agent(1), Agent(0), a, b)
}

fn ratio_algebra() -> Outcome {
    let mut rng = generate::rng(77);
    let count = 10_000;
    let mut holds = 0;
    for k in 0..count {
        let bound = if k % 2 == 0 { 3 } else { 12 };
        let mut is: Vec<Rational> = Vec::new();
        while is.len() < 3 {
            let v = generate::random_rational(&mut rng, bound);
            if !is.contains(&v) {
                is.push(v);
            }
        }
        is.sort_by(|a, b| b.cmp(a));
        let [xi, yi, zi] = [is[0].clone(), is[1].clone(), is[2].clone()];
        let [xj, yj, zj] = std::array::from_fn(|_| generate::random_rational(&mut rng, bound));
        let forms_le = [
            (&xj - &zj) / (&xi - &zi) <= (&xj - &yj) / (&xi - &yi),
            (&yj - &zj) / (&yi - &zi) <= (&yj - &xj) / (&yi - &xi),
            (&zj - &yj) / (&zi - &yi) <= (&zj - &xj) / (&zi - &xi),
        ];
        let forms_ge = [
            (&xj - &zj) / (&xi - &zi) >= (&xj - &yj) / (&xi - &yi),
            (&yj - &zj) / (&yi - &zi) >= (&yj - &xj) / (&yi - &xi),
            (&zj - &yj) / (&zi - &yi) >= (&zj - &xj) / (&zi - &xi),
        ];
        let inst = Instance::builder(["i", "j"])
            .category("C", 2, &["x", "y", "z"])
            .rational_utilities("i", vec![xi.clone(), yi.clone(), zi.clone()])
            .rational_utilities("j", vec![xj.clone(), yj.clone(), zj.clone()])
            .build()
            .map_err(|e| e.to_string())?;
        let (x, y, z) = (Item(0), Item(1), Item(2));
        let (rxz, rxy, ryz) = (ratio_of(&inst, x, z), ratio_of(&inst, x, y), ratio_of(&inst, y, z));
        let impl_le = [rxz <= rxy, ryz <= rxy, ryz <= rxz];
        let impl_ge = [rxz >= rxy, ryz >= rxy, ryz >= rxz];
        for forms in [forms_le, forms_ge, impl_le, impl_ge] {
            ensure!(forms.iter().all(|&f| f == forms[0]), "sextuple {k}: forms disagree {forms:?}");
        }
        ensure!(forms_le[0] == impl_le[0] && forms_ge[0] == impl_ge[0], "sextuple {k}: ratio comparison differs");
        holds += usize::from(forms_le[0]);
    }
    Ok(format!("{count} sextuples, '<=' side held in {holds}"))
}

fn cycle_decomposition() -> Outcome {
    let count = 240u64;
    let mut cycles_total = 0;
    for seed in 0..count {
        let mut rng = generate::rng(20_000 + seed);
        let agents = 2 + (seed % 3) as usize;
        let params = GenParams {
            seed,
            agents,
            category_sizes: generate::random_shape(&mut rng, 3, 9),
            capacity: CapacityPolicy::Random,
            ..GenParams::default()
        };
        let padded = generate::generate_with(&params, &mut rng)
            .map_err(|e| e.to_string())?
            .padded()
            .map_err(|e| e.to_string())?;
        let from = generate::random_allocation(&padded, &mut rng);
        let to = generate::random_allocation(&padded, &mut rng);
        let cycles = oracle::exchange_cycle_decomposition(&padded, &from, &to).map_err(|e| format!("seed {seed}: {e}"))?;
        let mut seen: Vec<Item> = Vec::new();
        let mut current = from.clone();
        for c in &cycles {
            ensure!(c.agents.len() >= 2 && c.agents.len() == c.items.len(), "seed {seed}: malformed cycle");
            let mut agents = c.agents.clone();
            agents.sort();
            agents.dedup();
            ensure!(agents.len() == c.agents.len(), "seed {seed}: agent repeats in a cycle");
            let cat = padded.category_of(c.items[0]);
            ensure!(c.items.iter().all(|&i| padded.category_of(i) == cat), "seed {seed}: cycle spans categories");
            for (k, &i) in c.items.iter().enumerate() {
                ensure!(!seen.contains(&i), "seed {seed}: item reused across cycles");
                ensure!(current.owner(i) == Some(c.agents[k]), "seed {seed}: cycle item not held by its agent");
                seen.push(i);
            }
            c.apply(&mut current);
            ensure!(current.is_feasible(&padded), "seed {seed}: intermediate allocation infeasible");
        }
        ensure!(current == to, "seed {seed}: cycles do not reconstruct the target");
        cycles_total += cycles.len();
    }
    Ok(format!("{count} pairs (n = 2..4), {cycles_total} cycles"))
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn scaling_sanity() -> Outcome {
    let sizes = [8usize, 16, 32, 64];
    let mut points = Vec::new();
    for &m in &sizes {
        let mut times = Vec::new();
        for seed in 0..9u64 {
            let params = GenParams {
                seed: 30_000 + seed,
                category_sizes: vec![m / 2, m / 4, m / 4],
                capacity: CapacityPolicy::Tight,
                same_sign: seed % 2 == 0,
                ..GenParams::default()
            };
            let inst = generate::generate(&params).map_err(|e| e.to_string())?;
            let start = Instant::now();
            solve(&inst).map_err(|e| e.to_string())?;
            times.push(start.elapsed());
        }
        points.push(((m as f64).ln(), median(times).as_secs_f64().max(1e-9).ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let medians: Vec<String> = points.iter().map(|p| format!("{:.2}ms", p.1.exp() * 1e3)).collect();
    ensure!(slope.le(&4.5), "log-log slope {slope:.2}; medians {medians:?}");
    Ok(format!("log-log slope {slope:.2}; medians {}", medians.join(" ")))
}

fn run(f: fn() -> Outcome) -> Outcome {
    let prev = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let r = panic::catch_unwind(AssertUnwindSafe(f));
    panic::set_hook(prev);
    r.unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("table2 end-to-end", table2_end_to_end),
        ("intro example", intro_example),
        ("table6 reproduction", table6_reproduction),
        ("table5 reproduction", table5_reproduction),
        ("table3 reproduction", table3_reproduction),
        ("table4 reproduction", table4_reproduction),
        ("randomized solver suite", randomized_solver_suite),
        ("w-maximality oracle equivalence", w_maximality_equivalence),
        ("ratio inequality algebra", ratio_algebra),
        ("exchange-cycle decomposition", cycle_decomposition),
        ("scaling sanity", scaling_sanity),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match run(*f) {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}


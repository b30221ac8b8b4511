use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fairsplit_core::fairness::{self, Property};
use fairsplit_core::generate::{self, CapacityPolicy, GenParams};
use fairsplit_core::instance::{Allocation, Instance};
use fairsplit_core::matching::{self, WeightVector};
use fairsplit_core::oracle::{self, Requirement, DEFAULT_BUDGET};
use fairsplit_core::solver::{self, SolveError};
use fairsplit_core::{fixtures, lines, rational, report, schema};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAILS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_AGENTS: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "fairsplit", version, about = "Fair allocation of mixed goods and chores under category capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Pareto-optimal EF[1,1] allocation for two agents.
    Solve(SolveArgs),
    /// Check a fairness, Pareto, or graph property of an allocation.
    Check(CheckArgs),
    /// Exhaustive queries for small instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Print a built-in example instance.
    Fixtures(FixturesArgs),
    /// Export item lines and their crossings for plotting.
    Lines(LinesArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Write the allocation JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the exchange trace JSON here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Certify Pareto optimality and EF1 existence by enumeration.
    #[arg(long)]
    certify: bool,
    /// Largest number of allocations the oracle may enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckProperty {
    Ef,
    Ef1,
    Ef11,
    Ef11u,
    Po,
    Feasible,
    EnvyGraph,
    TopTrading,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    allocation: PathBuf,
    #[arg(long, value_enum)]
    property: CheckProperty,
    /// Accept allocations that leave items unallocated (capacities still apply).
    #[arg(long)]
    partial: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Search for an allocation with every listed property (ef, ef1, ef11, ef11u, po).
    Find {
        instance: PathBuf,
        #[arg(long = "property", required = true)]
        properties: Vec<Requirement>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Certify Pareto optimality or print a Pareto improvement.
    Po {
        instance: PathBuf,
        allocation: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// All allocations maximizing the weighted utility sum (two agents: --w1; otherwise equal weights).
    Wmax {
        instance: PathBuf,
        #[arg(long)]
        w1: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Split the move between two complete allocations into exchange cycles.
    Decompose { instance: PathBuf, from: PathBuf, to: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    agents: usize,
    /// Comma-separated category sizes.
    #[arg(long, value_delimiter = ',', default_value = "4,2")]
    sizes: Vec<usize>,
    /// tight, loose, random, or comma-separated capacities.
    #[arg(long, default_value = "tight")]
    capacity: String,
    #[arg(long, default_value_t = -9, allow_hyphen_values = true)]
    min: i64,
    #[arg(long, default_value_t = 9, allow_hyphen_values = true)]
    max: i64,
    /// Give each agent a single utility sign per category.
    #[arg(long)]
    same_sign: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixturesArgs {
    /// Fixture name; omit to list them.
    name: Option<String>,
    /// Wrap the instance together with every allocation snapshot.
    #[arg(long, conflicts_with = "snapshot")]
    snapshots: bool,
    /// Print only the named allocation snapshot.
    #[arg(long)]
    snapshot: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct LinesArgs {
    instance: PathBuf,
    /// Only list crossings of pairs split by this allocation.
    #[arg(long)]
    allocation: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
    dump: Option<Value>,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_INPUT, error: error.into(), dump: None }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::input(error)
    }
}

type Run = Result<u8, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn print(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("value serializes"));
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let inst = schema::parse_instance(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let report = inst.validate();
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::input(anyhow!("{}: {}", path.display(), list.join("; "))));
    }
    Ok(inst)
}

fn load_allocation(inst: &Instance, path: &Path, partial: bool) -> Result<Allocation, Failure> {
    let alloc = schema::parse_allocation(inst, &read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let problems = if partial { alloc.capacity_violations(inst) } else { alloc.violations(inst) };
    if !problems.is_empty() {
        let list: Vec<String> = problems.iter().map(|v| v.describe(inst)).collect();
        return Err(Failure::input(anyhow!("{}: infeasible allocation: {}", path.display(), list.join("; "))));
    }
    Ok(alloc)
}

fn oracle_error(e: oracle::OracleError) -> Failure {
    Failure::input(anyhow!(e))
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::NotTwoAgents(_) => Failure { code: EXIT_AGENTS, error: anyhow!(e), dump: None },
        SolveError::Instance(_) => Failure::input(anyhow!(e)),
        SolveError::Internal { .. } | SolveError::Matching(_) | SolveError::StalePair => {
            Failure { code: EXIT_INTERNAL, error: anyhow!(e), dump: None }
        }
    }
}

fn run_solve(args: &SolveArgs) -> Run {
    let inst = load_instance(&args.instance)?;
    if inst.num_agents() != 2 {
        return Err(solve_error(SolveError::NotTwoAgents(inst.num_agents())));
    }
    let outcome = solver::solve(&inst).map_err(|e| match e {
        SolveError::Internal { message, trace } => {
            let dump = (*trace).map(|t| {
                let padded = inst.padded().expect("valid instance pads");
                report::trace(&padded, &t)
            });
            Failure { code: EXIT_INTERNAL, error: anyhow!("internal invariant violated: {message}"), dump }
        }
        other => solve_error(other),
    })?;
    let mut result = report::solve_result(&inst, &outcome);
    if args.certify {
        let po = oracle::is_pareto_optimal(&inst, &outcome.allocation, args.budget).map_err(oracle_error)?;
        let ef1 = oracle::find_allocation(&inst, &[Requirement::Fair(Property::Ef1)], args.budget)
            .map_err(oracle_error)?;
        let mut cert = json!({ "po": po, "ef1_exists": ef1.found.is_some(), "enumerated": ef1.enumerated.to_string() });
        if ef1.found.is_none() {
            cert["note"] = json!("no EF1 allocation exists");
        }
        result["certificate"] = cert;
    }
    if let Some(path) = &args.out {
        write(path, &schema::allocation_to_json(&inst, &outcome.allocation))?;
    }
    if let Some(path) = &args.trace {
        let text = serde_json::to_string_pretty(&report::trace(&outcome.padded, &outcome.trace)).expect("serializes");
        write(path, &text)?;
    }
    print(&result);
    Ok(0)
}

fn run_check(args: &CheckArgs) -> Run {
    let inst = load_instance(&args.instance)?;
    let alloc = load_allocation(&inst, &args.allocation, args.partial)?;
    let fair = |p: Property| {
        let v = fairness::check(&inst, &alloc, p);
        print(&report::verdict(&inst, &v));
        Ok(if v.holds { 0 } else { EXIT_FAILS })
    };
    match args.property {
        CheckProperty::Ef => fair(Property::Ef),
        CheckProperty::Ef1 => fair(Property::Ef1),
        CheckProperty::Ef11 => fair(Property::Ef11),
        CheckProperty::Ef11u => fair(Property::Ef11U),
        CheckProperty::Po => po_report(&inst, &alloc, args.budget),
        CheckProperty::Feasible => {
            let problems: Vec<String> = alloc.violations(&inst).iter().map(|v| v.describe(&inst)).collect();
            print(&json!({ "property": "feasible", "holds": problems.is_empty(), "violations": problems }));
            Ok(if problems.is_empty() { 0 } else { EXIT_FAILS })
        }
        CheckProperty::EnvyGraph => {
            print(&report::graph(&inst, &fairness::envy_graph(&inst, &alloc)));
            Ok(0)
        }
        CheckProperty::TopTrading => {
            print(&report::graph(&inst, &fairness::top_trading_graph(&inst, &alloc)));
            Ok(0)
        }
    }
}

fn po_report(inst: &Instance, alloc: &Allocation, budget: u128) -> Run {
    let better = oracle::pareto_improvement(inst, alloc, budget).map_err(oracle_error)?;
    let improvement = better.as_ref().map_or(Value::Null, |b| report::allocation(inst, b));
    print(&json!({ "property": "po", "holds": better.is_none(), "improvement": improvement }));
    Ok(if better.is_none() { 0 } else { EXIT_FAILS })
}

fn run_oracle(cmd: &OracleCommand) -> Run {
    match cmd {
        OracleCommand::Find { instance, properties, budget } => {
            let inst = load_instance(instance)?;
            let search = oracle::find_allocation(&inst, properties, *budget).map_err(oracle_error)?;
            let found = search.found.as_ref().map_or(Value::Null, |a| report::allocation(&inst, a));
            let names: Vec<String> = properties.iter().map(requirement_name).collect();
            print(&json!({ "properties": names, "found": found, "enumerated": search.enumerated.to_string() }));
            Ok(if search.found.is_some() { 0 } else { EXIT_FAILS })
        }
        OracleCommand::Po { instance, allocation, budget } => {
            let inst = load_instance(instance)?;
            let alloc = load_allocation(&inst, allocation, false)?;
            po_report(&inst, &alloc, *budget)
        }
        OracleCommand::Wmax { instance, w1, budget } => {
            let inst = load_instance(instance)?;
            let w = match w1 {
                Some(text) => {
                    if inst.num_agents() != 2 {
                        return Err(Failure::input(anyhow!("--w1 needs a two-agent instance")));
                    }
                    let value = rational::parse(text).map_err(|e| anyhow!("--w1: {e}"))?;
                    WeightVector::pair(value).map_err(|e| anyhow!("--w1: {e}"))?
                }
                None => WeightVector::uniform(inst.num_agents()),
            };
            let (best, argmax) = oracle::brute_force_w_maximal(&inst, &w, *budget).map_err(oracle_error)?;
            let padded = inst.padded().map_err(|e| anyhow!(e))?;
            let (_, matched) = matching::w_maximal_allocation(&inst, &w).map_err(|e| anyhow!(e))?;
            let all: Vec<Value> = argmax.iter().map(|a| report::allocation(&inst, &a.strip_dummies(&padded))).collect();
            print(&json!({
                "weights": w.as_slice().iter().map(rational::format).collect::<Vec<_>>(),
                "maximum": rational::format(&best),
                "matching": report::allocation(&inst, &matched.strip_dummies(&padded)),
                "argmax": all,
            }));
            Ok(0)
        }
        OracleCommand::Decompose { instance, from, to } => {
            let inst = load_instance(instance)?;
            let a = load_allocation(&inst, from, false)?;
            let b = load_allocation(&inst, to, false)?;
            let padded = inst.padded().map_err(|e| anyhow!(e))?;
            let cycles = oracle::exchange_cycle_decomposition(&padded, &a.fill_dummies(&padded), &b.fill_dummies(&padded))
                .map_err(oracle_error)?;
            let list: Vec<Value> = cycles
                .iter()
                .map(|c| {
                    json!({
                        "agents": c.agents.iter().map(|&x| padded.agent_name(x)).collect::<Vec<_>>(),
                        "items": c.items.iter().map(|&i| padded.item_name(i)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            print(&json!({ "cycles": list }));
            Ok(0)
        }
    }
}

fn requirement_name(r: &Requirement) -> String {
    match r {
        Requirement::Fair(p) => p.as_str().to_string(),
        Requirement::ParetoOptimal => "po".to_string(),
    }
}

fn run_gen(args: &GenArgs) -> Run {
    let capacity = match args.capacity.as_str() {
        "tight" => CapacityPolicy::Tight,
        "loose" => CapacityPolicy::Loose,
        "random" => CapacityPolicy::Random,
        list => CapacityPolicy::Explicit(
            list.split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| anyhow!("--capacity: expected tight, loose, random, or a list of integers"))?,
        ),
    };
    let params = GenParams {
        seed: args.seed,
        agents: args.agents,
        category_sizes: args.sizes.clone(),
        capacity,
        utility_min: args.min,
        utility_max: args.max,
        same_sign: args.same_sign,
    };
    let inst = generate::generate(&params).map_err(|e| anyhow!(e))?;
    let text = schema::instance_to_json(&inst);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn run_fixtures(args: &FixturesArgs) -> Run {
    let Some(name) = &args.name else {
        for f in fixtures::all() {
            println!("{:<8} {}", f.name, f.description);
        }
        return Ok(0);
    };
    let f = fixtures::by_name(name)
        .ok_or_else(|| anyhow!("unknown fixture `{name}`; expected one of {}", fixtures::NAMES.join(", ")))?;
    if let Some(label) = &args.snapshot {
        let a = f.snapshot(label).ok_or_else(|| {
            let labels: Vec<&str> = f.snapshots.iter().map(|s| s.label).collect();
            anyhow!("fixture `{name}` has no snapshot `{label}`; available: {}", labels.join(", "))
        })?;
        println!("{}", schema::allocation_to_json(&f.instance, a));
    } else if args.snapshots {
        let snaps: serde_json::Map<String, Value> = f
            .snapshots
            .iter()
            .map(|s| (s.label.to_string(), report::allocation(&f.instance, &s.allocation)))
            .collect();
        let doc = serde_json::to_value(schema::InstanceDoc::from_instance(&f.instance)).expect("serializes");
        print(&json!({ "instance": doc, "snapshots": snaps }));
    } else {
        println!("{}", schema::instance_to_json(&f.instance));
    }
    Ok(0)
}

fn run_lines(args: &LinesArgs) -> Run {
    let inst = load_instance(&args.instance)?;
    if inst.num_agents() != 2 {
        return Err(solve_error(SolveError::NotTwoAgents(inst.num_agents())));
    }
    let alloc = match &args.allocation {
        Some(p) => Some(load_allocation(&inst, p, false)?),
        None => None,
    };
    let export = lines::export_lines(&inst, alloc.as_ref()).map_err(solve_error)?;
    match args.format {
        Format::Json => print(&serde_json::to_value(&export).expect("serializes")),
        Format::Csv => print!("{}", export.to_csv()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Check(a) => run_check(a),
        Command::Oracle(c) => run_oracle(c),
        Command::Gen(a) => run_gen(a),
        Command::Fixtures(a) => run_fixtures(a),
        Command::Lines(a) => run_lines(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            if let Some(dump) = f.dump {
                eprintln!("{}", serde_json::to_string_pretty(&dump).expect("serializes"));
            }
            ExitCode::from(f.code)
        }
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mmdelay::expand::expand;
use mmdelay::format::{flow_doc, read_instance, write_instance};
use mmdelay::intsolve::{int_gap, IntSolverConfig};
use mmdelay::model::{GraphInstance, PathFlow, SolveStatus};
use mmdelay::registry::{GenArgs, Registry};
use mmdelay::verify::{cross_check, Verdict};
use mmdelay::{Error, Rational};

#[derive(Parser)]
#[command(name = "mmdelay", version, about = "Min-max-delay flow routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Overrides the rate stored in the instance, e.g. 4/3.
    #[arg(long)]
    rate: Option<Rational>,
}

#[derive(Args)]
struct Limits {
    /// Branch-and-bound node budget.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Simple-path enumeration budget.
    #[arg(long, default_value_t = 10_000)]
    path_budget: usize,
}

impl Limits {
    fn config(&self) -> IntSolverConfig {
        IntSolverConfig {
            max_nodes: self.budget,
            max_paths: self.path_budget,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimum achievable maximum delay at the instance rate.
    Solve {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, default_value = "binary-search")]
        solver: String,
        /// Print the binary-search probes.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Maximum rate using only paths within a delay bound.
    Dcmaxflow {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        delay_bound: u64,
        #[arg(long, default_value = "expanded")]
        strategy: String,
        /// Print the expanded LP.
        #[arg(long)]
        dump_lp: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Optimum when every path carries an integer rate.
    Intsolve {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Ratio of the integer optimum to the fractional optimum.
    Gap {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Writes a generated instance.
    Gen {
        /// partition, 3partition, block, composite or random.
        kind: String,
        /// Comma-separated multiset for partition gadgets.
        #[arg(long, value_delimiter = ',')]
        values: Vec<i64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rate: Option<Rational>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        max_capacity: Option<i64>,
        #[arg(long)]
        max_delay: Option<i64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-checks solvers against the brute-force oracle.
    Verify {
        #[arg(long, conflicts_with = "dir", required_unless_present = "dir")]
        instance: Option<PathBuf>,
        /// Verifies every *.json file in a directory.
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Lists registered solvers, strategies and generators.
    List,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            Error::Infeasible(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Run = Result<(String, u8), Failure>;

fn load(input: &InstanceArgs) -> Result<GraphInstance, Failure> {
    let bytes = fs::read(&input.instance)
        .map_err(|e| usage(format!("cannot read {}: {e}", input.instance.display())))?;
    let mut instance =
        read_instance(&bytes).map_err(|e| usage(format!("{}: {e}", input.instance.display())))?;
    if let Some(rate) = &input.rate {
        if !rate.is_positive() {
            return Err(usage("--rate must be positive"));
        }
        instance = instance.with_rate(rate.clone());
    }
    instance.topology()?;
    Ok(instance)
}

fn flow_lines(out: &mut String, instance: &GraphInstance, flow: &PathFlow) -> Result<(), Failure> {
    let doc = flow_doc(instance, flow)?;
    out.push_str("flow:\n");
    for p in &doc.paths {
        let _ = writeln!(out, "  rate {}  delay {}  {}", p.rate, p.delay, p.path.join(" "));
    }
    Ok(())
}

fn flow_json(instance: &GraphInstance, flow: &PathFlow) -> Result<Value, Failure> {
    Ok(serde_json::to_value(flow_doc(instance, flow)?).expect("flow document"))
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json");
    s.push('\n');
    s
}

fn solve(registry: &Registry, input: &InstanceArgs, solver: &str, trace: bool, json: bool, limits: &Limits) -> Run {
    let solver = registry.solver(solver).ok_or_else(|| {
        let names: Vec<&str> = registry.solvers().map(|s| s.name()).collect();
        usage(format!("unknown solver {solver:?}; available: {}", names.join(", ")))
    })?;
    let instance = load(input)?;
    let report = solver.solve(&instance, &limits.config())?;
    let code = if report.status == SolveStatus::Solved { 0 } else { 1 };
    if json {
        let iterations: Vec<Value> = report
            .iterations
            .iter()
            .map(|p| json!({"delay_bound": p.delay_bound, "value": p.value, "branch": p.branch.to_string()}))
            .collect();
        let doc = json!({
            "solver": solver.name(),
            "status": if code == 0 { "solved" } else { "infeasible" },
            "rate": instance.rate,
            "max_delay": report.optimal_value,
            "max_flow": report.max_flow,
            "iterations": iterations,
            "flow": flow_json(&instance, &report.flow)?,
        });
        return Ok((pretty(&doc), code));
    }
    let mut out = String::new();
    if trace {
        out.push_str("T\tr*(T)\tbranch\n");
        for p in &report.iterations {
            let _ = writeln!(out, "{}\t{}\t{}", p.delay_bound, p.value, p.branch);
        }
    }
    match report.optimal_value {
        Some(d) => {
            let _ = writeln!(out, "max_delay: {d}");
            flow_lines(&mut out, &instance, &report.flow)?;
        }
        None => {
            out.push_str("status: infeasible\n");
            if let Some(m) = &report.max_flow {
                let _ = writeln!(out, "max_flow: {m}");
            }
        }
    }
    Ok((out, code))
}

fn dcmaxflow(
    registry: &Registry,
    input: &InstanceArgs,
    delay_bound: u64,
    strategy: &str,
    dump_lp: bool,
    json: bool,
    limits: &Limits,
) -> Run {
    let strategy = registry.dc_strategy(strategy).ok_or_else(|| {
        let names: Vec<&str> = registry.dc_strategies().map(|s| s.name()).collect();
        usage(format!("unknown strategy {strategy:?}; available: {}", names.join(", ")))
    })?;
    let instance = load(input)?;
    let result = strategy.max_flow(&instance, delay_bound, &limits.config())?;
    let mut out = String::new();
    if dump_lp {
        let problem = expand(&instance, delay_bound)?;
        let _ = write!(out, "{}", problem.lp);
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    if json {
        let doc = json!({
            "strategy": strategy.name(),
            "delay_bound": delay_bound,
            "max_flow": result.value,
            "flow": flow_json(&instance, &result.flow)?,
        });
        out.push_str(&pretty(&doc));
    } else {
        let _ = writeln!(out, "delay_bound: {delay_bound}");
        let _ = writeln!(out, "max_flow: {}", result.value);
        flow_lines(&mut out, &instance, &result.flow)?;
    }
    Ok((out, 0))
}

fn gap(input: &InstanceArgs, json: bool, limits: &Limits) -> Run {
    let instance = load(input)?;
    let g = int_gap(&instance, &limits.config())?;
    if json {
        let doc = json!({
            "fractional_max_delay": g.fractional,
            "integer_max_delay": g.integer,
            "int_gap": g.gap.to_string(),
        });
        return Ok((pretty(&doc), 0));
    }
    Ok((
        format!(
            "fractional_max_delay: {}\ninteger_max_delay: {}\nint_gap: {}\n",
            g.fractional, g.integer, g.gap
        ),
        0,
    ))
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn verify_one(path: &Path, limits: &IntSolverConfig) -> (String, bool) {
    let label = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into());
    let mut out = String::new();
    let loaded = fs::read(path)
        .map_err(Error::from)
        .and_then(|b| read_instance(&b))
        .and_then(|inst| cross_check(&inst, limits));
    match loaded {
        Ok(checks) => {
            let mut ok = true;
            for c in &checks {
                ok &= c.verdict != Verdict::Fail;
                let _ = writeln!(out, "{label}\t{}\t{}\t{}", c.name, c.verdict.label(), c.detail);
            }
            (out, ok)
        }
        Err(e) => {
            let _ = writeln!(out, "{label}\tload\tFAIL\t{e}");
            (out, false)
        }
    }
}

fn verify(instance: Option<&Path>, dir: Option<&Path>, jobs: usize, limits: &Limits) -> Run {
    let files = match (instance, dir) {
        (Some(f), _) => {
            if !f.exists() {
                return Err(usage(format!("cannot read {}: no such file", f.display())));
            }
            vec![f.to_path_buf()]
        }
        (None, Some(d)) => json_files(d)?,
        (None, None) => return Err(usage("verify needs --instance or --dir")),
    };
    let config = limits.config();
    let results: Vec<Mutex<Option<(String, bool)>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, files.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                *results[i].lock().unwrap() = Some(verify_one(path, &config));
            });
        }
    });
    let mut out = String::from("instance\tcheck\tresult\tdetail\n");
    let mut failed = 0;
    for r in results {
        let (text, ok) = r.into_inner().unwrap().expect("every file verified");
        out.push_str(&text);
        failed += usize::from(!ok);
    }
    let _ = writeln!(out, "{} of {} instances passed", files.len() - failed, files.len());
    Ok((out, if failed == 0 { 0 } else { 1 }))
}

fn run(cli: Cli) -> Run {
    let registry = Registry::builtin();
    match cli.command {
        Command::Solve { input, solver, trace, json, limits } => solve(&registry, &input, &solver, trace, json, &limits),
        Command::Dcmaxflow { input, delay_bound, strategy, dump_lp, json, limits } => {
            dcmaxflow(&registry, &input, delay_bound, &strategy, dump_lp, json, &limits)
        }
        Command::Intsolve { input, json, limits } => solve(&registry, &input, "int-bnb", false, json, &limits),
        Command::Gap { input, json, limits } => gap(&input, json, &limits),
        Command::Gen { kind, values, n, rate, seed, nodes, edges, max_capacity, max_delay, output } => {
            let generator = registry.generator(&kind).ok_or_else(|| {
                let names: Vec<&str> = registry.generators().map(|g| g.name()).collect();
                usage(format!("unknown generator {kind:?}; available: {}", names.join(", ")))
            })?;
            let args = GenArgs { values, n, rate, seed, nodes, edges, max_capacity, max_delay };
            let bytes = write_instance(&generator.generate(&args)?);
            match output {
                Some(path) => {
                    fs::write(&path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                    Ok((String::new(), 0))
                }
                None => Ok((String::from_utf8(bytes).expect("utf-8 json"), 0)),
            }
        }
        Command::Verify { instance, dir, jobs, limits } => verify(instance.as_deref(), dir.as_deref(), jobs, &limits),
        Command::List => {
            let mut out = String::from("solvers:\n");
            for s in registry.solvers() {
                let _ = writeln!(out, "  {:<16}{}", s.name(), s.description());
            }
            out.push_str("dcmaxflow strategies:\n");
            for s in registry.dc_strategies() {
                let _ = writeln!(out, "  {:<16}{}", s.name(), s.description());
            }
            out.push_str("generators:\n");
            for g in registry.generators() {
                let _ = writeln!(out, "  {:<16}{}", g.name(), g.description());
            }
            Ok((out, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}


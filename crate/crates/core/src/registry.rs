//! Named strategies: min-max solvers, delay-constrained max-flow methods and
//! instance generators, each behind a trait and looked up by name at runtime.

use std::time::Instant;

use crate::dcflow::dc_max_flow;
use crate::error::{Error, Result};
use crate::gadgets::{
    building_block, gap_composite, partition_gadget, random_instance, three_partition_gadget, RandomParams,
};
use crate::intsolve::{int_min_max_delay, IntSolverConfig};
use crate::minmax::{min_max_delay, trim_to_rate};
use crate::model::{GraphInstance, PathFlow, SolveReport, SolveStatus};
use crate::oracle::{oracle_dc_path_flow, oracle_int_min_max_delay, oracle_min_max_delay};
use crate::rational::Rational;

pub trait MinMaxSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Whether returned flows carry integer rates only.
    fn integral(&self) -> bool;
    fn solve(&self, instance: &GraphInstance, limits: &IntSolverConfig) -> Result<SolveReport>;
}

#[derive(Debug, Clone)]
pub struct DcOutcome {
    pub value: Rational,
    pub flow: PathFlow,
}

pub trait DcMaxFlowStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn max_flow(&self, instance: &GraphInstance, delay_bound: u64, limits: &IntSolverConfig) -> Result<DcOutcome>;
}

/// Loose parameter bag for generators; each generator reads what it needs.
#[derive(Debug, Clone, Default)]
pub struct GenArgs {
    pub values: Vec<i64>,
    pub n: Option<usize>,
    pub rate: Option<Rational>,
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub max_capacity: Option<i64>,
    pub max_delay: Option<i64>,
}

pub trait Generator: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance>;
}

struct BinarySearch;
struct ThresholdScan;
struct IntBranchAndBound;
struct IntExhaustive;

fn report(optimal_value: Option<i64>, flow: PathFlow, started: Instant) -> SolveReport {
    SolveReport {
        status: if optimal_value.is_some() { SolveStatus::Solved } else { SolveStatus::Infeasible },
        optimal_value,
        flow,
        iterations: Vec::new(),
        max_flow: None,
        elapsed: started.elapsed(),
    }
}

impl MinMaxSolver for BinarySearch {
    fn name(&self) -> &'static str {
        "binary-search"
    }
    fn description(&self) -> &'static str {
        "binary search on the delay bound over the expanded LP"
    }
    fn integral(&self) -> bool {
        false
    }
    fn solve(&self, instance: &GraphInstance, _: &IntSolverConfig) -> Result<SolveReport> {
        min_max_delay(instance)
    }
}

impl MinMaxSolver for ThresholdScan {
    fn name(&self) -> &'static str {
        "threshold-scan"
    }
    fn description(&self) -> &'static str {
        "path LP at each distinct path delay in increasing order"
    }
    fn integral(&self) -> bool {
        false
    }
    fn solve(&self, instance: &GraphInstance, limits: &IntSolverConfig) -> Result<SolveReport> {
        let started = Instant::now();
        Ok(match oracle_min_max_delay(instance, limits.max_paths)? {
            Some(sol) => {
                let flow = trim_to_rate(instance, &sol.flow, &instance.rate)?;
                report(Some(sol.optimal_value), flow, started)
            }
            None => report(None, PathFlow::new(), started),
        })
    }
}

impl MinMaxSolver for IntBranchAndBound {
    fn name(&self) -> &'static str {
        "int-bnb"
    }
    fn description(&self) -> &'static str {
        "integer rates; branch-and-bound on the path LP"
    }
    fn integral(&self) -> bool {
        true
    }
    fn solve(&self, instance: &GraphInstance, limits: &IntSolverConfig) -> Result<SolveReport> {
        let started = Instant::now();
        let r = int_min_max_delay(instance, limits)?;
        Ok(report(r.optimal_value, r.flow, started))
    }
}

impl MinMaxSolver for IntExhaustive {
    fn name(&self) -> &'static str {
        "int-exhaustive"
    }
    fn description(&self) -> &'static str {
        "integer rates; exhaustive assignment search (tiny instances)"
    }
    fn integral(&self) -> bool {
        true
    }
    fn solve(&self, instance: &GraphInstance, _: &IntSolverConfig) -> Result<SolveReport> {
        let started = Instant::now();
        Ok(match oracle_int_min_max_delay(instance)? {
            Some(sol) => report(Some(sol.optimal_value), sol.flow, started),
            None => report(None, PathFlow::new(), started),
        })
    }
}

struct Expanded;
struct PathLp;

impl DcMaxFlowStrategy for Expanded {
    fn name(&self) -> &'static str {
        "expanded"
    }
    fn description(&self) -> &'static str {
        "edge LP over (edge, delay level) variables"
    }
    fn max_flow(&self, instance: &GraphInstance, delay_bound: u64, _: &IntSolverConfig) -> Result<DcOutcome> {
        let r = dc_max_flow(instance, delay_bound)?;
        Ok(DcOutcome {
            value: r.value,
            flow: r.path_flow,
        })
    }
}

impl DcMaxFlowStrategy for PathLp {
    fn name(&self) -> &'static str {
        "path-lp"
    }
    fn description(&self) -> &'static str {
        "LP over enumerated paths within the delay bound"
    }
    fn max_flow(&self, instance: &GraphInstance, delay_bound: u64, limits: &IntSolverConfig) -> Result<DcOutcome> {
        let (value, flow) = oracle_dc_path_flow(instance, delay_bound, limits.max_paths)?;
        Ok(DcOutcome { value, flow })
    }
}

fn need<T: Clone>(value: &Option<T>, generator: &str, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::Generator(format!("{generator} requires --{flag}")))
}

struct Partition;
struct ThreePartition;
struct Block;
struct Composite;
struct Random;

impl Generator for Partition {
    fn name(&self) -> &'static str {
        "partition"
    }
    fn description(&self) -> &'static str {
        "chain with bypasses encoding PARTITION (--values), rate 2"
    }
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance> {
        Ok(partition_gadget(&args.values)?.0)
    }
}

impl Generator for ThreePartition {
    fn name(&self) -> &'static str {
        "3partition"
    }
    fn description(&self) -> &'static str {
        "chain with bypasses encoding 3-PARTITION (--values), rate k"
    }
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance> {
        Ok(three_partition_gadget(&args.values)?.0)
    }
}

impl Generator for Block {
    fn name(&self) -> &'static str {
        "block"
    }
    fn description(&self) -> &'static str {
        "building block of n nodes (--n, --rate, default rate 2)"
    }
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance> {
        let rate = args.rate.clone().unwrap_or_else(|| Rational::from_integer(2));
        building_block(need(&args.n, "block", "n")?, rate)
    }
}

impl Generator for Composite {
    fn name(&self) -> &'static str {
        "composite"
    }
    fn description(&self) -> &'static str {
        "n-2 building blocks in parallel (--n), rate n-1"
    }
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance> {
        let inst = gap_composite(need(&args.n, "composite", "n")?)?;
        Ok(match &args.rate {
            Some(r) => inst.with_rate(r.clone()),
            None => inst,
        })
    }
}

impl Generator for Random {
    fn name(&self) -> &'static str {
        "random"
    }
    fn description(&self) -> &'static str {
        "seeded random instance (--seed --nodes --edges --max-capacity --max-delay --rate)"
    }
    fn generate(&self, args: &GenArgs) -> Result<GraphInstance> {
        random_instance(&RandomParams {
            seed: args.seed.unwrap_or(1),
            nodes: args.nodes.unwrap_or(6),
            edges: args.edges.unwrap_or(10),
            max_capacity: args.max_capacity.unwrap_or(3),
            max_delay: args.max_delay.unwrap_or(5),
            rate: args.rate.clone().unwrap_or_else(Rational::one),
        })
    }
}

pub struct Registry {
    solvers: Vec<Box<dyn MinMaxSolver>>,
    dc_strategies: Vec<Box<dyn DcMaxFlowStrategy>>,
    generators: Vec<Box<dyn Generator>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            solvers: Vec::new(),
            dc_strategies: Vec::new(),
            generators: Vec::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register_solver(Box::new(BinarySearch));
        r.register_solver(Box::new(ThresholdScan));
        r.register_solver(Box::new(IntBranchAndBound));
        r.register_solver(Box::new(IntExhaustive));
        r.register_dc_strategy(Box::new(Expanded));
        r.register_dc_strategy(Box::new(PathLp));
        r.register_generator(Box::new(Partition));
        r.register_generator(Box::new(ThreePartition));
        r.register_generator(Box::new(Block));
        r.register_generator(Box::new(Composite));
        r.register_generator(Box::new(Random));
        r
    }

    /// Replaces any solver registered under the same name.
    pub fn register_solver(&mut self, solver: Box<dyn MinMaxSolver>) {
        self.solvers.retain(|s| s.name() != solver.name());
        self.solvers.push(solver);
    }

    pub fn register_dc_strategy(&mut self, strategy: Box<dyn DcMaxFlowStrategy>) {
        self.dc_strategies.retain(|s| s.name() != strategy.name());
        self.dc_strategies.push(strategy);
    }

    pub fn register_generator(&mut self, generator: Box<dyn Generator>) {
        self.generators.retain(|g| g.name() != generator.name());
        self.generators.push(generator);
    }

    pub fn solver(&self, name: &str) -> Option<&dyn MinMaxSolver> {
        self.solvers.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn dc_strategy(&self, name: &str) -> Option<&dyn DcMaxFlowStrategy> {
        self.dc_strategies.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn generator(&self, name: &str) -> Option<&dyn Generator> {
        self.generators.iter().find(|g| g.name() == name).map(|g| g.as_ref())
    }

    pub fn solvers(&self) -> impl Iterator<Item = &dyn MinMaxSolver> {
        self.solvers.iter().map(|s| s.as_ref())
    }

    pub fn dc_strategies(&self) -> impl Iterator<Item = &dyn DcMaxFlowStrategy> {
        self.dc_strategies.iter().map(|s| s.as_ref())
    }

    pub fn generators(&self) -> impl Iterator<Item = &dyn Generator> {
        self.generators.iter().map(|g| g.as_ref())
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

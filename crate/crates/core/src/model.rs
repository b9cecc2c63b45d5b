//! Graph instances, path flows and the checks shared by every solver.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A directed edge with an integer capacity and an integer delay.
///
/// Capacity and delay are signed so that a malformed instance can still be
/// represented and reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: i64,
    pub delay: i64,
}

impl Edge {
    pub fn new(id: impl Into<String>, tail: impl Into<String>, head: impl Into<String>, capacity: i64, delay: i64) -> Self {
        Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            capacity,
            delay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub source: String,
    pub sink: String,
    pub rate: Rational,
}

impl GraphInstance {
    /// Largest edge delay, zero for an edgeless graph.
    pub fn max_edge_delay(&self) -> i64 {
        self.edges.iter().map(|e| e.delay).max().unwrap_or(0).max(0)
    }

    /// `|E| * d_max`, an upper bound on the delay of any simple path.
    pub fn delay_horizon(&self) -> u64 {
        self.edges.len() as u64 * self.max_edge_delay() as u64
    }

    pub fn with_rate(mut self, rate: Rational) -> Self {
        self.rate = rate;
        self
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Validates the instance and builds the index structure used by the solvers.
    pub fn topology(&self) -> Result<Topology> {
        let violations = validate(self);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        Ok(Topology::build(self))
    }
}

/// Integer-indexed view of a validated instance.
#[derive(Debug, Clone)]
pub struct Topology {
    pub node_count: usize,
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
    pub capacity: Vec<i64>,
    pub delay: Vec<i64>,
    pub out_edges: Vec<Vec<usize>>,
    pub in_edges: Vec<Vec<usize>>,
    pub source: usize,
    pub sink: usize,
}

impl Topology {
    fn build(instance: &GraphInstance) -> Self {
        let index: HashMap<&str, usize> = instance
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let n = instance.nodes.len();
        let mut topo = Topology {
            node_count: n,
            tail: Vec::with_capacity(instance.edges.len()),
            head: Vec::with_capacity(instance.edges.len()),
            capacity: Vec::with_capacity(instance.edges.len()),
            delay: Vec::with_capacity(instance.edges.len()),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
            source: index[instance.source.as_str()],
            sink: index[instance.sink.as_str()],
        };
        for (i, e) in instance.edges.iter().enumerate() {
            let (u, v) = (index[e.tail.as_str()], index[e.head.as_str()]);
            topo.tail.push(u);
            topo.head.push(v);
            topo.capacity.push(e.capacity);
            topo.delay.push(e.delay);
            topo.out_edges[u].push(i);
            topo.in_edges[v].push(i);
        }
        topo
    }

    pub fn edge_count(&self) -> usize {
        self.tail.len()
    }
}

/// A single reason an instance is invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode(String),
    DuplicateEdge(String),
    UnknownEndpoint { edge: String, node: String },
    SelfLoop(String),
    NegativeCapacity(String),
    NegativeDelay(String),
    UnknownSource(String),
    UnknownSink(String),
    SourceEqualsSink,
    NonPositiveRate(Rational),
    ZeroDelayCycle(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(n) => write!(f, "duplicate node {n:?}"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge id {e:?}"),
            Violation::UnknownEndpoint { edge, node } => {
                write!(f, "edge {edge:?} references undeclared node {node:?}")
            }
            Violation::SelfLoop(e) => write!(f, "self-loop on edge {e:?}"),
            Violation::NegativeCapacity(e) => write!(f, "negative capacity on edge {e:?}"),
            Violation::NegativeDelay(e) => write!(f, "negative delay on edge {e:?}"),
            Violation::UnknownSource(n) => write!(f, "source {n:?} is not a declared node"),
            Violation::UnknownSink(n) => write!(f, "sink {n:?} is not a declared node"),
            Violation::SourceEqualsSink => write!(f, "source equals sink"),
            Violation::NonPositiveRate(r) => write!(f, "rate must be positive, got {r}"),
            Violation::ZeroDelayCycle(edges) => {
                write!(f, "zero-delay cycle through edges [{}]", edges.join(", "))
            }
        }
    }
}

/// Returns every invariant violation of `instance`; empty means valid.
pub fn validate(instance: &GraphInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut nodes = HashSet::new();
    for n in &instance.nodes {
        if !nodes.insert(n.as_str()) {
            out.push(Violation::DuplicateNode(n.clone()));
        }
    }
    let mut edge_ids = HashSet::new();
    for e in &instance.edges {
        if !edge_ids.insert(e.id.as_str()) {
            out.push(Violation::DuplicateEdge(e.id.clone()));
        }
        for end in [&e.tail, &e.head] {
            if !nodes.contains(end.as_str()) {
                out.push(Violation::UnknownEndpoint {
                    edge: e.id.clone(),
                    node: end.clone(),
                });
            }
        }
        if e.tail == e.head {
            out.push(Violation::SelfLoop(e.id.clone()));
        }
        if e.capacity < 0 {
            out.push(Violation::NegativeCapacity(e.id.clone()));
        }
        if e.delay < 0 {
            out.push(Violation::NegativeDelay(e.id.clone()));
        }
    }
    if !nodes.contains(instance.source.as_str()) {
        out.push(Violation::UnknownSource(instance.source.clone()));
    }
    if !nodes.contains(instance.sink.as_str()) {
        out.push(Violation::UnknownSink(instance.sink.clone()));
    }
    if instance.source == instance.sink {
        out.push(Violation::SourceEqualsSink);
    }
    if !instance.rate.is_positive() {
        out.push(Violation::NonPositiveRate(instance.rate.clone()));
    }
    if let Some(cycle) = zero_delay_cycle(instance) {
        out.push(Violation::ZeroDelayCycle(cycle));
    }
    out
}

/// Finds a directed cycle made only of zero-delay edges, if one exists.
fn zero_delay_cycle(instance: &GraphInstance) -> Option<Vec<String>> {
    let mut adjacency: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in instance.edges.iter().enumerate() {
        if e.delay == 0 && e.tail != e.head {
            adjacency.entry(e.tail.as_str()).or_default().push(i);
        }
    }
    // 1 = on the DFS stack, 2 = finished.
    let mut state: HashMap<&str, u8> = HashMap::new();
    let roots: Vec<&str> = adjacency.keys().copied().collect();
    for root in roots {
        if state.contains_key(root) {
            continue;
        }
        // Stack of (node, next adjacency position, edge used to enter).
        let mut stack: Vec<(&str, usize, Option<usize>)> = vec![(root, 0, None)];
        state.insert(root, 1);
        while let Some(top) = stack.last_mut() {
            let (node, pos) = (top.0, top.1);
            let next = adjacency.get(node).and_then(|adj| adj.get(pos)).copied();
            match next {
                Some(edge) => {
                    top.1 += 1;
                    let head = instance.edges[edge].head.as_str();
                    match state.get(head) {
                        Some(1) => {
                            let start = stack.iter().position(|f| f.0 == head).unwrap();
                            let mut cycle: Vec<String> = stack[start + 1..]
                                .iter()
                                .filter_map(|f| f.2)
                                .map(|i| instance.edges[i].id.clone())
                                .collect();
                            cycle.push(instance.edges[edge].id.clone());
                            return Some(cycle);
                        }
                        Some(_) => {}
                        None => {
                            state.insert(head, 1);
                            stack.push((head, 0, Some(edge)));
                        }
                    }
                }
                None => {
                    state.insert(node, 2);
                    stack.pop();
                }
            }
        }
    }
    None
}

/// One flow-carrying path: an edge-index sequence from source to sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath {
    pub edges: Vec<usize>,
    pub rate: Rational,
}

/// A path-based flow. Zero-rate entries are never stored and identical paths
/// are merged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathFlow {
    entries: Vec<FlowPath>,
}

impl PathFlow {
    pub fn new() -> Self {
        PathFlow::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Self {
        let mut flow = PathFlow::new();
        for (edges, rate) in entries {
            flow.add(edges, rate);
        }
        flow
    }

    /// Adds `rate` on `edges`, merging with an existing identical path.
    pub fn add(&mut self, edges: Vec<usize>, rate: Rational) {
        if rate.is_zero() {
            return;
        }
        match self.entries.iter_mut().find(|p| p.edges == edges) {
            Some(existing) => {
                existing.rate += &rate;
                if existing.rate.is_zero() {
                    self.entries.retain(|p| !p.rate.is_zero());
                }
            }
            None => self.entries.push(FlowPath { edges, rate }),
        }
    }

    pub fn entries(&self) -> &[FlowPath] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_rate(&self) -> Rational {
        self.entries.iter().map(|p| &p.rate).sum()
    }

    /// Orders entries by path delay, then by edge-id sequence.
    pub fn sort_for(&mut self, instance: &GraphInstance) {
        self.entries.sort_by_cached_key(|p| {
            let delay: i64 = p.edges.iter().map(|&e| instance.edges[e].delay).sum();
            let ids: Vec<String> = p.edges.iter().map(|&e| instance.edges[e].id.clone()).collect();
            (delay, ids)
        });
    }
}

/// Sum of edge delays along `path`, after checking that it is a simple
/// source-to-sink path of `instance`.
pub fn path_delay(instance: &GraphInstance, path: &[usize]) -> Result<i64> {
    check_path(instance, path)?;
    Ok(path.iter().map(|&e| instance.edges[e].delay).sum())
}

fn check_path(instance: &GraphInstance, path: &[usize]) -> Result<()> {
    let bad = |msg: String| Err(Error::MalformedPath(msg));
    if path.is_empty() {
        return bad("empty path".into());
    }
    if let Some(&e) = path.iter().find(|&&e| e >= instance.edges.len()) {
        return bad(format!("edge index {e} out of range"));
    }
    let first = &instance.edges[path[0]];
    if first.tail != instance.source {
        return bad(format!("path starts at {:?}, not the source", first.tail));
    }
    let mut seen: HashSet<&str> = HashSet::from([first.tail.as_str()]);
    for pair in path.windows(2) {
        let (a, b) = (&instance.edges[pair[0]], &instance.edges[pair[1]]);
        if a.head != b.tail {
            return bad(format!("edge {:?} does not continue from {:?}", b.id, a.id));
        }
    }
    for &e in path {
        let head = instance.edges[e].head.as_str();
        if !seen.insert(head) {
            return bad(format!("node {head:?} visited twice"));
        }
    }
    let last = &instance.edges[*path.last().unwrap()];
    if last.head != instance.sink {
        return bad(format!("path ends at {:?}, not the sink", last.head));
    }
    Ok(())
}

/// Largest delay over the flow-carrying paths of `flow`.
pub fn max_delay(instance: &GraphInstance, flow: &PathFlow) -> Result<i64> {
    let mut best = None;
    for p in flow.entries() {
        let d = path_delay(instance, &p.edges)?;
        best = Some(best.map_or(d, |b: i64| b.max(d)));
    }
    best.ok_or(Error::EmptyFlow)
}

/// Per-edge totals `f_e`, keyed by edge index. Edges carrying no flow are absent.
pub fn aggregate_edge_flow(flow: &PathFlow) -> BTreeMap<usize, Rational> {
    let mut totals: BTreeMap<usize, Rational> = BTreeMap::new();
    for p in flow.entries() {
        for &e in &p.edges {
            *totals.entry(e).or_default() += &p.rate;
        }
    }
    totals
}

/// `sum_p f^p d^p`.
pub fn path_total_delay(instance: &GraphInstance, flow: &PathFlow) -> Rational {
    flow.entries()
        .iter()
        .map(|p| {
            let d: i64 = p.edges.iter().map(|&e| instance.edges[e].delay).sum();
            &p.rate * Rational::from_integer(d)
        })
        .sum()
}

/// `sum_e f_e d_e`.
pub fn edge_total_delay(instance: &GraphInstance, flow: &PathFlow) -> Rational {
    aggregate_edge_flow(flow)
        .into_iter()
        .map(|(e, f)| f * Rational::from_integer(instance.edges[e].delay))
        .sum()
}

/// Checks that `flow` is a feasible solution at rate `rate`: simple
/// source-to-sink paths, positive rates, total exactly `rate`, capacities
/// respected. Returns a description of every problem found.
pub fn check_flow(instance: &GraphInstance, flow: &PathFlow, rate: &Rational) -> Vec<String> {
    let mut problems = Vec::new();
    for p in flow.entries() {
        if let Err(e) = check_path(instance, &p.edges) {
            problems.push(e.to_string());
        }
        if !p.rate.is_positive() {
            problems.push(format!("non-positive path rate {}", p.rate));
        }
    }
    let total = flow.total_rate();
    if &total != rate {
        problems.push(format!("total rate {total} differs from required {rate}"));
    }
    for (e, f) in aggregate_edge_flow(flow) {
        let edge = &instance.edges[e];
        if f > Rational::from_integer(edge.capacity) {
            problems.push(format!("edge {:?} carries {f} over capacity {}", edge.id, edge.capacity));
        }
    }
    problems
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    Infeasible,
}

/// Which way the binary search moved after a probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `r*(T) >= R`: the upper bound drops to `T`.
    Upper,
    /// `r*(T) < R`: the lower bound rises to `T + 1`.
    Lower,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub delay_bound: u64,
    pub value: Rational,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// The optimal maximum delay when solved.
    pub optimal_value: Option<i64>,
    pub flow: PathFlow,
    pub iterations: Vec<Probe>,
    /// Maximum rate deliverable with no delay bound, when the solver computes it.
    pub max_flow: Option<Rational>,
    pub elapsed: Duration,
}

impl SolveReport {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

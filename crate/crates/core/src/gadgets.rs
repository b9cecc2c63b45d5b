//! Instance generators: the partition and 3-partition reduction graphs, the
//! two-lane building block and its integrality-gap composite, and seeded
//! random instances.
//!
//! Edge ids follow a fixed scheme so tests can name flows directly:
//! `dash_i` carries delay, `bypass_in_i`/`bypass_out_i` route around it,
//! `solid_i` is the zero-delay lane of the building block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{validate, Edge, GraphInstance, Violation};
use crate::rational::Rational;

fn generator_error(msg: impl Into<String>) -> Error {
    Error::Generator(msg.into())
}

/// Chain `w_0 .. w_n` where stage `i` offers a direct edge of delay `a_i` and
/// a zero-delay detour through `v_i` of capacity `bypass_capacity`.
fn chain_with_bypass(values: &[i64], bypass_capacity: i64, rate: Rational) -> GraphInstance {
    let n = values.len();
    let mut nodes: Vec<String> = (0..=n).map(|i| format!("w{i}")).collect();
    nodes.extend((1..=n).map(|i| format!("v{i}")));
    let mut edges = Vec::with_capacity(3 * n);
    for (k, &a) in values.iter().enumerate() {
        let i = k + 1;
        edges.push(Edge::new(format!("dash_{i}"), format!("w{k}"), format!("w{i}"), 1, a));
        edges.push(Edge::new(format!("bypass_in_{i}"), format!("w{k}"), format!("v{i}"), bypass_capacity, 0));
        edges.push(Edge::new(format!("bypass_out_{i}"), format!("v{i}"), format!("w{i}"), bypass_capacity, 0));
    }
    GraphInstance {
        nodes,
        edges,
        source: "w0".into(),
        sink: format!("w{n}"),
        rate,
    }
}

/// Partition reduction graph: `2n + 1` nodes, `3n` unit-capacity edges,
/// rate 2. Returns the threshold `b = sum(A) / 2`, which is fractional when
/// the sum is odd.
pub fn partition_gadget(values: &[i64]) -> Result<(GraphInstance, Rational)> {
    if values.is_empty() {
        return Err(generator_error("partition input must be non-empty"));
    }
    if let Some(a) = values.iter().find(|&&a| a <= 0) {
        return Err(generator_error(format!("partition values must be positive, got {a}")));
    }
    let total: i64 = values.iter().sum();
    Ok((
        chain_with_bypass(values, 1, Rational::from_integer(2)),
        Rational::new(total, 2),
    ))
}

/// 3-partition reduction graph for `|A| = 3k` elements with rate `k`.
///
/// Same chain as [`partition_gadget`], with the zero-delay detour at every
/// stage widened to capacity `k - 1`, so each stage can carry the whole rate
/// and exactly one unit crosses each delay edge when all stages are full.
pub fn three_partition_gadget(values: &[i64]) -> Result<(GraphInstance, i64)> {
    if values.is_empty() || !values.len().is_multiple_of(3) {
        return Err(generator_error(format!(
            "3-partition needs a positive multiple of 3 elements, got {}",
            values.len()
        )));
    }
    let k = (values.len() / 3) as i64;
    let total: i64 = values.iter().sum();
    if total % k != 0 {
        return Err(generator_error(format!("sum {total} is not divisible by k = {k}")));
    }
    let b = total / k;
    let mut failures = Vec::new();
    for &a in values {
        if a <= 0 {
            failures.push(format!("{a} is not positive"));
        } else if 4 * a <= b {
            failures.push(format!("{a} violates b/4 < a_i (b = {b})"));
        } else if 2 * a >= b {
            failures.push(format!("{a} violates a_i < b/2 (b = {b})"));
        }
    }
    if !failures.is_empty() {
        return Err(generator_error(failures.join("; ")));
    }
    Ok((chain_with_bypass(values, k - 1, Rational::from_integer(k)), b))
}

fn block_into(prefix: &str, n: usize, nodes: &mut Vec<String>, edges: &mut Vec<Edge>) {
    for i in 1..=n {
        nodes.push(format!("{prefix}a{i}"));
    }
    for i in 1..n {
        let (u, v) = (format!("{prefix}a{i}"), format!("{prefix}a{}", i + 1));
        edges.push(Edge::new(format!("{prefix}dash_{i}"), u.clone(), v.clone(), 1, 1));
        edges.push(Edge::new(format!("{prefix}solid_{i}"), u, v, 1, 0));
    }
}

/// Nodes `a1 .. an`; between consecutive nodes a unit-delay edge `dash_i` and
/// a zero-delay edge `solid_i`, both of unit capacity. Source `a1`, sink `an`.
pub fn building_block(n: usize, rate: Rational) -> Result<GraphInstance> {
    if n < 3 {
        return Err(generator_error(format!("building block needs n >= 3, got {n}")));
    }
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    block_into("", n, &mut nodes, &mut edges);
    Ok(GraphInstance {
        nodes,
        edges,
        source: "a1".into(),
        sink: format!("a{n}"),
        rate,
    })
}

/// `n - 2` disjoint building blocks wired in parallel between `s` and `t`
/// through capacity-2, zero-delay connectors `in_j` and `out_j`; rate `n - 1`.
pub fn gap_composite(n: usize) -> Result<GraphInstance> {
    if n < 3 {
        return Err(generator_error(format!("composite needs n >= 3, got {n}")));
    }
    let mut nodes = vec!["s".to_string()];
    let mut edges = Vec::new();
    for j in 1..=n - 2 {
        let prefix = format!("b{j}_");
        block_into(&prefix, n, &mut nodes, &mut edges);
        edges.push(Edge::new(format!("in_{j}"), "s", format!("{prefix}a1"), 2, 0));
        edges.push(Edge::new(format!("out_{j}"), format!("{prefix}a{n}"), "t", 2, 0));
    }
    nodes.push("t".into());
    Ok(GraphInstance {
        nodes,
        edges,
        source: "s".into(),
        sink: "t".into(),
        rate: Rational::from_integer(n as i64 - 1),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    /// Capacities are drawn from `1..=max_capacity`.
    pub max_capacity: i64,
    /// Delays are drawn from `0..=max_delay`.
    pub max_delay: i64,
    pub rate: Rational,
}

const RANDOM_ATTEMPTS: usize = 200;

/// Seeded random instance on nodes `n0 .. n{k-1}` with source `n0` and sink
/// `n{k-1}`. The sink is always reachable and zero-delay edges never close a
/// cycle.
pub fn random_instance(params: &RandomParams) -> Result<GraphInstance> {
    if params.nodes < 2 || params.edges == 0 || params.max_capacity < 1 || params.max_delay < 0 {
        return Err(generator_error(format!("invalid random parameters {params:?}")));
    }
    if !params.rate.is_positive() {
        return Err(generator_error("rate must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let names: Vec<String> = (0..params.nodes).map(|i| format!("n{i}")).collect();
    for _ in 0..RANDOM_ATTEMPTS {
        let mut instance = GraphInstance {
            nodes: names.clone(),
            edges: Vec::with_capacity(params.edges),
            source: names[0].clone(),
            sink: names[params.nodes - 1].clone(),
            rate: params.rate.clone(),
        };
        for id in 0..params.edges {
            let tail = rng.gen_range(0..params.nodes);
            let mut head = rng.gen_range(0..params.nodes - 1);
            if head >= tail {
                head += 1;
            }
            instance.edges.push(Edge::new(
                format!("e{id}"),
                names[tail].clone(),
                names[head].clone(),
                rng.gen_range(1..=params.max_capacity),
                rng.gen_range(0..=params.max_delay),
            ));
        }
        // Redraw delays on zero-delay cycles, then fall back to reversing a
        // cycle edge that points to a lower-numbered node.
        let mut guard = 0;
        while let Some(cycle) = validate(&instance).into_iter().find_map(|v| match v {
            Violation::ZeroDelayCycle(edges) => Some(edges),
            _ => None,
        }) {
            guard += 1;
            if guard <= 10 * params.edges && params.max_delay > 0 {
                let pick = &cycle[rng.gen_range(0..cycle.len())];
                let edge = instance.edges.iter_mut().find(|e| &e.id == pick).unwrap();
                edge.delay = rng.gen_range(1..=params.max_delay);
                continue;
            }
            let index = |name: &str| names.iter().position(|n| n == name).unwrap();
            let edge = instance
                .edges
                .iter_mut()
                .find(|e| cycle.contains(&e.id) && index(&e.tail) > index(&e.head))
                .unwrap();
            std::mem::swap(&mut edge.tail, &mut edge.head);
        }
        if validate(&instance).is_empty() && sink_reachable(&instance) {
            return Ok(instance);
        }
    }
    Err(generator_error(format!(
        "no connected instance after {RANDOM_ATTEMPTS} attempts for {params:?}"
    )))
}

fn sink_reachable(instance: &GraphInstance) -> bool {
    let mut reached = vec![instance.source.as_str()];
    let mut frontier = reached.clone();
    while let Some(u) = frontier.pop() {
        for e in instance.edges.iter().filter(|e| e.tail == u) {
            if !reached.contains(&e.head.as_str()) {
                reached.push(e.head.as_str());
                frontier.push(e.head.as_str());
            }
        }
    }
    reached.contains(&instance.sink.as_str())
}

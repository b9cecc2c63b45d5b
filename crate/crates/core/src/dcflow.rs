//! Delay-constrained maximum flow `r*(T)` and path decomposition of the
//! expanded solution.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::expand::{expand, extract_edge_flow, ExpandedProblem, Level};
use crate::lp::{solve_lp, LpStatus};
use crate::model::{GraphInstance, PathFlow};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct DcMaxFlowResult {
    pub delay_bound: u64,
    /// `r*(T)`.
    pub value: Rational,
    pub edge_level_flow: BTreeMap<Level, Rational>,
    /// Every path has delay at most `delay_bound`; rates sum to `value`.
    pub path_flow: PathFlow,
    /// Positive-delay cycles cut out of traced walks during decomposition.
    pub cycles_removed: usize,
    pub lp_pivots: usize,
}

pub fn dc_max_flow(instance: &GraphInstance, delay_bound: u64) -> Result<DcMaxFlowResult> {
    let problem = expand(instance, delay_bound)?;
    let solution = solve_lp(&problem.lp);
    // The zero flow is feasible and capacities bound the objective.
    assert_eq!(solution.status, LpStatus::Optimal, "expanded LP must have an optimum");
    let edge_level_flow = extract_edge_flow(&problem, &solution);
    let decomposition = decompose(&problem, &edge_level_flow)?;
    Ok(DcMaxFlowResult {
        delay_bound,
        value: solution.objective_value,
        edge_level_flow,
        path_flow: decomposition.flow,
        cycles_removed: decomposition.cycles_removed,
        lp_pivots: solution.pivots,
    })
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub flow: PathFlow,
    pub cycles_removed: usize,
}

/// Splits a feasible expanded flow into source-to-sink paths.
///
/// Walks are traced over (node, level) states, always following the
/// positive-residual arc with the largest residual (lowest edge index on
/// ties). A traced walk that revisits a node crosses a cycle of positive
/// delay; the cycle is cut out, which keeps the walk's rate and lowers both
/// its delay and its edge usage.
pub fn decompose(problem: &ExpandedProblem, edge_level_flow: &BTreeMap<Level, Rational>) -> Result<Decomposition> {
    let topo = &problem.topology;
    let bad = |msg: String| Err(Error::InfeasibleExpandedFlow(msg));

    let mut residual: HashMap<Level, Rational> = HashMap::new();
    let mut divergence: BTreeMap<(usize, u64), Rational> = BTreeMap::new();
    let mut per_edge: BTreeMap<usize, Rational> = BTreeMap::new();
    let (mut leaving_source, mut entering_sink) = (Rational::zero(), Rational::zero());
    for (&(e, d), value) in edge_level_flow {
        if value.is_negative() {
            return bad(format!("negative value on edge {e} at level {d}"));
        }
        if value.is_zero() {
            continue;
        }
        if !problem.variables.contains_key(&(e, d)) {
            return bad(format!("flow on edge {e} at level {d}, which the expansion excludes"));
        }
        let (u, w) = (topo.tail[e], topo.head[e]);
        let entered = d - topo.delay[e] as u64;
        if u == topo.source {
            leaving_source += value;
        } else {
            *divergence.entry((u, entered)).or_default() -= value;
        }
        if w == topo.sink {
            entering_sink += value;
        } else {
            *divergence.entry((w, d)).or_default() += value;
        }
        *per_edge.entry(e).or_default() += value;
        residual.insert((e, d), value.clone());
    }
    if let Some(((v, d), div)) = divergence.iter().find(|(_, div)| !div.is_zero()) {
        return bad(format!("node {v} at level {d} has divergence {div}"));
    }
    if leaving_source != entering_sink {
        return bad(format!("source sends {leaving_source} but sink receives {entering_sink}"));
    }
    for (e, total) in &per_edge {
        if *total > Rational::from_integer(topo.capacity[*e]) {
            return bad(format!("edge {e} carries {total} over its capacity"));
        }
    }

    let next_arc = |residual: &HashMap<Level, Rational>, node: usize, level: u64| -> Option<Level> {
        let mut best: Option<(Level, &Rational)> = None;
        for &e in &topo.out_edges[node] {
            let key = (e, level + topo.delay[e] as u64);
            if let Some(r) = residual.get(&key) {
                if best.is_none_or(|(_, b)| r > b) {
                    best = Some((key, r));
                }
            }
        }
        best.map(|(k, _)| k)
    };

    let mut flow = PathFlow::new();
    let mut cycles_removed = 0;
    while let Some(first) = next_arc(&residual, topo.source, 0) {
        let mut walk = vec![first];
        let mut bottleneck = residual[&first].clone();
        let (mut node, mut level) = (topo.head[first.0], first.1);
        while node != topo.sink {
            let Some(arc) = next_arc(&residual, node, level) else {
                return bad(format!("flow stops at node {node}, level {level}"));
            };
            bottleneck = bottleneck.min(residual[&arc].clone());
            walk.push(arc);
            node = topo.head[arc.0];
            level = arc.1;
        }
        for key in &walk {
            let r = residual.get_mut(key).unwrap();
            *r -= &bottleneck;
            if r.is_zero() {
                residual.remove(key);
            }
        }

        // Loop erasure on the projected node sequence.
        let mut nodes = vec![topo.source];
        let mut edges: Vec<usize> = Vec::with_capacity(walk.len());
        for &(e, _) in &walk {
            let h = topo.head[e];
            if let Some(k) = nodes.iter().position(|&n| n == h) {
                nodes.truncate(k + 1);
                edges.truncate(k);
                cycles_removed += 1;
            } else {
                nodes.push(h);
                edges.push(e);
            }
        }
        flow.add(edges, bottleneck);
    }
    Ok(Decomposition { flow, cycles_removed })
}

//! Edge-based delay-expanded formulation of delay-constrained max flow.
//!
//! Variable `f[e@d]` is the rate on edge `e` that has accumulated delay `d`
//! from the source once it leaves `e`. Conservation is enforced per
//! (node, delay level) pair. Only variables on a source-reachable state that
//! can still reach the sink within the bound are generated; every other
//! variable is zero in all feasible solutions.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet, VecDeque};

use crate::error::Result;
use crate::lp::{LinearProgram, LpSolution, Relation, Sense, VarId};
use crate::model::{GraphInstance, Topology};
use crate::rational::Rational;

/// `(edge index, exit delay level)`.
pub type Level = (usize, u64);

#[derive(Debug, Clone)]
pub struct ExpandedProblem {
    pub delay_bound: u64,
    pub topology: Topology,
    pub variables: BTreeMap<Level, VarId>,
    /// Indexed by LP variable.
    pub reverse_map: Vec<Level>,
    pub lp: LinearProgram,
    /// Number of per-(node, level) conservation rows.
    pub conservation_rows: usize,
}

impl ExpandedProblem {
    pub fn var_count(&self) -> usize {
        self.reverse_map.len()
    }
}

/// Shortest delay from each node to the sink, never passing through the
/// source or leaving the sink. `None` when the sink is unreachable.
fn delay_to_sink(topo: &Topology) -> Vec<Option<u64>> {
    let mut dist: Vec<Option<u64>> = vec![None; topo.node_count];
    let mut heap = BinaryHeap::new();
    dist[topo.sink] = Some(0);
    heap.push(Reverse((0u64, topo.sink)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v] != Some(d) {
            continue;
        }
        if v == topo.source {
            continue;
        }
        for &e in &topo.in_edges[v] {
            let u = topo.tail[e];
            if u == topo.sink {
                continue;
            }
            let nd = d + topo.delay[e] as u64;
            if dist[u].is_none_or(|old| nd < old) {
                dist[u] = Some(nd);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}

/// Builds the delay-expanded LP for `instance` with delay bound `delay_bound`.
pub fn expand(instance: &GraphInstance, delay_bound: u64) -> Result<ExpandedProblem> {
    let topo = instance.topology()?;
    let to_sink = delay_to_sink(&topo);
    let useful = |node: usize, level: u64| -> bool {
        node == topo.sink || to_sink[node].is_some_and(|rest| level + rest <= delay_bound)
    };

    // Forward pass over (node, level) states.
    let mut levels: BTreeSet<Level> = BTreeSet::new();
    let mut seen: HashSet<(usize, u64)> = HashSet::new();
    let mut queue = VecDeque::new();
    if useful(topo.source, 0) {
        seen.insert((topo.source, 0));
        queue.push_back((topo.source, 0u64));
    }
    while let Some((u, d)) = queue.pop_front() {
        if u == topo.sink {
            continue;
        }
        for &e in &topo.out_edges[u] {
            let w = topo.head[e];
            if w == topo.source {
                continue;
            }
            let exit = d + topo.delay[e] as u64;
            if exit > delay_bound || !useful(w, exit) {
                continue;
            }
            levels.insert((e, exit));
            if seen.insert((w, exit)) {
                queue.push_back((w, exit));
            }
        }
    }

    let mut lp = LinearProgram::new(Sense::Maximize);
    let mut variables = BTreeMap::new();
    let mut reverse_map = Vec::with_capacity(levels.len());
    for &(e, d) in &levels {
        let var = lp.add_var(format!("f[{}@{}]", instance.edges[e].id, d))?;
        variables.insert((e, d), var);
        reverse_map.push((e, d));
    }

    let one = Rational::one;
    let into_sink: Vec<VarId> = variables
        .iter()
        .filter(|((e, _), _)| topo.head[*e] == topo.sink)
        .map(|(_, &v)| v)
        .collect();
    for &v in &into_sink {
        lp.set_objective(v, one());
    }

    // Rate leaving the source equals rate arriving at the sink.
    let mut balance: Vec<(VarId, Rational)> = topo.out_edges[topo.source]
        .iter()
        .filter_map(|&e| variables.get(&(e, topo.delay[e] as u64)))
        .map(|&v| (v, one()))
        .collect();
    balance.extend(into_sink.iter().map(|&v| (v, -one())));
    if !balance.is_empty() {
        lp.add_constraint("balance", balance, Relation::Eq, Rational::zero());
    }

    // Conservation at each intermediate (node, level).
    let mut conservation: BTreeMap<(usize, u64), Vec<(VarId, Rational)>> = BTreeMap::new();
    for (&(e, d), &var) in &variables {
        let (u, w) = (topo.tail[e], topo.head[e]);
        if w != topo.source && w != topo.sink {
            conservation.entry((w, d)).or_default().push((var, one()));
        }
        if u != topo.source && u != topo.sink {
            let entered = d - topo.delay[e] as u64;
            conservation.entry((u, entered)).or_default().push((var, -one()));
        }
    }
    let conservation_rows = conservation.len();
    for ((node, level), terms) in conservation {
        lp.add_constraint(
            format!("conserve[{}@{}]", instance.nodes[node], level),
            terms,
            Relation::Eq,
            Rational::zero(),
        );
    }

    let mut per_edge: BTreeMap<usize, Vec<(VarId, Rational)>> = BTreeMap::new();
    for (&(e, _), &var) in &variables {
        per_edge.entry(e).or_default().push((var, one()));
    }
    for (e, terms) in per_edge {
        lp.add_constraint(
            format!("cap[{}]", instance.edges[e].id),
            terms,
            Relation::Le,
            Rational::from_integer(topo.capacity[e]),
        );
    }

    Ok(ExpandedProblem {
        delay_bound,
        topology: topo,
        variables,
        reverse_map,
        lp,
        conservation_rows,
    })
}

/// Reads the value of every expanded variable out of an LP solution.
pub fn extract_edge_flow(problem: &ExpandedProblem, solution: &LpSolution) -> BTreeMap<Level, Rational> {
    problem
        .variables
        .iter()
        .map(|(&key, &var)| (key, solution.values[var].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use crate::model::Edge;

    fn instance(nodes: &[&str], edges: &[(&str, &str, &str, i64, i64)]) -> GraphInstance {
        GraphInstance {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|&(id, u, v, c, d)| Edge::new(id, u, v, c, d))
                .collect(),
            source: nodes[0].to_string(),
            sink: nodes[nodes.len() - 1].to_string(),
            rate: Rational::one(),
        }
    }

    #[test]
    fn single_edge_has_one_variable() {
        let inst = instance(&["s", "t"], &[("e", "s", "t", 5, 2)]);
        let p = expand(&inst, 3).unwrap();
        assert_eq!(p.reverse_map, vec![(0, 2)]);
        let v = p.variables[&(0, 2)];
        assert_eq!(p.lp.objective_coef(v), &Rational::one());
        let caps: Vec<_> = p.lp.constraints().iter().filter(|c| c.label.starts_with("cap")).collect();
        assert_eq!(caps.len(), 1);
        assert_eq!(caps[0].terms, vec![(v, Rational::one())]);
        assert_eq!(caps[0].relation, Relation::Le);
        assert_eq!(caps[0].rhs, Rational::from_integer(5));

        let sol = solve_lp(&p.lp);
        let flow = extract_edge_flow(&p, &sol);
        assert_eq!(flow, BTreeMap::from([((0, 2), Rational::from_integer(5))]));
    }

    #[test]
    fn bound_below_every_path_gives_zero() {
        let inst = instance(&["s", "v", "t"], &[("a", "s", "v", 1, 1), ("b", "v", "t", 1, 2)]);
        let p = expand(&inst, 0).unwrap();
        assert_eq!(p.var_count(), 0);
        let sol = solve_lp(&p.lp);
        assert!(sol.objective_value.is_zero());
        assert!(extract_edge_flow(&p, &sol).values().all(Rational::is_zero));
    }

    #[test]
    fn chain_conservation_row() {
        let inst = instance(&["s", "v", "t"], &[("sv", "s", "v", 1, 1), ("vt", "v", "t", 1, 1)]);
        let p = expand(&inst, 2).unwrap();
        let sv = p.variables[&(0, 1)];
        let vt = p.variables[&(1, 2)];
        let row = p
            .lp
            .constraints()
            .iter()
            .find(|c| c.label == "conserve[v@1]")
            .expect("row at (v, 1)");
        assert_eq!(row.relation, Relation::Eq);
        assert_eq!(row.terms, vec![(sv, Rational::one()), (vt, -Rational::one())]);
        assert_eq!(p.conservation_rows, 1);
    }

    #[test]
    fn unreachable_levels_are_pruned() {
        // s -> v has delay 1, so nothing leaves v at level 0; v -> t at delay 3
        // cannot fit when T = 3.
        let inst = instance(
            &["s", "v", "t"],
            &[("sv", "s", "v", 1, 1), ("vt", "v", "t", 1, 3), ("st", "s", "t", 1, 2)],
        );
        let p = expand(&inst, 3).unwrap();
        assert_eq!(p.reverse_map, vec![(2, 2)]);
        let p = expand(&inst, 6).unwrap();
        assert_eq!(p.reverse_map, vec![(0, 1), (1, 4), (2, 2)]);
    }

    #[test]
    fn edges_into_source_and_out_of_sink_are_ignored() {
        let inst = instance(
            &["s", "t"],
            &[("st", "s", "t", 1, 1), ("ts", "t", "s", 1, 1)],
        );
        let p = expand(&inst, 5).unwrap();
        assert_eq!(p.reverse_map, vec![(0, 1)]);
    }
}

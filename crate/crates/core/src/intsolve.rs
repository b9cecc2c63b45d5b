//! Exact solver for the integer variant: every path carries an integer rate.
//!
//! Simple paths are enumerated up front and the answer is binary-searched
//! over their distinct delays. Feasibility at a candidate delay is decided by
//! depth-first branch-and-bound on the path LP.

use std::fmt;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::minmax::min_max_delay;
use crate::model::{GraphInstance, PathFlow, Topology};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntSolverConfig {
    pub max_nodes: u64,
    pub max_paths: usize,
}

impl Default for IntSolverConfig {
    fn default() -> Self {
        IntSolverConfig {
            max_nodes: 10_000_000,
            max_paths: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntSolveResult {
    /// `None` when no integer flow of the requested rate exists.
    pub optimal_value: Option<i64>,
    pub flow: PathFlow,
    pub nodes_explored: u64,
}

struct Candidate {
    edges: Vec<usize>,
    delay: i64,
}

fn simple_paths(topo: &Topology, limit: usize) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    let mut stack = vec![(topo.source, 0usize)];
    let mut on_path = vec![false; topo.node_count];
    let mut edges: Vec<usize> = Vec::new();
    on_path[topo.source] = true;
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if node == topo.sink || *next == topo.out_edges[node].len() {
            if node == topo.sink {
                if out.len() == limit {
                    return Err(Error::BudgetExceeded {
                        what: "enumerated paths",
                        limit: limit as u64,
                    });
                }
                out.push(Candidate {
                    delay: edges.iter().map(|&e| topo.delay[e]).sum(),
                    edges: edges.clone(),
                });
            }
            on_path[node] = false;
            stack.pop();
            edges.pop();
            continue;
        }
        let e = topo.out_edges[node][*next];
        *next += 1;
        let head = topo.head[e];
        if !on_path[head] {
            on_path[head] = true;
            edges.push(e);
            stack.push((head, 0));
        }
    }
    out.sort_by_key(|c| c.delay);
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Edge(usize),
    Path(usize),
}

#[derive(Debug, Clone, Copy)]
struct Bound {
    target: Target,
    relation: Relation,
    value: i64,
}

struct Search<'a> {
    topo: &'a Topology,
    paths: &'a [Candidate],
    rate: i64,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn relax(&self, count: usize, bounds: &[Bound]) -> Option<Vec<Rational>> {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let vars: Vec<usize> = (0..count)
            .map(|i| lp.add_var(format!("x{i}")).expect("fresh names"))
            .collect();
        let mut by_edge: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.topo.edge_count()];
        for (i, p) in self.paths[..count].iter().enumerate() {
            lp.set_objective(vars[i], Rational::one());
            for &e in &p.edges {
                by_edge[e].push((vars[i], Rational::one()));
            }
        }
        lp.add_constraint(
            "rate".to_string(),
            vars.iter().map(|&v| (v, Rational::one())).collect::<Vec<_>>(),
            Relation::Le,
            Rational::from_integer(self.rate),
        );
        for (e, terms) in by_edge.iter().enumerate() {
            if !terms.is_empty() {
                lp.add_constraint(
                    format!("cap{e}"),
                    terms.clone(),
                    Relation::Le,
                    Rational::from_integer(self.topo.capacity[e]),
                );
            }
        }
        for b in bounds {
            let terms = match b.target {
                Target::Edge(e) => by_edge[e].clone(),
                Target::Path(p) => vec![(vars[p], Rational::one())],
            };
            lp.add_constraint("branch".to_string(), terms, b.relation, Rational::from_integer(b.value));
        }
        let sol = solve_lp(&lp);
        (sol.status == LpStatus::Optimal && sol.objective_value == Rational::from_integer(self.rate))
            .then_some(sol.values)
    }

    /// Integer path rates for the first `count` paths summing to the rate.
    fn feasible(&mut self, count: usize) -> Result<Option<Vec<i64>>> {
        let mut open: Vec<Vec<Bound>> = vec![Vec::new()];
        while let Some(bounds) = open.pop() {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "branch-and-bound nodes",
                    limit: self.max_nodes,
                });
            }
            let Some(x) = self.relax(count, &bounds) else {
                continue;
            };
            let Some(target) = self.branch_target(count, &x) else {
                return Ok(Some(x.iter().map(|v| v.to_i64().expect("integral")).collect()));
            };
            let value = match target {
                Target::Edge(e) => self.paths[..count]
                    .iter()
                    .zip(&x)
                    .filter(|(p, _)| p.edges.contains(&e))
                    .map(|(_, v)| v)
                    .sum::<Rational>(),
                Target::Path(p) => x[p].clone(),
            };
            let floor = value.floor().to_i64().expect("small");
            for (relation, v) in [(Relation::Le, floor), (Relation::Ge, floor + 1)] {
                let mut child = bounds.clone();
                child.push(Bound { target, relation, value: v });
                open.push(child);
            }
        }
        Ok(None)
    }

    /// Fractional edge aggregate with the largest capacity (lowest index on
    /// ties), else the first fractional path variable.
    fn branch_target(&self, count: usize, x: &[Rational]) -> Option<Target> {
        let mut load = vec![Rational::zero(); self.topo.edge_count()];
        for (p, v) in self.paths[..count].iter().zip(x) {
            if !v.is_zero() {
                for &e in &p.edges {
                    load[e] += v;
                }
            }
        }
        let edge = (0..load.len())
            .filter(|&e| !load[e].is_integer())
            .min_by_key(|&e| (std::cmp::Reverse(self.topo.capacity[e]), e));
        if let Some(e) = edge {
            return Some(Target::Edge(e));
        }
        x.iter().position(|v| !v.is_integer()).map(Target::Path)
    }
}

pub fn int_min_max_delay(instance: &GraphInstance, config: &IntSolverConfig) -> Result<IntSolveResult> {
    let rate = instance
        .rate
        .is_integer()
        .then(|| instance.rate.to_i64())
        .flatten()
        .ok_or_else(|| Error::NonIntegerRate(instance.rate.to_string()))?;
    let topo = instance.topology()?;
    let paths = simple_paths(&topo, config.max_paths)?;
    let mut search = Search {
        topo: &topo,
        paths: &paths,
        rate,
        nodes: 0,
        max_nodes: config.max_nodes,
    };

    // Prefix lengths: paths[..cut[i]] are exactly the paths of delay <= delays[i].
    let mut delays: Vec<i64> = Vec::new();
    let mut cuts: Vec<usize> = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        if delays.last() == Some(&p.delay) {
            *cuts.last_mut().unwrap() = i + 1;
        } else {
            delays.push(p.delay);
            cuts.push(i + 1);
        }
    }

    let mut best: Option<(usize, Vec<i64>)> = None;
    let (mut lo, mut hi) = (0usize, delays.len());
    if let Some(last) = delays.len().checked_sub(1) {
        match search.feasible(cuts[last])? {
            Some(x) => {
                best = Some((last, x));
                hi = last;
            }
            None => lo = hi,
        }
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match search.feasible(cuts[mid])? {
            Some(x) => {
                best = Some((mid, x));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }

    let nodes_explored = search.nodes;
    Ok(match best {
        Some((idx, x)) => IntSolveResult {
            optimal_value: Some(delays[idx]),
            flow: PathFlow::from_entries(
                paths
                    .iter()
                    .zip(x)
                    .map(|(p, v)| (p.edges.clone(), Rational::from_integer(v))),
            ),
            nodes_explored,
        },
        None => IntSolveResult {
            optimal_value: None,
            flow: PathFlow::new(),
            nodes_explored,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gap {
    Finite(Rational),
    /// Fractional optimum 0 with a positive integer optimum.
    Infinite,
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Finite(r) => write!(f, "{r}"),
            Gap::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub fractional: i64,
    pub integer: i64,
    pub gap: Gap,
}

pub fn gap_ratio(integer: i64, fractional: i64) -> Gap {
    match (integer, fractional) {
        (0, 0) => Gap::Finite(Rational::one()),
        (_, 0) => Gap::Infinite,
        (i, f) => Gap::Finite(Rational::new(i, f)),
    }
}

pub fn int_gap(instance: &GraphInstance, config: &IntSolverConfig) -> Result<GapReport> {
    let fractional = min_max_delay(instance)?
        .optimal_value
        .ok_or_else(|| Error::Infeasible("no fractional flow of the requested rate".into()))?;
    let integer = int_min_max_delay(instance, config)?
        .optimal_value
        .ok_or_else(|| Error::Infeasible("no integer flow of the requested rate".into()))?;
    Ok(GapReport {
        fractional,
        integer,
        gap: gap_ratio(integer, fractional),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{building_block, gap_composite, three_partition_gadget};
    use crate::model::{check_flow, max_delay, Edge};

    fn solve(inst: &GraphInstance) -> IntSolveResult {
        let r = int_min_max_delay(inst, &IntSolverConfig::default()).unwrap();
        if let Some(d) = r.optimal_value {
            assert!(check_flow(inst, &r.flow, &inst.rate).is_empty());
            assert_eq!(max_delay(inst, &r.flow).unwrap(), d);
            assert!(r.flow.entries().iter().all(|p| p.rate.is_integer()));
        }
        r
    }

    #[test]
    fn block_values() {
        let two = Rational::from_integer(2);
        assert_eq!(solve(&building_block(5, two.clone()).unwrap()).optimal_value, Some(2));
        assert_eq!(solve(&building_block(3, two).unwrap()).optimal_value, Some(1));
    }

    #[test]
    fn composite_gap() {
        let cfg = IntSolverConfig::default();
        let g = int_gap(&gap_composite(5).unwrap(), &cfg).unwrap();
        assert_eq!((g.fractional, g.integer), (1, 2));
        assert_eq!(g.gap, Gap::Finite(Rational::from_integer(2)));
        let g = int_gap(&gap_composite(7).unwrap(), &cfg).unwrap();
        assert_eq!(g.gap, Gap::Finite(Rational::from_integer(3)));
    }

    #[test]
    fn single_edge_gap_is_one() {
        let inst = GraphInstance {
            nodes: vec!["s".into(), "t".into()],
            edges: vec![Edge::new("e", "s", "t", 5, 7)],
            source: "s".into(),
            sink: "t".into(),
            rate: Rational::from_integer(3),
        };
        let g = int_gap(&inst, &IntSolverConfig::default()).unwrap();
        assert_eq!(g.gap, Gap::Finite(Rational::one()));
    }

    #[test]
    fn three_partition_hits_b() {
        let (inst, b) = three_partition_gadget(&[5, 5, 6, 6, 7, 7]).unwrap();
        assert_eq!(b, 18);
        assert_eq!(solve(&inst).optimal_value, Some(18));
    }

    #[test]
    fn infeasible_rate() {
        let inst = building_block(3, Rational::from_integer(3)).unwrap();
        assert_eq!(solve(&inst).optimal_value, None);
    }

    #[test]
    fn rejects_fractional_rate_and_tiny_budgets() {
        let inst = building_block(5, Rational::new(4, 3)).unwrap();
        let cfg = IntSolverConfig::default();
        assert!(matches!(int_min_max_delay(&inst, &cfg), Err(Error::NonIntegerRate(_))));
        let inst = inst.with_rate(Rational::from_integer(2));
        let tight = IntSolverConfig { max_paths: 10, ..cfg };
        assert!(matches!(int_min_max_delay(&inst, &tight), Err(Error::BudgetExceeded { .. })));
        let tight = IntSolverConfig { max_nodes: 1, ..cfg };
        assert!(matches!(int_min_max_delay(&inst, &tight), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn gap_markers() {
        assert_eq!(gap_ratio(0, 0), Gap::Finite(Rational::one()));
        assert_eq!(gap_ratio(3, 0), Gap::Infinite);
        assert_eq!(gap_ratio(3, 2).to_string(), "3/2");
    }
}

//! Brute-force reference solvers for small instances.
//!
//! Everything here works directly on enumerated source-to-sink paths and
//! shares nothing with the delay expansion except the LP solver, so agreement
//! with the main pipeline is a meaningful cross-check.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::model::{GraphInstance, PathFlow};
use crate::rational::Rational;

pub const DEFAULT_PATH_BUDGET: usize = 10_000;
pub const EXHAUSTIVE_MAX_PATHS: usize = 64;
pub const EXHAUSTIVE_MAX_RATE: i64 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedPath {
    pub edges: Vec<usize>,
    pub delay: i64,
}

/// Every simple source-to-sink path, sorted by delay and then by edge-id
/// sequence.
pub fn enumerate_paths(instance: &GraphInstance, budget: usize) -> Result<Vec<EnumeratedPath>> {
    let topo = instance.topology()?;
    let mut paths = Vec::new();
    let mut on_path = vec![false; topo.node_count];
    let mut edges = Vec::new();

    fn walk(
        topo: &crate::model::Topology,
        node: usize,
        on_path: &mut [bool],
        edges: &mut Vec<usize>,
        paths: &mut Vec<EnumeratedPath>,
        budget: usize,
    ) -> Result<()> {
        if node == topo.sink {
            if paths.len() >= budget {
                return Err(Error::BudgetExceeded {
                    what: "path enumeration",
                    limit: budget as u64,
                });
            }
            paths.push(EnumeratedPath {
                delay: edges.iter().map(|&e| topo.delay[e]).sum(),
                edges: edges.clone(),
            });
            return Ok(());
        }
        on_path[node] = true;
        for &e in &topo.out_edges[node] {
            let next = topo.head[e];
            if on_path[next] {
                continue;
            }
            edges.push(e);
            let res = walk(topo, next, on_path, edges, paths, budget);
            edges.pop();
            res?;
        }
        on_path[node] = false;
        Ok(())
    }

    walk(&topo, topo.source, &mut on_path, &mut edges, &mut paths, budget)?;
    paths.sort_by_cached_key(|p| {
        let ids: Vec<&str> = p.edges.iter().map(|&e| instance.edges[e].id.as_str()).collect();
        (p.delay, ids.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    });
    Ok(paths)
}

/// Path LP: maximize total rate over `paths` subject to edge capacities.
fn path_lp(instance: &GraphInstance, paths: &[&EnumeratedPath]) -> (Rational, PathFlow) {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let vars: Vec<usize> = (0..paths.len())
        .map(|i| lp.add_var(format!("p{i}")).expect("fresh names"))
        .collect();
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); instance.edges.len()];
    for (i, p) in paths.iter().enumerate() {
        lp.set_objective(vars[i], Rational::one());
        for &e in &p.edges {
            rows[e].push((vars[i], Rational::one()));
        }
    }
    for (e, terms) in rows.into_iter().enumerate() {
        if !terms.is_empty() {
            let cap = Rational::from_integer(instance.edges[e].capacity);
            lp.add_constraint(format!("cap[{}]", instance.edges[e].id), terms, Relation::Le, cap);
        }
    }
    let sol = solve_lp(&lp);
    assert_eq!(sol.status, LpStatus::Optimal);
    let flow = PathFlow::from_entries(
        paths
            .iter()
            .zip(&sol.values)
            .map(|(p, v)| (p.edges.clone(), v.clone())),
    );
    (sol.objective_value, flow)
}

/// `r*(T)` from the path formulation over paths of delay at most `T`.
pub fn oracle_dc_max_flow(instance: &GraphInstance, delay_bound: u64, budget: usize) -> Result<Rational> {
    Ok(oracle_dc_path_flow(instance, delay_bound, budget)?.0)
}

/// `r*(T)` together with the optimal path flow of the path formulation.
pub fn oracle_dc_path_flow(instance: &GraphInstance, delay_bound: u64, budget: usize) -> Result<(Rational, PathFlow)> {
    let paths = enumerate_paths(instance, budget)?;
    let bound = i64::try_from(delay_bound).unwrap_or(i64::MAX);
    let admissible: Vec<&EnumeratedPath> = paths.iter().filter(|p| p.delay <= bound).collect();
    Ok(path_lp(instance, &admissible))
}

fn distinct_delays(paths: &[EnumeratedPath]) -> Vec<i64> {
    let mut delays: Vec<i64> = paths.iter().map(|p| p.delay).collect();
    delays.dedup();
    delays
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub optimal_value: i64,
    pub flow: PathFlow,
}

/// Smallest enumerated path delay `D` whose path LP reaches the rate, with an
/// optimal path flow at that threshold. `None` when the rate is unreachable.
pub fn oracle_min_max_delay(instance: &GraphInstance, budget: usize) -> Result<Option<OracleSolution>> {
    let paths = enumerate_paths(instance, budget)?;
    for d in distinct_delays(&paths) {
        let admissible: Vec<&EnumeratedPath> = paths.iter().filter(|p| p.delay <= d).collect();
        let (value, flow) = path_lp(instance, &admissible);
        if value >= instance.rate {
            return Ok(Some(OracleSolution { optimal_value: d, flow }));
        }
    }
    Ok(None)
}

/// Exhaustive search over integer rate assignments. Limited to
/// [`EXHAUSTIVE_MAX_PATHS`] paths and rates up to [`EXHAUSTIVE_MAX_RATE`].
pub fn oracle_int_min_max_delay(instance: &GraphInstance) -> Result<Option<OracleSolution>> {
    let rate = instance
        .rate
        .to_i64()
        .ok_or_else(|| Error::NonIntegerRate(instance.rate.to_string()))?;
    if rate > EXHAUSTIVE_MAX_RATE {
        return Err(Error::BudgetExceeded {
            what: "exhaustive rate",
            limit: EXHAUSTIVE_MAX_RATE as u64,
        });
    }
    let paths = enumerate_paths(instance, EXHAUSTIVE_MAX_PATHS)?;
    let capacity: Vec<i64> = instance.edges.iter().map(|e| e.capacity).collect();

    // Assign rates to paths[idx..] to cover `remaining`, respecting residual capacity.
    fn assign(
        paths: &[&EnumeratedPath],
        idx: usize,
        remaining: i64,
        residual: &mut [i64],
        chosen: &mut Vec<(usize, i64)>,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        if idx == paths.len() {
            return false;
        }
        let room = paths[idx].edges.iter().map(|&e| residual[e]).min().unwrap_or(0);
        for amount in (0..=room.min(remaining)).rev() {
            for &e in &paths[idx].edges {
                residual[e] -= amount;
            }
            if amount > 0 {
                chosen.push((idx, amount));
            }
            let found = assign(paths, idx + 1, remaining - amount, residual, chosen);
            if found {
                return true;
            }
            if amount > 0 {
                chosen.pop();
            }
            for &e in &paths[idx].edges {
                residual[e] += amount;
            }
        }
        false
    }

    for d in distinct_delays(&paths) {
        let admissible: Vec<&EnumeratedPath> = paths.iter().filter(|p| p.delay <= d).collect();
        let mut residual = capacity.clone();
        let mut chosen = Vec::new();
        if assign(&admissible, 0, rate, &mut residual, &mut chosen) {
            let flow = PathFlow::from_entries(
                chosen
                    .into_iter()
                    .map(|(i, r)| (admissible[i].edges.clone(), Rational::from_integer(r))),
            );
            return Ok(Some(OracleSolution { optimal_value: d, flow }));
        }
    }
    Ok(None)
}

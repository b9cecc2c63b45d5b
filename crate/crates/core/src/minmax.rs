//! Minimum achievable maximum path delay for a fractional flow of rate `R`.
//!
//! `d*(R) <= T` holds exactly when `r*(T) >= R`, so the optimum is found by
//! binary search on `T` over `[0, |E| * d_max]`, probing `r*(T)` with the
//! expanded LP at each step.

use std::time::Instant;

use crate::dcflow::{dc_max_flow, DcMaxFlowResult};
use crate::error::{Error, Result};
use crate::model::{Branch, GraphInstance, PathFlow, Probe, SolveReport, SolveStatus};
use crate::rational::Rational;

pub fn min_max_delay(instance: &GraphInstance) -> Result<SolveReport> {
    let started = Instant::now();
    let rate = &instance.rate;
    let horizon = instance.delay_horizon();

    let unconstrained = dc_max_flow(instance, horizon)?;
    let max_flow = unconstrained.value.clone();
    if max_flow < *rate {
        return Ok(SolveReport {
            status: SolveStatus::Infeasible,
            optimal_value: None,
            flow: PathFlow::new(),
            iterations: Vec::new(),
            max_flow: Some(max_flow),
            elapsed: started.elapsed(),
        });
    }

    let (mut lower, mut upper) = (0u64, horizon);
    let mut accepted: DcMaxFlowResult = unconstrained;
    let mut iterations = Vec::new();
    while lower < upper {
        let probe = lower + (upper - lower) / 2;
        let result = dc_max_flow(instance, probe)?;
        let branch = if result.value >= *rate {
            upper = probe;
            Branch::Upper
        } else {
            lower = probe + 1;
            Branch::Lower
        };
        iterations.push(Probe {
            delay_bound: probe,
            value: result.value.clone(),
            branch,
        });
        if branch == Branch::Upper {
            accepted = result;
        }
    }
    debug_assert_eq!(accepted.delay_bound, upper);

    let flow = trim_to_rate(instance, &accepted.path_flow, rate)?;
    Ok(SolveReport {
        status: SolveStatus::Solved,
        optimal_value: Some(upper as i64),
        flow,
        iterations,
        max_flow: Some(max_flow),
        elapsed: started.elapsed(),
    })
}

/// Reduces `flow` to total rate exactly `rate`, cutting the largest-delay
/// paths first and, among equal delays, the lexicographically smallest
/// edge-id sequence first.
pub fn trim_to_rate(instance: &GraphInstance, flow: &PathFlow, rate: &Rational) -> Result<PathFlow> {
    let total = flow.total_rate();
    if total < *rate {
        return Err(Error::InsufficientRate {
            total: total.to_string(),
            rate: rate.to_string(),
        });
    }
    let mut order: Vec<(i64, Vec<&str>, usize)> = flow
        .entries()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let delay = p.edges.iter().map(|&e| instance.edges[e].delay).sum();
            let ids = p.edges.iter().map(|&e| instance.edges[e].id.as_str()).collect();
            (delay, ids, i)
        })
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    let mut rates: Vec<Rational> = flow.entries().iter().map(|p| p.rate.clone()).collect();
    let mut excess = total - rate;
    for (_, _, i) in order {
        if excess.is_zero() {
            break;
        }
        let cut = rates[i].clone().min(excess.clone());
        rates[i] -= &cut;
        excess -= &cut;
    }
    Ok(PathFlow::from_entries(
        flow.entries()
            .iter()
            .zip(rates)
            .map(|(p, r)| (p.edges.clone(), r)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_flow, max_delay, Edge};

    fn two_routes() -> GraphInstance {
        GraphInstance {
            nodes: vec!["s".into(), "a".into(), "b".into(), "t".into()],
            edges: vec![
                Edge::new("p1a", "s", "a", 2, 2),
                Edge::new("p1b", "a", "t", 2, 3),
                Edge::new("p2a", "s", "b", 1, 1),
                Edge::new("p2b", "b", "t", 1, 2),
            ],
            source: "s".into(),
            sink: "t".into(),
            rate: Rational::from_integer(2),
        }
    }

    #[test]
    fn single_edge_optimum_is_its_delay() {
        let inst = GraphInstance {
            nodes: vec!["s".into(), "t".into()],
            edges: vec![Edge::new("e", "s", "t", 5, 7)],
            source: "s".into(),
            sink: "t".into(),
            rate: Rational::from_integer(3),
        };
        let report = min_max_delay(&inst).unwrap();
        assert_eq!(report.optimal_value, Some(7));
        assert!(check_flow(&inst, &report.flow, &inst.rate).is_empty());
        assert_eq!(max_delay(&inst, &report.flow).unwrap(), 7);
        // |E| d_max = 7: at most ceil(log2(8)) + 1 probes.
        assert!(report.iterations.len() <= 4);
    }

    #[test]
    fn rate_above_max_flow_is_infeasible() {
        let inst = two_routes().with_rate(Rational::from_integer(4));
        let report = min_max_delay(&inst).unwrap();
        assert_eq!(report.status, SolveStatus::Infeasible);
        assert_eq!(report.max_flow, Some(Rational::from_integer(3)));
    }

    #[test]
    fn trims_longest_first() {
        let inst = two_routes();
        let flow = PathFlow::from_entries([
            (vec![0, 1], Rational::from_integer(2)),
            (vec![2, 3], Rational::one()),
        ]);
        let trimmed = trim_to_rate(&inst, &flow, &Rational::from_integer(2)).unwrap();
        assert_eq!(
            trimmed,
            PathFlow::from_entries([(vec![0, 1], Rational::one()), (vec![2, 3], Rational::one())])
        );
        let same = trim_to_rate(&inst, &flow, &Rational::from_integer(3)).unwrap();
        assert_eq!(same, flow);
        assert!(matches!(
            trim_to_rate(&inst, &flow, &Rational::from_integer(4)),
            Err(Error::InsufficientRate { .. })
        ));
    }

    #[test]
    fn trim_tie_prefers_smallest_id_sequence() {
        let inst = GraphInstance {
            nodes: vec!["s".into(), "t".into()],
            edges: vec![Edge::new("b", "s", "t", 1, 1), Edge::new("a", "s", "t", 1, 1)],
            source: "s".into(),
            sink: "t".into(),
            rate: Rational::one(),
        };
        let flow = PathFlow::from_entries([(vec![0], Rational::one()), (vec![1], Rational::one())]);
        let trimmed = trim_to_rate(&inst, &flow, &Rational::one()).unwrap();
        assert_eq!(trimmed.entries()[0].edges, vec![0]);
    }

    #[test]
    fn mixed_routes_need_the_slow_one() {
        let inst = two_routes().with_rate(Rational::new(5, 2));
        let report = min_max_delay(&inst).unwrap();
        assert_eq!(report.optimal_value, Some(5));
        assert_eq!(max_delay(&inst, &report.flow).unwrap(), 5);
        let inst = two_routes().with_rate(Rational::one());
        assert_eq!(min_max_delay(&inst).unwrap().optimal_value, Some(3));
    }
}

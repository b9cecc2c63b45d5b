//! Cross-checks of the solvers against the brute-force oracle on one instance.

use crate::dcflow::dc_max_flow;
use crate::error::{Error, Result};
use crate::intsolve::{int_min_max_delay, IntSolverConfig};
use crate::minmax::min_max_delay;
use crate::model::{check_flow, edge_total_delay, max_delay, path_total_delay, GraphInstance, PathFlow};
use crate::oracle::{
    enumerate_paths, oracle_dc_max_flow, oracle_int_min_max_delay, oracle_min_max_delay, EXHAUSTIVE_MAX_PATHS,
    EXHAUSTIVE_MAX_RATE,
};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

fn check(name: &'static str, problems: Vec<String>, ok_detail: String) -> Check {
    if problems.is_empty() {
        Check { name, verdict: Verdict::Pass, detail: ok_detail }
    } else {
        Check {
            name,
            verdict: Verdict::Fail,
            detail: problems.join("; "),
        }
    }
}

fn skipped(name: &'static str, why: impl Into<String>) -> Check {
    Check {
        name,
        verdict: Verdict::Skip,
        detail: why.into(),
    }
}

fn witness(instance: &GraphInstance, flow: &PathFlow, optimum: i64) -> Vec<String> {
    let mut problems = check_flow(instance, flow, &instance.rate);
    match max_delay(instance, flow) {
        Ok(d) if d == optimum => {}
        Ok(d) => problems.push(format!("max delay {d} differs from optimum {optimum}")),
        Err(e) => problems.push(e.to_string()),
    }
    if path_total_delay(instance, flow) != edge_total_delay(instance, flow) {
        problems.push("path and edge total delays differ".into());
    }
    problems
}

/// Runs every applicable check. Errors only when the instance itself is
/// invalid; resource limits turn individual checks into skips.
pub fn cross_check(instance: &GraphInstance, limits: &IntSolverConfig) -> Result<Vec<Check>> {
    instance.topology()?;
    let mut out = Vec::new();
    let report = min_max_delay(instance)?;
    let horizon = instance.delay_horizon();
    let paths_ok = match enumerate_paths(instance, limits.max_paths) {
        Ok(p) => Some(p.len()),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };

    let mut threshold = Vec::new();
    let mut formulations = Vec::new();
    let mut monotone = Vec::new();
    let mut previous: Option<Rational> = None;
    for t in 0..=horizon {
        let value = dc_max_flow(instance, t)?.value;
        let left = report.optimal_value.is_some_and(|d| d <= t as i64);
        if left != (value >= instance.rate) {
            threshold.push(format!("T={t}: d*={:?}, r*={value}", report.optimal_value));
        }
        if paths_ok.is_some() {
            let oracle = oracle_dc_max_flow(instance, t, limits.max_paths)?;
            if oracle != value {
                formulations.push(format!("T={t}: expanded {value}, path LP {oracle}"));
            }
        }
        if previous.as_ref().is_some_and(|p| *p > value) {
            monotone.push(format!("r* drops at T={t}"));
        }
        previous = Some(value);
    }
    let sweep = format!("T in 0..={horizon}");
    out.push(check("threshold", threshold, sweep.clone()));
    out.push(match paths_ok {
        Some(_) => check("formulations", formulations, sweep.clone()),
        None => skipped("formulations", "path budget exceeded"),
    });
    out.push(check("monotone", monotone, sweep));

    out.push(match paths_ok {
        Some(_) => {
            let oracle = oracle_min_max_delay(instance, limits.max_paths)?.map(|s| s.optimal_value);
            let problems = if oracle == report.optimal_value {
                Vec::new()
            } else {
                vec![format!("binary search {:?}, threshold scan {oracle:?}", report.optimal_value)]
            };
            check("oracle-minmax", problems, format!("d* = {}", show(report.optimal_value)))
        }
        None => skipped("oracle-minmax", "path budget exceeded"),
    });
    out.push(match report.optimal_value {
        Some(d) => check("witness", witness(instance, &report.flow, d), format!("{} paths", report.flow.len())),
        None => skipped("witness", "infeasible"),
    });

    if !instance.rate.is_integer() {
        out.push(skipped("int-solver", "fractional rate"));
        out.push(skipped("int-oracle", "fractional rate"));
        return Ok(out);
    }
    let integer = match int_min_max_delay(instance, limits) {
        Ok(r) => Some(r),
        Err(Error::BudgetExceeded { what, limit }) => {
            out.push(skipped("int-solver", format!("{what} budget of {limit} exceeded")));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(r) = &integer {
        let mut problems = match r.optimal_value {
            Some(d) => witness(instance, &r.flow, d),
            None => Vec::new(),
        };
        if r.flow.entries().iter().any(|p| !p.rate.is_integer()) {
            problems.push("fractional path rate".into());
        }
        if let (Some(i), Some(f)) = (r.optimal_value, report.optimal_value) {
            if i < f {
                problems.push(format!("integer optimum {i} below fractional {f}"));
            }
        }
        out.push(check("int-solver", problems, format!("d* = {}", show(r.optimal_value))));
    }
    let small = paths_ok.is_some_and(|n| n <= EXHAUSTIVE_MAX_PATHS)
        && instance.rate <= Rational::from_integer(EXHAUSTIVE_MAX_RATE);
    out.push(match (&integer, small) {
        (Some(r), true) => {
            let oracle = oracle_int_min_max_delay(instance)?.map(|s| s.optimal_value);
            let problems = if oracle == r.optimal_value {
                Vec::new()
            } else {
                vec![format!("branch-and-bound {:?}, exhaustive {oracle:?}", r.optimal_value)]
            };
            check("int-oracle", problems, format!("d* = {}", show(oracle)))
        }
        (None, _) => skipped("int-oracle", "integer solver skipped"),
        (_, false) => skipped("int-oracle", "too many paths or too large a rate"),
    });
    Ok(out)
}

fn show(value: Option<i64>) -> String {
    value.map_or_else(|| "infeasible".into(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{building_block, partition_gadget};

    #[test]
    fn block_passes_everything() {
        let inst = building_block(4, Rational::from_integer(2)).unwrap();
        let checks = cross_check(&inst, &IntSolverConfig::default()).unwrap();
        let names: Vec<&str> = checks.iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            ["threshold", "formulations", "monotone", "oracle-minmax", "witness", "int-solver", "int-oracle"]
        );
        assert!(checks.iter().all(|c| c.verdict == Verdict::Pass), "{checks:?}");
    }

    #[test]
    fn fractional_rate_skips_integer_checks() {
        let (inst, _) = partition_gadget(&[1, 2, 3]).unwrap();
        let inst = inst.with_rate(Rational::new(3, 2));
        let checks = cross_check(&inst, &IntSolverConfig::default()).unwrap();
        assert!(checks.iter().all(|c| c.verdict != Verdict::Fail));
        assert_eq!(checks.iter().filter(|c| c.verdict == Verdict::Skip).count(), 2);
    }
}

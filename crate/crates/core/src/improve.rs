//! Core improvement: growing a core `h` into a core `k ≥ h`.
//!
//! All strategies start from the lazy core the oracle returns for `h` and,
//! except the lazy one, keep raising the candidate component with the
//! lowest current value (ties to the lower index) by one level, probing the
//! oracle after each raise. An unsatisfiable probe keeps the raise; a
//! satisfiable one undoes it and drops the component from the candidates.
//! Solutions met along the way may improve the upper bound.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::model::{Assignment, Cost, CostVector};
use crate::oracle::{Induced, InducedCsp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreStrategy {
    /// Keep the oracle's lazy core.
    Lazy,
    /// Raise until the core's cost reaches the upper bound.
    CostBounded,
    /// Raise until the first satisfiable probe.
    PartialMax,
    /// Raise until no single-level raise keeps the vector a core.
    Maximal,
}

impl CoreStrategy {
    pub const ALL: [CoreStrategy; 4] = [
        CoreStrategy::Lazy,
        CoreStrategy::CostBounded,
        CoreStrategy::PartialMax,
        CoreStrategy::Maximal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoreStrategy::Lazy => "lazy",
            CoreStrategy::CostBounded => "cost-bounded",
            CoreStrategy::PartialMax => "partial-max",
            CoreStrategy::Maximal => "maximal",
        }
    }
}

impl fmt::Display for CoreStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoreStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CoreStrategy::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown core strategy `{s}`"))
    }
}

/// Result of a core improvement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImproveOutcome {
    pub core: CostVector,
    /// Best solution found while probing with cost below the incoming bound.
    pub new_ub: Option<(Cost, Assignment)>,
    /// Oracle calls made during improvement.
    pub probes: u64,
    /// True if the deadline cut the improvement short (the core is still valid).
    pub interrupted: bool,
}

/// Grows `lazy` (a core returned by the oracle) according to `strategy`.
/// `ub` is the current upper bound in component costs, `None` if unknown.
pub fn improve_from_core(
    strategy: CoreStrategy,
    lazy: CostVector,
    ub: Option<Cost>,
    oracle: &mut InducedCsp,
    deadline: Option<Instant>,
) -> ImproveOutcome {
    let mut out = ImproveOutcome {
        core: lazy,
        new_ub: None,
        probes: 0,
        interrupted: false,
    };
    if strategy == CoreStrategy::Lazy {
        return out;
    }
    let components = oracle.components().to_vec();
    let mut candidates: Vec<usize> = (0..components.len())
        .filter(|&i| out.core[i] < components[i].max_level())
        .collect();
    let current_ub = |out: &ImproveOutcome| match &out.new_ub {
        Some((c, _)) => Some(*c),
        None => ub,
    };
    loop {
        if strategy == CoreStrategy::CostBounded && current_ub(&out).is_some_and(|u| out.core.cost() >= u) {
            break;
        }
        let Some(pos) = (0..candidates.len()).min_by_key(|&p| (out.core[candidates[p]], candidates[p])) else {
            break;
        };
        if deadline.is_some_and(|d| Instant::now() >= d) {
            out.interrupted = true;
            break;
        }
        let i = candidates[pos];
        let f = &components[i];
        let old = out.core[i];
        let next = f.levels()[f.level_index(old).expect("core value is a level") + 1];
        out.core[i] = next;
        out.probes += 1;
        let Some(answer) = oracle.solve_until(&out.core, deadline) else {
            out.core[i] = old;
            out.interrupted = true;
            break;
        };
        match answer {
            Induced::Unsat { .. } => {
                if next == f.max_level() {
                    candidates.remove(pos);
                }
            }
            Induced::Sat { assignment, vector } => {
                out.core[i] = old;
                candidates.remove(pos);
                let c = vector.cost();
                if current_ub(&out).map_or(true, |u| c < u) {
                    out.new_ub = Some((c, assignment));
                }
                if strategy == CoreStrategy::PartialMax {
                    break;
                }
            }
        }
    }
    out
}

fn lazy_core_of(h: &CostVector, oracle: &mut InducedCsp) -> CostVector {
    match oracle.solve(h) {
        Induced::Unsat { core } => core,
        Induced::Sat { .. } => panic!("{h} is a solution vector, not a core"),
    }
}

/// The oracle's lazy core for `h`. Panics if `h` is not a core.
pub fn improve_lazy(h: &CostVector, oracle: &mut InducedCsp) -> ImproveOutcome {
    let lazy = lazy_core_of(h, oracle);
    improve_from_core(CoreStrategy::Lazy, lazy, None, oracle, None)
}

/// Raises until the core's cost reaches `ub`.
pub fn improve_cost_bounded(h: &CostVector, ub: Option<Cost>, oracle: &mut InducedCsp) -> ImproveOutcome {
    let lazy = lazy_core_of(h, oracle);
    improve_from_core(CoreStrategy::CostBounded, lazy, ub, oracle, None)
}

/// Raises until the first satisfiable probe.
pub fn improve_partial_maximal(h: &CostVector, oracle: &mut InducedCsp) -> ImproveOutcome {
    let lazy = lazy_core_of(h, oracle);
    improve_from_core(CoreStrategy::PartialMax, lazy, None, oracle, None)
}

/// Raises until the core is maximal.
pub fn improve_maximal(h: &CostVector, oracle: &mut InducedCsp) -> ImproveOutcome {
    let lazy = lazy_core_of(h, oracle);
    improve_from_core(CoreStrategy::Maximal, lazy, None, oracle, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFunction, HardConstraint, WcspInstance};

    fn unary(var: usize, costs: &[Cost]) -> CostFunction {
        CostFunction::new(
            vec![var],
            vec![costs.len() as u32],
            0,
            costs.iter().enumerate().map(|(a, &c)| (vec![a as u32], c)),
            1000,
        )
        .unwrap()
    }

    /// One variable with values {0,1,2}, f(a) = a, values 0 and 1 forbidden.
    fn forced_two() -> WcspInstance {
        let hc = HardConstraint::new(vec![0], [vec![0], vec![1]]);
        WcspInstance::new("forced", vec![3], vec![hc], vec![unary(0, &[0, 1, 2])], 1000).unwrap()
    }

    #[test]
    fn maximal_on_forced_instance() {
        let w = forced_two();
        let mut o = InducedCsp::from_instance(&w);
        let h = CostVector(vec![0]);
        let lazy = improve_lazy(&h, &mut o);
        assert_eq!(lazy.core.0, vec![0]);
        assert_eq!(lazy.probes, 0);
        let max = improve_maximal(&h, &mut o);
        assert_eq!(max.core.0, vec![1]);
        assert_eq!(max.probes, 2);
        assert_eq!(max.new_ub.as_ref().map(|u| u.0), Some(2));
    }

    #[test]
    fn lazy_is_deterministic() {
        let w = forced_two();
        let mut o = InducedCsp::from_instance(&w);
        let h = CostVector(vec![0]);
        assert_eq!(improve_lazy(&h, &mut o), improve_lazy(&h, &mut o));
    }

    /// x, y in {0,1,2}; f1(x) = x, f2(y) = y; hard: x + y >= 2.
    fn sum_two() -> WcspInstance {
        let forbidden = [[0, 0], [0, 1], [1, 0]].map(|t| t.to_vec());
        let hc = HardConstraint::new(vec![0, 1], forbidden);
        WcspInstance::new(
            "sum2",
            vec![3, 3],
            vec![hc],
            vec![unary(0, &[0, 1, 2]), unary(1, &[0, 1, 2])],
            1000,
        )
        .unwrap()
    }

    #[test]
    fn cost_bounded_stops_at_bound() {
        let w = sum_two();
        let mut o = InducedCsp::from_instance(&w);
        let h = CostVector(vec![0, 0]);
        // neither bound alone is a core, so the lazy core is h itself
        assert_eq!(improve_lazy(&h, &mut o).core.0, vec![0, 0]);
        let r = improve_cost_bounded(&h, Some(0), &mut o);
        assert_eq!((r.core.0.clone(), r.probes), (vec![0, 0], 0));
        // x -> 1 is still a core and reaches the bound
        let r = improve_cost_bounded(&h, Some(1), &mut o);
        assert_eq!((r.core.0.clone(), r.probes), (vec![1, 0], 1));
        let r = improve_cost_bounded(&h, None, &mut o);
        assert_eq!(r.core, improve_maximal(&h, &mut o).core);
    }

    #[test]
    fn partial_max_stops_at_first_solution() {
        let w = sum_two();
        let mut o = InducedCsp::from_instance(&w);
        let h = CostVector(vec![0, 0]);
        // x -> 1 unsat (kept), y -> 1 sat: stop after one accepted raise
        let r = improve_partial_maximal(&h, &mut o);
        assert_eq!(r.core.0, vec![1, 0]);
        assert_eq!(r.probes, 2);
        assert_eq!(r.new_ub.as_ref().map(|u| u.0), Some(2));
        // maximal also tries x -> 2, which is sat
        let m = improve_maximal(&h, &mut o);
        assert_eq!(m.core.0, vec![1, 0]);
        assert_eq!(m.probes, 3);
    }

    #[test]
    fn partial_max_immediate_stop() {
        // first raise is already a solution
        let hc = HardConstraint::new(vec![0], [vec![0]]);
        let w = WcspInstance::new("one", vec![3], vec![hc], vec![unary(0, &[0, 1, 2])], 1000).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        let h = CostVector(vec![0]);
        let r = improve_partial_maximal(&h, &mut o);
        assert_eq!(r.core, improve_lazy(&h, &mut o).core);
        assert_eq!(r.probes, 1);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in CoreStrategy::ALL {
            assert_eq!(s.name().parse::<CoreStrategy>().unwrap(), s);
        }
        assert!("greedy".parse::<CoreStrategy>().is_err());
    }

    #[test]
    #[should_panic]
    fn lazy_on_solution_vector_panics() {
        let w = forced_two();
        let mut o = InducedCsp::from_instance(&w);
        improve_lazy(&CostVector(vec![2]), &mut o);
    }
}

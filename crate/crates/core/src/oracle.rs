//! CNF encoding of induced CSPs and the incremental oracle built on it.
//!
//! Every variable `x` gets one literal per value ("x = a") with an
//! exactly-one constraint. Every component `i` with levels
//! `l_0 < l_1 < ... < l_r` gets selectors `s_0 .. s_{r-1}` where `s_j` means
//! "f_i ≤ l_j", chained by `s_j → s_{j+1}`. A tuple costing `l_j` (j ≥ 1)
//! is excluded by the single clause `¬s_{j-1} ∨ ¬tuple`, so bounding the
//! component by any level below `l_j` forbids it through the chain. Hard
//! constraints are plain clauses without selectors.
//!
//! A cost vector is queried by assuming one selector per component (none
//! for components at their top level). Failed assumptions map back to the
//! components involved in the conflict, which yields a lazy core for free.

use std::time::Instant;

use crate::merge::MergedProblem;
use crate::model::{Assignment, Cost, CostFunction, CostVector, WcspInstance};
use crate::sat::{Lit, SatResult, SatSolver};

/// How each variable's at-most-one constraint is encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmoEncoding {
    /// All pairs of value literals.
    #[default]
    Pairwise,
    /// Sequential counter with auxiliary variables, linear in the domain size.
    Sequential,
}

/// Answer of the oracle for one cost vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Induced {
    /// The induced CSP has a solution; `vector` holds its per-component costs.
    Sat { assignment: Assignment, vector: CostVector },
    /// The induced CSP is unsatisfiable; `core` is the lazy core.
    Unsat { core: CostVector },
}

impl Induced {
    pub fn is_sat(&self) -> bool {
        matches!(self, Induced::Sat { .. })
    }
}

/// Encoded induced CSP over the components of a (possibly merged) problem,
/// owning its SAT solver.
#[derive(Debug, Clone)]
pub struct InducedCsp {
    solver: SatSolver,
    values: Vec<Vec<Lit>>,
    selectors: Vec<Vec<Lit>>,
    components: Vec<CostFunction>,
    calls: u64,
}

impl InducedCsp {
    /// Encodes the components of `problem` together with the base
    /// instance's hard constraints.
    pub fn new(problem: &MergedProblem) -> Self {
        Self::with_options(problem.base(), problem.components(), AmoEncoding::default(), 0)
    }

    /// Encodes an instance with one component per cost function.
    pub fn from_instance(w: &WcspInstance) -> Self {
        Self::with_options(w, &w.cost_functions, AmoEncoding::default(), 0)
    }

    pub fn with_options(w: &WcspInstance, components: &[CostFunction], amo: AmoEncoding, seed: u64) -> Self {
        let mut solver = SatSolver::with_seed(seed);
        let mut values = Vec::with_capacity(w.num_vars());
        for &d in &w.domains {
            let lits: Vec<Lit> = (0..d).map(|_| Lit::pos(solver.new_var())).collect();
            solver.add_clause(&lits);
            match amo {
                AmoEncoding::Pairwise => {
                    for (i, &a) in lits.iter().enumerate() {
                        for &b in &lits[i + 1..] {
                            solver.add_clause(&[!a, !b]);
                        }
                    }
                }
                AmoEncoding::Sequential => sequential_amo(&mut solver, &lits),
            }
            values.push(lits);
        }

        let tuple_clause = |scope: &[usize], tuple: &[u32]| -> Vec<Lit> {
            scope.iter().zip(tuple).map(|(&x, &a)| !values[x][a as usize]).collect()
        };
        for hc in &w.hard_constraints {
            for t in &hc.forbidden {
                solver.add_clause(&tuple_clause(&hc.scope, t));
            }
        }

        let mut selectors = Vec::with_capacity(components.len());
        for f in components {
            let levels = f.levels();
            let sel: Vec<Lit> = (0..levels.len().saturating_sub(1))
                .map(|_| Lit::pos(solver.new_var()))
                .collect();
            for pair in sel.windows(2) {
                solver.add_clause(&[!pair[0], pair[1]]);
            }
            for (tuple, cost) in f.full_table() {
                let j = f.level_index(cost).expect("every tuple cost is a level");
                if j == 0 {
                    continue;
                }
                let mut clause = tuple_clause(f.scope(), &tuple);
                clause.push(!sel[j - 1]);
                solver.add_clause(&clause);
            }
            selectors.push(sel);
        }

        InducedCsp {
            solver,
            values,
            selectors,
            components: components.to_vec(),
            calls: 0,
        }
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[CostFunction] {
        &self.components
    }

    /// Number of induced-CSP queries answered so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn sat_solver(&self) -> &SatSolver {
        &self.solver
    }

    /// Componentwise maximum levels: the vector that constrains nothing.
    pub fn top_vector(&self) -> CostVector {
        self.components.iter().map(CostFunction::max_level).collect()
    }

    /// Componentwise minimum levels.
    pub fn baseline(&self) -> CostVector {
        self.components.iter().map(CostFunction::min_level).collect()
    }

    fn assumptions(&self, v: &CostVector) -> Vec<Lit> {
        assert_eq!(v.len(), self.components.len(), "vector length mismatch");
        v.iter()
            .zip(&self.components)
            .zip(&self.selectors)
            .filter_map(|((&vi, f), sel)| {
                let j = f
                    .level_index(vi)
                    .unwrap_or_else(|| panic!("{vi} is not a level of its component"));
                sel.get(j).copied()
            })
            .collect()
    }

    /// Decides the CSP induced by `v`.
    pub fn solve(&mut self, v: &CostVector) -> Induced {
        self.solve_until(v, None).expect("no deadline")
    }

    /// Like [`InducedCsp::solve`], returning `None` if `deadline` passes first.
    pub fn solve_until(&mut self, v: &CostVector, deadline: Option<Instant>) -> Option<Induced> {
        let assumptions = self.assumptions(v);
        self.calls += 1;
        match self.solver.solve_until(&assumptions, deadline)? {
            SatResult::Sat(model) => {
                let assignment = Assignment(
                    self.values
                        .iter()
                        .map(|lits| {
                            lits.iter()
                                .position(|l| model[l.var() as usize])
                                .expect("exactly one value is true") as u32
                        })
                        .collect(),
                );
                let vector = self.components.iter().map(|f| f.cost(&assignment)).collect();
                Some(Induced::Sat { assignment, vector })
            }
            SatResult::Unsat(failed) => {
                let core = self
                    .components
                    .iter()
                    .zip(&self.selectors)
                    .enumerate()
                    .map(|(i, (f, sel))| {
                        if sel.iter().any(|s| failed.contains(s)) {
                            v[i]
                        } else {
                            f.max_level()
                        }
                    })
                    .collect();
                Some(Induced::Unsat { core })
            }
        }
    }

    /// True if the CSP without any cost bound (all components at their
    /// maximum level) has a solution.
    pub fn is_feasible(&mut self) -> bool {
        let top = self.top_vector();
        self.solve(&top).is_sat()
    }
}

fn sequential_amo(solver: &mut SatSolver, lits: &[Lit]) {
    if lits.len() < 2 {
        return;
    }
    let aux: Vec<Lit> = (0..lits.len() - 1).map(|_| Lit::pos(solver.new_var())).collect();
    solver.add_clause(&[!lits[0], aux[0]]);
    for i in 1..lits.len() - 1 {
        solver.add_clause(&[!lits[i], aux[i]]);
        solver.add_clause(&[!aux[i - 1], aux[i]]);
        solver.add_clause(&[!lits[i], !aux[i - 1]]);
    }
    solver.add_clause(&[!lits[lits.len() - 1], !aux[lits.len() - 2]]);
}

/// True iff some feasible assignment has every component cost within `v`.
/// Enumerates all assignments; meant for tests on tiny instances.
pub fn induced_by_enumeration(w: &WcspInstance, components: &[CostFunction], v: &[Cost]) -> bool {
    crate::model::TupleIter::new(&w.domains).any(|values| {
        let a = Assignment(values);
        w.is_feasible(&a) && components.iter().zip(v).all(|(f, &vi)| f.cost(&a) <= vi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HardConstraint;

    fn unary(domain: u32, costs: &[Cost]) -> CostFunction {
        CostFunction::new(
            vec![0],
            vec![domain],
            0,
            costs.iter().enumerate().map(|(a, &c)| (vec![a as u32], c)),
            100,
        )
        .unwrap()
    }

    #[test]
    fn bound_forces_value() {
        let w = WcspInstance::new("u", vec![2], vec![], vec![unary(2, &[0, 1])], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        match o.solve(&CostVector(vec![0])) {
            Induced::Sat { assignment, vector } => {
                assert_eq!(assignment.0, vec![0]);
                assert_eq!(vector.0, vec![0]);
            }
            r => panic!("unexpected {r:?}"),
        }
        match o.solve(&CostVector(vec![1])) {
            Induced::Sat { vector, .. } => assert!(vector[0] <= 1),
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn minimum_level_above_zero() {
        let w = WcspInstance::new("u", vec![2], vec![], vec![unary(2, &[1, 2])], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        assert_eq!(o.baseline().0, vec![1]);
        match o.solve(&CostVector(vec![1])) {
            Induced::Sat { assignment, vector } => {
                assert_eq!(assignment.0, vec![0]);
                assert_eq!(vector.0, vec![1]);
            }
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn hard_constraint_clause() {
        let hc = HardConstraint::new(vec![0, 1], [vec![0, 0]]);
        let w = WcspInstance::new("h", vec![1, 1], vec![hc], vec![], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        assert!(!o.is_feasible());
    }

    #[test]
    fn chain_forbids_expensive_tuples_at_every_lower_bound() {
        // f(x, y) with levels {0, 3, 7}
        let f = CostFunction::new(
            vec![0, 1],
            vec![2, 2],
            0,
            [(vec![0, 1], 3), (vec![1, 0], 7), (vec![1, 1], 7)],
            100,
        )
        .unwrap();
        assert_eq!(f.levels(), &[0, 3, 7]);
        let w = WcspInstance::new("chain", vec![2, 2], vec![], vec![f.clone()], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        for bound in [0, 3, 7] {
            let r = o.solve(&CostVector(vec![bound]));
            assert_eq!(r.is_sat(), induced_by_enumeration(&w, &[f.clone()], &[bound]));
            if let Induced::Sat { assignment, vector } = r {
                assert!(vector[0] <= bound);
                assert_eq!(w.evaluate(&assignment).vector, vector);
            }
        }
        // forbid the cost-0 tuple: now only bound 3 and above are satisfiable
        let hc = HardConstraint::new(vec![0, 1], [vec![0, 0]]);
        let w = WcspInstance::new("chain", vec![2, 2], vec![hc], vec![f.clone()], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        assert!(!o.solve(&CostVector(vec![0])).is_sat());
        assert!(o.solve(&CostVector(vec![3])).is_sat());
        assert!(o.solve(&CostVector(vec![7])).is_sat());
    }

    #[test]
    fn lazy_core_only_names_the_conflicting_function() {
        // f1 on x: x=0 costs 1, x=1 is forbidden; f2 on y is unconstrained
        let hc = HardConstraint::new(vec![0], [vec![1]]);
        let f1 = unary(2, &[1, 0]);
        let f2 = CostFunction::new(vec![1], vec![2], 0, [(vec![1], 4)], 100).unwrap();
        let w = WcspInstance::new("lazy", vec![2, 2], vec![hc], vec![f1, f2], 100).unwrap();
        let mut o = InducedCsp::from_instance(&w);
        match o.solve(&CostVector(vec![0, 0])) {
            Induced::Unsat { core } => {
                assert_eq!(core.0, vec![0, 4]);
                let mut fresh = InducedCsp::from_instance(&w);
                assert!(!fresh.solve(&core).is_sat());
            }
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn sequential_amo_agrees_with_pairwise() {
        let f = unary(5, &[4, 0, 3, 1, 2]);
        let w = WcspInstance::new("seq", vec![5], vec![], vec![f.clone()], 100).unwrap();
        let mut a = InducedCsp::with_options(&w, &w.cost_functions, AmoEncoding::Pairwise, 0);
        let mut b = InducedCsp::with_options(&w, &w.cost_functions, AmoEncoding::Sequential, 0);
        for &l in f.levels() {
            let v = CostVector(vec![l]);
            assert_eq!(a.solve(&v).is_sat(), b.solve(&v).is_sat());
        }
    }
}

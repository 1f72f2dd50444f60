//! Weighted CSP instances, cost vectors and the domination order over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Deref, DerefMut};

use thiserror::Error;

/// Costs are unsigned integers; sums are accumulated in 64 bits.
pub type Cost = u64;

/// Dense cost tables are cached for functions with at most this many tuples.
const DENSE_CACHE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("top must be at least 1")]
    ZeroTop,
    #[error("variable {0} has an empty domain")]
    EmptyDomain(usize),
    #[error("scope refers to variable {var} but the instance has {num_vars} variables")]
    ScopeOutOfRange { var: usize, num_vars: usize },
    #[error("variable {0} occurs twice in a scope")]
    RepeatedVariable(usize),
    #[error("tuple {tuple:?} does not fit scope {scope:?}")]
    BadTuple { scope: Vec<usize>, tuple: Vec<u32> },
    #[error("cost {cost} is not below top {top}")]
    CostNotBelowTop { cost: Cost, top: Cost },
    #[error("function declares domain sizes {declared:?} but the instance has {actual:?}")]
    DomainMismatch { declared: Vec<u32>, actual: Vec<u32> },
}

fn check_scope(scope: &[usize], num_vars: usize) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for &var in scope {
        if var >= num_vars {
            return Err(ModelError::ScopeOutOfRange { var, num_vars });
        }
        if !seen.insert(var) {
            return Err(ModelError::RepeatedVariable(var));
        }
    }
    Ok(())
}

fn check_tuple(scope: &[usize], dims: &[u32], tuple: &[u32]) -> Result<(), ModelError> {
    if tuple.len() != dims.len() || tuple.iter().zip(dims).any(|(&a, &d)| a >= d) {
        return Err(ModelError::BadTuple {
            scope: scope.to_vec(),
            tuple: tuple.to_vec(),
        });
    }
    Ok(())
}

/// Number of tuples over the given domain sizes, saturating on overflow.
pub fn tuple_count(dims: &[u32]) -> u64 {
    dims.iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .unwrap_or(u64::MAX)
}

/// Iterates over every tuple of a mixed-radix space in lexicographic order
/// (last position varies fastest).
pub struct TupleIter {
    dims: Vec<u32>,
    next: Option<Vec<u32>>,
}

impl TupleIter {
    pub fn new(dims: &[u32]) -> Self {
        let next = if dims.iter().any(|&d| d == 0) {
            None
        } else {
            Some(vec![0; dims.len()])
        };
        TupleIter {
            dims: dims.to_vec(),
            next,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.dims[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// A set of forbidden tuples over a scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardConstraint {
    pub scope: Vec<usize>,
    pub forbidden: BTreeSet<Vec<u32>>,
}

impl HardConstraint {
    pub fn new(scope: Vec<usize>, forbidden: impl IntoIterator<Item = Vec<u32>>) -> Self {
        HardConstraint {
            scope,
            forbidden: forbidden.into_iter().collect(),
        }
    }

    /// True if the assignment is *not* forbidden by this constraint.
    pub fn allows(&self, assignment: &[u32]) -> bool {
        let tuple: Vec<u32> = self.scope.iter().map(|&x| assignment[x]).collect();
        !self.forbidden.contains(&tuple)
    }
}

/// A table-defined cost function: listed tuples carry their explicit cost,
/// every other tuple of the scope costs `default_cost`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFunction {
    scope: Vec<usize>,
    dims: Vec<u32>,
    default_cost: Cost,
    tuples: BTreeMap<Vec<u32>, Cost>,
    levels: Vec<Cost>,
    dense: Option<Vec<Cost>>,
}

impl CostFunction {
    /// Builds a cost function. `dims` holds the domain size of each scope
    /// variable. All costs must be below `top`.
    pub fn new(
        scope: Vec<usize>,
        dims: Vec<u32>,
        default_cost: Cost,
        tuples: impl IntoIterator<Item = (Vec<u32>, Cost)>,
        top: Cost,
    ) -> Result<Self, ModelError> {
        if scope.len() != dims.len() {
            return Err(ModelError::BadTuple { scope, tuple: dims });
        }
        let mut table = BTreeMap::new();
        for (tuple, cost) in tuples {
            check_tuple(&scope, &dims, &tuple)?;
            if cost >= top {
                return Err(ModelError::CostNotBelowTop { cost, top });
            }
            table.insert(tuple, cost);
        }
        if default_cost >= top {
            return Err(ModelError::CostNotBelowTop {
                cost: default_cost,
                top,
            });
        }
        let mut levels: BTreeSet<Cost> = table.values().copied().collect();
        if (table.len() as u64) < tuple_count(&dims) {
            levels.insert(default_cost);
        }
        let dense = (tuple_count(&dims) <= DENSE_CACHE_LIMIT).then(|| {
            TupleIter::new(&dims)
                .map(|t| table.get(&t).copied().unwrap_or(default_cost))
                .collect()
        });
        Ok(CostFunction {
            scope,
            dims,
            default_cost,
            tuples: table,
            levels: levels.into_iter().collect(),
            dense,
        })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn default_cost(&self) -> Cost {
        self.default_cost
    }

    /// Explicitly listed tuples, in lexicographic order.
    pub fn explicit_tuples(&self) -> &BTreeMap<Vec<u32>, Cost> {
        &self.tuples
    }

    /// Distinct costs taken by the function, strictly increasing.
    pub fn levels(&self) -> &[Cost] {
        &self.levels
    }

    pub fn min_level(&self) -> Cost {
        self.levels.first().copied().unwrap_or(0)
    }

    pub fn max_level(&self) -> Cost {
        self.levels.last().copied().unwrap_or(0)
    }

    /// Position of `cost` in the level list.
    pub fn level_index(&self, cost: Cost) -> Option<usize> {
        self.levels.binary_search(&cost).ok()
    }

    /// Cost of a tuple over the function's own scope.
    pub fn tuple_cost(&self, tuple: &[u32]) -> Cost {
        if let Some(dense) = &self.dense {
            let mut index = 0usize;
            for (&a, &d) in tuple.iter().zip(&self.dims) {
                index = index * d as usize + a as usize;
            }
            return dense[index];
        }
        self.tuples.get(tuple).copied().unwrap_or(self.default_cost)
    }

    /// Cost of a full assignment to the instance variables.
    pub fn cost(&self, assignment: &[u32]) -> Cost {
        if let Some(dense) = &self.dense {
            let mut index = 0usize;
            for (&x, &d) in self.scope.iter().zip(&self.dims) {
                index = index * d as usize + assignment[x] as usize;
            }
            return dense[index];
        }
        let tuple: Vec<u32> = self.scope.iter().map(|&x| assignment[x]).collect();
        self.tuple_cost(&tuple)
    }

    /// Every tuple of the scope with its cost, in lexicographic order.
    pub fn full_table(&self) -> impl Iterator<Item = (Vec<u32>, Cost)> + '_ {
        TupleIter::new(&self.dims).map(move |t| {
            let c = self.tuple_cost(&t);
            (t, c)
        })
    }
}

/// A weighted CSP: variables with finite domains, hard constraints, cost
/// functions, and a constant cost collected from folded constant functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcspInstance {
    pub name: String,
    pub domains: Vec<u32>,
    pub hard_constraints: Vec<HardConstraint>,
    pub cost_functions: Vec<CostFunction>,
    pub top: Cost,
    pub offset: Cost,
}

impl WcspInstance {
    pub fn new(
        name: impl Into<String>,
        domains: Vec<u32>,
        hard_constraints: Vec<HardConstraint>,
        cost_functions: Vec<CostFunction>,
        top: Cost,
    ) -> Result<Self, ModelError> {
        let instance = WcspInstance {
            name: name.into(),
            domains,
            hard_constraints,
            cost_functions,
            top,
            offset: 0,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn with_offset(mut self, offset: Cost) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.top == 0 {
            return Err(ModelError::ZeroTop);
        }
        if let Some(x) = self.domains.iter().position(|&d| d == 0) {
            return Err(ModelError::EmptyDomain(x));
        }
        let n = self.num_vars();
        for hc in &self.hard_constraints {
            check_scope(&hc.scope, n)?;
            let dims = self.scope_dims(&hc.scope);
            for t in &hc.forbidden {
                check_tuple(&hc.scope, &dims, t)?;
            }
        }
        for f in &self.cost_functions {
            check_scope(f.scope(), n)?;
            let dims = self.scope_dims(f.scope());
            if dims != f.dims() {
                return Err(ModelError::DomainMismatch {
                    declared: f.dims().to_vec(),
                    actual: dims,
                });
            }
            if f.max_level() >= self.top {
                return Err(ModelError::CostNotBelowTop {
                    cost: f.max_level(),
                    top: self.top,
                });
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_functions(&self) -> usize {
        self.cost_functions.len()
    }

    pub fn scope_dims(&self, scope: &[usize]) -> Vec<u32> {
        scope.iter().map(|&x| self.domains[x]).collect()
    }

    /// Level sets of every cost function, in function order.
    pub fn level_sets(&self) -> Vec<Vec<Cost>> {
        self.cost_functions.iter().map(|f| f.levels().to_vec()).collect()
    }

    pub fn is_feasible(&self, assignment: &Assignment) -> bool {
        self.hard_constraints.iter().all(|hc| hc.allows(assignment))
    }

    /// Evaluates a full assignment against every constraint and function.
    pub fn evaluate(&self, assignment: &Assignment) -> Evaluation {
        debug_assert_eq!(assignment.len(), self.num_vars());
        let vector: CostVector = self.cost_functions.iter().map(|f| f.cost(assignment)).collect();
        let total = self.offset + vector.cost();
        Evaluation {
            feasible: self.is_feasible(assignment),
            vector,
            total,
        }
    }
}

/// Outcome of evaluating an assignment: feasibility, the per-function
/// solution vector, and the total cost including the instance offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub feasible: bool,
    pub vector: CostVector,
    pub total: Cost,
}

/// One value per instance variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment(pub Vec<u32>);

impl Deref for Assignment {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Assignment {
    fn from(values: Vec<u32>) -> Self {
        Assignment(values)
    }
}

/// A vector with one cost per (possibly merged) cost function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CostVector(pub Vec<Cost>);

impl CostVector {
    pub fn new(values: Vec<Cost>) -> Self {
        CostVector(values)
    }

    pub fn cost(&self) -> Cost {
        self.0.iter().sum()
    }

    /// True iff `other ≤ self` componentwise.
    ///
    /// Panics if the lengths differ.
    pub fn dominates(&self, other: &CostVector) -> bool {
        assert_eq!(self.len(), other.len(), "comparing vectors of different length");
        self.iter().zip(other.iter()).all(|(v, u)| u <= v)
    }
}

impl Deref for CostVector {
    type Target = Vec<Cost>;
    fn deref(&self) -> &Vec<Cost> {
        &self.0
    }
}

impl DerefMut for CostVector {
    fn deref_mut(&mut self) -> &mut Vec<Cost> {
        &mut self.0
    }
}

impl From<Vec<Cost>> for CostVector {
    fn from(values: Vec<Cost>) -> Self {
        CostVector(values)
    }
}

impl FromIterator<Cost> for CostVector {
    fn from_iter<I: IntoIterator<Item = Cost>>(iter: I) -> Self {
        CostVector(iter.into_iter().collect())
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Vectors of `set` not dominated by another member; equal vectors are kept once.
pub fn maximal_subset(set: &[CostVector]) -> Vec<CostVector> {
    let mut out: Vec<CostVector> = Vec::new();
    for (i, v) in set.iter().enumerate() {
        let dominated = set.iter().enumerate().any(|(j, u)| j != i && u != v && u.dominates(v));
        if !dominated && !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Antichain of cores. Inserting a vector drops members it dominates and is
/// refused if an existing member dominates it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoreSet {
    cores: Vec<CostVector>,
}

impl CoreSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the vector was already dominated.
    pub fn insert(&mut self, core: CostVector) -> bool {
        if self.cores.iter().any(|k| k.dominates(&core)) {
            return false;
        }
        self.cores.retain(|k| !core.dominates(k));
        self.cores.push(core);
        true
    }

    /// True iff `h` is dominated by no member.
    pub fn hits(&self, h: &CostVector) -> bool {
        hits(h, &self.cores)
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CostVector> {
        self.cores.iter()
    }

    pub fn as_slice(&self) -> &[CostVector] {
        &self.cores
    }
}

impl<'a> IntoIterator for &'a CoreSet {
    type Item = &'a CostVector;
    type IntoIter = std::slice::Iter<'a, CostVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.cores.iter()
    }
}

/// True iff every core has a component strictly below the matching component of `h`.
pub fn hits(h: &CostVector, cores: &[CostVector]) -> bool {
    cores.iter().all(|k| h.iter().zip(k.iter()).any(|(hi, ki)| hi > ki))
}

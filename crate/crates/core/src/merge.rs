//! Cost-function merging.
//!
//! Functions are grouped along the clusters of a min-fill tree
//! decomposition of the primal graph, and every group whose joint scope is
//! small enough is replaced by one tabulated function holding the summed
//! costs. The IHS loop then works with one vector component per group.

use std::collections::BTreeSet;

use crate::model::{tuple_count, Assignment, Cost, CostFunction, CostVector, TupleIter, WcspInstance};

/// Default limit on the number of assignments of a merged scope.
pub const DEFAULT_MERGE_CAP: u64 = 4096;

/// Undirected graph over instance variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl PrimalGraph {
    pub fn new(num_vertices: usize) -> Self {
        PrimalGraph {
            adjacency: vec![BTreeSet::new(); num_vertices],
        }
    }

    /// One edge per pair of variables sharing a cost-function scope.
    pub fn from_instance(w: &WcspInstance) -> Self {
        let mut g = PrimalGraph::new(w.num_vars());
        for f in &w.cost_functions {
            g.add_clique(f.scope());
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adjacency[a].insert(b);
            self.adjacency[b].insert(a);
        }
    }

    pub fn add_clique(&mut self, vertices: &[usize]) {
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                self.add_edge(a, b);
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }
}

/// An elimination order with the cluster created by each elimination
/// (`clusters[i]` belongs to `order[i]`: the vertex plus its neighbours at
/// elimination time, sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub order: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy min-fill elimination; ties go to the lowest vertex index.
pub fn min_fill_order(graph: &PrimalGraph) -> Elimination {
    let mut adj = graph.adjacency.clone();
    let mut alive: BTreeSet<usize> = (0..graph.num_vertices()).collect();
    let mut order = Vec::with_capacity(alive.len());
    let mut clusters = Vec::with_capacity(alive.len());
    while let Some(v) = alive.iter().copied().min_by_key(|&v| (fill_in(&adj, v), v)) {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        adj[v].clear();
        alive.remove(&v);
        let mut cluster = nb;
        cluster.push(v);
        cluster.sort_unstable();
        order.push(v);
        clusters.push(cluster);
    }
    Elimination { order, clusters }
}

/// The vector space the IHS loop works in: one component per group of
/// original cost functions.
#[derive(Debug, Clone)]
pub struct MergedProblem {
    base: WcspInstance,
    clusters: Vec<Vec<usize>>,
    components: Vec<CostFunction>,
    fallbacks: usize,
}

impl MergedProblem {
    /// Every function is its own component.
    pub fn unmerged(w: &WcspInstance) -> Self {
        MergedProblem {
            base: w.clone(),
            clusters: (0..w.num_functions()).map(|i| vec![i]).collect(),
            components: w.cost_functions.clone(),
            fallbacks: 0,
        }
    }

    /// Groups functions by decomposition cluster and tabulates every group
    /// whose merged scope has at most `cap` assignments. Larger groups stay
    /// unmerged and are counted in [`MergedProblem::fallbacks`].
    pub fn build(w: &WcspInstance, cap: u64) -> Self {
        let elim = min_fill_order(&PrimalGraph::from_instance(w));
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); elim.clusters.len()];
        for (fi, f) in w.cost_functions.iter().enumerate() {
            let home = elim
                .clusters
                .iter()
                .enumerate()
                .filter(|(_, c)| f.scope().iter().all(|x| c.binary_search(x).is_ok()))
                .min_by_key(|(i, c)| (c.len(), *i))
                .map(|(i, _)| i);
            match home {
                Some(i) => groups[i].push(fi),
                // zero-variable instances have no clusters
                None => groups.push(vec![fi]),
            }
        }

        let mut clusters = Vec::new();
        let mut fallbacks = 0;
        for group in groups.into_iter().filter(|g| !g.is_empty()) {
            if group.len() == 1 {
                clusters.push(group);
                continue;
            }
            let scope: BTreeSet<usize> = group
                .iter()
                .flat_map(|&fi| w.cost_functions[fi].scope().iter().copied())
                .collect();
            let dims = w.scope_dims(&scope.iter().copied().collect::<Vec<_>>());
            if tuple_count(&dims) <= cap {
                clusters.push(group);
            } else {
                fallbacks += 1;
                clusters.extend(group.into_iter().map(|fi| vec![fi]));
            }
        }
        clusters.sort_by_key(|c| c[0]);
        let components = clusters.iter().map(|c| merge_functions(w, c)).collect();
        MergedProblem {
            base: w.clone(),
            clusters,
            components,
            fallbacks,
        }
    }

    pub fn base(&self) -> &WcspInstance {
        &self.base
    }

    /// Original function indices behind each component, sorted.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn components(&self) -> &[CostFunction] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Number of groups left unmerged because they exceeded the cap.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    pub fn level_sets(&self) -> Vec<Vec<Cost>> {
        self.components.iter().map(|f| f.levels().to_vec()).collect()
    }

    /// Per-component costs of an assignment.
    pub fn vector_of(&self, a: &Assignment) -> CostVector {
        self.components.iter().map(|f| f.cost(a)).collect()
    }
}

/// Tabulates the sum of the given functions over the union of their scopes.
fn merge_functions(w: &WcspInstance, members: &[usize]) -> CostFunction {
    if let [single] = members {
        return w.cost_functions[*single].clone();
    }
    let scope: Vec<usize> = members
        .iter()
        .flat_map(|&fi| w.cost_functions[fi].scope().iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dims = w.scope_dims(&scope);
    let mut full = vec![0u32; w.num_vars()];
    let table: Vec<(Vec<u32>, Cost)> = TupleIter::new(&dims)
        .map(|t| {
            for (&x, &a) in scope.iter().zip(&t) {
                full[x] = a;
            }
            let c = members.iter().map(|&fi| w.cost_functions[fi].cost(&full)).sum();
            (t, c)
        })
        .collect();
    let default = table.iter().map(|(_, c)| *c).min().unwrap_or(0);
    let top = w.top.max(table.iter().map(|(_, c)| c + 1).max().unwrap_or(1));
    let explicit = table.into_iter().filter(|&(_, c)| c != default);
    CostFunction::new(scope, dims, default, explicit, top).expect("merged table is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_no_fill() {
        let mut g = PrimalGraph::new(3);
        g.add_clique(&[0, 1, 2]);
        let e = min_fill_order(&g);
        assert_eq!(e.order, vec![0, 1, 2]);
        assert_eq!(e.clusters[0], vec![0, 1, 2]);
    }

    #[test]
    fn star_eliminates_leaves_first() {
        let mut g = PrimalGraph::new(5);
        for leaf in 1..5 {
            g.add_edge(0, leaf);
        }
        let e = min_fill_order(&g);
        // the centre would need C(4,2) = 6 fill edges, so leaves go first
        assert_eq!(&e.order[..3], &[1, 2, 3]);
        for (v, c) in e.order.iter().zip(&e.clusters).take(3) {
            assert_eq!(c, &vec![0, *v]);
        }
    }

    #[test]
    fn empty_graph_singletons() {
        let e = min_fill_order(&PrimalGraph::new(3));
        assert_eq!(e.clusters, vec![vec![0], vec![1], vec![2]]);
    }

    fn binary(x: usize, y: usize, costs: [Cost; 4]) -> CostFunction {
        let table = [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]].into_iter().zip(costs);
        CostFunction::new(vec![x, y], vec![2, 2], 0, table, 100).unwrap()
    }

    #[test]
    fn same_scope_functions_merge() {
        let f1 = binary(0, 1, [0, 1, 2, 3]);
        let f2 = binary(0, 1, [3, 0, 0, 1]);
        let w = WcspInstance::new("same", vec![2, 2], vec![], vec![f1, f2], 100).unwrap();
        let m = MergedProblem::build(&w, DEFAULT_MERGE_CAP);
        assert_eq!(m.clusters(), &[vec![0, 1]]);
        // sums over the four assignments: 3, 1, 2, 4
        assert_eq!(m.components()[0].levels(), &[1, 2, 3, 4]);
        assert_eq!(m.fallbacks(), 0);
    }

    #[test]
    fn disjoint_scopes_stay_apart() {
        let f1 = binary(0, 1, [0, 1, 2, 3]);
        let f2 = binary(2, 3, [3, 0, 0, 1]);
        let w = WcspInstance::new("apart", vec![2; 4], vec![], vec![f1, f2], 100).unwrap();
        let m = MergedProblem::build(&w, DEFAULT_MERGE_CAP);
        assert_eq!(m.clusters(), &[vec![0], vec![1]]);
        assert_eq!(m.components(), w.cost_functions.as_slice());
    }

    #[test]
    fn cap_one_is_unmerged() {
        let f1 = binary(0, 1, [0, 1, 2, 3]);
        let f2 = binary(0, 1, [3, 0, 0, 1]);
        let f3 = binary(1, 2, [1, 0, 0, 1]);
        let w = WcspInstance::new("cap", vec![2; 3], vec![], vec![f1, f2, f3], 100).unwrap();
        let m = MergedProblem::build(&w, 1);
        assert_eq!(m.components(), w.cost_functions.as_slice());
        assert_eq!(m.fallbacks(), 1);
    }

    #[test]
    fn path_merges_into_chained_clusters() {
        let fs = vec![
            binary(0, 1, [0, 1, 2, 3]),
            binary(1, 2, [3, 0, 0, 1]),
            binary(2, 3, [1, 0, 0, 1]),
            binary(1, 3, [0, 0, 2, 0]),
        ];
        let w = WcspInstance::new("path", vec![2; 4], vec![], fs, 100).unwrap();
        let m = MergedProblem::build(&w, DEFAULT_MERGE_CAP);
        assert!(m.num_components() < w.num_functions());
        let mut all: Vec<usize> = m.clusters().concat();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        for values in TupleIter::new(&w.domains) {
            let a = Assignment(values);
            assert_eq!(m.vector_of(&a).cost(), w.evaluate(&a).vector.cost());
        }
    }
}

//! Random instance families: uniform binary WCSPs and scale-free
//! (Barabási-Albert) constraint graphs.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha 0.3,
//! rand 0.8 sampling), so a seed always reproduces the same instance.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Cost, CostFunction, WcspInstance};

/// `(n, d, m, w, t)`: variables, domain size, function count (uniform) or
/// attachment parameter (scale-free), distinct nonzero weights per function,
/// nonzero-cost tuples per function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub d: u32,
    pub m: usize,
    pub w: usize,
    pub t: usize,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(n: usize, d: u32, m: usize, w: usize, t: usize, seed: u64) -> Self {
        GeneratorParams { n, d, m, w, t, seed }
    }

    fn check_common(&self) -> Result<(), GenerateError> {
        if self.n == 0 || self.d == 0 || self.m == 0 || self.w == 0 || self.t == 0 {
            return Err(GenerateError("all parameters must be positive".into()));
        }
        if self.t as u64 > (self.d as u64).pow(2) {
            return Err(GenerateError(format!(
                "t = {} exceeds d^2 = {}",
                self.t,
                (self.d as u64).pow(2)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid generator parameters: {0}")]
pub struct GenerateError(pub String);

/// Weights are drawn from `1..=WEIGHT_UNIVERSE_FACTOR * w`.
pub const WEIGHT_UNIVERSE_FACTOR: u64 = 10;

fn binary_function(rng: &mut ChaCha8Rng, (x, y): (usize, usize), p: &GeneratorParams, top: Cost) -> CostFunction {
    let universe = WEIGHT_UNIVERSE_FACTOR * p.w as u64;
    let mut weights = Vec::with_capacity(p.w);
    let mut seen = BTreeSet::new();
    while weights.len() < p.w {
        let c = rng.gen_range(1..=universe);
        if seen.insert(c) {
            weights.push(c);
        }
    }
    let d = p.d as usize;
    let mut tuples: Vec<usize> = sample(rng, d * d, p.t).into_vec();
    tuples.sort_unstable();
    let table: Vec<(Vec<u32>, Cost)> = tuples
        .into_iter()
        .map(|ix| {
            let c = weights[rng.gen_range(0..weights.len())];
            (vec![(ix / d) as u32, (ix % d) as u32], c)
        })
        .collect();
    CostFunction::new(vec![x, y], vec![p.d, p.d], 0, table, top).expect("generated costs are below top")
}

fn build(class: &str, p: &GeneratorParams, rng: &mut ChaCha8Rng, edges: &[(usize, usize)]) -> WcspInstance {
    let top = edges.len() as Cost * WEIGHT_UNIVERSE_FACTOR * p.w as Cost + 1;
    let functions = edges.iter().map(|&e| binary_function(rng, e, p, top)).collect();
    let name = format!("{class}-{}-{}-{}-{}-{}-s{}", p.n, p.d, p.m, p.w, p.t, p.seed);
    WcspInstance::new(name, vec![p.d; p.n], vec![], functions, top).expect("generated instance is valid")
}

/// Uniform random binary WCSP: `m` distinct scopes out of the `n(n-1)/2`
/// pairs, `t` nonzero tuples per function with costs from `w` per-function weights.
pub fn gen_uniform(p: &GeneratorParams) -> Result<WcspInstance, GenerateError> {
    p.check_common()?;
    let pairs = p.n * (p.n - 1) / 2;
    if p.m > pairs {
        return Err(GenerateError(format!(
            "m = {} exceeds the {pairs} available scopes",
            p.m
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut picked: Vec<usize> = sample(&mut rng, pairs, p.m).into_vec();
    picked.sort_unstable();
    let edges: Vec<(usize, usize)> = picked.into_iter().map(|ix| pair_at(p.n, ix)).collect();
    Ok(build("uniform", p, &mut rng, &edges))
}

/// Maps a pair index in `0..n(n-1)/2` to `(i, j)` with `i < j`, row-major.
fn pair_at(n: usize, mut ix: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if ix < row {
            return (i, i + 1 + ix);
        }
        ix -= row;
    }
    unreachable!("pair index out of range")
}

/// Barabási-Albert edge set: a clique on `m + 1` vertices, then every new
/// vertex links to `m` distinct earlier vertices picked with probability
/// proportional to their current degree.
pub fn barabasi_albert(n: usize, m: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut degree = vec![0u64; n];
    for i in 0..=m.min(n.saturating_sub(1)) {
        for j in (i + 1)..=m.min(n - 1) {
            edges.push((i, j));
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    for v in (m + 1)..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        for _ in 0..m {
            let total: u64 = (0..v).filter(|u| !chosen.contains(u)).map(|u| degree[u]).sum();
            let mut r = rng.gen_range(0..total);
            let target = (0..v)
                .filter(|u| !chosen.contains(u))
                .find(|&u| {
                    if r < degree[u] {
                        true
                    } else {
                        r -= degree[u];
                        false
                    }
                })
                .expect("weighted pick lands on a vertex");
            chosen.push(target);
        }
        chosen.sort_unstable();
        for u in chosen {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    edges
}

/// Scale-free binary WCSP whose constraint graph follows the Barabási-Albert
/// model with attachment parameter `m`.
pub fn gen_scale_free(p: &GeneratorParams) -> Result<WcspInstance, GenerateError> {
    p.check_common()?;
    if p.m >= p.n {
        return Err(GenerateError(format!("m = {} must be below n = {}", p.m, p.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let edges = barabasi_albert(p.n, p.m, &mut rng);
    Ok(build("scale-free", p, &mut rng, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::write_wcsp;

    fn degrees(w: &WcspInstance) -> Vec<usize> {
        let mut deg = vec![0; w.num_vars()];
        for f in &w.cost_functions {
            for &x in f.scope() {
                deg[x] += 1;
            }
        }
        deg
    }

    fn check_uniform_shape(w: &WcspInstance, p: &GeneratorParams) {
        assert_eq!(w.num_vars(), p.n);
        assert!(w.domains.iter().all(|&d| d == p.d));
        assert_eq!(w.num_functions(), p.m);
        let scopes: BTreeSet<_> = w.cost_functions.iter().map(|f| f.scope().to_vec()).collect();
        assert_eq!(scopes.len(), p.m);
        for f in &w.cost_functions {
            assert_eq!(f.arity(), 2);
            assert_eq!(f.default_cost(), 0);
            assert_eq!(f.explicit_tuples().len(), p.t);
            let nonzero: BTreeSet<_> = f.explicit_tuples().values().copied().collect();
            assert!(nonzero.len() <= p.w);
            assert!(nonzero
                .iter()
                .all(|&c| c >= 1 && c <= WEIGHT_UNIVERSE_FACTOR * p.w as u64));
        }
    }

    #[test]
    fn domains_class_shape() {
        let p = GeneratorParams::new(25, 30, 50, 5, 750, 7);
        check_uniform_shape(&gen_uniform(&p).unwrap(), &p);
    }

    #[test]
    fn weights_class_shape() {
        let p = GeneratorParams::new(25, 5, 50, 10000, 20, 3);
        check_uniform_shape(&gen_uniform(&p).unwrap(), &p);
    }

    #[test]
    fn full_tuple_coverage() {
        let p = GeneratorParams::new(6, 3, 5, 2, 9, 11);
        let w = gen_uniform(&p).unwrap();
        check_uniform_shape(&w, &p);
        for f in &w.cost_functions {
            assert!(f.levels()[0] > 0);
        }
    }

    #[test]
    fn uniform_parameter_errors() {
        assert!(gen_uniform(&GeneratorParams::new(4, 2, 7, 1, 1, 0)).is_err());
        assert!(gen_uniform(&GeneratorParams::new(4, 2, 3, 1, 5, 0)).is_err());
        assert!(gen_uniform(&GeneratorParams::new(4, 2, 3, 0, 1, 0)).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        for seed in 0..5 {
            let p = GeneratorParams::new(12, 4, 20, 3, 5, seed);
            assert_eq!(
                write_wcsp(&gen_uniform(&p).unwrap()),
                write_wcsp(&gen_uniform(&p).unwrap())
            );
            let p = GeneratorParams::new(12, 4, 3, 3, 5, seed);
            assert_eq!(
                write_wcsp(&gen_scale_free(&p).unwrap()),
                write_wcsp(&gen_scale_free(&p).unwrap())
            );
        }
        let a = gen_uniform(&GeneratorParams::new(12, 4, 20, 3, 5, 1)).unwrap();
        let b = gen_uniform(&GeneratorParams::new(12, 4, 20, 3, 5, 2)).unwrap();
        assert_ne!(write_wcsp(&a), write_wcsp(&b));
    }

    #[test]
    fn scale_free_classes() {
        for m in [4, 5] {
            let p = GeneratorParams::new(25, 5, m, 5, 20, 42);
            let w = gen_scale_free(&p).unwrap();
            let expected = m * (m + 1) / 2 + (25 - m - 1) * m;
            assert_eq!(w.num_functions(), expected);
            let scopes: BTreeSet<_> = w.cost_functions.iter().map(|f| f.scope().to_vec()).collect();
            assert_eq!(scopes.len(), expected, "no duplicate edges");
            assert!(degrees(&w).iter().all(|&d| d >= m));
        }
    }

    #[test]
    fn scale_free_seed_clique_only() {
        let p = GeneratorParams::new(4, 2, 3, 1, 1, 0);
        let w = gen_scale_free(&p).unwrap();
        assert_eq!(w.num_functions(), 6);
        assert!(gen_scale_free(&GeneratorParams::new(4, 2, 4, 1, 1, 0)).is_err());
    }

    #[test]
    fn scale_free_degrees_are_heavy_tailed() {
        let m = 4;
        let heavy = (0..100)
            .filter(|&seed| {
                let w = gen_scale_free(&GeneratorParams::new(25, 2, m, 1, 1, seed)).unwrap();
                degrees(&w).into_iter().max().unwrap() >= 2 * m
            })
            .count();
        assert!(heavy >= 95, "only {heavy} of 100 seeds were heavy-tailed");
    }

    #[test]
    fn pair_indexing_covers_all_pairs() {
        let n = 6;
        let all: Vec<_> = (0..n * (n - 1) / 2).map(|ix| pair_at(n, ix)).collect();
        let set: BTreeSet<_> = all.iter().copied().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|&(i, j)| i < j && j < n));
    }
}

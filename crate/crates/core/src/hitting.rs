//! Hitting vectors over a set of cores.
//!
//! A vector `h` hits a core `k` when `h[i] > k[i]` for some component `i`,
//! i.e. when `h[i]` reaches the *witness level* of `k` at `i`: the smallest
//! level strictly above `k[i]`. All three engines only ever raise
//! components to witness levels.
//!
//! The exact engine is a depth-first branch and bound. At each node it picks
//! the unhit core with the fewest usable witnesses and branches on raising
//! each of its components to the witness level. After trying component `i`
//! the later siblings keep `h[i] ≤ k[i]`, so the branches partition the
//! space. Nodes are pruned with the accumulated cost plus, for a greedily
//! chosen set of unhit cores with pairwise disjoint usable components, the
//! sum of their cheapest increments.

use std::cmp::Ordering;
use std::time::Instant;

use thiserror::Error;

use crate::model::{CoreSet, Cost, CostVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HittingError {
    /// A core sits at the maximum level in every component.
    #[error("core {0} cannot be hit")]
    Unhittable(CostVector),
    #[error("hitting vector search interrupted by the deadline")]
    Interrupted,
}

/// Sorted level lists, one per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpace {
    levels: Vec<Vec<Cost>>,
}

impl LevelSpace {
    pub fn new(levels: Vec<Vec<Cost>>) -> Self {
        assert!(
            levels
                .iter()
                .all(|l| !l.is_empty() && l.windows(2).all(|w| w[0] < w[1])),
            "level lists must be non-empty and strictly increasing"
        );
        LevelSpace { levels }
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self, i: usize) -> &[Cost] {
        &self.levels[i]
    }

    /// Componentwise minimum levels.
    pub fn baseline(&self) -> CostVector {
        self.levels.iter().map(|l| l[0]).collect()
    }

    pub fn max_level(&self, i: usize) -> Cost {
        *self.levels[i].last().expect("non-empty")
    }

    /// Smallest level of component `i` strictly above `value`.
    pub fn next_level(&self, i: usize, value: Cost) -> Option<Cost> {
        let l = &self.levels[i];
        let pos = l.partition_point(|&x| x <= value);
        l.get(pos).copied()
    }

    /// Every vector of the space, in lexicographic order.
    pub fn vectors(&self) -> impl Iterator<Item = CostVector> + '_ {
        let dims: Vec<u32> = self.levels.iter().map(|l| l.len() as u32).collect();
        crate::model::TupleIter::new(&dims).map(move |ix| {
            ix.iter()
                .enumerate()
                .map(|(i, &j)| self.levels[i][j as usize])
                .collect()
        })
    }
}

/// A hitting problem: the level space, the cores and their witness levels.
#[derive(Debug, Clone)]
pub struct HittingProblem {
    space: LevelSpace,
    cores: Vec<CostVector>,
    witness: Vec<Vec<Option<Cost>>>,
    deadline: Option<Instant>,
}

impl HittingProblem {
    pub fn new(space: LevelSpace, cores: &CoreSet) -> Self {
        Self::from_cores(space, cores.as_slice().to_vec())
    }

    pub fn from_cores(space: LevelSpace, cores: Vec<CostVector>) -> Self {
        let witness = cores
            .iter()
            .map(|k| {
                assert_eq!(k.len(), space.dim(), "core length mismatch");
                (0..space.dim()).map(|i| space.next_level(i, k[i])).collect()
            })
            .collect();
        HittingProblem {
            space,
            cores,
            witness,
            deadline: None,
        }
    }

    /// Makes the exact engines give up with [`HittingError::Interrupted`]
    /// once the deadline has passed.
    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn space(&self) -> &LevelSpace {
        &self.space
    }

    pub fn cores(&self) -> &[CostVector] {
        &self.cores
    }

    /// Smallest level of component `i` strictly above `core[i]`.
    pub fn witness_level(&self, core: usize, i: usize) -> Option<Cost> {
        self.witness[core][i]
    }

    fn check_hittable(&self) -> Result<(), HittingError> {
        match self.witness.iter().position(|w| w.iter().all(Option::is_none)) {
            Some(k) => Err(HittingError::Unhittable(self.cores[k].clone())),
            None => Ok(()),
        }
    }

    /// Minimum-cost hitting vector; ties go to the lexicographically smallest.
    pub fn min_cost(&self) -> Result<CostVector, HittingError> {
        self.check_hittable()?;
        let greedy = self.greedy()?;
        let mut search = Search::new(self, Mode::Optimize);
        search.best = Some(greedy);
        search.run()?;
        Ok(search.best.expect("greedy seeds the incumbent"))
    }

    /// Some hitting vector of cost strictly below `ub`, or `None` if there is
    /// none. With `ub = None` (infinite) any hitting vector is returned.
    pub fn cost_bounded(&self, ub: Option<Cost>) -> Result<Option<CostVector>, HittingError> {
        self.check_hittable()?;
        let mut search = Search::new(self, Mode::Decide(ub));
        search.run()?;
        Ok(search.best)
    }

    /// Greedy hitting vector: from the baseline, repeatedly apply the witness
    /// increment with the lowest cost increase per newly hit core. Ties go to
    /// the smaller increase, then the smaller component, then the lower level.
    pub fn greedy(&self) -> Result<CostVector, HittingError> {
        self.check_hittable()?;
        let mut h = self.space.baseline();
        let mut unhit: Vec<usize> = (0..self.cores.len()).filter(|&k| !self.is_hit(&h, k)).collect();
        while !unhit.is_empty() {
            let mut candidates: Vec<(usize, Cost)> = unhit
                .iter()
                .flat_map(|&k| {
                    self.witness[k]
                        .iter()
                        .enumerate()
                        .filter_map(|(i, w)| w.map(|w| (i, w)))
                })
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            // (delta, hits, component, level)
            let mut best: Option<(Cost, usize, usize, Cost)> = None;
            for (i, w) in candidates {
                let delta = w - h[i];
                let hits = unhit.iter().filter(|&&k| self.cores[k][i] < w).count();
                let better = match best {
                    None => true,
                    Some((bd, bh, bi, bw)) => {
                        let lhs = delta as u128 * bh as u128;
                        let rhs = bd as u128 * hits as u128;
                        lhs.cmp(&rhs).then(delta.cmp(&bd)).then(i.cmp(&bi)).then(w.cmp(&bw)) == Ordering::Less
                    }
                };
                if better {
                    best = Some((delta, hits, i, w));
                }
            }
            let (_, _, i, w) = best.expect("an unhit core always has a witness");
            h[i] = w;
            unhit.retain(|&k| self.cores[k][i] >= w);
        }
        Ok(h)
    }

    fn is_hit(&self, h: &[Cost], k: usize) -> bool {
        h.iter().zip(self.cores[k].iter()).any(|(a, b)| a > b)
    }
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    Optimize,
    Decide(Option<Cost>),
}

struct Search<'a> {
    p: &'a HittingProblem,
    mode: Mode,
    h: Vec<Cost>,
    /// Largest value each component may still take on this branch.
    limit: Vec<Cost>,
    hit_count: Vec<u32>,
    best: Option<CostVector>,
    nodes: u64,
    done: bool,
}

impl<'a> Search<'a> {
    fn new(p: &'a HittingProblem, mode: Mode) -> Self {
        let h = p.space.baseline().0;
        let limit = (0..p.space.dim()).map(|i| p.space.max_level(i)).collect();
        let hit_count = (0..p.cores.len())
            .map(|k| h.iter().zip(p.cores[k].iter()).filter(|(a, b)| a > b).count() as u32)
            .collect();
        Search {
            p,
            mode,
            h,
            limit,
            hit_count,
            best: None,
            nodes: 0,
            done: false,
        }
    }

    fn run(&mut self) -> Result<(), HittingError> {
        let cost = self.h.iter().sum();
        self.dfs(cost)
    }

    fn set(&mut self, i: usize, value: Cost) {
        let old = self.h[i];
        for (k, core) in self.p.cores.iter().enumerate() {
            let c = core[i];
            let was = old > c;
            let now = value > c;
            if was != now {
                if now {
                    self.hit_count[k] += 1;
                } else {
                    self.hit_count[k] -= 1;
                }
            }
        }
        self.h[i] = value;
    }

    fn usable(&self, k: usize) -> impl Iterator<Item = (usize, Cost)> + '_ {
        self.p.witness[k]
            .iter()
            .enumerate()
            .filter_map(move |(i, w)| w.filter(|&w| w <= self.limit[i]).map(|w| (i, w)))
    }

    fn dfs(&mut self, cost: Cost) -> Result<(), HittingError> {
        self.nodes += 1;
        if self.nodes % 1024 == 0 && self.p.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(HittingError::Interrupted);
        }

        let unhit: Vec<usize> = (0..self.p.cores.len()).filter(|&k| self.hit_count[k] == 0).collect();
        if unhit.is_empty() {
            let candidate = CostVector(self.h.clone());
            match self.mode {
                Mode::Optimize => {
                    let better = match &self.best {
                        None => true,
                        Some(b) => (cost, &candidate) < (b.cost(), b),
                    };
                    if better {
                        self.best = Some(candidate);
                    }
                }
                Mode::Decide(ub) => {
                    if ub.map_or(true, |ub| cost < ub) {
                        self.best = Some(candidate);
                        self.done = true;
                    }
                }
            }
            return Ok(());
        }

        // per unhit core: usable components and cheapest increment
        let mut info: Vec<(usize, Vec<usize>, Cost)> = Vec::with_capacity(unhit.len());
        for &k in &unhit {
            let comps: Vec<(usize, Cost)> = self.usable(k).collect();
            if comps.is_empty() {
                return Ok(());
            }
            let cheapest = comps.iter().map(|&(i, w)| w - self.h[i]).min().expect("non-empty");
            info.push((k, comps.into_iter().map(|(i, _)| i).collect(), cheapest));
        }

        let bound = cost + self.disjoint_bound(&info);
        let pruned = match self.mode {
            Mode::Optimize => self.best.as_ref().is_some_and(|b| bound > b.cost()),
            Mode::Decide(ub) => ub.is_some_and(|ub| bound >= ub),
        };
        if pruned {
            return Ok(());
        }

        let (k, _, _) = info
            .iter()
            .min_by_key(|(k, comps, _)| (comps.len(), *k))
            .expect("at least one unhit core");
        let k = *k;
        let mut branches: Vec<(usize, Cost)> = self.usable(k).collect();
        branches.sort_by_key(|&(i, w)| (w - self.h[i], i));

        let saved_limits: Vec<(usize, Cost)> = branches.iter().map(|&(i, _)| (i, self.limit[i])).collect();
        for &(i, w) in &branches {
            let old = self.h[i];
            self.set(i, w);
            let result = self.dfs(cost + (w - old));
            self.set(i, old);
            result?;
            if self.done {
                break;
            }
            // later siblings keep component i below this witness
            self.limit[i] = self.limit[i].min(self.p.cores[k][i]);
        }
        for (i, l) in saved_limits.into_iter().rev() {
            self.limit[i] = l;
        }
        Ok(())
    }

    /// Sum of cheapest increments over unhit cores whose usable components
    /// are pairwise disjoint, picked greedily (fewest components first).
    fn disjoint_bound(&self, info: &[(usize, Vec<usize>, Cost)]) -> Cost {
        let mut order: Vec<usize> = (0..info.len()).collect();
        order.sort_by_key(|&j| (info[j].1.len(), std::cmp::Reverse(info[j].2), info[j].0));
        let mut used = vec![false; self.p.space.dim()];
        let mut total = 0;
        for j in order {
            let (_, comps, cheapest) = &info[j];
            if comps.iter().all(|&i| !used[i]) {
                for &i in comps {
                    used[i] = true;
                }
                total += cheapest;
            }
        }
        total
    }
}

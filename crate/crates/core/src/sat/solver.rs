//! CDCL solver: two watched literals, first-UIP learning with local
//! minimization, VSIDS branching over a binary heap, phase saving,
//! geometric restarts and activity-based learnt clause deletion.
//!
//! Assumptions are decided in list order at the first decision levels; when
//! one of them is falsified the final conflict is traced back over the
//! assumption levels to the subset of assumptions responsible.

use std::fmt;
use std::ops::Not;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Variable index.
pub type Var = u32;

/// A literal: variable plus polarity, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Lit {
        Lit::new(var, false)
    }

    #[inline]
    pub fn var(self) -> Var {
        self.0 >> 1
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer (1-based, negative for negated literals).
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0, "0 is not a DIMACS literal");
        Lit::new((x.unsigned_abs() - 1) as Var, x > 0)
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Satisfying assignment, indexed by variable.
    Sat(Vec<bool>),
    /// Assumptions that together with the clauses are unsatisfiable.
    Unsat(Vec<Lit>),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    deleted: bool,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity.
#[derive(Debug, Default, Clone)]
struct VarHeap {
    heap: Vec<Var>,
    position: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.position.resize(n, None);
    }

    fn contains(&self, v: Var) -> bool {
        self.position[v as usize].is_some()
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    fn less(act: &[f64], a: Var, b: Var) -> bool {
        // higher activity first, then lower index
        act[a as usize] > act[b as usize] || (act[a as usize] == act[b as usize] && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::less(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.position[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.position[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && Self::less(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !Self::less(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.position[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.position[v as usize] = Some(i);
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.position[v as usize] = Some(i);
        self.sift_up(i, act);
    }

    fn increased(&mut self, v: Var, act: &[f64]) {
        if let Some(i) = self.position[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.position[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }
}

/// Cumulative search statistics.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SatStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_FIRST: u64 = 100;
const RESTART_FACTOR: f64 = 1.5;
const INTERRUPT_CHECK_PERIOD: u64 = 128;

/// Incremental CDCL SAT solver.
#[derive(Debug, Clone)]
pub struct SatSolver {
    clauses: Vec<Clause>,
    free_slots: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    num_learnts: usize,
    num_originals: usize,
    max_learnts: f64,
    ok: bool,
    rng: Option<ChaCha8Rng>,
    stats: SatStats,
}

impl Default for SatSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl SatSolver {
    pub fn new() -> Self {
        SatSolver {
            clauses: Vec::new(),
            free_slots: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            num_learnts: 0,
            num_originals: 0,
            max_learnts: 0.0,
            ok: true,
            rng: None,
            stats: SatStats::default(),
        }
    }

    /// A solver whose initial variable activities carry a small seeded
    /// perturbation. Seed 0 gives the unperturbed order.
    pub fn with_seed(seed: u64) -> Self {
        let mut s = Self::new();
        if seed != 0 {
            s.rng = Some(ChaCha8Rng::seed_from_u64(seed));
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.num_originals
    }

    pub fn stats(&self) -> SatStats {
        self.stats
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as Var;
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.polarity.push(false);
        let act = match &mut self.rng {
            Some(rng) => rng.gen::<f64>() * 1e-5,
            None => 0.0,
        };
        self.activity.push(act);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        v
    }

    fn ensure_var(&mut self, v: Var) {
        while self.num_vars() <= v as usize {
            self.new_var();
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var() as usize] {
            LBool::Undef => LBool::Undef,
            LBool::True if l.is_positive() => LBool::True,
            LBool::False if !l.is_positive() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a permanent clause. Variables not yet created are allocated.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        if !self.ok {
            return;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var()).max() {
            self.ensure_var(max);
        }
        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::with_capacity(ps.len());
        for (i, &l) in ps.iter().enumerate() {
            if self.value(l) == LBool::True || (i + 1 < ps.len() && ps[i + 1] == !l) {
                return;
            }
            if self.value(l) == LBool::Undef {
                out.push(l);
            }
        }
        match out.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(out[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.num_originals += 1;
                self.attach(out, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let (l0, l1) = (lits[0], lits[1]);
        let clause = Clause {
            lits,
            learnt,
            activity: 0.0,
            deleted: false,
        };
        let cref = match self.free_slots.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = clause;
                slot
            }
            None => {
                self.clauses.push(clause);
                (self.clauses.len() - 1) as u32
            }
        };
        self.watches[(!l0).index()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).index()].push(Watcher { cref, blocker: l0 });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_positive() { LBool::True } else { LBool::False };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns the conflicting clause if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.index()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let clause = &mut self.clauses[cref as usize];
                if clause.deleted {
                    continue;
                }
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let keep = Watcher { cref, blocker: first };
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = keep;
                    j += 1;
                    continue;
                }
                let clause = &mut self.clauses[cref as usize];
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    let val = match self.assigns[l.var() as usize] {
                        LBool::Undef => LBool::Undef,
                        LBool::True if l.is_positive() => LBool::True,
                        LBool::False if !l.is_positive() => LBool::True,
                        _ => LBool::False,
                    };
                    if val != LBool::False {
                        clause.lits.swap(1, k);
                        let new_watch = !clause.lits[1];
                        self.watches[new_watch.index()].push(keep);
                        continue 'watchers;
                    }
                }
                ws[j] = keep;
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.index()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v as usize];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in &mut self.activity {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize];
        }
        learnt[0] = !p.expect("conflict has a UIP");

        // drop literals implied by other literals of the clause
        let marked: Vec<Lit> = learnt.clone();
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var() as usize];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var() as usize;
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                kept.push(l);
            }
        }
        for l in marked {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let (mut best, mut best_level) = (1, self.level[learnt[1].var() as usize]);
            for (i, l) in learnt.iter().enumerate().skip(2) {
                let lv = self.level[l.var() as usize];
                if lv > best_level {
                    best = i;
                    best_level = lv;
                }
            }
            learnt.swap(1, best);
            best_level as usize
        };
        (learnt, bt)
    }

    /// Collects the assumptions responsible for `p` being false, where `p`
    /// is an assumption. The result includes `p` itself.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut out = vec![p];
        if self.decision_level() == 0 {
            return out;
        }
        self.seen[p.var() as usize] = true;
        for idx in (self.trail_lim[0]..self.trail.len()).rev() {
            let lit = self.trail[idx];
            let v = lit.var() as usize;
            if !self.seen[v] {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                if lit != p {
                    out.push(lit);
                }
            } else {
                for q in &self.clauses[r as usize].lits[1..] {
                    if self.level[q.var() as usize] > 0 {
                        self.seen[q.var() as usize] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var() as usize] = false;
        out
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for idx in (lim..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var() as usize;
            self.assigns[v] = LBool::Undef;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_positive();
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let l = c.lits[0];
        self.value(l) == LBool::True && self.reason[l.var() as usize] == cref
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && !cl.deleted
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity
                .partial_cmp(&cb.activity)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        let mut removed = false;
        for &c in &learnts[..half] {
            if self.clauses[c as usize].lits.len() > 2 && !self.locked(c) {
                self.remove_clause(c);
                removed = true;
            }
        }
        if removed {
            self.purge_watches();
        }
    }

    fn remove_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.deleted = true;
        c.lits.clear();
        if c.learnt {
            self.num_learnts -= 1;
        }
        self.free_slots.push(cref);
    }

    fn purge_watches(&mut self) {
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while !self.heap.is_empty() {
            let v = self.heap.pop(&self.activity)?;
            if self.assigns[v as usize] == LBool::Undef {
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    /// Solves under the given assumptions.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SatResult {
        self.solve_until(assumptions, None)
            .expect("search without a deadline always completes")
    }

    /// Solves under the given assumptions, giving up once `deadline` has
    /// passed. The deadline is polled between conflicts.
    pub fn solve_until(&mut self, assumptions: &[Lit], deadline: Option<Instant>) -> Option<SatResult> {
        self.stats.solves += 1;
        if !self.ok {
            return Some(SatResult::Unsat(Vec::new()));
        }
        if let Some(max) = assumptions.iter().map(|l| l.var()).max() {
            self.ensure_var(max);
        }
        self.max_learnts = (self.num_originals as f64 / 3.0).max(2000.0);
        let mut restart_budget = RESTART_FIRST as f64;
        let result = loop {
            match self.search(assumptions, restart_budget as u64, deadline) {
                Search::Done(r) => break Some(r),
                Search::Restart => {
                    self.stats.restarts += 1;
                    restart_budget *= RESTART_FACTOR;
                }
                Search::Interrupted => break None,
            }
        };
        self.cancel_until(0);
        result
    }

    fn search(&mut self, assumptions: &[Lit], budget: u64, deadline: Option<Instant>) -> Search {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Search::Done(SatResult::Unsat(Vec::new()));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if conflicts % INTERRUPT_CHECK_PERIOD == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                    return Search::Interrupted;
                }
                continue;
            }
            if conflicts >= budget {
                self.cancel_until(0);
                return Search::Restart;
            }
            if self.num_learnts as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value(p) {
                    LBool::True => self.trail_lim.push(self.trail.len()),
                    LBool::False => {
                        let failed = self.analyze_final(p);
                        return Search::Done(SatResult::Unsat(failed));
                    }
                    LBool::Undef => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => {
                        self.stats.decisions += 1;
                        p
                    }
                    None => {
                        let model = self.assigns.iter().map(|&a| a == LBool::True).collect();
                        return Search::Done(SatResult::Sat(model));
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, NO_REASON);
        }
    }
}

enum Search {
    Done(SatResult),
    Restart,
    Interrupted,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: Var) -> Lit {
        Lit::pos(v)
    }

    #[test]
    fn literal_packing() {
        let l = Lit::new(5, false);
        assert_eq!(l.var(), 5);
        assert!(!l.is_positive());
        assert_eq!(!l, Lit::pos(5));
        assert_eq!(l.to_dimacs(), -6);
        assert_eq!(Lit::from_dimacs(-6), l);
    }

    #[test]
    fn new_var_is_monotone() {
        let mut s = SatSolver::new();
        assert_eq!(s.new_var(), 0);
        assert_eq!(s.new_var(), 1);
        s.add_clause(&[x(5)]);
        assert!(s.new_var() >= 6);
    }

    #[test]
    fn empty_clause_is_permanent() {
        let mut s = SatSolver::new();
        s.add_clause(&[]);
        assert_eq!(s.solve(&[]), SatResult::Unsat(vec![]));
        assert_eq!(s.solve(&[x(0)]), SatResult::Unsat(vec![]));
    }

    #[test]
    fn contradicting_units() {
        let mut s = SatSolver::new();
        s.add_clause(&[x(0)]);
        s.add_clause(&[!x(0)]);
        assert!(!s.solve(&[]).is_sat());
    }

    #[test]
    fn tautology_is_ignored() {
        let mut s = SatSolver::new();
        s.add_clause(&[x(0), !x(0)]);
        assert_eq!(s.num_clauses(), 0);
        assert!(s.solve(&[!x(0)]).is_sat());
        assert!(s.solve(&[x(0)]).is_sat());
    }

    #[test]
    fn assumption_satisfied() {
        let mut s = SatSolver::new();
        s.new_var();
        match s.solve(&[x(0)]) {
            SatResult::Sat(m) => assert!(m[0]),
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn assumption_contradicts_unit() {
        let mut s = SatSolver::new();
        s.add_clause(&[!x(0)]);
        match s.solve(&[x(0)]) {
            SatResult::Unsat(failed) => assert!(failed.contains(&x(0))),
            r => panic!("unexpected {r:?}"),
        }
        // still satisfiable without the assumption
        assert!(s.solve(&[]).is_sat());
    }

    #[test]
    fn failed_set_excludes_irrelevant_assumptions() {
        let mut s = SatSolver::new();
        // a -> b, b -> c; assume a, d, !c
        s.add_clause(&[!x(0), x(1)]);
        s.add_clause(&[!x(1), x(2)]);
        s.new_var();
        s.new_var();
        match s.solve(&[x(0), x(3), !x(2)]) {
            SatResult::Unsat(mut failed) => {
                failed.sort();
                let mut expected = vec![x(0), !x(2)];
                expected.sort();
                assert_eq!(failed, expected);
            }
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons, 3 holes
        let mut s = SatSolver::new();
        let p = |i: u32, j: u32| Lit::pos(i * 3 + j);
        for i in 0..4 {
            s.add_clause(&[p(i, 0), p(i, 1), p(i, 2)]);
        }
        for j in 0..3 {
            for a in 0..4 {
                for b in (a + 1)..4 {
                    s.add_clause(&[!p(a, j), !p(b, j)]);
                }
            }
        }
        assert!(!s.solve(&[]).is_sat());
        assert!(!s.is_ok());
    }
}

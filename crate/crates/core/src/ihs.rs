//! The implicit hitting set main loop.
//!
//! Four ways of picking the next vector are supported:
//!
//! * `lb`: a minimum-cost hitting vector, whose cost is a lower bound;
//! * `ub`: any hitting vector cheaper than the upper bound, stopping when
//!   none exists;
//! * `grd-lb` / `grd-ub`: a greedy hitting vector, falling back to the
//!   `lb` / `ub` method for one iteration after a greedy vector turned out
//!   to be a solution no better than the upper bound.
//!
//! Bounds are kept in component costs internally and reported with the
//! instance offset added.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::hitting::{HittingError, HittingProblem, LevelSpace};
pub use crate::improve::CoreStrategy;
use crate::improve::{improve_from_core, ImproveOutcome};
use crate::merge::{MergedProblem, DEFAULT_MERGE_CAP};
use crate::model::{Assignment, CoreSet, Cost, CostVector, WcspInstance};
use crate::oracle::{AmoEncoding, Induced, InducedCsp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HvStrategy {
    Lb,
    Ub,
    GrdLb,
    GrdUb,
}

impl HvStrategy {
    pub const ALL: [HvStrategy; 4] = [HvStrategy::GrdUb, HvStrategy::Ub, HvStrategy::GrdLb, HvStrategy::Lb];

    pub fn name(self) -> &'static str {
        match self {
            HvStrategy::Lb => "lb",
            HvStrategy::Ub => "ub",
            HvStrategy::GrdLb => "grd-lb",
            HvStrategy::GrdUb => "grd-ub",
        }
    }

    fn greedy(self) -> bool {
        matches!(self, HvStrategy::GrdLb | HvStrategy::GrdUb)
    }

    fn lower_bounding(self) -> bool {
        matches!(self, HvStrategy::Lb | HvStrategy::GrdLb)
    }
}

impl fmt::Display for HvStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HvStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        HvStrategy::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| format!("unknown hitting-vector strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub hv: HvStrategy,
    pub core: CoreStrategy,
    pub merge: bool,
    pub disjoint_cores: bool,
    /// Extra cores the disjoint phase may add per iteration.
    pub disjoint_limit: usize,
    pub merge_cap: u64,
    pub time_limit: Option<Duration>,
    /// Seeds the SAT solver's initial variable order (0: unperturbed).
    pub seed: u64,
    pub iteration_cap: u64,
    /// Keep every core inserted during the run in [`RunReport::inserted_cores`].
    pub record_cores: bool,
    pub amo: AmoEncoding,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            hv: HvStrategy::Lb,
            core: CoreStrategy::Maximal,
            merge: false,
            disjoint_cores: false,
            disjoint_limit: 16,
            merge_cap: DEFAULT_MERGE_CAP,
            time_limit: None,
            seed: 0,
            iteration_cap: 10_000_000,
            record_cores: false,
            amo: AmoEncoding::Pairwise,
        }
    }
}

impl SolverConfig {
    pub fn new(hv: HvStrategy, core: CoreStrategy, merge: bool) -> Self {
        SolverConfig {
            hv,
            core,
            merge,
            ..Default::default()
        }
    }

    /// The 32 combinations of hitting-vector strategy, core strategy and merging.
    pub fn matrix() -> Vec<SolverConfig> {
        let mut out = Vec::with_capacity(32);
        for merge in [true, false] {
            for hv in HvStrategy::ALL {
                for core in CoreStrategy::ALL {
                    out.push(SolverConfig::new(hv, core, merge));
                }
            }
        }
        out
    }

    /// Short label such as `lb/maximal/merge`.
    pub fn label(&self) -> String {
        let mut s = format!(
            "{}/{}/{}",
            self.hv,
            self.core,
            if self.merge { "merge" } else { "nomerge" }
        );
        if self.disjoint_cores {
            s.push_str("/disjoint");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    Timeout,
    Infeasible,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Timeout => "timeout",
            RunStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub hitting: Duration,
    pub sat: Duration,
    pub improve: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub status: RunStatus,
    pub optimum: Option<Cost>,
    pub final_lb: Cost,
    pub final_ub: Option<Cost>,
    pub best_assignment: Option<Assignment>,
    pub iterations: u64,
    pub hv_calls: u64,
    /// Induced-CSP queries outside core improvement.
    pub sat_calls: u64,
    pub improve_probes: u64,
    /// Cores added to the core set (before domination pruning).
    pub cores_added: u64,
    /// Size of the core set at termination.
    pub core_set_size: usize,
    pub num_components: usize,
    pub merge_fallbacks: usize,
    /// `(lb, ub)` after every iteration.
    pub bounds_trace: Vec<(Cost, Option<Cost>)>,
    /// The core set at termination, in component space.
    pub cores: Vec<CostVector>,
    /// Every inserted core, when `record_cores` is set.
    pub inserted_cores: Vec<CostVector>,
    pub times: PhaseTimes,
}

impl RunReport {
    /// Report fields that do not depend on wall-clock time.
    pub fn counters(&self) -> (RunStatus, Option<Cost>, u64, u64, u64, u64, usize) {
        (
            self.status,
            self.optimum,
            self.iterations,
            self.hv_calls,
            self.sat_calls,
            self.improve_probes,
            self.core_set_size,
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("iteration cap of {0} exceeded")]
    IterationCap(u64),
    #[error("hitting vector computation failed: {0}")]
    Hitting(HittingError),
}

/// Builds the component view a configuration solves over.
pub fn build_problem(w: &WcspInstance, cfg: &SolverConfig) -> MergedProblem {
    if cfg.merge {
        MergedProblem::build(w, cfg.merge_cap)
    } else {
        MergedProblem::unmerged(w)
    }
}

struct Run<'a> {
    cfg: &'a SolverConfig,
    oracle: InducedCsp,
    space: LevelSpace,
    cores: CoreSet,
    lb: Cost,
    ub: Option<Cost>,
    best: Option<Assignment>,
    deadline: Option<Instant>,
    report: RunReport,
}

enum Step {
    Continue,
    Finished,
    TimedOut,
}

impl Run<'_> {
    fn done(&self) -> bool {
        self.ub.is_some_and(|ub| self.lb >= ub)
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn offer(&mut self, cost: Cost, assignment: Assignment) {
        if self.ub.map_or(true, |ub| cost < ub) {
            self.ub = Some(cost);
            self.best = Some(assignment);
        }
    }

    fn add_core(&mut self, core: CostVector) {
        self.report.cores_added += 1;
        if self.cfg.record_cores {
            self.report.inserted_cores.push(core.clone());
        }
        self.cores.insert(core);
    }

    fn improve(&mut self, lazy: CostVector) -> ImproveOutcome {
        let t = Instant::now();
        let out = improve_from_core(self.cfg.core, lazy, self.ub, &mut self.oracle, self.deadline);
        self.report.times.improve += t.elapsed();
        self.report.improve_probes += out.probes;
        if let Some((c, a)) = &out.new_ub {
            self.offer(*c, a.clone());
        }
        out
    }

    fn query(&mut self, v: &CostVector) -> Option<Induced> {
        let t = Instant::now();
        let r = self.oracle.solve_until(v, self.deadline);
        self.report.times.sat += t.elapsed();
        self.report.sat_calls += 1;
        r
    }

    fn hitting_problem(&self) -> HittingProblem {
        HittingProblem::new(self.space.clone(), &self.cores).with_deadline(self.deadline)
    }

    fn iteration(&mut self, greedy: bool, force_exact: &mut bool) -> Result<Step, SolveError> {
        let t = Instant::now();
        self.report.hv_calls += 1;
        let p = self.hitting_problem();
        let h = if greedy {
            p.greedy()
        } else if self.cfg.hv.lower_bounding() {
            p.min_cost().map(|h| {
                self.lb = self.lb.max(h.cost());
                h
            })
        } else {
            match p.cost_bounded(self.ub) {
                Ok(Some(h)) => Ok(h),
                Ok(None) => {
                    self.report.times.hitting += t.elapsed();
                    self.lb = self.ub.expect("a bounded search without solution needs a finite bound");
                    return Ok(Step::Finished);
                }
                Err(e) => Err(e),
            }
        };
        self.report.times.hitting += t.elapsed();
        let h = match h {
            Ok(h) => h,
            Err(HittingError::Interrupted) => return Ok(Step::TimedOut),
            Err(e) => return Err(SolveError::Hitting(e)),
        };
        if self.done() {
            return Ok(Step::Finished);
        }

        match self.query(&h) {
            None => Ok(Step::TimedOut),
            Some(Induced::Sat { assignment, vector }) => {
                let c = vector.cost();
                if greedy && self.ub.is_some_and(|ub| c >= ub) {
                    *force_exact = true;
                } else {
                    self.offer(c, assignment);
                }
                Ok(Step::Continue)
            }
            Some(Induced::Unsat { core }) => {
                let out = self.improve(core);
                let interrupted = out.interrupted;
                let k = out.core;
                self.add_core(k.clone());
                if interrupted {
                    return Ok(Step::TimedOut);
                }
                if self.cfg.disjoint_cores && !self.disjoint_phase(&h, &k) {
                    return Ok(Step::TimedOut);
                }
                Ok(Step::Continue)
            }
        }
    }

    /// Extra cores over components left inactive by the cores found so far
    /// in this iteration. Returns false on timeout.
    fn disjoint_phase(&mut self, h: &CostVector, k: &CostVector) -> bool {
        let extra = disjoint_core_phase(
            h,
            k,
            &mut self.oracle,
            self.cfg.disjoint_limit,
            self.cfg.core,
            self.ub,
            self.deadline,
        );
        self.report.sat_calls += extra.queries;
        self.report.improve_probes += extra.probes;
        for (c, a) in extra.solutions {
            self.offer(c, a);
        }
        for core in extra.cores {
            self.add_core(core);
        }
        !extra.interrupted
    }
}

/// Outcome of [`disjoint_core_phase`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DisjointCores {
    pub cores: Vec<CostVector>,
    /// Solutions met during the phase, as (component cost, assignment).
    pub solutions: Vec<(Cost, Assignment)>,
    pub queries: u64,
    pub probes: u64,
    pub interrupted: bool,
}

/// Looks for up to `limit` further cores in one iteration. Components that
/// are below their maximum in a core found so far (its active components)
/// are lifted to their maximum in `h`; if the result is still a core, it is
/// improved and its active components are disjoint from all earlier ones.
pub fn disjoint_core_phase(
    h: &CostVector,
    k: &CostVector,
    oracle: &mut InducedCsp,
    limit: usize,
    strategy: CoreStrategy,
    ub: Option<Cost>,
    deadline: Option<Instant>,
) -> DisjointCores {
    let top = oracle.top_vector();
    let active = |v: &CostVector| -> Vec<usize> { (0..v.len()).filter(|&i| v[i] < top[i]).collect() };
    let mut out = DisjointCores::default();
    let mut lifted = vec![false; h.len()];
    for i in active(k) {
        lifted[i] = true;
    }
    let mut ub = ub;
    while out.cores.len() < limit {
        let probe: CostVector = (0..h.len()).map(|i| if lifted[i] { top[i] } else { h[i] }).collect();
        out.queries += 1;
        match oracle.solve_until(&probe, deadline) {
            None => {
                out.interrupted = true;
                break;
            }
            Some(Induced::Sat { assignment, vector }) => {
                let c = vector.cost();
                if ub.map_or(true, |u| c < u) {
                    out.solutions.push((c, assignment));
                }
                break;
            }
            Some(Induced::Unsat { core }) => {
                let improved = improve_from_core(strategy, core, ub, oracle, deadline);
                out.probes += improved.probes;
                if let Some((c, a)) = improved.new_ub {
                    ub = Some(c);
                    out.solutions.push((c, a));
                }
                let act = active(&improved.core);
                out.cores.push(improved.core);
                if improved.interrupted {
                    out.interrupted = true;
                    break;
                }
                if act.is_empty() {
                    break;
                }
                for i in act {
                    lifted[i] = true;
                }
            }
        }
    }
    out
}

/// Solves `w` with the given configuration.
pub fn solve(w: &WcspInstance, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|d| start + d);
    let problem = build_problem(w, cfg);
    let oracle = InducedCsp::with_options(problem.base(), problem.components(), cfg.amo, cfg.seed);
    let space = LevelSpace::new(problem.level_sets());
    let mut run = Run {
        cfg,
        oracle,
        space,
        cores: CoreSet::new(),
        lb: 0,
        ub: None,
        best: None,
        deadline,
        report: RunReport {
            status: RunStatus::Timeout,
            optimum: None,
            final_lb: 0,
            final_ub: None,
            best_assignment: None,
            iterations: 0,
            hv_calls: 0,
            sat_calls: 0,
            improve_probes: 0,
            cores_added: 0,
            core_set_size: 0,
            num_components: problem.num_components(),
            merge_fallbacks: problem.fallbacks(),
            bounds_trace: Vec::new(),
            cores: Vec::new(),
            inserted_cores: Vec::new(),
            times: PhaseTimes::default(),
        },
    };

    let top = run.oracle.top_vector();
    let status = match run.query(&top) {
        None => RunStatus::Timeout,
        Some(Induced::Unsat { .. }) => RunStatus::Infeasible,
        Some(Induced::Sat { .. }) => main_loop(&mut run)?,
    };

    let offset = w.offset;
    let mut report = run.report;
    report.status = status;
    report.final_lb = run.lb + offset;
    report.final_ub = run.ub.map(|u| u + offset);
    if status == RunStatus::Optimal {
        report.optimum = report.final_ub;
    }
    report.best_assignment = run.best;
    report.core_set_size = run.cores.len();
    report.cores = run.cores.as_slice().to_vec();
    for entry in &mut report.bounds_trace {
        entry.0 += offset;
        entry.1 = entry.1.map(|u| u + offset);
    }
    report.times.total = start.elapsed();
    Ok(report)
}

fn main_loop(run: &mut Run<'_>) -> Result<RunStatus, SolveError> {
    let mut force_exact = false;
    while !run.done() {
        if run.expired() {
            return Ok(RunStatus::Timeout);
        }
        if run.report.iterations >= run.cfg.iteration_cap {
            return Err(SolveError::IterationCap(run.cfg.iteration_cap));
        }
        run.report.iterations += 1;
        let greedy = run.cfg.hv.greedy() && !force_exact;
        force_exact = false;
        let step = run.iteration(greedy, &mut force_exact)?;
        run.report.bounds_trace.push((run.lb, run.ub));
        match step {
            Step::Continue => {}
            Step::Finished => break,
            Step::TimedOut => return Ok(RunStatus::Timeout),
        }
    }
    Ok(RunStatus::Optimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFunction, HardConstraint};

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

    /// Levels {0, 1, 2} but only cost 2 is feasible.
    fn forced_two() -> WcspInstance {
        let hc = HardConstraint::new(vec![0], [vec![0], vec![1]]);
        WcspInstance::new("forced", vec![3], vec![hc], vec![unary(0, &[0, 1, 2])], 1000).unwrap()
    }

    #[test]
    fn lb_trace_on_forced_instance() {
        let cfg = SolverConfig {
            record_cores: true,
            ..SolverConfig::new(HvStrategy::Lb, CoreStrategy::Maximal, false)
        };
        let r = solve(&forced_two(), &cfg).unwrap();
        assert_eq!(r.status, RunStatus::Optimal);
        assert_eq!(r.optimum, Some(2));
        assert_eq!(r.cores, vec![CostVector(vec![1])]);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.core_set_size, 1);
    }

    #[test]
    fn ub_trace_on_forced_instance() {
        let cfg = SolverConfig::new(HvStrategy::Ub, CoreStrategy::Lazy, false);
        let r = solve(&forced_two(), &cfg).unwrap();
        assert_eq!(r.optimum, Some(2));
        // (0) core; (1) core; (2) sat, ub = 2; bounded search finds nothing below 2
        assert_eq!(r.iterations, 4);
        assert_eq!(r.bounds_trace.last(), Some(&(2, Some(2))));
        let lb_trace: Vec<Cost> = r.bounds_trace.iter().map(|t| t.0).collect();
        assert_eq!(lb_trace, vec![0, 0, 0, 2]);
    }

    #[test]
    fn baseline_satisfiable_in_one_iteration() {
        let w = WcspInstance::new("free", vec![2], vec![], vec![unary(0, &[0, 3])], 1000).unwrap();
        for hv in HvStrategy::ALL {
            let r = solve(&w, &SolverConfig::new(hv, CoreStrategy::Maximal, false)).unwrap();
            assert_eq!(r.optimum, Some(0));
            // the baseline is a solution of cost 0 and the lower bound starts at 0
            assert_eq!(r.iterations, 1, "{hv}");
        }
    }

    #[test]
    fn every_configuration_agrees_on_forced_instance() {
        for cfg in SolverConfig::matrix() {
            let r = solve(&forced_two(), &cfg).unwrap();
            assert_eq!(r.optimum, Some(2), "{}", cfg.label());
        }
    }

    #[test]
    fn infeasible_instance() {
        let hc = HardConstraint::new(vec![0], [vec![0], vec![1]]);
        let w = WcspInstance::new("inf", vec![2], vec![hc], vec![unary(0, &[0, 1])], 1000).unwrap();
        let r = solve(&w, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, RunStatus::Infeasible);
        assert_eq!(r.optimum, None);
    }

    #[test]
    fn offset_is_added() {
        let w = forced_two().with_offset(5);
        let r = solve(&w, &SolverConfig::default()).unwrap();
        assert_eq!(r.optimum, Some(7));
    }

    #[test]
    fn zero_time_limit_times_out() {
        let cfg = SolverConfig {
            time_limit: Some(Duration::ZERO),
            ..SolverConfig::default()
        };
        let r = solve(&forced_two(), &cfg).unwrap();
        assert_eq!(r.status, RunStatus::Timeout);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let cfg = SolverConfig {
            iteration_cap: 1,
            core: CoreStrategy::Lazy,
            ..SolverConfig::default()
        };
        assert_eq!(solve(&forced_two(), &cfg), Err(SolveError::IterationCap(1)));
    }

    /// x, y in {0,1,2}, f1(x) = x, f2(y) = y, value 0 forbidden for x and,
    /// if `both`, for y.
    fn zero_forbidden(both: bool) -> WcspInstance {
        let mut hard = vec![HardConstraint::new(vec![0], [vec![0]])];
        if both {
            hard.push(HardConstraint::new(vec![1], [vec![0]]));
        }
        WcspInstance::new(
            "zf",
            vec![3, 3],
            hard,
            vec![unary(0, &[0, 1, 2]), unary(1, &[0, 1, 2])],
            1000,
        )
        .unwrap()
    }

    fn first_core(w: &WcspInstance, o: &mut InducedCsp) -> (CostVector, CostVector) {
        let h = CostVector(vec![0; w.num_functions()]);
        let Induced::Unsat { core } = o.solve(&h) else {
            panic!("baseline is a core")
        };
        let k = improve_from_core(CoreStrategy::Maximal, core, None, o, None).core;
        (h, k)
    }

    #[test]
    fn disjoint_phase_on_two_independent_conflicts() {
        let w = zero_forbidden(true);
        let mut o = InducedCsp::from_instance(&w);
        let (h, k) = first_core(&w, &mut o);
        let extra = disjoint_core_phase(&h, &k, &mut o, 16, CoreStrategy::Maximal, None, None);
        assert_eq!(extra.cores.len(), 1);
        let mut all = vec![k, extra.cores[0].clone()];
        all.sort();
        assert_eq!(all, vec![CostVector(vec![0, 2]), CostVector(vec![2, 0])]);
        assert!(!extra.interrupted);
    }

    #[test]
    fn disjoint_phase_single_conflict_and_zero_limit() {
        let w = zero_forbidden(false);
        let mut o = InducedCsp::from_instance(&w);
        let (h, k) = first_core(&w, &mut o);
        let extra = disjoint_core_phase(&h, &k, &mut o, 16, CoreStrategy::Maximal, None, None);
        assert!(extra.cores.is_empty());
        assert_eq!(extra.queries, 1);
        let none = disjoint_core_phase(&h, &k, &mut o, 0, CoreStrategy::Maximal, None, None);
        assert_eq!(none, DisjointCores::default());
    }

    #[test]
    fn disjoint_runs_keep_optimum() {
        for cfg in SolverConfig::matrix() {
            let cfg = SolverConfig {
                disjoint_cores: true,
                ..cfg
            };
            let r = solve(&zero_forbidden(true), &cfg).unwrap();
            assert_eq!(r.optimum, Some(2), "{}", cfg.label());
        }
    }

    #[test]
    fn greedy_finds_optimum_then_exact_iteration_proves_it() {
        // two unary functions, the baseline (0,0) is infeasible through x
        let r = solve(
            &zero_forbidden(false),
            &SolverConfig::new(HvStrategy::GrdLb, CoreStrategy::Maximal, false),
        )
        .unwrap();
        assert_eq!(r.optimum, Some(1));
        // 1: core (0,2), the probe (1,2) is a solution of cost 3
        // 2: greedy (1,0) is a solution, ub 1
        // 3: greedy (1,0) again, cost 1 >= ub, so the next iteration is exact
        // 4: minimum-cost vector (1,0) gives lb 1
        assert_eq!(
            r.bounds_trace,
            vec![(0, Some(3)), (0, Some(1)), (0, Some(1)), (1, Some(1))]
        );
        assert_eq!(r.iterations, 4);
    }

    #[test]
    fn names_round_trip() {
        for h in HvStrategy::ALL {
            assert_eq!(h.name().parse::<HvStrategy>().unwrap(), h);
        }
        assert!("best".parse::<HvStrategy>().is_err());
        assert_eq!(SolverConfig::matrix().len(), 32);
    }
}

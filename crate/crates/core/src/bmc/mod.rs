//! Incremental bounded model checking of one property or a property cluster.
//!
//! A run owns one solver session. Frames of the union cone of the checked
//! properties are encoded one at a time; at frame `k` every unresolved
//! property is queried by assuming its frame-`k` bad literal. Clauses learnt
//! while answering one query stay in the session for all later queries.

mod encode;
mod stats;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Netlist, NetlistError, UnfoldMode};
use crate::sat::{Limits, SolveStatus, Solver, SolverConfig};

use encode::FrameEncoder;
pub use stats::{frame_csv, merge_frames, FrameMetric, FrameStat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BmcError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("a cluster needs at least one property")]
    EmptyCluster,
    #[error("trace has {found} values where {expected} were expected")]
    InputArityMismatch { expected: usize, found: usize },
    #[error("trace has no frames")]
    EmptyTrace,
    #[error("invalid BMC configuration: {0}")]
    InvalidConfig(String),
}

/// Resource allowance of a run, per property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Budget {
    WallTime(Duration),
    /// Solver conflicts; makes runs reproducible across machines.
    Conflicts(u64),
}

impl Budget {
    pub fn seconds(s: f64) -> Budget {
        Budget::WallTime(Duration::from_secs_f64(s))
    }

    pub fn scaled(self, factor: usize) -> Budget {
        match self {
            Budget::WallTime(d) => Budget::WallTime(d * factor as u32),
            Budget::Conflicts(c) => Budget::Conflicts(c * factor as u64),
        }
    }

    /// Multiplies the allowance by a real factor, rounding conflicts down.
    pub fn scaled_by(self, factor: f64) -> Budget {
        match self {
            Budget::WallTime(d) => Budget::WallTime(d.mul_f64(factor)),
            Budget::Conflicts(c) => Budget::Conflicts((c as f64 * factor).floor() as u64),
        }
    }

    pub fn is_positive(self) -> bool {
        match self {
            Budget::WallTime(d) => !d.is_zero(),
            Budget::Conflicts(c) => c > 0,
        }
    }

    /// The time measure that stays meaningful under this budget: wall
    /// seconds for wall-time budgets, deterministic work otherwise.
    pub fn time_metric(self) -> TimeMetric {
        match self {
            Budget::WallTime(_) => TimeMetric::Wall,
            Budget::Conflicts(_) => TimeMetric::Work,
        }
    }
}

/// How verdict times are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeMetric {
    /// Wall-clock seconds.
    Wall,
    /// Unit propagations performed by the solver; machine independent.
    Work,
}

impl TimeMetric {
    pub fn unit(self) -> &'static str {
        match self {
            TimeMetric::Wall => "seconds",
            TimeMetric::Work => "propagations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmcConfig {
    /// Allowance per property; cluster runs multiply it by the cluster size.
    pub budget: Budget,
    /// Deepest frame index explored, inclusive.
    pub max_depth: Option<u32>,
    pub mode: UnfoldMode,
    pub seed: u64,
    /// Frames 0..=bound refuted counts as a proof.
    pub proof_bound: Option<u32>,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig {
            budget: Budget::seconds(1.0),
            max_depth: None,
            mode: UnfoldMode::Inductive,
            seed: 0,
            proof_bound: None,
        }
    }
}

impl BmcConfig {
    pub fn validate(&self) -> Result<(), BmcError> {
        if !self.budget.is_positive() {
            return Err(BmcError::InvalidConfig("budget must be positive".into()));
        }
        if let (Some(bound), Some(max)) = (self.proof_bound, self.max_depth) {
            if bound > max {
                return Err(BmcError::InvalidConfig(format!(
                    "proof bound {bound} exceeds max depth {max}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "UNDET")]
    Undet,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Undet => "UNDET",
        }
    }

    pub fn is_resolved(self) -> bool {
        self != Status::Undet
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Initial latch values and per-frame input values of a counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub init: Vec<bool>,
    pub inputs: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// CEX frame for SAT, proof bound for UNSAT, last refuted frame for UNDET.
    pub depth: u32,
    /// Wall seconds from run start until resolution (or until the run ended).
    pub elapsed: f64,
    /// Propagations from run start until resolution (or until the run ended).
    pub work: u64,
    pub cex: Option<Trace>,
    /// This property's own solver calls, one entry per frame it was queried.
    pub per_frame: Vec<FrameStat>,
}

impl Verdict {
    pub fn time(&self, metric: TimeMetric) -> f64 {
        match metric {
            TimeMetric::Wall => self.elapsed,
            TimeMetric::Work => self.work as f64,
        }
    }

    pub fn conflicts(&self) -> u64 {
        self.per_frame.iter().map(|f| f.conflicts).sum()
    }

    pub fn summary(&self, metric: TimeMetric) -> VerdictSummary {
        VerdictSummary {
            status: self.status,
            depth: self.depth,
            time: self.time(metric),
        }
    }
}

/// Status, depth and time of a verdict, as stored in the databases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub status: Status,
    pub depth: u32,
    /// Seconds or propagations, depending on the run's time metric.
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterVerdict {
    pub members: Vec<usize>,
    pub per_property: BTreeMap<usize, Verdict>,
    /// Statistics of all solver calls of the run, per frame.
    pub per_frame: Vec<FrameStat>,
    pub total_elapsed: f64,
    pub total_work: u64,
    pub total_conflicts: u64,
    /// Whether the run stopped because its budget ran out.
    pub exhausted: bool,
}

fn validate_cluster(n: &Netlist, cluster: &[usize]) -> Result<Vec<usize>, BmcError> {
    if cluster.is_empty() {
        return Err(BmcError::EmptyCluster);
    }
    let mut members = cluster.to_vec();
    members.sort_unstable();
    members.dedup();
    for &p in &members {
        n.property(p)?;
    }
    Ok(members)
}

/// Verifies `cluster` in one shared solver session with a total allowance of
/// `cfg.budget` times the number of members.
pub fn check_cluster(n: &Netlist, cluster: &[usize], cfg: &BmcConfig) -> Result<ClusterVerdict, BmcError> {
    let members = validate_cluster(n, cluster)?;
    let budget = cfg.budget.scaled(members.len());
    run(n, &members, budget, cfg)
}

/// Verifies cluster members under an explicit total allowance.
pub fn check_cluster_with_budget(
    n: &Netlist,
    cluster: &[usize],
    budget: Budget,
    cfg: &BmcConfig,
) -> Result<ClusterVerdict, BmcError> {
    let members = validate_cluster(n, cluster)?;
    run(n, &members, budget, cfg)
}

pub fn check_single(n: &Netlist, property: usize, cfg: &BmcConfig) -> Result<Verdict, BmcError> {
    let mut cv = check_cluster(n, &[property], cfg)?;
    Ok(cv.per_property.remove(&property).expect("member verdict"))
}

struct Progress {
    last_refuted: Option<u32>,
    frames: Vec<FrameStat>,
    verdict: Option<Verdict>,
}

fn run(n: &Netlist, members: &[usize], budget: Budget, cfg: &BmcConfig) -> Result<ClusterVerdict, BmcError> {
    cfg.validate()?;
    if !budget.is_positive() {
        return Err(BmcError::InvalidConfig("budget must be positive".into()));
    }
    let start = Instant::now();
    let deadline = match budget {
        Budget::WallTime(d) => Some(start + d),
        Budget::Conflicts(_) => None,
    };
    let conflict_cap = match budget {
        Budget::Conflicts(c) => Some(c),
        Budget::WallTime(_) => None,
    };

    let solver = Solver::with_config(SolverConfig {
        seed: cfg.seed,
        ..SolverConfig::default()
    });
    let mut enc = FrameEncoder::new(n, members, cfg.mode, solver);
    let mut progress: BTreeMap<usize, Progress> = members
        .iter()
        .map(|&p| {
            (
                p,
                Progress {
                    last_refuted: None,
                    frames: Vec::new(),
                    verdict: None,
                },
            )
        })
        .collect();
    let mut shared: Vec<FrameStat> = Vec::new();
    let mut exhausted = false;

    let mut frame = 0u32;
    'frames: loop {
        if cfg.max_depth.is_some_and(|m| frame > m) {
            break;
        }
        let unresolved: Vec<usize> = progress
            .iter()
            .filter(|(_, pr)| pr.verdict.is_none())
            .map(|(&p, _)| p)
            .collect();
        if unresolved.is_empty() {
            break;
        }
        if out_of_budget(&enc.solver, conflict_cap, deadline) {
            exhausted = true;
            break;
        }
        enc.encode_frame(frame);
        let mut frame_stat = FrameStat::new(frame);
        for p in unresolved {
            if out_of_budget(&enc.solver, conflict_cap, deadline) {
                exhausted = true;
            }
            if exhausted {
                break;
            }
            let limits = Limits {
                conflicts: conflict_cap.map(|c| c - enc.solver.conflict_total()),
                deadline,
            };
            let call_start = Instant::now();
            let bad = enc.bad_literal(frame, p);
            let result = enc.solver.solve(&[bad], limits);
            let now = Instant::now();
            let call = FrameStat {
                frame,
                conflicts: result.conflicts,
                work: result.propagations,
                solve_time: (now - call_start).as_secs_f64(),
                cumulative_time: (now - start).as_secs_f64(),
                cumulative_work: enc.solver.propagation_total(),
            };
            frame_stat.absorb(&call);
            let pr = progress.get_mut(&p).expect("member");
            pr.frames.push(call);
            match result.status {
                SolveStatus::Satisfiable => {
                    let model = result.model.as_deref().expect("model present");
                    pr.verdict = Some(Verdict {
                        status: Status::Sat,
                        depth: frame,
                        elapsed: call.cumulative_time,
                        work: call.cumulative_work,
                        cex: Some(enc.extract_trace(frame, model)),
                        per_frame: Vec::new(),
                    });
                }
                SolveStatus::Unsatisfiable => {
                    pr.last_refuted = Some(frame);
                    if cfg.proof_bound == Some(frame) {
                        pr.verdict = Some(Verdict {
                            status: Status::Unsat,
                            depth: frame,
                            elapsed: call.cumulative_time,
                            work: call.cumulative_work,
                            cex: None,
                            per_frame: Vec::new(),
                        });
                    }
                }
                SolveStatus::BudgetExhausted => exhausted = true,
            }
        }
        shared.push(frame_stat);
        if exhausted {
            break 'frames;
        }
        frame += 1;
    }

    let total_elapsed = start.elapsed().as_secs_f64();
    let total_work = enc.solver.propagation_total();
    let per_property = progress
        .into_iter()
        .map(|(p, pr)| {
            let mut verdict = pr.verdict.unwrap_or(Verdict {
                status: Status::Undet,
                depth: pr.last_refuted.unwrap_or(0),
                elapsed: total_elapsed,
                work: total_work,
                cex: None,
                per_frame: Vec::new(),
            });
            verdict.per_frame = pr.frames;
            (p, verdict)
        })
        .collect();
    Ok(ClusterVerdict {
        members: members.to_vec(),
        per_property,
        per_frame: shared,
        total_elapsed,
        total_work,
        total_conflicts: enc.solver.conflict_total(),
        exhausted,
    })
}

fn out_of_budget(solver: &Solver, conflict_cap: Option<u64>, deadline: Option<Instant>) -> bool {
    conflict_cap.is_some_and(|c| solver.conflict_total() >= c) || deadline.is_some_and(|d| Instant::now() >= d)
}

/// Simulates the trace and reports whether property `p` is violated at its
/// final frame.
pub fn replay_cex(n: &Netlist, property: usize, trace: &Trace) -> Result<bool, BmcError> {
    let bad = n.property(property)?;
    if trace.inputs.is_empty() {
        return Err(BmcError::EmptyTrace);
    }
    if trace.init.len() != n.num_latches() {
        return Err(BmcError::InputArityMismatch {
            expected: n.num_latches(),
            found: trace.init.len(),
        });
    }
    if let Some(bad_frame) = trace.inputs.iter().find(|f| f.len() != n.num_inputs()) {
        return Err(BmcError::InputArityMismatch {
            expected: n.num_inputs(),
            found: bad_frame.len(),
        });
    }
    let frames = n.simulate(&trace.init, &trace.inputs);
    let last = frames.last().expect("non-empty");
    Ok(last[bad.var() as usize] ^ bad.is_negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn conflicts(c: u64, mode: UnfoldMode) -> BmcConfig {
        BmcConfig {
            budget: Budget::Conflicts(c),
            mode,
            ..BmcConfig::default()
        }
    }

    #[test]
    fn constant_false_is_proved_at_bound() {
        let n = Netlist::parse_aiger("aag 0 0 0 0 0 1\n0\n").unwrap();
        let cfg = BmcConfig {
            proof_bound: Some(4),
            ..conflicts(100, UnfoldMode::InitialState)
        };
        let v = check_single(&n, 0, &cfg).unwrap();
        assert_eq!((v.status, v.depth), (Status::Unsat, 4));
        assert_eq!(v.per_frame.len(), 5);
    }

    #[test]
    fn input_property_fails_immediately() {
        let n = Netlist::parse_aiger("aag 1 1 0 0 0 1\n2\n2\n").unwrap();
        let v = check_single(&n, 0, &conflicts(100, UnfoldMode::InitialState)).unwrap();
        assert_eq!((v.status, v.depth), (Status::Sat, 0));
        assert!(replay_cex(&n, 0, v.cex.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn counter_reaches_five_at_depth_five() {
        let n = generate::counter(3, 5, true);
        let v = check_single(&n, 0, &conflicts(10_000, UnfoldMode::InitialState)).unwrap();
        assert_eq!((v.status, v.depth), (Status::Sat, 5));
        let cex = v.cex.unwrap();
        assert_eq!(cex.inputs.len(), 6);
        assert!(replay_cex(&n, 0, &cex).unwrap());
        for frame in 0..5 {
            let mut mutated = cex.clone();
            mutated.inputs[frame][0] ^= true;
            assert!(!replay_cex(&n, 0, &mutated).unwrap(), "flip at frame {frame}");
        }
    }

    #[test]
    fn inductive_mode_finds_unreachable_state() {
        let n = generate::counter(3, 5, true);
        let v = check_single(&n, 0, &conflicts(100, UnfoldMode::Inductive)).unwrap();
        assert_eq!((v.status, v.depth), (Status::Sat, 0));
        assert!(replay_cex(&n, 0, v.cex.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn replay_rejects_all_zero_inputs() {
        let n = generate::counter(3, 5, true);
        let trace = Trace {
            init: vec![false; 3],
            inputs: vec![vec![false]; 2],
        };
        assert!(!replay_cex(&n, 0, &trace).unwrap());
    }

    #[test]
    fn replay_arity_errors() {
        let n = generate::counter(3, 5, true);
        let bad_inputs = Trace {
            init: vec![false; 3],
            inputs: vec![vec![false, true]],
        };
        assert_eq!(
            replay_cex(&n, 0, &bad_inputs),
            Err(BmcError::InputArityMismatch { expected: 1, found: 2 })
        );
        let empty = Trace {
            init: vec![false; 3],
            inputs: vec![],
        };
        assert_eq!(replay_cex(&n, 0, &empty), Err(BmcError::EmptyTrace));
    }

    #[test]
    fn independent_counters_in_one_cluster() {
        let n = generate::two_counters(3, 3, 5);
        let cv = check_cluster(&n, &[0, 1], &conflicts(10_000, UnfoldMode::InitialState)).unwrap();
        assert_eq!(cv.per_property[&0].status, Status::Sat);
        assert_eq!(cv.per_property[&0].depth, 3);
        assert_eq!(cv.per_property[&1].depth, 5);
        // halted once both were resolved
        assert_eq!(cv.per_frame.len(), 6);
        assert!(!cv.exhausted);
    }

    #[test]
    fn frame_accounting_matches_solver_total() {
        let n = generate::steering_puzzle(3, 8, 2, 5, 2);
        let cv = check_cluster(&n, &[0, 1], &conflicts(2_000, UnfoldMode::InitialState)).unwrap();
        let sum: u64 = cv.per_frame.iter().map(|f| f.conflicts).sum();
        assert_eq!(sum, cv.total_conflicts);
        let per_prop: u64 = cv.per_property.values().map(|v| v.conflicts()).sum();
        assert_eq!(per_prop, cv.total_conflicts);
    }

    #[test]
    fn max_depth_caps_undet_depth() {
        let n = Netlist::parse_aiger("aag 0 0 0 0 0 1\n0\n").unwrap();
        let cfg = BmcConfig {
            max_depth: Some(3),
            ..conflicts(100, UnfoldMode::InitialState)
        };
        let v = check_single(&n, 0, &cfg).unwrap();
        assert_eq!((v.status, v.depth), (Status::Undet, 3));
    }

    #[test]
    fn errors() {
        let n = generate::counter(3, 5, true);
        let cfg = conflicts(10, UnfoldMode::Inductive);
        assert_eq!(check_cluster(&n, &[], &cfg).unwrap_err(), BmcError::EmptyCluster);
        assert!(matches!(check_single(&n, 3, &cfg), Err(BmcError::Netlist(_))));
        let bad = BmcConfig {
            proof_bound: Some(5),
            max_depth: Some(2),
            ..cfg.clone()
        };
        assert!(matches!(check_single(&n, 0, &bad), Err(BmcError::InvalidConfig(_))));
        let zero = conflicts(0, UnfoldMode::Inductive);
        assert!(matches!(check_single(&n, 0, &zero), Err(BmcError::InvalidConfig(_))));
    }
}

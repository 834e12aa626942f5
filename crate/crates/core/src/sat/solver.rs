use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heap::VarHeap;
use super::{Cnf, Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Unassigned,
    True,
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Satisfiable,
    Unsatisfiable,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Value of every variable, present iff satisfiable.
    pub model: Option<Vec<bool>>,
    pub conflicts: u64,
    pub propagations: u64,
}

impl SolveResult {
    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.model
            .as_ref()
            .map(|m| m.get(lit.var() as usize).copied().unwrap_or(false) != lit.is_negated())
    }
}

/// Per-call resource limits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn none() -> Limits {
        Limits::default()
    }

    pub fn conflicts(n: u64) -> Limits {
        Limits {
            conflicts: Some(n),
            deadline: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub seed: u64,
    pub var_decay: f64,
    /// Conflicts in the first restart interval; later intervals follow the
    /// Luby sequence scaled by this value.
    pub restart_base: u64,
    /// Searches stop with `BudgetExhausted` once this many learnt clauses
    /// have been stored.
    pub max_learnts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            var_decay: 0.95,
            restart_base: 100,
            max_learnts: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

enum SearchOutcome {
    Sat,
    Unsat,
    Restart,
    OutOfBudget,
}

/// Incremental CDCL solver session.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    ok: bool,
    clauses: Vec<Clause>,
    num_learnts: usize,
    original: Cnf,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    rng: ChaCha8Rng,
    total_conflicts: u64,
    total_propagations: u64,
    solves: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver::with_config(SolverConfig::default())
    }

    pub fn with_config(config: SolverConfig) -> Solver {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Solver {
            config,
            ok: true,
            clauses: Vec::new(),
            num_learnts: 0,
            original: Cnf::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            rng,
            total_conflicts: 0,
            total_propagations: 0,
            solves: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn num_clauses(&self) -> usize {
        self.original.clauses.len()
    }

    pub fn num_learnts(&self) -> usize {
        self.num_learnts
    }

    /// Sum of conflicts over every `solve` call so far.
    pub fn conflict_total(&self) -> u64 {
        self.total_conflicts
    }

    pub fn propagation_total(&self) -> u64 {
        self.total_propagations
    }

    pub fn solve_calls(&self) -> u64 {
        self.solves
    }

    /// False once the clause set itself has been shown unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as Var;
        self.assigns.push(Value::Unassigned);
        self.level.push(0);
        self.reason.push(None);
        // tiny seeded perturbation breaks activity ties deterministically
        self.activity.push(self.rng.gen::<f64>() * 1e-5);
        self.polarity.push(true);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        v
    }

    fn ensure_var(&mut self, v: Var) {
        while self.num_vars() <= v {
            self.new_var();
        }
    }

    /// The original (non-learnt) clauses added so far.
    pub fn export_cnf(&self) -> Cnf {
        let mut cnf = self.original.clone();
        cnf.num_vars = cnf.num_vars.max(self.num_vars());
        cnf
    }

    fn value(&self, lit: Lit) -> Value {
        match self.assigns[lit.var() as usize] {
            Value::Unassigned => Value::Unassigned,
            Value::True if lit.is_negated() => Value::False,
            Value::False if lit.is_negated() => Value::True,
            v => v,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.ensure_var(l.var());
        }
        self.original.add_clause(lits.to_vec());
        if !self.ok {
            return;
        }
        self.cancel_until(0);

        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if c.iter().any(|&l| self.value(l) == Value::True) {
            return;
        }
        c.retain(|&l| self.value(l) != Value::False);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(c, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(Watcher {
            clause: idx,
            blocker: lits[1],
        });
        self.watches[lits[1].index()].push(Watcher {
            clause: idx,
            blocker: lits[0],
        });
        self.clauses.push(Clause { lits });
        if learnt {
            self.num_learnts += 1;
        }
        idx
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<u32>) {
        let v = lit.var() as usize;
        debug_assert_eq!(self.assigns[v], Value::Unassigned);
        self.assigns[v] = if lit.is_negated() {
            Value::False
        } else {
            Value::True
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Unit propagation; returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.total_propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let ci = w.clause as usize;
                {
                    let lits = &mut self.clauses[ci].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[ci].lits[0];
                let watcher = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == Value::True {
                    ws[j] = watcher;
                    j += 1;
                    continue;
                }
                let len = self.clauses[ci].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[ci].lits[k];
                    if self.value(l) != Value::False {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[l.index()].push(watcher);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = watcher;
                j += 1;
                if self.value(first) == Value::False {
                    conflict = Some(w.clause);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.clause));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump(&mut self, v: Var) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::new(0, false)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            let lits = self.clauses[conflict as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(q.var());
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
            conflict = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict involves the current level");

        // drop literals implied by other literals of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                match self.reason[l.var() as usize] {
                    None => true,
                    Some(r) => self.clauses[r as usize].lits[1..].iter().any(|q| {
                        let v = q.var() as usize;
                        !self.seen[v] && self.level[v] > 0
                    }),
                }
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(l, k)| k.then_some(l))
            .collect();

        let backjump = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, l)| (self.level[l.var() as usize], std::cmp::Reverse(*i)))
                .expect("at least two literals");
            learnt.swap(1, best);
            self.level[learnt[1].var() as usize]
        };
        (learnt, backjump)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let stop = self.trail_lim[level as usize];
        for i in (stop..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var() as usize;
            self.assigns[v] = Value::Unassigned;
            self.reason[v] = None;
            self.polarity[v] = lit.is_negated();
            self.heap.insert(lit.var(), &self.activity);
        }
        self.trail.truncate(stop);
        self.qhead = stop;
        self.trail_lim.truncate(level as usize);
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == Value::Unassigned {
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    fn search(
        &mut self,
        assumptions: &[Lit],
        restart_after: u64,
        limits: &Limits,
        conflicts: &mut u64,
    ) -> SearchOutcome {
        let mut local = 0u64;
        let mut decisions = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                *conflicts += 1;
                local += 1;
                self.total_conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchOutcome::Unsat;
                }
                let (learnt, backjump) = self.analyze(confl);
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let idx = self.attach(learnt, true);
                    self.enqueue(asserting, Some(idx));
                }
                self.var_inc /= self.config.var_decay;
                if limits.deadline.is_some_and(|d| Instant::now() >= d) {
                    return SearchOutcome::OutOfBudget;
                }
                continue;
            }

            if limits.conflicts.is_some_and(|c| *conflicts >= c)
                || self.num_learnts >= self.config.max_learnts
            {
                return SearchOutcome::OutOfBudget;
            }
            if local >= restart_after {
                return SearchOutcome::Restart;
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    Value::True => self.trail_lim.push(self.trail.len()),
                    Value::False => return SearchOutcome::Unsat,
                    Value::Unassigned => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(a) => a,
                None => {
                    decisions += 1;
                    if decisions.is_multiple_of(4096) && limits.deadline.is_some_and(|d| Instant::now() >= d) {
                        return SearchOutcome::OutOfBudget;
                    }
                    match self.pick_branch() {
                        Some(l) => l,
                        None => return SearchOutcome::Sat,
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        }
    }

    /// Solves the clause set under `assumptions`. Learnt clauses are kept
    /// for later calls; the assignment is cleared before returning.
    pub fn solve(&mut self, assumptions: &[Lit], limits: Limits) -> SolveResult {
        self.solves += 1;
        for a in assumptions {
            self.ensure_var(a.var());
        }
        let props_before = self.total_propagations;
        let mut conflicts = 0u64;
        let result = |status, model, conflicts, solver: &Solver| SolveResult {
            status,
            model,
            conflicts,
            propagations: solver.total_propagations - props_before,
        };
        if !self.ok {
            return result(SolveStatus::Unsatisfiable, None, 0, self);
        }

        let mut round = 0u32;
        let status = loop {
            let restart_after = luby(2.0, round) as u64 * self.config.restart_base;
            round += 1;
            match self.search(assumptions, restart_after, &limits, &mut conflicts) {
                SearchOutcome::Sat => {
                    let model: Vec<bool> = self.assigns.iter().map(|&v| v == Value::True).collect();
                    self.cancel_until(0);
                    return result(SolveStatus::Satisfiable, Some(model), conflicts, self);
                }
                SearchOutcome::Unsat => break SolveStatus::Unsatisfiable,
                SearchOutcome::OutOfBudget => break SolveStatus::BudgetExhausted,
                SearchOutcome::Restart => self.cancel_until(0),
            }
        };
        self.cancel_until(0);
        result(status, None, conflicts, self)
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ... scaled by powers of `y`.
fn luby(y: f64, mut x: u32) -> f64 {
    let mut size = 1u32;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

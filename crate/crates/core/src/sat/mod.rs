//! A CDCL SAT solver with an incremental, assumption-based interface.
//!
//! Clauses (original and learnt) persist across [`Solver::solve`] calls, so
//! knowledge gathered while answering one query is available to the next.
//! There is no clause deletion; a cap on learnt clauses turns runaway
//! searches into [`SolveStatus::BudgetExhausted`].

mod cnf;
mod heap;
mod solver;

use std::fmt;
use std::ops::Not;

pub use cnf::Cnf;
pub use solver::{Limits, SolveResult, SolveStatus, Solver, SolverConfig};

/// A solver variable, numbered from 0.
pub type Var = u32;

/// A solver literal: `2 * var` for the positive phase, `2 * var + 1` for the
/// negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }

    pub fn positive(var: Var) -> Lit {
        Lit::new(var, false)
    }

    /// DIMACS convention: `v` is variable `v - 1`, `-v` its negation.
    pub fn from_dimacs(d: i32) -> Lit {
        assert!(d != 0, "0 is not a DIMACS literal");
        Lit::new(d.unsigned_abs() - 1, d < 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var() as i32 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub fn dimacs_clause(lits: &[i32]) -> Vec<Lit> {
    lits.iter().map(|&d| Lit::from_dimacs(d)).collect()
}

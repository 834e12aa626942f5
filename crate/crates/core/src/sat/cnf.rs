use std::fmt::Write as _;

use super::Lit;

/// A clause set in conjunctive normal form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf::default()
    }

    pub fn add_clause(&mut self, lits: Vec<Lit>) {
        if let Some(max) = lits.iter().map(|l| l.var() + 1).max() {
            self.num_vars = self.num_vars.max(max);
        }
        self.clauses.push(lits);
    }

    /// True iff every clause has a literal made true by `model`
    /// (indexed by variable).
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| model.get(l.var() as usize).is_some_and(|&v| v != l.is_negated()))
        })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::dimacs_clause;

    #[test]
    fn dimacs_rendering() {
        let mut cnf = Cnf::new();
        cnf.add_clause(dimacs_clause(&[1, -3]));
        cnf.add_clause(dimacs_clause(&[2]));
        assert_eq!(cnf.to_dimacs(), "p cnf 3 2\n1 -3 0\n2 0\n");
        assert!(cnf.satisfied_by(&[true, true, false]));
        assert!(!cnf.satisfied_by(&[false, true, true]));
    }
}

use crate::netlist::{Lit as AigLit, Netlist, Reset, UnfoldMode};
use crate::sat::{Lit, Solver};

use super::Trace;

/// Tseitin encoding of the unrolled cone, one frame at a time.
pub(super) struct FrameEncoder<'a> {
    netlist: &'a Netlist,
    pub solver: Solver,
    mode: UnfoldMode,
    members: Vec<usize>,
    cone_inputs: Vec<usize>,
    cone_latches: Vec<usize>,
    cone_ands: Vec<usize>,
    true_lit: Lit,
    /// Per frame, the solver literal of every netlist variable in the cone.
    frames: Vec<Vec<Option<Lit>>>,
}

impl<'a> FrameEncoder<'a> {
    pub fn new(netlist: &'a Netlist, members: &[usize], mode: UnfoldMode, mut solver: Solver) -> Self {
        let roots: Vec<AigLit> = members.iter().map(|&p| netlist.properties()[p]).collect();
        let cone = netlist.coi_of(&roots);
        let t = Lit::positive(solver.new_var());
        solver.add_clause(&[t]);
        FrameEncoder {
            netlist,
            solver,
            mode,
            members: members.to_vec(),
            cone_inputs: cone.inputs,
            cone_latches: cone.latches,
            cone_ands: cone.ands,
            true_lit: t,
            frames: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Lit {
        Lit::positive(self.solver.new_var())
    }

    fn resolve(&self, frame: usize, lit: AigLit) -> Lit {
        let base = if lit.var() == 0 {
            !self.true_lit
        } else {
            self.frames[frame][lit.var() as usize].expect("cone variable encoded")
        };
        if lit.is_negated() {
            !base
        } else {
            base
        }
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let f = !self.true_lit;
        if a == f || b == f || a == !b {
            return f;
        }
        if a == self.true_lit || a == b {
            return b;
        }
        if b == self.true_lit {
            return a;
        }
        let x = self.fresh();
        self.solver.add_clause(&[!x, a]);
        self.solver.add_clause(&[!x, b]);
        self.solver.add_clause(&[x, !a, !b]);
        x
    }

    pub fn encode_frame(&mut self, frame: u32) {
        let k = frame as usize;
        assert_eq!(k, self.frames.len(), "frames are encoded in order");
        let n = self.netlist;
        self.frames.push(vec![None; n.max_var() as usize + 1]);

        for idx in 0..self.cone_inputs.len() {
            let var = n.inputs()[self.cone_inputs[idx]].var() as usize;
            let l = self.fresh();
            self.frames[k][var] = Some(l);
        }
        for idx in 0..self.cone_latches.len() {
            let latch = n.latches()[self.cone_latches[idx]];
            let value = if k == 0 {
                match (self.mode, latch.reset) {
                    (UnfoldMode::InitialState, Reset::Zero) => !self.true_lit,
                    (UnfoldMode::InitialState, Reset::One) => self.true_lit,
                    _ => self.fresh(),
                }
            } else {
                self.resolve(k - 1, latch.next)
            };
            self.frames[k][latch.lit.var() as usize] = Some(value);
        }
        for idx in 0..self.cone_ands.len() {
            let gate = n.ands()[self.cone_ands[idx]];
            let a = self.resolve(k, gate.rhs0);
            let b = self.resolve(k, gate.rhs1);
            let x = self.and(a, b);
            self.frames[k][gate.lhs.var() as usize] = Some(x);
        }
    }

    pub fn bad_literal(&self, frame: u32, property: usize) -> Lit {
        debug_assert!(self.members.contains(&property));
        self.resolve(frame as usize, self.netlist.properties()[property])
    }

    fn model_value(&self, model: &[bool], frame: usize, var: u32) -> bool {
        match self.frames[frame][var as usize] {
            Some(l) => model[l.var() as usize] != l.is_negated(),
            None => false,
        }
    }

    /// Reads a counterexample of length `frame + 1` out of a model.
    /// Signals outside the cone are reported as 0 (or their reset value).
    pub fn extract_trace(&self, frame: u32, model: &[bool]) -> Trace {
        let n = self.netlist;
        let init = n
            .latches()
            .iter()
            .map(|latch| {
                let in_cone = self.frames[0][latch.lit.var() as usize].is_some();
                match (in_cone, self.mode, latch.reset) {
                    (true, _, _) => self.model_value(model, 0, latch.lit.var()),
                    (false, UnfoldMode::InitialState, Reset::One) => true,
                    _ => false,
                }
            })
            .collect();
        let inputs = (0..=frame as usize)
            .map(|k| n.inputs().iter().map(|i| self.model_value(model, k, i.var())).collect())
            .collect();
        Trace { init, inputs }
    }
}

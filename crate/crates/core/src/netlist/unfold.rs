use serde::{Deserialize, Serialize};

use super::{AndGate, Lit, Netlist, NetlistError, Reset};

/// How latches are initialized in frame 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnfoldMode {
    /// Latches start at their reset values; unknown resets are free.
    InitialState,
    /// All latches start free, covering every state of the design.
    Inductive,
}

/// A combinational circuit obtained by copying the transition relation
/// `frames` times.
#[derive(Debug, Clone)]
pub struct UnfoldedCircuit {
    pub mode: UnfoldMode,
    pub frames: usize,
    pub max_var: u32,
    /// Free variables in creation order.
    pub free_vars: Vec<Lit>,
    pub ands: Vec<AndGate>,
    /// `frame_inputs[k][i]`: input `i` of the original design at frame `k`.
    pub frame_inputs: Vec<Vec<Lit>>,
    /// Frame-0 value of each latch: a constant or a free variable.
    pub initial_latches: Vec<Lit>,
    /// `bads[k][p]`: property `p` evaluated at frame `k`.
    pub bads: Vec<Vec<Lit>>,
}

struct Unroller {
    next_var: u32,
    free_vars: Vec<Lit>,
    ands: Vec<AndGate>,
}

impl Unroller {
    fn fresh(&mut self) -> Lit {
        let lit = Lit::from_var(self.next_var, false);
        self.next_var += 1;
        lit
    }

    fn free(&mut self) -> Lit {
        let lit = self.fresh();
        self.free_vars.push(lit);
        lit
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if a == Lit::FALSE || b == Lit::FALSE || a == !b {
            return Lit::FALSE;
        }
        if a == Lit::TRUE || a == b {
            return b;
        }
        if b == Lit::TRUE {
            return a;
        }
        let lhs = self.fresh();
        self.ands.push(AndGate { lhs, rhs0: a, rhs1: b });
        lhs
    }
}

impl Netlist {
    pub fn unfold(&self, frames: usize, mode: UnfoldMode) -> Result<UnfoldedCircuit, NetlistError> {
        if frames == 0 {
            return Err(NetlistError::ZeroFrames);
        }
        let mut u = Unroller {
            next_var: 1,
            free_vars: Vec::new(),
            ands: Vec::new(),
        };
        let mut frame_inputs = Vec::with_capacity(frames);
        let mut bads = Vec::with_capacity(frames);

        let mut latch_vals: Vec<Lit> = Vec::with_capacity(self.latches.len());
        let mut first_inputs = Vec::with_capacity(self.inputs.len());
        for _ in &self.inputs {
            first_inputs.push(u.free());
        }
        for latch in &self.latches {
            let v = match (mode, latch.reset) {
                (UnfoldMode::InitialState, Reset::Zero) => Lit::FALSE,
                (UnfoldMode::InitialState, Reset::One) => Lit::TRUE,
                _ => u.free(),
            };
            latch_vals.push(v);
        }
        let initial_latches = latch_vals.clone();

        let mut map = vec![Lit::FALSE; self.max_var as usize + 1];
        for k in 0..frames {
            let inputs = if k == 0 {
                std::mem::take(&mut first_inputs)
            } else {
                self.inputs.iter().map(|_| u.free()).collect()
            };
            for (i, lit) in self.inputs.iter().enumerate() {
                map[lit.var() as usize] = inputs[i];
            }
            for (i, latch) in self.latches.iter().enumerate() {
                map[latch.lit.var() as usize] = latch_vals[i];
            }
            let resolve = |map: &[Lit], lit: Lit| {
                let base = map[lit.var() as usize];
                if lit.is_negated() {
                    !base
                } else {
                    base
                }
            };
            for gate in &self.ands {
                let a = resolve(&map, gate.rhs0);
                let b = resolve(&map, gate.rhs1);
                map[gate.lhs.var() as usize] = u.and(a, b);
            }
            bads.push(self.properties().iter().map(|&p| resolve(&map, p)).collect());
            latch_vals = self.latches.iter().map(|l| resolve(&map, l.next)).collect();
            frame_inputs.push(inputs);
        }

        Ok(UnfoldedCircuit {
            mode,
            frames,
            max_var: u.next_var - 1,
            free_vars: u.free_vars,
            ands: u.ands,
            frame_inputs,
            initial_latches,
            bads,
        })
    }
}

impl UnfoldedCircuit {
    /// Evaluates every variable for 64 parallel assignments of the free
    /// variables (one word per free variable, in `free_vars` order).
    pub fn simulate_words(&self, free_values: &[u64]) -> Vec<u64> {
        assert_eq!(free_values.len(), self.free_vars.len());
        let mut values = vec![0u64; self.max_var as usize + 1];
        for (lit, &w) in self.free_vars.iter().zip(free_values) {
            values[lit.var() as usize] = w;
        }
        for gate in &self.ands {
            let a = word(&values, gate.rhs0);
            let b = word(&values, gate.rhs1);
            values[gate.lhs.var() as usize] = a & b;
        }
        values
    }

    pub fn eval(&self, free_values: &[bool], lit: Lit) -> bool {
        let words: Vec<u64> = free_values.iter().map(|&b| b as u64).collect();
        let values = self.simulate_words(&words);
        word(&values, lit) & 1 == 1
    }
}

pub(crate) fn word(values: &[u64], lit: Lit) -> u64 {
    let w = values[lit.var() as usize];
    if lit.is_negated() {
        !w
    } else {
        w
    }
}

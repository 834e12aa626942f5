use super::{AndGate, Latch, Lit, Netlist, NetlistError, Reset};

/// Incremental construction of a netlist; variables are numbered in
/// creation order.
#[derive(Debug, Default)]
pub struct AigBuilder {
    next_var: u32,
    inputs: Vec<Lit>,
    latches: Vec<Latch>,
    ands: Vec<AndGate>,
    outputs: Vec<Lit>,
    bads: Vec<Lit>,
}

impl AigBuilder {
    pub fn new() -> AigBuilder {
        AigBuilder {
            next_var: 1,
            ..Default::default()
        }
    }

    fn fresh(&mut self) -> Lit {
        let lit = Lit::from_var(self.next_var, false);
        self.next_var += 1;
        lit
    }

    pub fn input(&mut self) -> Lit {
        let lit = self.fresh();
        self.inputs.push(lit);
        lit
    }

    /// Declares a latch; its next-state function is set later with
    /// [`AigBuilder::set_next`] and defaults to holding its value.
    pub fn latch(&mut self, reset: Reset) -> Lit {
        let lit = self.fresh();
        self.latches.push(Latch {
            lit,
            next: lit,
            reset,
        });
        lit
    }

    pub fn set_next(&mut self, latch: Lit, next: Lit) {
        let slot = self
            .latches
            .iter_mut()
            .find(|l| l.lit == latch.positive())
            .expect("not a latch of this builder");
        slot.next = next;
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let lhs = self.fresh();
        self.ands.push(AndGate {
            lhs,
            rhs0: a,
            rhs1: b,
        });
        lhs
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let both = self.and(a, b);
        let neither = self.and(!a, !b);
        self.and(!both, !neither)
    }

    pub fn and_all(&mut self, lits: &[Lit]) -> Lit {
        let mut acc = match lits.first() {
            Some(&l) => l,
            None => return Lit::TRUE,
        };
        for &l in &lits[1..] {
            acc = self.and(acc, l);
        }
        acc
    }

    /// Equality of a bit vector (LSB first) with a constant.
    pub fn equals_const(&mut self, bits: &[Lit], value: u64) -> Lit {
        let lits: Vec<Lit> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if value >> i & 1 == 1 { b } else { !b })
            .collect();
        self.and_all(&lits)
    }

    pub fn output(&mut self, lit: Lit) {
        self.outputs.push(lit);
    }

    pub fn bad(&mut self, lit: Lit) {
        self.bads.push(lit);
    }

    pub fn build(self, name: impl Into<String>) -> Result<Netlist, NetlistError> {
        Netlist::new(
            name,
            self.next_var - 1,
            self.inputs,
            self.latches,
            self.outputs,
            self.bads,
            self.ands,
        )
    }
}

use super::{Lit, Netlist};

impl Netlist {
    /// Evaluates one time frame. Returns the value of every variable.
    pub fn eval_frame(&self, latch_values: &[bool], input_values: &[bool]) -> Vec<bool> {
        assert_eq!(latch_values.len(), self.latches.len());
        assert_eq!(input_values.len(), self.inputs.len());
        let mut values = vec![false; self.max_var as usize + 1];
        for (lit, &v) in self.inputs.iter().zip(input_values) {
            values[lit.var() as usize] = v;
        }
        for (latch, &v) in self.latches.iter().zip(latch_values) {
            values[latch.lit.var() as usize] = v;
        }
        for gate in &self.ands {
            values[gate.lhs.var() as usize] = value(&values, gate.rhs0) && value(&values, gate.rhs1);
        }
        values
    }

    pub fn next_state(&self, frame_values: &[bool]) -> Vec<bool> {
        self.latches.iter().map(|l| value(frame_values, l.next)).collect()
    }

    /// Simulates from `init` under the per-frame inputs and returns the
    /// variable values of every frame.
    pub fn simulate(&self, init: &[bool], inputs: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let mut state = init.to_vec();
        let mut frames = Vec::with_capacity(inputs.len());
        for frame_inputs in inputs {
            let values = self.eval_frame(&state, frame_inputs);
            state = self.next_state(&values);
            frames.push(values);
        }
        frames
    }
}

pub(crate) fn value(values: &[bool], lit: Lit) -> bool {
    values[lit.var() as usize] ^ lit.is_negated()
}

#[cfg(test)]
mod tests {
    use crate::generate;

    #[test]
    fn counter_counts_when_enabled() {
        let n = generate::counter(3, 5, true);
        let frames = n.simulate(&[false; 3], &vec![vec![true]; 6]);
        let bad = n.properties()[0];
        let fired: Vec<bool> = frames.iter().map(|v| super::value(v, bad)).collect();
        assert_eq!(fired, vec![false, false, false, false, false, true]);
    }
}

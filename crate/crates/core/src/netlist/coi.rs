use serde::{Deserialize, Serialize};

use super::{AndGate, Latch, Lit, Netlist, NetlistError, Symbol, SymbolKind, VarKind};

/// Element counts of a cone of influence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoiSizes {
    pub inputs: usize,
    pub latches: usize,
    pub ands: usize,
}

impl CoiSizes {
    pub fn total(&self) -> usize {
        self.inputs + self.latches + self.ands
    }

    /// L1 distance over (inputs, latches, ands).
    pub fn l1(&self, other: &CoiSizes) -> u64 {
        (self.inputs.abs_diff(other.inputs)
            + self.latches.abs_diff(other.latches)
            + self.ands.abs_diff(other.ands)) as u64
    }
}

/// A safety property with its cone-of-influence statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Property {
    pub index: usize,
    pub bad_literal: Lit,
    pub coi: CoiSizes,
}

/// Members of a cone of influence, as sorted indices into the netlist's
/// input, latch and AND lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoiSet {
    pub inputs: Vec<usize>,
    pub latches: Vec<usize>,
    pub ands: Vec<usize>,
}

impl CoiSet {
    pub fn sizes(&self) -> CoiSizes {
        CoiSizes {
            inputs: self.inputs.len(),
            latches: self.latches.len(),
            ands: self.ands.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len() + self.latches.len() + self.ands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Netlist {
    /// Everything that transitively feeds `roots`, crossing latches into
    /// their next-state functions.
    pub fn coi_of(&self, roots: &[Lit]) -> CoiSet {
        let mut seen = vec![false; self.max_var as usize + 1];
        let mut stack: Vec<u32> = roots.iter().map(|l| l.var()).collect();
        let mut set = CoiSet::default();
        while let Some(var) = stack.pop() {
            if std::mem::replace(&mut seen[var as usize], true) {
                continue;
            }
            match self.kinds[var as usize] {
                VarKind::Const | VarKind::Undefined => {}
                VarKind::Input(i) => set.inputs.push(i),
                VarKind::Latch(i) => {
                    set.latches.push(i);
                    stack.push(self.latches[i].next.var());
                }
                VarKind::And(i) => {
                    set.ands.push(i);
                    let gate = &self.ands[i];
                    stack.push(gate.rhs0.var());
                    stack.push(gate.rhs1.var());
                }
            }
        }
        set.inputs.sort_unstable();
        set.latches.sort_unstable();
        set.ands.sort_unstable();
        set
    }

    pub fn extract_coi(&self, property: usize) -> Result<Property, NetlistError> {
        let bad = self.property(property)?;
        Ok(Property {
            index: property,
            bad_literal: bad,
            coi: self.coi_of(&[bad]).sizes(),
        })
    }

    pub fn all_properties(&self) -> Vec<Property> {
        (0..self.num_properties())
            .map(|p| self.extract_coi(p).expect("index in range"))
            .collect()
    }

    /// A standalone netlist holding exactly the cone of `property`, which
    /// becomes its single bad output. Variables are renumbered densely:
    /// inputs, then latches, then ANDs, each in original order.
    pub fn restrict_to_coi(&self, property: usize) -> Result<Netlist, NetlistError> {
        let bad = self.property(property)?;
        let cone = self.coi_of(&[bad]);

        let mut var_map = vec![0u32; self.max_var as usize + 1];
        let mut next = 1u32;
        for &i in &cone.inputs {
            var_map[self.inputs[i].var() as usize] = next;
            next += 1;
        }
        for &i in &cone.latches {
            var_map[self.latches[i].lit.var() as usize] = next;
            next += 1;
        }
        for &i in &cone.ands {
            var_map[self.ands[i].lhs.var() as usize] = next;
            next += 1;
        }
        let map = |lit: Lit| Lit::from_var(var_map[lit.var() as usize], lit.is_negated());

        let inputs = cone.inputs.iter().map(|&i| map(self.inputs[i])).collect();
        let latches = cone
            .latches
            .iter()
            .map(|&i| {
                let l = self.latches[i];
                Latch {
                    lit: map(l.lit),
                    next: map(l.next),
                    reset: l.reset,
                }
            })
            .collect();
        let ands = cone
            .ands
            .iter()
            .map(|&i| {
                let g = self.ands[i];
                AndGate {
                    lhs: map(g.lhs),
                    rhs0: map(g.rhs0),
                    rhs1: map(g.rhs1),
                }
            })
            .collect();

        let bad_kind = if self.bads.is_empty() {
            SymbolKind::Output
        } else {
            SymbolKind::Bad
        };
        let symbols = self
            .symbols
            .iter()
            .filter_map(|s| {
                let index = match s.kind {
                    SymbolKind::Input => cone.inputs.binary_search(&s.index).ok()?,
                    SymbolKind::Latch => cone.latches.binary_search(&s.index).ok()?,
                    k if k == bad_kind && s.index == property => 0,
                    _ => return None,
                };
                let kind = if s.kind == bad_kind { SymbolKind::Bad } else { s.kind };
                Some(Symbol {
                    kind,
                    index,
                    name: s.name.clone(),
                })
            })
            .collect();

        Ok(Netlist::new(
            self.name.clone(),
            next - 1,
            inputs,
            latches,
            Vec::new(),
            vec![map(bad)],
            ands,
        )?
        .with_symbols(symbols))
    }
}

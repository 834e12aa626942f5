//! And-Inverter Graph netlists.
//!
//! Literals follow the AIGER encoding: `2 * var` is the positive literal of a
//! variable, `2 * var + 1` its negation, and variable 0 is the constant
//! (literal 0 is false, literal 1 is true).

mod aiger;
mod builder;
mod coi;
mod sim;
mod unfold;

use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::AigBuilder;
pub use coi::{CoiSet, CoiSizes, Property};
pub use unfold::{UnfoldMode, UnfoldedCircuit};
pub(crate) use unfold::word as word_value;

/// An AIGER literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(raw: u32) -> Lit {
        Lit(raw)
    }

    pub fn from_var(var: u32, negated: bool) -> Lit {
        Lit(var * 2 + negated as u32)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_constant(self) -> bool {
        self.0 < 2
    }

    /// The literal with the sign bit cleared.
    pub fn positive(self) -> Lit {
        Lit(self.0 & !1)
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
        write!(f, "{}", self.0)
    }
}

/// Initial value of a latch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reset {
    Zero,
    One,
    /// Uninitialized: the latch starts in either value.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub lit: Lit,
    pub next: Lit,
    pub reset: Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    pub lhs: Lit,
    pub rhs0: Lit,
    pub rhs1: Lit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Input,
    Latch,
    Output,
    Bad,
}

impl SymbolKind {
    fn tag(self) -> char {
        match self {
            SymbolKind::Input => 'i',
            SymbolKind::Latch => 'l',
            SymbolKind::Output => 'o',
            SymbolKind::Bad => 'b',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("malformed AIGER header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("binary AIGER is not supported, convert to ASCII `aag` first")]
    BinaryFormat,
    #[error("unsupported AIGER section: {0}")]
    Unsupported(&'static str),
    #[error("literal {lit} exceeds maximum variable index {max_var}")]
    LiteralOutOfRange { lit: u32, max_var: u32 },
    #[error("literal {lit} is used before it is defined")]
    NonTopologicalDefinition { lit: u32 },
    #[error("variable {var} is defined more than once")]
    DuplicateDefinition { var: u32 },
    #[error("literal {lit} cannot be defined (must be even and non-constant)")]
    InvalidDefinition { lit: u32 },
    #[error("property index {index} out of range ({count} properties)")]
    PropertyIndexOutOfRange { index: usize, count: usize },
    #[error("unfolding needs at least one frame")]
    ZeroFrames,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarKind {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
    Undefined,
}

/// A sequential And-Inverter Graph with its safety properties.
///
/// Immutable once built; construction validates that every referenced
/// variable is defined and that AND operands precede their gate.
#[derive(Debug, Clone)]
pub struct Netlist {
    pub name: String,
    max_var: u32,
    inputs: Vec<Lit>,
    latches: Vec<Latch>,
    outputs: Vec<Lit>,
    bads: Vec<Lit>,
    ands: Vec<AndGate>,
    symbols: Vec<Symbol>,
    comments: Vec<String>,
    kinds: Vec<VarKind>,
}

impl PartialEq for Netlist {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.max_var == other.max_var
            && self.inputs == other.inputs
            && self.latches == other.latches
            && self.outputs == other.outputs
            && self.bads == other.bads
            && self.ands == other.ands
            && self.symbols == other.symbols
            && self.comments == other.comments
    }
}

impl Eq for Netlist {}

impl Netlist {
    pub fn new(
        name: impl Into<String>,
        max_var: u32,
        inputs: Vec<Lit>,
        latches: Vec<Latch>,
        outputs: Vec<Lit>,
        bads: Vec<Lit>,
        ands: Vec<AndGate>,
    ) -> Result<Netlist, NetlistError> {
        let kinds = classify(max_var, &inputs, &latches, &outputs, &bads, &ands)?;
        Ok(Netlist {
            name: name.into(),
            max_var,
            inputs,
            latches,
            outputs,
            bads,
            ands,
            symbols: Vec::new(),
            comments: Vec::new(),
            kinds,
        })
    }

    /// Attaches a symbol table. Entries are kept in canonical order
    /// (inputs, latches, outputs, bads; ascending index).
    pub fn with_symbols(mut self, mut symbols: Vec<Symbol>) -> Netlist {
        symbols.sort_by_key(|s| (s.kind, s.index));
        self.symbols = symbols;
        self
    }

    pub fn with_comments(mut self, comments: Vec<String>) -> Netlist {
        self.comments = comments;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Netlist {
        self.name = name.into();
        self
    }

    pub fn max_var(&self) -> u32 {
        self.max_var
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    pub fn num_ands(&self) -> usize {
        self.ands.len()
    }

    pub fn inputs(&self) -> &[Lit] {
        &self.inputs
    }

    pub fn latches(&self) -> &[Latch] {
        &self.latches
    }

    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    pub fn bads(&self) -> &[Lit] {
        &self.bads
    }

    pub fn ands(&self) -> &[AndGate] {
        &self.ands
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    /// The safety properties: the bad-state literals, or the outputs for
    /// files that predate bad-state sections.
    pub fn properties(&self) -> &[Lit] {
        if self.bads.is_empty() {
            &self.outputs
        } else {
            &self.bads
        }
    }

    pub fn num_properties(&self) -> usize {
        self.properties().len()
    }

    pub fn property(&self, index: usize) -> Result<Lit, NetlistError> {
        self.properties()
            .get(index)
            .copied()
            .ok_or(NetlistError::PropertyIndexOutOfRange {
                index,
                count: self.num_properties(),
            })
    }
}

fn classify(
    max_var: u32,
    inputs: &[Lit],
    latches: &[Latch],
    outputs: &[Lit],
    bads: &[Lit],
    ands: &[AndGate],
) -> Result<Vec<VarKind>, NetlistError> {
    let mut kinds = vec![VarKind::Undefined; max_var as usize + 1];
    kinds[0] = VarKind::Const;

    let check_range = |lit: Lit| {
        if lit.var() > max_var {
            Err(NetlistError::LiteralOutOfRange {
                lit: lit.raw(),
                max_var,
            })
        } else {
            Ok(())
        }
    };
    let define = |kinds: &mut Vec<VarKind>, lit: Lit, kind: VarKind| {
        check_range(lit)?;
        if lit.is_negated() || lit.is_constant() {
            return Err(NetlistError::InvalidDefinition { lit: lit.raw() });
        }
        let slot = &mut kinds[lit.var() as usize];
        if *slot != VarKind::Undefined {
            return Err(NetlistError::DuplicateDefinition { var: lit.var() });
        }
        *slot = kind;
        Ok(())
    };

    for (i, &lit) in inputs.iter().enumerate() {
        define(&mut kinds, lit, VarKind::Input(i))?;
    }
    for (i, latch) in latches.iter().enumerate() {
        define(&mut kinds, latch.lit, VarKind::Latch(i))?;
    }
    // AND operands must be defined by an input, a latch or an earlier gate.
    for (i, gate) in ands.iter().enumerate() {
        for rhs in [gate.rhs0, gate.rhs1] {
            check_range(rhs)?;
            if kinds[rhs.var() as usize] == VarKind::Undefined {
                return Err(NetlistError::NonTopologicalDefinition { lit: rhs.raw() });
            }
        }
        define(&mut kinds, gate.lhs, VarKind::And(i))?;
    }
    let referenced = latches
        .iter()
        .map(|l| l.next)
        .chain(outputs.iter().copied())
        .chain(bads.iter().copied());
    for lit in referenced {
        check_range(lit)?;
        if kinds[lit.var() as usize] == VarKind::Undefined {
            return Err(NetlistError::NonTopologicalDefinition { lit: lit.raw() });
        }
    }
    Ok(kinds)
}

//! ASCII AIGER (`aag`) reader and writer.

use std::fmt::Write as _;

use super::{AndGate, Latch, Lit, Netlist, NetlistError, Reset, Symbol, SymbolKind};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), NetlistError> {
        match self.inner.next() {
            Some((i, text)) => {
                self.last = i + 1;
                Ok((i + 1, text))
            }
            None => Err(NetlistError::MalformedLine {
                line: self.last + 1,
                reason: format!("unexpected end of file, expected {what}"),
            }),
        }
    }
}

fn parse_lits(line: usize, text: &str, min: usize, max: usize) -> Result<Vec<Lit>, NetlistError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() < min || tokens.len() > max {
        return Err(NetlistError::MalformedLine {
            line,
            reason: format!("expected {min}..={max} literals, found {}", tokens.len()),
        });
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<u32>().map(Lit::new).map_err(|_| NetlistError::MalformedLine {
                line,
                reason: format!("`{t}` is not a literal"),
            })
        })
        .collect()
}

fn parse_header(text: &str) -> Result<[u32; 6], NetlistError> {
    let mut tokens = text.split_whitespace();
    match tokens.next() {
        Some("aag") => {}
        Some("aig") => return Err(NetlistError::BinaryFormat),
        _ => return Err(NetlistError::MalformedHeader(text.to_string())),
    }
    let fields: Vec<u32> = tokens
        .map(|t| t.parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| NetlistError::MalformedHeader(text.to_string()))?;
    if fields.len() < 5 || fields.len() > 9 {
        return Err(NetlistError::MalformedHeader(text.to_string()));
    }
    if fields.get(6).copied().unwrap_or(0) != 0 {
        return Err(NetlistError::Unsupported("invariant constraints"));
    }
    if fields.get(7).copied().unwrap_or(0) != 0 {
        return Err(NetlistError::Unsupported("justice properties"));
    }
    if fields.get(8).copied().unwrap_or(0) != 0 {
        return Err(NetlistError::Unsupported("fairness constraints"));
    }
    let mut header = [0u32; 6];
    for (slot, value) in header.iter_mut().zip(fields.iter()) {
        *slot = *value;
    }
    Ok(header)
}

/// Parses an ASCII AIGER document.
pub fn parse_aiger(text: &str) -> Result<Netlist, NetlistError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (_, header_line) = lines
        .next_line("header")
        .map_err(|_| NetlistError::MalformedHeader(String::new()))?;
    let [max_var, num_inputs, num_latches, num_outputs, num_ands, num_bads] =
        parse_header(header_line)?;

    let mut inputs = Vec::with_capacity(num_inputs as usize);
    for _ in 0..num_inputs {
        let (line, text) = lines.next_line("input")?;
        inputs.push(parse_lits(line, text, 1, 1)?[0]);
    }
    let mut latches = Vec::with_capacity(num_latches as usize);
    for _ in 0..num_latches {
        let (line, text) = lines.next_line("latch")?;
        let lits = parse_lits(line, text, 2, 3)?;
        let reset = match lits.get(2) {
            None => Reset::Zero,
            Some(r) if *r == Lit::FALSE => Reset::Zero,
            Some(r) if *r == Lit::TRUE => Reset::One,
            Some(r) if *r == lits[0] => Reset::Unknown,
            Some(r) => {
                return Err(NetlistError::MalformedLine {
                    line,
                    reason: format!("invalid latch reset value {r}"),
                })
            }
        };
        latches.push(Latch {
            lit: lits[0],
            next: lits[1],
            reset,
        });
    }
    let mut outputs = Vec::with_capacity(num_outputs as usize);
    for _ in 0..num_outputs {
        let (line, text) = lines.next_line("output")?;
        outputs.push(parse_lits(line, text, 1, 1)?[0]);
    }
    let mut bads = Vec::with_capacity(num_bads as usize);
    for _ in 0..num_bads {
        let (line, text) = lines.next_line("bad state")?;
        bads.push(parse_lits(line, text, 1, 1)?[0]);
    }
    let mut ands = Vec::with_capacity(num_ands as usize);
    for _ in 0..num_ands {
        let (line, text) = lines.next_line("AND gate")?;
        let lits = parse_lits(line, text, 3, 3)?;
        ands.push(AndGate {
            lhs: lits[0],
            rhs0: lits[1],
            rhs1: lits[2],
        });
    }

    let mut symbols = Vec::new();
    let mut comments = Vec::new();
    while let Some((i, text)) = lines.inner.next() {
        let line = i + 1;
        if text == "c" {
            comments.extend(lines.inner.by_ref().map(|(_, t)| t.to_string()));
            break;
        }
        if text.trim().is_empty() {
            continue;
        }
        let (kind, count) = match text.chars().next() {
            Some('i') => (SymbolKind::Input, inputs.len()),
            Some('l') => (SymbolKind::Latch, latches.len()),
            Some('o') => (SymbolKind::Output, outputs.len()),
            Some('b') => (SymbolKind::Bad, bads.len()),
            _ => {
                return Err(NetlistError::MalformedLine {
                    line,
                    reason: format!("unexpected trailing line `{text}`"),
                })
            }
        };
        let rest = &text[1..];
        let (index, name) = rest.split_once(' ').ok_or_else(|| NetlistError::MalformedLine {
            line,
            reason: "symbol entry without a name".into(),
        })?;
        let index: usize = index.parse().map_err(|_| NetlistError::MalformedLine {
            line,
            reason: format!("bad symbol index `{index}`"),
        })?;
        if index >= count {
            return Err(NetlistError::MalformedLine {
                line,
                reason: format!("symbol index {index} out of range"),
            });
        }
        symbols.push(Symbol {
            kind,
            index,
            name: name.to_string(),
        });
    }

    Ok(Netlist::new("design", max_var, inputs, latches, outputs, bads, ands)?
        .with_symbols(symbols)
        .with_comments(comments))
}

/// Writes the canonical ASCII form: header, inputs, latches, outputs, bads,
/// ANDs, symbols, comments. The bad count is emitted only when non-zero.
pub fn write_aiger(n: &Netlist) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "aag {} {} {} {} {}",
        n.max_var,
        n.inputs.len(),
        n.latches.len(),
        n.outputs.len(),
        n.ands.len()
    );
    if !n.bads.is_empty() {
        let _ = write!(out, " {}", n.bads.len());
    }
    out.push('\n');
    for lit in &n.inputs {
        let _ = writeln!(out, "{lit}");
    }
    for latch in &n.latches {
        match latch.reset {
            Reset::Zero => {
                let _ = writeln!(out, "{} {}", latch.lit, latch.next);
            }
            Reset::One => {
                let _ = writeln!(out, "{} {} 1", latch.lit, latch.next);
            }
            Reset::Unknown => {
                let _ = writeln!(out, "{} {} {}", latch.lit, latch.next, latch.lit);
            }
        }
    }
    for lit in n.outputs.iter().chain(&n.bads) {
        let _ = writeln!(out, "{lit}");
    }
    for gate in &n.ands {
        let _ = writeln!(out, "{} {} {}", gate.lhs, gate.rhs0, gate.rhs1);
    }
    for sym in &n.symbols {
        let _ = writeln!(out, "{}{} {}", sym.kind.tag(), sym.index, sym.name);
    }
    if !n.comments.is_empty() {
        out.push_str("c\n");
        for c in &n.comments {
            let _ = writeln!(out, "{c}");
        }
    }
    out
}

impl Netlist {
    pub fn parse_aiger(text: &str) -> Result<Netlist, NetlistError> {
        parse_aiger(text)
    }

    pub fn to_aiger(&self) -> String {
        write_aiger(self)
    }
}

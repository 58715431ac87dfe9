// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// Upper bound on primary inputs/outputs of any circuit (bit vectors are `u64`).
pub const MAX_PORTS: usize = 64;

/// A reference to a value inside a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Const(bool),
    Input(usize),
    Gate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Not,
    Const0,
    Const1,
}

impl GateKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Not => "NOT",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GateKind> {
        Some(match word {
            "AND" => GateKind::And,
            "OR" => GateKind::Or,
            "NOT" => GateKind::Not,
            "CONST0" => GateKind::Const0,
            "CONST1" => GateKind::Const1,
            _ => return None,
        })
    }

    fn arity_ok(self, arity: usize) -> bool {
        match self {
            GateKind::Not => arity == 1,
            GateKind::And | GateKind::Or => arity >= 1,
            GateKind::Const0 | GateKind::Const1 => arity == 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub kind: GateKind,
    pub fanins: Vec<Signal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub signal: Signal,
}

/// A combinational netlist with ordered primary inputs and outputs.
///
/// Index 0 of both port lists is the least significant bit. Gates are stored
/// in topological order: a gate only reads primary inputs and earlier gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<Output>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '=' | '#'))
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        gates: Vec<Gate>,
        outputs: Vec<Output>,
    ) -> Result<Circuit> {
        let circuit = Circuit {
            name: name.into(),
            inputs,
            gates,
            outputs,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    fn validate(&self) -> Result<()> {
        if !is_identifier(&self.name) {
            return Err(Error::InvalidCircuit(format!("bad circuit name `{}`", self.name)));
        }
        for (what, len) in [("input count", self.inputs.len()), ("output count", self.outputs.len())] {
            if len > MAX_PORTS {
                return Err(Error::ResourceGuard {
                    what,
                    actual: len,
                    limit: MAX_PORTS,
                });
            }
        }

        let mut names: HashMap<&str, Signal> = HashMap::new();
        let declared = self
            .inputs
            .iter()
            .enumerate()
            .map(|(j, n)| (n.as_str(), Signal::Input(j)))
            .chain(
                self.gates
                    .iter()
                    .enumerate()
                    .map(|(g, gate)| (gate.name.as_str(), Signal::Gate(g))),
            );
        for (name, signal) in declared {
            if !is_identifier(name) {
                return Err(Error::InvalidCircuit(format!("bad identifier `{name}`")));
            }
            if names.insert(name, signal).is_some() {
                return Err(Error::Duplicate(name.to_string()));
            }
        }

        for (g, gate) in self.gates.iter().enumerate() {
            if !gate.kind.arity_ok(gate.fanins.len()) {
                return Err(Error::InvalidCircuit(format!(
                    "gate `{}` of kind {} has {} fan-ins",
                    gate.name,
                    gate.kind.keyword(),
                    gate.fanins.len()
                )));
            }
            for &fanin in &gate.fanins {
                match fanin {
                    Signal::Input(j) if j < self.inputs.len() => {}
                    Signal::Gate(h) if h < g => {}
                    Signal::Gate(h) if h < self.gates.len() => {
                        return Err(Error::Cyclic(gate.name.clone()));
                    }
                    other => {
                        return Err(Error::InvalidCircuit(format!(
                            "gate `{}` reads invalid signal {other:?}",
                            gate.name
                        )))
                    }
                }
            }
        }

        let mut output_names: HashMap<&str, ()> = HashMap::new();
        for out in &self.outputs {
            if !is_identifier(&out.name) {
                return Err(Error::InvalidCircuit(format!("bad identifier `{}`", out.name)));
            }
            if output_names.insert(&out.name, ()).is_some() {
                return Err(Error::Duplicate(out.name.clone()));
            }
            match out.signal {
                Signal::Input(j) if j >= self.inputs.len() => {
                    return Err(Error::InvalidCircuit(format!(
                        "output `{}` reads missing input",
                        out.name
                    )))
                }
                Signal::Gate(g) if g >= self.gates.len() => {
                    return Err(Error::InvalidCircuit(format!(
                        "output `{}` reads missing gate",
                        out.name
                    )))
                }
                _ => {}
            }
            if let Some(&named) = names.get(out.name.as_str()) {
                if named != out.signal {
                    return Err(Error::Duplicate(out.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Name under which `signal` appears in the netlist, if it has one.
    pub fn signal_name(&self, signal: Signal) -> Option<&str> {
        match signal {
            Signal::Input(j) => self.inputs.get(j).map(String::as_str),
            Signal::Gate(g) => self.gates.get(g).map(|g| g.name.as_str()),
            Signal::Const(_) => None,
        }
    }

    /// Copy of this circuit with another name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Circuit> {
        Circuit::new(name, self.inputs.clone(), self.gates.clone(), self.outputs.clone())
    }

    /// Copy of this circuit using the port names of `reference`.
    ///
    /// Both circuits must have the same port counts.
    pub fn with_ports_of(&self, reference: &Circuit) -> Result<Circuit> {
        if reference.input_count() != self.input_count() || reference.output_count() != self.output_count() {
            return Err(Error::Interface(format!(
                "{}x{} ports vs {}x{}",
                self.input_count(),
                self.output_count(),
                reference.input_count(),
                reference.output_count()
            )));
        }
        let port_names: Vec<&str> = reference
            .inputs
            .iter()
            .map(String::as_str)
            .chain(reference.outputs.iter().map(|o| o.name.as_str()))
            .collect();
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(g, gate)| {
                let mut name = format!("g{g}");
                while port_names.contains(&name.as_str()) {
                    name.push('_');
                }
                Gate { name, ..gate.clone() }
            })
            .collect();
        let circuit = Circuit {
            name: self.name.clone(),
            inputs: reference.inputs.clone(),
            gates,
            outputs: self
                .outputs
                .iter()
                .zip(&reference.outputs)
                .map(|(o, r)| Output {
                    name: r.name.clone(),
                    signal: o.signal,
                })
                .collect(),
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

/// Fixed-width bit string, bit 0 is the least significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    width: usize,
    bits: u64,
}

impl BitVector {
    pub fn new(width: usize, value: u64) -> BitVector {
        assert!(width <= 64, "bit vectors are at most 64 bits wide");
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        BitVector {
            width,
            bits: value & mask,
        }
    }

    pub fn from_bits(bits: &[bool]) -> BitVector {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        BitVector::new(bits.len(), value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.width && (self.bits >> i) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for BitVector {
    /// LSB-first, like every other bit ordering in the crate.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self}, value={})", self.bits)
    }
}

/// Incremental construction of circuits with automatic gate names.
pub struct CircuitBuilder {
    name: String,
    inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<Output>,
    inverted: HashMap<Signal, Signal>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> CircuitBuilder {
        CircuitBuilder {
            name: name.into(),
            inputs: Vec::new(),
            gates: Vec::new(),
            outputs: Vec::new(),
            inverted: HashMap::new(),
        }
    }

    pub fn input(&mut self, name: impl Into<String>) -> Signal {
        self.inputs.push(name.into());
        Signal::Input(self.inputs.len() - 1)
    }

    fn push(&mut self, kind: GateKind, fanins: Vec<Signal>) -> Signal {
        let idx = self.gates.len();
        self.gates.push(Gate {
            name: format!("g{idx}"),
            kind,
            fanins,
        });
        Signal::Gate(idx)
    }

    /// Conjunction; constants are folded and a single operand is returned as is.
    pub fn and(&mut self, operands: &[Signal]) -> Signal {
        if operands.contains(&Signal::Const(false)) {
            return Signal::Const(false);
        }
        let rest: Vec<Signal> = operands.iter().copied().filter(|&s| s != Signal::Const(true)).collect();
        match rest.len() {
            0 => Signal::Const(true),
            1 => rest[0],
            _ => self.push(GateKind::And, rest),
        }
    }

    /// Disjunction; constants are folded and a single operand is returned as is.
    pub fn or(&mut self, operands: &[Signal]) -> Signal {
        if operands.contains(&Signal::Const(true)) {
            return Signal::Const(true);
        }
        let rest: Vec<Signal> = operands
            .iter()
            .copied()
            .filter(|&s| s != Signal::Const(false))
            .collect();
        match rest.len() {
            0 => Signal::Const(false),
            1 => rest[0],
            _ => self.push(GateKind::Or, rest),
        }
    }

    /// Negation; one inverter per signal.
    pub fn not(&mut self, a: Signal) -> Signal {
        if let Signal::Const(v) = a {
            return Signal::Const(!v);
        }
        if let Some(&n) = self.inverted.get(&a) {
            return n;
        }
        let n = self.push(GateKind::Not, vec![a]);
        self.inverted.insert(a, n);
        self.inverted.insert(n, a);
        n
    }

    pub fn xor(&mut self, a: Signal, b: Signal) -> Signal {
        let na = self.not(a);
        let nb = self.not(b);
        let l = self.and(&[a, nb]);
        let r = self.and(&[na, b]);
        self.or(&[l, r])
    }

    /// Materialises a constant as a CONST gate (only needed for fan-ins).
    pub fn constant(&mut self, value: bool) -> Signal {
        self.push(if value { GateKind::Const1 } else { GateKind::Const0 }, Vec::new())
    }

    pub fn output(&mut self, name: impl Into<String>, signal: Signal) {
        self.outputs.push(Output {
            name: name.into(),
            signal,
        });
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.name, self.inputs, self.gates, self.outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_inputs() {
        let err = Circuit::new("c", vec!["a".into(), "a".into()], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::Duplicate(n) if n == "a"));
    }

    #[test]
    fn rejects_forward_reference() {
        let gates = vec![
            Gate {
                name: "x".into(),
                kind: GateKind::Not,
                fanins: vec![Signal::Gate(1)],
            },
            Gate {
                name: "y".into(),
                kind: GateKind::Not,
                fanins: vec![Signal::Gate(0)],
            },
        ];
        let err = Circuit::new("c", vec![], gates, vec![]).unwrap_err();
        assert!(matches!(err, Error::Cyclic(_)));
    }

    #[test]
    fn rejects_bad_arity() {
        let gates = vec![Gate {
            name: "x".into(),
            kind: GateKind::Not,
            fanins: vec![Signal::Input(0), Signal::Input(0)],
        }];
        assert!(Circuit::new("c", vec!["a".into()], gates, vec![]).is_err());
    }

    #[test]
    fn output_name_must_match_its_signal() {
        let out = Output {
            name: "a".into(),
            signal: Signal::Input(1),
        };
        let err = Circuit::new("c", vec!["a".into(), "b".into()], vec![], vec![out]).unwrap_err();
        assert!(matches!(err, Error::Duplicate(_)));
    }

    #[test]
    fn builder_shares_inverters() {
        let mut b = CircuitBuilder::new("t");
        let a = b.input("a");
        let n1 = b.not(a);
        let n2 = b.not(a);
        assert_eq!(n1, n2);
        assert_eq!(b.not(n1), a);
        assert_eq!(b.gates.len(), 1);
    }

    #[test]
    fn bit_vector_display_is_lsb_first() {
        assert_eq!(BitVector::new(4, 0b0001).to_string(), "1000");
        assert_eq!(BitVector::new(3, 2).to_string(), "010");
        assert_eq!(BitVector::from_bits(&[true, false, false, true]).value(), 9);
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Line-oriented netlist format:
//!
//! ```text
//! # full adder carry
//! .model carry
//! .inputs a b c
//! .outputs y
//! ab = AND(a, b)
//! t = AND(c, x)
//! x = OR(a, b)
//! y = OR(ab, t)
//! .end
//! ```
//!
//! Gate lines may appear in any order; the parser sorts them topologically.
//! `CONST0`/`CONST1` take an empty argument list, which may be omitted.

use std::collections::HashMap;
use std::fmt::Write;

use super::circuit::{is_identifier, Circuit, Gate, GateKind, Output, Signal};
use crate::{Error, Result};

struct GateDecl {
    name: String,
    kind: GateKind,
    args: Vec<(String, usize)>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(syntax(
                self.line,
                self.column(),
                format!("expected `{want}`, found `{c}`"),
            )),
            None => Err(syntax(
                self.line,
                self.column(),
                format!("expected `{want}`, found end of line"),
            )),
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=' | '#') {
                break;
            }
            self.pos += c.len_utf8();
        }
        let word = &self.text[start..self.pos];
        if !is_identifier(word) {
            return Err(syntax(self.line, start + 1, "expected an identifier"));
        }
        Ok((word.to_string(), start + 1))
    }
}

fn parse_gate_line(text: &str, line: usize) -> Result<GateDecl> {
    let mut cur = Cursor { text, pos: 0, line };
    let (name, _) = cur.ident()?;
    cur.expect('=')?;
    let kind_col = {
        cur.skip_ws();
        cur.column()
    };
    let (kind_word, _) = cur.ident()?;
    let kind = GateKind::from_keyword(&kind_word)
        .ok_or_else(|| syntax(line, kind_col, format!("unknown gate kind `{kind_word}`")))?;
    let mut args = Vec::new();
    if cur.peek().is_some() || !matches!(kind, GateKind::Const0 | GateKind::Const1) {
        cur.expect('(')?;
        if cur.peek() != Some(')') {
            loop {
                args.push(cur.ident()?);
                match cur.peek() {
                    Some(',') => cur.pos += 1,
                    _ => break,
                }
            }
        }
        cur.expect(')')?;
    }
    if let Some(c) = cur.peek() {
        return Err(syntax(line, cur.column(), format!("unexpected `{c}` after gate")));
    }
    let arity_ok = match kind {
        GateKind::Not => args.len() == 1,
        GateKind::And | GateKind::Or => !args.is_empty(),
        GateKind::Const0 | GateKind::Const1 => args.is_empty(),
    };
    if !arity_ok {
        return Err(syntax(
            line,
            kind_col,
            format!("{} does not take {} argument(s)", kind.keyword(), args.len()),
        ));
    }
    Ok(GateDecl { name, kind, args })
}

/// Parses the netlist text format into a validated circuit.
pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let mut model: Option<String> = None;
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut decls: Vec<GateDecl> = Vec::new();
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        if ended {
            return Err(syntax(line, indent + 1, "content after `.end`"));
        }
        if trimmed.starts_with('.') {
            let mut words = trimmed.split_whitespace();
            let directive = words.next().unwrap_or_default();
            let args: Vec<&str> = words.collect();
            match directive {
                ".model" => {
                    if model.is_some() {
                        return Err(syntax(line, indent + 1, "duplicate `.model`"));
                    }
                    match args.as_slice() {
                        [name] if is_identifier(name) => model = Some(name.to_string()),
                        _ => return Err(syntax(line, indent + 1, "`.model` takes one identifier")),
                    }
                }
                ".inputs" | ".outputs" => {
                    for word in args {
                        let column = body.find(word).map_or(indent + 1, |p| p + 1);
                        if !is_identifier(word) {
                            return Err(syntax(line, column, format!("bad identifier `{word}`")));
                        }
                        if directive == ".inputs" {
                            inputs.push(word.to_string());
                        } else {
                            outputs.push(word.to_string());
                        }
                    }
                }
                ".end" => ended = true,
                other => {
                    return Err(syntax(line, indent + 1, format!("unknown directive `{other}`")));
                }
            }
        } else {
            decls.push(parse_gate_line(body, line)?);
        }
    }

    let mut names: HashMap<&str, Signal> = HashMap::new();
    for (j, name) in inputs.iter().enumerate() {
        if names.insert(name, Signal::Input(j)).is_some() {
            return Err(Error::Duplicate(name.clone()));
        }
    }
    let mut decl_index: HashMap<&str, usize> = HashMap::new();
    for (d, decl) in decls.iter().enumerate() {
        if names.contains_key(decl.name.as_str()) || decl_index.insert(&decl.name, d).is_some() {
            return Err(Error::Duplicate(decl.name.clone()));
        }
        for (arg, _) in &decl.args {
            if !names.contains_key(arg.as_str()) && !decls.iter().any(|x| &x.name == arg) {
                return Err(Error::Undefined(arg.clone()));
            }
        }
    }

    // depth-first topological sort in declaration order
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks = vec![Mark::New; decls.len()];
    let mut order: Vec<usize> = Vec::with_capacity(decls.len());
    for root in 0..decls.len() {
        if marks[root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        marks[root] = Mark::Active;
        while let Some(&mut (d, ref mut next_arg)) = stack.last_mut() {
            if let Some((arg, _)) = decls[d].args.get(*next_arg) {
                *next_arg += 1;
                if let Some(&dep) = decl_index.get(arg.as_str()) {
                    match marks[dep] {
                        Mark::New => {
                            marks[dep] = Mark::Active;
                            stack.push((dep, 0));
                        }
                        Mark::Active => return Err(Error::Cyclic(decls[dep].name.clone())),
                        Mark::Done => {}
                    }
                }
            } else {
                marks[d] = Mark::Done;
                order.push(d);
                stack.pop();
            }
        }
    }

    let mut gate_of_decl = vec![0usize; decls.len()];
    for (g, &d) in order.iter().enumerate() {
        gate_of_decl[d] = g;
    }
    let resolve = |name: &str| -> Option<Signal> {
        names
            .get(name)
            .copied()
            .or_else(|| decl_index.get(name).map(|&d| Signal::Gate(gate_of_decl[d])))
    };
    let gates = order
        .iter()
        .map(|&d| {
            let decl = &decls[d];
            Gate {
                name: decl.name.clone(),
                kind: decl.kind,
                fanins: decl
                    .args
                    .iter()
                    .map(|(a, _)| resolve(a).expect("checked above"))
                    .collect(),
            }
        })
        .collect();
    let mut circuit_outputs = Vec::with_capacity(outputs.len());
    for name in &outputs {
        let signal = resolve(name).ok_or_else(|| Error::Undefined(name.clone()))?;
        circuit_outputs.push(Output {
            name: name.clone(),
            signal,
        });
    }
    Circuit::new(
        model.unwrap_or_else(|| "netlist".to_string()),
        inputs,
        gates,
        circuit_outputs,
    )
}

/// Writes a circuit in the netlist format. Outputs whose name differs from
/// the signal they read get a one-input `AND` buffer or a constant line.
pub fn emit_netlist(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, ".model {}", circuit.name()).unwrap();
    writeln!(out, ".inputs {}", circuit.inputs().join(" ")).unwrap();
    let outs: Vec<&str> = circuit.outputs().iter().map(|o| o.name.as_str()).collect();
    writeln!(out, ".outputs {}", outs.join(" ")).unwrap();
    for gate in circuit.gates() {
        let args: Vec<&str> = gate
            .fanins
            .iter()
            .map(|&s| circuit.signal_name(s).expect("gate fan-ins are named"))
            .collect();
        writeln!(out, "{} = {}({})", gate.name, gate.kind.keyword(), args.join(", ")).unwrap();
    }
    for o in circuit.outputs() {
        match o.signal {
            Signal::Const(v) => {
                writeln!(out, "{} = {}()", o.name, if v { "CONST1" } else { "CONST0" }).unwrap();
            }
            s => {
                let src = circuit.signal_name(s).expect("named");
                if src != o.name {
                    writeln!(out, "{} = AND({src})", o.name).unwrap();
                }
            }
        }
    }
    out.push_str(".end\n");
    out
}

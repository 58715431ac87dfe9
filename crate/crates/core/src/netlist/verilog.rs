// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;
use std::fmt::Write;

use super::circuit::{Circuit, GateKind, Signal};

const KEYWORDS: &[&str] = &[
    "always",
    "and",
    "assign",
    "begin",
    "buf",
    "case",
    "default",
    "else",
    "end",
    "endcase",
    "endmodule",
    "for",
    "function",
    "if",
    "initial",
    "inout",
    "input",
    "integer",
    "module",
    "nand",
    "nor",
    "not",
    "or",
    "output",
    "parameter",
    "reg",
    "supply0",
    "supply1",
    "wire",
    "xnor",
    "xor",
];

fn is_simple(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        && !KEYWORDS.contains(&name)
}

/// Verilog spelling of an identifier, escaped when needed.
fn ident(name: &str) -> String {
    if is_simple(name) {
        name.to_string()
    } else {
        format!("\\{name} ")
    }
}

/// Structural Verilog-2001 using only `and`/`or`/`not` primitives and
/// constant assignments. Ports appear in input order, then output order.
pub fn emit_verilog(circuit: &Circuit, module_name: &str) -> String {
    let ports: HashSet<&str> = circuit
        .inputs()
        .iter()
        .map(String::as_str)
        .chain(circuit.outputs().iter().map(|o| o.name.as_str()))
        .collect();
    let wires: Vec<String> = (0..circuit.gates().len())
        .map(|g| {
            let mut w = format!("w{g}");
            while ports.contains(w.as_str()) {
                w.push('_');
            }
            w
        })
        .collect();
    let net = |s: Signal| -> String {
        match s {
            Signal::Input(j) => ident(&circuit.inputs()[j]),
            Signal::Gate(g) => wires[g].clone(),
            Signal::Const(v) => if v { "1'b1" } else { "1'b0" }.to_string(),
        }
    };

    let mut v = String::new();
    let port_list: Vec<String> = circuit
        .inputs()
        .iter()
        .map(|n| ident(n))
        .chain(circuit.outputs().iter().map(|o| ident(&o.name)))
        .collect();
    writeln!(v, "module {} ({});", ident(module_name), port_list.join(", ")).unwrap();
    for name in circuit.inputs() {
        writeln!(v, "  input {};", ident(name)).unwrap();
    }
    for o in circuit.outputs() {
        writeln!(v, "  output {};", ident(&o.name)).unwrap();
    }
    for w in &wires {
        writeln!(v, "  wire {w};").unwrap();
    }
    for (g, gate) in circuit.gates().iter().enumerate() {
        let args: Vec<String> = gate.fanins.iter().map(|&s| net(s)).collect();
        match gate.kind {
            GateKind::And => writeln!(v, "  and ({}, {});", wires[g], args.join(", ")),
            GateKind::Or => writeln!(v, "  or ({}, {});", wires[g], args.join(", ")),
            GateKind::Not => writeln!(v, "  not ({}, {});", wires[g], args[0]),
            GateKind::Const0 => writeln!(v, "  assign {} = 1'b0;", wires[g]),
            GateKind::Const1 => writeln!(v, "  assign {} = 1'b1;", wires[g]),
        }
        .unwrap();
    }
    for o in circuit.outputs() {
        match o.signal {
            Signal::Const(_) => writeln!(v, "  assign {} = {};", ident(&o.name), net(o.signal)),
            s => writeln!(v, "  and ({}, {});", ident(&o.name), net(s)),
        }
        .unwrap();
    }
    v.push_str("endmodule\n");
    v
}

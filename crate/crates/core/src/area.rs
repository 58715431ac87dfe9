// SPDX-License-Identifier: Apache-2.0

//! Structural area model.
//!
//! After constant propagation, every live gate reachable from an output is
//! costed once regardless of its fanout: a k-input AND is `k - 1` AND2 cells,
//! a k-input OR is `k - 1` OR2 cells, single-input gates are wires and each
//! negated signal costs one NOT. Gates are not merged structurally, so a
//! product duplicated across outputs costs twice while a shared one costs once.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use crate::netlist::{Circuit, GateKind, Signal};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Not,
    And2,
    Or2,
}

impl CellKind {
    pub const ALL: [CellKind; 3] = [CellKind::Not, CellKind::And2, CellKind::Or2];

    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Not => "NOT",
            CellKind::And2 => "AND2",
            CellKind::Or2 => "OR2",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellLibrary {
    pub name: String,
    areas: [f64; 3],
}

impl CellLibrary {
    pub fn new(name: impl Into<String>, not: f64, and2: f64, or2: f64) -> Result<CellLibrary> {
        let areas = [not, and2, or2];
        if let Some(kind) = CellKind::ALL
            .iter()
            .zip(areas)
            .find(|(_, a)| !(*a > 0.0 && a.is_finite()))
        {
            return Err(Error::Config(format!("cell {} must have a positive area", kind.0)));
        }
        Ok(CellLibrary {
            name: name.into(),
            areas,
        })
    }

    pub fn area(&self, kind: CellKind) -> f64 {
        self.areas[kind as usize]
    }

    /// Parses `KIND AREA` lines (`NOT`, `AND2`, `OR2`, each exactly once); `#` starts a comment.
    pub fn parse(text: &str, name: impl Into<String>) -> Result<CellLibrary> {
        let mut areas: [Option<f64>; 3] = [None; 3];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Syntax {
                line: idx + 1,
                column: 1,
                message,
            };
            let mut words = line.split_whitespace();
            let (Some(kind), Some(value), None) = (words.next(), words.next(), words.next()) else {
                return Err(bad("expected `KIND AREA`".into()));
            };
            let kind = CellKind::ALL
                .into_iter()
                .find(|k| k.as_str() == kind)
                .ok_or_else(|| bad(format!("unknown cell `{kind}`")))?;
            let value: f64 = value.parse().map_err(|_| bad(format!("bad area `{value}`")))?;
            if areas[kind as usize].replace(value).is_some() {
                return Err(bad(format!("cell {kind} listed twice")));
            }
        }
        let get = |k: CellKind| areas[k as usize].ok_or_else(|| Error::Config(format!("library has no {k} entry")));
        CellLibrary::new(name, get(CellKind::Not)?, get(CellKind::And2)?, get(CellKind::Or2)?)
    }

    pub fn from_file(path: &Path) -> Result<CellLibrary> {
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map_or("library".into(), |s| s.to_string_lossy().into_owned());
        CellLibrary::parse(&text, name)
    }

    pub fn to_text(&self) -> String {
        CellKind::ALL
            .iter()
            .map(|&k| format!("{k} {}\n", self.area(k)))
            .collect()
    }
}

/// `{NOT: 1, AND2: 2, OR2: 2}`.
pub fn default_library() -> CellLibrary {
    CellLibrary::new("unit-nand-equivalent", 1.0, 2.0, 2.0).expect("positive constants")
}

#[derive(Clone, Debug, PartialEq)]
pub struct AreaReport {
    pub total: f64,
    pub not: usize,
    pub and2: usize,
    pub or2: usize,
}

impl AreaReport {
    pub fn count(&self, kind: CellKind) -> usize {
        match kind {
            CellKind::Not => self.not,
            CellKind::And2 => self.and2,
            CellKind::Or2 => self.or2,
        }
    }
}

#[derive(Clone, Debug)]
enum Folded {
    Value(Signal),
    Live(GateKind, Vec<Signal>),
}

pub fn estimate_area(circuit: &Circuit, lib: &CellLibrary) -> AreaReport {
    // constant propagation; `alias[g]` is the signal gate `g` reduces to
    let mut alias: Vec<Signal> = Vec::with_capacity(circuit.gates().len());
    let mut folded: Vec<Folded> = Vec::with_capacity(circuit.gates().len());
    for (g, gate) in circuit.gates().iter().enumerate() {
        let fanins: Vec<Signal> = gate
            .fanins
            .iter()
            .map(|&s| match s {
                Signal::Gate(h) => alias[h],
                other => other,
            })
            .collect();
        let f = match gate.kind {
            GateKind::Const0 => Folded::Value(Signal::Const(false)),
            GateKind::Const1 => Folded::Value(Signal::Const(true)),
            GateKind::Not => match fanins[0] {
                Signal::Const(v) => Folded::Value(Signal::Const(!v)),
                s => Folded::Live(GateKind::Not, vec![s]),
            },
            GateKind::And | GateKind::Or => {
                let (absorbing, identity) = if gate.kind == GateKind::And {
                    (false, true)
                } else {
                    (true, false)
                };
                if fanins.contains(&Signal::Const(absorbing)) {
                    Folded::Value(Signal::Const(absorbing))
                } else {
                    let mut rest: Vec<Signal> = Vec::new();
                    for s in fanins {
                        if s != Signal::Const(identity) && !rest.contains(&s) {
                            rest.push(s);
                        }
                    }
                    match rest.len() {
                        0 => Folded::Value(Signal::Const(identity)),
                        1 => Folded::Value(rest[0]),
                        _ => Folded::Live(gate.kind, rest),
                    }
                }
            }
        };
        alias.push(match f {
            Folded::Value(s) => s,
            Folded::Live(..) => Signal::Gate(g),
        });
        folded.push(f);
    }

    let mut reached = vec![false; folded.len()];
    let mut stack: Vec<usize> = circuit
        .outputs()
        .iter()
        .filter_map(|o| match o.signal {
            Signal::Gate(g) => match alias[g] {
                Signal::Gate(h) => Some(h),
                _ => None,
            },
            _ => None,
        })
        .collect();
    while let Some(g) = stack.pop() {
        if std::mem::replace(&mut reached[g], true) {
            continue;
        }
        if let Folded::Live(_, fanins) = &folded[g] {
            stack.extend(fanins.iter().filter_map(|s| match s {
                Signal::Gate(h) => Some(*h),
                _ => None,
            }));
        }
    }

    let mut negated: HashSet<Signal> = HashSet::new();
    let (mut and2, mut or2) = (0, 0);
    for (g, f) in folded.iter().enumerate() {
        if !reached[g] {
            continue;
        }
        if let Folded::Live(kind, fanins) = f {
            match kind {
                GateKind::Not => {
                    negated.insert(fanins[0]);
                }
                GateKind::And => and2 += fanins.len() - 1,
                GateKind::Or => or2 += fanins.len() - 1,
                GateKind::Const0 | GateKind::Const1 => unreachable!("constants fold"),
            }
        }
    }
    let not = negated.len();
    AreaReport {
        total: not as f64 * lib.area(CellKind::Not)
            + and2 as f64 * lib.area(CellKind::And2)
            + or2 as f64 * lib.area(CellKind::Or2),
        not,
        and2,
        or2,
    }
}

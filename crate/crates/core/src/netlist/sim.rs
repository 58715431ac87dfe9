// SPDX-License-Identifier: Apache-2.0

//! Exhaustive simulation. Rows are packed 64 to a word and the 64-row blocks
//! are independent, which is what the parallel strategy splits over.

use super::circuit::{BitVector, Circuit, GateKind, Signal};
use crate::par::Exec;
use crate::{Error, Result};

/// Largest input count accepted by exhaustive operations.
pub const EXHAUSTIVE_INPUT_CAP: usize = 16;

/// Input patterns of the first 64 rows for inputs 0..6.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Simulates 64 input patterns at once; returns one word per output.
pub(crate) fn simulate_words(circuit: &Circuit, input_words: &[u64]) -> Vec<u64> {
    let mut values = Vec::with_capacity(circuit.gates().len());
    let read = |values: &[u64], s: Signal| match s {
        Signal::Const(false) => 0,
        Signal::Const(true) => u64::MAX,
        Signal::Input(j) => input_words[j],
        Signal::Gate(g) => values[g],
    };
    for gate in circuit.gates() {
        let v = match gate.kind {
            GateKind::And => gate.fanins.iter().fold(u64::MAX, |acc, &s| acc & read(&values, s)),
            GateKind::Or => gate.fanins.iter().fold(0, |acc, &s| acc | read(&values, s)),
            GateKind::Not => !read(&values, gate.fanins[0]),
            GateKind::Const0 => 0,
            GateKind::Const1 => u64::MAX,
        };
        values.push(v);
    }
    circuit.outputs().iter().map(|o| read(&values, o.signal)).collect()
}

/// Evaluates the circuit on one input vector.
pub fn evaluate(circuit: &Circuit, x: &BitVector) -> Result<BitVector> {
    if x.width() != circuit.input_count() {
        return Err(Error::InputArity {
            expected: circuit.input_count(),
            actual: x.width(),
        });
    }
    let words: Vec<u64> = (0..x.width()).map(|j| if x.bit(j) { u64::MAX } else { 0 }).collect();
    let out = simulate_words(circuit, &words);
    let value = out.iter().enumerate().fold(0u64, |acc, (i, w)| acc | ((w & 1) << i));
    Ok(BitVector::new(circuit.output_count(), value))
}

/// Output values for all `2^n` input vectors, row `k` being input vector `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    inputs: usize,
    outputs: usize,
    rows: Vec<u64>,
}

impl TruthTable {
    pub fn input_count(&self) -> usize {
        self.inputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Output vector of row `k` read as an unsigned integer.
    pub fn value(&self, k: usize) -> u64 {
        self.rows[k]
    }

    pub fn row(&self, k: usize) -> BitVector {
        BitVector::new(self.outputs, self.rows[k])
    }

    pub fn values(&self) -> &[u64] {
        &self.rows
    }
}

pub(crate) fn check_exhaustive(circuit: &Circuit) -> Result<()> {
    if circuit.input_count() > EXHAUSTIVE_INPUT_CAP {
        return Err(Error::ResourceGuard {
            what: "input count",
            actual: circuit.input_count(),
            limit: EXHAUSTIVE_INPUT_CAP,
        });
    }
    Ok(())
}

pub fn truth_table(circuit: &Circuit) -> Result<TruthTable> {
    truth_table_with(circuit, Exec::default())
}

pub fn truth_table_with(circuit: &Circuit, exec: Exec) -> Result<TruthTable> {
    check_exhaustive(circuit)?;
    let n = circuit.input_count();
    let total = 1usize << n;
    let blocks = total.div_ceil(64);
    // tiny tables are not worth the fork
    let exec = if blocks < 4 { Exec::Sequential } else { exec };
    let per_block = exec.map_range(blocks, |b| {
        let words: Vec<u64> = (0..n)
            .map(|j| {
                if j < 6 {
                    LOW_PATTERNS[j]
                } else if (b >> (j - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            })
            .collect();
        let outs = simulate_words(circuit, &words);
        let rows_here = (total - b * 64).min(64);
        (0..rows_here)
            .map(|r| {
                outs.iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, w)| acc | (((w >> r) & 1) << i))
            })
            .collect::<Vec<u64>>()
    });
    Ok(TruthTable {
        inputs: n,
        outputs: circuit.output_count(),
        rows: per_block.concat(),
    })
}

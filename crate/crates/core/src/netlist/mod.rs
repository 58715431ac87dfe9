// SPDX-License-Identifier: Apache-2.0

//! Combinational netlists: representation, exhaustive simulation, benchmark
//! generators and the text formats.

mod circuit;
mod generators;
mod sim;
mod text;
mod verilog;

pub use circuit::{BitVector, Circuit, CircuitBuilder, Gate, GateKind, Output, Signal, MAX_PORTS};
pub use generators::{array_multiplier, ripple_adder, MAX_ADDER_BITS, MAX_MULTIPLIER_BITS};
pub(crate) use sim::check_exhaustive;
pub use sim::{evaluate, truth_table, truth_table_with, TruthTable, EXHAUSTIVE_INPUT_CAP};
pub use text::{emit_netlist, parse_netlist};
pub use verilog::emit_verilog;

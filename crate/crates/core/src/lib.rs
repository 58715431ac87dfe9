// SPDX-License-Identifier: Apache-2.0

//! Approximate logic synthesis for small arithmetic circuits.
//!
//! The crate searches for approximations of an exact combinational circuit
//! whose worst-case error stays within a threshold. Candidates are drawn from
//! a parametrisable sum-of-products template (per-output "nonshared" sums or
//! globally "shared" products), the search is delegated to an external
//! SMT-LIB solver, and the template's structural counters (literals per
//! product, products per output, products in total, product-to-sum links) are
//! used as area proxies to order the search.
//!
//! ```no_run
//! use apxsynth::prelude::*;
//!
//! let exact = ripple_adder(2).unwrap();
//! let template = Template::shared(4, 3, 8);
//! let spec = ErrorSpec::new(1);
//! let schedule = Schedule::grid(Family::Shared, (8, 16));
//! let solver = SolverConfig::from_env();
//! let result = explore(&exact, &template, &spec, &schedule, &default_library(), &solver).unwrap();
//! println!("best area {}", result.best_area());
//! ```

pub mod area;
pub mod error;
mod errors;
pub mod explore;
pub mod harness;
pub mod netlist;
pub mod par;
pub mod smt;
pub mod template;

pub use errors::{Error, Result};

pub mod prelude {
    pub use crate::area::{default_library, estimate_area, AreaReport, CellKind, CellLibrary};
    pub use crate::error::{dist, is_sound, map_value, worst_case_error, ErrorSpec, Soundness};
    pub use crate::explore::{explore, pareto_front, ExplorationResult, Schedule, StopPolicy};
    pub use crate::harness::{
        run_area_vs_et, run_area_vs_proxy, sample_sound, spearman, Benchmark, ExperimentConfig, Operation, SamplerKind,
        Source,
    };
    pub use crate::netlist::{
        array_multiplier, emit_netlist, emit_verilog, parse_netlist, ripple_adder, truth_table, BitVector, Circuit,
        Gate, GateKind, Signal, TruthTable,
    };
    pub use crate::par::Exec;
    pub use crate::smt::{encode_miter, solve, MiterProblem, SolverConfig, SolverOutcome, SolverStatus};
    pub use crate::template::{
        instantiate, random_assignment, Family, Literal, ParameterAssignment, ProxyBounds, Template,
    };
    pub use crate::{Error, Result};
}

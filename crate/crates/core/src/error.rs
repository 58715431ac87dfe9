// SPDX-License-Identifier: Apache-2.0

//! Error semantics of the miter: output vectors are mapped to values, the
//! distance between exact and approximate values is measured, and a circuit is
//! sound when that distance never exceeds the error threshold. The functions
//! here check this exhaustively and serve as the oracle for the solver path.

use crate::netlist::{check_exhaustive, truth_table_with, BitVector, Circuit, TruthTable};
use crate::par::Exec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MapKind {
    /// LSB-first unsigned integer.
    #[default]
    Unsigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DistKind {
    #[default]
    AbsoluteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ErrorSpec {
    pub map: MapKind,
    pub dist: DistKind,
    /// Error threshold in output-value units; compared with `<=`.
    pub et: u64,
}

impl ErrorSpec {
    pub fn new(et: u64) -> ErrorSpec {
        ErrorSpec {
            map: MapKind::Unsigned,
            dist: DistKind::AbsoluteDifference,
            et,
        }
    }

    /// True when `et` reaches the largest possible distance on `outputs`
    /// bits, so that every circuit is sound.
    pub fn is_trivial(&self, outputs: usize) -> bool {
        outputs < 64 && self.et >= (1u64 << outputs) - 1
    }

    pub fn map(&self, bits: &BitVector) -> u64 {
        match self.map {
            MapKind::Unsigned => map_value(bits),
        }
    }

    pub fn dist(&self, a: u64, b: u64) -> u64 {
        match self.dist {
            DistKind::AbsoluteDifference => dist(a, b),
        }
    }
}

/// `sum(bits[i] * 2^i)`.
pub fn map_value(bits: &BitVector) -> u64 {
    bits.value()
}

/// `|a - b|`.
pub fn dist(a: u64, b: u64) -> u64 {
    a.abs_diff(b)
}

fn check_interfaces(exact: &Circuit, approx: &Circuit) -> Result<()> {
    if exact.input_count() != approx.input_count() || exact.output_count() != approx.output_count() {
        return Err(Error::Interface(format!(
            "exact circuit has {} inputs/{} outputs, approximation {}/{}",
            exact.input_count(),
            exact.output_count(),
            approx.input_count(),
            approx.output_count()
        )));
    }
    check_exhaustive(exact)
}

/// Largest distance between the two tables over all rows.
pub fn table_error(exact: &TruthTable, approx: &TruthTable, exec: Exec) -> u64 {
    let (e, a) = (exact.values(), approx.values());
    debug_assert_eq!(e.len(), a.len());
    if e.len() < 4096 {
        return e.iter().zip(a).map(|(&x, &y)| dist(x, y)).max().unwrap_or(0);
    }
    exec.max_range(e.len(), |k| dist(e[k], a[k]))
}

pub fn worst_case_error(exact: &Circuit, approx: &Circuit) -> Result<u64> {
    worst_case_error_with(exact, approx, Exec::default())
}

pub fn worst_case_error_with(exact: &Circuit, approx: &Circuit, exec: Exec) -> Result<u64> {
    check_interfaces(exact, approx)?;
    let e = truth_table_with(exact, exec)?;
    let a = truth_table_with(approx, exec)?;
    Ok(table_error(&e, &a, exec))
}

/// Outcome of a soundness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Soundness {
    pub sound: bool,
    pub worst_case_error: u64,
    /// First input vector (ascending order) whose distance exceeds the threshold.
    pub witness: Option<BitVector>,
}

pub fn is_sound(exact: &Circuit, approx: &Circuit, spec: &ErrorSpec) -> Result<Soundness> {
    is_sound_with(exact, approx, spec, Exec::default())
}

pub fn is_sound_with(exact: &Circuit, approx: &Circuit, spec: &ErrorSpec, exec: Exec) -> Result<Soundness> {
    check_interfaces(exact, approx)?;
    let e = truth_table_with(exact, exec)?;
    let a = truth_table_with(approx, exec)?;
    Ok(table_soundness(&e, &a, spec, exec))
}

pub fn table_soundness(exact: &TruthTable, approx: &TruthTable, spec: &ErrorSpec, exec: Exec) -> Soundness {
    let wce = table_error(exact, approx, exec);
    let witness = (wce > spec.et)
        .then(|| {
            let (e, a) = (exact.values(), approx.values());
            exec.position_first(e.len(), |k| spec.dist(e[k], a[k]) > spec.et)
        })
        .flatten()
        .map(|k| BitVector::new(exact.input_count(), k as u64));
    Soundness {
        sound: wce <= spec.et,
        worst_case_error: wce,
        witness,
    }
}

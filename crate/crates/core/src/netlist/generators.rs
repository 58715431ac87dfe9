// SPDX-License-Identifier: Apache-2.0

//! Exact arithmetic benchmarks. Operand `a` occupies inputs `0..w`, operand
//! `b` inputs `w..2w`, both LSB first; names follow `<op>_i<inputs>_o<outputs>`.

use super::circuit::{Circuit, CircuitBuilder, Signal};
use crate::{Error, Result};

pub const MAX_ADDER_BITS: usize = 8;
pub const MAX_MULTIPLIER_BITS: usize = 4;

fn operands(b: &mut CircuitBuilder, width: usize) -> (Vec<Signal>, Vec<Signal>) {
    let a = (0..width).map(|i| b.input(format!("a{i}"))).collect();
    let c = (0..width).map(|i| b.input(format!("b{i}"))).collect();
    (a, c)
}

/// Sum and carry of three bits.
fn full_add(b: &mut CircuitBuilder, x: Signal, y: Signal, z: Signal) -> (Signal, Signal) {
    let p = b.xor(x, y);
    let sum = b.xor(p, z);
    let g = b.and(&[x, y]);
    let t = b.and(&[p, z]);
    let carry = b.or(&[g, t]);
    (sum, carry)
}

fn half_add(b: &mut CircuitBuilder, x: Signal, y: Signal) -> (Signal, Signal) {
    let sum = b.xor(x, y);
    let carry = b.and(&[x, y]);
    (sum, carry)
}

/// Ripple-carry adder computing the unsigned `a + b` on `bitwidth + 1` outputs.
pub fn ripple_adder(bitwidth: usize) -> Result<Circuit> {
    if !(1..=MAX_ADDER_BITS).contains(&bitwidth) {
        return Err(Error::Config(format!(
            "adder bitwidth {bitwidth} outside 1..={MAX_ADDER_BITS}"
        )));
    }
    let mut b = CircuitBuilder::new(format!("adder_i{}_o{}", 2 * bitwidth, bitwidth + 1));
    let (x, y) = operands(&mut b, bitwidth);
    let (s0, mut carry) = half_add(&mut b, x[0], y[0]);
    b.output("s0", s0);
    for i in 1..bitwidth {
        let (s, c) = full_add(&mut b, x[i], y[i], carry);
        b.output(format!("s{i}"), s);
        carry = c;
    }
    b.output(format!("s{bitwidth}"), carry);
    b.build()
}

/// Carry-save array multiplier computing the unsigned `a * b` on `2 * bitwidth` outputs.
///
/// Partial products are reduced column by column with full and half adders,
/// carries moving to the next column, so each output column ends with one bit.
pub fn array_multiplier(bitwidth: usize) -> Result<Circuit> {
    if !(1..=MAX_MULTIPLIER_BITS).contains(&bitwidth) {
        return Err(Error::Config(format!(
            "multiplier bitwidth {bitwidth} outside 1..={MAX_MULTIPLIER_BITS}"
        )));
    }
    let width = 2 * bitwidth;
    let mut b = CircuitBuilder::new(format!("mul_i{width}_o{width}"));
    let (x, y) = operands(&mut b, bitwidth);

    let mut columns: Vec<Vec<Signal>> = vec![Vec::new(); width + 1];
    for (i, &yi) in y.iter().enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            let pp = b.and(&[xj, yi]);
            columns[i + j].push(pp);
        }
    }
    for k in 0..width {
        let mut column = std::mem::take(&mut columns[k]);
        while column.len() > 1 {
            let (sum, carry) = if column.len() >= 3 {
                let (p, q, r) = (column.remove(0), column.remove(0), column.remove(0));
                full_add(&mut b, p, q, r)
            } else {
                let (p, q) = (column.remove(0), column.remove(0));
                half_add(&mut b, p, q)
            };
            column.push(sum);
            columns[k + 1].push(carry);
        }
        b.output(format!("p{k}"), column.first().copied().unwrap_or(Signal::Const(false)));
    }
    // the product fits in `width` bits; anything carried past it is constant zero
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::circuit::BitVector;
    use crate::netlist::sim::{evaluate, truth_table};

    fn operand_values(k: usize, w: usize) -> (u64, u64) {
        let mask = (1usize << w) - 1;
        ((k & mask) as u64, ((k >> w) & mask) as u64)
    }

    #[test]
    fn adder_examples() {
        let add = ripple_adder(2).unwrap();
        assert_eq!(add.name(), "adder_i4_o3");
        assert_eq!((add.input_count(), add.output_count()), (4, 3));
        // a = 1, b = 1
        let x = BitVector::from_bits(&[true, false, true, false]);
        assert_eq!(evaluate(&add, &x).unwrap(), BitVector::from_bits(&[false, true, false]));
        let add3 = ripple_adder(3).unwrap();
        assert_eq!(add3.name(), "adder_i6_o4");
        assert_eq!((add3.input_count(), add3.output_count()), (6, 4));
    }

    #[test]
    fn multiplier_examples() {
        let mul = array_multiplier(2).unwrap();
        assert_eq!(mul.name(), "mul_i4_o4");
        let x = BitVector::from_bits(&[true, true, true, true]);
        assert_eq!(evaluate(&mul, &x).unwrap().value(), 9);
        let mul3 = array_multiplier(3).unwrap();
        assert_eq!(mul3.name(), "mul_i6_o6");
        assert_eq!((mul3.input_count(), mul3.output_count()), (6, 6));
    }

    #[test]
    fn generators_match_arithmetic_exhaustively() {
        for w in 1..=MAX_ADDER_BITS {
            let tt = truth_table(&ripple_adder(w).unwrap()).unwrap();
            for k in 0..tt.len() {
                let (a, b) = operand_values(k, w);
                assert_eq!(tt.value(k), a + b, "adder w={w} k={k}");
            }
        }
        for w in 1..=MAX_MULTIPLIER_BITS {
            let tt = truth_table(&array_multiplier(w).unwrap()).unwrap();
            for k in 0..tt.len() {
                let (a, b) = operand_values(k, w);
                assert_eq!(tt.value(k), a * b, "mul w={w} k={k}");
            }
        }
    }

    #[test]
    fn out_of_range_bitwidths() {
        assert!(matches!(ripple_adder(0), Err(Error::Config(_))));
        assert!(matches!(ripple_adder(9), Err(Error::Config(_))));
        assert!(matches!(array_multiplier(5), Err(Error::Config(_))));
    }
}

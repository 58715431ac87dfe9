// SPDX-License-Identifier: Apache-2.0

//! Quantifier-free miter encoding.
//!
//! The universal "for every input" condition is expanded over all `2^n`
//! input vectors. For each vector the exact output value is a constant and
//! the template is evaluated symbolically: a literal of input `j` in product
//! `t` holds when the selector ignores the input or agrees with its value.
//!
//! Each selector is two booleans, `p_sel_<t>_<j>_u` (input used) and
//! `p_sel_<t>_<j>_n` (input negated, only allowed when used). Links are
//! `p_link_<i>_<t>` and output constants `p_const_<i>`. All indices are 0-based.

use std::fmt::Write;

use super::MiterProblem;
use crate::netlist::truth_table;
use crate::template::{Family, Literal, ParameterAssignment, Template};
use crate::{Error, Result};

/// Largest input count the expansion accepts.
pub const ENCODING_INPUT_CAP: usize = 10;

/// Largest output count the integer value encoding accepts.
pub const ENCODING_OUTPUT_CAP: usize = 32;

pub(crate) fn sel_used(t: usize, j: usize) -> String {
    format!("p_sel_{t}_{j}_u")
}

pub(crate) fn sel_neg(t: usize, j: usize) -> String {
    format!("p_sel_{t}_{j}_n")
}

pub(crate) fn link(i: usize, t: usize) -> String {
    format!("p_link_{i}_{t}")
}

pub(crate) fn constant(i: usize) -> String {
    format!("p_const_{i}")
}

/// Every parameter variable of `template`, in declaration order.
pub fn parameter_names(template: &Template) -> Vec<String> {
    let mut names = Vec::new();
    for t in 0..template.product_count() {
        for j in 0..template.inputs() {
            names.push(sel_used(t, j));
            names.push(sel_neg(t, j));
        }
    }
    for i in 0..template.outputs() {
        for t in 0..template.product_count() {
            if template.link_allowed(i, t) {
                names.push(link(i, t));
            }
        }
    }
    for i in 0..template.outputs() {
        names.push(constant(i));
    }
    names
}

/// Values of [`parameter_names`] under `params`, in the same order.
pub(crate) fn parameter_values(template: &Template, params: &ParameterAssignment) -> Vec<bool> {
    let mut values = Vec::new();
    for t in 0..template.product_count() {
        for j in 0..template.inputs() {
            let lit = params.selector(t, j);
            values.push(lit != Literal::Ignore);
            values.push(lit == Literal::Negate);
        }
    }
    for i in 0..template.outputs() {
        for t in 0..template.product_count() {
            if template.link_allowed(i, t) {
                values.push(params.link(i, t));
            }
        }
    }
    for i in 0..template.outputs() {
        values.push(params.constant(i));
    }
    values
}

fn or_of(terms: &[String]) -> String {
    match terms.len() {
        0 => "false".into(),
        1 => terms[0].clone(),
        _ => format!("(or {})", terms.join(" ")),
    }
}

fn and_of(terms: &[String]) -> String {
    match terms.len() {
        0 => "true".into(),
        1 => terms[0].clone(),
        _ => format!("(and {})", terms.join(" ")),
    }
}

fn count_of(terms: &[String]) -> String {
    let ites: Vec<String> = terms.iter().map(|c| format!("(ite {c} 1 0)")).collect();
    match ites.len() {
        0 => "0".into(),
        1 => ites[0].clone(),
        _ => format!("(+ {})", ites.join(" ")),
    }
}

fn active(template: &Template, t: usize) -> String {
    let links: Vec<String> = (0..template.outputs())
        .filter(|&i| template.link_allowed(i, t))
        .map(|i| link(i, t))
        .collect();
    or_of(&links)
}

/// Emits the SMT-LIB v2.6 problem (declarations and assertions, without
/// `check-sat`). The text depends only on the problem, byte for byte.
pub fn encode_miter(problem: &MiterProblem<'_>) -> Result<String> {
    let template = problem.template;
    let (n, m, products) = (template.inputs(), template.outputs(), template.product_count());
    if n > ENCODING_INPUT_CAP {
        return Err(Error::ResourceGuard {
            what: "input count for the miter encoding",
            actual: n,
            limit: ENCODING_INPUT_CAP,
        });
    }
    if m > ENCODING_OUTPUT_CAP {
        return Err(Error::ResourceGuard {
            what: "output count for the miter encoding",
            actual: m,
            limit: ENCODING_OUTPUT_CAP,
        });
    }
    problem.check()?;
    let table = truth_table(problem.exact)?;

    let mut s = String::new();
    let w = &mut s;
    writeln!(
        w,
        "; miter for {} with a {} template (inputs {n}, outputs {m}, size {}), et {}, bounds ({}, {})",
        problem.exact.name(),
        template.family(),
        template.size(),
        problem.spec.et,
        problem.bounds.a,
        problem.bounds.b
    )
    .unwrap();
    writeln!(w, "(set-logic QF_LIA)").unwrap();
    for name in parameter_names(template) {
        writeln!(w, "(declare-const {name} Bool)").unwrap();
    }

    writeln!(w, "; selectors: negation only on used inputs").unwrap();
    for t in 0..products {
        for j in 0..n {
            writeln!(w, "(assert (=> {} {}))", sel_neg(t, j), sel_used(t, j)).unwrap();
        }
    }
    writeln!(w, "; unlinked products ignore every input").unwrap();
    for t in 0..products {
        let unused: Vec<String> = (0..n).map(|j| format!("(not {})", sel_used(t, j))).collect();
        writeln!(w, "(assert (=> (not {}) {}))", active(template, t), and_of(&unused)).unwrap();
    }
    writeln!(w, "; linked products come first").unwrap();
    let block = match template.family() {
        Family::Shared => products.max(1),
        Family::Nonshared => template.size().max(1),
    };
    for t in 1..products {
        if t % block != 0 {
            writeln!(w, "(assert (=> {} {}))", active(template, t), active(template, t - 1)).unwrap();
        }
    }

    writeln!(w, "; proxy bounds").unwrap();
    let (a, b) = (problem.bounds.a, problem.bounds.b);
    match template.family() {
        Family::Shared => {
            let act: Vec<String> = (0..products).map(|t| active(template, t)).collect();
            writeln!(w, "(assert (<= {} {a}))", count_of(&act)).unwrap();
            let links: Vec<String> = (0..m).flat_map(|i| (0..products).map(move |t| link(i, t))).collect();
            writeln!(w, "(assert (<= {} {b}))", count_of(&links)).unwrap();
        }
        Family::Nonshared => {
            for t in 0..products {
                let used: Vec<String> = (0..n).map(|j| sel_used(t, j)).collect();
                writeln!(w, "(assert (<= {} {a}))", count_of(&used)).unwrap();
            }
            for i in 0..m {
                let fed: Vec<String> = (0..products)
                    .filter(|&t| template.link_allowed(i, t))
                    .map(|t| {
                        let used: Vec<String> = (0..n).map(|j| sel_used(t, j)).collect();
                        format!("(and {} {})", link(i, t), or_of(&used))
                    })
                    .collect();
                writeln!(w, "(assert (<= {} {b}))", count_of(&fed)).unwrap();
            }
        }
    }

    writeln!(w, "; error bound for every input vector").unwrap();
    let max_value = (1u64 << m) - 1;
    for k in 0..table.len() {
        let exact = table.value(k);
        let lo = exact.saturating_sub(problem.spec.et);
        let hi = exact.saturating_add(problem.spec.et);
        if lo == 0 && hi >= max_value {
            continue;
        }
        let mut bindings = Vec::with_capacity(products);
        for t in 0..products {
            let lits: Vec<String> = (0..n)
                .map(|j| {
                    if (k >> j) & 1 == 1 {
                        format!("(not {})", sel_neg(t, j))
                    } else {
                        format!("(or (not {}) {})", sel_used(t, j), sel_neg(t, j))
                    }
                })
                .collect();
            bindings.push(format!("(q{t} {})", and_of(&lits)));
        }
        let bits: Vec<String> = (0..m)
            .map(|i| {
                let mut terms = vec![constant(i)];
                terms.extend(
                    (0..products)
                        .filter(|&t| template.link_allowed(i, t))
                        .map(|t| format!("(and {} q{t})", link(i, t))),
                );
                format!("(ite {} {} 0)", or_of(&terms), 1u64 << i)
            })
            .collect();
        let value = if bits.len() == 1 {
            bits[0].clone()
        } else {
            format!("(+ {})", bits.join(" "))
        };
        let mut checks = Vec::new();
        if lo > 0 {
            checks.push(format!("(<= {lo} {value})"));
        }
        if hi < max_value {
            checks.push(format!("(<= {value} {hi})"));
        }
        let body = if checks.len() == 1 {
            checks.remove(0)
        } else {
            format!("(and {})", checks.join(" "))
        };
        if bindings.is_empty() {
            writeln!(w, "(assert {body})").unwrap();
        } else {
            writeln!(w, "(assert (let ({}) {body}))", bindings.join(" ")).unwrap();
        }
    }
    Ok(s)
}

/// Assertion excluding exactly this assignment.
pub fn blocking_clause(template: &Template, params: &ParameterAssignment) -> String {
    let names = parameter_names(template);
    let values = parameter_values(template, params);
    let lits: Vec<String> = names
        .iter()
        .zip(values)
        .map(|(name, v)| if v { format!("(not {name})") } else { name.clone() })
        .collect();
    format!("(assert {})\n", or_of(&lits))
}

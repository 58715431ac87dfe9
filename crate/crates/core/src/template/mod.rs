// SPDX-License-Identifier: Apache-2.0

//! Sum-of-products templates.
//!
//! A *nonshared* template gives every output its own block of `K` products;
//! a *shared* template has `T` products that any output may link to. In both
//! families each product chooses, per input, whether the input appears as is,
//! negated, or not at all (a product ignoring every input is the constant 1).
//! An output is the OR of its linked products, forced to 1 by its constant
//! flag, and 0 when it has neither.

mod params;
mod sample;

pub use params::{Literal, ParameterAssignment};
pub use sample::{random_assignment, random_assignment_with};

use std::fmt;

use crate::netlist::{Circuit, CircuitBuilder, Signal};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Nonshared,
    Shared,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Nonshared => "nonshared",
            Family::Shared => "shared",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "nonshared" => Ok(Family::Nonshared),
            "shared" => Ok(Family::Shared),
            other => Err(Error::Config(format!("unknown template family `{other}`"))),
        }
    }
}

/// Structure of a template: family, port counts and size (`K` products per
/// output for nonshared, `T` products in total for shared).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    family: Family,
    inputs: usize,
    outputs: usize,
    size: usize,
}

impl Template {
    pub fn nonshared(inputs: usize, outputs: usize, per_output: usize) -> Template {
        assert!(
            inputs >= 1 && outputs >= 1,
            "templates need at least one input and output"
        );
        Template {
            family: Family::Nonshared,
            inputs,
            outputs,
            size: per_output,
        }
    }

    pub fn shared(inputs: usize, outputs: usize, products: usize) -> Template {
        assert!(
            inputs >= 1 && outputs >= 1,
            "templates need at least one input and output"
        );
        Template {
            family: Family::Shared,
            inputs,
            outputs,
            size: products,
        }
    }

    /// Template of the given family sized for `circuit`'s ports.
    pub fn for_circuit(family: Family, circuit: &Circuit, size: usize) -> Template {
        match family {
            Family::Nonshared => Template::nonshared(circuit.input_count(), circuit.output_count(), size),
            Family::Shared => Template::shared(circuit.input_count(), circuit.output_count(), size),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// `K` for nonshared, `T` for shared.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of product rows in an assignment.
    pub fn product_count(&self) -> usize {
        match self.family {
            Family::Nonshared => self.outputs * self.size,
            Family::Shared => self.size,
        }
    }

    /// Whether product `t` may feed output `i`.
    pub fn link_allowed(&self, output: usize, product: usize) -> bool {
        match self.family {
            Family::Shared => true,
            Family::Nonshared => product / self.size.max(1) == output && self.size > 0,
        }
    }

    /// Assignment with every selector ignored, no links and no constants.
    pub fn empty_assignment(&self) -> ParameterAssignment {
        ParameterAssignment::empty(self.family, self.inputs, self.outputs, self.product_count())
    }

    /// Checks that `params` fits this template.
    pub fn check(&self, params: &ParameterAssignment) -> Result<()> {
        if params.family() != self.family {
            return Err(Error::FamilyMismatch {
                expected: self.family,
                actual: params.family(),
            });
        }
        params.check_shape()?;
        if params.inputs() != self.inputs
            || params.outputs() != self.outputs
            || params.product_count() != self.product_count()
        {
            return Err(Error::ParameterShape(format!(
                "assignment is {}x{} with {} products, template is {}x{} with {}",
                params.inputs(),
                params.outputs(),
                params.product_count(),
                self.inputs,
                self.outputs,
                self.product_count()
            )));
        }
        for i in 0..self.outputs {
            for t in 0..self.product_count() {
                if params.link(i, t) && !self.link_allowed(i, t) {
                    return Err(Error::ParameterShape(format!(
                        "product {t} cannot feed output {i} in a nonshared template"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Converts a nonshared assignment into the equivalent shared one (`T = m * K`).
    pub fn to_shared(&self, params: &ParameterAssignment) -> Result<(Template, ParameterAssignment)> {
        self.check(params)?;
        let template = Template::shared(self.inputs, self.outputs, self.product_count());
        Ok((template, params.with_family(Family::Shared)))
    }
}

/// Proxy bounds of one exploration cell: `(LPP, PPO)` for nonshared,
/// `(PIT, ITS)` for shared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProxyBounds {
    pub family: Family,
    pub a: usize,
    pub b: usize,
}

impl ProxyBounds {
    pub fn new(family: Family, a: usize, b: usize) -> ProxyBounds {
        ProxyBounds { family, a, b }
    }

    /// Shared cells with no products but some links allowed are vacuous.
    pub fn is_vacuous(&self) -> bool {
        self.family == Family::Shared && self.a == 0 && self.b > 0
    }

    pub fn admits(&self, params: &ParameterAssignment) -> bool {
        if params.family() != self.family {
            return false;
        }
        match self.family {
            Family::Nonshared => params.lpp() <= self.a && params.ppo() <= self.b,
            Family::Shared => params.pit() <= self.a && params.its() <= self.b,
        }
    }

    /// Componentwise `self <= other`.
    pub fn within(&self, other: &ProxyBounds) -> bool {
        self.family == other.family && self.a <= other.a && self.b <= other.b
    }
}

fn expect_family(params: &ParameterAssignment, family: Family) -> Result<()> {
    if params.family() == family {
        Ok(())
    } else {
        Err(Error::FamilyMismatch {
            expected: family,
            actual: params.family(),
        })
    }
}

/// Largest literal count of any product.
pub fn count_lpp(params: &ParameterAssignment) -> Result<usize> {
    expect_family(params, Family::Nonshared)?;
    Ok(params.lpp())
}

/// Largest number of non-constant linked products of any output.
pub fn count_ppo(params: &ParameterAssignment) -> Result<usize> {
    expect_family(params, Family::Nonshared)?;
    Ok(params.ppo())
}

/// Number of products linked to at least one output.
pub fn count_pit(params: &ParameterAssignment) -> Result<usize> {
    expect_family(params, Family::Shared)?;
    Ok(params.pit())
}

/// Total number of product-to-output links.
pub fn count_its(params: &ParameterAssignment) -> Result<usize> {
    expect_family(params, Family::Shared)?;
    Ok(params.its())
}

/// Builds the circuit selected by `params`.
///
/// Each linked product becomes one AND over its literals (a wire for a single
/// literal, constant 1 for none) shared by every output it feeds; negated
/// inputs share one inverter. Inputs are named `x<j>` and outputs `y<i>`.
pub fn instantiate(template: &Template, params: &ParameterAssignment) -> Result<Circuit> {
    template.check(params)?;
    let mut b = CircuitBuilder::new("approx");
    let inputs: Vec<Signal> = (0..template.inputs()).map(|j| b.input(format!("x{j}"))).collect();
    let mut products: Vec<Option<Signal>> = vec![None; params.product_count()];
    for (t, slot) in products.iter_mut().enumerate() {
        if !params.is_active(t) {
            continue;
        }
        let literals: Vec<Signal> = params
            .selectors(t)
            .iter()
            .zip(&inputs)
            .filter_map(|(lit, &x)| match lit {
                Literal::Pass => Some(x),
                Literal::Negate => Some(b.not(x)),
                Literal::Ignore => None,
            })
            .collect();
        *slot = Some(b.and(&literals));
    }
    for i in 0..template.outputs() {
        let signal = if params.constant(i) {
            Signal::Const(true)
        } else {
            let terms: Vec<Signal> = (0..params.product_count())
                .filter(|&t| params.link(i, t))
                .map(|t| products[t].expect("linked products are built"))
                .collect();
            b.or(&terms)
        };
        b.output(format!("y{i}"), signal);
    }
    b.build()
}

/// Shared assignment with one product per minterm of `rows` (one value per
/// input vector, `rows.len() == 2^inputs`), realising the table exactly.
/// Rows whose value is zero get no product. Needs `T >= 2^inputs`.
pub fn sum_of_minterms(template: &Template, rows: &[u64]) -> Result<ParameterAssignment> {
    if template.family() != Family::Shared {
        return Err(Error::FamilyMismatch {
            expected: Family::Shared,
            actual: template.family(),
        });
    }
    let n = template.inputs();
    if rows.len() != 1usize << n {
        return Err(Error::ParameterShape(format!("{} rows for {n} inputs", rows.len())));
    }
    let needed = rows.iter().filter(|&&v| v != 0).count();
    if needed > template.product_count() {
        return Err(Error::ParameterShape(format!(
            "{needed} minterms do not fit in {} products",
            template.product_count()
        )));
    }
    let mut params = template.empty_assignment();
    let mut t = 0;
    for (k, &value) in rows.iter().enumerate() {
        if value == 0 {
            continue;
        }
        for j in 0..n {
            let lit = if (k >> j) & 1 == 1 {
                Literal::Pass
            } else {
                Literal::Negate
            };
            params.set_selector(t, j, lit);
        }
        for i in 0..template.outputs() {
            if (value >> i) & 1 == 1 {
                params.set_link(i, t, true);
            }
        }
        t += 1;
    }
    Ok(params)
}

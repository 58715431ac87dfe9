// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{Family, Template};
use crate::{Error, Result};

/// Role of one input inside one product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Literal {
    Pass,
    Negate,
    /// The input is replaced by constant 1, i.e. left out of the product.
    #[default]
    Ignore,
}

impl Literal {
    pub const ALL: [Literal; 3] = [Literal::Pass, Literal::Negate, Literal::Ignore];

    /// PLA cube notation: `1`, `0`, `-`.
    pub fn as_char(self) -> char {
        match self {
            Literal::Pass => '1',
            Literal::Negate => '0',
            Literal::Ignore => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Literal> {
        match c {
            '1' => Some(Literal::Pass),
            '0' => Some(Literal::Negate),
            '-' => Some(Literal::Ignore),
            _ => None,
        }
    }
}

/// Concrete values for every parameter of a template.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParameterAssignment {
    family: Family,
    inputs: usize,
    outputs: usize,
    /// `[product][input]`
    selectors: Vec<Vec<Literal>>,
    /// `[output][product]`
    links: Vec<Vec<bool>>,
    constants: Vec<bool>,
}

impl ParameterAssignment {
    pub(crate) fn empty(family: Family, inputs: usize, outputs: usize, products: usize) -> Self {
        ParameterAssignment {
            family,
            inputs,
            outputs,
            selectors: vec![vec![Literal::Ignore; inputs]; products],
            links: vec![vec![false; products]; outputs],
            constants: vec![false; outputs],
        }
    }

    /// Assembles an assignment from raw matrices; the shape is checked.
    pub fn from_parts(
        family: Family,
        inputs: usize,
        selectors: Vec<Vec<Literal>>,
        links: Vec<Vec<bool>>,
        constants: Vec<bool>,
    ) -> Result<Self> {
        let p = ParameterAssignment {
            family,
            inputs,
            outputs: links.len(),
            selectors,
            links,
            constants,
        };
        p.check_shape()?;
        Ok(p)
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        let products = self.selectors.len();
        if self.selectors.iter().any(|row| row.len() != self.inputs) {
            return Err(Error::ParameterShape(format!(
                "selector rows must have {} entries",
                self.inputs
            )));
        }
        if self.links.len() != self.outputs || self.links.iter().any(|row| row.len() != products) {
            return Err(Error::ParameterShape(format!(
                "link matrix must be {}x{products}",
                self.outputs
            )));
        }
        if self.constants.len() != self.outputs {
            return Err(Error::ParameterShape(format!(
                "expected {} output constants",
                self.outputs
            )));
        }
        Ok(())
    }

    pub(crate) fn with_family(&self, family: Family) -> Self {
        ParameterAssignment { family, ..self.clone() }
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

    pub fn product_count(&self) -> usize {
        self.selectors.len()
    }

    pub fn selectors(&self, product: usize) -> &[Literal] {
        &self.selectors[product]
    }

    pub fn selector(&self, product: usize, input: usize) -> Literal {
        self.selectors[product][input]
    }

    pub fn set_selector(&mut self, product: usize, input: usize, lit: Literal) {
        self.selectors[product][input] = lit;
    }

    pub fn link(&self, output: usize, product: usize) -> bool {
        self.links[output][product]
    }

    pub fn set_link(&mut self, output: usize, product: usize, on: bool) {
        self.links[output][product] = on;
    }

    pub fn constant(&self, output: usize) -> bool {
        self.constants[output]
    }

    pub fn set_constant(&mut self, output: usize, on: bool) {
        self.constants[output] = on;
    }

    /// Whether the product feeds at least one output.
    pub fn is_active(&self, product: usize) -> bool {
        self.links.iter().any(|row| row[product])
    }

    pub fn literal_count(&self, product: usize) -> usize {
        self.selectors[product]
            .iter()
            .filter(|&&l| l != Literal::Ignore)
            .count()
    }

    /// Literals per product (maximum over all products).
    pub fn lpp(&self) -> usize {
        (0..self.product_count())
            .map(|t| self.literal_count(t))
            .max()
            .unwrap_or(0)
    }

    /// Products per output: the largest count of linked non-constant products.
    pub fn ppo(&self) -> usize {
        self.links
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(t, &on)| on && self.literal_count(t) > 0)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// Products in total: products linked to at least one output.
    pub fn pit(&self) -> usize {
        (0..self.product_count()).filter(|&t| self.is_active(t)).count()
    }

    /// Total product-to-sum links.
    pub fn its(&self) -> usize {
        self.links.iter().flatten().filter(|&&on| on).count()
    }

    /// Text form, see [`ParameterAssignment::from_text`].
    pub fn to_text(&self, template: &Template) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "template {} {} {} {}",
            template.family(),
            template.inputs(),
            template.outputs(),
            template.size()
        )
        .unwrap();
        for (t, row) in self.selectors.iter().enumerate() {
            let cube: String = row.iter().map(|l| l.as_char()).collect();
            writeln!(s, "product {t} {cube}").unwrap();
        }
        for i in 0..self.outputs {
            write!(s, "output {i} const {}", u8::from(self.constants[i])).unwrap();
            s.push_str(" links");
            for t in (0..self.product_count()).filter(|&t| self.links[i][t]) {
                write!(s, " {t}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parses the text form:
    ///
    /// ```text
    /// # comments start with '#'
    /// template shared 2 2 2         # family, inputs, outputs, T (or K per output)
    /// product 0 1-                  # one cube per product, input 0 first
    /// product 1 -0
    /// output 0 const 0 links 0 1    # constant flag, linked product indices
    /// output 1 const 1 links
    /// ```
    ///
    /// Every product and output line must be present, in index order.
    pub fn from_text(text: &str) -> Result<(Template, ParameterAssignment)> {
        let bad = |line: usize, msg: &str| Error::Syntax {
            line,
            column: 1,
            message: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, header) = lines.next().ok_or_else(|| bad(1, "missing `template` line"))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        let template = match words.as_slice() {
            ["template", family, n, m, size] => {
                let family: Family = family.parse()?;
                let num = |w: &str| w.parse::<usize>().map_err(|_| bad(ln, "expected a number"));
                let (n, m, size) = (num(n)?, num(m)?, num(size)?);
                if n == 0 || m == 0 {
                    return Err(bad(ln, "templates need at least one input and output"));
                }
                match family {
                    Family::Nonshared => Template::nonshared(n, m, size),
                    Family::Shared => Template::shared(n, m, size),
                }
            }
            _ => return Err(bad(ln, "expected `template FAMILY INPUTS OUTPUTS SIZE`")),
        };
        let mut params = template.empty_assignment();

        for t in 0..template.product_count() {
            let (ln, line) = lines.next().ok_or_else(|| bad(ln, "missing product line"))?;
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["product", idx, cube] if idx.parse::<usize>().ok() == Some(t) => {
                    if cube.chars().count() != template.inputs() {
                        return Err(bad(ln, "cube length differs from the input count"));
                    }
                    for (j, c) in cube.chars().enumerate() {
                        let lit = Literal::from_char(c).ok_or_else(|| bad(ln, "cube characters are 1, 0 or -"))?;
                        params.set_selector(t, j, lit);
                    }
                }
                _ => return Err(bad(ln, &format!("expected `product {t} CUBE`"))),
            }
        }
        for i in 0..template.outputs() {
            let (ln, line) = lines.next().ok_or_else(|| bad(ln, "missing output line"))?;
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["output", idx, "const", flag, "links", rest @ ..] if idx.parse::<usize>().ok() == Some(i) => {
                    params.set_constant(
                        i,
                        match *flag {
                            "0" => false,
                            "1" => true,
                            _ => return Err(bad(ln, "constant flag is 0 or 1")),
                        },
                    );
                    for w in rest {
                        let t: usize = w.parse().map_err(|_| bad(ln, "expected a product index"))?;
                        if t >= template.product_count() {
                            return Err(bad(ln, "product index out of range"));
                        }
                        params.set_link(i, t, true);
                    }
                }
                _ => return Err(bad(ln, &format!("expected `output {i} const FLAG links ...`"))),
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(bad(ln, "unexpected trailing content"));
        }
        template.check(&params)?;
        Ok((template, params))
    }
}

// SPDX-License-Identifier: Apache-2.0

use super::encode::{parameter_names, parameter_values};
use crate::template::{Literal, ParameterAssignment, Template};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub(crate) fn parse_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().filter(|_| !stack.is_empty());
                let done = done.ok_or_else(|| Error::Protocol("unbalanced `)` in solver output".into()))?;
                stack.last_mut().expect("non-empty").push(Sexp::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' | '|' => {
                let mut atom = String::from(c);
                for d in chars.by_ref() {
                    atom.push(d);
                    if d == c {
                        break;
                    }
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(atom));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    atom.push(d);
                    chars.next();
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(atom));
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::Protocol("unbalanced `(` in solver output".into()));
    }
    Ok(stack.pop().unwrap())
}

enum Var {
    SelUsed(usize, usize),
    SelNeg(usize, usize),
    Link(usize, usize),
    Const(usize),
}

fn parse_var(name: &str) -> Option<Var> {
    let nums = |rest: &str| -> Option<Vec<usize>> { rest.split('_').map(|p| p.parse().ok()).collect() };
    if let Some(rest) = name.strip_prefix("p_sel_") {
        let (idx, kind) = rest.rsplit_once('_')?;
        let v = nums(idx)?;
        return match (v.as_slice(), kind) {
            ([t, j], "u") => Some(Var::SelUsed(*t, *j)),
            ([t, j], "n") => Some(Var::SelNeg(*t, *j)),
            _ => None,
        };
    }
    if let Some(rest) = name.strip_prefix("p_link_") {
        return match nums(rest)?.as_slice() {
            [i, t] => Some(Var::Link(*i, *t)),
            _ => None,
        };
    }
    if let Some(rest) = name.strip_prefix("p_const_") {
        return match nums(rest)?.as_slice() {
            [i] => Some(Var::Const(*i)),
            _ => None,
        };
    }
    None
}

/// Decodes a `get-model` response into an assignment of `template`.
///
/// Parameters the model does not mention keep their defaults (ignored
/// selector, no link, no constant).
pub fn decode_model(model_text: &str, template: &Template) -> Result<ParameterAssignment> {
    let top = parse_sexps(model_text)?;
    let entries: Vec<&Sexp> = match top.as_slice() {
        [] => Vec::new(),
        [Sexp::List(items)] => {
            let skip = usize::from(matches!(items.first(), Some(Sexp::Atom(a)) if a == "model"));
            items[skip..].iter().collect()
        }
        _ => return Err(Error::Protocol("expected a single model s-expression".into())),
    };

    let (n, m, products) = (template.inputs(), template.outputs(), template.product_count());
    let mut used = vec![vec![false; n]; products];
    let mut neg = vec![vec![false; n]; products];
    let mut params = template.empty_assignment();
    for entry in entries {
        let Sexp::List(items) = entry else {
            return Err(Error::Protocol(format!("unexpected model entry {entry:?}")));
        };
        let (name, value) = match items.as_slice() {
            [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), Sexp::Atom(sort), Sexp::Atom(value)]
                if kw == "define-fun" && args.is_empty() && sort == "Bool" =>
            {
                let value = match value.as_str() {
                    "true" => true,
                    "false" => false,
                    other => return Err(Error::Protocol(format!("`{name}` has non-constant value `{other}`"))),
                };
                (name.as_str(), value)
            }
            _ => return Err(Error::Protocol(format!("unexpected model entry {entry:?}"))),
        };
        let unknown = || Error::Protocol(format!("unknown variable `{name}`"));
        match parse_var(name).ok_or_else(unknown)? {
            Var::SelUsed(t, j) if t < products && j < n => used[t][j] = value,
            Var::SelNeg(t, j) if t < products && j < n => neg[t][j] = value,
            Var::Link(i, t) if i < m && t < products && template.link_allowed(i, t) => params.set_link(i, t, value),
            Var::Const(i) if i < m => params.set_constant(i, value),
            _ => return Err(unknown()),
        }
    }
    for t in 0..products {
        for j in 0..n {
            let lit = match (used[t][j], neg[t][j]) {
                (false, _) => Literal::Ignore,
                (true, false) => Literal::Pass,
                (true, true) => Literal::Negate,
            };
            params.set_selector(t, j, lit);
        }
    }
    Ok(params)
}

/// Model text a solver would print for `params` (used in tests and tooling).
pub fn model_text(template: &Template, params: &ParameterAssignment) -> String {
    let mut s = String::from("(\n");
    for (name, v) in parameter_names(template).iter().zip(parameter_values(template, params)) {
        s.push_str(&format!("  (define-fun {name} () Bool\n    {v})\n"));
    }
    s.push_str(")\n");
    s
}

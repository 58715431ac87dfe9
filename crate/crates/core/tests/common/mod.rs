// SPDX-License-Identifier: Apache-2.0

//! Randomised invariant checks shared by the property and acceptance suites.

#![allow(dead_code)]

use std::time::Duration;

use apxsynth::netlist::{emit_netlist, emit_verilog, parse_netlist};
use apxsynth::prelude::*;
use apxsynth::template::sum_of_minterms;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Check = fn(u32) -> Result<(), String>;

/// Every invariant with its name.
pub const PROPERTIES: [(&str, Check); 9] = [
    ("expressiveness witness", expressiveness),
    ("sharing subsumption", sharing_subsumption),
    ("area sharing benefit", sharing_benefit),
    ("area monotonicity", area_monotonicity),
    ("weakening monotonicity", weakening_monotonicity),
    ("encode determinism", encode_determinism),
    ("netlist round trip", netlist_round_trip),
    ("parameter text round trip", params_round_trip),
    ("oracle identity and symmetry", oracle_identity),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn lit(code: u8) -> Literal {
    Literal::ALL[code as usize % 3]
}

/// Raw assignment parts for a template of the given shape.
fn parts(n: usize, m: usize, products: usize) -> impl Strategy<Value = (Vec<Vec<Literal>>, Vec<Vec<bool>>, Vec<bool>)> {
    (
        prop::collection::vec(prop::collection::vec((0u8..3).prop_map(lit), n), products),
        prop::collection::vec(prop::collection::vec(any::<bool>(), products), m),
        prop::collection::vec(prop::bool::weighted(0.1), m),
    )
}

/// A shared template with an arbitrary assignment.
pub fn shared_case() -> impl Strategy<Value = (Template, ParameterAssignment)> {
    (1usize..=4, 1usize..=3, 1usize..=5).prop_flat_map(|(n, m, t)| {
        parts(n, m, t).prop_map(move |(s, l, c)| {
            let p = ParameterAssignment::from_parts(Family::Shared, n, s, l, c).unwrap();
            (Template::shared(n, m, t), p)
        })
    })
}

/// A nonshared template with an arbitrary block-diagonal assignment.
pub fn nonshared_case() -> impl Strategy<Value = (Template, ParameterAssignment)> {
    (1usize..=4, 1usize..=3, 1usize..=3).prop_flat_map(|(n, m, k)| {
        parts(n, m, m * k).prop_map(move |(s, mut l, c)| {
            for (i, row) in l.iter_mut().enumerate() {
                for (t, on) in row.iter_mut().enumerate() {
                    *on &= t / k == i;
                }
            }
            let p = ParameterAssignment::from_parts(Family::Nonshared, n, s, l, c).unwrap();
            (Template::nonshared(n, m, k), p)
        })
    })
}

fn table(c: &Circuit) -> Vec<u64> {
    truth_table(c).unwrap().values().to_vec()
}

pub fn expressiveness(cases: u32) -> Result<(), String> {
    let f = (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(0u64..2, 1 << n)));
    check(cases, f, |(n, rows)| {
        let template = Template::shared(n, 1, 1 << n);
        let params = sum_of_minterms(&template, &rows).unwrap();
        let circuit = instantiate(&template, &params).unwrap();
        prop_assert_eq!(table(&circuit), rows);
        Ok(())
    })
}

pub fn sharing_subsumption(cases: u32) -> Result<(), String> {
    check(cases, nonshared_case(), |(template, params)| {
        let (shared, p) = template.to_shared(&params).unwrap();
        prop_assert_eq!(shared.family(), Family::Shared);
        prop_assert_eq!(shared.product_count(), template.product_count());
        let a = instantiate(&template, &params).unwrap();
        let b = instantiate(&shared, &p).unwrap();
        prop_assert_eq!(table(&a), table(&b));
        Ok(())
    })
}

pub fn sharing_benefit(cases: u32) -> Result<(), String> {
    let case = (2usize..=5, 2usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec((0u8..3).prop_map(lit), n),
            prop::collection::vec(any::<bool>(), m),
            Just(m),
        )
    });
    check(cases, case, |(literals, mut linked, m)| {
        prop_assume!(literals.iter().filter(|l| **l != Literal::Ignore).count() >= 2);
        if linked.iter().filter(|&&b| b).count() < 2 {
            linked[0] = true;
            linked[1] = true;
        }
        let n = literals.len();
        let shared = Template::shared(n, m, 1);
        let sp = ParameterAssignment::from_parts(
            Family::Shared,
            n,
            vec![literals.clone()],
            linked.iter().map(|&b| vec![b]).collect(),
            vec![false; m],
        )
        .unwrap();
        // one private copy of the product per linked output
        let nonshared = Template::nonshared(n, m, 1);
        let np = ParameterAssignment::from_parts(
            Family::Nonshared,
            n,
            vec![literals.clone(); m],
            (0..m).map(|i| (0..m).map(|t| t == i && linked[i]).collect()).collect(),
            vec![false; m],
        )
        .unwrap();
        let a = instantiate(&shared, &sp).unwrap();
        let b = instantiate(&nonshared, &np).unwrap();
        prop_assert_eq!(table(&a), table(&b));
        let lib = default_library();
        prop_assert!(estimate_area(&a, &lib).total < estimate_area(&b, &lib).total);
        Ok(())
    })
}

pub fn area_monotonicity(cases: u32) -> Result<(), String> {
    let case = shared_case().prop_flat_map(|(t, p)| {
        let n = t.inputs();
        (
            Just(t),
            Just(p),
            prop::collection::vec((0u8..3).prop_map(lit), n),
            0..t.outputs(),
        )
    });
    check(cases, case, |(template, params, literals, output)| {
        prop_assume!(literals.iter().any(|l| *l != Literal::Ignore));
        // grow the template by one product and link it
        let grown = Template::shared(template.inputs(), template.outputs(), template.size() + 1);
        let mut selectors: Vec<Vec<Literal>> = (0..template.size()).map(|t| params.selectors(t).to_vec()).collect();
        selectors.push(literals);
        let links = (0..template.outputs())
            .map(|i| {
                let mut row: Vec<bool> = (0..template.size()).map(|t| params.link(i, t)).collect();
                row.push(i == output);
                row
            })
            .collect();
        let constants = (0..template.outputs()).map(|i| params.constant(i)).collect();
        let bigger =
            ParameterAssignment::from_parts(Family::Shared, template.inputs(), selectors, links, constants).unwrap();
        let lib = default_library();
        let before = estimate_area(&instantiate(&template, &params).unwrap(), &lib).total;
        let after = estimate_area(&instantiate(&grown, &bigger).unwrap(), &lib).total;
        prop_assert!(after >= before, "{} < {}", after, before);
        Ok(())
    })
}

pub fn weakening_monotonicity(cases: u32) -> Result<(), String> {
    let case = (shared_case(), 0usize..6, 0usize..12, 0usize..3, 0usize..3);
    check(cases, case, |((_, params), a, b, da, db)| {
        let tight = ProxyBounds::new(Family::Shared, a, b);
        let loose = ProxyBounds::new(Family::Shared, a + da, b + db);
        prop_assert!(tight.within(&loose));
        if tight.admits(&params) {
            prop_assert!(loose.admits(&params));
        }
        prop_assert_eq!(
            ProxyBounds::new(Family::Shared, params.pit(), params.its()).admits(&params),
            true
        );
        Ok(())
    })
}

pub fn encode_determinism(cases: u32) -> Result<(), String> {
    let case = (shared_case(), 0u64..4, 0usize..4, 0usize..6);
    check(cases, case, |((template, params), et, a, b)| {
        let exact = instantiate(&template, &params).unwrap();
        let problem = MiterProblem {
            exact: &exact,
            template: &template,
            spec: ErrorSpec::new(et),
            bounds: ProxyBounds::new(Family::Shared, a, b),
            solutions: 1,
            timeout: Duration::from_secs(1),
        };
        let first = encode_miter(&problem);
        let copy = template;
        let again = encode_miter(&MiterProblem {
            template: &copy,
            ..problem
        });
        match (first, again) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "encoding succeeded only once"),
        }
        Ok(())
    })
}

pub fn netlist_round_trip(cases: u32) -> Result<(), String> {
    check(
        cases,
        prop_oneof![shared_case(), nonshared_case()],
        |(template, params)| {
            let circuit = instantiate(&template, &params).unwrap();
            let text = emit_netlist(&circuit);
            let parsed = parse_netlist(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(table(&parsed), table(&circuit));
            prop_assert_eq!(parsed.inputs(), circuit.inputs());
            prop_assert_eq!(emit_netlist(&parsed), text);
            let verilog = emit_verilog(&circuit, circuit.name());
            prop_assert!(!verilog.contains("always"));
            Ok(())
        },
    )
}

pub fn params_round_trip(cases: u32) -> Result<(), String> {
    check(
        cases,
        prop_oneof![shared_case(), nonshared_case()],
        |(template, params)| {
            let text = params.to_text(&template);
            let (t2, p2) = ParameterAssignment::from_text(&text).unwrap();
            prop_assert_eq!(t2, template);
            prop_assert_eq!(p2, params);
            Ok(())
        },
    )
}

pub fn oracle_identity(cases: u32) -> Result<(), String> {
    check(
        cases,
        (shared_case(), any::<u64>(), any::<u64>()),
        |((template, params), x, y)| {
            let c = instantiate(&template, &params).unwrap();
            prop_assert_eq!(worst_case_error(&c, &c).unwrap(), 0);
            prop_assert!(is_sound(&c, &c, &ErrorSpec::new(0)).unwrap().sound);
            prop_assert_eq!(dist(x, y), dist(y, x));
            Ok(())
        },
    )
}

// SPDX-License-Identifier: Apache-2.0

//! Random sound approximations used as a baseline.
//!
//! Two strategies are available. `Rejection` draws proxy bounds uniformly up
//! to the maximum, samples an assignment inside them and keeps it only when
//! the oracle finds it sound. At small thresholds almost nothing survives, so
//! the default is `Walk`: independent seeded chains start from the exact
//! sum-of-minterms cover and take random mutations (toggle a link, change a
//! literal, drop a product, spawn a product), keeping a mutation only when
//! the result stays sound and inside the maximum bounds (or, while the start
//! lies outside them, shrinks PIT + ITS). A chain records its state every few
//! proposals after a burn-in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{table_error, ErrorSpec};
use crate::netlist::{truth_table_with, Circuit, TruthTable};
use crate::par::Exec;
use crate::template::{
    instantiate, random_assignment_with, sum_of_minterms, Family, Literal, ParameterAssignment, ProxyBounds, Template,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SamplerKind {
    Rejection,
    #[default]
    Walk,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SamplerKind> {
        match s {
            "rejection" => Ok(SamplerKind::Rejection),
            "walk" => Ok(SamplerKind::Walk),
            other => Err(Error::Config(format!("unknown sampler `{other}`"))),
        }
    }
}

/// Attempts allowed per requested sample.
pub const ATTEMPTS_PER_SAMPLE: usize = 100;
const CHAINS: usize = 8;
const BURN_IN: usize = 100;
const THIN: usize = 10;

#[derive(Clone, Debug)]
pub struct SampleSet {
    pub template: Template,
    pub samples: Vec<ParameterAssignment>,
    pub attempts: usize,
}

/// Template the sampler works in: shared, large enough for the minterm cover.
pub fn sampling_template(exact: &Circuit) -> Template {
    Template::shared(exact.input_count(), exact.output_count(), 1 << exact.input_count())
}

fn is_sound(exact: &TruthTable, template: &Template, p: &ParameterAssignment, spec: &ErrorSpec) -> Result<bool> {
    let c = instantiate(template, p)?;
    let t = truth_table_with(&c, Exec::Sequential)?;
    Ok(table_error(exact, &t, Exec::Sequential) <= spec.et)
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64 + 1);
    rng
}

/// Draws `count` random assignments of [`sampling_template`] that are sound
/// for `spec`, with at most `100 * count` attempts.
pub fn sample_sound(
    exact: &Circuit,
    spec: &ErrorSpec,
    max_bounds: (usize, usize),
    count: usize,
    seed: u64,
    kind: SamplerKind,
    exec: Exec,
) -> Result<SampleSet> {
    let template = sampling_template(exact);
    let table = truth_table_with(exact, Exec::Sequential)?;
    let per_chain = count.div_ceil(CHAINS);
    let chains = exec.map_range(CHAINS, |chain| {
        let mut rng = chain_rng(seed, chain);
        match kind {
            SamplerKind::Rejection => rejection_chain(&table, &template, spec, max_bounds, per_chain, &mut rng),
            SamplerKind::Walk => walk_chain(&table, &template, spec, max_bounds, per_chain, &mut rng),
        }
    });
    let mut samples = Vec::with_capacity(count);
    let mut attempts = 0;
    for chain in chains {
        let (found, tried) = chain?;
        samples.extend(found);
        attempts += tried;
    }
    samples.truncate(count);
    Ok(SampleSet {
        template,
        samples,
        attempts,
    })
}

fn rejection_chain(
    table: &TruthTable,
    template: &Template,
    spec: &ErrorSpec,
    max_bounds: (usize, usize),
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<ParameterAssignment>, usize)> {
    let mut found = Vec::new();
    let mut attempts = 0;
    while found.len() < target && attempts < ATTEMPTS_PER_SAMPLE * target {
        attempts += 1;
        let a = rng.random_range(0..=max_bounds.0);
        let b = if a == 0 { 0 } else { rng.random_range(0..=max_bounds.1) };
        let p = random_assignment_with(template, &ProxyBounds::new(Family::Shared, a, b), rng)?;
        if is_sound(table, template, &p, spec)? {
            found.push(p);
        }
    }
    Ok((found, attempts))
}

fn mutate(p: &mut ParameterAssignment, rng: &mut ChaCha8Rng) {
    let (n, m, products) = (p.inputs(), p.outputs(), p.product_count());
    let active: Vec<usize> = (0..products).filter(|&t| p.is_active(t)).collect();
    let pick_active = |rng: &mut ChaCha8Rng| active[rng.random_range(0..active.len())];
    match rng.random_range(0..4) {
        0 if !active.is_empty() => {
            let t = pick_active(rng);
            let i = rng.random_range(0..m);
            p.set_link(i, t, !p.link(i, t));
        }
        1 if !active.is_empty() => {
            let t = pick_active(rng);
            let j = rng.random_range(0..n);
            p.set_selector(t, j, Literal::ALL[rng.random_range(0..3)]);
        }
        2 if !active.is_empty() => {
            let t = pick_active(rng);
            for i in 0..m {
                p.set_link(i, t, false);
            }
        }
        _ => {
            if let Some(t) = (0..products).find(|&t| !p.is_active(t)) {
                for j in 0..n {
                    p.set_selector(t, j, Literal::ALL[rng.random_range(0..3)]);
                }
                p.set_link(rng.random_range(0..m), t, true);
            }
        }
    }
    // unlinked products keep no literals
    for t in 0..products {
        if !p.is_active(t) {
            for j in 0..n {
                p.set_selector(t, j, Literal::Ignore);
            }
        }
    }
}

fn size(p: &ParameterAssignment) -> usize {
    p.pit() + p.its()
}

fn walk_chain(
    table: &TruthTable,
    template: &Template,
    spec: &ErrorSpec,
    max_bounds: (usize, usize),
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<ParameterAssignment>, usize)> {
    let bounds = ProxyBounds::new(Family::Shared, max_bounds.0, max_bounds.1);
    let mut state = sum_of_minterms(template, table.values())?;
    let mut found = Vec::new();
    let mut attempts = 0;
    let cap = ATTEMPTS_PER_SAMPLE * target;
    let burn_in = BURN_IN.min(cap / 2);
    while found.len() < target && attempts < cap {
        attempts += 1;
        let mut next = state.clone();
        mutate(&mut next, rng);
        let allowed = bounds.admits(&next) || (!bounds.admits(&state) && size(&next) < size(&state));
        if next != state && allowed && is_sound(table, template, &next, spec)? {
            state = next;
        }
        if attempts > burn_in && attempts % THIN == 0 && bounds.admits(&state) {
            found.push(state.clone());
        }
    }
    Ok((found, attempts))
}

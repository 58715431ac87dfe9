// SPDX-License-Identifier: Apache-2.0

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Family, Literal, ParameterAssignment, ProxyBounds, Template};
use crate::{Error, Result};

/// Draws a random assignment satisfying `bounds`, reproducibly from `seed`.
pub fn random_assignment(template: &Template, bounds: &ProxyBounds, seed: u64) -> Result<ParameterAssignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_assignment_with(template, bounds, &mut rng)
}

/// Like [`random_assignment`] with a caller-owned generator.
///
/// Shared: the number of active products is uniform in `0..=min(PIT, T, ITS)`,
/// each active product gets one uniformly chosen output and then a uniform
/// number of extra links (within ITS) is spread uniformly over the remaining
/// product/output pairs. Nonshared: each output activates a uniform number of
/// its products (at most PPO), and each active product a uniform number of
/// literals (at most LPP) with random positions and polarities. Inactive
/// products ignore every input; output constants stay off.
pub fn random_assignment_with<R: Rng + ?Sized>(
    template: &Template,
    bounds: &ProxyBounds,
    rng: &mut R,
) -> Result<ParameterAssignment> {
    if bounds.family != template.family() {
        return Err(Error::FamilyMismatch {
            expected: template.family(),
            actual: bounds.family,
        });
    }
    if bounds.is_vacuous() {
        return Err(Error::InfeasibleBounds(format!(
            "ITS <= {} cannot be used with PIT <= 0",
            bounds.b
        )));
    }
    let mut p = template.empty_assignment();
    let (n, m) = (template.inputs(), template.outputs());
    match template.family() {
        Family::Shared => {
            let cap = bounds.a.min(template.product_count()).min(bounds.b);
            let k = rng.random_range(0..=cap);
            let active = index::sample(rng, template.product_count(), k).into_vec();
            for &t in &active {
                p.set_link(rng.random_range(0..m), t, true);
                for j in 0..n {
                    p.set_selector(t, j, Literal::ALL[rng.random_range(0..3)]);
                }
            }
            let extra_cap = (bounds.b - k).min(k * (m - 1));
            let extra = rng.random_range(0..=extra_cap);
            let free: Vec<(usize, usize)> = active
                .iter()
                .flat_map(|&t| (0..m).map(move |i| (i, t)))
                .filter(|&(i, t)| !p.link(i, t))
                .collect();
            for pick in index::sample(rng, free.len(), extra) {
                let (i, t) = free[pick];
                p.set_link(i, t, true);
            }
        }
        Family::Nonshared => {
            let per_output = template.size();
            let lits_cap = bounds.a.min(n);
            for i in 0..m {
                let k = rng.random_range(0..=bounds.b.min(per_output));
                for offset in index::sample(rng, per_output, k) {
                    let t = i * per_output + offset;
                    p.set_link(i, t, true);
                    let lits = rng.random_range(0..=lits_cap);
                    for j in index::sample(rng, n, lits) {
                        let lit = if rng.random_bool(0.5) {
                            Literal::Pass
                        } else {
                            Literal::Negate
                        };
                        p.set_selector(t, j, lit);
                    }
                }
            }
        }
    }
    Ok(p)
}

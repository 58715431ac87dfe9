// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs without the libtest harness so that one verdict
//! line per criterion is always printed; exits non-zero if any fails.
//! Needs `z3` on the `PATH` or `$APXSYNTH_SOLVER`.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use apxsynth::area::CellKind;
use apxsynth::explore::explore_with;
use apxsynth::harness::ProxyDataset;
use apxsynth::prelude::*;
use apxsynth::template::sum_of_minterms;

const SOUNDNESS_ETS: [u64; 3] = [1, 2, 4];
const SOUNDNESS_RUNTIME: Duration = Duration::from_secs(30 * 60);
const SOUNDNESS_CELL_TIMEOUT: Duration = Duration::from_secs(60);
/// Six-input benchmarks get a shorter cell timeout and a per-run budget.
const WIDE_CELL_TIMEOUT: Duration = Duration::from_secs(10);
const WIDE_BUDGET: Duration = Duration::from_secs(30);
const MIN_CORRELATION_SAMPLES: usize = 200;
const RANDOM_SAMPLES: usize = 1000;
const MIN_SPEARMAN: f64 = 0.8;
const COMPARISON_ETS: [u64; 4] = [1, 2, 3, 4];
const MIN_SHARED_WINS: usize = 3;
const PROPERTY_CASES: u32 = 128;
const MIN_PROPERTY_CASES: u32 = 1000;
const PROPERTY_RUNTIME: Duration = Duration::from_secs(10 * 60);
const SEED: u64 = 2024;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Best areas per (benchmark, family) series, keyed by ET.
type Series = BTreeMap<(String, Family), BTreeMap<u64, f64>>;

struct Context {
    lib: CellLibrary,
    solver: SolverConfig,
    series: Series,
}

fn exec() -> Exec {
    Exec::default()
}

fn soundness(ctx: &mut Context) -> apxsynth::Result<Verdict> {
    let started = Instant::now();
    let mut checked = 0;
    let mut violations = Vec::new();
    for benchmark in [Benchmark::adder(2)?, Benchmark::adder(3)?, Benchmark::multiplier(2)?] {
        let exact = benchmark.circuit()?;
        let mut config = ExperimentConfig::new(benchmark, SOUNDNESS_ETS.to_vec());
        config.per_cell_timeout = SOUNDNESS_CELL_TIMEOUT;
        if exact.input_count() > 4 {
            config.per_cell_timeout = WIDE_CELL_TIMEOUT;
            config.global_budget = WIDE_BUDGET;
        }
        for family in [Family::Shared, Family::Nonshared] {
            let template = config.template(family, &exact);
            let schedule = config.schedule(&template);
            for et in SOUNDNESS_ETS {
                let spec = ErrorSpec::new(et);
                let result = explore_with(&exact, &template, &spec, &schedule, &ctx.lib, &ctx.solver, exec())?;
                let circuits = std::iter::once(&result.best.circuit).chain(result.solutions().map(|(_, s)| &s.circuit));
                for circuit in circuits {
                    checked += 1;
                    let v = is_sound(&exact, circuit, &spec)?;
                    if !v.sound {
                        violations.push(format!("{benchmark} {family} et={et} wce={}", v.worst_case_error));
                    }
                }
                ctx.series
                    .entry((benchmark.to_string(), family))
                    .or_default()
                    .insert(et, result.best_area());
            }
        }
    }
    let elapsed = started.elapsed();
    Ok(verdict(
        violations.is_empty() && elapsed <= SOUNDNESS_RUNTIME,
        format!(
            "{checked} circuits re-verified, {} violations {:?}, {:.0} s",
            violations.len(),
            violations,
            elapsed.as_secs_f64()
        ),
    ))
}

fn exact_at_zero(ctx: &mut Context) -> apxsynth::Result<Verdict> {
    let exact = ripple_adder(2)?;
    let rows = 1 << exact.input_count();
    let template = Template::shared(exact.input_count(), exact.output_count(), rows);
    let bounds = ProxyBounds::new(Family::Shared, rows, rows * exact.output_count());
    let schedule = Schedule::new(Family::Shared, vec![bounds])?;
    let result = explore_with(
        &exact,
        &template,
        &ErrorSpec::new(0),
        &schedule,
        &ctx.lib,
        &ctx.solver,
        exec(),
    )?;
    let reference = truth_table(&exact)?;
    let best_equal = truth_table(&result.best.circuit)? == reference;
    let Some((_, solution)) = result.solutions().next() else {
        return Ok(verdict(false, format!("no model, status {}", result.log[0].status)));
    };
    let solved_equal = truth_table(&solution.circuit)? == reference;
    Ok(verdict(
        best_equal && solved_equal,
        format!(
            "solver circuit equal: {solved_equal}, returned circuit equal: {best_equal} (area {}, fallback {})",
            result.best_area(),
            result.fallback_used
        ),
    ))
}

/// Every assignment of a small template, by mixed-radix counting.
fn all_assignments(template: &Template) -> Vec<ParameterAssignment> {
    let (n, m, products) = (template.inputs(), template.outputs(), template.product_count());
    let slots: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..products).map(move |t| (i, t)))
        .filter(|&(i, t)| template.link_allowed(i, t))
        .collect();
    let selector_count = 3usize.pow((n * products) as u32);
    let mut out = Vec::new();
    for s in 0..selector_count {
        for l in 0..1usize << slots.len() {
            for c in 0..1usize << m {
                let mut p = template.empty_assignment();
                let mut code = s;
                for t in 0..products {
                    for j in 0..n {
                        p.set_selector(t, j, Literal::ALL[code % 3]);
                        code /= 3;
                    }
                }
                for (k, &(i, t)) in slots.iter().enumerate() {
                    p.set_link(i, t, (l >> k) & 1 == 1);
                }
                for i in 0..m {
                    p.set_constant(i, (c >> i) & 1 == 1);
                }
                out.push(p);
            }
        }
    }
    out
}

fn micro_agreement(ctx: &mut Context) -> apxsynth::Result<Verdict> {
    let minterm_template = Template::shared(2, 1, 4);
    let mut cells = 0;
    let mut disagreements = Vec::new();
    let templates = [
        Template::shared(2, 1, 1),
        Template::shared(2, 1, 2),
        Template::nonshared(2, 1, 1),
        Template::nonshared(2, 1, 2),
    ];
    for template in &templates {
        let space = all_assignments(template);
        let tables: Vec<Vec<u64>> = space
            .iter()
            .map(|p| Ok(truth_table(&instantiate(template, p)?)?.values().to_vec()))
            .collect::<apxsynth::Result<_>>()?;
        let max_bounds = match template.family() {
            Family::Shared => (template.size(), template.size() + 1),
            Family::Nonshared => (template.inputs(), template.size()),
        };
        let schedule = Schedule::grid(template.family(), max_bounds);
        for f in 0u64..16 {
            let rows: Vec<u64> = (0..4).map(|k| (f >> k) & 1).collect();
            let exact = instantiate(&minterm_template, &sum_of_minterms(&minterm_template, &rows)?)?;
            for et in [0, 1] {
                for bounds in schedule.cells() {
                    cells += 1;
                    let brute = space.iter().zip(&tables).any(|(p, table)| {
                        bounds.admits(p) && table.iter().zip(&rows).all(|(a, b)| a.abs_diff(*b) <= et)
                    });
                    let problem = MiterProblem {
                        exact: &exact,
                        template,
                        spec: ErrorSpec::new(et),
                        bounds: *bounds,
                        solutions: 1,
                        timeout: Duration::from_secs(30),
                    };
                    let status = solve(&problem, &ctx.solver)?.status;
                    let expected = if brute { SolverStatus::Sat } else { SolverStatus::Unsat };
                    if status != expected {
                        disagreements.push(format!(
                            "{} f={f:04b} et={et} ({}, {}): brute {expected}, solver {status}",
                            template.family(),
                            bounds.a,
                            bounds.b
                        ));
                    }
                }
            }
        }
    }
    Ok(verdict(
        disagreements.is_empty(),
        format!(
            "{} of {cells} cells agree {:?}",
            cells - disagreements.len(),
            disagreements
        ),
    ))
}

fn proxy_config(benchmark: Benchmark) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(benchmark, vec![1]);
    config.random_samples = RANDOM_SAMPLES;
    config.seed = SEED;
    config
}

struct ProxyRuns {
    adder: ProxyDataset,
    multiplier: ProxyDataset,
}

fn correlation(runs: &ProxyRuns) -> Verdict {
    let random: Vec<_> = runs.adder.of(Source::Random).collect();
    let x: Vec<f64> = random.iter().map(|p| p.pit_plus_its().unwrap_or(0) as f64).collect();
    let y: Vec<f64> = random.iter().map(|p| p.area).collect();
    let rho = spearman(&x, &y);
    verdict(
        random.len() >= MIN_CORRELATION_SAMPLES && rho >= MIN_SPEARMAN,
        format!("spearman(PIT+ITS, area) = {rho:.3} over {} sound samples", random.len()),
    )
}

fn dominance(runs: &ProxyRuns) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, data) in [("adder_i4_o3", &runs.adder), ("mul_i4_o4", &runs.multiplier)] {
        let random_count = data.of(Source::Random).count();
        match (data.min_area(Source::Solver), data.min_area(Source::Random)) {
            (Some(s), Some(r)) => {
                pass &= s <= r && random_count == RANDOM_SAMPLES;
                parts.push(format!("{name}: solver {s} vs random {r} ({random_count} samples)"));
            }
            (s, r) => {
                pass = false;
                parts.push(format!("{name}: solver {s:?} random {r:?}"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn shared_vs_nonshared(ctx: &mut Context) -> apxsynth::Result<Verdict> {
    let mut config = ExperimentConfig::new(Benchmark::adder(2)?, COMPARISON_ETS.to_vec());
    config.seed = SEED;
    let data = run_area_vs_et(&config, &ctx.lib, &ctx.solver, exec())?;
    let slack = ctx.lib.area(CellKind::And2);
    let mut wins = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut parts = Vec::new();
    for et in COMPARISON_ETS {
        let shared = data.best_area(Family::Shared, et).unwrap_or(f64::INFINITY);
        let nonshared = data.best_area(Family::Nonshared, et).unwrap_or(f64::INFINITY);
        if shared <= nonshared {
            wins += 1;
        }
        worst_gap = worst_gap.max(shared - nonshared);
        parts.push(format!("et={et}: {shared} vs {nonshared}"));
        for family in [Family::Shared, Family::Nonshared] {
            if let Some(area) = data.best_area(family, et) {
                ctx.series
                    .entry((config.benchmark.to_string() + "/et-sweep", family))
                    .or_default()
                    .insert(et, area);
            }
        }
    }
    Ok(verdict(
        wins >= MIN_SHARED_WINS && worst_gap <= slack,
        format!(
            "shared <= nonshared at {wins}/4 ETs, worst excess {worst_gap} ({})",
            parts.join(", ")
        ),
    ))
}

fn monotonicity(ctx: &Context) -> Verdict {
    let mut violations = Vec::new();
    for ((bench, family), series) in &ctx.series {
        let areas: Vec<(&u64, &f64)> = series.iter().collect();
        for w in areas.windows(2) {
            if w[1].1 > w[0].1 {
                violations.push(format!(
                    "{bench} {family}: et {} -> {} area {} -> {}",
                    w[0].0, w[1].0, w[0].1, w[1].1
                ));
            }
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "{} series checked, {} violations {:?}",
            ctx.series.len(),
            violations.len(),
            violations
        ),
    )
}

fn determinism(ctx: &mut Context, first_proxy: &ProxyDataset) -> apxsynth::Result<Verdict> {
    let again = run_area_vs_proxy(&proxy_config(Benchmark::adder(2)?), &ctx.lib, &ctx.solver, exec())?;
    let proxy_same = again.to_csv()? == first_proxy.to_csv()?;

    let mut et_config = ExperimentConfig::new(Benchmark::multiplier(2)?, vec![1, 2]);
    et_config.families = vec![Family::Shared];
    let et_a = run_area_vs_et(&et_config, &ctx.lib, &ctx.solver, Exec::Parallel)?.to_csv()?;
    let et_b = run_area_vs_et(&et_config, &ctx.lib, &ctx.solver, Exec::Sequential)?.to_csv()?;
    let et_same = et_a == et_b;

    let exact = ripple_adder(2)?;
    let template = Template::shared(4, 3, 9);
    let schedule = Schedule::grid(Family::Shared, (9, 18))
        .with_policy(StopPolicy::ExhaustGrid)
        .with_solutions(3);
    let mut dumps = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir()?;
        let solver = ctx.solver.clone().with_dump_dir(dir.path());
        explore_with(
            &exact,
            &template,
            &ErrorSpec::new(1),
            &schedule,
            &ctx.lib,
            &solver,
            exec(),
        )?;
        let mut files = BTreeMap::new();
        for entry in std::fs::read_dir(dir.path())? {
            let entry = entry?;
            files.insert(entry.file_name(), std::fs::read(entry.path())?);
        }
        dumps.push(files);
    }
    let dumps_same = dumps[0] == dumps[1] && dumps[0].len() == schedule.cells().len();
    Ok(verdict(
        proxy_same && et_same && dumps_same,
        format!(
            "proxy csv identical: {proxy_same}, et csv identical: {et_same}, {} smt dumps identical: {dumps_same}",
            dumps[0].len()
        ),
    ))
}

fn invariants() -> Verdict {
    let started = Instant::now();
    let mut total = 0;
    let mut failures = Vec::new();
    for (name, check) in common::PROPERTIES {
        total += PROPERTY_CASES;
        if let Err(e) = check(PROPERTY_CASES) {
            failures.push(format!("{name}: {e}"));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        failures.is_empty() && total >= MIN_PROPERTY_CASES && elapsed <= PROPERTY_RUNTIME,
        format!(
            "{} properties, {total} cases, {:.1} s, failures {:?}",
            common::PROPERTIES.len(),
            elapsed.as_secs_f64(),
            failures
        ),
    )
}

fn main() -> ExitCode {
    let solver = SolverConfig::from_env();
    if let Err(e) = solver.probe() {
        println!("solver unavailable: {e}");
        return ExitCode::FAILURE;
    }
    let mut ctx = Context {
        lib: default_library(),
        solver,
        series: Series::new(),
    };
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut record = |name: &'static str, outcome: apxsynth::Result<Verdict>| {
        let v = outcome.unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        println!("[{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((name, v));
    };

    record("1 soundness of synthesised circuits", soundness(&mut ctx));
    record("2 exact synthesis at ET 0", exact_at_zero(&mut ctx));
    record("3 oracle and solver agree on micro grids", micro_agreement(&mut ctx));
    let runs = (|| -> apxsynth::Result<ProxyRuns> {
        Ok(ProxyRuns {
            adder: run_area_vs_proxy(&proxy_config(Benchmark::adder(2)?), &ctx.lib, &ctx.solver, exec())?,
            multiplier: run_area_vs_proxy(&proxy_config(Benchmark::multiplier(2)?), &ctx.lib, &ctx.solver, exec())?,
        })
    })();
    match &runs {
        Ok(runs) => {
            record("4 proxy correlation", Ok(correlation(runs)));
            record("5 solver dominates random baseline", Ok(dominance(runs)));
        }
        Err(e) => {
            record("4 proxy correlation", Err(apxsynth::Error::Config(e.to_string())));
            record(
                "5 solver dominates random baseline",
                Err(apxsynth::Error::Config(e.to_string())),
            );
        }
    }
    record("6 shared at most nonshared", shared_vs_nonshared(&mut ctx));
    record("7 best area non-increasing in ET", Ok(monotonicity(&ctx)));
    match &runs {
        Ok(runs) => record("8 determinism", determinism(&mut ctx, &runs.adder)),
        Err(e) => record("8 determinism", Err(apxsynth::Error::Config(e.to_string()))),
    }
    record("9 invariant suite", Ok(invariants()));

    let failed = results.iter().filter(|(_, v)| !v.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

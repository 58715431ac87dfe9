// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use apxsynth::harness::{sample_sound, sampling_template, SamplerKind};
use apxsynth::prelude::*;

fn small_config(benchmark: Benchmark, ets: Vec<u64>) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(benchmark, ets);
    config.random_samples = 200;
    config.solutions_per_cell = 2;
    config.per_cell_timeout = Duration::from_secs(20);
    config.products_per_output = 2;
    config
}

#[test]
fn random_rows_reverify() {
    let exact = ripple_adder(2).unwrap();
    let spec = ErrorSpec::new(1);
    let set = sample_sound(&exact, &spec, (16, 48), 1000, 11, SamplerKind::Walk, Exec::default()).unwrap();
    assert_eq!(set.samples.len(), 1000);
    let template = sampling_template(&exact);
    for p in &set.samples {
        let c = instantiate(&template, p).unwrap();
        assert!(is_sound(&exact, &c, &spec).unwrap().sound);
    }
}

#[test]
fn proxy_dataset_is_reproducible() {
    let config = small_config(Benchmark::adder(2).unwrap(), vec![1]);
    let lib = default_library();
    let solver = SolverConfig::from_env();
    let a = run_area_vs_proxy(&config, &lib, &solver, Exec::Parallel).unwrap();
    let b = run_area_vs_proxy(&config, &lib, &solver, Exec::Sequential).unwrap();
    let csv = a.to_csv().unwrap();
    assert_eq!(csv, b.to_csv().unwrap());
    assert!(
        csv.starts_with("source,family,bound_a,bound_b,status,wall_time_s,solution_index,pit,its,lpp,ppo,area,wce\n")
    );
    assert_eq!(a.of(Source::Exact).count(), 1);
    assert_eq!(a.of(Source::Random).count(), 200);
    assert!(a.of(Source::Solver).all(|p| p.wce <= 1));
    assert_eq!(csv.lines().count(), 1 + a.points.len());
}

#[test]
fn et_dataset_shape() {
    let mut config = small_config(Benchmark::multiplier(2).unwrap(), vec![0, 2]);
    config.families = vec![Family::Shared];
    let data = run_area_vs_et(&config, &default_library(), &SolverConfig::from_env(), Exec::default()).unwrap();
    let csv = data.to_csv().unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "source,benchmark,family,et,area,fallback,pit,its,lpp,ppo,wce");
    assert!(lines[1].starts_with("EXACT,mul_i4_o4,,,"));
    assert_eq!(lines.len(), 4);
    let exact_area = data.points[0].area;
    let zero = &data.points[1];
    assert!(zero.fallback || zero.area <= exact_area);
    assert_eq!(zero.wce, 0);
    assert!(data.monotonicity_violations().is_empty());
}

// SPDX-License-Identifier: Apache-2.0

//! Experiment runner: benchmarks, the random sound baseline and the two
//! CSV datasets (area against proxy values, best area against ET).

mod sampler;
mod stats;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use sampler::{sample_sound, sampling_template, SampleSet, SamplerKind, ATTEMPTS_PER_SAMPLE};
pub use stats::{ranks, spearman};

use crate::area::{estimate_area, CellLibrary};
use crate::error::{worst_case_error_with, ErrorSpec};
use crate::explore::{
    explore_with, format_area, proxy_columns, write_csv, ExplorationResult, Schedule, StopPolicy, DEFAULT_CELL_TIMEOUT,
    DEFAULT_GLOBAL_BUDGET, LOG_COLUMNS,
};
use crate::netlist::{array_multiplier, ripple_adder, Circuit, MAX_ADDER_BITS, MAX_MULTIPLIER_BITS};
use crate::par::Exec;
use crate::smt::SolverConfig;
use crate::template::{instantiate, Family, ParameterAssignment, Template};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    Adder,
    Multiplier,
}

impl FromStr for Operation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Operation> {
        match s.to_ascii_lowercase().as_str() {
            "adder" | "add" => Ok(Operation::Adder),
            "mul" | "multiplier" => Ok(Operation::Multiplier),
            other => Err(Error::Config(format!("unknown operation `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Benchmark {
    pub op: Operation,
    pub bits: usize,
}

impl Benchmark {
    pub fn new(op: Operation, bits: usize) -> Result<Benchmark> {
        let cap = match op {
            Operation::Adder => MAX_ADDER_BITS,
            Operation::Multiplier => MAX_MULTIPLIER_BITS,
        };
        if bits == 0 || bits > cap {
            return Err(Error::Config(format!("bit width {bits} outside 1..={cap}")));
        }
        Ok(Benchmark { op, bits })
    }

    pub fn adder(bits: usize) -> Result<Benchmark> {
        Benchmark::new(Operation::Adder, bits)
    }

    pub fn multiplier(bits: usize) -> Result<Benchmark> {
        Benchmark::new(Operation::Multiplier, bits)
    }

    pub fn circuit(&self) -> Result<Circuit> {
        match self.op {
            Operation::Adder => ripple_adder(self.bits),
            Operation::Multiplier => array_multiplier(self.bits),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            Operation::Adder => write!(f, "adder_i{}_o{}", 2 * self.bits, self.bits + 1),
            Operation::Multiplier => write!(f, "mul_i{}_o{}", 2 * self.bits, 2 * self.bits),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub et_values: Vec<u64>,
    pub families: Vec<Family>,
    /// K, products per output of the nonshared template.
    pub products_per_output: usize,
    /// T of the shared template; `None` means `m * K`.
    pub shared_products: Option<usize>,
    /// Grid extents (PIT, ITS); `None` means `(T, 2T)`.
    pub shared_max: Option<(usize, usize)>,
    /// Grid extents (LPP, PPO); `None` means `(n, K)`.
    pub nonshared_max: Option<(usize, usize)>,
    pub solutions_per_cell: usize,
    pub per_cell_timeout: Duration,
    pub global_budget: Duration,
    pub random_samples: usize,
    /// (PIT, ITS) limits for random samples; `None` means unconstrained.
    pub random_max: Option<(usize, usize)>,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(benchmark: Benchmark, et_values: Vec<u64>) -> ExperimentConfig {
        ExperimentConfig {
            benchmark,
            et_values,
            families: vec![Family::Shared, Family::Nonshared],
            products_per_output: 3,
            shared_products: None,
            shared_max: None,
            nonshared_max: None,
            solutions_per_cell: 10,
            per_cell_timeout: DEFAULT_CELL_TIMEOUT,
            global_budget: DEFAULT_GLOBAL_BUDGET,
            random_samples: 1000,
            random_max: None,
            sampler: SamplerKind::default(),
            seed: 0,
            timings: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        Benchmark::new(self.benchmark.op, self.benchmark.bits)?;
        if self.et_values.is_empty() {
            return Err(Error::Config("no ET values".into()));
        }
        if self.families.is_empty() {
            return Err(Error::Config("no template family".into()));
        }
        if self.products_per_output == 0 || self.shared_products == Some(0) {
            return Err(Error::Config("template size must be positive".into()));
        }
        Ok(())
    }

    pub fn template(&self, family: Family, exact: &Circuit) -> Template {
        let k = self.products_per_output;
        match family {
            Family::Nonshared => Template::for_circuit(family, exact, k),
            Family::Shared => {
                Template::for_circuit(family, exact, self.shared_products.unwrap_or(exact.output_count() * k))
            }
        }
    }

    pub fn max_bounds(&self, template: &Template) -> (usize, usize) {
        match template.family() {
            Family::Shared => self.shared_max.unwrap_or((template.size(), 2 * template.size())),
            Family::Nonshared => self.nonshared_max.unwrap_or((template.inputs(), template.size())),
        }
    }

    pub fn schedule(&self, template: &Template) -> Schedule {
        Schedule::grid(template.family(), self.max_bounds(template))
            .with_policy(StopPolicy::ExhaustGrid)
            .with_solutions(self.solutions_per_cell)
            .with_timeout(self.per_cell_timeout)
            .with_budget(self.global_budget)
    }

    fn random_bounds(&self, exact: &Circuit) -> (usize, usize) {
        let rows = 1 << exact.input_count();
        self.random_max.unwrap_or((rows, rows * exact.output_count()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Exact,
    Random,
    Solver,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Exact => "EXACT",
            Source::Random => "RANDOM",
            Source::Solver => "SOLVER",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One point of the area-against-proxy dataset.
#[derive(Clone, Debug)]
pub struct ProxyPoint {
    pub source: Source,
    pub params: Option<ParameterAssignment>,
    pub area: f64,
    pub wce: u64,
}

impl ProxyPoint {
    pub fn pit_plus_its(&self) -> Option<usize> {
        self.params.as_ref().map(|p| p.pit() + p.its())
    }
}

#[derive(Clone, Debug)]
pub struct ProxyDataset {
    pub points: Vec<ProxyPoint>,
    pub random_attempts: usize,
    pub exploration: Vec<ExplorationResult>,
    timings: bool,
}

pub const PROXY_COLUMNS: [&str; 13] = [
    "source",
    "family",
    "bound_a",
    "bound_b",
    "status",
    "wall_time_s",
    "solution_index",
    "pit",
    "its",
    "lpp",
    "ppo",
    "area",
    "wce",
];

impl ProxyDataset {
    pub fn min_area(&self, source: Source) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.source == source)
            .map(|p| p.area)
            .min_by(f64::total_cmp)
    }

    pub fn of(&self, source: Source) -> impl Iterator<Item = &ProxyPoint> {
        self.points.iter().filter(move |p| p.source == source)
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        let mut random_index = 0;
        let mut solver_rows = self
            .exploration
            .iter()
            .flat_map(|r| r.log_rows(self.timings))
            .filter(|row| !row[5].is_empty());
        self.points
            .iter()
            .map(|p| {
                let mut row = vec![p.source.to_string()];
                match p.source {
                    Source::Exact => {
                        row.extend(std::iter::repeat_n(String::new(), LOG_COLUMNS.len() - 2));
                        row.push(format_area(p.area));
                        row.push(p.wce.to_string());
                    }
                    Source::Random => {
                        row.push(Family::Shared.to_string());
                        row.extend(std::iter::repeat_n(String::new(), 4));
                        row.push(random_index.to_string());
                        random_index += 1;
                        row.extend(proxy_columns(p.params.as_ref().expect("random rows carry parameters")));
                        row.push(format_area(p.area));
                        row.push(p.wce.to_string());
                    }
                    Source::Solver => row.extend(solver_rows.next().expect("one log row per solution")),
                }
                row
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        write_csv(&PROXY_COLUMNS, self.rows())
    }
}

/// Area against proxy values at a single ET: the exact circuit, sound random
/// samples and every solver solution of an exhaustive grid per family.
pub fn run_area_vs_proxy(
    config: &ExperimentConfig,
    lib: &CellLibrary,
    solver: &SolverConfig,
    exec: Exec,
) -> Result<ProxyDataset> {
    config.check()?;
    let &[et] = config.et_values.as_slice() else {
        return Err(Error::Config(format!(
            "area-vs-proxy takes exactly one ET, got {}",
            config.et_values.len()
        )));
    };
    let exact = config.benchmark.circuit()?;
    let spec = ErrorSpec::new(et);
    let mut points = vec![ProxyPoint {
        source: Source::Exact,
        params: None,
        area: estimate_area(&exact, lib).total,
        wce: 0,
    }];

    let set = sample_sound(
        &exact,
        &spec,
        config.random_bounds(&exact),
        config.random_samples,
        config.seed,
        config.sampler,
        exec,
    )?;
    let random = exec.map_slice(&set.samples, |p| -> Result<ProxyPoint> {
        let circuit = instantiate(&set.template, p)?.with_ports_of(&exact)?;
        Ok(ProxyPoint {
            source: Source::Random,
            area: estimate_area(&circuit, lib).total,
            wce: worst_case_error_with(&exact, &circuit, Exec::Sequential)?,
            params: Some(p.clone()),
        })
    });
    for point in random {
        let point = point?;
        if point.wce > et {
            return Err(Error::InvalidCircuit(format!(
                "random sample with error {} > {et}",
                point.wce
            )));
        }
        points.push(point);
    }

    let mut exploration = Vec::new();
    for &family in &config.families {
        let template = config.template(family, &exact);
        let result = explore_with(&exact, &template, &spec, &config.schedule(&template), lib, solver, exec)?;
        for (_, s) in result.solutions() {
            points.push(ProxyPoint {
                source: Source::Solver,
                params: Some(s.params.clone()),
                area: s.area,
                wce: s.wce,
            });
        }
        exploration.push(result);
    }
    Ok(ProxyDataset {
        points,
        random_attempts: set.attempts,
        exploration,
        timings: config.timings,
    })
}

/// Best result of one `(family, ET)` exploration, or the exact baseline.
#[derive(Clone, Debug)]
pub struct EtPoint {
    pub source: Source,
    pub family: Option<Family>,
    pub et: Option<u64>,
    pub area: f64,
    pub fallback: bool,
    pub params: Option<ParameterAssignment>,
    pub wce: u64,
}

#[derive(Clone, Debug)]
pub struct EtDataset {
    pub benchmark: Benchmark,
    pub points: Vec<EtPoint>,
}

pub const ET_COLUMNS: [&str; 11] = [
    "source",
    "benchmark",
    "family",
    "et",
    "area",
    "fallback",
    "pit",
    "its",
    "lpp",
    "ppo",
    "wce",
];

impl EtDataset {
    pub fn best_area(&self, family: Family, et: u64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.family == Some(family) && p.et == Some(et))
            .map(|p| p.area)
    }

    /// `(family, et_lower, et_higher)` where the larger ET has the larger area.
    pub fn monotonicity_violations(&self) -> Vec<(Family, u64, u64)> {
        let mut out = Vec::new();
        for family in [Family::Shared, Family::Nonshared] {
            let mut series: Vec<&EtPoint> = self.points.iter().filter(|p| p.family == Some(family)).collect();
            series.sort_by_key(|p| p.et);
            for w in series.windows(2) {
                if w[1].area > w[0].area {
                    out.push((family, w[0].et.unwrap_or(0), w[1].et.unwrap_or(0)));
                }
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                let mut row = vec![
                    p.source.to_string(),
                    self.benchmark.to_string(),
                    p.family.map(|f| f.to_string()).unwrap_or_default(),
                    p.et.map(|e| e.to_string()).unwrap_or_default(),
                    format_area(p.area),
                    p.fallback.to_string(),
                ];
                match &p.params {
                    Some(params) => row.extend(proxy_columns(params)),
                    None => row.extend(std::iter::repeat_n(String::new(), 4)),
                }
                row.push(p.wce.to_string());
                row
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        write_csv(&ET_COLUMNS, self.rows())
    }
}

/// Best area per family and ET under an exhaustive grid, plus the exact row.
pub fn run_area_vs_et(
    config: &ExperimentConfig,
    lib: &CellLibrary,
    solver: &SolverConfig,
    exec: Exec,
) -> Result<EtDataset> {
    config.check()?;
    let exact = config.benchmark.circuit()?;
    let mut points = vec![EtPoint {
        source: Source::Exact,
        family: None,
        et: None,
        area: estimate_area(&exact, lib).total,
        fallback: false,
        params: None,
        wce: 0,
    }];
    for &family in &config.families {
        let template = config.template(family, &exact);
        let schedule = config.schedule(&template);
        for &et in &config.et_values {
            let result = explore_with(&exact, &template, &ErrorSpec::new(et), &schedule, lib, solver, exec)?;
            points.push(EtPoint {
                source: Source::Solver,
                family: Some(family),
                et: Some(et),
                area: result.best.area,
                fallback: result.fallback_used,
                wce: worst_case_error_with(&exact, &result.best.circuit, exec)?,
                params: result.best.params,
            });
        }
    }
    Ok(EtDataset {
        benchmark: config.benchmark,
        points,
    })
}

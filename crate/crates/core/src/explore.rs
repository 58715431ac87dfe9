// SPDX-License-Identifier: Apache-2.0

//! Design-space exploration over proxy-bound cells.
//!
//! Cells are visited from most to least restrictive. Each cell is one solver
//! query with enumeration; the decoded circuits are costed with the area
//! model and the smallest one wins. If nothing beats the exact circuit, the
//! exact circuit is returned, which is sound for any threshold.

use std::time::{Duration, Instant};

use crate::area::{estimate_area, CellLibrary};
use crate::error::{table_error, ErrorSpec};
use crate::netlist::{truth_table_with, Circuit};
use crate::par::Exec;
use crate::smt::{solve, MiterProblem, SolverConfig, SolverStatus};
use crate::template::{instantiate, Family, ParameterAssignment, ProxyBounds, Template};
use crate::{Error, Result};

pub const DEFAULT_CELL_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_GLOBAL_BUDGET: Duration = Duration::from_secs(3 * 60 * 60);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopPolicy {
    /// Stop after the first cell that yields a model.
    FirstSat,
    /// Visit every cell and keep the global minimum.
    ExhaustGrid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub family: Family,
    cells: Vec<ProxyBounds>,
    pub per_cell_timeout: Duration,
    pub solutions_per_cell: usize,
    pub stop_policy: StopPolicy,
    pub global_budget: Duration,
}

impl Schedule {
    /// Schedule over explicit cells; the order must never place a cell after
    /// one it is strictly more restrictive than.
    pub fn new(family: Family, cells: Vec<ProxyBounds>) -> Result<Schedule> {
        if cells.is_empty() {
            return Err(Error::Config("a schedule needs at least one cell".into()));
        }
        for (i, later) in cells.iter().enumerate() {
            if later.family != family {
                return Err(Error::FamilyMismatch {
                    expected: family,
                    actual: later.family,
                });
            }
            if let Some(earlier) = cells[..i].iter().find(|e| later.within(e) && later != *e) {
                return Err(Error::Config(format!(
                    "cell ({}, {}) is scheduled after the looser cell ({}, {})",
                    later.a, later.b, earlier.a, earlier.b
                )));
            }
        }
        Ok(Schedule {
            family,
            cells,
            per_cell_timeout: DEFAULT_CELL_TIMEOUT,
            solutions_per_cell: 1,
            stop_policy: StopPolicy::FirstSat,
            global_budget: DEFAULT_GLOBAL_BUDGET,
        })
    }

    /// Grid `0..=max_a x 0..=max_b` ordered by `a + b`, ties by `a`. Shared
    /// cells allowing links but no products are dropped.
    pub fn grid(family: Family, max_bounds: (usize, usize)) -> Schedule {
        let (max_a, max_b) = max_bounds;
        let mut cells: Vec<ProxyBounds> = (0..=max_a)
            .flat_map(|a| (0..=max_b).map(move |b| ProxyBounds::new(family, a, b)))
            .filter(|c| !c.is_vacuous())
            .collect();
        cells.sort_by_key(|c| (c.a + c.b, c.a));
        Schedule::new(family, cells).expect("sum order is a linearisation")
    }

    pub fn cells(&self) -> &[ProxyBounds] {
        &self.cells
    }

    pub fn with_policy(mut self, policy: StopPolicy) -> Schedule {
        self.stop_policy = policy;
        self
    }

    pub fn with_solutions(mut self, solutions: usize) -> Schedule {
        self.solutions_per_cell = solutions.max(1);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Schedule {
        self.per_cell_timeout = timeout;
        self
    }

    pub fn with_budget(mut self, budget: Duration) -> Schedule {
        self.global_budget = budget;
        self
    }
}

/// A decoded, costed and re-verified solution.
#[derive(Clone, Debug)]
pub struct Solution {
    pub params: ParameterAssignment,
    pub circuit: Circuit,
    pub area: f64,
    pub wce: u64,
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub bounds: ProxyBounds,
    pub status: SolverStatus,
    pub wall_time: Duration,
    pub solutions: Vec<Solution>,
}

#[derive(Clone, Debug)]
pub struct Best {
    pub circuit: Circuit,
    /// `None` when the exact circuit is returned.
    pub params: Option<ParameterAssignment>,
    pub area: f64,
}

#[derive(Clone, Debug)]
pub struct ExplorationResult {
    pub best: Best,
    pub log: Vec<CellResult>,
    pub fallback_used: bool,
    pub exact_area: f64,
}

impl ExplorationResult {
    pub fn best_area(&self) -> f64 {
        self.best.area
    }

    pub fn solutions(&self) -> impl Iterator<Item = (&CellResult, &Solution)> {
        self.log.iter().flat_map(|c| c.solutions.iter().map(move |s| (c, s)))
    }

    /// Pairs `(looser, tighter)` where the tighter cell found a model but the
    /// looser one did not (timeouts excluded). Empty for a consistent grid.
    pub fn weakening_violations(&self) -> Vec<(ProxyBounds, ProxyBounds)> {
        let mut out = Vec::new();
        for sat in self.log.iter().filter(|c| c.status == SolverStatus::Sat) {
            for other in self.log.iter().filter(|c| c.status == SolverStatus::Unsat) {
                if sat.bounds.within(&other.bounds) {
                    out.push((other.bounds, sat.bounds));
                }
            }
        }
        out
    }

    /// Log as CSV rows (see [`LOG_COLUMNS`]). Wall times are written only
    /// when `timings` is set, so that logs are reproducible by default.
    pub fn log_rows(&self, timings: bool) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for cell in &self.log {
            let head = vec![
                cell.bounds.family.to_string(),
                cell.bounds.a.to_string(),
                cell.bounds.b.to_string(),
                cell.status.to_string(),
                if timings {
                    format!("{:.3}", cell.wall_time.as_secs_f64())
                } else {
                    String::new()
                },
            ];
            if cell.solutions.is_empty() {
                let mut row = head.clone();
                row.extend(std::iter::repeat_n(String::new(), 7));
                rows.push(row);
            }
            for (k, s) in cell.solutions.iter().enumerate() {
                let mut row = head.clone();
                row.push(k.to_string());
                row.extend(proxy_columns(&s.params));
                row.push(format_area(s.area));
                row.push(s.wce.to_string());
                rows.push(row);
            }
        }
        rows
    }

    pub fn log_csv(&self, timings: bool) -> Result<String> {
        write_csv(&LOG_COLUMNS, self.log_rows(timings))
    }
}

/// Column order of exploration logs.
pub const LOG_COLUMNS: [&str; 12] = [
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

pub(crate) fn proxy_columns(p: &ParameterAssignment) -> [String; 4] {
    [p.pit(), p.its(), p.lpp(), p.ppo()].map(|v| v.to_string())
}

pub(crate) fn format_area(area: f64) -> String {
    format!("{area}")
}

pub(crate) fn write_csv<S: AsRef<str>>(header: &[S], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|s| s.as_ref()))?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn explore(
    exact: &Circuit,
    template: &Template,
    spec: &ErrorSpec,
    schedule: &Schedule,
    lib: &CellLibrary,
    solver: &SolverConfig,
) -> Result<ExplorationResult> {
    explore_with(exact, template, spec, schedule, lib, solver, Exec::default())
}

/// [`explore`] with an explicit strategy; under `ExhaustGrid` cells are
/// solved concurrently and merged back in schedule order.
pub fn explore_with(
    exact: &Circuit,
    template: &Template,
    spec: &ErrorSpec,
    schedule: &Schedule,
    lib: &CellLibrary,
    solver: &SolverConfig,
    exec: Exec,
) -> Result<ExplorationResult> {
    if schedule.family != template.family() {
        return Err(Error::FamilyMismatch {
            expected: template.family(),
            actual: schedule.family,
        });
    }
    let exact_table = truth_table_with(exact, Exec::Sequential)?;
    let started = Instant::now();
    let run_cell = |bounds: &ProxyBounds| -> Result<Option<CellResult>> {
        if started.elapsed() > schedule.global_budget {
            return Ok(None);
        }
        let problem = MiterProblem {
            exact,
            template,
            spec: *spec,
            bounds: *bounds,
            solutions: schedule.solutions_per_cell,
            timeout: schedule.per_cell_timeout,
        };
        let outcome = solve(&problem, solver)?;
        let solutions = outcome
            .models
            .into_iter()
            .map(|params| {
                let circuit = instantiate(template, &params)?.with_ports_of(exact)?;
                let table = truth_table_with(&circuit, Exec::Sequential)?;
                Ok(Solution {
                    area: estimate_area(&circuit, lib).total,
                    wce: table_error(&exact_table, &table, Exec::Sequential),
                    params,
                    circuit,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(CellResult {
            bounds: *bounds,
            status: outcome.status,
            wall_time: outcome.wall_time,
            solutions,
        }))
    };

    let mut log = Vec::new();
    match schedule.stop_policy {
        StopPolicy::FirstSat => {
            for bounds in schedule.cells() {
                let Some(cell) = run_cell(bounds)? else { break };
                let done = !cell.solutions.is_empty();
                log.push(cell);
                if done {
                    break;
                }
            }
        }
        StopPolicy::ExhaustGrid => {
            for cell in exec.map_slice(schedule.cells(), run_cell) {
                if let Some(cell) = cell? {
                    log.push(cell);
                }
            }
        }
    }

    let exact_area = estimate_area(exact, lib).total;
    let winner = log
        .iter()
        .flat_map(|c| &c.solutions)
        .min_by(|x, y| x.area.total_cmp(&y.area))
        .filter(|s| s.area < exact_area);
    let (best, fallback_used) = match winner {
        Some(s) => (
            Best {
                circuit: s.circuit.clone(),
                params: Some(s.params.clone()),
                area: s.area,
            },
            false,
        ),
        None => (
            Best {
                circuit: exact.clone(),
                params: None,
                area: exact_area,
            },
            true,
        ),
    };
    Ok(ExplorationResult {
        best,
        log,
        fallback_used,
        exact_area,
    })
}

/// Non-dominated `(cell, area)` points of the logged solutions, minimising
/// both bounds and the area, sorted by `(a, b, area)`.
pub fn pareto_front(log: &[CellResult]) -> Vec<(ProxyBounds, f64)> {
    let mut points: Vec<(ProxyBounds, f64)> = log
        .iter()
        .flat_map(|c| c.solutions.iter().map(move |s| (c.bounds, s.area)))
        .collect();
    points.sort_by(|x, y| (x.0.a, x.0.b).cmp(&(y.0.a, y.0.b)).then(x.1.total_cmp(&y.1)));
    points.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
    let dominates = |p: &(ProxyBounds, f64), q: &(ProxyBounds, f64)| {
        p.0.a <= q.0.a && p.0.b <= q.0.b && p.1 <= q.1 && (p.0.a < q.0.a || p.0.b < q.0.b || p.1 < q.1)
    };
    points
        .iter()
        .filter(|q| !points.iter().any(|p| dominates(p, q)))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_order() {
        let s = Schedule::grid(Family::Nonshared, (2, 2));
        assert_eq!(s.cells().len(), 9);
        assert_eq!(s.cells()[0], ProxyBounds::new(Family::Nonshared, 0, 0));
        assert_eq!(*s.cells().last().unwrap(), ProxyBounds::new(Family::Nonshared, 2, 2));
        let pos = |a, b| s.cells().iter().position(|c| (c.a, c.b) == (a, b)).unwrap();
        assert!(pos(1, 0) < pos(1, 1) && pos(0, 1) < pos(1, 1));
    }

    #[test]
    fn shared_grid_drops_vacuous_cells() {
        let s = Schedule::grid(Family::Shared, (2, 3));
        assert!(s.cells().iter().all(|c| c.a > 0 || c.b == 0));
        assert_eq!(s.cells().len(), 12 - 3);
    }

    #[test]
    fn prefixes_are_downward_closed() {
        let s = Schedule::grid(Family::Nonshared, (4, 3));
        for (i, c) in s.cells().iter().enumerate() {
            for d in &s.cells()[i + 1..] {
                assert!(!(d.within(c) && d != c));
            }
        }
    }

    #[test]
    fn bad_order_is_rejected() {
        let cells = vec![
            ProxyBounds::new(Family::Shared, 1, 1),
            ProxyBounds::new(Family::Shared, 1, 0),
        ];
        assert!(Schedule::new(Family::Shared, cells).is_err());
        assert!(Schedule::new(Family::Shared, vec![]).is_err());
    }

    fn cell(a: usize, b: usize, areas: &[f64]) -> CellResult {
        let tpl = Template::shared(1, 1, 1);
        let circuit = instantiate(&tpl, &tpl.empty_assignment()).unwrap();
        CellResult {
            bounds: ProxyBounds::new(Family::Shared, a, b),
            status: if areas.is_empty() {
                SolverStatus::Unsat
            } else {
                SolverStatus::Sat
            },
            wall_time: Duration::ZERO,
            solutions: areas
                .iter()
                .map(|&area| Solution {
                    params: tpl.empty_assignment(),
                    circuit: circuit.clone(),
                    area,
                    wce: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn pareto_examples() {
        assert_eq!(
            pareto_front(&[cell(1, 1, &[4.0])]),
            vec![(ProxyBounds::new(Family::Shared, 1, 1), 4.0)]
        );
        let front = pareto_front(&[cell(1, 1, &[4.0]), cell(2, 2, &[5.0])]);
        assert_eq!(front.len(), 1);
        let front = pareto_front(&[
            cell(1, 2, &[6.0]),
            cell(2, 1, &[6.0]),
            cell(2, 2, &[3.0, 8.0]),
            cell(0, 0, &[]),
        ]);
        assert_eq!(front.len(), 3);
    }

    #[test]
    fn log_rows_have_stable_columns() {
        let result = ExplorationResult {
            best: Best {
                circuit: cell(0, 0, &[1.0]).solutions[0].circuit.clone(),
                params: None,
                area: 0.0,
            },
            log: vec![cell(0, 0, &[]), cell(1, 1, &[2.5, 3.0])],
            fallback_used: true,
            exact_area: 0.0,
        };
        let csv = result.log_csv(false).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], LOG_COLUMNS.join(","));
        assert_eq!(lines[1], "shared,0,0,UNSAT,,,,,,,,");
        assert_eq!(lines[2], "shared,1,1,SAT,,0,0,0,0,0,2.5,0");
        assert_eq!(lines.len(), 4);
        assert!(result.weakening_violations().is_empty());
    }
}

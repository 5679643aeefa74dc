//! Parameter sweeps over `(gamma, omega_a, j)` grids and their tabular output.
//!
//! Grid points are evaluated in parallel on a dedicated thread pool and
//! reassembled in grid order (first axis slowest), so output does not depend
//! on the worker count. A failing point is reported in its row and never
//! aborts the sweep.

mod table;

use rayon::prelude::*;

pub use table::{format_float, render, write_table, write_to, Cell, Destination, OutputFormat, Table};

use crate::energy_surface::ModelParams;
use crate::error::{Error, Result};
use crate::exact_oracle::{self, ExactOptions, ExactSolution};
use crate::hp_series::{self, SeriesPoint};
use crate::spin::Spin;
use crate::variational_solver::{self, MeanFieldSolution, MinimizerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Gamma,
    OmegaA,
    J,
    /// `rho / sqrt(2j)` on `[0, 1]`; series sweeps only.
    RhoFraction,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Gamma => "gamma",
            Param::OmegaA => "omega_a",
            Param::J => "j",
            Param::RhoFraction => "rho_over_sqrt2j",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Range {
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
    },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub values: AxisValues,
}

impl Axis {
    pub fn linear(param: Param, min: f64, max: f64, count: usize) -> Self {
        Axis {
            param,
            values: AxisValues::Range {
                min,
                max,
                count,
                spacing: Spacing::Linear,
            },
        }
    }

    pub fn list(param: Param, values: Vec<f64>) -> Self {
        Axis {
            param,
            values: AxisValues::List(values),
        }
    }

    pub fn count(&self) -> usize {
        match &self.values {
            AxisValues::Range { count, .. } => *count,
            AxisValues::List(v) => v.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        let name = self.param.name();
        let bad = |reason: String| Err(Error::Config(format!("axis `{name}`: {reason}")));
        match &self.values {
            AxisValues::Range {
                min,
                max,
                count,
                spacing,
            } => {
                if *count < 1 {
                    return bad("count must be >= 1".into());
                }
                if !(min.is_finite() && max.is_finite()) || min > max {
                    return bad(format!("need finite min <= max, got {min}..{max}"));
                }
                if *spacing == Spacing::Log && *min <= 0.0 {
                    return bad("log spacing needs min > 0".into());
                }
            }
            AxisValues::List(v) => {
                if v.is_empty() {
                    return bad("empty value list".into());
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return bad("non-finite value".into());
                }
            }
        }
        Ok(())
    }

    /// Grid values. Single-point ranges sit at `min`.
    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::List(v) => v.clone(),
            AxisValues::Range {
                min,
                max,
                count,
                spacing,
            } => {
                if *count == 1 {
                    return vec![*min];
                }
                let last = (*count - 1) as f64;
                (0..*count)
                    .map(|i| {
                        let t = i as f64 / last;
                        match spacing {
                            Spacing::Linear => {
                                if i + 1 == *count {
                                    *max
                                } else {
                                    min + (max - min) * t
                                }
                            }
                            Spacing::Log => {
                                if i + 1 == *count {
                                    *max
                                } else {
                                    (min.ln() + (max.ln() - min.ln()) * t).exp()
                                }
                            }
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    MeanFieldAnalytic,
    MeanFieldFiniteJ,
    ExactCompare,
    SeriesConvergence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    /// Values used for parameters that are not swept.
    pub omega_a: f64,
    pub gamma: f64,
    pub j: Spin,
    pub task: TaskKind,
    pub format: OutputFormat,
    /// Thread count; 0 lets the pool pick.
    pub workers: usize,
    pub minimizer: MinimizerOptions<f64>,
    pub exact: ExactOptions,
    /// Cutoff convergence tolerance for exact comparisons.
    pub exact_tol: f64,
}

impl SweepSpec {
    pub fn new(task: TaskKind, omega_a: f64, gamma: f64, j: Spin) -> Self {
        SweepSpec {
            axes: Vec::new(),
            omega_a,
            gamma,
            j,
            task,
            format: OutputFormat::Csv,
            workers: 0,
            minimizer: MinimizerOptions::default(),
            exact: ExactOptions::default(),
            exact_tol: 1e-8,
        }
    }

    /// `F` against its limit for each `j`, on `grid_points` values of `rho / sqrt(2j)`.
    pub fn series(js: &[Spin], grid_points: usize) -> Self {
        let mut spec = SweepSpec::new(TaskKind::SeriesConvergence, 1.0, 0.0, js.first().copied().unwrap_or(Spin::from_twice(1).expect("2j = 1")));
        spec.axes = vec![
            Axis::list(Param::J, js.iter().map(|j| j.value::<f64>()).collect()),
            Axis::linear(Param::RhoFraction, 0.0, 1.0, grid_points),
        ];
        spec
    }

    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.axes.push(axis);
        self
    }

    pub fn row_count(&self) -> usize {
        self.axes.iter().map(Axis::count).product()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, axis) in self.axes.iter().enumerate() {
            axis.validate()?;
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(Error::Config(format!("axis `{}` given twice", axis.param.name())));
            }
            let values = axis.points();
            match axis.param {
                Param::Gamma | Param::OmegaA => {
                    if self.task == TaskKind::SeriesConvergence {
                        return Err(Error::Config(format!(
                            "series sweeps do not take a `{}` axis",
                            axis.param.name()
                        )));
                    }
                    if values.iter().any(|v| *v < 0.0) {
                        return Err(Error::Config(format!("axis `{}` must be >= 0", axis.param.name())));
                    }
                }
                Param::J => {
                    for v in values {
                        Spin::nearest(v)?;
                    }
                }
                Param::RhoFraction => {
                    if self.task != TaskKind::SeriesConvergence {
                        return Err(Error::Config("rho axis is only valid for series sweeps".into()));
                    }
                    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                        return Err(Error::Config("rho / sqrt(2j) must lie in [0, 1]".into()));
                    }
                }
            }
        }
        if self.task == TaskKind::SeriesConvergence {
            if !self.axes.iter().any(|a| a.param == Param::RhoFraction) {
                return Err(Error::Config("series sweeps need a rho axis".into()));
            }
        } else {
            ModelParams::new(self.omega_a, self.gamma, self.j)?;
            self.minimizer.validate()?;
        }
        if self.task == TaskKind::ExactCompare && !(self.exact_tol > 0.0) {
            return Err(Error::invalid("tol", "must be > 0"));
        }
        Ok(())
    }
}

/// Exact-vs-mean-field comparison at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCompareRecord {
    pub analytic: MeanFieldSolution<f64>,
    pub finite_j: MeanFieldSolution<f64>,
    pub exact: ExactSolution,
    pub tol: f64,
}

impl ExactCompareRecord {
    /// Mean-field energy (closed form) minus exact energy, per atom.
    pub fn gap_per_atom(&self) -> f64 {
        self.analytic.energy_per_atom - self.exact.energy_per_atom()
    }

    pub fn finite_j_gap_per_atom(&self) -> f64 {
        self.finite_j.energy_per_atom - self.exact.energy_per_atom()
    }

    /// The closed-form mean-field energy is a true product-state expectation
    /// value, so it may not undercut the exact ground energy beyond `tol`.
    pub fn variational_bound_holds(&self) -> bool {
        self.analytic.energy >= self.exact.ground_energy - self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowResult {
    MeanField(MeanFieldSolution<f64>),
    Exact(Box<ExactCompareRecord>),
    Series(SeriesPoint<f64>),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega_a: f64,
    pub gamma: f64,
    pub j: Spin,
    pub result: RowResult,
}

/// Rows of one sweep, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub task: TaskKind,
    pub rows: Vec<SweepRow>,
}

struct GridPoint {
    omega_a: f64,
    gamma: f64,
    j: Spin,
    rho_fraction: f64,
}

fn grid(spec: &SweepSpec) -> Result<Vec<GridPoint>> {
    let axes: Vec<(Param, Vec<f64>)> = spec.axes.iter().map(|a| (a.param, a.points())).collect();
    let total = spec.row_count();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut p = GridPoint {
            omega_a: spec.omega_a,
            gamma: spec.gamma,
            j: spec.j,
            rho_fraction: 0.0,
        };
        let mut rem = flat;
        for (param, values) in axes.iter().rev() {
            let v = values[rem % values.len()];
            rem /= values.len();
            match param {
                Param::Gamma => p.gamma = v,
                Param::OmegaA => p.omega_a = v,
                Param::J => p.j = Spin::nearest(v)?,
                Param::RhoFraction => p.rho_fraction = v,
            }
        }
        out.push(p);
    }
    Ok(out)
}

fn evaluate(spec: &SweepSpec, p: &GridPoint) -> Result<RowResult> {
    if spec.task == TaskKind::SeriesConvergence {
        let rho = p.rho_fraction * p.j.n_atoms::<f64>().sqrt();
        let f = hp_series::eval_f(rho, p.j)?;
        let f_limit = hp_series::eval_f_limit(rho, p.j)?;
        return Ok(RowResult::Series(SeriesPoint {
            rho_over_sqrt2j: p.rho_fraction,
            rho,
            f,
            f_limit,
            abs_dev: (f - f_limit).abs(),
        }));
    }
    let params = ModelParams::new(p.omega_a, p.gamma, p.j)?;
    Ok(match spec.task {
        TaskKind::MeanFieldAnalytic => {
            RowResult::MeanField(variational_solver::analytic_minimum(&params)?)
        }
        TaskKind::MeanFieldFiniteJ => {
            RowResult::MeanField(variational_solver::numeric_minimum(&params, &spec.minimizer)?)
        }
        TaskKind::ExactCompare => {
            let analytic = variational_solver::analytic_minimum(&params)?;
            let finite_j = variational_solver::numeric_minimum(&params, &spec.minimizer)?;
            let exact = exact_oracle::converge_cutoff(&params, spec.exact_tol, &spec.exact)?;
            RowResult::Exact(Box::new(ExactCompareRecord {
                analytic,
                finite_j,
                exact,
                tol: spec.exact_tol,
            }))
        }
        TaskKind::SeriesConvergence => unreachable!("handled above"),
    })
}

/// Evaluates the task at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let points = grid(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|p| SweepRow {
                omega_a: p.omega_a,
                gamma: p.gamma,
                j: p.j,
                result: evaluate(spec, p).unwrap_or_else(|e| RowResult::Failed(e.to_string())),
            })
            .collect()
    });
    Ok(SweepTable {
        task: spec.task,
        rows,
    })
}

pub const MEAN_FIELD_COLUMNS: [&str; 15] = [
    "omega_a",
    "gamma",
    "j",
    "n_atoms",
    "method",
    "phase",
    "rho_a",
    "phi_a",
    "rho_b",
    "phi_b",
    "energy",
    "energy_per_atom",
    "photons_per_atom",
    "excited_fraction",
    "error",
];

pub const EXACT_COLUMNS: [&str; 20] = [
    "omega_a",
    "gamma",
    "j",
    "n_atoms",
    "mf_phase",
    "mf_energy_per_atom",
    "mf_photons_per_atom",
    "mf_excited_fraction",
    "fj_energy_per_atom",
    "exact_energy",
    "exact_energy_per_atom",
    "exact_photons_per_atom",
    "exact_excited_fraction",
    "exact_jz_per_j",
    "gap_per_atom",
    "fj_gap_per_atom",
    "variational_bound",
    "n_max_used",
    "cutoff_gap",
    "error",
];

pub const SERIES_COLUMNS: [&str; 5] = ["j", "rho_over_sqrt2j", "F", "F_limit", "abs_dev"];

pub fn columns(task: TaskKind) -> Vec<&'static str> {
    match task {
        TaskKind::MeanFieldAnalytic | TaskKind::MeanFieldFiniteJ => MEAN_FIELD_COLUMNS.to_vec(),
        TaskKind::ExactCompare => EXACT_COLUMNS.to_vec(),
        TaskKind::SeriesConvergence => SERIES_COLUMNS.to_vec(),
    }
}

fn input_cells(row: &SweepRow) -> Vec<Cell> {
    vec![
        Cell::Num(row.omega_a),
        Cell::Num(row.gamma),
        Cell::Num(row.j.value()),
        Cell::Int(row.j.twice()),
    ]
}

/// Cells of a mean-field solution row (also used for single `minimize` runs).
pub fn mean_field_cells(row: &SweepRow, sol: Option<&MeanFieldSolution<f64>>, error: Option<&str>) -> Vec<Cell> {
    let mut cells = input_cells(row);
    match sol {
        Some(s) => cells.extend([
            Cell::Text(s.method.to_string()),
            Cell::Text(s.phase.to_string()),
            Cell::Num(s.point.rho_a),
            Cell::Num(s.point.phi_a),
            Cell::Num(s.point.rho_b),
            Cell::Num(s.point.phi_b),
            Cell::Num(s.energy),
            Cell::Num(s.energy_per_atom),
            Cell::Num(s.photons_per_atom),
            Cell::Num(s.excited_fraction),
        ]),
        None => cells.extend(std::iter::repeat_n(Cell::Empty, 10)),
    }
    cells.push(error.map_or(Cell::Empty, |e| Cell::Text(e.to_string())));
    cells
}

fn exact_cells(row: &SweepRow, rec: Option<&ExactCompareRecord>, error: Option<&str>) -> Vec<Cell> {
    let mut cells = input_cells(row);
    match rec {
        Some(r) => cells.extend([
            Cell::Text(r.analytic.phase.to_string()),
            Cell::Num(r.analytic.energy_per_atom),
            Cell::Num(r.analytic.photons_per_atom),
            Cell::Num(r.analytic.excited_fraction),
            Cell::Num(r.finite_j.energy_per_atom),
            Cell::Num(r.exact.ground_energy),
            Cell::Num(r.exact.energy_per_atom()),
            Cell::Num(r.exact.photons_per_atom),
            Cell::Num(r.exact.excited_fraction()),
            Cell::Num(r.exact.jz_per_j),
            Cell::Num(r.gap_per_atom()),
            Cell::Num(r.finite_j_gap_per_atom()),
            Cell::Bool(r.variational_bound_holds()),
            Cell::Int(r.exact.n_max_used as u64),
            Cell::Num(r.exact.cutoff_gap),
        ]),
        None => cells.extend(std::iter::repeat_n(Cell::Empty, 15)),
    }
    cells.push(error.map_or(Cell::Empty, |e| Cell::Text(e.to_string())));
    cells
}

fn series_cells(row: &SweepRow, point: Option<&SeriesPoint<f64>>) -> Vec<Cell> {
    let mut cells = vec![Cell::Num(row.j.value())];
    match point {
        Some(p) => cells.extend([
            Cell::Num(p.rho_over_sqrt2j),
            Cell::Num(p.f),
            Cell::Num(p.f_limit),
            Cell::Num(p.abs_dev),
        ]),
        None => cells.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 4)),
    }
    cells
}

impl SweepTable {
    pub fn failures(&self) -> impl Iterator<Item = (&SweepRow, &str)> {
        self.rows.iter().filter_map(|r| match &r.result {
            RowResult::Failed(e) => Some((r, e.as_str())),
            _ => None,
        })
    }

    pub fn to_table(&self) -> Table {
        let mut table = Table::new(columns(self.task));
        for row in &self.rows {
            let failed = match &row.result {
                RowResult::Failed(e) => Some(e.as_str()),
                _ => None,
            };
            let cells = match self.task {
                TaskKind::MeanFieldAnalytic | TaskKind::MeanFieldFiniteJ => {
                    let sol = match &row.result {
                        RowResult::MeanField(s) => Some(s),
                        _ => None,
                    };
                    mean_field_cells(row, sol, failed)
                }
                TaskKind::ExactCompare => {
                    let rec = match &row.result {
                        RowResult::Exact(r) => Some(r.as_ref()),
                        _ => None,
                    };
                    exact_cells(row, rec, failed)
                }
                TaskKind::SeriesConvergence => {
                    let p = match &row.result {
                        RowResult::Series(p) => Some(p),
                        _ => None,
                    };
                    series_cells(row, p)
                }
            };
            table.push(cells);
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(twice: u64) -> Spin {
        Spin::from_twice(twice).unwrap()
    }

    #[test]
    fn axis_points() {
        assert_eq!(Axis::linear(Param::Gamma, 0.0, 1.0, 3).points(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Axis::linear(Param::Gamma, 0.3, 1.0, 1).points(), vec![0.3]);
        let log = Axis {
            param: Param::OmegaA,
            values: AxisValues::Range {
                min: 0.25,
                max: 4.0,
                count: 5,
                spacing: Spacing::Log,
            },
        };
        let pts = log.points();
        assert!((pts[2] - 1.0).abs() < 1e-15);
        assert_eq!(pts[4], 4.0);
    }

    #[test]
    fn grid_order_is_row_major() {
        let spec = SweepSpec::new(TaskKind::MeanFieldAnalytic, 1.0, 0.0, spin(20))
            .with_axis(Axis::list(Param::OmegaA, vec![1.0, 4.0]))
            .with_axis(Axis::list(Param::Gamma, vec![0.1, 0.2, 0.3]));
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 6);
        let order: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.omega_a, r.gamma)).collect();
        assert_eq!(
            order,
            vec![(1.0, 0.1), (1.0, 0.2), (1.0, 0.3), (4.0, 0.1), (4.0, 0.2), (4.0, 0.3)]
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = SweepSpec::new(TaskKind::MeanFieldAnalytic, 1.0, 0.5, spin(2));
        assert!(run_sweep(&base.clone().with_axis(Axis::linear(Param::Gamma, 1.0, 0.0, 3))).is_err());
        assert!(run_sweep(&base.clone().with_axis(Axis::linear(Param::Gamma, 0.0, 1.0, 0))).is_err());
        assert!(run_sweep(&base.clone().with_axis(Axis::linear(Param::Gamma, -1.0, 1.0, 3))).is_err());
        assert!(run_sweep(
            &base
                .clone()
                .with_axis(Axis::list(Param::Gamma, vec![0.1]))
                .with_axis(Axis::list(Param::Gamma, vec![0.2]))
        )
        .is_err());
        assert!(run_sweep(&base.clone().with_axis(Axis::linear(Param::RhoFraction, 0.0, 1.0, 3))).is_err());
        assert!(run_sweep(&base.with_axis(Axis::list(Param::J, vec![0.0]))).is_err());
        let mut series = SweepSpec::series(&[spin(20)], 11);
        series.axes.push(Axis::list(Param::Gamma, vec![0.1]));
        assert!(run_sweep(&series).is_err());
    }

    #[test]
    fn per_row_failures_do_not_abort() {
        let mut spec = SweepSpec::new(TaskKind::ExactCompare, 1.0, 1.0, spin(2))
            .with_axis(Axis::list(Param::Gamma, vec![0.0, 1.0]));
        spec.exact.n_max_ceiling = 16;
        let table = run_sweep(&spec).unwrap();
        assert!(matches!(table.rows[0].result, RowResult::Exact(_)));
        assert!(matches!(table.rows[1].result, RowResult::Failed(_)));
        assert_eq!(table.failures().count(), 1);
        let t = table.to_table();
        let err_col = t.column("error").unwrap();
        assert_eq!(t.rows[0][err_col], Cell::Empty);
        assert!(matches!(&t.rows[1][err_col], Cell::Text(s) if s.contains("ceiling")));
    }

    #[test]
    fn series_rows() {
        let table = run_sweep(&SweepSpec::series(&[spin(20), spin(200)], 5)).unwrap();
        assert_eq!(table.rows.len(), 10);
        let t = table.to_table();
        assert_eq!(t.columns, SERIES_COLUMNS.to_vec());
        assert_eq!(t.rows[0][2], Cell::Num(1.0));
        assert_eq!(t.rows[5][0], Cell::Num(100.0));
    }
}

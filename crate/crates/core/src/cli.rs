//! Command-line front end.
//!
//! Parameters come from flags or from a flat `key = value` config file
//! (`#` starts a comment); flags win over file values. Config keys are the
//! long flag names, with `-` or `_`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::energy_surface::{energy_finite_j, energy_thermo, ModelParams, VariationalPoint};
use crate::error::{Error, Result};
use crate::exact_oracle::{self, ExactOptions};
use crate::hp_series;
use crate::spin::{parse_number, Spin};
use crate::sweep_io::{
    self, format_float, write_to, Axis, AxisValues, Cell, Destination, OutputFormat, Param, RowResult,
    Spacing, SweepRow, SweepSpec, Table, TaskKind,
};
use crate::variational_solver::{self, MinimizerOptions};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "DICKE_MF_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "dicke-mf", version, about = "Mean-field and exact ground states of the Dicke model")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat key=value file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Table format: csv or json [default: csv].
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write the table here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<String>,
    /// Print progress and timing on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated series F(rho, j) against its large-j limit.
    Fseries(FseriesArgs),
    /// Grid dump of the finite-j and thermodynamic energy surfaces.
    Surface(SurfaceArgs),
    /// Mean-field ground state at one parameter point.
    Minimize(MinimizeArgs),
    /// Mean-field observables over a parameter grid.
    PhaseDiagram(PhaseDiagramArgs),
    /// Exact diagonalization against the mean field.
    Compare(CompareArgs),
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// Atomic splitting in units of the field frequency (accepts "a/b").
    #[arg(long)]
    pub omega_a: Option<String>,
    /// Coupling in units of the field frequency.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Collective spin j = N/2 (half-integer, e.g. "1/2" or "10").
    #[arg(long)]
    pub j: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct MinimizerArgs {
    /// Coarse scan points for the finite-j minimizer [default: 512].
    #[arg(long)]
    pub scan_points: Option<String>,
    /// Relative tolerance of the bracketed refinement [default: 1e-10].
    #[arg(long)]
    pub rel_tol: Option<String>,
    /// Iteration cap of the bracketed refinement [default: 200].
    #[arg(long)]
    pub max_iter: Option<String>,
}

#[derive(Debug, Args)]
pub struct FseriesArgs {
    /// Comma-separated list of j values.
    #[arg(long)]
    pub j: Option<String>,
    /// Grid points on rho/sqrt(2j) in [0, 1] [default: 1001].
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Photon phase [default: 0].
    #[arg(long)]
    pub phi_a: Option<String>,
    /// Atomic phase [default: pi].
    #[arg(long)]
    pub phi_b: Option<String>,
    /// Upper end of the rho_a axis [default: sqrt(2j) max(1, 2 gamma)].
    #[arg(long)]
    pub rho_a_max: Option<String>,
    /// Upper end of the rho_b axis [default: sqrt(2j)].
    #[arg(long)]
    pub rho_b_max: Option<String>,
    /// Points per axis [default: 21].
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Minimize the finite-j surface numerically instead of the closed form.
    #[arg(long)]
    pub finite_j: bool,
    #[command(flatten)]
    pub minimizer: MinimizerArgs,
}

#[derive(Debug, Args)]
pub struct PhaseDiagramArgs {
    /// Value or axis: "x", "a,b,c", "min:max:count" or "min:max:count:log".
    #[arg(long)]
    pub omega_a: Option<String>,
    /// Value or axis, same syntax as --omega-a.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Value or axis, same syntax as --omega-a; rounded to half-integers.
    #[arg(long)]
    pub j: Option<String>,
    /// Use the finite-j numerical minimizer.
    #[arg(long)]
    pub finite_j: bool,
    #[command(flatten)]
    pub minimizer: MinimizerArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Value or axis, same syntax as phase-diagram.
    #[arg(long)]
    pub omega_a: Option<String>,
    /// Value or axis.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Value or axis.
    #[arg(long)]
    pub j: Option<String>,
    /// Photon-cutoff convergence tolerance on the ground energy [default: 1e-8].
    #[arg(long)]
    pub tol: Option<String>,
    /// Largest photon cutoff tried [default: 4096].
    #[arg(long)]
    pub n_max_ceiling: Option<String>,
    /// Cap on Hamiltonian nonzeros [default: 2000000].
    #[arg(long)]
    pub nnz_cap: Option<String>,
    /// Write each exact ground state as JSON into this directory.
    #[arg(long, value_name = "DIR")]
    pub dump_dir: Option<PathBuf>,
    #[command(flatten)]
    pub minimizer: MinimizerArgs,
}

/// Config-file values, checked against the keys the subcommand understands.
#[derive(Debug, Default)]
struct Settings {
    file: HashMap<String, String>,
}

const GLOBAL_KEYS: [&str; 3] = ["format", "out", "workers"];

impl Settings {
    fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let file = parse_config(&text)?;
        for key in file.keys() {
            if !allowed.contains(&key.as_str()) && !GLOBAL_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key `{key}` in {}", path.display())));
            }
        }
        Ok(Settings { file })
    }

    fn raw(&self, key: &str, flag: Option<&String>) -> Option<String> {
        flag.cloned().or_else(|| self.file.get(key).cloned())
    }

    fn number(&self, key: &'static str, flag: Option<&String>, default: Option<f64>) -> Result<f64> {
        match self.raw(key, flag) {
            Some(s) => parse_number(&s).map_err(|_| Error::invalid(key, format!("not a number: `{s}`"))),
            None => default.ok_or_else(|| Error::invalid(key, "required")),
        }
    }

    fn count(&self, key: &'static str, flag: Option<&String>, default: usize) -> Result<usize> {
        match self.raw(key, flag) {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::invalid(key, format!("not a count: `{s}`"))),
            None => Ok(default),
        }
    }

    fn flag(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.file.get(key).map(|s| s.trim().to_ascii_lowercase()) {
            None => Ok(false),
            Some(v) if v == "true" || v == "1" || v == "yes" => Ok(true),
            Some(v) if v == "false" || v == "0" || v == "no" => Ok(false),
            Some(v) => Err(Error::Config(format!("`{key}` must be true or false, got `{v}`"))),
        }
    }

    fn spin(&self, flag: Option<&String>) -> Result<Spin> {
        let s = self.raw("j", flag).ok_or_else(|| Error::invalid("j", "required"))?;
        s.parse()
    }

    fn model(&self, args: &ModelArgs) -> Result<ModelParams<f64>> {
        let omega_a = self.number("omega_a", args.omega_a.as_ref(), None)?;
        let gamma = self.number("gamma", args.gamma.as_ref(), None)?;
        ModelParams::new(omega_a, gamma, self.spin(args.j.as_ref())?)
    }

    fn minimizer(&self, args: &MinimizerArgs) -> Result<MinimizerOptions<f64>> {
        let d = MinimizerOptions::<f64>::default();
        let opts = MinimizerOptions {
            grid_points: self.count("scan_points", args.scan_points.as_ref(), d.grid_points)?,
            rel_tol: self.number("rel_tol", args.rel_tol.as_ref(), Some(d.rel_tol))?,
            max_iter: self.count("max_iter", args.max_iter.as_ref(), d.max_iter)?,
        };
        opts.validate()?;
        Ok(opts)
    }

    fn axis(&self, key: &'static str, param: Param, flag: Option<&String>) -> Result<Option<Axis>> {
        self.raw(key, flag).map(|s| parse_axis(param, &s)).transpose()
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

/// `"x"`, `"a,b,c"`, `"min:max:count"` or `"min:max:count:log"`.
pub fn parse_axis(param: Param, s: &str) -> Result<Axis> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(Error::Config(format!("unknown spacing `{other}`"))),
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Config(format!("axis `{s}`: expected min:max:count[:log]")));
        }
        let count = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("axis `{s}`: bad count")))?;
        return Ok(Axis {
            param,
            values: AxisValues::Range {
                min: parse_number(parts[0])?,
                max: parse_number(parts[1])?,
                count,
                spacing,
            },
        });
    }
    let values = s.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
    Ok(Axis::list(param, values))
}

fn allowed_keys(cmd: &Command) -> &'static [&'static str] {
    match cmd {
        Command::Fseries(_) => &["j", "grid"],
        Command::Surface(_) => &["omega_a", "gamma", "j", "phi_a", "phi_b", "rho_a_max", "rho_b_max", "grid"],
        Command::Minimize(_) => &["omega_a", "gamma", "j", "finite_j", "scan_points", "rel_tol", "max_iter"],
        Command::PhaseDiagram(_) => &["omega_a", "gamma", "j", "finite_j", "scan_points", "rel_tol", "max_iter"],
        Command::Compare(_) => &[
            "omega_a",
            "gamma",
            "j",
            "tol",
            "n_max_ceiling",
            "nnz_cap",
            "dump_dir",
            "scan_points",
            "rel_tol",
            "max_iter",
        ],
    }
}

struct Output {
    format: OutputFormat,
    dest: Destination,
    workers: usize,
    verbose: bool,
}

impl Output {
    fn resolve(global: &GlobalArgs, settings: &Settings) -> Result<Self> {
        let format = settings
            .raw("format", global.format.as_ref())
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(OutputFormat::Csv);
        let dest = settings
            .raw("out", global.out.as_ref().map(|p| p.display().to_string()).as_ref())
            .map(|p| Destination::File(PathBuf::from(p)))
            .unwrap_or(Destination::Stdout);
        let workers = settings.count("workers", global.workers.as_ref(), 0)?;
        Ok(Output {
            format,
            dest,
            workers,
            verbose: global.verbose > 0,
        })
    }

    fn emit(&self, table: &Table) -> Result<()> {
        let bytes = write_to(table, self.format, &self.dest)?;
        if self.verbose {
            eprintln!("wrote {bytes} bytes ({} rows)", table.rows.len());
        }
        Ok(())
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let settings = Settings::load(cli.global.config.as_deref(), allowed_keys(&cli.command))?;
    let out = Output::resolve(&cli.global, &settings)?;
    match &cli.command {
        Command::Fseries(a) => cmd_fseries(a, &settings, &out),
        Command::Surface(a) => cmd_surface(a, &settings, &out),
        Command::Minimize(a) => cmd_minimize(a, &settings, &out),
        Command::PhaseDiagram(a) => cmd_phase_diagram(a, &settings, &out),
        Command::Compare(a) => cmd_compare(a, &settings, &out),
    }
}

fn cmd_fseries(args: &FseriesArgs, settings: &Settings, out: &Output) -> Result<()> {
    let list = settings
        .raw("j", args.j.as_ref())
        .ok_or_else(|| Error::invalid("j", "required (comma-separated list)"))?;
    let js = list
        .split(',')
        .map(|s| s.parse::<Spin>())
        .collect::<Result<Vec<_>>>()?;
    let grid = settings.count("grid", args.grid.as_ref(), 1001)?;
    if grid < 2 {
        return Err(Error::invalid("grid", "need at least 2 points"));
    }
    let mut spec = SweepSpec::series(&js, grid);
    spec.workers = out.workers;
    let table = sweep_io::run_sweep(&spec)?;
    out.emit(&table.to_table())?;
    for j in &js {
        let sup = table
            .rows
            .iter()
            .filter(|r| r.j == *j)
            .filter_map(|r| match &r.result {
                RowResult::Series(p) => Some(p.abs_dev),
                _ => None,
            })
            .fold(0.0f64, f64::max);
        eprintln!("j = {j}: sup |F - F_limit| = {}", format_float(sup));
    }
    Ok(())
}

fn cmd_surface(args: &SurfaceArgs, settings: &Settings, out: &Output) -> Result<()> {
    let params = settings.model(&args.model)?;
    let root = params.n_atoms().sqrt();
    let phi_a = settings.number("phi_a", args.phi_a.as_ref(), Some(0.0))?;
    let phi_b = settings.number("phi_b", args.phi_b.as_ref(), Some(std::f64::consts::PI))?;
    let rho_a_max = settings.number(
        "rho_a_max",
        args.rho_a_max.as_ref(),
        Some(root * (2.0 * params.gamma).max(1.0)),
    )?;
    let rho_b_max = settings.number("rho_b_max", args.rho_b_max.as_ref(), Some(root))?;
    let grid = settings.count("grid", args.grid.as_ref(), 21)?;
    if grid < 2 {
        return Err(Error::invalid("grid", "need at least 2 points"));
    }
    if !(rho_a_max >= 0.0) || !(rho_b_max >= 0.0) {
        return Err(Error::invalid("rho_max", "axis ends must be >= 0"));
    }
    let mut table = Table::new(vec![
        "rho_a",
        "phi_a",
        "rho_b",
        "phi_b",
        "energy_finite_j",
        "energy_thermo",
    ]);
    let step = |max: f64, i: usize| max * i as f64 / (grid - 1) as f64;
    for ia in 0..grid {
        for ib in 0..grid {
            let pt = VariationalPoint::new(step(rho_a_max, ia), phi_a, step(rho_b_max, ib), phi_b)?;
            let thermo = energy_thermo(&params, &pt).map_or(Cell::Empty, Cell::Num);
            table.push(vec![
                Cell::Num(pt.rho_a),
                Cell::Num(pt.phi_a),
                Cell::Num(pt.rho_b),
                Cell::Num(pt.phi_b),
                Cell::Num(energy_finite_j(&params, &pt)?),
                thermo,
            ]);
        }
    }
    out.emit(&table)
}

fn cmd_minimize(args: &MinimizeArgs, settings: &Settings, out: &Output) -> Result<()> {
    let params = settings.model(&args.model)?;
    let sol = if settings.flag("finite_j", args.finite_j)? {
        variational_solver::numeric_minimum(&params, &settings.minimizer(&args.minimizer)?)?
    } else {
        variational_solver::analytic_minimum(&params)?
    };
    let row = SweepRow {
        omega_a: params.omega_a,
        gamma: params.gamma,
        j: params.j,
        result: RowResult::MeanField(sol),
    };
    let mut table = Table::new(sweep_io::MEAN_FIELD_COLUMNS.to_vec());
    table.push(sweep_io::mean_field_cells(&row, Some(&sol), None));
    out.emit(&table)?;
    if out.verbose {
        let gamma_c = variational_solver::critical_coupling(params.omega_a)?;
        eprintln!("{} phase (gamma_c = {gamma_c}), E/j = {}", sol.phase, sol.energy / params.j_value());
    }
    Ok(())
}

fn sweep_spec(
    task: TaskKind,
    settings: &Settings,
    omega_a: Option<&String>,
    gamma: Option<&String>,
    j: Option<&String>,
) -> Result<SweepSpec> {
    let axes = [
        settings.axis("omega_a", Param::OmegaA, omega_a)?,
        settings.axis("gamma", Param::Gamma, gamma)?,
        settings.axis("j", Param::J, j)?,
    ];
    let names = ["omega_a", "gamma", "j"];
    for (axis, name) in axes.iter().zip(names) {
        if axis.is_none() {
            return Err(Error::invalid(name, "required"));
        }
    }
    let first = |a: &Option<Axis>| a.as_ref().map(|a| a.points()[0]).unwrap_or(0.0);
    let mut spec = SweepSpec::new(task, first(&axes[0]).max(0.0), first(&axes[1]).max(0.0), Spin::nearest(first(&axes[2]))?);
    spec.axes = axes.into_iter().flatten().collect();
    Ok(spec)
}

fn cmd_phase_diagram(args: &PhaseDiagramArgs, settings: &Settings, out: &Output) -> Result<()> {
    let task = if settings.flag("finite_j", args.finite_j)? {
        TaskKind::MeanFieldFiniteJ
    } else {
        TaskKind::MeanFieldAnalytic
    };
    let mut spec = sweep_spec(task, settings, args.omega_a.as_ref(), args.gamma.as_ref(), args.j.as_ref())?;
    spec.minimizer = settings.minimizer(&args.minimizer)?;
    spec.workers = out.workers;
    spec.format = out.format;
    let table = sweep_io::run_sweep(&spec)?;
    out.emit(&table.to_table())?;
    row_failures(&table)
}

fn cmd_compare(args: &CompareArgs, settings: &Settings, out: &Output) -> Result<()> {
    let mut spec = sweep_spec(
        TaskKind::ExactCompare,
        settings,
        args.omega_a.as_ref(),
        args.gamma.as_ref(),
        args.j.as_ref(),
    )?;
    let d = ExactOptions::default();
    spec.exact_tol = settings.number("tol", args.tol.as_ref(), Some(1e-8))?;
    spec.exact = ExactOptions {
        n_max_ceiling: settings.count("n_max_ceiling", args.n_max_ceiling.as_ref(), d.n_max_ceiling)?,
        nnz_cap: settings.count("nnz_cap", args.nnz_cap.as_ref(), d.nnz_cap)?,
        eigen: d.eigen,
    };
    spec.minimizer = settings.minimizer(&args.minimizer)?;
    spec.workers = out.workers;
    spec.format = out.format;
    let table = sweep_io::run_sweep(&spec)?;
    out.emit(&table.to_table())?;

    let dump_dir = settings.raw(
        "dump_dir",
        args.dump_dir.as_ref().map(|p| p.display().to_string()).as_ref(),
    );
    let mut violated = None;
    for row in &table.rows {
        if let RowResult::Exact(rec) = &row.result {
            if out.verbose {
                eprintln!(
                    "omega_a = {}, gamma = {}, j = {}: E_MF/N = {}, E_exact/N = {}, n_max = {}",
                    row.omega_a,
                    row.gamma,
                    row.j,
                    format_float(rec.analytic.energy_per_atom),
                    format_float(rec.exact.energy_per_atom()),
                    rec.exact.n_max_used
                );
            }
            if let Some(dir) = &dump_dir {
                let params = ModelParams::new(row.omega_a, row.gamma, row.j)?;
                let path = Path::new(dir).join(format!(
                    "ground_omega{}_gamma{}_j{}.json",
                    row.omega_a,
                    row.gamma,
                    row.j.twice() as f64 / 2.0
                ));
                let file = fs::File::create(&path).map_err(|source| Error::Write {
                    path: path.clone(),
                    source,
                })?;
                exact_oracle::write_ground_state_json(&rec.exact, &params, std::io::BufWriter::new(file))?;
            }
            if !rec.variational_bound_holds() && violated.is_none() {
                violated = Some((rec.analytic.energy, rec.exact.ground_energy));
            }
        }
    }
    row_failures(&table)?;
    if let Some((mean_field, exact)) = violated {
        return Err(Error::VariationalBound { mean_field, exact });
    }
    Ok(())
}

fn row_failures(table: &sweep_io::SweepTable) -> Result<()> {
    let failed: Vec<_> = table.failures().collect();
    match failed.first() {
        None => Ok(()),
        Some((row, err)) => Err(Error::RowFailures {
            failed: failed.len(),
            total: table.rows.len(),
            first: format!("omega_a = {}, gamma = {}, j = {}: {err}", row.omega_a, row.gamma, row.j),
        }),
    }
}

/// Sup deviation summary used by `fseries`; exposed for callers that want the
/// numbers without the table.
pub fn sup_deviations(js: &[Spin], grid: usize) -> Result<Vec<(Spin, f64)>> {
    js.iter()
        .map(|&j| Ok((j, hp_series::sup_deviation::<f64>(j, grid)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let map = parse_config("# header\nomega-a = 1/2\n\ngamma=0.3 # trailing\n").unwrap();
        assert_eq!(map["omega_a"], "1/2");
        assert_eq!(map["gamma"], "0.3");
        assert!(parse_config("gamma 0.3").is_err());
        assert!(parse_config("gamma=1\ngamma=2").is_err());
    }

    #[test]
    fn axis_syntax() {
        assert_eq!(parse_axis(Param::Gamma, "0.5").unwrap().points(), vec![0.5]);
        assert_eq!(parse_axis(Param::Gamma, "1/2,1").unwrap().points(), vec![0.5, 1.0]);
        assert_eq!(parse_axis(Param::Gamma, "0:1:3").unwrap().points(), vec![0.0, 0.5, 1.0]);
        let log = parse_axis(Param::OmegaA, "0.25:4:3:log").unwrap().points();
        assert!((log[1] - 1.0).abs() < 1e-15);
        assert!(parse_axis(Param::Gamma, "0:1").is_err());
        assert!(parse_axis(Param::Gamma, "0:1:3:cubic").is_err());
        assert!(parse_axis(Param::Gamma, "a,b").is_err());
    }

    #[test]
    fn flags_override_file() {
        let s = Settings {
            file: parse_config("gamma = 0.3\nomega_a = 1").unwrap(),
        };
        assert_eq!(s.number("gamma", None, None).unwrap(), 0.3);
        assert_eq!(s.number("gamma", Some(&"1/4".to_string()), None).unwrap(), 0.25);
        assert!(s.number("j", None, None).is_err());
    }
}

use std::fs::{self, OpenOptions};
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use wenods::fileio::{
    self, DatasetManifest, FieldFormat, GridFile, ProblemEntry, SnapshotEntry, SolveReport,
};
use wenods::metrics::{self, primitive_planes, ErrorReport, VARIABLES};
use wenods::riemann::{sample_config, SampleRanges};
use wenods::solver::SnapshotPolicy;
use wenods::{
    builtin_ic, load_weights, make_reference, CnnModel, GasModel, RiemannSpec, Scheme,
    SchemeConfig, Solver, StateField,
};

use crate::args::{
    Cli, Command, CompareArgs, GenerateArgs, GridSize, Merge, ReferenceArgs, SolveArgs,
};

pub const WEIGHTS_ENV: &str = "WENO_DS_WEIGHTS";
const LOCK_NAME: &str = ".wenods.lock";
const STATE_FILE: &str = "state.f64grid";
const REPORT_FILE: &str = "report.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<wenods::Error> for CliError {
    fn from(e: wenods::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    config_err(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Generate(a) => generate(a.merge(section(file, "generate")?)),
        Command::Solve(a) => solve(a.merge(section(file, "solve")?)),
        Command::Reference(a) => reference(a.merge(section(file, "reference")?)),
        Command::Compare(a) => compare(a.merge(section(file, "compare")?)),
    }
}

/// The config file is a JSON object keyed by subcommand name.
fn section<T: DeserializeOwned + Default>(path: Option<&Path>, name: &str) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut root: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let Some(obj) = root.as_object_mut() else {
        return Err(config_err(format!("{}: expected a JSON object", path.display())));
    };
    match obj.remove(name) {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v)
            .map_err(|e| config_err(format!("{} [{name}]: {e}", path.display()))),
    }
}

/// Exclusive claim on an output directory, released on drop.
struct DirLock(PathBuf);

impl DirLock {
    fn acquire(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self(path)),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(config_err(format!(
                "output directory {} is locked by another run (remove {} if stale)",
                dir.display(),
                path.display()
            ))),
            Err(e) => Err(io_err(&path, e)),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[derive(Serialize)]
struct WithConfig<'a, R, C> {
    #[serde(flatten)]
    report: &'a R,
    config: &'a C,
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| config_err(format!("missing required option --{flag}")))
}

fn resolve_ic(name: &str) -> CliResult<RiemannSpec> {
    if let Ok(spec) = builtin_ic(name) {
        return Ok(spec);
    }
    let path = Path::new(name);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        return RiemannSpec::from_json(&text).map_err(|e| config_err(format!("{name}: {e}")));
    }
    Err(config_err(format!(
        "`{name}` is neither a built-in initial condition ({}) nor a spec file",
        wenods::riemann::BUILTIN_NAMES.join(", ")
    )))
}

fn resolve_model(scheme: Scheme, weights: Option<PathBuf>) -> CliResult<(Option<CnnModel>, Option<PathBuf>)> {
    if !scheme.is_ds() {
        return Ok((None, None));
    }
    let path = weights
        .or_else(|| std::env::var_os(WEIGHTS_ENV).map(PathBuf::from))
        .ok_or_else(|| config_err(format!("scheme {scheme} needs --weights or {WEIGHTS_ENV}")))?;
    let model = load_weights(&path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    Ok((Some(model), Some(path)))
}

fn build_solver(spec: &RiemannSpec, scheme: Scheme, eps: Option<f64>, model: Option<CnnModel>) -> CliResult<Solver> {
    let mut config = SchemeConfig::with_scheme(scheme);
    if let Some(eps) = eps {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(config_err(format!("eps must be a finite non-negative number, got {eps}")));
        }
        config.eps = eps;
    }
    Ok(Solver::new(config, GasModel::new(spec.gamma)?, model)?)
}

/// Final-field layout shared by `solve` and `reference`.
fn write_solution(dir: &Path, field: &StateField, gas: &GasModel, csv: bool) -> CliResult<Vec<PathBuf>> {
    let mut files = fileio::write_primitive_dir(dir, field, gas)?;
    let state = dir.join(STATE_FILE);
    GridFile::from_state_field(field).write(&state)?;
    files.push(state);
    if csv {
        let planes = primitive_planes(field, gas)?;
        for (name, plane) in VARIABLES.iter().zip(&planes) {
            let path = dir.join(format!("{name}.csv"));
            fileio::export_field(&path, field.nx, field.ny, plane, FieldFormat::Csv)?;
            files.push(path);
        }
    }
    Ok(files)
}

fn read_reference(dir: &Path, gas: &GasModel) -> CliResult<StateField> {
    if !dir.is_dir() {
        return Err(config_err(format!("reference directory {} does not exist", dir.display())));
    }
    let state = dir.join(STATE_FILE);
    if state.is_file() {
        return Ok(GridFile::read(&state)?.to_state_field()?);
    }
    let (nx, ny, planes) = fileio::read_primitive_dir(dir)?;
    Ok(fileio::primitive_planes_to_field(nx, ny, &planes, gas)?)
}

fn reference_spec(dir: &Path) -> CliResult<RiemannSpec> {
    let path = dir.join(REPORT_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let report: SolveReport = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    Ok(report.spec)
}

fn check_divides(reference: &StateField, grid: GridSize) -> CliResult<()> {
    if !reference.nx.is_multiple_of(grid.nx) || !reference.ny.is_multiple_of(grid.ny) {
        return Err(config_err(format!(
            "grid {grid} does not divide the {}x{} reference grid",
            reference.nx, reference.ny
        )));
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let tag = required(args.tag, "tag")?;
    let count = args.count.unwrap_or(50);
    let seed = args.seed.unwrap_or(0);
    let fine = args.fine.unwrap_or(400);
    let every = args.every.unwrap_or(1);
    let out = required(args.out.clone(), "out")?;
    let ranges = SampleRanges::standard(tag)?;
    if fine == 0 || every == 0 {
        return Err(config_err("--fine and --every must be positive"));
    }
    let resolved = GenerateArgs {
        tag: Some(tag),
        count: Some(count),
        seed: Some(seed),
        fine: Some(fine),
        every: Some(every),
        out: Some(out.clone()),
    };

    let _lock = DirLock::acquire(&out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let policy = if every == 1 {
        SnapshotPolicy::EveryStep
    } else {
        SnapshotPolicy::EveryNSteps(every)
    };
    let mut problems = Vec::with_capacity(count);
    for index in 0..count {
        let (spec, rejected) = sample_config(tag, &ranges, &mut rng)?;
        let rel = PathBuf::from(format!("problem_{index:04}"));
        let dir = out.join(&rel);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let mut snapshots = Vec::new();
        let mut sink = |s: wenods::Snapshot| -> wenods::Result<()> {
            let file = rel.join(format!("step_{:06}.f64grid", s.step));
            GridFile::from_state_field(&s.field).write(out.join(&file))?;
            snapshots.push(SnapshotEntry {
                step: s.step,
                time: s.time,
                file,
            });
            Ok(())
        };
        let summary = make_reference(&spec, fine, policy, &mut sink).map_err(|e| match CliError::from(e) {
            CliError::Numerical(m) => CliError::Numerical(format!("problem {index}: {m}")),
            other => other,
        })?;
        eprintln!(
            "problem {index}: {} steps, {} snapshots, {rejected} rejected draws, {:.1} s",
            summary.steps,
            snapshots.len(),
            summary.wall_seconds
        );
        problems.push(ProblemEntry {
            index,
            spec,
            fine_grid: fine,
            steps: summary.steps,
            snapshots,
        });
    }
    let manifest = DatasetManifest {
        config: tag,
        seed,
        count,
        fine_grid: fine,
        problems,
    };
    fileio::write_json(
        out.join("manifest.json"),
        &WithConfig {
            report: &manifest,
            config: &resolved,
        },
    )?;
    Ok(())
}

fn solve(args: SolveArgs) -> CliResult<()> {
    let ic = required(args.ic.clone(), "ic")?;
    let out = required(args.out.clone(), "out")?;
    let grid = args.grid.unwrap_or(GridSize { nx: 100, ny: 100 });
    let scheme = args.scheme.unwrap_or(Scheme::Z);
    let spec = resolve_ic(&ic)?;
    let (model, weights) = resolve_model(scheme, args.weights.clone())?;
    let solver = build_solver(&spec, scheme, args.eps, model)?;
    let reference = match &args.reference {
        Some(dir) => {
            let r = read_reference(dir, solver.gas())?;
            check_divides(&r, grid)?;
            Some(r)
        }
        None => None,
    };
    let resolved = SolveArgs {
        ic: Some(ic),
        grid: Some(grid),
        scheme: Some(scheme),
        weights: weights.clone(),
        eps: Some(solver.config().eps),
        out: Some(out.clone()),
        reference: args.reference.clone(),
        csv: Some(args.csv.unwrap_or(false)),
    };

    let _lock = DirLock::acquire(&out)?;
    let run = solver.solve(&spec, grid.nx, grid.ny)?;
    eprintln!(
        "{scheme} {grid}: {} steps to t = {}, {:.2} s",
        run.steps, run.final_time, run.wall_seconds
    );
    let mut files = write_solution(&out, &run.final_field, solver.gas(), args.csv.unwrap_or(false))?;

    if let Some(reference) = reference {
        let coarse = reference.restrict(grid.nx, grid.ny)?;
        let field = primitive_planes(&run.final_field, solver.gas())?;
        let refp = primitive_planes(&coarse, solver.gas())?;
        let errors = serde_json::json!({
            "l1": metrics::l1_by_variable(&field, &refp)?,
            "mse": metrics::mse_by_variable(&field, &refp)?,
        });
        let path = out.join("errors.json");
        fileio::write_json(&path, &errors)?;
        files.push(path);
    }

    let report = SolveReport {
        spec,
        scheme: *solver.config(),
        weights,
        nx: grid.nx,
        ny: grid.ny,
        steps: run.steps,
        final_time: run.final_time,
        wall_seconds: run.wall_seconds,
        files,
    };
    fileio::write_json(
        out.join(REPORT_FILE),
        &WithConfig {
            report: &report,
            config: &resolved,
        },
    )?;
    Ok(())
}

fn reference(args: ReferenceArgs) -> CliResult<()> {
    let ic = required(args.ic.clone(), "ic")?;
    let out = required(args.out.clone(), "out")?;
    let grid = args.grid.unwrap_or(GridSize { nx: 400, ny: 400 });
    let spec = resolve_ic(&ic)?;
    let solver = build_solver(&spec, Scheme::Z, None, None)?;
    let resolved = ReferenceArgs {
        ic: Some(ic),
        grid: Some(grid),
        out: Some(out.clone()),
    };

    let _lock = DirLock::acquire(&out)?;
    let run = solver.solve(&spec, grid.nx, grid.ny)?;
    eprintln!("reference {grid}: {} steps, {:.1} s", run.steps, run.wall_seconds);
    let files = write_solution(&out, &run.final_field, solver.gas(), false)?;
    let report = SolveReport {
        spec,
        scheme: *solver.config(),
        weights: None,
        nx: grid.nx,
        ny: grid.ny,
        steps: run.steps,
        final_time: run.final_time,
        wall_seconds: run.wall_seconds,
        files,
    };
    fileio::write_json(
        out.join(REPORT_FILE),
        &WithConfig {
            report: &report,
            config: &resolved,
        },
    )?;
    Ok(())
}

fn compare(args: CompareArgs) -> CliResult<()> {
    let ref_dir = required(args.reference.clone(), "reference")?;
    let out = required(args.out.clone(), "out")?;
    let grids = args.grids.clone().unwrap_or_else(|| {
        [50, 100, 200].map(|n| GridSize { nx: n, ny: n }).to_vec()
    });
    if grids.is_empty() {
        return Err(config_err("--grids is empty"));
    }
    let baseline = args.baseline.unwrap_or(Scheme::Z);
    let candidate = args.scheme.unwrap_or(Scheme::DsZ);
    if !ref_dir.is_dir() {
        return Err(config_err(format!("reference directory {} does not exist", ref_dir.display())));
    }
    let spec = match &args.ic {
        Some(ic) => resolve_ic(ic)?,
        None => reference_spec(&ref_dir)?,
    };
    let needs_model = baseline.is_ds() || candidate.is_ds();
    let (model, weights) = if needs_model {
        let ds = if candidate.is_ds() { candidate } else { baseline };
        resolve_model(ds, args.weights.clone())?
    } else {
        (None, None)
    };
    let model_for = |s: Scheme| if s.is_ds() { model.clone() } else { None };
    let base_solver = build_solver(&spec, baseline, args.eps, model_for(baseline))?;
    let cand_solver = build_solver(&spec, candidate, args.eps, model_for(candidate))?;
    let gas = *base_solver.gas();
    let reference = read_reference(&ref_dir, &gas)?;
    for &g in &grids {
        check_divides(&reference, g)?;
    }
    let resolved = CompareArgs {
        ic: args.ic.clone(),
        grids: Some(grids.clone()),
        baseline: Some(baseline),
        scheme: Some(candidate),
        weights,
        eps: Some(cand_solver.config().eps),
        reference: Some(ref_dir),
        out: Some(out.clone()),
    };

    let _lock = DirLock::acquire(&out)?;
    let fields_dir = out.join("fields");
    fs::create_dir_all(&fields_dir).map_err(|e| io_err(&fields_dir, e))?;
    let mut rows: Vec<ErrorReport> = Vec::with_capacity(grids.len());
    for &g in &grids {
        let (b, b_field) = metrics::scheme_errors(&base_solver, &spec, g.nx, g.ny, &reference)?;
        let (c, c_field) = metrics::scheme_errors(&cand_solver, &spec, g.nx, g.ny, &reference)?;
        let refp = primitive_planes(&reference.restrict(g.nx, g.ny)?, &gas)?;
        for (solver, field) in [(&base_solver, &b_field), (&cand_solver, &c_field)] {
            let planes = primitive_planes(field, &gas)?;
            for (k, name) in VARIABLES.iter().enumerate() {
                let err = fileio::abs_error_field(&planes[k], &refp[k])?;
                let path = fields_dir.join(format!("{g}_{}_{name}_abs_error.f64grid", solver.config().scheme));
                GridFile::new(g.nx, g.ny, vec![err])?.write(path)?;
            }
        }
        let ratio = metrics::VariableErrors::from_array(std::array::from_fn(|k| {
            b.l1.to_array()[k] / c.l1.to_array()[k]
        }));
        eprintln!(
            "{g}: L1(rho) {baseline} {:.6} {candidate} {:.6}",
            b.l1.rho, c.l1.rho
        );
        rows.push(ErrorReport {
            nx: g.nx,
            ny: g.ny,
            baseline: b,
            candidate: c,
            ratio,
        });
    }
    let table = metrics::format_table(&rows);
    eprint!("{table}");
    fs::write(out.join("compare.txt"), &table).map_err(|e| io_err(&out, e))?;
    fileio::write_json(
        out.join("compare.json"),
        &serde_json::json!({
            "spec": spec,
            "rows": rows,
            "config": resolved,
        }),
    )?;
    Ok(())
}

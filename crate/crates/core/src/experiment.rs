//! End-to-end runs: config → assembly → normal equations → solver → files.
//!
//! A run writes into one directory:
//!
//! - `trace_snapshots.csv`, `trace_residuals.csv` (format `csv`)
//! - `waterfall.svg` / `waterfall.gp` for 1D grids, or one
//!   `heatmap_iter_<k>.svg` / `.gp` per snapshot for 2D grids
//! - `manifest.json`, always
//!
//! Nothing in the outputs depends on the wall clock or the absolute output
//! path, so identical configs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::assembly::assemble_energy;
use crate::config::{ExperimentConfig, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::export::export_csv;
use crate::grid::Dim;
use crate::plot::{emit_heatmaps, emit_waterfall, PlotFormat};
use crate::solvers::{solve, SolveTrace, Termination};
use crate::spectral::{condition_number, densify, SpectrumSummary};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const CSV_STEM: &str = "trace";

/// Paths written by one run. Every listed path exists after `run_experiment`
/// returns `Ok`.
#[derive(Debug, Clone)]
pub struct TraceFileSet {
    pub directory: PathBuf,
    pub manifest: PathBuf,
    /// Snapshot CSV, when `csv` was requested.
    pub snapshots: Option<PathBuf>,
    /// Residual history CSV, when `csv` was requested.
    pub residuals: Option<PathBuf>,
    /// Waterfall script/SVG (1D) or per-snapshot heatmaps (2D).
    pub plots: Vec<PathBuf>,
}

impl TraceFileSet {
    pub fn all_paths(&self) -> Vec<&Path> {
        let mut out = vec![self.manifest.as_path()];
        out.extend(self.snapshots.as_deref());
        out.extend(self.residuals.as_deref());
        out.extend(self.plots.iter().map(PathBuf::as_path));
        out
    }
}

/// What a run produced, in memory.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub files: TraceFileSet,
    pub trace: SolveTrace<f64>,
    pub condition: Option<SpectrumSummary>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: String,
    dim: usize,
    n: usize,
    unknowns: usize,
    energy: String,
    solver: &'a str,
    omega: Option<f64>,
    constraints: Vec<(usize, f64)>,
    warnings: &'a [String],
    condition: Option<SpectrumSummary>,
    iterations_run: usize,
    converged_at: Option<usize>,
    termination: Termination,
    final_residual: f64,
    snapshot_iterations: Vec<usize>,
    files: ManifestFiles,
}

#[derive(Serialize)]
struct ManifestFiles {
    snapshots: Option<String>,
    residuals: Option<String>,
    plots: Vec<String>,
}

/// Iterations a run with these settings stores, given how far it got.
pub fn expected_snapshot_iterations(run: &RunConfig, iterations_run: usize) -> Vec<usize> {
    match &run.snapshot_iterations {
        Some(list) => std::iter::once(0)
            .chain(list.iter().copied().filter(|&k| k <= iterations_run))
            .collect(),
        None => {
            let mut ks: Vec<usize> = (0..=iterations_run).step_by(run.snapshot_stride).collect();
            if ks.last() != Some(&iterations_run) {
                ks.push(iterations_run);
            }
            ks
        }
    }
}

fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".gridsolve-write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn plot_format(f: OutputFormat) -> Option<PlotFormat> {
    match f {
        OutputFormat::Csv => None,
        OutputFormat::Gnuplot => Some(PlotFormat::Gnuplot),
        OutputFormat::Svg => Some(PlotFormat::Svg),
    }
}

/// Runs `config`, writing every requested output into `out_dir`.
///
/// Constraint and assembly failures come back as config errors; solver
/// failures as domain errors prefixed with the solver and grid.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    if config.outputs.is_empty() {
        return Err(Error::config(None, "output.formats", "at least one output format is required"));
    }
    ensure_writable(out_dir)?;

    let as_config = |e: Error| match e {
        Error::Domain(msg) => Error::config(None, "constraints", msg),
        other => other,
    };
    let constraints = config.constraint_set().map_err(as_config)?;
    let system = assemble_energy(&config.grid, config.energy, &constraints).map_err(as_config)?;
    let normal = system.normal_equations();

    let condition = if config.condition.applies(normal.order()) {
        Some(condition_number(&densify(&normal.matrix)?)?)
    } else {
        None
    };

    let context = |e: Error| match e {
        Error::Domain(msg) => Error::domain(format!(
            "{} on {} ({} energy): {msg}",
            config.solver.name(),
            config.grid,
            config.energy
        )),
        other => other,
    };
    let trace = solve(config.solver, &normal, &config.run_settings()).map_err(context)?;

    let mut files = TraceFileSet {
        directory: out_dir.to_path_buf(),
        manifest: out_dir.join(MANIFEST_NAME),
        snapshots: None,
        residuals: None,
        plots: Vec::new(),
    };
    for &format in &config.outputs {
        match plot_format(format) {
            None => {
                let (s, r) = export_csv(&trace, &config.grid, out_dir, CSV_STEM)?;
                files.snapshots = Some(s);
                files.residuals = Some(r);
            }
            Some(pf) => match config.grid.dim() {
                Dim::OneD => {
                    let path = out_dir.join(format!("waterfall.{}", pf.extension()));
                    emit_waterfall(&trace, &config.grid, pf, &path)?;
                    files.plots.push(path);
                }
                Dim::TwoD => files.plots.extend(emit_heatmaps(&trace, &config.grid, pf, out_dir)?),
            },
        }
    }

    let manifest = Manifest {
        config: config.render(),
        dim: match config.grid.dim() {
            Dim::OneD => 1,
            Dim::TwoD => 2,
        },
        n: config.grid.side(),
        unknowns: normal.order(),
        energy: config.energy.to_string(),
        solver: config.solver.name(),
        omega: match config.solver {
            crate::solvers::SolverKind::Ssor { omega } => Some(omega),
            _ => None,
        },
        constraints: constraints.iter().map(|c| (c.vertex.0, c.value)).collect(),
        warnings: &system.warnings,
        condition,
        iterations_run: trace.iterations_run,
        converged_at: trace.converged_at,
        termination: trace.termination,
        final_residual: trace.final_residual(),
        snapshot_iterations: trace.snapshots.iter().map(|s| s.iteration).collect(),
        files: ManifestFiles {
            snapshots: files.snapshots.as_deref().map(file_name),
            residuals: files.residuals.as_deref().map(file_name),
            plots: files.plots.iter().map(|p| file_name(p)).collect(),
        },
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest is plain data");
    json.push('\n');
    fs::write(&files.manifest, json).map_err(|e| Error::io(&files.manifest, e))?;

    Ok(ExperimentOutcome {
        files,
        trace,
        condition,
        warnings: system.warnings.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const FIG1_CG: &str = "[grid]\ndim = 1\nn = 20\n[energy]\nkind = gradient\n[solver]\nkind = cg\n\
        [constraints]\n0 = 2\n19 = 6\n[run]\nmax_iterations = 120\n[output]\nformats = csv svg gnuplot\n";

    #[test]
    fn fig1_cg_run_converges_and_lists_existing_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(FIG1_CG).unwrap();
        let out = run_experiment(&cfg, dir.path()).unwrap();
        assert!(out.trace.final_residual() <= 1e-10);
        assert!(out.condition.is_some());
        for p in out.files.all_paths() {
            assert!(fs::metadata(p).unwrap().len() > 0, "{}", p.display());
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&out.files.manifest).unwrap()).unwrap();
        assert_eq!(manifest["solver"], "cg");
        assert_eq!(manifest["termination"], "converged");
        assert_eq!(
            expected_snapshot_iterations(&cfg.run, out.trace.iterations_run),
            out.trace.snapshots.iter().map(|s| s.iteration).collect::<Vec<_>>()
        );
    }

    #[test]
    fn unwritable_directory_fails_before_solving() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let cfg = parse_config(FIG1_CG).unwrap();
        let err = run_experiment(&cfg, &file.path().join("sub")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{err}");
    }

    #[test]
    fn constraint_outside_grid_is_a_config_error() {
        let mut cfg = parse_config(FIG1_CG).unwrap();
        cfg.constraints[1].i = 25;
        let dir = tempfile::tempdir().unwrap();
        let err = run_experiment(&cfg, dir.path()).unwrap_err();
        assert!(matches!(err, Error::Config { .. }), "{err}");
    }

    #[test]
    fn expected_iterations_follow_the_policy() {
        let mut run = RunConfig {
            max_iterations: 100,
            tolerance: 0.0,
            snapshot_stride: 10,
            snapshot_iterations: None,
            initial_value: 0.0,
        };
        assert_eq!(expected_snapshot_iterations(&run, 100).len(), 11);
        assert_eq!(expected_snapshot_iterations(&run, 25), vec![0, 10, 20, 25]);
        run.snapshot_iterations = Some(vec![1, 5, 50]);
        assert_eq!(expected_snapshot_iterations(&run, 20), vec![0, 1, 5]);
    }
}

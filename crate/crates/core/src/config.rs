//! Experiment description files.
//!
//! A config is a flat INI-style document: `[section]` headers followed by
//! `key = value` lines, `#` comments and blank lines. Sections:
//!
//! ```text
//! [grid]         dim = 1 | 2, n = <side>
//! [energy]       kind = gradient | laplacian
//! [solver]       kind = jacobi | gauss-seidel | ssor | cg, omega = <real> (ssor only, default 1.5)
//! [constraints]  <i> = <value> (1D), <i>,<j> = <value> (2D), preset = corners-center (2D)
//! [run]          max_iterations, tolerance (1e-10), snapshot_stride (1),
//!                snapshot_iterations = <k1> <k2> ..., initial_value (0)
//! [output]       formats = csv svg gnuplot (csv), directory = <path>,
//!                condition = auto | always | never (auto)
//! ```
//!
//! Coordinates are 0-based. Preset constraints are applied first; explicit
//! entries then add vertices or replace preset values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::assembly::{Constraint, ConstraintSet, EnergyKind};
use crate::error::{Error, Result};
use crate::grid::{Dim, GridSpec};
use crate::solvers::{RunSettings, SolverKind, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputFormat {
    Csv,
    Gnuplot,
    Svg,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Gnuplot => "gnuplot",
            OutputFormat::Svg => "svg",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "gnuplot" => Ok(OutputFormat::Gnuplot),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(format!("unknown output format '{other}' (expected csv, gnuplot or svg)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintPreset {
    /// Corners `(0,0)`, `(n-1,n-1)` and the center, values `0, 0, 1`.
    CornersCenter,
}

/// When to compute the spectral condition number during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionMode {
    /// Only for systems with at most [`ConditionMode::AUTO_LIMIT`] unknowns.
    #[default]
    Auto,
    Always,
    Never,
}

impl ConditionMode {
    pub const AUTO_LIMIT: usize = 100;

    pub fn applies(&self, order: usize) -> bool {
        match self {
            ConditionMode::Auto => order <= Self::AUTO_LIMIT,
            ConditionMode::Always => true,
            ConditionMode::Never => false,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ConditionMode::Auto => "auto",
            ConditionMode::Always => "always",
            ConditionMode::Never => "never",
        }
    }
}

/// One `coordinates = value` entry, coordinates as written (`j = 0` in 1D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConstraint {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub snapshot_stride: usize,
    pub snapshot_iterations: Option<Vec<usize>>,
    pub initial_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub energy: EnergyKind,
    pub solver: SolverKind,
    pub preset: Option<ConstraintPreset>,
    pub constraints: Vec<PointConstraint>,
    pub run: RunConfig,
    pub outputs: Vec<OutputFormat>,
    pub output_directory: Option<PathBuf>,
    pub condition: ConditionMode,
}

impl ExperimentConfig {
    /// Resolved constraints: preset first, then explicit entries in file order.
    pub fn constraint_set(&self) -> Result<ConstraintSet<f64>> {
        let mut ordered: Vec<Constraint<f64>> = match self.preset {
            Some(ConstraintPreset::CornersCenter) => ConstraintSet::corners_and_center(&self.grid)?.iter().copied().collect(),
            None => Vec::new(),
        };
        for pc in &self.constraints {
            let vertex = self.grid.vertex_index(pc.i, pc.j)?;
            match ordered.iter_mut().find(|c| c.vertex == vertex) {
                Some(existing) => existing.value = pc.value,
                None => ordered.push(Constraint { vertex, value: pc.value }),
            }
        }
        ConstraintSet::new(ordered)
    }

    pub fn run_settings(&self) -> RunSettings<f64> {
        RunSettings {
            max_iterations: self.run.max_iterations,
            tolerance: self.run.tolerance,
            snapshot_stride: self.run.snapshot_stride,
            snapshot_iterations: self.run.snapshot_iterations.clone(),
            initial_guess: (self.run.initial_value != 0.0)
                .then(|| vec![self.run.initial_value; self.grid.vertex_count()]),
        }
    }

    /// Renders the config back into the text format; `parse_config` inverts it.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[grid]\ndim = {}\nn = {}\n", self.grid.dim(), self.grid.side());
        let _ = writeln!(s, "[energy]\nkind = {}\n", self.energy);
        let _ = writeln!(s, "[solver]\nkind = {}", self.solver.name());
        if let SolverKind::Ssor { omega } = self.solver {
            let _ = writeln!(s, "omega = {omega:?}");
        }
        let _ = writeln!(s, "\n[constraints]");
        if let Some(ConstraintPreset::CornersCenter) = self.preset {
            let _ = writeln!(s, "preset = corners-center");
        }
        for c in &self.constraints {
            match self.grid.dim() {
                Dim::OneD => {
                    let _ = writeln!(s, "{} = {:?}", c.i, c.value);
                }
                Dim::TwoD => {
                    let _ = writeln!(s, "{},{} = {:?}", c.i, c.j, c.value);
                }
            }
        }
        let _ = writeln!(s, "\n[run]\nmax_iterations = {}", self.run.max_iterations);
        let _ = writeln!(s, "tolerance = {:?}", self.run.tolerance);
        let _ = writeln!(s, "snapshot_stride = {}", self.run.snapshot_stride);
        if let Some(list) = &self.run.snapshot_iterations {
            let items: Vec<String> = list.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "snapshot_iterations = {}", items.join(" "));
        }
        let _ = writeln!(s, "initial_value = {:?}", self.run.initial_value);
        let formats: Vec<&str> = self.outputs.iter().map(OutputFormat::name).collect();
        let _ = writeln!(s, "\n[output]\nformats = {}", formats.join(" "));
        if let Some(dir) = &self.output_directory {
            let _ = writeln!(s, "directory = {}", dir.display());
        }
        let _ = writeln!(s, "condition = {}", self.condition.name());
        s
    }
}

const SECTIONS: [&str; 6] = ["grid", "energy", "solver", "constraints", "run", "output"];
const REQUIRED: [&str; 5] = ["grid", "energy", "solver", "constraints", "run"];

#[derive(Debug)]
struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

/// Parsed `key = value` entries of one section.
#[derive(Debug, Default)]
struct Section {
    header_line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.iter_mut().find(|e| e.key == key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn require(&mut self, section: &str, key: &str) -> Result<(usize, String)> {
        self.take(key).ok_or_else(|| {
            Error::config(Some(self.header_line), format!("{section}.{key}"), "missing required key")
        })
    }

    fn leftover(&self, section: &str) -> Result<()> {
        match self.entries.iter().find(|e| !e.used) {
            Some(e) => Err(Error::config(Some(e.line), format!("{section}.{}", e.key), "unknown key")),
            None => Ok(()),
        }
    }
}

fn typed<V: FromStr>(section: &str, key: &str, line: usize, raw: &str) -> Result<V>
where
    V::Err: fmt::Display,
{
    raw.parse::<V>()
        .map_err(|e| Error::config(Some(line), format!("{section}.{key}"), format!("invalid value '{raw}': {e}")))
}

fn tokenize(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::config(Some(line), content, "malformed section header"))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(Error::config(Some(line), name, "unknown section"));
            }
            if sections.contains_key(&name) {
                return Err(Error::config(Some(line), name, "duplicate section"));
            }
            sections.insert(name.clone(), Section { header_line: line, entries: Vec::new() });
            current = Some(name);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::config(Some(line), content, "expected 'key = value'"))?;
        let key = key.trim().to_string();
        let section_name = current
            .as_ref()
            .ok_or_else(|| Error::config(Some(line), key.clone(), "key outside of any section"))?;
        let section = sections.get_mut(section_name).expect("current section exists");
        if section.entries.iter().any(|e| e.key == key) {
            return Err(Error::config(Some(line), format!("{section_name}.{key}"), "duplicate key"));
        }
        section.entries.push(Entry {
            line,
            key,
            value: value.trim().to_string(),
            used: false,
        });
    }
    for name in REQUIRED {
        if !sections.contains_key(name) {
            return Err(Error::config(None, name, "missing required section"));
        }
    }
    Ok(sections)
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut sections = tokenize(text)?;
    let mut section = |name: &str| sections.remove(name).unwrap_or_default();

    let mut grid_s = section("grid");
    let (line, dim_raw) = grid_s.require("grid", "dim")?;
    let dim = match dim_raw.as_str() {
        "1" | "1d" => Dim::OneD,
        "2" | "2d" => Dim::TwoD,
        _ => return Err(Error::config(Some(line), "grid.dim", format!("invalid value '{dim_raw}': expected 1 or 2"))),
    };
    let (line, n_raw) = grid_s.require("grid", "n")?;
    let n: usize = typed("grid", "n", line, &n_raw)?;
    let grid = GridSpec::new(dim, n).map_err(|e| Error::config(Some(line), "grid.n", e.to_string()))?;
    grid_s.leftover("grid")?;

    let mut energy_s = section("energy");
    let (line, raw) = energy_s.require("energy", "kind")?;
    let energy: EnergyKind = typed("energy", "kind", line, &raw)?;
    energy_s.leftover("energy")?;

    let mut solver_s = section("solver");
    let (line, raw) = solver_s.require("solver", "kind")?;
    let mut solver: SolverKind = typed("solver", "kind", line, &raw)?;
    if let Some((line, raw)) = solver_s.take("omega") {
        let omega: f64 = typed("solver", "omega", line, &raw)?;
        match solver {
            SolverKind::Ssor { .. } => solver = SolverKind::Ssor { omega },
            _ => return Err(Error::config(Some(line), "solver.omega", "omega only applies to ssor")),
        }
        solver
            .validate()
            .map_err(|e| Error::config(Some(line), "solver.omega", e.to_string()))?;
    }
    solver_s.leftover("solver")?;

    let mut cons_s = section("constraints");
    let header = cons_s.header_line;
    let mut preset = None;
    if let Some((line, raw)) = cons_s.take("preset") {
        preset = match raw.as_str() {
            "corners-center" if dim == Dim::TwoD => Some(ConstraintPreset::CornersCenter),
            "corners-center" => {
                return Err(Error::config(Some(line), "constraints.preset", "corners-center needs a 2D grid"))
            }
            _ => return Err(Error::config(Some(line), "constraints.preset", format!("unknown preset '{raw}'"))),
        };
    }
    let mut constraints = Vec::new();
    let mut seen = BTreeSet::new();
    for entry in cons_s.entries.iter_mut().filter(|e| !e.used) {
        entry.used = true;
        let key = format!("constraints.{}", entry.key);
        let coords: Vec<&str> = entry.key.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<usize>, _> = coords.iter().map(|c| c.parse::<usize>()).collect();
        let coords = parsed.map_err(|_| Error::config(Some(entry.line), key.clone(), "unknown key (expected vertex coordinates)"))?;
        let (i, j) = match (dim, coords.as_slice()) {
            (Dim::OneD, [i]) => (*i, 0),
            (Dim::TwoD, [i, j]) => (*i, *j),
            _ => {
                return Err(Error::config(
                    Some(entry.line),
                    key,
                    format!("expected {} coordinate(s) for a {}D grid", if dim == Dim::OneD { 1 } else { 2 }, dim),
                ))
            }
        };
        grid.vertex_index(i, j)
            .map_err(|e| Error::config(Some(entry.line), key.clone(), e.to_string()))?;
        if !seen.insert((i, j)) {
            return Err(Error::config(Some(entry.line), key, "vertex constrained twice"));
        }
        let value: f64 = entry
            .value
            .parse()
            .map_err(|e| Error::config(Some(entry.line), key.clone(), format!("invalid value '{}': {e}", entry.value)))?;
        constraints.push(PointConstraint { i, j, value });
    }
    if preset.is_none() && constraints.is_empty() {
        return Err(Error::config(Some(header), "constraints", "at least one constraint is required"));
    }

    let mut run_s = section("run");
    let (line, raw) = run_s.require("run", "max_iterations")?;
    let max_iterations: usize = typed("run", "max_iterations", line, &raw)?;
    if max_iterations == 0 {
        return Err(Error::config(Some(line), "run.max_iterations", "must be at least 1"));
    }
    let tolerance = match run_s.take("tolerance") {
        Some((line, raw)) => {
            let t: f64 = typed("run", "tolerance", line, &raw)?;
            if !(t >= 0.0) {
                return Err(Error::config(Some(line), "run.tolerance", "must be non-negative"));
            }
            t
        }
        None => DEFAULT_TOLERANCE,
    };
    let snapshot_stride = match run_s.take("snapshot_stride") {
        Some((line, raw)) => {
            let s: usize = typed("run", "snapshot_stride", line, &raw)?;
            if s == 0 {
                return Err(Error::config(Some(line), "run.snapshot_stride", "must be at least 1"));
            }
            s
        }
        None => 1,
    };
    let snapshot_iterations = match run_s.take("snapshot_iterations") {
        Some((line, raw)) => {
            let list = raw
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| typed::<usize>("run", "snapshot_iterations", line, t))
                .collect::<Result<Vec<_>>>()?;
            if list.is_empty() || list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(Some(line), "run.snapshot_iterations", "must be a non-empty strictly increasing list"));
            }
            if *list.last().expect("non-empty") > max_iterations {
                return Err(Error::config(Some(line), "run.snapshot_iterations", "entries must not exceed max_iterations"));
            }
            Some(list)
        }
        None => None,
    };
    let initial_value = match run_s.take("initial_value") {
        Some((line, raw)) => typed("run", "initial_value", line, &raw)?,
        None => 0.0,
    };
    run_s.leftover("run")?;

    let mut out_s = section("output");
    let outputs = match out_s.take("formats") {
        Some((line, raw)) => {
            let mut formats = raw
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| typed::<OutputFormat>("output", "formats", line, t))
                .collect::<Result<Vec<_>>>()?;
            formats.sort();
            formats.dedup();
            if formats.is_empty() {
                return Err(Error::config(Some(line), "output.formats", "at least one output format is required"));
            }
            formats
        }
        None => vec![OutputFormat::Csv],
    };
    let output_directory = out_s.take("directory").map(|(_, raw)| PathBuf::from(raw));
    let condition = match out_s.take("condition") {
        Some((line, raw)) => match raw.as_str() {
            "auto" => ConditionMode::Auto,
            "always" | "true" => ConditionMode::Always,
            "never" | "false" => ConditionMode::Never,
            _ => return Err(Error::config(Some(line), "output.condition", format!("invalid value '{raw}'"))),
        },
        None => ConditionMode::Auto,
    };
    out_s.leftover("output")?;

    Ok(ExperimentConfig {
        grid,
        energy,
        solver,
        preset,
        constraints,
        run: RunConfig {
            max_iterations,
            tolerance,
            snapshot_stride,
            snapshot_iterations,
            initial_value,
        },
        outputs,
        output_directory,
        condition,
    })
}

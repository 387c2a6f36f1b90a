//! Waterfall (1D) and heatmap (2D) renderings of a solve trace, as gnuplot
//! scripts or standalone SVG.
//!
//! Waterfall geometry is an oblique projection: snapshot of rank `s` (0 for
//! the first stored snapshot) maps vertex `v` with value `y` to
//! `(v + 0.4 s, y + 0.25 s)`, so later iterations sit further back.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{Dim, GridSpec};
use crate::solvers::SolveTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    Gnuplot,
    Svg,
}

impl PlotFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            PlotFormat::Gnuplot => "gp",
            PlotFormat::Svg => "svg",
        }
    }
}

pub const DEPTH_DX: f64 = 0.4;
pub const DEPTH_DY: f64 = 0.25;

const VIEW_W: f64 = 1000.0;
const VIEW_H: f64 = 600.0;
const MARGIN: f64 = 20.0;

/// Low and high end of the heatmap color ramp.
pub const RAMP_LOW: [u8; 3] = [0x00, 0x00, 0x80];
pub const RAMP_HIGH: [u8; 3] = [0xff, 0xff, 0x00];

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Projected `(x, y)` polyline per snapshot, front (rank 0) first.
pub fn waterfall_curves(trace: &SolveTrace<f64>) -> Vec<Vec<(f64, f64)>> {
    trace
        .snapshots
        .iter()
        .enumerate()
        .map(|(s, snap)| {
            let s = s as f64;
            snap.values
                .iter()
                .enumerate()
                .map(|(v, &y)| (v as f64 + DEPTH_DX * s, y + DEPTH_DY * s))
                .collect()
        })
        .collect()
}

fn require_dim(grid: &GridSpec, want: Dim, hint: &str) -> Result<()> {
    if grid.dim() != want {
        return Err(Error::domain(format!("{grid} is not supported here; {hint}")));
    }
    Ok(())
}

pub fn render_waterfall(trace: &SolveTrace<f64>, grid: &GridSpec, format: PlotFormat) -> Result<String> {
    require_dim(grid, Dim::OneD, "use emit_heatmaps for 2D grids")?;
    let curves = waterfall_curves(trace);
    let title = format!("{} on {grid}", trace.solver);
    let mut out = String::new();
    match format {
        PlotFormat::Gnuplot => {
            let _ = writeln!(out, "# waterfall: x = vertex + {DEPTH_DX}*s, y = value + {DEPTH_DY}*s, s = snapshot rank");
            let _ = writeln!(out, "$curves << EOD");
            for (s, curve) in curves.iter().enumerate() {
                let _ = writeln!(out, "# snapshot rank {s}, iteration {}", trace.snapshots[s].iteration);
                for (x, y) in curve {
                    let _ = writeln!(out, "{x:?} {y:?}");
                }
                let _ = writeln!(out, "\n");
            }
            let _ = writeln!(out, "EOD");
            let _ = writeln!(out, "set title \"{title}\"");
            let _ = writeln!(out, "unset key");
            let _ = writeln!(
                out,
                "plot for [s={}:0:-1] $curves index s using 1:2 with lines lc rgb \"#1f4fbf\"",
                curves.len().saturating_sub(1)
            );
        }
        PlotFormat::Svg => {
            let pts = curves.iter().flatten();
            let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &(x, y) in pts {
                if y.is_finite() {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y0 = y0.min(y);
                    y1 = y1.max(y);
                }
            }
            if !(x1 > x0) {
                x1 = x0 + 1.0;
            }
            if !(y1 > y0) {
                y0 -= 0.5;
                y1 += 0.5;
            }
            let sx = (VIEW_W - 2.0 * MARGIN) / (x1 - x0);
            let sy = (VIEW_H - 2.0 * MARGIN) / (y1 - y0);
            let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW_W} {VIEW_H}\">");
            let _ = writeln!(
                out,
                "<!-- waterfall: x = vertex + {DEPTH_DX}*s, y = value + {DEPTH_DY}*s; {} snapshots drawn back to front -->",
                curves.len()
            );
            let _ = writeln!(out, "<title>{title}</title>");
            let _ = writeln!(out, "<rect width=\"{VIEW_W}\" height=\"{VIEW_H}\" fill=\"white\"/>");
            for (s, curve) in curves.iter().enumerate().rev() {
                let mut points = String::new();
                for &(x, y) in curve.iter().filter(|(_, y)| y.is_finite()) {
                    let px = MARGIN + (x - x0) * sx;
                    let py = VIEW_H - MARGIN - (y - y0) * sy;
                    let _ = write!(points, "{px:.3},{py:.3} ");
                }
                let _ = writeln!(
                    out,
                    "<polyline data-iteration=\"{}\" fill=\"none\" stroke=\"#1f4fbf\" stroke-width=\"1\" points=\"{}\"/>",
                    trace.snapshots[s].iteration,
                    points.trim_end()
                );
            }
            let _ = writeln!(out, "</svg>");
        }
    }
    Ok(out)
}

pub fn emit_waterfall(trace: &SolveTrace<f64>, grid: &GridSpec, format: PlotFormat, path: &Path) -> Result<()> {
    let body = render_waterfall(trace, grid, format)?;
    write_file(path, &body)
}

/// Global `(min, max)` over every finite snapshot value.
pub fn value_range(trace: &SolveTrace<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in trace.snapshots.iter().flat_map(|s| s.values.iter()).copied().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

/// Linear ramp from [`RAMP_LOW`] at `lo` to [`RAMP_HIGH`] at `hi`.
pub fn ramp_color(v: f64, lo: f64, hi: f64) -> [u8; 3] {
    let t = if hi > lo && v.is_finite() { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
    let mut c = [0u8; 3];
    for k in 0..3 {
        let a = f64::from(RAMP_LOW[k]);
        let b = f64::from(RAMP_HIGH[k]);
        c[k] = (a + t * (b - a)).round() as u8;
    }
    c
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// One heatmap document per snapshot, keyed by iteration.
pub fn render_heatmaps(trace: &SolveTrace<f64>, grid: &GridSpec, format: PlotFormat) -> Result<Vec<(usize, String)>> {
    require_dim(grid, Dim::TwoD, "use emit_waterfall for 1D grids")?;
    let n = grid.side();
    let (lo, hi) = value_range(trace);
    let legend = format!(
        "color ramp: linear from {} at {lo:?} to {} at {hi:?} (global range over all snapshots)",
        hex(RAMP_LOW),
        hex(RAMP_HIGH)
    );
    let mut docs = Vec::with_capacity(trace.snapshots.len());
    for snap in &trace.snapshots {
        let mut out = String::new();
        let title = format!("{} on {grid}, iteration {}", trace.solver, snap.iteration);
        match format {
            PlotFormat::Gnuplot => {
                let _ = writeln!(out, "# {legend}");
                let _ = writeln!(out, "$map << EOD");
                for i in 0..n {
                    let row: Vec<String> = (0..n).map(|j| format!("{:?}", snap.values[n * i + j])).collect();
                    let _ = writeln!(out, "{}", row.join(" "));
                }
                let _ = writeln!(out, "EOD");
                let _ = writeln!(out, "set title \"{title}\"");
                let _ = writeln!(out, "set palette defined (0 \"{}\", 1 \"{}\")", hex(RAMP_LOW), hex(RAMP_HIGH));
                if hi > lo {
                    let _ = writeln!(out, "set cbrange [{lo:?}:{hi:?}]");
                }
                let _ = writeln!(out, "set size ratio -1\nset yrange [] reverse");
                let _ = writeln!(out, "plot $map matrix with image notitle");
            }
            PlotFormat::Svg => {
                let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {n} {n}\" shape-rendering=\"crispEdges\">");
                let _ = writeln!(out, "<!-- {legend} -->");
                let _ = writeln!(out, "<title>{title}</title>");
                for i in 0..n {
                    for j in 0..n {
                        let color = hex(ramp_color(snap.values[n * i + j], lo, hi));
                        let _ = writeln!(out, "<rect x=\"{j}\" y=\"{i}\" width=\"1\" height=\"1\" fill=\"{color}\"/>");
                    }
                }
                let _ = writeln!(out, "</svg>");
            }
        }
        docs.push((snap.iteration, out));
    }
    Ok(docs)
}

/// Writes `heatmap_iter_<iteration>.<ext>` files into `dir`.
pub fn emit_heatmaps(trace: &SolveTrace<f64>, grid: &GridSpec, format: PlotFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    let docs = render_heatmaps(trace, grid, format)?;
    let mut paths = Vec::with_capacity(docs.len());
    for (iteration, body) in docs {
        let path = dir.join(format!("heatmap_iter_{iteration:06}.{}", format.extension()));
        write_file(&path, &body)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{Snapshot, SolverKind, Termination};

    fn trace(values: Vec<Vec<f64>>) -> SolveTrace<f64> {
        SolveTrace {
            solver: SolverKind::GaussSeidel,
            residual_norms: vec![],
            snapshots: values
                .into_iter()
                .enumerate()
                .map(|(iteration, values)| Snapshot { iteration, values })
                .collect(),
            iterations_run: 0,
            converged_at: None,
            termination: Termination::MaxIterations,
        }
    }

    #[test]
    fn single_zero_snapshot_is_one_flat_polyline() {
        let g = GridSpec::one_d(4).unwrap();
        let svg = render_waterfall(&trace(vec![vec![0.0; 4]]), &g, PlotFormat::Svg).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = points.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn projection_offsets() {
        let curves = waterfall_curves(&trace(vec![vec![0.0; 3], vec![1.0; 3]]));
        assert_eq!(curves[1][2], (2.0 + 0.4, 1.0 + 0.25));
    }

    #[test]
    fn svg_draws_back_to_front_and_gnuplot_has_every_block() {
        let g = GridSpec::one_d(3).unwrap();
        let t = trace(vec![vec![0.0; 3], vec![1.0; 3], vec![2.0; 3]]);
        let svg = render_waterfall(&t, &g, PlotFormat::Svg).unwrap();
        let first = svg.find("data-iteration=\"2\"").unwrap();
        let last = svg.find("data-iteration=\"0\"").unwrap();
        assert!(first < last);
        let gp = render_waterfall(&t, &g, PlotFormat::Gnuplot).unwrap();
        assert_eq!(gp.matches("# snapshot rank").count(), 3);
        assert!(gp.contains("plot for [s=2:0:-1]"));
    }

    #[test]
    fn dimension_mismatch_is_a_domain_error() {
        let t = trace(vec![vec![0.0; 9]]);
        assert!(render_waterfall(&t, &GridSpec::two_d(3).unwrap(), PlotFormat::Svg).is_err());
        assert!(render_heatmaps(&t, &GridSpec::one_d(9).unwrap(), PlotFormat::Svg).is_err());
    }

    #[test]
    fn zero_snapshot_heatmap_is_uniform() {
        let g = GridSpec::two_d(3).unwrap();
        let docs = render_heatmaps(&trace(vec![vec![0.0; 9]]), &g, PlotFormat::Svg).unwrap();
        assert_eq!(docs.len(), 1);
        let fills: std::collections::BTreeSet<&str> =
            docs[0].1.split("fill=\"").skip(1).map(|s| s.split('"').next().unwrap()).collect();
        assert_eq!(fills.len(), 1);
    }

    #[test]
    fn ramp_endpoints_and_header() {
        assert_eq!(ramp_color(-1.0, -1.0, 3.0), RAMP_LOW);
        assert_eq!(ramp_color(3.0, -1.0, 3.0), RAMP_HIGH);
        let g = GridSpec::two_d(3).unwrap();
        let docs = render_heatmaps(&trace(vec![vec![0.0; 9], vec![2.0; 9]]), &g, PlotFormat::Gnuplot).unwrap();
        assert!(docs[0].1.contains("from #000080 at 0.0 to #ffff00 at 2.0"));
        assert!(docs[1].1.contains("set cbrange [0.0:2.0]"));
    }
}

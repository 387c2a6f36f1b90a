//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Criteria 1 to 10 run in-process; criterion 11 drives the
//! `gridsolve` binary over the shipped Fig. 1 and Fig. 3 configs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use gridsolve::claims::{figure_configs, run_core_claims, ClaimOutcome};
use gridsolve::config::parse_config;
use gridsolve::experiment::expected_snapshot_iterations;
use gridsolve::export::read_snapshots;

fn experiments_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for sub in std::fs::read_dir(dir).unwrap() {
        let sub = sub.unwrap().path();
        for f in std::fs::read_dir(&sub).unwrap() {
            let f = f.unwrap().path();
            let key = f.strip_prefix(dir).unwrap().display().to_string();
            out.insert(key, std::fs::read(&f).unwrap());
        }
    }
    out
}

fn run_binary(configs: &[PathBuf], out: &Path) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_gridsolve"))
        .arg("run")
        .args(configs)
        .arg("--out")
        .arg(out)
        .arg("--format")
        .arg("csv")
        .arg("--format")
        .arg("svg")
        .output()
        .ok()
        .and_then(|o| o.status.code())
}

fn criterion_11() -> ClaimOutcome {
    let mut outcome = ClaimOutcome {
        id: 11,
        title: "gridsolve run over Fig. 1 and Fig. 3 configs",
        passed: true,
        details: Vec::new(),
    };
    let mut check = |ok: bool, msg: String| {
        outcome.passed &= ok;
        outcome.details.push(format!("[{}] {msg}", if ok { "ok" } else { "FAILED" }));
    };
    let configs = figure_configs(&experiments_dir(), &["fig1_", "fig3_"]).unwrap_or_default();
    check(configs.len() == 24, format!("{} configs (12 + 12 expected)", configs.len()));

    let scratch = tempfile::tempdir().unwrap();
    let (a, b) = (scratch.path().join("a"), scratch.path().join("b"));
    let code = run_binary(&configs, &a);
    check(code == Some(0), format!("first run exit code {code:?}"));
    let code = run_binary(&configs, &b);
    check(code == Some(0), format!("second run exit code {code:?}"));

    for path in &configs {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let cfg = parse_config(&std::fs::read_to_string(path).unwrap()).unwrap();
        let dir = a.join(&stem);
        let manifest: serde_json::Value = std::fs::read_to_string(dir.join("manifest.json"))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or_default();
        let iterations_run = manifest["iterations_run"].as_u64().unwrap_or(0) as usize;
        let expected = expected_snapshot_iterations(&cfg.run, iterations_run);
        let got: Vec<usize> = read_snapshots(&dir.join("trace_snapshots.csv"))
            .map(|s| s.iter().map(|s| s.iteration).collect())
            .unwrap_or_default();
        let svg = std::fs::read_to_string(dir.join("waterfall.svg")).unwrap_or_default();
        let curves = svg.matches("<polyline").count();
        check(
            got == expected && curves == expected.len(),
            format!("{stem}: csv {} / svg {} snapshots, expected {}", got.len(), curves, expected.len()),
        );
    }

    let (ta, tb) = (read_tree(&a), read_tree(&b));
    let differing: Vec<&String> = ta.keys().filter(|k| tb.get(*k) != ta.get(*k)).collect();
    check(
        !ta.is_empty() && ta.len() == tb.len() && differing.is_empty(),
        format!("{} files byte-identical across runs (differing: {differing:?})", ta.len()),
    );
    outcome
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut outcomes = run_core_claims();
    outcomes.push(criterion_11());
    for o in &outcomes {
        println!("{o}");
        for d in &o.details {
            println!("      {d}");
        }
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s; failed: {failed:?}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

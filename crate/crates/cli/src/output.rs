use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use fuzzfrac::analysis::{HolderCheck, HolderParams, StabilityReport};
use fuzzfrac::solver::LevelTable;
use fuzzfrac::IterationReport;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn level_header(lambdas: &[f64]) -> Vec<String> {
    let mut header = vec!["x".to_string()];
    for l in lambdas {
        header.push(format!("lower_{l}"));
        header.push(format!("upper_{l}"));
    }
    header
}

pub fn write_levels_csv(path: &Path, table: &LevelTable) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(level_header(&table.lambdas))?;
    for (k, &x) in table.xs.iter().enumerate() {
        let mut row = vec![num(x)];
        for j in 0..table.lambdas.len() {
            row.push(num(table.lower[j][k]));
            row.push(num(table.upper[j][k]));
        }
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn iteration_report(report: &IterationReport, density: usize, points: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "iterations: {}", report.iterations);
    let _ = writeln!(s, "alpha: {}", report.alpha);
    let _ = writeln!(s, "grid_density: {density}");
    let _ = writeln!(s, "grid_points: {points}");
    let _ = writeln!(s, "final_residual: {}", num(report.final_residual));
    let _ = writeln!(s, "a_posteriori_error: {}", num(report.a_posteriori_error));
    let _ = writeln!(s, "successive_d:");
    for (k, d) in report.successive_d.iter().enumerate() {
        let _ = writeln!(s, "  {:>5} {}", k + 1, num(*d));
    }
    s
}

pub fn holder_report(hp: &HolderParams, apriori: f64, norm: f64, check: &HolderCheck) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "alpha: {}", hp.alpha);
    let _ = writeln!(s, "c_min: {}", hp.c_min);
    let _ = writeln!(s, "c_max: {}", hp.c_max);
    let _ = writeln!(s, "L_q: {}", hp.lipschitz);
    let _ = writeln!(s, "delta: {}", hp.delta);
    let _ = writeln!(s, "case: {}", hp.case);
    let _ = writeln!(s, "tau: {}", hp.tau);
    let _ = writeln!(s, "M: {}", hp.m_bound);
    let _ = writeln!(s, "N: {}", hp.n_bound);
    let _ = writeln!(s, "Q: {}", hp.q);
    let _ = writeln!(s, "H: {}", hp.h);
    let _ = writeln!(s, "apriori_norm_bound: {apriori}");
    let _ = writeln!(s, "observed_norm: {norm}");
    let _ = writeln!(s, "holder_pairs: {}", check.pairs);
    let _ = writeln!(s, "holder_violations: {}", check.violations);
    let _ = writeln!(s, "holder_worst_ratio: {}", check.worst_ratio);
    let _ = writeln!(
        s,
        "holder_check: {}",
        if check.passed() { "pass" } else { "fail" }
    );
    s
}

pub fn write_stability_csv(path: &Path, r: &StabilityReport) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["kind", "size", "theoretical_bound", "observed_d", "margin"])?;
    w.write_record([
        r.kind.to_string(),
        num(r.perturbation_size),
        num(r.theoretical_bound),
        num(r.observed_d),
        num(r.margin),
    ])?;
    w.flush()
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    fs::write(path, text)
}

//! Run reports and their CSV / gnuplot output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::constitutive::Phase;
use crate::ldd::StepStatus;

use super::VerifyError;

/// One pressure field: a phase on a subdomain (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldId {
    pub phase: Phase,
    pub subdomain: usize,
}

impl FieldId {
    /// `w_1`, `nw_2`, ... with one-based subdomain numbers.
    pub fn label(&self) -> String {
        format!("{}_{}", self.phase.tag(), self.subdomain + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub step: usize,
    pub iteration: usize,
    pub field: FieldId,
    pub subsequent_error: f64,
    pub linear_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub iterations: usize,
    pub status: StepStatus,
    /// Indexed like [`RunReport::fields`].
    pub relative_errors: Vec<f64>,
    /// Per iteration, indexed like [`RunReport::fields`].
    pub subsequent_errors: Vec<Vec<f64>>,
    pub linear_solves: usize,
    pub diagnostics: Vec<DiagnosticRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub fields: Vec<FieldId>,
    pub steps: Vec<StepRecord>,
}

impl RunReport {
    pub fn new(scenario: &str, fields: Vec<FieldId>) -> Self {
        Self {
            scenario: scenario.to_string(),
            fields,
            steps: Vec::new(),
        }
    }

    pub fn all_converged(&self) -> bool {
        self.steps.iter().all(|s| s.status == StepStatus::Converged)
    }

    pub fn non_converged_steps(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.status != StepStatus::Converged)
            .count()
    }

    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }

    pub fn total_linear_solves(&self) -> usize {
        self.steps.iter().map(|s| s.linear_solves).sum()
    }

    /// Column of `field` in the relative-error rows.
    pub fn field_index(&self, phase: Phase, subdomain: usize) -> Option<usize> {
        self.fields
            .iter()
            .position(|f| f.phase == phase && f.subdomain == subdomain)
    }
}

fn write(path: PathBuf, body: &str) -> Result<PathBuf, VerifyError> {
    fs::write(&path, body).map_err(|source| VerifyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Writes `errors.csv`, `iterations.csv`, `plot.gp` and, when `verbose`,
/// `subsequent_errors.csv` and `diagnostics.csv` into `dir`.
pub fn emit_report(
    report: &RunReport,
    dir: &Path,
    verbose: bool,
) -> Result<Vec<PathBuf>, VerifyError> {
    fs::create_dir_all(dir).map_err(|source| VerifyError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();

    let mut errors = String::from("step,time,iters");
    for f in &report.fields {
        let _ = write!(errors, ",rel_err_{}", f.label());
    }
    errors.push('\n');
    let mut iterations = String::from("step,time,iters,status\n");
    for s in &report.steps {
        let _ = write!(errors, "{},{:e},{}", s.step, s.time, s.iterations);
        for e in &s.relative_errors {
            let _ = write!(errors, ",{e:e}");
        }
        errors.push('\n');
        let _ = writeln!(
            iterations,
            "{},{:e},{},{}",
            s.step,
            s.time,
            s.iterations,
            s.status.as_str()
        );
    }
    written.push(write(dir.join("errors.csv"), &errors)?);
    written.push(write(dir.join("iterations.csv"), &iterations)?);

    if verbose {
        let mut sub = String::from("step,iter,field,value\n");
        let mut diag = String::from("step,iter,phase,subdomain,subsequent_error,linear_iters\n");
        for s in &report.steps {
            for (i, row) in s.subsequent_errors.iter().enumerate() {
                for (f, v) in report.fields.iter().zip(row) {
                    let _ = writeln!(sub, "{},{},{},{v:e}", s.step, i + 1, f.label());
                }
            }
            for d in &s.diagnostics {
                let _ = writeln!(
                    diag,
                    "{},{},{},{},{:e},{}",
                    d.step,
                    d.iteration,
                    d.field.phase.tag(),
                    d.field.subdomain + 1,
                    d.subsequent_error,
                    d.linear_iterations
                );
            }
        }
        written.push(write(dir.join("subsequent_errors.csv"), &sub)?);
        written.push(write(dir.join("diagnostics.csv"), &diag)?);
    }

    written.push(write(dir.join("plot.gp"), &plot_script(report, verbose))?);
    Ok(written)
}

fn plot_script(report: &RunReport, verbose: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for run `{}`", report.scenario);
    s.push_str("set datafile separator ','\nset terminal pngcairo size 1200,500\nset output 'errors.png'\n");
    s.push_str("set multiplot layout 1,2\n");
    s.push_str("set logscale y\nset xlabel 't'\nset ylabel 'relative L2 error'\nset key outside\n");
    let series: Vec<String> = report
        .fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            format!(
                "'errors.csv' using 2:{} with lines title '{}'",
                i + 4,
                f.label()
            )
        })
        .collect();
    if series.is_empty() {
        s.push_str("plot NaN notitle\n");
    } else {
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    s.push_str("unset logscale y\nset ylabel 'LDD iterations'\n");
    s.push_str("plot 'iterations.csv' using 2:3 with linespoints title 'iterations'\n");
    s.push_str("unset multiplot\n");
    if verbose {
        s.push_str("\nset output 'subsequent_errors.png'\nset logscale y\nset xlabel 'iteration'\nset ylabel 'subsequent error'\n");
        let series: Vec<String> = report
            .fields
            .iter()
            .map(|f| {
                let l = f.label();
                format!("'subsequent_errors.csv' using 2:(strcol(3) eq '{l}' && $1 == last ? $4 : 1/0) with lines title '{l}'")
            })
            .collect();
        let last = report.steps.last().map_or(0, |st| st.step);
        let _ = writeln!(s, "last = {last}");
        if !series.is_empty() {
            let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
        }
    }
    s
}

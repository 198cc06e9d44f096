//! CSV rendering of reports. Numbers use six significant digits in the style
//! of C's `%g`, so files are byte-stable across platforms.

use std::fmt::Write as _;

use cosra::metrics::MetricsRow;
use cosra::xval::{AlgorithmReport, DegreeHistogram, Report, SweepReport};
use cosra::GraphStats;

/// `%.6g`: up to six significant digits, trailing zeros dropped, scientific
/// notation outside `1e-4 <= |x| < 1e6`.
pub fn fmt_g6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{value:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn stats_table(stats: &GraphStats) -> String {
    format!(
        "users objects links sparsity\n{} {} {} {:.2e}\n",
        stats.users, stats.objects, stats.links, stats.sparsity
    )
}

pub const REPORT_HEADER: &str =
    "dataset,algorithm,eta1,eta2,realization,L,users_evaluated,auc,map,precision,recall,hamming,intra,popularity";

fn push_metrics(line: &mut String, row: &MetricsRow) {
    for v in row.values() {
        line.push(',');
        line.push_str(&fmt_g6(v));
    }
}

fn report_line(out: &mut String, dataset: &str, alg: &AlgorithmReport, realization: &str, row: &MetricsRow) {
    let (eta1, eta2) = alg
        .algorithm
        .params()
        .map_or((String::new(), String::new()), |p| (fmt_g6(p.eta1), fmt_g6(p.eta2)));
    let mut line = format!(
        "{dataset},{},{eta1},{eta2},{realization},{},{}",
        alg.algorithm.name(),
        row.length,
        row.users_evaluated
    );
    push_metrics(&mut line, row);
    let _ = writeln!(out, "{line}");
}

/// One row per (algorithm, realization), then `mean` and `std` rows per
/// algorithm.
pub fn report_csv(report: &Report) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    let dataset = report.dataset.replace(',', "_");
    for alg in &report.algorithms {
        for (r, row) in alg.realizations.iter().enumerate() {
            report_line(&mut out, &dataset, alg, &r.to_string(), row);
        }
    }
    for alg in &report.algorithms {
        report_line(&mut out, &dataset, alg, "mean", &alg.mean);
        report_line(&mut out, &dataset, alg, "std", &alg.std_dev);
    }
    out
}

pub const SWEEP_HEADER: &str = "eta1,eta2,auc,map,precision,recall,hamming,intra,popularity";

pub fn sweep_csv(sweep: &SweepReport) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for cell in &sweep.cells {
        let mut line = format!("{},{}", fmt_g6(cell.params.eta1), fmt_g6(cell.params.eta2));
        push_metrics(&mut line, &cell.report.mean);
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn histogram_csv(hist: &DegreeHistogram) -> String {
    let mut out = String::from("degree,count\n");
    for (degree, count) in &hist.counts {
        let _ = writeln!(out, "{degree},{count}");
    }
    out
}

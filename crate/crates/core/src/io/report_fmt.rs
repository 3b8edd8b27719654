//! Rendering evaluation reports to TSV and JSON.
//!
//! Both renderings are pure functions of the report value: map keys are
//! ordered, floats are formatted with fixed rules, and no timestamps or
//! environment details are embedded. Costs, rates, and thresholds print
//! with six decimals; error rates print as percentages with two. Infinite
//! thresholds (a sweep optimum at a sentinel) print as `-inf` / `inf`, and
//! absent values as `-`.

use std::io;
use std::path::Path;

use crate::model::Track;
use crate::report::{
    ConditionMetrics, ConditionReport, EvaluationReport, Track1Metrics, Track2Metrics,
};

use super::{create_text, open_text, ReadError};

/// On-disk rendering of an [`EvaluationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

fn fmt_fixed(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.6}")
    } else if value > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

fn fmt_fixed_opt(value: Option<f64>) -> String {
    value.map(fmt_fixed).unwrap_or_else(|| "-".to_owned())
}

fn fmt_percent(rate: f64) -> String {
    format!("{:.2}", rate * 100.0)
}

fn fmt_notes(notes: &[String]) -> String {
    if notes.is_empty() {
        "-".to_owned()
    } else {
        notes.join("; ")
    }
}

const TRACK1_COLUMNS: &[&str] = &[
    "condition",
    "subset",
    "status",
    "n_bonafide",
    "n_spoof",
    "min_dcf",
    "min_dcf_threshold",
    "act_dcf",
    "cllr",
    "eer_percent",
    "eer_threshold",
    "notes",
];

const TRACK2_COLUMNS: &[&str] = &[
    "condition",
    "subset",
    "status",
    "n_target",
    "n_nontarget",
    "n_spoof",
    "min_a_dcf",
    "min_a_dcf_threshold",
    "min_tdcf",
    "min_tdcf_threshold",
    "teer_percent",
    "teer_tau_asv",
    "teer_tau_cm",
    "asv_threshold",
    "asv_p_miss",
    "asv_p_fa",
    "asv_p_miss_spoof",
    "notes",
];

fn track1_cells(metrics: &Track1Metrics) -> Vec<String> {
    vec![
        fmt_fixed(metrics.min_dcf),
        fmt_fixed(metrics.min_dcf_threshold),
        fmt_fixed(metrics.act_dcf),
        fmt_fixed(metrics.cllr),
        fmt_percent(metrics.eer),
        fmt_fixed(metrics.eer_threshold),
    ]
}

fn track2_cells(metrics: &Track2Metrics) -> Vec<String> {
    let teer = metrics.teer.as_ref();
    let op = metrics.asv_operating_point.as_ref();
    vec![
        fmt_fixed(metrics.min_a_dcf),
        fmt_fixed(metrics.min_a_dcf_threshold),
        fmt_fixed_opt(metrics.min_tdcf),
        fmt_fixed_opt(metrics.min_tdcf_threshold),
        teer.map(|t| fmt_percent(t.common_error))
            .unwrap_or_else(|| "-".to_owned()),
        fmt_fixed_opt(teer.map(|t| t.tau_asv)),
        fmt_fixed_opt(teer.map(|t| t.tau_cm)),
        fmt_fixed_opt(op.map(|o| o.threshold)),
        fmt_fixed_opt(op.map(|o| o.p_miss)),
        fmt_fixed_opt(op.map(|o| o.p_fa)),
        fmt_fixed_opt(op.map(|o| o.p_miss_spoof)),
    ]
}

fn condition_row(track: Track, bucket: &str, subset: &str, condition: &ConditionReport) -> String {
    let count = |label: &str| {
        condition
            .counts
            .get(label)
            .map(|n| n.to_string())
            .unwrap_or_else(|| "0".to_owned())
    };
    let (count_labels, columns): (&[&str], &[&str]) = match track {
        Track::One => (&["bonafide", "spoof"], TRACK1_COLUMNS),
        Track::Two => (&["target", "nontarget", "spoof"], TRACK2_COLUMNS),
    };
    // condition + subset + status up front, the class counts, notes at the
    // end; everything between is a metric cell.
    let metric_width = columns.len() - 3 - count_labels.len() - 1;

    let mut notes = condition.notes.clone();
    let (status, metric_cells) = match (&condition.metrics, track) {
        (ConditionMetrics::Track1(m), Track::One) => ("ok", track1_cells(m)),
        (ConditionMetrics::Track2(m), Track::Two) => ("ok", track2_cells(m)),
        (ConditionMetrics::Insufficient, _) => ("insufficient", vec!["-".to_owned(); metric_width]),
        // A hand-built report whose metrics block does not belong to its
        // track renders as data-free rather than mislabelled.
        (_, _) => {
            notes.push("metrics do not match the report track".to_owned());
            ("insufficient", vec!["-".to_owned(); metric_width])
        }
    };

    let mut cells: Vec<String> = vec![bucket.to_owned(), subset.to_owned(), status.to_owned()];
    cells.extend(count_labels.iter().map(|label| count(label)));
    cells.extend(metric_cells);
    cells.push(fmt_notes(&notes));
    cells.join("\t")
}

/// Renders a report as sectioned TSV: `#`-prefixed metadata lines, a
/// `# columns` header, then one row per condition.
pub fn render_report_tsv(report: &EvaluationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema\t{}\n", report.schema));
    out.push_str(&format!("# track\t{}\n", report.track));
    out.push_str(&format!("# toolkit_version\t{}\n", report.toolkit_version));
    let eer_method = match report.eer_method {
        Some(m) => match serde_json::to_value(m) {
            Ok(serde_json::Value::String(s)) => s,
            _ => "-".to_owned(),
        },
        None => "-".to_owned(),
    };
    out.push_str(&format!("# eer_method\t{eer_method}\n"));
    let tdcf_norm = match report.tdcf_norm {
        Some(n) => match serde_json::to_value(n) {
            Ok(serde_json::Value::String(s)) => s,
            _ => "-".to_owned(),
        },
        None => "-".to_owned(),
    };
    out.push_str(&format!("# tdcf_norm\t{tdcf_norm}\n"));
    for input in &report.inputs {
        out.push_str(&format!("# input\t{}\t{}\n", input.name, input.sha256));
    }
    let columns = match report.track {
        Track::One => TRACK1_COLUMNS,
        Track::Two => TRACK2_COLUMNS,
    };
    out.push_str(&format!("# columns\t{}\n", columns.join("\t")));

    out.push_str(&condition_row(report.track, "pooled", "-", &report.pooled));
    out.push('\n');
    for (bucket, table) in [
        ("attack", &report.per_attack),
        ("codec", &report.per_codec),
        ("attack_codec", &report.per_attack_codec),
    ] {
        if let Some(table) = table {
            for (subset, condition) in table {
                out.push_str(&condition_row(report.track, bucket, subset, condition));
                out.push('\n');
            }
        }
    }
    out
}

/// Renders a report as pretty-printed JSON with a trailing newline.
pub fn render_report_json(report: &EvaluationReport) -> String {
    let mut json =
        serde_json::to_string_pretty(report).expect("report serialization has no fallible fields");
    json.push('\n');
    json
}

/// Renders a report in the requested format.
pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Tsv => render_report_tsv(report),
        ReportFormat::Json => render_report_json(report),
    }
}

/// Writes a report to a file; `.gz` names are compressed.
pub fn write_report(
    path: &Path,
    report: &EvaluationReport,
    format: ReportFormat,
) -> io::Result<()> {
    let mut writer = create_text(path)?;
    writer.write_all(render_report(report, format).as_bytes())?;
    writer.flush()
}

/// Reads a JSON report back; `.gz` names are decompressed.
pub fn read_report_json(path: &Path) -> Result<EvaluationReport, ReadError> {
    let reader = open_text(path)?;
    serde_json::from_reader(reader).map_err(|error| ReadError::Parse {
        line: error.line(),
        message: error.to_string(),
    })
}

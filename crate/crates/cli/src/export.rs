//! Machine-readable exports.

use crate::error::{CliError, CliResult};
use crate::report::sweep_value_label;
use seamless_core::engine::{OperatingCharacteristics, SubgroupRow, SweepPoint};
use serde::Serialize;

/// One exported number: `count` is empty for non-count metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub metric: &'static str,
    pub key: String,
    pub count: String,
    pub percent: String,
}

fn counted(oc: &OperatingCharacteristics, metric: &'static str, key: String, count: u64) -> MetricRow {
    MetricRow { metric, key, count: count.to_string(), percent: format!("{:.2}", oc.percent(count)) }
}

/// Flatten operating characteristics into (metric, key, count, percent) rows.
pub fn metric_rows(oc: &OperatingCharacteristics) -> Vec<MetricRow> {
    let mut rows = vec![MetricRow {
        metric: "replications",
        key: String::new(),
        count: oc.replications.to_string(),
        percent: String::new(),
    }];
    for (i, &c) in oc.count_selected_sizes.iter().enumerate() {
        rows.push(counted(oc, "selected_size", (i + 1).to_string(), c));
    }
    rows.push(counted(oc, "futility", String::new(), oc.futility_count));
    for (i, &c) in oc.per_arm_selected.iter().enumerate() {
        rows.push(counted(oc, "selected", (i + 1).to_string(), c));
    }
    for (i, &c) in oc.per_hypothesis_rejected.iter().enumerate() {
        rows.push(counted(oc, "rejected", format!("H{}", i + 1), c));
    }
    rows.push(counted(oc, "any_rejected", String::new(), oc.any_rejected));
    if let Some(c) = oc.ptest_any_rejected {
        let key = oc.ptest.iter().map(|a| format!("H{}", a + 1)).collect::<Vec<_>>().join("+");
        rows.push(counted(oc, "ptest_any_rejected", key, c));
    }
    if let Some(t) = &oc.subgroup_table {
        let mut branch = |name: &str, row: &SubgroupRow| {
            for (col, c) in [
                ("selected", row.selected),
                ("Hs", row.hs),
                ("Hf", row.hf),
                ("Hs+Hf", row.hs_and_hf),
                ("Hs+f", row.hsf),
            ] {
                rows.push(counted(oc, "subgroup_table", format!("{name}:{col}"), c));
            }
        };
        branch("sub", &t.subgroup);
        branch("full", &t.full);
        branch("both", &t.both);
        branch("total", &t.total());
    }
    rows.push(MetricRow {
        metric: "expected_total_sample_size",
        key: String::new(),
        count: format!("{:.4}", oc.expected_total_sample_size),
        percent: String::new(),
    });
    rows.push(MetricRow {
        metric: "prevalence_redraws",
        key: String::new(),
        count: oc.prevalence_redraws.to_string(),
        percent: String::new(),
    });
    rows
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = writer.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

pub fn to_csv(oc: &OperatingCharacteristics) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "key", "count", "percent"]).map_err(csv_error)?;
    for r in metric_rows(oc) {
        w.write_record([r.metric, &r.key, &r.count, &r.percent]).map_err(csv_error)?;
    }
    finish(w)
}

/// Long-format sweep table: the run columns prefixed by point index and value.
pub fn sweep_to_csv(points: &[SweepPoint]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["point", "value", "metric", "key", "count", "percent"]).map_err(csv_error)?;
    for p in points {
        let index = p.index.to_string();
        let value = sweep_value_label(&p.value);
        for r in metric_rows(&p.characteristics) {
            w.write_record([index.as_str(), &value, r.metric, &r.key, &r.count, &r.percent]).map_err(csv_error)?;
        }
    }
    finish(w)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(csv_error)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct SweepJson<'a> {
    index: usize,
    value: String,
    characteristics: &'a OperatingCharacteristics,
}

pub fn sweep_to_json(points: &[SweepPoint]) -> CliResult<String> {
    let rows: Vec<_> = points
        .iter()
        .map(|p| SweepJson { index: p.index, value: sweep_value_label(&p.value), characteristics: &p.characteristics })
        .collect();
    to_json(&rows)
}

//! Human-readable reports in the layout of the original R output.

use crate::error::{CliError, CliResult};
use seamless_core::engine::{OperatingCharacteristics, Scenario, SubgroupRow, SweepPoint, SweepValue};
use seamless_core::simmodel::{effect_to_expectation, Cohort, DesignKind, Endpoint};
use std::fmt::Write;

/// Round to `digits` decimals and drop trailing zeros, as R prints.
pub fn r_number(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn join(values: &[f64], digits: usize) -> String {
    values.iter().map(|&v| r_number(v, digits)).collect::<Vec<_>>().join(" ")
}

fn expectation(scenario: &Scenario, endpoint: Endpoint, cohort: Cohort) -> CliResult<Vec<f64>> {
    effect_to_expectation(&scenario.effect, &scenario.plan, endpoint, cohort).map_err(|e| CliError::from_core("effect", e))
}

fn weights_line(out: &mut String, scenario: &Scenario) {
    let c = &scenario.combination;
    match c.method {
        seamless_core::closedtest::CombinationMethod::InverseNormal => {
            let _ = writeln!(out, "weights: stage 1 = {} and stage 2 = {} ", r_number(c.weights.0, 2), r_number(c.weights.1, 2));
        }
        seamless_core::closedtest::CombinationMethod::Fisher => {
            let _ = writeln!(out, "combination: Fisher product test ");
        }
    }
}

fn count_row(out: &mut String, label: &str, count: u64, oc: &OperatingCharacteristics) {
    let _ = writeln!(out, "{label:>6}{count:>9}{:>16.2} ", oc.percent(count));
}

const COUNT_HEADER: &str = "              n               ";

fn treatment_report(out: &mut String, oc: &OperatingCharacteristics, scenario: &Scenario) -> CliResult<()> {
    let early = expectation(scenario, Endpoint::Early, Cohort::Stage1)?;
    let f1 = expectation(scenario, Endpoint::Final, Cohort::Stage1)?;
    let f2 = expectation(scenario, Endpoint::Final, Cohort::Stage2Full)?;
    let _ = writeln!(out, "simulation of test statistics: ");
    let _ = writeln!(out, "expectation early = {} ", join(&early, 1));
    let _ = writeln!(out, "expectation final stage 1 = {} and stage 2 = {} ", join(&f1, 1), join(&f2, 1));
    weights_line(out, scenario);
    let _ = writeln!(out);

    let _ = writeln!(out, "number of treatments selected at stage 1: ");
    let _ = writeln!(out, "{COUNT_HEADER}");
    for (i, &c) in oc.count_selected_sizes.iter().enumerate() {
        count_row(out, &(i + 1).to_string(), c, oc);
    }
    count_row(out, "Total", oc.continued_count(), oc);
    if scenario.rule.can_stop_for_futility() {
        let _ = writeln!(out, "stopped for futility = {} :  {}", oc.futility_count, r_number(oc.percent(oc.futility_count), 2));
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "treatment selection at stage 1: ");
    let _ = writeln!(out, "{COUNT_HEADER}");
    for (i, &c) in oc.per_arm_selected.iter().enumerate() {
        count_row(out, &(i + 1).to_string(), c, oc);
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "hypothesis rejection at study endpoint: ");
    let _ = writeln!(out, "{COUNT_HEADER}");
    for (i, &c) in oc.per_hypothesis_rejected.iter().enumerate() {
        count_row(out, &format!("H{}", i + 1), c, oc);
    }
    let _ = writeln!(out);

    if let Some(count) = oc.ptest_any_rejected {
        let names: Vec<String> = oc.ptest.iter().map(|a| format!("H{}", a + 1)).collect();
        let _ = writeln!(out, "reject {} = {} :  {}", names.join(" and/or "), count, r_number(oc.percent(count), 2));
    }
    Ok(())
}

fn negated(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| -x).collect()
}

fn subgroup_row(out: &mut String, label: &str, row: &SubgroupRow, oc: &OperatingCharacteristics, percent: bool) {
    let pct = if percent { format!("{:>8.2}", oc.percent(row.selected)) } else { format!("{:>8}", "-") };
    let _ = writeln!(
        out,
        "{label:<5}{:>10}{:>9}{:>11}{:>12}{:>8}{pct} ",
        row.hs, row.hf, row.hs_and_hf, row.hsf, row.selected
    );
}

fn subgroup_report(out: &mut String, oc: &OperatingCharacteristics, scenario: &Scenario) -> CliResult<()> {
    // statistics are shown on the scale the selection limits use
    let early = negated(expectation(scenario, Endpoint::Early, Cohort::Stage1)?);
    let f1 = negated(expectation(scenario, Endpoint::Final, Cohort::Stage1)?);
    let both = negated(expectation(scenario, Endpoint::Final, Cohort::Stage2Full)?);
    let sub_cohort = if scenario.plan.enrich.is_some() { Cohort::Stage2Enriched } else { Cohort::Stage2SubgroupOnly };
    let sub_only = negated(expectation(scenario, Endpoint::Final, sub_cohort)?);
    let r = |x: f64| r_number(x, 2);
    let _ = writeln!(out, "simulation of test statistics: ");
    let _ = writeln!(out, "expectation early: sub-pop = {} : full-pop = {} ", r(early[0]), r(early[1]));
    let _ = writeln!(out, "expectation final stage 1: sub-pop = {} : full-pop = {} ", r(f1[0]), r(f1[1]));
    let _ = writeln!(out, "expectation final stage 2: sub-pop only = {} : full-pop only = {} ", r(sub_only[0]), r(both[1]));
    let _ = writeln!(
        out,
        "expectation final stage 2, both groups selected: sub-pop = {} : full-pop = {} ",
        r(both[0]),
        r(both[1])
    );
    weights_line(out, scenario);
    let _ = writeln!(out);

    let table = oc.subgroup_table.unwrap_or_default();
    let _ = writeln!(out, "hypotheses rejected and group selection options at stage 1 (n): ");
    let _ = writeln!(out, "             Hs       Hf      Hs+Hf      Hs+f         n      n");
    subgroup_row(out, "sub", &table.subgroup, oc, true);
    subgroup_row(out, "full", &table.full, oc, true);
    subgroup_row(out, "both", &table.both, oc, true);
    subgroup_row(out, "total", &table.total(), oc, false);
    let _ = writeln!(out, "reject Hs and/or Hf =  {}", r_number(oc.percent(oc.any_rejected), 2));
    let _ = writeln!(out, "stopped for futility = {} :  {}", oc.futility_count, r_number(oc.percent(oc.futility_count), 2));
    Ok(())
}

/// Full report for one run.
pub fn render_report(oc: &OperatingCharacteristics, scenario: &Scenario) -> CliResult<String> {
    let mut out = String::new();
    match oc.design {
        DesignKind::TreatmentSelection => treatment_report(&mut out, oc, scenario)?,
        DesignKind::SubgroupSelection => subgroup_report(&mut out, oc, scenario)?,
    }
    let _ = writeln!(out, "expected total sample size = {}", r_number(oc.expected_total_sample_size, 1));
    Ok(out)
}

pub fn sweep_value_label(value: &SweepValue) -> String {
    match *value {
        SweepValue::Stage1(n) => n.to_string(),
        SweepValue::Threshold(t) => r_number(t, 6),
        SweepValue::FutilityLimits { subgroup, full } => format!("{}/{}", r_number(subgroup, 6), r_number(full, 6)),
    }
}

/// One line per sweep point: selection, futility, power and expected size.
pub fn render_sweep(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    let Some(first) = points.first() else { return out };
    let subgroup = first.characteristics.design == DesignKind::SubgroupSelection;
    if subgroup {
        let _ = writeln!(out, "{:>12}{:>10}{:>10}{:>10}{:>10}{:>10}{:>12}", "lS/lF", "sub", "full", "both", "futility", "power", "E[N]");
    } else {
        let k = first.characteristics.per_arm_selected.len();
        let mut header = format!("{:>12}", "value");
        for i in 1..=k {
            header.push_str(&format!("{:>9}", format!("sel{i}")));
        }
        header.push_str(&format!("{:>10}{:>10}{:>10}{:>12}", "futility", "power", "ptest", "E[N]"));
        let _ = writeln!(out, "{header}");
    }
    for p in points {
        let oc = &p.characteristics;
        let label = sweep_value_label(&p.value);
        let pct = |c: u64| format!("{:.2}", oc.percent(c));
        if subgroup {
            let t = oc.subgroup_table.unwrap_or_default();
            let _ = writeln!(
                out,
                "{label:>12}{:>10}{:>10}{:>10}{:>10}{:>10}{:>12.1}",
                pct(t.subgroup.selected),
                pct(t.full.selected),
                pct(t.both.selected),
                pct(oc.futility_count),
                pct(oc.any_rejected),
                oc.expected_total_sample_size
            );
        } else {
            let mut line = format!("{label:>12}");
            for &c in &oc.per_arm_selected {
                line.push_str(&format!("{:>9}", pct(c)));
            }
            let ptest = oc.ptest_any_rejected.map_or("-".to_string(), pct);
            line.push_str(&format!(
                "{:>10}{:>10}{:>10}{:>12.1}",
                pct(oc.futility_count),
                pct(oc.any_rejected),
                ptest,
                oc.expected_total_sample_size
            ));
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

use seamless_cli::export::{metric_rows, to_csv};
use seamless_cli::report::{r_number, render_report};
use seamless_cli::parse_config;
use seamless_core::engine::run_scenario;

const COPD: &str = r#"
nsim = 2000
seed = 145514
corr = 0.4
select = 2
ptest = [3, 4]

[n]
stage1 = 100
stage2 = 300

[effect]
early = [0, 0.68, 0.82, 0.95, 0.91]
final = [0, 0.13, 0.17, 0.23, 0.20]
"#;

#[test]
fn r_style_numbers() {
    assert_eq!(r_number(0.5, 2), "0.5");
    assert_eq!(r_number(0.866, 2), "0.87");
    assert_eq!(r_number(86.0, 2), "86");
    assert_eq!(r_number(-1.4567, 2), "-1.46");
    assert_eq!(r_number(1400.0, 1), "1400");
}

#[test]
fn treatment_report_sections_in_order() {
    let scenario = parse_config(COPD).unwrap();
    let oc = run_scenario(&scenario).unwrap();
    let report = render_report(&oc, &scenario).unwrap();
    let order = [
        "simulation of test statistics:",
        "weights: stage 1 = 0.5 and stage 2 = 0.87 ",
        "number of treatments selected at stage 1:",
        "treatment selection at stage 1:",
        "hypothesis rejection at study endpoint:",
        "reject H3 and/or H4 = ",
        "expected total sample size = ",
    ];
    let mut from = 0;
    for piece in order {
        let at = report[from..].find(piece).unwrap_or_else(|| panic!("{piece:?} missing or out of order"));
        from += at + piece.len();
    }
    let h3 = oc.per_hypothesis_rejected[2];
    let line = format!("{:>6}{:>9}{:>16.2} ", "H3", h3, 100.0 * h3 as f64 / 2000.0);
    assert!(report.lines().any(|l| l == line), "{line:?}");
}

#[test]
fn ptest_line_omitted_without_ptest() {
    let scenario = parse_config(&COPD.replace("ptest = [3, 4]\n", "")).unwrap();
    let report = render_report(&run_scenario(&scenario).unwrap(), &scenario).unwrap();
    assert!(!report.contains("and/or"));
}

#[test]
fn subgroup_cross_table() {
    let text = r#"
nsim = 2000
seed = 1234
sprev = 0.3
corr = 0.5
select = "futility"
selim = [0, 0]
[n]
stage1 = 100
enrich = 200
stage2 = 300
[effect]
early = [0.6, 0.9]
final = [0.6, 0.9]
[outcome]
early = "T"
final = "T"
"#;
    let scenario = parse_config(text).unwrap();
    let oc = run_scenario(&scenario).unwrap();
    let report = render_report(&oc, &scenario).unwrap();
    assert!(report.contains("             Hs       Hf      Hs+Hf      Hs+f         n      n\n"));
    for row in ["sub ", "full ", "both ", "total "] {
        assert!(report.lines().any(|l| l.starts_with(row)), "{row}");
    }
    assert!(report.contains("reject Hs and/or Hf = "));
}

#[test]
fn csv_percentages_match_counts() {
    let scenario = parse_config(COPD).unwrap();
    let oc = run_scenario(&scenario).unwrap();
    let csv = to_csv(&oc).unwrap();
    assert!(csv.starts_with("metric,key,count,percent\n"));
    assert_eq!(csv.lines().count(), metric_rows(&oc).len() + 1);
    for row in metric_rows(&oc) {
        if let (Ok(count), Ok(percent)) = (row.count.parse::<u64>(), row.percent.parse::<f64>()) {
            assert_eq!(format!("{percent:.2}"), format!("{:.2}", 100.0 * count as f64 / 2000.0));
        }
    }
    let sizes: u64 = oc.count_selected_sizes.iter().sum();
    assert_eq!(sizes + oc.futility_count, 2000);
}

//! Scenario documents.
//!
//! A scenario is a TOML document whose keys follow the argument names of the
//! original R functions; dotted names such as `n.stage1` are TOML tables.
//!
//! ```toml
//! nsim = 10000
//! seed = 145514
//! corr = 0.4
//! select = 2
//! ptest = [3, 4]
//!
//! [n]
//! stage1 = 100
//! stage2 = 300
//!
//! [effect]
//! early = [0, 0.68, 0.82, 0.95, 0.91]
//! final = [0, 0.13, 0.17, 0.23, 0.20]
//!
//! [outcome]
//! early = "N"
//! final = "N"
//! ```

use crate::error::{CliError, CliResult};
use seamless_core::closedtest::{CombinationConfig, CombinationMethod};
use seamless_core::engine::{IntersectionMethod, Scenario, SweepAxis, SweepValue, MAX_REPLICATIONS};
use seamless_core::selection::SelectionRule;
use seamless_core::simmodel::{DesignKind, EffectSpec, OutcomeType, SampleSizePlan};
use serde::{Deserialize, Serialize};

pub const DEFAULT_LEVEL: f64 = 0.025;
pub const DEFAULT_NSIM: u64 = 1000;
pub const DEFAULT_SEED: u64 = 12345;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSizes {
    pub stage1: Option<u32>,
    pub stage2: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enrich: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Effects {
    pub early: Option<Vec<f64>>,
    #[serde(rename = "final")]
    pub final_: Option<Vec<f64>>,
    /// Control parameters (early, final) for subgroup designs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcomes {
    pub early: Option<String>,
    #[serde(rename = "final")]
    pub final_: Option<String>,
}

/// `select` accepts the numeric codes 0–6 or a rule name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Select {
    Code(i64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "stage1-allocation", "threshold" or "futility-limits".
    pub axis: String,
    /// Numbers for the first two axes, [l1, l2] pairs for futility limits.
    pub values: Vec<toml::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
}

/// The raw document, before defaults and validation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// "treatsel" or "subpop"; inferred from `sprev` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsim: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sprev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sprev_fixed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub select: Option<Select>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selim: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptest: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Intersection test of treatment designs: dunnett (default), simes, bonferroni.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection: Option<String>,
    /// Combination test of subgroup designs: invnorm (default) or fisher.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combination: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fu: Option<bool>,
    /// Squared stage-1 weight w₁² of the inverse-normal combination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// Stage-1 spending α₁* of the inverse-normal combination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spend: Option<f64>,
    /// Control patients per experimental-arm patient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<SampleSizes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect: Option<Effects>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcomes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A parsed sweep request.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRequest {
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

fn require<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(key, "missing required key"))
}

fn outcome(code: Option<&String>, key: &str) -> CliResult<OutcomeType> {
    match code {
        None => Ok(OutcomeType::Normal),
        Some(c) => OutcomeType::from_code(c).ok_or_else(|| CliError::config(key, format!("unknown outcome type {c:?}, expected N, T or B"))),
    }
}

fn design_of(doc: &ScenarioConfig) -> CliResult<DesignKind> {
    match doc.design.as_deref() {
        Some("treatsel") => Ok(DesignKind::TreatmentSelection),
        Some("subpop") => Ok(DesignKind::SubgroupSelection),
        Some(other) => Err(CliError::config("design", format!("expected \"treatsel\" or \"subpop\", got {other:?}"))),
        None if doc.sprev.is_some() => Ok(DesignKind::SubgroupSelection),
        None => Ok(DesignKind::TreatmentSelection),
    }
}

fn treatment_rule(doc: &ScenarioConfig) -> CliResult<SelectionRule> {
    let code = match &doc.select {
        None => 0,
        Some(Select::Code(c)) => *c,
        Some(Select::Name(name)) => match name.as_str() {
            "all" => 0,
            "max" | "best" => 1,
            "max2" => 2,
            "max3" => 3,
            "epsilon" => 4,
            "random" => 5,
            "thresh" | "threshold" => 6,
            other => return Err(CliError::config("select", format!("unknown treatment selection rule {other:?}"))),
        },
    };
    let rule = match code {
        0 => SelectionRule::All,
        1..=3 => SelectionRule::Best(code as usize),
        4 => {
            let eps = require(doc.epsilon, "epsilon")?;
            if !(eps >= 0.0) {
                return Err(CliError::config("epsilon", format!("must be nonnegative, got {eps}")));
            }
            SelectionRule::Epsilon(eps)
        }
        5 => SelectionRule::RandomOne,
        6 => {
            let t = require(doc.thresh, "thresh")?;
            if !t.is_finite() {
                return Err(CliError::config("thresh", "must be finite"));
            }
            SelectionRule::Threshold(t)
        }
        other => return Err(CliError::config("select", format!("treatment selection code must lie in 0..=6, got {other}"))),
    };
    if code != 4 && doc.epsilon.is_some() {
        return Err(CliError::config("epsilon", "only used with select = 4"));
    }
    if code != 6 && doc.thresh.is_some() {
        return Err(CliError::config("thresh", "only used with select = 6"));
    }
    if doc.selim.is_some() {
        return Err(CliError::config("selim", "only used by subgroup designs"));
    }
    Ok(rule)
}

fn pair(values: &[f64], key: &str) -> CliResult<(f64, f64)> {
    match values {
        [a, b] if a.is_finite() && b.is_finite() => Ok((*a, *b)),
        _ => Err(CliError::config(key, format!("expected two finite numbers, got {values:?}"))),
    }
}

fn subgroup_rule(doc: &ScenarioConfig) -> CliResult<SelectionRule> {
    let name = match &doc.select {
        Some(Select::Name(n)) => n.as_str(),
        Some(Select::Code(c)) => return Err(CliError::config("select", format!("subgroup designs take \"thresh\" or \"futility\", got {c}"))),
        None => return Err(CliError::config("select", "missing required key")),
    };
    let (l1, l2) = pair(&require(doc.selim.clone(), "selim")?, "selim")?;
    let rule = match name {
        "thresh" | "threshold" => {
            if l1 > l2 {
                return Err(CliError::config("selim", format!("threshold limits need l1 ≤ l2, got ({l1}, {l2})")));
            }
            SelectionRule::ThresholdPair { lower: l1, upper: l2 }
        }
        "futility" => SelectionRule::FutilityPair { subgroup: l1, full: l2 },
        other => return Err(CliError::config("select", format!("unknown subgroup selection rule {other:?}"))),
    };
    for (present, key) in [(doc.epsilon.is_some(), "epsilon"), (doc.thresh.is_some(), "thresh")] {
        if present {
            return Err(CliError::config(key, "only used by treatment designs"));
        }
    }
    Ok(rule)
}

fn probability(value: Option<f64>, key: &str, default: f64) -> CliResult<f64> {
    let v = value.unwrap_or(default);
    if !(v > 0.0 && v < 1.0) {
        return Err(CliError::config(key, format!("must lie in (0, 1), got {v}")));
    }
    Ok(v)
}

/// Build and validate a scenario from a parsed document.
pub fn scenario_from_config(doc: &ScenarioConfig) -> CliResult<Scenario> {
    let design = design_of(doc)?;
    let subgroup = design == DesignKind::SubgroupSelection;

    let n = require(doc.n.clone(), "n")?;
    let stage1 = require(n.stage1, "n.stage1")?;
    let stage2 = require(n.stage2, "n.stage2")?;
    if stage1 == 0 {
        return Err(CliError::config("n.stage1", "must be positive"));
    }
    if stage2 == 0 {
        return Err(CliError::config("n.stage2", "must be positive"));
    }
    let effect = require(doc.effect.clone(), "effect")?;
    let early = require(effect.early, "effect.early")?;
    let final_ = require(effect.final_, "effect.final")?;
    let outcomes = doc.outcome.clone().unwrap_or(Outcomes { early: None, final_: None });
    let early_outcome = outcome(outcomes.early.as_ref(), "outcome.early")?;
    let final_outcome = outcome(outcomes.final_.as_ref(), "outcome.final")?;

    let corr = doc.corr.unwrap_or(0.0);
    if !(corr.abs() <= 1.0) {
        return Err(CliError::config("corr", format!("must lie in [-1, 1], got {corr}")));
    }
    let nsim = doc.nsim.unwrap_or(DEFAULT_NSIM);
    if nsim == 0 || nsim > MAX_REPLICATIONS {
        return Err(CliError::config("nsim", format!("must lie in 1..={MAX_REPLICATIONS}, got {nsim}")));
    }
    let level = probability(doc.level, "level", DEFAULT_LEVEL)?;
    let ratio = doc.ratio.unwrap_or(1.0);
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(CliError::config("ratio", format!("must be positive, got {ratio}")));
    }

    let mut plan = SampleSizePlan::treatment(stage1, stage2);
    plan.allocation_ratio = ratio;
    let mut subgroup_control = None;
    if subgroup {
        plan.prevalence = Some(probability(Some(require(doc.sprev, "sprev")?), "sprev", 0.5)?);
        plan.prevalence_fixed = doc.sprev_fixed.unwrap_or(true);
        plan.enrich = n.enrich;
        if plan.enrich == Some(0) {
            return Err(CliError::config("n.enrich", "must be positive"));
        }
        if let Some(c) = &effect.control {
            subgroup_control = Some(pair(c, "effect.control")?);
        }
    } else {
        for (present, key) in [
            (n.enrich.is_some(), "n.enrich"),
            (effect.control.is_some(), "effect.control"),
            (doc.sprev.is_some(), "sprev"),
            (doc.sprev_fixed.is_some(), "sprev_fixed"),
        ] {
            if present {
                return Err(CliError::config(key, "only used by subgroup designs"));
            }
        }
    }

    let expected_len = if subgroup { 2 } else { early.len().max(2) };
    for (values, key) in [(&early, "effect.early"), (&final_, "effect.final")] {
        if subgroup && values.len() != 2 {
            return Err(CliError::config(key, format!("subgroup designs take (subgroup, full) effects, got {} values", values.len())));
        }
        if !subgroup && values.len() < 2 {
            return Err(CliError::config(key, "needs a control effect and at least one arm"));
        }
        if values.len() != expected_len {
            return Err(CliError::config("effect.final", "early and final effects differ in length"));
        }
    }
    let k = if subgroup { 2 } else { early.len() - 1 };

    let rule = if subgroup { subgroup_rule(doc)? } else { treatment_rule(doc)? };

    let ptest = match &doc.ptest {
        None => vec![],
        Some(_) if subgroup => return Err(CliError::config("ptest", "only used by treatment designs")),
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for &a in list {
                if a < 1 || a as usize > k {
                    return Err(CliError::config("ptest", format!("treatment {a} does not exist (1..={k})")));
                }
                out.push(a as usize - 1);
            }
            out
        }
    };

    let (intersection, method) = if subgroup {
        let intersection = match doc.method.as_deref().unwrap_or("CT-SD") {
            "CT-SD" => IntersectionMethod::SpiessensDebois,
            "CT-Simes" => IntersectionMethod::Simes,
            "CT-Bonferroni" => IntersectionMethod::Bonferroni,
            "CEF" => return Err(CliError::config("method", "the CEF method is not available")),
            other => return Err(CliError::config("method", format!("expected CT-SD, CT-Simes or CT-Bonferroni, got {other:?}"))),
        };
        let method = match doc.combination.as_deref().unwrap_or("invnorm") {
            "invnorm" => CombinationMethod::InverseNormal,
            "fisher" => CombinationMethod::Fisher,
            other => return Err(CliError::config("combination", format!("expected invnorm or fisher, got {other:?}"))),
        };
        if doc.intersection.is_some() {
            return Err(CliError::config("intersection", "subgroup designs choose the test with method"));
        }
        if doc.fu.is_some() {
            return Err(CliError::config("fu", "only used by treatment designs"));
        }
        (intersection, method)
    } else {
        let method = match doc.method.as_deref().unwrap_or("invnorm") {
            "invnorm" => CombinationMethod::InverseNormal,
            "fisher" => CombinationMethod::Fisher,
            other => return Err(CliError::config("method", format!("expected invnorm or fisher, got {other:?}"))),
        };
        let intersection = match doc.intersection.as_deref().unwrap_or("dunnett") {
            "dunnett" => IntersectionMethod::Dunnett,
            "simes" => IntersectionMethod::Simes,
            "bonferroni" => IntersectionMethod::Bonferroni,
            other => return Err(CliError::config("intersection", format!("expected dunnett, simes or bonferroni, got {other:?}"))),
        };
        if doc.combination.is_some() {
            return Err(CliError::config("combination", "treatment designs choose the combination with method"));
        }
        (intersection, method)
    };

    let w1_squared = doc.weight.unwrap_or(stage1 as f64 / (stage1 + stage2) as f64);
    if !(0.0..=1.0).contains(&w1_squared) {
        return Err(CliError::config("weight", format!("must lie in [0, 1], got {w1_squared}")));
    }
    let mut combination = match method {
        CombinationMethod::InverseNormal => CombinationConfig::from_squared_weight(w1_squared, level),
        CombinationMethod::Fisher => {
            if doc.weight.is_some() {
                return Err(CliError::config("weight", "weights apply to the inverse-normal method only"));
            }
            CombinationConfig::fisher(level)
        }
    };
    if let Some(a1) = doc.spend {
        if method != CombinationMethod::InverseNormal {
            return Err(CliError::config("spend", "alpha spending needs the inverse-normal method"));
        }
        if !(a1 >= 0.0 && a1 <= level) {
            return Err(CliError::config("spend", format!("must lie in [0, level], got {a1}")));
        }
        combination = combination.with_spending(a1);
    }

    let scenario = Scenario {
        effect: EffectSpec {
            design,
            early_effects: early,
            final_effects: final_,
            early_outcome,
            final_outcome,
            subgroup_control,
            correlation: corr,
        },
        plan,
        rule,
        intersection,
        combination,
        replications: nsim,
        master_seed: doc.seed.unwrap_or(DEFAULT_SEED),
        ptest,
        follow_up: doc.fu.unwrap_or(false),
    };
    scenario.validate().map_err(|e| CliError::from_core("effect", e))?;
    Ok(scenario)
}

/// Parse a TOML scenario document.
pub fn parse_config(text: &str) -> CliResult<Scenario> {
    scenario_from_config(&parse_document(text)?)
}

pub fn parse_document(text: &str) -> CliResult<ScenarioConfig> {
    toml::from_str(text).map_err(|e| {
        // name the key on the offending line when there is one
        let key = e
            .span()
            .and_then(|span| {
                let start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
                let line = text[start..].lines().next().unwrap_or("");
                line.split_once('=').map(|(k, _)| k.trim().to_string())
            })
            .filter(|k| !k.is_empty())
            .unwrap_or_else(|| "document".to_string());
        CliError::config(key, e.message().to_string())
    })
}

/// The sweep section of a document, if any.
pub fn sweep_from_config(doc: &ScenarioConfig) -> CliResult<Option<SweepRequest>> {
    let Some(sw) = &doc.sweep else { return Ok(None) };
    let number = |v: &toml::Value| -> CliResult<f64> {
        v.as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .ok_or_else(|| CliError::config("sweep.values", format!("expected a number, got {v}")))
    };
    let (axis, values) = match sw.axis.as_str() {
        "stage1-allocation" => {
            let budget = require(sw.budget, "sweep.budget")?;
            let values = sw
                .values
                .iter()
                .map(|v| match v.as_integer() {
                    Some(n) if n > 0 && n <= u32::MAX as i64 => Ok(SweepValue::Stage1(n as u32)),
                    _ => Err(CliError::config("sweep.values", format!("stage-1 sizes must be positive integers, got {v}"))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            (SweepAxis::Stage1Allocation { budget }, values)
        }
        "threshold" => (
            SweepAxis::Threshold,
            sw.values.iter().map(|v| number(v).map(SweepValue::Threshold)).collect::<CliResult<Vec<_>>>()?,
        ),
        "futility-limits" => {
            let values = sw
                .values
                .iter()
                .map(|v| {
                    let items = v.as_array().ok_or_else(|| CliError::config("sweep.values", format!("expected [l1, l2], got {v}")))?;
                    let nums = items.iter().map(number).collect::<CliResult<Vec<_>>>()?;
                    let (subgroup, full) = pair(&nums, "sweep.values")?;
                    Ok(SweepValue::FutilityLimits { subgroup, full })
                })
                .collect::<CliResult<Vec<_>>>()?;
            (SweepAxis::FutilityLimitsGrid, values)
        }
        other => {
            return Err(CliError::config(
                "sweep.axis",
                format!("expected stage1-allocation, threshold or futility-limits, got {other:?}"),
            ))
        }
    };
    if values.is_empty() {
        return Err(CliError::config("sweep.values", "no values to sweep"));
    }
    Ok(Some(SweepRequest { axis, values }))
}

/// A document that parses back to `scenario`.
pub fn config_from_scenario(scenario: &Scenario) -> CliResult<ScenarioConfig> {
    let subgroup = scenario.design() == DesignKind::SubgroupSelection;
    let unsupported = |what: String| CliError::config("scenario", what);
    let mut doc = ScenarioConfig {
        design: Some(if subgroup { "subpop" } else { "treatsel" }.into()),
        nsim: Some(scenario.replications),
        seed: Some(scenario.master_seed),
        corr: Some(scenario.effect.correlation),
        level: Some(scenario.combination.alpha),
        ratio: Some(scenario.plan.allocation_ratio),
        n: Some(SampleSizes {
            stage1: Some(scenario.plan.stage1),
            stage2: Some(scenario.plan.stage2),
            enrich: scenario.plan.enrich,
        }),
        effect: Some(Effects {
            early: Some(scenario.effect.early_effects.clone()),
            final_: Some(scenario.effect.final_effects.clone()),
            control: scenario.effect.subgroup_control.map(|(a, b)| vec![a, b]),
        }),
        outcome: Some(Outcomes {
            early: Some(scenario.effect.early_outcome.code().into()),
            final_: Some(scenario.effect.final_outcome.code().into()),
        }),
        ..Default::default()
    };
    match scenario.rule {
        SelectionRule::All => doc.select = Some(Select::Code(0)),
        SelectionRule::Best(m) if (1..=3).contains(&m) => doc.select = Some(Select::Code(m as i64)),
        SelectionRule::Epsilon(e) => {
            doc.select = Some(Select::Code(4));
            doc.epsilon = Some(e);
        }
        SelectionRule::RandomOne => doc.select = Some(Select::Code(5)),
        SelectionRule::Threshold(t) => {
            doc.select = Some(Select::Code(6));
            doc.thresh = Some(t);
        }
        SelectionRule::ThresholdPair { lower, upper } => {
            doc.select = Some(Select::Name("thresh".into()));
            doc.selim = Some(vec![lower, upper]);
        }
        SelectionRule::FutilityPair { subgroup, full } => {
            doc.select = Some(Select::Name("futility".into()));
            doc.selim = Some(vec![subgroup, full]);
        }
        SelectionRule::Best(m) => return Err(unsupported(format!("best-{m} selection has no select code"))),
    }
    let fisher = scenario.combination.method == CombinationMethod::Fisher;
    if subgroup {
        doc.sprev = scenario.plan.prevalence;
        doc.sprev_fixed = Some(scenario.plan.prevalence_fixed);
        doc.method = Some(
            match scenario.intersection {
                IntersectionMethod::SpiessensDebois => "CT-SD",
                IntersectionMethod::Simes => "CT-Simes",
                IntersectionMethod::Bonferroni => "CT-Bonferroni",
                IntersectionMethod::Dunnett => return Err(unsupported("Dunnett test in a subgroup design".into())),
            }
            .into(),
        );
        doc.combination = Some(if fisher { "fisher" } else { "invnorm" }.into());
    } else {
        doc.method = Some(if fisher { "fisher" } else { "invnorm" }.into());
        doc.intersection = Some(scenario.intersection.name().into());
        doc.fu = Some(scenario.follow_up);
        if !scenario.ptest.is_empty() {
            doc.ptest = Some(scenario.ptest.iter().map(|&a| a as i64 + 1).collect());
        }
    }
    if !fisher {
        doc.weight = Some(squared_weight(&scenario.combination));
    }
    doc.spend = scenario.combination.spending.map(|(a1, _)| a1);
    Ok(doc)
}

/// The squared stage-1 weight that rebuilds exactly the same weight pair.
fn squared_weight(config: &CombinationConfig) -> f64 {
    let guess = config.weights.0.powi(2);
    let (mut lo, mut hi) = (guess, guess);
    for _ in 0..4 {
        for x in [lo, hi] {
            if CombinationConfig::from_squared_weight(x, config.alpha).weights == config.weights {
                return x;
            }
        }
        lo = lo.next_down();
        hi = hi.next_up();
    }
    guess
}

/// Serialize a scenario as a TOML document.
pub fn serialize_scenario(scenario: &Scenario) -> CliResult<String> {
    let doc = config_from_scenario(scenario)?;
    toml::to_string(&doc).map_err(|e| CliError::config("scenario", e.to_string()))
}

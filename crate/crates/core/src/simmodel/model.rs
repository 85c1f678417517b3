use super::covariance::{compound_symmetry, endpoint_stage_block, group_sequential_correlation, kronecker, nested_population_correlation};
use super::effects::{cohort_sizes, expectations_for_sizes};
use super::{Cohort, DesignKind, EffectSpec, Endpoint, SampleSizePlan};
use crate::statdist::{cholesky, ReplicationStream};
use crate::{Error, Result};
use ndarray::Array2;

/// Shape of a statistic vector: 2 endpoints × `stages` × `units`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreLayout {
    pub units: usize,
    pub stages: usize,
}

impl ScoreLayout {
    pub const ENDPOINTS: usize = 2;

    pub fn dim(&self) -> usize {
        Self::ENDPOINTS * self.stages * self.units
    }

    /// Position of (endpoint, stage, unit); `stage` is 0-based.
    #[inline]
    pub fn index(&self, endpoint: Endpoint, stage: usize, unit: usize) -> usize {
        ((endpoint as usize) * self.stages + stage) * self.units + unit
    }
}

/// Mean and correlation-scale covariance of the score statistics.
#[derive(Clone, Debug)]
pub struct ScoreModel {
    layout: ScoreLayout,
    mean: Vec<f64>,
    covariance: Array2<f64>,
    /// Lower Cholesky factor, packed row by row.
    factor: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum InformationScale {
    StageWise,
    Cumulative,
}

/// Model of stage-wise statistics: stage 2 holds the stage-2 cohort only and
/// is independent of stage 1. Stage 2 assumes full-population recruitment
/// for subgroup designs.
pub fn build_score_model(effect: &EffectSpec, plan: &SampleSizePlan) -> Result<ScoreModel> {
    build(effect, plan, InformationScale::StageWise)
}

/// Model of cumulative statistics (all data up to each stage), the
/// group-sequential form with stage correlation √(I₁/I₂).
pub fn build_cumulative_score_model(effect: &EffectSpec, plan: &SampleSizePlan) -> Result<ScoreModel> {
    build(effect, plan, InformationScale::Cumulative)
}

fn build(effect: &EffectSpec, plan: &SampleSizePlan, scale: InformationScale) -> Result<ScoreModel> {
    effect.validate()?;
    plan.validate(effect.design)?;
    let units = effect.units();
    let layout = ScoreLayout { units, stages: 2 };

    let stage1 = cohort_sizes(effect, plan, Cohort::Stage1)?;
    let stage2 = cohort_sizes(effect, plan, Cohort::Stage2Full)?;
    let sizes: [Vec<f64>; 2] = match scale {
        InformationScale::StageWise => [stage1, stage2],
        InformationScale::Cumulative => {
            let total = stage1.iter().zip(&stage2).map(|(a, b)| a + b).collect();
            [stage1, total]
        }
    };

    let mut mean = Vec::with_capacity(layout.dim());
    for endpoint in [Endpoint::Early, Endpoint::Final] {
        for stage_sizes in &sizes {
            mean.extend(expectations_for_sizes(effect, plan, endpoint, stage_sizes)?);
        }
    }

    let stage_block = match scale {
        InformationScale::StageWise => Array2::eye(2),
        InformationScale::Cumulative => {
            let n1 = plan.stage1 as f64;
            group_sequential_correlation(&[n1, n1 + plan.stage2 as f64])
        }
    };
    let unit_block = match effect.design {
        DesignKind::TreatmentSelection => compound_symmetry(units, 1.0 / (1.0 + plan.allocation_ratio)),
        DesignKind::SubgroupSelection => nested_population_correlation(plan.tau()?),
    };
    let covariance = kronecker(&endpoint_stage_block(&stage_block, effect.correlation), &unit_block);
    let l = cholesky(&covariance)?;
    let n = layout.dim();
    let mut factor = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for k in 0..=i {
            factor.push(l[[i, k]]);
        }
    }
    Ok(ScoreModel { layout, mean, covariance, factor })
}

impl ScoreModel {
    pub fn layout(&self) -> ScoreLayout {
        self.layout
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &Array2<f64> {
        &self.covariance
    }

    /// Expected statistics of one (endpoint, stage) block.
    pub fn mean_block(&self, endpoint: Endpoint, stage: usize) -> &[f64] {
        let start = self.layout.index(endpoint, stage, 0);
        &self.mean[start..start + self.layout.units]
    }

    /// Writes mean + L·ε into `out`, drawing ε from the stream into `noise`.
    pub fn sample_into(&self, stream: &mut ReplicationStream, noise: &mut [f64], out: &mut [f64]) {
        let n = self.layout.dim();
        debug_assert!(noise.len() >= n && out.len() >= n);
        for e in noise[..n].iter_mut() {
            *e = stream.standard_normal();
        }
        let mut offset = 0;
        for i in 0..n {
            let row = &self.factor[offset..offset + i + 1];
            let mut acc = self.mean[i];
            for (l, e) in row.iter().zip(&noise[..=i]) {
                acc += l * e;
            }
            out[i] = acc;
            offset += i + 1;
        }
    }

    pub fn sample(&self, stream: &mut ReplicationStream) -> StageStatistics {
        let n = self.layout.dim();
        let mut noise = vec![0.0; n];
        let mut values = vec![0.0; n];
        self.sample_into(stream, &mut noise, &mut values);
        StageStatistics { layout: self.layout, values }
    }
}

/// Draw one replication's statistics.
pub fn sample_replication(model: &ScoreModel, stream: &mut ReplicationStream) -> StageStatistics {
    model.sample(stream)
}

/// One replication's sampled statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct StageStatistics {
    layout: ScoreLayout,
    values: Vec<f64>,
}

impl StageStatistics {
    pub fn get(&self, endpoint: Endpoint, stage: usize, unit: usize) -> f64 {
        self.values[self.layout.index(endpoint, stage, unit)]
    }

    pub fn block(&self, endpoint: Endpoint, stage: usize) -> &[f64] {
        let start = self.layout.index(endpoint, stage, 0);
        &self.values[start..start + self.layout.units]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Realized prevalence for one replication.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrevalenceDraw {
    pub tau: f64,
    /// Draws discarded because every or no stage-1 patient was in the subgroup.
    pub redraws: u32,
}

const MAX_PREVALENCE_REDRAWS: u32 = 10_000;

/// Fixed prevalence, or a binomial realization over all stage-1 patients.
pub fn resolve_prevalence(plan: &SampleSizePlan, stream: &mut ReplicationStream) -> Result<PrevalenceDraw> {
    let tau = plan.tau()?;
    if plan.prevalence_fixed {
        return Ok(PrevalenceDraw { tau, redraws: 0 });
    }
    let total = (plan.stage1 as f64 * (1.0 + plan.allocation_ratio)).round() as u64;
    for redraws in 0..MAX_PREVALENCE_REDRAWS {
        let hits = stream.binomial(total, tau);
        if hits > 0 && hits < total {
            return Ok(PrevalenceDraw { tau: hits as f64 / total as f64, redraws });
        }
    }
    Err(Error::InvalidScenario(format!(
        "realized prevalence stayed at 0 or 1 for {MAX_PREVALENCE_REDRAWS} draws"
    )))
}

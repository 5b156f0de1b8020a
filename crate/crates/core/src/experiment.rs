//! The experiment harness: single seeded runs with a replayable manifest,
//! repeated runs aggregated mean ± std in seed order, and the sweep /
//! ablation suites behind the CLI.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{train_risk, train_supervised, RiskKind};
use crate::config::TrainConfig;
use crate::data::{
    load_dataset, make_pu, make_pu_by_count, pu_from_manifest, DataSource, LabeledDataset,
    PUDataset, PuSplitManifest,
};
use crate::error::{Error, Result};
use crate::eval::{auc, error_rate};
use crate::mixpul;
use crate::nn::MlpModel;
use crate::report::{mean_std, EpochRecord, RunReport};
use crate::rn::RnMethod;
use crate::rng::repeat_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mixpul,
    Upu,
    Nnpu,
    Supervised,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixpul" => Ok(Method::Mixpul),
            "upu" => Ok(Method::Upu),
            "nnpu" => Ok(Method::Nnpu),
            "supervised" => Ok(Method::Supervised),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mixpul => "mixpul",
            Method::Upu => "upu",
            Method::Nnpu => "nnpu",
            Method::Supervised => "supervised",
        })
    }
}

/// Everything needed to rerun one run bit-exactly: the data source, the full
/// config (which carries the seed), the PU split, and the mined negatives.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub method: Method,
    pub dataset: String,
    pub label_column: Option<String>,
    pub config: TrainConfig,
    pub pu_split: PuSplitManifest,
    pub rn_indices: Vec<usize>,
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn source(&self) -> DataSource {
        DataSource::parse(&self.dataset, self.label_column.as_deref().unwrap_or("target"))
    }
}

/// One finished run: the model used for evaluation (the EMA teacher for
/// MixPUL, the student for the baselines), its trajectory, the summary row,
/// and the manifest that reruns it.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub model: MlpModel,
    pub report: RunReport,
    pub final_record: EpochRecord,
    pub manifest: RunManifest,
}

/// Build the PU problem a config asks for: an exact labeled-positive count
/// if given, else a class-frequency, else everything labeled (c = 1).
pub fn construct_pu(
    train: &LabeledDataset,
    config: &TrainConfig,
) -> Result<(PUDataset, PuSplitManifest)> {
    if let Some(k) = config.positive_count {
        make_pu_by_count(train, k, config.seed)
    } else {
        make_pu(train, config.class_frequency.unwrap_or(1.0), config.seed)
    }
}

fn dispatch(
    method: Method,
    pu: &PUDataset,
    test: &LabeledDataset,
    config: &TrainConfig,
) -> Result<(MlpModel, RunReport, Vec<usize>)> {
    match method {
        Method::Mixpul => {
            let run = mixpul::train(pu, test, config)?;
            Ok((run.teacher.model().clone(), run.report, run.rn_indices))
        }
        Method::Upu => {
            let run = train_risk(pu, test, config, RiskKind::Upu)?;
            Ok((run.model, run.report, Vec::new()))
        }
        Method::Nnpu => {
            let run = train_risk(pu, test, config, RiskKind::Nnpu)?;
            Ok((run.model, run.report, Vec::new()))
        }
        Method::Supervised => {
            let run = train_supervised(pu, test, config)?;
            Ok((run.model, run.report, Vec::new()))
        }
    }
}

fn finish_run(
    method: Method,
    source: &DataSource,
    config: &TrainConfig,
    pu: &PUDataset,
    pu_split: PuSplitManifest,
    test: &LabeledDataset,
) -> Result<SingleRun> {
    let (model, report, rn_indices) = dispatch(method, pu, test, config)?;
    // zero-epoch runs still get a summary row: the untrained model at chance
    let final_record = match report.final_record() {
        Some(r) => *r,
        None => {
            let scores = model.forward(&test.features)?;
            EpochRecord {
                epoch: 0,
                loss_pn: 0.0,
                loss_u: 0.0,
                loss_pu: 0.0,
                train_error: f64::NAN,
                test_error: error_rate(&scores, &test.labels, 0.5)?,
                test_auc: auc(&scores, &test.labels)?,
            }
        }
    };
    let label_column = match source {
        DataSource::Csv { label_column, .. } => Some(label_column.clone()),
        DataSource::Named(_) => None,
    };
    Ok(SingleRun {
        model,
        report,
        final_record,
        manifest: RunManifest {
            method,
            dataset: source.id(),
            label_column,
            config: config.clone(),
            pu_split,
            rn_indices,
        },
    })
}

/// Load, simulate the PU problem, train, and evaluate one seeded run.
pub fn run_single(
    source: &DataSource,
    method: Method,
    config: &TrainConfig,
    data_dir: &Path,
) -> Result<SingleRun> {
    let (train, test) = load_dataset(source, data_dir, config.seed)?;
    let (pu, pu_split) = construct_pu(&train, config)?;
    finish_run(method, source, config, &pu, pu_split, &test)
}

/// Rerun a manifest. The PU split is rebuilt from the retained indices it
/// records, so the result is bit-identical to the original run.
pub fn replay(manifest: &RunManifest, data_dir: &Path) -> Result<SingleRun> {
    let source = manifest.source();
    let (train, test) = load_dataset(&source, data_dir, manifest.config.seed)?;
    let pu = pu_from_manifest(&train, &manifest.pu_split)?;
    let run = finish_run(
        manifest.method,
        &source,
        &manifest.config,
        &pu,
        manifest.pu_split.clone(),
        &test,
    )?;
    if run.manifest.rn_indices != manifest.rn_indices {
        return Err(Error::InvalidArgument(
            "replay mined a different reliable-negative set than the manifest records".into(),
        ));
    }
    Ok(run)
}

/// Aggregate over repeats. Final metrics are kept per seed, in seed order.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub method: Method,
    pub final_aucs: Vec<f64>,
    pub final_errors: Vec<f64>,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub error_mean: f64,
    pub error_std: f64,
    pub failed: usize,
    pub manifests: Vec<RunManifest>,
}

/// Run `repeats` seeded repetitions (seeds derived from the config's seed by
/// fixed increments) and aggregate mean ± std. A run that errors or
/// diverges is excluded from aggregation with a warning.
pub fn run_experiment(
    source: &DataSource,
    method: Method,
    base_config: &TrainConfig,
    repeats: usize,
    data_dir: &Path,
) -> Result<ExperimentResult> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let mut final_aucs = Vec::new();
    let mut final_errors = Vec::new();
    let mut manifests = Vec::new();
    let mut failed = 0;
    for repeat in 0..repeats {
        let config = TrainConfig {
            seed: repeat_seed(base_config.seed, repeat),
            ..base_config.clone()
        };
        match run_single(source, method, &config, data_dir) {
            Ok(run) if run.report.diverged.is_none() => {
                final_aucs.push(run.final_record.test_auc);
                final_errors.push(run.final_record.test_error);
                manifests.push(run.manifest);
            }
            Ok(run) => {
                log::warn!(
                    "{method} repeat {repeat} diverged ({}); excluded from aggregation",
                    run.report.diverged.unwrap_or_default()
                );
                failed += 1;
            }
            Err(e) => {
                log::warn!("{method} repeat {repeat} failed ({e}); excluded from aggregation");
                failed += 1;
            }
        }
    }
    if final_aucs.is_empty() {
        return Err(Error::Divergence(format!(
            "all {repeats} repeats of {method} failed"
        )));
    }
    let (auc_mean, auc_std) = mean_std(&final_aucs);
    let (error_mean, error_std) = mean_std(&final_errors);
    Ok(ExperimentResult {
        method,
        final_aucs,
        final_errors,
        auc_mean,
        auc_std,
        error_mean,
        error_std,
        failed,
        manifests,
    })
}

/// One row of a sweep or ablation: the varied setting and its aggregate.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub label: String,
    pub value: f64,
    pub result: ExperimentResult,
}

/// Plot-data CSV for a set of sweep points: one series row per point.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out =
        String::from("label,value,method,auc_mean,auc_std,error_mean,error_std,repeats,failed\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.label,
            p.value,
            p.result.method,
            p.result.auc_mean,
            p.result.auc_std,
            p.result.error_mean,
            p.result.error_std,
            p.result.final_aucs.len(),
            p.result.failed
        )
        .unwrap();
    }
    out
}

/// AUC versus labeled-positive budget for each mining strategy.
pub fn rn_ablation(
    source: &DataSource,
    base: &TrainConfig,
    methods: &[RnMethod],
    positive_counts: &[usize],
    repeats: usize,
    data_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::new();
    for &method in methods {
        for &count in positive_counts {
            let config = TrainConfig {
                rn_method: method,
                positive_count: Some(count),
                class_frequency: None,
                ..base.clone()
            };
            points.push(SweepPoint {
                label: format!("{method:?}").to_lowercase(),
                value: count as f64,
                result: run_experiment(source, Method::Mixpul, &config, repeats, data_dir)?,
            });
        }
    }
    Ok(points)
}

/// AUC versus the class-frequency used to simulate label scarcity.
pub fn class_frequency_sweep(
    source: &DataSource,
    method: Method,
    base: &TrainConfig,
    values: &[f64],
    repeats: usize,
    data_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    values
        .iter()
        .map(|&c| {
            let config = TrainConfig {
                class_frequency: Some(c),
                positive_count: None,
                ..base.clone()
            };
            Ok(SweepPoint {
                label: format!("c={c}"),
                value: c,
                result: run_experiment(source, method, &config, repeats, data_dir)?,
            })
        })
        .collect()
}

/// Feed the risk estimators misspecified priors. MixPUL never reads the
/// prior, so its points are identical across multipliers by construction.
pub fn pi_misspecification_sweep(
    source: &DataSource,
    method: Method,
    base: &TrainConfig,
    multipliers: &[f64],
    repeats: usize,
    data_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    multipliers
        .iter()
        .map(|&m| {
            let config = TrainConfig {
                pi_multiplier: m,
                ..base.clone()
            };
            Ok(SweepPoint {
                label: format!("pi_x{m}"),
                value: m,
                result: run_experiment(source, method, &config, repeats, data_dir)?,
            })
        })
        .collect()
}

/// Unsupervised-consistency on/off (`beta` zeroed against the base value).
pub fn mixup_ablation(
    source: &DataSource,
    base: &TrainConfig,
    repeats: usize,
    data_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    [0.0, base.beta]
        .iter()
        .map(|&beta| {
            let config = TrainConfig {
                beta,
                ..base.clone()
            };
            Ok(SweepPoint {
                label: format!("beta={beta}"),
                value: beta,
                result: run_experiment(source, Method::Mixpul, &config, repeats, data_dir)?,
            })
        })
        .collect()
}

/// Ranking-margin on/off (`gamma` zeroed against the base value).
pub fn margin_ablation(
    source: &DataSource,
    base: &TrainConfig,
    repeats: usize,
    data_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    [0.0, base.gamma]
        .iter()
        .map(|&gamma| {
            let config = TrainConfig {
                gamma,
                ..base.clone()
            };
            Ok(SweepPoint {
                label: format!("gamma={gamma}"),
                value: gamma,
                result: run_experiment(source, Method::Mixpul, &config, repeats, data_dir)?,
            })
        })
        .collect()
}

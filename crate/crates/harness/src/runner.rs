//! Trial execution, sweeps and summary statistics.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use pcapp::estimators::{
    cca_top_k, cpca, cpca_pp, pca_from_data, pca_plus, pca_plus_plus, synthesize_fg_bg, Method,
};
use pcapp::factor_model::{build_loadings, sample_pairs, Loadings};
use pcapp::metrics::sin_theta_dist;
use pcapp::{Dataset, Estimate};

use crate::config::{ExperimentConfig, SweepPoint};
use crate::error::{config_error, HarnessError};

/// One `(method, sweep value, trial)` measurement. A failed trial has
/// `dist = NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub preset: String,
    pub method: String,
    pub n: usize,
    pub d: usize,
    pub aspect_ratio: f64,
    pub s: Option<usize>,
    pub trial: usize,
    pub dist: f64,
    pub elapsed_seconds: f64,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.dist.is_nan()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub preset: String,
    pub method: String,
    pub aspect_ratio: f64,
    /// Over successful trials only.
    pub mean_dist: f64,
    pub sd_dist: f64,
    /// Trials run, including failures.
    pub trials: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl SweepResult {
    pub fn row(&self, method: &str, aspect_ratio: f64) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.method == method && (r.aspect_ratio - aspect_ratio).abs() < 1e-12)
    }
}

/// Seed of the dataset used by trial `trial`.
pub fn trial_seed(config: &ExperimentConfig, trial: usize) -> u64 {
    config.base_seed.wrapping_add(trial as u64)
}

fn estimate(
    config: &ExperimentConfig,
    index: usize,
    data: &Dataset,
    d: usize,
) -> pcapp::Result<Estimate> {
    let entry = &config.methods[index];
    let k = config.k_for(entry);
    let s = entry.truncation(k).map(|t| t.resolve(d)).unwrap_or(0);
    let (x, xp) = (&data.x, &data.x_plus);
    match entry.method {
        Method::Pca => pca_from_data(x, k),
        Method::PcaPlus => pca_plus(x, xp, k),
        Method::PcaPlusPlus => pca_plus_plus(x, xp, k, s, entry.eps_rel),
        Method::Cpca => {
            let (f, b) = synthesize_fg_bg(x, xp)?;
            cpca(&f, &b, entry.alpha, k)
        }
        Method::CpcaPlusPlus => {
            let (f, b) = synthesize_fg_bg(x, xp)?;
            cpca_pp(&f, &b, k, s, entry.eps_rel)
        }
        Method::Cca => cca_top_k(x, xp, k, entry.eps_rel),
    }
}

fn measure(
    config: &ExperimentConfig,
    point: &SweepPoint,
    index: usize,
    trial: usize,
    data: &Dataset,
) -> TrialRecord {
    let entry = &config.methods[index];
    let start = Instant::now();
    let dist = estimate(config, index, data, point.d)
        .and_then(|est| sin_theta_dist(&est.basis, &data.truth, config.norm))
        .ok()
        .filter(|v| v.is_finite())
        .unwrap_or(f64::NAN);
    TrialRecord {
        preset: config.name.clone(),
        method: config.label(index),
        n: config.n,
        d: point.d,
        aspect_ratio: point.value,
        s: entry
            .truncation(config.k_for(entry))
            .map(|t| t.resolve(point.d)),
        trial,
        dist,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

fn draw(
    config: &ExperimentConfig,
    loadings: &Loadings<f64>,
    trial: usize,
) -> Result<Dataset, HarnessError> {
    let model = &config.model;
    sample_pairs(
        loadings,
        config.n,
        model.noise_variance,
        model.factor_distribution,
        trial_seed(config, trial),
    )
    .map_err(|e| config_error(e.to_string()))
}

fn loadings_for(point: &SweepPoint) -> Result<Loadings<f64>, HarnessError> {
    build_loadings(&point.spec)
        .map_err(|e| config_error(format!("sweep value {}: {e}", point.value)))
}

/// Runs one method on one trial's dataset. Estimator failures give a NaN
/// record rather than an error.
pub fn run_trial(
    config: &ExperimentConfig,
    aspect_ratio: f64,
    method: usize,
    trial: usize,
) -> Result<TrialRecord, HarnessError> {
    if method >= config.methods.len() {
        return Err(config_error(format!("method index {method} out of range")));
    }
    let point = config.point(aspect_ratio)?;
    let data = draw(config, &loadings_for(&point)?, trial)?;
    Ok(measure(config, &point, method, trial, &data))
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    run_sweep_with_progress(config, |_, _| {})
}

/// As [`run_sweep`], calling `progress(done, total)` after each dataset.
/// Datasets are shared by all methods of a trial and spread over the
/// available cores; the output order does not depend on scheduling.
pub fn run_sweep_with_progress(
    config: &ExperimentConfig,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    let points = config
        .aspect_ratios
        .iter()
        .map(|&v| {
            let p = config.point(v)?;
            let l = loadings_for(&p)?;
            Ok((p, l))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let total = points.len() * config.trials;
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let records = Mutex::new(Vec::with_capacity(total * config.methods.len()));
    let first_error = Mutex::new(None);
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(total.max(1));
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let unit = next.fetch_add(1, Ordering::Relaxed);
                if unit >= total {
                    break;
                }
                let (point, loadings) = &points[unit / config.trials];
                let trial = unit % config.trials;
                match draw(config, loadings, trial) {
                    Ok(data) => {
                        let rows: Vec<TrialRecord> = (0..config.methods.len())
                            .map(|m| measure(config, point, m, trial, &data))
                            .collect();
                        records.lock().unwrap().extend(rows);
                    }
                    Err(e) => {
                        first_error.lock().unwrap().get_or_insert(e);
                        next.store(total, Ordering::Relaxed);
                    }
                }
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut records = records.into_inner().unwrap();
    sort_records(&mut records);
    let mut summary = summarize(&records);
    summary.extend(theory_rows(config, &points));
    sort_summary(&mut summary);
    Ok(SweepResult { records, summary })
}

fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        (&a.preset, &a.method)
            .cmp(&(&b.preset, &b.method))
            .then(a.aspect_ratio.total_cmp(&b.aspect_ratio))
            .then(a.trial.cmp(&b.trial))
    });
}

fn sort_summary(rows: &mut [SummaryRow]) {
    rows.sort_by(|a, b| {
        (&a.preset, &a.method)
            .cmp(&(&b.preset, &b.method))
            .then(a.aspect_ratio.total_cmp(&b.aspect_ratio))
    });
}

fn theory_rows(
    config: &ExperimentConfig,
    points: &[(SweepPoint, Loadings<f64>)],
) -> Vec<SummaryRow> {
    points
        .iter()
        .filter_map(|(p, _)| {
            config.theory(p).map(|dist| SummaryRow {
                preset: config.name.clone(),
                method: "theory".to_string(),
                aspect_ratio: p.value,
                mean_dist: dist,
                sd_dist: 0.0,
                trials: 0,
                failed: 0,
            })
        })
        .collect()
}

/// Mean and sample standard deviation per `(preset, method, aspect_ratio)`,
/// ignoring failed trials.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| {
        a.preset == b.preset && a.method == b.method && a.aspect_ratio == b.aspect_ratio
    }) {
        let ok: Vec<f64> = group
            .iter()
            .map(|r| r.dist)
            .filter(|v| !v.is_nan())
            .collect();
        let count = ok.len() as f64;
        let mean = if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().sum::<f64>() / count
        };
        let sd = if ok.len() < 2 {
            if ok.is_empty() {
                f64::NAN
            } else {
                0.0
            }
        } else {
            (ok.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
        };
        rows.push(SummaryRow {
            preset: group[0].preset.clone(),
            method: group[0].method.clone(),
            aspect_ratio: group[0].aspect_ratio,
            mean_dist: mean,
            sd_dist: sd,
            trials: group.len(),
            failed: group.len() - ok.len(),
        });
    }
    rows
}

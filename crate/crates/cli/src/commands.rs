//! Pipeline stages. Each stage reads its inputs from the output directory or
//! the state cache, writes CSV artifacts atomically and records itself in the
//! run manifest.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use qka::alphatron::{
    classify, default_iterations, empirical_risk, final_iterate, median_smooth, predict, predictions_csv, success_rate, train_qka,
    Class, QkaModel, TrainOptions,
};
use qka::kernel::{build_kernel_matrix, kernel_rows, shots_for_scaled, KernelMode, ShotPlan};
use qka::ptdist::{hardness_window_check, pt_trace_distance};
use qka::rng::{derive_seed, substream};
use qka::shadows::{
    kernel_pca, loo_nearest_centroid_accuracy, sample_shadows, shadow_kernel_matrix, silhouette, ShadowKernelParams,
};
use qka::statevec::{lanczos_ground_state, CompiledHamiltonian, StateVector};

use crate::cache::StateCache;
use crate::config::{ExperimentConfig, Selection};
use crate::error::{CliError, Result};
use crate::io::{fmt, read_rows, write_atomic, Table};
use crate::manifest::RunManifest;
use crate::model;

pub const ENERGIES_CSV: &str = "energies.csv";
pub const LABELS_CSV: &str = "labels.csv";
pub const MODEL_TXT: &str = "model.txt";
pub const RISK_CSV: &str = "risk.csv";
pub const KERNEL_CSV: &str = "kernel_train.csv";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const PTDIST_CSV: &str = "ptdist.csv";
pub const SHADOW_CSV: &str = "shadow_pca.csv";
pub const SUMMARY_CSV: &str = "summary.csv";

const SPLIT_TAG: u64 = 1;
const TRAIN_KERNEL_TAG: u64 = 2;
const VALIDATION_KERNEL_TAG: u64 = 3;
const PREDICT_KERNEL_TAG: u64 = 4;
const SHADOW_TAG: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetName {
    Train,
    Test,
    Shadow,
}

impl SetName {
    pub fn as_str(self) -> &'static str {
        match self {
            SetName::Train => "train",
            SetName::Test => "test",
            SetName::Shadow => "shadow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundstateRow {
    pub set: SetName,
    pub point: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    pub status: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundstateSummary {
    pub rows: Vec<GroundstateRow>,
    pub solved: usize,
    pub cached: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub set: SetName,
    pub point: Vec<f64>,
    pub value: f64,
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub model: QkaModel,
    pub training_risk: f64,
    pub validation_risk: f64,
    pub plan: ShotPlan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictSummary {
    pub points: Vec<Vec<f64>>,
    pub predictions: Vec<f64>,
    pub labels: Vec<f64>,
    pub classes: Vec<Class>,
    pub truth: Vec<Class>,
    pub test_risk: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtRow {
    pub point: Vec<f64>,
    pub distance: f64,
    pub hard: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowSummary {
    pub points: Vec<Vec<f64>>,
    pub coordinates: DMatrix<f64>,
    pub classes: Vec<Class>,
    pub accuracy: f64,
    pub silhouette: f64,
}

/// One experiment: a validated config, an output directory and a state cache.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub cache: StateCache,
}

impl Run {
    /// The cache defaults to `out/cache`.
    pub fn new(config: ExperimentConfig, out: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        let out = out.into();
        let cache = StateCache::new(out.join("cache"));
        Ok(Self { config, out, cache })
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache = StateCache::new(dir);
        self
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out.join(file)
    }

    pub fn points(&self, set: SetName) -> Vec<Vec<f64>> {
        let c = &self.config;
        match set {
            SetName::Train => c.train.points(c.seed),
            SetName::Test => c.test.points(c.seed),
            SetName::Shadow => c.shadow_points().points(c.seed),
        }
    }

    fn sets(&self) -> Vec<(SetName, Vec<Vec<f64>>)> {
        let mut sets = vec![SetName::Train, SetName::Test];
        if self.config.shadow.points.is_some() {
            sets.push(SetName::Shadow);
        }
        sets.into_iter().map(|s| (s, self.points(s))).filter(|(_, p)| !p.is_empty()).collect()
    }

    fn param_header(&self) -> Vec<String> {
        self.config.parameters.clone()
    }

    fn record(&self, stage: &str, start: Instant, artifacts: &[&str], metrics: &[(&str, f64)], complete: bool) -> Result<()> {
        let mut manifest = RunManifest::open(&self.out, &self.config)?;
        let record = manifest.stages.entry(stage.to_string()).or_default();
        record.seconds = start.elapsed().as_secs_f64();
        record.artifacts = artifacts.iter().map(|a| a.to_string()).collect();
        record.metrics = metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        record.complete = complete;
        manifest.save(&self.out)
    }

    pub fn load_states(&self, points: &[Vec<f64>]) -> Result<Vec<StateVector>> {
        points.par_iter().map(|p| self.cache.load(&self.config.state_key(p))).collect()
    }

    /// Solves (or loads) the ground state at `point`. Returns the state and
    /// whether it came from the cache.
    fn ground_state(&self, point: &[f64]) -> Result<(StateVector, f64, f64, bool)> {
        let key = self.config.state_key(point);
        let h = model::hamiltonian(&self.config, point)?;
        if self.cache.contains(&key) {
            let psi = self.cache.load(&key)?;
            let hpsi = CompiledHamiltonian::new(&h).apply(psi.amplitudes())?;
            let energy = qka::statevec::dot(psi.amplitudes(), &hpsi).re;
            let residual = hpsi
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| (a - b * energy).norm_sqr())
                .sum::<f64>()
                .sqrt();
            return Ok((psi, energy, residual, true));
        }
        let gs = lanczos_ground_state(&h, &self.config.solver.options())?;
        self.cache.store(&key, &gs.state)?;
        Ok((gs.state, gs.energy, gs.residual, false))
    }

    /// Solves every configured point, skipping cached ones. Failed points are
    /// reported in the CSV and turn the result into [`CliError::Incomplete`].
    pub fn groundstate(&self) -> Result<GroundstateSummary> {
        let start = Instant::now();
        let sets = self.sets();
        let mut unique: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (_, points) in &sets {
            for p in points {
                unique.entry(self.config.state_key(p)).or_insert_with(|| p.clone());
            }
        }
        let results: HashMap<String, std::result::Result<(f64, f64, bool), String>> = unique
            .par_iter()
            .map(|(key, p)| {
                let r = self.ground_state(p).map(|(_, e, r, cached)| (e, r, cached)).map_err(|e| e.to_string());
                (key.clone(), r)
            })
            .collect();
        let mut header = vec!["set".to_string(), "index".to_string()];
        header.extend(self.param_header());
        header.extend(["energy", "residual", "status", "key"].map(String::from));
        let mut table = Table::new(&header)?;
        let mut rows = Vec::new();
        for (set, points) in &sets {
            for (i, p) in points.iter().enumerate() {
                let key = self.config.state_key(p);
                let (energy, residual, status) = match &results[&key] {
                    Ok((e, r, true)) => (*e, *r, "cached"),
                    Ok((e, r, false)) => (*e, *r, "solved"),
                    Err(_) => (f64::NAN, f64::NAN, "failed"),
                };
                let mut fields = vec![set.as_str().to_string(), i.to_string()];
                fields.extend(p.iter().map(|v| fmt(*v)));
                fields.extend([fmt(energy), fmt(residual), status.to_string(), key]);
                table.row(&fields)?;
                rows.push(GroundstateRow { set: *set, point: p.clone(), energy, residual, status });
            }
        }
        table.save(&self.path(ENERGIES_CSV))?;
        let summary = GroundstateSummary {
            rows,
            solved: results.values().filter(|r| matches!(r, Ok((_, _, false)))).count(),
            cached: results.values().filter(|r| matches!(r, Ok((_, _, true)))).count(),
            failed: results.values().filter(|r| r.is_err()).count(),
        };
        let max_residual = summary.rows.iter().map(|r| r.residual).filter(|r| r.is_finite()).fold(0.0, f64::max);
        self.record(
            "groundstate",
            start,
            &[ENERGIES_CSV],
            &[
                ("points", unique.len() as f64),
                ("solved", summary.solved as f64),
                ("cached", summary.cached as f64),
                ("failed", summary.failed as f64),
                ("max_residual", max_residual),
            ],
            summary.failed == 0,
        )?;
        if summary.failed > 0 {
            for (key, r) in &results {
                if let Err(e) = r {
                    eprintln!("ground state {key} failed: {e}");
                }
            }
            return Err(CliError::Incomplete { failed: summary.failed, total: unique.len() });
        }
        Ok(summary)
    }

    /// Evaluates the configured observable on every cached state.
    pub fn label(&self) -> Result<Vec<LabelRow>> {
        let start = Instant::now();
        let mut rows = Vec::new();
        for (set, points) in self.sets() {
            let states = self.load_states(&points)?;
            let values = states.par_iter().map(|psi| model::observable(&self.config, psi)).collect::<Result<Vec<_>>>()?;
            for (p, value) in points.into_iter().zip(values) {
                rows.push(LabelRow { set, point: p, value, label: model::label(&self.config, value)? });
            }
        }
        let mut header = vec!["set".to_string(), "index".to_string()];
        header.extend(self.param_header());
        header.extend(["value", "label"].map(String::from));
        let mut table = Table::new(&header)?;
        let mut index: HashMap<SetName, usize> = HashMap::new();
        for r in &rows {
            let i = index.entry(r.set).or_default();
            let mut fields = vec![r.set.as_str().to_string(), i.to_string()];
            fields.extend(r.point.iter().map(|v| fmt(*v)));
            fields.extend([fmt(r.value), fmt(r.label)]);
            table.row(&fields)?;
            *i += 1;
        }
        table.save(&self.path(LABELS_CSV))?;
        self.record("label", start, &[LABELS_CSV], &[("points", rows.len() as f64)], true)?;
        Ok(rows)
    }

    /// Label rows of one set, read back from `labels.csv`.
    pub fn read_labels(&self, set: SetName) -> Result<Vec<LabelRow>> {
        let path = self.path(LABELS_CSV);
        if !path.is_file() {
            return Err(CliError::MissingInput { path, hint: "run `qka label` first".into() });
        }
        let (header, rows) = read_rows(&path)?;
        let d = self.config.parameters.len();
        if header.len() != d + 4 {
            return Err(CliError::config(format!("{} does not match the configured parameters", path.display())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::config(format!("bad number {s:?} in {}", path.display())));
        let mut out = Vec::new();
        for r in rows.iter().filter(|r| r[0] == set.as_str()) {
            let point = r[2..2 + d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            out.push(LabelRow { set, point, value: num(&r[2 + d])?, label: num(&r[3 + d])? });
        }
        let expected = self.points(set);
        if out.len() != expected.len() || out.iter().zip(&expected).any(|(r, p)| r.point.iter().zip(p).any(|(a, b)| (a - b).abs() > 1e-12)) {
            return Err(CliError::MissingInput { path, hint: format!("{} labels are stale; rerun `qka label`", set.as_str()) });
        }
        Ok(out)
    }

    pub fn shot_plan(&self) -> Result<ShotPlan> {
        let k = &self.config.kernel;
        Ok(shots_for_scaled(self.points(SetName::Train).len().max(1), k.delta, k.multiplier)?)
    }

    fn kernel_mode(&self) -> KernelMode {
        self.config.kernel.mode.into()
    }

    /// Splits training indices into `(fit, validation)`.
    fn split(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let frac = self.config.qka.validation_fraction;
        let n_val = if n < 2 || frac == 0.0 { 0 } else { ((frac * n as f64).round() as usize).clamp(1, n - 1) };
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut substream(self.config.seed, &[SPLIT_TAG]));
        let mut val = idx[..n_val].to_vec();
        let mut fit = idx[n_val..].to_vec();
        val.sort_unstable();
        fit.sort_unstable();
        (fit, val)
    }

    pub fn train(&self) -> Result<TrainSummary> {
        let start = Instant::now();
        let labels = self.read_labels(SetName::Train)?;
        if labels.is_empty() {
            return Err(CliError::config("no training points configured"));
        }
        let selection = self.config.qka.selection;
        let (fit_idx, val_idx) = match selection {
            Selection::Validation => self.split(labels.len()),
            Selection::Test | Selection::Final => ((0..labels.len()).collect(), Vec::new()),
        };
        let fit: Vec<&LabelRow> = fit_idx.iter().map(|&i| &labels[i]).collect();
        let validation: Vec<LabelRow> = match selection {
            Selection::Test => self.read_labels(SetName::Test)?,
            Selection::Validation if !val_idx.is_empty() => val_idx.iter().map(|&i| labels[i].clone()).collect(),
            _ => fit.iter().map(|r| (*r).clone()).collect(),
        };
        if validation.is_empty() {
            return Err(CliError::config("selection on the test set needs test points"));
        }
        let fit_points: Vec<Vec<f64>> = fit.iter().map(|r| r.point.clone()).collect();
        let val_points: Vec<Vec<f64>> = validation.iter().map(|r| r.point.clone()).collect();
        let fit_states = self.load_states(&fit_points)?;
        let val_states = self.load_states(&val_points)?;
        let plan = self.shot_plan()?;
        let mode = self.kernel_mode();
        let seed = self.config.seed;
        let k = build_kernel_matrix(&fit_states, mode, &plan, derive_seed(seed, &[TRAIN_KERNEL_TAG]))?;
        let k_val = if selection == Selection::Final {
            (0..fit.len()).map(|i| k.entries.column(i).iter().copied().collect()).collect()
        } else {
            kernel_rows(&fit_states, &val_states, mode, &plan, derive_seed(seed, &[VALIDATION_KERNEL_TAG]))?
        };
        let b: Vec<f64> = fit.iter().map(|r| r.label).collect();
        let y_val: Vec<f64> = validation.iter().map(|r| r.label).collect();
        let iterations = self
            .config
            .qka
            .iterations
            .unwrap_or_else(|| default_iterations(labels.len(), self.config.kernel.delta));
        let options = TrainOptions { lambda: self.config.qka.lambda, iterations };
        let mut model = train_qka(&k.entries, &b, options, &k_val, &y_val)?;
        if selection == Selection::Final {
            model.alpha = final_iterate(&k.entries, &b, options)?;
            model.selected_iteration = iterations;
        }
        model.training_params = fit_points;
        let fitted: Vec<f64> = (0..b.len())
            .map(|i| k.entries.column(i).iter().zip(&model.alpha).map(|(k, a)| k * a).sum())
            .collect();
        let training_risk = empirical_risk(&fitted, &b)?;
        let validation_risk = model.validation_risk[model.selected_iteration - 1];

        write_atomic(&self.path(MODEL_TXT), model.to_text().as_bytes())?;
        let mut risk = Table::new(&["iteration", "validation_risk"])?;
        for (t, r) in model.validation_risk.iter().enumerate() {
            risk.row(&[(t + 1).to_string(), fmt(*r)])?;
        }
        risk.save(&self.path(RISK_CSV))?;
        write_atomic(&self.path(KERNEL_CSV), k.to_csv(self.config.n, seed).as_bytes())?;
        self.record(
            "train",
            start,
            &[MODEL_TXT, RISK_CSV, KERNEL_CSV],
            &[
                ("n_train", labels.len() as f64),
                ("n_fit", b.len() as f64),
                ("n_validation", y_val.len() as f64),
                ("iterations", iterations as f64),
                ("selected_iteration", model.selected_iteration as f64),
                ("training_risk", training_risk),
                ("validation_risk", validation_risk),
                ("shots_per_entry", k.shots_per_entry as f64),
                ("total_budget", plan.total_budget as f64),
            ],
            true,
        )?;
        Ok(TrainSummary { model, training_risk, validation_risk, plan })
    }

    pub fn read_model(&self) -> Result<QkaModel> {
        let path = self.path(MODEL_TXT);
        let text = std::fs::read_to_string(&path).map_err(|_| CliError::MissingInput { path, hint: "run `qka train` first".into() })?;
        Ok(text.parse()?)
    }

    pub fn predict(&self) -> Result<PredictSummary> {
        let start = Instant::now();
        let model = self.read_model()?;
        let test = self.read_labels(SetName::Test)?;
        if test.is_empty() {
            return Err(CliError::config("no test points configured"));
        }
        let train_states = self.load_states(&model.training_params)?;
        let points: Vec<Vec<f64>> = test.iter().map(|r| r.point.clone()).collect();
        let test_states = self.load_states(&points)?;
        let rows = kernel_rows(
            &train_states,
            &test_states,
            self.kernel_mode(),
            &self.shot_plan()?,
            derive_seed(self.config.seed, &[PREDICT_KERNEL_TAG]),
        )?;
        let raw = rows.iter().map(|k| predict(&model, k)).collect::<qka::Result<Vec<_>>>()?;
        let predictions = match self.config.test.grid_shape() {
            Some((r, c)) if self.config.qka.smoothing => median_smooth(&raw, r, c)?,
            _ => raw,
        };
        let labels: Vec<f64> = test.iter().map(|r| r.label).collect();
        let t = self.config.thresholds;
        let classes = predictions.iter().map(|&p| classify(p, t.t1, t.t2)).collect::<qka::Result<Vec<_>>>()?;
        let truth = labels.iter().map(|&l| classify(l, t.t1, t.t2)).collect::<qka::Result<Vec<_>>>()?;
        let test_risk = empirical_risk(&predictions, &labels)?;
        let rate = success_rate(&classes, &truth)?;
        let names: Vec<&str> = self.config.parameters.iter().map(String::as_str).collect();
        write_atomic(
            &self.path(PREDICTIONS_CSV),
            predictions_csv(&names, &points, &predictions, &labels, &classes)?.as_bytes(),
        )?;
        let misclassified = classes.iter().zip(&truth).filter(|(a, b)| a != b).count();
        self.record(
            "predict",
            start,
            &[PREDICTIONS_CSV],
            &[
                ("points", points.len() as f64),
                ("test_risk", test_risk),
                ("success_rate", rate),
                ("misclassified", misclassified as f64),
            ],
            true,
        )?;
        Ok(PredictSummary { points, predictions, labels, classes, truth, test_risk, success_rate: rate })
    }

    /// Porter-Thomas distance of the ground state at every test point,
    /// solving missing states on the way.
    pub fn ptdist(&self) -> Result<Vec<PtRow>> {
        let start = Instant::now();
        let points = self.points(SetName::Test);
        let rows = points
            .par_iter()
            .map(|p| {
                let (psi, ..) = self.ground_state(p)?;
                let distance = pt_trace_distance(&psi, self.config.bins)?;
                Ok(PtRow { point: p.clone(), distance, hard: hardness_window_check(distance, self.config.n) })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut header = self.param_header();
        header.extend(["pt_distance", "hardness_window"].map(String::from));
        let mut table = Table::new(&header)?;
        for r in &rows {
            let mut fields: Vec<String> = r.point.iter().map(|v| fmt(*v)).collect();
            fields.extend([fmt(r.distance), r.hard.to_string()]);
            table.row(&fields)?;
        }
        table.save(&self.path(PTDIST_CSV))?;
        let mean = rows.iter().map(|r| r.distance).sum::<f64>() / rows.len().max(1) as f64;
        let hard = rows.iter().filter(|r| r.hard).count();
        self.record(
            "ptdist",
            start,
            &[PTDIST_CSV],
            &[("points", rows.len() as f64), ("mean_distance", mean), ("in_hardness_window", hard as f64)],
            true,
        )?;
        Ok(rows)
    }

    /// Shadow-kernel PCA of the shadow points, scored by leave-one-out
    /// nearest-centroid accuracy against the observable's classes.
    pub fn shadow_baseline(&self) -> Result<ShadowSummary> {
        let start = Instant::now();
        let spec = &self.config.shadow;
        let points = self.points(SetName::Shadow);
        if points.is_empty() {
            return Err(CliError::config("no shadow points configured"));
        }
        let states = self.load_states(&points)?;
        let t = self.config.thresholds;
        let mut labels = Vec::with_capacity(states.len());
        let mut classes = Vec::with_capacity(states.len());
        for psi in &states {
            let label = model::label(&self.config, model::observable(&self.config, psi)?)?;
            labels.push(label);
            classes.push(classify(label, t.t1, t.t2)?);
        }
        let records = states
            .par_iter()
            .enumerate()
            .map(|(i, psi)| sample_shadows(psi, spec.snapshots, derive_seed(self.config.seed, &[SHADOW_TAG, i as u64])))
            .collect::<qka::Result<Vec<_>>>()?;
        let k = shadow_kernel_matrix(&records, ShadowKernelParams { tau: spec.tau, gamma: spec.gamma })?;
        let pca = kernel_pca(&k, spec.components.min(points.len()))?;
        let class_index: Vec<usize> = classes.iter().map(|c| class_id(*c)).collect();
        let accuracy = loo_nearest_centroid_accuracy(&pca.coordinates, &class_index, 3);
        let sil = silhouette(&pca.coordinates, &class_index);
        let mut header = self.param_header();
        header.extend((1..=pca.coordinates.ncols()).map(|c| format!("pc{c}")));
        header.extend(["label", "class"].map(String::from));
        let mut table = Table::new(&header)?;
        for (i, p) in points.iter().enumerate() {
            let mut fields: Vec<String> = p.iter().map(|v| fmt(*v)).collect();
            fields.extend(pca.coordinates.row(i).iter().map(|v| fmt(*v)));
            fields.extend([fmt(labels[i]), classes[i].to_string()]);
            table.row(&fields)?;
        }
        table.save(&self.path(SHADOW_CSV))?;
        self.record(
            "shadow-baseline",
            start,
            &[SHADOW_CSV],
            &[
                ("points", points.len() as f64),
                ("snapshots", spec.snapshots as f64),
                ("baseline_success_rate", accuracy),
                ("silhouette", sil),
            ],
            true,
        )?;
        Ok(ShadowSummary { points, coordinates: pca.coordinates, classes, accuracy, silhouette: sil })
    }

    /// Collects every stage metric into `summary.csv`.
    pub fn report(&self) -> Result<Vec<(String, String, f64)>> {
        let manifest = RunManifest::read(&self.out).map_err(|_| CliError::MissingInput {
            path: self.path(crate::manifest::MANIFEST_FILE),
            hint: "no stage has run in this output directory".into(),
        })?;
        let rows: Vec<(String, String, f64)> = manifest
            .stages
            .iter()
            .flat_map(|(stage, rec)| rec.metrics.iter().map(move |(k, v)| (stage.clone(), k.clone(), *v)))
            .collect();
        let mut table = Table::new(&["stage", "metric", "value"])?;
        for (s, m, v) in &rows {
            table.row(&[s.clone(), m.clone(), fmt(*v)])?;
        }
        table.save(&self.path(SUMMARY_CSV))?;
        Ok(rows)
    }
}

fn class_id(c: Class) -> usize {
    match c {
        Class::C1 => 0,
        Class::C2 => 1,
        Class::Reject => 2,
    }
}

/// Whether every artifact listed in the manifest exists.
pub fn artifacts_present(out: &Path) -> Result<bool> {
    let manifest = RunManifest::read(out)?;
    Ok(manifest.stages.values().flat_map(|s| &s.artifacts).all(|a| out.join(a).is_file()))
}

//! Experiment configuration: a JSON document with every default embedded.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Xxz,
    Cluster,
    BondXxz,
    Tfim,
}

impl ModelKind {
    pub fn coupling_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Xxz => &["j1", "j2", "g"],
            ModelKind::Cluster => &["j", "h1", "h2"],
            ModelKind::BondXxz => &["j1", "j2", "delta"],
            ModelKind::Tfim => &["w", "j", "f"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Fixed couplings. Swept parameters override entries of the same name.
    #[serde(default)]
    pub couplings: BTreeMap<String, f64>,
    #[serde(default)]
    pub periodic: bool,
    /// Lattice rows for `tfim`; the column count is `n / rows`.
    #[serde(default = "one")]
    pub rows: usize,
    /// Magnitude of the symmetry-breaking edge fields added before solving.
    #[serde(default)]
    pub pinning: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub count: usize,
}

/// A set of points in the swept-parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSet {
    Points(Vec<Vec<f64>>),
    /// Cartesian product, first axis slowest.
    Grid(Vec<Axis>),
    /// Evenly spaced points on straight segments, endpoints included.
    Segments(Vec<Segment>),
    /// Uniform draws from a box, seeded by the experiment seed.
    Random { low: Vec<f64>, high: Vec<f64>, count: usize },
}

impl Default for PointSet {
    fn default() -> Self {
        PointSet::Points(Vec::new())
    }
}

const RANDOM_POINTS_TAG: u64 = 0x5041_5241;

impl PointSet {
    pub fn points(&self, seed: u64) -> Vec<Vec<f64>> {
        match self {
            PointSet::Points(p) => p.clone(),
            PointSet::Grid(axes) => axes.iter().fold(vec![Vec::new()], |acc, axis| {
                acc.iter()
                    .flat_map(|prefix| {
                        axis.values().into_iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push(v);
                            p
                        })
                    })
                    .collect()
            }),
            PointSet::Segments(segments) => segments
                .iter()
                .flat_map(|s| {
                    let ts = linspace(0.0, 1.0, s.count);
                    ts.into_iter()
                        .map(|t| s.from.iter().zip(&s.to).map(|(a, b)| a + t * (b - a)).collect())
                        .collect::<Vec<Vec<f64>>>()
                })
                .collect(),
            PointSet::Random { low, high, count } => {
                use rand::Rng;
                let mut rng = qka::rng::substream(seed, &[RANDOM_POINTS_TAG]);
                (0..*count)
                    .map(|_| low.iter().zip(high).map(|(l, h)| l + (h - l) * rng.random::<f64>()).collect())
                    .collect()
            }
        }
    }

    /// `(rows, cols)` for two-axis grids, used by neighbourhood smoothing.
    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        match self {
            PointSet::Grid(axes) if axes.len() == 2 => Some((axes[0].count, axes[1].count)),
            _ => None,
        }
    }

    fn dimensions(&self) -> Vec<usize> {
        match self {
            PointSet::Points(p) => p.iter().map(Vec::len).collect(),
            PointSet::Grid(axes) => vec![axes.len()],
            PointSet::Segments(s) => s.iter().flat_map(|s| [s.from.len(), s.to.len()]).collect(),
            PointSet::Random { low, high, .. } => vec![low.len(), high.len()],
        }
    }

    fn counts(&self) -> Vec<usize> {
        match self {
            PointSet::Points(_) => Vec::new(),
            PointSet::Grid(axes) => axes.iter().map(|a| a.count).collect(),
            PointSet::Segments(s) => s.iter().map(|s| s.count).collect(),
            PointSet::Random { count, .. } => vec![*count],
        }
    }
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    MagnetizationX,
    StringOrder,
    Reflection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    /// Observable range mapped onto labels in `[0, 1]`.
    pub lo: f64,
    pub hi: f64,
    /// String-order endpoints; defaults to `(0, n-2)`.
    #[serde(default)]
    pub endpoints: Option<(usize, usize)>,
    /// Reflection interval `(start, end, split)`; defaults by chain length.
    #[serde(default)]
    pub interval: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelModeSpec {
    Exact,
    Estimated,
}

impl From<KernelModeSpec> for qka::kernel::KernelMode {
    fn from(m: KernelModeSpec) -> Self {
        match m {
            KernelModeSpec::Exact => qka::kernel::KernelMode::Exact,
            KernelModeSpec::Estimated => qka::kernel::KernelMode::Estimated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSpec {
    pub mode: KernelModeSpec,
    /// Scales the `N^{5/2}` total shot budget.
    pub multiplier: f64,
    pub delta: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            mode: KernelModeSpec::Exact,
            multiplier: 1.0,
            delta: qka::alphatron::DEFAULT_DELTA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Select the iterate on a held-out split of the training points.
    Validation,
    /// Select on the test set, as Algorithm 1 is literally written.
    Test,
    /// Keep the iterate after exactly `iterations` updates, fitting all
    /// training points. The risk curve is then the training risk.
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QkaSpec {
    pub lambda: f64,
    /// `None` uses `ceil(sqrt(N / ln(1/δ)))`.
    pub iterations: Option<usize>,
    pub validation_fraction: f64,
    pub selection: Selection,
    /// 3×3 median smoothing of grid predictions before thresholding.
    pub smoothing: bool,
}

impl Default for QkaSpec {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            iterations: None,
            validation_fraction: 0.25,
            selection: Selection::Validation,
            smoothing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub t1: f64,
    pub t2: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { t1: 0.5, t2: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShadowSpec {
    pub snapshots: usize,
    pub tau: f64,
    pub gamma: f64,
    pub components: usize,
    /// Points to embed; defaults to the test set.
    pub points: Option<PointSet>,
}

impl Default for ShadowSpec {
    fn default() -> Self {
        Self {
            snapshots: qka::shadows::DEFAULT_SNAPSHOTS,
            tau: 1.0,
            gamma: 1.0,
            components: 2,
            points: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iter: usize,
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = qka::statevec::LanczosOptions::default();
        Self {
            tol: d.tol,
            max_iter: d.max_iter,
            krylov_dim: d.krylov_dim,
            seed: d.seed,
        }
    }
}

impl SolverSpec {
    pub fn options(&self) -> qka::statevec::LanczosOptions {
        qka::statevec::LanczosOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            krylov_dim: self.krylov_dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelSpec,
    pub n: usize,
    /// Names of the swept couplings, in point-coordinate order.
    pub parameters: Vec<String>,
    #[serde(default)]
    pub train: PointSet,
    #[serde(default)]
    pub test: PointSet,
    pub observable: ObservableSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub qka: QkaSpec,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub shadow: ShadowSpec,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

fn default_bins() -> usize {
    qka::ptdist::DEFAULT_BINS
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.model.kind.coupling_names();
        for p in self.parameters.iter().chain(self.model.couplings.keys()) {
            if !names.contains(&p.as_str()) {
                return Err(CliError::config(format!("unknown coupling {p:?} for {:?}; expected {names:?}", self.model.kind)));
            }
        }
        for name in names {
            if !self.model.couplings.contains_key(*name) && !self.parameters.iter().any(|p| p == name) {
                return Err(CliError::config(format!("coupling {name:?} is neither fixed nor swept")));
            }
        }
        let d = self.parameters.len();
        let mut sets = vec![("train", &self.train), ("test", &self.test)];
        if let Some(points) = &self.shadow.points {
            sets.push(("shadow", points));
        }
        for (label, set) in sets {
            if set.dimensions().iter().any(|&k| k != d) {
                return Err(CliError::config(format!("{label} points must have {d} coordinates")));
            }
            if set.counts().contains(&0) {
                return Err(CliError::config(format!("{label} grid counts must be at least 1")));
            }
        }
        if self.n > qka::statevec::MAX_SITES || self.n < 2 {
            return Err(CliError::config(format!("n = {} outside 2..={}", self.n, qka::statevec::MAX_SITES)));
        }
        if self.model.kind == ModelKind::Tfim && (self.model.rows == 0 || !self.n.is_multiple_of(self.model.rows)) {
            return Err(CliError::config(format!("{} rows do not divide n = {}", self.model.rows, self.n)));
        }
        if self.observable.hi <= self.observable.lo {
            return Err(CliError::config("observable range needs lo < hi"));
        }
        if self.thresholds.t2 > self.thresholds.t1 {
            return Err(CliError::config("thresholds need t2 <= t1"));
        }
        let q = &self.qka;
        if !(0.0..1.0).contains(&q.validation_fraction) || q.lambda <= 0.0 || q.iterations == Some(0) {
            return Err(CliError::config("qka needs lambda > 0, iterations >= 1 and validation_fraction in [0, 1)"));
        }
        if self.kernel.multiplier <= 0.0 || !(0.0..1.0).contains(&self.kernel.delta) || self.kernel.delta == 0.0 {
            return Err(CliError::config("kernel needs multiplier > 0 and delta in (0, 1)"));
        }
        if self.shadow.snapshots == 0 || self.shadow.tau <= 0.0 || self.shadow.gamma <= 0.0 {
            return Err(CliError::config("shadow needs snapshots >= 1 and positive tau, gamma"));
        }
        if self.bins < qka::ptdist::MIN_BINS {
            return Err(CliError::config(format!("bins must be at least {}", qka::ptdist::MIN_BINS)));
        }
        Ok(())
    }

    /// All couplings at one point of the swept space.
    pub fn couplings_at(&self, point: &[f64]) -> BTreeMap<String, f64> {
        let mut c = self.model.couplings.clone();
        for (name, v) in self.parameters.iter().zip(point) {
            c.insert(name.clone(), *v);
        }
        c
    }

    pub fn shadow_points(&self) -> &PointSet {
        self.shadow.points.as_ref().unwrap_or(&self.test)
    }

    /// Hex SHA-256 of the full configuration.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    /// Cache key of the ground state at `point`. It covers everything that
    /// changes the Hamiltonian or the solver output.
    pub fn state_key(&self, point: &[f64]) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            kind: ModelKind,
            couplings: BTreeMap<String, f64>,
            periodic: bool,
            rows: usize,
            pinning: f64,
            n: usize,
            solver: &'a SolverSpec,
        }
        let key = Key {
            kind: self.model.kind,
            couplings: self.couplings_at(point),
            periodic: self.model.periodic,
            rows: self.model.rows,
            pinning: self.model.pinning,
            n: self.n,
            solver: &self.solver,
        };
        sha256_hex(serde_json::to_string(&key).expect("key serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Xxz,
    Spt,
    BondXxz,
    Ptdist,
}

impl std::str::FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xxz" => Ok(Preset::Xxz),
            "spt" => Ok(Preset::Spt),
            "bond-xxz" => Ok(Preset::BondXxz),
            "ptdist" => Ok(Preset::Ptdist),
            _ => Err(CliError::config(format!("unknown preset {s:?}"))),
        }
    }
}

fn couplings(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn axis(min: f64, max: f64, count: usize) -> Axis {
    Axis { min, max, count }
}

impl Preset {
    pub fn config(self) -> ExperimentConfig {
        let base = |name: &str, model: ModelSpec, parameters: &[&str], observable: ObservableSpec| ExperimentConfig {
            name: name.into(),
            model,
            n: 12,
            parameters: parameters.iter().map(|s| s.to_string()).collect(),
            train: PointSet::default(),
            test: PointSet::default(),
            observable,
            kernel: KernelSpec::default(),
            qka: QkaSpec::default(),
            thresholds: Thresholds::default(),
            shadow: ShadowSpec::default(),
            bins: default_bins(),
            solver: SolverSpec::default(),
            seed: 0,
        };
        match self {
            Preset::Xxz => ExperimentConfig {
                train: PointSet::Random { low: vec![0.0], high: vec![2.0], count: 15 },
                test: PointSet::Grid(vec![axis(0.0, 0.067 * 30.0, 31)]),
                qka: QkaSpec { iterations: Some(400), selection: Selection::Final, ..QkaSpec::default() },
                ..base(
                    "xxz",
                    ModelSpec {
                        kind: ModelKind::Xxz,
                        couplings: couplings(&[("j1", 0.2), ("j2", 1.0)]),
                        periodic: true,
                        rows: 1,
                        pinning: 1e-2,
                    },
                    &["g"],
                    ObservableSpec { kind: ObservableKind::MagnetizationX, lo: 0.0, hi: 1.0, endpoints: None, interval: None },
                )
            },
            Preset::Spt => ExperimentConfig {
                train: PointSet::Segments(vec![Segment { from: vec![-1.5, 0.0], to: vec![1.5, 0.0], count: 40 }]),
                test: PointSet::Grid(vec![axis(-1.5, 1.5, 32), axis(0.0, 1.6, 32)]),
                kernel: KernelSpec { mode: KernelModeSpec::Estimated, multiplier: 10.0, ..KernelSpec::default() },
                qka: QkaSpec { iterations: Some(400), ..QkaSpec::default() },
                shadow: ShadowSpec {
                    points: Some(PointSet::Segments(vec![Segment { from: vec![0.4, 0.0], to: vec![0.4, 1.6], count: 30 }])),
                    ..ShadowSpec::default()
                },
                ..base(
                    "spt",
                    ModelSpec {
                        kind: ModelKind::Cluster,
                        couplings: couplings(&[("j", 1.0)]),
                        periodic: false,
                        rows: 1,
                        pinning: 1e-2,
                    },
                    &["h1", "h2"],
                    ObservableSpec { kind: ObservableKind::StringOrder, lo: 0.0, hi: 1.0, endpoints: None, interval: None },
                )
            },
            Preset::BondXxz => ExperimentConfig {
                train: PointSet::Segments(vec![
                    Segment { from: vec![0.1, 0.5], to: vec![3.0, 0.5], count: 30 },
                    Segment { from: vec![0.1, 3.0], to: vec![3.0, 3.0], count: 30 },
                ]),
                test: PointSet::Grid(vec![axis(0.1, 3.0, 30), axis(0.0, 3.5, 30)]),
                qka: QkaSpec { iterations: Some(400), ..QkaSpec::default() },
                thresholds: Thresholds { t1: 2.0 / 3.0, t2: 1.0 / 3.0 },
                ..base(
                    "bond-xxz",
                    ModelSpec {
                        kind: ModelKind::BondXxz,
                        couplings: couplings(&[("j2", 1.0)]),
                        periodic: false,
                        rows: 1,
                        pinning: 1e-2,
                    },
                    &["j1", "delta"],
                    ObservableSpec { kind: ObservableKind::Reflection, lo: -1.0, hi: 1.0, endpoints: None, interval: None },
                )
            },
            Preset::Ptdist => ExperimentConfig {
                n: 10,
                test: PointSet::Grid(vec![axis(0.0, 2.0, 5), axis(0.5, 1.5, 3)]),
                ..base(
                    "ptdist",
                    ModelSpec {
                        kind: ModelKind::Tfim,
                        couplings: couplings(&[("w", 1.0)]),
                        periodic: false,
                        rows: 2,
                        pinning: 0.0,
                    },
                    &["j", "f"],
                    ObservableSpec { kind: ObservableKind::MagnetizationX, lo: -1.0, hi: 1.0, endpoints: None, interval: None },
                )
            },
        }
    }
}

//! Fidelity kernel `Q(x, x′) = |⟨ψ(x)|ψ(x′)⟩|²`, exact or estimated with
//! simulated destructive SWAP-test shots.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::rng;
use crate::statevec::{dot, StateVector};

/// Stream tag separating kernel-vector draws from kernel-matrix draws.
const VECTOR_TAG: u64 = 0x7665_6374;

pub fn exact_kernel(a: &StateVector, b: &StateVector) -> Result<f64> {
    check_len(a.n(), b.n())?;
    Ok(dot(a.amplitudes(), b.amplitudes()).norm_sqr().clamp(0.0, 1.0))
}

/// Mean of `shots` outcomes in `{+1, −1}` with `Pr(+1) = (1 + q)/2`.
pub fn swap_test_mean(q: f64, shots: u64, rng: &mut impl Rng) -> f64 {
    let p = ((1.0 + q) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p).expect("probability in range").sample(rng);
    (2.0 * plus as f64 - shots as f64) / shots as f64
}

/// [`swap_test_mean`] clamped to `[0, 1]`.
pub fn swap_test_from_fidelity(q: f64, shots: u64, rng: &mut impl Rng) -> f64 {
    swap_test_mean(q, shots, rng).clamp(0.0, 1.0)
}

pub fn swap_test_estimate(a: &StateVector, b: &StateVector, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let q = exact_kernel(a, b)?;
    Ok(swap_test_from_fidelity(q, shots, &mut rng::stream(seed)))
}

/// Deviation `t` such that a `shots`-sample mean of ±1 outcomes misses its
/// expectation by more than `t` with probability at most `delta` (Hoeffding).
pub fn hoeffding_radius(shots: u64, delta: f64) -> f64 {
    (2.0 * (2.0 / delta).ln() / shots as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotPlan {
    pub total_budget: u64,
    pub per_entry: u64,
    pub delta: f64,
}

/// Budget `ceil(N^{5/2})` split evenly over the `N(N−1)/2` off-diagonal
/// entries.
pub fn shots_for(n: usize, delta: f64) -> Result<ShotPlan> {
    shots_for_scaled(n, delta, 1.0)
}

/// [`shots_for`] with the total budget multiplied by `multiplier`.
pub fn shots_for_scaled(n: usize, delta: f64, multiplier: f64) -> Result<ShotPlan> {
    if n == 0 {
        return Err(Error::InvalidArgument("training size must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::InvalidArgument(format!("shot multiplier must be positive, got {multiplier}")));
    }
    let total_budget = (multiplier * (n as f64).powf(2.5)).ceil() as u64;
    let pairs = (n * (n - 1) / 2).max(1) as u64;
    Ok(ShotPlan {
        total_budget,
        per_entry: (total_budget / pairs).max(1),
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Exact,
    Estimated,
}

impl fmt::Display for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelMode::Exact => "exact",
            KernelMode::Estimated => "estimated",
        })
    }
}

impl FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(KernelMode::Exact),
            "estimated" => Ok(KernelMode::Estimated),
            other => Err(Error::InvalidArgument(format!("unknown kernel mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub entries: DMatrix<f64>,
    pub mode: KernelMode,
    /// Zero in exact mode.
    pub shots_per_entry: u64,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.entries.clone().symmetric_eigen().eigenvalues.min()
    }

    /// CSV with the header `# n=.. N=.. mode=.. shots=.. seed=..`.
    pub fn to_csv(&self, n: usize, seed: u64) -> String {
        let mut out = format!(
            "# n={n} N={} mode={} shots={} seed={seed}\n",
            self.size(),
            self.mode,
            self.shots_per_entry
        );
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses [`KernelMatrix::to_csv`] output, returning the matrix with its
    /// `n` and `seed` header fields.
    pub fn from_csv(text: &str) -> Result<(Self, usize, u64)> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty kernel file"))?;
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| Error::parse(1, "missing `#` header"))?;
        let mut fields = std::collections::HashMap::new();
        for kv in body.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("bad header field `{kv}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::parse(1, format!("missing `{k}`")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| Error::parse(1, format!("bad `{k}`"))) };
        let size = num("N")? as usize;
        let mode: KernelMode = get("mode")?.parse()?;
        let mut values = Vec::with_capacity(size * size);
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(i + 2, format!("{e}")))?;
            if row.len() != size {
                return Err(Error::parse(i + 2, format!("expected {size} columns")));
            }
            values.extend(row);
        }
        check_len(size * size, values.len())?;
        let matrix = KernelMatrix {
            entries: DMatrix::from_row_slice(size, size, &values),
            mode,
            shots_per_entry: num("shots")?,
        };
        Ok((matrix, num("n")? as usize, num("seed")?))
    }
}

fn entry(a: &StateVector, b: &StateVector, mode: KernelMode, shots: u64, seed: u64) -> Result<f64> {
    match mode {
        KernelMode::Exact => exact_kernel(a, b),
        KernelMode::Estimated => swap_test_estimate(a, b, shots, seed),
    }
}

/// Symmetric Gram matrix over `states`. Diagonal entries are 1 without
/// measurement; each estimated entry `(i, j)` draws from its own stream
/// derived from `(seed, i, j)`.
pub fn build_kernel_matrix(
    states: &[StateVector],
    mode: KernelMode,
    plan: &ShotPlan,
    seed: u64,
) -> Result<KernelMatrix> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("kernel matrix needs at least one state".into()))?;
    for s in states {
        check_len(first.n(), s.n())?;
    }
    let size = states.len();
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            let s = rng::derive_seed(seed, &[i as u64, j as u64]);
            entry(&states[i], &states[j], mode, plan.per_entry, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = DMatrix::identity(size, size);
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[(i, j)] = v;
        entries[(j, i)] = v;
    }
    Ok(KernelMatrix {
        entries,
        mode,
        shots_per_entry: shots_of(mode, plan),
    })
}

fn shots_of(mode: KernelMode, plan: &ShotPlan) -> u64 {
    match mode {
        KernelMode::Exact => 0,
        KernelMode::Estimated => plan.per_entry,
    }
}

/// Kernel values between `test` and every training state. Entry `i` draws
/// from the stream derived from `(seed, i)`.
pub fn kernel_vector(
    train: &[StateVector],
    test: &StateVector,
    mode: KernelMode,
    plan: &ShotPlan,
    seed: u64,
) -> Result<Vec<f64>> {
    train
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let entry_seed = rng::derive_seed(seed, &[VECTOR_TAG, i as u64]);
            entry(s, test, mode, plan.per_entry, entry_seed)
        })
        .collect()
}

/// Kernel vectors for many test states; row `k` uses the sub-seed `(seed, k)`.
pub fn kernel_rows(
    train: &[StateVector],
    tests: &[StateVector],
    mode: KernelMode,
    plan: &ShotPlan,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    tests
        .par_iter()
        .enumerate()
        .map(|(k, t)| kernel_vector(train, t, mode, plan, rng::derive_seed(seed, &[k as u64])))
        .collect()
}

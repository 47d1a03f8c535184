//! Classical shadows from random single-qubit Pauli measurements, the shadow
//! kernel built on them, and kernel PCA.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::rng;
use crate::statevec::{dot, StateVector};

pub const DEFAULT_SNAPSHOTS: usize = 500;
/// Eigenvalues below this are left out of the PCA projection.
pub const PCA_EIGEN_FLOOR: f64 = 1e-10;

/// The six single-qubit stabilizer states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StabilizerLabel {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl StabilizerLabel {
    pub const ALL: [StabilizerLabel; 6] = [
        StabilizerLabel::Zero,
        StabilizerLabel::One,
        StabilizerLabel::Plus,
        StabilizerLabel::Minus,
        StabilizerLabel::PlusI,
        StabilizerLabel::MinusI,
    ];

    pub fn from_outcome(basis: Basis, bit: usize) -> Self {
        use StabilizerLabel::*;
        match (basis, bit) {
            (Basis::Z, 0) => Zero,
            (Basis::Z, _) => One,
            (Basis::X, 0) => Plus,
            (Basis::X, _) => Minus,
            (Basis::Y, 0) => PlusI,
            (Basis::Y, _) => MinusI,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn ket(self) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        let i = Complex64::new(0.0, s);
        use StabilizerLabel::*;
        match self {
            Zero => [r(1.0), r(0.0)],
            One => [r(0.0), r(1.0)],
            Plus => [r(s), r(s)],
            Minus => [r(s), r(-s)],
            PlusI => [r(s), i],
            MinusI => [r(s), -i],
        }
    }

    /// The snapshot operator `3|s⟩⟨s| − I`.
    pub fn snapshot(self) -> [[Complex64; 2]; 2] {
        let k = self.ket();
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                let id = if r == c { 1.0 } else { 0.0 };
                k[r] * k[c].conj() * 3.0 - id
            })
        })
    }

    pub fn symbol(self) -> &'static str {
        use StabilizerLabel::*;
        match self {
            Zero => "0",
            One => "1",
            Plus => "+",
            Minus => "-",
            PlusI => "i+",
            MinusI => "i-",
        }
    }
}

impl FromStr for StabilizerLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StabilizerLabel::ALL
            .into_iter()
            .find(|l| l.symbol() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown stabilizer label `{s}`")))
    }
}

/// `Tr(σ(a) σ(b))` for `σ = 3|s⟩⟨s| − I`, which equals `9|⟨a|b⟩|² − 4`.
pub fn snapshot_trace(a: StabilizerLabel, b: StabilizerLabel) -> f64 {
    TRACE_TABLE[a.index()][b.index()]
}

/// Same label 5, orthogonal partner −4, different basis 0.5.
const TRACE_TABLE: [[f64; 6]; 6] = {
    let mut t = [[0.5; 6]; 6];
    let mut i = 0;
    while i < 6 {
        t[i][i] = 5.0;
        t[i][i ^ 1] = -4.0;
        i += 1;
    }
    t
};

/// `T` snapshots of `n` labels each; `outcomes[t][i]` is qubit `i` of snapshot `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowRecord {
    pub n: usize,
    pub seed: u64,
    pub outcomes: Vec<Vec<StabilizerLabel>>,
}

impl ShadowRecord {
    pub fn snapshots(&self) -> usize {
        self.outcomes.len()
    }

    /// The shadow estimate of the single-qubit reduced state of `site`.
    pub fn reduced_estimate(&self, site: usize) -> [[Complex64; 2]; 2] {
        let mut acc = [[Complex64::new(0.0, 0.0); 2]; 2];
        for snap in &self.outcomes {
            let s = snap[site].snapshot();
            for r in 0..2 {
                for c in 0..2 {
                    acc[r][c] += s[r][c];
                }
            }
        }
        let t = self.snapshots() as f64;
        acc.map(|row| row.map(|v| v / t))
    }

    /// Header `n T seed`, then one line of `n` labels per snapshot.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.snapshots(), self.seed);
        for snap in &self.outcomes {
            let line: Vec<&str> = snap.iter().map(|l| l.symbol()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for ShadowRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header: Vec<u64> = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty shadow record"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(1, format!("bad header field `{t}`"))))
            .collect::<Result<_>>()?;
        let [n, t, seed] = header[..] else {
            return Err(Error::parse(1, "header needs `n T seed`"));
        };
        let outcomes = lines
            .enumerate()
            .map(|(i, line)| {
                let snap = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<Vec<StabilizerLabel>>>()
                    .map_err(|e| Error::parse(i + 2, e.to_string()))?;
                check_len(n as usize, snap.len())?;
                Ok(snap)
            })
            .collect::<Result<Vec<_>>>()?;
        check_len(t as usize, outcomes.len())?;
        Ok(ShadowRecord {
            n: n as usize,
            seed,
            outcomes,
        })
    }
}

/// Measures qubit `site` of `amps` in `basis`, collapsing the state in place.
fn measure_qubit(amps: &mut [Complex64], n: usize, site: usize, basis: Basis, rng: &mut impl Rng) -> usize {
    let bit = 1usize << (n - 1 - site);
    // rotate so the chosen basis becomes the computational one
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rotation: [[Complex64; 2]; 2] = match basis {
        Basis::Z => return measure_z(amps, bit, rng),
        Basis::X => [[s.into(), s.into()], [s.into(), (-s).into()]],
        Basis::Y => [
            [s.into(), Complex64::new(0.0, -s)],
            [s.into(), Complex64::new(0.0, s)],
        ],
    };
    for j in 0..amps.len() {
        if j & bit == 0 {
            let (a0, a1) = (amps[j], amps[j | bit]);
            amps[j] = rotation[0][0] * a0 + rotation[0][1] * a1;
            amps[j | bit] = rotation[1][0] * a0 + rotation[1][1] * a1;
        }
    }
    measure_z(amps, bit, rng)
}

fn measure_z(amps: &mut [Complex64], bit: usize, rng: &mut impl Rng) -> usize {
    let p1: f64 = amps
        .iter()
        .enumerate()
        .filter(|(j, _)| j & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let outcome = usize::from(rng.random::<f64>() < p1);
    let keep = if outcome == 1 { p1 } else { 1.0 - p1 };
    let scale = 1.0 / keep.sqrt();
    for (j, a) in amps.iter_mut().enumerate() {
        if ((j & bit != 0) as usize) == outcome {
            *a *= scale;
        } else {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    outcome
}

fn random_basis(rng: &mut impl Rng) -> Basis {
    [Basis::X, Basis::Y, Basis::Z][rng.random_range(0..3)]
}

/// One snapshot with explicit bases: qubits are measured in order on the
/// collapsing state.
pub fn sample_snapshot(psi: &StateVector, bases: &[Basis], rng: &mut impl Rng) -> Result<Vec<StabilizerLabel>> {
    check_len(psi.n(), bases.len())?;
    let n = psi.n();
    let mut amps = psi.amplitudes().to_vec();
    Ok(bases
        .iter()
        .enumerate()
        .map(|(site, &basis)| StabilizerLabel::from_outcome(basis, measure_qubit(&mut amps, n, site, basis, rng)))
        .collect())
}

/// `T` snapshots with uniformly random bases. Qubit `i` of snapshot `t`
/// draws its basis and outcome from the stream `(seed, t, i)`.
pub fn sample_shadows(psi: &StateVector, snapshots: usize, seed: u64) -> Result<ShadowRecord> {
    if snapshots == 0 {
        return Err(Error::InvalidArgument("need at least one snapshot".into()));
    }
    let n = psi.n();
    let outcomes = (0..snapshots)
        .into_par_iter()
        .map(|t| {
            let mut amps = psi.amplitudes().to_vec();
            (0..n)
                .map(|site| {
                    let mut rng = rng::substream(seed, &[t as u64, site as u64]);
                    let basis = random_basis(&mut rng);
                    StabilizerLabel::from_outcome(basis, measure_qubit(&mut amps, n, site, basis, &mut rng))
                })
                .collect()
        })
        .collect();
    Ok(ShadowRecord { n, seed, outcomes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowKernelParams {
    pub tau: f64,
    pub gamma: f64,
}

impl Default for ShadowKernelParams {
    fn default() -> Self {
        Self { tau: 1.0, gamma: 1.0 }
    }
}

/// `exp((τ/T²) Σ_{t,t′} exp((γ/n) Σ_i Tr σ_i^t σ_i^{t′}))`.
pub fn shadow_kernel(a: &ShadowRecord, b: &ShadowRecord, p: ShadowKernelParams) -> Result<f64> {
    check_len(a.n, b.n)?;
    if !(p.tau > 0.0 && p.gamma > 0.0) {
        return Err(Error::InvalidArgument("tau and gamma must be positive".into()));
    }
    // a fixed argument order makes the floating-point sum symmetric
    let (a, b) = if a.outcomes <= b.outcomes { (a, b) } else { (b, a) };
    let scale = p.gamma / a.n as f64;
    let sum: f64 = a
        .outcomes
        .iter()
        .map(|sa| {
            b.outcomes
                .iter()
                .map(|sb| {
                    let tr: f64 = sa.iter().zip(sb).map(|(&x, &y)| snapshot_trace(x, y)).sum();
                    (scale * tr).exp()
                })
                .sum::<f64>()
        })
        .sum();
    let t2 = (a.snapshots() * b.snapshots()) as f64;
    Ok((p.tau / t2 * sum).exp())
}

/// Shadow-kernel Gram matrix, computed pairwise in parallel.
pub fn shadow_kernel_matrix(records: &[ShadowRecord], p: ShadowKernelParams) -> Result<DMatrix<f64>> {
    let m = records.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| shadow_kernel(&records[i], &records[j], p))
        .collect::<Result<Vec<_>>>()?;
    let mut k = DMatrix::zeros(m, m);
    for (&(i, j), v) in pairs.iter().zip(values) {
        k[(i, j)] = v;
        k[(j, i)] = v;
    }
    Ok(k)
}

/// `exp(τ |⟨ψ1|ψ2⟩|²)`.
pub fn direct_kernel(a: &StateVector, b: &StateVector, tau: f64) -> Result<f64> {
    check_len(a.n(), b.n())?;
    Ok((tau * dot(a.amplitudes(), b.amplitudes()).norm_sqr()).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// `N × k` projected coordinates, `k` the number of components kept.
    pub coordinates: DMatrix<f64>,
    /// Eigenvalues of the centered matrix for the kept components, descending.
    pub eigenvalues: Vec<f64>,
    /// Set when fewer components than requested exceed the eigenvalue floor.
    pub truncated: bool,
}

/// Double-centers `K`, then projects onto its top eigenvectors.
///
/// The coordinates of point `i` on component `c` are `(K_c v_c)_i / sqrt(λ_c)`,
/// which equals `sqrt(λ_c) v_c[i]`.
pub fn kernel_pca(k: &DMatrix<f64>, components: usize) -> Result<PcaResult> {
    let n = k.nrows();
    check_len(n, k.ncols())?;
    if components > n {
        return Err(Error::InvalidArgument(format!("{components} components requested from {n} points")));
    }
    let row_means: Vec<f64> = (0..n).map(|i| k.row(i).mean()).collect();
    let col_means: Vec<f64> = (0..n).map(|j| k.column(j).mean()).collect();
    let total = k.mean();
    let centered = DMatrix::from_fn(n, n, |i, j| k[(i, j)] - row_means[i] - col_means[j] + total);
    let eig = centered.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .take(components)
        .filter(|&c| eig.eigenvalues[c] > PCA_EIGEN_FLOOR)
        .collect();
    let coordinates = DMatrix::from_fn(n, kept.len(), |i, c| {
        let idx = kept[c];
        eig.eigenvalues[idx].sqrt() * eig.eigenvectors[(i, idx)]
    });
    Ok(PcaResult {
        coordinates,
        eigenvalues: kept.iter().map(|&c| eig.eigenvalues[c]).collect(),
        truncated: kept.len() < components,
    })
}

/// Index of the nearest centroid for every row of `points`.
pub fn nearest_centroid(points: &DMatrix<f64>, centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .row_iter()
        .map(|row| {
            centroids
                .iter()
                .enumerate()
                .map(|(c, cen)| {
                    let d: f64 = row.iter().zip(cen).map(|(x, y)| (x - y).powi(2)).sum();
                    (c, d)
                })
                .filter(|(_, d)| !d.is_nan())
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map_or(0, |(c, _)| c)
        })
        .collect()
}

/// Mean row of `points` for every class `0..classes`. Classes without members
/// get a NaN centroid, which [`nearest_centroid`] never selects.
pub fn centroids(points: &DMatrix<f64>, labels: &[usize], classes: usize) -> Vec<Vec<f64>> {
    let d = points.ncols();
    let mut sums = vec![vec![0.0; d]; classes];
    let mut counts = vec![0usize; classes];
    for (row, &l) in points.row_iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(row.iter()) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|v| *v = if c == 0 { f64::NAN } else { *v / c as f64 });
    }
    sums
}

/// Leave-one-out accuracy of the nearest-centroid rule.
pub fn loo_nearest_centroid_accuracy(points: &DMatrix<f64>, labels: &[usize], classes: usize) -> f64 {
    let n = points.nrows();
    let hits = (0..n)
        .filter(|&i| {
            let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let rest = points.select_rows(&keep);
            let rest_labels: Vec<usize> = keep.iter().map(|&j| labels[j]).collect();
            let cen = centroids(&rest, &rest_labels, classes);
            nearest_centroid(&points.rows(i, 1).into_owned(), &cen)[0] == labels[i]
        })
        .count();
    hits as f64 / n as f64
}

/// Mean silhouette coefficient of a labelled point set.
pub fn silhouette(points: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = points.nrows();
    let dist = |i: usize, j: usize| (points.row(i) - points.row(j)).norm();
    let classes: Vec<usize> = {
        let mut c = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    let mean_to = |i: usize, class: usize| {
        let members: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == class).collect();
        if members.is_empty() {
            None
        } else {
            Some(members.iter().map(|&j| dist(i, j)).sum::<f64>() / members.len() as f64)
        }
    };
    let total: f64 = (0..n)
        .map(|i| {
            let Some(a) = mean_to(i, labels[i]) else { return 0.0 };
            let b = classes
                .iter()
                .filter(|&&c| c != labels[i])
                .filter_map(|&c| mean_to(i, c))
                .fold(f64::INFINITY, f64::min);
            if !b.is_finite() || a.max(b) == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .sum();
    total / n as f64
}

impl fmt::Display for StabilizerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_table_matches_matrix_algebra() {
        for a in StabilizerLabel::ALL {
            for b in StabilizerLabel::ALL {
                let (sa, sb) = (a.snapshot(), b.snapshot());
                let tr: Complex64 = (0..2).flat_map(|r| (0..2).map(move |k| (r, k))).map(|(r, k)| sa[r][k] * sb[k][r]).sum();
                assert!((tr.re - snapshot_trace(a, b)).abs() < 1e-12 && tr.im.abs() < 1e-12);
            }
        }
        assert_eq!(snapshot_trace(StabilizerLabel::Zero, StabilizerLabel::Zero), 5.0);
        assert_eq!(snapshot_trace(StabilizerLabel::Zero, StabilizerLabel::One), -4.0);
    }

    #[test]
    fn z_basis_on_zero_state() {
        let psi = StateVector::zero(1);
        let mut rng = rng::stream(1);
        for _ in 0..50 {
            assert_eq!(sample_snapshot(&psi, &[Basis::Z], &mut rng).unwrap(), vec![StabilizerLabel::Zero]);
        }
    }

    #[test]
    fn inverse_channel_by_enumeration() {
        let psi = StateVector::new(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let a = psi.amplitudes();
        let rho = [[a[0] * a[0].conj(), a[0] * a[1].conj()], [a[1] * a[0].conj(), a[1] * a[1].conj()]];
        let mut mean = [[c(0.0, 0.0); 2]; 2];
        for basis in [Basis::X, Basis::Y, Basis::Z] {
            for bit in 0..2 {
                let label = StabilizerLabel::from_outcome(basis, bit);
                let ket = label.ket();
                let prob = (ket[0].conj() * a[0] + ket[1].conj() * a[1]).norm_sqr();
                let s = label.snapshot();
                for r in 0..2 {
                    for k in 0..2 {
                        mean[r][k] += s[r][k] * prob / 3.0;
                    }
                }
            }
        }
        for r in 0..2 {
            for k in 0..2 {
                assert!((mean[r][k] - rho[r][k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_qubit_reconstruction() {
        let psi = StateVector::new(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rec = sample_shadows(&psi, 10_000, 3).unwrap();
        let est = rec.reduced_estimate(0);
        let a = psi.amplitudes();
        let rho = [[a[0] * a[0].conj(), a[0] * a[1].conj()], [a[1] * a[0].conj(), a[1] * a[1].conj()]];
        let dist: f64 = (0..2).flat_map(|r| (0..2).map(move |k| (r, k))).map(|(r, k)| (est[r][k] - rho[r][k]).norm_sqr()).sum::<f64>().sqrt();
        assert!(dist < 0.1, "distance {dist}");
    }

    #[test]
    fn bell_marginals_are_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(2, vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rec = sample_shadows(&bell, 10_000, 8).unwrap();
        for site in 0..2 {
            let est = rec.reduced_estimate(site);
            for r in 0..2 {
                for k in 0..2 {
                    let target = if r == k { 0.5 } else { 0.0 };
                    assert!((est[r][k] - c(target, 0.0)).norm() < 0.05);
                }
            }
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let psi = StateVector::random(3, 2);
        assert_eq!(sample_shadows(&psi, 20, 4).unwrap(), sample_shadows(&psi, 20, 4).unwrap());
        assert_ne!(sample_shadows(&psi, 20, 4).unwrap(), sample_shadows(&psi, 20, 5).unwrap());
        assert!(sample_shadows(&psi, 0, 4).is_err());
    }

    #[test]
    fn kernel_values() {
        let rec = ShadowRecord { n: 1, seed: 0, outcomes: vec![vec![StabilizerLabel::Plus]] };
        let p = ShadowKernelParams { tau: 0.5, gamma: 0.2 };
        let k = shadow_kernel(&rec, &rec, p).unwrap();
        assert!((k - (0.5 * (0.2f64 * 5.0).exp()).exp()).abs() < 1e-12);
        let a = sample_shadows(&StateVector::random(3, 1), 30, 1).unwrap();
        let b = sample_shadows(&StateVector::random(3, 2), 30, 2).unwrap();
        let p = ShadowKernelParams::default();
        assert_eq!(shadow_kernel(&a, &b, p).unwrap(), shadow_kernel(&b, &a, p).unwrap());
        assert!(shadow_kernel(&a, &b, p).unwrap() >= 1.0);
    }

    #[test]
    fn direct_kernel_values() {
        let z = StateVector::zero(1);
        assert!((direct_kernel(&z, &z, 1.3).unwrap() - 1.3f64.exp()).abs() < 1e-12);
        assert_eq!(direct_kernel(&z, &StateVector::basis(1, 1), 1.3).unwrap(), 1.0);
        assert!((direct_kernel(&z, &StateVector::uniform(1), 1.0).unwrap() - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn pca_of_identity() {
        let r = kernel_pca(&DMatrix::identity(3, 3), 3).unwrap();
        // centered identity has eigenvalues {1, 1, 0}
        assert_eq!(r.eigenvalues.len(), 2);
        assert!(r.truncated);
        assert!(r.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-12));
        // pairwise distances of the simplex vertices are preserved: ‖e_i − e_j‖ = √2
        for i in 0..3 {
            for j in 0..i {
                let d = (r.coordinates.row(i) - r.coordinates.row(j)).norm();
                assert!((d - 2f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pca_rank_one_and_duplicates() {
        let v = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, -1.0, 0.5]);
        let r = kernel_pca(&(&v * v.transpose()), 2).unwrap();
        assert_eq!(r.coordinates.ncols(), 1);
        let states: Vec<_> = [0, 1, 2, 0].iter().map(|&s| StateVector::random(2, s)).collect();
        let k = DMatrix::from_fn(4, 4, |i, j| direct_kernel(&states[i], &states[j], 1.0).unwrap());
        let r = kernel_pca(&k, 2).unwrap();
        assert!((r.coordinates.row(0) - r.coordinates.row(3)).norm() < 1e-10);
        assert!(kernel_pca(&k, 5).is_err());
    }

    #[test]
    fn record_text_round_trip() {
        let rec = sample_shadows(&StateVector::random(3, 1), 5, 42).unwrap();
        let text = rec.to_text();
        assert!(text.starts_with("3 5 42\n"));
        assert_eq!(text.parse::<ShadowRecord>().unwrap(), rec);
    }

    #[test]
    fn centroid_classifier() {
        let pts = DMatrix::from_row_slice(4, 1, &[0.0, 0.1, 1.0, 1.1]);
        assert_eq!(loo_nearest_centroid_accuracy(&pts, &[0, 0, 1, 1], 2), 1.0);
        assert!(silhouette(&pts, &[0, 0, 1, 1]) > 0.8);
        // an empty third class must not attract points near the origin
        let far = DMatrix::from_row_slice(4, 1, &[5.0, 5.1, 6.0, 6.1]);
        assert_eq!(loo_nearest_centroid_accuracy(&far, &[0, 0, 1, 1], 3), 1.0);
        assert!(centroids(&far, &[0, 0, 1, 1], 3)[2][0].is_nan());
    }
}

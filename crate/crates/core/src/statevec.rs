//! Matrix-free state-vector arithmetic and exact ground states.
//!
//! Amplitude index `j` stores basis state `|b_0 b_1 … b_{n-1}⟩` with site 0 in
//! the most significant bit. Hamiltonians are applied term by term through
//! bit masks, so no `2^n × 2^n` matrix is ever built outside of tests.

use std::io::{Read, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::pauli::{Hamiltonian, PauliMasks};
use crate::rng;

/// Largest system handled by the Lanczos solver.
pub const MAX_SITES: usize = 24;
/// Largest subsystem for which reduced density matrices are formed.
pub const MAX_RDM_SITES: usize = 12;
/// Allowed deviation of `Σ|a_j|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

const PARALLEL_DIM: usize = 1 << 12;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(1usize << n, amplitudes.len())?;
        let norm2 = norm_sqr(&amplitudes);
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Numerical(format!("state norm² is {norm2}, expected 1")));
        }
        Ok(Self { n, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(1usize << n, amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numerical("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amplitudes })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// `|+⟩^⊗n`, the uniform superposition.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n,
            amplitudes: vec![a; dim],
        }
    }

    /// Tensor product of single-site states, site 0 first.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let n = sites.len();
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for s in sites {
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| [a * s[0], a * s[1]])
                .collect();
        }
        Self::normalized(n, amplitudes)
    }

    /// Haar-random state drawn from complex Gaussian amplitudes.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed);
        let amplitudes = (0..1usize << n).map(|_| gaussian_complex(&mut rng)).collect();
        Self::normalized(n, amplitudes).expect("gaussian vector is nonzero")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn scaled_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a * p).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// Binary cache format: `b"QKSV"`, `u32` version, `u32` n, then `2^n`
    /// little-endian `(re, im)` `f64` pairs.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(STATE_MAGIC)?;
        w.write_all(&STATE_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.amplitudes.len() * 16);
        for a in &self.amplitudes {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 12];
        r.read_exact(&mut header)?;
        if &header[0..4] != STATE_MAGIC {
            return Err(Error::parse(0, "not a state-vector file"));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != STATE_VERSION {
            return Err(Error::parse(0, format!("unsupported state version {version}")));
        }
        let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        if n > MAX_SITES {
            return Err(Error::Resource(format!("state file declares {n} sites")));
        }
        let mut buf = vec![0u8; (1usize << n) * 16];
        r.read_exact(&mut buf)?;
        let amplitudes = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Self::new(n, amplitudes)
    }
}

const STATE_MAGIC: &[u8; 4] = b"QKSV";
const STATE_VERSION: u32 = 1;

pub(crate) fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    use rand_distr::{Distribution, StandardNormal};
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `⟨a|b⟩` for raw vectors, conjugate-linear in `a`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// A Hamiltonian prepared for repeated application: terms are grouped by
/// their bit-flip mask so each output amplitude gathers one input per group.
#[derive(Debug, Clone)]
pub struct CompiledHamiltonian {
    n: usize,
    groups: Vec<(usize, Vec<(PauliMasks, Complex64)>)>,
}

impl CompiledHamiltonian {
    pub fn new(h: &Hamiltonian) -> Self {
        let mut groups: Vec<(usize, Vec<(PauliMasks, Complex64)>)> = Vec::new();
        for term in h.terms() {
            let masks = term.masks();
            let weight = Complex64::new(term.coefficient(), 0.0);
            match groups.iter_mut().find(|(x, _)| *x == masks.x_mask) {
                Some((_, g)) => g.push((masks, weight)),
                None => groups.push((masks.x_mask, vec![(masks, weight)])),
            }
        }
        Self { n: h.n(), groups }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn amplitude(&self, v: &[Complex64], k: usize) -> Complex64 {
        let mut acc = ZERO;
        for (x_mask, terms) in &self.groups {
            let j = k ^ x_mask;
            let vj = v[j];
            let mut w = ZERO;
            for (masks, c) in terms {
                w += masks.phase(j) * c;
            }
            acc += w * vj;
        }
        acc
    }

    /// Writes `H v` into `out`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let dim = 1usize << self.n;
        check_len(dim, v.len())?;
        check_len(dim, out.len())?;
        if dim >= PARALLEL_DIM {
            out.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
                let base = c * 1024;
                for (o, slot) in chunk.iter_mut().enumerate() {
                    *slot = self.amplitude(v, base + o);
                }
            });
        } else {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = self.amplitude(v, k);
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }
}

/// `H v` for an arbitrary (unnormalized) vector of length `2^n`.
pub fn apply_hamiltonian(h: &Hamiltonian, v: &[Complex64]) -> Result<Vec<Complex64>> {
    CompiledHamiltonian::new(h).apply(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Target accuracy on the ground energy. Success additionally requires
    /// `‖Hψ − Eψ‖ ≤ 10·tol`.
    pub tol: f64,
    /// Total number of matrix-vector products across restarts.
    pub max_iter: usize,
    pub seed: u64,
    /// Krylov dimension per restart cycle.
    pub krylov_dim: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
            krylov_dim: 150,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateResult {
    pub energy: f64,
    pub state: StateVector,
    pub iterations: usize,
    /// `‖Hψ − Eψ‖`.
    pub residual: f64,
}

/// Lowest eigenpair of `h` by restarted Lanczos with full reorthogonalization.
///
/// The start vector is drawn from `options.seed`, so the result is
/// deterministic. Within a degenerate ground space the returned state is the
/// one the seeded iteration converges to.
pub fn lanczos_ground_state(h: &Hamiltonian, options: &LanczosOptions) -> Result<GroundStateResult> {
    let n = h.n();
    if n == 0 || n > MAX_SITES {
        return Err(Error::Resource(format!(
            "lanczos supports 1..={MAX_SITES} sites, got {n}"
        )));
    }
    if !(options.tol > 0.0) || options.max_iter == 0 {
        return Err(Error::InvalidArgument("lanczos needs tol > 0 and max_iter >= 1".into()));
    }
    let op = CompiledHamiltonian::new(h);
    let dim = 1usize << n;
    let mut rng = rng::stream(options.seed);
    let start: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(&mut rng)).collect();
    let mut start = StateVector::normalized(n, start)?.into_amplitudes();

    let target = 10.0 * options.tol;
    let mut used = 0usize;
    let mut best: Option<GroundStateResult> = None;
    let mut scratch = vec![ZERO; dim];
    while used < options.max_iter {
        let budget = (options.max_iter - used).min(options.krylov_dim.max(2)).min(dim);
        let (ritz, steps) = lanczos_cycle(&op, &start, budget, options.tol)?;
        used += steps;

        op.apply_into(&ritz, &mut scratch)?;
        let energy = dot(&ritz, &scratch).re;
        axpy(&mut scratch, Complex64::new(-energy, 0.0), &ritz);
        let residual = norm_sqr(&scratch).sqrt();
        let state = StateVector::normalized(n, ritz)?;
        let result = GroundStateResult {
            energy,
            state,
            iterations: used,
            residual,
        };
        if residual <= target {
            return Ok(result);
        }
        start = result.state.amplitudes().to_vec();
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(result);
        }
    }
    let best = best.expect("at least one cycle ran");
    Err(Error::NoConvergence {
        iterations: used,
        residual: best.residual,
        best: Box::new(best),
    })
}

/// One Lanczos cycle from `start`; returns the normalized lowest Ritz vector
/// and the number of matrix-vector products spent.
fn lanczos_cycle(
    op: &CompiledHamiltonian,
    start: &[Complex64],
    max_steps: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, usize)> {
    let dim = start.len();
    let mut basis: Vec<Vec<Complex64>> = vec![start.to_vec()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; dim];
    let mut steps = 0;
    let mut coeffs: Vec<f64> = vec![1.0];

    loop {
        let k = basis.len() - 1;
        op.apply_into(&basis[k], &mut w)?;
        steps += 1;
        let alpha = dot(&basis[k], &w).re;
        alphas.push(alpha);
        axpy(&mut w, Complex64::new(-alpha, 0.0), &basis[k]);
        if k > 0 {
            axpy(&mut w, Complex64::new(-betas[k - 1], 0.0), &basis[k - 1]);
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(&mut w, -c, b);
            }
        }
        let beta = norm_sqr(&w).sqrt();

        let m = alphas.len();
        let exhausted = beta < 1e-12 * alphas.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let last = steps >= max_steps || m >= dim || exhausted;
        if m.is_multiple_of(5) || last {
            let (theta_coeffs, _) = lowest_tridiagonal(&alphas, &betas);
            let estimate = beta * theta_coeffs[m - 1].abs();
            coeffs = theta_coeffs;
            if estimate < 0.1 * tol || last {
                break;
            }
        }
        betas.push(beta);
        let next: Vec<Complex64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }

    let mut ritz = vec![ZERO; dim];
    for (c, b) in coeffs.iter().zip(&basis) {
        axpy(&mut ritz, Complex64::new(*c, 0.0), b);
    }
    let norm = norm_sqr(&ritz).sqrt();
    ritz.iter_mut().for_each(|x| *x /= norm);
    Ok((ritz, steps))
}

/// Lowest eigenvector and eigenvalue of the symmetric tridiagonal matrix.
fn lowest_tridiagonal(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, f64) {
    let m = alphas.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (eig.eigenvectors.column(idx).iter().copied().collect(), value)
}

/// `Re⟨ψ|O|ψ⟩`; the imaginary part must vanish to within `1e-9`.
pub fn expectation(psi: &StateVector, o: &Hamiltonian) -> Result<f64> {
    check_len(psi.n(), o.n())?;
    let ov = apply_hamiltonian(o, psi.amplitudes())?;
    let value = dot(psi.amplitudes(), &ov);
    if value.im.abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "expectation has imaginary residue {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    check_len(a.n(), b.n())?;
    Ok(dot(a.amplitudes(), b.amplitudes()))
}

/// A small dense complex matrix; reduced density matrices use this.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub entries: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `Tr ρ²` for a Hermitian matrix, as `Σ |ρ_ab|²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    /// Ascending eigenvalues, treating the matrix as Hermitian.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Extracts the bits of `index` at `positions` (MSB-first) into a compact integer.
#[inline]
pub(crate) fn gather_bits(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .fold(0usize, |acc, &p| (acc << 1) | ((index >> p) & 1))
}

/// Partial trace onto `sites`; `sites[0]` becomes the most significant bit.
pub fn reduced_density_matrix(psi: &StateVector, sites: &[usize]) -> Result<DenseOperator> {
    let n = psi.n();
    if sites.len() > MAX_RDM_SITES {
        return Err(Error::Resource(format!(
            "reduced density matrix limited to {MAX_RDM_SITES} sites, got {}",
            sites.len()
        )));
    }
    let mut seen = vec![false; n];
    for &s in sites {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidArgument(format!(
                "sites {sites:?} must be distinct and below {n}"
            )));
        }
    }
    let keep: Vec<usize> = sites.iter().map(|&s| n - 1 - s).collect();
    let rest: Vec<usize> = (0..n).filter(|s| !seen[*s]).map(|s| n - 1 - s).collect();
    let da = 1usize << keep.len();
    let de = 1usize << rest.len();
    let mut m = DMatrix::<Complex64>::zeros(da, de);
    for (j, amp) in psi.amplitudes().iter().enumerate() {
        m[(gather_bits(j, &keep), gather_bits(j, &rest))] = *amp;
    }
    let entries = &m * m.adjoint();
    Ok(DenseOperator { entries })
}

/// Draws `shots` basis indices with `Pr(j) = |a_j|²`.
pub fn sample_computational_basis(psi: &StateVector, shots: usize, seed: u64) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(psi.dim());
    let mut acc = 0.0;
    for a in psi.amplitudes() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = rng::stream(seed);
    Ok((0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            cumulative
                .partition_point(|&c| c <= u)
                .min(psi.dim() - 1)
        })
        .collect())
}

/// Renders basis index `j` as an `n`-character bitstring, site 0 first.
pub fn bitstring(n: usize, j: usize) -> String {
    (0..n)
        .map(|s| if (j >> (n - 1 - s)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

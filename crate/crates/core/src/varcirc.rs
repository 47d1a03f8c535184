//! Brickwork circuits of general two-qubit gates.
//!
//! Each variational gate is `exp(−i Σ θ(j1,j2) P_{j1} ⊗ P_{j2})` over the 15
//! non-identity Pauli pairs. The same layout hosts Haar-random circuits.
//! On top of state preparation this module implements variational
//! imaginary-time evolution (McLachlan's principle, `A θ̇ = −C`) and
//! first-order ground-state tracking along a parameter path (`B δθ = E`).

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Matrix4, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::pauli::{Hamiltonian, PauliLetter};
use crate::rng;
use crate::statevec::{dot, gaussian_complex, CompiledHamiltonian, StateVector};

pub const PARAMS_PER_GATE: usize = 15;
/// Central finite-difference step for state derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Desk-scale cap on the number of variational parameters.
pub const MAX_PARAMS: usize = 200;
pub const DEFAULT_RIDGE: f64 = 1e-8;
/// Accepted steps may raise the energy by at most this much.
pub const ENERGY_SLACK: f64 = 1e-8;
pub const MAX_HALVINGS: usize = 5;
/// Parameter jitter of the default imaginary-time start, see
/// [`VariationalCircuit::plus_state`].
pub const ITE_START_JITTER: f64 = 0.05;

type Gate = Matrix4<Complex64>;

/// Alternating layers of nearest-neighbour gates.
///
/// Layer 0 holds gates on pairs `(0,1), (2,3), …`; layer 1 on `(1,2), (3,4), …`,
/// and so on alternately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickworkArchitecture {
    n: usize,
    depth: usize,
    placements: Vec<Vec<usize>>,
}

impl BrickworkArchitecture {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "brickwork needs an even number of sites >= 2, got {n}"
            )));
        }
        let placements = (0..depth)
            .map(|d| (d % 2..n - 1).step_by(2).collect())
            .collect();
        Ok(Self {
            n,
            depth,
            placements,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Left site of every gate, per layer.
    pub fn placements(&self) -> &[Vec<usize>] {
        &self.placements
    }

    pub fn gate_count(&self) -> usize {
        self.placements.iter().map(Vec::len).sum()
    }

    /// Left sites in layer-major order, matching the gate list of a circuit.
    pub fn gate_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.placements.iter().flatten().copied()
    }
}

/// Coefficients of the 15 Pauli pairs `(j1, j2) ≠ (I, I)`, ordered
/// lexicographically over `I, X, Y, Z`; index `4·j1 + j2 − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams(pub [f64; PARAMS_PER_GATE]);

impl GateParams {
    pub fn zero() -> Self {
        Self([0.0; PARAMS_PER_GATE])
    }

    pub fn pair(index: usize) -> (PauliLetter, PauliLetter) {
        let k = index + 1;
        (PauliLetter::ALL[k / 4], PauliLetter::ALL[k % 4])
    }

    pub fn index_of(first: PauliLetter, second: PauliLetter) -> Option<usize> {
        let pos = |l| PauliLetter::ALL.iter().position(|&x| x == l).unwrap();
        (4 * pos(first) + pos(second)).checked_sub(1)
    }

    /// The Hermitian generator `Σ θ P ⊗ P`.
    pub fn generator(&self) -> Gate {
        let mut g = Gate::zeros();
        for (k, &theta) in self.0.iter().enumerate() {
            if theta != 0.0 {
                let (a, b) = Self::pair(k);
                g += pauli_pair(a, b) * Complex64::new(theta, 0.0);
            }
        }
        g
    }

    /// `exp(−i G)` through the eigendecomposition of the generator.
    pub fn unitary(&self) -> Gate {
        if self.0.iter().all(|&t| t == 0.0) {
            return Gate::identity();
        }
        let eig = SymmetricEigen::new(self.generator());
        let phases = Gate::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e)));
        eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    /// Parameters reproducing `u` up to a global phase, from the principal
    /// logarithm of `u`.
    pub fn from_unitary(u: &Gate) -> Result<Self> {
        let residual = (u.adjoint() * u - Gate::identity()).norm();
        if residual > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "gate is not unitary (‖U†U − I‖ = {residual:.2e})"
            )));
        }
        let (q, t) = Schur::new(*u).unpack();
        let angles = Gate::from_diagonal(&t.diagonal().map(|l| Complex64::new(-l.arg(), 0.0)));
        let generator = q * angles * q.adjoint();
        let mut theta = [0.0; PARAMS_PER_GATE];
        for (k, slot) in theta.iter_mut().enumerate() {
            let (a, b) = Self::pair(k);
            *slot = (pauli_pair(a, b) * generator).trace().re / 4.0;
        }
        Ok(Self(theta))
    }
}

fn pauli_pair(a: PauliLetter, b: PauliLetter) -> Gate {
    let ma = a.matrix();
    let mb = b.matrix();
    Gate::from_fn(|r, c| ma[r / 2][c / 2] * mb[r % 2][c % 2])
}

/// Applies a 4×4 gate to sites `(site, site + 1)`; `site` is the high bit of
/// the gate's index.
pub fn apply_two_site(amplitudes: &mut [Complex64], n: usize, site: usize, gate: &Gate) {
    let hi = 1usize << (n - 1 - site);
    let lo = 1usize << (n - 2 - site);
    let mask = hi | lo;
    for base in 0..amplitudes.len() {
        if base & mask != 0 {
            continue;
        }
        let idx = [base, base | lo, base | hi, base | hi | lo];
        let v = idx.map(|i| amplitudes[i]);
        for (r, &i) in idx.iter().enumerate() {
            amplitudes[i] = (0..4).map(|c| gate[(r, c)] * v[c]).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalCircuit {
    arch: BrickworkArchitecture,
    params: Vec<GateParams>,
}

impl VariationalCircuit {
    pub fn new(arch: BrickworkArchitecture, params: Vec<GateParams>) -> Result<Self> {
        check_len(arch.gate_count(), params.len())?;
        if params.iter().flat_map(|p| p.0).any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("non-finite circuit parameter".into()));
        }
        Ok(Self { arch, params })
    }

    pub fn zeros(arch: BrickworkArchitecture) -> Self {
        let params = vec![GateParams::zero(); arch.gate_count()];
        Self { arch, params }
    }

    /// A circuit preparing `|+⟩^n`: `H ⊗ H` gates on the first layer, every
    /// parameter then shifted by a uniform draw from `[-jitter, jitter)`.
    ///
    /// The jitter moves the start off the symmetric point, where the
    /// McLachlan flow can stall.
    pub fn plus_state(arch: BrickworkArchitecture, jitter: f64, seed: u64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let had = nalgebra::Matrix2::new(s, s, s, -s).map(|v| Complex64::new(v, 0.0));
        let hh = had.kronecker(&had);
        let hh = Gate::from_fn(|r, c| hh[(r, c)]);
        let first = GateParams::from_unitary(&hh).expect("H⊗H is unitary");
        let mut circuit = Self::random(arch, jitter, seed);
        let layer = circuit.arch.placements[0].len();
        for p in &mut circuit.params[..layer] {
            for (t, f) in p.0.iter_mut().zip(first.0) {
                *t += f;
            }
        }
        circuit
    }

    /// Parameters drawn uniformly from `[-scale, scale)`.
    pub fn random(arch: BrickworkArchitecture, scale: f64, seed: u64) -> Self {
        let mut rng = rng::stream(seed);
        let params = (0..arch.gate_count())
            .map(|_| GateParams(std::array::from_fn(|_| scale * (2.0 * rng.random::<f64>() - 1.0))))
            .collect();
        Self { arch, params }
    }

    pub fn arch(&self) -> &BrickworkArchitecture {
        &self.arch
    }

    pub fn gate_params(&self) -> &[GateParams] {
        &self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len() * PARAMS_PER_GATE
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.params.iter().flat_map(|p| p.0).collect()
    }

    pub fn with_flat_params(&self, flat: &[f64]) -> Result<Self> {
        check_len(self.param_count(), flat.len())?;
        let params = flat
            .chunks_exact(PARAMS_PER_GATE)
            .map(|c| GateParams(c.try_into().unwrap()))
            .collect();
        Self::new(self.arch.clone(), params)
    }

    fn unitaries(&self) -> Vec<Gate> {
        self.params.iter().map(GateParams::unitary).collect()
    }

    /// `U(θ)|0…0⟩`.
    pub fn prepare(&self) -> StateVector {
        apply_circuit(self, &StateVector::zero(self.arch.n)).expect("sizes agree")
    }

    /// Text form: `n,depth` then one line of 15 decimals per gate, layer-major.
    pub fn to_text(&self) -> String {
        let mut out = format!("{},{}\n", self.arch.n, self.arch.depth);
        for p in &self.params {
            let line: Vec<String> = p.0.iter().map(|t| format!("{t:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for VariationalCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for VariationalCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let (n, depth) = header
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::parse(1, format!("bad header `{header}`")))?;
        let arch = BrickworkArchitecture::new(n, depth)?;
        let params = lines
            .enumerate()
            .map(|(i, line)| {
                let values: Vec<f64> = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::parse(i + 2, format!("{e}")))?;
                let arr: [f64; PARAMS_PER_GATE] = values
                    .try_into()
                    .map_err(|_| Error::parse(i + 2, "expected 15 values"))?;
                Ok(GateParams(arr))
            })
            .collect::<Result<Vec<_>>>()?;
        VariationalCircuit::new(arch, params)
    }
}

fn run_gates(arch: &BrickworkArchitecture, gates: &[Gate], input: &StateVector) -> Result<StateVector> {
    check_len(arch.n, input.n())?;
    let mut amps = input.amplitudes().to_vec();
    for (site, gate) in arch.gate_sites().zip(gates) {
        apply_two_site(&mut amps, arch.n, site, gate);
    }
    StateVector::normalized(arch.n, amps)
}

/// Applies every gate of the circuit, layer by layer, to `input`.
pub fn apply_circuit(c: &VariationalCircuit, input: &StateVector) -> Result<StateVector> {
    run_gates(&c.arch, &c.unitaries(), input)
}

/// A brickwork circuit of fixed (Haar-random) two-qubit unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCircuit {
    pub arch: BrickworkArchitecture,
    pub gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn apply(&self, input: &StateVector) -> Result<StateVector> {
        run_gates(&self.arch, &self.gates, input)
    }

    pub fn prepare(&self) -> StateVector {
        self.apply(&StateVector::zero(self.arch.n)).expect("sizes agree")
    }
}

/// A Haar-distributed 4×4 unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(rng: &mut impl Rng) -> Gate {
    let z = Gate::from_fn(|_, _| gaussian_complex(rng));
    let (q, r) = z.qr().unpack();
    let phases = Gate::from_diagonal(&r.diagonal().map(|d| {
        let norm = d.norm();
        if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) }
    }));
    q * phases
}

/// Draws every gate of `arch` independently from the Haar measure on U(4).
pub fn haar_random_circuit(arch: &BrickworkArchitecture, seed: u64) -> GateCircuit {
    let mut rng = rng::stream(seed);
    let gates = (0..arch.gate_count()).map(|_| haar_unitary(&mut rng)).collect();
    GateCircuit {
        arch: arch.clone(),
        gates,
    }
}

/// `∂|Ψ(θ)⟩/∂θ_k` for every parameter by central finite differences.
pub fn state_derivatives(c: &VariationalCircuit) -> Result<Vec<Vec<Complex64>>> {
    state_derivatives_with_step(c, FD_STEP)
}

pub fn state_derivatives_with_step(c: &VariationalCircuit, step: f64) -> Result<Vec<Vec<Complex64>>> {
    let count = c.param_count();
    if count > MAX_PARAMS {
        return Err(Error::Resource(format!(
            "{count} parameters exceed the cap of {MAX_PARAMS}"
        )));
    }
    let base = c.unitaries();
    let zero = StateVector::zero(c.arch.n);
    (0..count)
        .into_par_iter()
        .map(|k| {
            let gate = k / PARAMS_PER_GATE;
            let slot = k % PARAMS_PER_GATE;
            let shifted = |delta: f64| {
                let mut p = c.params[gate];
                p.0[slot] += delta;
                let mut gates = base.clone();
                gates[gate] = p.unitary();
                run_gates(&c.arch, &gates, &zero)
            };
            let plus = shifted(step)?;
            let minus = shifted(-step)?;
            Ok(plus
                .amplitudes()
                .iter()
                .zip(minus.amplitudes())
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect())
        })
        .collect()
}

/// `G_ij = Re⟨∂_iΨ|∂_jΨ⟩`.
pub fn derivative_gram(derivs: &[Vec<Complex64>]) -> DMatrix<f64> {
    let m = derivs.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = dot(&derivs[i], &derivs[j]).re;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Solves `(G + ridge·I) x = rhs` for a symmetric positive semidefinite `G`.
fn ridge_solve(g: &DMatrix<f64>, rhs: &DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    let m = g.nrows();
    let system = g + DMatrix::<f64>::identity(m, m) * ridge;
    if let Some(ch) = Cholesky::new(system.clone()) {
        return Ok(ch.solve(rhs));
    }
    system
        .lu()
        .solve(rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Singular(format!("{m}×{m} system singular with ridge {ridge:e}")))
}

/// The McLachlan linear system at the current parameters.
#[derive(Debug, Clone)]
pub struct IteSystem {
    pub a: DMatrix<f64>,
    pub c: DVector<f64>,
    pub energy: f64,
}

/// Assembles `A_ij = Re⟨∂_iΨ|∂_jΨ⟩` and `C_i = Re⟨∂_iΨ|H|Ψ⟩`.
pub fn ite_system(c: &VariationalCircuit, h: &Hamiltonian) -> Result<IteSystem> {
    check_len(c.arch.n, h.n())?;
    let psi = c.prepare();
    let op = CompiledHamiltonian::new(h);
    let h_psi = op.apply(psi.amplitudes())?;
    let energy = dot(psi.amplitudes(), &h_psi).re;
    let derivs = state_derivatives(c)?;
    let a = derivative_gram(&derivs);
    let cvec = DVector::from_iterator(derivs.len(), derivs.iter().map(|d| dot(d, &h_psi).re));
    Ok(IteSystem { a, c: cvec, energy })
}

fn energy_of(c: &VariationalCircuit, op: &CompiledHamiltonian) -> Result<f64> {
    let psi = c.prepare();
    Ok(dot(psi.amplitudes(), &op.apply(psi.amplitudes())?).re)
}

#[derive(Debug, Clone)]
pub struct IteStep {
    pub circuit: VariationalCircuit,
    pub energy_before: f64,
    pub energy: f64,
    /// The step actually taken after any halving.
    pub d_beta: f64,
    pub halvings: usize,
}

/// One imaginary-time step: solve `(A + ridge·I) θ̇ = −C`, move `θ += θ̇·dβ`.
///
/// A step that raises the energy by more than [`ENERGY_SLACK`] is retried
/// with `dβ` halved, up to [`MAX_HALVINGS`] times.
pub fn ite_step(c: &VariationalCircuit, h: &Hamiltonian, d_beta: f64, ridge: f64) -> Result<IteStep> {
    if !(d_beta > 0.0) {
        return Err(Error::InvalidArgument(format!("d_beta must be positive, got {d_beta}")));
    }
    let system = ite_system(c, h)?;
    let velocity = ridge_solve(&system.a, &(-&system.c), ridge)?;
    let op = CompiledHamiltonian::new(h);
    let theta = c.flat_params();
    let mut step = d_beta;
    let mut last_change = f64::NAN;
    for halvings in 0..=MAX_HALVINGS {
        let moved: Vec<f64> = theta
            .iter()
            .zip(velocity.iter())
            .map(|(t, v)| t + v * step)
            .collect();
        let next = c.with_flat_params(&moved)?;
        let energy = energy_of(&next, &op)?;
        last_change = energy - system.energy;
        if last_change <= ENERGY_SLACK {
            return Ok(IteStep {
                circuit: next,
                energy_before: system.energy,
                energy,
                d_beta: step,
                halvings,
            });
        }
        step *= 0.5;
    }
    Err(Error::StepFailure {
        attempts: MAX_HALVINGS + 1,
        energy_change: last_change,
        d_beta: step * 2.0,
    })
}

#[derive(Debug, Clone)]
pub struct ItePath {
    pub beta_step: f64,
    pub steps: usize,
    /// Energy after each accepted step.
    pub energy_trace: Vec<f64>,
    pub final_circuit: VariationalCircuit,
}

impl ItePath {
    pub fn final_params(&self) -> Vec<f64> {
        self.final_circuit.flat_params()
    }
}

/// Runs `round(beta / d_beta)` accepted imaginary-time steps.
pub fn run_ite(
    c: &VariationalCircuit,
    h: &Hamiltonian,
    beta: f64,
    d_beta: f64,
    ridge: f64,
) -> Result<ItePath> {
    if !(beta >= 0.0) || !(d_beta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need beta >= 0 and d_beta > 0, got {beta}, {d_beta}"
        )));
    }
    let steps = (beta / d_beta).round() as usize;
    let mut circuit = c.clone();
    let mut energy_trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let step = ite_step(&circuit, h, d_beta, ridge)?;
        energy_trace.push(step.energy);
        circuit = step.circuit;
    }
    Ok(ItePath {
        beta_step: d_beta,
        steps,
        energy_trace,
        final_circuit: circuit,
    })
}

/// Minimum fidelity between the circuit state and `psi_curr` for tracking.
pub const TRACKING_FIDELITY: f64 = 0.99;

/// Parameter update `δθ = (B + ridge·I)^{-1} E` moving the circuit state from
/// `psi_curr` toward `psi_next`, with `B_sm = Re⟨∂_sΨ|∂_mΨ⟩` and
/// `E_m = Re⟨∂_mΨ|(psi_next − psi_curr)⟩`.
///
/// Both target states must carry the global phase the circuit state has; see
/// [`align_phase`].
pub fn track_ground_state(
    c: &VariationalCircuit,
    psi_next: &StateVector,
    psi_curr: &StateVector,
    ridge: f64,
) -> Result<Vec<f64>> {
    let psi = c.prepare();
    let fidelity = dot(psi.amplitudes(), psi_curr.amplitudes()).norm_sqr();
    if fidelity < TRACKING_FIDELITY {
        return Err(Error::TrackingDivergence {
            fidelity,
            threshold: TRACKING_FIDELITY,
        });
    }
    check_len(psi_curr.dim(), psi_next.dim())?;
    let derivs = state_derivatives(c)?;
    let b = derivative_gram(&derivs);
    let diff: Vec<Complex64> = psi_next
        .amplitudes()
        .iter()
        .zip(psi_curr.amplitudes())
        .map(|(a, b)| a - b)
        .collect();
    let e = DVector::from_iterator(derivs.len(), derivs.iter().map(|d| dot(d, &diff).re));
    Ok(ridge_solve(&b, &e, ridge)?.iter().copied().collect())
}

/// Rotates the global phase of `target` so that `⟨reference|target⟩` is real
/// and non-negative.
pub fn align_phase(target: &StateVector, reference: &StateVector) -> StateVector {
    let overlap = dot(reference.amplitudes(), target.amplitudes());
    if overlap.norm() == 0.0 {
        return target.clone();
    }
    target.scaled_phase(-overlap.arg())
}

#[derive(Debug, Clone)]
pub struct TrackedPath {
    pub circuits: Vec<VariationalCircuit>,
    /// `|⟨Ψ(θ_k)|ψ_k⟩|²` at every path point, the start included.
    pub fidelities: Vec<f64>,
}

/// Follows a sequence of exact ground states with the tracking update.
///
/// Step `k → k+1` applies [`track_ground_state`] with the exact states
/// phase-aligned to the circuit, then `refinements` further solves that take
/// the circuit state itself as `psi_curr`, which removes accumulated drift.
pub fn track_path(
    start: &VariationalCircuit,
    targets: &[StateVector],
    ridge: f64,
    refinements: usize,
) -> Result<TrackedPath> {
    let first = targets
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty tracking path".into()))?;
    let mut circuit = start.clone();
    let mut psi = circuit.prepare();
    let mut fidelities = vec![dot(psi.amplitudes(), first.amplitudes()).norm_sqr()];
    let mut circuits = vec![circuit.clone()];
    for pair in targets.windows(2) {
        let curr = align_phase(&pair[0], &psi);
        let next = align_phase(&pair[1], &curr);
        let delta = track_ground_state(&circuit, &next, &curr, ridge)?;
        circuit = shifted(&circuit, &delta)?;
        for _ in 0..refinements {
            psi = circuit.prepare();
            let next = align_phase(&pair[1], &psi);
            let delta = track_ground_state(&circuit, &next, &psi, ridge)?;
            circuit = shifted(&circuit, &delta)?;
        }
        psi = circuit.prepare();
        fidelities.push(dot(psi.amplitudes(), pair[1].amplitudes()).norm_sqr());
        circuits.push(circuit.clone());
    }
    Ok(TrackedPath {
        circuits,
        fidelities,
    })
}

fn shifted(c: &VariationalCircuit, delta: &[f64]) -> Result<VariationalCircuit> {
    let theta: Vec<f64> = c.flat_params().iter().zip(delta).map(|(t, d)| t + d).collect();
    c.with_flat_params(&theta)
}

//! Order parameters used as labels: transverse magnetization, the cluster
//! chain string order and the partial-reflection invariant `Z_R`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliLetter, PauliTerm};
use crate::statevec::{expectation, reduced_density_matrix, StateVector, MAX_RDM_SITES};

/// Per-site average `(1/n) Σ_i ⟨X_i⟩`.
pub fn magnetization_x(psi: &StateVector) -> f64 {
    let n = psi.n();
    let amps = psi.amplitudes();
    let total: f64 = (0..n)
        .map(|site| {
            let bit = 1usize << (n - 1 - site);
            amps.iter()
                .enumerate()
                .map(|(j, a)| (a.conj() * amps[j ^ bit]).re)
                .sum::<f64>()
        })
        .sum();
    total / n as f64
}

/// The string `Z_i X_{i+1} X_{i+3} … X_{j−1} Z_j` (0-based sites).
///
/// The X factors step by two from `i + 1` and end on `j − 1`, so `j − i` must
/// be even and at least 2.
pub fn string_order_term(n: usize, i: usize, j: usize) -> Result<PauliTerm> {
    if j >= n || j <= i || !(j - i).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "string order needs i < j < n with j - i even, got i={i}, j={j}, n={n}"
        )));
    }
    let xs = (i + 1..j).step_by(2).map(|s| (s, PauliLetter::X));
    PauliTerm::new(
        n,
        1.0,
        [(i, PauliLetter::Z), (j, PauliLetter::Z)].into_iter().chain(xs),
    )
}

pub fn string_order(psi: &StateVector, i: usize, j: usize) -> Result<f64> {
    let term = string_order_term(psi.n(), i, j)?;
    expectation(psi, &Hamiltonian::from_terms(psi.n(), [term])?)
}

/// Default endpoints `(0, n − 2)`: the longest string that fits the chain.
pub fn default_string_endpoints(n: usize) -> (usize, usize) {
    (0, n.saturating_sub(2))
}

/// Contiguous interval `start..=end` split into `I1 = start..split` and
/// `I2 = split..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSpec {
    pub start: usize,
    pub end: usize,
    pub split: usize,
}

impl IntervalSpec {
    pub fn new(start: usize, end: usize, split: usize) -> Result<Self> {
        let spec = Self { start, end, split };
        let len = end.wrapping_sub(start).wrapping_add(1);
        if !(start < split && split <= end) || !len.is_multiple_of(2) || len > MAX_RDM_SITES {
            return Err(Error::InvalidArgument(format!(
                "invalid interval {spec:?}: need start < split <= end, even length <= {MAX_RDM_SITES}"
            )));
        }
        Ok(spec)
    }

    pub fn site_count(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn sites(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }

    /// An interval of `len` sites split in half, starting at the even site
    /// nearest below the centered position.
    ///
    /// Starting on an even site keeps the interval aligned with the bond
    /// pattern of the bond-alternating chain, so both dimerized limits give
    /// `Z_R = ±1`.
    pub fn centered(n: usize, len: usize) -> Result<Self> {
        if len > n {
            return Err(Error::InvalidArgument(format!("interval of {len} sites exceeds n={n}")));
        }
        let start = (n - len) / 2 / 2 * 2;
        Self::new(start, start + len - 1, start + len / 2)
    }

    /// Eight sites for `n >= 12`, four otherwise.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::centered(n, if n >= 12 { 8 } else { 4 })
    }

    /// The image of this interval under the chain reflection `s ↦ n − 1 − s`.
    pub fn mirrored(&self, n: usize) -> Result<Self> {
        let start = n - 1 - self.end;
        Self::new(start, n - 1 - self.start, start + (self.end + 1 - self.split))
    }
}

/// `Z_R = Tr(ρ_I R_I) / sqrt((Tr ρ_{I1}² + Tr ρ_{I2}²) / 2)` where `R_I`
/// reverses the site order within the interval.
pub fn partial_reflection_invariant(psi: &StateVector, interval: &IntervalSpec) -> Result<f64> {
    if interval.end >= psi.n() {
        return Err(Error::InvalidArgument(format!(
            "interval {interval:?} exceeds n={}",
            psi.n()
        )));
    }
    let len = interval.site_count();
    let rho = reduced_density_matrix(psi, &interval.sites())?;
    let reflect = |a: usize| a.reverse_bits() >> (usize::BITS as usize - len);
    let overlap: Complex64 = (0..1usize << len).map(|a| rho.entries[(a, reflect(a))]).sum();
    if overlap.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "partial reflection has imaginary residue {:.3e}",
            overlap.im
        )));
    }
    let first: Vec<usize> = (interval.start..interval.split).collect();
    let second: Vec<usize> = (interval.split..=interval.end).collect();
    let p1 = reduced_density_matrix(psi, &first)?.purity();
    let p2 = reduced_density_matrix(psi, &second)?.purity();
    Ok(overlap.re / ((p1 + p2) / 2.0).sqrt())
}

/// `clamp((o − lo)/(hi − lo), 0, 1)`.
pub fn label_encode(o: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("label range needs lo < hi, got [{lo}, {hi}]")));
    }
    Ok(((o - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// Inverse of [`label_encode`] without clamping.
pub fn label_decode(b: f64, lo: f64, hi: f64) -> f64 {
    lo + b * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_bond_alternating_xxz, build_cluster_chain, build_xxz_chain};
    use crate::statevec::{lanczos_ground_state, LanczosOptions};

    fn ground(h: &Hamiltonian) -> StateVector {
        lanczos_ground_state(h, &LanczosOptions::default()).unwrap().state
    }

    fn pinned_cluster(n: usize, h1: f64) -> StateVector {
        use PauliLetter::*;
        let h = build_cluster_chain(n, 1.0, h1, 0.0).unwrap();
        let pins = Hamiltonian::from_terms(
            n,
            [
                PauliTerm::new(n, -0.01, [(0, X), (1, Z)]).unwrap(),
                PauliTerm::new(n, -0.01, [(n - 2, Z), (n - 1, X)]).unwrap(),
            ],
        )
        .unwrap();
        ground(&h.plus(&pins).unwrap())
    }

    #[test]
    fn magnetization_of_simple_states() {
        assert!((magnetization_x(&StateVector::uniform(5)) - 1.0).abs() < 1e-12);
        assert!(magnetization_x(&StateVector::zero(5)).abs() < 1e-12);
    }

    #[test]
    fn magnetization_saturates_at_strong_field() {
        let h = build_xxz_chain(10, 0.2, 1.0, 2.0, false).unwrap();
        let m = magnetization_x(&ground(&h));
        assert!(m > 0.9 && m < 1.0, "M_x = {m}");
    }

    #[test]
    fn string_order_pattern() {
        let t = string_order_term(8, 0, 6).unwrap();
        assert_eq!(t.to_string(), "1.0000000000000000e0 Z0 X1 X3 X5 Z6");
        assert!(string_order_term(8, 0, 7).is_err());
        assert!(string_order_term(8, 3, 3).is_err());
        assert!(string_order_term(8, 2, 8).is_err());
        assert_eq!(default_string_endpoints(12), (0, 10));
    }

    #[test]
    fn cluster_state_string_order_is_one() {
        let psi = pinned_cluster(8, 0.0);
        let (i, j) = default_string_endpoints(8);
        assert!((string_order(&psi, i, j).unwrap().abs() - 1.0).abs() < 1e-9);
        assert_eq!(string_order(&StateVector::zero(8), i, j).unwrap(), 0.0);
    }

    #[test]
    fn paramagnet_string_order_vanishes() {
        let h = build_cluster_chain(8, 1.0, 10.0, 0.0).unwrap();
        let (i, j) = default_string_endpoints(8);
        assert!(string_order(&ground(&h), i, j).unwrap().abs() < 0.1);
    }

    #[test]
    fn interval_validation() {
        assert!(IntervalSpec::new(2, 7, 5).is_ok());
        assert!(IntervalSpec::new(2, 6, 4).is_err());
        assert!(IntervalSpec::new(2, 7, 2).is_err());
        assert!(IntervalSpec::new(0, 13, 7).is_err());
        assert_eq!(IntervalSpec::default_for(12).unwrap(), IntervalSpec { start: 2, end: 9, split: 6 });
        assert_eq!(IntervalSpec::default_for(8).unwrap(), IntervalSpec { start: 2, end: 5, split: 4 });
        assert_eq!(IntervalSpec::default_for(16).unwrap(), IntervalSpec { start: 4, end: 11, split: 8 });
        let m = IntervalSpec::new(1, 6, 3).unwrap().mirrored(10).unwrap();
        assert_eq!(m, IntervalSpec { start: 3, end: 8, split: 7 });
    }

    #[test]
    fn product_state_invariant_is_one() {
        let spec = IntervalSpec::centered(8, 6).unwrap();
        assert!((partial_reflection_invariant(&StateVector::zero(8), &spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimer_limits() {
        let n = 12;
        let spec = IntervalSpec::default_for(n).unwrap();
        let topo = ground(&build_bond_alternating_xxz(n, 0.01, 1.0, 0.5).unwrap().plus(&edge_pins(n)).unwrap());
        let trivial = ground(&build_bond_alternating_xxz(n, 1.0, 0.01, 0.5).unwrap());
        let zt = partial_reflection_invariant(&topo, &spec).unwrap();
        let zp = partial_reflection_invariant(&trivial, &spec).unwrap();
        assert!((zt + 1.0).abs() < 1e-2, "topological {zt}");
        assert!((zp - 1.0).abs() < 1e-2, "trivial {zp}");
    }

    fn edge_pins(n: usize) -> Hamiltonian {
        Hamiltonian::from_terms(
            n,
            [
                PauliTerm::new(n, -0.01, [(0, PauliLetter::Z)]).unwrap(),
                PauliTerm::new(n, 0.01, [(n - 1, PauliLetter::Z)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bond_chain_phases() {
        let n = 12;
        let spec = IntervalSpec::default_for(n).unwrap();
        let topo = ground(&build_bond_alternating_xxz(n, 0.5, 1.0, 0.5).unwrap().plus(&edge_pins(n)).unwrap());
        let trivial = ground(&build_bond_alternating_xxz(n, 2.0, 1.0, 0.5).unwrap());
        let zt = partial_reflection_invariant(&topo, &spec).unwrap();
        let zp = partial_reflection_invariant(&trivial, &spec).unwrap();
        assert!(zt < -0.5, "topological {zt}");
        assert!(zp > 0.5, "trivial {zp}");
    }

    #[test]
    fn mirrored_interval_on_mirrored_state() {
        let n = 8;
        let psi = StateVector::random(n, 3);
        let flip = |j: usize| j.reverse_bits() >> (usize::BITS as usize - n);
        let amps: Vec<_> = (0..1 << n).map(|j| psi.amplitudes()[flip(j)]).collect();
        let mirrored = StateVector::new(n, amps).unwrap();
        let spec = IntervalSpec::new(1, 6, 4).unwrap();
        let a = partial_reflection_invariant(&psi, &spec).unwrap();
        let b = partial_reflection_invariant(&mirrored, &spec.mirrored(n).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn labels() {
        assert_eq!(label_encode(1.0, -1.0, 1.0).unwrap(), 1.0);
        assert_eq!(label_encode(-1.0, -1.0, 1.0).unwrap(), 0.0);
        assert_eq!(label_encode(0.0, -1.0, 1.0).unwrap(), 0.5);
        assert_eq!(label_encode(3.0, -1.0, 1.0).unwrap(), 1.0);
        assert!(label_encode(0.0, 1.0, 1.0).is_err());
        assert_eq!(label_decode(0.25, -1.0, 1.0), -0.5);
    }
}

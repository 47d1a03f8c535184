//! Maps configuration points to Hamiltonians and observables.

use qka::observables::{
    default_string_endpoints, label_encode, magnetization_x, partial_reflection_invariant, string_order,
    IntervalSpec,
};
use qka::pauli::{
    build_bond_alternating_xxz, build_cluster_chain, build_tfim_lattice, build_xxz_chain, Hamiltonian,
    PauliLetter, PauliTerm,
};
use qka::statevec::StateVector;

use crate::config::{ExperimentConfig, ModelKind, ObservableKind};
use crate::error::Result;

pub fn hamiltonian(config: &ExperimentConfig, point: &[f64]) -> Result<Hamiltonian> {
    let c = config.couplings_at(point);
    let get = |name: &str| c[name];
    let n = config.n;
    let m = &config.model;
    let h = match m.kind {
        ModelKind::Xxz => build_xxz_chain(n, get("j1"), get("j2"), get("g"), m.periodic)?,
        ModelKind::Cluster => build_cluster_chain(n, get("j"), get("h1"), get("h2"))?,
        ModelKind::BondXxz => build_bond_alternating_xxz(n, get("j1"), get("j2"), get("delta"))?,
        ModelKind::Tfim => build_tfim_lattice(m.rows, n / m.rows, get("w"), get("j"), get("f"), m.periodic)?,
    };
    if m.pinning == 0.0 {
        return Ok(h);
    }
    Ok(h.plus(&pins(m.kind, n, m.pinning)?)?)
}

/// Edge fields that select one state from a quasi-degenerate ground space.
///
/// The cluster chain gets its two edge stabilizers, the bond chain opposite
/// `Z` fields on its end sites, and the remaining models a `Z` field on site 0.
pub fn pins(kind: ModelKind, n: usize, eps: f64) -> Result<Hamiltonian> {
    use PauliLetter::{X, Z};
    let terms = match kind {
        ModelKind::Cluster => vec![
            PauliTerm::new(n, -eps, [(0, X), (1, Z)])?,
            PauliTerm::new(n, -eps, [(n - 2, Z), (n - 1, X)])?,
        ],
        ModelKind::BondXxz => vec![PauliTerm::new(n, -eps, [(0, Z)])?, PauliTerm::new(n, eps, [(n - 1, Z)])?],
        ModelKind::Xxz | ModelKind::Tfim => vec![PauliTerm::new(n, -eps, [(0, Z)])?],
    };
    Ok(Hamiltonian::from_terms(n, terms)?)
}

/// The configured order parameter of a ground state.
pub fn observable(config: &ExperimentConfig, psi: &StateVector) -> Result<f64> {
    let o = &config.observable;
    Ok(match o.kind {
        ObservableKind::MagnetizationX => magnetization_x(psi),
        ObservableKind::StringOrder => {
            let (i, j) = o.endpoints.unwrap_or_else(|| default_string_endpoints(psi.n()));
            string_order(psi, i, j)?
        }
        ObservableKind::Reflection => {
            let interval = match o.interval {
                Some((start, end, split)) => IntervalSpec::new(start, end, split)?,
                None => IntervalSpec::default_for(psi.n())?,
            };
            partial_reflection_invariant(psi, &interval)?
        }
    })
}

pub fn label(config: &ExperimentConfig, value: f64) -> Result<f64> {
    Ok(label_encode(value, config.observable.lo, config.observable.hi)?)
}

//! Distance between a state's output-probability distribution and the
//! Porter-Thomas law `e^{−u}`, `u = 2^n p`.

use crate::error::{Error, Result};
use crate::statevec::StateVector;

pub const DEFAULT_BINS: usize = 50;
pub const MIN_BINS: usize = 10;
/// The histogram range always covers `[0, 10]`.
pub const MIN_RANGE: f64 = 10.0;

pub fn probability_spectrum(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

pub fn pt_density(u: f64) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::InvalidArgument(format!("Porter-Thomas density needs u >= 0, got {u}")));
    }
    Ok((-u).exp())
}

/// `∫_a^b e^{−u} du`.
pub fn pt_mass(a: f64, b: f64) -> f64 {
    (-a).exp() - (-b).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumHistogram {
    pub n: usize,
    /// `bins + 1` increasing edges starting at 0.
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
}

impl SpectrumHistogram {
    /// Histogram of `u_j = 2^n p_j` over `[0, max(10, max u)]`, each value
    /// weighted `1/2^n`.
    pub fn from_spectrum(n: usize, spectrum: &[f64], bins: usize) -> Result<Self> {
        if bins < MIN_BINS {
            return Err(Error::InvalidArgument(format!("need at least {MIN_BINS} bins, got {bins}")));
        }
        let dim = spectrum.len() as f64;
        let scale = 2f64.powi(n as i32);
        let u_max = spectrum.iter().map(|p| p * scale).fold(MIN_RANGE, f64::max);
        let width = u_max / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| b as f64 * width).collect();
        let mut masses = vec![0.0; bins];
        for p in spectrum {
            let bin = ((p * scale / width) as usize).min(bins - 1);
            masses[bin] += 1.0 / dim;
        }
        Ok(Self { n, edges, masses })
    }

    pub fn pt_masses(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| pt_mass(w[0], w[1])).collect()
    }

    /// `½ Σ_b |m_b − PT_b| + ½ PT(u > u_max)`.
    pub fn distance_to(&self, reference: &[f64]) -> Result<f64> {
        crate::error::check_len(self.masses.len(), reference.len())?;
        let tail = (-self.edges[self.edges.len() - 1]).exp();
        let body: f64 = self.masses.iter().zip(reference).map(|(m, r)| (m - r).abs()).sum();
        Ok(0.5 * body + 0.5 * tail)
    }
}

pub fn pt_trace_distance(psi: &StateVector, bins: usize) -> Result<f64> {
    let hist = SpectrumHistogram::from_spectrum(psi.n(), &probability_spectrum(psi), bins)?;
    hist.distance_to(&hist.pt_masses())
}

/// `ε ≤ 1/n`.
pub fn hardness_window_check(epsilon: f64, n: usize) -> bool {
    epsilon <= 1.0 / n as f64
}

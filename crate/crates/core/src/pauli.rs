//! Weighted Pauli strings and the spin-chain model Hamiltonians.
//!
//! A [`Hamiltonian`] is a real-weighted sum of tensor products of single-site
//! Pauli operators, `H = Σ_k c_k P_k`. Sites are 0-based in the public API.
//! Builders for the four model families (XXZ chain with transverse field,
//! cluster chain, bond-alternating XXZ chain, 2D transverse-field Ising) live
//! here as pure functions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Terms whose merged coefficient falls below this magnitude are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-15;

/// Largest site count [`Hamiltonian::to_dense`] will materialize.
pub const DENSE_MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// The 2×2 matrix in the computational basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliLetter::I => [[l, o], [o, l]],
            PauliLetter::X => [[o, l], [l, o]],
            PauliLetter::Y => [[o, -i], [i, o]],
            PauliLetter::Z => [[l, o], [o, -l]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

/// Bit masks describing how a Pauli string acts on a basis index.
///
/// `P|j⟩ = i^{y_count} (-1)^{popcount(j & z_mask)} |j ^ x_mask⟩`, with site 0
/// stored in the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub x_mask: usize,
    pub z_mask: usize,
    pub y_count: u32,
}

impl PauliMasks {
    /// The phase factor `i^{y_count} (-1)^{popcount(j & z_mask)}` for basis index `j`.
    #[inline]
    pub fn phase(&self, j: usize) -> Complex64 {
        let sign = if (j & self.z_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        match self.y_count % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }
}

/// Bit position of `site` in a basis index over `n` sites (site 0 is the MSB).
#[inline]
pub fn site_bit(n: usize, site: usize) -> usize {
    1usize << (n - 1 - site)
}

/// A real coefficient times a tensor product of Pauli letters.
///
/// Identity letters are never stored; sites absent from the map carry `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    letters: BTreeMap<usize, PauliLetter>,
    n: usize,
}

impl PauliTerm {
    pub fn new(
        n: usize,
        coefficient: f64,
        letters: impl IntoIterator<Item = (usize, PauliLetter)>,
    ) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {coefficient}"
            )));
        }
        let mut map = BTreeMap::new();
        for (site, letter) in letters {
            if site >= n {
                return Err(Error::InvalidArgument(format!(
                    "site {site} out of range for {n} sites"
                )));
            }
            if letter == PauliLetter::I {
                continue;
            }
            if map.insert(site, letter).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "site {site} assigned twice in one Pauli term"
                )));
            }
        }
        Ok(Self {
            coefficient,
            letters: map,
            n,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn letters(&self) -> &BTreeMap<usize, PauliLetter> {
        &self.letters
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter(&self, site: usize) -> PauliLetter {
        self.letters.get(&site).copied().unwrap_or(PauliLetter::I)
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficient: self.coefficient * factor,
            ..self.clone()
        }
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            x_mask: 0,
            z_mask: 0,
            y_count: 0,
        };
        for (&site, &letter) in &self.letters {
            let bit = site_bit(self.n, site);
            match letter {
                PauliLetter::I => {}
                PauliLetter::X => m.x_mask |= bit,
                PauliLetter::Z => m.z_mask |= bit,
                PauliLetter::Y => {
                    m.x_mask |= bit;
                    m.z_mask |= bit;
                    m.y_count += 1;
                }
            }
        }
        m
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.coefficient)?;
        for (site, letter) in &self.letters {
            write!(f, " {}{}", letter.symbol(), site)?;
        }
        Ok(())
    }
}

/// A sum of Pauli terms over `n` sites with a deduplicated term list.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    /// Builds a Hamiltonian, merging terms with identical letter maps.
    ///
    /// Order of first appearance is preserved. Merged coefficients below
    /// [`MERGE_TOLERANCE`] are dropped.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: BTreeMap<Vec<(usize, PauliLetter)>, usize> = BTreeMap::new();
        for term in terms {
            if term.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: term.n,
                });
            }
            let key: Vec<_> = term.letters.iter().map(|(&s, &l)| (s, l)).collect();
            match index.get(&key) {
                Some(&pos) => merged[pos].coefficient += term.coefficient,
                None => {
                    index.insert(key, merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coefficient.abs() >= MERGE_TOLERANCE);
        Ok(Self { n, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_terms(self.n, self.terms.iter().map(|t| t.scaled(factor)))
            .expect("scaling preserves site count")
    }

    /// Sum of two Hamiltonians on the same sites.
    pub fn plus(&self, other: &Hamiltonian) -> Result<Self> {
        Self::from_terms(
            self.n,
            self.terms.iter().cloned().chain(other.terms.iter().cloned()),
        )
    }

    /// Materializes the operator as a dense `2^n × 2^n` matrix.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > DENSE_MAX_SITES {
            return Err(Error::Resource(format!(
                "dense materialization limited to {DENSE_MAX_SITES} sites, got {}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            let masks = term.masks();
            for j in 0..dim {
                m[(j ^ masks.x_mask, j)] += masks.phase(j) * term.coefficient;
            }
        }
        Ok(m)
    }

    /// Line-oriented text form: `n=<int>` then one `<coef> <letter><site> ...` per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for t in &self.terms {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for Hamiltonian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("bad header `{header}`")))?;
        let mut terms = Vec::new();
        for (idx, line) in lines {
            let mut fields = line.split_whitespace();
            let coefficient: f64 = fields
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| Error::parse(idx + 1, "bad coefficient"))?;
            let mut letters = Vec::new();
            for field in fields {
                let mut chars = field.chars();
                let letter = chars
                    .next()
                    .and_then(PauliLetter::from_symbol)
                    .ok_or_else(|| Error::parse(idx + 1, format!("bad letter in `{field}`")))?;
                let site: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| Error::parse(idx + 1, format!("bad site in `{field}`")))?;
                letters.push((site, letter));
            }
            terms.push(
                PauliTerm::new(n, coefficient, letters)
                    .map_err(|e| Error::parse(idx + 1, e.to_string()))?,
            );
        }
        Hamiltonian::from_terms(n, terms)
    }
}

fn term(n: usize, coefficient: f64, letters: &[(usize, PauliLetter)]) -> PauliTerm {
    PauliTerm::new(n, coefficient, letters.iter().copied()).expect("builder sites are in range")
}

/// XXZ chain in a transverse field with spin-1/2 operators `S = σ/2`:
///
/// `Σ_i [J1 (S^x_i S^x_{i+1} + S^y_i S^y_{i+1}) + J2 S^z_i S^z_{i+1}] − g Σ_i S^x_i`
///
/// The bond `(n−1, 0)` is included only when `periodic` is set.
pub fn build_xxz_chain(n: usize, j1: f64, j2: f64, g: f64, periodic: bool) -> Result<Hamiltonian> {
    use PauliLetter::*;
    if n < 2 {
        return Err(Error::InvalidModel(format!("xxz chain needs n >= 2, got {n}")));
    }
    let bonds = if periodic { n } else { n - 1 };
    let mut terms = Vec::with_capacity(3 * bonds + n);
    for i in 0..bonds {
        let k = (i + 1) % n;
        terms.push(term(n, 0.25 * j1, &[(i, X), (k, X)]));
        terms.push(term(n, 0.25 * j1, &[(i, Y), (k, Y)]));
        terms.push(term(n, 0.25 * j2, &[(i, Z), (k, Z)]));
    }
    for i in 0..n {
        terms.push(term(n, -0.5 * g, &[(i, X)]));
    }
    Hamiltonian::from_terms(n, terms)
}

/// Cluster chain with open boundaries:
///
/// `−J Σ_{i=0}^{n−3} Z_i X_{i+1} Z_{i+2} − h1 Σ_i X_i − h2 Σ_{i=0}^{n−2} X_i X_{i+1}`
pub fn build_cluster_chain(n: usize, j: f64, h1: f64, h2: f64) -> Result<Hamiltonian> {
    use PauliLetter::*;
    if n < 3 {
        return Err(Error::InvalidModel(format!("cluster chain needs n >= 3, got {n}")));
    }
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n - 2 {
        terms.push(term(n, -j, &[(i, Z), (i + 1, X), (i + 2, Z)]));
    }
    for i in 0..n {
        terms.push(term(n, -h1, &[(i, X)]));
    }
    for i in 0..n - 1 {
        terms.push(term(n, -h2, &[(i, X), (i + 1, X)]));
    }
    Hamiltonian::from_terms(n, terms)
}

/// Which bonds of the bond-alternating chain carry `J1`.
///
/// Bonds are numbered 1-based: bond `b` joins 1-based sites `b` and `b + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BondParity {
    /// Odd bonds (the first bond of the chain included) carry `J1`.
    #[default]
    OddBondsJ1,
    /// Even bonds carry `J1`.
    EvenBondsJ1,
}

/// Bond-alternating XXZ chain with open boundaries and the default parity.
pub fn build_bond_alternating_xxz(n: usize, j1: f64, j2: f64, delta: f64) -> Result<Hamiltonian> {
    build_bond_alternating_xxz_with(n, j1, j2, delta, BondParity::default())
}

/// `Σ_b J_b (X_b X_{b+1} + Y_b Y_{b+1} + δ Z_b Z_{b+1})` with `J_b` alternating per `parity`.
pub fn build_bond_alternating_xxz_with(
    n: usize,
    j1: f64,
    j2: f64,
    delta: f64,
    parity: BondParity,
) -> Result<Hamiltonian> {
    use PauliLetter::*;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!(
            "bond-alternating chain needs an even n >= 2, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(3 * (n - 1));
    for i in 0..n - 1 {
        let bond = i + 1;
        let odd = bond % 2 == 1;
        let coupling = match (parity, odd) {
            (BondParity::OddBondsJ1, true) | (BondParity::EvenBondsJ1, false) => j1,
            _ => j2,
        };
        terms.push(term(n, coupling, &[(i, X), (i + 1, X)]));
        terms.push(term(n, coupling, &[(i, Y), (i + 1, Y)]));
        terms.push(term(n, coupling * delta, &[(i, Z), (i + 1, Z)]));
    }
    Hamiltonian::from_terms(n, terms)
}

/// Nearest-neighbour edges of an `rows × cols` grid, site `r * cols + c`.
///
/// Periodic wrapping is applied along a dimension only when it has more than
/// two sites, so no edge is produced twice.
pub fn grid_edges(rows: usize, cols: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let s = r * cols + c;
            if c + 1 < cols {
                edges.push((s, s + 1));
            } else if periodic && cols > 2 {
                edges.push((r * cols, s));
            }
            if r + 1 < rows {
                edges.push((s, s + cols));
            } else if periodic && rows > 2 {
                edges.push((c, s));
            }
        }
    }
    edges
}

/// Transverse-field Ising model on a grid:
/// `W Σ Z_i + J Σ_{⟨ij⟩} Z_i Z_j − (F/2) Σ X_i`.
pub fn build_tfim_lattice(
    rows: usize,
    cols: usize,
    w: f64,
    j: f64,
    f: f64,
    periodic: bool,
) -> Result<Hamiltonian> {
    use PauliLetter::*;
    let n = rows * cols;
    if n < 1 {
        return Err(Error::InvalidModel("tfim lattice needs at least one site".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(term(n, w, &[(i, Z)]));
    }
    for (a, b) in grid_edges(rows, cols, periodic) {
        terms.push(term(n, j, &[(a, Z), (b, Z)]));
    }
    for i in 0..n {
        terms.push(term(n, -0.5 * f, &[(i, X)]));
    }
    Hamiltonian::from_terms(n, terms)
}

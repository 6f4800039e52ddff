//! Monomial (generalized permutation) matrices with exact root-of-unity
//! phases. A matrix acts on basis columns as `X b_j = zeta_M^phase[j] *
//! b_sigma[j]`, so the whole algebra reduces to permutation composition and
//! exponent arithmetic mod `M`. Nothing here ever leaves exact arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::{self, gcd, lcm, mod_mul, mu_orbits, NumTheoryError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonomialError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("phase modulus must be positive")]
    ZeroModulus,
    #[error("sigma and phase must both have length {expected}")]
    BadLength { expected: usize },
    #[error("sigma is not a permutation of 0..{0}")]
    NotBijective(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dimension {d} does not divide phase modulus {m}")]
    DimensionNotDividingModulus { d: u64, m: u64 },
    #[error("phase modulus {0} does not divide {1}")]
    NotSubModulus(u64, u64),
    #[error("phase map keys must be exactly the orbit representatives")]
    BadPhaseKeys,
    #[error("subspace not invariant")]
    SubspaceNotInvariant { index: u64 },
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// A root of unity `zeta_modulus^exp`, stored with `exp < modulus`.
#[derive(Debug, Clone, Copy, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootExp {
    pub exp: u64,
    pub modulus: u64,
}

impl RootExp {
    pub fn new(exp: i128, modulus: u64) -> Result<Self, MonomialError> {
        if modulus == 0 {
            return Err(MonomialError::ZeroModulus);
        }
        Ok(RootExp { exp: exp.rem_euclid(modulus as i128) as u64, modulus })
    }

    pub fn one(modulus: u64) -> Self {
        RootExp { exp: 0, modulus }
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn order(&self) -> u64 {
        self.modulus / gcd(self.modulus, self.exp)
    }

    /// `(k, j)` with this root equal to `zeta_k^j`, `gcd(j, k) = 1`. The
    /// value 1 canonicalizes to `(1, 0)`.
    pub fn canonical(&self) -> (u64, u64) {
        let g = gcd(self.modulus, self.exp);
        if g == self.modulus {
            return (1, 0);
        }
        (self.modulus / g, self.exp / g)
    }

    pub fn lift(&self, modulus: u64) -> Result<Self, MonomialError> {
        if modulus == 0 || modulus % self.modulus != 0 {
            return Err(MonomialError::NotSubModulus(self.modulus, modulus));
        }
        Ok(RootExp { exp: self.exp * (modulus / self.modulus), modulus })
    }

    pub fn mul(&self, other: &RootExp) -> RootExp {
        let m = lcm(self.modulus, other.modulus);
        let a = self.lift(m).expect("lcm lift");
        let b = other.lift(m).expect("lcm lift");
        RootExp { exp: (a.exp + b.exp) % m, modulus: m }
    }

    pub fn pow(&self, e: i128) -> RootExp {
        RootExp {
            exp: (self.exp as i128 * e).rem_euclid(self.modulus as i128) as u64,
            modulus: self.modulus,
        }
    }
}

impl PartialEq for RootExp {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for RootExp {}

impl fmt::Display for RootExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            (1, _) => write!(f, "1"),
            (2, _) => write!(f, "-1"),
            (k, 1) => write!(f, "z{k}"),
            (k, j) => write!(f, "z{k}^{j}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMono {
    d: usize,
    #[serde(rename = "M")]
    m: u64,
    sigma: Vec<usize>,
    phase: Vec<u64>,
}

/// Monomial matrix: `X b_j = zeta_M^phase[j] * b_sigma[j]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawMono", into = "RawMono")]
pub struct MonoMatrix {
    dim: usize,
    modulus: u64,
    sigma: Vec<usize>,
    phase: Vec<u64>,
}

impl TryFrom<RawMono> for MonoMatrix {
    type Error = MonomialError;

    fn try_from(raw: RawMono) -> Result<Self, Self::Error> {
        MonoMatrix::new(raw.d, raw.m, raw.sigma, raw.phase)
    }
}

impl From<MonoMatrix> for RawMono {
    fn from(x: MonoMatrix) -> RawMono {
        RawMono { d: x.dim, m: x.modulus, sigma: x.sigma, phase: x.phase }
    }
}

impl MonoMatrix {
    pub fn new(
        dim: usize,
        modulus: u64,
        sigma: Vec<usize>,
        phase: Vec<u64>,
    ) -> Result<Self, MonomialError> {
        if dim == 0 {
            return Err(MonomialError::EmptyDimension);
        }
        if modulus == 0 {
            return Err(MonomialError::ZeroModulus);
        }
        if sigma.len() != dim || phase.len() != dim {
            return Err(MonomialError::BadLength { expected: dim });
        }
        let mut seen = vec![false; dim];
        for &s in &sigma {
            if s >= dim || seen[s] {
                return Err(MonomialError::NotBijective(dim));
            }
            seen[s] = true;
        }
        let phase = phase.into_iter().map(|e| e % modulus).collect();
        Ok(MonoMatrix { dim, modulus, sigma, phase })
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        MonoMatrix::new(dim, modulus, (0..dim).collect(), vec![0; dim]).expect("identity is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phase_modulus(&self) -> u64 {
        self.modulus
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn phases(&self) -> &[u64] {
        &self.phase
    }

    pub fn phase_at(&self, j: usize) -> RootExp {
        RootExp { exp: self.phase[j], modulus: self.modulus }
    }

    pub fn is_permutation(&self) -> bool {
        self.phase.iter().all(|&e| e == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.sigma.iter().enumerate().all(|(j, &s)| j == s)
    }

    pub fn is_identity(&self) -> bool {
        self.is_permutation() && self.is_diagonal()
    }

    /// Re-expresses the same matrix over a larger phase modulus.
    pub fn lift_modulus(&self, modulus: u64) -> Result<Self, MonomialError> {
        if modulus == 0 || modulus % self.modulus != 0 {
            return Err(MonomialError::NotSubModulus(self.modulus, modulus));
        }
        let f = modulus / self.modulus;
        Ok(MonoMatrix {
            dim: self.dim,
            modulus,
            sigma: self.sigma.clone(),
            phase: self.phase.iter().map(|&e| e * f).collect(),
        })
    }

    pub fn multiply(&self, rhs: &MonoMatrix) -> Result<MonoMatrix, MonomialError> {
        if self.dim != rhs.dim {
            return Err(MonomialError::DimMismatch(self.dim, rhs.dim));
        }
        let m = lcm(self.modulus, rhs.modulus);
        let lf = m / self.modulus;
        let rf = m / rhs.modulus;
        let mut sigma = Vec::with_capacity(self.dim);
        let mut phase = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mid = rhs.sigma[j];
            sigma.push(self.sigma[mid]);
            phase.push((rhs.phase[j] * rf + self.phase[mid] * lf) % m);
        }
        Ok(MonoMatrix { dim: self.dim, modulus: m, sigma, phase })
    }

    pub fn inverse(&self) -> MonoMatrix {
        let mut sigma = vec![0usize; self.dim];
        let mut phase = vec![0u64; self.dim];
        for j in 0..self.dim {
            sigma[self.sigma[j]] = j;
            phase[self.sigma[j]] = (self.modulus - self.phase[j]) % self.modulus;
        }
        MonoMatrix { dim: self.dim, modulus: self.modulus, sigma, phase }
    }

    pub fn pow(&self, e: i64) -> MonoMatrix {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = MonoMatrix::identity(self.dim, self.modulus);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&sq).expect("same dimension");
            }
            sq = sq.multiply(&sq).expect("same dimension");
            e >>= 1;
        }
        acc
    }

    fn sigma_cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dim];
        let mut cycles = Vec::new();
        for start in 0..self.dim {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.sigma[cur];
                if cur == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Multiplicative order, computed cycle-by-cycle: a cycle of length `l`
    /// with phase product `w` contributes `l * ord(w)`. No matrix iteration.
    pub fn order(&self) -> u64 {
        self.sigma_cycles()
            .into_iter()
            .map(|cycle| {
                let w = cycle
                    .iter()
                    .fold(RootExp::one(self.modulus), |acc, &j| acc.mul(&self.phase_at(j)));
                cycle.len() as u64 * w.order()
            })
            .fold(1, lcm)
    }

    /// Factorization of the characteristic polynomial: each sigma-cycle of
    /// length `l` with phase product `w` contributes `x^l - w`.
    pub fn char_factors(&self) -> CycleFactors {
        let mut factors: Vec<(u64, RootExp)> = self
            .sigma_cycles()
            .into_iter()
            .map(|cycle| {
                let w = cycle
                    .iter()
                    .fold(RootExp::one(self.modulus), |acc, &j| acc.mul(&self.phase_at(j)));
                (cycle.len() as u64, w)
            })
            .collect();
        factors.sort_by_key(|&(l, w)| (l, w.canonical()));
        CycleFactors { dim: self.dim as u64, factors }
    }

    /// Restriction to the coordinate subspace spanned by `indices` (any
    /// order; reindexed ascending). The subspace must be sigma-invariant.
    pub fn restrict(&self, indices: &[u64]) -> Result<MonoMatrix, MonomialError> {
        let mut keep: Vec<u64> = indices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(MonomialError::EmptyDimension);
        }
        let pos: BTreeMap<u64, usize> = keep.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut sigma = Vec::with_capacity(keep.len());
        let mut phase = Vec::with_capacity(keep.len());
        for &j in &keep {
            let img = self.sigma[j as usize] as u64;
            let Some(&target) = pos.get(&img) else {
                return Err(MonomialError::SubspaceNotInvariant { index: j });
            };
            sigma.push(target);
            phase.push(self.phase[j as usize]);
        }
        Ok(MonoMatrix { dim: keep.len(), modulus: self.modulus, sigma, phase })
    }

    /// Diagonal phases at fixed points of sigma; their sum is the trace.
    pub fn trace_terms(&self) -> Vec<RootExp> {
        (0..self.dim)
            .filter(|&j| self.sigma[j] == j)
            .map(|j| self.phase_at(j))
            .collect()
    }

    pub fn commutes_with(&self, other: &MonoMatrix) -> bool {
        self.multiply(other).expect("same dimension") == other.multiply(self).expect("same dimension")
    }
}

impl PartialEq for MonoMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.sigma != other.sigma {
            return false;
        }
        let m = lcm(self.modulus, other.modulus);
        let lf = m / self.modulus;
        let rf = m / other.modulus;
        (0..self.dim).all(|j| self.phase[j] * lf == other.phase[j] * rf)
    }
}

impl Eq for MonoMatrix {}

/// The maximal cycle `C` of dimension `p^n`: diagonal over the eigenline
/// basis with `C b_j = zeta_{p^n}^j b_j`, phases expressed over `M`.
pub fn cycle_c(p: u64, n: u32, modulus: u64) -> Result<MonoMatrix, MonomialError> {
    let d = p.checked_pow(n).expect("p^n fits in u64") as usize;
    if modulus == 0 {
        return Err(MonomialError::ZeroModulus);
    }
    if modulus % d as u64 != 0 {
        return Err(MonomialError::DimensionNotDividingModulus { d: d as u64, m: modulus });
    }
    let step = modulus / d as u64;
    MonoMatrix::new(d, modulus, (0..d).collect(), (0..d as u64).map(|j| j * step).collect())
}

/// Normal form of a normalizing generator `A` with `A^-1 C A = C^r`: on the
/// eigenline basis `A` permutes lines by `j -> r*j`, carrying phase 1 on
/// every step except the wrap-around step of each orbit, which carries that
/// orbit's assigned cycle product. Any other placement with equal products
/// is diagonally conjugate to this one.
pub fn normalizer_a(
    p: u64,
    n: u32,
    r: u64,
    orbit_phases: &BTreeMap<u64, u64>,
    modulus: u64,
) -> Result<MonoMatrix, MonomialError> {
    let d = p.checked_pow(n).expect("p^n fits in u64");
    if modulus == 0 {
        return Err(MonomialError::ZeroModulus);
    }
    if modulus % d != 0 {
        return Err(MonomialError::DimensionNotDividingModulus { d, m: modulus });
    }
    let orbits = mu_orbits(d, r)?;
    let reps: Vec<u64> = orbits.reps().collect();
    if orbit_phases.len() != reps.len() || !reps.iter().all(|rep| orbit_phases.contains_key(rep)) {
        return Err(MonomialError::BadPhaseKeys);
    }
    let mut sigma = Vec::with_capacity(d as usize);
    for j in 0..d {
        sigma.push(mod_mul(r % d, j, d) as usize);
    }
    let mut phase = vec![0u64; d as usize];
    for orbit in &orbits.orbits {
        let last = *orbit.members.last().expect("orbits are nonempty");
        phase[last as usize] = orbit_phases[&orbit.rep] % modulus;
    }
    MonoMatrix::new(d as usize, modulus, sigma, phase)
}

/// Characteristic polynomial as a multiset of factors `x^l - w`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleFactors {
    dim: u64,
    factors: Vec<(u64, RootExp)>,
}

impl CycleFactors {
    pub fn new(dim: u64, mut factors: Vec<(u64, RootExp)>) -> Self {
        factors.sort_by_key(|&(l, w)| (l, w.canonical()));
        debug_assert_eq!(factors.iter().map(|&(l, _)| l).sum::<u64>(), dim);
        CycleFactors { dim, factors }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn factors(&self) -> &[(u64, RootExp)] {
        &self.factors
    }

    /// Eigenvalue multiset, keyed by canonical root `(order, index)`. The
    /// roots of `x^l - zeta_N^e` are `zeta_{Nl}^(e + N t)`, `t < l`.
    pub fn canonical_roots(&self) -> BTreeMap<(u64, u64), u64> {
        let mut out = BTreeMap::new();
        for &(l, w) in &self.factors {
            let big = w.modulus * l;
            for t in 0..l {
                let root = RootExp { exp: (w.exp + w.modulus * t) % big, modulus: big };
                *out.entry(root.canonical()).or_insert(0) += 1;
            }
        }
        out
    }
}

impl PartialEq for CycleFactors {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.factors.len() != other.factors.len() {
            return false;
        }
        let key = |f: &[(u64, RootExp)]| -> Vec<(u64, (u64, u64))> {
            f.iter().map(|&(l, w)| (l, w.canonical())).collect()
        };
        key(&self.factors) == key(&other.factors)
    }
}

impl Eq for CycleFactors {}

impl fmt::Display for CycleFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(l, w) in &self.factors {
            let x = if l == 1 { "x".to_string() } else { format!("x^{l}") };
            if w.is_one() {
                write!(f, "({x} - 1)")?;
            } else {
                write!(f, "({x} - {w})")?;
            }
        }
        Ok(())
    }
}

/// Default shared phase modulus for the group generated by `C` (order `p^n`)
/// and a normalizer with ratio `r`: `s * p^n` where `s` is the prime-to-p
/// part of `ord(r mod p^n)`.
pub fn default_modulus(p: u64, n: u32, r: u64) -> Result<u64, NumTheoryError> {
    let pn = p.checked_pow(n).expect("p^n fits in u64");
    let decomp = numtheory::decompose_unit(&numtheory::Residue::new(r as i128, pn)?, p, n)?;
    Ok(decomp.s * pn)
}

//! Decides similarity to a permutation matrix from the eigenvalue multiset.
//!
//! A diagonalizable matrix is similar to a permutation matrix iff its
//! characteristic polynomial is a product of `x^l - 1` factors. On the level
//! of spectra: the multiplicity function must be constant on primitive k-th
//! roots for every k (giving multiplicities `a_k` of the k-th cyclotomic
//! polynomial), and Moebius inversion on the divisor lattice,
//! `c_l = sum_(l | k) mu(k/l) a_k`, must produce nonnegative cycle counts.
//! Monomial matrices of finite phase order are always diagonalizable, so the
//! spectral test is the whole test here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::GroupSpec;
use crate::monomial::{CycleFactors, MonoMatrix};
use crate::numtheory::{divisors, euler_phi, gcd, mobius};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermSimError {
    #[error("char poly not rational: multiplicity is not constant on primitive {k}-th roots")]
    NotRational { k: u64 },
    #[error("not a permutation spectrum: cycle count for length {l} would be {count}")]
    NotPermutationSpectrum { l: u64, count: i64 },
    #[error("cycle type degree {got} does not match dimension {expected}")]
    DegreeMismatch { expected: u64, got: u64 },
}

/// Multiplicities `a_k` of cyclotomic factors `Phi_k` in a characteristic
/// polynomial with rational coefficients. Zero entries are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiMultiplicity {
    mult: BTreeMap<u64, u64>,
}

impl PhiMultiplicity {
    /// Direct construction, without the degree cross-check that the
    /// spectrum-derived path performs.
    pub fn from_raw(mult: BTreeMap<u64, u64>) -> Self {
        PhiMultiplicity { mult: mult.into_iter().filter(|&(_, a)| a > 0).collect() }
    }

    pub fn get(&self, k: u64) -> u64 {
        self.mult.get(&k).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.mult.iter().map(|(&k, &a)| (k, a))
    }

    pub fn degree(&self) -> u64 {
        self.mult.iter().map(|(&k, &a)| euler_phi(k) * a).sum()
    }
}

/// Cycle counts `c_l` of a permutation: `c_l` cycles of length `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleType {
    counts: BTreeMap<u64, u64>,
}

impl CycleType {
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        CycleType { counts: counts.into_iter().filter(|&(_, c)| c > 0).collect() }
    }

    pub fn get(&self, l: u64) -> u64 {
        self.counts.get(&l).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&l, &c)| (l, c))
    }

    pub fn degree(&self) -> u64 {
        self.counts.iter().map(|(&l, &c)| l * c).sum()
    }

    pub fn fixed_points(&self) -> u64 {
        self.get(1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> =
            self.counts.iter().map(|(&l, &c)| format!("{l}^{c}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Cyclotomic multiplicities of an eigenvalue multiset keyed by canonical
/// roots `(k, j)`. Fails on the smallest `k` whose primitive roots do not
/// all occur equally often.
pub fn multiplicities_from_roots(
    roots: &BTreeMap<(u64, u64), u64>,
) -> Result<PhiMultiplicity, PermSimError> {
    let orders: BTreeSet<u64> = roots.keys().map(|&(k, _)| k).collect();
    let mut mult = BTreeMap::new();
    for &k in &orders {
        let mut common: Option<u64> = None;
        for j in 0..k.max(1) {
            if k > 1 && gcd(j, k) != 1 {
                continue;
            }
            let j = if k == 1 { 0 } else { j };
            let count = roots.get(&(k, j)).copied().unwrap_or(0);
            match common {
                None => common = Some(count),
                Some(c) if c != count => return Err(PermSimError::NotRational { k }),
                Some(_) => {}
            }
            if k == 1 {
                break;
            }
        }
        let a = common.unwrap_or(0);
        if a > 0 {
            mult.insert(k, a);
        }
    }
    Ok(PhiMultiplicity { mult })
}

/// Cyclotomic multiplicities of a monomial characteristic polynomial.
pub fn eigen_multiplicities(factors: &CycleFactors) -> Result<PhiMultiplicity, PermSimError> {
    let m = multiplicities_from_roots(&factors.canonical_roots())?;
    debug_assert_eq!(m.degree(), factors.dim());
    Ok(m)
}

/// Moebius inversion `c_l = sum_(l | k) mu(k/l) a_k` over the divisor
/// closure of the support. Succeeds iff every count is nonnegative and the
/// total degree matches `d`; the negative-count error carries the smallest
/// failing length.
pub fn cycle_type_from_multiplicities(
    m: &PhiMultiplicity,
    d: u64,
) -> Result<CycleType, PermSimError> {
    let mut closure: BTreeSet<u64> = BTreeSet::new();
    for (k, _) in m.iter() {
        closure.extend(divisors(k));
    }
    let mut counts = BTreeMap::new();
    for &l in &closure {
        let c: i64 = m
            .iter()
            .filter(|&(k, _)| k % l == 0)
            .map(|(k, a)| mobius(k / l) * a as i64)
            .sum();
        if c < 0 {
            return Err(PermSimError::NotPermutationSpectrum { l, count: c });
        }
        if c > 0 {
            counts.insert(l, c as u64);
        }
    }
    let ty = CycleType { counts };
    if ty.degree() != d {
        return Err(PermSimError::DegreeMismatch { expected: d, got: ty.degree() });
    }
    Ok(ty)
}

/// Full spectral test for one matrix: similar to a permutation matrix iff
/// this returns the cycle type of that permutation.
pub fn is_permutation_like_element(x: &MonoMatrix) -> Result<CycleType, PermSimError> {
    let factors = x.char_factors();
    let mult = eigen_multiplicities(&factors)?;
    cycle_type_from_multiplicities(&mult, x.dim() as u64)
}

/// Cycle type read off an honest permutation matrix; `None` if any phase is
/// nontrivial.
pub fn cycle_type_of_permutation(x: &MonoMatrix) -> Option<CycleType> {
    if !x.is_permutation() {
        return None;
    }
    let mut counts = BTreeMap::new();
    for (l, _) in x.char_factors().factors() {
        *counts.entry(*l).or_insert(0) += 1;
    }
    Some(CycleType { counts })
}

/// Failing element of a group-level scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementWitness {
    pub element: String,
    pub error: PermSimError,
}

/// Group-level verdict with per-element cycle types (on success) or the
/// first failing element in enumeration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupPermLikeReport {
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ElementWitness>,
    pub cycle_types: BTreeMap<String, CycleType>,
}

/// Scans every element `A^l C^k` of the group. Complete decision procedure:
/// the enumeration covers the whole group, and monomial elements are
/// diagonalizable, so elementwise spectra decide permutation-likeness.
pub fn is_permutation_like_group(g: &GroupSpec) -> GroupPermLikeReport {
    let mut cycle_types = BTreeMap::new();
    for el in g.enumerate_elements() {
        let x = g.realize(&el);
        match is_permutation_like_element(&x) {
            Ok(ty) => {
                cycle_types.insert(el.to_string(), ty);
            }
            Err(error) => {
                return GroupPermLikeReport {
                    verdict: false,
                    witness: Some(ElementWitness { element: el.to_string(), error }),
                    cycle_types: BTreeMap::new(),
                };
            }
        }
    }
    GroupPermLikeReport { verdict: true, witness: None, cycle_types }
}

/// Verdict-only scan used by sweeps: skips the `l = 0` row (powers of the
/// maximal cycle factor as `(x^(d/g) - 1)^g`, hence are always
/// permutation-like) and stops at the first failure.
pub fn group_verdict_fast(g: &GroupSpec) -> Result<(), ElementWitness> {
    for el in g.enumerate_elements() {
        if el.l == 0 {
            continue;
        }
        let x = g.realize(&el);
        if let Err(error) = is_permutation_like_element(&x) {
            return Err(ElementWitness { element: el.to_string(), error });
        }
    }
    Ok(())
}

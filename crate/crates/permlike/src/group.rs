//! The group `G = <A, C>` with `C` a maximal cycle of dimension `p^n` and
//! `A^-1 C A = C^r`. Since `<C>` is normal, every element has the normal
//! form `A^l C^k` with `l` reduced modulo the quotient order
//! `Q = |G / <C>|`; composition only needs the twisted exponent rule
//! `(A^l1 C^k1)(A^l2 C^k2) = A^(l1+l2) C^(k1 r^l2 + k2)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monomial::{cycle_c, default_modulus, normalizer_a, MonoMatrix, MonomialError};
use crate::numtheory::{
    decompose_unit, mod_inv, mod_mul, mod_pow, mu_orbits, NumTheoryError, OrbitPartition, Residue,
    UnitOrderDecomp,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("n must be at least 1")]
    ZeroExponent,
    #[error("generator dimension {0} does not match p^n = {1}")]
    WrongDimension(usize, u64),
    #[error("conjugation relation A^-1 C A = C^r does not hold")]
    RelationViolated,
    #[error("wrong case for this operation: {0}")]
    WrongCase(&'static str),
    #[error("split lemma hypothesis failed: A^(p^a) is not a p^a-th power of C")]
    SplitHypothesisFailed,
    #[error("group has no phase description; build it from orbit phases")]
    NoPhaseDescription,
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Group element `A^l C^k` in normal form: `0 <= l < Q`, `0 <= k < d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub l: u64,
    pub k: u64,
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.l, self.k) {
            (0, 0) => write!(f, "I"),
            (0, k) => write!(f, "C^{k}"),
            (l, 0) => write!(f, "A^{l}"),
            (l, k) => write!(f, "A^{l} C^{k}"),
        }
    }
}

/// Serializable description of a group instance: the generators are fully
/// determined by `(p, n, r, M)` and one phase exponent per orbit of
/// `j -> r*j`. `M` may be omitted on input; it defaults to `s * p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub p: u64,
    pub n: u32,
    pub r: u64,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub phases: Vec<PhaseEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub orbit_rep: u64,
    pub exp: u64,
}

/// A concrete instance of `G = <A, C>` with exact generators.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    p: u64,
    n: u32,
    d: u64,
    m: u64,
    r: Residue,
    r_inv: u64,
    decomp: UnitOrderDecomp,
    orbits: OrbitPartition,
    a: MonoMatrix,
    c: MonoMatrix,
    phases: Option<BTreeMap<u64, u64>>,
    /// Q = |G / <C>|: least l >= 1 with A^l in <C>.
    quotient: u64,
    /// k0 with A^Q = C^k0.
    wrap_exp: u64,
}

impl GroupSpec {
    /// Builds the normal-form instance from one phase exponent per orbit.
    pub fn from_phases(
        p: u64,
        n: u32,
        r: u64,
        phases: &BTreeMap<u64, u64>,
        modulus: Option<u64>,
    ) -> Result<Self, GroupError> {
        let m = match modulus {
            Some(m) => m,
            None => default_modulus(p, n, r)?,
        };
        let d = Self::checked_dim(p, n)?;
        let a = normalizer_a(p, n, r, phases, m)?;
        let mut g = Self::from_parts(p, n, r, a, m)?;
        g.phases = Some(phases.clone());
        debug_assert_eq!(d, g.d);
        Ok(g)
    }

    /// Builds an instance from an explicit normalizing matrix; verifies the
    /// conjugation relation exactly.
    pub fn from_parts(p: u64, n: u32, r: u64, a: MonoMatrix, m: u64) -> Result<Self, GroupError> {
        let d = Self::checked_dim(p, n)?;
        if a.dim() as u64 != d {
            return Err(GroupError::WrongDimension(a.dim(), d));
        }
        let c = cycle_c(p, n, m)?;
        let a = a.lift_modulus(m)?;
        let r_res = Residue::new(r as i128, d)?;
        let decomp = decompose_unit(&r_res, p, n)?;
        let orbits = mu_orbits(d, r)?;
        let conj = a.inverse().multiply(&c)?.multiply(&a)?;
        if conj != c.pow(r_res.value() as i64) {
            return Err(GroupError::RelationViolated);
        }
        let r_inv = mod_inv(r_res.value(), d).expect("r is a unit mod d");

        // A^l is diagonal only when ord(r) | l, so Q is a multiple of
        // ord(r); scan powers of the diagonal D = A^ord(r) for membership
        // in <C>
        let diag = a.pow(decomp.order as i64);
        let mut power = MonoMatrix::identity(d as usize, m);
        let mut quotient = 0;
        let mut wrap_exp = 0;
        for e in 1..=diag.order() {
            power = power.multiply(&diag)?;
            if let Some(k0) = cycle_exponent_of(&power, &c, d) {
                quotient = decomp.order * e;
                wrap_exp = k0;
                break;
            }
        }
        debug_assert!(quotient > 0, "A has finite order, so some power lies in <C>");

        Ok(GroupSpec {
            p,
            n,
            d,
            m,
            r: r_res,
            r_inv,
            decomp,
            orbits,
            a,
            c,
            phases: None,
            quotient,
            wrap_exp,
        })
    }

    pub fn from_descriptor(desc: &GroupDescriptor) -> Result<Self, GroupError> {
        let phases: BTreeMap<u64, u64> =
            desc.phases.iter().map(|e| (e.orbit_rep, e.exp)).collect();
        Self::from_phases(desc.p, desc.n, desc.r, &phases, desc.m)
    }

    pub fn descriptor(&self) -> Result<GroupDescriptor, GroupError> {
        let phases = self.phases.as_ref().ok_or(GroupError::NoPhaseDescription)?;
        Ok(GroupDescriptor {
            p: self.p,
            n: self.n,
            r: self.r.value(),
            m: Some(self.m),
            phases: phases
                .iter()
                .map(|(&orbit_rep, &exp)| PhaseEntry { orbit_rep, exp })
                .collect(),
        })
    }

    fn checked_dim(p: u64, n: u32) -> Result<u64, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroExponent);
        }
        if !crate::numtheory::is_prime(p) || p == 2 {
            return Err(GroupError::NumTheory(NumTheoryError::NotOddPrime { p }));
        }
        Ok(p.checked_pow(n).expect("p^n fits in u64"))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn phase_modulus(&self) -> u64 {
        self.m
    }

    pub fn r(&self) -> u64 {
        self.r.value()
    }

    pub fn decomp(&self) -> &UnitOrderDecomp {
        &self.decomp
    }

    pub fn orbits(&self) -> &OrbitPartition {
        &self.orbits
    }

    pub fn generator_a(&self) -> &MonoMatrix {
        &self.a
    }

    pub fn generator_c(&self) -> &MonoMatrix {
        &self.c
    }

    pub fn orbit_phases(&self) -> Option<&BTreeMap<u64, u64>> {
        self.phases.as_ref()
    }

    /// |G / <C>|.
    pub fn quotient_order(&self) -> u64 {
        self.quotient
    }

    /// Exponent `k0` of the wrap relation `A^Q = C^k0`.
    pub fn wrap_exponent(&self) -> u64 {
        self.wrap_exp
    }

    pub fn group_order(&self) -> u64 {
        self.quotient * self.d
    }

    pub fn identity_element(&self) -> Element {
        Element { l: 0, k: 0 }
    }

    /// Normalizes arbitrary exponents into an element.
    pub fn element(&self, l: i128, k: i128) -> Element {
        let mut l = l.rem_euclid((self.quotient * self.a.order().max(1)) as i128) as u64;
        let mut k = k.rem_euclid(self.d as i128) as u64;
        if l >= self.quotient {
            let q = l / self.quotient;
            l %= self.quotient;
            k = (k + mod_mul(self.wrap_exp, q % self.d, self.d)) % self.d;
        }
        Element { l, k }
    }

    /// `(A^l1 C^k1)(A^l2 C^k2) = A^(l1+l2) C^(k1 r^l2 + k2)`, then the
    /// A-exponent is wrapped through `A^Q = C^k0`.
    pub fn compose(&self, x: &Element, y: &Element) -> Element {
        let twist = mod_pow(self.r.value(), y.l, self.d);
        let k = (mod_mul(x.k, twist, self.d) + y.k) % self.d;
        let l = x.l + y.l;
        if l >= self.quotient {
            let q = l / self.quotient;
            Element {
                l: l % self.quotient,
                k: (k + mod_mul(self.wrap_exp, q % self.d.max(1), self.d)) % self.d,
            }
        } else {
            Element { l, k }
        }
    }

    pub fn inverse_element(&self, x: &Element) -> Element {
        // C^-k A^-l = A^-l C^(-k r^-l); A^-l = A^(Q-l) C^(-k0) for l > 0
        let rl = mod_pow(self.r_inv, x.l, self.d);
        let back = mod_mul(x.k, rl, self.d);
        if x.l == 0 {
            Element { l: 0, k: (self.d - back) % self.d }
        } else {
            let k = (2 * self.d - self.wrap_exp - back) % self.d;
            Element { l: self.quotient - x.l, k }
        }
    }

    pub fn realize(&self, x: &Element) -> MonoMatrix {
        self.a
            .pow(x.l as i64)
            .multiply(&self.c.pow(x.k as i64))
            .expect("generators share a dimension")
    }

    /// All elements in lexicographic `(l, k)` order.
    pub fn enumerate_elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.quotient)
            .flat_map(move |l| (0..self.d).map(move |k| Element { l, k }))
    }

    /// Elements together with their realizations, built incrementally (one
    /// monomial multiply per step).
    pub fn elements_realized(&self) -> impl Iterator<Item = (Element, MonoMatrix)> + '_ {
        let mut a_pow = MonoMatrix::identity(self.d as usize, self.m);
        (0..self.quotient).flat_map(move |l| {
            if l > 0 {
                a_pow = a_pow.multiply(&self.a).expect("same dimension");
            }
            let mut x = a_pow.clone();
            let c = &self.c;
            (0..self.d).map(move |k| {
                if k > 0 {
                    x = x.multiply(c).expect("same dimension");
                }
                (Element { l, k }, x.clone())
            })
        })
    }
}

/// If `x` is a power of the cycle generator `c`, returns that exponent.
fn cycle_exponent_of(x: &MonoMatrix, c: &MonoMatrix, d: u64) -> Option<u64> {
    if !x.is_diagonal() {
        return None;
    }
    for k in 0..d {
        if *x == c.pow(k as i64) {
            return Some(k);
        }
    }
    None
}

/// Split adjustment for the p-group quotient case (`s = 1`): finds `t` with
/// `A^(p^a) = C^(p^a t)` and returns the group regenerated by
/// `A' = A C^-t`, whose `p^a`-th power is verified to be the identity.
/// Always succeeds when the group is permutation-like; a miss is reported as
/// a hypothesis failure.
pub fn adjust_generator_p_case(g: &GroupSpec) -> Result<(GroupSpec, u64), GroupError> {
    if g.decomp.s != 1 {
        return Err(GroupError::WrongCase("split adjustment applies to the s = 1 case"));
    }
    let pa = g.p.pow(g.decomp.a);
    let a_pow = g.a.pow(pa as i64);
    let step = g.c.pow(pa as i64);
    let mut target = MonoMatrix::identity(g.d as usize, g.m);
    for t in 0..g.p.pow(g.n - g.decomp.a) {
        if t > 0 {
            target = target.multiply(&step)?;
        }
        if a_pow == target {
            let adjusted = g.a.multiply(&g.c.pow(-(t as i64)))?;
            let g2 = GroupSpec::from_parts(g.p, g.n, g.r.value(), adjusted, g.m)?;
            if !g2.a.pow(pa as i64).is_identity() {
                return Err(GroupError::SplitHypothesisFailed);
            }
            return Ok((g2, t));
        }
    }
    Err(GroupError::SplitHypothesisFailed)
}

/// Split verdict for the `s > 1` case: whether `A^(s p^a) = I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitVerdict {
    pub expected_exponent: u64,
    pub holds: bool,
    pub order_of_a: u64,
}

pub fn check_split_nonp_case(g: &GroupSpec) -> Result<SplitVerdict, GroupError> {
    if g.decomp.s == 1 {
        return Err(GroupError::WrongCase("this check applies to the s > 1 case"));
    }
    let e = g.decomp.s * g.p.pow(g.decomp.a);
    Ok(SplitVerdict {
        expected_exponent: e,
        holds: g.a.pow(e as i64).is_identity(),
        order_of_a: g.a.order(),
    })
}

/// Elements commuting with `C`, found by exact monomial commutation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CentralizerReport {
    pub size: u64,
    pub equals_cycle_subgroup: bool,
    pub elements: Vec<Element>,
}

pub fn centralizer_of_c(g: &GroupSpec) -> CentralizerReport {
    let mut elements = Vec::new();
    for (el, x) in g.elements_realized() {
        if x.commutes_with(g.generator_c()) {
            elements.push(el);
        }
    }
    let equals_cycle_subgroup =
        elements.len() as u64 == g.dim() && elements.iter().all(|e| e.l == 0);
    CentralizerReport { size: elements.len() as u64, equals_cycle_subgroup, elements }
}

//! Independent dense oracle over the cyclotomic field `Q(zeta_M)`,
//! represented as `Q[x] / Phi_M(x)` with `BigRational` coefficients.
//!
//! Everything in this module deliberately avoids the monomial shortcuts used
//! elsewhere: matrices are dense, characteristic polynomials come from the
//! Faddeev-LeVerrier recurrence, determinants from Gaussian elimination.
//! Agreement between this route and the cycle-factor route is what the test
//! suite leans on.

use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::monomial::MonoMatrix;
use crate::numtheory::divisors;

/// Dense ops scale with phi(M)^2 per field multiplication; refuse absurd
/// conductors unless the caller raises the cap.
pub const DEFAULT_CONDUCTOR_CAP: u64 = 2000;

type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("conductor {m} exceeds the configured cap {cap}")]
    ConductorTooLarge { m: u64, cap: u64 },
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("division by zero in Q(zeta)")]
    DivisionByZero,
    #[error("phase modulus {0} does not divide conductor {1}")]
    IncompatiblePhases(u64, u64),
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
}

fn q_zero() -> Q {
    Q::zero()
}

fn q_from_bigint(b: &BigInt) -> Q {
    Q::from_integer(b.clone())
}

fn poly_trim(p: &mut Vec<Q>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![q_zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Euclidean division `num = q * den + r` with `deg r < deg den`.
fn poly_divrem(num: &[Q], den: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut rem: Vec<Q> = num.to_vec();
    poly_trim(&mut rem);
    let mut den = den.to_vec();
    poly_trim(&mut den);
    assert!(!den.is_empty(), "division by the zero polynomial");
    let lead = den.last().unwrap().clone();
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![q_zero(); rem.len() - den.len() + 1];
    for i in (den.len() - 1..rem.len()).rev() {
        let c = &rem[i] / &lead;
        if c.is_zero() {
            continue;
        }
        let shift = i - (den.len() - 1);
        quot[shift] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            let sub = dj * &c;
            rem[shift + j] -= sub;
        }
    }
    poly_trim(&mut rem);
    poly_trim(&mut quot);
    (quot, rem)
}

/// The M-th cyclotomic polynomial with integer coefficients, computed as
/// `(x^M - 1) / prod_(k | M, k < M) Phi_k(x)`.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let mut num = vec![q_zero(); m as usize + 1];
    num[0] = -Q::one();
    num[m as usize] = Q::one();
    let mut den = vec![Q::one()];
    for k in divisors(m) {
        if k < m {
            let phi_k: Vec<Q> = cyclotomic_polynomial(k).iter().map(q_from_bigint).collect();
            den = poly_mul(&den, &phi_k);
        }
    }
    let (quot, rem) = poly_divrem(&num, &den);
    debug_assert!(rem.is_empty(), "cyclotomic division is exact");
    quot.into_iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// The field `Q(zeta_m) = Q[x] / Phi_m`, holding the cached modulus.
#[derive(Debug, Clone)]
pub struct CycloField {
    conductor: u64,
    degree: usize,
    modulus: Vec<Q>,
}

/// An element of `Q(zeta_m)`: coefficients of `1, zeta, ..., zeta^(deg-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloNum {
    conductor: u64,
    coeffs: Vec<Q>,
}

impl CycloNum {
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value if this element lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z^{i}")?;
            } else {
                write!(f, "({c})z^{i}")?;
            }
        }
        Ok(())
    }
}

impl CycloField {
    pub fn new(conductor: u64) -> Result<Self, CycloError> {
        Self::with_cap(conductor, DEFAULT_CONDUCTOR_CAP)
    }

    pub fn with_cap(conductor: u64, cap: u64) -> Result<Self, CycloError> {
        if conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        if conductor > cap {
            return Err(CycloError::ConductorTooLarge { m: conductor, cap });
        }
        let modulus: Vec<Q> = cyclotomic_polynomial(conductor).iter().map(q_from_bigint).collect();
        Ok(CycloField { conductor, degree: modulus.len() - 1, modulus })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn make(&self, mut coeffs: Vec<Q>) -> CycloNum {
        coeffs.resize(self.degree, q_zero());
        CycloNum { conductor: self.conductor, coeffs }
    }

    pub fn reduce(&self, poly: &[Q]) -> CycloNum {
        if poly.len() <= self.degree {
            return self.make(poly.to_vec());
        }
        let (_, rem) = poly_divrem(poly, &self.modulus);
        self.make(rem)
    }

    pub fn zero(&self) -> CycloNum {
        self.make(Vec::new())
    }

    pub fn one(&self) -> CycloNum {
        self.from_rational(Q::one())
    }

    pub fn from_rational(&self, q: Q) -> CycloNum {
        self.make(vec![q])
    }

    pub fn from_int(&self, v: i64) -> CycloNum {
        self.from_rational(Q::from_integer(BigInt::from(v)))
    }

    /// `zeta_m^e`.
    pub fn zeta(&self, e: u64) -> CycloNum {
        let e = (e % self.conductor) as usize;
        let mut poly = vec![q_zero(); e + 1];
        poly[e] = Q::one();
        self.reduce(&poly)
    }

    fn check(&self, x: &CycloNum) {
        assert_eq!(x.conductor, self.conductor, "conductor mismatch");
    }

    pub fn add(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        self.check(a);
        self.check(b);
        self.make(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        self.check(a);
        self.check(b);
        self.make(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &CycloNum) -> CycloNum {
        self.make(a.coeffs.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        self.check(a);
        self.check(b);
        self.reduce(&poly_mul(&a.coeffs, &b.coeffs))
    }

    pub fn scale(&self, a: &CycloNum, q: &Q) -> CycloNum {
        self.make(a.coeffs.iter().map(|x| x * q).collect())
    }

    /// Inverse via the extended Euclidean algorithm in Q[x]: `Phi_m` is
    /// irreducible, so any nonzero residue is coprime to it.
    pub fn inv(&self, a: &CycloNum) -> Result<CycloNum, CycloError> {
        self.check(a);
        if a.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        // maintain r0 = s0 * a (mod Phi), r1 = s1 * a (mod Phi)
        let mut r0: Vec<Q> = self.modulus.clone();
        let mut r1: Vec<Q> = a.coeffs.clone();
        poly_trim(&mut r1);
        let mut s0: Vec<Q> = Vec::new();
        let mut s1: Vec<Q> = vec![Q::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let qs = poly_mul(&q, &s1);
            let mut s = s0.clone();
            s.resize(s.len().max(qs.len()), q_zero());
            for (i, c) in qs.into_iter().enumerate() {
                s[i] -= c;
            }
            poly_trim(&mut s);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is the gcd, a nonzero constant
        debug_assert_eq!(r0.len(), 1, "Phi_m is irreducible over Q");
        let c = r0[0].clone();
        let inv: Vec<Q> = s0.iter().map(|x| x / &c).collect();
        Ok(self.reduce(&inv))
    }

    pub fn pow(&self, a: &CycloNum, mut e: u64) -> CycloNum {
        let mut acc = self.one();
        let mut sq = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }
}

/// Dense matrix over `Q(zeta_m)`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    dim: usize,
    conductor: u64,
    entries: Vec<CycloNum>,
}

impl DenseMatrix {
    pub fn zero(field: &CycloField, dim: usize) -> Self {
        DenseMatrix {
            dim,
            conductor: field.conductor(),
            entries: vec![field.zero(); dim * dim],
        }
    }

    pub fn identity(field: &CycloField, dim: usize) -> Self {
        let mut m = Self::zero(field, dim);
        for i in 0..dim {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> &CycloNum {
        &self.entries[row * self.dim + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut CycloNum {
        &mut self.entries[row * self.dim + col]
    }

    /// Expands a monomial matrix into dense form: column `j` holds
    /// `zeta^phase[j]` at row `sigma[j]`. The field conductor must be a
    /// multiple of the phase modulus.
    pub fn realize(x: &MonoMatrix, field: &CycloField) -> Result<Self, CycloError> {
        let m = x.phase_modulus();
        if field.conductor() % m != 0 {
            return Err(CycloError::IncompatiblePhases(m, field.conductor()));
        }
        let lift = field.conductor() / m;
        let mut out = Self::zero(field, x.dim());
        for j in 0..x.dim() {
            *out.at_mut(x.sigma()[j], j) = field.zeta(x.phases()[j] * lift);
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &DenseMatrix, field: &CycloField) -> Result<DenseMatrix, CycloError> {
        if self.dim != rhs.dim {
            return Err(CycloError::DimMismatch(self.dim, rhs.dim));
        }
        if self.conductor != rhs.conductor {
            return Err(CycloError::ConductorMismatch(self.conductor, rhs.conductor));
        }
        let mut out = Self::zero(field, self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = field.mul(a, b);
                    *out.at_mut(i, j) = field.add(out.at(i, j), &prod);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self, field: &CycloField) -> CycloNum {
        let mut t = field.zero();
        for i in 0..self.dim {
            t = field.add(&t, self.at(i, i));
        }
        t
    }

    /// Characteristic polynomial (monic, ascending coefficients, length
    /// `dim + 1`) by the Faddeev-LeVerrier recurrence:
    /// `M_k = A M_(k-1) + c_(d-k+1) I`, `c_(d-k) = -tr(A M_(k-1)) / k`.
    pub fn char_poly(&self, field: &CycloField) -> Result<Vec<CycloNum>, CycloError> {
        let d = self.dim;
        let mut coeffs = vec![field.zero(); d + 1];
        coeffs[d] = field.one();
        let mut m = DenseMatrix::identity(field, d);
        for k in 1..=d {
            let am = self.mul(&m, field)?;
            let t = am.trace(field);
            let c = field.scale(&t, &(-Q::from_integer(BigInt::from(1)) / Q::from_integer(BigInt::from(k as i64))));
            coeffs[d - k] = c.clone();
            m = am;
            for i in 0..d {
                *m.at_mut(i, i) = field.add(m.at(i, i), &c);
            }
        }
        Ok(coeffs)
    }

    /// Exact determinant by Gaussian elimination with partial pivoting on
    /// nonzero entries.
    pub fn determinant(&self, field: &CycloField) -> Result<CycloNum, CycloError> {
        let d = self.dim;
        let mut a = self.clone();
        let mut det = field.one();
        let mut sign_flip = false;
        for col in 0..d {
            let Some(pivot_row) = (col..d).find(|&r| !a.at(r, col).is_zero()) else {
                return Ok(field.zero());
            };
            if pivot_row != col {
                for j in 0..d {
                    let hi = pivot_row * d + j;
                    let lo = col * d + j;
                    a.entries.swap(hi, lo);
                }
                sign_flip = !sign_flip;
            }
            let pivot = a.at(col, col).clone();
            det = field.mul(&det, &pivot);
            let pivot_inv = field.inv(&pivot)?;
            for row in col + 1..d {
                let factor = field.mul(a.at(row, col), &pivot_inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..d {
                    let sub = field.mul(&factor, a.at(col, j));
                    *a.at_mut(row, j) = field.sub(a.at(row, j), &sub);
                }
            }
        }
        if sign_flip {
            det = field.neg(&det);
        }
        Ok(det)
    }
}

/// Expands a cycle factorization `prod (x^l - w)` into a dense polynomial
/// over the field, for coefficient-level comparison with [`DenseMatrix::char_poly`].
pub fn expand_cycle_factors(
    factors: &crate::monomial::CycleFactors,
    field: &CycloField,
) -> Result<Vec<CycloNum>, CycloError> {
    let mut poly = vec![field.one()];
    for &(l, w) in factors.factors() {
        if field.conductor() % w.modulus != 0 {
            return Err(CycloError::IncompatiblePhases(w.modulus, field.conductor()));
        }
        let root = field.zeta(w.exp * (field.conductor() / w.modulus));
        let neg_root = field.neg(&root);
        let mut next = vec![field.zero(); poly.len() + l as usize];
        for (i, c) in poly.iter().enumerate() {
            next[i + l as usize] = field.add(&next[i + l as usize], c);
            let low = field.mul(c, &neg_root);
            next[i] = field.add(&next[i], &low);
        }
        poly = next;
    }
    Ok(poly)
}

/// Why a certificate failed dense verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyFailure {
    #[error("certificate structure invalid: {0}")]
    Structural(String),
    #[error("could not rebuild the group from the certificate: {0}")]
    Rebuild(String),
    #[error("conjugation identity fails for generator {generator} at entry ({row}, {col})")]
    EntryMismatch { generator: char, row: usize, col: usize },
    #[error("conjugator determinant is zero")]
    SingularConjugator,
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

fn permutation_of_range(v: &[u64], d: u64, what: &str) -> Result<(), VerifyFailure> {
    if v.len() as u64 != d {
        return Err(VerifyFailure::Structural(format!(
            "{what} has length {}, expected {d}",
            v.len()
        )));
    }
    let mut seen = vec![false; d as usize];
    for &x in v {
        if x >= d || seen[x as usize] {
            return Err(VerifyFailure::Structural(format!(
                "{what} is not a permutation of 0..{d}"
            )));
        }
        seen[x as usize] = true;
    }
    Ok(())
}

/// Replays a certificate with full field arithmetic: rebuilds the group and
/// the conjugator `P[j][k] = zeta^f_exps[j] * lambda^(j k)` densely over
/// `Q(zeta_M)`, checks `g P = P pi(g)` entry by entry for both generators,
/// and checks `det P != 0`. Shares no code path with the exponent-level
/// verification done at certification time.
pub fn verify_certificate(cert: &crate::certify::Certificate) -> Result<(), VerifyFailure> {
    verify_certificate_with_cap(cert, DEFAULT_CONDUCTOR_CAP)
}

pub fn verify_certificate_with_cap(
    cert: &crate::certify::Certificate,
    cap: u64,
) -> Result<(), VerifyFailure> {
    let g = crate::group::GroupSpec::from_descriptor(&cert.group)
        .map_err(|e| VerifyFailure::Rebuild(e.to_string()))?;
    let d = g.dim();
    let m = g.phase_modulus();

    if !(1..=3).contains(&cert.case) {
        return Err(VerifyFailure::Structural(format!("case {} out of range", cert.case)));
    }
    permutation_of_range(&cert.basis_order, d, "basis_order")?;
    permutation_of_range(&cert.perm_images.a, d, "perm_images.A")?;
    permutation_of_range(&cert.perm_images.c, d, "perm_images.C")?;
    if cert.f_exps.len() as u64 != d {
        return Err(VerifyFailure::Structural(format!(
            "f_exps has length {}, expected {d}",
            cert.f_exps.len()
        )));
    }
    if let Some(&bad) = cert.f_exps.iter().find(|&&e| e >= m) {
        return Err(VerifyFailure::Structural(format!(
            "f_exps entry {bad} not reduced mod {m}"
        )));
    }

    let field = CycloField::with_cap(m, cap)?;
    let step = m / d;
    let mut p_mat = DenseMatrix::zero(&field, d as usize);
    for j in 0..d {
        for k in 0..d {
            let e = (cert.f_exps[j as usize]
                + crate::numtheory::mod_mul(j, crate::numtheory::mod_mul(k, step, m), m))
                % m;
            *p_mat.at_mut(j as usize, k as usize) = field.zeta(e);
        }
    }

    let pairs: [(char, &MonoMatrix, &[u64]); 2] = [
        ('A', g.generator_a(), &cert.perm_images.a),
        ('C', g.generator_c(), &cert.perm_images.c),
    ];
    for (name, gen, image) in pairs {
        let gd = DenseMatrix::realize(gen, &field)?;
        let lhs = gd.mul(&p_mat, &field)?;
        let pi = MonoMatrix::new(
            d as usize,
            1,
            image.iter().map(|&x| x as usize).collect(),
            vec![0; d as usize],
        )
        .map_err(|e| VerifyFailure::Structural(e.to_string()))?;
        let rhs = p_mat.mul(&DenseMatrix::realize(&pi, &field)?, &field)?;
        for row in 0..d as usize {
            for col in 0..d as usize {
                if lhs.at(row, col) != rhs.at(row, col) {
                    return Err(VerifyFailure::EntryMismatch { generator: name, row, col });
                }
            }
        }
    }

    if p_mat.determinant(&field)?.is_zero() {
        return Err(VerifyFailure::SingularConjugator);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::cycle_c;

    fn ints(p: &[i64]) -> Vec<BigInt> {
        p.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn cyclotomic_polynomial_tables() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(27), ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn cyclotomic_product_identity() {
        // prod_(k | m) Phi_k = x^m - 1
        for m in 1..=30u64 {
            let mut prod = vec![Q::one()];
            for k in divisors(m) {
                let phi: Vec<Q> = cyclotomic_polynomial(k).iter().map(q_from_bigint).collect();
                prod = poly_mul(&prod, &phi);
            }
            let mut expect = vec![q_zero(); m as usize + 1];
            expect[0] = -Q::one();
            expect[m as usize] = Q::one();
            assert_eq!(prod, expect, "m = {m}");
        }
    }

    #[test]
    fn field_arithmetic_in_q_zeta9() {
        let f = CycloField::new(9).unwrap();
        assert_eq!(f.degree(), 6);
        let z = f.zeta(1);
        assert_eq!(f.pow(&z, 9), f.one());
        assert!(f.pow(&z, 3) != f.one());

        // zeta^3 is a primitive cube root: 1 + zeta^3 + zeta^6 = 0
        let z3 = f.zeta(3);
        let sum = f.add(&f.add(&f.one(), &z3), &f.mul(&z3, &z3));
        assert!(sum.is_zero());

        // inverses
        let x = f.add(&z, &f.one());
        let xi = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &xi), f.one());
        assert_eq!(f.inv(&f.zero()), Err(CycloError::DivisionByZero));
        assert_eq!(f.mul(&z, &f.inv(&z).unwrap()), f.one());
    }

    #[test]
    fn rational_detection() {
        let f = CycloField::new(3).unwrap();
        // zeta + zeta^2 = -1 in Q(zeta_3)
        let s = f.add(&f.zeta(1), &f.zeta(2));
        assert_eq!(s.as_rational(), Some(Q::from_integer(BigInt::from(-1))));
        assert_eq!(f.zeta(0).as_rational(), Some(Q::one()));
        assert_eq!(f.zeta(1).as_rational(), None);
    }

    #[test]
    fn conductor_cap_is_enforced() {
        assert!(CycloField::with_cap(2001, 2000).is_err());
        assert!(CycloField::with_cap(54, 2000).is_ok());
    }

    #[test]
    fn charpoly_of_cycle_is_x_d_minus_one() {
        let f = CycloField::new(3).unwrap();
        let c = DenseMatrix::realize(&cycle_c(3, 1, 3).unwrap(), &f).unwrap();
        let cp = c.char_poly(&f).unwrap();
        let expect = vec![f.from_int(-1), f.zero(), f.zero(), f.one()];
        assert_eq!(cp, expect);
    }

    #[test]
    fn charpoly_agrees_with_cycle_factor_expansion() {
        use std::collections::BTreeMap;
        let mut samples: Vec<MonoMatrix> = vec![
            cycle_c(3, 1, 6).unwrap(),
            cycle_c(3, 2, 9).unwrap(),
            MonoMatrix::identity(4, 8),
            MonoMatrix::new(4, 12, vec![1, 0, 3, 2], vec![3, 0, 4, 2]).unwrap(),
            MonoMatrix::new(5, 10, vec![1, 2, 0, 4, 3], vec![2, 0, 1, 5, 0]).unwrap(),
        ];
        let mut phases = BTreeMap::new();
        for rep in [0u64, 1, 2, 3, 6] {
            phases.insert(rep, rep % 9);
        }
        samples.push(crate::monomial::normalizer_a(3, 2, 4, &phases, 9).unwrap());
        for x in samples {
            let f = CycloField::new(x.phase_modulus()).unwrap();
            let dense = DenseMatrix::realize(&x, &f).unwrap();
            let direct = dense.char_poly(&f).unwrap();
            let expanded = expand_cycle_factors(&x.char_factors(), &f).unwrap();
            assert_eq!(direct, expanded);
        }
    }

    #[test]
    fn determinant_examples() {
        let f = CycloField::new(3).unwrap();
        let c = DenseMatrix::realize(&cycle_c(3, 1, 3).unwrap(), &f).unwrap();
        // det C = 1 * zeta * zeta^2 = 1
        assert_eq!(c.determinant(&f).unwrap(), f.one());
        assert_eq!(DenseMatrix::identity(&f, 4).determinant(&f).unwrap(), f.one());

        let mut singular = DenseMatrix::zero(&f, 2);
        for i in 0..2 {
            for j in 0..2 {
                *singular.at_mut(i, j) = f.one();
            }
        }
        assert!(singular.determinant(&f).unwrap().is_zero());

        // swap matrix has determinant -1
        let swap = MonoMatrix::new(2, 1, vec![1, 0], vec![0, 0]).unwrap();
        let f1 = CycloField::new(1).unwrap();
        let d = DenseMatrix::realize(&swap, &f1).unwrap();
        assert_eq!(d.determinant(&f1).unwrap(), f1.from_int(-1));
    }

    #[test]
    fn trace_matches_monomial_fixed_point_sum() {
        let mut phases = std::collections::BTreeMap::new();
        for rep in [0u64, 1, 2, 3, 6] {
            phases.insert(rep, (rep * 2) % 9);
        }
        let a = crate::monomial::normalizer_a(3, 2, 4, &phases, 9).unwrap();
        let f = CycloField::new(9).unwrap();
        let dense = DenseMatrix::realize(&a, &f).unwrap();
        let mut expect = f.zero();
        for term in a.trace_terms() {
            expect = f.add(&expect, &f.zeta(term.exp * (9 / term.modulus)));
        }
        assert_eq!(dense.trace(&f), expect);
    }

    fn certified_example() -> crate::certify::Certificate {
        let phases: std::collections::BTreeMap<u64, u64> =
            crate::numtheory::mu_orbits(9, 2).unwrap().reps().map(|rep| (rep, 0)).collect();
        let g = crate::group::GroupSpec::from_phases(3, 2, 2, &phases, None).unwrap();
        crate::certify::certify_group(&g, false).unwrap()
    }

    #[test]
    fn corrupted_images_fail_with_located_witness() {
        let good = certified_example();
        verify_certificate(&good).unwrap();

        // swapping two images of A breaks the identity at a located entry
        let mut bad = good.clone();
        bad.perm_images.a.swap(1, 2);
        match verify_certificate(&bad) {
            Err(VerifyFailure::EntryMismatch { generator: 'A', .. }) => {}
            other => panic!("expected an A-entry mismatch, got {other:?}"),
        }

        // perturbing one phase of f moves a whole conjugator row
        let mut bad = good.clone();
        bad.f_exps[4] = (bad.f_exps[4] + 1) % 18;
        match verify_certificate(&bad) {
            Err(VerifyFailure::EntryMismatch { .. }) => {}
            other => panic!("expected an entry mismatch, got {other:?}"),
        }
    }

    #[test]
    fn structurally_broken_certificates_are_rejected() {
        let good = certified_example();

        let mut bad = good.clone();
        bad.perm_images.c[0] = bad.perm_images.c[1];
        assert!(matches!(verify_certificate(&bad), Err(VerifyFailure::Structural(_))));

        let mut bad = good.clone();
        bad.basis_order.pop();
        assert!(matches!(verify_certificate(&bad), Err(VerifyFailure::Structural(_))));

        let mut bad = good.clone();
        bad.case = 7;
        assert!(matches!(verify_certificate(&bad), Err(VerifyFailure::Structural(_))));

        let mut bad = good;
        bad.f_exps[0] = 99; // not reduced mod M = 18
        assert!(matches!(verify_certificate(&bad), Err(VerifyFailure::Structural(_))));
    }
}

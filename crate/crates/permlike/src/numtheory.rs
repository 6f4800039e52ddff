//! Residue arithmetic on the scales this crate needs: moduli are small enough
//! that a `u64` value with `u128` intermediates is always exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u64 },
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        let sign = if a < 0 { -1 } else { 1 };
        return (a * sign, sign, 0);
    }
    let (g, x, y) = extended_gcd(b, a % b);
    (g, y, x - (a / b) * y)
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular exponentiation by binary method.
pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists. `mod_inv(_, 1) == Some(0)`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (g, x, _) = extended_gcd((a % m) as i128, m as i128);
    if g != 1 && m != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(u64::from(n == 1))
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// p-adic valuation with `v_p(0)` as an infinite sentinel that compares
/// greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

pub fn p_adic_valuation(mut x: u64, p: u64) -> Valuation {
    debug_assert!(p >= 2);
    if x == 0 {
        return Valuation::Infinite;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// A residue class `value mod modulus`, always stored with `value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Result<Self, NumTheoryError> {
        if modulus == 0 {
            return Err(NumTheoryError::ZeroModulus);
        }
        Ok(Residue {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: mod_mul(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn add(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: (self.value + other.value) % self.modulus,
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, exp: u64) -> Residue {
        Residue {
            value: mod_pow(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(&self) -> Result<Residue, NumTheoryError> {
        mod_inv(self.value, self.modulus)
            .map(|value| Residue { value, modulus: self.modulus })
            .ok_or(NumTheoryError::NotAUnit { value: self.value, modulus: self.modulus })
    }
}

/// Multiplicative order of a unit, found by scanning divisors of phi(m).
pub fn mult_order(r: &Residue) -> Result<u64, NumTheoryError> {
    if !r.is_unit() {
        return Err(NumTheoryError::NotAUnit { value: r.value, modulus: r.modulus });
    }
    for d in divisors(euler_phi(r.modulus)) {
        if r.pow(d).value == 1 % r.modulus {
            return Ok(d);
        }
    }
    unreachable!("order of a unit divides phi(m)")
}

/// `1 + r + r^2 + ... + r^(j-1)` in `Z/m`.
pub fn geometric_sum(r: &Residue, j: u64) -> Residue {
    let mut sum = Residue { value: 0, modulus: r.modulus };
    let mut term = Residue { value: 1 % r.modulus, modulus: r.modulus };
    for _ in 0..j {
        sum = sum.add(&term);
        term = term.mul(r);
    }
    sum
}

/// One orbit of `j -> r*j mod d`, listed in iteration order from its
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub rep: u64,
    pub members: Vec<u64>,
}

impl Orbit {
    pub fn len(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Partition of `Z/d` into orbits of multiplication by a unit `r`. The orbit
/// of 0 comes first; the rest are sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub modulus: u64,
    pub multiplier: u64,
    pub orbits: Vec<Orbit>,
}

impl OrbitPartition {
    /// Index of the orbit containing `j`.
    pub fn orbit_of(&self, j: u64) -> usize {
        self.orbits
            .iter()
            .position(|o| o.members.contains(&j))
            .expect("orbits partition Z/d")
    }

    pub fn reps(&self) -> impl Iterator<Item = u64> + '_ {
        self.orbits.iter().map(|o| o.rep)
    }
}

/// Orbits of `j -> r*j` on `Z/d` for a unit `r`.
pub fn mu_orbits(d: u64, r: u64) -> Result<OrbitPartition, NumTheoryError> {
    if d == 0 {
        return Err(NumTheoryError::ZeroModulus);
    }
    let r = r % d;
    if gcd(r, d) != 1 {
        return Err(NumTheoryError::NotAUnit { value: r, modulus: d });
    }
    let mut seen = vec![false; d as usize];
    let mut orbits = Vec::new();
    // scanning j upward makes every rep the smallest member and orders orbits by rep
    for j in 0..d {
        if seen[j as usize] {
            continue;
        }
        let mut members = Vec::new();
        let mut cur = j;
        loop {
            seen[cur as usize] = true;
            members.push(cur);
            cur = mod_mul(cur, r, d);
            if cur == j {
                break;
            }
        }
        orbits.push(Orbit { rep: j, members });
    }
    Ok(OrbitPartition { modulus: d, multiplier: r, orbits })
}

/// Order decomposition of a unit `r` in `Z/p^n`: `ord(r) = s * p^a` with
/// `s | p-1`, and the unique factorization `r = u + v*p^(n-a)` where `u` is
/// the prime-to-p torsion part (`ord(u) = s`) and `r*u^-1 = 1 + (v/u-ish)
/// p^(n-a)`-flavored p-part. `v` is the exact integer `(r - u) / p^(n-a)`
/// computed on representatives in `[0, p^n)`, zero when `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitOrderDecomp {
    pub r: Residue,
    pub order: u64,
    pub s: u64,
    pub a: u32,
    pub u: Residue,
    pub v: i64,
}

pub fn decompose_unit(r: &Residue, p: u64, n: u32) -> Result<UnitOrderDecomp, NumTheoryError> {
    if !is_prime(p) || p == 2 {
        return Err(NumTheoryError::NotOddPrime { p });
    }
    let pn = p.checked_pow(n).expect("p^n fits in u64");
    debug_assert_eq!(r.modulus, pn);
    let order = mult_order(r)?;
    let a = p_adic_valuation(order, p).finite().expect("order is nonzero");
    let s = order / p.pow(a);
    // u = r^(p^(n-1) * w) with w * p^(n-1) = 1 mod s; this lands in the
    // prime-to-p torsion subgroup and agrees with r modulo p^(n-a)
    let u = if s == 1 {
        Residue::new(1, pn)?
    } else {
        let w = mod_inv(mod_pow(p, (n - 1) as u64, s), s).expect("p^(n-1) is a unit mod s");
        r.pow(p.pow(n - 1) * w)
    };
    debug_assert_eq!(mult_order(&u)?, s);
    let shift = p.pow(n - a);
    let diff = r.value as i128 - u.value as i128;
    debug_assert_eq!(diff.rem_euclid(shift as i128) % shift as i128, 0, "u = r mod p^(n-a)");
    debug_assert_eq!(diff % shift as i128, 0);
    let v = (diff / shift as i128) as i64;
    Ok(UnitOrderDecomp { r: *r, order, s, a, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(v: i128, m: u64) -> Residue {
        Residue::new(v, m).unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(&res(2, 9)).unwrap(), 6);
        assert_eq!(mult_order(&res(4, 9)).unwrap(), 3);
        assert_eq!(mult_order(&res(1, 9)).unwrap(), 1);
        assert_eq!(mult_order(&res(2, 5)).unwrap(), 4);
        assert_eq!(
            mult_order(&res(3, 9)),
            Err(NumTheoryError::NotAUnit { value: 3, modulus: 9 })
        );
    }

    #[test]
    fn order_divides_group_order() {
        for p in [3u64, 5, 7] {
            for n in 1..=3u32 {
                let pn = p.pow(n);
                let group = p.pow(n - 1) * (p - 1);
                for v in 1..pn {
                    if gcd(v, p) != 1 {
                        continue;
                    }
                    let ord = mult_order(&res(v as i128, pn)).unwrap();
                    assert_eq!(group % ord, 0);
                }
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(3, 3), Valuation::Finite(1));
        assert_eq!(p_adic_valuation(18, 3), Valuation::Finite(2));
        assert_eq!(p_adic_valuation(0, 3), Valuation::Infinite);
        assert_eq!(p_adic_valuation(7, 3), Valuation::Finite(0));
        assert!(Valuation::Infinite > Valuation::Finite(u32::MAX));
        assert!(Valuation::Finite(2) > Valuation::Finite(1));
    }

    #[test]
    fn orbit_examples() {
        let part = mu_orbits(9, 4).unwrap();
        let got: Vec<Vec<u64>> = part.orbits.iter().map(|o| o.members.clone()).collect();
        assert_eq!(
            got,
            vec![vec![0], vec![1, 4, 7], vec![2, 8, 5], vec![3], vec![6]]
        );
        assert_eq!(part.orbits[0].rep, 0);

        let trivial = mu_orbits(9, 1).unwrap();
        assert_eq!(trivial.orbits.len(), 9);
        assert!(trivial.orbits.iter().all(|o| o.len() == 1));

        let small = mu_orbits(3, 2).unwrap();
        let got: Vec<Vec<u64>> = small.orbits.iter().map(|o| o.members.clone()).collect();
        assert_eq!(got, vec![vec![0], vec![1, 2]]);

        assert!(mu_orbits(9, 3).is_err());
    }

    #[test]
    fn orbits_partition_and_have_order_lengths() {
        for (d, r) in [(9u64, 2u64), (9, 4), (27, 4), (25, 7), (27, 2)] {
            let part = mu_orbits(d, r).unwrap();
            let mut all: Vec<u64> = part.orbits.iter().flat_map(|o| o.members.clone()).collect();
            all.sort_unstable();
            assert_eq!(all, (0..d).collect::<Vec<_>>());
            for o in &part.orbits {
                // orbit length of j is the order of r modulo d / gcd(j, d)
                let sub = d / gcd(o.rep, d);
                let expect = if sub == 1 { 1 } else { mult_order(&res(r as i128, sub)).unwrap() };
                assert_eq!(o.len(), expect, "orbit of {} mod {} under {}", o.rep, d, r);
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_unit(&res(2, 9), 3, 2).unwrap();
        assert_eq!((d.s, d.a, d.u.value(), d.v), (2, 1, 8, -2));
        assert_eq!(d.order, 6);

        let d = decompose_unit(&res(4, 9), 3, 2).unwrap();
        assert_eq!((d.s, d.a, d.u.value(), d.v), (1, 1, 1, 1));

        let d = decompose_unit(&res(1, 9), 3, 2).unwrap();
        assert_eq!((d.s, d.a, d.u.value(), d.v), (1, 0, 1, 0));

        let d = decompose_unit(&res(2, 5), 5, 1).unwrap();
        assert_eq!((d.s, d.a, d.u.value(), d.v), (4, 0, 2, 0));

        assert!(decompose_unit(&res(2, 4), 2, 2).is_err());
    }

    #[test]
    fn decompose_invariants_exhaustive() {
        for p in [3u64, 5, 7] {
            for n in 1..=3u32 {
                let pn = p.pow(n);
                for rv in 1..pn {
                    if gcd(rv, p) != 1 {
                        continue;
                    }
                    let r = res(rv as i128, pn);
                    let d = decompose_unit(&r, p, n).unwrap();
                    assert_eq!((p - 1) % d.s, 0, "s divides p-1");
                    assert_eq!(d.order, d.s * p.pow(d.a));
                    assert_eq!(mult_order(&d.u).unwrap(), d.s);
                    let recomposed =
                        Residue::new(d.u.value() as i128 + d.v as i128 * p.pow(n - d.a) as i128, pn)
                            .unwrap();
                    assert_eq!(recomposed, r, "r = u + v p^(n-a)");
                    if d.a == 0 {
                        assert_eq!(d.v, 0);
                    } else {
                        assert_eq!(gcd(d.v.unsigned_abs(), p), 1, "v prime to p when a > 0");
                    }
                }
            }
        }
    }

    #[test]
    fn geometric_sum_examples() {
        assert_eq!(geometric_sum(&res(4, 9), 3).value(), 3);
        assert_eq!(geometric_sum(&res(2, 9), 6).value(), 0);
        assert_eq!(geometric_sum(&res(5, 9), 0).value(), 0);
        assert_eq!(geometric_sum(&res(5, 9), 1).value(), 1);
    }

    #[test]
    fn geometric_sum_telescopes() {
        for m in [9u64, 27, 25, 15] {
            for rv in 0..m {
                let r = res(rv as i128, m);
                for j in 0..=12u64 {
                    let s = geometric_sum(&r, j);
                    // (r - 1) * sum = r^j - 1
                    let lhs = s.mul(&res(rv as i128 - 1, m));
                    let rhs = res(r.pow(j).value() as i128 - 1, m);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn geometric_sum_valuation_at_split_exponent() {
        // for r = 1 + v p^(n-a) with v prime to p, the p^a-term sum has
        // valuation exactly a
        for p in [3u64, 5] {
            for n in 2..=3u32 {
                let pn = p.pow(n);
                for a in 1..n {
                    for v in 1..p.pow(a) {
                        if gcd(v, p) != 1 {
                            continue;
                        }
                        let r = res((1 + v * p.pow(n - a)) as i128, pn);
                        let g = geometric_sum(&r, p.pow(a) as u64);
                        assert_eq!(p_adic_valuation(g.value(), p), Valuation::Finite(a));
                    }
                }
            }
        }
    }

    #[test]
    fn extended_gcd_and_inverse() {
        for (a, b) in [(240i128, 46i128), (0, 5), (5, 0), (-7, 9), (27, 4)] {
            let (g, x, y) = extended_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert!(g >= 0);
        }
        assert_eq!(mod_inv(4, 9), Some(7));
        assert_eq!(mod_inv(3, 9), None);
        assert_eq!(mod_inv(5, 1), Some(0));
    }

    #[test]
    fn divisor_and_phi_tables() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(27), vec![1, 3, 9, 27]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(54), 18);
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        // sum over divisors of mu(d) vanishes past 1
        for n in 2..200u64 {
            let s: i64 = divisors(n).into_iter().map(mobius).sum();
            assert_eq!(s, 0);
        }
    }
}

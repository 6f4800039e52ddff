//! Exact arithmetic for monomial matrix groups `G = <A, C>` where `C` is a
//! maximal cycle of odd prime power order `p^n` (its spectrum is all `p^n`-th
//! roots of unity, each simple) and `A` normalizes `<C>` via `A^-1 C A = C^r`.
//!
//! The library decides whether every element of `G` is *permutation-like*
//! (similar to a permutation matrix) and, when it is, constructs and verifies
//! an explicit change of basis conjugating `G` onto a group of permutation
//! matrices. All arithmetic is exact: root-of-unity phases are tracked as
//! exponents, eigenvalue bookkeeping happens on the divisor lattice, and the
//! final conjugation identities are checked in the cyclotomic field
//! `Q(zeta_M)` with `BigRational` coefficients. No floating point anywhere.
//!
//! Module map:
//! - [`numtheory`]: residue arithmetic, orders, p-adic valuations, orbits of
//!   multiplication by `r`, the `(s, p^a)` decomposition of a unit's order.
//! - [`monomial`]: generalized permutation matrices with exact phases, their
//!   algebra, and characteristic polynomial factorization per cycle.
//! - [`permsim`]: the spectral criterion deciding similarity to a permutation
//!   matrix via Moebius inversion on the divisor lattice.
//! - [`group`]: normal-form element arithmetic `A^l C^k`, generator
//!   adjustment, centralizer computation.
//! - [`certify`]: eigenbasis construction, the closed-form characteristic
//!   polynomials on the unit subspace, the recursive structure checks, and
//!   certificate production.
//! - [`cyclotomic`]: independent dense oracle over `Q(zeta_M)`; certificate
//!   verification against it.
//! - [`sweep`]: exhaustive / sampled enumeration of phase configurations with
//!   per-configuration reports.

pub mod certify;
pub mod cyclotomic;
pub mod group;
pub mod monomial;
pub mod numtheory;
pub mod permsim;
pub mod sweep;

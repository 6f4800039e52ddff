//! Deterministic sweeps over instance families: for each `(p, n)` pair and
//! each unit `r`, enumerate orbit phase assignments (exhaustively when the
//! space is small, by seeded sampling otherwise), decide permutation-likeness
//! for every resulting group, and certify every hit.
//!
//! A "violation" is a permutation-like instance whose certification, oracle
//! replay, or lemma battery fails. None exist if the implementation and the
//! underlying statements are correct, so sweeps double as a counterexample
//! search: violations are reported verbatim instead of panicking.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_group, check_lemmas, Certificate, LemmaChecks};
use crate::group::GroupSpec;
use crate::monomial::default_modulus;
use crate::numtheory::{gcd, is_prime, mu_orbits, NumTheoryError};
use crate::permsim::group_verdict_fast;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("n must be positive")]
    ZeroExponent,
    #[error("r = {r} is not a unit modulo {modulus}")]
    NotAUnit { r: u64, modulus: u64 },
    #[error("modulus {m} is not a multiple of the dimension {d}")]
    BadModulus { m: u64, d: u64 },
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// `(p, n)` pairs to sweep.
    pub pairs: Vec<(u64, u32)>,
    /// Phase modulus; per-instance default `s * p^n` when absent.
    pub modulus_override: Option<u64>,
    /// Restrict to these multipliers (validated as units per pair); all
    /// units mod `p^n` when absent.
    pub r_filter: Option<Vec<u64>>,
    /// Skip any single instance whose group order exceeds this.
    pub max_group_order: u64,
    /// Enumerate the full phase space iff `M^(#orbits)` is at most this.
    pub exhaustive_cap: u64,
    /// Number of sampled assignments otherwise (the all-zero assignment,
    /// and for r = 1 the `A = C` assignment, are always included).
    pub sample_count: u64,
    pub seed: u64,
    /// Replay every certificate densely over `Q(zeta_M)`.
    pub oracle: bool,
    /// Run the lemma battery (centralizer, split, traces, recursion) per hit.
    pub lemma_checks: bool,
    /// Record wall-clock time per row; off by default so reruns are
    /// byte-identical.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            pairs: Vec::new(),
            modulus_override: None,
            r_filter: None,
            max_group_order: 10_000,
            exhaustive_cap: 100_000,
            sample_count: 10_000,
            seed: 0,
            oracle: false,
            lemma_checks: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    Sampled,
}

/// One permutation-like instance found by a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermLikeHit {
    /// Phase exponent per orbit, in `orbit_reps` order.
    pub phases: Vec<u64>,
    pub group_order: u64,
    pub case: Option<u8>,
    pub adjust_exponent: Option<u64>,
    pub certified: bool,
    pub oracle_checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub n: u32,
    pub r: u64,
    pub m: u64,
    pub orbit_reps: Vec<u64>,
    pub mode: SweepMode,
    pub configs_checked: u64,
    /// Assignments rejected at construction (none are expected; counted
    /// rather than trusted).
    pub invalid_configs: u64,
    /// Assignments skipped by the group-order cap.
    pub skipped_configs: u64,
    pub permutation_like: Vec<PermLikeHit>,
    pub violations: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: u64,
    pub configs_checked: u64,
    pub invalid_configs: u64,
    pub skipped_configs: u64,
    pub permutation_like: u64,
    pub certified: u64,
    pub oracle_checked: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

enum Outcome {
    Invalid,
    Skipped,
    Clean,
    Hit(Box<PermLikeHit>, Vec<String>),
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    let mut rows = Vec::new();
    for &(p, n) in &config.pairs {
        if !is_prime(p) || p == 2 {
            return Err(SweepError::BadPrime(p));
        }
        if n == 0 {
            return Err(SweepError::ZeroExponent);
        }
        let d = p.pow(n);
        let r_values: Vec<u64> = match &config.r_filter {
            Some(list) => {
                let mut vals = BTreeSet::new();
                for &r in list {
                    if gcd(r % d, d) != 1 {
                        return Err(SweepError::NotAUnit { r, modulus: d });
                    }
                    vals.insert(r % d);
                }
                vals.into_iter().collect()
            }
            None => (1..d).filter(|&r| gcd(r, d) == 1).collect(),
        };
        for r in r_values {
            rows.push(run_row(config, p, n, r)?);
        }
    }

    let summary = SweepSummary {
        rows: rows.len() as u64,
        configs_checked: rows.iter().map(|r| r.configs_checked).sum(),
        invalid_configs: rows.iter().map(|r| r.invalid_configs).sum(),
        skipped_configs: rows.iter().map(|r| r.skipped_configs).sum(),
        permutation_like: rows.iter().map(|r| r.permutation_like.len() as u64).sum(),
        certified: rows
            .iter()
            .flat_map(|r| &r.permutation_like)
            .filter(|h| h.certified)
            .count() as u64,
        oracle_checked: rows
            .iter()
            .flat_map(|r| &r.permutation_like)
            .filter(|h| h.oracle_checked)
            .count() as u64,
        violations: rows.iter().map(|r| r.violations.len() as u64).sum(),
    };
    Ok(SweepReport { config: config.clone(), rows, summary })
}

fn run_row(config: &SweepConfig, p: u64, n: u32, r: u64) -> Result<SweepRow, SweepError> {
    let start = Instant::now();
    let d = p.pow(n);
    let m = match config.modulus_override {
        Some(m) => m,
        None => default_modulus(p, n, r)?,
    };
    if m == 0 || m % d != 0 {
        return Err(SweepError::BadModulus { m, d });
    }
    let orbits = mu_orbits(d, r)?;
    let reps: Vec<u64> = orbits.reps().collect();
    let k = reps.len();

    let space = BigUint::from(m).pow(k as u32);
    let exhaustive = space <= BigUint::from(config.exhaustive_cap);
    let outcomes: Vec<Outcome> = if exhaustive {
        let total: u64 = space.try_into().expect("space fits u64 under the cap");
        // position weights, most significant digit first
        let mut pows = vec![1u64; k];
        for i in (0..k.saturating_sub(1)).rev() {
            pows[i] = pows[i + 1] * m;
        }
        (0..total)
            .into_par_iter()
            .map(|i| {
                let tuple: Vec<u64> = pows.iter().map(|&w| (i / w) % m).collect();
                evaluate_tuple(config, p, n, r, m, &reps, &tuple)
            })
            .collect()
    } else {
        let tuples = sample_tuples(config, p, n, r, m, &reps);
        tuples
            .par_iter()
            .map(|t| evaluate_tuple(config, p, n, r, m, &reps, t))
            .collect()
    };

    let mut row = SweepRow {
        p,
        n,
        r,
        m,
        orbit_reps: reps,
        mode: if exhaustive { SweepMode::Exhaustive } else { SweepMode::Sampled },
        configs_checked: outcomes.len() as u64,
        invalid_configs: 0,
        skipped_configs: 0,
        permutation_like: Vec::new(),
        violations: Vec::new(),
        elapsed_ms: 0,
    };
    for outcome in outcomes {
        match outcome {
            Outcome::Invalid => row.invalid_configs += 1,
            Outcome::Skipped => row.skipped_configs += 1,
            Outcome::Clean => {}
            Outcome::Hit(hit, violations) => {
                row.violations.extend(violations);
                row.permutation_like.push(*hit);
            }
        }
    }
    if config.timing {
        row.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    Ok(row)
}

fn row_seed(seed: u64, p: u64, n: u32, r: u64, m: u64) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [p, n as u64, r, m] {
        h ^= v.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = h.rotate_left(31).wrapping_mul(0x94d0_49bb_1331_11eb);
    }
    h
}

fn sample_tuples(
    config: &SweepConfig,
    p: u64,
    n: u32,
    r: u64,
    m: u64,
    reps: &[u64],
) -> Vec<Vec<u64>> {
    let d = p.pow(n);
    let k = reps.len();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut out: Vec<Vec<u64>> = Vec::new();

    let zero = vec![0u64; k];
    seen.insert(zero.clone());
    out.push(zero);
    if r % d == 1 {
        // A = C: every orbit is a singleton {j} carrying C's phase j * M/d
        let a_eq_c: Vec<u64> = reps.iter().map(|&j| (j * (m / d)) % m).collect();
        if seen.insert(a_eq_c.clone()) {
            out.push(a_eq_c);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(row_seed(config.seed, p, n, r, m));
    let mut attempts: u64 = 0;
    while (out.len() as u64) < config.sample_count && attempts < config.sample_count * 10 {
        attempts += 1;
        let t: Vec<u64> = (0..k).map(|_| rng.gen_range(0..m)).collect();
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

fn evaluate_tuple(
    config: &SweepConfig,
    p: u64,
    n: u32,
    r: u64,
    m: u64,
    reps: &[u64],
    tuple: &[u64],
) -> Outcome {
    let phases: BTreeMap<u64, u64> =
        reps.iter().copied().zip(tuple.iter().copied()).collect();
    let g = match GroupSpec::from_phases(p, n, r, &phases, Some(m)) {
        Ok(g) => g,
        Err(_) => return Outcome::Invalid,
    };
    if g.group_order() > config.max_group_order {
        return Outcome::Skipped;
    }
    if group_verdict_fast(&g).is_err() {
        return Outcome::Clean;
    }

    let mut hit = PermLikeHit {
        phases: tuple.to_vec(),
        group_order: g.group_order(),
        case: None,
        adjust_exponent: None,
        certified: false,
        oracle_checked: false,
        lemmas: None,
        certificate: None,
    };
    let mut violations = Vec::new();
    let label = format!("p={p} n={n} r={r} M={m} phases={tuple:?}");
    match certify_group(&g, config.oracle) {
        Ok(cert) => {
            hit.case = Some(cert.case);
            hit.adjust_exponent = Some(cert.adjust_exponent);
            hit.certified = cert.verified;
            hit.oracle_checked = cert.oracle_checked;
            hit.certificate = Some(cert);
        }
        Err(e) => violations.push(format!("{label}: certification failed: {e}")),
    }
    if config.lemma_checks {
        match check_lemmas(&g) {
            Ok(l) => {
                if !l.all_hold() {
                    violations.push(format!("{label}: lemma checks failed: {l:?}"));
                }
                hit.lemmas = Some(l);
            }
            Err(e) => violations.push(format!("{label}: lemma checks errored: {e}")),
        }
    }
    Outcome::Hit(Box::new(hit), violations)
}

/// Per-row CSV summary (full details live in the JSON report).
pub fn rows_to_csv(report: &SweepReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "p",
        "n",
        "r",
        "M",
        "mode",
        "configs_checked",
        "invalid",
        "skipped",
        "permutation_like",
        "certified",
        "oracle_checked",
        "violations",
        "elapsed_ms",
    ])?;
    for row in &report.rows {
        w.write_record([
            row.p.to_string(),
            row.n.to_string(),
            row.r.to_string(),
            row.m.to_string(),
            match row.mode {
                SweepMode::Exhaustive => "exhaustive".to_string(),
                SweepMode::Sampled => "sampled".to_string(),
            },
            row.configs_checked.to_string(),
            row.invalid_configs.to_string(),
            row.skipped_configs.to_string(),
            row.permutation_like.len().to_string(),
            row.permutation_like.iter().filter(|h| h.certified).count().to_string(),
            row.permutation_like.iter().filter(|h| h.oracle_checked).count().to_string(),
            row.violations.len().to_string(),
            row.elapsed_ms.to_string(),
        ])?;
    }
    let bytes = w.into_inner().expect("csv writer over a Vec cannot fail to flush");
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(pairs: &[(u64, u32)]) -> SweepConfig {
        SweepConfig { pairs: pairs.to_vec(), oracle: true, ..SweepConfig::default() }
    }

    #[test]
    fn smallest_pair_exhaustive_counts() {
        let report = run_sweep(&base(&[(3, 1)])).unwrap();
        assert_eq!(report.rows.len(), 2);

        // r = 1, M = 3: valid normalizers are diagonal; the permutation-like
        // ones are exactly A = C^t, i.e. phases (0, t, 2t)
        let r1 = &report.rows[0];
        assert_eq!((r1.r, r1.m, r1.mode), (1, 3, SweepMode::Exhaustive));
        assert_eq!(r1.configs_checked, 27);
        assert_eq!(r1.invalid_configs, 0);
        let mut found: Vec<Vec<u64>> =
            r1.permutation_like.iter().map(|h| h.phases.clone()).collect();
        found.sort();
        assert_eq!(found, vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 1]]);

        // r = 2, M = 6: only the trivial assignment
        let r2 = &report.rows[1];
        assert_eq!((r2.r, r2.m), (2, 6));
        assert_eq!(r2.configs_checked, 36);
        assert_eq!(r2.permutation_like.len(), 1);
        assert_eq!(r2.permutation_like[0].phases, vec![0, 0]);
        assert_eq!(r2.permutation_like[0].case, Some(2));

        assert_eq!(report.summary.permutation_like, 4);
        assert_eq!(report.summary.certified, 4);
        assert_eq!(report.summary.oracle_checked, 4);
        assert_eq!(report.summary.violations, 0);
    }

    #[test]
    fn depth_two_p_case_counts() {
        // r = 4 at (3,2): hits are the C^t-shifted permutation normalizers,
        // with orbit phases (0, 3t, 6t, 3t, 6t) over reps [0, 1, 2, 3, 6]
        let mut config = base(&[(3, 2)]);
        config.r_filter = Some(vec![4]);
        config.lemma_checks = true;
        let report = run_sweep(&config).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.mode, SweepMode::Exhaustive);
        assert_eq!(row.configs_checked, 59049);
        assert_eq!(row.orbit_reps, vec![0, 1, 2, 3, 6]);
        let mut hits: Vec<(Vec<u64>, Option<u64>)> = row
            .permutation_like
            .iter()
            .map(|h| (h.phases.clone(), h.adjust_exponent))
            .collect();
        hits.sort();
        assert_eq!(
            hits,
            vec![
                (vec![0, 0, 0, 0, 0], Some(0)),
                (vec![0, 3, 6, 3, 6], Some(1)),
                (vec![0, 6, 3, 6, 3], Some(2)),
            ]
        );
        assert!(row.permutation_like.iter().all(|h| h.case == Some(1)));
        assert!(row
            .permutation_like
            .iter()
            .all(|h| h.lemmas.as_ref().is_some_and(LemmaChecks::all_hold)));
        assert!(row.violations.is_empty());
    }

    #[test]
    fn sampling_always_covers_the_known_instances() {
        // force sampling on (3,2) r = 1 (9 orbits, space 9^9) with few draws
        let mut config = base(&[(3, 2)]);
        config.r_filter = Some(vec![1]);
        config.sample_count = 50;
        config.oracle = false;
        let report = run_sweep(&config).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.mode, SweepMode::Sampled);
        assert_eq!(row.configs_checked, 50);
        let phases: Vec<&Vec<u64>> =
            row.permutation_like.iter().map(|h| &h.phases).collect();
        assert!(phases.contains(&&vec![0; 9]));
        assert!(phases.contains(&&(0..9u64).collect::<Vec<_>>()));
        assert!(row.permutation_like.iter().all(|h| h.certified));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let mut config = base(&[(3, 1)]);
        config.pairs.push((3, 2));
        config.r_filter = Some(vec![1, 2]);
        config.sample_count = 30;
        config.oracle = false;
        let a = serde_json::to_string(&run_sweep(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&run_sweep(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_rows_match_report() {
        let mut config = base(&[(3, 1)]);
        config.oracle = false;
        let report = run_sweep(&config).unwrap();
        let csv = rows_to_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + report.rows.len());
        assert!(lines[0].starts_with("p,n,r,M,mode"));
        assert!(lines[1].starts_with("3,1,1,3,exhaustive,27,0,0,3,3,0,0,0"));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            run_sweep(&base(&[(4, 1)])),
            Err(SweepError::BadPrime(4))
        ));
        let mut config = base(&[(3, 1)]);
        config.r_filter = Some(vec![3]);
        assert!(matches!(
            run_sweep(&config),
            Err(SweepError::NotAUnit { r: 3, modulus: 3 })
        ));
        let mut config = base(&[(3, 1)]);
        config.modulus_override = Some(4);
        assert!(matches!(
            run_sweep(&config),
            Err(SweepError::BadModulus { m: 4, d: 3 })
        ));
    }
}

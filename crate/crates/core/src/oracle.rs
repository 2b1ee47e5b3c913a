//! Brute-force enumerators and the cross-route verification report.
//!
//! Nothing in the enumeration half of this module calls into the formula
//! paths it is used to check: the statistics are reimplemented locally on
//! plain slices.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bijections::{
    composition_to_valleyless_perm, generate_k_valley_permutations,
    generate_valleyless_permutations, theta_decode, theta_encode, valleyless_perm_to_composition,
};
use crate::counting::{binomial, count_valley_perms, count_valleyless_nk, eulerian};
use crate::seq_core::{
    count_valleys, descent_set, inversion_count, inversion_table, is_valleyless,
    permutation_from_inversion_table, Permutation,
};
use crate::series::{
    a_n_recurrence, a_n_step, a_base, b_n_closed, b_n_recursive, gf_table1_closed_form,
    gf_valley_perms, gf_valleyless_bivariate, q_inversion_products, v_xqy, Orders,
    TruncatedSeries,
};
use crate::{Error, Result};

/// Environment variable overriding [`OracleLimits::max_perm_n`].
pub const MAX_BRUTE_N_ENV: &str = "VLS_MAX_BRUTE_N";

/// Safety caps guarding brute-force enumeration against factorial or
/// exponential blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_perm_n: usize,
    pub max_universe: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_perm_n: 10, max_universe: 100_000_000 }
    }
}

impl OracleLimits {
    /// Defaults, with the permutation cap taken from `VLS_MAX_BRUTE_N` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Self::default();
        if let Ok(raw) = std::env::var(MAX_BRUTE_N_ENV) {
            limits.max_perm_n = raw
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{MAX_BRUTE_N_ENV}={raw:?} is not a count")))?;
        }
        Ok(limits)
    }

    fn check_perm_n(&self, n: usize) -> Result<()> {
        if n > self.max_perm_n {
            return Err(Error::CapExceeded {
                what: format!("all permutations of length {n}"),
                cap: self.max_perm_n as u128,
            });
        }
        Ok(())
    }

    fn check_universe(&self, what: impl FnOnce() -> String, size: Option<u128>) -> Result<()> {
        match size {
            Some(s) if s <= self.max_universe => Ok(()),
            _ => Err(Error::CapExceeded { what: what(), cap: self.max_universe }),
        }
    }
}

/// Lexicographic stream of all permutations of `1..=n`.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<u32>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if let Some(i) = (1..succ.len()).rev().find(|&i| succ[i - 1] < succ[i]) {
            let j = (i..succ.len()).rev().find(|&j| succ[j] > succ[i - 1]).expect("pivot exists");
            succ.swap(i - 1, j);
            succ[i..].reverse();
            self.next = Some(succ);
        }
        Some(Permutation::new(cur).expect("stream yields permutations"))
    }
}

pub fn enum_permutations(n: usize, limits: &OracleLimits) -> Result<Permutations> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    limits.check_perm_n(n)?;
    Ok(Permutations { next: Some((1..=n as u32).collect()) })
}

/// Odometer over all length-`n` sequences with entries in `1..=max_entry`.
#[derive(Debug, Clone)]
pub struct BoundedSequences {
    next: Option<Vec<u32>>,
    max_entry: u32,
}

impl Iterator for BoundedSequences {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if let Some(i) = (0..succ.len()).rev().find(|&i| succ[i] < self.max_entry) {
            succ[i] += 1;
            succ[i + 1..].iter_mut().for_each(|e| *e = 1);
            self.next = Some(succ);
        }
        Some(cur)
    }
}

pub fn enum_bounded_sequences(n: usize, max_entry: u32, limits: &OracleLimits) -> Result<BoundedSequences> {
    if n == 0 || max_entry == 0 {
        return Err(Error::InvalidArgument("length and maximum entry must be at least 1".into()));
    }
    let size = u128::from(max_entry).checked_pow(n as u32);
    limits.check_universe(|| format!("{max_entry}^{n} bounded sequences"), size)?;
    Ok(BoundedSequences { next: Some(vec![1; n]), max_entry })
}

/// Counts keyed by a statistic value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatHistogram<K: Ord> {
    bins: BTreeMap<K, BigUint>,
}

impl<K: Ord> StatHistogram<K> {
    pub fn new() -> Self {
        StatHistogram { bins: BTreeMap::new() }
    }

    pub fn record(&mut self, key: K) {
        *self.bins.entry(key).or_default() += 1u32;
    }

    pub fn get(&self, key: &K) -> BigUint {
        self.bins.get(key).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.bins.values().sum()
    }

    pub fn bins(&self) -> &BTreeMap<K, BigUint> {
        &self.bins
    }
}

fn adjacent_valleys(w: &[u32]) -> usize {
    (1..w.len().saturating_sub(1)).filter(|&j| w[j] < w[j - 1] && w[j] < w[j + 1]).count()
}

fn has_valley_triple(s: &[u32]) -> bool {
    let n = s.len();
    // s_j < min(s_i, s_k) for some i < j < k iff s_j is below both its
    // prefix maximum and its suffix maximum
    (1..n.saturating_sub(1)).any(|j| {
        let left = s[..j].iter().max().copied().unwrap_or(0);
        let right = s[j + 1..].iter().max().copied().unwrap_or(0);
        s[j] < left.min(right)
    })
}

fn pair_inversions(w: &[u32]) -> usize {
    (0..w.len()).map(|i| w[i + 1..].iter().filter(|&&b| b < w[i]).count()).sum()
}

fn adjacent_descents(w: &[u32]) -> usize {
    w.windows(2).filter(|p| p[0] > p[1]).count()
}

/// Number of permutations of length `n` by valley count.
pub fn brute_valley_histogram(n: usize, limits: &OracleLimits) -> Result<StatHistogram<usize>> {
    let mut h = StatHistogram::new();
    for p in enum_permutations(n, limits)? {
        h.record(adjacent_valleys(&p));
    }
    Ok(h)
}

/// Number of permutations of length `n` by descent count.
pub fn brute_descent_histogram(n: usize, limits: &OracleLimits) -> Result<StatHistogram<usize>> {
    let mut h = StatHistogram::new();
    for p in enum_permutations(n, limits)? {
        h.record(adjacent_descents(&p));
    }
    Ok(h)
}

/// Valleyless length-`n` sequences with entries up to `max_entry`, by maximum entry.
pub fn brute_valleyless_max_histogram(
    n: usize,
    max_entry: u32,
    limits: &OracleLimits,
) -> Result<StatHistogram<u32>> {
    let mut h = StatHistogram::new();
    for s in enum_bounded_sequences(n, max_entry, limits)? {
        if !has_valley_triple(&s) {
            h.record(*s.iter().max().expect("n >= 1"));
        }
    }
    Ok(h)
}

/// `sum q^sum(s) y^max(s)` over valleyless sequences of length `n` with
/// entry sum at most `sum_cap`, found by walking every positive sequence
/// within the sum bound and discarding those with a valley.
///
/// The result is exact in `q` below `sum_cap + 1` and in `y` everywhere
/// (its `y` order exceeds the largest possible entry).
pub fn brute_valleyless_qy_polynomial(n: usize, sum_cap: usize, limits: &OracleLimits) -> Result<TruncatedSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let largest_entry = sum_cap.saturating_sub(n - 1);
    let orders = Orders::new(1, sum_cap + 1, largest_entry + 1);
    if sum_cap < n {
        return Ok(TruncatedSeries::zero(orders));
    }
    // positive sequences of length n with sum <= sum_cap number C(sum_cap, n)
    let size = u128::try_from(binomial(sum_cap as u64, n as u64)).ok();
    limits.check_universe(|| format!("length-{n} sequences with sum <= {sum_cap}"), size)?;

    fn walk(cur: &mut Vec<u32>, n: usize, budget: usize, hist: &mut BTreeMap<(usize, usize), u64>) {
        if cur.len() == n {
            if !has_valley_triple(cur) {
                let sum = cur.iter().map(|&e| e as usize).sum();
                let max = *cur.iter().max().expect("n >= 1") as usize;
                *hist.entry((sum, max)).or_default() += 1;
            }
            return;
        }
        // leave at least 1 for each remaining slot
        let remaining_slots = n - cur.len() - 1;
        for v in 1..=budget.saturating_sub(remaining_slots) {
            cur.push(v as u32);
            walk(cur, n, budget - v, hist);
            cur.pop();
        }
    }
    let mut hist = BTreeMap::new();
    walk(&mut Vec::with_capacity(n), n, sum_cap, &mut hist);
    Ok(TruncatedSeries::from_terms(hist.into_iter().map(|((p, k), c)| ((0, p, k), c)), orders))
}

/// `(sum over valleyless p of q^inv(p), sum over all p of q^inv(p))` for length `n`.
pub fn brute_inversion_polynomials(n: usize, limits: &OracleLimits) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let orders = Orders::new(1, n * n.saturating_sub(1) / 2 + 1, 1);
    let mut valleyless = vec![0u64; orders.q];
    let mut all = vec![0u64; orders.q];
    for p in enum_permutations(n, limits)? {
        let inv = pair_inversions(&p);
        all[inv] += 1;
        if !has_valley_triple(&p) {
            valleyless[inv] += 1;
        }
    }
    let poly = |c: Vec<u64>| TruncatedSeries::from_terms(c.into_iter().enumerate().map(|(e, c)| ((0, e, 0), c)), orders);
    Ok((poly(valleyless), poly(all)))
}

/// Ranges for [`verify_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyLimits {
    /// Largest length checked by every exhaustive route (0 disables all checks).
    pub max_n: usize,
    /// Entry-sum cap for the trivariate brute-force comparison.
    pub sum_cap: usize,
    pub oracle: OracleLimits,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        VerifyLimits { max_n: 8, sum_cap: 16, oracle: OracleLimits::default() }
    }
}

/// The formula routes under test. Swapping one out (e.g. for a deliberately
/// broken recurrence) shows how a failure is reported.
#[derive(Debug, Clone, Copy)]
pub struct Routes {
    pub valley_perm_count: fn(usize, usize) -> Result<BigUint>,
    pub valley_perm_gf: fn(usize, usize) -> TruncatedSeries,
    pub valleyless_nk: fn(usize, usize) -> Result<BigUint>,
}

impl Default for Routes {
    fn default() -> Self {
        Routes {
            valley_perm_count: count_valley_perms,
            valley_perm_gf: gf_valley_perms,
            valleyless_nk: count_valleyless_nk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub counterexample: Option<Value>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }

    fn run(&mut self, name: &str, check: impl FnOnce() -> std::result::Result<(), Value>) {
        let start = Instant::now();
        let outcome = check();
        self.checks.push(CheckResult {
            name: name.to_string(),
            status: if outcome.is_ok() { CheckStatus::Pass } else { CheckStatus::Fail },
            counterexample: outcome.err(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
}

type Check = std::result::Result<(), Value>;

fn err_value(e: Error) -> Value {
    json!({ "error": e.to_string() })
}

fn series_mismatch(route: &str, extra: Value, a: &TruncatedSeries, b: &TruncatedSeries) -> Check {
    match a.first_difference(b) {
        None => Ok(()),
        Some(((x, q, y), left, right)) => Err(json!({
            "route": route,
            "at": extra,
            "monomial": { "x": x, "q": q, "y": y },
            "expected": left.to_string(),
            "actual": right.to_string(),
        })),
    }
}

/// Row `k` of the valley-count table, columns `n = 1..=10`; zeros are blank cells.
pub const VALLEY_PERM_TABLE: [[u64; 10]; 5] = [
    [1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
    [0, 0, 2, 16, 88, 416, 1824, 7680, 31616, 128512],
    [0, 0, 0, 0, 16, 272, 2880, 24576, 185856, 1304832],
    [0, 0, 0, 0, 0, 0, 272, 7936, 137216, 1841152],
    [0, 0, 0, 0, 0, 0, 0, 0, 7936, 353792],
];

/// Row `n = 1..=6`, column `k = 1..=5` of the valleyless count table.
pub const VALLEYLESS_TABLE: [[u64; 5]; 6] = [
    [1, 1, 1, 1, 1],
    [1, 3, 5, 7, 9],
    [1, 6, 15, 28, 45],
    [1, 10, 35, 84, 165],
    [1, 15, 70, 210, 495],
    [1, 21, 126, 462, 1287],
];

/// Runs every cross-route identity up to the configured limits with the
/// library's own routes.
pub fn verify_all(limits: &VerifyLimits) -> VerificationReport {
    verify_all_with(limits, &Routes::default())
}

pub fn verify_all_with(limits: &VerifyLimits, routes: &Routes) -> VerificationReport {
    let mut report = VerificationReport::default();
    let max_n = limits.max_n;
    if max_n == 0 {
        return report;
    }
    let oracle = &limits.oracle;
    let perm_n = max_n.min(oracle.max_perm_n);

    report.run("inversion_table_round_trip", || {
        for n in 1..=perm_n {
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                let t = inversion_table(&p);
                if permutation_from_inversion_table(&t) != p || inversion_count(&p) != pair_inversions(&p) {
                    return Err(json!({ "perm": p.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("valleyless_definitions_agree", || {
        for n in 1..=perm_n {
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                let triple = !has_valley_triple(&p);
                if is_valleyless(&p) != triple || triple != (count_valleys(&p) == 0) {
                    return Err(json!({ "perm": p.to_string() }));
                }
            }
        }
        for n in 1..=max_n.min(6) {
            for s in enum_bounded_sequences(n, 4, oracle).map_err(err_value)? {
                let triple = !has_valley_triple(&s);
                if is_valleyless(&s) != triple || (triple && count_valleys(&s) != 0) {
                    return Err(json!({ "sequence": s }));
                }
            }
        }
        Ok(())
    });

    report.run("descent_set_vs_scan", || {
        for n in 1..=perm_n {
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                if descent_set(&p).len() != adjacent_descents(&p) {
                    return Err(json!({ "perm": p.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("inversion_table_characterizes_valleyless", || {
        for n in 1..=perm_n {
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                let extremal = inversion_table(&p)
                    .entries()
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| a == 0 || a == n - (i + 1));
                if extremal == has_valley_triple(&p) {
                    return Err(json!({ "perm": p.to_string(), "extremal_table": extremal }));
                }
            }
        }
        Ok(())
    });

    report.run("theta_round_trip", || {
        for total in 1..=max_n.clamp(12, 20) {
            for mask in 0u64..(1 << (total - 1)) {
                let cuts: BTreeSet<usize> = (1..total).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
                let c = theta_decode(&cuts, total).map_err(err_value)?;
                if theta_encode(&c) != cuts || c.total() != total {
                    return Err(json!({ "total": total, "cuts": cuts }));
                }
            }
        }
        Ok(())
    });

    report.run("valleyless_perm_composition_bijection", || {
        for n in 1..=perm_n {
            let mut images = BTreeSet::new();
            let mut count = 0usize;
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                if has_valley_triple(&p) {
                    continue;
                }
                count += 1;
                let c = valleyless_perm_to_composition(&p).map_err(err_value)?;
                if composition_to_valleyless_perm(&c) != p || c.total() != n {
                    return Err(json!({ "perm": p.to_string(), "composition": c.to_string() }));
                }
                images.insert(c);
            }
            if images.len() != count || count != 1 << (n - 1) {
                return Err(json!({ "n": n, "images": images.len(), "valleyless": count }));
            }
        }
        Ok(())
    });

    report.run("valleyless_generator_vs_brute", || {
        for n in 1..=perm_n {
            let generated: Vec<Vec<u32>> =
                generate_valleyless_permutations(n).map_err(err_value)?.into_iter().map(Permutation::into_inner).collect();
            let set: BTreeSet<Vec<u32>> = generated.iter().cloned().collect();
            let brute: BTreeSet<Vec<u32>> = enum_permutations(n, oracle)
                .map_err(err_value)?
                .filter(|p| !has_valley_triple(p))
                .map(Permutation::into_inner)
                .collect();
            if set.len() != generated.len() || set != brute {
                return Err(json!({ "n": n }));
            }
        }
        Ok(())
    });

    report.run("k_valley_generator_vs_brute", || {
        for n in 1..=perm_n {
            let mut brute: BTreeMap<usize, BTreeSet<Vec<u32>>> = BTreeMap::new();
            for p in enum_permutations(n, oracle).map_err(err_value)? {
                brute.entry(adjacent_valleys(&p)).or_default().insert(p.into_inner());
            }
            for k in 0..=(n - 1) / 2 + 1 {
                let generated: Vec<Vec<u32>> = generate_k_valley_permutations(n, k)
                    .map_err(err_value)?
                    .into_iter()
                    .map(Permutation::into_inner)
                    .collect();
                let set: BTreeSet<Vec<u32>> = generated.iter().cloned().collect();
                if set.len() != generated.len() || set != brute.remove(&k).unwrap_or_default() {
                    return Err(json!({ "route": "generator", "n": n, "k": k }));
                }
            }
        }
        Ok(())
    });

    report.run("valley_perm_table", || {
        for (k, row) in VALLEY_PERM_TABLE.iter().enumerate() {
            for (col, &expected) in row.iter().enumerate().take(max_n) {
                let n = col + 1;
                let got = (routes.valley_perm_count)(n, k).map_err(err_value)?;
                if got != BigUint::from(expected) {
                    return Err(json!({ "route": "recurrence", "n": n, "k": k, "expected": expected.to_string(), "actual": got.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("valley_perms_recurrence_vs_gf_vs_brute", || {
        let gfs: Vec<TruncatedSeries> = (0..=(max_n - 1) / 2).map(|k| (routes.valley_perm_gf)(k, max_n + 1)).collect();
        for n in 1..=max_n {
            let brute = if n <= oracle.max_perm_n {
                Some(brute_valley_histogram(n, oracle).map_err(err_value)?)
            } else {
                None
            };
            for (k, gf) in gfs.iter().enumerate().take((n - 1) / 2 + 1) {
                let rec = (routes.valley_perm_count)(n, k).map_err(err_value)?;
                let gf = gf.coefficient(n, 0, 0).to_biguint().unwrap_or_default();
                if gf != rec {
                    return Err(json!({ "route": "generating_function", "n": n, "k": k, "expected": rec.to_string(), "actual": gf.to_string() }));
                }
                if let Some(h) = &brute {
                    let b = h.get(&k);
                    if b != rec {
                        return Err(json!({ "route": "recurrence", "n": n, "k": k, "expected": b.to_string(), "actual": rec.to_string() }));
                    }
                }
            }
        }
        Ok(())
    });

    report.run("valley_perm_rows_sum_to_factorial", || {
        let mut fact = BigUint::one();
        for n in 1..=max_n.max(12) {
            fact *= n as u64;
            let sum: BigUint = (0..=(n - 1) / 2)
                .map(|k| (routes.valley_perm_count)(n, k))
                .sum::<Result<BigUint>>()
                .map_err(err_value)?;
            if sum != fact {
                return Err(json!({ "route": "recurrence", "n": n, "expected": fact.to_string(), "actual": sum.to_string() }));
            }
        }
        Ok(())
    });

    report.run("table1_closed_forms", || {
        let order = (max_n + 1).max(14);
        for k in 0..=4 {
            let closed = gf_table1_closed_form(k, order).map_err(err_value)?;
            series_mismatch("table1", json!({ "k": k }), &closed, &(routes.valley_perm_gf)(k, order))?;
        }
        Ok(())
    });

    report.run("eulerian_vs_descents", || {
        for n in 1..=perm_n {
            let h = brute_descent_histogram(n, oracle).map_err(err_value)?;
            for k in 0..n {
                let e = eulerian(n, k).map_err(err_value)?;
                if e != h.get(&k) {
                    return Err(json!({ "route": "eulerian", "n": n, "k": k, "expected": h.get(&k).to_string(), "actual": e.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("valleyless_table", || {
        for (row, values) in VALLEYLESS_TABLE.iter().enumerate().take(max_n) {
            for (col, &expected) in values.iter().enumerate() {
                let (n, k) = (row + 1, col + 1);
                let got = (routes.valleyless_nk)(n, k).map_err(err_value)?;
                if got != BigUint::from(expected) {
                    return Err(json!({ "route": "binomial", "n": n, "k": k, "expected": expected.to_string(), "actual": got.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("valleyless_binomial_vs_bivariate_vs_brute", || {
        let seq_n = max_n.min(6);
        let max_k = 5u32;
        let v = gf_valleyless_bivariate(seq_n + 1, max_k as usize + 1);
        for n in 1..=seq_n {
            let h = brute_valleyless_max_histogram(n, max_k, oracle).map_err(err_value)?;
            for k in 1..=max_k {
                let closed = (routes.valleyless_nk)(n, k as usize).map_err(err_value)?;
                let gf = v.coefficient(n, 0, k as usize).to_biguint().unwrap_or_default();
                let brute = h.get(&k);
                if closed != gf || closed != brute {
                    return Err(json!({ "route": "binomial", "n": n, "k": k, "closed": closed.to_string(), "bivariate": gf.to_string(), "brute": brute.to_string() }));
                }
            }
        }
        Ok(())
    });

    report.run("b_n_recursive_vs_closed", || {
        let orders = Orders::new(max_n.min(8), 24, 1);
        for n in 1..=max_n.min(6) {
            let closed = b_n_closed(n, orders).map_err(err_value)?;
            series_mismatch("b_n", json!({ "n": n }), &closed, &b_n_recursive(n, orders))?;
        }
        Ok(())
    });

    report.run("v_xqy_vs_a_n_vs_brute", || {
        let cap = limits.sum_cap;
        let v = v_xqy(max_n + 1, cap + 1, cap + 1);
        for n in 1..=max_n {
            let slice = v.x_slice(n);
            let rec = a_n_recurrence(n, cap + 1, cap + 1);
            series_mismatch("a_n", json!({ "n": n }), &slice, &rec)?;
            let brute = brute_valleyless_qy_polynomial(n, cap, oracle).map_err(err_value)?;
            series_mismatch("v_xqy", json!({ "n": n }), &brute, &slice)?;
        }
        Ok(())
    });

    report.run("a_n_recurrence_fails_at_two", || {
        let orders = Orders::new(1, 12, 6);
        let naive = a_n_step(2, &a_base(1, orders), &a_base(0, orders));
        if naive.agrees_with(&a_base(2, orders)) {
            return Err(json!({ "route": "a_n", "n": 2, "note": "recurrence unexpectedly reproduces a_2" }));
        }
        Ok(())
    });

    if max_n >= 10 {
        report.run("q_analog_spot_value", || {
            let expected = BigInt::from(325);
            let v = v_xqy(11, 21, 6);
            let routes = [
                ("v_xqy", v.coefficient(10, 20, 5).clone()),
                ("a_n", a_n_recurrence(10, 21, 6).coefficient(0, 20, 5).clone()),
                (
                    "brute",
                    brute_valleyless_qy_polynomial(10, 20, oracle).map_err(err_value)?.coefficient(0, 20, 5).clone(),
                ),
            ];
            for (route, got) in routes {
                if got != expected {
                    return Err(json!({ "route": route, "expected": "325", "actual": got.to_string() }));
                }
            }
            Ok(())
        });
    }

    report.run("inversion_products_vs_brute", || {
        for n in 1..=perm_n {
            let (brute_valleyless, brute_all) = brute_inversion_polynomials(n, oracle).map_err(err_value)?;
            let (valleyless, all) = q_inversion_products(n, brute_all.orders().q).map_err(err_value)?;
            series_mismatch("valleyless_inversions", json!({ "n": n }), &brute_valleyless, &valleyless)?;
            series_mismatch("q_factorial", json!({ "n": n }), &brute_all, &all)?;
            if valleyless.sum_coefficients() != BigInt::one() << (n - 1) {
                return Err(json!({ "route": "valleyless_inversions", "n": n, "at_q_equals_1": valleyless.sum_coefficients().to_string() }));
            }
        }
        Ok(())
    });

    report.run("histograms_have_full_mass", || {
        let mut fact = BigUint::one();
        for n in 1..=perm_n {
            fact *= n as u64;
            let h = brute_valley_histogram(n, oracle).map_err(err_value)?;
            if h.total() != fact {
                return Err(json!({ "n": n, "mass": h.total().to_string() }));
            }
        }
        Ok(())
    });

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn permutation_stream() {
        let one: Vec<String> = enum_permutations(1, &limits()).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(one, ["1"]);
        let three: Vec<String> = enum_permutations(3, &limits()).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(three, ["123", "132", "213", "231", "312", "321"]);
        assert_eq!(enum_permutations(9, &limits()).unwrap().count(), 362_880);
        let all: BTreeSet<Permutation> = enum_permutations(7, &limits()).unwrap().collect();
        assert_eq!(all.len(), 5040);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(enum_permutations(11, &limits()), Err(Error::CapExceeded { .. })));
        let tight = OracleLimits { max_perm_n: 3, max_universe: 10 };
        assert!(enum_permutations(4, &tight).is_err());
        assert!(enum_bounded_sequences(4, 2, &tight).is_err());
        assert!(enum_bounded_sequences(3, 2, &tight).is_ok());
        assert!(brute_valleyless_qy_polynomial(3, 8, &tight).is_err());
    }

    #[test]
    fn bounded_sequence_stream() {
        assert_eq!(enum_bounded_sequences(1, 4, &limits()).unwrap().count(), 4);
        let two: Vec<Vec<u32>> = enum_bounded_sequences(2, 2, &limits()).unwrap().collect();
        assert_eq!(two, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(enum_bounded_sequences(3, 2, &limits()).unwrap().count(), 8);
        let set: BTreeSet<Vec<u32>> = enum_bounded_sequences(4, 3, &limits()).unwrap().collect();
        assert_eq!(set.len(), 81);
    }

    #[test]
    fn valley_histograms() {
        let h = brute_valley_histogram(3, &limits()).unwrap();
        assert_eq!(h.bins(), &BTreeMap::from([(0, 4u32.into()), (1, 2u32.into())]));
        let h = brute_valley_histogram(6, &limits()).unwrap();
        assert_eq!(
            h.bins(),
            &BTreeMap::from([(0, 32u32.into()), (1, 416u32.into()), (2, 272u32.into())])
        );
        assert_eq!(brute_valley_histogram(1, &limits()).unwrap().bins(), &BTreeMap::from([(0, 1u32.into())]));
    }

    #[test]
    fn valley_histograms_reproduce_table() {
        for n in 1..=9 {
            let h = brute_valley_histogram(n, &limits()).unwrap();
            for (k, row) in VALLEY_PERM_TABLE.iter().enumerate() {
                assert_eq!(h.get(&k), BigUint::from(row[n - 1]), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn valleyless_max_histogram_reproduces_table() {
        for n in 1..=6 {
            let h = brute_valleyless_max_histogram(n, 5, &limits()).unwrap();
            for k in 1..=5u32 {
                assert_eq!(h.get(&k), BigUint::from(VALLEYLESS_TABLE[n - 1][k as usize - 1]));
            }
        }
    }

    #[test]
    fn qy_polynomial_examples() {
        let p = brute_valleyless_qy_polynomial(1, 3, &limits()).unwrap();
        let expected = TruncatedSeries::from_terms((1..=3).map(|e| ((0, e, e), 1)), p.orders());
        assert_eq!(p, expected);
        let p = brute_valleyless_qy_polynomial(2, 6, &limits()).unwrap();
        assert_eq!(p.coefficient(0, 3, 2), &BigInt::from(2));
        let p = brute_valleyless_qy_polynomial(10, 20, &limits()).unwrap();
        assert_eq!(p.coefficient(0, 20, 5), &BigInt::from(325));
    }

    #[test]
    fn inversion_polynomial_examples() {
        let (v, a) = brute_inversion_polynomials(3, &limits()).unwrap();
        let expected = TruncatedSeries::from_terms((0..4).map(|e| ((0, e, 0), 1)), v.orders());
        assert_eq!(v, expected);
        assert_eq!(a.sum_coefficients(), BigInt::from(6));
        let (_, a) = brute_inversion_polynomials(2, &limits()).unwrap();
        assert_eq!(a, TruncatedSeries::from_terms([((0, 0, 0), 1), ((0, 1, 0), 1)], a.orders()));
    }

    #[test]
    fn triple_scan_matches_naive() {
        for s in enum_bounded_sequences(5, 3, &limits()).unwrap() {
            let naive = (0..5).any(|i| (i + 1..5).any(|j| (j + 1..5).any(|k| s[j] < s[i].min(s[k]))));
            assert_eq!(has_valley_triple(&s), naive, "{s:?}");
        }
    }

    #[test]
    fn empty_limits_give_empty_passing_report() {
        let report = verify_all(&VerifyLimits { max_n: 0, ..VerifyLimits::default() });
        assert!(report.checks.is_empty());
        assert!(report.all_passed());
    }

    #[test]
    fn default_verification_passes() {
        let report = verify_all(&VerifyLimits { max_n: 6, ..VerifyLimits::default() });
        assert!(report.all_passed(), "{:#?}", report.first_failure());
        assert!(report.checks.len() > 10);
    }

    fn mutated_recurrence(n: usize, k: usize) -> Result<BigUint> {
        // 3(k + 1) in place of 2(k + 1)
        if n == 0 {
            return Err(Error::InvalidArgument("n".into()));
        }
        let mut row = vec![BigUint::one()];
        for m in 2..=n {
            row = (0..(m - 1) / 2 + 1)
                .map(|j| {
                    let mut v = row.get(j).map(|x| x * (3 * (j as u64 + 1))).unwrap_or_default();
                    if j > 0 && 2 * j <= m {
                        v += row.get(j - 1).map(|x| x * ((m - 2 * j) as u64)).unwrap_or_default();
                    }
                    v
                })
                .collect();
        }
        Ok(row.get(k).cloned().unwrap_or_default())
    }

    #[test]
    fn mutated_recurrence_is_pinpointed() {
        let routes = Routes { valley_perm_count: mutated_recurrence, ..Routes::default() };
        let report = verify_all_with(&VerifyLimits { max_n: 5, ..VerifyLimits::default() }, &routes);
        assert!(!report.all_passed());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.name, "valley_perm_table");
        let cx = failure.counterexample.as_ref().unwrap();
        // P(2, 0) = 3 * P(1, 0) = 3 under the mutation
        assert_eq!(cx["route"], "recurrence");
        assert_eq!(cx["n"], 2);
        assert_eq!(cx["k"], 0);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["checks"][0]["status"], "pass");
    }
}

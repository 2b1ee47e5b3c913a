//! Compositions and the constructive correspondences between compositions,
//! valleyless permutations and permutations with a given number of valleys.

use std::collections::BTreeSet;
use std::fmt;

use crate::seq_core::{
    count_valleys, inversion_table, is_valleyless, permutation_from_inversion_table,
    InversionTable, Permutation, Sequence,
};
use crate::{Error, Result};

/// An ordered list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidComposition);
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// The set of proper partial sums `{c_1, c_1 + c_2, ..., c_1 + ... + c_{m-1}}`.
pub fn theta_encode(c: &Composition) -> BTreeSet<usize> {
    let mut acc = 0;
    c.0[..c.0.len() - 1]
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

/// Splits `1..=total` at the given cut points.
pub fn theta_decode(cuts: &BTreeSet<usize>, total: usize) -> Result<Composition> {
    if total == 0 {
        return Err(Error::InvalidArgument("composition total must be positive".into()));
    }
    if let Some(&point) = cuts.iter().find(|&&p| p == 0 || p >= total) {
        return Err(Error::CutPointOutOfRange { point, total });
    }
    let mut parts = Vec::with_capacity(cuts.len() + 1);
    let mut prev = 0;
    for &p in cuts.iter().chain(std::iter::once(&total)) {
        parts.push(p - prev);
        prev = p;
    }
    Ok(Composition(parts))
}

/// Maps a valleyless permutation of length `n` to a composition of `n`.
///
/// Every inversion-table entry of a valleyless permutation is either `0` or
/// its maximum `n - k`; the positions `k < n` holding the maximum form the
/// cut set of the composition.
pub fn valleyless_perm_to_composition(p: &Permutation) -> Result<Composition> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("permutation must be non-empty".into()));
    }
    if !is_valleyless(p) {
        return Err(Error::NotValleyless(p.to_string()));
    }
    let n = p.len();
    let table = inversion_table(p);
    let cuts: BTreeSet<usize> = table
        .entries()
        .iter()
        .enumerate()
        .take(n - 1)
        .filter(|&(idx, &a)| a == n - (idx + 1))
        .map(|(idx, _)| idx + 1)
        .collect();
    theta_decode(&cuts, n)
}

/// Inverse of [`valleyless_perm_to_composition`].
pub fn composition_to_valleyless_perm(c: &Composition) -> Permutation {
    let n = c.total();
    let cuts = theta_encode(c);
    let table: Vec<usize> = (1..=n).map(|k| if cuts.contains(&k) { n - k } else { 0 }).collect();
    let table = InversionTable::new(table).expect("entries are 0 or n - k");
    permutation_from_inversion_table(&table)
}

fn shifted(p: &[u32]) -> impl Iterator<Item = u32> + '_ {
    p.iter().map(|&v| v + 1)
}

/// Inserts a new smallest entry at gap `pos` of `p`, shifting everything else up by one.
fn insert_one(p: &[u32], pos: usize) -> Vec<u32> {
    let mut w = Vec::with_capacity(p.len() + 1);
    w.extend(shifted(&p[..pos]));
    w.push(1);
    w.extend(shifted(&p[pos..]));
    w
}

/// All valleyless permutations of length `n`, built by repeatedly shifting
/// every entry up by one and putting a new `1` at the front or the back.
///
/// Each permutation emits its front child before its back child, so the
/// output order is deterministic; `n = 3` yields `123, 231, 132, 321`.
pub fn generate_valleyless_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let mut level: Vec<Vec<u32>> = vec![vec![1]];
    for _ in 1..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for p in &level {
            next.push(insert_one(p, 0));
            next.push(insert_one(p, p.len()));
        }
        level = next;
    }
    Ok(level.into_iter().map(Permutation::from_word_unchecked).collect())
}

/// Gaps of `p` (0 = front, `len` = back) into which a new minimum can be
/// inserted without changing the valley count: both ends, and the two gaps
/// flanking each valley.
fn valley_preserving_gaps(p: &[u32]) -> Vec<usize> {
    let n = p.len();
    let mut gaps = vec![0];
    for j in 1..n.saturating_sub(1) {
        if p[j] < p[j - 1] && p[j] < p[j + 1] {
            gaps.push(j);
            gaps.push(j + 1);
        }
    }
    if n > 0 {
        gaps.push(n);
    }
    gaps
}

/// Interior gaps not adjacent to a valley; a new minimum placed there adds a valley.
fn valley_adding_gaps(p: &[u32]) -> Vec<usize> {
    let is_valley = |j: usize| j > 0 && j + 1 < p.len() && p[j] < p[j - 1] && p[j] < p[j + 1];
    (1..p.len()).filter(|&g| !is_valley(g - 1) && !is_valley(g)).collect()
}

/// All permutations of length `n` with exactly `k` valleys.
///
/// Grown level by level from `1`: a length-`m + 1` permutation with `j`
/// valleys comes either from one with `j` valleys, by inserting a new `1` at
/// an end or next to a valley, or from one with `j - 1` valleys, by inserting
/// it into one of the remaining interior gaps. Within a level the children of
/// the `j`-valley parents come first, then those of the `(j - 1)`-valley
/// parents; each parent's children are listed by gap, left to right.
///
/// Returns an empty list when `k > (n - 1) / 2`.
pub fn generate_k_valley_permutations(n: usize, k: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    if k > (n - 1) / 2 {
        return Ok(Vec::new());
    }
    // levels[j] holds the current-length permutations with j valleys
    let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![vec![1]]];
    levels.resize(k + 1, Vec::new());
    for m in 1..n {
        // j valleys at length m + 1 only matter if k is still reachable from there
        let lowest = k.saturating_sub(n - 1 - m);
        let mut next: Vec<Vec<Vec<u32>>> = vec![Vec::new(); k + 1];
        for j in lowest..=k {
            let mut out = Vec::new();
            for p in &levels[j] {
                out.extend(valley_preserving_gaps(p).into_iter().map(|g| insert_one(p, g)));
            }
            if j > 0 {
                for p in &levels[j - 1] {
                    out.extend(valley_adding_gaps(p).into_iter().map(|g| insert_one(p, g)));
                }
            }
            debug_assert!(out.iter().all(|w| count_valleys(w) == j));
            next[j] = out;
        }
        levels = next;
    }
    Ok(levels
        .swap_remove(k)
        .into_iter()
        .map(Permutation::from_word_unchecked)
        .collect())
}

/// All valleyless sequences of length `n` whose maximum entry is exactly
/// `max`, in lexicographic order.
pub fn generate_valleyless_sequences(n: usize, max: u32) -> Result<Vec<Sequence>> {
    if n == 0 || max == 0 {
        return Err(Error::InvalidArgument("length and maximum must be at least 1".into()));
    }
    fn extend(
        cur: &mut Vec<u32>,
        n: usize,
        max: u32,
        descending: bool,
        out: &mut Vec<Sequence>,
    ) {
        if cur.len() == n {
            if cur.contains(&max) {
                out.push(Sequence::new(cur.clone()).expect("entries are positive"));
            }
            return;
        }
        let last = cur.last().copied();
        let hit_max = cur.contains(&max);
        for v in 1..=max {
            let desc = match last {
                Some(l) if v < l => true,
                Some(l) if v > l && descending => continue,
                _ => descending,
            };
            // once descending the maximum can no longer be reached
            if desc && !hit_max && v != max {
                continue;
            }
            cur.push(v);
            extend(cur, n, max, desc, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), n, max, false, &mut out);
    Ok(out)
}

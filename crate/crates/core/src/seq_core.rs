//! Sequences, permutations and the statistics used throughout the crate.
//!
//! Two different valley notions live here and are deliberately kept apart:
//!
//! - [`is_valleyless`] looks at *all* triples `i < j < k` and asks whether
//!   `s_j < min(s_i, s_k)` ever happens.
//! - [`count_valleys`] only counts interior positions strictly below both of
//!   their *immediate* neighbours.
//!
//! On permutations the two agree (`is_valleyless(p) == (count_valleys(p) == 0)`),
//! but on sequences with repeated entries they do not: `[2, 1, 1, 2]` has no
//! strict adjacent valley yet is not valleyless.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use crate::{Error, Result};

/// A finite sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Sequence(Vec<u32>);

impl Sequence {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if let Some(position) = entries.iter().position(|&e| e == 0) {
            return Err(Error::NonPositiveEntry { position: position + 1 });
        }
        Ok(Sequence(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// Largest entry, `None` for the empty sequence.
    pub fn max_entry(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }

    pub fn is_valleyless(&self) -> bool {
        is_valleyless(&self.0)
    }

    pub fn count_valleys(&self) -> usize {
        count_valleys(&self.0)
    }
}

impl Deref for Sequence {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.0)
    }
}

/// A rearrangement of `1..=n`, stored in one-line (word) notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(word: Vec<u32>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &v in &word {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(Error::NotAPermutation {
                    len: n,
                    reason: format!("value {v} out of range"),
                });
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::NotAPermutation {
                    len: n,
                    reason: format!("value {v} repeated"),
                });
            }
        }
        Ok(Permutation(word))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn reverse(n: usize) -> Self {
        Permutation((1..=n as u32).rev().collect())
    }

    /// Caller guarantees `word` is a rearrangement of `1..=n`.
    pub(crate) fn from_word_unchecked(word: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok());
        Permutation(word)
    }

    pub fn word(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn is_valleyless(&self) -> bool {
        is_valleyless(&self.0)
    }

    pub fn count_valleys(&self) -> usize {
        count_valleys(&self.0)
    }

    pub fn inversion_table(&self) -> InversionTable {
        inversion_table(self)
    }

    pub fn inversion_count(&self) -> usize {
        inversion_count(self)
    }

    pub fn descent_set(&self) -> BTreeSet<usize> {
        descent_set(self)
    }
}

impl Deref for Permutation {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.0)
    }
}

/// Writes `2731546` when every entry is a single digit, `10,2,1` otherwise.
fn write_word(f: &mut fmt::Formatter<'_>, entries: &[u32]) -> fmt::Result {
    if entries.iter().all(|&e| e <= 9) {
        for e in entries {
            write!(f, "{e}")?;
        }
        Ok(())
    } else {
        let parts: Vec<String> = entries.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// `(a_1, ..., a_n)` where `a_k` counts the entries greater than `k` that
/// appear to the left of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InversionTable(Vec<usize>);

impl InversionTable {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        for (idx, &value) in entries.iter().enumerate() {
            let k = idx + 1;
            if value > n - k {
                return Err(Error::InversionTableBound { k, value, bound: n - k });
            }
        }
        Ok(InversionTable(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// True iff no triple `i < j < k` has `s_j < min(s_i, s_k)`.
///
/// Decided in linear time: such a sequence climbs weakly to a maximum and
/// then descends weakly, so after the first strict descent no strict ascent
/// may follow.
pub fn is_valleyless(s: &[u32]) -> bool {
    let mut descending = false;
    for w in s.windows(2) {
        if w[1] < w[0] {
            descending = true;
        } else if w[1] > w[0] && descending {
            return false;
        }
    }
    true
}

/// Number of interior positions strictly below both immediate neighbours.
pub fn count_valleys(s: &[u32]) -> usize {
    s.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
}

pub fn inversion_table(p: &Permutation) -> InversionTable {
    let n = p.len();
    let mut table = vec![0usize; n];
    // Fenwick tree over values: after scanning a prefix, counts the values
    // seen so far that exceed the current one.
    let mut tree = vec![0usize; n + 1];
    for (seen, &v) in p.iter().enumerate() {
        let v = v as usize;
        let mut not_greater = 0;
        let mut i = v;
        while i > 0 {
            not_greater += tree[i];
            i &= i - 1;
        }
        table[v - 1] = seen - not_greater;
        let mut i = v;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    InversionTable(table)
}

/// Inverse of [`inversion_table`]: inserts `n, n-1, ..., 1` in turn, placing
/// `k` after exactly `a_k` of the (larger) entries already placed.
pub fn permutation_from_inversion_table(t: &InversionTable) -> Permutation {
    let n = t.len();
    let mut word: Vec<u32> = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        word.insert(t.0[k - 1], k as u32);
    }
    Permutation(word)
}

pub fn inversion_count(p: &Permutation) -> usize {
    inversion_table(p).total()
}

/// Positions `i` (1-based) with `p_i > p_{i+1}`.
pub fn descent_set(p: &Permutation) -> BTreeSet<usize> {
    p.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .map(|(i, _)| i + 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(word: &[u32]) -> Permutation {
        Permutation::new(word.to_vec()).unwrap()
    }

    fn has_valley_triple(s: &[u32]) -> bool {
        let n = s.len();
        (0..n).any(|i| {
            (i + 1..n).any(|j| (j + 1..n).any(|k| s[j] < s[i].min(s[k])))
        })
    }

    /// All permutations of 1..=n by repeated insertion; independent of the
    /// oracle module's lexicographic stream.
    fn all_perms(n: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for v in 1..=n {
            let mut next = Vec::new();
            for w in &out {
                for pos in 0..=w.len() {
                    let mut c = w.clone();
                    c.insert(pos, v);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    fn all_sequences(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w: Vec<u32>| {
                    (1..=max).map(move |v| {
                        let mut c = w.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn valleyless_examples() {
        assert!(is_valleyless(&[2, 3, 5, 2, 2]));
        assert!(is_valleyless(&[7]));
        assert!(!is_valleyless(&[2, 1, 1, 2]));
        assert!(is_valleyless(&[]));
        assert_eq!(count_valleys(&[]), 0);
    }

    #[test]
    fn valley_count_examples() {
        assert_eq!(count_valleys(&[2, 7, 3, 1, 5, 4, 6]), 2);
        assert_eq!(count_valleys(&[1, 2, 3]), 0);
        assert_eq!(count_valleys(&[2, 1, 2]), 1);
        // repeats: not valleyless, but no strict adjacent valley
        assert_eq!(count_valleys(&[2, 1, 1, 2]), 0);
    }

    #[test]
    fn triple_and_unimodal_definitions_agree() {
        for n in 0..=6 {
            for s in all_sequences(n, 4) {
                assert_eq!(is_valleyless(&s), !has_valley_triple(&s), "{s:?}");
                if is_valleyless(&s) {
                    assert_eq!(count_valleys(&s), 0, "{s:?}");
                }
            }
        }
    }

    #[test]
    fn valleyless_iff_no_valleys_on_permutations() {
        for n in 0..=8 {
            for w in all_perms(n) {
                assert_eq!(is_valleyless(&w), count_valleys(&w) == 0, "{w:?}");
            }
        }
    }

    #[test]
    fn inversion_table_examples() {
        let p = perm(&[2, 7, 3, 1, 5, 4, 6]);
        assert_eq!(inversion_table(&p).entries(), &[3, 0, 1, 2, 1, 1, 0]);
        assert_eq!(inversion_count(&p), 8);
        assert_eq!(inversion_table(&Permutation::identity(5)).entries(), &[0; 5]);
        assert_eq!(inversion_table(&perm(&[3, 2, 1])).entries(), &[2, 1, 0]);

        let t = InversionTable::new(vec![3, 0, 1, 2, 1, 1, 0]).unwrap();
        assert_eq!(permutation_from_inversion_table(&t), p);
        let t = InversionTable::new(vec![2, 1, 0]).unwrap();
        assert_eq!(permutation_from_inversion_table(&t), perm(&[3, 2, 1]));
        let t = InversionTable::new(vec![0; 4]).unwrap();
        assert_eq!(permutation_from_inversion_table(&t), Permutation::identity(4));
    }

    #[test]
    fn inversion_table_rejects_out_of_bound_entries() {
        assert_eq!(
            InversionTable::new(vec![0, 2, 0]),
            Err(Error::InversionTableBound { k: 2, value: 2, bound: 1 })
        );
        assert!(InversionTable::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn inversion_table_round_trip_and_direct_count() {
        for n in 0..=8u32 {
            for w in all_perms(n) {
                let p = perm(&w);
                let t = inversion_table(&p);
                assert_eq!(permutation_from_inversion_table(&t), p);
                let direct = (0..w.len())
                    .flat_map(|i| (i + 1..w.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| w[i] > w[j])
                    .count();
                assert_eq!(inversion_count(&p), direct);
            }
        }
    }

    #[test]
    fn reverse_permutation_statistics() {
        for n in 1..=9usize {
            let r = Permutation::reverse(n);
            assert_eq!(inversion_count(&r), n * (n - 1) / 2);
            assert_eq!(descent_set(&r), (1..n).collect());
        }
    }

    #[test]
    fn descent_set_examples() {
        let p = perm(&[2, 7, 3, 1, 5, 4, 6]);
        assert_eq!(descent_set(&p), BTreeSet::from([2, 3, 5]));
        assert!(descent_set(&Permutation::identity(6)).is_empty());
    }

    #[test]
    fn constructors_validate() {
        assert_eq!(
            Sequence::new(vec![1, 0, 2]),
            Err(Error::NonPositiveEntry { position: 2 })
        );
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::new(vec![]).is_ok());
        let s = Sequence::new(vec![2, 3, 5, 2, 2]).unwrap();
        assert_eq!((s.len(), s.sum(), s.max_entry()), (5, 14, Some(5)));
        assert_eq!(s.to_string(), "23522");
        assert_eq!(Permutation::new(vec![10, 9, 8, 7, 6, 5, 4, 3, 2, 1]).unwrap().to_string(), "10,9,8,7,6,5,4,3,2,1");
    }
}

//! Arrangements of coins into distinct aperiodic circular orders.
//!
//! Coins of the same kind are indistinguishable. An arrangement splits all
//! coins into nonempty circular sequences that are aperiodic and pairwise
//! different; `b_i` counts the arrangements with `i` sequences.

use super::walks::{least_rotation, smallest_period};

/// Aperiodic circular sequences (as least rotations) whose content fits
/// inside `mults`, sorted.
fn aperiodic_necklaces(mults: &[u32]) -> Vec<(Vec<usize>, Vec<u32>)> {
    let total: u32 = mults.iter().sum();
    let mut out = Vec::new();
    let mut seq = Vec::new();
    let mut used = vec![0u32; mults.len()];
    fn rec(mults: &[u32], total: u32, seq: &mut Vec<usize>, used: &mut Vec<u32>, out: &mut Vec<(Vec<usize>, Vec<u32>)>) {
        if !seq.is_empty() && least_rotation(seq) == *seq && smallest_period(seq) == seq.len() {
            out.push((seq.clone(), used.clone()));
        }
        if seq.len() as u32 == total {
            return;
        }
        for k in 0..mults.len() {
            if used[k] < mults[k] {
                used[k] += 1;
                seq.push(k);
                rec(mults, total, seq, used, out);
                seq.pop();
                used[k] -= 1;
            }
        }
    }
    rec(mults, total, &mut seq, &mut used, &mut out);
    out.sort();
    out
}

/// `b_i` for `i = 0..=N`, by brute-force enumeration.
pub fn arrangement_counts(mults: &[u32]) -> Vec<u64> {
    let total: u32 = mults.iter().sum();
    let words = aperiodic_necklaces(mults);
    let mut counts = vec![0u64; total as usize + 1];
    let mut left = mults.to_vec();
    fn rec(i: usize, words: &[(Vec<usize>, Vec<u32>)], left: &mut Vec<u32>, parts: usize, counts: &mut Vec<u64>) {
        if left.iter().all(|&x| x == 0) {
            counts[parts] += 1;
            return;
        }
        for j in i..words.len() {
            let content = &words[j].1;
            if content.iter().zip(left.iter()).all(|(c, l)| c <= l) {
                for (l, c) in left.iter_mut().zip(content) {
                    *l -= c;
                }
                rec(j + 1, words, left, parts + 1, counts);
                for (l, c) in left.iter_mut().zip(content) {
                    *l += c;
                }
            }
        }
    }
    rec(0, &words, &mut left, 0, &mut counts);
    counts
}

/// `sum_i (-1)^i b_i`. Vanishes for more than one coin.
pub fn coin_lemma_check(mults: &[u32]) -> i64 {
    arrangement_counts(mults)
        .iter()
        .enumerate()
        .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

/// Every multiplicity profile (a composition, zero parts excluded) with the
/// given total.
pub fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_distinct_coins() {
        assert_eq!(arrangement_counts(&[1, 1]), vec![0, 1, 1]);
        assert_eq!(coin_lemma_check(&[1, 1]), 0);
    }

    #[test]
    fn two_equal_coins() {
        assert_eq!(arrangement_counts(&[2]), vec![0, 0, 0]);
        assert_eq!(coin_lemma_check(&[2]), 0);
    }

    #[test]
    fn one_coin() {
        assert_eq!(coin_lemma_check(&[1]), -1);
    }

    #[test]
    fn vanishes_up_to_six_coins() {
        for n in 2..=6 {
            for c in compositions(n) {
                assert_eq!(coin_lemma_check(&c), 0, "profile {c:?}");
            }
        }
    }

    #[test]
    fn three_kinds_counted_by_hand() {
        // a, b, c distinct: b_1 = 2 (abc, acb), b_2 = 3, b_3 = 1
        assert_eq!(arrangement_counts(&[1, 1, 1]), vec![0, 2, 3, 1]);
        assert_eq!(compositions(3).len(), 4);
    }
}

//! Permutations, Koszul signs and unshuffles.
//!
//! A permutation `s` of `0..d` acts on tuples by `(s·x)_i = x_{s(i)}`, so
//! `s·x` is the reordered tuple `(x_{s(0)}, …, x_{s(d-1)})`. The Koszul sign
//! ε(s; x) is the parity picked up by moving graded symbols from `x` into
//! `s·x`: every inverted pair contributes the product of the two parities
//! being swapped.

use alloc::vec::Vec;

pub type Perm = Vec<usize>;

pub fn identity(d: usize) -> Perm {
    (0..d).collect()
}

pub fn is_permutation(s: &[usize]) -> bool {
    let mut seen = alloc::vec![false; s.len()];
    for &i in s {
        if i >= s.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Reorder `x` by `s`.
pub fn act<T: Clone>(s: &[usize], x: &[T]) -> Vec<T> {
    s.iter().map(|&i| x[i].clone()).collect()
}

/// The product `s1·s2`, defined so that `(s1·s2)·x = s1·(s2·x)`.
pub fn compose(s1: &[usize], s2: &[usize]) -> Perm {
    s1.iter().map(|&i| s2[i]).collect()
}

pub fn inverse(s: &[usize]) -> Perm {
    let mut inv = alloc::vec![0; s.len()];
    for (i, &j) in s.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// ε(s; x) ∈ {0, 1} for parities `x`.
pub fn koszul_epsilon(s: &[usize], parities: &[u8]) -> u8 {
    debug_assert_eq!(s.len(), parities.len());
    let mut e = 0u8;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                e ^= parities[s[i]] & parities[s[j]] & 1;
            }
        }
    }
    e
}

/// Parity of the number of inversions (the ordinary sign of `s`).
pub fn inversion_parity(s: &[usize]) -> u8 {
    let mut e = 0u8;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                e ^= 1;
            }
        }
    }
    e
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = identity(d);
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Unsh(j, d−j): permutations with s(0)<…<s(j−1) and s(j)<…<s(d−1), in
/// lexicographic order of the first block.
pub fn unshuffles(d: usize, j: usize) -> Vec<Perm> {
    assert!(j <= d, "unshuffle block larger than the tuple");
    let mut out = Vec::new();
    let mut head: Vec<usize> = (0..j).collect();
    loop {
        let mut s = head.clone();
        s.extend((0..d).filter(|i| !head.contains(i)));
        out.push(s);
        // next j-subset of 0..d
        let Some(pos) = (0..j).rev().find(|&p| head[p] < d - j + p) else {
            return out;
        };
        head[pos] += 1;
        for p in pos + 1..j {
            head[p] = head[p - 1] + 1;
        }
    }
}

/// Stable sorting permutation: `act(&s, keys)` is sorted.
pub fn sorting_permutation<K: Ord>(keys: &[K]) -> Perm {
    let mut s = identity(keys.len());
    s.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    s
}

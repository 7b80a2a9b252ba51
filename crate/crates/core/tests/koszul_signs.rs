use mcflow_core::koszul::{act, compose, inverse, koszul_epsilon, permutations, unshuffles};

/// Sign of reordering by adjacent swaps: bubble-sort the target order back
/// to the identity and accumulate the parity products of swapped entries.
fn bubble_sign(s: &[usize], parities: &[u8]) -> u8 {
    let mut arr = s.to_vec();
    let mut acc = 0u8;
    for pass in 0..arr.len() {
        for i in 0..arr.len().saturating_sub(1 + pass) {
            if arr[i] > arr[i + 1] {
                acc ^= parities[arr[i]] & parities[arr[i + 1]];
                arr.swap(i, i + 1);
            }
        }
    }
    acc
}

fn parity_vectors(d: usize) -> Vec<Vec<u8>> {
    (0..1u32 << d).map(|mask| (0..d).map(|i| ((mask >> i) & 1) as u8).collect()).collect()
}

#[test]
fn epsilon_matches_adjacent_swap_count() {
    for d in 0..=5 {
        for s in permutations(d) {
            for p in parity_vectors(d) {
                assert_eq!(koszul_epsilon(&s, &p), bubble_sign(&s, &p), "s = {s:?}, parities = {p:?}");
            }
        }
    }
}

#[test]
fn crossed_homomorphism_on_s4() {
    let perms = permutations(4);
    let mut cases = 0;
    for p in parity_vectors(4) {
        for s1 in &perms {
            for s2 in &perms {
                let lhs = koszul_epsilon(&compose(s1, s2), &p);
                let rhs = koszul_epsilon(s1, &act(s2, &p)) ^ koszul_epsilon(s2, &p);
                assert_eq!(lhs, rhs, "s1 = {s1:?}, s2 = {s2:?}, parities = {p:?}");
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 16 * 24 * 24);
}

#[test]
fn composition_acts_in_order() {
    let x = ['a', 'b', 'c', 'd'];
    for s1 in permutations(4) {
        for s2 in permutations(4) {
            assert_eq!(act(&compose(&s1, &s2), &x), act(&s1, &act(&s2, &x)));
        }
        assert_eq!(act(&inverse(&s1), &act(&s1, &x)), x.to_vec());
    }
}

/// y_k = x_k ⊗ θ_k with |y_k| = |x_k| + |θ_k|, and h(y) = Σ_{k<l} |x_k||θ_l|.
#[test]
fn sign_lemma_on_s3() {
    let h = |x: &[u8], th: &[u8]| -> u8 {
        let mut acc = 0;
        for k in 0..x.len() {
            for l in k + 1..x.len() {
                acc ^= x[k] & th[l];
            }
        }
        acc
    };
    for s in permutations(3) {
        for x in parity_vectors(3) {
            for th in parity_vectors(3) {
                let y: Vec<u8> = x.iter().zip(&th).map(|(a, b)| a ^ b).collect();
                let lhs = h(&act(&s, &x), &act(&s, &th)) ^ h(&x, &th);
                let rhs = koszul_epsilon(&s, &y) ^ koszul_epsilon(&s, &x) ^ koszul_epsilon(&s, &th);
                assert_eq!(lhs, rhs, "s = {s:?}, x = {x:?}, theta = {th:?}");
            }
        }
    }
}

#[test]
fn unshuffles_are_increasing_on_both_blocks() {
    for d in 0..=5 {
        for j in 0..=d {
            let us = unshuffles(d, j);
            let binom = (0..j).fold(1usize, |acc, i| acc * (d - i) / (i + 1));
            assert_eq!(us.len(), binom);
            for s in us {
                assert!(s[..j].windows(2).all(|w| w[0] < w[1]));
                assert!(s[j..].windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}

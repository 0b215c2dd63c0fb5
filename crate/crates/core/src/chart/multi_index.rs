//! Increasing multi-indices i₁ < … < i_k over {0, …, n−1}, ordered
//! lexicographically; this order is the coefficient layout of form fields.

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance the rightmost index that still has room
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] < n - k + j {
                break;
            }
            if j == 0 {
                return out;
            }
        }
        cur[j] += 1;
        for t in j + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// Position of an increasing multi-index in [`multi_indices`] order.
pub fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut start = 0;
    for (j, &v) in idx.iter().enumerate() {
        for skipped in start..v {
            r += binomial(n - 1 - skipped, k - 1 - j);
        }
        start = v + 1;
    }
    r
}

/// Sign of the permutation given as a sequence of distinct integers
/// (relative to their sorted order); 0 if an entry repeats.
pub fn sort_sign(seq: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enumerates_lexicographically() {
        let m = multi_indices(4, 2);
        assert_eq!(m, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(multi_indices(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(multi_indices(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn signs() {
        assert_eq!(sort_sign(&[0, 1, 2]), 1);
        assert_eq!(sort_sign(&[1, 0, 2]), -1);
        assert_eq!(sort_sign(&[2, 0, 1]), 1);
        assert_eq!(sort_sign(&[1, 1]), 0);
    }

    proptest! {
        #[test]
        fn rank_inverts_enumeration(n in 1usize..7, k in 0usize..7) {
            prop_assume!(k <= n);
            let all = multi_indices(n, k);
            prop_assert_eq!(all.len(), binomial(n, k));
            for (r, idx) in all.iter().enumerate() {
                prop_assert_eq!(rank(n, idx), r);
            }
        }
    }
}

//! Enumeration and seeded sampling of index subsets.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Lexicographic k-combinations of `0..n`.
pub struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            idx: (0..k).collect(),
            n,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All k-subsets of `0..count` when there are at most `max`, otherwise `max`
/// seeded random draws (sorted within each subset, repeats possible).
pub fn index_subsets(count: usize, k: usize, max: usize, seed: u64) -> Vec<Vec<usize>> {
    match binomial(count, k) {
        Some(total) if total <= max => Combinations::new(count, k).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..max)
                .map(|_| {
                    let mut t = sample(&mut rng, count, k).into_vec();
                    t.sort_unstable();
                    t
                })
                .collect()
        }
    }
}

/// Like [`index_subsets`] but sampled subsets are distinct and returned in lexicographic order.
pub fn distinct_index_subsets(count: usize, k: usize, max: usize, seed: u64) -> Vec<Vec<usize>> {
    match binomial(count, k) {
        Some(total) if total <= max => Combinations::new(count, k).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = BTreeSet::new();
            while seen.len() < max {
                let mut t = sample(&mut rng, count, k).into_vec();
                t.sort_unstable();
                seen.insert(t);
            }
            seen.into_iter().collect()
        }
    }
}

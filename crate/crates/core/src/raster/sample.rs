//! Seeded selection without replacement.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, and
//! the algorithm is a partial Fisher-Yates shuffle: for `i` in `0..n`, draw
//! `j` uniformly from `i..len` and swap items `i` and `j`; the first `n`
//! items, in that order, are the sample. Uniform draws below `m` take
//! `next_u64()` values and reject those at or above
//! `u64::MAX - (u64::MAX % m)`, returning `value % m`. Both pieces are fixed so
//! that any implementation reproduces the same selection.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::RasterError;

fn uniform_below(rng: &mut ChaCha8Rng, m: u64) -> u64 {
    debug_assert!(m > 0);
    let zone = u64::MAX - (u64::MAX % m);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % m;
        }
    }
}

pub fn sample_select<T: Clone>(items: &[T], n: usize, seed: u64) -> Result<Vec<T>, RasterError> {
    if n > items.len() {
        return Err(RasterError::SampleTooLarge {
            requested: n,
            available: items.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..items.len()).collect();
    for i in 0..n {
        let j = i + uniform_below(&mut rng, (items.len() - i) as u64) as usize;
        order.swap(i, j);
    }
    Ok(order[..n].iter().map(|&i| items[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn full_draw_is_permutation() {
        let items: Vec<u32> = (0..50).collect();
        let mut out = sample_select(&items, 50, 7).unwrap();
        out.sort();
        assert_eq!(out, items);
    }

    #[test]
    fn deterministic_and_distinct() {
        let items: Vec<String> = (0..4000).map(|i| format!("tile{i}")).collect();
        let a = sample_select(&items, 300, 42).unwrap();
        let b = sample_select(&items, 300, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 300);
        assert_ne!(a, sample_select(&items, 300, 43).unwrap());
    }

    #[test]
    fn too_many() {
        assert!(matches!(
            sample_select(&[1, 2, 3], 4, 0),
            Err(RasterError::SampleTooLarge {
                requested: 4,
                available: 3
            })
        ));
        assert!(sample_select::<u8>(&[], 0, 0).unwrap().is_empty());
    }

    #[test]
    fn roughly_uniform_first_pick() {
        let items: Vec<usize> = (0..5).collect();
        let mut hits = [0usize; 5];
        for seed in 0..5000 {
            hits[sample_select(&items, 1, seed).unwrap()[0]] += 1;
        }
        assert!(hits.iter().all(|&h| (850..1150).contains(&h)), "{hits:?}");
    }
}

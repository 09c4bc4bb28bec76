//! Data-parallel primitives with a sequential fallback.
//!
//! With the `parallel` feature (default) the index maps run on the rayon
//! pool; without it they are plain loops. Reductions always use a fixed
//! pairwise tree, so results are bit-identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this length a pairwise-sum leaf is summed sequentially.
const LEAF: usize = 256;

#[cfg(feature = "parallel")]
const PAR_SPLIT: usize = 1 << 14;

/// `(0..len).map(f).collect()`, parallel when enabled.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Applies `f` to every element in place.
pub fn for_each_mut<T, F>(values: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        values.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }
}

/// Pairwise (cascade) summation with a split tree that depends only on the
/// slice length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    let (lo, hi) = values.split_at(mid);
    #[cfg(feature = "parallel")]
    {
        if values.len() >= PAR_SPLIT {
            let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
            return a + b;
        }
    }
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Maximum of a slice (`-inf` for empty input).
pub fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

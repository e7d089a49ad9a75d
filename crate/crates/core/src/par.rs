//! Data-parallel driving loops with a sequential fallback.
//!
//! Every hot sweep in the crate funnels through these combinators. With the
//! `parallel` feature the unsuffixed forms fan out over rayon; without it
//! they alias the `_seq` forms. The `_seq` forms are always compiled so the
//! two execution paths can be benchmarked against each other in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn sum_u64_seq<F: Fn(usize) -> u64>(len: usize, f: F) -> u64 {
    (0..len).map(f).sum()
}

pub fn map_vec_seq<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
    (0..len).map(f).collect()
}

pub fn fold_merge_seq<A, I, F>(len: usize, init: I, fold: F) -> A
where
    I: Fn() -> A,
    F: Fn(A, usize) -> A,
{
    (0..len).fold(init(), fold)
}

#[cfg(feature = "parallel")]
pub fn sum_u64<F: Fn(usize) -> u64 + Sync + Send>(len: usize, f: F) -> u64 {
    (0..len).into_par_iter().map(f).sum()
}

#[cfg(not(feature = "parallel"))]
pub fn sum_u64<F: Fn(usize) -> u64>(len: usize, f: F) -> u64 {
    sum_u64_seq(len, f)
}

#[cfg(feature = "parallel")]
pub fn map_vec<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_vec<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
    map_vec_seq(len, f)
}

#[cfg(feature = "parallel")]
pub fn fold_merge<A, I, F, M>(len: usize, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, usize) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    (0..len)
        .into_par_iter()
        .fold(&init, fold)
        .reduce(&init, merge)
}

#[cfg(not(feature = "parallel"))]
pub fn fold_merge<A, I, F, M>(len: usize, init: I, fold: F, _merge: M) -> A
where
    I: Fn() -> A,
    F: Fn(A, usize) -> A,
    M: Fn(A, A) -> A,
{
    fold_merge_seq(len, init, fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| (i as u64).wrapping_mul(2654435761) % 97;
        assert_eq!(sum_u64(10_000, f), sum_u64_seq(10_000, f));
        assert_eq!(map_vec(100, |i| i * i), map_vec_seq(100, |i| i * i));
        let hist = fold_merge(
            1000,
            || vec![0u64; 7],
            |mut acc, i| {
                acc[i % 7] += 1;
                acc
            },
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
        let hist_seq = fold_merge_seq(
            1000,
            || vec![0u64; 7],
            |mut acc, i| {
                acc[i % 7] += 1;
                acc
            },
        );
        assert_eq!(hist, hist_seq);
        assert_eq!(hist.iter().sum::<u64>(), 1000);
    }
}

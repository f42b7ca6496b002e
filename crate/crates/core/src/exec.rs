//! Execution strategy for the data-parallel loops.
//!
//! Every hot loop in the crate (BFS frontier expansion, product tables,
//! plane enumeration, orbit sums, residual evaluation) goes through the
//! helpers here. With the `parallel` feature they fan out over rayon;
//! without it, or with [`Exec::Sequential`], they run on the calling thread.
//! Results are always returned in input order, so both paths produce
//! identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when the parallel path will actually be taken.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Map over a slice, preserving order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Map over `0..n`, preserving order.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fallible map over `0..n`; the first error in index order wins.
    pub fn try_map_range<U, E, F>(self, n: usize, f: F) -> Result<Vec<U>, E>
    where
        U: Send,
        E: Send,
        F: Fn(usize) -> Result<U, E> + Sync + Send,
    {
        self.map_range(n, f).into_iter().collect()
    }

    /// Apply `f` to disjoint mutable chunks of `data`, each tagged with its
    /// starting offset.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(k, c)| f(k * chunk, c));
            return;
        }
        data.chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k * chunk, c));
    }

    /// Map each index to a partial result and fold the partials in index
    /// order with `merge`.
    pub fn map_reduce<U, F, M>(self, n: usize, identity: U, f: F, merge: M) -> U
    where
        U: Send + Clone,
        F: Fn(usize) -> U + Sync + Send,
        M: Fn(U, U) -> U + Sync + Send,
    {
        self.map_range(n, f).into_iter().fold(identity, merge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&xs, |x| x * x);
        let b = Exec::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
        let s = Exec::Parallel.map_reduce(100, 0u64, |i| i as u64, |a, b| a + b);
        assert_eq!(s, 4950);
    }

    #[test]
    fn chunked_mutation_covers_everything() {
        let mut v = vec![0usize; 103];
        Exec::Parallel.for_each_chunk_mut(&mut v, 10, |off, c| {
            for (k, x) in c.iter_mut().enumerate() {
                *x = off + k;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| i == x));
    }
}

//! Elementary Chevalley groups over ℤ of types A and C as integer matrix
//! groups, and breadth-first enumeration of word-metric balls.

mod ball;
mod cache;
pub mod finite;
mod generators;
mod matrix;

pub use ball::{product_table, Ball, ProductTable, DEFAULT_BALL_CAP};
pub use cache::{BallCache, CACHE_ENV, CACHE_VERSION};
pub use generators::{generators_commute, steinberg_generators, GeneratorSet};
pub use matrix::{Element, IntMatrix};

use crate::error::Result;
use crate::exec::Exec;

/// Ball of radius `radius` in the Cayley graph of the Steinberg generators.
pub fn enumerate_ball(gens: &GeneratorSet, radius: usize) -> Result<Ball<IntMatrix>> {
    enumerate_ball_with(gens, radius, DEFAULT_BALL_CAP, Exec::default())
}

pub fn enumerate_ball_with(gens: &GeneratorSet, radius: usize, cap: usize, exec: Exec) -> Result<Ball<IntMatrix>> {
    Ball::enumerate(
        IntMatrix::identity(gens.matrix_dim()),
        gens.elements(),
        radius,
        cap,
        exec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    #[test]
    fn pinned_ball_sizes() {
        // independent BFS in a scripting language over the same generators
        for (f, n, sizes) in [
            (Family::A, 2, vec![1, 13, 121, 883]),
            (Family::C, 2, vec![1, 17, 209, 2073]),
            (Family::C, 3, vec![1, 37, 961]),
        ] {
            let g = steinberg_generators(f, n).unwrap();
            let b = enumerate_ball(&g, sizes.len() - 1).unwrap();
            let got: Vec<usize> = (0..sizes.len()).map(|r| b.size_at(r)).collect();
            assert_eq!(got, sizes, "{f}{n}");
        }
    }

    #[test]
    fn sequential_and_parallel_balls_agree() {
        let g = steinberg_generators(Family::C, 2).unwrap();
        let a = enumerate_ball_with(&g, 3, DEFAULT_BALL_CAP, Exec::Sequential).unwrap();
        let b = enumerate_ball_with(&g, 3, DEFAULT_BALL_CAP, Exec::Parallel).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn product_table_identities() {
        let g = steinberg_generators(Family::A, 2).unwrap();
        let b1 = enumerate_ball(&g, 1).unwrap();
        let b2 = enumerate_ball(&g, 2).unwrap();
        let t = product_table(&b1, &b2, Exec::default()).unwrap();
        for j in 0..b1.len() {
            assert_eq!(t.get(0, j), j);
            assert_eq!(t.get(j, b1.inverse(j)), 0);
        }
        let x = IntMatrix::elementary(3, &[(0, 1, 1)]);
        let y = IntMatrix::elementary(3, &[(1, 2, 1)]);
        let (i, j) = (b1.index_of(&x).unwrap(), b1.index_of(&y).unwrap());
        let direct = IntMatrix::from_rows(&[vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        assert_eq!(b2.element(t.get(i, j)), &direct);
        assert!(product_table(&b1, &b1, Exec::default()).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        let g = steinberg_generators(Family::A, 2).unwrap();
        let built = cache.ball(Family::A, 2, 2, || enumerate_ball(&g, 2)).unwrap();
        let loaded = cache.ball(Family::A, 2, 2, || panic!("should hit the cache")).unwrap();
        assert_eq!(built.elements(), loaded.elements());
        assert_eq!(loaded.index_of(built.element(50)), Some(50));
        let t1 = cache.table(Family::A, 2, &built, 1, Exec::default()).unwrap();
        let t2 = cache.table(Family::A, 2, &loaded, 1, Exec::default()).unwrap();
        assert_eq!(t1.row(5), t2.row(5));
    }
}

//! Seeded generators for test instances. All randomness flows through a
//! SplitMix64 stream so that a seed fully determines every report.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::exterior::{Covector, SimpleTwoVector, Vector};
use crate::planar::Vec2;
use crate::polytope::{PlaneBasis, SymPolygon, SymPolytope};
use crate::scalar::Scalar;

/// Default coordinate range `[-M, M]` for sampled integer vectors.
pub const DEFAULT_RANGE: i64 = 10;

pub struct Sampler {
    seed: u64,
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn int_vector<T: Scalar>(&mut self, dim: usize, range: i64) -> Vector<T> {
        Vector((0..dim).map(|_| T::from_i64(self.int(-range, range))).collect())
    }

    /// A simple 2-vector with integer coordinates in `[-range, range]`,
    /// rejecting dependent pairs.
    pub fn two_vector<T: Scalar>(&mut self, dim: usize, range: i64) -> SimpleTwoVector<T> {
        loop {
            let s = SimpleTwoVector {
                v1: self.int_vector(dim, range),
                v2: self.int_vector(dim, range),
            };
            if !s.is_degenerate() {
                return s;
            }
        }
    }

    pub fn plane<T: Scalar>(&mut self, dim: usize, range: i64) -> PlaneBasis<T> {
        let s = self.two_vector(dim, range);
        PlaneBasis { u1: s.v1, u2: s.v2 }
    }

    /// Random rational in `[-range, range]` with denominator at most `max_den`.
    pub fn rational<T: Scalar>(&mut self, range: i64, max_den: i64) -> T {
        let d = self.int(1, max_den);
        T::from_ratio(self.int(-range * d, range * d), d)
    }

    /// Symmetric polytope with `pairs` random integer facet pairs (after
    /// deduplication, possibly fewer), retried until bounded.
    pub fn sym_polytope<T: Scalar>(&mut self, dim: usize, pairs: usize, range: i64) -> SymPolytope<T> {
        loop {
            let facets: Vec<Covector<T>> = (0..pairs)
                .map(|_| loop {
                    let g = Covector(self.int_vector::<T>(dim, range).0);
                    if !g.is_zero() {
                        break g;
                    }
                })
                .collect();
            if let Ok(body) = SymPolytope::new(dim, facets) {
                return body;
            }
        }
    }

    /// Symmetric polygon: hull of `±` a handful of random rational points,
    /// with at most `max_pairs` edge pairs.
    pub fn sym_polygon<T: Scalar>(&mut self, max_pairs: usize, range: i64) -> SymPolygon<T> {
        loop {
            let count = self.int(2, max_pairs as i64) as usize;
            let pts: Vec<Vec2<T>> = (0..count)
                .map(|_| Vec2::new(self.rational(range, 4), self.rational(range, 4)))
                .collect();
            if let Ok(k) = SymPolygon::from_points(&pts) {
                if k.n() <= max_pairs {
                    return k;
                }
            }
        }
    }

    /// Strictly positive weights summing to one.
    pub fn weights<T: Scalar>(&mut self, n: usize) -> Vec<T> {
        let raw: Vec<i64> = (0..n).map(|_| self.int(1, 9)).collect();
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|r| T::from_ratio(r, total)).collect()
    }

    /// Nonnegative weights summing to one, some of which may be zero (but not all).
    pub fn weights_with_zeros<T: Scalar>(&mut self, n: usize) -> Vec<T> {
        loop {
            let raw: Vec<i64> = (0..n).map(|_| self.int(0, 6)).collect();
            let total: i64 = raw.iter().sum();
            if total > 0 {
                return raw.into_iter().map(|r| T::from_ratio(r, total)).collect();
            }
        }
    }
}

//! Experiments with the coefficient criterion for `k`-dimensional
//! Busemann-Hausdorff convexity, `k = 2, 3`.
//!
//! Given a symmetric polyhedron `K ⊂ R^k` with facet pairs `f_1^K..f_n^K`,
//! one looks for coefficients `μ_T` (`T` a `k`-subset of `1..n`) with
//! `|Σ μ_T det(f_T)| <= 1 / vol(K')` whenever `f_i <= 1` on `K'`, and equality
//! for `(K, f^K)`. For `k = 2`, `μ_ij = p_i p_j` works; for `k = 3` no
//! construction is known, and [`mu_search`] only reports what sampled LPs say.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::density::{volume_k, volume_with_vertices};
use crate::error::{check_dim, Error, Result};
use crate::exterior::{Covector, Vector};
use crate::linalg::{combinations, determinant, rank};
use crate::lp::{FeasibilityProblem, LpOutcome};
use crate::polytope::{section, ConstraintPolytope, PlaneBasis, SymPolytope};
use crate::sampling::Sampler;
use crate::scalar::{is_negligible, max_of, Scalar};

/// Coefficients `μ_T` indexed by strictly increasing `k`-tuples from `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuCoefficients<T> {
    k: usize,
    n: usize,
    values: BTreeMap<Vec<usize>, T>,
}

impl<T: Scalar> MuCoefficients<T> {
    pub fn zero(k: usize, n: usize) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::InvalidInput(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
        }
        Ok(MuCoefficients {
            k,
            n,
            values: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, tuple: &[usize], value: T) -> Result<()> {
        if tuple.len() != self.k || tuple.windows(2).any(|w| w[0] >= w[1]) || tuple.iter().any(|&i| i >= self.n) {
            return Err(Error::InvalidInput(format!("{tuple:?} is not an increasing {}-tuple below {}", self.k, self.n)));
        }
        if value.is_zero() {
            self.values.remove(tuple);
        } else {
            self.values.insert(tuple.to_vec(), value);
        }
        Ok(())
    }

    pub fn get(&self, tuple: &[usize]) -> T {
        self.values.get(tuple).cloned().unwrap_or_else(T::zero)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero entries in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.values.iter()
    }

    /// Values in the order of [`combinations`]`(n, k)`.
    pub fn to_vec(&self) -> Vec<T> {
        combinations(self.n, self.k).iter().map(|t| self.get(t)).collect()
    }

    pub fn from_vec(k: usize, n: usize, values: &[T]) -> Result<Self> {
        let tuples = combinations(n, k);
        check_dim(tuples.len(), values.len())?;
        let mut mu = Self::zero(k, n)?;
        for (t, v) in tuples.iter().zip(values) {
            mu.set(t, v.clone())?;
        }
        Ok(mu)
    }

    /// `μ_ij = ±p_i p_j` for a polygon `K ⊂ R^2`, indexed by its facet order.
    /// The sign is that of `det(f_i^K, f_j^K)`, which makes every term of
    /// `Σ μ_ij det(f_i^K, f_j^K)` positive, as in side order.
    pub fn planar_products(k: &SymPolytope<T>) -> Result<Self> {
        check_dim(2, k.dim())?;
        let polygon = section(k, &PlaneBasis::coordinate(2, 0, 1)?)?;
        let n = k.facets().len();
        let mut p = vec![T::zero(); n];
        for e in polygon.edges() {
            let facet = e.facet.as_ref().expect("section annotates facets");
            p[facet.index] = e.weight.clone();
        }
        let mut mu = Self::zero(2, n)?;
        for i in 0..n {
            for j in i + 1..n {
                let orient = determinant(vec![k.facets()[i].0.clone(), k.facets()[j].0.clone()]);
                let w = p[i].clone() * p[j].clone();
                mu.set(&[i, j], if orient.is_negative() { -w } else { w })?;
            }
        }
        Ok(mu)
    }
}

/// `x ↦ (f_1^K(x), …, f_n^K(x))`, an isometry from `(R^k, ||·||_K)` into `l∞^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinfEmbedding<T> {
    pub functionals: Vec<Covector<T>>,
}

impl<T: Scalar> LinfEmbedding<T> {
    pub fn apply(&self, x: &Vector<T>) -> Result<Vector<T>> {
        Ok(Vector(self.functionals.iter().map(|f| f.apply(x)).collect::<Result<_>>()?))
    }
}

/// Checks that every functional of `K` supports a facet and that
/// `max_i |f_i(v)| = 1` at every vertex.
pub fn embed_linf<T: Scalar>(k: &SymPolytope<T>) -> Result<LinfEmbedding<T>> {
    let dim = k.dim();
    let vertices = k.vertices();
    let embedding = LinfEmbedding {
        functionals: k.facets().to_vec(),
    };
    for v in &vertices {
        let image = embedding.apply(v)?;
        let norm = image.0.iter().fold(T::zero(), |m, c| max_of(m, c.abs()));
        if !is_negligible(&(norm - T::one()), &T::one()) {
            return Err(Error::ConstraintViolation("a vertex does not map to the l-infinity unit sphere".into()));
        }
    }
    for (i, f) in embedding.functionals.iter().enumerate() {
        let tight: Vec<Vec<T>> = vertices
            .iter()
            .filter(|v| is_negligible(&(f.apply_unchecked(v) - T::one()), &T::one()))
            .map(|v| v.0.clone())
            .collect();
        if tight.is_empty() || rank(tight) < dim {
            return Err(Error::InvalidInput(format!("functional {i} does not support a facet")));
        }
    }
    Ok(embedding)
}

/// A test polyhedron `K'` with functionals `f_i <= 1` on it.
#[derive(Debug, Clone, PartialEq)]
pub struct KInstance<T> {
    k_prime: ConstraintPolytope<T>,
    f: Vec<Covector<T>>,
    volume: T,
}

impl<T: Scalar> KInstance<T> {
    pub fn new(k_prime: ConstraintPolytope<T>, f: Vec<Covector<T>>) -> Result<Self> {
        for g in &f {
            check_dim(k_prime.dim, g.dim())?;
        }
        if !(2..=3).contains(&k_prime.dim) {
            return Err(Error::InvalidInput(format!("volume_k supports k = 2, 3, got {}", k_prime.dim)));
        }
        if !k_prime.is_bounded() {
            return Err(Error::Unbounded("polyhedron has a recession direction".into()));
        }
        let verts = k_prime.vertices();
        let volume = volume_with_vertices(&k_prime, &verts)?;
        if !volume.is_positive() {
            return Err(Error::Degenerate("K' has zero volume".into()));
        }
        for v in &verts {
            for (i, g) in f.iter().enumerate() {
                let excess = g.apply_unchecked(v) - T::one();
                if excess.is_positive() && !is_negligible(&excess, &T::one()) {
                    return Err(Error::InvalidInput(format!("f_{i} exceeds 1 on K'")));
                }
            }
        }
        Ok(KInstance { k_prime, f, volume })
    }

    pub fn k_prime(&self) -> &ConstraintPolytope<T> {
        &self.k_prime
    }

    pub fn functionals(&self) -> &[Covector<T>] {
        &self.f
    }

    pub fn volume(&self) -> &T {
        &self.volume
    }

    /// `1 / vol(K')`.
    pub fn bound(&self) -> T {
        T::one() / self.volume.clone()
    }
}

/// `det(f_T)` for every tuple `T`, in [`combinations`] order.
pub fn minors<T: Scalar>(k: usize, f: &[Covector<T>]) -> Vec<T> {
    combinations(f.len(), k)
        .iter()
        .map(|t| determinant(t.iter().map(|&i| f[i].0.clone()).collect()))
        .collect()
}

/// `Σ μ_T det(f_T)`.
pub fn mu_signed<T: Scalar>(mu: &MuCoefficients<T>, f: &[Covector<T>]) -> Result<T> {
    check_dim(mu.n, f.len())?;
    for g in f {
        check_dim(mu.k, g.dim())?;
    }
    Ok(mu.entries().fold(T::zero(), |acc, (t, c)| {
        acc + c.clone() * determinant(t.iter().map(|&i| f[i].0.clone()).collect())
    }))
}

/// `|Σ μ_T det(f_T)|`.
pub fn mu_lhs<T: Scalar>(mu: &MuCoefficients<T>, inst: &KInstance<T>) -> Result<T> {
    mu_signed(mu, &inst.f).map(|v| v.abs())
}

/// `K' = K ∩ {|g| <= 1}` for one to three random rational `g`, and `f_i`
/// either `f_i^K` or a random facet functional of `K'`, scaled by a random
/// factor in `(0, 1]`.
pub fn sample_instance<T: Scalar>(k: &SymPolytope<T>, sampler: &mut Sampler) -> Result<KInstance<T>> {
    let dim = k.dim();
    let mut functionals = k.facets().to_vec();
    for _ in 0..sampler.int(1, 3) {
        let d = T::from_i64(sampler.int(1, 3));
        let g = loop {
            let g = Covector(sampler.int_vector::<T>(dim, 3).0);
            if !g.is_zero() {
                break g;
            }
        };
        functionals.push(g.scale(&(T::one() / d)));
    }
    let k_prime = ConstraintPolytope::symmetric(dim, &functionals)?;
    let f = k
        .facets()
        .iter()
        .map(|fk| {
            let base = if sampler.coin() {
                fk.clone()
            } else {
                let g = functionals[sampler.index(functionals.len())].clone();
                if sampler.coin() {
                    g
                } else {
                    g.neg()
                }
            };
            base.scale(&T::from_ratio(sampler.int(1, 8), 8))
        })
        .collect();
    KInstance::new(k_prime, f)
}

/// Fresh instances on which `|Σ μ_T det(f_T)| > 1 / vol(K')`.
pub fn violating_instances<T: Scalar>(mu: &MuCoefficients<T>, k: &SymPolytope<T>, n: usize, seed: u64) -> Result<Vec<KInstance<T>>> {
    let mut sampler = Sampler::new(seed);
    let instances: Vec<KInstance<T>> = (0..n).map(|_| sample_instance(k, &mut sampler)).collect::<Result<_>>()?;
    let flags = instances
        .par_iter()
        .map(|inst| {
            let excess = mu_lhs(mu, inst)? - inst.bound();
            Ok(excess.is_positive() && !is_negligible(&excess, &T::one()))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(instances.into_iter().zip(flags).filter(|(_, bad)| *bad).map(|(i, _)| i).collect())
}

/// Number of fresh instances on which `|Σ μ_T det(f_T)| > 1 / vol(K')`.
pub fn revalidate<T: Scalar>(mu: &MuCoefficients<T>, k: &SymPolytope<T>, n: usize, seed: u64) -> Result<usize> {
    violating_instances(mu, k, n, seed).map(|v| v.len())
}

#[derive(Debug, Clone, PartialEq)]
pub enum MuSearchStatus<T> {
    /// Feasible on every sample with the equality taken with this sign.
    SampleFeasible { sign: i8, witness: MuCoefficients<T> },
    /// Both signs infeasible; one Farkas certificate per sign (`+`, then `-`).
    SampleInfeasible { certificates: [Vec<T>; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuSearchReport<T> {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub n_samples: usize,
    pub status: MuSearchStatus<T>,
    /// Solve-and-revalidate rounds; violated fresh instances of one round
    /// become constraints of the next.
    pub rounds: usize,
    /// Sampled constraints in the final LP (`n_samples` plus added cuts).
    pub n_constraints: usize,
    /// Fresh instances checked against the final witness, on a stream not
    /// used to fit it (0 when infeasible).
    pub revalidation_samples: usize,
    pub revalidation_violations: usize,
}

impl<T> MuSearchReport<T> {
    /// Sampled LPs give necessary conditions only; this is never a proof.
    pub const DISCLAIMER: &'static str =
        "sample feasibility is a necessary condition only; no claim is made for all polyhedra";
}

/// Seed of the fresh stream used for revalidation.
pub fn revalidation_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Most solve-and-revalidate rounds of [`mu_search`].
pub const MAX_ROUNDS: usize = 3;

/// Exact LP over `μ`: `Σ μ_T det(f^K_T) = ±1 / vol(K)` and
/// `|Σ μ_T det(f_T)| <= 1 / vol(K')` on `n_samples` sampled instances.
/// A feasible witness is rechecked on `n_revalidate` fresh instances; the
/// violated ones are added as constraints and the LP is solved again, up to
/// [`MAX_ROUNDS`] times, each round on a new stream.
pub fn mu_search<T: Scalar>(k: &SymPolytope<T>, n_samples: usize, seed: u64, n_revalidate: usize) -> Result<MuSearchReport<T>> {
    let dim = k.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidInput(format!("mu_search supports k = 2, 3, got {dim}")));
    }
    let embedding = embed_linf(k)?;
    let n = embedding.functionals.len();
    let vol = volume_k(&k.to_constraints())?;
    let mut sampler = Sampler::new(seed);
    let instances: Vec<KInstance<T>> = (0..n_samples)
        .map(|_| sample_instance(k, &mut sampler))
        .collect::<Result<_>>()?;
    let rows: Vec<(Vec<T>, T)> = instances.par_iter().map(|i| (minors(dim, &i.f), i.bound())).collect();
    let eq_row = minors(dim, &embedding.functionals);
    let n_vars = eq_row.len();
    let mut certificates = Vec::new();
    let mut rounds = 0;
    let mut n_constraints = n_samples;
    'signs: for sign in [1i8, -1] {
        let mut problem = FeasibilityProblem::new(n_vars);
        let target = T::from_i64(i64::from(sign)) / vol.clone();
        problem.add_eq(eq_row.clone(), target)?;
        let add = |problem: &mut FeasibilityProblem<T>, row: &[T], bound: &T| -> Result<()> {
            problem.add_le(row.to_vec(), bound.clone())?;
            problem.add_le(row.iter().map(|c| -c.clone()).collect(), bound.clone())
        };
        for (row, bound) in &rows {
            add(&mut problem, row, bound)?;
        }
        n_constraints = n_samples;
        for round in 0..MAX_ROUNDS {
            rounds = round + 1;
            let witness = match problem.solve()? {
                LpOutcome::Feasible { witness } => witness,
                LpOutcome::Infeasible { certificate } => {
                    certificates.push(certificate);
                    continue 'signs;
                }
            };
            let mu = MuCoefficients::from_vec(dim, n, &witness)?;
            let stream = revalidation_seed(seed).wrapping_add(round as u64);
            let bad = violating_instances(&mu, k, n_revalidate, stream)?;
            if bad.is_empty() || round + 1 == MAX_ROUNDS {
                return Ok(MuSearchReport {
                    k: dim,
                    n,
                    seed,
                    n_samples,
                    status: MuSearchStatus::SampleFeasible { sign, witness: mu },
                    rounds,
                    n_constraints,
                    revalidation_samples: n_revalidate,
                    revalidation_violations: bad.len(),
                });
            }
            for inst in &bad {
                add(&mut problem, &minors(dim, &inst.f), &inst.bound())?;
            }
            n_constraints += bad.len();
        }
    }
    let minus = certificates.pop().expect("two certificates");
    let plus = certificates.pop().expect("two certificates");
    Ok(MuSearchReport {
        k: dim,
        n,
        seed,
        n_samples,
        status: MuSearchStatus::SampleInfeasible { certificates: [plus, minus] },
        rounds,
        n_constraints,
        revalidation_samples: 0,
        revalidation_violations: 0,
    })
}

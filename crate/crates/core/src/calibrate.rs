//! The explicit calibrator `ω = pi Σ_{i<j} p_i p_j F_i ∧ F_j` of a 2-plane,
//! sampled verification of `|ω(σ)| <= A^bh(σ)`, exact checks of the polygon
//! inequalities behind it, and an LP search for calibrators of a density.
//!
//! Planar functionals `f_i` are represented as [`Vec2`] (coefficients of
//! `x` and `y`), so `f_i ∧ f_j` is the cross product.

use rayon::prelude::*;

use crate::density::{AlphaDensity, AreaDensity, BhDensity};
use crate::error::{check_dim, Error, Result};
use crate::exterior::{wedge, Covector, SimpleTwoVector, TwoForm};
use crate::linalg::combinations;
use crate::lp::{FeasibilityProblem, LpOutcome};
use crate::planar::Vec2;
use crate::polytope::{halfplane_intersection, minkowski_gap, mixed_area, section, PlaneBasis, SymPolygon, SymPolytope};
use crate::sampling::{Sampler, DEFAULT_RANGE};
use crate::scalar::{is_negligible, max_of, PiMultiple, Scalar};

/// A calibrating form for `plane` with respect to the Busemann-Hausdorff
/// density of `ball`. `omega` is stored in units of pi.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibrator<T> {
    omega: TwoForm<T>,
    plane: PlaneBasis<T>,
    polygon: SymPolygon<T>,
    ball: SymPolytope<T>,
}

impl<T: Scalar> Calibrator<T> {
    /// Coefficients of `ω / pi`.
    pub fn omega(&self) -> &TwoForm<T> {
        &self.omega
    }

    pub fn plane(&self) -> &PlaneBasis<T> {
        &self.plane
    }

    /// `B ∩ P` with its functionals `F_i` and weights `p_i`.
    pub fn polygon(&self) -> &SymPolygon<T> {
        &self.polygon
    }

    pub fn ball(&self) -> &SymPolytope<T> {
        &self.ball
    }

    pub fn eval(&self, sigma: &SimpleTwoVector<T>) -> Result<PiMultiple<T>> {
        self.omega.eval(sigma).map(PiMultiple)
    }

    /// `|ω(u1 ∧ u2)| - A^bh(u1 ∧ u2)`, in units of pi.
    pub fn equality_residual(&self) -> Result<T> {
        let sigma = SimpleTwoVector::new(self.plane.u1.clone(), self.plane.u2.clone())?;
        let a = BhDensity::new(self.ball.clone()).eval(&sigma)?.0;
        Ok(self.eval(&sigma)?.0.abs() - a)
    }
}

pub fn build_calibrator<T: Scalar>(ball: &SymPolytope<T>, plane: &PlaneBasis<T>) -> Result<Calibrator<T>> {
    let polygon = section(ball, plane)?;
    let functionals: Vec<Covector<T>> = polygon
        .edges()
        .iter()
        .map(|e| e.facet.as_ref().expect("section annotates facets").functional.clone())
        .collect();
    let p = polygon.weights();
    let mut omega = TwoForm::zero(ball.dim());
    for pair in combinations(functionals.len(), 2) {
        let (i, j) = (pair[0], pair[1]);
        let w = p[i].clone() * p[j].clone();
        omega = omega.add_scaled(&wedge(&functionals[i], &functionals[j])?, &w)?;
    }
    let c = Calibrator {
        omega,
        plane: plane.clone(),
        polygon,
        ball: ball.clone(),
    };
    let residual = c.equality_residual()?;
    if !is_negligible(&residual, &T::one()) {
        return Err(Error::ConstraintViolation(format!(
            "calibrator misses the density on its plane by {residual} pi"
        )));
    }
    Ok(c)
}

/// Result of a sampled comparison `lower(σ) <= A^bh(σ)`. Values are in units of pi.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport<T> {
    pub seed: u64,
    pub n_samples: usize,
    /// `max (lower(σ) - A^bh(σ))` over the samples; `None` when there are none.
    pub max_violation: Option<T>,
    pub worst_sample: Option<SimpleTwoVector<T>>,
    pub equality_residual: T,
}

impl<T: Scalar> SampleReport<T> {
    pub fn passed(&self) -> bool {
        let ok_max = match &self.max_violation {
            None => true,
            Some(v) => !v.is_positive() || is_negligible(v, &T::one()),
        };
        ok_max && is_negligible(&self.equality_residual, &T::one())
    }
}

fn sampled_gap<T, F>(dim: usize, n: usize, seed: u64, lower: F, bh: &BhDensity<T>) -> Result<(Option<T>, Option<SimpleTwoVector<T>>)>
where
    T: Scalar,
    F: Fn(&SimpleTwoVector<T>) -> Result<T> + Sync,
{
    let mut sampler = Sampler::new(seed);
    let samples: Vec<SimpleTwoVector<T>> = (0..n).map(|_| sampler.two_vector(dim, DEFAULT_RANGE)).collect();
    let gaps: Vec<T> = samples
        .par_iter()
        .map(|s| Ok(lower(s)? - bh.eval(s)?.0))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, T)> = None;
    for (i, g) in gaps.into_iter().enumerate() {
        if best.as_ref().map_or(true, |(_, b)| g > *b) {
            best = Some((i, g));
        }
    }
    Ok(match best {
        Some((i, g)) => (Some(g), Some(samples[i].clone())),
        None => (None, None),
    })
}

/// Samples `n` integer 2-vectors (seeded) and reports `max |ω(σ)| - A^bh(σ)`.
pub fn verify_calibrator<T: Scalar>(c: &Calibrator<T>, n: usize, seed: u64) -> Result<SampleReport<T>> {
    let bh = BhDensity::new(c.ball.clone());
    let (max_violation, worst_sample) = sampled_gap(c.ball.dim(), n, seed, |s| Ok(c.eval(s)?.0.abs()), &bh)?;
    Ok(SampleReport {
        seed,
        n_samples: n,
        max_violation,
        worst_sample,
        equality_residual: c.equality_residual()?,
    })
}

/// Samples `n` integer 2-vectors and reports `max α(σ) - A^bh(σ)` for the
/// auxiliary density built from `B ∩ P`; the residual is taken on `P`.
pub fn verify_alpha<T: Scalar>(ball: &SymPolytope<T>, plane: &PlaneBasis<T>, n: usize, seed: u64) -> Result<SampleReport<T>> {
    let alpha = AlphaDensity::from_section(&section(ball, plane)?)?;
    let bh = BhDensity::new(ball.clone());
    let (max_violation, worst_sample) = sampled_gap(ball.dim(), n, seed, |s| Ok(alpha.eval(s)?.0), &bh)?;
    let on_plane = SimpleTwoVector::new(plane.u1.clone(), plane.u2.clone())?;
    let equality_residual = alpha.eval(&on_plane)?.0 - bh.eval(&on_plane)?.0;
    Ok(SampleReport {
        seed,
        n_samples: n,
        max_violation,
        worst_sample,
        equality_residual,
    })
}

/// `Σ_{i<j} p_i p_j f_i ∧ f_j`.
pub fn lhs_signed<T: Scalar>(f: &[Vec2<T>], p: &[T]) -> T {
    let mut total = T::zero();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            total = total + p[i].clone() * p[j].clone() * f[i].cross(&f[j]);
        }
    }
    total
}

/// `Σ_{i<j} p_i p_j |f_i ∧ f_j|`.
pub fn lhs_sum<T: Scalar>(f: &[Vec2<T>], p: &[T]) -> T {
    let mut total = T::zero();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            total = total + p[i].clone() * p[j].clone() * f[i].cross(&f[j]).abs();
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainPropReport<T> {
    pub lhs_abs: T,
    pub lhs_sum: T,
    /// `1 / A(K)`.
    pub bound: T,
    pub first_holds: bool,
    pub second_holds: bool,
}

impl<T> MainPropReport<T> {
    pub fn holds(&self) -> bool {
        self.first_holds && self.second_holds
    }
}

fn le_tol<T: Scalar>(a: &T, b: &T) -> bool {
    let d = a.clone() - b.clone();
    !d.is_positive() || is_negligible(&d, &max_of(a.abs(), b.abs()))
}

fn eq_tol<T: Scalar>(a: &T, b: &T) -> bool {
    is_negligible(&(a.clone() - b.clone()), &max_of(max_of(a.abs(), b.abs()), T::one()))
}

fn check_weights<T: Scalar>(p: &[T]) -> Result<()> {
    if p.iter().any(|w| w.is_negative()) {
        return Err(Error::InvalidInput("weights must be nonnegative".into()));
    }
    let total = p.iter().cloned().fold(T::zero(), |a, b| a + b);
    if !eq_tol(&total, &T::one()) {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Checks `|Σ p_i p_j f_i ∧ f_j| <= Σ p_i p_j |f_i ∧ f_j| <= 1 / A(K)`.
///
/// `f_i <= 1` on `K` is validated at the vertices of `K`.
pub fn check_main_prop<T: Scalar>(k: &SymPolygon<T>, f: &[Vec2<T>], p: &[T]) -> Result<MainPropReport<T>> {
    check_dim(f.len(), p.len())?;
    check_weights(p)?;
    for (i, fi) in f.iter().enumerate() {
        for a in k.vertices() {
            let v = fi.dot(a);
            if !le_tol(&v, &T::one()) {
                return Err(Error::InvalidInput(format!("functional {i} takes value {v} > 1 on the polygon")));
            }
        }
    }
    let lhs_abs = lhs_signed(f, p).abs();
    let lhs_sum = lhs_sum(f, p);
    let bound = T::one() / k.area().clone();
    Ok(MainPropReport {
        first_holds: le_tol(&lhs_abs, &lhs_sum),
        second_holds: le_tol(&lhs_sum, &bound),
        lhs_abs,
        lhs_sum,
        bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report<T> {
    pub area: T,
    /// `Σ_{i<j} |v_i ∧ v_j|`.
    pub sum_of_abs: T,
    /// `|Σ_{i<j} v_i ∧ v_j|`.
    pub abs_of_sum: T,
    pub holds: bool,
}

/// Area of a symmetric polygon three ways: shoelace, `Σ|v_i ∧ v_j|`, `|Σ v_i ∧ v_j|`.
pub fn lemma1_check<T: Scalar>(k: &SymPolygon<T>) -> Lemma1Report<T> {
    let v = k.edge_vectors();
    let mut sum_of_abs = T::zero();
    let mut signed = T::zero();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let c = v[i].cross(&v[j]);
            sum_of_abs = sum_of_abs + c.abs();
            signed = signed + c;
        }
    }
    let area = k.area().clone();
    let abs_of_sum = signed.abs();
    Lemma1Report {
        holds: eq_tol(&area, &sum_of_abs) && eq_tol(&area, &abs_of_sum),
        area,
        sum_of_abs,
        abs_of_sum,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report<T> {
    /// `(i, j, p_i p_j |f_i ∧ f_j|, |v_i ∧ v_j| / A(K)^2)`.
    pub pairs: Vec<(usize, usize, T, T)>,
    pub sum: T,
    pub bound: T,
    pub holds: bool,
}

/// Per-pair identity `p_i p_j |f_i ∧ f_j| = |v_i ∧ v_j| / A(K)^2` and its sum `1 / A(K)`.
pub fn lemma2_check<T: Scalar>(k: &SymPolygon<T>) -> Lemma2Report<T> {
    let (f, v, p) = (k.supports(), k.edge_vectors(), k.weights());
    let a2 = k.area().clone() * k.area().clone();
    let mut pairs = Vec::new();
    let mut holds = true;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let lhs = p[i].clone() * p[j].clone() * f[i].cross(&f[j]).abs();
            let rhs = v[i].cross(&v[j]).abs() / a2.clone();
            holds &= eq_tol(&lhs, &rhs);
            pairs.push((i, j, lhs, rhs));
        }
    }
    let sum = lhs_sum(&f, &p);
    let bound = T::one() / k.area().clone();
    holds &= eq_tol(&sum, &bound);
    Lemma2Report { pairs, sum, bound, holds }
}

/// Witness for `Σ p_i p_j |f_i ∧ f_j| = A(K') / A(K)^2 <= 1 / A(K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Certificate<T> {
    /// The polygon the certificate is about; `K` itself unless zero weights were dropped.
    pub polygon: SymPolygon<T>,
    /// Indices (into the original sides) removed because their weight was zero.
    pub dropped: Vec<usize>,
    /// Weights restricted to the kept sides, in the order of `polygon`'s sides.
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub lambda: Vec<T>,
    pub v_prime: Vec<Vec2<T>>,
    pub k_prime: SymPolygon<T>,
    pub area_k: T,
    pub area_k_prime: T,
    pub mixed: T,
    pub lhs: T,
    pub gap: T,
}

impl<T: Scalar> Lemma3Certificate<T> {
    /// `V(K, K') = A(K)`.
    pub fn mixed_identity(&self) -> bool {
        eq_tol(&self.mixed, &self.area_k)
    }

    /// `lhs A(K)^2 = A(K')`.
    pub fn lhs_identity(&self) -> bool {
        eq_tol(&(self.lhs.clone() * self.area_k.clone() * self.area_k.clone()), &self.area_k_prime)
    }

    /// Minkowski: `V(K, K')^2 - A(K) A(K') >= 0`, hence `A(K') <= A(K)`.
    pub fn minkowski_holds(&self) -> bool {
        le_tol(&T::zero(), &self.gap) && le_tol(&self.area_k_prime, &self.area_k)
    }

    pub fn verified(&self) -> bool {
        self.mixed_identity() && self.lhs_identity() && self.minkowski_holds()
    }
}

/// Builds the rescaled polygon `K'` with sides `λ_i v_i`, `λ_i = p_i / q_i`.
///
/// Sides with `p_i = 0` are dropped first, replacing `K` by the larger
/// polygon cut out by the remaining supports. At least two positive weights
/// are required.
pub fn lemma3_certificate<T: Scalar>(k: &SymPolygon<T>, p: &[T]) -> Result<Lemma3Certificate<T>> {
    check_dim(k.n(), p.len())?;
    check_weights(p)?;
    let dropped: Vec<usize> = (0..p.len()).filter(|&i| p[i].is_zero()).collect();
    let (polygon, p) = if dropped.is_empty() {
        (k.clone(), p.to_vec())
    } else {
        let kept: Vec<usize> = (0..p.len()).filter(|&i| !p[i].is_zero()).collect();
        if kept.len() < 2 {
            return Err(Error::Degenerate("fewer than two positive weights; the sum is zero".into()));
        }
        let supports = k.supports();
        let kept_supports: Vec<Vec2<T>> = kept.iter().map(|&i| supports[i].clone()).collect();
        let sub = halfplane_intersection(&kept_supports)?;
        let scale = T::one();
        let reordered = sub
            .supports()
            .iter()
            .map(|s| {
                kept.iter()
                    .find(|&&i| supports[i].approx_eq(s, &scale) || supports[i].approx_eq(&s.neg(), &scale))
                    .map(|&i| p[i].clone())
            })
            .collect::<Option<Vec<T>>>()
            .ok_or_else(|| Error::Degenerate("kept sides do not survive in the reduced polygon".into()))?;
        (sub, reordered)
    };
    let q = polygon.weights();
    let lambda: Vec<T> = p.iter().zip(&q).map(|(a, b)| a.clone() / b.clone()).collect();
    let v_prime: Vec<Vec2<T>> = polygon
        .edge_vectors()
        .iter()
        .zip(&lambda)
        .map(|(v, l)| v.scale(l))
        .collect();
    let k_prime = SymPolygon::from_edge_vectors(&v_prime)?;
    let lhs = lhs_sum(&polygon.supports(), &p);
    Ok(Lemma3Certificate {
        area_k: polygon.area().clone(),
        area_k_prime: k_prime.area().clone(),
        mixed: mixed_area(&polygon, &k_prime),
        gap: minkowski_gap(&polygon, &k_prime),
        polygon,
        dropped,
        p,
        q,
        lambda,
        v_prime,
        k_prime,
        lhs,
    })
}

fn canonical_sign<T: Scalar>(f: &Vec2<T>) -> Vec2<T> {
    if f.x.is_negative() || (f.x.is_zero() && f.y.is_negative()) {
        f.neg()
    } else {
        f.clone()
    }
}

/// Merges functionals equal up to sign, summing their weights. Each class is
/// represented by its sign with first nonzero coefficient positive, in order
/// of first appearance.
pub fn reduce_functionals<T: Scalar>(f: &[Vec2<T>], p: &[T]) -> Result<(Vec<Vec2<T>>, Vec<T>)> {
    check_dim(f.len(), p.len())?;
    let mut out_f: Vec<Vec2<T>> = Vec::new();
    let mut out_p: Vec<T> = Vec::new();
    for (fi, pi) in f.iter().zip(p) {
        let c = canonical_sign(fi);
        let scale = max_of(c.magnitude_bound(), T::one());
        match out_f.iter().position(|g| g.approx_eq(&c, &scale)) {
            Some(k) => out_p[k] = out_p[k].clone() + pi.clone(),
            None => {
                out_f.push(c);
                out_p.push(pi.clone());
            }
        }
    }
    Ok((out_f, out_p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarMax<T> {
    pub vertex: Vec2<T>,
    pub value: T,
    /// `lhs_sum` with `f_i` replaced by each vertex of `K*`, in vertex order.
    pub values: Vec<(Vec2<T>, T)>,
}

/// Replaces `f_i` by every vertex `±f_k` of `K*` and returns the first maximizer of `lhs_sum`.
pub fn maximize_over_polar<T: Scalar>(k: &SymPolygon<T>, f: &[Vec2<T>], p: &[T], i: usize) -> Result<PolarMax<T>> {
    check_dim(f.len(), p.len())?;
    if i >= f.len() {
        return Err(Error::InvalidInput(format!("free index {i} out of range for {} functionals", f.len())));
    }
    let mut f = f.to_vec();
    let polar_vertices: Vec<Vec2<T>> = k.supports().iter().flat_map(|s| [s.clone(), s.neg()]).collect();
    let values: Vec<(Vec2<T>, T)> = polar_vertices
        .into_iter()
        .map(|v| {
            f[i] = v.clone();
            let val = lhs_sum(&f, p);
            (v, val)
        })
        .collect();
    let (vertex, value) = values
        .iter()
        .fold(None::<&(Vec2<T>, T)>, |best, cand| match best {
            Some(b) if b.1 >= cand.1 => Some(b),
            _ => Some(cand),
        })
        .cloned()
        .expect("polar polygon has vertices");
    Ok(PolarMax { vertex, value, values })
}

/// Sampled calibrator LP: unknowns are the coefficients of a 2-form in the
/// order of [`LpCalibratorSearch::pairs`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpCalibratorSearch<T> {
    pub dim: usize,
    pub pairs: Vec<(usize, usize)>,
    pub problem: FeasibilityProblem<T>,
    pub outcome: LpOutcome<T>,
    /// The density values are `coefficient * pi^pi_power`; so is the form.
    pub pi_power: i32,
}

impl<T: Scalar> LpCalibratorSearch<T> {
    /// The witness as a 2-form, when feasible. Feasibility on samples is
    /// necessary, not sufficient, for a calibrator.
    pub fn form(&self) -> Option<TwoForm<T>> {
        let w = self.outcome.witness()?;
        let entries = self.pairs.iter().zip(w).map(|(&(a, b), c)| (a, b, c.clone()));
        TwoForm::from_entries(self.dim, entries).ok()
    }

    /// Substitutes a form into every constraint.
    pub fn check_form(&self, omega: &TwoForm<T>) -> bool {
        let x: Vec<T> = self.pairs.iter().map(|&(a, b)| omega.coeff(a, b)).collect();
        self.problem.satisfies(&x)
    }
}

fn plucker_row<T: Scalar>(pairs: &[(usize, usize)], sigma: &SimpleTwoVector<T>) -> Vec<T> {
    pairs
        .iter()
        .map(|&(a, b)| sigma.v1.0[a].clone() * sigma.v2.0[b].clone() - sigma.v1.0[b].clone() * sigma.v2.0[a].clone())
        .collect()
}

/// LP over 2-forms `ω`: `ω(u1 ∧ u2) = A(u1 ∧ u2)` and `|ω(σ)| <= A(σ)` on every sample.
pub fn lp_calibrator_search<T, D>(density: &D, plane: &PlaneBasis<T>, samples: &[SimpleTwoVector<T>]) -> Result<LpCalibratorSearch<T>>
where
    T: Scalar,
    D: AreaDensity<T>,
{
    let dim = plane.dim();
    let pairs: Vec<(usize, usize)> = combinations(dim, 2).into_iter().map(|c| (c[0], c[1])).collect();
    let mut problem = FeasibilityProblem::new(pairs.len());
    let on_plane = SimpleTwoVector::new(plane.u1.clone(), plane.u2.clone())?;
    problem.add_eq(plucker_row(&pairs, &on_plane), density.coefficient(&on_plane)?)?;
    for (k, s) in samples.iter().enumerate() {
        check_dim(dim, s.dim())?;
        if s.is_degenerate() {
            return Err(Error::InvalidInput(format!("sample {k} is degenerate")));
        }
    }
    let rows: Vec<(Vec<T>, T)> = samples
        .par_iter()
        .map(|s| Ok((plucker_row(&pairs, s), density.coefficient(s)?)))
        .collect::<Result<_>>()?;
    for (row, a) in rows {
        problem.add_le(row.iter().map(|c| -c.clone()).collect(), a.clone())?;
        problem.add_le(row, a)?;
    }
    let outcome = problem.solve()?;
    Ok(LpCalibratorSearch {
        dim,
        pairs,
        problem,
        outcome,
        pi_power: density.pi_power(),
    })
}

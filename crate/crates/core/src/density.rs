//! Two-dimensional area densities on simple 2-vectors.
//!
//! * Busemann-Hausdorff: `A(v1 ∧ v2) = pi / area(K)` where `K` is the unit
//!   ball pulled back to `(v1, v2)`-coordinates.
//! * Holmes-Thompson: `area(K*) / pi`.
//! * The auxiliary density `alpha(σ) = pi Σ_{i<j} p_i p_j |(F_i ∧ F_j)(σ)|`
//!   built from a calibrated section.
//!
//! Degenerate 2-vectors evaluate to zero (the continuous extension) and are
//! flagged by the `*_flagged` variants.

use std::cmp::Ordering;

use crate::error::{check_dim, Error, Result};
use crate::exterior::{Covector, SimpleTwoVector, Vector};
use crate::linalg::determinant;
use crate::planar::{angle_cmp, shoelace, Vec2};
use crate::polytope::{polar_polygon, section, ConstraintPolytope, PlaneBasis, SymPolygon, SymPolytope};
use crate::scalar::{is_negligible, OverPi, PiMultiple, Scalar};

/// Common interface used by the calibrator LP: a density whose values are
/// `coefficient * pi^pi_power()`.
pub trait AreaDensity<T: Scalar>: Sync {
    fn name(&self) -> &'static str;
    fn pi_power(&self) -> i32;
    fn coefficient(&self, sigma: &SimpleTwoVector<T>) -> Result<T>;
}

/// `K = {(s, t) : s v1 + t v2 in B}`.
pub fn pullback_disc<T: Scalar>(ball: &SymPolytope<T>, sigma: &SimpleTwoVector<T>) -> Result<SymPolygon<T>> {
    check_dim(ball.dim(), sigma.dim())?;
    let plane = PlaneBasis::new(sigma.v1.clone(), sigma.v2.clone())?;
    section(ball, &plane)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BhDensity<T> {
    ball: SymPolytope<T>,
}

impl<T: Scalar> BhDensity<T> {
    pub fn new(ball: SymPolytope<T>) -> Self {
        BhDensity { ball }
    }

    pub fn ball(&self) -> &SymPolytope<T> {
        &self.ball
    }

    pub fn eval(&self, sigma: &SimpleTwoVector<T>) -> Result<PiMultiple<T>> {
        self.eval_flagged(sigma).map(|(v, _)| v)
    }

    /// Value and whether `σ` was degenerate.
    pub fn eval_flagged(&self, sigma: &SimpleTwoVector<T>) -> Result<(PiMultiple<T>, bool)> {
        check_dim(self.ball.dim(), sigma.dim())?;
        if sigma.is_degenerate() {
            return Ok((PiMultiple::zero(), true));
        }
        let k = pullback_disc(&self.ball, sigma)?;
        Ok((PiMultiple(T::one() / k.area().clone()), false))
    }
}

impl<T: Scalar> AreaDensity<T> for BhDensity<T> {
    fn name(&self) -> &'static str {
        "busemann-hausdorff"
    }

    fn pi_power(&self) -> i32 {
        1
    }

    fn coefficient(&self, sigma: &SimpleTwoVector<T>) -> Result<T> {
        self.eval(sigma).map(|v| v.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HtDensity<T> {
    ball: SymPolytope<T>,
}

impl<T: Scalar> HtDensity<T> {
    pub fn new(ball: SymPolytope<T>) -> Self {
        HtDensity { ball }
    }

    pub fn eval(&self, sigma: &SimpleTwoVector<T>) -> Result<OverPi<T>> {
        self.eval_flagged(sigma).map(|(v, _)| v)
    }

    pub fn eval_flagged(&self, sigma: &SimpleTwoVector<T>) -> Result<(OverPi<T>, bool)> {
        check_dim(self.ball.dim(), sigma.dim())?;
        if sigma.is_degenerate() {
            return Ok((OverPi(T::zero()), true));
        }
        let k = pullback_disc(&self.ball, sigma)?;
        let polar = polar_polygon(&k)?;
        Ok((OverPi(polar.area().clone()), false))
    }
}

impl<T: Scalar> AreaDensity<T> for HtDensity<T> {
    fn name(&self) -> &'static str {
        "holmes-thompson"
    }

    fn pi_power(&self) -> i32 {
        -1
    }

    fn coefficient(&self, sigma: &SimpleTwoVector<T>) -> Result<T> {
        self.eval(sigma).map(|v| v.0)
    }
}

/// `alpha(σ) = pi Σ_{i<j} p_i p_j |(F_i ∧ F_j)(σ)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaDensity<T> {
    functionals: Vec<Covector<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> AlphaDensity<T> {
    pub fn new(functionals: Vec<Covector<T>>, weights: Vec<T>) -> Result<Self> {
        check_dim(functionals.len(), weights.len())?;
        let Some(first) = functionals.first() else {
            return Err(Error::InvalidInput("alpha density needs at least one functional".into()));
        };
        let dim = first.dim();
        for f in &functionals {
            check_dim(dim, f.dim())?;
        }
        let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !is_negligible(&(total - T::one()), &T::one()) {
            return Err(Error::InvalidInput("weights must sum to 1".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        Ok(AlphaDensity { functionals, weights })
    }

    /// Uses the ambient facet functionals and weights of a section of `B`.
    pub fn from_section(polygon: &SymPolygon<T>) -> Result<Self> {
        let functionals = polygon
            .edges()
            .iter()
            .map(|e| e.facet.as_ref().map(|f| f.functional.clone()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput("polygon is not annotated with ambient facets".into()))?;
        Self::new(functionals, polygon.weights())
    }

    pub fn functionals(&self) -> &[Covector<T>] {
        &self.functionals
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.functionals[0].dim()
    }

    /// `(F_i ∧ F_j)(σ) = F_i(v1) F_j(v2) - F_i(v2) F_j(v1)`.
    pub fn pair_value(&self, i: usize, j: usize, sigma: &SimpleTwoVector<T>) -> T {
        let (fi, fj) = (&self.functionals[i], &self.functionals[j]);
        fi.apply_unchecked(&sigma.v1) * fj.apply_unchecked(&sigma.v2)
            - fi.apply_unchecked(&sigma.v2) * fj.apply_unchecked(&sigma.v1)
    }

    pub fn eval(&self, sigma: &SimpleTwoVector<T>) -> Result<PiMultiple<T>> {
        check_dim(self.dim(), sigma.dim())?;
        let n = self.functionals.len();
        let mut total = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weights[i].clone() * self.weights[j].clone();
                if w.is_zero() {
                    continue;
                }
                total = total + w * self.pair_value(i, j, sigma).abs();
            }
        }
        Ok(PiMultiple(total))
    }
}

impl<T: Scalar> AreaDensity<T> for AlphaDensity<T> {
    fn name(&self) -> &'static str {
        "alpha"
    }

    fn pi_power(&self) -> i32 {
        1
    }

    fn coefficient(&self, sigma: &SimpleTwoVector<T>) -> Result<T> {
        self.eval(sigma).map(|v| v.0)
    }
}

pub fn bh_eval<T: Scalar>(d: &BhDensity<T>, sigma: &SimpleTwoVector<T>) -> Result<PiMultiple<T>> {
    d.eval(sigma)
}

pub fn ht_eval<T: Scalar>(d: &HtDensity<T>, sigma: &SimpleTwoVector<T>) -> Result<OverPi<T>> {
    d.eval(sigma)
}

pub fn alpha_eval<T: Scalar>(d: &AlphaDensity<T>, sigma: &SimpleTwoVector<T>) -> Result<PiMultiple<T>> {
    d.eval(sigma)
}

/// Euclidean volume of a bounded polyhedron in `R^2` or `R^3`.
///
/// Vertices are enumerated exactly; in `R^3` each facet is fanned into
/// triangles and the signed tetrahedra against the origin are summed.
pub fn volume_k<T: Scalar>(poly: &ConstraintPolytope<T>) -> Result<T> {
    let k = poly.dim;
    if !(2..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("volume_k supports k = 2, 3, got {k}")));
    }
    if !poly.is_bounded() {
        return Err(Error::Unbounded("polyhedron has a recession direction".into()));
    }
    volume_with_vertices(poly, &poly.vertices())
}

/// `volume_k` for a bounded polytope whose vertices are already known.
pub(crate) fn volume_with_vertices<T: Scalar>(poly: &ConstraintPolytope<T>, verts: &[Vector<T>]) -> Result<T> {
    let k = poly.dim;
    if verts.len() <= k {
        return Ok(T::zero());
    }
    if k == 2 {
        let pts: Vec<Vec2<T>> = verts.iter().map(|v| Vec2::new(v.0[0].clone(), v.0[1].clone())).collect();
        return Ok(shoelace(&sort_around_centroid(pts)).abs());
    }
    let tight: Vec<Vec<usize>> = verts.iter().map(|v| poly.tight_rows(v)).collect();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut total = T::zero();
    for (r, (normal, _)) in poly.rows.iter().enumerate() {
        let on_face: Vec<usize> = (0..verts.len()).filter(|&v| tight[v].contains(&r)).collect();
        if on_face.len() < 3 || seen.contains(&on_face) {
            continue;
        }
        seen.push(on_face.clone());
        let face: Vec<Vector<T>> = on_face.iter().map(|&v| verts[v].clone()).collect();
        total = total + facet_cone_volume(&face, normal);
    }
    Ok(total)
}

/// Signed volume of the cone from the origin over a convex facet polygon,
/// oriented by the outward normal.
fn facet_cone_volume<T: Scalar>(face: &[Vector<T>], normal: &Covector<T>) -> T {
    // project along the dominant normal axis; orientation is preserved up to its sign
    let axis = (0..3)
        .max_by(|&a, &b| {
            normal.0[a]
                .abs()
                .partial_cmp(&normal.0[b].abs())
                .unwrap_or(Ordering::Equal)
        })
        .expect("three axes");
    let keep: Vec<usize> = (0..3).filter(|&c| c != axis).collect();
    let flat: Vec<(Vec2<T>, usize)> = face
        .iter()
        .enumerate()
        .map(|(i, v)| (Vec2::new(v.0[keep[0]].clone(), v.0[keep[1]].clone()), i))
        .collect();
    let order = sort_indices_around_centroid(&flat);
    let mut ring: Vec<&Vector<T>> = order.iter().map(|&i| &face[i]).collect();
    // dropping coordinate `axis` flips orientation when (axis, keep) is odd
    let parity_positive = axis != 1;
    let normal_positive = normal.0[axis].is_positive();
    if parity_positive != normal_positive {
        ring.reverse();
    }
    let mut vol = T::zero();
    for i in 1..ring.len() - 1 {
        let m = vec![ring[0].0.clone(), ring[i].0.clone(), ring[i + 1].0.clone()];
        vol = vol + determinant(m);
    }
    vol / T::from_i64(6)
}

fn sort_around_centroid<T: Scalar>(pts: Vec<Vec2<T>>) -> Vec<Vec2<T>> {
    let labelled: Vec<(Vec2<T>, usize)> = pts.iter().cloned().zip(0..).collect();
    sort_indices_around_centroid(&labelled)
        .into_iter()
        .map(|i| pts[i].clone())
        .collect()
}

fn sort_indices_around_centroid<T: Scalar>(pts: &[(Vec2<T>, usize)]) -> Vec<usize> {
    let n = T::from_i64(pts.len() as i64);
    let c = pts
        .iter()
        .fold(Vec2::zero(), |acc, (p, _)| acc.add(p))
        .scale(&(T::one() / n));
    let mut idx: Vec<(Vec2<T>, usize)> = pts.iter().map(|(p, i)| (p.sub(&c), *i)).collect();
    idx.sort_by(|a, b| angle_cmp(&a.0, &b.0));
    idx.into_iter().map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Signed;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn sv(a: &[i64], b: &[i64]) -> SimpleTwoVector<Q> {
        SimpleTwoVector::new(Vector::from_i64(a), Vector::from_i64(b)).unwrap()
    }

    #[test]
    fn bh_square_and_shear() {
        let d = BhDensity::new(SymPolytope::<Q>::linf(2).unwrap());
        assert_eq!(bh_eval(&d, &sv(&[1, 0], &[0, 1])).unwrap(), PiMultiple(q(1, 4)));
        assert_eq!(bh_eval(&d, &sv(&[1, 0], &[1, 1])).unwrap(), PiMultiple(q(1, 4)));
        assert_eq!(bh_eval(&d, &sv(&[1, 0], &[0, 1])).unwrap().to_string(), "pi/4");
    }

    #[test]
    fn bh_cross_polytope_section() {
        let d = BhDensity::new(SymPolytope::<Q>::l1(3).unwrap());
        assert_eq!(d.eval(&sv(&[1, 0, 0], &[0, 1, 0])).unwrap(), PiMultiple(q(1, 2)));
    }

    #[test]
    fn degenerate_is_zero_and_flagged() {
        let d = BhDensity::new(SymPolytope::<Q>::linf(3).unwrap());
        let (v, flag) = d.eval_flagged(&sv(&[1, 2, 3], &[2, 4, 6])).unwrap();
        assert_eq!(v, PiMultiple::zero());
        assert!(flag);
        let (_, flag) = d.eval_flagged(&sv(&[1, 0, 0], &[0, 1, 0])).unwrap();
        assert!(!flag);
    }

    #[test]
    fn ht_square_and_homogeneity() {
        let d = HtDensity::new(SymPolytope::<Q>::linf(2).unwrap());
        assert_eq!(ht_eval(&d, &sv(&[1, 0], &[0, 1])).unwrap(), OverPi(q(2, 1)));
        assert_eq!(ht_eval(&d, &sv(&[1, 0], &[0, 1])).unwrap().to_string(), "2/pi");
        let s = sv(&[1, 2], &[0, 1]);
        let doubled = sv(&[2, 4], &[0, 1]);
        assert_eq!(d.eval(&doubled).unwrap().0, d.eval(&s).unwrap().0 * q(2, 1));
    }

    #[test]
    fn ht_and_bh_converge_on_round_polygons() {
        // facets at angles k pi / m, tangent to the unit circle
        let mut gaps = Vec::new();
        for m in [4usize, 16, 64, 256] {
            let facets = (0..m)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::PI / m as f64;
                    Covector::new(vec![t.cos(), t.sin()])
                })
                .collect();
            let ball = SymPolytope::new(2, facets).unwrap();
            let s = SimpleTwoVector::new(Vector::from_i64(&[1, 0]), Vector::from_i64(&[0, 1])).unwrap();
            let bh = BhDensity::new(ball.clone()).eval(&s).unwrap().to_f64();
            let ht = HtDensity::new(ball).eval(&s).unwrap().to_f64();
            gaps.push(((bh - 1.0).abs(), (ht - 1.0).abs()));
        }
        for w in gaps.windows(2) {
            assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "{gaps:?}");
        }
        let last = gaps.last().unwrap();
        assert!(last.0 < 1e-3 && last.1 < 1e-3, "{gaps:?}");
    }

    #[test]
    fn alpha_square_case() {
        let a = AlphaDensity::new(
            vec![Covector::from_i64(&[1, 0]), Covector::from_i64(&[0, 1])],
            vec![q(1, 2), q(1, 2)],
        )
        .unwrap();
        assert_eq!(alpha_eval(&a, &sv(&[1, 0], &[0, 1])).unwrap(), PiMultiple(q(1, 4)));
        assert_eq!(a.eval(&sv(&[3, 1], &[3, 1])).unwrap(), PiMultiple::zero());
        assert!(AlphaDensity::new(vec![Covector::<Q>::from_i64(&[1, 0])], vec![q(1, 2)]).is_err());
    }

    #[test]
    fn alpha_matches_bh_on_calibrated_plane() {
        let ball = SymPolytope::<Q>::l1(3).unwrap();
        let plane = PlaneBasis::new(Vector::from_i64(&[1, 2, 0]), Vector::from_i64(&[0, 1, -1])).unwrap();
        let k = section(&ball, &plane).unwrap();
        let alpha = AlphaDensity::from_section(&k).unwrap();
        let bh = BhDensity::new(ball);
        let s = SimpleTwoVector::new(plane.u1.clone(), plane.u2.clone()).unwrap();
        assert_eq!(alpha.eval(&s).unwrap(), bh.eval(&s).unwrap());
        assert_eq!(bh.eval(&s).unwrap().0 * k.area().clone(), q(1, 1));
    }

    #[test]
    fn volumes() {
        let cube = SymPolytope::<Q>::linf(3).unwrap().to_constraints();
        assert_eq!(volume_k(&cube).unwrap(), q(8, 1));
        let octa = SymPolytope::<Q>::l1(3).unwrap().to_constraints();
        assert_eq!(volume_k(&octa).unwrap(), q(4, 3));
        let square = SymPolytope::<Q>::linf(2).unwrap().to_constraints();
        assert_eq!(volume_k(&square).unwrap(), q(4, 1));
        let mut open = cube.clone();
        open.rows.pop();
        assert!(matches!(volume_k(&open), Err(Error::Unbounded(_))));
    }

    #[test]
    fn octahedron_volume_by_pyramid_oracle() {
        // eight congruent corner simplices conv(0, e1, e2, e3) of volume 1/6
        let simplex = ConstraintPolytope::new(
            3,
            vec![
                (Covector::from_i64(&[-1, 0, 0]), q(0, 1)),
                (Covector::from_i64(&[0, -1, 0]), q(0, 1)),
                (Covector::from_i64(&[0, 0, -1]), q(0, 1)),
                (Covector::from_i64(&[1, 1, 1]), q(1, 1)),
            ],
        )
        .unwrap();
        let corner = volume_k(&simplex).unwrap();
        assert_eq!(corner, q(1, 6));
        let octa = SymPolytope::<Q>::l1(3).unwrap().to_constraints();
        assert_eq!(volume_k(&octa).unwrap(), corner * q(8, 1));
    }

    #[test]
    fn volume_invariant_under_coordinate_permutation() {
        let body = ConstraintPolytope::<Q>::symmetric(
            3,
            &[
                Covector::from_i64(&[1, 2, 0]),
                Covector::from_i64(&[0, 1, 3]),
                Covector::from_i64(&[1, 0, 1]),
                Covector::from_i64(&[1, 1, 1]),
            ],
        )
        .unwrap();
        let permuted = ConstraintPolytope::new(
            3,
            body.rows
                .iter()
                .map(|(a, b)| (Covector(vec![a.0[2].clone(), a.0[0].clone(), a.0[1].clone()]), b.clone()))
                .collect(),
        )
        .unwrap();
        assert_eq!(volume_k(&body).unwrap(), volume_k(&permuted).unwrap());
    }

    #[test]
    fn bh_basis_invariance_and_homogeneity() {
        use crate::sampling::Sampler;
        let mut s = Sampler::new(9);
        let ball = s.sym_polytope::<Q>(3, 6, 4);
        let bh = BhDensity::new(ball.clone());
        let ht = HtDensity::new(ball.clone());
        let k = section(&ball, &s.plane(3, 4)).unwrap();
        let alpha = AlphaDensity::from_section(&k).unwrap();
        for _ in 0..30 {
            let sigma = s.two_vector::<Q>(3, 6);
            let t = Q::from_i64(s.int(-5, 5));
            let sheared = SimpleTwoVector::new(sigma.v1.clone(), sigma.v2.add(&sigma.v1.scale(&t))).unwrap();
            assert_eq!(bh.eval(&sigma).unwrap(), bh.eval(&sheared).unwrap());
            assert_eq!(ht.eval(&sigma).unwrap(), ht.eval(&sheared).unwrap());
            assert_eq!(alpha.eval(&sigma).unwrap(), alpha.eval(&sheared).unwrap());
            let lam = Q::from_i64(s.int(1, 7)) * if s.coin() { q(-1, 1) } else { q(1, 1) };
            let scaled = SimpleTwoVector::new(sigma.v1.scale(&lam), sigma.v2.clone()).unwrap();
            assert_eq!(bh.eval(&scaled).unwrap().0, bh.eval(&sigma).unwrap().0 * lam.abs());
            assert_eq!(ht.eval(&scaled).unwrap().0, ht.eval(&sigma).unwrap().0 * lam.abs());
            assert_eq!(alpha.eval(&scaled).unwrap().0, alpha.eval(&sigma).unwrap().0 * lam.abs());
            // alpha <= bh pointwise
            assert!(alpha.eval(&sigma).unwrap().0 <= bh.eval(&sigma).unwrap().0);
        }
    }
}

//! Triangulated chains over `Z` and `Z2`, their boundaries and areas, and
//! experiments comparing competitor surfaces against planar discs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::density::{AlphaDensity, BhDensity};
use crate::error::{check_dim, Error, Result};
use crate::exterior::{SimpleTwoVector, Vector};
use crate::linalg::rank;
use crate::planar::{convex_hull, shoelace, Vec2};
use crate::polytope::{section, PlaneBasis, SymPolytope};
use crate::sampling::Sampler;
use crate::scalar::{PiMultiple, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    Z,
    Z2,
}

impl Ring {
    pub fn tag(self) -> &'static str {
        match self {
            Ring::Z => "Z",
            Ring::Z2 => "Z2",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(Ring::Z),
            "Z2" => Ok(Ring::Z2),
            other => Err(Error::InvalidInput(format!("unknown ring `{other}`, expected Z or Z2"))),
        }
    }

    pub fn reduce(self, c: i64) -> i64 {
        match self {
            Ring::Z => c,
            Ring::Z2 => c.rem_euclid(2),
        }
    }

    /// `|c|`: the absolute value over `Z`, `0` or `1` over `Z2`.
    pub fn weight(self, c: i64) -> i64 {
        match self {
            Ring::Z => c.abs(),
            Ring::Z2 => i64::from(c.rem_euclid(2) != 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub indices: [usize; 3],
    pub coefficient: i64,
}

/// Edge chain keyed by `(a, b)` with `a < b`; over `Z` the coefficient of
/// the oriented edge `a -> b`.
pub type EdgeChain = BTreeMap<(usize, usize), i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T> {
    vertices: Vec<Vector<T>>,
    triangles: Vec<Triangle>,
    ring: Ring,
}

impl<T: Scalar> TriMesh<T> {
    /// Validates indices and dimensions, reduces coefficients over the ring
    /// and drops zero terms.
    pub fn new(vertices: Vec<Vector<T>>, triangles: Vec<Triangle>, ring: Ring) -> Result<Self> {
        if let Some(first) = vertices.first() {
            for v in &vertices {
                check_dim(first.dim(), v.dim())?;
            }
        }
        let mut kept = Vec::with_capacity(triangles.len());
        for t in triangles {
            if let Some(&bad) = t.indices.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidInput(format!("vertex index {bad} out of range ({} vertices)", vertices.len())));
            }
            let c = ring.reduce(t.coefficient);
            if c != 0 {
                kept.push(Triangle { coefficient: c, ..t });
            }
        }
        Ok(TriMesh { vertices, triangles: kept, ring })
    }

    pub fn vertices(&self) -> &[Vector<T>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, |v| v.dim())
    }

    /// The same chain over another ring.
    pub fn with_ring(&self, ring: Ring) -> Result<Self> {
        Self::new(self.vertices.clone(), self.triangles.clone(), ring)
    }

    /// Edge vectors `(b - a, c - a)` of a triangle.
    pub fn span(&self, t: &Triangle) -> SimpleTwoVector<T> {
        let [a, b, c] = t.indices.map(|i| &self.vertices[i]);
        SimpleTwoVector {
            v1: b.sub(a),
            v2: c.sub(a),
        }
    }

    pub fn boundary(&self) -> EdgeChain {
        boundary(self)
    }
}

pub fn boundary<T: Scalar>(s: &TriMesh<T>) -> EdgeChain {
    let mut chain = EdgeChain::new();
    for t in &s.triangles {
        let [a, b, c] = t.indices;
        for (x, y) in [(a, b), (b, c), (c, a)] {
            if x == y {
                continue;
            }
            let (key, sign) = if x < y { ((x, y), 1) } else { ((y, x), -1) };
            let entry = chain.entry(key).or_insert(0);
            *entry = s.ring.reduce(*entry + sign * t.coefficient);
        }
    }
    chain.retain(|_, c| *c != 0);
    chain
}

/// `Σ |c| · ½ · A^bh(e1 ∧ e2)` over the triangles, in units of pi.
pub fn bh_area<T: Scalar>(s: &TriMesh<T>, bh: &BhDensity<T>) -> Result<PiMultiple<T>> {
    let parts: Vec<T> = s
        .triangles
        .par_iter()
        .map(|t| {
            let v = bh.eval(&s.span(t))?.0;
            Ok(v * T::from_i64(s.ring.weight(t.coefficient)))
        })
        .collect::<Result<_>>()?;
    Ok(PiMultiple(sum(parts) * T::half()))
}

pub fn alpha_area<T: Scalar>(s: &TriMesh<T>, alpha: &AlphaDensity<T>) -> Result<PiMultiple<T>> {
    let mut total = T::zero();
    for t in &s.triangles {
        total = total + alpha.eval(&s.span(t))?.0 * T::from_i64(s.ring.weight(t.coefficient));
    }
    Ok(PiMultiple(total * T::half()))
}

/// `Σ |c| · area(F_ij(triangle))` with `F_ij = (F_i, F_j)`.
pub fn pushforward_area<T: Scalar>(s: &TriMesh<T>, alpha: &AlphaDensity<T>, i: usize, j: usize) -> Result<T> {
    let n = alpha.functionals().len();
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!("functional index out of range ({n} functionals)")));
    }
    let (fi, fj) = (&alpha.functionals()[i], &alpha.functionals()[j]);
    let image: Vec<Vec2<T>> = s
        .vertices
        .iter()
        .map(|v| Ok(Vec2::new(fi.apply(v)?, fj.apply(v)?)))
        .collect::<Result<_>>()?;
    let mut total = T::zero();
    for t in &s.triangles {
        let [a, b, c] = t.indices.map(|k| image[k].clone());
        let area = shoelace(&[a, b, c]).abs();
        total = total + area * T::from_i64(s.ring.weight(t.coefficient));
    }
    Ok(total)
}

/// `pi Σ_{i<j} p_i p_j · pushforward_area(S, i, j)`, an independent route to `alpha_area`.
pub fn alpha_area_by_pushforward<T: Scalar>(s: &TriMesh<T>, alpha: &AlphaDensity<T>) -> Result<PiMultiple<T>> {
    let p = alpha.weights();
    let mut total = T::zero();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            total = total + p[i].clone() * p[j].clone() * pushforward_area(s, alpha, i, j)?;
        }
    }
    Ok(PiMultiple(total))
}

fn sum<T: Scalar>(xs: Vec<T>) -> T {
    xs.into_iter().fold(T::zero(), |a, b| a + b)
}

/// A convex disc in a 2-plane with a fixed triangulation.
///
/// Vertex layout: boundary `b_0..b_{m-1}` (counterclockwise in plane
/// coordinates), centroid `c` at index `m`, inner ring `(b_k + c) / 2` at
/// `m + 1 + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDisc<T> {
    plane: PlaneBasis<T>,
    boundary: Vec<Vec2<T>>,
    mesh: TriMesh<T>,
}

impl<T: Scalar> PlanarDisc<T> {
    /// `boundary` must be a strictly convex polygon; clockwise input is reversed.
    pub fn new(plane: PlaneBasis<T>, mut boundary: Vec<Vec2<T>>) -> Result<Self> {
        let m = boundary.len();
        if m < 3 {
            return Err(Error::InvalidInput("disc boundary needs at least 3 vertices".into()));
        }
        let labelled: Vec<(Vec2<T>, usize)> = boundary.iter().cloned().zip(0..).collect();
        if convex_hull(&labelled).len() != m {
            return Err(Error::InvalidInput("disc boundary must be strictly convex".into()));
        }
        if shoelace(&boundary).is_negative() {
            boundary.reverse();
        }
        let c = boundary
            .iter()
            .fold(Vec2::zero(), |acc, b| acc.add(b))
            .scale(&(T::one() / T::from_i64(m as i64)));
        let inner: Vec<Vec2<T>> = boundary.iter().map(|b| b.add(&c).scale(&T::half())).collect();
        let mut flat = boundary.clone();
        flat.push(c);
        flat.extend(inner);
        let vertices = flat.iter().map(|p| plane.embed(p)).collect();
        let centre = m;
        let ring = |k: usize| m + 1 + k % m;
        let mut triangles = Vec::with_capacity(3 * m);
        for k in 0..m {
            let next = (k + 1) % m;
            for indices in [[centre, ring(k), ring(next)], [ring(k), k, next], [ring(k), next, ring(next)]] {
                triangles.push(Triangle { indices, coefficient: 1 });
            }
        }
        let mesh = TriMesh::new(vertices, triangles, Ring::Z)?;
        let disc = PlanarDisc { plane, boundary, mesh };
        if disc.triangulated_area() != shoelace(&disc.boundary) {
            return Err(Error::Degenerate("triangulation does not cover the disc exactly once".into()));
        }
        Ok(disc)
    }

    /// A disc bounded by the hull of 3..=6 random rational points.
    pub fn random(plane: PlaneBasis<T>, sampler: &mut Sampler) -> Self {
        loop {
            let count = sampler.int(3, 6) as usize;
            let pts: Vec<(Vec2<T>, usize)> = (0..count)
                .map(|i| (Vec2::new(sampler.rational(4, 3), sampler.rational(4, 3)), i))
                .collect();
            let hull: Vec<Vec2<T>> = convex_hull(&pts).into_iter().map(|(p, _)| p).collect();
            if hull.len() >= 3 {
                if let Ok(d) = Self::new(plane.clone(), hull) {
                    return d;
                }
            }
        }
    }

    pub fn plane(&self) -> &PlaneBasis<T> {
        &self.plane
    }

    pub fn boundary_polygon(&self) -> &[Vec2<T>] {
        &self.boundary
    }

    pub fn mesh(&self) -> &TriMesh<T> {
        &self.mesh
    }

    /// Number of boundary vertices `m`.
    pub fn m(&self) -> usize {
        self.boundary.len()
    }

    /// Sum of signed triangle areas in plane coordinates.
    pub fn triangulated_area(&self) -> T {
        let m = self.m();
        let mut flat = self.boundary.clone();
        let c = self
            .boundary
            .iter()
            .fold(Vec2::zero(), |acc, b| acc.add(b))
            .scale(&(T::one() / T::from_i64(m as i64)));
        flat.push(c.clone());
        flat.extend(self.boundary.iter().map(|b| b.add(&c).scale(&T::half())));
        sum(self
            .mesh
            .triangles
            .iter()
            .map(|t| shoelace(&t.indices.map(|k| flat[k].clone())))
            .collect())
    }
}

/// How competitor surfaces are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator<T> {
    /// Cone from the boundary to the centroid lifted by `height` along a fixed
    /// transverse direction.
    Tent { height: T },
    /// Interior vertices of the reference triangulation moved by random
    /// rational vectors with coordinates in `[-magnitude, magnitude]`.
    Displace { magnitude: i64 },
    /// Alternates random tents and displacements.
    Mixed,
}

/// A vector outside the plane: the first coordinate vector that raises the rank.
pub fn transverse_direction<T: Scalar>(plane: &PlaneBasis<T>) -> Result<Vector<T>> {
    let n = plane.dim();
    (0..n)
        .map(|i| Vector::basis(n, i))
        .find(|e| rank(vec![plane.u1.0.clone(), plane.u2.0.clone(), e.0.clone()]) == 3)
        .ok_or_else(|| Error::InvalidInput("the plane fills the space; no transverse direction".into()))
}

/// Tent competitor: triangles `(apex, b_k, b_{k+1})` with the apex at the
/// centroid moved by `height * w`.
pub fn tent_competitor<T: Scalar>(disc: &PlanarDisc<T>, w: &Vector<T>, height: &T, ring: Ring) -> Result<TriMesh<T>> {
    let m = disc.m();
    let mut vertices = disc.mesh.vertices.clone();
    vertices[m] = vertices[m].add(&w.scale(height));
    let triangles = (0..m)
        .map(|k| Triangle {
            indices: [m, k, (k + 1) % m],
            coefficient: 1,
        })
        .collect();
    TriMesh::new(vertices, triangles, ring)
}

/// Reference triangulation with every interior vertex moved by a random vector.
pub fn displaced_competitor<T: Scalar>(disc: &PlanarDisc<T>, sampler: &mut Sampler, magnitude: i64, ring: Ring) -> Result<TriMesh<T>> {
    let m = disc.m();
    let dim = disc.plane.dim();
    let mut vertices = disc.mesh.vertices.clone();
    for v in vertices.iter_mut().skip(m) {
        let shift = Vector((0..dim).map(|_| sampler.rational(magnitude, 4)).collect());
        *v = v.add(&shift);
    }
    TriMesh::new(vertices, disc.mesh.triangles.clone(), ring)
}

/// Over `Z2`: flips the orientation of random triangles and glues a closed
/// tetrahedral sheet at a random vertex. Boundary mod 2 is unchanged.
pub fn z2_decorate<T: Scalar>(s: &TriMesh<T>, sampler: &mut Sampler) -> Result<TriMesh<T>> {
    let mut triangles: Vec<Triangle> = s
        .triangles
        .iter()
        .map(|t| {
            if sampler.coin() {
                let [a, b, c] = t.indices;
                Triangle { indices: [a, c, b], ..*t }
            } else {
                *t
            }
        })
        .collect();
    let mut vertices = s.vertices.clone();
    if sampler.coin() && !vertices.is_empty() {
        let dim = s.dim();
        let base = vertices[sampler.index(vertices.len())].clone();
        let first = vertices.len();
        vertices.push(base.clone());
        for _ in 0..3 {
            let offset = Vector((0..dim).map(|_| sampler.rational(1, 4)).collect());
            vertices.push(base.add(&offset));
        }
        let [a, b, c, d] = [first, first + 1, first + 2, first + 3];
        for indices in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
            triangles.push(Triangle { indices, coefficient: 1 });
        }
    }
    TriMesh::new(vertices, triangles, Ring::Z2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord<T> {
    pub kind: &'static str,
    /// Areas in units of pi.
    pub bh_area: T,
    pub alpha_area: T,
    pub gap: T,
    /// `alpha_area(S) >= alpha_area(D)`; a degree fact, only sampled here.
    pub alpha_covers_disc: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport<T> {
    pub seed: u64,
    pub ring: Ring,
    pub trials: usize,
    pub disc_bh_area: T,
    pub disc_alpha_area: T,
    pub min_gap: Option<T>,
    pub records: Vec<TrialRecord<T>>,
    /// `alpha_area(S) <= bh_area(S)` on every trial.
    pub alpha_below_bh: bool,
    /// `alpha_area(D) = bh_area(D)`.
    pub disc_equality: bool,
}

impl<T: Scalar> ExperimentReport<T> {
    pub fn passed(&self) -> bool {
        let gap_ok = self.min_gap.as_ref().map_or(true, |g| !g.is_negative() || crate::scalar::is_negligible(g, &T::one()));
        gap_ok && self.alpha_below_bh && self.disc_equality
    }

    /// Recorded with every report.
    pub const ASSUMPTION: &'static str =
        "the containment of F_ij(D) in the image of F_ij on the competitor is a degree argument and is not checked; only its area consequence is measured";
}

fn same_boundary<T: Scalar>(s: &TriMesh<T>, disc: &PlanarDisc<T>, ring: Ring) -> Result<bool> {
    Ok(s.boundary() == disc.mesh.with_ring(ring)?.boundary())
}

/// Generates `trials` competitors with the boundary of `disc` and compares
/// their areas with the disc's.
pub fn semi_ellipticity_experiment<T: Scalar>(
    ball: &SymPolytope<T>,
    disc: &PlanarDisc<T>,
    generator: &Generator<T>,
    ring: Ring,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport<T>> {
    let bh = BhDensity::new(ball.clone());
    let alpha = AlphaDensity::from_section(&section(ball, &disc.plane)?)?;
    let w = transverse_direction(&disc.plane)?;
    let mut sampler = Sampler::new(seed);
    let mut competitors = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (kind, mut s) = match generator {
            Generator::Tent { height } => ("tent", tent_competitor(disc, &w, height, ring)?),
            Generator::Displace { magnitude } => ("displace", displaced_competitor(disc, &mut sampler, *magnitude, ring)?),
            Generator::Mixed => {
                if trial % 2 == 0 {
                    // height 0 would reproduce the disc
                    let h = loop {
                        let h = sampler.rational::<T>(3, 4);
                        if !h.is_zero() {
                            break h;
                        }
                    };
                    ("tent", tent_competitor(disc, &w, &h, ring)?)
                } else {
                    ("displace", displaced_competitor(disc, &mut sampler, 2, ring)?)
                }
            }
        };
        if ring == Ring::Z2 {
            s = z2_decorate(&s, &mut sampler)?;
        }
        if !same_boundary(&s, disc, ring)? {
            return Err(Error::ConstraintViolation(format!("generator produced a wrong boundary in trial {trial}")));
        }
        competitors.push((kind, s));
    }
    let disc_mesh = disc.mesh.with_ring(ring)?;
    let disc_bh_area = bh_area(&disc_mesh, &bh)?.0;
    let disc_alpha_area = alpha_area(&disc_mesh, &alpha)?.0;
    let records: Vec<TrialRecord<T>> = competitors
        .par_iter()
        .map(|(kind, s)| {
            let b = bh_area(s, &bh)?.0;
            let a = alpha_area(s, &alpha)?.0;
            Ok(TrialRecord {
                kind,
                gap: b.clone() - disc_bh_area.clone(),
                alpha_covers_disc: a >= disc_alpha_area,
                bh_area: b,
                alpha_area: a,
            })
        })
        .collect::<Result<_>>()?;
    let min_gap = records.iter().map(|r| r.gap.clone()).reduce(|a, b| if b < a { b } else { a });
    let tol = |a: &T, b: &T| {
        let d = a.clone() - b.clone();
        !d.is_positive() || crate::scalar::is_negligible(&d, &crate::scalar::max_of(b.abs(), T::one()))
    };
    let alpha_below_bh = records.iter().all(|r| tol(&r.alpha_area, &r.bh_area));
    let disc_equality = tol(&disc_alpha_area, &disc_bh_area) && tol(&disc_bh_area, &disc_alpha_area);
    Ok(ExperimentReport {
        seed,
        ring,
        trials,
        disc_bh_area,
        disc_alpha_area,
        min_gap,
        records,
        alpha_below_bh,
        disc_equality,
    })
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

    fn v(c: &[i64]) -> Vector<Q> {
        Vector::from_i64(c)
    }

    fn tri(indices: [usize; 3], coefficient: i64) -> Triangle {
        Triangle { indices, coefficient }
    }

    fn unit_square(coefficient: i64) -> TriMesh<Q> {
        TriMesh::new(
            vec![v(&[0, 0, 0]), v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 1, 0])],
            vec![tri([0, 1, 2], coefficient), tri([0, 2, 3], coefficient)],
            Ring::Z,
        )
        .unwrap()
    }

    #[test]
    fn boundaries() {
        let one = TriMesh::new(vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])], vec![tri([0, 1, 2], 1)], Ring::Z).unwrap();
        let expected: EdgeChain = [((0, 1), 1), ((1, 2), 1), ((0, 2), -1)].into_iter().collect();
        assert_eq!(boundary(&one), expected);
        let sq = unit_square(1);
        let expected: EdgeChain = [((0, 1), 1), ((1, 2), 1), ((2, 3), 1), ((0, 3), -1)].into_iter().collect();
        assert_eq!(boundary(&sq), expected);
        assert!(boundary(&octahedron(Ring::Z)).is_empty());
        assert!(boundary(&octahedron(Ring::Z2)).is_empty());
    }

    fn octahedron(ring: Ring) -> TriMesh<Q> {
        let vs = vec![v(&[1, 0, 0]), v(&[-1, 0, 0]), v(&[0, 1, 0]), v(&[0, -1, 0]), v(&[0, 0, 1]), v(&[0, 0, -1])];
        // outward orientation: (x, y, z) sign patterns
        let mut ts = Vec::new();
        for (x, y) in [(0, 2), (2, 1), (1, 3), (3, 0)] {
            ts.push(tri([x, y, 4], 1));
            ts.push(tri([y, x, 5], 1));
        }
        TriMesh::new(vs, ts, ring).unwrap()
    }

    #[test]
    fn z2_boundary_ignores_orientation() {
        let flipped = TriMesh::new(
            vec![v(&[0, 0]), v(&[1, 0]), v(&[1, 1]), v(&[0, 1])],
            vec![tri([0, 1, 2], 1), tri([0, 3, 2], 1)],
            Ring::Z2,
        )
        .unwrap();
        let expected: EdgeChain = [((0, 1), 1), ((1, 2), 1), ((2, 3), 1), ((0, 3), 1)].into_iter().collect();
        assert_eq!(boundary(&flipped), expected);
        let twice = TriMesh::new(vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])], vec![tri([0, 1, 2], 2)], Ring::Z2).unwrap();
        assert!(twice.triangles().is_empty());
    }

    #[test]
    fn square_areas() {
        let ball = SymPolytope::<Q>::linf(3).unwrap();
        let bh = BhDensity::new(ball.clone());
        assert_eq!(bh_area(&unit_square(1), &bh).unwrap(), PiMultiple(q(1, 4)));
        assert_eq!(bh_area(&unit_square(2), &bh).unwrap(), PiMultiple(q(1, 2)));
        assert_eq!(bh_area(&unit_square(-1), &bh).unwrap(), PiMultiple(q(1, 4)));
        // density times Euclidean area
        let k = section(&ball, &PlaneBasis::coordinate(3, 0, 1).unwrap()).unwrap();
        assert_eq!(q(1, 1) / k.area().clone(), q(1, 4));
        let mut with_sliver = unit_square(1);
        with_sliver.vertices.push(v(&[2, 0, 0]));
        with_sliver.triangles.push(tri([0, 1, 4], 1));
        assert_eq!(bh_area(&with_sliver, &bh).unwrap(), bh_area(&unit_square(1), &bh).unwrap());
        let alpha = AlphaDensity::from_section(&k).unwrap();
        assert_eq!(alpha_area(&unit_square(1), &alpha).unwrap(), PiMultiple(q(1, 4)));
        let empty = TriMesh::<Q>::new(vec![], vec![], Ring::Z).unwrap();
        assert_eq!(alpha_area(&empty, &alpha).unwrap(), PiMultiple(q(0, 1)));
    }

    #[test]
    fn pushforward_cases() {
        let ball = SymPolytope::<Q>::l1(3).unwrap();
        let plane = PlaneBasis::new(v(&[1, 1, 0]), v(&[0, 1, 2])).unwrap();
        let mut s = Sampler::new(2);
        let disc = PlanarDisc::random(plane.clone(), &mut s);
        let alpha = AlphaDensity::from_section(&section(&ball, &plane).unwrap()).unwrap();
        // affine image of a convex disc: area of the image of its boundary polygon
        let (fi, fj) = (&alpha.functionals()[0], &alpha.functionals()[1]);
        let image: Vec<Vec2<Q>> = disc
            .boundary_polygon()
            .iter()
            .map(|p| {
                let x = plane.embed(p);
                Vec2::new(fi.apply(&x).unwrap(), fj.apply(&x).unwrap())
            })
            .collect();
        assert_eq!(pushforward_area(disc.mesh(), &alpha, 0, 1).unwrap(), shoelace(&image).abs());
        let w = transverse_direction(&plane).unwrap();
        let tent = tent_competitor(&disc, &w, &q(1, 1), Ring::Z).unwrap();
        for i in 0..alpha.functionals().len() {
            for j in i + 1..alpha.functionals().len() {
                assert!(pushforward_area(&tent, &alpha, i, j).unwrap() >= pushforward_area(disc.mesh(), &alpha, i, j).unwrap());
            }
            assert_eq!(pushforward_area(&tent, &alpha, i, i).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn alpha_decomposition_on_random_meshes() {
        let mut s = Sampler::new(31);
        for _ in 0..10 {
            let ball = s.sym_polytope::<Q>(3, 5, 4);
            let plane = s.plane(3, 4);
            let alpha = AlphaDensity::from_section(&section(&ball, &plane).unwrap()).unwrap();
            let disc = PlanarDisc::random(plane, &mut s);
            let mesh = displaced_competitor(&disc, &mut s, 2, Ring::Z).unwrap();
            assert_eq!(alpha_area(&mesh, &alpha).unwrap(), alpha_area_by_pushforward(&mesh, &alpha).unwrap());
            let bh = BhDensity::new(ball);
            assert!(alpha_area(&mesh, &alpha).unwrap().0 <= bh_area(&mesh, &bh).unwrap().0);
        }
    }

    #[test]
    fn disc_triangulation_and_retriangulation_invariance() {
        let plane = PlaneBasis::<Q>::coordinate(3, 0, 1).unwrap();
        let square = vec![Vec2::from_i64(0, 0), Vec2::from_i64(1, 0), Vec2::from_i64(1, 1), Vec2::from_i64(0, 1)];
        let disc = PlanarDisc::new(plane.clone(), square).unwrap();
        assert_eq!(disc.triangulated_area(), q(1, 1));
        let bh = BhDensity::new(SymPolytope::linf(3).unwrap());
        assert_eq!(bh_area(disc.mesh(), &bh).unwrap(), bh_area(&unit_square(1), &bh).unwrap());
        let flat = tent_competitor(&disc, &transverse_direction(&plane).unwrap(), &q(0, 1), Ring::Z).unwrap();
        assert_eq!(bh_area(&flat, &bh).unwrap(), bh_area(disc.mesh(), &bh).unwrap());
        assert!(PlanarDisc::new(plane, vec![Vec2::from_i64(0, 0), Vec2::from_i64(1, 1), Vec2::from_i64(2, 2)]).is_err());
    }

    #[test]
    fn tent_over_unit_square() {
        let ball = SymPolytope::<Q>::linf(3).unwrap();
        let plane = PlaneBasis::coordinate(3, 0, 1).unwrap();
        let square = vec![Vec2::from_i64(0, 0), Vec2::from_i64(1, 0), Vec2::from_i64(1, 1), Vec2::from_i64(0, 1)];
        let disc = PlanarDisc::new(plane, square).unwrap();
        let r = semi_ellipticity_experiment(&ball, &disc, &Generator::Tent { height: q(1, 1) }, Ring::Z, 1, 0).unwrap();
        assert!(r.min_gap.clone().unwrap().is_positive());
        assert!(r.passed());
        // oracle: each face (apex, b_k, b_{k+1}) pulls back the cube to a polygon of area A_k
        let bh = BhDensity::new(ball.clone());
        let apex = v(&[1, 1, 2]).scale(&q(1, 2));
        let corners = [v(&[0, 0, 0]), v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 1, 0])];
        let mut expected = q(0, 1);
        for k in 0..4 {
            let s = SimpleTwoVector::new(corners[k].sub(&apex), corners[(k + 1) % 4].sub(&apex)).unwrap();
            expected = expected + bh.eval(&s).unwrap().0 / q(2, 1);
        }
        assert_eq!(r.records[0].bh_area, expected);
        let flat = semi_ellipticity_experiment(&ball, &disc, &Generator::Tent { height: q(0, 1) }, Ring::Z, 1, 0).unwrap();
        assert_eq!(flat.min_gap.unwrap(), q(0, 1));
    }

    #[test]
    fn random_experiments_both_rings() {
        let mut s = Sampler::new(77);
        let ball = s.sym_polytope::<Q>(3, 5, 4);
        let plane = s.plane(3, 4);
        let disc = PlanarDisc::random(plane, &mut s);
        for ring in [Ring::Z, Ring::Z2] {
            let r = semi_ellipticity_experiment(&ball, &disc, &Generator::Mixed, ring, 12, 5).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.records.len(), 12);
            let again = semi_ellipticity_experiment(&ball, &disc, &Generator::Mixed, ring, 12, 5).unwrap();
            assert_eq!(r, again);
        }
    }

    #[test]
    fn mesh_validation() {
        assert!(TriMesh::<Q>::new(vec![v(&[0, 0])], vec![tri([0, 0, 1], 1)], Ring::Z).is_err());
        assert!(TriMesh::<Q>::new(vec![v(&[0, 0]), v(&[0, 0, 0])], vec![], Ring::Z).is_err());
        assert_eq!(Ring::from_tag("Z2").unwrap(), Ring::Z2);
        assert!(Ring::from_tag("R").is_err());
    }
}

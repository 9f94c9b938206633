//! Centrally symmetric polytopes, their plane sections, and the calculus of
//! centrally symmetric polygons (areas, edge weights, polars, mixed areas).

use std::cmp::Ordering;

use crate::error::{check_dim, Error, Result};
use crate::exterior::{Covector, Vector};
use crate::linalg::{combinations, rank, solve};
use crate::planar::{angle_cmp, convex_hull, dual_intersection, orientation, shoelace, Vec2};
use crate::scalar::{is_negligible, max_of, Scalar};

/// The body `{x : |g_j(x)| <= 1 for all j}` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPolytope<T> {
    dim: usize,
    facets: Vec<Covector<T>>,
}

impl<T: Scalar> SymPolytope<T> {
    /// Validates dimensions and boundedness. Parallel functionals are merged,
    /// keeping the tighter one (the first one on ties).
    pub fn new(dim: usize, facets: Vec<Covector<T>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("ambient dimension {dim} < 2")));
        }
        let mut kept: Vec<Covector<T>> = Vec::with_capacity(facets.len());
        'outer: for g in facets {
            check_dim(dim, g.dim())?;
            if g.is_zero() {
                return Err(Error::InvalidInput("zero facet functional".into()));
            }
            for h in kept.iter_mut() {
                if let Some(ratio) = parallel_ratio(&g, h) {
                    // g = ratio * h; |ratio| > 1 means g is the tighter constraint
                    if ratio.abs() > T::one() {
                        *h = g;
                    }
                    continue 'outer;
                }
            }
            kept.push(g);
        }
        let body = SymPolytope { dim, facets: kept };
        if rank(body.facets.iter().map(|g| g.0.clone()).collect()) < dim {
            return Err(Error::Unbounded("facet functionals do not span the dual space".into()));
        }
        Ok(body)
    }

    /// Unit ball of the max norm: facets `dx_1, …, dx_n`.
    pub fn linf(dim: usize) -> Result<Self> {
        Self::new(dim, (0..dim).map(|i| Covector::coordinate(dim, i)).collect())
    }

    /// Unit ball of the `l1` norm: the `2^(n-1)` functionals `(1, ±1, …, ±1)`.
    pub fn l1(dim: usize) -> Result<Self> {
        let facets = (0..1usize << (dim - 1))
            .map(|mask| {
                Covector::new(
                    (0..dim)
                        .map(|i| {
                            if i > 0 && mask & (1 << (i - 1)) != 0 {
                                -T::one()
                            } else {
                                T::one()
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        Self::new(dim, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Covector<T>] {
        &self.facets
    }

    /// `max_j |g_j(x)|`, the norm whose unit ball is this body.
    pub fn norm(&self, x: &Vector<T>) -> Result<T> {
        check_dim(self.dim, x.dim())?;
        Ok(self
            .facets
            .iter()
            .fold(T::zero(), |m, g| max_of(m, g.apply_unchecked(x).abs())))
    }

    pub fn to_constraints(&self) -> ConstraintPolytope<T> {
        let rows = self
            .facets
            .iter()
            .flat_map(|g| [(g.clone(), T::one()), (g.neg(), T::one())])
            .collect();
        ConstraintPolytope {
            dim: self.dim,
            rows,
        }
    }

    /// Vertex set by brute-force enumeration; meant for `n <= 4`.
    pub fn vertices(&self) -> Vec<Vector<T>> {
        self.to_constraints().vertices()
    }

    /// Drops functionals whose tight set has rank below `n`, i.e. those
    /// that do not support a facet. The body is unchanged.
    pub fn irredundant(&self) -> Self {
        let vertices = self.vertices();
        let facets = self
            .facets
            .iter()
            .filter(|g| {
                let tight: Vec<Vec<T>> = vertices
                    .iter()
                    .filter(|v| is_negligible(&(g.apply_unchecked(v) - T::one()), &T::one()))
                    .map(|v| v.0.clone())
                    .collect();
                !tight.is_empty() && rank(tight) == self.dim
            })
            .cloned()
            .collect();
        SymPolytope { dim: self.dim, facets }
    }
}

/// `Some(r)` when `g = r * h`.
fn parallel_ratio<T: Scalar>(g: &Covector<T>, h: &Covector<T>) -> Option<T> {
    if rank(vec![g.0.clone(), h.0.clone()]) == 2 {
        return None;
    }
    let k = h.0.iter().position(|c| !c.is_zero())?;
    Some(g.0[k].clone() / h.0[k].clone())
}

/// A basis `(u1, u2)` of a 2-plane; points of the plane are `s u1 + t u2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBasis<T> {
    pub u1: Vector<T>,
    pub u2: Vector<T>,
}

impl<T: Scalar> PlaneBasis<T> {
    pub fn new(u1: Vector<T>, u2: Vector<T>) -> Result<Self> {
        check_dim(u1.dim(), u2.dim())?;
        if rank(vec![u1.0.clone(), u2.0.clone()]) < 2 {
            return Err(Error::Degenerate("plane basis vectors are dependent".into()));
        }
        Ok(PlaneBasis { u1, u2 })
    }

    /// `span(e_{i+1}, e_{j+1})` (zero based).
    pub fn coordinate(dim: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(Vector::basis(dim, i), Vector::basis(dim, j))
    }

    pub fn dim(&self) -> usize {
        self.u1.dim()
    }

    /// The ambient point `s u1 + t u2`.
    pub fn embed(&self, p: &Vec2<T>) -> Vector<T> {
        self.u1.scale(&p.x).add(&self.u2.scale(&p.y))
    }

    /// Restriction of an ambient covector to plane coordinates.
    pub fn restrict(&self, g: &Covector<T>) -> Vec2<T> {
        Vec2::new(g.apply_unchecked(&self.u1), g.apply_unchecked(&self.u2))
    }
}

/// The ambient facet functional `sign * g_index` supporting a section edge.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientFacet<T> {
    pub index: usize,
    pub sign: i8,
    pub functional: Covector<T>,
}

/// Data attached to edge `i` of a symmetric polygon, i.e. the side `[a_i, a_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonEdge<T> {
    /// `v_i = a_{i+1} - a_i`.
    pub vector: Vec2<T>,
    /// The linear function `f_i` equal to 1 on the side.
    pub support: Vec2<T>,
    /// `|a_i ∧ a_{i+1}| = h_i l_i`, twice the area of the triangle `0 a_i a_{i+1}`.
    pub double_triangle: T,
    /// `p_i = h_i l_i / A(K)`.
    pub weight: T,
    pub facet: Option<AmbientFacet<T>>,
}

/// A centrally symmetric, strictly convex polygon `a_1 … a_{2n}` (counterclockwise).
///
/// Only edges `1..=n` are stored; edge `i + n` is edge `i` negated. The cycle
/// starts at the side whose support functional has the smallest polar angle
/// in `[0, 2 pi)`, so all pairs `(f_i, f_j)`, `i < j`, are positively oriented.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPolygon<T> {
    vertices: Vec<Vec2<T>>,
    edges: Vec<PolygonEdge<T>>,
    area: T,
}

impl<T: Scalar> SymPolygon<T> {
    /// Builds the polygon from a full vertex cycle, which must be centrally
    /// symmetric and strictly convex; clockwise input is reversed.
    pub fn from_vertex_cycle(mut vertices: Vec<Vec2<T>>) -> Result<Self> {
        let m = vertices.len();
        if m < 4 || m % 2 != 0 {
            return Err(Error::InvalidInput(format!("symmetric polygon needs an even number >= 4 of vertices, got {m}")));
        }
        let n = m / 2;
        let scale = vertices.iter().fold(T::one(), |s, v| max_of(s, v.magnitude_bound()));
        for i in 0..n {
            if !vertices[i + n].approx_eq(&vertices[i].neg(), &scale) {
                return Err(Error::InvalidInput(format!("vertex {} is not the reflection of vertex {i}", i + n)));
            }
        }
        if shoelace(&vertices).is_negative() {
            vertices.reverse();
        }
        for i in 0..m {
            let turn = orientation(&vertices[i], &vertices[(i + 1) % m], &vertices[(i + 2) % m]);
            if turn != Ordering::Greater {
                return Err(Error::InvalidInput(format!("vertex cycle is not strictly convex at vertex {}", (i + 1) % m)));
            }
        }
        let supports: Vec<Vec2<T>> = (0..m)
            .map(|i| dual_intersection(&vertices[i], &vertices[(i + 1) % m]))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Degenerate("side through the origin".into()))?;
        let start = (0..m)
            .min_by(|&a, &b| angle_cmp(&supports[a], &supports[b]))
            .expect("nonempty");
        vertices.rotate_left(start);
        let mut supports = supports;
        supports.rotate_left(start);
        let half: Vec<Vec2<T>> = vertices[..n].to_vec();
        Ok(Self::assemble(half, supports[..n].to_vec(), vec![None; n]))
    }

    /// Hull of `±points`; fails unless it has positive area.
    pub fn from_points(points: &[Vec2<T>]) -> Result<Self> {
        let labelled: Vec<(Vec2<T>, usize)> = points
            .iter()
            .flat_map(|p| [p.clone(), p.neg()])
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let hull = convex_hull(&labelled);
        if hull.len() < 4 {
            return Err(Error::Degenerate("symmetric hull has no interior".into()));
        }
        Self::from_vertex_cycle(hull.into_iter().map(|(p, _)| p).collect())
    }

    /// The symmetric polygon whose consecutive sides are `v_1, …, v_n, -v_1, …, -v_n`.
    pub fn from_edge_vectors(edges: &[Vec2<T>]) -> Result<Self> {
        let total = edges.iter().fold(Vec2::zero(), |acc, v| acc.add(v));
        let mut a = total.scale(&-T::half());
        let mut vertices = Vec::with_capacity(2 * edges.len());
        for v in edges {
            vertices.push(a.clone());
            a = a.add(v);
        }
        let half = vertices.clone();
        vertices.extend(half.iter().map(|p| p.neg()));
        Self::from_vertex_cycle(vertices)
    }

    /// `half` holds `a_1..a_n`, `supports` the matching `f_1..f_n`.
    fn assemble(half: Vec<Vec2<T>>, supports: Vec<Vec2<T>>, facets: Vec<Option<AmbientFacet<T>>>) -> Self {
        let n = half.len();
        let mut vertices = half.clone();
        vertices.extend(half.iter().map(|p| p.neg()));
        let area = shoelace(&vertices);
        let edges = (0..n)
            .zip(supports)
            .zip(facets)
            .map(|((i, support), facet)| {
                let (a, b) = (&vertices[i], &vertices[i + 1]);
                let double_triangle = a.cross(b);
                PolygonEdge {
                    vector: b.sub(a),
                    support,
                    weight: double_triangle.clone() / area.clone(),
                    double_triangle,
                    facet,
                }
            })
            .collect();
        SymPolygon { vertices, edges, area }
    }

    /// Number of edge pairs `n` (the polygon has `2n` sides).
    pub fn n(&self) -> usize {
        self.edges.len()
    }

    /// All `2n` vertices, counterclockwise.
    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[PolygonEdge<T>] {
        &self.edges
    }

    pub fn area(&self) -> &T {
        &self.area
    }

    pub fn edge_vectors(&self) -> Vec<Vec2<T>> {
        self.edges.iter().map(|e| e.vector.clone()).collect()
    }

    pub fn supports(&self) -> Vec<Vec2<T>> {
        self.edges.iter().map(|e| e.support.clone()).collect()
    }

    pub fn weights(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.weight.clone()).collect()
    }

    /// Euclidean length `l_i` of side `i`.
    pub fn edge_length(&self, i: usize) -> f64 {
        self.edges[i].vector.norm_f64()
    }

    /// Distance `h_i` from the origin to the line through side `i`.
    pub fn edge_height(&self, i: usize) -> f64 {
        self.edges[i].double_triangle.to_f64() / self.edge_length(i)
    }

    /// `h_K(u) = max_{x in K} u . x`.
    pub fn support_function(&self, u: &Vec2<T>) -> T {
        self.vertices
            .iter()
            .map(|a| u.dot(a))
            .reduce(max_of)
            .expect("polygon has vertices")
    }

    pub fn contains(&self, x: &Vec2<T>) -> bool {
        let scale = x.magnitude_bound();
        self.edges.iter().all(|e| {
            let excess = e.support.dot(x).abs() - T::one();
            !excess.is_positive() || is_negligible(&excess, &scale)
        })
    }

    /// Same vertex set (exact in rational mode).
    pub fn same_shape(&self, other: &Self) -> bool {
        if self.vertices.len() != other.vertices.len() {
            return false;
        }
        let scale = self.vertices.iter().fold(T::one(), |s, v| max_of(s, v.magnitude_bound()));
        self.vertices
            .iter()
            .zip(&other.vertices)
            .all(|(a, b)| a.approx_eq(b, &scale))
    }

    /// A copy scaled by `s > 0`.
    pub fn scaled(&self, s: &T) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        Self::from_vertex_cycle(self.vertices.iter().map(|v| v.scale(s)).collect())
    }
}

/// Intersection of the slabs `|c_j . x| <= 1`, remembering which constraint
/// (and sign) supports each side. Ties go to the smallest constraint index.
fn intersect_labelled<T: Scalar>(constraints: &[Vec2<T>]) -> Result<(SymPolygon<T>, Vec<(usize, i8)>)> {
    let mut points: Vec<(Vec2<T>, (usize, u8))> = Vec::with_capacity(2 * constraints.len());
    for (j, c) in constraints.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        points.push((c.clone(), (j, 0)));
        points.push((c.neg(), (j, 1)));
    }
    let hull = convex_hull(&points);
    if hull.len() < 4 {
        return Err(Error::Unbounded("constraints do not span the dual plane".into()));
    }
    if hull.len() % 2 != 0 {
        return Err(Error::Degenerate("numerically asymmetric constraint hull".into()));
    }
    let m = hull.len();
    let n = m / 2;
    let start = (0..m)
        .min_by(|&a, &b| angle_cmp(&hull[a].0, &hull[b].0))
        .expect("nonempty hull");
    let normals: Vec<&(Vec2<T>, (usize, u8))> = (0..m).map(|k| &hull[(start + k) % m]).collect();
    let scale = normals.iter().fold(T::one(), |s, (c, _)| max_of(s, c.magnitude_bound()));
    for k in 0..n {
        if !normals[k + n].0.approx_eq(&normals[k].0.neg(), &scale) {
            return Err(Error::Degenerate("numerically asymmetric constraint hull".into()));
        }
    }
    let half: Vec<Vec2<T>> = (0..n)
        .map(|k| dual_intersection(&normals[(k + m - 1) % m].0, &normals[k].0))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Degenerate("parallel consecutive constraints".into()))?;
    let supports: Vec<Vec2<T>> = normals[..n].iter().map(|(c, _)| c.clone()).collect();
    let labels = normals[..n]
        .iter()
        .map(|(_, (j, s))| (*j, if *s == 0 { 1 } else { -1 }))
        .collect();
    let polygon = SymPolygon::assemble(half, supports, vec![None; n]);
    Ok((polygon, labels))
}

/// The symmetric polygon `{x : |f(x)| <= 1 for every constraint f}`.
///
/// Redundant and duplicated constraints are dropped; the result keeps only
/// constraints that support a side.
pub fn halfplane_intersection<T: Scalar>(constraints: &[Vec2<T>]) -> Result<SymPolygon<T>> {
    intersect_labelled(constraints).map(|(p, _)| p)
}

/// `B ∩ P` in the coordinates of `plane`, each side annotated with the
/// ambient facet functional `F_i = ±g_j` that supports it.
pub fn section<T: Scalar>(ball: &SymPolytope<T>, plane: &PlaneBasis<T>) -> Result<SymPolygon<T>> {
    check_dim(ball.dim(), plane.dim())?;
    let restricted: Vec<Vec2<T>> = ball.facets.iter().map(|g| plane.restrict(g)).collect();
    let (mut polygon, labels) = intersect_labelled(&restricted)?;
    for (edge, (j, sign)) in polygon.edges.iter_mut().zip(labels) {
        let g = &ball.facets[j];
        edge.facet = Some(AmbientFacet {
            index: j,
            sign,
            functional: if sign > 0 { g.clone() } else { g.neg() },
        });
    }
    Ok(polygon)
}

pub fn polygon_area<T: Scalar>(k: &SymPolygon<T>) -> T {
    k.area.clone()
}

/// `p_i = 2 A(0 a_i a_{i+1}) / A(K)` for `i = 1..n`.
pub fn edge_weights<T: Scalar>(k: &SymPolygon<T>) -> Vec<T> {
    k.weights()
}

/// `K* = {f : f(x) <= 1 on K}`; its vertices are `±f_i`.
pub fn polar_polygon<T: Scalar>(k: &SymPolygon<T>) -> Result<SymPolygon<T>> {
    halfplane_intersection(&k.vertices[..k.n()])
}

/// Mixed area normalized so that `V(K, K) = A(K)`:
/// half the sum over the sides `e` of `K2` of `h_K(outer normal of e) |e|`.
pub fn mixed_area<T: Scalar>(k: &SymPolygon<T>, k2: &SymPolygon<T>) -> T {
    // the sides i and i + n of K2 contribute equally
    k2.edges
        .iter()
        .fold(T::zero(), |acc, e| acc + k.support_function(&e.vector.outward_normal()))
}

/// `V(K, K2)^2 - A(K) A(K2)`, nonnegative by Minkowski's inequality.
pub fn minkowski_gap<T: Scalar>(k: &SymPolygon<T>, k2: &SymPolygon<T>) -> T {
    let v = mixed_area(k, k2);
    v.clone() * v - k.area.clone() * k2.area.clone()
}

/// A polyhedron `{x : a_r . x <= b_r}` in `R^k`, not necessarily symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintPolytope<T> {
    pub dim: usize,
    pub rows: Vec<(Covector<T>, T)>,
}

impl<T: Scalar> ConstraintPolytope<T> {
    pub fn new(dim: usize, rows: Vec<(Covector<T>, T)>) -> Result<Self> {
        for (a, _) in &rows {
            check_dim(dim, a.dim())?;
        }
        Ok(ConstraintPolytope { dim, rows })
    }

    /// `{x : |f(x)| <= 1}` for each functional.
    pub fn symmetric(dim: usize, functionals: &[Covector<T>]) -> Result<Self> {
        let rows = functionals
            .iter()
            .flat_map(|g| [(g.clone(), T::one()), (g.neg(), T::one())])
            .collect();
        Self::new(dim, rows)
    }

    /// The polygon, when this is a planar body in the layout of [`Self::symmetric`].
    fn as_sym_polygon(&self) -> Option<SymPolygon<T>> {
        if self.dim != 2 || self.rows.len() % 2 != 0 {
            return None;
        }
        let paired = self
            .rows
            .chunks(2)
            .all(|r| r[0].1.is_one() && r[1].1.is_one() && r[1].0 == r[0].0.neg());
        if !paired {
            return None;
        }
        let normals: Vec<Vec2<T>> = self
            .rows
            .iter()
            .step_by(2)
            .map(|(g, _)| Vec2::new(g.0[0].clone(), g.0[1].clone()))
            .collect();
        halfplane_intersection(&normals).ok()
    }

    pub fn contains(&self, x: &Vector<T>) -> bool {
        self.rows.iter().all(|(a, b)| {
            let excess = a.apply_unchecked(x) - b.clone();
            let scale = max_of(b.abs(), T::one());
            !excess.is_positive() || is_negligible(&excess, &scale)
        })
    }

    /// All vertices, by solving every `dim`-subset of constraint hyperplanes.
    /// Deterministic order (first discovery in lexicographic subset order).
    pub fn vertices(&self) -> Vec<Vector<T>> {
        if let Some(polygon) = self.as_sym_polygon() {
            return polygon.vertices().iter().map(|p| Vector(vec![p.x.clone(), p.y.clone()])).collect();
        }
        let mut out: Vec<Vector<T>> = Vec::new();
        for subset in combinations(self.rows.len(), self.dim) {
            let a: Vec<Vec<T>> = subset.iter().map(|&r| self.rows[r].0 .0.clone()).collect();
            let b: Vec<T> = subset.iter().map(|&r| self.rows[r].1.clone()).collect();
            let Some(x) = solve(a, b) else { continue };
            let x = Vector(x);
            if !self.contains(&x) {
                continue;
            }
            let scale = x.0.iter().fold(T::one(), |s, c| max_of(s, c.abs()));
            let dup = out.iter().any(|y| {
                y.0.iter()
                    .zip(&x.0)
                    .all(|(p, q)| is_negligible(&(p.clone() - q.clone()), &scale))
            });
            if !dup {
                out.push(x);
            }
        }
        out
    }

    /// True when the recession cone `{d : a_r . d <= 0}` is trivial.
    ///
    /// With full row rank the cone is pointed, so it is nontrivial exactly
    /// when one of its candidate extreme rays (null directions of `dim - 1`
    /// rows) satisfies every row.
    pub fn is_bounded(&self) -> bool {
        let k = self.dim;
        if rank(self.rows.iter().map(|(a, _)| a.0.clone()).collect()) < k {
            return false;
        }
        for subset in combinations(self.rows.len(), k - 1) {
            let m: Vec<Vec<T>> = subset.iter().map(|&r| self.rows[r].0 .0.clone()).collect();
            let d = null_direction(&m, k);
            if d.iter().all(|c| c.is_zero()) {
                continue;
            }
            for dir in [d.clone(), d.iter().map(|c| -c.clone()).collect()] {
                let recedes = self.rows.iter().all(|(a, _)| {
                    let s = a.0.iter().zip(&dir).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                    !s.is_positive() || is_negligible(&s, &T::one())
                });
                if recedes {
                    return false;
                }
            }
        }
        true
    }

    /// Indices of rows tight at `x`.
    pub fn tight_rows(&self, x: &Vector<T>) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| {
                let gap = a.apply_unchecked(x) - b.clone();
                is_negligible(&gap, &max_of(b.abs(), T::one()))
            })
            .map(|(r, _)| r)
            .collect()
    }
}

/// Generalized cross product of `k - 1` vectors in `R^k`: the cofactor vector
/// orthogonal to all of them (zero when they are dependent).
fn null_direction<T: Scalar>(rows: &[Vec<T>], k: usize) -> Vec<T> {
    (0..k)
        .map(|col| {
            let minor: Vec<Vec<T>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, v)| v.clone()).collect())
                .collect();
            let d = crate::linalg::determinant(minor);
            if col % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

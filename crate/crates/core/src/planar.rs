//! Planar primitives: points/covectors of `R^2`, orientation tests, exact
//! angular ordering and convex hulls.

use std::cmp::Ordering;

use crate::scalar::{sign_with_tolerance, Scalar};

/// A point of `R^2`, or a covector on `R^2` (`f(x) = x.x * f.x + x.y * f.y`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Vec2::new(T::from_i64(x), T::from_i64(y))
    }

    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    pub fn cross(&self, o: &Self) -> T {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec2::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec2::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Vec2::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Largest absolute coordinate, at least one.
    pub fn magnitude_bound(&self) -> T {
        let mut m = T::one();
        for c in [&self.x, &self.y] {
            if c.abs() > m {
                m = c.abs();
            }
        }
        m
    }

    pub fn norm_f64(&self) -> f64 {
        self.x.to_f64().hypot(self.y.to_f64())
    }

    /// Outward normal of a counterclockwise edge with this direction, with
    /// length equal to the edge length.
    pub fn outward_normal(&self) -> Self {
        Vec2::new(self.y.clone(), -self.x.clone())
    }

    /// Approximate equality under the scalar tolerance; exact in rational mode.
    pub fn approx_eq(&self, o: &Self, scale: &T) -> bool {
        sign_with_tolerance(&(self.x.clone() - o.x.clone()), scale) == Ordering::Equal
            && sign_with_tolerance(&(self.y.clone() - o.y.clone()), scale) == Ordering::Equal
    }
}

/// `0` for directions with angle in `[0, pi)`, `1` for `[pi, 2 pi)`.
fn half_plane<T: Scalar>(p: &Vec2<T>) -> u8 {
    if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
        0
    } else {
        1
    }
}

/// Compares the polar angles of two nonzero directions in `[0, 2 pi)` exactly.
pub fn angle_cmp<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> Ordering {
    half_plane(a).cmp(&half_plane(b)).then_with(|| {
        let c = a.cross(b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Orientation of `(b - a, c - a)` with near-zero turns treated as collinear.
pub fn orientation<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>, c: &Vec2<T>) -> Ordering {
    let u = b.sub(a);
    let w = c.sub(a);
    let scale = u.magnitude_bound() * w.magnitude_bound();
    sign_with_tolerance(&u.cross(&w), &scale)
}

fn lex_cmp<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
}

/// Strict convex hull (no collinear vertices) of labelled points, counterclockwise.
///
/// Coincident points keep the label that compares smallest, which makes the
/// choice deterministic.
pub fn convex_hull<T: Scalar, L: Ord + Clone>(points: &[(Vec2<T>, L)]) -> Vec<(Vec2<T>, L)> {
    let mut pts: Vec<(Vec2<T>, L)> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(&a.0, &b.0).then_with(|| a.1.cmp(&b.1)));
    let scale = pts
        .iter()
        .fold(T::one(), |m, (p, _)| if p.magnitude_bound() > m { p.magnitude_bound() } else { m });
    let mut unique: Vec<(Vec2<T>, L)> = Vec::with_capacity(pts.len());
    for (p, l) in pts {
        match unique.last_mut() {
            Some(last) if last.0.approx_eq(&p, &scale) => {
                if l < last.1 {
                    last.1 = l;
                }
            }
            _ => unique.push((p, l)),
        }
    }
    if unique.len() < 3 {
        return unique;
    }
    let mut lower: Vec<(Vec2<T>, L)> = Vec::new();
    for p in &unique {
        while lower.len() >= 2
            && orientation(&lower[lower.len() - 2].0, &lower[lower.len() - 1].0, &p.0) != Ordering::Greater
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(Vec2<T>, L)> = Vec::new();
    for p in unique.iter().rev() {
        while upper.len() >= 2
            && orientation(&upper[upper.len() - 2].0, &upper[upper.len() - 1].0, &p.0) != Ordering::Greater
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed shoelace area of a closed vertex cycle (positive for counterclockwise).
pub fn shoelace<T: Scalar>(vertices: &[Vec2<T>]) -> T {
    let n = vertices.len();
    let twice = (0..n).fold(T::zero(), |acc, i| acc + vertices[i].cross(&vertices[(i + 1) % n]));
    twice / T::from_i64(2)
}

/// Unique point where `a . x = 1` and `b . x = 1`; `None` for parallel lines.
pub fn dual_intersection<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> Option<Vec2<T>> {
    let det = a.cross(b);
    if det.is_zero() {
        return None;
    }
    Some(Vec2::new(
        (b.y.clone() - a.y.clone()) / det.clone(),
        (a.x.clone() - b.x.clone()) / det,
    ))
}

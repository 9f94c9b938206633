//! Constant-coefficient exterior algebra: vectors, covectors, 2-forms and
//! k-forms, with evaluation on simple multivectors.

use std::collections::BTreeMap;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{combinations, determinant, rank};
use crate::scalar::Scalar;

/// A point or direction of the ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector<T>(pub Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Vector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![T::zero(); n])
    }

    /// Standard basis vector `e_{i+1}` of `R^n` (zero based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = T::one();
        v
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Vector(self.0.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

/// A linear function on the ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Covector<T>(pub Vec<T>);

impl<T: Scalar> Covector<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Covector(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Covector(coeffs.iter().map(|&c| T::from_i64(c)).collect())
    }

    /// Coordinate functional `dx_{i+1}` on `R^n` (zero based).
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut c = vec![T::zero(); n];
        c[i] = T::one();
        Covector(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.0
    }

    pub fn apply(&self, v: &Vector<T>) -> Result<T> {
        check_dim(self.dim(), v.dim())?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &Vector<T>) -> T {
        self.0
            .iter()
            .zip(&v.0)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn neg(&self) -> Self {
        Covector(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Covector(self.0.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

/// An oriented pair `v1 ∧ v2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleTwoVector<T> {
    pub v1: Vector<T>,
    pub v2: Vector<T>,
}

impl<T: Scalar> SimpleTwoVector<T> {
    pub fn new(v1: Vector<T>, v2: Vector<T>) -> Result<Self> {
        check_dim(v1.dim(), v2.dim())?;
        Ok(SimpleTwoVector { v1, v2 })
    }

    pub fn dim(&self) -> usize {
        self.v1.dim()
    }

    /// Plücker coordinates `v1_i v2_j - v1_j v2_i` for `i < j`.
    pub fn plucker(&self) -> BTreeMap<(usize, usize), T> {
        let n = self.dim();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                out.insert((i, j), self.minor(i, j));
            }
        }
        out
    }

    fn minor(&self, i: usize, j: usize) -> T {
        let (a, b) = (&self.v1.0, &self.v2.0);
        a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()
    }

    /// True when `v1` and `v2` are linearly dependent (within tolerance).
    pub fn is_degenerate(&self) -> bool {
        if T::EXACT {
            let n = self.dim();
            return (0..n).all(|i| (i + 1..n).all(|j| self.minor(i, j).is_zero()));
        }
        rank(vec![self.v1.0.clone(), self.v2.0.clone()]) < 2
    }

    pub fn swapped(&self) -> Self {
        SimpleTwoVector {
            v1: self.v2.clone(),
            v2: self.v1.clone(),
        }
    }
}

/// A constant 2-form `Σ c_ij dx_i ∧ dx_j`, stored sparsely with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm<T> {
    dim: usize,
    coeffs: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> TwoForm<T> {
    pub fn zero(dim: usize) -> Self {
        TwoForm {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a form from `(i, j, c)` triples; `(j, i, c)` is read as `(i, j, -c)`.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut form = Self::zero(dim);
        for (i, j, c) in entries {
            if i >= dim || j >= dim {
                return Err(Error::InvalidInput(format!("index ({i},{j}) out of range for dim {dim}")));
            }
            form.add_term(i, j, c);
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn add_term(&mut self, i: usize, j: usize, c: T) {
        if i == j || c.is_zero() {
            return;
        }
        let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        let entry = self.coeffs.entry(key).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// Coefficient of `dx_i ∧ dx_j`, antisymmetric in `(i, j)`.
    pub fn coeff(&self, i: usize, j: usize) -> T {
        if i < j {
            self.coeffs.get(&(i, j)).cloned().unwrap_or_else(T::zero)
        } else if i > j {
            -self.coeff(j, i)
        } else {
            T::zero()
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &T)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(i, j), c) in &self.coeffs {
            out.add_term(i, j, c.clone() * s.clone());
        }
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: &T) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (&(i, j), c) in &other.coeffs {
            out.add_term(i, j, c.clone() * s.clone());
        }
        Ok(out)
    }

    /// `ω(v1 ∧ v2) = Σ_{i<j} c_ij (v1_i v2_j - v1_j v2_i)`.
    pub fn eval(&self, sigma: &SimpleTwoVector<T>) -> Result<T> {
        check_dim(self.dim, sigma.dim())?;
        let (a, b) = (&sigma.v1.0, &sigma.v2.0);
        Ok(self.coeffs.iter().fold(T::zero(), |acc, (&(i, j), c)| {
            acc + c.clone() * (a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone())
        }))
    }
}

/// `f ∧ g`, evaluating as `f(v)g(w) - f(w)g(v)`.
pub fn wedge<T: Scalar>(f: &Covector<T>, g: &Covector<T>) -> Result<TwoForm<T>> {
    check_dim(f.dim(), g.dim())?;
    let n = f.dim();
    let mut form = TwoForm::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            let c = f.0[i].clone() * g.0[j].clone() - f.0[j].clone() * g.0[i].clone();
            form.add_term(i, j, c);
        }
    }
    Ok(form)
}

pub fn eval_two_form<T: Scalar>(omega: &TwoForm<T>, sigma: &SimpleTwoVector<T>) -> Result<T> {
    omega.eval(sigma)
}

/// `|det [f; g]|` for covectors on the plane.
pub fn planar_wedge_norm<T: Scalar>(f: &Covector<T>, g: &Covector<T>) -> Result<T> {
    check_dim(2, f.dim())?;
    check_dim(2, g.dim())?;
    Ok((f.0[0].clone() * g.0[1].clone() - f.0[1].clone() * g.0[0].clone()).abs())
}

/// A constant k-form keyed by strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<T> {
    k: usize,
    dim: usize,
    coeffs: BTreeMap<Vec<usize>, T>,
}

impl<T: Scalar> KForm<T> {
    pub fn zero(k: usize, dim: usize) -> Result<Self> {
        if k == 0 || k > dim {
            return Err(Error::InvalidInput(format!("k = {k} must satisfy 1 <= k <= dim = {dim}")));
        }
        Ok(KForm {
            k,
            dim,
            coeffs: BTreeMap::new(),
        })
    }

    /// Sets the coefficient of `dx_{t_1} ∧ … ∧ dx_{t_k}`; unsorted tuples are
    /// sorted with the sign of the permutation, repeated indices are rejected.
    pub fn set(&mut self, tuple: &[usize], c: T) -> Result<()> {
        check_dim(self.k, tuple.len())?;
        if tuple.iter().any(|&t| t >= self.dim) {
            return Err(Error::InvalidInput(format!("tuple {tuple:?} out of range")));
        }
        let mut sorted = tuple.to_vec();
        let mut sign_negative = false;
        // bubble sort tracks parity
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    sign_negative = !sign_negative;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("tuple {tuple:?} repeats an index")));
        }
        let c = if sign_negative { -c } else { c };
        if c.is_zero() {
            self.coeffs.remove(&sorted);
        } else {
            self.coeffs.insert(sorted, c);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, tuple: &[usize]) -> T {
        self.coeffs.get(tuple).cloned().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.coeffs.iter()
    }

    pub fn from_two_form(form: &TwoForm<T>) -> Self {
        KForm {
            k: 2,
            dim: form.dim(),
            coeffs: form.entries().map(|(&(i, j), c)| (vec![i, j], c.clone())).collect(),
        }
    }

    /// `ω(v_1, …, v_k) = Σ_T c_T det(v_a[t_b])`, the k×k minors of the vectors.
    pub fn eval(&self, vectors: &[Vector<T>]) -> Result<T> {
        check_dim(self.k, vectors.len())?;
        for v in vectors {
            check_dim(self.dim, v.dim())?;
        }
        let mut total = T::zero();
        for (tuple, c) in &self.coeffs {
            let minor: Vec<Vec<T>> = vectors
                .iter()
                .map(|v| tuple.iter().map(|&t| v.0[t].clone()).collect())
                .collect();
            total = total + c.clone() * determinant(minor);
        }
        Ok(total)
    }

    /// Every strictly increasing tuple of length k over `0..dim`.
    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        combinations(self.dim, self.k)
    }
}

pub fn eval_k_form<T: Scalar>(omega: &KForm<T>, vectors: &[Vector<T>]) -> Result<T> {
    omega.eval(vectors)
}

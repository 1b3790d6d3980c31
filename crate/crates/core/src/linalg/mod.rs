//! Exact linear algebra over an [`ExactField`]: row reduction, subspace
//! membership, orthogonal complements and feasibility of relatively open
//! polyhedral cones.

mod cone;
mod fourier_motzkin;
mod simplex;

use std::fmt;
use std::ops::{Deref, DerefMut};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use cone::{feasible, feasible_with, ConeMethod, ConeSpec, Relation};

use crate::error::{Error, Result};
use crate::scalar::ExactField;

/// A dense vector of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector<T>(pub Vec<T>);

impl<T: ExactField> Vector<T> {
    pub fn zeros(d: usize) -> Self {
        Vector(vec![T::zero(); d])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Vector(values.iter().map(|&v| T::from_int(v)).collect())
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[i] = T::one();
        v
    }

    pub fn dot(&self, other: &[T]) -> T {
        dot(&self.0, other)
    }

    pub fn dot_ints(&self, other: &[i64]) -> T {
        self.0
            .iter()
            .zip(other)
            .fold(T::zero(), |acc, (a, &b)| acc + a.clone() * T::from_int(b))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &T) -> Self {
        Vector(self.0.iter().map(|v| v.clone() * k.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(crate::scalar::to_float).collect()
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T: fmt::Display> fmt::Display for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Vector<BigRational> {
    /// Rescales to the primitive integer vector with the same direction.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = num_bigint::BigInt::one();
        for v in &self.0 {
            lcm = lcm.lcm(v.denom());
        }
        let ints: Vec<num_bigint::BigInt> = self
            .0
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()))
            .collect();
        let mut g = num_bigint::BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        Vector(
            ints.into_iter()
                .map(|v| BigRational::from_integer(v / &g))
                .collect(),
        )
    }
}

pub fn dot<T: ExactField>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// An ordered list of linearly independent vectors spanning a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis<T> {
    ambient: usize,
    vectors: Vec<Vector<T>>,
}

impl<T: ExactField> Basis<T> {
    /// Builds a basis from the independent members of `generators`, keeping
    /// the first vector of every dependent run.
    pub fn from_generators(ambient: usize, generators: &[Vector<T>]) -> Result<Self> {
        let mut vectors: Vec<Vector<T>> = Vec::new();
        let mut echelon: Vec<Vec<T>> = Vec::new();
        for g in generators {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: g.len(),
                });
            }
            let mut rows = echelon.clone();
            rows.push(g.0.clone());
            if rank(&rows) > echelon.len() {
                echelon = rref(rows).0;
                vectors.push(g.clone());
            }
        }
        Ok(Basis { ambient, vectors })
    }

    pub fn empty(ambient: usize) -> Self {
        Basis {
            ambient,
            vectors: Vec::new(),
        }
    }

    pub fn standard(ambient: usize) -> Self {
        Basis {
            ambient,
            vectors: (0..ambient).map(|i| Vector::unit(ambient, i)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector<T>] {
        &self.vectors
    }

    /// Whether both bases span the same subspace.
    pub fn same_span(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && other.vectors.iter().all(|v| member(self, v).ok().flatten().is_some())
    }
}

/// Reduced row echelon form. Returns the nonzero rows and the pivot columns.
pub fn rref<T: ExactField>(mut rows: Vec<Vec<T>>) -> (Vec<Vec<T>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let sub = f.clone() * rows[r][j].clone();
                    rows[i][j] = rows[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<T: ExactField>(rows: &[Vec<T>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(rows.to_vec()).1.len()
}

/// Basis of `{x : <r, x> = 0 for every row r}`.
pub fn nullspace<T: ExactField>(ncols: usize, rows: &[Vec<T>]) -> Vec<Vector<T>> {
    let (reduced, pivots) = if rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(rows.to_vec())
    };
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); ncols];
            v[f] = T::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            Vector(v)
        })
        .collect()
}

/// Coefficients `c` with `sum c_i b_i = v`, or `None` when `v` is outside the span.
pub fn member<T: ExactField>(basis: &Basis<T>, v: &[T]) -> Result<Option<Vec<T>>> {
    if v.len() != basis.ambient {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient,
            got: v.len(),
        });
    }
    let k = basis.dim();
    if k == 0 {
        return Ok(v.iter().all(Zero::is_zero).then(Vec::new));
    }
    // augmented system: row i is (b_1[i], ..., b_k[i] | v[i])
    let rows: Vec<Vec<T>> = (0..basis.ambient)
        .map(|i| {
            let mut row: Vec<T> = basis.vectors.iter().map(|b| b.0[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let (reduced, pivots) = rref(rows);
    if pivots.contains(&k) {
        return Ok(None);
    }
    let mut coeffs = vec![T::zero(); k];
    for (row, &p) in reduced.iter().zip(&pivots) {
        coeffs[p] = row[k].clone();
    }
    Ok(Some(coeffs))
}

/// Exact basis of the orthogonal complement, scaled to primitive integer
/// directions when possible.
pub fn orthogonal_complement<T: ExactField>(basis: &Basis<T>) -> Basis<T> {
    let rows: Vec<Vec<T>> = basis.vectors.iter().map(|v| v.0.clone()).collect();
    let vectors = nullspace(basis.ambient, &rows)
        .into_iter()
        .map(clear_denominators)
        .collect();
    Basis {
        ambient: basis.ambient,
        vectors,
    }
}

fn clear_denominators<T: ExactField>(v: Vector<T>) -> Vector<T> {
    let k = T::denominator_lcm(&v.0);
    v.scale(&k)
}

/// True when `w` is orthogonal to every vector of `basis`.
pub fn is_orthogonal<T: ExactField>(basis: &Basis<T>, w: &[T]) -> bool {
    basis.vectors.iter().all(|b| dot(&b.0, w).is_zero())
}

pub fn sign<T: ExactField>(v: &T) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

use super::{fourier_motzkin, nullspace, simplex, Vector};
use crate::error::{Error, Result};
use crate::scalar::ExactField;

/// Required sign of `<normal, w>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Negative,
    Zero,
    Positive,
}

impl Relation {
    pub fn from_sign(s: i8) -> Self {
        match s.signum() {
            -1 => Relation::Negative,
            0 => Relation::Zero,
            _ => Relation::Positive,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Relation::Negative => -1,
            Relation::Zero => 0,
            Relation::Positive => 1,
        }
    }

    pub fn holds<T: ExactField>(self, value: &T) -> bool {
        super::sign(value) == self.sign()
    }
}

/// A relatively open polyhedral cone `{w : sign <n_i, w> = s_i for all i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec<T> {
    dim: usize,
    constraints: Vec<(Vector<T>, Relation)>,
}

impl<T: ExactField> ConeSpec<T> {
    pub fn new(dim: usize) -> Self {
        ConeSpec {
            dim,
            constraints: Vec::new(),
        }
    }

    pub fn with(mut self, normal: Vector<T>, relation: Relation) -> Result<Self> {
        self.push(normal, relation)?;
        Ok(self)
    }

    pub fn push(&mut self, normal: Vector<T>, relation: Relation) -> Result<()> {
        if normal.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: normal.len(),
            });
        }
        self.constraints.push((normal, relation));
        Ok(())
    }

    pub fn pop(&mut self) -> Option<(Vector<T>, Relation)> {
        self.constraints.pop()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[(Vector<T>, Relation)] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Independent re-evaluation of every constraint at `w`.
    pub fn contains(&self, w: &[T]) -> bool {
        w.len() == self.dim
            && self
                .constraints
                .iter()
                .all(|(n, rel)| rel.holds(&n.dot(w)))
    }
}

/// Solver used for the homogenized system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeMethod {
    /// Fourier–Motzkin up to dimension 4, simplex above.
    Auto,
    FourierMotzkin,
    Simplex,
}

/// Returns an exact point of the cone, or `None` when the cone is empty.
pub fn feasible<T: ExactField>(cone: &ConeSpec<T>) -> Option<Vector<T>> {
    feasible_with(cone, ConeMethod::Auto)
}

pub fn feasible_with<T: ExactField>(cone: &ConeSpec<T>, method: ConeMethod) -> Option<Vector<T>> {
    let d = cone.dim;
    // Equalities restrict w to the nullspace N of their normals: w = N t.
    let eq_rows: Vec<Vec<T>> = cone
        .constraints
        .iter()
        .filter(|(_, r)| *r == Relation::Zero)
        .map(|(n, _)| n.0.clone())
        .collect();
    let null = if eq_rows.is_empty() {
        (0..d).map(|i| Vector::unit(d, i)).collect()
    } else {
        nullspace(d, &eq_rows)
    };

    // Strict constraints become <s n_i, N t> >= 1 (cones are scale invariant).
    let mut rows: Vec<(Vec<T>, T)> = Vec::new();
    for (n, rel) in &cone.constraints {
        let s = match rel {
            Relation::Zero => continue,
            Relation::Positive => T::one(),
            Relation::Negative => -T::one(),
        };
        let reduced: Vec<T> = null.iter().map(|b| b.dot(n) * s.clone()).collect();
        if reduced.iter().all(|v| v.is_zero()) {
            return None;
        }
        rows.push((reduced, T::one()));
    }
    if null.is_empty() {
        return rows.is_empty().then(|| Vector::zeros(d));
    }

    let nvars = null.len();
    let t = match method {
        ConeMethod::FourierMotzkin => fourier_motzkin::solve(rows, nvars)?,
        ConeMethod::Simplex => simplex::solve(rows, nvars)?,
        ConeMethod::Auto if d <= 4 => fourier_motzkin::solve(rows, nvars)?,
        ConeMethod::Auto => simplex::solve(rows, nvars)?,
    };

    let mut w = Vector::zeros(d);
    for (coef, b) in t.iter().zip(&null) {
        if !coef.is_zero() {
            w = w.add(&b.scale(coef));
        }
    }
    let w = w.scale(&T::denominator_lcm(&w.0));
    debug_assert!(cone.contains(&w));
    Some(w)
}

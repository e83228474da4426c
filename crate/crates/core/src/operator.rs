//! Exact sparse operators indexed by the points of a space.
//!
//! Entries are generic over [`Scalar`]; the exact constructions use
//! [`crate::RationalOperator`] and the norm estimators convert to
//! [`crate::FloatOperator`]. Zero entries are never stored.

use std::collections::BTreeMap;

use num::BigRational;
use serde_json::json;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::Space;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> SparseOperator<T> {
    pub fn zero(dim: usize) -> Self {
        SparseOperator {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        for i in 0..dim {
            op.set(i, i, T::one());
        }
        op
    }

    /// Matrix unit e_{xy}.
    pub fn unit(dim: usize, x: usize, y: usize) -> Self {
        let mut op = Self::zero(dim);
        op.set(x, y, T::one());
        op
    }

    /// Diagonal indicator of a point set.
    pub fn indicator(dim: usize, set: &[usize]) -> Self {
        let mut op = Self::zero(dim);
        for &x in set {
            op.set(x, x, T::one());
        }
        op
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut op = Self::zero(dim);
        for (x, y, v) in entries {
            if x >= dim || y >= dim {
                return Err(Error::InvalidParameter(format!(
                    "entry ({x},{y}) outside a {dim}-point space"
                )));
            }
            op.set(x, y, v);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.entries.get(&(x, y)).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, x: usize, y: usize, v: T) {
        assert!(x < self.dim && y < self.dim, "index outside space");
        if v.is_zero() {
            self.entries.remove(&(x, y));
        } else {
            self.entries.insert((x, y), v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(x, y), v)| (x, y, v))
    }

    /// Positions of nonzero entries.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// sup{d(x,y) : T_{xy} != 0}; zero for the zero operator.
    pub fn propagation(&self, space: &Space) -> u64 {
        assert_eq!(self.dim, space.len(), "operator/space dimension mismatch");
        self.entries
            .keys()
            .map(|&(x, y)| space.dist(x, y))
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (&(x, y), v) in &other.entries {
            let sum = out.get(x, y) + v.clone();
            out.set(x, y, sum);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (&(x, y), v) in &other.entries {
            let diff = out.get(x, y) - v.clone();
            out.set(x, y, diff);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(x, y), v) in &self.entries {
            out.set(x, y, T::zero() - v.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(x, y), v) in &self.entries {
            out.set(x, y, c.clone() * v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        // group rhs entries by row for the sparse product
        let mut by_row: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for (&(x, y), v) in &other.entries {
            by_row.entry(x).or_default().push((y, v));
        }
        let mut out = Self::zero(self.dim);
        for (&(x, z), a) in &self.entries {
            if let Some(row) = by_row.get(&z) {
                for &(y, b) in row {
                    let acc = out.get(x, y) + a.clone() * b.clone();
                    out.set(x, y, acc);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(x, y), v) in &self.entries {
            out.set(y, x, v.clone());
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|&(x, y)| x == y)
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![T::zero(); self.dim];
        for (&(x, y), a) in &self.entries {
            out[x] = out[x].clone() + a.clone() * v[y].clone();
        }
        out
    }

    /// Exact operator norm on l^1: max absolute column sum.
    pub fn norm_p1(&self) -> T {
        let mut cols: BTreeMap<usize, T> = BTreeMap::new();
        for (&(_, y), v) in &self.entries {
            let e = cols.entry(y).or_insert_with(T::zero);
            *e = e.clone() + v.abs();
        }
        cols.into_values()
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    /// Exact operator norm on l^infinity: max absolute row sum.
    pub fn norm_pinf(&self) -> T {
        self.transpose().norm_p1()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseOperator<U> {
        let mut out = SparseOperator::zero(self.dim);
        for (&(x, y), v) in &self.entries {
            out.set(x, y, f(v));
        }
        out
    }

    pub fn to_float(&self) -> SparseOperator<f64> {
        self.map(|v| v.as_f64())
    }

    /// Restriction 1_Y a 1_Y to a point set (same ambient dimension).
    pub fn restrict(&self, set: &[usize]) -> Self {
        let member = {
            let mut m = vec![false; self.dim];
            for &x in set {
                m[x] = true;
            }
            m
        };
        let mut out = Self::zero(self.dim);
        for (&(x, y), v) in &self.entries {
            if member[x] && member[y] {
                out.set(x, y, v.clone());
            }
        }
        out
    }
}

// -- JSON (exact rational operators) ---------------------------------------

/// Serializes a rational operator as
/// `{space_id, dim, triplets: [[row_id, col_id, num, den], ...]}`.
pub fn rational_op_to_json(
    op: &SparseOperator<Rational>,
    space: &Space,
    space_id: Option<&str>,
) -> serde_json::Value {
    let triplets: Vec<serde_json::Value> = op
        .iter()
        .map(|(x, y, v)| {
            json!([
                space.id(x),
                space.id(y),
                v.numer().to_string(),
                v.denom().to_string()
            ])
        })
        .collect();
    json!({
        "space_id": space_id,
        "dim": op.dim(),
        "triplets": triplets,
    })
}

pub fn rational_op_from_json(
    v: &serde_json::Value,
    space: &Space,
) -> Result<SparseOperator<Rational>> {
    let triplets = v
        .get("triplets")
        .and_then(|t| t.as_array())
        .ok_or_else(|| Error::InvalidParameter("operator JSON missing 'triplets'".into()))?;
    let mut entries = Vec::new();
    for t in triplets {
        let parts = t
            .as_array()
            .filter(|a| a.len() == 4)
            .ok_or_else(|| Error::InvalidParameter("triplet must be [row,col,num,den]".into()))?;
        let id = |k: usize| -> Result<&str> {
            parts[k]
                .as_str()
                .ok_or_else(|| Error::InvalidParameter("triplet fields must be strings".into()))
        };
        let row = space.index_of(id(0)?)?;
        let col = space.index_of(id(1)?)?;
        let num: num::BigInt = id(2)?
            .parse()
            .map_err(|_| Error::InvalidParameter("bad numerator".into()))?;
        let den: num::BigInt = id(3)?
            .parse()
            .map_err(|_| Error::InvalidParameter("bad denominator".into()))?;
        if den == num::BigInt::from(0) {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        entries.push((row, col, BigRational::new(num, den)));
    }
    SparseOperator::from_entries(space.len(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, Family};
    use crate::{rat, ratio};

    #[test]
    fn basic_algebra() {
        let id = SparseOperator::<Rational>::identity(3);
        let e01 = SparseOperator::<Rational>::unit(3, 0, 1);
        assert_eq!(id.mul(&e01), e01);
        assert_eq!(e01.mul(&e01.transpose()), SparseOperator::unit(3, 0, 0));
        assert!(id.is_idempotent());
        assert_eq!(id.trace(), rat(3));
    }

    #[test]
    fn zero_entries_not_stored() {
        let mut op = SparseOperator::<Rational>::zero(2);
        op.set(0, 1, rat(5));
        op.set(0, 1, rat(0));
        assert!(op.is_zero());
        let a = SparseOperator::<Rational>::unit(2, 0, 1);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn propagation_examples() {
        let s = make_window(&Family::Z, 10).unwrap();
        let id = SparseOperator::<Rational>::identity(10);
        assert_eq!(id.propagation(&s), 0);
        let e09 = SparseOperator::<Rational>::unit(10, 0, 9);
        assert_eq!(e09.propagation(&s), 9);
    }

    #[test]
    fn exact_norms() {
        let op = SparseOperator::from_entries(
            2,
            [(0, 0, rat(1)), (0, 1, rat(1)), (1, 1, rat(1))],
        )
        .unwrap();
        assert_eq!(op.norm_p1(), rat(2));
        assert_eq!(op.norm_pinf(), rat(2));
        let half = SparseOperator::from_entries(2, [(0, 1, ratio(-1, 2))]).unwrap();
        assert_eq!(half.norm_p1(), ratio(1, 2));
    }

    #[test]
    fn json_round_trip() {
        let s = make_window(&Family::Z, 4).unwrap();
        let op = SparseOperator::from_entries(
            4,
            [(0, 1, ratio(1, 2)), (3, 0, rat(-2))],
        )
        .unwrap();
        let j = rational_op_to_json(&op, &s, Some("z4"));
        let op2 = rational_op_from_json(&j, &s).unwrap();
        assert_eq!(op, op2);
    }
}

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{support, AtomicSpace, SupportSet, Vector};
use crate::linalg::{self, Matrix};
use crate::rational::Rational;

/// An `n x n` exact matrix acting on an [`AtomicSpace`]; column `i` is
/// `T e_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    space: AtomicSpace,
    entries: Matrix,
}

impl Operator {
    pub fn new(space: AtomicSpace, entries: Matrix) -> Result<Self> {
        let n = space.dim();
        if entries.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.len(),
            });
        }
        if let Some(row) = entries.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        Ok(Operator { space, entries })
    }

    pub fn zero(space: AtomicSpace) -> Self {
        let n = space.dim();
        Operator {
            space,
            entries: linalg::zeros(n, n),
        }
    }

    pub fn identity(space: AtomicSpace) -> Self {
        let n = space.dim();
        Operator {
            space,
            entries: linalg::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &AtomicSpace {
        &self.space
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    /// Same matrix on a different space of the same dimension.
    pub fn with_space(&self, space: AtomicSpace) -> Result<Self> {
        Operator::new(space, self.entries.clone())
    }

    pub fn column(&self, i: usize) -> Vector {
        Vector(self.entries.iter().map(|row| row[i].clone()).collect())
    }

    pub fn row(&self, k: usize) -> &[Rational] {
        &self.entries[k]
    }

    /// `supp(T e_{i+1})`.
    pub fn column_support(&self, i: usize) -> SupportSet {
        let mut s = SupportSet::EMPTY;
        for (k, row) in self.entries.iter().enumerate() {
            if !row[i].is_zero() {
                s.insert_index(k);
            }
        }
        s
    }

    pub fn row_support(&self, k: usize) -> SupportSet {
        support(&self.entries[k])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }

    pub fn apply(&self, f: &Vector) -> Result<Vector> {
        self.space.check_dim(f)?;
        Ok(Vector(self.entries.iter().map(|row| linalg::dot(row, f)).collect()))
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Operator {
            space: self.space.clone(),
            entries: linalg::matmul(&self.entries, &other.entries),
        })
    }

    /// `T T = T`, exactly.
    pub fn is_projection(&self) -> bool {
        linalg::matmul(&self.entries, &self.entries) == self.entries
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.entries, self.dim())
    }

    /// `(u, psi)` with `T = u psi^T`, when the rank is exactly one. `u` is the
    /// first nonzero column.
    pub fn rank_one_factors(&self) -> Option<(Vector, Vector)> {
        let n = self.dim();
        let j = (0..n).find(|&j| !self.column_support(j).is_empty())?;
        let u = self.column(j);
        let k = u.iter().position(|x| !x.is_zero())?;
        let psi = Vector((0..n).map(|i| &self.entries[k][i] / &u[k]).collect());
        for (r, row) in self.entries.iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                if *x != &u[r] * &psi[i] {
                    return None;
                }
            }
        }
        Some((u, psi))
    }

    pub fn scaled(&self, c: &Rational) -> Operator {
        Operator {
            space: self.space.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|x| x * c).collect())
                .collect(),
        }
    }
}

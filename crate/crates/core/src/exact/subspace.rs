use std::fmt;

use serde::{Deserialize, Serialize};

use super::mat::Mat;
use super::scalar::GaussianRational;
use crate::error::Error;

/// A linear subspace of Q(i)^n, held by its unique reduced column-echelon
/// basis.  Because the representative is canonical, subspace equality is
/// plain entrywise equality of the basis matrices.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    /// Columns form the canonical basis; `cols() == 0` encodes the zero space.
    basis: Mat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zero(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::identity(ambient),
        }
    }

    /// Span of the columns of `m`, canonicalised.
    pub fn from_cols(m: &Mat) -> Self {
        // The canonical column-echelon basis is the transposed RREF of the
        // transpose: unique for the column space.
        let (r, pivots) = m.transpose().rref();
        let rows: Vec<usize> = (0..pivots.len()).collect();
        let cols: Vec<usize> = (0..m.rows()).collect();
        let reduced = r.submatrix(&rows, &cols).transpose();
        Subspace {
            ambient: m.rows(),
            basis: reduced,
        }
    }

    pub fn from_vectors(ambient: usize, vs: &[Vec<GaussianRational>]) -> Self {
        if vs.is_empty() {
            return Subspace::zero(ambient);
        }
        Subspace::from_cols(&Mat::from_cols(ambient, vs))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<GaussianRational>> {
        self.basis.columns()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn contains_vector(&self, v: &[GaussianRational]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        if v.iter().all(|e| e.is_zero()) {
            return true;
        }
        if self.dim() == 0 {
            return false;
        }
        let rhs = Mat::from_cols(self.ambient, &[v.to_vec()]);
        self.basis.solve(&rhs).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other
            .basis_vectors()
            .iter()
            .all(|v| self.contains_vector(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check_ambient(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        Ok(Subspace::from_cols(&self.basis.hstack(&other.basis)))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        // u = A a = B b  <=>  [A | -B] (a; b) = 0
        let stacked = self.basis.hstack(&other.basis.neg());
        let ker = stacked.kernel_basis();
        let mut vecs = Vec::new();
        for k in 0..ker.cols() {
            let a: Vec<GaussianRational> = (0..self.dim()).map(|j| ker.at(j, k).clone()).collect();
            vecs.push(self.basis.apply(&a));
        }
        Ok(Subspace::from_vectors(self.ambient, &vecs))
    }

    /// Kernel of a linear map.
    pub fn kernel(m: &Mat) -> Subspace {
        Subspace::from_cols(&m.kernel_basis())
    }

    /// Column space of a linear map.
    pub fn image(m: &Mat) -> Subspace {
        Subspace::from_cols(m)
    }

    /// { x : m x in target }.
    pub fn preimage(m: &Mat, target: &Subspace) -> Result<Subspace, Error> {
        if m.rows() != target.ambient {
            return Err(Error::DimensionMismatch {
                context: "preimage target",
            });
        }
        if target.is_full() {
            return Ok(Subspace::full(m.cols()));
        }
        // m x = T c  <=>  [m | -T](x; c) = 0, then project onto x.
        let stacked = if target.is_zero() {
            m.clone()
        } else {
            m.hstack(&target.basis.neg())
        };
        let ker = stacked.kernel_basis();
        let mut vecs = Vec::new();
        for k in 0..ker.cols() {
            vecs.push((0..m.cols()).map(|j| ker.at(j, k).clone()).collect());
        }
        Ok(Subspace::from_vectors(m.cols(), &vecs))
    }

    /// Image under a linear map (as a subspace of the codomain).
    pub fn apply(&self, m: &Mat) -> Result<Subspace, Error> {
        if m.cols() != self.ambient {
            return Err(Error::DimensionMismatch {
                context: "apply map",
            });
        }
        if self.is_zero() {
            return Ok(Subspace::zero(m.rows()));
        }
        Ok(Subspace::from_cols(&m.mul(&self.basis)))
    }

    pub fn conj(&self) -> Subspace {
        Subspace::from_cols(&self.basis.conj())
    }

    /// Rational means stable under conjugation, i.e. defined over Q.
    pub fn is_rational(&self) -> bool {
        self.conj() == *self
    }

    /// Coordinates of `v` in the canonical basis; `None` if not a member.
    pub fn coordinates(&self, v: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        if self.dim() == 0 {
            return if v.iter().all(|e| e.is_zero()) {
                Some(Vec::new())
            } else {
                None
            };
        }
        let rhs = Mat::from_cols(self.ambient, &[v.to_vec()]);
        self.basis.solve(&rhs).map(|sol| sol.col(0))
    }

    /// Extend this subspace's basis by greedily chosen columns of `candidates`
    /// that are independent modulo it; returns the chosen column indices.
    pub fn greedy_extension(&self, candidates: &Mat) -> (Subspace, Vec<usize>) {
        let mut current = self.clone();
        let mut chosen = Vec::new();
        for c in 0..candidates.cols() {
            let v = candidates.col(c);
            if !current.contains_vector(&v) {
                let mut with = current.basis_vectors();
                with.push(v);
                current = Subspace::from_vectors(self.ambient, &with);
                chosen.push(c);
            }
        }
        (current, chosen)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), Error> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                context: "ambient dimensions differ",
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} of {}) {:?}",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}

//! Exact scalar and matrix arithmetic over the rationals and the Gaussian
//! rationals, together with the subspace calculus, Hermitian signatures and
//! the nilpotent exponential/logarithm pair that the rest of the crate is
//! built on.  Nothing in here ever rounds.

mod lattice;
mod mat;
mod scalar;
mod signature;
mod subspace;

pub use lattice::RationalLattice;
pub use mat::Mat;
pub use scalar::{parse_rational, rational_to_string, GaussianRational, Rational};
pub use signature::{hermitian_signature, Signature};
pub use subspace::Subspace;

use crate::error::Error;

/// Exponential of a nilpotent matrix, as a finite exact series.
///
/// Fails with [`Error::NotNilpotent`] when no power of `x` up to the ambient
/// dimension vanishes.
pub fn exp_nilpotent(x: &Mat) -> Result<Mat, Error> {
    let n = square_dim(x)?;
    let mut sum = Mat::identity(n);
    let mut term = Mat::identity(n);
    for j in 1..=n {
        term = term.mul(x);
        if term.is_zero() {
            return Ok(sum);
        }
        term = term.scale(&GaussianRational::from_ratio(1, j as i64));
        sum = sum.add(&term);
    }
    Err(Error::NotNilpotent)
}

/// Logarithm of a unipotent matrix, inverse to [`exp_nilpotent`].
pub fn log_unipotent(u: &Mat) -> Result<Mat, Error> {
    let n = square_dim(u)?;
    let nil = u.sub(&Mat::identity(n));
    // u - 1 must be nilpotent; reuse the power check from exp.
    let mut probe = nil.clone();
    let mut index = 1usize;
    while !probe.is_zero() {
        index += 1;
        if index > n {
            return Err(Error::NotUnipotent);
        }
        probe = probe.mul(&nil);
    }
    let mut sum = Mat::zero(n, n);
    let mut power = Mat::identity(n);
    for j in 1..=index {
        power = power.mul(&nil);
        let coeff = if j % 2 == 1 {
            GaussianRational::from_ratio(1, j as i64)
        } else {
            GaussianRational::from_ratio(-1, j as i64)
        };
        sum = sum.add(&power.scale(&coeff));
    }
    Ok(sum)
}

fn square_dim(m: &Mat) -> Result<usize, Error> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch {
            context: "square matrix expected",
        });
    }
    Ok(m.rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n_a() -> Mat {
        // e1 -> e2
        Mat::from_rows_i64(&[&[0, 0], &[1, 0]])
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Mat::zero(3, 3);
        assert_eq!(exp_nilpotent(&z).unwrap(), Mat::identity(3));
    }

    #[test]
    fn exp_and_log_on_rank_two_chain() {
        let n = n_a();
        let t = exp_nilpotent(&n).unwrap();
        assert_eq!(t, Mat::from_rows_i64(&[&[1, 0], &[1, 1]]));
        assert_eq!(log_unipotent(&t).unwrap(), n);
    }

    #[test]
    fn exp_log_roundtrip_on_index_three_chain() {
        // e1 -> e2 -> e3 -> 0, nilpotency index 3
        let n = Mat::from_rows_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let t = exp_nilpotent(&n).unwrap();
        // three-term series: entry (3,1) is 1/2
        assert_eq!(
            *t.at(2, 0),
            GaussianRational::from_ratio(1, 2),
            "series must carry the quadratic term"
        );
        assert_eq!(log_unipotent(&t).unwrap(), n);
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        let m = Mat::identity(2);
        assert!(matches!(exp_nilpotent(&m), Err(Error::NotNilpotent)));
    }

    #[test]
    fn log_rejects_non_unipotent() {
        let m = Mat::from_rows_i64(&[&[2, 0], &[0, 1]]);
        assert!(matches!(log_unipotent(&m), Err(Error::NotUnipotent)));
    }
}

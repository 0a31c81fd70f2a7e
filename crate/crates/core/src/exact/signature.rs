use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::mat::Mat;
use super::scalar::GaussianRational;
use crate::error::Error;

/// Inertia of a Hermitian form: numbers of positive, negative and zero
/// eigenvalues, computed exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_positive_definite(&self) -> bool {
        self.minus == 0 && self.zero == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.plus == 0 && self.zero == 0
    }
}

/// Exact inertia of a Hermitian matrix `h` (convention `h = h^H`, form
/// `f(u, v) = u^H h v`), by symmetric congruence elimination with exact
/// pivots.  A vanishing diagonal is handled with the hyperbolic two-by-two
/// trick: replacing e_j by e_j + h_jk e_k makes the j-th diagonal entry the
/// positive value 2|h_jk|^2.
pub fn hermitian_signature(h: &Mat) -> Result<Signature, Error> {
    let n = h.require_square("hermitian matrix")?;
    if *h != h.conj_transpose() {
        return Err(Error::NotHermitian);
    }
    let mut a = h.clone();
    let mut plus = 0usize;
    let mut minus = 0usize;
    let mut s = 0usize;
    while s < n {
        // find a usable diagonal pivot in the remaining block
        let diag = (s..n).find(|&k| !a.at(k, k).is_zero());
        let pivot_row = match diag {
            Some(k) => k,
            None => {
                // all remaining diagonal entries vanish; look off-diagonal
                let mut off = None;
                'search: for j in s..n {
                    for k in (j + 1)..n {
                        if !a.at(j, k).is_zero() {
                            off = Some((j, k));
                            break 'search;
                        }
                    }
                }
                let Some((j, k)) = off else {
                    // remaining block is identically zero
                    break;
                };
                // congruence e_j += t e_k with t = h_jk makes a_jj = 2|h_jk|^2
                let t = a.at(j, k).clone();
                let mut e = Mat::identity(n);
                *e.at_mut(k, j) = t;
                a = e.conj_transpose().mul(&a).mul(&e);
                j
            }
        };
        if pivot_row != s {
            // symmetric swap of basis vectors s and pivot_row
            let mut p = Mat::identity(n);
            *p.at_mut(s, s) = GaussianRational::zero();
            *p.at_mut(pivot_row, pivot_row) = GaussianRational::zero();
            *p.at_mut(s, pivot_row) = GaussianRational::one();
            *p.at_mut(pivot_row, s) = GaussianRational::one();
            a = p.conj_transpose().mul(&a).mul(&p);
        }
        let d = a.at(s, s).clone();
        debug_assert!(d.is_real(), "hermitian diagonal must be real");
        if d.re().is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
        // clear row/column s against the pivot
        let mut e = Mat::identity(n);
        for j in (s + 1)..n {
            if !a.at(s, j).is_zero() {
                *e.at_mut(s, j) = -(a.at(s, j) / &d);
            }
        }
        a = e.conj_transpose().mul(&a).mul(&e);
        s += 1;
    }
    Ok(Signature {
        plus,
        minus,
        zero: n - plus - minus,
    })
}

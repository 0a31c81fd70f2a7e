use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{rational_to_string, Rational};

/// A finitely generated Z-module inside Q^n, held by the Hermite-normal-form
/// basis of its integer rescaling.  The common denominator that was cleared
/// is recorded, so the rational basis is `integer_basis / denominator`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalLattice {
    ambient: usize,
    /// Column HNF basis of the denominator-cleared lattice; empty for rank 0.
    columns: Vec<Vec<BigInt>>,
    denominator: BigInt,
}

impl Serialize for RationalLattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("RationalLattice", 3)?;
        st.serialize_field("ambient", &self.ambient)?;
        st.serialize_field(
            "columns",
            &self
                .columns
                .iter()
                .map(|c| c.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )?;
        st.serialize_field("denominator", &self.denominator.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for RationalLattice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ambient: usize,
            columns: Vec<Vec<String>>,
            denominator: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut generators = Vec::new();
        let denom = BigInt::from_str(&repr.denominator).map_err(D::Error::custom)?;
        if denom.is_zero() {
            return Err(D::Error::custom("zero lattice denominator"));
        }
        for col in repr.columns {
            let mut v = Vec::new();
            for e in col {
                let n = BigInt::from_str(&e).map_err(D::Error::custom)?;
                v.push(Rational::new(n, denom.clone()));
            }
            if v.len() != repr.ambient {
                return Err(D::Error::custom("lattice column length mismatch"));
            }
            generators.push(v);
        }
        Ok(RationalLattice::from_generators(repr.ambient, &generators))
    }
}

impl RationalLattice {
    /// Canonical lattice spanned over Z by the given rational vectors.
    pub fn from_generators(ambient: usize, generators: &[Vec<Rational>]) -> Self {
        assert!(
            generators.iter().all(|g| g.len() == ambient),
            "generator length mismatch"
        );
        let mut denom = BigInt::one();
        for g in generators {
            for x in g {
                denom = denom.lcm(x.denom());
            }
        }
        let cols: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|x| x.numer() * (&denom / x.denom())).collect())
            .collect();
        let hnf = column_hnf(ambient, cols);
        // drop the denominator when it divides out of every entry
        let mut gcd = BigInt::zero();
        for c in &hnf {
            for e in c {
                gcd = gcd.gcd(e);
            }
        }
        let (columns, denominator) = if !gcd.is_zero() {
            let g = gcd.gcd(&denom);
            if g > BigInt::one() {
                (
                    hnf.iter()
                        .map(|c| c.iter().map(|e| e / &g).collect())
                        .collect(),
                    &denom / &g,
                )
            } else {
                (hnf, denom)
            }
        } else {
            (hnf, BigInt::one())
        };
        RationalLattice {
            ambient,
            columns,
            denominator,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// The canonical rational basis vectors.
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        self.columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| Rational::new(e.clone(), self.denominator.clone()))
                    .collect()
            })
            .collect()
    }

    /// Integer-combination membership test.
    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        // rescale by the lattice denominator; membership needs integrality
        let mut target: Vec<Rational> = v
            .iter()
            .map(|x| x * Rational::from_integer(self.denominator.clone()))
            .collect();
        // forward-substitute against the echelon columns
        for col in &self.columns {
            let Some(p) = col.iter().position(|e| !e.is_zero()) else {
                continue;
            };
            if target[p].is_zero() {
                continue;
            }
            let coeff = &target[p] / Rational::from_integer(col[p].clone());
            if !coeff.denom().is_one() {
                return false;
            }
            for (t, c) in target.iter_mut().zip(col) {
                *t -= &coeff * Rational::from_integer(c.clone());
            }
        }
        target.iter().all(|x| x.is_zero())
    }

    pub fn basis_strings(&self) -> Vec<Vec<String>> {
        self.basis()
            .iter()
            .map(|c| c.iter().map(rational_to_string).collect())
            .collect()
    }
}

/// Column-style Hermite normal form of the integer column span: pivot rows
/// strictly increasing, pivots positive, entries to the right of a pivot
/// zero and entries to its left reduced into [0, pivot).
fn column_hnf(ambient: usize, mut cols: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    cols.retain(|c| c.iter().any(|e| !e.is_zero()));
    let mut done: Vec<Vec<BigInt>> = Vec::new();
    let mut row = 0usize;
    while row < ambient && !cols.is_empty() {
        // gcd-eliminate on this row across all working columns
        loop {
            let mut nonzero: Vec<usize> = (0..cols.len())
                .filter(|&j| !cols[j][row].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            // combine the two smallest entries
            nonzero.sort_by_key(|&j| cols[j][row].abs());
            let (a, b) = (nonzero[0], nonzero[1]);
            let q = &cols[b][row] / &cols[a][row];
            let source = cols[a].clone();
            for (e, s) in cols[b].iter_mut().zip(&source) {
                let sub = &q * s;
                *e -= sub;
            }
        }
        if let Some(j) = (0..cols.len()).find(|&j| !cols[j][row].is_zero()) {
            let mut pivot = cols.swap_remove(j);
            if pivot[row].is_negative() {
                for e in pivot.iter_mut() {
                    *e = -e.clone();
                }
            }
            // reduce earlier pivots' entries in this row into [0, pivot)
            for d in done.iter_mut() {
                let q = d[row].div_floor(&pivot[row]);
                if !q.is_zero() {
                    for (e, p) in d.iter_mut().zip(&pivot) {
                        let sub = &q * p;
                        *e -= sub;
                    }
                }
            }
            done.push(pivot);
        }
        row += 1;
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn qr(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn standard_basis_is_fixed() {
        let l = RationalLattice::from_generators(2, &[vec![q(1), q(0)], vec![q(0), q(1)]]);
        assert_eq!(l.rank(), 2);
        assert_eq!(l.denominator(), &BigInt::one());
        assert_eq!(l.basis(), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn gcd_collapses_collinear_generators() {
        let l = RationalLattice::from_generators(2, &[vec![q(2), q(0)], vec![q(3), q(0)]]);
        assert_eq!(l.rank(), 1);
        assert_eq!(l.basis(), vec![vec![q(1), q(0)]]);
    }

    #[test]
    fn half_integer_generator_records_denominator() {
        let l = RationalLattice::from_generators(2, &[vec![qr(1, 2), q(0)], vec![q(0), q(1)]]);
        assert_eq!(l.rank(), 2);
        assert_eq!(l.denominator(), &BigInt::from(2));
        assert_eq!(l.basis(), vec![vec![qr(1, 2), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn empty_input_gives_rank_zero() {
        let l = RationalLattice::from_generators(3, &[]);
        assert_eq!(l.rank(), 0);
        assert!(l.contains(&[q(0), q(0), q(0)]));
        assert!(!l.contains(&[q(1), q(0), q(0)]));
    }

    #[test]
    fn membership_respects_integrality() {
        let l = RationalLattice::from_generators(2, &[vec![q(2), q(0)], vec![q(1), q(1)]]);
        assert!(l.contains(&[q(3), q(1)]));
        assert!(l.contains(&[q(1), q(-1)]));
        assert!(!l.contains(&[qr(1, 2), q(0)]));
        assert!(!l.contains(&[q(0), qr(1, 3)]));
    }

    #[test]
    fn canonical_form_is_generator_order_independent() {
        let a =
            RationalLattice::from_generators(3, &[vec![q(4), q(1), q(0)], vec![q(6), q(0), q(1)]]);
        let b =
            RationalLattice::from_generators(3, &[vec![q(6), q(0), q(1)], vec![q(4), q(1), q(0)]]);
        assert_eq!(a, b);
        // adding a Z-combination of the generators changes nothing
        let c = RationalLattice::from_generators(
            3,
            &[
                vec![q(4), q(1), q(0)],
                vec![q(6), q(0), q(1)],
                vec![q(10), q(1), q(1)],
            ],
        );
        assert_eq!(a, c);
    }
}

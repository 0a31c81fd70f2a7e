//! Shared helpers for the integration suites: a small deterministic PRNG
//! and random-instance generators built from the fixture corpus (block
//! sums, Cayley-transform isometries, conjugated block nilpotents).

use lmhs_core::exact::{GaussianRational, Mat, Rational};
use lmhs_core::filtration::{HodgeFiltration, PolarizedSpace};
use lmhs_core::lie::isometry_algebra;
use num_bigint::BigInt;

/// SplitMix64: tiny, deterministic, good enough for sampling exact test
/// instances reproducibly.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Rational with numerator in [-max..max] and denominator in [1..=den].
    pub fn rational(&mut self, max: i64, den: i64) -> Rational {
        let num = (self.below((2 * max + 1) as u64) as i64) - max;
        let d = 1 + self.below(den as u64) as i64;
        Rational::new(BigInt::from(num), BigInt::from(d))
    }

    pub fn nonzero_rational(&mut self, max: i64, den: i64) -> Rational {
        loop {
            let r = self.rational(max, den);
            if r != Rational::from_integer(0.into()) {
                return r;
            }
        }
    }

    pub fn gaussian(&mut self, max: i64, den: i64) -> GaussianRational {
        GaussianRational::new(self.rational(max, den), self.rational(max, den))
    }
}

/// A direct sum of copies of the rank-two weight-one fixture.
pub fn sum_space_weight_one(copies: usize) -> PolarizedSpace {
    let q = Mat::from_rows_i64(&[&[0, 1], &[-1, 0]]);
    let mut form = q.clone();
    for _ in 1..copies {
        form = form.direct_sum(&q);
    }
    PolarizedSpace::new(2 * copies, 1, form).unwrap()
}

/// A direct sum of copies of the rank-three weight-two fixture.
pub fn sum_space_weight_two(copies: usize) -> PolarizedSpace {
    let q = Mat::from_rows_i64(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]);
    let mut form = q.clone();
    for _ in 1..copies {
        form = form.direct_sum(&q);
    }
    PolarizedSpace::new(3 * copies, 2, form).unwrap()
}

/// Block nilpotent with the given per-block integer multiples of the
/// fixture chain (rank-two chain for weight one, rank-three for weight two).
pub fn block_nilpotent(space: &PolarizedSpace, multiples: &[i64]) -> Mat {
    let (block, size) = if space.weight() == 1 {
        (Mat::from_rows_i64(&[&[0, 0], &[1, 0]]), 2)
    } else {
        (Mat::from_rows_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]), 3)
    };
    assert_eq!(space.rank(), size * multiples.len());
    let mut acc = block.scale(&GaussianRational::from_int(multiples[0]));
    for &m in &multiples[1..] {
        acc = acc.direct_sum(&block.scale(&GaussianRational::from_int(m)));
    }
    acc
}

/// A space together with its precomputed isometry-algebra basis, so the
/// kernel solve happens once per space rather than once per sample.
pub struct SampledSpace {
    pub space: PolarizedSpace,
    algebra_basis: Vec<Mat>,
}

impl SampledSpace {
    pub fn new(space: PolarizedSpace) -> Self {
        let r = space.rank();
        let algebra_basis = isometry_algebra(&space)
            .basis_vectors()
            .iter()
            .map(|v| Mat::from_vectorized(r, r, v))
            .collect();
        SampledSpace {
            space,
            algebra_basis,
        }
    }

    /// A rational isometry via the Cayley transform of a small random
    /// integer combination of algebra basis elements; retries until
    /// I + xi is invertible and the result is not the identity.
    pub fn random_isometry(&self, rng: &mut Rng) -> Mat {
        let r = self.space.rank();
        loop {
            let mut xi = Mat::zero(r, r);
            for _ in 0..3 {
                let pick = rng.below(self.algebra_basis.len() as u64) as usize;
                let c = GaussianRational::from_int((rng.below(4) as i64) - 2);
                if c.is_zero() {
                    continue;
                }
                xi = xi.add(&self.algebra_basis[pick].scale(&c));
            }
            let id = Mat::identity(r);
            if let Some(inv) = id.add(&xi).inverse() {
                let g = id.sub(&xi).mul(&inv);
                assert!(
                    self.space.is_isometry(&g),
                    "Cayley transform must be isometric"
                );
                if g != id {
                    return g;
                }
            }
        }
    }

    /// A random nonzero nilpotent infinitesimal isometry: a random block
    /// nilpotent conjugated by a random isometry.
    pub fn random_nilpotent(&self, rng: &mut Rng) -> Mat {
        let blocks = self.space.rank() / if self.space.weight() == 1 { 2 } else { 3 };
        let mut multiples = vec![0i64; blocks];
        while multiples.iter().all(|&m| m == 0) {
            for m in multiples.iter_mut() {
                *m = rng.below(3) as i64;
            }
        }
        let n0 = block_nilpotent(&self.space, &multiples);
        let g = self.random_isometry(rng);
        let gi = g.inverse().unwrap();
        g.mul(&n0).mul(&gi)
    }
}

/// The block-sum Hodge filtration of copies of the weight-one fixture line
/// span(e1 + i e2) per block.
pub fn sum_hodge_weight_one(space: &PolarizedSpace) -> HodgeFiltration {
    use std::collections::BTreeMap;
    let copies = space.rank() / 2;
    let mut cols = Vec::new();
    for b in 0..copies {
        let mut v = vec![GaussianRational::zero(); space.rank()];
        v[2 * b] = GaussianRational::one();
        v[2 * b + 1] = GaussianRational::i();
        cols.push(v);
    }
    let mut steps = BTreeMap::new();
    steps.insert(
        1,
        lmhs_core::exact::Subspace::from_vectors(space.rank(), &cols),
    );
    HodgeFiltration::new(space.clone(), steps).unwrap()
}

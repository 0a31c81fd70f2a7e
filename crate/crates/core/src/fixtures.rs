//! The built-in degeneration corpus.  Each fixture bundles a polarized
//! space, a nilpotent cone and a Hodge filtration, small enough to verify
//! by hand and rich enough to exercise every construction in the crate:
//!
//! * `a` - rank 2, weight 1, a one-parameter degeneration with complex
//!   extension data (the filtration spans e1 + i e2);
//! * `a_prime` - the R-split variant of `a` (the filtration spans e1);
//! * `b` - the direct sum of two copies of `a` with two boundary divisors,
//!   the smallest example where span- and weight-closures differ;
//! * `c` - rank 3, weight 2, a single Jordan chain of length three;
//! * `d` - rank 4, weight 1, symplectic, with a nontrivial extension torus
//!   and a one-dimensional abelian fibre direction.

use std::collections::BTreeMap;

use crate::exact::{exp_nilpotent, GaussianRational, Mat, Subspace};
use crate::filtration::{HodgeFiltration, PolarizedSpace};
use crate::nilpotent::NilpotentCone;
use crate::strata::BoundaryComplex;

/// One named fixture: space, cone and filtration, plus the boundary complex
/// when the fixture models more than one divisor.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub cone: NilpotentCone,
    pub hodge: HodgeFiltration,
    pub complex: Option<BoundaryComplex>,
}

impl Fixture {
    pub fn space(&self) -> &PolarizedSpace {
        self.cone.space()
    }
}

fn gi(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(
        crate::exact::Rational::from_integer(re.into()),
        crate::exact::Rational::from_integer(im.into()),
    )
}

/// The rank-two nilpotent e1 -> e2.
pub fn n_block() -> Mat {
    Mat::from_rows_i64(&[&[0, 0], &[1, 0]])
}

fn space_a() -> PolarizedSpace {
    PolarizedSpace::new(2, 1, Mat::from_rows_i64(&[&[0, 1], &[-1, 0]])).unwrap()
}

pub fn fixture_a() -> Fixture {
    let space = space_a();
    let cone = NilpotentCone::new(space.clone(), vec![n_block()]).unwrap();
    let mut steps = BTreeMap::new();
    steps.insert(1, Subspace::from_vectors(2, &[vec![gi(1, 0), gi(0, 1)]]));
    let hodge = HodgeFiltration::new(space, steps).unwrap();
    Fixture {
        name: "a",
        cone,
        hodge,
        complex: None,
    }
}

pub fn fixture_a_prime() -> Fixture {
    let space = space_a();
    let cone = NilpotentCone::new(space.clone(), vec![n_block()]).unwrap();
    let mut steps = BTreeMap::new();
    steps.insert(1, Subspace::from_vectors(2, &[vec![gi(1, 0), gi(0, 0)]]));
    let hodge = HodgeFiltration::new(space, steps).unwrap();
    Fixture {
        name: "a_prime",
        cone,
        hodge,
        complex: None,
    }
}

fn space_b() -> PolarizedSpace {
    let q = Mat::from_rows_i64(&[&[0, 1], &[-1, 0]]);
    PolarizedSpace::new(4, 1, q.direct_sum(&q)).unwrap()
}

/// Generators of the two-divisor fixture: the first acts on both blocks,
/// the second only on the first block.
pub fn fixture_b_nilpotents() -> (Mat, Mat) {
    let n = n_block();
    (n.direct_sum(&n), n.direct_sum(&Mat::zero(2, 2)))
}

pub fn fixture_b() -> Fixture {
    let space = space_b();
    let (n1, n2) = fixture_b_nilpotents();
    let cone = NilpotentCone::new(space.clone(), vec![n1.clone(), n2.clone()]).unwrap();
    let mut steps = BTreeMap::new();
    steps.insert(
        1,
        Subspace::from_vectors(
            4,
            &[
                vec![gi(1, 0), gi(0, 1), gi(0, 0), gi(0, 0)],
                vec![gi(0, 0), gi(0, 0), gi(1, 0), gi(0, 1)],
            ],
        ),
    );
    let hodge = HodgeFiltration::new(space.clone(), steps).unwrap();
    let mut nilpotents = BTreeMap::new();
    nilpotents.insert(1, n1.clone());
    nilpotents.insert(2, n2.clone());
    let monodromy = vec![exp_nilpotent(&n1).unwrap(), exp_nilpotent(&n2).unwrap()];
    let complex = BoundaryComplex::new(
        space,
        2,
        vec![
            [1].into_iter().collect(),
            [2].into_iter().collect(),
            [1, 2].into_iter().collect(),
        ],
        nilpotents,
        monodromy,
    )
    .unwrap();
    Fixture {
        name: "b",
        cone,
        hodge,
        complex: Some(complex),
    }
}

pub fn fixture_c() -> Fixture {
    let space = PolarizedSpace::new(
        3,
        2,
        Mat::from_rows_i64(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]),
    )
    .unwrap();
    // e1 -> e2 -> e3 -> 0
    let n = Mat::from_rows_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
    let cone = NilpotentCone::new(space.clone(), vec![n]).unwrap();
    let mut steps = BTreeMap::new();
    steps.insert(
        2,
        Subspace::from_vectors(3, &[vec![gi(1, 0), gi(0, 0), gi(0, 0)]]),
    );
    steps.insert(
        1,
        Subspace::from_vectors(
            3,
            &[
                vec![gi(1, 0), gi(0, 0), gi(0, 0)],
                vec![gi(0, 0), gi(1, 0), gi(0, 0)],
            ],
        ),
    );
    let hodge = HodgeFiltration::new(space, steps).unwrap();
    Fixture {
        name: "c",
        cone,
        hodge,
        complex: None,
    }
}

fn space_d() -> PolarizedSpace {
    // Q(e1, e3) = Q(e2, e4) = 1, antisymmetric
    let q = Mat::from_rows_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
    PolarizedSpace::new(4, 1, q).unwrap()
}

/// The rank-four nilpotent e1 -> e3.
pub fn fixture_d_nilpotent() -> Mat {
    let mut n = Mat::zero(4, 4);
    *n.at_mut(2, 0) = GaussianRational::one();
    n
}

pub fn fixture_d() -> Fixture {
    let space = space_d();
    let cone = NilpotentCone::new(space.clone(), vec![fixture_d_nilpotent()]).unwrap();
    let mut steps = BTreeMap::new();
    steps.insert(
        1,
        Subspace::from_vectors(
            4,
            &[
                vec![gi(1, 0), gi(0, 0), gi(0, 0), gi(0, 0)],
                vec![gi(0, 0), gi(1, 0), gi(0, 0), gi(0, 1)],
            ],
        ),
    );
    let hodge = HodgeFiltration::new(space, steps).unwrap();
    Fixture {
        name: "d",
        cone,
        hodge,
        complex: None,
    }
}

/// The two commuting centralizer directions of fixture `d` transverse to
/// its nilpotent: e1 -> e2, e4 -> -e3 and e1 -> e4, e2 -> e3.
pub fn fixture_d_radical_directions() -> (Mat, Mat) {
    let mut beta = Mat::zero(4, 4);
    *beta.at_mut(1, 0) = GaussianRational::one();
    *beta.at_mut(2, 3) = -GaussianRational::one();
    let mut delta = Mat::zero(4, 4);
    *delta.at_mut(3, 0) = GaussianRational::one();
    *delta.at_mut(2, 1) = GaussianRational::one();
    (beta, delta)
}

/// Three integral unipotent elements centralizing the cone of fixture `d`:
/// the monodromy itself and the exponentials of the two radical directions.
pub fn fixture_d_gammas() -> Vec<Mat> {
    let (beta, delta) = fixture_d_radical_directions();
    vec![
        exp_nilpotent(&fixture_d_nilpotent()).unwrap(),
        exp_nilpotent(&beta).unwrap(),
        exp_nilpotent(&delta).unwrap(),
    ]
}

/// An integral isometry of fixture `d` commuting with the grading but not
/// with the radical: the quarter rotation e2 -> e4 -> -e2.
pub fn fixture_d_levi_rotation() -> Mat {
    let mut g = Mat::zero(4, 4);
    *g.at_mut(0, 0) = GaussianRational::one();
    *g.at_mut(2, 2) = GaussianRational::one();
    *g.at_mut(3, 1) = GaussianRational::one();
    *g.at_mut(1, 3) = -GaussianRational::one();
    g
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![
        fixture_a(),
        fixture_a_prime(),
        fixture_b(),
        fixture_c(),
        fixture_d(),
    ]
}

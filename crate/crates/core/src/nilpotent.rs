//! Nilpotent infinitesimal isometries and their weight filtrations.
//!
//! The central construction is the monodromy weight filtration W(N): the
//! unique increasing filtration centred at the weight with N(W_l) inside
//! W_{l-2} and N^k inducing isomorphisms Gr_{n+k} -> Gr_{n-k}.  It is built
//! from Jordan chains and then re-verified against both defining conditions,
//! so a bug in the chain construction cannot silently leak out.
//!
//! For a commuting cone the filtration attached to any interior element is
//! the same; this module samples the interior at the barycenter and a fixed
//! set of positive tuples and reports `ConeNotPure` when the samples
//! disagree.  The generators themselves lie on the boundary of the cone and
//! may legitimately carry different filtrations, so they are not part of the
//! purity test.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{GaussianRational, Mat, Rational, Subspace};
use crate::filtration::{PolarizedSpace, WeightFiltration};
use crate::mhs::DeligneSplitting;

/// A rational cone of pairwise commuting nilpotent infinitesimal isometries,
/// presented by its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentCone {
    space: PolarizedSpace,
    generators: Vec<Mat>,
}

impl NilpotentCone {
    pub fn new(space: PolarizedSpace, generators: Vec<Mat>) -> Result<Self, Error> {
        for (idx, n) in generators.iter().enumerate() {
            if n.rows() != space.rank() || n.cols() != space.rank() {
                return Err(Error::DimensionMismatch {
                    context: "cone generator size",
                });
            }
            if !n.is_rational() {
                return Err(Error::invalid(format!("generator {idx} is not rational")));
            }
            if !is_nilpotent(n) {
                return Err(Error::NotNilpotent);
            }
            if !space.is_infinitesimal_isometry(n) {
                return Err(Error::NotIsometry);
            }
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if !generators[i].commutator(&generators[j]).is_zero() {
                    return Err(Error::invalid(format!(
                        "generators {i} and {j} do not commute"
                    )));
                }
            }
        }
        Ok(NilpotentCone { space, generators })
    }

    pub fn space(&self) -> &PolarizedSpace {
        &self.space
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Sum of the generators; an interior point of the open cone.
    pub fn barycenter(&self) -> Mat {
        let r = self.space.rank();
        let mut acc = Mat::zero(r, r);
        for n in &self.generators {
            acc = acc.add(n);
        }
        acc
    }

    /// Positive rational combination of the generators.
    pub fn combine(&self, weights: &[Rational]) -> Mat {
        assert_eq!(weights.len(), self.generators.len(), "weight count");
        let r = self.space.rank();
        let mut acc = Mat::zero(r, r);
        for (w, n) in weights.iter().zip(&self.generators) {
            acc = acc.add(&n.scale(&GaussianRational::from_rational(w.clone())));
        }
        acc
    }

    /// A fixed, deterministic family of interior points used everywhere the
    /// open cone has to be sampled: the barycenter plus asymmetric positive
    /// tuples. At least five distinct samples once there are two generators.
    pub fn interior_samples(&self) -> Vec<Mat> {
        let k = self.generators.len();
        if k == 0 {
            return vec![Mat::zero(self.space.rank(), self.space.rank())];
        }
        if k == 1 {
            return vec![self.generators[0].clone()];
        }
        let mut tuples: Vec<Vec<Rational>> = Vec::new();
        let ones: Vec<Rational> = (0..k).map(|_| rat(1)).collect();
        tuples.push(ones.clone());
        tuples.push((0..k).map(|j| rat(1 + j as i64)).collect());
        tuples.push((0..k).map(|j| rat(k as i64 - j as i64)).collect());
        let mut bump_first = ones.clone();
        bump_first[0] = rat(2);
        tuples.push(bump_first);
        let mut bump_last = ones.clone();
        bump_last[k - 1] = rat(3);
        tuples.push(bump_last);
        tuples.push(
            (0..k)
                .map(|j| Rational::new(1.into(), (1i64 << j.min(16)).into()))
                .collect(),
        );
        tuples.dedup();
        tuples.iter().map(|t| self.combine(t)).collect()
    }
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn is_nilpotent(m: &Mat) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let mut p = m.clone();
    for _ in 0..n {
        if p.is_zero() {
            return true;
        }
        p = p.mul(m);
    }
    p.is_zero()
}

/// The monodromy weight filtration W(N) centred at the weight of the space.
///
/// Construction: build Jordan chains of N (over Q, since N is rational) and
/// assign the vector N^i v of a length-d chain to weight n + d - 1 - 2i; W_l
/// is the span of the vectors of weight at most l.  The output is then
/// checked against both defining conditions.
pub fn weight_filtration(n_op: &Mat, space: &PolarizedSpace) -> Result<WeightFiltration, Error> {
    let r = space.rank();
    if n_op.rows() != r || n_op.cols() != r {
        return Err(Error::DimensionMismatch {
            context: "nilpotent operator size",
        });
    }
    if !is_nilpotent(n_op) {
        return Err(Error::NotNilpotent);
    }
    if !space.is_infinitesimal_isometry(n_op) {
        return Err(Error::NotIsometry);
    }
    let n = space.weight();
    let chains = jordan_chains(n_op);
    let mut weighted: Vec<(i64, Vec<GaussianRational>)> = Vec::new();
    for chain in &chains {
        let d = chain.len() as i64;
        for (i, v) in chain.iter().enumerate() {
            weighted.push((n + d - 1 - 2 * i as i64, v.clone()));
        }
    }
    let mut steps = Vec::new();
    for l in 0..=(2 * n) {
        let vecs: Vec<Vec<GaussianRational>> = weighted
            .iter()
            .filter(|(w, _)| *w <= l)
            .map(|(_, v)| v.clone())
            .collect();
        steps.push(Subspace::from_vectors(r, &vecs));
    }
    let w = WeightFiltration::new(space.clone(), steps)?;
    verify_weight_filtration(n_op, &w)?;
    Ok(w)
}

/// Check the two conditions that characterise W(N): the shift
/// N(W_l) <= W_{l-2} and the isomorphisms N^k : Gr_{n+k} -> Gr_{n-k}.
pub fn verify_weight_filtration(n_op: &Mat, w: &WeightFiltration) -> Result<(), Error> {
    let n = w.space().weight();
    for l in 0..=2 * n {
        let image = w.step(l).apply(n_op)?;
        if !w.step(l - 2).contains(&image) {
            return Err(Error::WeightMismatch);
        }
    }
    for k in 0..=n {
        let hi = w.graded_piece(n + k)?;
        let lo = w.graded_piece(n - k)?;
        if hi.dim() != lo.dim() {
            return Err(Error::WeightMismatch);
        }
        if hi.dim() == 0 {
            continue;
        }
        // matrix of N^k from Gr_{n+k} to Gr_{n-k}
        let nk = n_op.pow(k as usize);
        let map = lo.project.mul(&nk).mul(&hi.lift);
        if map.rank() != hi.dim() {
            return Err(Error::WeightMismatch);
        }
    }
    Ok(())
}

/// Jordan chains of a nilpotent matrix: each chain is [v, Nv, ..., N^{d-1}v].
fn jordan_chains(n_op: &Mat) -> Vec<Vec<Vec<GaussianRational>>> {
    let r = n_op.rows();
    // kernels of successive powers
    let mut kernels = vec![Subspace::zero(r)];
    let mut power = Mat::identity(r);
    let mut index = 0usize;
    loop {
        power = power.mul(n_op);
        index += 1;
        let k = Subspace::kernel(&power);
        let full = k.is_full();
        kernels.push(k);
        if full {
            break;
        }
        assert!(index <= r, "nilpotency index exceeded rank");
    }
    let d_max = kernels.len() - 1;
    let mut tops: Vec<(usize, Vec<GaussianRational>)> = Vec::new(); // (chain length, top vector)
    for j in (1..=d_max).rev() {
        // span of K_{j-1} together with N-descents of longer chains
        let mut occupied = kernels[j - 1].basis_vectors();
        for (len, top) in &tops {
            // the chain member lying in K_j \ K_{j-1} is N^{len-j} top
            if *len > j {
                let shift = n_op.pow(len - j);
                occupied.push(shift.apply(top));
            }
        }
        let occupied_span = Subspace::from_vectors(r, &occupied);
        let (_, chosen) = occupied_span.greedy_extension(kernels[j].basis());
        for c in chosen {
            tops.push((j, kernels[j].basis().col(c)));
        }
    }
    tops.into_iter()
        .map(|(len, top)| {
            let mut chain = Vec::with_capacity(len);
            let mut v = top;
            for _ in 0..len {
                chain.push(v.clone());
                v = n_op.apply(&v);
            }
            chain
        })
        .collect()
}

/// Weight filtration of a cone: the common W(N) of the open cone, computed
/// at the interior sample points.  Disagreement between samples means the
/// input does not arise from a single boundary stratum.
pub fn cone_weight_filtration(cone: &NilpotentCone) -> Result<WeightFiltration, Error> {
    let samples = cone.interior_samples();
    let mut common: Option<WeightFiltration> = None;
    for (idx, sample) in samples.iter().enumerate() {
        let w = weight_filtration(sample, cone.space())?;
        match &common {
            None => common = Some(w),
            Some(prev) => {
                if *prev != w {
                    return Err(Error::ConeNotPure {
                        detail: format!(
                            "interior sample {idx} yields a different filtration (dims {:?} vs {:?})",
                            w.dims(),
                            prev.dims()
                        ),
                    });
                }
            }
        }
    }
    common.ok_or_else(|| Error::invalid("cone has no generators"))
}

/// An sl2-triple {M, Y, N}: `[M,N] = Y`, `[Y,M] = 2M`, `[N,Y] = 2N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Triple {
    pub m: Mat,
    pub y: Mat,
    pub n: Mat,
}

impl Sl2Triple {
    pub fn verify(&self) -> bool {
        self.m.commutator(&self.n) == self.y
            && self.y.commutator(&self.m) == self.m.scale(&GaussianRational::from_int(2))
            && self.n.commutator(&self.y) == self.n.scale(&GaussianRational::from_int(2))
    }
}

/// The grading operator of a Deligne splitting: the semisimple map acting on
/// the (p, q) piece by the integer (p + q) - n.
///
/// With this normalization N lowers the eigenvalue by two, which is what the
/// triple relations `[M,N] = Y`, `[Y,M] = 2M`, `[N,Y] = 2N` require of the
/// grading; it is rational exactly when the splitting is conjugation-stable.
pub fn grading_operator(splitting: &DeligneSplitting) -> Mat {
    let n = splitting.space().weight();
    let basis = splitting.basis();
    let mut diag = Mat::zero(basis.cols(), basis.cols());
    let mut col = 0usize;
    for ((p, q), piece) in splitting.pieces() {
        let ev = GaussianRational::from_int(p + q - n);
        for _ in 0..piece.dim() {
            *diag.at_mut(col, col) = ev.clone();
            col += 1;
        }
    }
    let inv = basis.inverse().expect("splitting basis is invertible");
    basis.mul(&diag).mul(&inv)
}

/// Complete N and a grading operator Y to an sl2-triple by solving the
/// linear system { [Y, M] = 2M, [M, N] = Y } for M.
///
/// The solution is unique: any two solutions differ by an element of the +2
/// eigenspace of ad_Y commuting with N, and no such element exists when the
/// data is consistent.  When a splitting is supplied, membership of M in the
/// (1,1) component of the induced splitting of End(V) is verified.
pub fn sl2_complete(
    n_op: &Mat,
    y_op: &Mat,
    splitting: Option<&DeligneSplitting>,
) -> Result<Sl2Triple, Error> {
    let r = n_op.require_square("sl2 nilpotent")?;
    if y_op.rows() != r || y_op.cols() != r {
        return Err(Error::DimensionMismatch {
            context: "sl2 grading",
        });
    }
    if y_op.commutator(n_op) != n_op.scale(&GaussianRational::from_int(-2)) {
        return Err(Error::NoSolution {
            context: "N does not lower the Y-grading by two",
        });
    }
    // unknown M as a vectorized r*r column; rows impose
    //   YM - MY - 2M = 0   and   MN - NM = Y
    let dim = r * r;
    let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
    let mut rhs: Vec<GaussianRational> = Vec::new();
    let two = GaussianRational::from_int(2);
    for a in 0..r {
        for b in 0..r {
            // entry (a,b) of YM - MY - 2M
            let mut row = vec![GaussianRational::zero(); dim];
            for k in 0..r {
                // Y[a][k] M[k][b]
                let c = y_op.at(a, k).clone();
                if !c.is_zero() {
                    let cell = &mut row[k * r + b];
                    *cell = &*cell + &c;
                }
                // - M[a][k] Y[k][b]
                let c = y_op.at(k, b).clone();
                if !c.is_zero() {
                    let cell = &mut row[a * r + k];
                    *cell = &*cell - &c;
                }
            }
            let cell = &mut row[a * r + b];
            *cell = &*cell - &two;
            rows.push(row);
            rhs.push(GaussianRational::zero());
        }
    }
    for a in 0..r {
        for b in 0..r {
            // entry (a,b) of MN - NM = Y
            let mut row = vec![GaussianRational::zero(); dim];
            for k in 0..r {
                let c = n_op.at(k, b).clone();
                if !c.is_zero() {
                    let cell = &mut row[a * r + k];
                    *cell = &*cell + &c;
                }
                let c = n_op.at(a, k).clone();
                if !c.is_zero() {
                    let cell = &mut row[k * r + b];
                    *cell = &*cell - &c;
                }
            }
            rows.push(row);
            rhs.push(y_op.at(a, b).clone());
        }
    }
    let coeffs = Mat::from_rows(rows);
    let rhs_mat = Mat::from_cols(coeffs.rows(), &[rhs]);
    let particular = coeffs.solve(&rhs_mat).ok_or(Error::NoSolution {
        context: "bracket equations for M are inconsistent",
    })?;
    // homogeneous solutions live in ker(ad_Y - 2) cap ker(ad_N); uniqueness
    // requires that kernel to vanish.
    if coeffs.kernel_basis().cols() > 0 {
        return Err(Error::NonUnique {
            context: "ad_Y eigenspace solve is degenerate",
        });
    }
    let m = Mat::from_vectorized(r, r, &particular.col(0));
    let triple = Sl2Triple {
        m,
        y: y_op.clone(),
        n: n_op.clone(),
    };
    if !triple.verify() {
        return Err(Error::NoSolution {
            context: "solved M fails the triple relations",
        });
    }
    if let Some(s) = splitting {
        if !s.space().is_infinitesimal_isometry(&triple.m) {
            return Err(Error::NotIsometry);
        }
        let comp = s.end_component(&triple.m, 1, 1);
        if comp != triple.m {
            return Err(Error::NoSolution {
                context: "M is not of type (1,1) for the splitting",
            });
        }
    }
    Ok(triple)
}

/// Rescale N by a positive rational k; M scales by 1/k and Y is unchanged.
pub fn rescale_triple(t: &Sl2Triple, k: &Rational) -> Result<Sl2Triple, Error> {
    if *k <= Rational::from_integer(0.into()) {
        return Err(Error::invalid("rescale factor must be positive"));
    }
    let kg = GaussianRational::from_rational(k.clone());
    let out = Sl2Triple {
        m: t.m.scale(&kg.inv()),
        y: t.y.clone(),
        n: t.n.scale(&kg),
    };
    if !out.verify() {
        return Err(Error::NoSolution {
            context: "rescaled triple fails the relations",
        });
    }
    Ok(out)
}

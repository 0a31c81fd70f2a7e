//! The boundary Lie apparatus.
//!
//! For a polarized space this module solves for the isometry algebra g, for
//! a cone its centralizer c and the filtration c^{-a} = c cap W_{-a}(g), and
//! for a compatible Hodge filtration the type decomposition of all of these.
//! On top of that sit the Levi decomposition of centralizer elements
//! relative to a rational grading, the trace form and its integral
//! normalization of sl2-triples, period-matrix (Schubert cell) coordinates
//! with their graded quotients, nilpotent-orbit evaluation, and the fibre
//! coordinate solve that underlies the automorphy factors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::Error;
use crate::exact::{exp_nilpotent, log_unipotent, GaussianRational, Mat, Rational, Subspace};
use crate::filtration::{self, EndFiltration, HodgeFiltration, PolarizedSpace, WeightFiltration};
use crate::mhs::{deligne_splitting, DeligneSplitting};
use crate::nilpotent::{cone_weight_filtration, NilpotentCone, Sl2Triple};

/// Basis of the isometry algebra { xi : Q(xi u, v) + Q(u, xi v) = 0 }, as a
/// subspace of the vectorized endomorphism space.
pub fn isometry_algebra(space: &PolarizedSpace) -> Subspace {
    let r = space.rank();
    let q = space.form();
    // condition xi^T Q + Q xi = 0, one row per matrix position
    let mut rows = Vec::with_capacity(r * r);
    for a in 0..r {
        for b in 0..r {
            let mut row = vec![GaussianRational::zero(); r * r];
            for k in 0..r {
                // (xi^T Q)[a][b] = sum_k xi[k][a] Q[k][b]
                let c = q.at(k, b).clone();
                if !c.is_zero() {
                    let cell = &mut row[k * r + a];
                    *cell = &*cell + &c;
                }
                // (Q xi)[a][b] = sum_k Q[a][k] xi[k][b]
                let c = q.at(a, k).clone();
                if !c.is_zero() {
                    let cell = &mut row[k * r + b];
                    *cell = &*cell + &c;
                }
            }
            rows.push(row);
        }
    }
    Subspace::kernel(&Mat::from_rows(rows))
}

/// The symmetric invariant pairing tr(xi eta) on endomorphisms.  This is the
/// normalization against which all integrality statements in the crate are
/// made.
pub fn trace_form(xi: &Mat, eta: &Mat) -> GaussianRational {
    xi.mul(eta).trace()
}

/// The same pairing with the sign that polarizes the induced structures on
/// the isometry algebra: Hodge-Riemann positivity on adjoint primitives
/// holds for -tr, not for tr (see the tests in [`crate::bundles`]).
pub fn adjoint_polarization_form(xi: &Mat, eta: &Mat) -> GaussianRational {
    -trace_form(xi, eta)
}

/// Precomputed boundary data for one cone: the isometry algebra, the
/// centralizer with its filtration, the weight filtration of the
/// endomorphism space, and (when a filtration is attached) the full type
/// decomposition.
#[derive(Clone, Debug)]
pub struct BoundaryLieData {
    cone: NilpotentCone,
    w: WeightFiltration,
    g_sub: Subspace,
    c_sub: Subspace,
    w_end: EndFiltration,
    /// c^{-a} for a = 1..=2n, as subspaces of the vectorized endomorphisms.
    c_filtration: BTreeMap<i64, Subspace>,
    hodge: Option<HodgeData>,
}

#[derive(Clone, Debug)]
struct HodgeData {
    f: HodgeFiltration,
    splitting: DeligneSplitting,
    /// g^{p,q} pieces in vectorized coordinates.
    g_pieces: BTreeMap<(i64, i64), Subspace>,
    /// c^{p,q} pieces in vectorized coordinates.
    c_pieces: BTreeMap<(i64, i64), Subspace>,
}

impl BoundaryLieData {
    pub fn new(cone: NilpotentCone, f: Option<HodgeFiltration>) -> Result<Self, Error> {
        let w = cone_weight_filtration(&cone)?;
        let space = cone.space().clone();
        let r = space.rank();
        let g_sub = isometry_algebra(&space);
        // centralizer: [xi, N_i] = 0 for every generator, inside g
        let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
        for n in cone.generators() {
            for a in 0..r {
                for b in 0..r {
                    let mut row = vec![GaussianRational::zero(); r * r];
                    for k in 0..r {
                        // (xi N)[a][b] = xi[a][k] N[k][b]
                        let c = n.at(k, b).clone();
                        if !c.is_zero() {
                            let cell = &mut row[a * r + k];
                            *cell = &*cell + &c;
                        }
                        // -(N xi)[a][b]
                        let c = n.at(a, k).clone();
                        if !c.is_zero() {
                            let cell = &mut row[k * r + b];
                            *cell = &*cell - &c;
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let commutant = if rows.is_empty() {
            Subspace::full(r * r)
        } else {
            Subspace::kernel(&Mat::from_rows(rows))
        };
        let c_sub = g_sub.intersect(&commutant)?;
        let w_end = filtration::induced_end_weight(&w)?;
        // the centralizer of the cone preserves W
        if !w_end.step(0).contains(&c_sub) {
            return Err(Error::invalid(
                "centralizer escapes the parabolic of the weight filtration",
            ));
        }
        let n_wt = space.weight();
        let mut c_filtration = BTreeMap::new();
        for a in 1..=2 * n_wt {
            c_filtration.insert(a, c_sub.intersect(&w_end.step(-a))?);
        }
        let hodge = match f {
            None => None,
            Some(f) => {
                let splitting = deligne_splitting(&w, &f)?;
                let end_pieces = end_pieces_of(&splitting);
                let mut g_pieces = BTreeMap::new();
                let mut c_pieces = BTreeMap::new();
                for (&key, piece) in &end_pieces {
                    let gp = piece.intersect(&g_sub)?;
                    if !gp.is_zero() {
                        g_pieces.insert(key, gp.clone());
                        let cp = gp.intersect(&c_sub)?;
                        if !cp.is_zero() {
                            c_pieces.insert(key, cp);
                        }
                    }
                }
                Some(HodgeData {
                    f,
                    splitting,
                    g_pieces,
                    c_pieces,
                })
            }
        };
        Ok(BoundaryLieData {
            cone,
            w,
            g_sub,
            c_sub,
            w_end,
            c_filtration,
            hodge,
        })
    }

    pub fn cone(&self) -> &NilpotentCone {
        &self.cone
    }

    pub fn space(&self) -> &PolarizedSpace {
        self.cone.space()
    }

    pub fn weight_filtration(&self) -> &WeightFiltration {
        &self.w
    }

    pub fn algebra(&self) -> &Subspace {
        &self.g_sub
    }

    pub fn algebra_dim(&self) -> usize {
        self.g_sub.dim()
    }

    pub fn centralizer(&self) -> &Subspace {
        &self.c_sub
    }

    pub fn end_weight_filtration(&self) -> &EndFiltration {
        &self.w_end
    }

    /// c^{-a}; a <= 0 returns the whole centralizer.
    pub fn centralizer_filtration(&self, a: i64) -> Subspace {
        if a <= 0 {
            return self.c_sub.clone();
        }
        let top = *self.c_filtration.keys().last().unwrap_or(&0);
        if a > top {
            return Subspace::zero(self.space().rank().pow(2));
        }
        self.c_filtration[&a].clone()
    }

    pub fn basis_of(&self, sub: &Subspace) -> Vec<Mat> {
        let r = self.space().rank();
        sub.basis_vectors()
            .iter()
            .map(|v| Mat::from_vectorized(r, r, v))
            .collect()
    }

    pub fn hodge_filtration(&self) -> Option<&HodgeFiltration> {
        self.hodge.as_ref().map(|h| &h.f)
    }

    pub fn splitting(&self) -> Result<&DeligneSplitting, Error> {
        self.hodge
            .as_ref()
            .map(|h| &h.splitting)
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))
    }

    pub fn g_piece(&self, p: i64, q: i64) -> Result<Subspace, Error> {
        let h = self
            .hodge
            .as_ref()
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))?;
        Ok(h.g_pieces
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.space().rank().pow(2))))
    }

    pub fn g_pieces(&self) -> Result<&BTreeMap<(i64, i64), Subspace>, Error> {
        self.hodge
            .as_ref()
            .map(|h| &h.g_pieces)
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))
    }

    pub fn c_piece(&self, p: i64, q: i64) -> Result<Subspace, Error> {
        let h = self
            .hodge
            .as_ref()
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))?;
        Ok(h.c_pieces
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.space().rank().pow(2))))
    }

    pub fn c_pieces(&self) -> Result<&BTreeMap<(i64, i64), Subspace>, Error> {
        self.hodge
            .as_ref()
            .map(|h| &h.c_pieces)
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))
    }

    /// Membership of an endomorphism in a vectorized subspace.
    pub fn member(&self, sub: &Subspace, xi: &Mat) -> bool {
        sub.contains_vector(&xi.vectorize())
    }

    /// gamma centralizes the cone: Ad_gamma N = N for every generator.
    pub fn is_in_centralizer_group(&self, gamma: &Mat) -> bool {
        let Some(gi) = gamma.inverse() else {
            return false;
        };
        if !self.space().is_isometry(gamma) {
            return false;
        }
        self.cone
            .generators()
            .iter()
            .all(|n| gamma.mul(n).mul(&gi) == *n)
    }

    /// gamma acts trivially on every graded quotient of W.
    pub fn is_in_unipotent_radical(&self, gamma: &Mat) -> bool {
        if !self.is_in_centralizer_group(gamma) {
            return false;
        }
        let id = Mat::identity(self.space().rank());
        let shift = gamma.sub(&id);
        for l in 0..=self.w.top_index() {
            let moved = match self.w.step(l).apply(&shift) {
                Ok(s) => s,
                Err(_) => return false,
            };
            if !self.w.step(l - 1).contains(&moved) {
                return false;
            }
        }
        true
    }
}

/// The type pieces of the endomorphism space attached to a splitting of V,
/// built constructively from elementary blocks in the splitting basis.
fn end_pieces_of(s: &DeligneSplitting) -> BTreeMap<(i64, i64), Subspace> {
    let r = s.space().rank();
    let keys: Vec<(i64, i64)> = s.pieces().map(|(&k, _)| k).collect();
    let mut ranges = BTreeMap::new();
    let mut start = 0usize;
    for (&k, piece) in s.pieces() {
        ranges.insert(k, (start, start + piece.dim()));
        start += piece.dim();
    }
    let basis = s.basis();
    let basis_inv = basis.inverse().expect("splitting basis invertible");
    let mut out: BTreeMap<(i64, i64), Vec<Vec<GaussianRational>>> = BTreeMap::new();
    for &(sp, sq) in &keys {
        for &(tp, tq) in &keys {
            let shift = (tp - sp, tq - sq);
            let (ss, se) = ranges[&(sp, sq)];
            let (ts, te) = ranges[&(tp, tq)];
            for col in ss..se {
                for row in ts..te {
                    let mut e = Mat::zero(r, r);
                    *e.at_mut(row, col) = GaussianRational::one();
                    let m = basis.mul(&e).mul(&basis_inv);
                    out.entry(shift).or_default().push(m.vectorize());
                }
            }
        }
    }
    out.into_iter()
        .map(|(k, vs)| (k, Subspace::from_vectors(r * r, &vs)))
        .collect()
}

/// Write a centralizer element as alpha * exp(b) with alpha preserving each
/// eigenspace of the grading operator and b in c^{-1}.
pub fn levi_decompose(data: &BoundaryLieData, gamma: &Mat, y: &Mat) -> Result<(Mat, Mat), Error> {
    let r = data.space().rank();
    if gamma.rows() != r || y.rows() != r {
        return Err(Error::DimensionMismatch {
            context: "levi decomposition input",
        });
    }
    if !data.is_in_centralizer_group(gamma) {
        return Err(Error::NotInCentralizer);
    }
    // eigen decomposition of the rational semisimple grading
    let n_wt = data.space().weight();
    let mut eigencols: Vec<Vec<GaussianRational>> = Vec::new();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for lambda in -n_wt..=n_wt {
        let shifted = y.sub(&Mat::identity(r).scale(&GaussianRational::from_int(lambda)));
        let space = Subspace::kernel(&shifted);
        if space.is_zero() {
            continue;
        }
        let start = eigencols.len();
        eigencols.extend(space.basis_vectors());
        blocks.push((start, eigencols.len()));
    }
    if eigencols.len() != r {
        return Err(Error::invalid(
            "grading operator is not semisimple with integer eigenvalues",
        ));
    }
    let b_mat = Mat::from_cols(r, &eigencols);
    let b_inv = b_mat.inverse().expect("eigenbasis invertible");
    let inner = b_inv.mul(gamma).mul(&b_mat);
    let mut diag = Mat::zero(r, r);
    for &(s, e) in &blocks {
        for row in s..e {
            for col in s..e {
                *diag.at_mut(row, col) = inner.at(row, col).clone();
            }
        }
    }
    let alpha = b_mat.mul(&diag).mul(&b_inv);
    let Some(alpha_inv) = alpha.inverse() else {
        return Err(Error::NotUnipotentResidue);
    };
    let residue = alpha_inv.mul(gamma);
    let b = log_unipotent(&residue).map_err(|_| Error::NotUnipotentResidue)?;
    if !data.member(&data.centralizer_filtration(1), &b) {
        return Err(Error::NotUnipotentResidue);
    }
    debug_assert_eq!(alpha.mul(&exp_nilpotent(&b)?), *gamma);
    debug_assert!(alpha.commutator(y).is_zero());
    Ok((alpha, b))
}

/// Smallest positive integer k such that k * tr(M b) is a (Gaussian)
/// integer for every b in the list, together with the rescaled triple
/// (M -> kM, N -> N/k).
pub fn normalize_triple(triple: &Sl2Triple, b_list: &[Mat]) -> Result<(BigInt, Sl2Triple), Error> {
    let mut k = BigInt::one();
    for b in b_list {
        let v = trace_form(&triple.m, b);
        k = k.lcm(v.re().denom());
        k = k.lcm(v.im().denom());
    }
    let factor = Rational::new(BigInt::one(), k.clone());
    let rescaled = crate::nilpotent::rescale_triple(triple, &factor)?;
    Ok((k, rescaled))
}

/// x in f-perp with exp(x) F = E, solved blockwise in the splitting basis.
///
/// In splitting coordinates the graph of E over each F^p determines the
/// matrix of exp(x) piece by piece; since that matrix is unipotent in the
/// level grading its exact logarithm recovers x in one step.  The cell
/// membership test of the target is the invertibility of every diagonal
/// graph block.
pub fn schubert_coordinate(data: &BoundaryLieData, target: &HodgeFiltration) -> Result<Mat, Error> {
    let s = data.splitting()?;
    let f = data
        .hodge_filtration()
        .expect("splitting implies filtration");
    let r = data.space().rank();
    let n = data.space().weight();
    // ranges of each piece inside the splitting basis, grouped by first index
    let mut ranges = BTreeMap::new();
    let mut start = 0usize;
    for (&k, piece) in s.pieces() {
        ranges.insert(k, (start, start + piece.dim()));
        start += piece.dim();
    }
    let basis_inv = s.basis().inverse().expect("splitting basis invertible");
    let mut phi = Mat::zero(r, r);
    for p in 0..=n {
        let fp = f.step(p);
        let ep = target.step(p);
        if fp.dim() != ep.dim() {
            return Err(Error::NotInCell);
        }
        if fp.dim() == 0 {
            continue;
        }
        // rows with first index >= p (the F^p block) and the complement
        let mut top_rows = Vec::new();
        let mut bottom_rows = Vec::new();
        for (&(pp, _), &(a, b)) in &ranges {
            for row in a..b {
                if pp >= p {
                    top_rows.push(row);
                } else {
                    bottom_rows.push(row);
                }
            }
        }
        let e_coords = basis_inv.mul(ep.basis());
        let t = e_coords.submatrix(&top_rows, &(0..ep.dim()).collect::<Vec<_>>());
        let Some(t_inv) = t.inverse() else {
            return Err(Error::NotInCell);
        };
        let graph = e_coords.mul(&t_inv); // columns indexed by F^p-coordinates
                                          // install the columns of this graph for the pieces with first index p
        for (&(pp, _), &(a, b)) in &ranges {
            if pp != p {
                continue;
            }
            // position of this piece inside the top-row ordering
            for (col_idx, row) in top_rows.iter().enumerate() {
                if *row >= a && *row < b {
                    for rr in 0..r {
                        *phi.at_mut(rr, *row) = graph.at(rr, col_idx).clone();
                    }
                }
            }
        }
    }
    let x_coords = log_unipotent(&phi).map_err(|_| Error::NotInCell)?;
    let x = s.basis().mul(&x_coords).mul(&basis_inv);
    // the construction lands in the strictly-negative first-index part; make
    // sure the exponential really reproduces the target filtration
    let g = exp_nilpotent(&x)?;
    for p in 0..=n {
        if f.step(p).apply(&g)? != target.step(p) {
            return Err(Error::NotInCell);
        }
    }
    if !data.member(data.algebra(), &x) {
        return Err(Error::NotIsometry);
    }
    Ok(x)
}

/// Class of the Schubert coordinate modulo f-perp cap c^{-k-1}: the
/// canonical representative keeps the components with p < 0 and
/// -k <= p + q <= 0 and requires the coordinate to centralize the cone.
pub fn schubert_quotient_coordinate(
    data: &BoundaryLieData,
    target: &HodgeFiltration,
    k: i64,
) -> Result<Mat, Error> {
    let x = schubert_coordinate(data, target)?;
    if !data.member(data.centralizer(), &x) {
        return Err(Error::XNotCentral);
    }
    let s = data.splitting()?;
    let r = data.space().rank();
    let mut acc = Mat::zero(r, r);
    for ((a, b), comp) in s.end_components(&x) {
        if a < 0 && a + b >= -k {
            acc = acc.add(&comp);
        }
    }
    Ok(acc)
}

/// Evaluate the orbit exp(sum z_j N_j) F at exact parameter values.
pub fn orbit_point(
    cone: &NilpotentCone,
    f: &HodgeFiltration,
    z: &[GaussianRational],
) -> Result<HodgeFiltration, Error> {
    if z.len() != cone.num_generators() {
        return Err(Error::DimensionMismatch {
            context: "orbit parameter count",
        });
    }
    let r = cone.space().rank();
    let mut acc = Mat::zero(r, r);
    for (zj, n) in z.iter().zip(cone.generators()) {
        acc = acc.add(&n.scale(zj));
    }
    let g = exp_nilpotent(&acc)?;
    f.apply(&g)
}

/// Solve exp(b) exp(x) F = exp(y) F for y in c^{-1} cap f-perp and verify
/// the closed forms for its leading components.
///
/// At level -1 the coordinates simply add: y and x + b have the same
/// (-p, p-1) components for every p > 0.  At type (-1,-1),
///
/// ```text
/// y^{-1,-1} = (x + b + [b, x])^{-1,-1} - (1/2) [b^{-1,0}, b^{0,-1}]
/// ```
///
/// The full bracket [b, x] and the half-bracket of the two level -1 parts
/// of b come from splitting exp(Ad_{exp(x)}^{-1} b) into its cell and
/// stabilizer factors; the factors do not commute, which is what produces
/// the correction term.  (A single Baker-Campbell-Hausdorff merge followed
/// by a naive projection to the cell directions would instead give the
/// superficially simpler `(x + b + [b,x]/2)^{-1,-1}`, but that identity
/// already fails when b has matching (-1,0) and (0,-1) parts, as direct
/// solving shows.)  Both closed forms are re-verified here against the
/// independently solved coordinate.
pub fn fiber_solve(data: &BoundaryLieData, b: &Mat, x: &Mat) -> Result<Mat, Error> {
    let s = data.splitting()?;
    let c1 = data.centralizer_filtration(1);
    if !data.member(&c1, b) {
        return Err(Error::invalid("b is not in c^{-1}"));
    }
    if !data.member(&c1, x) || s.f_perp_part(x) != *x {
        return Err(Error::invalid("x is not in c^{-1} cap f-perp"));
    }
    let f = data.hodge_filtration().expect("hodge attached");
    let moved = f.apply(&exp_nilpotent(b)?.mul(&exp_nilpotent(x)?))?;
    let y = schubert_coordinate(data, &moved)?;
    if !data.member(&c1, &y) {
        return Err(Error::invalid("solved coordinate escapes c^{-1}"));
    }
    // closed form at level -1: y and x + b have the same E(-1) components
    let xb = x.add(b);
    for ((a, bb), comp) in s.end_components(&y) {
        if a < 0 && a + bb == -1 && comp != s.end_component(&xb, a, bb) {
            return Err(Error::invalid("level -1 closed form violated"));
        }
    }
    // closed form for the (-1,-1) component, with the splitting correction
    let half = GaussianRational::from_ratio(1, 2);
    let b_cell = s.end_component(b, -1, 0);
    let b_stab = s.end_component(b, 0, -1);
    let corrected = xb
        .add(&b.commutator(x))
        .sub(&b_cell.commutator(&b_stab).scale(&half));
    if s.end_component(&y, -1, -1) != s.end_component(&corrected, -1, -1) {
        return Err(Error::invalid("(-1,-1) closed form violated"));
    }
    Ok(y)
}

/// A point of the fibre parameterization: a grading-preserving real
/// isometry g and a coordinate x in c^{-1} cap f-perp.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    pub g: Mat,
    pub x: Mat,
}

impl FiberPoint {
    pub fn new(data: &BoundaryLieData, y: &Mat, g: Mat, x: Mat) -> Result<Self, Error> {
        if !data.is_in_centralizer_group(&g) {
            return Err(Error::NotInCentralizer);
        }
        if !g.commutator(y).is_zero() {
            return Err(Error::invalid("g does not commute with the grading"));
        }
        if !g.is_rational() {
            return Err(Error::invalid("g must have real entries"));
        }
        let s = data.splitting()?;
        if !data.member(&data.centralizer_filtration(1), &x) || s.f_perp_part(&x) != x {
            return Err(Error::invalid("x is not in c^{-1} cap f-perp"));
        }
        Ok(FiberPoint { g, x })
    }

    pub fn base(data: &BoundaryLieData, y: &Mat) -> Result<Self, Error> {
        let r = data.space().rank();
        FiberPoint::new(data, y, Mat::identity(r), Mat::zero(r, r))
    }

    /// The filtration g exp(x) F represented by this point.
    pub fn filtration(&self, data: &BoundaryLieData) -> Result<HodgeFiltration, Error> {
        let f = data
            .hodge_filtration()
            .ok_or_else(|| Error::invalid("no Hodge filtration attached"))?;
        f.apply(&self.g.mul(&exp_nilpotent(&self.x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::nilpotent::{grading_operator, sl2_complete};

    fn data_for(fx: &fixtures::Fixture) -> BoundaryLieData {
        BoundaryLieData::new(fx.cone.clone(), Some(fx.hodge.clone())).unwrap()
    }

    #[test]
    fn isometry_algebra_dimensions() {
        assert_eq!(isometry_algebra(fixtures::fixture_a().space()).dim(), 3);
        assert_eq!(isometry_algebra(fixtures::fixture_c().space()).dim(), 3);
        assert_eq!(isometry_algebra(fixtures::fixture_d().space()).dim(), 10);
    }

    #[test]
    fn trace_form_examples() {
        let n = fixtures::n_block();
        let m = Mat::from_rows_i64(&[&[0, 1], &[0, 0]]);
        let y = Mat::from_rows_i64(&[&[1, 0], &[0, -1]]);
        assert_eq!(trace_form(&n, &m), GaussianRational::one());
        assert_eq!(trace_form(&n, &n), GaussianRational::zero());
        assert_eq!(trace_form(&y, &y), GaussianRational::from_int(2));
        // symmetry and Ad-invariance on a sample
        let g = Mat::from_rows_i64(&[&[1, 1], &[0, 1]]);
        let gi = g.inverse().unwrap();
        assert_eq!(trace_form(&m, &n), trace_form(&n, &m));
        assert_eq!(
            trace_form(&g.mul(&n).mul(&gi), &g.mul(&m).mul(&gi)),
            trace_form(&n, &m)
        );
    }

    #[test]
    fn centralizer_of_rank_two_fixture() {
        let fx = fixtures::fixture_a();
        let data = data_for(&fx);
        let n = fx.cone.generators()[0].clone();
        assert_eq!(data.centralizer().dim(), 1);
        assert!(data.member(data.centralizer(), &n));
        assert_eq!(data.centralizer_filtration(1).dim(), 1);
        assert_eq!(data.centralizer_filtration(2).dim(), 1);
    }

    #[test]
    fn centralizer_of_rank_four_fixture_against_hand_basis() {
        // the centralizer of e1 -> e3 inside sp_4 is the radical {N, beta,
        // delta} together with the full sp_2 of the untouched plane (e2, e4)
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        assert_eq!(data.centralizer().dim(), 6);
        assert_eq!(data.centralizer_filtration(1).dim(), 3);
        assert_eq!(data.centralizer_filtration(2).dim(), 1);
        // brute-force oracle: the hand-written directions span the same spaces
        let n = fixtures::fixture_d_nilpotent();
        let (beta, delta) = fixtures::fixture_d_radical_directions();
        let mut eta = Mat::zero(4, 4); // e2 -> e2, e4 -> -e4
        *eta.at_mut(1, 1) = GaussianRational::one();
        *eta.at_mut(3, 3) = -GaussianRational::one();
        let mut nu_up = Mat::zero(4, 4); // e2 -> e4
        *nu_up.at_mut(3, 1) = GaussianRational::one();
        let mut nu_dn = Mat::zero(4, 4); // e4 -> e2
        *nu_dn.at_mut(1, 3) = GaussianRational::one();
        let hand = Subspace::from_vectors(
            16,
            &[
                n.vectorize(),
                beta.vectorize(),
                delta.vectorize(),
                eta.vectorize(),
                nu_up.vectorize(),
                nu_dn.vectorize(),
            ],
        );
        assert_eq!(*data.centralizer(), hand);
        let radical =
            Subspace::from_vectors(16, &[n.vectorize(), beta.vectorize(), delta.vectorize()]);
        assert_eq!(data.centralizer_filtration(1), radical);
        assert_eq!(
            data.centralizer_filtration(2),
            Subspace::from_vectors(16, &[n.vectorize()])
        );
    }

    #[test]
    fn trivial_cone_centralizer_is_everything() {
        let fx = fixtures::fixture_a();
        let cone = NilpotentCone::new(fx.space().clone(), vec![Mat::zero(2, 2)]).unwrap();
        let data = BoundaryLieData::new(cone, None).unwrap();
        assert_eq!(data.centralizer().dim(), data.algebra_dim());
    }

    #[test]
    fn centralizer_bracket_filtration() {
        for fx in [
            fixtures::fixture_a_prime(),
            fixtures::fixture_b(),
            fixtures::fixture_c(),
            fixtures::fixture_d(),
        ] {
            centralizer_bracket_filtration_on(&fx);
        }
    }

    fn centralizer_bracket_filtration_on(fx: &fixtures::Fixture) {
        let data = data_for(fx);
        let n_wt = fx.space().weight();
        for a in 1..=2 * n_wt {
            for b in 1..=2 * n_wt {
                let fa = data.basis_of(&data.centralizer_filtration(a));
                let fb = data.basis_of(&data.centralizer_filtration(b));
                let target = data.centralizer_filtration((a + b).min(2 * n_wt + 1));
                for u in &fa {
                    for v in &fb {
                        let br = u.commutator(v);
                        if a + b > 2 * n_wt {
                            assert!(br.is_zero(), "{}", fx.name);
                        } else {
                            assert!(data.member(&target, &br), "{}", fx.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pairing_is_ad_invariant_on_many_isometries() {
        // twenty rational isometries per fixture: the three unipotent
        // generators, the rotation, inverses and mixed products
        for fx in [fixtures::fixture_a_prime(), fixtures::fixture_d()] {
            let space = fx.space().clone();
            let mut gs: Vec<Mat> =
                if space.rank() == 4 {
                    let mut v = fixtures::fixture_d_gammas();
                    v.push(fixtures::fixture_d_levi_rotation());
                    v
                } else {
                    vec![
                        crate::exact::exp_nilpotent(&fx.cone.generators()[0]).unwrap(),
                        Mat::from_rows_i64(&[&[1, 1], &[0, 1]]),
                        Mat::from_rows_i64(&[&[2, 0], &[0, 1]]).mul(&Mat::from_fn(2, 2, |r, c| {
                            match (r, c) {
                                (0, 0) => GaussianRational::from_ratio(1, 2),
                                (1, 1) => GaussianRational::one(),
                                _ => GaussianRational::zero(),
                            }
                        })),
                    ]
                };
            let snapshot = gs.clone();
            for a in &snapshot {
                for b in &snapshot {
                    gs.push(a.mul(b));
                    for c in &snapshot {
                        gs.push(a.mul(b).mul(c));
                    }
                }
                gs.push(a.inverse().unwrap());
            }
            gs.dedup();
            gs.truncate(24);
            let n = fx.cone.generators()[0].clone();
            let basis = isometry_algebra(&space);
            let probe: Vec<Mat> = basis
                .basis_vectors()
                .iter()
                .take(4)
                .map(|v| Mat::from_vectorized(space.rank(), space.rank(), v))
                .collect();
            let mut count = 0;
            for g in &gs {
                assert!(space.is_isometry(g));
                let gi = g.inverse().unwrap();
                for xi in &probe {
                    let lhs = trace_form(&g.mul(xi).mul(&gi), &g.mul(&n).mul(&gi));
                    assert_eq!(lhs, trace_form(xi, &n));
                }
                count += 1;
            }
            assert!(count >= 20, "enough samples");
        }
    }

    #[test]
    fn algebra_pieces_act_on_vector_pieces_by_type() {
        // an endomorphism of type (p, q) maps the (r, s) piece of the space
        // into the (p + r, q + s) piece
        for fx in [fixtures::fixture_c(), fixtures::fixture_d()] {
            let data = data_for(&fx);
            let s = data.splitting().unwrap();
            let pieces = data.g_pieces().unwrap().clone();
            for (&(p, q), alg_piece) in &pieces {
                for xi in data.basis_of(alg_piece) {
                    for (&(r, ss), vec_piece) in s.pieces() {
                        let image = vec_piece.apply(&xi).unwrap();
                        if image.is_zero() {
                            continue;
                        }
                        let target = s.piece(p + r, q + ss);
                        assert!(
                            target.contains(&image),
                            "type ({p},{q}) acting on ({r},{ss})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pieces_pair_trivially_unless_opposite() {
        for fx in [
            fixtures::fixture_a_prime(),
            fixtures::fixture_c(),
            fixtures::fixture_d(),
        ] {
            let data = data_for(&fx);
            let pieces = data.g_pieces().unwrap().clone();
            for (&(p, q), a) in &pieces {
                for (&(rr, ss), b) in &pieces {
                    if p + rr == 0 && q + ss == 0 {
                        continue;
                    }
                    for u in data.basis_of(a) {
                        for v in data.basis_of(b) {
                            assert!(
                                trace_form(&u, &v).is_zero(),
                                "pairing must vanish between ({p},{q}) and ({rr},{ss})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn end_pieces_match_independent_route() {
        // the blockwise pieces agree with the splitting of the induced
        // structure on End(V) computed by the Deligne formula
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let pieces = end_pieces_of(s);
        let n = fx.cone.generators()[0].clone();
        let w = crate::nilpotent::weight_filtration(&n, fx.space()).unwrap();
        let (wg, fg) = filtration::induced_end_filtration(&w, &fx.hodge).unwrap();
        // End-side mixed Hodge structure, split by the same closed formula
        let r2 = fx.space().rank().pow(2);
        let n_wt = fx.space().weight();
        for (&(p, q), piece) in &pieces {
            // I^{p,q}(End) = (F^p cap W_{p+q}) cap (conj(F^q) cap W_{p+q} + ...)
            let pp = p + n_wt;
            let qq = q + n_wt; // recentred indices of the End structure
            let l = pp + qq - 2 * n_wt; // End weight index (centred at zero)
            let left = fg.step(p).intersect(&wg.step(l)).unwrap();
            let mut right = fg.step(q).conj().intersect(&wg.step(l)).unwrap();
            for j in 2..=(4 * n_wt).max(2) {
                let term = fg
                    .step(q - j + 1)
                    .conj()
                    .intersect(&wg.step(l - j))
                    .unwrap();
                right = right.sum(&term).unwrap();
            }
            let oracle = left.intersect(&right).unwrap();
            assert_eq!(piece, &oracle, "End piece ({p},{q}) of dim {}", piece.dim());
            let _ = r2;
        }
    }

    #[test]
    fn bracket_respects_types() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let pieces = data.g_pieces().unwrap().clone();
        for (&(p, q), a) in &pieces {
            for (&(rr, ss), b) in &pieces {
                let target = data.g_piece(p + rr, q + ss).unwrap();
                for u in data.basis_of(a) {
                    for v in data.basis_of(b) {
                        let br = u.commutator(&v);
                        if br.is_zero() {
                            continue;
                        }
                        assert!(
                            data.member(&target, &br),
                            "bracket of ({p},{q}) and ({rr},{ss}) escapes its type"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn levi_decomposition_examples() {
        let fx = fixtures::fixture_a_prime();
        let data = data_for(&fx);
        let n = fx.cone.generators()[0].clone();
        let y = Mat::from_rows_i64(&[&[1, 0], &[0, -1]]);

        let gamma = exp_nilpotent(&n).unwrap();
        let (alpha, b) = levi_decompose(&data, &gamma, &y).unwrap();
        assert_eq!(alpha, Mat::identity(2));
        assert_eq!(b, n);

        // a graded element decomposes with trivial radical part; note that
        // rank-two torus elements like diag(2, 1/2) rescale N and therefore
        // do not centralize the cone, so the graded test element here is -Id
        let minus = Mat::identity(2).neg();
        let (alpha, b) = levi_decompose(&data, &minus, &y).unwrap();
        assert_eq!(alpha, minus);
        assert!(b.is_zero());

        let (alpha, b) = levi_decompose(&data, &Mat::identity(2), &y).unwrap();
        assert_eq!(alpha, Mat::identity(2));
        assert!(b.is_zero());
    }

    #[test]
    fn levi_decomposition_torus_element() {
        // in rank four the plane untouched by N carries honest torus
        // directions of the centralizer: e2 -> 2 e2, e4 -> e4 / 2
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let y = grading_operator(s);
        let mut torus = Mat::identity(4);
        *torus.at_mut(1, 1) = GaussianRational::from_int(2);
        *torus.at_mut(3, 3) = GaussianRational::from_ratio(1, 2);
        let (alpha, b) = levi_decompose(&data, &torus, &y).unwrap();
        assert_eq!(alpha, torus);
        assert!(b.is_zero());
        // and mixed with a radical factor it splits off exactly
        let gammas = fixtures::fixture_d_gammas();
        let mixed = torus.mul(&gammas[2]);
        let (alpha, b) = levi_decompose(&data, &mixed, &y).unwrap();
        assert_eq!(alpha, torus);
        assert_eq!(alpha.mul(&crate::exact::exp_nilpotent(&b).unwrap()), mixed);
    }

    #[test]
    fn levi_decomposition_mixed_element() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let y = grading_operator(s);
        let rot = fixtures::fixture_d_levi_rotation();
        let gammas = fixtures::fixture_d_gammas();
        let mixed = rot.mul(&gammas[1]);
        let (alpha, b) = levi_decompose(&data, &mixed, &y).unwrap();
        assert_eq!(alpha, rot);
        assert_eq!(alpha.mul(&exp_nilpotent(&b).unwrap()), mixed);
    }

    #[test]
    fn levi_rejects_non_centralizing() {
        let fx = fixtures::fixture_a_prime();
        let data = data_for(&fx);
        let y = Mat::from_rows_i64(&[&[1, 0], &[0, -1]]);
        // the opposite unipotent does not centralize N
        let bad = Mat::from_rows_i64(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            levi_decompose(&data, &bad, &y),
            Err(Error::NotInCentralizer)
        ));
    }

    #[test]
    fn normalization_examples() {
        let fx = fixtures::fixture_a_prime();
        let n = fx.cone.generators()[0].clone();
        let y = Mat::from_rows_i64(&[&[1, 0], &[0, -1]]);
        let t = sl2_complete(&n, &y, None).unwrap();

        let (k, normed) = normalize_triple(&t, std::slice::from_ref(&n)).unwrap();
        assert_eq!(k, BigInt::one());
        assert_eq!(normed, t);

        let shrunk = Sl2Triple {
            m: t.m.scale(&GaussianRational::from_ratio(1, 3)),
            y: t.y.clone(),
            n: t.n.scale(&GaussianRational::from_int(3)),
        };
        let (k, normed) = normalize_triple(&shrunk, std::slice::from_ref(&n)).unwrap();
        assert_eq!(k, BigInt::from(3));
        assert!(trace_form(&normed.m, &n).is_real());
        assert!(trace_form(&normed.m, &n).re().denom().is_one());

        let (k, _) = normalize_triple(&t, &[]).unwrap();
        assert_eq!(k, BigInt::one());
    }

    #[test]
    fn schubert_coordinate_roundtrips() {
        let fx = fixtures::fixture_a_prime();
        let data = data_for(&fx);
        // E = F gives x = 0
        let x = schubert_coordinate(&data, &fx.hodge).unwrap();
        assert!(x.is_zero());
        // E = exp(zN) F gives x = zN
        let n = fx.cone.generators()[0].clone();
        for z in [
            GaussianRational::i(),
            GaussianRational::from_ratio(3, 2),
            GaussianRational::new(
                Rational::new(1.into(), 2.into()),
                Rational::new((-5).into(), 3.into()),
            ),
        ] {
            let e = fx
                .hodge
                .apply(&exp_nilpotent(&n.scale(&z)).unwrap())
                .unwrap();
            let x = schubert_coordinate(&data, &e).unwrap();
            assert_eq!(x, n.scale(&z));
        }
    }

    #[test]
    fn schubert_coordinate_rank_four_roundtrip() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let n = fx.cone.generators()[0].clone();
        let e = fx.hodge.apply(&exp_nilpotent(&n).unwrap()).unwrap();
        assert_eq!(schubert_coordinate(&data, &e).unwrap(), n);
    }

    #[test]
    fn schubert_rejects_points_outside_the_cell() {
        let fx = fixtures::fixture_a_prime();
        let data = data_for(&fx);
        // span(e2) has the wrong intersection pattern with the limit flags
        let mut steps = BTreeMap::new();
        steps.insert(
            1,
            Subspace::from_vectors(
                2,
                &[vec![GaussianRational::zero(), GaussianRational::one()]],
            ),
        );
        let e = HodgeFiltration::new(fx.space().clone(), steps).unwrap();
        assert!(matches!(
            schubert_coordinate(&data, &e),
            Err(Error::NotInCell)
        ));
    }

    #[test]
    fn cell_membership_matches_intersection_dimensions() {
        // independent characterization of the open cell: a filtration E lies
        // in it exactly when dim(E^a cap U_c) = dim(F^a cap U_c) for every a
        // and every truncation U_c spanned by the pieces with first index
        // at most c
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let f = data.hodge_filtration().unwrap().clone();
        let n_wt = fx.space().weight();
        let r = fx.space().rank();
        let truncation = |c: i64| {
            let mut acc = Subspace::zero(r);
            for (&(p, _), piece) in s.pieces() {
                if p <= c {
                    acc = acc.sum(piece).unwrap();
                }
            }
            acc
        };
        let dims = |e: &HodgeFiltration| {
            let mut out = Vec::new();
            for a in 0..=n_wt {
                for c in -1..=n_wt {
                    out.push(e.step(a).intersect(&truncation(c)).unwrap().dim());
                }
            }
            out
        };
        let base_dims = dims(&f);
        // a cell point: same intersection pattern, and the solver accepts it
        let n = fx.cone.generators()[0].clone();
        let (beta, delta) = fixtures::fixture_d_radical_directions();
        let x = beta
            .scale(&GaussianRational::i())
            .add(&delta)
            .add(&n.scale(&GaussianRational::from_ratio(1, 3)));
        let inside = f
            .apply(&exp_nilpotent(&s.f_perp_part(&x)).unwrap())
            .unwrap();
        assert_eq!(dims(&inside), base_dims);
        assert!(schubert_coordinate(&data, &inside).is_ok());
        // a non-cell point: the pattern differs and the solver rejects it
        let mut steps = BTreeMap::new();
        steps.insert(
            1,
            Subspace::from_vectors(
                4,
                &[
                    vec![
                        GaussianRational::zero(),
                        GaussianRational::zero(),
                        GaussianRational::one(),
                        GaussianRational::zero(),
                    ],
                    vec![
                        GaussianRational::zero(),
                        GaussianRational::one(),
                        GaussianRational::zero(),
                        GaussianRational::i(),
                    ],
                ],
            ),
        );
        let outside = HodgeFiltration::new(fx.space().clone(), steps).unwrap();
        assert_ne!(dims(&outside), base_dims);
        assert!(matches!(
            schubert_coordinate(&data, &outside),
            Err(Error::NotInCell)
        ));
    }

    #[test]
    fn stabilizer_of_split_base_point_is_trivial() {
        // exp(x) F = F with x in c^{-1} cap f-perp forces x = 0
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let x = schubert_coordinate(&data, &fx.hodge).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn quotient_coordinate_classes() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let n = fx.cone.generators()[0].clone();
        // k large: the class keeps everything
        let e = fx.hodge.apply(&exp_nilpotent(&n).unwrap()).unwrap();
        let cls = schubert_quotient_coordinate(&data, &e, 4).unwrap();
        assert_eq!(cls, n);
        // N sits in c^{-2}, so its class at k = 1 vanishes
        let cls = schubert_quotient_coordinate(&data, &e, 1).unwrap();
        assert!(cls.is_zero());
        // a level -1 direction survives at k = 1
        let (_, delta) = fixtures::fixture_d_radical_directions();
        let e = fx.hodge.apply(&exp_nilpotent(&delta).unwrap()).unwrap();
        let cls = schubert_quotient_coordinate(&data, &e, 1).unwrap();
        let s = data.splitting().unwrap();
        let x = schubert_coordinate(&data, &e).unwrap();
        let mut expected = Mat::zero(4, 4);
        for ((a, b), comp) in s.end_components(&x) {
            if a < 0 && a + b == -1 {
                expected = expected.add(&comp);
            }
        }
        assert!(!cls.is_zero());
        assert_eq!(cls, expected);
    }

    #[test]
    fn orbit_points_and_domain_membership() {
        let fx = fixtures::fixture_a_prime();
        // z = 0 returns F itself
        let f0 = orbit_point(&fx.cone, &fx.hodge, &[GaussianRational::zero()]).unwrap();
        assert_eq!(f0, fx.hodge);
        // z = i lands inside the period domain, z = -i outside
        let fi = orbit_point(&fx.cone, &fx.hodge, &[GaussianRational::i()]).unwrap();
        assert!(filtration::check_period_domain(&fi));
        let fmi = orbit_point(&fx.cone, &fx.hodge, &[-GaussianRational::i()]).unwrap();
        assert!(!filtration::check_period_domain(&fmi));
    }

    #[test]
    fn fiber_solve_base_cases() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let n = fx.cone.generators()[0].clone();
        let zero = Mat::zero(4, 4);
        // b = 0 returns x
        let y = fiber_solve(&data, &zero, &n).unwrap();
        assert_eq!(y, n);
        // x = 0: the E(-1) component of y equals that of b
        let (beta, _) = fixtures::fixture_d_radical_directions();
        let y = fiber_solve(&data, &beta, &zero).unwrap();
        let s = data.splitting().unwrap();
        for ((a, b2), comp) in s.end_components(&y) {
            if a < 0 && a + b2 == -1 {
                assert_eq!(comp, s.end_component(&beta, a, b2));
            }
        }
    }

    #[test]
    fn fiber_solve_bracket_case_matches_oracle() {
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let n = fx.cone.generators()[0].clone();
        let (beta, delta) = fixtures::fixture_d_radical_directions();
        // x = the f-perp part of delta's complex direction: i beta + delta
        let x = beta
            .scale(&GaussianRational::i())
            .add(&delta)
            .scale(&GaussianRational::from_ratio(1, 2));
        assert_eq!(s.f_perp_part(&x), x);
        let y = fiber_solve(&data, &n, &x).unwrap();
        // oracle: direct coordinate of the product filtration
        let f = data.hodge_filtration().unwrap();
        let prod = f
            .apply(&exp_nilpotent(&n).unwrap().mul(&exp_nilpotent(&x).unwrap()))
            .unwrap();
        assert_eq!(y, schubert_coordinate(&data, &prod).unwrap());
        // and the closed form: y^{-1,-1} = (x + b + [b,x]/2)^{-1,-1}
        let corrected = x
            .add(&n)
            .add(&n.commutator(&x).scale(&GaussianRational::from_ratio(1, 2)));
        assert_eq!(
            s.end_component(&y, -1, -1),
            s.end_component(&corrected, -1, -1)
        );
    }

    #[test]
    fn fiber_increments_stay_at_leading_order() {
        // moving x by v changes y by v modulo c^{-2}
        let fx = fixtures::fixture_d();
        let data = data_for(&fx);
        let s = data.splitting().unwrap();
        let n = fx.cone.generators()[0].clone();
        let (beta, delta) = fixtures::fixture_d_radical_directions();
        let x = beta.scale(&GaussianRational::i()).add(&delta);
        let v = x.scale(&GaussianRational::from_ratio(-1, 3));
        let y0 = fiber_solve(&data, &n, &x).unwrap();
        let y1 = fiber_solve(&data, &n, &x.add(&v)).unwrap();
        let diff = y1.sub(&y0).sub(&v);
        // all that remains sits at levels below -1
        for ((a, b), comp) in s.end_components(&diff) {
            assert!(a + b <= -2, "({a},{b}) component {comp:?} too shallow");
        }
    }
}

//! Polarized spaces and the two filtrations that live on them.
//!
//! A [`PolarizedSpace`] is the quadruple (rank, weight, bilinear form,
//! implicit standard integral basis).  On top of it sit increasing rational
//! [`WeightFiltration`]s and decreasing [`HodgeFiltration`]s over Q(i),
//! their graded pieces, the induced filtrations on the endomorphism space,
//! and the first/second Hodge-Riemann membership tests that decide whether a
//! filtration lies in the compact dual or in the period domain itself.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{hermitian_signature, GaussianRational, Mat, Subspace};

/// Rank, weight and polarizing form.  The form is rational, nondegenerate
/// and (-1)^weight-symmetric; vectors carry Q(i) coordinates relative to the
/// standard basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PolarizedSpace {
    rank: usize,
    weight: i64,
    form: Mat,
}

impl PolarizedSpace {
    pub fn new(rank: usize, weight: i64, form: Mat) -> Result<Self, Error> {
        if rank == 0 {
            return Err(Error::invalid("rank must be positive"));
        }
        if form.rows() != rank || form.cols() != rank {
            return Err(Error::DimensionMismatch {
                context: "polarizing form size",
            });
        }
        if weight < 0 {
            return Err(Error::invalid("negative weight"));
        }
        if !form.is_rational() {
            return Err(Error::invalid("polarizing form must be rational"));
        }
        let sign = if weight % 2 == 0 {
            GaussianRational::one()
        } else {
            -GaussianRational::one()
        };
        if form.transpose() != form.scale(&sign) {
            return Err(Error::invalid(
                "polarizing form must satisfy Q^T = (-1)^n Q",
            ));
        }
        if form.rank() != rank {
            return Err(Error::invalid("polarizing form is degenerate"));
        }
        Ok(PolarizedSpace { rank, weight, form })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn form(&self) -> &Mat {
        &self.form
    }

    /// The bilinear (not sesquilinear) pairing Q(u, v).
    pub fn q(&self, u: &[GaussianRational], v: &[GaussianRational]) -> GaussianRational {
        let qv = self.form.apply(v);
        let mut acc = GaussianRational::zero();
        for (a, b) in u.iter().zip(&qv) {
            if !a.is_zero() && !b.is_zero() {
                acc = &acc + &(a * b);
            }
        }
        acc
    }

    /// Infinitesimal isometry test: Q(xi u, v) + Q(u, xi v) = 0.
    pub fn is_infinitesimal_isometry(&self, xi: &Mat) -> bool {
        xi.rows() == self.rank
            && xi.cols() == self.rank
            && xi
                .transpose()
                .mul(&self.form)
                .add(&self.form.mul(xi))
                .is_zero()
    }

    /// Group isometry test: Q(g u, g v) = Q(u, v).
    pub fn is_isometry(&self, g: &Mat) -> bool {
        g.rows() == self.rank
            && g.cols() == self.rank
            && g.transpose().mul(&self.form).mul(g) == self.form
    }
}

/// One graded quotient W_l / W_{l-1}, with a lift of its basis to the
/// ambient space and the projection onto quotient coordinates.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub level: i64,
    /// Columns are ambient representatives of the quotient basis.
    pub lift: Mat,
    /// dim x rank matrix sending v in W_l to its quotient coordinates; the
    /// value on vectors outside W_l is an artifact of the chosen complement.
    pub project: Mat,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.lift.cols()
    }
}

/// Increasing rational filtration W_0 <= W_1 <= ... <= W_{2n} = V.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightFiltration {
    space: PolarizedSpace,
    /// steps[l] = W_l for 0 <= l <= 2n.
    steps: Vec<Subspace>,
}

impl WeightFiltration {
    pub fn new(space: PolarizedSpace, steps: Vec<Subspace>) -> Result<Self, Error> {
        let top = 2 * space.weight() as usize;
        if steps.len() != top + 1 {
            return Err(Error::invalid(format!(
                "weight filtration needs {} steps, got {}",
                top + 1,
                steps.len()
            )));
        }
        for (l, s) in steps.iter().enumerate() {
            if s.ambient_dim() != space.rank() {
                return Err(Error::DimensionMismatch {
                    context: "weight filtration step",
                });
            }
            if !s.is_rational() {
                return Err(Error::invalid(format!("W_{l} is not rational")));
            }
            if l > 0 && !s.contains(&steps[l - 1]) {
                return Err(Error::invalid(format!(
                    "W_{} does not contain W_{}",
                    l,
                    l - 1
                )));
            }
        }
        if !steps[top].is_full() {
            return Err(Error::invalid("top weight step must be the full space"));
        }
        Ok(WeightFiltration { space, steps })
    }

    pub fn space(&self) -> &PolarizedSpace {
        &self.space
    }

    /// W_l with the convention W_l = 0 for l < 0 and W_l = V for l >= 2n.
    pub fn step(&self, l: i64) -> Subspace {
        let top = self.steps.len() as i64 - 1;
        if l < 0 {
            Subspace::zero(self.space.rank())
        } else if l >= top {
            self.steps[top as usize].clone()
        } else {
            self.steps[l as usize].clone()
        }
    }

    pub fn top_index(&self) -> i64 {
        2 * self.space.weight()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.dim()).collect()
    }

    /// Image of the whole filtration under an invertible map.
    pub fn apply(&self, g: &Mat) -> Result<WeightFiltration, Error> {
        let steps = self
            .steps
            .iter()
            .map(|s| s.apply(g))
            .collect::<Result<Vec<_>, _>>()?;
        WeightFiltration::new(self.space.clone(), steps)
    }

    /// Graded quotient at level l with lift and projection.
    ///
    /// The lift completes a basis of W_{l-1} greedily by columns of the
    /// canonical basis of W_l, so both maps are deterministic.
    pub fn graded_piece(&self, l: i64) -> Result<GradedPiece, Error> {
        if l < 0 || l > self.top_index() {
            return Err(Error::invalid(format!("graded index {l} out of range")));
        }
        let below = self.step(l - 1);
        let here = self.step(l);
        let (_, chosen) = below.greedy_extension(here.basis());
        let lift = here
            .basis()
            .submatrix(&(0..here.ambient_dim()).collect::<Vec<_>>(), &chosen);
        let dim = lift.cols();
        let r = self.space.rank();
        // complete [W_{l-1} | lift] to a full basis by standard vectors
        let mut full_cols = below.basis_vectors();
        full_cols.extend(lift.columns());
        let mut current = Subspace::from_vectors(r, &full_cols);
        for k in 0..r {
            if current.dim() == r {
                break;
            }
            let mut e = vec![GaussianRational::zero(); r];
            e[k] = GaussianRational::one();
            if !current.contains_vector(&e) {
                full_cols.push(e);
                current = Subspace::from_vectors(r, &full_cols);
            }
        }
        let basis = Mat::from_cols(r, &full_cols);
        let inv = basis.inverse().expect("completed basis must be invertible");
        let rows: Vec<usize> = (below.dim()..below.dim() + dim).collect();
        let cols: Vec<usize> = (0..r).collect();
        let project = inv.submatrix(&rows, &cols);
        Ok(GradedPiece {
            level: l,
            lift,
            project,
        })
    }

    /// Sum over l of dim Gr_l, always the rank.
    pub fn graded_dims(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for l in 0..=self.top_index() {
            let d = self.step(l).dim() - self.step(l - 1).dim();
            out.push((l, d));
        }
        out
    }
}

/// Decreasing filtration F^p over Q(i), declared on the effective range
/// 0 <= p <= n; F^p is the full space below the range and zero above it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HodgeFiltration {
    space: PolarizedSpace,
    steps: BTreeMap<i64, Subspace>,
}

impl HodgeFiltration {
    pub fn new(space: PolarizedSpace, steps: BTreeMap<i64, Subspace>) -> Result<Self, Error> {
        let n = space.weight();
        for (&p, s) in &steps {
            if s.ambient_dim() != space.rank() {
                return Err(Error::DimensionMismatch {
                    context: "hodge filtration step",
                });
            }
            if p < 0 || p > n {
                return Err(Error::invalid(format!(
                    "hodge step {p} outside the effective range 0..={n}"
                )));
            }
        }
        let f = HodgeFiltration { space, steps };
        for p in 0..=n {
            if !f.step(p - 1).contains(&f.step(p)) {
                return Err(Error::invalid(format!(
                    "F^{} does not contain F^{}",
                    p - 1,
                    p
                )));
            }
        }
        Ok(f)
    }

    pub fn space(&self) -> &PolarizedSpace {
        &self.space
    }

    /// F^p, extended by V below the declared range and 0 above it.
    pub fn step(&self, p: i64) -> Subspace {
        if let Some(s) = self.steps.get(&p) {
            return s.clone();
        }
        let declared_min = self.steps.keys().next().copied();
        match declared_min {
            Some(min) if p > min => {
                // above every declared step and the weight: zero
                if p > *self.steps.keys().last().unwrap() {
                    Subspace::zero(self.space.rank())
                } else {
                    // inside the declared range but missing: inherit from above
                    self.steps
                        .range(p..)
                        .next()
                        .map(|(_, s)| s.clone())
                        .unwrap_or_else(|| Subspace::zero(self.space.rank()))
                }
            }
            _ => Subspace::full(self.space.rank()),
        }
    }

    pub fn declared(&self) -> &BTreeMap<i64, Subspace> {
        &self.steps
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        let n = self.space.weight();
        (0..=n).map(|p| (p, self.step(p).dim())).collect()
    }

    pub fn apply(&self, g: &Mat) -> Result<HodgeFiltration, Error> {
        let mut steps = BTreeMap::new();
        for (&p, s) in &self.steps {
            steps.insert(p, s.apply(g)?);
        }
        HodgeFiltration::new(self.space.clone(), steps)
    }

    pub fn conj(&self) -> HodgeFiltration {
        HodgeFiltration {
            space: self.space.clone(),
            steps: self.steps.iter().map(|(&p, s)| (p, s.conj())).collect(),
        }
    }
}

/// A filtration of the endomorphism space End(V) = Q(i)^(r*r), indexed over
/// a symmetric integer range.  Used for both the increasing W(g) and the
/// decreasing F(g).
#[derive(Clone, Debug)]
pub struct EndFiltration {
    pub increasing: bool,
    pub ambient: usize,
    pub steps: BTreeMap<i64, Subspace>,
}

impl EndFiltration {
    pub fn step(&self, idx: i64) -> Subspace {
        if let Some(s) = self.steps.get(&idx) {
            return s.clone();
        }
        let lo = *self.steps.keys().next().unwrap();
        let hi = *self.steps.keys().last().unwrap();
        if self.increasing {
            if idx < lo {
                Subspace::zero(self.ambient)
            } else {
                self.steps[&hi].clone()
            }
        } else if idx > hi {
            Subspace::zero(self.ambient)
        } else {
            self.steps[&lo].clone()
        }
    }
}

/// Linear conditions "xi maps source_k into target_k for every k", solved in
/// the r^2-dimensional endomorphism space.  Returns the solution subspace in
/// vectorized (row-major) coordinates.
pub fn endomorphisms_mapping(rank: usize, conditions: &[(Subspace, Subspace)]) -> Subspace {
    let dim_end = rank * rank;
    let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
    for (source, target) in conditions {
        if target.is_full() {
            continue;
        }
        // complement projector: rows of annihilator of target
        let ann = annihilator_rows(target);
        for v in source.basis_vectors() {
            // condition: ann * (xi v) = 0; entries of xi are unknowns.
            for a in &ann {
                // row over vectorized xi: coefficient of xi[r][c] is a[r] * v[c]
                let mut row = vec![GaussianRational::zero(); dim_end];
                for r in 0..rank {
                    if a[r].is_zero() {
                        continue;
                    }
                    for c in 0..rank {
                        if v[c].is_zero() {
                            continue;
                        }
                        row[r * rank + c] = &a[r] * &v[c];
                    }
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Subspace::full(dim_end);
    }
    let m = Mat::from_rows(rows);
    Subspace::kernel(&m)
}

/// Rows spanning the annihilator of a subspace (linear functionals vanishing
/// on it), from the kernel of the transposed basis.
fn annihilator_rows(s: &Subspace) -> Vec<Vec<GaussianRational>> {
    if s.is_zero() {
        return (0..s.ambient_dim())
            .map(|k| {
                let mut e = vec![GaussianRational::zero(); s.ambient_dim()];
                e[k] = GaussianRational::one();
                e
            })
            .collect();
    }
    let kt = s.basis().transpose().kernel_basis();
    (0..kt.cols()).map(|c| kt.col(c)).collect()
}

/// The weight filtration induced on End(V): W_l(g) consists of the
/// endomorphisms shifting W by at most l, indexed over [-2n, 2n].
pub fn induced_end_weight(w: &WeightFiltration) -> Result<EndFiltration, Error> {
    let r = w.space().rank();
    let n = w.space().weight();
    let mut w_steps = BTreeMap::new();
    for l in -2 * n..=2 * n {
        let conds: Vec<(Subspace, Subspace)> =
            (0..=2 * n).map(|k| (w.step(k), w.step(k + l))).collect();
        w_steps.insert(l, endomorphisms_mapping(r, &conds));
    }
    Ok(EndFiltration {
        increasing: true,
        ambient: r * r,
        steps: w_steps,
    })
}

/// The Hodge filtration induced on End(V): F^p(g) consists of the
/// endomorphisms shifting F by at least p, indexed over [-n, n].
pub fn induced_end_hodge(f: &HodgeFiltration) -> Result<EndFiltration, Error> {
    let r = f.space().rank();
    let n = f.space().weight();
    let mut f_steps = BTreeMap::new();
    for p in -n..=n {
        let conds: Vec<(Subspace, Subspace)> =
            (0..=n).map(|k| (f.step(k), f.step(k + p))).collect();
        f_steps.insert(p, endomorphisms_mapping(r, &conds));
    }
    Ok(EndFiltration {
        increasing: false,
        ambient: r * r,
        steps: f_steps,
    })
}

/// Both induced filtrations on End(V) at once.
pub fn induced_end_filtration(
    w: &WeightFiltration,
    f: &HodgeFiltration,
) -> Result<(EndFiltration, EndFiltration), Error> {
    if w.space() != f.space() {
        return Err(Error::DimensionMismatch {
            context: "induced filtration spaces",
        });
    }
    Ok((induced_end_weight(w)?, induced_end_hodge(f)?))
}

/// First Hodge-Riemann bilinear relation: Q(F^p, F^q) = 0 whenever
/// p + q > n.  Membership test for the compact dual.
pub fn check_compact_dual(f: &HodgeFiltration) -> bool {
    let n = f.space().weight();
    for p in 0..=n {
        for q in (n + 1 - p).max(0)..=n {
            if p + q <= n {
                continue;
            }
            let fp = f.step(p);
            let fq = f.step(q);
            for u in fp.basis_vectors() {
                for v in fq.basis_vectors() {
                    if !f.space().q(&u, &v).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Gram matrix of the Hodge form i^(p-q) Q(., conj .) on a basis, in the
/// `u^H A u` convention used by [`hermitian_signature`].
pub fn hodge_gram(
    space: &PolarizedSpace,
    basis: &[Vec<GaussianRational>],
    p: i64,
    q: i64,
    twist: &Mat,
) -> Mat {
    let scale = GaussianRational::i_pow(p - q);
    Mat::from_fn(basis.len(), basis.len(), |j, k| {
        // A_{jk} = i^(p-q) Q(v_k, twist conj(v_j)) so that u^H A u is the
        // quadratic value of the form on u.
        let tv: Vec<GaussianRational> =
            twist.apply(&basis[j].iter().map(|e| e.conj()).collect::<Vec<_>>());
        &scale * &space.q(&basis[k], &tv)
    })
}

/// Second Hodge-Riemann relation: the Hodge decomposition
/// H^{p,q} = F^p cap conj(F^q) is a direct sum and i^(p-q) Q(v, conj v) > 0
/// on every piece.  Membership test for the period domain.
pub fn check_period_domain(f: &HodgeFiltration) -> bool {
    if !check_compact_dual(f) {
        return false;
    }
    let n = f.space().weight();
    let r = f.space().rank();
    let mut pieces = Vec::new();
    let mut total = 0usize;
    let mut union = Subspace::zero(r);
    for p in 0..=n {
        let q = n - p;
        let piece = match f.step(p).intersect(&f.step(q).conj()) {
            Ok(s) => s,
            Err(_) => return false,
        };
        total += piece.dim();
        union = match union.sum(&piece) {
            Ok(s) => s,
            Err(_) => return false,
        };
        pieces.push((p, q, piece));
    }
    if total != r || union.dim() != r {
        return false;
    }
    let id = Mat::identity(r);
    for (p, q, piece) in pieces {
        if piece.is_zero() {
            continue;
        }
        let gram = hodge_gram(f.space(), &piece.basis_vectors(), p, q, &id);
        match hermitian_signature(&gram) {
            Ok(sig) => {
                if !sig.is_positive_definite() {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

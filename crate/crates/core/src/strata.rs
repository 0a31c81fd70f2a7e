//! Normal-crossing boundary combinatorics.
//!
//! A [`BoundaryComplex`] records which intersections of boundary divisors
//! are nonempty (a downward-closed family of index sets) together with one
//! nilpotent isometry per divisor and optional integral monodromy
//! generators.  On top of it this module computes the span partition (the
//! finest partition merging a stratum into a deeper one when the nilpotent
//! spans agree), the span-closure and weight-closure sets of each stratum,
//! the union cone attached to a family of weight-equivalent strata, and the
//! instance checks for the inclusion of boundary structures into deeper
//! ones.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{exp_nilpotent, GaussianRational, Mat, Subspace};
use crate::filtration::{HodgeFiltration, PolarizedSpace, WeightFiltration};
use crate::lie::BoundaryLieData;
use crate::mhs::{verify_lmhs, LmhsCertificate};
use crate::nilpotent::{cone_weight_filtration, NilpotentCone};

/// Index set of one stratum; divisor indices are 1-based.
pub type IndexSet = BTreeSet<usize>;

/// The combinatorial boundary: divisor count, nonempty strata, one
/// nilpotent per divisor and optional monodromy generators.
#[derive(Clone, Debug)]
pub struct BoundaryComplex {
    space: PolarizedSpace,
    nu: usize,
    strata: Vec<IndexSet>,
    nilpotents: BTreeMap<usize, Mat>,
    monodromy: Vec<Mat>,
}

impl BoundaryComplex {
    pub fn new(
        space: PolarizedSpace,
        nu: usize,
        mut strata: Vec<IndexSet>,
        nilpotents: BTreeMap<usize, Mat>,
        monodromy: Vec<Mat>,
    ) -> Result<Self, Error> {
        strata.sort();
        strata.dedup();
        for i_set in &strata {
            if i_set.is_empty() {
                return Err(Error::invalid("empty stratum index set"));
            }
            for &i in i_set {
                if i == 0 || i > nu {
                    return Err(Error::invalid(format!("divisor index {i} out of range")));
                }
                if !nilpotents.contains_key(&i) {
                    return Err(Error::invalid(format!("no nilpotent for divisor {i}")));
                }
            }
        }
        for (i, n) in &nilpotents {
            if n.rows() != space.rank() || n.cols() != space.rank() {
                return Err(Error::DimensionMismatch {
                    context: "divisor nilpotent size",
                });
            }
            if !n.is_rational() {
                return Err(Error::invalid(format!("nilpotent {i} is not rational")));
            }
        }
        for g in &monodromy {
            if g.rows() != space.rank() || g.cols() != space.rank() {
                return Err(Error::DimensionMismatch {
                    context: "monodromy generator size",
                });
            }
        }
        Ok(BoundaryComplex {
            space,
            nu,
            strata,
            nilpotents,
            monodromy,
        })
    }

    pub fn space(&self) -> &PolarizedSpace {
        &self.space
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn strata(&self) -> &[IndexSet] {
        &self.strata
    }

    pub fn nilpotent(&self, i: usize) -> Option<&Mat> {
        self.nilpotents.get(&i)
    }

    pub fn monodromy(&self) -> &[Mat] {
        &self.monodromy
    }

    pub fn contains_stratum(&self, i_set: &IndexSet) -> bool {
        self.strata.iter().any(|s| s == i_set)
    }

    /// The cone attached to one stratum.
    pub fn cone_of(&self, i_set: &IndexSet) -> Result<NilpotentCone, Error> {
        if !self.contains_stratum(i_set) {
            return Err(Error::invalid(format!("no stratum {:?}", i_set)));
        }
        let gens = i_set.iter().map(|i| self.nilpotents[i].clone()).collect();
        NilpotentCone::new(self.space.clone(), gens)
    }

    /// Rational span of the nilpotents of a stratum, in vectorized
    /// endomorphism coordinates.
    pub fn span_of(&self, i_set: &IndexSet) -> Subspace {
        let r = self.space.rank();
        let vs: Vec<Vec<GaussianRational>> = i_set
            .iter()
            .map(|i| self.nilpotents[i].vectorize())
            .collect();
        Subspace::from_vectors(r * r, &vs)
    }
}

/// Itemized validation outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<String>,
}

/// Check every structural invariant of the complex: downward closure of the
/// strata family, nilpotency and isometry of each divisor operator,
/// commutation inside every stratum, and integrality of exp(N) and of the
/// monodromy generators when monodromy is declared.
pub fn validate_complex(c: &BoundaryComplex) -> ValidationReport {
    let mut issues = Vec::new();
    // downward closure (including all singletons below any stratum)
    for i_set in c.strata() {
        for &drop in i_set {
            let mut smaller = i_set.clone();
            smaller.remove(&drop);
            if !smaller.is_empty() && !c.contains_stratum(&smaller) {
                issues.push(format!(
                    "family is not downward closed: {:?} present but {:?} missing",
                    i_set, smaller
                ));
            }
        }
    }
    for (i, n) in &c.nilpotents {
        if !crate::nilpotent::is_nilpotent(n) {
            issues.push(format!("operator of divisor {i} is not nilpotent"));
        }
        if !c.space.is_infinitesimal_isometry(n) {
            issues.push(format!("operator of divisor {i} is not an isometry"));
        }
    }
    for i_set in c.strata() {
        let idx: Vec<usize> = i_set.iter().copied().collect();
        for a in 0..idx.len() {
            for b in (a + 1)..idx.len() {
                let na = &c.nilpotents[&idx[a]];
                let nb = &c.nilpotents[&idx[b]];
                if !na.commutator(nb).is_zero() {
                    issues.push(format!(
                        "operators of divisors {} and {} do not commute on stratum {:?}",
                        idx[a], idx[b], i_set
                    ));
                }
            }
        }
    }
    if !c.monodromy.is_empty() {
        for (i, n) in &c.nilpotents {
            match exp_nilpotent(n) {
                Ok(t) => {
                    if !matrix_is_integral(&t) {
                        issues.push(format!("exp of divisor {i} operator is not integral"));
                    }
                }
                Err(_) => issues.push(format!("divisor {i} operator has no exponential")),
            }
        }
        for (k, g) in c.monodromy.iter().enumerate() {
            if !matrix_is_integral(g) {
                issues.push(format!("monodromy generator {k} is not integral"));
            }
            if !c.space.is_isometry(g) {
                issues.push(format!("monodromy generator {k} is not an isometry"));
            }
        }
    }
    ValidationReport {
        ok: issues.is_empty(),
        issues,
    }
}

fn matrix_is_integral(m: &Mat) -> bool {
    use num_traits::One;
    (0..m.rows()).all(|r| {
        (0..m.cols()).all(|c| {
            let e = m.at(r, c);
            e.is_real() && e.re().denom().is_one()
        })
    })
}

/// The finest partition of the strata for which a stratum is equivalent to
/// any deeper one with the same rational nilpotent span; computed as the
/// connected components of the comparability graph with span-equality
/// edges.
pub fn upsilon_partition(c: &BoundaryComplex) -> Vec<Vec<IndexSet>> {
    let n = c.strata().len();
    let spans: Vec<Subspace> = c.strata().iter().map(|s| c.span_of(s)).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (small, large) = (&c.strata()[i], &c.strata()[j]);
            if small.is_subset(large) && spans[i] == spans[j] {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<IndexSet>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        classes.entry(root).or_default().push(c.strata()[i].clone());
    }
    let mut out: Vec<Vec<IndexSet>> = classes.into_values().collect();
    for class in &mut out {
        class.sort();
    }
    out.sort();
    out
}

/// Strata reachable from I without changing the nilpotent span: the
/// members of I's partition class containing I.
pub fn cone_closure(c: &BoundaryComplex, i_set: &IndexSet) -> Result<Vec<IndexSet>, Error> {
    if !c.contains_stratum(i_set) {
        return Err(Error::invalid(format!("no stratum {:?}", i_set)));
    }
    let classes = upsilon_partition(c);
    let class = classes
        .into_iter()
        .find(|cl| cl.iter().any(|s| s == i_set))
        .expect("every stratum belongs to a class");
    Ok(class.into_iter().filter(|j| i_set.is_subset(j)).collect())
}

/// Strata above I carrying the same weight filtration.  The result is
/// checked to be interval closed and to contain the span closure.
pub fn wt_set(c: &BoundaryComplex, i_set: &IndexSet) -> Result<Vec<IndexSet>, Error> {
    if !c.contains_stratum(i_set) {
        return Err(Error::invalid(format!("no stratum {:?}", i_set)));
    }
    let base_w = cone_weight_filtration(&c.cone_of(i_set)?)?;
    let mut out = Vec::new();
    for j in c.strata() {
        if !i_set.is_subset(j) {
            continue;
        }
        let wj = cone_weight_filtration(&c.cone_of(j)?)?;
        if wj == base_w {
            out.push(j.clone());
        }
    }
    // interval closure: I <= J' <= J with J in the set forces J' in the set
    for j in &out {
        for jp in c.strata() {
            if i_set.is_subset(jp) && jp.is_subset(j) && !out.contains(jp) {
                return Err(Error::ClosureViolation {
                    detail: format!("{:?} between {:?} and {:?}", jp, i_set, j),
                });
            }
        }
    }
    let closure = cone_closure(c, i_set)?;
    for j in &closure {
        if !out.contains(j) {
            return Err(Error::ClosureViolation {
                detail: format!("span-closure member {:?} missing from weight closure", j),
            });
        }
    }
    Ok(out)
}

/// The union cone of a family of weight-equivalent strata above I, with the
/// membership data that makes it usable: every generator centralizes the
/// cone of I and shifts its weight filtration by two, and its class modulo
/// c^{-4} is reported in canonical coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionCone {
    /// (divisor index, generator) pairs, deduplicated.
    pub generators: Vec<(usize, Mat)>,
    /// Coordinates of each generator in the quotient c^{-2} / c^{-4}.
    pub quotient_classes: Vec<Vec<GaussianRational>>,
}

pub fn sigma_union(
    c: &BoundaryComplex,
    i_set: &IndexSet,
    family: &[IndexSet],
) -> Result<UnionCone, Error> {
    let wt = wt_set(c, i_set)?;
    for j in family {
        if !wt.contains(j) {
            return Err(Error::NotInWeightSet {
                base: format!("{:?}", i_set),
                found: format!("{:?}", j),
            });
        }
    }
    let data = BoundaryLieData::new(c.cone_of(i_set)?, None)?;
    let c2 = data.centralizer_filtration(2);
    let c4 = data.centralizer_filtration(4);
    let mut divisors: BTreeSet<usize> = BTreeSet::new();
    for j in family {
        divisors.extend(j.iter().copied());
    }
    let mut generators = Vec::new();
    for d in divisors {
        let n = c.nilpotents[&d].clone();
        if !data.member(&c2, &n) {
            return Err(Error::invalid(format!(
                "generator of divisor {d} is not in c^{{-2}} of the base stratum"
            )));
        }
        generators.push((d, n));
    }
    // canonical quotient coordinates: extend a basis of c^{-4} to c^{-2}
    let (c2_full, chosen) = c4.greedy_extension(c2.basis());
    debug_assert_eq!(c2_full, c2);
    let complement_cols = c2
        .basis()
        .submatrix(&(0..c2.basis().rows()).collect::<Vec<_>>(), &chosen);
    let mut quotient_classes = Vec::new();
    for (_, n) in &generators {
        // solve n = c4 part + complement * coords
        let combined = if c4.is_zero() {
            complement_cols.clone()
        } else {
            c4.basis().hstack(&complement_cols)
        };
        let sol = combined
            .solve(&Mat::from_cols(combined.rows(), &[n.vectorize()]))
            .ok_or_else(|| Error::invalid("generator escapes c^{-2}"))?;
        let offset = if c4.is_zero() { 0 } else { c4.dim() };
        quotient_classes.push(
            (0..complement_cols.cols())
                .map(|k| sol.at(offset + k, 0).clone())
                .collect(),
        );
    }
    Ok(UnionCone {
        generators,
        quotient_classes,
    })
}

/// Instance check for including the boundary structure of a deeper stratum
/// into a shallower one: the certificate transfers from the deeper cone to
/// the shallower cone, and the centralizer filtration of the deeper cone is
/// cut out of the shallower one at depths one and two.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionReport {
    pub deep_certificate: LmhsCertificate,
    pub shallow_certificate: LmhsCertificate,
    pub radical_match: bool,
    pub depth_two_match: bool,
    pub pass: bool,
}

pub fn verify_boundary_inclusions(
    c: &BoundaryComplex,
    i_set: &IndexSet,
    j_set: &IndexSet,
    f: &HodgeFiltration,
) -> Result<InclusionReport, Error> {
    let wt = wt_set(c, i_set)?;
    if !wt.contains(j_set) {
        return Err(Error::NotInWeightSet {
            base: format!("{:?}", i_set),
            found: format!("{:?}", j_set),
        });
    }
    let cone_i = c.cone_of(i_set)?;
    let cone_j = c.cone_of(j_set)?;
    let w = cone_weight_filtration(&cone_j)?;
    let deep_certificate = verify_lmhs(&w, f, &cone_j)?;
    let shallow_certificate = verify_lmhs(&w, f, &cone_i)?;
    let data_i = BoundaryLieData::new(cone_i, None)?;
    let data_j = BoundaryLieData::new(cone_j, None)?;
    let radical_match = data_j.centralizer_filtration(1)
        == data_j
            .centralizer()
            .intersect(&data_i.centralizer_filtration(1))?;
    let depth_two_match = data_j.centralizer_filtration(2)
        == data_j
            .centralizer()
            .intersect(&data_i.centralizer_filtration(2))?;
    let pass =
        deep_certificate.pass && shallow_certificate.pass && radical_match && depth_two_match;
    Ok(InclusionReport {
        deep_certificate,
        shallow_certificate,
        radical_match,
        depth_two_match,
        pass,
    })
}

/// Per-stratum summary used by the command-line front end.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StratumEntry {
    pub stratum: Vec<usize>,
    pub weight_dims: Vec<usize>,
    pub cone_closure: Vec<Vec<usize>>,
    pub wt_set: Vec<Vec<usize>>,
    pub closure_contained_in_wt: bool,
    pub union_cone_divisors: Vec<usize>,
    /// Classes of the union-cone generators in c^{-2} / c^{-4}.
    pub union_cone_classes: Vec<Vec<GaussianRational>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrataReport {
    pub validation: ValidationReport,
    pub upsilon_classes: Vec<Vec<Vec<usize>>>,
    pub strata: Vec<StratumEntry>,
}

fn to_vec(s: &IndexSet) -> Vec<usize> {
    s.iter().copied().collect()
}

/// Run the whole strata calculus on a validated complex.
pub fn strata_report(c: &BoundaryComplex) -> Result<StrataReport, Error> {
    let validation = validate_complex(c);
    if !validation.ok {
        return Ok(StrataReport {
            validation,
            upsilon_classes: Vec::new(),
            strata: Vec::new(),
        });
    }
    let upsilon_classes = upsilon_partition(c)
        .iter()
        .map(|cl| cl.iter().map(to_vec).collect())
        .collect();
    let mut entries = Vec::new();
    for i_set in c.strata() {
        let w = cone_weight_filtration(&c.cone_of(i_set)?)?;
        let closure = cone_closure(c, i_set)?;
        let wt = wt_set(c, i_set)?;
        let closure_contained = closure.iter().all(|j| wt.contains(j));
        let union = sigma_union(c, i_set, &wt)?;
        entries.push(StratumEntry {
            stratum: to_vec(i_set),
            weight_dims: w.dims(),
            cone_closure: closure.iter().map(to_vec).collect(),
            wt_set: wt.iter().map(to_vec).collect(),
            closure_contained_in_wt: closure_contained,
            union_cone_divisors: union.generators.iter().map(|(d, _)| *d).collect(),
            union_cone_classes: union.quotient_classes,
        });
    }
    Ok(StrataReport {
        validation,
        upsilon_classes,
        strata: entries,
    })
}

/// The weight filtration of a stratum of the complex; convenience wrapper.
pub fn stratum_weight_filtration(
    c: &BoundaryComplex,
    i_set: &IndexSet,
) -> Result<WeightFiltration, Error> {
    cone_weight_filtration(&c.cone_of(i_set)?)
}

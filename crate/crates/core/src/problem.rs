//! Problem files and verification reports.
//!
//! A problem file is a single JSON document carrying a polarized space and
//! whatever optional data a command needs: a cone, a Hodge filtration, a
//! boundary complex, monodromy elements, and command parameters.  Reports
//! are deterministic JSON: identical input bytes produce identical report
//! bytes (timing is only included on request, precisely so that the output
//! is reproducible).
//!
//! Scalars serialize as strings "p/q" for rationals and objects
//! {"re": "p/q", "im": "p/q"} for Gaussian rationals; matrices are
//! row-major arrays of scalars.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bundles::{
    abelian_check, chern_form, e_m_exponent, extension_space, h_m_exponent, pairing_coefficients,
    tilde_e_m_exponent, AutomorphyExponent,
};
use crate::error::Error;
use crate::exact::{log_unipotent, rational_to_string, GaussianRational, Mat, Subspace};
use crate::filtration::{check_compact_dual, check_period_domain, HodgeFiltration, PolarizedSpace};
use crate::fixtures::Fixture;
use crate::lie::{normalize_triple, orbit_point, BoundaryLieData, FiberPoint};
use crate::mhs::{deligne_splitting, f_infinity, verify_lmhs};
use crate::nilpotent::{
    cone_weight_filtration, grading_operator, sl2_complete, NilpotentCone, Sl2Triple,
};
use crate::strata::{self, BoundaryComplex, IndexSet};

#[derive(Debug, Deserialize)]
pub struct SpaceSpec {
    pub rank: usize,
    pub weight: i64,
    #[serde(alias = "Q", alias = "q")]
    pub form: Mat,
}

#[derive(Debug, Deserialize)]
pub struct ComplexSpec {
    pub nu: usize,
    pub strata: Vec<Vec<usize>>,
    #[serde(alias = "N")]
    pub nilpotents: BTreeMap<String, Mat>,
    #[serde(default, alias = "gamma")]
    pub monodromy: Vec<Mat>,
}

#[derive(Debug, Default, Deserialize)]
pub struct Params {
    /// Orbit parameters, one per cone generator.
    pub z: Option<Vec<GaussianRational>>,
    /// Depth for quotient coordinates.
    pub k: Option<i64>,
    /// Fibre coordinate for automorphy evaluation.
    pub x: Option<Mat>,
    /// Group part of the fibre point.
    pub g: Option<Mat>,
}

#[derive(Debug, Deserialize)]
pub struct ProblemFile {
    pub space: SpaceSpec,
    #[serde(default)]
    pub cone: Option<Vec<Mat>>,
    #[serde(default)]
    pub hodge: Option<BTreeMap<String, Mat>>,
    #[serde(default)]
    pub complex: Option<ComplexSpec>,
    #[serde(default)]
    pub gamma: Option<Vec<Mat>>,
    #[serde(default)]
    pub params: Option<Params>,
}

impl ProblemFile {
    pub fn parse(bytes: &[u8]) -> Result<Self, Error> {
        serde_json::from_slice(bytes).map_err(|e| Error::invalid(format!("problem file: {e}")))
    }

    pub fn space(&self) -> Result<PolarizedSpace, Error> {
        PolarizedSpace::new(self.space.rank, self.space.weight, self.space.form.clone())
    }

    pub fn cone(&self) -> Result<NilpotentCone, Error> {
        let gens = self
            .cone
            .clone()
            .ok_or_else(|| Error::invalid("command needs a \"cone\" field"))?;
        NilpotentCone::new(self.space()?, gens)
    }

    pub fn hodge(&self) -> Result<HodgeFiltration, Error> {
        let steps = self
            .hodge
            .as_ref()
            .ok_or_else(|| Error::invalid("command needs a \"hodge\" field"))?;
        let space = self.space()?;
        let mut parsed = BTreeMap::new();
        for (key, m) in steps {
            let p: i64 = key
                .parse()
                .map_err(|_| Error::invalid(format!("bad hodge index {key:?}")))?;
            parsed.insert(p, Subspace::from_cols(m));
        }
        HodgeFiltration::new(space, parsed)
    }

    pub fn complex(&self) -> Result<BoundaryComplex, Error> {
        let spec = self
            .complex
            .as_ref()
            .ok_or_else(|| Error::invalid("command needs a \"complex\" field"))?;
        let strata: Vec<IndexSet> = spec
            .strata
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        let mut nilpotents = BTreeMap::new();
        for (key, m) in &spec.nilpotents {
            let i: usize = key
                .parse()
                .map_err(|_| Error::invalid(format!("bad divisor index {key:?}")))?;
            nilpotents.insert(i, m.clone());
        }
        BoundaryComplex::new(
            self.space()?,
            spec.nu,
            strata,
            nilpotents,
            spec.monodromy.clone(),
        )
    }

    pub fn gammas(&self) -> Vec<Mat> {
        self.gamma.clone().unwrap_or_default()
    }
}

/// Outcome of one command: the report payload plus the process exit code
/// (0 all checks pass, 1 a mathematically meaningful "no", 2 input error).
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

/// 64-bit FNV-1a over the raw input, rendered as fixed-width hex.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("fnv1a:{h:016x}")
}

fn scalar_json(x: &GaussianRational) -> Value {
    if x.is_real() {
        Value::String(rational_to_string(x.re()))
    } else {
        json!({ "re": rational_to_string(x.re()), "im": rational_to_string(x.im()) })
    }
}

pub fn mat_json(m: &Mat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| scalar_json(m.at(r, c))).collect()))
            .collect(),
    )
}

fn subspace_json(s: &Subspace) -> Value {
    json!({ "dim": s.dim(), "basis": mat_json(s.basis()) })
}

fn exponent_json(q: &AutomorphyExponent) -> Value {
    json!({
        "re": rational_to_string(q.q.re()),
        "im": rational_to_string(q.q.im()),
        "reduced_re": rational_to_string(q.reduced().q.re()),
        "positive_real": q.is_positive_real(),
    })
}

/// Classify an error as a mathematical "no" (exit 1) or invalid input
/// (exit 2).
pub fn error_exit(e: &Error) -> i32 {
    match e {
        Error::NotMhs { .. }
        | Error::ConeNotPure { .. }
        | Error::NotInCell
        | Error::XNotCentral
        | Error::NotInWeightSet { .. } => 1,
        _ => 2,
    }
}

/// The sl2 data shared by several commands: grading, triple at the
/// barycenter, and normalization against the generators and any supplied
/// radical elements.
fn normalized_triple(
    data: &BoundaryLieData,
    gammas: &[Mat],
) -> Result<(Mat, num_bigint::BigInt, Sl2Triple), Error> {
    let s = data.splitting()?;
    let y = grading_operator(s);
    let bary = data.cone().barycenter();
    let triple = sl2_complete(&bary, &y, Some(s))?;
    let mut b_list: Vec<Mat> = data.cone().generators().to_vec();
    for g in gammas {
        if data.is_in_unipotent_radical(g) {
            b_list.push(log_unipotent(g)?);
        }
    }
    let (k, normed) = normalize_triple(&triple, &b_list)?;
    Ok((y, k, normed))
}

fn triple_json(t: &Sl2Triple) -> Value {
    json!({ "m": mat_json(&t.m), "y": mat_json(&t.y), "n": mat_json(&t.n) })
}

pub const COMMANDS: &[&str] = &[
    "weightfilt",
    "split",
    "sl2",
    "verify-lmhs",
    "finfty",
    "strata",
    "ext-torus",
    "chern",
    "automorphy",
    "coeffs",
    "orbit",
];

/// Run one command against a parsed problem file.
pub fn run(command: &str, problem: &ProblemFile, raw: &[u8]) -> Result<Outcome, Error> {
    let result = match command {
        "weightfilt" => run_weightfilt(problem)?,
        "split" => run_split(problem)?,
        "sl2" => run_sl2(problem)?,
        "verify-lmhs" => run_verify(problem)?,
        "finfty" => run_finfty(problem)?,
        "strata" => run_strata(problem)?,
        "ext-torus" => run_ext_torus(problem)?,
        "chern" => run_chern(problem)?,
        "automorphy" => run_automorphy(problem)?,
        "coeffs" => run_coeffs(problem)?,
        "orbit" => run_orbit(problem)?,
        other => return Err(Error::invalid(format!("unknown command {other:?}"))),
    };
    let (ok, payload) = result;
    let mut report = Map::new();
    report.insert("command".into(), Value::String(command.into()));
    report.insert("input_digest".into(), Value::String(digest(raw)));
    report.insert("ok".into(), Value::Bool(ok));
    report.insert("result".into(), payload);
    Ok(Outcome {
        report: Value::Object(report),
        exit: if ok { 0 } else { 1 },
    })
}

fn run_weightfilt(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let w = cone_weight_filtration(&cone)?;
    let steps: Vec<Value> = (0..=w.top_index())
        .map(|l| json!({ "level": l, "step": subspace_json(&w.step(l)) }))
        .collect();
    Ok((true, json!({ "dims": w.dims(), "steps": steps })))
}

fn run_split(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let w = cone_weight_filtration(&cone)?;
    match deligne_splitting(&w, &f) {
        Ok(s) => {
            let pieces: Vec<Value> = s
                .pieces()
                .map(|(&(p, q), piece)| json!({ "p": p, "q": q, "piece": subspace_json(piece) }))
                .collect();
            Ok((true, json!({ "r_split": s.is_r_split(), "pieces": pieces })))
        }
        Err(Error::NotMhs { detail }) => Ok((false, json!({ "not_mhs": detail }))),
        Err(e) => Err(e),
    }
}

fn run_sl2(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let data = BoundaryLieData::new(cone, Some(f))?;
    let (y, k, normed) = normalized_triple(&data, &problem.gammas())?;
    let coeffs = pairing_coefficients(&normed.m, data.cone().generators());
    Ok((
        true,
        json!({
            "grading": mat_json(&y),
            "normalization_scale": k.to_string(),
            "triple": triple_json(&normed),
            "generator_pairings": coeffs,
        }),
    ))
}

fn run_verify(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let w = cone_weight_filtration(&cone)?;
    let cert = verify_lmhs(&w, &f, &cone)?;
    let ok = cert.pass;
    Ok((
        ok,
        serde_json::to_value(&cert).expect("certificate serializes"),
    ))
}

fn run_finfty(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let w = cone_weight_filtration(&cone)?;
    match f_infinity(&w, &f) {
        Ok(f_inf) => {
            let steps: Vec<Value> = f_inf
                .declared()
                .iter()
                .map(|(p, s)| json!({ "p": p, "step": subspace_json(s) }))
                .collect();
            Ok((true, json!({ "steps": steps })))
        }
        Err(Error::NotMhs { detail }) => Ok((false, json!({ "not_mhs": detail }))),
        Err(e) => Err(e),
    }
}

fn run_strata(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let complex = problem.complex()?;
    let report = strata::strata_report(&complex)?;
    let ok = report.validation.ok && report.strata.iter().all(|s| s.closure_contained_in_wt);
    Ok((
        ok,
        serde_json::to_value(&report).expect("report serializes"),
    ))
}

fn run_ext_torus(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let data = BoundaryLieData::new(cone, Some(f))?;
    let ext = extension_space(&data, &problem.gammas())?;
    let pieces: Vec<Value> = ext
        .pieces()
        .iter()
        .map(|(p, basis)| {
            json!({
                "p": p,
                "dim": basis.len(),
                "basis": basis.iter().map(mat_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok((
        true,
        json!({
            "dim": ext.dim(),
            "eprime_dim": ext.eprime_dim(),
            "pieces": pieces,
            "lattice": {
                "rank": ext.lattice().rank(),
                "denominator": ext.lattice().denominator().to_string(),
                "basis": ext.lattice().basis_strings(),
            },
        }),
    ))
}

fn run_chern(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let data = BoundaryLieData::new(cone, Some(f))?;
    let gammas = problem.gammas();
    let (_, k, normed) = normalized_triple(&data, &gammas)?;
    let ext = extension_space(&data, &gammas)?;
    let h = chern_form(&ext, &normed.m)?;
    let check = abelian_check(&ext, &normed.m)?;
    let ok = check.positive_definite;
    Ok((
        ok,
        json!({
            "normalization_scale": k.to_string(),
            "chern_matrix": mat_json(&h),
            "abelian": check,
        }),
    ))
}

fn run_automorphy(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let data = BoundaryLieData::new(cone, Some(f.clone()))?;
    let gammas = problem.gammas();
    if gammas.is_empty() {
        return Err(Error::invalid("automorphy needs a nonempty \"gamma\" list"));
    }
    let (y, _, normed) = normalized_triple(&data, &gammas)?;
    let m = &normed.m;
    let params = problem.params.as_ref();
    let r = data.space().rank();
    let g = params
        .and_then(|p| p.g.clone())
        .unwrap_or_else(|| Mat::identity(r));
    let x = params
        .and_then(|p| p.x.clone())
        .unwrap_or_else(|| Mat::zero(r, r));
    let point = FiberPoint::new(&data, &y, g, x)?;
    let s_filt = point.filtration(&data)?;

    let mut entries = Vec::new();
    let mut all_ok = true;
    for gamma in &gammas {
        let e = e_m_exponent(&data, m, gamma, &point, &y)?;
        let te = tilde_e_m_exponent(&data, m, gamma, &s_filt)?;
        entries.push(json!({
            "e_m": exponent_json(&e),
            "tilde_e_m": exponent_json(&te),
        }));
    }
    let h = h_m_exponent(m, &point)?;
    // cocycle audit over every ordered pair
    let mut cocycle_ok = true;
    for g1 in &gammas {
        for g2 in &gammas {
            let lhs = e_m_exponent(&data, m, &g1.mul(g2), &point, &y)?;
            let mid = crate::bundles::act_on_fiber(&data, g2, &point, &y)?;
            let rhs =
                e_m_exponent(&data, m, g1, &mid, &y)?.add(&e_m_exponent(&data, m, g2, &point, &y)?);
            if !lhs.eq_mod2(&rhs) {
                cocycle_ok = false;
            }
            let tl = tilde_e_m_exponent(&data, m, &g2.mul(g1), &s_filt)?;
            let moved = s_filt.apply(g1)?;
            let tr = tilde_e_m_exponent(&data, m, g2, &moved)?
                .add(&tilde_e_m_exponent(&data, m, g1, &s_filt)?);
            if !tl.eq_mod2(&tr) {
                cocycle_ok = false;
            }
        }
    }
    all_ok &= cocycle_ok;
    Ok((
        all_ok,
        json!({
            "exponents": entries,
            "h_m": exponent_json(&h),
            "cocycle_ok": cocycle_ok,
        }),
    ))
}

fn run_coeffs(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let data = BoundaryLieData::new(cone, Some(f))?;
    let (_, k, normed) = normalized_triple(&data, &problem.gammas())?;
    let coeffs = pairing_coefficients(&normed.m, data.cone().generators());
    let ok = coeffs.iter().all(|c| c.integral);
    Ok((
        ok,
        json!({
            "normalization_scale": k.to_string(),
            "coefficients": coeffs,
        }),
    ))
}

fn run_orbit(problem: &ProblemFile) -> Result<(bool, Value), Error> {
    let cone = problem.cone()?;
    let f = problem.hodge()?;
    let z = problem
        .params
        .as_ref()
        .and_then(|p| p.z.clone())
        .ok_or_else(|| Error::invalid("orbit needs params.z"))?;
    let moved = orbit_point(&cone, &f, &z)?;
    let in_dual = check_compact_dual(&moved);
    let in_domain = check_period_domain(&moved);
    let steps: Vec<Value> = moved
        .declared()
        .iter()
        .map(|(p, s)| json!({ "p": p, "step": subspace_json(s) }))
        .collect();
    Ok((
        in_domain,
        json!({
            "filtration": steps,
            "compact_dual": in_dual,
            "period_domain": in_domain,
        }),
    ))
}

/// Canonical problem-file JSON for a fixture, used by `emit-fixtures`.
pub fn fixture_problem_json(fx: &Fixture) -> Value {
    let mut root = Map::new();
    root.insert(
        "space".into(),
        json!({
            "rank": fx.space().rank(),
            "weight": fx.space().weight(),
            "form": mat_json(fx.space().form()),
        }),
    );
    root.insert(
        "cone".into(),
        Value::Array(fx.cone.generators().iter().map(mat_json).collect()),
    );
    let mut hodge = Map::new();
    for (p, s) in fx.hodge.declared() {
        hodge.insert(p.to_string(), mat_json(s.basis()));
    }
    root.insert("hodge".into(), Value::Object(hodge));
    if let Some(complex) = &fx.complex {
        let mut nilpotents = Map::new();
        for i in 1..=complex.nu() {
            if let Some(n) = complex.nilpotent(i) {
                nilpotents.insert(i.to_string(), mat_json(n));
            }
        }
        let mut complex_json = Map::new();
        complex_json.insert("nu".into(), json!(complex.nu()));
        complex_json.insert(
            "strata".into(),
            json!(complex
                .strata()
                .iter()
                .map(|s| s.iter().copied().collect::<Vec<_>>())
                .collect::<Vec<_>>()),
        );
        complex_json.insert("nilpotents".into(), Value::Object(nilpotents));
        if !complex.monodromy().is_empty() {
            complex_json.insert(
                "monodromy".into(),
                Value::Array(complex.monodromy().iter().map(mat_json).collect()),
            );
        }
        root.insert("complex".into(), Value::Object(complex_json));
    }
    if fx.name == "d" {
        root.insert(
            "gamma".into(),
            Value::Array(
                crate::fixtures::fixture_d_gammas()
                    .iter()
                    .map(mat_json)
                    .collect(),
            ),
        );
        // default fibre coordinate: the complex compact direction
        let (beta, delta) = crate::fixtures::fixture_d_radical_directions();
        let x = beta
            .scale(&GaussianRational::i())
            .add(&delta)
            .scale(&GaussianRational::from_ratio(1, 2));
        root.insert("params".into(), json!({ "x": mat_json(&x) }));
    }
    if fx.name == "a_prime" {
        root.insert(
            "params".into(),
            json!({ "z": [scalar_json(&GaussianRational::i())] }),
        );
    }
    Value::Object(root)
}

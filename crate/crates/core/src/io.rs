//! JSON formats for norms, meshes and reports.
//!
//! Scalars are always strings: `"p/q"` in exact mode and 17-significant-digit
//! decimals in float mode. Quantities that are multiples of pi are written as
//! `"pi/4"`, `"3*pi/2"` and so on.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calibrate::{Calibrator, Lemma1Report, Lemma2Report, Lemma3Certificate, LpCalibratorSearch, MainPropReport, SampleReport};
use crate::error::{Error, Result};
use crate::exterior::{Covector, SimpleTwoVector, TwoForm, Vector};
use crate::kdim::{MuCoefficients, MuSearchReport, MuSearchStatus};
use crate::lp::LpOutcome;
use crate::planar::Vec2;
use crate::polytope::{SymPolygon, SymPolytope};
use crate::scalar::{OverPi, PiMultiple, Scalar};
use crate::surfaces::{ExperimentReport, Ring, TriMesh, Triangle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub facets: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub indices: [usize; 3],
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub ring: String,
    pub vertices: Vec<Vec<String>>,
    pub triangles: Vec<TriangleRecord>,
}

fn parse_row<T: Scalar>(row: &[String]) -> Result<Vec<T>> {
    row.iter().map(|s| T::parse_scalar(s).map_err(Error::from)).collect()
}

pub fn s<T: Scalar>(x: &T) -> String {
    x.to_report_string()
}

pub fn pi<T: Scalar>(x: &T) -> String {
    PiMultiple(x.clone()).to_report_string()
}

pub fn over_pi<T: Scalar>(x: &T) -> String {
    OverPi(x.clone()).to_report_string()
}

pub fn row<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(s(x))).collect())
}

pub fn vec2<T: Scalar>(p: &Vec2<T>) -> Value {
    json!([s(&p.x), s(&p.y)])
}

pub fn two_vector<T: Scalar>(sigma: &SimpleTwoVector<T>) -> Value {
    json!([row(&sigma.v1.0), row(&sigma.v2.0)])
}

/// Entries `[[i, j, value]]` of a 2-form, 1-based indices, value in units of pi.
pub fn two_form_pi<T: Scalar>(omega: &TwoForm<T>) -> Value {
    Value::Array(
        omega
            .entries()
            .map(|(&(i, j), c)| json!([i + 1, j + 1, pi(c)]))
            .collect(),
    )
}

pub fn parse_polytope<T: Scalar>(text: &str) -> Result<SymPolytope<T>> {
    let file: PolytopeFile = serde_json::from_str(text)?;
    let facets = file
        .facets
        .iter()
        .map(|r| parse_row(r).map(Covector))
        .collect::<Result<_>>()?;
    SymPolytope::new(file.dim, facets)
}

pub fn polytope_to_json<T: Scalar>(b: &SymPolytope<T>) -> Value {
    json!({
        "dim": b.dim(),
        "facets": b.facets().iter().map(|f| row(&f.0)).collect::<Vec<_>>(),
    })
}

pub fn parse_mesh<T: Scalar>(text: &str) -> Result<TriMesh<T>> {
    let file: MeshFile = serde_json::from_str(text)?;
    let ring = Ring::from_tag(&file.ring)?;
    let vertices = file
        .vertices
        .iter()
        .map(|r| parse_row(r).map(Vector))
        .collect::<Result<_>>()?;
    let triangles = file
        .triangles
        .iter()
        .map(|t| Triangle {
            indices: t.indices,
            coefficient: t.coefficient,
        })
        .collect();
    TriMesh::new(vertices, triangles, ring)
}

pub fn mesh_to_json<T: Scalar>(m: &TriMesh<T>) -> Value {
    json!({
        "ring": m.ring().tag(),
        "vertices": m.vertices().iter().map(|v| row(&v.0)).collect::<Vec<_>>(),
        "triangles": m.triangles().iter().map(|t| json!({"indices": t.indices, "coefficient": t.coefficient})).collect::<Vec<_>>(),
    })
}

/// Vertices, sides, weights and ambient functionals of `B ∩ P`.
pub fn section_report<T: Scalar>(k: &SymPolygon<T>) -> Value {
    let edges: Vec<Value> = k
        .edges()
        .iter()
        .map(|e| {
            let facet = e.facet.as_ref().map(|f| {
                json!({"facet_index": f.index + 1, "sign": f.sign, "functional": row(&f.functional.0)})
            });
            json!({
                "edge": vec2(&e.vector),
                "support": vec2(&e.support),
                "weight": s(&e.weight),
                "ambient": facet,
            })
        })
        .collect();
    json!({
        "n": k.n(),
        "area": s(k.area()),
        // weights do not depend on this choice
        "area_normalization": "euclidean area in the coordinates of the plane basis",
        "vertices": k.vertices().iter().map(vec2).collect::<Vec<_>>(),
        "edges": edges,
    })
}

pub fn sample_report<T: Scalar>(r: &SampleReport<T>) -> Value {
    json!({
        "seed": r.seed,
        "n_samples": r.n_samples,
        "max_violation": r.max_violation.as_ref().map(pi),
        "worst_sample": r.worst_sample.as_ref().map(two_vector),
        "equality_residual": pi(&r.equality_residual),
        "passed": r.passed(),
    })
}

pub fn calibrator_report<T: Scalar>(c: &Calibrator<T>, r: &SampleReport<T>) -> Value {
    json!({
        "mode": T::MODE,
        "plane": [row(&c.plane().u1.0), row(&c.plane().u2.0)],
        "omega": two_form_pi(c.omega()),
        "section": section_report(c.polygon()),
        "verification": sample_report(r),
    })
}

pub fn lp_report<T: Scalar>(r: &LpCalibratorSearch<T>) -> Value {
    let unit = |x: &T| if r.pi_power == 1 { pi(x) } else { over_pi(x) };
    let (status, payload) = match &r.outcome {
        LpOutcome::Feasible { witness } => (
            "feasible",
            json!({
                "witness": r.pairs.iter().zip(witness).map(|(&(i, j), c)| json!([i + 1, j + 1, unit(c)])).collect::<Vec<_>>(),
            }),
        ),
        LpOutcome::Infeasible { certificate } => ("infeasible", json!({"certificate": row(certificate)})),
    };
    json!({
        "lp_status": status,
        "n_variables": r.problem.n_vars(),
        "n_constraints": r.problem.rows().len(),
        "result": payload,
        "note": "feasibility on samples is necessary, not sufficient, for a calibrator",
    })
}

pub fn main_prop_report<T: Scalar>(r: &MainPropReport<T>) -> Value {
    json!({
        "lhs_abs": s(&r.lhs_abs),
        "lhs_sum": s(&r.lhs_sum),
        "bound": s(&r.bound),
        "first_holds": r.first_holds,
        "second_holds": r.second_holds,
    })
}

pub fn lemma1_report<T: Scalar>(r: &Lemma1Report<T>) -> Value {
    json!({"area": s(&r.area), "sum_of_abs": s(&r.sum_of_abs), "abs_of_sum": s(&r.abs_of_sum), "holds": r.holds})
}

pub fn lemma2_report<T: Scalar>(r: &Lemma2Report<T>) -> Value {
    json!({"sum": s(&r.sum), "bound": s(&r.bound), "pairs": r.pairs.len(), "holds": r.holds})
}

pub fn lemma3_report<T: Scalar>(c: &Lemma3Certificate<T>) -> Value {
    json!({
        "dropped": c.dropped.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "p": row(&c.p),
        "q": row(&c.q),
        "lambda": row(&c.lambda),
        "area_k": s(&c.area_k),
        "area_k_prime": s(&c.area_k_prime),
        "mixed_area": s(&c.mixed),
        "lhs": s(&c.lhs),
        "minkowski_gap": s(&c.gap),
        "verified": c.verified(),
    })
}

pub fn experiment_report<T: Scalar>(r: &ExperimentReport<T>) -> Value {
    json!({
        "seed": r.seed,
        "ring": r.ring.tag(),
        "trials": r.trials,
        "disc_bh_area": pi(&r.disc_bh_area),
        "disc_alpha_area": pi(&r.disc_alpha_area),
        "min_gap": r.min_gap.as_ref().map(pi),
        "alpha_below_bh": r.alpha_below_bh,
        "disc_equality": r.disc_equality,
        "assumption": ExperimentReport::<T>::ASSUMPTION,
        "records": r.records.iter().map(|t| json!({
            "kind": t.kind,
            "bh_area": pi(&t.bh_area),
            "alpha_area": pi(&t.alpha_area),
            "gap": pi(&t.gap),
            "alpha_covers_disc": t.alpha_covers_disc,
        })).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

pub fn mu_to_json<T: Scalar>(mu: &MuCoefficients<T>) -> Value {
    Value::Array(
        mu.entries()
            .map(|(t, c)| json!([t.iter().map(|i| i + 1).collect::<Vec<_>>(), s(c)]))
            .collect(),
    )
}

pub fn mu_search_report<T: Scalar>(r: &MuSearchReport<T>) -> Value {
    let (status, sign, witness, certificate) = match &r.status {
        MuSearchStatus::SampleFeasible { sign, witness } => ("sample-feasible", Some(*sign), Some(mu_to_json(witness)), None),
        MuSearchStatus::SampleInfeasible { certificates } => (
            "sample-infeasible",
            None,
            None,
            Some(json!({"plus": row(&certificates[0]), "minus": row(&certificates[1])})),
        ),
    };
    json!({
        "k": r.k,
        "n": r.n,
        "seed": r.seed,
        "n_samples": r.n_samples,
        "status": status,
        "sign": sign,
        "witness": witness,
        "certificate": certificate,
        "rounds": r.rounds,
        "n_constraints": r.n_constraints,
        "revalidation_samples": r.revalidation_samples,
        "revalidation_violations": r.revalidation_violations,
        "disclaimer": MuSearchReport::<T>::DISCLAIMER,
    })
}

/// Pretty JSON with a trailing newline; key order is deterministic.
pub fn render(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("values are serializable");
    out.push('\n');
    out
}

//! Report rendering: every command produces one deterministic report,
//! serialized either as human-readable text or as a versioned JSON
//! document. JSON keys are sorted (BTreeMap-backed), so byte-for-byte
//! reproducibility follows from deterministic inputs.

use serde_json::{json, Value};

use claw::algebroid::AxiomVerdict;
use claw::constructions::{
    ComplexPoissonReport, MatchedPairReport, PullbackReport, VectorFieldCase,
};
use claw::invariants::{PointwiseReport, ScanReport, SubspaceBasis};
use claw::symexpr::Point;

pub const SCHEMA_VERSION: u64 = 1;

pub fn point_str(p: &Point) -> String {
    p.to_string()
}

pub fn basis_value(b: &SubspaceBasis) -> Value {
    json!({
        "ambient_dim": b.ambient_dim,
        "dim": b.dim(),
        "field": match b.field {
            claw::invariants::FieldKind::Real => "real",
            claw::invariants::FieldKind::Complex => "complex",
        },
        "vectors": b.to_strings(),
    })
}

pub fn verdict_value(v: &AxiomVerdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

pub fn verdict_text(v: &AxiomVerdict, out: &mut String) {
    out.push_str(&format!("classification: {}\n", v.label()));
    out.push_str("  leibniz: holds by construction\n");
    out.push_str(&format!(
        "  anchor morphism: {}\n",
        if v.anchor_morphism.holds {
            "holds"
        } else {
            "fails"
        }
    ));
    if let Some(w) = &v.anchor_morphism.witness {
        out.push_str(&format!(
            "    witness: [{}] with defect {}\n",
            w.sections.join(", "),
            w.defect
        ));
    }
    out.push_str(&format!(
        "  jacobi on frames: {}\n",
        if v.jacobi_frames.holds {
            "holds"
        } else {
            "fails"
        }
    ));
    out.push_str(&format!(
        "  jacobi on random sections: {}\n",
        if v.jacobi_sections.holds {
            "holds"
        } else {
            "fails"
        }
    ));
    if let Some(w) = &v.jacobi_sections.witness {
        out.push_str(&format!(
            "    witness: [{}] with defect {}\n",
            w.sections.join(", "),
            w.defect
        ));
    }
}

pub fn pointwise_value(r: &PointwiseReport) -> Value {
    json!({
        "point": point_str(&r.point),
        "real_rank": r.real_rank,
        "dim_delta": r.dim_delta,
        "dim_d": r.dim_d,
        "dim_isotropy_complex": r.dim_isotropy_complex,
        "dim_amin_complex": r.dim_amin_complex,
        "type": r.type_,
        "class": r.class,
        "order": r.order,
        "bases": {
            "real_elements": basis_value(&r.real_basis),
            "delta": basis_value(&r.delta_basis),
            "d": basis_value(&r.d_basis),
            "isotropy": basis_value(&r.isotropy_basis),
            "a_min": basis_value(&r.amin_basis),
        },
        "identity_checks": r
            .identity_checks
            .iter()
            .map(|(name, ok)| json!({"name": name, "holds": ok}))
            .collect::<Vec<_>>(),
    })
}

pub fn pointwise_text(r: &PointwiseReport, out: &mut String) {
    out.push_str(&format!("point {}\n", point_str(&r.point)));
    out.push_str(&format!(
        "  real_rank={} type={} class={} order={}\n",
        r.real_rank, r.type_, r.class, r.order
    ));
    out.push_str(&format!(
        "  dim Delta={} dim D={} dim g(A)={} dim A_min={}\n",
        r.dim_delta, r.dim_d, r.dim_isotropy_complex, r.dim_amin_complex
    ));
    out.push_str(&format!("  A^real basis: {}\n", r.real_basis));
    for (name, ok) in &r.identity_checks {
        if !ok {
            out.push_str(&format!("  IDENTITY VIOLATED: {}\n", name));
        }
    }
}

pub fn scan_value(r: &ScanReport) -> Value {
    let strata: Vec<Value> = r
        .strata
        .iter()
        .map(|(&(rr, ty, cl, or), points)| {
            json!({
                "real_rank": rr,
                "type": ty,
                "class": cl,
                "order": or,
                "points": points.iter().map(point_str).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "points_scanned": r.reports.len(),
        "pole_points": r.pole_points.iter().map(point_str).collect::<Vec<_>>(),
        "strata": strata,
        "constant_real_rank_on_sample": r.constant_real_rank,
        "cr_on_sample": r.cr_on_sample,
        "all_identities_hold": r.all_identities_hold,
    })
}

pub fn scan_text(r: &ScanReport, out: &mut String) {
    out.push_str(&format!("scanned {} points", r.reports.len()));
    if !r.pole_points.is_empty() {
        let poles: Vec<String> = r.pole_points.iter().map(point_str).collect();
        out.push_str(&format!(
            " ({} poles skipped: {})",
            poles.len(),
            poles.join(" ")
        ));
    }
    out.push('\n');
    for (&(rr, ty, cl, or), points) in &r.strata {
        out.push_str(&format!(
            "stratum real_rank={} type={} class={} order={}: {} points\n",
            rr,
            ty,
            cl,
            or,
            points.len()
        ));
    }
    out.push_str(&format!(
        "constant real rank on sample: {}\n",
        if r.constant_real_rank { "yes" } else { "no" }
    ));
    out.push_str(&format!(
        "CR on sample (real rank = 0): {}\n",
        if r.cr_on_sample { "yes" } else { "no" }
    ));
    out.push_str(&format!(
        "identity suite: {}\n",
        if r.all_identities_hold {
            "all hold"
        } else {
            "VIOLATIONS FOUND"
        }
    ));
}

pub fn matched_pair_value(r: &MatchedPairReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn matched_pair_text(r: &MatchedPairReport, out: &mut String) {
    out.push_str(&format!("verdict: {}\n", r.verdict));
    out.push_str(&format!(
        "  commute: frames {} / sections {}\n",
        yesno(r.commute_frames),
        yesno(r.commute_sections)
    ));
    out.push_str(&format!(
        "  jacobiators equal: {}\n",
        yesno(r.jacobiators_equal)
    ));
    out.push_str(&format!(
        "  anchor condition: {}\n",
        yesno(r.anchor_condition)
    ));
    out.push_str(&format!(
        "  anchor defects equal: {}\n",
        yesno(r.anchor_defects_equal)
    ));
    for w in &r.witnesses {
        out.push_str(&format!(
            "  witness [{}]: sections [{}], defect {}\n",
            w.check,
            w.sections.join(", "),
            w.defect
        ));
    }
}

pub fn vf_case_value(c: &VectorFieldCase, point: &Point) -> Value {
    json!({
        "point": point_str(point),
        "case": format!("{}", c.case_id),
        "real_rank": c.real_rank,
        "delta_basis": basis_value(&c.delta_basis),
    })
}

pub fn poisson_value(r: &ComplexPoissonReport) -> Value {
    json!({
        "is_complex_poisson": r.is_poisson,
        "matched_pair_route": matched_pair_value(&r.matched_pair),
        "schouten_route": {
            "vanishes": r.schouten_witness.is_none(),
            "witness_triple": r.schouten_witness.map(|(a, b, c)| vec![a, b, c]),
        },
    })
}

pub fn pullback_value(r: &PullbackReport) -> Value {
    json!({
        "fiber_basis": basis_value(&r.fiber_basis),
        "fiber_dim": r.fiber_basis.dim(),
        "transversal": r.transversal,
        "invariants": pointwise_value(&r.invariants),
        "lemma_delta_dims": r.lemma_delta_dims.map(|(a, b)| vec![a, b]),
    })
}

pub fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Wraps a command payload in the versioned report envelope.
pub fn envelope(command: &str, seed: u64, trials: usize, payload: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "trials": trials,
        "report": payload,
    })
}

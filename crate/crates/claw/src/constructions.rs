//! Constructions on charted algebroids: complex sums of matched pairs and
//! their decomposition, conjugation, complexification, the rank-1 algebroid
//! of a complex vector field, bivector (Poisson) algebroids on the
//! cotangent frame, fiberwise-linear bivector compatibility, and pointwise
//! pullbacks along maps of charts.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebroid::{ChartedAlgebroid, FailureWitness, Scalars, Section};
use crate::error::{Error, Result};
use crate::geometry::{
    bivector_bracket_oneforms, bivector_sharp, generating_family, lie_bracket_vf,
    schouten_trilinear, schouten_witness, Bivector, OneForm, VectorField,
};
use crate::invariants::{
    pointwise_from_anchor, AnchorAtPoint, FieldKind, PointwiseReport, SubspaceBasis,
};
use crate::linalg::{rank, right_kernel, Subspace};
use crate::symexpr::{parse_expr, Chart, GaussianRational, Point, RationalExpr};

// --- complex sums and matched pairs ----------------------------------------

/// Builds the complex algebroid on the complexified bundle from two real
/// skew-algebroid structures on the same bundle:
/// structure c = c¹ + i·c², anchor ρ(e_k) = ρ₁(e_k) + i·ρ₂(e_k).
/// The Leibniz identity holds automatically for the result.
pub fn complex_sum(a1: &ChartedAlgebroid, a2: &ChartedAlgebroid) -> Result<ChartedAlgebroid> {
    check_pair_shapes(a1, a2)?;
    if a1.scalars() != Scalars::Real || a2.scalars() != Scalars::Real {
        return Err(Error::ShapeMismatch(
            "complex sum takes two real-scalar algebroids".to_string(),
        ));
    }
    let chart = a1.chart().clone();
    let i = RationalExpr::i(&chart);
    let anchor = a1
        .anchor()
        .iter()
        .zip(a2.anchor())
        .map(|(r1, r2)| {
            r1.iter()
                .zip(r2)
                .map(|(e1, e2)| e1.add(&e2.mul(&i)))
                .collect()
        })
        .collect();
    let mut keys: Vec<(usize, usize)> = a1.structure().keys().copied().collect();
    for k in a2.structure().keys() {
        if !keys.contains(k) {
            keys.push(*k);
        }
    }
    let mut structure = BTreeMap::new();
    for (ki, kj) in keys {
        let c1 = a1.frame_bracket(ki, kj);
        let c2 = a2.frame_bracket(ki, kj);
        let coeffs: Vec<RationalExpr> = c1
            .coefficients()
            .iter()
            .zip(c2.coefficients())
            .map(|(e1, e2)| e1.add(&e2.mul(&i)))
            .collect();
        structure.insert((ki, kj), coeffs);
    }
    ChartedAlgebroid::new(chart, a1.rank(), Scalars::Complex, anchor, structure)
}

/// Reads the real and imaginary parts off the frame data of a complex
/// algebroid: A1 = (Re structure, Re anchor), A2 = (Im parts). The inverse
/// of `complex_sum` on frame data.
pub fn decompose_complexified(ac: &ChartedAlgebroid) -> (ChartedAlgebroid, ChartedAlgebroid) {
    let chart = ac.chart().clone();
    let part = |imag: bool| -> ChartedAlgebroid {
        let anchor = ac
            .anchor()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| if imag { e.im_part() } else { e.re_part() })
                    .collect()
            })
            .collect();
        let structure: BTreeMap<(usize, usize), Vec<RationalExpr>> = ac
            .structure()
            .iter()
            .map(|(&k, coeffs)| {
                (
                    k,
                    coeffs
                        .iter()
                        .map(|e| if imag { e.im_part() } else { e.re_part() })
                        .collect(),
                )
            })
            .collect();
        ChartedAlgebroid::new(chart.clone(), ac.rank(), Scalars::Real, anchor, structure)
            .expect("real/imaginary parts keep the shape")
    };
    (part(false), part(true))
}

/// The conjugate algebroid: on a real frame, the conjugate scalar action
/// turns into coefficientwise conjugation of the anchor and structure
/// functions. An involution preserving the classification.
pub fn conjugate(a: &ChartedAlgebroid) -> ChartedAlgebroid {
    let anchor = a
        .anchor()
        .iter()
        .map(|row| row.iter().map(|e| e.conj()).collect())
        .collect();
    let structure = a
        .structure()
        .iter()
        .map(|(&k, coeffs)| (k, coeffs.iter().map(|e| e.conj()).collect()))
        .collect();
    ChartedAlgebroid::new(a.chart().clone(), a.rank(), a.scalars(), anchor, structure)
        .expect("conjugation keeps the shape")
}

/// Reinterprets a real algebroid over complex scalars; equals
/// `complex_sum(a, zero)`.
pub fn complexify(a: &ChartedAlgebroid) -> Result<ChartedAlgebroid> {
    if a.scalars() != Scalars::Real {
        return Err(Error::ShapeMismatch(
            "complexify takes a real-scalar algebroid".to_string(),
        ));
    }
    ChartedAlgebroid::new(
        a.chart().clone(),
        a.rank(),
        Scalars::Complex,
        a.anchor().to_vec(),
        a.structure().clone(),
    )
}

/// Verdict of the matched-pair test: the complex sum is a CLA exactly for
/// matched pairs, an almost CLA when only the anchor identity holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchedPairVerdict {
    MatchedPair,
    AlmostOnly,
    Fails,
}

impl fmt::Display for MatchedPairVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchedPairVerdict::MatchedPair => write!(f, "matched pair"),
            MatchedPairVerdict::AlmostOnly => write!(f, "almost only"),
            MatchedPairVerdict::Fails => write!(f, "fails"),
        }
    }
}

/// Outcome of the matched-pair identities, frame level and random section
/// level reported separately (the commuting identity is not tensorial, so
/// neither level implies the other).
///
/// The anchor of the complex sum preserves brackets iff `anchor_condition`
/// (the cross identity on the imaginary part) and `anchor_defects_equal`
/// (equal anchor-morphism defects of the two skew-algebroids, the real
/// part) hold together; either alone is not enough.
#[derive(Clone, Debug, Serialize)]
pub struct MatchedPairReport {
    pub commute_frames: bool,
    pub commute_sections: bool,
    pub jacobiators_equal: bool,
    pub anchor_condition: bool,
    pub anchor_defects_equal: bool,
    pub verdict: MatchedPairVerdict,
    pub witnesses: Vec<FailureWitness>,
}

impl MatchedPairReport {
    /// Whether the complex sum of the pair is at least an almost CLA.
    pub fn sum_is_almost(&self) -> bool {
        self.anchor_condition && self.anchor_defects_equal
    }
}

fn check_pair_shapes(a1: &ChartedAlgebroid, a2: &ChartedAlgebroid) -> Result<()> {
    if a1.chart() != a2.chart() {
        return Err(Error::ChartMismatch(format!(
            "{} vs {}",
            a1.chart(),
            a2.chart()
        )));
    }
    if a1.rank() != a2.rank() {
        return Err(Error::ShapeMismatch(format!(
            "ranks {} and {} differ",
            a1.rank(),
            a2.rank()
        )));
    }
    Ok(())
}

/// The cyclic commuting defect ([a,[b,c]₁]₂ + c.p.) + ([a,[b,c]₂]₁ + c.p.).
fn commute_defect(
    a1: &ChartedAlgebroid,
    a2: &ChartedAlgebroid,
    a: &Section,
    b: &Section,
    c: &Section,
) -> Result<Section> {
    let mut acc = Section::zero(a1.chart(), a1.rank());
    let cyc = [(a, b, c), (b, c, a), (c, a, b)];
    for (x, y, z) in cyc {
        acc = acc.add(&a2.bracket_sections(x, &a1.bracket_sections(y, z)?)?);
        acc = acc.add(&a1.bracket_sections(x, &a2.bracket_sections(y, z)?)?);
    }
    Ok(acc)
}

/// The cross anchor identity defect:
/// ρ₁[a,b]₂ + ρ₂[a,b]₁ − [ρ₂(a),ρ₁(b)] − [ρ₁(a),ρ₂(b)].
fn anchor_condition_defect(
    a1: &ChartedAlgebroid,
    a2: &ChartedAlgebroid,
    a: &Section,
    b: &Section,
) -> Result<VectorField> {
    let lhs = a1
        .anchor_apply(&a2.bracket_sections(a, b)?)?
        .add(&a2.anchor_apply(&a1.bracket_sections(a, b)?)?);
    let rhs = lie_bracket_vf(&a2.anchor_apply(a)?, &a1.anchor_apply(b)?)?
        .add(&lie_bracket_vf(&a1.anchor_apply(a)?, &a2.anchor_apply(b)?)?);
    Ok(lhs.sub(&rhs))
}

/// Difference of the anchor-morphism defects of the two skew-algebroids:
/// (ρ₁[a,b]₁ − [ρ₁a, ρ₁b]) − (ρ₂[a,b]₂ − [ρ₂a, ρ₂b]).
fn anchor_defect_difference(
    a1: &ChartedAlgebroid,
    a2: &ChartedAlgebroid,
    a: &Section,
    b: &Section,
) -> Result<VectorField> {
    let d1 = a1
        .anchor_apply(&a1.bracket_sections(a, b)?)?
        .sub(&lie_bracket_vf(&a1.anchor_apply(a)?, &a1.anchor_apply(b)?)?);
    let d2 = a2
        .anchor_apply(&a2.bracket_sections(a, b)?)?
        .sub(&lie_bracket_vf(&a2.anchor_apply(a)?, &a2.anchor_apply(b)?)?);
    Ok(d1.sub(&d2))
}

/// Tests whether two real skew-algebroids form a complex matched pair:
/// (i) the brackets commute, (ii) the Jacobiators coincide, and (iii) the
/// item-(2) anchor identity, all verified symbolically on frame tuples and
/// on seeded random polynomial-coefficient sections.
pub fn check_matched_pair(
    a1: &ChartedAlgebroid,
    a2: &ChartedAlgebroid,
    seed: u64,
    trials: usize,
) -> Result<MatchedPairReport> {
    check_pair_shapes(a1, a2)?;
    let r = a1.rank();
    let mut witnesses = Vec::new();

    let mut commute_frames = true;
    let mut jac_frames = true;
    'frames: for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let (ei, ej, ek) = (
                    a1.frame_section(i),
                    a1.frame_section(j),
                    a1.frame_section(k),
                );
                if commute_frames {
                    let defect = commute_defect(a1, a2, &ei, &ej, &ek)?;
                    if !defect.is_zero() {
                        commute_frames = false;
                        witnesses.push(FailureWitness {
                            check: "commute (frames)".to_string(),
                            sections: vec![
                                format!("e{}", i + 1),
                                format!("e{}", j + 1),
                                format!("e{}", k + 1),
                            ],
                            defect: defect.to_string(),
                        });
                    }
                }
                if jac_frames {
                    let defect = a1
                        .jacobiator(&ei, &ej, &ek)?
                        .sub(&a2.jacobiator(&ei, &ej, &ek)?);
                    if !defect.is_zero() {
                        jac_frames = false;
                        witnesses.push(FailureWitness {
                            check: "jacobiators equal (frames)".to_string(),
                            sections: vec![
                                format!("e{}", i + 1),
                                format!("e{}", j + 1),
                                format!("e{}", k + 1),
                            ],
                            defect: defect.to_string(),
                        });
                    }
                }
                if !commute_frames && !jac_frames {
                    break 'frames;
                }
            }
        }
    }

    let mut anchor_condition = true;
    let mut anchor_defects_equal = true;
    for i in 0..r {
        for j in (i + 1)..r {
            if anchor_condition {
                let defect =
                    anchor_condition_defect(a1, a2, &a1.frame_section(i), &a1.frame_section(j))?;
                if !defect.is_zero() {
                    anchor_condition = false;
                    witnesses.push(FailureWitness {
                        check: "anchor condition (frames)".to_string(),
                        sections: vec![format!("e{}", i + 1), format!("e{}", j + 1)],
                        defect: defect.to_string(),
                    });
                }
            }
            if anchor_defects_equal {
                let defect =
                    anchor_defect_difference(a1, a2, &a1.frame_section(i), &a1.frame_section(j))?;
                if !defect.is_zero() {
                    anchor_defects_equal = false;
                    witnesses.push(FailureWitness {
                        check: "anchor defects equal (frames)".to_string(),
                        sections: vec![format!("e{}", i + 1), format!("e{}", j + 1)],
                        defect: defect.to_string(),
                    });
                }
            }
            if !anchor_condition && !anchor_defects_equal {
                break;
            }
        }
        if !anchor_condition && !anchor_defects_equal {
            break;
        }
    }

    let mut commute_sections = commute_frames;
    let mut jacobiators_equal = jac_frames;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a = a1.random_section(&mut rng);
        let b = a1.random_section(&mut rng);
        let c = a1.random_section(&mut rng);
        if commute_sections {
            let defect = commute_defect(a1, a2, &a, &b, &c)?;
            if !defect.is_zero() {
                commute_sections = false;
                witnesses.push(FailureWitness {
                    check: "commute (sections)".to_string(),
                    sections: vec![a.to_string(), b.to_string(), c.to_string()],
                    defect: defect.to_string(),
                });
            }
        }
        if jacobiators_equal {
            let defect = a1.jacobiator(&a, &b, &c)?.sub(&a2.jacobiator(&a, &b, &c)?);
            if !defect.is_zero() {
                jacobiators_equal = false;
                witnesses.push(FailureWitness {
                    check: "jacobiators equal (sections)".to_string(),
                    sections: vec![a.to_string(), b.to_string(), c.to_string()],
                    defect: defect.to_string(),
                });
            }
        }
        if anchor_condition {
            let defect = anchor_condition_defect(a1, a2, &a, &b)?;
            if !defect.is_zero() {
                anchor_condition = false;
                witnesses.push(FailureWitness {
                    check: "anchor condition (sections)".to_string(),
                    sections: vec![a.to_string(), b.to_string()],
                    defect: defect.to_string(),
                });
            }
        }
        if anchor_defects_equal {
            let defect = anchor_defect_difference(a1, a2, &a, &b)?;
            if !defect.is_zero() {
                anchor_defects_equal = false;
                witnesses.push(FailureWitness {
                    check: "anchor defects equal (sections)".to_string(),
                    sections: vec![a.to_string(), b.to_string()],
                    defect: defect.to_string(),
                });
            }
        }
        if !commute_sections && !jacobiators_equal && !anchor_condition && !anchor_defects_equal {
            break;
        }
    }

    let verdict = if commute_sections && jacobiators_equal {
        MatchedPairVerdict::MatchedPair
    } else if anchor_condition && anchor_defects_equal {
        MatchedPairVerdict::AlmostOnly
    } else {
        MatchedPairVerdict::Fails
    };
    Ok(MatchedPairReport {
        commute_frames,
        commute_sections,
        jacobiators_equal,
        anchor_condition,
        anchor_defects_equal,
        verdict,
        witnesses,
    })
}

// --- complex vector fields --------------------------------------------------

/// The rank-1 complex algebroid A_Z of a complex vector field: anchor row
/// Z, zero frame bracket; the bracket [f, g] = f L_Z g − g L_Z f is the
/// Leibniz extension.
pub fn vector_field_algebroid(z: &VectorField) -> ChartedAlgebroid {
    ChartedAlgebroid::new(
        z.chart().clone(),
        1,
        Scalars::Complex,
        vec![z.components().to_vec()],
        BTreeMap::new(),
    )
    .expect("rank-1 data is well-shaped")
}

/// The five pointwise cases of the vector-field table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VfCaseId {
    BothZero,
    X1Only,
    X2Only,
    Independent,
    Proportional,
}

impl fmt::Display for VfCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VfCaseId::BothZero => write!(f, "both_zero"),
            VfCaseId::X1Only => write!(f, "X1_only"),
            VfCaseId::X2Only => write!(f, "X2_only"),
            VfCaseId::Independent => write!(f, "independent"),
            VfCaseId::Proportional => write!(f, "proportional"),
        }
    }
}

/// Pointwise classification of A_Z: case, real rank and the Δ basis.
#[derive(Clone, Debug)]
pub struct VectorFieldCase {
    pub case_id: VfCaseId,
    pub real_rank: usize,
    pub delta_basis: SubspaceBasis,
}

/// Evaluates X₁|_m and X₂|_m of Z = X₁ + iX₂ and classifies the point into
/// the five-case table with its real rank {2, 1, 1, 0, 1} and Δ.
pub fn classify_vf_at(z: &VectorField, m: &Point) -> Result<VectorFieldCase> {
    let n = z.chart().dim();
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for comp in z.components() {
        let v = comp.evaluate(m)?;
        x1.push(v.re().clone());
        x2.push(v.im().clone());
    }
    let is_zero = |v: &[BigRational]| v.iter().all(num::Zero::is_zero);
    let to_cx = |v: &[BigRational]| -> Vec<GaussianRational> {
        v.iter()
            .map(|q| GaussianRational::from_real(q.clone()))
            .collect()
    };
    let z1 = is_zero(&x1);
    let z2 = is_zero(&x2);
    let span = |vs: Vec<Vec<GaussianRational>>| {
        SubspaceBasis::from_subspace(&Subspace::from_spanning(vs, n), FieldKind::Real)
    };
    let (case_id, real_rank, delta_basis) = if z1 && z2 {
        (VfCaseId::BothZero, 2, span(vec![]))
    } else if z2 {
        (VfCaseId::X1Only, 1, span(vec![to_cx(&x1)]))
    } else if z1 {
        (VfCaseId::X2Only, 1, span(vec![to_cx(&x2)]))
    } else {
        let stacked = vec![to_cx(&x1), to_cx(&x2)];
        if rank(&stacked) == 2 {
            (VfCaseId::Independent, 0, span(vec![]))
        } else {
            (VfCaseId::Proportional, 1, span(vec![to_cx(&x1)]))
        }
    };
    Ok(VectorFieldCase {
        case_id,
        real_rank,
        delta_basis,
    })
}

// --- bivector (Poisson) algebroids ------------------------------------------

/// The cotangent skew-algebroid (T*M)_π of a bivector: frame dx_k, anchor
/// row k = π♯(dx_k), structure functions from the bracket of coordinate
/// one-forms. Real input with `Scalars::Real` yields the real cotangent
/// skew-algebroid.
pub fn cotangent_algebroid(pi: &Bivector, scalars: Scalars) -> Result<ChartedAlgebroid> {
    if scalars == Scalars::Real && !pi.is_real() {
        return Err(Error::ShapeMismatch(
            "real cotangent algebroid of a complex bivector".to_string(),
        ));
    }
    let chart = pi.chart().clone();
    let n = chart.dim();
    let mut anchor = Vec::with_capacity(n);
    for k in 0..n {
        let sharp = bivector_sharp(pi, &OneForm::frame(&chart, k))?;
        anchor.push(sharp.components().to_vec());
    }
    let mut structure = BTreeMap::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let bracket = bivector_bracket_oneforms(
                pi,
                &OneForm::frame(&chart, j),
                &OneForm::frame(&chart, k),
            )?;
            structure.insert((j, k), bracket.components().to_vec());
        }
    }
    ChartedAlgebroid::new(chart, n, scalars, anchor, structure)
}

/// The complex Poisson candidate algebroid (T*_ℂM)_π.
pub fn poisson_algebroid(pi: &Bivector) -> Result<ChartedAlgebroid> {
    cotangent_algebroid(pi, Scalars::Complex)
}

/// Two-route complex Poisson verdict.
#[derive(Clone, Debug)]
pub struct ComplexPoissonReport {
    pub is_poisson: bool,
    /// Matched-pair route on ((T*M)_{π₁}, (T*M)_{π₂}).
    pub matched_pair: MatchedPairReport,
    /// Schouten route: a triple of generating-family indices where
    /// [π, π](f, g, h) ≠ 0, if any.
    pub schouten_witness: Option<(usize, usize, usize)>,
}

/// Decides whether π = π₁ + iπ₂ is complex Poisson along two independent
/// routes — the matched-pair test on the real cotangent skew-algebroids and
/// the Schouten trilinear test [π, π] = 0 — and insists they agree.
pub fn check_complex_poisson(
    pi: &Bivector,
    seed: u64,
    trials: usize,
) -> Result<ComplexPoissonReport> {
    let pi1 = pi.re_part();
    let pi2 = pi.im_part();
    let a1 = cotangent_algebroid(&pi1, Scalars::Real)?;
    let a2 = cotangent_algebroid(&pi2, Scalars::Real)?;
    let matched_pair = check_matched_pair(&a1, &a2, seed, trials)?;

    let family = generating_family(pi.chart());
    let witness = schouten_witness(pi, pi, &family)?;

    let by_pair = matched_pair.verdict == MatchedPairVerdict::MatchedPair;
    let by_schouten = witness.is_none();
    if by_pair != by_schouten {
        return Err(Error::InternalInconsistency(format!(
            "matched-pair route says {}, Schouten route says {}",
            by_pair, by_schouten
        )));
    }
    Ok(ComplexPoissonReport {
        is_poisson: by_pair,
        matched_pair,
        schouten_witness: witness,
    })
}

// --- fiberwise-linear bivectors on the dual ---------------------------------

/// Agreement report between the matched-pair test and the fiberwise-linear
/// bivector test on A*.
#[derive(Clone, Debug)]
pub struct FiberwiseCompatReport {
    /// [Π₁, Π₂] vanishes on the linear and basic functions.
    pub bivectors_compatible: bool,
    /// [Π₁, Π₁] − [Π₂, Π₂] vanishes on the linear and basic functions.
    pub jacobiators_match: bool,
    pub matched_pair: MatchedPairReport,
}

/// Builds the fiberwise-linear bivector of a skew-algebroid on the dual
/// chart (x_1, …, x_n, ξ_1, …, ξ_r) from the defining relations
/// {ξ_j, ξ_k} = Σ c_{jk}^l ξ_l, {ξ_k, x_i} = ρ(e_k)(x_i), {x_i, x_j} = 0.
fn fiberwise_bivector(a: &ChartedAlgebroid, dual: &Chart) -> Result<Bivector> {
    let n = a.chart().dim();
    let r = a.rank();
    let mut upper = BTreeMap::new();
    // Π^{x_i, ξ_k} = {x_i, ξ_k} = −ρ(e_k)(x_i)
    for i in 0..n {
        for k in 0..r {
            let entry = a.anchor()[k][i].extend_to(dual)?.neg();
            if !entry.is_zero() {
                upper.insert((i, n + k), entry);
            }
        }
    }
    // Π^{ξ_j, ξ_k} = Σ_l c_{jk}^l ξ_l
    for (&(j, k), coeffs) in a.structure() {
        let mut entry = RationalExpr::zero(dual);
        for (l, c) in coeffs.iter().enumerate() {
            entry = entry.add(
                &c.extend_to(dual)?
                    .mul(&RationalExpr::coordinate_index(dual, n + l)),
            );
        }
        if !entry.is_zero() {
            upper.insert((n + j, n + k), entry);
        }
    }
    Bivector::new(dual.clone(), upper)
}

fn dual_chart(a: &ChartedAlgebroid) -> Result<Chart> {
    let mut names: Vec<String> = a.chart().names().to_vec();
    for k in 1..=a.rank() {
        let mut name = format!("xi{}", k);
        while names.contains(&name) {
            name.insert(0, '_');
        }
        names.push(name);
    }
    Chart::new(names)
}

/// Realizes both skew-algebroids as fiberwise-linear bivectors on A* and
/// tests [Π₁, Π₂] = 0 and [Π₁, Π₁] = [Π₂, Π₂] on the generating family of
/// linear and basic functions; the outcome must agree with the
/// matched-pair verdict on the same pair.
pub fn fiberwise_bivector_compat(
    a1: &ChartedAlgebroid,
    a2: &ChartedAlgebroid,
    seed: u64,
    trials: usize,
) -> Result<FiberwiseCompatReport> {
    check_pair_shapes(a1, a2)?;
    let dual = dual_chart(a1)?;
    let p1 = fiberwise_bivector(a1, &dual)?;
    let p2 = fiberwise_bivector(a2, &dual)?;

    // Linear functions l_{e_k} = ξ_k and basic functions x_i: exactly the
    // coordinates of the dual chart.
    let family: Vec<RationalExpr> = (0..dual.dim())
        .map(|k| RationalExpr::coordinate_index(&dual, k))
        .collect();

    // The trilinear sums are alternating by construction, so strictly
    // increasing triples exhaust the family.
    let mut bivectors_compatible = true;
    let mut jacobiators_match = true;
    'outer: for a in 0..family.len() {
        for b in (a + 1)..family.len() {
            for c in (b + 1)..family.len() {
                let (f, g, h) = (&family[a], &family[b], &family[c]);
                if bivectors_compatible && !schouten_trilinear(&p1, &p2, f, g, h)?.is_zero() {
                    bivectors_compatible = false;
                }
                if jacobiators_match {
                    let d11 = schouten_trilinear(&p1, &p1, f, g, h)?;
                    let d22 = schouten_trilinear(&p2, &p2, f, g, h)?;
                    if !d11.sub(&d22).is_zero() {
                        jacobiators_match = false;
                    }
                }
                if !bivectors_compatible && !jacobiators_match {
                    break 'outer;
                }
            }
        }
    }

    let matched_pair = check_matched_pair(a1, a2, seed, trials)?;
    if bivectors_compatible != matched_pair.commute_sections {
        return Err(Error::InternalInconsistency(format!(
            "bivector compatibility {} disagrees with commuting verdict {}",
            bivectors_compatible, matched_pair.commute_sections
        )));
    }
    if jacobiators_match != matched_pair.jacobiators_equal {
        return Err(Error::InternalInconsistency(format!(
            "fiberwise Jacobiator comparison {} disagrees with section-level verdict {}",
            jacobiators_match, matched_pair.jacobiators_equal
        )));
    }
    Ok(FiberwiseCompatReport {
        bivectors_compatible,
        jacobiators_match,
        matched_pair,
    })
}

// --- pointwise pullbacks ------------------------------------------------------

/// A map between charts, given by one target-coordinate expression per
/// component, in the source coordinates.
#[derive(Clone, Debug)]
pub struct ChartMap {
    source: Chart,
    target: Chart,
    components: Vec<RationalExpr>,
}

impl ChartMap {
    pub fn new(source: Chart, target: Chart, components: Vec<RationalExpr>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} components for target chart of dimension {}",
                components.len(),
                target.dim()
            )));
        }
        for c in &components {
            if c.chart() != &source {
                return Err(Error::ChartMismatch(
                    "map component not over the source chart".to_string(),
                ));
            }
            if !c.is_real() {
                return Err(Error::ShapeMismatch(
                    "chart maps must have real components".to_string(),
                ));
            }
        }
        Ok(ChartMap {
            source,
            target,
            components,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        let components = (0..chart.dim())
            .map(|k| RationalExpr::coordinate_index(chart, k))
            .collect();
        ChartMap {
            source: chart.clone(),
            target: chart.clone(),
            components,
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.components
    }

    /// Image of a source point.
    pub fn apply(&self, m: &Point) -> Result<Point> {
        let mut coords = Vec::with_capacity(self.components.len());
        for c in &self.components {
            coords.push(c.evaluate(m)?.re().clone());
        }
        Ok(Point::new(coords))
    }

    /// Jacobian at a source point, target_dim × source_dim over ℚ.
    pub fn jacobian_at(&self, m: &Point) -> Result<Vec<Vec<BigRational>>> {
        let p = self.source.dim();
        let mut rows = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let mut row = Vec::with_capacity(p);
            for s in 0..p {
                row.push(c.differentiate_index(s).evaluate(m)?.re().clone());
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// JSON schema: `source_chart`, `target_chart`, `components`.
    pub fn from_json(src: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct MapFile {
            source_chart: Vec<String>,
            target_chart: Vec<String>,
            components: Vec<String>,
        }
        let file: MapFile = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let source = Chart::new(file.source_chart)?;
        let target = Chart::new(file.target_chart)?;
        let components = file
            .components
            .iter()
            .map(|c| parse_expr(c, &source))
            .collect::<Result<Vec<_>>>()?;
        ChartMap::new(source, target, components)
    }
}

/// The pointwise pullback fiber and its derived data.
#[derive(Clone, Debug)]
pub struct PullbackReport {
    /// Basis of {(a, v) : ρ(a) = T_ℂφ(v)} ⊆ ℂ^r × ℂ^p at the point.
    pub fiber_basis: SubspaceBasis,
    /// Whether ρ(A) + im T_ℂφ = T_ℂ(target) at φ(m).
    pub transversal: bool,
    /// Invariants of the pullback fiber with anchor pr₂ into T_ℂ,m(source).
    pub invariants: PointwiseReport,
    /// When φ is an immersion at m and transversality holds:
    /// (dim Δ_{φ^!A}, dim(im Tφ ∩ Δ_A)), which the pullback lemma equates.
    pub lemma_delta_dims: Option<(usize, usize)>,
}

/// Solves the fibered product {(a, v) : ρ(a) = T_ℂφ(v)} at a source point
/// exactly, flags transversality, and reports the invariants of the
/// pullback fiber at m.
pub fn pullback_at(a: &ChartedAlgebroid, map: &ChartMap, m: &Point) -> Result<PullbackReport> {
    if map.source().dim() != m.dim() {
        return Err(Error::ShapeMismatch(format!(
            "point of dimension {} in source chart {}",
            m.dim(),
            map.source()
        )));
    }
    if map.target() != a.chart() {
        return Err(Error::ChartMismatch(format!(
            "map targets {}, algebroid lives on {}",
            map.target(),
            a.chart()
        )));
    }
    let target_point = map.apply(m)?;
    let anchor = AnchorAtPoint::evaluate(a, &target_point)?;
    let jac = map.jacobian_at(m)?;
    let r = a.rank();
    let p = map.source().dim();
    let n = a.chart().dim();

    // Kernel of [ρᵀ | −J]: rows indexed by target coordinates, columns by
    // (a_1..a_r, v_1..v_p).
    let mut rows = vec![vec![GaussianRational::zero(); r + p]; n];
    for (i, row) in anchor.rows().iter().enumerate() {
        for (coord, entry) in row.iter().enumerate() {
            rows[coord][i] = entry.clone();
        }
    }
    for (coord, jrow) in jac.iter().enumerate() {
        for (s, entry) in jrow.iter().enumerate() {
            rows[coord][r + s] = GaussianRational::from_real(-entry.clone());
        }
    }
    let kernel = right_kernel(
        &rows,
        r + p,
        &GaussianRational::zero(),
        &GaussianRational::one(),
    );
    let fiber = Subspace::from_spanning(kernel.clone(), r + p);
    let fiber_basis = SubspaceBasis::from_subspace(&fiber, FieldKind::Complex);

    // Transversality: rank [ρᵀ | J] = n.
    let mut span_rows = Vec::with_capacity(r + p);
    for i in 0..r {
        span_rows.push(anchor_row(&anchor, i));
    }
    for s in 0..p {
        span_rows.push(
            jac.iter()
                .map(|row| GaussianRational::from_real(row[s].clone()))
                .collect(),
        );
    }
    let transversal = rank(&span_rows) == n;

    // The pullback fiber as a pointwise anchored space: anchor = pr₂.
    let pullback_rows: Vec<Vec<GaussianRational>> =
        fiber.basis().iter().map(|row| row[r..].to_vec()).collect();
    let pullback_anchor = AnchorAtPoint::from_rows(pullback_rows, p);
    let invariants = pointwise_from_anchor(pullback_anchor, m.clone(), p, fiber.dim());

    // Pullback lemma, immersion case: dim Δ_{φ^!A} = dim(im Tφ ∩ Δ_A).
    let jac_rank = {
        let jac_cx: Vec<Vec<GaussianRational>> = jac
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| GaussianRational::from_real(q.clone()))
                    .collect()
            })
            .collect();
        rank(&jac_cx)
    };
    let lemma_delta_dims = if jac_rank == p && transversal {
        let image_tphi = Subspace::from_spanning(
            (0..p)
                .map(|s| {
                    jac.iter()
                        .map(|row| GaussianRational::from_real(row[s].clone()))
                        .collect()
                })
                .collect(),
            n,
        );
        let real_elems = anchor.real_elements();
        let delta_a = anchor.delta(&real_elems);
        let meet = image_tphi.intersect(&delta_a.subspace());
        Some((invariants.dim_delta, meet.dim()))
    } else {
        None
    };

    Ok(PullbackReport {
        fiber_basis,
        transversal,
        invariants,
        lemma_delta_dims,
    })
}

fn anchor_row(anchor: &AnchorAtPoint, i: usize) -> Vec<GaussianRational> {
    // AnchorAtPoint stores rows ρ(e_i); expose a copy for matrix assembly.
    anchor.rows()[i].clone()
}

// --- bivector file format ----------------------------------------------------

/// JSON schema for bivectors: `chart` plus an upper-triangular component
/// map from "j,k" (1-based, j < k) to expression strings.
#[derive(Serialize, Deserialize)]
struct BivectorFile {
    chart: Vec<String>,
    #[serde(default)]
    components: BTreeMap<String, String>,
}

pub fn bivector_from_json(src: &str) -> Result<Bivector> {
    let file: BivectorFile = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    let chart = Chart::new(file.chart)?;
    let mut upper = BTreeMap::new();
    for (key, expr) in &file.components {
        let (j, k) = crate::algebroid::parse_pair_key(key)?;
        upper.insert((j, k), parse_expr(expr, &chart)?);
    }
    Bivector::new(chart, upper)
}

pub fn bivector_to_json(pi: &Bivector) -> String {
    let file = BivectorFile {
        chart: pi.chart().names().to_vec(),
        components: pi
            .upper()
            .iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|(&(j, k), e)| (format!("{},{}", j + 1, k + 1), e.to_string()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("schema serializes")
}

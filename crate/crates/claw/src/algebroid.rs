//! The core data model: anchored vector bundles with bracket in a single
//! chart, the Leibniz extension of the frame bracket to arbitrary sections,
//! and the axiom classifiers (skew-algebroid / almost / Lie).
//!
//! A rank-r algebroid over an n-dimensional chart is determined by the
//! anchor matrix (row i = ρ(e_i) in coordinates) and the structure
//! functions c_{ij}^k with [e_i, e_j] = Σ_k c_{ij}^k e_k for i < j.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lie_bracket_vf, VectorField};
use crate::symexpr::{parse_expr, Chart, GaussianRational, RationalExpr};

/// Scalar field of the bundle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scalars {
    Real,
    Complex,
}

impl fmt::Display for Scalars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalars::Real => write!(f, "real"),
            Scalars::Complex => write!(f, "complex"),
        }
    }
}

/// An anchored vector bundle with bracket, in one chart.
#[derive(Clone, PartialEq, Debug)]
pub struct ChartedAlgebroid {
    chart: Chart,
    rank: usize,
    scalars: Scalars,
    anchor: Vec<Vec<RationalExpr>>,
    structure: BTreeMap<(usize, usize), Vec<RationalExpr>>,
}

/// A section written in the standard frame: a = Σ_i f_i e_i.
#[derive(Clone, PartialEq, Debug)]
pub struct Section {
    coefficients: Vec<RationalExpr>,
}

impl Section {
    pub fn new(coefficients: Vec<RationalExpr>) -> Self {
        Section { coefficients }
    }

    pub fn zero(chart: &Chart, rank: usize) -> Self {
        Section {
            coefficients: vec![RationalExpr::zero(chart); rank],
        }
    }

    pub fn frame(chart: &Chart, rank: usize, k: usize) -> Self {
        let mut s = Section::zero(chart, rank);
        s.coefficients[k] = RationalExpr::one(chart);
        s
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[RationalExpr] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_real())
    }

    pub fn add(&self, other: &Section) -> Section {
        Section {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, f: &RationalExpr) -> Section {
        Section {
            coefficients: self.coefficients.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn re_part(&self) -> Section {
        Section {
            coefficients: self.coefficients.iter().map(|c| c.re_part()).collect(),
        }
    }

    pub fn im_part(&self) -> Section {
        Section {
            coefficients: self.coefficients.iter().map(|c| c.im_part()).collect(),
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(format!("e{}", k + 1));
            } else {
                parts.push(format!("({})*e{}", c, k + 1));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Outcome of one symbolic identity check, with the first violation kept as
/// a witness.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witness: Option<FailureWitness>,
}

impl CheckOutcome {
    fn ok() -> Self {
        CheckOutcome {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: FailureWitness) -> Self {
        CheckOutcome {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// The sections violating an identity, together with the nonzero defect.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FailureWitness {
    pub check: String,
    pub sections: Vec<String>,
    pub defect: String,
}

/// Classification of the bracket data.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Anchor preserves brackets and the Jacobi identity holds.
    LieAlgebroid,
    /// Anchor preserves brackets, Jacobi fails.
    Almost,
    /// Anchor does not preserve brackets.
    SkewAlgebroid,
}

/// Full axiom report. The Leibniz identity holds by construction of the
/// bracket extension and is recorded for reporting only.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct AxiomVerdict {
    pub scalars: Scalars,
    pub leibniz_holds: bool,
    pub anchor_morphism: CheckOutcome,
    pub jacobi_frames: CheckOutcome,
    pub jacobi_sections: CheckOutcome,
    pub classification: Classification,
}

impl AxiomVerdict {
    pub fn jacobi_holds(&self) -> bool {
        self.jacobi_frames.holds && self.jacobi_sections.holds
    }

    pub fn is_lie(&self) -> bool {
        self.classification == Classification::LieAlgebroid
    }

    /// Human name of the classification: CLA / RLA / almost / skew.
    pub fn label(&self) -> String {
        let lie = match self.scalars {
            Scalars::Complex => "CLA",
            Scalars::Real => "RLA",
        };
        match self.classification {
            Classification::LieAlgebroid => lie.to_string(),
            Classification::Almost => format!("almost {}", lie),
            Classification::SkewAlgebroid => match self.scalars {
                Scalars::Complex => "complex skew-algebroid".to_string(),
                Scalars::Real => "skew-algebroid".to_string(),
            },
        }
    }
}

impl ChartedAlgebroid {
    pub fn new(
        chart: Chart,
        rank: usize,
        scalars: Scalars,
        anchor: Vec<Vec<RationalExpr>>,
        structure: BTreeMap<(usize, usize), Vec<RationalExpr>>,
    ) -> Result<Self> {
        if anchor.len() != rank {
            return Err(Error::ShapeMismatch(format!(
                "anchor has {} rows for rank {}",
                anchor.len(),
                rank
            )));
        }
        for row in &anchor {
            if row.len() != chart.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "anchor row has {} entries for chart dimension {}",
                    row.len(),
                    chart.dim()
                )));
            }
            for e in row {
                if e.chart() != &chart {
                    return Err(Error::ChartMismatch(format!(
                        "anchor entry on chart {}, expected {}",
                        e.chart(),
                        chart
                    )));
                }
                if scalars == Scalars::Real && !e.is_real() {
                    return Err(Error::ShapeMismatch(
                        "real-scalar algebroid with complex anchor entry".to_string(),
                    ));
                }
            }
        }
        // Canonical storage: all-zero entries are dropped, so frame data
        // compares structurally.
        let structure: BTreeMap<(usize, usize), Vec<RationalExpr>> = structure
            .into_iter()
            .filter(|(_, coeffs)| coeffs.iter().any(|e| !e.is_zero()))
            .collect();
        for (&(i, j), coeffs) in &structure {
            if i >= j || j >= rank {
                return Err(Error::ShapeMismatch(format!(
                    "structure key ({}, {}) out of range for rank {}",
                    i, j, rank
                )));
            }
            if coeffs.len() != rank {
                return Err(Error::ShapeMismatch(format!(
                    "structure entry ({}, {}) has {} coefficients for rank {}",
                    i,
                    j,
                    coeffs.len(),
                    rank
                )));
            }
            for e in coeffs {
                if e.chart() != &chart {
                    return Err(Error::ChartMismatch(
                        "structure entry on a different chart".to_string(),
                    ));
                }
                if scalars == Scalars::Real && !e.is_real() {
                    return Err(Error::ShapeMismatch(
                        "real-scalar algebroid with complex structure function".to_string(),
                    ));
                }
            }
        }
        Ok(ChartedAlgebroid {
            chart,
            rank,
            scalars,
            anchor,
            structure,
        })
    }

    /// The tangent algebroid: identity anchor, zero structure functions.
    pub fn tangent(chart: &Chart, scalars: Scalars) -> Self {
        let n = chart.dim();
        let mut anchor = Vec::with_capacity(n);
        for k in 0..n {
            let mut row = vec![RationalExpr::zero(chart); n];
            row[k] = RationalExpr::one(chart);
            anchor.push(row);
        }
        ChartedAlgebroid {
            chart: chart.clone(),
            rank: n,
            scalars,
            anchor,
            structure: BTreeMap::new(),
        }
    }

    /// Zero anchor and zero bracket (a bundle of abelian Lie algebras).
    pub fn zero(chart: &Chart, rank: usize, scalars: Scalars) -> Self {
        ChartedAlgebroid {
            chart: chart.clone(),
            rank,
            scalars,
            anchor: vec![vec![RationalExpr::zero(chart); chart.dim()]; rank],
            structure: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }

    pub fn anchor(&self) -> &[Vec<RationalExpr>] {
        &self.anchor
    }

    pub fn structure(&self) -> &BTreeMap<(usize, usize), Vec<RationalExpr>> {
        &self.structure
    }

    /// Structure coefficients of [e_i, e_j] for arbitrary i, j.
    pub fn frame_bracket(&self, i: usize, j: usize) -> Section {
        if i == j {
            return Section::zero(&self.chart, self.rank);
        }
        if i < j {
            match self.structure.get(&(i, j)) {
                Some(coeffs) => Section::new(coeffs.clone()),
                None => Section::zero(&self.chart, self.rank),
            }
        } else {
            let s = self.frame_bracket(j, i);
            Section {
                coefficients: s.coefficients.iter().map(|c| c.neg()).collect(),
            }
        }
    }

    pub fn frame_section(&self, k: usize) -> Section {
        Section::frame(&self.chart, self.rank, k)
    }

    fn check_section(&self, s: &Section) -> Result<()> {
        if s.rank() != self.rank {
            return Err(Error::ShapeMismatch(format!(
                "section of rank {} on an algebroid of rank {}",
                s.rank(),
                self.rank
            )));
        }
        for c in &s.coefficients {
            if c.chart() != &self.chart {
                return Err(Error::ChartMismatch(format!(
                    "section coefficient on chart {}, expected {}",
                    c.chart(),
                    self.chart
                )));
            }
            if self.scalars == Scalars::Real && !c.is_real() {
                return Err(Error::ShapeMismatch(
                    "real-scalar algebroid carries real-coefficient sections".to_string(),
                ));
            }
        }
        Ok(())
    }

    /// The anchor applied to a section: ρ(a) = Σ_i f_i ρ(e_i).
    pub fn anchor_apply(&self, a: &Section) -> Result<VectorField> {
        self.check_section(a)?;
        let mut acc = VectorField::zero(&self.chart);
        for (f, row) in a.coefficients.iter().zip(&self.anchor) {
            if f.is_zero() {
                continue;
            }
            let term =
                VectorField::new(self.chart.clone(), row.iter().map(|e| e.mul(f)).collect())?;
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Leibniz extension of the frame bracket:
    /// [a, b] = Σ f_i g_j [e_i,e_j] + Σ (ρ(a) g_j) e_j − Σ (ρ(b) f_i) e_i.
    pub fn bracket_sections(&self, a: &Section, b: &Section) -> Result<Section> {
        self.check_section(a)?;
        self.check_section(b)?;
        let rho_a = self.anchor_apply(a)?;
        let rho_b = self.anchor_apply(b)?;
        let mut out = Section::zero(&self.chart, self.rank);
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                // (f_i g_j - f_j g_i) c_{ij}^k
                let coef = a.coefficients[i]
                    .mul(&b.coefficients[j])
                    .sub(&a.coefficients[j].mul(&b.coefficients[i]));
                if coef.is_zero() {
                    continue;
                }
                out = out.add(&self.frame_bracket(i, j).scale(&coef));
            }
        }
        for k in 0..self.rank {
            out.coefficients[k] = out.coefficients[k]
                .add(&rho_a.apply(&b.coefficients[k]))
                .sub(&rho_b.apply(&a.coefficients[k]));
        }
        Ok(out)
    }

    /// Jac(a, b, c) = [a, [b, c]] + [b, [c, a]] + [c, [a, b]].
    pub fn jacobiator(&self, a: &Section, b: &Section, c: &Section) -> Result<Section> {
        let t1 = self.bracket_sections(a, &self.bracket_sections(b, c)?)?;
        let t2 = self.bracket_sections(b, &self.bracket_sections(c, a)?)?;
        let t3 = self.bracket_sections(c, &self.bracket_sections(a, b)?)?;
        Ok(t1.add(&t2).add(&t3))
    }

    /// Verifies ρ[a,b] = [ρ(a), ρ(b)] on all frame pairs and on `trials`
    /// seeded random polynomial-coefficient section pairs. The defect is
    /// tensorial, so frame pairs already decide the identity; the random
    /// pairs exercise the Leibniz extension itself.
    pub fn check_anchor_morphism(&self, seed: u64, trials: usize) -> Result<CheckOutcome> {
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                let defect = self.anchor_morphism_defect_frames(i, j)?;
                if !defect.is_zero() {
                    return Ok(CheckOutcome::fail(FailureWitness {
                        check: "anchor-morphism".to_string(),
                        sections: vec![format!("e{}", i + 1), format!("e{}", j + 1)],
                        defect: defect.to_string(),
                    }));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let a = self.random_section(&mut rng);
            let b = self.random_section(&mut rng);
            let lhs = self.anchor_apply(&self.bracket_sections(&a, &b)?)?;
            let rhs = lie_bracket_vf(&self.anchor_apply(&a)?, &self.anchor_apply(&b)?)?;
            let defect = lhs.sub(&rhs);
            if !defect.is_zero() {
                return Ok(CheckOutcome::fail(FailureWitness {
                    check: "anchor-morphism".to_string(),
                    sections: vec![a.to_string(), b.to_string()],
                    defect: defect.to_string(),
                }));
            }
        }
        Ok(CheckOutcome::ok())
    }

    fn anchor_morphism_defect_frames(&self, i: usize, j: usize) -> Result<VectorField> {
        let lhs = self.anchor_apply(&self.frame_bracket(i, j))?;
        let rho_i = self.anchor_apply(&self.frame_section(i))?;
        let rho_j = self.anchor_apply(&self.frame_section(j))?;
        Ok(lhs.sub(&lie_bracket_vf(&rho_i, &rho_j)?))
    }

    fn jacobi_on_frames(&self) -> Result<CheckOutcome> {
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                for k in (j + 1)..self.rank {
                    let jac = self.jacobiator(
                        &self.frame_section(i),
                        &self.frame_section(j),
                        &self.frame_section(k),
                    )?;
                    if !jac.is_zero() {
                        return Ok(CheckOutcome::fail(FailureWitness {
                            check: "jacobi".to_string(),
                            sections: vec![
                                format!("e{}", i + 1),
                                format!("e{}", j + 1),
                                format!("e{}", k + 1),
                            ],
                            defect: jac.to_string(),
                        }));
                    }
                }
            }
        }
        Ok(CheckOutcome::ok())
    }

    fn jacobi_on_random_sections(&self, seed: u64, trials: usize) -> Result<CheckOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..trials {
            let a = self.random_section(&mut rng);
            let b = self.random_section(&mut rng);
            let c = self.random_section(&mut rng);
            let jac = self.jacobiator(&a, &b, &c)?;
            if !jac.is_zero() {
                return Ok(CheckOutcome::fail(FailureWitness {
                    check: "jacobi".to_string(),
                    sections: vec![a.to_string(), b.to_string(), c.to_string()],
                    defect: jac.to_string(),
                }));
            }
        }
        Ok(CheckOutcome::ok())
    }

    /// Runs the anchor-morphism and Jacobi tests and classifies the data.
    /// With exact arithmetic a frame-level Jacobi pass plus anchor-morphism
    /// is a proof (the Jacobiator is then tensorial); the random sections
    /// are reported alongside for the skew case.
    pub fn classify(&self, seed: u64, trials: usize) -> Result<AxiomVerdict> {
        let anchor_morphism = self.check_anchor_morphism(seed, trials)?;
        let jacobi_frames = self.jacobi_on_frames()?;
        let jacobi_sections = if jacobi_frames.holds {
            self.jacobi_on_random_sections(seed, trials)?
        } else {
            CheckOutcome::fail(
                jacobi_frames
                    .witness
                    .clone()
                    .expect("failed check has witness"),
            )
        };
        let classification =
            if anchor_morphism.holds && jacobi_frames.holds && jacobi_sections.holds {
                Classification::LieAlgebroid
            } else if anchor_morphism.holds {
                Classification::Almost
            } else {
                Classification::SkewAlgebroid
            };
        Ok(AxiomVerdict {
            scalars: self.scalars,
            leibniz_holds: true,
            anchor_morphism,
            jacobi_frames,
            jacobi_sections,
            classification,
        })
    }

    /// A random section with polynomial coefficients of degree ≤ 2 and
    /// integer parts in {-2..2}; complex parts only for complex scalars.
    pub fn random_section(&self, rng: &mut ChaCha8Rng) -> Section {
        Section::new(
            (0..self.rank)
                .map(|_| random_polynomial(&self.chart, self.scalars, rng))
                .collect(),
        )
    }
}

/// Random polynomial of total degree ≤ 2 over the chart, with coefficients
/// drawn uniformly from {-2..2} (both parts for complex scalars). Sparse:
/// three monomials are sampled with replacement, which keeps the symbolic
/// identity checks fast without weakening them — with exact arithmetic any
/// nonzero defect polynomial survives.
pub fn random_polynomial(chart: &Chart, scalars: Scalars, rng: &mut ChaCha8Rng) -> RationalExpr {
    let n = chart.dim();
    let mut monomials = vec![RationalExpr::one(chart)];
    for k in 0..n {
        monomials.push(RationalExpr::coordinate_index(chart, k));
    }
    for j in 0..n {
        for k in j..n {
            monomials.push(
                RationalExpr::coordinate_index(chart, j)
                    .mul(&RationalExpr::coordinate_index(chart, k)),
            );
        }
    }
    let mut acc = RationalExpr::zero(chart);
    for _ in 0..3 {
        let m = &monomials[rng.gen_range(0..monomials.len())];
        let re: i64 = rng.gen_range(-2..=2);
        let im: i64 = if scalars == Scalars::Complex {
            rng.gen_range(-2..=2)
        } else {
            0
        };
        if re == 0 && im == 0 {
            continue;
        }
        let c = GaussianRational::new(
            num::BigRational::from_integer(re.into()),
            num::BigRational::from_integer(im.into()),
        );
        acc = acc.add(&m.scale(&c));
    }
    acc
}

// --- JSON file format ---------------------------------------------------

/// On-disk schema: `chart`, `rank`, `scalars`, `anchor` (r×n expression
/// strings) and `structure` mapping "i,j" (1-based, i<j) to r expression
/// strings. Absent structure entries default to zero.
#[derive(Serialize, Deserialize)]
struct AlgebroidFile {
    chart: Vec<String>,
    rank: usize,
    scalars: Scalars,
    anchor: Vec<Vec<String>>,
    #[serde(default)]
    structure: BTreeMap<String, Vec<String>>,
}

impl ChartedAlgebroid {
    pub fn from_json(src: &str) -> Result<Self> {
        let file: AlgebroidFile =
            serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let chart = Chart::new(file.chart)?;
        let mut anchor = Vec::with_capacity(file.anchor.len());
        for row in &file.anchor {
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                out.push(parse_expr(e, &chart)?);
            }
            anchor.push(out);
        }
        let mut structure = BTreeMap::new();
        for (key, coeffs) in &file.structure {
            let (i, j) = parse_pair_key(key)?;
            let mut out = Vec::with_capacity(coeffs.len());
            for e in coeffs {
                out.push(parse_expr(e, &chart)?);
            }
            structure.insert((i, j), out);
        }
        ChartedAlgebroid::new(chart, file.rank, file.scalars, anchor, structure)
    }

    pub fn to_json(&self) -> String {
        let file = AlgebroidFile {
            chart: self.chart.names().to_vec(),
            rank: self.rank,
            scalars: self.scalars,
            anchor: self
                .anchor
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect(),
            structure: self
                .structure
                .iter()
                .filter(|(_, coeffs)| coeffs.iter().any(|e| !e.is_zero()))
                .map(|(&(i, j), coeffs)| {
                    (
                        format!("{},{}", i + 1, j + 1),
                        coeffs.iter().map(|e| e.to_string()).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("schema serializes")
    }
}

/// Parses a 1-based "i,j" key with i < j into 0-based indices.
pub(crate) fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "structure key `{}` is not of the form \"i,j\"",
            key
        )));
    }
    let i: usize = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad index `{}` in structure key", parts[0])))?;
    let j: usize = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad index `{}` in structure key", parts[1])))?;
    if i == 0 || j == 0 || i >= j {
        return Err(Error::Parse(format!(
            "structure key `{}` must be 1-based with i < j",
            key
        )));
    }
    Ok((i - 1, j - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Point;

    fn ch2() -> Chart {
        Chart::new(vec!["x", "y"]).unwrap()
    }

    fn e(src: &str, c: &Chart) -> RationalExpr {
        parse_expr(src, c).unwrap()
    }

    /// The rank-3 bundle of sl(2) Lie algebras (h, e, f) over a chart:
    /// [h,e] = 2e, [h,f] = -2f, [e,f] = h; zero anchor.
    fn sl2_bundle(c: &Chart, scalars: Scalars) -> ChartedAlgebroid {
        let mut structure = BTreeMap::new();
        structure.insert(
            (0, 1),
            vec![RationalExpr::zero(c), e("2", c), RationalExpr::zero(c)],
        );
        structure.insert(
            (0, 2),
            vec![RationalExpr::zero(c), RationalExpr::zero(c), e("-2", c)],
        );
        structure.insert(
            (1, 2),
            vec![
                RationalExpr::one(c),
                RationalExpr::zero(c),
                RationalExpr::zero(c),
            ],
        );
        ChartedAlgebroid::new(
            c.clone(),
            3,
            scalars,
            vec![vec![RationalExpr::zero(c); c.dim()]; 3],
            structure,
        )
        .unwrap()
    }

    #[test]
    fn frame_bracket_and_antisymmetry() {
        let c = ch2();
        let a = sl2_bundle(&c, Scalars::Complex);
        let he = a
            .bracket_sections(&a.frame_section(0), &a.frame_section(1))
            .unwrap();
        assert_eq!(he, a.frame_section(1).scale(&e("2", &c)));
        let eh = a
            .bracket_sections(&a.frame_section(1), &a.frame_section(0))
            .unwrap();
        assert_eq!(eh, a.frame_section(1).scale(&e("-2", &c)));
        // [a, a] = 0
        let s = Section::new(vec![e("x", &c), e("y", &c), e("1", &c)]);
        assert!(a.bracket_sections(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn tangent_bracket_matches_vector_fields() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Real);
        // [x e1, y e2] as sections of TM vs the Lie bracket of x∂x, y∂y
        let a = Section::new(vec![e("x", &c), e("0", &c)]);
        let b = Section::new(vec![e("0", &c), e("y", &c)]);
        let br = t.bracket_sections(&a, &b).unwrap();
        let xa = VectorField::new(c.clone(), vec![e("x", &c), e("0", &c)]).unwrap();
        let yb = VectorField::new(c.clone(), vec![e("0", &c), e("y", &c)]).unwrap();
        let vf = lie_bracket_vf(&xa, &yb).unwrap();
        assert_eq!(br.coefficients(), vf.components());
    }

    #[test]
    fn anchor_apply_cases() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Complex);
        assert!(t.anchor_apply(&Section::zero(&c, 2)).unwrap().is_zero());
        let zero_anchor = sl2_bundle(&c, Scalars::Complex);
        let s = Section::new(vec![e("x", &c), e("1", &c), e("y", &c)]);
        assert!(zero_anchor.anchor_apply(&s).unwrap().is_zero());
    }

    #[test]
    fn leibniz_identity_by_construction() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Complex);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let a = t.random_section(&mut rng);
            let b = t.random_section(&mut rng);
            let f = random_polynomial(&c, Scalars::Complex, &mut rng);
            let lhs = t.bracket_sections(&a, &b.scale(&f)).unwrap();
            let rho_a_f = t.anchor_apply(&a).unwrap().apply(&f);
            let rhs = t
                .bracket_sections(&a, &b)
                .unwrap()
                .scale(&f)
                .add(&b.scale(&rho_a_f));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn classify_standard_examples() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Complex);
        let v = t.classify(0, 10).unwrap();
        assert_eq!(v.classification, Classification::LieAlgebroid);
        assert_eq!(v.label(), "CLA");

        let sl2 = sl2_bundle(&c, Scalars::Complex);
        let v = sl2.classify(0, 10).unwrap();
        assert_eq!(v.classification, Classification::LieAlgebroid);

        let real_t = ChartedAlgebroid::tangent(&c, Scalars::Real);
        assert_eq!(real_t.classify(0, 10).unwrap().label(), "RLA");
    }

    #[test]
    fn tensoriality_of_jacobiator_when_anchor_morphism() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Complex);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = t.random_section(&mut rng);
            let b = t.random_section(&mut rng);
            let cc = t.random_section(&mut rng);
            let f = random_polynomial(&c, Scalars::Complex, &mut rng);
            let lhs = t.jacobiator(&a, &b, &cc.scale(&f)).unwrap();
            let rhs = t.jacobiator(&a, &b, &cc).unwrap().scale(&f);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jacobiator_antisymmetry() {
        let c = ch2();
        let sl2 = sl2_bundle(&c, Scalars::Complex);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = sl2.random_section(&mut rng);
        let b = sl2.random_section(&mut rng);
        let cc = sl2.random_section(&mut rng);
        let j1 = sl2.jacobiator(&a, &b, &cc).unwrap();
        let j2 = sl2.jacobiator(&b, &a, &cc).unwrap();
        assert!(j1.add(&j2).is_zero());
    }

    #[test]
    fn rank_zero_passes_vacuously() {
        let c = ch2();
        let z = ChartedAlgebroid::zero(&c, 0, Scalars::Complex);
        let v = z.classify(0, 5).unwrap();
        assert!(v.is_lie());
    }

    #[test]
    fn real_scalars_reject_complex_data() {
        let c = ch2();
        let bad = ChartedAlgebroid::new(
            c.clone(),
            1,
            Scalars::Real,
            vec![vec![e("i*x", &c), e("0", &c)]],
            BTreeMap::new(),
        );
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))));

        let t = ChartedAlgebroid::tangent(&c, Scalars::Real);
        let s = Section::new(vec![e("i", &c), e("0", &c)]);
        assert!(t.anchor_apply(&s).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = ch2();
        let sl2 = sl2_bundle(&c, Scalars::Complex);
        let json = sl2.to_json();
        let back = ChartedAlgebroid::from_json(&json).unwrap();
        assert_eq!(sl2, back);

        let parsed = ChartedAlgebroid::from_json(
            r#"{
                "chart": ["x", "y"],
                "rank": 1,
                "scalars": "complex",
                "anchor": [["1", "i*x"]],
                "structure": {}
            }"#,
        )
        .unwrap();
        assert_eq!(parsed.rank(), 1);
        assert_eq!(parsed.anchor()[0][1], e("i*x", &c));
    }

    #[test]
    fn bad_structure_keys_rejected() {
        let src = r#"{
            "chart": ["x"],
            "rank": 2,
            "scalars": "real",
            "anchor": [["1"], ["x"]],
            "structure": {"2,1": ["0", "0"]}
        }"#;
        assert!(matches!(
            ChartedAlgebroid::from_json(src),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn seeded_checks_are_deterministic() {
        let c = ch2();
        let t = ChartedAlgebroid::tangent(&c, Scalars::Complex);
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            assert_eq!(t.random_section(&mut r1), t.random_section(&mut r2));
        }
    }

    #[test]
    fn evaluation_of_anchor_at_point() {
        let c = Chart::new(vec!["x"]).unwrap();
        let a = ChartedAlgebroid::new(
            c.clone(),
            1,
            Scalars::Complex,
            vec![vec![e("(1+i)*x", &c)]],
            BTreeMap::new(),
        )
        .unwrap();
        let v = a.anchor()[0][0].evaluate(&Point::from_ints(&[2])).unwrap();
        assert_eq!(v.to_string(), "2+2*i");
    }

    #[test]
    fn rational_coefficient_algebroid() {
        // frame f∂x, xf∂x with f = 1/(x^2+1): [f∂x, xf∂x] = f^2 ∂x = f·(f∂x),
        // so [e1, e2] = f·e1.
        let c = Chart::new(vec!["x"]).unwrap();
        let f = e("1/(x^2+1)", &c);
        let mut structure = BTreeMap::new();
        structure.insert((0, 1), vec![f.clone(), RationalExpr::zero(&c)]);
        let a = ChartedAlgebroid::new(
            c.clone(),
            2,
            Scalars::Real,
            vec![vec![f.clone()], vec![e("x/(x^2+1)", &c)]],
            structure,
        )
        .unwrap();
        let verdict = a.classify(0, 15).unwrap();
        assert_eq!(verdict.classification, Classification::LieAlgebroid);

        // the wrong structure constant f^2 leaves exactly the defect
        // f^2(f - 1) = -x^2/(x^2+1)^3
        let mut wrong = BTreeMap::new();
        wrong.insert((0, 1), vec![f.mul(&f), RationalExpr::zero(&c)]);
        let b = ChartedAlgebroid::new(
            c.clone(),
            2,
            Scalars::Real,
            vec![vec![f.clone()], vec![e("x/(x^2+1)", &c)]],
            wrong,
        )
        .unwrap();
        let verdict = b.classify(0, 5).unwrap();
        assert_eq!(verdict.classification, Classification::SkewAlgebroid);
        let witness = verdict.anchor_morphism.witness.unwrap();
        assert_eq!(witness.defect, format!("({})*dx", e("-x^2/(x^2+1)^3", &c)));
    }
}

//! Pointwise exact linear algebra for the invariants of a complex
//! algebroid: distribution of real elements, Δ, D, isotropy, minimum
//! subalgebroid, real rank, type, class and order, plus grid scans and the
//! extraction of the real algebroid when the real rank is constant on the
//! sample set.
//!
//! Realification conventions, fixed for reproducible bases: the fiber of
//! A_ℝ is ordered (e_1, …, e_r, je_1, …, je_r) and the tangent basis is
//! (∂_1, …, ∂_n). Multiplication by i acts on coefficients (s, t) as
//! (s, t) ↦ (−t, s).

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use serde::Serialize;

use crate::algebroid::{AxiomVerdict, ChartedAlgebroid, Scalars, Section};
use crate::error::{Error, Result};
use crate::linalg::{right_kernel, solve, Subspace};
use crate::symexpr::{Chart, GaussianRational, Point, RationalExpr};

/// Scalar field a basis lives over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

/// An exact basis of a subspace, in reduced row echelon form (canonical
/// for the subspace, so bases are comparable across routes).
#[derive(Clone, PartialEq, Debug)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub field: FieldKind,
    vectors: Vec<Vec<GaussianRational>>,
}

impl SubspaceBasis {
    pub fn from_subspace(s: &Subspace, field: FieldKind) -> Self {
        SubspaceBasis {
            ambient_dim: s.ambient(),
            field,
            vectors: s.basis().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<GaussianRational>] {
        &self.vectors
    }

    pub fn subspace(&self) -> Subspace {
        Subspace::from_spanning(self.vectors.clone(), self.ambient_dim)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(|c| c.to_string()).collect())
            .collect()
    }
}

impl fmt::Display for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .vectors
            .iter()
            .map(|v| {
                let entries: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        write!(f, "{{{}}}", rows.join(", "))
    }
}

/// The complex anchor matrix of an algebroid evaluated at a point:
/// row i = ρ(e_i)|_m ∈ ℂⁿ. All pointwise invariants derive from it, which
/// also lets pullback fibers reuse the same computations.
#[derive(Clone, Debug)]
pub struct AnchorAtPoint {
    rows: Vec<Vec<GaussianRational>>,
    n: usize,
}

impl AnchorAtPoint {
    pub fn evaluate(a: &ChartedAlgebroid, m: &Point) -> Result<Self> {
        if m.dim() != a.chart().dim() {
            return Err(Error::ShapeMismatch(format!(
                "point of dimension {} on chart {}",
                m.dim(),
                a.chart()
            )));
        }
        let mut rows = Vec::with_capacity(a.rank());
        for row in a.anchor() {
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                out.push(e.evaluate(m)?);
            }
            rows.push(out);
        }
        Ok(AnchorAtPoint {
            rows,
            n: a.chart().dim(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>, n: usize) -> Self {
        AnchorAtPoint { rows, n }
    }

    pub fn fiber_rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<GaussianRational>] {
        &self.rows
    }

    /// The realified "imaginary part" map ℝ^{2r} → ℝⁿ sending the
    /// coefficients (s, t) of Σ s_i e_i + Σ t_i je_i to Im ρ = Σ s_i Im
    /// ρ(e_i) + Σ t_i Re ρ(e_i); its kernel is the fiber of A^real.
    fn imag_map_columns(&self) -> Vec<Vec<BigRational>> {
        // matrix rows indexed by the n tangent coordinates
        let r = self.rows.len();
        let mut m = vec![vec![BigRational::from_integer(0.into()); 2 * r]; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for (coord, entry) in row.iter().enumerate() {
                m[coord][i] = entry.im().clone();
                m[coord][r + i] = entry.re().clone();
            }
        }
        m
    }

    /// Basis of A^real|_m ⊆ ℝ^{2r}.
    pub fn real_elements(&self) -> SubspaceBasis {
        let r = self.rows.len();
        let m = self.imag_map_columns();
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        let kernel = right_kernel(&m, 2 * r, &zero, &one);
        let vectors: Vec<Vec<GaussianRational>> = kernel
            .into_iter()
            .map(|v| v.into_iter().map(GaussianRational::from_real).collect())
            .collect();
        SubspaceBasis::from_subspace(&Subspace::from_spanning(vectors, 2 * r), FieldKind::Real)
    }

    /// Δ|_m = ρ₁(A^real) ⊆ ℝⁿ: real parts of ρ applied to real elements.
    pub fn delta(&self, real_elements: &SubspaceBasis) -> SubspaceBasis {
        let r = self.rows.len();
        let mut spanning = Vec::new();
        for st in real_elements.vectors() {
            let (s, t) = st.split_at(r);
            let mut v = vec![GaussianRational::zero(); self.n];
            for (i, row) in self.rows.iter().enumerate() {
                for (coord, entry) in row.iter().enumerate() {
                    // Re(ρ(Σ s e + t je)) = Σ s Re ρ(e) − Σ t Im ρ(e)
                    let re = GaussianRational::from_real(entry.re().clone());
                    let im = GaussianRational::from_real(entry.im().clone());
                    let contrib = &(&s[i] * &re) - &(&t[i] * &im);
                    v[coord] = &v[coord] + &contrib;
                }
            }
            spanning.push(v);
        }
        SubspaceBasis::from_subspace(&Subspace::from_spanning(spanning, self.n), FieldKind::Real)
    }

    /// D|_m = im ρ₁ + im ρ₂ ⊆ ℝⁿ.
    pub fn d_distribution(&self) -> SubspaceBasis {
        let mut spanning = Vec::new();
        for row in &self.rows {
            spanning.push(
                row.iter()
                    .map(|e| GaussianRational::from_real(e.re().clone()))
                    .collect::<Vec<_>>(),
            );
            spanning.push(
                row.iter()
                    .map(|e| GaussianRational::from_real(e.im().clone()))
                    .collect::<Vec<_>>(),
            );
        }
        SubspaceBasis::from_subspace(&Subspace::from_spanning(spanning, self.n), FieldKind::Real)
    }

    /// 𝔤_m = ker ρ|_m ⊆ ℂ^r (complex kernel of the anchor at the point).
    pub fn isotropy(&self) -> SubspaceBasis {
        let r = self.rows.len();
        // {a : Σ a_i ρ(e_i) = 0} is the right kernel of the transpose.
        let mut t = vec![vec![GaussianRational::zero(); r]; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for (coord, entry) in row.iter().enumerate() {
                t[coord][i] = entry.clone();
            }
        }
        let kernel = right_kernel(&t, r, &GaussianRational::zero(), &GaussianRational::one());
        SubspaceBasis::from_subspace(&Subspace::from_spanning(kernel, r), FieldKind::Complex)
    }

    /// A_min|_m: the complex span in ℂ^r of the real elements (s, t) ↦ s + it.
    pub fn amin(&self, real_elements: &SubspaceBasis) -> SubspaceBasis {
        let r = self.rows.len();
        let i = GaussianRational::i();
        let mut spanning = Vec::new();
        for st in real_elements.vectors() {
            let (s, t) = st.split_at(r);
            let v: Vec<GaussianRational> = s.iter().zip(t).map(|(a, b)| a + &(&i * b)).collect();
            spanning.push(v);
        }
        SubspaceBasis::from_subspace(&Subspace::from_spanning(spanning, r), FieldKind::Complex)
    }

    /// ρ(A)|_m ⊆ ℂⁿ as a complex subspace (row space of the anchor).
    pub fn anchor_image(&self) -> Subspace {
        Subspace::from_spanning(self.rows.clone(), self.n)
    }
}

/// Exact dimensions, invariants and identity verdicts at one point.
#[derive(Clone, Debug)]
pub struct PointwiseReport {
    pub point: Point,
    pub real_rank: usize,
    pub dim_delta: usize,
    pub dim_d: usize,
    pub dim_isotropy_complex: usize,
    pub dim_amin_complex: usize,
    pub type_: usize,
    pub class: usize,
    pub order: usize,
    pub real_basis: SubspaceBasis,
    pub delta_basis: SubspaceBasis,
    pub d_basis: SubspaceBasis,
    pub isotropy_basis: SubspaceBasis,
    pub amin_basis: SubspaceBasis,
    pub identity_checks: Vec<(String, bool)>,
}

impl PointwiseReport {
    pub fn all_identities_hold(&self) -> bool {
        self.identity_checks.iter().all(|(_, ok)| *ok)
    }

    /// (real rank, type, class, order) — the stratification key.
    pub fn invariant_tuple(&self) -> (usize, usize, usize, usize) {
        (self.real_rank, self.type_, self.class, self.order)
    }
}

/// Basis of the distribution of real elements at a point, in the realified
/// fiber ℝ^{2r} with basis (e_1, …, e_r, je_1, …, je_r).
pub fn real_elements_at(a: &ChartedAlgebroid, m: &Point) -> Result<SubspaceBasis> {
    Ok(AnchorAtPoint::evaluate(a, m)?.real_elements())
}

/// All pointwise invariants and the identity suite at a point. Real-scalar
/// input is treated as its complexification.
pub fn pointwise_invariants_at(a: &ChartedAlgebroid, m: &Point) -> Result<PointwiseReport> {
    let anchor = AnchorAtPoint::evaluate(a, m)?;
    Ok(pointwise_from_anchor(
        anchor,
        m.clone(),
        a.chart().dim(),
        a.rank(),
    ))
}

/// The invariant suite for any pointwise anchor matrix; `n` is the ambient
/// tangent dimension and `r` the fiber rank.
pub fn pointwise_from_anchor(
    anchor: AnchorAtPoint,
    point: Point,
    n: usize,
    r: usize,
) -> PointwiseReport {
    let real_basis = anchor.real_elements();
    let delta_basis = anchor.delta(&real_basis);
    let d_basis = anchor.d_distribution();
    let isotropy_basis = anchor.isotropy();
    let amin_basis = anchor.amin(&real_basis);

    let real_rank = real_basis.dim();
    let dim_delta = delta_basis.dim();
    let dim_d = d_basis.dim();
    let dim_isotropy = isotropy_basis.dim();
    let dim_amin = amin_basis.dim();
    let type_ = (dim_d - dim_delta) / 2;
    let class = dim_delta;
    let order = n - dim_d;

    let delta_in_d = delta_basis.subspace().is_subspace_of(&d_basis.subspace());
    let identity_checks = vec![
        (
            "2*type = dim D - dim Delta".to_string(),
            2 * type_ == dim_d - dim_delta,
        ),
        (
            "real_rank + dim D = 2r".to_string(),
            real_rank + dim_d == 2 * r,
        ),
        (
            "2*type + class + real_rank = 2r".to_string(),
            2 * type_ + class + real_rank == 2 * r,
        ),
        (
            "order = real_rank + n - 2r".to_string(),
            order + 2 * r == real_rank + n,
        ),
        (
            "dim A_min = real_rank - dim g(A)".to_string(),
            dim_amin + dim_isotropy == real_rank,
        ),
        ("type = r - dim A_min".to_string(), type_ + dim_amin == r),
        ("Delta contained in D".to_string(), delta_in_d),
    ];

    PointwiseReport {
        point,
        real_rank,
        dim_delta,
        dim_d,
        dim_isotropy_complex: dim_isotropy,
        dim_amin_complex: dim_amin,
        type_,
        class,
        order,
        real_basis,
        delta_basis,
        d_basis,
        isotropy_basis,
        amin_basis,
        identity_checks,
    }
}

/// Isotropy fiber plus, when the frame bracket closes into it at the point,
/// the structure constants of the induced Lie algebra on the kernel basis.
#[derive(Clone, Debug)]
pub struct IsotropyReport {
    pub basis: SubspaceBasis,
    /// constants[a][b] = coefficients of [g_a, g_b] in the kernel basis.
    pub structure_constants: Option<Vec<Vec<Vec<GaussianRational>>>>,
    /// 𝔤(A)_ℝ = A^real ∩ j(A^real), verified at the point.
    pub realified_identity_holds: bool,
}

pub fn isotropy_at(a: &ChartedAlgebroid, m: &Point) -> Result<IsotropyReport> {
    let anchor = AnchorAtPoint::evaluate(a, m)?;
    let basis = anchor.isotropy();
    let r = a.rank();

    // Realified identity: 𝔤_ℝ = A^real ∩ j(A^real) in ℝ^{2r}.
    let real_elems = anchor.real_elements();
    let j_real = apply_j(&real_elems);
    let intersection = real_elems.subspace().intersect(&j_real.subspace());
    let mut realified = Vec::new();
    for g in basis.vectors() {
        let mut v1 = Vec::with_capacity(2 * r);
        let mut v2 = Vec::with_capacity(2 * r);
        for c in g {
            v1.push(GaussianRational::from_real(c.re().clone()));
            v2.push(GaussianRational::from_real(-c.im().clone()));
        }
        for c in g {
            v1.push(GaussianRational::from_real(c.im().clone()));
            v2.push(GaussianRational::from_real(c.re().clone()));
        }
        realified.push(v1); // g = (Re g, Im g)
        realified.push(v2); // i·g = (−Im g, Re g)
    }
    let g_realified = Subspace::from_spanning(realified, 2 * r);
    let realified_identity_holds = g_realified == intersection;

    // Structure constants of the kernel bracket: [u, v]_k evaluated with
    // constant-coefficient extensions; closure into the kernel can fail for
    // skew-algebroids, in which case no constants are reported.
    let structure_constants = isotropy_structure(a, m, &basis)?;

    Ok(IsotropyReport {
        basis,
        structure_constants,
        realified_identity_holds,
    })
}

fn isotropy_structure(
    a: &ChartedAlgebroid,
    m: &Point,
    basis: &SubspaceBasis,
) -> Result<Option<Vec<Vec<Vec<GaussianRational>>>>> {
    let r = a.rank();
    let dim = basis.dim();
    // Evaluate the structure functions at the point.
    let mut c_at = BTreeMap::new();
    for (&(i, j), coeffs) in a.structure() {
        let mut vals = Vec::with_capacity(r);
        for e in coeffs {
            vals.push(e.evaluate(m)?);
        }
        c_at.insert((i, j), vals);
    }
    let bracket = |u: &[GaussianRational], v: &[GaussianRational]| -> Vec<GaussianRational> {
        let mut out = vec![GaussianRational::zero(); r];
        for (&(i, j), vals) in &c_at {
            let coef = &(&u[i] * &v[j]) - &(&u[j] * &v[i]);
            if coef.is_zero() {
                continue;
            }
            for (slot, c) in out.iter_mut().zip(vals) {
                *slot = &*slot + &(&coef * c);
            }
        }
        out
    };
    // Solve for the coefficients of each bracket in the kernel basis.
    let mut t = vec![vec![GaussianRational::zero(); dim]; r];
    for (col, g) in basis.vectors().iter().enumerate() {
        for (row, c) in g.iter().enumerate() {
            t[row][col] = c.clone();
        }
    }
    let mut constants = vec![vec![Vec::new(); dim]; dim];
    for (x, gx) in basis.vectors().iter().enumerate() {
        for (y, gy) in basis.vectors().iter().enumerate() {
            let w = bracket(gx, gy);
            match solve(&t, &w, dim, &GaussianRational::zero()) {
                Some(coeffs) => constants[x][y] = coeffs,
                None => return Ok(None), // bracket leaves the kernel
            }
        }
    }
    Ok(Some(constants))
}

/// A_min|_m as a complex subspace of the fiber ℂ^r.
pub fn amin_at(a: &ChartedAlgebroid, m: &Point) -> Result<SubspaceBasis> {
    let anchor = AnchorAtPoint::evaluate(a, m)?;
    let real = anchor.real_elements();
    Ok(anchor.amin(&real))
}

/// Δ|_m ⊆ ℝⁿ.
pub fn delta_at(a: &ChartedAlgebroid, m: &Point) -> Result<SubspaceBasis> {
    let anchor = AnchorAtPoint::evaluate(a, m)?;
    let real = anchor.real_elements();
    Ok(anchor.delta(&real))
}

/// Multiplication by i on realified coefficients: (s, t) ↦ (−t, s).
fn apply_j(basis: &SubspaceBasis) -> SubspaceBasis {
    let two_r = basis.ambient_dim;
    let r = two_r / 2;
    let vectors: Vec<Vec<GaussianRational>> = basis
        .vectors()
        .iter()
        .map(|st| {
            let (s, t) = st.split_at(r);
            let mut v: Vec<GaussianRational> = t.iter().map(|c| -c).collect();
            v.extend(s.iter().cloned());
            v
        })
        .collect();
    SubspaceBasis::from_subspace(&Subspace::from_spanning(vectors, two_r), FieldKind::Real)
}

// --- grid scans -----------------------------------------------------------

/// An inclusive rational lattice, one range per chart coordinate.
#[derive(Clone, Debug)]
pub struct GridSpec {
    ranges: Vec<(BigRational, BigRational, BigRational)>, // (start, end, step)
}

impl GridSpec {
    /// The default desk-scale grid: every coordinate from −2 to 2, step 1.
    pub fn default_for(chart: &Chart) -> Self {
        let start = BigRational::from_integer((-2).into());
        let end = BigRational::from_integer(2.into());
        let step = BigRational::from_integer(1.into());
        GridSpec {
            ranges: vec![(start, end, step); chart.dim()],
        }
    }

    /// Parses `x=-2..2:1,y=0..1:1/2`; coordinates not named keep the
    /// default −2..2 step 1 range.
    pub fn parse(src: &str, chart: &Chart) -> Result<Self> {
        let mut spec = GridSpec::default_for(chart);
        if src.trim().is_empty() {
            return Ok(spec);
        }
        for part in src.split(',') {
            let part = part.trim();
            let (name, range) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("grid entry `{}` missing `=`", part)))?;
            let idx = chart
                .index_of(name.trim())
                .ok_or_else(|| Error::UnknownVariable(name.trim().to_string()))?;
            let (span, step) = match range.rsplit_once(':') {
                Some((span, step)) => {
                    // Guard against splitting inside `a..b` when the step is
                    // absent but the bound contains ':': not possible with
                    // rationals, so rsplit is safe.
                    (
                        span,
                        step.trim()
                            .parse::<BigRational>()
                            .map_err(|_| Error::Parse(format!("bad grid step `{}`", step)))?,
                    )
                }
                None => (range, BigRational::from_integer(1.into())),
            };
            let (lo, hi) = span
                .split_once("..")
                .ok_or_else(|| Error::Parse(format!("grid range `{}` missing `..`", span)))?;
            let lo: BigRational = lo
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid bound `{}`", lo)))?;
            let hi: BigRational = hi
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid bound `{}`", hi)))?;
            if num::Zero::is_zero(&step) || num::Signed::is_negative(&step) {
                return Err(Error::Parse("grid step must be positive".to_string()));
            }
            spec.ranges[idx] = (lo, hi, step);
        }
        Ok(spec)
    }

    /// All lattice points in lexicographic order (last coordinate fastest).
    pub fn points(&self) -> Vec<Point> {
        let axes: Vec<Vec<BigRational>> = self
            .ranges
            .iter()
            .map(|(lo, hi, step)| {
                let mut vals = Vec::new();
                let mut v = lo.clone();
                while &v <= hi {
                    vals.push(v.clone());
                    v = &v + step;
                }
                vals
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for prefix in &out {
                for v in axis {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Point::new).collect()
    }
}

/// Per-point reports plus the stratification by invariant tuple.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub reports: Vec<PointwiseReport>,
    pub pole_points: Vec<Point>,
    /// (real rank, type, class, order) → points attaining it.
    pub strata: BTreeMap<(usize, usize, usize, usize), Vec<Point>>,
    pub constant_real_rank: bool,
    /// Real rank identically zero on the sample: the CR criterion.
    pub cr_on_sample: bool,
    pub all_identities_hold: bool,
}

/// Evaluates the invariants at every grid point; pole points are recorded
/// and skipped. Constancy claims are always about the sample set only.
pub fn scan_grid(a: &ChartedAlgebroid, grid: &GridSpec) -> ScanReport {
    let mut reports = Vec::new();
    let mut pole_points = Vec::new();
    for m in grid.points() {
        match pointwise_invariants_at(a, &m) {
            Ok(rep) => reports.push(rep),
            Err(Error::PoleAtPoint(_)) => pole_points.push(m),
            Err(_) => unreachable!("grid points match the chart dimension"),
        }
    }
    let mut strata: BTreeMap<(usize, usize, usize, usize), Vec<Point>> = BTreeMap::new();
    for rep in &reports {
        strata
            .entry(rep.invariant_tuple())
            .or_default()
            .push(rep.point.clone());
    }
    let ranks: Vec<usize> = reports.iter().map(|r| r.real_rank).collect();
    let constant_real_rank = ranks.windows(2).all(|w| w[0] == w[1]);
    let cr_on_sample = !reports.is_empty() && ranks.iter().all(|&r| r == 0);
    let all_identities_hold = reports.iter().all(|r| r.all_identities_hold());
    ScanReport {
        reports,
        pole_points,
        strata,
        constant_real_rank,
        cr_on_sample,
        all_identities_hold,
    }
}

// --- real algebroid extraction --------------------------------------------

/// Result of extracting the Lie algebroid of real elements: the real
/// algebroid on the kernel frame, the frame itself as sections of A, the
/// denominators cleared from the symbolic kernel (the chart is implicitly
/// restricted to the complement of their zero set), and the RLA verdict of
/// the result.
#[derive(Clone, Debug)]
pub struct RealExtraction {
    pub algebroid: ChartedAlgebroid,
    pub frame: Vec<Section>,
    pub cleared_denominators: Vec<RationalExpr>,
    pub verdict: AxiomVerdict,
}

/// Computes a symbolic kernel frame of the realified imaginary-part map
/// over the rational-function field and restricts the bracket and real
/// anchor to it. Fails with `NonConstantRank` when the pointwise real rank
/// on the sample differs from the generic rank (carrying the offending
/// points), and with `PoleAtPoint` when the anchor has a pole at a sample
/// point. The caller is expected to have classified `a` as a CLA.
pub fn extract_real_algebroid(
    a: &ChartedAlgebroid,
    sample: &GridSpec,
    seed: u64,
    trials: usize,
) -> Result<RealExtraction> {
    let chart = a.chart().clone();
    let r = a.rank();
    let n = chart.dim();
    let zero = RationalExpr::zero(&chart);
    let one = RationalExpr::one(&chart);

    // Symbolic imaginary-part matrix, columns (e_1..e_r, je_1..je_r).
    let mut m = vec![vec![zero.clone(); 2 * r]; n];
    for (i, row) in a.anchor().iter().enumerate() {
        for (coord, e) in row.iter().enumerate() {
            m[coord][i] = e.im_part();
            m[coord][r + i] = e.re_part();
        }
    }
    let kernel = right_kernel(&m, 2 * r, &zero, &one);
    let generic_rank = kernel.len();

    // The generic rank must agree with the pointwise real rank everywhere
    // on the sample.
    let mut offending = Vec::new();
    for p in sample.points() {
        let basis = real_elements_at(a, &p)?;
        if basis.dim() != generic_rank {
            offending.push(p);
        }
    }
    if !offending.is_empty() {
        let list: Vec<String> = offending.iter().map(|p| p.to_string()).collect();
        return Err(Error::NonConstantRank(list.join(", ")));
    }

    // Clear denominators per kernel vector.
    let mut frame = Vec::with_capacity(generic_rank);
    let mut cleared = Vec::new();
    for vec_st in &kernel {
        let mut common = crate::symexpr::poly::Poly::one(n);
        for e in vec_st {
            common = crate::symexpr::poly::lcm(&common, e.den());
        }
        if !common.is_one() {
            cleared.push(poly_as_expr(&chart, &common));
        }
        let scale = poly_as_expr(&chart, &common);
        let scaled: Vec<RationalExpr> = vec_st.iter().map(|e| e.mul(&scale)).collect();
        let (s, t) = scaled.split_at(r);
        let i_expr = RationalExpr::i(&chart);
        let coeffs: Vec<RationalExpr> = s
            .iter()
            .zip(t)
            .map(|(a, b)| a.add(&b.mul(&i_expr)))
            .collect();
        frame.push(Section::new(coeffs));
    }

    // Real anchor rows: ρ(σ_α) must already be real on the kernel.
    let mut anchor_rows = Vec::with_capacity(generic_rank);
    for sec in &frame {
        let v = a.anchor_apply(sec)?;
        let im = v.im_part();
        if !im.is_zero() {
            return Err(Error::InternalInconsistency(
                "kernel frame has non-real anchor image".to_string(),
            ));
        }
        anchor_rows.push(v.re_part().components().to_vec());
    }

    // Structure functions: expand [σ_α, σ_β] in the frame over ℝ, i.e.
    // solve the realified linear system with rational-function entries.
    let mut sys = vec![vec![zero.clone(); generic_rank]; 2 * r];
    for (col, sec) in frame.iter().enumerate() {
        for (row, c) in sec.coefficients().iter().enumerate() {
            sys[row][col] = c.re_part();
            sys[r + row][col] = c.im_part();
        }
    }
    let mut structure = BTreeMap::new();
    for alpha in 0..generic_rank {
        for beta in (alpha + 1)..generic_rank {
            let w = a.bracket_sections(&frame[alpha], &frame[beta])?;
            let mut rhs = Vec::with_capacity(2 * r);
            for c in w.coefficients() {
                rhs.push(c.re_part());
            }
            for c in w.coefficients() {
                rhs.push(c.im_part());
            }
            let coeffs = solve(&sys, &rhs, generic_rank, &zero).ok_or_else(|| {
                Error::InternalInconsistency(
                    "bracket of real elements does not close into the kernel frame".to_string(),
                )
            })?;
            if coeffs.iter().any(|c| !c.is_zero()) {
                structure.insert((alpha, beta), coeffs);
            }
        }
    }

    let algebroid =
        ChartedAlgebroid::new(chart, generic_rank, Scalars::Real, anchor_rows, structure)?;
    let verdict = algebroid.classify(seed, trials)?;
    Ok(RealExtraction {
        algebroid,
        frame,
        cleared_denominators: cleared,
        verdict,
    })
}

fn poly_as_expr(chart: &Chart, p: &crate::symexpr::poly::Poly) -> RationalExpr {
    let mut acc = RationalExpr::zero(chart);
    for (m, c) in p.terms() {
        let mut t = RationalExpr::constant(c.clone(), chart);
        for (k, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                t = t.mul(&RationalExpr::coordinate_index(chart, k).pow(e));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

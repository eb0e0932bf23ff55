//! Coordinate realizations of vector fields, one-forms and bivectors, with
//! the bracket and derivative operations the algebroid formulas consume.
//!
//! Sign and pairing convention, fixed once for the whole crate:
//! π = Σ_{j<k} π^{jk} ∂_j∧∂_k acts on functions as
//! π(df, dg) = Σ_{j<k} π^{jk} (∂_j f ∂_k g − ∂_k f ∂_j g), and
//! π♯(ξ) = π(ξ, ·), so π♯(ξ)^k = Σ_j π^{jk} ξ_j.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symexpr::{Chart, RationalExpr};

/// A vector field Σ_k X^k ∂_k; components may be complex (Z = X₁ + iX₂).
#[derive(Clone, PartialEq, Debug)]
pub struct VectorField {
    chart: Chart,
    components: Vec<RationalExpr>,
}

/// A one-form Σ_k α_k dx_k.
#[derive(Clone, PartialEq, Debug)]
pub struct OneForm {
    chart: Chart,
    components: Vec<RationalExpr>,
}

/// A bivector Σ_{j<k} π^{jk} ∂_j∧∂_k; only the upper triangle is stored,
/// antisymmetry is implicit (π^{kj} = −π^{jk}, π^{jj} = 0).
#[derive(Clone, PartialEq, Debug)]
pub struct Bivector {
    chart: Chart,
    upper: BTreeMap<(usize, usize), RationalExpr>,
}

fn check_len(chart: &Chart, components: &[RationalExpr]) -> Result<()> {
    if components.len() != chart.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} components for chart {} of dimension {}",
            components.len(),
            chart,
            chart.dim()
        )));
    }
    for c in components {
        if c.chart() != chart {
            return Err(Error::ChartMismatch(format!(
                "component chart {} differs from {}",
                c.chart(),
                chart
            )));
        }
    }
    Ok(())
}

fn same_chart(a: &Chart, b: &Chart) -> Result<()> {
    if a != b {
        return Err(Error::ChartMismatch(format!("{} vs {}", a, b)));
    }
    Ok(())
}

impl VectorField {
    pub fn new(chart: Chart, components: Vec<RationalExpr>) -> Result<Self> {
        check_len(&chart, &components)?;
        Ok(VectorField { chart, components })
    }

    pub fn zero(chart: &Chart) -> Self {
        let components = (0..chart.dim())
            .map(|_| RationalExpr::zero(chart))
            .collect();
        VectorField {
            chart: chart.clone(),
            components,
        }
    }

    /// The coordinate frame field ∂_k.
    pub fn frame(chart: &Chart, k: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.components[k] = RationalExpr::one(chart);
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.is_real())
    }

    /// Pointwise real part X₁ of Z = X₁ + iX₂.
    pub fn re_part(&self) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.re_part()).collect(),
        }
    }

    pub fn im_part(&self) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.im_part()).collect(),
        }
    }

    pub fn conj(&self) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        debug_assert_eq!(self.chart, other.chart);
        VectorField {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        debug_assert_eq!(self.chart, other.chart);
        VectorField {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, f: &RationalExpr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Directional derivative X(f) = Σ_k X^k ∂_k f.
    pub fn apply(&self, f: &RationalExpr) -> RationalExpr {
        let mut acc = RationalExpr::zero(&self.chart);
        for (k, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            acc = acc.add(&comp.mul(&f.differentiate_index(k)));
        }
        acc
    }
}

impl fmt::Display for VectorField {
    /// Prints in the inline vector-field grammar: `dx + i*x*dy` stands for
    /// ∂_x + i·x·∂_y.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let sym = format!("d{}", self.chart.names()[k]);
            if comp.is_one() {
                parts.push(sym);
            } else {
                parts.push(format!("({})*{}", comp, sym));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl OneForm {
    pub fn new(chart: Chart, components: Vec<RationalExpr>) -> Result<Self> {
        check_len(&chart, &components)?;
        Ok(OneForm { chart, components })
    }

    pub fn zero(chart: &Chart) -> Self {
        let components = (0..chart.dim())
            .map(|_| RationalExpr::zero(chart))
            .collect();
        OneForm {
            chart: chart.clone(),
            components,
        }
    }

    /// The coordinate one-form dx_k.
    pub fn frame(chart: &Chart, k: usize) -> Self {
        let mut v = OneForm::zero(chart);
        v.components[k] = RationalExpr::one(chart);
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[RationalExpr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        debug_assert_eq!(self.chart, other.chart);
        OneForm {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        self.add(&other.scale(&RationalExpr::from_int(-1, &self.chart)))
    }

    pub fn scale(&self, f: &RationalExpr) -> OneForm {
        OneForm {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Pairing ⟨α, X⟩ = Σ_k α_k X^k.
    pub fn pair(&self, x: &VectorField) -> RationalExpr {
        debug_assert_eq!(self.chart, x.chart);
        let mut acc = RationalExpr::zero(&self.chart);
        for (a, b) in self.components.iter().zip(&x.components) {
            acc = acc.add(&a.mul(b));
        }
        acc
    }
}

impl Bivector {
    /// Builds from upper-triangular entries (j < k, 0-based).
    pub fn new(chart: Chart, upper: BTreeMap<(usize, usize), RationalExpr>) -> Result<Self> {
        let n = chart.dim();
        for (&(j, k), e) in &upper {
            if j >= k || k >= n {
                return Err(Error::ShapeMismatch(format!(
                    "bivector index ({}, {}) out of upper triangle for dimension {}",
                    j, k, n
                )));
            }
            if e.chart() != &chart {
                return Err(Error::ChartMismatch(format!(
                    "entry ({}, {}) lives on chart {}, expected {}",
                    j,
                    k,
                    e.chart(),
                    chart
                )));
            }
        }
        Ok(Bivector { chart, upper })
    }

    pub fn zero(chart: &Chart) -> Self {
        Bivector {
            chart: chart.clone(),
            upper: BTreeMap::new(),
        }
    }

    /// Constant ∂_j∧∂_k.
    pub fn wedge(chart: &Chart, j: usize, k: usize) -> Self {
        let mut upper = BTreeMap::new();
        upper.insert((j.min(k), j.max(k)), {
            let one = RationalExpr::one(chart);
            if j < k {
                one
            } else {
                one.neg()
            }
        });
        Bivector {
            chart: chart.clone(),
            upper,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn upper(&self) -> &BTreeMap<(usize, usize), RationalExpr> {
        &self.upper
    }

    /// Entry π^{jk} for arbitrary j, k with the antisymmetry applied.
    pub fn entry(&self, j: usize, k: usize) -> RationalExpr {
        if j == k {
            return RationalExpr::zero(&self.chart);
        }
        if j < k {
            self.upper
                .get(&(j, k))
                .cloned()
                .unwrap_or_else(|| RationalExpr::zero(&self.chart))
        } else {
            self.entry(k, j).neg()
        }
    }

    pub fn add(&self, other: &Bivector) -> Bivector {
        debug_assert_eq!(self.chart, other.chart);
        let mut upper = self.upper.clone();
        for (&jk, e) in &other.upper {
            let cur = upper
                .get(&jk)
                .cloned()
                .unwrap_or_else(|| RationalExpr::zero(&self.chart));
            let sum = cur.add(e);
            if sum.is_zero() {
                upper.remove(&jk);
            } else {
                upper.insert(jk, sum);
            }
        }
        Bivector {
            chart: self.chart.clone(),
            upper,
        }
    }

    pub fn scale(&self, f: &RationalExpr) -> Bivector {
        let mut upper = BTreeMap::new();
        for (&jk, e) in &self.upper {
            let p = e.mul(f);
            if !p.is_zero() {
                upper.insert(jk, p);
            }
        }
        Bivector {
            chart: self.chart.clone(),
            upper,
        }
    }

    pub fn re_part(&self) -> Bivector {
        let mut upper = BTreeMap::new();
        for (&jk, e) in &self.upper {
            let p = e.re_part();
            if !p.is_zero() {
                upper.insert(jk, p);
            }
        }
        Bivector {
            chart: self.chart.clone(),
            upper,
        }
    }

    pub fn im_part(&self) -> Bivector {
        let mut upper = BTreeMap::new();
        for (&jk, e) in &self.upper {
            let p = e.im_part();
            if !p.is_zero() {
                upper.insert(jk, p);
            }
        }
        Bivector {
            chart: self.chart.clone(),
            upper,
        }
    }

    pub fn is_real(&self) -> bool {
        self.upper.values().all(|e| e.is_real())
    }

    pub fn is_zero(&self) -> bool {
        self.upper.values().all(|e| e.is_zero())
    }

    /// π(df, dg) on functions.
    pub fn on_functions(&self, f: &RationalExpr, g: &RationalExpr) -> RationalExpr {
        let mut acc = RationalExpr::zero(&self.chart);
        for (&(j, k), e) in &self.upper {
            let t = f
                .differentiate_index(j)
                .mul(&g.differentiate_index(k))
                .sub(&f.differentiate_index(k).mul(&g.differentiate_index(j)));
            acc = acc.add(&e.mul(&t));
        }
        acc
    }

    /// π(ξ, η) = ⟨η, π♯ξ⟩ on arbitrary one-forms.
    pub fn on_forms(&self, xi: &OneForm, eta: &OneForm) -> Result<RationalExpr> {
        Ok(eta.pair(&bivector_sharp(self, xi)?))
    }
}

/// Parses the inline vector-field grammar: the expression grammar extended
/// by one frame symbol `d<coord>` per chart coordinate, e.g.
/// `dx + i*x*dy` for ∂_x + i·x·∂_y. The expression must be linear in the
/// frame symbols with coefficients in the chart coordinates only.
pub fn parse_vector_field(src: &str, chart: &Chart) -> Result<VectorField> {
    let mut names: Vec<String> = chart.names().to_vec();
    let frame_names: Vec<String> = chart.names().iter().map(|n| format!("d{}", n)).collect();
    for f in &frame_names {
        if names.contains(f) {
            return Err(Error::InvalidChart(format!(
                "coordinate `{}` collides with a frame symbol",
                f
            )));
        }
        names.push(f.clone());
    }
    let extended = Chart::new(names)?;
    let expr = crate::symexpr::parse_expr(src, &extended)?;
    let n = chart.dim();
    let mut components = Vec::with_capacity(n);
    let mut recombined = RationalExpr::zero(&extended);
    for k in 0..n {
        let comp = expr.differentiate_index(n + k);
        let frame = RationalExpr::coordinate_index(&extended, n + k);
        recombined = recombined.add(&comp.mul(&frame));
        components.push(comp);
    }
    if recombined != expr {
        return Err(Error::Parse(
            "vector field expression must be linear in the frame symbols".to_string(),
        ));
    }
    // Re-ground the coefficients on the base chart.
    let mut grounded = Vec::with_capacity(n);
    for comp in components {
        if (0..n).any(|k| comp.num().uses_var(n + k) || comp.den().uses_var(n + k)) {
            return Err(Error::Parse(
                "frame coefficients must depend on the chart coordinates only".to_string(),
            ));
        }
        let images: Vec<RationalExpr> = (0..extended.dim())
            .map(|k| {
                if k < n {
                    RationalExpr::coordinate_index(chart, k)
                } else {
                    RationalExpr::zero(chart)
                }
            })
            .collect();
        grounded.push(comp.substitute(&images)?);
    }
    VectorField::new(chart.clone(), grounded)
}

/// The Lie bracket of vector fields in coordinates:
/// [X, Y]^k = Σ_j (X^j ∂_j Y^k − Y^j ∂_j X^k). ℂ-bilinear.
pub fn lie_bracket_vf(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    same_chart(&x.chart, &y.chart)?;
    let chart = x.chart.clone();
    let mut components = Vec::with_capacity(chart.dim());
    for k in 0..chart.dim() {
        components.push(x.apply(&y.components[k]).sub(&y.apply(&x.components[k])));
    }
    Ok(VectorField { chart, components })
}

/// Lie derivative of a one-form along a vector field, in coordinates:
/// (L_X α)_k = Σ_j (X^j ∂_j α_k + α_j ∂_k X^j).
pub fn lie_derivative_oneform(x: &VectorField, alpha: &OneForm) -> Result<OneForm> {
    same_chart(&x.chart, &alpha.chart)?;
    let chart = x.chart.clone();
    let mut components = Vec::with_capacity(chart.dim());
    for k in 0..chart.dim() {
        let mut acc = x.apply(&alpha.components[k]);
        for j in 0..chart.dim() {
            acc = acc.add(&alpha.components[j].mul(&x.components[j].differentiate_index(k)));
        }
        components.push(acc);
    }
    Ok(OneForm { chart, components })
}

/// Differential of a function: (df)_k = ∂_k f.
pub fn d_fn(f: &RationalExpr) -> OneForm {
    let chart = f.chart().clone();
    let components = (0..chart.dim()).map(|k| f.differentiate_index(k)).collect();
    OneForm { chart, components }
}

/// Anchor of a bivector: π♯(ξ)^k = Σ_j π^{jk} ξ_j.
pub fn bivector_sharp(pi: &Bivector, xi: &OneForm) -> Result<VectorField> {
    same_chart(&pi.chart, &xi.chart)?;
    let chart = pi.chart.clone();
    let mut components = vec![RationalExpr::zero(&chart); chart.dim()];
    for (&(j, k), e) in &pi.upper {
        // contributes e to π^{jk} and -e to π^{kj}
        components[k] = components[k].add(&e.mul(&xi.components[j]));
        components[j] = components[j].sub(&e.mul(&xi.components[k]));
    }
    Ok(VectorField { chart, components })
}

/// The trilinear expression realizing the Schouten bracket of two bivectors
/// as a multi-derivation:
/// [π, σ](f, g, h) = π(σ(f,g), h) + σ(π(f,g), h) + cyclic permutations.
/// Vanishing on a generating function family is the compatibility test.
pub fn schouten_trilinear(
    pi: &Bivector,
    sigma: &Bivector,
    f: &RationalExpr,
    g: &RationalExpr,
    h: &RationalExpr,
) -> Result<RationalExpr> {
    same_chart(&pi.chart, &sigma.chart)?;
    let term = |a: &RationalExpr, b: &RationalExpr, c: &RationalExpr| -> RationalExpr {
        pi.on_functions(&sigma.on_functions(a, b), c)
            .add(&sigma.on_functions(&pi.on_functions(a, b), c))
    };
    Ok(term(f, g, h).add(&term(g, h, f)).add(&term(h, f, g)))
}

/// The bracket of one-forms induced by a bivector:
/// [α, β]_γ = L_{γ♯α}β − L_{γ♯β}α − d(γ(α, β)). ℂ-bilinear, antisymmetric.
pub fn bivector_bracket_oneforms(
    gamma: &Bivector,
    alpha: &OneForm,
    beta: &OneForm,
) -> Result<OneForm> {
    same_chart(&gamma.chart, &alpha.chart)?;
    same_chart(&gamma.chart, &beta.chart)?;
    let la = lie_derivative_oneform(&bivector_sharp(gamma, alpha)?, beta)?;
    let lb = lie_derivative_oneform(&bivector_sharp(gamma, beta)?, alpha)?;
    let dpair = d_fn(&gamma.on_forms(alpha, beta)?);
    Ok(la.sub(&lb).sub(&dpair))
}

/// The generating function family for compatibility tests: the coordinate
/// functions and their pairwise products (squares included). The trilinear
/// Schouten expression is a tri-derivation determined by first derivatives,
/// so vanishing on this family implies vanishing on all smooth functions.
pub fn generating_family(chart: &Chart) -> Vec<RationalExpr> {
    let n = chart.dim();
    let mut family = Vec::new();
    for k in 0..n {
        family.push(RationalExpr::coordinate_index(chart, k));
    }
    for j in 0..n {
        for k in j..n {
            family.push(
                RationalExpr::coordinate_index(chart, j)
                    .mul(&RationalExpr::coordinate_index(chart, k)),
            );
        }
    }
    family
}

/// Searches the generating family for a triple where the Schouten
/// expression of (π, σ) does not vanish; `None` means compatible.
///
/// The implemented trilinear sum is alternating by construction
/// (`on_functions` is structurally antisymmetric and the three cyclic terms
/// negate under any transposition), so triples with a repeated entry vanish
/// identically and it suffices to scan strictly increasing index triples.
pub fn schouten_witness(
    pi: &Bivector,
    sigma: &Bivector,
    family: &[RationalExpr],
) -> Result<Option<(usize, usize, usize)>> {
    for a in 0..family.len() {
        for b in (a + 1)..family.len() {
            for c in (b + 1)..family.len() {
                if !schouten_trilinear(pi, sigma, &family[a], &family[b], &family[c])?.is_zero() {
                    return Ok(Some((a, b, c)));
                }
            }
        }
    }
    Ok(None)
}

/// Whether [π, π] vanishes on the generating family, i.e. π is Poisson.
pub fn is_poisson(pi: &Bivector) -> Result<bool> {
    let family = generating_family(&pi.chart);
    Ok(schouten_witness(pi, pi, &family)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn ch2() -> Chart {
        Chart::new(vec!["x", "y"]).unwrap()
    }

    fn ch4() -> Chart {
        Chart::new(vec!["x", "y", "z", "w"]).unwrap()
    }

    fn vf(chart: &Chart, comps: &[&str]) -> VectorField {
        VectorField::new(
            chart.clone(),
            comps
                .iter()
                .map(|s| parse_expr(s, chart).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bracket_coordinate_examples() {
        let c = ch2();
        // [∂x, x∂y] = ∂y
        let a = vf(&c, &["1", "0"]);
        let b = vf(&c, &["0", "x"]);
        assert_eq!(lie_bracket_vf(&a, &b).unwrap(), vf(&c, &["0", "1"]));
        // [X, X] = 0
        let x = vf(&c, &["x*y", "y^2"]);
        assert!(lie_bracket_vf(&x, &x).unwrap().is_zero());
        // [∂x + i∂y, x∂x] = ∂x
        let z = vf(&c, &["1", "i"]);
        let w = vf(&c, &["x", "0"]);
        assert_eq!(lie_bracket_vf(&z, &w).unwrap(), vf(&c, &["1", "0"]));
    }

    #[test]
    fn chart_mismatch_rejected() {
        let a = vf(&ch2(), &["1", "0"]);
        let c3 = Chart::new(vec!["x", "y", "z"]).unwrap();
        let b = vf(&c3, &["1", "0", "0"]);
        assert!(matches!(
            lie_bracket_vf(&a, &b),
            Err(Error::ChartMismatch(_))
        ));
    }

    #[test]
    fn lie_derivative_examples() {
        let c = ch2();
        let dx = OneForm::frame(&c, 0);
        let dy = OneForm::frame(&c, 1);
        // L_∂x dx = 0
        assert!(lie_derivative_oneform(&vf(&c, &["1", "0"]), &dx)
            .unwrap()
            .is_zero());
        // L_{x∂x} dx = dx
        assert_eq!(
            lie_derivative_oneform(&vf(&c, &["x", "0"]), &dx).unwrap(),
            dx
        );
        // L_∂x (x dy) = dy
        let xdy = dy.scale(&parse_expr("x", &c).unwrap());
        assert_eq!(
            lie_derivative_oneform(&vf(&c, &["1", "0"]), &xdy).unwrap(),
            dy
        );
    }

    /// Independent Cartan-formula oracle: L_X α = d⟨α, X⟩ + ι_X dα with
    /// (dα)_{jk} = ∂_j α_k − ∂_k α_j and (ι_X dα)_k = Σ_j X^j (dα)_{jk}.
    fn lie_derivative_cartan(x: &VectorField, alpha: &OneForm) -> OneForm {
        let chart = x.chart().clone();
        let n = chart.dim();
        let exact = d_fn(&alpha.pair(x));
        let mut contraction = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = RationalExpr::zero(&chart);
            for j in 0..n {
                let dajk = alpha.components()[k]
                    .differentiate_index(j)
                    .sub(&alpha.components()[j].differentiate_index(k));
                acc = acc.add(&x.components()[j].mul(&dajk));
            }
            contraction.push(acc);
        }
        exact.add(&OneForm::new(chart, contraction).unwrap())
    }

    #[test]
    fn lie_derivative_matches_cartan_oracle() {
        let c = ch2();
        let fields = [
            vf(&c, &["1", "0"]),
            vf(&c, &["x", "y^2"]),
            vf(&c, &["y", "x*y"]),
            vf(&c, &["1", "i"]),
        ];
        let forms = [
            OneForm::new(
                c.clone(),
                vec![
                    parse_expr("x*y", &c).unwrap(),
                    parse_expr("x^2", &c).unwrap(),
                ],
            )
            .unwrap(),
            OneForm::new(
                c.clone(),
                vec![parse_expr("y", &c).unwrap(), parse_expr("1", &c).unwrap()],
            )
            .unwrap(),
        ];
        for x in &fields {
            for a in &forms {
                assert_eq!(
                    lie_derivative_oneform(x, a).unwrap(),
                    lie_derivative_cartan(x, a)
                );
            }
        }
    }

    #[test]
    fn d_of_functions() {
        let c = ch2();
        assert_eq!(d_fn(&parse_expr("x", &c).unwrap()), OneForm::frame(&c, 0));
        assert!(d_fn(&parse_expr("7", &c).unwrap()).is_zero());
        let dxy = d_fn(&parse_expr("x*y", &c).unwrap());
        assert_eq!(
            dxy.components(),
            &[parse_expr("y", &c).unwrap(), parse_expr("x", &c).unwrap()]
        );
    }

    #[test]
    fn sharp_convention() {
        let c = ch2();
        let pi = Bivector::wedge(&c, 0, 1); // ∂x∧∂y
                                            // (∂x∧∂y)♯(dx) = ∂y
        assert_eq!(
            bivector_sharp(&pi, &OneForm::frame(&c, 0)).unwrap(),
            VectorField::frame(&c, 1)
        );
        assert!(bivector_sharp(&pi, &OneForm::zero(&c)).unwrap().is_zero());
        // no z-components on a 3d chart
        let c3 = Chart::new(vec!["x", "y", "z"]).unwrap();
        let pi3 = Bivector::wedge(&c3, 0, 1);
        assert!(bivector_sharp(&pi3, &OneForm::frame(&c3, 2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn schouten_constant_bivectors_vanish() {
        let c = ch4();
        let pi = Bivector::wedge(&c, 0, 1);
        let sigma = Bivector::wedge(&c, 2, 3);
        let family = generating_family(&c);
        assert!(schouten_witness(&pi, &sigma, &family).unwrap().is_none());
        assert!(is_poisson(&pi).unwrap());
    }

    #[test]
    fn schouten_trilinear_is_alternating() {
        // Pins the structural property the triple-scan relies on: any
        // transposition negates the sum and repeated arguments kill it.
        let c = ch4();
        let pi = Bivector::wedge(&c, 0, 1).add(&Bivector::wedge(&c, 1, 2));
        let sigma = Bivector::wedge(&c, 2, 3).scale(&parse_expr("x*y", &c).unwrap());
        let f = parse_expr("x + z^2", &c).unwrap();
        let g = parse_expr("y*w", &c).unwrap();
        let h = parse_expr("z", &c).unwrap();
        let t = schouten_trilinear(&pi, &sigma, &f, &g, &h).unwrap();
        let swapped = schouten_trilinear(&pi, &sigma, &g, &f, &h).unwrap();
        assert_eq!(t.neg(), swapped);
        let swapped = schouten_trilinear(&pi, &sigma, &f, &h, &g).unwrap();
        assert_eq!(t.neg(), swapped);
        assert!(schouten_trilinear(&pi, &sigma, &f, &f, &h)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn schouten_symmetric_in_bivectors() {
        let c = ch4();
        let pi = Bivector::wedge(&c, 0, 1);
        let sigma = Bivector::wedge(&c, 2, 3).scale(&parse_expr("x", &c).unwrap());
        let f = parse_expr("x*y", &c).unwrap();
        let g = parse_expr("z", &c).unwrap();
        let h = parse_expr("w^2", &c).unwrap();
        assert_eq!(
            schouten_trilinear(&pi, &sigma, &f, &g, &h).unwrap(),
            schouten_trilinear(&sigma, &pi, &f, &g, &h).unwrap()
        );
    }

    #[test]
    fn incompatible_pair_detected_on_coordinates() {
        let c = ch4();
        let pi = Bivector::wedge(&c, 0, 1); // ∂x∧∂y
        let sigma = Bivector::wedge(&c, 2, 3).scale(&parse_expr("x", &c).unwrap()); // x ∂z∧∂w
                                                                                    // nonzero on the coordinate triple (y, z, w)
        let y = parse_expr("y", &c).unwrap();
        let z = parse_expr("z", &c).unwrap();
        let w = parse_expr("w", &c).unwrap();
        assert!(!schouten_trilinear(&pi, &sigma, &y, &z, &w)
            .unwrap()
            .is_zero());
        let family = generating_family(&c);
        assert!(schouten_witness(&pi, &sigma, &family).unwrap().is_some());
    }

    #[test]
    fn bivector_bracket_examples() {
        let c = ch2();
        let gamma = Bivector::wedge(&c, 0, 1);
        let dx = OneForm::frame(&c, 0);
        let dy = OneForm::frame(&c, 1);
        // [dx, dy]_{∂x∧∂y} = 0: all three terms vanish
        assert!(bivector_bracket_oneforms(&gamma, &dx, &dy)
            .unwrap()
            .is_zero());
        // [α, α]_γ = 0
        let alpha = OneForm::new(
            c.clone(),
            vec![parse_expr("x*y", &c).unwrap(), parse_expr("y", &c).unwrap()],
        )
        .unwrap();
        assert!(bivector_bracket_oneforms(&gamma, &alpha, &alpha)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn bivector_bracket_term_by_term_oracle() {
        let c = ch2();
        let gamma = Bivector::wedge(&c, 0, 1);
        let dx = OneForm::frame(&c, 0);
        let x = parse_expr("x", &c).unwrap();
        let xdy = OneForm::frame(&c, 1).scale(&x);
        // [dx, x dy]_γ expanded independently:
        // γ♯(dx) = ∂y, γ♯(x dy) = -x ∂x
        // L_{∂y}(x dy) − L_{-x∂x}(dx) − d(γ(dx, x dy))
        let t1 = lie_derivative_oneform(&VectorField::frame(&c, 1), &xdy).unwrap();
        let t2 = lie_derivative_oneform(&VectorField::frame(&c, 0).scale(&x.neg()), &dx).unwrap();
        let t3 = d_fn(&gamma.on_forms(&dx, &xdy).unwrap());
        let expect = t1.sub(&t2).sub(&t3);
        assert_eq!(
            bivector_bracket_oneforms(&gamma, &dx, &xdy).unwrap(),
            expect
        );
    }

    #[test]
    fn vector_field_grammar() {
        let c = ch2();
        let z = parse_vector_field("dx + i*x*dy", &c).unwrap();
        assert_eq!(z, vf(&c, &["1", "i*x"]));
        assert_eq!(parse_vector_field("0", &c).unwrap(), VectorField::zero(&c));
        let back = parse_vector_field(&z.to_string(), &c).unwrap();
        assert_eq!(z, back);
        // (x^2 - 1) * dy is linear with a polynomial coefficient
        let w = parse_vector_field("(x^2 - 1)*dy", &c).unwrap();
        assert_eq!(w, vf(&c, &["0", "x^2 - 1"]));
        // nonlinear or affine expressions rejected
        assert!(parse_vector_field("dx*dy", &c).is_err());
        assert!(parse_vector_field("x + dx", &c).is_err());
        assert!(parse_vector_field("dx^2", &c).is_err());
    }

    #[test]
    fn leibniz_rule_for_lie_derivative() {
        // L_X(fα) = (Xf)α + f L_X α on a few instances
        let c = ch2();
        let x = vf(&c, &["y", "x^2"]);
        let f = parse_expr("x + y^2", &c).unwrap();
        let alpha = OneForm::new(
            c.clone(),
            vec![parse_expr("x", &c).unwrap(), parse_expr("y", &c).unwrap()],
        )
        .unwrap();
        let lhs = lie_derivative_oneform(&x, &alpha.scale(&f)).unwrap();
        let rhs = alpha
            .scale(&x.apply(&f))
            .add(&lie_derivative_oneform(&x, &alpha).unwrap().scale(&f));
        assert_eq!(lhs, rhs);
    }
}

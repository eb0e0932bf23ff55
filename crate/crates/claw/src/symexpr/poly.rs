use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigRational, Zero};

use super::gaussian::GaussianRational;

/// Exponent vector of a monomial. Ordered by graded-lexicographic order:
/// total degree first, then lexicographic on exponents with earlier
/// variables weighing more.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
        }
    }

    pub fn var(index: usize, nvars: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(b, a)| b - a)
                .collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.exps.cmp(&other.exps),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over the Gaussian rationals.
///
/// Terms are keyed by monomial in graded-lex order; zero coefficients are
/// never stored, so the zero polynomial is the empty map and equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(GaussianRational::one(), nvars)
    }

    pub fn constant(c: GaussianRational, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(nvars), c);
        }
        Poly { nvars, terms }
    }

    pub fn var(index: usize, nvars: usize) -> Self {
        assert!(index < nvars);
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(index, nvars), GaussianRational::one());
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_unit())
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exps()[var]).max()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exps()[var] > 0)
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    fn insert_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] = e - 1;
            out.insert_term(Monomial { exps }, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    pub fn eval(&self, values: &[GaussianRational]) -> GaussianRational {
        debug_assert_eq!(values.len(), self.nvars);
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(m.exps()) {
                for _ in 0..e {
                    t = &t * v;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes each variable by the given real rational value.
    pub fn eval_real(&self, values: &[BigRational]) -> GaussianRational {
        let vals: Vec<GaussianRational> = values
            .iter()
            .map(|q| GaussianRational::from_real(q.clone()))
            .collect();
        self.eval(&vals)
    }

    /// Entrywise complex conjugation of the coefficients.
    pub fn conj(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Reindexes into a chart with `new_nvars` variables; `map[old] = new`.
    pub fn remap_vars(&self, map: &[usize], new_nvars: usize) -> Poly {
        debug_assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_nvars];
            for (old, &e) in m.exps().iter().enumerate() {
                exps[map[old]] += e;
            }
            out.insert_term(Monomial { exps }, c.clone());
        }
        out
    }

    /// Substitutes polynomials for the variables.
    pub fn compose(&self, images: &[Poly], out_nvars: usize) -> Poly {
        debug_assert_eq!(images.len(), self.nvars);
        let mut out = Poly::zero(out_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone(), out_nvars);
            for (img, &e) in images.iter().zip(m.exps()) {
                if e > 0 {
                    t = t.mul(&img.pow(e));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact division: `Some(q)` with `self = q * divisor`, else `None`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "exact division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        let (dm, dc) = {
            let (m, c) = divisor.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            if !dm.divides(&rm) {
                return None;
            }
            let qm = dm.div_into(&rm);
            let qc = &rc / &dc;
            quot.insert_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
        }
        Some(quot)
    }

    /// Views the polynomial as univariate in `var` with `Poly` coefficients
    /// (dense in the degree, ascending).
    fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var).map_or(0, |d| d as usize);
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exps()[var] as usize;
            let mut exps = m.exps().to_vec();
            exps[var] = 0;
            out[e].insert_term(Monomial { exps }, c.clone());
        }
        out
    }

    /// Content with respect to `var`: the gcd of the coefficient polynomials.
    fn content_in(&self, var: usize) -> Poly {
        let coeffs = self.coeffs_in(var);
        let mut g = Poly::zero(self.nvars);
        for c in &coeffs {
            if !c.is_zero() {
                g = gcd(&g, c);
            }
        }
        g
    }

    /// Dense constant coefficient vector when the polynomial uses no
    /// variable besides `var`; ascending degree, trailing entry nonzero.
    fn univariate_constants(&self, var: usize) -> Option<Vec<GaussianRational>> {
        let deg = self.degree_in(var)? as usize;
        let mut out = vec![GaussianRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            for (k, &e) in m.exps().iter().enumerate() {
                if k != var && e > 0 {
                    return None;
                }
            }
            out[m.exps()[var] as usize] = c.clone();
        }
        Some(out)
    }

    fn from_univariate_constants(coeffs: &[GaussianRational], var: usize, nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = vec![0u32; nvars];
            exps[var] = e as u32;
            out.insert_term(Monomial { exps }, c.clone());
        }
        out
    }

    /// Evaluates every variable except `var` at the given rational values
    /// (indexed by variable), leaving a dense univariate coefficient vector.
    fn specialize_except(&self, var: usize, values: &[GaussianRational]) -> Vec<GaussianRational> {
        let deg = self.degree_in(var).map_or(0, |d| d as usize);
        let mut out = vec![GaussianRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.exps().iter().enumerate() {
                if k == var {
                    continue;
                }
                for _ in 0..e {
                    t = &t * &values[k];
                }
            }
            let slot = m.exps()[var] as usize;
            out[slot] = &out[slot] + &t;
        }
        out
    }

    /// Leading coefficient in `var` as a polynomial in the other variables.
    fn leading_in(&self, var: usize) -> Poly {
        let coeffs = self.coeffs_in(var);
        coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.nvars))
    }
}

/// Scales a nonzero polynomial so its graded-lex leading coefficient is 1.
pub fn monic(p: &Poly) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let lc = p.leading_coeff();
    p.scale(&lc.inv())
}

/// Greatest common divisor, normalized monic under graded-lex.
///
/// Univariate inputs go through the monic Euclidean algorithm over ℚ(i);
/// multivariate inputs use a primitive pseudo-remainder sequence recursing
/// on the variable set, with contents bottoming out in the univariate
/// path. Constants are units, so the gcd of two nonzero constants is 1.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars());
    }
    // Main variable: the first one actually used by either operand.
    let var = (0..a.nvars())
        .find(|&v| a.uses_var(v) || b.uses_var(v))
        .expect("non-constant polynomial uses some variable");
    if !a.uses_var(var) || !b.uses_var(var) {
        // One operand is free of the main variable: gcd divides its
        // coefficients, so recurse through the content.
        let (free, full) = if a.uses_var(var) { (b, a) } else { (a, b) };
        return monic(&gcd(free, &full.content_in(var)));
    }
    if let (Some(u), Some(v)) = (a.univariate_constants(var), b.univariate_constants(var)) {
        let g = gcd_univariate(u, v);
        return monic(&Poly::from_univariate_constants(&g, var, a.nvars()));
    }

    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let cg = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");

    // Coprimality shortcut: specialize the other variables at a point where
    // both leading coefficients survive. The specialized image of any
    // common divisor keeps its degree in `var`, so a degree-0 specialized
    // gcd proves the primitive parts coprime. Inconclusive specializations
    // fall through to the remainder sequence; the result never depends on
    // the chosen point.
    if primitive_parts_coprime(&pa, &pb, var) {
        return monic(&cg);
    }

    let mut r0 = pa;
    let mut r1 = pb;
    if r0.degree_in(var) < r1.degree_in(var) {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        let rem = pseudo_rem(&r0, &r1, var);
        if rem.is_zero() {
            let prim = r1.div_exact(&r1.content_in(var)).expect("content divides");
            return monic(&cg.mul(&prim));
        }
        let prim = rem
            .div_exact(&rem.content_in(var))
            .expect("content divides");
        r0 = r1;
        r1 = prim;
        if r1.degree_in(var).is_none() || r1.degree_in(var) == Some(0) {
            // Remainder dropped to degree 0 in the main variable: coprime
            // apart from content.
            return monic(&cg);
        }
    }
}

/// Tries to prove gcd(pa, pb) constant by a univariate evaluation: picks a
/// deterministic specialization of the non-main variables that keeps both
/// leading coefficients nonzero and checks the specialized gcd.
fn primitive_parts_coprime(pa: &Poly, pb: &Poly, var: usize) -> bool {
    let nvars = pa.nvars();
    let la = pa.leading_in(var);
    let lb = pb.leading_in(var);
    for attempt in 0u32..3 {
        let values: Vec<GaussianRational> = (0..nvars)
            .map(|k| GaussianRational::from_int(2 + attempt as i64 * 5 + 3 * k as i64))
            .collect();
        let eval_nonzero = |p: &Poly| {
            let v = p.specialize_except(var, &values);
            debug_assert!(v.len() == 1);
            !v[0].is_zero()
        };
        if !eval_nonzero(&la) || !eval_nonzero(&lb) {
            continue;
        }
        let ua = pa.specialize_except(var, &values);
        let ub = pb.specialize_except(var, &values);
        let g = gcd_univariate(ua, ub);
        if g.len() == 1 {
            return true;
        }
        // a positive specialized degree is inconclusive (the point may be
        // unlucky); try another point before paying for the full sequence
    }
    false
}

/// Monic Euclidean algorithm on dense constant coefficient vectors
/// (ascending degree). Normalizing each remainder to monic keeps the
/// rational coefficients from compounding the way raw pseudo-remainders do.
fn gcd_univariate(u: Vec<GaussianRational>, v: Vec<GaussianRational>) -> Vec<GaussianRational> {
    fn trim(mut p: Vec<GaussianRational>) -> Vec<GaussianRational> {
        while p.last().is_some_and(GaussianRational::is_zero) {
            p.pop();
        }
        p
    }
    fn make_monic(mut p: Vec<GaussianRational>) -> Vec<GaussianRational> {
        if let Some(lc) = p.last().cloned() {
            let inv = lc.inv();
            for c in &mut p {
                *c = &*c * &inv;
            }
        }
        p
    }
    let mut r0 = make_monic(trim(u));
    let mut r1 = make_monic(trim(v));
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_empty() {
        // rem = r0 mod r1, with r1 monic so no scaling is needed.
        let dv = r1.len() - 1;
        let mut rem = r0;
        while rem.len() > dv {
            let lead = rem.last().expect("trimmed").clone();
            let shift = rem.len() - 1 - dv;
            for (k, c) in r1.iter().enumerate() {
                let t = &lead * c;
                rem[shift + k] = &rem[shift + k] - &t;
            }
            rem = trim(rem);
            if rem.is_empty() {
                break;
            }
        }
        r0 = r1;
        r1 = make_monic(rem);
    }
    r0
}

/// Least common multiple, monic.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero(a.nvars());
    }
    let g = gcd(a, b);
    monic(&a.mul(&b.div_exact(&g).expect("gcd divides")))
}

/// Pseudo-remainder of `u` by `v` in `var`: repeatedly scales `u` by the
/// leading coefficient of `v` and subtracts a matching multiple, so the gcd
/// up to content is preserved without any coefficient division.
fn pseudo_rem(u: &Poly, v: &Poly, var: usize) -> Poly {
    let dv = v.degree_in(var).expect("divisor nonzero") as i64;
    let vc = v.coeffs_in(var);
    let lv = vc.last().unwrap().clone();
    let mut r = u.clone();
    loop {
        let dr = match r.degree_in(var) {
            None => return r,
            Some(d) => d as i64,
        };
        if dr < dv {
            return r;
        }
        let rc = r.coeffs_in(var);
        let lr = rc.last().unwrap().clone();
        // r <- lv*r - lr*x^(dr-dv)*v
        let shift = {
            let mut exps = vec![0u32; u.nvars()];
            exps[var] = (dr - dv) as u32;
            Monomial { exps }
        };
        let scaled_v = v.mul(&lr).mul_monomial(&shift, &GaussianRational::one());
        r = r.mul(&lv).sub(&scaled_v);
    }
}

/// Renders a polynomial with the given variable names, terms in descending
/// graded-lex order, in a form the expression grammar re-parses.
pub fn format_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    for (m, c) in p.terms.iter().rev() {
        let mono: Vec<String> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect();
        let term = if mono.is_empty() {
            c.to_string()
        } else {
            let ms = mono.join("*");
            if c.is_one() {
                ms
            } else if (-c).is_one() {
                format!("-{}", ms)
            } else if c.is_real() || c.re().is_zero() {
                format!("{}*{}", c, ms)
            } else {
                format!("({})*{}", c, ms)
            }
        };
        parts.push(term);
    }
    let mut out = parts[0].clone();
    for term in &parts[1..] {
        if let Some(rest) = term.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(term);
        }
    }
    out
}

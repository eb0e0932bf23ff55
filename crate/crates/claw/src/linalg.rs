//! Exact dense linear algebra over the scalar fields of the workbench:
//! ℚ, ℚ(i) and the field of rational expressions.
//!
//! Elimination is fraction-free in the Bareiss sense: every intermediate
//! entry is a minor of the input, and the single division per update is
//! exact in the coefficient ring. Pivoting is deterministic: smallest
//! column index first, ties among candidate rows broken by the
//! lexicographically smallest canonical form.

use num::BigRational;

use crate::symexpr::{GaussianRational, RationalExpr};

/// An exact field with decidable equality and a canonical printed form.
///
/// No nullary constants: rational expressions carry a chart, so zeros and
/// ones are derived from existing entries or passed in explicitly.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Division by a nonzero element; exact.
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Deterministic key used only for pivot tie-breaking.
    fn canonical_key(&self) -> String;

    fn zero_like(&self) -> Self {
        self.sub(self)
    }
}

impl Scalar for GaussianRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn canonical_key(&self) -> String {
        self.to_string()
    }
}

impl Scalar for BigRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
    fn canonical_key(&self) -> String {
        self.to_string()
    }
}

impl Scalar for RationalExpr {
    fn add(&self, other: &Self) -> Self {
        RationalExpr::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RationalExpr::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RationalExpr::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        RationalExpr::div(self, other).expect("division by nonzero pivot")
    }
    fn neg(&self) -> Self {
        RationalExpr::neg(self)
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
    fn canonical_key(&self) -> String {
        self.to_string()
    }
}

/// Selects the pivot row for `col` among rows `from..`: nonzero entry with
/// the lexicographically smallest canonical form, then smallest row index.
fn pick_pivot<S: Scalar>(rows: &[Vec<S>], from: usize, col: usize) -> Option<usize> {
    let mut best: Option<(String, usize)> = None;
    for (k, row) in rows.iter().enumerate().skip(from) {
        if row[col].is_zero() {
            continue;
        }
        let key = row[col].canonical_key();
        match &best {
            Some((bk, _)) if *bk <= key => {}
            _ => best = Some((key, k)),
        }
    }
    best.map(|(_, k)| k)
}

/// Fraction-free (Bareiss) row echelon form. Returns the echelon rows and
/// the pivot columns; the rank is the pivot count.
pub fn echelon<S: Scalar>(mut rows: Vec<Vec<S>>) -> (Vec<Vec<S>>, Vec<usize>) {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev: Option<S> = None;
    let mut r = 0;
    for c in 0..ncols {
        if r >= nrows {
            break;
        }
        let Some(p) = pick_pivot(&rows, r, c) else {
            continue;
        };
        rows.swap(r, p);
        for k in r + 1..nrows {
            for j in c + 1..ncols {
                let t = rows[r][c]
                    .mul(&rows[k][j])
                    .sub(&rows[k][c].mul(&rows[r][j]));
                rows[k][j] = match &prev {
                    Some(d) => t.div(d),
                    None => t,
                };
            }
            rows[k][c] = rows[r][c].zero_like();
        }
        prev = Some(rows[r][c].clone());
        pivots.push(c);
        r += 1;
    }
    (rows, pivots)
}

/// Rank by fraction-free elimination.
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    echelon(rows.to_vec()).1.len()
}

/// Reduced row echelon form with unit pivots; rows beyond the rank are
/// dropped. The output is the canonical basis of the row space.
#[allow(clippy::needless_range_loop)]
pub fn rref<S: Scalar>(rows: &[Vec<S>]) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut rows = rows.to_vec();
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= nrows {
            break;
        }
        let Some(p) = pick_pivot(&rows, r, c) else {
            continue;
        };
        rows.swap(r, p);
        let inv_pivot = rows[r][c].clone();
        for j in c..ncols {
            rows[r][j] = rows[r][j].div(&inv_pivot);
        }
        for k in 0..nrows {
            if k == r || rows[k][c].is_zero() {
                continue;
            }
            let factor = rows[k][c].clone();
            for j in c..ncols {
                let t = rows[r][j].mul(&factor);
                rows[k][j] = rows[k][j].sub(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(pivots.len());
    (rows, pivots)
}

/// Basis of the right kernel `{x : M x = 0}`, one canonical vector per free
/// column (unit at the free column, in ascending column order).
pub fn right_kernel<S: Scalar>(rows: &[Vec<S>], ncols: usize, zero: &S, one: &S) -> Vec<Vec<S>> {
    let (rr, pivots) = rref(rows);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (prow, &pcol) in rr.iter().zip(&pivots) {
            v[pcol] = prow[free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solves `M x = b`; `None` when inconsistent. Free variables are set to 0,
/// giving a deterministic particular solution.
pub fn solve<S: Scalar>(rows: &[Vec<S>], rhs: &[S], ncols: usize, zero: &S) -> Option<Vec<S>> {
    let aug: Vec<Vec<S>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![zero.clone(); ncols]);
    }
    let (rr, pivots) = rref(&aug);
    if pivots.contains(&ncols) {
        return None; // pivot in the rhs column
    }
    let mut x = vec![zero.clone(); ncols];
    for (prow, &pcol) in rr.iter().zip(&pivots) {
        x[pcol] = prow[ncols].clone();
    }
    Some(x)
}

/// A subspace of ℚ(i)ⁿ (or ℚⁿ when every entry is real), stored as the
/// canonical reduced row echelon basis of its spanning set.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<GaussianRational>>,
}

impl Subspace {
    pub fn from_spanning(vectors: Vec<Vec<GaussianRational>>, ambient: usize) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let (basis, _) = rref(&vectors);
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut basis = Vec::new();
        for k in 0..ambient {
            let mut v = vec![GaussianRational::zero(); ambient];
            v[k] = GaussianRational::one();
            basis.push(v);
        }
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<GaussianRational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        let mut stacked = self.basis.clone();
        stacked.push(v.to_vec());
        rank(&stacked) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        debug_assert_eq!(self.ambient, other.ambient);
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::from_spanning(all, self.ambient)
    }

    /// Intersection via the kernel of the stacked coefficient matrix.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        debug_assert_eq!(self.ambient, other.ambient);
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // Solve a·U - b·W = 0 over the coefficients (a, b); columns of the
        // system are the ambient coordinates, so transpose.
        let k = self.dim();
        let l = other.dim();
        let mut rows = Vec::with_capacity(self.ambient);
        for col in 0..self.ambient {
            let mut row = Vec::with_capacity(k + l);
            for v in &self.basis {
                row.push(v[col].clone());
            }
            for w in &other.basis {
                row.push(-&w[col]);
            }
            rows.push(row);
        }
        let zero = GaussianRational::zero();
        let one = GaussianRational::one();
        let kernel = right_kernel(&rows, k + l, &zero, &one);
        let mut spanning = Vec::new();
        for coeffs in kernel {
            let mut v = vec![GaussianRational::zero(); self.ambient];
            for (a, b) in coeffs[..k].iter().zip(&self.basis) {
                for (slot, entry) in v.iter_mut().zip(b) {
                    *slot = &*slot + &a.mul(entry);
                }
            }
            spanning.push(v);
        }
        Subspace::from_spanning(spanning, self.ambient)
    }

    /// Entrywise complex conjugate of the subspace.
    pub fn conj(&self) -> Subspace {
        let vectors = self
            .basis
            .iter()
            .map(|v| v.iter().map(|c| c.conj()).collect())
            .collect();
        Subspace::from_spanning(vectors, self.ambient)
    }

    /// The real points `S ∩ ℝⁿ`, returned as a subspace with real entries.
    pub fn real_points(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // v = (u + i w)·B real  ⟺  u·Im(B) + w·Re(B) = 0 over ℚ.
        let k = self.dim();
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(2 * k);
        for v in &self.basis {
            rows.push(v.iter().map(|c| c.im().clone()).collect());
        }
        for v in &self.basis {
            rows.push(v.iter().map(|c| c.re().clone()).collect());
        }
        // Left kernel of `rows` = right kernel of its transpose.
        let mut t: Vec<Vec<BigRational>> = vec![Vec::with_capacity(2 * k); self.ambient];
        for row in &rows {
            for (col, entry) in row.iter().enumerate() {
                t[col].push(entry.clone());
            }
        }
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        let kernel = right_kernel(&t, 2 * k, &zero, &one);
        let mut spanning = Vec::new();
        for uw in kernel {
            let (u, w) = uw.split_at(k);
            let mut v = vec![GaussianRational::zero(); self.ambient];
            for (coef, b) in u.iter().zip(&self.basis) {
                for (slot, entry) in v.iter_mut().zip(b) {
                    let c = GaussianRational::from_real(coef.clone());
                    *slot = &*slot + &(&c * entry);
                }
            }
            let iu = GaussianRational::i();
            for (coef, b) in w.iter().zip(&self.basis) {
                for (slot, entry) in v.iter_mut().zip(b) {
                    let c = &GaussianRational::from_real(coef.clone()) * &iu;
                    *slot = &*slot + &(&c * entry);
                }
            }
            spanning.push(v);
        }
        let out = Subspace::from_spanning(spanning, self.ambient);
        debug_assert!(out.basis.iter().flatten().all(|c| c.is_real()));
        out
    }
}

use std::fmt;

use crate::error::{Error, Result};

use super::chart::{Chart, Point};
use super::gaussian::GaussianRational;
use super::poly::{format_poly, gcd, Poly};

/// A multivariate rational function over the Gaussian rationals, kept in
/// canonical form: gcd(numerator, denominator) = 1 and the denominator is
/// monic under graded-lex. Two expressions over the same chart are equal as
/// functions iff their representations are identical.
#[derive(Clone, Eq, Debug)]
pub struct RationalExpr {
    chart: Chart,
    num: Poly,
    den: Poly,
}

impl RationalExpr {
    fn canonical(chart: Chart, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        if num.is_zero() {
            let n = chart.dim();
            return Ok(RationalExpr {
                chart,
                num: Poly::zero(n),
                den: Poly::one(n),
            });
        }
        if den.is_one() {
            return Ok(RationalExpr { chart, num, den });
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv();
            let n = chart.dim();
            return Ok(RationalExpr {
                chart,
                num: num.scale(&inv),
                den: Poly::one(n),
            });
        }
        let g = gcd(&num, &den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        let lc = den.leading_coeff().inv();
        Ok(RationalExpr {
            chart,
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        let n = chart.dim();
        RationalExpr {
            chart: chart.clone(),
            num: Poly::zero(n),
            den: Poly::one(n),
        }
    }

    pub fn one(chart: &Chart) -> Self {
        RationalExpr::constant(GaussianRational::one(), chart)
    }

    pub fn constant(c: GaussianRational, chart: &Chart) -> Self {
        let n = chart.dim();
        RationalExpr {
            chart: chart.clone(),
            num: Poly::constant(c, n),
            den: Poly::one(n),
        }
    }

    pub fn from_int(k: i64, chart: &Chart) -> Self {
        RationalExpr::constant(GaussianRational::from_int(k), chart)
    }

    pub fn i(chart: &Chart) -> Self {
        RationalExpr::constant(GaussianRational::i(), chart)
    }

    pub fn coordinate(chart: &Chart, name: &str) -> Result<Self> {
        let idx = chart
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(RationalExpr {
            chart: chart.clone(),
            num: Poly::var(idx, chart.dim()),
            den: Poly::one(chart.dim()),
        })
    }

    pub fn coordinate_index(chart: &Chart, idx: usize) -> Self {
        RationalExpr {
            chart: chart.clone(),
            num: Poly::var(idx, chart.dim()),
            den: Poly::one(chart.dim()),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `Some(c)` when the expression is the constant function `c`.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }

    /// Reinterprets the expression over a chart containing every variable of
    /// the current one.
    pub fn extend_to(&self, chart: &Chart) -> Result<Self> {
        if &self.chart == chart {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .chart
            .names()
            .iter()
            .map(|n| {
                chart.index_of(n).ok_or_else(|| {
                    Error::ChartMismatch(format!("variable `{}` missing from chart {}", n, chart))
                })
            })
            .collect::<Result<_>>()?;
        let n = chart.dim();
        Ok(RationalExpr {
            chart: chart.clone(),
            num: self.num.remap_vars(&map, n),
            den: self.den.remap_vars(&map, n),
        })
    }

    fn aligned(a: &RationalExpr, b: &RationalExpr) -> (RationalExpr, RationalExpr) {
        if a.chart == b.chart {
            (a.clone(), b.clone())
        } else {
            let u = a.chart.union(&b.chart);
            (a.extend_to(&u).unwrap(), b.extend_to(&u).unwrap())
        }
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() && self.chart == other.chart {
            return other.clone();
        }
        if other.is_zero() && self.chart == other.chart {
            return self.clone();
        }
        let (a, b) = RationalExpr::aligned(self, other);
        if a.den.is_one() && b.den.is_one() {
            return RationalExpr {
                chart: a.chart,
                num: a.num.add(&b.num),
                den: a.den,
            };
        }
        // Combine over the lcm of the denominators so repeated sums with a
        // shared denominator do not square it.
        if a.den == b.den {
            return RationalExpr::canonical(a.chart, a.num.add(&b.num), a.den)
                .expect("denominator nonzero");
        }
        let g = gcd(&a.den, &b.den);
        if g.is_one() {
            // na·db + nb·da is already coprime to da·db.
            let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
            let den = a.den.mul(&b.den);
            RationalExpr::reduced(a.chart, num, den)
        } else {
            let da = a.den.div_exact(&g).expect("gcd divides");
            let db = b.den.div_exact(&g).expect("gcd divides");
            let num = a.num.mul(&db).add(&b.num.mul(&da));
            let den = a.den.mul(&db);
            RationalExpr::canonical(a.chart, num, den).expect("denominators nonzero")
        }
    }

    /// Builds from a pair already known to be coprime; only normalizes the
    /// denominator to monic.
    fn reduced(chart: Chart, num: Poly, den: Poly) -> RationalExpr {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalExpr::zero(&chart);
        }
        if den.is_one() {
            return RationalExpr { chart, num, den };
        }
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalExpr { chart, num, den }
        } else {
            let inv = lc.inv();
            RationalExpr {
                chart,
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr {
            chart: self.chart.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        if (self.is_zero() || other.is_zero()) && self.chart == other.chart {
            return RationalExpr::zero(&self.chart);
        }
        let (a, b) = RationalExpr::aligned(self, other);
        if a.den.is_one() && b.den.is_one() {
            return RationalExpr {
                chart: a.chart,
                num: a.num.mul(&b.num),
                den: a.den,
            };
        }
        // Cross-cancel before multiplying: with both inputs canonical the
        // cancelled product is coprime again.
        let g1 = gcd(&a.num, &b.den);
        let g2 = gcd(&b.num, &a.den);
        let na = a.num.div_exact(&g1).expect("gcd divides");
        let nb = b.num.div_exact(&g2).expect("gcd divides");
        let da = a.den.div_exact(&g2).expect("gcd divides");
        let db = b.den.div_exact(&g1).expect("gcd divides");
        RationalExpr::reduced(a.chart, na.mul(&nb), da.mul(&db))
    }

    pub fn scale(&self, c: &GaussianRational) -> RationalExpr {
        if c.is_zero() {
            return RationalExpr::zero(&self.chart);
        }
        RationalExpr {
            chart: self.chart.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn div(&self, other: &RationalExpr) -> Result<RationalExpr> {
        if other.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        // The reciprocal of a canonical pair is canonical after scaling.
        let recip =
            RationalExpr::reduced(other.chart.clone(), other.den.clone(), other.num.clone());
        Ok(self.mul(&recip))
    }

    pub fn pow(&self, e: u32) -> RationalExpr {
        RationalExpr {
            chart: self.chart.clone(),
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Quotient-rule partial derivative along a chart coordinate.
    pub fn differentiate(&self, var: &str) -> Result<RationalExpr> {
        let idx = self
            .chart
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(self.differentiate_index(idx))
    }

    pub fn differentiate_index(&self, idx: usize) -> RationalExpr {
        if self.den.is_one() {
            return RationalExpr {
                chart: self.chart.clone(),
                num: self.num.partial(idx),
                den: self.den.clone(),
            };
        }
        let d_prime = self.den.partial(idx);
        if !d_prime.is_zero() {
            // (n/d)' = (n'·d̂ − n·ê) / (d·d̂) with d = g·d̂, d' = g·ê,
            // g = gcd(d, d'): avoids forming d² before reducing.
            let g = gcd(&self.den, &d_prime);
            if !g.is_one() {
                let d_hat = self.den.div_exact(&g).expect("gcd divides");
                let e_hat = d_prime.div_exact(&g).expect("gcd divides");
                let num = self.num.partial(idx).mul(&d_hat).sub(&self.num.mul(&e_hat));
                let den = self.den.mul(&d_hat);
                return RationalExpr::canonical(self.chart.clone(), num, den)
                    .expect("nonzero denominator");
            }
        }
        let num = self
            .num
            .partial(idx)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(idx)));
        let den = self.den.mul(&self.den);
        RationalExpr::canonical(self.chart.clone(), num, den).expect("square of nonzero")
    }

    /// Exact evaluation at a rational point of the chart.
    pub fn evaluate(&self, p: &Point) -> Result<GaussianRational> {
        if p.dim() != self.chart.dim() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} coordinates, chart {} has {}",
                p.dim(),
                self.chart,
                self.chart.dim()
            )));
        }
        let den = self.den.eval_real(p.coords());
        if den.is_zero() {
            return Err(Error::PoleAtPoint(p.to_string()));
        }
        let num = self.num.eval_real(p.coords());
        Ok(&num / &den)
    }

    /// Substitutes expressions for the chart variables; `images[k]` replaces
    /// coordinate `k` and must all share one chart.
    pub fn substitute(&self, images: &[RationalExpr]) -> Result<RationalExpr> {
        if images.len() != self.chart.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} images for chart of dimension {}",
                images.len(),
                self.chart.dim()
            )));
        }
        if self.chart.dim() == 0 {
            return Ok(self.clone());
        }
        let target = images[0].chart.clone();
        let mut out = RationalExpr::zero(&target);
        // Evaluate num and den separately as polynomials in the images.
        let eval_poly = |p: &Poly| -> RationalExpr {
            let mut acc = RationalExpr::zero(&target);
            for (m, c) in p.terms() {
                let mut t = RationalExpr::constant(c.clone(), &target);
                for (img, &e) in images.iter().zip(m.exps()) {
                    if e > 0 {
                        t = t.mul(&img.pow(e));
                    }
                }
                acc = acc.add(&t);
            }
            acc
        };
        let num = eval_poly(&self.num);
        let den = eval_poly(&self.den);
        if den.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        out = out.add(&num.div(&den)?);
        Ok(out)
    }

    /// Coefficientwise complex conjugation.
    pub fn conj(&self) -> RationalExpr {
        RationalExpr::canonical(self.chart.clone(), self.num.conj(), self.den.conj())
            .expect("conjugate of nonzero denominator")
    }

    /// Real part as a function: `(f + conj f)/2`.
    pub fn re_part(&self) -> RationalExpr {
        let half = RationalExpr::constant(
            GaussianRational::new(
                num::BigRational::new(1.into(), 2.into()),
                num::BigRational::from_integer(0.into()),
            ),
            &self.chart,
        );
        self.add(&self.conj()).mul(&half)
    }

    /// Imaginary part as a function: `(f - conj f)/(2i)`.
    pub fn im_part(&self) -> RationalExpr {
        let two_i = RationalExpr::constant(
            GaussianRational::new(
                num::BigRational::from_integer(0.into()),
                num::BigRational::from_integer(2.into()),
            ),
            &self.chart,
        );
        self.sub(&self.conj()).div(&two_i).expect("2i is nonzero")
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.chart == other.chart {
            self.num == other.num && self.den == other.den
        } else {
            self.sub(other).is_zero()
        }
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.names();
        if self.den.is_one() {
            write!(f, "{}", format_poly(&self.num, names))
        } else {
            write!(
                f,
                "({})/({})",
                format_poly(&self.num, names),
                format_poly(&self.den, names)
            )
        }
    }
}

use std::fmt;
use std::sync::Arc;

use num::BigRational;

use crate::error::{Error, Result};

/// An ordered list of coordinate names; the variable context every
/// expression, field and algebroid is attached to.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chart {
    names: Arc<Vec<String>>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    /// Builds a chart from coordinate names. Names must be distinct
    /// identifiers; `i` is reserved for the imaginary unit.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for n in &names {
            if !valid_ident(n) {
                return Err(Error::InvalidChart(format!("`{}` is not an identifier", n)));
            }
            if n == "i" {
                return Err(Error::InvalidChart(
                    "`i` is reserved for the imaginary unit".to_string(),
                ));
            }
        }
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{}`", n)));
            }
        }
        Ok(Chart {
            names: Arc::new(names),
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Union preserving the order of `self`, then new names of `other`.
    pub fn union(&self, other: &Chart) -> Chart {
        if self == other {
            return self.clone();
        }
        let mut names: Vec<String> = self.names.as_ref().clone();
        for n in other.names.iter() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Chart {
            names: Arc::new(names),
        }
    }

    pub fn is_subchart_of(&self, other: &Chart) -> bool {
        self.names.iter().all(|n| other.index_of(n).is_some())
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

/// A point of the chart domain, with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    coords: Vec<BigRational>,
}

impl Point {
    pub fn new(coords: Vec<BigRational>) -> Self {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![BigRational::from_integer(0.into()); dim],
        }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point {
            coords: coords
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Parses `1,-1/2,0` as a point.
    pub fn parse(src: &str) -> Result<Self> {
        if src.trim().is_empty() {
            return Ok(Point::new(Vec::new()));
        }
        let mut coords = Vec::new();
        for part in src.split(',') {
            let q: BigRational = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid rational `{}`", part.trim())))?;
            coords.push(q);
        }
        Ok(Point::new(coords))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|q| {
                if q.denom() == &num::BigInt::from(1) {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicates() {
        assert!(Chart::new(vec!["i"]).is_err());
        assert!(Chart::new(vec!["x", "x"]).is_err());
        assert!(Chart::new(vec!["2x"]).is_err());
        assert!(Chart::new(vec!["x", "y"]).is_ok());
    }

    #[test]
    fn union_keeps_order() {
        let a = Chart::new(vec!["x", "y"]).unwrap();
        let b = Chart::new(vec!["y", "z"]).unwrap();
        assert_eq!(a.union(&b).names(), &["x", "y", "z"]);
    }

    #[test]
    fn point_parsing() {
        let p = Point::parse("1, -1/2").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.to_string(), "(1, -1/2)");
    }
}

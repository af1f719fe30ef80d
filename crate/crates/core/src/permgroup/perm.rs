//! Permutations of `{0, …, m-1}` stored as image arrays.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

/// A point of the permuted set. Wire formats carry points as `u16`,
/// which bounds the degree at 65535.
pub type Point = u16;

pub const MAX_DEGREE: usize = u16::MAX as usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image list of length {0} is not a bijection")]
    NotBijective(usize),
    #[error("degree {0} out of range (must be 1..={MAX_DEGREE})")]
    BadDegree(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

/// A bijection on `{0, …, m-1}`; entry `i` of the image array is the
/// image of point `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<Point>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!((1..=MAX_DEGREE).contains(&degree));
        Self {
            images: (0..degree as Point).collect(),
        }
    }

    pub fn from_images(images: Vec<Point>) -> Result<Self, PermError> {
        let m = images.len();
        if m == 0 || m > MAX_DEGREE {
            return Err(PermError::BadDegree(m));
        }
        let mut seen = vec![false; m];
        for &img in &images {
            if (img as usize) >= m || seen[img as usize] {
                return Err(PermError::NotBijective(m));
            }
            seen[img as usize] = true;
        }
        Ok(Self { images })
    }

    /// Build from disjoint-or-not cycles over points `0..degree`.
    /// Cycles are applied as a product, leftmost applied last, matching
    /// the composition convention below. Repeated points across cycles
    /// are legal ("(0 1)(1 2)" is their composition).
    pub fn from_cycles(cycles: &[Vec<Point>], degree: usize) -> Result<Self, PermError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(PermError::BadDegree(degree));
        }
        let mut acc = Permutation::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<Point> = (0..degree as Point).collect();
            for (i, &p) in cycle.iter().enumerate() {
                let q = cycle[(i + 1) % cycle.len()];
                if p as usize >= degree || q as usize >= degree {
                    return Err(PermError::Parse(format!(
                        "cycle point {} outside degree {degree}",
                        p.max(q)
                    )));
                }
                images[p as usize] = q;
            }
            let step = Permutation::from_images(images)
                .map_err(|_| PermError::Parse("cycle repeats a point".into()))?;
            acc = step.compose(&acc).expect("degrees equal");
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn apply(&self, point: Point) -> Point {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img as usize)
    }

    /// Smallest point moved by this permutation, if any.
    pub fn min_moved_point(&self) -> Option<Point> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &img)| *i != img as usize)
            .map(|(i, _)| i as Point)
    }

    /// Composition `(self ∘ other)(x) = self(other(x))`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: other
                .images
                .iter()
                .map(|&y| self.images[y as usize])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0 as Point; self.degree()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as Point;
        }
        Permutation { images }
    }

    /// Text form: space-separated 1-indexed image list.
    pub fn to_text(&self) -> String {
        self.images
            .iter()
            .map(|&p| (p as u32 + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse the text form. A line starting with `(` is read as cycle
    /// notation (1-indexed points, `degree` supplies the domain);
    /// otherwise it must be a full 1-indexed image list.
    pub fn parse_text(line: &str, degree: Option<usize>) -> Result<Self, PermError> {
        let line = line.trim();
        if line.starts_with('(') {
            let degree = degree.ok_or_else(|| {
                PermError::Parse("cycle notation needs a known degree".into())
            })?;
            let mut cycles = Vec::new();
            let mut rest = line;
            while !rest.is_empty() {
                if !rest.starts_with('(') {
                    return Err(PermError::Parse(format!("unexpected text: {rest}")));
                }
                let close = rest
                    .find(')')
                    .ok_or_else(|| PermError::Parse("unclosed cycle".into()))?;
                let body = &rest[1..close];
                let cycle = parse_points(body)?;
                if cycle.is_empty() {
                    return Err(PermError::Parse("empty cycle".into()));
                }
                cycles.push(cycle);
                rest = rest[close + 1..].trim_start();
            }
            Self::from_cycles(&cycles, degree)
        } else {
            let images = parse_points(line)?;
            let perm = Self::from_images(images)?;
            if let Some(d) = degree {
                if perm.degree() != d {
                    return Err(PermError::DegreeMismatch(perm.degree(), d));
                }
            }
            Ok(perm)
        }
    }
}

/// 1-indexed whitespace- or comma-separated point list to 0-indexed points.
fn parse_points(text: &str) -> Result<Vec<Point>, PermError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            let n: u32 = tok
                .parse()
                .map_err(|_| PermError::Parse(format!("bad point: {tok}")))?;
            if n == 0 || n as usize > MAX_DEGREE + 1 {
                return Err(PermError::Parse(format!("point {n} out of range (1-indexed)")));
            }
            Ok((n - 1) as Point)
        })
        .collect()
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// Panicking composition for internal use where degrees are already
    /// validated; `p * q` applies `q` first.
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs).expect("degree mismatch in product")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm[{}]", self.to_text())
    }
}

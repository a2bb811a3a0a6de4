//! Arithmetic and line geometry of the vector space `Z_p^n`, `p` prime.
//!
//! Points are identified by their base-`p` positional index, most significant
//! coordinate first, so `(2,1,0,2)` in `Z_3^4` is point 65. Every operation on
//! points goes through a [`Geometry`], which owns `p` and `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `p^n`; pair tables are quadratic in the point count.
pub const MAX_POINTS: u32 = 1 << 24;

/// A point of `Z_p^n`, stored as its positional index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point(pub u32);

impl Point {
    pub const ZERO: Point = Point(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The elementary abelian group `Z_p^n` viewed as the affine space AG(n, p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    p: u32,
    n: u32,
    size: u32,
}

pub fn is_prime(m: u32) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Geometry {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let size = p
            .checked_pow(n)
            .filter(|&s| s <= MAX_POINTS)
            .ok_or(Error::GeometryTooLarge { p, n })?;
        Ok(Self { p, n, size })
    }

    /// `Z_3^4`, order 81.
    pub fn z3_4() -> Self {
        Self {
            p: 3,
            n: 4,
            size: 81,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of points, `p^n`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + Clone {
        (0..self.size).map(Point)
    }

    pub fn nonzero_points(&self) -> impl Iterator<Item = Point> + Clone {
        (1..self.size).map(Point)
    }

    pub fn point(&self, index: u32) -> Result<Point> {
        if index < self.size {
            Ok(Point(index))
        } else {
            Err(Error::GeometryMismatch {
                index,
                size: self.size,
            })
        }
    }

    pub fn contains(&self, a: Point) -> bool {
        a.0 < self.size
    }

    /// Builds a point from its coordinate tuple.
    pub fn encode(&self, coords: &[u32]) -> Result<Point> {
        if coords.len() != self.n as usize {
            return Err(Error::WrongArity {
                expected: self.n as usize,
                got: coords.len(),
            });
        }
        let mut index = 0u32;
        for (position, &value) in coords.iter().enumerate() {
            if value >= self.p {
                return Err(Error::CoordinateOutOfRange {
                    position,
                    value,
                    p: self.p,
                });
            }
            index = index * self.p + value;
        }
        Ok(Point(index))
    }

    pub fn decode(&self, a: Point) -> Vec<u32> {
        debug_assert!(self.contains(a));
        let mut coords = vec![0; self.n as usize];
        let mut rest = a.0;
        for c in coords.iter_mut().rev() {
            *c = rest % self.p;
            rest /= self.p;
        }
        coords
    }

    /// Coordinatewise `a + b` for points known to lie in this geometry.
    pub fn add(&self, a: Point, b: Point) -> Point {
        debug_assert!(self.contains(a) && self.contains(b));
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Point(out)
    }

    /// Like [`Geometry::add`] but rejects points from a different geometry.
    pub fn checked_add(&self, a: Point, b: Point) -> Result<Point> {
        self.point(a.0)?;
        self.point(b.0)?;
        Ok(self.add(a, b))
    }

    pub fn neg(&self, a: Point) -> Point {
        self.scale(self.p - 1, a)
    }

    pub fn sub(&self, a: Point, b: Point) -> Point {
        self.add(a, self.neg(b))
    }

    /// Scalar multiple `c·a`.
    pub fn scale(&self, c: u32, a: Point) -> Point {
        let p = self.p;
        let c = c % p;
        let mut x = a.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += (x % p) * c % p * place;
            x /= p;
            place *= p;
        }
        Point(out)
    }

    /// Sum of a collection of points.
    pub fn sum<I: IntoIterator<Item = Point>>(&self, points: I) -> Point {
        points
            .into_iter()
            .fold(Point::ZERO, |acc, a| self.add(acc, a))
    }

    /// The member of smallest index in `{c·d : 1 <= c < p}`.
    pub fn canonical_direction(&self, d: Point) -> Point {
        (1..self.p).map(|c| self.scale(c, d)).min().unwrap_or(d)
    }

    /// One representative per parallel class, i.e. per 1-dimensional subspace.
    pub fn direction_representatives(&self) -> Vec<Point> {
        self.nonzero_points()
            .filter(|&d| self.canonical_direction(d) == d)
            .collect()
    }

    pub fn line_through(&self, base: Point, direction: Point) -> Result<Line> {
        self.point(base.0)?;
        self.point(direction.0)?;
        if direction.is_zero() {
            return Err(Error::ZeroDirection);
        }
        let mut points: Vec<Point> = (0..self.p)
            .map(|i| self.add(base, self.scale(i, direction)))
            .collect();
        points.sort_unstable();
        Ok(Line {
            direction: self.canonical_direction(direction),
            points,
        })
    }

    pub fn line_through_pair(&self, a: Point, b: Point) -> Result<Line> {
        self.point(a.0)?;
        self.point(b.0)?;
        if a == b {
            return Err(Error::CoincidentPoints);
        }
        self.line_through(a, self.sub(b, a))
    }

    /// All lines with the given direction; they partition the point set.
    pub fn parallel_class(&self, direction: Point) -> Result<Vec<Line>> {
        let mut seen = vec![false; self.size as usize];
        let mut lines = Vec::with_capacity((self.size / self.p) as usize);
        for a in self.points() {
            if seen[a.0 as usize] {
                continue;
            }
            let line = self.line_through(a, direction)?;
            for q in &line.points {
                seen[q.0 as usize] = true;
            }
            lines.push(line);
        }
        Ok(lines)
    }

    /// Digit string (`2102`) when `p <= 9`, bracketed tuple otherwise.
    pub fn format_point(&self, a: Point) -> String {
        let coords = self.decode(a);
        if self.p <= 9 {
            coords.iter().map(|c| char::from(b'0' + *c as u8)).collect()
        } else {
            let parts: Vec<String> = coords.iter().map(u32::to_string).collect();
            format!("({})", parts.join(","))
        }
    }
}

/// A line of AG(n, p): `p` points `base + i·direction`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    direction: Point,
    points: Vec<Point>,
}

impl Line {
    /// Canonical direction (smallest index in its scalar class).
    pub fn direction(&self) -> Point {
        self.direction
    }

    /// Smallest point on the line; identifies the line within its parallel class.
    pub fn base(&self) -> Point {
        self.points[0]
    }

    /// Points in ascending index order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, a: Point) -> bool {
        self.points.binary_search(&a).is_ok()
    }
}

//! Lattice points, the algebraic quadruple `(a, b, c; s)` and the elementary
//! arithmetic predicates used on them.
//!
//! Everything here is exact. Coordinates and quadruple components are `i64`;
//! every product that can leave that range is carried out in `i128` or with
//! checked arithmetic, and overflow surfaces as [`Error::Overflow`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on `n` for [`is_sum_of_two_squares`].
pub const DEFAULT_FACTORIZATION_BUDGET: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn checked_sub(self, other: Point) -> Result<Point> {
        Ok(Point {
            x: self.x.checked_sub(other.x).ok_or(Error::Overflow("point difference"))?,
            y: self.y.checked_sub(other.y).ok_or(Error::Overflow("point difference"))?,
        })
    }

    pub fn checked_add(self, other: Point) -> Result<Point> {
        Ok(Point {
            x: self.x.checked_add(other.x).ok_or(Error::Overflow("point sum"))?,
            y: self.y.checked_add(other.y).ok_or(Error::Overflow("point sum"))?,
        })
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist_sq(self, other: Point) -> Result<i64> {
        let d = other.checked_sub(self)?;
        let sq = |v: i64| v.checked_mul(v).ok_or(Error::Overflow("squared distance"));
        sq(d.x)?
            .checked_add(sq(d.y)?)
            .ok_or(Error::Overflow("squared distance"))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses `x,y`.
    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::PointSyntax(format!("expected `x,y`, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i64>()
                .map_err(|e| Error::PointSyntax(format!("`{s}`: {e}")))
        };
        Ok(Point::new(parse(x)?, parse(y)?))
    }
}

/// Positions of the three fleas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointTriple {
    pub p1: Point,
    pub p2: Point,
    pub p3: Point,
}

impl PointTriple {
    pub const fn new(p1: Point, p2: Point, p3: Point) -> Self {
        PointTriple { p1, p2, p3 }
    }

    pub fn points(&self) -> [Point; 3] {
        [self.p1, self.p2, self.p3]
    }

    pub fn from_points(points: [Point; 3]) -> Self {
        PointTriple::new(points[0], points[1], points[2])
    }

    /// Parses three whitespace separated `x,y` tokens.
    pub fn parse_list(tokens: &[&str]) -> Result<Self> {
        if tokens.len() != 3 {
            return Err(Error::PointSyntax(format!(
                "expected three points `x1,y1 x2,y2 x3,y3`, got {}",
                tokens.len()
            )));
        }
        Ok(PointTriple::new(tokens[0].parse()?, tokens[1].parse()?, tokens[2].parse()?))
    }

    fn ensure_distinct(&self) -> Result<()> {
        if self.p1 == self.p2 || self.p2 == self.p3 || self.p1 == self.p3 {
            return Err(Error::DegenerateInput(format!("coincident points in {self}")));
        }
        Ok(())
    }

    /// Twice the signed area; positive when the points run counterclockwise.
    pub fn signed_double_area(&self) -> Result<i64> {
        let e1 = self.p2.checked_sub(self.p1)?;
        let e2 = self.p3.checked_sub(self.p1)?;
        let s = e1.x as i128 * e2.y as i128 - e1.y as i128 * e2.x as i128;
        i64::try_from(s).map_err(|_| Error::Overflow("signed area"))
    }

    pub fn is_collinear(&self) -> Result<bool> {
        Ok(self.signed_double_area()? == 0)
    }
}

impl fmt::Display for PointTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ({}) ({})", self.p1, self.p2, self.p3)
    }
}

/// Squared side lengths; entry `i` is the side opposite vertex `i + 1`, so the
/// entries are `A`, `B`, `C` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SideSquares(pub [i64; 3]);

impl SideSquares {
    pub fn sorted(&self) -> [i64; 3] {
        let mut v = self.0;
        v.sort_unstable();
        v
    }

    pub fn sum(&self) -> i128 {
        self.0.iter().map(|&v| v as i128).sum()
    }
}

/// The algebraic state `(a, b, c; s)` with `s` twice the signed area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quadruple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub s: i64,
}

impl Quadruple {
    pub const fn new(a: i64, b: i64, c: i64, s: i64) -> Self {
        Quadruple { a, b, c, s }
    }

    pub const fn from_array(v: [i64; 4]) -> Self {
        Quadruple::new(v[0], v[1], v[2], v[3])
    }

    pub const fn to_array(self) -> [i64; 4] {
        [self.a, self.b, self.c, self.s]
    }

    pub const fn abc(self) -> [i64; 3] {
        [self.a, self.b, self.c]
    }

    /// Side square attached to coordinate `i`: the sum of the other two.
    /// No sign check; see [`sides_of`] for the validated version.
    pub fn side(self, i: usize) -> Result<i64> {
        let v = self.abc();
        v[(i + 1) % 3]
            .checked_add(v[(i + 2) % 3])
            .ok_or(Error::Overflow("side square"))
    }

    pub fn raw_sides(self) -> Result<[i64; 3]> {
        Ok([self.side(0)?, self.side(1)?, self.side(2)?])
    }

    /// `ab + ac + bc - s^2`, preserved by every jump.
    pub fn form(self) -> i128 {
        let (a, b, c, s) = (self.a as i128, self.b as i128, self.c as i128, self.s as i128);
        a * b + a * c + b * c - s * s
    }

    /// Parity of `a + b + c + s`.
    pub fn parity(self) -> u8 {
        let t = self.a as i128 + self.b as i128 + self.c as i128 + self.s as i128;
        t.rem_euclid(2) as u8
    }

    /// Quadruple of the triple without the distinct-points check; used on
    /// trace states, which may legitimately degenerate.
    pub(crate) fn of_points(t: &PointTriple) -> Result<Quadruple> {
        let big_a = t.p2.dist_sq(t.p3)?;
        let big_b = t.p3.dist_sq(t.p1)?;
        let big_c = t.p1.dist_sq(t.p2)?;
        let half = |x: i64, y: i64, z: i64| -> Result<i64> {
            let v = x as i128 + y as i128 - z as i128;
            debug_assert!(v % 2 == 0);
            i64::try_from(v / 2).map_err(|_| Error::Overflow("quadruple component"))
        };
        Ok(Quadruple {
            a: half(big_b, big_c, big_a)?,
            b: half(big_c, big_a, big_b)?,
            c: half(big_a, big_b, big_c)?,
            s: t.signed_double_area()?,
        })
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}; {})", self.a, self.b, self.c, self.s)
    }
}

pub fn side_squares(t: &PointTriple) -> Result<SideSquares> {
    t.ensure_distinct()?;
    Ok(SideSquares([t.p2.dist_sq(t.p3)?, t.p3.dist_sq(t.p1)?, t.p1.dist_sq(t.p2)?]))
}

pub fn quadruple_of(t: &PointTriple) -> Result<Quadruple> {
    t.ensure_distinct()?;
    Quadruple::of_points(t)
}

/// `A = b + c`, `B = a + c`, `C = a + b`; every side must be positive.
pub fn sides_of(q: Quadruple) -> Result<SideSquares> {
    let sides = q.raw_sides()?;
    if sides.iter().any(|&v| v < 1) {
        return Err(Error::NotATriangleState { a: q.a, b: q.b, c: q.c, s: q.s });
    }
    Ok(SideSquares(sides))
}

/// Checks `s^2 = ab + ac + bc` and `s^2 = AB - c^2` for all three pairings.
pub fn check_relations(q: Quadruple) -> bool {
    let (a, b, c, s) = (q.a as i128, q.b as i128, q.c as i128, q.s as i128);
    let s2 = s * s;
    let (big_a, big_b, big_c) = (b + c, a + c, a + b);
    s2 == a * b + a * c + b * c
        && s2 == big_a * big_b - c * c
        && s2 == big_b * big_c - a * a
        && s2 == big_c * big_a - b * b
}

/// Index of the smallest square sublattice holding the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SublatticeIndex(pub u64);

impl SublatticeIndex {
    pub fn is_primitive(self) -> bool {
        self.0 == 1
    }
}

/// Gaussian integer `re + i*im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Gaussian {
    pub re: i128,
    pub im: i128,
}

impl Gaussian {
    pub fn new(re: i128, im: i128) -> Self {
        Gaussian { re, im }
    }

    pub fn norm(self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    fn sub(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re - o.re, self.im - o.im)
    }

    /// Quotient rounded to the nearest Gaussian integer; remainder has norm
    /// at most half the divisor's.
    fn div_round(self, d: Gaussian) -> Gaussian {
        let n = d.norm();
        let num = self.mul(Gaussian::new(d.re, -d.im));
        let round = |v: i128| (2 * v + n).div_euclid(2 * n);
        Gaussian::new(round(num.re), round(num.im))
    }

    /// Exact quotient, if `d` divides `self`.
    pub fn div_exact(self, d: Gaussian) -> Option<Gaussian> {
        let n = d.norm();
        let num = self.mul(Gaussian::new(d.re, -d.im));
        if num.re % n != 0 || num.im % n != 0 {
            return None;
        }
        Some(Gaussian::new(num.re / n, num.im / n))
    }

    pub fn gcd(mut x: Gaussian, mut y: Gaussian) -> Gaussian {
        while !y.is_zero() {
            let r = x.sub(x.div_round(y).mul(y));
            x = y;
            y = r;
        }
        x
    }
}

fn edge_gcd(t: &PointTriple) -> Result<Gaussian> {
    let e1 = t.p2.checked_sub(t.p1)?;
    let e2 = t.p3.checked_sub(t.p1)?;
    let g = Gaussian::gcd(
        Gaussian::new(e1.x as i128, e1.y as i128),
        Gaussian::new(e2.x as i128, e2.y as i128),
    );
    if g.is_zero() {
        return Err(Error::DegenerateInput(format!("all points coincide in {t}")));
    }
    Ok(g)
}

/// Norm of the Gaussian gcd of the two edge vectors leaving `p1`.
pub fn primitivity_index(t: &PointTriple) -> Result<SublatticeIndex> {
    let g = edge_gcd(t)?;
    u64::try_from(g.norm())
        .map(SublatticeIndex)
        .map_err(|_| Error::Overflow("sublattice index"))
}

/// Maps the triple onto the primitive lattice it spans: `p1` goes to the
/// origin and, unless the triple is already primitive, the edge vectors are
/// divided by their Gaussian gcd. Areas
/// shrink by the returned index; orientation is kept.
pub fn rescale_primitive(t: &PointTriple) -> Result<(PointTriple, SublatticeIndex)> {
    let g = edge_gcd(t)?;
    let index = primitivity_index(t)?;
    if index.is_primitive() {
        let shift = |p: Point| p.checked_sub(t.p1);
        return Ok((PointTriple::new(Point::new(0, 0), shift(t.p2)?, shift(t.p3)?), index));
    }
    let to_point = |p: Point| -> Result<Point> {
        let d = p.checked_sub(t.p1)?;
        let q = Gaussian::new(d.x as i128, d.y as i128)
            .div_exact(g)
            .expect("gcd divides both edges");
        Ok(Point::new(
            i64::try_from(q.re).map_err(|_| Error::Overflow("rescaled point"))?,
            i64::try_from(q.im).map_err(|_| Error::Overflow("rescaled point"))?,
        ))
    };
    Ok((
        PointTriple::new(Point::new(0, 0), to_point(t.p2)?, to_point(t.p3)?),
        index,
    ))
}

pub fn is_sum_of_two_squares(n: u64) -> Result<bool> {
    is_sum_of_two_squares_with_budget(n, DEFAULT_FACTORIZATION_BUDGET)
}

/// True iff every prime `p = 3 (mod 4)` divides `n` to an even power.
pub fn is_sum_of_two_squares_with_budget(mut n: u64, budget: u64) -> Result<bool> {
    if n > budget {
        return Err(Error::FactorizationBudgetExceeded(n));
    }
    if n == 0 {
        return Ok(true);
    }
    while n % 2 == 0 {
        n /= 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if p % 4 == 3 && e % 2 == 1 {
                return Ok(false);
            }
        }
        p += 2;
    }
    Ok(n == 1 || n % 4 != 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityProfile {
    /// Exactly one even side square; both odd ones are `1 (mod 4)`.
    PrimitivePattern,
    AllEven,
    Other,
}

pub fn parity_profile(ss: &SideSquares) -> ParityProfile {
    let evens = ss.0.iter().filter(|&&v| v % 2 == 0).count();
    if evens == 3 {
        return ParityProfile::AllEven;
    }
    let odd_ok = ss.0.iter().filter(|&&v| v % 2 != 0).all(|&v| v.rem_euclid(4) == 1);
    if evens == 1 && odd_ok {
        ParityProfile::PrimitivePattern
    } else {
        ParityProfile::Other
    }
}

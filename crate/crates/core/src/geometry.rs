//! Point-level square jumps and their agreement with the matrix action.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algebra::{Axis, Generator, Word};
use crate::error::{Error, Result};
use crate::lattice::{Point, PointTriple, Quadruple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    /// +90 degrees.
    Ccw,
    /// -90 degrees.
    Cw,
}

impl Rotation {
    fn rotate(self, v: Point) -> Point {
        match self {
            Rotation::Ccw => Point::new(-v.y, v.x),
            Rotation::Cw => Point::new(v.y, -v.x),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rotation::Ccw => "+90",
            Rotation::Cw => "-90",
        })
    }
}

/// Which pair moves and which of the two squares on it is used.
/// `U` moves `(p2, p3)`, `V` moves `(p3, p1)`, `W` moves `(p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JumpChoice {
    pub axis: Axis,
    pub rotation: Rotation,
}

/// Indices of the moving pair `(P, Q)` for an axis.
const fn moving_pair(axis: Axis) -> (usize, usize) {
    match axis {
        Axis::U => (1, 2),
        Axis::V => (2, 0),
        Axis::W => (0, 1),
    }
}

/// Moves `P` and `Q` by `r = rot(P - Q)`, so that `P Q Q' P'` is a square.
pub fn jump_points(t: &PointTriple, j: JumpChoice) -> Result<PointTriple> {
    let (pi, qi) = moving_pair(j.axis);
    let mut pts = t.points();
    let r = j.rotation.rotate(pts[pi].checked_sub(pts[qi])?);
    pts[pi] = pts[pi].checked_add(r)?;
    pts[qi] = pts[qi].checked_add(r)?;
    Ok(PointTriple::from_points(pts))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub points: PointTriple,
    /// The jump that produced this step; `None` for the start.
    pub choice: Option<JumpChoice>,
    pub quadruple: Quadruple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn last(&self) -> &PointTriple {
        &self.steps.last().expect("trace has a start").points
    }

    /// One line per step: `index x1 y1 x2 y2 x3 y3 axis rotation s`, with
    /// `-` for the axis and rotation of the start line.
    pub fn write_lines<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, step) in self.steps.iter().enumerate() {
            let p = step.points.points();
            let (axis, rot) = match step.choice {
                Some(c) => (c.axis.to_string(), c.rotation.to_string()),
                None => ("-".to_string(), "-".to_string()),
            };
            writeln!(
                out,
                "{i} {} {} {} {} {} {} {axis} {rot} {}",
                p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y, step.quadruple.s
            )?;
        }
        Ok(())
    }
}

/// The rotation that realizes generator `g` on `t`: the one whose resulting
/// quadruple equals the matrix image.
fn realize(t: &PointTriple, g: Generator, step: usize) -> Result<(PointTriple, JumpChoice, Quadruple)> {
    let target = g.apply(Quadruple::of_points(t)?)?;
    for rotation in [Rotation::Ccw, Rotation::Cw] {
        let choice = JumpChoice { axis: g.axis, rotation };
        let next = jump_points(t, choice)?;
        if Quadruple::of_points(&next)? == target {
            return Ok((next, choice, target));
        }
    }
    Err(Error::ModelInconsistency {
        step,
        detail: format!("no square on {t} realizes {g} (expected {target})"),
    })
}

/// Replays `w` on the points, rightmost letter first.
pub fn simulate(t: &PointTriple, w: &Word) -> Result<Trace> {
    let mut steps = vec![TraceStep { points: *t, choice: None, quadruple: Quadruple::of_points(t)? }];
    let mut cur = *t;
    for (i, &g) in w.iter().rev().enumerate() {
        let (next, choice, q) = realize(&cur, g, i + 1)?;
        steps.push(TraceStep { points: next, choice: Some(choice), quadruple: q });
        cur = next;
    }
    Ok(Trace { steps })
}

/// Congruence (reflections included) by equal sorted side squares.
pub fn congruent(t1: &PointTriple, t2: &PointTriple) -> Result<bool> {
    Ok(sorted_sides(t1)? == sorted_sides(t2)?)
}

fn sorted_sides(t: &PointTriple) -> Result<[i64; 3]> {
    let mut v = [t.p2.dist_sq(t.p3)?, t.p3.dist_sq(t.p1)?, t.p1.dist_sq(t.p2)?];
    v.sort_unstable();
    Ok(v)
}

/// Replays `w` and checks at every step that the recomputed quadruple is
/// the matrix image, that the two coordinates not on the jump axis are
/// unchanged and that `s` moved by exactly the moving side square.
pub fn cross_validate(t: &PointTriple, w: &Word) -> Result<bool> {
    let mut cur = *t;
    for &g in w.iter().rev() {
        let before = Quadruple::of_points(&cur)?;
        let side = before.side(g.axis.index())?;
        let mut matched = false;
        for rotation in [Rotation::Ccw, Rotation::Cw] {
            let next = jump_points(&cur, JumpChoice { axis: g.axis, rotation })?;
            let after = Quadruple::of_points(&next)?;
            if after != g.apply(before)? {
                continue;
            }
            let i = g.axis.index();
            let untouched = (0..3).filter(|&k| k != i).all(|k| after.abc()[k] == before.abc()[k]);
            let ds = after.s as i128 - before.s as i128;
            if !untouched || ds != g.sign.value() as i128 * side as i128 {
                return Ok(false);
            }
            cur = next;
            matched = true;
            break;
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

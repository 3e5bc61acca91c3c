//! Built-in triangles.

use crate::lattice::{Point, PointTriple};

/// `(0,0), (2,1), (3,2)`: quadruple `(8, -3, 5; 1)`.
pub const fn g() -> PointTriple {
    PointTriple::new(Point::new(0, 0), Point::new(2, 1), Point::new(3, 2))
}

/// `(0,0), (2,0), (4,1)`: quadruple `(8, -4, 9; 2)`.
pub const fn h() -> PointTriple {
    PointTriple::new(Point::new(0, 0), Point::new(2, 0), Point::new(4, 1))
}

pub const fn unit_right() -> PointTriple {
    PointTriple::new(Point::new(0, 0), Point::new(1, 0), Point::new(0, 1))
}

pub const NAMES: [&str; 2] = ["G", "H"];

pub fn by_name(name: &str) -> Option<PointTriple> {
    match name {
        "G" | "g" => Some(g()),
        "H" | "h" => Some(h()),
        _ => None,
    }
}

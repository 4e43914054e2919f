//! Lattice points and small geometry helpers.

/// A point of the non-negative quadrant of the planar lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    #[inline]
    pub fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }

    /// Coordinatewise partial order; up-right paths exist iff this holds.
    #[inline]
    pub fn dominated_by(&self, other: &Point) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    /// Anti-diagonal level x + y.
    #[inline]
    pub fn level(&self) -> u64 {
        self.x as u64 + self.y as u64
    }

    #[inline]
    pub fn l1_distance(&self, other: &Point) -> u64 {
        (self.x as i64 - other.x as i64).unsigned_abs() + (self.y as i64 - other.y as i64).unsigned_abs()
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

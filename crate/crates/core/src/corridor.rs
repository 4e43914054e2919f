//! Planted corridors for importance sampling.
//!
//! A corridor is the two-segment polyline from the origin through the
//! directed waypoint on the anti-diagonal x + y = n to (n, n), together with
//! an l-infinity halfwidth. Sites within the halfwidth of the polyline are
//! sampled from the tilted law; everything else keeps the base law. The
//! waypoint sequence along the polyline is kept as declarative geometry with
//! near-uniform l1 gaps.

use crate::error::{Error, Result};
use crate::lattice::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    n: u32,
    t: f64,
    offset: f64,
    halfwidth: u32,
    spacing: u32,
    waypoints: Vec<Point>,
}

impl Corridor {
    /// Corridor aimed at direction `t + offset` on the scale-n lattice.
    pub fn new(n: u32, t: f64, offset: f64, halfwidth: u32, spacing: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                what: "corridor scale",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        let aim = t + offset;
        if !(0.0..=0.5).contains(&aim) {
            return Err(Error::InvalidParameter {
                what: "corridor direction t + offset",
                value: aim,
                requirement: "in [0, 1/2]",
            });
        }
        let spacing = spacing.clamp(1, n);
        let per_segment = (n as f64 / spacing as f64).round().max(1.0) as u64;
        let nf = n as f64;
        let mid_x = nf / 2.0 + aim * nf;
        let mut waypoints = Vec::with_capacity(2 * per_segment as usize + 1);
        // walk exact anti-diagonal levels; the x coordinate tracks the
        // polyline, whose slope against the level is at most 1 on both
        // segments, so floored coordinates stay coordinatewise ordered
        for j in 0..=(2 * per_segment) {
            let level = ((j as f64 / per_segment as f64) * nf).round() as u64;
            let x_real = if level <= n as u64 {
                level as f64 * mid_x / nf
            } else {
                mid_x + (level - n as u64) as f64 * (nf - mid_x) / nf
            };
            let lo = level.saturating_sub(n as u64);
            let x = (x_real.floor() as u64).clamp(lo, level.min(n as u64));
            waypoints.push(Point::new(x as u32, (level - x) as u32));
        }
        Ok(Corridor {
            n,
            t,
            offset,
            halfwidth,
            spacing,
            waypoints,
        })
    }

    /// Default geometry: aimed exactly at the target direction, halfwidth at
    /// the transversal fluctuation scale capped by the distance to the
    /// lattice boundary, eight waypoint gaps per segment.
    pub fn default_for(n: u32, t: f64) -> Result<Self> {
        Corridor::new(n, t, 0.0, default_halfwidth_for(n, t), (n / 8).max(1))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn halfwidth(&self) -> u32 {
        self.halfwidth
    }

    pub fn spacing(&self) -> u32 {
        self.spacing
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    pub fn matches(&self, n: u32, t: f64) -> Result<()> {
        if self.n != n || self.t != t {
            return Err(Error::CorridorMismatch {
                corridor_n: self.n,
                corridor_t: self.t,
                n,
                t,
            });
        }
        Ok(())
    }

    /// Membership mask over the rectangle `0..=width x 0..=height`,
    /// row-major. The origin is never tilted: its weight enters no passage
    /// value.
    pub fn region_mask(&self, width: u32, height: u32) -> Vec<bool> {
        let nf = self.n as f64;
        let aim = self.t + self.offset;
        let mid = (nf / 2.0 + aim * nf, nf / 2.0 - aim * nf);
        let segs = [((0.0, 0.0), mid), (mid, (nf, nf))];
        let hw = self.halfwidth as f64;
        let mut mask = Vec::with_capacity((width as usize + 1) * (height as usize + 1));
        for j in 0..=height {
            for i in 0..=width {
                let q = (i as f64, j as f64);
                let d = segs
                    .iter()
                    .map(|&(p0, p1)| linf_segment_distance(q, p0, p1))
                    .fold(f64::INFINITY, f64::min);
                mask.push(d <= hw && (i, j) != (0, 0));
            }
        }
        mask
    }
}

/// Transversal fluctuation scale.
pub fn default_halfwidth(n: u32) -> u32 {
    (n as f64).powf(2.0 / 3.0).ceil() as u32
}

/// Halfwidth default for a corridor aimed at direction t. The fluctuation
/// scale is capped by the distance from the aim point to the lattice
/// boundary: near the extreme direction the conditioned geodesic hugs the
/// planted path, and tilting sites it cannot use only inflates the
/// likelihood-ratio variance.
pub fn default_halfwidth_for(n: u32, t: f64) -> u32 {
    let boundary = ((0.5 - t) * n as f64).ceil().max(0.0) as u32;
    default_halfwidth(n).min(boundary)
}

/// l-infinity distance from `q` to the segment `p0 -> p1`. The distance is
/// convex piecewise-linear along the segment, so the minimum sits at an
/// endpoint, at a coordinate zero, or where the two coordinate gaps
/// equalize.
pub fn linf_segment_distance(q: (f64, f64), p0: (f64, f64), p1: (f64, f64)) -> f64 {
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let (rx, ry) = (q.0 - p0.0, q.1 - p0.1);
    let eval = |s: f64| {
        let s = s.clamp(0.0, 1.0);
        (rx - s * dx).abs().max((ry - s * dy).abs())
    };
    let mut best = eval(0.0).min(eval(1.0));
    if dx != 0.0 {
        best = best.min(eval(rx / dx));
    }
    if dy != 0.0 {
        best = best.min(eval(ry / dy));
    }
    if dx != dy {
        best = best.min(eval((rx - ry) / (dx - dy)));
    }
    if dx + dy != 0.0 {
        best = best.min(eval((rx + ry) / (dx + dy)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_basics() {
        // horizontal segment
        let d = linf_segment_distance((2.0, 3.0), (0.0, 0.0), (6.0, 0.0));
        assert!((d - 3.0).abs() < 1e-12);
        // beyond the far end
        let d = linf_segment_distance((8.0, 0.0), (0.0, 0.0), (6.0, 0.0));
        assert!((d - 2.0).abs() < 1e-12);
        // on the segment
        let d = linf_segment_distance((3.0, 3.0), (0.0, 0.0), (6.0, 6.0));
        assert!(d < 1e-12);
        // diagonal segment, off-axis point
        let d = linf_segment_distance((4.0, 0.0), (0.0, 0.0), (6.0, 6.0));
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn waypoints_ordered_with_near_uniform_gaps() {
        for (n, t, spacing) in [(40u32, 0.25, 5u32), (30, 0.0, 4), (24, 0.5, 3), (10, 0.3, 1)] {
            let c = Corridor::new(n, t, 0.0, 3, spacing).unwrap();
            let w = c.waypoints();
            assert_eq!(*w.first().unwrap(), Point::ORIGIN);
            assert_eq!(*w.last().unwrap(), Point::new(n, n));
            for pair in w.windows(2) {
                assert!(pair[0].dominated_by(&pair[1]), "waypoints out of order");
                let gap = pair[0].l1_distance(&pair[1]);
                let s = c.spacing() as i64;
                assert!(
                    (gap as i64 - s).abs() <= 1,
                    "gap {gap} vs spacing {s} at n={n} t={t}"
                );
            }
        }
    }

    #[test]
    fn corner_region_at_halfwidth_zero_is_the_corner_path() {
        let c = Corridor::new(6, 0.5, 0.0, 0, 3).unwrap();
        let mask = c.region_mask(6, 6);
        for j in 0..=6u32 {
            for i in 0..=6u32 {
                let inside = mask[(j * 7 + i) as usize];
                let on_path = (j == 0 || i == 6) && (i, j) != (0, 0);
                assert_eq!(inside, on_path, "site ({i},{j})");
            }
        }
    }

    #[test]
    fn region_respects_halfwidth_bands() {
        let c = Corridor::new(6, 0.5, 0.0, 2, 3).unwrap();
        let mask = c.region_mask(6, 6);
        let inside = |i: u32, j: u32| mask[(j * 7 + i) as usize];
        assert!(inside(3, 2) && inside(4, 2) && inside(6, 6) && inside(4, 5));
        assert!(!inside(0, 0));
        assert!(!inside(2, 3));
        assert!(!inside(0, 6));
    }

    #[test]
    fn diagonal_region_hugs_the_diagonal() {
        let c = Corridor::new(8, 0.0, 0.0, 1, 2).unwrap();
        let mask = c.region_mask(8, 8);
        let inside = |i: u32, j: u32| mask[(j * 9 + i) as usize];
        assert!(inside(4, 4) && inside(3, 4) && inside(5, 4));
        assert!(!inside(8, 0));
        assert!(!inside(0, 8));
        assert!(!inside(6, 2));
    }

    #[test]
    fn mismatch_detection() {
        let c = Corridor::default_for(10, 0.25).unwrap();
        assert!(c.matches(10, 0.25).is_ok());
        assert!(c.matches(12, 0.25).is_err());
        assert!(c.matches(10, 0.3).is_err());
    }

    #[test]
    fn direction_validation() {
        assert!(Corridor::new(10, 0.6, 0.0, 1, 2).is_err());
        assert!(Corridor::new(10, 0.25, 0.3, 1, 2).is_err());
        assert!(Corridor::new(0, 0.25, 0.0, 1, 2).is_err());
    }
}

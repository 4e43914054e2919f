use crate::lattice::Point;
use thiserror::Error;

/// Errors surfaced by the passage, distribution, and estimator layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what}: {value} (must be {requirement})")]
    InvalidParameter {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("cgf argument {lambda} is outside the domain [0-adjacent, {sup})")]
    CgfDomain { lambda: f64, sup: f64 },

    #[error("tilt parameter {lambda} is at or above the moment-domain supremum {sup}")]
    TiltDomain { lambda: f64, sup: f64 },

    #[error("rate function level must be positive, got {x}")]
    NonPositiveLevel { x: f64 },

    #[error("{op} is only available for {supported}, got {dist}")]
    UnsupportedLaw {
        op: &'static str,
        supported: &'static str,
        dist: String,
    },

    #[error("path source {from:?} must be coordinatewise <= target {to:?}")]
    BadOrder { from: Point, to: Point },

    #[error("point {point:?} is outside the field extents ({width}, {height})")]
    OutOfExtent {
        point: Point,
        width: u32,
        height: u32,
    },

    #[error("n must be even for anti-diagonal midpoint operations, got {n}")]
    OddParity { n: u32 },

    #[error("passage result endpoints {got:?} do not match the expected {expected:?}")]
    EndpointMismatch {
        expected: (Point, Point),
        got: (Point, Point),
    },

    #[error("enumeration cap exceeded: n = {n} > {cap}")]
    EnumerationCap { n: u32, cap: u32 },

    #[error("offset k = {k} is outside the anti-diagonal range [-{half}, {half}]")]
    OffsetRange { k: i64, half: i64 },

    #[error("corridor built for (n = {corridor_n}, t = {corridor_t}) does not match the requested (n = {n}, t = {t})")]
    CorridorMismatch {
        corridor_n: u32,
        corridor_t: f64,
        n: u32,
        t: f64,
    },

    #[error("floored target ({x}, {y}) leaves the lattice quadrant")]
    DegenerateTarget { x: i64, y: i64 },

    #[error("failed to allocate {bytes} bytes for the weight field")]
    Allocation { bytes: usize },

    #[error("malformed field dump: {reason}")]
    FieldFormat { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Independent ground truth.
//!
//! Everything here is deliberately naive: literal maximization over all
//! up-right paths for tiny lattices, exact rational combinatorics for the
//! uniform up-right walk, and a series evaluation of the integer-shape Gamma
//! tail. These are the references the dynamic program and the Monte Carlo
//! estimators are tested against, so none of them may share code with the
//! fast paths.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::WeightField;
use crate::lattice::Point;
use crate::real::Real;

/// Hard cap for path enumeration; C(20, 10) = 184756 paths.
pub const ENUMERATION_CAP: u32 = 10;

/// Binomials are exact rationals up to this n; beyond, a Stirling series
/// takes over with relative error far below 1e-12.
const EXACT_BINOMIAL_CAP: u64 = 128;

/// Literal evaluation of the passage-value maximum over all C(2n, n)
/// up-right paths from the origin to (n, n), weights summed excluding the
/// origin. Ties resolve to the path taking e1 at the earliest divergence,
/// matching the rightmost tie order of the dynamic program.
pub fn brute_force_passage<T: Real>(
    field: &WeightField<T>,
    n: u32,
) -> Result<(T, Vec<Point>)> {
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if field.width() < n || field.height() < n {
        return Err(Error::OutOfExtent {
            point: Point::new(n, n),
            width: field.width(),
            height: field.height(),
        });
    }
    if n == 0 {
        return Ok((T::zero(), vec![Point::ORIGIN]));
    }
    let steps_total = 2 * n;
    let mut best_value = T::neg_infinity();
    let mut best_steps: Vec<bool> = Vec::new();
    let mut steps = vec![false; steps_total as usize];
    for mask in 0u32..(1u32 << steps_total) {
        if mask.count_ones() != n {
            continue;
        }
        // bit k set means step k is e1
        let (mut x, mut y) = (0u32, 0u32);
        let mut value = T::zero();
        for (k, s) in steps.iter_mut().enumerate() {
            let e1 = mask & (1 << k) != 0;
            *s = e1;
            if e1 {
                x += 1;
            } else {
                y += 1;
            }
            value += field.weight(x, y);
        }
        if value > best_value
            || (value == best_value && e1_earlier(&steps, &best_steps))
        {
            best_value = value;
            best_steps.clear();
            best_steps.extend_from_slice(&steps);
        }
    }
    let mut path = Vec::with_capacity(steps_total as usize + 1);
    let (mut x, mut y) = (0u32, 0u32);
    path.push(Point::ORIGIN);
    for &e1 in &best_steps {
        if e1 {
            x += 1;
        } else {
            y += 1;
        }
        path.push(Point::new(x, y));
    }
    Ok((best_value, path))
}

/// True when `a` takes e1 before `b` does, at their earliest divergence.
fn e1_earlier(a: &[bool], b: &[bool]) -> bool {
    for (&sa, &sb) in a.iter().zip(b) {
        if sa != sb {
            return sa;
        }
    }
    false
}

/// Number of up-right paths from the origin to (n, n).
pub fn path_count(n: u32) -> u64 {
    binomial_exact(2 * n as u64, n as u64)
        .to_u64()
        .expect("path count fits u64 for enumerable n")
}

fn binomial_exact(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// Stirling series for ln Gamma, accurate to well under 1e-12 for x >= 10.
fn ln_gamma_stirling(x: f64) -> f64 {
    debug_assert!(x >= 10.0);
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma_stirling(n as f64 + 1.0)
        - ln_gamma_stirling(k as f64 + 1.0)
        - ln_gamma_stirling((n - k) as f64 + 1.0)
}

/// Exact law of the midpoint of a uniformly chosen up-right path:
/// P(mid at offset k) = C(n, n/2 + k)^2 / C(2n, n).
pub fn uniform_midpoint_prob(n: u32, k: i64) -> Result<f64> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddParity { n });
    }
    let half = (n / 2) as i64;
    if k.abs() > half {
        return Err(Error::OffsetRange { k, half });
    }
    let n = n as u64;
    let up = (half + k) as u64;
    if n <= EXACT_BINOMIAL_CAP {
        let c = binomial_exact(n, up);
        let prob = Ratio::new(&c * &c, binomial_exact(2 * n, n));
        Ok(prob.to_f64().expect("probability fits f64"))
    } else {
        // ln Gamma arguments are at least 1 + n/2 here, far inside the
        // Stirling regime; the dominant error is ~1e-14 relative
        Ok((2.0 * ln_binomial(n, up) - ln_binomial(2 * n, n)).exp())
    }
}

/// Finite-n decay rate of the uniform walk's corner probability:
/// -(1/n) log P(mid = (n/2, .. )) at the extreme offset, which is
/// (1/n) log C(2n, n). Increases toward 2 log 2.
pub fn uniform_corner_rate(n: u32) -> Result<f64> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddParity { n });
    }
    let n = n as u64;
    if n <= EXACT_BINOMIAL_CAP {
        let c = binomial_exact(2 * n, n).to_f64().expect("binomial fits f64");
        Ok(c.ln() / n as f64)
    } else {
        Ok(ln_binomial(2 * n, n) / n as f64)
    }
}

/// Upper regularized Gamma tail Q(a, x) = P(Gamma(a, 1) >= x) for integer
/// shape, via the Poisson series e^{-x} sum_{k<a} x^k / k! with compensated
/// summation.
pub fn gamma_upper_tail(a: u32, x: f64) -> f64 {
    assert!(a >= 1, "integer shape must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = (-x).exp();
    let mut sum = term;
    let mut comp = 0.0f64;
    for k in 1..a {
        term *= x / k as f64;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    (sum + comp).clamp(0.0, 1.0)
}

//! Weight laws, their cumulant generating functions, and the Cramér rate
//! function of i.i.d. sums.
//!
//! Both supported laws are non-negative, continuous, unbounded, and have
//! exponential moments up to a finite supremum (the rate parameter), which is
//! exactly what the passage-value machinery assumes. The corner direction of
//! the lattice admits a single path, so the rate function of the passage
//! value there is the classical Cramér rate computed here.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::SiteRng;

/// A sampleable weight law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDistribution<T: Real> {
    Exponential { rate: T },
    Gamma { shape: T, rate: T },
}

/// Which of the structural assumptions on the weights a law satisfies.
/// Every law constructible here satisfies all four; the report exists so
/// future laws can be flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssumptionReport {
    pub has_exponential_moment: bool,
    pub is_continuous: bool,
    pub is_unbounded: bool,
    pub is_nonnegative: bool,
}

impl<T: Real> WeightDistribution<T> {
    pub fn exponential(rate: T) -> Result<Self> {
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(Error::InvalidParameter {
                what: "exponential rate",
                value: rate.to_f64_lossy(),
                requirement: "finite and > 0",
            });
        }
        Ok(WeightDistribution::Exponential { rate })
    }

    pub fn gamma(shape: T, rate: T) -> Result<Self> {
        if !(shape > T::zero()) || !shape.is_finite() {
            return Err(Error::InvalidParameter {
                what: "gamma shape",
                value: shape.to_f64_lossy(),
                requirement: "finite and > 0",
            });
        }
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(Error::InvalidParameter {
                what: "gamma rate",
                value: rate.to_f64_lossy(),
                requirement: "finite and > 0",
            });
        }
        Ok(WeightDistribution::Gamma { shape, rate })
    }

    /// Analytic mean of the law.
    pub fn mean(&self) -> T {
        match *self {
            WeightDistribution::Exponential { rate } => T::one() / rate,
            WeightDistribution::Gamma { shape, rate } => shape / rate,
        }
    }

    /// Supremum of the set of tilts with a finite exponential moment.
    pub fn cgf_domain_sup(&self) -> T {
        match *self {
            WeightDistribution::Exponential { rate } => rate,
            WeightDistribution::Gamma { rate, .. } => rate,
        }
    }

    pub fn assumptions(&self) -> AssumptionReport {
        AssumptionReport {
            has_exponential_moment: true,
            is_continuous: true,
            is_unbounded: true,
            is_nonnegative: true,
        }
    }

    /// Log moment generating function, finite for `lambda < cgf_domain_sup`.
    pub fn cgf(&self, lambda: T) -> Result<T> {
        let sup = self.cgf_domain_sup();
        if !(lambda < sup) {
            return Err(Error::CgfDomain {
                lambda: lambda.to_f64_lossy(),
                sup: sup.to_f64_lossy(),
            });
        }
        Ok(match *self {
            WeightDistribution::Exponential { rate } => (rate / (rate - lambda)).ln(),
            WeightDistribution::Gamma { shape, rate } => -shape * (T::one() - lambda / rate).ln(),
        })
    }

    /// First derivative of the cgf (the tilted mean).
    pub fn cgf_prime(&self, lambda: T) -> Result<T> {
        let sup = self.cgf_domain_sup();
        if !(lambda < sup) {
            return Err(Error::CgfDomain {
                lambda: lambda.to_f64_lossy(),
                sup: sup.to_f64_lossy(),
            });
        }
        Ok(match *self {
            WeightDistribution::Exponential { rate } => T::one() / (rate - lambda),
            WeightDistribution::Gamma { shape, rate } => shape / (rate - lambda),
        })
    }

    /// Second derivative of the cgf (the tilted variance).
    pub fn cgf_double_prime(&self, lambda: T) -> Result<T> {
        let sup = self.cgf_domain_sup();
        if !(lambda < sup) {
            return Err(Error::CgfDomain {
                lambda: lambda.to_f64_lossy(),
                sup: sup.to_f64_lossy(),
            });
        }
        let d = sup - lambda;
        Ok(match *self {
            WeightDistribution::Exponential { .. } => T::one() / (d * d),
            WeightDistribution::Gamma { shape, .. } => shape / (d * d),
        })
    }

    /// The law under an exponential tilt by `lambda`. Both laws form scale
    /// families under tilting: only the rate shifts.
    pub fn tilted(&self, lambda: T) -> Result<Self> {
        let sup = self.cgf_domain_sup();
        if !(lambda < sup) {
            return Err(Error::TiltDomain {
                lambda: lambda.to_f64_lossy(),
                sup: sup.to_f64_lossy(),
            });
        }
        Ok(match *self {
            WeightDistribution::Exponential { rate } => WeightDistribution::Exponential {
                rate: rate - lambda,
            },
            WeightDistribution::Gamma { shape, rate } => WeightDistribution::Gamma {
                shape,
                rate: rate - lambda,
            },
        })
    }

    /// One draw from the site stream. Exponential uses inverse-CDF (one
    /// uniform per draw); Gamma uses Marsaglia-Tsang rejection, which
    /// consumes a variable number of stream outputs but is reproducible
    /// given the stream.
    pub fn sample(&self, rng: &mut SiteRng) -> T {
        match *self {
            WeightDistribution::Exponential { rate } => {
                exponential_inv_cdf(rate, T::from_f64_lossy(rng.next_uniform()))
            }
            WeightDistribution::Gamma { shape, rate } => sample_gamma(shape, rate, rng),
        }
    }

    /// Cramér rate function of an i.i.d. sum of these weights, evaluated as
    /// the Legendre transform sup over tilts of `lambda*x - cgf(lambda)`.
    ///
    /// Returns exactly 0 for `x <= mean`; for `x > mean` the unique interior
    /// stationary point is found by safeguarded Newton with bisection
    /// fallback, absolute tolerance 1e-12 on the tilt (or scalar epsilon
    /// scaled, whichever is larger).
    pub fn cramer_rate(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::NonPositiveLevel {
                x: x.to_f64_lossy(),
            });
        }
        if x <= self.mean() {
            return Ok(T::zero());
        }
        let lambda = self.solve_tilt(x)?;
        Ok(lambda * x - self.cgf(lambda)?)
    }

    /// Solve `cgf'(lambda) = x` for `x > mean` on (0, cgf_domain_sup).
    pub fn solve_tilt(&self, x: T) -> Result<T> {
        let sup = self.cgf_domain_sup();
        if !(x > self.mean()) {
            return Err(Error::InvalidParameter {
                what: "tilt target",
                value: x.to_f64_lossy(),
                requirement: "> mean",
            });
        }
        let tol = T::from_f64_lossy(1e-12).max(T::epsilon() * sup * T::from_f64_lossy(16.0));
        // bracket: cgf' is strictly increasing, cgf'(0) = mean < x, and
        // cgf' diverges at the domain supremum
        let mut lo = T::zero();
        let mut hi = sup;
        loop {
            let probe = (lo + hi) / T::from_f64_lossy(2.0);
            if self.cgf_prime(probe)? > x {
                hi = probe;
                break;
            }
            lo = probe;
            if hi - lo < tol {
                return Ok(probe);
            }
        }
        let mut lambda = (lo + hi) / T::from_f64_lossy(2.0);
        for _ in 0..200 {
            let g = self.cgf_prime(lambda)? - x;
            if g < T::zero() {
                lo = lambda;
            } else {
                hi = lambda;
            }
            let step = g / self.cgf_double_prime(lambda)?;
            let mut next = lambda - step;
            if !(next > lo && next < hi) {
                next = (lo + hi) / T::from_f64_lossy(2.0);
            }
            if (next - lambda).abs() <= tol {
                return Ok(next);
            }
            lambda = next;
        }
        Ok(lambda)
    }

    /// Theoretical decay rate of the corner-path probability: twice the
    /// Cramér rate at the flat-direction growth constant 2. Only the unit
    /// rate exponential law has that constant in closed form.
    pub fn corner_rate_theoretical(&self) -> Result<T> {
        match *self {
            WeightDistribution::Exponential { rate } if rate == T::one() => {
                Ok(T::from_f64_lossy(2.0) * self.cramer_rate(T::from_f64_lossy(2.0))?)
            }
            _ => Err(Error::UnsupportedLaw {
                op: "corner_rate_theoretical",
                supported: "Exponential{rate: 1}",
                dist: format!("{self:?}"),
            }),
        }
    }

    /// Compact textual descriptor, e.g. `exp:1` or `gamma:2:0.5`.
    pub fn describe(&self) -> String {
        match *self {
            WeightDistribution::Exponential { rate } => format!("exp:{rate}"),
            WeightDistribution::Gamma { shape, rate } => format!("gamma:{shape}:{rate}"),
        }
    }
}

#[inline]
pub(crate) fn exponential_inv_cdf<T: Real>(rate: T, u: T) -> T {
    -(T::one() - u).ln() / rate
}

/// Standard normal via Box-Muller; two stream uniforms per draw.
#[inline]
fn sample_normal<T: Real>(rng: &mut SiteRng) -> T {
    let u1 = T::from_f64_lossy(rng.next_uniform_pos());
    let u2 = T::from_f64_lossy(rng.next_uniform());
    let two = T::from_f64_lossy(2.0);
    let tau = T::from_f64_lossy(std::f64::consts::TAU);
    (-two * u1.ln()).sqrt() * (tau * u2).cos()
}

/// Marsaglia-Tsang (2000). For shape < 1, sample at shape + 1 and apply the
/// power-of-uniform boost.
fn sample_gamma<T: Real>(shape: T, rate: T, rng: &mut SiteRng) -> T {
    let one = T::one();
    if shape < one {
        let boost = T::from_f64_lossy(rng.next_uniform_pos()).powf(one / shape);
        return sample_gamma(shape + one, rate, rng) * boost;
    }
    let third = T::from_f64_lossy(1.0 / 3.0);
    let d = shape - third;
    let c = third / d.sqrt();
    loop {
        let x: T = sample_normal(rng);
        let t = one + c * x;
        if t <= T::zero() {
            continue;
        }
        let v = t * t * t;
        let u = T::from_f64_lossy(rng.next_uniform_pos());
        let x2 = x * x;
        // squeeze then full acceptance test
        if u < one - T::from_f64_lossy(0.0331) * x2 * x2 {
            return d * v / rate;
        }
        if u.ln() < T::from_f64_lossy(0.5) * x2 + d * (one - v + v.ln()) {
            return d * v / rate;
        }
    }
}

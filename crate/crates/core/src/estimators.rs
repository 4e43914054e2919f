//! Monte Carlo estimation of tail probabilities, shape constants, and
//! transversal statistics, with optional importance sampling by exponential
//! tilting inside a planted corridor.
//!
//! Replicates are a pure function of `(seed, replicate index)`; workers
//! process disjoint index blocks and partial accumulators merge in block
//! order, so every estimate is bit-identical for any worker count.

use crate::corridor::Corridor;
use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::parallel;
use crate::real::Real;
use crate::rng::{replicate_seed, SiteRng};
use crate::stats::{rule_of_three, wilson_interval, LogSumExp, MeanVar, Z_95};

/// Replication parameters shared by every estimator.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// 0 means use the available parallelism.
    pub workers: usize,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        McConfig {
            n_samples,
            seed,
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter {
                what: "n_samples",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        Ok(())
    }
}

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodInfo {
    Direct,
    Tilted {
        lambda: f64,
        corridor_halfwidth: u32,
    },
    DownTilted {
        lambda: f64,
    },
}

/// A tail (or point) probability estimate at one (t, r, n) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub t: f64,
    /// Level of the event in units of n; NaN for transversal events, which
    /// have no level parameter.
    pub r: f64,
    pub n: u32,
    pub n_samples: u64,
    /// Hit count, or the sum of likelihood ratios over hits when tilted.
    pub hits: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// -log(p_hat) / n; infinite when no replicate hit the event.
    pub fekete_bound: f64,
    pub method: MethodInfo,
}

impl RateEstimate {
    /// Delta-method standard error of the `-log p / n` bound.
    pub fn bound_std_err(&self) -> f64 {
        if self.hits <= 0.0 || self.p_hat <= 0.0 {
            return f64::INFINITY;
        }
        let se_p = (self.ci_high - self.ci_low) / (2.0 * Z_95);
        se_p / self.p_hat / self.n as f64
    }
}

/// Mean of G/n with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEstimate {
    pub t: f64,
    pub n: u32,
    pub n_samples: u64,
    pub mean: f64,
    pub std_err: f64,
}

/// Tail and exact-location estimates sharing the same replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalEstimate {
    /// P(statistic . e1 >= floor(n/2 + t n)).
    pub tail: RateEstimate,
    /// P(statistic . e1 == floor(n/2 + t n)).
    pub point: RateEstimate,
}

/// Floored lattice target for direction t at scale n.
pub fn direction_target(n: u32, t: f64) -> Result<(u32, u32)> {
    if !(-0.5..=0.5).contains(&t) {
        return Err(Error::InvalidParameter {
            what: "direction t",
            value: t,
            requirement: "in [-1/2, 1/2]",
        });
    }
    let a = (n as f64 / 2.0 + t * n as f64).floor();
    let b = (n as f64 / 2.0 - t * n as f64).floor();
    if a < 0.0 || b < 0.0 {
        return Err(Error::DegenerateTarget {
            x: a as i64,
            y: b as i64,
        });
    }
    Ok((a as u32, b as u32))
}

/// Growth constant of the passage value in direction t for the unit-rate
/// exponential law; scales inversely with the rate. Written as
/// 1 + 2 sqrt(1/4 - t^2) so the diagonal and corner values are exact.
pub fn exponential_shape_constant(t: f64) -> f64 {
    1.0 + 2.0 * (0.25 - t * t).sqrt()
}

/// Growth constant in direction t where a closed form exists: any t for
/// exponential weights, the single-path direction t = 1/2 for every law.
pub fn shape_constant<T: Real>(dist: &WeightDistribution<T>, t: f64) -> Result<f64> {
    match *dist {
        WeightDistribution::Exponential { rate } => {
            Ok(exponential_shape_constant(t) / rate.to_f64_lossy())
        }
        _ if t == 0.5 => Ok(dist.mean().to_f64_lossy()),
        _ => Err(Error::UnsupportedLaw {
            op: "shape_constant",
            supported: "Exponential at any t, or t = 1/2",
            dist: format!("{dist:?}"),
        }),
    }
}

/// Default tilt for an event at level r in direction t: the corridor's law
/// is scaled so its typical passage slope matches r. Reduces to the Cramér
/// tilt cgf'(lambda) = r in the single-path direction.
pub fn default_tilt<T: Real>(dist: &WeightDistribution<T>, t: f64, r: f64) -> Result<T> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveLevel { x: r });
    }
    let mu_t = shape_constant(dist, t)?;
    let sup = dist.cgf_domain_sup().to_f64_lossy();
    Ok(T::from_f64_lossy(sup * (1.0 - mu_t / r)))
}

struct Tilt<'a, T: Real> {
    law: WeightDistribution<T>,
    lambda: f64,
    mask: &'a [bool],
    /// m * cgf(lambda): the normalizing constant of the likelihood ratio.
    log_norm: f64,
}

fn prepare_tilt<'a, T: Real>(
    dist: &WeightDistribution<T>,
    lambda: T,
    mask: &'a [bool],
) -> Result<Tilt<'a, T>> {
    let law = dist.tilted(lambda)?;
    let m = mask.iter().filter(|&&b| b).count() as f64;
    let log_norm = m * dist.cgf(lambda)?.to_f64_lossy();
    Ok(Tilt {
        law,
        lambda: lambda.to_f64_lossy(),
        mask,
        log_norm,
    })
}

/// Accumulator for one event family within a block; merged in block order.
#[derive(Debug, Default, Clone)]
struct EventTally {
    hits: u64,
    weighted: LogSumExp,
    weighted_sq: LogSumExp,
}

impl EventTally {
    #[inline]
    fn record(&mut self, hit: bool, log_ratio: f64) {
        if hit {
            self.hits += 1;
            self.weighted.add_log(log_ratio);
            self.weighted_sq.add_log(2.0 * log_ratio);
        }
    }

    fn merge(&mut self, other: &EventTally) {
        self.hits += other.hits;
        self.weighted.merge(&other.weighted);
        self.weighted_sq.merge(&other.weighted_sq);
    }

    fn into_estimate(
        self,
        t: f64,
        r: f64,
        n: u32,
        n_samples: u64,
        method: MethodInfo,
    ) -> RateEstimate {
        let nf = n_samples as f64;
        match method {
            MethodInfo::Direct => {
                let p_hat = self.hits as f64 / nf;
                let iv = wilson_interval(self.hits, n_samples);
                let (ci_low, ci_high) = if self.hits == 0 {
                    (0.0, rule_of_three(n_samples))
                } else {
                    (iv.low, iv.high)
                };
                RateEstimate {
                    t,
                    r,
                    n,
                    n_samples,
                    hits: self.hits as f64,
                    p_hat,
                    ci_low,
                    ci_high,
                    fekete_bound: bound_from(p_hat, n),
                    method,
                }
            }
            MethodInfo::Tilted { .. } | MethodInfo::DownTilted { .. } => {
                if self.weighted.count() == 0 {
                    return RateEstimate {
                        t,
                        r,
                        n,
                        n_samples,
                        hits: 0.0,
                        p_hat: 0.0,
                        ci_low: 0.0,
                        ci_high: rule_of_three(n_samples),
                        fekete_bound: f64::INFINITY,
                        method,
                    };
                }
                let total = self.weighted.value();
                let p_hat = total / nf;
                let m2 = self.weighted_sq.value() / nf;
                let var = (m2 - p_hat * p_hat).max(0.0);
                let se = (var / nf).sqrt();
                RateEstimate {
                    t,
                    r,
                    n,
                    n_samples,
                    hits: total,
                    p_hat,
                    ci_low: (p_hat - Z_95 * se).max(0.0),
                    ci_high: p_hat + Z_95 * se,
                    fekete_bound: bound_from(p_hat, n),
                    method,
                }
            }
        }
    }
}

fn bound_from(p_hat: f64, n: u32) -> f64 {
    if p_hat > 0.0 {
        -p_hat.ln() / n as f64
    } else {
        f64::INFINITY
    }
}

/// Rolling-row passage value with on-the-fly weights; returns the value and
/// the realized weight sum over the tilted region.
fn streamed_value<T: Real>(
    row: &mut [T],
    width: u32,
    height: u32,
    field_seed: u64,
    base: &WeightDistribution<T>,
    tilt: Option<&Tilt<'_, T>>,
) -> (T, f64) {
    let stride = width as usize + 1;
    debug_assert!(row.len() >= stride);
    let mut region_sum = 0.0f64;
    let mut weight = |i: u32, j: u32| -> T {
        let mut rng = SiteRng::for_site(field_seed, i, j);
        match tilt {
            Some(tl) if tl.mask[j as usize * stride + i as usize] => {
                let w = tl.law.sample(&mut rng);
                region_sum += w.to_f64_lossy();
                w
            }
            _ => base.sample(&mut rng),
        }
    };
    row[0] = T::zero();
    for i in 1..=width {
        row[i as usize] = row[i as usize - 1] + weight(i, 0);
    }
    for j in 1..=height {
        row[0] += weight(0, j);
        for i in 1..=width as usize {
            let up = row[i];
            let left = row[i - 1];
            row[i] = weight(i as u32, j) + if up > left { up } else { left };
        }
    }
    (row[width as usize], region_sum)
}

/// Full square grid of passage values with on-the-fly weights.
fn streamed_grid<T: Real>(
    grid: &mut [T],
    n: u32,
    field_seed: u64,
    base: &WeightDistribution<T>,
    tilt: Option<&Tilt<'_, T>>,
) -> f64 {
    let stride = n as usize + 1;
    let mut region_sum = 0.0f64;
    let mut weight = |i: usize, j: usize| -> T {
        let mut rng = SiteRng::for_site(field_seed, i as u32, j as u32);
        match tilt {
            Some(tl) if tl.mask[j * stride + i] => {
                let w = tl.law.sample(&mut rng);
                region_sum += w.to_f64_lossy();
                w
            }
            _ => base.sample(&mut rng),
        }
    };
    crate::passage::fill_grid(grid, n as usize, n as usize, &mut weight);
    region_sum
}

/// e1 coordinate of the geodesic's unique level-n point, backtracking from
/// (n, n) and preferring the e2 predecessor (rightmost geodesic).
fn midpoint_e1_from_grid<T: Real>(grid: &[T], n: u32) -> u32 {
    let stride = n as usize + 1;
    let (mut i, mut j) = (n as usize, n as usize);
    while i + j > n as usize {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let via_e1 = grid[j * stride + i - 1];
            let via_e2 = grid[(j - 1) * stride + i];
            if via_e2 >= via_e1 {
                j -= 1;
            } else {
                i -= 1;
            }
        }
    }
    i as u32
}

/// Triangle DP over {x + y <= n}: returns the argmax e1 coordinate on the
/// anti-diagonal, ties toward larger e1.
fn endpoint_e1_from_stream<T: Real>(
    grid: &mut [T],
    n: u32,
    field_seed: u64,
    base: &WeightDistribution<T>,
) -> u32 {
    let stride = n as usize + 1;
    let nn = n as usize;
    let weight = |i: usize, j: usize| -> T {
        let mut rng = SiteRng::for_site(field_seed, i as u32, j as u32);
        base.sample(&mut rng)
    };
    grid[0] = T::zero();
    for i in 1..=nn {
        grid[i] = grid[i - 1] + weight(i, 0);
    }
    for j in 1..=nn {
        let row = j * stride;
        let prev = row - stride;
        grid[row] = grid[prev] + weight(0, j);
        for i in 1..=(nn - j) {
            let up = grid[prev + i];
            let left = grid[row + i - 1];
            grid[row + i] = weight(i, j) + if up > left { up } else { left };
        }
    }
    let mut best = grid[nn * stride];
    let mut arg = 0usize;
    for i in 1..=nn {
        let v = grid[(nn - i) * stride + i];
        if v >= best {
            best = v;
            arg = i;
        }
    }
    arg as u32
}

/// Direct estimate of P(G_{0, target(t)} >= r n).
pub fn estimate_tail<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    r: f64,
    n: u32,
    mc: &McConfig,
) -> Result<RateEstimate> {
    estimate_tail_inner(dist, t, r, n, mc, None)
}

/// Importance-sampled estimate of the same tail: corridor sites carry the
/// tilted law and each replicate is reweighted by its likelihood ratio.
/// Unbiased for the direct probability for any corridor and valid tilt.
pub fn estimate_tail_tilted<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    r: f64,
    n: u32,
    lambda: T,
    corridor: &Corridor,
    mc: &McConfig,
) -> Result<RateEstimate> {
    corridor.matches(n, t)?;
    estimate_tail_inner(dist, t, r, n, mc, Some((lambda, corridor)))
}

fn estimate_tail_inner<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    r: f64,
    n: u32,
    mc: &McConfig,
    tilt_spec: Option<(T, &Corridor)>,
) -> Result<RateEstimate> {
    mc.validate()?;
    if !(r >= 0.0) {
        return Err(Error::NonPositiveLevel { x: r });
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            what: "scale n",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let (a, b) = direction_target(n, t)?;
    let mask;
    let (tilt, method) = match tilt_spec {
        None => (None, MethodInfo::Direct),
        Some((lambda, corridor)) => {
            mask = corridor.region_mask(a, b);
            let tl = prepare_tilt(dist, lambda, &mask)?;
            let method = MethodInfo::Tilted {
                lambda: tl.lambda,
                corridor_halfwidth: corridor.halfwidth(),
            };
            (Some(tl), method)
        }
    };
    let threshold = T::from_f64_lossy(r * n as f64);
    let partials = parallel::run_blocks(mc.n_samples, mc.workers, |range| {
        let mut tally = EventTally::default();
        let mut row = vec![T::zero(); a as usize + 1];
        for idx in range {
            let fs = replicate_seed(mc.seed, idx);
            let (value, s) = streamed_value(&mut row, a, b, fs, dist, tilt.as_ref());
            let log_ratio = match &tilt {
                None => 0.0,
                Some(tl) => -tl.lambda * s + tl.log_norm,
            };
            tally.record(value >= threshold, log_ratio);
        }
        tally
    });
    let mut total = EventTally::default();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.into_estimate(t, r, n, mc.n_samples, method))
}

/// Sampling method for the transversal estimators.
#[derive(Debug, Clone)]
pub enum Method<T: Real> {
    Direct,
    Tilted { lambda: T, corridor: Corridor },
}

/// Midpoint tail and exact-location probabilities: per replicate the full
/// geodesic is resolved and both indicators are recorded. The `r` carried by
/// the estimates is the level the transversal rate is evaluated at (the
/// diagonal growth constant), recorded for reporting only.
pub fn estimate_midpoint_tail<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    n: u32,
    mc: &McConfig,
    method: &Method<T>,
) -> Result<TransversalEstimate> {
    mc.validate()?;
    check_transversal_inputs(n, t)?;
    let (a, _) = direction_target(n, t)?;
    let mask;
    let (tilt, minfo) = match method {
        Method::Direct => (None, MethodInfo::Direct),
        Method::Tilted { lambda, corridor } => {
            corridor.matches(n, t)?;
            mask = corridor.region_mask(n, n);
            let tl = prepare_tilt(dist, *lambda, &mask)?;
            let minfo = MethodInfo::Tilted {
                lambda: tl.lambda,
                corridor_halfwidth: corridor.halfwidth(),
            };
            (Some(tl), minfo)
        }
    };
    let stride = n as usize + 1;
    let partials = parallel::run_blocks(mc.n_samples, mc.workers, |range| {
        let mut tail = EventTally::default();
        let mut point = EventTally::default();
        let mut grid = vec![T::zero(); stride * stride];
        for idx in range {
            let fs = replicate_seed(mc.seed, idx);
            let s = streamed_grid(&mut grid, n, fs, dist, tilt.as_ref());
            let log_ratio = match &tilt {
                None => 0.0,
                Some(tl) => -tl.lambda * s + tl.log_norm,
            };
            let mid = midpoint_e1_from_grid(&grid, n);
            tail.record(mid >= a, log_ratio);
            point.record(mid == a, log_ratio);
        }
        (tail, point)
    });
    let mut tail = EventTally::default();
    let mut point = EventTally::default();
    for (pt, pp) in &partials {
        tail.merge(pt);
        point.merge(pp);
    }
    Ok(TransversalEstimate {
        tail: tail.into_estimate(t, f64::NAN, n, mc.n_samples, minfo),
        point: point.into_estimate(t, f64::NAN, n, mc.n_samples, minfo),
    })
}

/// Endpoint of the point-to-line geodesic: tail and exact-location
/// probabilities, direct sampling.
pub fn estimate_endpoint_tail<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    n: u32,
    mc: &McConfig,
) -> Result<TransversalEstimate> {
    mc.validate()?;
    check_transversal_inputs(n, t)?;
    let (a, _) = direction_target(n, t)?;
    let stride = n as usize + 1;
    let partials = parallel::run_blocks(mc.n_samples, mc.workers, |range| {
        let mut tail = EventTally::default();
        let mut point = EventTally::default();
        let mut grid = vec![T::zero(); stride * stride];
        for idx in range {
            let fs = replicate_seed(mc.seed, idx);
            let end = endpoint_e1_from_stream(&mut grid, n, fs, dist);
            tail.record(end >= a, 0.0);
            point.record(end == a, 0.0);
        }
        (tail, point)
    });
    let mut tail = EventTally::default();
    let mut point = EventTally::default();
    for (pt, pp) in &partials {
        tail.merge(pt);
        point.merge(pp);
    }
    Ok(TransversalEstimate {
        tail: tail.into_estimate(t, f64::NAN, n, mc.n_samples, MethodInfo::Direct),
        point: point.into_estimate(t, f64::NAN, n, mc.n_samples, MethodInfo::Direct),
    })
}

fn check_transversal_inputs(n: u32, t: f64) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddParity { n });
    }
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::InvalidParameter {
            what: "direction t",
            value: t,
            requirement: "in (0, 1/2]",
        });
    }
    Ok(())
}

/// Mean of G_{0, target(t)} / n with standard error.
pub fn estimate_shape<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    n: u32,
    mc: &McConfig,
) -> Result<ShapeEstimate> {
    mc.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            what: "scale n",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let (a, b) = direction_target(n, t)?;
    let partials = parallel::run_blocks(mc.n_samples, mc.workers, |range| {
        let mut acc = MeanVar::new();
        let mut row = vec![T::zero(); a as usize + 1];
        for idx in range {
            let fs = replicate_seed(mc.seed, idx);
            let (value, _) = streamed_value(&mut row, a, b, fs, dist, None);
            acc.add(value.to_f64_lossy() / n as f64);
        }
        acc
    });
    let mut acc = MeanVar::new();
    for p in &partials {
        acc.merge(p);
    }
    Ok(ShapeEstimate {
        t,
        n,
        n_samples: mc.n_samples,
        mean: acc.mean(),
        std_err: acc.std_err(),
    })
}

/// Per-n estimation method for the subadditive bound sequence.
#[derive(Debug, Clone)]
pub enum CurveMethod<T: Real> {
    Direct,
    /// Tilted with the default corridor; `lambda = None` solves the default
    /// tilt for (t, r).
    Tilted {
        lambda: Option<T>,
        halfwidth: Option<u32>,
    },
}

/// One tail estimate per n; each finite-n value of -log p / n upper-bounds
/// the limiting rate.
pub fn fekete_curve<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    r: f64,
    n_list: &[u32],
    per_n_samples: u64,
    seed: u64,
    method: &CurveMethod<T>,
) -> Result<Vec<RateEstimate>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            what: "n_list",
            value: f64::NAN,
            requirement: "strictly ascending",
        });
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mc = McConfig::new(per_n_samples, cell_seed(seed, n as u64, 0));
        let est = match method {
            CurveMethod::Direct => estimate_tail(dist, t, r, n, &mc)?,
            CurveMethod::Tilted { lambda, halfwidth } => {
                let hw =
                    halfwidth.unwrap_or_else(|| crate::corridor::default_halfwidth_for(n, t));
                let corridor = Corridor::new(n, t, 0.0, hw, (n / 8).max(1))?;
                let lam = match lambda {
                    Some(l) => *l,
                    None => default_tilt(dist, t, r)?,
                };
                estimate_tail_tilted(dist, t, r, n, lam, &corridor, &mc)?
            }
        };
        out.push(est);
    }
    Ok(out)
}

fn cell_seed(seed: u64, a: u64, b: u64) -> u64 {
    crate::rng::mix64(seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
}

/// Monotonicity check of the finite-n bound across directions.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub estimates: Vec<RateEstimate>,
    /// Indices of zero-hit cells, excluded from comparisons.
    pub excluded: Vec<usize>,
    /// No adjacent usable pair decreases by more than two combined standard
    /// errors.
    pub monotone_within_tolerance: bool,
}

/// Direct per-t tail estimates at fixed (r, n); the bound sequence should be
/// nondecreasing in t up to noise.
pub fn verify_monotone_in_t<T: Real>(
    dist: &WeightDistribution<T>,
    r: f64,
    n: u32,
    t_list: &[f64],
    per_t_samples: u64,
    seed: u64,
) -> Result<MonotonicityReport> {
    if t_list.windows(2).any(|w| w[0] >= w[1]) || t_list.iter().any(|t| !(0.0..=0.5).contains(t)) {
        return Err(Error::InvalidParameter {
            what: "t_list",
            value: f64::NAN,
            requirement: "strictly ascending in [0, 1/2]",
        });
    }
    let mut estimates = Vec::with_capacity(t_list.len());
    for (k, &t) in t_list.iter().enumerate() {
        let mc = McConfig::new(per_t_samples, cell_seed(seed, k as u64, 1));
        estimates.push(estimate_tail(dist, t, r, n, &mc)?);
    }
    let excluded: Vec<usize> = estimates
        .iter()
        .enumerate()
        .filter(|(_, e)| e.hits == 0.0)
        .map(|(i, _)| i)
        .collect();
    let usable: Vec<&RateEstimate> = estimates.iter().filter(|e| e.hits > 0.0).collect();
    let mut monotone = true;
    for w in usable.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let combined = (lo.bound_std_err().powi(2) + hi.bound_std_err().powi(2)).sqrt();
        if hi.fekete_bound < lo.fekete_bound - 2.0 * combined {
            monotone = false;
        }
    }
    Ok(MonotonicityReport {
        estimates,
        excluded,
        monotone_within_tolerance: monotone,
    })
}

/// Left-tail scan report.
#[derive(Debug, Clone)]
pub struct LeftTailReport {
    pub estimates: Vec<RateEstimate>,
    pub excluded: Vec<usize>,
    /// The -log p / n sequence increases across n_list by more than the
    /// combined standard errors: the superexponential decay signature.
    pub superexponential: bool,
}

/// Down-tilted estimation of P(G_{0,(n/2,n/2)} <= (mu0 - eps) n) per n.
/// The whole rectangle is tilted toward smaller weights; negative tilts are
/// always inside the moment domain.
pub fn left_tail_scan<T: Real>(
    dist: &WeightDistribution<T>,
    eps: f64,
    n_list: &[u32],
    per_n_samples: u64,
    seed: u64,
    mu0: Option<f64>,
    lambda: Option<T>,
) -> Result<LeftTailReport> {
    let mu0 = resolve_mu0(dist, mu0)?;
    if !(eps > 0.0 && eps < mu0) {
        return Err(Error::InvalidParameter {
            what: "eps",
            value: eps,
            requirement: "in (0, mu0)",
        });
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            what: "n_list",
            value: f64::NAN,
            requirement: "strictly ascending",
        });
    }
    let sup = dist.cgf_domain_sup().to_f64_lossy();
    let lam = match lambda {
        Some(l) => l,
        // scale the law so the typical diagonal slope sits at the threshold
        None => T::from_f64_lossy(sup * (1.0 - mu0 / (mu0 - eps))),
    };
    if !(lam.to_f64_lossy() <= 0.0) {
        return Err(Error::InvalidParameter {
            what: "left-tail lambda",
            value: lam.to_f64_lossy(),
            requirement: "<= 0 (down-tilt)",
        });
    }
    let mut estimates = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = n / 2;
        if m == 0 {
            return Err(Error::InvalidParameter {
                what: "scale n",
                value: n as f64,
                requirement: ">= 2",
            });
        }
        let threshold = T::from_f64_lossy((mu0 - eps) * n as f64);
        let mc = McConfig::new(per_n_samples, cell_seed(seed, n as u64, 2));
        // tilt the whole rectangle except the origin
        let stride = m as usize + 1;
        let mut mask = vec![true; stride * stride];
        mask[0] = false;
        let tilt = prepare_tilt(dist, lam, &mask)?;
        let partials = parallel::run_blocks(mc.n_samples, mc.workers, |range| {
            let mut tally = EventTally::default();
            let mut row = vec![T::zero(); stride];
            for idx in range {
                let fs = replicate_seed(mc.seed, idx);
                let (value, s) = streamed_value(&mut row, m, m, fs, dist, Some(&tilt));
                let log_ratio = -tilt.lambda * s + tilt.log_norm;
                tally.record(value <= threshold, log_ratio);
            }
            tally
        });
        let mut total = EventTally::default();
        for p in &partials {
            total.merge(p);
        }
        estimates.push(total.into_estimate(
            0.0,
            mu0 - eps,
            n,
            mc.n_samples,
            MethodInfo::DownTilted {
                lambda: lam.to_f64_lossy(),
            },
        ));
    }
    let excluded: Vec<usize> = estimates
        .iter()
        .enumerate()
        .filter(|(_, e)| e.hits == 0.0)
        .map(|(i, _)| i)
        .collect();
    let usable: Vec<&RateEstimate> = estimates.iter().filter(|e| e.hits > 0.0).collect();
    let mut superexponential = usable.len() >= 2;
    for w in usable.windows(2) {
        let combined = (w[0].bound_std_err().powi(2) + w[1].bound_std_err().powi(2)).sqrt();
        if w[1].fekete_bound <= w[0].fekete_bound + combined {
            superexponential = false;
        }
    }
    Ok(LeftTailReport {
        estimates,
        excluded,
        superexponential,
    })
}

fn resolve_mu0<T: Real>(dist: &WeightDistribution<T>, mu0: Option<f64>) -> Result<f64> {
    match mu0 {
        Some(v) if v > 0.0 => Ok(v),
        Some(v) => Err(Error::InvalidParameter {
            what: "mu0",
            value: v,
            requirement: "> 0",
        }),
        None => shape_constant(dist, 0.0),
    }
}

/// Cross-estimator comparison of the transversal rate against the
/// passage-value rate.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub midpoint: TransversalEstimate,
    pub value_tail: RateEstimate,
    /// -log p_mid / (2n): the per-factor transversal rate.
    pub a: f64,
    pub a_ci: (f64, f64),
    /// -log p_value / n at level r = mu0 in direction t.
    pub b: f64,
    pub b_ci: (f64, f64),
    pub rel_gap: f64,
    /// Closed-form per-factor target, available at t = 1/2 for the unit
    /// exponential law.
    pub closed_form_factor: Option<f64>,
}

/// Estimate both sides of the transversal rate identity with tilted Monte
/// Carlo: A from the midpoint tail at scale n (normalized per factor), B
/// from the passage-value tail at level mu0 in direction t.
pub fn midpoint_rate_identity<T: Real>(
    dist: &WeightDistribution<T>,
    t: f64,
    n: u32,
    budget: u64,
    seed: u64,
    mu0: Option<f64>,
) -> Result<IdentityReport> {
    check_transversal_inputs(n, t)?;
    let mu0 = resolve_mu0(dist, mu0)?;
    let mu_t = shape_constant(dist, t)?;
    if !(mu0 > mu_t) {
        return Err(Error::InvalidParameter {
            what: "direction t",
            value: t,
            requirement: "mu0 > mu_t (outside the flat segment)",
        });
    }
    let lambda = default_tilt(dist, t, mu0)?;
    let corridor = Corridor::default_for(n, t)?;
    let mid = estimate_midpoint_tail(
        dist,
        t,
        n,
        &McConfig::new(budget, cell_seed(seed, 11, 3)),
        &Method::Tilted {
            lambda,
            corridor: corridor.clone(),
        },
    )?;
    let value = estimate_tail_tilted(
        dist,
        t,
        mu0,
        n,
        lambda,
        &corridor,
        &McConfig::new(budget, cell_seed(seed, 13, 3)),
    )?;
    let two_n = 2.0 * n as f64;
    let a = mid.tail.fekete_bound / 2.0;
    let a_ci = (
        safe_rate(mid.tail.ci_high, two_n),
        safe_rate(mid.tail.ci_low, two_n),
    );
    let b = value.fekete_bound;
    let b_ci = (
        safe_rate(value.ci_high, n as f64),
        safe_rate(value.ci_low, n as f64),
    );
    let rel_gap = if a.is_finite() && b.is_finite() {
        (a - b).abs() / a.abs().max(b.abs())
    } else {
        f64::INFINITY
    };
    let closed_form_factor = match *dist {
        WeightDistribution::Exponential { rate } if rate == T::one() && t == 0.5 => {
            Some(1.0 - std::f64::consts::LN_2)
        }
        _ => None,
    };
    Ok(IdentityReport {
        midpoint: mid,
        value_tail: value,
        a,
        a_ci,
        b,
        b_ci,
        rel_gap,
        closed_form_factor,
    })
}

fn safe_rate(p: f64, scale: f64) -> f64 {
    if p > 0.0 {
        -p.ln() / scale
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> WeightDistribution<f64> {
        WeightDistribution::exponential(1.0).unwrap()
    }

    #[test]
    fn direction_targets_floor() {
        assert_eq!(direction_target(30, 0.3).unwrap(), (24, 6));
        assert_eq!(direction_target(40, 0.25).unwrap(), (30, 10));
        assert_eq!(direction_target(10, 0.5).unwrap(), (10, 0));
        assert_eq!(direction_target(10, -0.5).unwrap(), (0, 10));
        assert!(direction_target(10, 0.6).is_err());
    }

    #[test]
    fn shape_constants() {
        assert!((exponential_shape_constant(0.0) - 2.0).abs() < 1e-15);
        assert!((exponential_shape_constant(0.5) - 1.0).abs() < 1e-15);
        assert!(
            (shape_constant(&exp1(), 0.25).unwrap()
                - (0.75f64.sqrt() + 0.25f64.sqrt()).powi(2))
            .abs()
                < 1e-15
        );
        let g = WeightDistribution::gamma(2.0, 1.0).unwrap();
        assert_eq!(shape_constant(&g, 0.5).unwrap(), 2.0);
        assert!(shape_constant(&g, 0.25).is_err());
    }

    #[test]
    fn default_tilt_matches_cramer_in_the_corner() {
        let lam: f64 = default_tilt(&exp1(), 0.5, 2.0).unwrap();
        assert!((lam - 0.5).abs() < 1e-15);
        let lam: f64 = default_tilt(&exp1(), 0.5, 3.0).unwrap();
        assert!((lam - 2.0 / 3.0).abs() < 1e-15);
        // gentle tilt for the off-diagonal midpoint event
        let lam: f64 = default_tilt(&exp1(), 0.25, 2.0).unwrap();
        assert!((lam - (1.0 - exponential_shape_constant(0.25) / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn tail_at_level_zero_is_certain() {
        let e = estimate_tail(&exp1(), 0.25, 0.0, 8, &McConfig::new(500, 1)).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.hits, 500.0);
    }

    #[test]
    fn null_tilt_reproduces_direct_hits_exactly() {
        let mc = McConfig::new(4000, 99);
        let direct = estimate_tail(&exp1(), 0.5, 2.0, 6, &mc).unwrap();
        let corridor = Corridor::new(6, 0.5, 0.0, 2, 3).unwrap();
        let tilted = estimate_tail_tilted(&exp1(), 0.5, 2.0, 6, 0.0, &corridor, &mc).unwrap();
        assert_eq!(direct.hits, tilted.hits);
        assert_eq!(direct.p_hat.to_bits(), tilted.p_hat.to_bits());
    }

    #[test]
    fn tilt_domain_is_enforced() {
        let corridor = Corridor::new(6, 0.5, 0.0, 1, 3).unwrap();
        let mc = McConfig::new(10, 1);
        assert!(matches!(
            estimate_tail_tilted(&exp1(), 0.5, 2.0, 6, 1.0, &corridor, &mc),
            Err(Error::TiltDomain { .. })
        ));
        assert!(matches!(
            estimate_tail_tilted(&exp1(), 0.25, 2.0, 8, 0.5, &corridor, &mc),
            Err(Error::CorridorMismatch { .. })
        ));
    }

    #[test]
    fn estimates_are_worker_invariant() {
        let corridor = Corridor::new(8, 0.5, 0.0, 2, 2).unwrap();
        let single = estimate_tail_tilted(
            &exp1(),
            0.5,
            2.5,
            8,
            0.5,
            &corridor,
            &McConfig::new(20_000, 7).with_workers(1),
        )
        .unwrap();
        for workers in [2usize, 4, 16] {
            let multi = estimate_tail_tilted(
                &exp1(),
                0.5,
                2.5,
                8,
                0.5,
                &corridor,
                &McConfig::new(20_000, 7).with_workers(workers),
            )
            .unwrap();
            assert_eq!(single.p_hat.to_bits(), multi.p_hat.to_bits());
            assert_eq!(single.ci_low.to_bits(), multi.ci_low.to_bits());
            assert_eq!(single.hits.to_bits(), multi.hits.to_bits());
        }
    }

    #[test]
    fn midpoint_nested_events_are_exactly_monotone() {
        // same seed means shared replicates, so the tail indicator family is
        // nested exactly, not just statistically
        let mut prev = f64::INFINITY;
        for t in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let e = estimate_midpoint_tail(
                &exp1(),
                t,
                8,
                &McConfig::new(3000, 4242),
                &Method::Direct,
            )
            .unwrap();
            assert!(e.tail.p_hat <= prev);
            prev = e.tail.p_hat;
            assert!(e.point.p_hat <= e.tail.p_hat);
        }
    }

    #[test]
    fn midpoint_near_zero_threshold_is_at_least_half() {
        let e = estimate_midpoint_tail(
            &exp1(),
            1e-9,
            8,
            &McConfig::new(6000, 11),
            &Method::Direct,
        )
        .unwrap();
        assert!(e.tail.p_hat >= 0.5 - (e.tail.p_hat - e.tail.ci_low));
    }

    #[test]
    fn transversal_input_validation() {
        let mc = McConfig::new(10, 1);
        assert!(estimate_midpoint_tail(&exp1(), 0.25, 7, &mc, &Method::Direct).is_err());
        assert!(estimate_midpoint_tail(&exp1(), 0.0, 8, &mc, &Method::Direct).is_err());
        assert!(estimate_endpoint_tail(&exp1(), 0.6, 8, &mc).is_err());
    }

    #[test]
    fn endpoint_at_extreme_direction_is_the_corner_event() {
        let e = estimate_endpoint_tail(&exp1(), 0.5, 6, &McConfig::new(4000, 5)).unwrap();
        assert_eq!(e.tail.p_hat, e.point.p_hat);
        assert!(e.tail.p_hat > 0.0 && e.tail.p_hat < 0.2);
    }

    #[test]
    fn shape_in_corner_direction_is_the_weight_mean() {
        let e = estimate_shape(&exp1(), 0.5, 20, &McConfig::new(3000, 17)).unwrap();
        assert!((e.mean - 1.0).abs() <= 3.0 * e.std_err, "mean {}", e.mean);
        assert!(e.mean >= 0.0 && e.std_err > 0.0);
    }

    #[test]
    fn fekete_curve_validates_and_runs() {
        let ests = fekete_curve(
            &exp1(),
            0.5,
            2.0,
            &[4, 8],
            5000,
            3,
            &CurveMethod::Direct,
        )
        .unwrap();
        assert_eq!(ests.len(), 2);
        for e in &ests {
            assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
        }
        assert!(fekete_curve(
            &exp1(),
            0.5,
            2.0,
            &[8, 4],
            10,
            3,
            &CurveMethod::Direct
        )
        .is_err());
    }

    #[test]
    fn monotonicity_trivial_single_element() {
        let rep = verify_monotone_in_t(&exp1(), 2.0, 8, &[0.25], 2000, 5).unwrap();
        assert!(rep.monotone_within_tolerance);
        assert_eq!(rep.estimates.len(), 1);
    }

    #[test]
    fn left_tail_requires_resolvable_mu0() {
        let g = WeightDistribution::gamma(2.0, 1.0).unwrap();
        assert!(left_tail_scan(&g, 0.5, &[4, 6], 100, 1, None, None).is_err());
        assert!(left_tail_scan(&g, 0.5, &[4, 6], 100, 1, Some(3.0), None).is_ok());
        assert!(left_tail_scan(&exp1(), 2.5, &[4, 6], 100, 1, None, None).is_err());
    }

    #[test]
    fn identity_rejects_flat_directions() {
        // t = 1/2 keeps mu0 > mu_t; a tiny t puts the target inside the
        // typical cone where the identity's precondition fails only via
        // mu0 > mu_t, which still holds for exponential weights, so check
        // the parity/domain validations instead
        assert!(midpoint_rate_identity(&exp1(), 0.25, 7, 10, 1, None).is_err());
        assert!(midpoint_rate_identity(&exp1(), 0.0, 8, 10, 1, None).is_err());
    }
}

//! Statistical plumbing: intervals, compensated accumulators, and least
//! squares. Statistics are always carried in f64 regardless of the field
//! scalar.

/// 97.5% standard normal quantile; all intervals here are 95% two-sided.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// A 95% confidence interval for a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

/// Wilson score interval for a binomial proportion. Behaves sensibly at
/// zero and low hit counts, which dominate rare-event runs.
pub fn wilson_interval(hits: u64, trials: u64) -> Interval {
    if trials == 0 {
        return Interval { low: 0.0, high: 1.0 };
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    // the score bound is exact at the extremes; avoid sqrt rounding there
    if hits == 0 {
        let z2 = Z_95 * Z_95;
        return Interval {
            low: 0.0,
            high: z2 / (n + z2),
        };
    }
    if hits == trials {
        let z2 = Z_95 * Z_95;
        return Interval {
            low: n / (n + z2),
            high: 1.0,
        };
    }
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        low: (center - half).max(0.0),
        high: (center + half).min(1.0),
    }
}

/// One-sided rule-of-three upper bound for a zero-hit cell.
pub fn rule_of_three(trials: u64) -> f64 {
    if trials == 0 {
        1.0
    } else {
        (3.0 / trials as f64).min(1.0)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum of exponentials accumulated in log space, so that likelihood ratios
/// from large tilted regions neither underflow nor overflow. Merging is
/// deterministic for a fixed merge order.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: CompensatedSum,
    count: u64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: CompensatedSum::new(),
            count: 0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one term e^{log_term}.
    pub fn add_log(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        self.count += 1;
        if log_term <= self.max {
            self.scaled.add((log_term - self.max).exp());
        } else {
            let rescale = if self.max == f64::NEG_INFINITY {
                0.0
            } else {
                (self.max - log_term).exp()
            };
            self.scaled = CompensatedSum {
                sum: self.scaled.sum * rescale,
                comp: self.scaled.comp * rescale,
            };
            self.scaled.add(1.0);
            self.max = log_term;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.count == 0 {
            return;
        }
        self.count += other.count;
        if other.max <= self.max {
            let rescale = (other.max - self.max).exp();
            self.scaled.add(other.scaled.sum * rescale);
            self.scaled.comp += other.scaled.comp * rescale;
        } else {
            let rescale = if self.max == f64::NEG_INFINITY {
                0.0
            } else {
                (self.max - other.max).exp()
            };
            let mut merged = CompensatedSum {
                sum: self.scaled.sum * rescale,
                comp: self.scaled.comp * rescale,
            };
            merged.add(other.scaled.sum);
            merged.comp += other.scaled.comp;
            self.scaled = merged;
            self.max = other.max;
        }
    }

    /// Number of terms added.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// log of the accumulated sum.
    pub fn log_value(&self) -> f64 {
        if self.count == 0 || self.scaled.value() <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.value().ln()
        }
    }

    /// The accumulated sum in linear scale; may round to 0 or inf. Exact
    /// when every term is 1 (the untilted case), where it reduces to a
    /// counter.
    pub fn value(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.scaled.value() * self.max.exp()
        }
    }
}

/// Welford mean/variance accumulator with deterministic pairwise merging.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / total as f64;
        self.m2 += other.m2 + d * d * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (n - 1 denominator).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count as f64 - 1.0)).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Ordinary least squares fit y = a + b x.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_err: f64,
    pub points: usize,
}

/// OLS slope with its standard error; returns None for fewer than two
/// points or a degenerate abscissa.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    let m = xs.len();
    if m < 2 || m != ys.len() {
        return None;
    }
    let mf = m as f64;
    let xbar = xs.iter().sum::<f64>() / mf;
    let ybar = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let slope_std_err = if m > 2 {
        (rss / (mf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit {
        slope,
        intercept,
        slope_std_err,
        points: m,
    })
}

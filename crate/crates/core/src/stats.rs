//! Streaming moment accumulation (Welford) with order-independent merging,
//! plus the small-sample trend and goodness-of-fit tests used by the harness.

/// Welford online accumulator for mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination; exact for any split of the stream.
    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let delta = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two observations).
    pub fn variance(&self) -> f64 {
        if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count > 1 {
            (self.variance() / self.count as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Exact two-sided Kendall association test for small samples: the p-value of
/// observing a concordance score at least as extreme (in absolute value) as
/// the data's under exchangeability, by enumerating all rank permutations.
pub fn kendall_two_sided_p_value(values: &[f64]) -> f64 {
    let n = values.len();
    assert!((2..=8).contains(&n), "exact Kendall test is for 2..=8 points");
    let observed = kendall_score(values).abs();
    let (mut at_least, mut total) = (0u64, 0u64);
    for_each_permutation(n, &mut |p| {
        total += 1;
        if kendall_score(p).abs() >= observed {
            at_least += 1;
        }
    });
    at_least as f64 / total as f64
}

fn kendall_score(v: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if v[j] > v[i] {
                s += 1;
            } else if v[j] < v[i] {
                s -= 1;
            }
        }
    }
    s
}

fn for_each_permutation(n: usize, tally: &mut dyn FnMut(&[f64])) {
    let mut perm: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut c = vec![0usize; n];
    tally(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exact one-sided Kendall test for an increasing trend, for small samples.
///
/// Returns the p-value of observing a concordance score at least as large as
/// the data's under the null of exchangeability, by enumerating all rank
/// permutations. Panics for n > 8 (the enumeration would be pointless there).
pub fn kendall_increasing_p_value(values: &[f64]) -> f64 {
    let n = values.len();
    assert!((2..=8).contains(&n), "exact Kendall test is for 2..=8 points");
    let score = |v: &[f64]| -> i64 {
        let mut s = 0i64;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                if v[j] > v[i] {
                    s += 1;
                } else if v[j] < v[i] {
                    s -= 1;
                }
            }
        }
        s
    };
    let observed = score(values);
    // Enumerate permutations of 0..n (Heap's algorithm, iterative).
    let mut perm: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut c = vec![0usize; n];
    let mut at_least = 0u64;
    let mut total = 0u64;
    let mut tally = |p: &[f64]| {
        total += 1;
        if score(p) >= observed {
            at_least += 1;
        }
    };
    tally(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    at_least as f64 / total as f64
}

/// Kolmogorov–Smirnov statistic of a sample against an analytic CDF.
pub fn ks_statistic(sample: &mut [f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Ordinary least squares slope of y against x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    num / den
}

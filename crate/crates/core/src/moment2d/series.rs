//! Large-`n` expansions of the closed-form summands.
//!
//! All expansions are driven by two elementary series valid for `n > 2c`
//! (write `A_k = C(2k, k) c^{2k} / (2k)`):
//!
//! ```text
//! log(sqrt(n^2+4c^2) - n) = log(2c^2/n) + sum_k (-1)^k A_k n^{-2k}
//! log(n + sqrt(n^2-4c^2)) = log(2n)     - sum_k        A_k n^{-2k}
//! ```
//!
//! together with the binomial series of the radicals themselves. Truncations
//! keep the closed leading part plus the first `K` correction terms.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which member of the expansion family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesExpansion {
    /// `n log(sqrt(n^2+4c^2) - n)`
    NLogRadicalGap,
    /// `n log(n + sqrt(n^2+4c^2))`
    NLogSumPlus,
    /// `n log(n + sqrt(n^2-4c^2))`
    NLogSumMinus,
    /// `n log(n - sqrt(n^2-4c^2))`
    NLogGapMinus,
    /// `sqrt(n^2+4c^2) - sqrt(n^2-4c^2)`
    SqrtDifference,
    /// `n log` of the four-factor ratio pairing the radical gaps and sums
    LogRatioCombination,
    /// `sqrt(n^2+4c^2) log((sqrt(n^2+4c^2)-n)/(n+sqrt(n^2+4c^2)))`
    RadicalLogPlus,
    /// `sqrt(n^2-4c^2) log((n+sqrt(n^2-4c^2))/(n-sqrt(n^2-4c^2)))`
    RadicalLogMinus,
    /// `(n/2)(log^2(s+-n) + log^2(s++n) - log^2(n+s-) - log^2(n-s-))`
    SquaredLogCombination,
}

pub const ALL_EXPANSIONS: [SeriesExpansion; 9] = [
    SeriesExpansion::NLogRadicalGap,
    SeriesExpansion::NLogSumPlus,
    SeriesExpansion::NLogSumMinus,
    SeriesExpansion::NLogGapMinus,
    SeriesExpansion::SqrtDifference,
    SeriesExpansion::LogRatioCombination,
    SeriesExpansion::RadicalLogPlus,
    SeriesExpansion::RadicalLogMinus,
    SeriesExpansion::SquaredLogCombination,
];

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub which: SeriesExpansion,
    pub n: u64,
    pub c: f64,
    /// Number of correction terms kept beyond the closed leading part.
    pub terms: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesEval {
    pub truncated: f64,
    pub direct: f64,
    pub abs_diff: f64,
}

/// `A_k` coefficients up to `k_max`.
fn log_series_coeffs(c: f64, k_max: usize) -> Vec<f64> {
    // A_k = C(2k, k) c^{2k} / (2k); central binomials by recurrence.
    let mut out = Vec::with_capacity(k_max);
    let mut central = 1.0f64; // C(0,0)
    let mut c_pow = 1.0f64;
    for k in 1..=k_max {
        central *= (2 * (2 * k - 1)) as f64 / k as f64; // C(2k,k) from C(2k-2,k-1)
        c_pow *= c * c;
        out.push(central * c_pow / (2 * k) as f64);
    }
    out
}

/// Binomial-series coefficients `C(1/2, k) 4^k c^{2k}` for the radicals.
fn radical_coeffs(c: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max);
    let mut b = 1.0f64; // C(1/2, 0)
    let mut scale = 1.0f64;
    for k in 1..=k_max {
        b *= (0.5 - (k - 1) as f64) / k as f64;
        scale *= 4.0 * c * c;
        out.push(b * scale);
    }
    out
}

/// Evaluate a truncation against the direct floating-point value.
pub fn series_eval(spec: &SeriesSpec) -> Result<SeriesEval> {
    let SeriesSpec { which, n, c, terms } = *spec;
    let nf = n as f64;
    if !(nf > 2.0 * c) {
        return Err(Error::Domain(format!("series branch requires n > 2c, got n={n}, c={c}")));
    }
    let a = log_series_coeffs(c, terms);
    let b = radical_coeffs(c, terms);
    // Partial sums in inverse powers of n.
    let s_alt: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ak)| {
            let k = i + 1;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sign * ak * nf.powi(-2 * k as i32)
        })
        .sum();
    let s_pos: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ak)| ak * nf.powi(-2 * (i as i32 + 1)))
        .sum();
    let sqrt_plus_tail: f64 = b
        .iter()
        .enumerate()
        .map(|(i, bk)| bk * nf.powi(1 - 2 * (i as i32 + 1)))
        .sum();
    let sqrt_minus_tail: f64 = b
        .iter()
        .enumerate()
        .map(|(i, bk)| {
            let k = i + 1;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sign * bk * nf.powi(1 - 2 * k as i32)
        })
        .sum();

    let ln_gap = (2.0 * c * c / nf).ln(); // leading log of the radical gaps
    let ln_sum = (2.0 * nf).ln();
    let s_plus = (nf * nf + 4.0 * c * c).sqrt();
    let s_minus = (nf * nf - 4.0 * c * c).sqrt();
    // Cancellation-free forms of the small gaps, via the conjugate products
    // (s+ - n)(s+ + n) = 4c^2 and (n - s-)(n + s-) = 4c^2.
    let gap_plus = 4.0 * c * c / (s_plus + nf); // s+ - n
    let gap_minus = 4.0 * c * c / (nf + s_minus); // n - s-

    let (truncated, direct) = match which {
        SeriesExpansion::NLogRadicalGap => {
            (nf * ln_gap + nf * s_alt, nf * gap_plus.ln())
        }
        SeriesExpansion::NLogSumPlus => (nf * ln_sum - nf * s_alt, nf * (nf + s_plus).ln()),
        SeriesExpansion::NLogSumMinus => (nf * ln_sum - nf * s_pos, nf * (nf + s_minus).ln()),
        SeriesExpansion::NLogGapMinus => (nf * ln_gap + nf * s_pos, nf * gap_minus.ln()),
        SeriesExpansion::SqrtDifference => {
            (sqrt_plus_tail - sqrt_minus_tail, 8.0 * c * c / (s_plus + s_minus))
        }
        SeriesExpansion::LogRatioCombination => {
            let truncated = 2.0 * nf * (s_alt - s_pos);
            let direct = nf
                * ((gap_plus * (nf + s_minus)) / ((nf + s_plus) * gap_minus)).ln();
            (truncated, direct)
        }
        SeriesExpansion::RadicalLogPlus => {
            let truncated = 2.0 * (nf + sqrt_plus_tail) * ((c / nf).ln() + s_alt);
            let direct = s_plus * (gap_plus / (nf + s_plus)).ln();
            (truncated, direct)
        }
        SeriesExpansion::RadicalLogMinus => {
            let truncated = 2.0 * (nf + sqrt_minus_tail) * ((nf / c).ln() - s_pos);
            let direct = s_minus * ((nf + s_minus) / gap_minus).ln();
            (truncated, direct)
        }
        SeriesExpansion::SquaredLogCombination => {
            // n (S - R) (2(log c - log n) + (S + R)) exactly rearranges the
            // four squared logs.
            let truncated =
                nf * (s_alt - s_pos) * (2.0 * (c.ln() - nf.ln()) + (s_alt + s_pos));
            let sq = |v: f64| v * v;
            let direct = 0.5
                * nf
                * (sq(gap_plus.ln()) + sq((s_plus + nf).ln())
                    - sq((nf + s_minus).ln())
                    - sq(gap_minus.ln()));
            (truncated, direct)
        }
    };
    Ok(SeriesEval { truncated, direct, abs_diff: (truncated - direct).abs() })
}

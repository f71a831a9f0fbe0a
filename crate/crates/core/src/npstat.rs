//! Distribution-free statistics: Hyndman-Fan quantiles, robust summaries,
//! and one-sided Mann-Whitney U / Wilcoxon signed-rank tests.
//!
//! Both tests use midranks for ties. P-values come from the exact null
//! distribution (subset-sum counting) for small tie-free samples and from a
//! normal approximation with tie-corrected variance and continuity
//! correction otherwise, matching the one-sided defaults of the usual
//! statistical environments.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Largest sample size for which the exact null distribution is used
/// (`n1 + n2` for the rank-sum test, effective `n` for the signed-rank test).
pub const EXACT_LIMIT: usize = 12;

/// Normal-consistency constant applied to the median absolute deviation.
pub const MAD_SCALE: f64 = 1.4826;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NpStatError {
    #[error("empty sample")]
    EmptySample,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("p-value {0} outside (0, 1]")]
    InvalidPValue(f64),
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("degenerate sample: all values equal the hypothesised location")]
    DegenerateSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    Greater,
    Less,
}

impl Alternative {
    pub fn flipped(self) -> Self {
        match self {
            Alternative::Greater => Alternative::Less,
            Alternative::Less => Alternative::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    NormalApprox,
}

/// Symbol coding for one-sided p-values: `***` below 0.001, `**` below 0.01,
/// `*` below 0.05, `.` below 0.1, blank otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignificanceCode {
    ThreeStars,
    TwoStars,
    OneStar,
    Dot,
    NotSignificant,
}

impl SignificanceCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignificanceCode::ThreeStars => "***",
            SignificanceCode::TwoStars => "**",
            SignificanceCode::OneStar => "*",
            SignificanceCode::Dot => ".",
            SignificanceCode::NotSignificant => "",
        }
    }
}

impl fmt::Display for SignificanceCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SignificanceCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Outcome of a one-sided test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    /// U for the rank-sum test, W (positive-rank sum) for the signed-rank test.
    pub statistic: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    pub n1: usize,
    /// Second sample size for the rank-sum test; 0 for one-sample tests.
    pub n2: usize,
    pub method: Method,
    pub significance: SignificanceCode,
}

/// Strict-inequality significance coding. `p` must lie in (0, 1].
pub fn significance_code(p: f64) -> Result<SignificanceCode, NpStatError> {
    if !p.is_finite() || p <= 0.0 || p > 1.0 {
        return Err(NpStatError::InvalidPValue(p));
    }
    Ok(if p < 0.001 {
        SignificanceCode::ThreeStars
    } else if p < 0.01 {
        SignificanceCode::TwoStars
    } else if p < 0.05 {
        SignificanceCode::OneStar
    } else if p < 0.1 {
        SignificanceCode::Dot
    } else {
        SignificanceCode::NotSignificant
    })
}

fn check_finite(values: &[f64]) -> Result<(), NpStatError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(NpStatError::NonFinite);
    }
    Ok(())
}

/// Hyndman-Fan definition 7 quantile: `h = (n - 1) p + 1` over the sorted
/// sample with linear interpolation between order statistics.
pub fn quantile(values: &[f64], p: f64) -> Result<f64, NpStatError> {
    if values.is_empty() {
        return Err(NpStatError::EmptySample);
    }
    check_finite(values)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(NpStatError::InvalidProbability(p));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - h.floor();
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Location, spread and scale summary built from robust estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustSummary {
    pub min: f64,
    pub lower_quartile: f64,
    pub median: f64,
    pub mean: f64,
    pub upper_quartile: f64,
    pub max: f64,
    /// `1.4826 * median(|x - median(x)|)`.
    pub mad: f64,
}

pub fn robust_summary(values: &[f64]) -> Result<RobustSummary, NpStatError> {
    if values.is_empty() {
        return Err(NpStatError::EmptySample);
    }
    check_finite(values)?;
    let median = quantile(values, 0.5)?;
    let abs_dev: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    Ok(RobustSummary {
        min: quantile(values, 0.0)?,
        lower_quartile: quantile(values, 0.25)?,
        median,
        mean: values.iter().sum::<f64>() / values.len() as f64,
        upper_quartile: quantile(values, 0.75)?,
        max: quantile(values, 1.0)?,
        mad: MAD_SCALE * quantile(&abs_dev, 0.5)?,
    })
}

/// Average ranks (midranks) of the input, 1-based.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Number of k-subsets of {1..n} with element sum `s`, for the exact null
/// distributions. Indexed recurrence over (k, n).
fn subset_sum_counts(k: usize, n: usize) -> Vec<f64> {
    // table[j][s] = number of j-subsets of {1..m} with sum s, built up over m
    let max_sum = n * (n + 1) / 2;
    let mut table = vec![vec![0.0; max_sum + 1]; k + 1];
    table[0][0] = 1.0;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            for s in (m..=max_sum).rev() {
                let add = table[j - 1][s - m];
                if add != 0.0 {
                    table[j][s] += add;
                }
            }
        }
    }
    table.swap_remove(k)
}

/// Exact one-sided p-value for the rank-sum statistic.
///
/// `rank_sum` is the sum of the first sample's ranks in the pooled tie-free
/// sample. Exposed so that larger-than-production exact computations can be
/// compared against the normal approximation in tests.
pub fn rank_sum_exact_p(rank_sum: f64, n1: usize, n2: usize, alternative: Alternative) -> f64 {
    let n = n1 + n2;
    let counts = subset_sum_counts(n1, n);
    let total: f64 = counts.iter().sum();
    let tail: f64 = match alternative {
        Alternative::Greater => counts
            .iter()
            .enumerate()
            .filter(|(s, _)| *s as f64 >= rank_sum)
            .map(|(_, c)| c)
            .sum(),
        Alternative::Less => counts
            .iter()
            .enumerate()
            .filter(|(s, _)| *s as f64 <= rank_sum)
            .map(|(_, c)| c)
            .sum(),
    };
    tail / total
}

/// Exact one-sided p-value for the signed-rank statistic `w` with `n`
/// tie-free nonzero differences: sign patterns are counted via the same
/// subset-sum table (positive-rank subsets of {1..n}).
pub fn signed_rank_exact_p(w: f64, n: usize, alternative: Alternative) -> f64 {
    let max_sum = n * (n + 1) / 2;
    // counts[s] = number of subsets of {1..n} (any size) with sum s
    let mut counts = vec![0.0; max_sum + 1];
    counts[0] = 1.0;
    for m in 1..=n {
        for s in (m..=max_sum).rev() {
            let add = counts[s - m];
            if add != 0.0 {
                counts[s] += add;
            }
        }
    }
    let total = 2f64.powi(n as i32);
    let tail: f64 = match alternative {
        Alternative::Greater => counts
            .iter()
            .enumerate()
            .filter(|(s, _)| *s as f64 >= w)
            .map(|(_, c)| c)
            .sum(),
        Alternative::Less => counts
            .iter()
            .enumerate()
            .filter(|(s, _)| *s as f64 <= w)
            .map(|(_, c)| c)
            .sum(),
    };
    tail / total
}

fn normal_upper_tail(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    1.0 - normal.cdf(z)
}

fn normal_lower_tail(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.cdf(z)
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, 1.0)
}

fn tie_term(values: &[f64]) -> f64 {
    let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
    for v in values {
        *groups.entry(v.to_bits()).or_insert(0) += 1;
    }
    groups
        .values()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

/// One-sided two-sample Mann-Whitney U test.
///
/// The statistic is `U = R1 - n1 (n1 + 1) / 2` with `R1` the midrank sum of
/// `x` in the pooled sample. `Greater` asks whether `x` tends to exceed `y`.
pub fn mann_whitney_u(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
) -> Result<TestResult, NpStatError> {
    if x.is_empty() || y.is_empty() {
        return Err(NpStatError::EmptySample);
    }
    check_finite(x)?;
    check_finite(y)?;
    let n1 = x.len();
    let n2 = y.len();
    let pooled: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let tied = has_ties(&pooled);
    let (p, method) = if n1 + n2 <= EXACT_LIMIT && !tied {
        (rank_sum_exact_p(r1, n1, n2, alternative), Method::Exact)
    } else {
        let n = (n1 + n2) as f64;
        let mu = (n1 * n2) as f64 / 2.0;
        let correction = tie_term(&pooled) / (n * (n - 1.0));
        let var = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - correction);
        let p = if var <= 0.0 {
            1.0
        } else {
            let sd = var.sqrt();
            match alternative {
                Alternative::Greater => normal_upper_tail((u - mu - 0.5) / sd),
                Alternative::Less => normal_lower_tail((u - mu + 0.5) / sd),
            }
        };
        (p, Method::NormalApprox)
    };
    let p = clamp_p(p);
    Ok(TestResult {
        statistic: u,
        p_value: p,
        alternative,
        n1,
        n2,
        method,
        significance: significance_code(p)?,
    })
}

/// One-sided one-sample Wilcoxon signed-rank test of location `mu`.
///
/// Values equal to `mu` are discarded; the statistic is the midrank sum of
/// the positive differences. `Greater` asks whether the location exceeds
/// `mu`.
pub fn wilcoxon_signed_rank(
    x: &[f64],
    mu: f64,
    alternative: Alternative,
) -> Result<TestResult, NpStatError> {
    if x.is_empty() {
        return Err(NpStatError::EmptySample);
    }
    check_finite(x)?;
    let diffs: Vec<f64> = x.iter().map(|v| v - mu).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(NpStatError::DegenerateSample);
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();

    let tied = has_ties(&abs);
    let (p, method) = if n <= EXACT_LIMIT && !tied {
        (signed_rank_exact_p(w, n, alternative), Method::Exact)
    } else {
        let nf = n as f64;
        let mu_w = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&ranks) / 48.0;
        let p = if var <= 0.0 {
            1.0
        } else {
            let sd = var.sqrt();
            match alternative {
                Alternative::Greater => normal_upper_tail((w - mu_w - 0.5) / sd),
                Alternative::Less => normal_lower_tail((w - mu_w + 0.5) / sd),
            }
        };
        (p, Method::NormalApprox)
    };
    let p = clamp_p(p);
    Ok(TestResult {
        statistic: w,
        p_value: p,
        alternative,
        n1: n,
        n2: 0,
        method,
        significance: significance_code(p)?,
    })
}

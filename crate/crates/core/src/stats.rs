//! Two-sided Mann–Whitney U test.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest combined sample size for which tie-free inputs get an exact p-value.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// U of the first group: `R1 - n1 (n1 + 1) / 2` with midranks.
    pub u: f64,
    /// Continuity-corrected normal score, signed like `U - n1 n2 / 2`.
    pub z: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    pub tie_correction_applied: bool,
    /// Whether `p_value` comes from the exact null distribution.
    pub exact: bool,
}

impl TestResult {
    /// One-line summary, `U=<v> z=<v> p=<v> n1=<v> n2=<v>`.
    pub fn summary(&self) -> String {
        format!("U={} z={:.6} p={:.6} n1={} n2={}", self.u, self.z, self.p_value, self.n1, self.n2)
    }
}

/// Midranks (1-based) of `values`, and `sum (t^3 - t)` over tie groups.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = mid;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Null distribution of U for tie-free samples: `counts[u]` is the number of
/// group assignments giving that U.
fn u_distribution(n1: usize, n2: usize) -> Vec<u64> {
    // f[i][j][u]: arrangements of i first-group and j second-group items with
    // statistic u; the largest item belongs to either group.
    let max_u = n1 * n2;
    let mut f = vec![vec![vec![0u64; max_u + 1]; n2 + 1]; n1 + 1];
    for i in 0..=n1 {
        for j in 0..=n2 {
            if i == 0 || j == 0 {
                f[i][j][0] = 1;
                continue;
            }
            for u in 0..=i * j {
                let from_first = if u >= j { f[i - 1][j][u - j] } else { 0 };
                let from_second = f[i][j - 1][u];
                f[i][j][u] = from_first + from_second;
            }
        }
    }
    std::mem::take(&mut f[n1][n2])
}

fn exact_two_sided(n1: usize, n2: usize, u: f64) -> f64 {
    let counts = u_distribution(n1, n2);
    let centre = (n1 * n2) as f64;
    let observed = (2.0 * u - centre).abs();
    let total: u64 = counts.iter().sum();
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(k, _)| (2.0 * *k as f64 - centre).abs() >= observed)
        .map(|(_, c)| c)
        .sum();
    extreme as f64 / total as f64
}

/// Mann–Whitney U test of `group_a` against `group_b`, two-sided.
///
/// Small tie-free samples (`n1 + n2 <= 12`) get the exact p-value; otherwise
/// the normal approximation with continuity correction and tie-corrected
/// variance is used.
pub fn mann_whitney_u(group_a: &[f64], group_b: &[f64]) -> Result<TestResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::EmptyInput("Mann-Whitney groups must be non-empty"));
    }
    if group_a.iter().chain(group_b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("Mann-Whitney input must be finite".into()));
    }
    let (n1, n2) = (group_a.len(), group_b.len());
    let pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let (ranks, tie_term) = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let has_ties = tie_term > 0.0;
    let (z, p_normal) = normal_approximation(u, n1, n2, tie_term);
    let exact = !has_ties && n1 + n2 <= EXACT_LIMIT;
    let p_value = if exact { exact_two_sided(n1, n2, u) } else { p_normal };
    Ok(TestResult {
        u,
        z,
        p_value: p_value.clamp(0.0, 1.0),
        n1,
        n2,
        tie_correction_applied: has_ties,
        exact,
    })
}

/// Continuity-corrected normal score and two-sided p-value.
fn normal_approximation(u: f64, n1: usize, n2: usize, tie_term: f64) -> (f64, f64) {
    let n = (n1 + n2) as f64;
    let mean = (n1 * n2) as f64 / 2.0;
    let variance = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)).max(1.0));
    if variance <= 0.0 {
        return (0.0, 1.0);
    }
    let shifted = ((u - mean).abs() - 0.5).max(0.0);
    let z = (shifted / variance.sqrt()).copysign(u - mean);
    (z, erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
}

/// Normal-approximation p-value, whatever the sample size.
pub fn normal_p_value(group_a: &[f64], group_b: &[f64]) -> Result<f64> {
    let r = mann_whitney_u(group_a, group_b)?;
    let pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let (_, tie_term) = midranks(&pooled);
    Ok(normal_approximation(r.u, r.n1, r.n2, tie_term).1)
}

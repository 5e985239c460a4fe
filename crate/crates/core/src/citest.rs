//! Conditional independence tests for binary data.
//!
//! Counts are stratified by the joint assignment of the conditioning set,
//! each stratum contributing a 2×2 table for `(x, y)`. The G² (likelihood
//! ratio) statistic is the default; Pearson's χ² is available as an
//! alternative. Strata with an empty row or column contribute neither to the
//! statistic nor to the degrees of freedom.

use serde::{Deserialize, Serialize};

use crate::dataset::PatternTable;
use crate::{BinaryDataset, Error, Result};

/// Observed 2×2 counts for one realized assignment of the conditioning set.
/// `counts[x][y]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyStratum {
    pub assignment: Vec<u8>,
    pub counts: [[u64; 2]; 2],
}

impl ContingencyStratum {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn margins(&self) -> ([u64; 2], [u64; 2]) {
        let c = &self.counts;
        ([c[0][0] + c[0][1], c[1][0] + c[1][1]], [c[0][0] + c[1][0], c[0][1] + c[1][1]])
    }

    /// All four margins positive.
    pub fn is_informative(&self) -> bool {
        let (rows, cols) = self.margins();
        rows.iter().chain(&cols).all(|&m| m > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestStatistic {
    #[default]
    GSquared,
    PearsonChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CITestResult {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub independent: bool,
    /// Fewer than ten rows per informative stratum.
    pub low_power: bool,
}

impl CITestResult {
    /// Attaches a p-value and decision at `alpha` to a statistic. Zero degrees
    /// of freedom gives p = 1.
    pub fn from_statistic(statistic: f64, dof: u32, alpha: f64) -> Self {
        let p_value = if dof == 0 { 1.0 } else { chi_square_sf(statistic, dof) };
        CITestResult { statistic, dof, p_value, independent: p_value > alpha, low_power: false }
    }
}

/// Splits the counts of `(x, y)` by each realized assignment of `z`, in
/// ascending order of the assignment read as a binary number (first
/// conditioning column most significant).
pub fn stratify_patterns(table: &PatternTable, x: usize, y: usize, z: &[usize]) -> Vec<ContingencyStratum> {
    let mut strata: std::collections::BTreeMap<Vec<u8>, [[u64; 2]; 2]> = Default::default();
    for &(pattern, n) in &table.counts {
        let bit = |i: usize| ((pattern >> i) & 1) as usize;
        let key: Vec<u8> = z.iter().map(|&i| bit(i) as u8).collect();
        strata.entry(key).or_default()[bit(x)][bit(y)] += n;
    }
    strata.into_iter().map(|(assignment, counts)| ContingencyStratum { assignment, counts }).collect()
}

fn resolve(data: &BinaryDataset, x: &str, y: &str, z: &[&str]) -> Result<(usize, usize, Vec<usize>)> {
    if x == y {
        return Err(Error::Validation(format!("cannot test `{x}` against itself")));
    }
    if z.contains(&x) || z.contains(&y) {
        return Err(Error::Validation("tested variables may not appear in the conditioning set".into()));
    }
    let zi = z.iter().map(|c| data.column_index(c)).collect::<Result<Vec<_>>>()?;
    Ok((data.column_index(x)?, data.column_index(y)?, zi))
}

pub fn stratify(data: &BinaryDataset, x: &str, y: &str, z: &[&str]) -> Result<Vec<ContingencyStratum>> {
    let (xi, yi, zi) = resolve(data, x, y, z)?;
    Ok(stratify_patterns(&data.patterns()?, xi, yi, &zi))
}

fn expected(s: &ContingencyStratum) -> [[f64; 2]; 2] {
    let (rows, cols) = s.margins();
    let n = s.total() as f64;
    let mut e = [[0.0; 2]; 2];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = rows[i] as f64 * cols[j] as f64 / n;
        }
    }
    e
}

/// Per-stratum sum of four cell terms, grouped as diagonal plus
/// off-diagonal so that swapping x and y gives a bit-identical result.
fn symmetric_sum(s: &ContingencyStratum, term: impl Fn(f64, f64) -> f64) -> f64 {
    let e = expected(s);
    let t = |i: usize, j: usize| term(s.counts[i][j] as f64, e[i][j]);
    (t(0, 0) + t(1, 1)) + (t(0, 1) + t(1, 0))
}

/// `2 Σ O ln(O/E)` over informative strata, one degree of freedom each.
pub fn g_squared(strata: &[ContingencyStratum]) -> (f64, u32) {
    let mut g = 0.0;
    let mut dof = 0;
    for s in strata.iter().filter(|s| s.is_informative()) {
        g += symmetric_sum(s, |o, e| if o > 0.0 { o * (o / e).ln() } else { 0.0 });
        dof += 1;
    }
    ((2.0 * g).max(0.0), dof)
}

/// `Σ (O − E)² / E` over informative strata.
pub fn pearson_chi_square(strata: &[ContingencyStratum]) -> (f64, u32) {
    let mut x2 = 0.0;
    let mut dof = 0;
    for s in strata.iter().filter(|s| s.is_informative()) {
        x2 += symmetric_sum(s, |o, e| (o - e) * (o - e) / e);
        dof += 1;
    }
    (x2, dof)
}

/// Conditional independence test between two columns of a pattern table.
#[derive(Debug, Clone)]
pub struct CiTester {
    table: PatternTable,
    n_rows: u64,
    pub alpha: f64,
    pub statistic: TestStatistic,
}

impl CiTester {
    pub fn new(data: &BinaryDataset, alpha: f64, statistic: TestStatistic) -> Result<Self> {
        check_alpha(alpha)?;
        let table = data.patterns()?;
        Ok(CiTester { n_rows: table.total(), table, alpha, statistic })
    }

    pub fn test(&self, x: usize, y: usize, z: &[usize]) -> CITestResult {
        let strata = stratify_patterns(&self.table, x, y, z);
        let (stat, dof) = match self.statistic {
            TestStatistic::GSquared => g_squared(&strata),
            TestStatistic::PearsonChiSquare => pearson_chi_square(&strata),
        };
        let mut r = CITestResult::from_statistic(stat, dof, self.alpha);
        r.low_power = dof > 0 && self.n_rows < 10 * u64::from(dof);
        r
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("alpha must be in (0, 1), got {alpha}")))
    }
}

/// G² test of `x ⫫ y | z` at level `alpha`.
pub fn ci_test(data: &BinaryDataset, x: &str, y: &str, z: &[&str], alpha: f64) -> Result<CITestResult> {
    let (xi, yi, zi) = resolve(data, x, y, z)?;
    Ok(CiTester::new(data, alpha, TestStatistic::GSquared)?.test(xi, yi, &zi))
}

// --- χ² distribution -------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(a) for a > 0.
pub fn ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    let a = a - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (a + i as f64);
    }
    let t = a + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (a + 0.5) * t.ln() - t + sum.ln()
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// P(a, x) by its power series; converges quickly for x < a + 1.
fn lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Q(a, x) by modified Lentz continued fraction; for x ≥ a + 1.
fn upper_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma P(a, x).
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        lower_series(a, x)
    } else {
        1.0 - upper_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x), computed
/// without cancellation in the tail.
pub fn regularized_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - lower_series(a, x)
    } else {
        upper_fraction(a, x)
    }
}

/// χ² CDF with `dof ≥ 1` degrees of freedom.
pub fn chi_square_cdf(x: f64, dof: u32) -> f64 {
    regularized_lower_gamma(f64::from(dof) / 2.0, x / 2.0)
}

/// χ² survival function: the p-value of a statistic.
pub fn chi_square_sf(x: f64, dof: u32) -> f64 {
    regularized_upper_gamma(f64::from(dof) / 2.0, x / 2.0).clamp(0.0, 1.0)
}

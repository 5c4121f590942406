use serde::Serialize;
use thiserror::Error;

use super::special::{
    chi_square_critical, chi_square_sf, kolmogorov_critical, kolmogorov_sf, normal_cdf,
};

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const KS_MIN_SAMPLES: usize = 20;
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("{test} needs at least {min} samples, got {n}")]
    TooFewSamples { test: String, n: usize, min: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Outcome of one hypothesis test. `pass` holds exactly when `statistic`
/// does not exceed `critical_value`; every test here rejects in the upper tail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub pass: bool,
    pub sample_sizes: Vec<usize>,
    pub seed: Option<u64>,
    pub df: Option<f64>,
}

impl TestReport {
    fn upper_tail(
        name: &str,
        statistic: f64,
        critical_value: f64,
        p_value: Option<f64>,
        sizes: Vec<usize>,
    ) -> Self {
        TestReport {
            name: name.to_string(),
            statistic,
            critical_value,
            p_value,
            pass: statistic <= critical_value,
            sample_sizes: sizes,
            seed: None,
            df: None,
        }
    }

    /// A deterministic check: passes when `statistic <= bound`.
    pub fn bound(name: &str, statistic: f64, bound: f64, sample_sizes: Vec<usize>) -> Self {
        Self::upper_tail(name, statistic, bound, None, sample_sizes)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn with_df(mut self, df: f64) -> Self {
        self.df = Some(df);
        self
    }
}

fn check_alpha(alpha: f64) -> Result<(), StatsError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidAlpha(alpha))
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(StatsError::NonFinite(i)),
        None => Ok(()),
    }
}

/// Kolmogorov–Smirnov statistic `D_n = sup |F_n − F|` against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn ks_one_sample(
    name: &str,
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    alpha: f64,
) -> Result<TestReport, StatsError> {
    check_alpha(alpha)?;
    if samples.len() < KS_MIN_SAMPLES {
        return Err(StatsError::TooFewSamples {
            test: name.to_string(),
            n: samples.len(),
            min: KS_MIN_SAMPLES,
        });
    }
    check_finite(samples)?;
    let n = samples.len() as f64;
    let d = ks_statistic(samples, cdf);
    let critical = kolmogorov_critical(alpha) / n.sqrt();
    Ok(TestReport::upper_tail(
        name,
        d,
        critical,
        Some(kolmogorov_sf(d * n.sqrt())),
        vec![samples.len()],
    ))
}

/// A contingency table with sparse rows and columns merged into their
/// neighbours until every expected count reaches [`MIN_EXPECTED`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contingency {
    pub counts: Vec<Vec<f64>>,
    pub merges: usize,
}

fn totals(counts: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, f64) {
    let rows: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..counts[0].len())
        .map(|j| counts.iter().map(|r| r[j]).sum())
        .collect();
    let n = rows.iter().sum();
    (rows, cols, n)
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

fn merge_row(m: &mut Vec<Vec<f64>>, i: usize, totals: &[f64]) {
    let j = if i == 0 {
        1
    } else if i + 1 == m.len() || totals[i - 1] <= totals[i + 1] {
        i - 1
    } else {
        i + 1
    };
    let row = m.remove(i);
    let target = if j > i { j - 1 } else { j };
    for (a, b) in m[target].iter_mut().zip(row) {
        *a += b;
    }
}

impl Contingency {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        let mut counts: Vec<Vec<f64>> = table
            .into_iter()
            .filter(|r| r.iter().sum::<f64>() > 0.0)
            .collect();
        if counts.len() < 2 {
            return Err(StatsError::Degenerate(
                "fewer than two nonempty rows".into(),
            ));
        }
        counts = transpose(&counts)
            .into_iter()
            .filter(|c| c.iter().sum::<f64>() > 0.0)
            .collect();
        if counts.len() < 2 {
            return Err(StatsError::Degenerate(
                "fewer than two nonempty columns".into(),
            ));
        }
        counts = transpose(&counts);
        let mut merges = 0;
        loop {
            let (rows, cols, n) = totals(&counts);
            let (rmin, rmin_i) =
                rows.iter()
                    .enumerate()
                    .fold(
                        (f64::INFINITY, 0),
                        |acc, (i, &r)| if r < acc.0 { (r, i) } else { acc },
                    );
            let (cmin, cmin_j) =
                cols.iter()
                    .enumerate()
                    .fold(
                        (f64::INFINITY, 0),
                        |acc, (j, &c)| if c < acc.0 { (c, j) } else { acc },
                    );
            if rmin * cmin / n >= MIN_EXPECTED {
                break;
            }
            let merge_rows = (rmin <= cmin && rows.len() > 2) || cols.len() <= 2;
            if merge_rows && rows.len() > 2 {
                merge_row(&mut counts, rmin_i, &rows);
            } else if cols.len() > 2 {
                let mut t = transpose(&counts);
                merge_row(&mut t, cmin_j, &cols);
                counts = transpose(&t);
            } else {
                break;
            }
            merges += 1;
        }
        Ok(Contingency { counts, merges })
    }

    /// Pearson statistic and its degrees of freedom `(r − 1)(c − 1)`.
    pub fn statistic(&self) -> (f64, f64) {
        let (rows, cols, n) = totals(&self.counts);
        let mut x2 = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &o) in row.iter().enumerate() {
                let e = rows[i] * cols[j] / n;
                x2 += (o - e) * (o - e) / e;
            }
        }
        (x2, ((rows.len() - 1) * (cols.len() - 1)) as f64)
    }
}

pub fn chi_square_table(
    name: &str,
    table: Vec<Vec<f64>>,
    alpha: f64,
) -> Result<TestReport, StatsError> {
    check_alpha(alpha)?;
    let n = table.iter().flatten().sum::<f64>() as usize;
    let c = Contingency::new(table)?;
    let (x2, df) = c.statistic();
    Ok(TestReport::upper_tail(
        name,
        x2,
        chi_square_critical(df, alpha),
        Some(chi_square_sf(x2, df)),
        vec![n],
    )
    .with_df(df))
}

/// χ² test of independence of two discrete labels observed together.
pub fn chi_square_independence(
    name: &str,
    pairs: &[(usize, usize)],
    alpha: f64,
) -> Result<TestReport, StatsError> {
    let r = pairs.iter().map(|p| p.0).max().map_or(0, |m| m + 1);
    let c = pairs.iter().map(|p| p.1).max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; c]; r];
    for &(a, b) in pairs {
        table[a][b] += 1.0;
    }
    chi_square_table(name, table, alpha)
}

/// χ² test that two samples of bin labels come from the same distribution.
pub fn chi_square_two_sample(
    name: &str,
    a: &[usize],
    b: &[usize],
    alpha: f64,
) -> Result<TestReport, StatsError> {
    let k = a.iter().chain(b).max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; k]; 2];
    for &x in a {
        table[0][x] += 1.0;
    }
    for &x in b {
        table[1][x] += 1.0;
    }
    let mut report = chi_square_table(name, table, alpha)?;
    report.sample_sizes = vec![a.len(), b.len()];
    Ok(report)
}

/// χ² goodness of fit of bin counts to probabilities; bins with expected
/// counts below [`MIN_EXPECTED`] are merged into a neighbour.
pub fn chi_square_goodness_of_fit(
    name: &str,
    observed: &[usize],
    probabilities: &[f64],
    alpha: f64,
) -> Result<TestReport, StatsError> {
    check_alpha(alpha)?;
    if observed.len() != probabilities.len() {
        return Err(StatsError::LengthMismatch(
            observed.len(),
            probabilities.len(),
        ));
    }
    check_finite(probabilities)?;
    let n: usize = observed.iter().sum();
    let total_p: f64 = probabilities.iter().sum();
    let mut bins: Vec<(f64, f64)> = observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| (o as f64, p / total_p * n as f64))
        .collect();
    if bins.iter().any(|b| b.1 == 0.0 && b.0 > 0.0) {
        return Ok(TestReport::upper_tail(
            name,
            f64::INFINITY,
            0.0,
            Some(0.0),
            vec![n],
        ));
    }
    bins.retain(|b| b.1 > 0.0);
    while bins.len() > 1 {
        let (i, _) = bins
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, b)| if b.1 < acc.1 { (i, b.1) } else { acc },
            );
        if bins[i].1 >= MIN_EXPECTED {
            break;
        }
        let j = if i == 0 {
            1
        } else if i + 1 == bins.len() || bins[i - 1].1 <= bins[i + 1].1 {
            i - 1
        } else {
            i + 1
        };
        let b = bins.remove(i);
        let t = if j > i { j - 1 } else { j };
        bins[t].0 += b.0;
        bins[t].1 += b.1;
    }
    if bins.len() < 2 {
        return Err(StatsError::Degenerate(
            "fewer than two bins after merging".into(),
        ));
    }
    let x2: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = (bins.len() - 1) as f64;
    Ok(TestReport::upper_tail(
        name,
        x2,
        chi_square_critical(df, alpha),
        Some(chi_square_sf(x2, df)),
        vec![n],
    )
    .with_df(df))
}

/// `|p̂ − p0| / sqrt(p0 (1 − p0) / n)` against `z_max` standard errors.
pub fn proportion_test(
    name: &str,
    successes: usize,
    n: usize,
    p0: f64,
    z_max: f64,
) -> Result<TestReport, StatsError> {
    if n == 0 {
        return Err(StatsError::TooFewSamples {
            test: name.to_string(),
            n,
            min: 1,
        });
    }
    let p_hat = successes as f64 / n as f64;
    let sd = (p0 * (1.0 - p0) / n as f64).sqrt();
    let z = if sd > 0.0 {
        (p_hat - p0).abs() / sd
    } else if p_hat == p0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(TestReport::upper_tail(
        name,
        z,
        z_max,
        Some(2.0 * normal_cdf(-z)),
        vec![n],
    ))
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples {
            test: "pearson".into(),
            n: x.len(),
            min: 2,
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Degenerate("constant input".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// `|corr(x, y)|` against a fixed threshold.
pub fn correlation_screen(
    name: &str,
    x: &[f64],
    y: &[f64],
    threshold: f64,
) -> Result<TestReport, StatsError> {
    let r = pearson(x, y)?;
    Ok(TestReport::upper_tail(
        name,
        r.abs(),
        threshold,
        None,
        vec![x.len()],
    ))
}

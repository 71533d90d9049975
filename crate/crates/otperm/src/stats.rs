//! Grouped samples, test-statistic vectors, permutation ensembles, partial
//! p-values, and combining functions.
//!
//! A [`GroupedSample`] holds univariate observations with group labels
//! `1..=K`. A [`Statistic`] maps a grouped sample to a [`StatVector`] (one
//! or more coordinates, each one- or two-sided). [`permute_ensemble`]
//! evaluates a statistic on the observed labels (row 0) and on `B` uniform
//! random relabelings (rows 1..=B); everything downstream — partial
//! p-values, combining functions, transport — consumes that ensemble.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seeding::{substream, DOMAIN_PERMUTATION};
use rand::seq::SliceRandom;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// How extreme values of a statistic coordinate are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    /// Extremeness is measured by absolute value.
    TwoSided,
    /// Larger values are more extreme.
    OneSidedUpper,
}

/// Univariate observations with group labels `1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    values: Vec<f64>,
    labels: Vec<usize>,
    k: usize,
}

impl GroupedSample {
    /// # Errors
    ///
    /// [`Error::InvalidInput`] when lengths differ, a value is non-finite,
    /// a label is 0 or above `K = max(labels)`, or some group in `1..=K`
    /// is empty.
    pub fn new(values: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if values.len() != labels.len() {
            return Err(Error::input(format!(
                "{} values but {} labels",
                values.len(),
                labels.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::input("sample is empty"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::input("sample values must be finite"));
        }
        let k = *labels.iter().max().unwrap();
        if labels.contains(&0) {
            return Err(Error::input("group labels start at 1"));
        }
        let mut counts = vec![0usize; k + 1];
        for &l in &labels {
            counts[l] += 1;
        }
        if let Some(missing) = (1..=k).find(|&g| counts[g] == 0) {
            return Err(Error::input(format!("group {missing} of {k} is empty")));
        }
        Ok(GroupedSample { values, labels, k })
    }

    /// Convenience constructor from per-group value lists.
    pub fn from_groups(groups: &[Vec<f64>]) -> Result<Self> {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (g, vs) in groups.iter().enumerate() {
            values.extend_from_slice(vs);
            labels.extend(std::iter::repeat(g + 1).take(vs.len()));
        }
        GroupedSample::new(values, labels)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of groups `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Values in group `g` (1-based).
    pub fn group_values(&self, g: usize) -> Vec<f64> {
        self.values.iter().zip(&self.labels).filter(|(_, &l)| l == g).map(|(&v, _)| v).collect()
    }

    pub fn group_size(&self, g: usize) -> usize {
        self.labels.iter().filter(|&&l| l == g).count()
    }

    fn relabeled(&self, labels: Vec<usize>) -> GroupedSample {
        GroupedSample { values: self.values.clone(), labels, k: self.k }
    }
}

/// A test-statistic vector with per-coordinate sidedness.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVector {
    values: Vec<f64>,
    sidedness: Vec<Sidedness>,
}

impl StatVector {
    /// # Errors
    ///
    /// [`Error::InvalidInput`] on empty or non-finite values or a sidedness
    /// list of the wrong length.
    pub fn new(values: Vec<f64>, sidedness: Vec<Sidedness>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("statistic vector is empty"));
        }
        if values.len() != sidedness.len() {
            return Err(Error::input("one sidedness per statistic coordinate"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::degenerate("statistic evaluated to a non-finite value"));
        }
        Ok(StatVector { values, sidedness })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sidedness(&self) -> &[Sidedness] {
        &self.sidedness
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// A multivariate test statistic on grouped samples. Implementations must
/// be pure: the same sample always yields the same vector.
pub trait Statistic: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, sample: &GroupedSample) -> Result<StatVector>;
}

// ── concrete statistics ─────────────────────────────────────────────────

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Pooled two-sample t statistic
/// `(mean(x) - mean(y)) / (s_p * sqrt(1/n1 + 1/n2))`.
///
/// # Errors
///
/// [`Error::InvalidInput`] when either sample has fewer than 2 points;
/// [`Error::Degenerate`] when the pooled variance is zero.
pub fn two_sample_t(x: &[f64], y: &[f64]) -> Result<f64> {
    let (n1, n2) = (x.len(), y.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::input("two-sample t needs at least 2 points per group"));
    }
    let pooled = (sum_sq_dev(x) + sum_sq_dev(y)) / (n1 + n2 - 2) as f64;
    if pooled == 0.0 {
        return Err(Error::degenerate("zero pooled variance"));
    }
    let se = (pooled * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    Ok((mean(x) - mean(y)) / se)
}

/// Vector of pairwise two-sample t statistics over the listed 1-based group
/// pairs; all coordinates two-sided.
pub fn pairwise_t_vector(sample: &GroupedSample, pairs: &[(usize, usize)]) -> Result<StatVector> {
    if pairs.is_empty() {
        return Err(Error::input("no group pairs listed"));
    }
    for &(a, b) in pairs {
        if a == 0 || b == 0 || a > sample.k() || b > sample.k() || a == b {
            return Err(Error::input(format!(
                "invalid group pair ({a}, {b}) for K = {}",
                sample.k()
            )));
        }
    }
    let mut values = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        values.push(two_sample_t(&sample.group_values(a), &sample.group_values(b))?);
    }
    StatVector::new(values, vec![Sidedness::TwoSided; pairs.len()])
}

/// Helmert-contrast t statistics: coordinate `m` compares group `m + 1`
/// against the average of groups `1..=m`, standardized by the pooled
/// variance over all `K` groups (`n - K` degrees of freedom). Two-sided.
pub fn helmert_t_vector(sample: &GroupedSample) -> Result<StatVector> {
    let k = sample.k();
    if k < 2 {
        return Err(Error::input("Helmert contrasts need at least 2 groups"));
    }
    let groups: Vec<Vec<f64>> = (1..=k).map(|g| sample.group_values(g)).collect();
    if groups.iter().any(|g| g.len() < 2) {
        return Err(Error::input("Helmert contrasts need at least 2 points per group"));
    }
    let n = sample.n();
    let pooled = groups.iter().map(|g| sum_sq_dev(g)).sum::<f64>() / (n - k) as f64;
    if pooled == 0.0 {
        return Err(Error::degenerate("zero pooled variance"));
    }
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let mut values = Vec::with_capacity(k - 1);
    for m in 1..k {
        // Contrast (-1/m, ..., -1/m, 1, 0, ..., 0) with the 1 at index m.
        let mut contrast = vec![0.0; k];
        for c in contrast.iter_mut().take(m) {
            *c = -1.0 / m as f64;
        }
        contrast[m] = 1.0;
        let estimate: f64 = contrast.iter().zip(&means).map(|(c, m)| c * m).sum();
        let scale: f64 =
            contrast.iter().enumerate().map(|(g, c)| c * c / groups[g].len() as f64).sum();
        values.push(estimate / (pooled * scale).sqrt());
    }
    StatVector::new(values, vec![Sidedness::TwoSided; k - 1])
}

/// One-way ANOVA F statistic; one-sided (large values are extreme).
pub fn anova_f(sample: &GroupedSample) -> Result<f64> {
    let k = sample.k();
    if k < 2 {
        return Err(Error::input("ANOVA needs at least 2 groups"));
    }
    let n = sample.n();
    if n <= k {
        return Err(Error::input("ANOVA needs more observations than groups"));
    }
    let grand = mean(sample.values());
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in 1..=k {
        let values = sample.group_values(g);
        let m = mean(&values);
        ss_between += values.len() as f64 * (m - grand) * (m - grand);
        ss_within += sum_sq_dev(&values);
    }
    if ss_within == 0.0 {
        return Err(Error::degenerate("zero within-group variance"));
    }
    Ok((ss_between / (k - 1) as f64) / (ss_within / (n - k) as f64))
}

/// Two-sample location-and-scale vector `(t, log(s1^2 / s2^2))`; both
/// coordinates two-sided.
pub fn mean_var_vector(x: &[f64], y: &[f64]) -> Result<StatVector> {
    let t = two_sample_t(x, y)?;
    let v1 = sum_sq_dev(x) / (x.len() - 1) as f64;
    let v2 = sum_sq_dev(y) / (y.len() - 1) as f64;
    if v1 == 0.0 || v2 == 0.0 {
        return Err(Error::degenerate("zero group variance in log variance ratio"));
    }
    StatVector::new(vec![t, (v1 / v2).ln()], vec![Sidedness::TwoSided; 2])
}

/// Pairwise t statistics against a baseline group or over all pairs.
#[derive(Debug, Clone)]
pub struct PairwiseT {
    pairs: Vec<(usize, usize)>,
}

impl PairwiseT {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        PairwiseT { pairs }
    }

    /// Pairs `(1, j)` for `j = 2..=k`: every group against the first.
    pub fn versus_first(k: usize) -> Self {
        PairwiseT { pairs: (2..=k).map(|j| (1, j)).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl Statistic for PairwiseT {
    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn eval(&self, sample: &GroupedSample) -> Result<StatVector> {
        pairwise_t_vector(sample, &self.pairs)
    }
}

/// Helmert-contrast t vector for `k` groups.
#[derive(Debug, Clone)]
pub struct HelmertT {
    k: usize,
}

impl HelmertT {
    pub fn new(k: usize) -> Self {
        HelmertT { k }
    }
}

impl Statistic for HelmertT {
    fn dim(&self) -> usize {
        self.k - 1
    }

    fn eval(&self, sample: &GroupedSample) -> Result<StatVector> {
        if sample.k() != self.k {
            return Err(Error::input(format!(
                "statistic expects {} groups, sample has {}",
                self.k,
                sample.k()
            )));
        }
        helmert_t_vector(sample)
    }
}

/// Two-sample `(t, log variance ratio)` statistic.
#[derive(Debug, Clone, Default)]
pub struct MeanLogVar;

impl Statistic for MeanLogVar {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, sample: &GroupedSample) -> Result<StatVector> {
        if sample.k() != 2 {
            return Err(Error::input("mean/log-variance statistic needs exactly 2 groups"));
        }
        mean_var_vector(&sample.group_values(1), &sample.group_values(2))
    }
}

/// Adapter for user-supplied statistics: any pure function from a grouped
/// sample to a statistic vector.
pub struct FnStatistic<F> {
    dim: usize,
    f: F,
}

impl<F> FnStatistic<F>
where
    F: Fn(&GroupedSample) -> Result<StatVector> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnStatistic { dim, f }
    }
}

impl<F> Statistic for FnStatistic<F>
where
    F: Fn(&GroupedSample) -> Result<StatVector> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, sample: &GroupedSample) -> Result<StatVector> {
        (self.f)(sample)
    }
}

// ── permutation ensembles ───────────────────────────────────────────────

/// Statistic vectors for the observed labeling (row 0) and `B` random
/// relabelings (rows 1..=B).
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationEnsemble {
    rows: Matrix,
    sidedness: Vec<Sidedness>,
    seed: u64,
}

impl PermutationEnsemble {
    /// Wrap precomputed rows (row 0 observed). Mainly for tests and custom
    /// workflows; [`permute_ensemble`] is the usual constructor.
    pub fn from_rows(rows: Matrix, sidedness: Vec<Sidedness>, seed: u64) -> Result<Self> {
        if rows.n_rows() < 2 {
            return Err(Error::input("ensemble needs the observed row plus B >= 1 permutations"));
        }
        if sidedness.len() != rows.n_cols() {
            return Err(Error::input("one sidedness per ensemble column"));
        }
        if !rows.is_finite() {
            return Err(Error::input("ensemble rows must be finite"));
        }
        Ok(PermutationEnsemble { rows, sidedness, seed })
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    /// Number of permutations `B` (the matrix has `B + 1` rows).
    pub fn b(&self) -> usize {
        self.rows.n_rows() - 1
    }

    pub fn dim(&self) -> usize {
        self.rows.n_cols()
    }

    pub fn sidedness(&self) -> &[Sidedness] {
        &self.sidedness
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The sub-ensemble using only the first `b` permutations. Lets one
    /// ensemble serve grids of different sizes.
    pub fn head(&self, b: usize) -> Result<PermutationEnsemble> {
        if b == 0 || b > self.b() {
            return Err(Error::input(format!(
                "cannot take {b} permutations from an ensemble of {}",
                self.b()
            )));
        }
        Ok(PermutationEnsemble {
            rows: self.rows.head(b + 1),
            sidedness: self.sidedness.clone(),
            seed: self.seed,
        })
    }

    /// Componentwise absolute values, all coordinates one-sided. This is
    /// the ensemble one-sided tests transport to positive grids.
    pub fn absolutized(&self) -> PermutationEnsemble {
        let mut rows = self.rows.clone();
        for i in 0..rows.n_rows() {
            rows.row_mut(i).iter_mut().for_each(|v| *v = v.abs());
        }
        PermutationEnsemble {
            rows,
            sidedness: vec![Sidedness::OneSidedUpper; self.sidedness.len()],
            seed: self.seed,
        }
    }
}

/// Evaluate `stat` on the observed labels and on `B` uniform relabelings.
///
/// Permutation `b` draws from the substream `(seed, b)`, so ensembles are
/// reproducible and independent of evaluation order. Relabelings on which
/// the statistic is degenerate (for example zero pooled variance) are
/// redrawn, at most 100 times each, before giving up.
///
/// # Errors
///
/// [`Error::InvalidInput`] when `B = 0`; [`Error::Degenerate`] when the
/// observed statistic is degenerate or some permutation stays degenerate
/// after 100 redraws; evaluation errors propagate.
pub fn permute_ensemble(
    sample: &GroupedSample,
    stat: &dyn Statistic,
    b: usize,
    seed: u64,
) -> Result<PermutationEnsemble> {
    if b == 0 {
        return Err(Error::input("B must be at least 1"));
    }
    let observed = stat.eval(sample)?;
    let d = observed.dim();
    let mut rows = Matrix::zeros(b + 1, d);
    rows.row_mut(0).copy_from_slice(observed.values());
    for bi in 1..=b {
        let mut rng = substream(seed, &[DOMAIN_PERMUTATION, bi as u64]);
        let mut attempt = 0;
        let vector = loop {
            let mut labels = sample.labels().to_vec();
            labels.shuffle(&mut rng);
            match stat.eval(&sample.relabeled(labels)) {
                Ok(v) => break v,
                Err(Error::Degenerate(msg)) => {
                    attempt += 1;
                    if attempt > 100 {
                        return Err(Error::degenerate(format!(
                            "permutation {bi} stayed degenerate after 100 redraws: {msg}"
                        )));
                    }
                }
                Err(e) => return Err(e),
            }
        };
        if vector.dim() != d {
            return Err(Error::input(format!(
                "statistic changed dimension from {d} to {} on permutation {bi}",
                vector.dim()
            )));
        }
        rows.row_mut(bi).copy_from_slice(vector.values());
    }
    Ok(PermutationEnsemble { rows, sidedness: observed.sidedness().to_vec(), seed })
}

// ── partial p-values and combining functions ────────────────────────────

/// Partial p-values `p_{b,j}` for every ensemble row `b` and coordinate `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialPValueMatrix {
    p: Matrix,
}

impl PartialPValueMatrix {
    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn b(&self) -> usize {
        self.p.n_rows() - 1
    }

    pub fn dim(&self) -> usize {
        self.p.n_cols()
    }
}

/// Partial p-value of every row against the permutation rows:
/// `p_{b,j} = (1 + #{s in 1..=B : key_{s,j} >= key_{b,j}}) / (B + 1)`,
/// where the key is `|T|` for two-sided coordinates and `T` itself for
/// one-sided ones. The sum ranges over the permutation rows only, so row 0
/// is compared against the others and rows `b >= 1` count themselves.
pub fn partial_pvalues(ensemble: &PermutationEnsemble) -> PartialPValueMatrix {
    let b = ensemble.b();
    let d = ensemble.dim();
    let mut p = Matrix::zeros(b + 1, d);
    let mut keys = Vec::with_capacity(b + 1);
    for j in 0..d {
        keys.clear();
        let two_sided = ensemble.sidedness()[j] == Sidedness::TwoSided;
        for i in 0..=b {
            let t = ensemble.rows().get(i, j);
            keys.push(if two_sided { t.abs() } else { t });
        }
        let mut sorted: Vec<f64> = keys[1..].to_vec();
        sorted.sort_by(f64::total_cmp);
        for (i, key) in keys.iter().enumerate() {
            let below = sorted.partition_point(|v| v < key);
            let count = b - below; // permutation rows with key >= key_i
            p.set(i, j, (1 + count) as f64 / (b + 1) as f64);
        }
    }
    PartialPValueMatrix { p }
}

/// Nonparametric combining functions applied to a row of partial p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombiningFunction {
    /// `max_j (1 - p_j)`
    Tippett,
    /// `-2 sum_j log(p_j)`
    Fisher,
    /// `sum_j Phi^{-1}(1 - p_j)`; `Phi^{-1}(0) = -inf`, compared as IEEE
    /// extended reals (so a tie at `-inf` counts as `>=`).
    Liptak,
}

impl CombiningFunction {
    pub fn apply(&self, p_row: &[f64]) -> f64 {
        match self {
            CombiningFunction::Tippett => {
                p_row.iter().map(|p| 1.0 - p).fold(f64::NEG_INFINITY, f64::max)
            }
            CombiningFunction::Fisher => -2.0 * p_row.iter().map(|p| p.ln()).sum::<f64>(),
            CombiningFunction::Liptak => {
                let normal = Normal::new(0.0, 1.0).expect("standard normal");
                p_row
                    .iter()
                    .map(|&p| {
                        let q = 1.0 - p;
                        if q <= 0.0 {
                            f64::NEG_INFINITY
                        } else if q >= 1.0 {
                            f64::INFINITY
                        } else {
                            normal.inverse_cdf(q)
                        }
                    })
                    .sum()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CombiningFunction::Tippett => "tippett",
            CombiningFunction::Fisher => "fisher",
            CombiningFunction::Liptak => "liptak",
        }
    }
}

/// Combined p-value: apply `f` to every row of partial p-values and count
/// permutation rows at least as extreme as row 0,
/// `p_0 = (1 + #{b >= 1 : Q_b >= Q_0}) / (B + 1)`.
pub fn combine(p_matrix: &PartialPValueMatrix, f: CombiningFunction) -> f64 {
    let b = p_matrix.b();
    let q0 = f.apply(p_matrix.p().row(0));
    let exceed = (1..=b).filter(|&i| f.apply(p_matrix.p().row(i)) >= q0).count();
    (1 + exceed) as f64 / (b + 1) as f64
}

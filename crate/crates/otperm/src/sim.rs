//! Seeded Monte Carlo power studies: location-shift and scale designs for
//! 2, 3, and 4 groups, with the transport pipelines, combining functions,
//! and classical F/t baselines run side by side on shared permutation
//! ensembles.
//!
//! A scenario is fully determined by its master seed: replicate `r` draws
//! its data from the substream `(seed, DATA, scenario, r)` and its
//! permutations and tie-breaks from sibling substreams, so reports are
//! bit-identical across runs and across the parallel/sequential execution
//! modes.

use crate::error::{Error, Result};
use crate::grids::{build_grid, Grid, GridKind, GridOrthant, GridSpec, LowDiscSource};
use crate::pipeline::{
    combine_test, decide, transport_pvalue_test, transport_statistic_test, Decision,
};
use crate::seeding::{mix, mix_str, substream, DOMAIN_SIM_DATA, DOMAIN_SIM_ENSEMBLE, DOMAIN_TIES};
use crate::stats::{
    anova_f, mean_var_vector, permute_ensemble, two_sample_t, CombiningFunction, HelmertT,
    MeanLogVar, PairwiseT, Statistic,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Distribution of the standardized error term (mean 0, variance 1);
/// group scales multiply it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorLaw {
    Normal,
    /// Centered and standardized chi-square with 2 degrees of freedom,
    /// `(X - 2) / 2`: a skewed error with the same first two moments as
    /// the normal one.
    StandardizedChi2,
}

impl ErrorLaw {
    pub fn label(&self) -> &'static str {
        match self {
            ErrorLaw::Normal => "normal",
            ErrorLaw::StandardizedChi2 => "chi2",
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ErrorLaw::Normal => rng.sample(StandardNormal),
            ErrorLaw::StandardizedChi2 => {
                let chi = ChiSquared::new(2.0).expect("chi-square with 2 df");
                (chi.sample(rng) - 2.0) / 2.0
            }
        }
    }
}

/// Which multivariate statistic a scenario permutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    /// t statistics of groups 2..K against group 1 (dimension K - 1).
    PairwiseVsFirst,
    /// Helmert-contrast t statistics (dimension K - 1).
    Helmert,
    /// Two-group `(t, log variance ratio)` (dimension 2).
    MeanLogVar,
}

impl StatisticKind {
    pub fn id(&self) -> &'static str {
        match self {
            StatisticKind::PairwiseVsFirst => "pairwise-t",
            StatisticKind::Helmert => "helmert-t",
            StatisticKind::MeanLogVar => "mean-logvar",
        }
    }

    pub fn dim(&self, k: usize) -> usize {
        match self {
            StatisticKind::PairwiseVsFirst | StatisticKind::Helmert => k - 1,
            StatisticKind::MeanLogVar => 2,
        }
    }

    pub fn instantiate(&self, k: usize) -> Box<dyn Statistic> {
        match self {
            StatisticKind::PairwiseVsFirst => Box::new(PairwiseT::versus_first(k)),
            StatisticKind::Helmert => Box::new(HelmertT::new(k)),
            StatisticKind::MeanLogVar => Box::new(MeanLogVar),
        }
    }
}

/// One test to tally inside a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    /// Classical one-way ANOVA F test with F-distribution critical value.
    FTest,
    /// Classical two-group two-sided t test (t-distribution critical value).
    TTest,
    /// Classical two-sided variance-ratio F test.
    VarFTest,
    /// Nonparametric combination with `B` permutations.
    Combine(CombiningFunction, usize),
    /// Transport of the signed statistic vectors to a full grid.
    TransportStat(GridSpec),
    /// Transport of componentwise absolute values to a positive grid.
    TransportStatAbs(GridSpec),
    /// Transport of complemented partial p-values to a positive grid.
    TransportPValue(GridSpec),
}

impl MethodSpec {
    /// Stable identifier used in reports and on the command line: `f-test`,
    /// `t-test`, `var-f-test`, `combine-<fn>`, `t-P`, `t-N`, `t-P+`,
    /// `t-N+`, `p-P+`, `p-N+`.
    pub fn id(&self) -> String {
        fn grid_tag(spec: &GridSpec) -> &'static str {
            match spec.kind {
                GridKind::Product { .. } => "P",
                GridKind::NonProduct => "N",
            }
        }
        match self {
            MethodSpec::FTest => "f-test".to_string(),
            MethodSpec::TTest => "t-test".to_string(),
            MethodSpec::VarFTest => "var-f-test".to_string(),
            MethodSpec::Combine(f, _) => format!("combine-{}", f.name()),
            MethodSpec::TransportStat(g) => format!("t-{}", grid_tag(g)),
            MethodSpec::TransportStatAbs(g) => format!("t-{}+", grid_tag(g)),
            MethodSpec::TransportPValue(g) => format!("p-{}+", grid_tag(g)),
        }
    }

    /// Permutations this method consumes (0 for the classical tests).
    pub fn b(&self) -> usize {
        match self {
            MethodSpec::FTest | MethodSpec::TTest | MethodSpec::VarFTest => 0,
            MethodSpec::Combine(_, b) => *b,
            MethodSpec::TransportStat(g)
            | MethodSpec::TransportStatAbs(g)
            | MethodSpec::TransportPValue(g) => g.b,
        }
    }

    fn grid_spec(&self) -> Option<&GridSpec> {
        match self {
            MethodSpec::TransportStat(g)
            | MethodSpec::TransportStatAbs(g)
            | MethodSpec::TransportPValue(g) => Some(g),
            _ => None,
        }
    }
}

/// A complete simulation cell: data-generating design plus the methods to
/// compare on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub group_sizes: Vec<usize>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub law: ErrorLaw,
    pub statistic: StatisticKind,
    pub methods: Vec<MethodSpec>,
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Scenario {
    pub fn k(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_replications(mut self, r: usize) -> Self {
        self.replications = r;
        self
    }

    /// # Errors
    ///
    /// [`Error::InvalidConfig`] describing the first violated rule.
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k < 2 {
            return Err(Error::config("scenario needs at least 2 groups"));
        }
        if self.group_sizes.iter().any(|&n| n < 2) {
            return Err(Error::config("every group needs at least 2 observations"));
        }
        if self.means.len() != k || self.scales.len() != k {
            return Err(Error::config("one mean and one scale per group"));
        }
        if self.scales.iter().any(|&s| s <= 0.0 || s.is_nan()) {
            return Err(Error::config("group scales must be positive"));
        }
        if self.replications < 1 {
            return Err(Error::config("replications must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0, 1)"));
        }
        if self.statistic == StatisticKind::MeanLogVar && k != 2 {
            return Err(Error::config("mean/log-variance statistic needs exactly 2 groups"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("scenario lists no methods"));
        }
        let d = self.statistic.dim(k);
        for m in &self.methods {
            if matches!(m, MethodSpec::TTest | MethodSpec::VarFTest) && k != 2 {
                return Err(Error::config(format!("{} needs exactly 2 groups", m.id())));
            }
            if let MethodSpec::Combine(_, b) = m {
                if *b == 0 {
                    return Err(Error::config("combining needs at least 1 permutation"));
                }
            }
            if let Some(g) = m.grid_spec() {
                g.validate()?;
                if g.d != d {
                    return Err(Error::config(format!(
                        "method {} uses a d = {} grid but the statistic has dimension {d}",
                        m.id(),
                        g.d
                    )));
                }
                let want_full = matches!(m, MethodSpec::TransportStat(_));
                let is_full = g.orthant == GridOrthant::Full;
                if want_full != is_full {
                    return Err(Error::config(format!(
                        "method {} needs a {} grid",
                        m.id(),
                        if want_full { "full" } else { "positive-orthant" }
                    )));
                }
                if !want_full && g.orthant != GridOrthant::Positive {
                    return Err(Error::config(format!(
                        "method {} needs a positive-orthant grid",
                        m.id()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Tallies for one method within a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: String,
    pub rejections: usize,
    /// Empirical rejection rate.
    pub rate: f64,
    /// Binomial Monte Carlo standard error `sqrt(rate (1 - rate) / R)`.
    pub se: f64,
    /// Squared components of the normalized mean direction over rejecting
    /// replicates (transport methods only; `None` without a single
    /// rejection).
    pub mean_contributions: Option<Vec<f64>>,
    /// Angle of that mean direction in `[0, 2 pi)` (bivariate transport
    /// methods only).
    pub mean_angle: Option<f64>,
}

/// Summary of a full scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub scenario: String,
    pub alpha: f64,
    pub replications: usize,
    /// Draws replaced because the statistic was degenerate on them.
    pub degenerate_draws: usize,
    pub methods: Vec<MethodReport>,
}

/// Replicates run via the thread pool or strictly in order. Both modes
/// produce identical reports; `Sequential` exists for benchmarking and for
/// builds without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Parallel,
    Sequential,
}

/// Pre-resolved critical values for the classical tests.
enum Critical {
    None,
    UpperF(f64),
    TwoSidedT(f64),
    TwoSidedVarF(f64, f64),
}

struct ReplicateOutcome {
    rejected: Vec<bool>,
    directions: Vec<Option<Vec<f64>>>,
    replaced: usize,
}

fn draw_sample(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<crate::stats::GroupedSample> {
    let groups: Vec<Vec<f64>> = (0..s.k())
        .map(|j| {
            (0..s.group_sizes[j]).map(|_| s.means[j] + s.scales[j] * s.law.draw(rng)).collect()
        })
        .collect();
    crate::stats::GroupedSample::from_groups(&groups)
}

fn critical_values(s: &Scenario) -> Result<Vec<Critical>> {
    let n: usize = s.group_sizes.iter().sum();
    let k = s.k();
    s.methods
        .iter()
        .map(|m| {
            Ok(match m {
                MethodSpec::FTest => {
                    let dist = FisherSnedecor::new((k - 1) as f64, (n - k) as f64)
                        .map_err(|e| Error::config(format!("F distribution: {e}")))?;
                    Critical::UpperF(dist.inverse_cdf(1.0 - s.alpha))
                }
                MethodSpec::TTest => {
                    let dist = StudentsT::new(0.0, 1.0, (n - 2) as f64)
                        .map_err(|e| Error::config(format!("t distribution: {e}")))?;
                    Critical::TwoSidedT(dist.inverse_cdf(1.0 - s.alpha / 2.0))
                }
                MethodSpec::VarFTest => {
                    let df1 = (s.group_sizes[0] - 1) as f64;
                    let df2 = (s.group_sizes[1] - 1) as f64;
                    let dist = FisherSnedecor::new(df1, df2)
                        .map_err(|e| Error::config(format!("F distribution: {e}")))?;
                    Critical::TwoSidedVarF(
                        dist.inverse_cdf(s.alpha / 2.0),
                        dist.inverse_cdf(1.0 - s.alpha / 2.0),
                    )
                }
                _ => Critical::None,
            })
        })
        .collect()
}

fn angle_2d(direction: &[f64]) -> f64 {
    direction[1].atan2(direction[0]).rem_euclid(2.0 * std::f64::consts::PI)
}

#[allow(clippy::too_many_arguments)]
fn run_replicate(
    s: &Scenario,
    sid: u64,
    rep: usize,
    stat: &dyn Statistic,
    grids: &[Option<Grid>],
    criticals: &[Critical],
    b_max: usize,
    needs_abs: bool,
) -> Result<ReplicateOutcome> {
    // Redraw the dataset until the observed statistic and all permutations
    // are non-degenerate (continuous laws essentially never need this, but
    // the counter is reported either way).
    let mut replaced = 0;
    let (sample, ensemble) = loop {
        let attempt = replaced as u64;
        let mut rng = substream(s.seed, &[DOMAIN_SIM_DATA, sid, rep as u64, attempt]);
        let sample = draw_sample(s, &mut rng)?;
        if b_max == 0 {
            break (sample, None);
        }
        let ens_seed = mix(&[s.seed, DOMAIN_SIM_ENSEMBLE, sid, rep as u64, attempt]);
        match permute_ensemble(&sample, stat, b_max, ens_seed) {
            Ok(e) => break (sample, Some(e)),
            Err(Error::Degenerate(msg)) => {
                replaced += 1;
                if replaced > 100 {
                    return Err(Error::degenerate(format!(
                        "replicate {rep} stayed degenerate after 100 redraws: {msg}"
                    )));
                }
            }
            Err(e) => return Err(e),
        }
    };
    let absolutized = if needs_abs { ensemble.as_ref().map(|e| e.absolutized()) } else { None };

    let mut outcome = ReplicateOutcome {
        rejected: Vec::with_capacity(s.methods.len()),
        directions: Vec::with_capacity(s.methods.len()),
        replaced,
    };
    for (mi, method) in s.methods.iter().enumerate() {
        let mut direction = None;
        let rejected = match (method, &criticals[mi]) {
            (MethodSpec::FTest, Critical::UpperF(q)) => anova_f(&sample)? > *q,
            (MethodSpec::TTest, Critical::TwoSidedT(q)) => {
                two_sample_t(&sample.group_values(1), &sample.group_values(2))?.abs() > *q
            }
            (MethodSpec::VarFTest, Critical::TwoSidedVarF(lo, hi)) => {
                let log_ratio =
                    mean_var_vector(&sample.group_values(1), &sample.group_values(2))?.values()[1];
                let ratio = log_ratio.exp();
                ratio < *lo || ratio > *hi
            }
            (MethodSpec::Combine(f, b), _) => {
                let ens = ensemble.as_ref().expect("permutation methods imply b_max > 0");
                let result = combine_test(&head_of(ens, *b)?, *f);
                decide(&result, s.alpha)? == Decision::Reject
            }
            (transport_method, _) => {
                let grid = grids[mi].as_ref().expect("transport methods carry a grid");
                let tie_seed = mix(&[s.seed, DOMAIN_TIES, sid, rep as u64, mi as u64]);
                let result = match transport_method {
                    MethodSpec::TransportStat(g) => {
                        let ens = ensemble.as_ref().expect("ensemble present");
                        transport_statistic_test(&head_of(ens, g.b)?, grid, tie_seed)?
                    }
                    MethodSpec::TransportStatAbs(g) => {
                        let ens = absolutized.as_ref().expect("absolutized ensemble present");
                        transport_statistic_test(&head_of(ens, g.b)?, grid, tie_seed)?
                    }
                    MethodSpec::TransportPValue(g) => {
                        let ens = ensemble.as_ref().expect("ensemble present");
                        transport_pvalue_test(&head_of(ens, g.b)?, grid, tie_seed)?
                    }
                    _ => unreachable!("classical methods handled above"),
                };
                let rejected = decide(&result, s.alpha)? == Decision::Reject;
                if rejected {
                    direction = result.direction().map(<[f64]>::to_vec);
                }
                rejected
            }
        };
        outcome.rejected.push(rejected);
        outcome.directions.push(direction);
    }
    Ok(outcome)
}

fn head_of(
    ens: &crate::stats::PermutationEnsemble,
    b: usize,
) -> Result<crate::stats::PermutationEnsemble> {
    if b == ens.b() {
        Ok(ens.clone())
    } else {
        ens.head(b)
    }
}

/// Run every replicate of a scenario and tally rejection rates.
///
/// The direction summary (contributions, angle) uses rejecting replicates
/// only.
/// The same `(scenario, seed)` pair yields a bit-identical report in both
/// execution modes.
///
/// # Errors
///
/// Configuration errors from [`Scenario::validate`] or grid construction;
/// [`Error::Degenerate`] if some replicate cannot produce a non-degenerate
/// statistic in 100 redraws.
pub fn run_scenario(s: &Scenario, mode: ExecMode) -> Result<PowerReport> {
    s.validate()?;
    let sid = mix_str(&s.name);
    let stat = s.statistic.instantiate(s.k());
    let grids: Vec<Option<Grid>> = s
        .methods
        .iter()
        .map(|m| m.grid_spec().map(build_grid).transpose())
        .collect::<Result<_>>()?;
    let criticals = critical_values(s)?;
    let b_max = s.methods.iter().map(MethodSpec::b).max().unwrap_or(0);
    let needs_abs = s.methods.iter().any(|m| matches!(m, MethodSpec::TransportStatAbs(_)));

    let run_one = |rep: usize| {
        run_replicate(s, sid, rep, stat.as_ref(), &grids, &criticals, b_max, needs_abs)
    };
    let outcomes: Vec<ReplicateOutcome> = match mode {
        ExecMode::Sequential => (0..s.replications).map(run_one).collect::<Result<_>>()?,
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..s.replications).into_par_iter().map(run_one).collect::<Result<_>>()?
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..s.replications).map(run_one).collect::<Result<_>>()?
            }
        }
    };

    let r = s.replications as f64;
    let d = s.statistic.dim(s.k());
    let mut methods = Vec::with_capacity(s.methods.len());
    for (mi, method) in s.methods.iter().enumerate() {
        let rejections = outcomes.iter().filter(|o| o.rejected[mi]).count();
        let rate = rejections as f64 / r;
        // The summary direction is the normalized mean of the rejecting
        // replicates' directions; the reported contributions are its squared
        // components and the reported angle its (circular-mean) angle.
        // Averaging the per-replicate contributions instead would bias the
        // dominant coordinate's share downward whenever directions jitter
        // around an axis, because x^2 is convex.
        let mut dir_sum = vec![0.0; d];
        let mut dir_count = 0usize;
        for o in &outcomes {
            if let Some(v) = &o.directions[mi] {
                for (acc, x) in dir_sum.iter_mut().zip(v) {
                    *acc += x;
                }
                dir_count += 1;
            }
        }
        let norm = dir_sum.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (mean_contributions, mean_angle) = if dir_count > 0 && norm > 0.0 {
            let unit: Vec<f64> = dir_sum.iter().map(|x| x / norm).collect();
            let angle = (d == 2).then(|| angle_2d(&unit));
            (Some(unit.iter().map(|x| x * x).collect()), angle)
        } else {
            (None, None)
        };
        methods.push(MethodReport {
            method: method.id(),
            rejections,
            rate,
            se: (rate * (1.0 - rate) / r).sqrt(),
            mean_contributions,
            mean_angle,
        });
    }
    Ok(PowerReport {
        scenario: s.name.clone(),
        alpha: s.alpha,
        replications: s.replications,
        degenerate_draws: outcomes.iter().map(|o| o.replaced).sum(),
        methods,
    })
}

// ── built-in scenario catalog ────────────────────────────────────────────

fn d2_transport_methods() -> Vec<MethodSpec> {
    let t_p = GridSpec::product(2, 20, 50, 0, GridOrthant::Full, LowDiscSource::Builtin)
        .expect("two-sided product grid");
    let t_n = GridSpec::nonproduct(2, 986, GridOrthant::Full, LowDiscSource::Builtin)
        .expect("two-sided non-product grid");
    let plus_p = GridSpec::product(2, 40, 25, 0, GridOrthant::Positive, LowDiscSource::Builtin)
        .expect("one-sided product grid");
    let plus_n = GridSpec::nonproduct(2, 986, GridOrthant::Positive, LowDiscSource::Builtin)
        .expect("one-sided non-product grid");
    vec![
        MethodSpec::TransportStat(t_p),
        MethodSpec::TransportStat(t_n),
        MethodSpec::TransportStatAbs(plus_p.clone()),
        MethodSpec::TransportStatAbs(plus_n.clone()),
        MethodSpec::TransportPValue(plus_p),
        MethodSpec::TransportPValue(plus_n),
    ]
}

fn d3_transport_methods() -> Vec<MethodSpec> {
    // No generating vector of the right size is published for the product
    // splits in d = 3, so their direction sets come from the Halton source;
    // the non-product grids use the built-in size-1010 lattice.
    let t_p = GridSpec::product(3, 20, 50, 0, GridOrthant::Full, LowDiscSource::Halton)
        .expect("two-sided product grid");
    let t_n = GridSpec::nonproduct(3, 1009, GridOrthant::Full, LowDiscSource::Builtin)
        .expect("two-sided non-product grid");
    let plus_p = GridSpec::product(3, 40, 25, 0, GridOrthant::Positive, LowDiscSource::Halton)
        .expect("one-sided product grid");
    let plus_n = GridSpec::nonproduct(3, 1009, GridOrthant::Positive, LowDiscSource::Builtin)
        .expect("one-sided non-product grid");
    vec![
        MethodSpec::TransportStat(t_p),
        MethodSpec::TransportStat(t_n),
        MethodSpec::TransportStatAbs(plus_p.clone()),
        MethodSpec::TransportStatAbs(plus_n.clone()),
        MethodSpec::TransportPValue(plus_p),
        MethodSpec::TransportPValue(plus_n),
    ]
}

fn combining_methods(b: usize) -> Vec<MethodSpec> {
    vec![
        MethodSpec::Combine(CombiningFunction::Tippett, b),
        MethodSpec::Combine(CombiningFunction::Fisher, b),
        MethodSpec::Combine(CombiningFunction::Liptak, b),
    ]
}

fn three_sample_scenario(prefix: &str, setup: &str, n: usize, sigma3: f64) -> Scenario {
    let delta = setup.chars().last().and_then(|c| c.to_digit(10)).unwrap_or(0) as f64;
    let means = match setup.chars().next() {
        Some('A') => vec![0.0, 0.0, delta],
        Some('B') => vec![0.0, delta / 2.0, -delta / 2.0],
        _ => vec![0.0, 0.0, 0.0],
    };
    let name = format!("{prefix}{setup}-n{n}");
    let mut methods = vec![MethodSpec::FTest];
    methods.extend(combining_methods(999));
    methods.extend(d2_transport_methods());
    Scenario {
        seed: mix_str(&name),
        name,
        group_sizes: vec![n; 3],
        means,
        scales: vec![1.0, 1.0, sigma3],
        law: ErrorLaw::Normal,
        statistic: StatisticKind::PairwiseVsFirst,
        methods,
        replications: 500,
        alpha: 0.05,
    }
}

fn fmt_mu(mu: &[f64]) -> String {
    let parts: Vec<String> = mu.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

fn four_sample_scenario(mu: [f64; 4], law: ErrorLaw) -> Scenario {
    let name = format!("T4-{}-{}", fmt_mu(&mu), law.label());
    let mut methods = vec![MethodSpec::FTest];
    methods.extend(combining_methods(999));
    methods.extend(d3_transport_methods());
    Scenario {
        seed: mix_str(&name),
        name,
        group_sizes: vec![5; 4],
        means: mu.to_vec(),
        scales: vec![2.0; 4],
        law,
        statistic: StatisticKind::Helmert,
        methods,
        replications: 500,
        alpha: 0.05,
    }
}

fn two_sample_scenario(mu2: f64, sigma2: f64, law: ErrorLaw) -> Scenario {
    let name = format!("T5-mu{mu2}-sigma{sigma2}-{}", law.label());
    let mut methods = vec![MethodSpec::TTest, MethodSpec::VarFTest];
    methods.extend(combining_methods(999));
    methods.extend(d2_transport_methods());
    Scenario {
        seed: mix_str(&name),
        name,
        group_sizes: vec![10; 2],
        means: vec![0.0, mu2],
        scales: vec![2.0, sigma2],
        law,
        statistic: StatisticKind::MeanLogVar,
        methods,
        replications: 500,
        alpha: 0.05,
    }
}

/// The full study catalog at desk scale (R = 500, alpha = 0.05):
///
/// * three normal homoskedastic samples (`H0`/`A1`/`A2`/`B1`/`B2` crossed
///   with n = 5, 10),
/// * the same designs with `sigma_3 = 4` (prefix `T3-`),
/// * four samples under Helmert contrasts, six mean vectors, normal and
///   skewed errors of variance 4 (prefix `T4-`),
/// * two-sample mean/variance comparisons (prefix `T5-`).
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut catalog = Vec::new();
    for n in [5, 10] {
        for setup in ["H0", "A1", "A2", "B1", "B2"] {
            catalog.push(three_sample_scenario("", setup, n, 1.0));
        }
    }
    for n in [5, 10] {
        for setup in ["H0", "A1", "A2", "B1", "B2"] {
            catalog.push(three_sample_scenario("T3-", setup, n, 4.0));
        }
    }
    let mu_rows: [[f64; 4]; 6] = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 3.0, 1.0],
        [0.0, 0.5, 2.0, 1.0],
        [0.0, 1.0, 2.0, 3.0],
        [0.0, 2.0, -1.0, 3.0],
        [1.0, 3.0, 0.0, 2.0],
    ];
    for law in [ErrorLaw::Normal, ErrorLaw::StandardizedChi2] {
        for mu in mu_rows {
            catalog.push(four_sample_scenario(mu, law));
        }
    }
    for law in [ErrorLaw::Normal, ErrorLaw::StandardizedChi2] {
        for mu2 in [0.0, 2.0] {
            for sigma2 in [2.0, 4.0] {
                catalog.push(two_sample_scenario(mu2, sigma2, law));
            }
        }
    }
    catalog
}

/// Catalog lookup; accepts the optional `T1-` prefix for the unprefixed
/// homoskedastic scenarios.
pub fn find_scenario(name: &str) -> Option<Scenario> {
    let catalog = builtin_scenarios();
    let canonical = name.strip_prefix("T1-").unwrap_or(name);
    catalog.into_iter().find(|s| s.name == canonical)
}

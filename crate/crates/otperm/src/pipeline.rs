//! End-to-end tests: transport of statistic vectors, transport of
//! complemented partial p-values, and nonparametric combination.
//!
//! All three consume a [`PermutationEnsemble`] and produce a [`TestResult`]
//! with a global p-value `p_e`; the transport algorithms additionally
//! report the approximate p-value `p_a = 1 - ||F(T_0)||`, the direction of
//! the transported observed row, and the per-coordinate contributions to
//! its squared norm.

use crate::error::{Error, Result};
use crate::grids::{Grid, GridOrthant};
use crate::matrix::Matrix;
use crate::stats::{
    combine, partial_pvalues, CombiningFunction, PartialPValueMatrix, PermutationEnsemble,
    Sidedness,
};
use crate::transport::co_transport;
use serde::Serialize;

/// Which pipeline produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Transport the statistic vectors themselves.
    TransportStat,
    /// Transport the complemented partial p-values.
    TransportPValue,
    /// Combine partial p-values into a scalar and count exceedances.
    Combining(CombiningFunction),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::TransportStat => "transport-stat".to_string(),
            Method::TransportPValue => "transport-pvalue".to_string(),
            Method::Combining(f) => format!("combining({})", f.name()),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

/// Seeds that influenced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedBundle {
    /// Seed of the permutation ensemble.
    pub ensemble: u64,
    /// Seed for transport tie randomization (absent for combining runs).
    pub tie: Option<u64>,
}

/// Accept/reject outcome at a given level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    Retain,
}

/// Complements of the partial p-values, `q_{b,j} = 1 - p_{b,j}`; the rows
/// the p-value transport moves onto the grid. Entries lie in
/// `[0, 1 - 1/(B+1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementMatrix {
    q: Matrix,
}

impl ComplementMatrix {
    pub fn from_partial(p: &PartialPValueMatrix) -> Self {
        let mut q = Matrix::zeros(p.b() + 1, p.dim());
        for i in 0..=p.b() {
            for j in 0..p.dim() {
                q.set(i, j, 1.0 - p.p().get(i, j));
            }
        }
        ComplementMatrix { q }
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn b(&self) -> usize {
        self.q.n_rows() - 1
    }

    pub fn dim(&self) -> usize {
        self.q.n_cols()
    }
}

/// The outcome of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    method: Method,
    grid_spec: Option<crate::grids::GridSpec>,
    b: usize,
    p_e: f64,
    p_a: Option<f64>,
    direction: Option<Vec<f64>>,
    contributions: Option<Vec<f64>>,
    nonconformity: Option<f64>,
    at_center: bool,
    seeds: SeedBundle,
}

impl TestResult {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn grid_spec(&self) -> Option<&crate::grids::GridSpec> {
        self.grid_spec.as_ref()
    }

    /// Number of permutations behind the p-values.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Global permutation p-value (`p_e`, `p~_e`, or the combined `p_0`).
    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    /// Approximate p-value `1 - ||F(T_0)||` (transport methods only).
    pub fn p_a(&self) -> Option<f64> {
        self.p_a
    }

    /// Unit direction of the transported observed row; `None` for combining
    /// runs or when the row landed on the origin (see [`Self::at_center`]).
    pub fn direction(&self) -> Option<&[f64]> {
        self.direction.as_deref()
    }

    /// Squared direction components: each coordinate's share of the
    /// nonconformity score. Sum to 1.
    pub fn contributions(&self) -> Option<&[f64]> {
        self.contributions.as_deref()
    }

    /// `(1 - p_a)^2`, the squared norm of the transported observed row.
    pub fn nonconformity(&self) -> Option<f64> {
        self.nonconformity
    }

    /// True when the observed row was transported to the origin, which
    /// carries no directional information.
    pub fn at_center(&self) -> bool {
        self.at_center
    }

    pub fn seeds(&self) -> SeedBundle {
        self.seeds
    }

    /// JSON document with the stable field set: `method`, `grid`, `B`,
    /// `p_e`, `p_a`, `direction`, `contributions`, `nonconformity`,
    /// `decision`, `alpha`, `seeds`. Fields that do not apply are `null`.
    pub fn to_json(&self, alpha: f64) -> Result<serde_json::Value> {
        let decision = decide(self, alpha)?;
        Ok(serde_json::json!({
            "method": self.method,
            "grid": self.grid_spec,
            "B": self.b,
            "p_e": self.p_e,
            "p_a": self.p_a,
            "direction": self.direction,
            "contributions": self.contributions,
            "nonconformity": self.nonconformity,
            "decision": decision,
            "alpha": alpha,
            "seeds": self.seeds,
        }))
    }
}

/// Reject when `p_e <= alpha`.
///
/// # Errors
///
/// [`Error::InvalidConfig`] unless `alpha` lies in (0, 1).
pub fn decide(result: &TestResult, alpha: f64) -> Result<Decision> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(if result.p_e <= alpha { Decision::Reject } else { Decision::Retain })
}

/// Check that a grid's orthant matches the ensemble's sidedness pattern:
/// full needs all-two-sided, positive all-one-sided, mixed(J) two-sided
/// exactly on J.
fn check_compatibility(ensemble: &PermutationEnsemble, grid: &Grid) -> Result<()> {
    if ensemble.dim() != grid.d() {
        return Err(Error::input(format!(
            "ensemble dimension {} does not match grid dimension {}",
            ensemble.dim(),
            grid.d()
        )));
    }
    if ensemble.b() != grid.spec().b {
        return Err(Error::input(format!(
            "ensemble has B = {} but the grid was built for B = {}",
            ensemble.b(),
            grid.spec().b
        )));
    }
    let ok = match &grid.spec().orthant {
        GridOrthant::Full => ensemble.sidedness().iter().all(|s| *s == Sidedness::TwoSided),
        GridOrthant::Positive => {
            ensemble.sidedness().iter().all(|s| *s == Sidedness::OneSidedUpper)
        }
        GridOrthant::Mixed(signed) => ensemble
            .sidedness()
            .iter()
            .enumerate()
            .all(|(j, s)| (*s == Sidedness::TwoSided) == signed.contains(&j)),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::input(
            "grid orthant does not match statistic sidedness \
             (one-sided pipelines on two-sided statistics need `absolutized()`)"
                .to_string(),
        ))
    }
}

fn transport_result(
    method: Method,
    rows: &Matrix,
    grid: &Grid,
    ensemble_seed: u64,
    tie_seed: u64,
) -> Result<TestResult> {
    let plan = co_transport(rows, grid, tie_seed)?;
    let b = rows.n_rows() - 1;
    let norm0 = plan.norms()[0];
    let exceed = (1..=b).filter(|&i| plan.norms()[i] >= norm0).count();
    let p_e = (1 + exceed) as f64 / (b + 1) as f64;
    let p_a = 1.0 - norm0;
    let at_center = norm0 == 0.0;
    let (direction, contributions) = if at_center {
        (None, None)
    } else {
        let image = plan.images().row(0);
        let euclid = image.iter().map(|v| v * v).sum::<f64>().sqrt();
        let direction: Vec<f64> = image.iter().map(|v| v / euclid).collect();
        let contributions: Vec<f64> = direction.iter().map(|v| v * v).collect();
        (Some(direction), Some(contributions))
    };
    Ok(TestResult {
        method,
        grid_spec: Some(grid.spec().clone()),
        b,
        p_e,
        p_a: Some(p_a),
        direction,
        contributions,
        nonconformity: Some(norm0 * norm0),
        at_center,
        seeds: SeedBundle { ensemble: ensemble_seed, tie: Some(tie_seed) },
    })
}

/// Transport the statistic vectors onto the grid and test.
///
/// `p_e` is the share of permutation rows transported at least as far from
/// the origin as the observed row, `(1 + #{b >= 1 : ||F(T_b)|| >=
/// ||F(T_0)||}) / (B + 1)`; `p_a = 1 - ||F(T_0)||`.
///
/// # Errors
///
/// [`Error::InvalidInput`] when ensemble and grid disagree in dimension,
/// size, or sidedness/orthant.
pub fn transport_statistic_test(
    ensemble: &PermutationEnsemble,
    grid: &Grid,
    tie_seed: u64,
) -> Result<TestResult> {
    check_compatibility(ensemble, grid)?;
    transport_result(Method::TransportStat, ensemble.rows(), grid, ensemble.seed(), tie_seed)
}

/// Transport the complemented partial p-values onto a positive-orthant
/// grid and test.
///
/// # Errors
///
/// [`Error::InvalidInput`] unless the grid is positive-orthant and matches
/// the ensemble's size and dimension.
pub fn transport_pvalue_test(
    ensemble: &PermutationEnsemble,
    grid: &Grid,
    tie_seed: u64,
) -> Result<TestResult> {
    if grid.spec().orthant != GridOrthant::Positive {
        return Err(Error::input(
            "complemented partial p-values live in the positive orthant; use a positive grid"
                .to_string(),
        ));
    }
    if ensemble.dim() != grid.d() || ensemble.b() != grid.spec().b {
        return Err(Error::input(format!(
            "ensemble ({} x {}) does not fit the grid ({} points, d = {})",
            ensemble.b() + 1,
            ensemble.dim(),
            grid.len(),
            grid.d()
        )));
    }
    let q = ComplementMatrix::from_partial(&partial_pvalues(ensemble));
    transport_result(Method::TransportPValue, q.q(), grid, ensemble.seed(), tie_seed)
}

/// Combine partial p-values into a single scalar per permutation, then
/// count exceedances of the observed combination.
pub fn combine_test(ensemble: &PermutationEnsemble, f: CombiningFunction) -> TestResult {
    let p0 = combine(&partial_pvalues(ensemble), f);
    TestResult {
        method: Method::Combining(f),
        grid_spec: None,
        b: ensemble.b(),
        p_e: p0,
        p_a: None,
        direction: None,
        contributions: None,
        nonconformity: None,
        at_center: false,
        seeds: SeedBundle { ensemble: ensemble.seed(), tie: None },
    }
}

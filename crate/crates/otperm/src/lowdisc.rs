//! Low-discrepancy point sets in the unit cube and maps onto the unit
//! sphere.
//!
//! Two constructions are provided: good-lattice-point (GLP) sets from a
//! generating vector, and Halton sequences in the first `d` prime bases.
//! Points in the cube are pushed onto the sphere `S^{d-1}` by dimension
//! specific maps; the positive-orthant variants cover the quarter circle
//! (d = 2) exactly and fold higher-dimensional maps coordinatewise.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use statrs::distribution::{ContinuousCDF, Normal};

/// First 20 primes, the supported Halton bases.
const HALTON_PRIMES: [u64; 20] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Built-in generating vectors `(n, h)` taken from published GLP tables.
///
/// Note `(1010, (1, 140, 237))` does not satisfy the coprimality rule that
/// user-supplied vectors must pass (`gcd(140, 1010) = 10`); it is admitted
/// verbatim because the first component `h_1 = 1` already makes the lattice
/// points distinct.
const BUILTIN_VECTORS: [(u64, &[u64]); 4] =
    [(55, &[1, 34]), (144, &[1, 89]), (987, &[1, 610]), (1010, &[1, 140, 237])];

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ── generating vectors ──────────────────────────────────────────────────

/// A validated generating vector for a good-lattice-point set.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GeneratingVector {
    n: u64,
    h: Vec<u64>,
}

impl GeneratingVector {
    /// Validate a user-supplied vector: components must be distinct integers
    /// in `1..n`, each coprime with `n`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidConfig`] when any component is out of range, repeated,
    /// or shares a factor with `n`.
    pub fn new(n: u64, h: Vec<u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(format!("lattice size n={n} must be at least 2")));
        }
        if h.is_empty() {
            return Err(Error::config("generating vector must have at least one component"));
        }
        for &hj in &h {
            if hj == 0 || hj >= n {
                return Err(Error::config(format!(
                    "generating vector component {hj} out of range 1..{n}"
                )));
            }
            if gcd(hj, n) != 1 {
                return Err(Error::config(format!(
                    "generating vector component {hj} shares a factor with n={n}"
                )));
            }
        }
        for i in 0..h.len() {
            for j in i + 1..h.len() {
                if h[i] == h[j] {
                    return Err(Error::config(format!(
                        "generating vector components must be distinct (found {} twice)",
                        h[i]
                    )));
                }
            }
        }
        Ok(GeneratingVector { n, h })
    }

    /// Look up the built-in vector for `n` points in `d` columns, if any.
    pub fn builtin(n: u64, d: usize) -> Option<Self> {
        BUILTIN_VECTORS
            .iter()
            .find(|(bn, bh)| *bn == n && bh.len() == d)
            .map(|(bn, bh)| GeneratingVector { n: *bn, h: bh.to_vec() })
    }

    /// All built-in `(n, d)` combinations, for catalog listings.
    pub fn builtin_catalog() -> Vec<(u64, usize)> {
        BUILTIN_VECTORS.iter().map(|(n, h)| (*n, h.len())).collect()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn components(&self) -> &[u64] {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }
}

// ── cube point sets ─────────────────────────────────────────────────────

/// A point set in the open unit cube `(0,1)^d` (rows are points).
#[derive(Debug, Clone, PartialEq)]
pub struct CubePointSet {
    points: Matrix,
}

impl CubePointSet {
    pub(crate) fn from_matrix(points: Matrix) -> Self {
        CubePointSet { points }
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.points.n_cols()
    }
}

/// Centered good-lattice-point set: `x_{k,j} = ((2k-1) h_j mod 2n) / (2n)`
/// for `k = 1..=n`.
pub fn glp_set(gv: &GeneratingVector) -> CubePointSet {
    let n = gv.n;
    let d = gv.dim();
    let mut points = Matrix::zeros(n as usize, d);
    for k in 1..=n {
        let row = points.row_mut((k - 1) as usize);
        for (j, &hj) in gv.h.iter().enumerate() {
            let num = ((2 * k - 1) * hj) % (2 * n);
            row[j] = num as f64 / (2 * n) as f64;
        }
    }
    CubePointSet { points }
}

/// The one-dimensional centered set `{(2k-1)/(2n), k = 1..=n}`.
pub fn regular_centered(n: usize) -> CubePointSet {
    let mut points = Matrix::zeros(n, 1);
    for k in 1..=n {
        points.set(k - 1, 0, (2 * k - 1) as f64 / (2 * n) as f64);
    }
    CubePointSet { points }
}

/// Halton sequence in the first `d` prime bases, indices `1..=n`.
///
/// # Errors
///
/// [`Error::InvalidConfig`] when `n = 0` or `d` exceeds the 20 supported
/// bases.
pub fn halton_set(n: usize, d: usize) -> Result<CubePointSet> {
    if n == 0 {
        return Err(Error::config("Halton set must have at least one point"));
    }
    if d == 0 || d > HALTON_PRIMES.len() {
        return Err(Error::config(format!(
            "Halton dimension {d} outside supported range 1..={}",
            HALTON_PRIMES.len()
        )));
    }
    let mut points = Matrix::zeros(n, d);
    for k in 1..=n {
        let row = points.row_mut(k - 1);
        for (j, &base) in HALTON_PRIMES[..d].iter().enumerate() {
            row[j] = radical_inverse(k as u64, base);
        }
    }
    Ok(CubePointSet { points })
}

/// Van der Corput radical inverse of `k` in the given base.
fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut value = 0.0;
    while k > 0 {
        value += (k % base) as f64 * inv;
        k /= base;
        inv /= b;
    }
    value
}

// ── sphere maps ─────────────────────────────────────────────────────────

/// Which part of the sphere a direction set should cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereOrthant {
    Full,
    Positive,
}

/// A set of unit vectors in `R^d` (rows are directions).
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePointSet {
    points: Matrix,
    orthant: SphereOrthant,
}

impl SpherePointSet {
    pub(crate) fn from_parts(points: Matrix, orthant: SphereOrthant) -> Self {
        SpherePointSet { points, orthant }
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.points.n_cols()
    }

    pub fn orthant(&self) -> SphereOrthant {
        self.orthant
    }

    /// Fold every coordinate *not* listed in `signed` to its absolute value.
    /// Used for mixed one-/two-sided direction sets; `signed` holds the
    /// 0-based coordinates that keep their sign.
    pub fn fold_except(&self, signed: &[usize]) -> SpherePointSet {
        let mut points = self.points.clone();
        for i in 0..points.n_rows() {
            let row = points.row_mut(i);
            for (j, value) in row.iter_mut().enumerate() {
                if !signed.contains(&j) {
                    *value = value.abs();
                }
            }
        }
        let orthant = if signed.is_empty() { SphereOrthant::Positive } else { self.orthant };
        SpherePointSet { points, orthant }
    }
}

/// Number of cube columns the `d`-dimensional sphere map consumes.
///
/// The circle and the 2-sphere have explicit area-preserving maps from 1 and
/// 2 coordinates; for `d >= 4` the map sends `d` coordinates through the
/// standard-normal quantile and normalizes.
pub fn sphere_map_columns(d: usize) -> usize {
    match d {
        2 => 1,
        3 => 2,
        _ => d,
    }
}

/// Map a cube point set onto the unit sphere `S^{d-1}`.
///
/// - `d = 2`, full: `x -> (cos 2*pi*x, sin 2*pi*x)`;
/// - `d = 2`, positive: `x -> (cos(pi*x/2), sin(pi*x/2))`;
/// - `d = 3`, full: `(x1, x2) -> (1 - 2*x1, 2*sqrt(x1(1-x1)) cos 2*pi*x2,
///   2*sqrt(x1(1-x1)) sin 2*pi*x2)`;
/// - `d >= 4`, full: componentwise standard-normal quantile, then normalize;
/// - `d >= 3`, positive: the full map followed by coordinatewise `abs`.
///
/// # Errors
///
/// [`Error::InvalidConfig`] when `d < 2` or the cube set does not have
/// [`sphere_map_columns`]`(d)` columns.
pub fn sphere_map(cube: &CubePointSet, d: usize, orthant: SphereOrthant) -> Result<SpherePointSet> {
    if d < 2 {
        return Err(Error::config(format!("sphere map needs dimension >= 2, got {d}")));
    }
    let need = sphere_map_columns(d);
    if cube.dim() != need {
        return Err(Error::config(format!(
            "sphere map for d={d} needs {need} cube columns, got {}",
            cube.dim()
        )));
    }
    let n = cube.n();
    let mut points = Matrix::zeros(n, d);
    match (d, orthant) {
        (2, SphereOrthant::Full) => {
            for i in 0..n {
                let angle = 2.0 * std::f64::consts::PI * cube.points.get(i, 0);
                points.set(i, 0, angle.cos());
                points.set(i, 1, angle.sin());
            }
        }
        (2, SphereOrthant::Positive) => {
            for i in 0..n {
                let angle = std::f64::consts::FRAC_PI_2 * cube.points.get(i, 0);
                points.set(i, 0, angle.cos());
                points.set(i, 1, angle.sin());
            }
        }
        (3, _) => {
            for i in 0..n {
                let x1 = cube.points.get(i, 0);
                let angle = 2.0 * std::f64::consts::PI * cube.points.get(i, 1);
                let r = 2.0 * (x1 * (1.0 - x1)).sqrt();
                points.set(i, 0, 1.0 - 2.0 * x1);
                points.set(i, 1, r * angle.cos());
                points.set(i, 2, r * angle.sin());
            }
        }
        (_, _) => {
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            for i in 0..n {
                let row = points.row_mut(i);
                for j in 0..d {
                    // Guard the open-interval assumption: lattice points can
                    // land exactly on 0, where the quantile is -inf.
                    let x = cube.points.get(i, j).clamp(f64::EPSILON, 1.0 - f64::EPSILON);
                    row[j] = normal.inverse_cdf(x);
                }
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    row.iter_mut().for_each(|v| *v /= norm);
                } else {
                    // All coordinates sat at the median; pick a fixed axis.
                    row.fill(0.0);
                    row[0] = 1.0;
                }
            }
        }
    }
    let mut set = SpherePointSet { points, orthant: SphereOrthant::Full };
    if orthant == SphereOrthant::Positive {
        if d >= 3 {
            set = set.fold_except(&[]);
        } else {
            set.orthant = SphereOrthant::Positive;
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn assert_rows_distinct(m: &Matrix) {
        let mut rows: Vec<Vec<u64>> =
            m.rows().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
        rows.sort();
        let before = rows.len();
        rows.dedup();
        assert_eq!(rows.len(), before, "point set contains duplicate rows");
    }

    #[test]
    fn glp_n4_is_centered_grid() {
        let gv = GeneratingVector::new(4, vec![1]).unwrap();
        let set = glp_set(&gv);
        let xs: Vec<f64> = set.points().rows().map(|r| r[0]).collect();
        assert_eq!(xs, vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn builtin_144_is_distinct_and_inside_cube() {
        let gv = GeneratingVector::builtin(144, 2).expect("builtin (144, 2)");
        assert_eq!(gv.components(), &[1, 89]);
        let set = glp_set(&gv);
        assert_eq!(set.n(), 144);
        assert_rows_distinct(set.points());
        for row in set.points().rows() {
            for &x in row {
                assert!((0.0..1.0).contains(&x), "x={x} outside [0,1)");
            }
        }
    }

    #[test]
    fn builtin_1010_has_distinct_rows_despite_shared_factor() {
        // gcd(140, 1010) = 10, so this table entry would fail user-side
        // validation; the first component being 1 keeps the rows distinct.
        let gv = GeneratingVector::builtin(1010, 3).expect("builtin (1010, 3)");
        let set = glp_set(&gv);
        assert_eq!(set.n(), 1010);
        assert_rows_distinct(set.points());
    }

    #[test]
    fn user_vectors_with_shared_factors_are_rejected() {
        let err = GeneratingVector::new(6, vec![1, 4]).unwrap_err();
        assert!(err.to_string().contains("shares a factor"), "got: {err}");
        assert!(GeneratingVector::new(6, vec![1, 1]).is_err());
        assert!(GeneratingVector::new(6, vec![1, 6]).is_err());
        assert!(GeneratingVector::new(6, vec![0]).is_err());
        assert!(GeneratingVector::new(987, vec![1, 610]).is_ok());
    }

    #[test]
    fn halton_prefixes_match_hand_computation() {
        let set = halton_set(4, 2).unwrap();
        let col0: Vec<f64> = set.points().rows().map(|r| r[0]).collect();
        assert_eq!(col0, vec![0.5, 0.25, 0.75, 0.125]);
        let base3: Vec<f64> = halton_set(3, 2).unwrap().points().rows().map(|r| r[1]).collect();
        assert_eq!(base3, vec![1.0 / 3.0, 2.0 / 3.0, 1.0 / 9.0]);
    }

    #[test]
    fn halton_1000x3_rows_are_distinct() {
        let set = halton_set(1000, 3).unwrap();
        assert_rows_distinct(set.points());
        assert!(set.points().as_slice().iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn halton_rejects_unsupported_dimensions() {
        assert!(halton_set(10, 21).is_err());
        assert!(halton_set(0, 2).is_err());
    }

    #[test]
    fn circle_map_hits_cardinal_points() {
        let cube = CubePointSet { points: Matrix::from_rows(&[vec![0.0], vec![0.25]]) };
        let s = sphere_map(&cube, 2, SphereOrthant::Full).unwrap();
        assert!((s.points().get(0, 0) - 1.0).abs() < 1e-15);
        assert!(s.points().get(0, 1).abs() < 1e-15);
        assert!(s.points().get(1, 0).abs() < 1e-15);
        assert!((s.points().get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_circle_map_endpoint() {
        let cube = CubePointSet { points: Matrix::from_rows(&[vec![1.0]]) };
        let s = sphere_map(&cube, 2, SphereOrthant::Positive).unwrap();
        assert!(s.points().get(0, 0).abs() < 1e-15);
        assert!((s.points().get(0, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_map_d3_equator_point() {
        let cube = CubePointSet { points: Matrix::from_rows(&[vec![0.5, 0.0]]) };
        let s = sphere_map(&cube, 3, SphereOrthant::Full).unwrap();
        assert!(s.points().get(0, 0).abs() < 1e-15);
        assert!((s.points().get(0, 1) - 1.0).abs() < 1e-15);
        assert!(s.points().get(0, 2).abs() < 1e-15);
    }

    #[test]
    fn centered_circle_map_covers_quadrants_evenly() {
        let s = sphere_map(&regular_centered(8), 2, SphereOrthant::Full).unwrap();
        let mut quadrants = [0usize; 4];
        for row in s.points().rows() {
            let q = match (row[0] > 0.0, row[1] > 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            quadrants[q] += 1;
        }
        assert_eq!(quadrants, [2, 2, 2, 2]);
    }

    #[test]
    fn positive_fold_makes_all_coordinates_nonnegative() {
        let cube = halton_set(55, 2).unwrap();
        let s = sphere_map(&cube, 3, SphereOrthant::Positive).unwrap();
        assert!(s.points().as_slice().iter().all(|&v| v >= 0.0));
        assert_eq!(s.orthant(), SphereOrthant::Positive);
    }

    #[test]
    fn mixed_fold_keeps_listed_coordinates_signed() {
        let cube = halton_set(40, 2).unwrap();
        let s = sphere_map(&cube, 3, SphereOrthant::Full).unwrap().fold_except(&[0]);
        assert!(s.points().rows().all(|r| r[1] >= 0.0 && r[2] >= 0.0));
        assert!(s.points().rows().any(|r| r[0] < 0.0));
    }

    #[test]
    fn unit_norm_across_dimensions() {
        for d in [2usize, 3, 4, 6] {
            let cube = halton_set(200, sphere_map_columns(d)).unwrap();
            let s = sphere_map(&cube, d, SphereOrthant::Full).unwrap();
            for row in s.points().rows() {
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12, "d={d} norm={norm}");
            }
        }
    }

    #[test]
    fn sphere_map_is_pure() {
        let cube = halton_set(64, 4).unwrap();
        let a = sphere_map(&cube, 4, SphereOrthant::Full).unwrap();
        let b = sphere_map(&cube, 4, SphereOrthant::Full).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn sphere_map_rejects_wrong_column_count() {
        let cube = halton_set(10, 2).unwrap();
        assert!(sphere_map(&cube, 2, SphereOrthant::Full).is_err());
        assert!(sphere_map(&cube, 4, SphereOrthant::Full).is_err());
        assert!(sphere_map(&cube, 1, SphereOrthant::Full).is_err());
    }

    /// Brute-force star-discrepancy estimate over axis-aligned boxes anchored
    /// at the origin, with corners on a coarse grid.
    fn star_discrepancy(points: &Matrix, resolution: usize) -> f64 {
        let d = points.n_cols();
        let n = points.n_rows() as f64;
        let mut corners = vec![0usize; d];
        let mut worst: f64 = 0.0;
        loop {
            let corner: Vec<f64> =
                corners.iter().map(|&c| (c + 1) as f64 / resolution as f64).collect();
            let volume: f64 = corner.iter().product();
            let count =
                points.rows().filter(|row| row.iter().zip(&corner).all(|(x, c)| x < c)).count()
                    as f64;
            worst = worst.max((count / n - volume).abs());
            let mut k = 0;
            loop {
                corners[k] += 1;
                if corners[k] < resolution {
                    break;
                }
                corners[k] = 0;
                k += 1;
                if k == d {
                    return worst;
                }
            }
        }
    }

    #[test]
    fn glp_1010_beats_random_points_on_star_discrepancy() {
        let gv = GeneratingVector::builtin(1010, 3).unwrap();
        let lattice = glp_set(&gv);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut random = Matrix::zeros(1010, 3);
        for i in 0..1010 {
            for j in 0..3 {
                random.set(i, j, rng.random::<f64>());
            }
        }
        let d_lattice = star_discrepancy(lattice.points(), 8);
        let d_random = star_discrepancy(&random, 8);
        assert!(
            d_lattice < d_random,
            "lattice discrepancy {d_lattice} not below random {d_random}"
        );
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn glp_rows_distinct_for_prime_sizes(idx in 0usize..8, h2 in 2u64..100) {
            let primes = [101u64, 103, 107, 109, 113, 127, 131, 137];
            let n = primes[idx];
            let h2 = 1 + (h2 % (n - 1));
            if h2 != 1 {
                let gv = GeneratingVector::new(n, vec![1, h2]).unwrap();
                assert_rows_distinct(glp_set(&gv).points());
            }
        }
    }
}

//! Regular grids in the unit ball onto which samples are transported.
//!
//! A *product* grid crosses `n_R` rings of radii `i/(n_R + 1)` with a set of
//! `n_S` unit directions, optionally adding `n_0` copies of the origin, for
//! `B + 1 = n_R * n_S + n_0` points in total. A *non-product* grid takes a
//! low-discrepancy set in the cube and uses its first column as radius and
//! the remaining columns as direction (through the sphere map), one grid
//! point per cube point.
//!
//! One-sided tests use positive-orthant variants; mixed grids keep the
//! coordinates in a chosen subset signed and fold the others by absolute
//! value.

use crate::error::{Error, Result};
use crate::lowdisc::{
    glp_set, halton_set, regular_centered, sphere_map, sphere_map_columns, CubePointSet,
    GeneratingVector, SphereOrthant, SpherePointSet,
};
use crate::matrix::Matrix;
use serde::Serialize;

/// Grid family: product of rings and directions, or one point per
/// low-discrepancy cube point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Product {
        #[serde(rename = "n_R")]
        n_r: usize,
        #[serde(rename = "n_S")]
        n_s: usize,
        #[serde(rename = "n_0")]
        n_0: usize,
    },
    NonProduct,
}

/// Which part of the ball the grid covers. `Mixed` lists the 0-based
/// coordinates that keep their sign; all others are folded to `abs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridOrthant {
    Full,
    Positive,
    Mixed(Vec<usize>),
}

/// Where low-discrepancy points come from when a grid needs them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowDiscSource {
    /// Look the generating vector up in the built-in table.
    Builtin,
    /// Use this generating vector.
    Glp(GeneratingVector),
    /// Halton sequence in the first prime bases.
    Halton,
}

/// Validated description of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub orthant: GridOrthant,
    pub d: usize,
    /// Number of permutations; the grid has `B + 1` points.
    #[serde(rename = "B")]
    pub b: usize,
    pub source: LowDiscSource,
}

impl GridSpec {
    /// Product grid with `B` derived as `n_R * n_S + n_0 - 1`.
    pub fn product(
        d: usize,
        n_r: usize,
        n_s: usize,
        n_0: usize,
        orthant: GridOrthant,
        source: LowDiscSource,
    ) -> Result<Self> {
        let spec = GridSpec {
            kind: GridKind::Product { n_r, n_s, n_0 },
            orthant,
            d,
            b: (n_r * n_s + n_0).saturating_sub(1),
            source,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Non-product grid with `B + 1` low-discrepancy points.
    pub fn nonproduct(
        d: usize,
        b: usize,
        orthant: GridOrthant,
        source: LowDiscSource,
    ) -> Result<Self> {
        let spec = GridSpec { kind: GridKind::NonProduct, orthant, d, b, source };
        spec.validate()?;
        Ok(spec)
    }

    /// Check all structural invariants.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidConfig`] describing the first violated rule.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::config("grid dimension must be at least 1"));
        }
        if let GridOrthant::Mixed(signed) = &self.orthant {
            let mut seen = vec![false; self.d];
            for &j in signed {
                if j >= self.d {
                    return Err(Error::config(format!(
                        "mixed orthant index {j} out of range for d={}",
                        self.d
                    )));
                }
                if seen[j] {
                    return Err(Error::config(format!("mixed orthant index {j} repeated")));
                }
                seen[j] = true;
            }
        }
        match &self.kind {
            GridKind::Product { n_r, n_s, n_0 } => {
                if *n_r == 0 || *n_s == 0 {
                    return Err(Error::config("product grid needs n_R >= 1 and n_S >= 1"));
                }
                if *n_0 > 1 {
                    return Err(Error::config(format!("n_0 must be 0 or 1, got {n_0}")));
                }
                if self.b + 1 != n_r * n_s + n_0 {
                    return Err(Error::config(format!(
                        "size mismatch: B + 1 = {} but n_R * n_S + n_0 = {}",
                        self.b + 1,
                        n_r * n_s + n_0
                    )));
                }
                if self.d == 1 {
                    let need = match self.orthant {
                        GridOrthant::Full => 2,
                        GridOrthant::Positive => 1,
                        GridOrthant::Mixed(_) => {
                            return Err(Error::config("mixed orthant is not defined for d = 1"))
                        }
                    };
                    if *n_s != need {
                        return Err(Error::config(format!(
                            "d = 1 grids need n_S = {need} (the sphere is {{-1, +1}}), got {n_s}"
                        )));
                    }
                }
            }
            GridKind::NonProduct => {
                if self.d < 2 {
                    return Err(Error::config("non-product grids need d >= 2"));
                }
                if self.b == 0 {
                    return Err(Error::config("non-product grid needs B >= 1"));
                }
                if let LowDiscSource::Glp(gv) = &self.source {
                    if gv.n() as usize != self.b + 1 {
                        return Err(Error::config(format!(
                            "generating vector has n = {} points but the grid needs B + 1 = {}",
                            gv.n(),
                            self.b + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of grid points, `B + 1`.
    pub fn len(&self) -> usize {
        self.b + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A realized grid: points, their exact norms, and the spec they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    points: Matrix,
    norms: Vec<f64>,
}

impl Grid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    /// Norm of each grid point, by construction (ring radii and radial
    /// coordinates are stored exactly, not recomputed from the points).
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.points.n_rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.n_rows() == 0
    }

    pub fn d(&self) -> usize {
        self.points.n_cols()
    }
}

/// Unit directions for a product grid.
///
/// - `d = 1`: `{+1}` (positive) or `{-1, +1}` (full);
/// - `d = 2`: the centered set `{(2j-1)/(2 n_S)}` through the circle map
///   (full) or the quarter-circle map (positive);
/// - `d >= 3`: `n_S` low-discrepancy cube points through the sphere map.
///
/// Mixed orthants take the full set and fold the unlisted coordinates.
///
/// # Errors
///
/// [`Error::InvalidConfig`] when the source cannot produce `n_S` points in
/// the required number of columns (for example, no built-in generating
/// vector of that size).
pub fn direction_set(
    d: usize,
    n_s: usize,
    orthant: &GridOrthant,
    source: &LowDiscSource,
) -> Result<SpherePointSet> {
    if d == 1 {
        let (points, need, sphere_orthant) = match orthant {
            GridOrthant::Full => {
                (Matrix::from_rows(&[vec![-1.0], vec![1.0]]), 2, SphereOrthant::Full)
            }
            GridOrthant::Positive => (Matrix::from_rows(&[vec![1.0]]), 1, SphereOrthant::Positive),
            GridOrthant::Mixed(_) => {
                return Err(Error::config("mixed orthant is not defined for d = 1"))
            }
        };
        if n_s != need {
            return Err(Error::config(format!("d = 1 direction set has {need} points, not {n_s}")));
        }
        return Ok(SpherePointSet::from_parts(points, sphere_orthant));
    }
    if n_s == 0 {
        return Err(Error::config("direction set must not be empty"));
    }
    if d == 2 {
        let cube = regular_centered(n_s);
        let sphere_orthant = match orthant {
            GridOrthant::Positive => SphereOrthant::Positive,
            _ => SphereOrthant::Full,
        };
        let set = sphere_map(&cube, 2, sphere_orthant)?;
        return Ok(match orthant {
            GridOrthant::Mixed(signed) => set.fold_except(signed),
            _ => set,
        });
    }
    let cols = sphere_map_columns(d);
    let cube = cube_points(source, n_s, cols)?;
    let set = match orthant {
        GridOrthant::Positive => sphere_map(&cube, d, SphereOrthant::Positive)?,
        GridOrthant::Full => sphere_map(&cube, d, SphereOrthant::Full)?,
        GridOrthant::Mixed(signed) => {
            sphere_map(&cube, d, SphereOrthant::Full)?.fold_except(signed)
        }
    };
    Ok(set)
}

fn cube_points(source: &LowDiscSource, n: usize, cols: usize) -> Result<CubePointSet> {
    match source {
        LowDiscSource::Builtin => match GeneratingVector::builtin(n as u64, cols) {
            Some(gv) => Ok(glp_set(&gv)),
            None => Err(Error::config(format!(
                "no built-in generating vector for {n} points in {cols} columns; \
                 supply one explicitly or use the Halton source"
            ))),
        },
        LowDiscSource::Glp(gv) => {
            if gv.n() as usize != n || gv.dim() != cols {
                return Err(Error::config(format!(
                    "generating vector yields {} points in {} columns, need {n} in {cols}",
                    gv.n(),
                    gv.dim()
                )));
            }
            Ok(glp_set(gv))
        }
        LowDiscSource::Halton => halton_set(n, cols),
    }
}

/// Realize a grid from its spec.
///
/// # Errors
///
/// Propagates spec validation and low-discrepancy construction errors.
pub fn build_grid(spec: &GridSpec) -> Result<Grid> {
    spec.validate()?;
    match spec.kind {
        GridKind::Product { n_r, n_s, n_0 } => {
            let directions = direction_set(spec.d, n_s, &spec.orthant, &spec.source)?;
            let mut points = Matrix::zeros(spec.len(), spec.d);
            let mut norms = Vec::with_capacity(spec.len());
            let mut row = 0;
            for i in 1..=n_r {
                let radius = i as f64 / (n_r + 1) as f64;
                for j in 0..n_s {
                    let direction = directions.points().row(j);
                    let out = points.row_mut(row);
                    for (o, &s) in out.iter_mut().zip(direction) {
                        *o = radius * s;
                    }
                    norms.push(radius);
                    row += 1;
                }
            }
            norms.extend(std::iter::repeat(0.0).take(n_0));
            row += n_0;
            debug_assert_eq!(row, spec.len());
            Ok(Grid { spec: spec.clone(), points, norms })
        }
        GridKind::NonProduct => {
            let cols = sphere_map_columns(spec.d);
            let cube = cube_points(&spec.source, spec.len(), 1 + cols)?;
            let mut radius = Vec::with_capacity(spec.len());
            let mut dir_rows = Vec::with_capacity(spec.len());
            for row in cube.points().rows() {
                radius.push(row[0]);
                dir_rows.push(row[1..].to_vec());
            }
            let dir_cube = CubePointSet::from_matrix(Matrix::from_rows(&dir_rows));
            let directions = match &spec.orthant {
                GridOrthant::Positive => sphere_map(&dir_cube, spec.d, SphereOrthant::Positive)?,
                GridOrthant::Full => sphere_map(&dir_cube, spec.d, SphereOrthant::Full)?,
                GridOrthant::Mixed(signed) => {
                    sphere_map(&dir_cube, spec.d, SphereOrthant::Full)?.fold_except(signed)
                }
            };
            let mut points = Matrix::zeros(spec.len(), spec.d);
            for i in 0..spec.len() {
                let direction = directions.points().row(i);
                let out = points.row_mut(i);
                for (o, &s) in out.iter_mut().zip(direction) {
                    *o = radius[i] * s;
                }
            }
            Ok(Grid { spec: spec.clone(), points, norms: radius })
        }
    }
}

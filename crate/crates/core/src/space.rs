//! Finite sampled metric spaces and compactification pairs.
//!
//! A `MetricSpace` is the desk-scale stand-in for a separable metric space:
//! finitely many named points with a validated distance matrix.  A
//! `CompactificationPair` designates an interior subset X of an ambient space
//! K together with disjoint boundary sets M_n covering K∖X, each carrying a
//! bump function φ_n with φ_n = 1 exactly on M_n and φ_n < 1 on the interior.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::func::BoundedFunction;

/// Absolute tolerance for the metric axioms (symmetry, triangle inequality).
pub const METRIC_TOL: f64 = 1e-12;

/// Relative gap forced between 1 and the largest off-boundary bump value when
/// rounding would otherwise let an interior point reach 1.
pub const BUMP_EPS_GAP: f64 = 1e-6;

/// One failed metric axiom, with the offending points.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NonFinite { i: usize, j: usize, value: f64 },
    NegativeEntry { i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    ZeroDistance { i: usize, j: usize },
    Asymmetry { i: usize, j: usize, d_ij: f64, d_ji: f64 },
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NonFinite { i, j, value } => {
                write!(f, "non-finite entry dist({i},{j}) = {value}")
            }
            MetricViolation::NegativeEntry { i, j, value } => {
                write!(f, "negative entry dist({i},{j}) = {value}")
            }
            MetricViolation::NonzeroDiagonal { i, value } => {
                write!(f, "nonzero diagonal dist({i},{i}) = {value}")
            }
            MetricViolation::ZeroDistance { i, j } => {
                write!(f, "distinct points {i},{j} at distance 0")
            }
            MetricViolation::Asymmetry { i, j, d_ij, d_ji } => {
                write!(f, "asymmetric pair ({i},{j}): {d_ij} vs {d_ji}")
            }
            MetricViolation::Triangle { i, j, k, excess } => {
                write!(
                    f,
                    "triangle violation ({i},{j},{k}): dist({i},{k}) exceeds the detour by {excess}"
                )
            }
        }
    }
}

/// Validate a raw square distance matrix against the metric axioms.
///
/// Returns the full list of violations (empty iff the matrix is a metric
/// within [`METRIC_TOL`]); a non-square matrix is a structural error.
pub fn validate_metric(dist: &[Vec<f64>]) -> Result<Vec<MetricViolation>> {
    let n = dist.len();
    for row in dist {
        if row.len() != n {
            return Err(Error::BadMatrixShape {
                rows: n,
                cols: row.len(),
                expected: n,
            });
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        if dist[i][i] != 0.0 {
            out.push(MetricViolation::NonzeroDiagonal {
                i,
                value: dist[i][i],
            });
        }
        for j in 0..n {
            let d = dist[i][j];
            if !d.is_finite() {
                out.push(MetricViolation::NonFinite { i, j, value: d });
            } else if d < 0.0 {
                out.push(MetricViolation::NegativeEntry { i, j, value: d });
            }
        }
    }
    if !out.is_empty() {
        // Entries are not even numbers we can compare; stop here.
        return Ok(out);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (dist[i][j] - dist[j][i]).abs() > METRIC_TOL {
                out.push(MetricViolation::Asymmetry {
                    i,
                    j,
                    d_ij: dist[i][j],
                    d_ji: dist[j][i],
                });
            }
            if dist[i][j] == 0.0 && dist[j][i] == 0.0 {
                out.push(MetricViolation::ZeroDistance { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let excess = dist[i][k] - (dist[i][j] + dist[j][k]);
                if excess > METRIC_TOL {
                    out.push(MetricViolation::Triangle { i, j, k, excess });
                }
            }
        }
    }
    Ok(out)
}

/// Finite point set with a validated distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    ids: Vec<String>,
    dist: Vec<f64>, // row-major n×n
    labels: Option<Vec<f64>>,
}

impl MetricSpace {
    /// Build a space, rejecting anything that is not a metric.
    pub fn new(
        ids: Vec<String>,
        dist: Vec<Vec<f64>>,
        labels: Option<Vec<f64>>,
    ) -> Result<Arc<Self>> {
        if ids.is_empty() {
            return Err(Error::param("points", "space must have at least one point"));
        }
        if dist.len() != ids.len() {
            return Err(Error::BadMatrixShape {
                rows: dist.len(),
                cols: dist.first().map_or(0, Vec::len),
                expected: ids.len(),
            });
        }
        {
            let mut sorted = ids.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != ids.len() {
                return Err(Error::param("points", "point identifiers must be unique"));
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != ids.len() {
                return Err(Error::LengthMismatch {
                    context: "labels",
                    expected: ids.len(),
                    got: ls.len(),
                });
            }
        }
        let violations = validate_metric(&dist)?;
        if !violations.is_empty() {
            return Err(Error::InvalidMetric(violations));
        }
        let n = ids.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &dist {
            flat.extend_from_slice(row);
        }
        Ok(Arc::new(MetricSpace {
            ids,
            dist: flat,
            labels,
        }))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.ids.len() + j]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|p| p == id)
    }

    /// Optional real coordinate attached by samplers (e.g. grid position).
    pub fn label(&self, i: usize) -> Option<f64> {
        self.labels.as_ref().map(|ls| ls[i])
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn dist_rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }

    /// Re-run the axiom checks; empty by construction, used by harnesses.
    pub fn validate(&self) -> Vec<MetricViolation> {
        validate_metric(&self.dist_rows()).expect("stored matrix is square")
    }
}

/// Equality of spaces for mismatch checks: pointer identity first, then
/// structural comparison (spaces loaded twice from the same file are "same").
pub fn same_space(a: &Arc<MetricSpace>, b: &Arc<MetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Minimum distance from `x` to a nonempty point subset.
pub fn dist_to_set(m: &MetricSpace, x: usize, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::param("set", "distance to the empty set is undefined"));
    }
    let mut best = f64::INFINITY;
    for &s in set {
        if s >= m.len() {
            return Err(Error::param("set", format!("point index {s} out of range")));
        }
        best = best.min(m.dist(x, s));
    }
    Ok(best)
}

/// Sup-distance between two trajectories on a common time grid.
pub fn sup_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            context: "trajectory grids",
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Build a space from explicit trajectories under the sup metric.
/// Duplicate trajectories make the construction fail metric validation.
pub fn space_from_paths(paths: &[Vec<f64>]) -> Result<Arc<MetricSpace>> {
    if paths.is_empty() {
        return Err(Error::param("paths", "need at least one path"));
    }
    let n = paths.len();
    let width = paths[0].len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        if paths[i].len() != width {
            return Err(Error::LengthMismatch {
                context: "path time grids",
                expected: width,
                got: paths[i].len(),
            });
        }
        for j in (i + 1)..n {
            let d = sup_distance(&paths[i], &paths[j])?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let ids = (0..n).map(|i| format!("path{i}")).collect();
    MetricSpace::new(ids, dist, None)
}

/// Sample a path-space: Gaussian random walks from a fixed seed, sup metric.
///
/// Exact duplicate trajectories (possible in principle, not in practice) are
/// perturbed by a seeded 1e-9 jitter so the result is always a genuine metric.
pub fn sample_paths(n_paths: usize, n_steps: usize, seed: u64) -> Result<Arc<MetricSpace>> {
    if n_paths < 1 {
        return Err(Error::param("n_paths", "need at least one path"));
    }
    if n_steps < 1 {
        return Err(Error::param("n_steps", "need at least one step"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut paths = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let mut x = 0.0;
        let mut path = Vec::with_capacity(n_steps + 1);
        path.push(x);
        for _ in 0..n_steps {
            let step: f64 = StandardNormal.sample(&mut rng);
            x += step;
            path.push(x);
        }
        paths.push(path);
    }
    dedup_paths(&mut paths, &mut rng);
    space_from_paths(&paths)
}

/// Jitter exact duplicates until all trajectories are distinct.
fn dedup_paths(paths: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    loop {
        let mut clash = None;
        'scan: for i in 0..paths.len() {
            for j in (i + 1)..paths.len() {
                if paths[i] == paths[j] {
                    clash = Some(j);
                    break 'scan;
                }
            }
        }
        match clash {
            Some(j) => {
                for v in &mut paths[j] {
                    *v += 1e-9 * rng.random::<f64>();
                }
            }
            None => return,
        }
    }
}

/// Ambient space K, interior subset X, boundary sets M_n with bumps φ_n.
#[derive(Debug, Clone)]
pub struct CompactificationPair {
    ambient: Arc<MetricSpace>,
    interior: Vec<usize>,
    boundary_sets: Vec<Vec<usize>>,
    bumps: Vec<BoundedFunction>,
    bump_scale: f64,
    interior_space: Arc<MetricSpace>,
    interior_of_ambient: Vec<Option<usize>>,
}

impl CompactificationPair {
    /// Pair with the default bump scale of 1 distance unit.
    pub fn new(
        ambient: Arc<MetricSpace>,
        interior: Vec<usize>,
        boundary_sets: Vec<Vec<usize>>,
    ) -> Result<Self> {
        Self::with_bump_scale(ambient, interior, boundary_sets, 1.0)
    }

    pub fn with_bump_scale(
        ambient: Arc<MetricSpace>,
        mut interior: Vec<usize>,
        boundary_sets: Vec<Vec<usize>>,
        scale: f64,
    ) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::param("interior", "interior must be nonempty"));
        }
        interior.sort_unstable();
        interior.dedup();
        if interior.last().is_some_and(|&i| i >= ambient.len()) {
            return Err(Error::param("interior", "point index out of range"));
        }

        // Boundary sets must partition the complement of the interior.
        let n = ambient.len();
        let mut owner = vec![None::<usize>; n];
        let mut sorted_sets = Vec::with_capacity(boundary_sets.len());
        for (si, set) in boundary_sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::param("boundary_sets", "boundary set may not be empty"));
            }
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            for &p in &set {
                if p >= n {
                    return Err(Error::param("boundary_sets", format!("index {p} out of range")));
                }
                if interior.binary_search(&p).is_ok() {
                    return Err(Error::param(
                        "boundary_sets",
                        format!("point {p} is both interior and boundary"),
                    ));
                }
                if owner[p].is_some() {
                    return Err(Error::param(
                        "boundary_sets",
                        format!("point {p} belongs to two boundary sets"),
                    ));
                }
                owner[p] = Some(si);
            }
            sorted_sets.push(set);
        }
        for p in 0..n {
            if interior.binary_search(&p).is_err() && owner[p].is_none() {
                return Err(Error::param(
                    "boundary_sets",
                    format!("point {p} is neither interior nor in any boundary set"),
                ));
            }
        }

        let mut interior_of_ambient = vec![None; n];
        for (pos, &a) in interior.iter().enumerate() {
            interior_of_ambient[a] = Some(pos);
        }

        let interior_space = if interior.len() == n {
            ambient.clone()
        } else {
            let ids = interior.iter().map(|&i| ambient.id(i).to_string()).collect();
            let rows = interior
                .iter()
                .map(|&i| interior.iter().map(|&j| ambient.dist(i, j)).collect())
                .collect();
            let labels = ambient
                .labels()
                .map(|ls| interior.iter().map(|&i| ls[i]).collect());
            MetricSpace::new(ids, rows, labels)?
        };

        let mut pair = CompactificationPair {
            ambient,
            interior,
            boundary_sets: sorted_sets,
            bumps: Vec::new(),
            bump_scale: scale,
            interior_space,
            interior_of_ambient,
        };
        for idx in 0..pair.boundary_sets.len() {
            let bump = bump_for_set(&pair.ambient, &pair.boundary_sets[idx], scale)?;
            pair.bumps.push(bump);
        }
        Ok(pair)
    }

    /// Wrap a plain space: everything interior, no boundary.
    pub fn plain(space: Arc<MetricSpace>) -> Self {
        let n = space.len();
        Self::new(space, (0..n).collect(), Vec::new())
            .expect("full interior is always a valid pair")
    }

    pub fn ambient(&self) -> &Arc<MetricSpace> {
        &self.ambient
    }

    /// The interior as a standalone metric space (same ids, restricted matrix).
    pub fn interior_space(&self) -> &Arc<MetricSpace> {
        &self.interior_space
    }

    /// Ambient indices of the interior points, ascending.
    pub fn interior_indices(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_sets(&self) -> &[Vec<usize>] {
        &self.boundary_sets
    }

    pub fn bumps(&self) -> &[BoundedFunction] {
        &self.bumps
    }

    pub fn bump(&self, boundary_index: usize) -> Result<&BoundedFunction> {
        self.bumps.get(boundary_index).ok_or_else(|| {
            Error::param(
                "boundary_index",
                format!(
                    "index {boundary_index} out of range (have {} boundary sets)",
                    self.boundary_sets.len()
                ),
            )
        })
    }

    pub fn bump_scale(&self) -> f64 {
        self.bump_scale
    }

    pub fn is_interior(&self, ambient_index: usize) -> bool {
        self.interior_of_ambient
            .get(ambient_index)
            .is_some_and(Option::is_some)
    }

    /// Position of an ambient point inside the interior space, if interior.
    pub fn interior_position(&self, ambient_index: usize) -> Option<usize> {
        self.interior_of_ambient.get(ambient_index).copied().flatten()
    }

    /// Ambient index of the `pos`-th interior point.
    pub fn ambient_index(&self, pos: usize) -> usize {
        self.interior[pos]
    }

    /// Restriction of an ambient function to the interior space.
    pub fn restrict(&self, f: &BoundedFunction) -> Result<BoundedFunction> {
        if !same_space(f.space(), &self.ambient) {
            return Err(Error::space_mismatch("restrict expects an ambient function"));
        }
        let values = self.interior.iter().map(|&i| f.value(i)).collect();
        BoundedFunction::new(self.interior_space.clone(), values)
    }

    /// Extend an interior function to the ambient space using explicit values
    /// at every boundary point (keys are ambient indices).
    pub fn extend(
        &self,
        f: &BoundedFunction,
        boundary_values: &std::collections::BTreeMap<usize, f64>,
    ) -> Result<BoundedFunction> {
        if !same_space(f.space(), &self.interior_space) {
            return Err(Error::space_mismatch("extend expects an interior function"));
        }
        let mut values = vec![0.0; self.ambient.len()];
        for (pos, &a) in self.interior.iter().enumerate() {
            values[a] = f.value(pos);
        }
        for a in 0..self.ambient.len() {
            if self.is_interior(a) {
                continue;
            }
            match boundary_values.get(&a) {
                Some(&v) => values[a] = v,
                None => {
                    return Err(Error::param(
                        "extension",
                        format!("missing value at boundary point `{}`", self.ambient.id(a)),
                    ))
                }
            }
        }
        BoundedFunction::new(self.ambient.clone(), values)
    }

    /// All boundary points (ambient indices, ascending).
    pub fn boundary_points(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.boundary_sets.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }
}

/// φ(x) = max(1 − dist(x, M)/scale, 0), rescaled off M if rounding would let
/// a non-member reach 1.  Exactly 1 on M, strictly below 1 elsewhere.
fn bump_for_set(
    ambient: &Arc<MetricSpace>,
    set: &[usize],
    scale: f64,
) -> Result<BoundedFunction> {
    if !(scale > 0.0) {
        return Err(Error::param("scale", format!("scale must be positive, got {scale}")));
    }
    if set.is_empty() {
        return Err(Error::param("boundary set", "bump over an empty set is undefined"));
    }
    let n = ambient.len();
    let mut values = vec![0.0; n];
    let mut off_max = 0.0_f64;
    for x in 0..n {
        let d = dist_to_set(ambient, x, set)?;
        let v = if d == 0.0 {
            1.0
        } else {
            (1.0 - d / scale).max(0.0)
        };
        values[x] = v;
        if d > 0.0 {
            off_max = off_max.max(v);
        }
    }
    if off_max >= 1.0 {
        let factor = off_max / (off_max + BUMP_EPS_GAP);
        for (x, v) in values.iter_mut().enumerate() {
            if dist_to_set(ambient, x, set)? > 0.0 {
                *v *= factor;
            }
        }
    }
    BoundedFunction::new(ambient.clone(), values)
}

/// The bump φ_n of one boundary set, recomputed at the requested scale.
pub fn build_boundary_bump(
    pair: &CompactificationPair,
    boundary_index: usize,
    scale: f64,
) -> Result<BoundedFunction> {
    let set = pair.boundary_sets.get(boundary_index).ok_or_else(|| {
        Error::param(
            "boundary_index",
            format!("index {boundary_index} out of range"),
        )
    })?;
    bump_for_set(&pair.ambient, set, scale)
}

/// Single bump over the union of all boundary sets.
pub fn combined_boundary_bump(pair: &CompactificationPair, scale: f64) -> Result<BoundedFunction> {
    let union = pair.boundary_points();
    if union.is_empty() {
        return Err(Error::param("pair", "pair has no boundary sets"));
    }
    bump_for_set(&pair.ambient, &union, scale)
}

/// Uniform grid model of the interval: interior at i/(n+1) for i=1..n, with
/// optional boundary points {0} and {1} as two singleton boundary sets.
pub fn sample_interval(n_interior: usize, include_boundary: bool) -> Result<CompactificationPair> {
    if n_interior < 2 {
        return Err(Error::param(
            "n_interior",
            format!("need at least 2 interior points, got {n_interior}"),
        ));
    }
    let step = 1.0 / (n_interior as f64 + 1.0);
    let mut coords: Vec<f64> = Vec::new();
    if include_boundary {
        coords.push(0.0);
    }
    for i in 1..=n_interior {
        coords.push(i as f64 * step);
    }
    if include_boundary {
        coords.push(1.0);
    }
    let ids = (0..coords.len()).map(|i| format!("p{i}")).collect();
    let rows: Vec<Vec<f64>> = coords
        .iter()
        .map(|&a| coords.iter().map(|&b| (a - b).abs()).collect())
        .collect();
    let space = MetricSpace::new(ids, rows, Some(coords.clone()))?;
    if include_boundary {
        let last = coords.len() - 1;
        let interior = (1..last).collect();
        CompactificationPair::new(space, interior, vec![vec![0], vec![last]])
    } else {
        Ok(CompactificationPair::plain(space))
    }
}

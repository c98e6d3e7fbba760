//! JSON file schemas for spaces, functions, measures, utilities, and
//! decreasing sequences, plus a CSV export for distance matrices.
//!
//! References inside a file (a function's space, an entropic reference
//! measure, cone generators) are either inline values or paths, resolved
//! relative to the referencing file.  All loaders report bad shapes through
//! [`Error::Format`] and dangling paths through [`Error::UnresolvedReference`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::func::{boundary_power_sequence, BoundedFunction, DecreasingSequence};
use crate::lp::AcceptanceCone;
use crate::measure::Measure;
use crate::space::{CompactificationPair, MetricSpace};
use crate::utility::{BoundaryUtility, Penalty, ScenarioSet, Utility};

/// Space description: points and a distance matrix, optionally split into
/// interior points and boundary sets (making it a compactification pair).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default)]
    pub labels: Option<Vec<f64>>,
    #[serde(default)]
    pub interior: Option<Vec<String>>,
    #[serde(default)]
    pub boundary_sets: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub bump_scale: Option<f64>,
}

/// A loaded space: plain, or a compactification pair when the file carries
/// interior/boundary structure.
#[derive(Debug, Clone)]
pub enum LoadedSpace {
    Plain(Arc<MetricSpace>),
    Pair(CompactificationPair),
}

impl LoadedSpace {
    /// The space functions are evaluated on (ambient for pairs).
    pub fn primary(&self) -> &Arc<MetricSpace> {
        match self {
            LoadedSpace::Plain(s) => s,
            LoadedSpace::Pair(p) => p.ambient(),
        }
    }

    pub fn pair(&self) -> Option<&CompactificationPair> {
        match self {
            LoadedSpace::Plain(_) => None,
            LoadedSpace::Pair(p) => Some(p),
        }
    }

    /// The space non-boundary utilities live on: the interior for pairs
    /// (boundary points are limits, not sample points), the space itself
    /// otherwise.
    pub fn interior_or_primary(&self) -> &Arc<MetricSpace> {
        match self {
            LoadedSpace::Plain(s) => s,
            LoadedSpace::Pair(p) => p.interior_space(),
        }
    }
}

/// Function values, optionally tied to a space file by path.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    #[serde(default)]
    pub space: Option<String>,
    pub values: Vec<f64>,
}

/// Measure weights keyed by point id, optionally tied to a space file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default)]
    pub space: Option<String>,
    pub weights: BTreeMap<String, f64>,
}

/// Inline value arrays or a path to a function file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FunctionRef {
    Inline(Vec<f64>),
    Path(String),
}

/// Inline weight maps or a path to a measure file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MeasureRef {
    Inline(BTreeMap<String, f64>),
    Path(String),
}

/// Utility description, dispatched on `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum UtilityFile {
    #[serde(rename = "coherent")]
    Coherent { vertices: Vec<MeasureRef> },
    #[serde(rename = "entropic")]
    Entropic { gamma: f64, reference: MeasureRef },
    #[serde(rename = "indicator_cone")]
    IndicatorCone { generators: Vec<FunctionRef> },
    #[serde(rename = "boundary")]
    Boundary {
        approach: Vec<String>,
        #[serde(default)]
        extension: Option<BTreeMap<String, f64>>,
        #[serde(default)]
        tail_tol: Option<f64>,
    },
    #[serde(rename = "worst_case")]
    WorstCase {},
}

/// Decreasing-sequence description, dispatched on `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SequenceFile {
    /// f_m = f + k·φ^m on a compactification pair.
    #[serde(rename = "boundary_power")]
    BoundaryPower {
        f: FunctionRef,
        k: f64,
        #[serde(default)]
        boundary_index: Option<usize>,
        #[serde(rename = "M_max")]
        m_max: usize,
    },
    /// Explicit terms with their pointwise limit.
    #[serde(rename = "explicit")]
    Explicit {
        terms: Vec<Vec<f64>>,
        limit: Vec<f64>,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::UnresolvedReference {
        reference: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: Option<&Path>) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        path: path.map(|p| p.display().to_string()),
        reason: e.to_string(),
    })
}

fn resolve(base: &Path, reference: &str) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or_else(|| Path::new(".")).join(p)
    }
}

fn index_of_id(space: &Arc<MetricSpace>, id: &str, what: &str) -> Result<usize> {
    space.index_of(id).ok_or_else(|| Error::UnresolvedReference {
        reference: id.to_string(),
        reason: format!("{what} names a point that is not in the space"),
    })
}

/// Build the space (or pair) described by a parsed [`SpaceFile`].
pub fn build_space(file: &SpaceFile) -> Result<LoadedSpace> {
    let space = MetricSpace::new(file.points.clone(), file.dist.clone(), file.labels.clone())?;
    if file.interior.is_none() && file.boundary_sets.is_none() {
        return Ok(LoadedSpace::Plain(space));
    }
    let boundary_sets: Vec<Vec<usize>> = match &file.boundary_sets {
        Some(sets) => sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|id| index_of_id(&space, id, "boundary set"))
                    .collect()
            })
            .collect::<Result<_>>()?,
        None => {
            // Interior given alone: each leftover point is its own ideal
            // boundary point.
            let interior_ids = file.interior.as_ref().expect("checked above");
            let mut interior_idx = Vec::with_capacity(interior_ids.len());
            for id in interior_ids {
                interior_idx.push(index_of_id(&space, id, "interior")?);
            }
            (0..space.len())
                .filter(|i| !interior_idx.contains(i))
                .map(|i| vec![i])
                .collect()
        }
    };
    let interior: Vec<usize> = match &file.interior {
        Some(ids) => ids
            .iter()
            .map(|id| index_of_id(&space, id, "interior"))
            .collect::<Result<_>>()?,
        None => {
            let on_boundary: Vec<usize> = boundary_sets.iter().flatten().copied().collect();
            (0..space.len()).filter(|i| !on_boundary.contains(i)).collect()
        }
    };
    let pair = match file.bump_scale {
        Some(scale) => CompactificationPair::with_bump_scale(space, interior, boundary_sets, scale)?,
        None => CompactificationPair::new(space, interior, boundary_sets)?,
    };
    Ok(LoadedSpace::Pair(pair))
}

pub fn load_space(path: &Path) -> Result<LoadedSpace> {
    let file: SpaceFile = parse_json(&read_text(path)?, Some(path))?;
    build_space(&file)
}

/// Resolve a function file against a context space.  A `space` path inside
/// the file is loaded and must structurally match the context when both are
/// present.
pub fn load_function(path: &Path, ctx: Option<&Arc<MetricSpace>>) -> Result<BoundedFunction> {
    let file: FunctionFile = parse_json(&read_text(path)?, Some(path))?;
    let space = match (&file.space, ctx) {
        (Some(reference), _) => {
            let loaded = load_space(&resolve(path, reference))?;
            let s = loaded.primary().clone();
            if let Some(c) = ctx {
                if !crate::space::same_space(&s, c) {
                    return Err(Error::space_mismatch(format!(
                        "function file `{}` names a different space",
                        path.display()
                    )));
                }
                c.clone()
            } else {
                s
            }
        }
        (None, Some(c)) => c.clone(),
        (None, None) => {
            return Err(Error::UnresolvedReference {
                reference: path.display().to_string(),
                reason: "function file has no space and no context space was given".into(),
            })
        }
    };
    BoundedFunction::new(space, file.values)
}

fn measure_from_weights(
    space: &Arc<MetricSpace>,
    weights: &BTreeMap<String, f64>,
) -> Result<Measure> {
    let mut pairs = Vec::with_capacity(weights.len());
    for (id, &w) in weights {
        pairs.push((index_of_id(space, id, "measure weight")?, w));
    }
    Measure::new(space.clone(), pairs)
}

pub fn load_measure(path: &Path, ctx: Option<&Arc<MetricSpace>>) -> Result<Measure> {
    let file: MeasureFile = parse_json(&read_text(path)?, Some(path))?;
    let space = match (&file.space, ctx) {
        (Some(reference), _) => {
            let loaded = load_space(&resolve(path, reference))?;
            let s = loaded.primary().clone();
            if let Some(c) = ctx {
                if !crate::space::same_space(&s, c) {
                    return Err(Error::space_mismatch(format!(
                        "measure file `{}` names a different space",
                        path.display()
                    )));
                }
                c.clone()
            } else {
                s
            }
        }
        (None, Some(c)) => c.clone(),
        (None, None) => {
            return Err(Error::UnresolvedReference {
                reference: path.display().to_string(),
                reason: "measure file has no space and no context space was given".into(),
            })
        }
    };
    measure_from_weights(&space, &file.weights)
}

fn resolve_measure_ref(
    r: &MeasureRef,
    base: &Path,
    space: &Arc<MetricSpace>,
) -> Result<Measure> {
    match r {
        MeasureRef::Inline(weights) => measure_from_weights(space, weights),
        MeasureRef::Path(p) => load_measure(&resolve(base, p), Some(space)),
    }
}

fn resolve_function_ref(
    r: &FunctionRef,
    base: &Path,
    space: &Arc<MetricSpace>,
) -> Result<BoundedFunction> {
    match r {
        FunctionRef::Inline(values) => BoundedFunction::new(space.clone(), values.clone()),
        FunctionRef::Path(p) => load_function(&resolve(base, p), Some(space)),
    }
}

/// Build the utility described by a parsed [`UtilityFile`] on a loaded
/// space.  `base` anchors relative references inside the file.
/// Build the utility described by a parsed [`UtilityFile`].  On pair
/// contexts, non-boundary utilities (and their inline measures/generators)
/// live on the interior space; only the `boundary` kind reads the ambient
/// one.
pub fn build_utility(file: &UtilityFile, base: &Path, ctx: &LoadedSpace) -> Result<Utility> {
    let space = match file {
        UtilityFile::Boundary { .. } => ctx.primary().clone(),
        _ => ctx.interior_or_primary().clone(),
    };
    match file {
        UtilityFile::Coherent { vertices } => {
            let measures = vertices
                .iter()
                .map(|r| resolve_measure_ref(r, base, &space))
                .collect::<Result<Vec<_>>>()?;
            Ok(Utility::Coherent(ScenarioSet::from_vertices(
                space, measures,
            )?))
        }
        UtilityFile::Entropic { gamma, reference } => {
            let nu = resolve_measure_ref(reference, base, &space)?;
            Ok(Utility::Concave(Penalty::entropic(*gamma, nu)?))
        }
        UtilityFile::IndicatorCone { generators } => {
            let gens = generators
                .iter()
                .map(|r| resolve_function_ref(r, base, &space))
                .collect::<Result<Vec<_>>>()?;
            let cone = AcceptanceCone::new(space, gens)?;
            Ok(Utility::Coherent(ScenarioSet::from_cone(cone)))
        }
        UtilityFile::Boundary {
            approach,
            extension,
            tail_tol,
        } => {
            let pair = ctx.pair().ok_or_else(|| {
                Error::param(
                    "space",
                    "boundary utilities need a space with interior/boundary structure",
                )
            })?;
            let approach_idx = approach
                .iter()
                .map(|id| index_of_id(&space, id, "approach"))
                .collect::<Result<Vec<_>>>()?;
            let ext_idx = extension
                .as_ref()
                .map(|map| {
                    map.iter()
                        .map(|(id, &v)| Ok((index_of_id(&space, id, "extension")?, v)))
                        .collect::<Result<BTreeMap<usize, f64>>>()
                })
                .transpose()?;
            Ok(Utility::Boundary(BoundaryUtility::new(
                pair.clone(),
                approach_idx,
                ext_idx,
                *tail_tol,
            )?))
        }
        UtilityFile::WorstCase {} => Ok(Utility::WorstCase(space)),
    }
}

pub fn load_utility(path: &Path, ctx: &LoadedSpace) -> Result<Utility> {
    let file: UtilityFile = parse_json(&read_text(path)?, Some(path))?;
    build_utility(&file, path, ctx)
}

/// Build the decreasing sequence described by a parsed [`SequenceFile`].
/// Explicit terms may live on the primary space or (for pairs) the interior
/// space; lengths decide.
pub fn build_sequence(
    file: &SequenceFile,
    base: &Path,
    ctx: &LoadedSpace,
) -> Result<DecreasingSequence> {
    match file {
        SequenceFile::BoundaryPower {
            f,
            k,
            boundary_index,
            m_max,
        } => {
            let pair = ctx.pair().ok_or_else(|| {
                Error::param(
                    "space",
                    "boundary_power sequences need a space with interior/boundary structure",
                )
            })?;
            let f = resolve_function_ref(f, base, pair.ambient())?;
            boundary_power_sequence(pair, &f, *k, boundary_index.unwrap_or(0), *m_max)
        }
        SequenceFile::Explicit { terms, limit } => {
            let pick_space = |len: usize| -> Result<Arc<MetricSpace>> {
                if len == ctx.primary().len() {
                    Ok(ctx.primary().clone())
                } else if let Some(pair) = ctx.pair() {
                    if len == pair.interior_space().len() {
                        Ok(pair.interior_space().clone())
                    } else {
                        Err(Error::LengthMismatch {
                            context: "sequence values",
                            expected: ctx.primary().len(),
                            got: len,
                        })
                    }
                } else {
                    Err(Error::LengthMismatch {
                        context: "sequence values",
                        expected: ctx.primary().len(),
                        got: len,
                    })
                }
            };
            let space = pick_space(limit.len())?;
            let terms = terms
                .iter()
                .map(|v| BoundedFunction::new(space.clone(), v.clone()))
                .collect::<Result<Vec<_>>>()?;
            let limit = BoundedFunction::new(space, limit.clone())?;
            DecreasingSequence::new(terms, limit)
        }
    }
}

pub fn load_sequence(path: &Path, ctx: &LoadedSpace) -> Result<DecreasingSequence> {
    let file: SequenceFile = parse_json(&read_text(path)?, Some(path))?;
    build_sequence(&file, path, ctx)
}

/// Distance matrix as CSV: header row of ids, then one row per point with
/// its id and distances.  Floats use the shortest representation that round
/// trips exactly.
pub fn dist_matrix_csv(space: &Arc<MetricSpace>) -> String {
    let mut out = String::from("id");
    for id in space.ids() {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for i in 0..space.len() {
        out.push_str(space.id(i));
        for j in 0..space.len() {
            out.push(',');
            out.push_str(&format!("{}", space.dist(i, j)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("riskdual-io-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    const TWO_POINT_SPACE: &str =
        r#"{"points":["a","b"],"dist":[[0.0,1.0],[1.0,0.0]]}"#;

    #[test]
    fn space_round_trip_plain_and_pair() {
        let dir = tmpdir("space");
        let plain = write(&dir, "plain.json", TWO_POINT_SPACE);
        let loaded = load_space(&plain).unwrap();
        assert!(matches!(loaded, LoadedSpace::Plain(_)));
        assert_eq!(loaded.primary().len(), 2);

        let pair_text = r#"{
            "points": ["x", "y", "end"],
            "dist": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            "boundary_sets": [["end"]]
        }"#;
        let pair_path = write(&dir, "pair.json", pair_text);
        let loaded = load_space(&pair_path).unwrap();
        let pair = loaded.pair().unwrap();
        assert_eq!(pair.interior_indices(), &[0, 1]);
        assert_eq!(pair.boundary_sets(), &[vec![2]]);

        // Interior alone: leftovers become singleton boundary sets.
        let interior_only = r#"{
            "points": ["x", "y", "end"],
            "dist": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            "interior": ["x", "y"]
        }"#;
        let p = write(&dir, "interior_only.json", interior_only);
        let loaded = load_space(&p).unwrap();
        assert_eq!(loaded.pair().unwrap().boundary_sets(), &[vec![2]]);
    }

    #[test]
    fn function_and_measure_files() {
        let dir = tmpdir("func");
        write(&dir, "space.json", TWO_POINT_SPACE);
        let f = write(&dir, "f.json", r#"{"space":"space.json","values":[2.0,5.0]}"#);
        let func = load_function(&f, None).unwrap();
        assert_eq!(func.values(), &[2.0, 5.0]);

        let m = write(&dir, "m.json", r#"{"weights":{"a":0.25,"b":0.75}}"#);
        let mu = load_measure(&m, Some(func.space())).unwrap();
        assert_eq!(mu.dense(), vec![0.25, 0.75]);

        // Unknown point id.
        let bad = write(&dir, "bad.json", r#"{"weights":{"zzz":1.0}}"#);
        assert!(matches!(
            load_measure(&bad, Some(func.space())),
            Err(Error::UnresolvedReference { .. })
        ));

        // Missing file.
        assert!(matches!(
            load_function(&dir.join("nope.json"), None),
            Err(Error::UnresolvedReference { .. })
        ));

        // Malformed JSON.
        let broken = write(&dir, "broken.json", "{ not json");
        assert!(matches!(
            load_function(&broken, None),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn utility_files_all_kinds() {
        let dir = tmpdir("util");
        let sp = write(&dir, "space.json", TWO_POINT_SPACE);
        let ctx = load_space(&sp).unwrap();

        let coh = write(
            &dir,
            "coherent.json",
            r#"{"kind":"coherent","vertices":[{"a":1.0},{"b":1.0}]}"#,
        );
        let u = load_utility(&coh, &ctx).unwrap();
        let f = BoundedFunction::new(ctx.primary().clone(), vec![2.0, 5.0]).unwrap();
        assert_eq!(u.eval(&f).unwrap(), 2.0);

        let ent = write(
            &dir,
            "entropic.json",
            r#"{"kind":"entropic","gamma":1.0,"reference":{"a":0.5,"b":0.5}}"#,
        );
        let u = load_utility(&ent, &ctx).unwrap();
        assert!(!u.is_coherent());

        let cone = write(
            &dir,
            "cone.json",
            r#"{"kind":"indicator_cone","generators":[[1.0,-1.0]]}"#,
        );
        let u = load_utility(&cone, &ctx).unwrap();
        assert!(u.is_coherent());

        let wc = write(&dir, "wc.json", r#"{"kind":"worst_case"}"#);
        let u = load_utility(&wc, &ctx).unwrap();
        assert_eq!(u.eval(&f).unwrap(), 2.0);

        // Boundary utilities need a pair.
        let bd = write(
            &dir,
            "boundary.json",
            r#"{"kind":"boundary","approach":["a"]}"#,
        );
        assert!(load_utility(&bd, &ctx).is_err());

        let pair_text = r#"{
            "points": ["x", "y", "end"],
            "dist": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            "boundary_sets": [["end"]]
        }"#;
        let pp = write(&dir, "pair.json", pair_text);
        let pair_ctx = load_space(&pp).unwrap();
        let bd2 = write(
            &dir,
            "boundary2.json",
            r#"{"kind":"boundary","approach":["x","y"],"extension":{"end":7.0}}"#,
        );
        let u = load_utility(&bd2, &pair_ctx).unwrap();
        let ambient_f =
            BoundedFunction::new(pair_ctx.primary().clone(), vec![0.0, 1.0, 7.0]).unwrap();
        assert_eq!(u.eval(&ambient_f).unwrap(), 7.0);
    }

    #[test]
    fn sequence_files() {
        let dir = tmpdir("seq");
        let pair_text = r#"{
            "points": ["x", "y", "end"],
            "dist": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            "boundary_sets": [["end"]]
        }"#;
        let pp = write(&dir, "pair.json", pair_text);
        let ctx = load_space(&pp).unwrap();

        let bp = write(
            &dir,
            "powers.json",
            r#"{"kind":"boundary_power","f":[0.0,0.0,0.0],"k":2.0,"M_max":4}"#,
        );
        let seq = load_sequence(&bp, &ctx).unwrap();
        assert_eq!(seq.horizon(), 4);
        assert!(seq.ambient_terms().is_some());

        let ex = write(
            &dir,
            "explicit.json",
            r#"{"kind":"explicit","terms":[[1.0,1.0],[0.5,0.5]],"limit":[0.0,0.0]}"#,
        );
        let seq = load_sequence(&ex, &ctx).unwrap();
        assert_eq!(seq.horizon(), 2);
        // Two entries match the interior length, not the ambient one.
        assert!(seq.ambient_terms().is_none());
        assert_eq!(seq.limit().len(), 2);

        let bad = write(
            &dir,
            "badlen.json",
            r#"{"kind":"explicit","terms":[[1.0]],"limit":[0.0]}"#,
        );
        assert!(load_sequence(&bad, &ctx).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let dir = tmpdir("csv");
        let sp = write(&dir, "space.json", TWO_POINT_SPACE);
        let loaded = load_space(&sp).unwrap();
        let csv = dist_matrix_csv(loaded.primary());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, vec!["id,a,b", "a,0,1", "b,1,0"]);
    }
}

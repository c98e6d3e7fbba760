//! Monetary utility evaluations in both dual forms — worst case over a
//! scenario set and penalty-corrected minimization — plus the conjugate
//! penalty, acceptance tests, Borel/step extension, and boundary utilities
//! that charge the edge of a compactification pair.

mod harness;

pub use harness::{
    axioms_check, fatou_check, support_localization_probe, AxiomKind, AxiomRecord, AxiomReport,
    AxiomWitness, BumpProbe, FatouReport, LocalizationPartial, LocalizationReport, AXIOM_TOL,
    MONO_TOL,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::BoundedFunction;
use crate::lp::{
    enumerate_polar_vertices, solve_min, solve_min_lex, AcceptanceCone, LinearProgram, LpStatus,
    Sense, ACCEPT_TOL,
};
use crate::measure::{evaluate, kl_divergence, Measure};
use crate::space::{same_space, CompactificationPair, MetricSpace};

/// Convex set of scenarios: explicit vertex list, or the polar of an
/// acceptance cone queried through LP oracles.
#[derive(Debug, Clone)]
pub struct ScenarioSet {
    space: Arc<MetricSpace>,
    repr: ScenarioRepr,
}

#[derive(Debug, Clone)]
pub enum ScenarioRepr {
    Vertices(Vec<Measure>),
    Polytope(AcceptanceCone),
}

impl ScenarioSet {
    /// Convex hull of explicit measures; an empty list is the empty set
    /// (utilities over it are undefined and say so).
    pub fn from_vertices(space: Arc<MetricSpace>, vertices: Vec<Measure>) -> Result<Self> {
        for v in &vertices {
            if !same_space(v.space(), &space) {
                return Err(Error::space_mismatch("scenario vertex"));
            }
        }
        Ok(ScenarioSet {
            space,
            repr: ScenarioRepr::Vertices(vertices),
        })
    }

    /// {μ in the simplex : μ(g) ≥ 0 for every generator}, kept in constraint
    /// form and served by membership/minimization oracles.
    pub fn from_cone(cone: AcceptanceCone) -> Self {
        ScenarioSet {
            space: cone.space().clone(),
            repr: ScenarioRepr::Polytope(cone),
        }
    }

    pub fn full_simplex(space: Arc<MetricSpace>) -> Self {
        Self::from_cone(AcceptanceCone::nonneg(space))
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn repr(&self) -> &ScenarioRepr {
        &self.repr
    }

    pub fn is_empty(&self) -> Result<bool> {
        match &self.repr {
            ScenarioRepr::Vertices(v) => Ok(v.is_empty()),
            ScenarioRepr::Polytope(cone) => {
                let lp = self.polytope_lp(cone, vec![0.0; self.space.len()]);
                Ok(solve_min(&lp)?.status == LpStatus::Infeasible)
            }
        }
    }

    /// min over the set of μ(f) with an attaining measure; ties resolve to
    /// the lexicographically smallest optimal vertex.
    pub fn minimize(&self, f: &BoundedFunction) -> Result<(f64, Measure)> {
        if !same_space(f.space(), &self.space) {
            return Err(Error::space_mismatch("scenario minimization"));
        }
        match &self.repr {
            ScenarioRepr::Vertices(vertices) => {
                if vertices.is_empty() {
                    return Err(Error::EmptyScenarioSet);
                }
                let mut best = f64::INFINITY;
                let mut witness: Option<&Measure> = None;
                for v in vertices {
                    let val = evaluate(v, f)?;
                    let take = match witness {
                        None => true,
                        Some(w) => {
                            val < best || (val == best && v.dense() < w.dense())
                        }
                    };
                    if take {
                        best = best.min(val);
                        witness = Some(v);
                    }
                }
                Ok((best, witness.expect("nonempty").clone()))
            }
            ScenarioRepr::Polytope(cone) => {
                let lp = self.polytope_lp(cone, f.values().to_vec());
                let res = solve_min_lex(&lp)?;
                match res.status {
                    LpStatus::Optimal => {
                        let x = res.x.expect("optimal");
                        let mu = Measure::normalized(
                            self.space.clone(),
                            x.iter().enumerate().map(|(i, &w)| (i, w.max(0.0))).collect(),
                        )?;
                        Ok((res.value.expect("optimal"), mu))
                    }
                    LpStatus::Infeasible => Err(Error::EmptyScenarioSet),
                    LpStatus::Unbounded => unreachable!("simplex domain is bounded"),
                }
            }
        }
    }

    /// Membership oracle.  For constraint form, checks μ(g) ≥ −tol directly;
    /// for vertex form, solves the convex-combination feasibility LP.
    pub fn contains(&self, mu: &Measure, tol: f64) -> Result<bool> {
        if !same_space(mu.space(), &self.space) {
            return Err(Error::space_mismatch("scenario membership"));
        }
        match &self.repr {
            ScenarioRepr::Vertices(vertices) => {
                if vertices.is_empty() {
                    return Ok(false);
                }
                let d = self.space.len();
                let k = vertices.len();
                let mut lp = LinearProgram::new(vec![0.0; k]);
                for i in 0..d {
                    let row = vertices.iter().map(|v| v.weight(i)).collect();
                    lp.push(row, Sense::Eq, mu.weight(i));
                }
                lp.push(vec![1.0; k], Sense::Eq, 1.0);
                Ok(solve_min(&lp)?.status == LpStatus::Optimal)
            }
            ScenarioRepr::Polytope(cone) => {
                for g in cone.generators() {
                    if evaluate(mu, g)? < -tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Vertex list: the stored one, or exact enumeration for constraint form
    /// (capacity-limited).
    pub fn vertices(&self) -> Result<Vec<Measure>> {
        match &self.repr {
            ScenarioRepr::Vertices(v) => Ok(v.clone()),
            ScenarioRepr::Polytope(cone) => enumerate_polar_vertices(cone),
        }
    }

    /// Extremality test by LP: μ is a vertex iff no nonzero direction keeps
    /// all its active constraints tight.
    pub fn is_vertex(&self, mu: &Measure) -> Result<bool> {
        if !self.contains(mu, ACCEPT_TOL)? {
            return Ok(false);
        }
        match &self.repr {
            ScenarioRepr::Vertices(vertices) => {
                // Extreme points of a hull are among the listed vertices:
                // find a listed twin, then test it against the others' hull.
                let twin = vertices.iter().position(|v| {
                    v.dense()
                        .iter()
                        .zip(mu.dense())
                        .all(|(a, b)| (a - b).abs() <= ACCEPT_TOL)
                });
                let Some(idx) = twin else { return Ok(false) };
                let rest: Vec<Measure> = vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, v)| {
                        i != idx
                            && !v
                                .dense()
                                .iter()
                                .zip(vertices[idx].dense())
                                .all(|(a, b)| (a - b).abs() <= ACCEPT_TOL)
                    })
                    .map(|(_, v)| v.clone())
                    .collect();
                if rest.is_empty() {
                    return Ok(true);
                }
                let hull = ScenarioSet::from_vertices(self.space.clone(), rest)?;
                Ok(!hull.contains(mu, ACCEPT_TOL)?)
            }
            ScenarioRepr::Polytope(cone) => {
                let d = self.space.len();
                let weights = mu.dense();
                // Feasible directions v with Σv = 0 that keep zero weights
                // and tight generators pinned; nonzero v ⇒ not extreme.
                let mut base: LinearProgram<f64> = LinearProgram::new(vec![0.0; d]);
                base.lower_bounds = vec![-1.0; d];
                for j in 0..d {
                    let mut row = vec![0.0; d];
                    row[j] = 1.0;
                    base.push(row, Sense::Le, 1.0);
                }
                base.push(vec![1.0; d], Sense::Eq, 0.0);
                for (j, &w) in weights.iter().enumerate() {
                    if w <= ACCEPT_TOL {
                        let mut row = vec![0.0; d];
                        row[j] = 1.0;
                        base.push(row, Sense::Eq, 0.0);
                    }
                }
                for g in cone.generators() {
                    if evaluate(mu, g)?.abs() <= ACCEPT_TOL {
                        base.push(g.values().to_vec(), Sense::Eq, 0.0);
                    } else {
                        base.push(g.values().to_vec(), Sense::Ge, 0.0);
                        // Inactive constraints stay satisfiable for small
                        // steps; the homogeneous relaxation above is safe
                        // because any direction can be scaled down.
                    }
                }
                for j in 0..d {
                    let mut stage = base.clone();
                    stage.objective = vec![0.0; d];
                    stage.objective[j] = 1.0;
                    let res = solve_min(&stage)?;
                    if res.status == LpStatus::Optimal
                        && res.value.expect("optimal") < -1e-7
                    {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn polytope_lp(&self, cone: &AcceptanceCone, objective: Vec<f64>) -> LinearProgram<f64> {
        let d = self.space.len();
        let mut lp = LinearProgram::new(objective);
        lp.push(vec![1.0; d], Sense::Eq, 1.0);
        for g in cone.generators() {
            lp.push(g.values().to_vec(), Sense::Ge, 0.0);
        }
        lp
    }
}

/// Penalty function c with +∞ off its effective domain.
#[derive(Debug, Clone)]
pub enum Penalty {
    /// 0 on the scenario set, +∞ outside.
    Indicator(ScenarioSet),
    /// γ·KL(μ ‖ reference).
    Entropic { gamma: f64, reference: Measure },
    /// Explicit (μ, c) table — an outer approximation: the induced utility
    /// minimizes over the listed pairs only.
    Tabulated(Vec<(Measure, f64)>),
}

impl Penalty {
    pub fn indicator(set: ScenarioSet) -> Self {
        Penalty::Indicator(set)
    }

    pub fn entropic(gamma: f64, reference: Measure) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::param("gamma", format!("gamma must be positive, got {gamma}")));
        }
        Ok(Penalty::Entropic { gamma, reference })
    }

    pub fn tabulated(entries: Vec<(Measure, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::param("entries", "tabulated penalty needs at least one entry"));
        }
        let space = entries[0].0.space().clone();
        for (mu, c) in &entries {
            if !same_space(mu.space(), &space) {
                return Err(Error::space_mismatch("tabulated penalty entry"));
            }
            if !c.is_finite() || *c < 0.0 {
                return Err(Error::param(
                    "entries",
                    format!("penalty value {c} is not a finite nonnegative real"),
                ));
            }
        }
        Ok(Penalty::Tabulated(entries))
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        match self {
            Penalty::Indicator(s) => s.space(),
            Penalty::Entropic { reference, .. } => reference.space(),
            Penalty::Tabulated(entries) => entries[0].0.space(),
        }
    }

    /// c(μ); +∞ is a value, not an error.
    pub fn value(&self, mu: &Measure) -> Result<f64> {
        match self {
            Penalty::Indicator(s) => Ok(if s.contains(mu, ACCEPT_TOL)? {
                0.0
            } else {
                f64::INFINITY
            }),
            Penalty::Entropic { gamma, reference } => {
                Ok(gamma * kl_divergence(mu, reference)?)
            }
            Penalty::Tabulated(entries) => {
                let dense = mu.dense();
                let mut best = f64::INFINITY;
                for (m, c) in entries {
                    let same = m
                        .dense()
                        .iter()
                        .zip(&dense)
                        .all(|(a, b)| (a - b).abs() <= 1e-12);
                    if same {
                        best = best.min(*c);
                    }
                }
                Ok(best)
            }
        }
    }
}

/// A monetary utility in one of the built-in forms.
#[derive(Debug, Clone)]
pub enum Utility {
    Coherent(ScenarioSet),
    Concave(Penalty),
    Boundary(BoundaryUtility),
    WorstCase(Arc<MetricSpace>),
}

/// Point evaluation at the edge of a compactification pair, reached as the
/// limit along an interior approach sequence.  Models a scenario charging
/// the boundary: it ignores every interior perturbation that dies out at the
/// boundary, which is exactly what breaks the Fatou property.
#[derive(Debug, Clone)]
pub struct BoundaryUtility {
    pair: CompactificationPair,
    approach: Vec<usize>,
    /// Boundary values (ambient index → value) used to extend functions
    /// given only on the interior.  Without it, interior inputs are errors.
    extension: Option<BTreeMap<usize, f64>>,
    /// When set, ambient evaluations also check that the values along the
    /// approach tail stabilize toward the boundary value.
    tail_tol: Option<f64>,
}

impl BoundaryUtility {
    pub fn new(
        pair: CompactificationPair,
        approach: Vec<usize>,
        extension: Option<BTreeMap<usize, f64>>,
        tail_tol: Option<f64>,
    ) -> Result<Self> {
        if approach.is_empty() {
            return Err(Error::param("approach", "approach sequence may not be empty"));
        }
        for &a in &approach {
            if !pair.is_interior(a) {
                return Err(Error::param(
                    "approach",
                    format!("approach point index {a} is not interior"),
                ));
            }
        }
        if pair.boundary_sets().is_empty() {
            return Err(Error::param("pair", "boundary utility needs boundary sets"));
        }
        if let Some(t) = tail_tol {
            if !(t > 0.0) {
                return Err(Error::param("tail_tol", "tolerance must be positive"));
            }
        }
        Ok(BoundaryUtility {
            pair,
            approach,
            extension,
            tail_tol,
        })
    }

    pub fn pair(&self) -> &CompactificationPair {
        &self.pair
    }

    pub fn approach(&self) -> &[usize] {
        &self.approach
    }

    /// The boundary point the approach sequence converges to.
    pub fn boundary_point(&self) -> Result<usize> {
        let last = *self.approach.last().expect("nonempty");
        nearest_boundary_point(&self.pair, last)
    }

    fn eval(&self, f: &BoundedFunction) -> Result<BoundaryEval> {
        if same_space(f.space(), self.pair.ambient()) {
            boundary_utility_eval(&self.pair, &self.approach, f, self.tail_tol)
        } else if same_space(f.space(), self.pair.interior_space()) {
            match &self.extension {
                Some(ext) => {
                    let ambient = self.pair.extend(f, ext)?;
                    boundary_utility_eval(&self.pair, &self.approach, &ambient, self.tail_tol)
                }
                None => Err(Error::param(
                    "f",
                    "boundary utility needs ambient values (no extension table given)",
                )),
            }
        } else {
            Err(Error::space_mismatch("boundary utility evaluation"))
        }
    }
}

impl Utility {
    /// The space evaluations run on (the ambient one for boundary kinds).
    pub fn space(&self) -> &Arc<MetricSpace> {
        match self {
            Utility::Coherent(s) => s.space(),
            Utility::Concave(c) => c.space(),
            Utility::Boundary(b) => b.pair.ambient(),
            Utility::WorstCase(s) => s,
        }
    }

    /// Declared coherence (positive homogeneity is only claimed for these).
    pub fn is_coherent(&self) -> bool {
        matches!(
            self,
            Utility::Coherent(_) | Utility::Boundary(_) | Utility::WorstCase(_)
        )
    }

    pub fn eval(&self, f: &BoundedFunction) -> Result<f64> {
        Ok(self.eval_with_witness(f)?.0)
    }

    /// Value plus a minimizing measure where one is meaningful.
    pub fn eval_with_witness(&self, f: &BoundedFunction) -> Result<(f64, Option<Measure>)> {
        match self {
            Utility::Coherent(s) => {
                let (v, w) = coherent_eval(s, f)?;
                Ok((v, Some(w)))
            }
            Utility::Concave(c) => {
                let (v, w) = concave_eval(c, f)?;
                Ok((v, Some(w)))
            }
            Utility::Boundary(b) => {
                let ev = b.eval(f)?;
                let w = Measure::dirac(b.pair.ambient().clone(), ev.boundary_point)?;
                Ok((ev.value, Some(w)))
            }
            Utility::WorstCase(space) => {
                if !same_space(f.space(), space) {
                    return Err(Error::space_mismatch("worst-case evaluation"));
                }
                let (idx, _) = f
                    .values()
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite"))
                    .expect("nonempty");
                Ok((
                    worst_case_eval(f),
                    Some(Measure::dirac(space.clone(), idx)?),
                ))
            }
        }
    }
}

/// Shared evaluation interface for harnesses (and deliberately broken test
/// oracles).
pub trait UtilityOracle {
    fn eval(&self, f: &BoundedFunction) -> Result<f64>;

    /// Whether positive homogeneity is claimed.
    fn declared_coherent(&self) -> bool {
        false
    }

    /// Oracles reading boundary points want the ambient view of sequences.
    fn prefers_ambient(&self) -> bool {
        false
    }
}

impl UtilityOracle for Utility {
    fn eval(&self, f: &BoundedFunction) -> Result<f64> {
        Utility::eval(self, f)
    }

    fn declared_coherent(&self) -> bool {
        self.is_coherent()
    }

    fn prefers_ambient(&self) -> bool {
        matches!(self, Utility::Boundary(_))
    }
}

/// u(f) = min_{μ∈S} μ(f) with an attaining scenario.
pub fn coherent_eval(s: &ScenarioSet, f: &BoundedFunction) -> Result<(f64, Measure)> {
    s.minimize(f)
}

/// u(f) = inf μ(f) + c(μ) over the penalty's effective domain.
pub fn concave_eval(c: &Penalty, f: &BoundedFunction) -> Result<(f64, Measure)> {
    match c {
        Penalty::Indicator(s) => coherent_eval(s, f),
        Penalty::Entropic { gamma, reference } => entropic_eval(*gamma, reference, f),
        Penalty::Tabulated(entries) => {
            if !same_space(f.space(), entries[0].0.space()) {
                return Err(Error::space_mismatch("tabulated evaluation"));
            }
            let mut best = f64::INFINITY;
            let mut witness: Option<&Measure> = None;
            for (mu, cost) in entries {
                let val = evaluate(mu, f)? + cost;
                let take = match witness {
                    None => true,
                    Some(w) => val < best || (val == best && mu.dense() < w.dense()),
                };
                if take {
                    best = val.min(best);
                    witness = Some(mu);
                }
            }
            Ok((best, witness.expect("nonempty by construction").clone()))
        }
    }
}

/// Closed form −γ·ln Σ ν_i e^{−f_i/γ} with the Gibbs minimizer ∝ ν·e^{−f/γ}.
pub fn entropic_eval(gamma: f64, nu: &Measure, f: &BoundedFunction) -> Result<(f64, Measure)> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::param("gamma", format!("gamma must be positive, got {gamma}")));
    }
    if !same_space(nu.space(), f.space()) {
        return Err(Error::space_mismatch("entropic evaluation"));
    }
    // Log-sum-exp with max subtraction for stability.
    let exponents: Vec<(usize, f64)> = nu
        .weights()
        .iter()
        .map(|&(i, _)| (i, -f.value(i) / gamma))
        .collect();
    let m = exponents
        .iter()
        .map(|&(_, a)| a)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    let mut weights = Vec::with_capacity(exponents.len());
    for &(i, a) in &exponents {
        let w = nu.weight(i) * (a - m).exp();
        total += w;
        weights.push((i, w));
    }
    let value = -gamma * (m + total.ln());
    let minimizer = Measure::normalized(nu.space().clone(), weights)?;
    Ok((value, minimizer))
}

/// u₁(f) = min over points of f.
pub fn worst_case_eval(f: &BoundedFunction) -> f64 {
    f.values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Conjugate value c(μ) = sup{μ(−f) : f in the cone}: 0 on the polar set,
/// +∞ off it.
#[derive(Debug, Clone)]
pub struct ConjugateValue {
    pub value: f64,
    /// A cone element with μ(−f) > 0 whose scalings drive the sup to +∞;
    /// present exactly when the value is infinite.
    pub certificate: Option<BoundedFunction>,
}

/// Probe the cone inside the ‖f‖ ≤ 1 box: a positive optimum of μ(−f) scales
/// to +∞, otherwise the sup is 0 (attained at f = 0).
pub fn conjugate_penalty(cone: &AcceptanceCone, mu: &Measure) -> Result<ConjugateValue> {
    if !same_space(mu.space(), cone.space()) {
        return Err(Error::space_mismatch("conjugate_penalty"));
    }
    let d = cone.space().len();
    let gens = cone.generators();
    let m = gens.len();
    // Variables: λ_j ≥ 0 (generator weights), s_i ≥ 0 (nonnegative part);
    // f_i = Σ_j λ_j g_j(i) + s_i.  Minimize μ(f) = −μ(−f).
    let mut objective = vec![0.0; m + d];
    for (j, g) in gens.iter().enumerate() {
        objective[j] = evaluate(mu, g)?;
    }
    for i in 0..d {
        objective[m + i] = mu.weight(i);
    }
    let mut lp = LinearProgram::new(objective);
    for i in 0..d {
        let mut row = vec![0.0; m + d];
        for (j, g) in gens.iter().enumerate() {
            row[j] = g.value(i);
        }
        row[m + i] = 1.0;
        lp.push(row.clone(), Sense::Le, 1.0);
        lp.push(row, Sense::Ge, -1.0);
    }
    let res = solve_min(&lp)?;
    if res.status != LpStatus::Optimal {
        return Err(Error::param(
            "cone",
            "conjugate probe did not reach an optimum (unexpected)",
        ));
    }
    let best = -res.value.expect("optimal"); // sup of μ(−f) over the box
    if best > ACCEPT_TOL {
        let x = res.x.expect("optimal");
        let values: Vec<f64> = (0..d)
            .map(|i| {
                let mut v = x[m + i];
                for (j, g) in gens.iter().enumerate() {
                    v += x[j] * g.value(i);
                }
                v
            })
            .collect();
        let certificate = BoundedFunction::new(cone.space().clone(), values)?;
        Ok(ConjugateValue {
            value: f64::INFINITY,
            certificate: Some(certificate),
        })
    } else {
        Ok(ConjugateValue {
            value: 0.0,
            certificate: None,
        })
    }
}

/// Acceptance decision for f under an oracle.
#[derive(Debug, Clone)]
pub struct AcceptanceDecision {
    pub accepted: bool,
    pub value: f64,
    /// max{a : u(f−a) ≥ 0} recovered by bisection, when requested.
    pub bisection_value: Option<f64>,
}

/// f is acceptable iff u(f) ≥ −[`ACCEPT_TOL`].  With `bisect`, also recover
/// u(f) as the largest acceptable cash reduction (consistency probe).
pub fn acceptance_test(
    u: &dyn UtilityOracle,
    f: &BoundedFunction,
    bisect: bool,
) -> Result<AcceptanceDecision> {
    let value = u.eval(f)?;
    let bisection_value = if bisect {
        let mut lo = -f.sup_norm() - 1.0;
        let mut hi = f.sup_norm() + 1.0;
        // Invariant: u(f − lo) ≥ 0 ≥ "u(f − hi) < 0".
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if u.eval(&f.shift(-mid)?)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    } else {
        None
    };
    Ok(AcceptanceDecision {
        accepted: value >= -ACCEPT_TOL,
        value,
        bisection_value,
    })
}

/// Penalty minimization over arbitrary bounded value arrays (discretized
/// indicators and other step data).  On finite samples this coincides with
/// `concave_eval`; the separate entry point records the semantic difference.
pub fn borel_extension_eval(c: &Penalty, values: &[f64]) -> Result<(f64, Measure)> {
    let f = BoundedFunction::new(c.space().clone(), values.to_vec())?;
    concave_eval(c, &f)
}

/// Result of a boundary evaluation.
#[derive(Debug, Clone)]
pub struct BoundaryEval {
    pub value: f64,
    /// Ambient index of the limiting boundary point.
    pub boundary_point: usize,
    /// Largest |f(approach_k) − f(b)| over the tail of the approach.
    pub tail_gap: f64,
    pub stabilized: bool,
}

fn nearest_boundary_point(pair: &CompactificationPair, from: usize) -> Result<usize> {
    let boundary = pair.boundary_points();
    if boundary.is_empty() {
        return Err(Error::param("pair", "pair has no boundary points"));
    }
    let mut best = boundary[0];
    for &b in &boundary[1..] {
        if pair.ambient().dist(from, b) < pair.ambient().dist(from, best) {
            best = b;
        }
    }
    Ok(best)
}

/// Evaluate f at the boundary point the approach converges to, checking the
/// approach really contracts toward it and (optionally) that f's values
/// stabilize along the tail.
pub fn boundary_utility_eval(
    pair: &CompactificationPair,
    approach: &[usize],
    f: &BoundedFunction,
    tail_tol: Option<f64>,
) -> Result<BoundaryEval> {
    if approach.is_empty() {
        return Err(Error::param("approach", "approach sequence may not be empty"));
    }
    if !same_space(f.space(), pair.ambient()) {
        return Err(Error::space_mismatch(
            "boundary evaluation needs the ambient extension of f",
        ));
    }
    for &a in approach {
        if !pair.is_interior(a) {
            return Err(Error::param(
                "approach",
                format!("approach point index {a} is not interior"),
            ));
        }
    }
    let b = nearest_boundary_point(pair, *approach.last().expect("nonempty"))?;
    let dists: Vec<f64> = approach
        .iter()
        .map(|&a| pair.ambient().dist(a, b))
        .collect();
    for (k, w) in dists.windows(2).enumerate() {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::NonConvergentApproach {
                reason: format!(
                    "distance to `{}` grows at step {}: {} -> {}",
                    pair.ambient().id(b),
                    k + 1,
                    w[0],
                    w[1]
                ),
            });
        }
    }
    let value = f.value(b);
    let tail_len = approach.len().div_ceil(2);
    let tail_gap = approach[approach.len() - tail_len..]
        .iter()
        .map(|&a| (f.value(a) - value).abs())
        .fold(0.0, f64::max);
    let stabilized = match tail_tol {
        Some(t) => {
            if tail_gap > t {
                return Err(Error::NoContinuousExtension {
                    gap: tail_gap,
                    tol: t,
                });
            }
            true
        }
        None => false,
    };
    Ok(BoundaryEval {
        value,
        boundary_point: b,
        tail_gap,
        stabilized,
    })
}

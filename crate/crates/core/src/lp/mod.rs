//! Linear programming kernel and the polarity bridge between acceptance
//! cones and scenario sets.

mod simplex;
mod vertex_enum;

pub use simplex::{
    check_optimal, solve_min, solve_min_lex, Constraint, LinearProgram, LpResult, LpStatus,
    Sense, SimplexScalar, FEAS_TOL, GAP_TOL,
};
pub use vertex_enum::{polar_polytope_vertices, rational_from_f64};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::BoundedFunction;
use crate::measure::Measure;
use crate::space::{same_space, MetricSpace};
use crate::utility::ScenarioSet;

/// Acceptance threshold: μ(f) ≥ −ACCEPT_TOL counts as nonnegative.
pub const ACCEPT_TOL: f64 = 1e-9;

/// Largest space size for exact vertex enumeration.
pub const MAX_ENUM_POINTS: usize = 10;

/// Convex cone of acceptable functions: explicit generators plus the
/// implicit nonnegative orthant.
#[derive(Debug, Clone)]
pub struct AcceptanceCone {
    space: Arc<MetricSpace>,
    generators: Vec<BoundedFunction>,
}

impl AcceptanceCone {
    pub fn new(space: Arc<MetricSpace>, generators: Vec<BoundedFunction>) -> Result<Self> {
        for g in &generators {
            if !same_space(g.space(), &space) {
                return Err(Error::space_mismatch("acceptance-cone generator"));
            }
            if g.sup_norm() == 0.0 {
                return Err(Error::param("generators", "zero generator is not allowed"));
            }
        }
        Ok(AcceptanceCone { space, generators })
    }

    /// Just the nonnegative functions.
    pub fn nonneg(space: Arc<MetricSpace>) -> Self {
        AcceptanceCone {
            space,
            generators: Vec::new(),
        }
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[BoundedFunction] {
        &self.generators
    }
}

/// Exact vertices of {μ in the simplex : μ(g) ≥ 0 ∀ generators g}, in
/// ascending lexicographic order of their dense weight vectors.
pub fn enumerate_polar_vertices(cone: &AcceptanceCone) -> Result<Vec<Measure>> {
    let d = cone.space.len();
    if d > MAX_ENUM_POINTS {
        return Err(Error::Capacity {
            max: MAX_ENUM_POINTS,
            got: d,
        });
    }
    let rows: Vec<Vec<num_rational::BigRational>> = cone
        .generators
        .iter()
        .map(|g| g.values().iter().map(|&v| rational_from_f64(v)).collect())
        .collect::<Result<_>>()?;
    let vertices = polar_polytope_vertices(&rows, d);
    vertices
        .into_iter()
        .map(|v| {
            let weights = v
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    use num_traits::ToPrimitive;
                    (i, w.to_f64().unwrap_or(0.0))
                })
                .collect();
            Measure::new(cone.space.clone(), weights)
        })
        .collect()
}

/// The scenario set polar to an acceptance cone: vertex form on small
/// spaces, constraint (oracle) form when allowed on larger ones.
pub fn polar_scenario_set(cone: &AcceptanceCone, allow_oracle_form: bool) -> Result<ScenarioSet> {
    if cone.space.len() <= MAX_ENUM_POINTS {
        let vertices = enumerate_polar_vertices(cone)?;
        ScenarioSet::from_vertices(cone.space.clone(), vertices)
    } else if allow_oracle_form {
        Ok(ScenarioSet::from_cone(cone.clone()))
    } else {
        Err(Error::Capacity {
            max: MAX_ENUM_POINTS,
            got: cone.space.len(),
        })
    }
}

/// Outcome of the bipolar membership test.
#[derive(Debug, Clone)]
pub struct BipolarDecision {
    pub accepted: bool,
    /// True when the scenario set is empty, so acceptance is vacuous.
    pub vacuous: bool,
    pub min_value: Option<f64>,
    /// The minimizing measure; a separating witness whenever rejected.
    pub witness: Option<Measure>,
}

/// Accept f iff min_{μ∈S} μ(f) ≥ −[`ACCEPT_TOL`].
pub fn bipolar_membership(f: &BoundedFunction, s: &ScenarioSet) -> Result<BipolarDecision> {
    if s.is_empty()? {
        return Ok(BipolarDecision {
            accepted: true,
            vacuous: true,
            min_value: None,
            witness: None,
        });
    }
    let (value, witness) = s.minimize(f)?;
    Ok(BipolarDecision {
        accepted: value >= -ACCEPT_TOL,
        vacuous: false,
        min_value: Some(value),
        witness: Some(witness),
    })
}

/// Independent membership route: does f = Σ λ_j g_j + s with λ, s ≥ 0 have a
/// solution?  Pure phase-1 feasibility, no polarity involved.
pub fn conic_combination_feasible(cone: &AcceptanceCone, f: &BoundedFunction) -> Result<bool> {
    if !same_space(f.space(), &cone.space) {
        return Err(Error::space_mismatch("conic_combination_feasible"));
    }
    let d = cone.space.len();
    let m = cone.generators.len();
    let mut lp = LinearProgram::new(vec![0.0; m + d]);
    for i in 0..d {
        let mut row = vec![0.0; m + d];
        for (j, g) in cone.generators.iter().enumerate() {
            row[j] = g.value(i);
        }
        row[m + i] = 1.0;
        lp.push(row, Sense::Eq, f.value(i));
    }
    let res = solve_min(&lp)?;
    Ok(res.status == LpStatus::Optimal)
}

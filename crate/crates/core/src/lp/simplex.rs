//! Dense two-phase simplex with Bland's rule, generic over the scalar so the
//! same code runs in f64 (tolerance 1e-9) and in exact rational arithmetic
//! (tolerance 0, guaranteed termination).
//!
//! Problems are stated as min c·x subject to mixed ≥/≤/= rows and per-variable
//! lower bounds; internally variables are shifted to z = x − lb ≥ 0 and rows
//! get slack plus artificial columns.  Keeping the artificial columns in the
//! tableau yields the dual vector for free at the end.

use num_traits::{Num, Signed};

use crate::error::{Error, Result};

/// Feasibility tolerance for floating-point solves.
pub const FEAS_TOL: f64 = 1e-9;

/// Relative duality-gap tolerance certified by [`check_optimal`].
pub const GAP_TOL: f64 = 1e-7;

const MAX_PIVOTS: usize = 50_000;

/// Scalar field the simplex runs over.
pub trait SimplexScalar: Num + Signed + Clone + PartialOrd + std::fmt::Debug {
    /// Comparison tolerance: entries within ±tol of zero count as zero.
    fn tol() -> Self;
}

impl SimplexScalar for f64 {
    fn tol() -> Self {
        FEAS_TOL
    }
}

impl SimplexScalar for num_rational::BigRational {
    fn tol() -> Self {
        num_traits::Zero::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub sense: Sense,
    pub rhs: S,
}

/// min objective·x subject to the rows and x ≥ lower_bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub lower_bounds: Vec<S>,
}

impl<S: SimplexScalar> LinearProgram<S> {
    /// Program over `objective.len()` variables bounded below by zero.
    pub fn new(objective: Vec<S>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![S::zero(); n],
        }
    }

    pub fn push(&mut self, coeffs: Vec<S>, sense: Sense, rhs: S) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver outcome.  `dual` holds one multiplier per constraint at an optimum
/// (Farkas certificate when infeasible); `ray` is an improving direction when
/// unbounded.
#[derive(Debug, Clone)]
pub struct LpResult<S> {
    pub status: LpStatus,
    pub value: Option<S>,
    pub x: Option<Vec<S>>,
    pub dual: Option<Vec<S>>,
    pub ray: Option<Vec<S>>,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>, // m × (total+1), rhs last
    cost: Vec<S>,      // total+1; cost[total] = −objective value
    basis: Vec<usize>,
    total: usize,
}

enum IterEnd {
    Optimal,
    Unbounded { col: usize },
}

impl<S: SimplexScalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in &mut self.rows[r] {
            *v = v.clone() / piv.clone();
        }
        for r2 in 0..self.rows.len() {
            if r2 == r {
                continue;
            }
            let factor = self.rows[r2][c].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.total {
                let delta = factor.clone() * self.rows[r][j].clone();
                self.rows[r2][j] = self.rows[r2][j].clone() - delta;
            }
        }
        let factor = self.cost[c].clone();
        for j in 0..=self.total {
            let delta = factor.clone() * self.rows[r][j].clone();
            self.cost[j] = self.cost[j].clone() - delta;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: smallest eligible entering column, ties in the ratio
    /// test broken by the smallest basis variable.
    fn iterate(&mut self, banned_from: usize) -> Result<IterEnd> {
        let tol = S::tol();
        let neg_tol = tol.clone().neg();
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.total)
                .find(|&j| j < banned_from && self.cost[j] < neg_tol);
            let Some(col) = entering else {
                return Ok(IterEnd::Optimal);
            };
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col] <= tol {
                    continue;
                }
                let ratio = self.rows[r][self.total].clone() / self.rows[r][col].clone();
                let better = match &leave {
                    None => true,
                    Some((br, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Ok(IterEnd::Unbounded { col }),
            }
        }
        Err(Error::IterationLimit(MAX_PIVOTS))
    }
}

/// Minimize `lp.objective · x` over the rows of `lp`.
pub fn solve_min<S: SimplexScalar>(lp: &LinearProgram<S>) -> Result<LpResult<S>> {
    let n = lp.objective.len();
    if n == 0 {
        return Err(Error::param("objective", "program has no variables"));
    }
    if lp.lower_bounds.len() != n {
        return Err(Error::LengthMismatch {
            context: "lower bounds",
            expected: n,
            got: lp.lower_bounds.len(),
        });
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::LengthMismatch {
                context: "constraint coefficients",
                expected: n,
                got: lp.constraints[i].coeffs.len(),
            });
        }
    }

    let m = lp.constraints.len();
    let n_slack = lp
        .constraints
        .iter()
        .filter(|c| c.sense != Sense::Eq)
        .count();
    let art_start = n + n_slack;
    let total = art_start + m;
    let tol = S::tol();

    let mut rows: Vec<Vec<S>> = vec![vec![S::zero(); total + 1]; m];
    let mut negated = vec![false; m];
    let mut next_slack = n;
    for (r, con) in lp.constraints.iter().enumerate() {
        for j in 0..n {
            rows[r][j] = con.coeffs[j].clone();
        }
        // Shift x = z + lb into the right-hand side.
        let mut rhs = con.rhs.clone();
        for j in 0..n {
            rhs = rhs - con.coeffs[j].clone() * lp.lower_bounds[j].clone();
        }
        match con.sense {
            Sense::Ge => {
                rows[r][next_slack] = S::one().neg();
                next_slack += 1;
            }
            Sense::Le => {
                rows[r][next_slack] = S::one();
                next_slack += 1;
            }
            Sense::Eq => {}
        }
        rows[r][total] = rhs;
        if rows[r][total] < S::zero() {
            for v in &mut rows[r] {
                *v = v.clone().neg();
            }
            negated[r] = true;
        }
        rows[r][art_start + r] = S::one();
    }

    let mut t = Tableau {
        cost: {
            // Phase-1 reduced costs with the all-artificial basis.
            let mut cost = vec![S::zero(); total + 1];
            for row in &rows {
                for (j, v) in row.iter().enumerate() {
                    if j < art_start || j == total {
                        cost[j] = cost[j].clone() - v.clone();
                    }
                }
            }
            cost
        },
        rows,
        basis: (0..m).map(|r| art_start + r).collect(),
        total,
    };
    // Track which original constraint each live row came from.
    let mut orig_row: Vec<usize> = (0..m).collect();

    match t.iterate(art_start)? {
        IterEnd::Optimal => {}
        IterEnd::Unbounded { .. } => {
            unreachable!("phase-1 objective is bounded below by zero")
        }
    }
    let phase1 = t.cost[total].clone().neg();
    if phase1 > tol {
        // Farkas certificate from the phase-1 duals, re-oriented to the
        // original rows.
        let mut dual = vec![S::zero(); m];
        for (i, d) in dual.iter_mut().enumerate() {
            let y = S::one() - t.cost[art_start + i].clone();
            *d = if negated[i] { y.neg() } else { y };
        }
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            value: None,
            x: None,
            dual: Some(dual),
            ray: None,
        });
    }

    // Drive artificials out of the basis; rows that cannot pivot are
    // redundant and get dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < art_start {
            r += 1;
            continue;
        }
        let col = (0..art_start).find(|&j| t.rows[r][j].abs() > tol);
        match col {
            Some(c) => {
                t.pivot(r, c);
                r += 1;
            }
            None => {
                t.rows.remove(r);
                t.basis.remove(r);
                orig_row.remove(r);
            }
        }
    }

    // Phase 2: rebuild reduced costs for the real objective.
    let cost_of = |j: usize| -> S {
        if j < n {
            lp.objective[j].clone()
        } else {
            S::zero()
        }
    };
    let mut cost = vec![S::zero(); total + 1];
    for j in 0..=total {
        let mut v = if j < total { cost_of(j) } else { S::zero() };
        for (r, row) in t.rows.iter().enumerate() {
            v = v - cost_of(t.basis[r]) * row[j].clone();
        }
        cost[j] = v;
    }
    t.cost = cost;

    match t.iterate(art_start)? {
        IterEnd::Optimal => {}
        IterEnd::Unbounded { col } => {
            let mut dir = vec![S::zero(); total];
            dir[col] = S::one();
            for (r, &b) in t.basis.iter().enumerate() {
                dir[b] = t.rows[r][col].clone().neg();
            }
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                value: None,
                x: None,
                dual: None,
                ray: Some(dir[..n].to_vec()),
            });
        }
    }

    let mut z = vec![S::zero(); total];
    for (r, &b) in t.basis.iter().enumerate() {
        z[b] = t.rows[r][t.total].clone();
    }
    let x: Vec<S> = (0..n)
        .map(|j| z[j].clone() + lp.lower_bounds[j].clone())
        .collect();
    let mut value = S::zero();
    for j in 0..n {
        value = value + lp.objective[j].clone() * x[j].clone();
    }
    let mut dual = vec![S::zero(); m];
    for &orig in &orig_row {
        let y = t.cost[art_start + orig].clone().neg();
        dual[orig] = if negated[orig] { y.neg() } else { y };
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        value: Some(value),
        x: Some(x),
        dual: Some(dual),
        ray: None,
    })
}

/// Among all optimizers, return the lexicographically smallest vertex by
/// sequentially pinning the objective, then each coordinate in turn.
pub fn solve_min_lex<S: SimplexScalar>(lp: &LinearProgram<S>) -> Result<LpResult<S>> {
    let base = solve_min(lp)?;
    if base.status != LpStatus::Optimal {
        return Ok(base);
    }
    let n = lp.objective.len();
    let mut work = lp.clone();
    work.push(
        lp.objective.clone(),
        Sense::Eq,
        base.value.clone().expect("optimal"),
    );
    let mut best = base.x.clone().expect("optimal");
    for j in 0..n {
        let mut stage = work.clone();
        stage.objective = vec![S::zero(); n];
        stage.objective[j] = S::one();
        let r = solve_min(&stage)?;
        match (r.status, r.x) {
            (LpStatus::Optimal, Some(x)) => {
                work.push(stage.objective, Sense::Eq, x[j].clone());
                best = x;
            }
            // Numerical wobble: keep the plain optimizer.
            _ => break,
        }
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        value: base.value,
        x: Some(best),
        dual: base.dual,
        ray: None,
    })
}

/// Certify an optimal float result: primal residuals within [`FEAS_TOL`]
/// (scaled by the row magnitude) and relative duality gap within [`GAP_TOL`].
pub fn check_optimal(lp: &LinearProgram<f64>, res: &LpResult<f64>) -> Result<()> {
    if res.status != LpStatus::Optimal {
        return Err(Error::param("result", "check_optimal expects an optimal result"));
    }
    let x = res.x.as_ref().expect("optimal");
    let y = res.dual.as_ref().expect("optimal");
    for (j, (&xj, &lb)) in x.iter().zip(&lp.lower_bounds).enumerate() {
        if xj < lb - FEAS_TOL {
            return Err(Error::param(
                "result",
                format!("variable {j} violates its lower bound: {xj} < {lb}"),
            ));
        }
    }
    for (i, con) in lp.constraints.iter().enumerate() {
        let ax: f64 = con.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        let scale = 1.0 + con.rhs.abs();
        let bad = match con.sense {
            Sense::Ge => ax < con.rhs - FEAS_TOL * scale,
            Sense::Le => ax > con.rhs + FEAS_TOL * scale,
            Sense::Eq => (ax - con.rhs).abs() > FEAS_TOL * scale,
        };
        if bad {
            return Err(Error::param(
                "result",
                format!("row {i} infeasible: a·x = {ax}, rhs = {}", con.rhs),
            ));
        }
    }
    // Strong duality on the lb-shifted problem: c·x − c·lb = Σ y_i (b_i − a_i·lb).
    let primal = res.value.expect("optimal");
    let c_lb: f64 = lp
        .objective
        .iter()
        .zip(&lp.lower_bounds)
        .map(|(c, l)| c * l)
        .sum();
    let mut dual_value = c_lb;
    for (i, con) in lp.constraints.iter().enumerate() {
        let a_lb: f64 = con
            .coeffs
            .iter()
            .zip(&lp.lower_bounds)
            .map(|(a, l)| a * l)
            .sum();
        dual_value += y[i] * (con.rhs - a_lb);
    }
    let gap = (primal - dual_value).abs();
    if gap > GAP_TOL * (1.0 + primal.abs()) {
        return Err(Error::param(
            "result",
            format!("duality gap {gap} between primal {primal} and dual {dual_value}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn simplex_program(costs: &[f64]) -> LinearProgram<f64> {
        let mut lp = LinearProgram::new(costs.to_vec());
        lp.push(vec![1.0; costs.len()], Sense::Eq, 1.0);
        lp
    }

    #[test]
    fn min_over_simplex_picks_smallest_coordinate() {
        let lp = simplex_program(&[3.0, 1.0, 2.0]);
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value, Some(1.0));
        assert_eq!(res.x, Some(vec![0.0, 1.0, 0.0]));
        check_optimal(&lp, &res).unwrap();
        // The simplex row has dual multiplier equal to the optimal value.
        assert!((res.dual.unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_simplex_boundary_optimum() {
        let mut lp = simplex_program(&[0.0, 1.0]);
        lp.push(vec![1.0, -1.0], Sense::Ge, 0.0);
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value, Some(0.0));
        assert_eq!(res.x, Some(vec![1.0, 0.0]));
        check_optimal(&lp, &res).unwrap();
    }

    #[test]
    fn contradictory_rows_are_infeasible_with_certificate() {
        let mut lp = simplex_program(&[0.0, 0.0]);
        lp.push(vec![1.0, 0.0], Sense::Ge, 0.7);
        lp.push(vec![1.0, 0.0], Sense::Le, 0.2);
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Infeasible);
        let y = res.dual.unwrap();
        assert_eq!(y.len(), 3);
        // Farkas check in ≥-orientation: flip y on ≤ rows, then y ≥ 0,
        // yᵀA ≤ 0 is not required here (equality row is free) — instead
        // verify the aggregated inequality is contradictory: yᵀb > 0 while
        // the aggregated row is dominated by a nonpositive combination.
        let b = [1.0, 0.7, 0.2];
        let agg: f64 = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
        assert!(agg > 1e-9, "certificate should expose positive gap, got {agg}");
    }

    #[test]
    fn unbounded_direction_reported() {
        let lp = LinearProgram::new(vec![-1.0, 0.0]);
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Unbounded);
        assert_eq!(res.ray, Some(vec![1.0, 0.0]));
    }

    #[test]
    fn lower_bounds_shift_the_optimum() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.lower_bounds = vec![-3.0];
        lp.push(vec![1.0], Sense::Le, 5.0);
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value, Some(-3.0));
        assert_eq!(res.x, Some(vec![-3.0]));
        check_optimal(&lp, &res).unwrap();
    }

    #[test]
    fn negative_lower_bounds_with_equality() {
        // min x + y, x + y = 1, x,y ≥ −1 → value 1, lex-smallest at (−1, 2).
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.lower_bounds = vec![-1.0, -1.0];
        lp.push(vec![1.0, 1.0], Sense::Eq, 1.0);
        let res = solve_min_lex(&lp).unwrap();
        assert_eq!(res.value, Some(1.0));
        assert_eq!(res.x, Some(vec![-1.0, 2.0]));
    }

    #[test]
    fn degenerate_tie_resolved_lexicographically() {
        let lp = simplex_program(&[0.0, 0.0, 0.0]);
        let res = solve_min_lex(&lp).unwrap();
        assert_eq!(res.x, Some(vec![0.0, 0.0, 1.0]));
        assert_eq!(res.value, Some(0.0));
    }

    #[test]
    fn redundant_rows_are_dropped_not_fatal() {
        let mut lp = simplex_program(&[1.0, 2.0]);
        lp.push(vec![1.0, 1.0], Sense::Eq, 1.0); // duplicate of the simplex row
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value, Some(1.0));
        assert_eq!(res.x, Some(vec![1.0, 0.0]));
    }

    #[test]
    fn rational_solve_is_exact() {
        let mut lp: LinearProgram<BigRational> =
            LinearProgram::new(vec![rat(0, 1), rat(1, 1)]);
        lp.push(vec![rat(1, 1), rat(1, 1)], Sense::Eq, rat(1, 1));
        lp.push(vec![rat(1, 1), rat(-1, 1)], Sense::Ge, rat(0, 1));
        let res = solve_min(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value, Some(rat(0, 1)));
        assert_eq!(res.x, Some(vec![rat(1, 1), rat(0, 1)]));

        // Fractional optimum: min x₂ − x₁ over the same half-simplex.
        let mut lp2: LinearProgram<BigRational> =
            LinearProgram::new(vec![rat(-1, 1), rat(1, 1)]);
        lp2.push(vec![rat(1, 1), rat(1, 1)], Sense::Eq, rat(1, 1));
        lp2.push(vec![rat(-1, 1), rat(3, 1)], Sense::Ge, rat(0, 1));
        // x₁ ≤ 3x₂ and x₁+x₂ = 1 → x₁ ≤ 3/4; min of x₂−x₁ = 1−2x₁ at x₁ = 3/4.
        let res2 = solve_min(&lp2).unwrap();
        assert_eq!(res2.value, Some(rat(-1, 2)));
        assert_eq!(res2.x, Some(vec![rat(3, 4), rat(1, 4)]));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut lp = simplex_program(&[1.0, 2.0]);
        lp.push(vec![1.0], Sense::Ge, 0.0);
        assert!(solve_min(&lp).is_err());
        let mut lp2 = simplex_program(&[1.0, 2.0]);
        lp2.lower_bounds = vec![0.0];
        assert!(solve_min(&lp2).is_err());
    }

    #[test]
    fn determinism_same_input_same_vertex() {
        let mut lp = simplex_program(&[1.0, 1.0, 1.0, 1.0]);
        lp.push(vec![1.0, -1.0, 0.5, 0.0], Sense::Ge, 0.0);
        lp.push(vec![0.0, 1.0, -1.0, 0.25], Sense::Ge, 0.0);
        let a = solve_min(&lp).unwrap();
        let b = solve_min(&lp).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }
}

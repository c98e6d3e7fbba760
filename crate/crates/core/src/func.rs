//! Bounded functions on sampled spaces and the explicit constructions built
//! from them: Lipschitz envelopes, boundary-power decreasing sequences,
//! stationary sequences with their witness function, and bump families with
//! pairwise disjoint supports.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{dist_to_set, same_space, CompactificationPair, MetricSpace};

/// Real values on the points of a space, with cached sup-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedFunction {
    space: Arc<MetricSpace>,
    values: Vec<f64>,
    sup_norm: f64,
}

impl BoundedFunction {
    pub fn new(space: Arc<MetricSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                context: "function values",
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite value {bad}")));
        }
        let sup_norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(BoundedFunction {
            space,
            values,
            sup_norm,
        })
    }

    pub fn constant(space: Arc<MetricSpace>, a: f64) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![a; n])
    }

    pub fn zero(space: Arc<MetricSpace>) -> Self {
        Self::constant(space, 0.0).expect("zero is finite")
    }

    pub fn from_fn(space: Arc<MetricSpace>, f: impl FnMut(usize) -> f64) -> Result<Self> {
        let values = (0..space.len()).map(f).collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ‖f‖ = max |f(x)|.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn neg(&self) -> Self {
        let values = self.values.iter().map(|v| -v).collect();
        BoundedFunction {
            space: self.space.clone(),
            values,
            sup_norm: self.sup_norm,
        }
    }

    pub fn abs(&self) -> Self {
        Self::new(self.space.clone(), self.values.iter().map(|v| v.abs()).collect())
            .expect("abs of finite is finite")
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.values.iter().map(|v| c * v).collect())
    }

    pub fn shift(&self, a: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.values.iter().map(|v| v + a).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, "sub", |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, "mul", |a, b| a * b)
    }

    pub fn pointwise_max(&self, other: &Self) -> Result<Self> {
        self.zip(other, "pointwise_max", f64::max)
    }

    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        self.zip(other, "pointwise_min", f64::min)
    }

    /// Pointwise f ≤ g.
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check_space(other, "le")?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    fn zip(&self, other: &Self, context: &'static str, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_space(other, context)?;
        Self::new(
            self.space.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        )
    }

    fn check_space(&self, other: &Self, context: &'static str) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::space_mismatch(context))
        }
    }
}

/// Largest n-Lipschitz minorant: g_n(x) = min_y { f(y) + n·d(x,y) }.
pub fn lipschitz_envelope(f: &BoundedFunction, n: f64) -> Result<BoundedFunction> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::param("n", format!("Lipschitz level must be positive, got {n}")));
    }
    let space = f.space();
    let values = (0..space.len())
        .map(|x| {
            (0..space.len())
                .map(|y| f.value(y) + n * space.dist(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    BoundedFunction::new(space.clone(), values)
}

/// Smallest n-Lipschitz majorant: h_n = −g_n(−f).
pub fn upper_envelope(f: &BoundedFunction, n: f64) -> Result<BoundedFunction> {
    Ok(lipschitz_envelope(&f.neg(), n)?.neg())
}

/// Measured Lipschitz constant over the sampled metric: max |Δf|/d.
pub fn lipschitz_constant(f: &BoundedFunction) -> f64 {
    let space = f.space();
    let mut best = 0.0_f64;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            best = best.max((f.value(i) - f.value(j)).abs() / space.dist(i, j));
        }
    }
    best
}

/// A pointwise-decreasing sequence f_1 ≥ f_2 ≥ … ≥ limit, stored on the
/// interior (evaluation) space, optionally with an ambient view for utilities
/// that read boundary points.
///
/// Monotonicity is validated exactly; callers building power sequences should
/// iterate multiplication (p ← p·x) rather than call pow, which rounding does
/// not keep monotone across exponents.
#[derive(Debug, Clone)]
pub struct DecreasingSequence {
    terms: Vec<BoundedFunction>,
    limit: BoundedFunction,
    ambient_terms: Option<Vec<BoundedFunction>>,
    ambient_limit: Option<BoundedFunction>,
}

impl DecreasingSequence {
    pub fn new(terms: Vec<BoundedFunction>, limit: BoundedFunction) -> Result<Self> {
        Self::with_ambient(terms, limit, None, None)
    }

    pub fn with_ambient(
        terms: Vec<BoundedFunction>,
        limit: BoundedFunction,
        ambient_terms: Option<Vec<BoundedFunction>>,
        ambient_limit: Option<BoundedFunction>,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("terms", "sequence must have at least one term"));
        }
        validate_decreasing(&terms, &limit)?;
        match (&ambient_terms, &ambient_limit) {
            (None, None) => {}
            (Some(at), Some(al)) => {
                if at.len() != terms.len() {
                    return Err(Error::LengthMismatch {
                        context: "ambient terms",
                        expected: terms.len(),
                        got: at.len(),
                    });
                }
                validate_decreasing(at, al)?;
            }
            _ => {
                return Err(Error::param(
                    "ambient",
                    "ambient terms and ambient limit must be supplied together",
                ))
            }
        }
        Ok(DecreasingSequence {
            terms,
            limit,
            ambient_terms,
            ambient_limit,
        })
    }

    /// Number of terms (the declared horizon M_max).
    pub fn horizon(&self) -> usize {
        self.terms.len()
    }

    /// Terms in order; index i holds f_{i+1}.
    pub fn terms(&self) -> &[BoundedFunction] {
        &self.terms
    }

    pub fn limit(&self) -> &BoundedFunction {
        &self.limit
    }

    pub fn ambient_terms(&self) -> Option<&[BoundedFunction]> {
        self.ambient_terms.as_deref()
    }

    pub fn ambient_limit(&self) -> Option<&BoundedFunction> {
        self.ambient_limit.as_ref()
    }
}

fn validate_decreasing(terms: &[BoundedFunction], limit: &BoundedFunction) -> Result<()> {
    for w in terms.windows(2) {
        if !w[1].le(&w[0])? {
            return Err(Error::param("terms", "sequence is not pointwise decreasing"));
        }
    }
    for (m, t) in terms.iter().enumerate() {
        if !limit.le(t)? {
            return Err(Error::param(
                "limit",
                format!("term {} drops below the declared limit", m + 1),
            ));
        }
    }
    Ok(())
}

/// The decreasing family f_m = f + k·φ^m for the bump φ of one boundary set.
///
/// `f` may live on the ambient space (the usual case; both views are kept) or
/// directly on the interior space (interior view only).
pub fn boundary_power_sequence(
    pair: &CompactificationPair,
    f: &BoundedFunction,
    k: f64,
    boundary_index: usize,
    m_max: usize,
) -> Result<DecreasingSequence> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::param("k", format!("k must be positive, got {k}")));
    }
    if m_max < 1 {
        return Err(Error::param("M_max", "horizon must be at least 1"));
    }
    let phi = pair.bump(boundary_index)?;
    let ambient_input = same_space(f.space(), pair.ambient());
    if !ambient_input && !same_space(f.space(), pair.interior_space()) {
        return Err(Error::space_mismatch(
            "boundary_power_sequence expects f on the pair's ambient or interior space",
        ));
    }

    let phi_view = if ambient_input {
        phi.clone()
    } else {
        pair.restrict(phi)?
    };
    let mut terms = Vec::with_capacity(m_max);
    let mut power = phi_view.clone();
    for m in 0..m_max {
        if m > 0 {
            // Iterated multiplication keeps φ^m monotone under rounding.
            power = power
                .zip(&phi_view, "bump power", |p, q| p * q)
                .expect("same space");
        }
        terms.push(f.add(&power.scale(k)?)?);
    }

    if ambient_input {
        let interior_terms = terms
            .iter()
            .map(|t| pair.restrict(t))
            .collect::<Result<Vec<_>>>()?;
        DecreasingSequence::with_ambient(
            interior_terms,
            pair.restrict(f)?,
            Some(terms),
            Some(f.clone()),
        )
    } else {
        DecreasingSequence::new(terms, f.clone())
    }
}

/// Output of `stationary_sequence`: the clipped terms g_n, the index sets
/// G_n = {x : g_n(x) > f(x)}, and the witness F.
#[derive(Debug, Clone)]
pub struct StationarySequenceResult {
    pub g: Vec<BoundedFunction>,
    pub g_sets: Vec<Vec<usize>>,
    pub witness: BoundedFunction,
}

/// g_n = max(f, f_n − δ); verifies the G_n decrease and that every point is
/// stationary (g = f) by the end of the horizon, then builds the witness.
pub fn stationary_sequence(
    seq: &DecreasingSequence,
    delta: f64,
) -> Result<StationarySequenceResult> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("delta must be positive, got {delta}")));
    }
    let f = seq.limit();
    let mut g = Vec::with_capacity(seq.horizon());
    let mut g_sets: Vec<Vec<usize>> = Vec::with_capacity(seq.horizon());
    for term in seq.terms() {
        let clipped = f.pointwise_max(&term.shift(-delta)?)?;
        let set: Vec<usize> = (0..clipped.len())
            .filter(|&x| clipped.value(x) > f.value(x))
            .collect();
        if let Some(prev) = g_sets.last() {
            if !set.iter().all(|x| prev.binary_search(x).is_ok()) {
                return Err(Error::param("seq", "index sets G_n fail to decrease"));
            }
        }
        g.push(clipped);
        g_sets.push(set);
    }
    let witness = witness_function(f, &g)?;
    Ok(StationarySequenceResult { g, g_sets, witness })
}

/// F(x) = min over n ≤ horizon of (n+1)·f(x) − n·g_n(x).
///
/// Requires g_n ≥ f pointwise and stationarity at the horizon (g_last = f
/// exactly); otherwise the value would depend on the horizon.
pub fn witness_function(f: &BoundedFunction, g: &[BoundedFunction]) -> Result<BoundedFunction> {
    if g.is_empty() {
        return Err(Error::param("g", "need at least one term"));
    }
    for gn in g {
        if !f.le(gn)? {
            return Err(Error::param("g", "every g_n must dominate f pointwise"));
        }
    }
    let last = g.last().expect("nonempty");
    for x in 0..f.len() {
        if last.value(x) != f.value(x) {
            return Err(Error::StationarityNotReached {
                point: f.space().id(x).to_string(),
                horizon: g.len(),
            });
        }
    }
    BoundedFunction::from_fn(f.space().clone(), |x| {
        g.iter()
            .enumerate()
            .map(|(i, gn)| {
                let n = (i + 1) as f64;
                (n + 1.0) * f.value(x) - n * gn.value(x)
            })
            .fold(f64::INFINITY, f64::min)
    })
}

/// Bumps ψ_n with pairwise disjoint supports around an ordered list of
/// centers, radii shrinking at least geometrically.
#[derive(Debug, Clone)]
pub struct BumpFamily {
    space: Arc<MetricSpace>,
    centers: Vec<usize>,
    radii: Vec<f64>,
    functions: Vec<BoundedFunction>,
    balls: Vec<Vec<usize>>,
}

impl BumpFamily {
    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn center(&self, n: usize) -> usize {
        self.centers[n]
    }

    /// Radius η_{n+1} of the n-th ball (0-based position).
    pub fn radius(&self, n: usize) -> f64 {
        self.radii[n]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn psi(&self, n: usize) -> &BoundedFunction {
        &self.functions[n]
    }

    pub fn functions(&self) -> &[BoundedFunction] {
        &self.functions
    }

    /// Index set of the open ball O_n around the n-th center.
    pub fn ball(&self, n: usize) -> &[usize] {
        &self.balls[n]
    }
}

/// Deterministic η recursion: η_1 is half its ¼-distance bound, later radii
/// take min(η_{k−1}/2, ¼·dist to later centers), the last center halves its
/// predecessor.  ψ_n(x) = min(dist(x, O_n^c), dist(x_n, O_n^c)) / dist(x_n, O_n^c).
pub fn bump_family(space: &Arc<MetricSpace>, centers: &[usize]) -> Result<BumpFamily> {
    if centers.is_empty() {
        return Err(Error::param("centers", "need at least one center"));
    }
    {
        let mut seen = centers.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != centers.len() {
            return Err(Error::param("centers", "centers must be distinct"));
        }
        if seen.last().is_some_and(|&c| c >= space.len()) {
            return Err(Error::param("centers", "center index out of range"));
        }
    }

    let k_count = centers.len();
    let mut radii: Vec<f64> = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let later = &centers[k + 1..];
        let quarter_bound = if later.is_empty() {
            // Final center (or singleton family): fall back to the distance
            // to the rest of the space so the ball stays proper.
            let rest: Vec<usize> = (0..space.len()).filter(|&p| p != centers[k]).collect();
            if rest.is_empty() {
                return Err(Error::DegenerateBall {
                    center: space.id(centers[k]).to_string(),
                });
            }
            0.25 * dist_to_set(space, centers[k], &rest)?
        } else {
            0.25 * dist_to_set(space, centers[k], later)?
        };
        let eta = if k == 0 {
            quarter_bound / 2.0
        } else if k + 1 == k_count {
            radii[k - 1] / 2.0
        } else {
            (radii[k - 1] / 2.0).min(quarter_bound)
        };
        if !(eta > 0.0) {
            return Err(Error::param(
                "centers",
                format!(
                    "center `{}` has zero distance to the later centers",
                    space.id(centers[k])
                ),
            ));
        }
        radii.push(eta);
    }

    let mut functions = Vec::with_capacity(k_count);
    let mut balls = Vec::with_capacity(k_count);
    for (k, &c) in centers.iter().enumerate() {
        let ball: Vec<usize> = (0..space.len())
            .filter(|&y| space.dist(c, y) < radii[k])
            .collect();
        let complement: Vec<usize> = (0..space.len())
            .filter(|&y| space.dist(c, y) >= radii[k])
            .collect();
        if complement.is_empty() {
            return Err(Error::DegenerateBall {
                center: space.id(c).to_string(),
            });
        }
        let denom = dist_to_set(space, c, &complement)?;
        if denom <= 0.0 {
            return Err(Error::DegenerateBall {
                center: space.id(c).to_string(),
            });
        }
        let psi = BoundedFunction::from_fn(space.clone(), |x| {
            let d = dist_to_set(space, x, &complement).expect("complement nonempty");
            d.min(denom) / denom
        })?;
        functions.push(psi);
        balls.push(ball);
    }

    // Disjoint supports come from the radius recursion; verify anyway.
    for a in 0..k_count {
        for b in (a + 1)..k_count {
            for x in 0..space.len() {
                if functions[a].value(x) > 0.0 && functions[b].value(x) > 0.0 {
                    return Err(Error::param(
                        "centers",
                        format!("bump supports {a} and {b} overlap at `{}`", space.id(x)),
                    ));
                }
            }
        }
    }

    Ok(BumpFamily {
        space: space.clone(),
        centers: centers.to_vec(),
        radii,
        functions,
        balls,
    })
}

/// Σ_{n ≤ N} a_n ψ_n; disjoint supports make at most one term active anywhere.
pub fn bump_sum(fam: &BumpFamily, coeffs: &[f64], n: usize) -> Result<BoundedFunction> {
    if n > fam.len() {
        return Err(Error::param(
            "N",
            format!("truncation {n} exceeds family size {}", fam.len()),
        ));
    }
    if coeffs.len() < n {
        return Err(Error::LengthMismatch {
            context: "bump coefficients",
            expected: n,
            got: coeffs.len(),
        });
    }
    let mut acc = BoundedFunction::zero(fam.space().clone());
    for i in 0..n {
        acc = acc.add(&fam.psi(i).scale(coeffs[i])?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{sample_interval, MetricSpace};

    fn line3() -> Arc<MetricSpace> {
        MetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
            ],
            None,
        )
        .unwrap()
    }

    fn int_line(n: usize) -> Arc<MetricSpace> {
        let coords: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        MetricSpace::new(
            (1..=n).map(|i| format!("x{i}")).collect(),
            coords
                .iter()
                .map(|&a| coords.iter().map(|&b| (a - b).abs()).collect())
                .collect(),
            Some(coords.clone()),
        )
        .unwrap()
    }

    #[test]
    fn sup_norm_cached() {
        let f = BoundedFunction::new(line3(), vec![-4.0, 1.0, 3.0]).unwrap();
        assert_eq!(f.sup_norm(), 4.0);
        assert!(BoundedFunction::new(line3(), vec![f64::NAN, 0.0, 0.0]).is_err());
        assert!(BoundedFunction::new(line3(), vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn envelope_spike_on_line() {
        let f = BoundedFunction::new(line3(), vec![0.0, 3.0, 0.0]).unwrap();
        let g1 = lipschitz_envelope(&f, 1.0).unwrap();
        assert_eq!(g1.values(), &[0.0, 1.0, 0.0]);
        let g3 = lipschitz_envelope(&f, 3.0).unwrap();
        assert_eq!(g3.values(), f.values());
        let h1 = upper_envelope(&f, 1.0).unwrap();
        assert_eq!(h1.values(), &[2.0, 3.0, 2.0]);
        let h3 = upper_envelope(&f, 3.0).unwrap();
        assert_eq!(h3.values(), f.values());
    }

    #[test]
    fn envelope_fixes_constants() {
        let f = BoundedFunction::constant(line3(), 2.5).unwrap();
        for n in [0.1, 1.0, 7.0] {
            assert_eq!(lipschitz_envelope(&f, n).unwrap().values(), f.values());
            assert_eq!(upper_envelope(&f, n).unwrap().values(), f.values());
        }
    }

    #[test]
    fn envelope_rejects_bad_level() {
        let f = BoundedFunction::constant(line3(), 0.0).unwrap();
        assert!(lipschitz_envelope(&f, 0.0).is_err());
        assert!(lipschitz_envelope(&f, -1.0).is_err());
    }

    #[test]
    fn lipschitz_constant_of_spike() {
        let f = BoundedFunction::new(line3(), vec![0.0, 3.0, 0.0]).unwrap();
        assert_eq!(lipschitz_constant(&f), 3.0);
        let c = BoundedFunction::constant(line3(), 9.0).unwrap();
        assert_eq!(lipschitz_constant(&c), 0.0);
    }

    #[test]
    fn boundary_power_at_half() {
        let pair = sample_interval(3, true).unwrap();
        let f = BoundedFunction::zero(pair.ambient().clone());
        let seq = boundary_power_sequence(&pair, &f, 2.0, 1, 20).unwrap();
        // Ambient index 2 is x = 0.5, interior position 1.
        let ambient = seq.ambient_terms().unwrap();
        assert_eq!(ambient[0].value(2), 1.0);
        assert_eq!(ambient[1].value(2), 0.5);
        assert_eq!(seq.terms()[0].value(1), 1.0);
        // φ = 0 at the far boundary point x = 0.
        assert_eq!(ambient[0].value(0), 0.0);
        // Strictly decreasing where φ > 0 over the whole horizon.
        for m in 1..20 {
            assert!(ambient[m].value(2) < ambient[m - 1].value(2));
        }
        assert_eq!(seq.horizon(), 20);
    }

    #[test]
    fn boundary_power_accepts_interior_functions() {
        let pair = sample_interval(3, true).unwrap();
        let f = BoundedFunction::zero(pair.interior_space().clone());
        let seq = boundary_power_sequence(&pair, &f, 1.0, 0, 5).unwrap();
        assert!(seq.ambient_terms().is_none());
        assert_eq!(seq.terms()[0].value(0), 0.75); // φ₀ at x = 0.25
    }

    #[test]
    fn decreasing_sequence_rejects_increase() {
        let s = line3();
        let lo = BoundedFunction::constant(s.clone(), 0.0).unwrap();
        let hi = BoundedFunction::constant(s.clone(), 1.0).unwrap();
        assert!(DecreasingSequence::new(vec![lo.clone(), hi.clone()], lo.clone()).is_err());
        assert!(DecreasingSequence::new(vec![hi.clone(), lo.clone()], lo.clone()).is_ok());
        // Limit above the terms is rejected too.
        assert!(DecreasingSequence::new(vec![lo.clone()], hi).is_err());
    }

    #[test]
    fn stationary_sequence_on_interior_grid() {
        let pair = sample_interval(3, false).unwrap();
        let space = pair.interior_space().clone();
        let f = BoundedFunction::zero(space.clone());
        // f_n(x) = x^n via iterated multiplication.
        let xs = BoundedFunction::from_fn(space.clone(), |i| space.label(i).unwrap()).unwrap();
        let mut terms = Vec::new();
        let mut p = xs.clone();
        for m in 0..12 {
            if m > 0 {
                p = p.zip(&xs, "pow", |a, b| a * b).unwrap();
            }
            terms.push(p.clone());
        }
        let seq = DecreasingSequence::new(terms.clone(), f.clone()).unwrap();
        let res = stationary_sequence(&seq, 0.1).unwrap();
        // x = 0.5 (index 1): g_n = 0 from n = 4 on.
        assert!(res.g[2].value(1) > 0.0);
        for n in 3..12 {
            assert_eq!(res.g[n].value(1), 0.0);
        }
        // Nested index sets, empty at the horizon.
        for w in res.g_sets.windows(2) {
            assert!(w[1].iter().all(|x| w[0].contains(x)));
        }
        assert!(res.g_sets.last().unwrap().is_empty());
        // Witness at x = 0.5: min over n ≤ 3 of −n(0.5^n − 0.1).
        let expected = (1..=3i32)
            .map(|n| -f64::from(n) * (0.5f64.powi(n) - 0.1))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(res.witness.value(1), expected);
        assert!((res.witness.value(1) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn stationarity_failure_names_the_point() {
        let pair = sample_interval(3, false).unwrap();
        let space = pair.interior_space().clone();
        let f = BoundedFunction::zero(space.clone());
        let terms = vec![BoundedFunction::constant(space.clone(), 1.0).unwrap(); 4];
        let seq = DecreasingSequence::new(terms, f).unwrap();
        match stationary_sequence(&seq, 0.1) {
            Err(Error::StationarityNotReached { point, horizon }) => {
                assert_eq!(point, "p0");
                assert_eq!(horizon, 4);
            }
            other => panic!("expected stationarity error, got {other:?}"),
        }
    }

    #[test]
    fn constant_sequence_is_trivially_stationary() {
        let s = line3();
        let f = BoundedFunction::new(s.clone(), vec![1.0, -2.0, 0.5]).unwrap();
        let seq = DecreasingSequence::new(vec![f.clone(); 3], f.clone()).unwrap();
        let res = stationary_sequence(&seq, 0.25).unwrap();
        assert!(res.g_sets.iter().all(Vec::is_empty));
        assert_eq!(res.witness.values(), f.values());
    }

    #[test]
    fn witness_single_point_example() {
        let one = MetricSpace::new(vec!["o".into()], vec![vec![0.0]], None).unwrap();
        let f = BoundedFunction::zero(one.clone());
        let g: Vec<BoundedFunction> = [1.0, 0.0, 0.0]
            .iter()
            .map(|&v| BoundedFunction::constant(one.clone(), v).unwrap())
            .collect();
        let w = witness_function(&f, &g).unwrap();
        assert_eq!(w.value(0), -1.0);
    }

    #[test]
    fn witness_requires_domination_and_stationarity() {
        let one = MetricSpace::new(vec!["o".into()], vec![vec![0.0]], None).unwrap();
        let f = BoundedFunction::zero(one.clone());
        let below = BoundedFunction::constant(one.clone(), -1.0).unwrap();
        assert!(witness_function(&f, &[below]).is_err());
        let above = BoundedFunction::constant(one.clone(), 1.0).unwrap();
        assert!(matches!(
            witness_function(&f, &[above]),
            Err(Error::StationarityNotReached { .. })
        ));
    }

    #[test]
    fn bump_family_integer_line_radii() {
        let space = int_line(5);
        let fam = bump_family(&space, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(
            fam.radii(),
            &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        );
        for n in 0..5 {
            assert_eq!(fam.psi(n).value(fam.center(n)), 1.0);
            assert_eq!(fam.ball(n), &[fam.center(n)]);
        }
        // Disjoint supports: products vanish identically.
        for a in 0..5 {
            for b in (a + 1)..5 {
                for x in 0..space.len() {
                    assert_eq!(fam.psi(a).value(x) * fam.psi(b).value(x), 0.0);
                }
            }
        }
    }

    #[test]
    fn bump_family_radius_bound_and_errors() {
        let space = int_line(5);
        let fam = bump_family(&space, &[4, 0, 2]).unwrap();
        for n in 1..fam.len() {
            assert!(fam.radius(n) <= fam.radius(n - 1) / 2.0);
            assert!(fam.radius(n) <= fam.radius(0) * 0.5f64.powi(n as i32 - 1) / 2.0 * 2.0);
        }
        assert!(bump_family(&space, &[1, 1]).is_err());
        assert!(bump_family(&space, &[]).is_err());
        let singleton = MetricSpace::new(vec!["o".into()], vec![vec![0.0]], None).unwrap();
        assert!(matches!(
            bump_family(&singleton, &[0]),
            Err(Error::DegenerateBall { .. })
        ));
    }

    #[test]
    fn bump_sum_respects_disjointness() {
        let space = int_line(5);
        let fam = bump_family(&space, &[0, 1, 2]).unwrap();
        let zero = bump_sum(&fam, &[0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
        let single = bump_sum(&fam, &[5.0], 1).unwrap();
        assert_eq!(single.value(0), 5.0);
        let two = bump_sum(&fam, &[1.0, 2.0], 2).unwrap();
        assert_eq!(two.value(1), 2.0);
        assert_eq!(two.value(0), 1.0);
        assert!(bump_sum(&fam, &[1.0], 2).is_err());
        assert!(bump_sum(&fam, &[1.0; 4], 4).is_err());
    }
}

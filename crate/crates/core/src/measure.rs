//! Finitely supported probability measures: pairings μ(f), supports, relative
//! entropy, and a dictionary-based surrogate for weak* proximity.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::BoundedFunction;
use crate::space::{same_space, CompactificationPair, MetricSpace};

/// Weights below this threshold are pruned at construction.
pub const WEIGHT_PRUNE: f64 = 1e-14;

/// Maximum deviation of the weight sum from 1 that is silently renormalized.
pub const MASS_TOL: f64 = 1e-12;

/// Probability measure with sparse nonnegative weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    space: Arc<MetricSpace>,
    weights: Vec<(usize, f64)>, // sorted by point index, strictly positive
}

impl Measure {
    /// Build from (index, weight) pairs; the sum must be within [`MASS_TOL`]
    /// of 1 (tiny drift is renormalized, anything larger is an error).
    pub fn new(space: Arc<MetricSpace>, weights: Vec<(usize, f64)>) -> Result<Self> {
        let mut map = vec![0.0; space.len()];
        for (i, w) in weights {
            if i >= space.len() {
                return Err(Error::InvalidMeasure {
                    reason: format!("point index {i} out of range"),
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure {
                    reason: format!("weight {w} at point {i} is not a finite nonnegative real"),
                });
            }
            map[i] += w;
        }
        let sum: f64 = map.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure {
                reason: format!("weights sum to {sum}, expected 1 within {MASS_TOL}"),
            });
        }
        Ok(Self::from_map(space, map, sum))
    }

    /// Normalize arbitrary nonnegative weights with positive total mass.
    pub fn normalized(space: Arc<MetricSpace>, weights: Vec<(usize, f64)>) -> Result<Self> {
        let mut map = vec![0.0; space.len()];
        for (i, w) in weights {
            if i >= space.len() {
                return Err(Error::InvalidMeasure {
                    reason: format!("point index {i} out of range"),
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure {
                    reason: format!("weight {w} at point {i} is not a finite nonnegative real"),
                });
            }
            map[i] += w;
        }
        let sum: f64 = map.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidMeasure {
                reason: "total mass must be positive".into(),
            });
        }
        Ok(Self::from_map(space, map, sum))
    }

    fn from_map(space: Arc<MetricSpace>, map: Vec<f64>, sum: f64) -> Self {
        let weights = map
            .into_iter()
            .enumerate()
            .map(|(i, w)| (i, w / sum))
            .filter(|&(_, w)| w > WEIGHT_PRUNE)
            .collect();
        Measure { space, weights }
    }

    /// Point mass δ_x.
    pub fn dirac(space: Arc<MetricSpace>, i: usize) -> Result<Self> {
        Self::new(space, vec![(i, 1.0)])
    }

    pub fn uniform(space: Arc<MetricSpace>) -> Result<Self> {
        let n = space.len();
        Self::new(space, (0..n).map(|i| (i, 1.0 / n as f64)).collect())
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    /// Sparse weights, ascending by point index.
    pub fn weights(&self) -> &[(usize, f64)] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights
            .binary_search_by_key(&i, |&(p, _)| p)
            .map(|pos| self.weights[pos].1)
            .unwrap_or(0.0)
    }

    /// Dense weight vector in point order.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.space.len()];
        for &(i, w) in &self.weights {
            out[i] = w;
        }
        out
    }

    /// Points with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights.iter().map(|&(i, _)| i).collect()
    }

    /// Push an interior measure onto the pair's ambient space.
    pub fn extend_to_ambient(&self, pair: &CompactificationPair) -> Result<Measure> {
        if !same_space(&self.space, pair.interior_space()) {
            return Err(Error::space_mismatch(
                "extend_to_ambient expects a measure on the interior space",
            ));
        }
        let weights = self
            .weights
            .iter()
            .map(|&(pos, w)| (pair.ambient_index(pos), w))
            .collect();
        Measure::new(pair.ambient().clone(), weights)
    }

    pub fn expect(&self, f: &BoundedFunction) -> Result<f64> {
        evaluate(self, f)
    }
}

/// The pairing μ(f) = Σ w_i f(x_i).
pub fn evaluate(mu: &Measure, f: &BoundedFunction) -> Result<f64> {
    if !same_space(mu.space(), f.space()) {
        return Err(Error::space_mismatch("evaluate(μ, f)"));
    }
    Ok(mu.weights.iter().map(|&(i, w)| w * f.value(i)).sum())
}

/// Relative entropy Σ μ_i ln(μ_i/ν_i); +∞ when μ charges a ν-null point.
pub fn kl_divergence(mu: &Measure, nu: &Measure) -> Result<f64> {
    if !same_space(mu.space(), nu.space()) {
        return Err(Error::space_mismatch("kl_divergence"));
    }
    if mu == nu {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for &(i, w) in mu.weights() {
        let v = nu.weight(i);
        if v == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += w * (w / v).ln();
    }
    Ok(total.max(0.0))
}

/// Normalized probe functions standing in for the weak* topology.
#[derive(Debug, Clone)]
pub struct TestDictionary {
    functions: Vec<BoundedFunction>,
}

impl TestDictionary {
    /// Probes with ‖f‖ > 1 are scaled down to the unit ball; zero functions
    /// are kept as-is (they probe nothing but are harmless).
    pub fn new(functions: Vec<BoundedFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::param("dictionary", "need at least one probe function"));
        }
        let functions = functions
            .into_iter()
            .map(|f| {
                if f.sup_norm() > 1.0 {
                    f.scale(1.0 / f.sup_norm())
                } else {
                    Ok(f)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TestDictionary { functions })
    }

    pub fn functions(&self) -> &[BoundedFunction] {
        &self.functions
    }
}

/// Per k, the largest probe discrepancy max_f |μ_k(f) − target(f)|.
pub fn weakstar_gap(
    mus: &[Measure],
    target: &Measure,
    dict: &TestDictionary,
) -> Result<Vec<f64>> {
    mus.iter()
        .map(|mu| {
            let mut worst = 0.0_f64;
            for f in dict.functions() {
                let gap = (evaluate(mu, f)? - evaluate(target, f)?).abs();
                worst = worst.max(gap);
            }
            Ok(worst)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::sample_interval;

    fn two_points() -> Arc<MetricSpace> {
        MetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dirac_and_uniform_evaluate() {
        let s = two_points();
        let f = BoundedFunction::new(s.clone(), vec![0.0, 4.0]).unwrap();
        let d = Measure::dirac(s.clone(), 1).unwrap();
        assert_eq!(evaluate(&d, &f).unwrap(), 4.0);
        let u = Measure::uniform(s.clone()).unwrap();
        assert_eq!(evaluate(&u, &f).unwrap(), 2.0);
        let c = BoundedFunction::constant(s.clone(), 3.25).unwrap();
        assert_eq!(evaluate(&u, &c).unwrap(), 3.25);
    }

    #[test]
    fn construction_guards() {
        let s = two_points();
        assert!(Measure::new(s.clone(), vec![(0, 0.6), (1, 0.6)]).is_err());
        assert!(Measure::new(s.clone(), vec![(0, -0.2), (1, 1.2)]).is_err());
        assert!(Measure::new(s.clone(), vec![(5, 1.0)]).is_err());
        // Drift within tolerance is renormalized to an exact distribution.
        let m = Measure::new(s.clone(), vec![(0, 0.5 + 4e-13), (1, 0.5)]).unwrap();
        let total: f64 = m.weights().iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(Measure::normalized(s.clone(), vec![(0, 3.0), (1, 1.0)])
            .unwrap()
            .weight(0)
            .eq(&0.75));
        assert!(Measure::normalized(s, vec![(0, 0.0)]).is_err());
    }

    #[test]
    fn tiny_weights_pruned_from_support() {
        let s = two_points();
        let m = Measure::new(s, vec![(0, 1.0 - 1e-15), (1, 1e-15)]).unwrap();
        assert_eq!(m.support(), vec![0]);
        assert_eq!(m.weight(1), 0.0);
    }

    #[test]
    fn evaluate_checks_space() {
        let s = two_points();
        let other = MetricSpace::new(
            vec!["z".into(), "w".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            None,
        )
        .unwrap();
        let f = BoundedFunction::new(other, vec![1.0, 2.0]).unwrap();
        let m = Measure::uniform(s).unwrap();
        assert!(evaluate(&m, &f).is_err());
    }

    #[test]
    fn pairing_bounded_by_sup_norm() {
        let s = two_points();
        let f = BoundedFunction::new(s.clone(), vec![-3.0, 2.0]).unwrap();
        for m in [
            Measure::dirac(s.clone(), 0).unwrap(),
            Measure::dirac(s.clone(), 1).unwrap(),
            Measure::uniform(s.clone()).unwrap(),
        ] {
            assert!(evaluate(&m, &f).unwrap().abs() <= f.sup_norm());
        }
    }

    #[test]
    fn kl_examples() {
        let s = two_points();
        let point = Measure::dirac(s.clone(), 0).unwrap();
        let unif = Measure::uniform(s.clone()).unwrap();
        assert_eq!(kl_divergence(&unif, &unif).unwrap(), 0.0);
        assert!((kl_divergence(&point, &unif).unwrap() - 2.0_f64.ln()).abs() < 1e-15);
        assert_eq!(kl_divergence(&unif, &point).unwrap(), f64::INFINITY);
        assert!(kl_divergence(&point, &point).unwrap() == 0.0);
    }

    #[test]
    fn weakstar_gap_on_grid() {
        // 31 interior points: grid step 1/32, so the dyadic points 1 − 2^{−k}
        // are exact grid coordinates.
        let pair = sample_interval(31, true).unwrap();
        let ambient = pair.ambient().clone();
        let id = BoundedFunction::from_fn(ambient.clone(), |i| ambient.label(i).unwrap()).unwrap();
        let dict = TestDictionary::new(vec![id]).unwrap();
        let target = Measure::dirac(ambient.clone(), 32).unwrap(); // x = 1
        let mus: Vec<Measure> = (1..=5)
            .map(|k| {
                let coord = 1.0 - 0.5f64.powi(k);
                let idx = (0..ambient.len())
                    .find(|&i| ambient.label(i) == Some(coord))
                    .unwrap();
                Measure::dirac(ambient.clone(), idx).unwrap()
            })
            .collect();
        let gaps = weakstar_gap(&mus, &target, &dict).unwrap();
        for (k, gap) in gaps.iter().enumerate() {
            assert!((gap - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
        // Constant probes see nothing.
        let consts =
            TestDictionary::new(vec![BoundedFunction::constant(ambient.clone(), 1.0).unwrap()])
                .unwrap();
        assert!(weakstar_gap(&mus, &target, &consts)
            .unwrap()
            .iter()
            .all(|&g| g == 0.0));
    }

    #[test]
    fn dictionary_normalizes_large_probes() {
        let s = two_points();
        let big = BoundedFunction::new(s.clone(), vec![0.0, 10.0]).unwrap();
        let dict = TestDictionary::new(vec![big]).unwrap();
        assert_eq!(dict.functions()[0].sup_norm(), 1.0);
        assert!(TestDictionary::new(vec![]).is_err());
    }

    #[test]
    fn interior_measure_extends_to_ambient() {
        let pair = sample_interval(3, true).unwrap();
        let m = Measure::dirac(pair.interior_space().clone(), 1).unwrap();
        let ext = m.extend_to_ambient(&pair).unwrap();
        assert_eq!(ext.support(), vec![2]);
        let f = BoundedFunction::from_fn(pair.ambient().clone(), |i| i as f64).unwrap();
        assert_eq!(evaluate(&ext, &f).unwrap(), 2.0);
    }
}

//! Seeded random fixtures for the property suites: probe functions, measures
//! on the simplex, and acceptance cones.  Everything flows from one
//! explicitly passed ChaCha8 generator so runs are reproducible bit for bit.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::func::BoundedFunction;
use crate::lp::AcceptanceCone;
use crate::measure::Measure;
use crate::space::MetricSpace;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform values in [−amplitude, amplitude].
pub fn random_function(
    space: &Arc<MetricSpace>,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> Result<BoundedFunction> {
    let values = (0..space.len())
        .map(|_| rng.random_range(-amplitude..=amplitude))
        .collect();
    BoundedFunction::new(space.clone(), values)
}

/// A measure with full support drawn by normalizing positive uniform
/// weights.
pub fn random_measure(space: &Arc<MetricSpace>, rng: &mut ChaCha8Rng) -> Result<Measure> {
    let weights = (0..space.len())
        .map(|i| (i, rng.random_range(0.05..=1.0)))
        .collect();
    Measure::normalized(space.clone(), weights)
}

/// An acceptance cone with `count` random generators (each guaranteed a
/// nonzero sup norm).
pub fn random_cone(
    space: &Arc<MetricSpace>,
    count: usize,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> Result<AcceptanceCone> {
    let mut generators = Vec::with_capacity(count);
    for _ in 0..count {
        let mut f = random_function(space, amplitude, rng)?;
        if f.sup_norm() == 0.0 {
            f = BoundedFunction::constant(space.clone(), amplitude.max(1.0))?;
        }
        generators.push(f);
    }
    AcceptanceCone::new(space.clone(), generators)
}

/// A space of `n` points with i.i.d. uniform coordinates in [0, 1] and the
/// absolute-difference metric, deduplicated so the metric stays definite.
pub fn random_line_space(n: usize, rng: &mut ChaCha8Rng) -> Result<Arc<MetricSpace>> {
    let mut coords: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    loop {
        let mut clash = false;
        for i in 0..n {
            for j in (i + 1)..n {
                if coords[i] == coords[j] {
                    coords[j] = rng.random_range(0.0..1.0);
                    clash = true;
                }
            }
        }
        if !clash {
            break;
        }
    }
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
        .collect();
    MetricSpace::new(
        (0..n).map(|i| format!("q{i}")).collect(),
        dist,
        Some(coords),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Arc<MetricSpace> {
        let coords: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let dist = coords
            .iter()
            .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
            .collect();
        MetricSpace::new((0..n).map(|i| format!("x{i}")).collect(), dist, None).unwrap()
    }

    #[test]
    fn same_seed_same_draws() {
        let s = line(4);
        let mut r1 = rng_from_seed(7);
        let mut r2 = rng_from_seed(7);
        let f1 = random_function(&s, 2.0, &mut r1).unwrap();
        let f2 = random_function(&s, 2.0, &mut r2).unwrap();
        assert_eq!(f1.values(), f2.values());
        let m1 = random_measure(&s, &mut r1).unwrap();
        let m2 = random_measure(&s, &mut r2).unwrap();
        assert_eq!(m1.dense(), m2.dense());
    }

    #[test]
    fn different_seed_differs() {
        let s = line(4);
        let f1 = random_function(&s, 2.0, &mut rng_from_seed(1)).unwrap();
        let f2 = random_function(&s, 2.0, &mut rng_from_seed(2)).unwrap();
        assert_ne!(f1.values(), f2.values());
    }

    #[test]
    fn draws_respect_bounds() {
        let s = line(6);
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let f = random_function(&s, 1.5, &mut rng).unwrap();
            assert!(f.sup_norm() <= 1.5);
            let m = random_measure(&s, &mut rng).unwrap();
            let total: f64 = m.dense().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert_eq!(m.support().len(), 6);
        }
    }

    #[test]
    fn random_cone_generators_nonzero() {
        let s = line(3);
        let mut rng = rng_from_seed(3);
        let cone = random_cone(&s, 4, 1.0, &mut rng).unwrap();
        assert_eq!(cone.generators().len(), 4);
        for g in cone.generators() {
            assert!(g.sup_norm() > 0.0);
        }
    }

    #[test]
    fn random_line_space_valid() {
        let mut rng = rng_from_seed(5);
        let s = random_line_space(8, &mut rng).unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.validate().is_empty());
    }
}

//! Randomized invariants for the library's core operations: envelope
//! contraction and idempotence, pairing bounds, relative-entropy
//! inequalities, scenario minimization, entropic duality gaps, simplex
//! certificates, bipolar acceptance, and bump-family disjointness.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use riskdual::func::{bump_family, lipschitz_envelope, upper_envelope, BoundedFunction};
use riskdual::lp::{
    bipolar_membership, check_optimal, solve_min, AcceptanceCone, LinearProgram, LpStatus, Sense,
};
use riskdual::measure::{evaluate, kl_divergence, Measure};
use riskdual::space::MetricSpace;
use riskdual::utility::{coherent_eval, entropic_eval, ScenarioSet};

/// Line space on dyadic coordinates c/64 so every pairwise distance is an
/// exact float and the metric axioms hold bitwise.
fn line_space(coords: &BTreeSet<u32>) -> Arc<MetricSpace> {
    let xs: Vec<f64> = coords.iter().map(|&c| f64::from(c) / 64.0).collect();
    let n = xs.len();
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    let dist = (0..n)
        .map(|i| (0..n).map(|j| (xs[i] - xs[j]).abs()).collect())
        .collect();
    MetricSpace::new(ids, dist, Some(xs)).expect("valid line space")
}

/// A dyadic line space with 2..=max_pts points plus `funcs` value vectors.
fn space_and_values(
    max_pts: usize,
    funcs: usize,
) -> impl Strategy<Value = (Arc<MetricSpace>, Vec<Vec<f64>>)> {
    prop::collection::btree_set(0u32..512, 2..=max_pts).prop_flat_map(move |coords| {
        let space = line_space(&coords);
        let n = space.len();
        let values = prop::collection::vec(prop::collection::vec(-8.0f64..8.0, n), funcs);
        (Just(space), values)
    })
}

fn func(space: &Arc<MetricSpace>, values: Vec<f64>) -> BoundedFunction {
    BoundedFunction::new(Arc::clone(space), values).expect("matching length")
}

fn measure_from(space: &Arc<MetricSpace>, raw: &[f64]) -> Measure {
    let weights = raw
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w.abs() + 0.05))
        .collect();
    Measure::normalized(Arc::clone(space), weights).expect("positive mass")
}

fn sup_gap(a: &BoundedFunction, b: &BoundedFunction) -> f64 {
    (0..a.len())
        .map(|i| (a.value(i) - b.value(i)).abs())
        .fold(0.0, f64::max)
}

proptest! {
    /// Both envelope maps are sup-norm contractions.
    #[test]
    fn envelope_is_a_contraction(
        (space, vals) in space_and_values(7, 2),
        n in 1u32..=8,
    ) {
        let n = f64::from(n);
        let f = func(&space, vals[0].clone());
        let g = func(&space, vals[1].clone());
        let dist = sup_gap(&f, &g);
        let lf = lipschitz_envelope(&f, n).unwrap();
        let lg = lipschitz_envelope(&g, n).unwrap();
        prop_assert!(sup_gap(&lf, &lg) <= dist + 1e-9);
        let uf = upper_envelope(&f, n).unwrap();
        let ug = upper_envelope(&g, n).unwrap();
        prop_assert!(sup_gap(&uf, &ug) <= dist + 1e-9);
    }

    /// Lower envelopes sit below f, are n-Lipschitz, increase with n, and
    /// mirror the upper envelopes from above.
    #[test]
    fn envelope_bounds_and_modulus(
        (space, vals) in space_and_values(7, 1),
        n in 1u32..=8,
    ) {
        let n = f64::from(n);
        let f = func(&space, vals[0].clone());
        let lower = lipschitz_envelope(&f, n).unwrap();
        let upper = upper_envelope(&f, n).unwrap();
        let looser = lipschitz_envelope(&f, 2.0 * n).unwrap();
        for i in 0..space.len() {
            prop_assert!(lower.value(i) <= f.value(i) + 1e-12);
            prop_assert!(upper.value(i) >= f.value(i) - 1e-12);
            prop_assert!(looser.value(i) >= lower.value(i) - 1e-12);
            for j in 0..space.len() {
                let slope = (lower.value(i) - lower.value(j)).abs();
                prop_assert!(slope <= n * space.dist(i, j) + 1e-9);
            }
        }
    }

    /// Applying the envelope twice at the same modulus changes nothing: the
    /// first pass is already n-Lipschitz.
    #[test]
    fn envelope_is_idempotent(
        (space, vals) in space_and_values(7, 1),
        n in 1u32..=8,
    ) {
        let n = f64::from(n);
        let once = lipschitz_envelope(&func(&space, vals[0].clone()), n).unwrap();
        let twice = lipschitz_envelope(&once, n).unwrap();
        prop_assert!(sup_gap(&once, &twice) <= 1e-9);
    }

    /// |μ(f)| ≤ ‖f‖ and the pairing is linear in f.
    #[test]
    fn pairing_is_bounded_and_linear(
        (space, vals) in space_and_values(7, 3),
        a in -4.0f64..4.0,
    ) {
        let f = func(&space, vals[0].clone());
        let g = func(&space, vals[1].clone());
        let mu = measure_from(&space, &vals[2]);
        let ef = evaluate(&mu, &f).unwrap();
        prop_assert!(ef.abs() <= f.sup_norm() + 1e-12);
        let combo = f.scale(a).unwrap().add(&g).unwrap();
        let lhs = evaluate(&mu, &combo).unwrap();
        let rhs = a * ef + evaluate(&mu, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    /// Normalization produces a probability vector with full support here.
    #[test]
    fn normalized_measures_sum_to_one(
        (space, vals) in space_and_values(7, 1),
    ) {
        let mu = measure_from(&space, &vals[0]);
        let total: f64 = mu.weights().iter().map(|&(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(mu.weights().iter().all(|&(_, w)| w > 0.0));
    }

    /// Relative entropy is nonnegative, vanishes on the diagonal, and
    /// dominates half the squared total variation (Pinsker).
    #[test]
    fn relative_entropy_inequalities(
        (space, vals) in space_and_values(7, 2),
    ) {
        let mu = measure_from(&space, &vals[0]);
        let nu = measure_from(&space, &vals[1]);
        let kl = kl_divergence(&mu, &nu).unwrap();
        prop_assert!(kl >= 0.0 && kl.is_finite());
        prop_assert_eq!(kl_divergence(&mu, &mu).unwrap(), 0.0);
        let tv: f64 = (0..space.len())
            .map(|i| (mu.weight(i) - nu.weight(i)).abs())
            .sum();
        prop_assert!(kl + 1e-9 >= 0.5 * tv * tv);
    }

    /// A coherent evaluation over explicit vertices is the vertex minimum,
    /// and the returned witness attains it.
    #[test]
    fn coherent_eval_matches_vertex_minimum(
        (space, vals) in space_and_values(6, 4),
        c in -3.0f64..3.0,
    ) {
        let f = func(&space, vals[0].clone());
        let vertices: Vec<Measure> =
            vals[1..].iter().map(|raw| measure_from(&space, raw)).collect();
        let expected = vertices
            .iter()
            .map(|m| evaluate(m, &f).unwrap())
            .fold(f64::INFINITY, f64::min);
        let set = ScenarioSet::from_vertices(Arc::clone(&space), vertices).unwrap();
        let (value, witness) = coherent_eval(&set, &f).unwrap();
        prop_assert!((value - expected).abs() <= 1e-12);
        prop_assert!((evaluate(&witness, &f).unwrap() - value).abs() <= 1e-12);
        let shifted = f.shift(c).unwrap();
        let (translated, _) = coherent_eval(&set, &shifted).unwrap();
        prop_assert!((translated - (value + c)).abs() <= 1e-9);
    }

    /// Entropic utilities sit between the minimum and the reference mean,
    /// translate additively, and their minimizer closes the duality gap.
    #[test]
    fn entropic_value_is_tight(
        (space, vals) in space_and_values(7, 2),
        gamma in 0.1f64..4.0,
        c in -3.0f64..3.0,
    ) {
        let f = func(&space, vals[0].clone());
        let nu = measure_from(&space, &vals[1]);
        let (value, minimizer) = entropic_eval(gamma, &nu, &f).unwrap();
        let low = (0..space.len()).map(|i| f.value(i)).fold(f64::INFINITY, f64::min);
        prop_assert!(value >= low - 1e-9);
        prop_assert!(value <= evaluate(&nu, &f).unwrap() + 1e-9);
        let primal = evaluate(&minimizer, &f).unwrap()
            + gamma * kl_divergence(&minimizer, &nu).unwrap();
        prop_assert!((primal - value).abs() <= 1e-8);
        let (translated, _) = entropic_eval(gamma, &nu, &f.shift(c).unwrap()).unwrap();
        prop_assert!((translated - (value + c)).abs() <= 1e-9);
    }

    /// Minimizing a linear objective over the probability simplex with one
    /// floor constraint has a closed-form optimum; the solver must find it,
    /// certify it, and reproduce it bit for bit.
    #[test]
    fn simplex_certifies_and_repeats(
        cost in prop::collection::vec(-5.0f64..5.0, 2..7),
        pinned in 0usize..6,
    ) {
        let n = cost.len();
        let pinned = pinned % n;
        let mut lp = LinearProgram::new(cost.clone());
        lp.push(vec![1.0; n], Sense::Eq, 1.0);
        let mut floor = vec![0.0; n];
        floor[pinned] = 1.0;
        lp.push(floor, Sense::Ge, 0.25);
        let res = solve_min(&lp).unwrap();
        prop_assert_eq!(res.status, LpStatus::Optimal);
        let best = cost.iter().copied().fold(f64::INFINITY, f64::min);
        let expected = 0.25 * cost[pinned] + 0.75 * best;
        let value = res.value.unwrap();
        prop_assert!((value - expected).abs() <= 1e-9);
        prop_assert!(check_optimal(&lp, &res).is_ok());
        let again = solve_min(&lp).unwrap();
        let xs = res.x.as_ref().unwrap();
        let ys = again.x.as_ref().unwrap();
        prop_assert_eq!(xs.len(), ys.len());
        for (a, b) in xs.iter().zip(ys) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    /// Bump families are [0, 1]-valued, peak at their centers, and have
    /// pairwise disjoint supports.
    #[test]
    fn bump_family_is_disjoint(
        coords in prop::collection::btree_set(0u32..512, 2..=7),
        picks in prop::collection::vec(any::<bool>(), 7),
    ) {
        let space = line_space(&coords);
        let centers: Vec<usize> =
            (0..space.len()).filter(|&i| picks[i]).collect();
        prop_assume!(!centers.is_empty());
        let fam = bump_family(&space, &centers).unwrap();
        for n in 0..fam.len() {
            let psi = fam.psi(n);
            prop_assert_eq!(psi.value(fam.center(n)), 1.0);
            for i in 0..space.len() {
                prop_assert!((0.0..=1.0).contains(&psi.value(i)));
            }
            for m in 0..n {
                for i in 0..space.len() {
                    let overlap = fam.psi(m).value(i).min(psi.value(i));
                    prop_assert_eq!(overlap, 0.0);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every generator of an acceptance cone is accepted by the polar
    /// scenario set it induces.
    #[test]
    fn polar_set_accepts_generators(
        (space, vals) in space_and_values(5, 3),
    ) {
        for raw in &vals {
            prop_assume!(raw.iter().any(|v| v.abs() > 1e-9));
        }
        let gens: Vec<BoundedFunction> =
            vals.iter().map(|raw| func(&space, raw.clone())).collect();
        let cone = AcceptanceCone::new(Arc::clone(&space), gens.clone()).unwrap();
        let polar = polar_set(&cone);
        for g in &gens {
            let decision = bipolar_membership(g, &polar).unwrap();
            prop_assert!(
                decision.accepted,
                "generator rejected with min {:?}",
                decision.min_value
            );
        }
    }
}

fn polar_set(cone: &AcceptanceCone) -> ScenarioSet {
    riskdual::lp::polar_scenario_set(cone, false).expect("small space enumerates")
}
